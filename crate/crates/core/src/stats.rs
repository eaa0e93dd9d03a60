//! Running moments with an order-fixed merge.
//!
//! Results are bit-identical for any worker count as long as samples are
//! pushed in trial order within a block and blocks are merged by
//! [`merge_pairwise`] in block order.

/// Count, mean and centered second moment (Welford / Chan et al.).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    sum: f64,
    max: f64,
}

impl Moments {
    pub const fn new() -> Self {
        Self { n: 0, mean: 0.0, m2: 0.0, sum: 0.0, max: f64::NEG_INFINITY }
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.max = self.max.max(x);
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        self.mean += d * w;
        self.m2 += other.m2 + d * d * self.n as f64 * w;
        self.sum += other.sum;
        self.max = self.max.max(other.max);
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Plain running sum; for 0/1 samples this is the event count.
    pub fn sum(&self) -> f64 {
        self.sum
    }

    /// Largest sample; negative infinity when empty.
    pub fn max(&self) -> f64 {
        self.max
    }

    /// Sample variance with `n - 1` in the denominator; zero below two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// `stddev / sqrt(n)`; zero below two samples.
    pub fn std_err(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            libm::sqrt(self.variance() / self.n as f64)
        }
    }
}

impl Default for Moments {
    fn default() -> Self {
        Self::new()
    }
}

/// Merges per-block accumulators as a balanced binary tree over block order.
pub fn merge_pairwise(blocks: &[Moments]) -> Moments {
    match blocks.len() {
        0 => Moments::new(),
        1 => blocks[0],
        n => {
            let (left, right) = blocks.split_at(n / 2);
            let mut acc = merge_pairwise(left);
            acc.merge(&merge_pairwise(right));
            acc
        }
    }
}
