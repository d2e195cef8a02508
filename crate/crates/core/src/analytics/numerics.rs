//! Small numerical helpers: binomial coefficients, compensated summation
//! with a conditioning estimate, and a fast-path/oracle cross-check record.

/// Conditioning above which an alternating closed-form sum is not trusted.
pub const MAX_CONDITION: f64 = 1e8;

/// Absolute agreement required between a closed form and its oracle.
pub const AGREEMENT_TOL: f64 = 1e-6;

/// Binomial coefficient C(n, k) as f64; log-space above n = 30.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 30 {
        let mut c: u64 = 1;
        for i in 0..k as u64 {
            c = c * (n as u64 - i) / (i + 1);
        }
        c as f64
    } else {
        ln_binomial(n, k).exp()
    }
}

pub fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum()
}

/// Neumaier summation that also tracks Σ|term| for a conditioning estimate.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
    magnitude: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation += (self.sum - t) + term;
        } else {
            self.compensation += (term - t) + self.sum;
        }
        self.sum = t;
        self.magnitude += term.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    /// Σ|term| / |Σ term|; infinite when the sum cancels to zero with
    /// non-zero terms.
    pub fn condition(&self) -> f64 {
        self.condition_against(0.0)
    }

    /// Σ|term| / max(|Σ term|, floor). With `floor` at the scale on which
    /// the result is judged (1 for a probability), this bounds the absolute
    /// rounding error by ε times the returned value.
    pub fn condition_against(&self, floor: f64) -> f64 {
        let value = self.value().abs().max(floor);
        if self.magnitude == 0.0 {
            1.0
        } else if value == 0.0 {
            f64::INFINITY
        } else {
            self.magnitude / value
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for term in iter {
            acc.add(term);
        }
        acc
    }
}

/// A closed-form value next to the oracle it was checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct Crosscheck {
    pub label: String,
    pub fast: f64,
    pub oracle: f64,
    /// Error bound reported by the oracle (0 for exact enumerations).
    pub oracle_error: f64,
    /// Conditioning of the fast path's sum.
    pub condition: f64,
    pub tolerance: f64,
}

impl Crosscheck {
    pub fn difference(&self) -> f64 {
        (self.fast - self.oracle).abs()
    }

    /// The fast path is accepted when it is well conditioned and within
    /// `tolerance` of the oracle, counting the oracle's own error bound.
    pub fn agrees(&self) -> bool {
        self.condition <= MAX_CONDITION
            && self.fast.is_finite()
            && self.difference() + self.oracle_error <= self.tolerance
    }

    /// Value to use downstream: the fast path when it agrees, else the
    /// oracle (with a logged diagnostic).
    pub fn resolve(&self) -> f64 {
        if self.agrees() {
            self.fast
        } else {
            log::warn!(
                "{}: closed form {} disagrees with oracle {} (|Δ|={:e}, oracle error {:e}, condition {:e}); using oracle",
                self.label,
                self.fast,
                self.oracle,
                self.difference(),
                self.oracle_error,
                self.condition
            );
            self.oracle
        }
    }
}
