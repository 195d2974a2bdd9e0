//! Numerical tolerances shared by every check in the crate.

/// Below this magnitude a weight is treated as zero and dropped.
pub const ZERO_WEIGHT: f64 = 1e-15;

/// Absolute and relative tolerances used for equality checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-12,
            rel: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    /// Same absolute tolerance, relative tolerance replaced.
    pub fn with_rel(self, rel: f64) -> Self {
        Self { rel, ..self }
    }

    /// Largest residual accepted when the quantity being compared has size `scale`.
    pub fn bound(&self, scale: f64) -> f64 {
        self.abs.max(self.rel * scale.abs())
    }

    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.bound(a.abs().max(b.abs()))
    }
}
