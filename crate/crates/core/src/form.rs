//! Differential 1-forms `f dπ` on embedded spaces.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::Norm;

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A scalar function on coordinates, either affine (exact) or an arbitrary closure.
#[derive(Clone)]
pub enum ScalarField {
    Affine { gradient: Vec<f64>, offset: f64 },
    Callable(ScalarFn),
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Affine { gradient, offset } => f
                .debug_struct("Affine")
                .field("gradient", gradient)
                .field("offset", offset)
                .finish(),
            ScalarField::Callable(_) => f.write_str("Callable(..)"),
        }
    }
}

impl ScalarField {
    pub fn constant(c: f64, dim: usize) -> Self {
        ScalarField::Affine {
            gradient: vec![0.0; dim],
            offset: c,
        }
    }

    pub fn affine(gradient: Vec<f64>, offset: f64) -> Self {
        ScalarField::Affine { gradient, offset }
    }

    /// The `i`-th coordinate function.
    pub fn coordinate(i: usize, dim: usize) -> Self {
        let mut g = vec![0.0; dim];
        g[i] = 1.0;
        ScalarField::affine(g, 0.0)
    }

    pub fn callable(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField::Callable(Arc::new(f))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ScalarField::Affine { gradient, offset } => {
                offset + gradient.iter().zip(x).map(|(g, v)| g * v).sum::<f64>()
            }
            ScalarField::Callable(f) => f(x),
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, ScalarField::Affine { .. })
    }
}

/// `ω = f dπ` with a declared bound `sup |f|` and Lipschitz constant of `π`.
#[derive(Debug, Clone)]
pub struct Form {
    pub f: ScalarField,
    pub f_sup: f64,
    pub pi: ScalarField,
    pub pi_lip: f64,
}

impl Form {
    pub fn new(f: ScalarField, f_sup: f64, pi: ScalarField, pi_lip: f64) -> Result<Self> {
        if !(f_sup >= 0.0 && f_sup.is_finite()) || !(pi_lip >= 0.0 && pi_lip.is_finite()) {
            return Err(Error::InvalidForm(format!(
                "bounds must be finite and nonnegative (sup|f| = {f_sup}, Lip = {pi_lip})"
            )));
        }
        Ok(Self {
            f,
            f_sup,
            pi,
            pi_lip,
        })
    }

    /// Affine `π` with its Lipschitz constant taken as the dual norm of the gradient.
    pub fn with_affine_pi(
        f: ScalarField,
        f_sup: f64,
        pi_gradient: Vec<f64>,
        pi_offset: f64,
        norm: Norm,
    ) -> Result<Self> {
        let lip = norm.dual().of(&pi_gradient);
        Self::new(f, f_sup, ScalarField::affine(pi_gradient, pi_offset), lip)
    }

    /// `1 dπ`.
    pub fn exact(pi_gradient: Vec<f64>, pi_offset: f64, norm: Norm) -> Result<Self> {
        let dim = pi_gradient.len();
        Self::with_affine_pi(
            ScalarField::constant(1.0, dim),
            1.0,
            pi_gradient,
            pi_offset,
            norm,
        )
    }

    /// Checks that an affine `π` honours its declared Lipschitz constant under `norm`.
    pub fn validate(&self, norm: Norm, dim: usize) -> Result<()> {
        for field in [&self.f, &self.pi] {
            if let ScalarField::Affine { gradient, offset } = field {
                if gradient.len() != dim {
                    return Err(Error::InvalidForm(format!(
                        "affine gradient has {} entries, space has dimension {dim}",
                        gradient.len()
                    )));
                }
                if !offset.is_finite() || gradient.iter().any(|g| !g.is_finite()) {
                    return Err(Error::NonFinite("affine form coefficients".into()));
                }
            }
        }
        if let ScalarField::Affine { gradient, .. } = &self.pi {
            let lip = norm.dual().of(gradient);
            if lip > self.pi_lip * (1.0 + 1e-12) + 1e-15 {
                return Err(Error::InvalidForm(format!(
                    "declared Lip(π) = {} but the gradient has dual norm {lip}",
                    self.pi_lip
                )));
            }
        }
        Ok(())
    }
}
