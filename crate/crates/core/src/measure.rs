//! Finite signed measures concentrated on finitely many points (0-dimensional currents).

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::space::Space;
use crate::tolerance::ZERO_WEIGHT;

/// `Σ w_i δ_{x_i}` with no stored zero weights.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AtomicMeasure {
    atoms: BTreeMap<usize, f64>,
}

impl AtomicMeasure {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn dirac(index: usize, weight: f64) -> Self {
        Self::from_pairs([(index, weight)])
    }

    /// Sums repeated indices, then drops atoms with `|w| < 1e-15`.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut atoms = BTreeMap::new();
        for (i, w) in pairs {
            *atoms.entry(i).or_insert(0.0) += w;
        }
        atoms.retain(|_, w: &mut f64| w.abs() >= ZERO_WEIGHT);
        Self { atoms }
    }

    /// Like [`from_pairs`](Self::from_pairs) but rejects non-finite weights.
    pub fn try_from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let pairs: Vec<_> = pairs.into_iter().collect();
        if let Some((i, w)) = pairs.iter().find(|(_, w)| !w.is_finite()) {
            return Err(Error::NonFinite(format!("weight {w} at atom {i}")));
        }
        Ok(Self::from_pairs(pairs))
    }

    pub fn get(&self, index: usize) -> f64 {
        self.atoms.get(&index).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.atoms.iter().map(|(i, w)| (*i, *w))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.atoms.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Signed total `μ(E)`.
    pub fn total(&self) -> f64 {
        self.atoms.values().fold(0.0, |acc, x| acc + x)
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms
            .values()
            .map(|w| w.abs())
            .fold(0.0, |acc, x| acc + x)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.atoms.values().all(|w| *w > 0.0)
    }

    /// Positive and negative parts, `μ = μ⁺ − μ⁻` with disjoint supports.
    pub fn jordan(&self) -> (AtomicMeasure, AtomicMeasure) {
        let plus = self.atoms.iter().filter(|(_, w)| **w > 0.0);
        let minus = self.atoms.iter().filter(|(_, w)| **w < 0.0);
        (
            AtomicMeasure {
                atoms: plus.map(|(i, w)| (*i, *w)).collect(),
            },
            AtomicMeasure {
                atoms: minus.map(|(i, w)| (*i, -*w)).collect(),
            },
        )
    }

    pub fn positive_part(&self) -> AtomicMeasure {
        self.jordan().0
    }

    pub fn negative_part(&self) -> AtomicMeasure {
        self.jordan().1
    }

    pub fn scale(&self, c: f64) -> AtomicMeasure {
        AtomicMeasure::from_pairs(self.iter().map(|(i, w)| (i, c * w)))
    }

    /// `∫ f dμ`.
    pub fn pair(&self, mut f: impl FnMut(usize) -> f64) -> f64 {
        self.iter()
            .map(|(i, w)| w * f(i))
            .fold(0.0, |acc, x| acc + x)
    }

    pub fn push_forward(&self, map: impl Fn(usize) -> usize) -> AtomicMeasure {
        AtomicMeasure::from_pairs(self.iter().map(|(i, w)| (map(i), w)))
    }

    pub fn check_in(&self, space: &Space) -> Result<()> {
        self.support().try_for_each(|i| space.check(i))
    }

    /// Total variation of the difference; the atom-wise discrepancy of two measures.
    pub fn distance_tv(&self, other: &AtomicMeasure) -> f64 {
        (self - other).total_variation()
    }
}

impl Add for &AtomicMeasure {
    type Output = AtomicMeasure;
    fn add(self, rhs: &AtomicMeasure) -> AtomicMeasure {
        AtomicMeasure::from_pairs(self.iter().chain(rhs.iter()))
    }
}

impl Sub for &AtomicMeasure {
    type Output = AtomicMeasure;
    fn sub(self, rhs: &AtomicMeasure) -> AtomicMeasure {
        AtomicMeasure::from_pairs(self.iter().chain(rhs.iter().map(|(i, w)| (i, -w))))
    }
}

impl Neg for &AtomicMeasure {
    type Output = AtomicMeasure;
    fn neg(self) -> AtomicMeasure {
        self.scale(-1.0)
    }
}

impl Add for AtomicMeasure {
    type Output = AtomicMeasure;
    fn add(self, rhs: AtomicMeasure) -> AtomicMeasure {
        &self + &rhs
    }
}

impl Sub for AtomicMeasure {
    type Output = AtomicMeasure;
    fn sub(self, rhs: AtomicMeasure) -> AtomicMeasure {
        &self - &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jordan_cases() {
        let (p, m) = AtomicMeasure::zero().jordan();
        assert!(p.is_zero() && m.is_zero());

        let mu = AtomicMeasure::from_pairs([(1, 1.0), (0, -1.0)]);
        let (p, m) = mu.jordan();
        assert_eq!(p, AtomicMeasure::dirac(1, 1.0));
        assert_eq!(m, AtomicMeasure::dirac(0, 1.0));

        let mu = AtomicMeasure::from_pairs([(0, 3.0), (0, -1.0)]);
        let (p, m) = mu.jordan();
        assert_eq!(p, AtomicMeasure::dirac(0, 2.0));
        assert!(m.is_zero());
    }

    #[test]
    fn total_variation_cases() {
        assert_eq!(AtomicMeasure::zero().total_variation(), 0.0);
        let mu = AtomicMeasure::from_pairs([(1, 1.0), (0, -1.0)]);
        assert_eq!(mu.total_variation(), 2.0);
        let mu = AtomicMeasure::from_pairs([(0, 2.0), (1, 3.0), (2, -1.0)]);
        assert_eq!(mu.total_variation(), 6.0);
        let (p, m) = mu.jordan();
        assert_eq!(p.total_variation() + m.total_variation(), 6.0);
    }

    #[test]
    fn tiny_weights_are_dropped() {
        let mu = AtomicMeasure::from_pairs([(0, 1.0), (0, -1.0 + 1e-16), (3, 1e-17)]);
        assert!(mu.is_zero());
        assert!(AtomicMeasure::try_from_pairs([(0, f64::NAN)]).is_err());
    }

    #[test]
    fn arithmetic() {
        let a = AtomicMeasure::from_pairs([(0, 1.0), (1, 2.0)]);
        let b = AtomicMeasure::from_pairs([(1, 2.0), (2, -1.0)]);
        let s = &a - &b;
        assert_eq!(s, AtomicMeasure::from_pairs([(0, 1.0), (2, 1.0)]));
        assert_eq!((&s + &b), a);
        assert_eq!(a.pair(|i| i as f64), 2.0);
    }
}
