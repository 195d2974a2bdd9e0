//! Vertex paths and finitely supported transports (weighted collections of paths).

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::space::Space;
use crate::tolerance::ZERO_WEIGHT;

/// A polygonal curve through points of a space.
///
/// A single vertex encodes the constant curve at that point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    vertices: Vec<usize>,
}

impl Path {
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Degenerate("a path needs at least one vertex".into()));
        }
        if let Some(w) = vertices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Degenerate(format!(
                "consecutive vertices coincide at {}",
                w[0]
            )));
        }
        Ok(Self { vertices })
    }

    pub fn constant(v: usize) -> Self {
        Self { vertices: vec![v] }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_constant(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().expect("paths are nonempty")
    }

    /// Consecutive `(tail, head)` pairs.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    /// No vertex visited twice.
    pub fn is_arc(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.vertices.len());
        self.vertices.iter().all(|v| seen.insert(*v))
    }

    /// Parametric length: sum of consecutive distances.
    pub fn length(&self, space: &Space) -> f64 {
        self.segments()
            .map(|(a, b)| space.d(a, b))
            .fold(0.0, |acc, x| acc + x)
    }

    pub fn reversed(&self) -> Path {
        let mut v = self.vertices.clone();
        v.reverse();
        Path { vertices: v }
    }

    /// Concatenation; `other` must start where `self` ends.
    pub fn concat(&self, other: &Path) -> Result<Path> {
        if self.end() != other.start() {
            return Err(Error::Degenerate(format!(
                "cannot join a path ending at {} to one starting at {}",
                self.end(),
                other.start()
            )));
        }
        let mut v = self.vertices.clone();
        v.extend_from_slice(&other.vertices[1..]);
        Ok(Path { vertices: v })
    }

    pub(crate) fn check_in(&self, space: &Space) -> Result<()> {
        self.vertices.iter().try_for_each(|&v| space.check(v))
    }
}

/// A finite positive combination of Dirac masses on paths.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Transport {
    atoms: Vec<(f64, Path)>,
}

impl Transport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Drops atoms whose weight is below the zero threshold.
    pub fn from_atoms(atoms: Vec<(f64, Path)>) -> Result<Self> {
        let mut t = Self::new();
        for (w, p) in atoms {
            t.push(w, p)?;
        }
        Ok(t)
    }

    pub fn push(&mut self, weight: f64, path: Path) -> Result<()> {
        if !weight.is_finite() {
            return Err(Error::NonFinite(format!("transport weight {weight}")));
        }
        if weight < 0.0 {
            return Err(Error::Degenerate(format!(
                "negative transport weight {weight}"
            )));
        }
        if weight > ZERO_WEIGHT {
            self.atoms.push((weight, path));
        }
        Ok(())
    }

    pub fn atoms(&self) -> &[(f64, Path)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total mass of the transport as a measure on curves.
    pub fn total_mass(&self) -> f64 {
        self.atoms
            .iter()
            .map(|(w, _)| w)
            .fold(0.0, |acc, x| acc + x)
    }

    /// Push-forward under the start-point map.
    pub fn start_measure(&self) -> AtomicMeasure {
        AtomicMeasure::from_pairs(self.atoms.iter().map(|(w, p)| (p.start(), *w)))
    }

    /// Push-forward under the end-point map.
    pub fn end_measure(&self) -> AtomicMeasure {
        AtomicMeasure::from_pairs(self.atoms.iter().map(|(w, p)| (p.end(), *w)))
    }

    /// `Σ w · ℓ(path)`.
    pub fn cost(&self, space: &Space) -> f64 {
        self.atoms
            .iter()
            .map(|(w, p)| w * p.length(space))
            .fold(0.0, |acc, x| acc + x)
    }

    pub fn all_arcs(&self) -> bool {
        self.atoms.iter().all(|(_, p)| p.is_arc())
    }

    pub fn scaled(&self, c: f64) -> Result<Transport> {
        Transport::from_atoms(self.atoms.iter().map(|(w, p)| (w * c, p.clone())).collect())
    }

    pub fn reversed(&self) -> Transport {
        Transport {
            atoms: self.atoms.iter().map(|(w, p)| (*w, p.reversed())).collect(),
        }
    }

    /// Sub-transport made of the atoms at the given positions.
    pub fn select(&self, keep: impl IntoIterator<Item = usize>) -> Transport {
        Transport {
            atoms: keep.into_iter().map(|i| self.atoms[i].clone()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_validation() {
        assert!(Path::new(vec![]).is_err());
        assert!(Path::new(vec![1, 1]).is_err());
        assert!(Path::new(vec![1, 2, 1]).unwrap().len() == 3);
        assert!(Path::constant(4).is_constant());
    }

    #[test]
    fn arcs() {
        assert!(Path::new(vec![0, 1, 2]).unwrap().is_arc());
        assert!(!Path::new(vec![0, 1, 0]).unwrap().is_arc());
        assert!(Path::constant(3).is_arc());
    }

    #[test]
    fn endpoint_measures() {
        let t = Transport::from_atoms(vec![
            (2.0, Path::new(vec![0, 1]).unwrap()),
            (1.0, Path::new(vec![2, 1]).unwrap()),
            (0.0, Path::new(vec![5, 6]).unwrap()),
        ])
        .unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.start_measure().get(0), 2.0);
        assert_eq!(t.start_measure().get(2), 1.0);
        assert_eq!(t.end_measure().get(1), 3.0);
        assert_eq!(t.total_mass(), 3.0);
    }
}
