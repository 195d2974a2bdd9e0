//! Finite ambient spaces: point clouds in a normed plane/space, or an explicit distance matrix.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::path::Path;
use crate::tolerance::Tolerance;

/// The ℓp norms supported on embedded spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    L1,
    L2,
    LInf,
}

impl Norm {
    pub fn of(&self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|x| x.abs()).fold(0.0, |acc, x| acc + x),
            Norm::L2 => v
                .iter()
                .map(|x| x * x)
                .fold(0.0, |acc: f64, x| acc + x)
                .sqrt(),
            Norm::LInf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Norm::L1 => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, |acc, x| acc + x),
            Norm::L2 => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Norm::LInf => a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs())),
        }
    }

    /// The dual norm, used for Lipschitz constants of affine functions.
    pub fn dual(&self) -> Norm {
        match self {
            Norm::L1 => Norm::LInf,
            Norm::L2 => Norm::L2,
            Norm::LInf => Norm::L1,
        }
    }

    pub fn from_p(p: f64) -> Result<Norm> {
        if p == 1.0 {
            Ok(Norm::L1)
        } else if p == 2.0 {
            Ok(Norm::L2)
        } else if p.is_infinite() && p > 0.0 {
            Ok(Norm::LInf)
        } else {
            Err(Error::InvalidSpace(format!(
                "unsupported norm p = {p}; use 1, 2 or \"inf\""
            )))
        }
    }
}

impl Serialize for Norm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Norm::L1 => s.serialize_u8(1),
            Norm::L2 => s.serialize_u8(2),
            Norm::LInf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Norm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct NormVisitor;
        impl Visitor<'_> for NormVisitor {
            type Value = Norm;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("1, 2 or \"inf\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Norm, E> {
                Norm::from_p(v as f64).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Norm, E> {
                Norm::from_p(v as f64).map_err(E::custom)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Norm, E> {
                Norm::from_p(v).map_err(E::custom)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Norm, E> {
                match v {
                    "inf" | "infinity" | "Inf" | "max" => Ok(Norm::LInf),
                    "1" => Ok(Norm::L1),
                    "2" => Ok(Norm::L2),
                    _ => Err(E::custom(format!("unsupported norm {v:?}"))),
                }
            }
        }
        d.deserialize_any(NormVisitor)
    }
}

/// Points with coordinates in R^n under an ℓp norm.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedSpace {
    dim: usize,
    norm: Norm,
    points: Vec<Vec<f64>>,
}

/// Normalizes `-0.0` so bitwise keys agree with numeric equality.
pub(crate) fn coord_key(p: &[f64]) -> Vec<u64> {
    p.iter().map(|x| (x + 0.0).to_bits()).collect()
}

impl EmbeddedSpace {
    pub fn new(dim: usize, norm: Norm, points: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpace("dimension must be positive".into()));
        }
        let mut seen = HashSet::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidSpace(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("coordinates of point {i}")));
            }
            if !seen.insert(coord_key(p)) {
                return Err(Error::InvalidSpace(format!(
                    "point {i} duplicates the coordinates of an earlier point"
                )));
            }
        }
        Ok(Self { dim, norm, points })
    }

    /// Infers the dimension from the first point; an empty cloud defaults to the plane.
    pub fn from_points(norm: Norm, points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(2, Vec::len);
        Self::new(dim, norm, points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn find(&self, coords: &[f64]) -> Option<usize> {
        let key = coord_key(coords);
        self.points.iter().position(|p| coord_key(p) == key)
    }

    /// Index of a point with exactly these coordinates, appending it if absent.
    pub fn insert(&mut self, coords: Vec<f64>) -> Result<usize> {
        if coords.len() != self.dim {
            return Err(Error::InvalidSpace(format!(
                "point has {} coordinates, expected {}",
                coords.len(),
                self.dim
            )));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("inserted coordinates".into()));
        }
        if let Some(i) = self.find(&coords) {
            return Ok(i);
        }
        self.points.push(coords);
        Ok(self.points.len() - 1)
    }

    /// Straight chord from point `i` to point `j` split into `k` equal pieces.
    ///
    /// Interior points are appended to the space (or reused when a point with the
    /// same coordinates already exists).
    pub fn geodesic_chord(&mut self, i: usize, j: usize, k: usize) -> Result<Path> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(Error::Degenerate(
                "zero-length chord between a point and itself".into(),
            ));
        }
        if k == 0 {
            return Err(Error::Degenerate(
                "chord needs at least one subdivision".into(),
            ));
        }
        let (a, b) = (self.points[i].clone(), self.points[j].clone());
        let mut vertices = Vec::with_capacity(k + 1);
        vertices.push(i);
        for s in 1..k {
            let t = s as f64 / k as f64;
            let p: Vec<f64> = a
                .iter()
                .zip(&b)
                .map(|(x, y)| (1.0 - t) * x + t * y)
                .collect();
            vertices.push(self.insert(p)?);
        }
        vertices.push(j);
        Path::new(vertices)
    }

    fn check(&self, i: usize) -> Result<()> {
        if i < self.points.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.points.len(),
            })
        }
    }
}

/// Builder for an embedded space that deduplicates points by exact coordinates in
/// constant time per insertion.
#[derive(Debug, Clone)]
pub struct PointCloud {
    dim: usize,
    norm: Norm,
    points: Vec<Vec<f64>>,
    index: HashMap<Vec<u64>, usize>,
}

impl PointCloud {
    pub fn new(dim: usize, norm: Norm) -> Self {
        Self {
            dim,
            norm,
            points: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Starts from the points of `space`, keeping their indices.
    pub fn from_space(space: &EmbeddedSpace) -> Self {
        let mut cloud = Self::new(space.dim, space.norm);
        for p in &space.points {
            cloud.index.insert(coord_key(p), cloud.points.len());
            cloud.points.push(p.clone());
        }
        cloud
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    /// Index of a point with exactly these coordinates, appending it if absent.
    pub fn insert(&mut self, coords: &[f64]) -> Result<usize> {
        if coords.len() != self.dim {
            return Err(Error::InvalidSpace(format!(
                "point has {} coordinates, expected {}",
                coords.len(),
                self.dim
            )));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("inserted coordinates".into()));
        }
        let next = self.points.len();
        let i = *self.index.entry(coord_key(coords)).or_insert(next);
        if i == next {
            self.points.push(coords.to_vec());
        }
        Ok(i)
    }

    pub fn finish(self) -> EmbeddedSpace {
        EmbeddedSpace {
            dim: self.dim,
            norm: self.norm,
            points: self.points,
        }
    }
}

/// An explicit symmetric distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    n: usize,
    d: Vec<f64>,
}

impl FiniteMetricSpace {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let report = validate_metric(&matrix)?;
        if let Some(issue) = report.issues.first() {
            return Err(Error::InvalidSpace(format!(
                "{} metric violation(s), first: {issue}",
                report.issues.len()
            )));
        }
        let n = matrix.len();
        Ok(Self {
            n,
            d: matrix.into_iter().flatten().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.d
            .chunks(self.n.max(1))
            .take(self.n)
            .map(<[f64]>::to_vec)
            .collect()
    }
}

/// Either kind of ambient space. Points are indexed `0..len()`.
#[derive(Debug, Clone, PartialEq)]
pub enum Space {
    Embedded(EmbeddedSpace),
    Metric(FiniteMetricSpace),
}

impl From<EmbeddedSpace> for Space {
    fn from(s: EmbeddedSpace) -> Self {
        Space::Embedded(s)
    }
}

impl From<FiniteMetricSpace> for Space {
    fn from(s: FiniteMetricSpace) -> Self {
        Space::Metric(s)
    }
}

impl Space {
    pub fn len(&self) -> usize {
        match self {
            Space::Embedded(s) => s.len(),
            Space::Metric(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len()
    }

    pub fn check(&self, i: usize) -> Result<()> {
        if self.contains(i) {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            })
        }
    }

    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        self.check(i)?;
        self.check(j)?;
        Ok(self.d(i, j))
    }

    /// Unchecked distance; panics on out-of-range indices.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        match self {
            Space::Embedded(s) => s.norm.distance(&s.points[i], &s.points[j]),
            Space::Metric(s) => s.d[i * s.n + j],
        }
    }

    pub fn as_embedded(&self) -> Result<&EmbeddedSpace> {
        match self {
            Space::Embedded(s) => Ok(s),
            Space::Metric(_) => Err(Error::NotEmbedded),
        }
    }

    pub fn coords(&self, i: usize) -> Option<&[f64]> {
        match self {
            Space::Embedded(s) => s.points.get(i).map(Vec::as_slice),
            Space::Metric(_) => None,
        }
    }

    /// Chord between two points; bare metric spaces have no geodesics to offer.
    pub fn geodesic_chord(&mut self, i: usize, j: usize, k: usize) -> Result<Path> {
        match self {
            Space::Embedded(s) => s.geodesic_chord(i, j, k),
            Space::Metric(_) => Err(Error::UnsupportedGeodesic),
        }
    }

    /// Largest pairwise distance, 0 for fewer than two points.
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                m = m.max(self.d(i, j));
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricIssue {
    NonFinite {
        i: usize,
        j: usize,
    },
    NonZeroDiagonal {
        i: usize,
        value: f64,
    },
    NonPositive {
        i: usize,
        j: usize,
        value: f64,
    },
    Asymmetric {
        i: usize,
        j: usize,
    },
    /// `d(a, c) > d(a, b) + d(b, c)`.
    Triangle {
        a: usize,
        b: usize,
        c: usize,
        excess: f64,
    },
}

impl fmt::Display for MetricIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricIssue::NonFinite { i, j } => write!(f, "d({i},{j}) is not finite"),
            MetricIssue::NonZeroDiagonal { i, value } => write!(f, "d({i},{i}) = {value}"),
            MetricIssue::NonPositive { i, j, value } => write!(f, "d({i},{j}) = {value} <= 0"),
            MetricIssue::Asymmetric { i, j } => write!(f, "d({i},{j}) != d({j},{i})"),
            MetricIssue::Triangle { a, b, c, excess } => {
                write!(
                    f,
                    "d({a},{c}) exceeds d({a},{b}) + d({b},{c}) by {excess:e}"
                )
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricReport {
    pub issues: Vec<MetricIssue>,
}

impl MetricReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn triangle_violations(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.issues.iter().filter_map(|i| match i {
            MetricIssue::Triangle { a, b, c, .. } => Some((*a, *b, *c)),
            _ => None,
        })
    }
}

/// Lists every violated metric axiom. Triangle triples are reported once, with `a < c`.
pub fn validate_metric(matrix: &[Vec<f64>]) -> Result<MetricReport> {
    let n = matrix.len();
    if let Some((r, row)) = matrix.iter().enumerate().find(|(_, row)| row.len() != n) {
        return Err(Error::InvalidSpace(format!(
            "distance matrix is not square: row {r} has {} entries, expected {n}",
            row.len()
        )));
    }
    let tol = Tolerance::default();
    let mut issues = Vec::new();
    for (i, row) in matrix.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                issues.push(MetricIssue::NonFinite { i, j });
            } else if i == j && v != 0.0 {
                issues.push(MetricIssue::NonZeroDiagonal { i, value: v });
            } else if i != j && v <= 0.0 {
                issues.push(MetricIssue::NonPositive { i, j, value: v });
            }
            if i < j && matrix[i][j] != matrix[j][i] {
                issues.push(MetricIssue::Asymmetric { i, j });
            }
        }
    }
    if issues.is_empty() {
        for a in 0..n {
            for c in a + 1..n {
                for b in 0..n {
                    if b == a || b == c {
                        continue;
                    }
                    let excess = matrix[a][c] - (matrix[a][b] + matrix[b][c]);
                    if excess > tol.abs {
                        issues.push(MetricIssue::Triangle { a, b, c, excess });
                    }
                }
            }
        }
    }
    Ok(MetricReport { issues })
}
