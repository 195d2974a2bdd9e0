//! Polyhedral one-dimensional currents: weighted oriented edges between points of a space.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::form::Form;
use crate::measure::AtomicMeasure;
use crate::space::Space;
use crate::tolerance::ZERO_WEIGHT;

/// An oriented edge with positive weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub weight: f64,
}

/// `Σ w_e ⟦tail_e, head_e⟧` in canonical form.
///
/// At most one edge is kept per unordered pair of points: parallel edges merge and
/// antiparallel edges cancel, so the stored weight of a pair `(lo, hi)` is signed with
/// positive meaning `lo → hi`. Negative input weights are read as reversed orientation.
#[derive(Debug, Clone)]
pub struct PolyhedralCurrent {
    space: Arc<Space>,
    net: BTreeMap<(usize, usize), f64>,
}

impl PartialEq for PolyhedralCurrent {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.net == other.net
    }
}

pub(crate) fn same_space(a: &Arc<Space>, b: &Arc<Space>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Outcome of a subcurrent test. `fractions` holds `λ_e = w_S(e) / w_T(e)` per edge of
/// `T` when the relation holds.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcurrentCheck {
    pub holds: bool,
    /// `M(T − S) + M(S) − M(T)`, zero exactly when `S ≤ T`.
    pub excess: f64,
    pub fractions: Option<Vec<(Edge, f64)>>,
}

/// Two embedded edges sharing a segment of positive length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    pub first: (usize, usize),
    pub second: (usize, usize),
    pub length: f64,
}

impl PolyhedralCurrent {
    pub fn empty(space: Arc<Space>) -> Self {
        Self {
            space,
            net: BTreeMap::new(),
        }
    }

    /// Builds the canonical form of `Σ w ⟦tail, head⟧`.
    pub fn new(
        space: Arc<Space>,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut net = BTreeMap::new();
        for (tail, head, w) in edges {
            space.check(tail)?;
            space.check(head)?;
            if !w.is_finite() {
                return Err(Error::NonFinite(format!("weight of edge {tail}->{head}")));
            }
            if tail == head {
                return Err(Error::Degenerate(format!(
                    "edge {tail}->{head} has coinciding endpoints"
                )));
            }
            accumulate(&mut net, tail, head, w);
        }
        prune(&mut net);
        Ok(Self { space, net })
    }

    pub(crate) fn from_net(space: Arc<Space>, mut net: BTreeMap<(usize, usize), f64>) -> Self {
        prune(&mut net);
        Self { space, net }
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn is_empty(&self) -> bool {
        self.net.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.net.len()
    }

    /// Edges with positive weights, ordered by `(tail, head)`. This order is the edge
    /// index used for tie-breaking throughout the crate.
    pub fn edges(&self) -> Vec<Edge> {
        let mut v: Vec<Edge> = self
            .net
            .iter()
            .map(|(&(lo, hi), &w)| {
                if w > 0.0 {
                    Edge {
                        tail: lo,
                        head: hi,
                        weight: w,
                    }
                } else {
                    Edge {
                        tail: hi,
                        head: lo,
                        weight: -w,
                    }
                }
            })
            .collect();
        v.sort_by_key(|e| (e.tail, e.head));
        v
    }

    /// Weight carried in direction `tail → head`; negative when the edge runs the other way.
    pub fn weight(&self, tail: usize, head: usize) -> f64 {
        let (key, sign) = orient(tail, head);
        self.net.get(&key).map_or(0.0, |w| sign * w)
    }

    pub fn mass(&self) -> f64 {
        self.net
            .iter()
            .map(|(&(a, b), w)| w.abs() * self.space.d(a, b))
            .fold(0.0, |acc, x| acc + x)
    }

    /// Largest edge weight, 0 for the empty current.
    pub fn max_weight(&self) -> f64 {
        self.net.values().fold(0.0, |m, w| m.max(w.abs()))
    }

    pub fn boundary(&self) -> AtomicMeasure {
        AtomicMeasure::from_pairs(
            self.edges()
                .into_iter()
                .flat_map(|e| [(e.head, e.weight), (e.tail, -e.weight)]),
        )
    }

    /// Keeps the edges accepted by `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&Edge) -> bool) -> Self {
        let net = self
            .edges()
            .into_iter()
            .filter(|e| keep(e))
            .map(|e| {
                let (key, sign) = orient(e.tail, e.head);
                (key, sign * e.weight)
            })
            .collect();
        Self {
            space: self.space.clone(),
            net,
        }
    }

    /// Keeps the edges whose endpoints both lie in `vertices`.
    pub fn restrict_to_vertices(&self, vertices: &HashSet<usize>) -> Self {
        self.restrict(|e| vertices.contains(&e.tail) && vertices.contains(&e.head))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        let mut net = self.net.clone();
        for (&k, &w) in &other.net {
            *net.entry(k).or_insert(0.0) += w;
        }
        Ok(Self::from_net(self.space.clone(), net))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale_signed(-1.0))
    }

    /// Multiplies all weights by `c ≥ 0`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::Degenerate(format!(
                "scale factor must be finite and nonnegative, got {c}"
            )));
        }
        Ok(self.scale_signed(c))
    }

    fn scale_signed(&self, c: f64) -> Self {
        let net = self.net.iter().map(|(&k, &w)| (k, c * w)).collect();
        Self::from_net(self.space.clone(), net)
    }

    pub fn reversed(&self) -> Self {
        self.scale_signed(-1.0)
    }

    pub fn check_same_space(&self, other: &Self) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::MismatchedSpaces)
        }
    }

    /// Tests `self ≤ other`: every edge of `self` is an edge of `other` with the same
    /// orientation and no more weight (up to `tol`).
    pub fn is_subcurrent_of(&self, other: &Self, tol: f64) -> Result<SubcurrentCheck> {
        self.check_same_space(other)?;
        let remainder = other.sub(self)?;
        let excess = remainder.mass() + self.mass() - other.mass();
        let mut holds = true;
        for (&key, &ws) in &self.net {
            let wt = other.net.get(&key).copied().unwrap_or(0.0);
            if ws * wt <= 0.0 || ws.abs() > wt.abs() + tol {
                holds = false;
                break;
            }
        }
        let fractions = holds.then(|| {
            other
                .edges()
                .into_iter()
                .map(|e| {
                    let ws = self.weight(e.tail, e.head);
                    (e, (ws / e.weight).clamp(0.0, 1.0))
                })
                .collect()
        });
        Ok(SubcurrentCheck {
            holds,
            excess,
            fractions,
        })
    }

    /// Midpoint Riemann-Stieltjes sum of `∫ f dπ` over each edge, split into
    /// `refinement` equal pieces. Exact for affine `f` and affine `π`.
    pub fn evaluate(&self, form: &Form, refinement: usize) -> Result<f64> {
        let space = self.space.as_embedded()?;
        if refinement == 0 {
            return Err(Error::Degenerate("refinement must be at least 1".into()));
        }
        form.validate(space.norm(), space.dim())?;
        let dim = space.dim();
        let mut mid = vec![0.0; dim];
        let mut x0 = vec![0.0; dim];
        let mut x1 = vec![0.0; dim];
        let mut total = 0.0;
        for e in self.edges() {
            let (a, b) = (space.point(e.tail), space.point(e.head));
            let mut along = 0.0;
            for s in 0..refinement {
                let t0 = s as f64 / refinement as f64;
                let t1 = (s + 1) as f64 / refinement as f64;
                let tm = 0.5 * (t0 + t1);
                for k in 0..dim {
                    x0[k] = a[k] + t0 * (b[k] - a[k]);
                    x1[k] = a[k] + t1 * (b[k] - a[k]);
                    mid[k] = a[k] + tm * (b[k] - a[k]);
                }
                along += form.f.eval(&mid) * (form.pi.eval(&x1) - form.pi.eval(&x0));
            }
            total += e.weight * along;
        }
        Ok(total)
    }

    /// Re-indexes vertices through `map` into `target`; edges collapsing to a point vanish.
    pub fn push_forward(&self, target: Arc<Space>, map: impl Fn(usize) -> usize) -> Result<Self> {
        let mut net = BTreeMap::new();
        for e in self.edges() {
            let (t, h) = (map(e.tail), map(e.head));
            target.check(t)?;
            target.check(h)?;
            if t != h {
                accumulate(&mut net, t, h, e.weight);
            }
        }
        Ok(Self::from_net(target, net))
    }

    /// Pairs of embedded edges that overlap along a segment of positive length.
    pub fn interior_overlaps(&self) -> Result<Vec<Overlap>> {
        let space = self.space.as_embedded()?;
        let edges = self.edges();
        let mut out = Vec::new();
        for (i, e) in edges.iter().enumerate() {
            for f in &edges[i + 1..] {
                let (a, b) = (space.point(e.tail), space.point(e.head));
                let (c, d) = (space.point(f.tail), space.point(f.head));
                if let Some(length) = collinear_overlap(a, b, c, d, space.norm()) {
                    out.push(Overlap {
                        first: (e.tail, e.head),
                        second: (f.tail, f.head),
                        length,
                    });
                }
            }
        }
        Ok(out)
    }
}

fn orient(tail: usize, head: usize) -> ((usize, usize), f64) {
    if tail < head {
        ((tail, head), 1.0)
    } else {
        ((head, tail), -1.0)
    }
}

fn accumulate(net: &mut BTreeMap<(usize, usize), f64>, tail: usize, head: usize, w: f64) {
    let (key, sign) = orient(tail, head);
    *net.entry(key).or_insert(0.0) += sign * w;
}

fn prune(net: &mut BTreeMap<(usize, usize), f64>) {
    net.retain(|_, w| w.abs() > ZERO_WEIGHT);
}

/// Length of the common part of segments `[a,b]` and `[c,d]` when they are collinear.
fn collinear_overlap(
    a: &[f64],
    b: &[f64],
    c: &[f64],
    d: &[f64],
    norm: crate::space::Norm,
) -> Option<f64> {
    let dir: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let len2: f64 = dir.iter().map(|x| x * x).sum();
    if len2 == 0.0 {
        return None;
    }
    let scale = len2.sqrt();
    let param = |p: &[f64]| -> Option<f64> {
        let rel: Vec<f64> = p.iter().zip(a).map(|(x, y)| x - y).collect();
        let t = rel.iter().zip(&dir).map(|(r, g)| r * g).sum::<f64>() / len2;
        let off: f64 = rel
            .iter()
            .zip(&dir)
            .map(|(r, g)| (r - t * g).powi(2))
            .sum::<f64>()
            .sqrt();
        (off <= 1e-12 * scale.max(1.0)).then_some(t)
    };
    let (tc, td) = (param(c)?, param(d)?);
    let (lo, hi) = (tc.min(td).max(0.0), tc.max(td).min(1.0));
    let overlap = hi - lo;
    (overlap > 1e-12).then(|| overlap * norm.of(&dir))
}
