//! Flat norm of 0-dimensional currents (atomic measures):
//! `F(μ) = min { c·M(A) + M(B) : A + ∂B = μ }`, with creation cost `c = 1` by default.
//!
//! Solved exactly as a min-cost flow on the support of `μ`: negative atoms ship mass to
//! positive atoms along edges of cost `d`, and an apex node absorbs or emits whatever is
//! left at cost `c` per unit (that residue is `A`).

use std::sync::Arc;

use crate::current::PolyhedralCurrent;
use crate::error::{Error, Result};
use crate::flow::MinCostFlow;
use crate::measure::AtomicMeasure;
use crate::space::Space;

#[derive(Debug, Clone)]
pub struct FlatNorm {
    pub value: f64,
    /// The unfilled part `A = μ − ∂B`.
    pub residue: AtomicMeasure,
    /// The filling `B`.
    pub filling: PolyhedralCurrent,
}

pub fn flat_norm_0(mu: &AtomicMeasure, space: &Arc<Space>) -> Result<FlatNorm> {
    flat_norm_0_with_cost(mu, space, 1.0)
}

pub fn flat_norm_0_with_cost(
    mu: &AtomicMeasure,
    space: &Arc<Space>,
    creation_cost: f64,
) -> Result<FlatNorm> {
    if !(creation_cost > 0.0) || !creation_cost.is_finite() {
        return Err(Error::Degenerate(format!(
            "creation cost must be finite and positive, got {creation_cost}"
        )));
    }
    mu.check_in(space)?;
    if mu.is_zero() {
        return Ok(FlatNorm {
            value: 0.0,
            residue: AtomicMeasure::zero(),
            filling: PolyhedralCurrent::empty(space.clone()),
        });
    }
    let (plus, minus) = mu.jordan();
    let sources: Vec<(usize, f64)> = minus.iter().collect();
    let sinks: Vec<(usize, f64)> = plus.iter().collect();
    let (ns, nt) = (sources.len(), sinks.len());
    let apex = ns + nt;
    let mut g = MinCostFlow::new(ns + nt + 1);
    let mut routes = Vec::with_capacity(ns * nt);
    for (a, &(x, _)) in sources.iter().enumerate() {
        for (b, &(y, _)) in sinks.iter().enumerate() {
            let id = g.add_edge(a, ns + b, f64::INFINITY, space.d(x, y))?;
            routes.push((id, x, y));
        }
        g.add_edge(a, apex, f64::INFINITY, creation_cost)?;
    }
    for b in 0..nt {
        g.add_edge(apex, ns + b, f64::INFINITY, creation_cost)?;
    }
    let mut supply: Vec<f64> = sources
        .iter()
        .map(|(_, w)| *w)
        .chain(sinks.iter().map(|(_, w)| -*w))
        .collect();
    supply.push(plus.total() - minus.total());
    let sol = g.solve(&supply)?;

    let filling = PolyhedralCurrent::new(
        space.clone(),
        routes
            .iter()
            .filter(|(id, ..)| sol.flows[*id] > 0.0)
            .map(|&(id, x, y)| (x, y, sol.flows[id])),
    )?;
    let residue = mu - &filling.boundary();
    Ok(FlatNorm {
        value: creation_cost * residue.total_variation() + filling.mass(),
        residue,
        filling,
    })
}

/// Flat distance between two atomic measures on the same space.
pub fn narrow_gap(mu: &AtomicMeasure, nu: &AtomicMeasure, space: &Arc<Space>) -> Result<f64> {
    Ok(flat_norm_0(&(mu - nu), space)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{EmbeddedSpace, Norm};

    fn pair(d: f64) -> Arc<Space> {
        Arc::new(
            EmbeddedSpace::from_points(Norm::L2, vec![vec![0.0, 0.0], vec![d, 0.0]])
                .unwrap()
                .into(),
        )
    }

    #[test]
    fn zero_measure() {
        let f = flat_norm_0(&AtomicMeasure::zero(), &pair(1.0)).unwrap();
        assert_eq!(f.value, 0.0);
        assert!(f.residue.is_zero() && f.filling.is_empty());
    }

    #[test]
    fn short_dipole_is_filled() {
        let s = pair(0.5);
        let mu = AtomicMeasure::from_pairs([(1, 1.0), (0, -1.0)]);
        let f = flat_norm_0(&mu, &s).unwrap();
        assert!((f.value - 0.5).abs() < 1e-15);
        assert!(f.residue.is_zero());
        assert_eq!(f.filling, PolyhedralCurrent::new(s, [(0, 1, 1.0)]).unwrap());
    }

    #[test]
    fn long_dipole_is_left_alone() {
        let s = pair(10.0);
        let mu = AtomicMeasure::from_pairs([(1, 1.0), (0, -1.0)]);
        let f = flat_norm_0(&mu, &s).unwrap();
        assert!((f.value - 2.0).abs() < 1e-15);
        assert!(f.filling.is_empty());
        assert_eq!(f.residue, mu);
    }

    #[test]
    fn narrow_gap_cases() {
        let s = pair(0.3);
        let a = AtomicMeasure::dirac(0, 1.0);
        assert_eq!(narrow_gap(&a, &a, &s).unwrap(), 0.0);
        assert!((narrow_gap(&a, &AtomicMeasure::dirac(1, 1.0), &s).unwrap() - 0.3).abs() < 1e-15);
        assert!((narrow_gap(&a, &AtomicMeasure::dirac(0, 2.0), &s).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn creation_cost_is_configurable() {
        let s = pair(3.0);
        let mu = AtomicMeasure::from_pairs([(1, 1.0), (0, -1.0)]);
        let f = flat_norm_0_with_cost(&mu, &s, 2.0).unwrap();
        assert!((f.value - 3.0).abs() < 1e-15);
        assert!(flat_norm_0_with_cost(&mu, &s, 0.0).is_err());
    }
}
