//! Wasserstein-1 transport between atomic measures, its realization as a
//! mass-minimizing current, and Kantorovich potentials certifying optimality.
//!
//! Orientation: plan entries run from an atom of `φ⁺` to an atom of `φ⁻`, paths follow
//! the same direction, so the optimal current has boundary `φ⁻ − φ⁺`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::current::PolyhedralCurrent;
use crate::decomposition::{find_directed_cycle, synthesize};
use crate::error::{Error, Result};
use crate::flow::MinCostFlow;
use crate::measure::AtomicMeasure;
use crate::path::{Path, Transport};
use crate::space::Space;
use crate::tolerance::{Tolerance, ZERO_WEIGHT};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanEntry {
    pub source: usize,
    pub target: usize,
    pub mass: f64,
}

/// A discrete transport plan `γ`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Plan {
    pub entries: Vec<PlanEntry>,
}

impl Plan {
    pub fn source_marginal(&self) -> AtomicMeasure {
        AtomicMeasure::from_pairs(self.entries.iter().map(|e| (e.source, e.mass)))
    }

    pub fn target_marginal(&self) -> AtomicMeasure {
        AtomicMeasure::from_pairs(self.entries.iter().map(|e| (e.target, e.mass)))
    }

    /// `Σ γ(x, y) d(x, y)`.
    pub fn cost(&self, space: &Space) -> f64 {
        self.entries
            .iter()
            .map(|e| e.mass * space.d(e.source, e.target))
            .fold(0.0, |acc, x| acc + x)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct KantorovichSolution {
    pub plan: Plan,
    pub w1: f64,
    /// A 1-Lipschitz function on `supp φ⁺ ∪ supp φ⁻` with `∫ f d(φ⁺ − φ⁻) = W₁`.
    pub potentials: BTreeMap<usize, f64>,
}

fn validate_marginals(plus: &AtomicMeasure, minus: &AtomicMeasure, space: &Space) -> Result<()> {
    for mu in [plus, minus] {
        mu.check_in(space)?;
        if let Some((index, weight)) = mu.iter().find(|(_, w)| *w < 0.0) {
            return Err(Error::NegativeMeasure { index, weight });
        }
        if mu.is_zero() {
            return Err(Error::EmptySupport);
        }
    }
    let (p, m) = (plus.total(), minus.total());
    if (p - m).abs() > 1e-12 * p.max(m).max(1.0) {
        return Err(Error::Unbalanced { plus: p, minus: m });
    }
    Ok(())
}

/// Rescales `minus` so its total matches `plus`.
pub fn normalize_masses(plus: &AtomicMeasure, minus: &AtomicMeasure) -> Result<AtomicMeasure> {
    let m = minus.total();
    if !(m > 0.0) {
        return Err(Error::EmptySupport);
    }
    Ok(minus.scale(plus.total() / m))
}

/// Optimal plan between `φ⁺` and `φ⁻` by min-cost flow on the complete bipartite graph.
pub fn kantorovich(
    plus: &AtomicMeasure,
    minus: &AtomicMeasure,
    space: &Space,
) -> Result<KantorovichSolution> {
    validate_marginals(plus, minus, space)?;
    let sources: Vec<(usize, f64)> = plus.iter().collect();
    let sinks: Vec<(usize, f64)> = minus.iter().collect();
    let (m, n) = (sources.len(), sinks.len());
    let mut g = MinCostFlow::new(m + n);
    let mut pairs = Vec::with_capacity(m * n);
    for (a, &(x, _)) in sources.iter().enumerate() {
        for (b, &(y, _)) in sinks.iter().enumerate() {
            let id = g.add_edge(a, m + b, f64::INFINITY, space.d(x, y))?;
            pairs.push((id, x, y));
        }
    }
    let supply: Vec<f64> = sources
        .iter()
        .map(|(_, w)| *w)
        .chain(sinks.iter().map(|(_, w)| -*w))
        .collect();
    let sol = g.solve_with_potentials(&supply)?;
    let p = sol.potentials.expect("requested");

    let floor = ZERO_WEIGHT * plus.total().max(1.0);
    let entries: Vec<PlanEntry> = pairs
        .iter()
        .filter(|(id, ..)| sol.flows[*id] > floor)
        .map(|&(id, source, target)| PlanEntry {
            source,
            target,
            mass: sol.flows[id],
        })
        .collect();
    let plan = Plan { entries };
    let w1 = plan.cost(space);

    // Sink values v_j = -p(sink) satisfy u_i - v_j <= d(i, j) with equality on the plan.
    // The inf-convolution F(x) = min_j v_j + d(x, j) is 1-Lipschitz everywhere, lies
    // above u on sources and below v on sinks, hence attains the dual optimum.
    let sink_values: Vec<(usize, f64)> = sinks
        .iter()
        .enumerate()
        .map(|(b, &(y, _))| (y, -p[m + b]))
        .collect();
    let potentials = plus
        .support()
        .chain(minus.support())
        .map(|x| {
            let f = sink_values
                .iter()
                .map(|&(y, v)| v + space.d(x, y))
                .fold(f64::INFINITY, f64::min);
            (x, f)
        })
        .collect();
    Ok(KantorovichSolution {
        plan,
        w1,
        potentials,
    })
}

/// One atom per plan entry, following the straight chord split into `k` pieces.
/// Entries with coinciding endpoints become constant curves.
pub fn plan_to_transport(plan: &Plan, space: &mut Space, k: usize) -> Result<Transport> {
    if matches!(space, Space::Metric(_)) {
        return Err(Error::UnsupportedGeodesic);
    }
    let mut eta = Transport::new();
    for e in &plan.entries {
        let path = if e.source == e.target {
            space.check(e.source)?;
            Path::constant(e.source)
        } else {
            space.geodesic_chord(e.source, e.target, k)?
        };
        eta.push(e.mass, path)?;
    }
    Ok(eta)
}

/// Direct two-point paths; the only curves available in a bare metric space.
fn plan_to_direct_transport(plan: &Plan) -> Result<Transport> {
    let mut eta = Transport::new();
    for e in &plan.entries {
        let path = if e.source == e.target {
            Path::constant(e.source)
        } else {
            Path::new(vec![e.source, e.target])?
        };
        eta.push(e.mass, path)?;
    }
    Ok(eta)
}

/// `W₁ − ∫ f d(φ⁺ − φ⁻)` for a 1-Lipschitz `f` given on the union of the supports.
pub fn duality_gap(
    plus: &AtomicMeasure,
    minus: &AtomicMeasure,
    f: &BTreeMap<usize, f64>,
    w1: f64,
    space: &Space,
) -> Result<f64> {
    let support: Vec<usize> = {
        let mut s: Vec<usize> = plus.support().chain(minus.support()).collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    let value = |x: usize| -> Result<f64> {
        f.get(&x)
            .copied()
            .ok_or_else(|| Error::Degenerate(format!("potential undefined at support point {x}")))
    };
    for (i, &a) in support.iter().enumerate() {
        for &b in &support[i + 1..] {
            let diff = (value(a)? - value(b)?).abs();
            let dist = space.distance(a, b)?;
            if diff > dist + 1e-12 * dist.max(1.0) {
                return Err(Error::NotLipschitz { a, b, diff, dist });
            }
        }
    }
    let mut pairing = 0.0;
    for (x, w) in plus.iter() {
        pairing += w * value(x)?;
    }
    for (x, w) in minus.iter() {
        pairing -= w * value(x)?;
    }
    Ok(w1 - pairing)
}

/// `∫ ℓ(θ) dη`.
pub fn transport_cost(eta: &Transport, space: &Space) -> f64 {
    eta.cost(space)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostCheck {
    pub cost: f64,
    pub w1: f64,
    /// Whether `η` starts on `φ⁺` and ends on `φ⁻`.
    pub admissible: bool,
    /// `cost − W₁`; nonnegative (up to tolerance) for every admissible `η`.
    pub excess: f64,
}

/// Compares the cost of `η` with `W₁(φ⁺, φ⁻)`.
pub fn check_transport_cost(
    eta: &Transport,
    plus: &AtomicMeasure,
    minus: &AtomicMeasure,
    space: &Space,
    tol: Tolerance,
) -> Result<CostCheck> {
    let w1 = kantorovich(plus, minus, space)?.w1;
    let cost = transport_cost(eta, space);
    let scale = plus.total();
    let admissible = eta.start_measure().distance_tv(plus) <= tol.bound(scale)
        && eta.end_measure().distance_tv(minus) <= tol.bound(scale);
    Ok(CostCheck {
        cost,
        w1,
        admissible,
        excess: cost - w1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    /// `|M(T) − W₁|`.
    pub mass_residual: f64,
    /// `|∫ ℓ dη − W₁|`.
    pub cost_residual: f64,
    /// `W₁ − ∫ f d(φ⁺ − φ⁻)` at the returned potentials.
    pub duality_gap: f64,
    /// Total variation of `∂T − (φ⁻ − φ⁺)`.
    pub boundary_residual: f64,
    /// Whether the current has no directed cycle.
    pub acyclic: bool,
    /// Total variation of the plan marginals against `φ⁺` and `φ⁻`.
    pub marginal_residual: f64,
}

impl Certificate {
    /// All residuals within `tol.rel · max(1, W₁)` and the current acyclic.
    pub fn passed(&self, tol: Tolerance, w1: f64) -> bool {
        let bound = tol.rel * w1.max(1.0);
        self.acyclic
            && self.mass_residual <= bound
            && self.cost_residual <= bound
            && self.duality_gap.abs() <= bound
            && self.boundary_residual <= bound
            && self.marginal_residual <= bound
    }
}

#[derive(Debug, Clone)]
pub struct BeckmannSolution {
    pub kantorovich: KantorovichSolution,
    /// The space the current lives on; grows when chords are subdivided.
    pub space: Arc<Space>,
    pub transport: Transport,
    pub current: PolyhedralCurrent,
    pub certificate: Certificate,
}

/// Mass-minimizing current with boundary `φ⁻ − φ⁺`, built by sending the optimal plan
/// along straight chords.
pub fn beckmann(
    plus: &AtomicMeasure,
    minus: &AtomicMeasure,
    space: &Space,
) -> Result<BeckmannSolution> {
    beckmann_with_chords(plus, minus, space, 1)
}

/// As [`beckmann`], with each chord split into `k` pieces. Bare metric spaces use one
/// direct edge per plan entry regardless of `k`.
pub fn beckmann_with_chords(
    plus: &AtomicMeasure,
    minus: &AtomicMeasure,
    space: &Space,
    k: usize,
) -> Result<BeckmannSolution> {
    let kant = kantorovich(plus, minus, space)?;
    let mut owned = space.clone();
    let transport = match owned {
        Space::Embedded(_) => plan_to_transport(&kant.plan, &mut owned, k)?,
        Space::Metric(_) => plan_to_direct_transport(&kant.plan)?,
    };
    let space = Arc::new(owned);
    let current = synthesize(&transport, &space)?;
    let expected_boundary = minus - plus;
    let certificate = Certificate {
        mass_residual: (current.mass() - kant.w1).abs(),
        cost_residual: (transport.cost(&space) - kant.w1).abs(),
        duality_gap: duality_gap(plus, minus, &kant.potentials, kant.w1, &space)?,
        boundary_residual: current.boundary().distance_tv(&expected_boundary),
        acyclic: find_directed_cycle(&current).is_none(),
        marginal_residual: kant.plan.source_marginal().distance_tv(plus)
            + kant.plan.target_marginal().distance_tv(minus),
    };
    Ok(BeckmannSolution {
        kantorovich: kant,
        space,
        transport,
        current,
        certificate,
    })
}
