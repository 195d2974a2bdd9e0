//! Decomposition of polyhedral currents into a cycle part and a transport of arcs.
//!
//! Every choice point breaks ties by the lowest vertex or edge index (edges are indexed
//! in `(tail, head)` order, see [`PolyhedralCurrent::edges`]), so all results are
//! reproducible. The cycle/acyclic split itself is not unique in general; this module
//! returns the one produced by that ordering.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::current::{Edge, PolyhedralCurrent};
use crate::error::{Error, Result};
use crate::path::{Path, Transport};
use crate::space::Space;
use crate::tolerance::{Tolerance, ZERO_WEIGHT};

/// `T = cycles + acyclic`, both subcurrents of `T`.
#[derive(Debug, Clone)]
pub struct CycleSplit {
    pub cycles: PolyhedralCurrent,
    pub acyclic: PolyhedralCurrent,
    /// The removed simple cycles as closed vertex paths with their weights, in removal order.
    pub removed: Vec<(f64, Path)>,
}

/// First directed cycle found by depth-first search over the positive-weight support,
/// started from the lowest vertex and following the lowest-index edge first. The cycle
/// is returned as a closed vertex sequence (first vertex repeated at the end).
pub fn find_directed_cycle(t: &PolyhedralCurrent) -> Option<Vec<usize>> {
    find_cycle_in(&adjacency(&t.edges()))
}

pub fn is_acyclic(t: &PolyhedralCurrent) -> bool {
    find_directed_cycle(t).is_none()
}

fn adjacency(edges: &[Edge]) -> BTreeMap<usize, Vec<usize>> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in edges {
        adj.entry(e.tail).or_default().push(e.head);
        adj.entry(e.head).or_default();
    }
    adj
}

fn find_cycle_in(adj: &BTreeMap<usize, Vec<usize>>) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut mark: BTreeMap<usize, Mark> = adj.keys().map(|&v| (v, Mark::New)).collect();
    for &root in adj.keys() {
        if mark[&root] != Mark::New {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        mark.insert(root, Mark::Active);
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            let out = &adj[&v];
            if *next < out.len() {
                let w = out[*next];
                *next += 1;
                match mark[&w] {
                    Mark::New => {
                        mark.insert(w, Mark::Active);
                        stack.push((w, 0));
                    }
                    Mark::Active => {
                        let start = stack
                            .iter()
                            .position(|(u, _)| *u == w)
                            .expect("active vertex is on the stack");
                        let mut cycle: Vec<usize> =
                            stack[start..].iter().map(|(u, _)| *u).collect();
                        cycle.push(w);
                        return Some(cycle);
                    }
                    Mark::Done => {}
                }
            } else {
                mark.insert(v, Mark::Done);
                stack.pop();
            }
        }
    }
    None
}

/// Splits `T` into a cycle `C` (`∂C = 0`) and an acyclic remainder `T − C`.
///
/// Repeatedly finds a directed cycle, subtracts its minimum weight along it (zeroing at
/// least one edge), and stops when the support has no directed cycle.
pub fn extract_cycles(t: &PolyhedralCurrent) -> CycleSplit {
    let edges = t.edges();
    let mut weight: BTreeMap<(usize, usize), f64> =
        edges.iter().map(|e| ((e.tail, e.head), e.weight)).collect();
    let mut removed = Vec::new();
    let mut cycle_weight: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    loop {
        let live: Vec<Edge> = weight
            .iter()
            .map(|(&(tail, head), &w)| Edge {
                tail,
                head,
                weight: w,
            })
            .collect();
        let Some(cycle) = find_cycle_in(&adjacency(&live)) else {
            break;
        };
        let arcs: Vec<(usize, usize)> = cycle.windows(2).map(|w| (w[0], w[1])).collect();
        let (min_pos, m) = arcs.iter().enumerate().map(|(i, k)| (i, weight[k])).fold(
            (0, f64::INFINITY),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        );
        for (i, k) in arcs.iter().enumerate() {
            *cycle_weight.entry(*k).or_insert(0.0) += m;
            let w = weight.get_mut(k).expect("cycle edges are live");
            *w = if i == min_pos { 0.0 } else { *w - m };
            if *w <= ZERO_WEIGHT {
                weight.remove(k);
            }
        }
        removed.push((
            m,
            Path::new(cycle).expect("cycles have distinct consecutive vertices"),
        ));
    }
    // `C` and `T′` are recomputed so that `C + T′` reproduces `T` edge by edge
    for k in cycle_weight.keys().copied().collect::<Vec<_>>() {
        let (c, r) = exact_split(t.weight(k.0, k.1), weight.get(&k).copied().unwrap_or(0.0));
        cycle_weight.insert(k, c);
        if r > 0.0 {
            weight.insert(k, r);
        }
    }
    let space = t.space().clone();
    CycleSplit {
        cycles: PolyhedralCurrent::new(
            space.clone(),
            cycle_weight.into_iter().map(|((a, b), w)| (a, b, w)),
        )
        .expect("edges come from a valid current"),
        acyclic: PolyhedralCurrent::new(space, weight.into_iter().map(|((a, b), w)| (a, b, w)))
            .expect("edges come from a valid current"),
        removed,
    }
}

/// Splits `total` into `(c, r)` with `c + r == total` in floating point and `r` within
/// one ulp of `rest`, for `0 ≤ rest ≤ total`. The rounded difference is off by at most
/// one ulp, so a neighbour works unless the sum lands on a tie that rounds away from
/// `total`; moving `r` by one ulp breaks the tie.
fn exact_split(total: f64, rest: f64) -> (f64, f64) {
    if rest == 0.0 {
        return (total, 0.0);
    }
    for r in [rest, rest.next_down(), rest.next_up()] {
        let c = total - r;
        if let Some(c) = [c, c.next_up(), c.next_down()]
            .into_iter()
            .find(|&x| x + r == total)
        {
            return (c, r);
        }
    }
    (total - rest, rest)
}

/// Decomposes an acyclic current into weighted arcs: pick the lightest edge, extend it
/// forward and backward as far as possible, subtract that path at the edge's weight,
/// and repeat until nothing is left.
pub fn decompose(t: &PolyhedralCurrent) -> Result<Transport> {
    if let Some(cycle) = find_directed_cycle(t) {
        return Err(Error::NotAcyclic { cycle });
    }
    let edges = t.edges();
    let mut weight: Vec<f64> = edges.iter().map(|e| e.weight).collect();
    let mut alive: Vec<bool> = vec![true; edges.len()];
    let mut out_of: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut into: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        out_of.entry(e.tail).or_default().push(i);
        into.entry(e.head).or_default().push(i);
    }
    let first_alive = |list: Option<&Vec<usize>>, alive: &[bool]| -> Option<usize> {
        list.and_then(|l| l.iter().copied().find(|&i| alive[i]))
    };

    let mut transport = Transport::new();
    while let Some(seed) =
        (0..edges.len())
            .filter(|&i| alive[i])
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if weight[b] <= weight[i] => Some(b),
                _ => Some(i),
            })
    {
        let w = weight[seed];
        let mut chain = std::collections::VecDeque::from([seed]);
        let mut end = edges[seed].head;
        while let Some(i) = first_alive(out_of.get(&end), &alive) {
            chain.push_back(i);
            end = edges[i].head;
        }
        let mut start = edges[seed].tail;
        while let Some(i) = first_alive(into.get(&start), &alive) {
            chain.push_front(i);
            start = edges[i].tail;
        }
        let mut vertices = Vec::with_capacity(chain.len() + 1);
        vertices.push(start);
        for &i in &chain {
            vertices.push(edges[i].head);
            weight[i] = if i == seed { 0.0 } else { weight[i] - w };
            if weight[i] <= ZERO_WEIGHT {
                alive[i] = false;
            }
        }
        transport.push(w, Path::new(vertices)?)?;
    }
    Ok(transport)
}

/// `T_η = Σ w · ⟦path⟧`, in canonical form.
pub fn synthesize(eta: &Transport, space: &Arc<Space>) -> Result<PolyhedralCurrent> {
    let mut edges = Vec::new();
    for (w, p) in eta.atoms() {
        p.check_in(space)?;
        edges.extend(p.segments().map(|(a, b)| (a, b, *w)));
    }
    PolyhedralCurrent::new(space.clone(), edges)
}

/// Cuts the longest closed sub-path out of a path.
///
/// Returns `(g, f)`: `f` runs between two visits of the same vertex and has maximal
/// length among such sub-paths; `g` is the path with `f` excised (a constant path when
/// nothing else remains). For an arc, `g` is the path itself and `f` is `None`.
pub fn remove_loop(path: &Path, space: &Space) -> (Path, Option<Path>) {
    let v = path.vertices();
    let mut prefix = Vec::with_capacity(v.len());
    let mut acc = 0.0;
    prefix.push(0.0);
    for w in v.windows(2) {
        acc += space.d(w[0], w[1]);
        prefix.push(acc);
    }
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] == v[j] {
                let len = prefix[j] - prefix[i];
                if best.is_none_or(|(_, _, b)| len > b) {
                    best = Some((i, j, len));
                }
            }
        }
    }
    match best {
        None => (path.clone(), None),
        Some((i, j, _)) => {
            let f = Path::new(v[i..=j].to_vec()).expect("sub-path of a valid path");
            let mut g = v[..=i].to_vec();
            g.extend_from_slice(&v[j + 1..]);
            (
                Path::new(g).expect("excision keeps consecutive vertices distinct"),
                Some(f),
            )
        }
    }
}

#[derive(Debug, Clone)]
pub struct ArcSplit {
    /// Arc atoms; constant curves left behind by excision are dropped.
    pub arcs: Transport,
    /// Every excised closed sub-path, carrying the weight of its atom.
    pub loops: Transport,
}

/// Applies [`remove_loop`] to every atom until only arcs remain.
pub fn to_arcs(eta: &Transport, space: &Space) -> Result<ArcSplit> {
    let mut arcs = Transport::new();
    let mut loops = Transport::new();
    for (w, p) in eta.atoms() {
        let mut current = p.clone();
        loop {
            let (g, f) = remove_loop(&current, space);
            match f {
                Some(f) => {
                    loops.push(*w, f)?;
                    current = g;
                }
                None => break,
            }
        }
        if !current.is_constant() {
            arcs.push(*w, current)?;
        }
    }
    Ok(ArcSplit { arcs, loops })
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub tol: Tolerance,
    /// Number of random vertex sets used for the restriction identity.
    pub restriction_trials: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            restriction_trials: 8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub checks: Vec<Check>,
}

impl DecompositionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub const CHECK_SYNTHESIS: &str = "synthesis";
pub const CHECK_MASS: &str = "mass_additivity";
pub const CHECK_ENDPOINTS: &str = "endpoint_measures";
pub const CHECK_ARCS: &str = "arcs";
pub const CHECK_SUBCURRENTS: &str = "atom_subcurrents";
pub const CHECK_RESTRICTION: &str = "restriction_identity";

/// Checks that `η` decomposes `T` in curves:
///
/// 1. `T_η = T` (residual `M(T_η − T)`),
/// 2. `Σ w ℓ = M(T)`,
/// 3. `η(1) = (∂T)⁺` and `η(0) = (∂T)⁻` (residual: total variation of the differences),
/// 4. every path is an arc (residual: number of non-arcs),
/// 5. every single atom gives a subcurrent of `T` (residual: number of failures),
/// 6. `M(T ⌞ e) = Σ w · M(⟦path⟧ ⌞ e)` on random vertex sets `e`.
pub fn verify_decomposition(
    t: &PolyhedralCurrent,
    eta: &Transport,
    opts: &VerifyOptions,
) -> Result<DecompositionReport> {
    let space = t.space();
    let tol = opts.tol;
    let mass = t.mass();
    let mut checks = Vec::with_capacity(6);
    let mut push = |name, residual: f64, bound: f64| {
        checks.push(Check {
            name,
            passed: residual <= bound,
            residual,
            bound,
        })
    };

    let synth = synthesize(eta, space)?;
    push(CHECK_SYNTHESIS, synth.sub(t)?.mass(), tol.bound(mass));
    push(CHECK_MASS, (eta.cost(space) - mass).abs(), tol.bound(mass));

    let (bplus, bminus) = t.boundary().jordan();
    let endpoint_residual =
        eta.end_measure().distance_tv(&bplus) + eta.start_measure().distance_tv(&bminus);
    push(
        CHECK_ENDPOINTS,
        endpoint_residual,
        tol.bound(bplus.total_variation() + bminus.total_variation()),
    );

    let non_arcs = eta.atoms().iter().filter(|(_, p)| !p.is_arc()).count();
    push(CHECK_ARCS, non_arcs as f64, 0.0);

    let weight_tol = tol.bound(t.max_weight());
    let mut failures = 0usize;
    for (w, p) in eta.atoms() {
        let single = synthesize(&Transport::from_atoms(vec![(*w, p.clone())])?, space)?;
        if !single.is_subcurrent_of(t, weight_tol)?.holds {
            failures += 1;
        }
    }
    push(CHECK_SUBCURRENTS, failures as f64, 0.0);

    let unit_paths: Vec<(f64, PolyhedralCurrent)> = eta
        .atoms()
        .iter()
        .map(|(w, p)| {
            Ok((
                *w,
                synthesize(&Transport::from_atoms(vec![(1.0, p.clone())])?, space)?,
            ))
        })
        .collect::<Result<_>>()?;
    let support: Vec<usize> = {
        let mut s: Vec<usize> = t.edges().iter().flat_map(|e| [e.tail, e.head]).collect();
        s.extend(
            eta.atoms()
                .iter()
                .flat_map(|(_, p)| p.vertices().iter().copied()),
        );
        s.sort_unstable();
        s.dedup();
        s
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..opts.restriction_trials {
        let keep: HashSet<usize> = support
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        let lhs = t.restrict_to_vertices(&keep).mass();
        let rhs: f64 = unit_paths
            .iter()
            .map(|(w, c)| w * c.restrict_to_vertices(&keep).mass())
            .fold(0.0, |acc, x| acc + x);
        worst = worst.max((lhs - rhs).abs());
    }
    push(CHECK_RESTRICTION, worst, tol.bound(mass));

    Ok(DecompositionReport { checks })
}
