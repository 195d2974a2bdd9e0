//! Random instance generators and brute-force oracles shared by the integration tests.
//! The oracles deliberately avoid the crate's own solvers.

#![allow(dead_code)]

use std::sync::Arc;

use polycurrents::{AtomicMeasure, EmbeddedSpace, Norm, PolyhedralCurrent, Space};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// `n` distinct random points in `[0, side]^2`.
pub fn random_plane(rng: &mut ChaCha8Rng, n: usize, side: f64, norm: Norm) -> Arc<Space> {
    let points = (0..n)
        .map(|_| vec![rng.gen_range(0.0..side), rng.gen_range(0.0..side)])
        .collect();
    Arc::new(
        EmbeddedSpace::from_points(norm, points)
            .expect("random points are distinct")
            .into(),
    )
}

/// Random edges between distinct points; `acyclic` orients every edge along a random
/// vertex order, which rules out directed cycles.
pub fn random_current(
    rng: &mut ChaCha8Rng,
    space: &Arc<Space>,
    edges: usize,
    acyclic: bool,
) -> PolyhedralCurrent {
    let n = space.len();
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(rng);
    let list: Vec<(usize, usize, f64)> = (0..edges)
        .map(|_| {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let (t, h) = if !acyclic || rank[a] < rank[b] {
                (a, b)
            } else {
                (b, a)
            };
            (t, h, rng.gen_range(0.1..3.0))
        })
        .collect();
    PolyhedralCurrent::new(space.clone(), list).unwrap()
}

/// Random positive weights on `count` distinct points drawn from `0..n`, normalized to
/// total `mass`.
pub fn random_measure(rng: &mut ChaCha8Rng, points: &[usize], mass: f64) -> AtomicMeasure {
    let w: Vec<f64> = points.iter().map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    AtomicMeasure::from_pairs(points.iter().zip(&w).map(|(&p, &x)| (p, mass * x / total)))
}

/// Whether some nonempty set of support edges is balanced (in-degree equals out-degree
/// at every vertex). Such a set carries a nonzero cycle subcurrent, and every directed
/// cycle is such a set, so this decides acyclicity by exhaustion.
pub fn has_cycle_by_enumeration(t: &PolyhedralCurrent) -> bool {
    let edges = t.edges();
    assert!(
        edges.len() <= 16,
        "exhaustive search is for small instances"
    );
    let n = t.space().len();
    (1u32..(1 << edges.len())).any(|mask| {
        let mut balance = vec![0i32; n];
        for (k, e) in edges.iter().enumerate() {
            if mask & (1 << k) != 0 {
                balance[e.tail] -= 1;
                balance[e.head] += 1;
            }
        }
        balance.iter().all(|&b| b == 0)
    })
}

/// Optimal transport cost and plan by enumerating all basic feasible plans of the
/// transportation polytope: spanning trees of the bipartite support graph, solved by
/// peeling leaves. Returns the best cost, its plan, and the second-best basic cost.
/// `(source, target, mass)` cells of a transport plan.
pub type PlanCells = Vec<(usize, usize, f64)>;

pub struct BruteForce {
    pub cost: f64,
    pub plan: Vec<(usize, usize, f64)>,
    pub runner_up: f64,
}

pub fn brute_force_transport(
    supply: &[(usize, f64)],
    demand: &[(usize, f64)],
    space: &Space,
) -> BruteForce {
    let (m, n) = (supply.len(), demand.len());
    assert!(m * n <= 16, "exhaustive search is for small instances");
    let k = m + n - 1;
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let mut best = BruteForce {
        cost: f64::INFINITY,
        plan: Vec::new(),
        runner_up: f64::INFINITY,
    };
    let mut seen: Vec<(f64, PlanCells)> = Vec::new();
    for_each_combination(cells.len(), k, &mut |choice| {
        let chosen: Vec<(usize, usize)> = choice.iter().map(|&c| cells[c]).collect();
        if !is_spanning_tree(&chosen, m, n) {
            return;
        }
        let Some(flows) = peel(&chosen, supply, demand) else {
            return;
        };
        let cost: f64 = chosen
            .iter()
            .zip(&flows)
            .map(|(&(i, j), f)| f * space.d(supply[i].0, demand[j].0))
            .sum();
        let mut plan: Vec<(usize, usize, f64)> = chosen
            .iter()
            .zip(&flows)
            .filter(|(_, &f)| f > 1e-15)
            .map(|(&(i, j), &f)| (supply[i].0, demand[j].0, f))
            .collect();
        plan.sort_by_key(|c| (c.0, c.1));
        if cost < best.cost {
            best.cost = cost;
            best.plan = plan.clone();
        }
        seen.push((cost, plan));
    });
    // degenerate bases share a plan; the runner-up is the best cost of a different plan,
    // so a tie between two distinct optimal plans gives `runner_up == cost`
    best.runner_up = seen
        .iter()
        .filter(|(_, plan)| !same_plan(plan, &best.plan))
        .map(|(c, _)| *c)
        .fold(f64::INFINITY, f64::min);
    best
}

/// Equal supports and masses within `1e-12`; both plans sorted by cell.
pub fn same_plan(a: &[(usize, usize, f64)], b: &[(usize, usize, f64)]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| x.0 == y.0 && x.1 == y.1 && (x.2 - y.2).abs() <= 1e-12)
}

fn for_each_combination(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, acc: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if acc.len() == k {
            f(acc);
            return;
        }
        for i in start..n {
            if n - i < k - acc.len() {
                break;
            }
            acc.push(i);
            rec(i + 1, n, k, acc, f);
            acc.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

fn is_spanning_tree(cells: &[(usize, usize)], m: usize, n: usize) -> bool {
    let mut parent: Vec<usize> = (0..m + n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for &(i, j) in cells {
        let (a, b) = (find(&mut parent, i), find(&mut parent, m + j));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// Flows on a spanning tree meeting the marginals, or `None` when some flow is negative.
fn peel(
    cells: &[(usize, usize)],
    supply: &[(usize, f64)],
    demand: &[(usize, f64)],
) -> Option<Vec<f64>> {
    let m = supply.len();
    let mut rest: Vec<f64> = supply
        .iter()
        .map(|s| s.1)
        .chain(demand.iter().map(|d| d.1))
        .collect();
    let mut flows = vec![0.0; cells.len()];
    let mut alive = vec![true; cells.len()];
    for _ in 0..cells.len() {
        let mut degree = vec![0usize; rest.len()];
        for (c, &(i, j)) in cells.iter().enumerate() {
            if alive[c] {
                degree[i] += 1;
                degree[m + j] += 1;
            }
        }
        let (c, leaf) = cells
            .iter()
            .enumerate()
            .filter(|(c, _)| alive[*c])
            .find_map(|(c, &(i, j))| {
                if degree[i] == 1 {
                    Some((c, i))
                } else if degree[m + j] == 1 {
                    Some((c, m + j))
                } else {
                    None
                }
            })?;
        let (i, j) = cells[c];
        let other = if leaf == i { m + j } else { i };
        let f = rest[leaf];
        flows[c] = f;
        rest[leaf] = 0.0;
        rest[other] -= f;
        alive[c] = false;
    }
    let scale: f64 = supply.iter().map(|s| s.1).sum::<f64>().max(1.0);
    flows.iter().all(|&f| f >= -1e-12 * scale).then_some(flows)
}
