//! Min-cost flow by successive shortest paths with node potentials.
//!
//! Costs must be nonnegative, so zero initial potentials are already feasible and every
//! shortest-path search runs Dijkstra on reduced costs `c(u,v) + h(u) - h(v) >= 0`.
//! Supplies and capacities are real; each augmentation saturates at least one residual
//! arc exactly, which bounds the number of rounds.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct Arc {
    to: usize,
    rev: usize,
    cap: f64,
    cost: f64,
}

#[derive(Debug, Clone, Copy)]
struct EdgeSpec {
    from: usize,
    to: usize,
    cap: f64,
    cost: f64,
}

#[derive(Debug, Clone, Default)]
pub struct MinCostFlow {
    nodes: usize,
    edges: Vec<EdgeSpec>,
}

#[derive(Debug, Clone)]
pub struct FlowSolution {
    /// Flow on each edge, in insertion order.
    pub flows: Vec<f64>,
    pub cost: f64,
    /// Node potentials `p` with `p(v) - p(u) <= cost(u,v)` on every edge with spare
    /// capacity and equality on every edge carrying flow. Present only when requested.
    pub potentials: Option<Vec<f64>>,
}

struct Residual {
    adj: Vec<Vec<Arc>>,
    /// (node, arc position) of each original edge's forward arc.
    handles: Vec<(usize, usize)>,
}

impl Residual {
    fn add(&mut self, from: usize, to: usize, cap: f64, cost: f64) -> (usize, usize) {
        let fwd = self.adj[from].len();
        let bwd = self.adj[to].len() + usize::from(from == to);
        self.adj[from].push(Arc {
            to,
            rev: bwd,
            cap,
            cost,
        });
        self.adj[to].push(Arc {
            to: from,
            rev: fwd,
            cap: 0.0,
            cost: -cost,
        });
        (from, fwd)
    }
}

impl MinCostFlow {
    pub fn new(nodes: usize) -> Self {
        Self {
            nodes,
            edges: Vec::new(),
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Adds a directed edge and returns its id. `cap` may be `f64::INFINITY`.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64, cost: f64) -> Result<usize> {
        if from >= self.nodes || to >= self.nodes {
            return Err(Error::Flow(format!(
                "edge {from}->{to} outside {} nodes",
                self.nodes
            )));
        }
        if !(cost >= 0.0) || !cost.is_finite() {
            return Err(Error::Flow(format!(
                "edge cost must be finite and nonnegative, got {cost}"
            )));
        }
        if !(cap >= 0.0) {
            return Err(Error::Flow(format!(
                "edge capacity must be nonnegative, got {cap}"
            )));
        }
        self.edges.push(EdgeSpec {
            from,
            to,
            cap,
            cost,
        });
        Ok(self.edges.len() - 1)
    }

    pub fn solve(&self, supply: &[f64]) -> Result<FlowSolution> {
        self.run(supply, false)
    }

    pub fn solve_with_potentials(&self, supply: &[f64]) -> Result<FlowSolution> {
        self.run(supply, true)
    }

    fn run(&self, supply: &[f64], want_potentials: bool) -> Result<FlowSolution> {
        let n = self.nodes;
        if supply.len() != n {
            return Err(Error::Flow(format!(
                "{} supplies for {n} nodes",
                supply.len()
            )));
        }
        if supply.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite("flow supply".into()));
        }
        let total_out: f64 = supply.iter().filter(|b| **b > 0.0).sum();
        let total_in: f64 = -supply.iter().filter(|b| **b < 0.0).sum::<f64>();
        let scale = total_out.max(total_in).max(1.0);
        if (total_out - total_in).abs() > 1e-12 * scale {
            return Err(Error::Flow(format!(
                "supplies do not balance: {total_out} out, {total_in} in"
            )));
        }

        let (source, sink) = (n, n + 1);
        let mut g = Residual {
            adj: vec![Vec::new(); n + 2],
            handles: Vec::with_capacity(self.edges.len()),
        };
        for e in &self.edges {
            let h = g.add(e.from, e.to, e.cap, e.cost);
            g.handles.push(h);
        }
        for (v, &b) in supply.iter().enumerate() {
            if b > 0.0 {
                g.add(source, v, b, 0.0);
            } else if b < 0.0 {
                g.add(v, sink, -b, 0.0);
            }
        }

        let target = total_out.min(total_in);
        let mut routed = 0.0;
        let mut h = vec![0.0; n + 2];
        let mut dist = vec![f64::INFINITY; n + 2];
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n + 2];
        let mut done = vec![false; n + 2];
        let mut rounds = 0usize;
        let round_limit = 4 * (self.edges.len() + 2 * n + 2) + 16;
        while routed < target - 1e-15 * scale {
            rounds += 1;
            if rounds > round_limit {
                return Err(Error::Flow("augmentation did not terminate".into()));
            }
            dense_dijkstra(&g, source, &h, &mut dist, &mut prev, &mut done);
            if !dist[sink].is_finite() {
                break;
            }
            for v in 0..n + 2 {
                if dist[v].is_finite() {
                    h[v] += dist[v];
                }
            }
            let mut delta = f64::INFINITY;
            let mut v = sink;
            while let Some((u, i)) = prev[v] {
                delta = delta.min(g.adj[u][i].cap);
                v = u;
            }
            let mut v = sink;
            while let Some((u, i)) = prev[v] {
                let rev = g.adj[u][i].rev;
                g.adj[u][i].cap -= delta;
                g.adj[v][rev].cap += delta;
                v = u;
            }
            routed += delta;
        }
        if routed < target - 1e-12 * scale {
            return Err(Error::Flow(format!(
                "infeasible: routed {routed} of {target} units"
            )));
        }

        let flows: Vec<f64> = g
            .handles
            .iter()
            .map(|&(u, i)| {
                let a = g.adj[u][i];
                g.adj[a.to][a.rev].cap
            })
            .collect();
        let cost = flows
            .iter()
            .zip(&self.edges)
            .map(|(f, e)| f * e.cost)
            .fold(0.0, |acc, x| acc + x);
        let potentials = if want_potentials {
            Some(residual_potentials(&g, n, 1e-15 * scale)?)
        } else {
            None
        };
        Ok(FlowSolution {
            flows,
            cost,
            potentials,
        })
    }
}

fn dense_dijkstra(
    g: &Residual,
    source: usize,
    h: &[f64],
    dist: &mut [f64],
    prev: &mut [Option<(usize, usize)>],
    done: &mut [bool],
) {
    dist.fill(f64::INFINITY);
    prev.fill(None);
    done.fill(false);
    dist[source] = 0.0;
    loop {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for (v, &d) in dist.iter().enumerate() {
            if !done[v] && d < best {
                best = d;
                u = v;
            }
        }
        if u == usize::MAX {
            return;
        }
        done[u] = true;
        for (i, a) in g.adj[u].iter().enumerate() {
            if a.cap <= 0.0 || done[a.to] {
                continue;
            }
            let reduced = (a.cost + h[u] - h[a.to]).max(0.0);
            let nd = best + reduced;
            if nd < dist[a.to] {
                dist[a.to] = nd;
                prev[a.to] = Some((u, i));
            }
        }
    }
}

/// Shortest distances from a virtual root joined to every real node at zero cost,
/// over residual arcs with capacity above `eps`. At an optimum the residual graph
/// has no negative cycle, so Bellman-Ford converges.
fn residual_potentials(g: &Residual, n: usize, eps: f64) -> Result<Vec<f64>> {
    let mut p = vec![0.0; n];
    for _ in 0..=n {
        let mut changed = false;
        for u in 0..n {
            for a in &g.adj[u] {
                if a.to >= n || a.cap <= eps {
                    continue;
                }
                let cand = p[u] + a.cost;
                if cand < p[a.to] - 1e-15 * (1.0 + cand.abs()) {
                    p[a.to] = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(p);
        }
    }
    Err(Error::Flow(
        "negative residual cycle: flow is not optimal".into(),
    ))
}
