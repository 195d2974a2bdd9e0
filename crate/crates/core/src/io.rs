//! JSON documents for spaces, measures, currents, grids, transports and solver results.
//!
//! Parsing reports the JSON path of the offending value. Documents only describe data;
//! the invariants are checked when converting into the domain types.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::current::PolyhedralCurrent;
use crate::decomposition::{ArcSplit, CycleSplit, DecompositionReport};
use crate::error::{Error, Result};
use crate::grid::GridCurrent;
use crate::measure::AtomicMeasure;
use crate::path::{Path, Transport};
use crate::space::{EmbeddedSpace, FiniteMetricSpace, Norm, Space};
use crate::transport::{BeckmannSolution, Certificate};

/// Parses `text` as a document of type `T`, naming the JSON path on failure.
pub fn from_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Document(format!("{what}: at {path}: {inner}"))
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

fn default_norm() -> Norm {
    Norm::L2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpaceDoc {
    Embedded {
        #[serde(default = "default_norm")]
        p: Norm,
        points: Vec<Vec<f64>>,
    },
    Metric {
        d: Vec<Vec<f64>>,
    },
}

impl SpaceDoc {
    pub fn from_space(space: &Space) -> Self {
        match space {
            Space::Embedded(e) => SpaceDoc::Embedded {
                p: e.norm(),
                points: e.points().to_vec(),
            },
            Space::Metric(m) => SpaceDoc::Metric { d: m.matrix() },
        }
    }

    pub fn to_space(&self) -> Result<Space> {
        Ok(match self {
            SpaceDoc::Embedded { p, points } => {
                if points.is_empty() {
                    return Err(Error::InvalidSpace(
                        "embedded space needs at least one point".into(),
                    ));
                }
                EmbeddedSpace::from_points(*p, points.clone())?.into()
            }
            SpaceDoc::Metric { d } => FiniteMetricSpace::new(d.clone())?.into(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureDoc {
    pub atoms: Vec<(usize, f64)>,
}

impl MeasureDoc {
    pub fn from_measure(mu: &AtomicMeasure) -> Self {
        Self {
            atoms: mu.iter().collect(),
        }
    }

    pub fn to_measure(&self, space: &Space) -> Result<AtomicMeasure> {
        let mu = AtomicMeasure::try_from_pairs(self.atoms.iter().copied())?;
        mu.check_in(space)?;
        Ok(mu)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurrentDoc {
    pub space: SpaceDoc,
    pub edges: Vec<(usize, usize, f64)>,
}

impl CurrentDoc {
    pub fn from_current(t: &PolyhedralCurrent) -> Self {
        Self {
            space: SpaceDoc::from_space(t.space()),
            edges: edge_list(t),
        }
    }

    pub fn to_current(&self) -> Result<PolyhedralCurrent> {
        let space = Arc::new(self.space.to_space()?);
        PolyhedralCurrent::new(space, self.edges.iter().copied())
    }
}

/// Edges of `t` as `[tail, head, weight]` triples in edge-index order.
pub fn edge_list(t: &PolyhedralCurrent) -> Vec<(usize, usize, f64)> {
    t.edges()
        .into_iter()
        .map(|e| (e.tail, e.head, e.weight))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDoc {
    /// `[x0, y0, x1, y1]`.
    pub rect: [f64; 4],
    /// `[nx, ny]`.
    pub shape: [usize; 2],
    /// One vector per cell, row-major from the bottom row.
    pub field: Vec<[f64; 2]>,
    #[serde(default = "default_norm")]
    pub p: Norm,
}

impl GridDoc {
    pub fn from_grid(g: &GridCurrent) -> Self {
        let (nx, ny) = g.shape();
        Self {
            rect: g.rect(),
            shape: [nx, ny],
            field: g.field().to_vec(),
            p: g.norm(),
        }
    }

    pub fn to_grid(&self) -> Result<GridCurrent> {
        GridCurrent::new(
            self.rect,
            (self.shape[0], self.shape[1]),
            self.field.clone(),
            self.p,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportDoc {
    /// `[weight, [v0, v1, ...]]` per atom.
    pub atoms: Vec<(f64, Vec<usize>)>,
}

impl TransportDoc {
    pub fn from_transport(eta: &Transport) -> Self {
        Self {
            atoms: eta
                .atoms()
                .iter()
                .map(|(w, p)| (*w, p.vertices().to_vec()))
                .collect(),
        }
    }

    pub fn to_transport(&self, space: &Space) -> Result<Transport> {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for (w, vs) in &self.atoms {
            let path = Path::new(vs.clone())?;
            for &v in path.vertices() {
                space.check(v)?;
            }
            atoms.push((*w, path));
        }
        Transport::from_atoms(atoms)
    }
}

/// Two or more curves given as vertex sequences in one embedded space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvesDoc {
    pub space: SpaceDoc,
    pub curves: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckDoc {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub bound: f64,
}

/// Output of the decomposition pipeline: cycle extraction, decomposition of the acyclic
/// part, and verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionDoc {
    pub transport: TransportDoc,
    /// The cycle part `C` of `T = C + T′`.
    pub cycles: Vec<(usize, usize, f64)>,
    /// The removed simple cycles, as closed vertex paths.
    pub removed_cycles: TransportDoc,
    pub acyclic: Vec<(usize, usize, f64)>,
    /// Closed sub-paths excised when reducing paths to arcs.
    pub loops: TransportDoc,
    pub checks: Vec<CheckDoc>,
    pub passed: bool,
}

impl DecompositionDoc {
    pub fn new(split: &CycleSplit, arcs: &ArcSplit, report: &DecompositionReport) -> Self {
        Self {
            transport: TransportDoc::from_transport(&arcs.arcs),
            cycles: edge_list(&split.cycles),
            removed_cycles: TransportDoc {
                atoms: split
                    .removed
                    .iter()
                    .map(|(w, p)| (*w, p.vertices().to_vec()))
                    .collect(),
            },
            acyclic: edge_list(&split.acyclic),
            loops: TransportDoc::from_transport(&arcs.loops),
            checks: report
                .checks
                .iter()
                .map(|c| CheckDoc {
                    name: c.name.to_string(),
                    passed: c.passed,
                    residual: c.residual,
                    bound: c.bound,
                })
                .collect(),
            passed: report.all_passed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub mass_residual: f64,
    pub cost_residual: f64,
    pub duality_gap: f64,
    pub boundary_residual: f64,
    pub marginal_residual: f64,
    pub acyclic: bool,
    pub passed: bool,
}

impl CertificateDoc {
    pub fn new(c: &Certificate, passed: bool) -> Self {
        Self {
            mass_residual: c.mass_residual,
            cost_residual: c.cost_residual,
            duality_gap: c.duality_gap,
            boundary_residual: c.boundary_residual,
            marginal_residual: c.marginal_residual,
            acyclic: c.acyclic,
            passed,
        }
    }
}

/// Output of the transport solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportSolutionDoc {
    pub w1: f64,
    /// `[source, target, mass]` per plan entry.
    pub plan: Vec<(usize, usize, f64)>,
    /// `[point, value]` of a 1-Lipschitz potential attaining the dual optimum.
    pub potentials: Vec<(usize, f64)>,
    /// The optimal current, whose boundary is `minus − plus`.
    pub current: CurrentDoc,
    pub transport: TransportDoc,
    pub certificate: CertificateDoc,
}

impl TransportSolutionDoc {
    pub fn new(sol: &BeckmannSolution, passed: bool) -> Self {
        let potentials: &BTreeMap<usize, f64> = &sol.kantorovich.potentials;
        Self {
            w1: sol.kantorovich.w1,
            plan: sol
                .kantorovich
                .plan
                .entries
                .iter()
                .map(|e| (e.source, e.target, e.mass))
                .collect(),
            potentials: potentials.iter().map(|(&k, &v)| (k, v)).collect(),
            current: CurrentDoc::from_current(&sol.current),
            transport: TransportDoc::from_transport(&sol.transport),
            certificate: CertificateDoc::new(&sol.certificate, passed),
        }
    }
}

/// Output of the flat norm command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatNormDoc {
    pub value: f64,
    pub residue: MeasureDoc,
    pub filling: Vec<(usize, usize, f64)>,
}
