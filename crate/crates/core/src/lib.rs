//! One-dimensional polyhedral currents on finite metric environments.
//!
//! The crate covers the discrete side of the theory of normal one-dimensional currents:
//! canonical polyhedral currents with mass, boundary and restriction; splitting a current
//! into a cycle and an acyclic part; decomposing acyclic currents into weighted arcs
//! (transports) and synthesizing currents back from transports; polyhedral approximation
//! of planar vector-field currents; the flat norm of atomic measures; and the equivalence
//! between Wasserstein-1 transport and mass-minimizing currents, certified by Kantorovich
//! potentials.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approximation;
pub mod current;
pub mod curves;
pub mod decomposition;
pub mod error;
pub mod flat_norm;
pub mod flow;
pub mod form;
pub mod grid;
pub mod io;
pub mod measure;
pub mod path;
pub mod space;
pub mod tolerance;
pub mod transport;

pub use approximation::{boundary_correct, convergence_report, polyhedralize, Mode};
pub use current::{Edge, PolyhedralCurrent, SubcurrentCheck};
pub use curves::{discrete_frechet, parametric_length, spiral_suite, theta_distance};
pub use decomposition::{
    decompose, extract_cycles, remove_loop, synthesize, to_arcs, verify_decomposition, CycleSplit,
    DecompositionReport, VerifyOptions,
};
pub use error::{Error, Result};
pub use flat_norm::{flat_norm_0, narrow_gap, FlatNorm};
pub use form::{Form, ScalarField};
pub use grid::GridCurrent;
pub use measure::AtomicMeasure;
pub use path::{Path, Transport};
pub use space::{EmbeddedSpace, FiniteMetricSpace, Norm, PointCloud, Space};
pub use tolerance::Tolerance;
pub use transport::{beckmann, duality_gap, kantorovich, plan_to_transport, transport_cost, Plan};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
