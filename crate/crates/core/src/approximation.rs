//! Polyhedral approximation of grid vector-field currents, boundary correction by
//! min-cost flow, and convergence tables.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use crate::current::PolyhedralCurrent;
use crate::error::{Error, Result};
use crate::flat_norm::flat_norm_0;
use crate::grid::GridCurrent;
use crate::measure::AtomicMeasure;
use crate::space::{PointCloud, Space};
use crate::transport::kantorovich;

/// Smallest admissible distance between neighbouring parallel segments.
pub const MIN_SPACING: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Segments parallel to the field, weighted so each cell keeps its exact mass.
    #[default]
    Directional,
    /// Axis-parallel segments for each field component separately.
    Component,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "directional" => Ok(Mode::Directional),
            "component" => Ok(Mode::Component),
            other => Err(Error::Degenerate(format!(
                "unknown approximation mode {other:?}, expected directional or component"
            ))),
        }
    }
}

/// Replaces each cell by `2^ν − 1` parallel segments spanning the cell.
///
/// The resulting space starts with the grid nodes, indexed as in
/// [`GridCurrent::node_index`], followed by the segment endpoints.
pub fn polyhedralize(g: &GridCurrent, nu: u32, mode: Mode) -> Result<PolyhedralCurrent> {
    if nu == 0 {
        return Err(Error::Degenerate(
            "approximation level must be at least 1".into(),
        ));
    }
    let n = 1usize
        .checked_shl(nu)
        .filter(|&n| n > 1)
        .ok_or(Error::TooFine { spacing: 0.0 })?
        - 1;
    let (nx, ny) = g.shape();
    let mut cloud = PointCloud::from_space(&g.node_space());
    let mut edges = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let l = g.cell(i, j);
            if l == [0.0, 0.0] {
                continue;
            }
            let rect = g.cell_rect(i, j);
            match mode {
                Mode::Directional => directional_cell(g, rect, l, nu, n, &mut cloud, &mut edges)?,
                Mode::Component => component_cell(g, rect, l, nu, n, &mut cloud, &mut edges)?,
            }
        }
    }
    let space: Arc<Space> = Arc::new(cloud.finish().into());
    PolyhedralCurrent::new(space, edges)
}

fn spacing_check(width: f64, nu: u32) -> Result<()> {
    let spacing = width / 2f64.powi(nu as i32);
    if spacing < MIN_SPACING {
        Err(Error::TooFine { spacing })
    } else {
        Ok(())
    }
}

/// Moves coordinates within rounding distance of the cell boundary onto it, so that
/// endpoints on shared faces and corners coincide exactly.
fn snap(p: [f64; 2], rect: [f64; 4]) -> [f64; 2] {
    let [x0, y0, x1, y1] = rect;
    let eps = 1e-12 * (x1 - x0).max(y1 - y0);
    let fix = |v: f64, lo: f64, hi: f64| {
        let v = v.clamp(lo, hi);
        if (v - lo).abs() <= eps {
            lo
        } else if (hi - v).abs() <= eps {
            hi
        } else {
            v
        }
    };
    [fix(p[0], x0, x1), fix(p[1], y0, y1)]
}

fn directional_cell(
    g: &GridCurrent,
    rect: [f64; 4],
    l: [f64; 2],
    nu: u32,
    n: usize,
    cloud: &mut PointCloud,
    edges: &mut Vec<(usize, usize, f64)>,
) -> Result<()> {
    let [x0, y0, x1, y1] = rect;
    let len = l[0].hypot(l[1]);
    let u = [l[0] / len, l[1] / len];
    let normal = [-u[1], u[0]];
    let corners = [[x0, y0], [x1, y0], [x0, y1], [x1, y1]];
    let proj = |p: [f64; 2]| p[0] * normal[0] + p[1] * normal[1];
    let smin = corners
        .iter()
        .map(|&c| proj(c))
        .fold(f64::INFINITY, f64::min);
    let smax = corners
        .iter()
        .map(|&c| proj(c))
        .fold(f64::NEG_INFINITY, f64::max);
    spacing_check(smax - smin, nu)?;

    let mut chords = Vec::with_capacity(n);
    for k in 1..=n {
        let s = smin + (smax - smin) * k as f64 / (n + 1) as f64;
        // points s·normal + t·u; clip t to the slabs of the cell
        let base = [s * normal[0], s * normal[1]];
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (axis, (a, b)) in [(x0, x1), (y0, y1)].into_iter().enumerate() {
            if u[axis] != 0.0 {
                let ta = (a - base[axis]) / u[axis];
                let tb = (b - base[axis]) / u[axis];
                lo = lo.max(ta.min(tb));
                hi = hi.min(ta.max(tb));
            }
        }
        if !(hi > lo) {
            continue;
        }
        let p = snap([base[0] + lo * u[0], base[1] + lo * u[1]], rect);
        let q = snap([base[0] + hi * u[0], base[1] + hi * u[1]], rect);
        if p == q {
            continue;
        }
        chords.push((
            cloud.insert(&p)?,
            cloud.insert(&q)?,
            g.norm().distance(&p, &q),
        ));
    }
    let total: f64 = chords.iter().map(|c| c.2).sum();
    if total > 0.0 {
        let w = g.cell_area() * g.norm().of(&l) / total;
        edges.extend(chords.into_iter().map(|(a, b, _)| (a, b, w)));
    }
    Ok(())
}

fn component_cell(
    g: &GridCurrent,
    rect: [f64; 4],
    l: [f64; 2],
    nu: u32,
    n: usize,
    cloud: &mut PointCloud,
    edges: &mut Vec<(usize, usize, f64)>,
) -> Result<()> {
    let [x0, y0, x1, y1] = rect;
    let (hx, hy) = (x1 - x0, y1 - y0);
    let area = g.cell_area();
    if l[0] != 0.0 {
        spacing_check(hy, nu)?;
        let w = area * l[0].abs() / (n as f64 * hx);
        for k in 1..=n {
            let y = y0 + hy * k as f64 / (n + 1) as f64;
            let (a, b) = (cloud.insert(&[x0, y])?, cloud.insert(&[x1, y])?);
            edges.push(if l[0] > 0.0 { (a, b, w) } else { (b, a, w) });
        }
    }
    if l[1] != 0.0 {
        spacing_check(hx, nu)?;
        let w = area * l[1].abs() / (n as f64 * hy);
        for k in 1..=n {
            let x = x0 + hx * k as f64 / (n + 1) as f64;
            let (a, b) = (cloud.insert(&[x, y0])?, cloud.insert(&[x, y1])?);
            edges.push(if l[1] > 0.0 { (a, b, w) } else { (b, a, w) });
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct Correction {
    /// The correcting current, with `∂Y = target − ∂S`.
    pub y: PolyhedralCurrent,
    /// `S + Y`.
    pub corrected: PolyhedralCurrent,
    /// `M(Y)`.
    pub correction_mass: f64,
    /// Total variation of `∂(S + Y) − target`.
    pub boundary_residual: f64,
}

/// Smallest current `Y` made of straight chords with `∂(S + Y) = target`.
pub fn boundary_correct(s: &PolyhedralCurrent, target: &AtomicMeasure) -> Result<Correction> {
    let space = s.space();
    target.check_in(space)?;
    let tau = target - &s.boundary();
    let (plus, minus) = tau.jordan();
    let (p, m) = (plus.total(), minus.total());
    let scale = target.total_variation().max(1.0);
    if (p - m).abs() > 1e-12 * scale {
        return Err(Error::Unbalanced { plus: p, minus: m });
    }
    let y = if tau.is_zero() {
        PolyhedralCurrent::empty(space.clone())
    } else {
        // move the mass of τ⁻ onto τ⁺, so ∂Y = τ
        let minus = minus.scale(p / m);
        let sol = kantorovich(&minus, &plus, space)?;
        PolyhedralCurrent::new(
            space.clone(),
            sol.plan
                .entries
                .iter()
                .filter(|e| e.source != e.target)
                .map(|e| (e.source, e.target, e.mass)),
        )?
    };
    let corrected = s.add(&y)?;
    Ok(Correction {
        correction_mass: y.mass(),
        boundary_residual: corrected.boundary().distance_tv(target),
        y,
        corrected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub nu: u32,
    /// `|M(S_ν) − M(G)|`.
    pub mass_err: f64,
    /// Flat norm of `∂S_ν − ∂G`.
    pub boundary_flat_gap: f64,
    /// `M(Y_ν)` from [`boundary_correct`].
    pub correction_mass: f64,
}

/// Compares `polyhedralize(G, ν)` with `G` at every level.
///
/// The boundary of `G` is represented by the normal-flux jumps across cell faces,
/// sampled `2^max(levels)` times per face, so the reference is finer than every
/// approximant.
pub fn convergence_report(
    g: &GridCurrent,
    levels: &[u32],
    mode: Mode,
) -> Result<Vec<ConvergenceRow>> {
    let max_level = levels.iter().copied().max().unwrap_or(1).max(1);
    let samples = 1usize << max_level.min(16);
    let flux = g.face_flux_samples(samples);
    let grid_mass = g.mass();
    let mut rows = Vec::with_capacity(levels.len());
    for &nu in levels {
        let s = polyhedralize(g, nu, mode)?;
        let mut cloud = PointCloud::from_space(s.space().as_embedded()?);
        let mut target = Vec::with_capacity(flux.len());
        for (p, w) in &flux {
            target.push((cloud.insert(p)?, *w));
        }
        let space: Arc<Space> = Arc::new(cloud.finish().into());
        let s = s.push_forward(space.clone(), |v| v)?;
        let target = AtomicMeasure::from_pairs(target);
        let gap = flat_norm_0(&(&s.boundary() - &target), &space)?.value;
        let correction = boundary_correct(&s, &target)?;
        rows.push(ConvergenceRow {
            nu,
            mass_err: (s.mass() - grid_mass).abs(),
            boundary_flat_gap: gap,
            correction_mass: correction.correction_mass,
        });
    }
    Ok(rows)
}

pub const CONVERGENCE_CSV_HEADER: &str = "nu,mass_err,boundary_flat_gap,correction_mass";

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from(CONVERGENCE_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.nu, r.mass_err, r.boundary_flat_gap, r.correction_mass
        );
    }
    out
}
