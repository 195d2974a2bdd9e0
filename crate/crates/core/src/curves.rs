//! Curves as polygonal paths: parametric length, a discrete Fréchet surrogate for the
//! distance between curves, and the spiral example whose limit is a cycle.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::current::PolyhedralCurrent;
use crate::decomposition::synthesize;
use crate::error::{Error, Result};
use crate::form::{Form, ScalarField};
use crate::path::{Path, Transport};
use crate::space::{EmbeddedSpace, Norm, Space};

/// Sampling density of the spiral suite, in segments per turn.
pub const SEGMENTS_PER_TURN: usize = 64;

/// Sum of consecutive distances.
pub fn parametric_length(path: &Path, space: &Space) -> f64 {
    path.length(space)
}

/// Splits every segment of a polyline into `max(1, ⌈length · per_unit⌉)` equal pieces.
pub fn densify(points: &[&[f64]], norm: Norm, per_unit: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    if let Some(first) = points.first() {
        out.push(first.to_vec());
    }
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let pieces = (norm.distance(a, b) * per_unit).ceil().max(1.0) as usize;
        for s in 1..=pieces {
            let t = s as f64 / pieces as f64;
            out.push(a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect());
        }
    }
    out
}

/// Discrete Fréchet distance between two vertex sequences.
pub fn discrete_frechet(a: &[Vec<f64>], b: &[Vec<f64>], norm: Norm) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut prev = vec![0.0f64; b.len()];
    let mut cur = vec![0.0f64; b.len()];
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            let d = norm.distance(p, q);
            let reach = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => cur[j - 1],
                (_, 0) => prev[0],
                _ => prev[j].min(prev[j - 1]).min(cur[j - 1]),
            };
            cur[j] = d.max(reach);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len() - 1]
}

/// Upper-bound surrogate for the distance between two curves: the discrete Fréchet
/// distance of their vertex sequences after densification to `per_unit` points per
/// unit length.
pub fn theta_distance(c1: &Path, c2: &Path, space: &EmbeddedSpace, per_unit: f64) -> Result<f64> {
    if !(per_unit >= 0.0) || !per_unit.is_finite() {
        return Err(Error::Degenerate(format!(
            "densification must be finite and nonnegative, got {per_unit}"
        )));
    }
    let coords = |c: &Path| -> Result<Vec<&[f64]>> {
        c.vertices()
            .iter()
            .map(|&v| {
                if v < space.len() {
                    Ok(space.point(v))
                } else {
                    Err(Error::IndexOutOfRange {
                        index: v,
                        len: space.len(),
                    })
                }
            })
            .collect()
    };
    let a = densify(&coords(c1)?, space.norm(), per_unit);
    let b = densify(&coords(c2)?, space.norm(), per_unit);
    Ok(discrete_frechet(&a, &b, space.norm()))
}

/// Vertices of `(1 + t/ν)(cos 2πνt, sin 2πνt)`, `t ∈ [0, 1]`, sampled with
/// `segments_per_turn` segments per turn.
pub fn spiral_points(nu: usize, segments_per_turn: usize) -> Vec<Vec<f64>> {
    let n = nu * segments_per_turn;
    (0..=n)
        .map(|k| {
            let t = k as f64 / n as f64;
            let r = 1.0 + t / nu as f64;
            let angle = TAU * k as f64 / segments_per_turn as f64;
            vec![r * angle.cos(), r * angle.sin()]
        })
        .collect()
}

/// The closed polygon through `(cos 2πk/m, sin 2πk/m)` traversed once with weight 1.
pub fn circle_current(segments: usize) -> Result<PolyhedralCurrent> {
    let points = (0..segments)
        .map(|k| {
            let angle = TAU * k as f64 / segments as f64;
            vec![angle.cos(), angle.sin()]
        })
        .collect();
    let space: Arc<Space> = Arc::new(EmbeddedSpace::from_points(Norm::L2, points)?.into());
    PolyhedralCurrent::new(space, (0..segments).map(|k| (k, (k + 1) % segments, 1.0)))
}

/// The spiral transport `(1/ν) δ_θν` and its space.
pub fn spiral_transport(nu: usize) -> Result<(Arc<Space>, Transport)> {
    if nu == 0 {
        return Err(Error::Degenerate("spiral level must be at least 1".into()));
    }
    let points = spiral_points(nu, SEGMENTS_PER_TURN);
    let n = points.len();
    let space: Arc<Space> = Arc::new(EmbeddedSpace::from_points(Norm::L2, points)?.into());
    let eta = Transport::from_atoms(vec![(1.0 / nu as f64, Path::new((0..n).collect())?)])?;
    Ok((space, eta))
}

/// Affine forms `f dπ` with `f ∈ {1, x, y}` and `π ∈ {x, y}`; the sup bound of `f`
/// holds on the disk of radius 2, which contains every spiral.
pub fn form_panel() -> Vec<Form> {
    let fs = [
        (ScalarField::constant(1.0, 2), 1.0),
        (ScalarField::coordinate(0, 2), 2.0),
        (ScalarField::coordinate(1, 2), 2.0),
    ];
    let mut panel = Vec::new();
    for (f, sup) in fs {
        for axis in 0..2 {
            let mut grad = vec![0.0; 2];
            grad[axis] = 1.0;
            panel.push(
                Form::with_affine_pi(f.clone(), sup, grad, 0.0, Norm::L2)
                    .expect("valid panel form"),
            );
        }
    }
    panel
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralRow {
    pub nu: usize,
    /// `η_ν(Θ)`.
    pub eta_mass: f64,
    /// Total variation of `∂T_ην`.
    pub boundary_tv: f64,
    /// Largest `|T_ην(ω) − T_circle(ω)|` over the form panel.
    pub max_form_err: f64,
}

pub fn spiral_suite(levels: &[usize]) -> Result<Vec<SpiralRow>> {
    let circle = circle_current(SEGMENTS_PER_TURN)?;
    let panel = form_panel();
    let reference: Vec<f64> = panel
        .iter()
        .map(|w| circle.evaluate(w, 1))
        .collect::<Result<_>>()?;
    levels
        .iter()
        .map(|&nu| {
            let (space, eta) = spiral_transport(nu)?;
            let t = synthesize(&eta, &space)?;
            let mut max_form_err: f64 = 0.0;
            for (w, r) in panel.iter().zip(&reference) {
                max_form_err = max_form_err.max((t.evaluate(w, 1)? - r).abs());
            }
            Ok(SpiralRow {
                nu,
                eta_mass: eta.total_mass(),
                boundary_tv: t.boundary().total_variation(),
                max_form_err,
            })
        })
        .collect()
}

pub const SPIRAL_CSV_HEADER: &str = "nu,eta_mass,boundary_tv,max_form_err";

pub fn spiral_csv(rows: &[SpiralRow]) -> String {
    let mut out = String::from(SPIRAL_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.nu, r.eta_mass, r.boundary_tv, r.max_form_err
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(points: Vec<Vec<f64>>) -> EmbeddedSpace {
        EmbeddedSpace::from_points(Norm::L2, points).unwrap()
    }

    #[test]
    fn lengths() {
        let sp: Space = plane(vec![vec![0.0, 0.0], vec![3.0, 4.0]]).into();
        assert_eq!(parametric_length(&Path::new(vec![0, 1]).unwrap(), &sp), 5.0);
        assert_eq!(
            parametric_length(&Path::new(vec![0, 1, 0]).unwrap(), &sp),
            10.0
        );
        let mut sp = sp;
        let chord = sp.geodesic_chord(0, 1, 7).unwrap();
        assert!((parametric_length(&chord, &sp) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn identical_curves_are_at_distance_zero() {
        let sp = plane(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]]);
        let c = Path::new(vec![0, 1, 2]).unwrap();
        assert_eq!(theta_distance(&c, &c, &sp, 10.0).unwrap(), 0.0);
    }

    #[test]
    fn constant_curves() {
        let sp = plane(vec![vec![0.0, 0.0], vec![3.0, 4.0]]);
        let d = theta_distance(&Path::constant(0), &Path::constant(1), &sp, 10.0).unwrap();
        assert_eq!(d, 5.0);
    }

    #[test]
    fn translated_segment() {
        let h = 0.37;
        let sp = plane(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, h],
            vec![1.0, h],
        ]);
        let a = Path::new(vec![0, 1]).unwrap();
        let b = Path::new(vec![2, 3]).unwrap();
        for per_unit in [1.0, 16.0, 256.0] {
            assert!((theta_distance(&a, &b, &sp, per_unit).unwrap() - h).abs() < 1e-12);
        }
    }

    #[test]
    fn orientation_matters() {
        let sp = plane(vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        let a = Path::new(vec![0, 1]).unwrap();
        assert_eq!(theta_distance(&a, &a.reversed(), &sp, 8.0).unwrap(), 1.0);
        assert!(theta_distance(&a, &a, &sp, f64::NAN).is_err());
    }

    #[test]
    fn spiral_examples() {
        let rows = spiral_suite(&[1, 4]).unwrap();
        assert_eq!(rows[0].eta_mass, 1.0);
        assert!((rows[0].boundary_tv - 2.0).abs() < 1e-12);
        assert_eq!(rows[1].eta_mass, 0.25);
        assert!((rows[1].boundary_tv - 0.5).abs() < 1e-12);
        let pts = spiral_points(1, SEGMENTS_PER_TURN);
        assert_eq!(pts[0], vec![1.0, 0.0]);
        assert!((pts[SEGMENTS_PER_TURN][0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn spiral_form_error_decreases() {
        let rows = spiral_suite(&[4, 8, 16, 32]).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].max_form_err < w[0].max_form_err, "{rows:?}");
        }
        let csv = spiral_csv(&rows);
        assert!(csv.starts_with(SPIRAL_CSV_HEADER));
    }
}
