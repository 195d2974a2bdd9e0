mod common;

use std::sync::Arc;

use proptest::prelude::*;

use polycurrents::curves::discrete_frechet;
use polycurrents::decomposition::{decompose, extract_cycles, is_acyclic, synthesize};
use polycurrents::flat_norm::{flat_norm_0, narrow_gap};
use polycurrents::{AtomicMeasure, EmbeddedSpace, Form, Norm, PolyhedralCurrent, Space};

fn norm() -> impl Strategy<Value = Norm> {
    prop_oneof![Just(Norm::L1), Just(Norm::L2), Just(Norm::LInf)]
}

fn coord() -> impl Strategy<Value = f64> {
    (-400i32..400).prop_map(|k| k as f64 / 64.0)
}

/// Distinct planar points on a dyadic lattice, so coordinates are exact.
fn plane(max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::btree_set(
        (coord(), coord()).prop_map(|(x, y)| ((x * 64.0) as i32, (y * 64.0) as i32)),
        2..=max,
    )
    .prop_map(|s| {
        s.into_iter()
            .map(|(x, y)| vec![x as f64 / 64.0, y as f64 / 64.0])
            .collect()
    })
}

fn space(max: usize) -> impl Strategy<Value = Arc<Space>> {
    (plane(max), norm())
        .prop_map(|(pts, n)| Arc::new(EmbeddedSpace::from_points(n, pts).unwrap().into()))
}

fn current_on(space: Arc<Space>, max_edges: usize) -> impl Strategy<Value = PolyhedralCurrent> {
    let n = space.len();
    prop::collection::vec((0..n, 1..n, 0.05f64..4.0), 1..=max_edges).prop_map(move |list| {
        let edges: Vec<(usize, usize, f64)> = list
            .into_iter()
            .map(|(a, step, w)| (a, (a + step) % n, w))
            .collect();
        PolyhedralCurrent::new(space.clone(), edges).unwrap()
    })
}

fn current(max_points: usize, max_edges: usize) -> impl Strategy<Value = PolyhedralCurrent> {
    space(max_points).prop_flat_map(move |s| current_on(s, max_edges))
}

fn measure_on(n: usize) -> impl Strategy<Value = AtomicMeasure> {
    prop::collection::vec((0..n, -3.0f64..3.0), 0..=n).prop_map(AtomicMeasure::from_pairs)
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-9 * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn distances_form_a_metric(s in space(12)) {
        let n = s.len();
        for i in 0..n {
            prop_assert_eq!(s.d(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(s.d(i, j), s.d(j, i));
                if i != j {
                    prop_assert!(s.d(i, j) > 0.0);
                }
                for k in 0..n {
                    prop_assert!(s.d(i, k) <= s.d(i, j) + s.d(j, k) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn chords_have_the_length_of_their_endpoints(s in space(6), k in 1usize..6) {
        let mut s = (*s).clone();
        let d = s.d(0, 1);
        let path = s.geodesic_chord(0, 1, k).unwrap();
        prop_assert_eq!(path.start(), 0);
        prop_assert_eq!(path.end(), 1);
        prop_assert!(close(path.length(&s), d, d));
    }

    #[test]
    fn mass_is_a_seminorm(t in current(8, 12), c in 0.0f64..3.0) {
        let scaled = t.scale(c).unwrap();
        prop_assert!(close(scaled.mass(), c.abs() * t.mass(), t.mass()));
        let doubled = t.add(&t.reversed()).unwrap();
        prop_assert!(doubled.is_empty());
        prop_assert!(t.boundary().total_variation() <= 2.0 * t.max_weight() * t.edge_count() as f64 + 1e-12);
    }

    #[test]
    fn restrictions_are_subcurrents(t in current(8, 12), mask in any::<u32>()) {
        let kept = t.restrict(|e| mask >> ((e.tail * 7 + e.head) % 32) & 1 == 1);
        let check = kept.is_subcurrent_of(&t, 1e-12).unwrap();
        prop_assert!(check.holds);
        let rest = t.sub(&kept).unwrap();
        prop_assert!(close(kept.mass() + rest.mass(), t.mass(), t.mass()));
    }

    #[test]
    fn stokes_holds_for_affine_potentials(t in current(8, 12), g in (-3.0f64..3.0, -3.0f64..3.0), c in -2.0f64..2.0) {
        let n = t.space().as_embedded().unwrap().norm();
        let form = Form::exact(vec![g.0, g.1], c, n).unwrap();
        let lhs = t.evaluate(&form, 1).unwrap();
        let s = t.space().clone();
        let rhs = t.boundary().pair(|i| {
            let p = s.coords(i).unwrap();
            c + g.0 * p[0] + g.1 * p[1]
        });
        prop_assert!((lhs - rhs).abs() <= 1e-9 * t.mass().max(1.0) * 6.0);
    }

    #[test]
    fn evaluation_is_bounded_by_mass(t in current(8, 12), g in (-3.0f64..3.0, -3.0f64..3.0)) {
        let n = t.space().as_embedded().unwrap().norm();
        let form = Form::exact(vec![g.0, g.1], 0.0, n).unwrap();
        let lip = n.dual().of(&[g.0, g.1]);
        prop_assert!(t.evaluate(&form, 1).unwrap().abs() <= lip * t.mass() * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn cycle_split_recombines(t in current(7, 14)) {
        let split = extract_cycles(&t);
        prop_assert!(is_acyclic(&split.acyclic));
        prop_assert!(split.cycles.boundary().total_variation() <= 1e-9 * t.max_weight().max(1.0));
        let sum = split.cycles.add(&split.acyclic).unwrap();
        prop_assert!(sum.sub(&t).unwrap().mass() <= 1e-9 * t.mass().max(1.0));
        prop_assert!(close(split.cycles.mass() + split.acyclic.mass(), t.mass(), t.mass()));
    }

    #[test]
    fn decomposition_round_trips(t in current(7, 14)) {
        let acyclic = extract_cycles(&t).acyclic;
        let eta = decompose(&acyclic).unwrap();
        prop_assert!(eta.all_arcs());
        let back = synthesize(&eta, acyclic.space()).unwrap();
        prop_assert!(back.sub(&acyclic).unwrap().mass() <= 1e-9 * acyclic.mass().max(1.0));
        prop_assert!(close(eta.cost(acyclic.space()), acyclic.mass(), acyclic.mass()));
        let (plus, minus) = acyclic.boundary().jordan();
        prop_assert!(eta.end_measure().distance_tv(&plus) <= 1e-9 * plus.total().max(1.0));
        prop_assert!(eta.start_measure().distance_tv(&minus) <= 1e-9 * minus.total().max(1.0));
    }

    #[test]
    fn flat_norm_of_a_dipole(d in 0.01f64..6.0, w in 0.1f64..3.0) {
        let s: Arc<Space> = Arc::new(EmbeddedSpace::from_points(Norm::L2, vec![vec![0.0, 0.0], vec![d, 0.0]]).unwrap().into());
        let mu = AtomicMeasure::from_pairs([(1, w), (0, -w)]);
        let f = flat_norm_0(&mu, &s).unwrap().value;
        prop_assert!(close(f, w * d.min(2.0), w));
    }

    #[test]
    fn flat_norm_axioms((s, a, b) in space(7).prop_flat_map(|s| { let n = s.len(); (Just(s), measure_on(n), measure_on(n)) })) {
        let fa = flat_norm_0(&a, &s).unwrap().value;
        let fb = flat_norm_0(&b, &s).unwrap().value;
        prop_assert!(fa >= 0.0);
        prop_assert!(fa <= a.total_variation() + 1e-12);
        prop_assert!(flat_norm_0(&(&a + &b), &s).unwrap().value <= fa + fb + 1e-9);
        prop_assert!(close(narrow_gap(&a, &b, &s).unwrap(), narrow_gap(&b, &a, &s).unwrap(), fa + fb));
        prop_assert!(close(flat_norm_0(&a.scale(2.0), &s).unwrap().value, 2.0 * fa, fa));
    }

    #[test]
    fn frechet_is_a_pseudometric(
        a in prop::collection::vec((coord(), coord()), 1..6),
        b in prop::collection::vec((coord(), coord()), 1..6),
        c in prop::collection::vec((coord(), coord()), 1..6),
        n in norm(),
    ) {
        let pts = |v: &[(f64, f64)]| v.iter().map(|&(x, y)| vec![x, y]).collect::<Vec<_>>();
        let (a, b, c) = (pts(&a), pts(&b), pts(&c));
        prop_assert_eq!(discrete_frechet(&a, &a, n), 0.0);
        prop_assert_eq!(discrete_frechet(&a, &b, n), discrete_frechet(&b, &a, n));
        prop_assert!(discrete_frechet(&a, &c, n) <= discrete_frechet(&a, &b, n) + discrete_frechet(&b, &c, n) + 1e-12);
    }

    #[test]
    fn frechet_ignores_repeated_vertices(a in prop::collection::vec((coord(), coord()), 1..6), b in prop::collection::vec((coord(), coord()), 1..6), k in 0usize..6) {
        let pts = |v: &[(f64, f64)]| v.iter().map(|&(x, y)| vec![x, y]).collect::<Vec<_>>();
        let (a, b) = (pts(&a), pts(&b));
        let mut stuttered = a.clone();
        let at = k % a.len();
        stuttered.insert(at, a[at].clone());
        prop_assert_eq!(discrete_frechet(&stuttered, &b, Norm::L2), discrete_frechet(&a, &b, Norm::L2));
    }
}
