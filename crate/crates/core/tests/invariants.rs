use proptest::prelude::*;

use boundcount::bounds::{bound_report, i_of_r, newton_seto, r_min, soundness_violations, BoundOptions};
use boundcount::counting::{count_bound_states_1d, count_total_2d, integrate_channel, Count, Window};
use boundcount::energy::spectrum;
use boundcount::potential::{make_catalog, CatalogId, Piece, Potential, Space};
use boundcount::transform::log_map;

fn well(depth: f64, radius: f64, dimension: u32) -> Potential {
    make_catalog(&CatalogId::SquareWell { depth, radius, dimension }).unwrap()
}

fn finite(c: Count) -> u64 {
    c.finite().expect("finite count")
}

/// Piecewise-constant attractive radial profile from (width, depth) pairs.
fn steps(parts: &[(f64, f64)]) -> Potential {
    let mut r = 0.0;
    let pieces = parts
        .iter()
        .map(|&(w, d)| {
            let p = Piece::constant(r, r + w, -d);
            r += w;
            p
        })
        .collect();
    Potential::new(Space::Radial, 2, pieces).unwrap()
}

fn profile() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.05f64..2.0, 0.05f64..8.0), 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn sandwich_holds(parts in profile()) {
        let v = steps(&parts);
        let j = newton_seto(&v).unwrap();
        let (r, _) = r_min(&v).unwrap();
        let i = i_of_r(&v, r).unwrap();
        prop_assert!(j <= i && i <= 2.0 * j, "J = {j}, I = {i}");
    }

    #[test]
    fn r_min_minimizes(parts in profile(), t in 0.05f64..20.0) {
        let v = steps(&parts);
        let (r, _) = r_min(&v).unwrap();
        let at_min = i_of_r(&v, r).unwrap();
        prop_assert!(i_of_r(&v, t).unwrap() >= at_min - 1e-9 * at_min.abs().max(1.0));
    }

    #[test]
    fn bounds_are_sound_on_steps(parts in profile()) {
        let v = steps(&parts);
        let rep = bound_report(&v, &BoundOptions::default());
        let bad = soundness_violations(&v, &rep, Window::default()).unwrap();
        prop_assert!(bad.is_empty(), "{bad:?}");
    }

    #[test]
    fn bounds_are_sound_on_line_wells(depth in 0.1f64..150.0, a in 0.2f64..2.0) {
        let v = well(depth, a, 1);
        let rep = bound_report(&v, &BoundOptions::default());
        prop_assert!(soundness_violations(&v, &rep, Window::default()).unwrap().is_empty());
    }

    #[test]
    fn planar_count_is_scale_invariant(parts in profile(), s in 0.2f64..5.0) {
        let v = steps(&parts);
        let scaled: Vec<(f64, f64)> = parts.iter().map(|&(w, d)| (w / s, d * s * s)).collect();
        let n = finite(count_total_2d(&v, Window::default()).unwrap().count);
        let ns = finite(count_total_2d(&steps(&scaled), Window::default()).unwrap().count);
        prop_assert_eq!(n, ns);
    }

    #[test]
    fn deeper_wells_bind_more(depth in 0.1f64..100.0, extra in 0.0f64..50.0, a in 0.2f64..2.0) {
        let shallow = finite(count_bound_states_1d(&well(depth, a, 1), Window::default()).unwrap().count);
        let deep = finite(count_bound_states_1d(&well(depth + extra, a, 1), Window::default()).unwrap().count);
        prop_assert!(shallow <= deep);
    }

    #[test]
    fn spectrum_is_ordered_and_complete(depth in 0.5f64..120.0, a in 0.3f64..1.5) {
        let v = well(depth, a, 1);
        let s = spectrum(&v, None).unwrap();
        let n = finite(count_bound_states_1d(&v, Window::default()).unwrap().count);
        prop_assert_eq!(s.len() as u64, n);
        for (k, w) in s.windows(2).enumerate() {
            prop_assert!(w[0].energy < w[1].energy, "level {k}");
        }
        prop_assert!(s.iter().all(|e| e.energy < 0.0 && e.energy > -depth));
    }

    #[test]
    fn log_map_carries_nodes(depth in 2.0f64..80.0, scale in 0.3f64..4.0) {
        let u = well(depth, 1.0, 1);
        let v = log_map(&u, scale).unwrap();
        let nu = integrate_channel(&u, None, 0.0, Window::default()).unwrap().node_positions;
        let nv = integrate_channel(&v, Some(0.0), 0.0, Window::default()).unwrap().node_positions;
        prop_assert_eq!(nu.len(), nv.len());
        for (x, r) in nu.iter().zip(&nv) {
            let want = scale * x.exp();
            prop_assert!((want - r).abs() <= 1e-6 * want, "{want} vs {r}");
        }
    }
}
