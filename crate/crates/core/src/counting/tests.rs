use super::*;
use crate::potential::{make_catalog, CatalogId};
use crate::transform::log_map;
use std::f64::consts::PI;

fn line_well(depth: f64, half_width: f64) -> Potential {
    make_catalog(&CatalogId::SquareWell {
        depth,
        radius: half_width,
        dimension: 1,
    })
    .unwrap()
}

fn disk_well(depth: f64, radius: f64) -> Potential {
    make_catalog(&CatalogId::SquareWell {
        depth,
        radius,
        dimension: 2,
    })
    .unwrap()
}

/// Even/odd matching gives ⌈2a√V₀/π⌉ states for a well of half-width a.
fn matching_count(depth: f64, a: f64) -> u64 {
    (2.0 * a * depth.sqrt() / PI).ceil() as u64
}

#[test]
fn free_line_has_no_states() {
    let v = Potential::zero(Space::Line, 1);
    let c = count_bound_states_1d(&v, Window::default()).unwrap();
    assert_eq!(c.count, Count::Finite(0));
    let t = integrate_channel(&v, None, 0.0, Window::default()).unwrap();
    assert!(t.node_positions.is_empty());
}

#[test]
fn line_wells_match_matching_equations() {
    for (depth, a) in [
        (4.4 * PI * PI, 1.0),
        (4.0 * PI * PI * (1.0 + 1e-3), 1.0),
        (4.0 * PI * PI * (1.0 - 1e-3), 1.0),
        (0.01, 1.0),
        (50.0, 0.5),
        (300.0, 2.0),
    ] {
        let c = count_bound_states_1d(&line_well(depth, a), Window::default()).unwrap();
        assert_eq!(c.count, Count::Finite(matching_count(depth, a)), "depth {depth}");
    }
    assert_eq!(matching_count(4.4 * PI * PI, 1.0), 5);
}

#[test]
fn inverse_square_tail_is_infinite_and_oscillates() {
    let v = make_catalog(&CatalogId::InverseSquareTail { lambda: 1.25, x0: 1.0 }).unwrap();
    let c = count_bound_states_1d(&v, Window::default()).unwrap();
    assert_eq!(c.count, Count::Infinite);
    assert_eq!(c.classifier, "EQ8");
    let windows: Vec<f64> = (1..=5).map(|k| (k as f64 * PI).exp()).collect();
    let prof = node_growth_profile(&v, None, &windows).unwrap();
    for (k, (_, n)) in prof.iter().enumerate() {
        assert!((*n as i64 - (k as i64 + 1)).abs() <= 1, "{prof:?}");
    }
    // Starting flat at x = 1 puts the nodes at ln x = atan 2 + nπ.
    let t = integrate_channel(&v, None, 0.0, Window { x_min: 1e-6, x_max: (3.0 * PI).exp() }).unwrap();
    let first: Vec<f64> = t.node_positions.iter().take(3).map(|x| x.ln()).collect();
    for (n, l) in first.iter().enumerate() {
        assert!((l - (2f64.atan() + n as f64 * PI)).abs() < 1e-7, "{first:?}");
    }
}

#[test]
fn disk_channels() {
    let v = disk_well(1.0, 1.0);
    let w = Window::default();
    assert_eq!(count_channel(&v, 0.0, w).unwrap().count, Count::Finite(1));
    assert_eq!(count_channel(&v, 3.0, w).unwrap().count, Count::Finite(0));
    let t = count_total_2d(&v, w).unwrap();
    assert_eq!(t.count, Count::Finite(1));
    assert_eq!(count_total_2d(&Potential::zero(Space::Radial, 2), w).unwrap().count, Count::Finite(0));
}

#[test]
fn delta_shell_node_near_e_squared() {
    let v = make_catalog(&CatalogId::DeltaShell {
        g: 0.5,
        radius: 1.0,
        dimension: 2,
        epsilon: 1e-3,
    })
    .unwrap();
    let t = integrate_channel(&v, Some(0.0), 0.0, Window::default()).unwrap();
    let c = count_channel(&v, 0.0, Window::default()).unwrap();
    assert_eq!(c.count, Count::Finite(1));
    assert_eq!(c.epsilon, Some(1e-3));
    // The node lies beyond the support, so it is counted as the node ahead.
    assert!(t.node_positions.is_empty());
    let far = integrate_channel(&v, Some(0.0), 0.0, Window::default());
    assert!(far.is_ok());
    let prof = node_growth_profile(&v, Some(0.0), &[7.0, 7.5, 100.0]).unwrap();
    assert_eq!(prof, vec![(7.0, 0), (7.5, 1), (100.0, 1)]);
}

#[test]
fn raw_sign_changes_agree() {
    for v in [line_well(4.4 * PI * PI, 1.0), line_well(80.0, 1.5)] {
        let c = count_bound_states_1d(&v, Window::default()).unwrap();
        let shot = shoot(&v, Geometry::Line, prufer::Energy::Zero, Window::default(), false).unwrap();
        let raw = raw_node_count(&v, None, Window::default(), 20_000).unwrap();
        assert_eq!(raw, shot.nodes as u64);
        assert!(c.count.finite().unwrap() >= raw);
    }
    let v = disk_well(60.0, 1.0);
    let shot = shoot(&v, Geometry::Log { m2: 0.0 }, prufer::Energy::Zero, Window::default(), false).unwrap();
    assert_eq!(raw_node_count(&v, Some(0.0), Window::default(), 40_000).unwrap(), shot.nodes as u64);
}

#[test]
fn log_map_preserves_counts() {
    let u = line_well(30.0, 1.0);
    let n = count_bound_states_1d(&u, Window::default()).unwrap().count;
    for r in [0.5, 1.0, 2.0] {
        let v = log_map(&u, r).unwrap();
        assert_eq!(count_channel(&v, 0.0, Window::default()).unwrap().count, n, "R = {r}");
    }
}

#[test]
fn step_halving_is_stable() {
    let v = disk_well(60.0, 1.0);
    let a = integrate_channel_tol(&v, Some(0.0), 0.0, Window::default(), 1e-10).unwrap();
    let b = integrate_channel_tol(&v, Some(0.0), 0.0, Window::default(), 1e-10 / 32.0).unwrap();
    assert_eq!(a.node_count(), b.node_count());
    for (x, y) in a.node_positions.iter().zip(&b.node_positions) {
        assert!((x - y).abs() < 1e-6 * y.abs());
    }
}

#[test]
fn negative_energy_counts_are_monotone() {
    let v = disk_well(60.0, 1.0);
    let w = Window::default();
    let mut last = u64::MAX;
    for e in [0.0, -1.0, -10.0, -30.0, -59.0, -61.0] {
        let n = eigenvalues_below(&v, Some(0.0), e, w).unwrap();
        assert!(n <= last);
        last = n;
    }
    assert_eq!(last, 0);
}

#[test]
fn count_serializes() {
    let c = count_bound_states_1d(&line_well(1.0, 1.0), Window::default()).unwrap();
    let j = serde_json::to_value(&c).unwrap();
    assert_eq!(j["count"], 1);
    assert_eq!(j["classifier"], "COMPACT");
    assert_eq!(serde_json::to_value(Count::Infinite).unwrap(), "infinite");
}
