//! One test per acceptance criterion. Each prints a single PASS/FAIL line.

use std::f64::consts::{E, PI};
use std::time::Instant;

use boundcount::bounds::{
    bound_report, i_of_r, newton_seto, planar_report, r_min, soundness_violations, BoundOptions, FormulaId,
    NonCentralOptions,
};
use boundcount::cli::{reference_catalog, run_suite, GridLevel, Suite};
use boundcount::counting::{
    classify_channel, classify_tail, count_bound_states_1d, count_total_2d, integrate_channel,
    node_growth_profile, Count, TailClass, Window,
};
use boundcount::energy::{eigenvalue, exp_small_scaling, ground_bracket_2d};
use boundcount::oracle::{default_lattice, disk_well_total, fd_count_2d_lattice};
use boundcount::potential::{make_catalog, CatalogId, LogLogForm, Piece, Planar, Potential, Space};
use boundcount::regge::{count_via_trajectories, identity_check, slope_check};
use boundcount::specfun::{bessel_jy, k0};

fn report(n: u32, name: &str, ok: bool, detail: String) {
    println!("criterion {n:>2} {name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn cat(id: CatalogId) -> Potential {
    make_catalog(&id).unwrap()
}

fn disk(depth: f64, radius: f64) -> Potential {
    cat(CatalogId::SquareWell { depth, radius, dimension: 2 })
}

fn planar_catalog() -> Vec<Potential> {
    reference_catalog()
        .into_iter()
        .map(|(_, v)| v)
        .filter(|v| v.space == Space::Radial && v.dimension == 2)
        .chain([cat(CatalogId::NietoWell)])
        .collect()
}

#[test]
fn criterion_01_node_theorem_vs_oracle() {
    let start = Instant::now();
    let r = run_suite(Suite::Oracle, 0, 0, GridLevel::Coarse);
    let secs = start.elapsed().as_secs_f64();
    let ok = r.passed && r.checks == 12 && secs < 10.0;
    report(1, "node theorem vs oracle", ok, format!("{} potentials, {} mismatches, {secs:.2} s", r.checks, r.failures.len()));
}

#[test]
fn criterion_02_sandwich_inequality() {
    let start = Instant::now();
    let r = run_suite(Suite::Appendix3, 200, 7, GridLevel::Coarse);
    let v = disk(1.0, 1.0);
    let j = newton_seto(&v).unwrap();
    let (rm, _) = r_min(&v).unwrap();
    let i = i_of_r(&v, rm).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let anchors = (j - 0.125).abs() < 1e-6 && (i - 2f64.ln() / 4.0).abs() < 1e-6;
    let ok = r.passed && r.checks == 200 && anchors && secs < 30.0;
    report(
        2,
        "sandwich inequality",
        ok,
        format!("{} profiles, {} violations, unit well J = {j:.9}, I(R_min) = {i:.9}, {secs:.2} s", r.checks, r.failures.len()),
    );
}

#[test]
fn criterion_03_bound_soundness() {
    let mut cases: Vec<Potential> = reference_catalog().into_iter().map(|(_, v)| v).collect();
    cases.push(cat(CatalogId::NietoWell));
    cases.push(cat(CatalogId::SquareWell { depth: 4.4 * PI * PI, radius: 1.0, dimension: 2 }));
    let mut violations = Vec::new();
    let mut applicable = 0;
    for v in &cases {
        for m in [1.0, 2.0] {
            let rep = bound_report(v, &BoundOptions { m, ..BoundOptions::default() });
            applicable += rep.entries.values().filter(|e| e.applicable).count();
            violations.extend(soundness_violations(v, &rep, Window::default()).unwrap());
        }
    }
    report(
        3,
        "bound soundness",
        violations.is_empty(),
        format!("{} potentials, {applicable} applicable evaluations, {} violations", cases.len(), violations.len()),
    );
}

/// √t [A J₂(4√g t^{1/4}) + B Y₂(4√g t^{1/4})] with t = ln r.
fn closed_form(r: f64, a: f64, b: f64) -> f64 {
    let t = r.ln();
    let z = 4.0 * t.powf(0.25);
    let jy = bessel_jy(2.0, z).unwrap();
    t.sqrt() * (a * jy.j.value + b * jy.y.value)
}

fn basis(r: f64) -> (f64, f64) {
    (closed_form(r, 1.0, 0.0), closed_form(r, 0.0, 1.0))
}

#[test]
fn criterion_04_exact_bessel_solution() {
    let v = cat(CatalogId::LogPowerTail { g: 1.0, alpha: 1.5, r: 2.0 });
    let window = Window { x_max: 1e12, ..Window::default() };
    let t = integrate_channel(&v, Some(0.0), 0.0, window).unwrap();
    let vals = t.values();
    let pts: Vec<(f64, f64)> = t.abscissae.iter().cloned().zip(vals).filter(|(r, _)| *r >= 2.0).collect();
    let (r1, y1) = pts[pts.len() / 3];
    let (r2, y2) = pts[2 * pts.len() / 3];
    let ((j1, yy1), (j2, yy2)) = (basis(r1), basis(r2));
    let det = j1 * yy2 - j2 * yy1;
    let a = (y1 * yy2 - y2 * yy1) / det;
    let b = (j1 * y2 - j2 * y1) / det;
    let scale = pts.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    let fit_err = pts.iter().map(|&(r, y)| (closed_form(r, a, b) - y).abs()).fold(0.0, f64::max) / scale;

    // Zeros of the fitted combination in z = 4 t^{1/4}, mapped back to r.
    let f = |z: f64| {
        let jy = bessel_jy(2.0, z).unwrap();
        a * jy.j.value + b * jy.y.value
    };
    let z_of = |r: f64| 4.0 * r.ln().powf(0.25);
    let r_of = |z: f64| (z / 4.0).powi(4).exp();
    let (z_lo, z_hi) = (z_of(2.0), z_of(window.x_max));
    let mut zeros = Vec::new();
    let steps = 4000;
    for k in 0..steps {
        let (mut lo, mut hi) = (
            z_lo + (z_hi - z_lo) * k as f64 / steps as f64,
            z_lo + (z_hi - z_lo) * (k + 1) as f64 / steps as f64,
        );
        if f(lo) * f(hi) < 0.0 {
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if f(lo) * f(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            zeros.push(r_of(0.5 * (lo + hi)));
        }
    }
    let nodes: Vec<f64> = t.node_positions.iter().cloned().filter(|&r| r >= 2.0).collect();
    let node_err = nodes
        .iter()
        .zip(&zeros)
        .map(|(n, z)| (n - z).abs() / z)
        .fold(0.0, f64::max);
    let ok = fit_err < 1e-6 && nodes.len() == zeros.len() && !nodes.is_empty() && node_err < 1e-5;
    report(
        4,
        "exact Bessel solution",
        ok,
        format!("fit error {fit_err:.2e}, {} nodes vs {} zeros, node error {node_err:.2e}", nodes.len(), zeros.len()),
    );
}

/// First node of the zero-energy m = 0 solution, located by bisection on the window.
fn first_node(v: &Potential) -> f64 {
    let count = |w: f64| node_growth_profile(v, Some(0.0), &[w]).unwrap()[0].1;
    let (mut lo, mut hi) = (1.5, 100.0);
    assert_eq!(count(lo), 0);
    assert!(count(hi) >= 1);
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if count(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn criterion_05_delta_shell_node() {
    let shell = |epsilon| cat(CatalogId::DeltaShell { g: 0.5, radius: 1.0, dimension: 2, epsilon });
    let target = E * E;
    let err3 = (first_node(&shell(1e-3)) - target).abs() / target;
    let err4 = (first_node(&shell(1e-4)) - target).abs() / target;
    let ok = err3 < 0.01 && err4 < err3;
    report(5, "delta-shell node", ok, format!("relative error {err3:.2e} at ε = 1e-3, {err4:.2e} at ε = 1e-4"));
}

#[test]
fn criterion_06_infinitude_growth() {
    let v = cat(CatalogId::InverseSquareTail { lambda: 1.25, x0: 1.0 });
    let windows: Vec<f64> = (1..=5).map(|k| (k as f64 * PI).exp()).collect();
    let prof = node_growth_profile(&v, None, &windows).unwrap();
    let growth_ok = prof.iter().enumerate().all(|(k, &(_, n))| (n as i64 - (k as i64 + 1)).abs() <= 1);

    let infinite = [
        ("inverse square λ = 5/4", cat(CatalogId::InverseSquareTail { lambda: 1.25, x0: 1.0 })),
        ("log-log first form", cat(CatalogId::LogLogTail { form: LogLogForm::First, mu: 2.0, x0: 3.0 })),
        ("log-log second form", cat(CatalogId::LogLogTail { form: LogLogForm::Second, mu: 2.0, x0: 3.0 })),
        ("log tail μ = 2", cat(CatalogId::LogTail { mu: 2.0, r: 1.0, r0: 2.0 })),
        ("log-power tail", cat(CatalogId::LogPowerTail { g: 1.0, alpha: 1.5, r: 2.0 })),
    ];
    let class = |v: &Potential| match v.space {
        Space::Line => classify_tail(v).class,
        Space::Radial => classify_channel(v, 0.0).unwrap().class,
    };
    let mut bad: Vec<String> = infinite
        .iter()
        .filter(|(_, v)| class(v) != TailClass::Infinite)
        .map(|(n, _)| n.to_string())
        .collect();
    let sub = cat(CatalogId::InverseSquareTail { lambda: 0.125, x0: 1.0 });
    let sub_count = count_bound_states_1d(&sub, Window::default()).unwrap().count;
    if class(&sub) != TailClass::Finite || !matches!(sub_count, Count::Finite(_)) {
        bad.push("λ = 1/8".into());
    }
    let counts: Vec<u64> = prof.iter().map(|p| p.1).collect();
    report(
        6,
        "infinitude growth",
        growth_ok && bad.is_empty(),
        format!("nodes in [1, e^kπ] = {counts:?}, misclassified {bad:?}"),
    );
}

#[test]
fn criterion_07_energy_bracket() {
    let shape = disk(1.0, 1.0);
    let g = 0.1;
    let k2 = eigenvalue(&shape.scaled(g), Some(0.0), 0).unwrap().kappa2();
    let b = ground_bracket_2d(&shape, g).unwrap();
    let (lo, hi) = (b.lower_kappa2.unwrap(), b.upper_kappa2.unwrap());
    let log_close = |x: f64, want: f64| (x.ln() - want.ln()).abs() <= 0.05 * want.ln().abs();
    let endpoints_ok = log_close(lo, 1.3e-18) && log_close(hi, 2.7e-17);
    let inside = (1.3e-18f64).ln() * 1.05 <= k2.ln() && k2.ln() <= (2.7e-17f64).ln() * 0.95 && lo <= k2 && k2 <= hi;
    let order_ok = k2.log10().floor() == -18.0;
    let fit = exp_small_scaling(&shape, &[0.05, 0.1, 0.2]).unwrap();
    let ok = endpoints_ok && inside && order_ok && fit.residual < 0.05;
    report(
        7,
        "energy bracket",
        ok,
        format!("κ² = {k2:.3e} in [{lo:.3e}, {hi:.3e}], fit c = {:.3}, residual {:.2e}", fit.c, fit.residual),
    );
}

#[test]
fn criterion_08_lieb_thirring() {
    let r = run_suite(Suite::LiebThirring, 0, 0, GridLevel::Coarse);
    let mut below = 0;
    let mut bad = Vec::new();
    for (name, v) in reference_catalog().into_iter().filter(|(_, v)| v.space == Space::Line) {
        let lt = boundcount::bounds::lieb_thirring_check(&v).unwrap();
        if lt.ratio() < 1.0 {
            below += 1;
        } else {
            bad.push(name);
        }
    }
    let ok = r.passed && bad.is_empty();
    report(
        8,
        "Lieb-Thirring optimality",
        ok,
        format!("suite {} checks, {} failures; {below} line catalog cases below 1, above: {bad:?}", r.checks, r.failures.len()),
    );
}

#[test]
fn criterion_09_regge_consistency() {
    let mut count_bad = Vec::new();
    for v in planar_catalog() {
        let via = count_via_trajectories(&v).unwrap().count;
        let direct = count_total_2d(&v, Window::default()).unwrap().count.finite().unwrap();
        if via != direct {
            count_bad.push((v.descriptor(), via, direct));
        }
    }
    let v = disk(25.0, 1.0);
    let mut slope_gap: f64 = 0.0;
    for (i, m) in [(0, 0.5), (0, 1.0), (0, 1.5), (1, 0.5)] {
        slope_gap = slope_gap.max(slope_check(&v, i, m).unwrap().relative_gap());
    }
    let rows = identity_check(&v).unwrap();
    let shifted_gap = rows.iter().map(|r| (r.m_traced - r.m_shifted).abs()).fold(0.0, f64::max);
    let direct_gap = rows.iter().map(|r| (r.m_traced - r.m_direct).abs()).fold(0.0, f64::max);
    let ok = count_bad.is_empty() && slope_gap < 1e-4 && shifted_gap < 1e-6;
    report(
        9,
        "Regge consistency",
        ok,
        format!(
            "count mismatches {count_bad:?}, slope gap {slope_gap:.2e}, |m_i − √(1/4+|e_i|)| = {shifted_gap:.2e}, |m_i − √|e_i|| = {direct_gap:.2e}"
        ),
    );
}

#[test]
fn criterion_10_semiclassical_trend() {
    let start = Instant::now();
    let shape = disk(1.0, 1.0);
    let ratio = |g: f64| {
        let n = count_total_2d(&shape.scaled(g), Window::default()).unwrap().count.finite().unwrap();
        n as f64 / (g / 4.0)
    };
    let ratios: Vec<(f64, f64)> = [100.0, 200.0, 400.0].iter().map(|&g| (g, ratio(g))).collect();
    let closed: Vec<u64> = [100.0, 200.0, 400.0].iter().map(|&g| disk_well_total(g, 1.0).unwrap()).collect();
    let (r100, r400) = (ratios[0].1, ratios[2].1);
    let secs = start.elapsed().as_secs_f64();
    let ok = (0.6..=1.1).contains(&r400) && r100 < r400 && (1.0 - r400).abs() < (1.0 - r100).abs() && secs < 120.0;
    report(10, "semiclassical trend", ok, format!("N(g)/(g/4) = {ratios:?}, closed-form N = {closed:?}, {secs:.2} s"));
}

#[test]
fn criterion_11_k0_k1_inequalities() {
    let r = run_suite(Suite::K0, 0, 0, GridLevel::Fine);
    let at_one = k0(1.0);
    let ok = r.passed && (at_one - 0.4210).abs() <= 1e-4;
    report(11, "K0/K1 inequalities", ok, format!("{} grid points, {} negative margins, K0(1) = {at_one:.6}", r.checks, r.failures.len()));
}

fn conjecture_rhs(rep: &boundcount::bounds::BoundReport) -> f64 {
    rep.get(FormulaId::ConjectureRhs).unwrap().value
}

#[test]
fn criterion_12_conjecture_harness() {
    let opts = BoundOptions::default();
    let mut radial_bad = Vec::new();
    for v in planar_catalog() {
        let rep = bound_report(&v, &opts);
        let (rhs, total) = (conjecture_rhs(&rep), rep.get(FormulaId::Total2d).unwrap().value);
        let decreasing = v.pieces.len() == 1 && v.pieces[0].from == 0.0;
        let holds = if decreasing { (rhs - total).abs() <= 1e-9 * total } else { rhs >= total - 1e-9 * total };
        if !holds {
            radial_bad.push((v.descriptor(), rhs, total));
        }
    }

    let shifted = |depth: f64, radius: f64, c: [f64; 2]| Planar::Shifted {
        base: disk(depth, radius),
        center: c,
    };
    let annulus = Potential::new(Space::Radial, 2, vec![Piece::constant(1.0, 1.5, -6.0)]).unwrap();
    let non_central = vec![
        ("shifted disk", shifted(20.0, 1.0, [1.5, 0.0])),
        ("two disks", Planar::Sum(vec![shifted(10.0, 1.0, [-1.5, 0.0]), shifted(10.0, 1.0, [1.5, 0.0])])),
        ("disk and offset annulus", Planar::Sum(vec![shifted(10.0, 0.7, [0.0, 0.0]), Planar::Shifted { base: annulus, center: [0.5, 0.5] }])),
        ("three small disks", Planar::Sum(vec![shifted(30.0, 0.5, [0.0, 0.0]), shifted(30.0, 0.5, [1.5, 0.0]), shifted(30.0, 0.5, [0.0, 1.5])])),
        ("overlapping disks", Planar::Sum(vec![shifted(8.0, 1.0, [-0.5, 0.0]), shifted(8.0, 1.0, [0.5, 0.0])])),
    ];
    let mut lines = Vec::new();
    let mut counterexamples = 0;
    for (name, p) in &non_central {
        let rep = planar_report(p, &opts, &NonCentralOptions::default());
        let rhs = conjecture_rhs(&rep);
        let n = fd_count_2d_lattice(p, &default_lattice(p, 128)).unwrap().value().unwrap();
        if n as f64 > rhs || rhs.is_nan() {
            counterexamples += 1;
            println!("conjecture counterexample: {name}: lattice count {n} > {rhs}");
        }
        lines.push(format!("{name}: {n} ≤ {rhs:.3}"));
    }
    report(
        12,
        "conjecture harness",
        radial_bad.is_empty(),
        format!("radial mismatches {radial_bad:?}; lattice {}; {counterexamples} counterexamples", lines.join(", ")),
    );
}
