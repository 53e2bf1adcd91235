//! Invariant suites run by `verify`.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::GridLevel;
use crate::bounds::{bound_report, i_of_r, lieb_thirring_check, newton_seto, r_min, soundness_violations, BoundOptions};
use crate::counting::{count_bound_states_1d, count_channel, integrate_channel, Window};
use crate::energy::{eigenvalue, ground_bracket_2d};
use crate::error::Result;
use crate::oracle::{fd_count_1d, fd_count_radial, GridSpec};
use crate::potential::{make_catalog, CatalogId, Piece, Potential, Space};
use crate::specfun::check_k0_bounds;
use crate::transform::log_map;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Appendix3,
    Brackets,
    Oracle,
    Transform,
    LiebThirring,
    K0,
    Soundness,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Appendix3,
        Suite::Brackets,
        Suite::Oracle,
        Suite::Transform,
        Suite::LiebThirring,
        Suite::K0,
        Suite::Soundness,
    ];

    fn name(self) -> &'static str {
        match self {
            Suite::Appendix3 => "appendix3",
            Suite::Brackets => "brackets",
            Suite::Oracle => "oracle",
            Suite::Transform => "transform",
            Suite::LiebThirring => "lieb-thirring",
            Suite::K0 => "k0",
            Suite::Soundness => "soundness",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: usize,
    /// Counterexamples, one object per failed check.
    pub failures: Vec<Value>,
}

struct Tally {
    checks: usize,
    failures: Vec<Value>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> Value) {
        self.checks += 1;
        if !ok {
            self.failures.push(detail());
        }
    }

    fn error(&mut self, case: &str, e: crate::error::Error) {
        self.checks += 1;
        self.failures.push(json!({ "case": case, "error": e.to_string() }));
    }
}

fn catalog(id: CatalogId) -> Potential {
    make_catalog(&id).expect("catalog parameters are valid")
}

fn well(depth: f64, radius: f64, dimension: u32) -> Potential {
    catalog(CatalogId::SquareWell { depth, radius, dimension })
}

fn constant_pieces(space: Space, dimension: u32, pieces: &[(f64, f64, f64)]) -> Potential {
    let pieces = pieces.iter().map(|&(a, b, v)| Piece::constant(a, b, v)).collect();
    Potential::new(space, dimension, pieces).expect("pieces are ordered")
}

/// Finite-count potentials on the line and in radial channels: wells,
/// annuli, regularized deltas and truncated tails.
pub fn reference_catalog() -> Vec<(&'static str, Potential)> {
    vec![
        ("line well depth 1", well(1.0, 1.0, 1)),
        ("line well depth 4.4π²", well(4.4 * std::f64::consts::PI.powi(2), 1.0, 1)),
        ("line well depth 50 half-width 0.5", well(50.0, 0.5, 1)),
        (
            "line delta g 2",
            catalog(CatalogId::DeltaShell { g: 2.0, radius: 0.0, dimension: 1, epsilon: 1e-3 }),
        ),
        (
            "line inverse-square tail truncated at 20",
            Potential::new(
                Space::Line,
                1,
                vec![Piece::new(1.0, 20.0, crate::expr::parse("-1.25/x^2").expect("valid"))],
            )
            .expect("valid"),
        ),
        ("disk depth 1", well(1.0, 1.0, 2)),
        ("disk depth 25", well(25.0, 1.0, 2)),
        ("disk depth 100 radius 0.5", well(100.0, 0.5, 2)),
        ("annulus 1..2 depth 10", constant_pieces(Space::Radial, 2, &[(1.0, 2.0, -10.0)])),
        (
            "delta shell g 0.5",
            catalog(CatalogId::DeltaShell { g: 0.5, radius: 1.0, dimension: 2, epsilon: 1e-3 }),
        ),
        ("ball depth 4", well(4.0, 1.0, 3)),
        ("ball depth 30 radius 1.5", well(30.0, 1.5, 3)),
    ]
}

/// Σ over channels of the finite-difference count, with multiplicity 2 for m ≥ 1.
fn fd_total(v: &Potential) -> Result<u64> {
    let mut total = 0;
    for m in 0..200 {
        let grid = GridSpec::for_channel(v, m as f64)?;
        let n = fd_count_radial(v, v.dimension, m as f64, &grid)?.value()?;
        if n == 0 {
            break;
        }
        total += if m == 0 || v.dimension == 1 { n } else { 2 * n };
    }
    Ok(total)
}

fn random_profile(rng: &mut ChaCha8Rng) -> Potential {
    let n = rng.gen_range(1..=5);
    let mut r = 0.0;
    let mut pieces = Vec::new();
    for k in 0..n {
        let width = (rng.gen_range(-3.0f64..1.5)).exp();
        let depth = if k > 0 && rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.05..5.0) };
        if depth > 0.0 {
            pieces.push((r, r + width, -depth));
        }
        r += width;
    }
    constant_pieces(Space::Radial, 2, &pieces)
}

fn appendix3(trials: usize, seed: u64) -> Tally {
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..trials {
        let v = random_profile(&mut rng);
        let case = format!("trial {k}");
        let res = (|| -> Result<(f64, f64)> {
            let (r, _) = r_min(&v)?;
            Ok((newton_seto(&v)?, i_of_r(&v, r)?))
        })();
        match res {
            Ok((j, i)) => t.check(j < i && i < 2.0 * j, || {
                json!({ "case": case, "J": j, "I": i, "potential": v.to_json() })
            }),
            Err(e) => t.error(&case, e),
        }
    }
    t
}

fn brackets() -> Tally {
    let mut t = Tally::new();
    let shapes = [
        ("unit disk", well(1.0, 1.0, 2)),
        ("disk radius 2", well(1.0, 2.0, 2)),
        ("two steps", constant_pieces(Space::Radial, 2, &[(0.0, 0.5, -2.0), (0.5, 1.5, -0.5)])),
    ];
    for (name, shape) in &shapes {
        for g in [0.05, 0.1, 0.2] {
            let case = format!("{name}, g = {g}");
            let res = (|| -> Result<_> {
                let b = ground_bracket_2d(shape, g)?;
                let e = eigenvalue(&shape.scaled(g), Some(0.0), 0)?;
                Ok((b, e.kappa2()))
            })();
            match res {
                Ok((b, k2)) => {
                    let lo_ok = b.lower_kappa2.is_none_or(|lo| lo <= k2);
                    let hi_ok = b.upper_kappa2.is_none_or(|hi| k2 <= hi);
                    t.check(lo_ok && hi_ok, || json!({ "case": case, "kappa2": k2, "bracket": b }));
                }
                Err(e) => t.error(&case, e),
            }
        }
    }
    t
}

fn oracle() -> Tally {
    let mut t = Tally::new();
    for (name, v) in reference_catalog() {
        let res = (|| -> Result<(u64, u64)> {
            Ok(match v.space {
                Space::Line => {
                    let c = count_bound_states_1d(&v, Window::default())?.count;
                    let fd = fd_count_1d(&v, &GridSpec::for_line(&v)?)?.value()?;
                    (c.finite().unwrap_or(u64::MAX), fd)
                }
                Space::Radial if v.dimension == 2 => {
                    let c = crate::counting::count_total_2d(&v, Window::default())?.count;
                    (c.finite().unwrap_or(u64::MAX), fd_total(&v)?)
                }
                Space::Radial => {
                    let c = count_channel(&v, 0.0, Window::default())?.count;
                    let fd = fd_count_radial(&v, v.dimension, 0.0, &GridSpec::for_channel(&v, 0.0)?)?.value()?;
                    (c.finite().unwrap_or(u64::MAX), fd)
                }
            })
        })();
        match res {
            Ok((a, b)) => t.check(a == b, || json!({ "case": name, "prufer": a, "finite_difference": b })),
            Err(e) => t.error(name, e),
        }
    }
    t
}

fn transform_suite() -> Tally {
    let mut t = Tally::new();
    for (depth, a) in [(3.0, 1.0), (30.0, 1.0), (80.0, 0.7)] {
        let u = well(depth, a, 1);
        for scale in [0.5, 1.0, 3.0] {
            let case = format!("line well {depth}/{a}, R = {scale}");
            let res = (|| -> Result<(Vec<f64>, Vec<f64>)> {
                let v = log_map(&u, scale)?;
                let nu = integrate_channel(&u, None, 0.0, Window::default())?.node_positions;
                let nv = integrate_channel(&v, Some(0.0), 0.0, Window::default())?.node_positions;
                Ok((nu.iter().map(|x| scale * x.exp()).collect(), nv))
            })();
            match res {
                Ok((want, got)) => {
                    let ok = want.len() == got.len()
                        && want.iter().zip(&got).all(|(a, b)| (a - b).abs() <= 1e-6 * a.abs());
                    t.check(ok, || json!({ "case": case, "expected": want, "found": got }));
                }
                Err(e) => t.error(&case, e),
            }
        }
    }
    t
}

fn lieb_thirring() -> Tally {
    let mut t = Tally::new();
    let delta = catalog(CatalogId::DeltaShell { g: 2.0, radius: 0.0, dimension: 1, epsilon: 1e-4 });
    match lieb_thirring_check(&delta) {
        Ok(lt) => t.check((lt.ratio() - 1.0).abs() < 1e-3 && lt.ratio() <= 1.0, || {
            json!({ "case": "delta g 2", "result": lt })
        }),
        Err(e) => t.error("delta g 2", e),
    }
    for (depth, a) in [(1.0, 1.0), (4.0 * std::f64::consts::PI.powi(2), 1.0), (50.0, 0.5), (200.0, 2.0)] {
        let case = format!("line well {depth}/{a}");
        match lieb_thirring_check(&well(depth, a, 1)) {
            Ok(lt) => t.check(lt.ratio() < 1.0, || json!({ "case": case, "result": lt })),
            Err(e) => t.error(&case, e),
        }
    }
    t
}

fn k0(grid: GridLevel) -> Tally {
    let mut t = Tally::new();
    let (nx, na) = match grid {
        GridLevel::Coarse => (60, 20),
        GridLevel::Fine => (400, 100),
    };
    for i in 0..nx {
        let x = 10f64.powf(-4.0 + 6.5 * i as f64 / (nx - 1) as f64);
        for j in 1..=na {
            let a = j as f64 / na as f64;
            match check_k0_bounds(x, a) {
                Ok(c) => t.check(c.holds, || json!({ "x": x, "a": a, "margins": c })),
                Err(e) => t.error(&format!("x = {x}, a = {a}"), e),
            }
        }
    }
    t
}

fn soundness() -> Tally {
    let mut t = Tally::new();
    for (name, v) in reference_catalog() {
        let report = bound_report(&v, &BoundOptions::default());
        match soundness_violations(&v, &report, Window::default()) {
            Ok(bad) => t.check(bad.is_empty(), || json!({ "case": name, "violations": bad })),
            Err(e) => t.error(name, e),
        }
    }
    t
}

pub fn run_suite(suite: Suite, trials: usize, seed: u64, grid: GridLevel) -> SuiteReport {
    let t = match suite {
        Suite::Appendix3 => appendix3(trials, seed),
        Suite::Brackets => brackets(),
        Suite::Oracle => oracle(),
        Suite::Transform => transform_suite(),
        Suite::LiebThirring => lieb_thirring(),
        Suite::K0 => k0(grid),
        Suite::Soundness => soundness(),
    };
    SuiteReport {
        suite: suite.name().to_string(),
        passed: t.failures.is_empty(),
        checks: t.checks,
        failures: t.failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::Count;

    #[test]
    fn catalog_counts_are_finite() {
        for (name, v) in reference_catalog() {
            let c = match v.space {
                Space::Line => count_bound_states_1d(&v, Window::default()).unwrap().count,
                _ => count_channel(&v, 0.0, Window::default()).unwrap().count,
            };
            assert!(matches!(c, Count::Finite(_)), "{name}: {c:?}");
        }
    }
}
