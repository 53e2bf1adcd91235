//! Named potential families.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{Piece, Planar, Potential, Space};
use crate::error::{Error, Result};
use crate::expr::Expr;

pub const DEFAULT_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LogLogForm {
    /// −1/(4x²) − μ/(4x²(ln x)²)
    First,
    /// −1/(4x²) − (1 + μ/(ln ln x)²)/(4x²(ln x)²)
    Second,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum CatalogId {
    /// Depth `depth` on |x| < radius (line) or r < radius (radial).
    SquareWell { depth: f64, radius: f64, dimension: u32 },
    /// −g δ(r − radius), regularized as a well of width ε and depth g/ε.
    DeltaShell { g: f64, radius: f64, dimension: u32, epsilon: f64 },
    /// −λ/x² for x > X on the line.
    InverseSquareTail { lambda: f64, x0: f64 },
    /// −μ/(4 r² ln²(r/R)) for r ≥ R₀ in two dimensions.
    LogTail { mu: f64, r: f64, r0: f64 },
    LogLogTail { form: LogLogForm, mu: f64, x0: f64 },
    /// −g/(r² (ln r)^α) for r > R.
    LogPowerTail { g: f64, alpha: f64, r: f64 },
    /// Non-overlapping planar delta circles of strength g₀e^{−λn}.
    ShellArray { g0: f64, lambda: f64, count: u32, epsilon: f64 },
    /// Unit disk of depth 0.1 in two dimensions.
    NietoWell,
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Parameter(what.to_string()))
    }
}

fn x() -> Expr {
    Expr::Var('x')
}

fn r() -> Expr {
    Expr::Var('r')
}

/// c / (v² · rest)
fn over_square(c: f64, v: Expr, rest: Option<Expr>) -> Expr {
    let den = Expr::pow(v, 2.0);
    let den = match rest {
        Some(e) => Expr::mul(den, e),
        None => den,
    };
    Expr::div(Expr::num(c), den)
}

fn ln_of_ratio(v: Expr, scale: f64) -> Expr {
    if scale == 1.0 {
        Expr::ln(v)
    } else {
        Expr::ln(Expr::div(v, Expr::num(scale)))
    }
}

impl CatalogId {
    pub fn name(&self) -> &'static str {
        match self {
            CatalogId::SquareWell { .. } => "square_well",
            CatalogId::DeltaShell { .. } => "delta_shell",
            CatalogId::InverseSquareTail { .. } => "inverse_square_tail",
            CatalogId::LogTail { .. } => "log_tail",
            CatalogId::LogLogTail { .. } => "log_log_tail",
            CatalogId::LogPowerTail { .. } => "log_power_tail",
            CatalogId::ShellArray { .. } => "shell_array",
            CatalogId::NietoWell => "nieto_well",
        }
    }

    /// Build from a family name and named parameters; absent parameters take
    /// family defaults.
    pub fn from_params(name: &str, params: &BTreeMap<String, f64>) -> Result<CatalogId> {
        let get = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
        let dim = |d: f64| -> Result<u32> {
            let v = get("dim", d);
            check(v >= 1.0 && v.fract() == 0.0, "dim must be a positive integer")?;
            Ok(v as u32)
        };
        Ok(match name {
            "square_well" => CatalogId::SquareWell {
                depth: get("depth", 1.0),
                radius: get("radius", 1.0),
                dimension: dim(2.0)?,
            },
            "delta_shell" => CatalogId::DeltaShell {
                g: get("g", 1.0),
                radius: get("radius", 1.0),
                dimension: dim(2.0)?,
                epsilon: get("epsilon", DEFAULT_EPSILON),
            },
            "inverse_square_tail" => CatalogId::InverseSquareTail {
                lambda: get("lambda", 1.25),
                x0: get("x0", 1.0),
            },
            "log_tail" => CatalogId::LogTail {
                mu: get("mu", 2.0),
                r: get("r", 1.0),
                r0: get("r0", 2.0),
            },
            "log_log_tail" => CatalogId::LogLogTail {
                form: if get("form", 1.0) == 2.0 {
                    LogLogForm::Second
                } else {
                    LogLogForm::First
                },
                mu: get("mu", 2.0),
                x0: get("x0", 3.0),
            },
            "log_power_tail" => CatalogId::LogPowerTail {
                g: get("g", 1.0),
                alpha: get("alpha", 1.5),
                r: get("r", 2.0),
            },
            "shell_array" => {
                let count = get("count", 3.0);
                check(count >= 1.0 && count.fract() == 0.0, "count must be a positive integer")?;
                CatalogId::ShellArray {
                    g0: get("g0", 1.0),
                    lambda: get("lambda", 1.0),
                    count: count as u32,
                    epsilon: get("epsilon", DEFAULT_EPSILON),
                }
            }
            "nieto_well" => CatalogId::NietoWell,
            _ => return Err(Error::Parameter(format!("unknown catalog family '{name}'"))),
        })
    }
}

/// Centers and radii rₙ = exp(1/gₙ) of the shell array, minimally packed
/// along the positive x axis.
pub(crate) fn shell_array_layout(g0: f64, lambda: f64, count: u32) -> Vec<(f64, f64, f64)> {
    let mut out: Vec<(f64, f64, f64)> = Vec::new();
    for n in 0..count {
        let g = g0 * (-lambda * n as f64).exp();
        let rn = (1.0 / g).exp();
        let xn = match out.last() {
            None => rn,
            Some(&(_, xp, rp)) => xp + rp + rn,
        };
        out.push((g, xn, rn));
    }
    out
}

fn delta_shell(g: f64, radius: f64, dimension: u32, epsilon: f64) -> Result<Potential> {
    check(g >= 0.0 && g.is_finite(), "delta_shell requires g ≥ 0")?;
    check(epsilon > 0.0 && epsilon.is_finite(), "delta_shell requires epsilon > 0")?;
    let (space, lo) = if dimension == 1 {
        (Space::Line, radius - 0.5 * epsilon)
    } else {
        check(radius >= 0.5 * epsilon, "delta_shell requires radius ≥ epsilon/2")?;
        (Space::Radial, radius - 0.5 * epsilon)
    };
    let mut v = Potential::new(
        space,
        dimension,
        vec![Piece::constant(lo, radius + 0.5 * epsilon, -g / epsilon)],
    )?;
    v.epsilon = Some(epsilon);
    Ok(v)
}

/// The exact family member; delta functions are returned regularized.
pub fn make_catalog(id: &CatalogId) -> Result<Potential> {
    let v = match *id {
        CatalogId::SquareWell {
            depth,
            radius,
            dimension,
        } => {
            check(depth >= 0.0 && depth.is_finite(), "square_well requires depth ≥ 0")?;
            check(radius > 0.0 && radius.is_finite(), "square_well requires radius > 0")?;
            check(dimension >= 1, "square_well requires dim ≥ 1")?;
            let (space, lo) = if dimension == 1 {
                (Space::Line, -radius)
            } else {
                (Space::Radial, 0.0)
            };
            if depth == 0.0 {
                Potential::zero(space, dimension)
            } else {
                Potential::new(space, dimension, vec![Piece::constant(lo, radius, -depth)])?
            }
        }
        CatalogId::DeltaShell {
            g,
            radius,
            dimension,
            epsilon,
        } => delta_shell(g, radius, dimension, epsilon)?,
        CatalogId::InverseSquareTail { lambda, x0 } => {
            check(lambda >= 0.0 && lambda.is_finite(), "inverse_square_tail requires λ ≥ 0")?;
            check(x0 > 0.0 && x0.is_finite(), "inverse_square_tail requires X > 0")?;
            Potential::new(
                Space::Line,
                1,
                vec![Piece::new(x0, f64::INFINITY, over_square(-lambda, x(), None))],
            )?
        }
        CatalogId::LogTail { mu, r: rr, r0 } => {
            check(rr > 0.0 && r0 > rr && r0.is_finite(), "log_tail requires R0 > R > 0")?;
            check(mu >= 0.0 && mu.is_finite(), "log_tail requires μ ≥ 0")?;
            let e = over_square(-0.25 * mu, r(), Some(Expr::pow(ln_of_ratio(r(), rr), 2.0)));
            Potential::new(Space::Radial, 2, vec![Piece::new(r0, f64::INFINITY, e)])?
        }
        CatalogId::LogLogTail { form, mu, x0 } => {
            check(mu >= 0.0 && mu.is_finite(), "log_log_tail requires μ ≥ 0")?;
            let lnx2 = || Expr::pow(Expr::ln(x()), 2.0);
            let e = match form {
                LogLogForm::First => {
                    check(x0 > 1.0 && x0.is_finite(), "log_log_tail form 1 requires X > 1")?;
                    Expr::add(
                        over_square(-0.25, x(), None),
                        over_square(-0.25 * mu, x(), Some(lnx2())),
                    )
                }
                LogLogForm::Second => {
                    check(
                        x0 > std::f64::consts::E && x0.is_finite(),
                        "log_log_tail form 2 requires X > e",
                    )?;
                    let lnln2 = Expr::pow(Expr::ln(Expr::ln(x())), 2.0);
                    let bracket = Expr::add(Expr::num(1.0), Expr::div(Expr::num(mu), lnln2));
                    Expr::add(
                        over_square(-0.25, x(), None),
                        Expr::mul(over_square(-0.25, x(), Some(lnx2())), bracket),
                    )
                }
            };
            Potential::new(Space::Line, 1, vec![Piece::new(x0, f64::INFINITY, e)])?
        }
        CatalogId::LogPowerTail { g, alpha, r: rr } => {
            check(g > 0.0 && g.is_finite(), "log_power_tail requires g > 0")?;
            check(alpha > 1.0 && alpha < 2.0, "log_power_tail requires 1 < α < 2")?;
            check(rr > 1.0 && rr.is_finite(), "log_power_tail requires R > 1")?;
            let e = over_square(-g, r(), Some(Expr::pow(Expr::ln(r()), alpha)));
            Potential::new(Space::Radial, 2, vec![Piece::new(rr, f64::INFINITY, e)])?
        }
        CatalogId::ShellArray { .. } => {
            return Err(Error::Unsupported(
                "shell_array is not radial; use make_planar".into(),
            ))
        }
        CatalogId::NietoWell => {
            Potential::new(Space::Radial, 2, vec![Piece::constant(0.0, 1.0, -0.1)])?
        }
    };
    Ok(v.with_step(format!("catalog:{}", id.name())))
}

/// Planar form of any catalog member; radial members are centered at 0.
pub fn make_planar(id: &CatalogId) -> Result<Planar> {
    match *id {
        CatalogId::ShellArray {
            g0,
            lambda,
            count,
            epsilon,
        } => {
            check(g0 > 0.0 && g0.is_finite(), "shell_array requires g0 > 0")?;
            check(lambda > 0.0 && lambda.is_finite(), "shell_array requires λ > 0")?;
            check(count >= 1, "shell_array requires count ≥ 1")?;
            let layout = shell_array_layout(g0, lambda, count);
            if layout.iter().any(|&(_, x, r)| !(x + r).is_finite()) {
                return Err(Error::Parameter(
                    "shell_array radii exp(1/g) overflow; lower count or λ".into(),
                ));
            }
            let mut parts = Vec::new();
            for (g, xn, _) in layout {
                parts.push(Planar::Shifted {
                    base: delta_shell(g, 1.0, 2, epsilon)?,
                    center: [xn, 0.0],
                });
            }
            Ok(Planar::Sum(parts))
        }
        _ => {
            let v = make_catalog(id)?;
            if v.space != Space::Radial || v.dimension != 2 {
                return Err(Error::Unsupported(format!("{} is not a planar potential", id.name())));
            }
            Ok(Planar::Radial(v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_square_tail_values() {
        let v = make_catalog(&CatalogId::InverseSquareTail {
            lambda: 1.25,
            x0: 1.0,
        })
        .unwrap();
        assert_eq!(v.eval(2.0), -1.25 / 4.0);
        assert_eq!(v.eval(0.5), 0.0);
        assert_eq!(v.eval(-3.0), 0.0);
    }

    #[test]
    fn zero_depth_well_is_zero() {
        let v = make_catalog(&CatalogId::SquareWell {
            depth: 0.0,
            radius: 1.0,
            dimension: 2,
        })
        .unwrap();
        assert!(v.is_zero());
        assert_eq!(v.eval(0.5), 0.0);
    }

    #[test]
    fn shell_array_disks_do_not_overlap() {
        let lay = shell_array_layout(1.0, 1.0, 3);
        assert_eq!(lay.len(), 3);
        for (n, &(g, _, r)) in lay.iter().enumerate() {
            assert!((g - (-(n as f64)).exp()).abs() < 1e-15);
            assert!((r - (1.0 / g).exp()).abs() < 1e-9 * r);
        }
        for w in lay.windows(2) {
            let gap = (w[1].1 - w[0].1) - (w[0].2 + w[1].2);
            assert!(gap >= -1e-9 * w[1].1);
        }
        let p = make_planar(&CatalogId::ShellArray {
            g0: 1.0,
            lambda: 1.0,
            count: 3,
            epsilon: 1e-3,
        })
        .unwrap();
        // On the first shell circle, centered at x₀ = e.
        let x0 = lay[0].1;
        assert!(p.eval(x0 + 1.0, 0.0) < -900.0);
    }

    #[test]
    fn parameter_constraints_are_named() {
        let e = make_catalog(&CatalogId::LogTail {
            mu: 2.0,
            r: 2.0,
            r0: 1.0,
        })
        .unwrap_err();
        assert!(e.to_string().contains("R0 > R > 0"));
        let e = make_catalog(&CatalogId::LogPowerTail {
            g: 1.0,
            alpha: 2.5,
            r: 2.0,
        })
        .unwrap_err();
        assert!(e.to_string().contains("1 < α < 2"));
        assert!(CatalogId::from_params("nope", &BTreeMap::new()).is_err());
    }

    #[test]
    fn log_tail_expression() {
        let v = make_catalog(&CatalogId::LogTail {
            mu: 2.0,
            r: 1.0,
            r0: 2.0,
        })
        .unwrap();
        let r = 5.0f64;
        let want = -0.5 / (r * r * r.ln().powi(2));
        assert!((v.eval(r) - want).abs() < 1e-15);
    }

    #[test]
    fn delta_shell_regularization() {
        let v = make_catalog(&CatalogId::DeltaShell {
            g: 0.5,
            radius: 1.0,
            dimension: 2,
            epsilon: 1e-3,
        })
        .unwrap();
        assert_eq!(v.epsilon, Some(1e-3));
        assert!((v.eval(1.0) + 500.0).abs() < 1e-9);
        assert_eq!(v.eval(1.01), 0.0);
    }
}
