//! Bound-state energies by shooting in ln κ, and the two-dimensional
//! ground-state brackets.

use serde::Serialize;

use crate::bounds::is_decreasing_profile;
use crate::counting::{
    count_bound_states_1d, count_channel, eigenvalues_below_ln_kappa, Count, CountResult, Window,
};
use crate::error::{Error, Result};
use crate::expr::TailSeries;
use crate::moments::{moment, negative_moment, weighted, Weight};
use crate::potential::{radial_rearrangement, Potential, Space};
use crate::specfun::{k0, k0_inverse, EULER_GAMMA};

/// Smallest ln κ searched; κ² = e^{2L} stays above 10⁻³⁰⁰.
const LN_KAPPA_FLOOR: f64 = -345.0;
const LN_KAPPA_CEIL: f64 = 350.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub index: usize,
    pub energy: f64,
    pub ln_kappa: f64,
    /// ln κ bracket left by the bisection.
    pub bracket: (f64, f64),
}

impl Eigenvalue {
    pub fn kappa2(&self) -> f64 {
        (2.0 * self.ln_kappa).exp()
    }
}

fn zero_energy_count(v: &Potential, m: Option<f64>) -> Result<CountResult> {
    match v.space {
        Space::Line => count_bound_states_1d(v, Window::default()),
        Space::Radial => count_channel(v, m.unwrap_or(0.0), Window::default()),
    }
}

/// i-th eigenvalue (i = number of nodes) of the line problem or of channel m.
pub fn eigenvalue(v: &Potential, m: Option<f64>, i: usize) -> Result<Eigenvalue> {
    let m = if v.space == Space::Line { None } else { m };
    let available = match zero_energy_count(v, m)?.count {
        Count::Finite(n) => Some(n),
        Count::Infinite => None,
        Count::Marginal { lower, .. } => Some(lower),
    };
    if available.is_some_and(|n| i as u64 >= n) {
        return Err(Error::NotApplicable(format!(
            "no such state: index {i} but {} bound states",
            available.unwrap_or(0)
        )));
    }
    let below = |l: f64| eigenvalues_below_ln_kappa(v, m, l, Window::default());
    let target = i as u64;
    let mut lo = -1.0;
    while below(lo)? <= target {
        lo = (lo * 2.0).max(LN_KAPPA_FLOOR);
        if lo == LN_KAPPA_FLOOR {
            if below(lo)? <= target {
                return Err(Error::NotApplicable(format!(
                    "no such state: index {i} lies above −10⁻³⁰⁰"
                )));
            }
            break;
        }
    }
    let mut hi = lo + 1.0;
    while below(hi)? > target {
        lo = hi;
        hi += (hi.abs()).max(1.0);
        if hi > LN_KAPPA_CEIL {
            return Err(Error::Domain("eigenvalue below the searchable range".into()));
        }
    }
    // below(lo) > i ≥ below(hi)
    for _ in 0..400 {
        if hi - lo <= 5e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let l = 0.5 * (lo + hi);
    Ok(Eigenvalue {
        index: i,
        energy: -(2.0 * l).exp(),
        ln_kappa: l,
        bracket: (lo, hi),
    })
}

/// All negative eigenvalues of the line problem or of channel m, ground state first.
pub fn spectrum(v: &Potential, m: Option<f64>) -> Result<Vec<Eigenvalue>> {
    let m = if v.space == Space::Line { None } else { m };
    let n = match zero_energy_count(v, m)?.count {
        Count::Finite(n) => n,
        _ => return Err(Error::NotApplicable("spectrum needs a finite count".into())),
    };
    (0..n as usize).map(|i| eigenvalue(v, m, i)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyBracket {
    pub g: f64,
    /// exp 2(−X + K₀(1)), when X > K₀(1).
    pub upper_kappa2: Option<f64>,
    /// κ² < (K₀⁻¹(X))², when X > 0.
    pub implicit_upper_kappa2: Option<f64>,
    /// e^{−2γ} R⁻² exp(−4π / (g ∫_{|x|<R} |V| d²x)) at the best R.
    pub lower_kappa2: Option<f64>,
    /// The same with exp(−2 / (g ∫_{|x|<R} |V| d²x)).
    pub lower_kappa2_printed: Option<f64>,
    pub x_value: f64,
    pub r_used: Option<f64>,
    pub euler_gamma: f64,
    pub k0_at_one: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn rearranged(v: &Potential) -> Result<Potential> {
    let vr = if is_decreasing_profile(v) {
        v.negative_part()
    } else {
        radial_rearrangement(v)?
    };
    Ok(vr)
}

/// Radius up to which V < 0 everywhere.
fn attractive_radius(v: &Potential) -> f64 {
    let end = v.support_end();
    let hi = if end.is_finite() { end } else { v.breakpoints().last().copied().unwrap_or(1.0).max(1.0) * 1e3 };
    let n = 8000;
    let mut prev = 0.0;
    for k in 1..=n {
        let r = hi * k as f64 / n as f64;
        if v.eval(r) >= 0.0 {
            let (mut a, mut b) = (prev, r);
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                if v.eval(mid) >= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            return a;
        }
        prev = r;
    }
    hi
}

/// ∫₀^R r |V| dr, the disk integral of |V| divided by 2π.
fn disk_mass(v: &Potential, r: f64) -> f64 {
    let mut pts: Vec<f64> = v.breakpoints().into_iter().filter(|&b| b > 0.0 && b < r).collect();
    pts.insert(0, 0.0);
    pts.push(r);
    crate::quad::integrate_breaks(|x| x * v.eval(x).abs(), &pts, 1e-13).value
}

/// Upper and lower bounds on the ground-state κ² of g·V for a radial 2D V.
pub fn ground_bracket_2d(v: &Potential, g: f64) -> Result<EnergyBracket> {
    if v.space != Space::Radial || v.dimension != 2 {
        return Err(Error::NotApplicable("needs a 2D radial potential".into()));
    }
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::Parameter(format!("coupling must be positive, got {g}")));
    }
    let mut notes = Vec::new();
    let vr = rearranged(v)?;
    let b = negative_moment(v, 1.0)?;
    if b <= 0.0 {
        return Err(Error::Domain("V⁻ ≡ 0: no bound state".into()));
    }
    let ln_plus = |r: f64| if r < 1.0 { -r * r.ln() } else { 0.0 };
    let a = weighted(&vr, Weight::Signed, &ln_plus, &TailSeries::default(), &[1.0], 1e-12)?
        .finite("∫ ln⁺(1/r) V_R r dr")?
        .value;
    let x = (1.0 - g * a) / (g * b);
    let k01 = k0(1.0);
    let upper = if x > k01 {
        Some((2.0 * (-x + k01)).exp())
    } else {
        notes.push(format!("X = {x} ≤ K₀(1): explicit upper bound not applicable"));
        None
    };
    let implicit = if x > 0.0 { Some(k0_inverse(x)?.powi(2)) } else { None };

    let r_max = attractive_radius(v);
    let (lower, printed, r_used) = if r_max <= 0.0 {
        notes.push("V is not strictly attractive on any disk: lower bound not applicable".into());
        (None, None, None)
    } else {
        let objective = |ln_r: f64| {
            let r = ln_r.exp();
            let w = disk_mass(v, r);
            if w <= 0.0 {
                f64::NEG_INFINITY
            } else {
                -2.0 * EULER_GAMMA - 2.0 * ln_r - 2.0 / (g * w)
            }
        };
        let (l0, l1) = ((r_max * 1e-3).ln(), r_max.ln());
        let grid: Vec<f64> = (0..32).map(|k| l0 + (l1 - l0) * k as f64 / 31.0).collect();
        let best = (0..32).max_by(|&i, &j| objective(grid[i]).total_cmp(&objective(grid[j]))).unwrap_or(31);
        let (mut a, mut c) = (grid[best.saturating_sub(1)], grid[(best + 1).min(31)]);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..100 {
            let x1 = c - phi * (c - a);
            let x2 = a + phi * (c - a);
            if objective(x1) >= objective(x2) {
                c = x2;
            } else {
                a = x1;
            }
        }
        let mut ln_r = 0.5 * (a + c);
        if objective(grid[best]) > objective(ln_r) {
            ln_r = grid[best];
        }
        let r = ln_r.exp();
        let w = disk_mass(v, r);
        let printed = -2.0 * EULER_GAMMA - 2.0 * ln_r - 2.0 / (g * 2.0 * std::f64::consts::PI * w);
        (Some(objective(ln_r).exp()), Some(printed.exp()), Some(r))
    };
    Ok(EnergyBracket {
        g,
        upper_kappa2: upper,
        implicit_upper_kappa2: implicit,
        lower_kappa2: lower,
        lower_kappa2_printed: printed,
        x_value: x,
        r_used,
        euler_gamma: EULER_GAMMA,
        k0_at_one: k01,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    /// (g, ln κ²) for each coupling.
    pub points: Vec<(f64, f64)>,
    /// ln κ² ≈ a − c/g
    pub c: f64,
    pub a: f64,
    /// Largest |fit − ln κ²| / |ln κ²|.
    pub residual: f64,
}

/// Fit ln κ² of the ground state of g·V against −c/g.
pub fn exp_small_scaling(shape: &Potential, g_list: &[f64]) -> Result<ScalingFit> {
    if shape.space != Space::Radial || shape.dimension != 2 {
        return Err(Error::NotApplicable("needs a 2D radial potential".into()));
    }
    if g_list.len() < 2 {
        return Err(Error::Parameter("need at least two couplings".into()));
    }
    let signed = moment(shape, 1.0, Weight::Signed, 1e-10)?.finite("∫ r V dr")?.value;
    if !(signed < 0.0) {
        return Err(Error::Domain(format!("shape is not globally attractive (∫ r V dr = {signed})")));
    }
    let mut points = Vec::with_capacity(g_list.len());
    for &g in g_list {
        let e = eigenvalue(&shape.scaled(g), Some(0.0), 0)?;
        points.push((g, 2.0 * e.ln_kappa));
    }
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), &(g, y)| (a + 1.0 / g, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(a, b), &(g, y)| {
        let dx = 1.0 / g - mx;
        (a + dx * (y - my), b + dx * dx)
    });
    let slope = sxy / sxx;
    let a = my - slope * mx;
    let residual = points
        .iter()
        .map(|&(g, y)| ((a + slope / g) - y).abs() / y.abs())
        .fold(0.0, f64::max);
    Ok(ScalingFit {
        points,
        c: -slope,
        a,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{make_catalog, CatalogId};

    fn well(depth: f64, radius: f64, dimension: u32) -> Potential {
        make_catalog(&CatalogId::SquareWell { depth, radius, dimension }).unwrap()
    }

    #[test]
    fn line_well_levels_match_matching_equations() {
        // Half-width 1, depth 10: even levels solve k tan k = κ, odd −k cot k = κ.
        let v = well(10.0, 1.0, 1);
        let s = spectrum(&v, None).unwrap();
        assert_eq!(s.len(), 3);
        for e in &s {
            let kappa = e.ln_kappa.exp();
            let k = (10.0 - kappa * kappa).sqrt();
            let resid = if e.index % 2 == 0 { k * k.tan() - kappa } else { -k / k.tan() - kappa };
            assert!(resid.abs() < 1e-8, "{e:?} {resid}");
        }
        assert!(s.windows(2).all(|w| w[0].energy < w[1].energy));
    }

    #[test]
    fn shallow_disk_in_log_mode() {
        let e = eigenvalue(&well(0.1, 1.0, 2), Some(0.0), 0).unwrap();
        // Root of √(g−κ²) J₁/J₀ = κ K₁/K₀ at g = 0.1 in ln κ.
        assert!((e.ln_kappa + 19.633_020_263_559_594).abs() < 1e-6, "{e:?}");
        let b = ground_bracket_2d(&well(1.0, 1.0, 2), 0.1).unwrap();
        assert!((b.x_value - 19.5).abs() < 1e-9);
        let (lo, hi) = (b.lower_kappa2.unwrap(), b.upper_kappa2.unwrap());
        assert!(lo < e.kappa2() && e.kappa2() < hi);
        assert!((hi / 2.7e-17 - 1.0).abs() < 0.05);
        assert!((lo / 1.3e-18 - 1.0).abs() < 0.05);
        assert!((b.r_used.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn no_state_is_an_error() {
        assert!(eigenvalue(&Potential::zero(Space::Line, 1), None, 0).is_err());
        assert!(eigenvalue(&well(1.0, 1.0, 2), Some(0.0), 1).is_err());
    }

    #[test]
    fn weak_coupling_fit() {
        let fit = exp_small_scaling(&well(1.0, 1.0, 2), &[0.05, 0.1, 0.2]).unwrap();
        assert!(fit.residual < 0.05, "{fit:?}");
        assert!(fit.c > 3.6 && fit.c < 4.4, "{fit:?}");
        assert!(exp_small_scaling(&well(1.0, 1.0, 2).scaled(1.0).negative_part(), &[0.1, 0.2]).is_err());
    }
}
