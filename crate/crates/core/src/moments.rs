//! Weighted integrals of a potential: ∫ |x|^k w(V) over the domain.

use crate::error::Result;
use crate::expr::{Monomial, TailSeries};
use crate::potential::{Potential, Space};
use crate::quad::{integrate, integrate_log, integrate_tail_series, QuadResult};

/// Beyond this radius tails are integrated from their asymptotic series.
const R_CUT: f64 = 1e30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// V⁻ = max(−V, 0)
    Negative,
    /// |V|
    Abs,
    /// V itself
    Signed,
}

impl Weight {
    fn apply(self, v: f64) -> f64 {
        match self {
            Weight::Negative => (-v).max(0.0),
            Weight::Abs => v.abs(),
            Weight::Signed => v,
        }
    }

    fn apply_series(self, s: TailSeries) -> TailSeries {
        let sign = s.leading().map_or(0.0, |m| m.c.signum());
        match self {
            Weight::Signed => s,
            Weight::Abs => s.scale(sign),
            Weight::Negative if sign < 0.0 => s.scale(-1.0),
            Weight::Negative => TailSeries::default(),
        }
    }
}

/// ∫ over a half-line tail [from, ∞) of t^k w(V(±t))^power.
fn tail(v: &Potential, from: f64, k: f64, w: Weight, power: f64, left: bool, tol: f64) -> Result<QuadResult> {
    let sign = if left { -1.0 } else { 1.0 };
    let f = |t: f64| t.powf(k) * w.apply(v.eval(sign * t)).powf(power);
    let mut out = QuadResult::ZERO;
    let mut a = from;
    if a < 1.0 {
        out = out.plus(integrate(f, a, 1.0, tol));
        a = 1.0;
    }
    out = out.plus(integrate_log(f, a, R_CUT.max(a), tol));
    match v.tail_series(left) {
        Some(s) => {
            let s = w.apply_series(s);
            let s = if s.is_zero() {
                s
            } else {
                s.powf(power)
                    .ok_or_else(|| crate::error::Error::Domain("tail series has no real power".into()))?
            };
            let s = s.mul_monomial(Monomial { c: 1.0, p: k, q: 0.0, s: 0.0 });
            Ok(out.plus(integrate_tail_series(&s, R_CUT.max(a), tol)?))
        }
        None => Ok(out.plus(integrate(f, R_CUT.max(a), f64::INFINITY, tol).finite("tail")?)),
    }
}

/// ∫₀^∞ r^k w(V(r)) dr for radial potentials, ∫ |x|^k w(V(x)) dx on the line.
pub fn moment(v: &Potential, k: f64, w: Weight, tol: f64) -> Result<QuadResult> {
    power_moment(v, k, w, 1.0, tol)
}

/// As `moment` with w(V) raised to `power`.
pub fn power_moment(v: &Potential, k: f64, w: Weight, power: f64, tol: f64) -> Result<QuadResult> {
    let breaks = v.breakpoints();
    let f = |x: f64| x.abs().powf(k) * w.apply(v.eval(x)).powf(power);
    let mut out = QuadResult::ZERO;
    let (lo, hi) = match v.space {
        Space::Radial => (0.0, breaks.last().copied().unwrap_or(0.0).max(0.0)),
        Space::Line => (
            breaks.first().copied().unwrap_or(0.0),
            breaks.last().copied().unwrap_or(0.0),
        ),
    };
    let mut pts: Vec<f64> = breaks.into_iter().filter(|&b| b > lo && b < hi).collect();
    pts.insert(0, lo);
    pts.push(hi);
    for win in pts.windows(2) {
        if win[1] > win[0] {
            out = out.plus(integrate(f, win[0], win[1], tol));
        }
    }
    if v.has_right_tail() {
        if hi >= 0.0 {
            out = out.plus(tail(v, hi, k, w, power, false, tol)?);
        } else {
            out = out.plus(integrate(f, hi, 0.0, tol));
            out = out.plus(tail(v, 0.0, k, w, power, false, tol)?);
        }
    }
    if v.space == Space::Line && v.has_left_tail() {
        if lo <= 0.0 {
            out = out.plus(tail(v, -lo, k, w, power, true, tol)?);
        } else {
            out = out.plus(integrate(f, 0.0, lo, tol));
            out = out.plus(tail(v, 0.0, k, w, power, true, tol)?);
        }
    }
    Ok(out)
}

/// ∫₀^∞ f(r) w(V(r)) dr for a radial potential, with `f_tail` the
/// asymptotic series of f used beyond 10³⁰ and extra split points where f
/// has a kink.
pub fn weighted(
    v: &Potential,
    w: Weight,
    f: &dyn Fn(f64) -> f64,
    f_tail: &TailSeries,
    kinks: &[f64],
    tol: f64,
) -> Result<QuadResult> {
    let g = |r: f64| {
        let vr = w.apply(v.eval(r));
        if vr == 0.0 {
            0.0
        } else {
            f(r) * vr
        }
    };
    let mut pts: Vec<f64> = v
        .breakpoints()
        .into_iter()
        .chain(kinks.iter().copied())
        .filter(|&x| x > 0.0 && x.is_finite())
        .collect();
    pts.push(0.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut out = QuadResult::ZERO;
    for win in pts.windows(2) {
        out = out.plus(integrate(g, win[0], win[1], tol));
    }
    if v.has_right_tail() {
        let mut a = *pts.last().unwrap_or(&0.0);
        if a < 1.0 {
            out = out.plus(integrate(g, a, 1.0, tol));
            a = 1.0;
        }
        out = out.plus(integrate_log(g, a, R_CUT.max(a), tol));
        match v.tail_series(false) {
            Some(s) => {
                let s = w.apply_series(s).mul(f_tail);
                out = out.plus(integrate_tail_series(&s, R_CUT.max(a), tol)?);
            }
            None => out = out.plus(integrate(g, R_CUT.max(a), f64::INFINITY, tol).finite("tail")?),
        }
    }
    Ok(out)
}

/// ∫ r^k V⁻ dr, the quantity entering Bargmann-type bounds.
pub fn negative_moment(v: &Potential, k: f64) -> Result<f64> {
    Ok(moment(v, k, Weight::Negative, 1e-10)?.finite("moment of V⁻")?.value)
}
