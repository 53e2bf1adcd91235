//! Bound-state counting by zero-energy node counting, plus the tail
//! classifier that decides finiteness.

mod classify;
pub(crate) mod prufer;

use std::f64::consts::PI;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::negative_moment;
use crate::potential::{Potential, Space};
use crate::specfun::bessel_k_scaled;

pub use classify::{classify_channel, classify_tail, Classification, TailClass};
use prufer::{integrate, phase_for, scale_for, Energy, Problem, Run, Variable};

pub const DEFAULT_X_MIN: f64 = 1e-6;
pub const DEFAULT_X_MAX: f64 = 1e4;

/// Dimension and angular index; `m` is absent for line and half-line problems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Channel {
    pub dimension: u32,
    pub m: Option<f64>,
}

/// Truncation of the integration window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    /// Inner radius for radial channels (ignored on the line).
    pub x_min: f64,
    /// Outer extent; tails beyond it are handled analytically.
    pub x_max: f64,
}

impl Default for Window {
    fn default() -> Self {
        Window {
            x_min: DEFAULT_X_MIN,
            x_max: DEFAULT_X_MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Count {
    Finite(u64),
    Infinite,
    /// Borderline tail: the window count is a lower bound.
    Marginal { lower: u64, upper: Option<u64> },
}

impl Count {
    pub fn finite(&self) -> Option<u64> {
        match self {
            Count::Finite(n) => Some(*n),
            _ => None,
        }
    }
}

impl Serialize for Count {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Count::Finite(n) => s.serialize_u64(*n),
            Count::Infinite => s.serialize_str("infinite"),
            Count::Marginal { lower, upper } => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("lower", lower)?;
                m.serialize_entry("upper", upper)?;
                m.end()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelCount {
    pub m: f64,
    pub count: u64,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountResult {
    pub count: Count,
    pub channel: Channel,
    pub truncation: (f64, f64),
    pub classifier: String,
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub channels: Vec<ChannelCount>,
}

/// Sampled solution with its Prüfer phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionTrace {
    /// x on the line, r for radial channels.
    pub abscissae: Vec<f64>,
    pub theta: Vec<f64>,
    /// ln of the Prüfer amplitude.
    pub ln_amplitude: Vec<f64>,
    pub node_positions: Vec<f64>,
    pub truncation: (f64, f64),
    pub energy: f64,
}

impl SolutionTrace {
    /// Solution values normalized to unit maximum amplitude. For radial
    /// channels these are ψ(r) = u(r)/√r in 2D form.
    pub fn values(&self) -> Vec<f64> {
        let top = self.ln_amplitude.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        self.theta
            .iter()
            .zip(&self.ln_amplitude)
            .map(|(t, l)| (l - top).exp() * t.sin())
            .collect()
    }

    pub fn node_count(&self) -> usize {
        self.node_positions.len()
    }
}

/// How a potential is integrated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Geometry {
    Line,
    /// Log variable s = ln r with q = m2 + r²(V − E).
    Log { m2: f64 },
}

/// (ℓ + (N−2)/2)², the constant that puts channel ℓ of an N-dimensional
/// radial problem in 2D form.
pub fn effective_m2(dimension: u32, m: f64) -> Result<f64> {
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::Parameter(format!("angular index must be ≥ 0, got {m}")));
    }
    match dimension {
        0 => Err(Error::Parameter("dimension must be ≥ 1".into())),
        1 => Ok(0.25),
        n => {
            let nu = m + (n as f64 - 2.0) / 2.0;
            Ok(nu * nu)
        }
    }
}

pub(crate) fn geometry_for(v: &Potential, m: Option<f64>) -> Result<Geometry> {
    match v.space {
        Space::Line => {
            if m.is_some() {
                return Err(Error::Parameter("line potentials have no angular index".into()));
            }
            Ok(Geometry::Line)
        }
        Space::Radial => Ok(Geometry::Log {
            m2: effective_m2(v.dimension, m.unwrap_or(0.0))?,
        }),
    }
}

/// Outcome of one shooting run.
pub(crate) struct Shot {
    pub run: Run,
    pub nodes: usize,
    pub ahead: bool,
    pub window: (f64, f64),
    pub variable: Variable,
}

impl Shot {
    pub fn total(&self) -> u64 {
        (self.nodes + usize::from(self.ahead)) as u64
    }
}

fn energy_of(e: f64) -> Result<Energy> {
    if e == 0.0 {
        Ok(Energy::Zero)
    } else if e < 0.0 && e.is_finite() {
        Ok(Energy::LnKappa(0.5 * (-e).ln()))
    } else {
        Err(Error::Parameter(format!("energy must be ≤ 0, got {e}")))
    }
}

/// Phase of the solution decaying at the outer end, given u'/u there.
fn ahead(run: &Run, threshold: f64) -> bool {
    let star = phase_for(threshold, run.scale);
    let frac = run.end[0] - PI * (run.end[0] / PI).floor();
    frac > star
}

/// Integrate at energy E (given as `Energy`) and count eigenvalues below it.
pub(crate) fn shoot(
    v: &Potential,
    geom: Geometry,
    energy: Energy,
    window: Window,
    record: bool,
) -> Result<Shot> {
    shoot_tol(v, geom, energy, window, record, prufer::DEFAULT_TOL)
}

pub(crate) fn shoot_tol(
    v: &Potential,
    geom: Geometry,
    energy: Energy,
    window: Window,
    record: bool,
    tol: f64,
) -> Result<Shot> {
    match geom {
        Geometry::Line => shoot_line(v, energy, window, record, tol),
        Geometry::Log { m2 } => shoot_log(v, m2, energy, window, record, tol),
    }
}

fn subdominant_exponent(c: f64) -> f64 {
    0.5 - (0.25 + c.max(-0.25)).sqrt()
}

/// A tail whose asymptotic series is empty decays faster than any power.
fn fast_tail(v: &Potential, left: bool) -> bool {
    v.tail_series(left).is_some_and(|s| s.is_zero())
}

/// First point beyond `edge` (stepping in direction `dir`) from which
/// |V| (x − edge)² stays below 10⁻³⁰ on a doubling probe.
fn negligible_from(v: &Potential, edge: f64, dir: f64) -> f64 {
    let small = |d: f64| {
        (0..8).all(|k| {
            let dd = d * (1.0 + k as f64 / 2.0);
            v.eval(edge + dir * dd).abs() * dd * dd < 1e-30
        })
    };
    let mut d = 1.0;
    while !small(d) && d < 1e6 {
        d *= 1.5;
    }
    edge + dir * d
}

fn shoot_line(v: &Potential, energy: Energy, window: Window, record: bool, tol: f64) -> Result<Shot> {
    let p = Problem {
        v,
        var: Variable::Cartesian,
        m2: 0.0,
        energy,
        tol,
    };
    let (lo, hi) = (v.support_start(), v.support_end());
    let (lo, hi) = if hi - lo < 1e-12 { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
    let left_tail = v.has_left_tail();
    let right_tail = v.has_right_tail();
    let x0 = match (left_tail, fast_tail(v, true)) {
        (true, true) => negligible_from(v, lo, -1.0),
        (true, false) => -window.x_max.max(10.0 * lo.abs()),
        _ => lo,
    };
    let x1 = match (right_tail, fast_tail(v, false)) {
        (true, true) => negligible_from(v, hi, 1.0),
        (true, false) => window.x_max.max(10.0 * hi.abs()),
        _ => hi,
    };
    let left_tail = left_tail && !fast_tail(v, true);
    let right_tail = right_tail && !fast_tail(v, false);
    let q0 = p.q(x0);
    let y0 = match energy {
        Energy::Zero if left_tail => subdominant_exponent(x0 * x0 * q0) / x0,
        Energy::Zero => 0.0,
        Energy::LnKappa(_) if left_tail => q0.max(0.0).sqrt(),
        Energy::LnKappa(_) => p.q_free(x0).sqrt(),
    };
    let s0 = scale_for(q0);
    let run = integrate(&p, x0, x1, [phase_for(y0, s0), 0.0], s0, record)?;
    let q1 = p.q(x1);
    let threshold = match energy {
        Energy::Zero if right_tail => subdominant_exponent(x1 * x1 * q1) / x1,
        Energy::Zero => 0.0,
        Energy::LnKappa(_) if right_tail => -q1.max(0.0).sqrt(),
        Energy::LnKappa(_) => -p.q_free(x1).sqrt(),
    };
    let a = ahead(&run, threshold);
    Ok(Shot {
        nodes: run.nodes.len(),
        ahead: a,
        run,
        window: (x0, x1),
        variable: Variable::Cartesian,
    })
}

fn shoot_log(v: &Potential, m2: f64, energy: Energy, window: Window, record: bool, tol: f64) -> Result<Shot> {
    let p = Problem {
        v,
        var: Variable::Log,
        m2,
        energy,
        tol,
    };
    let first = v.breakpoints().into_iter().find(|&b| b > 0.0);
    let r0 = match first {
        Some(b) => window.x_min.min(b * 1e-2),
        None => window.x_min,
    };
    let t0 = r0.ln();
    let q0 = p.q(t0);
    let q0b = p.q(t0 + std::f64::consts::LN_2);
    if !(q0 >= -1e-3) || (q0 - q0b).abs() > 0.05 * q0.abs().max(1.0) {
        return Err(Error::Integration(format!(
            "singular point at r = 0 does not match the r^(m+1/2) series start (q = {q0})"
        )));
    }
    let compact = !v.has_right_tail();
    let hi = v.support_end().max(r0 * std::f64::consts::E);
    let mut t1 = if compact {
        hi.ln()
    } else {
        window.x_max.max(10.0 * hi).ln()
    };
    let mut k0_match = None;
    if let Energy::LnKappa(l) = energy {
        if compact {
            if m2 == 0.0 {
                k0_match = Some(l);
            } else {
                t1 = t1.max(40f64.ln() - l);
            }
        }
    }
    let s0 = scale_for(q0);
    let run = integrate(&p, t0, t1, [phase_for(q0.max(0.0).sqrt(), s0), 0.0], s0, record)?;
    let threshold = match (energy, k0_match) {
        (Energy::LnKappa(_), Some(l)) => {
            // Outside the support the decaying solution is K₀(κr).
            let z = (t1 + l).exp();
            -z * bessel_k_scaled(1, z)? / bessel_k_scaled(0, z)?
        }
        _ if compact => -p.q_free(t1).sqrt(),
        _ => -p.q(t1).max(0.0).sqrt(),
    };
    let a = ahead(&run, threshold);
    Ok(Shot {
        nodes: run.nodes.len(),
        ahead: a,
        run,
        window: (t0.exp(), t1.exp()),
        variable: Variable::Log,
    })
}

/// Zero- or negative-energy solution trace on the truncation window.
pub fn integrate_channel(
    v: &Potential,
    m: Option<f64>,
    energy: f64,
    window: Window,
) -> Result<SolutionTrace> {
    integrate_channel_tol(v, m, energy, window, prufer::DEFAULT_TOL)
}

/// As `integrate_channel` with an explicit local error tolerance.
pub fn integrate_channel_tol(
    v: &Potential,
    m: Option<f64>,
    energy: f64,
    window: Window,
    tol: f64,
) -> Result<SolutionTrace> {
    let geom = geometry_for(v, m)?;
    let shot = shoot_tol(v, geom, energy_of(energy)?, window, true, tol)?;
    Ok(trace_of(&shot, energy))
}

fn trace_of(shot: &Shot, energy: f64) -> SolutionTrace {
    let map = |s: f64| match shot.variable {
        Variable::Cartesian => s,
        Variable::Log => s.exp(),
    };
    SolutionTrace {
        abscissae: shot.run.samples.iter().map(|x| map(x.s)).collect(),
        theta: shot.run.samples.iter().map(|x| x.theta).collect(),
        ln_amplitude: shot.run.samples.iter().map(|x| x.ln_rho).collect(),
        node_positions: shot.run.nodes.iter().map(|&s| map(s)).collect(),
        truncation: shot.window,
        energy,
    }
}

/// Number of eigenvalues strictly below E ≤ 0 (bound states for E = 0).
pub fn eigenvalues_below(v: &Potential, m: Option<f64>, energy: f64, window: Window) -> Result<u64> {
    let geom = geometry_for(v, m)?;
    Ok(shoot(v, geom, energy_of(energy)?, window, false)?.total())
}

/// Number of eigenvalues strictly below −κ² with κ = e^L; usable far below
/// the range where −κ² is representable as an energy offset.
pub fn eigenvalues_below_ln_kappa(v: &Potential, m: Option<f64>, ln_kappa: f64, window: Window) -> Result<u64> {
    if !ln_kappa.is_finite() {
        return Err(Error::Parameter(format!("ln κ must be finite, got {ln_kappa}")));
    }
    let geom = geometry_for(v, m)?;
    Ok(shoot(v, geom, Energy::LnKappa(ln_kappa), window, false)?.total())
}

fn channel_of(v: &Potential, m: Option<f64>) -> Channel {
    Channel {
        dimension: v.dimension,
        m,
    }
}

fn result_from(
    v: &Potential,
    m: Option<f64>,
    class: &Classification,
    window: Window,
) -> Result<CountResult> {
    let geom = geometry_for(v, m)?;
    let channel = channel_of(v, m);
    if class.class == TailClass::Infinite {
        return Ok(CountResult {
            count: Count::Infinite,
            channel,
            truncation: (window.x_min, window.x_max),
            classifier: class.evidence.clone(),
            epsilon: v.epsilon,
            channels: Vec::new(),
        });
    }
    let shot = shoot(v, geom, Energy::Zero, window, false)?;
    let count = match class.class {
        TailClass::Finite => Count::Finite(shot.total()),
        _ => Count::Marginal {
            lower: shot.nodes as u64,
            upper: None,
        },
    };
    Ok(CountResult {
        count,
        channel,
        truncation: shot.window,
        classifier: class.evidence.clone(),
        epsilon: v.epsilon,
        channels: Vec::new(),
    })
}

/// Exact number of negative-energy bound states of −u'' + V u on the line.
pub fn count_bound_states_1d(v: &Potential, window: Window) -> Result<CountResult> {
    if v.space != Space::Line {
        return Err(Error::Parameter("count_bound_states_1d needs a line potential".into()));
    }
    result_from(v, None, &classify_tail(v), window)
}

/// Bound states in angular channel m of a radial potential.
pub fn count_channel(v: &Potential, m: f64, window: Window) -> Result<CountResult> {
    if v.space != Space::Radial {
        return Err(Error::Parameter("count_channel needs a radial potential".into()));
    }
    let class = classify_channel(v, m)?;
    let m = (v.dimension >= 2).then_some(m);
    result_from(v, m, &class, window)
}

/// N₀ + 2 Σ_{m≥1} N_m for a 2D radial potential.
pub fn count_total_2d(v: &Potential, window: Window) -> Result<CountResult> {
    if v.space != Space::Radial || v.dimension != 2 {
        return Err(Error::Parameter("count_total_2d needs a 2D radial potential".into()));
    }
    let base = count_channel(v, 0.0, window)?;
    let mut out = CountResult {
        channel: Channel {
            dimension: 2,
            m: None,
        },
        channels: Vec::new(),
        ..base.clone()
    };
    let n0 = match base.count {
        Count::Finite(n) => n,
        _ => return Ok(out),
    };
    // Channel m is empty once ∫ r V⁻ dr / (2m) < 1.
    let moment = negative_moment(v, 1.0)?;
    out.channels.push(ChannelCount {
        m: 0.0,
        count: n0,
        multiplicity: 1,
    });
    let mut total = n0;
    let mut m = 1u64;
    while n0 > 0 && (m as f64) <= moment / 2.0 {
        let c = count_channel(v, m as f64, window)?;
        let n = match c.count {
            Count::Finite(n) => n,
            other => {
                out.count = other;
                out.classifier = c.classifier;
                return Ok(out);
            }
        };
        if n == 0 {
            break;
        }
        out.channels.push(ChannelCount {
            m: m as f64,
            count: n,
            multiplicity: 2,
        });
        total += 2 * n;
        m += 1;
    }
    out.count = Count::Finite(total);
    Ok(out)
}

/// Node counts of the zero-energy solution on nested windows [start, x_max].
pub fn node_growth_profile(
    v: &Potential,
    m: Option<f64>,
    windows: &[f64],
) -> Result<Vec<(f64, u64)>> {
    let Some(&outer) = windows.iter().max_by(|a, b| a.total_cmp(b)) else {
        return Ok(Vec::new());
    };
    let geom = geometry_for(v, m)?;
    let window = Window {
        x_max: outer,
        ..Window::default()
    };
    let shot = shoot_fixed(v, geom, window)?;
    let nodes: Vec<f64> = match shot.variable {
        Variable::Cartesian => shot.run.nodes.clone(),
        Variable::Log => shot.run.nodes.iter().map(|s| s.exp()).collect(),
    };
    Ok(windows
        .iter()
        .map(|&w| (w, nodes.iter().filter(|&&x| x < w).count() as u64))
        .collect())
}

/// Zero-energy run ending exactly at `window.x_max`, tails or not.
fn shoot_fixed(v: &Potential, geom: Geometry, window: Window) -> Result<Shot> {
    let mut shot = shoot(v, geom, Energy::Zero, window, false)?;
    let end = match shot.variable {
        Variable::Cartesian => shot.run.s_end,
        Variable::Log => shot.run.s_end.exp(),
    };
    if end < window.x_max {
        let (s, p) = match geom {
            Geometry::Line => (window.x_max, Problem { v, var: Variable::Cartesian, m2: 0.0, energy: Energy::Zero, tol: prufer::DEFAULT_TOL }),
            Geometry::Log { m2 } => (window.x_max.ln(), Problem { v, var: Variable::Log, m2, energy: Energy::Zero, tol: prufer::DEFAULT_TOL }),
        };
        let more = integrate(&p, shot.run.s_end, s, shot.run.end, shot.run.scale, false)?;
        shot.run.nodes.extend(more.nodes);
        shot.run.end = more.end;
        shot.run.s_end = more.s_end;
        shot.run.scale = more.scale;
    }
    Ok(shot)
}

/// Sign changes of the zero-energy solution from a fixed-step integration
/// of (u, u') on the same window. Cross-check for the phase count.
pub fn raw_node_count(v: &Potential, m: Option<f64>, window: Window, steps: usize) -> Result<u64> {
    let geom = geometry_for(v, m)?;
    let shot = shoot(v, geom, Energy::Zero, window, false)?;
    let (p, s0, s1) = match geom {
        Geometry::Line => (
            Problem { v, var: Variable::Cartesian, m2: 0.0, energy: Energy::Zero, tol: prufer::DEFAULT_TOL },
            shot.window.0,
            shot.window.1,
        ),
        Geometry::Log { m2 } => (
            Problem { v, var: Variable::Log, m2, energy: Energy::Zero, tol: prufer::DEFAULT_TOL },
            shot.window.0.ln(),
            shot.window.1.ln(),
        ),
    };
    let q0 = p.q(s0);
    let y0 = match geom {
        Geometry::Line if v.has_left_tail() => subdominant_exponent(s0 * s0 * q0) / s0,
        Geometry::Line => 0.0,
        Geometry::Log { .. } => q0.max(0.0).sqrt(),
    };
    Ok(prufer::raw_sign_changes(&p, s0, s1, y0, steps) as u64)
}

#[cfg(test)]
mod tests;
