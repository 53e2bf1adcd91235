//! Regge trajectories E_i(m) of radial 2D potentials at continuous angular
//! momentum, their zero-energy intercepts m_i, and the counts built on them.

use std::fmt::Write as _;

use serde::Serialize;

use crate::counting::{classify_channel, eigenvalues_below, TailClass, Window};
use crate::energy::{eigenvalue, spectrum, Eigenvalue};
use crate::error::{Error, Result};
use crate::moments::negative_moment;
use crate::potential::{Potential, Space};
use crate::transform::inverse_log_map;

/// Intercepts this close to an integer are reported as ambiguous.
pub const INTEGER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub i: usize,
    /// (m, E_i(m)) where the state is bound.
    pub samples: Vec<(f64, f64)>,
    pub m_i: f64,
}

impl Trajectory {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,m,E\n");
        for (m, e) in &self.samples {
            let _ = writeln!(out, "{},{},{}", self.i, m, e);
        }
        out
    }
}

fn require_2d(v: &Potential) -> Result<()> {
    if v.space == Space::Radial && v.dimension == 2 {
        Ok(())
    } else {
        Err(Error::NotApplicable("Regge trajectories need a 2D radial potential".into()))
    }
}

fn bound_at(v: &Potential, m: f64) -> Result<u64> {
    eigenvalues_below(v, Some(m), 0.0, Window::default())
}

/// Zero-energy intercept of trajectory i: the m where channel m stops
/// holding more than i bound states.
pub fn intercept(v: &Potential, i: usize) -> Result<f64> {
    require_2d(v)?;
    let target = i as u64;
    if bound_at(v, 0.0)? <= target {
        return Err(Error::NotApplicable(format!("no trajectory {i}: fewer states at m = 0")));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while bound_at(v, hi)? > target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::Domain(format!("trajectory {i} does not reach zero energy")));
        }
    }
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if bound_at(v, mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// m_0 > m_1 > … for every trajectory bound at m = 0.
pub fn intercepts(v: &Potential) -> Result<Vec<f64>> {
    require_2d(v)?;
    let n = bound_at(v, 0.0)?;
    (0..n as usize).map(|i| intercept(v, i)).collect()
}

/// 0, 1/8, 2/8, … up to just past m_0.
pub fn default_m_grid(v: &Potential) -> Result<Vec<f64>> {
    let m0 = intercept(v, 0)?;
    let n = (m0 * 8.0).floor() as usize;
    Ok((0..=n).map(|k| k as f64 / 8.0).collect())
}

/// E_i(m) on the grid points where the state is bound, and its intercept.
pub fn trace(v: &Potential, i: usize, m_grid: &[f64]) -> Result<Trajectory> {
    require_2d(v)?;
    let m_i = intercept(v, i)?;
    let mut samples = Vec::new();
    for &m in m_grid {
        if m < 0.0 || m >= m_i || bound_at(v, m)? <= i as u64 {
            continue;
        }
        samples.push((m, eigenvalue(v, Some(m), i)?.energy));
    }
    if samples.is_empty() {
        return Err(Error::NotApplicable(format!("trajectory {i} has no bound sample on the grid")));
    }
    Ok(Trajectory { i, samples, m_i })
}

/// Integer channels m ≥ 1 holding a bound state on a trajectory with
/// intercept m_i: floor(m_i), or m_i − 1 when m_i is an integer.
pub fn bound_channels(m_i: f64) -> u64 {
    if m_i <= 1.0 {
        0
    } else {
        (m_i.ceil() - 1.0) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryCount {
    pub count: u64,
    /// Counts with near-integer intercepts taken below and above the integer.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ambiguous: Option<(u64, u64)>,
    pub intercepts: Vec<f64>,
}

/// N₀ + 2 Σ_i (integer channels m ≥ 1 below m_i).
pub fn count_via_trajectories(v: &Potential) -> Result<TrajectoryCount> {
    require_2d(v)?;
    if classify_channel(v, 0.0)?.class != TailClass::Finite {
        return Err(Error::NotApplicable("trajectory count needs a FINITE classification".into()));
    }
    let ms = intercepts(v)?;
    let n0 = ms.len() as u64;
    let mut count = n0;
    let (mut low, mut high) = (n0, n0);
    let mut ambiguous = false;
    for &m in &ms {
        count += 2 * bound_channels(m);
        let near = m.round();
        if near >= 1.0 && (m - near).abs() < INTEGER_TOL {
            ambiguous = true;
            low += 2 * bound_channels(near);
            high += 2 * bound_channels(near + 0.5);
        } else {
            low += 2 * bound_channels(m);
            high += 2 * bound_channels(m);
        }
    }
    Ok(TrajectoryCount {
        count,
        ambiguous: ambiguous.then_some((low, high)),
        intercepts: ms,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentChain {
    /// Σ over trajectories of the number of bound channels m ≥ 1.
    pub lhs: f64,
    /// (2/√3) Σ (m_i² − 1/4)^{1/2} over the same trajectories.
    pub mid: f64,
    /// (2/√3) · ½ ∫ r V⁻ dr
    pub rhs: f64,
}

impl MomentChain {
    pub fn holds(&self) -> bool {
        self.lhs <= self.mid && self.mid <= self.rhs
    }
}

pub fn moment_inequality_check(v: &Potential) -> Result<MomentChain> {
    require_2d(v)?;
    let c = 2.0 / 3f64.sqrt();
    let rhs = c * 0.5 * negative_moment(v, 1.0)?;
    if bound_at(v, 0.0)? == 0 {
        return Ok(MomentChain { lhs: 0.0, mid: 0.0, rhs });
    }
    let ms = count_via_trajectories(v)?.intercepts;
    let (mut lhs, mut mid) = (0.0, 0.0);
    for m in ms {
        let k = bound_channels(m);
        if k >= 1 {
            lhs += k as f64;
            mid += c * (m * m - 0.25).sqrt();
        }
    }
    Ok(MomentChain { lhs, mid, rhs })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRow {
    pub i: usize,
    /// Intercept from the channel counts.
    pub m_traced: f64,
    /// Eigenvalue of −d²/dx² + e^{2x} V(eˣ) on the line.
    pub e_i: f64,
    /// √(1/4 + |e_i|)
    pub m_shifted: f64,
    /// √|e_i|
    pub m_direct: f64,
}

/// Intercepts against the spectrum of the line operator with U(x) = r² V(r), x = ln r.
pub fn identity_check(v: &Potential) -> Result<Vec<IdentityRow>> {
    require_2d(v)?;
    let u = inverse_log_map(v, 1.0)?;
    let levels = spectrum(&u, None)?;
    let ms = intercepts(v)?;
    Ok(ms
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let e = levels.get(i).map_or(0.0, |l| l.energy);
            IdentityRow {
                i,
                m_traced: m,
                e_i: e,
                m_shifted: (0.25 + e.abs()).sqrt(),
                m_direct: e.abs().sqrt(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeCheck {
    pub m: f64,
    pub energy: f64,
    /// 2m ∫ u²/r² dr / ∫ u² dr
    pub integral: f64,
    /// Central difference of E_i in m.
    pub finite_difference: f64,
}

impl SlopeCheck {
    pub fn relative_gap(&self) -> f64 {
        (self.integral - self.finite_difference).abs() / self.finite_difference.abs()
    }
}

/// Solve y'' = q y over `grid` by RK4 from `y0`, returning R at each point
/// and the running log scale applied to it.
fn propagate(q: &dyn Fn(f64, f64, f64) -> f64, grid: &[f64], y0: (f64, f64)) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(grid.len());
    let (mut r, mut p) = y0;
    let mut scale = 0.0;
    out.push((r, scale));
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let h = b - a;
        // Evaluate q strictly inside [a, b] so a jump at either end is seen from the right side.
        let lo = a.min(b);
        let hi = a.max(b);
        let qa = q(a, lo, hi);
        let qm = q(0.5 * (a + b), lo, hi);
        let qb = q(b, lo, hi);
        let k1 = (p, qa * r);
        let k2 = (p + 0.5 * h * k1.1, qm * (r + 0.5 * h * k1.0));
        let k3 = (p + 0.5 * h * k2.1, qm * (r + 0.5 * h * k2.0));
        let k4 = (p + h * k3.1, qb * (r + h * k3.0));
        r += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        p += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        let size = r.abs().max(p.abs());
        if size > 1e100 || (size < 1e-100 && size > 0.0) {
            r /= size;
            p /= size;
            scale += size.ln();
        }
        out.push((r, scale));
    }
    out
}

fn segment_grid(points: &[f64], h: f64) -> Vec<f64> {
    let mut grid = vec![points[0]];
    for w in points.windows(2) {
        let n = ((w[1] - w[0]) / h).ceil().max(1.0) as usize;
        for k in 1..=n {
            grid.push(w[0] + (w[1] - w[0]) * k as f64 / n as f64);
        }
    }
    grid
}

fn trapezoid(t: &[f64], f: &[f64]) -> f64 {
    t.windows(2).zip(f.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

/// dE/dm at an eigenvalue from the normalized eigenfunction, with t = ln r:
/// 2m ∫ R² dt / ∫ e^{2t} R² dt.
pub fn slope_integral(v: &Potential, m: f64, e: &Eigenvalue) -> Result<f64> {
    require_2d(v)?;
    if !(m > 0.0) {
        return Err(Error::Parameter("the slope integral needs m > 0".into()));
    }
    let k2 = e.kappa2();
    let kappa = e.ln_kappa.exp();
    let breaks: Vec<f64> = v.breakpoints().into_iter().filter(|&b| b > 0.0 && b.is_finite()).collect();
    let first = breaks.first().copied().unwrap_or(1.0);
    let t0 = (1e-6f64).min(first * 1e-2).ln();
    let compact = !v.has_right_tail();
    let edge = if compact { v.support_end() } else { breaks.last().copied().unwrap_or(1.0) };
    let t_far = if compact {
        edge.ln().max((40.0 / kappa).ln()) + 0.5
    } else {
        (1e4f64).max(40.0 / kappa).ln()
    };
    let t_m = edge.ln().clamp(t0 + 1.0, t_far - 1.0);
    let q = |t: f64, lo: f64, hi: f64| {
        let tt = t.clamp(lo + 1e-12 * (hi - lo), hi - 1e-12 * (hi - lo));
        m * m + (2.0 * tt).exp() * (v.eval(tt.exp()) + k2)
    };
    let mut knots: Vec<f64> = breaks.iter().map(|b| b.ln()).filter(|&t| t > t0 && t < t_far).collect();
    knots.extend([t0, t_m, t_far]);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let split = knots.iter().position(|&t| t == t_m).unwrap_or(0);
    let h = 2e-3;
    let left_grid = segment_grid(&knots[..=split], h);
    let mut right_knots: Vec<f64> = knots[split..].to_vec();
    right_knots.reverse();
    let right_grid = {
        let mut g = vec![right_knots[0]];
        for w in right_knots.windows(2) {
            let n = ((w[0] - w[1]) / h).ceil().max(1.0) as usize;
            for k in 1..=n {
                g.push(w[0] + (w[1] - w[0]) * k as f64 / n as f64);
            }
        }
        g
    };
    let q0 = q(t0, t0, t0 + h);
    let left = propagate(&q, &left_grid, (1.0, q0.max(0.0).sqrt()));
    let qf = q(t_far, t_far - h, t_far);
    let right = propagate(&q, &right_grid, (1.0, -qf.max(0.0).sqrt()));
    let (rl, sl) = *left.last().ok_or_else(|| Error::Integration("empty grid".into()))?;
    let (rr, sr) = *right.last().ok_or_else(|| Error::Integration("empty grid".into()))?;
    if rl == 0.0 || rr == 0.0 {
        return Err(Error::Integration("eigenfunction vanishes at the matching point".into()));
    }
    // Express both halves relative to R(t_m) = 1.
    let lv: Vec<f64> = left.iter().map(|&(r, s)| r / rl * (s - sl).exp()).collect();
    let rv: Vec<f64> = right.iter().map(|&(r, s)| r / rr * (s - sr).exp()).collect();
    let sq = |vals: &[f64], t: &[f64], weight: bool| -> f64 {
        let f: Vec<f64> = vals
            .iter()
            .zip(t)
            .map(|(r, &tt)| r * r * if weight { (2.0 * tt).exp() } else { 1.0 })
            .collect();
        trapezoid(t, &f).abs()
    };
    let r0 = lv[0];
    let head_plain = r0 * r0 / (2.0 * m);
    let head_weighted = r0 * r0 * (2.0 * t0).exp() / (2.0 * m + 2.0);
    let plain = head_plain + sq(&lv, &left_grid, false) + sq(&rv, &right_grid, false);
    let weighted = head_weighted + sq(&lv, &left_grid, true) + sq(&rv, &right_grid, true);
    Ok(2.0 * m * plain / weighted)
}

/// Feynman–Hellmann slope against a central difference of E_i(m).
pub fn slope_check(v: &Potential, i: usize, m: f64) -> Result<SlopeCheck> {
    let e = eigenvalue(v, Some(m), i)?;
    let h = 1e-3 * m.max(1.0);
    let up = eigenvalue(v, Some(m + h), i)?.energy;
    let down = eigenvalue(v, Some(m - h), i)?.energy;
    Ok(SlopeCheck {
        m,
        energy: e.energy,
        integral: slope_integral(v, m, &e)?,
        finite_difference: (up - down) / (2.0 * h),
    })
}
