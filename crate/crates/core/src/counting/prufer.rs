//! Scaled Prüfer integration of u'' = q(s) u.
//!
//! With u = ρ sin θ and u' = S ρ cos θ the phase obeys
//! θ' = S cos²θ − (q/S) sin²θ, so θ can only cross multiples of π upward
//! and every crossing is a node. The scale S follows √|q| (clamped) and is
//! changed between steps by remapping θ within its branch.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::potential::Potential;

/// Maximum phase advance per accepted step.
const MAX_DTHETA: f64 = PI / 8.0;
/// Default relative and absolute tolerance on θ and ln ρ.
pub(crate) const DEFAULT_TOL: f64 = 1e-11;
const MAX_STEPS: usize = 2_000_000;

/// The independent variable: x itself, or s = ln r for radial channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Variable {
    Cartesian,
    Log,
}

/// Energy as E = 0 or E = −exp(2L) (L = ln κ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Energy {
    Zero,
    LnKappa(f64),
}

impl Energy {
    pub fn kappa2(&self) -> f64 {
        match *self {
            Energy::Zero => 0.0,
            Energy::LnKappa(l) => (2.0 * l).exp(),
        }
    }
}

pub(crate) struct Problem<'a> {
    pub v: &'a Potential,
    pub var: Variable,
    /// Constant added to q in the log variable (m² for 2D channel m).
    pub m2: f64,
    pub energy: Energy,
    pub tol: f64,
}

impl Problem<'_> {
    pub fn q(&self, s: f64) -> f64 {
        match self.var {
            Variable::Cartesian => self.v.eval(s) + self.energy.kappa2(),
            Variable::Log => {
                let r = s.exp();
                let vr = self.v.eval(r);
                let pot = if vr == 0.0 { 0.0 } else { (2.0 * s).exp() * vr };
                let kap = match self.energy {
                    Energy::Zero => 0.0,
                    Energy::LnKappa(l) => (2.0 * (s + l)).exp(),
                };
                self.m2 + pot + kap
            }
        }
    }

    /// q with the potential removed, valid outside its support.
    pub fn q_free(&self, s: f64) -> f64 {
        match (self.var, self.energy) {
            (Variable::Cartesian, e) => e.kappa2(),
            (Variable::Log, Energy::Zero) => self.m2,
            (Variable::Log, Energy::LnKappa(l)) => self.m2 + (2.0 * (s + l)).exp(),
        }
    }

    /// Weight of ∫u² in the second accumulated integral.
    /// Break points of the potential in the integration variable.
    pub fn breaks(&self) -> Vec<f64> {
        let b = self.v.breakpoints();
        match self.var {
            Variable::Cartesian => b,
            Variable::Log => b.into_iter().filter(|&x| x > 0.0).map(f64::ln).collect(),
        }
    }
}

pub(crate) fn scale_for(q: f64) -> f64 {
    q.abs().clamp(1.0, 1e8).sqrt()
}

/// [θ, ln ρ]
pub(crate) type State = [f64; 2];

#[derive(Debug, Clone, Copy)]
pub(crate) struct Sample {
    pub s: f64,
    pub theta: f64,
    pub ln_rho: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Run {
    pub end: State,
    pub scale: f64,
    pub s_end: f64,
    pub samples: Vec<Sample>,
    /// Abscissae where θ crossed a multiple of π, in order of integration.
    pub nodes: Vec<f64>,
}

fn deriv(p: &Problem, s: f64, y: &State, scale: f64) -> State {
    let q = p.q(s);
    let (sn, cs) = y[0].sin_cos();
    [
        scale * cs * cs - (q / scale) * sn * sn,
        (scale + q / scale) * sn * cs,
    ]
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step; returns (y_new, error estimate on θ and ln ρ).
fn dp_step(p: &Problem, s: f64, y: &State, h: f64, scale: f64) -> (State, f64) {
    let mut k = [[0.0; 2]; 7];
    k[0] = deriv(p, s, y, scale);
    for i in 1..7 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(i) {
            let a = A[i][j];
            if a != 0.0 {
                for c in 0..2 {
                    yi[c] += h * a * kj[c];
                }
            }
        }
        k[i] = deriv(p, s + C[i] * h, &yi, scale);
    }
    let mut y5 = *y;
    let mut err = 0.0f64;
    for c in 0..2 {
        let mut d5 = 0.0;
        let mut d4 = 0.0;
        for i in 0..7 {
            d5 += B5[i] * k[i][c];
            d4 += B4[i] * k[i][c];
        }
        y5[c] += h * d5;
        let e = (h * (d5 - d4)).abs() / (p.tol * (1.0 + y5[c].abs().max(y[c].abs())));
        err = err.max(e);
    }
    (y5, err)
}

/// Change the Prüfer scale from `from` to `to` keeping u and u'.
pub(crate) fn rescale(y: &mut State, from: f64, to: f64) {
    if from == to {
        return;
    }
    let (sn, cs) = y[0].sin_cos();
    let ratio = from / to;
    let target = sn.atan2(ratio * cs);
    // Same quadrant as before, so the shift is below π/2 in magnitude.
    let base = y[0].sin().atan2(y[0].cos());
    y[0] += target - base;
    y[1] += 0.5 * (sn * sn + ratio * ratio * cs * cs).ln();
}

fn branch(theta: f64) -> f64 {
    (theta / PI).floor()
}

/// Locate θ(s) = kπ on [s_a, s_b] by re-integrating from the step start.
fn refine_node(p: &Problem, sa: f64, ya: &State, sb: f64, yb: &State, scale: f64, target: f64) -> f64 {
    let mut s = sa + (sb - sa) * ((target - ya[0]) / (yb[0] - ya[0])).clamp(0.0, 1.0);
    for _ in 0..4 {
        let (ys, _) = dp_step(p, sa, ya, s - sa, scale);
        let d = deriv(p, s, &ys, scale)[0];
        if d == 0.0 {
            break;
        }
        let next = (s - (ys[0] - target) / d).clamp(sa.min(sb), sa.max(sb));
        if (next - s).abs() <= 1e-15 * s.abs().max(1.0) {
            s = next;
            break;
        }
        s = next;
    }
    s
}

/// Integrate from s0 to s1 (either direction), stopping exactly at every
/// break point in between.
pub(crate) fn integrate(
    p: &Problem,
    s0: f64,
    s1: f64,
    y0: State,
    scale0: f64,
    record: bool,
) -> Result<Run> {
    let dir = if s1 >= s0 { 1.0 } else { -1.0 };
    let mut stops: Vec<f64> = p
        .breaks()
        .into_iter()
        .filter(|&b| (b - s0) * dir > 0.0 && (s1 - b) * dir > 0.0)
        .collect();
    if dir < 0.0 {
        stops.reverse();
    }
    stops.push(s1);

    let mut y = y0;
    let mut s = s0;
    let mut scale = scale0;
    let mut samples = Vec::new();
    let mut nodes = Vec::new();
    if record {
        samples.push(Sample {
            s,
            theta: y[0],
            ln_rho: y[1],
        });
    }
    let mut steps = 0usize;
    let mut h = {
        let q = p.q(s0).abs();
        dir * (0.05 / (1.0 + q.sqrt())).min((s1 - s0).abs().max(1e-12))
    };
    for stop in stops {
        while (stop - s) * dir > 0.0 {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::Integration("too many steps".into()));
            }
            let target = scale_for(p.q(s));
            if target > 2.0 * scale || target < 0.5 * scale {
                rescale(&mut y, scale, target);
                scale = target;
            }
            let mut last = false;
            if (s + h - stop) * dir >= 0.0 {
                h = stop - s;
                last = true;
            }
            let (yn, err) = dp_step(p, s, &y, h, scale);
            let dtheta = (yn[0] - y[0]).abs();
            let bad = !yn.iter().all(|v| v.is_finite());
            if bad || err > 1.0 || dtheta > MAX_DTHETA {
                let shrink = if bad {
                    0.25
                } else if dtheta > MAX_DTHETA {
                    0.5 * MAX_DTHETA / dtheta
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.1, 0.5)
                };
                h *= shrink;
                if h.abs() <= 1e-14 * s.abs().max(1.0) {
                    return Err(Error::Integration(format!("step underflow at {s}")));
                }
                continue;
            }
            let s_new = if last { stop } else { s + h };
            let (b0, b1) = (branch(y[0]), branch(yn[0]));
            if b0 != b1 {
                let (lo, hi) = if b1 > b0 { (b0 + 1.0, b1) } else { (b1 + 1.0, b0) };
                let mut k = lo;
                while k <= hi {
                    nodes.push(refine_node(p, s, &y, s_new, &yn, scale, k * PI));
                    k += 1.0;
                }
            }
            y = yn;
            s = s_new;
            if record {
                samples.push(Sample {
                    s,
                    theta: y[0],
                    ln_rho: y[1],
                });
            }
            let grow = if err > 0.0 {
                (0.9 * err.powf(-0.2)).clamp(1.0, 5.0)
            } else {
                5.0
            };
            h *= grow;
        }
    }
    Ok(Run {
        end: y,
        scale,
        s_end: s,
        samples,
        nodes,
    })
}

/// Initial phase for a solution with u'/u = y at scale S.
pub(crate) fn phase_for(log_derivative: f64, scale: f64) -> f64 {
    scale.atan2(log_derivative)
}

/// Sign-change count of u on [s0, s1] by direct RK4 on (u, u'), with
/// renormalization. Independent of the phase formulation.
pub(crate) fn raw_sign_changes(p: &Problem, s0: f64, s1: f64, log_derivative: f64, steps: usize) -> usize {
    let h = (s1 - s0) / steps as f64;
    let f = |s: f64, y: [f64; 2]| [y[1], p.q(s) * y[0]];
    let mut y = [1.0, log_derivative];
    let mut s = s0;
    let mut count = 0;
    for _ in 0..steps {
        let k1 = f(s, y);
        let k2 = f(s + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f(s + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f(s + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        let yn = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if yn[0] == 0.0 || yn[0].signum() != y[0].signum() {
            count += 1;
        }
        let n = yn[0].abs().max(yn[1].abs());
        y = if n > 1e100 { [yn[0] / n, yn[1] / n] } else { yn };
        s += h;
    }
    count
}
