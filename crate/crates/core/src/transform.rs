//! The logarithmic change of variables x = ln(r/R), U(x) = r²V(r), its
//! iterates, and reductions of radial problems to the two-dimensional form.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::potential::{Part, Piece, Potential, Space};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    LogMap,
    InverseLogMap,
    IteratedLog,
    NdReduction,
    ChannelReduction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformRecord {
    pub kind: TransformKind,
    /// R for the log maps, N for nd_reduction, m or ℓ for channel_reduction,
    /// r_min for iterated_log.
    pub parameter: f64,
    pub source: String,
    pub target: String,
}

impl TransformRecord {
    pub fn new(kind: TransformKind, parameter: f64, source: &Potential, target: &Potential) -> Self {
        TransformRecord {
            kind,
            parameter,
            source: source.to_json(),
            target: target.to_json(),
        }
    }
}

fn r() -> Expr {
    Expr::Var('r')
}

fn x() -> Expr {
    Expr::Var('x')
}

fn require_full(v: &Potential, op: &str) -> Result<()> {
    if v.part != Part::Full {
        return Err(Error::Unsupported(format!(
            "{op} needs the full potential, not a sign part"
        )));
    }
    Ok(())
}

fn scaled_expr(e: &Expr, g: f64) -> Expr {
    if g == 1.0 {
        e.clone()
    } else {
        Expr::mul(Expr::num(g), e.clone())
    }
}

/// V(r) = U(ln(r/R)) / r².
pub fn log_map(u: &Potential, scale: f64) -> Result<Potential> {
    if u.space != Space::Line {
        return Err(Error::Unsupported("log_map acts on a line potential".into()));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Parameter(format!("R must be positive, got {scale}")));
    }
    let arg = if scale == 1.0 {
        Expr::ln(r())
    } else {
        Expr::ln(Expr::div(r(), Expr::num(scale)))
    };
    let mut pieces = Vec::with_capacity(u.pieces.len());
    for p in &u.pieces {
        let from = scale * p.from.exp();
        let to = scale * p.to.exp();
        if !(from < to) {
            continue;
        }
        let e = Expr::div(p.expr.substitute(&arg), Expr::pow(r(), 2.0)).simplify_logs();
        pieces.push(Piece::new(from, to, e));
    }
    let mut v = Potential {
        space: Space::Radial,
        dimension: 2,
        pieces,
        coupling: u.coupling,
        part: u.part,
        epsilon: u.epsilon,
        derivation: u.derivation.clone(),
    };
    v.validate()?;
    v.derivation.push(format!("log_map(R={scale:?})"));
    Ok(v)
}

/// U(x) = r² V(r) with r = R eˣ.
pub fn inverse_log_map(v: &Potential, scale: f64) -> Result<Potential> {
    if v.space != Space::Radial || v.dimension != 2 {
        return Err(Error::Unsupported("inverse_log_map acts on a 2D radial potential".into()));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Parameter(format!("R must be positive, got {scale}")));
    }
    let rr = if scale == 1.0 {
        Expr::exp(x())
    } else {
        Expr::mul(Expr::num(scale), Expr::exp(x()))
    };
    let mut pieces = Vec::with_capacity(v.pieces.len());
    for p in &v.pieces {
        let from = if p.from == 0.0 {
            f64::NEG_INFINITY
        } else {
            (p.from / scale).ln()
        };
        let to = (p.to / scale).ln();
        if !(from < to) {
            continue;
        }
        let e = times_r_squared(&p.expr).substitute(&rr).simplify_logs();
        pieces.push(Piece::new(from, to, e));
    }
    let mut u = Potential {
        space: Space::Line,
        dimension: 1,
        pieces,
        coupling: v.coupling,
        part: v.part,
        epsilon: v.epsilon,
        derivation: v.derivation.clone(),
    };
    u.validate()?;
    u.derivation.push(format!("inverse_log_map(R={scale:?})"));
    Ok(u)
}

fn is_r_squared(e: &Expr) -> bool {
    matches!(e, Expr::Pow(b, n) if *n == 2.0 && matches!(**b, Expr::Var(_)))
}

/// r²·e with an explicit 1/r² factor cancelled where the tree allows it.
fn times_r_squared(e: &Expr) -> Expr {
    fn cancel(e: &Expr) -> Option<Expr> {
        match e {
            Expr::Div(a, b) if is_r_squared(b) => Some((**a).clone()),
            Expr::Div(a, b) => match &**b {
                Expr::Mul(p, q) if is_r_squared(p) => Some(Expr::div((**a).clone(), (**q).clone())),
                Expr::Mul(p, q) if is_r_squared(q) => Some(Expr::div((**a).clone(), (**p).clone())),
                _ => cancel(a).map(|c| Expr::div(c, (**b).clone())),
            },
            Expr::Add(a, b) => Some(Expr::add(cancel(a)?, cancel(b)?)),
            Expr::Sub(a, b) => Some(Expr::sub(cancel(a)?, cancel(b)?)),
            Expr::Neg(a) => Some(Expr::neg(cancel(a)?)),
            Expr::Mul(a, b) => cancel(a)
                .map(|c| Expr::mul(c, (**b).clone()))
                .or_else(|| cancel(b).map(|c| Expr::mul((**a).clone(), c))),
            _ => None,
        }
    }
    cancel(e).unwrap_or_else(|| Expr::mul(e.clone(), Expr::pow(r(), 2.0)))
}

/// Pieces covering [lo, ∞): `extra` everywhere plus g·v where v has pieces.
fn cover(v: &Potential, lo: f64, extra: Option<&Expr>) -> Vec<Piece> {
    let join = |e: Option<Expr>| -> Option<Expr> {
        match (e, extra) {
            (Some(a), Some(b)) => Some(Expr::add(a, b.clone())),
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b.clone()),
            (None, None) => None,
        }
    };
    let mut out = Vec::new();
    let mut at = lo;
    for p in &v.pieces {
        let from = p.from.max(lo);
        if p.to <= from {
            continue;
        }
        if from > at {
            if let Some(e) = join(None) {
                out.push(Piece::new(at, from, e));
            }
        }
        if let Some(e) = join(Some(scaled_expr(&p.expr, v.coupling))) {
            out.push(Piece::new(from, p.to, e));
        }
        at = p.to;
    }
    if at < f64::INFINITY {
        if let Some(e) = join(None) {
            out.push(Piece::new(at, f64::INFINITY, e));
        }
    }
    out
}

/// W(r) = −1/(4r²(ln r)²) + U(ln ln r)/(r²(ln r)²) on r ≥ r_min > 1: the
/// log map followed by one more step of the chain V → U → W.
pub fn iterated_log(u: &Potential, r_min: f64) -> Result<Potential> {
    if u.space != Space::Line {
        return Err(Error::Unsupported("iterated_log acts on a line potential".into()));
    }
    require_full(u, "iterated_log")?;
    if !(r_min > 1.0) {
        return Err(Error::Domain(format!(
            "iterated_log needs r_min > 1 so that ln ln r is defined, got {r_min}"
        )));
    }
    let lnr = Expr::ln(r());
    let den = Expr::mul(Expr::pow(r(), 2.0), Expr::pow(lnr.clone(), 2.0));
    let base = Expr::div(Expr::num(-0.25), den.clone());
    let lnln = Expr::ln(lnr.clone());
    let mut mapped = Potential::zero(Space::Radial, 2);
    for p in &u.pieces {
        let from = p.from.exp().exp();
        let to = p.to.exp().exp();
        if !(from < to) {
            continue;
        }
        let e = Expr::div(p.expr.substitute(&lnln), den.clone()).simplify_logs();
        mapped.pieces.push(Piece::new(from, to, e));
    }
    mapped.coupling = u.coupling;
    let mut w = Potential::zero(Space::Radial, 2);
    w.pieces = cover(&mapped, r_min, Some(&base));
    w.epsilon = u.epsilon;
    w.derivation = u.derivation.clone();
    w.validate()?;
    w.derivation.push(format!("iterated_log(r_min={r_min:?})"));
    Ok(w)
}

/// Ṽ(r) = V(r) + (1 − N/2)²/r², the two-dimensional form of an
/// N-dimensional radial problem.
pub fn nd_reduction(v: &Potential, n: u32) -> Result<Potential> {
    if v.space != Space::Radial {
        return Err(Error::Unsupported("nd_reduction acts on a radial potential".into()));
    }
    if n == 0 {
        return Err(Error::Parameter("N must be at least 1".into()));
    }
    let mut out = if n == 2 {
        v.clone()
    } else {
        require_full(v, "nd_reduction")?;
        let c = (1.0 - 0.5 * n as f64).powi(2);
        let extra = Expr::div(Expr::num(c), Expr::pow(r(), 2.0));
        let mut w = Potential::zero(Space::Radial, 2);
        w.pieces = cover(v, 0.0, Some(&extra));
        w.epsilon = v.epsilon;
        w.derivation = v.derivation.clone();
        w.validate()?;
        w
    };
    out.dimension = 2;
    out.derivation.push(format!("nd_reduction(N={n})"));
    Ok(out)
}

/// The centrifugal coefficient c in V + c/r² for the channel.
pub fn centrifugal(dim: u32, m: f64) -> Result<f64> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::Parameter(format!("angular index must be ≥ 0, got {m}")));
    }
    match dim {
        2 => Ok(m * m - 0.25),
        3 => Ok(m * (m + 1.0)),
        _ => Err(Error::Unsupported(format!(
            "channel reduction in dimension {dim}; apply nd_reduction first"
        ))),
    }
}

/// The half-line potential V + c/r² whose zero-energy node count is the
/// channel's bound-state count (u(0) = 0 boundary).
pub fn channel_reduction(v: &Potential, dim: u32, m: f64) -> Result<Potential> {
    if v.space != Space::Radial {
        return Err(Error::Unsupported("channel_reduction acts on a radial potential".into()));
    }
    let c = centrifugal(dim, m)?;
    let mut out = if c == 0.0 {
        v.clone()
    } else {
        require_full(v, "channel_reduction")?;
        let extra = Expr::div(Expr::num(c), Expr::pow(r(), 2.0));
        let mut w = Potential::zero(Space::Radial, 1);
        w.pieces = cover(v, 0.0, Some(&extra));
        w.epsilon = v.epsilon;
        w.derivation = v.derivation.clone();
        w.validate()?;
        w
    };
    out.dimension = 1;
    out.derivation.push(format!("channel_reduction(dim={dim}, m={m:?})"));
    Ok(out)
}
