use serde::Serialize;

use crate::error::Result;
use crate::expr::{Monomial, TailSeries};
use crate::potential::{Potential, Space};

use super::effective_m2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TailClass {
    Finite,
    Marginal,
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub class: TailClass,
    /// Which tail test decided: COMPACT, EQ8, EQ9, EQ15, BORDERLINE, NUMERIC
    /// or UNCLASSIFIABLE.
    pub evidence: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Classification {
    fn new(class: TailClass, evidence: &str) -> Self {
        Classification {
            class,
            evidence: evidence.into(),
            reason: None,
        }
    }
}

const CRITICAL: f64 = -0.25;
const BORDER_TOL: f64 = 1e-12;

/// Limit of a series as x → ∞ (±∞ for growing leading terms).
fn limit(s: &TailSeries) -> f64 {
    match s.leading() {
        None => 0.0,
        Some(m) if m.vanishes() => 0.0,
        Some(m) if m.is_constant() => m.c,
        Some(m) => m.c.signum() * f64::INFINITY,
    }
}

fn without_constant(s: &TailSeries) -> TailSeries {
    TailSeries::from_terms(s.terms.iter().filter(|m| !m.is_constant()).copied().collect())
}

/// Levelled test on T = x² V_eff against −1/4: first T itself, then
/// (T + 1/4) ln²x, then the next remainder times (ln ln x)².
fn classify_series(t: TailSeries, radial: bool) -> Classification {
    let logs = [
        Monomial { c: 1.0, p: 0.0, q: 2.0, s: 0.0 },
        Monomial { c: 1.0, p: 0.0, q: 0.0, s: 2.0 },
    ];
    let ids = ["EQ8", if radial { "EQ15" } else { "EQ9" }, "EQ9"];
    let mut t = t;
    for level in 0..3 {
        if level > 0 && t.is_zero() {
            let mut c = Classification::new(TailClass::Marginal, "BORDERLINE");
            c.reason = Some("tail sits exactly on the critical coupling".into());
            return c;
        }
        let l = limit(&t);
        if l < CRITICAL - BORDER_TOL {
            return Classification::new(TailClass::Infinite, ids[level]);
        }
        if l > CRITICAL + BORDER_TOL {
            return Classification::new(TailClass::Finite, ids[level]);
        }
        if level < 2 {
            t = without_constant(&t).mul_monomial(logs[level]);
        }
    }
    let mut c = Classification::new(TailClass::Marginal, "BORDERLINE");
    c.reason = Some("critical at every iterated-log level".into());
    c
}

fn numeric(v: &Potential, left: bool, offset: f64) -> Classification {
    let sign = if left { -1.0 } else { 1.0 };
    let xs: Vec<f64> = (3..=12).map(|k| 10f64.powi(2 * k)).collect();
    let weight = |x: f64| {
        let w = if offset <= CRITICAL + BORDER_TOL { x.ln().powi(2) } else { 1.0 };
        x * x * v.eval(sign * x) * w
    };
    let vals: Vec<f64> = xs.iter().map(|&x| weight(x)).collect();
    let decaying = vals.iter().all(|y| y.is_finite())
        && vals.last().is_some_and(|y| y.abs() < 1e-8)
        && vals.windows(2).all(|w| w[1].abs() <= w[0].abs() + 1e-300);
    if decaying && offset + 1e-8 > CRITICAL - BORDER_TOL {
        return Classification::new(TailClass::Finite, "NUMERIC");
    }
    let mut c = Classification::new(TailClass::Marginal, "UNCLASSIFIABLE");
    c.reason = Some("tail does not match c·x^p(ln x)^q(ln ln x)^s".into());
    c
}

fn side(v: &Potential, left: bool, offset: f64, radial: bool) -> Classification {
    match v.tail_series(left) {
        Some(s) if s.is_zero() => Classification::new(TailClass::Finite, "COMPACT"),
        Some(s) => {
            let t = s
                .mul_monomial(Monomial { c: 1.0, p: 2.0, q: 0.0, s: 0.0 })
                .add(&TailSeries::constant(offset));
            classify_series(t, radial)
        }
        None => numeric(v, left, offset),
    }
}

fn combine(sides: Vec<Classification>) -> Classification {
    let worst = sides.iter().map(|c| c.class).max().unwrap_or(TailClass::Finite);
    let mut pick = sides.iter().filter(|c| c.class == worst);
    let first = pick.next().cloned().expect("at least one side");
    if worst == TailClass::Finite && first.evidence == "COMPACT" {
        if let Some(other) = pick.find(|c| c.evidence != "COMPACT") {
            return other.clone();
        }
    }
    first
}

/// Finiteness of the bound-state count from the tail behaviour alone.
/// Radial potentials are judged in their lowest channel.
pub fn classify_tail(v: &Potential) -> Classification {
    match v.space {
        Space::Line => combine(vec![side(v, false, 0.0, false), side(v, true, 0.0, false)]),
        Space::Radial => {
            let m2 = effective_m2(v.dimension.max(1), 0.0).unwrap_or(0.25);
            side(v, false, m2 - 0.25, v.dimension == 2)
        }
    }
}

/// Tail classification in angular channel m (centrifugal term included).
pub fn classify_channel(v: &Potential, m: f64) -> Result<Classification> {
    let m2 = effective_m2(v.dimension, m)?;
    Ok(side(v, false, m2 - 0.25, v.dimension == 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{make_catalog, CatalogId, LogLogForm};

    fn class_of(id: CatalogId) -> Classification {
        classify_tail(&make_catalog(&id).unwrap())
    }

    #[test]
    fn inverse_square_thresholds() {
        let c = class_of(CatalogId::InverseSquareTail { lambda: 1.25, x0: 1.0 });
        assert_eq!((c.class, c.evidence.as_str()), (TailClass::Infinite, "EQ8"));
        let c = class_of(CatalogId::InverseSquareTail { lambda: 0.125, x0: 1.0 });
        assert_eq!(c.class, TailClass::Finite);
        let c = class_of(CatalogId::InverseSquareTail { lambda: 0.25, x0: 1.0 });
        assert_eq!(c.class, TailClass::Marginal);
    }

    #[test]
    fn iterated_log_levels() {
        for (form, mu, want) in [
            (LogLogForm::First, 2.0, TailClass::Infinite),
            (LogLogForm::First, 0.5, TailClass::Finite),
            (LogLogForm::First, 1.0, TailClass::Marginal),
            (LogLogForm::Second, 2.0, TailClass::Infinite),
            (LogLogForm::Second, 0.5, TailClass::Finite),
        ] {
            let c = class_of(CatalogId::LogLogTail { form, mu, x0: 3.0 });
            assert_eq!(c.class, want, "{form:?} μ={mu}: {c:?}");
        }
    }

    #[test]
    fn radial_log_tail() {
        let c = class_of(CatalogId::LogTail { mu: 2.0, r: 1.0, r0: 2.0 });
        assert_eq!((c.class, c.evidence.as_str()), (TailClass::Infinite, "EQ15"));
        let c = class_of(CatalogId::LogTail { mu: 0.5, r: 1.0, r0: 2.0 });
        assert_eq!(c.class, TailClass::Finite);
        let c = class_of(CatalogId::LogTail { mu: 1.0, r: 1.0, r0: 2.0 });
        assert_eq!(c.class, TailClass::Marginal);
    }

    #[test]
    fn compact_and_higher_channels() {
        let v = make_catalog(&CatalogId::SquareWell { depth: 1.0, radius: 1.0, dimension: 2 }).unwrap();
        assert_eq!(classify_tail(&v).evidence, "COMPACT");
        let v = make_catalog(&CatalogId::LogTail { mu: 2.0, r: 1.0, r0: 2.0 }).unwrap();
        assert_eq!(classify_channel(&v, 1.0).unwrap().class, TailClass::Finite);
    }
}
