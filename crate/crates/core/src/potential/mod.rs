//! Piecewise potentials on a line or half-line.

mod catalog;
mod file;
mod planar;

pub use catalog::{make_catalog, make_planar, CatalogId, LogLogForm, DEFAULT_EPSILON};
pub use planar::{
    decreasing_rearrangement, radial_rearrangement, sup_over_angle, AngularSup, GridSpec2d,
    Planar,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Expr, TailSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Line,
    Radial,
}

/// Which sign component of `g·v` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Full,
    /// V⁻ = max(−V, 0) ≥ 0.
    Negative,
    /// min(V, 0), the attractive component with its sign kept.
    Attractive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub from: f64,
    pub to: f64,
    pub source: String,
    pub expr: Expr,
}

impl Piece {
    pub fn new(from: f64, to: f64, expr: Expr) -> Piece {
        Piece {
            from,
            to,
            source: expr.to_string(),
            expr,
        }
    }

    pub fn constant(from: f64, to: f64, v: f64) -> Piece {
        Piece::new(from, to, Expr::num(v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub space: Space,
    pub dimension: u32,
    pub pieces: Vec<Piece>,
    pub coupling: f64,
    pub part: Part,
    /// Width used when a delta function was replaced by a square well.
    pub epsilon: Option<f64>,
    /// Chain of transforms that produced this potential, oldest first.
    pub derivation: Vec<String>,
}

/// Result of the ∫ r |V| dr convergence test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convergence {
    Finite,
    Infinite,
    /// No closed-form tail pattern; numerical evidence only.
    Unknown,
}

impl Potential {
    pub fn new(space: Space, dimension: u32, pieces: Vec<Piece>) -> Result<Potential> {
        let p = Potential {
            space,
            dimension,
            pieces,
            coupling: 1.0,
            part: Part::Full,
            epsilon: None,
            derivation: Vec::new(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn zero(space: Space, dimension: u32) -> Potential {
        Potential {
            space,
            dimension,
            pieces: Vec::new(),
            coupling: 1.0,
            part: Part::Full,
            epsilon: None,
            derivation: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidPotential(m));
        if self.dimension == 0 {
            return bad("dimension must be at least 1".into());
        }
        if self.space == Space::Line && self.dimension != 1 {
            return bad("a line potential has dimension 1".into());
        }
        if !self.coupling.is_finite() {
            return bad("coupling must be finite".into());
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return bad(format!("epsilon must be positive, got {e}"));
            }
        }
        let lower = self.domain().0;
        let mut prev = lower;
        for (k, p) in self.pieces.iter().enumerate() {
            if p.from.is_nan() || p.to.is_nan() || !(p.from < p.to) {
                return bad(format!("piece {k}: empty or reversed interval [{}, {}]", p.from, p.to));
            }
            if p.from < prev {
                return bad(format!("piece {k} overlaps its predecessor or leaves the domain"));
            }
            prev = p.to;
            for x in interior_samples(p.from, p.to) {
                let v = p.expr.eval(x);
                if !v.is_finite() {
                    return bad(format!("piece {k}: '{}' is not finite at {x}", p.source));
                }
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> (f64, f64) {
        match self.space {
            Space::Line => (f64::NEG_INFINITY, f64::INFINITY),
            Space::Radial => (0.0, f64::INFINITY),
        }
    }

    fn piece_at(&self, x: f64) -> Option<&Piece> {
        let i = self.pieces.partition_point(|p| p.to <= x);
        self.pieces.get(i).filter(|p| p.from <= x)
    }

    /// Raw value of the expression times the coupling, before the sign part.
    fn raw(&self, x: f64) -> f64 {
        match self.piece_at(x) {
            Some(p) => self.coupling * p.expr.eval(x),
            None => 0.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let v = self.raw(x);
        match self.part {
            Part::Full => v,
            Part::Negative => (-v).max(0.0),
            Part::Attractive => v.min(0.0),
        }
    }

    /// V⁻ = max(−V, 0).
    pub fn negative_part(&self) -> Potential {
        let mut p = self.clone();
        p.part = Part::Negative;
        p
    }

    /// min(V, 0); idempotent, and `negative_part` of it equals V⁻.
    pub fn attractive_part(&self) -> Potential {
        let mut p = self.clone();
        if p.part == Part::Full {
            p.part = Part::Attractive;
        }
        p
    }

    /// g·V for g ≥ 0.
    pub fn scaled(&self, g: f64) -> Potential {
        let mut p = self.clone();
        p.coupling *= g;
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coupling == 0.0 || self.pieces.iter().all(|p| p.expr.is_zero_literal())
    }

    /// Finite piece endpoints in increasing order, deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| [p.from, p.to])
            .filter(|x| x.is_finite())
            .collect();
        v.dedup();
        v
    }

    /// Largest finite breakpoint, or 0 for the empty potential.
    pub fn support_end(&self) -> f64 {
        self.breakpoints().last().copied().unwrap_or(0.0).max(0.0)
    }

    /// Smallest finite breakpoint, or 0 for the empty potential.
    pub fn support_start(&self) -> f64 {
        self.breakpoints().first().copied().unwrap_or(0.0).min(0.0)
    }

    pub fn has_right_tail(&self) -> bool {
        self.pieces.last().is_some_and(|p| p.to == f64::INFINITY && !p.expr.is_zero_literal())
    }

    pub fn has_left_tail(&self) -> bool {
        self.pieces
            .first()
            .is_some_and(|p| p.from == f64::NEG_INFINITY && !p.expr.is_zero_literal())
    }

    /// Asymptotic series of `coupling · v` on the unbounded piece at +∞
    /// (`left = false`) or −∞ (`left = true`, in the variable t = −x).
    /// `Some(empty)` means the tail is identically zero.
    pub fn tail_series(&self, left: bool) -> Option<TailSeries> {
        let piece = if left {
            self.pieces.first().filter(|p| p.from == f64::NEG_INFINITY)
        } else {
            self.pieces.last().filter(|p| p.to == f64::INFINITY)
        };
        let Some(piece) = piece else {
            return Some(TailSeries::default());
        };
        let s = TailSeries::of_expr(&piece.expr, left)?.scale(self.coupling);
        let lead = s.leading().copied();
        Some(match (self.part, lead) {
            (Part::Full, _) | (_, None) => s,
            (Part::Negative, Some(m)) if m.c < 0.0 => s.scale(-1.0),
            (Part::Attractive, Some(m)) if m.c < 0.0 => s,
            _ => TailSeries::default(),
        })
    }

    /// True when V is bounded on its domain, judged from the tail series and
    /// samples next to each breakpoint.
    pub fn is_bounded(&self) -> bool {
        for left in [false, true] {
            match self.tail_series(left) {
                Some(s) => {
                    if s.leading().is_some_and(|m| !m.vanishes() && !m.is_constant()) {
                        return false;
                    }
                }
                None => return false,
            }
        }
        self.singular_points().is_empty()
    }

    /// Finite points next to which |V| exceeds 10¹⁰ (0 included for radial).
    pub fn singular_points(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut candidates = self.breakpoints();
        if self.space == Space::Radial && !candidates.contains(&0.0) {
            candidates.insert(0, 0.0);
        }
        for c in candidates {
            let mut hit = false;
            for k in [1e-13, 1e-11, 1e-9] {
                let d = k * c.abs().max(1.0);
                for x in [c - d, c + d] {
                    if self.space == Space::Radial && x <= 0.0 {
                        continue;
                    }
                    let v = self.eval(x);
                    if !v.is_finite() || v.abs() > 1e10 {
                        hit = true;
                    }
                }
            }
            if hit {
                out.push(c);
            }
        }
        out
    }

    /// Symbolic test of ∫^∞ r |V| dr at the outer end; inner ends are checked
    /// by sampling r²|V| as r → 0.
    pub fn radial_moment_convergence(&self) -> Convergence {
        let inner_ok = if self.space == Space::Radial {
            (4..=12).all(|k| {
                let r = 10f64.powi(-k);
                r * r * self.eval(r).abs() < 1e-3
            })
        } else {
            true
        };
        if !inner_ok {
            return Convergence::Infinite;
        }
        match self.tail_series(false) {
            None => Convergence::Unknown,
            Some(s) => match s.leading() {
                None => Convergence::Finite,
                Some(m) => {
                    // r·V ~ r^{p+1} (ln r)^q (ln ln r)^s
                    let p = m.p + 1.0;
                    let conv = p < -1.0
                        || (p == -1.0 && (m.q < -1.0 || (m.q == -1.0 && m.s < -1.0)));
                    if conv {
                        Convergence::Finite
                    } else {
                        Convergence::Infinite
                    }
                }
            },
        }
    }

    /// Record a derivation step.
    pub fn with_step(mut self, step: impl Into<String>) -> Potential {
        self.derivation.push(step.into());
        self
    }

    /// Short description used in reports.
    pub fn descriptor(&self) -> String {
        self.to_json()
    }
}

/// Sample points strictly inside (a, b), geometric on unbounded sides.
pub(crate) fn interior_samples(a: f64, b: f64) -> Vec<f64> {
    const N: usize = 17;
    let mut out = Vec::with_capacity(N);
    match (a.is_finite(), b.is_finite()) {
        (true, true) => {
            for k in 1..=N {
                out.push(a + (b - a) * k as f64 / (N + 1) as f64);
            }
        }
        (true, false) => {
            let s = a.abs().max(1.0);
            for k in 1..=N {
                out.push(a + s * (2f64.powi(k as i32 - 4)));
            }
        }
        (false, true) => {
            let s = b.abs().max(1.0);
            for k in 1..=N {
                out.push(b - s * (2f64.powi(k as i32 - 4)));
            }
        }
        (false, false) => {
            for k in 0..N {
                let t = (k as f64 - 8.0) * 0.75;
                out.push(t.signum() * (t.abs().exp() - 1.0));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn well(g: f64) -> Potential {
        Potential::new(
            Space::Radial,
            2,
            vec![Piece::constant(0.0, 1.0, -g)],
        )
        .unwrap()
    }

    #[test]
    fn evaluation_and_gaps() {
        let v = well(2.0);
        assert_eq!(v.eval(0.5), -2.0);
        assert_eq!(v.eval(1.0), 0.0);
        assert_eq!(v.eval(5.0), 0.0);
    }

    #[test]
    fn negative_part_cases() {
        let v = well(3.0).negative_part();
        assert_eq!(v.eval(0.5), 3.0);
        let rep = Potential::new(Space::Line, 1, vec![Piece::constant(-1.0, 1.0, 5.0)]).unwrap();
        assert_eq!(rep.negative_part().eval(0.0), 0.0);
    }

    #[test]
    fn negative_part_matches_pointwise_grid() {
        let e = parse("x^2 - 1").unwrap();
        let v = Potential::new(
            Space::Line,
            1,
            vec![
                Piece::new(-2.0, 0.0, e.clone()),
                Piece::new(0.0, 2.0, parse("-exp(-x)*(1 - x)").unwrap()),
            ],
        )
        .unwrap();
        let n = v.negative_part();
        for k in 0..1000 {
            let x = -3.0 + 6.0 * k as f64 / 999.0;
            assert_eq!(n.eval(x), (-v.eval(x)).max(0.0));
        }
    }

    #[test]
    fn attractive_part_is_idempotent() {
        let e = parse("x^2 - 1").unwrap();
        let v = Potential::new(Space::Line, 1, vec![Piece::new(-2.0, 2.0, e)]).unwrap();
        let a = v.attractive_part();
        assert_eq!(a.attractive_part(), a);
        for k in 0..101 {
            let x = -2.0 + 0.04 * k as f64;
            assert_eq!(a.negative_part().eval(x), v.negative_part().eval(x));
        }
    }

    #[test]
    fn rejects_bad_pieces() {
        assert!(Potential::new(Space::Line, 1, vec![Piece::constant(1.0, 0.0, 1.0)]).is_err());
        assert!(Potential::new(
            Space::Line,
            1,
            vec![Piece::constant(0.0, 2.0, 1.0), Piece::constant(1.0, 3.0, 1.0)]
        )
        .is_err());
        assert!(Potential::new(Space::Radial, 2, vec![Piece::constant(-1.0, 1.0, 1.0)]).is_err());
        let log = parse("ln(x)").unwrap();
        assert!(Potential::new(Space::Line, 1, vec![Piece::new(-1.0, 1.0, log)]).is_err());
        assert!(Potential::new(Space::Line, 2, vec![]).is_err());
    }

    #[test]
    fn moment_convergence_from_tail() {
        let tail = |src: &str| {
            Potential::new(Space::Radial, 2, vec![Piece::new(2.0, f64::INFINITY, parse(src).unwrap())])
                .unwrap()
                .radial_moment_convergence()
        };
        assert_eq!(tail("-1/r^2"), Convergence::Infinite);
        assert_eq!(tail("-1/(r^2*ln(r)^2)"), Convergence::Finite);
        assert_eq!(tail("-1/(r^2*ln(r))"), Convergence::Infinite);
        assert_eq!(tail("-1/r^3"), Convergence::Finite);
        assert_eq!(well(1.0).radial_moment_convergence(), Convergence::Finite);
    }

    #[test]
    fn boundedness() {
        assert!(well(1.0).is_bounded());
        let sing = Potential::new(Space::Radial, 2, vec![Piece::new(0.0, 1.0, parse("-1/r").unwrap())])
            .unwrap();
        assert_eq!(sing.singular_points(), vec![0.0]);
        assert!(!sing.is_bounded());
    }
}
