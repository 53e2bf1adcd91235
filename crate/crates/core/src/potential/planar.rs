//! Non-central planar potentials, decreasing rearrangement and the angular
//! supremum.

use std::f64::consts::PI;

use serde::Serialize;

use super::{Convergence, Part, Piece, Potential, Space};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Planar {
    /// A radial 2D potential centered at the origin.
    Radial(Potential),
    /// A radial profile centered elsewhere.
    Shifted { base: Potential, center: [f64; 2] },
    Sum(Vec<Planar>),
}

impl Planar {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Planar::Radial(v) => v.eval(x.hypot(y)),
            Planar::Shifted { base, center } => base.eval((x - center[0]).hypot(y - center[1])),
            Planar::Sum(parts) => parts.iter().map(|p| p.eval(x, y)).sum(),
        }
    }

    pub fn eval_negative(&self, x: f64, y: f64) -> f64 {
        (-self.eval(x, y)).max(0.0)
    }

    /// Radius of a disk about the origin outside which every component with
    /// compact support vanishes.
    pub fn extent(&self) -> f64 {
        match self {
            Planar::Radial(v) => v.support_end(),
            Planar::Shifted { base, center } => center[0].hypot(center[1]) + base.support_end(),
            Planar::Sum(parts) => parts.iter().map(Planar::extent).fold(0.0, f64::max),
        }
    }

    fn components(&self) -> Vec<(&Potential, [f64; 2])> {
        match self {
            Planar::Radial(v) => vec![(v, [0.0, 0.0])],
            Planar::Shifted { base, center } => vec![(base, *center)],
            Planar::Sum(parts) => parts.iter().flat_map(Planar::components).collect(),
        }
    }

    fn check_integrable(&self) -> Result<()> {
        for (v, _) in self.components() {
            if v.negative_part().radial_moment_convergence() == Convergence::Infinite {
                return Err(Error::Divergent(
                    "V⁻ has a level set of infinite measure".into(),
                ));
            }
        }
        Ok(())
    }

    /// Same potential translated by `d`.
    pub fn translated(&self, d: [f64; 2]) -> Planar {
        match self {
            Planar::Radial(v) => Planar::Shifted {
                base: v.clone(),
                center: d,
            },
            Planar::Shifted { base, center } => Planar::Shifted {
                base: base.clone(),
                center: [center[0] + d[0], center[1] + d[1]],
            },
            Planar::Sum(parts) => Planar::Sum(parts.iter().map(|p| p.translated(d)).collect()),
        }
    }
}

/// A square of `points × points` interior nodes with spacing
/// h = 2·half_width / (points + 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec2d {
    pub half_width: f64,
    pub points: usize,
}

impl GridSpec2d {
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points + 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + (i + 1) as f64 * self.spacing()
    }
}

const MAX_LEVELS: usize = 4096;

/// Piecewise-constant radial profile from samples of V⁻ with their areas.
fn profile_from_samples(mut samples: Vec<(f64, f64)>) -> Potential {
    samples.retain(|s| s.0 > 0.0);
    samples.sort_by(|a, b| b.0.total_cmp(&a.0));
    // Merge equal levels.
    let mut levels: Vec<(f64, f64)> = Vec::new();
    for (v, a) in samples {
        match levels.last_mut() {
            Some(last) if (last.0 - v).abs() <= 1e-12 * last.0 => {
                let area = last.1 + a;
                last.0 = (last.0 * last.1 + v * a) / area;
                last.1 = area;
            }
            _ => levels.push((v, a)),
        }
    }
    if levels.len() > MAX_LEVELS {
        // Equal-area blocks with mean value; preserves the integral.
        let total: f64 = levels.iter().map(|l| l.1).sum();
        let block = total / MAX_LEVELS as f64;
        let mut merged = Vec::with_capacity(MAX_LEVELS);
        let (mut mass, mut area) = (0.0, 0.0);
        for (v, a) in levels {
            mass += v * a;
            area += a;
            if area >= block {
                merged.push((mass / area, area));
                mass = 0.0;
                area = 0.0;
            }
        }
        if area > 0.0 {
            merged.push((mass / area, area));
        }
        levels = merged;
    }
    let mut pieces = Vec::with_capacity(levels.len());
    let mut cum = 0.0;
    let mut r_prev = 0.0;
    for (v, a) in levels {
        cum += a;
        let r = (cum / PI).sqrt();
        if r > r_prev {
            pieces.push(Piece::constant(r_prev, r, -v));
            r_prev = r;
        }
    }
    let mut out = Potential::zero(Space::Radial, 2);
    out.pieces = pieces;
    out.part = Part::Negative;
    out
}

/// Decreasing rearrangement V_R of V⁻ sampled on a square grid. The result
/// evaluates to V_R ≥ 0 (it is stored as the negative part of −V_R).
pub fn decreasing_rearrangement(v: &Planar, grid: &GridSpec2d) -> Result<Potential> {
    if grid.points < 2 {
        return Err(Error::Parameter("grid needs at least 2 points per side".into()));
    }
    if let Planar::Radial(p) = v {
        return radial_rearrangement(p);
    }
    v.check_integrable()?;
    let h = grid.spacing();
    let mut samples = Vec::with_capacity(grid.points * grid.points);
    for i in 0..grid.points {
        for j in 0..grid.points {
            let val = v.eval_negative(grid.coord(i), grid.coord(j));
            if !val.is_finite() {
                return Err(Error::Divergent("V⁻ is not finite on the grid".into()));
            }
            samples.push((val, h * h));
        }
    }
    Ok(profile_from_samples(samples).with_step("decreasing_rearrangement"))
}

/// Rearrangement of a radial potential from fine annular samples.
pub fn radial_rearrangement(v: &Potential) -> Result<Potential> {
    if v.space != Space::Radial {
        return Err(Error::Unsupported("rearrangement needs a radial potential".into()));
    }
    let neg = v.negative_part();
    if neg.radial_moment_convergence() == Convergence::Infinite {
        return Err(Error::Divergent("V⁻ has a level set of infinite measure".into()));
    }
    let mut edges = vec![0.0];
    edges.extend(v.breakpoints().into_iter().filter(|&b| b > 0.0));
    let mut samples = Vec::new();
    for w in edges.windows(2) {
        annuli(&neg, w[0], w[1], 400, &mut samples);
    }
    if v.pieces.last().is_some_and(|p| p.to == f64::INFINITY) {
        let a = *edges.last().unwrap_or(&0.0);
        let a = if a > 0.0 { a } else { 1.0 };
        // Geometric annuli out to 10⁶·a for an unbounded tail.
        let n = 3000;
        let q = 1e6f64.powf(1.0 / n as f64);
        let mut lo = a;
        for _ in 0..n {
            annuli(&neg, lo, lo * q, 1, &mut samples);
            lo *= q;
        }
    }
    Ok(profile_from_samples(samples).with_step("decreasing_rearrangement"))
}

fn annuli(v: &Potential, a: f64, b: f64, n: usize, out: &mut Vec<(f64, f64)>) {
    for k in 0..n {
        let r0 = a + (b - a) * k as f64 / n as f64;
        let r1 = a + (b - a) * (k + 1) as f64 / n as f64;
        let mid = 0.5 * (r0 + r1);
        out.push((v.eval(mid), PI * (r1 * r1 - r0 * r0)));
    }
}

/// B(r) = sup_θ V⁻(r, θ) with the radii where it is infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularSup {
    /// B as a radial potential (evaluates to B ≥ 0).
    pub profile: Potential,
    /// Radius intervals on which B is infinite (a single circle is [r, r]).
    pub singular: Vec<(f64, f64)>,
}

impl AngularSup {
    /// An infinite B anywhere makes the sup replacement useless.
    pub fn catastrophic(&self) -> bool {
        !self.singular.is_empty()
    }
}

/// Radii at which a centered profile is infinite: the shell radius of a
/// regularized delta, or a singular point of the expression.
fn singular_radii(v: &Potential) -> Vec<f64> {
    if v.epsilon.is_some() {
        v.pieces.iter().map(|p| 0.5 * (p.from + p.to)).collect()
    } else {
        v.singular_points()
    }
}

pub fn sup_over_angle(v: &Planar, r_max: f64, n_r: usize, n_theta: usize) -> Result<AngularSup> {
    let mut singular = Vec::new();
    for (base, c) in v.components() {
        let d = c[0].hypot(c[1]);
        for s in singular_radii(base) {
            singular.push(((d - s).abs(), d + s));
        }
    }
    if let Planar::Radial(p) = v {
        return Ok(AngularSup {
            profile: p.negative_part().with_step("sup_over_angle"),
            singular,
        });
    }
    if !(r_max > 0.0) || n_r < 2 || n_theta < 4 {
        return Err(Error::Parameter("sup_over_angle needs r_max > 0, n_r ≥ 2, n_theta ≥ 4".into()));
    }
    let sample = |r: f64| -> f64 {
        (0..n_theta)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n_theta as f64;
                v.eval_negative(r * t.cos(), r * t.sin())
            })
            .fold(0.0, f64::max)
    };
    let radii: Vec<f64> = (0..=n_r).map(|k| r_max * k as f64 / n_r as f64).collect();
    let vals: Vec<f64> = radii.iter().map(|&r| sample(r)).collect();
    let mut pieces: Vec<Piece> = Vec::new();
    for k in 0..n_r {
        let b = vals[k].max(vals[k + 1]);
        if b <= 0.0 {
            continue;
        }
        match pieces.last_mut() {
            Some(last) if last.to == radii[k] && last.expr.eval(0.0) == -b => last.to = radii[k + 1],
            _ => pieces.push(Piece::constant(radii[k], radii[k + 1], -b)),
        }
    }
    let mut profile = Potential::zero(Space::Radial, 2);
    profile.pieces = pieces;
    profile.part = Part::Negative;
    Ok(AngularSup {
        profile: profile.with_step("sup_over_angle"),
        singular,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_breaks;

    fn disk(g: f64, radius: f64) -> Potential {
        Potential::new(Space::Radial, 2, vec![Piece::constant(0.0, radius, -g)]).unwrap()
    }

    fn mass(v: &Potential) -> f64 {
        let mut b = vec![0.0];
        b.extend(v.breakpoints().into_iter().filter(|&x| x > 0.0));
        integrate_breaks(|r| 2.0 * PI * r * v.eval(r), &b, 1e-12).value
    }

    #[test]
    fn radial_decreasing_is_fixed_point() {
        let v = disk(2.0, 1.0);
        let r = radial_rearrangement(&v).unwrap();
        assert_eq!(r.pieces.len(), 1);
        assert!((r.pieces[0].to - 1.0).abs() < 1e-12);
        assert_eq!(r.eval(0.5), 2.0);
    }

    #[test]
    fn shifted_disk_rearranges_to_centered() {
        let p = Planar::Radial(disk(1.0, 1.0)).translated([2.0, 0.0]);
        let grid = GridSpec2d {
            half_width: 4.0,
            points: 801,
        };
        let r = decreasing_rearrangement(&p, &grid).unwrap();
        assert!((r.support_end() - 1.0).abs() < 0.02);
        assert!((mass(&r) - PI).abs() / PI < 1e-3 * 5.0);
    }

    #[test]
    fn two_disks_rearrange_to_sqrt2() {
        let d = disk(1.0, 1.0);
        let p = Planar::Sum(vec![
            Planar::Radial(d.clone()).translated([-2.0, 0.0]),
            Planar::Radial(d).translated([2.0, 0.0]),
        ]);
        let grid = GridSpec2d {
            half_width: 4.0,
            points: 801,
        };
        let r = decreasing_rearrangement(&p, &grid).unwrap();
        assert!((r.support_end() - 2f64.sqrt()).abs() < 0.02);
        let mut prev = f64::INFINITY;
        for k in 0..400 {
            let v = r.eval(k as f64 * 0.005);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn annulus_rearrangement_preserves_mass() {
        let v = Potential::new(
            Space::Radial,
            2,
            vec![Piece::constant(0.0, 1.0, -0.5), Piece::constant(2.0, 3.0, -1.0)],
        )
        .unwrap();
        let r = radial_rearrangement(&v).unwrap();
        let want = PI * 0.5 + PI * 5.0;
        assert!((mass(&r) - want).abs() / want < 1e-3);
        assert!((r.eval(0.1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sup_of_shifted_disk_is_annulus() {
        let p = Planar::Radial(disk(3.0, 1.0)).translated([2.0, 0.0]);
        let s = sup_over_angle(&p, 5.0, 500, 360).unwrap();
        assert!(!s.catastrophic());
        assert_eq!(s.profile.eval(0.5), 0.0);
        assert_eq!(s.profile.eval(1.5), 3.0);
        assert_eq!(s.profile.eval(2.9), 3.0);
        assert_eq!(s.profile.eval(3.5), 0.0);
    }

    #[test]
    fn sup_of_radial_is_negative_part() {
        let v = disk(1.0, 1.0);
        let s = sup_over_angle(&Planar::Radial(v.clone()), 2.0, 10, 8).unwrap();
        assert_eq!(s.profile, v.negative_part().with_step("sup_over_angle"));
    }

    #[test]
    fn singular_wells_are_flagged() {
        let sing = Potential::new(
            Space::Radial,
            2,
            vec![Piece::new(0.0, 0.5, crate::expr::parse("-1/r").unwrap())],
        )
        .unwrap();
        let p = Planar::Sum(vec![
            Planar::Radial(sing.clone()).translated([2.0, 0.0]),
            Planar::Radial(sing).translated([0.0, -4.0]),
        ]);
        let s = sup_over_angle(&p, 6.0, 200, 90).unwrap();
        assert!(s.catastrophic());
        assert_eq!(s.singular, vec![(2.0, 2.0), (4.0, 4.0)]);
    }
}
