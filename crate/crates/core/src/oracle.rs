//! Finite-difference ground truth for bound-state counts, independent of
//! the Prüfer integrator, plus closed-form counters for square wells.
//!
//! Radial channels are discretized on a grid uniform in s = ln r, where the
//! zero-energy equation reads −φ'' + (ν² + r²V) φ = 0 and the inertia of the
//! Dirichlet matrix counts the eigenvalues below zero.

use crate::counting::effective_m2;
use crate::error::{Error, Result};
use crate::moments::negative_moment;
use crate::potential::{GridSpec2d, Planar, Potential, Space};
use crate::specfun::bessel_jy;

/// Uniform Dirichlet grid on [x_min, x_max] (in ln r for radial channels).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

pub const MIN_POINTS: usize = 64;
const MAX_POINTS: usize = 4_000_000;

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<GridSpec> {
        if points < MIN_POINTS {
            return Err(Error::Parameter(format!("grid needs ≥ {MIN_POINTS} points, got {points}")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Parameter(format!("bad grid extent [{x_min}, {x_max}]")));
        }
        Ok(GridSpec { x_min, x_max, points })
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.points + 1) as f64
    }

    fn refined(&self) -> GridSpec {
        GridSpec {
            points: 2 * self.points + 1,
            ..*self
        }
    }

    /// Box and spacing for a line potential: wide enough for weakly bound
    /// states, fine enough to resolve the support.
    pub fn for_line(v: &Potential) -> Result<GridSpec> {
        let (a, b) = (v.support_start(), v.support_end());
        let width = (b - a).max(1e-3);
        let mass = negative_moment(v, 0.0).unwrap_or(1.0).max(1e-6);
        let pad = (20.0 * width).max(40.0 / mass).clamp(10.0, 1e4);
        let (lo, hi) = (a - pad, b + pad);
        let depth = peak_negative(|x| v.eval(x), a, b);
        let h = (width / 400.0).min(0.05).min(0.2 / depth.sqrt().max(1e-9));
        let points = (((hi - lo) / h) as usize).clamp(MIN_POINTS, MAX_POINTS);
        GridSpec::new(lo, hi, points)
    }

    /// Grid in s = ln r for channel m of a radial potential.
    pub fn for_channel(v: &Potential, m: f64) -> Result<GridSpec> {
        let m2 = effective_m2(v.dimension, m)?;
        let first = v.breakpoints().into_iter().find(|&x| x > 0.0).unwrap_or(1.0);
        let last = v.support_end().max(first);
        let strength = negative_moment(v, 1.0).unwrap_or(1.0).max(1e-6);
        let reach = if m2 < 1e-12 { 60.0 / strength + 30.0 } else { 40.0 / m2.sqrt().max(0.25) };
        let reach = reach.min(2000.0);
        let lo = first.ln() - reach.max(15.0);
        let hi = last.ln() + reach;
        let q = |s: f64| (2.0 * s).exp() * v.eval(s.exp());
        let depth = peak_negative(q, first.ln() - 5.0, last.ln());
        let h = (0.01f64).min(0.2 / depth.sqrt().max(1e-9)).min(layer_width(v) / 20.0);
        let points = (((hi - lo) / h) as usize).clamp(MIN_POINTS, MAX_POINTS);
        GridSpec::new(lo, hi, points)
    }
}

/// Thinnest piece of the potential in ln r, so thin shells get resolved.
fn layer_width(v: &Potential) -> f64 {
    v.pieces
        .iter()
        .filter(|p| p.from > 0.0 && p.to.is_finite())
        .map(|p| (p.to / p.from).ln())
        .fold(1.0, f64::min)
}

fn peak_negative(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    (0..=400)
        .map(|i| f(a + (b - a) * i as f64 / 400.0))
        .fold(0.0f64, |m, y| m.max(-y))
}

/// Counts on a grid and on its 2× refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct FdCount {
    pub count: u64,
    pub refined: u64,
}

impl FdCount {
    pub fn stable(&self) -> bool {
        self.count == self.refined
    }

    /// The refined count, or an error carrying both when refinement moved it.
    pub fn value(&self) -> Result<u64> {
        if self.stable() {
            Ok(self.refined)
        } else {
            Err(Error::Breakdown(format!(
                "count changed under refinement: {} → {}",
                self.count, self.refined
            )))
        }
    }
}

/// Three-point Gauss average of f over each cell [x_i − h/2, x_i + h/2],
/// split at the given breakpoints.
fn cell_averages(f: &dyn Fn(f64) -> f64, grid: &GridSpec, breaks: &[f64]) -> Vec<f64> {
    const NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let gauss = |a: f64, b: f64| {
        let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
        r * NODES.iter().zip(WEIGHTS).map(|(t, w)| w * f(c + r * t)).sum::<f64>()
    };
    let h = grid.spacing();
    let mut k = 0usize;
    (1..=grid.points)
        .map(|i| {
            let x = grid.x_min + i as f64 * h;
            let (a, b) = (x - 0.5 * h, x + 0.5 * h);
            while k < breaks.len() && breaks[k] <= a {
                k += 1;
            }
            let mut lo = a;
            let mut sum = 0.0;
            let mut j = k;
            while j < breaks.len() && breaks[j] < b {
                sum += gauss(lo, breaks[j]);
                lo = breaks[j];
                j += 1;
            }
            (sum + gauss(lo, b)) / h
        })
        .collect()
}

/// Negative eigenvalues of the scaled matrix tridiag(−1, 2 + h²q_i, −1) by
/// the Sturm sequence of its LDLᵀ pivots.
fn sturm_negative(h: f64, q: &[f64]) -> u64 {
    let mut d_prev = f64::INFINITY;
    let mut neg = 0;
    for &qi in q {
        let mut d = 2.0 + h * h * qi - 1.0 / d_prev;
        if d == 0.0 {
            d = -f64::EPSILON;
        }
        if d < 0.0 {
            neg += 1;
        }
        d_prev = d;
    }
    neg
}

fn count_on(q: &dyn Fn(f64) -> f64, grid: &GridSpec, breaks: &[f64]) -> FdCount {
    let coarse = sturm_negative(grid.spacing(), &cell_averages(q, grid, breaks));
    let fine_grid = grid.refined();
    let fine = sturm_negative(fine_grid.spacing(), &cell_averages(q, &fine_grid, breaks));
    FdCount {
        count: coarse,
        refined: fine,
    }
}

/// Negative eigenvalues of −d²/dx² + V on the line with Dirichlet walls.
pub fn fd_count_1d(v: &Potential, grid: &GridSpec) -> Result<FdCount> {
    if v.space != Space::Line {
        return Err(Error::Parameter("fd_count_1d needs a line potential".into()));
    }
    check_bounded(v)?;
    Ok(count_on(&|x| v.eval(x), grid, &v.breakpoints()))
}

/// Negative eigenvalues in channel m of an N-dimensional radial potential,
/// Dirichlet at r = e^{x_min} and r = e^{x_max} of the log grid.
pub fn fd_count_radial(v: &Potential, dim: u32, m: f64, grid: &GridSpec) -> Result<FdCount> {
    if v.space != Space::Radial {
        return Err(Error::Parameter("fd_count_radial needs a radial potential".into()));
    }
    check_bounded(v)?;
    let m2 = effective_m2(dim, m)?;
    let breaks: Vec<f64> = v.breakpoints().into_iter().filter(|&x| x > 0.0).map(f64::ln).collect();
    let q = move |s: f64| {
        let vr = v.eval(s.exp());
        m2 + if vr == 0.0 { 0.0 } else { (2.0 * s).exp() * vr }
    };
    Ok(count_on(&q, grid, &breaks))
}

fn check_bounded(v: &Potential) -> Result<()> {
    if v.is_bounded() {
        Ok(())
    } else {
        Err(Error::Precondition("oracle needs a potential bounded on the grid".into()))
    }
}

/// Box for a planar potential: compact support plus a margin.
pub fn default_lattice(v: &Planar, points: usize) -> GridSpec2d {
    GridSpec2d {
        half_width: 1.5 * v.extent().max(0.5) + 1.0,
        points,
    }
}

/// 2×2 Gauss average of V over every lattice cell.
fn lattice_potential(v: &Planar, grid: &GridSpec2d) -> Vec<f64> {
    let n = grid.points;
    let h = grid.spacing();
    let o = 0.5 * h / 3f64.sqrt();
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        let y = grid.coord(j);
        for i in 0..n {
            let x = grid.coord(i);
            let s = v.eval(x - o, y - o) + v.eval(x + o, y - o) + v.eval(x - o, y + o) + v.eval(x + o, y + o);
            out.push(0.25 * s);
        }
    }
    out
}

/// Inertia of the banded 5-point matrix h²(−Δ + V) + shift by LDLᵀ without
/// pivoting; None on a pivot below the breakdown tolerance.
fn banded_inertia(n: usize, h: f64, vcell: &[f64], shift: f64) -> Option<u64> {
    let size = n * n;
    let bw = n;
    // Row i keeps L[i][k] for k in [i − bw, i) at offset k + bw − i.
    let idx = |i: usize, k: usize| i * bw + (k + bw - i);
    let mut l = vec![0.0f64; size * bw];
    let mut d = vec![0.0f64; size];
    // w[k − lo] = L[i][k]·D[k] for the current row.
    let mut w = vec![0.0f64; bw];
    let mut neg = 0u64;
    for i in 0..size {
        let lo = i.saturating_sub(bw);
        for j in lo..i {
            let coupled = (j + 1 == i && i % n != 0) || j + n == i;
            let mut s = if coupled { -1.0 } else { 0.0 };
            for k in j.saturating_sub(bw).max(lo)..j {
                s -= w[k - lo] * l[idx(j, k)];
            }
            let lij = s / d[j];
            l[idx(i, j)] = lij;
            w[j - lo] = lij * d[j];
        }
        let mut diag = 4.0 + h * h * vcell[i] + shift;
        for k in lo..i {
            diag -= l[idx(i, k)] * w[k - lo];
        }
        if diag.abs() < 1e-11 {
            return None;
        }
        if diag < 0.0 {
            neg += 1;
        }
        d[i] = diag;
    }
    Some(neg)
}

fn lattice_count(v: &Planar, grid: &GridSpec2d) -> Result<u64> {
    let h = grid.spacing();
    let cells = lattice_potential(v, grid);
    for shift in [0.0, 1e-9, 1e-7] {
        if let Some(n) = banded_inertia(grid.points, h, &cells, shift) {
            return Ok(n);
        }
    }
    Err(Error::Breakdown("lattice factorization hit a zero pivot".into()))
}

/// Negative eigenvalues of the 5-point Dirichlet Laplacian plus V on a
/// square lattice, with one refinement of the spacing.
pub fn fd_count_2d_lattice(v: &Planar, grid: &GridSpec2d) -> Result<FdCount> {
    if grid.points < MIN_POINTS || grid.points > 1024 {
        return Err(Error::Parameter(format!("lattice needs 64..=1024 points per side, got {}", grid.points)));
    }
    let coarse = lattice_count(v, grid)?;
    let fine = GridSpec2d {
        points: (2 * grid.points + 1).min(1024),
        ..*grid
    };
    Ok(FdCount {
        count: coarse,
        refined: lattice_count(v, &fine)?,
    })
}

/// Bound states of a 1D square well of half-width a from the even/odd
/// matching equations: one new state each time a√V₀ passes a multiple of π/2.
pub fn well_count_1d(depth: f64, half_width: f64) -> u64 {
    let z = half_width * depth.max(0.0).sqrt();
    (2.0 * z / std::f64::consts::PI).ceil().max(1.0) as u64 * u64::from(z > 0.0)
}

/// s-wave states of a 3D well: solutions of −k cot(kR) = κ exist once
/// R√V₀ exceeds (n − ½)π.
pub fn well_count_3d_s(depth: f64, radius: f64) -> u64 {
    let z = radius * depth.max(0.0).sqrt();
    (z / std::f64::consts::PI + 0.5).floor() as u64
}

/// J_n(x) for integer n ≥ 0: upward recurrence below the turning point,
/// Miller's backward recurrence with the sum-rule normalization above it.
fn bessel_j_int(n: usize, x: f64) -> Result<f64> {
    let j0 = bessel_jy(0.0, x)?.j.value;
    if n == 0 {
        return Ok(j0);
    }
    if (n as f64) < x {
        let (mut a, mut b) = (j0, bessel_jy(1.0, x)?.j.value);
        for k in 1..n {
            let c = 2.0 * k as f64 / x * b - a;
            a = b;
            b = c;
        }
        return Ok(b);
    }
    let top = 2 * ((n + (40.0 * n as f64).sqrt() as usize) / 2) + 20;
    let mut vals = vec![0.0f64; top + 2];
    vals[top] = 1.0;
    for k in (1..=top).rev() {
        vals[k - 1] = 2.0 * k as f64 / x * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            for v in &mut vals[k - 1..] {
                *v *= 1e-250;
            }
        }
    }
    let norm = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    Ok(vals[n] / norm)
}

/// Zeros of J_n in (0, z), counted by sign changes on a fine grid.
fn j_zeros_below(n: usize, z: f64) -> Result<u64> {
    let steps = ((z / 0.01).ceil() as usize).max(10);
    let mut count = 0;
    let mut prev = bessel_j_int(n, z / steps as f64)?;
    for i in 2..=steps {
        let cur = bessel_j_int(n, z * i as f64 / steps as f64)?;
        if cur == 0.0 || cur.signum() != prev.signum() {
            count += 1;
        }
        prev = cur;
    }
    Ok(count)
}

/// Bound states of the 2D disk well in channel m: matching J_m inside to
/// the zero-energy exterior solution gives one state per zero of J_{m−1}
/// below R√V₀, and for m = 0 one more than the zeros of J₁.
pub fn disk_well_channel_count(depth: f64, radius: f64, m: usize) -> Result<u64> {
    let z = radius * depth.max(0.0).sqrt();
    if z == 0.0 {
        return Ok(0);
    }
    if m == 0 {
        Ok(1 + j_zeros_below(1, z)?)
    } else {
        j_zeros_below(m - 1, z)
    }
}

/// N₀ + 2 Σ N_m for the 2D disk well.
pub fn disk_well_total(depth: f64, radius: f64) -> Result<u64> {
    let mut total = disk_well_channel_count(depth, radius, 0)?;
    let mut m = 1;
    loop {
        let n = disk_well_channel_count(depth, radius, m)?;
        if n == 0 {
            return Ok(total);
        }
        total += 2 * n;
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{make_catalog, make_planar, CatalogId};
    use std::f64::consts::PI;

    fn well(depth: f64, radius: f64, dimension: u32) -> Potential {
        make_catalog(&CatalogId::SquareWell { depth, radius, dimension }).unwrap()
    }

    #[test]
    fn free_line_and_plane_are_empty() {
        let v = Potential::zero(Space::Line, 1);
        let g = GridSpec::new(-10.0, 10.0, 200).unwrap();
        assert_eq!(fd_count_1d(&v, &g).unwrap().value().unwrap(), 0);
        let p = Planar::Radial(Potential::zero(Space::Radial, 2));
        assert_eq!(fd_count_2d_lattice(&p, &GridSpec2d { half_width: 3.0, points: 64 }).unwrap().value().unwrap(), 0);
    }

    #[test]
    fn line_well_matches_matching_count() {
        let v = well(4.4 * PI * PI, 1.0, 1);
        let g = GridSpec::for_line(&v).unwrap();
        assert_eq!(fd_count_1d(&v, &g).unwrap().value().unwrap(), 5);
        assert_eq!(well_count_1d(4.4 * PI * PI, 1.0), 5);
    }

    #[test]
    fn dirichlet_box_only_undercounts() {
        let v = well(3.0, 1.0, 1);
        let a = fd_count_1d(&v, &GridSpec::new(-2.0, 2.0, 400).unwrap()).unwrap().refined;
        let b = fd_count_1d(&v, &GridSpec::new(-4.0, 4.0, 800).unwrap()).unwrap().refined;
        assert!(a <= b);
    }

    #[test]
    fn disk_channels() {
        let v = well(1.0, 1.0, 2);
        let g0 = GridSpec::for_channel(&v, 0.0).unwrap();
        assert_eq!(fd_count_radial(&v, 2, 0.0, &g0).unwrap().value().unwrap(), 1);
        let g2 = GridSpec::for_channel(&v, 2.0).unwrap();
        assert_eq!(fd_count_radial(&v, 2, 2.0, &g2).unwrap().value().unwrap(), 0);
        assert_eq!(disk_well_total(1.0, 1.0).unwrap(), 1);
    }

    #[test]
    fn three_d_s_wave() {
        for depth in [1.0, 4.0, 30.0, 100.0] {
            let v = well(depth, 1.0, 3);
            let g = GridSpec::for_channel(&v, 0.0).unwrap();
            let n = fd_count_radial(&v, 3, 0.0, &g).unwrap().value().unwrap();
            assert_eq!(n, well_count_3d_s(depth, 1.0), "depth {depth}");
        }
    }

    #[test]
    fn integer_bessel_j() {
        // J₅(3) and J₁₂(20) from tabulated values.
        assert!((bessel_j_int(5, 3.0).unwrap() - 0.043_028_434_877_047_58).abs() < 1e-12);
        assert!((bessel_j_int(12, 20.0).unwrap() - -0.118_990_624_310_399_2).abs() < 1e-10);
        assert!((bessel_j_int(2, 1.0).unwrap() - 0.114_903_484_931_900_5).abs() < 1e-13);
    }

    #[test]
    fn lattice_agrees_with_channel_sum() {
        let p = make_planar(&CatalogId::SquareWell { depth: 12.0, radius: 1.0, dimension: 2 }).unwrap();
        let grid = GridSpec2d { half_width: 4.0, points: 64 };
        let lat = fd_count_2d_lattice(&p, &grid).unwrap();
        assert_eq!(lat.refined, disk_well_total(12.0, 1.0).unwrap());
        let moved = p.translated([0.7, -0.4]);
        assert_eq!(fd_count_2d_lattice(&moved, &grid).unwrap().refined, lat.refined);
    }
}
