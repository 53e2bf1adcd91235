//! Closed-form bounds on the number of bound states and the quantities
//! they are built from.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::counting::{count_bound_states_1d, count_channel, count_total_2d, Count, Window};
use crate::error::{Error, Result};
use crate::expr::{Monomial, TailSeries};
use crate::moments::{moment, negative_moment, power_moment, weighted, Weight};
use crate::potential::{
    decreasing_rearrangement, radial_rearrangement, sup_over_angle, GridSpec2d, Part, Planar,
    Potential, Space,
};
use crate::quad::QuadResult;
use crate::specfun::gamma;

const TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FormulaId {
    #[serde(rename = "BARGMANN_CHANNEL")]
    BargmannChannel,
    #[serde(rename = "ONE_D_LINEAR")]
    OneDLinear,
    #[serde(rename = "ONE_D_PRODUCT")]
    OneDProduct,
    #[serde(rename = "TWO_D_M0_LOG")]
    TwoDM0Log,
    #[serde(rename = "TWO_D_M0_PRODUCT")]
    TwoDM0Product,
    #[serde(rename = "NEWTON_SETO")]
    NewtonSeto,
    #[serde(rename = "TOTAL_2D")]
    Total2d,
    #[serde(rename = "TOTAL_2D_NONCENTRAL")]
    Total2dNoncentral,
    #[serde(rename = "CONJECTURE_RHS")]
    ConjectureRhs,
    #[serde(rename = "COHN_CALOGERO")]
    CohnCalogero,
    #[serde(rename = "SEMICLASSICAL")]
    Semiclassical,
    #[serde(rename = "LAPTEV")]
    Laptev,
    #[serde(rename = "LIEB_THIRRING_HALF")]
    LiebThirringHalf,
}

impl FormulaId {
    pub const ALL: [FormulaId; 13] = [
        FormulaId::BargmannChannel,
        FormulaId::OneDLinear,
        FormulaId::OneDProduct,
        FormulaId::TwoDM0Log,
        FormulaId::TwoDM0Product,
        FormulaId::NewtonSeto,
        FormulaId::Total2d,
        FormulaId::Total2dNoncentral,
        FormulaId::ConjectureRhs,
        FormulaId::CohnCalogero,
        FormulaId::Semiclassical,
        FormulaId::Laptev,
        FormulaId::LiebThirringHalf,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FormulaId::BargmannChannel => "BARGMANN_CHANNEL",
            FormulaId::OneDLinear => "ONE_D_LINEAR",
            FormulaId::OneDProduct => "ONE_D_PRODUCT",
            FormulaId::TwoDM0Log => "TWO_D_M0_LOG",
            FormulaId::TwoDM0Product => "TWO_D_M0_PRODUCT",
            FormulaId::NewtonSeto => "NEWTON_SETO",
            FormulaId::Total2d => "TOTAL_2D",
            FormulaId::Total2dNoncentral => "TOTAL_2D_NONCENTRAL",
            FormulaId::ConjectureRhs => "CONJECTURE_RHS",
            FormulaId::CohnCalogero => "COHN_CALOGERO",
            FormulaId::Semiclassical => "SEMICLASSICAL",
            FormulaId::Laptev => "LAPTEV",
            FormulaId::LiebThirringHalf => "LIEB_THIRRING_HALF",
        }
    }
}

impl FromStr for FormulaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FormulaId::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parameter(format!("unknown formula id {s}")))
    }
}

/// The count a formula bounds from above, if any.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// All bound states on the line.
    Line,
    /// One channel of a radial potential.
    Channel { m: f64 },
    /// N₀ + 2 Σ N_m in 2D.
    Total2d,
    /// Not a bound on a count.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEntry {
    pub value: f64,
    pub quadrature_error: f64,
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub bounds: Target,
}

impl BoundEntry {
    fn ok(value: f64, err: f64, bounds: Target) -> Self {
        BoundEntry {
            value,
            quadrature_error: err,
            applicable: true,
            reason: None,
            bounds,
        }
    }

    fn not_applicable(reason: impl Into<String>, bounds: Target) -> Self {
        BoundEntry {
            value: f64::NAN,
            quadrature_error: 0.0,
            applicable: false,
            reason: Some(reason.into()),
            bounds,
        }
    }

    fn from_result(r: Result<(f64, f64)>, bounds: Target) -> Self {
        match r {
            Ok((v, e)) => BoundEntry::ok(v, e, bounds),
            Err(e) => BoundEntry::not_applicable(e.to_string(), bounds),
        }
    }
}

pub const LN_MINUS_CONVENTION: &str = "ln⁻(t) = max(−ln t, 0)";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub descriptor: String,
    pub epsilon: Option<f64>,
    pub entries: BTreeMap<FormulaId, BoundEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_min_interval: Option<(f64, f64)>,
    pub ln_minus: &'static str,
}

impl BoundReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,value,applicable,error_estimate\n");
        for (id, e) in &self.entries {
            let value = if e.value.is_finite() { format!("{}", e.value) } else { String::new() };
            let _ = writeln!(out, "{},{},{},{}", id.as_str(), value, e.applicable, e.quadrature_error);
        }
        out
    }

    pub fn get(&self, id: FormulaId) -> Option<&BoundEntry> {
        self.entries.get(&id)
    }
}

fn require_radial(v: &Potential) -> Result<()> {
    if v.space == Space::Radial {
        Ok(())
    } else {
        Err(Error::NotApplicable("needs a radial potential".into()))
    }
}

fn neg_moment_q(v: &Potential, k: f64) -> Result<QuadResult> {
    moment(v, k, Weight::Negative, TOL)?.finite("moment of V⁻")
}

/// Bargmann: N_ℓ < ∫ r V⁻ dr / (2ℓ + 1) in 3D, N_m < ∫ r V⁻ dr / (2m) in 2D.
pub fn bargmann_channel(v: &Potential, dim: u32, m: f64) -> Result<f64> {
    require_radial(v)?;
    let denom = match dim {
        2 if m == 0.0 => {
            return Err(Error::NotApplicable(
                "2D m = 0 has no Bargmann bound; use TWO_D_M0_LOG".into(),
            ))
        }
        2 => 2.0 * m,
        3 => 2.0 * m + 1.0,
        _ => return Err(Error::Unsupported(format!("Bargmann bound for dimension {dim}"))),
    };
    if !(denom > 0.0) {
        return Err(Error::Parameter(format!("angular index must be positive, got {m}")));
    }
    Ok(negative_moment(v, 1.0)? / denom)
}

/// (1 + ∫|x|V⁻dx, 1 + √2 [∫x²V⁻dx · ∫V⁻dx]^{1/4}) for a line potential.
pub fn one_d_bounds(v: &Potential) -> Result<(f64, f64)> {
    if v.space != Space::Line {
        return Err(Error::NotApplicable("needs a line potential".into()));
    }
    let m1 = negative_moment(v, 1.0)?;
    let m2 = negative_moment(v, 2.0)?;
    let m0 = negative_moment(v, 0.0)?;
    Ok((1.0 + m1, 1.0 + 2f64.sqrt() * (m2 * m0).powf(0.25)))
}

fn ln_abs_weight(r_ref: f64) -> (impl Fn(f64) -> f64, TailSeries) {
    let lr = r_ref.ln();
    let tail = TailSeries::from_terms(vec![
        Monomial { c: 1.0, p: 1.0, q: 1.0, s: 0.0 },
        Monomial { c: -lr, p: 1.0, q: 0.0, s: 0.0 },
    ]);
    (move |r: f64| r * (r.ln() - lr).abs(), tail)
}

/// I(R) = ∫ r |ln(r/R)| V⁻(r) dr.
pub fn i_of_r(v: &Potential, r: f64) -> Result<f64> {
    Ok(i_of_r_q(v, r)?.value)
}

fn i_of_r_q(v: &Potential, r: f64) -> Result<QuadResult> {
    require_radial(v)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Parameter(format!("R must be positive, got {r}")));
    }
    let (f, tail) = ln_abs_weight(r);
    weighted(v, Weight::Negative, &f, &tail, &[r], TOL)?.finite("I(R)")
}

/// ∫₀^R r V⁻ dr.
fn inner_mass(v: &Potential, r: f64) -> f64 {
    let mut pts: Vec<f64> = v.breakpoints().into_iter().filter(|&b| b > 0.0 && b < r).collect();
    pts.insert(0, 0.0);
    pts.push(r);
    crate::quad::integrate_breaks(|x| x * (-v.eval(x)).max(0.0), &pts, 1e-13).value
}

/// Radius balancing the inner and outer masses of r V⁻. When V⁻ vanishes on
/// an interval containing the balance point, the midpoint is returned with
/// the interval.
pub fn r_min(v: &Potential) -> Result<(f64, Option<(f64, f64)>)> {
    require_radial(v)?;
    let total = negative_moment(v, 1.0)?;
    if total <= 0.0 {
        return Err(Error::Domain("V⁻ ≡ 0: R_min is undefined".into()));
    }
    let half = 0.5 * total;
    let f = |r: f64| inner_mass(v, r) - half;
    let slack = 1e-12 * total;
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    while f(lo) >= -slack {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::Domain("R_min below representable range".into()));
        }
    }
    while f(hi) <= slack {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Domain("R_min beyond representable range".into()));
        }
    }
    let bisect = |mut a: f64, mut b: f64, below: &dyn Fn(f64) -> bool| {
        for _ in 0..200 {
            let mid = (a * b).sqrt();
            if mid <= a || mid >= b {
                break;
            }
            if below(mid) {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    };
    let left = bisect(lo, hi, &|r| f(r) < -slack);
    let right = bisect(lo, hi, &|r| f(r) <= slack);
    if right > left * (1.0 + 1e-9) {
        Ok((0.5 * (left + right), Some((left, right))))
    } else {
        Ok((bisect(lo, hi, &|r| f(r) < 0.0), None))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoDM0 {
    pub moment: f64,
    pub r_min: f64,
    pub r_min_interval: Option<(f64, f64)>,
    pub i_at_rmin: f64,
    pub i_error: f64,
    /// 1 + √2 [∫(ln r)² r V⁻ dr · ∫ r V⁻ dr]^{1/4}
    pub product_bound: f64,
}

pub fn two_d_m0_bounds(v: &Potential) -> Result<TwoDM0> {
    let (r, interval) = r_min(v)?;
    let i = i_of_r_q(v, r)?;
    let moment = negative_moment(v, 1.0)?;
    let ln2 = TailSeries::from_terms(vec![Monomial { c: 1.0, p: 1.0, q: 2.0, s: 0.0 }]);
    let l2 = weighted(v, Weight::Negative, &|x: f64| x * x.ln().powi(2), &ln2, &[1.0], TOL)?
        .finite("∫(ln r)² r V⁻ dr")?
        .value;
    Ok(TwoDM0 {
        moment,
        r_min: r,
        r_min_interval: interval,
        i_at_rmin: i.value,
        i_error: i.abs_error,
        product_bound: 1.0 + 2f64.sqrt() * (l2 * moment).powf(0.25),
    })
}

/// J = ½ ∬ r r' V⁻(r) V⁻(r') |ln(r/r')| dr dr' / ∫ r V⁻ dr.
pub fn newton_seto(v: &Potential) -> Result<f64> {
    require_radial(v)?;
    let m = negative_moment(v, 1.0)?;
    if m <= 0.0 {
        return Err(Error::Domain("∫ r V⁻ dr = 0".into()));
    }
    let m_log = weighted(
        v,
        Weight::Negative,
        &|x: f64| x * x.ln(),
        &TailSeries::from_terms(vec![Monomial { c: 1.0, p: 1.0, q: 1.0, s: 0.0 }]),
        &[1.0],
        TOL,
    )?
    .value;
    let inner = |r: f64| -> f64 {
        let (f, tail) = ln_abs_weight(r);
        weighted(v, Weight::Negative, &f, &tail, &[r], 1e-11).map_or(f64::NAN, |q| q.value)
    };
    // For large r the inner integral tends to M ln r − ∫ r' ln r' V⁻.
    let outer_tail = TailSeries::from_terms(vec![
        Monomial { c: m, p: 1.0, q: 1.0, s: 0.0 },
        Monomial { c: -m_log, p: 1.0, q: 0.0, s: 0.0 },
    ]);
    let outer = weighted(v, Weight::Negative, &|r: f64| r * inner(r), &outer_tail, &[], 1e-9)?
        .finite("Newton–Setô double integral")?;
    Ok(0.5 * outer.value / m)
}

/// 1 + I(R_min) + (2/√3) ∫ r V⁻ dr.
pub fn total_2d(v: &Potential) -> Result<f64> {
    Ok(total_2d_q(v)?.0)
}

fn total_2d_q(v: &Potential) -> Result<(f64, f64)> {
    require_radial(v)?;
    let m = neg_moment_q(v, 1.0)?;
    if m.value <= 0.0 {
        return Ok((1.0, 0.0));
    }
    let b = two_d_m0_bounds(v)?;
    Ok((
        1.0 + b.i_at_rmin + 2.0 / 3f64.sqrt() * m.value,
        b.i_error + m.abs_error,
    ))
}

/// A radial profile that evaluates to a non-negative level function,
/// turned into the attractive potential whose V⁻ is that function.
fn as_attractive(profile: &Potential) -> Potential {
    let mut p = profile.clone();
    if p.part == Part::Negative {
        p.part = Part::Full;
    } else {
        p = p.scaled(-1.0);
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonCentralOptions {
    /// Lattice for the rearrangement of non-radial inputs.
    pub rearrangement_grid: usize,
    /// Radial and angular samples for sup_θ V⁻.
    pub sup_radii: usize,
    pub sup_angles: usize,
    /// Polar samples for the ∫ V⁻ ln|x| term when components overlap
    /// with mixed signs.
    pub polar_radii: usize,
    pub polar_angles: usize,
}

impl Default for NonCentralOptions {
    fn default() -> Self {
        NonCentralOptions {
            rearrangement_grid: 801,
            sup_radii: 4000,
            sup_angles: 720,
            polar_radii: 2000,
            polar_angles: 720,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonCentral {
    pub via_sup: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub via_sup_reason: Option<String>,
    pub conjecture_rhs: f64,
    /// R used in the conjecture: R_min of the rearrangement.
    pub r: f64,
    /// The three integrals of the conjecture after the leading 1.
    pub terms: [f64; 3],
}

fn components(p: &Planar) -> Vec<(&Potential, [f64; 2])> {
    match p {
        Planar::Radial(v) => vec![(v, [0.0, 0.0])],
        Planar::Shifted { base, center } => vec![(base, *center)],
        Planar::Sum(parts) => parts.iter().flat_map(components).collect(),
    }
}

fn is_non_positive(v: &Potential) -> bool {
    if v.part != Part::Full {
        return v.part == Part::Attractive;
    }
    let pts: Vec<f64> = v.breakpoints();
    let hi = pts.last().copied().unwrap_or(1.0).max(1.0) * 2.0;
    (0..=2000).all(|k| v.eval(hi * k as f64 / 2000.0) <= 0.0)
        && v.tail_series(false).is_some_and(|s| s.leading().is_none_or(|m| m.c <= 0.0))
}

/// True when V⁻ is non-increasing in r.
pub(crate) fn is_decreasing_profile(v: &Potential) -> bool {
    let hi = v.support_end().max(1.0) * 4.0;
    let n = 20_000;
    let mut last = f64::INFINITY;
    for k in 1..=n {
        let r = hi * k as f64 / n as f64;
        let x = (-v.eval(r)).max(0.0);
        if x > last * (1.0 + 1e-12) + 1e-300 {
            return false;
        }
        last = x;
    }
    true
}

/// ∫ (d²x/2π) V⁻(x) ln(|x|/R).
fn log_term(p: &Planar, r_ref: f64, opts: &NonCentralOptions) -> Result<f64> {
    let comps = components(p);
    if comps.iter().all(|(v, _)| is_non_positive(v)) {
        // The angular mean of ln|c + ρe^{iφ}| is ln max(|c|, ρ).
        let mut sum = 0.0;
        for (v, c) in comps {
            let d = c[0].hypot(c[1]);
            let lr = r_ref.ln();
            let tail = TailSeries::from_terms(vec![
                Monomial { c: 1.0, p: 1.0, q: 1.0, s: 0.0 },
                Monomial { c: -lr, p: 1.0, q: 0.0, s: 0.0 },
            ]);
            let f = move |rho: f64| rho * (rho.max(d).ln() - lr);
            let kinks: Vec<f64> = if d > 0.0 { vec![d] } else { vec![] };
            sum += weighted(v, Weight::Negative, &f, &tail, &kinks, TOL)?.finite("∫ V⁻ ln")?.value;
        }
        return Ok(sum);
    }
    let rmax = p.extent();
    if !rmax.is_finite() || rmax <= 0.0 {
        return Err(Error::Unsupported("mixed-sign components need compact support".into()));
    }
    let (nr, nt) = (opts.polar_radii, opts.polar_angles);
    let dr = rmax / nr as f64;
    let mut sum = 0.0;
    for i in 0..nr {
        let r = (i as f64 + 0.5) * dr;
        let mean: f64 = (0..nt)
            .map(|k| {
                let t = 2.0 * PI * (k as f64 + 0.5) / nt as f64;
                p.eval_negative(r * t.cos(), r * t.sin())
            })
            .sum::<f64>()
            / nt as f64;
        sum += r * mean * (r / r_ref).ln() * dr;
    }
    Ok(sum)
}

/// ∫ (d²x/2π) V⁻(x).
fn mass_term(p: &Planar, vr: &Potential) -> Result<f64> {
    let comps = components(p);
    if comps.iter().all(|(v, _)| is_non_positive(v)) {
        let mut sum = 0.0;
        for (v, _) in comps {
            sum += negative_moment(v, 1.0)?;
        }
        Ok(sum)
    } else {
        negative_moment(vr, 1.0)
    }
}

/// Upper bound through B(r) = sup_θ V⁻ and the conjectured bound built
/// from the decreasing rearrangement.
pub fn total_2d_noncentral(p: &Planar, opts: &NonCentralOptions) -> Result<NonCentral> {
    let (vr, decreasing_central) = match p {
        Planar::Radial(v) if is_decreasing_profile(v) => (v.negative_part(), true),
        Planar::Radial(v) => (radial_rearrangement(v)?, false),
        _ => {
            let grid = GridSpec2d {
                half_width: p.extent().max(1e-3) * 1.02,
                points: opts.rearrangement_grid,
            };
            (decreasing_rearrangement(p, &grid)?, false)
        }
    };
    let vr_att = as_attractive(&vr);
    let (via_sup, via_sup_reason) = {
        let sup = sup_over_angle(p, p.extent().max(1e-3) * 1.001, opts.sup_radii, opts.sup_angles)?;
        if sup.catastrophic() {
            (None, Some("B(r) is infinite on circles through singular points".to_string()))
        } else {
            let b = as_attractive(&sup.profile);
            match total_2d(&b) {
                Ok(x) => (Some(x), None),
                Err(e) => (None, Some(e.to_string())),
            }
        }
    };
    let total_mass = negative_moment(&vr_att, 1.0)?;
    if total_mass <= 0.0 {
        return Ok(NonCentral {
            via_sup,
            via_sup_reason,
            conjecture_rhs: 1.0,
            r: 1.0,
            terms: [0.0; 3],
        });
    }
    let (r, _) = r_min(&vr_att)?;
    let lr = r.ln();
    let ln_minus = move |x: f64| x * (lr - x.ln()).max(0.0);
    let t1 = 2.0
        * weighted(&vr_att, Weight::Negative, &ln_minus, &TailSeries::default(), &[r], TOL)?
            .finite("∫ V_R ln⁻")?
            .value;
    let t2 = if decreasing_central {
        let f = move |x: f64| x * (x.ln() - lr);
        let tail = TailSeries::from_terms(vec![
            Monomial { c: 1.0, p: 1.0, q: 1.0, s: 0.0 },
            Monomial { c: -lr, p: 1.0, q: 0.0, s: 0.0 },
        ]);
        weighted(&vr_att, Weight::Negative, &f, &tail, &[r], TOL)?.finite("∫ V⁻ ln")?.value
    } else {
        log_term(p, r, opts)?
    };
    let t3 = 2.0 / 3f64.sqrt() * mass_term(p, &vr_att)?;
    Ok(NonCentral {
        via_sup,
        via_sup_reason,
        conjecture_rhs: 1.0 + t1 + t2 + t3,
        r,
        terms: [t1, t2, t3],
    })
}

/// (2/π) ∫₀^∞ |V|^{1/2} dr, valid for V non-decreasing in r.
pub fn cohn_calogero(v: &Potential) -> Result<f64> {
    require_radial(v)?;
    let hi = v.support_end().max(1.0) * 4.0;
    let n = 20_000;
    let mut last = f64::NEG_INFINITY;
    for k in 1..=n {
        let x = v.eval(hi * k as f64 / n as f64);
        if x < last - 1e-12 * last.abs() {
            return Err(Error::NotApplicable("V is not monotonic non-decreasing".into()));
        }
        last = x;
    }
    let q = power_moment(v, 0.0, Weight::Abs, 0.5, TOL)?.finite("∫|V|^{1/2}")?;
    Ok(2.0 / PI * q.value)
}

/// Cₙ = 2⁻ⁿ π^{−n/2} / Γ(1 + n/2).
pub fn semiclassical_constant(n: u32) -> f64 {
    let n = n as f64;
    2f64.powf(-n) * PI.powf(-n / 2.0) / gamma(1.0 + n / 2.0)
}

/// Cₙ g^{n/2} ∫ (V⁻)^{n/2} dⁿx for a line or radial potential in n dimensions.
pub fn semiclassical(v: &Potential, g: f64) -> Result<f64> {
    let n = v.dimension;
    let nf = n as f64;
    let integral = match v.space {
        Space::Line => power_moment(v, 0.0, Weight::Negative, 0.5, TOL)?.finite("∫(V⁻)^{1/2}")?.value,
        Space::Radial => {
            let sphere = 2.0 * PI.powf(nf / 2.0) / gamma(nf / 2.0);
            sphere
                * power_moment(v, nf - 1.0, Weight::Negative, nf / 2.0, TOL)?
                    .finite("∫(V⁻)^{n/2}")?
                    .value
        }
    };
    Ok(semiclassical_constant(n) * g.powf(nf / 2.0) * integral)
}

/// A(b) < 1/√b + 4/√3 for V = b|x|⁻² − |V|.
pub fn laptev_a(b: f64) -> Result<f64> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::Parameter(format!("Laptev constant needs b > 0, got {b}")));
    }
    Ok(1.0 / b.sqrt() + 4.0 / 3f64.sqrt())
}

/// ½ ∫ U⁻ dx: on the line for line potentials, for radial 2D potentials in
/// the log variable where U = r²V and the integral is ½ ∫ r V⁻ dr.
pub fn lieb_thirring_half_integral(v: &Potential) -> Result<f64> {
    match (v.space, v.dimension) {
        (Space::Line, _) => Ok(0.5 * negative_moment(v, 0.0)?),
        (Space::Radial, 2) => Ok(0.5 * negative_moment(v, 1.0)?),
        _ => Err(Error::NotApplicable("needs a line or 2D radial potential".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiebThirring {
    /// Σ |eᵢ|^{1/2} over all eigenvalues.
    pub sum_sqrt: f64,
    /// ½ ∫ U⁻ dx
    pub half_integral: f64,
    pub states: usize,
}

impl LiebThirring {
    pub fn ratio(&self) -> f64 {
        if self.half_integral == 0.0 {
            0.0
        } else {
            self.sum_sqrt / self.half_integral
        }
    }
}

/// Σ |eᵢ|^{1/2} against ½ ∫ U⁻ dx for a line potential with finitely many states.
pub fn lieb_thirring_check(u: &Potential) -> Result<LiebThirring> {
    if u.space != Space::Line {
        return Err(Error::NotApplicable("needs a line potential".into()));
    }
    let levels = crate::energy::spectrum(u, None)?;
    Ok(LiebThirring {
        sum_sqrt: levels.iter().map(|e| e.ln_kappa.exp()).sum(),
        half_integral: 0.5 * negative_moment(u, 0.0)?,
        states: levels.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundOptions {
    /// Channel index for BARGMANN_CHANNEL.
    pub m: f64,
    /// Coupling multiplying V in SEMICLASSICAL.
    pub g: f64,
    /// Laptev's b.
    pub b: f64,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            m: 1.0,
            g: 1.0,
            b: 1.0,
        }
    }
}

/// Every formula evaluated on a line or radial potential.
pub fn bound_report(v: &Potential, opts: &BoundOptions) -> BoundReport {
    let mut e = BTreeMap::new();
    let na = |why: &str, t| BoundEntry::not_applicable(why, t);
    let radial2 = v.space == Space::Radial && v.dimension == 2;
    let radial3 = v.space == Space::Radial && v.dimension == 3;
    let mut r_min_v = None;
    let mut r_int = None;

    e.insert(
        FormulaId::BargmannChannel,
        if radial2 || radial3 {
            BoundEntry::from_result(
                bargmann_channel(v, v.dimension, opts.m).map(|x| (x, 0.0)),
                Target::Channel { m: opts.m },
            )
        } else {
            na("needs a 2D or 3D radial potential", Target::None)
        },
    );
    match one_d_bounds(v) {
        Ok((a, b)) => {
            e.insert(FormulaId::OneDLinear, BoundEntry::ok(a, 0.0, Target::Line));
            e.insert(FormulaId::OneDProduct, BoundEntry::ok(b, 0.0, Target::Line));
        }
        Err(err) => {
            e.insert(FormulaId::OneDLinear, na(&err.to_string(), Target::Line));
            e.insert(FormulaId::OneDProduct, na(&err.to_string(), Target::Line));
        }
    }
    let ch0 = Target::Channel { m: 0.0 };
    if radial2 {
        match negative_moment(v, 1.0) {
            Ok(m) if m <= 0.0 => {
                e.insert(FormulaId::TwoDM0Log, BoundEntry::ok(1.0, 0.0, ch0));
                e.insert(FormulaId::TwoDM0Product, BoundEntry::ok(1.0, 0.0, ch0));
                e.insert(FormulaId::NewtonSeto, na("∫ r V⁻ dr = 0", ch0));
            }
            _ => {
                match two_d_m0_bounds(v) {
                    Ok(b) => {
                        r_min_v = Some(b.r_min);
                        r_int = b.r_min_interval;
                        e.insert(FormulaId::TwoDM0Log, BoundEntry::ok(1.0 + b.i_at_rmin, b.i_error, ch0));
                        e.insert(FormulaId::TwoDM0Product, BoundEntry::ok(b.product_bound, 0.0, ch0));
                    }
                    Err(err) => {
                        e.insert(FormulaId::TwoDM0Log, na(&err.to_string(), ch0));
                        e.insert(FormulaId::TwoDM0Product, na(&err.to_string(), ch0));
                    }
                }
                e.insert(
                    FormulaId::NewtonSeto,
                    BoundEntry::from_result(newton_seto(v).map(|j| (1.0 + j, 0.0)), ch0),
                );
            }
        }
        e.insert(FormulaId::Total2d, BoundEntry::from_result(total_2d_q(v), Target::Total2d));
        match total_2d_noncentral(&Planar::Radial(v.clone()), &NonCentralOptions::default()) {
            Ok(nc) => {
                e.insert(
                    FormulaId::Total2dNoncentral,
                    match nc.via_sup {
                        Some(x) => BoundEntry::ok(x, 0.0, Target::Total2d),
                        None => na(nc.via_sup_reason.as_deref().unwrap_or("not applicable"), Target::Total2d),
                    },
                );
                e.insert(FormulaId::ConjectureRhs, BoundEntry::ok(nc.conjecture_rhs, 0.0, Target::None));
            }
            Err(err) => {
                e.insert(FormulaId::Total2dNoncentral, na(&err.to_string(), Target::Total2d));
                e.insert(FormulaId::ConjectureRhs, na(&err.to_string(), Target::None));
            }
        }
        e.insert(
            FormulaId::Laptev,
            BoundEntry::from_result(laptev_a(opts.b).map(|a| (a, 0.0)), Target::None),
        );
    } else {
        for id in [
            FormulaId::TwoDM0Log,
            FormulaId::TwoDM0Product,
            FormulaId::NewtonSeto,
            FormulaId::Total2d,
            FormulaId::Total2dNoncentral,
            FormulaId::ConjectureRhs,
            FormulaId::Laptev,
        ] {
            e.insert(id, na("needs a 2D radial potential", Target::None));
        }
    }
    e.insert(
        FormulaId::CohnCalogero,
        if radial3 {
            BoundEntry::from_result(cohn_calogero(v).map(|x| (x, 0.0)), Target::Channel { m: 0.0 })
        } else {
            na("bounds the 3D s-wave count", Target::None)
        },
    );
    e.insert(
        FormulaId::Semiclassical,
        BoundEntry::from_result(semiclassical(v, opts.g).map(|x| (x, 0.0)), Target::None),
    );
    e.insert(
        FormulaId::LiebThirringHalf,
        BoundEntry::from_result(lieb_thirring_half_integral(v).map(|x| (x, 0.0)), Target::None),
    );
    BoundReport {
        descriptor: v.descriptor(),
        epsilon: v.epsilon,
        entries: e,
        r_min: r_min_v,
        r_min_interval: r_int,
        ln_minus: LN_MINUS_CONVENTION,
    }
}

/// Bounds for a non-central planar potential.
pub fn planar_report(p: &Planar, opts: &BoundOptions, nc: &NonCentralOptions) -> BoundReport {
    let mut e = BTreeMap::new();
    match total_2d_noncentral(p, nc) {
        Ok(r) => {
            e.insert(
                FormulaId::Total2dNoncentral,
                match r.via_sup {
                    Some(x) => BoundEntry::ok(x, 0.0, Target::Total2d),
                    None => BoundEntry::not_applicable(r.via_sup_reason.unwrap_or_default(), Target::Total2d),
                },
            );
            e.insert(FormulaId::ConjectureRhs, BoundEntry::ok(r.conjecture_rhs, 0.0, Target::None));
        }
        Err(err) => {
            e.insert(FormulaId::Total2dNoncentral, BoundEntry::not_applicable(err.to_string(), Target::Total2d));
            e.insert(FormulaId::ConjectureRhs, BoundEntry::not_applicable(err.to_string(), Target::None));
        }
    }
    e.insert(
        FormulaId::Laptev,
        BoundEntry::from_result(laptev_a(opts.b).map(|a| (a, 0.0)), Target::None),
    );
    BoundReport {
        descriptor: format!("{p:?}"),
        epsilon: components(p).iter().find_map(|(v, _)| v.epsilon),
        entries: e,
        r_min: None,
        r_min_interval: None,
        ln_minus: LN_MINUS_CONVENTION,
    }
}

/// An applicable bound that came out below the exact count it bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub formula: FormulaId,
    pub value: f64,
    pub exact: u64,
}

/// Compare each count-bounding entry with the exact count.
pub fn soundness_violations(v: &Potential, report: &BoundReport, window: Window) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    for (id, e) in &report.entries {
        if !e.applicable {
            continue;
        }
        let exact = match e.bounds {
            Target::None => continue,
            Target::Line => count_bound_states_1d(v, window)?.count,
            Target::Channel { m } => count_channel(v, m, window)?.count,
            Target::Total2d => count_total_2d(v, window)?.count,
        };
        match exact {
            Count::Finite(n) if (n as f64) > e.value => out.push(Violation {
                formula: *id,
                value: e.value,
                exact: n,
            }),
            Count::Finite(_) => {}
            Count::Infinite | Count::Marginal { .. } => out.push(Violation {
                formula: *id,
                value: e.value,
                exact: u64::MAX,
            }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{make_catalog, CatalogId};

    fn well(depth: f64, radius: f64, dimension: u32) -> Potential {
        make_catalog(&CatalogId::SquareWell { depth, radius, dimension }).unwrap()
    }

    #[test]
    fn unit_disk_anchors() {
        let v = well(1.0, 1.0, 2);
        let b = two_d_m0_bounds(&v).unwrap();
        assert!((b.r_min - 0.5f64.sqrt()).abs() < 1e-8);
        assert!(b.r_min_interval.is_none());
        assert!((b.i_at_rmin - 2f64.ln() / 4.0).abs() < 1e-9);
        assert!((b.product_bound - (1.0 + 2f64.sqrt() * 0.125f64.powf(0.25))).abs() < 1e-9);
        assert!((newton_seto(&v).unwrap() - 0.125).abs() < 1e-7);
        let t = total_2d(&v).unwrap();
        assert!((t - (1.0 + 2f64.ln() / 4.0 + 1.0 / 3f64.sqrt())).abs() < 1e-9);
        assert!((bargmann_channel(&v, 2, 1.0).unwrap() - 0.25).abs() < 1e-12);
        assert!(bargmann_channel(&v, 2, 0.0).is_err());
    }

    #[test]
    fn line_and_three_d_anchors() {
        let (a, b) = one_d_bounds(&well(1.0, 1.0, 1)).unwrap();
        assert!((a - 2.0).abs() < 1e-10);
        assert!((b - (1.0 + 2f64.sqrt() * (4.0f64 / 3.0).powf(0.25))).abs() < 1e-10);
        assert!((bargmann_channel(&well(4.0, 1.0, 3), 3, 0.0).unwrap() - 2.0).abs() < 1e-10);
        assert!((semiclassical_constant(2) - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!((laptev_a(1.0).unwrap() - 3.309_401_076_758_503).abs() < 1e-12);
    }

    #[test]
    fn flat_rmin_interval() {
        // Two equal rings: the inner mass is M/2 on the whole gap between them.
        let v = Potential::new(
            Space::Radial,
            2,
            vec![
                crate::potential::Piece::new(0.0, 1.0, crate::expr::parse("-2").unwrap()),
                crate::potential::Piece::new(2.0, 3.0, crate::expr::parse("-2/5").unwrap()),
            ],
        )
        .unwrap();
        let (r, int) = r_min(&v).unwrap();
        let (lo, hi) = int.unwrap();
        assert!((lo - 1.0).abs() < 1e-6 && (hi - 2.0).abs() < 1e-6);
        assert!((r - 1.5).abs() < 1e-6);
    }

    #[test]
    fn conjecture_matches_total_for_decreasing_radial() {
        for (depth, radius) in [(1.0, 1.0), (20.0, 0.3), (5.0, 3.0)] {
            let v = well(depth, radius, 2);
            let nc = total_2d_noncentral(&Planar::Radial(v.clone()), &NonCentralOptions::default()).unwrap();
            let t = total_2d(&v).unwrap();
            assert!((nc.conjecture_rhs - t).abs() < 1e-8 * t, "{nc:?} vs {t}");
            assert!((nc.via_sup.unwrap() - t).abs() < 1e-3 * t);
        }
    }

    #[test]
    fn shifted_disk_terms() {
        let v = well(3.0, 1.0, 2);
        let shifted = Planar::Radial(v.clone()).translated([0.5, 0.0]);
        let opts = NonCentralOptions {
            rearrangement_grid: 401,
            ..Default::default()
        };
        let nc = total_2d_noncentral(&shifted, &opts).unwrap();
        // ∫ρ ln max(½, ρ) over the disk, shifted by ln R.
        let f = |rho: f64| rho * rho.max(0.5).ln();
        let n = 200_000;
        let exact: f64 = (0..n).map(|k| f((k as f64 + 0.5) / n as f64) / n as f64).sum::<f64>() * 3.0
            - 1.5 * nc.r.ln();
        assert!((nc.terms[1] - exact).abs() < 1e-5, "{} vs {exact}", nc.terms[1]);
        assert!((nc.terms[2] - 2.0 / 3f64.sqrt() * 1.5).abs() < 1e-9);
        assert!((nc.r - 0.5f64.sqrt()).abs() < 2e-2);
        assert!(nc.via_sup.unwrap() > total_2d(&v).unwrap());
    }

    #[test]
    fn bounds_are_sound_on_wells() {
        for depth in [0.5, 5.0, 40.0] {
            for dim in [1, 2, 3] {
                let v = well(depth, 1.0, dim);
                let rep = bound_report(&v, &BoundOptions::default());
                let bad = soundness_violations(&v, &rep, Window::default()).unwrap();
                assert!(bad.is_empty(), "depth {depth}, dim {dim}: {bad:?}");
            }
        }
    }

    #[test]
    fn lieb_thirring_delta_is_nearly_optimal() {
        let d = make_catalog(&CatalogId::DeltaShell { g: 2.0, radius: 0.0, dimension: 1, epsilon: 1e-4 }).unwrap();
        let lt = lieb_thirring_check(&d).unwrap();
        assert_eq!(lt.states, 1);
        assert!((lt.half_integral - 1.0).abs() < 1e-9);
        assert!((lt.ratio() - 1.0).abs() < 1e-3, "{lt:?}");
        let w = lieb_thirring_check(&well(4.0 * PI * PI, 1.0, 1)).unwrap();
        assert!((w.half_integral - 4.0 * PI * PI).abs() < 1e-8);
        assert!(w.sum_sqrt < w.half_integral);
        let z = lieb_thirring_check(&Potential::zero(Space::Line, 1)).unwrap();
        assert_eq!((z.sum_sqrt, z.half_integral), (0.0, 0.0));
    }

    #[test]
    fn report_formats() {
        let rep = bound_report(&well(1.0, 1.0, 2), &BoundOptions::default());
        let csv = rep.to_csv();
        assert!(csv.starts_with("id,value,applicable,error_estimate\n"));
        assert!(csv.contains("TOTAL_2D,"));
        assert!(csv.contains("ONE_D_LINEAR,,false,"));
        let j = serde_json::to_value(&rep).unwrap();
        assert!(j["entries"]["ONE_D_LINEAR"]["value"].is_null());
        assert_eq!(j["entries"]["TOTAL_2D"]["applicable"], true);
        assert_eq!("total_2d".parse::<FormulaId>().unwrap(), FormulaId::Total2d);
    }
}
