//! Lattice points in p-discs `|n1|^p + |n2|^p <= r^p`, the discrepancy
//! `P_p(r) = N_p(r) - area`, and truncated Hardy-type Bessel series for it.
//!
//! Counting uses the closed disc. A pair whose `|n1|^p + |n2|^p` agrees with
//! the target to `1e-12` relative is treated as lying on the curve; for
//! `p in {2, 1}` the sums are integers and the test is exact.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pbessel_integral::{IntegralMethodConfig, one_minus_pow, pbessel_elementary, pbessel_order1_kernel};
use crate::pbessel_series::pbessel_series;
use crate::phi_coeffs::DistortedAngle;
use crate::router::{method_router, series_admissible};
use crate::special_core::gamma::{gammaf, lbeta};
use crate::special_core::quadrature::integrate;
use crate::special_core::{PExponent, QuadratureSpec, classical_bessel_j};

/// Relative width of the band in which `|n|_p^p` counts as equal to a target.
pub const TIE_REL: f64 = 1e-12;

/// Tolerance handed to the p-Bessel evaluators inside lattice sums.
const TERM_TOL: f64 = 1e-10;

/// Work limits for scans and lattice sums.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeBudget {
    /// Columns `n1` a single count may scan.
    pub max_columns: u64,
    /// Lattice-sum terms whose p-Bessel value needs an integral route.
    pub max_integral_evals: u64,
}

impl Default for LatticeBudget {
    fn default() -> Self {
        Self { max_columns: 100_000_000, max_integral_evals: 20_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeReport {
    pub p: PExponent,
    pub r: f64,
    pub count: u64,
    pub area_term: f64,
    pub discrepancy: f64,
    pub boundary_points: Vec<(i64, i64)>,
}

/// `|n|^p` for an integer `n`, exact for `p in {2, 1}`.
fn ipow(p: PExponent, n: i64) -> f64 {
    let a = n.unsigned_abs() as f64;
    match p.q() {
        1 => a * a,
        2 => a,
        _ => a.powf(p.p()),
    }
}

/// Sum of `|n_i|^p` for an integer pair.
pub fn p_power_sum(p: PExponent, n1: i64, n2: i64) -> f64 {
    ipow(p, n1) + ipow(p, n2)
}

/// Compares `value` with `target`, calling anything inside the tie band equal.
fn tie_cmp(value: f64, target: f64) -> Ordering {
    if (value - target).abs() <= TIE_REL * target.abs() {
        Ordering::Equal
    } else if value < target {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// `(2/p) Gamma(1/p)^2 / Gamma(2/p)`, the area of the unit p-disc.
pub fn area_constant(p: PExponent) -> f64 {
    let q = p.qf();
    q * gammaf(0.5 * q).powi(2) / gammaf(q)
}

pub fn area_term(p: PExponent, r: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius must be finite and nonnegative, got {r}")));
    }
    Ok(area_constant(p) * r * r)
}

pub fn count_lattice_points(p: PExponent, r: f64) -> Result<LatticeReport> {
    count_lattice_points_with(p, r, &LatticeBudget::default())
}

/// Column scan over `n1 in [-floor r, floor r]`; each column's height is
/// found from the float estimate and then corrected with [`tie_cmp`].
pub fn count_lattice_points_with(p: PExponent, r: f64, budget: &LatticeBudget) -> Result<LatticeReport> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius must be finite and positive, got {r}")));
    }
    let m = r.floor() as i64;
    let columns = 2.0 * m as f64 + 1.0;
    if columns > budget.max_columns as f64 {
        return Err(Error::Budget { what: "lattice count columns".into(), needed: columns, budget: budget.max_columns as f64 });
    }
    let rp = if p.q() == 1 { r * r } else { r.powf(p.p()) };
    let mut count = 0u64;
    let mut boundary = Vec::new();
    for n1 in 0..=m {
        let Some(h) = column_height(p, n1, rp) else { continue };
        let mult = if n1 == 0 { 1 } else { 2 };
        count += mult * (2 * h as u64 + 1);
        if tie_cmp(p_power_sum(p, n1, h), rp) == Ordering::Equal {
            for (a, b) in sign_variants(n1, h) {
                boundary.push((a, b));
            }
        }
    }
    boundary.sort_unstable();
    let area = area_term(p, r)?;
    Ok(LatticeReport { p, r, count, area_term: area, discrepancy: count as f64 - area, boundary_points: boundary })
}

/// Largest `h >= 0` with `(n1, h)` in the closed disc, or `None` if the
/// column is empty.
fn column_height(p: PExponent, n1: i64, rp: f64) -> Option<i64> {
    if tie_cmp(ipow(p, n1), rp) == Ordering::Greater {
        return None;
    }
    let rest = (rp - ipow(p, n1)).max(0.0);
    let mut h = rest.powf(1.0 / p.p()).floor() as i64;
    while h > 0 && tie_cmp(p_power_sum(p, n1, h), rp) == Ordering::Greater {
        h -= 1;
    }
    while tie_cmp(p_power_sum(p, n1, h + 1), rp) != Ordering::Greater {
        h += 1;
    }
    Some(h)
}

/// All sign combinations of `(a, b)`, without duplicates.
fn sign_variants(a: i64, b: i64) -> Vec<(i64, i64)> {
    let mut v = Vec::with_capacity(4);
    for sa in [1, -1] {
        for sb in [1, -1] {
            let pt = (sa * a, sb * b);
            if !v.contains(&pt) {
                v.push(pt);
            }
        }
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleEntry {
    pub phi: f64,
    pub point: (i64, i64),
}

/// Distorted angles of the lattice points on the p-circle `|n|_p^p = s`.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleSet {
    pub s: f64,
    pub entries: Vec<AngleEntry>,
}

impl AngleSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Angle of a nonzero lattice point, in `[0, 2 pi)`.
pub fn lattice_angle(p: PExponent, n1: i64, n2: i64) -> f64 {
    let s = p_power_sum(p, n1, n2);
    let c = (ipow(p, n1) / s).sqrt().copysign(n1 as f64);
    let sn = (ipow(p, n2) / s).sqrt().copysign(n2 as f64);
    let phi = sn.atan2(c);
    if phi < 0.0 { phi + TAU } else { phi }
}

/// Point of p-norm `s^(1/p)` in direction `phi`, before rounding.
pub fn angle_point(p: PExponent, s: f64, phi: f64) -> (f64, f64) {
    let rho = s.powf(1.0 / p.p());
    let (sn, c) = phi.sin_cos();
    let q = p.q() as i32;
    (rho * c.abs().powi(q).copysign(c), rho * sn.abs().powi(q).copysign(sn))
}

/// Whether `|n1|^p + |n2|^p = s`.
///
/// When `s` is an integer only pairs with `|n_i|^p` integral can qualify
/// (a sum of two `q`-th roots of squares is rational only if both are), so
/// the test is done in integers. Otherwise the tie band decides.
fn on_curve(p: PExponent, n1: i64, n2: i64, s: f64) -> bool {
    if s.fract() == 0.0 && s < 2f64.powi(52) {
        match (integral_power(p, n1), integral_power(p, n2)) {
            (Some(t1), Some(t2)) => t1.checked_add(t2) == Some(s as u64),
            _ => false,
        }
    } else {
        tie_cmp(p_power_sum(p, n1, n2), s) == Ordering::Equal
    }
}

/// `|n|^(2/q)` when it is an integer.
fn integral_power(p: PExponent, n: i64) -> Option<u64> {
    let a = n.unsigned_abs();
    let q = p.q();
    if q == 1 {
        return a.checked_mul(a);
    }
    let t = ((a as f64).powf(p.p())).round() as u64;
    let a2 = (a as u128) * (a as u128);
    for cand in [t.saturating_sub(1), t, t + 1] {
        if (cand as u128).checked_pow(q) == Some(a2) {
            return Some(cand);
        }
    }
    None
}

pub fn angles_on_circle(p: PExponent, s: f64) -> Result<AngleSet> {
    if !(s >= 1.0) || !s.is_finite() {
        return Err(Error::Domain(format!("angle sets need s >= 1, got {s}")));
    }
    let m = (s * (1.0 + TIE_REL)).powf(1.0 / p.p()).floor() as i64;
    let mut entries = Vec::new();
    for n1 in -m..=m {
        let rest = s - ipow(p, n1);
        if rest < -TIE_REL * s {
            continue;
        }
        let h = rest.max(0.0).powf(1.0 / p.p()).round() as i64;
        for n2 in [h - 1, h, h + 1] {
            if n2 < 0 || !on_curve(p, n1, n2, s) {
                continue;
            }
            for pt in if n2 == 0 { vec![(n1, 0)] } else { vec![(n1, n2), (n1, -n2)] } {
                if !entries.iter().any(|e: &AngleEntry| e.point == pt) {
                    entries.push(AngleEntry { phi: lattice_angle(p, pt.0, pt.1), point: pt });
                }
            }
        }
    }
    entries.sort_by(|a, b| a.phi.total_cmp(&b.phi));
    Ok(AngleSet { s, entries })
}

/// `R(k)`, the number of representations of `k` as a sum of two squares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RTable {
    values: Vec<u32>,
}

impl RTable {
    pub fn get(&self, k: usize) -> Option<u32> {
        self.values.get(k).copied()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn k_max(&self) -> usize {
        self.values.len() - 1
    }
}

pub fn r_function(k_max: usize) -> RTable {
    let mut values = vec![0u32; k_max + 1];
    let m = (k_max as f64).sqrt() as i64 + 1;
    for a in -m..=m {
        for b in -m..=m {
            let k = (a * a + b * b) as usize;
            if k <= k_max {
                values[k] += 1;
            }
        }
    }
    RTable { values }
}

/// Neumaier's compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `r sum_{k <= K} R(k) k^(-1/2) J_1(2 pi sqrt(k) r)`.
pub fn hardy_partial_sum_p2(r: f64, k: usize) -> Result<f64> {
    Ok(hardy_running_p2(r, k)?.last().copied().unwrap_or(0.0))
}

/// Partial sums of [`hardy_partial_sum_p2`] for `K = 1..=k`.
pub fn hardy_running_p2(r: f64, k: usize) -> Result<Vec<f64>> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius must be finite and positive, got {r}")));
    }
    let table = r_function(k);
    let mut acc = CompensatedSum::default();
    let mut out = Vec::with_capacity(k);
    for (kk, &rk) in table.values().iter().enumerate().skip(1) {
        if rk != 0 {
            let sk = (kk as f64).sqrt();
            acc.add(rk as f64 / sk * classical_bessel_j(1.0, TAU * sk * r));
        }
        out.push(r * acc.value());
    }
    Ok(out)
}

/// One term group of the general Hardy sum: all sign and order variants of
/// `(a, b)` with `a >= b >= 0`.
struct Group {
    a: i64,
    b: i64,
    s: f64,
    mult: f64,
}

/// Groups with `1 <= s <= s_max`, sorted by `s`.
fn hardy_groups(p: PExponent, s_max: f64, budget: &LatticeBudget) -> Result<Vec<Group>> {
    let m = (s_max * (1.0 + TIE_REL)).powf(1.0 / p.p()).floor() as i64;
    let pairs = (m as f64 + 1.0).powi(2) / 2.0;
    if pairs > budget.max_columns as f64 {
        return Err(Error::Budget { what: "Hardy-sum lattice pairs".into(), needed: pairs, budget: budget.max_columns as f64 });
    }
    let mut groups = Vec::new();
    for a in 1..=m {
        for b in 0..=a {
            let s = p_power_sum(p, a, b);
            if tie_cmp(s, s_max) == Ordering::Greater {
                break;
            }
            let mult = match (a == b, b == 0) {
                (_, true) | (true, _) => 4.0,
                _ => 8.0,
            };
            groups.push(Group { a, b, s, mult });
        }
    }
    groups.sort_by(|x, y| x.s.total_cmp(&y.s).then(x.a.cmp(&y.a)));
    Ok(groups)
}

/// `J^[p]_{1,phi}(z)` for a lattice sum term.
fn order_one(p: PExponent, phi: &DistortedAngle, z: f64, cfg: &IntegralMethodConfig) -> Result<f64> {
    match p.q() {
        1 => Ok(classical_bessel_j(1.0, z)),
        2 => Ok(pbessel_elementary(p, 1.0, phi, z)?.value),
        _ if series_admissible(p, 1.0, phi, z, TERM_TOL) => Ok(pbessel_series(p, 1.0, phi, z, TERM_TOL)?.value),
        _ => Ok(pbessel_order1_kernel(p, phi, z, cfg)?.value),
    }
}

/// Running sums of the p-circle Hardy series, one entry `(s, partial)` per
/// distinct `s = |n|_p^p` in `[1, s_max]`.
pub fn hardy_running_general(p: PExponent, r: f64, s_max: f64, budget: &LatticeBudget) -> Result<Vec<(f64, f64)>> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius must be finite and positive, got {r}")));
    }
    if !(s_max >= 1.0) || !s_max.is_finite() {
        return Err(Error::Domain(format!("the s cutoff must be >= 1, got {s_max}")));
    }
    let groups = hardy_groups(p, s_max, budget)?;
    let pe = p.p();
    let angles: Vec<DistortedAngle> =
        groups.iter().map(|g| DistortedAngle::from_point(p, g.a as f64, g.b as f64)).collect::<Result<_>>()?;
    if p.q() > 2 {
        let heavy = groups
            .iter()
            .zip(&angles)
            .filter(|(g, phi)| !series_admissible(p, 1.0, phi, TAU * g.s.powf(1.0 / pe) * r, TERM_TOL))
            .count() as f64;
        if heavy > budget.max_integral_evals as f64 {
            return Err(Error::Budget {
                what: format!("Hardy sum at p = {p}, s <= {s_max}: integral-route evaluations"),
                needed: heavy,
                budget: budget.max_integral_evals as f64,
            });
        }
    }
    let cfg = IntegralMethodConfig::with_tol(TERM_TOL)?;
    let pref = pe * gammaf(0.5 * p.qf()).powi(2) / TAU * r;
    let mut acc = CompensatedSum::default();
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (g, phi) in groups.iter().zip(&angles) {
        let rho = g.s.powf(1.0 / pe);
        acc.add(g.mult / rho * order_one(p, phi, TAU * rho * r, &cfg)?);
        let v = pref * acc.value();
        match out.last_mut() {
            Some(last) if tie_cmp(g.s, last.0) == Ordering::Equal => last.1 = v,
            _ => out.push((g.s, v)),
        }
    }
    Ok(out)
}

/// `(p Gamma(1/p)^2 / 2 pi) r sum s^(-1/p) J^[p]_{1,phi(n)}(2 pi s^(1/p) r)`
/// over lattice points with `1 <= s = |n|_p^p <= s_max`.
pub fn hardy_partial_sum_general(p: PExponent, r: f64, s_max: f64) -> Result<f64> {
    Ok(hardy_running_general(p, r, s_max, &LatticeBudget::default())?.last().map_or(0.0, |x| x.1))
}

/// Largest `|value - target|` over index decades `[1, 10), [10, 100), ...`;
/// the final decade is closed at `top`.
pub fn decade_max_deviation(running: &[(f64, f64)], target: f64, top: f64) -> Vec<f64> {
    let decades = top.log10().ceil().max(1.0) as usize;
    let mut out = vec![f64::NAN; decades];
    for &(k, v) in running {
        if !(k >= 1.0) || k > top {
            continue;
        }
        let d = ((k.log10() + 1e-12).floor() as usize).min(decades - 1);
        let dev = (v - target).abs();
        if !(out[d] >= dev) {
            out[d] = dev;
        }
    }
    out
}

/// Whether every decade maximum is at most its predecessor.
pub fn non_increasing(bins: &[f64]) -> bool {
    bins.windows(2).all(|w| w[1] <= w[0])
}

/// Settings for [`generalized_discrepancy_spotcheck`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpotCheckConfig {
    /// Rule for the disc integral.
    pub quad: QuadratureSpec,
    /// Tolerance of each p-Bessel evaluation on the series side.
    pub tol: f64,
    pub budget: LatticeBudget,
}

impl Default for SpotCheckConfig {
    fn default() -> Self {
        Self { quad: QuadratureSpec::tanh_sinh(1e-13, 1e-12), tol: 1e-10, budget: LatticeBudget::default() }
    }
}

/// Largest `s` for which the disc integral is attempted.
pub const SPOTCHECK_MAX_S: f64 = 4.0;

fn check_spot_args(beta: f64, s: f64, x: (f64, f64)) -> Result<()> {
    if !(beta > -1.0) {
        return Err(Error::Domain(format!("beta must exceed -1, got {beta}")));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("s must be finite and positive, got {s}")));
    }
    if s > SPOTCHECK_MAX_S {
        return Err(Error::Budget { what: "disc quadrature radius s".into(), needed: s, budget: SPOTCHECK_MAX_S });
    }
    if !(x.0.abs() <= 1.0 && x.1.abs() <= 1.0) {
        return Err(Error::Domain(format!("shift x must lie in [-1, 1]^2, got {x:?}")));
    }
    Ok(())
}

/// `D_beta(s:x) = Gamma(beta+1)^-1 sum_{|m|_p^p < s} (s - |m|_p^p)^beta e^(2 pi i x.m)`.
pub fn riesz_lattice_sum(p: PExponent, beta: f64, s: f64, x: (f64, f64)) -> Result<Complex64> {
    check_spot_args(beta, s, x)?;
    let m = s.powf(1.0 / p.p()).floor() as i64;
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    for m1 in -m..=m {
        for m2 in -m..=m {
            let t = p_power_sum(p, m1, m2);
            if tie_cmp(t, s) != Ordering::Less {
                continue;
            }
            let w = (s - t).powf(beta);
            let (sn, c) = (TAU * (x.0 * m1 as f64 + x.1 * m2 as f64)).sin_cos();
            re.add(w * c);
            im.add(w * sn);
        }
    }
    let g = gammaf(beta + 1.0);
    Ok(Complex64::new(re.value(), im.value()) / g)
}

/// `Dcal_beta(s:x)`, the same weight integrated over the open p-disc.
///
/// With `xi1 = rho u`, `xi2 = rho (1-u^p)^(1/p) v` and `rho = s^(1/p)` the
/// quarter disc becomes the unit square; the imaginary part vanishes by the
/// disc's reflection symmetry.
pub fn riesz_disc_integral(p: PExponent, beta: f64, s: f64, x: (f64, f64), quad: &QuadratureSpec) -> Result<Complex64> {
    check_spot_args(beta, s, x)?;
    let pe = p.p();
    let rho = s.powf(1.0 / pe);
    let g = gammaf(beta + 1.0);
    if x == (0.0, 0.0) {
        // (2/p) A s^(beta + 2/p) B(beta + 1, 2/p), A the unit-disc area.
        let v = 2.0 / pe * area_constant(p) * s.powf(beta + 2.0 / pe) * lbeta(beta + 1.0, 2.0 / pe).exp();
        return Ok(Complex64::new(v / g, 0.0));
    }
    let (a, b) = (TAU * x.0 * rho, TAU * x.1 * rho);
    let inner_spec = QuadratureSpec { abs_tol: quad.abs_tol * 0.1, rel_tol: quad.rel_tol * 0.1, ..*quad };
    let failure = std::cell::RefCell::new(None);
    let outer = integrate(
        |u| {
            let w = one_minus_pow(pe, u, 1.0 - u);
            if w <= 0.0 {
                return 0.0;
            }
            let h = w.powf(1.0 / pe);
            let inner = integrate(
                |v| {
                    let wv = one_minus_pow(pe, v, 1.0 - v);
                    if wv <= 0.0 { 0.0 } else { wv.powf(beta) * (b * h * v).cos() }
                },
                0.0,
                1.0,
                &inner_spec,
            );
            match inner {
                Ok(iv) => w.powf(beta + 1.0 / pe) * (a * u).cos() * iv.value,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        1.0,
        quad,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(Complex64::new(4.0 * rho * rho * s.powf(beta) * outer.value / g, 0.0))
}

/// `D_beta - Dcal_beta` for `beta > -1`.
pub fn discrepancy_lhs(p: PExponent, beta: f64, s: f64, x: (f64, f64), quad: &QuadratureSpec) -> Result<Complex64> {
    Ok(riesz_lattice_sum(p, beta, s, x)? - riesz_disc_integral(p, beta, s, x, quad)?)
}

/// Both sides of the Riesz-mean lattice identity
/// `D_beta(s:x) - Dcal_beta(s:x) =
///   s^(beta + 2/p) p^(beta+1) Gamma(1/p)^2 sum_{n != 0}
///   J^[p]_{beta+1}(2 pi s^(1/p) (x - n)) / (2 pi s^(1/p) |x - n|_p)^(beta+1)`,
/// with the series cut at Euclidean `|n| <= cutoff`.
pub fn generalized_discrepancy_spotcheck(
    p: PExponent,
    beta: f64,
    s: f64,
    x: (f64, f64),
    cutoff: f64,
    cfg: &SpotCheckConfig,
) -> Result<(Complex64, Complex64)> {
    let pe = p.p();
    if !(beta > 1.0 - 0.5 * pe) {
        return Err(Error::Domain(format!("the series needs beta > 1 - p/2 = {}, got {beta}", 1.0 - 0.5 * pe)));
    }
    if !(cutoff >= 1.0) || !cutoff.is_finite() {
        return Err(Error::Domain(format!("series cutoff must be >= 1, got {cutoff}")));
    }
    let lhs = discrepancy_lhs(p, beta, s, x, &cfg.quad)?;
    let order = beta + 1.0;
    let scale = TAU * s.powf(1.0 / pe);
    let m = cutoff.floor() as i64;
    let mut points = Vec::new();
    for n1 in -m..=m {
        for n2 in -m..=m {
            if (n1, n2) == (0, 0) || ((n1 * n1 + n2 * n2) as f64) > cutoff * cutoff {
                continue;
            }
            let (d1, d2) = (x.0 - n1 as f64, x.1 - n2 as f64);
            let phi = DistortedAngle::from_point(p, d1, d2)?;
            let z = scale * crate::phi_coeffs::p_norm(p, d1, d2);
            points.push((phi, z));
        }
    }
    if p.q() != 1 {
        let heavy = points.iter().filter(|(phi, z)| !series_admissible(p, order, phi, *z, cfg.tol)).count() as f64;
        if heavy > cfg.budget.max_integral_evals as f64 {
            return Err(Error::Budget {
                what: format!("lattice series at p = {p}: integral-route evaluations"),
                needed: heavy,
                budget: cfg.budget.max_integral_evals as f64,
            });
        }
    }
    let mut acc = CompensatedSum::default();
    for (phi, z) in &points {
        let j = if p.q() == 1 { classical_bessel_j(order, *z) } else { method_router(p, order, phi, *z, cfg.tol)?.value };
        acc.add(j / z.powf(order));
    }
    let rhs = s.powf(beta + 2.0 / pe) * pe.powf(order) * gammaf(0.5 * p.qf()).powi(2) * acc.value();
    Ok((lhs, Complex64::new(rhs, 0.0)))
}

/// `|P_p(r)| / r^2`.
pub fn relative_discrepancy(p: PExponent, r: f64) -> Result<f64> {
    let rep = count_lattice_points(p, r)?;
    Ok(rep.discrepancy.abs() / (r * r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pe(q: u32) -> PExponent {
        PExponent::from_q(q).unwrap()
    }

    fn brute(p: PExponent, r: f64) -> u64 {
        let m = r.floor() as i64;
        let rp = r.powf(p.p());
        let mut c = 0;
        for a in -m..=m {
            for b in -m..=m {
                if p_power_sum(p, a, b) <= rp * (1.0 + TIE_REL) {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_lattice_points(pe(1), 2.0).unwrap().count, 13);
        let d = count_lattice_points(pe(2), 1.0).unwrap();
        assert_eq!(d.count, 5);
        assert_eq!(d.area_term, 2.0);
        assert_eq!(d.discrepancy, 3.0);
        assert_eq!(d.boundary_points, vec![(-1, 0), (0, -1), (0, 1), (1, 0)]);
        assert_eq!(count_lattice_points(pe(3), 1.0).unwrap().count, 5);
        for q in 1..=4 {
            for r in [0.7, 1.0, 2.5, 5.0, 7.3, 12.0] {
                assert_eq!(count_lattice_points(pe(q), r).unwrap().count, brute(pe(q), r), "q {q} r {r}");
            }
        }
        let tiny = LatticeBudget { max_columns: 10, ..Default::default() };
        assert!(matches!(count_lattice_points_with(pe(1), 100.0, &tiny), Err(Error::Budget { .. })));
    }

    #[test]
    fn astroid_boundary_is_exact() {
        // (1, 8): 1 + 8^(2/3) = 5, so radius 5^(3/2) passes through it.
        let rep = count_lattice_points(pe(3), 5f64.powf(1.5)).unwrap();
        assert!(rep.boundary_points.contains(&(1, 8)));
        assert!(rep.boundary_points.contains(&(-8, -1)));
    }

    #[test]
    fn areas() {
        assert!((area_term(pe(1), 1.0).unwrap() - PI).abs() < 1e-15);
        assert_eq!(area_term(pe(2), 1.0).unwrap(), 2.0);
        assert!((area_term(pe(3), 1.0).unwrap() - 3.0 * PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn angle_set_examples() {
        let a = angles_on_circle(pe(1), 1.0).unwrap();
        let want = [(0.0, (1, 0)), (PI / 2.0, (0, 1)), (PI, (-1, 0)), (1.5 * PI, (0, -1))];
        assert_eq!(a.len(), 4);
        for (e, (phi, pt)) in a.entries.iter().zip(want) {
            assert_eq!(e.point, pt);
            assert!((e.phi - phi).abs() < 1e-15);
        }
        assert!(angles_on_circle(pe(1), 3.0).unwrap().is_empty());
        let a = angles_on_circle(pe(1), 2.0).unwrap();
        let phis: Vec<f64> = a.entries.iter().map(|e| e.phi).collect();
        for (got, k) in phis.iter().zip([1.0, 3.0, 5.0, 7.0]) {
            assert!((got - k * PI / 4.0).abs() < 1e-15);
        }
        assert_eq!(angles_on_circle(pe(1), 25.0).unwrap().len(), 12);
        let a = angles_on_circle(pe(3), 5.0).unwrap();
        assert_eq!(a.len(), 8);
        for e in &a.entries {
            let (x, y) = angle_point(pe(3), 5.0, e.phi);
            assert!((x - e.point.0 as f64).abs() < 1e-10 && (y - e.point.1 as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn r_table_examples() {
        let t = r_function(25);
        assert_eq!((t.get(0), t.get(1), t.get(3), t.get(25)), (Some(1), Some(4), Some(0), Some(12)));
    }

    #[test]
    fn hardy_p2_short() {
        assert_eq!(hardy_partial_sum_p2(0.5, 0).unwrap(), 0.0);
        let v = hardy_partial_sum_p2(0.5, 10_000).unwrap();
        assert!((v - (1.0 - PI / 4.0)).abs() < 0.15, "{v}");
    }

    #[test]
    fn general_collapses_at_p2() {
        for r in [0.5, 1.3] {
            let a = hardy_partial_sum_general(pe(1), r, 400.0).unwrap();
            let b = hardy_partial_sum_p2(r, 400).unwrap();
            assert!((a - b).abs() < 1e-9, "{a} {b}");
        }
    }

    #[test]
    fn diamond_hardy_tracks_the_count() {
        let p = pe(2);
        let target = count_lattice_points(p, 1.3).unwrap().discrepancy;
        let run = hardy_running_general(p, 1.3, 400.0, &LatticeBudget::default()).unwrap();
        let bins = decade_max_deviation(&run, target, 400.0);
        assert!(bins[2] < bins[0], "{bins:?}");
    }

    #[test]
    fn astroid_budget_is_reported() {
        let r = hardy_running_general(pe(3), 1.7, 1000.0, &LatticeBudget::default());
        assert!(matches!(r, Err(Error::Budget { .. })));
    }

    #[test]
    fn riesz_spot_check_p2() {
        let (lhs, rhs) =
            generalized_discrepancy_spotcheck(pe(1), 1.0, 2.5, (0.0, 0.0), 40.0, &SpotCheckConfig::default()).unwrap();
        assert!((lhs - rhs).norm() <= 0.05 * lhs.norm().max(1.0), "{lhs} {rhs}");
        let l0 = discrepancy_lhs(pe(1), 0.0, 2.5, (0.0, 0.0), &SpotCheckConfig::default().quad).unwrap();
        let p2 = count_lattice_points(pe(1), 2.5f64.sqrt()).unwrap().discrepancy;
        assert!((l0.re - p2).abs() < 1e-12 && l0.im == 0.0);
    }

    #[test]
    fn disc_integral_matches_closed_form_near_zero_shift() {
        let quad = SpotCheckConfig::default().quad;
        for q in [1, 3] {
            let z = riesz_disc_integral(pe(q), 1.0, 1.5, (0.0, 0.0), &quad).unwrap().re;
            let near = riesz_disc_integral(pe(q), 1.0, 1.5, (1e-9, 0.0), &quad).unwrap().re;
            assert!((z - near).abs() < 1e-9 * z, "q {q}: {z} {near}");
        }
        // p = 2: int_{|xi| < sqrt s} e^(2 pi i x.xi) = sqrt(s) J_1(2 pi sqrt(s) |x|) / |x|.
        let (s, x) = (2.0f64, 0.3f64);
        let want = s.sqrt() * classical_bessel_j(1.0, TAU * s.sqrt() * x) / x;
        let got = riesz_disc_integral(pe(1), 0.0, s, (x, 0.0), &quad).unwrap().re;
        assert!((got - want).abs() < 1e-10, "{got} {want}");
    }
}
