//! The defining power series of `J^[p]_{omega,phi}`, its two-variable form,
//! the complex extension, and the p-cosine / p-sine entire functions.
//!
//! All series are summed in double-double. Every coefficient ratio between
//! neighbouring terms is a rational function of small integers and `omega`
//! (because `q = 2/p` is an integer), so terms are generated by exact-ish
//! recurrences rather than from gamma values. The remaining error is the
//! cancellation penalty `eps_dd * max |term|`, which is what limits the series
//! to moderate arguments.

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::dd::{Cdd, div, rising};
use crate::error::{Error, Result};
use crate::phi_coeffs::{DistortedAngle, p_norm};
use crate::special_core::gamma::{gammaf, lgamma};
use crate::special_core::{Method, PExponent, ValueWithError};

/// Unit roundoff of double-double arithmetic.
pub const EPS_DD: f64 = 4.93e-32;

const MAX_TERMS: usize = 20_000;

/// Order of a p-Bessel function.
///
/// Nonnegative real orders are the general case. The single negative order
/// `-1/p` exists only as the p-cosine reduction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Order {
    omega: f64,
}

impl Order {
    pub fn new(omega: f64) -> Result<Self> {
        if omega >= 0.0 && omega.is_finite() {
            Ok(Self { omega })
        } else {
            Err(Error::Domain(format!("order must be a nonnegative real, got {omega}")))
        }
    }

    /// The order `-1/p`.
    pub fn neg_inv_p(p: PExponent) -> Self {
        Self { omega: -0.5 * p.qf() }
    }

    pub fn value(self) -> f64 {
        self.omega
    }
}

/// A complex number off the cut `(-inf, 0]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutComplex(Complex64);

impl CutComplex {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) || (z.im == 0.0 && z.re <= 0.0) {
            return Err(Error::Domain(format!("{z} lies on the branch cut (-inf, 0]")));
        }
        Ok(Self(z))
    }

    pub fn z(self) -> Complex64 {
        self.0
    }

    /// `z^alpha` on the principal branch.
    pub fn powf(self, alpha: f64) -> Complex64 {
        let z = self.0;
        Complex64::from_polar(z.norm().powf(alpha), alpha * z.arg())
    }
}

/// A point of the plane together with its p-norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanePoint {
    pub x1: f64,
    pub x2: f64,
    pub p_norm: f64,
}

impl PlanePoint {
    pub fn new(p: PExponent, x1: f64, x2: f64) -> Self {
        Self { x1, x2, p_norm: p_norm(p, x1, x2) }
    }

    /// `x(r, phi) = (sgn cos phi r|cos phi|^(2/p), sgn sin phi r|sin phi|^(2/p))`.
    pub fn from_polar(r: f64, phi: &DistortedAngle) -> Self {
        let (x1, x2) = phi.point(r);
        Self { x1, x2, p_norm: r }
    }
}

/// Outcome of one of the normalized series engines (leading term = 1).
struct Summed {
    sum: Cdd,
    max_abs: f64,
    tail: f64,
    converged: bool,
    per_k: Vec<f64>,
}

/// `rising(q(n + 1/2), q)` for n = 0, 1, ...
struct HalfRising {
    q: u32,
    vals: Vec<TwoFloat>,
}

impl HalfRising {
    fn new(q: u32) -> Self {
        Self { q, vals: Vec::new() }
    }

    fn get(&mut self, n: usize) -> TwoFloat {
        while self.vals.len() <= n {
            let m = self.vals.len() as f64;
            let base = TwoFloat::from(f64::from(self.q) * (m + 0.5));
            self.vals.push(rising(base, self.q));
        }
        self.vals[n]
    }
}

/// Sum of `(-1)^k phase^k (rho^2/4)^k Phi_k / (k! Gamma(qk + d))`, normalized
/// by its `k = 0` term, with `Phi_k` generated through the binomial/Beta-ratio
/// recurrence in `n`.
///
/// `d` is `q + omega` for `J`, `q/2` for the p-cosine and `3q/2` for the
/// p-sine. `tol_norm` is the absolute tolerance divided by the prefactor.
fn phi_form_sum(
    q: u32,
    d: TwoFloat,
    cos_pow: f64,
    sin_pow: f64,
    rho2: f64,
    phase: Cdd,
    tol_norm: f64,
    keep_terms: bool,
) -> Summed {
    // the n-recurrence starts at the endpoint with the larger power
    let (big, small) = if sin_pow >= cos_pow { (sin_pow, cos_pow) } else { (cos_pow, sin_pow) };
    let ratio_cs = TwoFloat::from(small) / big;
    let qf = f64::from(q);
    let x = TwoFloat::new_mul(rho2, big) / 4.0;
    let mut hr = HalfRising::new(q);

    let mut head = TwoFloat::from(1.0); // w_{k,0}
    let mut ph = Cdd::one();
    let mut sum = Cdd::zero();
    let mut max_abs = 0.0f64;
    let mut prev_abs = f64::INFINITY;
    let mut per_k = Vec::new();
    let mut tail = f64::INFINITY;
    let mut converged = false;
    let mut k = 0usize;
    while k < MAX_TERMS {
        let kf = k as f64;
        let mut inner = head;
        if small > 0.0 {
            let mut w = head;
            for n in 0..k {
                let nf = n as f64;
                let num = hr.get(n) * ((kf - nf) * (kf - nf - 0.5));
                let den = hr.get(k - n - 1) * ((nf + 1.0) * (nf + 0.5));
                w = div(w * num, den) * ratio_cs;
                inner += w;
            }
        }
        let a = f64::from(inner).abs();
        let signed = if k % 2 == 0 { inner } else { -inner };
        sum = sum.add(ph.scale(signed));
        if keep_terms {
            per_k.push(f64::from(signed));
        }
        if !a.is_finite() {
            break;
        }
        max_abs = max_abs.max(a);
        if k > 0 && prev_abs < tol_norm / 10.0 && a <= prev_abs / 2.0 {
            tail = a;
            converged = true;
            break;
        }
        prev_abs = a;
        // advance the endpoint coefficient to k + 1
        let num = hr.get(k) * x;
        let den = rising(d + qf * kf, q) * ((kf + 0.5) * (kf + 1.0));
        head = div(head * num, den);
        ph = ph.mul(phase);
        k += 1;
    }
    Summed { sum, max_abs, tail, converged, per_k }
}

fn finish(pref: Complex64, s: &Summed, tol: f64, method: Method) -> ValueWithError<Complex64> {
    let mag = pref.norm();
    let value = pref * s.sum.to_c64();
    let penalty = EPS_DD * s.max_abs * mag;
    let err = s.tail * mag + penalty + 4.0 * f64::EPSILON * value.norm();
    let bad = !s.converged || penalty > tol || !value.re.is_finite() || !value.im.is_finite();
    ValueWithError::new(value, err, method).flagged(bad)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 { Ok(()) } else { Err(Error::Domain(format!("tolerance must be positive, got {tol}"))) }
}

/// `q^(2+omega) / Gamma(q + omega)` in log form.
fn log_head(p: PExponent, omega: f64) -> f64 {
    let q = p.qf();
    (2.0 + omega) * q.ln() - lgamma(q + omega)
}

fn d_bessel(p: PExponent, omega: f64) -> TwoFloat {
    TwoFloat::new_add(p.qf(), omega)
}

/// `J^[p]_{omega,phi}(r)` from its defining series.
///
/// `tol` is an absolute tolerance. The result is flagged when the
/// cancellation penalty exceeds `tol`; larger arguments should go through an
/// integral representation.
pub fn pbessel_series(p: PExponent, omega: f64, phi: &DistortedAngle, r: f64, tol: f64) -> Result<ValueWithError> {
    check_tol(tol)?;
    Order::new(omega)?;
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("argument must be nonnegative, got {r}")));
    }
    if r == 0.0 {
        let v = if omega == 0.0 { p.qf() * p.qf() / gammaf(p.qf()) } else { 0.0 };
        return Ok(ValueWithError::new(v, 4.0 * f64::EPSILON * v, Method::Series));
    }
    let pref = (log_head(p, omega) + omega * (0.5 * r).ln()).exp();
    let s = phi_form_sum(p.q(), d_bessel(p, omega), phi.cos_pow, phi.sin_pow, r * r, Cdd::one(), tol / pref, false);
    Ok(finish(Complex64::new(pref, 0.0), &s, tol, Method::Series).map(|z| z.re))
}

/// The individual terms `c_k r^(2k+omega)` of the series at `r > 0`, as
/// `(exponent, value)` pairs. Used by term-wise operator application.
pub fn pbessel_series_terms(
    p: PExponent,
    omega: f64,
    phi: &DistortedAngle,
    r: f64,
    tol: f64,
) -> Result<Vec<(f64, f64)>> {
    check_tol(tol)?;
    Order::new(omega)?;
    if !(r > 0.0) {
        return Err(Error::Domain("term expansion needs r > 0".into()));
    }
    let pref = (log_head(p, omega) + omega * (0.5 * r).ln()).exp();
    let s = phi_form_sum(p.q(), d_bessel(p, omega), phi.cos_pow, phi.sin_pow, r * r, Cdd::one(), tol / pref, true);
    if !s.converged {
        return Err(Error::Domain(format!("series did not converge at r = {r}")));
    }
    Ok(s.per_k.iter().enumerate().map(|(k, t)| (2.0 * k as f64 + omega, pref * t)).collect())
}

/// Largest intermediate term of the series at `(omega, phi, r)`, estimated
/// from the majorant `exp(r (|cos phi|^(2/p) + |sin phi|^(2/p)))`. The series
/// is usable for tolerance `tol` roughly when `EPS_DD` times this is below it.
pub fn series_term_bound(p: PExponent, omega: f64, phi: &DistortedAngle, r: f64) -> f64 {
    let pref = (log_head(p, omega) + omega * (0.5 * r.max(1e-300)).ln()).exp();
    pref * (r * (phi.cos_q + phi.sin_q)).exp()
}

/// Two-variable series summed by anti-diagonals `k = m1 + m2`, each
/// anti-diagonal added from its largest term down.
pub fn pbessel_xy_series(p: PExponent, omega: f64, x: PlanePoint, tol: f64) -> Result<ValueWithError> {
    check_tol(tol)?;
    Order::new(omega)?;
    let r = x.p_norm;
    if r == 0.0 {
        let v = if omega == 0.0 { p.qf() * p.qf() / gammaf(p.qf()) } else { 0.0 };
        return Ok(ValueWithError::new(v, 4.0 * f64::EPSILON * v, Method::Series));
    }
    let q = p.q();
    let qf = p.qf();
    let pref = (log_head(p, omega) + omega * (0.5 * r).ln()).exp();
    let tol_norm = tol / pref;
    let big_x = x.x1 * x.x1;
    let big_y = x.x2 * x.x2;
    let d = d_bessel(p, omega);
    let mut hr = HalfRising::new(q);
    // u[m] = X^m/(2m)!, v[m] = Y^m/(2m)!
    let mut u = vec![TwoFloat::from(1.0)];
    let mut v = vec![TwoFloat::from(1.0)];
    let mut beta_k0 = TwoFloat::from(1.0);
    let mut sum = TwoFloat::from(0.0);
    let mut max_abs = 0.0f64;
    let mut prev_abs = f64::INFINITY;
    let mut tail = f64::INFINITY;
    let mut converged = false;
    let mut diag: Vec<TwoFloat> = Vec::new();
    for k in 0..MAX_TERMS {
        if k > 0 {
            let m = (k - 1) as f64;
            let den = ((2.0 * m + 1.0) * (2.0 * m + 2.0)) as f64;
            u.push(u[k - 1] * big_x / den);
            v.push(v[k - 1] * big_y / den);
            beta_k0 = div(beta_k0 * hr.get(k - 1), rising(d + qf * m, q));
        }
        diag.clear();
        let mut beta = beta_k0;
        for m1 in (0..=k).rev() {
            let m2 = k - m1;
            diag.push(beta * u[m1] * v[m2]);
            if m1 > 0 {
                beta = div(beta * hr.get(m2), hr.get(m1 - 1));
            }
        }
        diag.sort_by(|a, b| f64::from(*b).abs().total_cmp(&f64::from(*a).abs()));
        let mut inner = TwoFloat::from(0.0);
        for t in &diag {
            inner += *t;
        }
        let a = f64::from(inner).abs();
        sum = if k % 2 == 0 { sum + inner } else { sum - inner };
        if !a.is_finite() {
            break;
        }
        max_abs = max_abs.max(a);
        if k > 0 && prev_abs < tol_norm / 10.0 && a <= prev_abs / 2.0 {
            tail = a;
            converged = true;
            break;
        }
        prev_abs = a;
    }
    let value = pref * f64::from(sum);
    let penalty = EPS_DD * max_abs * pref;
    let err = tail * pref + penalty + 4.0 * f64::EPSILON * value.abs();
    let bad = !converged || penalty > tol || !value.is_finite();
    Ok(ValueWithError::new(value, err, Method::Series).flagged(bad))
}

/// Unit phase `(z/|z|)^2` and `|z|^2`.
fn phase_of(z: Complex64) -> (Cdd, f64) {
    let rho = z.norm();
    if rho == 0.0 {
        return (Cdd::one(), 0.0);
    }
    let u = Cdd::from_c64(z / rho);
    (u.mul(u), rho * rho)
}

/// Complex extension on the cut plane, `Re`-order `>= 0` or the order `-1/p`.
pub fn pbessel_complex(
    p: PExponent,
    order: Order,
    phi: &DistortedAngle,
    z: CutComplex,
    tol: f64,
) -> Result<ValueWithError<Complex64>> {
    check_tol(tol)?;
    let omega = order.value();
    let q = p.qf();
    let zw = if omega == 0.0 { Complex64::new(1.0, 0.0) } else { CutComplex(z.z() * 0.5).powf(omega) };
    let pref = zw * ((2.0 + omega) * q.ln() - lgamma(q + omega)).exp();
    let (phase, rho2) = phase_of(z.z());
    let s = phi_form_sum(p.q(), d_bessel(p, omega), phi.cos_pow, phi.sin_pow, rho2, phase, tol / pref.norm(), false);
    Ok(finish(pref, &s, tol, Method::Series))
}

fn require_odd(p: PExponent, what: &str) -> Result<()> {
    if p.q_odd() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("{what} is defined only for odd q = 2/p, got p = {p}")))
    }
}

/// The p-cosine entire function (odd `q` only).
pub fn p_cosine(p: PExponent, phi: &DistortedAngle, z: Complex64, tol: f64) -> Result<ValueWithError<Complex64>> {
    require_odd(p, "the p-cosine")?;
    check_tol(tol)?;
    let half = 0.5 * p.qf();
    let pref = Complex64::new(gammaf(half) / std::f64::consts::PI.sqrt(), 0.0);
    let (phase, rho2) = phase_of(z);
    let s = phi_form_sum(p.q(), TwoFloat::from(half), phi.cos_pow, phi.sin_pow, rho2, phase, tol / pref.norm(), false);
    Ok(finish(pref, &s, tol, Method::Series))
}

/// The p-sine entire function (odd `q` only).
pub fn p_sine(p: PExponent, phi: &DistortedAngle, z: Complex64, tol: f64) -> Result<ValueWithError<Complex64>> {
    require_odd(p, "the p-sine")?;
    check_tol(tol)?;
    let half = 0.5 * p.qf();
    if z.norm() == 0.0 {
        return Ok(ValueWithError::new(Complex64::new(0.0, 0.0), 0.0, Method::Series));
    }
    let c = gammaf(half).powi(2) / (2.0 * std::f64::consts::PI.sqrt() * gammaf(3.0 * half));
    let pref = z * c;
    let (phase, rho2) = phase_of(z);
    let s = phi_form_sum(p.q(), TwoFloat::from(3.0 * half), phi.cos_pow, phi.sin_pow, rho2, phase, tol / pref.norm(), false);
    Ok(finish(pref, &s, tol, Method::Series))
}

/// `J^[p]_{-1/p,phi}(z) = 4 sqrt(pi) / (p^(2-1/p) Gamma(1/p)^2) cos_p(z) / z^(1/p)`.
pub fn pbessel_neg_inv_p(p: PExponent, phi: &DistortedAngle, z: CutComplex, tol: f64) -> Result<ValueWithError<Complex64>> {
    let inv_p = 0.5 * p.qf();
    let pe = p.p();
    let c = 4.0 * std::f64::consts::PI.sqrt() / (pe.powf(2.0 - inv_p) * gammaf(inv_p).powi(2));
    let cz = p_cosine(p, phi, z.z(), tol / c)?;
    let f = c / z.powf(inv_p);
    Ok(ValueWithError { value: cz.value * f, err_estimate: cz.err_estimate * f.norm(), ..cz })
}

/// `J^[p]_{1/p,phi}(z) = 8 sqrt(pi) / (p^(2+1/p) Gamma(1/p)^2) z^(1/p-1) sin_p(z)`.
pub fn pbessel_inv_p(p: PExponent, phi: &DistortedAngle, z: CutComplex, tol: f64) -> Result<ValueWithError<Complex64>> {
    let inv_p = 0.5 * p.qf();
    let pe = p.p();
    let c = 8.0 * std::f64::consts::PI.sqrt() / (pe.powf(2.0 + inv_p) * gammaf(inv_p).powi(2));
    let sz = p_sine(p, phi, z.z(), tol / c)?;
    let f = c * z.powf(inv_p - 1.0);
    Ok(ValueWithError { value: sz.value * f, err_estimate: sz.err_estimate * f.norm(), ..sz })
}
