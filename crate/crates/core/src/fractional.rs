//! Erdelyi-Kober type fractional integral and derivative,
//!
//! `I^gamma_{p,eta} f(r) = p/Gamma(gamma) int_0^1 tau^(p(eta+1)-1) f(tau r) (1-tau^p)^(gamma-1) dtau`,
//! `D^gamma_{p,eta} f(r) = r^(-p eta) (1/(p r^(p-1)) d/dr) r^(p(1+eta)) I^(1-gamma)_{p,eta+gamma} f(r)`,
//!
//! and numerical checks of the order-shifting identities they satisfy on
//! p-Bessel functions.
//!
//! Two independent paths are provided. The quadrature path integrates with
//! tanh-sinh and differentiates with Richardson-extrapolated central
//! differences. The term-wise path applies the operators to the truncated
//! power series, where they act on `r^a` by explicit Gamma ratios.

use crate::error::{Error, Result};
use crate::pbessel_integral::one_minus_pow;
use crate::pbessel_series::pbessel_series_terms;
use crate::phi_coeffs::DistortedAngle;
use crate::router::method_router;
use crate::special_core::gamma::{gammaf, lgamma};
use crate::special_core::{Method, PExponent, QuadratureSpec, ValueWithError, tanh_sinh};

/// Order `gamma` and weight `eta` of an Erdelyi-Kober operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EKParams {
    pub gamma_ord: f64,
    pub eta: f64,
    pub p: PExponent,
}

impl EKParams {
    pub fn new(p: PExponent, gamma_ord: f64, eta: f64) -> Result<Self> {
        if !(gamma_ord > 0.0 && gamma_ord.is_finite()) {
            return Err(Error::Domain(format!("operator order must be positive, got {gamma_ord}")));
        }
        if !eta.is_finite() {
            return Err(Error::Domain(format!("eta must be finite, got {eta}")));
        }
        Ok(Self { gamma_ord, eta, p })
    }
}

/// `eta` of the fractional differential identity that lowers the order by `gamma`.
pub fn eta_theorem12(p: PExponent, omega: f64, gamma: f64) -> f64 {
    let pe = p.p();
    (1.0 - 1.0 / pe) * omega + (2.0 - gamma) / pe - 1.0
}

/// `eta` of the order-raising integral identity.
pub fn eta_raise(p: PExponent, omega: f64) -> f64 {
    let pe = p.p();
    (1.0 - 1.0 / pe) * omega + 2.0 / pe - 1.0
}

/// `eta(p, omega)` of the fractional differential equation.
pub fn eta_ode(p: PExponent, omega: f64) -> f64 {
    eta_raise(p, omega) - 1.0
}

/// Default quadrature for the operators.
pub fn default_spec() -> QuadratureSpec {
    QuadratureSpec::tanh_sinh(1e-15, 1e-14)
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() { Ok(()) } else { Err(Error::Domain(format!("operators need r > 0, got {r}"))) }
}

/// Quadrature path of `I^gamma_{p,eta} f(r)`.
pub fn ek_integral(f: &dyn Fn(f64) -> f64, params: EKParams, r: f64, spec: &QuadratureSpec) -> Result<ValueWithError> {
    check_r(r)?;
    let pe = params.p.p();
    let lead = pe * (params.eta + 1.0);
    if lead <= 0.0 {
        return Err(Error::Domain(format!(
            "tau^({}) is not integrable at 0: need p (eta + 1) > 0",
            lead - 1.0
        )));
    }
    let g = params.gamma_ord;
    let integrand = |tau: f64, _da: f64, db: f64| {
        let w = one_minus_pow(pe, tau, db);
        if w <= 0.0 || tau <= 0.0 {
            return 0.0;
        }
        tau.powf(lead - 1.0) * f(tau * r) * w.powf(g - 1.0)
    };
    let c = pe / gammaf(g);
    let scaled = QuadratureSpec { abs_tol: spec.abs_tol / c, ..*spec };
    let v = tanh_sinh(integrand, 0.0, 1.0, &scaled);
    Ok(ValueWithError {
        value: v.value * c,
        err_estimate: v.err_estimate * c,
        method: Method::Quadrature,
        reliable: v.reliable,
    })
}

/// Step used by the stencils: `max(1e-4, 1e-3 r)`.
pub fn stencil_step(r: f64) -> f64 {
    1e-4_f64.max(1e-3 * r)
}

/// First and second derivatives of `g` at `r`, each from central differences
/// at `h` and `h/2` with one Richardson step. Returns
/// `(g', g'', |Richardson correction of g'|, |correction of g''|)`.
fn derivatives(g: &mut dyn FnMut(f64) -> Result<f64>, r: f64, h: f64) -> Result<(f64, f64, f64, f64)> {
    if r - h <= 0.0 {
        return Err(Error::Domain(format!("stencil at r = {r} with step {h} crosses 0")));
    }
    let g0 = g(r)?;
    let (gp, gm) = (g(r + h)?, g(r - h)?);
    let (gp2, gm2) = (g(r + 0.5 * h)?, g(r - 0.5 * h)?);
    let d1_h = (gp - gm) / (2.0 * h);
    let d1_h2 = (gp2 - gm2) / h;
    let d2_h = (gp - 2.0 * g0 + gm) / (h * h);
    let d2_h2 = (gp2 - 2.0 * g0 + gm2) / (0.25 * h * h);
    let d1 = (4.0 * d1_h2 - d1_h) / 3.0;
    let d2 = (4.0 * d2_h2 - d2_h) / 3.0;
    Ok((d1, d2, (d1 - d1_h2).abs(), (d2 - d2_h2).abs()))
}

/// Quadrature-and-stencil path of `D^gamma_{p,eta} f(r)` for `0 < gamma < 1`.
pub fn ek_derivative(f: &dyn Fn(f64) -> f64, params: EKParams, r: f64, spec: &QuadratureSpec) -> Result<ValueWithError> {
    check_r(r)?;
    let g = params.gamma_ord;
    if !(g > 0.0 && g < 1.0) {
        return Err(Error::Domain(format!("fractional derivative needs 0 < gamma < 1, got {g}")));
    }
    let pe = params.p.p();
    let eta = params.eta;
    let inner = EKParams::new(params.p, 1.0 - g, eta + g)?;
    let mut reliable = true;
    let mut quad_err = 0.0f64;
    let mut h_of = |rho: f64| -> Result<f64> {
        let v = ek_integral(f, inner, rho, spec)?;
        reliable &= v.reliable;
        quad_err = quad_err.max(v.err_estimate);
        Ok(rho.powf(pe * (1.0 + eta)) * v.value)
    };
    let h = stencil_step(r);
    let (d1, _, corr, _) = derivatives(&mut h_of, r, h)?;
    let c = r.powf(-pe * eta) / (pe * r.powf(pe - 1.0));
    let value = c * d1;
    let err = c.abs() * (corr + quad_err * r.powf(pe * (1.0 + eta)) / h);
    let disagree = corr > 1e-5 * value.abs().max(1.0);
    Ok(ValueWithError::new(value, err, Method::Quadrature).flagged(!reliable || disagree))
}

/// `D^1_{p,eta} f(r) = r^(-p eta) L L [rho^(p(1+eta)) I^1_{p,eta+1} f]` with
/// `L = (1/(p r^(p-1))) d/dr`: the unit-order derivative written out as two
/// first-order steps.
pub fn ek_derivative_unit(f: &dyn Fn(f64) -> f64, p: PExponent, eta: f64, r: f64, spec: &QuadratureSpec) -> Result<ValueWithError> {
    check_r(r)?;
    let pe = p.p();
    let inner = EKParams::new(p, 1.0, eta + 1.0)?;
    let mut reliable = true;
    let mut h_of = |rho: f64| -> Result<f64> {
        let v = ek_integral(f, inner, rho, spec)?;
        reliable &= v.reliable;
        Ok(rho.powf(pe * (1.0 + eta)) * v.value)
    };
    let h = stencil_step(r);
    let (d1, d2, c1, c2) = derivatives(&mut h_of, r, h)?;
    // L L h = (1/p^2) r^(1-p) [r^(1-p) h'' + (1-p) r^(-p) h']
    let a = r.powf(1.0 - pe) / (pe * pe);
    let t2 = r.powf(1.0 - pe);
    let t1 = (1.0 - pe) * r.powf(-pe);
    let s = r.powf(-pe * eta);
    let value = s * a * (t2 * d2 + t1 * d1);
    let err = (s * a).abs() * (t2.abs() * c2 + t1.abs() * c1);
    Ok(ValueWithError::new(value, err, Method::Quadrature).flagged(!reliable))
}

fn gamma_ratio(num: f64, den: f64) -> Result<f64> {
    if num <= 0.0 || den <= 0.0 {
        return Err(Error::Domain(format!("term-wise multiplier needs positive Gamma arguments, got {num}, {den}")));
    }
    Ok((lgamma(num) - lgamma(den)).exp())
}

/// Multiplier of `r^a` under `I^gamma_{p,eta}`.
pub fn integral_multiplier(params: EKParams, a: f64) -> Result<f64> {
    let b = params.eta + 1.0 + a / params.p.p();
    gamma_ratio(b, b + params.gamma_ord)
}

/// Multiplier of `r^a` under `D^gamma_{p,eta}`, `0 < gamma < 1`.
pub fn derivative_multiplier(params: EKParams, a: f64) -> Result<f64> {
    let b = params.eta + 1.0 + a / params.p.p();
    gamma_ratio(b + params.gamma_ord, b)
}

/// Term-wise `I^gamma` applied to `sum_k c_k r^(a_k)`, given as
/// `(a_k, c_k r^(a_k))` pairs at the point `r`.
pub fn ek_integral_termwise(terms: &[(f64, f64)], params: EKParams) -> Result<f64> {
    let mut s = 0.0;
    for &(a, v) in terms {
        s += v * integral_multiplier(params, a)?;
    }
    Ok(s)
}

/// Term-wise `D^gamma`, `0 < gamma < 1`.
pub fn ek_derivative_termwise(terms: &[(f64, f64)], params: EKParams) -> Result<f64> {
    if !(params.gamma_ord < 1.0) {
        return Err(Error::Domain("term-wise fractional derivative needs gamma < 1".into()));
    }
    let mut s = 0.0;
    for &(a, v) in terms {
        s += v * derivative_multiplier(params, a)?;
    }
    Ok(s)
}

/// Evaluator of `J^[p]_{omega,phi}` used by the checks.
fn jfun(p: PExponent, omega: f64, phi: DistortedAngle) -> impl Fn(f64) -> f64 {
    move |x: f64| match method_router(p, omega, &phi, x, 1e-15) {
        Ok(v) => v.value,
        Err(_) => f64::NAN,
    }
}

fn jval(p: PExponent, omega: f64, phi: &DistortedAngle, r: f64) -> Result<ValueWithError> {
    method_router(p, omega, phi, r, 1e-15)
}

/// Outcome of an identity check `lhs = rhs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs|`.
    pub residual: f64,
    /// Normalizer for relative tests, `max(1, |rhs|)` unless stated otherwise.
    pub scale: f64,
    pub reliable: bool,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64, reliable: bool) -> Self {
        Self { lhs, rhs, residual: (lhs - rhs).abs(), scale: rhs.abs().max(1.0), reliable }
    }

    pub fn relative(&self) -> f64 {
        self.residual / self.scale
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.residual <= tol * self.scale
    }
}

/// `D^gamma_{p,eta} J_{omega+gamma} = (r/p)^gamma J_omega` with
/// `eta = (1 - 1/p) omega + (2 - gamma)/p - 1`.
pub fn verify_theorem12(
    p: PExponent,
    omega: f64,
    gamma: f64,
    phi: &DistortedAngle,
    r: f64,
    spec: &QuadratureSpec,
) -> Result<IdentityCheck> {
    let params = EKParams::new(p, gamma, eta_theorem12(p, omega, gamma))?;
    let f = jfun(p, omega + gamma, *phi);
    let lhs = ek_derivative(&f, params, r, spec)?;
    let j = jval(p, omega, phi, r)?;
    let rhs = (r / p.p()).powf(gamma) * j.value;
    Ok(IdentityCheck::new(lhs.value, rhs, lhs.reliable && j.reliable))
}

/// `I^gamma_{p,eta} J_omega = (p/r)^gamma J_{omega+gamma}` with
/// `eta = (1 - 1/p) omega + 2/p - 1`.
pub fn verify_ek_int_j(
    p: PExponent,
    omega: f64,
    gamma: f64,
    phi: &DistortedAngle,
    r: f64,
    spec: &QuadratureSpec,
) -> Result<IdentityCheck> {
    let params = EKParams::new(p, gamma, eta_raise(p, omega))?;
    let f = jfun(p, omega, *phi);
    let lhs = ek_integral(&f, params, r, spec)?;
    let j = jval(p, omega + gamma, phi, r)?;
    let rhs = (p.p() / r).powf(gamma) * j.value;
    let mut c = IdentityCheck::new(lhs.value, rhs, lhs.reliable && j.reliable);
    c.scale = j.value.abs().max(1.0);
    Ok(c)
}

/// `d/dr [r^(1+(p-1) omega) J_{omega+1}] = r^(1+(p-1) omega) J_omega`, the
/// left side by Richardson central differences with step `h_rel * r`.
pub fn verify_order_lower(p: PExponent, omega: f64, phi: &DistortedAngle, r: f64, h_rel: f64) -> Result<IdentityCheck> {
    check_r(r)?;
    if !(h_rel > 0.0 && h_rel < 0.5) {
        return Err(Error::Domain(format!("relative step must lie in (0, 1/2), got {h_rel}")));
    }
    let e = 1.0 + (p.p() - 1.0) * omega;
    let mut reliable = true;
    let mut g = |x: f64| -> Result<f64> {
        let v = jval(p, omega + 1.0, phi, x)?;
        reliable &= v.reliable;
        Ok(x.powf(e) * v.value)
    };
    let (d1, _, _, _) = derivatives(&mut g, r, h_rel * r)?;
    let j = jval(p, omega, phi, r)?;
    let rhs = r.powf(e) * j.value;
    Ok(IdentityCheck::new(d1, rhs, reliable && j.reliable))
}

/// The three terms of the fractional differential equation at `r` and their sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeCheck {
    /// `p r^p D^1 u`.
    pub derivative_term: f64,
    /// `r d/dr (I^1 - E) u`.
    pub drift_term: f64,
    /// `(p-1)(omega-2)(I^1 - E) u`.
    pub potential_term: f64,
    pub residual: f64,
    /// Largest term magnitude.
    pub scale: f64,
    pub reliable: bool,
}

impl OdeCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.residual.abs() <= tol * self.scale.max(f64::MIN_POSITIVE)
    }
}

/// Residual of
/// `p r^p D^1_{p,eta} u + r d/dr (I^1_{p,eta+1} - E) u + (p-1)(omega-2)(I^1_{p,eta+1} - E) u`
/// at `u = J_omega`, `eta = eta(p, omega)`.
pub fn verify_fractional_ode(p: PExponent, omega: f64, phi: &DistortedAngle, r: f64, spec: &QuadratureSpec) -> Result<OdeCheck> {
    check_r(r)?;
    let pe = p.p();
    let eta = eta_ode(p, omega);
    let u = jfun(p, omega, *phi);
    let d1 = ek_derivative_unit(&u, p, eta, r, spec)?;
    let i1 = EKParams::new(p, 1.0, eta + 1.0)?;
    let mut reliable = d1.reliable;
    let mut w = |x: f64| -> Result<f64> {
        let v = ek_integral(&u, i1, x, spec)?;
        reliable &= v.reliable;
        Ok(v.value - u(x))
    };
    let (dw, _, _, _) = derivatives(&mut w, r, stencil_step(r))?;
    let w0 = w(r)?;
    let a = pe * r.powf(pe) * d1.value;
    let b = r * dw;
    let c = (pe - 1.0) * (omega - 2.0) * w0;
    Ok(OdeCheck {
        derivative_term: a,
        drift_term: b,
        potential_term: c,
        residual: a + b + c,
        scale: a.abs().max(b.abs()).max(c.abs()),
        reliable,
    })
}

/// Both paths for `I^gamma_{p,eta} J_omega(r)`: `(quadrature, term-wise)`.
pub fn integral_dual_path(
    p: PExponent,
    omega: f64,
    params: EKParams,
    phi: &DistortedAngle,
    r: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let f = jfun(p, omega, *phi);
    let q = ek_integral(&f, params, r, spec)?;
    let terms = pbessel_series_terms(p, omega, phi, r, 1e-18)?;
    Ok((q.value, ek_integral_termwise(&terms, params)?))
}

/// Both paths for `D^gamma_{p,eta} J_omega(r)`, `0 < gamma < 1`.
pub fn derivative_dual_path(
    p: PExponent,
    omega: f64,
    params: EKParams,
    phi: &DistortedAngle,
    r: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let f = jfun(p, omega, *phi);
    let q = ek_derivative(&f, params, r, spec)?;
    let terms = pbessel_series_terms(p, omega, phi, r, 1e-18)?;
    Ok((q.value, ek_derivative_termwise(&terms, params)?))
}
