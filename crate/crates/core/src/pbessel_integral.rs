//! Integral representations of `J^[p]_{omega,phi}`.
//!
//! With `x1 = r|cos phi|^(2/p)`, `x2 = r|sin phi|^(2/p)` and
//! `h(u) = (1 - u^p)^(1/p)`:
//!
//! * order zero: `4/(p Gamma(1/p)^2) int_0^1 cos(x1 h) cos(x2 u) (1-u^p)^(1/p-1) du`;
//! * order `omega > 0`: the same outer integral with `cos(x1 h)` replaced by
//!   the inner integral `G(x1 h)`, `G(w) = p int_0^1 cos(w t) (1-t^p)^(omega-1) dt`,
//!   which is tabulated once as a Chebyshev interpolant;
//! * on an axis the inner integral collapses to a Beta function;
//! * the Poisson form integrates the p-cosine over `[0, pi/2]` (odd `q`);
//! * the order-raising kernel lifts any base-order evaluator by `gamma > 0`.
//!
//! Integrands carry `(1 - u^p)` to full relative accuracy near `u = 1` by
//! working from the complement distance that tanh-sinh provides.

use std::cell::{Cell, RefCell};
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pbessel_series::{CutComplex, p_cosine};
use crate::phi_coeffs::DistortedAngle;
use crate::special_core::gamma::gammaf;
use crate::special_core::{
    Method, PExponent, QuadratureSpec, ValueWithError, integrate_complex, integrate_panels,
};

/// Quadrature settings for the integral routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralMethodConfig {
    pub outer_spec: QuadratureSpec,
    pub inner_spec: QuadratureSpec,
    /// Split oscillatory integrals into panels between phase half-periods.
    pub oscillation_split: bool,
}

impl IntegralMethodConfig {
    /// Inner tolerances must be at least ten times tighter than outer ones.
    pub fn new(outer_spec: QuadratureSpec, inner_spec: QuadratureSpec, oscillation_split: bool) -> Result<Self> {
        if inner_spec.abs_tol > outer_spec.abs_tol / 10.0 || inner_spec.rel_tol > outer_spec.rel_tol / 10.0 {
            return Err(Error::Domain("inner quadrature tolerances must be <= outer / 10".into()));
        }
        Ok(Self { outer_spec, inner_spec, oscillation_split })
    }

    /// Tanh-sinh everywhere, outer tolerance `tol`, inner `tol / 100`.
    pub fn with_tol(tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
        }
        let inner = (tol / 100.0).max(1e-15);
        Self::new(QuadratureSpec::tanh_sinh(tol, tol), QuadratureSpec::tanh_sinh(inner, inner), true)
    }
}

impl Default for IntegralMethodConfig {
    fn default() -> Self {
        Self {
            outer_spec: QuadratureSpec::tanh_sinh(1e-12, 1e-12),
            inner_spec: QuadratureSpec::tanh_sinh(1e-14, 1e-14),
            oscillation_split: true,
        }
    }
}

/// Total phase beyond which oscillatory integrals are split into panels.
const SPLIT_PHASE: f64 = 30.0;

/// `1 - u^p` for `u in [0, 1]`, with `db = 1 - u` supplied exactly.
pub(crate) fn one_minus_pow(p: f64, u: f64, db: f64) -> f64 {
    if u < 0.5 { 1.0 - u.powf(p) } else { -(p * (-db).ln_1p()).exp_m1() }
}

fn check_r(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("argument must be a finite nonnegative real, got {r}")))
    }
}

fn coords(phi: &DistortedAngle, r: f64) -> (f64, f64) {
    (r * phi.cos_q, r * phi.sin_q)
}

/// Break points in `[0, 1]` where the increasing phase `v` crosses
/// `(j + 1/2) pi`. Returns just `[0, 1]` when splitting is off or the phase
/// is small.
fn phase_breaks(v: impl Fn(f64) -> f64, split: bool) -> Vec<f64> {
    let total = v(1.0);
    let mut breaks = vec![0.0];
    if split && total > SPLIT_PHASE {
        let mut lo = 0.0;
        let mut j = 0.0;
        while (j + 0.5) * PI < total {
            let target = (j + 0.5) * PI;
            let (mut a, mut b) = (lo, 1.0);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if v(m) < target { a = m } else { b = m }
            }
            let u = 0.5 * (a + b);
            if u > lo && u < 1.0 {
                breaks.push(u);
                lo = u;
            }
            j += 1.0;
        }
    }
    breaks.push(1.0);
    breaks
}

/// `x1 (1 - h(u)) + x2 u`, the combined phase of the order-zero integrand.
fn outer_phase(p: f64, x1: f64, x2: f64) -> impl Fn(f64) -> f64 {
    move |u: f64| x1 * (1.0 - (1.0 - u.powf(p)).max(0.0).powf(1.0 / p)) + x2 * u
}

fn scaled(v: ValueWithError, factor: f64, method: Method) -> ValueWithError {
    ValueWithError {
        value: v.value * factor,
        err_estimate: v.err_estimate * factor.abs(),
        method,
        reliable: v.reliable,
    }
}

/// Order-zero single integral.
pub fn pbessel_thm13_order0(
    p: PExponent,
    phi: &DistortedAngle,
    r: f64,
    cfg: &IntegralMethodConfig,
) -> Result<ValueWithError> {
    check_r(r)?;
    let pe = p.p();
    let inv_p = 0.5 * p.qf();
    let (x1, x2) = coords(phi, r);
    let pref = 4.0 / (pe * gammaf(inv_p).powi(2));
    let f = |u: f64, _da: f64, db: f64| {
        let w = one_minus_pow(pe, u, db);
        if w <= 0.0 {
            return 0.0;
        }
        (x1 * w.powf(inv_p)).cos() * (x2 * u).cos() * w.powf(inv_p - 1.0)
    };
    let breaks = phase_breaks(outer_phase(pe, x1, x2), cfg.oscillation_split);
    let v = integrate_panels(f, &breaks, &scaled_spec(&cfg.outer_spec, pref));
    Ok(scaled(v, pref, Method::DoubleIntegral))
}

/// Tolerances of `spec` divided by `|factor|`, so that after scaling the
/// result meets the caller's absolute tolerance.
fn scaled_spec(spec: &QuadratureSpec, factor: f64) -> QuadratureSpec {
    let f = factor.abs().max(1e-300);
    QuadratureSpec { abs_tol: (spec.abs_tol / f).max(1e-300), ..*spec }
}

/// Chebyshev interpolant on `[a, b]`.
struct Chebyshev {
    a: f64,
    b: f64,
    coef: Vec<f64>,
}

impl Chebyshev {
    /// Fits `f` at `n` Chebyshev points of the first kind.
    fn fit(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, n: usize) -> Self {
        let nodes: Vec<f64> = (0..n)
            .map(|j| {
                let t = (PI * (j as f64 + 0.5) / n as f64).cos();
                0.5 * (a + b) + 0.5 * (b - a) * t
            })
            .collect();
        let vals: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
        let coef = (0..n)
            .map(|k| {
                let s: f64 = vals
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos())
                    .sum();
                let c = 2.0 * s / n as f64;
                if k == 0 { 0.5 * c } else { c }
            })
            .collect();
        Self { a, b, coef }
    }

    fn eval(&self, x: f64) -> f64 {
        let t = if self.b > self.a { (2.0 * x - self.a - self.b) / (self.b - self.a) } else { 0.0 };
        let t = t.clamp(-1.0, 1.0);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coef.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coef[0]
    }

    /// Size of the trailing coefficients, a proxy for the interpolation error.
    fn tail(&self) -> f64 {
        self.coef.iter().rev().take(4).map(|c| c.abs()).fold(0.0, f64::max)
    }
}

/// `G(w) = p int_0^1 cos(w t) (1 - t^p)^(omega - 1) dt`.
fn inner_g(pe: f64, omega: f64, w: f64, cfg: &IntegralMethodConfig) -> ValueWithError {
    let f = |t: f64, _da: f64, db: f64| {
        let s = one_minus_pow(pe, t, db);
        if s <= 0.0 {
            return 0.0;
        }
        (w * t).cos() * s.powf(omega - 1.0)
    };
    let breaks = phase_breaks(|t| w.abs() * t, cfg.oscillation_split);
    scaled(integrate_panels(f, &breaks, &cfg.inner_spec), pe, Method::Quadrature)
}

/// Inner integral tabulated on `[0, w_max]`.
struct InnerTable {
    cheb: Chebyshev,
    err: f64,
    reliable: bool,
}

impl InnerTable {
    fn build(pe: f64, omega: f64, w_max: f64, cfg: &IntegralMethodConfig) -> Self {
        let target = 1e-11_f64.min(cfg.outer_spec.abs_tol);
        let mut n = 24 + (0.75 * w_max).ceil() as usize;
        let mut reliable = true;
        let mut quad_err = 0.0f64;
        loop {
            let mut f = |w: f64| {
                let g = inner_g(pe, omega, w, cfg);
                reliable &= g.reliable;
                quad_err = quad_err.max(g.err_estimate);
                g.value
            };
            let cheb = Chebyshev::fit(&mut f, 0.0, w_max.max(1e-300), n);
            let scale = cheb.coef.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            let tail = cheb.tail();
            if tail <= target * scale || n >= 8192 {
                let ok = tail <= 10.0 * target * scale;
                return Self { cheb, err: tail * 4.0 + quad_err, reliable: reliable && ok };
            }
            n *= 2;
        }
    }
}

/// The order `omega > 0` double integral, reduced to one dimension through a
/// Chebyshev table of the inner integral.
pub fn pbessel_thm13(
    p: PExponent,
    omega: f64,
    phi: &DistortedAngle,
    r: f64,
    cfg: &IntegralMethodConfig,
) -> Result<ValueWithError> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("the double integral needs omega > 0, got {omega}")));
    }
    check_r(r)?;
    if r == 0.0 {
        return Ok(ValueWithError::new(0.0, 0.0, Method::DoubleIntegral));
    }
    let pe = p.p();
    let inv_p = 0.5 * p.qf();
    let (x1, x2) = coords(phi, r);
    let pref = p.qf().powi(2) * r.powf(omega) / (pe.powf(omega - 1.0) * gammaf(omega) * gammaf(inv_p).powi(2));
    let table = InnerTable::build(pe, omega, x1, cfg);
    let f = |u: f64, _da: f64, db: f64| {
        let w = one_minus_pow(pe, u, db);
        if w <= 0.0 {
            return 0.0;
        }
        table.cheb.eval(x1 * w.powf(inv_p)) * (x2 * u).cos() * w.powf(inv_p + omega - 1.0)
    };
    let breaks = phase_breaks(outer_phase(pe, x1, x2), cfg.oscillation_split);
    let v = integrate_panels(f, &breaks, &scaled_spec(&cfg.outer_spec, pref));
    // the interpolation error enters against a weight of total mass <= 1/(1/p + omega - 1 + 1)
    let weight_mass = 1.0 / (inv_p + omega).min(1.0);
    let out = ValueWithError {
        value: v.value * pref,
        err_estimate: (v.err_estimate + table.err * weight_mass) * pref.abs(),
        method: Method::DoubleIntegral,
        reliable: v.reliable && table.reliable,
    };
    Ok(out)
}

/// Value on the coordinate axes from the single integral
/// `int_0^1 cos(r u) (1 - u^p)^(1/p + omega - 1) du`.
pub fn pbessel_axis(p: PExponent, omega: f64, r: f64, cfg: &IntegralMethodConfig) -> Result<ValueWithError> {
    if !(omega >= 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("order must be nonnegative, got {omega}")));
    }
    check_r(r)?;
    if r == 0.0 {
        let q = p.qf();
        let v = if omega == 0.0 { q * q / gammaf(q) } else { 0.0 };
        return Ok(ValueWithError::new(v, 0.0, Method::AxisIntegral));
    }
    let pe = p.p();
    let inv_p = 0.5 * p.qf();
    let pref = p.qf().powi(2) * r.powf(omega) / (pe.powf(omega - 1.0) * gammaf(omega + inv_p) * gammaf(inv_p));
    let expo = inv_p + omega - 1.0;
    let f = |u: f64, _da: f64, db: f64| {
        let w = one_minus_pow(pe, u, db);
        if w <= 0.0 {
            return 0.0;
        }
        (r * u).cos() * w.powf(expo)
    };
    let breaks = phase_breaks(|u| r * u, cfg.oscillation_split);
    let v = integrate_panels(f, &breaks, &scaled_spec(&cfg.outer_spec, pref));
    Ok(scaled(v, pref, Method::AxisIntegral))
}

/// Raises the order by `gamma > 0`:
/// `J_{omega+gamma}(r) = r^gamma/(p^(gamma-1) Gamma(gamma)) int_0^1 J_omega(tau r) tau^((p-1)omega+1) (1-tau^p)^(gamma-1) dtau`.
///
/// `base` evaluates `J_{omega_base,phi}` at a given argument.
pub fn order_raise(
    p: PExponent,
    omega_base: f64,
    gamma: f64,
    r: f64,
    base: &dyn Fn(f64) -> Result<ValueWithError>,
    cfg: &IntegralMethodConfig,
) -> Result<ValueWithError> {
    if !(omega_base >= 0.0) {
        return Err(Error::Domain(format!("base order must be nonnegative, got {omega_base}")));
    }
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("order increment must be positive, got {gamma}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("order raising needs r > 0, got {r}")));
    }
    let pe = p.p();
    let pref = r.powf(gamma) / (pe.powf(gamma - 1.0) * gammaf(gamma));
    let tau_pow = (pe - 1.0) * omega_base + 1.0;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let ok = Cell::new(true);
    let base_err = Cell::new(0.0f64);
    let f = |tau: f64, _da: f64, db: f64| {
        if failure.borrow().is_some() {
            return 0.0;
        }
        let w = one_minus_pow(pe, tau, db);
        if w <= 0.0 {
            return 0.0;
        }
        match base(tau * r) {
            Ok(v) => {
                ok.set(ok.get() && v.reliable);
                base_err.set(base_err.get().max(v.err_estimate));
                v.value * tau.powf(tau_pow) * w.powf(gamma - 1.0)
            }
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                0.0
            }
        }
    };
    let breaks = phase_breaks(|t| r * t, cfg.oscillation_split);
    let v = integrate_panels(f, &breaks, &scaled_spec(&cfg.outer_spec, pref));
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    // int_0^1 tau^a (1 - tau^p)^(gamma - 1) is at most B-like and O(1); bound it by 1/gamma + 1
    let mass = 1.0 / gamma + 1.0;
    Ok(ValueWithError {
        value: v.value * pref,
        err_estimate: (v.err_estimate + base_err.get() * mass) * pref.abs(),
        method: Method::OrderRaise,
        reliable: v.reliable && ok.get(),
    })
}

/// Poisson-type representation for odd `q`:
/// `sqrt(pi) q^(2+omega) 2/(Gamma(1/p)^2 Gamma(omega+1/p)) (z/2)^omega
///  int_0^(pi/2) cos_p(z cos^q theta) sin^(2 omega) theta (cos theta sin theta)^(q-1) dtheta`.
pub fn pbessel_poisson(
    p: PExponent,
    omega: f64,
    phi: &DistortedAngle,
    z: CutComplex,
    cfg: &IntegralMethodConfig,
) -> Result<ValueWithError<Complex64>> {
    if !p.q_odd() {
        return Err(Error::Unsupported(format!(
            "no Poisson-type representation for even q = 2/p (p = {p})"
        )));
    }
    if !(omega >= 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("order must be nonnegative, got {omega}")));
    }
    let q = p.qf();
    let inv_p = 0.5 * q;
    let zz = z.z();
    let zw = if omega == 0.0 { Complex64::new(1.0, 0.0) } else { CutComplex::new(zz * 0.5)?.powf(omega) };
    let c = 2.0 * PI.sqrt() * q.powf(2.0 + omega) / (gammaf(inv_p).powi(2) * gammaf(omega + inv_p));
    let pref = zw * c;
    let inner_tol = cfg.inner_spec.abs_tol.max(1e-15);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let ok = Cell::new(true);
    let f = |_theta: f64, da: f64, db: f64| {
        // sin(theta) = sin(da), cos(theta) = sin(pi/2 - theta) = sin(db)
        let (s, co) = (da.sin(), db.sin());
        let w = s.powf(2.0 * omega) * (co * s).powi(p.q() as i32 - 1);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match p_cosine(p, phi, zz * co.powi(p.q() as i32), inner_tol) {
            Ok(v) => {
                ok.set(ok.get() && v.reliable);
                v.value * w
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let spec = scaled_spec(&cfg.outer_spec, pref.norm());
    let v = integrate_complex(f, 0.0, 0.5 * PI, &spec);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(ValueWithError {
        value: v.value * pref,
        err_estimate: v.err_estimate * pref.norm(),
        method: Method::Poisson,
        reliable: v.reliable && ok.get(),
    })
}

/// `int_0^1 tau cos(tau a) dtau = sin a / a + (cos a - 1) / a^2`.
fn tau_cos_moment(a: f64) -> f64 {
    let a2 = a * a;
    if a.abs() < 0.5 {
        // sum (-1)^m a^(2m) / ((2m)! (2m + 2))
        let mut term = 1.0;
        let mut sum = 0.5;
        for m in 1..12 {
            let mf = f64::from(m);
            term *= -a2 / ((2.0 * mf - 1.0) * 2.0 * mf);
            sum += term / (2.0 * mf + 2.0);
        }
        sum
    } else {
        a.sin() / a + (a.cos() - 1.0) / a2
    }
}

/// Order one as a single integral: the order-zero form raised by one with the
/// `tau` integral done in closed form.
pub fn pbessel_order1_kernel(
    p: PExponent,
    phi: &DistortedAngle,
    r: f64,
    cfg: &IntegralMethodConfig,
) -> Result<ValueWithError> {
    check_r(r)?;
    if r == 0.0 {
        return Ok(ValueWithError::new(0.0, 0.0, Method::OrderRaise));
    }
    let pe = p.p();
    let inv_p = 0.5 * p.qf();
    let (x1, x2) = coords(phi, r);
    let pref = r * 4.0 / (pe * gammaf(inv_p).powi(2));
    let f = |u: f64, _da: f64, db: f64| {
        let w = one_minus_pow(pe, u, db);
        if w <= 0.0 {
            return 0.0;
        }
        let a = x1 * w.powf(inv_p);
        let b = x2 * u;
        0.5 * (tau_cos_moment(a + b) + tau_cos_moment(a - b)) * w.powf(inv_p - 1.0)
    };
    let breaks = phase_breaks(outer_phase(pe, x1, x2), cfg.oscillation_split);
    let v = integrate_panels(f, &breaks, &scaled_spec(&cfg.outer_spec, pref));
    Ok(scaled(v, pref, Method::OrderRaise))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// Closed forms at `p = 1` for orders 0 and 1. With `sigma = r/2` and
/// `delta = r cos(2 phi)/2`:
/// `J_0 = 2 (cos sigma sinc delta + sinc sigma cos delta)`,
/// `J_1 = 2 r sinc sigma sinc delta`.
pub fn pbessel_elementary(p: PExponent, omega: f64, phi: &DistortedAngle, r: f64) -> Result<ValueWithError> {
    if p.q() != 2 {
        return Err(Error::Unsupported(format!("elementary closed forms exist only at p = 1, got p = {p}")));
    }
    check_r(r)?;
    let (x1, x2) = coords(phi, r);
    let sigma = 0.5 * (x1 + x2);
    let delta = 0.5 * (x1 - x2);
    let v = if omega == 0.0 {
        2.0 * (sigma.cos() * sinc(delta) + sinc(sigma) * delta.cos())
    } else if omega == 1.0 {
        2.0 * r * sinc(sigma) * sinc(delta)
    } else {
        return Err(Error::Unsupported(format!("elementary closed forms cover orders 0 and 1, got {omega}")));
    };
    Ok(ValueWithError::new(v, 8.0 * f64::EPSILON * (1.0 + r), Method::Elementary))
}
