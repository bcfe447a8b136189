//! Picks a computational route for `J^[p]_{omega,phi}(r)`.
//!
//! The series is used while its cancellation penalty `EPS_DD * max term`
//! stays below the tolerance. Past that point the value comes from a closed
//! form when one exists (`p = 2`, or `p = 1` at orders 0 and 1) and otherwise
//! from an integral representation: the axis integral on the coordinate axes,
//! the order-zero integral at `omega = 0`, the reduced double integral
//! elsewhere.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pbessel_integral::{
    IntegralMethodConfig, pbessel_axis, pbessel_elementary, pbessel_poisson, pbessel_thm13, pbessel_thm13_order0,
};
use crate::pbessel_series::{CutComplex, EPS_DD, Order, pbessel_complex, pbessel_series, series_term_bound};
use crate::phi_coeffs::DistortedAngle;
use crate::special_core::{Method, PExponent, ValueWithError, classical_bessel_j};

/// Route requested by a caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Route {
    #[default]
    Auto,
    Series,
    Thm13,
    Poisson,
    Axis,
}

impl FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(Route::Auto),
            "series" => Ok(Route::Series),
            "thm13" | "double-integral" | "integral" => Ok(Route::Thm13),
            "poisson" => Ok(Route::Poisson),
            "axis" | "axis-integral" => Ok(Route::Axis),
            other => Err(Error::Domain(format!("unknown method {other:?}"))),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Auto => "auto",
            Route::Series => "series",
            Route::Thm13 => "thm13",
            Route::Poisson => "poisson",
            Route::Axis => "axis",
        })
    }
}

fn on_axis(phi: &DistortedAngle) -> bool {
    phi.cos_q == 0.0 || phi.sin_q == 0.0
}

/// Whether the series alone certifies `tol` at this point.
pub fn series_admissible(p: PExponent, omega: f64, phi: &DistortedAngle, r: f64, tol: f64) -> bool {
    EPS_DD * series_term_bound(p, omega, phi, r) < tol
}

/// The method the automatic router would use.
pub fn select_method(p: PExponent, omega: f64, phi: &DistortedAngle, r: f64, tol: f64) -> Method {
    if series_admissible(p, omega, phi, r, tol) {
        Method::Series
    } else if p.q() == 1 {
        Method::Classical
    } else if p.q() == 2 && (omega == 0.0 || omega == 1.0) {
        Method::Elementary
    } else if on_axis(phi) {
        Method::AxisIntegral
    } else {
        Method::DoubleIntegral
    }
}

fn integral_cfg(tol: f64) -> Result<IntegralMethodConfig> {
    IntegralMethodConfig::with_tol(tol.max(1e-13))
}

/// Evaluates through `method`, which must be one of the real-argument routes.
fn run_method(method: Method, p: PExponent, omega: f64, phi: &DistortedAngle, r: f64, tol: f64) -> Result<ValueWithError> {
    match method {
        Method::Series => pbessel_series(p, omega, phi, r, tol),
        Method::Classical => {
            if omega < -0.5 {
                return Err(Error::Domain(format!("classical order must be >= -1/2, got {omega}")));
            }
            let v = classical_bessel_j(omega, r);
            Ok(ValueWithError::new(v, 1e-13_f64.max(1e-15 * r), Method::Classical))
        }
        Method::Elementary => pbessel_elementary(p, omega, phi, r),
        Method::AxisIntegral => pbessel_axis(p, omega, r, &integral_cfg(tol)?),
        Method::DoubleIntegral if omega == 0.0 => pbessel_thm13_order0(p, phi, r, &integral_cfg(tol)?),
        Method::DoubleIntegral => pbessel_thm13(p, omega, phi, r, &integral_cfg(tol)?),
        other => Err(Error::Unsupported(format!("method {other} is not a direct real-argument route"))),
    }
}

/// Automatic routing for real `r >= 0`.
pub fn method_router(p: PExponent, omega: f64, phi: &DistortedAngle, r: f64, tol: f64) -> Result<ValueWithError> {
    Order::new(omega)?;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let m = select_method(p, omega, phi, r, tol);
    run_method(m, p, omega, phi, r, tol)
}

/// Evaluates with an explicitly requested route. `Auto` defers to
/// [`method_router`]; `Axis` requires an axis angle; `Poisson` requires odd `q`
/// and `r > 0`.
pub fn evaluate(route: Route, p: PExponent, omega: f64, phi: &DistortedAngle, r: f64, tol: f64) -> Result<ValueWithError> {
    match route {
        Route::Auto => method_router(p, omega, phi, r, tol),
        Route::Series => pbessel_series(p, omega, phi, r, tol),
        Route::Thm13 => run_method(Method::DoubleIntegral, p, omega, phi, r, tol),
        Route::Axis => {
            if !on_axis(phi) {
                return Err(Error::Domain(format!("the axis integral needs an axis angle, got phi = {}", phi.phi)));
            }
            run_method(Method::AxisIntegral, p, omega, phi, r, tol)
        }
        Route::Poisson => {
            if r == 0.0 {
                return pbessel_series(p, omega, phi, 0.0, tol).map(|v| ValueWithError { method: Method::Poisson, ..v });
            }
            let z = CutComplex::new(Complex64::new(r, 0.0))?;
            Ok(pbessel_poisson(p, omega, phi, z, &integral_cfg(tol)?)?.map(|z| z.re))
        }
    }
}

/// Complex-argument evaluation: the series while admissible, then the
/// Poisson form when `q` is odd. Even `q` beyond the series range is
/// reported as unsupported.
pub fn evaluate_complex(
    p: PExponent,
    omega: f64,
    phi: &DistortedAngle,
    z: CutComplex,
    tol: f64,
) -> Result<ValueWithError<Complex64>> {
    let order = Order::new(omega)?;
    let s = pbessel_complex(p, order, phi, z, tol)?;
    if s.reliable || !p.q_odd() {
        return Ok(s);
    }
    pbessel_poisson(p, omega, phi, z, &integral_cfg(tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pe(q: u32) -> PExponent {
        PExponent::from_q(q).unwrap()
    }

    #[test]
    fn routes_follow_the_cancellation_threshold() {
        let p = pe(3);
        let axis = DistortedAngle::new(p, PI / 2.0).unwrap();
        assert_eq!(select_method(p, 0.0, &axis, 5.0, 1e-10), Method::Series);
        assert_eq!(select_method(p, 0.0, &axis, 200.0, 1e-10), Method::AxisIntegral);
        let diag = DistortedAngle::new(p, PI / 4.0).unwrap();
        assert_eq!(select_method(p, 1.0, &diag, 100.0, 1e-10), Method::DoubleIntegral);
    }

    #[test]
    fn routed_values_agree_across_the_switch() {
        let p = pe(3);
        let a = DistortedAngle::new(p, 0.6).unwrap();
        for r in [25.0, 30.0] {
            let s = pbessel_series(p, 1.0, &a, r, 1e-10).unwrap();
            let t = evaluate(Route::Thm13, p, 1.0, &a, r, 1e-10).unwrap();
            assert!((s.value - t.value).abs() <= s.err_estimate + t.err_estimate + 1e-9, "r = {r}");
        }
    }

    #[test]
    fn parse_routes() {
        assert_eq!("Poisson".parse::<Route>().unwrap(), Route::Poisson);
        assert!("magic".parse::<Route>().is_err());
    }
}
