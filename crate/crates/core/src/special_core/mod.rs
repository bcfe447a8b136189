//! Scalar kernels shared by every other module: gamma and beta functions,
//! the classical Bessel function, quadrature engines and the validated
//! exponent type.

pub(crate) mod bessel;
pub(crate) mod gamma;
pub(crate) mod quadrature;

pub use bessel::{bessel_j_asymptotic, bessel_j_series, classical_bessel_j};
pub use gamma::{beta, gamma, ln_beta, log_gamma};
pub use quadrature::{
    integrate, integrate_complex, integrate_panels, tanh_sinh, QuadratureSpec, Scheme,
};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An exponent `p = 2/q` with `q` a positive integer.
///
/// Always built from `q`; a decimal `p` is never accepted because `2/p`
/// would then only be approximately integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PExponent {
    q: u32,
}

impl PExponent {
    pub fn from_q(q: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("q = 2/p must be a positive integer".into()));
        }
        Ok(Self { q })
    }

    /// Parses `"2/3"`, `"1/2"`, `"1"` or `"2"`.
    pub fn parse_rational(text: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("cannot read p = {text:?} as a rational 2/q"));
        let (num, den) = match text.trim().split_once('/') {
            Some((n, d)) => (
                n.trim().parse::<u64>().map_err(|_| bad())?,
                d.trim().parse::<u64>().map_err(|_| bad())?,
            ),
            None => (text.trim().parse::<u64>().map_err(|_| bad())?, 1),
        };
        if num == 0 || den == 0 {
            return Err(bad());
        }
        // q = 2/p = 2*den/num must be a positive integer
        if (2 * den) % num != 0 {
            return Err(Error::Domain(format!("2/p is not an integer for p = {text}")));
        }
        let q = u32::try_from(2 * den / num).map_err(|_| bad())?;
        Self::from_q(q)
    }

    pub fn q(self) -> u32 {
        self.q
    }

    pub fn qf(self) -> f64 {
        f64::from(self.q)
    }

    pub fn p(self) -> f64 {
        2.0 / f64::from(self.q)
    }

    pub fn q_odd(self) -> bool {
        self.q % 2 == 1
    }

    /// `p` as a reduced fraction `(numerator, denominator)`.
    pub fn as_fraction(self) -> (u32, u32) {
        if self.q % 2 == 0 { (1, self.q / 2) } else { (2, self.q) }
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_fraction() {
            (n, 1) => write!(f, "{n}"),
            (n, d) => write!(f, "{n}/{d}"),
        }
    }
}

impl FromStr for PExponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_rational(s)
    }
}

/// Which computational route produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Series,
    DoubleIntegral,
    Poisson,
    AxisIntegral,
    Asymptotic,
    OrderRaise,
    /// Classical `J_omega`, used when `p = 2`.
    Classical,
    /// Closed forms in elementary functions, available for `p = 1`.
    Elementary,
    Quadrature,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::DoubleIntegral => "thm13",
            Method::Poisson => "poisson",
            Method::AxisIntegral => "axis",
            Method::Asymptotic => "asymptotic",
            Method::OrderRaise => "order-raise",
            Method::Classical => "classical",
            Method::Elementary => "elementary",
            Method::Quadrature => "quadrature",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A value together with an error estimate and the route that produced it.
///
/// `reliable == false` marks a flagged result: the routine could not certify
/// its tolerance (quadrature did not converge, or the series lost too many
/// digits to cancellation). Flagged values are still returned so callers can
/// inspect them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValueWithError<T = f64> {
    pub value: T,
    pub err_estimate: f64,
    pub method: Method,
    pub reliable: bool,
}

impl<T> ValueWithError<T> {
    pub fn new(value: T, err_estimate: f64, method: Method) -> Self {
        Self { value, err_estimate: err_estimate.abs(), method, reliable: true }
    }

    pub fn flagged(mut self, bad: bool) -> Self {
        self.reliable &= !bad;
        self
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> ValueWithError<U> {
        ValueWithError {
            value: f(self.value),
            err_estimate: self.err_estimate,
            method: self.method,
            reliable: self.reliable,
        }
    }
}
