//! Distorted-angle coefficients `Phi_{k,phi}`.
//!
//! Two closed forms are provided, a binomial/Beta-ratio form and a
//! Gamma-product form. Both are assembled in log space so that large `k`
//! never overflows, then exponentiated term by term.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::special_core::PExponent;
use crate::special_core::gamma::{lbeta, lgamma};

/// Angles within this distance of an axis are snapped onto it, so that the
/// vanishing power is exactly zero rather than `cos(pi/2) ~ 6e-17`.
const AXIS_SNAP: f64 = 4.0 * f64::EPSILON;

/// An angle `phi` together with the powers that enter the series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistortedAngle {
    /// Angle reduced to `[0, 2 pi)`.
    pub phi: f64,
    /// `|cos phi|^(4/p) = (cos^2 phi)^q`.
    pub cos_pow: f64,
    /// `|sin phi|^(4/p)`.
    pub sin_pow: f64,
    /// `|cos phi|^(2/p)`: the first coordinate of the p-circle point of radius 1.
    pub cos_q: f64,
    /// `|sin phi|^(2/p)`.
    pub sin_q: f64,
}

impl DistortedAngle {
    pub fn new(p: PExponent, phi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::Domain(format!("angle must be finite, got {phi}")));
        }
        let phi = phi.rem_euclid(TAU);
        let (mut s, mut c) = phi.sin_cos();
        if c.abs() < AXIS_SNAP {
            c = 0.0;
        }
        if s.abs() < AXIS_SNAP {
            s = 0.0;
        }
        let q = p.q() as i32;
        let cos_q = c.abs().powi(q);
        let sin_q = s.abs().powi(q);
        Ok(Self { phi, cos_pow: cos_q * cos_q, sin_pow: sin_q * sin_q, cos_q, sin_q })
    }

    /// Angle of the plane point `x`, i.e. the `phi` with
    /// `x = |x|_p (sgn cos phi |cos phi|^(2/p), sgn sin phi |sin phi|^(2/p))`.
    pub fn from_point(p: PExponent, x1: f64, x2: f64) -> Result<Self> {
        let r = p_norm(p, x1, x2);
        if r == 0.0 {
            return Self::new(p, 0.0);
        }
        let qf = p.qf();
        let c = (x1.abs() / r).powf(1.0 / qf).copysign(x1);
        let s = (x2.abs() / r).powf(1.0 / qf).copysign(x2);
        let phi = s.atan2(c).rem_euclid(TAU);
        let cos_q = (x1.abs() / r).min(1.0);
        let sin_q = (x2.abs() / r).min(1.0);
        Ok(Self { phi, cos_pow: cos_q * cos_q, sin_pow: sin_q * sin_q, cos_q, sin_q })
    }

    /// The plane point of p-norm `r` in this direction.
    pub fn point(&self, r: f64) -> (f64, f64) {
        let (s, c) = self.phi.sin_cos();
        (r * self.cos_q * c.signum(), r * self.sin_q * s.signum())
    }
}

/// `(|x1|^p + |x2|^p)^(1/p)`.
pub fn p_norm(p: PExponent, x1: f64, x2: f64) -> f64 {
    let (a, b) = (x1.abs(), x2.abs());
    let m = a.max(b);
    if m == 0.0 {
        return 0.0;
    }
    let pe = p.p();
    let t = (a / m).powf(pe) + (b / m).powf(pe);
    m * t.powf(1.0 / pe)
}

fn log_pow(base: f64, n: usize) -> Option<f64> {
    if n == 0 {
        Some(0.0)
    } else if base == 0.0 {
        None
    } else {
        Some(n as f64 * base.ln())
    }
}

fn log_sum_exp(logs: &[f64]) -> f64 {
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return 0.0;
    }
    m.exp() * logs.iter().map(|l| (l - m).exp()).sum::<f64>()
}

/// Binomial/Beta-ratio form of `Phi_{k,phi}`.
pub fn phi_beta_form(p: PExponent, k: usize, phi: &DistortedAngle) -> f64 {
    let q = p.qf();
    let kf = k as f64;
    let head = lgamma(q * (kf + 1.0));
    let logs: Vec<f64> = (0..=k)
        .filter_map(|n| {
            let nf = n as f64;
            let m = kf - nf;
            let pw = log_pow(phi.cos_pow, n)? + log_pow(phi.sin_pow, k - n)?;
            Some(
                head - lgamma(nf + 1.0) - lgamma(m + 1.0) + lbeta(q * (nf + 0.5), q * (m + 0.5))
                    - lbeta(nf + 0.5, m + 0.5)
                    + pw,
            )
        })
        .collect();
    log_sum_exp(&logs)
}

/// Gamma-product form of `Phi_{k,phi}`.
pub fn phi_gamma_form(p: PExponent, k: usize, phi: &DistortedAngle) -> f64 {
    let q = p.qf();
    let kf = k as f64;
    let head = lgamma(kf + 1.0) + 2.0 * kf * std::f64::consts::LN_2 - PI.ln();
    let logs: Vec<f64> = (0..=k)
        .filter_map(|m1| {
            let m2 = k - m1;
            let (a, b) = (m1 as f64, m2 as f64);
            let pw = log_pow(phi.cos_pow, m1)? + log_pow(phi.sin_pow, m2)?;
            Some(
                head + lgamma(q * (a + 0.5)) + lgamma(q * (b + 0.5))
                    - lgamma(2.0 * a + 1.0)
                    - lgamma(2.0 * b + 1.0)
                    + pw,
            )
        })
        .collect();
    log_sum_exp(&logs)
}

/// `Phi_{k,phi}` for `k = 0..=k_max`, immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiTable {
    pub p: PExponent,
    pub phi: DistortedAngle,
    values: Vec<f64>,
}

impl PhiTable {
    pub fn build(p: PExponent, phi: DistortedAngle, k_max: usize) -> Self {
        let values = (0..=k_max).map(|k| phi_beta_form(p, k, &phi)).collect();
        Self { p, phi, values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        self.values.get(k).copied()
    }

    pub fn k_max(&self) -> usize {
        self.values.len() - 1
    }
}

pub fn build_phi_table(p: PExponent, phi: DistortedAngle, k_max: usize) -> PhiTable {
    PhiTable::build(p, phi, k_max)
}

/// Shared memo of tables keyed on `q` and the angle quantized at 1e-15.
#[derive(Default)]
pub struct PhiCache {
    tables: Mutex<HashMap<(u32, i64), Arc<PhiTable>>>,
}

impl PhiCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, p: PExponent, phi: DistortedAngle, k_max: usize) -> Arc<PhiTable> {
        let key = (p.q(), (phi.phi * 1e15).round() as i64);
        let mut map = self.tables.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(t) = map.get(&key)
            && t.k_max() >= k_max
        {
            return Arc::clone(t);
        }
        let t = Arc::new(PhiTable::build(p, phi, k_max));
        map.insert(key, Arc::clone(&t));
        t
    }

    pub fn len(&self) -> usize {
        self.tables.lock().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
