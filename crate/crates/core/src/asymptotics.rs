//! Large-argument behaviour: closed-form leading terms and an empirical
//! decay-rate fit for oscillatory samples.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special_core::PExponent;
use crate::special_core::gamma::gammaf;

/// Leading Hankel term `sqrt(2/(pi r)) cos(r - (2 omega + 1) pi/4)`.
pub fn classical_asymptotic(omega: f64, r: f64) -> f64 {
    (2.0 / (PI * r)).sqrt() * (r - (2.0 * omega + 1.0) * PI / 4.0).cos()
}

/// `4 Gamma(omega + p/2) / (p^(omega+1) Gamma(omega + 1/p) Gamma(1/p)) cos((2 omega + p) pi/4)`,
/// the coefficient of `r^(-p/2)` in the Watson-lemma axis estimate.
pub fn axis_asymptotic_constant(p: PExponent, omega: f64) -> Result<f64> {
    if p.q() < 3 {
        return Err(Error::Unsupported(format!(
            "the axis power law applies for 2/p >= 3; use the classical form at p = {p}"
        )));
    }
    let pe = p.p();
    let inv_p = 0.5 * p.qf();
    Ok(4.0 * gammaf(omega + 0.5 * pe) / (pe.powf(omega + 1.0) * gammaf(omega + inv_p) * gammaf(inv_p))
        * ((2.0 * omega + pe) * PI / 4.0).cos())
}

/// The axis estimate `constant * r^(-p/2)`.
pub fn axis_asymptotic(p: PExponent, omega: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("asymptotic forms need r > 0, got {r}")));
    }
    Ok(axis_asymptotic_constant(p, omega)? * r.powf(-0.5 * p.p()))
}

/// How oscillatory samples are reduced before the log-log fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FitMode {
    /// Bin-wise maximum of `|value|`, placed at the radius where it occurs.
    #[default]
    Envelope,
    /// Bin-wise root mean square, placed at the bin's geometric centre.
    RmsBin,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_window: (f64, f64),
    pub n_samples: usize,
    pub residual_rms: f64,
}

/// Number of logarithmic bins used by [`fit_decay_slope`].
pub const FIT_BINS: usize = 16;

/// Least-squares slope of `log |envelope|` against `log r`.
///
/// Needs at least 20 samples, ascending radii starting at `r >= 10`, and a
/// span of at least one decade.
pub fn fit_decay_slope(samples: &[(f64, f64)], mode: FitMode) -> Result<DecayFit> {
    if samples.len() < 20 {
        return Err(Error::Insufficient(format!("need at least 20 samples, got {}", samples.len())));
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::Insufficient("sample radii must be strictly ascending".into()));
    }
    let (r0, r1) = (samples[0].0, samples[samples.len() - 1].0);
    if !(r0 >= 10.0) {
        return Err(Error::Insufficient(format!("fit window must start at r >= 10, got {r0}")));
    }
    if r1 < 10.0 * r0 {
        return Err(Error::Insufficient(format!("window [{r0}, {r1}] spans less than a decade")));
    }
    let (l0, l1) = (r0.ln(), r1.ln());
    let width = (l1 - l0) / FIT_BINS as f64;
    let mut points = Vec::with_capacity(FIT_BINS);
    for b in 0..FIT_BINS {
        let lo = l0 + width * b as f64;
        let hi = if b + 1 == FIT_BINS { f64::INFINITY } else { lo + width };
        let bin: Vec<&(f64, f64)> = samples.iter().filter(|(r, _)| r.ln() >= lo && r.ln() < hi).collect();
        if bin.is_empty() {
            continue;
        }
        let point = match mode {
            FitMode::Envelope => {
                let (r, v) = bin.iter().fold((0.0, 0.0f64), |acc, (r, v)| if v.abs() > acc.1 { (*r, v.abs()) } else { acc });
                (r, v)
            }
            FitMode::RmsBin => {
                let ms = bin.iter().map(|(_, v)| v * v).sum::<f64>() / bin.len() as f64;
                let centre = (bin.iter().map(|(r, _)| r.ln()).sum::<f64>() / bin.len() as f64).exp();
                (centre, ms.sqrt())
            }
        };
        if point.1 > 0.0 && point.1.is_finite() {
            points.push((point.0.ln(), point.1.ln()));
        }
    }
    if points.len() < 3 {
        return Err(Error::Insufficient("fewer than three nonzero bins".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_rms = (points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(DecayFit { slope, intercept, r_window: (r0, r1), n_samples: samples.len(), residual_rms })
}

/// Uniform grid `start, start + step, ..., <= stop`.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}
