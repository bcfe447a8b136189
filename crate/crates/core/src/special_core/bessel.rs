//! Classical Bessel function `J_omega(r)` for real order `omega >= -1/2`.
//!
//! Small arguments use the power series summed in double-double; large
//! arguments use Hankel's expansion truncated at its smallest term.

use std::f64::consts::PI;

use twofloat::TwoFloat;

use super::gamma::gammaf;

/// Series/asymptotic switch point.
pub const SWITCH: f64 = 18.0;

/// `J_omega(r)`, `r >= 0`, `omega >= -1/2`.
pub fn classical_bessel_j(omega: f64, r: f64) -> f64 {
    assert!(omega >= -0.5, "order must be >= -1/2");
    assert!(r >= 0.0, "argument must be nonnegative");
    if r < SWITCH.max(2.0 * omega * omega) {
        bessel_j_series(omega, r)
    } else {
        bessel_j_asymptotic(omega, r)
    }
}

/// Power series `sum (-1)^k (r/2)^(2k+omega) / (k! Gamma(k+omega+1))`.
pub fn bessel_j_series(omega: f64, r: f64) -> f64 {
    if r == 0.0 {
        return if omega == 0.0 { 1.0 } else { 0.0 };
    }
    let x2 = TwoFloat::new_mul(r, r) / 4.0;
    let mut term = TwoFloat::from(1.0);
    let mut sum = term;
    let mut k = 0u32;
    loop {
        let kk = f64::from(k + 1);
        let den = TwoFloat::new_add(kk, omega) * kk;
        term = -crate::dd::div(term * x2, den);
        sum += term;
        k += 1;
        if term.hi().abs() < 1e-34 * sum.hi().abs().max(1e-300) && f64::from(k) > r {
            break;
        }
        if k > 2000 {
            break;
        }
    }
    let pref = if omega == 0.0 { 1.0 } else { (0.5 * r).powf(omega) / gammaf(omega + 1.0) };
    pref * f64::from(sum)
}

/// Hankel expansion with optimal truncation. Accurate once `r >> omega^2`.
pub fn bessel_j_asymptotic(omega: f64, r: f64) -> f64 {
    let mu = 4.0 * omega * omega;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a: f64 = 1.0; // a_k / r^k
    let mut prev = f64::INFINITY;
    for k in 0..200u32 {
        if a.abs() > prev {
            break;
        }
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        prev = a.abs();
        let j = f64::from(2 * k + 1);
        a *= (mu - j * j) / (f64::from(k + 1) * 8.0 * r);
        if a.abs() < 1e-17 * p.abs().max(q.abs()) {
            break;
        }
    }
    // cos(r - c) expanded so that the large argument is reduced by libm
    let c = (0.5 * omega + 0.25) * PI;
    let (sr, cr) = r.sin_cos();
    let (sc, cc) = c.sin_cos();
    let cos_chi = cr * cc + sr * sc;
    let sin_chi = sr * cc - cr * sc;
    (2.0 / (PI * r)).sqrt() * (p * cos_chi - q * sin_chi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_values() {
        assert_eq!(classical_bessel_j(0.0, 0.0), 1.0);
        assert!(classical_bessel_j(0.0, 2.404825557695773).abs() < 1e-10);
        assert!((classical_bessel_j(1.0, 1.0) - 0.4400505857449335).abs() < 1e-15);
        // half-integer orders are elementary
        for r in [0.3, 2.0, 17.0, 25.0, 40.0] {
            let j = (2.0 / (PI * r)).sqrt() * r.sin();
            assert!((classical_bessel_j(0.5, r) - j).abs() < 1e-13, "r = {r}");
            let j = (2.0 / (PI * r)).sqrt() * r.cos();
            assert!((classical_bessel_j(-0.5, r) - j).abs() < 1e-13, "r = {r}");
        }
    }

    #[test]
    fn cross_check_band() {
        for omega in [0.0, 0.5, 1.0, 2.0, 3.0] {
            let mut r = 15.0;
            while r <= 21.0 {
                let d = bessel_j_series(omega, r) - bessel_j_asymptotic(omega, r);
                assert!(d.abs() < 1e-10, "omega {omega} r {r}: {d}");
                r += 0.125;
            }
        }
    }

    #[test]
    fn recurrence_holds_at_large_argument() {
        // J_{n-1} + J_{n+1} = (2n/r) J_n
        for r in [60.0, 300.0, 1571.3] {
            let lhs = classical_bessel_j(0.0, r) + classical_bessel_j(2.0, r);
            let rhs = 2.0 / r * classical_bessel_j(1.0, r);
            assert!((lhs - rhs).abs() < 1e-13, "r = {r}");
        }
    }
}
