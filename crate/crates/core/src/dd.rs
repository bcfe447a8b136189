//! Complex double-double helper on top of `twofloat`.

use num_complex::Complex64;
use twofloat::TwoFloat;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Cdd {
    pub re: TwoFloat,
    pub im: TwoFloat,
}

impl Cdd {
    pub fn zero() -> Self {
        Self { re: TwoFloat::from(0.0), im: TwoFloat::from(0.0) }
    }

    pub fn one() -> Self {
        Self { re: TwoFloat::from(1.0), im: TwoFloat::from(0.0) }
    }

    pub fn from_c64(z: Complex64) -> Self {
        Self { re: TwoFloat::from(z.re), im: TwoFloat::from(z.im) }
    }

    pub fn mul(self, o: Self) -> Self {
        Self { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }

    pub fn scale(self, s: TwoFloat) -> Self {
        Self { re: self.re * s, im: self.im * s }
    }

    pub fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, im: self.im + o.im }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(f64::from(self.re), f64::from(self.im))
    }
}

/// `prod_{j < q} (base + j)` with `base` carried exactly as a double-double.
pub(crate) fn rising(base: TwoFloat, q: u32) -> TwoFloat {
    let mut acc = TwoFloat::from(1.0);
    for j in 0..q {
        acc *= base + f64::from(j);
    }
    acc
}

/// Double-double quotient accurate to about `2^-104`.
///
/// `twofloat`'s own `TwoFloat / TwoFloat` forms the reciprocal residual
/// without a fused multiply-add and is only good to double precision.
pub(crate) fn div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a / b.hi();
    let r = a - q1 * b;
    q1 + r / b.hi()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_is_double_double_accurate() {
        let third = div(TwoFloat::from(1.0), TwoFloat::from(3.0));
        let e = third * 3.0 - 1.0;
        assert!(f64::from(e).abs() < 1e-31);
        let b = TwoFloat::new_add(7.0, 1e-20);
        let e = div(TwoFloat::from(2.0), b) * b - 2.0;
        assert!(f64::from(e).abs() < 1e-31);
    }
}
