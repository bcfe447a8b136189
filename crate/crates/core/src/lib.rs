//! p-Bessel functions `J^[p]_{omega,phi}` for exponents `p = 2/q`, computed
//! through several independent routes (double-double power series, real
//! integral representations, a Poisson-type complex representation), together
//! with the p-cosine/p-sine entire functions, Erdelyi-Kober fractional
//! operators, large-argument asymptotics and lattice point counting on
//! p-circles `|x1|^p + |x2|^p = r^p`.

pub mod asymptotics;
mod dd;
pub mod error;
pub mod fractional;
pub mod lattice;
pub mod pbessel_integral;
pub mod pbessel_series;
pub mod phi_coeffs;
pub mod router;
pub mod special_core;

pub use error::{Error, Result};
pub use phi_coeffs::DistortedAngle;
pub use special_core::{Method, PExponent, QuadratureSpec, Scheme, ValueWithError};
