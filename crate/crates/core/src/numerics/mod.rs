//! Scalar numerical building blocks: adaptive quadrature, Bessel functions,
//! cubic splines.

pub mod bessel;
pub mod quad;
pub mod spline;
