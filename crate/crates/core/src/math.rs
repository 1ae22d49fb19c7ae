//! Scalar kernels. With the `std` feature these are the platform's
//! correctly rounded routines; without it they fall back to `libm`, which
//! can differ in the last bit for `ln` and `exp`.

#[cfg(feature = "std")]
mod imp {
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
    pub fn exp(x: f64) -> f64 {
        x.exp()
    }
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    pub fn abs(x: f64) -> f64 {
        x.abs()
    }
}

#[cfg(not(feature = "std"))]
mod imp {
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
    pub fn exp(x: f64) -> f64 {
        libm::exp(x)
    }
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    pub fn abs(x: f64) -> f64 {
        libm::fabs(x)
    }
}

pub(crate) use imp::{abs, exp, ln, sqrt};
