//! Floating-point scalar abstraction shared by every module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar the library is generic over (`f32` or `f64`).
///
/// Tolerances throughout the crate are written as `f64` constants calibrated
/// for double precision. They are converted with [`Real::tol`], which
/// multiplies by `TOL_SCALE` so single precision gets a proportionally looser
/// band.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Multiplier applied to every double-precision tolerance.
    const TOL_SCALE: f64;

    fn tol(base: f64) -> Self {
        Self::from_f64(base * Self::TOL_SCALE).expect("tolerance representable")
    }

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Real for f64 {
    const TOL_SCALE: f64 = 1.0;
}

impl Real for f32 {
    const TOL_SCALE: f64 = 1.0e4;
}

/// Complex number over a [`Real`] scalar.
pub type Cx<T> = Complex<T>;

/// `exp(i·phase)` on the unit circle.
pub fn unit<T: Real>(phase: T) -> Cx<T> {
    Complex::new(phase.cos(), phase.sin())
}

/// 2-D cross product `Im(conj(u)·v)`.
pub fn cross<T: Real>(u: Cx<T>, v: Cx<T>) -> T {
    u.re * v.im - u.im * v.re
}

/// 2-D dot product `Re(conj(u)·v)`.
pub fn dot<T: Real>(u: Cx<T>, v: Cx<T>) -> T {
    u.re * v.re + u.im * v.im
}

/// Tolerance-aware equality of two complex numbers.
pub fn approx_eq<T: Real>(a: Cx<T>, b: Cx<T>, tol: T) -> bool {
    (a - b).norm() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_scaling() {
        assert_eq!(f64::tol(1e-9), 1e-9);
        assert!((f32::tol(1e-9) - 1e-5).abs() < 1e-10);
    }

    #[test]
    fn cross_and_dot() {
        let u = Complex::new(1.0, 0.0);
        let v = Complex::new(0.0, 2.0);
        assert_eq!(cross(u, v), 2.0);
        assert_eq!(dot(u, v), 0.0);
        assert!(approx_eq(
            unit(std::f64::consts::FRAC_PI_2),
            Complex::new(0.0, 1.0),
            1e-15
        ));
    }
}
