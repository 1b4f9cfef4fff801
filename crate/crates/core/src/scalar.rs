//! Scalar coefficient types for structure-coefficient tables.
//!
//! Three coefficient domains are supported: exact rationals (the default for
//! rational input, so that sign decisions in the classification pipeline are
//! exact), `f64`, and `Complex<f64>`. All are fields of characteristic zero;
//! the tensor calculus only ever divides by small integers.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

/// Coefficient ring for forms and homogeneous maps.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + 'static
{
    /// Whether arithmetic in this type is exact.
    const EXACT: bool;

    fn from_int(k: i64) -> Self;

    /// Exact division by a nonzero integer.
    fn div_int(&self, k: i64) -> Self;

    /// Embedding into the complex numbers, for the numeric solver paths.
    fn to_c64(&self) -> Complex64;

    /// Magnitude estimate used for scale-relative tolerances.
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
}

/// Ordered real coefficients: exact rationals and `f64`.
pub trait RealCoeff: Coeff + PartialOrd {
    fn to_f64_approx(&self) -> f64;
}

impl Coeff for BigRational {
    const EXACT: bool = true;

    fn from_int(k: i64) -> Self {
        BigRational::from_integer(k.into())
    }

    fn div_int(&self, k: i64) -> Self {
        assert!(k != 0, "division by zero integer");
        self / BigRational::from_integer(k.into())
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(self), 0.0)
    }
}

impl RealCoeff for BigRational {
    fn to_f64_approx(&self) -> f64 {
        rat_to_f64(self)
    }
}

impl Coeff for f64 {
    const EXACT: bool = false;

    fn from_int(k: i64) -> Self {
        k as f64
    }

    fn div_int(&self, k: i64) -> Self {
        self / k as f64
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
}

impl RealCoeff for f64 {
    fn to_f64_approx(&self) -> f64 {
        *self
    }
}

impl Coeff for Complex64 {
    const EXACT: bool = false;

    fn from_int(k: i64) -> Self {
        Complex64::new(k as f64, 0.0)
    }

    fn div_int(&self, k: i64) -> Self {
        self / k as f64
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }
}

/// Rational-to-float conversion that survives numerators and denominators
/// outside the `i64`/`f64` integer range.
pub fn rat_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // fall back to a scaled division for huge big-integer operands
    let digits_n = r.numer().to_string().len() as i32;
    let digits_d = r.denom().to_string().len() as i32;
    let shift = (digits_n - digits_d).clamp(-250, 250);
    let scaled = r * BigRational::from_integer(num_bigint::BigInt::from(10).pow(shift.unsigned_abs()));
    let base = if shift >= 0 { scaled } else { r * BigRational::from_integer(num_bigint::BigInt::from(10).pow(shift.unsigned_abs())).recip() };
    base.to_f64().unwrap_or(f64::NAN) * 10f64.powi(-shift)
}

/// Exact conversion of a finite `f64` into a rational (every finite float is a
/// dyadic rational).
pub fn f64_to_rat(x: f64) -> BigRational {
    BigRational::from_f64(x).expect("finite float")
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

pub fn rat_int(p: i64) -> BigRational {
    BigRational::from_integer(p.into())
}

/// Sign of an exact rational as -1, 0, +1.
pub fn rat_sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Format a float with 15 significant digits, the report convention.
pub fn fmt_f64_15(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let s = format!("{:.14e}", x);
    // normalize "1.00000000000000e0" style exponents
    match s.split_once('e') {
        Some((mant, exp)) => {
            let mant = mant.trim_end_matches('0').trim_end_matches('.');
            let e: i32 = exp.parse().unwrap_or(0);
            if (-4..=15).contains(&e) {
                format!("{:.*}", (14 - e).max(0) as usize, x)
                    .trim_end_matches('0')
                    .trim_end_matches('.')
                    .to_string()
            } else {
                format!("{}e{}", mant, e)
            }
        }
        None => s,
    }
}
