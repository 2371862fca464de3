//! Scalar backends: exact Gaussian rationals and complex doubles.
//!
//! All algebra in this crate is generic over a [`Scalar`].  The exact
//! backend (`Gq`) keeps every coefficient in ℚ(i) so that algebraic
//! identities can be asserted with literal equality; the float backend
//! (`C64`) is `num_complex::Complex<f64>` with tolerance-based zero tests.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use std::fmt;

/// Field element for the two backends.
///
/// Implementors must be commutative fields closed under complex
/// conjugation.  `tol` arguments are ignored by exact backends.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    /// The imaginary unit.
    fn i() -> Self;
    fn from_int(n: i64) -> Self;
    /// num/den as an element of ℚ ⊂ ℚ(i).
    fn from_ratio(num: i64, den: i64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    /// True when arithmetic is exact (zero tests need no tolerance).
    fn exact() -> bool;
    fn is_zero(&self) -> bool;
    /// Magnitude estimate, used for pivot selection and residuals.
    fn mag(&self) -> f64;
    fn to_c64(&self) -> Complex64;
    /// Build a scalar from float real/imaginary parts (exact via the
    /// binary expansion of the floats).
    fn from_f64_parts(re: f64, im: f64) -> Self;
    /// Uniformly random small element (exact: small rationals).
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn is_zero_tol(&self, tol: f64) -> bool {
        if Self::exact() {
            self.is_zero()
        } else {
            self.mag() < tol
        }
    }

    fn scale_int(&self, n: i64) -> Self {
        self.mul(&Self::from_int(n))
    }
}

/// Gaussian rational a + b·i with arbitrary-precision rational parts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Gq {
    pub re: BigRational,
    pub im: BigRational,
}

impl Gq {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Gq { re, im }
    }

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

impl fmt::Display for Gq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Scalar for Gq {
    fn zero() -> Self {
        Gq::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Gq::new(BigRational::one(), BigRational::zero())
    }
    fn i() -> Self {
        Gq::new(BigRational::zero(), BigRational::one())
    }
    fn from_int(n: i64) -> Self {
        Gq::new(Gq::rat(n, 1), BigRational::zero())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Gq::new(Gq::rat(num, den), BigRational::zero())
    }
    fn add(&self, rhs: &Self) -> Self {
        Gq::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Gq::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Gq::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
    fn neg(&self) -> Self {
        Gq::new(-self.re.clone(), -self.im.clone())
    }
    fn conj(&self) -> Self {
        Gq::new(self.re.clone(), -self.im.clone())
    }
    fn inv(&self) -> Option<Self> {
        let n = &self.re * &self.re + &self.im * &self.im;
        if n.is_zero() {
            return None;
        }
        Some(Gq::new(&self.re / &n, -&self.im / &n))
    }
    fn exact() -> bool {
        true
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn mag(&self) -> f64 {
        let n = &self.re * &self.re + &self.im * &self.im;
        n.to_f64().map(|x| x.sqrt()).unwrap_or(f64::INFINITY)
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
    fn from_f64_parts(re: f64, im: f64) -> Self {
        Gq::new(
            BigRational::from_float(re).unwrap_or_else(BigRational::zero),
            BigRational::from_float(im).unwrap_or_else(BigRational::zero),
        )
    }
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let num = rng.gen_range(-9_i64..=9);
        let den = rng.gen_range(1_i64..=4);
        let num2 = rng.gen_range(-9_i64..=9);
        let den2 = rng.gen_range(1_i64..=4);
        Gq::new(Gq::rat(num, den), Gq::rat(num2, den2))
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn inv(&self) -> Option<Self> {
        if self.norm() == 0.0 {
            None
        } else {
            Some(Complex64::new(1.0, 0.0) / self)
        }
    }
    fn exact() -> bool {
        false
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn mag(&self) -> f64 {
        self.norm()
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn from_f64_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }
}

/// Which scalar backend a CLI run should use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
}

impl std::str::FromStr for Backend {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(format!("unknown backend `{other}` (expected exact|float)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gq_field_ops() {
        let a = Gq::from_ratio(3, 4);
        let b = Gq::i().mul(&Gq::from_ratio(-2, 5));
        let p = a.add(&b);
        assert_eq!(p.sub(&b), a);
        let inv = p.inv().unwrap();
        assert_eq!(p.mul(&inv), Gq::one());
        assert_eq!(Gq::i().mul(&Gq::i()), Gq::from_int(-1));
    }

    #[test]
    fn gq_conj_is_involution() {
        let a = Gq::new(Gq::rat(2, 3), Gq::rat(-5, 7));
        assert_eq!(a.conj().conj(), a);
        assert!(a.mul(&a.conj()).im.is_zero());
    }

    #[test]
    fn zero_has_no_inverse() {
        assert!(Gq::zero().inv().is_none());
        assert!(Scalar::inv(&<Complex64 as Scalar>::zero()).is_none());
    }
}
