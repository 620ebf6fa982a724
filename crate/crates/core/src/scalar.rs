//! Scalar coefficients: arbitrary-precision rationals and the quadratic
//! extension Q(sqrt(d)) for a square-free integer d.
//!
//! Everything downstream (polynomials, rational functions, q-expansions,
//! linear solving) is generic over [`Scalar`]; the production instantiation
//! is [`FieldConstant`].  No floating-point type implements `Scalar` here.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, the base field.
pub type Rat = BigRational;

/// Shorthand for small rational constants.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for integer rationals.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Errors from the exact arithmetic kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactError {
    /// A rational function was built with a zero denominator.
    ZeroDenominator,
    /// Arithmetic tried to combine constants from different quadratic extensions.
    MixedExtensions(i64, i64),
    /// The discriminant of a quadratic extension must be square-free and not 0 or 1.
    BadDiscriminant(i64),
    /// Division by zero (scalar or leading-term).
    DivisionByZero,
    /// A polynomial division that was expected to be exact left a remainder.
    InexactDivision,
}

impl fmt::Display for ExactError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactError::ZeroDenominator => write!(f, "zero denominator"),
            ExactError::MixedExtensions(a, b) => {
                write!(f, "mixed quadratic extensions sqrt({a}) and sqrt({b})")
            }
            ExactError::BadDiscriminant(d) => {
                write!(f, "discriminant {d} is not square-free (or is 0/1)")
            }
            ExactError::DivisionByZero => write!(f, "division by zero"),
            ExactError::InexactDivision => write!(f, "polynomial division left a remainder"),
        }
    }
}

impl std::error::Error for ExactError {}

/// Field operations needed by the generic core.
///
/// The bounds come from `num_traits`; any exact field type satisfying them
/// can instantiate the polynomial/series/linear-algebra layer.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Div<Output = Self>
{
    fn from_int(n: i64) -> Self;
    fn from_rat(r: Rat) -> Self;
    /// Multiplicative inverse; panics on zero.
    fn inv(&self) -> Self;
    /// True when the value lies in the prime field Q.
    fn is_rational(&self) -> bool;
    /// The rational value, when `is_rational` holds.
    fn to_rat(&self) -> Option<Rat>;
}

impl Scalar for Rat {
    fn from_int(n: i64) -> Self {
        rat_int(n)
    }
    fn from_rat(r: Rat) -> Self {
        r
    }
    fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        self.recip()
    }
    fn is_rational(&self) -> bool {
        true
    }
    fn to_rat(&self) -> Option<Rat> {
        Some(self.clone())
    }
}

fn is_square_free(d: i64) -> bool {
    let mut n = d.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        while n % p == 0 {
            n /= p;
        }
        p += 1;
    }
    true
}

/// An element a + b*sqrt(d) of Q(sqrt(d)).
///
/// `disc == None` means the element is plainly rational; such elements are
/// compatible with every extension.  Two different `Some` discriminants never
/// mix: the computations here live in a single quadratic extension at a time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldConstant {
    rat_part: Rat,
    rad_part: Rat,
    disc: Option<i64>,
}

impl FieldConstant {
    pub fn rational(r: Rat) -> Self {
        FieldConstant { rat_part: r, rad_part: Rat::zero(), disc: None }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(rat_int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::rational(rat(n, d))
    }

    /// Build a + b*sqrt(d).  Fails if d is 0, 1 or not square-free.
    pub fn with_radical(a: Rat, b: Rat, d: i64) -> Result<Self, ExactError> {
        if d == 0 || d == 1 || !is_square_free(d) {
            return Err(ExactError::BadDiscriminant(d));
        }
        let mut c = FieldConstant { rat_part: a, rad_part: b, disc: Some(d) };
        c.canonicalize();
        Ok(c)
    }

    /// sqrt(d) itself.
    pub fn sqrt_of(d: i64) -> Result<Self, ExactError> {
        Self::with_radical(Rat::zero(), Rat::one(), d)
    }

    fn canonicalize(&mut self) {
        if self.rad_part.is_zero() {
            self.disc = None;
        }
    }

    pub fn rat_part(&self) -> &Rat {
        &self.rat_part
    }

    pub fn rad_part(&self) -> &Rat {
        &self.rad_part
    }

    pub fn disc(&self) -> Option<i64> {
        self.disc
    }

    /// The common extension of two constants, or an error if both carry
    /// distinct discriminants.
    pub fn unify_disc(&self, other: &Self) -> Result<Option<i64>, ExactError> {
        match (self.disc, other.disc) {
            (None, d) | (d, None) => Ok(d),
            (Some(a), Some(b)) if a == b => Ok(Some(a)),
            (Some(a), Some(b)) => Err(ExactError::MixedExtensions(a, b)),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ExactError> {
        let disc = self.unify_disc(other)?;
        let mut c = FieldConstant {
            rat_part: &self.rat_part + &other.rat_part,
            rad_part: &self.rad_part + &other.rad_part,
            disc,
        };
        c.canonicalize();
        Ok(c)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.try_add(&other.clone().neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, ExactError> {
        let disc = self.unify_disc(other)?;
        let d = disc.map(|d| rat_int(d)).unwrap_or_else(Rat::zero);
        // (a + b sqrt(d))(c + e sqrt(d)) = ac + bed + (ae + bc) sqrt(d)
        let rat_part = &self.rat_part * &other.rat_part + &self.rad_part * &other.rad_part * &d;
        let rad_part = &self.rat_part * &other.rad_part + &self.rad_part * &other.rat_part;
        let mut c = FieldConstant { rat_part, rad_part, disc };
        c.canonicalize();
        Ok(c)
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, ExactError> {
        if other.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        self.try_mul(&other.inv())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = FieldConstant::int(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Zero for FieldConstant {
    fn zero() -> Self {
        FieldConstant::int(0)
    }
    fn is_zero(&self) -> bool {
        self.rat_part.is_zero() && self.rad_part.is_zero()
    }
}

impl One for FieldConstant {
    fn one() -> Self {
        FieldConstant::int(1)
    }
}

impl Add for FieldConstant {
    type Output = FieldConstant;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("mixed quadratic extensions in +")
    }
}

impl Sub for FieldConstant {
    type Output = FieldConstant;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(&rhs).expect("mixed quadratic extensions in -")
    }
}

impl Mul for FieldConstant {
    type Output = FieldConstant;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(&rhs).expect("mixed quadratic extensions in *")
    }
}

impl Div for FieldConstant {
    type Output = FieldConstant;
    fn div(self, rhs: Self) -> Self {
        self.try_div(&rhs).expect("division error in /")
    }
}

impl Neg for FieldConstant {
    type Output = FieldConstant;
    fn neg(self) -> Self {
        FieldConstant {
            rat_part: -self.rat_part,
            rad_part: -self.rad_part,
            disc: self.disc,
        }
    }
}

impl Scalar for FieldConstant {
    fn from_int(n: i64) -> Self {
        FieldConstant::int(n)
    }

    fn from_rat(r: Rat) -> Self {
        FieldConstant::rational(r)
    }

    fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        match self.disc {
            None => FieldConstant::rational(self.rat_part.recip()),
            Some(d) => {
                // 1/(a + b sqrt(d)) = (a - b sqrt(d)) / (a^2 - d b^2).
                // The norm cannot vanish: d square-free rules out d = (a/b)^2.
                let norm = &self.rat_part * &self.rat_part
                    - rat_int(d) * &self.rad_part * &self.rad_part;
                assert!(!norm.is_zero(), "zero norm in Q(sqrt({d}))");
                let mut c = FieldConstant {
                    rat_part: &self.rat_part / &norm,
                    rad_part: -(&self.rad_part / &norm),
                    disc: self.disc,
                };
                c.canonicalize();
                c
            }
        }
    }

    fn is_rational(&self) -> bool {
        self.rad_part.is_zero()
    }

    fn to_rat(&self) -> Option<Rat> {
        if self.is_rational() {
            Some(self.rat_part.clone())
        } else {
            None
        }
    }
}

impl fmt::Display for FieldConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rad_part.is_zero() {
            return write!(f, "{}", self.rat_part);
        }
        let d = self.disc.expect("radical part without discriminant");
        let rad = |f: &mut fmt::Formatter<'_>, b: &Rat| -> fmt::Result {
            if b.is_one() {
                write!(f, "sqrt({d})")
            } else if (-b.clone()).is_one() {
                write!(f, "-sqrt({d})")
            } else {
                write!(f, "{b}*sqrt({d})")
            }
        };
        if self.rat_part.is_zero() {
            rad(f, &self.rad_part)
        } else if self.rad_part.is_negative() {
            write!(f, "{} - ", self.rat_part)?;
            rad(f, &(-self.rad_part.clone()))
        } else {
            write!(f, "{} + ", self.rat_part)?;
            rad(f, &self.rad_part)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defining_relation_of_sqrt_minus_three() {
        let s = FieldConstant::sqrt_of(-3).unwrap();
        assert_eq!(s.clone() * s, FieldConstant::int(-3));
    }

    #[test]
    fn two_to_three_halves_squares_to_eight() {
        // 2^{3/2} represented as 0 + 2*sqrt(2)
        let c = FieldConstant::with_radical(Rat::zero(), rat_int(2), 2).unwrap();
        assert_eq!(c.clone() * c, FieldConstant::int(8));
    }

    #[test]
    fn norm_of_one_plus_sqrt_two() {
        let a = FieldConstant::with_radical(rat_int(1), rat_int(1), 2).unwrap();
        let b = FieldConstant::with_radical(rat_int(1), rat_int(-1), 2).unwrap();
        assert_eq!(a * b, FieldConstant::int(-1));
    }

    #[test]
    fn mixed_extensions_rejected() {
        let a = FieldConstant::sqrt_of(2).unwrap();
        let b = FieldConstant::sqrt_of(-3).unwrap();
        assert_eq!(
            a.try_mul(&b),
            Err(ExactError::MixedExtensions(2, -3))
        );
    }

    #[test]
    fn non_square_free_discriminant_rejected() {
        assert_eq!(
            FieldConstant::sqrt_of(12).unwrap_err(),
            ExactError::BadDiscriminant(12)
        );
        assert!(FieldConstant::sqrt_of(1).is_err());
        assert!(FieldConstant::sqrt_of(0).is_err());
    }

    #[test]
    fn rational_constants_mix_with_any_extension() {
        let two = FieldConstant::int(2);
        let s = FieldConstant::sqrt_of(2).unwrap();
        let p = two.try_mul(&s).unwrap();
        assert_eq!(p.disc(), Some(2));
        assert_eq!(p.rad_part(), &rat_int(2));
    }

    #[test]
    fn inverse_in_extension() {
        let c = FieldConstant::with_radical(rat_int(3), rat_int(1), 2).unwrap();
        let i = c.inv();
        assert_eq!(c * i, FieldConstant::int(1));
    }
}
