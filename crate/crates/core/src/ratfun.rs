//! Rational functions num/den over the polynomial ring, kept in normal form:
//! gcd(num, den) = 1 and the denominator's lexicographic leading coefficient
//! is 1.  Equal values therefore have identical representations, which the
//! golden tests rely on.

use std::collections::BTreeMap;
use std::fmt;


use crate::poly::{Polynomial, Var};
use crate::scalar::{ExactError, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction<T: Scalar> {
    num: Polynomial<T>,
    den: Polynomial<T>,
}

impl<T: Scalar> RationalFunction<T> {
    pub fn new(num: Polynomial<T>, den: Polynomial<T>) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        let mut f = RationalFunction { num, den };
        f.normalize();
        Ok(f)
    }

    pub fn from_poly(p: Polynomial<T>) -> Self {
        RationalFunction { num: p, den: Polynomial::one() }
    }

    pub fn zero() -> Self {
        Self::from_poly(Polynomial::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Polynomial::one())
    }

    pub fn int(n: i64) -> Self {
        Self::from_poly(Polynomial::int(n))
    }

    pub fn constant(c: T) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn var(name: &str) -> Self {
        Self::from_poly(Polynomial::var(name))
    }

    pub fn num(&self) -> &Polynomial<T> {
        &self.num
    }

    pub fn den(&self) -> &Polynomial<T> {
        &self.den
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Polynomial::one();
            return;
        }
        let g = Polynomial::gcd(&self.num, &self.den);
        if !g.is_one() {
            self.num = self.num.exact_div(&g).expect("gcd divides numerator");
            self.den = self.den.exact_div(&g).expect("gcd divides denominator");
        }
        let lc = self.den.leading().expect("nonzero denominator").1.clone();
        if !lc.is_one() {
            let inv = lc.inv();
            self.num = self.num.mul_scalar(&inv);
            self.den = self.den.mul_scalar(&inv);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<T> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        let mut f = RationalFunction { num, den };
        f.normalize();
        f
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        // Cross-cancel before multiplying to keep intermediates small.
        let g1 = Polynomial::gcd(&self.num, &other.den);
        let g2 = Polynomial::gcd(&other.num, &self.den);
        let n1 = self.num.exact_div(&g1).expect("gcd divides");
        let d2 = other.den.exact_div(&g1).expect("gcd divides");
        let n2 = other.num.exact_div(&g2).expect("gcd divides");
        let d1 = self.den.exact_div(&g2).expect("gcd divides");
        let mut f = RationalFunction { num: n1.mul(&n2), den: d1.mul(&d2) };
        f.normalize();
        f
    }

    pub fn div(&self, other: &Self) -> Result<Self, ExactError> {
        if other.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(self.mul(&other.recip()?))
    }

    pub fn recip(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let mut f = RationalFunction { num: self.den.clone(), den: self.num.clone() };
        f.normalize();
        Ok(f)
    }

    pub fn mul_scalar(&self, c: &T) -> Self {
        let mut f = RationalFunction { num: self.num.mul_scalar(c), den: self.den.clone() };
        f.normalize();
        f
    }

    pub fn pow(&self, e: i64) -> Result<Self, ExactError> {
        if e < 0 {
            return Ok(self.recip()?.pow(-e)?);
        }
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Partial derivative d/dv via the quotient rule.
    pub fn partial(&self, v: &Var) -> Self {
        let num = self
            .num
            .derivative(v)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative(v)));
        let den = self.den.mul(&self.den);
        let mut f = RationalFunction { num, den };
        f.normalize();
        f
    }

    /// Logarithmic derivative action v * d/dv.
    pub fn theta(&self, v: &Var) -> Self {
        let num = self.num.theta(v).mul(&self.den).sub(&self.num.mul(&self.den.theta(v)));
        let den = self.den.mul(&self.den);
        let mut f = RationalFunction { num, den };
        f.normalize();
        f
    }

    /// Substitute a rational function for a variable.
    pub fn substitute(&self, v: &Var, value: &Self) -> Result<Self, ExactError> {
        let eval_poly = |p: &Polynomial<T>| -> Self {
            // Horner over the value, coefficients are v-free polynomials.
            let coeffs = p.coeffs_in(v);
            let max = coeffs.keys().next_back().copied().unwrap_or(0);
            let mut acc = Self::zero();
            for e in (0..=max).rev() {
                acc = acc.mul(value);
                if let Some(c) = coeffs.get(&e) {
                    acc = acc.add(&Self::from_poly(c.clone()));
                }
            }
            acc
        };
        let n = eval_poly(&self.num);
        let d = eval_poly(&self.den);
        n.div(&d)
    }

    /// Evaluate at a point; all variables must be present in the map.
    pub fn eval(&self, point: &BTreeMap<Var, T>) -> Result<T, ExactError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(self.num.eval(point) / d)
    }
}

impl<T: Scalar> fmt::Display for RationalFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Polynomial<T>| {
            let s = format!("{p}");
            if p.num_terms() > 1 || s.contains('*') || s.starts_with('-') {
                format!("({s})")
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldConstant;

    type R = RationalFunction<FieldConstant>;
    type P = Polynomial<FieldConstant>;

    #[test]
    fn normalize_cancels_common_factor() {
        let z = P::var("z");
        // (z^2 - 1)/(z - 1) -> z + 1
        let f = R::new(z.mul(&z).sub(&P::one()), z.sub(&P::one())).unwrap();
        assert_eq!(f, R::from_poly(z.add(&P::one())));
        assert_eq!(format!("{f}"), "z + 1");
    }

    #[test]
    fn product_with_reciprocal_is_one() {
        let z1 = P::var("z1");
        let z2 = P::var("z2");
        let f = R::new(z1.mul(&z2).add(&P::one()), z2.sub(&P::int(3))).unwrap();
        let g = f.recip().unwrap();
        assert!(f.mul(&g).is_one());
    }

    #[test]
    fn common_monomial_factor() {
        let z1 = P::var("z1");
        let z2 = P::var("z2");
        // (z1*z2 + z2)/z2 -> z1 + 1
        let f = R::new(z1.mul(&z2).add(&z2), z2.clone()).unwrap();
        assert_eq!(f, R::from_poly(z1.add(&P::one())));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(R::new(P::one(), P::zero()).unwrap_err(), ExactError::ZeroDenominator);
    }

    #[test]
    fn normalization_is_idempotent_and_congruent() {
        let z = P::var("z");
        let f = R::new(z.mul(&z).sub(&P::one()), z.sub(&P::one()).mul_scalar(&FieldConstant::int(2))).unwrap();
        let g = R::new(z.clone(), z.add(&P::one())).unwrap();
        // f was normalized at construction; normalizing again changes nothing
        let mut f2 = f.clone();
        f2.normalize();
        assert_eq!(f, f2);
        // sums of normalized values equal normalized sums of raw values
        let raw_sum = R::new(
            z.mul(&z).sub(&P::one()).mul(&z.add(&P::one())).add(&z.mul(&z.sub(&P::one()).mul_scalar(&FieldConstant::int(2)))),
            z.sub(&P::one()).mul_scalar(&FieldConstant::int(2)).mul(&z.add(&P::one())),
        )
        .unwrap();
        assert_eq!(f.add(&g), raw_sum);
    }

    #[test]
    fn denominator_is_monic() {
        let z = P::var("z");
        let f = R::new(P::one(), z.mul_scalar(&FieldConstant::int(3))).unwrap();
        assert_eq!(f.den().leading().unwrap().1, &FieldConstant::int(1));
        assert_eq!(format!("{f}"), "(1/3)/z");
    }

    #[test]
    fn theta_of_rational_function() {
        let z = Var::new("z");
        // theta(1/(1-27z)) = 27z/(1-27z)^2
        let f = R::new(P::one(), P::one().sub(&P::var("z").mul_scalar(&FieldConstant::int(27)))).unwrap();
        let t = f.theta(&z);
        let expect = R::new(
            P::var("z").mul_scalar(&FieldConstant::int(27)),
            P::one()
                .sub(&P::var("z").mul_scalar(&FieldConstant::int(27)))
                .pow(2),
        )
        .unwrap();
        assert_eq!(t, expect);
    }

    #[test]
    fn substitution() {
        let z = Var::new("z");
        let f = R::new(P::one(), P::one().sub(&P::var("z"))).unwrap();
        let val = R::new(P::var("w"), P::one().add(&P::var("w"))).unwrap();
        // 1/(1 - w/(1+w)) = 1 + w
        let g = f.substitute(&z, &val).unwrap();
        assert_eq!(g, R::from_poly(P::var("w").add(&P::one())));
    }
}
