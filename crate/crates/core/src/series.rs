//! Truncated q-expansions on the exponent lattice (1/24)Z.
//!
//! Exponents are stored as integers in units of 1/24, so q^(1/24) is
//! exponent 1, q is exponent 24, and eta(m*tau) starts at exponent m.  A
//! series carries a truncation order (exclusive, same units): coefficients
//! at exponents below the order are trusted, everything else is unknown.
//! Binary operations propagate the weakest trusted order of the operands.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed};

use crate::scalar::{rat, Rat, Scalar};

/// One unit per 1/24 of a q-power.
pub const LATTICE: i64 = 24;

/// Errors specific to series arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesError {
    /// Division/inversion needs a nonzero leading term within the trusted range.
    NotInvertible,
    /// n-th root of the leading exponent leaves the (1/24) lattice.
    LatticeOverflow,
    /// Leading coefficient has no exact n-th root in the active field.
    RootNotInField,
    /// Eisenstein weight outside {2, 4, 6}.
    UnsupportedWeight(u32),
    /// Composition target must be a series in integral powers of q with
    /// positive valuation.
    BadComposition,
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::NotInvertible => write!(f, "series has no invertible leading term"),
            SeriesError::LatticeOverflow => write!(f, "root leaves the 1/24 exponent lattice"),
            SeriesError::RootNotInField => {
                write!(f, "leading coefficient has no exact root in the field")
            }
            SeriesError::UnsupportedWeight(k) => write!(f, "unsupported Eisenstein weight {k}"),
            SeriesError::BadComposition => write!(f, "composition argument must be O(q) integral"),
        }
    }
}

impl std::error::Error for SeriesError {}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<T: Scalar> {
    coeffs: BTreeMap<i64, T>,
    /// Exclusive trusted bound, in 1/24 units.
    order: i64,
}

impl<T: Scalar> TruncatedSeries<T> {
    pub fn zero(order: i64) -> Self {
        TruncatedSeries { coeffs: BTreeMap::new(), order }
    }

    pub fn one(order: i64) -> Self {
        Self::monomial(0, T::one(), order)
    }

    pub fn monomial(exp: i64, c: T, order: i64) -> Self {
        let mut s = Self::zero(order);
        s.set(exp, c);
        s
    }

    /// q^n for integer n.
    pub fn q_power(n: i64, order: i64) -> Self {
        Self::monomial(n * LATTICE, T::one(), order)
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Set a coefficient; exponents at or beyond the truncation order are dropped.
    pub fn set(&mut self, exp: i64, c: T) {
        if c.is_zero() || exp >= self.order {
            self.coeffs.remove(&exp);
        } else {
            self.coeffs.insert(exp, c);
        }
    }

    pub fn coeff(&self, exp: i64) -> T {
        self.coeffs.get(&exp).cloned().unwrap_or_else(T::zero)
    }

    /// Coefficient of q^n (integral exponent).
    pub fn coeff_q(&self, n: i64) -> T {
        self.coeff(n * LATTICE)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &T)> {
        self.coeffs.iter()
    }

    /// Smallest stored exponent; for an (identically) zero series this is the
    /// truncation order, the best available lower bound on the valuation.
    pub fn leading_exp(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(self.order)
    }

    pub fn leading_coeff(&self) -> Option<&T> {
        self.coeffs.values().next()
    }

    pub fn truncate(&self, order: i64) -> Self {
        let order = order.min(self.order);
        TruncatedSeries {
            coeffs: self.coeffs.range(..order).map(|(e, c)| (*e, c.clone())).collect(),
            order,
        }
    }

    pub fn shift(&self, delta: i64) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + delta, c.clone())).collect(),
            order: self.order + delta,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut s = self.truncate(order);
        for (e, c) in other.coeffs.range(..order) {
            let v = s.coeff(*e) + c.clone();
            s.set(*e, v);
        }
        s
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c.clone())).collect(),
            order: self.order,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = (self.order + other.leading_exp()).min(other.order + self.leading_exp());
        let mut coeffs: BTreeMap<i64, T> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let e = ea + eb;
                if e >= order {
                    continue;
                }
                let add = ca.clone() * cb.clone();
                if add.is_zero() {
                    continue;
                }
                match coeffs.remove(&e) {
                    None => {
                        coeffs.insert(e, add);
                    }
                    Some(old) => {
                        let v = old + add;
                        if !v.is_zero() {
                            coeffs.insert(e, v);
                        }
                    }
                }
            }
        }
        TruncatedSeries { coeffs, order }
    }

    pub fn mul_scalar(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero(self.order);
        }
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|(e, x)| (*e, x.clone() * c.clone())).collect(),
            order: self.order,
        }
    }

    /// Multiplicative inverse; the leading term must be nonzero.
    pub fn inv(&self) -> Result<Self, SeriesError> {
        let lead_exp = *self.coeffs.keys().next().ok_or(SeriesError::NotInvertible)?;
        let lead = self.coeff(lead_exp);
        // self = lead q^L (1 + u); relative precision n = order - L.
        let n = self.order - lead_exp;
        let linv = lead.inv();
        let u = self.shift(-lead_exp).mul_scalar(&linv).sub(&Self::one(n));
        let mut v = Self::one(n);
        let mut power = Self::one(n);
        loop {
            power = power.mul(&u).neg();
            if power.is_zero() {
                break;
            }
            v = v.add(&power);
        }
        Ok(v.mul_scalar(&linv).shift(-lead_exp))
    }

    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self, SeriesError> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = Self::one(self.order);
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// theta_q = q d/dq, acting termwise: q^(e/24) picks up the factor e/24.
    pub fn theta(&self) -> Self {
        let mut s = Self::zero(self.order);
        for (e, c) in &self.coeffs {
            s.set(*e, c.clone() * T::from_rat(rat(*e, LATTICE)));
        }
        s
    }

    /// n-th root: leading exponent must divide by n on the lattice and the
    /// leading coefficient must have an exact n-th root in the field.
    pub fn nth_root(&self, n: u32) -> Result<Self, SeriesError> {
        assert!(n > 0);
        let lead_exp = *self.coeffs.keys().next().ok_or(SeriesError::NotInvertible)?;
        if lead_exp.rem_euclid(n as i64) != 0 {
            return Err(SeriesError::LatticeOverflow);
        }
        let lead = self.coeff(lead_exp);
        let root = scalar_nth_root(&lead, n).ok_or(SeriesError::RootNotInField)?;
        let prec = self.order - lead_exp;
        let u = self.shift(-lead_exp).mul_scalar(&lead.inv()).sub(&Self::one(prec));
        // (1+u)^{1/n} by the binomial series; u has positive valuation.
        let mut acc = Self::one(prec);
        let mut upow = Self::one(prec);
        let mut binom = Rat::one();
        let mut k: i64 = 0;
        loop {
            k += 1;
            upow = upow.mul(&u);
            if upow.is_zero() {
                break;
            }
            binom = binom * (rat(1, n as i64) - rat(k - 1, 1)) / rat(k, 1);
            acc = acc.add(&upow.mul_scalar(&T::from_rat(binom.clone())));
        }
        Ok(acc.mul_scalar(&root).shift(lead_exp / n as i64))
    }

    pub fn sqrt(&self) -> Result<Self, SeriesError> {
        self.nth_root(2)
    }

    /// exp of a series with positive valuation.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.is_zero() && self.leading_exp() <= 0 {
            return Err(SeriesError::BadComposition);
        }
        let mut acc = Self::one(self.order);
        let mut term = Self::one(self.order);
        let mut k: i64 = 0;
        loop {
            k += 1;
            term = term.mul(self).mul_scalar(&T::from_rat(rat(1, k)));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Substitute `inner` (a series with positive integral valuation) into
    /// `self`, which must live on non-negative integral exponents.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if inner.leading_exp() < LATTICE {
            return Err(SeriesError::BadComposition);
        }
        let order = self.order.min(inner.order);
        let mut max_deg = 0;
        for (e, _) in &self.coeffs {
            if *e % LATTICE != 0 || *e < 0 {
                return Err(SeriesError::BadComposition);
            }
            max_deg = max_deg.max(*e / LATTICE);
        }
        let mut acc = Self::zero(order);
        for d in (0..=max_deg).rev() {
            acc = acc.mul(inner).truncate(order);
            let c = self.coeff_q(d);
            if !c.is_zero() {
                acc = acc.add(&Self::monomial(0, c, order));
            }
        }
        Ok(acc)
    }

    /// First exponent (1/24 units) where two series differ inside the common
    /// trusted window.
    pub fn first_difference(&self, other: &Self) -> Option<(i64, T, T)> {
        let order = self.order.min(other.order);
        let mut exps: Vec<i64> = self
            .coeffs
            .range(..order)
            .map(|(e, _)| *e)
            .chain(other.coeffs.range(..order).map(|(e, _)| *e))
            .collect();
        exps.sort_unstable();
        exps.dedup();
        for e in exps {
            let a = self.coeff(e);
            let b = other.coeff(e);
            if a != b {
                return Some((e, a, b));
            }
        }
        None
    }

    /// Equality of all coefficients below q^order_q; panics if either side is
    /// not trusted that far (a comparison that silently ignored untrusted
    /// coefficients would be vacuous).
    pub fn eq_to_order(&self, other: &Self, order_q: i64) -> bool {
        let window = order_q * LATTICE;
        assert!(
            self.order >= window && other.order >= window,
            "series not trusted far enough for the requested comparison"
        );
        self.truncate(window).first_difference(&other.truncate(window)).is_none()
    }
}

/// Exact n-th root of a scalar, when one exists in the same field.
fn scalar_nth_root<T: Scalar>(c: &T, n: u32) -> Option<T> {
    if c.is_one() {
        return Some(T::one());
    }
    let r = c.to_rat()?;
    if r.is_negative() && n % 2 == 0 {
        return None;
    }
    let root_int = |x: &num_bigint::BigInt| -> Option<num_bigint::BigInt> {
        let neg = x.sign() == num_bigint::Sign::Minus;
        let mag = x.abs();
        let root = mag.nth_root(n);
        if num_traits::pow(root.clone(), n as usize) == mag {
            Some(if neg { -root } else { root })
        } else {
            None
        }
    };
    let num = root_int(r.numer())?;
    let den = root_int(r.denom())?;
    Some(T::from_rat(Rat::new(num, den)))
}

/// Render an exponent in 1/24 units as a q-power.
fn exp_string(e: i64) -> String {
    if e == 0 {
        return String::new();
    }
    let g = e.gcd(&LATTICE);
    let (n, d) = (e / g, LATTICE / g);
    if d == 1 {
        if n == 1 {
            "q".to_string()
        } else {
            format!("q^{n}")
        }
    } else {
        format!("q^({n}/{d})")
    }
}

impl<T: Scalar> fmt::Display for TruncatedSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        } else {
            let mut first = true;
            for (e, c) in &self.coeffs {
                let cs = format!("{c}");
                let (neg, mag) = match cs.strip_prefix('-') {
                    Some(rest) if !cs.contains('+') && !rest.contains('-') => {
                        (true, rest.to_string())
                    }
                    _ => (false, cs),
                };
                let needs_parens = mag.contains('+') || mag.contains('-');
                if first {
                    if neg {
                        write!(f, "-")?;
                    }
                    first = false;
                } else if neg {
                    write!(f, " - ")?;
                } else {
                    write!(f, " + ")?;
                }
                let q = exp_string(*e);
                if q.is_empty() {
                    if needs_parens {
                        write!(f, "({mag})")?;
                    } else {
                        write!(f, "{mag}")?;
                    }
                } else if mag == "1" {
                    write!(f, "{q}")?;
                } else if needs_parens {
                    write!(f, "({mag})*{q}")?;
                } else {
                    write!(f, "{mag}*{q}")?;
                }
            }
        }
        let g = self.order.gcd(&LATTICE);
        let (n, d) = (self.order / g, LATTICE / g);
        if d == 1 {
            write!(f, " + O(q^{n})")
        } else {
            write!(f, " + O(q^({n}/{d}))")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldConstant;

    type S = TruncatedSeries<FieldConstant>;

    fn ord(q: i64) -> i64 {
        q * LATTICE
    }

    #[test]
    fn theta_on_monomials_and_constants() {
        let s = S::q_power(3, ord(10));
        let t = s.theta();
        assert_eq!(t.coeff_q(3), FieldConstant::int(3));
        let c = S::one(ord(10));
        assert!(c.theta().is_zero());
    }

    #[test]
    fn inverse_of_unit_series() {
        let mut s = S::one(ord(8));
        s.set(LATTICE, FieldConstant::int(-1)); // 1 - q
        let i = s.inv().unwrap();
        for n in 0..8 {
            assert_eq!(i.coeff_q(n), FieldConstant::int(1));
        }
        assert!(s.mul(&i).sub(&S::one(ord(8))).is_zero());
    }

    #[test]
    fn root_of_perfect_square() {
        let mut s = S::one(ord(6));
        s.set(LATTICE, FieldConstant::int(2));
        s.set(2 * LATTICE, FieldConstant::int(1)); // 1 + 2q + q^2 = (1+q)^2
        let r = s.nth_root(2).unwrap();
        assert_eq!(r.coeff_q(0), FieldConstant::int(1));
        assert_eq!(r.coeff_q(1), FieldConstant::int(1));
        assert_eq!(r.coeff_q(2), FieldConstant::int(0));
    }

    #[test]
    fn root_of_monomial() {
        let s = S::q_power(2, ord(9));
        let r = s.nth_root(2).unwrap();
        assert_eq!(r.coeff_q(1), FieldConstant::int(1));
    }

    #[test]
    fn root_failures() {
        let s = S::monomial(1, FieldConstant::int(1), ord(3)); // q^(1/24)
        assert_eq!(s.nth_root(2).unwrap_err(), SeriesError::LatticeOverflow);
        let s2 = S::monomial(0, FieldConstant::int(2), ord(3));
        assert_eq!(s2.nth_root(2).unwrap_err(), SeriesError::RootNotInField);
        let s3 = S::monomial(0, FieldConstant::int(4), ord(3));
        assert_eq!(s3.nth_root(2).unwrap().coeff_q(0), FieldConstant::int(2));
    }

    #[test]
    fn order_tracking_through_multiplication() {
        // (q + O(q^5)) * (q + O(q^3)) is trusted to O(q^4)
        let a = S::monomial(ord(1), FieldConstant::int(1), ord(5));
        let b = S::monomial(ord(1), FieldConstant::int(1), ord(3));
        let p = a.mul(&b);
        assert_eq!(p.order(), ord(4));
    }

    #[test]
    fn exp_and_compose_round_trip() {
        // exp(q)*exp(-q) = 1
        let q = S::q_power(1, ord(12));
        let e = q.exp().unwrap();
        let em = q.neg().exp().unwrap();
        assert!(e.mul(&em).sub(&S::one(ord(12))).is_zero());
        // compose x^2 with q+q^2
        let mut x2 = S::q_power(2, ord(6));
        x2.set(0, FieldConstant::int(5));
        let mut inner = S::q_power(1, ord(6));
        inner.set(ord(2), FieldConstant::int(1));
        let c = x2.compose(&inner).unwrap();
        assert_eq!(c.coeff_q(0), FieldConstant::int(5));
        assert_eq!(c.coeff_q(2), FieldConstant::int(1));
        assert_eq!(c.coeff_q(3), FieldConstant::int(2));
        assert_eq!(c.coeff_q(4), FieldConstant::int(1));
    }

    #[test]
    fn display_fractional_exponents() {
        let mut s = S::monomial(1, FieldConstant::int(1), ord(1));
        s.set(8, FieldConstant::int(3));
        assert_eq!(format!("{s}"), "q^(1/24) + 3*q^(1/3) + O(q)");
    }
}
