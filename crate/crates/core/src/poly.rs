//! Sparse multivariate polynomials over a generic exact scalar.
//!
//! Variables are named; the canonical order puts geometry variables
//! (z, z1, z2, ...) before gauge variables (s11, s21, ...) before everything
//! else, and monomials compare lexicographically in that order.  The fixed
//! order makes leading terms, normal forms and printed output deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;


use crate::scalar::{ExactError, Scalar};

/// A named variable with the canonical sort key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Var {
    name: String,
}

impl Var {
    pub fn new(name: &str) -> Self {
        Var { name: name.to_string() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Sort class: z-variables first, then s-variables, then the rest.
    fn sort_key(&self) -> (u8, u64, &str) {
        let n = &self.name;
        let digits = |s: &str| s.chars().all(|c| c.is_ascii_digit());
        if let Some(rest) = n.strip_prefix('z') {
            if rest.is_empty() {
                return (0, 0, "");
            }
            if digits(rest) {
                return (0, rest.parse().unwrap_or(u64::MAX), "");
            }
        }
        if let Some(rest) = n.strip_prefix('s') {
            if !rest.is_empty() && digits(rest) {
                return (1, rest.parse().unwrap_or(u64::MAX), "");
            }
        }
        (2, 0, n.as_str())
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key()
            .cmp(&other.sort_key())
            .then_with(|| self.name.cmp(&other.name))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// A monomial: map from variable to positive exponent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Monomial(BTreeMap<Var, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn var(v: Var) -> Self {
        let mut m = BTreeMap::new();
        m.insert(v, 1);
        Monomial(m)
    }

    pub fn from_pairs(pairs: &[(&str, u32)]) -> Self {
        let mut m = BTreeMap::new();
        for (n, e) in pairs {
            if *e > 0 {
                m.insert(Var::new(n), *e);
            }
        }
        Monomial(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.0.get(v).copied().unwrap_or(0)
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.0.keys()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut m = self.0.clone();
        for (v, e) in &other.0 {
            *m.entry(v.clone()).or_insert(0) += e;
        }
        Monomial(m)
    }

    pub fn pow(&self, e: u32) -> Self {
        Monomial(self.0.iter().map(|(v, x)| (v.clone(), x * e)).collect())
    }

    /// self / other, if other divides self.
    pub fn try_div(&self, other: &Self) -> Option<Self> {
        let mut m = self.0.clone();
        for (v, e) in &other.0 {
            match m.get_mut(v) {
                Some(x) if *x >= *e => {
                    *x -= *e;
                    if *x == 0 {
                        m.remove(v);
                    }
                }
                _ => return None,
            }
        }
        Some(Monomial(m))
    }

    fn with_exponent(&self, v: &Var, e: u32) -> Self {
        let mut m = self.0.clone();
        if e == 0 {
            m.remove(v);
        } else {
            m.insert(v.clone(), e);
        }
        Monomial(m)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Pure lexicographic order over the canonical variable order.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        let mut a = self.0.iter().peekable();
        let mut b = other.0.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                    // earlier variable present only on one side: that side has
                    // positive exponent where the other has zero
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => {
                            a.next();
                            b.next();
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (v, e) in &self.0 {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse multivariate polynomial; no zero coefficients are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T: Scalar> {
    terms: BTreeMap<Monomial, T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    pub fn constant(c: T) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Polynomial { terms }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn int(n: i64) -> Self {
        Self::constant(T::from_int(n))
    }

    pub fn var(name: &str) -> Self {
        Self::monomial(Monomial::var(Var::new(name)), T::one())
    }

    pub fn monomial(m: Monomial, c: T) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, T)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    pub fn constant_value(&self) -> Option<T> {
        if self.terms.is_empty() {
            Some(T::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    /// Greatest monomial with its coefficient (lexicographic leading term).
    pub fn leading(&self) -> Option<(&Monomial, &T)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: &Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        for m in self.terms.keys() {
            for v in m.vars() {
                s.insert(v.clone());
            }
        }
        s
    }

    pub fn add_term(&mut self, m: Monomial, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut r = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                r.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        r
    }

    pub fn mul_scalar(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x.clone() * c.clone())).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(mm, x)| (mm.mul(m), x.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Partial derivative with respect to `v`.
    pub fn derivative(&self, v: &Var) -> Self {
        let mut r = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e > 0 {
                let m2 = m.with_exponent(v, e - 1);
                r.add_term(m2, c.clone() * T::from_int(e as i64));
            }
        }
        r
    }

    /// The logarithmic derivative action v * d/dv (keeps monomials intact).
    pub fn theta(&self, v: &Var) -> Self {
        let mut r = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e > 0 {
                r.add_term(m.clone(), c.clone() * T::from_int(e as i64));
            }
        }
        r
    }

    /// Substitute a constant for a variable.
    pub fn substitute_const(&self, v: &Var, value: &T) -> Self {
        let mut r = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                r.add_term(m.clone(), c.clone());
            } else {
                let mut scale = T::one();
                for _ in 0..e {
                    scale = scale * value.clone();
                }
                r.add_term(m.with_exponent(v, 0), c.clone() * scale);
            }
        }
        r
    }

    /// Evaluate at a full point; variables absent from the map evaluate as 0.
    pub fn eval(&self, point: &BTreeMap<Var, T>) -> T {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            let mut vanished = false;
            for v in m.vars() {
                match point.get(v) {
                    Some(val) => {
                        for _ in 0..m.exponent(v) {
                            term = term * val.clone();
                        }
                    }
                    None => {
                        vanished = true;
                        break;
                    }
                }
            }
            if !vanished {
                acc = acc + term;
            }
        }
        acc
    }

    /// Exact division; errors if the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self, ExactError> {
        if divisor.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if let Some(c) = divisor.constant_value() {
            return Ok(self.mul_scalar(&c.inv()));
        }
        let (dm, dc) = divisor.leading().expect("nonzero divisor");
        let dm = dm.clone();
        let dc = dc.clone();
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while !rem.is_zero() {
            let (rm, rc) = rem.leading().expect("nonzero remainder");
            let m = rm.try_div(&dm).ok_or(ExactError::InexactDivision)?;
            let c = rc.clone() / dc.clone();
            quot.add_term(m.clone(), c.clone());
            rem = rem.sub(&divisor.mul_monomial(&m, &c));
        }
        Ok(quot)
    }

    /// Divide by the lexicographic leading coefficient (make the polynomial monic).
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some((_, c)) => self.mul_scalar(&c.clone().inv()),
        }
    }

    /// View as a univariate polynomial in `v` with polynomial coefficients.
    pub fn coeffs_in(&self, v: &Var) -> BTreeMap<u32, Polynomial<T>> {
        let mut out: BTreeMap<u32, Polynomial<T>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            out.entry(e)
                .or_insert_with(Self::zero)
                .add_term(m.with_exponent(v, 0), c.clone());
        }
        out
    }

    fn from_coeffs_in(v: &Var, coeffs: &BTreeMap<u32, Polynomial<T>>) -> Self {
        let mut r = Self::zero();
        for (e, p) in coeffs {
            let vm = Monomial::var(v.clone()).pow(*e);
            for (m, c) in &p.terms {
                r.add_term(m.mul(&vm), c.clone());
            }
        }
        r
    }

    /// GCD, normalized so the lexicographic leading coefficient is 1.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() {
            return Self::one();
        }
        // Fast path: identical inputs.
        if a == b {
            return a.monic();
        }
        // Main variable: smallest combined degree among variables of both.
        let vars_a = a.vars();
        let vars_b = b.vars();
        let mut main: Option<(u32, Var)> = None;
        for v in vars_a.union(&vars_b) {
            let d = a.degree_in(v) + b.degree_in(v);
            if main.as_ref().map(|(bd, _)| d < *bd).unwrap_or(true) {
                main = Some((d, v.clone()));
            }
        }
        let x = main.expect("non-constant polynomials have variables").1;

        let ca = a.coeffs_in(&x);
        let cb = b.coeffs_in(&x);
        let cont_a = ca.values().fold(Self::zero(), |g, p| Self::gcd(&g, p));
        let cont_b = cb.values().fold(Self::zero(), |g, p| Self::gcd(&g, p));
        let cont = Self::gcd(&cont_a, &cont_b);
        let pp_a = a.exact_div(&cont_a).expect("content divides");
        let pp_b = b.exact_div(&cont_b).expect("content divides");

        // Primitive pseudo-remainder sequence in x.
        let (mut p, mut q) = if pp_a.degree_in(&x) >= pp_b.degree_in(&x) {
            (pp_a, pp_b)
        } else {
            (pp_b, pp_a)
        };
        loop {
            if q.is_zero() {
                let qq = primitive_in(&p, &x);
                return cont.mul(&qq).monic();
            }
            if q.degree_in(&x) == 0 {
                // gcd of primitive parts is free of x
                return cont.monic();
            }
            let r = pseudo_rem(&p, &q, &x);
            p = q;
            q = primitive_in(&r, &x);
        }
    }
}

/// Content of `p` with respect to `x` divided out.
fn primitive_in<T: Scalar>(p: &Polynomial<T>, x: &Var) -> Polynomial<T> {
    if p.is_zero() {
        return Polynomial::zero();
    }
    let coeffs = p.coeffs_in(x);
    let cont = coeffs.values().fold(Polynomial::zero(), |g, c| Polynomial::gcd(&g, c));
    p.exact_div(&cont).expect("content divides")
}

/// Pseudo-remainder of p by q in the variable x (stepwise, with monic-in-x
/// leading-coefficient scaling; exactness is restored by the primitive-part
/// pass of the caller).
fn pseudo_rem<T: Scalar>(p: &Polynomial<T>, q: &Polynomial<T>, x: &Var) -> Polynomial<T> {
    let dq = q.degree_in(x);
    let cq = q.coeffs_in(x);
    let lq = cq.get(&dq).expect("leading coefficient").clone();
    let mut rem = p.clone();
    while !rem.is_zero() {
        let dr = rem.degree_in(x);
        if dr < dq {
            break;
        }
        let cr = rem.coeffs_in(x);
        let lr = cr.get(&dr).expect("leading coefficient").clone();
        let shift = Monomial::var(x.clone()).pow(dr - dq);
        // rem := lq * rem - lr * x^{dr-dq} * q
        rem = rem.mul(&lq).sub(&q.mul(&lr).mul_monomial(&shift, &T::one()));
    }
    rem
}

impl<T: Scalar> Polynomial<T> {
    /// Rebuild from a univariate-in-`v` coefficient table (inverse of `coeffs_in`).
    pub fn assemble_in(v: &Var, coeffs: &BTreeMap<u32, Polynomial<T>>) -> Self {
        Self::from_coeffs_in(v, coeffs)
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // descending monomial order
        for (m, c) in self.terms.iter().rev() {
            let cs = format!("{c}");
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) if !cs.contains('+') && !rest.contains('-') => (true, rest.to_string()),
                _ => (false, cs),
            };
            let needs_parens = mag.contains('+') || mag.contains('-') || mag.contains("sqrt");
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
            if m.is_one() {
                if needs_parens {
                    write!(f, "({mag})")?;
                } else {
                    write!(f, "{mag}")?;
                }
            } else if mag == "1" {
                write!(f, "{m}")?;
            } else if needs_parens {
                write!(f, "({mag})*{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldConstant;

    type P = Polynomial<FieldConstant>;

    fn pvar(n: &str) -> P {
        P::var(n)
    }

    #[test]
    fn variable_order_is_z_then_s_then_rest() {
        let z1 = Var::new("z1");
        let s22 = Var::new("s22");
        let a = Var::new("A");
        assert!(z1 < s22);
        assert!(s22 < a);
        assert!(Var::new("z") < Var::new("z1"));
        assert!(Var::new("s21") < Var::new("s22"));
    }

    #[test]
    fn exact_division_round_trip() {
        let z = pvar("z");
        let p = z.mul(&z).sub(&P::one()); // z^2 - 1
        let d = z.sub(&P::one()); // z - 1
        let q = p.exact_div(&d).unwrap();
        assert_eq!(q, z.add(&P::one()));
    }

    #[test]
    fn inexact_division_is_an_error() {
        let z = pvar("z");
        let p = z.mul(&z).add(&P::one());
        let d = z.sub(&P::one());
        assert_eq!(p.exact_div(&d).unwrap_err(), ExactError::InexactDivision);
    }

    #[test]
    fn gcd_of_univariate_factors() {
        let z = pvar("z");
        let a = z.mul(&z).sub(&P::one()); // (z-1)(z+1)
        let b = z.sub(&P::one()).mul(&z.add(&P::int(3))); // (z-1)(z+3)
        let g = P::gcd(&a, &b);
        assert_eq!(g, z.sub(&P::one()));
    }

    #[test]
    fn gcd_multivariate() {
        let z1 = pvar("z1");
        let z2 = pvar("z2");
        let common = z1.mul(&z2).add(&P::one()); // z1*z2 + 1
        let a = common.mul(&z1.add(&P::int(2)));
        let b = common.mul(&z2.sub(&P::int(5)));
        let g = P::gcd(&a, &b);
        assert_eq!(g, common.monic());
    }

    #[test]
    fn gcd_coprime_is_one() {
        let z1 = pvar("z1");
        let z2 = pvar("z2");
        assert_eq!(P::gcd(&z1, &z2), P::one());
    }

    #[test]
    fn derivative_and_theta() {
        let z = Var::new("z");
        let p = pvar("z").pow(3).mul_scalar(&FieldConstant::int(2));
        assert_eq!(p.derivative(&z), pvar("z").pow(2).mul_scalar(&FieldConstant::int(6)));
        assert_eq!(p.theta(&z), pvar("z").pow(3).mul_scalar(&FieldConstant::int(6)));
    }

    #[test]
    fn display_is_deterministic_descending() {
        let p = pvar("z").pow(2).sub(&pvar("z").mul_scalar(&FieldConstant::int(3))).add(&P::one());
        assert_eq!(format!("{p}"), "z^2 - 3*z + 1");
    }
}
