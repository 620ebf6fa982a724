//! q-expansions of the classical objects: Eisenstein series, the Dedekind
//! eta function and eta quotients, and the weight-one modular forms A, B, C
//! on Gamma_0(N) for N in {1*, 2, 3} together with the Hauptmodul
//! alpha = (C/A)^r and the weight-two form E = theta_q log(B^r C^r).
//!
//! Conventions:
//!
//! - E_{2k} = 1 + c_k sum_{n>=1} sigma_{2k-1}(n) q^n with c_2 = -24,
//!   c_4 = 240, c_6 = -504 (the Bernoulli values of 2/zeta(1-2k); the test
//!   suite cross-checks them against an independent divisor-sum oracle).
//! - eta(m tau) = q^{m/24} prod_{n>=1} (1 - q^{mn}).
//! - (N, r): (1*, 6), (2, 4), (3, 3).
//!
//! For N = 1* the form C = ((E_4^{3/2} - E_6)/2)^{1/6} has leading
//! coefficient 432^{1/6}, which lies in no quadratic extension of Q.  C is
//! therefore carried as a [`ScaledSeries`]: a formal prefactor 432^{1/6}
//! times an honest series with rational coefficients.  Every identity the
//! verification needs is either homogeneous in C (the prefactor cancels) or
//! involves only C^r (where the prefactor collapses into Q).

use num_traits::One;

use crate::scalar::{rat_int, FieldConstant, Rat};
use crate::series::{SeriesError, LATTICE};
use crate::Series;

/// The three congruence levels of the differential-ring table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    OneStar,
    Two,
    Three,
}

impl Level {
    pub fn r(self) -> i64 {
        match self {
            Level::OneStar => 6,
            Level::Two => 4,
            Level::Three => 3,
        }
    }

    /// Discriminant of the coefficient field the level needs.
    pub fn disc(self) -> Option<i64> {
        match self {
            Level::Two => Some(2),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Level::OneStar => "1*",
            Level::Two => "2",
            Level::Three => "3",
        }
    }

    pub fn parse(s: &str) -> Option<Level> {
        match s {
            "1*" | "1star" | "1" => Some(Level::OneStar),
            "2" => Some(Level::Two),
            "3" => Some(Level::Three),
            _ => None,
        }
    }
}

/// order in q-units -> lattice units.
pub fn qo(order_q: i64) -> i64 {
    order_q * LATTICE
}

/// Eisenstein series E_k for k in {2, 4, 6}, truncated at q^order_q.
pub fn eisenstein(k: u32, order_q: i64) -> Result<Series, SeriesError> {
    let c = match k {
        2 => -24i64,
        4 => 240,
        6 => -504,
        other => return Err(SeriesError::UnsupportedWeight(other)),
    };
    let mut s = Series::one(qo(order_q));
    let n_max = order_q.max(0);
    // sigma_{k-1} by sieving over divisors
    let mut sigma = vec![Rat::from_integer(0.into()); (n_max + 1) as usize];
    for d in 1..=n_max {
        let dk = rat_int(d).pow((k - 1) as i32);
        let mut m = d;
        while m <= n_max {
            sigma[m as usize] += dk.clone();
            m += d;
        }
    }
    for n in 1..=n_max {
        s.set(qo(n), FieldConstant::rational(rat_int(c) * sigma[n as usize].clone()));
    }
    Ok(s)
}

/// eta(m tau) = q^{m/24} prod_{n>=1} (1 - q^{mn}) truncated at lattice order.
pub fn eta(scale: u32, order_lattice: i64) -> Series {
    assert!(scale > 0, "eta scale must be positive");
    let m = scale as i64;
    // build the product at relative precision, then shift by the q^{m/24}
    let rel = order_lattice - m;
    let mut prod = Series::one(rel.max(0));
    let mut n = 1i64;
    while m * n * LATTICE < rel {
        // prod *= 1 - q^{mn}
        let shifted = prod.shift(m * n * LATTICE).truncate(rel.max(0));
        prod = prod.sub(&shifted);
        n += 1;
    }
    prod.shift(m)
}

/// Specification prefactor * q^{extra} * prod_i eta(m_i tau)^{e_i}.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaQuotientSpec {
    pub factors: Vec<(u32, i32)>,
    pub prefactor: FieldConstant,
    /// extra power of q in 1/24 units
    pub extra_q_power: i64,
}

impl EtaQuotientSpec {
    pub fn new(factors: &[(u32, i32)]) -> Self {
        EtaQuotientSpec {
            factors: factors.to_vec(),
            prefactor: FieldConstant::int(1),
            extra_q_power: 0,
        }
    }

    pub fn with_prefactor(mut self, c: FieldConstant) -> Self {
        self.prefactor = c;
        self
    }
}

pub fn eta_quotient(spec: &EtaQuotientSpec, order_lattice: i64) -> Result<Series, SeriesError> {
    // Inverse factors cost precision; pad the working order by the total
    // weight of the denominator part.
    let slack: i64 = spec
        .factors
        .iter()
        .map(|(m, e)| 2 * *m as i64 * e.unsigned_abs() as i64)
        .sum::<i64>()
        + 48;
    let head = order_lattice + slack;
    let mut acc = Series::monomial(spec.extra_q_power, spec.prefactor.clone(), head);
    for (m, e) in &spec.factors {
        let base = eta(*m, head);
        acc = acc.mul(&base.pow(*e as i64)?);
    }
    Ok(acc.truncate(order_lattice))
}

/// A series with a formal scalar prefactor radicand^{1/root}.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledSeries {
    pub radicand: Rat,
    pub root: u32,
    pub series: Series,
}

impl ScaledSeries {
    pub fn plain(series: Series) -> Self {
        ScaledSeries { radicand: Rat::one(), root: 1, series }
    }

    pub fn is_plain(&self) -> bool {
        self.radicand.is_one() || self.root == 1
    }

    /// The underlying series when the prefactor is trivial.
    pub fn as_plain(&self) -> Option<&Series> {
        if self.is_plain() {
            Some(&self.series)
        } else {
            None
        }
    }

    /// self^k as an honest series, when the prefactor power is rational,
    /// i.e. root | k.
    pub fn pow_plain(&self, k: i64) -> Result<Series, SeriesError> {
        if self.is_plain() {
            return self.series.pow(k);
        }
        if k.rem_euclid(self.root as i64) != 0 {
            return Err(SeriesError::RootNotInField);
        }
        let e = k.div_euclid(self.root as i64);
        let scale = self.radicand.pow(e as i32);
        Ok(self.series.pow(k)?.mul_scalar(&FieldConstant::rational(scale)))
    }

    /// theta_q(self)/self; the constant prefactor drops out.
    pub fn dlog(&self) -> Result<Series, SeriesError> {
        self.series.theta().div(&self.series)
    }
}

/// The weight-one forms A, B, C of one level, plus r.
#[derive(Debug, Clone)]
pub struct WeightOneForms {
    pub level: Level,
    pub a: Series,
    pub b: Series,
    pub c: ScaledSeries,
}

impl WeightOneForms {
    pub fn r(&self) -> i64 {
        self.level.r()
    }

    /// B^r as a plain series.
    pub fn b_pow_r(&self) -> Result<Series, SeriesError> {
        self.b.pow(self.r())
    }

    /// C^r as a plain series.
    pub fn c_pow_r(&self) -> Result<Series, SeriesError> {
        self.c.pow_plain(self.r())
    }
}

/// The table of weight-one forms.
///
/// - 1*: A = E4^{1/4}, B = ((E4^{3/2}+E6)/2)^{1/6}, C = ((E4^{3/2}-E6)/2)^{1/6}
/// - 2:  A = (64 eta(2t)^24 + eta(t)^24)^{1/4} / (eta(t)^2 eta(2t)^2),
///       B = eta(t)^4/eta(2t)^2, C = 2^{3/2} eta(2t)^4/eta(t)^2
/// - 3:  A = (27 eta(3t)^12 + eta(t)^12)^{1/3} / (eta(t) eta(3t)),
///       B = eta(t)^3/eta(3t), C = 3 eta(3t)^3/eta(t)
pub fn forms_abc(level: Level, order_q: i64) -> Result<WeightOneForms, SeriesError> {
    // fractional exponents and internal roots cost precision; pad generously
    let pad = qo(order_q + 6);
    match level {
        Level::OneStar => {
            let e4 = eisenstein(4, order_q + 6)?;
            let e6 = eisenstein(6, order_q + 6)?;
            let a = e4.nth_root(4)?;
            let e4_32 = e4.sqrt()?.pow(3)?;
            let half = FieldConstant::ratio(1, 2);
            let b6 = e4_32.add(&e6).mul_scalar(&half);
            let c6 = e4_32.sub(&e6).mul_scalar(&half);
            let b = b6.nth_root(6)?;
            // c6 = 432 q (1 + ...): strip 432, root the rest
            let c_red6 = c6.mul_scalar(&FieldConstant::ratio(1, 432));
            let c_red = c_red6.nth_root(6)?;
            Ok(WeightOneForms {
                level,
                a: a.truncate(pad),
                b: b.truncate(pad),
                c: ScaledSeries { radicand: rat_int(432), root: 6, series: c_red.truncate(pad) },
            })
        }
        Level::Two => {
            let ord = qo(order_q + 8);
            let e1 = eta(1, ord);
            let e2 = eta(2, ord);
            let num = e2.pow(24)?.mul_scalar(&FieldConstant::int(64)).add(&e1.pow(24)?);
            let a = num.nth_root(4)?.div(&e1.pow(2)?.mul(&e2.pow(2)?))?;
            let b = e1.pow(4)?.div(&e2.pow(2)?)?;
            let two_sqrt2 = FieldConstant::with_radical(Rat::from_integer(0.into()), rat_int(2), 2)
                .expect("2 is square-free");
            let c = e2.pow(4)?.div(&e1.pow(2)?)?.mul_scalar(&two_sqrt2);
            Ok(WeightOneForms {
                level,
                a: a.truncate(pad),
                b: b.truncate(pad),
                c: ScaledSeries::plain(c.truncate(pad)),
            })
        }
        Level::Three => {
            let ord = qo(order_q + 8);
            let e1 = eta(1, ord);
            let e3 = eta(3, ord);
            let num = e3.pow(12)?.mul_scalar(&FieldConstant::int(27)).add(&e1.pow(12)?);
            let a = num.nth_root(3)?.div(&e1.mul(&e3))?;
            let b = e1.pow(3)?.div(&e3)?;
            let c = e3.pow(3)?.div(&e1)?.mul_scalar(&FieldConstant::int(3));
            Ok(WeightOneForms {
                level,
                a: a.truncate(pad),
                b: b.truncate(pad),
                c: ScaledSeries::plain(c.truncate(pad)),
            })
        }
    }
}

/// Hauptmodul alpha = (C/A)^r = C^r / A^r; a series with zero constant term.
pub fn hauptmodul(level: Level, order_q: i64) -> Result<Series, SeriesError> {
    let forms = forms_abc(level, order_q)?;
    let r = forms.r();
    forms.c.pow_plain(r)?.div(&forms.a.pow(r)?)
}

/// E = theta_q log(B^r C^r), the weight-two analogue of E_2.
pub fn e_series(level: Level, order_q: i64) -> Result<Series, SeriesError> {
    let forms = forms_abc(level, order_q)?;
    let p = forms.b_pow_r()?.mul(&forms.c_pow_r()?);
    p.theta().div(&p)
}

/// The three Ramanujan relations as residual series (all should vanish).
pub fn ramanujan_residuals(order_q: i64) -> Result<[Series; 3], SeriesError> {
    let e2 = eisenstein(2, order_q + 1)?;
    let e4 = eisenstein(4, order_q + 1)?;
    let e6 = eisenstein(6, order_q + 1)?;
    let twelfth = FieldConstant::ratio(1, 12);
    let third = FieldConstant::ratio(1, 3);
    let half = FieldConstant::ratio(1, 2);
    let r1 = e2.theta().sub(&e2.mul(&e2).sub(&e4).mul_scalar(&twelfth));
    let r2 = e4.theta().sub(&e4.mul(&e2).sub(&e6).mul_scalar(&third));
    let r3 = e6.theta().sub(&e6.mul(&e2).sub(&e4.mul(&e4)).mul_scalar(&half));
    Ok([r1.truncate(qo(order_q)), r2.truncate(qo(order_q)), r3.truncate(qo(order_q))])
}

/// All level-N ring relations evaluated on q-expansions, returned as named
/// residual series (every entry should be identically zero).
///
/// Relations involving a bare C are checked with the scale factored out (the
/// relations are homogeneous of degree one in C); relations involving C^r are
/// checked plainly.
pub fn ring_relation_residuals(
    level: Level,
    order_q: i64,
) -> Result<Vec<(String, Series)>, SeriesError> {
    let forms = forms_abc(level, order_q + 2)?;
    let r = forms.r();
    let rr = FieldConstant::ratio(1, 2 * r);
    let a = &forms.a;
    let b = &forms.b;
    let c_red = &forms.c.series;
    let alpha = hauptmodul(level, order_q + 2)?;
    let e = e_series(level, order_q + 2)?;
    let a2 = a.mul(a);
    let br = forms.b_pow_r()?;
    let cr = forms.c_pow_r()?;
    let ar = a.pow(r)?;
    let one = Series::one(qo(order_q + 2));

    let mut out = Vec::new();
    // algebraic relations
    out.push((
        format!("B^{r} - (1-alpha)*A^{r}"),
        br.sub(&one.sub(&alpha).mul(&ar)),
    ));
    out.push((format!("C^{r} - alpha*A^{r}"), cr.sub(&alpha.mul(&ar))));
    // d alpha = alpha (1-alpha) A^2
    out.push((
        "theta(alpha) - alpha*(1-alpha)*A^2".to_string(),
        alpha.theta().sub(&alpha.mul(&one.sub(&alpha)).mul(&a2)),
    ));
    // d A = (1/2r) A (E + (C^r - B^r)/A^{r-2}), checked * A^{r-2}
    out.push((
        format!("2r*theta(A)*A^{} - A^{}*E - A*(C^r-B^r)", r - 2, r - 1),
        a.theta()
            .mul(&a.pow(r - 2)?)
            .mul_scalar(&FieldConstant::int(2 * r))
            .sub(&a.pow(r - 1)?.mul(&e))
            .sub(&a.mul(&cr.sub(&br))),
    ));
    // d B = (1/2r) B (E - A^2)
    out.push((
        "theta(B) - B*(E - A^2)/2r".to_string(),
        b.theta().sub(&b.mul(&e.sub(&a2)).mul_scalar(&rr)),
    ));
    // d C = (1/2r) C (E + A^2): the 432^{1/6} prefactor cancels, so this is
    // checked on the reduced series for 1* and on C itself otherwise.
    out.push((
        "theta(C) - C*(E + A^2)/2r".to_string(),
        c_red.theta().sub(&c_red.mul(&e.add(&a2)).mul_scalar(&rr)),
    ));
    // d E = (1/2r) (E^2 - A^4)
    out.push((
        "theta(E) - (E^2 - A^4)/2r".to_string(),
        e.theta().sub(&e.mul(&e).sub(&a2.mul(&a2)).mul_scalar(&rr)),
    ));

    Ok(out
        .into_iter()
        .map(|(n, s)| (n, s.truncate(qo(order_q))))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eisenstein_weights() {
        let e2 = eisenstein(2, 4).unwrap();
        assert_eq!(e2.coeff_q(0), FieldConstant::int(1));
        assert_eq!(e2.coeff_q(1), FieldConstant::int(-24));
        assert_eq!(e2.coeff_q(2), FieldConstant::int(-72));
        assert_eq!(e2.coeff_q(3), FieldConstant::int(-96));
        let e4 = eisenstein(4, 3).unwrap();
        assert_eq!(e4.coeff_q(1), FieldConstant::int(240));
        assert_eq!(e4.coeff_q(2), FieldConstant::int(2160));
        let e6 = eisenstein(6, 2).unwrap();
        assert_eq!(e6.coeff_q(1), FieldConstant::int(-504));
        assert_eq!(eisenstein(8, 2).unwrap_err(), SeriesError::UnsupportedWeight(8));
    }

    #[test]
    fn eta_leading_terms() {
        // eta(tau) = q^{1/24}(1 - q - q^2 + q^5 + ...)
        let e = eta(1, qo(6) + 1);
        assert_eq!(e.coeff(1), FieldConstant::int(1));
        assert_eq!(e.coeff(1 + qo(1)), FieldConstant::int(-1));
        assert_eq!(e.coeff(1 + qo(2)), FieldConstant::int(-1));
        assert_eq!(e.coeff(1 + qo(3)), FieldConstant::int(0));
        assert_eq!(e.coeff(1 + qo(4)), FieldConstant::int(0));
        assert_eq!(e.coeff(1 + qo(5)), FieldConstant::int(1));
    }

    #[test]
    fn eta_quotient_identity() {
        // eta(2tau)/eta(2tau) = 1
        let spec = EtaQuotientSpec::new(&[(2, 1), (2, -1)]);
        let s = eta_quotient(&spec, qo(5)).unwrap();
        assert!(s.sub(&Series::one(qo(5))).is_zero());
    }

    #[test]
    fn discriminant_cusp_form() {
        // eta^24 = q - 24q^2 + 252q^3 - ...
        let spec = EtaQuotientSpec::new(&[(1, 24)]);
        let d = eta_quotient(&spec, qo(4)).unwrap();
        assert_eq!(d.coeff_q(1), FieldConstant::int(1));
        assert_eq!(d.coeff_q(2), FieldConstant::int(-24));
        assert_eq!(d.coeff_q(3), FieldConstant::int(252));
    }

    #[test]
    fn fourth_root_of_e4() {
        let e4 = eisenstein(4, 3).unwrap();
        let r = e4.nth_root(4).unwrap();
        assert_eq!(r.coeff_q(0), FieldConstant::int(1));
        assert_eq!(r.coeff_q(1), FieldConstant::int(60));
        // square the square root twice and compare
        let back = r.pow(4).unwrap();
        assert!(back.sub(&e4).is_zero());
    }
}
