//! Finitely presented graded differential rings.
//!
//! Two families of presentations are built in:
//!
//! - the quasi-modular ring C[E2, E4, E6] with the derivation triple
//!   (tau, d, W): tau acts by the Ramanujan relations, d = -12 d/dE2,
//!   W multiplies a weight-k form by k;
//! - the level rings R_N = C[alpha, A, B, C, E]/(B^r - (1-alpha)A^r,
//!   C^r - alpha A^r) for N in {1*, 2, 3}, with the analogous triple
//!   (tau, F, H), F = -2r d/dE.
//!
//! Elements are kept in normal form: powers B^r and C^r are rewritten to
//! (1-alpha)A^r and alpha A^r, so every element has B- and C-degree < r.
//! Realization into q-expansions substitutes the level's weight-one forms.

use std::collections::BTreeMap;
use std::fmt;

use crate::poly::{Monomial, Var};
use crate::qseries::{self, Level, ScaledSeries};
use crate::scalar::{FieldConstant, Rat};
use crate::series::SeriesError;
use crate::{Coeff, Poly, Series};

#[derive(Debug, Clone, PartialEq)]
pub enum RingError {
    UnknownDerivation(String),
    UnknownGenerator(String),
    /// A commutator is not a constant combination of the given derivations.
    NotClosed(String),
    Series(SeriesError),
}

impl fmt::Display for RingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingError::UnknownDerivation(n) => write!(f, "unknown derivation {n}"),
            RingError::UnknownGenerator(n) => write!(f, "unknown generator {n}"),
            RingError::NotClosed(m) => write!(f, "derivations do not close: {m}"),
            RingError::Series(e) => write!(f, "series error: {e}"),
        }
    }
}

impl std::error::Error for RingError {}

impl From<SeriesError> for RingError {
    fn from(e: SeriesError) -> Self {
        RingError::Series(e)
    }
}

/// A rewrite rule gen^power -> replacement.
#[derive(Debug, Clone)]
struct Rewrite {
    var: Var,
    power: u32,
    replacement: Poly,
}

/// Generators with weights, relations as directed rewrites, named derivations
/// given by their images on the generators.
#[derive(Debug, Clone)]
pub struct RingPresentation {
    pub name: String,
    generators: Vec<(String, i64)>,
    rewrites: Vec<Rewrite>,
    derivations: BTreeMap<String, Vec<Poly>>,
}

impl RingPresentation {
    pub fn generators(&self) -> &[(String, i64)] {
        &self.generators
    }

    pub fn derivation_names(&self) -> Vec<String> {
        self.derivations.keys().cloned().collect()
    }

    pub fn gen_weight(&self, name: &str) -> Option<i64> {
        self.generators.iter().find(|(n, _)| n == name).map(|(_, w)| *w)
    }

    pub fn gen_poly(&self, name: &str) -> Result<Poly, RingError> {
        if self.gen_weight(name).is_none() {
            return Err(RingError::UnknownGenerator(name.to_string()));
        }
        Ok(Poly::var(name))
    }

    /// Reduce to normal form under the relation rewrites.
    pub fn normal_form(&self, p: &Poly) -> Poly {
        let mut p = p.clone();
        'outer: loop {
            for rw in &self.rewrites {
                let hit = p
                    .iter()
                    .find(|(m, _)| m.exponent(&rw.var) >= rw.power)
                    .map(|(m, c)| (m.clone(), c.clone()));
                if let Some((m, c)) = hit {
                    let reduced = m
                        .try_div(&Monomial::var(rw.var.clone()).pow(rw.power))
                        .expect("exponent checked");
                    let patch = rw.replacement.mul_monomial(&reduced, &c);
                    p.add_term(m, Coeff::int(0) - c);
                    p = p.add(&patch);
                    continue 'outer;
                }
            }
            return p;
        }
    }

    /// Weight of a homogeneous element; None for 0 or mixed weights.
    pub fn weight(&self, p: &Poly) -> Option<i64> {
        let mut seen: Option<i64> = None;
        for (m, _) in p.iter() {
            let mut w = 0i64;
            for v in m.vars() {
                let gw = self.gen_weight(v.name())?;
                w += gw * m.exponent(v) as i64;
            }
            match seen {
                None => seen = Some(w),
                Some(s) if s == w => {}
                _ => return None,
            }
        }
        seen
    }

    /// Apply the named derivation by the Leibniz rule and reduce.
    pub fn derive(&self, p: &Poly, name: &str) -> Result<Poly, RingError> {
        let images = self
            .derivations
            .get(name)
            .ok_or_else(|| RingError::UnknownDerivation(name.to_string()))?;
        let mut out = Poly::zero();
        for (m, c) in p.iter() {
            for (gi, (gname, _)) in self.generators.iter().enumerate() {
                let v = Var::new(gname);
                let e = m.exponent(&v);
                if e == 0 {
                    continue;
                }
                let rest = m
                    .try_div(&Monomial::var(v.clone()))
                    .expect("positive exponent");
                let factor = c.clone() * Coeff::int(e as i64);
                out = out.add(&images[gi].mul_monomial(&rest, &factor));
            }
        }
        Ok(self.normal_form(&out))
    }

    /// Images of [D_a, D_b] on all generators.
    pub fn commutator_on_generators(
        &self,
        a: &str,
        b: &str,
    ) -> Result<Vec<Poly>, RingError> {
        let mut out = Vec::new();
        for (g, _) in &self.generators {
            let gp = Poly::var(g);
            let ab = self.derive(&self.derive(&gp, b)?, a)?;
            let ba = self.derive(&self.derive(&gp, a)?, b)?;
            out.push(ab.sub(&ba));
        }
        Ok(out)
    }

    /// Express a derivation (given by its generator images) as a constant
    /// combination of the named derivations, by matching coefficients.
    pub fn express_in_span(
        &self,
        images: &[Poly],
        names: &[String],
    ) -> Result<Vec<Coeff>, RingError> {
        let span: Vec<Vec<Poly>> = names
            .iter()
            .map(|n| {
                self.generators
                    .iter()
                    .map(|(g, _)| self.derive(&Poly::var(g), n))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut rows: Vec<Vec<Coeff>> = Vec::new();
        let mut rhs: Vec<Coeff> = Vec::new();
        for (gi, img) in images.iter().enumerate() {
            let mut monomials: Vec<Monomial> = img.iter().map(|(m, _)| m.clone()).collect();
            for d in &span {
                monomials.extend(d[gi].iter().map(|(m, _)| m.clone()));
            }
            monomials.sort();
            monomials.dedup();
            for m in monomials {
                let row: Vec<Coeff> = span
                    .iter()
                    .map(|d| {
                        d[gi]
                            .iter()
                            .find(|(mm, _)| *mm == &m)
                            .map(|(_, c)| c.clone())
                            .unwrap_or_else(|| Coeff::int(0))
                    })
                    .collect();
                let r = img
                    .iter()
                    .find(|(mm, _)| *mm == &m)
                    .map(|(_, c)| c.clone())
                    .unwrap_or_else(|| Coeff::int(0));
                rows.push(row);
                rhs.push(r);
            }
        }
        crate::linalg::solve_const(&rows, &rhs)
            .ok_or_else(|| RingError::NotClosed("no constant combination matches".into()))
    }

    /// Structure constants of the commutators of the named derivations:
    /// [D_i, D_j] = sum_k table[(i,j)][k] D_k, verified on all monomials of
    /// weight <= `check_weight`.
    pub fn commutator_table(
        &self,
        names: &[String],
        check_weight: i64,
    ) -> Result<CommutatorTable, RingError> {
        let mut table = BTreeMap::new();
        for i in 0..names.len() {
            for j in 0..names.len() {
                if i == j {
                    continue;
                }
                let images = self.commutator_on_generators(&names[i], &names[j])?;
                let coeffs = self.express_in_span(&images, names)?;
                table.insert((i, j), coeffs);
            }
        }
        // verify on a monomial slice: Leibniz guarantees it, but the check
        // pins the table against implementation drift
        for m in self.monomials_up_to_weight(check_weight) {
            let p = Poly::monomial(m, Coeff::int(1));
            for i in 0..names.len() {
                for j in 0..names.len() {
                    if i == j {
                        continue;
                    }
                    let lhs = self
                        .derive(&self.derive(&p, &names[j])?, &names[i])?
                        .sub(&self.derive(&self.derive(&p, &names[i])?, &names[j])?);
                    let mut rhs = Poly::zero();
                    for (k, c) in table[&(i, j)].iter().enumerate() {
                        rhs = rhs.add(&self.derive(&p, &names[k])?.mul_scalar(c));
                    }
                    if lhs != rhs {
                        return Err(RingError::NotClosed(format!(
                            "[{}, {}] fails on monomial {}",
                            names[i], names[j], p
                        )));
                    }
                }
            }
        }
        Ok(CommutatorTable { names: names.to_vec(), table })
    }

    /// All normal-form monomials of weight <= bound (exponents of relation
    /// variables stay below the rewrite power).
    pub fn monomials_up_to_weight(&self, bound: i64) -> Vec<Monomial> {
        let mut out = vec![Monomial::one()];
        for (g, w) in &self.generators {
            let cap = self
                .rewrites
                .iter()
                .find(|rw| rw.var.name() == g)
                .map(|rw| rw.power - 1);
            let mut next = Vec::new();
            for m in &out {
                let mut e = 0u32;
                loop {
                    if let Some(cap) = cap {
                        if e > cap {
                            break;
                        }
                    }
                    let mm = if e == 0 {
                        m.clone()
                    } else {
                        m.mul(&Monomial::var(Var::new(g)).pow(e))
                    };
                    // weight-0 generators are capped like relation variables
                    if *w == 0 && e > 2 {
                        break;
                    }
                    let wsum: i64 = mm
                        .vars()
                        .map(|v| {
                            self.gen_weight(v.name()).unwrap_or(0) * mm.exponent(v) as i64
                        })
                        .sum();
                    if wsum > bound {
                        break;
                    }
                    next.push(mm);
                    e += 1;
                }
            }
            out = next;
        }
        out
    }
}

/// Structure constants [D_i, D_j] = sum_k c^k_{ij} D_k.
#[derive(Debug, Clone)]
pub struct CommutatorTable {
    pub names: Vec<String>,
    pub table: BTreeMap<(usize, usize), Vec<Coeff>>,
}

impl CommutatorTable {
    /// The coefficient vector of [a, b].
    pub fn bracket(&self, a: &str, b: &str) -> Option<&Vec<Coeff>> {
        let i = self.names.iter().position(|n| n == a)?;
        let j = self.names.iter().position(|n| n == b)?;
        self.table.get(&(i, j))
    }

    /// Check [h,e] = 2e, [h,f] = -2f, [e,f] = h.
    pub fn is_sl2(&self, e: &str, f: &str, h: &str) -> bool {
        let unit = |name: &str, scale: i64| -> Option<Vec<Coeff>> {
            let idx = self.names.iter().position(|n| n == name)?;
            let mut v = vec![Coeff::int(0); self.names.len()];
            v[idx] = Coeff::int(scale);
            Some(v)
        };
        matches!(
            (self.bracket(h, e), unit(e, 2)),
            (Some(a), Some(b)) if *a == b
        ) && matches!(
            (self.bracket(h, f), unit(f, -2)),
            (Some(a), Some(b)) if *a == b
        ) && matches!(
            (self.bracket(e, f), unit(h, 1)),
            (Some(a), Some(b)) if *a == b
        )
    }
}

/// C[E2, E4, E6] with (tau, d, W).
pub fn level_one_ring() -> RingPresentation {
    let e2 = Poly::var("E2");
    let e4 = Poly::var("E4");
    let e6 = Poly::var("E6");
    let mut derivations = BTreeMap::new();
    derivations.insert(
        "tau".to_string(),
        vec![
            // (E2^2 - E4)/12
            e2.mul(&e2).sub(&e4).mul_scalar(&Coeff::ratio(1, 12)),
            // (E4 E2 - E6)/3
            e4.mul(&e2).sub(&e6).mul_scalar(&Coeff::ratio(1, 3)),
            // (E6 E2 - E4^2)/2
            e6.mul(&e2).sub(&e4.mul(&e4)).mul_scalar(&Coeff::ratio(1, 2)),
        ],
    );
    derivations.insert(
        "d".to_string(),
        vec![Poly::int(-12), Poly::zero(), Poly::zero()],
    );
    derivations.insert(
        "W".to_string(),
        vec![
            e2.mul_scalar(&Coeff::int(2)),
            e4.mul_scalar(&Coeff::int(4)),
            e6.mul_scalar(&Coeff::int(6)),
        ],
    );
    RingPresentation {
        name: "quasimodular-1".to_string(),
        generators: vec![
            ("E2".to_string(), 2),
            ("E4".to_string(), 4),
            ("E6".to_string(), 6),
        ],
        rewrites: vec![],
        derivations,
    }
}

/// R_N = C[alpha, A, B, C, E]/(B^r - (1-alpha)A^r, C^r - alpha A^r) with
/// (tau, H, F).
pub fn level_ring(level: Level) -> RingPresentation {
    let r = level.r();
    let alpha = Poly::var("alpha");
    let a = Poly::var("A");
    let b = Poly::var("B");
    let c = Poly::var("C");
    let e = Poly::var("E");
    let one = Poly::one();
    let inv2r = Coeff::rational(Rat::new(1.into(), (2 * r).into()));

    let mut derivations = BTreeMap::new();
    // tau alpha = alpha(1-alpha)A^2
    // tau A = (1/2r) A (E + (C^r - B^r)/A^{r-2}) = (1/2r)(AE + (2 alpha - 1)A^3)
    //         after substituting the relations
    // tau B = (1/2r) B (E - A^2)
    // tau C = (1/2r) C (E + A^2)
    // tau E = (1/2r) (E^2 - A^4)
    derivations.insert(
        "tau".to_string(),
        vec![
            alpha.mul(&one.sub(&alpha)).mul(&a.mul(&a)),
            a.mul(&e)
                .add(
                    &alpha
                        .mul_scalar(&Coeff::int(2))
                        .sub(&one)
                        .mul(&a.pow(3)),
                )
                .mul_scalar(&inv2r),
            b.mul(&e.sub(&a.mul(&a))).mul_scalar(&inv2r),
            c.mul(&e.add(&a.mul(&a))).mul_scalar(&inv2r),
            e.mul(&e).sub(&a.pow(4)).mul_scalar(&inv2r),
        ],
    );
    derivations.insert(
        "H".to_string(),
        vec![
            Poly::zero(),
            a.clone(),
            b.clone(),
            c.clone(),
            e.mul_scalar(&Coeff::int(2)),
        ],
    );
    derivations.insert(
        "F".to_string(),
        vec![
            Poly::zero(),
            Poly::zero(),
            Poly::zero(),
            Poly::zero(),
            Poly::int(-2 * r),
        ],
    );
    RingPresentation {
        name: format!("R_{}", level.name()),
        generators: vec![
            ("alpha".to_string(), 0),
            ("A".to_string(), 1),
            ("B".to_string(), 1),
            ("C".to_string(), 1),
            ("E".to_string(), 2),
        ],
        rewrites: vec![
            Rewrite {
                var: Var::new("B"),
                power: r as u32,
                replacement: one.sub(&alpha).mul(&a.pow(r as u32)),
            },
            Rewrite {
                var: Var::new("C"),
                power: r as u32,
                replacement: alpha.mul(&a.pow(r as u32)),
            },
        ],
        derivations,
    }
}

/// Realization of a ring element as q-series, graded by C-degree mod r.
///
/// For levels 2 and 3 the C series lies in the level's field and everything
/// collapses into the single component 0.  For level 1* the component d
/// carries the formal prefactor 432^{d/6}; components are compared
/// separately, which is exact because 432^{d/6} is irrational for
/// 0 < d < 6.
#[derive(Debug, Clone)]
pub struct Realization {
    pub comps: BTreeMap<i64, Series>,
}

impl Realization {
    pub fn is_zero(&self) -> bool {
        self.comps.values().all(|s| s.is_zero())
    }

    pub fn single(&self) -> Option<&Series> {
        if self.comps.len() == 1 {
            self.comps.values().next()
        } else {
            None
        }
    }

    pub fn first_nonzero(&self) -> Option<(i64, i64, Coeff)> {
        for (d, s) in &self.comps {
            if let Some((e, c)) = s.iter().next() {
                return Some((*d, *e, c.clone()));
            }
        }
        None
    }
}

/// Generator q-expansions for a level ring.
pub struct LevelSeries {
    pub alpha: Series,
    pub a: Series,
    pub b: Series,
    pub c: ScaledSeries,
    pub e: Series,
}

pub fn level_series(level: Level, order_q: i64) -> Result<LevelSeries, SeriesError> {
    let forms = qseries::forms_abc(level, order_q)?;
    Ok(LevelSeries {
        alpha: qseries::hauptmodul(level, order_q)?,
        a: forms.a.clone(),
        b: forms.b.clone(),
        c: forms.c.clone(),
        e: qseries::e_series(level, order_q)?,
    })
}

/// Substitute the level's q-expansions into a normal-form element of R_N.
pub fn realize_q(
    pres: &RingPresentation,
    el: &Poly,
    level: Level,
    order_q: i64,
) -> Result<Realization, RingError> {
    let el = pres.normal_form(el);
    let gens = level_series(level, order_q + 2)?;
    let r = level.r();
    let ord = qseries::qo(order_q);
    let mut comps: BTreeMap<i64, Series> = BTreeMap::new();
    for (m, coeff) in el.iter() {
        let da = m.exponent(&Var::new("alpha")) as i64;
        let db = m.exponent(&Var::new("A")) as i64;
        let dbb = m.exponent(&Var::new("B")) as i64;
        let dc = m.exponent(&Var::new("C")) as i64;
        let de = m.exponent(&Var::new("E")) as i64;
        let mut s = Series::monomial(0, coeff.clone(), qseries::qo(order_q + 2));
        s = s.mul(&gens.alpha.pow(da)?);
        s = s.mul(&gens.a.pow(db)?);
        s = s.mul(&gens.b.pow(dbb)?);
        s = s.mul(&gens.e.pow(de)?);
        let key = if gens.c.is_plain() { 0 } else { dc.rem_euclid(r) };
        if dc > 0 {
            if gens.c.is_plain() {
                s = s.mul(&gens.c.series.pow(dc)?);
            } else {
                // collapse full r-th powers of the prefactor into Q
                let whole = dc.div_euclid(r);
                let scale = gens.c.radicand.pow(whole as i32);
                s = s
                    .mul(&gens.c.series.pow(dc)?)
                    .mul_scalar(&FieldConstant::rational(scale));
            }
        }
        let s = s.truncate(ord);
        match comps.remove(&key) {
            None => {
                comps.insert(key, s);
            }
            Some(old) => {
                comps.insert(key, old.add(&s));
            }
        }
    }
    if comps.is_empty() {
        comps.insert(0, Series::zero(ord));
    }
    Ok(Realization { comps })
}

/// Parse an element from a string in the generator names.
pub fn parse_element(pres: &RingPresentation, input: &str) -> Result<Poly, String> {
    let p: Poly = crate::exprs::parse_poly(input)?;
    for v in p.vars() {
        if pres.gen_weight(v.name()).is_none() {
            return Err(format!("unknown generator {}", v.name()));
        }
    }
    Ok(pres.normal_form(&p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramanujan_image_of_e2() {
        let ring = level_one_ring();
        let d = ring.derive(&Poly::var("E2"), "tau").unwrap();
        let expect = parse_element(&ring, "(E2^2 - E4)/12").unwrap();
        assert_eq!(d, expect);
    }

    #[test]
    fn lowering_operator_on_e2_squared() {
        let ring = level_one_ring();
        let d = ring.derive(&parse_element(&ring, "E2^2").unwrap(), "d").unwrap();
        assert_eq!(d, parse_element(&ring, "-24*E2").unwrap());
    }

    #[test]
    fn weight_operator_is_the_grading() {
        let ring = level_one_ring();
        let p = parse_element(&ring, "E4*E6").unwrap();
        let w = ring.derive(&p, "W").unwrap();
        assert_eq!(w, p.mul_scalar(&Coeff::int(10)));
        assert_eq!(ring.weight(&p), Some(10));
    }

    #[test]
    fn commutator_of_tau_and_d_is_weight_on_e4() {
        let ring = level_one_ring();
        let images = ring.commutator_on_generators("tau", "d").unwrap();
        // on E4 (index 1): 4*E4
        assert_eq!(images[1], parse_element(&ring, "4*E4").unwrap());
    }

    #[test]
    fn unknown_derivation_is_an_error() {
        let ring = level_one_ring();
        assert!(matches!(
            ring.derive(&Poly::var("E2"), "nope"),
            Err(RingError::UnknownDerivation(_))
        ));
    }

    #[test]
    fn normal_form_rewrites_high_c_powers() {
        let ring = level_ring(Level::Three);
        let p = parse_element(&ring, "C^3 - alpha*A^3").unwrap();
        assert!(p.is_zero());
        let q = parse_element(&ring, "B^3").unwrap();
        assert_eq!(q, parse_element(&ring, "(1-alpha)*A^3").unwrap());
    }

    #[test]
    fn rewriting_is_confluent_on_mixed_terms() {
        let ring = level_ring(Level::Three);
        // B^3 C^3 reduces the same whichever rule fires first
        let p = crate::exprs::parse_poly::<Coeff>("B^3*C^3").unwrap();
        let nf = ring.normal_form(&p);
        let expect = parse_element(&ring, "(1-alpha)*alpha*A^6").unwrap();
        assert_eq!(nf, expect);
    }
}
