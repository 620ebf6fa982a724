//! Reduction of a Picard-Fuchs system to Gauss-Manin connection matrices.
//!
//! Operators live in the algebra generated by theta_i = z_i d/dz_i over the
//! rational function field; normal order keeps coefficients on the left.
//! The commutation rule is theta_i . f(z) = f(z) . theta_i + theta_i(f).
//!
//! `reduce` works with a linear-algebra picture of the left ideal of the
//! Picard-Fuchs operators: all theta-multiples up to the needed total degree
//! are echelonized over the function field (ordered by total degree, then
//! lexicographically), and any word is reduced against that basis.  The
//! surviving monomials form the staircase; the declared basis words are
//! expressed on it and the connection matrices are read off by solving a
//! linear system per basis derivative.

use std::collections::BTreeMap;
use std::fmt;

use crate::exprs::Expr;
use crate::geometry::Geometry;
use crate::linalg::{self, Matrix};
use crate::poly::Var;
use crate::scalar::ExactError;
use crate::{Coeff, Mat, RatFun};

/// theta-monomial: index -> positive exponent.
pub type ThetaMono = BTreeMap<usize, u32>;

pub fn mono_degree(m: &ThetaMono) -> u32 {
    m.values().sum()
}

/// Degree-then-lex order used for leading monomials.
pub fn mono_cmp(a: &ThetaMono, b: &ThetaMono, nvars: usize) -> std::cmp::Ordering {
    mono_degree(a).cmp(&mono_degree(b)).then_with(|| {
        for i in 0..nvars {
            let ea = a.get(&i).copied().unwrap_or(0);
            let eb = b.get(&i).copied().unwrap_or(0);
            match ea.cmp(&eb) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum GmError {
    /// Reduction lacked a rewrite rule or exceeded the degree bound.
    ReductionStuck(String),
    /// The staircase size disagrees with the declared Betti number.
    BasisMismatch { expected: usize, found: usize },
    /// det S = 0 identically.
    SingularGauge,
    Exact(ExactError),
}

impl fmt::Display for GmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GmError::ReductionStuck(m) => write!(f, "reduction stuck: {m}"),
            GmError::BasisMismatch { expected, found } => {
                write!(f, "staircase has {found} monomials, basis declares {expected}")
            }
            GmError::SingularGauge => write!(f, "gauge matrix is singular"),
            GmError::Exact(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for GmError {}

impl From<ExactError> for GmError {
    fn from(e: ExactError) -> Self {
        GmError::Exact(e)
    }
}

/// Normal-ordered operator: sum of coefficient * theta-monomial terms.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorWord {
    terms: BTreeMap<ThetaMono, RatFun>,
}

impl OperatorWord {
    pub fn zero() -> Self {
        OperatorWord { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::coefficient(RatFun::one())
    }

    pub fn coefficient(f: RatFun) -> Self {
        let mut terms = BTreeMap::new();
        if !f.is_zero() {
            terms.insert(ThetaMono::new(), f);
        }
        OperatorWord { terms }
    }

    pub fn theta(index: usize) -> Self {
        let mut m = ThetaMono::new();
        m.insert(index, 1);
        let mut terms = BTreeMap::new();
        terms.insert(m, RatFun::one());
        OperatorWord { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ThetaMono, &RatFun)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(mono_degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: ThetaMono, f: RatFun) {
        if f.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, f);
            }
            Some(old) => {
                let s = old.add(&f);
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (m, f) in &other.terms {
            r.add_term(m.clone(), f.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        OperatorWord {
            terms: self.terms.iter().map(|(m, f)| (m.clone(), f.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, f: &RatFun) -> Self {
        if f.is_zero() {
            return Self::zero();
        }
        OperatorWord {
            terms: self.terms.iter().map(|(m, g)| (m.clone(), g.mul(f))).collect(),
        }
    }

    /// Normal-ordered product using
    /// theta^a . g = sum_k prod_i C(a_i, k_i) theta^k(g) theta^{a-k}.
    pub fn mul(&self, other: &Self, theta_vars: &[Var]) -> Self {
        let mut out = Self::zero();
        for (a, f) in &self.terms {
            for (b, g) in &other.terms {
                for (k, coeff) in lower_sets(a) {
                    let mut gg = g.clone();
                    for (i, e) in &k {
                        let v = &theta_vars[*i];
                        for _ in 0..*e {
                            gg = gg.theta(v);
                        }
                    }
                    if gg.is_zero() {
                        continue;
                    }
                    let mut mono = b.clone();
                    for (i, e) in a {
                        let rem = e - k.get(i).copied().unwrap_or(0);
                        if rem > 0 {
                            *mono.entry(*i).or_insert(0) += rem;
                        }
                    }
                    out.add_term(mono, f.mul(&gg).mul_scalar(&Coeff::int(coeff)));
                }
            }
        }
        out
    }

    pub fn leading(&self, nvars: usize) -> Option<(&ThetaMono, &RatFun)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| mono_cmp(a, b, nvars))
    }
}

/// All componentwise-lower multisets k <= a with binomial weights
/// prod_i C(a_i, k_i).
fn lower_sets(a: &ThetaMono) -> Vec<(ThetaMono, i64)> {
    let mut out: Vec<(ThetaMono, i64)> = vec![(ThetaMono::new(), 1)];
    for (i, e) in a {
        let mut next = Vec::new();
        for (m, c) in &out {
            for k in 0..=*e {
                let mut mm = m.clone();
                if k > 0 {
                    mm.insert(*i, k);
                }
                next.push((mm, c * binom(*e, k)));
            }
        }
        out = next;
    }
    out
}

fn binom(n: u32, k: u32) -> i64 {
    let mut r = 1i64;
    for i in 0..k {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

impl fmt::Display for OperatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*")?;
                let mut inner_first = true;
                for (i, e) in m {
                    if !inner_first {
                        write!(f, "*")?;
                    }
                    inner_first = false;
                    if *e == 1 {
                        write!(f, "theta{}", i + 1)?;
                    } else {
                        write!(f, "theta{}^{}", i + 1, e)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Evaluate a parsed expression as an operator; `theta_names[i]` names the
/// i-th logarithmic derivative, anything else is a coefficient variable.
pub fn eval_operator(
    expr: &Expr,
    theta_names: &[String],
    theta_vars: &[Var],
) -> Result<OperatorWord, String> {
    match expr {
        Expr::Int(v) => Ok(OperatorWord::coefficient(RatFun::int(*v))),
        Expr::Var(n) => {
            if let Some(i) = theta_names.iter().position(|t| t == n) {
                Ok(OperatorWord::theta(i))
            } else {
                Ok(OperatorWord::coefficient(RatFun::var(n)))
            }
        }
        Expr::Neg(a) => Ok(eval_operator(a, theta_names, theta_vars)?.neg()),
        Expr::Add(a, b) => Ok(eval_operator(a, theta_names, theta_vars)?
            .add(&eval_operator(b, theta_names, theta_vars)?)),
        Expr::Sub(a, b) => Ok(eval_operator(a, theta_names, theta_vars)?
            .sub(&eval_operator(b, theta_names, theta_vars)?)),
        Expr::Mul(a, b) => Ok(eval_operator(a, theta_names, theta_vars)?
            .mul(&eval_operator(b, theta_names, theta_vars)?, theta_vars)),
        Expr::Div(a, b) => {
            let num = eval_operator(a, theta_names, theta_vars)?;
            let den = eval_operator(b, theta_names, theta_vars)?;
            let dterm = den
                .terms
                .iter()
                .next()
                .filter(|(m, _)| m.is_empty() && den.terms.len() == 1)
                .map(|(_, f)| f.clone())
                .ok_or("operator division only by coefficient expressions")?;
            Ok(num.scale(&dterm.recip().map_err(|e| e.to_string())?))
        }
        Expr::Pow(a, e) => {
            if *e < 0 {
                return Err("negative operator powers are not defined".into());
            }
            let base = eval_operator(a, theta_names, theta_vars)?;
            let mut acc = OperatorWord::one();
            for _ in 0..*e {
                acc = acc.mul(&base, theta_vars);
            }
            Ok(acc)
        }
    }
}

/// Echelonized picture of the PF left ideal up to a degree bound.
pub struct ReductionBasis {
    nvars: usize,
    rows: Vec<OperatorWord>,
    pub staircase: Vec<ThetaMono>,
    degree: u32,
}

impl ReductionBasis {
    /// Echelonize all theta-multiples of the PF operators up to `degree`.
    pub fn build(geom: &Geometry, degree: u32) -> Result<Self, GmError> {
        let nvars = geom.z_vars.len();
        let theta_vars: Vec<Var> = geom.z_vars.iter().map(|v| Var::new(v)).collect();
        let mut basis = ReductionBasis { nvars, rows: Vec::new(), staircase: Vec::new(), degree };
        for op in &geom.pf {
            let d0 = op.total_degree();
            if d0 > degree {
                continue;
            }
            for gamma in monomials_up_to(nvars, degree - d0) {
                let mut mult = OperatorWord::zero();
                mult.add_term(gamma, RatFun::one());
                let row = mult.mul(op, &theta_vars);
                basis.insert(row);
            }
        }
        let leads: Vec<ThetaMono> = basis
            .rows
            .iter()
            .filter_map(|r| r.leading(nvars).map(|(m, _)| m.clone()))
            .collect();
        let mut staircase: Vec<ThetaMono> = monomials_up_to(nvars, degree)
            .into_iter()
            .filter(|m| !leads.contains(m))
            .collect();
        staircase.sort_by(|a, b| mono_cmp(a, b, nvars));
        basis.staircase = staircase;
        Ok(basis)
    }

    fn insert(&mut self, mut row: OperatorWord) {
        loop {
            let Some((lead, lc)) = row.leading(self.nvars).map(|(m, c)| (m.clone(), c.clone()))
            else {
                return; // reduced to zero
            };
            match self
                .rows
                .iter()
                .position(|r| r.leading(self.nvars).map(|(m, _)| m) == Some(&lead))
            {
                Some(i) => {
                    let pivot = self.rows[i].clone();
                    // pivot is monic in its lead
                    row = row.sub(&pivot.scale(&lc));
                }
                None => {
                    let monic = row.scale(&lc.recip().expect("nonzero lead"));
                    // back-reduce existing rows by the new pivot
                    for r in &mut self.rows {
                        if let Some(c) = r.terms.get(&lead).cloned() {
                            *r = r.sub(&monic.scale(&c));
                        }
                    }
                    self.rows.push(monic);
                    return;
                }
            }
        }
    }

    /// Reduce a word to staircase coordinates.
    pub fn reduce_word(&self, w: &OperatorWord) -> Result<BTreeMap<ThetaMono, RatFun>, GmError> {
        if w.total_degree() > self.degree {
            return Err(GmError::ReductionStuck(format!(
                "word of degree {} exceeds bound {}",
                w.total_degree(),
                self.degree
            )));
        }
        let mut w = w.clone();
        let mut guard = 0usize;
        loop {
            guard += 1;
            if guard > 10_000 {
                return Err(GmError::ReductionStuck("iteration bound exceeded".into()));
            }
            let mut fired = false;
            // find the greatest reducible monomial
            let mut target: Option<(ThetaMono, RatFun, usize)> = None;
            for (m, c) in &w.terms {
                if let Some(i) = self
                    .rows
                    .iter()
                    .position(|r| r.leading(self.nvars).map(|(lm, _)| lm) == Some(m))
                {
                    let better = match &target {
                        None => true,
                        Some((tm, _, _)) => mono_cmp(m, tm, self.nvars) == std::cmp::Ordering::Greater,
                    };
                    if better {
                        target = Some((m.clone(), c.clone(), i));
                    }
                }
            }
            if let Some((_, c, i)) = target {
                w = w.sub(&self.rows[i].scale(&c));
                fired = true;
            }
            if !fired {
                break;
            }
        }
        for (m, _) in w.iter() {
            if !self.staircase.contains(m) {
                return Err(GmError::ReductionStuck(format!(
                    "monomial of degree {} not reducible and not in staircase",
                    mono_degree(m)
                )));
            }
        }
        Ok(w.terms)
    }
}

fn monomials_up_to(nvars: usize, degree: u32) -> Vec<ThetaMono> {
    let mut out = vec![ThetaMono::new()];
    for i in 0..nvars {
        let mut next = Vec::new();
        for m in &out {
            let used = mono_degree(m);
            for e in 0..=(degree - used.min(degree)) {
                let mut mm = m.clone();
                if e > 0 {
                    mm.insert(i, e);
                }
                next.push(mm);
            }
        }
        out = next;
    }
    out.retain(|m| mono_degree(m) <= degree);
    out
}

/// Connection matrix in one theta-direction: nabla_{theta_i} omega = A_i omega.
#[derive(Debug, Clone)]
pub struct ConnectionMatrix {
    pub direction: usize,
    pub entries: Mat,
}

/// Staircase coordinates of the declared basis words, as rows.
pub fn basis_on_staircase(
    geom: &Geometry,
    basis: &ReductionBasis,
) -> Result<Vec<BTreeMap<ThetaMono, RatFun>>, GmError> {
    geom.basis
        .iter()
        .map(|(pref, word)| {
            let coords = basis.reduce_word(word)?;
            let mut scaled = BTreeMap::new();
            for (m, c) in coords {
                let v = c.mul(pref);
                if !v.is_zero() {
                    scaled.insert(m, v);
                }
            }
            Ok(scaled)
        })
        .collect()
}

/// Compute the connection matrices of a geometry in its declared basis.
pub fn reduce(geom: &Geometry) -> Result<Vec<ConnectionMatrix>, GmError> {
    let nvars = geom.z_vars.len();
    let theta_vars: Vec<Var> = geom.z_vars.iter().map(|v| Var::new(v)).collect();
    let b_n = geom.basis.len();
    let max_word = geom
        .basis
        .iter()
        .map(|(_, w)| w.total_degree())
        .max()
        .unwrap_or(0);
    let basis = ReductionBasis::build(geom, max_word + 1)?;
    if basis.staircase.len() != b_n {
        return Err(GmError::BasisMismatch { expected: b_n, found: basis.staircase.len() });
    }

    let coords = basis_on_staircase(geom, &basis)?;
    // matrix with columns = basis vectors on the staircase
    let stair = &basis.staircase;
    let coord_mat: Mat = stair
        .iter()
        .map(|m| {
            coords
                .iter()
                .map(|c| c.get(m).cloned().unwrap_or_else(RatFun::zero))
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    for dir in 0..nvars {
        let mut rows: Mat = Vec::with_capacity(b_n);
        for (pref, word) in &geom.basis {
            // nabla_theta (pref * word) = theta(pref) * word + pref * theta.word
            let theta_op = OperatorWord::theta(dir);
            let dword = theta_op.mul(word, &theta_vars);
            let mut combo = basis.reduce_word(&dword)?;
            for c in combo.values_mut() {
                *c = c.mul(pref);
            }
            let tp = pref.theta(&theta_vars[dir]);
            if !tp.is_zero() {
                for (m, c) in basis.reduce_word(word)? {
                    let v = c.mul(&tp);
                    let cur = combo.remove(&m).unwrap_or_else(RatFun::zero).add(&v);
                    if !cur.is_zero() {
                        combo.insert(m, cur);
                    }
                }
            }
            let target: Vec<RatFun> = stair
                .iter()
                .map(|m| combo.get(m).cloned().unwrap_or_else(RatFun::zero))
                .collect();
            match linalg::solve_linear(&coord_mat, &target)? {
                linalg::LinearSolution::Unique(x) => rows.push(x),
                _ => {
                    return Err(GmError::ReductionStuck(
                        "basis words do not span the staircase".into(),
                    ))
                }
            }
        }
        out.push(ConnectionMatrix { direction: dir, entries: rows });
    }
    Ok(out)
}

/// Flatness residual theta_i(A_j) - theta_j(A_i) + A_j A_i - A_i A_j.
pub fn flatness_residual(
    geom: &Geometry,
    ai: &ConnectionMatrix,
    aj: &ConnectionMatrix,
) -> Matrix<Coeff> {
    let vi = Var::new(&geom.z_vars[ai.direction]);
    let vj = Var::new(&geom.z_vars[aj.direction]);
    let di: Mat = aj.entries.iter().map(|r| r.iter().map(|e| e.theta(&vi)).collect()).collect();
    let dj: Mat = ai.entries.iter().map(|r| r.iter().map(|e| e.theta(&vj)).collect()).collect();
    let comm = linalg::mat_sub(
        &linalg::mat_mul(&aj.entries, &ai.entries),
        &linalg::mat_mul(&ai.entries, &aj.entries),
    );
    linalg::mat_add(&linalg::mat_sub(&di, &dj), &comm)
}

/// The gauge-transformed connection data in the enhanced frame omega_t = S omega.
pub struct GaugedConnection {
    /// S A_i S^{-1} for each theta-direction.
    pub theta_mats: Vec<Mat>,
    /// (dS/dp) S^{-1} for each independent gauge parameter p.
    pub param_mats: Vec<(String, Mat)>,
}

/// Build the gauge-transformed action; errors if det S = 0 identically.
pub fn gauge_transform(
    conn: &[ConnectionMatrix],
    s: &Mat,
    params: &[String],
) -> Result<GaugedConnection, GmError> {
    let s_inv = linalg::invert(s).map_err(|_| GmError::SingularGauge)?;
    let theta_mats = conn
        .iter()
        .map(|a| linalg::mat_mul(&linalg::mat_mul(s, &a.entries), &s_inv))
        .collect();
    let mut param_mats = Vec::new();
    for p in params {
        let v = Var::new(p);
        let ds: Mat = s.iter().map(|r| r.iter().map(|e| e.partial(&v)).collect()).collect();
        param_mats.push((p.clone(), linalg::mat_mul(&ds, &s_inv)));
    }
    Ok(GaugedConnection { theta_mats, param_mats })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_ordering_commutation() {
        // theta . z = z . theta + z
        let theta_vars = vec![Var::new("z")];
        let t = OperatorWord::theta(0);
        let z = OperatorWord::coefficient(RatFun::var("z"));
        let p = t.mul(&z, &theta_vars);
        let mut expect = OperatorWord::zero();
        let mut m = ThetaMono::new();
        m.insert(0, 1);
        expect.add_term(m, RatFun::var("z"));
        expect.add_term(ThetaMono::new(), RatFun::var("z"));
        assert_eq!(p, expect);
    }

    #[test]
    fn theta_squared_on_coefficient() {
        // theta^2 . f = f theta^2 + 2 theta(f) theta + theta^2(f), f = z^3
        let theta_vars = vec![Var::new("z")];
        let mut t2 = OperatorWord::zero();
        let mut m = ThetaMono::new();
        m.insert(0, 2);
        t2.add_term(m.clone(), RatFun::one());
        let f = OperatorWord::coefficient(RatFun::var("z").pow(3).unwrap());
        let p = t2.mul(&f, &theta_vars);
        let z3 = RatFun::var("z").pow(3).unwrap();
        let mut expect = OperatorWord::zero();
        expect.add_term(m, z3.clone());
        let mut m1 = ThetaMono::new();
        m1.insert(0, 1);
        expect.add_term(m1, z3.mul_scalar(&Coeff::int(6)));
        expect.add_term(ThetaMono::new(), z3.mul_scalar(&Coeff::int(9)));
        assert_eq!(p, expect);
    }
}
