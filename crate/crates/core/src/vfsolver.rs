//! Modular vector fields, Lie(G) vector fields, brackets and the
//! classification of the resulting Gauss-Manin Lie algebra.
//!
//! A vector field R = sum_k i_{z_k} d/dz_k + sum_p i_p d/ds_p acts on the
//! enhanced frame through
//!
//!   nabla_R omega_t = [ sum_k (i_{z_k}/z_k) S A_k S^{-1}
//!                     + sum_p i_p (dS/dp) S^{-1} ] omega_t,
//!
//! so prescribing the right-hand side entrywise is a linear system for the
//! direction coefficients (and any unknown normalizations Y_i appearing in
//! the target), solved exactly over the function field.  Uniqueness is
//! certified by the solver (trivial kernel).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::gaussmanin::{ConnectionMatrix, GaugedConnection};
use crate::geometry::{GaugeMatrix, Geometry, TargetEntry, TargetShape};
use crate::linalg::{self, LinearSolution};
use crate::poly::Var;
use crate::scalar::ExactError;
use crate::{Coeff, RatFun};

#[derive(Debug, Clone, PartialEq)]
pub enum VfError {
    NoSolution { witness_row: usize },
    NonUnique { kernel_dim: usize },
    /// A bracket left the constant span of the given fields.
    NotClosed(String),
    /// The solved flow moves s11, which the gauge normalization set to 1.
    S11NotConstant(String),
    Exact(ExactError),
}

impl fmt::Display for VfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VfError::NoSolution { witness_row } => {
                write!(f, "no solution; inconsistent at equation {witness_row}")
            }
            VfError::NonUnique { kernel_dim } => {
                write!(f, "solution not unique; kernel dimension {kernel_dim}")
            }
            VfError::NotClosed(m) => write!(f, "not closed: {m}"),
            VfError::S11NotConstant(m) => write!(f, "s11 is not constant along the flow: {m}"),
            VfError::Exact(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for VfError {}

impl From<ExactError> for VfError {
    fn from(e: ExactError) -> Self {
        VfError::Exact(e)
    }
}

/// A derivation of the coordinate ring, stored on independent coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub coeffs: BTreeMap<String, RatFun>,
}

impl VectorField {
    pub fn zero() -> Self {
        VectorField { coeffs: BTreeMap::new() }
    }

    pub fn from_components(pairs: &[(&str, RatFun)]) -> Self {
        let mut coeffs = BTreeMap::new();
        for (n, f) in pairs {
            if !f.is_zero() {
                coeffs.insert(n.to_string(), f.clone());
            }
        }
        VectorField { coeffs }
    }

    pub fn component(&self, coord: &str) -> RatFun {
        self.coeffs.get(coord).cloned().unwrap_or_else(RatFun::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|f| f.is_zero())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (k, v) in &other.coeffs {
            let cur = coeffs.remove(k).unwrap_or_else(RatFun::zero).sub(v);
            if !cur.is_zero() {
                coeffs.insert(k.clone(), cur);
            }
        }
        VectorField { coeffs }
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        VectorField {
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), v.mul_scalar(c))).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.sub(&other.scale(&Coeff::int(-1)))
    }

    /// Apply the derivation to a function of the coordinates.
    pub fn apply(&self, f: &RatFun) -> RatFun {
        let mut acc = RatFun::zero();
        for (coord, coeff) in &self.coeffs {
            let d = f.partial(&Var::new(coord));
            if !d.is_zero() {
                acc = acc.add(&coeff.mul(&d));
            }
        }
        acc
    }

    /// Lie bracket [X, Y]^v = X(Y^v) - Y(X^v).
    pub fn bracket(&self, other: &Self) -> Self {
        let mut coords: BTreeSet<String> = self.coeffs.keys().cloned().collect();
        coords.extend(other.coeffs.keys().cloned());
        let mut coeffs = BTreeMap::new();
        for v in coords {
            let xy = self.apply(&other.component(&v));
            let yx = other.apply(&self.component(&v));
            let c = xy.sub(&yx);
            if !c.is_zero() {
                coeffs.insert(v, c);
            }
        }
        VectorField { coeffs }
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (coord, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*d/d{coord}")?;
        }
        Ok(())
    }
}

/// Result of a modular / Lie vector field solve.
#[derive(Debug, Clone)]
pub struct Solved {
    pub field: VectorField,
    /// Values of the target's unknown entries (the Y_i^{-1} slots).
    pub unknowns: BTreeMap<String, RatFun>,
    /// The flow component along s11 before normalization (must vanish).
    pub s11_component: Option<RatFun>,
}

enum Rhs<'a> {
    Shape(&'a TargetShape),
    Constant(&'a [Vec<Coeff>]),
}

/// Assemble and solve the linear system for nabla_R omega_t = target.
fn solve_for_target(
    geom: &Geometry,
    gauge: &GaugeMatrix,
    gauged: &GaugedConnection,
    rhs: Rhs<'_>,
) -> Result<Solved, VfError> {
    let n = gauge.n();
    let nz = geom.z_vars.len();
    let params: Vec<String> = gauge.params.clone();
    let mut unknown_names: Vec<String> = Vec::new();
    if let Rhs::Shape(shape) = &rhs {
        for row in &shape.entries {
            for e in row {
                if let TargetEntry::Unknown(u) = e {
                    if !unknown_names.contains(u) {
                        unknown_names.push(u.clone());
                    }
                }
            }
        }
    }

    let ncols = nz + params.len() + unknown_names.len();
    let mut mat: Vec<Vec<RatFun>> = Vec::with_capacity(n * n);
    let mut b: Vec<RatFun> = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let mut row = Vec::with_capacity(ncols);
            for k in 0..nz {
                row.push(gauged.theta_mats[k][r][c].clone());
            }
            for (_, pm) in &gauged.param_mats {
                row.push(pm[r][c].clone());
            }
            let mut rhs_entry = RatFun::zero();
            let mut unknown_col: Option<usize> = None;
            match &rhs {
                Rhs::Shape(shape) => match &shape.entries[r][c] {
                    TargetEntry::Zero => {}
                    TargetEntry::One => rhs_entry = RatFun::one(),
                    TargetEntry::Unknown(u) => {
                        unknown_col = unknown_names.iter().position(|x| x == u);
                    }
                },
                Rhs::Constant(m) => {
                    rhs_entry = RatFun::constant(m[r][c].clone());
                }
            }
            for (ui, _) in unknown_names.iter().enumerate() {
                if unknown_col == Some(ui) {
                    row.push(RatFun::int(-1));
                } else {
                    row.push(RatFun::zero());
                }
            }
            mat.push(row);
            b.push(rhs_entry);
        }
    }

    let solution = match linalg::solve_linear(&mat, &b)? {
        LinearSolution::Unique(x) => x,
        LinearSolution::NoSolution { witness_row } => {
            return Err(VfError::NoSolution { witness_row })
        }
        LinearSolution::NonUnique { kernel, .. } => {
            return Err(VfError::NonUnique { kernel_dim: kernel.len() })
        }
    };

    // i_{z_k} = z_k * j_k; gauge parameters as-is
    let s11_var = Var::new("s11");
    let one = RatFun::one();
    let normalize = |f: &RatFun| -> Result<RatFun, VfError> {
        if gauge.s11_normalized {
            Ok(f.substitute(&s11_var, &one)?)
        } else {
            Ok(f.clone())
        }
    };

    let mut coeffs = BTreeMap::new();
    for (k, zv) in geom.z_vars.iter().enumerate() {
        let c = normalize(&solution[k])?.mul(&RatFun::var(zv));
        if !c.is_zero() {
            coeffs.insert(zv.clone(), c);
        }
    }
    let mut s11_component = None;
    for (pi, p) in params.iter().enumerate() {
        let c = &solution[nz + pi];
        if gauge.s11_normalized && p == "s11" {
            s11_component = Some(c.clone());
            if !c.is_zero() {
                return Err(VfError::S11NotConstant(format!("{c}")));
            }
            continue;
        }
        let c = normalize(c)?;
        if !c.is_zero() {
            coeffs.insert(p.clone(), c);
        }
    }
    let mut unknowns = BTreeMap::new();
    for (ui, u) in unknown_names.iter().enumerate() {
        unknowns.insert(u.clone(), normalize(&solution[nz + params.len() + ui])?);
    }

    Ok(Solved { field: VectorField { coeffs }, unknowns, s11_component })
}

/// Solve for the modular vector field with the given target shape.
pub fn solve_modular(
    geom: &Geometry,
    gauge: &GaugeMatrix,
    gauged: &GaugedConnection,
    shape: &TargetShape,
) -> Result<Solved, VfError> {
    solve_for_target(geom, gauge, gauged, Rhs::Shape(shape))
}

/// Solve nabla_R omega_t = g omega_t for a constant matrix g in Lie(G).
pub fn solve_lie(
    geom: &Geometry,
    gauge: &GaugeMatrix,
    gauged: &GaugedConnection,
    g: &[Vec<Coeff>],
) -> Result<Solved, VfError> {
    solve_for_target(geom, gauge, gauged, Rhs::Constant(g))
}

/// Jacobi residual [X,[Y,Z]] + [Y,[Z,X]] + [Z,[X,Y]].
pub fn jacobi_residual(x: &VectorField, y: &VectorField, z: &VectorField) -> VectorField {
    x.bracket(&y.bracket(z))
        .add(&y.bracket(&z.bracket(x)))
        .add(&z.bracket(&x.bracket(y)))
}

// ---------------------------------------------------------------------------
// structure constants and classification
// ---------------------------------------------------------------------------

/// Write `target` as a constant combination of `fields` by matching
/// polynomial coefficients after clearing denominators coordinate by
/// coordinate.
pub fn express_const_combination(
    fields: &[VectorField],
    target: &VectorField,
) -> Option<Vec<Coeff>> {
    let mut coords: BTreeSet<String> = target.coeffs.keys().cloned().collect();
    for f in fields {
        coords.extend(f.coeffs.keys().cloned());
    }
    let mut rows: Vec<Vec<Coeff>> = Vec::new();
    let mut rhs: Vec<Coeff> = Vec::new();
    for v in &coords {
        let comps: Vec<RatFun> = fields.iter().map(|f| f.component(v)).collect();
        let t = target.component(v);
        // common denominator
        let mut den = crate::Poly::one();
        for f in comps.iter().chain(std::iter::once(&t)) {
            let g = crate::Poly::gcd(&den, f.den());
            den = den.mul(&f.den().exact_div(&g).expect("gcd divides"));
        }
        let nums: Vec<crate::Poly> = comps
            .iter()
            .map(|f| f.num().mul(&den.exact_div(f.den()).expect("lcm construction")))
            .collect();
        let tnum = t.num().mul(&den.exact_div(t.den()).expect("lcm construction"));
        let mut monomials: BTreeSet<crate::poly::Monomial> =
            tnum.iter().map(|(m, _)| m.clone()).collect();
        for nn in &nums {
            monomials.extend(nn.iter().map(|(m, _)| m.clone()));
        }
        for m in monomials {
            rows.push(
                nums.iter()
                    .map(|nn| {
                        nn.iter()
                            .find(|(mm, _)| *mm == &m)
                            .map(|(_, c)| c.clone())
                            .unwrap_or_else(|| Coeff::int(0))
                    })
                    .collect(),
            );
            rhs.push(
                tnum.iter()
                    .find(|(mm, _)| *mm == &m)
                    .map(|(_, c)| c.clone())
                    .unwrap_or_else(|| Coeff::int(0)),
            );
        }
    }
    linalg::solve_const(&rows, &rhs)
}

/// Structure constants of a list of named fields.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    pub names: Vec<String>,
    /// (i, j) -> coefficients of [F_i, F_j] on the basis.
    pub table: BTreeMap<(usize, usize), Vec<Coeff>>,
}

impl StructureConstants {
    pub fn compute(fields: &[(String, VectorField)]) -> Result<Self, VfError> {
        let names: Vec<String> = fields.iter().map(|(n, _)| n.clone()).collect();
        let vfs: Vec<VectorField> = fields.iter().map(|(_, f)| f.clone()).collect();
        let mut table = BTreeMap::new();
        for i in 0..vfs.len() {
            for j in (i + 1)..vfs.len() {
                let b = vfs[i].bracket(&vfs[j]);
                let coeffs = express_const_combination(&vfs, &b).ok_or_else(|| {
                    VfError::NotClosed(format!("[{}, {}] leaves the constant span", names[i], names[j]))
                })?;
                table.insert((i, j), coeffs);
            }
        }
        Ok(StructureConstants { names, table })
    }

    /// Coefficients of [F_i, F_j] for any i, j (antisymmetry filled in).
    pub fn bracket_coeffs(&self, i: usize, j: usize) -> Vec<Coeff> {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Equal => vec![Coeff::int(0); self.names.len()],
            Ordering::Less => self.table[&(i, j)].clone(),
            Ordering::Greater => self.table[&(j, i)]
                .iter()
                .map(|c| Coeff::int(0) - c.clone())
                .collect(),
        }
    }

    /// Bracket of two coefficient vectors via bilinearity.
    pub fn bracket_vectors(&self, a: &[Coeff], b: &[Coeff]) -> Vec<Coeff> {
        let n = self.names.len();
        let mut out = vec![Coeff::int(0); n];
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[j].is_zero() {
                    continue;
                }
                let c = self.bracket_coeffs(i, j);
                for k in 0..n {
                    out[k] = out[k].clone() + a[i].clone() * b[j].clone() * c[k].clone();
                }
            }
        }
        out
    }

    pub fn render(&self) -> Vec<String> {
        let mut out = Vec::new();
        for ((i, j), c) in &self.table {
            let mut terms = Vec::new();
            for (k, ck) in c.iter().enumerate() {
                if !ck.is_zero() {
                    if ck == &Coeff::int(1) {
                        terms.push(self.names[k].clone());
                    } else {
                        terms.push(format!("({})*{}", ck, self.names[k]));
                    }
                }
            }
            let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            out.push(format!("[{}, {}] = {}", self.names[*i], self.names[*j], rhs));
        }
        out
    }
}

/// Classification outcome.
#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    Sl2 {
        e: String,
        f: String,
        h: String,
    },
    /// Semidirect product of a Bianchi type V ideal with sl2.
    SemidirectLv {
        ideal: [String; 3],
        sl2: (String, String, String),
    },
    Abelian,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct LieAlgebraReport {
    pub constants: StructureConstants,
    pub classification: Classification,
}

fn unit_vec(n: usize, i: usize, sign: i64) -> Vec<Coeff> {
    let mut v = vec![Coeff::int(0); n];
    v[i] = Coeff::int(sign);
    v
}

fn vec_is_multiple(v: &[Coeff], w: &[Coeff]) -> Option<Coeff> {
    // v = lambda w?
    let mut lambda: Option<Coeff> = None;
    for (a, b) in v.iter().zip(w) {
        if b.is_zero() {
            if !a.is_zero() {
                return None;
            }
            continue;
        }
        let l = a.clone() / b.clone();
        match &lambda {
            None => lambda = Some(l),
            Some(prev) if *prev == l => {}
            _ => return None,
        }
    }
    lambda
}

/// Try the sl2 template on a triple inside the structure constants: find
/// h = +-F_c with ad_h eigenvalues {2, -2} and eigenvectors e, f with
/// [e, f] = h after rescaling e.
fn try_sl2(sc: &StructureConstants, triple: [usize; 3]) -> Option<(String, String, String)> {
    let n = sc.names.len();
    // the triple must be a subalgebra
    for &i in &triple {
        for &j in &triple {
            let c = sc.bracket_coeffs(i, j);
            for k in 0..n {
                if !triple.contains(&k) && !c[k].is_zero() {
                    return None;
                }
            }
        }
    }
    for &hc in &triple {
        for sign in [1i64, -1] {
            let h = unit_vec(n, hc, sign);
            // ad_h on the triple, in triple coordinates
            let mut ad = vec![vec![Coeff::int(0); 3]; 3];
            for (col, &j) in triple.iter().enumerate() {
                let img = sc.bracket_vectors(&h, &unit_vec(n, j, 1));
                for (rowi, &k) in triple.iter().enumerate() {
                    ad[rowi][col] = img[k].clone();
                }
            }
            let eig = |lambda: i64| -> Vec<Vec<Coeff>> {
                let m: Vec<Vec<Coeff>> = (0..3)
                    .map(|r| {
                        (0..3)
                            .map(|c| {
                                let mut v = ad[r][c].clone();
                                if r == c {
                                    v = v - Coeff::int(lambda);
                                }
                                v
                            })
                            .collect()
                    })
                    .collect();
                linalg::kernel_const(&m)
            };
            let e_space = eig(2);
            let f_space = eig(-2);
            if e_space.len() != 1 || f_space.len() != 1 {
                continue;
            }
            let lift = |v: &[Coeff]| -> Vec<Coeff> {
                let mut out = vec![Coeff::int(0); n];
                for (t, &idx) in triple.iter().enumerate() {
                    out[idx] = v[t].clone();
                }
                out
            };
            let e0 = lift(&e_space[0]);
            let f0 = lift(&f_space[0]);
            let ef = sc.bracket_vectors(&e0, &f0);
            let Some(lambda) = vec_is_multiple(&ef, &h) else { continue };
            if lambda.is_zero() {
                continue;
            }
            // e := e0 / lambda gives [e, f0] = h exactly
            let render = |v: &[Coeff], scale: Option<&Coeff>| -> String {
                let mut terms = Vec::new();
                for (k, c) in v.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let c = match scale {
                        Some(s) => c.clone() / s.clone(),
                        None => c.clone(),
                    };
                    if c == Coeff::int(1) {
                        terms.push(sc.names[k].clone());
                    } else {
                        terms.push(format!("({})*{}", c, sc.names[k]));
                    }
                }
                terms.join(" + ")
            };
            let e_str = render(&e0, Some(&lambda));
            let f_str = render(&f0, None);
            let h_str = render(&h, None);
            return Some((e_str, f_str, h_str));
        }
    }
    None
}

/// Bianchi type V template on a 3-element ideal: a basis (e1, e2, e3) with
/// [e1, e2] = e2, [e1, e3] = e3, [e2, e3] = 0.
fn try_bianchi_v(sc: &StructureConstants, triple: [usize; 3]) -> Option<String> {
    let n = sc.names.len();
    for &c1 in &triple {
        for sign in [1i64, -1] {
            let e1 = unit_vec(n, c1, sign);
            let mut ad = vec![vec![Coeff::int(0); 3]; 3];
            for (col, &j) in triple.iter().enumerate() {
                let img = sc.bracket_vectors(&e1, &unit_vec(n, j, 1));
                for (rowi, &k) in triple.iter().enumerate() {
                    ad[rowi][col] = img[k].clone();
                }
            }
            // eigenvalue 1 with a 2-dimensional eigenspace
            let m: Vec<Vec<Coeff>> = (0..3)
                .map(|r| {
                    (0..3)
                        .map(|c| {
                            let mut v = ad[r][c].clone();
                            if r == c {
                                v = v - Coeff::int(1);
                            }
                            v
                        })
                        .collect()
                })
                .collect();
            let space = linalg::kernel_const(&m);
            if space.len() != 2 {
                continue;
            }
            let lift = |v: &[Coeff]| -> Vec<Coeff> {
                let mut out = vec![Coeff::int(0); n];
                for (t, &idx) in triple.iter().enumerate() {
                    out[idx] = v[t].clone();
                }
                out
            };
            let e2 = lift(&space[0]);
            let e3 = lift(&space[1]);
            let z = sc.bracket_vectors(&e2, &e3);
            if z.iter().all(|c| c.is_zero()) {
                let name = |i: usize| sc.names[i].clone();
                let e1n = if sign == 1 {
                    name(c1)
                } else {
                    format!("-{}", name(c1))
                };
                return Some(format!(
                    "e1 = {e1n}; eigenspace basis from {{{}, {}, {}}}",
                    name(triple[0]),
                    name(triple[1]),
                    name(triple[2])
                ));
            }
        }
    }
    None
}

/// Classify a closed family of vector fields.
pub fn classify(fields: &[(String, VectorField)]) -> Result<LieAlgebraReport, VfError> {
    let sc = StructureConstants::compute(fields)?;
    let n = sc.names.len();
    let abelian = sc.table.values().all(|c| c.iter().all(|x| x.is_zero()));
    if abelian {
        return Ok(LieAlgebraReport { constants: sc, classification: Classification::Abelian });
    }
    if n == 3 {
        if let Some((e, f, h)) = try_sl2(&sc, [0, 1, 2]) {
            return Ok(LieAlgebraReport {
                constants: sc,
                classification: Classification::Sl2 { e, f, h },
            });
        }
        return Ok(LieAlgebraReport { constants: sc, classification: Classification::Unknown });
    }
    if n == 6 {
        // search for a 3-dimensional ideal of Bianchi type V whose
        // complement is an sl2 subalgebra
        let idx: Vec<usize> = (0..6).collect();
        for a in 0..6 {
            for b in (a + 1)..6 {
                for c in (b + 1)..6 {
                    let ideal = [a, b, c];
                    let complement: Vec<usize> =
                        idx.iter().copied().filter(|i| !ideal.contains(i)).collect();
                    // ideal condition: [ideal, everything] stays in the ideal
                    let mut is_ideal = true;
                    'check: for &i in &ideal {
                        for j in 0..6 {
                            let cc = sc.bracket_coeffs(i, j);
                            for k in 0..6 {
                                if !ideal.contains(&k) && !cc[k].is_zero() {
                                    is_ideal = false;
                                    break 'check;
                                }
                            }
                        }
                    }
                    if !is_ideal {
                        continue;
                    }
                    if try_bianchi_v(&sc, ideal).is_none() {
                        continue;
                    }
                    let comp3 = [complement[0], complement[1], complement[2]];
                    if let Some(sl2) = try_sl2(&sc, comp3) {
                        let names = [
                            sc.names[a].clone(),
                            sc.names[b].clone(),
                            sc.names[c].clone(),
                        ];
                        return Ok(LieAlgebraReport {
                            constants: sc,
                            classification: Classification::SemidirectLv { ideal: names, sl2 },
                        });
                    }
                }
            }
        }
        return Ok(LieAlgebraReport { constants: sc, classification: Classification::Unknown });
    }
    Ok(LieAlgebraReport { constants: sc, classification: Classification::Unknown })
}

// ---------------------------------------------------------------------------
// full per-geometry solve
// ---------------------------------------------------------------------------

/// All modular and Lie(G) vector fields of a geometry, named.
pub struct GeometryFields {
    pub modular: Vec<(String, Solved)>,
    pub lie: Vec<(String, Solved)>,
}

impl GeometryFields {
    pub fn named_fields(&self) -> Vec<(String, VectorField)> {
        self.modular
            .iter()
            .map(|(n, s)| (n.clone(), s.field.clone()))
            .chain(self.lie.iter().map(|(n, s)| (n.clone(), s.field.clone())))
            .collect()
    }
}

/// Solve every target shape and every Lie(G) generator of the geometry.
pub fn solve_geometry(
    geom: &Geometry,
    gauge: &GaugeMatrix,
    conn: &[ConnectionMatrix],
) -> Result<GeometryFields, VfError> {
    let gauged = crate::gaussmanin::gauge_transform(conn, &gauge.entries, &gauge.params)
        .map_err(|e| VfError::NotClosed(e.to_string()))?;
    let mut modular = Vec::new();
    for shape in &geom.vf_shapes {
        let solved = solve_modular(geom, gauge, &gauged, shape)?;
        modular.push((shape.name.clone(), solved));
    }
    let mut lie = Vec::new();
    for (param, g) in crate::geometry::lie_generators(gauge) {
        let solved = solve_lie(geom, gauge, &gauged, &g)?;
        let digits: String = param.chars().filter(|c| c.is_ascii_digit()).collect();
        lie.push((format!("Rg{digits}"), solved));
    }
    Ok(GeometryFields { modular, lie })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprs::parse_ratfun;

    fn vf(pairs: &[(&str, &str)]) -> VectorField {
        VectorField::from_components(
            &pairs
                .iter()
                .map(|(n, s)| (*n, parse_ratfun::<Coeff>(s).unwrap()))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn bracket_is_antisymmetric() {
        let x = vf(&[("z", "z^2"), ("s22", "s22*z")]);
        assert!(x.bracket(&x).is_zero());
        let y = vf(&[("z", "1"), ("s21", "s22")]);
        let b1 = x.bracket(&y);
        let b2 = y.bracket(&x);
        assert!(b1.add(&b2).is_zero());
    }

    #[test]
    fn radial_and_translation_fields() {
        // [s d/ds, d/ds] = -d/ds
        let radial = vf(&[("s22", "s22")]);
        let trans = vf(&[("s22", "1")]);
        let b = radial.bracket(&trans);
        assert_eq!(b.component("s22"), parse_ratfun::<Coeff>("-1").unwrap());
    }

    #[test]
    fn jacobi_identity_on_polynomial_fields() {
        let x = vf(&[("z", "z*s21")]);
        let y = vf(&[("s21", "s22^2")]);
        let z = vf(&[("s22", "z")]);
        assert!(jacobi_residual(&x, &y, &z).is_zero());
    }
}
