//! Enhanced-moduli bookkeeping: filtration shapes, the constrained gauge
//! matrix S, Lie algebra generators of the gauge group, and the registry of
//! built-in geometries.
//!
//! The gauge matrix is produced symbolically from a filtration shape:
//!
//! 1. Hodge blocks force S lower block-triangular;
//! 2. the weight filtration zeroes every entry coupling a W_k row to a
//!    column outside W_k;
//! 3. the graded pairing conditions S_k Phi_k S_k^tr = Phi_k are solved by
//!    eliminating one entry per equation (earliest variable first);
//! 4. if s11 survives as a free parameter it is normalized to 1 for
//!    presentation (the solver re-verifies that nothing flows along it).
//!
//! Built-in geometries are defined as embedded config documents and parsed
//! through the same loader that handles user files.

use std::collections::BTreeMap;
use std::fmt;

use once_cell::sync::Lazy;
use serde::Deserialize;

use crate::exprs;
use crate::gaussmanin::{eval_operator, OperatorWord, ThetaMono};
use crate::linalg;
use crate::poly::Var;
use crate::qseries::Level;
use crate::{Coeff, Mat, RatFun};

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryError {
    Schema { field: String, message: String },
    RankMismatch(String),
    InconsistentPairing(String),
    UnknownGeometry(String),
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::Schema { field, message } => write!(f, "config field `{field}`: {message}"),
            GeometryError::RankMismatch(m) => write!(f, "rank mismatch: {m}"),
            GeometryError::InconsistentPairing(m) => write!(f, "inconsistent pairing: {m}"),
            GeometryError::UnknownGeometry(n) => write!(f, "unknown geometry {n}"),
        }
    }
}

impl std::error::Error for GeometryError {}

/// Hodge block sizes, weight filtration dimensions and graded pairing blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationShape {
    /// Block sizes f_n, ..., f_0 (top Hodge piece first), zeros omitted.
    pub hodge_ranks: Vec<usize>,
    /// (weight level k, dim W_k) at the jumps, increasing in both entries.
    pub weight_levels: Vec<(i64, usize)>,
    /// Pairing matrix on each nonzero graded piece Gr_k.
    pub pairing_blocks: Vec<(i64, Vec<Vec<Coeff>>)>,
}

impl FiltrationShape {
    pub fn b_n(&self) -> usize {
        self.hodge_ranks.iter().sum()
    }

    /// Hodge block index of a 0-based row.
    pub fn hodge_block(&self, i: usize) -> usize {
        let mut acc = 0;
        for (bi, f) in self.hodge_ranks.iter().enumerate() {
            acc += f;
            if i < acc {
                return bi;
            }
        }
        panic!("row {i} out of range");
    }

    /// 0-based row range of the graded piece at weight level k.
    pub fn graded_range(&self, k: i64) -> Option<std::ops::Range<usize>> {
        let b = self.b_n();
        let mut prev_dim = 0usize;
        for (level, dim) in &self.weight_levels {
            if *level == k {
                return Some((b - dim)..(b - prev_dim));
            }
            prev_dim = *dim;
        }
        None
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let b = self.b_n();
        if b == 0 {
            return Err(GeometryError::RankMismatch("empty Hodge ranks".into()));
        }
        let mut prev = 0usize;
        for (k, dim) in &self.weight_levels {
            if *dim <= prev {
                return Err(GeometryError::RankMismatch(format!(
                    "weight dimensions must increase at level {k}"
                )));
            }
            prev = *dim;
        }
        if prev != b {
            return Err(GeometryError::RankMismatch(format!(
                "top weight dimension {prev} != b_n {b}"
            )));
        }
        for (k, phi) in &self.pairing_blocks {
            let range = self.graded_range(*k).ok_or_else(|| {
                GeometryError::RankMismatch(format!("pairing block at non-jump level {k}"))
            })?;
            let d = range.len();
            if phi.len() != d || phi.iter().any(|r| r.len() != d) {
                return Err(GeometryError::RankMismatch(format!(
                    "pairing block at level {k} is not {d}x{d}"
                )));
            }
            if k % 2 != 0 {
                for i in 0..d {
                    for j in 0..d {
                        let neg = Coeff::int(0) - phi[j][i].clone();
                        if phi[i][j] != neg {
                            return Err(GeometryError::RankMismatch(format!(
                                "odd-weight pairing block at level {k} is not skew-symmetric"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// The symbolic gauge matrix with its independent parameters.
#[derive(Debug, Clone)]
pub struct GaugeMatrix {
    pub entries: Mat,
    /// Independent parameters, in canonical order; may include "s11".
    pub params: Vec<String>,
    /// Entries solved from the pairing conditions.
    pub dependent: Vec<(String, RatFun)>,
    /// Whether s11 remained free and is normalized to 1 for presentation.
    pub s11_normalized: bool,
}

impl GaugeMatrix {
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    /// Parameters excluding a normalized s11.
    pub fn moduli_params(&self) -> Vec<String> {
        self.params
            .iter()
            .filter(|p| !(self.s11_normalized && *p == "s11"))
            .cloned()
            .collect()
    }

    /// Entries with s11 set to 1 (no-op when s11 is not a free parameter).
    pub fn entries_normalized(&self) -> Mat {
        if !self.s11_normalized {
            return self.entries.clone();
        }
        let v = Var::new("s11");
        self.entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| e.substitute(&v, &RatFun::one()).expect("substituting a constant"))
                    .collect()
            })
            .collect()
    }

    /// Parameter values that make S the identity.
    pub fn identity_point(&self) -> BTreeMap<Var, Coeff> {
        self.params
            .iter()
            .map(|p| {
                let (i, j) = split_param(p);
                (Var::new(p), if i == j { Coeff::int(1) } else { Coeff::int(0) })
            })
            .collect()
    }
}

fn split_param(name: &str) -> (u32, u32) {
    let digits: String = name.chars().filter(|c| c.is_ascii_digit()).collect();
    assert_eq!(digits.len(), 2, "gauge parameters look like s{{i}}{{j}}");
    let i = digits[0..1].parse().unwrap();
    let j = digits[1..2].parse().unwrap();
    (i, j)
}

/// Build the constrained gauge matrix from a filtration shape.
pub fn gauge_shape(shape: &FiltrationShape) -> Result<GaugeMatrix, GeometryError> {
    shape.validate()?;
    let n = shape.b_n();

    // start from the Hodge + weight zero pattern
    let mut entries: Mat = Vec::new();
    let mut params: Vec<String> = Vec::new();
    for i in 0..n {
        let mut row = Vec::new();
        for j in 0..n {
            let mut allowed = shape.hodge_block(j) <= shape.hodge_block(i);
            // weight condition: rows spanning W_k may only use W_k columns
            for (_, dim) in &shape.weight_levels {
                let start = n - dim;
                if i >= start && j < start {
                    allowed = false;
                }
            }
            if allowed {
                let name = format!("s{}{}", i + 1, j + 1);
                params.push(name.clone());
                row.push(RatFun::var(&name));
            } else {
                row.push(RatFun::zero());
            }
        }
        entries.push(row);
    }

    // graded pairing conditions, block by block
    let mut dependent: Vec<(String, RatFun)> = Vec::new();
    for (k, phi) in &shape.pairing_blocks {
        let range = shape.graded_range(*k).expect("validated");
        let phi_mat: Mat = phi
            .iter()
            .map(|r| r.iter().map(|c| RatFun::constant(c.clone())).collect())
            .collect();
        loop {
            let block: Mat = range
                .clone()
                .map(|i| range.clone().map(|j| entries[i][j].clone()).collect())
                .collect();
            let lhs = linalg::mat_mul(&linalg::mat_mul(&block, &phi_mat), &linalg::mat_transpose(&block));
            let residual = linalg::mat_sub(&lhs, &phi_mat);
            // first nonzero residual entry
            let mut eq: Option<RatFun> = None;
            'scan: for row in &residual {
                for e in row {
                    if !e.is_zero() {
                        eq = Some(e.clone());
                        break 'scan;
                    }
                }
            }
            let Some(eq) = eq else { break };
            // solve for the earliest parameter appearing linearly
            let num = eq.num().clone();
            let mut solved = false;
            for v in num.vars() {
                if num.degree_in(&v) != 1 {
                    continue;
                }
                let coeffs = num.coeffs_in(&v);
                let a = coeffs.get(&1).cloned().unwrap_or_else(crate::Poly::zero);
                let b = coeffs.get(&0).cloned().unwrap_or_else(crate::Poly::zero);
                if a.is_zero() {
                    continue;
                }
                let value = RatFun::from_poly(b.neg())
                    .div(&RatFun::from_poly(a))
                    .map_err(|e| GeometryError::InconsistentPairing(e.to_string()))?;
                // substitute everywhere
                for row in entries.iter_mut() {
                    for e in row.iter_mut() {
                        *e = e
                            .substitute(&v, &value)
                            .map_err(|er| GeometryError::InconsistentPairing(er.to_string()))?;
                    }
                }
                params.retain(|p| p != v.name());
                dependent.push((v.name().to_string(), value));
                solved = true;
                break;
            }
            if !solved {
                return Err(GeometryError::InconsistentPairing(format!(
                    "no linear parameter in pairing equation {eq} at level {k}"
                )));
            }
        }
    }

    let s11_normalized = params.iter().any(|p| p == "s11");
    Ok(GaugeMatrix { entries, params, dependent, s11_normalized })
}

/// One generator of Lie(G) per independent gauge parameter:
/// g_p = (dS/dp) S^{-1} evaluated at S = Id.
pub fn lie_generators(gauge: &GaugeMatrix) -> Vec<(String, Vec<Vec<Coeff>>)> {
    let id = gauge.identity_point();
    let entries = gauge.entries_normalized();
    gauge
        .moduli_params()
        .iter()
        .map(|p| {
            let v = Var::new(p);
            let mat: Vec<Vec<Coeff>> = entries
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|e| e.partial(&v).eval(&id).expect("gauge entries regular at Id"))
                        .collect()
                })
                .collect();
            (p.clone(), mat)
        })
        .collect()
}

/// Entry of a modular-vector-field target shape.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetEntry {
    Zero,
    One,
    Unknown(String),
}

/// Zero/one/unknown pattern for nabla_R omega_t.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetShape {
    pub name: String,
    pub entries: Vec<Vec<TargetEntry>>,
}

impl TargetShape {
    /// Only super-diagonal Hodge blocks may hold nonzero entries.
    pub fn validate(&self, shape: &FiltrationShape) -> Result<(), GeometryError> {
        let n = shape.b_n();
        if self.entries.len() != n || self.entries.iter().any(|r| r.len() != n) {
            return Err(GeometryError::RankMismatch(format!(
                "target shape {} is not {n}x{n}",
                self.name
            )));
        }
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if *e != TargetEntry::Zero && shape.hodge_block(j) != shape.hodge_block(i) + 1 {
                    return Err(GeometryError::Schema {
                        field: format!("vf_shapes.{}", self.name),
                        message: format!(
                            "entry ({},{}) lies outside the super-diagonal Hodge blocks",
                            i + 1,
                            j + 1
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

/// A family preset: variables, PF system, basis recipe, filtration shape,
/// pairing data, Yukawa coupling and target shapes.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub name: String,
    pub z_vars: Vec<String>,
    pub pf: Vec<OperatorWord>,
    pub basis: Vec<(RatFun, OperatorWord)>,
    pub shape: FiltrationShape,
    pub yukawa: Option<RatFun>,
    pub vf_shapes: Vec<TargetShape>,
    /// Mirror map uses theta^p of the Frobenius solutions y_p, y_{p+1}.
    pub mirror_theta_power: Option<usize>,
    /// Level of the quasi-modular ring the bridge compares against.
    pub bridge_level: Option<Level>,
}

// ---------------------------------------------------------------------------
// config loading
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct ConfigRoot {
    geometry: GeometryConfig,
}

#[derive(Deserialize)]
struct GeometryConfig {
    name: String,
    variables: Vec<String>,
    pf: Vec<String>,
    basis: Vec<BasisEntry>,
    hodge_ranks: Vec<usize>,
    weight_ranks: Vec<[i64; 2]>,
    pairing_blocks: Vec<PairingBlockConfig>,
    yukawa: Option<String>,
    #[serde(default)]
    vf_shapes: Vec<VfShapeConfig>,
    mirror_theta_power: Option<usize>,
    bridge_level: Option<String>,
}

#[derive(Deserialize)]
struct BasisEntry {
    prefactor: String,
    word: String,
}

#[derive(Deserialize)]
struct PairingBlockConfig {
    weight: i64,
    matrix: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct VfShapeConfig {
    name: String,
    matrix: Vec<Vec<String>>,
}

fn schema_err(field: &str, message: impl fmt::Display) -> GeometryError {
    GeometryError::Schema { field: field.to_string(), message: message.to_string() }
}

/// Parse and validate a geometry config document (TOML).
pub fn load_geometry(text: &str) -> Result<Geometry, GeometryError> {
    let root: ConfigRoot =
        toml::from_str(text).map_err(|e| schema_err("geometry", e.message()))?;
    let cfg = root.geometry;

    let theta_names: Vec<String> = if cfg.variables.len() == 1 {
        vec!["theta".to_string()]
    } else {
        (1..=cfg.variables.len()).map(|i| format!("theta{i}")).collect()
    };
    let theta_vars: Vec<Var> = cfg.variables.iter().map(|v| Var::new(v)).collect();

    let parse_op = |field: &str, s: &str| -> Result<OperatorWord, GeometryError> {
        let ast = exprs::parse(s).map_err(|e| schema_err(field, e))?;
        eval_operator(&ast, &theta_names, &theta_vars).map_err(|e| schema_err(field, e))
    };

    let pf: Vec<OperatorWord> = cfg
        .pf
        .iter()
        .enumerate()
        .map(|(i, s)| parse_op(&format!("pf[{i}]"), s))
        .collect::<Result<_, _>>()?;

    let yukawa: Option<RatFun> = match &cfg.yukawa {
        None => None,
        Some(s) => {
            Some(exprs::parse_ratfun(s).map_err(|e| schema_err("yukawa", e))?)
        }
    };

    let mut basis = Vec::new();
    for (i, entry) in cfg.basis.iter().enumerate() {
        let field = format!("basis[{i}]");
        let mut pref: RatFun =
            exprs::parse_ratfun(&entry.prefactor).map_err(|e| schema_err(&field, e))?;
        // "Y" in a prefactor refers to the geometry's Yukawa coupling
        let yvar = Var::new("Y");
        if pref.num().degree_in(&yvar) > 0 || pref.den().degree_in(&yvar) > 0 {
            let y = yukawa.clone().ok_or_else(|| {
                schema_err(&field, "prefactor references Y but no yukawa is configured")
            })?;
            pref = pref
                .substitute(&yvar, &y)
                .map_err(|e| schema_err(&field, e))?;
        }
        let word = parse_op(&field, &entry.word)?;
        basis.push((pref, word));
    }

    let mut pairing_blocks = Vec::new();
    for (bi, block) in cfg.pairing_blocks.iter().enumerate() {
        let field = format!("pairing_blocks[{bi}]");
        let mut matrix = Vec::new();
        for row in &block.matrix {
            let mut r = Vec::new();
            for cell in row {
                let f: RatFun = exprs::parse_ratfun(cell).map_err(|e| schema_err(&field, e))?;
                let c = f.constant_value().ok_or_else(|| {
                    schema_err(&field, format!("pairing entry {cell} is not constant"))
                })?;
                r.push(c);
            }
            matrix.push(r);
        }
        pairing_blocks.push((block.weight, matrix));
    }
    if pairing_blocks.is_empty() {
        return Err(schema_err("pairing", "at least one pairing block is required"));
    }

    let shape = FiltrationShape {
        hodge_ranks: cfg.hodge_ranks.clone(),
        weight_levels: cfg.weight_ranks.iter().map(|[k, d]| (*k, *d as usize)).collect(),
        pairing_blocks,
    };
    shape.validate()?;

    if basis.len() != shape.b_n() {
        return Err(GeometryError::RankMismatch(format!(
            "basis has {} words, filtration has b_n = {}",
            basis.len(),
            shape.b_n()
        )));
    }

    let mut vf_shapes = Vec::new();
    for sc in &cfg.vf_shapes {
        let field = format!("vf_shapes.{}", sc.name);
        let entries: Vec<Vec<TargetEntry>> = sc
            .matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| match cell.trim() {
                        "0" => Ok(TargetEntry::Zero),
                        "1" => Ok(TargetEntry::One),
                        other if other.starts_with('Y') => {
                            Ok(TargetEntry::Unknown(other.to_string()))
                        }
                        other => Err(schema_err(
                            &field,
                            format!("target entries are 0, 1 or Y<i>, got {other}"),
                        )),
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        let ts = TargetShape { name: sc.name.clone(), entries };
        ts.validate(&shape)?;
        vf_shapes.push(ts);
    }

    let bridge_level = match &cfg.bridge_level {
        None => None,
        Some(s) => Some(
            Level::parse(s).ok_or_else(|| schema_err("bridge_level", format!("unknown level {s}")))?,
        ),
    };

    Ok(Geometry {
        name: cfg.name,
        z_vars: cfg.variables,
        pf,
        basis,
        shape,
        yukawa,
        vf_shapes,
        mirror_theta_power: cfg.mirror_theta_power,
        bridge_level,
    })
}

// ---------------------------------------------------------------------------
// built-in geometries
// ---------------------------------------------------------------------------

pub const ELLIPTIC_1STAR: &str = r#"
[geometry]
name = "elliptic-1star"
variables = ["z"]
pf = ["theta^2 - 12*z*(6*theta + 5)*(6*theta + 1)"]
basis = [
  { prefactor = "1", word = "1" },
  { prefactor = "1 - 432*z", word = "theta" },
]
hodge_ranks = [1, 1]
weight_ranks = [[1, 2]]
pairing_blocks = [{ weight = 1, matrix = [["0", "-1"], ["1", "0"]] }]
mirror_theta_power = 0
bridge_level = "1*"

[[geometry.vf_shapes]]
name = "R"
matrix = [["0", "1"], ["0", "0"]]
"#;

pub const LOCAL_P2: &str = r#"
[geometry]
name = "local-p2"
variables = ["z"]
pf = ["(theta^2 - 3*z*(3*theta + 1)*(3*theta + 2))*theta"]
basis = [
  { prefactor = "1", word = "1" },
  { prefactor = "1", word = "theta" },
  { prefactor = "1/Y", word = "theta^2" },
]
hodge_ranks = [1, 1, 1]
weight_ranks = [[3, 2], [6, 3]]
pairing_blocks = [
  { weight = 3, matrix = [["0", "-1"], ["1", "0"]] },
  { weight = 6, matrix = [["0"]] },
]
yukawa = "-1/(3*(1 - 27*z))"
mirror_theta_power = 1
bridge_level = "3"

[[geometry.vf_shapes]]
name = "R"
matrix = [
  ["0", "Y1", "0"],
  ["0", "0", "1"],
  ["0", "0", "0"],
]
"#;

pub const LOCAL_F2: &str = r#"
[geometry]
name = "local-f2"
variables = ["z1", "z2"]
pf = [
  "theta1*(theta1 - 2*theta2) - 2*z1*(2*theta1 + 1)*theta1",
  "theta2^2 - z2*(theta1 - 2*theta2 - 1)*(theta1 - 2*theta2)",
]
basis = [
  { prefactor = "1", word = "1" },
  { prefactor = "1", word = "theta1 - 2*theta2" },
  { prefactor = "1", word = "theta1" },
  { prefactor = "1/Y", word = "theta1^2" },
]
hodge_ranks = [1, 2, 1]
weight_ranks = [[3, 2], [4, 3], [6, 4]]
pairing_blocks = [
  { weight = 3, matrix = [["0", "-1"], ["1", "0"]] },
  { weight = 4, matrix = [["0"]] },
  { weight = 6, matrix = [["0"]] },
]
yukawa = "1/((1 - 4*z1)^2 - 64*z1^2*z2)"
bridge_level = "2"

[[geometry.vf_shapes]]
name = "R1"
matrix = [
  ["0", "Y1", "Y2", "0"],
  ["0", "0", "0", "0"],
  ["0", "0", "0", "1"],
  ["0", "0", "0", "0"],
]

[[geometry.vf_shapes]]
name = "R2"
matrix = [
  ["0", "Y3", "Y4", "0"],
  ["0", "0", "0", "1"],
  ["0", "0", "0", "0"],
  ["0", "0", "0", "0"],
]
"#;

static REGISTRY: Lazy<BTreeMap<String, Geometry>> = Lazy::new(|| {
    let mut m = BTreeMap::new();
    for text in [ELLIPTIC_1STAR, LOCAL_P2, LOCAL_F2] {
        let g = load_geometry(text).expect("built-in geometry configs parse");
        m.insert(g.name.clone(), g);
    }
    m
});

pub fn builtin_names() -> Vec<String> {
    REGISTRY.keys().cloned().collect()
}

pub fn builtin(name: &str) -> Result<Geometry, GeometryError> {
    REGISTRY
        .get(name)
        .cloned()
        .ok_or_else(|| GeometryError::UnknownGeometry(name.to_string()))
}

/// Expected theta-monomial staircases of the built-ins (for validation).
pub fn expected_staircase(geom: &Geometry) -> Option<Vec<ThetaMono>> {
    let mono = |pairs: &[(usize, u32)]| -> ThetaMono {
        pairs.iter().filter(|(_, e)| *e > 0).map(|(i, e)| (*i, *e)).collect()
    };
    match geom.name.as_str() {
        "elliptic-1star" => Some(vec![mono(&[]), mono(&[(0, 1)])]),
        "local-p2" => Some(vec![mono(&[]), mono(&[(0, 1)]), mono(&[(0, 2)])]),
        "local-f2" => Some(vec![
            mono(&[]),
            mono(&[(0, 1)]),
            mono(&[(1, 1)]),
            mono(&[(0, 1), (1, 1)]),
        ]),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    #[test]
    fn builtins_load() {
        assert_eq!(builtin_names(), vec!["elliptic-1star", "local-f2", "local-p2"]);
        let p2 = builtin("local-p2").unwrap();
        assert_eq!(p2.shape.b_n(), 3);
        assert_eq!(p2.z_vars, vec!["z"]);
    }

    #[test]
    fn elliptic_gauge_shape() {
        let g = builtin("elliptic-1star").unwrap();
        let gauge = gauge_shape(&g.shape).unwrap();
        assert_eq!(gauge.params, vec!["s21".to_string(), "s22".to_string()]);
        assert!(!gauge.s11_normalized);
        // S = [[1/s22, 0], [s21, s22]]
        let s22 = RatFun::var("s22");
        assert_eq!(gauge.entries[0][0], s22.recip().unwrap());
        assert!(gauge.entries[0][1].is_zero());
        assert_eq!(gauge.entries[1][0], RatFun::var("s21"));
        assert_eq!(gauge.entries[1][1], s22);
    }

    #[test]
    fn p2_gauge_shape() {
        let g = builtin("local-p2").unwrap();
        let gauge = gauge_shape(&g.shape).unwrap();
        assert_eq!(
            gauge.params,
            vec!["s11".to_string(), "s32".to_string(), "s33".to_string()]
        );
        assert!(gauge.s11_normalized);
        let e = gauge.entries_normalized();
        assert!(e[0][0].is_one());
        assert_eq!(e[1][1], RatFun::var("s33").recip().unwrap());
        assert!(e[1][0].is_zero() && e[2][0].is_zero());
        assert_eq!(e[2][1], RatFun::var("s32"));
        assert_eq!(e[2][2], RatFun::var("s33"));
    }

    #[test]
    fn f2_gauge_shape() {
        let g = builtin("local-f2").unwrap();
        let gauge = gauge_shape(&g.shape).unwrap();
        assert_eq!(
            gauge.moduli_params(),
            vec!["s22".to_string(), "s23".to_string(), "s43".to_string(), "s44".to_string()]
        );
        let e = gauge.entries_normalized();
        // row 3 holds s44^{-1} at the diagonal
        assert_eq!(e[2][2], RatFun::var("s44").recip().unwrap());
        assert_eq!(e[1][2], RatFun::var("s23"));
        assert!(e[1][3].is_zero());
    }

    #[test]
    fn pairing_preserved_symbolically() {
        for name in ["elliptic-1star", "local-p2", "local-f2"] {
            let g = builtin(name).unwrap();
            let gauge = gauge_shape(&g.shape).unwrap();
            for (k, phi) in &g.shape.pairing_blocks {
                let range = g.shape.graded_range(*k).unwrap();
                let phi_mat: Mat = phi
                    .iter()
                    .map(|r| r.iter().map(|c| RatFun::constant(c.clone())).collect())
                    .collect();
                let block: Mat = range
                    .clone()
                    .map(|i| range.clone().map(|j| gauge.entries[i][j].clone()).collect())
                    .collect();
                let lhs = linalg::mat_mul(
                    &linalg::mat_mul(&block, &phi_mat),
                    &linalg::mat_transpose(&block),
                );
                assert!(
                    linalg::mat_is_zero(&linalg::mat_sub(&lhs, &phi_mat)),
                    "pairing not preserved for {name} at level {k}"
                );
            }
        }
    }

    #[test]
    fn lie_generators_of_builtins() {
        let g = builtin("elliptic-1star").unwrap();
        let gauge = gauge_shape(&g.shape).unwrap();
        let gens = lie_generators(&gauge);
        let as_ints = |m: &Vec<Vec<Coeff>>| -> Vec<Vec<i64>> {
            m.iter()
                .map(|r| {
                    r.iter()
                        .map(|c| {
                            let r = c.to_rat().unwrap();
                            assert!(r.is_integer());
                            use num_traits::ToPrimitive;
                            r.to_integer().to_i64().unwrap()
                        })
                        .collect()
                })
                .collect()
        };
        assert_eq!(gens[0].0, "s21");
        assert_eq!(as_ints(&gens[0].1), vec![vec![0, 0], vec![1, 0]]);
        assert_eq!(gens[1].0, "s22");
        assert_eq!(as_ints(&gens[1].1), vec![vec![-1, 0], vec![0, 1]]);

        let p2 = builtin("local-p2").unwrap();
        let gens = lie_generators(&gauge_shape(&p2.shape).unwrap());
        assert_eq!(gens[0].0, "s32");
        assert_eq!(as_ints(&gens[0].1), vec![vec![0, 0, 0], vec![0, 0, 0], vec![0, 1, 0]]);
        assert_eq!(gens[1].0, "s33");
        assert_eq!(
            as_ints(&gens[1].1),
            vec![vec![0, 0, 0], vec![0, -1, 0], vec![0, 0, 1]]
        );

        let f2 = builtin("local-f2").unwrap();
        let gens = lie_generators(&gauge_shape(&f2.shape).unwrap());
        let names: Vec<&str> = gens.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, vec!["s22", "s23", "s43", "s44"]);
        assert_eq!(
            as_ints(&gens[3].1),
            vec![
                vec![0, 0, 0, 0],
                vec![0, 0, 0, 0],
                vec![0, 0, -1, 0],
                vec![0, 0, 0, 1]
            ]
        );
    }

    #[test]
    fn missing_pairing_is_a_schema_error() {
        let bad = ELLIPTIC_1STAR.replace(
            "pairing_blocks = [{ weight = 1, matrix = [[\"0\", \"-1\"], [\"1\", \"0\"]] }]",
            "pairing_blocks = []",
        );
        match load_geometry(&bad) {
            Err(GeometryError::Schema { field, .. }) => assert!(field.contains("pairing")),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn basis_length_mismatch_detected() {
        let bad = ELLIPTIC_1STAR.replace(
            "  { prefactor = \"1 - 432*z\", word = \"theta\" },\n",
            "",
        );
        assert!(matches!(load_geometry(&bad), Err(GeometryError::RankMismatch(_))));
    }
}
