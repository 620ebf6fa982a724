//! Exact-arithmetic verification kernel for differential rings of
//! quasi-modular forms arising on enhanced moduli spaces of (mirror)
//! Calabi-Yau families.
//!
//! The crate is organized bottom-up:
//!
//! - [`scalar`], [`poly`], [`ratfun`], [`linalg`]: the exact kernel
//!   (rationals, an optional quadratic extension Q(sqrt(d)), multivariate
//!   rational functions, fraction-free linear solving);
//! - [`series`], [`qseries`]: truncated q-expansions on the (1/24)Z lattice,
//!   Eisenstein series, eta quotients, the weight-one forms A, B, C and the
//!   Hauptmodul for levels 1*, 2, 3;
//! - [`rings`]: finitely presented graded differential rings and their
//!   sl2 derivation triples, with realization into q-series;
//! - [`geometry`], [`gaussmanin`], [`vfsolver`]: enhanced-moduli gauge
//!   shapes, Gauss-Manin connection matrices, modular vector fields and the
//!   Gauss-Manin Lie algebra;
//! - [`mhspoly`]: mixed-Hodge rank computation from 2D reflexive polytopes;
//! - [`frobenius`]: Frobenius bases, mirror maps and the q-expansion bridge;
//! - [`checks`]: the named verification checks behind the CLI report.
//!
//! All core types are generic over the scalar via the [`scalar::Scalar`]
//! trait; the concrete instantiation used throughout is [`Coeff`].

pub mod scalar;
pub mod poly;
pub mod ratfun;
pub mod linalg;
pub mod series;
pub mod exprs;
pub mod qseries;
pub mod rings;
pub mod geometry;
pub mod gaussmanin;
pub mod vfsolver;
pub mod mhspoly;
pub mod frobenius;
pub mod checks;

/// The production scalar: elements of Q(sqrt(d)).
pub type Coeff = scalar::FieldConstant;
/// Polynomials over the production scalar.
pub type Poly = poly::Polynomial<Coeff>;
/// Rational functions over the production scalar.
pub type RatFun = ratfun::RationalFunction<Coeff>;
/// q-expansions over the production scalar.
pub type Series = series::TruncatedSeries<Coeff>;
/// Matrices of rational functions.
pub type Mat = linalg::Matrix<Coeff>;

pub use scalar::{rat, rat_int, ExactError, FieldConstant, Rat, Scalar};
