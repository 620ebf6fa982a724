//! Exact linear solving over the rational function field.
//!
//! `solve_linear` clears denominators row by row and runs fraction-free
//! Bareiss elimination on the resulting polynomial matrix, so intermediate
//! entries stay polynomial (divisions are exact by the Sylvester identity).
//! Back-substitution returns to the fraction field.


use crate::poly::Polynomial;
use crate::ratfun::RationalFunction;
use crate::scalar::{ExactError, Scalar};

pub type Matrix<T> = Vec<Vec<RationalFunction<T>>>;

/// Outcome of an exact rectangular solve.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearSolution<T: Scalar> {
    /// The system has exactly one solution.
    Unique(Vec<RationalFunction<T>>),
    /// Inconsistent; `witness_row` is an original row index belonging to a
    /// row whose reduced form reads 0 = nonzero.
    NoSolution { witness_row: usize },
    /// Underdetermined; a particular solution together with a kernel basis.
    NonUnique {
        particular: Vec<RationalFunction<T>>,
        kernel: Vec<Vec<RationalFunction<T>>>,
    },
}

/// Solve M x = b exactly. M is rectangular (rows x cols), b has len rows.
pub fn solve_linear<T: Scalar>(
    m: &[Vec<RationalFunction<T>>],
    b: &[RationalFunction<T>],
) -> Result<LinearSolution<T>, ExactError> {
    let rows = m.len();
    assert_eq!(rows, b.len(), "matrix/vector size mismatch");
    let cols = if rows == 0 { 0 } else { m[0].len() };
    for r in m {
        assert_eq!(r.len(), cols, "ragged matrix");
    }

    // Clear denominators within each row (including the rhs entry).
    let mut poly: Vec<Vec<Polynomial<T>>> = Vec::with_capacity(rows);
    let mut origin: Vec<usize> = (0..rows).collect();
    for (i, row) in m.iter().enumerate() {
        let mut lcm = Polynomial::<T>::one();
        for entry in row.iter().chain(std::iter::once(&b[i])) {
            let d = entry.den();
            let g = Polynomial::gcd(&lcm, d);
            lcm = lcm.mul(&d.exact_div(&g)?);
        }
        let mut prow: Vec<Polynomial<T>> = Vec::with_capacity(cols + 1);
        for entry in row.iter().chain(std::iter::once(&b[i])) {
            let scale = lcm.exact_div(entry.den())?;
            prow.push(entry.num().mul(&scale));
        }
        poly.push(prow);
    }

    // Bareiss fraction-free elimination on the augmented matrix.
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut prev_pivot = Polynomial::<T>::one();
    let mut rank = 0usize;
    for col in 0..cols {
        // pick the nonzero pivot with the fewest terms
        let mut best: Option<(usize, usize)> = None;
        for r in rank..rows {
            if !poly[r][col].is_zero() {
                let n = poly[r][col].num_terms();
                if best.map(|(bn, _)| n < bn).unwrap_or(true) {
                    best = Some((n, r));
                }
            }
        }
        let Some((_, prow)) = best else { continue };
        poly.swap(rank, prow);
        origin.swap(rank, prow);
        let pivot = poly[rank][col].clone();
        // One Bareiss step: rows below the pivot, division by the previous
        // pivot is exact (Sylvester identity), also when factor is zero.
        for r in (rank + 1)..rows {
            let factor = poly[r][col].clone();
            for c in 0..=cols {
                let t = poly[r][c].mul(&pivot).sub(&poly[rank][c].mul(&factor));
                poly[r][c] = t.exact_div(&prev_pivot)?;
            }
        }
        prev_pivot = pivot;
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }

    // Inconsistency: a zero row with nonzero rhs.
    for r in rank..rows {
        if poly[r][..cols].iter().all(|p| p.is_zero()) && !poly[r][cols].is_zero() {
            return Ok(LinearSolution::NoSolution { witness_row: origin[r] });
        }
    }

    // Back-substitution over the fraction field.
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let back_substitute = |rhs_of_free: &dyn Fn(usize) -> RationalFunction<T>,
                           use_b: bool|
     -> Result<Vec<RationalFunction<T>>, ExactError> {
        let mut x: Vec<RationalFunction<T>> =
            (0..cols).map(|_| RationalFunction::zero()).collect();
        for &fc in &free_cols {
            x[fc] = rhs_of_free(fc);
        }
        for (i, &pc) in pivot_cols.iter().enumerate().rev() {
            let mut acc = if use_b {
                RationalFunction::from_poly(poly[i][cols].clone())
            } else {
                RationalFunction::zero()
            };
            for c in (pc + 1)..cols {
                if !poly[i][c].is_zero() && !x[c].is_zero() {
                    acc = acc.sub(&RationalFunction::from_poly(poly[i][c].clone()).mul(&x[c]));
                }
            }
            x[pc] = acc.div(&RationalFunction::from_poly(poly[i][pc].clone()))?;
        }
        Ok(x)
    };

    let particular = back_substitute(&|_| RationalFunction::zero(), true)?;
    if free_cols.is_empty() {
        return Ok(LinearSolution::Unique(particular));
    }
    let mut kernel = Vec::new();
    for &fc in &free_cols {
        let v = back_substitute(
            &|c| {
                if c == fc {
                    RationalFunction::one()
                } else {
                    RationalFunction::zero()
                }
            },
            false,
        )?;
        kernel.push(v);
    }
    Ok(LinearSolution::NonUnique { particular, kernel })
}

/// Invert a small square matrix by Gauss-Jordan over the fraction field.
pub fn invert<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>, ExactError> {
    let n = m.len();
    let mut a = m.clone();
    let mut inv: Matrix<T> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { RationalFunction::one() } else { RationalFunction::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(ExactError::DivisionByZero)?;
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let p = a[col][col].clone();
        for c in 0..n {
            a[col][c] = a[col][c].div(&p)?;
            inv[col][c] = inv[col][c].div(&p)?;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..n {
                    a[r][c] = a[r][c].sub(&a[col][c].mul(&f));
                    inv[r][c] = inv[r][c].sub(&inv[col][c].mul(&f));
                }
            }
        }
    }
    Ok(inv)
}

pub fn mat_mul<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = RationalFunction::zero();
                    for l in 0..k {
                        if !a[i][l].is_zero() && !b[l][j].is_zero() {
                            acc = acc.add(&a[i][l].mul(&b[l][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_sub<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.sub(y)).collect())
        .collect()
}

pub fn mat_add<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect())
        .collect()
}

pub fn mat_transpose<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    let n = a.len();
    let m = if n == 0 { 0 } else { a[0].len() };
    (0..m).map(|j| (0..n).map(|i| a[i][j].clone()).collect()).collect()
}

pub fn mat_is_zero<T: Scalar>(a: &Matrix<T>) -> bool {
    a.iter().all(|r| r.iter().all(|e| e.is_zero()))
}

/// Gauss-Jordan solve over plain scalars (used for structure constants and
/// eigenvector extraction, where entries are field constants, not functions).
pub fn solve_const<T: Scalar>(m: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a: Vec<Vec<T>> = m
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut row = r.clone();
            row.push(x.clone());
            row
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(rank, pr);
        let p = a[rank][col].clone();
        for c in 0..=cols {
            a[rank][c] = a[rank][c].clone() / p.clone();
        }
        for r in 0..rows {
            if r != rank && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..=cols {
                    a[r][c] = a[r][c].clone() - a[rank][c].clone() * f.clone();
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }
    for r in rank..rows {
        if !a[r][cols].is_zero() {
            return None;
        }
    }
    if rank < cols {
        return None; // treat underdetermined constant systems as failure
    }
    let mut x = vec![T::zero(); cols];
    for (i, &pc) in pivot_cols.iter().enumerate() {
        x[pc] = a[i][cols].clone();
    }
    Some(x)
}

/// Kernel basis of a constant matrix (columns = unknowns).
pub fn kernel_const<T: Scalar>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a: Vec<Vec<T>> = m.to_vec();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(rank, pr);
        let p = a[rank][col].clone();
        for c in 0..cols {
            a[rank][c] = a[rank][c].clone() / p.clone();
        }
        for r in 0..rows {
            if r != rank && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..cols {
                    a[r][c] = a[r][c].clone() - a[rank][c].clone() * f.clone();
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }
    let mut basis = Vec::new();
    for fc in (0..cols).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![T::zero(); cols];
        v[fc] = T::one();
        for (i, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = T::zero() - a[i][fc].clone();
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldConstant;

    type R = RationalFunction<FieldConstant>;
    type P = Polynomial<FieldConstant>;

    #[test]
    fn identity_system() {
        let f = R::new(P::var("z1").mul(&P::var("z2")).add(&P::one()), P::var("z2").sub(&P::int(3))).unwrap();
        let g = R::var("z1");
        let m = vec![vec![R::one(), R::zero()], vec![R::zero(), R::one()]];
        let b = vec![f.clone(), g.clone()];
        match solve_linear(&m, &b).unwrap() {
            LinearSolution::Unique(x) => assert_eq!(x, vec![f, g]),
            other => panic!("expected unique, got {other:?}"),
        }
    }

    #[test]
    fn two_by_two_over_function_field() {
        // [[z,1],[1,1]] x = (1,0)  =>  x = (1/(z-1), -1/(z-1))
        let z = R::var("z");
        let m = vec![vec![z.clone(), R::one()], vec![R::one(), R::one()]];
        let b = vec![R::one(), R::zero()];
        let denom = R::new(P::one(), P::var("z").sub(&P::one())).unwrap();
        match solve_linear(&m, &b).unwrap() {
            LinearSolution::Unique(x) => {
                assert_eq!(x[0], denom);
                assert_eq!(x[1], denom.neg());
                // back-substitution check: Mx = b exactly
                let r0 = z.mul(&x[0]).add(&x[1]);
                let r1 = x[0].add(&x[1]);
                assert!(r0.is_one());
                assert!(r1.is_zero());
            }
            other => panic!("expected unique, got {other:?}"),
        }
    }

    #[test]
    fn inconsistent_rows_detected() {
        let m = vec![vec![R::one(), R::one()], vec![R::int(2), R::int(2)]];
        let b = vec![R::one(), R::zero()];
        match solve_linear(&m, &b).unwrap() {
            LinearSolution::NoSolution { .. } => {}
            other => panic!("expected no solution, got {other:?}"),
        }
    }

    #[test]
    fn kernel_vectors_satisfy_homogeneous_system() {
        let z = R::var("z");
        let m = vec![vec![z.clone(), z.clone().mul(&z)]];
        let b = vec![R::zero()];
        match solve_linear(&m, &b).unwrap() {
            LinearSolution::NonUnique { particular, kernel } => {
                assert!(particular.iter().all(|x| x.is_zero()));
                assert_eq!(kernel.len(), 1);
                let v = &kernel[0];
                let r = m[0][0].mul(&v[0]).add(&m[0][1].mul(&v[1]));
                assert!(r.is_zero());
            }
            other => panic!("expected non-unique, got {other:?}"),
        }
    }

    #[test]
    fn matrix_inverse() {
        let t = R::var("s33");
        let s = R::var("s32");
        let m = vec![
            vec![R::one(), R::zero(), R::zero()],
            vec![R::zero(), t.recip().unwrap(), R::zero()],
            vec![R::zero(), s.clone(), t.clone()],
        ];
        let inv = invert(&m).unwrap();
        let prod = mat_mul(&m, &inv);
        for (i, row) in prod.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if i == j {
                    assert!(e.is_one());
                } else {
                    assert!(e.is_zero());
                }
            }
        }
    }
}
