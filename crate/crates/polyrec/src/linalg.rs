//! Exact linear algebra over the rationals: fraction-free (Bareiss) Gaussian
//! elimination, nullspace bases, affine solves and integer determinants.
//!
//! Pivoting is deterministic (first nonzero entry in scan order), and
//! nullspace bases come back in reduced-echelon shape: each basis vector has
//! a 1 at "its" free column and 0 at the other free columns, then is rescaled
//! to coprime integers with a positive first nonzero entry.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::Rat;

/// Clear denominators row-wise; scaling rows does not change nullspaces or
/// solution sets (the right-hand side, if any, must be part of the row).
fn integer_rows(rows: &[Vec<Rat>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let mut l = BigInt::one();
            for c in row {
                l = l.lcm(c.denom());
            }
            row.iter()
                .map(|c| c.numer() * (&l / c.denom()))
                .collect()
        })
        .collect()
}

/// Fraction-free row echelon form. Returns the pivot columns; `mat` is left
/// in echelon form with zeros below each pivot.
fn bareiss_echelon(mat: &mut [Vec<BigInt>], cols: usize) -> Vec<usize> {
    let rows = mat.len();
    let mut pivot_cols = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, pr);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &mat[i][j] * &mat[r][c] - &mat[i][c] * &mat[r][j];
                debug_assert!(
                    (&num % &prev).is_zero(),
                    "fraction-free elimination: the previous pivot divides every update"
                );
                mat[i][j] = num / &prev;
            }
            mat[i][c] = BigInt::zero();
        }
        prev = mat[r][c].clone();
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivot_cols
}

/// Scale a rational vector to coprime integers with positive first nonzero
/// entry. The zero vector is returned unchanged.
pub fn normalize_direction(v: &[Rat]) -> Vec<Rat> {
    let mut l = BigInt::one();
    for c in v {
        l = l.lcm(c.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|c| c.numer() * (&l / c.denom())).collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    let sign = ints
        .iter()
        .find(|c| !c.is_zero())
        .map(|c| if c.is_negative() { -1 } else { 1 })
        .unwrap_or(1);
    let g = g * BigInt::from(sign);
    ints.into_iter().map(|c| Rat::from(c / &g)).collect()
}

/// Basis of `{ x : M x = 0 }`, one vector per free column, free columns in
/// ascending order.
pub fn nullspace_basis(rows: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    debug_assert!(rows.iter().all(|r| r.len() == cols));
    let mut mat = integer_rows(rows);
    let pivot_cols = bareiss_echelon(&mut mat, cols);
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; cols];
        for &c in &pivot_cols {
            v[c] = true;
        }
        v
    };

    let mut basis = Vec::new();
    for f in (0..cols).filter(|&f| !is_pivot[f]) {
        let mut x = vec![Rat::from(BigInt::zero()); cols];
        x[f] = Rat::from(BigInt::one());
        for (r, &pc) in pivot_cols.iter().enumerate().rev() {
            let mut acc = Rat::from(BigInt::zero());
            for j in pc + 1..cols {
                if !mat[r][j].is_zero() && !x[j].is_zero() {
                    acc += Rat::from(mat[r][j].clone()) * &x[j];
                }
            }
            x[pc] = -acc / Rat::from(mat[r][pc].clone());
        }
        basis.push(normalize_direction(&x));
    }
    basis
}

/// Rank of the matrix.
pub fn rank(rows: &[Vec<Rat>], cols: usize) -> usize {
    let mut mat = integer_rows(rows);
    bareiss_echelon(&mut mat, cols).len()
}

/// Solve `A x = b` exactly. Returns `None` when inconsistent, otherwise a
/// particular solution (free variables set to zero) together with a basis of
/// the homogeneous solutions.
pub fn solve_affine(a: &[Vec<Rat>], b: &[Rat]) -> Option<(Vec<Rat>, Vec<Vec<Rat>>)> {
    assert_eq!(a.len(), b.len());
    let cols = a.first().map_or(0, |r| r.len());
    let aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut full = integer_rows(&aug);
    // Eliminate over the full width; a pivot landing in the appended column
    // means the system is inconsistent.
    let full_pivots = bareiss_echelon(&mut full, cols + 1);
    if full_pivots.last().is_some_and(|&c| c == cols) {
        return None;
    }

    let mut x = vec![Rat::from(BigInt::zero()); cols];
    for (r, &pc) in full_pivots.iter().enumerate().rev() {
        let mut acc = Rat::from(full[r][cols].clone());
        for j in pc + 1..cols {
            if !full[r][j].is_zero() && !x[j].is_zero() {
                acc -= Rat::from(full[r][j].clone()) * &x[j];
            }
        }
        x[pc] = acc / Rat::from(full[r][pc].clone());
    }
    let homogeneous = nullspace_basis(a, cols);
    Some((x, homogeneous))
}

/// Exact determinant of a square integer matrix (Bareiss).
pub fn det_bigint(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    debug_assert!(m.iter().all(|r| r.len() == n));
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    for k in 0..n {
        let Some(pr) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if pr != k {
            m.swap(k, pr);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                debug_assert!(
                    (&num % &prev).is_zero(),
                    "fraction-free elimination: the previous pivot divides every update"
                );
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}
