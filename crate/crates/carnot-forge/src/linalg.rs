//! Small exact-rational linear algebra: Gaussian elimination for the n×n
//! systems that arise when expanding brackets in a frame (n is the chart
//! dimension, so dense elimination is more than adequate).

use num_traits::{One, Zero};

use crate::poly::Rat;

pub type Matrix = Vec<Vec<Rat>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_vec(m: &Matrix, v: &[Rat]) -> Vec<Rat> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let p = b[0].len();
    (0..n)
        .map(|i| {
            (0..p)
                .map(|j| {
                    (0..b.len()).fold(Rat::zero(), |acc, k| acc + &a[i][k] * &b[k][j])
                })
                .collect()
        })
        .collect()
}

pub fn transpose(m: &Matrix) -> Matrix {
    let rows = m.len();
    let cols = m[0].len();
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j].clone()).collect())
        .collect()
}

/// Solve M x = b exactly; `None` when M is singular.
pub fn solve(m: &Matrix, b: &[Rat]) -> Option<Vec<Rat>> {
    let n = m.len();
    let mut aug: Vec<Vec<Rat>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pivot);
        let p = aug[col][col].clone();
        for entry in &mut aug[col] {
            *entry /= &p;
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let factor = aug[r][col].clone();
                for c in col..=n {
                    let delta = &factor * &aug[col][c];
                    aug[r][c] -= delta;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n].clone()).collect())
}

/// Exact inverse; `None` when singular.
pub fn invert(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<Rat> = (0..n)
            .map(|i| if i == j { Rat::one() } else { Rat::zero() })
            .collect();
        cols.push(solve(m, &e)?);
    }
    Some(transpose(&cols))
}
