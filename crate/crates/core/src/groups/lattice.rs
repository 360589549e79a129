//! Heuristic density test for finitely many vectors of ℝʳ.
//!
//! The subgroup generated by the sample is discrete iff it is a lattice in its
//! span; a dense subgroup contains full-rank sublattices of arbitrarily small
//! covolume. Starting from a greedy basis, every sample vector is reduced
//! modulo the current lattice; a nonzero centered residual `Σ fᵢ bᵢ` with
//! `|f_j|` maximal replaces `b_j`, which multiplies the covolume by `|f_j| ≤ 1/2`.
//! The basis is LLL-reduced after every replacement.

#![allow(clippy::needless_range_loop)]

use serde::{Deserialize, Serialize};

use super::spectrum::SpectrumSample;
use crate::error::{Error, Result};
use crate::product::VectorR;

pub const DEFAULT_REDUCTION_DEPTH: usize = 12;
/// Number of shortest sample vectors fed to the reduction.
pub const REDUCTION_POOL: usize = 256;
/// Fractional coordinates below this count as integral.
const FRACTION_NOISE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonArithmeticityReport {
    pub dense_heuristic: bool,
    pub lattice_covolume: f64,
    pub rank: usize,
    pub threshold: f64,
    pub depth: usize,
    pub rounds_used: usize,
    pub basis: Vec<VectorR>,
}

pub fn non_arithmeticity_report(s: &SpectrumSample, threshold: f64) -> Result<NonArithmeticityReport> {
    non_arithmeticity_report_with_depth(&s.vectors, threshold, DEFAULT_REDUCTION_DEPTH)
}

pub fn non_arithmeticity_report_with_depth(
    vectors: &[VectorR],
    threshold: f64,
    depth: usize,
) -> Result<NonArithmeticityReport> {
    let Some(first) = vectors.first() else {
        return Err(Error::InvalidParameter("empty spectrum sample".into()));
    };
    let r = first.dim();
    if let Some(v) = vectors.iter().find(|v| v.dim() != r) {
        return Err(Error::DimensionMismatch {
            expected: r,
            got: v.dim(),
        });
    }
    let mut pool: Vec<&VectorR> = vectors.iter().collect();
    pool.sort_by(|a, b| a.norm2().total_cmp(&b.norm2()));
    pool.truncate(REDUCTION_POOL);
    let scale = pool.iter().fold(0.0f64, |m, v| m.max(v.norm_sup()));

    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in &pool {
        if basis.len() == r {
            break;
        }
        let mut cand = basis.clone();
        cand.push(v.0.clone());
        if gram_det(&cand).sqrt() > 1e-9 * v.norm2() * gram_det(&basis).sqrt().max(1e-300) {
            basis = cand;
        }
    }
    let rank = basis.len();
    let mut report = NonArithmeticityReport {
        dense_heuristic: false,
        lattice_covolume: if rank == 0 { 0.0 } else { gram_det(&basis).sqrt() },
        rank,
        threshold,
        depth,
        rounds_used: 0,
        basis: Vec::new(),
    };
    if rank < r {
        report.basis = basis.into_iter().map(VectorR).collect();
        return Ok(report);
    }
    lll(&mut basis);
    let floor = 1e-9 * scale.powi(r as i32);
    'rounds: for round in 1..=depth {
        report.rounds_used = round;
        let mut changed = false;
        for v in &pool {
            let Some(c) = solve(&basis, &v.0) else { break 'rounds };
            let frac: Vec<f64> = c.iter().map(|x| x - x.round()).collect();
            let (j, fj) = frac
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .map(|(j, f)| (j, *f))
                .expect("rank ≥ 1");
            if fj.abs() <= FRACTION_NOISE {
                continue;
            }
            let w: Vec<f64> = (0..r)
                .map(|k| (0..r).map(|i| frac[i] * basis[i][k]).sum())
                .collect();
            basis[j] = w;
            lll(&mut basis);
            changed = true;
            if gram_det(&basis).sqrt() < floor {
                break 'rounds;
            }
        }
        if !changed {
            break;
        }
    }
    report.lattice_covolume = gram_det(&basis).sqrt();
    report.dense_heuristic = report.lattice_covolume < threshold;
    report.basis = basis.into_iter().map(VectorR).collect();
    Ok(report)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Determinant of the Gram matrix of the rows, by elimination.
fn gram_det(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let mut g: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| dot(&rows[i], &rows[j])).collect())
        .collect();
    determinant(&mut g).max(0.0)
}

fn determinant(m: &mut [Vec<f64>]) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for col in 0..n {
        let p = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .expect("nonempty range");
        if m[p][col] == 0.0 {
            return 0.0;
        }
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    det
}

/// Coefficients `c` with `Σ cᵢ rowᵢ = v`; `None` if the rows are singular.
fn solve(rows: &[Vec<f64>], v: &[f64]) -> Option<Vec<f64>> {
    let n = rows.len();
    // augmented system with the basis vectors as columns
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut row: Vec<f64> = (0..n).map(|i| rows[i][k]).collect();
            row.push(v[k]);
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[p][col] == 0.0 {
            return None;
        }
        a.swap(p, col);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..=n {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

/// LLL reduction (δ = 3/4) of the rows, in place.
fn lll(b: &mut [Vec<f64>]) {
    let n = b.len();
    if n < 2 {
        return;
    }
    let gso = |b: &[Vec<f64>]| {
        let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut mu = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut v = b[i].clone();
            for j in 0..i {
                mu[i][j] = dot(&b[i], &star[j]) / dot(&star[j], &star[j]);
                for (x, s) in v.iter_mut().zip(&star[j]) {
                    *x -= mu[i][j] * s;
                }
            }
            star.push(v);
        }
        (star, mu)
    };
    let (mut star, mut mu) = gso(b);
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 10_000 {
        guard += 1;
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= q * y;
                }
                (star, mu) = gso(b);
            }
        }
        let lhs = dot(&star[k], &star[k]);
        let rhs = (0.75 - mu[k][k - 1] * mu[k][k - 1]) * dot(&star[k - 1], &star[k - 1]);
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            (star, mu) = gso(b);
            k = (k - 1).max(1);
        }
    }
}
