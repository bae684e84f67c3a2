//! Dense fixed points of linear maps that preserve a product of simplices.

use crate::error::{Error, Result};

/// Iterations with a residual contraction worse than this count toward a plateau.
const PLATEAU_RATIO: f64 = 0.5;
const PLATEAU_RUN: usize = 6;
const MAX_PERIOD: usize = 64;
const MAX_AVERAGED_ITERS: usize = 10_000;

/// y = M x for a row-major n×n matrix.
pub fn mat_vec(m: &[f64], n: usize, x: &[f64], y: &mut [f64]) {
    for (r, yr) in y.iter_mut().enumerate() {
        *yr = m[r * n..(r + 1) * n]
            .iter()
            .zip(x)
            .map(|(a, b)| a * b)
            .sum();
    }
}

pub fn residual(m: &[f64], n: usize, x: &[f64]) -> f64 {
    let mut y = vec![0.0; n];
    mat_vec(m, n, x, &mut y);
    y.iter()
        .zip(x)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Clamps negative round-off and rescales each block of `block` entries to sum 1.
fn renormalize(x: &mut [f64], block: usize) {
    for chunk in x.chunks_mut(block) {
        chunk.iter_mut().for_each(|v| *v = v.max(0.0));
        let s: f64 = chunk.iter().sum();
        if s > 0.0 {
            chunk.iter_mut().for_each(|v| *v /= s);
        }
    }
}

/// Finds x with M x = x where x is a stack of probability vectors of length `block`.
///
/// Power iteration from `seed`; when the residual stops contracting, falls back
/// to a direct solve of (M − I)x = 0 with one normalization row per block, and
/// for maps with several fixed points to a period-averaged iterate from the
/// uniform point.
pub fn fixed_point_dense(
    m: &[f64],
    n: usize,
    block: usize,
    seed: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    debug_assert_eq!(m.len(), n * n);
    debug_assert_eq!(n % block, 0);
    let mut x = seed.to_vec();
    let mut y = vec![0.0; n];
    let mut prev = f64::INFINITY;
    let mut slow = 0;
    for _ in 0..max_iter {
        mat_vec(m, n, &x, &mut y);
        let res = y
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if res <= tol {
            renormalize(&mut x, block);
            if residual(m, n, &x) <= tol {
                return Ok(x);
            }
        }
        if res > PLATEAU_RATIO * prev {
            slow += 1;
            if slow >= PLATEAU_RUN {
                break;
            }
        } else {
            slow = 0;
        }
        prev = res;
        std::mem::swap(&mut x, &mut y);
    }
    if let Some(mut x) = solve_unique(m, n, block) {
        renormalize(&mut x, block);
        if residual(m, n, &x) <= tol {
            return Ok(x);
        }
    }
    periodic_average(m, n, block, tol, max_iter)
}

/// Direct solve; `None` when the fixed space is not a single point of the product of simplices.
fn solve_unique(m: &[f64], n: usize, block: usize) -> Option<Vec<f64>> {
    let groups = n / block;
    let rows = n + groups;
    let mut a = vec![0.0; rows * n];
    let mut b = vec![0.0; rows];
    for r in 0..n {
        for c in 0..n {
            a[r * n + c] = m[r * n + c] - if r == c { 1.0 } else { 0.0 };
        }
    }
    for g in 0..groups {
        for c in g * block..(g + 1) * block {
            a[(n + g) * n + c] = 1.0;
        }
        b[n + g] = 1.0;
    }
    let scale = a.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let eps = 1e-11 * scale * rows as f64;
    let mut pivots = Vec::with_capacity(n);
    let mut rank = 0;
    for c in 0..n {
        let (best, val) =
            (rank..rows)
                .map(|r| (r, a[r * n + c].abs()))
                .fold(
                    (rank, -1.0),
                    |acc, cur| if cur.1 > acc.1 { cur } else { acc },
                );
        if val <= eps {
            continue;
        }
        if best != rank {
            for k in 0..n {
                a.swap(best * n + k, rank * n + k);
            }
            b.swap(best, rank);
        }
        let p = a[rank * n + c];
        for r in rank + 1..rows {
            let f = a[r * n + c] / p;
            if f != 0.0 {
                for k in c..n {
                    a[r * n + k] -= f * a[rank * n + k];
                }
                b[r] -= f * b[rank];
            }
        }
        pivots.push(c);
        rank += 1;
    }
    if rank < n || (rank..rows).any(|r| b[r].abs() > 1e-8) {
        return None;
    }
    let mut x = vec![0.0; n];
    for (r, &c) in pivots.iter().enumerate().rev() {
        let s: f64 = (c + 1..n).map(|k| a[r * n + k] * x[k]).sum();
        x[c] = (b[r] - s) / a[r * n + c];
    }
    Some(x)
}

/// Iterates from the uniform point and returns the first average of the last
/// L iterates (L ≤ 64) that is fixed within `tol`.
fn periodic_average(
    m: &[f64],
    n: usize,
    block: usize,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let mut history: std::collections::VecDeque<Vec<f64>> = std::collections::VecDeque::new();
    let mut x = vec![1.0 / block as f64; n];
    let mut y = vec![0.0; n];
    let iters = max_iter.min(MAX_AVERAGED_ITERS);
    for _ in 0..iters {
        history.push_back(x.clone());
        if history.len() > MAX_PERIOD {
            history.pop_front();
        }
        let mut avg = vec![0.0; n];
        for (l, h) in history.iter().rev().enumerate() {
            for (s, v) in avg.iter_mut().zip(h) {
                *s += v;
            }
            let mut cand: Vec<f64> = avg.iter().map(|s| s / (l + 1) as f64).collect();
            renormalize(&mut cand, block);
            if residual(m, n, &cand) <= tol {
                return Ok(cand);
            }
        }
        mat_vec(m, n, &x, &mut y);
        std::mem::swap(&mut x, &mut y);
    }
    Err(Error::NoConvergence(iters))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_state_chain() {
        let m = [0.5, 1.0, 0.5, 0.0];
        let x = fixed_point_dense(&m, 2, 2, &[0.5, 0.5], 1e-12, 100_000).unwrap();
        assert!((x[0] - 2.0 / 3.0).abs() < 1e-10 && (x[1] - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn swap_permutation_uses_period_average() {
        // Two blocks of size 2 exchanged: every x with equal blocks is fixed.
        let mut m = vec![0.0; 16];
        m[2] = 1.0;
        m[4 + 3] = 1.0;
        m[8] = 1.0;
        m[12 + 1] = 1.0;
        let x = fixed_point_dense(&m, 4, 2, &[1.0, 0.0, 0.0, 1.0], 1e-10, 100_000).unwrap();
        assert!(residual(&m, 4, &x) <= 1e-10);
        assert!((x[0] - x[2]).abs() < 1e-12);
    }
}
