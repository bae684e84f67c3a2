//! The transform polytope Q over one player's policy space X.
//!
//! A member Q acts on x ∈ X (flat over (θ, a)) through the dense entries
//! Q((θ,a),(θ',a')) = W(θ,θ')·blocks[θ,θ',a'](a): the type mixer W chooses a
//! reported type and each block re-maps the recommended action.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::TypeWisePolicy;
use crate::linalg;
use crate::{DERIVED_TOL, INGEST_TOL};

pub const FIXED_POINT_MAX_ITER: usize = 100_000;
/// Vertex policies checked exhaustively by [`linear_to_transform`] up to this count.
pub const VERTEX_CAP: usize = 100_000;
const SAMPLED_VERTICES: usize = 10_000;

/// A type misreport ψ with an action swap φ; `phi[θ][a']` is the action played
/// by true type θ when recommended a' for the reported type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviationPair {
    pub psi: Vec<usize>,
    pub phi: Vec<Vec<usize>>,
}

impl DeviationPair {
    pub fn identity(n_types: usize, n_actions: usize) -> Self {
        DeviationPair {
            psi: (0..n_types).collect(),
            phi: vec![(0..n_actions).collect(); n_types],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapTransform {
    n_types: usize,
    n_actions: usize,
    w: Vec<f64>,
    blocks: Vec<f64>,
}

impl SwapTransform {
    pub fn n_types(&self) -> usize {
        self.n_types
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn w(&self, t: usize, tp: usize) -> f64 {
        self.w[t * self.n_types + tp]
    }

    /// blocks[θ,θ',a'] as a probability vector over a.
    pub fn block(&self, t: usize, tp: usize, ap: usize) -> &[f64] {
        let k = ((t * self.n_types + tp) * self.n_actions + ap) * self.n_actions;
        &self.blocks[k..k + self.n_actions]
    }

    /// Dense row-major (|Θ||A|)² matrix.
    pub fn dense(&self) -> Vec<f64> {
        let (nt, na) = (self.n_types, self.n_actions);
        let n = nt * na;
        let mut q = vec![0.0; n * n];
        for t in 0..nt {
            for tp in 0..nt {
                let w = self.w(t, tp);
                for ap in 0..na {
                    let b = self.block(t, tp, ap);
                    for a in 0..na {
                        q[(t * na + a) * n + tp * na + ap] = w * b[a];
                    }
                }
            }
        }
        q
    }

    /// Q x for a flat x over (θ, a).
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n_types * self.n_actions;
        let mut y = vec![0.0; n];
        linalg::mat_vec(&self.dense(), n, x, &mut y);
        y
    }
}

/// The 0/1 transform with Q((θ,a),(θ',a')) = 1 iff θ' = ψ(θ) and a = φ(θ,a').
pub fn deviation_to_transform(d: &DeviationPair, n_actions: usize) -> SwapTransform {
    let nt = d.psi.len();
    let mut w = vec![0.0; nt * nt];
    let mut blocks = vec![0.0; nt * nt * n_actions * n_actions];
    for t in 0..nt {
        w[t * nt + d.psi[t]] = 1.0;
        for tp in 0..nt {
            for ap in 0..n_actions {
                blocks[((t * nt + tp) * n_actions + ap) * n_actions + d.phi[t][ap]] = 1.0;
            }
        }
    }
    SwapTransform {
        n_types: nt,
        n_actions,
        w,
        blocks,
    }
}

fn check_prob(v: &[f64], what: impl Fn() -> String) -> Result<()> {
    let s: f64 = v.iter().sum();
    if v.iter().any(|x| !(*x >= 0.0)) || (s - 1.0).abs() > INGEST_TOL {
        return Err(Error::NotStochastic(format!("{} (sum {s})", what())));
    }
    Ok(())
}

/// Builds Q from `w[θ]` over Θ and `y[(θ·|Θ| + θ')·|A| + a']` over A.
pub fn assemble_transform(w: &[Vec<f64>], y: &[Vec<f64>]) -> Result<SwapTransform> {
    let nt = w.len();
    let na = y.first().map_or(0, Vec::len);
    if nt == 0
        || na == 0
        || y.len() != nt * nt * na
        || w.iter().any(|r| r.len() != nt)
        || y.iter().any(|r| r.len() != na)
    {
        return Err(Error::BadDims(format!(
            "w has {nt} rows, y has {} vectors",
            y.len()
        )));
    }
    for (t, r) in w.iter().enumerate() {
        check_prob(r, || format!("w[{t}]"))?;
    }
    for (k, r) in y.iter().enumerate() {
        check_prob(r, || format!("y[{k}]"))?;
    }
    Ok(SwapTransform {
        n_types: nt,
        n_actions: na,
        w: w.concat(),
        blocks: y.concat(),
    })
}

/// x ∈ X with ‖Qx − x‖_∞ ≤ tol, starting power iteration from `seed`.
pub fn fixed_point(q: &SwapTransform, tol: f64, seed: &TypeWisePolicy) -> Result<TypeWisePolicy> {
    let (nt, na) = (q.n_types, q.n_actions);
    if seed.n_types() != nt || seed.n_actions() != na {
        return Err(Error::BadDims(
            "seed policy does not match the transform".into(),
        ));
    }
    let x = linalg::fixed_point_dense(
        &q.dense(),
        nt * na,
        na,
        seed.as_slice(),
        tol,
        FIXED_POINT_MAX_ITER,
    )?;
    TypeWisePolicy::from_derived(nt, na, x)
}

/// Every vertex of X (one action per type), or a deterministic sample when there are too many.
fn vertex_policies(nt: usize, na: usize) -> Vec<Vec<usize>> {
    let count = (na as u128).checked_pow(nt as u32).unwrap_or(u128::MAX);
    if count <= VERTEX_CAP as u128 {
        let radix = crate::radix::Radix::new(&vec![na; nt]);
        (0..radix.total()).map(|k| radix.decode(k)).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        (0..SAMPLED_VERTICES)
            .map(|_| (0..nt).map(|_| rng.gen_range(0..na)).collect())
            .collect()
    }
}

fn vertex_vector(acts: &[usize], na: usize) -> Vec<f64> {
    TypeWisePolicy::pure(na, acts).as_slice().to_vec()
}

/// Converts a matrix that maps X into X into a member of Q with the same action on X.
///
/// Each row (θ,a) is shifted block by block: for every θ' other than the last
/// type, the row's minimum over a' is subtracted from that block and the total
/// is added to the last type's block. Shifts that are constant across a' leave
/// M x unchanged on X because each type's row of x sums to 1.
pub fn linear_to_transform(m: &[f64], n_types: usize, n_actions: usize) -> Result<SwapTransform> {
    let (nt, na) = (n_types, n_actions);
    let n = nt * na;
    if nt == 0 || na == 0 || m.len() != n * n {
        return Err(Error::BadDims(format!(
            "matrix of {} entries for {nt} types x {na} actions",
            m.len()
        )));
    }
    let mut y = vec![0.0; n];
    for v in vertex_policies(nt, na) {
        linalg::mat_vec(m, n, &vertex_vector(&v, na), &mut y);
        for t in 0..nt {
            let row = &y[t * na..(t + 1) * na];
            let s: f64 = row.iter().sum();
            if row
                .iter()
                .any(|p| *p < -DERIVED_TOL || *p > 1.0 + DERIVED_TOL)
                || (s - 1.0).abs() > DERIVED_TOL
            {
                return Err(Error::NotValidOnX(format!(
                    "vertex {v:?} maps to a row {t} of sum {s}"
                )));
            }
        }
    }

    let star = nt - 1;
    let mut q = m.to_vec();
    for r in 0..n {
        let row = &mut q[r * n..(r + 1) * n];
        let mut moved = 0.0;
        for tp in 0..star {
            let blk = &mut row[tp * na..(tp + 1) * na];
            let c = blk.iter().copied().fold(f64::INFINITY, f64::min);
            blk.iter_mut().for_each(|e| *e -= c);
            moved += c;
        }
        row[star * na..].iter_mut().for_each(|e| *e += moved);
    }
    if let Some((k, e)) = q
        .iter()
        .enumerate()
        .find(|(_, e)| **e < -DERIVED_TOL || **e > 1.0 + DERIVED_TOL)
    {
        return Err(Error::NotShiftable(format!(
            "entry ({}, {}) = {e}",
            k / n,
            k % n
        )));
    }
    q.iter_mut().for_each(|e| *e = e.clamp(0.0, 1.0));

    let mut w = vec![0.0; nt * nt];
    let mut blocks = vec![0.0; nt * nt * na * na];
    for t in 0..nt {
        for tp in 0..nt {
            let col_sum =
                |ap: usize| -> f64 { (0..na).map(|a| q[(t * na + a) * n + tp * na + ap]).sum() };
            let sums: Vec<f64> = (0..na).map(col_sum).collect();
            let mean = sums.iter().sum::<f64>() / na as f64;
            if sums.iter().any(|s| (s - mean).abs() > DERIVED_TOL) {
                return Err(Error::NotShiftable(format!(
                    "block ({t},{tp}) has unequal column sums {sums:?}"
                )));
            }
            w[t * nt + tp] = mean;
            for ap in 0..na {
                let k = ((t * nt + tp) * na + ap) * na;
                if sums[ap] > 1e-12 {
                    for a in 0..na {
                        blocks[k + a] = q[(t * na + a) * n + tp * na + ap] / sums[ap];
                    }
                } else {
                    blocks[k..k + na]
                        .iter_mut()
                        .for_each(|b| *b = 1.0 / na as f64);
                }
            }
        }
        let row = &mut w[t * nt..(t + 1) * nt];
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > DERIVED_TOL {
            return Err(Error::NotShiftable(format!(
                "type mixer row {t} sums to {s}"
            )));
        }
        row.iter_mut().for_each(|e| *e /= s);
    }
    Ok(SwapTransform {
        n_types: nt,
        n_actions: na,
        w,
        blocks,
    })
}

/// Largest ‖Qx − Mx‖_∞ over the vertex policies used by [`linear_to_transform`].
pub fn vertex_disagreement(q: &SwapTransform, m: &[f64]) -> f64 {
    let (nt, na) = (q.n_types, q.n_actions);
    let n = nt * na;
    let mut mx = vec![0.0; n];
    vertex_policies(nt, na)
        .iter()
        .map(|v| {
            let x = vertex_vector(v, na);
            linalg::mat_vec(m, n, &x, &mut mx);
            q.apply(&x)
                .iter()
                .zip(&mx)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_deviation_is_identity_matrix() {
        let q = deviation_to_transform(&DeviationPair::identity(2, 3), 3).dense();
        for r in 0..6 {
            for c in 0..6 {
                assert_eq!(q[r * 6 + c], if r == c { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn constant_swap_single_type() {
        let d = DeviationPair {
            psi: vec![0],
            phi: vec![vec![0, 0]],
        };
        assert_eq!(
            deviation_to_transform(&d, 2).dense(),
            vec![1.0, 1.0, 0.0, 0.0]
        );
    }

    #[test]
    fn type_swap_is_block_permutation() {
        let d = DeviationPair {
            psi: vec![1, 0],
            phi: vec![vec![0, 1], vec![0, 1]],
        };
        let q = deviation_to_transform(&d, 2).dense();
        let expected = [
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0,
        ];
        assert_eq!(q, expected);
    }

    #[test]
    fn uniform_assembly() {
        let w = vec![vec![0.5, 0.5]; 2];
        let y = vec![vec![1.0 / 3.0; 3]; 12];
        let q = assemble_transform(&w, &y).unwrap().dense();
        assert!(q.iter().all(|e| (e - 1.0 / 6.0).abs() < 1e-15));
    }

    #[test]
    fn assembly_rejects_non_stochastic() {
        let w = vec![vec![0.5, 0.6]; 2];
        let y = vec![vec![0.5; 2]; 8];
        assert!(matches!(
            assemble_transform(&w, &y),
            Err(Error::NotStochastic(_))
        ));
    }

    #[test]
    fn fixed_point_examples() {
        let d = DeviationPair::identity(2, 2);
        let seed = TypeWisePolicy::new(2, 2, vec![0.3, 0.7, 0.9, 0.1]).unwrap();
        let x = fixed_point(&deviation_to_transform(&d, 2), 1e-10, &seed).unwrap();
        assert_eq!(x, seed);

        let u = assemble_transform(&[vec![1.0]], &[vec![0.5, 0.5], vec![1.0, 0.0]]).unwrap();
        let x = fixed_point(&u, 1e-10, &TypeWisePolicy::uniform(1, 2)).unwrap();
        assert!((x.get(0, 0) - 2.0 / 3.0).abs() < 1e-9);
        assert!((x.get(0, 1) - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_transform_fixes_uniform() {
        let w = vec![vec![1.0 / 3.0; 3]; 3];
        let y = vec![vec![0.25; 4]; 36];
        let q = assemble_transform(&w, &y).unwrap();
        let x = fixed_point(
            &q,
            1e-10,
            &TypeWisePolicy::new(
                3,
                4,
                (0..12)
                    .map(|k| if k % 4 == 0 { 1.0 } else { 0.0 })
                    .collect(),
            )
            .unwrap(),
        )
        .unwrap();
        assert!(x.as_slice().iter().all(|p| (p - 0.25).abs() < 1e-10));
    }

    #[test]
    fn linear_to_transform_keeps_members() {
        let d = DeviationPair {
            psi: vec![1, 1, 0],
            phi: vec![vec![1, 0], vec![0, 0], vec![1, 1]],
        };
        let q = deviation_to_transform(&d, 2);
        let m = q.dense();
        let out = linear_to_transform(&m, 3, 2).unwrap();
        assert!(vertex_disagreement(&out, &m) <= 1e-12);
    }

    #[test]
    fn linear_to_transform_repairs_a_negative_shift() {
        let d = DeviationPair {
            psi: vec![0, 1],
            phi: vec![vec![0, 1], vec![1, 0]],
        };
        let mut m = deviation_to_transform(&d, 2).dense();
        // +0.2 on the (θ,a)-row's first block and −0.2 on its second block.
        for r in 0..4 {
            for c in 0..2 {
                m[r * 4 + c] += 0.2;
                m[r * 4 + 2 + c] -= 0.2;
            }
        }
        assert!(m.iter().any(|e| *e < 0.0));
        let out = linear_to_transform(&m, 2, 2).unwrap();
        assert!(out.dense().iter().all(|e| (0.0..=1.0).contains(e)));
        assert!(vertex_disagreement(&out, &m) <= 1e-9);
    }

    #[test]
    fn linear_to_transform_rejects_invalid_maps() {
        let m = vec![2.0, 0.0, 0.0, 0.0];
        assert!(matches!(
            linear_to_transform(&m, 1, 2),
            Err(Error::NotValidOnX(_))
        ));
    }
}
