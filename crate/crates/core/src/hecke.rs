//! Hecke operators on spherical-harmonic spaces and their joint eigenbases.
//!
//! The level-n operator averages a function over the rotations coming from
//! the norm-n odd Lipschitz quaternions,
//!
//!   (T_n f)(x) = 1/2 sum_{alpha in R(n)} f(alpha . x),
//!
//! and commutes with the Laplacian, so it restricts to each degree-k space
//! H_k as a (2k+1) x (2k+1) symmetric matrix in the fixed real basis. These
//! matrices commute across levels and obey the classical composition law
//! T_r T_s = sum_{d | (r,s)} d T_{rs/d^2} for r, s = 1 mod 4.
//!
//! A form of K-type weight l on the group is f(g) = sqrt(2k+1) sum_m c_m
//! Dbar^k_{m,l}(g), where Dbar is the Wigner matrix carried to the real row
//! basis; left translation acts on the coefficient vector c through the same
//! matrix for every l, because the Hecke average commutes with the right
//! K-action. So one diagonalization per degree covers all weights.

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Mat};
use crate::quaternion::{enumerate_rn, rotation_of};
use crate::tol;
use crate::wigner::{accumulate_rotation_stack, zero_stack};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use crate::wigner::rotation_rep_matrix;

/// The matrix of T_n on the degree-k harmonics in the real basis.
#[derive(Clone, Debug)]
pub struct HeckeMatrix {
    pub n: u64,
    pub k: u32,
    pub entries: Mat,
}

/// T_n restricted to H_k. Errors on levels with no lattice points.
pub fn hecke_matrix(n: u64, k: u32) -> Result<HeckeMatrix> {
    let mut stack = hecke_matrix_stack(n, k)?;
    Ok(stack.pop().unwrap())
}

/// T_n on every degree 0..=kmax in one pass over the lattice points.
pub fn hecke_matrix_stack(n: u64, kmax: u32) -> Result<Vec<HeckeMatrix>> {
    let elements = enumerate_rn(n);
    if elements.is_empty() {
        return Err(Error::EmptyLevel(n));
    }
    let mut mats = zero_stack(kmax);
    for alpha in &elements {
        let r = rotation_of(alpha).expect("norm-n element is nonzero");
        accumulate_rotation_stack(&mut mats, &r, 0.5);
    }
    Ok(mats
        .into_iter()
        .enumerate()
        .map(|(k, entries)| HeckeMatrix { n, k: k as u32, entries })
        .collect())
}

/// Joint eigendata of a family of commuting Hecke operators on H_k.
#[derive(Clone, Debug)]
pub struct HeckeMaassBasis {
    pub k: u32,
    /// Laplace eigenvalue k(k+1) shared by the whole space H_k.
    pub laplace_eigenvalue: f64,
    pub levels: Vec<u64>,
    /// `eigenvalues[i][j]` is the T_{levels[i]} eigenvalue of vector j.
    pub eigenvalues: Vec<Vec<f64>>,
    /// Columns are the orthonormal joint eigenvectors (coefficients in the
    /// real harmonic basis).
    pub vectors: Mat,
}

impl HeckeMaassBasis {
    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    /// Raw eigenvalue lambda_j(n) for a level present in the basis.
    pub fn lambda(&self, j: usize, n: u64) -> Result<f64> {
        if n == 1 {
            return Ok(1.0);
        }
        let idx = self
            .levels
            .iter()
            .position(|&lv| lv == n)
            .ok_or(Error::MissingLevel(n))?;
        Ok(self.eigenvalues[idx][j])
    }

    /// Normalized eigenvalue eta_j(n) = lambda_j(n) / sqrt(n).
    pub fn eta(&self, j: usize, n: u64) -> Result<f64> {
        Ok(self.lambda(j, n)? / (n as f64).sqrt())
    }
}

/// Simultaneously diagonalize T_n on H_k for every requested level.
///
/// Strategy: diagonalize a fixed seeded random positive combination of the
/// operators, then refine any residual eigenvalue cluster by diagonalizing
/// each remaining operator restricted to the cluster. Deterministic for a
/// given seed; vectors are sorted by their eigenvalue tuples and
/// sign-canonicalized.
pub fn joint_eigenbasis(k: u32, levels: &[u64], seed: u64) -> Result<HeckeMaassBasis> {
    let mats: Vec<HeckeMatrix> =
        levels.iter().map(|&n| hecke_matrix(n, k)).collect::<Result<_>>()?;
    joint_eigenbasis_from(&mats, k, levels, seed)
}

/// Joint eigendata for every degree 0..=kmax at once. Each level's matrix
/// stack is built in a single pass over its lattice points, so the whole
/// range costs what the largest degree costs, not its fourth power.
pub fn joint_eigenbasis_range(
    kmax: u32,
    levels: &[u64],
    seed: u64,
) -> Result<std::collections::BTreeMap<u32, HeckeMaassBasis>> {
    let stacks: Vec<Vec<HeckeMatrix>> =
        levels.iter().map(|&n| hecke_matrix_stack(n, kmax)).collect::<Result<_>>()?;
    let mut out = std::collections::BTreeMap::new();
    for k in 0..=kmax {
        let mats: Vec<HeckeMatrix> =
            stacks.iter().map(|s| s[k as usize].clone()).collect();
        out.insert(k, joint_eigenbasis_from(&mats, k, levels, seed)?);
    }
    Ok(out)
}

fn joint_eigenbasis_from(
    mats: &[HeckeMatrix],
    k: u32,
    levels: &[u64],
    seed: u64,
) -> Result<HeckeMaassBasis> {
    let dim = 2 * k as usize + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6865636b65);
    let mut combo = Mat::zeros(dim, dim);
    for hm in mats {
        let gamma: f64 = rng.gen_range(0.5..1.5);
        // normalize each operator into the combination so no level dominates
        combo.add_scaled(&hm.entries, gamma / hm.entries.frobenius_norm().max(1.0));
    }

    let (combo_vals, mut vectors) = symmetric_eigen(&combo)?;

    // refine clusters of the combination through each operator in turn
    let mut clusters = cluster_ranges(&combo_vals, tol::CLUSTER_GAP);
    for hm in mats {
        let mut next_clusters = Vec::new();
        for (lo, hi) in clusters {
            if hi - lo <= 1 {
                next_clusters.push((lo, hi));
                continue;
            }
            // restrict the operator to the cluster span and rediagonalize
            let width = hi - lo;
            let mut block = Mat::zeros(width, width);
            let cols: Vec<Vec<f64>> = (lo..hi).map(|j| vectors.col(j)).collect();
            let images: Vec<Vec<f64>> = cols.iter().map(|c| hm.entries.matvec(c)).collect();
            for a in 0..width {
                for b in 0..width {
                    let dot: f64 = cols[a].iter().zip(&images[b]).map(|(x, y)| x * y).sum();
                    block.set(a, b, dot);
                }
            }
            let (bvals, bvecs) = symmetric_eigen(&block)?;
            // rotate the cluster columns
            for i in 0..dim {
                let mut updated = vec![0.0; width];
                for (bj, u) in updated.iter_mut().enumerate() {
                    for a in 0..width {
                        *u += vectors.get(i, lo + a) * bvecs.get(a, bj);
                    }
                }
                for (bj, u) in updated.into_iter().enumerate() {
                    vectors.set(i, lo + bj, u);
                }
            }
            for (sub_lo, sub_hi) in cluster_ranges(&bvals, tol::CLUSTER_GAP) {
                next_clusters.push((lo + sub_lo, lo + sub_hi));
            }
        }
        next_clusters.sort();
        clusters = next_clusters;
    }

    // eigenvalues per level, and the joint residual gate
    let mut eigenvalues = vec![vec![0.0; dim]; levels.len()];
    for (li, hm) in mats.iter().enumerate() {
        let mv = hm.entries.matmul(&vectors);
        for j in 0..dim {
            let mut lam = 0.0;
            for i in 0..dim {
                lam += vectors.get(i, j) * mv.get(i, j);
            }
            let mut res = 0.0f64;
            for i in 0..dim {
                res += (mv.get(i, j) - lam * vectors.get(i, j)).powi(2);
            }
            let res = res.sqrt();
            if res > tol::JOINT_RESIDUAL {
                return Err(Error::DegeneracyUnresolved {
                    k,
                    level: hm.n,
                    residual: res,
                    tol: tol::JOINT_RESIDUAL,
                });
            }
            eigenvalues[li][j] = lam;
        }
    }

    // deterministic order: sort by the eigenvalue tuple across levels
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&x, &y| {
        for ev in &eigenvalues {
            match ev[x].partial_cmp(&ev[y]).unwrap() {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });
    let mut sorted_vectors = Mat::zeros(dim, dim);
    let mut sorted_eigenvalues = vec![vec![0.0; dim]; levels.len()];
    for (new_j, &old_j) in order.iter().enumerate() {
        let colv = vectors.col(old_j);
        let mut lead = 0usize;
        for i in 1..dim {
            if colv[i].abs() > colv[lead].abs() {
                lead = i;
            }
        }
        let sign = if colv[lead] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..dim {
            sorted_vectors.set(i, new_j, sign * colv[i]);
        }
        for li in 0..levels.len() {
            sorted_eigenvalues[li][new_j] = eigenvalues[li][old_j];
        }
    }

    Ok(HeckeMaassBasis {
        k,
        laplace_eigenvalue: (k as f64) * (k as f64 + 1.0),
        levels: levels.to_vec(),
        eigenvalues: sorted_eigenvalues,
        vectors: sorted_vectors,
    })
}

fn cluster_ranges(sorted_vals: &[f64], gap: f64) -> Vec<(usize, usize)> {
    let n = sorted_vals.len();
    let mut out = Vec::new();
    let mut lo = 0;
    for i in 1..=n {
        if i == n || (sorted_vals[i] - sorted_vals[i - 1]).abs() > gap {
            out.push((lo, i));
            lo = i;
        }
    }
    out
}

/// Character of the (2k+1)-dimensional rotation representation at a rotation
/// by angle theta in [0, pi]: sin((2k+1) theta/2) / sin(theta/2), with the
/// limit 2k+1 at the identity.
pub fn rotation_character(k: u32, theta: f64) -> f64 {
    let half = 0.5 * theta;
    if half.sin().abs() < 1e-9 {
        return 2.0 * k as f64 + 1.0;
    }
    ((2.0 * k as f64 + 1.0) * half).sin() / half.sin()
}

/// Trace of T_n on H_k predicted from rotation angles alone:
/// 1/2 sum_alpha character_k(angle of R_alpha).
pub fn hecke_trace_from_angles(n: u64, k: u32) -> Result<f64> {
    let elements = enumerate_rn(n);
    if elements.is_empty() {
        return Err(Error::EmptyLevel(n));
    }
    let mut acc = 0.0;
    for alpha in &elements {
        let theta = rotation_of(alpha)?.angle();
        acc += rotation_character(k, theta);
    }
    Ok(0.5 * acc)
}
