//! Brute-force construction of the VBS state and its reduced density matrix.
//!
//! The state is ∏_edges (a†_i b†_j − b†_i a†_j)|vac⟩. Expanding the product
//! over the 2^|E| edge orientations gives, per basis configuration of boson
//! occupations, an integer orientation count times a fixed product of
//! √(n_a! n_b!) normalizations. The Gram matrix of subsystem A against the
//! traced-out B is therefore exactly integer after pulling the per-index
//! normalization weights out, and floating point enters only at the final
//! diagonalization — fully independent of the overlap-matrix route.

use crate::dense::Mat;
use crate::graph::SymmetricGraph;
use crate::spectrum::{eigvals_symmetric, entropy_from_spectrum, EntropySpectrum};
use crate::{Error, Result};

/// Orientation-enumeration budget: 2^16 edges.
pub const MAX_EDGES: usize = 16;
/// Basis budget on ∏(2S_k + 1) over all sites.
pub const MAX_TOTAL_DIM: u128 = 1_000_000;

/// Mirror a half-graph into the full reflection-symmetric graph.
/// Vertices of B are offset by the half's vertex count; one cut bond joins
/// every boundary site to its mirror image. Returns (site count, edges,
/// vertices of A).
pub fn doubled_graph(half: &SymmetricGraph) -> (usize, Vec<(usize, usize)>, Vec<usize>) {
    let n = half.n_vertices();
    let mut edges: Vec<(usize, usize)> = half.bonds().to_vec();
    for &(i, j) in half.bonds() {
        edges.push((n + i, n + j));
    }
    for &b in half.boundary() {
        edges.push((b, n + b));
    }
    (2 * n, edges, (0..n).collect())
}

/// Entropy of the cut separating `a_sites` from the rest, computed from the
/// exact reduced density matrix.
pub fn vbs_cut_entropy(
    n_sites: usize,
    edges: &[(usize, usize)],
    a_sites: &[usize],
) -> Result<EntropySpectrum> {
    let (rho, cut_size) = vbs_reduced_density(n_sites, edges, a_sites)?;
    let lam = eigvals_symmetric(&rho)?;
    let d: Vec<f64> = lam.iter().map(|&x| x.max(0.0).sqrt()).collect();
    entropy_from_spectrum(&d, cut_size)
}

/// The normalized reduced density matrix of subsystem A and the number of
/// cut edges. Basis: mixed-radix boson occupation n_a ∈ 0..=2S per A site,
/// first site slowest.
pub fn vbs_reduced_density(
    n_sites: usize,
    edges: &[(usize, usize)],
    a_sites: &[usize],
) -> Result<(Mat, usize)> {
    if edges.len() > MAX_EDGES {
        return Err(Error::BudgetExceeded(format!(
            "{} edges exceeds the 2^{MAX_EDGES} orientation budget",
            edges.len()
        )));
    }
    let mut degree = vec![0u32; n_sites];
    for &(i, j) in edges {
        if i >= n_sites || j >= n_sites || i == j {
            return Err(Error::UnsupportedGeometry(format!("bad edge ({i},{j})")));
        }
        degree[i] += 1;
        degree[j] += 1;
    }
    let dims: Vec<usize> = degree.iter().map(|&z| z as usize + 1).collect();
    let total: u128 = dims.iter().map(|&d| d as u128).product();
    if total > MAX_TOTAL_DIM {
        return Err(Error::BudgetExceeded(format!(
            "local dimension product {total} exceeds {MAX_TOTAL_DIM}"
        )));
    }

    let in_a = {
        let mut v = vec![false; n_sites];
        for &s in a_sites {
            v[s] = true;
        }
        v
    };
    let cut_size = edges.iter().filter(|&&(i, j)| in_a[i] != in_a[j]).count();
    let a_list: Vec<usize> = (0..n_sites).filter(|&s| in_a[s]).collect();
    let b_list: Vec<usize> = (0..n_sites).filter(|&s| !in_a[s]).collect();
    let dim_a: usize = a_list.iter().map(|&s| dims[s]).product();
    let dim_b: usize = b_list.iter().map(|&s| dims[s]).product();

    // ψ[iA, iB] = orientation-count integer; √(n_a! n_b!) factors are pulled
    // into per-index weights below.
    let mut amp = vec![0i64; dim_a * dim_b];
    let mut n_a = vec![0u32; n_sites];
    for mask in 0u64..(1u64 << edges.len()) {
        n_a.iter_mut().for_each(|x| *x = 0);
        let mut sign = 1i64;
        for (e, &(i, j)) in edges.iter().enumerate() {
            // (a†_i b†_j − b†_i a†_j): bit 0 takes the first term.
            if (mask >> e) & 1 == 0 {
                n_a[i] += 1;
            } else {
                n_a[j] += 1;
                sign = -sign;
            }
        }
        let ia = mixed_radix(&n_a, &a_list, &dims);
        let ib = mixed_radix(&n_a, &b_list, &dims);
        amp[ia * dim_b + ib] += sign;
    }

    let weight_a = index_weights(&a_list, &dims, &degree);
    let weight_b = index_weights(&b_list, &dims, &degree);

    // Integer Gram with B weights folded in: G = ψ diag(R_B) ψᵀ.
    let mut gram = vec![0i128; dim_a * dim_a];
    for ia in 0..dim_a {
        for ja in ia..dim_a {
            let mut s = 0i128;
            for ib in 0..dim_b {
                let x = amp[ia * dim_b + ib];
                if x == 0 {
                    continue;
                }
                let y = amp[ja * dim_b + ib];
                if y == 0 {
                    continue;
                }
                s += x as i128 * y as i128 * weight_b[ib] as i128;
            }
            gram[ia * dim_a + ja] = s;
            gram[ja * dim_a + ia] = s;
        }
    }

    // ρ_A = D G D / tr, D = diag(√R_A).
    let mut rho = Mat::zeros(dim_a);
    let sqrt_w: Vec<f64> = weight_a.iter().map(|&w| (w as f64).sqrt()).collect();
    for ia in 0..dim_a {
        for ja in 0..dim_a {
            rho.set(ia, ja, sqrt_w[ia] * gram[ia * dim_a + ja] as f64 * sqrt_w[ja]);
        }
    }
    let tr = rho.trace();
    if tr <= 0.0 {
        return Err(Error::ZeroSpectrum);
    }
    let inv = 1.0 / tr;
    for ia in 0..dim_a {
        for ja in 0..dim_a {
            rho.set(ia, ja, rho.get(ia, ja) * inv);
        }
    }
    Ok((rho, cut_size))
}

fn mixed_radix(n_a: &[u32], sites: &[usize], dims: &[usize]) -> usize {
    let mut idx = 0usize;
    for &s in sites {
        idx = idx * dims[s] + n_a[s] as usize;
    }
    idx
}

/// R[idx] = ∏_{k∈sites} n_a(k)! (2S_k − n_a(k))! decoded from the index.
fn index_weights(sites: &[usize], dims: &[usize], degree: &[u32]) -> Vec<u128> {
    let dim: usize = sites.iter().map(|&s| dims[s]).product();
    let fact = |n: u32| -> u128 { (1..=n as u128).product::<u128>().max(1) };
    let mut out = vec![0u128; dim];
    for (idx, slot) in out.iter_mut().enumerate() {
        let mut rem = idx;
        let mut r: u128 = 1;
        for &s in sites.iter().rev() {
            let c = (rem % dims[s]) as u32;
            rem /= dims[s];
            r *= fact(c) * fact(degree[s] - c);
        }
        *slot = r;
    }
    out
}

/// Spin-flip permutation n_a ↦ 2S − n_a on the A basis, for symmetry tests.
pub fn flip_permutation(n_sites: usize, edges: &[(usize, usize)], a_sites: &[usize]) -> Vec<usize> {
    let mut degree = vec![0u32; n_sites];
    for &(i, j) in edges {
        degree[i] += 1;
        degree[j] += 1;
    }
    let dims: Vec<usize> = degree.iter().map(|&z| z as usize + 1).collect();
    let mut a_list: Vec<usize> = a_sites.to_vec();
    a_list.sort();
    let dim_a: usize = a_list.iter().map(|&s| dims[s]).product();
    (0..dim_a)
        .map(|idx| {
            let mut rem = idx;
            let mut digits = Vec::with_capacity(a_list.len());
            for &s in a_list.iter().rev() {
                digits.push((s, rem % dims[s]));
                rem /= dims[s];
            }
            let mut out = 0usize;
            for &(s, c) in digits.iter().rev() {
                out = out * dims[s] + (dims[s] - 1 - c);
            }
            out
        })
        .collect()
}
