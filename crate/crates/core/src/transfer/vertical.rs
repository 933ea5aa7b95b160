//! Vertical ladders: the Z matrix of a single lattice column of growing
//! height, built by the Kronecker recursion
//!
//!   Z⁰(N+1) = Z(N) ⊗ 𝟙
//!   Zᵅ(N+1) = c₁ Z(N−1) ⊗ σᵅ ⊗ σᵅ + c₂ [Zᵅ(N)·(𝟙⊗σᵅ)] ⊗ σᵅ
//!   Z(N+1)  = Z⁰(N+1) + Σ_α Zᵅ(N+1)
//!
//! with (c₁, c₂) = (−q², −q) for the square column and (+q³, +q²) for the
//! hexagonal one, q = 1/3. Everything is kept exact: entries are integers at
//! a common power-of-three scale (i64 is ample through size 12, the same
//! ceiling the recursion is used to). σ^y is purely imaginary but always
//! appears in pairs, so Zʸ is real; tracking the real matrix [[0,−1],[1,0]]
//! in its place flips the sign of both c-coefficients for α = y.
//!
//! Z commutes with every component of the total σ-spin (it is a polynomial in
//! σ·σ couplings), so it is block diagonal over magnetization sectors and the
//! spectrum of the 2^N matrix is the union of the per-sector spectra; the
//! complement symmetry Z_{~r,~c} = Z_{r,c} makes mirror sectors isospectral.

use rayon::prelude::*;

use crate::dense::Mat;
use crate::spectrum::{entropy_from_spectrum, eigvals_symmetric, EntropySpectrum};
use crate::transfer::LadderFamily;
use crate::{Error, Result};

/// Size guard: the recursion is exact up to height 12 (dim 4096).
pub const MAX_VERTICAL_SIZE: usize = 12;

const PAULI_X: [[i64; 2]; 2] = [[0, 1], [1, 0]];
/// Real stand-in for σ^y; both recursion coefficients flip sign with it.
const PAULI_Y_REAL: [[i64; 2]; 2] = [[0, -1], [1, 0]];
const PAULI_Z: [[i64; 2]; 2] = [[1, 0], [0, -1]];

/// Dense integer matrix at scale 3^scale_pow3: true value = data / 3^scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledIntMatrix {
    pub qubits: usize,
    pub dim: usize,
    pub scale_pow3: u32,
    pub data: Vec<i64>,
}

impl ScaledIntMatrix {
    pub fn identity(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        let mut data = vec![0i64; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1;
        }
        ScaledIntMatrix { qubits, dim, scale_pow3: 0, data }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.dim + c]
    }

    pub fn to_mat(&self) -> Mat {
        let scale = 3f64.powi(self.scale_pow3 as i32);
        Mat::from_vec(self.dim, self.data.iter().map(|&v| v as f64 / scale).collect())
    }

    /// Same matrix at a larger power-of-three scale (exact).
    pub fn rescaled(&self, scale_pow3: u32) -> ScaledIntMatrix {
        assert!(scale_pow3 >= self.scale_pow3);
        let f = 3i64.pow(scale_pow3 - self.scale_pow3);
        ScaledIntMatrix {
            qubits: self.qubits,
            dim: self.dim,
            scale_pow3,
            data: self.data.iter().map(|&v| v * f).collect(),
        }
    }
}

fn coefficients(family: LadderFamily) -> ((i64, u32), (i64, u32)) {
    match family {
        // −q² and −q
        LadderFamily::Square => ((-1, 2), (-1, 1)),
        // +q³ and +q²
        LadderFamily::Hexagonal => ((1, 3), (1, 2)),
    }
}

/// Exact Z matrix of the vertical ladder. `size` is the boundary-leg count:
/// the column height N_y for the square family, the odd-column pair count m
/// for the hexagonal one.
pub fn vertical_z(family: LadderFamily, size: usize) -> Result<ScaledIntMatrix> {
    if size == 0 || size > MAX_VERTICAL_SIZE {
        return Err(Error::UnsupportedGeometry(format!(
            "vertical ladder size {size} outside 1..={MAX_VERTICAL_SIZE}"
        )));
    }
    let ((c1, p1), (c2, p2)) = coefficients(family);

    // state at the current height
    let mut z_prev = ScaledIntMatrix { qubits: 0, dim: 1, scale_pow3: 0, data: vec![1] };
    let mut z = ScaledIntMatrix::identity(1);
    let mut zalpha: [Vec<i64>; 3] = [vec![0; 4], vec![0; 4], vec![0; 4]];

    for cur in 1..size {
        let dim = z.dim;
        let new_dim = dim * 2;
        let s_new = (z_prev.scale_pow3 + p1).max(z.scale_pow3 + p2);
        let f0 = 3i64.pow(s_new - z.scale_pow3);
        let f1 = 3i64.pow(s_new - z_prev.scale_pow3 - p1);
        let f2 = 3i64.pow(s_new - z.scale_pow3 - p2);

        let mut z_new = vec![0i64; new_dim * new_dim];
        kron_id_into(&mut z_new, &z.data, dim, f0);

        let mut zalpha_new: [Vec<i64>; 3] =
            [vec![0; new_dim * new_dim], vec![0; new_dim * new_dim], vec![0; new_dim * new_dim]];
        for (a, pauli) in [PAULI_X, PAULI_Y_REAL, PAULI_Z].iter().enumerate() {
            let (s1, s2) = if a == 1 { (-c1, -c2) } else { (c1, c2) };
            let za = &mut zalpha_new[a];
            kron_pp_into(za, &z_prev.data, z_prev.dim, pauli, s1 * f1);
            let mixed = mul_id_kron_pauli(&zalpha[a], dim, pauli);
            kron_p_into(za, &mixed, dim, pauli, s2 * f2);
            for (t, v) in z_new.iter_mut().zip(za.iter()) {
                *t += v;
            }
        }

        z_prev = z;
        z = ScaledIntMatrix { qubits: cur + 1, dim: new_dim, scale_pow3: s_new, data: z_new };
        zalpha = zalpha_new;
    }
    Ok(z)
}

/// out += factor · (A ⊗ 𝟙₂)
fn kron_id_into(out: &mut [i64], a: &[i64], dim: usize, factor: i64) {
    let nd = dim * 2;
    for r in 0..dim {
        for c in 0..dim {
            let v = a[r * dim + c];
            if v != 0 {
                out[(2 * r) * nd + 2 * c] += factor * v;
                out[(2 * r + 1) * nd + 2 * c + 1] += factor * v;
            }
        }
    }
}

/// out += factor · (A ⊗ P ⊗ P), A of dimension dim, out of dimension 4·dim.
fn kron_pp_into(out: &mut [i64], a: &[i64], dim: usize, p: &[[i64; 2]; 2], factor: i64) {
    let nd = dim * 4;
    for r in 0..dim {
        for c in 0..dim {
            let v = a[r * dim + c];
            if v == 0 {
                continue;
            }
            for i1 in 0..2 {
                for j1 in 0..2 {
                    if p[i1][j1] == 0 {
                        continue;
                    }
                    for i0 in 0..2 {
                        for j0 in 0..2 {
                            let w = p[i1][j1] * p[i0][j0];
                            if w != 0 {
                                out[(4 * r + 2 * i1 + i0) * nd + 4 * c + 2 * j1 + j0] +=
                                    factor * v * w;
                            }
                        }
                    }
                }
            }
        }
    }
}

/// out += factor · (B ⊗ P), B of dimension dim.
fn kron_p_into(out: &mut [i64], b: &[i64], dim: usize, p: &[[i64; 2]; 2], factor: i64) {
    let nd = dim * 2;
    for r in 0..dim {
        for c in 0..dim {
            let v = b[r * dim + c];
            if v == 0 {
                continue;
            }
            for i in 0..2 {
                for j in 0..2 {
                    if p[i][j] != 0 {
                        out[(2 * r + i) * nd + 2 * c + j] += factor * v * p[i][j];
                    }
                }
            }
        }
    }
}

/// B = A · (𝟙_{dim/2} ⊗ P): mixes column pairs, O(dim²).
fn mul_id_kron_pauli(a: &[i64], dim: usize, p: &[[i64; 2]; 2]) -> Vec<i64> {
    let mut out = vec![0i64; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            let base = c & !1;
            let cb = c & 1;
            let mut s = 0i64;
            for (b, prow) in p.iter().enumerate() {
                if prow[cb] != 0 {
                    s += a[r * dim + base + b] * prow[cb];
                }
            }
            out[r * dim + c] = s;
        }
    }
    out
}

/// Full spectrum of an exact Z matrix via magnetization sectors.
///
/// Exactness of the block structure is a property of the input (checked in
/// debug builds); each block goes through the same Jacobi routine as every
/// other symmetric matrix in the crate, and mirror sectors reuse spectra.
pub fn sector_eigenvalues(z: &ScaledIntMatrix) -> Result<Vec<f64>> {
    let n = z.qubits;
    #[cfg(debug_assertions)]
    {
        for r in 0..z.dim {
            for c in 0..z.dim {
                if (r.count_ones() != c.count_ones()) && z.get(r, c) != 0 {
                    panic!("vertical Z breaks magnetization block structure at ({r},{c})");
                }
            }
        }
    }
    let mut sectors: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for idx in 0..z.dim {
        sectors[idx.count_ones() as usize].push(idx);
    }
    let scale = 3f64.powi(z.scale_pow3 as i32);
    let half: Vec<usize> = (0..=n / 2).collect();
    let spectra: Vec<Vec<f64>> = half
        .par_iter()
        .map(|&k| {
            let idx = &sectors[k];
            let b = idx.len();
            let mut block = Mat::zeros(b);
            for (bi, &ri) in idx.iter().enumerate() {
                for (bj, &cj) in idx.iter().enumerate() {
                    block.set(bi, bj, z.get(ri, cj) as f64 / scale);
                }
            }
            eigvals_symmetric(&block)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut all = Vec::with_capacity(z.dim);
    for k in 0..=n {
        let mirrored = k.min(n - k);
        all.extend_from_slice(&spectra[mirrored]);
    }
    Ok(all)
}

/// Entropy of the vertical ladder of the given size.
pub fn vertical_entropy(family: LadderFamily, size: usize) -> Result<EntropySpectrum> {
    let z = vertical_z(family, size)?;
    let d = sector_eigenvalues(&z)?;
    entropy_from_spectrum(&d, size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::{HexStep, LadderEngine};

    #[test]
    fn size_one_is_identity() {
        for family in [LadderFamily::Square, LadderFamily::Hexagonal] {
            let z = vertical_z(family, 1).unwrap();
            assert_eq!(z.data, vec![1, 0, 0, 1]);
            assert_eq!(z.scale_pow3, 0);
            let s = vertical_entropy(family, 1).unwrap();
            assert!((s.entropy - crate::LN_2).abs() < 1e-15);
        }
    }

    #[test]
    fn square_size_two_matches_pair_coupling() {
        // Z(2) = 𝟙 − q² σ·σ
        let z = vertical_z(LadderFamily::Square, 2).unwrap();
        assert_eq!(z.scale_pow3, 2);
        let expect: [i64; 16] = [
            8, 0, 0, 0, //
            0, 10, -2, 0, //
            0, -2, 10, 0, //
            0, 0, 0, 8,
        ];
        assert_eq!(z.data, expect.to_vec());
    }

    #[test]
    fn hex_size_two_matches_pair_coupling() {
        // Z(2) = 𝟙 + q³ σ·σ
        let z = vertical_z(LadderFamily::Hexagonal, 2).unwrap();
        assert_eq!(z.scale_pow3, 3);
        let expect: [i64; 16] = [
            28, 0, 0, 0, //
            0, 26, 2, 0, //
            0, 2, 26, 0, //
            0, 0, 0, 28,
        ];
        assert_eq!(z.data, expect.to_vec());
    }

    #[test]
    fn matches_horizontal_single_column_exactly() {
        // The vertical ladder of height m and the m-leg horizontal ladder at
        // n = 1 are the same graph; the exact integer matrices must agree.
        for (family, sizes) in [
            (LadderFamily::Square, 2..=6usize),
            (LadderFamily::Hexagonal, 2..=6usize),
        ] {
            for m in sizes {
                let v = vertical_z(family, m).unwrap();
                let eng = LadderEngine::new(family, m).unwrap();
                let (h, pow) = eng.z_matrix_scaled(&eng.coefficients_at(1));
                let target = v.scale_pow3.max(pow);
                let v = v.rescaled(target);
                let f = 3i64.pow(target - pow);
                let h: Vec<i64> = h.iter().map(|&x| x * f).collect();
                assert_eq!(v.data, h, "{family} size {m}");
            }
        }
    }

    #[test]
    fn entropies_match_tables_at_small_sizes() {
        for (family, size, want) in [
            (LadderFamily::Square, 2usize, 0.6553433),
            (LadderFamily::Square, 3, 0.6413153),
            (LadderFamily::Hexagonal, 2, 0.6891577),
            (LadderFamily::Hexagonal, 3, 0.6878024),
            (LadderFamily::Hexagonal, 4, 0.6871245),
        ] {
            let s = vertical_entropy(family, size).unwrap();
            assert!(
                (s.per_bond - want).abs() < 5e-8,
                "{family} size {size}: got {:.7}, want {want}",
                s.per_bond
            );
        }
    }

    #[test]
    fn complement_symmetry_exact() {
        for family in [LadderFamily::Square, LadderFamily::Hexagonal] {
            let z = vertical_z(family, 5).unwrap();
            let mask = z.dim - 1;
            for r in 0..z.dim {
                for c in 0..z.dim {
                    assert_eq!(z.get(r, c), z.get(!r & mask, !c & mask));
                }
            }
        }
    }

    #[test]
    fn sector_split_agrees_with_dense_eig() {
        let z = vertical_z(LadderFamily::Square, 6).unwrap();
        let mut a = sector_eigenvalues(&z).unwrap();
        let mut b = eigvals_symmetric(&z.to_mat()).unwrap();
        a.sort_by(|x, y| y.partial_cmp(x).unwrap());
        b.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(vertical_z(LadderFamily::Square, 0).is_err());
        assert!(vertical_z(LadderFamily::Square, 13).is_err());
    }

    #[test]
    fn hex_transfer_engine_unused_parity_consistency() {
        // Regression guard for the parity anchoring: hex vertical size 3 must
        // equal the T₁-column start, not the T₂ one.
        let eng = LadderEngine::new(LadderFamily::Hexagonal, 3).unwrap();
        let c1 = eng.coefficients_at(1);
        let t1 = eng.recursion_matrix(HexStep::IntoOdd);
        let init: Vec<_> = eng
            .basis()
            .iter()
            .map(|b| {
                if b.is_empty() {
                    num_rational::BigRational::from(num_bigint::BigInt::from(1))
                } else {
                    num_rational::BigRational::from(num_bigint::BigInt::from(0))
                }
            })
            .collect();
        let applied = t1.apply(&init);
        for (b, v) in eng.basis().iter().zip(applied) {
            assert_eq!(c1.get(b), v);
        }
    }
}
