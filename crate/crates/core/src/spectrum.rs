//! Symmetric eigensolver (cyclic Jacobi) and conversion of overlap spectra
//! to entanglement entropies via p_τ = d_τ² / Σ d_τ².

use serde::{Deserialize, Serialize};

use crate::dense::Mat;
use crate::{Error, Result, LN_2};

/// Relative symmetry tolerance accepted on input matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Off-diagonal Frobenius target relative to ‖A‖_F.
pub const OFFDIAG_TOL: f64 = 1e-13;
/// Sweep budget before reporting non-convergence.
pub const MAX_SWEEPS: usize = 64;

/// Entanglement spectrum and entropy derived from overlap eigenvalues.
///
/// `eigenvalues` are the overlap (Z matrix) eigenvalues d_τ in descending
/// order; `probabilities` are the reduced density matrix eigenvalues
/// p_τ = d_τ²/Σd², so the sign of d_τ never matters. Entropy is in nats.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntropySpectrum {
    pub eigenvalues: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub entropy: f64,
    pub per_bond: f64,
    pub boundary_size: usize,
}

/// p_τ = d_τ²/Σd², S = −Σ p ln p with 0·ln 0 = 0.
///
/// Scale invariant: multiplying every d_τ by c ≠ 0 leaves the result
/// unchanged, which is exactly why the Z matrix can stand in for the overlap
/// matrix M.
pub fn entropy_from_spectrum(d: &[f64], boundary_size: usize) -> Result<EntropySpectrum> {
    let sum_sq: f64 = d.iter().map(|x| x * x).sum();
    if sum_sq == 0.0 || !sum_sq.is_finite() {
        return Err(Error::ZeroSpectrum);
    }
    let mut eigenvalues = d.to_vec();
    eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let probabilities: Vec<f64> = eigenvalues.iter().map(|x| x * x / sum_sq).collect();
    let entropy = -probabilities
        .iter()
        .map(|&p| if p > 0.0 { p * p.ln() } else { 0.0 })
        .sum::<f64>();
    let bound = boundary_size as f64 * LN_2 + 1e-9;
    if entropy > bound {
        return Err(Error::FitFailed(format!(
            "entropy {entropy} exceeds the |Λ| ln 2 bound {bound} — spectrum longer than 2^|Λ|?"
        )));
    }
    Ok(EntropySpectrum {
        per_bond: entropy / boundary_size as f64,
        eigenvalues,
        probabilities,
        entropy,
        boundary_size,
    })
}

/// Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the orthogonal matrix whose
/// columns are the matching eigenvectors. Rejects non-symmetric input and
/// reports non-convergence past [`MAX_SWEEPS`].
pub fn eig_symmetric(a: &Mat) -> Result<(Vec<f64>, Mat)> {
    let (d, v) = jacobi(a, true)?;
    Ok((d, v.expect("vectors requested")))
}

/// Eigenvalues only; used where eigenvectors are not needed (large vertical
/// ladder sectors).
pub fn eigvals_symmetric(a: &Mat) -> Result<Vec<f64>> {
    let (d, _) = jacobi(a, false)?;
    Ok(d)
}

fn jacobi(input: &Mat, want_vectors: bool) -> Result<(Vec<f64>, Option<Mat>)> {
    let n = input.n();
    let max_abs = input.max_abs();
    let asym = input.max_asymmetry();
    if asym > SYMMETRY_TOL * max_abs.max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric { asym, tol: SYMMETRY_TOL * max_abs });
    }

    let fro = input.frobenius();
    let mut a = input.clone();
    let mut v = if want_vectors { Some(Mat::identity(n)) } else { None };
    if n <= 1 {
        let d = (0..n).map(|i| a.get(i, i)).collect();
        return Ok((d, v));
    }

    let target = OFFDIAG_TOL * fro;
    let mut residual = off_diag_fro(&a);
    let mut sweeps = 0;
    while residual > target {
        if sweeps >= MAX_SWEEPS {
            return Err(Error::EigNoConvergence { sweeps, residual });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, v.as_mut(), p, q, sweeps);
            }
        }
        sweeps += 1;
        residual = off_diag_fro(&a);
    }

    let mut d: Vec<(f64, usize)> = (0..n).map(|i| (a.get(i, i), i)).collect();
    d.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let eigvals: Vec<f64> = d.iter().map(|x| x.0).collect();
    let vectors = v.map(|vm| {
        let mut sorted = Mat::zeros(n);
        for (new_col, &(_, old_col)) in d.iter().enumerate() {
            for r in 0..n {
                sorted.set(r, new_col, vm.get(r, old_col));
            }
        }
        sorted
    });
    Ok((eigvals, vectors))
}

#[inline]
fn rotate(a: &mut Mat, v: Option<&mut Mat>, p: usize, q: usize, sweep: usize) {
    let n = a.n();
    let apq = a.get(p, q);
    if apq == 0.0 {
        return;
    }
    let app = a.get(p, p);
    let aqq = a.get(q, q);
    // Past the first sweeps, zero out entries that are negligible against the
    // diagonal; standard thresholding keeps quadratic convergence.
    let g = 100.0 * apq.abs();
    if sweep > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
        a.set(p, q, 0.0);
        a.set(q, p, 0.0);
        return;
    }

    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);
    let h = t * apq;

    a.set(p, p, app - h);
    a.set(q, q, aqq + h);
    a.set(p, q, 0.0);
    a.set(q, p, 0.0);
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        let new_kp = akp - s * (akq + tau * akp);
        let new_kq = akq + s * (akp - tau * akq);
        a.set(k, p, new_kp);
        a.set(p, k, new_kp);
        a.set(k, q, new_kq);
        a.set(q, k, new_kq);
    }
    if let Some(vm) = v {
        for k in 0..n {
            let vkp = vm.get(k, p);
            let vkq = vm.get(k, q);
            vm.set(k, p, vkp - s * (vkq + tau * vkp));
            vm.set(k, q, vkq + s * (vkp - tau * vkq));
        }
    }
}

fn off_diag_fro(a: &Mat) -> f64 {
    let n = a.n();
    let mut acc = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let x = a.get(i, j);
            acc += x * x;
        }
    }
    (2.0 * acc).sqrt()
}
