//! Monte Carlo estimation of the Z matrix by integration over spin
//! coherent-state angles.
//!
//! The estimator draws one unit vector Ω per bond-active site and
//! accumulates, per sample,
//!
//!   w · ⊗_{k∈Λ} (𝟙 + Ω_k·σ_k),
//!
//! where for `WeightedUniform` the Ω are uniform on the sphere and
//! w = ∏_bonds (1 − Ω_i·Ω_j) ∈ [0, 2]^|B|, and for `Metropolis` the Ω are
//! sampled from the density ∝ ∏(1 − Ω_i·Ω_j) and w = 1. Since
//! (𝟙 + Ω·σ) = 2|Ω⟩⟨Ω| is rank one, a sample touches only a boundary-sized
//! spinor product. Boundary sites incident to no bond integrate analytically
//! to an exact identity factor, so they are never sampled — for a graph with
//! no bonds at all the estimate is the identity with zero error.
//!
//! Batches run on independent RNG streams derived from (seed, batch index)
//! and are reduced in batch order, so results are bit-reproducible no matter
//! how many workers run them. Standard errors come from batch means; the
//! entropy error comes from a leave-one-batch-out jackknife.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dense::Mat;
use crate::graph::SymmetricGraph;
use crate::spectrum::{eig_symmetric, entropy_from_spectrum, EntropySpectrum};
use crate::{Error, Result};

/// Memory guard on the boundary size (dim = 2^|Λ| ≤ 16384).
pub const MAX_BOUNDARY: usize = 14;

/// Point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitVector {
    #[inline]
    pub fn dot(&self, other: &UnitVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

/// Uniform draw on S²: z uniform in [−1, 1], azimuth uniform in [0, 2π).
pub fn sample_sphere<R: Rng>(rng: &mut R) -> UnitVector {
    let z: f64 = 2.0 * rng.gen::<f64>() - 1.0;
    let phi: f64 = core::f64::consts::TAU * rng.gen::<f64>();
    let r = (1.0 - z * z).max(0.0).sqrt();
    UnitVector { x: r * phi.cos(), y: r * phi.sin(), z }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum McMethod {
    WeightedUniform,
    Metropolis { step_angle: f64, burn_in: usize, thinning: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub batches: u32,
    pub seed: u64,
    pub method: McMethod,
}

impl McConfig {
    pub fn weighted(samples: u64, batches: u32, seed: u64) -> Self {
        McConfig { samples, batches, seed, method: McMethod::WeightedUniform }
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::BadMcConfig("samples must be positive".into()));
        }
        if self.batches < 8 {
            return Err(Error::BadMcConfig("at least 8 batches required".into()));
        }
        if self.samples % self.batches as u64 != 0 {
            return Err(Error::BadMcConfig("samples must be divisible by batches".into()));
        }
        if let McMethod::Metropolis { step_angle, thinning, .. } = self.method {
            if !(step_angle > 0.0 && step_angle <= core::f64::consts::PI) {
                return Err(Error::BadMcConfig("step_angle must lie in (0, π]".into()));
            }
            if thinning == 0 {
                return Err(Error::BadMcConfig("thinning must be at least 1".into()));
            }
        }
        Ok(())
    }
}

/// Monte Carlo estimate of the Z matrix with per-entry standard errors.
#[derive(Debug, Clone)]
pub struct OverlapEstimate {
    pub dim: usize,
    /// Symmetrized real part of the sample mean.
    pub mean: Mat,
    /// Per-entry standard error of the mean, from batch means.
    pub stderr: Mat,
    /// Largest residual imaginary magnitude discarded from the mean.
    pub max_imag: f64,
    pub config: McConfig,
    pub boundary_size: usize,
    // Batch means over the sampled (bond-active) legs, for jackknifing.
    batch_means: Vec<Vec<f64>>,
    active_leg_positions: Vec<usize>,
}

impl OverlapEstimate {
    /// Artifact JSON: {"dim", "mean", "stderr", "max_imag", "config"}.
    pub fn to_json(&self) -> serde_json::Value {
        let rows =
            |m: &Mat| -> Vec<Vec<f64>> { (0..m.n()).map(|i| m.row(i).to_vec()).collect() };
        json!({
            "dim": self.dim,
            "mean": rows(&self.mean),
            "stderr": rows(&self.stderr),
            "max_imag": self.max_imag,
            "config": serde_json::to_value(self.config).expect("config serializes"),
        })
    }

    /// Entropy of the estimated Z with a jackknife standard error over
    /// batches.
    pub fn entropy_with_error(&self) -> Result<(EntropySpectrum, f64)> {
        let (d, _) = eig_symmetric(&self.mean)?;
        let spectrum = entropy_from_spectrum(&d, self.boundary_size)?;
        let b = self.batch_means.len();
        if b < 2 {
            return Ok((spectrum, 0.0));
        }
        let adim = self.active_dim();
        let mut total = vec![0.0; adim * adim];
        for bm in &self.batch_means {
            for (t, v) in total.iter_mut().zip(bm) {
                *t += v;
            }
        }
        let mut entropies = Vec::with_capacity(b);
        for bm in &self.batch_means {
            let loo: Vec<f64> = total
                .iter()
                .zip(bm)
                .map(|(t, v)| (t - v) / (b as f64 - 1.0))
                .collect();
            let mut z = self.embed(&loo);
            z.symmetrize();
            let (d, _) = eig_symmetric(&z)?;
            entropies.push(entropy_from_spectrum(&d, self.boundary_size)?.entropy);
        }
        let mean = entropies.iter().sum::<f64>() / b as f64;
        let var = entropies.iter().map(|s| (s - mean).powi(2)).sum::<f64>() * (b as f64 - 1.0)
            / b as f64;
        Ok((spectrum, var.sqrt()))
    }

    fn active_dim(&self) -> usize {
        1 << self.active_leg_positions.len()
    }

    /// Expand an active-leg matrix to the full boundary by tensoring exact
    /// identity factors onto the never-sampled legs.
    fn embed(&self, active: &[f64]) -> Mat {
        embed_active(active, self.boundary_size, &self.active_leg_positions)
    }
}

fn embed_active(active: &[f64], boundary_size: usize, positions: &[usize]) -> Mat {
    let l = boundary_size;
    let adim = 1usize << positions.len();
    debug_assert_eq!(active.len(), adim * adim);
    let dim = 1usize << l;
    if positions.len() == l {
        return Mat::from_vec(dim, active.to_vec());
    }
    let mut out = Mat::zeros(dim);
    let extract = |idx: usize| -> usize {
        let mut a = 0usize;
        for (k, &p) in positions.iter().enumerate() {
            let bit = (idx >> (l - 1 - p)) & 1;
            a |= bit << (positions.len() - 1 - k);
        }
        a
    };
    let inactive_mask_of = |idx: usize| -> usize {
        let mut m = 0usize;
        let mut shift = 0;
        for p in 0..l {
            if !positions.contains(&p) {
                m |= ((idx >> (l - 1 - p)) & 1) << shift;
                shift += 1;
            }
        }
        m
    };
    for r in 0..dim {
        let ra = extract(r);
        let ri = inactive_mask_of(r);
        for c in 0..dim {
            if inactive_mask_of(c) == ri {
                out.set(r, c, active[ra * (1 << positions.len()) + extract(c)]);
            }
        }
    }
    out
}

/// Independent, reproducible RNG stream for one batch.
fn batch_stream(seed: u64, batch: u32) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    let mut s = seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(u64::from(batch) + 1);
    for chunk in key.chunks_mut(8) {
        s = splitmix64(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Estimate the Z matrix of a validated graph.
pub fn estimate_z(graph: &SymmetricGraph, cfg: &McConfig) -> Result<OverlapEstimate> {
    estimate_z_rotated(graph, cfg, None)
}

/// Same estimator with one global rotation applied to every sampled Ω;
/// the exact Z is rotation invariant, so estimates with and without the
/// rotation agree within statistical error (a gauge test surface).
pub fn estimate_z_rotated(
    graph: &SymmetricGraph,
    cfg: &McConfig,
    rotation: Option<[[f64; 3]; 3]>,
) -> Result<OverlapEstimate> {
    graph.ensure_valid()?;
    cfg.validate()?;
    let l = graph.boundary_size();
    if l > MAX_BOUNDARY {
        return Err(Error::BoundaryTooLarge(l, MAX_BOUNDARY));
    }

    // Sites that appear in at least one bond get sampled; the rest integrate
    // to exact identity factors.
    let n = graph.n_vertices();
    let mut site_index = vec![usize::MAX; n];
    let mut active_sites = Vec::new();
    for v in 0..n {
        if graph.degree(v) > 0 {
            site_index[v] = active_sites.len();
            active_sites.push(v);
        }
    }
    let bonds: Vec<(usize, usize)> =
        graph.bonds().iter().map(|&(i, j)| (site_index[i], site_index[j])).collect();
    let mut active_leg_positions = Vec::new();
    let mut active_leg_sites = Vec::new();
    for (pos, &b) in graph.boundary().iter().enumerate() {
        if site_index[b] != usize::MAX {
            active_leg_positions.push(pos);
            active_leg_sites.push(site_index[b]);
        }
    }
    let adim = 1usize << active_leg_sites.len();
    let spb = cfg.samples / cfg.batches as u64;

    let worker = BatchWorker {
        n_sites: active_sites.len(),
        bonds,
        leg_sites: active_leg_sites,
        adim,
        rotation,
        samples: spb,
        method: cfg.method,
    };
    let results: Vec<BatchResult> = (0..cfg.batches)
        .into_par_iter()
        .map(|b| worker.run(batch_stream(cfg.seed, b)))
        .collect();

    // Metropolis health check before any averaging.
    if let McMethod::Metropolis { .. } = cfg.method {
        let proposed: u64 = results.iter().map(|r| r.proposed).sum();
        let accepted: u64 = results.iter().map(|r| r.accepted).sum();
        if proposed > 0 {
            let rate = accepted as f64 / proposed as f64;
            if !(0.05..=0.95).contains(&rate) {
                return Err(Error::AcceptanceRate(rate));
            }
        }
    }

    // Order-fixed reduction over batches.
    let b = cfg.batches as usize;
    let mut mean_re = vec![0.0; adim * adim];
    let mut mean_im = vec![0.0; adim * adim];
    for r in &results {
        for (t, v) in mean_re.iter_mut().zip(&r.re) {
            *t += v;
        }
        for (t, v) in mean_im.iter_mut().zip(&r.im) {
            *t += v;
        }
    }
    mean_re.iter_mut().for_each(|x| *x /= b as f64);
    mean_im.iter_mut().for_each(|x| *x /= b as f64);
    let max_imag = mean_im.iter().fold(0.0f64, |m, &x| m.max(x.abs()));

    let mut stderr_active = vec![0.0; adim * adim];
    if b > 1 {
        for r in &results {
            for ((s, &v), &m) in stderr_active.iter_mut().zip(&r.re).zip(&mean_re) {
                *s += (v - m) * (v - m);
            }
        }
        let norm = 1.0 / (b as f64 * (b as f64 - 1.0));
        stderr_active.iter_mut().for_each(|x| *x = (*x * norm).sqrt());
    }

    let mut mean = embed_active(&mean_re, l, &active_leg_positions);
    mean.symmetrize();
    let stderr = embed_active(&stderr_active, l, &active_leg_positions);
    let max_stderr = stderr.max_abs();
    if max_imag > 5.0 * max_stderr {
        return Err(Error::ImagResidual { max_imag, max_stderr });
    }

    Ok(OverlapEstimate {
        dim: 1 << l,
        mean,
        stderr,
        max_imag,
        config: *cfg,
        boundary_size: l,
        batch_means: results.into_iter().map(|r| r.re).collect(),
        active_leg_positions,
    })
}

struct BatchWorker {
    n_sites: usize,
    bonds: Vec<(usize, usize)>,
    leg_sites: Vec<usize>,
    adim: usize,
    rotation: Option<[[f64; 3]; 3]>,
    samples: u64,
    method: McMethod,
}

struct BatchResult {
    re: Vec<f64>,
    im: Vec<f64>,
    accepted: u64,
    proposed: u64,
}

impl BatchWorker {
    fn run(&self, mut rng: ChaCha12Rng) -> BatchResult {
        let adim = self.adim;
        let mut acc = vec![Complex64::new(0.0, 0.0); adim * adim];
        let mut spinors = vec![Complex64::new(0.0, 0.0); 2 * self.leg_sites.len().max(1)];
        let mut v = vec![Complex64::new(0.0, 0.0); adim];
        let mut accepted = 0u64;
        let mut proposed = 0u64;

        match self.method {
            McMethod::WeightedUniform => {
                let mut omega = vec![UnitVector { x: 0.0, y: 0.0, z: 1.0 }; self.n_sites];
                for _ in 0..self.samples {
                    for o in omega.iter_mut() {
                        *o = self.draw(&mut rng);
                    }
                    let mut w = 1.0;
                    for &(i, j) in &self.bonds {
                        w *= 1.0 - omega[i].dot(&omega[j]);
                    }
                    if w != 0.0 {
                        self.accumulate(&omega, w, &mut spinors, &mut v, &mut acc);
                    }
                }
            }
            McMethod::Metropolis { step_angle, burn_in, thinning } => {
                let mut omega: Vec<UnitVector> =
                    (0..self.n_sites).map(|_| self.draw(&mut rng)).collect();
                let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.n_sites];
                for (e, &(i, j)) in self.bonds.iter().enumerate() {
                    incident[i].push((e, j));
                    incident[j].push((e, i));
                }
                for _ in 0..burn_in {
                    self.sweep(&mut rng, &mut omega, &incident, step_angle, &mut 0, &mut 0);
                }
                for _ in 0..self.samples {
                    for _ in 0..thinning {
                        self.sweep(
                            &mut rng,
                            &mut omega,
                            &incident,
                            step_angle,
                            &mut accepted,
                            &mut proposed,
                        );
                    }
                    self.accumulate(&omega, 1.0, &mut spinors, &mut v, &mut acc);
                }
            }
        }

        let inv = 1.0 / self.samples as f64;
        // 2^legs restores the ⊗(𝟙 + Ω·σ) normalization of the rank-one form.
        let scale = (1u64 << self.leg_sites.len()) as f64 * inv;
        let mut re = Vec::with_capacity(adim * adim);
        let mut im = Vec::with_capacity(adim * adim);
        for x in acc {
            re.push(x.re * scale);
            im.push(x.im * scale);
        }
        BatchResult { re, im, accepted, proposed }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> UnitVector {
        let o = sample_sphere(rng);
        match self.rotation {
            None => o,
            Some(r) => UnitVector {
                x: r[0][0] * o.x + r[0][1] * o.y + r[0][2] * o.z,
                y: r[1][0] * o.x + r[1][1] * o.y + r[1][2] * o.z,
                z: r[2][0] * o.x + r[2][1] * o.y + r[2][2] * o.z,
            },
        }
    }

    fn sweep<R: Rng>(
        &self,
        rng: &mut R,
        omega: &mut [UnitVector],
        incident: &[Vec<(usize, usize)>],
        step_angle: f64,
        accepted: &mut u64,
        proposed: &mut u64,
    ) {
        for i in 0..omega.len() {
            let candidate = rotate_in_cone(rng, &omega[i], step_angle);
            let mut old = 1.0;
            let mut new = 1.0;
            for &(_, j) in &incident[i] {
                old *= 1.0 - omega[i].dot(&omega[j]);
                new *= 1.0 - candidate.dot(&omega[j]);
            }
            *proposed += 1;
            let accept = if old <= 0.0 { true } else { rng.gen::<f64>() * old < new };
            if accept {
                omega[i] = candidate;
                *accepted += 1;
            }
        }
    }

    fn accumulate(
        &self,
        omega: &[UnitVector],
        w: f64,
        spinors: &mut [Complex64],
        v: &mut [Complex64],
        acc: &mut [Complex64],
    ) {
        let nl = self.leg_sites.len();
        if nl == 0 {
            acc[0] += Complex64::new(w, 0.0);
            return;
        }
        for (k, &site) in self.leg_sites.iter().enumerate() {
            let o = &omega[site];
            // |Ω⟩ with (𝟙 + Ω·σ) = 2|Ω⟩⟨Ω|, stable at the south pole.
            let up = ((1.0 + o.z).max(0.0) * 0.5).sqrt();
            let dn = if 1.0 + o.z < 1e-14 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(o.x, o.y) / (2.0 * (1.0 + o.z)).sqrt()
            };
            spinors[2 * k] = Complex64::new(up, 0.0);
            spinors[2 * k + 1] = dn;
        }
        // v = ⊗_k spinor_k, leg 0 on the most significant bit.
        let adim = self.adim;
        for (idx, slot) in v.iter_mut().enumerate() {
            let mut p = Complex64::new(1.0, 0.0);
            for k in 0..nl {
                let bit = (idx >> (nl - 1 - k)) & 1;
                p *= spinors[2 * k + bit];
            }
            *slot = p;
        }
        for r in 0..adim {
            let vr = v[r];
            for c in r..adim {
                let t = vr * v[c].conj() * w;
                acc[r * adim + c] += t;
                if c != r {
                    acc[c * adim + r] += t.conj();
                }
            }
        }
    }
}

/// New direction uniformly distributed within a cone of half-angle
/// `step_angle` about `axis`.
fn rotate_in_cone<R: Rng>(rng: &mut R, axis: &UnitVector, step_angle: f64) -> UnitVector {
    let cos_min = step_angle.cos();
    let c = cos_min + (1.0 - cos_min) * rng.gen::<f64>();
    let s = (1.0 - c * c).max(0.0).sqrt();
    let psi = core::f64::consts::TAU * rng.gen::<f64>();
    // Orthonormal frame around the axis.
    let reference = if axis.z.abs() < 0.9 {
        UnitVector { x: 0.0, y: 0.0, z: 1.0 }
    } else {
        UnitVector { x: 1.0, y: 0.0, z: 0.0 }
    };
    let mut e1 = UnitVector {
        x: axis.y * reference.z - axis.z * reference.y,
        y: axis.z * reference.x - axis.x * reference.z,
        z: axis.x * reference.y - axis.y * reference.x,
    };
    let n1 = e1.norm();
    e1 = UnitVector { x: e1.x / n1, y: e1.y / n1, z: e1.z / n1 };
    let e2 = UnitVector {
        x: axis.y * e1.z - axis.z * e1.y,
        y: axis.z * e1.x - axis.x * e1.z,
        z: axis.x * e1.y - axis.y * e1.x,
    };
    UnitVector {
        x: c * axis.x + s * (psi.cos() * e1.x + psi.sin() * e2.x),
        y: c * axis.y + s * (psi.cos() * e1.y + psi.sin() * e2.y),
        z: c * axis.z + s * (psi.cos() * e1.z + psi.sin() * e2.z),
    }
}

/// ‖[Z, F]‖_max against 5× the propagated per-entry error, where
/// F = ⊗σˣ is the global spin flip (index complement). The exact Z commutes
/// with F.
pub fn flip_commutator_check(est: &OverlapEstimate) -> (f64, f64) {
    let d = est.dim;
    let mask = d - 1;
    let mut worst = 0.0f64;
    let mut worst_err = 0.0f64;
    for r in 0..d {
        for c in 0..d {
            // (ZF)_{rc} = Z_{r, ~c}, (FZ)_{rc} = Z_{~r, c}
            let lhs = est.mean.get(r, !c & mask) - est.mean.get(!r & mask, c);
            let err = (est.stderr.get(r, !c & mask).powi(2)
                + est.stderr.get(!r & mask, c).powi(2))
            .sqrt();
            if lhs.abs() > worst {
                worst = lhs.abs();
                worst_err = err;
            }
        }
    }
    (worst, worst_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::LN_2;

    #[test]
    fn sphere_sampling_is_deterministic() {
        let mut a = batch_stream(42, 0);
        let mut b = batch_stream(42, 0);
        assert_eq!(sample_sphere(&mut a), sample_sphere(&mut b));
        let mut c = batch_stream(42, 1);
        assert_ne!(sample_sphere(&mut a), sample_sphere(&mut c));
    }

    #[test]
    fn sphere_moments() {
        let mut rng = batch_stream(7, 0);
        let n = 1_000_000usize;
        let mut sum = [0.0f64; 3];
        let mut zz = 0.0;
        for _ in 0..n {
            let o = sample_sphere(&mut rng);
            assert!((o.norm() - 1.0).abs() < 1e-12);
            sum[0] += o.x;
            sum[1] += o.y;
            sum[2] += o.z;
            zz += o.z * o.z;
        }
        let mean_norm =
            (sum[0] * sum[0] + sum[1] * sum[1] + sum[2] * sum[2]).sqrt() / n as f64;
        assert!(mean_norm < 0.005, "mean norm {mean_norm}");
        let second = zz / n as f64;
        assert!((second - 1.0 / 3.0).abs() < 0.002, "⟨z²⟩ = {second}");
    }

    #[test]
    fn bondless_graph_gives_exact_identity() {
        let g = SymmetricGraph::square(1, 1).unwrap();
        let est = estimate_z(&g, &McConfig::weighted(80, 8, 1)).unwrap();
        assert_eq!(est.mean, Mat::identity(2));
        assert_eq!(est.stderr.max_abs(), 0.0);
        assert_eq!(est.max_imag, 0.0);
        let (s, err) = est.entropy_with_error().unwrap();
        assert!((s.entropy - LN_2).abs() < 1e-15);
        assert_eq!(err, 0.0);
    }

    #[test]
    fn estimates_are_bit_reproducible() {
        let g = SymmetricGraph::square(2, 2).unwrap();
        let cfg = McConfig::weighted(8000, 8, 12345);
        let a = estimate_z(&g, &cfg).unwrap();
        let b = estimate_z(&g, &cfg).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.stderr, b.stderr);
        assert_eq!(a.max_imag, b.max_imag);
    }

    #[test]
    fn mean_is_bit_symmetric() {
        let g = SymmetricGraph::square(2, 2).unwrap();
        let est = estimate_z(&g, &McConfig::weighted(8000, 8, 9)).unwrap();
        assert_eq!(est.mean.max_asymmetry(), 0.0);
    }

    #[test]
    fn two_leg_ladder_entropy_within_errors() {
        let g = SymmetricGraph::square(1, 2).unwrap();
        let est = estimate_z(&g, &McConfig::weighted(400_000, 16, 2024)).unwrap();
        let (s, err) = est.entropy_with_error().unwrap();
        let exact = 2.0 * 0.6553433;
        assert!(
            (s.entropy - exact).abs() < 4.0 * err.max(1e-4),
            "S = {} ± {err}, exact {exact}",
            s.entropy
        );
    }

    #[test]
    fn metropolis_agrees_with_weighted_uniform() {
        let g = SymmetricGraph::square(1, 2).unwrap();
        let cfg = McConfig {
            samples: 40_000,
            batches: 8,
            seed: 5,
            method: McMethod::Metropolis { step_angle: 1.2, burn_in: 200, thinning: 2 },
        };
        let est = estimate_z(&g, &cfg).unwrap();
        let (s, err) = est.entropy_with_error().unwrap();
        let exact = 2.0 * 0.6553433;
        assert!((s.entropy - exact).abs() < 5.0 * err.max(3e-3), "S = {} ± {err}", s.entropy);
    }

    #[test]
    fn metropolis_step_angle_guard() {
        let g = SymmetricGraph::square(1, 2).unwrap();
        let cfg = McConfig {
            samples: 800,
            batches: 8,
            seed: 5,
            method: McMethod::Metropolis { step_angle: 1e-6, burn_in: 10, thinning: 1 },
        };
        assert!(matches!(estimate_z(&g, &cfg), Err(Error::AcceptanceRate(_))));
    }

    #[test]
    fn boundary_guard() {
        let g = SymmetricGraph::custom(15, vec![], (0..15).collect());
        assert!(matches!(
            estimate_z(&g, &McConfig::weighted(80, 8, 0)),
            Err(Error::BoundaryTooLarge(15, MAX_BOUNDARY))
        ));
    }

    #[test]
    fn rotation_leaves_entropy_within_errors() {
        let g = SymmetricGraph::square(2, 2).unwrap();
        let cfg = McConfig::weighted(200_000, 16, 77);
        let plain = estimate_z(&g, &cfg).unwrap();
        let c = 0.6f64.cos();
        let s = 0.6f64.sin();
        let rot = [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]];
        let rotated = estimate_z_rotated(&g, &cfg, Some(rot)).unwrap();
        let (s1, e1) = plain.entropy_with_error().unwrap();
        let (s2, e2) = rotated.entropy_with_error().unwrap();
        let combined = (e1 * e1 + e2 * e2).sqrt();
        assert!(
            (s1.entropy - s2.entropy).abs() < 4.0 * combined.max(1e-4),
            "{} vs {}",
            s1.entropy,
            s2.entropy
        );
    }

    #[test]
    fn flip_commutator_within_noise() {
        let g = SymmetricGraph::square(2, 2).unwrap();
        let est = estimate_z(&g, &McConfig::weighted(100_000, 16, 31)).unwrap();
        let (worst, err) = flip_commutator_check(&est);
        assert!(worst <= 5.0 * err.max(1e-12), "commutator {worst} vs 5×{err}");
    }

    #[test]
    fn config_validation() {
        let g = SymmetricGraph::square(1, 1).unwrap();
        assert!(estimate_z(&g, &McConfig::weighted(0, 8, 0)).is_err());
        assert!(estimate_z(&g, &McConfig::weighted(80, 4, 0)).is_err());
        assert!(estimate_z(&g, &McConfig::weighted(81, 8, 0)).is_err());
    }

    #[test]
    fn artifact_json_fields() {
        let g = SymmetricGraph::square(1, 1).unwrap();
        let est = estimate_z(&g, &McConfig::weighted(80, 8, 1)).unwrap();
        let j = est.to_json();
        for key in ["dim", "mean", "stderr", "max_imag", "config"] {
            assert!(j.get(key).is_some(), "missing {key}");
        }
        assert_eq!(j["dim"], 2);
    }
}
