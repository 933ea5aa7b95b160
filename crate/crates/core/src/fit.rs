//! Area-law scaling fits: S/|Λ| = C/|Λ|^Δ + α.
//!
//! Weighted least squares minimized by Gauss–Newton with backtracking line
//! search; a Levenberg damping fallback engages if ten consecutive steps fail
//! to reduce the objective. Parameter standard errors come from the scaled
//! inverse normal-equations matrix. Monte Carlo points are weighted by their
//! statistical errors; exact datasets are weighted uniformly.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, LN_2};

pub const MAX_ITERATIONS: usize = 500;
pub const PARAM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub boundary_size: usize,
    pub per_bond_entropy: f64,
    /// 0 for exact points.
    pub stderr: f64,
}

/// Entropy-per-bond versus boundary size, plus provenance metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingDataset {
    pub points: Vec<ScalingPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
}

impl ScalingDataset {
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for p in &self.points {
            if p.boundary_size < 1 {
                return Err(Error::Dataset("boundary sizes must be ≥ 1".into()));
            }
            if !seen.insert(p.boundary_size) {
                return Err(Error::Dataset(format!(
                    "duplicate boundary size {}",
                    p.boundary_size
                )));
            }
            if !(p.per_bond_entropy > 0.0 && p.per_bond_entropy <= LN_2 + 1e-6) {
                return Err(Error::Dataset(format!(
                    "per-bond entropy {} outside (0, ln 2]",
                    p.per_bond_entropy
                )));
            }
        }
        Ok(())
    }
}

/// Fitted C/|Λ|^Δ + α with standard errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AreaLawFit {
    pub c: f64,
    pub delta: f64,
    pub alpha: f64,
    pub c_stderr: f64,
    pub delta_stderr: f64,
    pub alpha_stderr: f64,
    /// √(weighted SSR) at the optimum.
    pub residual_norm: f64,
    pub iterations: usize,
    pub covariance: [[f64; 3]; 3],
}

impl AreaLawFit {
    pub fn eval(&self, boundary_size: f64) -> f64 {
        self.c / boundary_size.powf(self.delta) + self.alpha
    }
}

fn model(p: &[f64; 3], l: f64) -> f64 {
    p[0] / l.powf(p[1]) + p[2]
}

fn jacobian_row(p: &[f64; 3], l: f64) -> [f64; 3] {
    let lp = l.powf(-p[1]);
    [lp, -p[0] * l.ln() * lp, 1.0]
}

/// Weighted Gauss–Newton fit of the three scaling parameters.
pub fn fit_area_law(data: &ScalingDataset) -> Result<AreaLawFit> {
    if data.points.len() < 4 {
        return Err(Error::FitFailed(format!(
            "need at least 4 points for 3 parameters, got {}",
            data.points.len()
        )));
    }
    let mut pts: Vec<(f64, f64, f64)> = data
        .points
        .iter()
        .map(|p| (p.boundary_size as f64, p.per_bond_entropy, p.stderr))
        .collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let all_have_errors = pts.iter().all(|&(_, _, s)| s > 0.0);
    let weights: Vec<f64> =
        pts.iter().map(|&(_, _, s)| if all_have_errors { 1.0 / (s * s) } else { 1.0 }).collect();

    // α from the largest block, Δ = 1, C from the first-to-last drop.
    let first = pts.first().unwrap();
    let last = pts.last().unwrap();
    let mut p = [(first.1 - last.1) * first.0, 1.0, last.1];

    let objective = |p: &[f64; 3]| -> f64 {
        pts.iter()
            .zip(&weights)
            .map(|(&(l, y, _), &w)| w * (y - model(p, l)).powi(2))
            .sum()
    };

    let mut phi = objective(&p);
    let mut lambda = 0.0f64; // damping, off until the fallback engages
    let mut consecutive_failures = 0usize;
    let mut iterations = 0usize;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        // Normal equations JᵀWJ δ = JᵀW r
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for (&(l, y, _), &w) in pts.iter().zip(&weights) {
            let j = jacobian_row(&p, l);
            let r = y - model(&p, l);
            for a in 0..3 {
                jtr[a] += w * j[a] * r;
                for b in 0..3 {
                    jtj[a][b] += w * j[a] * j[b];
                }
            }
        }
        let mut lhs = jtj;
        for (a, row) in lhs.iter_mut().enumerate() {
            row[a] += lambda * jtj[a][a].max(1e-30);
        }
        let delta = solve3(&lhs, &jtr).ok_or_else(|| {
            Error::FitFailed("rank-deficient Jacobian in the normal equations".into())
        })?;
        let step_rel = (0..3)
            .map(|k| delta[k].abs() / p[k].abs().max(1e-30))
            .fold(0.0f64, f64::max);
        if step_rel < PARAM_TOL {
            return finish(&pts, &weights, p, phi, iterations);
        }

        // Backtracking line search.
        let mut t = 1.0f64;
        let mut improved = false;
        while t > 1e-12 {
            let trial = [p[0] + t * delta[0], p[1] + t * delta[1], p[2] + t * delta[2]];
            let phi_trial = objective(&trial);
            if phi_trial < phi {
                let rel_change = (0..3)
                    .map(|k| (t * delta[k]).abs() / p[k].abs().max(1e-30))
                    .fold(0.0f64, f64::max);
                p = trial;
                phi = phi_trial;
                improved = true;
                consecutive_failures = 0;
                if lambda > 0.0 {
                    lambda *= 0.25;
                    if lambda < 1e-12 {
                        lambda = 0.0;
                    }
                }
                if rel_change < PARAM_TOL {
                    return finish(&pts, &weights, p, phi, iterations);
                }
                break;
            }
            t *= 0.5;
        }
        if !improved {
            consecutive_failures += 1;
            if consecutive_failures >= 10 {
                lambda = if lambda == 0.0 { 1e-6 } else { lambda * 10.0 };
                if lambda > 1e12 {
                    return Err(Error::FitFailed(format!(
                        "no descent after {iterations} iterations even with damping"
                    )));
                }
            }
            // A stationary gradient with no possible descent means we are done.
            let scale: f64 =
                pts.iter().zip(&weights).map(|(&(_, y, _), &w)| w * y * y).sum();
            let grad_norm = jtr.iter().map(|x| x * x).sum::<f64>().sqrt();
            if grad_norm <= 1e-12 * scale.max(1e-30) {
                return finish(&pts, &weights, p, phi, iterations);
            }
        }
    }
    Err(Error::FitFailed(format!(
        "no convergence after {MAX_ITERATIONS} iterations (objective {phi:e})"
    )))
}

fn finish(
    pts: &[(f64, f64, f64)],
    weights: &[f64],
    p: [f64; 3],
    phi: f64,
    iterations: usize,
) -> Result<AreaLawFit> {
    let mut jtj = [[0.0f64; 3]; 3];
    for (&(l, _, _), &w) in pts.iter().zip(weights) {
        let j = jacobian_row(&p, l);
        for a in 0..3 {
            for b in 0..3 {
                jtj[a][b] += w * j[a] * j[b];
            }
        }
    }
    let inv = invert3(&jtj)
        .ok_or_else(|| Error::FitFailed("singular normal equations at the optimum".into()))?;
    let dof = (pts.len() as f64 - 3.0).max(1.0);
    let s2 = phi / dof;
    let mut covariance = [[0.0f64; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            covariance[a][b] = s2 * inv[a][b];
        }
    }
    if p[1] <= 0.0 {
        return Err(Error::FitFailed(format!("fitted decay exponent Δ = {} not positive", p[1])));
    }
    Ok(AreaLawFit {
        c: p[0],
        delta: p[1],
        alpha: p[2],
        c_stderr: covariance[0][0].max(0.0).sqrt(),
        delta_stderr: covariance[1][1].max(0.0).sqrt(),
        alpha_stderr: covariance[2][2].max(0.0).sqrt(),
        residual_norm: phi.sqrt(),
        iterations,
        covariance,
    })
}

fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = *a;
    let mut rhs = *b;
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| {
            m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap()
        })?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0f64; 3];
    for row in (0..3).rev() {
        let mut s = rhs[row];
        for k in row + 1..3 {
            s -= m[row][k] * x[k];
        }
        x[row] = s / m[row][row];
    }
    Some(x)
}

fn invert3(a: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let mut out = [[0.0f64; 3]; 3];
    for col in 0..3 {
        let mut e = [0.0f64; 3];
        e[col] = 1.0;
        let x = solve3(a, &e)?;
        for row in 0..3 {
            out[row][col] = x[row];
        }
    }
    Some(out)
}

/// Summary of what a fit says about the thermodynamic limit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtrapolationReport {
    pub alpha: f64,
    pub alpha_stderr: f64,
    /// ln 2 − α: the deviation from a flat entanglement spectrum.
    pub ln2_gap: f64,
    /// S = α·|Λ| + C·|Λ|^(1−Δ): the area-law coefficient and its correction.
    pub area_law_coefficient: f64,
    pub correction_amplitude: f64,
    pub correction_exponent: f64,
    /// α < ln 2 − 3σ(α): the strict sub-maximal bound holds.
    pub below_ln2: bool,
    pub formatted: String,
}

pub fn extrapolation_report(fit: &AreaLawFit) -> ExtrapolationReport {
    ExtrapolationReport {
        alpha: fit.alpha,
        alpha_stderr: fit.alpha_stderr,
        ln2_gap: LN_2 - fit.alpha,
        area_law_coefficient: fit.alpha,
        correction_amplitude: fit.c,
        correction_exponent: 1.0 - fit.delta,
        below_ln2: fit.alpha < LN_2 - 3.0 * fit.alpha_stderr,
        formatted: format!(
            "C={}, Delta={}, alpha={}",
            format_parenthetical(fit.c, fit.c_stderr),
            format_parenthetical(fit.delta, fit.delta_stderr),
            format_parenthetical(fit.alpha, fit.alpha_stderr),
        ),
    }
}

/// `0.6113(3)`-style rendering: the uncertainty rounded to one significant
/// digit, the value rounded to the same decimal place.
pub fn format_parenthetical(value: f64, stderr: f64) -> String {
    if !(stderr > 0.0) || !stderr.is_finite() {
        return format!("{value}");
    }
    let exponent = stderr.abs().log10().floor() as i32;
    let digit = (stderr / 10f64.powi(exponent)).round() as i64;
    let (digit, exponent) = if digit >= 10 { (1, exponent + 1) } else { (digit, exponent) };
    if exponent >= 0 {
        let scale = 10f64.powi(exponent);
        format!("{}({})", (value / scale).round() * scale, digit as f64 * scale)
    } else {
        let places = (-exponent) as usize;
        format!("{value:.places$}({digit})")
    }
}
