//! Entanglement entropy of valence-bond-solid (VBS) ground states on
//! reflection-symmetric graphs.
//!
//! A VBS state on a reflection-symmetric graph Schmidt-decomposes over the
//! degenerate boundary states of the half-graph, and the entanglement spectrum
//! is controlled by a single real symmetric overlap matrix of dimension
//! 2^|Λ|, where Λ is the set of boundary sites carrying a valence bond across
//! the cut. This crate computes that matrix and the resulting von Neumann
//! entropy by several independent routes:
//!
//! - [`mc`] — Monte Carlo integration over spin coherent-state angles,
//! - [`transfer`] — exact rational coefficient recursions for horizontal
//!   ladders, their infinite-length Perron–Frobenius limits, and Kronecker
//!   recursions for vertical ladders,
//! - [`oracle`] — exhaustive loop/strand enumeration and brute-force
//!   Schwinger-boson construction of the reduced density matrix,
//! - [`fit`] — area-law scaling fits S/|Λ| = C/|Λ|^Δ + α.
//!
//! All exact engines keep coefficients as rationals (q = 1/3) and convert to
//! floating point only at the eigenvalue/entropy stage.

pub mod dense;
pub mod fit;
pub mod graph;
pub mod mc;
pub mod oracle;
pub mod projector;
pub mod record;
pub mod spectrum;
pub mod transfer;

pub use fit::{fit_area_law, AreaLawFit, ScalingDataset, ScalingPoint};
pub use graph::{Family, SymmetricGraph, Violation};
pub use mc::{estimate_z, McConfig, McMethod, OverlapEstimate};
pub use spectrum::{eig_symmetric, entropy_from_spectrum, EntropySpectrum};
pub use transfer::{LadderCoefficients, LadderEngine, LadderFamily, PartialMatching};

/// Natural log of 2; the per-bond entropy of a maximally entangled valence bond.
pub const LN_2: f64 = core::f64::consts::LN_2;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid graph: {0:?}")]
    InvalidGraph(Vec<graph::Violation>),
    #[error("boundary too large: |Λ| = {0} exceeds the guard of {1}")]
    BoundaryTooLarge(usize, usize),
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),
    #[error("matrix is not symmetric: max asymmetry {asym:e} exceeds {tol:e}")]
    NotSymmetric { asym: f64, tol: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    EigNoConvergence { sweeps: usize, residual: f64 },
    #[error("spectrum is identically zero")]
    ZeroSpectrum,
    #[error("bad Monte Carlo configuration: {0}")]
    BadMcConfig(String),
    #[error("Metropolis acceptance rate {0:.3} outside [0.05, 0.95]; retune step_angle")]
    AcceptanceRate(f64),
    #[error("imaginary residual {max_imag:e} exceeds 5x the largest standard error {max_stderr:e}")]
    ImagResidual { max_imag: f64, max_stderr: f64 },
    #[error("oracle out of scope: {0}")]
    OracleOutOfScope(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("power iteration did not converge after {0} iterations")]
    PowerIterationDiverged(usize),
    #[error("fit failed: {0}")]
    FitFailed(String),
    #[error("dataset error: {0}")]
    Dataset(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
