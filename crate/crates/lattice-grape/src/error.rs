//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the band solver, propagation, and optimization layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice depth must be nonnegative and finite, got r = {0}")]
    InvalidDepth(f64),

    #[error("plane-wave basis of half-width {n_planewaves} is smaller than the retained band count {n_bands}")]
    BasisTooSmall { n_planewaves: usize, n_bands: usize },

    #[error("at least two bands are required for a computational subspace, got {0}")]
    TooFewBands(usize),

    #[error("quasimomentum {0} lies outside the first Brillouin zone (-1, 1]")]
    OutOfZone(f64),

    #[error("eigensolver failed to converge: {0}")]
    Eigensolver(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("zero-depth lattice has no 0-1 oscillation to define a time unit")]
    DegenerateGap,

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("intensity ratio eta[{index}] = {eta} is below the physical floor -1")]
    IntensityFloor { index: usize, eta: f64 },

    #[error("pulse has zero reference depth; physical parameters are undefined")]
    ZeroDepthPulse,

    #[error("control slice count is zero")]
    EmptyPulse,

    #[error("slice duration must be positive, got dt = {0}")]
    InvalidSliceDuration(f64),

    #[error("ensemble needs at least one quasimomentum sample")]
    EmptyEnsemble,

    #[error("duplicate quasimomentum sample k = {0}")]
    DuplicateSample(f64),

    #[error("ensemble weights invalid: {0}")]
    InvalidWeights(String),

    #[error("target matrix is not unitary (defect {0:.3e})")]
    NonUnitaryTarget(f64),

    #[error("subspace band index {index} exceeds the retained band count {n_bands}")]
    SubspaceOutOfRange { index: usize, n_bands: usize },

    #[error("target state is not normalized (|psi|^2 = {0})")]
    UnnormalizedState(f64),

    #[error("drive matrix element between bands 0 and 1 vanishes; cannot calibrate a Rabi pulse")]
    VanishingMatrixElement,

    #[error("random initialization requires an amplitude bound")]
    MissingAmplitudeBound,

    #[error("a fidelity scan needs at least 2 grid points, got {0}")]
    TooFewGridPoints(usize),

    #[error("pulse file does not match the expected schema: {0}")]
    PulseSchema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
