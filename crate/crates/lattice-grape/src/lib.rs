//! Ensemble quantum optimal control for atoms in a 1-D optical lattice.
//!
//! Atoms loaded across the Brillouin zone of an optical lattice form an
//! inhomogeneous ensemble: every quasimomentum k sees a different band
//! Hamiltonian, yet all of them share the same laser controls. This crate
//! finds piecewise-constant intensity/phase modulations that realize a
//! target gate (by default an X_pi on the lowest two bands) for the whole
//! ensemble at once, by gradient ascent on a phase-coherent
//! ensemble-averaged fidelity.
//!
//! The pieces:
//!
//! - [`bands`] — plane-wave Bloch solver for the k-dependent lattice
//!   Hamiltonian, dispersion of the 0-1 transition, control operators in
//!   the band basis, and the charge-qubit parameter mapping.
//! - [`pulse`] — piecewise-constant control pulses, the (eta, phi) laser
//!   parameterization, and the pulse JSON file format.
//! - [`propagate`] — per-member time evolution and exact derivatives of the
//!   total propagator with respect to every control amplitude.
//! - [`fidelity`] — the coherent ensemble fidelity, its exact gradient,
//!   state-transfer variants, and fine-grid verification scans.
//! - [`grape`] — gradient ascent with a backtracking line search, Rabi and
//!   random initializations, and multi-restart driving.
//! - [`experiments`] — scripted studies: gate-error scans, depth/duration
//!   sweeps, and the single-k Nyquist bandwidth experiment.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --release --example band_structure
//! cargo run --release --example charge_qubit
//! cargo run --release --example rabi_pulse
//! cargo run --release --example optimize_xpi
//! cargo run --release --example coarse_sampling_trap
//! cargo run --release --example nyquist_bandwidth
//! cargo run --release --example depth_sweep
//! ```
//!
//! The `lg` binary exposes the same operations as subcommands (`bands`,
//! `optimize`, `verify`, `nyquist`, `sweep`, `pulse-info`) with
//! machine-readable CSV/JSON outputs and a run manifest per bundle.

pub mod bands;
pub mod error;
pub mod experiments;
pub mod fidelity;
pub mod grape;
pub mod linalg;
pub mod manifest;
pub mod propagate;
pub mod pulse;

pub use bands::{
    band_scan, build_hamiltonian, charge_qubit_map, control_operators, dispersion,
    free_oscillation_period, recoil_units, solve_bands, BandSolution, ControlOperators,
    DispersionReport, LatticeSpec,
};
pub use error::{Error, Result};
pub use experiments::{
    depth_duration_sweep, gate_error_scan, nyquist_experiment, ErrorScan, NyquistRun, SweepGrid,
    SweepTable,
};
pub use fidelity::{
    ensemble_gate_fidelity, fidelity_gradient, fine_grid_fidelity, state_transfer_fidelity,
    EnsembleObjective, EnsembleSpec, FidelityReport, FineGridReport, TargetGate,
};
pub use grape::{
    optimize, rabi_initial_pulse, random_initial_pulse, InitStrategy, OptimizationResult,
    OptimizerConfig, Termination,
};
pub use manifest::RunManifest;
pub use propagate::{
    propagator_derivatives, slice_propagator, total_evolution, KChannel, PropagatorSet,
};
pub use pulse::{physical_from_pulse, pulse_from_physical, ControlPulse, PhysicalPulse};
