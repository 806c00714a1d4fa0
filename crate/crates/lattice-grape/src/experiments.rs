//! Scripted numerical studies: per-k gate-error scans, fidelity sweeps over
//! depth and duration, and the single-k Nyquist bandwidth experiment.
//!
//! Sweep cells and Nyquist durations are independent jobs; results merge in
//! a fixed (r, T) order so a given grid and seed always produce the same
//! CSV bytes.

use serde::Serialize;

use crate::bands::{self, LatticeSpec};
use crate::error::Result;
use crate::fidelity::{fine_grid_fidelity, EnsembleSpec, FineGridReport, TargetGate};
use crate::grape::{optimize, InitStrategy, OptimizationResult, OptimizerConfig};

/// Per-k gate error 1 - F(k) of an optimized pulse on a fine grid.
#[derive(Debug, Clone)]
pub struct ErrorScan {
    pub k: Vec<f64>,
    pub error: Vec<f64>,
    pub max_error: f64,
    pub mean_error: f64,
}

/// Re-verify an optimization result on `n_points` quasimomenta and report
/// gate errors.
pub fn gate_error_scan(result: &OptimizationResult, n_points: usize) -> Result<ErrorScan> {
    let fine = fine_grid_fidelity(&result.best_pulse, &result.spec, &result.target, n_points)?;
    Ok(error_scan_from_report(&fine))
}

pub fn error_scan_from_report(fine: &FineGridReport) -> ErrorScan {
    let error: Vec<f64> = fine.fidelity.iter().map(|f| 1.0 - f).collect();
    let max_error = error.iter().cloned().fold(0.0, f64::max);
    let mean_error = error.iter().sum::<f64>() / error.len() as f64;
    ErrorScan { k: fine.k.clone(), error, max_error, mean_error }
}

/// Grid of (depth, duration) cells to optimize, plus the shared recipe.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub r_values: Vec<f64>,
    /// Durations in free-oscillation periods (recomputed per depth).
    pub durations: Vec<f64>,
    /// Quasimomentum samples per cell optimization.
    pub k_samples: usize,
    pub slices_per_period: usize,
    pub config: OptimizerConfig,
}

impl SweepGrid {
    pub fn new(r_values: Vec<f64>, durations: Vec<f64>, config: OptimizerConfig) -> Self {
        Self { r_values, durations, k_samples: 10, slices_per_period: 32, config }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub r: f64,
    pub duration_periods: f64,
    pub dispersion: f64,
    pub phi_fine_best: f64,
    pub phi_coarse_best: f64,
    pub restart_winner: usize,
    pub termination: String,
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Long-form CSV, one row per (r, T) cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "r,duration_periods,dispersion,phi_fine_best,phi_coarse_best,restart_winner,termination\n",
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{:.12e},{:.12e},{:.12e},{},{}\n",
                row.r,
                row.duration_periods,
                row.dispersion,
                row.phi_fine_best,
                row.phi_coarse_best,
                row.restart_winner,
                row.termination
            ));
        }
        out
    }
}

/// Optimize every cell of the grid and tabulate the best fine-grid
/// fidelity. Cell failures are recorded in the termination column and the
/// sweep continues.
pub fn depth_duration_sweep(grid: &SweepGrid) -> SweepTable {
    let mut rows = Vec::with_capacity(grid.r_values.len() * grid.durations.len());
    for &r in &grid.r_values {
        let spec = LatticeSpec::new(r);
        let dispersion = bands::dispersion(&spec).map(|d| d.d_value);
        for &duration in &grid.durations {
            let cell = dispersion
                .as_ref()
                .map_err(|e| e.to_string())
                .and_then(|&d| {
                    sweep_cell(grid, &spec, duration)
                        .map(|result| (d, result))
                        .map_err(|e| e.to_string())
                });
            let row = match cell {
                Ok((d, result)) => SweepRow {
                    r,
                    duration_periods: duration,
                    dispersion: d,
                    phi_fine_best: result.phi_fine,
                    phi_coarse_best: result.phi_coarse,
                    restart_winner: result.restart_index,
                    termination: result.termination.to_string(),
                },
                Err(message) => SweepRow {
                    r,
                    duration_periods: duration,
                    dispersion: f64::NAN,
                    phi_fine_best: f64::NAN,
                    phi_coarse_best: f64::NAN,
                    restart_winner: 0,
                    termination: format!("error: {message}").replace(',', ";"),
                },
            };
            rows.push(row);
        }
    }
    SweepTable { rows }
}

fn sweep_cell(grid: &SweepGrid, spec: &LatticeSpec, duration: f64) -> Result<OptimizationResult> {
    let ens = EnsembleSpec::uniform(grid.k_samples)?;
    let n_slices = (grid.slices_per_period as f64 * duration).ceil().max(4.0) as usize;
    optimize(
        &grid.config,
        spec,
        &ens,
        &TargetGate::x_pi(),
        duration,
        n_slices,
        InitStrategy::Mixed,
    )
}

/// Fidelity response across the zone of pulses optimized at a single
/// quasimomentum, one scan per duration.
#[derive(Debug, Clone)]
pub struct NyquistRun {
    pub k_opt: f64,
    pub durations: Vec<f64>,
    pub scans: Vec<FineGridReport>,
    /// Full width at half maximum of each response curve.
    pub fwhm: Vec<f64>,
}

impl NyquistRun {
    /// `duration_periods,k,fidelity` rows over every scan.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("duration_periods,k,fidelity\n");
        for (duration, scan) in self.durations.iter().zip(&self.scans) {
            for (k, f) in scan.k.iter().zip(&scan.fidelity) {
                out.push_str(&format!("{duration},{k},{f:.12e}\n"));
            }
        }
        out
    }
}

/// Optimize X_pi for one quasimomentum per duration, then scan the response
/// over the zone and measure its width.
pub fn nyquist_experiment(
    spec: &LatticeSpec,
    config: &OptimizerConfig,
    k_opt: f64,
    durations: &[f64],
    n_points: usize,
) -> Result<NyquistRun> {
    let ens = EnsembleSpec::from_samples(vec![k_opt])?;
    let target = TargetGate::x_pi();
    let mut scans = Vec::with_capacity(durations.len());
    let mut fwhm = Vec::with_capacity(durations.len());
    for &duration in durations {
        let n_slices = (32.0 * duration).ceil().max(4.0) as usize;
        let result = optimize(config, spec, &ens, &target, duration, n_slices, InitStrategy::Mixed)?;
        let scan = fine_grid_fidelity(&result.best_pulse, spec, &target, n_points)?;
        fwhm.push(fwhm_around_peak(&scan.k, &scan.fidelity));
        scans.push(scan);
    }
    Ok(NyquistRun { k_opt, durations: durations.to_vec(), scans, fwhm })
}

/// Full width at half maximum of a sampled curve around its global peak,
/// with linear interpolation between grid points. Sides that never fall
/// below half maximum are clamped at the zone edges, so a flat response
/// reports the full zone width of 2.
pub fn fwhm_around_peak(k: &[f64], f: &[f64]) -> f64 {
    debug_assert_eq!(k.len(), f.len());
    debug_assert!(k.len() >= 2);
    let mut peak = 0usize;
    for i in 1..f.len() {
        if f[i] > f[peak] {
            peak = i;
        }
    }
    let half = f[peak] / 2.0;

    let mut left = -1.0;
    for i in (0..peak).rev() {
        if f[i] < half {
            let t = (half - f[i]) / (f[i + 1] - f[i]);
            left = k[i] + t * (k[i + 1] - k[i]);
            break;
        }
    }
    let mut right = 1.0;
    for i in (peak + 1)..f.len() {
        if f[i] < half {
            let t = (half - f[i - 1]) / (f[i] - f[i - 1]);
            right = k[i - 1] + t * (k[i] - k[i - 1]);
            break;
        }
    }
    right - left
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fwhm_of_triangle_curve() {
        // peak 1 at k = 0, linear to 0 at k = +-0.5: half max at +-0.25
        let k: Vec<f64> = (0..=200).map(|i| -1.0 + i as f64 / 100.0).collect();
        let f: Vec<f64> = k.iter().map(|&x| (1.0 - (x.abs() / 0.5)).max(0.0)).collect();
        let width = fwhm_around_peak(&k, &f);
        assert!((width - 0.5).abs() < 1e-12, "got {width}");
    }

    #[test]
    fn fwhm_flat_curve_clamps_to_zone() {
        let k: Vec<f64> = (0..=100).map(|i| -1.0 + i as f64 / 50.0).collect();
        let f = vec![0.9; k.len()];
        assert_eq!(fwhm_around_peak(&k, &f), 2.0);
    }

    #[test]
    fn fwhm_half_open_side() {
        // decays only on the right of the peak
        let k: Vec<f64> = (0..=100).map(|i| -1.0 + i as f64 / 50.0).collect();
        let f: Vec<f64> = k.iter().map(|&x| if x < 0.0 { 1.0 } else { 1.0 - x }).collect();
        let width = fwhm_around_peak(&k, &f);
        assert!((width - 1.5).abs() < 1e-12, "got {width}");
    }

    #[test]
    fn perfect_gate_scan_has_zero_error() {
        let fine = FineGridReport {
            k: vec![-0.5, 0.5],
            fidelity: vec![1.0, 1.0],
            trace_phase: vec![0.0, 0.0],
            coherent_phi: 1.0,
            mean_fidelity: 1.0,
            min_fidelity: 1.0,
            max_fidelity: 1.0,
        };
        let scan = error_scan_from_report(&fine);
        assert_eq!(scan.max_error, 0.0);
        assert_eq!(scan.mean_error, 0.0);
    }

    #[test]
    fn one_cell_sweep_produces_one_row() {
        let config = OptimizerConfig {
            max_iters: 5,
            restarts: 1,
            fine_grid_points: 10,
            ..Default::default()
        };
        let mut grid = SweepGrid::new(vec![17.0], vec![1.0], config);
        grid.k_samples = 2;
        let table = depth_duration_sweep(&grid);
        assert_eq!(table.rows.len(), 1);
        let csv = table.to_csv();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.starts_with("r,duration_periods,dispersion,"));
        assert!(table.rows[0].phi_fine_best.is_finite());
    }

    #[test]
    fn sweep_records_cell_failures_and_continues() {
        let config = OptimizerConfig {
            max_iters: 1,
            restarts: 1,
            fine_grid_points: 10,
            ..Default::default()
        };
        // r = 0 has no free-oscillation period, so its cells must fail
        let mut grid = SweepGrid::new(vec![0.0, 17.0], vec![1.0], config);
        grid.k_samples = 2;
        let table = depth_duration_sweep(&grid);
        assert_eq!(table.rows.len(), 2);
        assert!(table.rows[0].termination.starts_with("error"));
        assert!(table.rows[0].phi_fine_best.is_nan());
        assert!(table.rows[1].phi_fine_best.is_finite());
    }

    #[test]
    fn sweep_is_deterministic() {
        let config = OptimizerConfig {
            max_iters: 10,
            restarts: 2,
            seed: 77,
            fine_grid_points: 10,
            ..Default::default()
        };
        let mut grid = SweepGrid::new(vec![13.0], vec![1.0], config);
        grid.k_samples = 2;
        let a = depth_duration_sweep(&grid).to_csv();
        let b = depth_duration_sweep(&grid).to_csv();
        assert_eq!(a, b);
    }
}
