//! A miniature depth-by-duration sweep: optimize each cell and tabulate the
//! best verified fidelity. The CLI `lg sweep` runs the same machinery with
//! file outputs and a manifest.
//!
//! ```bash
//! cargo run --release --example depth_sweep
//! ```

use lattice_grape::{depth_duration_sweep, OptimizerConfig, SweepGrid};

fn main() {
    let config = OptimizerConfig {
        max_iters: 2500,
        warmup_iters: 1500,
        restarts: 2,
        seed: 11,
        phi_stop: Some(0.995),
        fine_grid_points: 40,
        ..Default::default()
    };
    let mut grid = SweepGrid::new(vec![17.0, 30.0], vec![2.0, 4.0], config);
    grid.k_samples = 6;

    let table = depth_duration_sweep(&grid);
    print!("{}", table.to_csv());
}
