//! The coarse-sampling trap: a long pulse optimized on few quasimomentum
//! samples can score near-perfectly on those samples while collapsing in
//! between them. Verification must always use a finer grid than the
//! optimization ensemble.
//!
//! ```bash
//! cargo run --release --example coarse_sampling_trap
//! ```

use lattice_grape::{
    fine_grid_fidelity, optimize, EnsembleSpec, InitStrategy, LatticeSpec, OptimizerConfig,
    TargetGate,
};

fn main() -> lattice_grape::Result<()> {
    let spec = LatticeSpec::new(12.0);
    let target = TargetGate::x_pi();
    // deliberately sparse ensemble and a long gate: the fidelity can vary
    // quickly between the optimized points
    let ens = EnsembleSpec::uniform(6)?;
    let duration = 12.0;
    let n_slices = 384;
    let config = OptimizerConfig {
        max_iters: 4000,
        warmup_iters: 2500,
        restarts: 2,
        seed: 3,
        phi_stop: Some(0.999),
        fine_grid_points: 100,
        ..Default::default()
    };
    let result = optimize(&config, &spec, &ens, &target, duration, n_slices, InitStrategy::Random)?;

    println!("optimized on {} samples for {duration} free oscillations:", ens.len());
    println!("  coarse ensemble fidelity: {:.5}", result.phi_coarse);
    println!("  fine-grid mean fidelity:  {:.5}", result.phi_fine);
    println!("  fine-grid minimum:        {:.5}", result.fine_report.min_fidelity);
    println!(
        "  coarse - fine gap:        {:.5}",
        result.phi_coarse - result.phi_fine
    );

    // the dip structure: fidelity at the optimized samples vs between them
    let fine = fine_grid_fidelity(&result.best_pulse, &spec, &target, 100)?;
    let near = |k: f64| -> f64 {
        let mut best = (f64::INFINITY, 0.0);
        for (i, &kk) in fine.k.iter().enumerate() {
            let d = (kk - k).abs();
            if d < best.0 {
                best = (d, fine.fidelity[i]);
            }
        }
        best.1
    };
    println!("\n  k        F(at sample)   F(between samples)");
    for w in ens.k_samples.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        println!("  {:+.2}     {:.4}         {:.4} (at {mid:+.2})", w[0], near(w[0]), near(mid));
    }
    Ok(())
}
