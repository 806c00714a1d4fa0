//! Optimize for a single quasimomentum and look at the fidelity response
//! across the zone: shorter pulses have broader spectra, so their response
//! is wider. The full width at half maximum shrinks as the gate lengthens.
//!
//! ```bash
//! cargo run --release --example nyquist_bandwidth
//! ```

use lattice_grape::{nyquist_experiment, LatticeSpec, OptimizerConfig};

fn main() -> lattice_grape::Result<()> {
    let spec = LatticeSpec::new(2.0);
    let config = OptimizerConfig {
        max_iters: 1500,
        restarts: 2,
        seed: 5,
        phi_stop: Some(0.9999),
        fine_grid_points: 101,
        ..Default::default()
    };
    let durations = [3.0, 8.0, 16.0];
    let run = nyquist_experiment(&spec, &config, 0.5, &durations, 101)?;

    println!("r = 2, optimized only for k = 0.5:");
    for ((duration, fwhm), scan) in run.durations.iter().zip(&run.fwhm).zip(&run.scans) {
        let peak_k = scan
            .fidelity
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| scan.k[i])
            .unwrap();
        println!(
            "  T = {duration:>4} periods: FWHM = {fwhm:.3}, peak {:.4} at k = {peak_k:+.3}",
            scan.max_fidelity
        );
    }
    assert!(
        run.fwhm.windows(2).all(|w| w[1] < w[0]),
        "longer pulses must respond over a narrower k-window"
    );
    println!("FWHM strictly decreasing with duration.");
    Ok(())
}
