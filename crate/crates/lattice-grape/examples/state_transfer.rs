//! Coherent state transfer instead of a full gate: move population from
//! band 0 to band 1 with one pulse shared by several ensemble members.
//!
//! ```bash
//! cargo run --release --example state_transfer
//! ```

use lattice_grape::{rabi_initial_pulse, state_transfer_fidelity, EnsembleSpec, LatticeSpec};
use ndarray::Array1;
use num_complex::Complex64 as C64;

fn main() -> lattice_grape::Result<()> {
    let spec = LatticeSpec::new(17.0);
    let ens = EnsembleSpec::uniform(5)?;
    let mut target = Array1::zeros(spec.n_bands);
    target[1] = C64::new(1.0, 0.0);

    let pulse = rabi_initial_pulse(&spec, 6.0, 192)?;
    let report = state_transfer_fidelity(&pulse, &spec, &ens, 0, &target, true)?;

    println!("|0> -> |1> transfer under the uncorrected Rabi pulse, M = {}:", ens.len());
    println!("  coherent transfer fidelity: {:.5}", report.phi);
    for (k, f) in ens.k_samples.iter().zip(&report.per_k_fidelity) {
        println!("  k = {k:+.2}: |<1|U|0>|^2 = {f:.5}");
    }
    let grad = report.gradient.as_ref().unwrap();
    let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    println!("  gradient norm over {} controls: {gnorm:.3e}", grad.len());
    Ok(())
}
