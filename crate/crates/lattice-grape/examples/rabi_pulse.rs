//! Build the dispersion-blind Rabi pulse, check how well it serves a single
//! ensemble member versus the whole zone, and print the physical laser
//! settings it corresponds to.
//!
//! ```bash
//! cargo run --release --example rabi_pulse
//! ```

use lattice_grape::{
    ensemble_gate_fidelity, fine_grid_fidelity, physical_from_pulse, rabi_initial_pulse,
    EnsembleSpec, LatticeSpec, TargetGate,
};

fn main() -> lattice_grape::Result<()> {
    let spec = LatticeSpec::new(17.0);
    let target = TargetGate::x_pi();
    let pulse = rabi_initial_pulse(&spec, 5.0, 160)?;
    println!(
        "Rabi pulse: {} slices of dt = {:.5}, peak beta = {:.4}",
        pulse.n_slices,
        pulse.dt,
        pulse.beta.iter().fold(0.0f64, |m, b| m.max(b.abs()))
    );

    // the member it was calibrated for
    let center = EnsembleSpec::from_samples(vec![0.0])?;
    let at_center = ensemble_gate_fidelity(&pulse, &spec, &center, &target)?;
    println!("fidelity at k = 0:          {:.4}", at_center.phi);

    // the whole zone: magnitudes hold up, but the two half-zones sit a
    // global phase of pi apart, so the coherent average collapses
    let fine = fine_grid_fidelity(&pulse, &spec, &target, 100)?;
    println!("mean per-k fidelity:        {:.4}", fine.mean_fidelity);
    println!("worst per-k fidelity:       {:.4}", fine.min_fidelity);
    println!("coherent ensemble fidelity: {:.6}", fine.coherent_phi);

    let phys = physical_from_pulse(&pulse)?;
    println!("\nfirst slices as laser settings (eta, phi):");
    for j in 0..6 {
        println!("  slice {j}: eta = {:+.5}, phi = {:+.5}", phys.eta[j], phys.phi[j]);
    }

    // pulses round-trip through their JSON file format exactly
    let text = pulse.to_json();
    let reread = lattice_grape::ControlPulse::from_json(&text)?;
    assert_eq!(pulse, reread);
    println!("\npulse JSON round-trips exactly ({} bytes)", text.len());
    Ok(())
}
