//! Map charge-qubit parameters onto the lattice problem and tabulate the
//! lowest levels in units of the charging energy.
//!
//! The charge qubit Hamiltonian 4 E_C (n - n_g)^2 - E_J cos(phi) becomes
//! the lattice Hamiltonian at depth r = 2 E_J / E_C and quasimomentum
//! k = 2 n_g; the gate charge plays the role of the quasimomentum, and its
//! slow fluctuations are this system's version of sampling the ensemble.
//!
//! ```bash
//! cargo run --release --example charge_qubit
//! ```

use lattice_grape::{charge_qubit_map, dispersion, solve_bands, LatticeSpec};

fn main() -> lattice_grape::Result<()> {
    println!("{:>8} {:>8} {:>8} {:>8} | lowest levels / E_C (up to a constant)", "EJ/EC", "n_g", "r", "k");
    for &(ej_over_ec, n_g) in &[(6.0, 0.25), (8.5, 0.0), (8.5, 0.5), (25.0, 0.3)] {
        let (r, k) = charge_qubit_map(ej_over_ec, 1.0, n_g)?;
        let spec = LatticeSpec::new(r);
        let sol = solve_bands(&spec, k)?;
        let levels: Vec<String> =
            sol.energies.iter().take(4).map(|e| format!("{e:>9.4}")).collect();
        println!(
            "{ej_over_ec:>8} {n_g:>8} {r:>8} {k:>8} | {}",
            levels.join(" ")
        );
    }

    // charge dispersion shrinks fast with E_J / E_C, the same trade-off the
    // lattice faces in r
    println!("\ncharge dispersion of the 0-1 splitting:");
    for &ej_over_ec in &[1.0, 2.5, 6.0, 8.5, 25.0] {
        let (r, _) = charge_qubit_map(ej_over_ec, 1.0, 0.0)?;
        let d = dispersion(&LatticeSpec::new(r))?;
        println!("  EJ/EC = {ej_over_ec:>5}: D = {:.6}", d.d_value);
    }
    Ok(())
}
