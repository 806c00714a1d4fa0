//! Solve the Bloch bands of the lattice for several depths and report the
//! dispersion of the 0-1 transition.
//!
//! ```bash
//! cargo run --release --example band_structure
//! ```

use lattice_grape::{band_scan, dispersion, free_oscillation_period, LatticeSpec};

fn main() -> lattice_grape::Result<()> {
    println!("{:>6} {:>10} {:>12} {:>12} {:>14}", "r", "D", "gap(k=0)", "gap(k=1)", "period");
    for &r in &[2.0, 12.0, 13.0, 17.0, 30.0, 110.0] {
        let spec = LatticeSpec::new(r);
        let report = dispersion(&spec)?;
        let period = free_oscillation_period(&spec)?;
        println!(
            "{r:>6} {:>10.4} {:>12.6} {:>12.6} {:>14.6}",
            report.d_value, report.gap_center, report.gap_edge, period
        );
    }

    // a small scan over the zone, CSV to stdout
    let spec = LatticeSpec::with_basis(13.0, 16, 4);
    let k_points: Vec<f64> = (0..9).map(|i| -1.0 + 0.25 * i as f64).collect();
    let scan = band_scan(&spec, &k_points)?;
    println!("\nband energies at r = 13 (first four bands):");
    print!("{}", scan.to_csv());
    Ok(())
}
