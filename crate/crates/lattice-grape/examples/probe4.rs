use lattice_grape::fidelity::gate_fidelity_over_channels;
use lattice_grape::*;
use std::time::Instant;

fn main() {
    let spec = LatticeSpec::new(17.0);
    let target = TargetGate::x_pi();
    let ens = EnsembleSpec::uniform(20).unwrap();
    let channels = ens.channels(&spec).unwrap();
    let pulse = rabi_initial_pulse(&spec, 5.0, 160).unwrap();

    // warm up
    for _ in 0..3 {
        gate_fidelity_over_channels(&channels, &ens.weights, &pulse, &target, true).unwrap();
    }

    let n = 30;
    let t0 = Instant::now();
    for _ in 0..n {
        gate_fidelity_over_channels(&channels, &ens.weights, &pulse, &target, false).unwrap();
    }
    let plain = t0.elapsed().as_secs_f64() / n as f64;
    let t0 = Instant::now();
    for _ in 0..n {
        gate_fidelity_over_channels(&channels, &ens.weights, &pulse, &target, true).unwrap();
    }
    let grad = t0.elapsed().as_secs_f64() / n as f64;
    println!("plain eval: {:.2} ms   gradient eval: {:.2} ms", plain * 1e3, grad * 1e3);

    // single-channel breakdown
    let one = &channels[10];
    let t0 = Instant::now();
    for _ in 0..n {
        lattice_grape::propagate::total_unitary(one, &pulse).unwrap();
    }
    println!("one-channel evolution: {:.3} ms", t0.elapsed().as_secs_f64() / n as f64 * 1e3);

    let t0 = Instant::now();
    for _ in 0..n {
        lattice_grape::propagate::evolve_with_products(one, &pulse).unwrap();
    }
    println!("one-channel with products: {:.3} ms", t0.elapsed().as_secs_f64() / n as f64 * 1e3);

    // eigh microbench
    let h = lattice_grape::propagate::slice_hamiltonian(&one.energies, &one.ops, 0.7, -0.4);
    let t0 = Instant::now();
    let reps = 200_000;
    for _ in 0..reps {
        std::hint::black_box(lattice_grape::linalg::eigh(std::hint::black_box(&h)).unwrap());
    }
    println!("eigh 6x6: {:.2} us", t0.elapsed().as_secs_f64() / reps as f64 * 1e6);

    let a = lattice_grape::linalg::identity(6);
    let t0 = Instant::now();
    let reps = 2_000_000;
    let mut out = ndarray::Array2::zeros((6, 6));
    for _ in 0..reps {
        lattice_grape::linalg::mul_into(std::hint::black_box(&a), std::hint::black_box(&h), &mut out);
    }
    println!("matmul 6x6: {:.3} us", t0.elapsed().as_secs_f64() / reps as f64 * 1e6);
}
