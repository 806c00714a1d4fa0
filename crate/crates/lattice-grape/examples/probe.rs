use lattice_grape::*;

fn run(tag: &str, r: f64, duration: f64, m: usize, iters: usize, seed: u64, init: InitStrategy) {
    let warmup: usize = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2000);
    let spec = LatticeSpec::new(r);
    let target = TargetGate::x_pi();
    let n_slices = (32.0 * duration) as usize;
    let ens = EnsembleSpec::uniform(m).unwrap();
    let config = OptimizerConfig {
        max_iters: iters,
        warmup_iters: warmup,
        restarts: 1,
        seed,
        fine_grid_points: 100,
        ..Default::default()
    };
    let t0 = std::time::Instant::now();
    let result = optimize(&config, &spec, &ens, &target, duration, n_slices, init).unwrap();
    println!(
        "{tag}: r={r} T={duration} M={m} iters={iters} seed={seed}: coarse {:.5} fine-mean {:.5} fine-min {:.5} [{} it, {:?}, {:.1?}]",
        result.phi_coarse,
        result.phi_fine,
        result.fine_report.min_fidelity,
        result.iterations(),
        result.termination,
        t0.elapsed(),
    );
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("all");

    if which == "r17" || which == "all" {
        run("headline", 17.0, 5.0, 20, 20000, 1, InitStrategy::Rabi);
        run("headline", 17.0, 5.0, 20, 20000, 2, InitStrategy::Random);
    }
    if which == "r12" || which == "all" {
        run("r12-T3", 12.0, 3.0, 10, 10000, 1, InitStrategy::Rabi);
        run("r12-T3", 12.0, 3.0, 10, 10000, 2, InitStrategy::Random);
    }
}
