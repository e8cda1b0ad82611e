use influence_core::approxdeg::approx_degree;
use influence_core::bounds::{lb_query_general_best, lb_query_main, DEFAULT_K_MAX};
use influence_core::measures::block_sensitivity;
use influence_core::qsim::{deutsch_parity, grover, run, run_direct, serial_read, simulate, Algorithm, GapMode};
use influence_core::{wht, Builtin, TruthTable};

/// Every lower bound applicable at the measured error must sit at or below `T`.
fn check_bounds(alg: &Algorithm, t: &TruthTable) {
    let report = simulate(alg, t, &[1, 3], GapMode::AllPairs).unwrap();
    let queries = report.queries as f64;
    let eps = report.worst_eps;
    let spec = wht(t);
    assert!(report.e_statistics.iter().all(|e| e.within_bounds), "{}", alg.name());
    assert_eq!(report.gap.violations, 0, "{}", alg.name());
    if eps < 1.0 {
        assert!(queries >= lb_query_main(spec.rho(), t.n(), eps).unwrap().value - 1e-9);
        assert!(queries >= lb_query_general_best(&spec, eps, DEFAULT_K_MAX).unwrap().1.value - 1e-9);
    }
    if eps <= 1.0 / 3.0 {
        let bs = block_sensitivity(t, None).unwrap().value as f64;
        assert!(queries >= 0.25 * bs.sqrt() - 1e-9);
        let d = approx_degree(t, eps.min(0.499)).unwrap().degree as f64;
        assert!(queries >= 0.5 * d - 1e-9, "{}: T = {queries}, deg = {d}", alg.name());
    }
}

#[test]
fn builtin_algorithms_respect_bounds() {
    for n in [2, 4, 6] {
        check_bounds(&deutsch_parity(n).unwrap(), &TruthTable::builtin(Builtin::Parity, n).unwrap());
    }
    for (n, r) in [(4, 1), (5, 1), (3, 1)] {
        check_bounds(&grover(n, r).unwrap(), &TruthTable::builtin(Builtin::Or, n).unwrap());
    }
    for seed in 0..4 {
        let t = TruthTable::random(4, seed).unwrap();
        check_bounds(&serial_read(&t).unwrap(), &t);
    }
    let f = TruthTable::builtin(Builtin::PaperF, 4).unwrap();
    check_bounds(&serial_read(&f).unwrap(), &f);
}

#[test]
fn parity_bound_is_tight() {
    let parity = TruthTable::builtin(Builtin::Parity, 4).unwrap();
    let report = simulate(&deutsch_parity(4).unwrap(), &parity, &[1], GapMode::AllPairs).unwrap();
    assert!(report.worst_eps < 1e-9);
    let bound = lb_query_main(1.0, 4, 0.0).unwrap().value;
    assert_eq!(bound, 2.0);
    assert_eq!(report.queries, 2);
}

#[test]
fn fourier_and_direct_agree_on_builtins() {
    let algs = [
        deutsch_parity(2).unwrap(),
        deutsch_parity(4).unwrap(),
        grover(4, 1).unwrap(),
        grover(3, 2).unwrap(),
        serial_read(&TruthTable::random(4, 9).unwrap()).unwrap(),
    ];
    for alg in &algs {
        let state = run(alg).unwrap().state;
        for x in 0..1usize << alg.layout().n_index() {
            let direct = run_direct(alg, x).unwrap();
            let fourier = state.reconstruct(x);
            let gap = direct.iter().zip(&fourier).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(gap < 1e-9, "{} x = {x}", alg.name());
        }
    }
}
