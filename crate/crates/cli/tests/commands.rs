use sfett_cli::{cmd_approx, cmd_eigs, without_timing, ApproxConfig, EigsConfig, FuncKind, OpKind};

#[test]
fn approx_single_point_without_descent() {
    let cfg = ApproxConfig { points: 1, rsgd: false, ..Default::default() };
    let a = cmd_approx(&cfg).unwrap();
    let b = cmd_approx(&cfg).unwrap();
    assert_eq!(a.rows.len(), 1);
    assert!(a.rows[0].rel_err_rsgd.is_none());
    assert_eq!(a.rows[0].rel_err_svd.to_bits(), b.rows[0].rel_err_svd.to_bits());
    let line = a.csv.lines().nth(2).unwrap();
    let cols: Vec<&str> = line.split(',').collect();
    assert_eq!(cols.len(), 9);
    assert_eq!(cols[6], "");
    assert_eq!(cols[7], "");
}

#[test]
fn approx_header_and_columns() {
    let a = cmd_approx(&ApproxConfig { points: 3, max_iters: 5, ..Default::default() }).unwrap();
    let mut lines = a.csv.lines();
    assert!(lines.next().unwrap().starts_with("# sfett-csv v1 approx"));
    assert_eq!(
        lines.next().unwrap(),
        "shared_count,rtt,rt,rts,param_count,rel_err_svd,rel_err_rsgd,iters,time_ms"
    );
    assert_eq!(lines.count(), 3);
    for r in &a.rows {
        assert!(r.rel_err_rsgd.unwrap() <= r.rel_err_svd);
    }
}

#[test]
fn hilbert_sweep_error_decreases() {
    let rep = cmd_approx(&ApproxConfig { points: 8, rsgd: false, ..Default::default() }).unwrap();
    let errs: Vec<f64> = rep.rows.iter().map(|r| r.rel_err_svd).collect();
    assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{errs:?}");
    assert!(errs[7] < errs[0]);
}

#[test]
fn approx_exact_rank_target() {
    // a random target of full size is reproduced once the schedule saturates
    let cfg = ApproxConfig { func: FuncKind::Random, d: 3, n: 2, d_t: 1, points: 8, max_iters: 3, seed: 4, ..Default::default() };
    let rep = cmd_approx(&cfg).unwrap();
    let last = rep.rows.last().unwrap();
    assert!(last.rel_err_svd <= 1e-12, "{}", last.rel_err_svd);
    assert!(last.rel_err_rsgd.unwrap() <= 1e-12);
}

#[test]
fn approx_rejects_bad_schedule() {
    assert!(cmd_approx(&ApproxConfig { points: 0, ..Default::default() }).is_err());
    assert!(cmd_approx(&ApproxConfig { d_t: 4, ..Default::default() }).is_err());
}

#[test]
fn eigs_laplace_and_henon() {
    let lap = cmd_eigs(&EigsConfig::default()).unwrap();
    assert!(lap.rel_err.unwrap() <= 1e-8);
    let footer = lap.csv.lines().rev().nth(1).unwrap();
    assert!(footer.starts_with("# final theta="));

    let hen = cmd_eigs(&EigsConfig { op: OpKind::Henon, d: 2, n: 8, rank: 2, max_iters: 200, ..Default::default() }).unwrap();
    assert!(hen.rel_err.unwrap() <= 1e-4);
}

#[test]
fn eigs_deterministic() {
    let cfg = EigsConfig { max_iters: 20, ..Default::default() };
    let a = cmd_eigs(&cfg).unwrap().csv;
    let b = cmd_eigs(&cfg).unwrap().csv;
    assert_eq!(without_timing(&a), without_timing(&b));
    assert!(!without_timing(&a).contains("time_ms"));
}

#[test]
fn eigs_skips_reference_when_too_large() {
    let cfg = EigsConfig { op: OpKind::Henon, d: 5, n: 6, rank: 1, max_iters: 2, ..Default::default() };
    let rep = cmd_eigs(&cfg).unwrap();
    assert!(rep.reference.is_none());
    assert!(rep.csv.contains("reference= rel_err= "));
}
