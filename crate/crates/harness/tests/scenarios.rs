use coevo_core::analysis::ScenarioLabel;
use coevo_harness::{preset, run_experiment};

#[test]
fn single_replicate_totals_track_the_pde() {
    let mut cfg = preset("fig1b").unwrap();
    cfg.replicates = 1;
    let res = run_experiment(&cfg, Some(1)).unwrap();
    let cmp = res.comparison.as_ref().unwrap();
    let (ec, et) = (*cmp.total_error_c.last().unwrap(), *cmp.total_error_t.last().unwrap());
    assert!(ec < 0.05 && et < 0.05, "{ec} {et}");
}

#[test]
fn repeated_runs_are_bit_identical() {
    let mut cfg = preset("fig2c").unwrap();
    cfg.params.t_final = 2.0;
    cfg.snapshot_times = vec![1.0, 2.0];
    let a = run_experiment(&cfg, Some(2)).unwrap();
    let b = run_experiment(&cfg, Some(2)).unwrap();
    assert_eq!(a.rho_c.mean, b.rho_c.mean);
    assert_eq!(a.rho_t.var, b.rho_t.var);
    assert_eq!(a.snapshots, b.snapshots);
    assert_eq!(a.replicates, b.replicates);
}

#[test]
fn fig6_engines_disagree() {
    let res = run_experiment(&preset("fig6").unwrap(), None).unwrap();
    assert_eq!(res.majority, Some(ScenarioLabel::Eradication));
    let pde = res.pde.unwrap().classification.label;
    assert!(matches!(pde, ScenarioLabel::Altered | ScenarioLabel::Hot), "{pde}");
}
