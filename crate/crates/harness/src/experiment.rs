//! Replicate orchestration and aggregation.
//!
//! Replicate `i` uses seed `base + i`. Replicates run on a rayon pool but are
//! collected in index order, so every aggregate is independent of the
//! schedule. The PDE, when requested, runs once alongside them.

use coevo_core::analysis::{classify, ClassifyThresholds, ScenarioClassification, ScenarioLabel};
use coevo_core::ibm::run_ibm;
use coevo_core::pde::run_pde;
use coevo_core::{ModelError, Run, Terminal};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

/// Streaming mean and sample variance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }
}

/// Element-wise [`Welford`] over equal-length vectors.
#[derive(Debug, Clone, Default)]
pub struct VecWelford {
    acc: Vec<Welford>,
}

impl VecWelford {
    pub fn push(&mut self, xs: &[f64]) {
        if self.acc.is_empty() {
            self.acc = vec![Welford::default(); xs.len()];
        }
        assert_eq!(self.acc.len(), xs.len(), "vector length changed");
        for (w, &x) in self.acc.iter_mut().zip(xs) {
            w.push(x);
        }
    }

    pub fn moments(&self) -> Moments {
        Moments {
            mean: self.acc.iter().map(Welford::mean).collect(),
            var: self.acc.iter().map(Welford::variance).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

impl Moments {
    fn exact(values: &[f64]) -> Self {
        Self {
            mean: values.to_vec(),
            var: vec![0.0; values.len()],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotStats {
    pub t: f64,
    pub tumour: Moments,
    pub ctl: Moments,
    /// Present when both engines ran.
    pub pde_tumour: Option<Vec<f64>>,
    pub pde_ctl: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateSummary {
    pub index: usize,
    pub seed: u64,
    pub terminal: Terminal,
    pub final_rho_c: f64,
    pub final_rho_t: f64,
    pub classification: ScenarioClassification<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdeSummary {
    pub trajectory: Run,
    pub classification: ScenarioClassification<f64>,
}

/// Stochastic-vs-continuum distances.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub snapshot_times: Vec<f64>,
    /// `Σ|n̄_C - n_C^PDE| / Σ n_C^PDE` at each snapshot.
    pub d_tumour: Vec<f64>,
    pub d_ctl: Vec<f64>,
    /// `|ρ̄_C - ρ_C^PDE| / ρ_C^PDE` at every recorded step.
    pub total_error_c: Vec<f64>,
    pub total_error_t: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub config: ExperimentConfig,
    pub times: Vec<f64>,
    /// Replicate moments of the totals; the PDE series with zero variance
    /// when only the PDE ran.
    pub rho_c: Moments,
    pub rho_t: Moments,
    /// Mean immune score over replicates whose tumour is still alive;
    /// `+∞` when none is.
    pub immune_mean: Vec<f64>,
    pub snapshots: Vec<SnapshotStats>,
    pub replicates: Vec<ReplicateSummary>,
    pub majority: Option<ScenarioLabel>,
    pub pde: Option<PdeSummary>,
    pub comparison: Option<Comparison>,
}

impl AggregateResult {
    pub fn snapshot_at(&self, t: f64) -> Option<&SnapshotStats> {
        self.snapshots
            .iter()
            .find(|s| (s.t - t).abs() <= 1e-9 * t.abs().max(1.0))
    }

    pub fn extinct_replicates(&self) -> usize {
        self.replicates
            .iter()
            .filter(|r| matches!(r.terminal, Terminal::TumourExtinct { .. }))
            .count()
    }
}

/// Most frequent label; ties go to the label seen first in replicate order.
pub fn majority_label(labels: &[ScenarioLabel]) -> Option<ScenarioLabel> {
    let mut best: Option<(ScenarioLabel, usize)> = None;
    for &l in labels {
        let n = labels.iter().filter(|&&x| x == l).count();
        if best.is_none_or(|(_, m)| n > m) {
            best = Some((l, n));
        }
    }
    best.map(|(l, _)| l)
}

fn relative_l1(a: &[f64], reference: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(reference).map(|(x, y)| (x - y).abs()).sum();
    num / reference.iter().sum::<f64>()
}

/// Runs every requested engine and aggregates. `workers = None` lets rayon
/// pick the pool size.
pub fn run_experiment(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<AggregateResult> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Config(format!("worker pool: {e}")))?;
    let grid = cfg.grid()?;
    let params = &cfg.params;
    let snaps = &cfg.snapshot_times;

    let (pde, ibm) = pool.install(|| {
        rayon::join(
            || cfg.engine.runs_pde().then(|| run_pde(params, &grid, &cfg.init, None, snaps)),
            || {
                if !cfg.engine.runs_ibm() {
                    return Vec::new();
                }
                (0..cfg.replicates)
                    .into_par_iter()
                    .map(|i| {
                        let seed = cfg.seed.wrapping_add(i as u64);
                        run_ibm(params, &grid, &cfg.init, seed, snaps)
                    })
                    .collect::<Vec<_>>()
            },
        )
    });
    let pde = pde.transpose()?;

    let mut runs = Vec::with_capacity(ibm.len());
    let mut failed: Vec<(usize, u64, ModelError)> = Vec::new();
    for (i, r) in ibm.into_iter().enumerate() {
        match r {
            Ok(run) => runs.push(run),
            Err(e) => failed.push((i, cfg.seed.wrapping_add(i as u64), e)),
        }
    }
    if !failed.is_empty() {
        return Err(HarnessError::Replicates {
            total: cfg.replicates,
            failed,
        });
    }
    aggregate(cfg, &runs, pde)
}

/// Aggregates finished replicate trajectories (in index order) and the
/// optional PDE trajectory.
pub fn aggregate(cfg: &ExperimentConfig, runs: &[Run], pde: Option<Run>) -> Result<AggregateResult> {
    let thresholds = ClassifyThresholds::default();
    let pde = match pde {
        Some(trajectory) => Some(PdeSummary {
            classification: classify(&trajectory, &thresholds)?,
            trajectory,
        }),
        None => None,
    };

    let replicates = runs
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(ReplicateSummary {
                index: i,
                seed: cfg.seed.wrapping_add(i as u64),
                terminal: r.terminal,
                final_rho_c: r.final_rho_c(),
                final_rho_t: r.final_rho_t(),
                classification: classify(r, &thresholds)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<_> = replicates.iter().map(|r| r.classification.label).collect();

    let (times, rho_c, rho_t, immune_mean, mut snapshots) = if let Some(first) = runs.first() {
        let (mut c, mut t) = (VecWelford::default(), VecWelford::default());
        let mut immune = vec![Welford::default(); first.len()];
        for r in runs {
            c.push(&r.rho_c);
            t.push(&r.rho_t);
            for (w, &i) in immune.iter_mut().zip(&r.immune_score) {
                if i.is_finite() {
                    w.push(i);
                }
            }
        }
        let immune_mean = immune
            .iter()
            .map(|w| if w.count() > 0 { w.mean() } else { f64::INFINITY })
            .collect();
        let snapshots: Vec<SnapshotStats> = (0..first.snapshots.len())
            .map(|k| {
                let (mut nc, mut nt) = (VecWelford::default(), VecWelford::default());
                for r in runs {
                    nc.push(&r.snapshots[k].tumour);
                    nt.push(&r.snapshots[k].ctl);
                }
                SnapshotStats {
                    t: first.snapshots[k].t,
                    tumour: nc.moments(),
                    ctl: nt.moments(),
                    pde_tumour: None,
                    pde_ctl: None,
                }
            })
            .collect();
        (first.times.clone(), c.moments(), t.moments(), immune_mean, snapshots)
    } else {
        let p = &pde.as_ref().expect("at least one engine ran").trajectory;
        let snapshots: Vec<SnapshotStats> = p
            .snapshots
            .iter()
            .map(|s| SnapshotStats {
                t: s.t,
                tumour: Moments::exact(&s.tumour),
                ctl: Moments::exact(&s.ctl),
                pde_tumour: None,
                pde_ctl: None,
            })
            .collect();
        (
            p.times.clone(),
            Moments::exact(&p.rho_c),
            Moments::exact(&p.rho_t),
            p.immune_score.clone(),
            snapshots,
        )
    };

    let comparison = match (&pde, runs.is_empty()) {
        (Some(p), false) => {
            let p = &p.trajectory;
            for (s, ps) in snapshots.iter_mut().zip(&p.snapshots) {
                s.pde_tumour = Some(ps.tumour.clone());
                s.pde_ctl = Some(ps.ctl.clone());
            }
            let rel = |a: &[f64], b: &[f64]| -> Vec<f64> {
                a.iter().zip(b).map(|(x, y)| (x - y).abs() / y).collect()
            };
            Some(Comparison {
                snapshot_times: snapshots.iter().map(|s| s.t).collect(),
                d_tumour: snapshots
                    .iter()
                    .map(|s| relative_l1(&s.tumour.mean, s.pde_tumour.as_ref().unwrap()))
                    .collect(),
                d_ctl: snapshots
                    .iter()
                    .map(|s| relative_l1(&s.ctl.mean, s.pde_ctl.as_ref().unwrap()))
                    .collect(),
                total_error_c: rel(&rho_c.mean, &p.rho_c),
                total_error_t: rel(&rho_t.mean, &p.rho_t),
            })
        }
        _ => None,
    };

    Ok(AggregateResult {
        config: cfg.clone(),
        times,
        rho_c,
        rho_t,
        immune_mean,
        snapshots,
        majority: majority_label(&labels),
        replicates,
        pde,
        comparison,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Engine;
    use crate::presets::preset;
    use proptest::prelude::*;

    fn two_pass(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() < 2 {
            0.0
        } else {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        };
        (mean, var)
    }

    proptest! {
        #[test]
        fn welford_matches_two_pass(xs in prop::collection::vec(-1e6f64..1e6, 1..200), shift in 0.0f64..1e5) {
            let xs: Vec<f64> = xs.iter().map(|x| x + shift).collect();
            let mut w = Welford::default();
            for &x in &xs {
                w.push(x);
            }
            let (m, v) = two_pass(&xs);
            prop_assert!((w.mean() - m).abs() <= 1e-12 * m.abs().max(1.0));
            prop_assert!((w.variance() - v).abs() <= 1e-12 * v.abs().max(1e-300) + 1e-12 * m * m * f64::EPSILON);
        }
    }

    #[test]
    fn welford_on_replicate_sized_samples() {
        for xs in [vec![3.0], vec![1e5, 1e5 + 1.0], vec![2.3e4, 2.29e4, 2.31e4, 2.305e4, 2.298e4]] {
            let mut w = Welford::default();
            xs.iter().for_each(|&x| w.push(x));
            let (m, v) = two_pass(&xs);
            assert!((w.mean() - m).abs() <= 1e-12 * m.abs());
            assert!((w.variance() - v).abs() <= 1e-12 * v.max(1e-300));
        }
    }

    #[test]
    fn majority_ties_go_to_first_seen() {
        use ScenarioLabel::*;
        assert_eq!(majority_label(&[Hot, Eradication, Eradication]), Some(Eradication));
        assert_eq!(majority_label(&[Cold, Hot, Hot, Cold]), Some(Cold));
        assert_eq!(majority_label(&[]), None);
    }

    fn short(name: &str) -> ExperimentConfig {
        let mut cfg = preset(name).unwrap();
        cfg.n_sites = 300;
        cfg.params.t_final = 3.0;
        cfg.snapshot_times = vec![1.0, 3.0];
        cfg
    }

    #[test]
    fn deterministic_given_seed_and_independent_of_workers() {
        let mut cfg = short("fig2b");
        cfg.replicates = 3;
        let a = run_experiment(&cfg, Some(1)).unwrap();
        let b = run_experiment(&cfg, Some(3)).unwrap();
        assert_eq!(a, b);
        cfg.seed += 1;
        let c = run_experiment(&cfg, Some(2)).unwrap();
        assert_ne!(a.rho_c, c.rho_c);
    }

    #[test]
    fn replicate_moments_match_individual_runs() {
        let mut cfg = short("fig1b");
        cfg.replicates = 3;
        cfg.engine = Engine::Ibm;
        let agg = run_experiment(&cfg, None).unwrap();
        let grid = cfg.grid().unwrap();
        let runs: Vec<Run> = (0..3)
            .map(|i| run_ibm(&cfg.params, &grid, &cfg.init, cfg.seed + i, &cfg.snapshot_times).unwrap())
            .collect();
        let last = runs[0].len() - 1;
        let (m, v) = two_pass(&runs.iter().map(|r| r.rho_c[last]).collect::<Vec<_>>());
        assert!((agg.rho_c.mean[last] - m).abs() <= 1e-12 * m);
        assert!((agg.rho_c.var[last] - v).abs() <= 1e-12 * v.max(1.0));
        assert!(agg.pde.is_none() && agg.comparison.is_none());
        assert!(agg.rho_c.var.iter().chain(&agg.snapshots[1].tumour.var).all(|&v| v >= 0.0));
    }

    #[test]
    fn pde_only_ignores_seed() {
        let mut cfg = short("fig1c");
        cfg.engine = Engine::Pde;
        let a = run_experiment(&cfg, None).unwrap();
        cfg.seed = 1234;
        let b = run_experiment(&cfg, None).unwrap();
        assert_eq!(a.rho_c, b.rho_c);
        assert!(a.replicates.is_empty());
        assert!(a.rho_c.var.iter().all(|&v| v == 0.0));
        assert!(a.comparison.is_none());
    }

    #[test]
    fn comparison_metrics_need_both_engines() {
        let mut cfg = short("fig2a");
        cfg.replicates = 1;
        let agg = run_experiment(&cfg, None).unwrap();
        let cmp = agg.comparison.as_ref().unwrap();
        assert_eq!(cmp.snapshot_times, vec![1.0, 3.0]);
        assert_eq!(cmp.total_error_c.len(), agg.times.len());
        let s = agg.snapshot_at(3.0).unwrap();
        let expected = relative_l1(&s.tumour.mean, s.pde_tumour.as_ref().unwrap());
        assert_eq!(cmp.d_tumour[1], expected);
    }

    #[test]
    fn failing_replicates_are_reported() {
        let mut cfg = short("fig1b");
        cfg.params.tau = 0.9;
        cfg.params.t_final = 3.6;
        cfg.snapshot_times.clear();
        cfg.engine = Engine::Ibm;
        cfg.replicates = 2;
        match run_experiment(&cfg, None) {
            Err(e @ HarnessError::Replicates { .. }) => assert_eq!(e.exit_code(), 3),
            other => panic!("expected replicate failure, got {other:?}"),
        }
    }
}
