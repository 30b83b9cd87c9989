//! One-dimensional parameter sweeps.

use std::path::Path;

use coevo_core::analysis::PatternVerdict;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::experiment::{run_experiment, AggregateResult};
use crate::report::{analyze, AnalysisReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Analyze,
    Simulate,
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub config: ExperimentConfig,
    pub report: AnalysisReport,
    pub result: Option<AggregateResult>,
}

/// `steps` evenly spaced values from `from` to `to`, both included.
pub fn sweep_values(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !from.is_finite() || !to.is_finite() {
        return Err(HarnessError::Config(
            "sweep needs finite bounds and at least one step".into(),
        ));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let h = (to - from) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| if i + 1 == steps { to } else { from + h * i as f64 })
        .collect())
}

/// Applies `param = value` to a copy of `base` for each value and analyses
/// (and optionally simulates) the result. Fails on the first invalid point.
pub fn run_sweep(
    base: &ExperimentConfig,
    param: &str,
    values: &[f64],
    mode: SweepMode,
    workers: Option<usize>,
) -> Result<Vec<SweepPoint>> {
    if base.get(param).is_none() {
        return Err(HarnessError::Config(format!(
            "cannot sweep {param:?}: not a numeric model parameter"
        )));
    }
    values
        .iter()
        .map(|&value| {
            let mut cfg = base.clone();
            cfg.set(param, &format!("{value:?}"))
                .map_err(HarnessError::Config)?;
            cfg.validate()?;
            let report = analyze(&cfg)?;
            let result = match mode {
                SweepMode::Analyze => None,
                SweepMode::Simulate => Some(run_experiment(&cfg, workers)?),
            };
            Ok(SweepPoint {
                value,
                config: cfg,
                report,
                result,
            })
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

/// Writes `sweep.csv` with one row per point.
pub fn write_sweep(param: &str, points: &[SweepPoint], dir: &Path) -> Result<std::path::PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let path = dir.join("sweep.csv");
    let csv_err = |source| HarnessError::Csv {
        path: path.clone(),
        source,
    };
    let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
    w.write_record([
        param,
        "gamma_threshold",
        "nontrivial_rho_C",
        "nontrivial_rho_T",
        "semitrivial_stable",
        "nontrivial_stable",
        "dispersion_max_re_lambda",
        "pattern_bound",
        "pattern_verdict",
        "pde_final_rho_C",
        "pde_final_rho_T",
        "pde_label",
        "ibm_final_rho_C_mean",
        "ibm_final_rho_T_mean",
        "ibm_majority_label",
    ])
    .map_err(csv_err)?;
    for p in points {
        let r = &p.report;
        let pde = p.result.as_ref().and_then(|a| a.pde.as_ref());
        let ibm = p.result.as_ref().filter(|a| !a.replicates.is_empty());
        let last = |m: &crate::experiment::Moments| m.mean.last().copied();
        w.write_record([
            format!("{:?}", p.value),
            format!("{:?}", r.steady.gamma_threshold),
            opt(r.steady.nontrivial.map(|s| s.0)),
            opt(r.steady.nontrivial.map(|s| s.1)),
            r.semitrivial.stable.to_string(),
            r.nontrivial.as_ref().map(|e| e.stable.to_string()).unwrap_or_default(),
            opt(r
                .dispersion
                .as_ref()
                .and_then(|d| d.max_re_lambda())
                .map(|m| m.re_lambda_max)),
            opt(r.pattern.as_ref().and_then(|b| b.bound)),
            r.pattern
                .as_ref()
                .map(|b| match b.verdict {
                    PatternVerdict::Sufficient => "sufficient",
                    PatternVerdict::NotSufficient => "not_sufficient",
                    PatternVerdict::NoVerdict => "no_verdict",
                })
                .unwrap_or_default()
                .to_string(),
            opt(pde.map(|s| s.trajectory.final_rho_c())),
            opt(pde.map(|s| s.trajectory.final_rho_t())),
            pde.map(|s| s.classification.label.to_string()).unwrap_or_default(),
            opt(ibm.and_then(|a| last(&a.rho_c))),
            opt(ibm.and_then(|a| last(&a.rho_t))),
            ibm.and_then(|a| a.majority)
                .map(|l| l.to_string())
                .unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| HarnessError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::preset;

    #[test]
    fn values_include_endpoints() {
        assert_eq!(sweep_values(0.5, 1.5, 3).unwrap(), vec![0.5, 1.0, 1.5]);
        assert_eq!(sweep_values(2.0, 9.0, 1).unwrap(), vec![2.0]);
        assert!(sweep_values(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn gamma_sweep_crosses_threshold() {
        let base = preset("fig1a").unwrap();
        let pts = run_sweep(&base, "gamma", &[0.5, 3.5], SweepMode::Analyze, None).unwrap();
        assert!(pts[0].report.steady.nontrivial.is_some());
        assert!(pts[1].report.steady.nontrivial.is_none());
        assert_eq!(pts[0].config.params.gamma, 0.5);
    }

    #[test]
    fn rejects_unknown_parameter() {
        let base = preset("fig1b").unwrap();
        let err = run_sweep(&base, "n_sites", &[10.0], SweepMode::Analyze, None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn invalid_point_is_a_config_error() {
        let base = preset("fig1b").unwrap();
        let err = run_sweep(&base, "lambda_C", &[1.5], SweepMode::Analyze, None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
