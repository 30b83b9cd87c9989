//! CSV output. Every file is rewritten in full on each export.
//!
//! * `totals.csv`: `time,rho_C_mean,rho_C_var,rho_T_mean,rho_T_var,I_mean`,
//!   plus `rho_C_pde,rho_T_pde,I_pde` when both engines ran;
//! * `snapshot_<t>.csv`: `site_index,u,nC_mean,nC_var,nT_mean,nT_var`,
//!   plus `nC_pde,nT_pde` when both engines ran;
//! * `comparison.csv`: `time,d_C,d_T` at the snapshot times (both engines);
//! * `dispersion.csv`: `m,k,B,C,re_lambda_max`;
//! * `analysis.csv`: `name,value` scalars;
//! * `config.resolved`: the effective configuration.

use std::fs;
use std::path::{Path, PathBuf};

use coevo_core::analysis::{count_peaks, PatternVerdict};
use csv::Writer;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::experiment::AggregateResult;
use crate::report::AnalysisReport;

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn verdict_name(v: PatternVerdict) -> &'static str {
    match v {
        PatternVerdict::Sufficient => "sufficient",
        PatternVerdict::NotSufficient => "not_sufficient",
        PatternVerdict::NoVerdict => "no_verdict",
    }
}

struct CsvFile {
    path: PathBuf,
    writer: Writer<fs::File>,
}

impl CsvFile {
    fn create(path: PathBuf) -> Result<Self> {
        let writer = Writer::from_path(&path).map_err(|source| HarnessError::Csv {
            path: path.clone(),
            source,
        })?;
        Ok(Self { path, writer })
    }

    fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer
            .write_record(fields)
            .map_err(|source| HarnessError::Csv {
                path: self.path.clone(),
                source,
            })
    }

    fn finish(mut self) -> Result<PathBuf> {
        self.writer
            .flush()
            .map_err(|e| HarnessError::io(&self.path, e))?;
        Ok(self.path)
    }
}

fn prepare(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

fn write_config(cfg: &ExperimentConfig, dir: &Path) -> Result<PathBuf> {
    let path = dir.join("config.resolved");
    fs::write(&path, cfg.to_config_string()).map_err(|e| HarnessError::io(&path, e))?;
    Ok(path)
}

fn write_dispersion(report: &AnalysisReport, dir: &Path) -> Result<PathBuf> {
    let mut f = CsvFile::create(dir.join("dispersion.csv"))?;
    f.row(["m", "k", "B", "C", "re_lambda_max"])?;
    if let Some(d) = &report.dispersion {
        for m in &d.modes {
            f.row([m.m.to_string(), num(m.k), num(m.b), num(m.c), num(m.re_lambda_max)])?;
        }
    }
    f.finish()
}

fn analysis_rows(report: &AnalysisReport) -> Vec<(String, String)> {
    let mut rows: Vec<(String, String)> = Vec::new();
    let mut put = |k: &str, v: String| rows.push((k.to_string(), v));
    let s = &report.steady;
    put("gamma_threshold", num(s.gamma_threshold));
    put("semitrivial_rho_C", num(s.semitrivial.0));
    put("semitrivial_rho_T", num(s.semitrivial.1));
    let (nc, nt) = s.nontrivial.map_or((String::new(), String::new()), |(c, t)| (num(c), num(t)));
    put("nontrivial_rho_C", nc);
    put("nontrivial_rho_T", nt);
    put("beta_C", num(report.beta_c));
    put("cfl", num(report.cfl));
    for (name, e) in [("semitrivial", Some(&report.semitrivial)), ("nontrivial", report.nontrivial.as_ref())] {
        let field = |f: &dyn Fn(&coevo_core::Eigen) -> String| e.map(f).unwrap_or_default();
        put(&format!("{name}_B"), field(&|e| num(e.b)));
        put(&format!("{name}_C"), field(&|e| num(e.c)));
        put(&format!("{name}_re_lambda_max"), field(&|e| num(e.max_re())));
        put(&format!("{name}_stable"), field(&|e| e.stable.to_string()));
    }
    if let Some(d) = &report.dispersion {
        if let Some(m) = d.max_re_lambda() {
            put("dispersion_max_re_lambda", num(m.re_lambda_max));
            put("dispersion_max_mode", m.m.to_string());
        }
        put("dispersion_within_validity", d.within_validity.to_string());
    }
    if let Some(p) = &report.pattern {
        put("pattern_bound", p.bound.map(num).unwrap_or_default());
        put(
            "pattern_minimizing_mode",
            p.minimizing_mode.map(|m| m.to_string()).unwrap_or_default(),
        );
        put("pattern_verdict", verdict_name(p.verdict).to_string());
        put(
            "pattern_modes",
            p.modes.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" "),
        );
    }
    rows
}

fn simulation_rows(res: &AggregateResult) -> Vec<(String, String)> {
    let mut rows: Vec<(String, String)> = Vec::new();
    let mut put = |k: &str, v: String| rows.push((k.to_string(), v));
    let peaks = &res.config.peaks;
    let last = res.snapshots.last();
    if let Some(s) = last {
        put("peaks_time", num(s.t));
    }
    if let Some(p) = &res.pde {
        put("pde_final_rho_C", num(p.trajectory.final_rho_c()));
        put("pde_final_rho_T", num(p.trajectory.final_rho_t()));
        put("pde_I_bar", num(p.classification.i_bar));
        put("pde_label", p.classification.label.to_string());
        if let Some(s) = p.trajectory.snapshots.last() {
            put("pde_peaks_nC", count_peaks(&s.tumour, peaks).to_string());
            put("pde_peaks_nT", count_peaks(&s.ctl, peaks).to_string());
        }
    }
    if !res.replicates.is_empty() {
        let n = res.replicates.len() as f64;
        let mean = |f: &dyn Fn(&crate::experiment::ReplicateSummary) -> f64| {
            res.replicates.iter().map(f).sum::<f64>() / n
        };
        put("ibm_replicates", res.replicates.len().to_string());
        put("ibm_tumour_extinct", res.extinct_replicates().to_string());
        put("ibm_final_rho_C_mean", num(mean(&|r| r.final_rho_c)));
        put("ibm_final_rho_T_mean", num(mean(&|r| r.final_rho_t)));
        put("ibm_I_bar_mean", num(mean(&|r| r.classification.i_bar)));
        put(
            "ibm_majority_label",
            res.majority.map(|l| l.to_string()).unwrap_or_default(),
        );
        if let Some(s) = last {
            put("ibm_peaks_nC", count_peaks(&s.tumour.mean, peaks).to_string());
            put("ibm_peaks_nT", count_peaks(&s.ctl.mean, peaks).to_string());
        }
    }
    if let Some(c) = &res.comparison {
        if let (Some(dc), Some(dt)) = (c.d_tumour.last(), c.d_ctl.last()) {
            put("d_C_last_snapshot", num(*dc));
            put("d_T_last_snapshot", num(*dt));
        }
        put("total_error_C_final", num(*c.total_error_c.last().unwrap()));
        put("total_error_T_final", num(*c.total_error_t.last().unwrap()));
    }
    rows
}

fn write_analysis(report: &AnalysisReport, res: Option<&AggregateResult>, dir: &Path) -> Result<PathBuf> {
    let mut f = CsvFile::create(dir.join("analysis.csv"))?;
    f.row(["name", "value"])?;
    let mut rows = analysis_rows(report);
    if let Some(r) = res {
        rows.extend(simulation_rows(r));
    }
    for (k, v) in rows {
        f.row([k, v])?;
    }
    f.finish()
}

fn write_totals(res: &AggregateResult, dir: &Path) -> Result<PathBuf> {
    let mut f = CsvFile::create(dir.join("totals.csv"))?;
    let both = res.comparison.is_some();
    let mut header = vec!["time", "rho_C_mean", "rho_C_var", "rho_T_mean", "rho_T_var", "I_mean"];
    if both {
        header.extend(["rho_C_pde", "rho_T_pde", "I_pde"]);
    }
    f.row(&header)?;
    for h in 0..res.times.len() {
        let mut row = vec![
            num(res.times[h]),
            num(res.rho_c.mean[h]),
            num(res.rho_c.var[h]),
            num(res.rho_t.mean[h]),
            num(res.rho_t.var[h]),
            num(res.immune_mean[h]),
        ];
        if both {
            let p = &res.pde.as_ref().unwrap().trajectory;
            row.extend([num(p.rho_c[h]), num(p.rho_t[h]), num(p.immune_score[h])]);
        }
        f.row(&row)?;
    }
    f.finish()
}

fn write_snapshots(res: &AggregateResult, dir: &Path) -> Result<Vec<PathBuf>> {
    let grid = res.config.grid()?;
    let sites = grid.sites();
    let mut out = Vec::new();
    for s in &res.snapshots {
        let mut f = CsvFile::create(dir.join(format!("snapshot_{}.csv", s.t)))?;
        let both = s.pde_tumour.is_some();
        let mut header = vec!["site_index", "u", "nC_mean", "nC_var", "nT_mean", "nT_var"];
        if both {
            header.extend(["nC_pde", "nT_pde"]);
        }
        f.row(&header)?;
        for (i, &u) in sites.iter().enumerate() {
            let mut row = vec![
                i.to_string(),
                num(u),
                num(s.tumour.mean[i]),
                num(s.tumour.var[i]),
                num(s.ctl.mean[i]),
                num(s.ctl.var[i]),
            ];
            if both {
                row.push(num(s.pde_tumour.as_ref().unwrap()[i]));
                row.push(num(s.pde_ctl.as_ref().unwrap()[i]));
            }
            f.row(&row)?;
        }
        out.push(f.finish()?);
    }
    Ok(out)
}

fn write_comparison(res: &AggregateResult, dir: &Path) -> Result<Option<PathBuf>> {
    let Some(c) = &res.comparison else {
        return Ok(None);
    };
    let mut f = CsvFile::create(dir.join("comparison.csv"))?;
    f.row(["time", "d_C", "d_T"])?;
    for ((t, dc), dt) in c.snapshot_times.iter().zip(&c.d_tumour).zip(&c.d_ctl) {
        f.row([num(*t), num(*dc), num(*dt)])?;
    }
    f.finish().map(Some)
}

/// Writes the analysis files for `cfg` into `dir`.
pub fn export_analysis(cfg: &ExperimentConfig, report: &AnalysisReport, dir: &Path) -> Result<Vec<PathBuf>> {
    prepare(dir)?;
    Ok(vec![
        write_analysis(report, None, dir)?,
        write_dispersion(report, dir)?,
        write_config(cfg, dir)?,
    ])
}

/// Writes simulation output together with the analysis of its configuration.
pub fn export(res: &AggregateResult, report: &AnalysisReport, dir: &Path) -> Result<Vec<PathBuf>> {
    prepare(dir)?;
    let mut files = vec![write_totals(res, dir)?];
    files.extend(write_snapshots(res, dir)?);
    files.extend(write_comparison(res, dir)?);
    files.push(write_dispersion(report, dir)?);
    files.push(write_analysis(report, Some(res), dir)?);
    files.push(write_config(&res.config, dir)?);
    Ok(files)
}
