//! Closed-form analysis of a configuration, without running either engine.

use coevo_core::analysis::{
    dispersion, homogeneous_stability, pattern_bound, steady_states, Branch, PatternBound,
};
use coevo_core::pde::cfl_number;
use coevo_core::{Dispersion, Eigen, Steady};

use crate::config::ExperimentConfig;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub steady: Steady,
    pub beta_c: f64,
    pub cfl: f64,
    pub semitrivial: Eigen,
    /// Only strictly below the affinity threshold.
    pub nontrivial: Option<Eigen>,
    pub dispersion: Option<Dispersion>,
    /// Only for equal competition radii `θ_C = θ_T < L` with a coexistence
    /// state.
    pub pattern: Option<PatternBound<f64>>,
}

pub fn analyze(cfg: &ExperimentConfig) -> Result<AnalysisReport> {
    let grid = cfg.grid()?;
    let p = &cfg.params;
    let width = grid.width();
    let steady = steady_states(p, width)?;
    let beta_c = p.beta_c(grid.step());
    let coexists = p.gamma < steady.gamma_threshold;
    let nontrivial = if coexists {
        Some(homogeneous_stability(p, Branch::Nontrivial)?)
    } else {
        None
    };
    let dispersion = if coexists {
        Some(dispersion(p, cfg.half_width, beta_c, cfg.dispersion_m_max)?)
    } else {
        None
    };
    let pattern = if coexists && p.theta_c == p.theta_t && p.theta_c < cfg.half_width {
        Some(pattern_bound(p, p.theta_c, cfg.half_width, beta_c, cfg.pattern_m_max)?)
    } else {
        None
    };
    Ok(AnalysisReport {
        steady,
        beta_c,
        cfl: cfl_number(beta_c, p.tau, grid.step()),
        semitrivial: homogeneous_stability(p, Branch::Semitrivial)?,
        nontrivial,
        dispersion,
        pattern,
    })
}
