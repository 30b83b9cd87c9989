//! Closed-form and linearised analysis of the homogeneous continuum model,
//! plus the trajectory-level summaries used to compare runs.

mod classify;
mod dispersion;
mod peaks;
mod stability;
mod steady;

pub use classify::{classify, ClassifyThresholds, ScenarioClassification, ScenarioLabel};
pub use dispersion::{
    dispersion, pattern_bound, sinc, DispersionCurve, DispersionMode, PatternBound, PatternVerdict,
    negative_sine_mode, DEFAULT_M_MAX, DEFAULT_PATTERN_M_MAX,
};
pub use peaks::{count_peaks, smooth, PeakConfig};
pub use stability::{homogeneous_stability, solve_quadratic, Branch, EigenReport};
pub use steady::{steady_states, SteadyStates};
