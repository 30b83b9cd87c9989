//! Configuration, figure presets, replicate orchestration and CSV export
//! for the coevolution model in `coevo-core`.
//!
//! The `coevo` binary wraps these:
//!
//! ```text
//! coevo simulate --preset fig1b --engine both --replicates 5 --out out/fig1b
//! coevo analyze --preset fig2b --out out/fig2b
//! coevo sweep --preset fig1b --param gamma --from 0.1 --to 3.5 --steps 35
//! ```

pub mod config;
pub mod error;
pub mod experiment;
pub mod export;
pub mod presets;
pub mod report;
pub mod sweep;

pub use config::{load_config, Engine, ExperimentConfig};
pub use error::{HarnessError, Result, EXIT_CONFIG, EXIT_NUMERIC};
pub use experiment::{aggregate, run_experiment, AggregateResult};
pub use export::{export, export_analysis};
pub use presets::{preset, PRESETS};
pub use report::{analyze, AnalysisReport};
pub use sweep::{run_sweep, sweep_values, write_sweep, SweepMode};
