use std::fmt;

use crate::error::Result;
use crate::scalar::Scalar;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioLabel {
    Eradication,
    Cold,
    Altered,
    Hot,
}

impl fmt::Display for ScenarioLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioLabel::Eradication => "eradication",
            ScenarioLabel::Cold => "cold",
            ScenarioLabel::Altered => "altered",
            ScenarioLabel::Hot => "hot",
        })
    }
}

/// Immune-score cut-offs. `Ī ≥ hot` is hot, `Ī < cold` is cold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyThresholds<T> {
    pub hot: T,
    pub cold: T,
    /// Final tumour total below which the tumour counts as eradicated.
    pub eradication_total: T,
}

impl<T: Scalar> Default for ClassifyThresholds<T> {
    fn default() -> Self {
        Self {
            hot: T::lit(10.0),
            cold: T::one(),
            eradication_total: T::one(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioClassification<T> {
    pub i_bar: T,
    pub label: ScenarioLabel,
}

pub fn classify<T: Scalar>(
    traj: &Trajectory<T>,
    thresholds: &ClassifyThresholds<T>,
) -> Result<ScenarioClassification<T>> {
    let i_bar = traj.mean_immune_score()?;
    let label = if traj.tumour_extinct() || traj.final_rho_c() < thresholds.eradication_total {
        ScenarioLabel::Eradication
    } else if i_bar >= thresholds.hot {
        ScenarioLabel::Hot
    } else if i_bar < thresholds.cold {
        ScenarioLabel::Cold
    } else {
        ScenarioLabel::Altered
    };
    Ok(ScenarioClassification { i_bar, label })
}
