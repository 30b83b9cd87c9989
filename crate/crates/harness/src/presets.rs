//! Parameterisations of the figure scenarios, by name.

use coevo_core::Initial;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

pub const PRESETS: &[&str] = &[
    "fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c", "fig4", "fig5a", "fig5b",
    "fig5c", "fig6", "figS1a", "figS1b", "figS1c", "figS1d",
];

const PATTERNED: Initial = Initial {
    amplitude: 1.0,
    wavenumber: 5.0,
};

/// fig1 and figS1: binding affinity sweep with wide kernels. Panel a also lowers the
/// antigen-independent CTL growth rate.
fn fig1(panel: char, init: Initial) -> ExperimentConfig {
    let gamma = match panel {
        'a' => 3.5,
        'b' => 2.0,
        'c' => 0.3,
        _ => 0.12,
    };
    let mut cfg = ExperimentConfig::new(gamma, 1.8, 1.8, 1.8);
    if panel == 'a' {
        cfg.params.alpha_t = 0.5;
    }
    cfg.init = init;
    cfg.replicates = 2;
    cfg
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let mut cfg = match name {
        "fig1a" | "fig1b" | "fig1c" | "fig1d" => {
            fig1(name.chars().last().unwrap(), Initial::homogeneous())
        }
        "figS1a" | "figS1b" | "figS1c" | "figS1d" => fig1(name.chars().last().unwrap(), PATTERNED),
        "fig2a" | "fig2b" | "fig2c" | "fig4" => {
            let theta = match name {
                "fig2a" => 0.5,
                "fig2c" => 0.2,
                _ => 0.3,
            };
            let mut cfg = ExperimentConfig::new(1.5, 0.7, theta, theta);
            cfg.init = PATTERNED;
            cfg.replicates = 2;
            cfg
        }
        "fig5a" | "fig5b" | "fig5c" => {
            let eta = match name {
                "fig5a" => 1.0,
                "fig5b" => 0.6,
                _ => 0.2,
            };
            let mut cfg = ExperimentConfig::new(1.0, eta, 0.7, 0.7);
            cfg.init = PATTERNED;
            cfg.replicates = 5;
            cfg
        }
        "fig6" => {
            let mut cfg = ExperimentConfig::new(1.1, 0.1, 1.8, 1.8);
            cfg.params.alpha_t = 0.5;
            cfg.params.mu_t = 2e-6;
            cfg.params.t_final = 100.0;
            cfg.snapshot_times = vec![0.4, 4.0, 10.0, 16.0, 30.0, 100.0];
            cfg.init = PATTERNED;
            cfg.replicates = 5;
            cfg
        }
        _ => {
            return Err(HarnessError::Config(format!(
                "unknown preset {name:?}; expected one of {}",
                PRESETS.join(", ")
            )))
        }
    };
    cfg.name = name.to_string();
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use coevo_core::Params;

    #[test]
    fn scenario_values() {
        let a = preset("fig1a").unwrap();
        let mut expected = Params::with_default_rates(3.5, 1.8, 1.8, 1.8);
        expected.alpha_t = 0.5;
        assert_eq!(a.params, expected);
        assert_eq!(a.init.amplitude, 0.0);

        let c = preset("fig2c").unwrap();
        assert_eq!(c.params, Params::with_default_rates(1.5, 0.7, 0.2, 0.2));
        assert_eq!(c.init, PATTERNED);

        let f = preset("fig6").unwrap();
        assert_eq!(f.params.alpha_t, 0.5);
        assert_eq!(f.params.mu_t, 2e-6);
        assert_eq!(f.params.gamma, 1.1);
        assert_eq!(f.params.eta, 0.1);
        assert_eq!((f.params.theta_c, f.params.theta_t), (1.8, 1.8));
        assert_eq!(f.params.t_final, 100.0);
        assert_eq!(f.init, PATTERNED);
        assert_eq!(f.replicates, 5);

        assert_eq!(preset("fig5b").unwrap().params.eta, 0.6);
        assert_eq!(preset("figS1c").unwrap().params.gamma, 0.3);
        assert_eq!(preset("fig4").unwrap().params.theta_c, 0.3);
        assert_eq!(preset("fig1b").unwrap().replicates, 2);
    }

    #[test]
    fn unknown_name() {
        assert_eq!(preset("fig7").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn every_preset_round_trips() {
        for name in PRESETS {
            let cfg = preset(name).unwrap();
            let back = ExperimentConfig::parse(&cfg.to_config_string(), name).unwrap();
            assert_eq!(back, cfg, "{name}");
        }
    }
}
