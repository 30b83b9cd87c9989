use crate::error::{ModelError, Result};
use crate::grid::PhenotypeGrid;
use crate::scalar::Scalar;

/// Rate and kernel parameters shared by the stochastic and continuum engines.
///
/// Rates are per day; the competition and recognition coefficients carry
/// units of µl/day because the kernel fields are cell counts per unit of
/// phenotype.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T> {
    /// Tumour cell proliferation rate.
    pub alpha_c: T,
    /// Antigen-independent CTL proliferation rate.
    pub alpha_t: T,
    /// Tumour death rate from clonal competition.
    pub mu_c: T,
    /// CTL death rate from self-regulation.
    pub mu_t: T,
    /// Killing rate of tumour cells by CTLs.
    pub zeta_c: T,
    /// CTL replication rate following recognition.
    pub zeta_t: T,
    /// TCR/tumour-antigen binding affinity.
    pub gamma: T,
    /// TCR affinity range (recognition kernel radius).
    pub eta: T,
    /// Clonal competition radius among tumour cells.
    pub theta_c: T,
    /// Self-regulation radius among CTLs.
    pub theta_t: T,
    /// Per-step probability that a tumour cell changes phenotype.
    pub lambda_c: T,
    /// Time step (days).
    pub tau: T,
    /// Simulation horizon (days).
    pub t_final: T,
}

impl<T: Scalar> ModelParams<T> {
    /// Default proliferation, competition and killing rates, `λ_C = 0.01`,
    /// `τ = 0.05`, `t_f = 30`. Binding affinity and the three radii have no
    /// single default value and must be supplied.
    pub fn with_default_rates(gamma: T, eta: T, theta_c: T, theta_t: T) -> Self {
        Self {
            alpha_c: T::lit(1.5),
            alpha_t: T::lit(5e-2),
            mu_c: T::lit(1.5e-6),
            mu_t: T::lit(5e-6),
            zeta_c: T::lit(5e-6),
            zeta_t: T::lit(3e-5),
            gamma,
            eta,
            theta_c,
            theta_t,
            lambda_c: T::lit(0.01),
            tau: T::lit(0.05),
            t_final: T::lit(30.0),
        }
    }

    /// Effective killing coefficient `ζ_C γ`.
    pub fn gamma_c(&self) -> T {
        self.zeta_c * self.gamma
    }

    /// Effective clonal-expansion coefficient `ζ_T γ`.
    pub fn gamma_t(&self) -> T {
        self.zeta_t * self.gamma
    }

    /// Phenotypic diffusion coefficient `λ_C χ² / (2τ)` matching the random walk.
    pub fn beta_c(&self, step: T) -> T {
        self.lambda_c * step * step / (T::lit(2.0) * self.tau)
    }

    /// Number of whole time steps in `[0, t_final]`.
    pub fn n_steps(&self) -> usize {
        (self.t_final / self.tau).round().to_usize().unwrap_or(0)
    }

    /// Affinity threshold `(μ_T/α_T)(α_C/ζ_C)` above which coexistence is impossible.
    pub fn gamma_threshold(&self) -> T {
        (self.mu_t / self.alpha_t) * (self.alpha_c / self.zeta_c)
    }

    pub fn validate(&self, grid: &PhenotypeGrid<T>) -> Result<()> {
        let rates = [
            ("alpha_C", self.alpha_c),
            ("alpha_T", self.alpha_t),
            ("mu_C", self.mu_c),
            ("mu_T", self.mu_t),
            ("zeta_C", self.zeta_c),
            ("zeta_T", self.zeta_t),
            ("gamma", self.gamma),
        ];
        for (name, v) in rates {
            if !v.is_finite() || v < T::zero() {
                return Err(ModelError::Config(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        let width = grid.width();
        for (name, v) in [
            ("eta", self.eta),
            ("theta_C", self.theta_c),
            ("theta_T", self.theta_t),
        ] {
            if !(v > T::zero() && v <= width) {
                return Err(ModelError::Config(format!(
                    "{name} must lie in (0, {width}], got {v}"
                )));
            }
        }
        if !(self.lambda_c >= T::zero() && self.lambda_c < T::one()) {
            return Err(ModelError::Config(format!(
                "lambda_C must lie in [0, 1), got {}",
                self.lambda_c
            )));
        }
        if !(self.tau > T::zero()) || !self.tau.is_finite() {
            return Err(ModelError::Config(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if !(self.t_final > T::zero()) || !self.t_final.is_finite() {
            return Err(ModelError::Config(format!(
                "t_final must be positive, got {}",
                self.t_final
            )));
        }
        Ok(())
    }
}

/// Initial phenotype profile `10⁴(1 + a cos(A u))` for tumour cells and
/// `10⁴(2 + a cos(A v))` for CTLs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCondition<T> {
    pub amplitude: T,
    pub wavenumber: T,
}

impl<T: Scalar> InitialCondition<T> {
    pub fn homogeneous() -> Self {
        Self {
            amplitude: T::zero(),
            wavenumber: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= T::zero()) || !self.amplitude.is_finite() {
            return Err(ModelError::Config(format!(
                "initial amplitude must be non-negative, got {}",
                self.amplitude
            )));
        }
        if self.amplitude > T::one() {
            return Err(ModelError::Config(format!(
                "initial amplitude {} > 1 makes the tumour density negative",
                self.amplitude
            )));
        }
        if !(self.wavenumber > T::zero()) || !self.wavenumber.is_finite() {
            return Err(ModelError::Config(format!(
                "initial wavenumber must be positive, got {}",
                self.wavenumber
            )));
        }
        Ok(())
    }

    pub fn tumour_density(&self, u: T) -> T {
        let d = T::lit(1e4) * (T::one() + self.amplitude * (self.wavenumber * u).cos());
        d.max(T::zero())
    }

    pub fn ctl_density(&self, v: T) -> T {
        T::lit(1e4) * (T::lit(2.0) + self.amplitude * (self.wavenumber * v).cos())
    }
}
