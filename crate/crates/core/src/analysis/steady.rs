use crate::error::{ModelError, Result};
use crate::params::ModelParams;
use crate::scalar::Scalar;

/// Homogeneous steady states with a strictly positive CTL total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStates<T> {
    /// Tumour eradicated, CTLs at `|I| α_T / μ_T`.
    pub semitrivial: (T, T),
    /// Coexistence totals `(ρ_C2*, ρ_T2*)`; `None` above the affinity threshold.
    pub nontrivial: Option<(T, T)>,
    /// `γ* = (μ_T/α_T)(α_C/ζ_C)`.
    pub gamma_threshold: T,
}

/// Solves `(α_C|I| - μ_C ρ_C - γ_C ρ_T) ρ_C = 0`, `(α_T|I| - μ_T ρ_T + γ_T ρ_C) ρ_T = 0`.
///
/// At `γ = γ*` the coexistence branch is still reported; it coincides with
/// the semitrivial state there.
pub fn steady_states<T: Scalar>(params: &ModelParams<T>, width: T) -> Result<SteadyStates<T>> {
    if !(params.alpha_t > T::zero()) || !(params.mu_t > T::zero()) {
        return Err(ModelError::Domain(
            "alpha_T and mu_T must be positive for the steady states to exist".into(),
        ));
    }
    if !(params.zeta_c > T::zero()) {
        return Err(ModelError::Domain(
            "zeta_C must be positive for the affinity threshold".into(),
        ));
    }
    let gamma_threshold = params.gamma_threshold();
    let semitrivial = (T::zero(), width * params.alpha_t / params.mu_t);
    let nontrivial = (params.gamma <= gamma_threshold).then(|| {
        let (gc, gt) = (params.gamma_c(), params.gamma_t());
        let denom = gt * gc + params.mu_c * params.mu_t;
        let rho_c = width * (params.alpha_c * params.mu_t - params.alpha_t * gc) / denom;
        let rho_t = width * (params.alpha_t * params.mu_c + params.alpha_c * gt) / denom;
        (rho_c.max(T::zero()), rho_t)
    });
    Ok(SteadyStates {
        semitrivial,
        nontrivial,
        gamma_threshold,
    })
}
