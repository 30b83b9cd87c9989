use crate::analysis::stability::EigenReport;
use crate::analysis::steady::steady_states;
use crate::error::{ModelError, Result};
use crate::params::ModelParams;
use crate::scalar::Scalar;

/// Number of cosine modes scanned unless told otherwise.
pub const DEFAULT_M_MAX: usize = 100;

/// Default mode cutoff for [`pattern_bound`]. The bound shrinks like
/// `m_max⁻³`, so it is only meaningful together with its cutoff.
pub const DEFAULT_PATTERN_M_MAX: usize = 50;

/// `sin(x)/x`, with a Taylor branch near zero.
pub fn sinc<T: Scalar>(x: T) -> T {
    if x.abs() < T::lit(1e-6) {
        T::one() - x * x / T::lit(6.0)
    } else {
        x.sin() / x
    }
}

/// Growth of the cosine perturbation `cos(k u)`, `k = mπ/|I|`, about the
/// coexistence state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionMode<T> {
    pub m: usize,
    pub k: T,
    pub b: T,
    pub c: T,
    pub re_lambda_max: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionCurve<T> {
    pub modes: Vec<DispersionMode<T>>,
    /// `max{η, θ_C, θ_T}`; the linearisation holds on `[-L + σ, L - σ]`.
    pub sigma: T,
    /// All radii lie in `(0, L)`.
    pub within_validity: bool,
}

impl<T: Scalar> DispersionCurve<T> {
    pub fn max_re_lambda(&self) -> Option<&DispersionMode<T>> {
        self.modes
            .iter()
            .max_by(|a, b| a.re_lambda_max.partial_cmp(&b.re_lambda_max).unwrap())
    }
}

fn wavenumber<T: Scalar>(m: usize, width: T) -> T {
    T::from_usize(m).unwrap() * T::PI() / width
}

/// Whether `sin(kθ) < 0` for `k = mπ/|I|`, decided on `kθ/π = mθ/|I|`
/// modulo 2 so exact multiples of π are not admitted by round-off.
pub fn negative_sine_mode<T: Scalar>(m: usize, theta: T, width: T) -> bool {
    let eps = T::lit(1e-9);
    let two = T::lit(2.0);
    let x = (T::from_usize(m).unwrap() * theta / width) % two;
    x > T::one() + eps && x < two - eps
}

/// `B(k)` and `C(k)` of `λ² - B(k)λ + C(k) = 0` for one wavenumber.
/// `k = 0` with `β_C = 0` gives the homogeneous coexistence coefficients.
pub(crate) fn mode_coefficients<T: Scalar>(
    params: &ModelParams<T>,
    width: T,
    beta_c: T,
    rho: (T, T),
    k: T,
) -> (T, T) {
    let sc = sinc(k * params.theta_c);
    let st = sinc(k * params.theta_t);
    let se = sinc(k * params.eta);
    let tumour = rho.0 / width;
    let ctl = rho.1 / width;
    let diff = k * k * beta_c;
    let b = -diff - params.mu_c * sc * tumour - params.mu_t * st * ctl;
    let c = diff * params.mu_t * st * ctl
        + tumour
            * ctl
            * (params.gamma_c() * params.gamma_t() * se * se + params.mu_c * params.mu_t * sc * st);
    (b, c)
}

fn coexistence<T: Scalar>(params: &ModelParams<T>, width: T) -> Result<(T, T)> {
    let s = steady_states(params, width)?;
    match s.nontrivial {
        Some(rho) if params.gamma < s.gamma_threshold => Ok(rho),
        _ => Err(ModelError::Domain(format!(
            "no coexistence state: gamma {} >= threshold {}",
            params.gamma, s.gamma_threshold
        ))),
    }
}

/// Dispersion relation for modes `m = 1..=m_max` on `[-L, L]`.
///
/// Radii outside `(0, L)` do not stop the computation; the curve is marked
/// as outside the validity range instead.
pub fn dispersion<T: Scalar>(
    params: &ModelParams<T>,
    half_width: T,
    beta_c: T,
    m_max: usize,
) -> Result<DispersionCurve<T>> {
    if m_max < 1 {
        return Err(ModelError::Domain("m_max must be at least 1".into()));
    }
    let width = T::lit(2.0) * half_width;
    let rho = coexistence(params, width)?;
    let radii = [params.eta, params.theta_c, params.theta_t];
    let sigma = radii.iter().copied().fold(T::zero(), T::max);
    let within_validity = radii.iter().all(|&r| r > T::zero() && r < half_width);
    let modes = (1..=m_max)
        .map(|m| {
            let k = wavenumber(m, width);
            let (b, c) = mode_coefficients(params, width, beta_c, rho, k);
            DispersionMode {
                m,
                k,
                b,
                c,
                re_lambda_max: EigenReport::from_coefficients(b, c).max_re(),
            }
        })
        .collect();
    Ok(DispersionCurve {
        modes,
        sigma,
        within_validity,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternVerdict {
    /// `β_C` lies below the bound: `B(k) > 0` on every mode in the set.
    Sufficient,
    NotSufficient,
    /// No mode with `sin(kθ) < 0` up to `m_max`.
    NoVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternBound<T> {
    /// `min_k -sinc(kθ)(ρ_C2* μ_C + ρ_T2* μ_T)/(k² |I|)` over the mode set.
    pub bound: Option<T>,
    /// Mode index attaining the minimum.
    pub minimizing_mode: Option<usize>,
    /// Mode indices `m ≤ m_max` with `sin(kθ) < 0`.
    pub modes: Vec<usize>,
    pub verdict: PatternVerdict,
}

/// Upper bound on `β_C` under which `B(k) > 0` for every mode with
/// `sin(kθ) < 0`, for equal competition radii `θ_C = θ_T = θ`.
///
/// The terms decay like `k⁻³`, so the minimum is set by the largest modes in
/// the scan; the result depends on `m_max`.
pub fn pattern_bound<T: Scalar>(
    params: &ModelParams<T>,
    theta: T,
    half_width: T,
    beta_c: T,
    m_max: usize,
) -> Result<PatternBound<T>> {
    if !(theta > T::zero() && theta < half_width) {
        return Err(ModelError::Domain(format!(
            "theta must lie in (0, {half_width}), got {theta}"
        )));
    }
    if m_max < 1 {
        return Err(ModelError::Domain("m_max must be at least 1".into()));
    }
    let width = T::lit(2.0) * half_width;
    let (rho_c, rho_t) = coexistence(params, width)?;
    let weight = rho_c * params.mu_c + rho_t * params.mu_t;
    let mut modes = Vec::new();
    let mut best: Option<(usize, T)> = None;
    for m in 1..=m_max {
        let k = wavenumber(m, width);
        if negative_sine_mode(m, theta, width) {
            modes.push(m);
            let term = -sinc(k * theta) * weight / (k * k * width);
            if best.is_none_or(|(_, b)| term < b) {
                best = Some((m, term));
            }
        }
    }
    let verdict = match best {
        None => PatternVerdict::NoVerdict,
        Some((_, b)) if beta_c < b => PatternVerdict::Sufficient,
        Some(_) => PatternVerdict::NotSufficient,
    };
    Ok(PatternBound {
        bound: best.map(|(_, b)| b),
        minimizing_mode: best.map(|(m, _)| m),
        modes,
        verdict,
    })
}
