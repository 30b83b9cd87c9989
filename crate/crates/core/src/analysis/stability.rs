use num_complex::Complex;

use crate::error::{ModelError, Result};
use crate::params::ModelParams;
use crate::scalar::Scalar;

/// Roots of `λ² - Bλ + C = 0` and the stability verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenReport<T> {
    pub b: T,
    pub c: T,
    pub lambda_plus: Complex<T>,
    pub lambda_minus: Complex<T>,
    /// Both roots have negative real part.
    pub stable: bool,
}

impl<T: Scalar> EigenReport<T> {
    pub fn from_coefficients(b: T, c: T) -> Self {
        let (lambda_plus, lambda_minus) = solve_quadratic(b, c);
        Self {
            b,
            c,
            lambda_plus,
            lambda_minus,
            stable: lambda_plus.re < T::zero() && lambda_minus.re < T::zero(),
        }
    }

    pub fn max_re(&self) -> T {
        self.lambda_plus.re.max(self.lambda_minus.re)
    }

    /// Largest `|λ² - Bλ + C|` over the two roots.
    pub fn residual(&self) -> T {
        let r = |l: Complex<T>| (l * l - l.scale(self.b) + Complex::new(self.c, T::zero())).norm();
        r(self.lambda_plus).max(r(self.lambda_minus))
    }
}

/// Roots of `λ² - bλ + c = 0`, real pair via the cancellation-free form
/// `q = (b + sign(b)√Δ)/2`, `λ = q, c/q`.
pub fn solve_quadratic<T: Scalar>(b: T, c: T) -> (Complex<T>, Complex<T>) {
    let two = T::lit(2.0);
    let disc = b * b - T::lit(4.0) * c;
    if disc >= T::zero() {
        let s = disc.sqrt();
        let q = if b >= T::zero() { (b + s) / two } else { (b - s) / two };
        let other = if q == T::zero() { T::zero() } else { c / q };
        let (hi, lo) = if q >= other { (q, other) } else { (other, q) };
        (Complex::new(hi, T::zero()), Complex::new(lo, T::zero()))
    } else {
        let im = (-disc).sqrt() / two;
        (Complex::new(b / two, im), Complex::new(b / two, -im))
    }
}

/// Which homogeneous steady state to linearise about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Semitrivial,
    Nontrivial,
}

/// Linear stability of a homogeneous steady state to spatially uniform
/// perturbations.
pub fn homogeneous_stability<T: Scalar>(params: &ModelParams<T>, branch: Branch) -> Result<EigenReport<T>> {
    if !(params.alpha_t > T::zero()) || !(params.mu_t > T::zero()) {
        return Err(ModelError::Domain(
            "alpha_T and mu_T must be positive".into(),
        ));
    }
    let (gc, gt) = (params.gamma_c(), params.gamma_t());
    let (ac, at, mc, mt) = (params.alpha_c, params.alpha_t, params.mu_c, params.mu_t);
    let (b, c) = match branch {
        Branch::Semitrivial => {
            let kill = gc * at / mt;
            (ac - kill - at, at * (kill - ac))
        }
        Branch::Nontrivial => {
            if params.gamma >= params.gamma_threshold() {
                return Err(ModelError::Domain(format!(
                    "no coexistence state: gamma {} >= threshold {}",
                    params.gamma,
                    params.gamma_threshold()
                )));
            }
            let denom = gt * gc + mc * mt;
            let tumour = (ac * mt - at * gc) / denom;
            let ctl = (at * mc + ac * gt) / denom;
            (-(mc * tumour + mt * ctl), tumour * ctl * denom)
        }
    };
    Ok(EigenReport::from_coefficients(b, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eradication_case_by_hand() {
        let mut p = ModelParams::with_default_rates(3.5, 1.8, 1.8, 1.8);
        p.alpha_t = 0.5;
        let r = homogeneous_stability(&p, Branch::Semitrivial).unwrap();
        assert_relative_eq!(r.b, -0.75, epsilon = 1e-12);
        assert_relative_eq!(r.c, 0.125, epsilon = 1e-12);
        assert_relative_eq!(r.lambda_plus.re, -0.25, epsilon = 1e-12);
        assert_relative_eq!(r.lambda_minus.re, -0.5, epsilon = 1e-12);
        assert_eq!(r.lambda_plus.im, 0.0);
        assert!(r.stable);
    }

    #[test]
    fn semitrivial_unstable_below_threshold() {
        let p = ModelParams::with_default_rates(2.0, 1.8, 1.8, 1.8);
        let r = homogeneous_stability(&p, Branch::Semitrivial).unwrap();
        assert!(r.c < 0.0);
        assert!(!r.stable);
        assert!(r.max_re() > 0.0);
    }

    #[test]
    fn nontrivial_requires_coexistence() {
        let mut p = ModelParams::with_default_rates(3.5, 1.8, 1.8, 1.8);
        p.alpha_t = 0.5;
        assert!(homogeneous_stability(&p, Branch::Nontrivial).is_err());
        let q = ModelParams::with_default_rates(0.3, 1.8, 1.8, 1.8);
        let r = homogeneous_stability(&q, Branch::Nontrivial).unwrap();
        assert!(r.b < 0.0 && r.c > 0.0 && r.stable);
    }

    #[test]
    fn quadratic_edge_cases() {
        let (a, b) = solve_quadratic(0.0_f64, 0.0);
        assert_eq!((a.re, b.re), (0.0, 0.0));
        let (a, b) = solve_quadratic(0.0_f64, 4.0);
        assert_eq!((a.re, a.im.abs()), (0.0, 2.0));
        assert_eq!(b.im, -a.im);
        // huge spread: naive formula loses the small root
        let (a, b) = solve_quadratic(1e8_f64, 1.0);
        assert_relative_eq!(a.re, 1e8, max_relative = 1e-15);
        assert_relative_eq!(b.re, 1e-8, max_relative = 1e-12);
    }

    #[test]
    fn residual_is_small() {
        for (b, c) in [(-0.75f64, 0.125f64), (3.0, -7.0), (-1e-3, 5.0), (2.0, 1.0)] {
            let r = EigenReport::from_coefficients(b, c);
            assert!(r.residual() < 1e-10 * 1f64.max(b.abs()).max(c.abs()));
        }
    }

    #[test]
    fn single_precision_report() {
        let p = ModelParams::<f32>::with_default_rates(2.0, 1.8, 1.8, 1.8);
        let r = homogeneous_stability(&p, Branch::Nontrivial).unwrap();
        assert!(r.stable);
    }
}
