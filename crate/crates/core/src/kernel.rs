//! Truncated box kernel `g(x, y; ξ)` and the nonlocal fields built from it.
//!
//! `g(x, y; ξ) = 1/|L_ξ(x)|` when `|y - x| ≤ ξ` and zero otherwise, where
//! `L_ξ(x) = [-L, L] ∩ [x - ξ, x + ξ]`. The normaliser depends on `x`, so `g`
//! is not symmetric near the boundary.
//!
//! On the lattice a field value is a window sum divided by the window
//! length, so every field is evaluated with prefix sums in `O(n)`.

use crate::error::{ModelError, Result};
use crate::grid::PhenotypeGrid;
use crate::scalar::Scalar;

/// Slack on `ξ/χ` when converting a radius to a whole number of sites.
const INDEX_RADIUS_SLACK: f64 = 1e-9;

/// Closed interval `L_ξ(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Window<T> {
    pub fn len(&self) -> T {
        self.hi - self.lo
    }
}

fn check_radius<T: Scalar>(xi: T, grid: &PhenotypeGrid<T>) -> Result<()> {
    if !(xi > T::zero() && xi <= grid.width()) {
        return Err(ModelError::Domain(format!(
            "kernel radius must lie in (0, {}], got {xi}",
            grid.width()
        )));
    }
    Ok(())
}

fn check_point<T: Scalar>(x: T, grid: &PhenotypeGrid<T>) -> Result<()> {
    if !grid.contains(x) {
        return Err(ModelError::Domain(format!(
            "coordinate {x} outside [{}, {}]",
            grid.lower(),
            grid.upper()
        )));
    }
    Ok(())
}

pub fn window<T: Scalar>(x: T, xi: T, grid: &PhenotypeGrid<T>) -> Result<Window<T>> {
    check_radius(xi, grid)?;
    check_point(x, grid)?;
    Ok(Window {
        lo: (x - xi).max(grid.lower()),
        hi: (x + xi).min(grid.upper()),
    })
}

pub fn kernel_weight<T: Scalar>(x: T, y: T, xi: T, grid: &PhenotypeGrid<T>) -> Result<T> {
    let w = window(x, xi, grid)?;
    check_point(y, grid)?;
    if (y - x).abs() <= xi {
        Ok(w.len().recip())
    } else {
        Ok(T::zero())
    }
}

/// How a source vector is interpreted by [`nonlocal_field`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldMode {
    /// Per-site cell counts: `Σ_k g(x_i, x_k) N_k`.
    Count,
    /// Per-site densities, Riemann sum: `Δx Σ_k g(x_i, x_k) n_k`.
    Density,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// Tumour clonal competition `K_C` (radius `θ_C`, source: tumour).
    CompetitionTumour,
    /// CTL self-regulation `K_T` (radius `θ_T`, source: CTLs).
    CompetitionCtl,
    /// CTL pressure felt by tumour cells `J_C` (radius `η`, source: CTLs).
    RecognitionTumour,
    /// Antigen stimulus felt by CTLs `J_T` (radius `η`, source: tumour).
    RecognitionCtl,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelField<T> {
    pub values: Vec<T>,
    pub radius: T,
    pub kind: FieldKind,
}

/// Box kernel of one radius, tabulated on a grid.
///
/// Site `k` lies in the window of site `i` iff `|i - k| χ ≤ ξ`, decided in
/// index space; the normaliser is the exact length of `L_ξ(x_i)`.
#[derive(Debug, Clone)]
pub struct BoxKernel<T> {
    radius: T,
    step: T,
    lo: Vec<usize>,
    hi: Vec<usize>,
    inv_len: Vec<T>,
}

impl<T: Scalar> BoxKernel<T> {
    pub fn new(grid: &PhenotypeGrid<T>, radius: T) -> Result<Self> {
        check_radius(radius, grid)?;
        let n = grid.n_sites();
        let reach = (radius / grid.step() + T::lit(INDEX_RADIUS_SLACK))
            .floor()
            .to_usize()
            .unwrap_or(usize::MAX);
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        let mut inv_len = Vec::with_capacity(n);
        for i in 0..n {
            lo.push(i.saturating_sub(reach));
            hi.push(i.saturating_add(reach).min(n - 1));
            inv_len.push(window(grid.site(i), radius, grid)?.len().recip());
        }
        Ok(Self {
            radius,
            step: grid.step(),
            lo,
            hi,
            inv_len,
        })
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn n_sites(&self) -> usize {
        self.inv_len.len()
    }

    /// Index range `[lo, hi]` of the sites inside the window of site `i`.
    pub fn support(&self, i: usize) -> (usize, usize) {
        (self.lo[i], self.hi[i])
    }

    /// `g(x_i, x_k; ξ)` on lattice sites.
    pub fn weight(&self, i: usize, k: usize) -> T {
        if k >= self.lo[i] && k <= self.hi[i] {
            self.inv_len[i]
        } else {
            T::zero()
        }
    }

    /// Writes the field generated by `source` into `out`.
    pub fn apply_into(&self, source: &[T], mode: FieldMode, prefix: &mut Vec<T>, out: &mut [T]) {
        let n = self.n_sites();
        assert_eq!(source.len(), n, "source length must match kernel grid");
        assert_eq!(out.len(), n, "output length must match kernel grid");
        prefix.clear();
        prefix.reserve(n + 1);
        let mut acc = T::zero();
        prefix.push(acc);
        for &s in source {
            acc += s;
            prefix.push(acc);
        }
        let scale = match mode {
            FieldMode::Count => T::one(),
            FieldMode::Density => self.step,
        };
        for (i, o) in out.iter_mut().enumerate() {
            let sum = prefix[self.hi[i] + 1] - prefix[self.lo[i]];
            *o = scale * sum * self.inv_len[i];
        }
    }

    pub fn apply(&self, source: &[T], mode: FieldMode) -> Vec<T> {
        let mut prefix = Vec::new();
        let mut out = vec![T::zero(); self.n_sites()];
        self.apply_into(source, mode, &mut prefix, &mut out);
        out
    }
}

/// Nonlocal field of `source` under the box kernel of radius `xi`.
pub fn nonlocal_field<T: Scalar>(
    grid: &PhenotypeGrid<T>,
    source: &[T],
    xi: T,
    mode: FieldMode,
    kind: FieldKind,
) -> Result<KernelField<T>> {
    grid.check_len(source.len())?;
    let kernel = BoxKernel::new(grid, xi)?;
    Ok(KernelField {
        values: kernel.apply(source, mode),
        radius: xi,
        kind,
    })
}

/// The three kernels a model evaluation needs (`θ_C`, `θ_T`, `η`).
#[derive(Debug, Clone)]
pub struct ModelKernels<T> {
    pub competition_tumour: BoxKernel<T>,
    pub competition_ctl: BoxKernel<T>,
    pub recognition: BoxKernel<T>,
}

impl<T: Scalar> ModelKernels<T> {
    pub fn new(grid: &PhenotypeGrid<T>, theta_c: T, theta_t: T, eta: T) -> Result<Self> {
        Ok(Self {
            competition_tumour: BoxKernel::new(grid, theta_c)?,
            competition_ctl: BoxKernel::new(grid, theta_t)?,
            recognition: BoxKernel::new(grid, eta)?,
        })
    }
}

/// `K_C`, `K_T`, `J_C`, `J_T` evaluated together.
#[derive(Debug, Clone, Default)]
pub struct Fields<T> {
    pub k_c: Vec<T>,
    pub k_t: Vec<T>,
    pub j_c: Vec<T>,
    pub j_t: Vec<T>,
    prefix: Vec<T>,
}

impl<T: Scalar> Fields<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            k_c: vec![T::zero(); n],
            k_t: vec![T::zero(); n],
            j_c: vec![T::zero(); n],
            j_t: vec![T::zero(); n],
            prefix: Vec::with_capacity(n + 1),
        }
    }

    pub fn evaluate(&mut self, kernels: &ModelKernels<T>, tumour: &[T], ctl: &[T], mode: FieldMode) {
        let p = &mut self.prefix;
        kernels
            .competition_tumour
            .apply_into(tumour, mode, p, &mut self.k_c);
        kernels.competition_ctl.apply_into(ctl, mode, p, &mut self.k_t);
        kernels.recognition.apply_into(ctl, mode, p, &mut self.j_c);
        kernels.recognition.apply_into(tumour, mode, p, &mut self.j_t);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit_grid(n: usize) -> PhenotypeGrid<f64> {
        PhenotypeGrid::new(1.0, n).unwrap()
    }

    #[test]
    fn window_lengths() {
        let g = unit_grid(1500);
        assert_relative_eq!(window(0.0, 0.3, &g).unwrap().len(), 0.6, epsilon = 1e-15);
        assert_relative_eq!(window(-1.0, 0.3, &g).unwrap().len(), 0.3, epsilon = 1e-15);
        let w = window(-0.9, 0.3, &g).unwrap();
        assert_eq!(w.lo, -1.0);
        assert_relative_eq!(w.hi, -0.6, epsilon = 1e-15);
        assert_relative_eq!(w.len(), 0.4, epsilon = 1e-15);
    }

    #[test]
    fn window_domain_errors() {
        let g = unit_grid(11);
        assert!(matches!(window(0.0, 0.0, &g), Err(ModelError::Domain(_))));
        assert!(matches!(window(0.0, -0.1, &g), Err(ModelError::Domain(_))));
        assert!(matches!(window(1.2, 0.3, &g), Err(ModelError::Domain(_))));
        assert!(matches!(kernel_weight(0.0, 1.5, 0.3, &g), Err(ModelError::Domain(_))));
    }

    #[test]
    fn weight_examples() {
        let g = unit_grid(1500);
        assert_relative_eq!(kernel_weight(0.0, 0.2, 0.3, &g).unwrap(), 1.0 / 0.6, epsilon = 1e-12);
        assert_eq!(kernel_weight(0.0, 0.5, 0.3, &g).unwrap(), 0.0);
        assert_relative_eq!(kernel_weight(-0.9, -1.0, 0.3, &g).unwrap(), 2.5, epsilon = 1e-12);
    }

    #[test]
    fn weight_is_not_symmetric_near_boundary() {
        let g = unit_grid(1500);
        let a = kernel_weight(-0.9, 0.0, 1.0, &g).unwrap();
        let b = kernel_weight(0.0, -0.9, 1.0, &g).unwrap();
        assert_relative_eq!(a, 1.0 / 1.1, epsilon = 1e-12);
        assert_relative_eq!(b, 0.5, epsilon = 1e-12);
        assert!(a != b);
    }

    #[test]
    fn single_agent_field_is_the_kernel_column() {
        let g = unit_grid(201);
        let mut src = vec![0.0; 201];
        src[37] = 1.0;
        let f = nonlocal_field(&g, &src, 0.25, FieldMode::Count, FieldKind::CompetitionTumour).unwrap();
        for i in 0..201 {
            let expect = kernel_weight(g.site(i), g.site(37), 0.25, &g).unwrap();
            assert_relative_eq!(f.values[i], expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_site_full_window() {
        // every window is the whole interval, so each value is 8 / 2
        let g = unit_grid(2);
        let f = nonlocal_field(&g, &[3.0, 5.0], 2.0, FieldMode::Count, FieldKind::RecognitionCtl)
            .unwrap();
        for v in f.values {
            assert_relative_eq!(v, 4.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn constant_density_reproduces_itself() {
        let g = unit_grid(1500);
        let c = 7.5e3;
        for xi in [0.1, 0.3, 0.7, 1.8] {
            let f = nonlocal_field(&g, &vec![c; 1500], xi, FieldMode::Density, FieldKind::CompetitionCtl)
                .unwrap();
            let tol = 2.0 * g.step() / xi;
            for v in f.values {
                assert!((v / c - 1.0).abs() <= tol, "xi {xi}: {v}");
            }
        }
    }

    #[test]
    fn length_mismatch_is_reported() {
        let g = unit_grid(10);
        let err = nonlocal_field(&g, &[1.0; 9], 0.5, FieldMode::Count, FieldKind::CompetitionCtl)
            .unwrap_err();
        assert_eq!(err, ModelError::LengthMismatch { expected: 10, actual: 9 });
    }

    #[test]
    fn radius_on_exact_lattice_multiple_includes_boundary_site() {
        // step 0.1, radius 0.3 → exactly 3 sites each side
        let g = unit_grid(21);
        let k = BoxKernel::new(&g, 0.3).unwrap();
        assert_eq!(k.support(10), (7, 13));
        assert_eq!(k.support(0), (0, 3));
    }

    fn naive_field(g: &PhenotypeGrid<f64>, src: &[f64], xi: f64, mode: FieldMode) -> Vec<f64> {
        let n = g.n_sites();
        let scale = if mode == FieldMode::Density { g.step() } else { 1.0 };
        (0..n)
            .map(|i| {
                let len = window(g.site(i), xi, g).unwrap().len();
                let s: f64 = (0..n)
                    .filter(|&k| (i as f64 - k as f64).abs() * g.step() <= xi * (1.0 + 1e-9))
                    .map(|k| src[k])
                    .sum();
                scale * s / len
            })
            .collect()
    }

    proptest! {
        #[test]
        fn prefix_sum_matches_direct_sum(
            n in 5usize..80,
            xi in 0.05f64..2.0,
            src in proptest::collection::vec(0.0f64..100.0, 80),
        ) {
            let g = unit_grid(n);
            let src = &src[..n];
            let fast = BoxKernel::new(&g, xi).unwrap().apply(src, FieldMode::Density);
            let slow = naive_field(&g, src, xi, FieldMode::Density);
            for (a, b) in fast.iter().zip(&slow) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
            }
        }

        #[test]
        fn field_is_linear(
            xi in 0.05f64..2.0,
            a in proptest::collection::vec(0.0f64..50.0, 40),
            b in proptest::collection::vec(0.0f64..50.0, 40),
            s in 0.0f64..3.0,
        ) {
            let g = unit_grid(40);
            let k = BoxKernel::new(&g, xi).unwrap();
            let combo: Vec<f64> = a.iter().zip(&b).map(|(x, y)| s * x + y).collect();
            let fa = k.apply(&a, FieldMode::Count);
            let fb = k.apply(&b, FieldMode::Count);
            let fc = k.apply(&combo, FieldMode::Count);
            for i in 0..40 {
                let expect = s * fa[i] + fb[i];
                prop_assert!((fc[i] - expect).abs() <= 1e-9 * (1.0 + expect.abs()));
                prop_assert!(fa[i] >= 0.0);
            }
        }

        #[test]
        fn count_and_density_modes_agree(
            xi in 0.05f64..2.0,
            counts in proptest::collection::vec(0u32..500, 60),
        ) {
            let g = unit_grid(60);
            let k = BoxKernel::new(&g, xi).unwrap();
            let n: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
            let dens: Vec<f64> = n.iter().map(|c| c / g.step()).collect();
            let fc = k.apply(&n, FieldMode::Count);
            let fd = k.apply(&dens, FieldMode::Density);
            for (a, b) in fc.iter().zip(&fd) {
                prop_assert!((a - b).abs() <= 1e-6 * a.abs().max(1e-12));
            }
        }

        #[test]
        fn support_matches_distance_rule(n in 5usize..200, xi in 0.01f64..2.0) {
            let g = unit_grid(n);
            let k = BoxKernel::new(&g, xi).unwrap();
            let i = n / 3;
            for j in 0..n {
                let inside = (g.site(j) - g.site(i)).abs() <= xi + 1e-9 * g.step();
                prop_assert_eq!(k.weight(i, j) > 0.0, inside);
            }
        }
    }

    #[test]
    fn single_precision_field() {
        let g = PhenotypeGrid::new(1.0_f32, 301).unwrap();
        let f = nonlocal_field(&g, &vec![100.0_f32; 301], 0.5, FieldMode::Density, FieldKind::CompetitionTumour)
            .unwrap();
        assert!(f.values.iter().all(|v| (v / 100.0 - 1.0).abs() < 2.0 * g.step() / 0.5));
    }
}
