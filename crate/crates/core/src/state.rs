use crate::error::{ModelError, Result};
use crate::grid::PhenotypeGrid;
use crate::scalar::Scalar;

/// Per-site cell numbers of the individual-based model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountState {
    pub tumour: Vec<u64>,
    pub ctl: Vec<u64>,
}

impl CountState {
    pub fn new(tumour: Vec<u64>, ctl: Vec<u64>) -> Result<Self> {
        if tumour.len() != ctl.len() {
            return Err(ModelError::LengthMismatch {
                expected: tumour.len(),
                actual: ctl.len(),
            });
        }
        Ok(Self { tumour, ctl })
    }

    pub fn n_sites(&self) -> usize {
        self.tumour.len()
    }

    pub fn rho_c(&self) -> u64 {
        self.tumour.iter().sum()
    }

    pub fn rho_t(&self) -> u64 {
        self.ctl.iter().sum()
    }

    /// Phenotype densities `N / χ`.
    pub fn densities<T: Scalar>(&self, grid: &PhenotypeGrid<T>) -> DensityState<T> {
        let inv = grid.step().recip();
        let conv = |v: &[u64]| v.iter().map(|&c| T::from_count(c) * inv).collect();
        DensityState {
            tumour: conv(&self.tumour),
            ctl: conv(&self.ctl),
        }
    }
}

/// Per-site phenotype densities of the continuum model.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState<T> {
    pub tumour: Vec<T>,
    pub ctl: Vec<T>,
}

impl<T: Scalar> DensityState<T> {
    pub fn n_sites(&self) -> usize {
        self.tumour.len()
    }

    /// `ρ_C = Δx Σ n_C`.
    pub fn rho_c(&self, step: T) -> T {
        step * self.tumour.iter().copied().sum::<T>()
    }

    /// `ρ_T = Δx Σ n_T`.
    pub fn rho_t(&self, step: T) -> T {
        step * self.ctl.iter().copied().sum::<T>()
    }
}
