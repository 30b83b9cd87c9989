use crate::error::{ModelError, Result};
use crate::scalar::Scalar;

/// Uniform lattice on the phenotype interval `[-L, L]`, both endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct PhenotypeGrid<T> {
    half_width: T,
    n_sites: usize,
    step: T,
}

impl<T: Scalar> PhenotypeGrid<T> {
    pub fn new(half_width: T, n_sites: usize) -> Result<Self> {
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(ModelError::Config(format!(
                "half-width must be positive and finite, got {half_width}"
            )));
        }
        if n_sites < 2 {
            return Err(ModelError::Config(format!(
                "a phenotype grid needs at least 2 sites, got {n_sites}"
            )));
        }
        let step = T::lit(2.0) * half_width / T::from_usize(n_sites - 1).unwrap();
        Ok(Self {
            half_width,
            n_sites,
            step,
        })
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    /// `|I| = 2L`.
    pub fn width(&self) -> T {
        T::lit(2.0) * self.half_width
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Lattice spacing `2L / (n_sites - 1)`.
    pub fn step(&self) -> T {
        self.step
    }

    pub fn lower(&self) -> T {
        -self.half_width
    }

    pub fn upper(&self) -> T {
        self.half_width
    }

    /// Coordinate of site `i`; the last site is pinned to `L` exactly.
    pub fn site(&self, i: usize) -> T {
        debug_assert!(i < self.n_sites);
        if i + 1 == self.n_sites {
            self.half_width
        } else {
            -self.half_width + T::from_usize(i).unwrap() * self.step
        }
    }

    pub fn sites(&self) -> Vec<T> {
        (0..self.n_sites).map(|i| self.site(i)).collect()
    }

    pub fn contains(&self, x: T) -> bool {
        x >= self.lower() && x <= self.upper()
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len == self.n_sites {
            Ok(())
        } else {
            Err(ModelError::LengthMismatch {
                expected: self.n_sites,
                actual: len,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_spacing() {
        let g = PhenotypeGrid::new(1.0_f64, 1500).unwrap();
        assert_eq!(g.site(0), -1.0);
        assert_eq!(g.site(1499), 1.0);
        assert!((g.step() - 2.0 / 1499.0).abs() < 1e-15);
        let s = g.sites();
        assert_eq!(s.len(), 1500);
        assert!(s.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(PhenotypeGrid::new(1.0_f64, 1).is_err());
        assert!(PhenotypeGrid::new(0.0_f64, 10).is_err());
        assert!(PhenotypeGrid::new(-1.0_f32, 10).is_err());
    }

    #[test]
    fn single_precision_grid() {
        let g = PhenotypeGrid::new(1.0_f32, 101).unwrap();
        assert_eq!(g.site(100), 1.0);
        assert!((g.site(50)).abs() < 1e-6);
    }
}
