//! Continuum (PDE-IDE) solver on the same lattice as the stochastic engine.
//!
//! One step of size `Δt`, with every nonlocal field taken from the state at
//! the start of the step:
//!
//! ```text
//! n_C^{k+½} = n_C^k (1 + Δt R_C⁺) / (1 + Δt R_C⁻)
//! n_C^{k+1} = n_C^{k+½} + β_C Δt Δ_h n_C^{k+½}     interior sites
//! n_C^{k+1}(±L) = value at the adjacent interior site
//! n_T^{k+1} = n_T^k (1 + Δt R_T⁺) / (1 + Δt R_T⁻)
//! ```
//!
//! with `R_C = α_C - μ_C K_C - ζ_C γ J_C` and `R_T = α_T + ζ_T γ J_T - μ_T K_T`.

use crate::error::{ModelError, Result};
use crate::grid::PhenotypeGrid;
use crate::kernel::{FieldMode, Fields, ModelKernels};
use crate::params::{InitialCondition, ModelParams};
use crate::scalar::Scalar;
use crate::state::DensityState;
use crate::trajectory::{snapshot_steps, PdeDiagnostics, Snapshot, Trajectory};

/// Net per-capita growth rates at every site.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactionTerms<T> {
    pub tumour: Vec<T>,
    pub ctl: Vec<T>,
}

pub fn reaction_terms<T: Scalar>(fields: &Fields<T>, params: &ModelParams<T>) -> ReactionTerms<T> {
    let (gc, gt) = (params.gamma_c(), params.gamma_t());
    let tumour = fields
        .k_c
        .iter()
        .zip(&fields.j_c)
        .map(|(&k, &j)| params.alpha_c - params.mu_c * k - gc * j)
        .collect();
    let ctl = fields
        .k_t
        .iter()
        .zip(&fields.j_t)
        .map(|(&k, &j)| params.alpha_t + gt * j - params.mu_t * k)
        .collect();
    ReactionTerms { tumour, ctl }
}

/// Positivity-preserving growth factor `(1 + Δt R⁺) / (1 + Δt R⁻)`.
#[inline]
pub fn imex_factor<T: Scalar>(rate: T, dt: T) -> T {
    let gain = rate.max(T::zero());
    let loss = (-rate).max(T::zero());
    (T::one() + dt * gain) / (T::one() + dt * loss)
}

fn react_in_place<T: Scalar>(density: &mut [T], rates: &[T], dt: T) {
    for (n, &r) in density.iter_mut().zip(rates) {
        *n *= imex_factor(r, dt);
    }
}

/// Reaction sub-step applied to both populations.
pub fn reaction_update<T: Scalar>(
    state: &DensityState<T>,
    terms: &ReactionTerms<T>,
    dt: T,
) -> DensityState<T> {
    let mut next = state.clone();
    react_in_place(&mut next.tumour, &terms.tumour, dt);
    react_in_place(&mut next.ctl, &terms.ctl, dt);
    next
}

/// `β_C Δt / Δx²`.
pub fn cfl_number<T: Scalar>(beta: T, dt: T, step: T) -> T {
    beta * dt / (step * step)
}

fn check_diffusion_setup<T: Scalar>(beta: T, dt: T, grid: &PhenotypeGrid<T>) -> Result<()> {
    if grid.n_sites() < 3 {
        return Err(ModelError::Config(
            "diffusion needs at least one interior site".into(),
        ));
    }
    if !(beta >= T::zero()) || !(dt > T::zero()) {
        return Err(ModelError::Config(format!(
            "diffusion needs beta >= 0 and dt > 0, got beta = {beta}, dt = {dt}"
        )));
    }
    let cfl = cfl_number(beta, dt, grid.step());
    if cfl > T::lit(0.5) {
        return Err(ModelError::Config(format!(
            "explicit diffusion unstable: CFL number {cfl} > 1/2"
        )));
    }
    Ok(())
}

/// With `coeff == 0` there is no diffusion and no boundary condition to
/// impose, so the profile is copied unchanged.
fn diffuse_into<T: Scalar>(src: &[T], coeff: T, out: &mut [T]) {
    let n = src.len();
    if coeff == T::zero() {
        out.copy_from_slice(src);
        return;
    }
    let two = T::lit(2.0);
    for i in 1..n - 1 {
        out[i] = src[i] + coeff * (src[i + 1] - two * src[i] + src[i - 1]);
    }
    out[0] = out[1];
    out[n - 1] = out[n - 2];
}

/// Explicit three-point diffusion step with zero-gradient boundary copies.
pub fn diffusion_update<T: Scalar>(
    density: &[T],
    beta: T,
    dt: T,
    grid: &PhenotypeGrid<T>,
) -> Result<Vec<T>> {
    grid.check_len(density.len())?;
    check_diffusion_setup(beta, dt, grid)?;
    let mut out = vec![T::zero(); density.len()];
    diffuse_into(density, cfl_number(beta, dt, grid.step()), &mut out);
    Ok(out)
}

/// Continuum density profiles `n⁰(u_i)` on the lattice.
pub fn initialize_densities<T: Scalar>(
    grid: &PhenotypeGrid<T>,
    init: &InitialCondition<T>,
) -> Result<DensityState<T>> {
    init.validate()?;
    Ok(DensityState {
        tumour: grid.sites().into_iter().map(|u| init.tumour_density(u)).collect(),
        ctl: grid.sites().into_iter().map(|v| init.ctl_density(v)).collect(),
    })
}

#[derive(Debug, Clone)]
pub struct PdeSolver<T> {
    grid: PhenotypeGrid<T>,
    params: ModelParams<T>,
    kernels: ModelKernels<T>,
    dt: T,
    beta: T,
}

impl<T: Scalar> PdeSolver<T> {
    /// `dt` defaults to the stochastic engine's `τ`; `β_C` is always derived
    /// from `λ_C`, `χ` and `τ`.
    pub fn new(params: ModelParams<T>, grid: PhenotypeGrid<T>, dt: Option<T>) -> Result<Self> {
        params.validate(&grid)?;
        let dt = dt.unwrap_or(params.tau);
        let beta = params.beta_c(grid.step());
        check_diffusion_setup(beta, dt, &grid)?;
        let kernels = ModelKernels::new(&grid, params.theta_c, params.theta_t, params.eta)?;
        Ok(Self {
            grid,
            params,
            kernels,
            dt,
            beta,
        })
    }

    /// Overrides the diffusion coefficient (e.g. to switch it off); the CFL
    /// condition is rechecked.
    pub fn with_beta(mut self, beta: T) -> Result<Self> {
        check_diffusion_setup(beta, self.dt, &self.grid)?;
        self.beta = beta;
        Ok(self)
    }

    pub fn grid(&self) -> &PhenotypeGrid<T> {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn cfl(&self) -> T {
        cfl_number(self.beta, self.dt, self.grid.step())
    }

    /// One split step; `scratch` is reused between calls.
    pub fn step_in_place(&self, state: &mut DensityState<T>, fields: &mut Fields<T>, scratch: &mut Vec<T>) {
        fields.evaluate(&self.kernels, &state.tumour, &state.ctl, FieldMode::Density);
        let terms = reaction_terms(fields, &self.params);
        react_in_place(&mut state.tumour, &terms.tumour, self.dt);
        scratch.clear();
        scratch.resize(state.tumour.len(), T::zero());
        diffuse_into(&state.tumour, self.cfl(), scratch);
        std::mem::swap(&mut state.tumour, scratch);
        react_in_place(&mut state.ctl, &terms.ctl, self.dt);
    }

    pub fn step(&self, state: &DensityState<T>) -> Result<DensityState<T>> {
        self.grid.check_len(state.n_sites())?;
        self.grid.check_len(state.ctl.len())?;
        let mut next = state.clone();
        self.step_in_place(&mut next, &mut Fields::zeros(self.grid.n_sites()), &mut Vec::new());
        Ok(next)
    }

    /// Marches from `init` to `t_final` in steps of `dt`.
    pub fn run(&self, init: &DensityState<T>, snapshot_times: &[T]) -> Result<Trajectory<T>> {
        self.grid.check_len(init.n_sites())?;
        self.grid.check_len(init.ctl.len())?;
        let n_steps = (self.params.t_final / self.dt).round().to_usize().unwrap_or(0);
        let snaps = snapshot_steps(snapshot_times, self.dt, n_steps)?;
        let step = self.grid.step();
        let mut state = init.clone();
        let mut fields = Fields::zeros(self.grid.n_sites());
        let mut scratch = Vec::with_capacity(self.grid.n_sites());
        let mut traj = Trajectory::with_capacity(self.dt, n_steps);
        let mut min_density = T::infinity();
        for h in 0..=n_steps {
            if h > 0 {
                self.step_in_place(&mut state, &mut fields, &mut scratch);
            }
            for &v in state.tumour.iter().chain(&state.ctl) {
                min_density = min_density.min(v);
            }
            traj.record(h, state.rho_c(step), state.rho_t(step));
            if snaps.binary_search(&h).is_ok() {
                traj.snapshots.push(Snapshot {
                    t: T::from_usize(h).unwrap() * self.dt,
                    tumour: state.tumour.clone(),
                    ctl: state.ctl.clone(),
                });
            }
        }
        traj.diagnostics = Some(PdeDiagnostics {
            cfl: self.cfl(),
            min_density,
        });
        Ok(traj)
    }
}

/// Solves from the continuum initial profile.
pub fn run_pde<T: Scalar>(
    params: &ModelParams<T>,
    grid: &PhenotypeGrid<T>,
    init: &InitialCondition<T>,
    dt: Option<T>,
    snapshot_times: &[T],
) -> Result<Trajectory<T>> {
    let solver = PdeSolver::new(params.clone(), grid.clone(), dt)?;
    solver.run(&initialize_densities(grid, init)?, snapshot_times)
}
