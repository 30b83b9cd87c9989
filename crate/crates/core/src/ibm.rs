//! Individual-based model: a discrete-time branching random walk on the
//! phenotype lattice.
//!
//! Each step runs, in order:
//!
//! 1. tumour phenotype moves (probability `λ_C`, left/right with equal odds,
//!    moves off the lattice aborted), applied synchronously;
//! 2. `K_C, K_T, J_C, J_T` in count mode from the post-move counts;
//! 3. division/death/quiescence for every tumour cell, then every CTL.
//!
//! Cells are stored as per-site counts. Per-cell uniform draws are realised
//! as per-site binomials, which have exactly the same joint law:
//!
//! * moves: `M ~ Bin(N, λ_C)` movers, of which `Bin(M, ½)` go left;
//! * fates: `D ~ Bin(N, P^d)` deaths, then `B ~ Bin(N - D, P^b / (1 - P^d))`
//!   divisions among survivors.
//!
//! Draw order is fixed: tumour moves by ascending site, tumour fates by
//! ascending site, CTL fates by ascending site, all from one ChaCha8 stream
//! seeded with [`RngStream::new`]. The per-cell reference rules
//! ([`cell_move_target`], [`cell_fate`]) document the semantics and back the
//! equivalence tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Open01};

use crate::error::{ModelError, Population, Result};
use crate::grid::PhenotypeGrid;
use crate::kernel::{FieldMode, Fields, ModelKernels};
use crate::params::{InitialCondition, ModelParams};
use crate::scalar::Scalar;
use crate::state::CountState;
use crate::trajectory::{snapshot_steps, Snapshot, Trajectory};

/// Seeded ChaCha8 stream; the same seed always yields the same draws.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.sample(Open01)
    }

    pub fn binomial(&mut self, n: u64, p: f64) -> u64 {
        if n == 0 || p <= 0.0 {
            return 0;
        }
        if p >= 1.0 {
            return n;
        }
        Binomial::new(n, p)
            .expect("binomial probability in (0, 1)")
            .sample(&mut self.rng)
    }
}

/// Tumour and CTL counts from the initial profile, `round(n⁰(u_i) χ)`.
pub fn initialize_counts<T: Scalar>(
    grid: &PhenotypeGrid<T>,
    init: &InitialCondition<T>,
) -> Result<CountState> {
    init.validate()?;
    let step = grid.step();
    let round = |d: T| (d * step).round().to_u64().unwrap_or(0);
    let tumour = grid.sites().into_iter().map(|u| round(init.tumour_density(u))).collect();
    let ctl = grid.sites().into_iter().map(|v| round(init.ctl_density(v))).collect();
    CountState::new(tumour, ctl)
}

/// Destination of one tumour cell at `site` given its two uniforms:
/// `r1 < λ` triggers a move, `r2 < ½` picks left. Moves off the lattice are
/// aborted.
pub fn cell_move_target(site: usize, n_sites: usize, lambda: f64, r1: f64, r2: f64) -> usize {
    if r1 >= lambda {
        site
    } else if r2 < 0.5 {
        site.checked_sub(1).unwrap_or(site)
    } else if site + 1 < n_sites {
        site + 1
    } else {
        site
    }
}

/// One synchronous phenotype-move step for tumour counts.
pub fn phenotype_move_step(tumour: &[u64], lambda: f64, rng: &mut RngStream) -> Vec<u64> {
    let n = tumour.len();
    let mut out = vec![0u64; n];
    for (i, &count) in tumour.iter().enumerate() {
        let movers = rng.binomial(count, lambda);
        let left = rng.binomial(movers, 0.5);
        let right = movers - left;
        out[i] += count - movers;
        if i > 0 {
            out[i - 1] += left;
        } else {
            out[i] += left;
        }
        if i + 1 < n {
            out[i + 1] += right;
        } else {
            out[i] += right;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FateProbabilities<T> {
    pub birth: T,
    pub death: T,
    pub quiescent: T,
}

impl<T: Scalar> FateProbabilities<T> {
    /// Quiescence is the complement `1 - (P^b + P^d)`.
    pub fn new(birth: T, death: T) -> Self {
        Self {
            birth,
            death,
            quiescent: T::one() - (birth + death),
        }
    }

    fn check(&self, population: Population, site: usize) -> Result<()> {
        let unit = |v: T| v >= T::zero() && v <= T::one();
        for (which, v) in [
            ("birth", self.birth),
            ("death", self.death),
            ("quiescence", self.quiescent),
        ] {
            if !unit(v) {
                return Err(ModelError::TimeStepTooLarge {
                    population,
                    which,
                    site,
                    step: 0,
                    value: v.as_f64(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fate {
    Death,
    Division,
    Quiescence,
}

/// Fate of one cell given its uniform `r3`: death below `P^d`, division
/// below `P^d + P^b`, quiescence otherwise.
pub fn cell_fate<T: Scalar>(p: &FateProbabilities<T>, r3: f64) -> Fate {
    let d = p.death.as_f64();
    if r3 < d {
        Fate::Death
    } else if r3 < d + p.birth.as_f64() {
        Fate::Division
    } else {
        Fate::Quiescence
    }
}

/// Per-site fate probabilities for both populations.
#[derive(Debug, Clone, PartialEq)]
pub struct FateTable<T> {
    pub tumour: Vec<FateProbabilities<T>>,
    pub ctl: Vec<FateProbabilities<T>>,
}

/// Fate probabilities from count-mode fields already evaluated on the
/// current counts. Only occupied sites are checked against `[0, 1]`.
pub fn fate_probabilities_from_fields<T: Scalar>(
    state: &CountState,
    params: &ModelParams<T>,
    fields: &Fields<T>,
) -> Result<FateTable<T>> {
    let tau = params.tau;
    let birth_c = tau * params.alpha_c;
    let (gc, gt) = (params.gamma_c(), params.gamma_t());
    let n = state.n_sites();
    let mut tumour = Vec::with_capacity(n);
    let mut ctl = Vec::with_capacity(n);
    for i in 0..n {
        let pc = FateProbabilities::new(
            birth_c,
            tau * (params.mu_c * fields.k_c[i] + gc * fields.j_c[i]),
        );
        if state.tumour[i] > 0 {
            pc.check(Population::Tumour, i)?;
        }
        tumour.push(pc);
        let pt = FateProbabilities::new(
            tau * (params.alpha_t + gt * fields.j_t[i]),
            tau * params.mu_t * fields.k_t[i],
        );
        if state.ctl[i] > 0 {
            pt.check(Population::Ctl, i)?;
        }
        ctl.push(pt);
    }
    Ok(FateTable { tumour, ctl })
}

fn as_scalars<T: Scalar>(counts: &[u64], out: &mut Vec<T>) {
    out.clear();
    out.extend(counts.iter().map(|&c| T::from_count(c)));
}

/// Fate probabilities for `state`, evaluating the fields in count mode.
pub fn fate_probabilities<T: Scalar>(
    state: &CountState,
    params: &ModelParams<T>,
    kernels: &ModelKernels<T>,
) -> Result<FateTable<T>> {
    let mut fields = Fields::zeros(state.n_sites());
    let (mut c, mut t) = (Vec::new(), Vec::new());
    as_scalars(&state.tumour, &mut c);
    as_scalars(&state.ctl, &mut t);
    fields.evaluate(kernels, &c, &t, FieldMode::Count);
    fate_probabilities_from_fields(state, params, &fields)
}

/// Applies one round of death/division draws to `counts`.
pub fn birth_death_step<T: Scalar>(
    counts: &[u64],
    fates: &[FateProbabilities<T>],
    rng: &mut RngStream,
) -> Vec<u64> {
    assert_eq!(counts.len(), fates.len());
    counts
        .iter()
        .zip(fates)
        .map(|(&n, p)| {
            let death = p.death.as_f64();
            let deaths = rng.binomial(n, death);
            let survivors = n - deaths;
            let births = if death < 1.0 {
                rng.binomial(survivors, (p.birth.as_f64() / (1.0 - death)).min(1.0))
            } else {
                0
            };
            survivors + births
        })
        .collect()
}

/// Stochastic engine bound to one parameter set and grid. Cheap to build,
/// so one instance per worker is fine.
#[derive(Debug, Clone)]
pub struct IbmEngine<T> {
    grid: PhenotypeGrid<T>,
    params: ModelParams<T>,
    kernels: ModelKernels<T>,
}

impl<T: Scalar> IbmEngine<T> {
    pub fn new(params: ModelParams<T>, grid: PhenotypeGrid<T>) -> Result<Self> {
        params.validate(&grid)?;
        let kernels = ModelKernels::new(&grid, params.theta_c, params.theta_t, params.eta)?;
        Ok(Self {
            grid,
            params,
            kernels,
        })
    }

    pub fn grid(&self) -> &PhenotypeGrid<T> {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn kernels(&self) -> &ModelKernels<T> {
        &self.kernels
    }

    /// Advances `state` by one time step; `step` only labels errors.
    pub fn step(
        &self,
        state: &mut CountState,
        rng: &mut RngStream,
        fields: &mut Fields<T>,
        step: usize,
    ) -> Result<()> {
        let lambda = self.params.lambda_c.as_f64();
        state.tumour = phenotype_move_step(&state.tumour, lambda, rng);
        let (mut c, mut t) = (Vec::new(), Vec::new());
        as_scalars(&state.tumour, &mut c);
        as_scalars(&state.ctl, &mut t);
        fields.evaluate(&self.kernels, &c, &t, FieldMode::Count);
        let fates = fate_probabilities_from_fields(state, &self.params, fields).map_err(|e| match e {
            ModelError::TimeStepTooLarge {
                population,
                which,
                site,
                value,
                ..
            } => ModelError::TimeStepTooLarge {
                population,
                which,
                site,
                step,
                value,
            },
            other => other,
        })?;
        state.tumour = birth_death_step(&state.tumour, &fates.tumour, rng);
        state.ctl = birth_death_step(&state.ctl, &fates.ctl, rng);
        Ok(())
    }

    pub fn run(&self, init: &CountState, seed: u64, snapshot_times: &[T]) -> Result<Trajectory<T>> {
        self.grid.check_len(init.n_sites())?;
        let n_steps = self.params.n_steps();
        let snaps = snapshot_steps(snapshot_times, self.params.tau, n_steps)?;
        let mut rng = RngStream::new(seed);
        let mut fields = Fields::zeros(self.grid.n_sites());
        let mut state = init.clone();
        let mut traj = Trajectory::with_capacity(self.params.tau, n_steps);
        let record = |traj: &mut Trajectory<T>, state: &CountState, h: usize| {
            traj.record(h, T::from_count(state.rho_c()), T::from_count(state.rho_t()));
            if snaps.binary_search(&h).is_ok() {
                let d = state.densities(&self.grid);
                traj.snapshots.push(Snapshot {
                    t: T::from_usize(h).unwrap() * self.params.tau,
                    tumour: d.tumour,
                    ctl: d.ctl,
                });
            }
        };
        record(&mut traj, &state, 0);
        for h in 1..=n_steps {
            self.step(&mut state, &mut rng, &mut fields, h)?;
            record(&mut traj, &state, h);
        }
        Ok(traj)
    }
}

/// Builds an engine and runs one seeded realisation from the initial profile.
pub fn run_ibm<T: Scalar>(
    params: &ModelParams<T>,
    grid: &PhenotypeGrid<T>,
    init: &InitialCondition<T>,
    seed: u64,
    snapshot_times: &[T],
) -> Result<Trajectory<T>> {
    let engine = IbmEngine::new(params.clone(), grid.clone())?;
    let start = initialize_counts(grid, init)?;
    engine.run(&start, seed, snapshot_times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mean_and_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    fn fig1a() -> ModelParams<f64> {
        let mut p = ModelParams::with_default_rates(3.5, 1.8, 1.8, 1.8);
        p.alpha_t = 0.5;
        p
    }

    #[test]
    fn initial_counts_from_profile() {
        let grid = PhenotypeGrid::new(1.0, 1500).unwrap();
        let flat = initialize_counts(&grid, &InitialCondition::homogeneous()).unwrap();
        assert!(flat.tumour.iter().all(|&n| n == 13));
        assert!(flat.ctl.iter().all(|&n| n == 27));

        // 1501 sites puts u = 0 on the lattice at index 750
        let grid = PhenotypeGrid::new(1.0, 1501).unwrap();
        let init = InitialCondition { amplitude: 1.0, wavenumber: 5.0 };
        let s = initialize_counts(&grid, &init).unwrap();
        assert_eq!(s.tumour[750], 27);
        // cos(5u) = -1 at u = π/5 is not a lattice point; the nearest site rounds to 0
        let i = ((std::f64::consts::PI / 5.0 + 1.0) / grid.step()).round() as usize;
        assert_eq!(s.tumour[i], 0);

        let bad = InitialCondition { amplitude: 1.2, wavenumber: 5.0 };
        assert!(initialize_counts(&grid, &bad).is_err());
    }

    #[test]
    fn zero_move_probability_is_identity() {
        let mut rng = RngStream::new(3);
        let counts = vec![5, 0, 17, 2, 9];
        assert_eq!(phenotype_move_step(&counts, 0.0, &mut rng), counts);
    }

    #[test]
    fn moves_off_the_lattice_are_aborted() {
        assert_eq!(cell_move_target(0, 5, 0.1, 0.01, 0.2), 0);
        assert_eq!(cell_move_target(4, 5, 0.1, 0.01, 0.7), 4);
        assert_eq!(cell_move_target(2, 5, 0.1, 0.01, 0.2), 1);
        assert_eq!(cell_move_target(2, 5, 0.1, 0.01, 0.7), 3);
        assert_eq!(cell_move_target(2, 5, 0.1, 0.5, 0.2), 2);

        let mut rng = RngStream::new(1);
        for _ in 0..100 {
            assert_eq!(phenotype_move_step(&[1], 1.0, &mut rng), vec![1]);
        }
    }

    #[test]
    fn move_expectation_on_three_sites() {
        let counts = [40u64, 25, 60];
        let lambda = 0.3;
        let mut rng = RngStream::new(11);
        let samples: Vec<f64> = (0..20_000)
            .map(|_| phenotype_move_step(&counts, lambda, &mut rng)[1] as f64)
            .collect();
        let (mean, se) = mean_and_se(&samples);
        let expected = lambda / 2.0 * (40.0 + 60.0) + (1.0 - lambda) * 25.0;
        assert!((mean - expected).abs() < 3.0 * se, "{mean} vs {expected} ± {se}");
    }

    #[test]
    fn binomial_moves_match_per_cell_moves() {
        let counts = [30u64, 0, 12, 50];
        let lambda = 0.4;
        let reps = 20_000;
        let mut rng = RngStream::new(5);
        let mut per_site_binomial = vec![Vec::new(); 4];
        let mut per_site_cell = vec![Vec::new(); 4];
        for _ in 0..reps {
            let out = phenotype_move_step(&counts, lambda, &mut rng);
            let mut cell = [0u64; 4];
            for (i, &n) in counts.iter().enumerate() {
                for _ in 0..n {
                    let (r1, r2) = (rng.uniform(), rng.uniform());
                    cell[cell_move_target(i, 4, lambda, r1, r2)] += 1;
                }
            }
            for i in 0..4 {
                per_site_binomial[i].push(out[i] as f64);
                per_site_cell[i].push(cell[i] as f64);
            }
        }
        for i in 0..4 {
            let (m1, s1) = mean_and_se(&per_site_binomial[i]);
            let (m2, s2) = mean_and_se(&per_site_cell[i]);
            assert!((m1 - m2).abs() < 3.0 * (s1 * s1 + s2 * s2).sqrt(), "site {i}");
        }
    }

    #[test]
    fn per_cell_fate_thresholds() {
        let p = FateProbabilities::new(0.2f64, 0.1);
        assert_eq!(cell_fate(&p, 0.05), Fate::Death);
        assert_eq!(cell_fate(&p, 0.1), Fate::Division);
        assert_eq!(cell_fate(&p, 0.29), Fate::Division);
        assert_eq!(cell_fate(&p, 0.31), Fate::Quiescence);
    }

    #[test]
    fn certain_fates() {
        let mut rng = RngStream::new(2);
        let die = [FateProbabilities::new(0.0f64, 1.0); 3];
        assert_eq!(birth_death_step(&[4, 9, 0], &die, &mut rng), vec![0, 0, 0]);
        let divide = [FateProbabilities::new(1.0f64, 0.0); 3];
        assert_eq!(birth_death_step(&[4, 9, 0], &divide, &mut rng), vec![8, 18, 0]);
    }

    #[test]
    fn single_site_growth_expectation() {
        let p = [FateProbabilities::new(0.12f64, 0.07)];
        let n = 40u64;
        let mut rng = RngStream::new(9);
        let samples: Vec<f64> = (0..100_000)
            .map(|_| birth_death_step(&[n], &p, &mut rng)[0] as f64)
            .collect();
        let (mean, se) = mean_and_se(&samples);
        let expected = (1.0 + 0.12 - 0.07) * n as f64;
        assert!((mean - expected).abs() < 3.0 * se, "{mean} vs {expected} ± {se}");
    }

    #[test]
    fn fate_probabilities_examples() {
        let grid = PhenotypeGrid::new(1.0, 1500).unwrap();
        let p = ModelParams::with_default_rates(2.0f64, 1.8, 1.8, 1.8);
        let kernels = ModelKernels::new(&grid, 1.8, 1.8, 1.8).unwrap();

        let empty = CountState::new(vec![0; 1500], vec![0; 1500]).unwrap();
        let f = fate_probabilities(&empty, &p, &kernels).unwrap();
        for (c, t) in f.tumour.iter().zip(&f.ctl) {
            assert!((c.birth - 0.075).abs() < 1e-15);
            assert_eq!(c.death, 0.0);
            assert_eq!(t.death, 0.0);
            assert!((t.birth - 0.05 * p.alpha_t).abs() < 1e-15);
        }

        let grid = PhenotypeGrid::new(1.0, 201).unwrap();
        let p = ModelParams::with_default_rates(1.0f64, 2.0, 2.0, 2.0);
        let kernels = ModelKernels::new(&grid, 2.0, 2.0, 2.0).unwrap();
        let mut tumour = vec![0; 201];
        let mut ctl = vec![0; 201];
        tumour[100] = 1;
        ctl[100] = 1;
        let one = CountState::new(tumour, ctl).unwrap();
        let f = fate_probabilities(&one, &p, &kernels).unwrap();
        assert!((f.tumour[100].death - 1.625e-7).abs() < 1e-20);
    }

    #[test]
    fn oversized_time_step_is_reported() {
        let grid = PhenotypeGrid::new(1.0, 11).unwrap();
        let mut p = ModelParams::with_default_rates(2.0f64, 1.8, 1.8, 1.8);
        p.tau = 0.9;
        let engine = IbmEngine::new(p, grid).unwrap();
        let start = CountState::new(vec![5; 11], vec![5; 11]).unwrap();
        match engine.run(&start, 1, &[]) {
            Err(ModelError::TimeStepTooLarge { population, which, step, .. }) => {
                assert_eq!(population, Population::Tumour);
                assert_eq!(which, "birth");
                assert_eq!(step, 1);
            }
            other => panic!("expected time-step error, got {other:?}"),
        }
    }

    #[test]
    fn frozen_system_keeps_totals() {
        let grid = PhenotypeGrid::new(1.0, 50).unwrap();
        let mut p = ModelParams::with_default_rates(0.0, 0.5, 0.5, 0.5);
        p.alpha_c = 0.0;
        p.alpha_t = 0.0;
        p.mu_c = 0.0;
        p.mu_t = 0.0;
        p.lambda_c = 0.0;
        p.t_final = 2.0;
        let engine = IbmEngine::new(p, grid).unwrap();
        let start = CountState::new((0..50).collect(), vec![3; 50]).unwrap();
        let traj = engine.run(&start, 4, &[]).unwrap();
        assert!(traj.rho_c.iter().all(|&r| r == start.rho_c() as f64));
        assert!(traj.rho_t.iter().all(|&r| r == start.rho_t() as f64));
        assert_eq!(traj.terminal, crate::trajectory::Terminal::Completed);
    }

    #[test]
    fn same_seed_same_trajectory() {
        let grid = PhenotypeGrid::new(1.0, 300).unwrap();
        let mut p = fig1a();
        p.t_final = 3.0;
        let init = InitialCondition { amplitude: 1.0, wavenumber: 5.0 };
        let a = run_ibm(&p, &grid, &init, 42, &[1.0, 3.0]).unwrap();
        let b = run_ibm(&p, &grid, &init, 42, &[1.0, 3.0]).unwrap();
        assert_eq!(a.rho_c, b.rho_c);
        assert_eq!(a.rho_t, b.rho_t);
        assert_eq!(a.snapshots, b.snapshots);
        let c = run_ibm(&p, &grid, &init, 43, &[1.0, 3.0]).unwrap();
        assert_ne!(a.rho_c, c.rho_c);
    }

    proptest! {
        #[test]
        fn moves_conserve_cells(
            counts in prop::collection::vec(0u64..200, 1..40),
            lambda in 0.0f64..=1.0,
            seed in any::<u64>(),
        ) {
            let mut rng = RngStream::new(seed);
            let out = phenotype_move_step(&counts, lambda, &mut rng);
            prop_assert_eq!(out.iter().sum::<u64>(), counts.iter().sum::<u64>());
        }

        #[test]
        fn fate_probabilities_close(
            tumour in prop::collection::vec(0u64..40, 20),
            ctl in prop::collection::vec(0u64..40, 20),
            gamma in 0.1f64..3.5,
            eta in 0.1f64..2.0,
            theta in 0.1f64..2.0,
        ) {
            let grid = PhenotypeGrid::new(1.0, 20).unwrap();
            let p = ModelParams::with_default_rates(gamma, eta, theta, theta);
            let kernels = ModelKernels::new(&grid, theta, theta, eta).unwrap();
            let state = CountState::new(tumour, ctl).unwrap();
            let f = fate_probabilities(&state, &p, &kernels).unwrap();
            for q in f.tumour.iter().chain(&f.ctl) {
                prop_assert_eq!(q.birth + q.death + q.quiescent, 1.0);
                prop_assert!(q.birth >= 0.0 && q.death >= 0.0 && q.quiescent >= 0.0);
            }
        }
    }
}
