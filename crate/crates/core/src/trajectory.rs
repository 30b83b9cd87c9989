use crate::error::{ModelError, Result};
use crate::scalar::Scalar;

/// How a run ended. Extinction is absorbing; the run still reaches `t_f`
/// so the surviving population's trajectory is recorded, and the step of the
/// first extinction is kept here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    Completed,
    TumourExtinct { step: usize },
    CtlExtinct { step: usize },
}

/// Phenotype densities at one recorded time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub t: T,
    pub tumour: Vec<T>,
    pub ctl: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeDiagnostics<T> {
    /// `β_C Δt / Δx²`.
    pub cfl: T,
    /// Smallest density seen over the whole run.
    pub min_density: T,
}

/// Time series recorded by either engine, one entry per time step
/// including the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub tau: T,
    pub times: Vec<T>,
    pub rho_c: Vec<T>,
    pub rho_t: Vec<T>,
    /// `ρ_T / ρ_C`; `+∞` once the tumour is extinct.
    pub immune_score: Vec<T>,
    pub snapshots: Vec<Snapshot<T>>,
    pub terminal: Terminal,
    pub diagnostics: Option<PdeDiagnostics<T>>,
}

impl<T: Scalar> Trajectory<T> {
    pub(crate) fn with_capacity(tau: T, steps: usize) -> Self {
        Self {
            tau,
            times: Vec::with_capacity(steps + 1),
            rho_c: Vec::with_capacity(steps + 1),
            rho_t: Vec::with_capacity(steps + 1),
            immune_score: Vec::with_capacity(steps + 1),
            snapshots: Vec::new(),
            terminal: Terminal::Completed,
            diagnostics: None,
        }
    }

    pub(crate) fn record(&mut self, step: usize, rho_c: T, rho_t: T) {
        self.times.push(T::from_usize(step).unwrap() * self.tau);
        self.rho_c.push(rho_c);
        self.rho_t.push(rho_t);
        self.immune_score.push(if rho_c > T::zero() {
            rho_t / rho_c
        } else {
            T::infinity()
        });
        if self.terminal == Terminal::Completed {
            if rho_c == T::zero() {
                self.terminal = Terminal::TumourExtinct { step };
            } else if rho_t == T::zero() {
                self.terminal = Terminal::CtlExtinct { step };
            }
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_rho_c(&self) -> T {
        *self.rho_c.last().expect("non-empty trajectory")
    }

    pub fn final_rho_t(&self) -> T {
        *self.rho_t.last().expect("non-empty trajectory")
    }

    pub fn tumour_extinct(&self) -> bool {
        matches!(self.terminal, Terminal::TumourExtinct { .. })
    }

    /// Time-averaged immune score `(τ / t_elapsed) Σ_h I_h` over steps
    /// `h ≥ 1`. After tumour extinction the sum stops and `t_elapsed` is the
    /// extinction time.
    pub fn mean_immune_score(&self) -> Result<T> {
        if self.len() < 2 {
            return Err(ModelError::Domain(
                "immune score needs at least one completed step".into(),
            ));
        }
        let last = match self.terminal {
            Terminal::TumourExtinct { step } => step,
            _ => self.len() - 1,
        };
        if last == 0 {
            return Err(ModelError::Domain("tumour extinct at t = 0".into()));
        }
        let sum: T = self.immune_score[1..=last]
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .sum();
        Ok(sum / T::from_usize(last).unwrap())
    }

    pub fn snapshot_at(&self, t: T) -> Option<&Snapshot<T>> {
        let half = self.tau / T::lit(2.0);
        self.snapshots.iter().find(|s| (s.t - t).abs() < half)
    }
}

/// Maps requested snapshot times onto step indices `round(t / τ)`.
pub(crate) fn snapshot_steps<T: Scalar>(times: &[T], tau: T, n_steps: usize) -> Result<Vec<usize>> {
    let mut steps = Vec::with_capacity(times.len());
    for &t in times {
        let s = (t / tau).round();
        if !(s >= T::zero()) || s.to_usize().is_none_or(|s| s > n_steps) {
            return Err(ModelError::Config(format!(
                "snapshot time {t} outside the simulated horizon"
            )));
        }
        steps.push(s.to_usize().unwrap());
    }
    steps.sort_unstable();
    steps.dedup();
    Ok(steps)
}
