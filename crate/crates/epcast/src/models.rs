//! Compartmental infection models on contact networks.
//!
//! The solver integrates the degree-adjusted SIR/SIS equations
//!
//! ```text
//! dS/dt = -beta * S * I            (SIS adds  + gamma * I)
//! dI/dt =  beta * S * I - gamma * I
//! dR/dt =  gamma * I               (SIS: identically 0)
//! ```
//!
//! where `beta = infectivity * mean_degree / N` maps a per-contact,
//! per-round transmission probability onto the mass-action rate. A raw-rate
//! mode bypasses that mapping for classical textbook parameterisations.
//! Time is measured in protocol rounds throughout.

use serde::{Deserialize, Serialize};
use std::io::{self, Write};
use thiserror::Error;

/// Default integration step (in rounds) used by the tuner and CLI.
pub const DEFAULT_STEP: f64 = 0.1;

/// Negative values closer to zero than this are treated as floating-point
/// noise and clamped; anything more negative means the integration diverged.
const NEGATIVITY_GUARD: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("state became non-finite or diverged at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("query time {t} lies outside the solved horizon [0, {horizon}]")]
    OutOfHorizon { t: f64, horizon: f64 },
}

/// Which compartment an evicted host lands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Removal is absorbing: hosts that drop a message never take it again.
    Sir,
    /// Removal returns hosts to the susceptible pool.
    Sis,
}

/// Parameters of one model instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpidemicParams {
    /// Total host count N (>= 2).
    pub population_n: u32,
    /// Per-contact, per-round transmission probability in [0, 1]. In raw
    /// mode this field carries the mass-action rate directly.
    pub infectivity: f64,
    /// Per-round removal rate gamma (>= 0).
    pub removal_rate: f64,
    /// Average contacts per host per round, in [0, N - 1]. Ignored in raw
    /// mode.
    pub mean_degree: f64,
    pub kind: ModelKind,
    /// When set, `infectivity` is used as the rate `beta` without the
    /// `mean_degree / N` adjustment.
    pub raw_rate: bool,
}

impl EpidemicParams {
    /// Degree-adjusted parameterisation: `beta = infectivity * k / N`.
    pub fn degree_adjusted(
        population_n: u32,
        infectivity: f64,
        removal_rate: f64,
        mean_degree: f64,
        kind: ModelKind,
    ) -> Self {
        EpidemicParams {
            population_n,
            infectivity,
            removal_rate,
            mean_degree,
            kind,
            raw_rate: false,
        }
    }

    /// Classical parameterisation with an explicit rate `beta`.
    pub fn raw_rate(population_n: u32, beta: f64, removal_rate: f64, kind: ModelKind) -> Self {
        EpidemicParams {
            population_n,
            infectivity: beta,
            removal_rate,
            mean_degree: 0.0,
            kind,
            raw_rate: true,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.population_n;
        if n < 2 {
            return Err(ModelError::InvalidParams(format!(
                "population_n must be >= 2, got {n}"
            )));
        }
        if !(0.0..=1.0).contains(&self.infectivity) || !self.infectivity.is_finite() {
            return Err(ModelError::InvalidParams(format!(
                "infectivity must lie in [0, 1], got {}",
                self.infectivity
            )));
        }
        if self.removal_rate < 0.0 || !self.removal_rate.is_finite() {
            return Err(ModelError::InvalidParams(format!(
                "removal_rate must be >= 0, got {}",
                self.removal_rate
            )));
        }
        if !self.raw_rate {
            let max_k = (n - 1) as f64;
            if !(0.0..=max_k).contains(&self.mean_degree) || !self.mean_degree.is_finite() {
                return Err(ModelError::InvalidParams(format!(
                    "mean_degree must lie in [0, {max_k}], got {}",
                    self.mean_degree
                )));
            }
        }
        Ok(())
    }

    /// Effective mass-action rate.
    #[must_use]
    pub fn beta(&self) -> f64 {
        if self.raw_rate {
            self.infectivity
        } else {
            self.infectivity * self.mean_degree / self.population_n as f64
        }
    }
}

/// One integration sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub s: f64,
    pub i: f64,
    pub r: f64,
}

/// Solved trajectory: samples at `t = 0, step, 2*step, ..., horizon` (the
/// last interval is shortened when the horizon is not a step multiple).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    step: f64,
    population_n: u32,
    kind: ModelKind,
    samples: Vec<Sample>,
}

impl Trajectory {
    #[must_use]
    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    #[must_use]
    pub fn step(&self) -> f64 {
        self.step
    }

    #[must_use]
    pub fn population_n(&self) -> u32 {
        self.population_n
    }

    #[must_use]
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    #[must_use]
    pub fn horizon(&self) -> f64 {
        self.samples.last().map(|s| s.t).unwrap_or(0.0)
    }

    /// State at time `t`, linearly interpolated between samples.
    pub fn state_at(&self, t: f64) -> Result<Sample, ModelError> {
        let horizon = self.horizon();
        if !t.is_finite() || t < 0.0 || t > horizon + 1e-9 {
            return Err(ModelError::OutOfHorizon { t, horizon });
        }
        let t = t.min(horizon);
        // First sample strictly past t; its predecessor starts the segment.
        let hi = self.samples.partition_point(|s| s.t <= t);
        if hi == 0 {
            return Ok(self.samples[0]);
        }
        if hi == self.samples.len() {
            return Ok(*self.samples.last().unwrap());
        }
        let (a, b) = (self.samples[hi - 1], self.samples[hi]);
        let w = if b.t > a.t { (t - a.t) / (b.t - a.t) } else { 0.0 };
        Ok(Sample {
            t,
            s: a.s + w * (b.s - a.s),
            i: a.i + w * (b.i - a.i),
            r: a.r + w * (b.r - a.r),
        })
    }

    /// Fraction of hosts that have held the message by time `t`: (I + R) / N.
    pub fn reached_fraction(&self, t: f64) -> Result<f64, ModelError> {
        let st = self.state_at(t)?;
        Ok(((st.i + st.r) / self.population_n as f64).clamp(0.0, 1.0))
    }

    /// Expected copy-rounds up to `t_end`: the trapezoidal integral of I(t),
    /// i.e. the model-side prediction of how many per-round transmissions a
    /// message generates before `t_end`.
    pub fn analytic_replica_count(&self, t_end: f64) -> Result<f64, ModelError> {
        let end = self.state_at(t_end)?; // validates the range
        let mut area = 0.0;
        let mut prev: Option<Sample> = None;
        for s in &self.samples {
            if s.t > end.t {
                break;
            }
            if let Some(p) = prev {
                area += 0.5 * (p.i + s.i) * (s.t - p.t);
            }
            prev = Some(*s);
        }
        if let Some(p) = prev {
            if end.t > p.t {
                area += 0.5 * (p.i + end.i) * (end.t - p.t);
            }
        }
        Ok(area)
    }
}

fn derivatives(kind: ModelKind, beta: f64, gamma: f64, s: f64, i: f64) -> (f64, f64, f64) {
    let new_infections = beta * s * i;
    let removals = gamma * i;
    match kind {
        ModelKind::Sir => (-new_infections, new_infections - removals, removals),
        ModelKind::Sis => (-new_infections + removals, new_infections - removals, 0.0),
    }
}

/// Integrates the model with classical fixed-step RK4 from the single-seed
/// initial condition `S(0) = N - 1, I(0) = 1, R(0) = 0`.
pub fn solve(params: &EpidemicParams, horizon: f64, step: f64) -> Result<Trajectory, ModelError> {
    params.validate()?;
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(ModelError::InvalidParams(format!(
            "horizon must be > 0, got {horizon}"
        )));
    }
    if !(step > 0.0) || step > horizon {
        return Err(ModelError::InvalidParams(format!(
            "step must lie in (0, horizon], got {step}"
        )));
    }

    let n = params.population_n as f64;
    let beta = params.beta();
    let gamma = params.removal_rate;
    let kind = params.kind;

    let (mut s, mut i, mut r) = (n - 1.0, 1.0, 0.0);
    let mut t = 0.0;
    let mut samples = vec![Sample { t, s, i, r }];

    while t < horizon - 1e-12 {
        let h = step.min(horizon - t);
        let (k1s, k1i, k1r) = derivatives(kind, beta, gamma, s, i);
        let (k2s, k2i, k2r) =
            derivatives(kind, beta, gamma, s + 0.5 * h * k1s, i + 0.5 * h * k1i);
        let (k3s, k3i, k3r) =
            derivatives(kind, beta, gamma, s + 0.5 * h * k2s, i + 0.5 * h * k2i);
        let (k4s, k4i, k4r) = derivatives(kind, beta, gamma, s + h * k3s, i + h * k3i);

        s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        i += h / 6.0 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i);
        r += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        t += h;

        for v in [&mut s, &mut i, &mut r] {
            if !v.is_finite() || *v < -NEGATIVITY_GUARD {
                return Err(ModelError::NonFiniteState { t });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        samples.push(Sample { t, s, i, r });
    }

    Ok(Trajectory {
        step,
        population_n: params.population_n,
        kind,
        samples,
    })
}

/// Writes a trajectory as `t,s,i,r` CSV rows after a header line.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, w: &mut W) -> io::Result<()> {
    writeln!(w, "t,s,i,r")?;
    for s in traj.samples() {
        writeln!(w, "{},{},{},{}", s.t, s.s, s.i, s.r)?;
    }
    Ok(())
}
