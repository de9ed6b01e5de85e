//! Rydberg atom-array programs and a small state-vector simulator.
//!
//! Units: positions in μm, times in μs, frequencies in rad/μs, `C6` in
//! rad·μm⁶/μs.

mod evolve;

pub use evolve::{evolve, evolve_from, measure, EvolveOptions, QuantumState, RydbergSampler, RydbergConfig};

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::generate::{distance, within};
use crate::graph::Graph;

/// Van der Waals coefficient of the 70S Rydberg state used by QuEra's Aquila
/// device (5.42e-24 rad·m⁶/s), converted to rad·μm⁶/μs.
pub const AQUILA_C6: f64 = 5.42e6;

/// Smallest allowed distance between two atoms, μm.
pub const MIN_ATOM_SEPARATION: f64 = 4.0;

/// Maximum Rabi frequency, 2π × 2.5 MHz.
pub const DEFAULT_OMEGA_MAX: f64 = 2.0 * PI * 2.5;

/// Total sweep time, μs.
pub const DEFAULT_DURATION: f64 = 4.0;

/// Fraction of the sweep spent ramping Ω up (and again down).
pub const RAMP_FRACTION: f64 = 0.15;

/// `(C6 / Ω_max)^(1/6)`
pub fn blockade_radius(c6: f64, omega_max: f64) -> f64 {
    (c6 / omega_max).powf(1.0 / 6.0)
}

/// Piecewise-linear drive: Rabi frequency, detuning and phase at knots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    times: Vec<f64>,
    omega: Vec<f64>,
    delta: Vec<f64>,
    phi: Vec<f64>,
}

impl Schedule {
    /// Knot times must start at 0 and increase strictly; Ω must be
    /// non-negative.
    pub fn new(times: Vec<f64>, omega: Vec<f64>, delta: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        let n = times.len();
        if n == 0 || omega.len() != n || delta.len() != n || phi.len() != n {
            return Err(Error::InvalidParameter("schedule needs equally long, non-empty knot lists".into()));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidParameter("schedule must start at t = 0".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("knot times must increase strictly".into()));
        }
        let all = times.iter().chain(&omega).chain(&delta).chain(&phi);
        if all.clone().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("schedule values must be finite".into()));
        }
        if omega.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidParameter("Rabi frequency must be non-negative".into()));
        }
        Ok(Schedule { times, omega, delta, phi })
    }

    /// Constant drive over `[0, duration]`.
    pub fn constant(duration: f64, omega: f64, delta: f64, phi: f64) -> Result<Self> {
        if duration == 0.0 {
            return Schedule::new(vec![0.0], vec![omega], vec![delta], vec![phi]);
        }
        Schedule::new(vec![0.0, duration], vec![omega; 2], vec![delta; 2], vec![phi; 2])
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().expect("non-empty schedule")
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn omega_max(&self) -> f64 {
        self.omega.iter().copied().fold(0.0, f64::max)
    }

    /// `(Ω, Δ, φ)` at time `t`, clamped to the schedule's span.
    pub fn at(&self, t: f64) -> (f64, f64, f64) {
        let k = self.times.partition_point(|&x| x <= t);
        if k == 0 {
            return (self.omega[0], self.delta[0], self.phi[0]);
        }
        if k == self.times.len() {
            let last = k - 1;
            return (self.omega[last], self.delta[last], self.phi[last]);
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let s = (t - t0) / (t1 - t0);
        let lerp = |v: &[f64]| v[k - 1] + s * (v[k] - v[k - 1]);
        (lerp(&self.omega), lerp(&self.delta), lerp(&self.phi))
    }

    /// Hardware schedules switch the drive on and off: Ω(0) = Ω(τ_f) = 0.
    pub fn check_endpoints(&self) -> Result<()> {
        if self.omega[0] != 0.0 || *self.omega.last().unwrap() != 0.0 {
            return Err(Error::InvalidParameter("Rabi frequency must vanish at both ends".into()));
        }
        Ok(())
    }
}

/// Trapezoidal Ω (ramps over 15% of the duration at each end), a linear
/// detuning sweep and zero phase.
pub fn default_schedule(omega_max: f64, delta_initial: f64, delta_final: f64, tau_f: f64) -> Result<Schedule> {
    if !(delta_initial < 0.0 && delta_final > 0.0) {
        return Err(Error::InvalidParameter("detuning must sweep from negative to positive".into()));
    }
    if !(tau_f > 0.0 && omega_max > 0.0) {
        return Err(Error::InvalidParameter("duration and Rabi frequency must be positive".into()));
    }
    let times = vec![0.0, RAMP_FRACTION * tau_f, (1.0 - RAMP_FRACTION) * tau_f, tau_f];
    let delta = times
        .iter()
        .map(|t| delta_initial + (delta_final - delta_initial) * t / tau_f)
        .collect();
    Schedule::new(times, vec![0.0, omega_max, omega_max, 0.0], delta, vec![0.0; 4])
}

/// Atom positions plus drive.
#[derive(Clone, Debug, PartialEq)]
pub struct AhsProgram {
    sites: Vec<[f64; 2]>,
    schedule: Schedule,
    c6: f64,
}

impl AhsProgram {
    pub fn new(sites: Vec<[f64; 2]>, schedule: Schedule, c6: f64) -> Result<Self> {
        if !(c6 > 0.0) {
            return Err(Error::InvalidParameter("C6 must be positive".into()));
        }
        for i in 0..sites.len() {
            for j in i + 1..sites.len() {
                let d = distance(sites[i], sites[j]);
                if d < MIN_ATOM_SEPARATION * (1.0 - crate::graph::DISTANCE_RTOL) {
                    return Err(Error::InvalidParameter(format!(
                        "atoms {i} and {j} are {d:.3} μm apart; minimum is {MIN_ATOM_SEPARATION} μm"
                    )));
                }
            }
        }
        Ok(AhsProgram { sites, schedule, c6 })
    }

    /// Register taken from the graph's coordinates.
    pub fn for_graph(graph: &Graph, schedule: Schedule, c6: f64) -> Result<Self> {
        let coords = graph
            .coords()
            .ok_or_else(|| Error::InvalidParameter("graph has no atom coordinates".into()))?;
        AhsProgram::new(coords.to_vec(), schedule, c6)
    }

    pub fn sites(&self) -> &[[f64; 2]] {
        &self.sites
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn c6(&self) -> f64 {
        self.c6
    }

    pub fn atom_count(&self) -> usize {
        self.sites.len()
    }

    pub fn interaction(&self, i: usize, j: usize) -> f64 {
        self.c6 / distance(self.sites[i], self.sites[j]).powi(6)
    }

    pub fn blockade_radius(&self) -> f64 {
        blockade_radius(self.c6, self.schedule.omega_max())
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ProgramDoc {
            register: RegisterDoc { sites: self.sites.clone() },
            schedule: self.schedule.clone(),
            c6: self.c6,
        };
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ProgramDoc = serde_json::from_str(text)?;
        let s = doc.schedule;
        let schedule = Schedule::new(s.times, s.omega, s.delta, s.phi)?;
        AhsProgram::new(doc.register.sites, schedule, doc.c6)
    }
}

#[derive(Serialize, Deserialize)]
struct RegisterDoc {
    sites: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct ProgramDoc {
    register: RegisterDoc,
    schedule: Schedule,
    c6: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegisterDiagnostics {
    pub blockade_radius: f64,
    pub ratio: f64,
    /// `√2 ≤ R_b / a < 2`
    pub union_jack_regime: bool,
    pub message: String,
    /// Atom pairs within the blockade radius.
    pub blockaded_pairs: Vec<(usize, usize)>,
    /// Graph edges the blockade does not enforce.
    pub missing_edges: Vec<(usize, usize)>,
    /// Blockaded pairs that are not graph edges.
    pub extra_edges: Vec<(usize, usize)>,
}

impl RegisterDiagnostics {
    pub fn ok(&self) -> bool {
        self.union_jack_regime && self.missing_edges.is_empty() && self.extra_edges.is_empty()
    }
}

/// Checks the blockade radius against the lattice spacing and, when given,
/// the intended graph.
pub fn validate_register(program: &AhsProgram, spacing: f64, graph: Option<&Graph>) -> RegisterDiagnostics {
    let rb = program.blockade_radius();
    let ratio = rb / spacing;
    let union_jack_regime = ratio >= SQRT_2 * (1.0 - crate::graph::DISTANCE_RTOL) && ratio < 2.0;
    let n = program.atom_count();
    let blockaded_pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| within(distance(program.sites[i], program.sites[j]), rb))
        .collect();
    let (missing_edges, extra_edges) = match graph {
        Some(g) => (
            g.edges().iter().copied().filter(|e| blockaded_pairs.binary_search(e).is_err()).collect(),
            blockaded_pairs.iter().copied().filter(|&(i, j)| !g.has_edge(i, j)).collect(),
        ),
        None => (Vec::new(), Vec::new()),
    };
    let message = if union_jack_regime {
        format!("R_b/a = {ratio:.3} lies in [√2, 2)")
    } else if ratio < SQRT_2 {
        format!("R_b/a = {ratio:.3} is below √2: diagonal neighbours are not blockaded")
    } else {
        format!("R_b/a = {ratio:.3} is at least 2: next-nearest lattice sites are blockaded")
    };
    RegisterDiagnostics {
        blockade_radius: rb,
        ratio,
        union_jack_regime,
        message,
        blockaded_pairs,
        missing_edges,
        extra_edges,
    }
}
