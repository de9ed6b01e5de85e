//! Time evolution under `H = Ω/2 Σ (e^{iφ}|0⟩⟨1| + h.c.) − Δ Σ n_i + Σ V_ij n_i n_j`.
//!
//! The drive is a sum of commuting single-atom terms and the rest is diagonal,
//! so both halves exponentiate exactly. A symmetric (Strang) split evaluated
//! at sub-step midpoints, lifted to fourth order by Yoshida's triple jump,
//! gives a unitary fixed-step scheme. The step count doubles until two
//! successive runs agree on every basis probability.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{default_schedule, AhsProgram, Schedule, AQUILA_C6, DEFAULT_DURATION, DEFAULT_OMEGA_MAX};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::stream_rng;
use crate::sampling::{SampleSet, Sampler};

/// Default register size cap.
pub const DEFAULT_ATOM_LIMIT: usize = 16;
/// Hard cap; 2^20 amplitudes take 16 MiB.
pub const MAX_ATOM_LIMIT: usize = 20;

const NORM_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    atoms: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// All atoms in |0⟩.
    pub fn ground(atoms: usize) -> Self {
        QuantumState::basis(atoms, 0)
    }

    /// Basis state with atom `i` excited iff bit `i` of `index` is set.
    pub fn basis(atoms: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << atoms];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        QuantumState { atoms, amplitudes }
    }

    pub fn from_amplitudes(atoms: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1 << atoms {
            return Err(Error::LengthMismatch { expected: 1 << atoms, actual: amplitudes.len() });
        }
        Ok(QuantumState { atoms, amplitudes })
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }

    /// Probability of the basis state whose excited atoms are `excited`.
    pub fn probability_of(&self, excited: &[usize]) -> f64 {
        let index = excited.iter().fold(0usize, |acc, &i| acc | 1 << i);
        self.amplitudes[index].norm_sqr()
    }

    /// `⟨n_i⟩` for every atom.
    pub fn occupations(&self) -> Vec<f64> {
        let mut occ = vec![0.0; self.atoms];
        for (b, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            for (i, o) in occ.iter_mut().enumerate() {
                if b >> i & 1 == 1 {
                    *o += p;
                }
            }
        }
        occ
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolveOptions {
    pub atom_limit: usize,
    /// Largest accepted change of any basis probability when the step is halved.
    pub tolerance: f64,
    pub initial_steps: usize,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { atom_limit: DEFAULT_ATOM_LIMIT, tolerance: 1e-7, initial_steps: 64, max_steps: 1 << 18 }
    }
}

struct Propagator<'a> {
    atoms: usize,
    schedule: &'a Schedule,
    excitations: Vec<u32>,
    interaction: Vec<f64>,
}

const YOSHIDA_OUTER: f64 = 1.351_207_191_959_657_6; // 1 / (2 - 2^(1/3))
const YOSHIDA_INNER: f64 = -1.702_414_383_919_315_3; // -2^(1/3) / (2 - 2^(1/3))

impl<'a> Propagator<'a> {
    fn new(program: &'a AhsProgram) -> Self {
        let n = program.atom_count();
        let mut pair = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                pair[i][j] = program.interaction(i, j);
            }
        }
        let dim = 1usize << n;
        let mut interaction = vec![0.0; dim];
        for b in 1..dim {
            // Adding the highest excited atom to the configuration without it.
            let top = usize::BITS - 1 - b.leading_zeros();
            let rest = b & !(1 << top);
            let mut v = interaction[rest];
            let mut scan = rest;
            while scan != 0 {
                let i = scan.trailing_zeros() as usize;
                scan &= scan - 1;
                v += pair[i][top as usize];
            }
            interaction[b] = v;
        }
        let excitations = (0..dim).map(|b| b.count_ones()).collect();
        Propagator { atoms: n, schedule: program.schedule(), excitations, interaction }
    }

    fn run(&self, initial: &QuantumState, steps: usize) -> QuantumState {
        let mut psi = initial.amplitudes.clone();
        let duration = self.schedule.duration();
        if duration == 0.0 || self.atoms == 0 {
            return QuantumState { atoms: self.atoms, amplitudes: psi };
        }
        let h = duration / steps as f64;
        let outer = self.phase_table(YOSHIDA_OUTER * h / 2.0);
        let inner = self.phase_table(YOSHIDA_INNER * h / 2.0);
        for k in 0..steps {
            let t = k as f64 * h;
            let t2 = t + YOSHIDA_OUTER * h;
            let t3 = t2 + YOSHIDA_INNER * h;
            self.strang(&mut psi, t, YOSHIDA_OUTER * h, &outer);
            self.strang(&mut psi, t2, YOSHIDA_INNER * h, &inner);
            self.strang(&mut psi, t3, YOSHIDA_OUTER * h, &outer);
        }
        QuantumState { atoms: self.atoms, amplitudes: psi }
    }

    /// `exp(-i V_b τ)` for every basis state.
    fn phase_table(&self, tau: f64) -> Vec<Complex64> {
        self.interaction.iter().map(|&v| Complex64::from_polar(1.0, -v * tau)).collect()
    }

    fn strang(&self, psi: &mut [Complex64], t0: f64, h: f64, interaction_phase: &[Complex64]) {
        let (omega, delta, phi) = self.schedule.at(t0 + h / 2.0);
        let detuning_phase: Vec<Complex64> = (0..=self.atoms)
            .map(|c| Complex64::from_polar(1.0, delta * c as f64 * h / 2.0))
            .collect();
        self.diagonal(psi, interaction_phase, &detuning_phase);
        self.drive(psi, omega * h / 2.0, phi);
        self.diagonal(psi, interaction_phase, &detuning_phase);
    }

    fn diagonal(&self, psi: &mut [Complex64], interaction_phase: &[Complex64], detuning_phase: &[Complex64]) {
        for ((a, &v), &c) in psi.iter_mut().zip(interaction_phase).zip(&self.excitations) {
            *a *= v * detuning_phase[c as usize];
        }
    }

    fn drive(&self, psi: &mut [Complex64], theta: f64, phi: f64) {
        if theta == 0.0 {
            return;
        }
        let c = Complex64::new(theta.cos(), 0.0);
        let s = theta.sin();
        let lower = Complex64::new(0.0, -s) * Complex64::from_polar(1.0, phi);
        let raise = Complex64::new(0.0, -s) * Complex64::from_polar(1.0, -phi);
        for q in 0..self.atoms {
            let mask = 1usize << q;
            for b in 0..psi.len() {
                if b & mask == 0 {
                    let a0 = psi[b];
                    let a1 = psi[b | mask];
                    psi[b] = c * a0 + lower * a1;
                    psi[b | mask] = c * a1 + raise * a0;
                }
            }
        }
    }
}

/// Evolves the all-ground state through `program`.
pub fn evolve(program: &AhsProgram, options: &EvolveOptions) -> Result<QuantumState> {
    evolve_from(program, &QuantumState::ground(program.atom_count()), options)
}

pub fn evolve_from(program: &AhsProgram, initial: &QuantumState, options: &EvolveOptions) -> Result<QuantumState> {
    let n = program.atom_count();
    let limit = options.atom_limit.min(MAX_ATOM_LIMIT);
    if n > limit {
        return Err(Error::LimitExceeded { what: "simulated atoms", actual: n, limit });
    }
    if initial.atoms != n {
        return Err(Error::LengthMismatch { expected: n, actual: initial.atoms });
    }
    let norm0 = initial.norm_sqr();
    if (norm0 - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::InvalidParameter("initial state is not normalized".into()));
    }
    let propagator = Propagator::new(program);
    let mut steps = options.initial_steps.max(1);
    let mut coarse = propagator.run(initial, steps);
    loop {
        if steps * 2 > options.max_steps {
            return Err(Error::Integrator(format!(
                "no convergence to {} within {} steps",
                options.tolerance, options.max_steps
            )));
        }
        steps *= 2;
        let fine = propagator.run(initial, steps);
        let change = coarse
            .amplitudes
            .iter()
            .zip(&fine.amplitudes)
            .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
            .fold(0.0, f64::max);
        if change < options.tolerance {
            let drift = (fine.norm_sqr() - norm0).abs();
            if drift >= NORM_TOLERANCE {
                return Err(Error::Integrator(format!("norm drift {drift:e}")));
            }
            return Ok(fine);
        }
        coarse = fine;
    }
}

/// Born-rule sampling of computational-basis outcomes, each repaired against
/// `graph` (whose vertex `i` is atom `i`).
pub fn measure(state: &QuantumState, graph: &Graph, n_shots: usize, seed: u64) -> Result<SampleSet> {
    if graph.vertex_count() != state.atoms {
        return Err(Error::LengthMismatch { expected: state.atoms, actual: graph.vertex_count() });
    }
    let mut cumulative = Vec::with_capacity(state.amplitudes.len());
    let mut total = 0.0;
    for a in &state.amplitudes {
        total += a.norm_sqr();
        cumulative.push(total);
    }
    if (total - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::InvalidParameter("state is not normalized".into()));
    }
    let bitstrings = (0..n_shots)
        .map(|i| {
            let u = stream_rng(seed, i as u64).gen::<f64>() * total;
            let index = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
            (0..state.atoms).map(|q| index >> q & 1 == 1).collect()
        })
        .collect();
    SampleSet::from_bitstrings(graph, bitstrings)
}

/// Backend settings for the simulated Rydberg sampler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RydbergConfig {
    pub omega_max: f64,
    pub delta_initial: f64,
    pub delta_final: f64,
    pub tau_f: f64,
    pub c6: f64,
    /// Overrides the trapezoid built from the fields above.
    pub schedule: Option<Schedule>,
    pub evolve: EvolveOptions,
}

impl Default for RydbergConfig {
    fn default() -> Self {
        // Final detuning sits between the diagonal-neighbour interaction at
        // a = 5.45 μm (~26 rad/μs) and the 2a tail (~3.3 rad/μs).
        RydbergConfig {
            omega_max: DEFAULT_OMEGA_MAX,
            delta_initial: -2.0 * std::f64::consts::PI * 6.0,
            delta_final: 2.0 * std::f64::consts::PI * 3.0,
            tau_f: DEFAULT_DURATION,
            c6: AQUILA_C6,
            schedule: None,
            evolve: EvolveOptions::default(),
        }
    }
}

impl RydbergConfig {
    pub fn schedule(&self) -> Result<Schedule> {
        match &self.schedule {
            Some(s) => Ok(s.clone()),
            None => default_schedule(self.omega_max, self.delta_initial, self.delta_final, self.tau_f),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RydbergSampler {
    pub config: RydbergConfig,
}

impl Sampler for RydbergSampler {
    fn name(&self) -> &str {
        "rydberg"
    }

    /// The kernel's coordinates are used as the atom register.
    fn sample(&self, kernel: &Graph, n_shots: usize, seed: u64) -> Result<SampleSet> {
        let program = AhsProgram::for_graph(kernel, self.config.schedule()?, self.config.c6)?;
        let state = evolve(&program, &self.config.evolve)?;
        measure(&state, kernel, n_shots, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rydberg::MIN_ATOM_SEPARATION;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    fn single_atom(schedule: Schedule) -> AhsProgram {
        AhsProgram::new(vec![[0.0, 0.0]], schedule, AQUILA_C6).unwrap()
    }

    #[test]
    fn resonant_pi_pulse_inverts_one_atom() {
        let omega = 2.0 * PI;
        let state = evolve(&single_atom(Schedule::constant(PI / omega, omega, 0.0, 0.0).unwrap()), &EvolveOptions::default()).unwrap();
        assert!(state.probability_of(&[0]) >= 0.999);
        assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_duration_is_identity() {
        let program = single_atom(Schedule::constant(0.0, 5.0, 1.0, 0.0).unwrap());
        let state = evolve(&program, &EvolveOptions::default()).unwrap();
        assert_eq!(state, QuantumState::ground(1));
    }

    #[test]
    fn rabi_oscillation_matches_closed_form() {
        // Detuned two-level system: P1(t) = Ω²/W² sin²(W t / 2), W = √(Ω² + Δ²).
        let (omega, delta, t) = (3.0, 2.0, 1.3);
        let program = single_atom(Schedule::constant(t, omega, delta, 0.7).unwrap());
        let state = evolve(&program, &EvolveOptions::default()).unwrap();
        let w = (omega * omega + delta * delta).sqrt();
        let expected = (omega / w).powi(2) * (w * t / 2.0).sin().powi(2);
        assert!((state.probability_of(&[0]) - expected).abs() < 1e-8);
    }

    #[test]
    fn blockaded_pair_shares_one_excitation() {
        // Enhanced Rabi frequency √2·Ω inside the blockade.
        let omega = 2.0 * PI;
        let t = PI / (SQRT_2 * omega);
        let schedule = Schedule::constant(t, omega, 0.0, 0.0).unwrap();
        let program = AhsProgram::new(vec![[0.0, 0.0], [MIN_ATOM_SEPARATION, 0.0]], schedule, AQUILA_C6).unwrap();
        let state = evolve(&program, &EvolveOptions::default()).unwrap();
        assert!(state.probability_of(&[0, 1]) < 0.01);
        assert!((state.probability_of(&[0]) - 0.5).abs() < 0.01);
        assert!((state.probability_of(&[1]) - 0.5).abs() < 0.01);
    }

    #[test]
    fn pure_detuning_preserves_populations() {
        let schedule = Schedule::constant(2.0, 0.0, 5.0, 0.0).unwrap();
        let program = AhsProgram::new(vec![[0.0, 0.0], [6.0, 0.0], [0.0, 7.0]], schedule, AQUILA_C6).unwrap();
        let amps: Vec<Complex64> = (0..8).map(|b| Complex64::new(1.0 + b as f64, 0.5 * b as f64)).collect();
        let norm = amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        let initial = QuantumState::from_amplitudes(3, amps.iter().map(|a| a / norm).collect()).unwrap();
        let out = evolve_from(&program, &initial, &EvolveOptions::default()).unwrap();
        for (p, q) in initial.probabilities().iter().zip(out.probabilities()) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn atom_limit_is_enforced() {
        let sites: Vec<[f64; 2]> = (0..17).map(|i| [i as f64 * 5.0, 0.0]).collect();
        let program = AhsProgram::new(sites, Schedule::constant(1.0, 1.0, 0.0, 0.0).unwrap(), AQUILA_C6).unwrap();
        assert!(matches!(
            evolve(&program, &EvolveOptions::default()),
            Err(Error::LimitExceeded { actual: 17, limit: 16, .. })
        ));
    }

    #[test]
    fn basis_state_measures_deterministically() {
        let state = QuantumState::basis(2, 0b01);
        let samples = measure(&state, &Graph::edgeless(2), 100, 1).unwrap();
        assert!(samples.shots.iter().all(|s| s.bits == [true, false]));
    }

    #[test]
    fn uniform_superposition_is_fair() {
        let amp = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let state = QuantumState::from_amplitudes(1, vec![amp, amp]).unwrap();
        let n = 10_000;
        let ones = measure(&state, &Graph::edgeless(1), n, 3)
            .unwrap()
            .shots
            .iter()
            .filter(|s| s.bits[0])
            .count();
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((ones as f64 - n as f64 / 2.0).abs() < 3.0 * sigma, "ones = {ones}");
    }

    #[test]
    fn measure_repairs_blockade_violations() {
        let amp = Complex64::new(0.5, 0.0);
        let state = QuantumState::from_amplitudes(2, vec![amp; 4]).unwrap();
        let samples = measure(&state, &Graph::path(2), 500, 8).unwrap();
        assert!(samples.repaired_sets().all(|s| s.size() <= 1));
    }
}
