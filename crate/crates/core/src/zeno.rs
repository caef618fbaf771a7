//! Measurement schedules along `H(s)` and the running-time bounds.
//!
//! A run starts in the ground state of `H(0)` and measures `H(s_1), …, H(s_M)`
//! with `s_M = 1`, either ideally or with the digitized pointer. The final
//! success probability is the ground population of `H(1) = H_P`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{
    build_problem_hamiltonian, build_transverse_beginning, interpolate, interpolation_derivative,
    CostFunction, HermitianOperator,
};
use crate::pointer::{
    degenerate_groups, pointer_step, projective_step, DensityMatrix, PointerConfig, MAX_POINTER_QUBITS,
};
use crate::spectral::{eigensystem, gamma, gap, path_profile, EigenSystem, SpectralProfile};

/// Grid used when a run has to profile its own path.
pub const DEFAULT_PROFILE_GRID: usize = 101;
/// Safety factor on the pointer-range condition `2^r ≳ (E_max - E_0)/g`.
pub const POINTER_RANGE_SAFETY: f64 = 2.0;

const POPULATION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementMode {
    Projective,
    Pointer,
}

/// How the interaction time of each pointer measurement is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimePolicy {
    /// `t` from the [`PointerConfig`].
    Fixed,
    /// `t = π / g_min`.
    Auto,
    /// `t = π / g(s_j)` at each step.
    Adaptive,
    /// `t` uniform in `[π/g_min, 2π/g_min]`, drawn per step from the seed.
    Random,
}

/// Measurement points `0 = s_0 < s_1 < … < s_M = 1` and how to measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    s_values: Vec<f64>,
    pub mode: MeasurementMode,
    pub time: TimePolicy,
}

impl Schedule {
    /// `M` equally spaced measurements, `δ = 1/M`.
    pub fn uniform(m: usize, mode: MeasurementMode, time: TimePolicy) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("schedule needs M >= 1".into()));
        }
        let mut s: Vec<f64> = (0..=m).map(|j| j as f64 / m as f64).collect();
        s[m] = 1.0;
        Self::from_points(s, mode, time)
    }

    pub fn from_points(s_values: Vec<f64>, mode: MeasurementMode, time: TimePolicy) -> Result<Self> {
        if s_values.len() < 2 {
            return Err(Error::InvalidInput("schedule needs at least one measurement".into()));
        }
        if s_values[0] != 0.0 || s_values[s_values.len() - 1] != 1.0 {
            return Err(Error::InvalidInput("schedule must start at s = 0 and end at s = 1".into()));
        }
        if let Some(w) = s_values.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput(format!(
                "schedule must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { s_values, mode, time })
    }

    pub fn s_values(&self) -> &[f64] {
        &self.s_values
    }

    /// Number of measurements `M`.
    pub fn measurements(&self) -> usize {
        self.s_values.len() - 1
    }
}

/// Diagnostics recorded after measurement `j` (`j = 0` is the initial state).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub j: usize,
    pub s: f64,
    /// Ground population `μ = <E_0(s_j)|ρ|E_0(s_j)>`.
    pub mu: f64,
    /// `‖ν‖`, the norm of the ground–excited coherences in the eigenbasis.
    pub coherence: f64,
    /// `|κ_01|` of this measurement (1 for the initial row).
    pub kappa01: f64,
    /// `Γ(s_j) (s_{j+1} - s_j) / g(s_j)`; 0 on the last row.
    pub epsilon: f64,
    /// Interaction time used (0 for projective steps and the initial row).
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub steps: Vec<StepRecord>,
    pub success_probability: f64,
    /// `max_j max_{a≠0} |κ^(j)_{a0}|`; 0 for projective runs.
    pub k_tilde: f64,
    pub g_min: f64,
    pub gamma_max: f64,
    pub measurements: usize,
    /// Finite-measurement bound; `None` when `k_tilde >= 1`.
    pub bound: Option<SuccessBound>,
    /// Ideal-measurement form `exp(-Γ²/(M g²))`.
    pub bound_exp: f64,
}

/// JSON summary of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub success: f64,
    pub k_tilde: f64,
    pub bound_exact: Option<f64>,
    pub bound_exp: f64,
    pub g_min: f64,
    pub gamma_max: f64,
}

impl RunRecord {
    pub fn summary(&self) -> RunSummary {
        RunSummary {
            success: self.success_probability,
            k_tilde: self.k_tilde,
            bound_exact: self.bound.map(|b| b.exact),
            bound_exp: self.bound_exp,
            g_min: self.g_min,
            gamma_max: self.gamma_max,
        }
    }
}

/// Runs `schedule` on the transverse-field path to `H_P(cost)`.
pub fn run(cost: &CostFunction, schedule: &Schedule, cfg: &PointerConfig, seed: u64) -> Result<RunRecord> {
    let hb = build_transverse_beginning(cost.n())?;
    let hp = build_problem_hamiltonian(cost)?;
    let profile = path_profile(&hb, &hp, DEFAULT_PROFILE_GRID, true)?;
    run_path(&hb, &hp, schedule, cfg, seed, &profile)
}

/// Runs `schedule` on an arbitrary linear path, reusing a precomputed
/// profile for `g_min` and `Γ`.
pub fn run_path(
    hb: &HermitianOperator,
    hp: &HermitianOperator,
    schedule: &Schedule,
    cfg: &PointerConfig,
    seed: u64,
    profile: &SpectralProfile,
) -> Result<RunRecord> {
    let dh = interpolation_derivative(hb, hp)?;
    let g_min = profile.g_min;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s_values = schedule.s_values();
    let m = schedule.measurements();

    let first = eigensystem(&interpolate(hb, hp, 0.0)?, None)?.at(0.0);
    first.require_unique_ground()?;
    let mut rho = DensityMatrix::pure(&first.ground_state())?;
    let mut steps = Vec::with_capacity(m + 1);
    let mut local = vec![(gamma(&first, &dh)?, gap(&first))];
    steps.push(StepRecord {
        j: 0,
        s: 0.0,
        mu: rho.population(&first.ground_state()),
        coherence: 0.0,
        kappa01: 1.0,
        epsilon: 0.0,
        t: 0.0,
    });

    let mut k_tilde = 0.0_f64;
    let mut prev = first;
    for (j, &s) in s_values.iter().enumerate().skip(1) {
        let next = eigensystem(&interpolate(hb, hp, s)?, Some(&prev))?.at(s);
        next.require_unique_ground()?;
        let local_gap = gap(&next);

        let (new_rho, rho_eigen, kappa01, t) = match schedule.mode {
            MeasurementMode::Projective => {
                let (out, eig) = projective_step(&rho, &next)?;
                let groups = degenerate_groups(&next);
                let k01 = if groups[0] == groups[1] { 1.0 } else { 0.0 };
                (out, eig, k01, 0.0)
            }
            MeasurementMode::Pointer => {
                let t = match schedule.time {
                    TimePolicy::Fixed => cfg.t,
                    TimePolicy::Auto => min_interaction_time(g_min)?,
                    TimePolicy::Adaptive => min_interaction_time(local_gap)?,
                    TimePolicy::Random => {
                        let lo = min_interaction_time(g_min)?;
                        rng.gen_range(lo..=2.0 * lo)
                    }
                };
                let step = pointer_step(&rho, &prev, &next, &cfg.with_time(t)?)?;
                let worst = (1..next.dim())
                    .map(|a| step.kappa[(a, 0)].norm())
                    .fold(0.0, f64::max);
                k_tilde = k_tilde.max(worst);
                let k01 = step.kappa[(0, 1)].norm();
                (step.rho, step.rho_eigen, k01, t)
            }
        };
        rho = new_rho;
        rho.validate()?;

        let mu = rho_eigen[(0, 0)].re;
        if !(-POPULATION_SLACK..=1.0 + POPULATION_SLACK).contains(&mu) {
            return Err(Error::numerical(format!("ground population {mu} at s = {s}")));
        }
        let coherence = (1..rho_eigen.nrows())
            .map(|a| rho_eigen[(a, 0)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        local.push((gamma(&next, &dh)?, local_gap));
        steps.push(StepRecord {
            j,
            s,
            mu,
            coherence,
            kappa01,
            epsilon: 0.0,
            t,
        });
        prev = next;
    }

    for j in 0..m {
        let (gam, g) = local[j];
        steps[j].epsilon = gam * (s_values[j + 1] - s_values[j]) / g;
    }

    // Final readout: ideal measurement at s = 1, whose ground projector is
    // the (computational-basis) ground state of H_P.
    let success_probability = rho.population(&prev.ground_state());
    let gamma_max = profile.gamma_max;
    let bound = if k_tilde < 1.0 {
        Some(success_lower_bound(gamma_max, g_min, m, k_tilde)?)
    } else {
        None
    };
    Ok(RunRecord {
        steps,
        success_probability,
        k_tilde,
        g_min,
        gamma_max,
        measurements: m,
        bound,
        bound_exp: (-gamma_max * gamma_max / (m as f64 * g_min * g_min)).exp(),
    })
}

/// Lower bounds on the final ground population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuccessBound {
    /// `1 − (Γ²/(M g²))(1 + 2/(1 − k̃))` clamped to `[0, 1]`.
    pub exact: f64,
    pub exact_raw: f64,
    /// `exp(−Γ²/(M g²))`.
    pub projective: f64,
}

pub fn success_lower_bound(gamma_max: f64, g_min: f64, m: usize, k_tilde: f64) -> Result<SuccessBound> {
    if k_tilde >= 1.0 {
        return Err(Error::MeasurementTooWeak(k_tilde));
    }
    if !(k_tilde >= 0.0) {
        return Err(Error::OutOfRange {
            name: "k_tilde",
            value: k_tilde,
            expected: "0 <= k_tilde < 1",
        });
    }
    if m == 0 {
        return Err(Error::InvalidInput("M must be >= 1".into()));
    }
    check_positive("g_min", g_min)?;
    let ratio = gamma_max * gamma_max / (m as f64 * g_min * g_min);
    let exact_raw = 1.0 - ratio * (1.0 + 2.0 / (1.0 - k_tilde));
    Ok(SuccessBound {
        exact: exact_raw.clamp(0.0, 1.0),
        exact_raw,
        projective: (-ratio).exp(),
    })
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::OutOfRange {
            name,
            value: v,
            expected: "finite and > 0",
        });
    }
    Ok(())
}

/// `π / g`: puts `g t / 2` at the first crossing of `|κ|² = 1/2`.
pub fn min_interaction_time(g_min: f64) -> Result<f64> {
    check_positive("g_min", g_min)?;
    Ok(PI / g_min)
}

/// Smallest `r` with `2^r >= 2 · spectral_range / g_min`.
pub fn pointer_qubits_required(spectral_range: f64, g_min: f64) -> Result<u32> {
    check_positive("spectral_range", spectral_range)?;
    check_positive("g_min", g_min)?;
    let need = POINTER_RANGE_SAFETY * spectral_range / g_min;
    (1..=MAX_POINTER_QUBITS)
        .find(|&r| (1u64 << r) as f64 >= need)
        .ok_or(Error::Size {
            what: "pointer qubits",
            value: need.log2().ceil() as usize,
            cap: MAX_POINTER_QUBITS as usize,
        })
}

/// Scales `(Γ²/g³, Γ/g²)` of the measurement and adiabatic running times.
pub fn runtime_comparison(gamma_max: f64, g_min: f64) -> Result<(f64, f64)> {
    check_positive("gamma_max", gamma_max)?;
    check_positive("g_min", g_min)?;
    Ok((gamma_max.powi(2) / g_min.powi(3), gamma_max / g_min.powi(2)))
}

/// Projective-mode check: `μ^(j+1) >= |U_00|² μ^(j)` along a run.
pub fn perfect_measurement_recurrence_holds(
    hb: &HermitianOperator,
    hp: &HermitianOperator,
    record: &RunRecord,
) -> Result<bool> {
    let mut prev: Option<EigenSystem> = None;
    let mut ok = true;
    for pair in record.steps.windows(2) {
        let a = match prev.take() {
            Some(es) => es,
            None => eigensystem(&interpolate(hb, hp, pair[0].s)?, None)?,
        };
        let b = eigensystem(&interpolate(hb, hp, pair[1].s)?, Some(&a))?;
        let u00 = crate::spectral::overlap_matrix(&a, &b)?[(0, 0)].norm_sqr();
        ok &= pair[1].mu >= u00 * pair[0].mu - 1e-9;
        prev = Some(b);
    }
    Ok(ok)
}
