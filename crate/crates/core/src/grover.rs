//! Unstructured search: the oracle cost `h_w`, the `(n+1)`-dimensional
//! symmetric-subspace reduction of the transverse-field path, the avoided
//! crossing near `s* ≈ 1 − 2/n`, and the two-measurement protocol.
//!
//! The path is symmetric under the choice of winner, so the subspace
//! analysis fixes `w = 0`. In the `S_x` eigenbasis `|m_x = n/2 − r>`,
//! `r = 0..n`, the beginning Hamiltonian is `diag(r)` and the winner
//! `|m_z = n/2>` has amplitudes `√P_r`, `P_r = 2^-n C(n, r)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{interpolate, CostFunction, HermitianOperator};
use crate::linalg::{c, outer, CMatrix, CVector};
use crate::pointer::{apply_projective_channel, pointer_step, DensityMatrix, PointerConfig};
use crate::spectral::{eigensystem, gap, path_profile, refine_gap_minimum, SpectralProfile};

/// Largest qubit count for subspace calculations.
pub const MAX_SUBSPACE_QUBITS: usize = 60;
/// Coarse grid used to bracket the avoided crossing.
const CROSSING_GRID: usize = 201;
/// Final bracket width of the crossing refinement.
const CROSSING_TOL: f64 = 1e-13;
const ORACLE_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroverInstance {
    pub n: usize,
    #[serde(default)]
    pub w: usize,
}

impl GroverInstance {
    pub fn new(n: usize, w: usize) -> Result<Self> {
        let inst = Self { n, w };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n >= usize::BITS as usize {
            return Err(Error::InvalidInput(format!("grover n = {} is out of range", self.n)));
        }
        if self.w >= 1usize << self.n {
            return Err(Error::InvalidInput(format!(
                "winner w = {} must be below 2^n = {}",
                self.w,
                1usize << self.n
            )));
        }
        Ok(())
    }
}

/// `h_w(z) = 0` if `z = w`, else 1.
pub fn grover_cost(inst: &GroverInstance) -> CostFunction {
    let values = (0..1usize << inst.n)
        .map(|z| if z == inst.w { 0.0 } else { 1.0 })
        .collect();
    CostFunction::new(inst.n, values).expect("grover table is well formed")
}

/// Total-spin `n/2` sector in the `S_x` eigenbasis.
#[derive(Debug, Clone)]
pub struct SymmetricSubspace {
    pub n: usize,
    /// `P_r = 2^-n C(n, r)`.
    pub weights: Vec<f64>,
}

impl SymmetricSubspace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_SUBSPACE_QUBITS {
            return Err(Error::Size {
                what: "subspace qubits",
                value: n,
                cap: MAX_SUBSPACE_QUBITS,
            });
        }
        let mut weights = Vec::with_capacity(n + 1);
        let mut p = 0.5f64.powi(n as i32);
        for r in 0..=n {
            weights.push(p);
            p *= (n - r) as f64 / (r + 1) as f64;
        }
        Ok(Self { n, weights })
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// `|m_z = n/2>` (the winner `w = 0`) in the `S_x` basis: amplitudes `√P_r`.
    pub fn winner_state(&self) -> CVector {
        CVector::from_iterator(self.dim(), self.weights.iter().map(|p| c(p.sqrt())))
    }

    /// `|m_x = n/2>`, the uniform superposition and ground state of `H_B`.
    pub fn uniform_state(&self) -> CVector {
        let mut v = CVector::zeros(self.dim());
        v[0] = c(1.0);
        v
    }

    /// `n/2 − S_x = diag(0, 1, …, n)`.
    pub fn beginning(&self) -> HermitianOperator {
        let r: Vec<f64> = (0..self.dim()).map(|r| r as f64).collect();
        HermitianOperator::from_diagonal(&r)
    }

    /// `1 − |m_z = n/2><m_z = n/2|`.
    pub fn problem(&self) -> HermitianOperator {
        let v = self.winner_state();
        HermitianOperator::new(CMatrix::identity(self.dim(), self.dim()) - outer(&v))
            .expect("rank-one complement is Hermitian")
    }

    pub fn hamiltonian(&self, s: f64) -> Result<HermitianOperator> {
        interpolate(&self.beginning(), &self.problem(), s)
    }

    /// Spectral profile of the reduced path.
    pub fn profile(&self, grid_points: usize, refine: bool) -> Result<SpectralProfile> {
        path_profile(&self.beginning(), &self.problem(), grid_points, refine)
    }
}

/// `(1−s)·diag(r) + s·(I − v v†)` with `v_r = √P_r`.
pub fn subspace_hamiltonian(n: usize, s: f64) -> Result<HermitianOperator> {
    SymmetricSubspace::new(n)?.hamiltonian(s)
}

/// Location and size of the minimum gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AvoidedCrossing {
    pub n: usize,
    pub s_star: f64,
    pub gap: f64,
    /// `1 − 2/n`
    pub s_star_asymptotic: f64,
    /// `2^(1 − n/2)`
    pub gap_asymptotic: f64,
}

fn check_crossing_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidInput(format!("need n >= {min}, got {n}")));
    }
    Ok(())
}

/// Refined gap minimum of the subspace path: coarse grid, then
/// golden-section on the bracketing cells.
pub fn avoided_crossing(n: usize) -> Result<AvoidedCrossing> {
    avoided_crossing_on_grid(n, CROSSING_GRID)
}

pub fn avoided_crossing_on_grid(n: usize, grid_points: usize) -> Result<AvoidedCrossing> {
    let sub = SymmetricSubspace::new(n)?;
    let hb = sub.beginning();
    let hp = sub.problem();
    let coarse = path_profile(&hb, &hp, grid_points, false)?;
    let k = coarse
        .grid
        .iter()
        .position(|&s| s == coarse.s_min)
        .expect("s_min is a grid point");
    let lo = coarse.grid[k.saturating_sub(1)];
    let hi = coarse.grid[(k + 1).min(grid_points - 1)];
    let (s_star, g) = refine_gap_minimum(&hb, &hp, lo, hi, CROSSING_TOL)?;
    Ok(AvoidedCrossing {
        n,
        s_star,
        gap: g,
        s_star_asymptotic: 1.0 - 2.0 / n as f64,
        gap_asymptotic: 2f64.powf(1.0 - n as f64 / 2.0),
    })
}

/// Numerically refined `s*`.
pub fn s_star(n: usize) -> Result<f64> {
    check_crossing_n(n, 4)?;
    Ok(avoided_crossing(n)?.s_star)
}

/// Subspace gap at the refined `s*`.
pub fn gap_at_s_star(n: usize) -> Result<f64> {
    check_crossing_n(n, 4)?;
    Ok(avoided_crossing(n)?.gap)
}

/// Ground and first excited states of `H(s*)` in the subspace.
#[derive(Debug, Clone)]
pub struct CrossingStates {
    pub crossing: AvoidedCrossing,
    /// Ground state, phase fixed so `<m_z = n/2|ψ₊>` is real positive.
    pub psi_plus: CVector,
    pub psi_minus: CVector,
    /// `(E± − s*)/(1 − s*)`
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// `|<m_z = n/2|ψ±>|²`
    pub z_overlaps: [f64; 2],
    /// `|<m_x = n/2|ψ±>|²`
    pub x_overlaps: [f64; 2],
    /// `<m_x = n/2|ψ±> / <m_z = n/2|ψ±>` (real after phase fixing)
    pub xz_ratios: [f64; 2],
}

pub fn crossing_states(n: usize) -> Result<CrossingStates> {
    check_crossing_n(n, 10)?;
    let sub = SymmetricSubspace::new(n)?;
    let crossing = avoided_crossing(n)?;
    let s = crossing.s_star;
    let es = eigensystem(&sub.hamiltonian(s)?, None)?;
    let vz = sub.winner_state();
    let vx = sub.uniform_state();

    let fix = |psi: CVector| {
        let amp = vz.dotc(&psi);
        if amp.norm() > 0.0 {
            psi * (amp.conj() / amp.norm())
        } else {
            psi
        }
    };
    let psi_plus = fix(es.vector(0));
    let psi_minus = fix(es.vector(1));
    let e = es.eigenvalues();
    let lambda = |energy: f64| (energy - s) / (1.0 - s);

    let overlaps = |v: &CVector| [v.dotc(&psi_plus).norm_sqr(), v.dotc(&psi_minus).norm_sqr()];
    let z_overlaps = overlaps(&vz);
    let x_overlaps = overlaps(&vx);
    let ratio = |psi: &CVector| (vx.dotc(psi) / vz.dotc(psi)).re;
    let states = CrossingStates {
        crossing,
        lambda_plus: lambda(e[0]),
        lambda_minus: lambda(e[1]),
        z_overlaps,
        x_overlaps,
        xz_ratios: [ratio(&psi_plus), ratio(&psi_minus)],
        psi_plus,
        psi_minus,
    };

    let tol = 2.0 / n as f64;
    let worst = z_overlaps
        .iter()
        .chain(x_overlaps.iter())
        .map(|o| (o - 0.5).abs())
        .fold(0.0, f64::max);
    if worst > tol {
        return Err(Error::numerical(format!(
            "crossing-state overlap deviates from 1/2 by {worst} (> 2/n = {tol})"
        )));
    }
    Ok(states)
}

/// Outcome of measuring `H(s*)` with a one-qubit pointer and then `H(1)`.
#[derive(Debug, Clone)]
pub struct TwoMeasurementOutcome {
    pub n: usize,
    pub t: f64,
    pub crossing: AvoidedCrossing,
    /// Probability of reading out the winner.
    pub probability: f64,
    /// `½ sin²(g(s*) t / 4)`
    pub predicted: f64,
    /// State after the first measurement, in the `{ψ₊, ψ₋}` basis
    /// (upper-left 2×2 block of the `H(s*)` eigenbasis representation).
    pub crossing_block: [[num_complex::Complex64; 2]; 2],
}

/// `½ sin²(g t / 4)`.
pub fn predicted_two_measurement_probability(g: f64, t: f64) -> f64 {
    0.5 * (g * t / 4.0).sin().powi(2)
}

/// Winner probability of the two-measurement protocol at interaction time `t`.
pub fn two_measurement_run(n: usize, t: f64) -> Result<f64> {
    Ok(two_measurement(n, t)?.probability)
}

/// Prepare `|E_0(0)>`, pointer-measure `H(s*)` with `r = 1` for time `t`,
/// then measure `H(1)` ideally.
pub fn two_measurement(n: usize, t: f64) -> Result<TwoMeasurementOutcome> {
    check_crossing_n(n, 6)?;
    let crossing = avoided_crossing(n)?;
    two_measurement_at(n, t, &crossing)
}

/// As [`two_measurement`], reusing a known crossing.
pub fn two_measurement_at(n: usize, t: f64, crossing: &AvoidedCrossing) -> Result<TwoMeasurementOutcome> {
    let sub = SymmetricSubspace::new(n)?;
    let start = eigensystem(&sub.hamiltonian(0.0)?, None)?.at(0.0);
    let mid = eigensystem(&sub.hamiltonian(crossing.s_star)?, None)?.at(crossing.s_star);
    let end = eigensystem(&sub.hamiltonian(1.0)?, None)?.at(1.0);
    end.require_unique_ground()?;

    let rho0 = DensityMatrix::pure(&sub.uniform_state())?;
    let step = pointer_step(&rho0, &start, &mid, &PointerConfig::new(1, t)?)?;
    let measured = apply_projective_channel(&step.rho, &end)?;
    let probability = measured.population(&sub.winner_state());

    let b = &step.rho_eigen;
    Ok(TwoMeasurementOutcome {
        n,
        t,
        crossing: *crossing,
        probability,
        predicted: predicted_two_measurement_probability(crossing.gap, t),
        crossing_block: [[b[(0, 0)], b[(0, 1)]], [b[(1, 0)], b[(1, 1)]]],
    })
}

/// Interaction time `2π/g(s*)` that maximizes the predicted probability.
pub fn default_two_measurement_time(crossing: &AvoidedCrossing) -> f64 {
    2.0 * PI / crossing.gap
}

/// Eigen-checks for `H̃ = H_w + (1 − |ψ><ψ|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleDiagnostics {
    /// `|<w|ψ>|`
    pub overlap: f64,
    /// Energy of `(|ψ> + |w>)` (normalized), expected `1 − |<w|ψ>|`.
    pub ground_energy: f64,
    /// Energy of `(|ψ> − |w>)`, expected `1 + |<w|ψ>|`.
    pub excited_energy: f64,
    pub splitting: f64,
    /// `‖H̃ v − E v‖` for the two candidate eigenvectors.
    pub ground_residual: f64,
    pub excited_residual: f64,
}

/// Builds `H̃ = H_w + 1 − |ψ><ψ|` and verifies that `|ψ> ± |w>` (with the
/// phase of `|w>` chosen so `<w|ψ>` is real and non-negative) are
/// eigenvectors.
pub fn general_oracle_hamiltonian(
    inst: &GroverInstance,
    psi: &CVector,
) -> Result<(HermitianOperator, OracleDiagnostics)> {
    inst.validate()?;
    let dim = 1usize << inst.n;
    if psi.len() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: psi.len(),
        });
    }
    if (psi.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput("ψ must be normalized".into()));
    }
    let amp = psi[inst.w];
    if amp.norm() == 0.0 {
        return Err(Error::InvalidInput("ψ must overlap the winner".into()));
    }

    let mut m = CMatrix::identity(dim, dim) * c(2.0) - outer(psi);
    m[(inst.w, inst.w)] -= c(1.0);
    let h = HermitianOperator::new(m)?;

    // |w~> = e^{iφ}|w> with <w~|ψ> = |<w|ψ>|
    let mut w_tilde = CVector::zeros(dim);
    w_tilde[inst.w] = amp / amp.norm();
    let plus = psi + &w_tilde;
    let minus = psi - &w_tilde;
    if minus.norm() < 1e-9 || plus.norm() < 1e-9 {
        return Err(Error::InvalidInput(
            "ψ ± w are not independent (ψ coincides with the winner)".into(),
        ));
    }

    let check = |v: CVector| {
        let v = &v / c(v.norm());
        let hv = h.matrix() * &v;
        let energy = v.dotc(&hv).re;
        let residual = (hv - &v * c(energy)).norm();
        (energy, residual)
    };
    let (ground_energy, ground_residual) = check(plus);
    let (excited_energy, excited_residual) = check(minus);
    if ground_residual > ORACLE_RESIDUAL_TOL || excited_residual > ORACLE_RESIDUAL_TOL {
        return Err(Error::numerical(format!(
            "ψ ± w are not eigenvectors (residuals {ground_residual:e}, {excited_residual:e})"
        )));
    }
    Ok((
        h,
        OracleDiagnostics {
            overlap: amp.norm(),
            ground_energy,
            excited_energy,
            splitting: excited_energy - ground_energy,
            ground_residual,
            excited_residual,
        },
    ))
}

/// Gap of a subspace Hamiltonian at `s`.
pub fn subspace_gap(n: usize, s: f64) -> Result<f64> {
    Ok(gap(&eigensystem(&subspace_hamiltonian(n, s)?, None)?))
}
