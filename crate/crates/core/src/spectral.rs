//! Eigendecomposition along the interpolation path and the spectral
//! quantities that control the running time: the gap `g(s)`, the ground-state
//! spread `Γ(s)` of `dH/ds`, leakage out of the ground state, and the unitary
//! relating neighbouring eigenbases.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonians::{
    build_problem_hamiltonian, build_transverse_beginning, interpolate, interpolation_derivative,
    CostFunction, HermitianOperator,
};
use crate::linalg::{adjoint_mul, c, hermitian_eigen, identity_residual, CMatrix, CVector};

/// Ground-state ties closer than this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Grid used by the CLI when none is configured.
pub const DEFAULT_GRID_POINTS: usize = 101;
/// Default refinement width for the gap minimum.
pub const REFINE_TOL: f64 = 1e-6;

const PHASE_OVERLAP_FLOOR: f64 = 1e-8;
const NONZERO_COMPONENT: f64 = 1e-10;
const GAMMA_RADICAND_FLOOR: f64 = -1e-12;
const UNITARITY_ERROR: f64 = 1e-6;

/// Sorted spectrum and phase-fixed eigenvectors (columns) of one `H(s)`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub s: Option<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    degenerate_ground: bool,
}

impl EigenSystem {
    pub fn at(mut self, s: f64) -> Self {
        self.s = Some(s);
        self
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn vector(&self, a: usize) -> CVector {
        self.eigenvectors.column(a).into_owned()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn ground_state(&self) -> CVector {
        self.vector(0)
    }

    /// Set when `E_1 - E_0 < DEGENERACY_TOL`.
    pub fn is_ground_degenerate(&self) -> bool {
        self.degenerate_ground
    }

    /// Fails with [`Error::Degenerate`] when the ground state is not unique.
    pub fn require_unique_ground(&self) -> Result<()> {
        if self.degenerate_ground {
            return Err(Error::Degenerate {
                s: self.s.unwrap_or(f64::NAN),
                gap: gap(self),
            });
        }
        Ok(())
    }

    /// max |V diag(E) V† − H|
    pub fn reconstruction_residual(&self, h: &HermitianOperator) -> f64 {
        let d = CMatrix::from_diagonal(&CVector::from_iterator(
            self.dim(),
            self.eigenvalues.iter().map(|&e| c(e)),
        ));
        let back = &self.eigenvectors * d * self.eigenvectors.adjoint();
        crate::linalg::max_abs(&(back - h.matrix()))
    }

    /// max |V†V − I|
    pub fn orthonormality_residual(&self) -> f64 {
        identity_residual(&adjoint_mul(&self.eigenvectors, &self.eigenvectors))
    }

    /// Rewrites `m` (computational basis) in this eigenbasis: V† m V.
    pub fn to_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        self.eigenvectors.adjoint() * m * &self.eigenvectors
    }

    /// Inverse of [`EigenSystem::to_eigenbasis`]: V m V†.
    pub fn from_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        &self.eigenvectors * m * self.eigenvectors.adjoint()
    }
}

/// Diagonalizes `h`.
///
/// With `phase_ref`, column `a` is rotated so `<ref_a|new_a>` is real and
/// non-negative (falling back to the component rule when that overlap
/// vanishes). Without it, the first nonzero component is made real positive.
pub fn eigensystem(h: &HermitianOperator, phase_ref: Option<&EigenSystem>) -> Result<EigenSystem> {
    let dim = h.dim();
    if let Some(r) = phase_ref {
        if r.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: r.dim(),
                right: dim,
            });
        }
    }

    let (eigenvalues, mut vectors) = if h.is_diagonal() {
        let diag = h.diagonal_values();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
        let mut v = CMatrix::zeros(dim, dim);
        for (col, &row) in order.iter().enumerate() {
            v[(row, col)] = c(1.0);
        }
        (order.iter().map(|&i| diag[i]).collect::<Vec<_>>(), v)
    } else {
        hermitian_eigen(h.matrix())?
    };

    for a in 0..dim {
        let mut col = vectors.column_mut(a);
        let anchor = phase_ref
            .map(|r| r.eigenvectors.column(a).dotc(&col))
            .filter(|ov| ov.norm() > PHASE_OVERLAP_FLOOR)
            .or_else(|| col.iter().copied().find(|z| z.norm() > NONZERO_COMPONENT));
        if let Some(z) = anchor {
            let phase = z.conj() / z.norm();
            col *= phase;
        }
    }

    let degenerate_ground = dim >= 2 && eigenvalues[1] - eigenvalues[0] < DEGENERACY_TOL;
    Ok(EigenSystem {
        s: None,
        eigenvalues,
        eigenvectors: vectors,
        degenerate_ground,
    })
}

/// `g = E_1 - E_0`.
pub fn gap(es: &EigenSystem) -> f64 {
    if es.dim() < 2 {
        return 0.0;
    }
    es.eigenvalues[1] - es.eigenvalues[0]
}

/// Ground-state standard deviation of `dh`:
/// `sqrt(<E0|dh²|E0> - <E0|dh|E0>²)`.
pub fn gamma(es: &EigenSystem, dh: &HermitianOperator) -> Result<f64> {
    if dh.dim() != es.dim() {
        return Err(Error::DimensionMismatch {
            left: es.dim(),
            right: dh.dim(),
        });
    }
    let g0 = es.ground_state();
    let applied = dh.matrix() * &g0;
    let mean = g0.dotc(&applied).re;
    // <E0|dh²|E0> = ‖dh|E0>‖² for Hermitian dh
    let second = applied.norm_squared();
    let radicand = second - mean * mean;
    if radicand < GAMMA_RADICAND_FLOOR {
        return Err(Error::numerical(format!(
            "negative ground-state variance {radicand:e}"
        )));
    }
    Ok(radicand.max(0.0).sqrt())
}

/// Second-order leakage coefficient
/// `Σ_{a≠0} |<E_a|dh|E_0>|² / (E_0 - E_a)²`.
pub fn leakage(es: &EigenSystem, dh: &HermitianOperator) -> Result<f64> {
    es.require_unique_ground()?;
    if dh.dim() != es.dim() {
        return Err(Error::DimensionMismatch {
            left: es.dim(),
            right: dh.dim(),
        });
    }
    let applied = dh.matrix() * es.ground_state();
    let e0 = es.ground_energy();
    Ok((1..es.dim())
        .map(|a| {
            let amp = es.eigenvectors.column(a).dotc(&applied);
            amp.norm_sqr() / (e0 - es.eigenvalues[a]).powi(2)
        })
        .sum())
}

/// `U_ab = <E_a(next)|E_b(prev)>`.
pub fn overlap_matrix(es_prev: &EigenSystem, es_next: &EigenSystem) -> Result<CMatrix> {
    if es_prev.dim() != es_next.dim() {
        return Err(Error::DimensionMismatch {
            left: es_prev.dim(),
            right: es_next.dim(),
        });
    }
    let u = adjoint_mul(&es_next.eigenvectors, &es_prev.eigenvectors);
    let residual = identity_residual(&adjoint_mul(&u, &u));
    if !(residual <= UNITARITY_ERROR) {
        return Err(Error::numerical(format!(
            "overlap matrix is not unitary (residual {residual:e})"
        )));
    }
    Ok(u)
}

/// Gap and Γ sampled along `[0, 1]`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralProfile {
    pub grid: Vec<f64>,
    pub ground_energies: Vec<f64>,
    pub first_excited_energies: Vec<f64>,
    pub gaps: Vec<f64>,
    pub gammas: Vec<f64>,
    pub g_min: f64,
    pub gamma_max: f64,
    pub s_min: f64,
    pub spectral_range: f64,
}

/// Summary written next to the profile CSV.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ProfileSummary {
    pub g_min: f64,
    pub s_min: f64,
    pub gamma_max: f64,
    pub spectral_range: f64,
}

impl SpectralProfile {
    pub fn summary(&self) -> ProfileSummary {
        ProfileSummary {
            g_min: self.g_min,
            s_min: self.s_min,
            gamma_max: self.gamma_max,
            spectral_range: self.spectral_range,
        }
    }
}

/// Profile of the transverse-field path to the problem Hamiltonian of `cost`.
pub fn spectral_profile(cost: &CostFunction, grid_points: usize, refine: bool) -> Result<SpectralProfile> {
    let hb = build_transverse_beginning(cost.n())?;
    let hp = build_problem_hamiltonian(cost)?;
    path_profile(&hb, &hp, grid_points, refine)
}

struct PointSample {
    e0: f64,
    e1: f64,
    gap: f64,
    gamma: f64,
    range: f64,
}

fn sample(hb: &HermitianOperator, hp: &HermitianOperator, dh: &HermitianOperator, s: f64) -> Result<PointSample> {
    let es = eigensystem(&interpolate(hb, hp, s)?, None)?.at(s);
    es.require_unique_ground()?;
    let values = es.eigenvalues();
    Ok(PointSample {
        e0: values[0],
        e1: values[1],
        gap: gap(&es),
        gamma: gamma(&es, dh)?,
        range: values[values.len() - 1] - values[0],
    })
}

/// Profile of the linear path `hb -> hp` on a uniform grid of
/// `grid_points` values, optionally golden-section refining the gap minimum
/// to an s-interval below [`REFINE_TOL`].
pub fn path_profile(
    hb: &HermitianOperator,
    hp: &HermitianOperator,
    grid_points: usize,
    refine: bool,
) -> Result<SpectralProfile> {
    if grid_points < 2 {
        return Err(Error::InvalidInput("spectral profile needs at least 2 grid points".into()));
    }
    if hb.dim() < 2 {
        return Err(Error::InvalidInput("spectral profile needs dimension >= 2".into()));
    }
    let dh = interpolation_derivative(hb, hp)?;
    let last = (grid_points - 1) as f64;
    let grid: Vec<f64> = (0..grid_points).map(|k| k as f64 / last).collect();
    let samples = grid
        .par_iter()
        .map(|&s| sample(hb, hp, &dh, s))
        .collect::<Result<Vec<_>>>()?;

    let gaps: Vec<f64> = samples.iter().map(|p| p.gap).collect();
    let gammas: Vec<f64> = samples.iter().map(|p| p.gamma).collect();
    let (k_min, &coarse_min) = gaps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    let (s_min, g_min) = if refine {
        let lo = grid[k_min.saturating_sub(1)];
        let hi = grid[(k_min + 1).min(grid_points - 1)];
        let (s, g) = refine_gap_minimum(hb, hp, lo, hi, REFINE_TOL)?;
        if g <= coarse_min {
            (s, g)
        } else {
            (grid[k_min], coarse_min)
        }
    } else {
        (grid[k_min], coarse_min)
    };

    Ok(SpectralProfile {
        ground_energies: samples.iter().map(|p| p.e0).collect(),
        first_excited_energies: samples.iter().map(|p| p.e1).collect(),
        gamma_max: gammas.iter().copied().fold(0.0, f64::max),
        spectral_range: samples.iter().map(|p| p.range).fold(0.0, f64::max),
        grid,
        gaps,
        gammas,
        g_min,
        s_min,
    })
}

/// Golden-section search for the gap minimum of the linear path on `[lo, hi]`.
/// Returns `(s_min, g_min)`.
pub fn refine_gap_minimum(
    hb: &HermitianOperator,
    hp: &HermitianOperator,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    golden_section_min(
        |s| {
            let es = eigensystem(&interpolate(hb, hp, s)?, None)?.at(s);
            es.require_unique_ground()?;
            Ok(gap(&es))
        },
        lo,
        hi,
        tol,
    )
}

/// Golden-section minimization of a unimodal `f` on `[a, b]` until the
/// bracket is narrower than `tol`. Returns `(x_min, f_min)`.
pub fn golden_section_min<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const RESP: f64 = 0.381_966_011_250_105_1; // 2 - φ

    let mut x1 = a + RESP * (b - a);
    let mut x2 = b - RESP * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + RESP * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - RESP * (b - a);
            f2 = f(x2)?;
        }
        // no further progress possible in floating point
        if x1 >= x2 {
            break;
        }
    }
    Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
}
