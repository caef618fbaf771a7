//! Digitized von Neumann measurement of `H(s)`.
//!
//! The pointer is `r` qubits whose computational basis holds the momentum
//! eigenstates `p|z> = z/2^r |z>`. It starts in the uniform superposition
//! (a position eigenstate at `x = 0`), interacts through `H ⊗ p` for time `t`,
//! and is traced out. On the system this leaves, in the eigenbasis of `H`,
//! an entrywise product `ρ_ab -> κ_ab ρ_ab` with
//!
//! ```text
//! κ_ab = 2^-r Σ_z exp(i (E_b - E_a) z t / 2^r)
//! ```
//!
//! The pointer outcome is never sampled; only the post-measurement state of
//! the system is used.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonians::HermitianOperator;
use crate::linalg::{c, hermitian_eigen, hermitian_eigenvalues, hermitian_residual, outer, CMatrix, CVector};
use crate::spectral::{overlap_matrix, EigenSystem};

pub const MAX_POINTER_QUBITS: u32 = 20;
/// Largest joint (system × pointer) dimension the oracle will build.
pub const MAX_JOINT_DIM: usize = 2048;
/// Eigenvalues closer than this share a projector in the ideal measurement.
pub const PROJECTIVE_GROUPING_TOL: f64 = 1e-9;

const DENSITY_HERMITIAN_TOL: f64 = 1e-10;
const DENSITY_TRACE_TOL: f64 = 1e-10;
const DENSITY_PSD_TOL: f64 = -1e-9;

/// Pointer size and system–pointer interaction time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerConfig {
    pub r: u32,
    pub t: f64,
}

impl PointerConfig {
    pub fn new(r: u32, t: f64) -> Result<Self> {
        check_pointer_qubits(r)?;
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::OutOfRange {
                name: "t",
                value: t,
                expected: "finite and >= 0",
            });
        }
        Ok(Self { r, t })
    }

    pub fn with_time(self, t: f64) -> Result<Self> {
        Self::new(self.r, t)
    }

    pub fn levels(&self) -> usize {
        1usize << self.r
    }
}

fn check_pointer_qubits(r: u32) -> Result<()> {
    if r == 0 || r > MAX_POINTER_QUBITS {
        return Err(Error::Size {
            what: "pointer qubits",
            value: r as usize,
            cap: MAX_POINTER_QUBITS as usize,
        });
    }
    Ok(())
}

/// Reduced state of the system.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positivity before wrapping.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = Self { matrix };
        rho.validate()?;
        Ok(rho)
    }

    /// `|ψ><ψ|` for a normalized `ψ`.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if !((norm - 1.0).abs() <= 1e-10) {
            return Err(Error::InvalidInput(format!("state norm {norm} is not 1")));
        }
        Self::new(outer(psi))
    }

    pub(crate) fn from_raw(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `<v|ρ|v>`.
    pub fn population(&self, v: &CVector) -> f64 {
        v.dotc(&(&self.matrix * v)).re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eigenvalues(&self.matrix)?[0])
    }

    pub fn validate(&self) -> Result<()> {
        let herm = hermitian_residual(&self.matrix);
        if !(herm <= DENSITY_HERMITIAN_TOL) {
            return Err(Error::numerical(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = self.trace();
        if !((tr - c(1.0)).norm() <= DENSITY_TRACE_TOL) {
            return Err(Error::numerical(format!("density matrix trace {tr} != 1")));
        }
        let min = self.min_eigenvalue()?;
        if !(min >= DENSITY_PSD_TOL) {
            return Err(Error::numerical(format!(
                "density matrix not positive (min eigenvalue {min:e})"
            )));
        }
        Ok(())
    }
}

/// Momentum eigenvalues `z / 2^r`, `z = 0 .. 2^r - 1`.
pub fn momentum_eigenvalues(r: u32) -> Result<Vec<f64>> {
    check_pointer_qubits(r)?;
    let levels = 1usize << r;
    Ok((0..levels).map(|z| z as f64 / levels as f64).collect())
}

/// `|κ(x)|² = sin²x / (4^r sin²(x / 2^r))`, equal to 1 at the removable
/// singularities `x ≡ 0 (mod 2^r π)`.
pub fn kappa_weight(x: f64, r: u32) -> f64 {
    let scale = (1u64 << r) as f64;
    let denom = (x / scale).sin();
    if denom.abs() > 1e-6 {
        let num = x.sin();
        return (num * num / (scale * scale * denom * denom)).min(1.0);
    }
    // near a peak, use the equivalent product Π_k cos²(x 2^k / 2^r)
    (0..r)
        .map(|k| (x * (1u64 << k) as f64 / scale).cos().powi(2))
        .product()
}

/// `2^-r Σ_z e^{iθz}` for `z < 2^r`, written as `Π_k (1 + e^{iθ 2^k}) / 2`.
fn pointer_average(theta: f64, r: u32) -> Complex64 {
    (0..r).fold(c(1.0), |acc, k| {
        let phase = theta * (1u64 << k) as f64;
        acc * (c(1.0) + Complex64::from_polar(1.0, phase)) * 0.5
    })
}

/// `κ_ab = 2^-r Σ_z exp(i (E_b - E_a) z t / 2^r)` for the levels of `es`.
pub fn kappa_matrix(es: &EigenSystem, cfg: &PointerConfig) -> CMatrix {
    let e = es.eigenvalues();
    let n = e.len();
    let scale = cfg.levels() as f64;
    let mut k = CMatrix::from_element(n, n, c(1.0));
    for a in 0..n {
        for b in (a + 1)..n {
            let v = pointer_average((e[b] - e[a]) * cfg.t / scale, cfg.r);
            k[(a, b)] = v;
            k[(b, a)] = v.conj();
        }
    }
    k
}

/// Result of one pointer measurement, with the eigenbasis data the run
/// diagnostics need.
#[derive(Debug, Clone)]
pub struct PointerStep {
    pub rho: DensityMatrix,
    /// Post-measurement state in the eigenbasis of the measured `H`.
    pub rho_eigen: CMatrix,
    pub kappa: CMatrix,
}

fn check_state_dim(rho: &DensityMatrix, es: &EigenSystem) -> Result<()> {
    if rho.dim() != es.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: es.dim(),
        });
    }
    Ok(())
}

/// Pointer measurement of `H(next)` on `rho` (computational basis).
///
/// The state is expressed in the `es_prev` eigenbasis, carried to the
/// `es_next` eigenbasis with the overlap unitary, dephased by `κ`, and
/// returned in the computational basis.
pub fn apply_pointer_channel(
    rho: &DensityMatrix,
    es_prev: &EigenSystem,
    es_next: &EigenSystem,
    cfg: &PointerConfig,
) -> Result<DensityMatrix> {
    Ok(pointer_step(rho, es_prev, es_next, cfg)?.rho)
}

pub fn pointer_step(
    rho: &DensityMatrix,
    es_prev: &EigenSystem,
    es_next: &EigenSystem,
    cfg: &PointerConfig,
) -> Result<PointerStep> {
    check_state_dim(rho, es_prev)?;
    let u = overlap_matrix(es_prev, es_next)?;
    let rho_prev = es_prev.to_eigenbasis(rho.matrix());
    let kappa = kappa_matrix(es_next, cfg);
    let rho_eigen = (&u * rho_prev * u.adjoint()).component_mul(&kappa);
    let out = DensityMatrix::new(es_next.from_eigenbasis(&rho_eigen))?;
    Ok(PointerStep {
        rho: out,
        rho_eigen,
        kappa,
    })
}

/// Level groups of `es` whose eigenvalues chain within the grouping
/// tolerance; `group[a]` is the group label of level `a`.
pub(crate) fn degenerate_groups(es: &EigenSystem) -> Vec<usize> {
    let e = es.eigenvalues();
    let mut group = vec![0; e.len()];
    for a in 1..e.len() {
        group[a] = group[a - 1] + usize::from(e[a] - e[a - 1] > PROJECTIVE_GROUPING_TOL);
    }
    group
}

/// Ideal measurement `Σ_a P_a ρ P_a` over the (grouped) eigenprojectors of
/// `es_next`.
pub fn apply_projective_channel(rho: &DensityMatrix, es_next: &EigenSystem) -> Result<DensityMatrix> {
    Ok(projective_step(rho, es_next)?.0)
}

/// Like [`apply_projective_channel`], also returning the state in the
/// eigenbasis of `es_next`.
pub fn projective_step(rho: &DensityMatrix, es_next: &EigenSystem) -> Result<(DensityMatrix, CMatrix)> {
    check_state_dim(rho, es_next)?;
    let group = degenerate_groups(es_next);
    let mut eig = es_next.to_eigenbasis(rho.matrix());
    let n = eig.nrows();
    for a in 0..n {
        for b in 0..n {
            if group[a] != group[b] {
                eig[(a, b)] = c(0.0);
            }
        }
    }
    let out = DensityMatrix::from_raw(es_next.from_eigenbasis(&eig));
    Ok((out, eig))
}

/// Reference implementation of one pointer measurement built on the joint
/// system ⊗ pointer space.
///
/// Prepares `ρ ⊗ |x=0><x=0|`, applies `W = Σ_z exp(-i H z t / 2^r) ⊗ |z><z|`
/// as a full dense unitary, and traces out the pointer.
pub fn joint_evolution_oracle(
    rho: &DensityMatrix,
    h: &HermitianOperator,
    cfg: &PointerConfig,
) -> Result<DensityMatrix> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: h.dim(),
        });
    }
    let sys = h.dim();
    let ptr = cfg.levels();
    let joint = sys
        .checked_mul(ptr)
        .filter(|&d| d <= MAX_JOINT_DIM)
        .ok_or(Error::Size {
            what: "joint dimension",
            value: sys.saturating_mul(ptr),
            cap: MAX_JOINT_DIM,
        })?;

    let (energies, v) = hermitian_eigen(h.matrix())?;
    let momenta = momentum_eigenvalues(cfg.r)?;

    // joint index = system index * ptr + pointer index
    let mut w = CMatrix::zeros(joint, joint);
    for (z, p) in momenta.iter().enumerate() {
        let phases = CVector::from_iterator(
            sys,
            energies.iter().map(|e| Complex64::from_polar(1.0, -e * p * cfg.t)),
        );
        let block = &v * CMatrix::from_diagonal(&phases) * v.adjoint();
        for i in 0..sys {
            for j in 0..sys {
                w[(i * ptr + z, j * ptr + z)] = block[(i, j)];
            }
        }
    }

    let pointer0 = CMatrix::from_element(ptr, ptr, c(1.0 / ptr as f64));
    let rho_joint = rho.matrix().kronecker(&pointer0);
    let evolved = &w * rho_joint * w.adjoint();

    let reduced = CMatrix::from_fn(sys, sys, |i, j| {
        (0..ptr).map(|z| evolved[(i * ptr + z, j * ptr + z)]).sum()
    });
    DensityMatrix::new(reduced)
}

/// Left edge of the window where `|κ(x)|² <= 1/2`.
pub const KAPPA_HALF_WINDOW_LO: f64 = PI / 2.0;

/// Right edge `π (2^r − 1/2)` of that window.
pub fn kappa_half_window_hi(r: u32) -> f64 {
    PI * ((1u64 << r) as f64 - 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{build_transverse_beginning, interpolate};
    use crate::linalg::{max_abs, trace_distance};
    use crate::spectral::eigensystem;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> CVector {
        let v = CVector::from_fn(dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let n = v.norm();
        v / c(n)
    }

    fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> HermitianOperator {
        let a = CMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        HermitianOperator::new((&a + a.adjoint()) * c(0.5)).unwrap()
    }

    #[test]
    fn momentum_values() {
        assert_eq!(momentum_eigenvalues(1).unwrap(), vec![0.0, 0.5]);
        assert_eq!(momentum_eigenvalues(2).unwrap(), vec![0.0, 0.25, 0.5, 0.75]);
        assert!(momentum_eigenvalues(6).unwrap().iter().all(|&p| p < 1.0));
        assert!(momentum_eigenvalues(0).is_err());
        assert!(momentum_eigenvalues(21).is_err());
    }

    #[test]
    fn kappa_peaks() {
        for r in 1..=8 {
            assert_eq!(kappa_weight(0.0, r), 1.0);
            let peak = (1u64 << r) as f64 * PI;
            assert!((kappa_weight(peak, r) - 1.0).abs() < 1e-12);
            assert!((kappa_weight(peak + 1e-9, r) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn kappa_single_qubit_is_cos_squared() {
        for k in 0..200 {
            let x = -20.0 + 0.2 * k as f64;
            assert!((kappa_weight(x, 1) - (x / 2.0).cos().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn kappa_weight_bounds() {
        for r in 1..=5 {
            for k in 0..1000 {
                let x = 0.037 * k as f64;
                let w = kappa_weight(x, r);
                assert!((0.0..=1.0).contains(&w));
            }
        }
    }

    #[test]
    fn kappa_matrix_zero_time_is_all_ones() {
        let es = eigensystem(&build_transverse_beginning(2).unwrap(), None).unwrap();
        let k = kappa_matrix(&es, &PointerConfig::new(3, 0.0).unwrap());
        assert!(k.iter().all(|z| (z - c(1.0)).norm() < 1e-15));
    }

    #[test]
    fn kappa_matrix_direct_sum_and_weight_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(4, &mut rng);
        let es = eigensystem(&h, None).unwrap();
        for r in 1..=4 {
            let cfg = PointerConfig::new(r, 17.3).unwrap();
            let k = kappa_matrix(&es, &cfg);
            let e = es.eigenvalues();
            let levels = cfg.levels();
            for a in 0..4 {
                for b in 0..4 {
                    let direct: Complex64 = (0..levels)
                        .map(|z| Complex64::from_polar(1.0, (e[b] - e[a]) * z as f64 * cfg.t / levels as f64))
                        .sum::<Complex64>()
                        / c(levels as f64);
                    assert!((k[(a, b)] - direct).norm() < 1e-12);
                    let x = (e[b] - e[a]) * cfg.t / 2.0;
                    assert!((k[(a, b)].norm_sqr() - kappa_weight(x, r)).abs() < 1e-12);
                }
            }
            // Gram matrix of pointer states: PSD with unit diagonal
            let min = hermitian_eigenvalues(&k).unwrap()[0];
            assert!(min >= -1e-9);
        }
    }

    #[test]
    fn two_level_single_qubit_offdiagonal() {
        let es = eigensystem(&HermitianOperator::from_diagonal(&[0.2, 1.5]), None).unwrap();
        for t in [0.3, 2.0, 7.7] {
            let k = kappa_matrix(&es, &PointerConfig::new(1, t).unwrap());
            // 2-term sum: (1 + e^{iΔE t/2}) / 2
            let want = (1.3_f64 * t / 4.0).cos().abs();
            assert!((k[(0, 1)].norm() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn pointer_channel_keeps_ground_projector() {
        let h = build_transverse_beginning(2).unwrap();
        let es = eigensystem(&h, None).unwrap();
        let rho = DensityMatrix::pure(&es.ground_state()).unwrap();
        let out = apply_pointer_channel(&rho, &es, &es, &PointerConfig::new(2, 3.0).unwrap()).unwrap();
        assert!(max_abs(&(out.matrix() - rho.matrix())) < 1e-14);
    }

    #[test]
    fn pointer_channel_suppresses_coherence() {
        let es = eigensystem(&HermitianOperator::from_diagonal(&[0.0, 1.0]), None).unwrap();
        let plus = CVector::from_vec(vec![c(0.5f64.sqrt()), c(0.5f64.sqrt())]);
        let rho = DensityMatrix::pure(&plus).unwrap();
        let cfg = PointerConfig::new(3, 9.0).unwrap();
        let out = apply_pointer_channel(&rho, &es, &es, &cfg).unwrap();
        let k01 = kappa_matrix(&es, &cfg)[(0, 1)].norm();
        assert!(k01 < 1.0);
        assert!((out.matrix()[(0, 1)].norm() - 0.5 * k01).abs() < 1e-14);
        assert!((out.trace() - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn pointer_channel_matches_oracle_on_random_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = random_hermitian(4, &mut rng);
        let es = eigensystem(&h, None).unwrap();
        let rho = DensityMatrix::pure(&random_state(4, &mut rng)).unwrap();
        let cfg = PointerConfig::new(3, 4.2).unwrap();
        let a = apply_pointer_channel(&rho, &es, &es, &cfg).unwrap();
        let b = joint_evolution_oracle(&rho, &h, &cfg).unwrap();
        assert!(trace_distance(a.matrix(), b.matrix()).unwrap() <= 1e-10);
    }

    #[test]
    fn oracle_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian(4, &mut rng);
        let rho = DensityMatrix::pure(&random_state(4, &mut rng)).unwrap();
        let out = joint_evolution_oracle(&rho, &h, &PointerConfig::new(2, 0.0).unwrap()).unwrap();
        assert!(max_abs(&(out.matrix() - rho.matrix())) < 1e-12);

        // non-demolition on eigenstates
        let es = eigensystem(&h, None).unwrap();
        let eig = DensityMatrix::pure(&es.vector(2)).unwrap();
        let out = joint_evolution_oracle(&eig, &h, &PointerConfig::new(3, 50.0).unwrap()).unwrap();
        assert!(max_abs(&(out.matrix() - eig.matrix())) < 1e-12);

        let big = build_transverse_beginning(8).unwrap();
        let rho = DensityMatrix::pure(&CVector::from_fn(256, |i, _| c(if i == 0 { 1.0 } else { 0.0 }))).unwrap();
        assert!(matches!(
            joint_evolution_oracle(&rho, &big, &PointerConfig::new(4, 1.0).unwrap()),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn projective_channel_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h = random_hermitian(5, &mut rng);
        let es = eigensystem(&h, None).unwrap();
        let proj = DensityMatrix::pure(&es.vector(1)).unwrap();
        let same = apply_projective_channel(&proj, &es).unwrap();
        assert!(max_abs(&(same.matrix() - proj.matrix())) < 1e-12);

        let rho = DensityMatrix::pure(&random_state(5, &mut rng)).unwrap();
        let once = apply_projective_channel(&rho, &es).unwrap();
        let twice = apply_projective_channel(&once, &es).unwrap();
        assert!(max_abs(&(once.matrix() - twice.matrix())) <= 1e-12);
        once.validate().unwrap();
    }

    #[test]
    fn projective_channel_groups_degenerate_levels() {
        // H_B(2) has a doubly degenerate level at 1; coherence inside it survives
        let hb = build_transverse_beginning(2).unwrap();
        let es = eigensystem(&hb, None).unwrap();
        let psi = (es.vector(1) + es.vector(2)) / c(2f64.sqrt());
        let rho = DensityMatrix::pure(&psi).unwrap();
        let out = apply_projective_channel(&rho, &es).unwrap();
        assert!(max_abs(&(out.matrix() - rho.matrix())) < 1e-12);
    }

    #[test]
    fn strong_pointer_approaches_projective_limit() {
        let es = eigensystem(&HermitianOperator::from_diagonal(&[0.0, 0.7]), None).unwrap();
        let g = 0.7;
        let psi = CVector::from_vec(vec![c(0.6), Complex64::new(0.0, 0.8)]);
        let rho = DensityMatrix::pure(&psi).unwrap();
        let cfg = PointerConfig::new(10, 1e3 / g).unwrap();
        let weak = apply_pointer_channel(&rho, &es, &es, &cfg).unwrap();
        let ideal = apply_projective_channel(&rho, &es).unwrap();
        // |κ_01| ≤ 1 / (2^r |sin(x/2^r)|) with x = g t / 2 = 500
        let bound = 0.48 / (1024.0 * (500.0f64 / 1024.0).sin().abs());
        assert!(trace_distance(weak.matrix(), ideal.matrix()).unwrap() <= bound);
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(CMatrix::identity(2, 2)).is_err());
        assert!(DensityMatrix::new(CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.5), c(-0.5)]))).is_err());
        assert!(DensityMatrix::pure(&CVector::from_vec(vec![c(1.0), c(1.0)])).is_err());
        let hb = build_transverse_beginning(1).unwrap();
        let h = interpolate(&hb, &HermitianOperator::zeros(2), 0.5).unwrap();
        assert_eq!(h.dim(), 2);
    }

    #[test]
    fn pointer_config_caps() {
        assert!(PointerConfig::new(0, 1.0).is_err());
        assert!(PointerConfig::new(21, 1.0).is_err());
        assert!(PointerConfig::new(3, -1.0).is_err());
        assert!(PointerConfig::new(3, f64::NAN).is_err());
        assert_eq!(PointerConfig::new(3, 1.0).unwrap().levels(), 8);
    }
}
