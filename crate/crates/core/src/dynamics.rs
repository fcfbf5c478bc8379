//! Lindblad superoperator assembly, jump feedback, steady states, and a
//! time-propagation oracle.
//!
//! Vectorization convention (fixed once, everything below derives from it):
//! density matrices are column-stacked, vec(ρ)[j·D + i] = ρ[i, j], so that
//! vec(AρB) = (Bᵀ ⊗ A) vec(ρ) and the Kronecker index layout is
//! (F ⊗ G)[(a·D + b), (c·D + e)] = F[a, c]·G[b, e].

use faer::linalg::solvers::Solve;
use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{
    cavity_annihilation, excitation_projector, lowering_op, raising_op, sin_cos_pi,
    CMatrix, ExcitationBasis, OperatorMatrix, ONE,
};
use crate::model::ChainModel;

/// One incoherent channel: rate γ and jump operator s of γ L_s[ρ].
#[derive(Clone, Debug)]
pub struct JumpChannel {
    pub rate: f64,
    pub operator: OperatorMatrix,
}

impl JumpChannel {
    pub fn new(rate: f64, operator: OperatorMatrix) -> Result<Self> {
        if rate < 0.0 || !rate.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "jump rate must be >= 0, got {rate}"
            )));
        }
        Ok(Self { rate, operator })
    }
}

/// Dense D²×D² generator acting on column-stacked density matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    basis: ExcitationBasis,
    mat: CMatrix,
}

impl Superoperator {
    pub fn basis(&self) -> ExcitationBasis {
        self.basis
    }

    /// Dimension of the vectorized space, (N+2)².
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Apply to an operator: devec(L vec(ρ)).
    pub fn apply(&self, rho: &OperatorMatrix) -> OperatorMatrix {
        let v = vectorize(rho);
        devectorize(self.basis, &(&self.mat * v))
    }

    /// Largest elementwise |self − other|.
    pub fn max_abs_diff(&self, other: &Superoperator) -> f64 {
        assert_eq!(self.basis, other.basis, "superoperator basis mismatch");
        (&self.mat - &other.mat)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest |⟨vec(1)| L| entry: how strongly the generator violates trace
    /// preservation. Zero (to round-off) for any valid Lindblad generator.
    pub fn trace_preservation_defect(&self) -> f64 {
        let d2 = self.dim();
        let d = self.basis.dim();
        let mut worst = 0.0f64;
        for col in 0..d2 {
            let mut acc = Complex64::default();
            for j in 0..d {
                acc += self.mat[(j * d + j, col)];
            }
            worst = worst.max(acc.norm());
        }
        worst
    }

    pub fn scale(&self, c: f64) -> Superoperator {
        Superoperator {
            basis: self.basis,
            mat: &self.mat * Complex64::from(c),
        }
    }

    pub fn add(&self, other: &Superoperator) -> Superoperator {
        assert_eq!(self.basis, other.basis, "superoperator basis mismatch");
        Superoperator {
            basis: self.basis,
            mat: &self.mat + &other.mat,
        }
    }
}

/// Column-stack an operator into a vector.
pub fn vectorize(rho: &OperatorMatrix) -> DVector<Complex64> {
    let d = rho.dim();
    DVector::from_fn(d * d, |k, _| rho[(k % d, k / d)])
}

/// Inverse of [`vectorize`].
pub fn devectorize(basis: ExcitationBasis, v: &DVector<Complex64>) -> OperatorMatrix {
    let d = basis.dim();
    assert_eq!(v.len(), d * d, "vector length must be dim²");
    let mat = CMatrix::from_fn(d, d, |i, j| v[j * d + i]);
    OperatorMatrix::from_matrix(basis, mat)
}

/// Lindblad dissipator L_s[ρ] = sρs† − ½{s†s, ρ} at unit rate.
pub fn dissipator(s: &OperatorMatrix, rho: &OperatorMatrix) -> Result<OperatorMatrix> {
    if s.basis() != rho.basis() {
        return Err(Error::DimensionMismatch(format!(
            "jump operator dim {} vs state dim {}",
            s.dim(),
            rho.dim()
        )));
    }
    let s_dag = s.adjoint();
    let sds = &s_dag * s;
    let jump = &(s * rho) * &s_dag;
    let anti = &(&sds * rho) + &(rho * &sds);
    Ok(&jump - &anti.scale(Complex64::new(0.5, 0.0)))
}

/// Accumulate coeff·(conj(s) ⊗ s) into `big`, skipping zero entries of s.
/// This is the vectorized sρs† term; jump operators here have O(1) nonzeros,
/// so the quadratic loop over entries is cheap.
fn add_jump_term(big: &mut CMatrix, s: &CMatrix, coeff: f64) {
    let d = s.nrows();
    let mut nonzero: Vec<(usize, usize, Complex64)> = Vec::new();
    for j in 0..d {
        for i in 0..d {
            let z = s[(i, j)];
            if z != Complex64::default() {
                nonzero.push((i, j, z));
            }
        }
    }
    let c = Complex64::from(coeff);
    for &(a, cc, za) in &nonzero {
        let left = c * za.conj();
        for &(b, e, zb) in &nonzero {
            big[(a * d + b, cc * d + e)] += left * zb;
        }
    }
}

/// Vectorized generator of ρ̇ = −i[H, ρ] + Σ_k rate_k L_{s_k}[ρ].
pub fn build_liouvillian(h: &OperatorMatrix, channels: &[JumpChannel]) -> Result<Superoperator> {
    if !h.is_hermitian(1e-12) {
        return Err(Error::InvalidArgument(format!(
            "Hamiltonian must be Hermitian (defect {:.3e})",
            h.hermiticity_defect()
        )));
    }
    let basis = h.basis();
    let d = basis.dim();
    for ch in channels {
        if ch.operator.basis() != basis {
            return Err(Error::DimensionMismatch(format!(
                "jump operator dim {} vs Hamiltonian dim {}",
                ch.operator.dim(),
                d
            )));
        }
        if ch.rate < 0.0 || !ch.rate.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "jump rate must be >= 0, got {}",
                ch.rate
            )));
        }
    }

    // K = Σ rate·s†s collects every anticommutator piece.
    let mut k_op = CMatrix::zeros(d, d);
    for ch in channels {
        let s = ch.operator.matrix();
        k_op += (s.adjoint() * s) * Complex64::from(ch.rate);
    }

    let minus_i = Complex64::new(0.0, -1.0);
    let half = Complex64::new(0.5, 0.0);
    // I ⊗ (−iH − K/2) and (iHᵀ − Kᵀ/2) ⊗ I
    let left = h.matrix() * minus_i - &k_op * half;
    let right = h.matrix().transpose() * (-minus_i) - k_op.transpose() * half;

    let mut big = CMatrix::zeros(d * d, d * d);
    for block in 0..d {
        for e in 0..d {
            for b in 0..d {
                big[(block * d + b, block * d + e)] += left[(b, e)];
            }
        }
    }
    for a in 0..d {
        for c in 0..d {
            let z = right[(a, c)];
            if z != Complex64::default() {
                for b in 0..d {
                    big[(a * d + b, c * d + b)] += z;
                }
            }
        }
    }
    for ch in channels {
        if ch.rate != 0.0 {
            add_jump_term(&mut big, ch.operator.matrix(), ch.rate);
        }
    }
    Ok(Superoperator { basis, mat: big })
}

/// The incoherent channel set of the plain master equation: molecular decay
/// γ_d on every σ_m^-, pure dephasing γ_φ on every σ_m^+σ_m^-, cavity decay
/// κ on a, and the incoherent pump γ_p on σ_1^+.
pub fn lindblad_channels(model: &ChainModel) -> Result<Vec<JumpChannel>> {
    let basis = model.basis()?;
    let n = model.n_molecules;
    let mut channels = Vec::with_capacity(2 * n + 2);
    for m in 1..=n {
        channels.push(JumpChannel::new(model.gamma_d(), lowering_op(basis, m)?)?);
    }
    for m in 1..=n {
        channels.push(JumpChannel::new(
            model.gamma_phi,
            excitation_projector(basis, m)?,
        )?);
    }
    channels.push(JumpChannel::new(model.gamma_p, raising_op(basis, 1)?)?);
    channels.push(JumpChannel::new(model.kappa, cavity_annihilation(basis))?);
    Ok(channels)
}

/// Jump-feedback unitary U_fb = exp(−iλπ σ_target^x) on the truncated space:
/// a rotation by λπ on the block {|G,0⟩, |e_target,0⟩} and the identity on
/// every other basis state (the compressed σ^x annihilates them).
pub fn feedback_unitary(
    basis: ExcitationBasis,
    target: usize,
    lambda: f64,
) -> Result<OperatorMatrix> {
    let idx = basis.molecule(target)?;
    if !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "feedback amplitude must be finite, got {lambda}"
        )));
    }
    let (s, c) = sin_cos_pi(lambda);
    let mut u = OperatorMatrix::identity(basis);
    let g = basis.ground();
    u.matrix_mut()[(g, g)] = Complex64::new(c, 0.0);
    u.matrix_mut()[(idx, idx)] = Complex64::new(c, 0.0);
    u.matrix_mut()[(g, idx)] = Complex64::new(0.0, -s);
    u.matrix_mut()[(idx, g)] = Complex64::new(0.0, -s);
    Ok(u)
}

/// Channel set with the cavity jump split by detector efficiency:
/// κη L_{U_fb a} + κ(1−η) L_a; the molecular channels are unchanged.
/// At η = 0 this is exactly [`lindblad_channels`] (identical construction).
pub fn feedback_channels(
    model: &ChainModel,
    target: usize,
    lambda: f64,
    eta: f64,
) -> Result<Vec<JumpChannel>> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidArgument(format!(
            "detector efficiency eta must lie in [0, 1], got {eta}"
        )));
    }
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "feedback amplitude lambda must be >= 0, got {lambda}"
        )));
    }
    if eta == 0.0 {
        return lindblad_channels(model);
    }
    let basis = model.basis()?;
    let mut channels = lindblad_channels(model)?;
    // replace the bare cavity channel appended last
    channels.pop();
    let u = feedback_unitary(basis, target, lambda)?;
    let dressed = &u * &cavity_annihilation(basis);
    channels.push(JumpChannel::new(model.kappa * eta, dressed)?);
    if eta < 1.0 {
        channels.push(JumpChannel::new(
            model.kappa * (1.0 - eta),
            cavity_annihilation(basis),
        )?);
    }
    Ok(channels)
}

/// Liouvillian with the jump-feedback cavity channel. η = 0 reproduces the
/// plain Liouvillian bit for bit; η = 1 is the perfect-detection equation.
pub fn build_feedback_liouvillian(
    h: &OperatorMatrix,
    model: &ChainModel,
    target: usize,
    lambda: f64,
    eta: f64,
) -> Result<Superoperator> {
    let channels = feedback_channels(model, target, lambda, eta)?;
    build_liouvillian(h, &channels)
}

/// Hamiltonian + Liouvillian for a model, honoring its feedback settings.
pub fn build_model_liouvillian(model: &ChainModel) -> Result<(OperatorMatrix, Superoperator)> {
    let h = crate::model::build_hamiltonian(model)?;
    let l = match &model.feedback {
        Some(fb) => build_feedback_liouvillian(&h, model, fb.target, fb.lambda, fb.eta)?,
        None => build_liouvillian(&h, &lindblad_channels(model)?)?,
    };
    Ok((h, l))
}

/// Steady state with its solve diagnostics.
#[derive(Clone, Debug)]
pub struct SteadyState {
    pub rho: OperatorMatrix,
    /// ‖L vec(ρ)‖₂ of the returned state, in eV.
    pub residual_norm: f64,
    /// Some(true) after the SVD audit confirmed a one-dimensional null
    /// space; None when the audit was skipped.
    pub nullity_flag: Option<bool>,
}

const RESIDUAL_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-12;
const HERMITICITY_TOL: f64 = 1e-12;
const MIN_EIGENVALUE_FLOOR: f64 = -1e-10;
/// Smallest acceptable ratio of the second-smallest to largest singular
/// value of L for the steady state to count as unique.
const UNIQUENESS_RATIO: f64 = 1e-8;

fn to_faer(m: &CMatrix) -> faer::Mat<Complex64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Solve L vec(ρ) = 0 with Tr ρ = 1 by replacing the first row of L with the
/// vectorized trace functional and solving the dense system, then verify
/// residual, trace, Hermiticity, and positivity.
pub fn steady_state(l: &Superoperator) -> Result<SteadyState> {
    solve_steady_state(l, false)
}

/// [`steady_state`] plus the O(D⁶) SVD uniqueness audit; intended for tests
/// and the verification battery.
pub fn steady_state_audited(l: &Superoperator) -> Result<SteadyState> {
    solve_steady_state(l, true)
}

fn solve_steady_state(l: &Superoperator, audit: bool) -> Result<SteadyState> {
    let defect = l.trace_preservation_defect();
    if defect > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "generator is not trace preserving (defect {defect:.3e})"
        )));
    }
    let d = l.basis.dim();
    let d2 = l.dim();

    let mut system = to_faer(&l.mat);
    for col in 0..d2 {
        system[(0, col)] = Complex64::default();
    }
    for j in 0..d {
        system[(0, j * d + j)] = ONE;
    }
    let mut rhs = faer::Mat::<Complex64>::zeros(d2, 1);
    rhs[(0, 0)] = ONE;

    let solution = system.partial_piv_lu().solve(&rhs);
    let x = DVector::from_fn(d2, |k, _| solution[(k, 0)]);

    let residual_norm = (&l.mat * &x).norm();
    if !residual_norm.is_finite() || residual_norm > RESIDUAL_TOL {
        return Err(Error::Convergence(format!(
            "steady-state residual {residual_norm:.3e} exceeds {RESIDUAL_TOL:.0e}"
        )));
    }

    let rho = devectorize(l.basis, &x);
    let trace = rho.trace();
    if (trace - ONE).norm() > TRACE_TOL {
        return Err(Error::Convergence(format!(
            "steady-state trace {trace} deviates from 1 beyond {TRACE_TOL:.0e}"
        )));
    }
    let herm = rho.hermiticity_defect();
    if herm > HERMITICITY_TOL {
        return Err(Error::Convergence(format!(
            "steady state is not Hermitian (defect {herm:.3e})"
        )));
    }
    let min_eig = rho
        .hermitian_eigenvalues()
        .first()
        .copied()
        .unwrap_or(f64::NAN);
    if !(min_eig >= MIN_EIGENVALUE_FLOOR) {
        return Err(Error::Convergence(format!(
            "steady state has negative eigenvalue {min_eig:.3e}"
        )));
    }

    let nullity_flag = if audit {
        let values = to_faer(&l.mat).singular_values().map_err(|e| {
            Error::Convergence(format!("SVD of the Liouvillian failed: {e:?}"))
        })?;
        let largest = values[0];
        let second_smallest = values[d2 - 2];
        if second_smallest < UNIQUENESS_RATIO * largest {
            return Err(Error::DegenerateSteadyState(format!(
                "second-smallest singular value {second_smallest:.3e} below \
                 {UNIQUENESS_RATIO:.0e} × largest {largest:.3e}"
            )));
        }
        Some(true)
    } else {
        None
    };

    Ok(SteadyState {
        rho,
        residual_norm,
        nullity_flag,
    })
}

/// Time-evolve ρ₀ by exp(L·t) via the dense matrix exponential
/// (scaling-and-squaring). Independent of the steady-state solver; used as
/// its oracle.
pub fn propagate(l: &Superoperator, rho0: &OperatorMatrix, t: f64) -> Result<OperatorMatrix> {
    if rho0.basis() != l.basis {
        return Err(Error::DimensionMismatch(
            "initial state dimension does not match the generator".into(),
        ));
    }
    if (rho0.trace() - ONE).norm() > 1e-10 || rho0.hermiticity_defect() > 1e-10 {
        return Err(Error::InvalidArgument(
            "initial state must be a unit-trace Hermitian density matrix".into(),
        ));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "propagation time must be >= 0, got {t}"
        )));
    }
    let propagator = (&l.mat * Complex64::from(t)).exp();
    let out = &propagator * vectorize(rho0);
    let rho_t = devectorize(l.basis, &out);
    let trace = rho_t.trace();
    if (trace - ONE).norm() > 1e-10 {
        return Err(Error::NumericalInconsistency(format!(
            "propagation lost trace: Tr ρ(t) = {trace}"
        )));
    }
    Ok(rho_t)
}

/// Smallest strictly positive channel rate of a model; sets the oracle
/// horizon t = 100 / min(rate).
pub fn min_positive_rate(model: &ChainModel) -> f64 {
    [model.gamma_d(), model.gamma_phi, model.kappa, model.gamma_p]
        .into_iter()
        .filter(|r| *r > 0.0)
        .fold(f64::INFINITY, f64::min)
}
