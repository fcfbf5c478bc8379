//! Exciton conductance and the three-channel decomposition.

use num_complex::Complex64;

use crate::dynamics::{build_model_liouvillian, dissipator, steady_state, SteadyState};
use crate::error::{Error, Result};
use crate::hilbert::{lowering_op, OperatorMatrix};
use crate::model::ChainModel;

/// Transport channel selector: the model as configured, the weak-coupling
/// limit (cavity coupling removed, hopping only), or the no-hopping limit
/// (cavity transport only).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Channel {
    Full,
    WeakCoupling,
    NoHopping,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Full, Channel::WeakCoupling, Channel::NoHopping];

    pub fn tag(&self) -> &'static str {
        match self {
            Channel::Full => "full",
            Channel::WeakCoupling => "wc",
            Channel::NoHopping => "nh",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Channel> {
        match tag {
            "full" => Ok(Channel::Full),
            "wc" => Ok(Channel::WeakCoupling),
            "nh" => Ok(Channel::NoHopping),
            other => Err(Error::InvalidArgument(format!(
                "unknown channel tag {other:?} (expected full, wc, or nh)"
            ))),
        }
    }

    /// The model actually solved for this channel.
    pub fn apply_to(&self, model: &ChainModel) -> ChainModel {
        let mut out = model.clone();
        match self {
            Channel::Full => {}
            Channel::WeakCoupling => out.cavity_coupling_enabled = false,
            Channel::NoHopping => out.hopping_enabled = false,
        }
        out
    }
}

/// Provenance of one conductance number.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSnapshot {
    pub n_molecules: usize,
    pub omega_rabi: f64,
    pub lambda: Option<f64>,
    pub eta: Option<f64>,
    pub feedback_target: Option<usize>,
    pub seed: Option<u64>,
}

impl ModelSnapshot {
    pub fn of(model: &ChainModel, seed: Option<u64>) -> Self {
        Self {
            n_molecules: model.n_molecules,
            omega_rabi: model.omega_rabi(),
            lambda: model.feedback.as_ref().map(|f| f.lambda),
            eta: model.feedback.as_ref().map(|f| f.eta),
            feedback_target: model.feedback.as_ref().map(|f| f.target),
            seed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConductanceResult {
    /// Exciton conductance σ_e in eV (reported as a magnitude; see
    /// `raw_trace` for the signed value).
    pub sigma_e: f64,
    /// Signed value of γ_d·Tr(H L_{σ_M^-}[ρ_ss])/γ_p before taking the
    /// magnitude. Physically ≤ 0: the decay channel removes energy.
    pub raw_trace: f64,
    pub channel: Channel,
    pub snapshot: ModelSnapshot,
}

/// Relative bound on the imaginary part of the conductance trace.
const IMAGINARY_TOL: f64 = 1e-9;
/// Absolute floor (eV) below which round-off noise may carry either sign.
const SIGN_NOISE_FLOOR: f64 = 1e-14;

/// Exciton conductance σ_e = |γ_d·Tr(H L_{σ_M^-}[ρ_ss])/γ_p| per the energy
/// current through the last molecule's decay channel.
///
/// The raw trace must be real (to `IMAGINARY_TOL` relative) and non-positive
/// (to round-off): a genuinely positive value signals an inconsistent state
/// or Hamiltonian and aborts rather than being silently folded into the
/// magnitude.
pub fn exciton_conductance(
    h: &OperatorMatrix,
    rho_ss: &SteadyState,
    gamma_d: f64,
    gamma_p: f64,
) -> Result<(f64, f64)> {
    if gamma_d <= 0.0 || gamma_p <= 0.0 {
        return Err(Error::InvalidArgument(
            "gamma_d and gamma_p must be strictly positive".into(),
        ));
    }
    let basis = h.basis();
    let last = basis.n_molecules();
    let sigma_last = lowering_op(basis, last)?;
    let flux = dissipator(&sigma_last, &rho_ss.rho)?;
    let trace: Complex64 = (h * &flux).trace();
    let raw = trace * Complex64::from(gamma_d / gamma_p);

    if raw.im.abs() > IMAGINARY_TOL * raw.re.abs() + 1e-18 {
        return Err(Error::NumericalInconsistency(format!(
            "conductance trace has imaginary part {:.3e} vs real part {:.3e}",
            raw.im, raw.re
        )));
    }
    if raw.re > SIGN_NOISE_FLOOR {
        return Err(Error::NumericalInconsistency(format!(
            "conductance trace is positive ({:.3e} eV); the decay channel \
             must remove energy",
            raw.re
        )));
    }
    Ok((raw.re.abs(), raw.re))
}

/// Solve one channel variant of a model end to end: rebuild the Hamiltonian
/// and Liouvillian for the channel-modified model, find its steady state,
/// and evaluate the conductance against that same Hamiltonian.
pub fn solve_channel(
    model: &ChainModel,
    channel: Channel,
    seed: Option<u64>,
) -> Result<ConductanceResult> {
    let chan_model = channel.apply_to(model);
    let (h, l) = build_model_liouvillian(&chan_model)?;
    let ss = steady_state(&l)?;
    let (sigma_e, raw_trace) = exciton_conductance(&h, &ss, chan_model.gamma_d(), chan_model.gamma_p)?;
    Ok(ConductanceResult {
        sigma_e,
        raw_trace,
        channel,
        snapshot: ModelSnapshot::of(&chan_model, seed),
    })
}

/// Conductance for each requested channel of one model.
pub fn channel_conductances(
    model: &ChainModel,
    channels: &[Channel],
) -> Result<Vec<ConductanceResult>> {
    channels
        .iter()
        .map(|&c| solve_channel(model, c, None))
        .collect()
}
