//! Self-contained verification battery: structural identities of the
//! generators, the steady-state-versus-propagation oracle, and determinism
//! of seeded sweeps. Runs in seconds (chain lengths ≤ 3) and backs both the
//! `verify` CLI subcommand and the acceptance suite.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{
    build_feedback_liouvillian, build_liouvillian, build_model_liouvillian, feedback_unitary,
    lindblad_channels, min_positive_rate, propagate, steady_state, steady_state_audited,
};
use crate::experiments::{run_sweep, SweepSpec, SweptParameter};
use crate::hilbert::{ExcitationBasis, OperatorMatrix, ONE};
use crate::model::{build_hamiltonian, ChainModel, FeedbackSettings};
use crate::observables::{solve_channel, Channel};

/// Outcome of one named check.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Measured figure of merit and its bound, for the report table.
    pub detail: String,
}

impl CheckResult {
    fn measured(name: &'static str, value: f64, bound: f64) -> Self {
        CheckResult {
            name,
            passed: value <= bound,
            detail: format!("measured {value:.3e}, bound {bound:.3e}"),
        }
    }
}

fn oracle_model(
    n: usize,
    omega_rabi: f64,
    hopping: bool,
    dephasing: bool,
    feedback: Option<FeedbackSettings>,
) -> ChainModel {
    let mut model = ChainModel::defaults(n).expect("n >= 1");
    model.set_omega_rabi(omega_rabi).expect("omega_rabi >= 0");
    model.hopping_enabled = hopping;
    if !dephasing {
        // strictly positive rates are required; "off" means negligible
        model.gamma_phi = 1e-12;
    }
    // pump raised from the production default so the oracle horizon
    // t = 100/min(rate) keeps the matrix exponential accurate
    model.gamma_p = 1e-3;
    model.feedback = feedback;
    model.resolve_zero_detuning();
    model
}

/// The twelve pump/decay/dephasing/cavity/feedback on-off combinations used
/// by the oracle-equivalence check, for each chain length 1..=3.
fn oracle_configurations(n: usize) -> Vec<(String, ChainModel)> {
    let fb = |lambda: f64, eta: f64| {
        Some(FeedbackSettings {
            target: n,
            lambda,
            eta,
        })
    };
    vec![
        ("decay only".to_string(), oracle_model(n, 0.0, false, false, None)),
        ("decay+dephasing".to_string(), oracle_model(n, 0.0, false, true, None)),
        ("hopping".to_string(), oracle_model(n, 0.0, true, false, None)),
        ("hopping+dephasing".to_string(), oracle_model(n, 0.0, true, true, None)),
        ("cavity".to_string(), oracle_model(n, 0.6, false, false, None)),
        ("cavity+dephasing".to_string(), oracle_model(n, 0.6, false, true, None)),
        ("cavity+hopping".to_string(), oracle_model(n, 0.6, true, true, None)),
        ("weak cavity".to_string(), oracle_model(n, 0.1, true, true, None)),
        (
            "feedback eta=1".to_string(),
            oracle_model(n, 0.6, true, true, fb(0.5, 1.0)),
        ),
        (
            "feedback eta=0.7".to_string(),
            oracle_model(n, 0.6, true, true, fb(0.3, 0.7)),
        ),
        (
            "feedback lambda=1".to_string(),
            oracle_model(n, 0.6, true, true, fb(1.0, 1.0)),
        ),
        (
            "feedback no cavity".to_string(),
            oracle_model(n, 0.0, true, true, fb(0.5, 1.0)),
        ),
    ]
}

fn check_trace_preservation() -> CheckResult {
    let mut worst = 0.0f64;
    for n in 1..=3 {
        for (_, model) in oracle_configurations(n) {
            let (_, l) = match build_model_liouvillian(&model) {
                Ok(v) => v,
                Err(e) => {
                    return CheckResult {
                        name: "liouvillian trace preservation",
                        passed: false,
                        detail: format!("build failed: {e}"),
                    }
                }
            };
            worst = worst.max(l.trace_preservation_defect());
        }
    }
    CheckResult::measured("liouvillian trace preservation", worst, 1e-12)
}

fn check_hermiticity_preservation() -> CheckResult {
    let mut model = ChainModel::defaults(3).expect("valid");
    model.set_omega_rabi(0.8).expect("valid");
    model.resolve_zero_detuning();
    let (_, l) = build_model_liouvillian(&model).expect("valid model");
    let basis = model.basis().expect("valid");
    let d = basis.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let mut rho = OperatorMatrix::zeros(basis);
        for i in 0..d {
            rho.matrix_mut()[(i, i)] = Complex64::from(rng.random::<f64>());
            for j in (i + 1)..d {
                let z = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                rho.matrix_mut()[(i, j)] = z;
                rho.matrix_mut()[(j, i)] = z.conj();
            }
        }
        let out = l.apply(&rho);
        worst = worst.max(out.hermiticity_defect());
    }
    CheckResult::measured("hermiticity preservation", worst, 1e-12)
}

fn check_oracle_equivalence() -> CheckResult {
    let mut worst = 0.0f64;
    let mut worst_label = String::new();
    for n in 1..=3 {
        for (label, model) in oracle_configurations(n) {
            let (_, l) = match build_model_liouvillian(&model) {
                Ok(v) => v,
                Err(e) => {
                    return CheckResult {
                        name: "steady state vs propagation oracle",
                        passed: false,
                        detail: format!("{label} (n={n}): build failed: {e}"),
                    }
                }
            };
            let ss = match steady_state(&l) {
                Ok(v) => v,
                Err(e) => {
                    return CheckResult {
                        name: "steady state vs propagation oracle",
                        passed: false,
                        detail: format!("{label} (n={n}): solve failed: {e}"),
                    }
                }
            };
            let basis = model.basis().expect("valid");
            let mut rho0 = OperatorMatrix::zeros(basis);
            rho0.matrix_mut()[(0, 0)] = ONE;
            let t = 100.0 / min_positive_rate(&model);
            let rho_t = match propagate(&l, &rho0, t) {
                Ok(v) => v,
                Err(e) => {
                    return CheckResult {
                        name: "steady state vs propagation oracle",
                        passed: false,
                        detail: format!("{label} (n={n}): propagation failed: {e}"),
                    }
                }
            };
            let diff = (&ss.rho - &rho_t).frobenius_norm();
            if diff > worst {
                worst = diff;
                worst_label = format!("{label} (n={n})");
            }
        }
    }
    let mut result = CheckResult::measured("steady state vs propagation oracle", worst, 1e-8);
    result.detail = format!("{} (worst: {worst_label})", result.detail);
    result
}

fn check_eta_zero_reduction() -> CheckResult {
    let mut model = ChainModel::defaults(3).expect("valid");
    model.set_omega_rabi(0.7).expect("valid");
    model.resolve_zero_detuning();
    let h = build_hamiltonian(&model).expect("valid");
    let plain = build_liouvillian(&h, &lindblad_channels(&model).expect("valid")).expect("valid");
    let fb = build_feedback_liouvillian(&h, &model, 3, 0.5, 0.0).expect("valid");
    let diff = plain.max_abs_diff(&fb);
    CheckResult {
        name: "eta = 0 reduces to the plain master equation",
        passed: diff == 0.0,
        detail: format!("max elementwise difference {diff:.3e}, required exactly 0"),
    }
}

fn check_lambda_noop() -> CheckResult {
    let mut model = ChainModel::defaults(3).expect("valid");
    model.set_omega_rabi(0.8).expect("valid");
    model.resolve_zero_detuning();
    let reference = solve_channel(&model, Channel::Full, None)
        .expect("solve")
        .sigma_e;
    let mut worst = 0.0f64;
    for lambda in [0.0, 1.0] {
        let mut fb_model = model.clone();
        fb_model.feedback = Some(FeedbackSettings {
            target: 3,
            lambda,
            eta: 1.0,
        });
        let sigma = solve_channel(&fb_model, Channel::Full, None)
            .expect("solve")
            .sigma_e;
        worst = worst.max((sigma - reference).abs() / reference);
    }
    CheckResult::measured("lambda in {0, 1} leaves the conductance unchanged", worst, 1e-12)
}

fn check_eta_affinity() -> CheckResult {
    let mut model = ChainModel::defaults(2).expect("valid");
    model.set_omega_rabi(0.5).expect("valid");
    model.resolve_zero_detuning();
    let h = build_hamiltonian(&model).expect("valid");
    let l0 = build_feedback_liouvillian(&h, &model, 2, 0.4, 0.0).expect("valid");
    let l1 = build_feedback_liouvillian(&h, &model, 2, 0.4, 1.0).expect("valid");
    let scale = l1
        .matrix()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for eta in [0.2, 0.25, 0.5, 0.75, 0.9] {
        let l_eta = build_feedback_liouvillian(&h, &model, 2, 0.4, eta).expect("valid");
        let combo = l0.scale(1.0 - eta).add(&l1.scale(eta));
        worst = worst.max(l_eta.max_abs_diff(&combo) / scale);
    }
    CheckResult::measured("liouvillian is affine in eta", worst, 1e-13)
}

fn check_feedback_unitarity() -> CheckResult {
    let basis = ExcitationBasis::new(4).expect("valid");
    let id = OperatorMatrix::identity(basis);
    let mut worst = 0.0f64;
    for lambda in [0.0, 0.13, 0.5, 0.77, 1.0, 1.62] {
        let u = feedback_unitary(basis, 2, lambda).expect("valid");
        worst = worst.max((&(&u.adjoint() * &u) - &id).max_abs());
    }
    CheckResult::measured("feedback unitary satisfies U†U = 1", worst, 1e-14)
}

fn check_steady_state_positivity() -> CheckResult {
    let mut worst = f64::INFINITY;
    for n in 1..=3 {
        for (label, model) in oracle_configurations(n) {
            let (_, l) = build_model_liouvillian(&model).expect("valid");
            match steady_state_audited(&l) {
                Ok(ss) => {
                    let min_eig = ss.rho.hermitian_eigenvalues()[0];
                    worst = worst.min(min_eig);
                }
                Err(e) => {
                    return CheckResult {
                        name: "steady-state positivity and uniqueness",
                        passed: false,
                        detail: format!("{label} (n={n}): {e}"),
                    }
                }
            }
        }
    }
    CheckResult {
        name: "steady-state positivity and uniqueness",
        passed: worst >= -1e-10,
        detail: format!("smallest eigenvalue {worst:.3e}, floor -1e-10; null spaces audited"),
    }
}

fn check_pump_linearity() -> CheckResult {
    let mut model = ChainModel::defaults(3).expect("valid");
    model.set_omega_rabi(0.8).expect("valid");
    model.resolve_zero_detuning();
    let sigma_full = solve_channel(&model, Channel::Full, None)
        .expect("solve")
        .sigma_e;
    let mut half = model.clone();
    half.gamma_p *= 0.5;
    let sigma_half = solve_channel(&half, Channel::Full, None)
        .expect("solve")
        .sigma_e;
    let shift = (sigma_half - sigma_full).abs() / sigma_full;
    CheckResult::measured("conductance is linear in the pump rate", shift, 0.01)
}

fn check_sweep_determinism() -> CheckResult {
    let spec = SweepSpec {
        base: ChainModel::defaults(3).expect("valid"),
        parameter: SweptParameter::OmegaRabi,
        grid: vec![0.2, 0.6, 1.0],
        channels: vec![Channel::Full, Channel::NoHopping],
        ensemble: 3,
        base_seed: 1_234,
        disorder_q: 0.05,
        fix_ends: true,
    };
    let a = run_sweep(&spec).expect("sweep");
    let b = run_sweep(&spec).expect("sweep");
    let identical = a.rows.len() == b.rows.len()
        && a.rows.iter().zip(&b.rows).all(|(ra, rb)| {
            ra.stat.mean.to_bits() == rb.stat.mean.to_bits()
                && ra.stat.stderr.to_bits() == rb.stat.stderr.to_bits()
                && ra.stat.count == rb.stat.count
        });
    CheckResult {
        name: "seeded sweeps are bit-identical on repeat",
        passed: identical,
        detail: if identical {
            "two runs produced identical bits".to_string()
        } else {
            "repeated run diverged".to_string()
        },
    }
}

/// Run every check. Total runtime is a few seconds.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        check_trace_preservation(),
        check_hermiticity_preservation(),
        check_oracle_equivalence(),
        check_eta_zero_reduction(),
        check_lambda_noop(),
        check_eta_affinity(),
        check_feedback_unitarity(),
        check_steady_state_positivity(),
        check_pump_linearity(),
        check_sweep_determinism(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_battery_passes() {
        let results = run_all();
        for r in &results {
            assert!(r.passed, "check '{}' failed: {}", r.name, r.detail);
        }
        assert_eq!(results.len(), 10);
    }
}
