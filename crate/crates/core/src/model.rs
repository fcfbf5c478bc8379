//! Physical parameterization and Hamiltonian assembly.
//!
//! Units: ħ = 1 and every energy or rate is in eV. Dipole moments are given
//! in Debye and intermolecular spacing in nanometers; the dipole-dipole
//! coupling is evaluated in SI and converted to eV.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::hilbert::{ExcitationBasis, OperatorMatrix};

/// 1 Debye in C·m.
pub const DEBYE_TO_COULOMB_METER: f64 = 3.33564e-30;
/// Coulomb constant 1/(4πε₀) in N·m²/C².
pub const COULOMB_CONSTANT: f64 = 8.9875517873681764e9;
/// Elementary charge in C (converts Joule to eV).
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;

/// Default parameter set: molecular and cavity rates from the literature on
/// organic microcavities, plus artifact choices for the quantities the
/// literature leaves open (geometry, pump).
pub mod defaults {
    /// Cavity mode energy ω₀ (eV).
    pub const OMEGA_CAVITY: f64 = 2.11;
    /// Molecular exciton energy ω_m (eV), uniform chain.
    pub const OMEGA_MOLECULE: f64 = 2.11;
    /// Radiative decay rate γ_r (eV).
    pub const GAMMA_R: f64 = 1.32e-6;
    /// Nonradiative decay rate γ_nr (eV).
    pub const GAMMA_NR: f64 = 1.10e-3;
    /// Pure dephasing rate γ_φ (eV).
    pub const GAMMA_PHI: f64 = 26.3e-3;
    /// Cavity decay rate κ (eV).
    pub const KAPPA: f64 = 0.1;
    /// Incoherent pump rate γ_p on the first molecule (eV). Small enough to
    /// keep the response linear; see the `gamma_p` linearity check.
    pub const GAMMA_P: f64 = 1e-6;
    /// Intermolecular spacing (nm). Chosen (together with the head-to-tail
    /// orientation below) so that hopping transport dominates short chains
    /// while cavity transport dominates long ones; see README for the scan
    /// and for the alternative spacing that moves the channel crossover
    /// into the 10..30 band.
    pub const SPACING_NM: f64 = 2.6;
    /// Transition dipole moment (Debye).
    pub const DIPOLE_MOMENT_DEBYE: f64 = 36.0;
    /// Alternative spacing documented for the channel-crossover study: at
    /// this weaker hopping the smallest chain length with σ^NH ≥ σ^WC falls
    /// at N* = 13, inside the 10..30 band (at the default spacing the
    /// hopping channel dominates through N = 40 and no crossover occurs).
    pub const CROSSOVER_SPACING_NM: f64 = 5.0;
    /// Dipole orientation: along the chain axis (head-to-tail), which doubles
    /// the coupling relative to the perpendicular arrangement and makes the
    /// nearest-neighbor coupling negative.
    pub const DIPOLE_ORIENTATION: [f64; 3] = [1.0, 0.0, 0.0];
}

/// Jump-feedback settings: after each detected cavity emission the unitary
/// exp(-iλπ σ_target^x) is applied to one molecule; η is the probability the
/// emission is detected at all.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeedbackSettings {
    /// Molecule the feedback pulse acts on, 1..=N.
    pub target: usize,
    /// Rotation amplitude in units of π.
    pub lambda: f64,
    /// Detector efficiency in [0, 1].
    pub eta: f64,
}

/// All physical parameters of one simulation point.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainModel {
    pub n_molecules: usize,
    /// Cavity mode energy ω₀ (eV). Ignored while `auto_detune` is set.
    pub omega_cavity: f64,
    /// When set, ω₀ is taken as mean(ω_m) + Δ at Hamiltonian build time
    /// (zero-detuning condition); `resolve_zero_detuning` makes it concrete.
    pub auto_detune: bool,
    /// Molecular exciton energies ω_m (eV), one per molecule.
    pub omega_molecule: Vec<f64>,
    /// Cavity coupling g_m (eV), one per molecule.
    pub g: Vec<f64>,
    pub spacing_nm: f64,
    pub dipole_moment_debye: f64,
    /// Unit vector of the (common) dipole direction; the chain lies along x.
    pub dipole_orientation: [f64; 3],
    pub gamma_r: f64,
    pub gamma_nr: f64,
    pub gamma_phi: f64,
    pub kappa: f64,
    pub gamma_p: f64,
    /// Dipole-dipole couplings in the Hamiltonian on/off (off = the
    /// no-hopping channel σ^NH).
    pub hopping_enabled: bool,
    /// Cavity coupling terms on/off (off = the weak-coupling channel σ^WC).
    pub cavity_coupling_enabled: bool,
    /// Restrict V_mn to nearest neighbors (diagnostic mode; default all
    /// pairs).
    pub nearest_neighbor_only: bool,
    pub feedback: Option<FeedbackSettings>,
}

impl ChainModel {
    /// Model with the default parameter set, zero cavity coupling, and the
    /// zero-detuning rule armed.
    pub fn defaults(n_molecules: usize) -> Result<Self> {
        if n_molecules == 0 {
            return Err(Error::InvalidArgument(
                "n_molecules must be at least 1".into(),
            ));
        }
        Ok(Self {
            n_molecules,
            omega_cavity: defaults::OMEGA_CAVITY,
            auto_detune: true,
            omega_molecule: vec![defaults::OMEGA_MOLECULE; n_molecules],
            g: vec![0.0; n_molecules],
            spacing_nm: defaults::SPACING_NM,
            dipole_moment_debye: defaults::DIPOLE_MOMENT_DEBYE,
            dipole_orientation: defaults::DIPOLE_ORIENTATION,
            gamma_r: defaults::GAMMA_R,
            gamma_nr: defaults::GAMMA_NR,
            gamma_phi: defaults::GAMMA_PHI,
            kappa: defaults::KAPPA,
            gamma_p: defaults::GAMMA_P,
            hopping_enabled: true,
            cavity_coupling_enabled: true,
            nearest_neighbor_only: false,
            feedback: None,
        })
    }

    /// Total molecular decay rate γ_d = γ_r + γ_nr.
    pub fn gamma_d(&self) -> f64 {
        self.gamma_r + self.gamma_nr
    }

    pub fn basis(&self) -> Result<ExcitationBasis> {
        ExcitationBasis::new(self.n_molecules)
    }

    /// Collective Rabi frequency of this model's couplings.
    pub fn omega_rabi(&self) -> f64 {
        collective_rabi(&self.g)
    }

    /// Set uniform couplings reproducing the requested collective Rabi
    /// frequency.
    pub fn set_omega_rabi(&mut self, omega_rabi: f64) -> Result<()> {
        self.g = uniform_g_for_rabi(omega_rabi, self.n_molecules)?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_molecules == 0 {
            return Err(Error::InvalidArgument("n_molecules must be >= 1".into()));
        }
        if self.omega_molecule.len() != self.n_molecules {
            return Err(Error::InvalidArgument(format!(
                "omega_molecule has {} entries for {} molecules",
                self.omega_molecule.len(),
                self.n_molecules
            )));
        }
        if self.g.len() != self.n_molecules {
            return Err(Error::InvalidArgument(format!(
                "g has {} entries for {} molecules",
                self.g.len(),
                self.n_molecules
            )));
        }
        let positive = [
            ("omega_cavity", self.omega_cavity),
            ("spacing_nm", self.spacing_nm),
            ("dipole_moment_debye", self.dipole_moment_debye),
            ("gamma_r", self.gamma_r),
            ("gamma_nr", self.gamma_nr),
            ("gamma_phi", self.gamma_phi),
            ("kappa", self.kappa),
            ("gamma_p", self.gamma_p),
        ];
        for (name, value) in positive {
            // the cavity energy is allowed to be anything while the
            // zero-detuning rule still owns it
            if name == "omega_cavity" && self.auto_detune {
                continue;
            }
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be strictly positive, got {value}"
                )));
            }
        }
        for (m, &w) in self.omega_molecule.iter().enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "omega_molecule[{}] must be strictly positive, got {w}",
                    m + 1
                )));
            }
        }
        let norm = self
            .dipole_orientation
            .iter()
            .map(|u| u * u)
            .sum::<f64>()
            .sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "dipole_orientation must be a unit vector, |u| = {norm}"
            )));
        }
        if let Some(fb) = &self.feedback {
            if fb.target == 0 || fb.target > self.n_molecules {
                return Err(Error::InvalidArgument(format!(
                    "feedback target {} out of range 1..={}",
                    fb.target, self.n_molecules
                )));
            }
            if !(0.0..=1.0).contains(&fb.eta) {
                return Err(Error::InvalidArgument(format!(
                    "detector efficiency eta must lie in [0, 1], got {}",
                    fb.eta
                )));
            }
            if fb.lambda < 0.0 || !fb.lambda.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "feedback amplitude lambda must be >= 0, got {}",
                    fb.lambda
                )));
            }
        }
        Ok(())
    }

    /// The same model at a different chain length: molecular energies stay
    /// uniform, couplings are redistributed to keep the collective Rabi
    /// frequency, and the zero-detuning rule is re-armed if it was armed.
    /// Requires uniform molecular energies.
    pub fn with_n_molecules(&self, n_molecules: usize) -> Result<Self> {
        if n_molecules == 0 {
            return Err(Error::InvalidArgument(
                "n_molecules must be at least 1".into(),
            ));
        }
        let first = self.omega_molecule[0];
        if self.omega_molecule.iter().any(|&w| w != first) {
            return Err(Error::InvalidArgument(
                "cannot resize a chain with non-uniform molecular energies".into(),
            ));
        }
        let mut out = self.clone();
        out.n_molecules = n_molecules;
        out.omega_molecule = vec![first; n_molecules];
        out.g = uniform_g_for_rabi(self.omega_rabi(), n_molecules)?;
        Ok(out)
    }

    /// Replace the armed zero-detuning rule by a concrete cavity energy
    /// ω₀ = mean(ω_m) + Δ. No-op when ω₀ is already pinned.
    pub fn resolve_zero_detuning(&mut self) {
        if self.auto_detune {
            let mean =
                self.omega_molecule.iter().sum::<f64>() / self.omega_molecule.len() as f64;
            self.omega_cavity = mean + detuning_shift(self);
            self.auto_detune = false;
        }
    }

    /// Effective cavity energy, applying the zero-detuning rule on the fly
    /// if it has not been resolved yet.
    pub fn effective_omega_cavity(&self) -> f64 {
        if self.auto_detune {
            let mean =
                self.omega_molecule.iter().sum::<f64>() / self.omega_molecule.len() as f64;
            mean + detuning_shift(self)
        } else {
            self.omega_cavity
        }
    }
}

/// Dipole-dipole coupling V_mn (eV) between molecules `m` and `n` (1-based)
/// in the quasistatic limit, for identical dipoles on a regular chain along
/// x: V = d² (1 − 3 cos²θ) / (4πε₀ R³) with R = |m − n|·spacing.
pub fn dipole_coupling(model: &ChainModel, m: usize, n: usize) -> Result<f64> {
    if m == n {
        return Err(Error::InvalidArgument(format!(
            "dipole_coupling requires two distinct molecules, got m = n = {m}"
        )));
    }
    for idx in [m, n] {
        if idx == 0 || idx > model.n_molecules {
            return Err(Error::InvalidArgument(format!(
                "molecule index {idx} out of range 1..={}",
                model.n_molecules
            )));
        }
    }
    let d_si = model.dipole_moment_debye * DEBYE_TO_COULOMB_METER;
    let r_si = (m.abs_diff(n) as f64) * model.spacing_nm * 1e-9;
    let cos_theta = model.dipole_orientation[0];
    let geometry = 1.0 - 3.0 * cos_theta * cos_theta;
    let joule = COULOMB_CONSTANT * d_si * d_si * geometry / (r_si * r_si * r_si);
    Ok(joule / ELEMENTARY_CHARGE)
}

/// Collective Rabi frequency Ω = 2 √(Σ_m |g_m|²).
pub fn collective_rabi(g: &[f64]) -> f64 {
    2.0 * g.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Uniform couplings g_m = Ω / (2√N) reproducing a requested collective Rabi
/// frequency.
pub fn uniform_g_for_rabi(omega_rabi: f64, n_molecules: usize) -> Result<Vec<f64>> {
    if omega_rabi < 0.0 || !omega_rabi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "omega_rabi must be >= 0, got {omega_rabi}"
        )));
    }
    if n_molecules == 0 {
        return Err(Error::InvalidArgument(
            "n_molecules must be at least 1".into(),
        ));
    }
    let g = omega_rabi / (2.0 * (n_molecules as f64).sqrt());
    Ok(vec![g; n_molecules])
}

/// Zero-detuning shift Δ = (1/N) Σ_{m≠n} V_mn: the dipole-dipole energy of
/// the symmetric (bright) single-exciton state the cavity couples to.
/// Zero when hopping is disabled.
pub fn detuning_shift(model: &ChainModel) -> f64 {
    if !model.hopping_enabled {
        return 0.0;
    }
    let n = model.n_molecules;
    let mut sum = 0.0;
    for m in 1..=n {
        for k in (m + 1)..=n {
            if model.nearest_neighbor_only && k - m > 1 {
                continue;
            }
            // indices are in range by construction
            sum += 2.0 * dipole_coupling(model, m, k).expect("valid indices");
        }
    }
    sum / n as f64
}

/// Assemble the chain-plus-cavity Hamiltonian
/// H = ω₀ a†a + Σ_m ω_m σ_m^+σ_m^- + Σ_m g_m (a†σ_m^- + σ_m^+a)
///   + Σ_{m<n} V_mn (σ_m^+σ_n^- + σ_n^+σ_m^-)
/// on the truncated space. Disabled flags zero the corresponding terms.
pub fn build_hamiltonian(model: &ChainModel) -> Result<OperatorMatrix> {
    model.validate()?;
    let basis = model.basis()?;
    let d = basis.dim();
    let n = model.n_molecules;
    let mut h = DMatrix::<Complex64>::zeros(d, d);

    h[(basis.photon(), basis.photon())] = Complex64::from(model.effective_omega_cavity());
    for m in 1..=n {
        let idx = basis.molecule(m)?;
        h[(idx, idx)] = Complex64::from(model.omega_molecule[m - 1]);
        if model.cavity_coupling_enabled {
            let g = Complex64::from(model.g[m - 1]);
            h[(idx, basis.photon())] = g;
            h[(basis.photon(), idx)] = g;
        }
    }
    if model.hopping_enabled {
        for m in 1..=n {
            for k in (m + 1)..=n {
                if model.nearest_neighbor_only && k - m > 1 {
                    continue;
                }
                let v = Complex64::from(dipole_coupling(model, m, k)?);
                h[(basis.molecule(m)?, basis.molecule(k)?)] += v;
                h[(basis.molecule(k)?, basis.molecule(m)?)] += v;
            }
        }
    }
    Ok(OperatorMatrix::from_matrix(basis, h))
}

/// Draw N molecular energies i.i.d. from Normal(p, q²); with `fix_ends` the
/// first and last energies are pinned to `p` exactly. Deterministic for a
/// given seed.
pub fn sample_disorder(
    p: f64,
    q: f64,
    n_molecules: usize,
    fix_ends: bool,
    seed: u64,
) -> Result<Vec<f64>> {
    if q < 0.0 || !q.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "disorder standard deviation must be >= 0, got {q}"
        )));
    }
    if n_molecules == 0 {
        return Err(Error::InvalidArgument(
            "n_molecules must be at least 1".into(),
        ));
    }
    if q == 0.0 {
        return Ok(vec![p; n_molecules]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(p, q)
        .map_err(|e| Error::InvalidArgument(format!("bad normal distribution: {e}")))?;
    let mut energies: Vec<f64> = (0..n_molecules).map(|_| normal.sample(&mut rng)).collect();
    if fix_ends {
        energies[0] = p;
        energies[n_molecules - 1] = p;
    }
    Ok(energies)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dipole_coupling_reference_value() {
        // Independent SI evaluation: d = 36 D, R = 10 nm, dipoles
        // perpendicular to the chain gives +8.089e-4 eV for neighbors.
        let mut model = ChainModel::defaults(3).unwrap();
        model.spacing_nm = 10.0;
        model.dipole_orientation = [0.0, 1.0, 0.0];
        let v = dipole_coupling(&model, 1, 2).unwrap();
        assert_relative_eq!(v, 8.088991143353502e-4, max_relative = 1e-12);
    }

    #[test]
    fn dipole_coupling_parallel_is_minus_two_perpendicular() {
        let mut perp = ChainModel::defaults(2).unwrap();
        perp.spacing_nm = 10.0;
        perp.dipole_orientation = [0.0, 0.0, 1.0];
        let mut par = perp.clone();
        par.dipole_orientation = [1.0, 0.0, 0.0];
        let vp = dipole_coupling(&perp, 1, 2).unwrap();
        let va = dipole_coupling(&par, 1, 2).unwrap();
        assert_relative_eq!(va, -2.0 * vp, max_relative = 1e-14);
    }

    #[test]
    fn dipole_coupling_r_cubed_scaling() {
        let model = ChainModel::defaults(4).unwrap();
        let v1 = dipole_coupling(&model, 1, 2).unwrap();
        let v2 = dipole_coupling(&model, 1, 3).unwrap();
        assert_relative_eq!(v2, v1 / 8.0, max_relative = 1e-13);
        // symmetric and distance-only
        assert_eq!(
            dipole_coupling(&model, 2, 1).unwrap(),
            dipole_coupling(&model, 1, 2).unwrap()
        );
        assert_eq!(
            dipole_coupling(&model, 2, 4).unwrap(),
            dipole_coupling(&model, 1, 3).unwrap()
        );
        assert!(dipole_coupling(&model, 2, 2).is_err());
    }

    #[test]
    fn collective_rabi_examples() {
        assert_relative_eq!(collective_rabi(&[0.5; 4]), 2.0, max_relative = 1e-15);
        assert_eq!(collective_rabi(&[0.0; 7]), 0.0);
        let g = uniform_g_for_rabi(1.0, 60).unwrap();
        assert_relative_eq!(g[0], 1.0 / (2.0 * 60f64.sqrt()), max_relative = 1e-15);
        assert_relative_eq!(collective_rabi(&g), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn uniform_g_round_trip() {
        for &(omega, n) in &[(0.0, 3), (2.0, 4), (0.7356, 17)] {
            let g = uniform_g_for_rabi(omega, n).unwrap();
            assert_relative_eq!(collective_rabi(&g), omega, max_relative = 1e-14);
        }
        assert_eq!(uniform_g_for_rabi(2.0, 4).unwrap(), vec![0.5; 4]);
        assert!(uniform_g_for_rabi(-1.0, 4).is_err());
    }

    #[test]
    fn detuning_shift_two_molecules_is_v12() {
        let mut model = ChainModel::defaults(2).unwrap();
        model.set_omega_rabi(0.3).unwrap();
        let delta = detuning_shift(&model);
        let v12 = dipole_coupling(&model, 1, 2).unwrap();
        assert_relative_eq!(delta, v12, max_relative = 1e-14);

        model.hopping_enabled = false;
        assert_eq!(detuning_shift(&model), 0.0);
    }

    #[test]
    fn detuning_shift_is_linear_in_couplings() {
        let mut model = ChainModel::defaults(6).unwrap();
        let d1 = detuning_shift(&model);
        // scaling d² by c scales every V_mn by c
        model.dipole_moment_debye *= 2.0;
        let d2 = detuning_shift(&model);
        assert_relative_eq!(d2, 4.0 * d1, max_relative = 1e-13);
    }

    #[test]
    fn hamiltonian_single_molecule_diagonal() {
        let mut model = ChainModel::defaults(1).unwrap();
        model.auto_detune = false;
        model.omega_cavity = 2.3;
        model.omega_molecule = vec![2.11];
        let h = build_hamiltonian(&model).unwrap();
        assert_eq!(h[(0, 0)].re, 0.0);
        assert_eq!(h[(1, 1)].re, 2.11);
        assert_eq!(h[(2, 2)].re, 2.3);
        assert_eq!(h.hermiticity_defect(), 0.0);
    }

    #[test]
    fn hamiltonian_matrix_elements_n2() {
        let mut model = ChainModel::defaults(2).unwrap();
        model.g = vec![0.02, 0.03];
        model.auto_detune = false;
        let h = build_hamiltonian(&model).unwrap();
        let basis = model.basis().unwrap();
        let v12 = dipole_coupling(&model, 1, 2).unwrap();
        assert_relative_eq!(h[(1, 2)].re, v12, max_relative = 1e-15);
        assert_eq!(h[(1, basis.photon())].re, 0.02);
        assert_eq!(h[(2, basis.photon())].re, 0.03);
    }

    #[test]
    fn hamiltonian_decouples_without_cavity_coupling() {
        let mut model = ChainModel::defaults(5).unwrap();
        model.set_omega_rabi(0.8).unwrap();
        model.cavity_coupling_enabled = false;
        let h = build_hamiltonian(&model).unwrap();
        let basis = model.basis().unwrap();
        for m in 1..=5 {
            assert_eq!(h[(m, basis.photon())], crate::hilbert::ZERO);
        }
    }

    #[test]
    fn hamiltonian_is_hermitian_for_random_models() {
        let mut model = ChainModel::defaults(8).unwrap();
        model.g = (0..8).map(|i| 0.01 * (i as f64 + 0.3)).collect();
        model.omega_molecule = (0..8).map(|i| 2.0 + 0.01 * i as f64).collect();
        let h = build_hamiltonian(&model).unwrap();
        assert!(h.hermiticity_defect() < 1e-14);
    }

    #[test]
    fn zero_detuning_rule() {
        let mut model = ChainModel::defaults(4).unwrap();
        assert!(model.auto_detune);
        let delta = detuning_shift(&model);
        model.resolve_zero_detuning();
        assert!(!model.auto_detune);
        assert_relative_eq!(
            model.omega_cavity,
            defaults::OMEGA_MOLECULE + delta,
            max_relative = 1e-15
        );
    }

    #[test]
    fn disorder_sampling() {
        // q = 0 gives exactly p
        let e = sample_disorder(2.11, 0.0, 5, false, 7).unwrap();
        assert_eq!(e, vec![2.11; 5]);
        // ends pinned for every seed
        for seed in 0..20 {
            let e = sample_disorder(2.11, 0.211, 9, true, seed).unwrap();
            assert_eq!(e[0], 2.11);
            assert_eq!(e[8], 2.11);
        }
        // deterministic for a fixed seed
        let a = sample_disorder(2.11, 0.211, 9, true, 99).unwrap();
        let b = sample_disorder(2.11, 0.211, 9, true, 99).unwrap();
        assert_eq!(a, b);
        assert!(sample_disorder(2.11, -0.1, 9, true, 0).is_err());
    }

    #[test]
    fn disorder_sample_mean_statistics() {
        // interior energies over many draws: sample mean within 4 standard
        // errors of p
        let p = 2.11;
        let q = 0.211;
        let n_draws = 20_000;
        let mut sum = 0.0;
        let mut count = 0usize;
        for seed in 0..n_draws {
            let e = sample_disorder(p, q, 5, true, seed).unwrap();
            for &x in &e[1..4] {
                sum += x;
                count += 1;
            }
        }
        let mean = sum / count as f64;
        let standard_error = q / (count as f64).sqrt();
        assert!(
            (mean - p).abs() < 4.0 * standard_error,
            "sample mean {mean} too far from {p} (se = {standard_error})"
        );
    }

    #[test]
    fn validation_rejects_bad_rates() {
        let mut model = ChainModel::defaults(2).unwrap();
        model.kappa = -0.1;
        assert!(model.validate().is_err());
        let mut model = ChainModel::defaults(2).unwrap();
        model.g = vec![0.1];
        assert!(model.validate().is_err());
        let mut model = ChainModel::defaults(2).unwrap();
        model.feedback = Some(FeedbackSettings {
            target: 3,
            lambda: 0.5,
            eta: 1.0,
        });
        assert!(model.validate().is_err());
        let mut model = ChainModel::defaults(2).unwrap();
        model.feedback = Some(FeedbackSettings {
            target: 2,
            lambda: 0.5,
            eta: 1.5,
        });
        assert!(model.validate().is_err());
    }
}
