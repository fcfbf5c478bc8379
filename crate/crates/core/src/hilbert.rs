//! Truncated Hilbert-space bookkeeping and dense complex operator algebra.
//!
//! The simulation space keeps only the zero- and one-excitation sector of a
//! chain of N two-level molecules plus a single cavity mode:
//!
//! * index `0`       — global ground state |G,0⟩,
//! * index `1..=N`   — one exciton on molecule m, no photon |e_m,0⟩,
//! * index `N + 1`   — no exciton, one cavity photon |G,1⟩,
//!
//! for a total dimension of N + 2. Operators are full-space operators
//! compressed onto this subspace (conjugation by the sector projector), so a
//! product that would leave the sector is mapped to zero.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Dense complex matrix used for operators and superoperators.
pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Index map for the truncated space (dimension `n_molecules + 2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExcitationBasis {
    n_molecules: usize,
}

impl ExcitationBasis {
    /// Build the basis for a chain of `n_molecules` two-level molecules.
    pub fn new(n_molecules: usize) -> Result<Self> {
        if n_molecules == 0 {
            return Err(Error::InvalidArgument(
                "n_molecules must be at least 1".into(),
            ));
        }
        Ok(Self { n_molecules })
    }

    pub fn n_molecules(&self) -> usize {
        self.n_molecules
    }

    pub fn dim(&self) -> usize {
        self.n_molecules + 2
    }

    /// Index of |G,0⟩.
    pub fn ground(&self) -> usize {
        0
    }

    /// Index of |e_m,0⟩ for molecule `m` in `1..=N`.
    pub fn molecule(&self, m: usize) -> Result<usize> {
        if m == 0 || m > self.n_molecules {
            return Err(Error::InvalidArgument(format!(
                "molecule index {m} out of range 1..={}",
                self.n_molecules
            )));
        }
        Ok(m)
    }

    /// Index of |G,1⟩.
    pub fn photon(&self) -> usize {
        self.n_molecules + 1
    }
}

/// Build the basis. Thin alias kept for symmetry with the other
/// module-level constructors.
pub fn make_basis(n_molecules: usize) -> Result<ExcitationBasis> {
    ExcitationBasis::new(n_molecules)
}

/// Dense operator on the truncated space, tagged with its basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    basis: ExcitationBasis,
    mat: CMatrix,
}

impl OperatorMatrix {
    pub fn zeros(basis: ExcitationBasis) -> Self {
        let d = basis.dim();
        Self {
            basis,
            mat: CMatrix::zeros(d, d),
        }
    }

    pub fn identity(basis: ExcitationBasis) -> Self {
        let d = basis.dim();
        Self {
            basis,
            mat: CMatrix::identity(d, d),
        }
    }

    /// Wrap an existing matrix. Panics if it is not `dim x dim`.
    pub fn from_matrix(basis: ExcitationBasis, mat: CMatrix) -> Self {
        assert_eq!(
            (mat.nrows(), mat.ncols()),
            (basis.dim(), basis.dim()),
            "operator shape must match basis dimension"
        );
        Self { basis, mat }
    }

    pub fn basis(&self) -> ExcitationBasis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn matrix_mut(&mut self) -> &mut CMatrix {
        &mut self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self {
            basis: self.basis,
            mat: self.mat.adjoint(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            basis: self.basis,
            mat: &self.mat * c,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.diagonal().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Relative Hermiticity defect ‖A − A†‖_F / max(‖A‖_F, 1).
    pub fn hermiticity_defect(&self) -> f64 {
        let diff = (&self.mat - self.mat.adjoint())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        diff / self.frobenius_norm().max(1.0)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Eigenvalues of a Hermitian operator, ascending. The matrix is
    /// symmetrized first so that round-off in the input cannot produce
    /// complex eigenvalues.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.mat + self.mat.adjoint()) * Complex64::new(0.5, 0.0);
        let mut eigs: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        eigs.sort_by(|a, b| a.total_cmp(b));
        eigs
    }
}

impl Index<(usize, usize)> for OperatorMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.mat[idx]
    }
}

fn check_same_basis(a: &OperatorMatrix, b: &OperatorMatrix) {
    assert_eq!(a.basis, b.basis, "operators act on different bases");
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        check_same_basis(self, rhs);
        OperatorMatrix {
            basis: self.basis,
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        check_same_basis(self, rhs);
        OperatorMatrix {
            basis: self.basis,
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        check_same_basis(self, rhs);
        OperatorMatrix {
            basis: self.basis,
            mat: &self.mat * &rhs.mat,
        }
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn neg(self) -> OperatorMatrix {
        OperatorMatrix {
            basis: self.basis,
            mat: -&self.mat,
        }
    }
}

/// σ_m^- compressed to the truncated space: |e_m,0⟩ ↦ |G,0⟩, everything else
/// annihilated.
pub fn lowering_op(basis: ExcitationBasis, m: usize) -> Result<OperatorMatrix> {
    let idx = basis.molecule(m)?;
    let mut op = OperatorMatrix::zeros(basis);
    op.mat[(basis.ground(), idx)] = ONE;
    Ok(op)
}

/// σ_m^+ compressed to the truncated space: |G,0⟩ ↦ |e_m,0⟩. Raising an
/// already-excited state leaves the sector, hence maps to zero.
pub fn raising_op(basis: ExcitationBasis, m: usize) -> Result<OperatorMatrix> {
    Ok(lowering_op(basis, m)?.adjoint())
}

/// Exciton number operator σ_m^+ σ_m^- (projector onto |e_m,0⟩).
pub fn excitation_projector(basis: ExcitationBasis, m: usize) -> Result<OperatorMatrix> {
    let idx = basis.molecule(m)?;
    let mut op = OperatorMatrix::zeros(basis);
    op.mat[(idx, idx)] = ONE;
    Ok(op)
}

/// Cavity annihilation operator `a` in the truncated space: |G,1⟩ ↦ |G,0⟩.
pub fn cavity_annihilation(basis: ExcitationBasis) -> OperatorMatrix {
    let mut op = OperatorMatrix::zeros(basis);
    op.mat[(basis.ground(), basis.photon())] = ONE;
    op
}

/// Cavity creation operator `a†` in the truncated space.
pub fn cavity_creation(basis: ExcitationBasis) -> OperatorMatrix {
    cavity_annihilation(basis).adjoint()
}

/// Commutator [a, b].
pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    &(a * b) - &(b * a)
}

/// exp(scale · A) by scaling and squaring.
pub fn matrix_exponential(a: &OperatorMatrix, scale: Complex64) -> OperatorMatrix {
    OperatorMatrix {
        basis: a.basis,
        mat: (&a.mat * scale).exp(),
    }
}

/// sin(πx) and cos(πx) with exact values at quarter-integer x.
///
/// Plain `(PI * x).sin()` returns ~1.2e-16 at x = 1 because π is rounded;
/// reducing the argument against exact quarter turns keeps the feedback
/// unitary exactly ±identity (up to a block phase) at integer λ.
pub fn sin_cos_pi(x: f64) -> (f64, f64) {
    let m = (2.0 * x).round();
    let r = x - 0.5 * m;
    let (s, c) = (PI * r).sin_cos();
    match (m as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}
