//! Two-qubit density matrices in the computational basis
//! `{|00>, |01>, |10>, |11>}` with the convention H -> |0>, V -> |1>.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use std::fmt;

use crate::error::{ModelError, Result};

pub type Mat4 = Matrix4<Complex64>;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// The four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    pub fn ket(self) -> Vector4<Complex64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (a, b, c, d) = match self {
            Bell::PhiPlus => (s, 0.0, 0.0, s),
            Bell::PhiMinus => (s, 0.0, 0.0, -s),
            Bell::PsiPlus => (0.0, s, s, 0.0),
            Bell::PsiMinus => (0.0, s, -s, 0.0),
        };
        Vector4::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn projector(self) -> Mat4 {
        let k = self.ket();
        k * k.adjoint()
    }
}

#[derive(Clone, PartialEq)]
pub struct TwoQubitState {
    rho: Mat4,
}

impl fmt::Debug for TwoQubitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoQubitState").field("rho", &self.rho).finish()
    }
}

impl TwoQubitState {
    /// Builds a state, checking Hermiticity, unit trace and positivity.
    pub fn new(rho: Mat4) -> Result<Self> {
        let state = Self { rho };
        if !state.is_hermitian(HERMITIAN_TOL) {
            return Err(ModelError::Invalid("density matrix is not Hermitian".into()));
        }
        let tr = state.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(ModelError::Invalid(format!("density matrix trace {tr} != 1")));
        }
        let lo = state.min_eigenvalue();
        if lo < -PSD_TOL {
            return Err(ModelError::Invalid(format!(
                "density matrix has negative eigenvalue {lo}"
            )));
        }
        Ok(state)
    }

    /// Wraps a matrix without validation. Used for maps that do not preserve trace.
    pub(crate) fn from_unchecked(rho: Mat4) -> Self {
        Self { rho }
    }

    pub fn from_real(rows: [[f64; 4]; 4]) -> Result<Self> {
        Self::new(Mat4::from_fn(|i, j| rows[i][j].into()))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.rho
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rho[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.rho - self.rho.adjoint()).iter().all(|z| z.norm() <= tol)
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let eig = self.rho.symmetric_eigenvalues();
        let mut v = [eig[0], eig[1], eig[2], eig[3]];
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[3]
    }

    /// `<b| rho |b>`
    pub fn overlap(&self, bell: Bell) -> f64 {
        let k = bell.ket();
        (k.adjoint() * self.rho * k)[(0, 0)].re
    }

    pub fn singlet_fraction(&self) -> f64 {
        self.overlap(Bell::PsiMinus)
    }
}
