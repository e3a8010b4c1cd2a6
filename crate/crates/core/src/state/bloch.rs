use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Slack on the Bloch-ball constraint.
pub const BALL_TOL: f64 = 1e-10;

/// Single-qubit mixed state `rho = (I + r_x X + r_y Y + r_z Z) / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitBloch {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl QubitBloch {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let b = QubitBloch { x, y, z };
        if !(x.is_finite() && y.is_finite() && z.is_finite()) || b.norm_sqr() > 1.0 + BALL_TOL {
            return Err(Error::NonPhysical(format!("Bloch vector ({x}, {y}, {z}) outside the unit ball")));
        }
        Ok(b)
    }

    /// Maximally mixed state.
    pub fn mixed() -> Self {
        QubitBloch { x: 0.0, y: 0.0, z: 0.0 }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// `r_x^2 + r_y^2`.
    pub fn transverse_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// `sqrt(r_x^2 + r_y^2)`, the l1-norm of coherence.
    pub fn transverse(&self) -> f64 {
        self.transverse_sqr().sqrt()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn is_incoherent(&self, tol: f64) -> bool {
        self.transverse_sqr() <= tol
    }

    pub fn to_density(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.5 * (1.0 + self.z), 0.0),
                C64::new(0.5 * self.x, -0.5 * self.y),
                C64::new(0.5 * self.x, 0.5 * self.y),
                C64::new(0.5 * (1.0 - self.z), 0.0),
            ],
        )
    }

    /// Inverse of [`to_density`](Self::to_density) for Hermitian, unit-trace,
    /// positive 2x2 matrices.
    pub fn from_density(rho: &DMatrix<C64>) -> Result<Self> {
        if rho.shape() != (2, 2) {
            return Err(Error::DimensionMismatch { expected: "2x2".into(), got: format!("{:?}", rho.shape()) });
        }
        check_density(rho, 1e-9)?;
        let x = 2.0 * rho[(1, 0)].re;
        let y = 2.0 * rho[(1, 0)].im;
        let z = (rho[(0, 0)] - rho[(1, 1)]).re;
        // positivity already checked, so any excess over 1 is rounding
        let b = QubitBloch { x, y, z };
        let n = b.norm_sqr();
        if n > 1.0 {
            let s = n.sqrt().recip();
            return Ok(QubitBloch { x: x * s, y: y * s, z: z * s });
        }
        Ok(b)
    }
}

/// Checks Hermiticity, unit trace and positivity of a density matrix.
pub fn check_density(rho: &DMatrix<C64>, tol: f64) -> Result<()> {
    let n = rho.nrows();
    if n != rho.ncols() || n == 0 {
        return Err(Error::NonPhysical(format!("not square: {:?}", rho.shape())));
    }
    let herm = (rho - rho.adjoint()).norm();
    if herm > tol {
        return Err(Error::NonPhysical(format!("not Hermitian (deviation {herm:e})")));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::NonPhysical(format!("trace is {tr}")));
    }
    let sym = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let min = sym.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(Error::NonPhysical(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}
