use nalgebra::DMatrix;

use super::{KrausEntry, KrausOperator};
use crate::error::{Error, Result};
use crate::C64;

const EIG_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-12;

/// An incoherent measurement element together with the rank-one pieces
/// that complete it to a POVM.
#[derive(Clone, Debug)]
pub struct PovmCompletion {
    /// `E0` (when nonzero) followed by `M_i^dag M_i`.
    pub elements: Vec<DMatrix<C64>>,
    /// `M_i = sqrt(l_i) |i><v_i|` from the spectral decomposition
    /// `I - E0 = sum_i l_i |v_i><v_i|`. Each maps every source to the single
    /// target `i`, so each is an incoherent Kraus operator.
    pub kraus: Vec<KrausOperator>,
}

pub fn complete_to_povm(e0: &DMatrix<C64>) -> Result<PovmCompletion> {
    let d = e0.nrows();
    if d == 0 || e0.ncols() != d {
        return Err(Error::NonPhysical(format!("E0 must be square, got {:?}", e0.shape())));
    }
    if (e0 - e0.adjoint()).norm() > EIG_TOL {
        return Err(Error::NonPhysical("E0 is not Hermitian".into()));
    }
    let rest = DMatrix::<C64>::identity(d, d) - e0;
    let eig = rest.symmetric_eigen();
    if let Some(&l) = eig.eigenvalues.iter().find(|&&l| !(-EIG_TOL..=1.0 + EIG_TOL).contains(&l)) {
        return Err(Error::NonPhysical(format!("E0 is not between 0 and I (I - E0 has eigenvalue {l})")));
    }
    let mut elements = Vec::new();
    if e0.norm() > DROP_TOL {
        elements.push(e0.clone());
    }
    let mut kraus = Vec::new();
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l <= DROP_TOL {
            continue;
        }
        let v = eig.eigenvectors.column(i);
        let s = l.sqrt();
        let entries = (0..d).map(|src| KrausEntry { target: i, source: src, coeff: v[src].conj() * s }).collect();
        let m = KrausOperator::new(d, entries)?;
        elements.push(m.gram());
        kraus.push(m);
    }
    Ok(PovmCompletion { elements, kraus })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum(elements: &[DMatrix<C64>], d: usize) -> DMatrix<C64> {
        elements.iter().fold(DMatrix::zeros(d, d), |acc, e| acc + e)
    }

    #[test]
    fn identity_needs_nothing() {
        let c = complete_to_povm(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(c.elements.len(), 1);
        assert!(c.kraus.is_empty());
    }

    #[test]
    fn zero_gets_full_spectral_completion() {
        let c = complete_to_povm(&DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(c.elements.len(), 3);
        assert!((sum(&c.elements, 3) - DMatrix::identity(3, 3)).norm() < 1e-9);
    }

    #[test]
    fn diagonal_element_completion() {
        let e0 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(0.5, 0.0), C64::new(0.25, 0.0)]));
        let c = complete_to_povm(&e0).unwrap();
        assert!((sum(&c.elements, 2) - DMatrix::identity(2, 2)).norm() < 1e-9);
        let mut traces: Vec<f64> = c.elements[1..].iter().map(|e| e.trace().re).collect();
        traces.sort_by(f64::total_cmp);
        assert!((traces[0] - 0.5).abs() < 1e-12 && (traces[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn coherent_element_completion() {
        // E0 = 0.4 |+><+|
        let h = C64::new(0.2, 0.0);
        let e0 = DMatrix::from_row_slice(2, 2, &[h, h, h, h]);
        let c = complete_to_povm(&e0).unwrap();
        assert!((sum(&c.elements, 2) - DMatrix::identity(2, 2)).norm() < 1e-9);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(complete_to_povm(&(DMatrix::identity(2, 2) * C64::new(1.5, 0.0))).is_err());
        assert!(complete_to_povm(&(DMatrix::identity(2, 2) * C64::new(-0.1, 0.0))).is_err());
        let nh = DMatrix::from_row_slice(2, 2, &[C64::new(0.5, 0.0), C64::new(0.1, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)]);
        assert!(complete_to_povm(&nh).is_err());
    }
}
