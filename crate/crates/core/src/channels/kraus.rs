use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::C64;

/// Tolerance for "unimodular" coefficients.
pub const PHASE_TOL: f64 = 1e-9;

/// Coefficients with modulus at or below this are dropped when importing a
/// dense matrix.
pub const ENTRY_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KrausEntry {
    pub target: usize,
    pub source: usize,
    pub coeff: C64,
}

/// `K = sum_i c(i) |j(i)><i|`, stored as one entry per occupied source
/// index. The representation cannot express more than one nonzero per
/// column, so every value of this type is an incoherent Kraus operator.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausOperator {
    dim: usize,
    // sorted by source, sources unique
    entries: Vec<KrausEntry>,
}

impl KrausOperator {
    pub fn new(dim: usize, mut entries: Vec<KrausEntry>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::NotIncoherent("dimension 0".into()));
        }
        entries.retain(|e| e.coeff != C64::default());
        entries.sort_by_key(|e| e.source);
        for e in &entries {
            if e.target >= dim || e.source >= dim {
                return Err(Error::NotIncoherent(format!("index ({}, {}) out of range {dim}", e.target, e.source)));
            }
            if !(e.coeff.re.is_finite() && e.coeff.im.is_finite()) {
                return Err(Error::NotIncoherent("non-finite coefficient".into()));
            }
        }
        if let Some(w) = entries.windows(2).find(|w| w[0].source == w[1].source) {
            return Err(Error::NotIncoherent(format!("source {} has more than one nonzero entry", w[0].source)));
        }
        Ok(KrausOperator { dim, entries })
    }

    /// Imports a dense matrix; fails if some column has two nonzeros.
    pub fn from_dense(m: &DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotIncoherent(format!("not square: {:?}", m.shape())));
        }
        let mut entries = Vec::new();
        for i in 0..m.ncols() {
            let nz: Vec<usize> = (0..m.nrows()).filter(|&j| m[(j, i)].norm() > ENTRY_TOL).collect();
            match nz.as_slice() {
                [] => {}
                [j] => entries.push(KrausEntry { target: *j, source: i, coeff: m[(*j, i)] }),
                _ => return Err(Error::NotIncoherent(format!("column {i} has {} nonzero entries", nz.len()))),
            }
        }
        Self::new(m.nrows(), entries)
    }

    pub fn diagonal(coeffs: &[C64]) -> Result<Self> {
        let entries = coeffs.iter().enumerate().map(|(i, &c)| KrausEntry { target: i, source: i, coeff: c }).collect();
        Self::new(coeffs.len(), entries)
    }

    /// Incoherent unitary `|i> -> e^{i phase_i} |perm[i]>`.
    pub fn permutation(perm: &[usize], phases: &[f64]) -> Result<Self> {
        if perm.len() != phases.len() {
            return Err(Error::NotIncoherent("permutation and phase lengths differ".into()));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::NotIncoherent(format!("{perm:?} is not a permutation")));
            }
        }
        let entries = perm
            .iter()
            .zip(phases)
            .enumerate()
            .map(|(i, (&t, &th))| KrausEntry { target: t, source: i, coeff: C64::from_polar(1.0, th) })
            .collect();
        Self::new(perm.len(), entries)
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); dim]).expect("identity is valid")
    }

    /// Rank-one projector `|i><i|`.
    pub fn projector(dim: usize, i: usize) -> Result<Self> {
        Self::new(dim, vec![KrausEntry { target: i, source: i, coeff: C64::new(1.0, 0.0) }])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[KrausEntry] {
        &self.entries
    }

    /// Entry for `source`, if any.
    pub fn column(&self, source: usize) -> Option<&KrausEntry> {
        self.entries.binary_search_by_key(&source, |e| e.source).ok().map(|k| &self.entries[k])
    }

    pub fn scaled(&self, s: C64) -> Self {
        let entries = self.entries.iter().map(|e| KrausEntry { coeff: e.coeff * s, ..*e }).collect();
        KrausOperator::new(self.dim, entries).expect("scaling keeps structure")
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for e in &self.entries {
            m[(e.target, e.source)] += e.coeff;
        }
        m
    }

    /// No two sources share a target (the strictly incoherent sparsity).
    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.dim];
        self.entries.iter().all(|e| !std::mem::replace(&mut seen[e.target], true))
    }

    pub fn is_unimodular(&self) -> bool {
        self.entries.iter().all(|e| (e.coeff.norm() - 1.0).abs() <= PHASE_TOL)
    }

    /// Full support with a bijective target map and nonzero coefficients.
    pub fn is_invertible(&self) -> bool {
        self.entries.len() == self.dim && self.is_injective() && self.entries.iter().all(|e| e.coeff.norm() > ENTRY_TOL)
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_invertible() {
            return None;
        }
        let entries = self
            .entries
            .iter()
            .map(|e| KrausEntry { target: e.source, source: e.target, coeff: e.coeff.inv() })
            .collect();
        KrausOperator::new(self.dim, entries).ok()
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::default(); self.dim];
        for e in &self.entries {
            out[e.target] += e.coeff * v[e.source];
        }
        out
    }

    /// Applies the operator to party `party` of a product-basis vector.
    pub fn apply_to_party(&self, amps: &[C64], dims: &[usize], party: usize) -> Vec<C64> {
        debug_assert_eq!(dims[party], self.dim);
        let stride: usize = dims[party + 1..].iter().product();
        let mut lookup = vec![None; self.dim];
        for e in &self.entries {
            lookup[e.source] = Some((e.target, e.coeff));
        }
        let mut out = vec![C64::default(); amps.len()];
        for (f, a) in amps.iter().enumerate() {
            let s = (f / stride) % self.dim;
            if let Some((t, c)) = lookup[s] {
                out[f + t * stride - s * stride] += c * a;
            }
        }
        out
    }

    /// `K^dag K` as a dense matrix.
    pub fn gram(&self) -> DMatrix<C64> {
        let mut g = DMatrix::zeros(self.dim, self.dim);
        for a in &self.entries {
            for b in &self.entries {
                if a.target == b.target {
                    g[(a.source, b.source)] += a.coeff.conj() * b.coeff;
                }
            }
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn rejects_two_entries_per_column() {
        let bad = KrausOperator::new(
            2,
            vec![KrausEntry { target: 0, source: 0, coeff: c(1.0) }, KrausEntry { target: 1, source: 0, coeff: c(1.0) }],
        );
        assert!(bad.is_err());
        let dense = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(1.0), c(0.0)]);
        assert!(KrausOperator::from_dense(&dense).is_err());
    }

    #[test]
    fn dense_round_trip() {
        let k = KrausOperator::new(
            3,
            vec![
                KrausEntry { target: 2, source: 0, coeff: C64::new(0.3, 0.1) },
                KrausEntry { target: 2, source: 1, coeff: c(-0.5) },
            ],
        )
        .unwrap();
        assert_eq!(KrausOperator::from_dense(&k.to_dense()).unwrap(), k);
        assert!(!k.is_injective());
        assert!(!k.is_invertible());
    }

    #[test]
    fn inverse_of_invertible_sio() {
        let k = KrausOperator::new(
            2,
            vec![KrausEntry { target: 1, source: 0, coeff: c(2.0) }, KrausEntry { target: 0, source: 1, coeff: C64::new(0.0, 0.5) }],
        )
        .unwrap();
        let inv = k.inverse().unwrap();
        let prod = k.to_dense() * inv.to_dense();
        assert!((prod - DMatrix::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn party_application_matches_kronecker() {
        // X on party 1 of a 2x3 system
        let x3 = KrausOperator::permutation(&[1, 2, 0], &[0.0, 0.5, 1.0]).unwrap();
        let amps: Vec<C64> = (0..6).map(|k| C64::new(k as f64, -(k as f64) / 2.0)).collect();
        let out = x3.apply_to_party(&amps, &[2, 3], 1);
        let full = DMatrix::<C64>::identity(2, 2).kronecker(&x3.to_dense());
        let expect = full * nalgebra::DVector::from_column_slice(&amps);
        for (a, b) in out.iter().zip(expect.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn gram_matches_dense() {
        let k = KrausOperator::new(
            3,
            vec![
                KrausEntry { target: 0, source: 0, coeff: C64::new(0.3, 0.4) },
                KrausEntry { target: 0, source: 2, coeff: C64::new(-0.2, 0.1) },
                KrausEntry { target: 1, source: 1, coeff: c(0.7) },
            ],
        )
        .unwrap();
        let d = k.to_dense();
        assert!((k.gram() - d.adjoint() * d).norm() < 1e-15);
    }
}
