use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on the unit-sum invariant.
pub const SUM_TOL: f64 = 1e-10;

/// Entries at or below this value are treated as zero when a spectrum is
/// reduced to its support.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Nonincreasing probability vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SortedSpectrum(Vec<f64>);

impl SortedSpectrum {
    /// Accepts an already nonincreasing vector summing to one.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.windows(2).any(|w| w[0] + SUM_TOL < w[1]) {
            return Err(Error::InvalidSpectrum(format!("not nonincreasing: {values:?}")));
        }
        Self::from_unsorted(values)
    }

    /// Sorts `values` in nonincreasing order and validates them.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpectrum("empty".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < -SUM_TOL || *v > 1.0 + SUM_TOL) {
            return Err(Error::InvalidSpectrum(format!("entries outside [0,1]: {values:?}")));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidSpectrum(format!("sum is {total}, expected 1")));
        }
        for v in values.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(SortedSpectrum(values))
    }

    /// Rescales a nonnegative vector to unit sum before sorting.
    pub fn normalized(values: Vec<f64>) -> Result<Self> {
        let total: f64 = values.iter().sum();
        if !(total > 0.0) || values.iter().any(|v| *v < 0.0) {
            return Err(Error::InvalidSpectrum(format!("cannot normalize {values:?}")));
        }
        Self::from_unsorted(values.into_iter().map(|v| v / total).collect())
    }

    pub fn uniform(d: usize) -> Self {
        assert!(d > 0);
        SortedSpectrum(vec![1.0 / d as f64; d])
    }

    /// `(1, 0, ..., 0)`.
    pub fn incoherent(d: usize) -> Self {
        assert!(d > 0);
        let mut v = vec![0.0; d];
        v[0] = 1.0;
        SortedSpectrum(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of entries above [`SUPPORT_TOL`].
    pub fn rank(&self) -> usize {
        self.0.iter().take_while(|v| **v > SUPPORT_TOL).count()
    }

    /// The spectrum with zero entries stripped, renormalized.
    pub fn support(&self) -> SortedSpectrum {
        let kept: Vec<f64> = self.0[..self.rank().max(1)].to_vec();
        let total: f64 = kept.iter().sum();
        SortedSpectrum(kept.into_iter().map(|v| v / total).collect())
    }

    /// Copy padded with zeros to length `d` (no-op when already that long).
    pub fn padded(&self, d: usize) -> Vec<f64> {
        let mut v = self.0.clone();
        if v.len() < d {
            v.resize(d, 0.0);
        }
        v
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}
