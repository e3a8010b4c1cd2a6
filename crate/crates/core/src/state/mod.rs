//! Pure multipartite states in a fixed product basis, single-qubit Bloch
//! vectors, and the spectra derived from them.
//!
//! Amplitudes are stored row-major over the party dimensions with the last
//! party varying fastest: for `dims = [2, 3]` the basis order is
//! `|00>, |01>, |02>, |10>, |11>, |12>`.

mod bloch;
mod spectrum;

pub use bloch::{check_density, QubitBloch, BALL_TOL};
pub use spectrum::{SortedSpectrum, SUM_TOL, SUPPORT_TOL};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::C64;

/// Tolerance on the unit-norm invariant of [`PureState`].
pub const NORM_TOL: f64 = 1e-10;

/// Default modulus below which an amplitude counts as zero.
pub const DEFAULT_AMP_TOL: f64 = 1e-9;

/// Off-diagonal tolerance when deciding whether a reduced state is diagonal.
pub const DIAGONAL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: Vec<C64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        check_shape(&dims, amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm is {norm}, expected 1")));
        }
        Ok(PureState { dims, amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        check_shape(&dims, amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        Ok(PureState { dims, amps: amps.into_iter().map(|a| a / norm).collect() })
    }

    /// Normalizes real amplitudes.
    pub fn from_real(dims: Vec<usize>, amps: &[f64]) -> Result<Self> {
        Self::normalized(dims, amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let total: usize = dims.iter().product();
        if index >= total {
            return Err(Error::InvalidState(format!("basis index {index} out of range {total}")));
        }
        let mut amps = vec![C64::default(); total];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(dims, amps)
    }

    /// Single-party state `sum_i sqrt(p_i) |i>`.
    pub fn from_probabilities(probs: &[f64]) -> Result<Self> {
        let amps = probs.iter().map(|p| C64::new(p.max(0.0).sqrt(), 0.0)).collect();
        Self::normalized(vec![probs.len()], amps)
    }

    /// Maximally correlated lift `sum_i sqrt(p_i) |ii>` on `d x d`.
    pub fn maximally_correlated(probs: &[f64]) -> Result<Self> {
        let d = probs.len();
        let mut amps = vec![C64::default(); d * d];
        for (i, p) in probs.iter().enumerate() {
            amps[i * d + i] = C64::new(p.max(0.0).sqrt(), 0.0);
        }
        Self::normalized(vec![d, d], amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        multi_index(&self.dims, flat)
    }

    pub fn flat_index(&self, digits: &[usize]) -> usize {
        flat_index(&self.dims, digits)
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|<self|other>|^2`; zero when the shapes differ.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        if self.dims != other.dims {
            return 0.0;
        }
        self.inner(other).norm_sqr()
    }

    /// Sorted diagonal of the dephased state, `|amps_k|^2` in nonincreasing order.
    pub fn dephased_spectrum(&self) -> SortedSpectrum {
        let probs: Vec<f64> = self.amps.iter().map(|a| a.norm_sqr()).collect();
        SortedSpectrum::normalized(probs).expect("valid state has a valid dephased spectrum")
    }

    /// Number of amplitudes with modulus above `tol`.
    pub fn product_term_count(&self, tol: f64) -> usize {
        self.amps.iter().filter(|a| a.norm() > tol).count()
    }

    /// `2 |ad - bc|` for `a|00> + b|01> + c|10> + d|11>`.
    pub fn concurrence_2qubit(&self) -> Result<f64> {
        let [a, b, c, d] = self.two_qubit_amps()?;
        Ok(2.0 * (a * d - b * c).norm())
    }

    /// Amplitudes `[a, b, c, d]` of a two-qubit state.
    pub fn two_qubit_amps(&self) -> Result<[C64; 4]> {
        if self.dims != [2, 2] {
            return Err(Error::DimensionMismatch { expected: "[2, 2]".into(), got: format!("{:?}", self.dims) });
        }
        Ok([self.amps[0], self.amps[1], self.amps[2], self.amps[3]])
    }

    /// Coefficient matrix `M[a][b]` with rows indexed by the parties of
    /// `cut.left` and columns by the rest, both in increasing party order.
    pub fn coefficient_matrix(&self, cut: &Bipartition) -> Result<DMatrix<C64>> {
        cut.validate(self.n_parties())?;
        let right = cut.right(self.n_parties());
        let rows: usize = cut.left.iter().map(|&p| self.dims[p]).product();
        let cols: usize = right.iter().map(|&p| self.dims[p]).product();
        let mut m = DMatrix::<C64>::zeros(rows, cols);
        for (flat, amp) in self.amps.iter().enumerate() {
            let digits = self.multi_index(flat);
            let r = cut.left.iter().fold(0, |acc, &p| acc * self.dims[p] + digits[p]);
            let c = right.iter().fold(0, |acc, &p| acc * self.dims[p] + digits[p]);
            m[(r, c)] = *amp;
        }
        Ok(m)
    }

    /// Squared Schmidt coefficients across `cut`, with flags telling whether
    /// each reduced state is diagonal in the incoherent basis.
    pub fn schmidt_spectrum(&self, cut: &Bipartition) -> Result<SchmidtData> {
        let m = self.coefficient_matrix(cut)?;
        let rho_left = &m * m.adjoint();
        let rho_right = (m.adjoint() * &m).transpose();
        let smaller = if rho_left.nrows() <= rho_right.nrows() { &rho_left } else { &rho_right };
        let eig: Vec<f64> = smaller.clone().symmetric_eigenvalues().iter().map(|v| v.max(0.0)).collect();
        Ok(SchmidtData {
            coefficients: SortedSpectrum::normalized(eig)?,
            left_diagonal: is_diagonal(&rho_left, DIAGONAL_TOL),
            right_diagonal: is_diagonal(&rho_right, DIAGONAL_TOL),
        })
    }
}

/// Parties on the left of a bipartite cut. The complement is the right side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    pub left: Vec<usize>,
}

impl Bipartition {
    pub fn new(mut left: Vec<usize>) -> Self {
        left.sort_unstable();
        left.dedup();
        Bipartition { left }
    }

    /// First `k` parties against the rest.
    pub fn first(k: usize) -> Self {
        Bipartition { left: (0..k).collect() }
    }

    pub fn right(&self, n_parties: usize) -> Vec<usize> {
        (0..n_parties).filter(|p| !self.left.contains(p)).collect()
    }

    pub fn validate(&self, n_parties: usize) -> Result<()> {
        if n_parties < 2 {
            return Err(Error::InvalidCut(format!("a cut needs at least 2 parties, state has {n_parties}")));
        }
        if self.left.is_empty() || self.left.len() >= n_parties {
            return Err(Error::InvalidCut(format!("{:?} is not a proper nonempty subset of {n_parties} parties", self.left)));
        }
        if self.left.iter().any(|&p| p >= n_parties) {
            return Err(Error::InvalidCut(format!("party index out of range in {:?}", self.left)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchmidtData {
    pub coefficients: SortedSpectrum,
    pub left_diagonal: bool,
    pub right_diagonal: bool,
}

impl SchmidtData {
    pub fn both_diagonal(&self) -> bool {
        self.left_diagonal && self.right_diagonal
    }
}

pub(crate) fn multi_index(dims: &[usize], mut flat: usize) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for (k, &d) in dims.iter().enumerate().rev() {
        digits[k] = flat % d;
        flat /= d;
    }
    digits
}

pub(crate) fn flat_index(dims: &[usize], digits: &[usize]) -> usize {
    dims.iter().zip(digits).fold(0, |acc, (&d, &i)| acc * d + i)
}

fn check_shape(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::InvalidState("no parties".into()));
    }
    if let Some(d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidState(format!("party dimension {d} < 2")));
    }
    let total: usize = dims.iter().product();
    if total != len {
        return Err(Error::InvalidState(format!("{len} amplitudes for dims {dims:?} (expected {total})")));
    }
    Ok(())
}

fn is_diagonal(m: &DMatrix<C64>, tol: f64) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)].norm() <= tol))
}
