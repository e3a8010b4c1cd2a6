//! Closed-form accessible and source coherence.
//!
//! Accessible coherence is the normalized volume of the set of states a
//! given state can be converted into; source coherence is one minus the
//! normalized volume of the set of states that can be converted into it.
//! Volumes depend on a choice of measure, recorded in every
//! [`MonotoneValue`] as a [`MeasureTag`].

mod geometry;
mod planar;
mod qubit;

pub use geometry::{region_geometry, GeometryInput, Loop, Piece, RegionGeometry};
pub use planar::{planar_example_volumes, spectrum_volumes, PlanarVolumes};
pub use qubit::{pio_source_volume, qubit_pio_ca, qubit_pio_cs, qubit_sio_ca, qubit_sio_cs, sio_accessible_volume, sio_source_volume, PIO_ACCESSIBLE_SUP, PURE_TOL};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::state::{Bipartition, PureState, SortedSpectrum};

/// Largest spectrum length the permutation sum enumerates.
pub const MAX_PERMUTATION_DIM: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureTag {
    /// Euclidean measure on the chamber of sorted probability vectors.
    SortedRepresentative,
    /// Area in the plane of the first two unsorted basis probabilities.
    CoordinatePlane,
    /// Area in the x-z section of the Bloch ball.
    BlochHalfplane,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MonotoneKind {
    Accessible,
    Source,
}

impl FromStr for MonotoneKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "accessible" | "a" => Ok(MonotoneKind::Accessible),
            "source" | "s" => Ok(MonotoneKind::Source),
            other => Err(Error::Parse(format!("unknown monotone kind {other:?}"))),
        }
    }
}

/// Operation classes a monotone can be defined with respect to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum OperationClass {
    PIO,
    SIO,
    IC,
    LSICC,
    LICC,
}

impl OperationClass {
    pub fn is_local(self) -> bool {
        matches!(self, OperationClass::LSICC | OperationClass::LICC)
    }
}

impl fmt::Display for OperationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for OperationClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PIO" => Ok(OperationClass::PIO),
            "SIO" => Ok(OperationClass::SIO),
            "IC" | "IO" => Ok(OperationClass::IC),
            "LSICC" => Ok(OperationClass::LSICC),
            "LICC" => Ok(OperationClass::LICC),
            other => Err(Error::Parse(format!("unknown operation class {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotoneValue {
    pub kind: MonotoneKind,
    pub value: f64,
    pub volume: f64,
    pub sup_volume: f64,
    pub measure: MeasureTag,
    pub operation_class: OperationClass,
}

impl MonotoneValue {
    /// Builds the value from a volume: `V / V_sup` for accessible,
    /// `1 - V / V_sup` for source.
    pub fn from_volume(kind: MonotoneKind, volume: f64, sup_volume: f64, measure: MeasureTag, operation_class: OperationClass) -> Self {
        let ratio = volume / sup_volume;
        let value = match kind {
            MonotoneKind::Accessible => ratio,
            MonotoneKind::Source => 1.0 - ratio,
        };
        MonotoneValue { kind, value, volume, sup_volume, measure, operation_class }
    }
}

/// `sqrt(d) / (d! (d-1)!)`: volume of the whole sorted chamber, reached by
/// the incoherent spectrum.
pub fn source_sup_volume(d: usize) -> f64 {
    let f = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
    (d as f64).sqrt() / (f(d) * f(d.saturating_sub(1)))
}

/// Permutation sum on the support of `λ` (zero entries stripped). A
/// spectrum with a single nonzero entry gives 1.
pub fn permutation_sum(lambda: &SortedSpectrum) -> Result<f64> {
    permutation_sum_full(lambda.support().values())
}

/// Permutation sum on the full vector, zeros included:
///
/// `sum_π [sum_k π(k) λ_k - (d+1)/2]^(d-1) / prod_{k<d} (π(k) - π(k+1))`
///
/// with `π` running over permutations of `1..=d`. Terms cancel heavily, so
/// they are accumulated with Neumaier summation, split by the first element
/// of `π` and merged in a fixed order.
pub fn permutation_sum_full(lambda: &[f64]) -> Result<f64> {
    permutation_sum_with(lambda, Execution::default())
}

pub fn permutation_sum_with(lambda: &[f64], exec: Execution) -> Result<f64> {
    let d = lambda.len();
    if d == 0 {
        return Err(Error::InvalidSpectrum("empty".into()));
    }
    if d > MAX_PERMUTATION_DIM {
        return Err(Error::Unsupported(format!("permutation sum over {d}! terms (cap d <= {MAX_PERMUTATION_DIM})")));
    }
    if d == 1 {
        return Ok(1.0);
    }
    let shift = (d as f64 + 1.0) / 2.0;
    let partials = exec.map(d, |first| {
        let mut acc = Neumaier::default();
        let mut rest: Vec<usize> = (1..=d).filter(|&v| v != first + 1).collect();
        let mut perm = Vec::with_capacity(d);
        perm.push(first + 1);
        for_each_permutation(&mut rest, 0, &mut |tail| {
            perm.truncate(1);
            perm.extend_from_slice(tail);
            let bracket: f64 = perm.iter().zip(lambda).map(|(&p, &l)| p as f64 * l).sum::<f64>() - shift;
            let den: f64 = perm.windows(2).map(|w| w[0] as f64 - w[1] as f64).product();
            acc.add(bracket.powi(d as i32 - 1) / den);
        });
        acc
    });
    let mut total = Neumaier::default();
    for p in partials {
        total.add(p.sum);
        total.add(p.comp);
    }
    Ok(total.value())
}

fn for_each_permutation(v: &mut [usize], k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        for_each_permutation(v, k + 1, f);
        v.swap(k, i);
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Spectrum a class acts on: dephased for single-system classes, squared
/// Schmidt coefficients (first party against the rest) for LICC and LSICC.
/// The local classes need a bipartite state whose reduced states are both
/// diagonal.
pub fn class_spectrum(state: &PureState, class: OperationClass) -> Result<SortedSpectrum> {
    match class {
        OperationClass::SIO | OperationClass::IC => Ok(state.dephased_spectrum()),
        OperationClass::LICC | OperationClass::LSICC => {
            if state.n_parties() != 2 {
                return Err(Error::NotApplicable(format!("{class} source coherence needs a bipartite state, got {} parties", state.n_parties())));
            }
            let s = state.schmidt_spectrum(&Bipartition::first(1))?;
            if !s.both_diagonal() {
                return Err(Error::NotApplicable("reduced states are not diagonal in the incoherent basis".into()));
            }
            Ok(s.coefficients)
        }
        OperationClass::PIO => Err(Error::Unsupported("no closed form for pure-state PIO source coherence".into())),
    }
}

/// Source coherence of a pure state from the permutation sum, on the
/// sorted-representative measure of dimension `d = rank`.
pub fn source_coherence_closed(state: &PureState, class: OperationClass) -> Result<MonotoneValue> {
    let lambda = class_spectrum(state, class)?;
    source_coherence_of_spectrum(&lambda, class)
}

pub fn source_coherence_of_spectrum(lambda: &SortedSpectrum, class: OperationClass) -> Result<MonotoneValue> {
    let support = lambda.support();
    let d = support.len();
    let sigma = permutation_sum_full(support.values())?;
    let sup = source_sup_volume(d);
    Ok(MonotoneValue::from_volume(MonotoneKind::Source, sup * sigma, sup, MeasureTag::SortedRepresentative, class))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn spec(v: &[f64]) -> SortedSpectrum {
        SortedSpectrum::from_unsorted(v.to_vec()).unwrap()
    }

    #[test]
    fn known_sums() {
        assert_abs_diff_eq!(permutation_sum(&spec(&[0.6, 0.4])).unwrap(), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(permutation_sum(&spec(&[0.5, 1.0 / 3.0, 1.0 / 6.0])).unwrap(), 1.0 / 6.0, epsilon = 1e-14);
        assert_eq!(permutation_sum(&spec(&[1.0, 0.0, 0.0])).unwrap(), 1.0);
        for d in 2..=7 {
            assert_abs_diff_eq!(permutation_sum(&SortedSpectrum::uniform(d)).unwrap(), 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(permutation_sum_full(&SortedSpectrum::incoherent(d).into_inner()).unwrap(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn sup_volumes() {
        assert_abs_diff_eq!(source_sup_volume(2), 2f64.sqrt() / 2.0);
        assert_abs_diff_eq!(source_sup_volume(3), 3f64.sqrt() / 12.0);
        assert_abs_diff_eq!(source_sup_volume(4), 2.0 / 144.0);
    }

    #[test]
    fn cap() {
        assert!(permutation_sum_full(&[0.1; 10]).is_err());
    }

    #[test]
    fn closed_source_coherence() {
        let mc = PureState::maximally_correlated(&[1.0 / 3.0; 3]).unwrap();
        let v = source_coherence_closed(&mc, OperationClass::LICC).unwrap();
        assert_abs_diff_eq!(v.value, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.volume, 0.0, epsilon = 1e-12);
        let inc = PureState::basis(vec![2, 2], 0).unwrap();
        assert_abs_diff_eq!(source_coherence_closed(&inc, OperationClass::IC).unwrap().value, 0.0);
        let q = PureState::from_probabilities(&[0.6, 0.4]).unwrap();
        assert_abs_diff_eq!(source_coherence_closed(&q, OperationClass::IC).unwrap().value, 0.8, epsilon = 1e-15);
        let coherent = PureState::from_real(vec![2, 2], &[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(source_coherence_closed(&coherent, OperationClass::LICC), Err(Error::NotApplicable(_))));
        assert!(source_coherence_closed(&q, OperationClass::PIO).is_err());
    }

    #[test]
    fn sequential_matches_parallel() {
        let l = [0.31, 0.22, 0.17, 0.12, 0.1, 0.08];
        let a = permutation_sum_with(&l, Execution::Sequential).unwrap();
        let b = permutation_sum_with(&l, Execution::default()).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    proptest! {
        #[test]
        fn sum_in_unit_interval(v in prop::collection::vec(0.0f64..1.0, 2..6)) {
            prop_assume!(v.iter().sum::<f64>() > 0.1);
            let s = SortedSpectrum::normalized(v).unwrap();
            let sigma = permutation_sum(&s).unwrap();
            prop_assert!((-1e-9..=1.0 + 1e-9).contains(&sigma));
        }

        #[test]
        fn schur_concave_source_coherence(a in prop::collection::vec(0.01f64..1.0, 4), b in prop::collection::vec(0.01f64..1.0, 4)) {
            let (x, y) = (SortedSpectrum::normalized(a).unwrap(), SortedSpectrum::normalized(b).unwrap());
            if crate::majorization::majorizes(&y, &x) {
                let cx = source_coherence_of_spectrum(&x, OperationClass::IC).unwrap().value;
                let cy = source_coherence_of_spectrum(&y, OperationClass::IC).unwrap().value;
                prop_assert!(cx >= cy - 1e-9);
            }
        }

        #[test]
        fn ic_and_licc_paths_agree(v in prop::collection::vec(0.01f64..1.0, 2..5)) {
            let p: Vec<f64> = { let t: f64 = v.iter().sum(); v.iter().map(|x| x / t).collect() };
            let single = PureState::from_probabilities(&p).unwrap();
            let lifted = PureState::maximally_correlated(&p).unwrap();
            let a = source_coherence_closed(&single, OperationClass::IC).unwrap();
            let b = source_coherence_closed(&lifted, OperationClass::LICC).unwrap();
            prop_assert!((a.value - b.value).abs() < 1e-12);
        }
    }
}
