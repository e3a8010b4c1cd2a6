//! Majorization and the state-conversion criteria built on it.
//!
//! `x ≺ y` ("x is majorized by y") means every partial sum of the sorted `x`
//! is at most the matching partial sum of the sorted `y`, with equal totals.
//! Vectors of different length are compared after zero-padding.
//!
//! Conversion direction: every `*_feasible(source, target)` function answers
//! whether `source` can be turned into `target`. For pure states that means
//! `λ(source) ≺ λ(target)`: free operations only move spectra toward the
//! incoherent (resp. product) end.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{Bipartition, PureState, QubitBloch, SortedSpectrum, SUM_TOL};

/// Additive slack on every inequality.
pub const SLACK: f64 = 1e-10;

/// A constraint counts as tight when both sides agree to this tolerance.
pub const TIGHT_TOL: f64 = 1e-9;

/// One inequality `lhs <= rhs` that is tight or violated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Binding {
    pub constraint: String,
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub binding: Vec<Binding>,
}

impl FeasibilityVerdict {
    fn from_checks(checks: impl IntoIterator<Item = (String, f64, f64)>) -> Self {
        let mut binding = Vec::new();
        let mut feasible = true;
        for (constraint, lhs, rhs) in checks {
            let violated = lhs > rhs + SLACK;
            feasible &= !violated;
            if violated || (lhs - rhs).abs() <= TIGHT_TOL {
                binding.push(Binding { constraint, lhs, rhs, violated });
            }
        }
        FeasibilityVerdict { feasible, binding }
    }
}

/// `true` iff `x ≺ y`.
pub fn majorizes(y: &SortedSpectrum, x: &SortedSpectrum) -> bool {
    majorization_verdict(y, x).feasible
}

/// Partial-sum report for `x ≺ y`.
pub fn majorization_verdict(y: &SortedSpectrum, x: &SortedSpectrum) -> FeasibilityVerdict {
    let d = x.len().max(y.len());
    let (xs, ys) = (x.padded(d), y.padded(d));
    let (mut sx, mut sy) = (0.0, 0.0);
    let checks = (0..d.saturating_sub(1)).map(move |k| {
        sx += xs[k];
        sy += ys[k];
        (format!("partial sum k={}", k + 1), sx, sy)
    });
    FeasibilityVerdict::from_checks(checks)
}

/// [`majorizes`] on raw probability vectors (sorted internally).
pub fn majorizes_slices(y: &[f64], x: &[f64]) -> Result<bool> {
    Ok(majorizes(&SortedSpectrum::from_unsorted(y.to_vec())?, &SortedSpectrum::from_unsorted(x.to_vec())?))
}

/// Coordinate-wise (unsorted) majorization: every prefix sum of `x` in the
/// given order is at most the prefix sum of `y`, with equal totals.
pub fn coordinate_majorizes(y: &[f64], x: &[f64]) -> bool {
    let d = x.len().max(y.len());
    let (mut sx, mut sy) = (0.0, 0.0);
    for k in 0..d {
        sx += x.get(k).copied().unwrap_or(0.0);
        sy += y.get(k).copied().unwrap_or(0.0);
        if k + 1 < d && sx > sy + SLACK {
            return false;
        }
    }
    (sx - sy).abs() <= SUM_TOL
}

/// `psi -> phi` by SIO or IC: `λ(Δ(psi)) ≺ λ(Δ(phi))`.
pub fn ic_pure_feasible(psi: &PureState, phi: &PureState) -> Result<FeasibilityVerdict> {
    if psi.dim() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: psi.dim().to_string(), got: phi.dim().to_string() });
    }
    Ok(majorization_verdict(&phi.dephased_spectrum(), &psi.dephased_spectrum()))
}

/// `psi -> phi` by LOCC across `cut`: `λ(psi) ≺ λ(phi)` on squared Schmidt
/// coefficients.
pub fn locc_pure_feasible(psi: &PureState, phi: &PureState, cut: &Bipartition) -> Result<FeasibilityVerdict> {
    if psi.dims() != phi.dims() {
        return Err(Error::DimensionMismatch { expected: format!("{:?}", psi.dims()), got: format!("{:?}", phi.dims()) });
    }
    let a = psi.schmidt_spectrum(cut)?;
    let b = phi.schmidt_spectrum(cut)?;
    Ok(majorization_verdict(&b.coefficients, &a.coefficients))
}

/// `psi -> phi` by LICC for bipartite states whose reduced states are all
/// diagonal. Anything else is reported as [`Error::NotApplicable`].
pub fn licc_bipartite_feasible(psi: &PureState, phi: &PureState) -> Result<FeasibilityVerdict> {
    if psi.n_parties() != 2 || psi.dims() != phi.dims() {
        return Err(Error::DimensionMismatch { expected: "matching bipartite dims".into(), got: format!("{:?} vs {:?}", psi.dims(), phi.dims()) });
    }
    let cut = Bipartition::first(1);
    let a = psi.schmidt_spectrum(&cut)?;
    let b = phi.schmidt_spectrum(&cut)?;
    for (name, s) in [("source", &a), ("target", &b)] {
        if !s.both_diagonal() {
            return Err(Error::NotApplicable(format!("{name} state has a reduced state that is not diagonal in the incoherent basis")));
        }
    }
    Ok(majorization_verdict(&b.coefficients, &a.coefficients))
}

/// Qubit `r -> s` by SIO or IC:
/// `s⊥² <= r⊥²` and `(1 - r_z²) s⊥² / r⊥² + s_z² <= 1`.
/// For incoherent `r` only incoherent targets are reachable.
pub fn sio_qubit_feasible(r: &QubitBloch, s: &QubitBloch) -> FeasibilityVerdict {
    let (rt, st) = (r.transverse_sqr(), s.transverse_sqr());
    if rt == 0.0 {
        return FeasibilityVerdict::from_checks([("incoherent source: s_x^2 + s_y^2 <= 0".to_string(), st, 0.0)]);
    }
    FeasibilityVerdict::from_checks([
        ("s_x^2 + s_y^2 <= r_x^2 + r_y^2".to_string(), st, rt),
        ("(1 - r_z^2)(s_x^2 + s_y^2)/(r_x^2 + r_y^2) + s_z^2 <= 1".to_string(), (1.0 - r.z * r.z) * st / rt + s.z * s.z, 1.0),
    ])
}

/// Qubit `r -> s` by PIO. The reachable set in the x-z plane is the hexagon
/// with vertices `(0, ±1)` and `(±r⊥, ±|r_z|)`:
/// `s⊥² <= r⊥²` and `s⊥² / r⊥² <= (s_z ∓ 1)² / (1 - |r_z|)²`.
pub fn pio_qubit_feasible(r: &QubitBloch, s: &QubitBloch) -> FeasibilityVerdict {
    let (rt, st) = (r.transverse_sqr(), s.transverse_sqr());
    if rt == 0.0 {
        return FeasibilityVerdict::from_checks([("incoherent source: s_x^2 + s_y^2 <= 0".to_string(), st, 0.0)]);
    }
    let den = (1.0 - r.z.abs()).powi(2);
    FeasibilityVerdict::from_checks([
        ("s_x^2 + s_y^2 <= r_x^2 + r_y^2".to_string(), st, rt),
        ("(s_x^2 + s_y^2)/(r_x^2 + r_y^2) <= (s_z - 1)^2/(1 - |r_z|)^2".to_string(), st / rt, (s.z - 1.0).powi(2) / den),
        ("(s_x^2 + s_y^2)/(r_x^2 + r_y^2) <= (s_z + 1)^2/(1 - |r_z|)^2".to_string(), st / rt, (s.z + 1.0).powi(2) / den),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(v: &[f64]) -> SortedSpectrum {
        SortedSpectrum::from_unsorted(v.to_vec()).unwrap()
    }

    fn b(x: f64, z: f64) -> QubitBloch {
        QubitBloch::new(x, 0.0, z).unwrap()
    }

    #[test]
    fn basic_majorization() {
        assert!(majorizes(&spec(&[0.6, 0.3, 0.1]), &spec(&[0.5, 0.4, 0.1])));
        assert!(!majorizes(&spec(&[0.5, 0.4, 0.1]), &spec(&[0.6, 0.3, 0.1])));
        assert!(majorizes(&spec(&[0.7, 0.2, 0.1]), &SortedSpectrum::uniform(3)));
        // padding
        assert!(majorizes(&spec(&[1.0]), &spec(&[0.5, 0.5])));
        assert!(!majorizes(&spec(&[0.5, 0.5]), &spec(&[1.0])));
    }

    #[test]
    fn verdict_lists_tight_and_violated() {
        let v = majorization_verdict(&spec(&[0.6, 0.3, 0.1]), &spec(&[0.5, 0.4, 0.1]));
        assert!(v.feasible);
        assert_eq!(v.binding.len(), 1);
        assert_eq!(v.binding[0].constraint, "partial sum k=2");
        let v = majorization_verdict(&spec(&[0.5, 0.5]), &spec(&[0.6, 0.4]));
        assert!(!v.feasible && v.binding[0].violated);
    }

    #[test]
    fn slices_must_be_normalized() {
        assert!(majorizes_slices(&[0.5, 0.2], &[0.5, 0.5]).is_err());
        assert!(majorizes_slices(&[0.1, 0.9], &[0.5, 0.5]).unwrap());
    }

    #[test]
    fn pure_ic_conversions() {
        let plus = PureState::from_real(vec![2], &[1.0, 1.0]).unwrap();
        let zero = PureState::basis(vec![2], 0).unwrap();
        assert!(ic_pure_feasible(&plus, &zero).unwrap().feasible);
        assert!(!ic_pure_feasible(&zero, &plus).unwrap().feasible);
        let psi = PureState::from_probabilities(&[0.5, 0.3, 0.2]).unwrap();
        let phi = PureState::from_probabilities(&[0.6, 0.3, 0.1]).unwrap();
        assert!(ic_pure_feasible(&psi, &phi).unwrap().feasible);
        assert!(!ic_pure_feasible(&phi, &psi).unwrap().feasible);
        assert!(ic_pure_feasible(&psi, &PureState::basis(vec![2], 0).unwrap()).is_err());
    }

    #[test]
    fn locc_and_licc() {
        let bell = PureState::maximally_correlated(&[0.5, 0.5]).unwrap();
        let prod = PureState::basis(vec![2, 2], 0).unwrap();
        let cut = Bipartition::first(1);
        assert!(locc_pure_feasible(&bell, &prod, &cut).unwrap().feasible);
        assert!(!locc_pure_feasible(&prod, &bell, &cut).unwrap().feasible);
        let a = PureState::maximally_correlated(&[0.6, 0.4]).unwrap();
        let b = PureState::maximally_correlated(&[0.7, 0.3]).unwrap();
        assert!(locc_pure_feasible(&a, &b, &cut).unwrap().feasible);

        assert!(licc_bipartite_feasible(&bell, &b).unwrap().feasible);
        let anti = PureState::from_real(vec![2, 2], &[0.0, 0.6f64.sqrt(), 0.4f64.sqrt(), 0.0]).unwrap();
        assert!(!licc_bipartite_feasible(&anti, &bell).unwrap().feasible);
        let coherent = PureState::from_real(vec![2, 2], &[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(licc_bipartite_feasible(&coherent, &bell), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn sio_qubit_examples() {
        let r = b(1.0, 0.0);
        for s in [b(0.0, 1.0), b(0.3, -0.9), b(-1.0, 0.0), b(0.0, 0.0)] {
            assert!(sio_qubit_feasible(&r, &s).feasible);
        }
        assert!(!sio_qubit_feasible(&b(0.0, 0.3), &b(0.1, 0.0)).feasible);
        assert!(sio_qubit_feasible(&b(0.0, 0.3), &b(0.0, -0.8)).feasible);
        let v = sio_qubit_feasible(&b(0.5, 0.5), &b(0.4, 0.6));
        assert!(v.feasible);
        // 3 * 0.16 + 0.36 = 0.84 < 1, 0.16 < 0.25: nothing tight
        assert!(v.binding.is_empty());
    }

    #[test]
    fn pio_hexagon() {
        let r = b(0.5, 0.75);
        assert!(pio_qubit_feasible(&r, &r).feasible);
        assert!(pio_qubit_feasible(&r, &b(0.0, -0.2)).feasible);
        // corner of the hexagon: both the transverse and the slanted edge bind
        let v = pio_qubit_feasible(&r, &b(0.5, -0.75));
        assert!(v.feasible);
        assert_eq!(v.binding.len(), 2);
        // on the slanted edge |s_x| = 2 (1 - |s_z|)
        let v = pio_qubit_feasible(&r, &b(0.3, 0.85));
        assert!(v.feasible && v.binding.len() == 1);
        assert!(!pio_qubit_feasible(&r, &b(0.31, 0.85)).feasible);
        assert!(!pio_qubit_feasible(&r, &b(0.31, -0.85)).feasible);
        // SIO allows more
        assert!(sio_qubit_feasible(&r, &b(0.31, 0.85)).feasible);
    }

    #[test]
    fn coordinate_order_matters() {
        assert!(coordinate_majorizes(&[0.6, 0.3, 0.1], &[0.5, 0.3, 0.2]));
        assert!(!coordinate_majorizes(&[0.3, 0.6, 0.1], &[0.5, 0.3, 0.2]));
    }

    proptest! {
        #[test]
        fn reflexive_and_extremes(v in prop::collection::vec(0.01f64..1.0, 1..7)) {
            let s = SortedSpectrum::normalized(v).unwrap();
            prop_assert!(majorizes(&s, &s));
            prop_assert!(majorizes(&s, &SortedSpectrum::uniform(s.len())));
            prop_assert!(majorizes(&SortedSpectrum::incoherent(s.len()), &s));
        }

        #[test]
        fn transitive(a in prop::collection::vec(0.01f64..1.0, 4), bb in prop::collection::vec(0.01f64..1.0, 4), c in prop::collection::vec(0.01f64..1.0, 4)) {
            let (a, bb, c) = (SortedSpectrum::normalized(a).unwrap(), SortedSpectrum::normalized(bb).unwrap(), SortedSpectrum::normalized(c).unwrap());
            if majorizes(&bb, &a) && majorizes(&c, &bb) {
                prop_assert!(majorizes(&c, &a));
            }
        }

        #[test]
        fn pio_region_inside_sio_region(rx in -1.0f64..1.0, rz in -1.0f64..1.0, sx in -1.0f64..1.0, sz in -1.0f64..1.0) {
            prop_assume!(rx * rx + rz * rz <= 1.0 && sx * sx + sz * sz <= 1.0);
            let (r, s) = (b(rx, rz), b(sx, sz));
            if pio_qubit_feasible(&r, &s).feasible {
                prop_assert!(sio_qubit_feasible(&r, &s).feasible);
            }
        }

        #[test]
        fn mutual_ic_conversion_means_equal_spectra(a in prop::collection::vec(0.0f64..1.0, 3), bb in prop::collection::vec(0.0f64..1.0, 3)) {
            prop_assume!(a.iter().sum::<f64>() > 0.1 && bb.iter().sum::<f64>() > 0.1);
            let psi = PureState::from_probabilities(&a).unwrap();
            let phi = PureState::from_probabilities(&bb).unwrap();
            if ic_pure_feasible(&psi, &phi).unwrap().feasible && ic_pure_feasible(&phi, &psi).unwrap().feasible {
                let (x, y) = (psi.dephased_spectrum(), phi.dephased_spectrum());
                for (p, q) in x.values().iter().zip(y.values()) {
                    prop_assert!((p - q).abs() < 1e-9);
                }
            }
        }
    }
}
