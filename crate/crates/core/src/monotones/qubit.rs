//! Single-qubit accessible and source coherence on the x-z section of the
//! Bloch ball (the full disc, area `π`).

use std::f64::consts::{PI, SQRT_2};

use super::{MeasureTag, MonotoneKind, MonotoneValue, OperationClass};
use crate::state::QubitBloch;

/// A state counts as pure when `|r|^2` is within this of 1.
pub const PURE_TOL: f64 = 1e-10;

/// Largest PIO accessible area as usually quoted, reached at
/// `r⊥² = r_z² = 1/2`. The hexagon area `2 r⊥ (1 + |r_z|)` actually peaks at
/// `3√3/2 ≈ 2.598` (`|r_z| = 1/2` on the sphere), so PIO accessible
/// coherence normalized by this constant can exceed 1 by up to ~7.6%.
pub const PIO_ACCESSIBLE_SUP: f64 = 1.0 + SQRT_2;

fn clamp_unit(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// `V_a = 2 κ arcsin √(1 - r_z²) + 2 |r_z| r⊥` with `κ = r⊥ / √(1 - r_z²)`:
/// the strip `|s_x| <= r⊥` cut by the ellipse with semi-axes `κ` and 1.
pub fn sio_accessible_volume(r: &QubitBloch) -> f64 {
    let rt = r.transverse();
    if rt == 0.0 {
        return 0.0;
    }
    let c = (1.0 - r.z * r.z).max(0.0).sqrt();
    let kappa = (rt / c).min(1.0);
    2.0 * kappa * clamp_unit(c).asin() + 2.0 * r.z.abs() * rt
}

/// Source area for SIO/IC.
///
/// Mixed states: the two lunes `|s_x| >= r⊥` of the disc outside the ellipse
/// of [`sio_accessible_volume`],
/// `2 arcsin √(1 - r⊥²) - 2 r⊥ √(1 - r⊥²) - 2 κ arcsin |r_z| + 2 |r_z| r⊥`.
///
/// Pure states: `2 arcsin |r_z| - 2 |r_z| √(1 - r_z²)`, which makes source
/// and accessible coherence coincide. The mixed expression tends to 0 at the
/// surface, so source coherence jumps there.
pub fn sio_source_volume(r: &QubitBloch) -> f64 {
    let z = r.z.abs();
    if r.is_pure(PURE_TOL) {
        return 2.0 * clamp_unit(z).asin() - 2.0 * z * (1.0 - z * z).max(0.0).sqrt();
    }
    let rt = r.transverse();
    let c = (1.0 - r.z * r.z).max(0.0).sqrt();
    let kappa = if rt == 0.0 { 0.0 } else { (rt / c).min(1.0) };
    let w = (1.0 - rt * rt).max(0.0).sqrt();
    2.0 * clamp_unit(w).asin() - 2.0 * rt * w - 2.0 * kappa * clamp_unit(z).asin() + 2.0 * z * rt
}

pub fn qubit_sio_ca(r: &QubitBloch) -> MonotoneValue {
    MonotoneValue::from_volume(MonotoneKind::Accessible, sio_accessible_volume(r), PI, MeasureTag::BlochHalfplane, OperationClass::SIO)
}

pub fn qubit_sio_cs(r: &QubitBloch) -> MonotoneValue {
    MonotoneValue::from_volume(MonotoneKind::Source, sio_source_volume(r), PI, MeasureTag::BlochHalfplane, OperationClass::SIO)
}

/// Hexagon area `2 r⊥ (1 + |r_z|)` over [`PIO_ACCESSIBLE_SUP`].
pub fn qubit_pio_ca(r: &QubitBloch) -> MonotoneValue {
    let v = 2.0 * r.transverse() * (1.0 + r.z.abs());
    MonotoneValue::from_volume(MonotoneKind::Accessible, v, PIO_ACCESSIBLE_SUP, MeasureTag::BlochHalfplane, OperationClass::PIO)
}

/// Piecewise PIO source area, evaluated term by term as published:
///
/// - `r⊥ + r_z² >= 1`: `2 Q1 + 2 [sin(2 arcsin t) - sin(2 arcsin r⊥)] - S1`
/// - otherwise, `r⊥ > 0`: `2 Q2 - 2 r⊥ √(1 - r⊥²) - S2`
/// - `r⊥ = 0`: `π`
///
/// with `t = 2 r⊥ (1 - |r_z|) / (r⊥² + (1 - |r_z|)²)`,
/// `Q1 = arcsin t - arcsin r⊥`, `Q2 = π/2 - arcsin r⊥`,
/// `S1 = 2 (|r_z| + (r⊥² - (1 - |r_z|)²) / (r⊥² + (1 - |r_z|)²)) (t - r⊥)` and
/// `S2 = 2 |r_z| r⊥ / (1 - |r_z|)`.
///
/// This does not agree with a direct Monte-Carlo estimate of the PIO source
/// region in general and can go negative near the pure surface.
pub fn pio_source_volume(r: &QubitBloch) -> f64 {
    let rt = r.transverse();
    if rt == 0.0 {
        return PI;
    }
    let z = r.z.abs();
    let u = 1.0 - z;
    if rt + r.z * r.z >= 1.0 {
        let den = rt * rt + u * u;
        let t = clamp_unit(2.0 * rt * u / den);
        let q1 = t.asin() - clamp_unit(rt).asin();
        let s1 = 2.0 * (z + (rt * rt - u * u) / den) * (t - rt);
        2.0 * q1 + 2.0 * ((2.0 * t.asin()).sin() - (2.0 * clamp_unit(rt).asin()).sin()) - s1
    } else {
        let q2 = PI / 2.0 - clamp_unit(rt).asin();
        let s2 = 2.0 * z * rt / u;
        2.0 * q2 - 2.0 * rt * (1.0 - rt * rt).max(0.0).sqrt() - s2
    }
}

pub fn qubit_pio_cs(r: &QubitBloch) -> MonotoneValue {
    MonotoneValue::from_volume(MonotoneKind::Source, pio_source_volume(r), PI, MeasureTag::BlochHalfplane, OperationClass::PIO)
}
