//! Accessible and source volumes for spectra of length 2 and 3, where the
//! regions can be drawn in the plane.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use super::{class_spectrum, MeasureTag, OperationClass};
use crate::error::{Error, Result};
use crate::state::{PureState, SortedSpectrum};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanarVolumes {
    pub v_a: f64,
    pub v_s: f64,
    pub c_a: f64,
    pub c_s: f64,
    pub sup_a: f64,
    pub sup_s: f64,
    pub measure: MeasureTag,
    /// Effective dimension of the picture (2 or 3).
    pub dim: usize,
}

/// Planar volumes of a pure state's class spectrum.
///
/// - length 3, sorted `a >= b >= c`: areas in the `(p_0, p_1)` coordinate
///   triangle. Accessible region `x >= a, x + y >= a + b`, area
///   `((1-a)² - b²)/2`; source region `x <= a, x + y <= a + b`, area
///   `((a+b)² - b²)/2`; both suprema `1/2`.
/// - length 2, largest entry `x`: lengths on the sorted segment,
///   `V_a = √2 (1 - x)`, `V_s = √2 (x - 1/2)`, suprema `√2/2`, so
///   `C_a = C_s = 2(1 - x)`.
///
/// Zero entries are stripped first. An incoherent spectrum is drawn in the
/// picture of its padded length.
pub fn planar_example_volumes(state: &PureState, class: OperationClass) -> Result<PlanarVolumes> {
    let lambda = class_spectrum(state, class)?;
    spectrum_volumes(&lambda)
}

pub fn spectrum_volumes(lambda: &SortedSpectrum) -> Result<PlanarVolumes> {
    let rank = lambda.rank();
    let dim = if rank >= 2 { rank } else { lambda.len().min(3) };
    let v = lambda.padded(3);
    match dim {
        3 => {
            let (a, b) = (v[0], v[1]);
            let v_a = 0.5 * ((1.0 - a).powi(2) - b * b);
            let v_s = 0.5 * ((a + b).powi(2) - b * b);
            Ok(PlanarVolumes { v_a, v_s, c_a: v_a / 0.5, c_s: 1.0 - v_s / 0.5, sup_a: 0.5, sup_s: 0.5, measure: MeasureTag::CoordinatePlane, dim })
        }
        2 => {
            let x = v[0];
            let sup = SQRT_2 / 2.0;
            let v_a = SQRT_2 * (1.0 - x);
            let v_s = SQRT_2 * (x - 0.5);
            Ok(PlanarVolumes { v_a, v_s, c_a: v_a / sup, c_s: 1.0 - v_s / sup, sup_a: sup, sup_s: sup, measure: MeasureTag::SortedRepresentative, dim })
        }
        _ => Err(Error::Unsupported(format!("planar volumes need a spectrum of length 2 or 3, got rank {rank} of {}", lambda.len()))),
    }
}
