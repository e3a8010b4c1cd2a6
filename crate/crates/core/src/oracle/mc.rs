//! Seeded Monte-Carlo volume estimates.
//!
//! Samples are split over a fixed number of shards. Shard `k` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `k`, and hit counts are summed
//! as integers, so the estimate does not depend on the number of workers or
//! the execution mode.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::majorization::{coordinate_majorizes, majorizes_slices, pio_qubit_feasible, sio_qubit_feasible};
use crate::monotones::{MonotoneKind, OperationClass};
use crate::par::Execution;
use crate::state::{QubitBloch, SortedSpectrum};

pub const MC_SHARDS: usize = 64;

/// Sampling domains. Points handed to predicates are:
/// `Simplex`: the `dim` probabilities; `BlochDisc`/`BlochHalfDisc`: `[x, z]`;
/// `PlanarTriangle`: `[p0, p1, p2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "region", rename_all = "kebab-case")]
pub enum Region {
    /// Probability simplex in `R^dim`, Euclidean measure `√dim / (dim-1)!`.
    Simplex { dim: usize },
    /// Full x-z section of the Bloch ball, area `π`.
    BlochDisc,
    /// Its `x >= 0` half, area `π/2`.
    BlochHalfDisc,
    /// `(p0, p1)` with `p0 + p1 <= 1`, area `1/2`.
    PlanarTriangle,
}

impl Region {
    pub fn measure(&self) -> f64 {
        match *self {
            Region::Simplex { dim } => (dim as f64).sqrt() / (1..dim).map(|k| k as f64).product::<f64>(),
            Region::BlochDisc => PI,
            Region::BlochHalfDisc => PI / 2.0,
            Region::PlanarTriangle => 0.5,
        }
    }

    fn point_len(&self) -> usize {
        match *self {
            Region::Simplex { dim } => dim,
            Region::BlochDisc | Region::BlochHalfDisc => 2,
            Region::PlanarTriangle => 3,
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R, buf: &mut [f64]) {
        match *self {
            Region::Simplex { .. } | Region::PlanarTriangle => {
                for v in buf.iter_mut() {
                    *v = rng.sample(Exp1);
                }
                let s: f64 = buf.iter().sum();
                for v in buf.iter_mut() {
                    *v /= s;
                }
            }
            Region::BlochDisc | Region::BlochHalfDisc => {
                let r = rng.random::<f64>().sqrt();
                let th = if *self == Region::BlochDisc {
                    2.0 * PI * rng.random::<f64>()
                } else {
                    PI * (rng.random::<f64>() - 0.5)
                };
                buf[0] = r * th.cos();
                buf[1] = r * th.sin();
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub samples: u64,
    pub hits: u64,
    pub seed: u64,
    pub region: Region,
}

impl VolumeEstimate {
    /// `|mean - value| <= k * standard_error` (or `<= floor`).
    pub fn agrees_with(&self, value: f64, k: f64, floor: f64) -> bool {
        (self.mean - value).abs() <= (k * self.standard_error).max(floor)
    }
}

pub fn mc_volume<P>(predicate: P, region: Region, samples: u64, seed: u64) -> Result<VolumeEstimate>
where
    P: Fn(&[f64]) -> bool + Sync + Send,
{
    mc_volume_with(predicate, region, samples, seed, Execution::default())
}

/// Hit ratio times region measure. The standard error is the binomial
/// error of the hit ratio times the measure.
pub fn mc_volume_with<P>(predicate: P, region: Region, samples: u64, seed: u64, exec: Execution) -> Result<VolumeEstimate>
where
    P: Fn(&[f64]) -> bool + Sync + Send,
{
    if samples == 0 {
        return Err(Error::ZeroSamples);
    }
    if let Region::Simplex { dim } = region {
        if dim < 2 {
            return Err(Error::Unsupported(format!("simplex sampling needs dim >= 2, got {dim}")));
        }
    }
    let shards = MC_SHARDS as u64;
    let hits: u64 = exec
        .map(MC_SHARDS, |k| {
            let k = k as u64;
            let n = samples / shards + u64::from(k < samples % shards);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let mut buf = vec![0.0; region.point_len()];
            (0..n).filter(|_| {
                region.sample(&mut rng, &mut buf);
                predicate(&buf)
            }).count() as u64
        })
        .into_iter()
        .sum();
    let p = hits as f64 / samples as f64;
    let m = region.measure();
    Ok(VolumeEstimate {
        mean: p * m,
        standard_error: m * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        hits,
        seed,
        region,
    })
}

/// Area of the qubit accessible region under SIO/IC or PIO over the full
/// x-z disc.
pub fn qubit_accessible_mc(r: &QubitBloch, class: OperationClass, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    let feasible = match class {
        OperationClass::SIO | OperationClass::IC => sio_qubit_feasible,
        OperationClass::PIO => pio_qubit_feasible,
        c => return Err(Error::Unsupported(format!("no qubit feasibility predicate for {c}"))),
    };
    let r = *r;
    mc_volume(move |p| feasible(&r, &QubitBloch { x: p[0], y: 0.0, z: p[1] }).feasible, Region::BlochDisc, samples, seed)
}

/// Area of the qubit source region (states that reach `r`) over the disc.
pub fn qubit_source_mc(r: &QubitBloch, class: OperationClass, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    let feasible = match class {
        OperationClass::SIO | OperationClass::IC => sio_qubit_feasible,
        OperationClass::PIO => pio_qubit_feasible,
        c => return Err(Error::Unsupported(format!("no qubit feasibility predicate for {c}"))),
    };
    let r = *r;
    mc_volume(move |p| feasible(&QubitBloch { x: p[0], y: 0.0, z: p[1] }, &r).feasible, Region::BlochDisc, samples, seed)
}

/// Volume of the sorted chamber `{μ sorted, μ ≺ λ}` (source region on the
/// sorted-representative measure), sampled on the simplex of the support.
pub fn sorted_source_mc(lambda: &SortedSpectrum, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    let support = lambda.support();
    let l = support.values().to_vec();
    mc_volume(
        move |mu| mu.windows(2).all(|w| w[0] >= w[1]) && majorizes_slices(&l, mu).unwrap_or(false),
        Region::Simplex { dim: support.len() },
        samples,
        seed,
    )
}

/// Volume of the sorted chamber `{μ sorted, λ ≺ μ}` (accessible region on
/// the sorted-representative measure). No closed form exists beyond the
/// planar cases.
pub fn sorted_accessible_mc(lambda: &SortedSpectrum, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    let l = lambda.values().to_vec();
    if l.len() < 2 {
        return Err(Error::Unsupported("accessible volume of a length-1 spectrum".into()));
    }
    mc_volume(
        move |mu| mu.windows(2).all(|w| w[0] >= w[1]) && majorizes_slices(mu, &l).unwrap_or(false),
        Region::Simplex { dim: lambda.len() },
        samples,
        seed,
    )
}

/// Coordinate-plane area of a length-3 spectrum's source or accessible
/// region: prefix sums of the unsorted sample compared with those of `λ`.
pub fn coordinate_plane_mc(lambda: &SortedSpectrum, kind: MonotoneKind, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    if lambda.len() > 3 {
        return Err(Error::Unsupported(format!("coordinate-plane regions need length <= 3, got {}", lambda.len())));
    }
    let l = lambda.padded(3);
    mc_volume(
        move |mu| match kind {
            MonotoneKind::Source => coordinate_majorizes(&l, mu),
            MonotoneKind::Accessible => coordinate_majorizes(mu, &l),
        },
        Region::PlanarTriangle,
        samples,
        seed,
    )
}
