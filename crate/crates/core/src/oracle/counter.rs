//! Searches for violations of strong monotonicity (average over Kraus
//! branches) and convexity by the qubit SIO/IC accessible and source
//! coherence.
//!
//! Grid states are `ρ = (I + t X + z Z) / 2`. Convexity is tested on the
//! eigendecomposition of `ρ`; strong monotonicity on the generalized
//! amplitude damping channel with parameters `(p, γ)`. Pure eigenstates
//! maximize `C_a`, so the grid cannot break convexity of `C_a`; the
//! randomized search covers general mixtures and SIO channels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::{random_channel_with, ChannelClass, IncoherentChannel};
use crate::error::Result;
use crate::monotones::{qubit_sio_ca, qubit_sio_cs};
use crate::par::Execution;
use crate::state::QubitBloch;

/// A violation must exceed this to count.
pub const VIOLATION_MARGIN: f64 = 1e-3;
/// Grid `0.05, 0.10, ..., 0.95` in every parameter.
pub const GRID: [f64; 19] = [
    0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QubitMonotone {
    Ca,
    Cs,
}

impl QubitMonotone {
    pub fn value(self, r: &QubitBloch) -> f64 {
        match self {
            QubitMonotone::Ca => qubit_sio_ca(r).value,
            QubitMonotone::Cs => qubit_sio_cs(r).value,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// `C(ρ) >= Σ_n p_n C(ρ_n)` over the branches of a free channel.
    StrongMonotonicity,
    /// `Σ_i p_i C(ρ_i) >= C(ρ)` for `ρ = Σ_i p_i ρ_i`.
    Convexity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReferenceInstance {
    pub monotone: QubitMonotone,
    pub condition: Condition,
    pub t: f64,
    pub z: f64,
    pub p: Option<f64>,
    pub gamma: Option<f64>,
    /// Reference value of the difference quoted alongside the instance.
    pub reference: f64,
    /// Normalized eigenvectors, or branch probabilities as weights.
    pub normalized: f64,
    /// Eigenvectors used with the unnormalized coefficients of the closed
    /// form, or branch values summed without weights.
    pub as_printed: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridPoint {
    pub t: f64,
    pub z: f64,
    pub p: f64,
    pub gamma: f64,
    /// Amount by which the condition fails (positive means violated).
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridResult {
    pub monotone: QubitMonotone,
    pub condition: Condition,
    pub points: usize,
    pub violations: usize,
    pub worst: Option<GridPoint>,
}

impl GridResult {
    pub fn certified(&self) -> bool {
        self.worst.is_some_and(|w| w.margin > VIOLATION_MARGIN)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    /// Largest eigenvalue of `ρ` at `t = z = 0.1`.
    pub eigenvalue_check: f64,
    pub instances: Vec<ReferenceInstance>,
    pub grid: Vec<GridResult>,
    /// Randomized search beyond the grid: arbitrary two-state mixtures for
    /// convexity, random SIO channels for strong monotonicity.
    pub extended: Vec<SearchResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub monotone: QubitMonotone,
    pub condition: Condition,
    pub trials: usize,
    pub seed: u64,
    /// Largest margin found (positive means violated).
    pub margin: f64,
    /// Input Bloch vector(s) of the worst trial (two for mixtures, plus the
    /// weight of the first in `weight`).
    pub states: Vec<[f64; 2]>,
    pub weight: Option<f64>,
}

impl SearchResult {
    pub fn certified(&self) -> bool {
        self.margin > VIOLATION_MARGIN
    }
}

impl CounterexampleReport {
    /// Every (monotone, condition) pair has a violation above the margin.
    pub fn certified(&self) -> bool {
        self.grid.len() == 4 && self.grid.iter().all(GridResult::certified)
    }

    /// Whether the grid or the randomized search found a violation for the
    /// given pair.
    pub fn violated_anywhere(&self, m: QubitMonotone, c: Condition) -> bool {
        self.grid.iter().any(|g| g.monotone == m && g.condition == c && g.certified())
            || self.extended.iter().any(|e| e.monotone == m && e.condition == c && e.certified())
    }
}

/// Trials of the randomized search per (monotone, condition) pair.
pub const SEARCH_TRIALS: usize = 200_000;
const SEARCH_SEED: u64 = 0x0B3B_4C0E;
const SEARCH_SHARDS: usize = 32;

fn disc_point<R: Rng>(rng: &mut R) -> [f64; 2] {
    loop {
        let (x, z) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if x * x + z * z <= 1.0 {
            return [x, z];
        }
    }
}

fn search_trial<R: Rng>(m: QubitMonotone, c: Condition, rng: &mut R) -> Result<(f64, Vec<[f64; 2]>, Option<f64>)> {
    let b = |p: [f64; 2]| bloch(p[0], p[1]);
    match c {
        Condition::Convexity => {
            let (a, d, w) = (disc_point(rng), disc_point(rng), rng.random::<f64>());
            let mix = [w * a[0] + (1.0 - w) * d[0], w * a[1] + (1.0 - w) * d[1]];
            let margin = m.value(&b(mix)) - w * m.value(&b(a)) - (1.0 - w) * m.value(&b(d));
            Ok((margin, vec![a, d], Some(w)))
        }
        Condition::StrongMonotonicity => {
            let r = disc_point(rng);
            let ch = random_channel_with(ChannelClass::SIO, 2, rng.random_range(1..=4), rng)?;
            let avg: f64 = ch.bloch_branches(&b(r))?.iter().map(|(p, s)| p * m.value(s)).sum();
            Ok((avg - m.value(&b(r)), vec![r], None))
        }
    }
}

fn random_search(m: QubitMonotone, c: Condition, trials: usize, seed: u64, exec: Execution) -> Result<SearchResult> {
    let shards: Vec<Result<Option<(f64, Vec<[f64; 2]>, Option<f64>)>>> = exec.map(SEARCH_SHARDS, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let n = trials / SEARCH_SHARDS + usize::from(k < trials % SEARCH_SHARDS);
        let mut best: Option<(f64, Vec<[f64; 2]>, Option<f64>)> = None;
        for _ in 0..n {
            let t = search_trial(m, c, &mut rng)?;
            if best.as_ref().is_none_or(|b| t.0 > b.0) {
                best = Some(t);
            }
        }
        Ok(best)
    });
    let mut res = SearchResult { monotone: m, condition: c, trials, seed, margin: f64::NEG_INFINITY, states: Vec::new(), weight: None };
    for s in shards {
        if let Some((margin, states, weight)) = s? {
            if margin > res.margin {
                res = SearchResult { margin, states, weight, ..res };
            }
        }
    }
    Ok(res)
}

fn bloch(t: f64, z: f64) -> QubitBloch {
    QubitBloch { x: t, y: 0.0, z }
}

/// `(1 ± √(t² + z²)) / 2`.
pub fn eigenvalues(t: f64, z: f64) -> (f64, f64) {
    let n = t.hypot(z);
    ((1.0 + n) / 2.0, (1.0 - n) / 2.0)
}

/// Eigenvector coefficients as given in closed form (not normalized):
/// `(t/2) (z ± n) / (n² ± z n)` on `|0>` and `(t/2) t / (n² ± z n)` on `|1>`.
pub fn unnormalized_eigenvectors(t: f64, z: f64) -> [[f64; 2]; 2] {
    let n = t.hypot(z);
    let v = |s: f64| {
        let den = n * n + s * z * n;
        [t / 2.0 * (z + s * n) / den, t / 2.0 * t / den]
    };
    [v(1.0), v(-1.0)]
}

/// Bloch vector of `|v><v|` read with trace-one formulas.
fn ket_bloch(v: [f64; 2], normalize: bool) -> QubitBloch {
    let s = if normalize { v[0] * v[0] + v[1] * v[1] } else { 1.0 };
    QubitBloch { x: 2.0 * v[0] * v[1] / s, y: 0.0, z: (v[0] * v[0] - v[1] * v[1]) / s }
}

/// `C(ρ) - λ₁ C(|λ₁>) - λ₂ C(|λ₂>)`; positive values violate convexity.
pub fn convexity_gap(m: QubitMonotone, t: f64, z: f64, normalize: bool) -> f64 {
    let (l1, l2) = eigenvalues(t, z);
    let [v1, v2] = unnormalized_eigenvectors(t, z);
    m.value(&bloch(t, z)) - l1 * m.value(&ket_bloch(v1, normalize)) - l2 * m.value(&ket_bloch(v2, normalize))
}

/// `C(ρ) - Σ_n w_n C(ρ_n)` over the generalized amplitude damping branches,
/// with `w_n = p_n` when `weighted`, else 1. Negative values violate strong
/// monotonicity.
pub fn strong_monotonicity_gap(m: QubitMonotone, t: f64, z: f64, p: f64, gamma: f64, weighted: bool) -> Result<f64> {
    let ch = IncoherentChannel::generalized_amplitude_damping(p, gamma)?;
    let r = bloch(t, z);
    let sum: f64 = ch.bloch_branches(&r)?.iter().map(|(pn, s)| if weighted { pn } else { &1.0 } * m.value(s)).sum();
    Ok(m.value(&r) - sum)
}

fn instances() -> Result<Vec<ReferenceInstance>> {
    let conv = |m, reference| ReferenceInstance {
        monotone: m,
        condition: Condition::Convexity,
        t: 0.1,
        z: 0.1,
        p: None,
        gamma: None,
        reference,
        normalized: convexity_gap(m, 0.1, 0.1, true),
        as_printed: convexity_gap(m, 0.1, 0.1, false),
    };
    let strong = |m, t: f64, p: f64, gamma: f64, reference| -> Result<ReferenceInstance> {
        Ok(ReferenceInstance {
            monotone: m,
            condition: Condition::StrongMonotonicity,
            t,
            z: t,
            p: Some(p),
            gamma: Some(gamma),
            reference,
            normalized: strong_monotonicity_gap(m, t, t, p, gamma, true)?,
            as_printed: strong_monotonicity_gap(m, t, t, p, gamma, false)?,
        })
    };
    Ok(vec![
        conv(QubitMonotone::Ca, 0.0994),
        strong(QubitMonotone::Ca, 0.5, 0.99, 0.5, -0.1912)?,
        conv(QubitMonotone::Cs, 0.6930),
        strong(QubitMonotone::Cs, 0.4, 0.99, 0.8, -0.2123)?,
    ])
}

fn grid_search(m: QubitMonotone, condition: Condition, exec: Execution) -> Result<GridResult> {
    let rows: Vec<Result<Vec<GridPoint>>> = exec.map(GRID.len(), |i| {
        let t = GRID[i];
        let mut out = Vec::new();
        for &z in GRID.iter().filter(|&&z| t * t + z * z <= 1.0) {
            match condition {
                Condition::Convexity => out.push(GridPoint { t, z, p: f64::NAN, gamma: f64::NAN, margin: convexity_gap(m, t, z, true) }),
                Condition::StrongMonotonicity => {
                    for &p in &GRID {
                        for &gamma in &GRID {
                            let margin = -strong_monotonicity_gap(m, t, z, p, gamma, true)?;
                            out.push(GridPoint { t, z, p, gamma, margin });
                        }
                    }
                }
            }
        }
        Ok(out)
    });
    let mut res = GridResult { monotone: m, condition, points: 0, violations: 0, worst: None };
    for row in rows {
        for g in row? {
            res.points += 1;
            if g.margin > VIOLATION_MARGIN {
                res.violations += 1;
            }
            if res.worst.is_none_or(|w| g.margin > w.margin) {
                res.worst = Some(g);
            }
        }
    }
    Ok(res)
}

pub fn b3_b4_counterexamples() -> Result<CounterexampleReport> {
    b3_b4_counterexamples_with(Execution::default())
}

/// Reference instances under both conventions, the grid search over
/// `(t, z, p, γ)` with `t² + z² <= 1`, and the randomized search.
pub fn b3_b4_counterexamples_with(exec: Execution) -> Result<CounterexampleReport> {
    let (mut grid, mut extended) = (Vec::with_capacity(4), Vec::with_capacity(4));
    for m in [QubitMonotone::Ca, QubitMonotone::Cs] {
        for c in [Condition::StrongMonotonicity, Condition::Convexity] {
            grid.push(grid_search(m, c, exec)?);
            extended.push(random_search(m, c, SEARCH_TRIALS, SEARCH_SEED, exec)?);
        }
    }
    Ok(CounterexampleReport { eigenvalue_check: eigenvalues(0.1, 0.1).0, instances: instances()?, grid, extended })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eigen_data() {
        assert_abs_diff_eq!(eigenvalues(0.1, 0.1).0, 0.570_710_678_118_654_8, epsilon = 1e-15);
        let (t, z) = (0.3, -0.2);
        let rho = nalgebra::Matrix2::new(1.0 + z, t, t, 1.0 - z) / 2.0;
        let (l1, l2) = eigenvalues(t, z);
        for (v, l) in unnormalized_eigenvectors(t, z).into_iter().zip([l1, l2]) {
            let v = nalgebra::Vector2::new(v[0], v[1]);
            assert!((rho * v - v * l).norm() < 1e-12);
        }
    }

    #[test]
    fn normalized_eigenstates_are_pure() {
        let [v1, _] = unnormalized_eigenvectors(0.1, 0.1);
        let b = ket_bloch(v1, true);
        assert_abs_diff_eq!(b.norm_sqr(), 1.0, epsilon = 1e-12);
        assert!(ket_bloch(v1, false).norm_sqr() < 1.0);
    }

    #[test]
    fn report_shape() {
        let rep = b3_b4_counterexamples().unwrap();
        assert_eq!(rep.instances.len(), 4);
        assert_eq!(rep.grid.len(), 4);
        assert!(rep.instances.iter().all(|i| i.normalized.is_finite() && i.as_printed.is_finite()));
        // the eigendecomposition grid breaks convexity of C_s
        let cs = rep.grid.iter().find(|g| g.monotone == QubitMonotone::Cs && g.condition == Condition::Convexity).unwrap();
        assert!(cs.certified());
    }

    #[test]
    fn ca_is_not_convex_for_general_mixtures() {
        // eigenstates are pure, where C_a peaks, so only non-spectral
        // decompositions can exhibit this
        let rep = random_search(QubitMonotone::Ca, Condition::Convexity, 20_000, 1, Execution::default()).unwrap();
        assert!(rep.certified(), "{rep:?}");
        assert!(convexity_gap(QubitMonotone::Ca, 0.3, 0.4, true) <= 0.0);
    }

    #[test]
    fn search_is_mode_independent() {
        let a = random_search(QubitMonotone::Cs, Condition::StrongMonotonicity, 500, 2, Execution::Sequential).unwrap();
        let b = random_search(QubitMonotone::Cs, Condition::StrongMonotonicity, 500, 2, Execution::default()).unwrap();
        assert_eq!(a, b);
    }
}
