//! Randomized monotonicity checks: free operations never increase a
//! monotone, and incoherent states have zero coherence.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::{random_channel_with, random_unit_vector, ChannelClass};
use crate::error::{Error, Result};
use crate::majorization::ic_pure_feasible;
use crate::monotones::{qubit_pio_ca, qubit_pio_cs, qubit_sio_ca, qubit_sio_cs, source_coherence_closed, OperationClass};
use crate::par::Execution;
use crate::state::{PureState, QubitBloch};
use crate::C64;

/// Allowed increase before a trial counts as a violation.
pub const MONOTONICITY_TOL: f64 = 1e-8;
/// Allowed change under IU channels.
pub const IU_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteMonotone {
    QubitSioCa,
    QubitSioCs,
    QubitPioCa,
    QubitPioCs,
    /// Closed-form source coherence of pure states under IC.
    PureSourceIc,
}

impl SuiteMonotone {
    pub const ALL: [SuiteMonotone; 5] =
        [SuiteMonotone::QubitSioCa, SuiteMonotone::QubitSioCs, SuiteMonotone::QubitPioCa, SuiteMonotone::QubitPioCs, SuiteMonotone::PureSourceIc];

    /// Largest channel class the monotone is meant to be monotone under.
    pub fn native_class(self) -> ChannelClass {
        match self {
            SuiteMonotone::QubitPioCa | SuiteMonotone::QubitPioCs => ChannelClass::PIO,
            SuiteMonotone::QubitSioCa | SuiteMonotone::QubitSioCs => ChannelClass::SIO,
            SuiteMonotone::PureSourceIc => ChannelClass::IC,
        }
    }

    fn qubit_value(self, r: &QubitBloch) -> f64 {
        match self {
            SuiteMonotone::QubitSioCa => qubit_sio_ca(r).value,
            SuiteMonotone::QubitSioCs => qubit_sio_cs(r).value,
            SuiteMonotone::QubitPioCa => qubit_pio_ca(r).value,
            SuiteMonotone::QubitPioCs => qubit_pio_cs(r).value,
            SuiteMonotone::PureSourceIc => unreachable!("pure-state monotone"),
        }
    }
}

impl fmt::Display for SuiteMonotone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SuiteMonotone::QubitSioCa => "sio-ca",
            SuiteMonotone::QubitSioCs => "sio-cs",
            SuiteMonotone::QubitPioCa => "pio-ca",
            SuiteMonotone::QubitPioCs => "pio-cs",
            SuiteMonotone::PureSourceIc => "pure-cs",
        };
        f.write_str(s)
    }
}

impl FromStr for SuiteMonotone {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteMonotone::ALL
            .into_iter()
            .find(|m| m.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown monotone {s:?} (expected sio-ca, sio-cs, pio-ca, pio-cs or pure-cs)")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub monotone: SuiteMonotone,
    pub channel_class: ChannelClass,
    pub trials: usize,
    pub seed: u64,
    /// Trials with `C(out) - C(in) > MONOTONICITY_TOL`.
    pub violations: usize,
    /// Largest `C(out) - C(in)` seen (negative if every trial decreased).
    pub max_violation: f64,
    /// Largest `|C(out) - C(in)|`; only meaningful for IU channels.
    pub max_abs_change: f64,
    pub incoherent_trials: usize,
    /// Largest `|C|` over random incoherent states.
    pub incoherent_max: f64,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.incoherent_max <= MONOTONICITY_TOL && (self.channel_class != ChannelClass::IU || self.max_abs_change <= IU_TOL)
    }
}

pub fn monotonicity_suite(monotone: SuiteMonotone, class: ChannelClass, trials: usize, seed: u64) -> Result<MonotonicityReport> {
    monotonicity_suite_with(monotone, class, trials, seed, Execution::default())
}

/// Runs `trials` random (state, free operation) pairs plus `trials` random
/// incoherent states.
///
/// Qubit monotones: states are drawn uniformly from the Bloch ball and sent
/// through a random channel of `class` with one to four Kraus operators
/// (one for IU); the monotone is compared on input and output.
///
/// Pure-state source coherence: states are Haar-random in dimension 2 to 4.
/// For IU the random channel maps pure states to pure states and is applied
/// directly. For the other classes the output of a general channel is mixed,
/// so the trial instead builds a target that is reachable deterministically:
/// mass is moved from smaller to larger dephased probabilities, then the
/// basis is permuted and phases randomized. The conversion is confirmed
/// with the pure-state feasibility predicate before comparing.
///
/// Trial `k` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `k`.
pub fn monotonicity_suite_with(monotone: SuiteMonotone, class: ChannelClass, trials: usize, seed: u64, exec: Execution) -> Result<MonotonicityReport> {
    let deltas: Vec<Result<f64>> = exec.map(trials, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        match monotone {
            SuiteMonotone::PureSourceIc => pure_trial(class, &mut rng),
            m => qubit_trial(m, class, &mut rng),
        }
    });
    let incoherent: Vec<Result<f64>> = exec.map(trials, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1C0_4E2E);
        rng.set_stream(k as u64);
        match monotone {
            SuiteMonotone::PureSourceIc => {
                let d = rng.random_range(2..=4);
                let psi = PureState::basis(vec![d], rng.random_range(0..d))?;
                Ok(source_coherence_closed(&psi, OperationClass::IC)?.value.abs())
            }
            m => {
                let z = rng.random_range(-1.0..=1.0);
                Ok(m.qubit_value(&QubitBloch::new(0.0, 0.0, z)?).abs())
            }
        }
    });
    let mut report = MonotonicityReport {
        monotone,
        channel_class: class,
        trials,
        seed,
        violations: 0,
        max_violation: f64::NEG_INFINITY,
        max_abs_change: 0.0,
        incoherent_trials: trials,
        incoherent_max: 0.0,
    };
    for d in deltas {
        let d = d?;
        if d > MONOTONICITY_TOL {
            report.violations += 1;
        }
        report.max_violation = report.max_violation.max(d);
        report.max_abs_change = report.max_abs_change.max(d.abs());
    }
    for c in incoherent {
        report.incoherent_max = report.incoherent_max.max(c?);
    }
    Ok(report)
}

fn random_ball_point<R: Rng>(rng: &mut R) -> QubitBloch {
    loop {
        let (x, y, z) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if x * x + y * y + z * z <= 1.0 {
            return QubitBloch { x, y, z };
        }
    }
}

fn n_kraus<R: Rng>(class: ChannelClass, dim: usize, rng: &mut R) -> usize {
    match class {
        ChannelClass::IU => 1,
        ChannelClass::PIO => rng.random_range(1..=dim),
        _ => rng.random_range(1..=4),
    }
}

fn qubit_trial<R: Rng>(m: SuiteMonotone, class: ChannelClass, rng: &mut R) -> Result<f64> {
    let r = random_ball_point(rng);
    let ch = random_channel_with(class, 2, n_kraus(class, 2, rng), rng)?;
    let s = ch.apply_to_bloch(&r)?;
    Ok(m.qubit_value(&s) - m.qubit_value(&r))
}

fn pure_trial<R: Rng>(class: ChannelClass, rng: &mut R) -> Result<f64> {
    let d = rng.random_range(2..=4);
    let psi = PureState::new(vec![d], random_unit_vector(d, rng))?;
    let phi = if class == ChannelClass::IU {
        let ch = random_channel_with(class, d, 1, rng)?;
        ch.apply_to_pure(&psi)?.branches.swap_remove(0).state
    } else {
        let target = reachable_target(&psi, rng)?;
        if !ic_pure_feasible(&psi, &target)?.feasible {
            return Err(Error::InfeasibleSampling("constructed target is not reachable".into()));
        }
        target
    };
    let before = source_coherence_closed(&psi, OperationClass::IC)?.value;
    let after = source_coherence_closed(&phi, OperationClass::IC)?.value;
    Ok(after - before)
}

/// A pure state whose dephased spectrum majorizes that of `psi`.
fn reachable_target<R: Rng>(psi: &PureState, rng: &mut R) -> Result<PureState> {
    let mut p: Vec<f64> = psi.dephased_spectrum().into_inner();
    let d = p.len();
    for _ in 0..rng.random_range(1..=3) {
        // move mass from j to i where p_i >= p_j
        let (a, b) = (rng.random_range(0..d), rng.random_range(0..d));
        let (i, j) = if p[a] >= p[b] { (a, b) } else { (b, a) };
        if i != j {
            let delta = rng.random::<f64>() * p[j];
            p[i] += delta;
            p[j] -= delta;
        }
    }
    p.shuffle(rng);
    let amps: Vec<C64> = p.iter().map(|&x| C64::from_polar(x.max(0.0).sqrt(), rng.random_range(0.0..std::f64::consts::TAU))).collect();
    PureState::normalized(vec![d], amps)
}
