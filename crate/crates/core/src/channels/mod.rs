//! Incoherent operations: construction, class validation, sampling and
//! action on pure states, density matrices and multipartite products.
//!
//! Four nested classes are supported, strongest first: incoherent unitaries
//! (IU), physically incoherent (PIO), strictly incoherent (SIO) and general
//! incoherent operations (IC).

mod kraus;
mod local;
mod povm;
mod sample;

pub use kraus::{KrausEntry, KrausOperator, ENTRY_TOL, PHASE_TOL};
pub use local::LocalChannelProduct;
pub use povm::{complete_to_povm, PovmCompletion};
pub use sample::{random_channel, random_channel_with, random_iu, random_unit_vector};

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{check_density, PureState, QubitBloch};
use crate::C64;

/// Frobenius tolerance on `sum_n K_n^dag K_n = I`.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// Branches with probability below this are dropped from ensembles.
pub const PRUNE_TOL: f64 = 1e-12;

/// Incoherent operation classes, ordered strongest (smallest set) first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChannelClass {
    IU,
    PIO,
    SIO,
    IC,
}

impl ChannelClass {
    pub const ALL: [ChannelClass; 4] = [ChannelClass::IU, ChannelClass::PIO, ChannelClass::SIO, ChannelClass::IC];

    /// Every channel of class `self` also belongs to `other`.
    pub fn is_subclass_of(self, other: ChannelClass) -> bool {
        self <= other
    }
}

impl fmt::Display for ChannelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ChannelClass::IU => "IU",
            ChannelClass::PIO => "PIO",
            ChannelClass::SIO => "SIO",
            ChannelClass::IC => "IC",
        };
        f.write_str(s)
    }
}

impl FromStr for ChannelClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "IU" => Ok(ChannelClass::IU),
            "PIO" => Ok(ChannelClass::PIO),
            "SIO" => Ok(ChannelClass::SIO),
            "IC" | "IO" => Ok(ChannelClass::IC),
            other => Err(Error::Parse(format!("unknown channel class {other:?}"))),
        }
    }
}

/// Which classes a Kraus set satisfies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassReport {
    pub strongest: ChannelClass,
    pub iu: bool,
    pub pio: bool,
    pub sio: bool,
    pub ic: bool,
    pub completeness_error: f64,
}

impl ClassReport {
    pub fn satisfies(&self, class: ChannelClass) -> bool {
        match class {
            ChannelClass::IU => self.iu,
            ChannelClass::PIO => self.pio,
            ChannelClass::SIO => self.sio,
            ChannelClass::IC => self.ic,
        }
    }
}

/// `|| sum_n K_n^dag K_n - I ||_F`.
pub fn completeness_error(kraus: &[KrausOperator]) -> f64 {
    let Some(first) = kraus.first() else { return f64::INFINITY };
    let d = first.dim();
    let mut acc = DMatrix::<C64>::identity(d, d) * C64::new(-1.0, 0.0);
    for k in kraus {
        acc += k.gram();
    }
    acc.norm()
}

/// Determines the strongest class a Kraus set belongs to.
pub fn validate_class(kraus: &[KrausOperator]) -> Result<ClassReport> {
    let Some(first) = kraus.first() else {
        return Err(Error::NotIncoherent("empty Kraus set".into()));
    };
    let d = first.dim();
    if let Some(k) = kraus.iter().find(|k| k.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d.to_string(), got: k.dim().to_string() });
    }
    let err = completeness_error(kraus);
    if err > COMPLETENESS_TOL {
        return Err(Error::Completeness(err));
    }
    let sio = kraus.iter().all(KrausOperator::is_injective);
    let pio = sio && kraus.iter().all(KrausOperator::is_unimodular) && {
        // supports must partition the basis
        let mut owner = vec![0usize; d];
        for k in kraus {
            for e in k.entries() {
                owner[e.source] += 1;
            }
        }
        owner.iter().all(|&n| n == 1)
    };
    let iu = pio && kraus.len() == 1;
    let strongest = if iu {
        ChannelClass::IU
    } else if pio {
        ChannelClass::PIO
    } else if sio {
        ChannelClass::SIO
    } else {
        ChannelClass::IC
    };
    Ok(ClassReport { strongest, iu, pio, sio, ic: true, completeness_error: err })
}

/// One outcome of a (possibly multi-party) measurement on a pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub prob: f64,
    pub state: PureState,
    /// Kraus index per applied channel, in application order.
    pub outcomes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    pub branches: Vec<Branch>,
}

impl Ensemble {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.prob).sum()
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Drops branches below [`PRUNE_TOL`] and rescales the rest to unit mass.
    pub(crate) fn pruned(mut branches: Vec<Branch>) -> Ensemble {
        branches.retain(|b| b.prob >= PRUNE_TOL);
        let total: f64 = branches.iter().map(|b| b.prob).sum();
        if total > 0.0 {
            for b in branches.iter_mut() {
                b.prob /= total;
            }
        }
        Ensemble { branches }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IncoherentChannel {
    class: ChannelClass,
    kraus: Vec<KrausOperator>,
}

impl IncoherentChannel {
    /// Validates completeness and that the Kraus structure belongs to `class`.
    pub fn new(class: ChannelClass, kraus: Vec<KrausOperator>) -> Result<Self> {
        let report = validate_class(&kraus)?;
        if !report.satisfies(class) {
            return Err(Error::ClassMismatch {
                claimed: class.to_string(),
                reason: format!("Kraus set only satisfies {}", report.strongest),
            });
        }
        Ok(IncoherentChannel { class, kraus })
    }

    /// Tags the channel with the strongest class it satisfies.
    pub fn from_kraus(kraus: Vec<KrausOperator>) -> Result<Self> {
        let report = validate_class(&kraus)?;
        Ok(IncoherentChannel { class: report.strongest, kraus })
    }

    pub fn identity(dim: usize) -> Self {
        IncoherentChannel { class: ChannelClass::IU, kraus: vec![KrausOperator::identity(dim)] }
    }

    /// Complete dephasing `{|i><i|}`.
    pub fn full_dephasing(dim: usize) -> Self {
        let kraus = (0..dim).map(|i| KrausOperator::projector(dim, i).expect("in range")).collect();
        IncoherentChannel { class: ChannelClass::PIO, kraus }
    }

    /// Generalized amplitude damping with Kraus operators
    /// `sqrt(p) [[1,0],[0,sqrt(1-g)]]`, `sqrt(p) [[0,sqrt(g)],[0,0]]`,
    /// `sqrt(1-p) [[sqrt(1-g),0],[0,1]]`, `sqrt(1-p) [[0,0],[sqrt(g),0]]`.
    pub fn generalized_amplitude_damping(p: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&gamma) {
            return Err(Error::NotIncoherent(format!("p = {p}, gamma = {gamma} outside [0, 1]")));
        }
        let r = |x: f64| C64::new(x, 0.0);
        let (sp, sq) = (p.sqrt(), (1.0 - p).sqrt());
        let e0 = KrausOperator::diagonal(&[r(sp), r(sp * (1.0 - gamma).sqrt())])?;
        let e1 = KrausOperator::new(2, vec![KrausEntry { target: 0, source: 1, coeff: r(sp * gamma.sqrt()) }])?;
        let e2 = KrausOperator::diagonal(&[r(sq * (1.0 - gamma).sqrt()), r(sq)])?;
        let e3 = KrausOperator::new(2, vec![KrausEntry { target: 1, source: 0, coeff: r(sq * gamma.sqrt()) }])?;
        Self::from_kraus(vec![e0, e1, e2, e3])
    }

    /// Two-outcome filter `{A / s, sqrt(I - A^dag A / s^2)}` whose first
    /// branch realizes the operator `A` up to normalization.
    ///
    /// For strictly incoherent `A` the complement is diagonal, so the channel
    /// stays SIO; otherwise the complement comes from [`complete_to_povm`].
    pub fn filter(op: &KrausOperator) -> Result<Self> {
        let gram = op.gram();
        let s = gram.clone().symmetric_eigenvalues().iter().cloned().fold(0.0f64, f64::max).sqrt();
        if !(s > 0.0) {
            return Err(Error::NotIncoherent("zero operator".into()));
        }
        let k0 = op.scaled(C64::new(1.0 / s, 0.0));
        let mut kraus = vec![k0.clone()];
        if op.is_injective() {
            let d = op.dim();
            let comp: Vec<C64> = (0..d)
                .map(|i| {
                    let w = k0.column(i).map_or(0.0, |e| e.coeff.norm_sqr());
                    C64::new((1.0 - w).max(0.0).sqrt(), 0.0)
                })
                .collect();
            if comp.iter().any(|c| c.re > ENTRY_TOL) {
                kraus.push(KrausOperator::diagonal(&comp)?);
            }
        } else {
            let completion = complete_to_povm(&k0.gram())?;
            kraus.extend(completion.kraus);
        }
        Self::from_kraus(kraus)
    }

    pub fn class(&self) -> ChannelClass {
        self.class
    }

    pub fn kraus(&self) -> &[KrausOperator] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }

    pub fn report(&self) -> ClassReport {
        validate_class(&self.kraus).expect("validated at construction")
    }

    /// Kraus branches on a pure state whose total dimension equals the
    /// channel dimension.
    pub fn apply_to_pure(&self, state: &PureState) -> Result<Ensemble> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim().to_string(), got: state.dim().to_string() });
        }
        let branches = self
            .kraus
            .iter()
            .enumerate()
            .filter_map(|(n, k)| {
                let out = k.apply(state.amps());
                branch_from(state.dims().to_vec(), out, vec![n])
            })
            .collect();
        Ok(Ensemble::pruned(branches))
    }

    /// Applies the channel to party `party` of a multipartite pure state.
    pub fn apply_to_party(&self, state: &PureState, party: usize) -> Result<Ensemble> {
        let d = *state
            .dims()
            .get(party)
            .ok_or_else(|| Error::DimensionMismatch { expected: format!("party < {}", state.n_parties()), got: party.to_string() })?;
        if d != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim().to_string(), got: d.to_string() });
        }
        let branches = self
            .kraus
            .iter()
            .enumerate()
            .filter_map(|(n, k)| {
                let out = k.apply_to_party(state.amps(), state.dims(), party);
                branch_from(state.dims().to_vec(), out, vec![n])
            })
            .collect();
        Ok(Ensemble::pruned(branches))
    }

    /// `sum_n K_n rho K_n^dag`.
    pub fn apply_to_density(&self, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        if rho.shape() != (self.dim(), self.dim()) {
            return Err(Error::DimensionMismatch { expected: format!("{0}x{0}", self.dim()), got: format!("{:?}", rho.shape()) });
        }
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for k in &self.kraus {
            let m = k.to_dense();
            out += &m * rho * m.adjoint();
        }
        Ok(out)
    }

    /// Normalized post-measurement states `(p_n, K_n rho K_n^dag / p_n)`.
    pub fn density_branches(&self, rho: &DMatrix<C64>) -> Result<Vec<(f64, DMatrix<C64>)>> {
        if rho.shape() != (self.dim(), self.dim()) {
            return Err(Error::DimensionMismatch { expected: format!("{0}x{0}", self.dim()), got: format!("{:?}", rho.shape()) });
        }
        let mut out = Vec::new();
        for k in &self.kraus {
            let m = k.to_dense();
            let s = &m * rho * m.adjoint();
            let p = s.trace().re;
            if p >= PRUNE_TOL {
                out.push((p, s / C64::new(p, 0.0)));
            }
        }
        Ok(out)
    }

    pub fn apply_to_bloch(&self, r: &QubitBloch) -> Result<QubitBloch> {
        let rho = self.apply_to_density(&r.to_density())?;
        check_density(&rho, 1e-9)?;
        QubitBloch::from_density(&rho)
    }

    /// Branch states of a qubit channel as Bloch vectors.
    pub fn bloch_branches(&self, r: &QubitBloch) -> Result<Vec<(f64, QubitBloch)>> {
        self.density_branches(&r.to_density())?
            .into_iter()
            .map(|(p, rho)| Ok((p, QubitBloch::from_density(&rho)?)))
            .collect()
    }
}

fn branch_from(dims: Vec<usize>, amps: Vec<C64>, outcomes: Vec<usize>) -> Option<Branch> {
    let prob: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if prob < PRUNE_TOL {
        return None;
    }
    let state = PureState::normalized(dims, amps).ok()?;
    Some(Branch { prob, state, outcomes })
}
