//! Equivalence of multipartite pure states under local incoherent
//! operations.
//!
//! - LICC equivalence coincides with LIU equivalence, decided by
//!   [`liu_equivalent`].
//! - SLICC equivalence means being related by local invertible SIO
//!   operators; [`verify_slicc_witness`] checks a proposed witness for any
//!   number of parties.
//! - Two-qubit states are classified completely by their support pattern and,
//!   with all four amplitudes nonzero, by the invariant `r = ad/(bc)` up to
//!   inversion.

mod liu;

pub use liu::{liu_equivalent, liu_equivalent_with, moduli_pattern, LiuWitness, LIU_FIDELITY_TOL, SEARCH_CAP};

use serde::Serialize;

use crate::channels::{KrausEntry, KrausOperator, LocalChannelProduct};
use crate::error::{Error, Result};
use crate::state::PureState;
use crate::C64;

/// Relative tolerance when comparing invariants `r`.
pub const R_TOL: f64 = 1e-8;

/// Proportionality tolerance (on `1 - fidelity`) for witnesses.
pub const WITNESS_TOL: f64 = 1e-9;

/// Support pattern of a two-qubit state modulo local basis flips.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subclass {
    /// One product term, `|00>` up to flips.
    Product,
    /// `a|00> + b|01>`: both terms share the first qubit.
    SameRow,
    /// `a|00> + c|10>`: both terms share the second qubit.
    SameColumn,
    /// `a|00> + d|11>`.
    Diagonal,
    /// Three product terms. Any missing basis state can be moved to any
    /// other by local flips, so there is a single class.
    ThreeTerm,
    /// All four terms; classes are labelled by `{r, 1/r}`.
    Generic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliccClass {
    pub rank: usize,
    pub subclass: Subclass,
    /// Occupied basis indices of the classified state.
    pub support: Vec<usize>,
    /// `(r, 1/r)` with `r = ad/(bc)`, only for rank 4.
    pub invariant: Option<(C64, C64)>,
}

impl SliccClass {
    pub fn r(&self) -> Option<C64> {
        self.invariant.map(|(r, _)| r)
    }
}

pub fn slicc_class_2qubit(psi: &PureState, tol: f64) -> Result<SliccClass> {
    let amps = psi.two_qubit_amps()?;
    let support: Vec<usize> = (0..4).filter(|&i| amps[i].norm() > tol).collect();
    let (subclass, invariant) = match support.as_slice() {
        [_] => (Subclass::Product, None),
        [i, j] if i >> 1 == j >> 1 => (Subclass::SameRow, None),
        [i, j] if i & 1 == j & 1 => (Subclass::SameColumn, None),
        [_, _] => (Subclass::Diagonal, None),
        [_, _, _] => (Subclass::ThreeTerm, None),
        [_, _, _, _] => {
            let [a, b, c, d] = amps;
            let r = a * d / (b * c);
            (Subclass::Generic, Some((r, r.inv())))
        }
        _ => return Err(Error::InvalidState("state has no amplitude above tolerance".into())),
    };
    Ok(SliccClass { rank: support.len(), subclass, support, invariant })
}

fn r_close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm())
}

/// SLICC equivalence of two-qubit states. `tol` is the amplitude-zero
/// threshold; invariants are compared with relative tolerance [`R_TOL`].
pub fn slicc_equivalent_2qubit(psi: &PureState, phi: &PureState, tol: f64) -> Result<bool> {
    let a = slicc_class_2qubit(psi, tol)?;
    let b = slicc_class_2qubit(phi, tol)?;
    if a.rank != b.rank || a.subclass != b.subclass {
        return Ok(false);
    }
    Ok(match (a.r(), b.r()) {
        (Some(ra), Some(rb)) => r_close(ra, rb, R_TOL) || r_close(ra, rb.inv(), R_TOL),
        _ => true,
    })
}

/// `alpha (|00> + |01> + |10>) + beta |11>` with `beta / alpha = r` and
/// `alpha = 1 / sqrt(3 + |r|^2)`.
pub fn canonical_coefficients(r: C64) -> (f64, C64) {
    let alpha = 1.0 / (3.0 + r.norm_sqr()).sqrt();
    (alpha, r * alpha)
}

pub fn canonical_state(r: C64) -> PureState {
    let (alpha, beta) = canonical_coefficients(r);
    let a = C64::new(alpha, 0.0);
    PureState::new(vec![2, 2], vec![a, a, a, beta]).expect("normalized by construction")
}

/// Local operators `A x B` for two qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct SliccWitness {
    pub ops: [KrausOperator; 2],
}

impl SliccWitness {
    /// SLICC protocol realizing the witness on one branch: each party runs a
    /// two-outcome strictly incoherent filter and outcome `0` on both sides
    /// applies `A x B` up to normalization.
    pub fn to_protocol(&self) -> Result<LocalChannelProduct> {
        LocalChannelProduct::from_filters(&self.ops)
    }

    /// Normalized image `(A x B) psi`.
    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        apply_local(&self.ops, psi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalForm {
    pub alpha: f64,
    pub beta: C64,
    pub r: C64,
    pub witness: SliccWitness,
}

/// SLICC canonical form of a rank-4 two-qubit state together with a
/// diagonal-diagonal witness mapping it there.
pub fn canonical_form_r4(psi: &PureState) -> Result<CanonicalForm> {
    let class = slicc_class_2qubit(psi, crate::state::DEFAULT_AMP_TOL)?;
    let Some(r) = class.r() else {
        return Err(Error::Unsupported(format!("canonical form needs 4 product terms, state has {}", class.rank)));
    };
    let (alpha, beta) = canonical_coefficients(r);
    let witness = printed_template(psi, WitnessTemplate::DiagDiag)?;
    Ok(CanonicalForm { alpha, beta, r, witness })
}

/// Shapes of local SIO operator pairs on two qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum WitnessTemplate {
    DiagDiag,
    DiagAnti,
    AntiDiag,
    AntiAnti,
}

impl WitnessTemplate {
    pub const ALL: [WitnessTemplate; 4] = [Self::DiagDiag, Self::DiagAnti, Self::AntiDiag, Self::AntiAnti];

    /// Mixed shapes send `r` to `1/r`.
    pub fn inverts_invariant(self) -> bool {
        matches!(self, Self::DiagAnti | Self::AntiDiag)
    }
}

fn diag(x: C64, y: C64) -> KrausOperator {
    KrausOperator::diagonal(&[x, y]).expect("2x2 diagonal")
}

/// `[[0, top], [bottom, 0]]`.
fn anti(top: C64, bottom: C64) -> KrausOperator {
    KrausOperator::new(2, vec![KrausEntry { target: 1, source: 0, coeff: bottom }, KrausEntry { target: 0, source: 1, coeff: top }]).expect("2x2 antidiagonal")
}

fn rank4_amps(psi: &PureState) -> Result<[C64; 4]> {
    let amps = psi.two_qubit_amps()?;
    if amps.iter().any(|a| a.norm() <= crate::state::DEFAULT_AMP_TOL) {
        return Err(Error::Unsupported("witness templates need all four amplitudes nonzero".into()));
    }
    Ok(amps)
}

/// The operator pairs exactly as they are usually written down for mapping
/// `a|00> + b|01> + c|10> + d|11>` to the canonical state with the same `r`.
///
/// Only [`WitnessTemplate::DiagDiag`] and [`WitnessTemplate::AntiAnti`] work
/// for every state. The mixed pairs land on the canonical form only when
/// `a = b` (resp. `b = d`); in general they cannot, because a mixed shape
/// inverts the invariant. Use [`template_witness`] for working versions.
pub fn printed_template(psi: &PureState, t: WitnessTemplate) -> Result<SliccWitness> {
    let [a, b, c, d] = rank4_amps(psi)?;
    let r = a * d / (b * c);
    let (alpha, beta) = canonical_coefficients(r);
    let al = C64::new(alpha, 0.0);
    let one = C64::new(1.0, 0.0);
    let ops = match t {
        WitnessTemplate::DiagDiag => [diag(al / (b * beta), one / d), diag(d * al / c, beta)],
        WitnessTemplate::DiagAnti => [diag(al / (b * beta), one / c), anti(c * al / d, beta)],
        WitnessTemplate::AntiDiag => [anti(al / (b * beta), one / b), diag(b * al / a, beta)],
        WitnessTemplate::AntiAnti => [anti(al / (c * beta), one / a), anti(a * al / b, beta)],
    };
    Ok(SliccWitness { ops })
}

/// Witness of shape `t` together with the canonical state it reaches:
/// invariant `r` for the pure shapes, `1/r` for the mixed ones.
pub fn template_witness(psi: &PureState, t: WitnessTemplate) -> Result<(SliccWitness, PureState)> {
    let [a, b, c, d] = rank4_amps(psi)?;
    let r = a * d / (b * c);
    if !t.inverts_invariant() {
        return Ok((printed_template(psi, t)?, canonical_state(r)));
    }
    let (alpha, _) = canonical_coefficients(r.inv());
    let al = C64::new(alpha, 0.0);
    let one = C64::new(1.0, 0.0);
    let ops = match t {
        WitnessTemplate::DiagAnti => [diag(one, b / d), anti(al / b, al / a)],
        WitnessTemplate::AntiDiag => [anti(al / c, al / a), diag(one, c / d)],
        _ => unreachable!(),
    };
    Ok((SliccWitness { ops }, canonical_state(r.inv())))
}

fn apply_local(ops: &[KrausOperator], psi: &PureState) -> Result<PureState> {
    if ops.len() != psi.n_parties() || ops.iter().zip(psi.dims()).any(|(o, &d)| o.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", psi.dims()),
            got: format!("{:?}", ops.iter().map(KrausOperator::dim).collect::<Vec<_>>()),
        });
    }
    let mut amps = psi.amps().to_vec();
    for (party, op) in ops.iter().enumerate() {
        amps = op.apply_to_party(&amps, psi.dims(), party);
    }
    PureState::normalized(psi.dims().to_vec(), amps)
}

/// Checks that `(A_1 x ... x A_N) psi` is proportional to `phi` and that the
/// inverses map `phi` back onto `psi`. Every `A_k` must be an invertible
/// strictly incoherent operator.
pub fn verify_slicc_witness(psi: &PureState, phi: &PureState, ops: &[KrausOperator]) -> Result<bool> {
    let mut inverses = Vec::with_capacity(ops.len());
    for (k, op) in ops.iter().enumerate() {
        let inv = op.inverse().ok_or_else(|| Error::NotInvertibleSio(format!("operator on party {k}")))?;
        inverses.push(inv);
    }
    if psi.dims() != phi.dims() {
        return Ok(false);
    }
    let forward = apply_local(ops, psi)?.fidelity(phi) >= 1.0 - WITNESS_TOL;
    let backward = apply_local(&inverses, phi)?.fidelity(psi) >= 1.0 - WITNESS_TOL;
    Ok(forward && backward)
}

/// [`verify_slicc_witness`] for a filter protocol: outcome `0` of every
/// party's channel is taken as the local operator.
pub fn verify_slicc_protocol(psi: &PureState, phi: &PureState, protocol: &LocalChannelProduct) -> Result<bool> {
    let ops: Vec<KrausOperator> = protocol.channels().iter().map(|c| c.kraus()[0].clone()).collect();
    verify_slicc_witness(psi, phi, &ops)
}
