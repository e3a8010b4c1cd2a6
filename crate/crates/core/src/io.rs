//! JSON file formats.
//!
//! States: `{"dims":[2,2],"amps":[[re,im],...]}`, amplitudes row-major.
//! Channels: `{"class":"SIO","kraus":[{"entries":[[j,i,re,im],...]},...]}`
//! where `[j, i, re, im]` is the coefficient of `|j><i|`. The dimension is
//! the largest index plus one unless a `"dim"` field is given.

use serde::{Deserialize, Serialize};

use crate::channels::{ChannelClass, IncoherentChannel, KrausEntry, KrausOperator};
use crate::error::{Error, Result};
use crate::state::PureState;
use crate::C64;

/// Squared-norm deviation accepted on load without `renormalize`.
pub const LOAD_NORM_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub amps: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausFile {
    pub entries: Vec<[f64; 4]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub kraus: Vec<KrausFile>,
}

impl StateFile {
    pub fn from_state(psi: &PureState) -> Self {
        StateFile { dims: psi.dims().to_vec(), amps: psi.amps().iter().map(|a| [a.re, a.im]).collect() }
    }

    /// Builds the state, rescaling it to unit norm. Without `renormalize`
    /// the squared norm must already be within [`LOAD_NORM_TOL`] of 1.
    pub fn into_state(self, renormalize: bool) -> Result<PureState> {
        let amps: Vec<C64> = self.amps.iter().map(|&[re, im]| C64::new(re, im)).collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !renormalize && (norm - 1.0).abs() > LOAD_NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm} is not 1 within {LOAD_NORM_TOL:e} (use renormalization to rescale)")));
        }
        PureState::normalized(self.dims, amps)
    }
}

fn index(x: f64, what: &str) -> Result<usize> {
    if x >= 0.0 && x.fract() == 0.0 && x < u32::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(Error::Parse(format!("{what} index {x} is not a nonnegative integer")))
    }
}

impl ChannelFile {
    pub fn from_channel(ch: &IncoherentChannel) -> Self {
        let kraus = ch
            .kraus()
            .iter()
            .map(|k| KrausFile { entries: k.entries().iter().map(|e| [e.target as f64, e.source as f64, e.coeff.re, e.coeff.im]).collect() })
            .collect();
        ChannelFile { class: ch.class().to_string(), dim: None, kraus }
    }

    /// Parses the class and Kraus operators and validates completeness and
    /// class structure.
    pub fn into_channel(self) -> Result<IncoherentChannel> {
        let class: ChannelClass = self.class.parse()?;
        let mut ops = Vec::with_capacity(self.kraus.len());
        for k in &self.kraus {
            let entries = k
                .entries
                .iter()
                .map(|&[j, i, re, im]| Ok(KrausEntry { target: index(j, "target")?, source: index(i, "source")?, coeff: C64::new(re, im) }))
                .collect::<Result<Vec<_>>>()?;
            ops.push(entries);
        }
        let inferred = ops.iter().flatten().map(|e| e.target.max(e.source) + 1).max().unwrap_or(0);
        let dim = self.dim.unwrap_or(inferred);
        let kraus = ops.into_iter().map(|e| KrausOperator::new(dim, e)).collect::<Result<Vec<_>>>()?;
        IncoherentChannel::new(class, kraus)
    }
}

pub fn parse_state(json: &str, renormalize: bool) -> Result<PureState> {
    let f: StateFile = serde_json::from_str(json).map_err(|e| Error::Parse(format!("state file: {e}")))?;
    f.into_state(renormalize)
}

pub fn state_to_json(psi: &PureState) -> String {
    serde_json::to_string(&StateFile::from_state(psi)).expect("plain data serializes")
}

pub fn parse_channel(json: &str) -> Result<IncoherentChannel> {
    let f: ChannelFile = serde_json::from_str(json).map_err(|e| Error::Parse(format!("channel file: {e}")))?;
    f.into_channel()
}

pub fn channel_to_json(ch: &IncoherentChannel) -> String {
    serde_json::to_string(&ChannelFile::from_channel(ch)).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::random_channel;
    use proptest::prelude::*;

    #[test]
    fn reads_documented_state() {
        let psi = parse_state(r#"{"dims":[2,2],"amps":[[0.5,0],[0.5,0],[0.5,0],[0,0.5]]}"#, false).unwrap();
        assert_eq!(psi.dims(), &[2, 2]);
        assert_eq!(psi.amps()[3], C64::new(0.0, 0.5));
    }

    #[test]
    fn norm_enforced_unless_renormalizing() {
        let json = r#"{"dims":[2],"amps":[[1,0],[1,0]]}"#;
        assert!(matches!(parse_state(json, false), Err(Error::InvalidState(_))));
        let psi = parse_state(json, true).unwrap();
        assert!((psi.amps()[0].re - 0.5f64.sqrt()).abs() < 1e-15);
        // small deviations are absorbed
        assert!(parse_state(r#"{"dims":[2],"amps":[[0.6,0],[0.800000001,0]]}"#, false).is_ok());
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_state("{", false).is_err());
        assert!(parse_state(r#"{"dims":[3],"amps":[[1,0],[0,0]]}"#, false).is_err());
        assert!(parse_state(r#"{"dims":[1],"amps":[[1,0]],"extra":1}"#, false).is_err());
        assert!(parse_channel(r#"{"class":"XIO","kraus":[]}"#).is_err());
        assert!(parse_channel(r#"{"class":"SIO","kraus":[{"entries":[[0.5,0,1,0]]}]}"#).is_err());
        // incomplete
        assert!(matches!(parse_channel(r#"{"class":"IC","kraus":[{"entries":[[0,0,1,0]]}],"dim":2}"#), Err(Error::Completeness(_))));
    }

    #[test]
    fn reads_documented_channel() {
        let ch = parse_channel(r#"{"class":"SIO","kraus":[{"entries":[[0,0,1,0],[1,1,0,1]]}]}"#).unwrap();
        assert_eq!(ch.dim(), 2);
        assert_eq!(ch.class(), ChannelClass::SIO);
        assert!(ch.report().iu);
    }

    #[test]
    fn channel_round_trip() {
        for class in ChannelClass::ALL {
            let n = if class == ChannelClass::IU { 1 } else { 3 };
            let ch = random_channel(class, 3, n, 17).unwrap();
            let back = parse_channel(&channel_to_json(&ch)).unwrap();
            assert_eq!(back.class(), ch.class());
            for (a, b) in back.kraus().iter().zip(ch.kraus()) {
                assert!((a.to_dense() - b.to_dense()).norm() < 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn state_round_trip(v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4)) {
            prop_assume!(v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3);
            let psi = PureState::normalized(vec![2, 2], v.iter().map(|&(a, b)| C64::new(a, b)).collect()).unwrap();
            let back = parse_state(&state_to_json(&psi), false).unwrap();
            prop_assert_eq!(back.dims(), psi.dims());
            for (a, b) in back.amps().iter().zip(psi.amps()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
