use super::{Branch, Ensemble, IncoherentChannel, KrausOperator, PRUNE_TOL};
use crate::error::{Error, Result};
use crate::state::PureState;

/// One incoherent channel per party, applied party by party.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalChannelProduct {
    channels: Vec<IncoherentChannel>,
}

impl LocalChannelProduct {
    pub fn new(channels: Vec<IncoherentChannel>) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::InvalidState("empty local product".into()));
        }
        Ok(LocalChannelProduct { channels })
    }

    pub fn identity(dims: &[usize]) -> Self {
        LocalChannelProduct { channels: dims.iter().map(|&d| IncoherentChannel::identity(d)).collect() }
    }

    /// Two-outcome filters whose all-zero branch applies `ops[k]` to party `k`.
    pub fn from_filters(ops: &[KrausOperator]) -> Result<Self> {
        Self::new(ops.iter().map(IncoherentChannel::filter).collect::<Result<_>>()?)
    }

    pub fn channels(&self) -> &[IncoherentChannel] {
        &self.channels
    }

    pub fn dims(&self) -> Vec<usize> {
        self.channels.iter().map(IncoherentChannel::dim).collect()
    }

    fn check(&self, state: &PureState) -> Result<()> {
        if state.dims() != self.dims().as_slice() {
            return Err(Error::DimensionMismatch { expected: format!("{:?}", self.dims()), got: format!("{:?}", state.dims()) });
        }
        Ok(())
    }

    /// Full branch tree; `outcomes[k]` is the Kraus index measured on party `k`.
    pub fn apply(&self, state: &PureState) -> Result<Ensemble> {
        self.check(state)?;
        let mut branches = vec![Branch { prob: 1.0, state: state.clone(), outcomes: Vec::new() }];
        for (party, ch) in self.channels.iter().enumerate() {
            let mut next = Vec::with_capacity(branches.len() * ch.kraus().len());
            for b in branches {
                for sub in ch.apply_to_party(&b.state, party)?.branches {
                    let prob = b.prob * sub.prob;
                    if prob >= PRUNE_TOL {
                        let mut outcomes = b.outcomes.clone();
                        outcomes.extend(sub.outcomes);
                        next.push(Branch { prob, state: sub.state, outcomes });
                    }
                }
            }
            branches = next;
        }
        Ok(Ensemble::pruned(branches))
    }

    /// Unnormalized image `(K_{o_1} x ... x K_{o_N}) psi` for one outcome string.
    pub fn branch_amplitudes(&self, state: &PureState, outcomes: &[usize]) -> Result<Vec<crate::C64>> {
        self.check(state)?;
        if outcomes.len() != self.channels.len() {
            return Err(Error::DimensionMismatch { expected: self.channels.len().to_string(), got: outcomes.len().to_string() });
        }
        let mut amps = state.amps().to_vec();
        for (party, (ch, &o)) in self.channels.iter().zip(outcomes).enumerate() {
            let k = ch.kraus().get(o).ok_or_else(|| Error::InvalidState(format!("outcome {o} out of range on party {party}")))?;
            amps = k.apply_to_party(&amps, state.dims(), party);
        }
        Ok(amps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{random_channel, ChannelClass, KrausEntry};
    use crate::state::DEFAULT_AMP_TOL;
    use crate::C64;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_product_is_trivial() {
        let psi = PureState::from_real(vec![2, 3], &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
        let ens = LocalChannelProduct::identity(&[2, 3]).apply(&psi).unwrap();
        assert_eq!(ens.len(), 1);
        assert_abs_diff_eq!(ens.branches[0].prob, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ens.branches[0].state.fidelity(&psi), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn iu_product_keeps_term_count() {
        let psi = PureState::from_real(vec![2, 2], &[0.5, 0.0, 0.3, 0.2]).unwrap();
        let prod = LocalChannelProduct::new(vec![
            random_channel(ChannelClass::IU, 2, 1, 1).unwrap(),
            random_channel(ChannelClass::IU, 2, 1, 2).unwrap(),
        ])
        .unwrap();
        let ens = prod.apply(&psi).unwrap();
        assert_eq!(ens.len(), 1);
        assert_eq!(ens.branches[0].state.product_term_count(DEFAULT_AMP_TOL), 3);
    }

    #[test]
    fn branch_probabilities_match_dense_kronecker() {
        let psi = PureState::from_real(vec![2, 2], &[0.1, 0.7, -0.4, 0.3]).unwrap();
        let a = random_channel(ChannelClass::IC, 2, 2, 5).unwrap();
        let b = random_channel(ChannelClass::SIO, 2, 3, 6).unwrap();
        let prod = LocalChannelProduct::new(vec![a.clone(), b.clone()]).unwrap();
        let ens = prod.apply(&psi).unwrap();
        assert_abs_diff_eq!(ens.total_probability(), 1.0, epsilon = 1e-12);
        let v = nalgebra::DVector::from_column_slice(psi.amps());
        for br in &ens.branches {
            let m = a.kraus()[br.outcomes[0]].to_dense().kronecker(&b.kraus()[br.outcomes[1]].to_dense());
            assert_abs_diff_eq!(br.prob, (m * &v).norm_squared(), epsilon = 1e-12);
        }
    }

    #[test]
    fn filter_branch_realizes_local_operators() {
        let psi = PureState::from_real(vec![2, 2], &[1.0, 2.0, 1.0, 2.0]).unwrap();
        let a = KrausOperator::diagonal(&[C64::new(1.0, 0.0), C64::new(0.5, 0.0)]).unwrap();
        let b = KrausOperator::new(
            2,
            vec![KrausEntry { target: 1, source: 0, coeff: C64::new(2.0, 0.0) }, KrausEntry { target: 0, source: 1, coeff: C64::new(1.0, 0.0) }],
        )
        .unwrap();
        let prod = LocalChannelProduct::from_filters(&[a.clone(), b.clone()]).unwrap();
        let ens = prod.apply(&psi).unwrap();
        let br = ens.branches.iter().find(|b| b.outcomes == [0, 0]).unwrap();
        let m = a.to_dense().kronecker(&b.to_dense()) * nalgebra::DVector::from_column_slice(psi.amps());
        let expect = PureState::normalized(vec![2, 2], m.iter().copied().collect()).unwrap();
        assert_abs_diff_eq!(br.state.fidelity(&expect), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mismatched_dims() {
        let psi = PureState::basis(vec![2, 3], 0).unwrap();
        assert!(LocalChannelProduct::identity(&[2, 2]).apply(&psi).is_err());
    }
}
