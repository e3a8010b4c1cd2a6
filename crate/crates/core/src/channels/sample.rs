use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{ChannelClass, IncoherentChannel, KrausEntry, KrausOperator};
use crate::error::{Error, Result};
use crate::C64;

const MAX_ATTEMPTS: usize = 1000;

/// Seeded wrapper around [`random_channel_with`].
pub fn random_channel(class: ChannelClass, dim: usize, n_kraus: usize, seed: u64) -> Result<IncoherentChannel> {
    random_channel_with(class, dim, n_kraus, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Samples a channel whose Kraus structure belongs to `class`.
///
/// - IU: a random permutation with uniform phases (`n_kraus` must be 1).
/// - PIO: a uniformly random ordered partition of the basis into `n_kraus`
///   nonempty blocks, each followed by its own random IU.
/// - SIO: a random permutation per branch; each source spreads over the
///   branches with a random complex unit vector.
/// - IC: random target maps per branch. Sources are processed in order and
///   each gets a random unit vector in its (branch, target) slots that is
///   orthogonal to the earlier sources, which is what completeness needs
///   when targets collide. Target maps are resampled if no such vector
///   exists.
pub fn random_channel_with<R: Rng + ?Sized>(
    class: ChannelClass,
    dim: usize,
    n_kraus: usize,
    rng: &mut R,
) -> Result<IncoherentChannel> {
    if dim < 2 {
        return Err(Error::InfeasibleSampling(format!("dimension {dim} < 2")));
    }
    if n_kraus == 0 {
        return Err(Error::InfeasibleSampling("zero Kraus operators".into()));
    }
    let kraus = match class {
        ChannelClass::IU => {
            if n_kraus != 1 {
                return Err(Error::InfeasibleSampling(format!("IU channels have one Kraus operator, asked for {n_kraus}")));
            }
            vec![random_iu(dim, rng)]
        }
        ChannelClass::PIO => sample_pio(dim, n_kraus, rng)?,
        ChannelClass::SIO => sample_sio(dim, n_kraus, rng)?,
        ChannelClass::IC => sample_ic(dim, n_kraus, rng)?,
    };
    IncoherentChannel::new(class, kraus)
}

/// Haar-random complex unit vector of length `n`.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

pub fn random_iu<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> KrausOperator {
    let mut perm: Vec<usize> = (0..dim).collect();
    perm.shuffle(rng);
    let phases: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    KrausOperator::permutation(&perm, &phases).expect("shuffled identity is a permutation")
}

fn sample_pio<R: Rng + ?Sized>(dim: usize, n_kraus: usize, rng: &mut R) -> Result<Vec<KrausOperator>> {
    if n_kraus > dim {
        return Err(Error::InfeasibleSampling(format!("PIO needs n_kraus <= dim, got {n_kraus} > {dim}")));
    }
    // uniform surjection by rejection; fall back to a forced one
    let mut block = vec![0usize; dim];
    let mut ok = false;
    for _ in 0..MAX_ATTEMPTS {
        block.iter_mut().for_each(|b| *b = rng.random_range(0..n_kraus));
        let mut hit = vec![false; n_kraus];
        block.iter().for_each(|&b| hit[b] = true);
        if hit.iter().all(|&h| h) {
            ok = true;
            break;
        }
    }
    if !ok {
        let mut order: Vec<usize> = (0..dim).collect();
        order.shuffle(rng);
        for (k, &i) in order.iter().enumerate() {
            block[i] = if k < n_kraus { k } else { rng.random_range(0..n_kraus) };
        }
    }
    Ok((0..n_kraus)
        .map(|n| {
            let u = random_iu(dim, rng);
            let entries = u.entries().iter().filter(|e| block[e.source] == n).copied().collect();
            KrausOperator::new(dim, entries).expect("restriction of a valid operator")
        })
        .collect())
}

fn sample_sio<R: Rng + ?Sized>(dim: usize, n_kraus: usize, rng: &mut R) -> Result<Vec<KrausOperator>> {
    let perms: Vec<Vec<usize>> = (0..n_kraus)
        .map(|_| {
            let mut p: Vec<usize> = (0..dim).collect();
            p.shuffle(rng);
            p
        })
        .collect();
    let mut entries = vec![Vec::with_capacity(dim); n_kraus];
    for i in 0..dim {
        let v = random_unit_vector(n_kraus, rng);
        for n in 0..n_kraus {
            entries[n].push(KrausEntry { target: perms[n][i], source: i, coeff: v[n] });
        }
    }
    entries.into_iter().map(|e| KrausOperator::new(dim, e)).collect()
}

fn sample_ic<R: Rng + ?Sized>(dim: usize, n_kraus: usize, rng: &mut R) -> Result<Vec<KrausOperator>> {
    'attempt: for _ in 0..MAX_ATTEMPTS {
        let targets: Vec<Vec<usize>> = (0..dim).map(|_| (0..n_kraus).map(|_| rng.random_range(0..dim)).collect()).collect();
        // coefficient of source i in branch n
        let mut coeffs: Vec<Vec<C64>> = Vec::with_capacity(dim);
        for i in 0..dim {
            // earlier sources restricted to the slots of source i
            let mut basis: Vec<DVector<C64>> = Vec::new();
            for k in 0..i {
                let mut w = DVector::from_fn(n_kraus, |n, _| if targets[k][n] == targets[i][n] { coeffs[k][n] } else { C64::default() });
                for b in &basis {
                    let proj = b.dotc(&w);
                    w -= b * proj;
                }
                let nw = w.norm();
                if nw > 1e-10 {
                    basis.push(w / C64::new(nw, 0.0));
                }
            }
            if basis.len() >= n_kraus {
                continue 'attempt;
            }
            let mut g = DVector::from_vec(random_unit_vector(n_kraus, rng));
            for b in &basis {
                let proj = b.dotc(&g);
                g -= b * proj;
            }
            let ng = g.norm();
            if ng < 1e-6 {
                continue 'attempt;
            }
            coeffs.push((g / C64::new(ng, 0.0)).iter().copied().collect());
        }
        return (0..n_kraus)
            .map(|n| {
                let entries = (0..dim).map(|i| KrausEntry { target: targets[i][n], source: i, coeff: coeffs[i][n] }).collect();
                KrausOperator::new(dim, entries)
            })
            .collect();
    }
    Err(Error::InfeasibleSampling(format!("could not sample an IC channel with dim {dim} and {n_kraus} Kraus operators")))
}
