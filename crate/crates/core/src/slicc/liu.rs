//! Local incoherent unitary (LIU) equivalence by exhaustive search over
//! local permutations, with phases solved exactly on the torus.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::channels::KrausOperator;
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::state::{multi_index, PureState};

/// Largest number of local-permutation tuples the search will visit.
pub const SEARCH_CAP: u128 = 1_000_000;

/// Modulus comparison tolerance between matched amplitudes.
const MODULUS_TOL: f64 = 1e-8;
/// Amplitudes below this carry no phase equation.
const PHASE_SUPPORT: f64 = 1e-7;
/// Wrapped residual allowed on the consistency rows of the phase system.
const PHASE_RESIDUAL: f64 = 1e-6;
/// Fidelity threshold of the final check.
pub const LIU_FIDELITY_TOL: f64 = 1e-9;

/// `U_k |i> = exp(i phases[k][i]) |perms[k][i]>` on party `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiuWitness {
    pub perms: Vec<Vec<usize>>,
    pub phases: Vec<Vec<f64>>,
}

impl LiuWitness {
    pub fn unitaries(&self) -> Vec<KrausOperator> {
        self.perms
            .iter()
            .zip(&self.phases)
            .map(|(p, th)| KrausOperator::permutation(p, th).expect("witness holds permutations"))
            .collect()
    }

    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        let dims = psi.dims().to_vec();
        if dims.len() != self.perms.len() || dims.iter().zip(&self.perms).any(|(d, p)| *d != p.len()) {
            return Err(Error::DimensionMismatch { expected: format!("{:?}", self.perms.iter().map(Vec::len).collect::<Vec<_>>()), got: format!("{dims:?}") });
        }
        let mut amps = psi.amps().to_vec();
        for (party, u) in self.unitaries().iter().enumerate() {
            amps = u.apply_to_party(&amps, &dims, party);
        }
        PureState::new(dims, amps)
    }
}

/// Decides LIU (equivalently LICC) equivalence of two pure states and
/// returns a witness when they are equivalent.
pub fn liu_equivalent(psi: &PureState, phi: &PureState) -> Result<Option<LiuWitness>> {
    liu_equivalent_with(psi, phi, Execution::default())
}

pub fn liu_equivalent_with(psi: &PureState, phi: &PureState, exec: Execution) -> Result<Option<LiuWitness>> {
    if psi.dims() != phi.dims() {
        return Err(Error::DimensionMismatch { expected: format!("{:?}", psi.dims()), got: format!("{:?}", phi.dims()) });
    }
    let dims = psi.dims().to_vec();
    let radices: Vec<u128> = dims.iter().map(|&d| factorial(d)).collect();
    let size = radices.iter().try_fold(1u128, |acc, &r| acc.checked_mul(r)).unwrap_or(u128::MAX);
    if size > SEARCH_CAP {
        return Err(Error::SearchSpace { size, cap: SEARCH_CAP });
    }
    if !same_moduli(psi, phi) {
        return Ok(None);
    }

    let digits: Vec<Vec<usize>> = (0..psi.dim()).map(|f| multi_index(&dims, f)).collect();
    let support: Vec<usize> = (0..psi.dim()).filter(|&i| psi.amps()[i].norm() > PHASE_SUPPORT).collect();
    let offsets: Vec<usize> = dims.iter().scan(0, |acc, &d| {
        let o = *acc;
        *acc += d;
        Some(o)
    }).collect();
    let n_vars: usize = dims.iter().sum();
    // row r: sum_k theta_k(digit_k(support[r]))
    let a: Vec<Vec<i128>> = support
        .iter()
        .map(|&i| {
            let mut row = vec![0i128; n_vars];
            for (k, &dk) in digits[i].iter().enumerate() {
                row[offsets[k] + dk] = 1;
            }
            row
        })
        .collect();
    let snf = Smith::new(a, support.len(), n_vars);

    let found = exec.find_first(size as usize, |idx| {
        let perms = decode(idx as u128, &radices, &dims);
        let target = |i: usize| -> usize { digits[i].iter().enumerate().fold(0, |acc, (k, &x)| acc * dims[k] + perms[k][x]) };
        for i in 0..psi.dim() {
            if (psi.amps()[i].norm() - phi.amps()[target(i)].norm()).abs() > MODULUS_TOL {
                return None;
            }
        }
        let omega: Vec<f64> = support.iter().map(|&i| wrap(phi.amps()[target(i)].arg() - psi.amps()[i].arg())).collect();
        let theta = snf.solve_mod_2pi(&omega)?;
        let phases: Vec<Vec<f64>> = dims.iter().enumerate().map(|(k, &d)| theta[offsets[k]..offsets[k] + d].to_vec()).collect();
        let w = LiuWitness { perms, phases };
        let image = w.apply(psi).ok()?;
        (image.inner(phi).norm_sqr() >= 1.0 - LIU_FIDELITY_TOL).then_some(w)
    });
    Ok(found)
}

fn same_moduli(psi: &PureState, phi: &PureState) -> bool {
    let sorted = |s: &PureState| {
        let mut v: Vec<f64> = s.amps().iter().map(|a| a.norm()).collect();
        v.sort_by(f64::total_cmp);
        v
    };
    sorted(psi).iter().zip(sorted(phi)).all(|(a, b)| (a - b).abs() <= MODULUS_TOL)
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn decode(mut idx: u128, radices: &[u128], dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = nth_permutation(dims[k], (idx % radices[k]) as usize);
        idx /= radices[k];
    }
    out
}

/// Lexicographic `n`-th permutation of `0..d`.
fn nth_permutation(d: usize, mut n: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..d).collect();
    let mut out = Vec::with_capacity(d);
    for k in (0..d).rev() {
        let f = factorial(k) as usize;
        out.push(pool.remove(n / f));
        n %= f;
    }
    out
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Smith decomposition `U A V = D` of an integer matrix, used to solve
/// `A theta = omega (mod 2 pi)`.
struct Smith {
    u: Vec<Vec<i128>>,
    v: Vec<Vec<i128>>,
    diag: Vec<i128>,
}

impl Smith {
    fn new(mut a: Vec<Vec<i128>>, m: usize, n: usize) -> Self {
        let mut u: Vec<Vec<i128>> = (0..m).map(|i| (0..m).map(|j| i128::from(i == j)).collect()).collect();
        let mut v: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();
        let mut diag = Vec::new();
        for t in 0..m.min(n) {
            // smallest nonzero entry of the trailing block
            let Some((pi, pj)) = (t..m)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| a[i][j].abs())
            else {
                break;
            };
            a.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut a, t, pj);
            swap_cols(&mut v, t, pj);
            loop {
                let p = a[t][t];
                for i in t + 1..m {
                    let q = a[i][t] / p;
                    if q != 0 {
                        row_axpy(&mut a, i, t, q);
                        row_axpy(&mut u, i, t, q);
                    }
                }
                for j in t + 1..n {
                    let q = a[t][j] / p;
                    if q != 0 {
                        col_axpy(&mut a, j, t, q);
                        col_axpy(&mut v, j, t, q);
                    }
                }
                let rest = (t + 1..m).map(|i| (i, t)).chain((t + 1..n).map(|j| (t, j))).filter(|&(i, j)| a[i][j] != 0).min_by_key(|&(i, j)| a[i][j].abs());
                match rest {
                    None => break,
                    Some((i, j)) if j == t => {
                        a.swap(t, i);
                        u.swap(t, i);
                    }
                    Some((_, j)) => {
                        swap_cols(&mut a, t, j);
                        swap_cols(&mut v, t, j);
                    }
                }
            }
            diag.push(a[t][t]);
        }
        Smith { u, v, diag }
    }

    fn solve_mod_2pi(&self, omega: &[f64]) -> Option<Vec<f64>> {
        let m = self.u.len();
        let n = self.v.len();
        let mut y = vec![0.0; n];
        for i in 0..m {
            let w: f64 = self.u[i].iter().zip(omega).map(|(&c, &o)| c as f64 * o).sum();
            match self.diag.get(i) {
                Some(&d) => y[i] = w / d as f64,
                None if wrap(w).abs() > PHASE_RESIDUAL => return None,
                None => {}
            }
        }
        Some((0..n).map(|r| self.v[r].iter().zip(&y).map(|(&c, &yy)| c as f64 * yy).sum()).collect())
    }
}

fn row_axpy(a: &mut [Vec<i128>], dst: usize, src: usize, q: i128) {
    let (s, d) = if src < dst {
        let (lo, hi) = a.split_at_mut(dst);
        (&lo[src], &mut hi[0])
    } else {
        let (lo, hi) = a.split_at_mut(src);
        (&hi[0], &mut lo[dst])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        *x -= q * y;
    }
}

fn col_axpy(a: &mut [Vec<i128>], dst: usize, src: usize, q: i128) {
    for row in a.iter_mut() {
        row[dst] -= q * row[src];
    }
}

fn swap_cols(a: &mut [Vec<i128>], i: usize, j: usize) {
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// Moduli of amplitudes as a sorted multiset, the cheapest LIU invariant.
pub fn moduli_pattern(psi: &PureState) -> Vec<f64> {
    let mut v: Vec<f64> = psi.amps().iter().map(|a| a.norm()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::random_iu;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_state(dims: Vec<usize>, seed: u64) -> PureState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = dims.iter().product();
        PureState::new(dims, crate::channels::random_unit_vector(n, &mut rng)).unwrap()
    }

    #[test]
    fn lehmer_decoding_covers_all() {
        let mut all: Vec<Vec<usize>> = (0..24).map(|n| nth_permutation(4, n)).collect();
        assert_eq!(all[0], vec![0, 1, 2, 3]);
        assert_eq!(all[23], vec![3, 2, 1, 0]);
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 24);
    }

    #[test]
    fn smith_solves_consistent_system() {
        // theta0 + theta2 = 0.3, theta0 + theta3 = 1.0, theta1 + theta2 = -0.5, theta1 + theta3 = w
        let a = vec![vec![1, 0, 1, 0], vec![1, 0, 0, 1], vec![0, 1, 1, 0], vec![0, 1, 0, 1]];
        let s = Smith::new(a.clone(), 4, 4);
        // consistent iff w = 1.0 - 0.3 - 0.5 (mod 2 pi)
        let good = [0.3, 1.0, -0.5, 0.2 + TAU];
        let th = s.solve_mod_2pi(&good).unwrap();
        for (row, w) in a.iter().zip(good) {
            let lhs: f64 = row.iter().zip(&th).map(|(&c, t)| c as f64 * t).sum();
            assert!(wrap(lhs - w).abs() < 1e-12);
        }
        assert!(s.solve_mod_2pi(&[0.3, 1.0, -0.5, 0.7]).is_none());
    }

    #[test]
    fn finds_constructed_witness() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (dims, seed) in [(vec![2, 2], 1u64), (vec![2, 3], 2), (vec![3, 3], 3), (vec![2, 2, 2], 4)] {
            let psi = random_state(dims.clone(), seed);
            let mut amps = psi.amps().to_vec();
            for (k, &d) in dims.iter().enumerate() {
                amps = random_iu(d, &mut rng).apply_to_party(&amps, &dims, k);
            }
            let phi = PureState::new(dims.clone(), amps).unwrap();
            let w = liu_equivalent(&psi, &phi).unwrap().expect("equivalent by construction");
            assert!(w.apply(&psi).unwrap().fidelity(&phi) > 1.0 - 1e-9);
        }
    }

    #[test]
    fn global_phase_is_absorbed() {
        let psi = random_state(vec![2, 2], 9);
        let amps = psi.amps().iter().map(|a| a * crate::C64::from_polar(1.0, 2.1)).collect();
        let phi = PureState::new(vec![2, 2], amps).unwrap();
        assert!(liu_equivalent(&psi, &phi).unwrap().is_some());
    }

    #[test]
    fn plus_zero_vs_zero_plus() {
        let a = PureState::from_real(vec![2, 2], &[1.0, 0.0, 1.0, 0.0]).unwrap();
        let b = PureState::from_real(vec![2, 2], &[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(liu_equivalent(&a, &b).unwrap().is_none());
    }

    #[test]
    fn relative_phase_obstruction() {
        // (|00> + |01> + |10> - |11>)/2 is not LIU equivalent to the uniform
        // state: the product of the four phases is an invariant.
        let a = PureState::from_real(vec![2, 2], &[1.0, 1.0, 1.0, -1.0]).unwrap();
        let b = PureState::from_real(vec![2, 2], &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(liu_equivalent(&a, &b).unwrap().is_none());
        let c = PureState::from_real(vec![2, 2], &[-1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(liu_equivalent(&a, &c).unwrap().is_some());
    }

    #[test]
    fn different_moduli_rejected() {
        let a = PureState::from_real(vec![2, 2], &[0.6, 0.8, 0.0, 0.0]).unwrap();
        let b = PureState::from_real(vec![2, 2], &[0.8, 0.0, 0.0, 0.6]).unwrap();
        assert!(liu_equivalent(&a, &b).unwrap().is_none());
        assert_ne!(moduli_pattern(&a), moduli_pattern(&PureState::basis(vec![2, 2], 0).unwrap()));
    }

    #[test]
    fn cap_enforced() {
        let psi = PureState::basis(vec![10, 2], 0).unwrap();
        assert!(matches!(liu_equivalent(&psi, &psi), Err(Error::SearchSpace { .. })));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let psi = random_state(vec![3, 3], 11);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut amps = psi.amps().to_vec();
        for k in 0..2 {
            amps = random_iu(3, &mut rng).apply_to_party(&amps, &[3, 3], k);
        }
        let phi = PureState::new(vec![3, 3], amps).unwrap();
        let s = liu_equivalent_with(&psi, &phi, Execution::Sequential).unwrap();
        let p = liu_equivalent_with(&psi, &phi, Execution::default()).unwrap();
        assert_eq!(s, p);
    }
}
