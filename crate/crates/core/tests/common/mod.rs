#![allow(dead_code)]

use qmaplus::qstate::{overlap, StateVector, C64};
use qmaplus::rng::{seeded, Rng};
use rand::Rng as _;

pub fn haar(dim: usize, seed: u64) -> StateVector {
    StateVector::haar(dim, &mut seeded(seed))
}

pub fn nonneg(dim: usize, rng: &mut Rng) -> StateVector {
    let xs: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let n = xs.iter().map(|x| x * x).sum::<f64>().sqrt();
    StateVector::from_real(&xs.iter().map(|x| x / n).collect::<Vec<_>>()).unwrap()
}

/// Normalized `(1 − t)a + t·b`; stays non-negative for non-negative inputs.
pub fn blend(a: &StateVector, b: &StateVector, t: f64) -> StateVector {
    StateVector::normalized(a.amps().iter().zip(b.amps()).map(|(x, y)| x * (1.0 - t) + y * t).collect()).unwrap()
}

/// A state at trace distance exactly `t` from `psi`.
pub fn perturb(psi: &StateVector, t: f64, rng: &mut Rng) -> StateVector {
    let r = StateVector::haar(psi.dim(), rng);
    let o = overlap(psi, &r).unwrap();
    let mut chi: Vec<C64> = r.amps().iter().zip(psi.amps()).map(|(x, p)| x - p * o).collect();
    let n = chi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    chi.iter_mut().for_each(|c| *c /= n);
    let c = (1.0 - t * t).sqrt();
    StateVector::normalized(psi.amps().iter().zip(&chi).map(|(p, x)| p * c + x * t).collect()).unwrap()
}

pub type Dense = Vec<Vec<C64>>;

pub fn outer(a: &StateVector) -> Dense {
    a.amps().iter().map(|x| a.amps().iter().map(|y| x * y.conj()).collect()).collect()
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (m, n) = (a.len(), b.len());
    (0..m * n).map(|i| (0..m * n).map(|j| a[i / n][j / n] * b[i % n][j % n]).collect()).collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

pub fn trace(a: &Dense) -> C64 {
    (0..a.len()).map(|i| a[i][i]).sum()
}

/// Projector onto the symmetric part of selected subsystems of two copies of
/// a space with factors `dims`; basis order is copy-major, row-major within a copy.
pub fn symmetric_projector(dims: &[usize], which: &[bool]) -> Dense {
    let d: usize = dims.iter().product();
    let n = d * d;
    let digits = |mut x: usize| {
        let mut v = vec![0; dims.len()];
        for s in (0..dims.len()).rev() {
            v[s] = x % dims[s];
            x /= dims[s];
        }
        v
    };
    let pack = |v: &[usize]| v.iter().zip(dims).fold(0, |acc, (&x, &m)| acc * m + x);
    let mut p: Dense = (0..n).map(|i| (0..n).map(|j| C64::new((i == j) as u8 as f64, 0.0)).collect()).collect();
    for (s, _) in which.iter().enumerate().filter(|(_, &w)| w) {
        let mut swap: Dense = vec![vec![C64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            let (mut a, mut b) = (digits(i / d), digits(i % d));
            std::mem::swap(&mut a[s], &mut b[s]);
            swap[pack(&a) * d + pack(&b)][i] = C64::new(1.0, 0.0);
        }
        let half: Dense = (0..n)
            .map(|i| (0..n).map(|j| (C64::new((i == j) as u8 as f64, 0.0) + swap[i][j]) * 0.5).collect())
            .collect();
        p = matmul(&p, &half);
    }
    p
}
