//! Hadamard-encoded proofs for quadratic systems and their five-test verifier.
//!
//! Vectors of length `k` are stored as integers with coordinate 0 the most
//! significant of the `k` low bits. Tables are indexed by that integer.

use serde::{Deserialize, Serialize};

use super::bits::{gf2_rank, Bits};
use super::quad::QuadSystem;
use crate::error::{Error, Result};

pub const MAX_PROOF_N: usize = 4;
pub const MAX_EXACT_N: usize = 3;
pub const ENUMERATION_LIMIT: u128 = 1 << 26;

fn parity(x: u64) -> bool {
    x.count_ones() % 2 == 1
}

/// `e_i` of length `n`.
pub fn unit(i: usize, n: usize) -> u64 {
    1 << (n - 1 - i)
}

/// `w ⊗ w'` as an `n²`-bit integer, entry `(j, k)` at position `j n + k`.
pub fn tensor(w: u64, w2: u64, n: usize) -> u64 {
    let mut t = 0;
    for j in 0..n {
        for k in 0..n {
            t = (t << 1) | (((w >> (n - 1 - j)) & (w2 >> (n - 1 - k))) & 1);
        }
    }
    t
}

/// Inverse of [`tensor`] on rank-one inputs.
pub fn untensor(t: u64, n: usize) -> Option<(u64, u64)> {
    let nn = n * n;
    let entry = |j: usize, k: usize| (t >> (nn - 1 - (j * n + k))) & 1;
    let j0 = (0..n).find(|&j| (0..n).any(|k| entry(j, k) == 1))?;
    let w2 = (0..n).fold(0, |acc, k| (acc << 1) | entry(j0, k));
    let w = (0..n).fold(0, |acc, j| (acc << 1) | entry(j, (0..n).find(|&k| entry(j0, k) == 1).unwrap()));
    (tensor(w, w2, n) == t).then_some((w, w2))
}

/// Shape of the verifier's random string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub n: usize,
    pub l: usize,
    pub m: usize,
}

/// Components in order: `y, y', z, z', w, w', u, i, v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Randomness(pub [u64; 9]);

impl Layout {
    pub fn for_system(sys: &QuadSystem) -> Self {
        Self { n: sys.n, l: sys.len(), m: sys.m }
    }

    pub fn sizes(&self) -> [u128; 9] {
        let (v, vv) = (1u128 << self.n, 1u128 << (self.n * self.n));
        [v, v, vv, vv, v, v, 1u128 << self.l, self.m as u128, v]
    }

    pub fn total(&self) -> u128 {
        self.sizes().iter().product()
    }

    pub fn rank(&self, r: &Randomness) -> u128 {
        self.sizes().iter().zip(r.0).fold(0, |acc, (&s, c)| acc * s + c as u128)
    }

    pub fn unrank(&self, mut x: u128) -> Randomness {
        let mut out = [0u64; 9];
        for (c, &s) in out.iter_mut().zip(self.sizes().iter()).rev() {
            *c = (x % s) as u64;
            x /= s;
        }
        Randomness(out)
    }

    pub fn check(&self, r: &Randomness) -> Result<()> {
        match self.sizes().iter().zip(r.0).position(|(&s, c)| c as u128 >= s) {
            Some(k) => Err(Error::InvalidParameter(format!("component {k} of the random string is out of range"))),
            None => Ok(()),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Randomness> + '_ {
        (0..self.total()).map(|x| self.unrank(x))
    }
}

/// A proof position: `Y(a)` with `a ∈ F_2^n` or `Z(a)` with `a ∈ F_2^{n²}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    Y(u64),
    Z(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HadamardProof {
    pub n: usize,
    pub y: Bits,
    pub z: Bits,
}

impl HadamardProof {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_PROOF_N {
            return Err(Error::BudgetExceeded(format!("proof length n = {n}")));
        }
        Ok(Self { n, y: Bits::zeros(1 << n), z: Bits::zeros(1 << (n * n)) })
    }

    /// `Y(a) = ⟨a, x⟩`, `Z(a) = ⟨a, x ⊗ x⟩`.
    pub fn honest(x: &[bool]) -> Result<Self> {
        let n = x.len();
        let mut p = Self::zeros(n)?;
        let xv = x.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        let xx = tensor(xv, xv, n);
        for a in 0..1u64 << n {
            p.y.set(a as usize, parity(a & xv));
        }
        for a in 0..1u64 << (n * n) {
            p.z.set(a as usize, parity(a & xx));
        }
        Ok(p)
    }

    pub fn get(&self, v: Var) -> bool {
        match v {
            Var::Y(a) => self.y.get(a as usize),
            Var::Z(a) => self.z.get(a as usize),
        }
    }

    pub fn flip(&mut self, v: Var) {
        match v {
            Var::Y(a) => self.y.flip(a as usize),
            Var::Z(a) => self.z.flip(a as usize),
        }
    }

    fn yv(&self, a: u64) -> bool {
        self.y.get(a as usize)
    }

    fn zv(&self, a: u64) -> bool {
        self.z.get(a as usize)
    }
}

/// The system rows packed as `n²`-bit integers, plus the right-hand side.
#[derive(Debug, Clone)]
pub struct PackedSystem {
    pub layout: Layout,
    pub rows: Vec<u64>,
    pub b: Vec<bool>,
    pub independent: bool,
}

impl PackedSystem {
    pub fn new(sys: &QuadSystem) -> Result<Self> {
        if sys.n > MAX_PROOF_N {
            return Err(Error::BudgetExceeded(format!("n = {}", sys.n)));
        }
        if sys.m == 0 {
            return Err(Error::InvalidParameter("no input bits".into()));
        }
        let rows = sys.rows.iter().map(Bits::to_u64_msb).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            layout: Layout::for_system(sys),
            rows,
            b: (0..sys.len()).map(|k| sys.b.get(k)).collect(),
            independent: gf2_rank(&sys.rows) == sys.len(),
        })
    }

    /// `Aᵀ u`, with `u_0` the most significant bit of `u`.
    pub fn at_u(&self, u: u64) -> u64 {
        let l = self.layout.l;
        self.rows.iter().enumerate().filter(|(k, _)| (u >> (l - 1 - k)) & 1 == 1).fold(0, |acc, (_, r)| acc ^ r)
    }

    pub fn u_dot_b(&self, u: u64) -> bool {
        let l = self.layout.l;
        self.b.iter().enumerate().filter(|(k, &bk)| bk && (u >> (l - 1 - k)) & 1 == 1).count() % 2 == 1
    }

    /// The unique `u` with `Aᵀ u = a`, if any.
    pub fn solve_at(&self, a: u64) -> Option<u64> {
        let nn = self.layout.n * self.layout.n;
        let rows: Vec<Bits> = self.rows.iter().map(|&r| Bits::from_u64_msb(r, nn)).collect();
        let u = super::bits::gf2_combination(&rows, &Bits::from_u64_msb(a, nn))?;
        u.to_u64_msb().ok()
    }
}

pub const TEST_NAMES: [&str; 5] = ["linearity_y", "linearity_z", "consistency", "equation", "proximity"];

/// Verdicts of the five tests on one random string.
pub fn run_tests(proof: &HadamardProof, sys: &PackedSystem, x: &[bool], r: &Randomness) -> Result<[bool; 5]> {
    sys.layout.check(r)?;
    if proof.n != sys.layout.n || x.len() != sys.layout.m {
        return Err(Error::DimensionMismatch { expected: sys.layout.n, got: proof.n });
    }
    let n = sys.layout.n;
    let [y, y2, z, z2, w, w2, u, i, v] = r.0;
    Ok([
        proof.yv(y) ^ proof.yv(y2) == proof.yv(y ^ y2),
        proof.zv(z) ^ proof.zv(z2) == proof.zv(z ^ z2),
        (proof.yv(w) && proof.yv(w2)) == proof.zv(tensor(w, w2, n)),
        sys.layout.l == 0 || proof.zv(sys.at_u(u)) == sys.u_dot_b(u),
        proof.yv(v ^ unit(i as usize, n)) ^ proof.yv(v) == x[i as usize],
    ])
}

pub fn verify(proof: &HadamardProof, sys: &PackedSystem, x: &[bool], r: &Randomness) -> Result<bool> {
    Ok(run_tests(proof, sys, x, r)?.iter().all(|&t| t))
}

/// The positions read on `r`. `Y(e_i)` stands for the input bit `x_i`.
pub fn queries(sys: &PackedSystem, r: &Randomness) -> Vec<Var> {
    let n = sys.layout.n;
    let [y, y2, z, z2, w, w2, u, i, v] = r.0;
    let e = unit(i as usize, n);
    let mut q = vec![
        Var::Y(y),
        Var::Y(y2),
        Var::Y(y ^ y2),
        Var::Z(z),
        Var::Z(z2),
        Var::Z(z ^ z2),
        Var::Y(w),
        Var::Y(w2),
        Var::Z(tensor(w, w2, n)),
        Var::Y(e),
        Var::Y(v ^ e),
        Var::Y(v),
    ];
    if sys.layout.l > 0 {
        q.push(Var::Z(sys.at_u(u)));
    }
    q.sort_unstable();
    q.dedup();
    q
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptReport {
    pub per_test: [f64; 5],
    pub accept: f64,
}

/// Exact acceptance: the tests use disjoint parts of `r`, so it factorizes.
pub fn accept_probability(proof: &HadamardProof, sys: &PackedSystem, x: &[bool]) -> Result<AcceptReport> {
    let Layout { n, l, m } = sys.layout;
    if n > MAX_EXACT_N || proof.n != n || x.len() != m {
        return Err(Error::InvalidParameter(format!("exact acceptance needs n ≤ {MAX_EXACT_N} and matching shapes")));
    }
    let frac = |hits: u64, total: u64| hits as f64 / total as f64;
    let (v, vv) = (1u64 << n, 1u64 << (n * n));
    let pairs = |size: u64, ok: &dyn Fn(u64, u64) -> bool| {
        (0..size).map(|a| (0..size).filter(|&b| ok(a, b)).count() as u64).sum::<u64>()
    };
    let per_test = [
        frac(pairs(v, &|a, b| proof.yv(a) ^ proof.yv(b) == proof.yv(a ^ b)), v * v),
        frac(pairs(vv, &|a, b| proof.zv(a) ^ proof.zv(b) == proof.zv(a ^ b)), vv * vv),
        frac(pairs(v, &|a, b| (proof.yv(a) && proof.yv(b)) == proof.zv(tensor(a, b, n))), v * v),
        frac((0..1u64 << l).filter(|&u| proof.zv(sys.at_u(u)) == sys.u_dot_b(u)).count() as u64, 1 << l),
        frac(
            (0..m as u64)
                .map(|i| (0..v).filter(|&a| proof.yv(a ^ unit(i as usize, n)) ^ proof.yv(a) == x[i as usize]).count() as u64)
                .sum(),
            m as u64 * v,
        ),
    ];
    Ok(AcceptReport { per_test, accept: per_test.iter().product() })
}

/// Acceptance when the proximity test is run `reps` times on fresh `(i, v)`.
pub fn accept_probability_repeated(proof: &HadamardProof, sys: &PackedSystem, x: &[bool], reps: u32) -> Result<AcceptReport> {
    let mut rep = accept_probability(proof, sys, x)?;
    rep.per_test[4] = rep.per_test[4].powi(reps as i32);
    rep.accept = rep.per_test.iter().product();
    Ok(rep)
}

/// Brute-force acceptance over every random string.
pub fn accept_probability_enumerated(proof: &HadamardProof, sys: &PackedSystem, x: &[bool]) -> Result<f64> {
    let total = sys.layout.total();
    if total > ENUMERATION_LIMIT {
        return Err(Error::BudgetExceeded(format!("{total} random strings")));
    }
    if proof.n != sys.layout.n || x.len() != sys.layout.m {
        return Err(Error::DimensionMismatch { expected: sys.layout.n, got: proof.n });
    }
    let hits = sys.layout.iter().filter(|r| verify(proof, sys, x, r).unwrap_or(false)).count();
    Ok(hits as f64 / total as f64)
}
