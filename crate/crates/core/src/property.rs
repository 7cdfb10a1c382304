//! Property-testing primitives on families of proof copies: swap, symmetry,
//! sparsity, validity and product tests.
//!
//! Every test runs in one of two modes. `Exact` reports expectations of the
//! per-execution accept indicators and compares those against thresholds.
//! `MonteCarlo` samples `trials` executions from a seeded generator and
//! reports empirical fractions.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{
    check_dim, dft_value_register, measure_register_with, overlap, trace_distance_pure, LabeledState,
    RegisterSpec, StateVector,
};
use crate::rng::{split, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TestMode {
    Exact,
    MonteCarlo { seed: u64, trials: usize },
}

impl TestMode {
    pub fn is_exact(&self) -> bool {
        matches!(self, TestMode::Exact)
    }

    /// Same trial budget on an independent stream.
    pub fn substream(&self, stream: u64) -> Self {
        match *self {
            TestMode::Exact => TestMode::Exact,
            TestMode::MonteCarlo { seed, trials } => TestMode::MonteCarlo {
                seed: seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(stream),
                trials,
            },
        }
    }
}

/// Ordered list of proof copies sharing one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltedFamily {
    states: Vec<StateVector>,
}

impl TiltedFamily {
    pub fn new(states: Vec<StateVector>) -> Result<Self> {
        let first = states.first().ok_or(Error::EmptySet)?.dim();
        for s in &states {
            check_dim(first, s.dim())?;
        }
        Ok(Self { states })
    }

    pub fn copies(state: &StateVector, k: usize) -> Result<Self> {
        Self::new(vec![state.clone(); k])
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn get(&self, i: usize) -> &StateVector {
        &self.states[i]
    }

    /// First and second halves.
    pub fn halves(&self) -> Result<(&[StateVector], &[StateVector])> {
        if self.len() % 2 == 1 {
            return Err(Error::OddFamily(self.len()));
        }
        Ok(self.states.split_at(self.len() / 2))
    }

    /// Member-wise tensor product.
    pub fn tensor(&self, other: &TiltedFamily) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::FamilySizeMismatch(self.len(), other.len()));
        }
        Self::new(self.states.iter().zip(&other.states).map(|(a, b)| crate::qstate::tensor(a, b)).collect())
    }

    fn require_nonneg(&self) -> Result<()> {
        for s in &self.states {
            s.as_nonneg()?;
        }
        Ok(())
    }
}

/// Exact swap-test acceptance `½ + |⟨a|b⟩|²/2`.
pub fn swap_accept_prob(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(0.5 + 0.5 * overlap(a, b)?.norm_sqr().min(1.0))
}

pub fn bernoulli(p: f64, rng: &mut Rng) -> bool {
    rng.gen::<f64>() < p
}

pub fn swap_test_draw(a: &StateVector, b: &StateVector, rng: &mut Rng) -> Result<bool> {
    Ok(bernoulli(swap_accept_prob(a, b)?, rng))
}

/// Exact acceptance probability, or the accept frequency over the trials.
pub fn swap_test(a: &StateVector, b: &StateVector, mode: TestMode) -> Result<f64> {
    let p = swap_accept_prob(a, b)?;
    Ok(match mode {
        TestMode::Exact => p,
        TestMode::MonteCarlo { seed, trials } => {
            let mut rng = split(seed, 0);
            (0..trials).filter(|_| bernoulli(p, &mut rng)).count() as f64 / trials.max(1) as f64
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryMethod {
    /// Sum over all perfect matchings.
    Enumerated,
    /// All pair probabilities coincide, so every matching has the same value.
    Uniform,
    /// Average over seeded random matchings.
    Sampled,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryOutcome {
    pub acceptance: f64,
    pub method: SymmetryMethod,
    pub matching: Vec<(usize, usize)>,
}

pub const SYMMETRY_EXACT_LIMIT: usize = 20;
pub const SYMMETRY_SAMPLES: usize = 4096;

fn pair_matrix(fam: &TiltedFamily) -> Vec<Vec<f64>> {
    let k = fam.len();
    let mut p = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let v = swap_accept_prob(fam.get(i), fam.get(j)).expect("family dims agree");
            p[i][j] = v;
            p[j][i] = v;
        }
    }
    p
}

fn random_matching(k: usize, rng: &mut Rng) -> Vec<(usize, usize)> {
    let mut idx: Vec<usize> = (0..k).collect();
    idx.shuffle(rng);
    idx.chunks(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))).collect()
}

/// Expected product of pair probabilities over a uniformly random perfect matching.
fn matching_expectation(p: &[Vec<f64>]) -> f64 {
    let k = p.len();
    let full = (1usize << k) - 1;
    let mut memo = vec![f64::NAN; 1 << k];
    memo[0] = 1.0;
    fn go(mask: usize, p: &[Vec<f64>], memo: &mut [f64]) -> f64 {
        if !memo[mask].is_nan() {
            return memo[mask];
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let partners = rest.count_ones() as f64;
        let mut acc = 0.0;
        let mut r = rest;
        while r != 0 {
            let j = r.trailing_zeros() as usize;
            r &= r - 1;
            acc += p[i][j] * go(rest & !(1 << j), p, memo);
        }
        memo[mask] = acc / partners;
        memo[mask]
    }
    go(full, p, &mut memo)
}

pub fn symmetry_test(fam: &TiltedFamily, mode: TestMode) -> Result<SymmetryOutcome> {
    let k = fam.len();
    if k % 2 == 1 {
        return Err(Error::OddFamily(k));
    }
    let p = pair_matrix(fam);
    match mode {
        TestMode::Exact => {
            let first = p[0].get(1).copied().unwrap_or(1.0);
            let uniform = (0..k).all(|i| (0..k).all(|j| i == j || (p[i][j] - first).abs() < 1e-15));
            let mut rng = split(0x5157, k as u64);
            let matching = random_matching(k, &mut rng);
            if uniform {
                Ok(SymmetryOutcome { acceptance: first.powi((k / 2) as i32), method: SymmetryMethod::Uniform, matching })
            } else if k <= SYMMETRY_EXACT_LIMIT {
                Ok(SymmetryOutcome { acceptance: matching_expectation(&p), method: SymmetryMethod::Enumerated, matching })
            } else {
                let total: f64 = (0..SYMMETRY_SAMPLES)
                    .map(|_| random_matching(k, &mut rng).iter().map(|&(i, j)| p[i][j]).product::<f64>())
                    .sum();
                Ok(SymmetryOutcome {
                    acceptance: total / SYMMETRY_SAMPLES as f64,
                    method: SymmetryMethod::Sampled,
                    matching,
                })
            }
        }
        TestMode::MonteCarlo { seed, trials } => {
            let mut rng = split(seed, 1);
            let mut matching = Vec::new();
            let mut accepted = 0usize;
            for t in 0..trials {
                let m = random_matching(k, &mut rng);
                if m.iter().all(|&(i, j)| bernoulli(p[i][j], &mut rng)) {
                    accepted += 1;
                }
                if t == 0 {
                    matching = m;
                }
            }
            Ok(SymmetryOutcome {
                acceptance: accepted as f64 / trials.max(1) as f64,
                method: SymmetryMethod::MonteCarlo,
                matching,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltCertificate {
    pub tilted: bool,
    /// Largest set of members pairwise within trace distance √ε.
    pub representatives: Vec<usize>,
    pub greedy: bool,
}

/// Decides ε-tiltedness. The neighbourhood construction gives a quick
/// certificate; otherwise an exact maximum clique of the closeness graph.
pub fn is_eps_tilted(fam: &TiltedFamily, eps: f64) -> Result<TiltCertificate> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("eps = {eps}")));
    }
    let k = fam.len();
    let need = (1.0 - eps) * k as f64 - 1e-9;
    let td: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| trace_distance_pure(fam.get(i), fam.get(j)).unwrap()).collect())
        .collect();
    let r = eps.sqrt();
    // N(i) = members within √ε/2; members with a majority neighbourhood are
    // pairwise within √ε through a shared neighbour.
    let good: Vec<usize> = (0..k)
        .filter(|&i| (0..k).filter(|&j| td[i][j] <= r / 2.0 + 1e-12).count() * 2 > k)
        .collect();
    if good.len() as f64 >= need && good.iter().all(|&i| good.iter().all(|&j| td[i][j] <= r + 1e-12)) {
        return Ok(TiltCertificate { tilted: true, representatives: good, greedy: true });
    }
    let adj: Vec<Vec<bool>> = (0..k).map(|i| (0..k).map(|j| i != j && td[i][j] <= r + 1e-12).collect()).collect();
    let clique = max_clique(&adj);
    Ok(TiltCertificate { tilted: clique.len() as f64 >= need, representatives: clique, greedy: false })
}

fn max_clique(adj: &[Vec<bool>]) -> Vec<usize> {
    fn bk(r: &mut Vec<usize>, p: Vec<usize>, x: Vec<usize>, adj: &[Vec<bool>], best: &mut Vec<usize>) {
        if p.is_empty() && x.is_empty() {
            if r.len() > best.len() {
                *best = r.clone();
            }
            return;
        }
        if r.len() + p.len() <= best.len() {
            return;
        }
        let pivot = *p.iter().chain(&x).max_by_key(|&&u| p.iter().filter(|&&v| adj[u][v]).count()).unwrap();
        let cands: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
        let (mut p, mut x) = (p, x);
        for v in cands {
            r.push(v);
            let np = p.iter().copied().filter(|&w| adj[v][w]).collect();
            let nx = x.iter().copied().filter(|&w| adj[v][w]).collect();
            bk(r, np, nx, adj, best);
            r.pop();
            p.retain(|&w| w != v);
            x.push(v);
        }
    }
    let mut best = Vec::new();
    bk(&mut Vec::new(), (0..adj.len()).collect(), Vec::new(), adj, &mut best);
    best.sort_unstable();
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityOutcome {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub eps: f64,
    /// Target sparsity for the second variant.
    pub gamma: Option<f64>,
    pub accept: bool,
}

impl SparsityOutcome {
    /// `2α − 1`, the estimated squared overlap with the uniform state.
    pub fn sparsity(&self) -> f64 {
        2.0 * self.alpha - 1.0
    }
}

/// Mean acceptance of `trials` executions cycling through `pairs`.
fn batch_fraction(pairs: &[(StateVector, StateVector)], mode: TestMode, stream: u64) -> Result<f64> {
    let probs = pairs.iter().map(|(a, b)| swap_accept_prob(a, b)).collect::<Result<Vec<_>>>()?;
    Ok(match mode {
        TestMode::Exact => probs.iter().sum::<f64>() / probs.len() as f64,
        TestMode::MonteCarlo { seed, trials } => {
            let mut rng = split(seed, stream);
            (0..trials).filter(|t| bernoulli(probs[t % probs.len()], &mut rng)).count() as f64 / trials.max(1) as f64
        }
    })
}

pub fn sparsity_test_i(psi: &TiltedFamily, phi: &TiltedFamily, eps: f64, mode: TestMode) -> Result<SparsityOutcome> {
    if psi.len() != phi.len() {
        return Err(Error::FamilySizeMismatch(psi.len(), phi.len()));
    }
    check_dim(psi.dim(), phi.dim())?;
    psi.require_nonneg()?;
    phi.require_nonneg()?;
    let (psi0, psi1) = psi.halves()?;
    let (phi0, phi1) = phi.halves()?;
    let u = StateVector::uniform(psi.dim());
    let with_u = |xs: &[StateVector]| xs.iter().map(|x| (x.clone(), u.clone())).collect::<Vec<_>>();
    let alpha = batch_fraction(&with_u(psi0), mode, 10)?;
    let beta = batch_fraction(&with_u(phi0), mode, 11)?;
    let cross: Vec<_> = psi1.iter().cloned().zip(phi1.iter().cloned()).collect();
    let lambda = batch_fraction(&cross, mode, 12)?;
    let r = eps.sqrt();
    let accept = (alpha + beta - 1.5).abs() <= r + 1e-12 && lambda <= 0.5 + r + 1e-12;
    Ok(SparsityOutcome { alpha, beta, lambda, eps, gamma: None, accept })
}

pub fn sparsity_test_ii(
    psi: &TiltedFamily,
    phi: &TiltedFamily,
    gamma: f64,
    eps: f64,
    mode: TestMode,
) -> Result<SparsityOutcome> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma}")));
    }
    let mut out = sparsity_test_i(psi, phi, eps, mode)?;
    out.gamma = Some(gamma);
    out.accept &= (out.sparsity() - gamma).abs() <= eps.sqrt() + 1e-12;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub set: Vec<usize>,
    pub mass: f64,
    pub size_bound: f64,
}

/// Heavy coordinates `{i : u_i ≥ √(γ/n)}` of a non-negative vector, with the
/// size bound `(δ + 2√ε/γ)n` that holds when the sparsity hypotheses do.
pub fn heavy_support(u: &[f64], gamma: f64, delta: f64, eps: f64) -> SupportReport {
    let n = u.len() as f64;
    let cut = (gamma / n).sqrt();
    let set: Vec<usize> = (0..u.len()).filter(|&i| u[i] >= cut).collect();
    let mass = set.iter().map(|&i| u[i] * u[i]).sum();
    SupportReport { set, mass, size_bound: (delta + 2.0 * eps.sqrt() / gamma) * n }
}

/// Closest flat state with support size `m` to a non-negative vector:
/// the top-`m` coordinates, with overlap `(sum of those)/√m`.
pub fn nearest_subset_state(u: &[f64], m: usize) -> (Vec<usize>, f64) {
    let mut idx: Vec<usize> = (0..u.len()).collect();
    idx.sort_by(|&a, &b| u[b].total_cmp(&u[a]).then(a.cmp(&b)));
    let mut set: Vec<usize> = idx[..m].to_vec();
    set.sort_unstable();
    let ov: f64 = set.iter().map(|&i| u[i]).sum::<f64>() / (m as f64).sqrt();
    (set, (1.0 - ov * ov).max(0.0).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityOutcome {
    pub alpha: f64,
    pub threshold: f64,
    pub accept: bool,
}

/// Probability of reading value 0 after the Fourier transform.
pub fn zero_outcome_probability(psi: &LabeledState) -> f64 {
    let q = psi.q();
    let amps = psi.state().amps();
    (0..psi.n())
        .map(|i| amps[i * q..(i + 1) * q].iter().sum::<crate::qstate::C64>().norm_sqr())
        .sum::<f64>()
        / q as f64
}

/// `Σ cᵢ² / (|S| q)` for the flat state on `S ⊆ [n]×[q]`, where `cᵢ` counts
/// the labels of vertex `i` in `S`.
pub fn subset_zero_probability(q: usize, set: &[usize]) -> f64 {
    let mut counts = std::collections::BTreeMap::new();
    for &x in set {
        *counts.entry(x / q).or_insert(0usize) += 1;
    }
    counts.values().map(|&c| (c * c) as f64).sum::<f64>() / (set.len() * q) as f64
}

pub fn validity_test(fam: &[LabeledState], precision: f64, mode: TestMode) -> Result<ValidityOutcome> {
    let first = fam.first().ok_or(Error::EmptySet)?;
    let (n, q) = (first.n(), first.q());
    for m in fam {
        check_dim(n * q, m.n() * m.q())?;
    }
    let threshold = 1.0 / q as f64 + precision;
    let alpha = match mode {
        TestMode::Exact => fam.iter().map(zero_outcome_probability).sum::<f64>() / fam.len() as f64,
        TestMode::MonteCarlo { seed, trials } => {
            let spec = RegisterSpec::new(vec![n, q], 1)?;
            let fourier = fam.iter().map(dft_value_register).collect::<Result<Vec<_>>>()?;
            let mut rng = split(seed, 20);
            let mut zeros = 0usize;
            for t in 0..trials {
                let (k, _) = measure_register_with(&fourier[t % fourier.len()], &spec, &mut rng)?;
                zeros += (k == 0) as usize;
            }
            zeros as f64 / trials.max(1) as f64
        }
    };
    Ok(ValidityOutcome { alpha, threshold, accept: alpha <= threshold + 1e-12 })
}

/// `⟨ψ⊗φ| SWAP_T |ψ⊗φ⟩` for the subsystems selected by `mask`.
fn partial_swap_expectation(psi: &StateVector, phi: &StateVector, dims: &[usize], mask: usize) -> f64 {
    let total = psi.dim();
    let k = dims.len();
    let mut strides = vec![1usize; k];
    for s in (0..k.saturating_sub(1)).rev() {
        strides[s] = strides[s + 1] * dims[s + 1];
    }
    let (a, b) = (psi.amps(), phi.amps());
    let mut acc = crate::qstate::C64::new(0.0, 0.0);
    for x in 0..total {
        for y in 0..total {
            let (mut xs, mut ys) = (x, y);
            for s in 0..k {
                if mask >> s & 1 == 1 {
                    let dx = (x / strides[s]) % dims[s];
                    let dy = (y / strides[s]) % dims[s];
                    xs = xs - dx * strides[s] + dy * strides[s];
                    ys = ys - dy * strides[s] + dx * strides[s];
                }
            }
            acc += (a[x] * b[y]).conj() * a[xs] * b[ys];
        }
    }
    acc.re
}

pub fn product_accept_prob(psi: &StateVector, phi: &StateVector, dims: &[usize]) -> Result<f64> {
    let total: usize = dims.iter().product();
    check_dim(total, psi.dim())?;
    check_dim(total, phi.dim())?;
    let k = dims.len();
    let sum: f64 = (0..1usize << k).map(|m| partial_swap_expectation(psi, phi, dims, m)).sum();
    Ok(sum / (1u64 << k) as f64)
}

pub fn product_test(psi: &StateVector, phi: &StateVector, dims: &[usize], mode: TestMode) -> Result<f64> {
    let p = product_accept_prob(psi, phi, dims)?;
    Ok(match mode {
        TestMode::Exact => p,
        TestMode::MonteCarlo { seed, trials } => {
            let mut rng = split(seed, 30);
            (0..trials).filter(|_| bernoulli(p, &mut rng)).count() as f64 / trials.max(1) as f64
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::SubsetState;

    fn fam(states: Vec<StateVector>) -> TiltedFamily {
        TiltedFamily::new(states).unwrap()
    }

    #[test]
    fn swap_orthogonal() {
        let a = StateVector::basis(3, 0).unwrap();
        let b = StateVector::basis(3, 2).unwrap();
        assert_eq!(swap_test(&a, &b, TestMode::Exact).unwrap(), 0.5);
        assert_eq!(swap_test(&a, &a, TestMode::Exact).unwrap(), 1.0);
    }

    #[test]
    fn symmetry_split_family() {
        let z = StateVector::basis(2, 0).unwrap();
        let o = StateVector::basis(2, 1).unwrap();
        let f = fam(vec![z.clone(), z.clone(), z.clone(), z.clone(), o.clone(), o.clone(), o.clone(), o]);
        let out = symmetry_test(&f, TestMode::Exact).unwrap();
        assert_eq!(out.method, SymmetryMethod::Enumerated);
        fn all(rest: Vec<usize>, f: &TiltedFamily, acc: f64, out: &mut Vec<f64>) {
            if rest.is_empty() {
                out.push(acc);
                return;
            }
            for k in 1..rest.len() {
                let p = swap_accept_prob(f.get(rest[0]), f.get(rest[k])).unwrap();
                let next: Vec<usize> = rest.iter().enumerate().filter(|&(t, _)| t != 0 && t != k).map(|(_, &x)| x).collect();
                all(next, f, acc * p, out);
            }
        }
        let mut vals = Vec::new();
        all((0..8).collect(), &f, 1.0, &mut vals);
        assert_eq!(vals.len(), 105);
        let expect = vals.iter().sum::<f64>() / 105.0;
        assert!((out.acceptance - expect).abs() < 1e-12);
        assert!(!is_eps_tilted(&f, 0.4).unwrap().tilted);
        assert!(is_eps_tilted(&f, 0.5).unwrap().tilted);
    }

    #[test]
    fn tilted_small_cases() {
        let z = StateVector::basis(2, 0).unwrap();
        let o = StateVector::basis(2, 1).unwrap();
        let f = fam(vec![z.clone(), z.clone(), o.clone(), o]);
        assert!(!is_eps_tilted(&f, 0.1).unwrap().tilted);
        let same = TiltedFamily::copies(&z, 6).unwrap();
        let cert = is_eps_tilted(&same, 0.0).unwrap();
        assert!(cert.tilted);
        assert_eq!(cert.representatives, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn sparsity_honest_quarter() {
        let s = SubsetState::new(8, vec![0, 5]).unwrap();
        let psi = TiltedFamily::copies(&s.to_state(), 8).unwrap();
        let phi = TiltedFamily::copies(&s.complement().unwrap().to_state(), 8).unwrap();
        let out = sparsity_test_i(&psi, &phi, 0.01, TestMode::Exact).unwrap();
        assert!((out.sparsity() - 0.25).abs() < 1e-12);
        assert!((2.0 * out.beta - 1.0 - 0.75).abs() < 1e-12);
        assert!((out.lambda - 0.5).abs() < 1e-12);
        assert!(out.accept);
        assert!(!sparsity_test_ii(&psi, &phi, 0.5, 0.01, TestMode::Exact).unwrap().accept);
        assert!(sparsity_test_ii(&psi, &phi, 0.25, 0.01, TestMode::Exact).unwrap().accept);
        let u = TiltedFamily::copies(&StateVector::uniform(8), 8).unwrap();
        let out = sparsity_test_i(&u, &u, 0.01, TestMode::Exact).unwrap();
        assert!((out.lambda - 1.0).abs() < 1e-12 && !out.accept);
    }

    #[test]
    fn validity_examples() {
        let v = LabeledState::from_labeling(3, &[0, 2, 1]).unwrap();
        let out = validity_test(&[v.clone(), v], 0.05, TestMode::Exact).unwrap();
        assert!((out.alpha - 1.0 / 3.0).abs() < 1e-12 && out.accept);
        let h = 0.5f64.sqrt();
        let bad = LabeledState::new(2, 2, StateVector::from_real(&[h, h, 0.0, 0.0]).unwrap()).unwrap();
        assert!((zero_outcome_probability(&bad) - 1.0).abs() < 1e-12);
        assert!((subset_zero_probability(2, &[0, 1]) - 1.0).abs() < 1e-12);
        assert!(!validity_test(&[bad], 0.4, TestMode::Exact).unwrap().accept);
    }

    #[test]
    fn product_epr() {
        let h = 0.5f64.sqrt();
        let epr = StateVector::from_real(&[h, 0.0, 0.0, h]).unwrap();
        assert!((product_accept_prob(&epr, &epr, &[2, 2]).unwrap() - 0.75).abs() < 1e-12);
        let p = crate::qstate::tensor(&StateVector::basis(2, 1).unwrap(), &StateVector::uniform(3));
        assert!((product_accept_prob(&p, &p, &[2, 3]).unwrap() - 1.0).abs() < 1e-12);
    }
}
