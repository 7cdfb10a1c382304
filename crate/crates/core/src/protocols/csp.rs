//! Toy doubly explicit CSPs: tabulated index maps, cloud regularization, the
//! operators used by the constraints test, and the five-test protocol.

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{indicator, ProtocolOutcome};
use crate::error::{Error, Result};
use crate::graphs::{expander_family, invert, RegularGraph};
use crate::pcp::primes::is_prime;
use crate::property::{bernoulli, sparsity_test_ii, symmetry_test, validity_test, TestMode, TiltedFamily};
use crate::qstate::{check_dim, overlap, LabeledState, StateVector, C64};
use crate::rng::split;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CspConstraint {
    pub vars: Vec<usize>,
    /// Indexed by the value tuple read as a base-`s` number, first variable most significant.
    pub accept: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CspRepr", into = "CspRepr")]
pub struct CspToyInstance {
    n: usize,
    s: usize,
    q: usize,
    constraints: Vec<CspConstraint>,
    adj_v: Vec<Vec<usize>>,
}

/// On-disk form; the variable-side tables are checked against the constraints.
#[derive(Serialize, Deserialize)]
struct CspRepr {
    n: usize,
    sigma: usize,
    q: usize,
    constraints: Vec<CspConstraint>,
    adj_v: Option<Vec<Vec<usize>>>,
    adj_glo_v: Option<Vec<Vec<Option<usize>>>>,
    uniformity: Option<Vec<usize>>,
}

impl TryFrom<CspRepr> for CspToyInstance {
    type Error = Error;
    fn try_from(r: CspRepr) -> Result<Self> {
        let inst = CspToyInstance::new(r.n, r.sigma, r.q, r.constraints)?;
        if let Some(adj_v) = r.adj_v {
            if adj_v != inst.adj_v {
                return Err(Error::Parse("adj_v table disagrees with constraints".into()));
            }
        }
        if let Some(glo) = r.adj_glo_v {
            if glo != inst.adj_glo_v_table() {
                return Err(Error::Parse("adj_glo_v table disagrees with constraints".into()));
            }
        }
        Ok(inst)
    }
}

impl From<CspToyInstance> for CspRepr {
    fn from(c: CspToyInstance) -> Self {
        CspRepr {
            adj_glo_v: Some(c.adj_glo_v_table()),
            uniformity: Some(c.uniformity()),
            adj_v: Some(c.adj_v.clone()),
            n: c.n,
            sigma: c.s,
            q: c.q,
            constraints: c.constraints,
        }
    }
}

impl CspToyInstance {
    pub fn new(n: usize, s: usize, q: usize, constraints: Vec<CspConstraint>) -> Result<Self> {
        if s < 2 || q == 0 || constraints.is_empty() {
            return Err(Error::InvalidParameter(format!("sigma={s}, q={q}, R={}", constraints.len())));
        }
        let tuples = s.pow(q as u32);
        let mut adj_v = vec![Vec::new(); n];
        for (j, c) in constraints.iter().enumerate() {
            check_dim(q, c.vars.len())?;
            check_dim(tuples, c.accept.len())?;
            for (a, &v) in c.vars.iter().enumerate() {
                if v >= n {
                    return Err(Error::IndexOutOfRange { index: v, dim: n });
                }
                if c.vars[..a].contains(&v) {
                    return Err(Error::InvalidParameter(format!("constraint {j} repeats variable {v}")));
                }
                adj_v[v].push(j);
            }
        }
        Ok(Self { n, s, q, constraints, adj_v })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> usize {
        self.s
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn r(&self) -> usize {
        self.constraints.len()
    }

    pub fn tuples(&self) -> usize {
        self.s.pow(self.q as u32)
    }

    pub fn constraints(&self) -> &[CspConstraint] {
        &self.constraints
    }

    pub fn adj_c(&self, j: usize) -> &[usize] {
        &self.constraints[j].vars
    }

    pub fn adj_v(&self, i: usize) -> &[usize] {
        &self.adj_v[i]
    }

    pub fn adj_glo_c(&self, j: usize, i: usize) -> Option<usize> {
        self.constraints[j].vars.iter().position(|&v| v == i)
    }

    pub fn adj_loc_c(&self, j: usize, iota: usize) -> usize {
        self.constraints[j].vars[iota]
    }

    pub fn adj_glo_v(&self, i: usize, j: usize) -> Option<usize> {
        self.adj_v[i].binary_search(&j).ok()
    }

    pub fn adj_loc_v(&self, i: usize, iota: usize) -> usize {
        self.adj_v[i][iota]
    }

    fn adj_glo_v_table(&self) -> Vec<Vec<Option<usize>>> {
        (0..self.n).map(|i| (0..self.r()).map(|j| self.adj_glo_v(i, j)).collect()).collect()
    }

    /// Class index of each variable, classes ordered by first appearance of a degree.
    pub fn uniformity(&self) -> Vec<usize> {
        let mut degrees: Vec<usize> = Vec::new();
        self.adj_v
            .iter()
            .map(|a| match degrees.iter().position(|&d| d == a.len()) {
                Some(t) => t,
                None => {
                    degrees.push(a.len());
                    degrees.len() - 1
                }
            })
            .collect()
    }

    pub fn digit(&self, v: usize, iota: usize) -> usize {
        (v / self.s.pow((self.q - 1 - iota) as u32)) % self.s
    }

    /// Value tuple of constraint `j` under a full assignment.
    pub fn local_tuple(&self, j: usize, x: &[usize]) -> usize {
        self.constraints[j].vars.iter().fold(0, |acc, &v| acc * self.s + x[v])
    }

    pub fn satisfied(&self, j: usize, tuple: usize) -> bool {
        self.constraints[j].accept[tuple]
    }

    pub fn value(&self, x: &[usize]) -> f64 {
        let sat = (0..self.r()).filter(|&j| self.satisfied(j, self.local_tuple(j, x))).count();
        sat as f64 / self.r() as f64
    }

    pub fn best_value(&self) -> Result<(f64, Vec<usize>)> {
        let total = (self.s as f64).powi(self.n as i32);
        if total > 2f64.powi(24) {
            return Err(Error::BudgetExceeded(format!("{total} assignments")));
        }
        let mut best = (-1.0, Vec::new());
        super::ug::for_each_labeling(self.n, self.s, |x| {
            let v = self.value(x);
            if v > best.0 {
                best = (v, x.to_vec());
            }
        });
        Ok(best)
    }
}

/// Each variable `i` becomes the cloud `{(i, ι) : ι < n_i}`; the first
/// `n_i'` members carry a d-regular expander, the rest d self-loops.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizedCsp {
    pub base: CspToyInstance,
    pub d: usize,
    pub n_prime: Vec<usize>,
    /// `clouds[i]` is the expander on the first `n_prime[i]` members.
    pub clouds: Vec<Option<RegularGraph>>,
    pub cloud_cheeger: Vec<f64>,
}

pub fn csp_regularize(base: &CspToyInstance, d: usize, seed: u64) -> Result<RegularizedCsp> {
    let full: Vec<usize> = (0..base.n).map(|i| base.adj_v(i).len()).collect();
    csp_regularize_with(base, d, seed, &full)
}

/// Regularization with explicit expander sizes `n_i' ≤ n_i`.
pub fn csp_regularize_with(base: &CspToyInstance, d: usize, seed: u64, n_prime: &[usize]) -> Result<RegularizedCsp> {
    check_dim(base.n, n_prime.len())?;
    let mut clouds = Vec::with_capacity(base.n);
    let mut cheeger_values = Vec::with_capacity(base.n);
    for (i, &m) in n_prime.iter().enumerate() {
        if m > base.adj_v(i).len() {
            return Err(Error::InvalidParameter(format!("n_{i}' = {m} exceeds cloud size")));
        }
        if m == 0 {
            clouds.push(None);
            cheeger_values.push(f64::INFINITY);
            continue;
        }
        let cert = expander_family(m, d, seed.wrapping_add(i as u64))?;
        if !cert.certifies(2.0) {
            return Err(Error::Uncertified(cert.cheeger));
        }
        cheeger_values.push(cert.cheeger);
        clouds.push(Some(cert.graph));
    }
    Ok(RegularizedCsp { base: base.clone(), d, n_prime: n_prime.to_vec(), clouds, cloud_cheeger: cheeger_values })
}

impl RegularizedCsp {
    /// Largest fraction of a cloud left outside its expander.
    pub fn eta(&self) -> f64 {
        (0..self.base.n)
            .filter(|&i| !self.base.adj_v(i).is_empty())
            .map(|i| (self.base.adj_v(i).len() - self.n_prime[i]) as f64 / self.base.adj_v(i).len() as f64)
            .fold(0.0, f64::max)
    }

    /// New variables `(i, ι)` in order; there are `qR` of them.
    pub fn new_variables(&self) -> Vec<(usize, usize)> {
        (0..self.base.n).flat_map(|i| (0..self.base.adj_v(i).len()).map(move |a| (i, a))).collect()
    }

    fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.base.n);
        let mut acc = 0;
        for i in 0..self.base.n {
            off.push(acc);
            acc += self.base.adj_v(i).len();
        }
        off
    }

    /// Local index `π_k(ι)` inside the cloud of `i`; fixed outside the expander.
    pub fn cloud_step(&self, i: usize, iota: usize, k: usize) -> usize {
        match &self.clouds[i] {
            Some(g) if iota < self.n_prime[i] => g.perm(k)[iota],
            _ => iota,
        }
    }

    /// Constraint incidences per new variable: equality slots plus original constraints.
    pub fn incidences(&self) -> Vec<usize> {
        let off = self.offsets();
        let mut count = vec![self.d; self.new_variables().len()];
        for j in 0..self.base.r() {
            for &i in self.base.adj_c(j) {
                count[off[i] + self.base.adj_glo_v(i, j).expect("adjacency is symmetric")] += 1;
            }
        }
        count
    }

    /// The regularized equality graph on the `qR` new variables.
    pub fn equality_graph(&self) -> Result<RegularGraph> {
        let off = self.offsets();
        let vars = self.new_variables();
        let perms = (0..self.d)
            .map(|k| vars.iter().map(|&(i, a)| off[i] + self.cloud_step(i, a, k)).collect())
            .collect();
        RegularGraph::new(vars.len(), perms)
    }

    /// Assignment to new variables read off an original assignment.
    pub fn clone_assignment(&self, x: &[usize]) -> Vec<usize> {
        self.new_variables().iter().map(|&(i, _)| x[i]).collect()
    }

    /// Original constraints violated plus unequal undirected expander edges.
    pub fn unsatisfied(&self, y: &[usize]) -> Result<f64> {
        let off = self.offsets();
        check_dim(off.last().map_or(0, |o| o + self.base.adj_v(self.base.n - 1).len()), y.len())?;
        let b = &self.base;
        let s1 = (0..b.r())
            .filter(|&j| {
                let t = b.adj_c(j).iter().fold(0, |acc, &i| acc * b.s + y[off[i] + b.adj_glo_v(i, j).unwrap()]);
                !b.satisfied(j, t)
            })
            .count();
        let g = self.equality_graph()?;
        Ok(s1 as f64 + crate::protocols::ug::unequal_edges(&g, y))
    }

    /// Exhaustive minimum of [`Self::unsatisfied`] over all new assignments.
    pub fn min_unsatisfied(&self) -> Result<(f64, Vec<usize>)> {
        let m = self.new_variables().len();
        if (self.base.s as f64).powi(m as i32) > 2f64.powi(22) {
            return Err(Error::BudgetExceeded(format!("{m} new variables")));
        }
        let mut best = (f64::INFINITY, Vec::new());
        super::ug::for_each_labeling(m, self.base.s, |y| {
            let u = self.unsatisfied(y).unwrap();
            if u < best.0 {
                best = (u, y.to_vec());
            }
        });
        Ok(best)
    }

    pub fn proof_dim(&self) -> usize {
        self.base.r() * self.base.tuples()
    }

    pub fn big_dim(&self) -> usize {
        self.proof_dim() * self.base.n * self.base.s
    }

    fn big_index(&self, j: usize, v: usize, i: usize, a: usize) -> usize {
        ((j * self.base.tuples() + v) * self.base.n + i) * self.base.s + a
    }

    /// `|j⟩|v⟩ ↦ q^{-1/2} Σ_ι |j⟩|v⟩|i_ι⟩|v_ι⟩`.
    pub fn apply_a(&self, psi: &StateVector) -> Result<StateVector> {
        check_dim(self.proof_dim(), psi.dim())?;
        let b = &self.base;
        let t = b.tuples();
        let scale = 1.0 / (b.q as f64).sqrt();
        let mut out = vec![C64::new(0.0, 0.0); self.big_dim()];
        for (x, &amp) in psi.amps().iter().enumerate() {
            let (j, v) = (x / t, x % t);
            for (iota, &i) in b.adj_c(j).iter().enumerate() {
                out[self.big_index(j, v, i, b.digit(v, iota))] += amp * scale;
            }
        }
        StateVector::new(out)
    }

    /// Index permutation of `M_k` on the big space.
    pub fn m_permutation(&self, k: usize) -> Vec<usize> {
        let b = &self.base;
        let t = b.tuples();
        let mut perm = vec![0; self.big_dim()];
        for j in 0..b.r() {
            for i in 0..b.n {
                let jp = match b.adj_glo_v(i, j) {
                    Some(iota) => b.adj_loc_v(i, self.cloud_step(i, iota, k)),
                    None => j,
                };
                for v in 0..t {
                    for a in 0..b.s {
                        perm[self.big_index(j, v, i, a)] = self.big_index(jp, v, i, a);
                    }
                }
            }
        }
        perm
    }

    pub fn apply_m(&self, k: usize, psi: &StateVector) -> Result<StateVector> {
        if k >= self.d {
            return Err(Error::IndexOutOfRange { index: k, dim: self.d });
        }
        check_dim(self.big_dim(), psi.dim())?;
        psi.permuted(&self.m_permutation(k))
    }

    /// Appends the predicate bit as a trailing qubit.
    pub fn apply_b(&self, psi: &StateVector) -> Result<StateVector> {
        check_dim(self.proof_dim(), psi.dim())?;
        let t = self.base.tuples();
        let mut out = vec![C64::new(0.0, 0.0); 2 * psi.dim()];
        for (x, &amp) in psi.amps().iter().enumerate() {
            out[2 * x + self.base.satisfied(x / t, x % t) as usize] = amp;
        }
        StateVector::new(out)
    }

    /// Projects the value register onto the uniform tuple state; returns the
    /// success probability and the normalized remainder on `R × N × Σ`.
    pub fn project_mu(&self, big: &StateVector) -> Result<(f64, Option<StateVector>)> {
        check_dim(self.big_dim(), big.dim())?;
        let b = &self.base;
        let t = b.tuples();
        let rest = b.n * b.s;
        let scale = 1.0 / (t as f64).sqrt();
        let mut out = vec![C64::new(0.0, 0.0); b.r() * rest];
        for j in 0..b.r() {
            for v in 0..t {
                for y in 0..rest {
                    out[j * rest + y] += big.amps()[(j * t + v) * rest + y] * scale;
                }
            }
        }
        let p: f64 = out.iter().map(|c| c.norm_sqr()).sum();
        if p < 1e-300 {
            return Ok((0.0, None));
        }
        Ok((p, Some(StateVector::normalized(out)?)))
    }

    /// Mass on satisfying `(j, v)` pairs.
    pub fn predicate_mass(&self, psi: &StateVector) -> Result<f64> {
        let bpsi = self.apply_b(psi)?;
        Ok(bpsi.amps().iter().skip(1).step_by(2).map(|c| c.norm_sqr()).sum())
    }

    /// Encoding `Σ_j |j⟩|v_j⟩/√R` of a new-variable assignment given per constraint.
    pub fn encode(&self, tuples: &[usize]) -> Result<StateVector> {
        check_dim(self.base.r(), tuples.len())?;
        let t = self.base.tuples();
        let mut amps = vec![C64::new(0.0, 0.0); self.proof_dim()];
        for (j, &v) in tuples.iter().enumerate() {
            if v >= t {
                return Err(Error::IndexOutOfRange { index: v, dim: t });
            }
            amps[j * t + v] = C64::new(1.0, 0.0);
        }
        StateVector::normalized(amps)
    }

    /// Per-constraint tuples induced by an assignment to the new variables.
    pub fn tuples_from_new(&self, y: &[usize]) -> Vec<usize> {
        let off = self.offsets();
        let b = &self.base;
        (0..b.r())
            .map(|j| b.adj_c(j).iter().fold(0, |acc, &i| acc * b.s + y[off[i] + b.adj_glo_v(i, j).unwrap()]))
            .collect()
    }
}

/// Branch probabilities of the constraints test on one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairBranches {
    /// Per matching: survival probability of both `μ` measurements.
    pub keep_consistency: Vec<f64>,
    pub swap_accept: Vec<f64>,
    pub keep_inner: f64,
    pub predicate: f64,
}

impl PairBranches {
    fn weights(d: usize) -> (f64, f64) {
        let w = 2.0 * d as f64 / (2.0 * d as f64 + 1.0);
        (w, 1.0 - w)
    }

    pub fn keep(&self) -> f64 {
        let (w, v) = Self::weights(self.keep_consistency.len());
        w * mean(&self.keep_consistency) + v * self.keep_inner
    }

    pub fn accepted(&self) -> f64 {
        let (w, v) = Self::weights(self.keep_consistency.len());
        let cons: Vec<f64> = self.keep_consistency.iter().zip(&self.swap_accept).map(|(k, s)| k * s).collect();
        w * mean(&cons) + v * self.keep_inner * self.predicate
    }

    pub fn kept_acceptance(&self) -> f64 {
        self.accepted() / self.keep()
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn pair_branches(reg: &RegularizedCsp, psi: &StateVector, phi: &StateVector) -> Result<PairBranches> {
    let (p_psi, c_psi) = reg.project_mu(&reg.apply_a(psi)?)?;
    let a_phi = reg.apply_a(phi)?;
    let mut keep_consistency = Vec::with_capacity(reg.d);
    let mut swap_accept = Vec::with_capacity(reg.d);
    for k in 0..reg.d {
        let (p_phi, c_phi) = reg.project_mu(&reg.apply_m(k, &a_phi)?)?;
        keep_consistency.push(p_psi * p_phi);
        swap_accept.push(match (&c_psi, &c_phi) {
            (Some(x), Some(y)) => 0.5 + 0.5 * overlap(x, y)?.norm_sqr(),
            _ => 0.0,
        });
    }
    Ok(PairBranches { keep_consistency, swap_accept, keep_inner: default_keep_inner(reg), predicate: reg.predicate_mass(psi)? })
}

/// Survival probability of the two `|+⟩` measurements in the inner branch, `|Σ|^(-2q)`.
pub fn default_keep_inner(reg: &RegularizedCsp) -> f64 {
    let t = reg.base.tuples() as f64;
    1.0 / (t * t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintsOutcome {
    /// Acceptance among kept pairs.
    pub fraction: f64,
    pub keep: f64,
    pub kept: usize,
    pub theta: f64,
    pub accept: bool,
}

pub fn default_theta(delta: f64, d: usize) -> f64 {
    1.0 - (1.0 - delta) / (4.0 * (2.0 * d as f64 + 1.0))
}

pub fn constraints_test(
    psi0: &[StateVector],
    psi1: &[StateVector],
    reg: &RegularizedCsp,
    theta: f64,
    keep_inner: Option<f64>,
    mode: TestMode,
) -> Result<ConstraintsOutcome> {
    if psi0.len() != psi1.len() || psi0.is_empty() {
        return Err(Error::FamilySizeMismatch(psi0.len(), psi1.len()));
    }
    if let Some(k) = keep_inner {
        if !(k > 0.0 && k <= 1.0) {
            return Err(Error::InvalidParameter(format!("keep probability {k} outside (0, 1]")));
        }
    }
    let branches = psi0
        .iter()
        .zip(psi1)
        .map(|(a, b)| {
            let mut br = pair_branches(reg, a, b)?;
            if let Some(k) = keep_inner {
                br.keep_inner = k;
            }
            Ok(br)
        })
        .collect::<Result<Vec<_>>>()?;
    let (fraction, keep, kept) = match mode {
        TestMode::Exact => {
            let keep: f64 = branches.iter().map(PairBranches::keep).sum();
            let acc: f64 = branches.iter().map(PairBranches::accepted).sum();
            (acc / keep, keep / branches.len() as f64, 0)
        }
        TestMode::MonteCarlo { seed, trials } => {
            let mut rng = split(seed, 60);
            let (w, _) = PairBranches::weights(reg.d);
            let (mut kept, mut hits) = (0usize, 0usize);
            for t in 0..trials {
                let b = &branches[t % branches.len()];
                let (keep_p, acc_p) = if bernoulli(w, &mut rng) {
                    let k = rng.gen_range(0..reg.d);
                    (b.keep_consistency[k], b.swap_accept[k])
                } else {
                    (b.keep_inner, b.predicate)
                };
                if bernoulli(keep_p, &mut rng) {
                    kept += 1;
                    hits += bernoulli(acc_p, &mut rng) as usize;
                }
            }
            let frac = if kept == 0 { 0.0 } else { hits as f64 / kept as f64 };
            (frac, kept as f64 / trials.max(1) as f64, kept)
        }
    };
    Ok(ConstraintsOutcome { fraction, keep, kept, theta, accept: fraction > theta })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CspConfig {
    pub delta: f64,
    pub eps: f64,
    pub k: usize,
    pub validity_precision: f64,
    pub theta: Option<f64>,
    /// Overrides the inner-branch keep probability.
    #[serde(default)]
    pub keep_inner: Option<f64>,
}

impl CspConfig {
    pub fn new(delta: f64) -> Self {
        Self { delta, eps: 0.01, k: 16, validity_precision: 0.1, theta: None, keep_inner: None }
    }

    pub fn theta(&self, d: usize) -> f64 {
        self.theta.unwrap_or_else(|| default_theta(self.delta, d))
    }
}

/// Encoding of an assignment and its complement over the other tuples.
pub fn csp_honest_proofs(reg: &RegularizedCsp, x: &[usize], k: usize) -> Result<(TiltedFamily, TiltedFamily)> {
    check_dim(reg.base.n, x.len())?;
    let tuples: Vec<usize> = (0..reg.base.r()).map(|j| reg.base.local_tuple(j, x)).collect();
    let psi = reg.encode(&tuples)?;
    let t = reg.base.tuples();
    let mut amps = vec![C64::new(0.0, 0.0); reg.proof_dim()];
    for (j, &v) in tuples.iter().enumerate() {
        for w in (0..t).filter(|&w| w != v) {
            amps[j * t + w] = C64::new(1.0, 0.0);
        }
    }
    let phi = StateVector::normalized(amps)?;
    Ok((TiltedFamily::copies(&psi, 2 * k)?, TiltedFamily::copies(&phi, 2 * k)?))
}

pub fn csp_protocol(
    reg: &RegularizedCsp,
    psi: &TiltedFamily,
    phi: &TiltedFamily,
    primes: &[u64],
    config: &CspConfig,
    mode: TestMode,
) -> Result<ProtocolOutcome> {
    check_dim(reg.proof_dim(), psi.dim())?;
    let primes_ok = primes.iter().all(|&p| is_prime(p));
    let t = reg.base.tuples();
    let sym_psi = symmetry_test(psi, mode.substream(1))?;
    let sym_phi = symmetry_test(phi, mode.substream(2))?;
    let sparsity = sparsity_test_ii(psi, phi, 1.0 / t as f64, config.eps, mode.substream(3))?;
    let labeled = psi
        .states()
        .iter()
        .map(|s| LabeledState::new(reg.base.r(), t, s.clone()))
        .collect::<Result<Vec<_>>>()?;
    let validity = validity_test(&labeled, config.validity_precision, mode.substream(4))?;
    let (h0, h1) = psi.halves()?;
    let constraints = constraints_test(h0, h1, reg, config.theta(reg.d), config.keep_inner, mode.substream(5))?;
    let mut outcome = ProtocolOutcome::from_menu(
        "csp",
        mode,
        vec![
            ("primes", indicator(primes_ok), json!({"primes": primes})),
            (
                "symmetry",
                sym_psi.acceptance * sym_phi.acceptance,
                json!({"psi": sym_psi.acceptance, "phi": sym_phi.acceptance}),
            ),
            ("sparsity", indicator(sparsity.accept), json!(sparsity)),
            ("validity", indicator(validity.accept), json!(validity)),
            ("constraints", indicator(constraints.accept), json!(constraints)),
        ],
    );
    if !primes_ok {
        outcome.overall = 0.0;
    }
    Ok(outcome)
}

/// Inverse of a cloud matching, used to check `M_k` against its inverse.
pub fn inverse_matching(reg: &RegularizedCsp, k: usize) -> Vec<usize> {
    invert(&reg.m_permutation(k))
}
