//! Unique Games: instances, the labeling test, the four-test protocol and
//! regularization by expander clouds.

use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{indicator, ProtocolOutcome};
use crate::error::{Error, Result};
use crate::graphs::{check_permutation, expander_family, invert, RegularGraph};
use crate::property::{
    bernoulli, sparsity_test_ii, swap_accept_prob, symmetry_test, validity_test, TestMode, TiltedFamily,
};
use crate::qstate::{check_dim, LabeledState, StateVector, C64};
use crate::rng::split;

/// Bijective constraints stored per directed occurrence `(r, i)`: the edge
/// `i → π_r(i)` requires `label(π_r(i)) = f_{r,i}(label(i))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UgRepr", into = "UgRepr")]
pub struct UgInstance {
    graph: RegularGraph,
    q: usize,
    constraints: Vec<Vec<Vec<usize>>>,
}

#[derive(Serialize, Deserialize)]
struct UgRepr {
    graph: RegularGraph,
    q: usize,
    constraints: Vec<(usize, usize, Vec<usize>)>,
}

impl TryFrom<UgRepr> for UgInstance {
    type Error = Error;
    fn try_from(r: UgRepr) -> Result<Self> {
        let (n, d) = (r.graph.n(), r.graph.d());
        let mut c = vec![vec![Vec::new(); n]; d];
        for (rr, i, f) in r.constraints {
            if rr >= d || i >= n {
                return Err(Error::Parse(format!("constraint ({rr}, {i}) out of range")));
            }
            c[rr][i] = f;
        }
        UgInstance::new(r.graph, r.q, c)
    }
}

impl From<UgInstance> for UgRepr {
    fn from(u: UgInstance) -> Self {
        let constraints = u
            .constraints
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().enumerate().map(move |(i, f)| (r, i, f.clone())))
            .collect();
        UgRepr { graph: u.graph, q: u.q, constraints }
    }
}

impl UgInstance {
    pub fn new(graph: RegularGraph, q: usize, constraints: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParameter("alphabet needs at least two labels".into()));
        }
        check_dim(graph.d(), constraints.len())?;
        for row in &constraints {
            check_dim(graph.n(), row.len())?;
            for f in row {
                check_permutation(f, q)?;
            }
        }
        if !graph.is_undirected() {
            return Err(Error::Precondition("constraint graph must be undirected".into()));
        }
        // occurrences i→j carry f; occurrences j→i must carry the inverses
        let mut fwd: BTreeMap<(usize, usize), Vec<Vec<usize>>> = BTreeMap::new();
        let mut back: BTreeMap<(usize, usize), Vec<Vec<usize>>> = BTreeMap::new();
        for (r, p) in graph.perms().iter().enumerate() {
            for (i, &j) in p.iter().enumerate() {
                let f = &constraints[r][i];
                if i <= j {
                    fwd.entry((i, j)).or_default().push(f.clone());
                }
                if j <= i {
                    back.entry((j, i)).or_default().push(invert(f));
                }
            }
        }
        for (key, mut fs) in fwd {
            let mut bs = back.remove(&key).unwrap_or_default();
            fs.sort();
            bs.sort();
            if fs != bs {
                return Err(Error::Precondition(format!("constraints on edge {key:?} are not paired with inverses")));
            }
        }
        Ok(Self { graph, q, constraints })
    }

    /// Identity constraints on every occurrence.
    pub fn equality(graph: RegularGraph, q: usize) -> Result<Self> {
        let c = vec![vec![(0..q).collect(); graph.n()]; graph.d()];
        Self::new(graph, q, c)
    }

    pub fn graph(&self) -> &RegularGraph {
        &self.graph
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn constraint(&self, r: usize, i: usize) -> &[usize] {
        &self.constraints[r][i]
    }

    /// Satisfied fraction of directed occurrences.
    pub fn value(&self, labels: &[usize]) -> Result<f64> {
        check_dim(self.n(), labels.len())?;
        let sat: usize = self
            .graph
            .perms()
            .iter()
            .enumerate()
            .map(|(r, p)| (0..self.n()).filter(|&i| self.constraints[r][i][labels[i]] == labels[p[i]]).count())
            .sum();
        Ok(sat as f64 / (self.n() * self.graph.d()) as f64)
    }

    /// Exhaustive optimum with a maximizing labeling.
    pub fn best_value(&self) -> Result<(f64, Vec<usize>)> {
        let total = (self.q as f64).powi(self.n() as i32);
        if total > 2f64.powi(24) {
            return Err(Error::BudgetExceeded(format!("{total} labelings")));
        }
        let mut best = (-1.0, Vec::new());
        for_each_labeling(self.n(), self.q, |l| {
            let v = self.value(l).unwrap();
            if v > best.0 {
                best = (v, l.to_vec());
            }
        });
        Ok(best)
    }

    /// Undirected edges counted as directed occurrences over two.
    pub fn edge_count(&self) -> f64 {
        (self.n() * self.graph.d()) as f64 / 2.0
    }

    /// `|i, v⟩ ↦ |π_r(i), f_{r,i}(v)⟩`.
    pub fn apply_pi_r(&self, r: usize, psi: &StateVector) -> Result<StateVector> {
        if r >= self.graph.d() {
            return Err(Error::IndexOutOfRange { index: r, dim: self.graph.d() });
        }
        check_dim(self.n() * self.q, psi.dim())?;
        psi.permuted(&self.pi_permutation(r))
    }

    /// The index permutation realized by `Π_r`.
    pub fn pi_permutation(&self, r: usize) -> Vec<usize> {
        let q = self.q;
        let p = self.graph.perm(r);
        (0..self.n() * q).map(|x| p[x / q] * q + self.constraints[r][x / q][x % q]).collect()
    }
}

pub fn for_each_labeling(n: usize, q: usize, mut f: impl FnMut(&[usize])) {
    let mut l = vec![0usize; n];
    loop {
        f(&l);
        let mut pos = 0;
        loop {
            if pos == n {
                return;
            }
            l[pos] += 1;
            if l[pos] < q {
                break;
            }
            l[pos] = 0;
            pos += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UgConfig {
    pub delta: f64,
    pub eta: f64,
    pub eps: f64,
    pub k: usize,
    pub theta: Option<f64>,
    pub nu: Option<f64>,
}

impl UgConfig {
    pub fn new(delta: f64, eta: f64) -> Self {
        Self { delta, eta, eps: 0.01, k: 16, theta: None, nu: None }
    }

    /// `½((1+(1−δ)²)/2 + (1+η)/2)`.
    pub fn theta(&self) -> f64 {
        self.theta
            .unwrap_or(0.5 * ((1.0 + (1.0 - self.delta).powi(2)) / 2.0 + (1.0 + self.eta) / 2.0))
    }

    /// `(1−δ)²/2 − η/2`.
    pub fn lambda(&self) -> f64 {
        (1.0 - self.delta).powi(2) / 2.0 - self.eta / 2.0
    }

    /// Validity precision, `ε^{1/24} q^{1/3}` unless overridden.
    pub fn nu(&self, q: usize) -> f64 {
        self.nu.unwrap_or(self.eps.powf(1.0 / 24.0) * (q as f64).powf(1.0 / 3.0))
    }
}

/// Labeling states and their complements over the other `q−1` labels.
pub fn ug_honest_proofs(instance: &UgInstance, labels: &[usize], k: usize) -> Result<(TiltedFamily, TiltedFamily)> {
    check_dim(instance.n(), labels.len())?;
    let q = instance.q;
    let psi = LabeledState::from_labeling(q, labels)?;
    let mut amps = vec![C64::new(0.0, 0.0); instance.n() * q];
    for (i, &l) in labels.iter().enumerate() {
        for v in (0..q).filter(|&v| v != l) {
            amps[i * q + v] = C64::new(1.0, 0.0);
        }
    }
    let gamma = StateVector::normalized(amps)?;
    Ok((TiltedFamily::copies(psi.state(), 2 * k)?, TiltedFamily::copies(&gamma, 2 * k)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelingOutcome {
    pub fraction: f64,
    pub per_pair: Vec<f64>,
    pub theta: f64,
    pub accept: bool,
}

pub fn labeling_pair_prob(instance: &UgInstance, psi: &StateVector, phi: &StateVector) -> Result<f64> {
    let d = instance.graph.d();
    let mut acc = 0.0;
    for r in 0..d {
        acc += swap_accept_prob(&instance.apply_pi_r(r, psi)?, phi)?;
    }
    Ok(acc / d as f64)
}

pub fn labeling_test(
    psi0: &[StateVector],
    psi1: &[StateVector],
    instance: &UgInstance,
    theta: f64,
    mode: TestMode,
) -> Result<LabelingOutcome> {
    if psi0.len() != psi1.len() || psi0.is_empty() {
        return Err(Error::FamilySizeMismatch(psi0.len(), psi1.len()));
    }
    let per_pair = psi0.iter().zip(psi1).map(|(a, b)| labeling_pair_prob(instance, a, b)).collect::<Result<Vec<_>>>()?;
    let fraction = match mode {
        TestMode::Exact => per_pair.iter().sum::<f64>() / per_pair.len() as f64,
        TestMode::MonteCarlo { seed, trials } => {
            let mut rng = split(seed, 50);
            let d = instance.graph.d();
            let mut hits = 0usize;
            for t in 0..trials {
                let pair = t % psi0.len();
                let r = rng.gen_range(0..d);
                let p = swap_accept_prob(&instance.apply_pi_r(r, &psi0[pair])?, &psi1[pair])?;
                hits += bernoulli(p, &mut rng) as usize;
            }
            hits as f64 / trials.max(1) as f64
        }
    };
    Ok(LabelingOutcome { fraction, per_pair, theta, accept: fraction > theta })
}

fn labeled_family(instance: &UgInstance, fam: &TiltedFamily) -> Result<Vec<LabeledState>> {
    fam.states().iter().map(|s| LabeledState::new(instance.n(), instance.q, s.clone())).collect()
}

pub fn ug_protocol(
    instance: &UgInstance,
    psi: &TiltedFamily,
    gamma: &TiltedFamily,
    config: &UgConfig,
    mode: TestMode,
) -> Result<ProtocolOutcome> {
    check_dim(instance.n() * instance.q, psi.dim())?;
    let q = instance.q;
    let sym_psi = symmetry_test(psi, mode.substream(1))?;
    let sym_gamma = symmetry_test(gamma, mode.substream(2))?;
    let sparsity = sparsity_test_ii(psi, gamma, 1.0 / q as f64, config.eps, mode.substream(3))?;
    let nu = config.nu(q);
    let validity = validity_test(&labeled_family(instance, psi)?, nu, mode.substream(4))?;
    let (h0, h1) = psi.halves()?;
    let labeling = labeling_test(h0, h1, instance, config.theta(), mode.substream(5))?;
    Ok(ProtocolOutcome::from_menu(
        "ug",
        mode,
        vec![
            (
                "symmetry",
                sym_psi.acceptance * sym_gamma.acceptance,
                json!({"psi": sym_psi.acceptance, "gamma": sym_gamma.acceptance}),
            ),
            ("sparsity", indicator(sparsity.accept), json!(sparsity)),
            ("validity", indicator(validity.accept), json!({"outcome": validity, "nu": nu})),
            ("labeling", indicator(labeling.accept), json!({"fraction": labeling.fraction, "theta": labeling.theta})),
        ],
    ))
}

/// Unique game on an arbitrary loopless graph; `f` maps the label of `u`
/// to the required label of `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralUg {
    pub n: usize,
    pub q: usize,
    pub edges: Vec<(usize, usize, Vec<usize>)>,
}

impl GeneralUg {
    pub fn validate(&self) -> Result<()> {
        for (u, v, f) in &self.edges {
            if u == v || *u >= self.n || *v >= self.n {
                return Err(Error::InvalidParameter(format!("bad edge ({u}, {v})")));
            }
            check_permutation(f, self.q)?;
        }
        Ok(())
    }

    pub fn value(&self, labels: &[usize]) -> f64 {
        let sat = self.edges.iter().filter(|(u, v, f)| f[labels[*u]] == labels[*v]).count();
        sat as f64 / self.edges.len() as f64
    }

    pub fn best_value(&self) -> f64 {
        let mut best: f64 = 0.0;
        for_each_labeling(self.n, self.q, |l| best = best.max(self.value(l)));
        best
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for (u, v, _) in &self.edges {
            deg[*u] += 1;
            deg[*v] += 1;
        }
        deg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizedUg {
    pub instance: UgInstance,
    /// New vertex `(v, e)` for each endpoint, indexed like `instance`.
    pub origin: Vec<(usize, usize)>,
    pub cloud_cheeger: Vec<f64>,
}

/// Replaces each vertex by a cloud of its edge endpoints joined by a
/// certified d-regular expander with equality constraints; original
/// constraints become a perfect matching between clouds.
pub fn regularize_ug(g: &GeneralUg, d: usize, seed: u64) -> Result<RegularizedUg> {
    g.validate()?;
    if g.edges.is_empty() {
        return Err(Error::InvalidParameter("no edges".into()));
    }
    let mut origin = Vec::new();
    let mut cloud: Vec<Vec<usize>> = vec![Vec::new(); g.n];
    for (e, (u, v, _)) in g.edges.iter().enumerate() {
        for w in [*u, *v] {
            cloud[w].push(origin.len());
            origin.push((w, e));
        }
    }
    let n2 = origin.len();
    let mut perms: Vec<Vec<usize>> = vec![(0..n2).collect(); d + 1];
    let mut cheeger_values = Vec::new();
    for (v, members) in cloud.iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let cert = expander_family(members.len(), d, seed.wrapping_add(v as u64))?;
        if !cert.certifies(2.0) {
            return Err(Error::Uncertified(cert.cheeger));
        }
        cheeger_values.push(cert.cheeger);
        for r in 0..d {
            for (a, &x) in members.iter().enumerate() {
                perms[r][x] = members[cert.graph.perm(r)[a]];
            }
        }
    }
    let ident: Vec<usize> = (0..g.q).collect();
    let mut constraints = vec![vec![ident.clone(); n2]; d + 1];
    for (e, (_, _, f)) in g.edges.iter().enumerate() {
        let (a, b) = (2 * e, 2 * e + 1);
        perms[d][a] = b;
        perms[d][b] = a;
        constraints[d][a] = f.clone();
        constraints[d][b] = invert(f);
    }
    let graph = RegularGraph::new(n2, perms)?;
    Ok(RegularizedUg { instance: UgInstance::new(graph, g.q, constraints)?, origin, cloud_cheeger: cheeger_values })
}

impl RegularizedUg {
    /// Copies each original label to every vertex of its cloud.
    pub fn clone_labeling(&self, labels: &[usize]) -> Vec<usize> {
        self.origin.iter().map(|&(v, _)| labels[v]).collect()
    }
}

/// Undirected edges of `g` whose endpoints carry different labels.
pub fn unequal_edges(g: &RegularGraph, labels: &[usize]) -> f64 {
    let occ: usize = g.perms().iter().map(|p| (0..g.n()).filter(|&i| labels[i] != labels[p[i]]).count()).sum();
    occ as f64 / 2.0
}

/// Vertices outside the most frequent label.
pub fn minority_count(labels: &[usize], q: usize) -> usize {
    let mut counts = vec![0usize; q];
    for &l in labels {
        counts[l] += 1;
    }
    labels.len() - counts.into_iter().max().unwrap_or(0)
}
