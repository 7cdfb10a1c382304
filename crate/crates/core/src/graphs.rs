//! Regular multigraphs stored as sums of permutations, expansion and Cheeger
//! analysis, small-set-expansion instances, and sparse quadratic forms.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{real_quad_form, real_symmetric_eigen, RMatrix};
use crate::rng::{seeded, split, Rng};

/// d-regular multigraph as d permutations of `0..n`; `perms[r][i]` is the
/// head of the r-th edge leaving `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct RegularGraph {
    n: usize,
    perms: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    d: usize,
    perms: Vec<Vec<usize>>,
}

impl TryFrom<GraphRepr> for RegularGraph {
    type Error = Error;
    fn try_from(r: GraphRepr) -> Result<Self> {
        if r.perms.len() != r.d {
            return Err(Error::NotRegular(format!("{} permutations for degree {}", r.perms.len(), r.d)));
        }
        RegularGraph::new(r.n, r.perms)
    }
}

impl From<RegularGraph> for GraphRepr {
    fn from(g: RegularGraph) -> Self {
        GraphRepr { n: g.n, d: g.perms.len(), perms: g.perms }
    }
}

pub fn check_permutation(p: &[usize], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::NotPermutation(format!("length {} != {n}", p.len())));
    }
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n || seen[x] {
            return Err(Error::NotPermutation(format!("{p:?}")));
        }
        seen[x] = true;
    }
    Ok(())
}

pub fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

impl RegularGraph {
    pub fn new(n: usize, perms: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one vertex".into()));
        }
        for p in &perms {
            check_permutation(p, n)?;
        }
        Ok(Self { n, perms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.perms.len()
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    pub fn perm(&self, r: usize) -> &[usize] {
        &self.perms[r]
    }

    /// Multi-adjacency counts `A[i][j] = #{r : π_r(i) = j}`.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut a = vec![vec![0u32; self.n]; self.n];
        for p in &self.perms {
            for (i, &j) in p.iter().enumerate() {
                a[i][j] += 1;
            }
        }
        a
    }

    pub fn adjacency_matrix(&self) -> RMatrix {
        let a = self.adjacency();
        RMatrix::from_fn(self.n, self.n, |i, j| a[i][j] as f64)
    }

    pub fn is_undirected(&self) -> bool {
        let a = self.adjacency();
        (0..self.n).all(|i| (0..self.n).all(|j| a[i][j] == a[j][i]))
    }

    pub fn has_loops(&self) -> bool {
        self.perms.iter().any(|p| p.iter().enumerate().any(|(i, &j)| i == j))
    }

    /// Text format: `n d` then one permutation per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.d());
        for p in &self.perms {
            let line: Vec<String> = p.iter().map(|x| x.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let head = lines.next().ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let nums = |l: &str| -> Result<Vec<usize>> {
            l.split_whitespace().map(|t| t.parse().map_err(|_| Error::Parse(format!("bad integer {t:?}")))).collect()
        };
        let hd = nums(head)?;
        if hd.len() != 2 {
            return Err(Error::Parse("header must be `n d`".into()));
        }
        let perms = lines.map(nums).collect::<Result<Vec<_>>>()?;
        Self::try_from(GraphRepr { n: hd[0], d: hd[1], perms })
    }

    /// Directed edge occurrences from `S` to its complement.
    pub fn cut(&self, in_set: &[bool]) -> usize {
        self.perms.iter().map(|p| (0..self.n).filter(|&i| in_set[i] && !in_set[p[i]]).count()).sum()
    }

    /// Directed edge occurrences with both ends in `S` (each internal edge twice).
    pub fn internal(&self, in_set: &[bool]) -> usize {
        self.perms.iter().map(|p| (0..self.n).filter(|&i| in_set[i] && in_set[p[i]]).count()).sum()
    }
}

pub fn indicator(n: usize, set: &[usize]) -> Vec<bool> {
    let mut v = vec![false; n];
    for &i in set {
        v[i] = true;
    }
    v
}

/// `|E(S, V∖S)| / (d|S|)`.
pub fn expansion(g: &RegularGraph, set: &[usize]) -> Result<f64> {
    let ind = indicator(g.n, set);
    let size = ind.iter().filter(|&&b| b).count();
    if size == 0 {
        return Err(Error::EmptySet);
    }
    if let Some(&i) = set.iter().find(|&&i| i >= g.n) {
        return Err(Error::IndexOutOfRange { index: i, dim: g.n });
    }
    Ok(g.cut(&ind) as f64 / (g.d() * size) as f64)
}

/// Splits a regular bipartite multigraph (rows = tails, columns = heads)
/// into permutations, one perfect matching at a time.
pub fn decompose_into_permutations(adj: &[Vec<u32>]) -> Result<RegularGraph> {
    let n = adj.len();
    if n == 0 {
        return Err(Error::NotRegular("empty adjacency".into()));
    }
    let d: u32 = adj[0].iter().sum();
    for i in 0..n {
        if adj[i].len() != n {
            return Err(Error::NotRegular("adjacency is not square".into()));
        }
        let row: u32 = adj[i].iter().sum();
        let col: u32 = (0..n).map(|r| adj[r][i]).sum();
        if row != d || col != d {
            return Err(Error::NotRegular(format!("vertex {i} has row sum {row} and column sum {col}, expected {d}")));
        }
    }
    let mut rest: Vec<Vec<u32>> = adj.to_vec();
    let mut perms = Vec::with_capacity(d as usize);
    for _ in 0..d {
        let m = perfect_matching(&rest).ok_or_else(|| Error::NotRegular("no perfect matching".into()))?;
        for (i, &j) in m.iter().enumerate() {
            rest[i][j] -= 1;
        }
        perms.push(m);
    }
    RegularGraph::new(n, perms)
}

/// Kuhn's augmenting paths, scanning heads in increasing order.
fn perfect_matching(adj: &[Vec<u32>]) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut head_of = vec![usize::MAX; n];
    fn augment(i: usize, adj: &[Vec<u32>], seen: &mut [bool], head_of: &mut [usize]) -> bool {
        for j in 0..adj.len() {
            if adj[i][j] > 0 && !seen[j] {
                seen[j] = true;
                if head_of[j] == usize::MAX || augment(head_of[j], adj, seen, head_of) {
                    head_of[j] = i;
                    return true;
                }
            }
        }
        false
    }
    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, adj, &mut seen, &mut head_of) {
            return None;
        }
    }
    let mut m = vec![0; n];
    for (j, &i) in head_of.iter().enumerate() {
        m[i] = j;
    }
    Some(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheegerMethod {
    Exhaustive,
    SpectralLowerBound,
}

pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpanderCertificate {
    pub graph: RegularGraph,
    /// Infinite (serialized as null) when no set of at most n/2 vertices exists.
    pub cheeger: f64,
    pub method: CheegerMethod,
}

impl ExpanderCertificate {
    pub fn certifies(&self, bound: f64) -> bool {
        self.cheeger >= bound - 1e-12
    }
}

/// Edge boundary per set size, minimized over `1 ≤ |S| ≤ n/2`.
pub fn cheeger(g: &RegularGraph, method: CheegerMethod) -> Result<ExpanderCertificate> {
    let value = match method {
        CheegerMethod::Exhaustive => exhaustive_cheeger(g)?,
        CheegerMethod::SpectralLowerBound => {
            if g.n < 2 {
                f64::INFINITY
            } else {
                let (vals, _) = real_symmetric_eigen(&g.adjacency_matrix());
                ((g.d() as f64 - vals[vals.len() - 2]) / 2.0).max(0.0)
            }
        }
    };
    Ok(ExpanderCertificate { graph: g.clone(), cheeger: value, method })
}

fn exhaustive_cheeger(g: &RegularGraph) -> Result<f64> {
    let n = g.n;
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::BudgetExceeded(format!("exhaustive Cheeger needs n <= {EXHAUSTIVE_LIMIT}, got {n}")));
    }
    let a = g.adjacency();
    let mut in_s = vec![false; n];
    let (mut cut, mut size) = (0i64, 0usize);
    let mut best = f64::INFINITY;
    // Gray code walk over all subsets.
    for step in 1u64..(1u64 << n) {
        let v = step.trailing_zeros() as usize;
        let outside: i64 = (0..n).filter(|&j| j != v && !in_s[j]).map(|j| a[v][j] as i64).sum();
        let inside: i64 = (0..n).filter(|&j| j != v && in_s[j]).map(|j| a[j][v] as i64).sum();
        if in_s[v] {
            cut += inside - outside;
            size -= 1;
        } else {
            cut += outside - inside;
            size += 1;
        }
        in_s[v] = !in_s[v];
        if size >= 1 && 2 * size <= n {
            best = best.min(cut as f64 / size as f64);
        }
    }
    Ok(best)
}

/// Random simple d-regular graph by sequential random pairing with restarts.
pub fn random_simple_regular(n: usize, d: usize, rng: &mut Rng) -> Result<RegularGraph> {
    if d >= n || (n * d) % 2 == 1 {
        return Err(Error::Infeasible(format!("no simple {d}-regular graph on {n} vertices")));
    }
    'attempt: for _ in 0..1000 {
        let mut adj = vec![vec![0u32; n]; n];
        let mut deg = vec![0usize; n];
        for _ in 0..n * d / 2 {
            let open: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| deg[i] < d && deg[j] < d && adj[i][j] == 0)
                .collect();
            if open.is_empty() {
                continue 'attempt;
            }
            // weight pairs by remaining stubs
            let w: Vec<f64> = open.iter().map(|&(i, j)| ((d - deg[i]) * (d - deg[j])) as f64).collect();
            let (i, j) = open[crate::qstate::sample_index(&w, rng)];
            adj[i][j] = 1;
            adj[j][i] = 1;
            deg[i] += 1;
            deg[j] += 1;
        }
        return decompose_into_permutations(&adj);
    }
    Err(Error::Infeasible(format!("pairing failed for n={n}, d={d}")))
}

fn random_perm(n: usize, rng: &mut Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Involution pairing a shuffled order; one fixed point when `n` is odd.
fn random_involution(n: usize, rng: &mut Rng) -> Vec<usize> {
    let order = random_perm(n, rng);
    let mut p: Vec<usize> = (0..n).collect();
    for c in order.chunks(2) {
        if let [a, b] = *c {
            p[a] = b;
            p[b] = a;
        }
    }
    p
}

/// Random d-regular multigraph closed under inverse: d/2 permutations with
/// their inverses, plus a random involution when d is odd.
pub fn random_multi_regular(n: usize, d: usize, rng: &mut Rng) -> RegularGraph {
    let mut perms = Vec::with_capacity(d);
    for _ in 0..d / 2 {
        let p = random_perm(n, rng);
        perms.push(invert(&p));
        perms.push(p);
    }
    if d % 2 == 1 {
        perms.push(random_involution(n, rng));
    }
    RegularGraph::new(n, perms).expect("valid permutations")
}

/// Circulant on `Z_m` with shifts ±1, ±2, … cycled until d permutations.
pub fn circulant(m: usize, d: usize) -> RegularGraph {
    let half = (m / 2).max(1);
    let mut perms = Vec::with_capacity(d);
    let mut s = 1;
    while perms.len() < d {
        let shift = s % m;
        perms.push((0..m).map(|i| (i + shift) % m).collect());
        if perms.len() < d {
            perms.push((0..m).map(|i| (i + m - shift % m) % m).collect());
        }
        s = if s >= half { 1 } else { s + 1 };
    }
    RegularGraph::new(m, perms).expect("circulant shifts are permutations")
}

/// A d-regular graph on `m` vertices with exhaustively certified Cheeger
/// constant at least 2. Small clouds use circulants, larger ones certified
/// random simple graphs.
pub fn expander_family(m: usize, d: usize, seed: u64) -> Result<ExpanderCertificate> {
    if m == 0 {
        return Err(Error::InvalidParameter("cloud of size 0".into()));
    }
    if m == 1 {
        return cheeger(&RegularGraph::new(1, vec![vec![0]; d])?, CheegerMethod::Exhaustive);
    }
    if m > EXHAUSTIVE_LIMIT {
        return Err(Error::BudgetExceeded(format!("cannot certify a cloud of size {m}")));
    }
    if m <= d + 1 {
        let cert = cheeger(&circulant(m, d), CheegerMethod::Exhaustive)?;
        if cert.certifies(2.0) {
            return Ok(cert);
        }
    }
    let mut rng = seeded(seed);
    let mut best = 0.0f64;
    for _ in 0..500 {
        let g = if d < m && (m * d) % 2 == 0 {
            random_simple_regular(m, d, &mut rng)?
        } else {
            random_multi_regular(m, d, &mut rng)
        };
        let cert = cheeger(&g, CheegerMethod::Exhaustive)?;
        if cert.certifies(2.0) {
            return Ok(cert);
        }
        best = best.max(cert.cheeger);
    }
    Err(Error::Uncertified(best))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SseLabel {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SseInstance {
    pub graph: RegularGraph,
    pub eta: f64,
    pub delta: f64,
    pub label: SseLabel,
    pub witness: Option<Vec<usize>>,
}

impl SseInstance {
    pub fn max_set_size(&self) -> usize {
        (self.delta * self.graph.n as f64 + 1e-9).floor() as usize
    }
}

/// Two random blocks on `⌊δn⌋` and the remaining vertices, each
/// (d−1)-regular, joined by one matching layer carrying at most `η·d·⌊δn⌋`
/// crossing edges.
pub fn planted_sse_yes(n: usize, d: usize, delta: f64, eta: f64, seed: u64) -> Result<SseInstance> {
    let s = (delta * n as f64 + 1e-9).floor() as usize;
    if s == 0 || s >= n || d < 2 {
        return Err(Error::Infeasible(format!("need 1 <= floor(delta n) < n and d >= 2 (n={n}, d={d}, delta={delta})")));
    }
    let mut rng = seeded(seed);
    let small = random_multi_regular(s, d - 1, &mut rng);
    let large = random_multi_regular(n - s, d - 1, &mut rng);
    let mut perms: Vec<Vec<usize>> = (0..d - 1)
        .map(|r| {
            let mut p: Vec<usize> = small.perm(r).to_vec();
            p.extend(large.perm(r).iter().map(|&x| x + s));
            p
        })
        .collect();
    let crossing = ((eta * (d * s) as f64 + 1e-9).floor() as usize).min(s).min(n - s);
    let mut layer: Vec<usize> = (0..n).collect();
    let mut left: Vec<usize> = (0..s).collect();
    let mut right: Vec<usize> = (s..n).collect();
    left.shuffle(&mut rng);
    right.shuffle(&mut rng);
    for c in 0..crossing {
        layer[left[c]] = right[c];
        layer[right[c]] = left[c];
    }
    for rest in [&left[crossing..], &right[crossing..]] {
        for pair in rest.chunks(2) {
            if let [a, b] = *pair {
                layer[a] = b;
                layer[b] = a;
            }
        }
    }
    perms.push(layer);
    let graph = RegularGraph::new(n, perms)?;
    let witness: Vec<usize> = (0..s).collect();
    debug_assert!(expansion(&graph, &witness)? <= eta + 1e-12);
    Ok(SseInstance { graph, eta, delta, label: SseLabel::Yes, witness: Some(witness) })
}

pub const SUBSET_BUDGET: u64 = 50_000_000;

/// Visits every subset of `0..n` of size `1..=s` as an indicator vector.
pub fn for_each_small_set(n: usize, s: usize, mut f: impl FnMut(&[usize], &[bool])) -> Result<()> {
    let count: u64 = (1..=s.min(n)).map(|k| binomial(n, k)).sum();
    if count > SUBSET_BUDGET {
        return Err(Error::BudgetExceeded(format!("{count} subsets")));
    }
    let mut ind = vec![false; n];
    let mut cur = Vec::with_capacity(s);
    fn rec(start: usize, n: usize, s: usize, cur: &mut Vec<usize>, ind: &mut [bool], f: &mut impl FnMut(&[usize], &[bool])) {
        for v in start..n {
            cur.push(v);
            ind[v] = true;
            f(cur, ind);
            if cur.len() < s {
                rec(v + 1, n, s, cur, ind, f);
            }
            ind[v] = false;
            cur.pop();
        }
    }
    rec(0, n, s, &mut cur, &mut ind, &mut f);
    Ok(())
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul((n - i) as u64) / (i as u64 + 1))
}

/// Minimum expansion over all sets of size `1..=s`, with a minimizer.
pub fn min_small_set_expansion(g: &RegularGraph, s: usize) -> Result<(f64, Vec<usize>)> {
    let mut best = (f64::INFINITY, Vec::new());
    for_each_small_set(g.n, s, |set, ind| {
        let phi = g.cut(ind) as f64 / (g.d() * set.len()) as f64;
        if phi < best.0 {
            best = (phi, set.to_vec());
        }
    })?;
    Ok(best)
}

/// Rejection-samples simple random regular graphs until every set of size
/// at most `⌊δn⌋` expands by at least `1−η`.
pub fn planted_sse_no(n: usize, d: usize, delta: f64, eta: f64, seed: u64) -> Result<SseInstance> {
    let s = (delta * n as f64 + 1e-9).floor() as usize;
    let mut rng = seeded(seed);
    let mut best = 0.0f64;
    for _ in 0..200 {
        let g = random_simple_regular(n, d, &mut rng)?;
        let (phi, _) = min_small_set_expansion(&g, s)?;
        if phi >= 1.0 - eta - 1e-12 {
            return Ok(SseInstance { graph: g, eta, delta, label: SseLabel::No, witness: None });
        }
        best = best.max(phi);
    }
    Err(Error::Infeasible(format!(
        "no sampled graph reached small-set expansion {} (best {best}); raise eta or lower delta",
        1.0 - eta
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticMethod {
    SupportEigen,
    Dyadic,
    Ascent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticReport {
    pub value: f64,
    pub attained_by: AnalyticMethod,
    pub support_eigen: Option<f64>,
    pub dyadic: Option<f64>,
    pub ascent: f64,
    pub support_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticOptions {
    pub restarts: usize,
    pub iterations: usize,
    pub step: f64,
    /// Largest number of supports (resp. dyadic vectors) enumerated exactly.
    pub support_budget: u64,
    pub dyadic_budget: u64,
    pub dyadic_levels: u32,
    pub seed: u64,
}

impl Default for AnalyticOptions {
    fn default() -> Self {
        Self {
            restarts: 200,
            iterations: 500,
            step: 0.1,
            support_budget: 200_000,
            dyadic_budget: 5_000_000,
            dyadic_levels: 3,
            seed: 7,
        }
    }
}

/// Estimate of `max |⟨Av,v⟩|/d` over unit `v` supported on at most `⌊δn⌋` vertices.
pub fn analytic_sse_max(g: &RegularGraph, delta: f64, opts: &AnalyticOptions) -> AnalyticReport {
    let n = g.n;
    let s = ((delta * n as f64 + 1e-9).floor() as usize).min(n);
    let a = g.adjacency_matrix();
    let d = g.d() as f64;
    if s == 0 {
        return AnalyticReport {
            value: 0.0,
            attained_by: AnalyticMethod::SupportEigen,
            support_eigen: Some(0.0),
            dyadic: None,
            ascent: 0.0,
            support_size: 0,
        };
    }
    let support_eigen = (binomial(n, s) <= opts.support_budget).then(|| support_eigen_max(&a, s) / d);
    let dyadic_count: u64 = (1..=s).map(|k| binomial(n, k).saturating_mul((2 * opts.dyadic_levels as u64).pow(k as u32))).sum();
    let dyadic = (n <= 10 && dyadic_count <= opts.dyadic_budget).then(|| dyadic_max_ratio(&a, s, opts.dyadic_levels) / d);
    let ascent = sparse_ascent(&a, s, opts) / d;
    let mut value = ascent;
    let mut attained_by = AnalyticMethod::Ascent;
    for (v, m) in [(dyadic, AnalyticMethod::Dyadic), (support_eigen, AnalyticMethod::SupportEigen)] {
        if let Some(v) = v {
            if v >= value - 1e-12 {
                value = value.max(v);
                attained_by = m;
            }
        }
    }
    AnalyticReport { value, attained_by, support_eigen, dyadic, ascent, support_size: s }
}

fn principal(a: &RMatrix, set: &[usize]) -> RMatrix {
    RMatrix::from_fn(set.len(), set.len(), |i, j| a[(set[i], set[j])])
}

/// Exact sparse maximum: by interlacing, supports of size exactly `s` suffice.
fn support_eigen_max(a: &RMatrix, s: usize) -> f64 {
    let n = a.nrows();
    let mut sets = Vec::new();
    for_each_small_set(n, s, |set, _| {
        if set.len() == s {
            sets.push(set.to_vec());
        }
    })
    .expect("budget checked by caller");
    sets.par_iter()
        .map(|set| {
            let (vals, _) = real_symmetric_eigen(&principal(a, set));
            vals[0].abs().max(vals[vals.len() - 1].abs())
        })
        .reduce(|| 0.0, f64::max)
}

/// Max of `|⟨Au,u⟩|/‖u‖²` over vectors with entries in `{0, ±2^{-i}}`.
fn dyadic_max_ratio(a: &RMatrix, s: usize, levels: u32) -> f64 {
    dyadic_scan(a, s, levels, |q, norm| q.abs() / norm)
}

fn dyadic_scan(a: &RMatrix, s: usize, levels: u32, score: impl Fn(f64, f64) -> f64 + Sync) -> f64 {
    let n = a.nrows();
    let values: Vec<f64> = (1..=levels).flat_map(|i| [0.5f64.powi(i as i32), -(0.5f64.powi(i as i32))]).collect();
    let mut sets = Vec::new();
    for_each_small_set(n, s, |set, _| sets.push(set.to_vec())).expect("budget checked by caller");
    sets.par_iter()
        .map(|set| {
            let sub = principal(a, set);
            let k = set.len();
            let mut digits = vec![0usize; k];
            let mut best = 0.0f64;
            // first entry fixed positive: u and −u give the same form
            loop {
                let u: Vec<f64> = digits.iter().map(|&t| values[t]).collect();
                if u[0] > 0.0 {
                    let norm: f64 = u.iter().map(|x| x * x).sum();
                    best = best.max(score(real_quad_form(&sub, &u), norm));
                }
                let mut pos = 0;
                loop {
                    if pos == k {
                        return best;
                    }
                    digits[pos] += 1;
                    if digits[pos] < values.len() {
                        break;
                    }
                    digits[pos] = 0;
                    pos += 1;
                }
            }
        })
        .reduce(|| 0.0, f64::max)
}

fn truncate_top(v: &mut [f64], s: usize) {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b)));
    for &i in &idx[s..] {
        v[i] = 0.0;
    }
}

fn normalize(v: &mut [f64]) -> bool {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    true
}

/// Truncated power iteration for both signs of the form.
fn sparse_ascent(a: &RMatrix, s: usize, opts: &AnalyticOptions) -> f64 {
    let n = a.nrows();
    let d = (0..n).map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(1.0, f64::max);
    (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = split(opts.seed, r as u64);
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
            truncate_top(&mut v, s);
            normalize(&mut v);
            let mut best = real_quad_form(a, &v).abs();
            for _ in 0..opts.iterations {
                let av: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[(i, j)] * v[j]).sum()).collect();
                let mut next: Vec<f64> = (0..n).map(|i| v[i] + opts.step * sign * av[i] / d).collect();
                truncate_top(&mut next, s);
                if !normalize(&mut next) {
                    break;
                }
                v = next;
                best = best.max(real_quad_form(a, &v).abs());
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// Checks `⟨A1_S, 1_T⟩ ≤ α d √(|S||T|)` for disjoint `S`, `T`.
pub fn flat_bound_check(g: &RegularGraph, s: &[usize], t: &[usize], alpha: f64) -> Result<bool> {
    let (is, it) = (indicator(g.n, s), indicator(g.n, t));
    if (0..g.n).any(|i| is[i] && it[i]) {
        return Err(Error::Overlapping);
    }
    let edges: usize = g.perms.iter().map(|p| (0..g.n).filter(|&i| is[i] && it[p[i]]).count()).sum();
    let (ns, nt) = (is.iter().filter(|&&b| b).count(), it.iter().filter(|&&b| b).count());
    Ok(edges as f64 <= alpha * g.d() as f64 * ((ns * nt) as f64).sqrt() + 1e-9)
}

/// Randomized rounding to signed powers of two: an entry with magnitude in
/// `(2^{k-1}, 2^k]` becomes `±2^k`, keeping its sign with probability `1−ηᵢ`
/// where `ηᵢ = (1 − |uᵢ|/2^k)/2`, so the mean is exact.
pub fn dyadic_round(u: &[f64], rng: &mut Rng) -> Result<Vec<f64>> {
    if u.iter().any(|x| x.abs() > 0.5 + 1e-15) {
        return Err(Error::Precondition("sup norm must be at most 1/2".into()));
    }
    Ok(u.iter()
        .map(|&x| {
            if x == 0.0 {
                return 0.0;
            }
            let m = 2f64.powi(x.abs().log2().ceil() as i32);
            let m = if m < x.abs() { 2.0 * m } else { m };
            let eta = (1.0 - x.abs() / m) / 2.0;
            let keep = rng.gen::<f64>() >= eta;
            x.signum() * m * if keep { 1.0 } else { -1.0 }
        })
        .collect())
}

/// Smallest α with `⟨A1_S, 1_T⟩ ≤ α d √(|S||T|)` over disjoint `S, T`,
/// `|S ∪ T| ≤ s`.
pub fn tightest_flat_alpha(a: &RMatrix, d: f64, s: usize) -> Result<f64> {
    let n = a.nrows();
    let mut best = 0.0f64;
    for_each_small_set(n, s, |set, _| {
        let k = set.len();
        if k < 2 {
            return;
        }
        // split the union into S (mask bits) and T (rest); S holds the first element
        for mask in 0..(1u32 << (k - 1)) {
            let mask = (mask << 1) | 1;
            if mask == (1 << k) - 1 {
                continue;
            }
            let mut e = 0.0;
            let (mut ns, mut nt) = (0usize, 0usize);
            for x in 0..k {
                if mask >> x & 1 == 1 {
                    ns += 1;
                    for y in 0..k {
                        if mask >> y & 1 == 0 {
                            e += a[(set[x], set[y])];
                        }
                    }
                } else {
                    nt += 1;
                }
            }
            best = best.max(e / (d * ((ns * nt) as f64).sqrt()));
        }
    })?;
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticAudit {
    pub alpha: f64,
    pub tightest_alpha: f64,
    pub max_ratio: f64,
    pub constant: f64,
    pub same_set_holds: bool,
    pub passed: bool,
}

pub const SPARSE_CONSTANT: f64 = 12.0;

/// Audits `|⟨Au,u⟩| ≤ K·α(log₂(1/α)+1)·d‖u‖²` over all dyadic vectors with
/// support at most `⌊δn⌋`, and `⟨A1_R,1_R⟩ ≤ 2αd|R|` over all small `R`.
pub fn quadratic_form_bound_audit(a: &RMatrix, d: f64, delta: f64, alpha: f64, levels: u32) -> Result<QuadraticAudit> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Precondition("matrix must be square".into()));
    }
    for i in 0..n {
        if a[(i, i)] != 0.0 {
            return Err(Error::Precondition(format!("diagonal entry {i} is nonzero")));
        }
        let mut row = 0.0;
        for j in 0..n {
            if a[(i, j)] < 0.0 || (a[(i, j)] - a[(j, i)]).abs() > 1e-12 {
                return Err(Error::Precondition("matrix must be symmetric and non-negative".into()));
            }
            row += a[(i, j)];
        }
        if row > d + 1e-9 {
            return Err(Error::Precondition(format!("row {i} sums to {row} > {d}")));
        }
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha}")));
    }
    if n > 12 {
        return Err(Error::BudgetExceeded("dyadic audit needs n <= 12".into()));
    }
    let s = ((delta * n as f64 + 1e-9).floor() as usize).min(n);
    let tightest = tightest_flat_alpha(a, d, s)?;
    if tightest > alpha + 1e-12 {
        return Err(Error::Precondition(format!("flat bound fails: needs alpha >= {tightest}")));
    }
    let scale = alpha * ((1.0 / alpha).log2() + 1.0) * d;
    let max_ratio = dyadic_scan(a, s, levels, |q, norm| q.abs() / (scale * norm));
    let mut same_set_holds = true;
    for_each_small_set(n, s, |set, _| {
        let e: f64 = set.iter().flat_map(|&i| set.iter().map(move |&j| (i, j))).map(|(i, j)| a[(i, j)]).sum();
        same_set_holds &= e <= 2.0 * alpha * d * set.len() as f64 + 1e-9;
    })?;
    Ok(QuadraticAudit {
        alpha,
        tightest_alpha: tightest,
        max_ratio,
        constant: SPARSE_CONSTANT,
        same_set_holds,
        passed: same_set_holds && max_ratio <= SPARSE_CONSTANT,
    })
}
