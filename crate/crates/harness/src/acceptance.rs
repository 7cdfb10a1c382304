//! Acceptance criteria 1–11. Every tolerance and time budget is a constant
//! below; a criterion passes only if its checks hold within its budget.

use std::time::{Duration, Instant};

use qmaplus::complexity::product_test_bound_audit;
use qmaplus::graphs::{circulant, cheeger, planted_sse_yes, quadratic_form_bound_audit, tightest_flat_alpha, CheegerMethod};
use qmaplus::linalg::sym_projector;
use qmaplus::pcp::hadamard::{accept_probability, HadamardProof, PackedSystem, Var};
use qmaplus::pcp::primes::prime_in_interval;
use qmaplus::pcp::quad::{circuit_to_quadsystem, honest_assignment, random_formula};
use qmaplus::property::{
    product_accept_prob, product_test, sparsity_test_i, subset_zero_probability, swap_test, symmetry_test, validity_test,
    zero_outcome_probability, TestMode, TiltedFamily,
};
use qmaplus::protocols::csp::{
    constraints_test, csp_honest_proofs, csp_regularize, default_theta, pair_branches, CspToyInstance,
};
use qmaplus::protocols::sse::expansion_test;
use qmaplus::protocols::ug::{
    for_each_labeling, labeling_test, minority_count, regularize_ug, ug_honest_proofs, ug_protocol, unequal_edges, UgConfig,
};
use qmaplus::qstate::{
    dft_value_register, measure_distribution, overlap, LabeledState, RegisterSpec, StateVector, SubsetState, C64,
};
use qmaplus::rng::split;
use rand::Rng;

use crate::config::{Experiment, ExperimentConfig, ProverMode};
use crate::error::Result;
use crate::experiments::{hadamard_index_mismatches, line_index_mismatches, run, sampled_acceptance};
use crate::fixtures;

pub const SWAP_TOL: f64 = 1e-12;
pub const SWAP_PAIRS: usize = 1000;
pub const SWAP_MAX_DIM: usize = 16;
pub const VALIDITY_TOL: f64 = 1e-12;
pub const VALIDITY_MAX_N: usize = 6;
pub const VALIDITY_MAX_Q: usize = 3;
pub const SOUNDNESS_RESTARTS: usize = 100;
pub const SPARSE_CONSTANT: f64 = 12.0;
pub const AUDIT_DELTA: f64 = 0.3;
pub const AUDIT_LEVELS: u32 = 3;
pub const AUDIT_ALPHA_FLOOR: f64 = 0.05;
pub const HONEST_FLOOR: f64 = 0.99;
pub const UG_TOL: f64 = 1e-12;
pub const REG_D: usize = 4;
pub const CSP_REJECT_TOL: f64 = 1e-6;
pub const CSP_KEPT_TOL: f64 = 1e-12;
pub const GAP_TOL: f64 = 1e-9;
pub const PRODUCT_TOL: f64 = 1e-12;
pub const MC_TRIALS: usize = 10_000;
pub const MC_SIGMAS: f64 = 4.0;

pub struct Verdict {
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub budget: Duration,
    pub check: fn() -> Result<Verdict>,
}

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {} ({:.1}s of {}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

pub fn criteria() -> Vec<Criterion> {
    let c = |id, title, secs, check| Criterion { id, title, budget: Duration::from_secs(secs), check };
    vec![
        c(1, "swap test exactness", 10, swap_exactness),
        c(2, "validity formula", 30, validity_formula),
        c(3, "SSE completeness", 60, sse_completeness),
        c(4, "SSE soundness", 600, sse_soundness),
        c(5, "sparse quadratic-form audit", 300, quadratic_audit),
        c(6, "UG completeness", 60, ug_completeness),
        c(7, "UG regularization", 300, ug_regularization),
        c(8, "CSP constraints test", 120, csp_constraints),
        c(9, "phase and product numerics", 300, numerics),
        c(10, "PCP double explicitness", 300, pcp_explicitness),
        c(11, "Monte Carlo consistency", 600, monte_carlo),
    ]
}

pub fn run_criterion(c: &Criterion) -> CriterionOutcome {
    let start = Instant::now();
    let verdict = (c.check)().unwrap_or_else(|e| Verdict::new(false, format!("error: {e}")));
    let elapsed = start.elapsed();
    let in_time = elapsed <= c.budget;
    let detail = if in_time { verdict.detail } else { format!("{} (over budget)", verdict.detail) };
    CriterionOutcome { id: c.id, title: c.title, passed: verdict.passed && in_time, detail, elapsed, budget: c.budget }
}

pub fn run_all() -> Vec<CriterionOutcome> {
    criteria().iter().map(run_criterion).collect()
}

fn haar(dim: usize, seed: u64, stream: u64) -> StateVector {
    StateVector::haar(dim, &mut split(seed, stream))
}

/// `tr[Π_sym (ρ_a ⊗ ρ_b)]` summed entrywise.
fn symmetric_trace(pi: &qmaplus::linalg::CMatrix, a: &StateVector, b: &StateVector) -> f64 {
    let d = a.dim();
    let rho = |i: usize, j: usize| {
        let (i1, i2, j1, j2) = (i / d, i % d, j / d, j % d);
        a.amps()[i1] * a.amps()[j1].conj() * b.amps()[i2] * b.amps()[j2].conj()
    };
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d * d {
        for j in 0..d * d {
            acc += pi[(i, j)] * rho(j, i);
        }
    }
    acc.re
}

fn swap_exactness() -> Result<Verdict> {
    let projectors: Vec<_> = (0..=SWAP_MAX_DIM).map(|d| if d >= 2 { Some(sym_projector(d)) } else { None }).collect();
    let mut worst: f64 = 0.0;
    for i in 0..SWAP_PAIRS {
        let d = 2 + i % (SWAP_MAX_DIM - 1);
        let (a, b) = (haar(d, 1, 2 * i as u64), haar(d, 1, 2 * i as u64 + 1));
        let exact = swap_test(&a, &b, TestMode::Exact)?;
        let formula = 0.5 + overlap(&a, &b)?.norm_sqr() / 2.0;
        let oracle = symmetric_trace(projectors[d].as_ref().expect("d ≥ 2"), &a, &b);
        worst = worst.max((exact - formula).abs()).max((exact - oracle).abs());
    }
    Ok(Verdict::new(worst <= SWAP_TOL, format!("{SWAP_PAIRS} pairs, max deviation {worst:.2e}")))
}

fn validity_formula() -> Result<Verdict> {
    let (mut worst, mut states): (f64, u64) = (0.0, 0);
    for n in 1..=VALIDITY_MAX_N {
        for q in 2..=VALIDITY_MAX_Q {
            let spec = RegisterSpec::new(vec![n, q], 1)?;
            for mask in 1u64..1 << (n * q) {
                let set: Vec<usize> = (0..n * q).filter(|i| mask >> i & 1 == 1).collect();
                let st = LabeledState::new(n, q, SubsetState::new(n * q, set.clone())?.to_state())?;
                let oracle = measure_distribution(&dft_value_register(&st)?, &spec)?[0];
                worst = worst
                    .max((subset_zero_probability(q, &set) - oracle).abs())
                    .max((zero_outcome_probability(&st) - oracle).abs());
                states += 1;
            }
        }
    }
    Ok(Verdict::new(worst <= VALIDITY_TOL, format!("{states} subset states, max deviation {worst:.2e}")))
}

fn record_summary(records: &[crate::ResultRecord]) -> (bool, Vec<String>) {
    let ok = records.iter().all(|r| r.passed());
    let failed = records.iter().flat_map(|r| r.failed_checks().map(move |c| format!("{}: {} = {}", r.config.id, c.name, c.value)));
    (ok, failed.collect())
}

fn sse_completeness() -> Result<Verdict> {
    let mut records = Vec::new();
    let mut worst_margin = f64::INFINITY;
    for (i, (n, d, delta, eta)) in [(16, 4, 0.25, 0.1), (32, 6, 0.25, 0.05), (64, 6, 0.125, 0.1), (64, 5, 0.25, 0.05)].into_iter().enumerate() {
        let mut c = ExperimentConfig::new(Experiment::SseCompleteness);
        c.id = format!("sse-yes-{n}-{d}");
        c.seed = i as u64 + 1;
        c.params.n = Some(n);
        c.params.d = Some(d);
        c.params.delta = Some(delta);
        c.params.eta = Some(eta);
        let r = run(&c)?;
        worst_margin = worst_margin.min(r.overall.unwrap_or(0.0) - (1.0 - eta));
        records.push(r);
    }
    let (ok, failed) = record_summary(&records);
    Ok(Verdict::new(ok, format!("{} instances, min(acceptance − (1−η)) = {worst_margin:.4} {failed:?}", records.len())))
}

fn sse_soundness() -> Result<Verdict> {
    let mut parts = Vec::new();
    let mut ok = true;
    for (n, d, delta, eta, seed) in [(16, 6, 0.125, 0.2, 2), (12, 6, 0.25, 0.35, 1)] {
        let mut c = ExperimentConfig::new(Experiment::SseSoundness);
        c.id = format!("sse-no-{n}-{d}");
        c.seed = seed;
        c.prover = ProverMode::Adversarial { restarts: SOUNDNESS_RESTARTS };
        c.params.n = Some(n);
        c.params.d = Some(d);
        c.params.delta = Some(delta);
        c.params.eta = Some(eta);
        let r = run(&c)?;
        ok &= r.passed() && r.oracle.is_some();
        let get = |k: &str| r.data[k].as_f64().unwrap_or(f64::NAN);
        parts.push(format!(
            "n={n}: expansion {:.4} vs analytic {:.4}, overall {:.4}, margin over 5/6 {:+.4}, oracle gap {:.1e}",
            get("expansion_max"),
            get("analytic"),
            r.overall.unwrap_or(f64::NAN),
            get("margin"),
            r.oracle.as_ref().map_or(f64::NAN, |o| o.gap)
        ));
        for f in r.failed_checks() {
            parts.push(format!("failed {}", f.name));
        }
    }
    Ok(Verdict::new(ok, parts.join("; ")))
}

fn quadratic_audit() -> Result<Verdict> {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let graphs = fixtures::audit_graphs()?;
    for (_, g) in &graphs {
        let a = g.adjacency_matrix();
        let d = g.d() as f64;
        let s = (AUDIT_DELTA * g.n() as f64).floor() as usize;
        let alpha = tightest_flat_alpha(&a, d, s)?.max(AUDIT_ALPHA_FLOOR);
        let audit = quadratic_form_bound_audit(&a, d, AUDIT_DELTA, alpha, AUDIT_LEVELS)?;
        ok &= audit.passed && audit.same_set_holds && audit.max_ratio <= SPARSE_CONSTANT;
        worst = worst.max(audit.max_ratio);
    }
    Ok(Verdict::new(ok, format!("{} graphs, largest measured constant {worst:.3} (limit {SPARSE_CONSTANT})", graphs.len())))
}

fn ug_completeness() -> Result<Verdict> {
    let mut min_sub: f64 = 1.0;
    let mut ok = true;
    for (n, q, s) in [(6, 3, 1), (9, 3, 1), (12, 3, 2), (8, 2, 1), (12, 2, 0)] {
        let inst = fixtures::shift_cycle(n, q, s)?;
        let (val, labels) = inst.best_value()?;
        ok &= val == 1.0;
        let config = UgConfig { nu: Some(0.1), ..UgConfig::new(0.05, 0.05) };
        let (psi, gamma) = ug_honest_proofs(&inst, &labels, config.k)?;
        let out = ug_protocol(&inst, &psi, &gamma, &config, TestMode::Exact)?;
        for st in &out.subtests {
            min_sub = min_sub.min(st.acceptance);
        }
    }
    ok &= min_sub >= HONEST_FLOOR;
    let mut records = Vec::new();
    for (n, q) in [(8, 2), (10, 2), (12, 2), (8, 3), (10, 3)] {
        let mut c = ExperimentConfig::new(Experiment::UgCompleteness);
        c.id = format!("ug-frustrated-{n}-{q}");
        c.params.n = Some(n);
        c.params.q = Some(q);
        records.push(run(&c)?);
    }
    let (rec_ok, failed) = record_summary(&records);
    let slack = records
        .iter()
        .map(|r| r.data["per_pair"].as_f64().unwrap_or(0.0) - r.resolved["delta"].as_f64().map_or(f64::NAN, |d| 1.0 - d))
        .fold(f64::INFINITY, f64::min);
    Ok(Verdict::new(
        ok && rec_ok && slack >= -UG_TOL,
        format!("satisfiable: min subtest {min_sub:.4}; value-(1−δ): min(per-pair − (1−δ)) = {slack:.2e} {failed:?}"),
    ))
}

fn ug_regularization() -> Result<Verdict> {
    let mut ok = true;
    let mut lines = Vec::new();
    for (i, g) in fixtures::irregular_games().iter().enumerate() {
        let reg = regularize_ug(g, REG_D, 3)?;
        let edges_ok = (reg.instance.edge_count() - (g.edges.len() * (REG_D + 1)) as f64).abs() < 1e-12;
        let val = g.best_value();
        let (val2, _) = reg.instance.best_value()?;
        let dp1 = (REG_D + 1) as f64;
        let high = val < 0.5 || val2 >= 1.0 - 1.0 / (2.0 * dp1) - UG_TOL;
        let low = val2 <= 1.0 - (1.0 - val) / dp1 + UG_TOL;
        ok &= edges_ok && high && low && reg.cloud_cheeger.iter().all(|&c| c >= 2.0);
        lines.push(format!("#{i} val {val:.3}→{val2:.3}"));
    }
    let k5 = fixtures::complete(5)?;
    let cheeger_ok = cheeger(&k5, CheegerMethod::Exhaustive)?.certifies(2.0);
    let mut minority_ok = true;
    for q in 2..=3 {
        for_each_labeling(5, q, |l| minority_ok &= unequal_edges(&k5, l) >= minority_count(l, q) as f64);
    }
    ok &= cheeger_ok && minority_ok;
    Ok(Verdict::new(ok, format!("{}; K5 minority lemma {}", lines.join(", "), if minority_ok { "holds" } else { "fails" })))
}

fn csp_constraints() -> Result<Verdict> {
    let mut min_kept: f64 = 1.0;
    for (base, x) in [(fixtures::csp_parity()?, fixtures::CSP_PARITY_SOLUTION.to_vec()), (fixtures::csp_ring(4, false)?, vec![0; 4])] {
        let reg = csp_regularize(&base, REG_D, 5)?;
        let (psi, _) = csp_honest_proofs(&reg, &x, 2)?;
        min_kept = min_kept.min(pair_branches(&reg, psi.get(0), psi.get(1))?.kept_acceptance());
    }
    let unsat: CspToyInstance = fixtures::csp_ring(4, true)?;
    let (delta, _) = unsat.best_value()?;
    let reg = csp_regularize(&unsat, REG_D, 5)?;
    let bound = (1.0 - delta) / (4 * REG_D + 2) as f64;
    let mut min_reject = f64::INFINITY;
    let mut err = None;
    for_each_labeling(reg.new_variables().len(), unsat.sigma(), |y| {
        let res = reg.encode(&reg.tuples_from_new(y)).and_then(|psi| pair_branches(&reg, &psi, &psi));
        match res {
            Ok(br) => min_reject = min_reject.min(1.0 - br.kept_acceptance()),
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e.into());
    }
    let ok = (min_kept - 1.0).abs() <= CSP_KEPT_TOL && min_reject >= bound - CSP_REJECT_TOL;
    Ok(Verdict::new(
        ok,
        format!("honest kept acceptance {min_kept:.12}; val {delta} instance: min rejection {min_reject:.4} vs (1−δ)/(4d+2) = {bound:.4}"),
    ))
}

fn numerics() -> Result<Verdict> {
    let gap = run(&ExperimentConfig::new(Experiment::VerifyGapMax))?;
    let bounds = run(&ExperimentConfig::new(Experiment::VerifyBounds))?;
    let mut violations = 0;
    for (dims, samples) in [(vec![2, 2], 500), (vec![2, 3], 300), (vec![3, 3], 200)] {
        violations += product_test_bound_audit(&dims, samples, 7)?.violations;
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let epr = StateVector::from_real(&[h, 0.0, 0.0, h])?;
    let pt = product_accept_prob(&epr, &epr, &[2, 2])?;
    let gap_dev = (gap.overall.unwrap_or(f64::NAN) - 7.0 / 9.0).abs();
    let ok = gap.passed() && bounds.passed() && violations == 0 && gap_dev <= GAP_TOL && (pt - 0.75).abs() <= PRODUCT_TOL;
    Ok(Verdict::new(
        ok,
        format!(
            "|max f − 7/9| = {gap_dev:.1e}; four-s max ratio {:.3}; product violations {violations}/1000; PT(EPR) = {pt:.12}",
            bounds.data["max_ratio"].as_f64().unwrap_or(f64::NAN)
        ),
    ))
}

fn csp_index_mismatches(c: &CspToyInstance) -> usize {
    let mut bad = 0;
    for j in 0..c.r() {
        for i in 0..c.n() {
            let queried = c.adj_c(j).contains(&i);
            let forward = c.adj_glo_c(j, i).map(|g| c.adj_loc_c(j, g) == i);
            let backward = c.adj_glo_v(i, j).map(|g| c.adj_loc_v(i, g) == j);
            let ok = if queried { forward == Some(true) && backward == Some(true) } else { forward.is_none() && backward.is_none() };
            bad += (!ok) as usize;
        }
    }
    let tau = c.uniformity();
    for i in 0..c.n() {
        for i2 in 0..c.n() {
            bad += (tau[i] == tau[i2] && c.adj_v(i).len() != c.adj_v(i2).len()) as usize;
        }
    }
    bad
}

fn pcp_explicitness() -> Result<Verdict> {
    let (mut lines, mut line_bad) = (0, 0);
    for p in [2, 3, 5, 7] {
        for n in 1..=2 {
            let (c, b) = line_index_mismatches(p, n)?;
            lines += c;
            line_bad += b;
        }
    }
    let (strings, had_bad) = hadamard_index_mismatches(&PackedSystem::new(&fixtures::tiny_system())?)?;
    let csp_bad: usize = [fixtures::csp_ring(4, false)?, fixtures::csp_ring(5, true)?, fixtures::csp_parity()?]
        .iter()
        .map(csp_index_mismatches)
        .sum();
    let circuit = fixtures::and_gate();
    let sys = PackedSystem::new(&circuit_to_quadsystem(&circuit)?)?;
    let honest = HadamardProof::honest(&honest_assignment(&circuit, &[true, true]))?;
    let accept = accept_probability(&honest, &sys, &[true, true])?.accept;
    let mut rank_bad = 0;
    for seed in 0..50u64 {
        let mut c = random_formula(2 + (seed % 8) as usize, 3 + (seed % 6) as usize, seed);
        if seed % 2 == 0 {
            c.fixed = vec![(0, seed % 4 == 0)];
        }
        let q = circuit_to_quadsystem(&c)?;
        rank_bad += (q.rank() != q.len()) as usize;
    }
    let prime = prime_in_interval(100)?;
    let ok = line_bad == 0 && had_bad == 0 && csp_bad == 0 && accept == 1.0 && rank_bad == 0 && prime == 97;
    Ok(Verdict::new(
        ok,
        format!(
            "{lines} line indices, {strings} random strings, CSP maps {} mismatches; honest acceptance {accept}; rank-deficient {rank_bad}/50; prime {prime}",
            csp_bad
        ),
    ))
}

struct McCase {
    name: String,
    exact: f64,
    sampled: f64,
    trials: usize,
}

impl McCase {
    fn sigmas(&self) -> f64 {
        let sd = (self.exact * (1.0 - self.exact) / self.trials as f64).sqrt();
        if sd == 0.0 {
            if (self.sampled - self.exact).abs() < 1e-12 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.sampled - self.exact).abs() / sd
        }
    }
}

fn mc(seed: u64) -> TestMode {
    TestMode::MonteCarlo { seed, trials: MC_TRIALS }
}

fn nonneg(dim: usize, rng: &mut qmaplus::rng::Rng) -> Result<StateVector> {
    let xs: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() + 1e-3).collect();
    Ok(StateVector::normalized(xs.into_iter().map(|x| C64::new(x, 0.0)).collect())?)
}

fn monte_carlo_cases() -> Result<Vec<McCase>> {
    let mut cases = Vec::new();
    let mut push = |name: String, exact: f64, sampled: f64, trials: usize| cases.push(McCase { name, exact, sampled, trials });
    for (k, d) in [2usize, 4, 8, 16].into_iter().enumerate() {
        let (a, b) = (haar(d, 11, 2 * k as u64), haar(d, 11, 2 * k as u64 + 1));
        push(format!("swap d={d}"), swap_test(&a, &b, TestMode::Exact)?, swap_test(&a, &b, mc(k as u64))?, MC_TRIALS);
    }
    for (k, dims) in [vec![2, 2], vec![2, 3], vec![3, 3]].into_iter().enumerate() {
        let a = haar(dims.iter().product(), 12, k as u64);
        let exact = product_test(&a, &a, &dims, TestMode::Exact)?;
        push(format!("product {dims:?}"), exact, product_test(&a, &a, &dims, mc(20 + k as u64))?, MC_TRIALS);
    }
    let fam = TiltedFamily::new((0..6).map(|i| haar(3, 13, i)).collect())?;
    push("symmetry".into(), symmetry_test(&fam, TestMode::Exact)?.acceptance, symmetry_test(&fam, mc(30))?.acceptance, MC_TRIALS);
    let mut rng = split(14, 0);
    let psi = TiltedFamily::new((0..8).map(|_| nonneg(6, &mut rng)).collect::<Result<_>>()?)?;
    let phi = TiltedFamily::new((0..8).map(|_| nonneg(6, &mut rng)).collect::<Result<_>>()?)?;
    let (ex, sa) = (sparsity_test_i(&psi, &phi, 0.01, TestMode::Exact)?, sparsity_test_i(&psi, &phi, 0.01, mc(31))?);
    push("sparsity α".into(), ex.alpha, sa.alpha, MC_TRIALS);
    let labeled: Vec<LabeledState> = (0..4).map(|_| LabeledState::new(3, 3, nonneg(9, &mut rng)?).map_err(Into::into)).collect::<Result<_>>()?;
    push("validity".into(), validity_test(&labeled, 0.1, TestMode::Exact)?.alpha, validity_test(&labeled, 0.1, mc(32))?.alpha, MC_TRIALS);
    let subsets: Vec<LabeledState> = [vec![0, 1, 3], vec![1, 2, 4, 5], vec![0, 2, 3, 5]]
        .into_iter()
        .map(|set| Ok(LabeledState::new(3, 2, SubsetState::new(6, set)?.to_state())?))
        .collect::<Result<_>>()?;
    push("validity subsets".into(), validity_test(&subsets, 0.1, TestMode::Exact)?.alpha, validity_test(&subsets, 0.1, mc(39))?.alpha, MC_TRIALS);
    let cyc = circulant(6, 2);
    let (a, b) = (haar(6, 15, 0), haar(6, 15, 1));
    push("expansion cycle".into(), expansion_test(&a, &b, &cyc, TestMode::Exact)?, expansion_test(&a, &b, &cyc, mc(33))?, MC_TRIALS);
    let yes = planted_sse_yes(16, 4, 0.25, 0.1, 1)?;
    let (a, b) = (nonneg(16, &mut rng)?, nonneg(16, &mut rng)?);
    push(
        "expansion planted".into(),
        expansion_test(&a, &b, &yes.graph, TestMode::Exact)?,
        expansion_test(&a, &b, &yes.graph, mc(34))?,
        MC_TRIALS,
    );
    let fr = fixtures::frustrated_cycle(8, 2)?;
    let (_, labels) = fr.best_value()?;
    let (hp, _) = ug_honest_proofs(&fr, &labels, 4)?;
    let (h0, h1) = hp.halves()?;
    let theta = UgConfig::new(0.125, 0.05).theta();
    push("labeling honest".into(), labeling_test(h0, h1, &fr, theta, TestMode::Exact)?.fraction, labeling_test(h0, h1, &fr, theta, mc(35))?.fraction, MC_TRIALS);
    let sc = fixtures::shift_cycle(5, 3, 1)?;
    let rand_states: Vec<StateVector> = (0..4).map(|_| nonneg(15, &mut rng)).collect::<Result<_>>()?;
    let (r0, r1) = rand_states.split_at(2);
    push("labeling random".into(), labeling_test(r0, r1, &sc, theta, TestMode::Exact)?.fraction, labeling_test(r0, r1, &sc, theta, mc(36))?.fraction, MC_TRIALS);
    let ring = fixtures::csp_ring(4, true)?;
    let reg = csp_regularize(&ring, REG_D, 5)?;
    let y: Vec<usize> = (0..reg.new_variables().len()).map(|i| i % 2).collect();
    let enc = reg.encode(&reg.tuples_from_new(&y))?;
    let fam = vec![enc; 4];
    let th = default_theta(0.75, reg.d);
    let ex = constraints_test(&fam, &fam, &reg, th, Some(1.0), TestMode::Exact)?;
    let sa = constraints_test(&fam, &fam, &reg, th, Some(1.0), mc(37))?;
    push("constraints keep".into(), ex.keep, sa.keep, MC_TRIALS);
    push("constraints kept acceptance".into(), ex.fraction, sa.fraction, sa.kept);
    let parity = csp_regularize(&fixtures::csp_parity()?, REG_D, 5)?;
    let (hp, _) = csp_honest_proofs(&parity, &fixtures::CSP_PARITY_SOLUTION, 2)?;
    let (p0, p1) = hp.halves()?;
    let ex = constraints_test(p0, p1, &parity, th, Some(0.5), TestMode::Exact)?;
    push("constraints honest keep".into(), ex.keep, constraints_test(p0, p1, &parity, th, Some(0.5), mc(38))?.keep, MC_TRIALS);
    let circuit = fixtures::and_gate();
    let sys = PackedSystem::new(&circuit_to_quadsystem(&circuit)?)?;
    let x = [true, true];
    let honest = HadamardProof::honest(&honest_assignment(&circuit, &x))?;
    for (k, v) in [Var::Y(0b101), Var::Z(0b000_011_000)].into_iter().enumerate() {
        let mut p = honest.clone();
        p.flip(v);
        let exact = accept_probability(&p, &sys, &x)?.accept;
        push(format!("hadamard flip {v:?}"), exact, sampled_acceptance(&p, &sys, &x, 40 + k as u64, MC_TRIALS)?, MC_TRIALS);
    }
    Ok(cases)
}

fn monte_carlo() -> Result<Verdict> {
    let cases = monte_carlo_cases()?;
    let worst = cases.iter().map(|c| (c.sigmas(), c.name.as_str())).fold((0.0, ""), |a, b| if b.0 > a.0 { b } else { a });
    let ok = cases.len() == 20 && worst.0 <= MC_SIGMAS;
    Ok(Verdict::new(ok, format!("{} configs at {MC_TRIALS} trials, worst {:.2}σ ({})", cases.len(), worst.0, worst.1)))
}
