//! Small-set expansion protocol.

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{indicator, ProtocolOutcome};
use crate::error::{Error, Result};
use crate::graphs::{RegularGraph, SseInstance};
use crate::property::{bernoulli, sparsity_test_i, swap_accept_prob, symmetry_test, TestMode, TiltedFamily};
use crate::qstate::{check_dim, SubsetState};
use crate::rng::split;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SseConfig {
    pub eta: f64,
    pub delta: f64,
    pub eps: f64,
    /// Half the family size.
    pub k: usize,
}

impl SseConfig {
    pub fn new(eta: f64, delta: f64) -> Self {
        Self { eta, delta, eps: 0.01, k: 16 }
    }
}

pub fn sse_honest_proofs(instance: &SseInstance, k: usize) -> Result<(TiltedFamily, TiltedFamily)> {
    let witness = instance
        .witness
        .as_ref()
        .ok_or_else(|| Error::Precondition("instance has no witness set".into()))?;
    let s = SubsetState::new(instance.graph.n(), witness.clone())?;
    Ok((TiltedFamily::copies(&s.to_state(), 2 * k)?, TiltedFamily::copies(&s.complement()?.to_state(), 2 * k)?))
}

/// `E_r[½ + |⟨P_r ψ1, ψ2⟩|²/2]`.
pub fn expansion_accept_prob(psi1: &crate::qstate::StateVector, psi2: &crate::qstate::StateVector, g: &RegularGraph) -> Result<f64> {
    check_dim(g.n(), psi1.dim())?;
    check_dim(g.n(), psi2.dim())?;
    let total: f64 = g
        .perms()
        .iter()
        .map(|p| swap_accept_prob(&psi1.permuted(p).expect("dims checked"), psi2).expect("dims checked"))
        .sum();
    Ok(total / g.d() as f64)
}

pub fn expansion_test(
    psi1: &crate::qstate::StateVector,
    psi2: &crate::qstate::StateVector,
    g: &RegularGraph,
    mode: TestMode,
) -> Result<f64> {
    match mode {
        TestMode::Exact => expansion_accept_prob(psi1, psi2, g),
        TestMode::MonteCarlo { seed, trials } => {
            check_dim(g.n(), psi1.dim())?;
            check_dim(g.n(), psi2.dim())?;
            let probs: Vec<f64> =
                g.perms().iter().map(|p| swap_accept_prob(&psi1.permuted(p).unwrap(), psi2).unwrap()).collect();
            let mut rng = split(seed, 40);
            let hits = (0..trials).filter(|_| bernoulli(probs[rng.gen_range(0..probs.len())], &mut rng)).count();
            Ok(hits as f64 / trials.max(1) as f64)
        }
    }
}

/// Expansion test on two distinct uniformly random members of the family.
fn expansion_on_family(psi: &TiltedFamily, g: &RegularGraph, mode: TestMode) -> Result<f64> {
    let m = psi.len();
    if m < 2 {
        return Err(Error::Precondition("need two members".into()));
    }
    let pair_prob = |i: usize, j: usize| expansion_accept_prob(psi.get(i), psi.get(j), g);
    match mode {
        TestMode::Exact => {
            let mut acc = 0.0;
            for i in 0..m {
                for j in 0..m {
                    if i != j {
                        acc += pair_prob(i, j)?;
                    }
                }
            }
            Ok(acc / (m * (m - 1)) as f64)
        }
        TestMode::MonteCarlo { seed, trials } => {
            let mut rng = split(seed, 41);
            let mut hits = 0usize;
            for _ in 0..trials {
                let i = rng.gen_range(0..m);
                let j = (i + 1 + rng.gen_range(0..m - 1)) % m;
                let r = rng.gen_range(0..g.d());
                let p = swap_accept_prob(&psi.get(i).permuted(g.perm(r))?, psi.get(j))?;
                hits += bernoulli(p, &mut rng) as usize;
            }
            Ok(hits as f64 / trials.max(1) as f64)
        }
    }
}

pub fn sse_protocol(
    graph: &RegularGraph,
    psi: &TiltedFamily,
    phi: &TiltedFamily,
    config: &SseConfig,
    mode: TestMode,
) -> Result<ProtocolOutcome> {
    if psi.len() != phi.len() {
        return Err(Error::FamilySizeMismatch(psi.len(), phi.len()));
    }
    check_dim(graph.n(), psi.dim())?;
    let sym_psi = symmetry_test(psi, mode.substream(1))?;
    let sym_phi = symmetry_test(phi, mode.substream(2))?;
    let sparsity = sparsity_test_i(psi, phi, config.eps, mode.substream(3))?;
    let rider = sparsity.sparsity() <= (1.0 + config.eta) * config.delta + 1e-12;
    let expansion = expansion_on_family(psi, graph, mode.substream(4))?;
    Ok(ProtocolOutcome::from_menu(
        "sse",
        mode,
        vec![
            (
                "symmetry",
                sym_psi.acceptance * sym_phi.acceptance,
                json!({"psi": sym_psi.acceptance, "phi": sym_phi.acceptance, "matching": sym_psi.matching}),
            ),
            ("sparsity", indicator(sparsity.accept && rider), json!({"outcome": sparsity, "rider_ok": rider})),
            ("expansion", expansion, json!({})),
        ],
    ))
}
