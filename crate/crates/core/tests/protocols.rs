mod common;

use common::haar;
use qmaplus::graphs::{circulant, cheeger, decompose_into_permutations, planted_sse_yes, CheegerMethod, RegularGraph};
use qmaplus::property::{sparsity_test_i, sparsity_test_ii, validity_test, TestMode, TiltedFamily};
use qmaplus::protocols::csp::*;
use qmaplus::protocols::sse::*;
use qmaplus::protocols::ug::*;
use qmaplus::protocols::ProtocolOutcome;
use qmaplus::qstate::{overlap, LabeledState, StateVector, SubsetState};
use qmaplus::graphs::check_permutation;

fn four_sigma(empirical: f64, p: f64, trials: usize) -> bool {
    (empirical - p).abs() <= 4.0 * (p * (1.0 - p) / trials as f64).sqrt() + 1e-12
}

fn assert_uniform_menu(out: &ProtocolOutcome, entries: usize) {
    assert_eq!(out.subtests.len(), entries);
    let mut mix = 0.0;
    for s in &out.subtests {
        assert!((s.weight - 1.0 / entries as f64).abs() < 1e-15);
        mix += s.weight * s.acceptance;
    }
    assert!((mix - out.overall).abs() < 1e-12);
}

// ---- SSE ----

#[test]
fn sse_honest_proof_shapes() {
    let inst = planted_sse_yes(8, 3, 0.25, 0.34, 1).unwrap();
    let (psi, phi) = sse_honest_proofs(&inst, 4).unwrap();
    assert_eq!(psi.len(), 8);
    let s = SubsetState::new(8, inst.witness.clone().unwrap()).unwrap();
    assert_eq!(psi.get(0), &s.to_state());
    assert_eq!(overlap(psi.get(3), phi.get(5)).unwrap().norm(), 0.0);
    let out = sparsity_test_i(&psi, &phi, 0.01, TestMode::Exact).unwrap();
    assert!((out.sparsity() - 0.25).abs() < 1e-12);
    let mut no_witness = inst.clone();
    no_witness.witness = None;
    assert!(sse_honest_proofs(&no_witness, 4).is_err());
}

#[test]
fn sse_completeness() {
    for (n, d, delta, eta, seed) in [(16, 4, 0.25, 0.1, 1), (32, 6, 0.25, 0.05, 2), (64, 6, 0.125, 0.1, 3), (64, 5, 0.25, 0.05, 4)] {
        let inst = planted_sse_yes(n, d, delta, eta, seed).unwrap();
        let config = SseConfig::new(eta, delta);
        let (psi, phi) = sse_honest_proofs(&inst, config.k).unwrap();
        let out = sse_protocol(&inst.graph, &psi, &phi, &config, TestMode::Exact).unwrap();
        assert_uniform_menu(&out, 3);
        assert!(out.overall >= 1.0 - eta, "n={n}: {}", out.overall);
        assert!(out.subtest("expansion").unwrap().acceptance >= 1.0 - eta);
        assert_eq!(out.subtest("sparsity").unwrap().acceptance, 1.0);
    }
}

#[test]
fn sse_expansion_examples() {
    let g = circulant(6, 2);
    let v = StateVector::basis(6, 2).unwrap();
    assert!((expansion_accept_prob(&v, &v, &g).unwrap() - 0.5).abs() < 1e-15);
    let (a, b) = (haar(6, 1), haar(6, 2));
    let mean: f64 = g
        .perms()
        .iter()
        .map(|p| qmaplus::property::swap_accept_prob(&a.permuted(p).unwrap(), &b).unwrap())
        .sum::<f64>()
        / 2.0;
    let exact = expansion_test(&a, &b, &g, TestMode::Exact).unwrap();
    assert!((exact - mean).abs() < 1e-15);
    let trials = 10_000;
    let mc = expansion_test(&a, &b, &g, TestMode::MonteCarlo { seed: 4, trials }).unwrap();
    assert!(four_sigma(mc, exact, trials));
    assert!(expansion_test(&a, &haar(5, 1), &g, TestMode::Exact).is_err());
}

#[test]
fn sse_uniform_proof_fails_rider() {
    let inst = planted_sse_yes(16, 4, 0.25, 0.1, 1).unwrap();
    let config = SseConfig::new(0.1, 0.25);
    let u = TiltedFamily::copies(&StateVector::uniform(16), 8).unwrap();
    let out = sse_protocol(&inst.graph, &u, &u, &config, TestMode::Exact).unwrap();
    assert_eq!(out.subtest("sparsity").unwrap().acceptance, 0.0);
    assert_eq!(out.subtest("sparsity").unwrap().detail["rider_ok"], false);
}

// ---- UG ----

fn shift_cycle(n: usize, q: usize, shift: usize) -> UgInstance {
    let add = |s: usize| (0..q).map(|v| (v + s) % q).collect::<Vec<_>>();
    let c = vec![vec![add(shift); n], vec![add((q - shift) % q); n]];
    UgInstance::new(circulant(n, 2), q, c).unwrap()
}

/// Cycle with one broken edge: value `1 − 1/n` under the best labeling.
fn frustrated_cycle(n: usize) -> UgInstance {
    let q = 2;
    let id = vec![0, 1];
    let flip = vec![1, 0];
    let mut fwd = vec![id.clone(); n];
    let mut back = vec![id.clone(); n];
    fwd[n - 1] = flip.clone();
    back[0] = flip;
    UgInstance::new(circulant(n, 2), q, vec![fwd, back]).unwrap()
}

#[test]
fn ug_pi_r_properties() {
    let u = shift_cycle(5, 3, 1);
    for r in 0..2 {
        check_permutation(&u.pi_permutation(r), 15).unwrap();
    }
    let eq = UgInstance::equality(circulant(5, 2), 3).unwrap();
    let p = eq.pi_permutation(0);
    for x in 0..15 {
        assert_eq!(p[x] % 3, x % 3);
    }
    assert!(eq.apply_pi_r(2, &haar(15, 0)).is_err());
}

#[test]
fn ug_completeness() {
    for (n, delta) in [(8usize, 0.125), (10, 0.1), (12, 1.0 / 12.0)] {
        let inst = frustrated_cycle(n);
        let (val, labels) = inst.best_value().unwrap();
        assert!((val - (1.0 - 1.0 / n as f64)).abs() < 1e-12);
        let config = UgConfig { nu: Some(0.1), ..UgConfig::new(delta, 0.05) };
        let (psi, gamma) = ug_honest_proofs(&inst, &labels, config.k).unwrap();
        let per_pair = labeling_pair_prob(&inst, psi.get(0), psi.get(1)).unwrap();
        assert!(per_pair >= 1.0 - delta);
        assert!(per_pair >= 0.5 + (1.0 - delta).powi(2) / 2.0 - 1e-12);
        let out = ug_protocol(&inst, &psi, &gamma, &config, TestMode::Exact).unwrap();
        assert_uniform_menu(&out, 4);
        for s in &out.subtests {
            assert!(s.acceptance >= 0.99, "{}: {}", s.name, s.acceptance);
        }
    }
}

#[test]
fn ug_satisfiable_pair_accepts_fully() {
    let inst = shift_cycle(6, 3, 1);
    let labels: Vec<usize> = (0..6).map(|i| i % 3).collect();
    let (psi, gamma) = ug_honest_proofs(&inst, &labels, 4).unwrap();
    assert!((labeling_pair_prob(&inst, psi.get(0), psi.get(1)).unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(overlap(psi.get(0), gamma.get(0)).unwrap().norm(), 0.0);
    let sp = sparsity_test_ii(&psi, &gamma, 1.0 / 3.0, 0.01, TestMode::Exact).unwrap();
    assert!(sp.accept);
    let two = shift_cycle(4, 2, 1);
    let (_, g2) = ug_honest_proofs(&two, &[0, 1, 0, 1], 1).unwrap();
    assert_eq!(g2.get(0), LabeledState::from_labeling(2, &[1, 0, 1, 0]).unwrap().state());
}

/// Same valid labeling state on both sides: per-pair acceptance is at most
/// `½ + val/2` for every labeling.
#[test]
fn ug_labeling_soundness_on_valid_states() {
    let add = |s: usize, q: usize| (0..q).map(|v| (v + s) % q).collect::<Vec<_>>();
    let k5 = decompose_into_permutations(
        &(0..5).map(|i| (0..5).map(|j| (i != j) as u32).collect()).collect::<Vec<_>>(),
    )
    .unwrap();
    let q = 3;
    let mut c = vec![vec![Vec::new(); 5]; k5.d()];
    for r in 0..k5.d() {
        for i in 0..5 {
            let j = k5.perm(r)[i];
            let s = (i * 7 + j * 7 + (i < j) as usize * (i + 2 * j)) % q;
            c[r][i] = if i < j { add(s, q) } else { Vec::new() };
        }
    }
    for r in 0..k5.d() {
        for i in 0..5 {
            let j = k5.perm(r)[i];
            if i > j {
                let r2 = (0..k5.d()).find(|&r2| k5.perm(r2)[j] == i).unwrap();
                c[r][i] = qmaplus::graphs::invert(&c[r2][j]);
            }
        }
    }
    let inst = UgInstance::new(k5, q, c).unwrap();
    for_each_labeling(5, q, |l| {
        let s = LabeledState::from_labeling(q, l).unwrap();
        let p = labeling_pair_prob(&inst, s.state(), s.state()).unwrap();
        assert!(p <= 0.5 + inst.value(l).unwrap() / 2.0 + 1e-12);
    });
}

#[test]
fn ug_superposed_values_fail_validity() {
    let h = 0.5f64.sqrt();
    let mut amps = vec![0.0; 8];
    amps[0] = h;
    amps[1] = h;
    let bad = LabeledState::new(4, 2, StateVector::from_real(&amps).unwrap()).unwrap();
    let config = UgConfig { nu: Some(0.1), ..UgConfig::new(0.1, 0.05) };
    let out = validity_test(&[bad], config.nu(2), TestMode::Exact).unwrap();
    assert!(out.alpha > 0.5 + config.nu(2));
    assert!(!out.accept);
    assert!(UgConfig::new(0.1, 0.05).nu(2) > 1.0);
}

#[test]
fn ug_labeling_monte_carlo() {
    let inst = frustrated_cycle(8);
    let (_, labels) = inst.best_value().unwrap();
    let (psi, _) = ug_honest_proofs(&inst, &labels, 4).unwrap();
    let theta = UgConfig::new(0.125, 0.05).theta();
    let (h0, h1) = psi.halves().unwrap();
    let exact = labeling_test(h0, h1, &inst, theta, TestMode::Exact).unwrap();
    let trials = 10_000;
    let mc = labeling_test(h0, h1, &inst, theta, TestMode::MonteCarlo { seed: 3, trials }).unwrap();
    assert!(four_sigma(mc.fraction, exact.fraction, trials));
    assert!(labeling_test(h0, &h1[..1], &inst, theta, TestMode::Exact).is_err());
}

fn general_ug(n: usize, q: usize, edges: &[(usize, usize, usize)]) -> GeneralUg {
    let add = |s: usize| (0..q).map(|v| (v + s) % q).collect::<Vec<_>>();
    GeneralUg { n, q, edges: edges.iter().map(|&(u, v, s)| (u, v, add(s))).collect() }
}

#[test]
fn ug_regularization_counts_and_values() {
    let d = 4;
    let cases = [
        general_ug(4, 2, &[(0, 1, 0), (1, 2, 0), (2, 3, 0)]),
        general_ug(4, 2, &[(0, 1, 0), (1, 2, 0), (2, 0, 1), (2, 3, 1)]),
        general_ug(5, 2, &[(0, 1, 1), (1, 2, 1), (2, 0, 1), (3, 4, 0), (0, 4, 1)]),
        general_ug(3, 2, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]),
    ];
    for g in &cases {
        let reg = regularize_ug(g, d, 3).unwrap();
        let inst = &reg.instance;
        assert!((inst.edge_count() - (g.edges.len() * (d + 1)) as f64).abs() < 1e-12);
        assert!(reg.cloud_cheeger.iter().all(|&c| c >= 2.0));
        let val = g.best_value();
        let (val2, _) = inst.best_value().unwrap();
        if val >= 0.5 {
            assert!(val2 >= 1.0 - 1.0 / (2.0 * (d + 1) as f64) - 1e-12);
        }
        assert!(val2 <= 1.0 - (1.0 - val) / (d + 1) as f64 + 1e-12, "val {val} -> {val2}");
    }
    let sat = &cases[0];
    let reg = regularize_ug(sat, d, 3).unwrap();
    assert_eq!(reg.instance.value(&reg.clone_labeling(&[1, 1, 1, 1])).unwrap(), 1.0);
}

#[test]
fn minority_labels_on_k5() {
    let adj: Vec<Vec<u32>> = (0..5).map(|i| (0..5).map(|j| (i != j) as u32).collect()).collect();
    let k5 = decompose_into_permutations(&adj).unwrap();
    assert!(cheeger(&k5, CheegerMethod::Exhaustive).unwrap().certifies(2.0));
    for q in 2..=3 {
        for_each_labeling(5, q, |l| {
            assert!(unequal_edges(&k5, l) >= minority_count(l, q) as f64);
        });
    }
}

// ---- CSP ----

fn eq_table() -> Vec<bool> {
    vec![true, false, false, true]
}

fn ring(n: usize, last_differs: bool) -> CspToyInstance {
    let cs = (0..n)
        .map(|j| {
            let accept = if last_differs && j == n - 1 { eq_table().iter().map(|b| !b).collect() } else { eq_table() };
            CspConstraint { vars: vec![j, (j + 1) % n], accept }
        })
        .collect();
    CspToyInstance::new(n, 2, 2, cs).unwrap()
}

/// 3-ary parity constraints sharing variables.
fn parity3() -> CspToyInstance {
    let odd: Vec<bool> = (0..8usize).map(|t| t.count_ones() % 2 == 1).collect();
    let cs = vec![
        CspConstraint { vars: vec![0, 1, 2], accept: odd.clone() },
        CspConstraint { vars: vec![2, 3, 4], accept: odd.clone() },
        CspConstraint { vars: vec![0, 3, 4], accept: odd },
    ];
    CspToyInstance::new(5, 2, 3, cs).unwrap()
}

#[test]
fn csp_index_maps_invert_on_full_enumeration() {
    for c in [ring(4, false), ring(5, true), parity3()] {
        for j in 0..c.r() {
            for &i in c.adj_c(j) {
                assert_eq!(c.adj_loc_c(j, c.adj_glo_c(j, i).unwrap()), i);
                assert_eq!(c.adj_loc_v(i, c.adj_glo_v(i, j).unwrap()), j);
            }
            for i in (0..c.n()).filter(|i| !c.adj_c(j).contains(i)) {
                assert_eq!(c.adj_glo_c(j, i), None);
                assert_eq!(c.adj_glo_v(i, j), None);
            }
        }
        let tau = c.uniformity();
        for i in 0..c.n() {
            for i2 in 0..c.n() {
                if tau[i] == tau[i2] {
                    assert_eq!(c.adj_v(i).len(), c.adj_v(i2).len());
                }
            }
        }
    }
}

#[test]
fn csp_regularization_properties() {
    let d = 4;
    for (c, delta) in [(ring(4, false), 1.0), (ring(4, true), 0.75), (parity3(), 1.0)] {
        let (val, x) = c.best_value().unwrap();
        assert!((val - delta).abs() < 1e-12);
        let reg = csp_regularize(&c, d, 5).unwrap();
        assert!(reg.incidences().iter().all(|&k| k == d + 1));
        assert!(reg.cloud_cheeger.iter().all(|&v| v >= 2.0));
        let (min_unsat, _) = reg.min_unsatisfied().unwrap();
        let q = c.q() as f64;
        assert!(min_unsat >= (1.0 - val - q * reg.eta()) * c.r() as f64 - 1e-9);
        if val == 1.0 {
            assert_eq!(min_unsat, 0.0);
            assert_eq!(reg.unsatisfied(&reg.clone_assignment(&x)).unwrap(), 0.0);
        }
    }
}

#[test]
fn csp_operators_are_isometries() {
    let reg = csp_regularize(&ring(4, false), 4, 5).unwrap();
    let (a, b) = (haar(reg.proof_dim(), 1), haar(reg.proof_dim(), 2));
    let (aa, ab) = (reg.apply_a(&a).unwrap(), reg.apply_a(&b).unwrap());
    assert!((overlap(&aa, &ab).unwrap() - overlap(&a, &b).unwrap()).norm() < 1e-12);
    for k in 0..reg.d {
        check_permutation(&reg.m_permutation(k), reg.big_dim()).unwrap();
        let back = reg.apply_m(k, &reg.apply_m(k, &aa).unwrap()).unwrap();
        if inverse_matching(&reg, k) == reg.m_permutation(k) {
            assert!((overlap(&back, &aa).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }
    let bb = reg.apply_b(&a).unwrap();
    assert_eq!(bb.dim(), 2 * reg.proof_dim());
    let tuples = reg.tuples_from_new(&reg.clone_assignment(&[1, 1, 1, 1]));
    let honest = reg.encode(&tuples).unwrap();
    assert!((reg.predicate_mass(&honest).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn csp_single_variable_constraint_copies() {
    let cs = vec![CspConstraint { vars: vec![0], accept: vec![false, true] }, CspConstraint { vars: vec![1], accept: vec![true, true] }];
    let c = CspToyInstance::new(2, 2, 1, cs).unwrap();
    let reg = csp_regularize(&c, 4, 1).unwrap();
    let psi = reg.encode(&[1, 0]).unwrap();
    let a = reg.apply_a(&psi).unwrap();
    let nonzero: Vec<usize> = (0..a.dim()).filter(|&x| a.amps()[x].norm() > 0.0).collect();
    assert_eq!(nonzero.len(), 2);
    for &x in &nonzero {
        assert!((a.amps()[x].norm_sqr() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn csp_honest_pair_passes_constraints() {
    for (c, x) in [(ring(4, false), vec![0, 0, 0, 0]), (parity3(), vec![0, 1, 0, 1, 0])] {
        assert_eq!(c.value(&x), 1.0);
        let reg = csp_regularize(&c, 4, 5).unwrap();
        let (psi, _) = csp_honest_proofs(&reg, &x, 2).unwrap();
        let br = pair_branches(&reg, psi.get(0), psi.get(1)).unwrap();
        assert!((br.kept_acceptance() - 1.0).abs() < 1e-12);
        let per_state = (c.tuples() as f64).recip();
        for k in &br.keep_consistency {
            assert!((k - per_state * per_state).abs() < 1e-12);
        }
        let (h0, h1) = psi.halves().unwrap();
        let theta = default_theta(1.0, reg.d);
        let out = constraints_test(h0, h1, &reg, theta, None, TestMode::Exact).unwrap();
        assert!((out.fraction - 1.0).abs() < 1e-12 && out.accept);
        let alt = constraints_test(h0, h1, &reg, theta, Some(0.5), TestMode::Exact).unwrap();
        assert!((alt.fraction - 1.0).abs() < 1e-12);
        assert!(alt.keep > out.keep);
        assert!(constraints_test(h0, h1, &reg, theta, Some(0.0), TestMode::Exact).is_err());
    }
}

/// Equal pairs of valid encodings on an unsatisfiable instance are rejected
/// at least `(1−δ)/(4d+2)` of the time among kept pairs.
#[test]
fn csp_rejection_on_valid_encodings() {
    let c = ring(4, true);
    let (delta, _) = c.best_value().unwrap();
    let d = 4;
    let reg = csp_regularize(&c, d, 5).unwrap();
    let bound = (1.0 - delta) / (4 * d + 2) as f64;
    let m = reg.new_variables().len();
    for_each_labeling(m, 2, |y| {
        let psi = reg.encode(&reg.tuples_from_new(y)).unwrap();
        let br = pair_branches(&reg, &psi, &psi).unwrap();
        assert!(1.0 - br.kept_acceptance() >= bound - 1e-6, "{y:?}");
    });
}

#[test]
fn csp_protocol_completeness_and_primes() {
    let c = parity3();
    let reg = csp_regularize(&c, 4, 5).unwrap();
    let (psi, phi) = csp_honest_proofs(&reg, &[0, 1, 0, 1, 0], 8).unwrap();
    let config = CspConfig::new(1.0);
    let out = csp_protocol(&reg, &psi, &phi, &[97, 5], &config, TestMode::Exact).unwrap();
    assert_uniform_menu(&out, 5);
    for s in &out.subtests {
        assert!(s.acceptance >= 0.99, "{}: {}", s.name, s.acceptance);
    }
    let bad = csp_protocol(&reg, &psi, &phi, &[97, 91], &config, TestMode::Exact).unwrap();
    assert_eq!(bad.overall, 0.0);
    assert_eq!(bad.subtest("primes").unwrap().acceptance, 0.0);
}

#[test]
fn csp_superposed_cheat_fails_validity() {
    let c = ring(4, false);
    let reg = csp_regularize(&c, 4, 5).unwrap();
    let t = c.tuples();
    let mut amps = vec![0.0; reg.proof_dim()];
    for j in 0..c.r() {
        amps[j * t] = 1.0;
        amps[j * t + 3] = 1.0;
    }
    let cheat = StateVector::from_real(&amps).unwrap();
    let psi = TiltedFamily::copies(&cheat, 16).unwrap();
    let config = CspConfig::new(1.0);
    let out = csp_protocol(&reg, &psi, &psi, &[97], &config, TestMode::Exact).unwrap();
    let v = &out.subtest("validity").unwrap().detail;
    let alpha = v["alpha"].as_f64().unwrap();
    assert!(alpha - 1.0 / t as f64 - config.validity_precision > 0.0);
    assert_eq!(out.subtest("validity").unwrap().acceptance, 0.0);
}

#[test]
fn csp_constraints_monte_carlo() {
    let c = ring(4, true);
    let reg = csp_regularize(&c, 4, 5).unwrap();
    let y: Vec<usize> = (0..reg.new_variables().len()).map(|i| i % 2).collect();
    let psi = reg.encode(&reg.tuples_from_new(&y)).unwrap();
    let fam = vec![psi; 4];
    let theta = default_theta(0.75, reg.d);
    let exact = constraints_test(&fam, &fam, &reg, theta, Some(1.0), TestMode::Exact).unwrap();
    let trials = 40_000;
    let mc = constraints_test(&fam, &fam, &reg, theta, Some(1.0), TestMode::MonteCarlo { seed: 6, trials }).unwrap();
    assert!(four_sigma(mc.keep, exact.keep, trials));
    assert!(four_sigma(mc.fraction, exact.fraction, mc.kept));
}

#[test]
fn instances_roundtrip_json() {
    let u = shift_cycle(5, 3, 2);
    assert_eq!(serde_json::from_str::<UgInstance>(&serde_json::to_string(&u).unwrap()).unwrap(), u);
    let c = parity3();
    assert_eq!(serde_json::from_str::<CspToyInstance>(&serde_json::to_string(&c).unwrap()).unwrap(), c);
    let g: RegularGraph = circulant(5, 2);
    assert!(UgInstance::equality(g, 1).is_err());
}
