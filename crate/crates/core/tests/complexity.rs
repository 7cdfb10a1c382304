mod common;

use common::haar;
use proptest::prelude::*;
use qmaplus::complexity::*;
use qmaplus::linalg::{hermitian_eigen, kron, outer, sym_projector, CMatrix};
use qmaplus::property::{product_accept_prob, swap_accept_prob};
use qmaplus::qstate::{overlap, tensor, StateVector, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn worked_phase_decomposition() {
    let s = 1.0 / 3f64.sqrt();
    let psi = StateVector::new(vec![c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, s)]).unwrap();
    let d = decompose_four(&psi);
    assert!((d.weights[0] - 2.0 / 3.0).abs() < 1e-15 && (d.weights[1] - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(d.weights[2..], [0.0, 0.0]);
    assert!(d.parts[2].is_none() && d.parts[3].is_none());
    let nonneg = StateVector::from_real(&[0.6, 0.0, 0.8]).unwrap();
    let d = decompose_four(&nonneg);
    assert_eq!(d.weights, [1.0, 0.0, 0.0, 0.0]);
    assert_eq!(d.parts[0].as_ref().unwrap(), &vec![0.6, 0.0, 0.8]);
}

#[test]
fn four_s_examples() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let minus = StateVector::from_real(&[h, -h]).unwrap();
    let r = four_s_bound_check(&outer(&minus)).unwrap();
    assert!((r.s_plus - 0.5).abs() < 1e-12 && (r.lambda_max - 1.0).abs() < 1e-12);
    assert!(r.passed && r.ratio <= 4.0);
    let id = four_s_bound_check(&CMatrix::identity(3, 3)).unwrap();
    assert!((id.ratio - 1.0).abs() < 1e-12);
    let mut neg = CMatrix::identity(2, 2);
    neg[(1, 1)] = c(-0.5, 0.0);
    assert!(four_s_bound_check(&neg).is_err());
    assert!(four_s_bound_check(&(CMatrix::identity(2, 2) * c(2.0, 0.0))).is_err());
}

#[test]
fn four_s_random_audit() {
    let mut worst: f64 = 0.0;
    for seed in 0..1000u64 {
        let dim = 2 + (seed % 5) as usize;
        let m = random_psd(dim, 1 + (seed % 3) as usize, seed);
        let r = four_s_bound_check(&m).unwrap();
        assert!(r.passed, "seed {seed}: {r:?}");
        worst = worst.max(r.ratio);
    }
    assert!(worst <= 4.0);
    eprintln!("largest λ_max/s⁺ over 1000 operators: {worst:.4}");
}

#[test]
fn reencoding_examples() {
    let real = StateVector::from_real(&[0.6, 0.8]).unwrap();
    let enc = reencode_plus(&real).encoded;
    for (i, a) in enc.amps().iter().enumerate() {
        if i % 4 != 0 {
            assert_eq!(a.norm(), 0.0);
        }
    }
    let (probs, collapsed) = decode_distribution(&enc).unwrap();
    assert!((probs[0] - 0.25).abs() < 1e-12);
    assert!((overlap(&collapsed.unwrap(), &real).unwrap().norm() - 1.0).abs() < 1e-12);

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = StateVector::new(vec![c(h, 0.0), c(0.0, -h)]).unwrap();
    let enc = reencode_plus(&psi);
    assert!(enc.encoded.amps().iter().all(|a| a.im == 0.0 && a.re >= 0.0));
    let (probs, collapsed) = decode_distribution(&enc.encoded).unwrap();
    assert!((probs[0] - 0.25).abs() < 1e-12);
    assert!((overlap(&collapsed.unwrap(), &psi).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
    assert!(decode_distribution(&haar(6, 0)).is_err());
}

#[test]
fn sampled_decoding_frequency() {
    let psi = haar(3, 11);
    let enc = reencode_plus(&psi).encoded;
    let trials = 4000;
    let mut hits = 0;
    for s in 0..trials {
        let out = arthur_decode(&enc, s).unwrap();
        if out.observed == (0, 0) {
            hits += 1;
            assert!((overlap(&out.collapsed, &psi).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
    let f = hits as f64 / trials as f64;
    assert!((f - 0.25).abs() <= 4.0 * (0.25 * 0.75 / trials as f64).sqrt());
}

#[test]
fn gap_function_maximum() {
    let r = verify_gap_max();
    assert!(r.passed, "{r:?}");
    assert!((r.grid_max - 7.0 / 9.0).abs() < 1e-9);
    assert_eq!(r.argmax, 0.0);
    assert!((r.critical_points[0] - (1.0 + 13f64.sqrt()) / 8.0).abs() < 1e-9);
    assert!((r.critical_points[1] - 0.75).abs() < 1e-9);
    assert!(gap_f(0.5, -0.1).is_err() && gap_f(-0.1, 0.5).is_err());
}

#[test]
fn product_bound_examples() {
    let p = tensor(&haar(2, 1), &haar(2, 2));
    assert!((product_accept_prob(&p, &p, &[2, 2]).unwrap() - 1.0).abs() < 1e-12);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let epr = StateVector::from_real(&[h, 0.0, 0.0, h]).unwrap();
    let pt = product_accept_prob(&epr, &epr, &[2, 2]).unwrap();
    let w: f64 = 0.5;
    assert!((pt - 0.75).abs() < 1e-12 && (pt - (1.0 - w + w * w)).abs() < 1e-12);
}

#[test]
fn product_bound_audits() {
    for (dims, samples) in [(vec![2, 2], 1000), (vec![2, 3], 500), (vec![3, 3], 300), (vec![2, 2, 2], 100)] {
        let r = product_test_bound_audit(&dims, samples, 5).unwrap();
        assert_eq!(r.violations, 0, "{r:?}");
        assert!(r.max_excess_general <= 1e-9);
    }
}

#[test]
fn symmetric_identity_convergence() {
    let r = symmetric_projector_identity_check(2, 100_000, 3).unwrap();
    assert!(r.deviation <= 0.02, "{r:?}");
    let first = r.trajectory.first().unwrap().1;
    assert!(r.deviation < first);
    assert!(symmetric_projector_identity_check(7, 10, 0).is_err());
    for d in 2..=4 {
        let (vals, _) = hermitian_eigen(&sym_projector(d));
        assert!(vals.iter().all(|v| v.abs() < 1e-12 || (v - 1.0).abs() < 1e-12));
        let rank = vals.iter().filter(|v| **v > 0.5).count();
        assert_eq!(rank, d * (d + 1) / 2);
    }
}

#[test]
fn sequential_repetition_multiplies() {
    let (a, b) = (haar(2, 1), haar(2, 2));
    for ell in 1..=4 {
        let (rep, single) = sequential_repetition(&a, &b, ell).unwrap();
        assert!((rep - single).abs() < 1e-12, "ℓ = {ell}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn decomposition_reconstructs(seed in 0u64..100_000, dim in 1usize..9) {
        let psi = haar(dim, seed);
        let d = decompose_four(&psi);
        prop_assert!((d.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(d.sqrt_weight_sum_sq() <= 4.0 + 1e-12);
        let back = d.reconstruct(dim);
        let err: f64 = back.iter().zip(psi.amps()).map(|(x, y)| (x - y).norm()).sum();
        prop_assert!(err < 1e-12);
        for k in [0usize, 1] {
            if let (Some(p), Some(q)) = (&d.parts[k], &d.parts[k + 2]) {
                prop_assert!(p.iter().zip(q).all(|(x, y)| *x == 0.0 || *y == 0.0));
            }
        }
        for p in d.parts.iter().flatten() {
            prop_assert!(p.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn honest_decoding_is_exact(seed in 0u64..100_000, dim in 1usize..7) {
        let psi = haar(dim, seed);
        let enc = reencode_plus(&psi).encoded;
        prop_assert!(enc.amps().iter().all(|a| a.im == 0.0 && a.re >= 0.0));
        let (probs, collapsed) = decode_distribution(&enc).unwrap();
        prop_assert!((probs[0] - 0.25).abs() < 1e-12);
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((overlap(&collapsed.unwrap(), &psi).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gap_boundary_at_one(p in 0.0f64..=1.0) {
        prop_assert!((gap_f(p, 1.0).unwrap() - p).abs() < 1e-15);
    }

    #[test]
    fn swap_is_trace_against_symmetric_projector(seed in 0u64..100_000, d in 2usize..5) {
        let (a, b) = (haar(d, seed), haar(d, seed + 1));
        let rho = kron(&outer(&a), &outer(&b));
        let tr: C64 = (sym_projector(d) * rho).trace();
        prop_assert!((tr.re - swap_accept_prob(&a, &b).unwrap()).abs() < 1e-12);
        prop_assert!(tr.im.abs() < 1e-12);
    }
}
