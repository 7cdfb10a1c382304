mod common;

use common::{blend, haar, nonneg};
use proptest::prelude::*;
use qmaplus::property::swap_accept_prob;
use qmaplus::qstate::*;
use qmaplus::rng::seeded;
use qmaplus::Error;

fn ov2(a: &StateVector, b: &StateVector) -> f64 {
    overlap(a, b).unwrap().norm_sqr()
}

#[test]
fn tensor_examples() {
    let h = 0.5f64.sqrt();
    let plus = StateVector::from_real(&[h, h]).unwrap();
    let t = tensor(&plus, &StateVector::basis(2, 0).unwrap());
    let want = StateVector::from_real(&[h, 0.0, h, 0.0]).unwrap();
    assert!((ov2(&t, &want) - 1.0).abs() < 1e-12);
}

#[test]
fn overlap_and_distance_examples() {
    let z = StateVector::basis(3, 0).unwrap();
    let o = StateVector::basis(3, 1).unwrap();
    assert_eq!(overlap(&z, &z).unwrap(), C64::new(1.0, 0.0));
    assert_eq!(overlap(&z, &o).unwrap(), C64::new(0.0, 0.0));
    assert_eq!(trace_distance_pure(&z, &z).unwrap(), 0.0);
    assert_eq!(trace_distance_pure(&z, &o).unwrap(), 1.0);
    assert_eq!(
        overlap(&z, &StateVector::basis(2, 0).unwrap()),
        Err(Error::DimensionMismatch { expected: 3, got: 2 })
    );
}

#[test]
fn construction_errors() {
    assert!(matches!(StateVector::new(vec![C64::new(1.0, 0.0); 2]), Err(Error::NotNormalized(_))));
    assert_eq!(SubsetState::new(4, vec![]), Err(Error::EmptySet));
    assert_eq!(SubsetState::new(4, vec![4]), Err(Error::IndexOutOfRange { index: 4, dim: 4 }));
    assert!(NonnegState::new(vec![-0.5, 0.75f64.sqrt()]).is_err());
}

#[test]
fn subset_distance_agrees_with_vectors() {
    for n in 2..7usize {
        for t in 1..1usize << n {
            let tset: Vec<usize> = (0..n).filter(|i| t >> i & 1 == 1).collect();
            let mut s = t;
            while s != 0 {
                let sset: Vec<usize> = (0..n).filter(|i| s >> i & 1 == 1).collect();
                let (a, b) = (SubsetState::new(n, sset).unwrap(), SubsetState::new(n, tset.clone()).unwrap());
                let d = subset_state_distance(&a, &b).unwrap();
                let td = trace_distance_pure(&a.to_state(), &b.to_state()).unwrap();
                assert!((d * d - td * td).abs() < 1e-12);
                s = (s - 1) & t;
            }
        }
    }
}

#[test]
fn measurement_examples() {
    let spec = RegisterSpec::new(vec![2, 2], 1).unwrap();
    let s = StateVector::basis(4, 1).unwrap();
    assert_eq!(measure_distribution(&s, &spec).unwrap(), vec![0.0, 1.0]);
    let h = 0.5f64.sqrt();
    let phi = StateVector::from_real(&[h, h, 0.0, 0.0]).unwrap();
    let p = measure_distribution(&phi, &spec).unwrap();
    assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
}

#[test]
fn sampled_frequencies_within_four_sigma() {
    let psi = haar(12, 7);
    let spec = RegisterSpec::new(vec![4, 3], 0).unwrap();
    let p = measure_distribution(&psi, &spec).unwrap();
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let trials = 100_000usize;
    let mut rng = seeded(11);
    let mut counts = [0usize; 4];
    for _ in 0..trials {
        let (k, post) = measure_register_with(&psi, &spec, &mut rng).unwrap();
        assert!((measure_distribution(&post, &spec).unwrap()[k] - 1.0).abs() < 1e-12);
        counts[k] += 1;
    }
    for k in 0..4 {
        let sigma = (p[k] * (1.0 - p[k]) / trials as f64).sqrt();
        assert!((counts[k] as f64 / trials as f64 - p[k]).abs() <= 4.0 * sigma, "outcome {k}");
    }
}

#[test]
fn validity_dft_examples() {
    let spec = RegisterSpec::new(vec![2, 2], 1).unwrap();
    let valid = LabeledState::from_labeling(2, &[0, 1]).unwrap();
    assert!(valid.is_valid());
    assert_eq!(valid.labeling(), Some(vec![0, 1]));
    let p = measure_distribution(&dft_value_register(&valid).unwrap(), &spec).unwrap();
    assert!((p[0] - 0.5).abs() < 1e-12);
    let h = 0.5f64.sqrt();
    let phi = LabeledState::new(2, 2, StateVector::from_real(&[h, h, 0.0, 0.0]).unwrap()).unwrap();
    assert!(!phi.is_valid());
    let p = measure_distribution(&dft_value_register(&phi).unwrap(), &spec).unwrap();
    assert!((p[0] - 1.0).abs() < 1e-12);
}

#[test]
fn state_json_roundtrip() {
    let s = haar(5, 3);
    let back: StateVector = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(back, s);
    let sub: SubsetState = serde_json::from_str(r#"{"n": 6, "S": [4, 2]}"#).unwrap();
    assert_eq!(sub.set(), &[2, 4]);
    assert!(serde_json::from_str::<SubsetState>(r#"{"n": 3, "S": [3]}"#).is_err());
}

/// Two non-negative states symmetric about the diagonal: each has squared
/// overlap `1 − ε` with it, but their own squared overlap is `(1 − 2ε)²`,
/// below `1 − 2ε`.
#[test]
fn squared_overlap_triangle_is_tight() {
    let theta = 0.3f64;
    let at = |a: f64| StateVector::from_real(&[a.cos(), a.sin()]).unwrap();
    let quarter = std::f64::consts::FRAC_PI_4;
    let (z, u, v) = (at(quarter), at(quarter + theta), at(quarter - theta));
    let eps = 1.0 - ov2(&u, &z);
    assert!((ov2(&v, &z) - (1.0 - eps)).abs() < 1e-12);
    assert!((ov2(&u, &v) - (1.0 - 2.0 * eps).powi(2)).abs() < 1e-12);
    assert!(ov2(&u, &v) < 1.0 - 2.0 * eps);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn tensor_is_unit(da in 1usize..6, db in 1usize..6, seed: u64) {
        let t = tensor(&haar(da, seed), &haar(db, seed ^ 1));
        prop_assert_eq!(t.dim(), da * db);
        let n: f64 = t.amps().iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((n - 1.0).abs() < 1e-9);
    }

    #[test]
    fn overlap_permutation_invariant(dim in 2usize..9, seed: u64) {
        let (a, b) = (haar(dim, seed), haar(dim, seed.wrapping_add(1)));
        let mut perm: Vec<usize> = (0..dim).collect();
        perm.rotate_left((seed % dim as u64) as usize);
        perm.swap(0, dim - 1);
        let lhs = overlap(&a.permuted(&perm).unwrap(), &b.permuted(&perm).unwrap()).unwrap().norm();
        prop_assert!((lhs - overlap(&a, &b).unwrap().norm()).abs() < 1e-12);
    }

    #[test]
    fn distance_range_and_zero(dim in 1usize..9, seed: u64, phase in 0.0..std::f64::consts::TAU) {
        let (a, b) = (haar(dim, seed), haar(dim, !seed));
        let d = trace_distance_pure(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        let rotated = StateVector::new(a.amps().iter().map(|x| x * C64::from_polar(1.0, phase)).collect()).unwrap();
        prop_assert!(trace_distance_pure(&a, &rotated).unwrap() < 1e-6);
        if d < 1e-9 {
            prop_assert!((overlap(&a, &b).unwrap().norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn distance_subadditive_under_tensor(da in 2usize..5, db in 2usize..5, seed: u64) {
        let (a, b, c, d) = (haar(da, seed), haar(da, seed + 1), haar(db, seed + 2), haar(db, seed + 3));
        let lhs = trace_distance_pure(&tensor(&a, &c), &tensor(&b, &d)).unwrap().powi(2);
        let rhs = trace_distance_pure(&a, &b).unwrap().powi(2) + trace_distance_pure(&c, &d).unwrap().powi(2);
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn closeness_preservation(dim in 2usize..10, t in 0.0f64..0.5, seed: u64) {
        let mut rng = seeded(seed);
        let u = nonneg(dim, &mut rng);
        let v = blend(&u, &nonneg(dim, &mut rng), t);
        let z = nonneg(dim, &mut rng);
        let eps = 1.0 - ov2(&u, &v);
        prop_assert!((ov2(&u, &z) - ov2(&v, &z)).abs() <= 3.0 * eps.sqrt() + 1e-9);
    }

    #[test]
    fn squared_overlap_triangle(dim in 2usize..10, t1 in 0.0f64..0.5, t2 in 0.0f64..0.5, seed: u64) {
        let mut rng = seeded(seed);
        let z = nonneg(dim, &mut rng);
        let u = blend(&z, &nonneg(dim, &mut rng), t1);
        let v = blend(&z, &nonneg(dim, &mut rng), t2);
        let eps = (1.0 - ov2(&u, &z)).max(1.0 - ov2(&v, &z));
        prop_assert!(ov2(&u, &v) >= (1.0 - 2.0 * eps).powi(2) - 1e-9);
    }

    #[test]
    fn acceptance_is_lipschitz_in_distance(dim in 2usize..9, seed: u64) {
        let (a, b, c) = (haar(dim, seed), haar(dim, seed + 1), haar(dim, seed + 2));
        let gap = (swap_accept_prob(&a, &c).unwrap() - swap_accept_prob(&b, &c).unwrap()).abs();
        prop_assert!(gap <= trace_distance_pure(&a, &b).unwrap() + 1e-9);
    }

    #[test]
    fn dft_preserves_norm(n in 1usize..5, q in 2usize..5, seed: u64) {
        let psi = LabeledState::new(n, q, haar(n * q, seed)).unwrap();
        let f = dft_value_register(&psi).unwrap();
        let norm: f64 = f.amps().iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-9);
    }
}
