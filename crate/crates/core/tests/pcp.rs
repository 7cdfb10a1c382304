use proptest::prelude::*;
use qmaplus::pcp::adjacency::{adjacency_bruteforce, uniformity_audit, AdjacencyIndex, PositionType};
use qmaplus::pcp::bits::Bits;
use qmaplus::pcp::field::{line_from_index, line_index, lines_through_count, FieldSpec, Line};
use qmaplus::pcp::hadamard::{
    accept_probability, accept_probability_enumerated, queries, tensor, unit, HadamardProof, Layout, PackedSystem, Randomness, Var,
};
use qmaplus::pcp::primes::{interval_floor, is_prime, prime_in_interval};
use qmaplus::pcp::quad::{circuit_to_quadsystem, honest_assignment, random_formula, Circuit, Gate, Lit, QuadSystem};
use rayon::prelude::*;

fn tiny() -> QuadSystem {
    QuadSystem { n: 2, m: 1, rows: vec![Bits::from_u64_msb(0b0100, 4)], b: Bits::from_bools(&[true]) }
}

fn and_gate() -> Circuit {
    Circuit { inputs: 2, gates: vec![Gate::And { x: Lit::pos(0), y: Lit::pos(1) }], fixed: vec![] }
}

#[test]
fn lines_roundtrip_complete() {
    for p in [2u64, 3, 5, 7] {
        let f = FieldSpec::new(p).unwrap();
        for n in 1..=2usize {
            let count = lines_through_count(n, &f);
            for pt in 0..p.pow(n as u32) {
                let point = f.decode(pt, n);
                // brute force: every (a, b) with a t + b = point for some t
                let mut brute = Vec::new();
                for ra in 0..p.pow(n as u32) {
                    for rb in 0..p.pow(n as u32) {
                        let (a, b) = (f.decode(ra, n), f.decode(rb, n));
                        if (0..p).any(|t| f.point_on(&a, &b, t) == point) {
                            brute.push(Line { a, b });
                        }
                    }
                }
                assert_eq!(brute.len() as u64, count);
                for (k, line) in brute.iter().enumerate() {
                    let idx = line_index(line, &point, &f).unwrap();
                    assert_eq!(idx, k as u64 + 1);
                    assert_eq!(&line_from_index(idx, &point, &f).unwrap(), line);
                }
            }
        }
    }
    let f = FieldSpec::new(3).unwrap();
    assert_eq!(lines_through_count(1, &f), 7);
    assert_eq!(line_from_index(1, &[1, 2], &f).unwrap(), Line { a: vec![0, 0], b: vec![1, 2] });
}

#[test]
fn line_errors() {
    let f = FieldSpec::new(5).unwrap();
    assert!(line_index(&Line { a: vec![0], b: vec![3] }, &[2], &f).is_err());
    assert!(line_from_index(0, &[2], &f).is_err());
    assert!(line_from_index(lines_through_count(1, &f) + 1, &[2], &f).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn field_ring_axioms(pi in 0usize..5, a in 0u64..1000, b in 0u64..1000, c in 0u64..1000) {
        let f = FieldSpec::new([3, 5, 7, 11, 13][pi]).unwrap();
        let (a, b, c) = (a % f.p(), b % f.p(), c % f.p());
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn prime_in_interval_is_prime(n in 2u64..100_000) {
        if let Ok(q) = prime_in_interval(n) {
            prop_assert!(is_prime(q));
            prop_assert!(q <= n && q >= interval_floor(n));
        }
    }
}

#[test]
fn prime_examples() {
    assert_eq!(prime_in_interval(100).unwrap(), 97);
    assert_eq!(prime_in_interval(7).unwrap(), 7);
}

#[test]
fn and_gate_solutions() {
    let q = circuit_to_quadsystem(&and_gate()).unwrap();
    for w in 0..8u32 {
        let x: Vec<bool> = (0..3).map(|i| (w >> i) & 1 == 1).collect();
        assert_eq!(q.satisfied_by(&x), x == [true, true, true]);
    }
}

#[test]
fn generated_circuits_have_independent_rows() {
    for seed in 0..50u64 {
        let inputs = 2 + (seed % 8) as usize;
        let mut c = random_formula(inputs, 3 + (seed % 6) as usize, seed);
        if seed % 2 == 0 {
            c.fixed = vec![(0, seed % 4 == 0)];
        }
        let q = circuit_to_quadsystem(&c).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert_eq!(q.rank(), q.len(), "seed {seed}");
    }
}

#[test]
fn sat_iff_quadratic_extension() {
    for seed in 0..30u64 {
        let inputs = 1 + (seed % 10) as usize;
        let c = random_formula(inputs.max(2), 2 + (seed % 4) as usize, 1000 + seed);
        let q = circuit_to_quadsystem(&c).unwrap();
        for x in 0..1u64 << c.inputs {
            let input: Vec<bool> = (0..c.inputs).map(|i| (x >> i) & 1 == 1).collect();
            assert_eq!(c.eval(&input), q.has_extension(&input).unwrap(), "seed {seed} input {x}");
            if c.eval(&input) {
                assert!(q.satisfied_by(&honest_assignment(&c, &input)));
            }
        }
        assert_eq!(c.satisfiable().unwrap(), q.solvable().unwrap());
    }
}

#[test]
fn honest_hadamard_accepts() {
    let c = and_gate();
    let sys = PackedSystem::new(&circuit_to_quadsystem(&c).unwrap()).unwrap();
    let x = honest_assignment(&c, &[true, true]);
    let proof = HadamardProof::honest(&x).unwrap();
    assert_eq!(accept_probability(&proof, &sys, &[true, true]).unwrap().accept, 1.0);
    let sys = PackedSystem::new(&tiny()).unwrap();
    let proof = HadamardProof::honest(&[true, true]).unwrap();
    assert_eq!(accept_probability_enumerated(&proof, &sys, &[true]).unwrap(), 1.0);
}

#[test]
fn single_bit_corruption_is_detected() {
    let c = and_gate();
    let sys = PackedSystem::new(&circuit_to_quadsystem(&c).unwrap()).unwrap();
    let x = honest_assignment(&c, &[true, true]);
    let honest = HadamardProof::honest(&x).unwrap();
    let positions = (0..8).map(Var::Y).chain((0..512).map(Var::Z));
    for v in positions {
        let mut p = honest.clone();
        p.flip(v);
        let rep = accept_probability(&p, &sys, &[true, true]).unwrap();
        assert!(rep.accept < 1.0, "{v:?}");
    }
}

#[test]
fn linearity_rejection_is_enumerated_fraction() {
    let c = and_gate();
    let sys = PackedSystem::new(&circuit_to_quadsystem(&c).unwrap()).unwrap();
    let mut p = HadamardProof::honest(&honest_assignment(&c, &[true, true])).unwrap();
    p.flip(Var::Y(0b101));
    let rep = accept_probability(&p, &sys, &[true, true]).unwrap();
    let mut bad = 0;
    for y in 0..8u64 {
        for y2 in 0..8u64 {
            let get = |a: u64| p.get(Var::Y(a));
            bad += (get(y) ^ get(y2) != get(y ^ y2)) as u32;
        }
    }
    assert_eq!(1.0 - rep.per_test[0], bad as f64 / 64.0);
    assert!(bad > 0);
}

#[test]
fn mismatched_tensor_table_fails_consistency() {
    let c = and_gate();
    let sys = PackedSystem::new(&circuit_to_quadsystem(&c).unwrap()).unwrap();
    let y = HadamardProof::honest(&[true, true, true]).unwrap();
    let z = HadamardProof::honest(&[true, false, true]).unwrap();
    let mixed = HadamardProof { n: 3, y: y.y, z: z.z };
    let rep = accept_probability(&mixed, &sys, &[true, true]).unwrap();
    assert!(rep.per_test[2] < 1.0);
}

#[test]
fn malformed_randomness_is_rejected() {
    let sys = PackedSystem::new(&tiny()).unwrap();
    let proof = HadamardProof::honest(&[true, true]).unwrap();
    let r = Randomness([0, 0, 0, 0, 0, 0, 0, 1, 0]);
    assert!(qmaplus::pcp::hadamard::verify(&proof, &sys, &[true], &r).is_err());
}

#[test]
fn hex_json_roundtrip() {
    let q = circuit_to_quadsystem(&and_gate()).unwrap();
    let s = serde_json::to_string(&q).unwrap();
    assert_eq!(serde_json::from_str::<QuadSystem>(&s).unwrap(), q);
    let p = HadamardProof::honest(&[true, false, true]).unwrap();
    let s = serde_json::to_string(&p).unwrap();
    assert!(s.contains("\"hex\""));
    assert_eq!(serde_json::from_str::<HadamardProof>(&s).unwrap(), p);
}

#[test]
fn adjacency_maps_complete_enumeration() {
    let sys = PackedSystem::new(&tiny()).unwrap();
    let idx = AdjacencyIndex::new(&sys);
    let brute = adjacency_bruteforce(&sys).unwrap();
    let positions = 4 + 16;
    assert_eq!(brute.len(), positions);
    brute.par_iter().for_each(|(var, list)| {
        let adj = idx.list(*var).unwrap();
        assert_eq!(adj.len(), list.len() as u128, "{var:?}");
        list.par_iter().enumerate().for_each(|(k, r)| {
            assert_eq!(adj.index(r).unwrap(), k as u128, "{var:?} {r:?}");
            assert_eq!(adj.from_index(k as u128).unwrap(), *r, "{var:?} {k}");
        });
        assert!(adj.from_index(list.len() as u128).is_err());
    });
}

#[test]
fn input_event_counts_proximity_hits() {
    let sys = PackedSystem::new(&tiny()).unwrap();
    let idx = AdjacencyIndex::new(&sys);
    let layout: Layout = sys.layout;
    let a = unit(0, 2);
    let hits = layout.iter().filter(|r| unit(r.0[7] as usize, 2) == a).count();
    assert_eq!(idx.event_size(Var::Y(a), 5).unwrap(), hits as u128);
}

#[test]
fn index_rejects_non_reading_strings() {
    let sys = PackedSystem::new(&tiny()).unwrap();
    let idx = AdjacencyIndex::new(&sys);
    let r = Randomness([0; 9]);
    let reads = queries(&sys, &r);
    let other = (0..16).map(Var::Z).find(|v| !reads.contains(v)).unwrap();
    assert!(idx.index(other, &r).is_err());
    assert_eq!(tensor(0b11, 0b01, 2), 0b0101);
}

#[test]
fn uniformity_by_type() {
    let c = and_gate();
    let sys = PackedSystem::new(&circuit_to_quadsystem(&c).unwrap()).unwrap();
    let rep = uniformity_audit(&sys).unwrap();
    let positions: usize = rep.coarse.iter().map(|t| t.positions).sum();
    assert_eq!(positions, 8 + 512);
    let input = rep.coarse.iter().find(|t| t.kind == PositionType::Input).unwrap();
    assert_eq!(input.degrees.len(), 1);
    assert!(rep.refined_uniform, "{rep:#?}");
    let linear = rep.coarse.iter().find(|t| t.kind == PositionType::Linear).unwrap();
    assert_ne!(input.degrees, linear.degrees);
    println!("{}", serde_json::to_string(&rep).unwrap());
}

#[test]
fn uniformity_sizes_match_bruteforce() {
    let sys = PackedSystem::new(&tiny()).unwrap();
    let brute = adjacency_bruteforce(&sys).unwrap();
    let idx = AdjacencyIndex::new(&sys);
    let rep = uniformity_audit(&sys).unwrap();
    assert!(rep.refined_uniform);
    assert!(!rep.coarse_uniform);
    for (var, list) in &brute {
        assert_eq!(idx.size(*var).unwrap(), list.len() as u128);
    }
}
