//! Small named instances shared by experiments and the acceptance suite.

use qmaplus::graphs::{circulant, decompose_into_permutations, random_simple_regular, RegularGraph};
use qmaplus::pcp::bits::Bits;
use qmaplus::pcp::quad::{Circuit, Gate, Lit, QuadSystem};
use qmaplus::protocols::csp::{CspConstraint, CspToyInstance};
use qmaplus::protocols::ug::{GeneralUg, UgInstance};
use qmaplus::rng::seeded;
use qmaplus::Result;

fn from_adjacency(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<RegularGraph> {
    let mut adj = vec![vec![0u32; n]; n];
    for (u, v) in edges {
        adj[u][v] += 1;
        adj[v][u] += 1;
    }
    decompose_into_permutations(&adj)
}

pub fn complete(n: usize) -> Result<RegularGraph> {
    from_adjacency(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
}

pub fn petersen() -> Result<RegularGraph> {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    from_adjacency(10, outer.chain(spokes).chain(inner))
}

pub fn cube() -> Result<RegularGraph> {
    from_adjacency(8, (0..8usize).flat_map(|v| (0..3).map(move |b| (v, v ^ (1 << b)))).filter(|(u, v)| u < v))
}

/// Simple graphs on at most 10 vertices used by the quadratic-form audit.
pub fn audit_graphs() -> Result<Vec<(String, RegularGraph)>> {
    let mut rng = seeded(5);
    Ok(vec![
        ("petersen".into(), petersen()?),
        ("cube".into(), cube()?),
        ("cycle-9".into(), circulant(9, 2)),
        ("random-8-3".into(), random_simple_regular(8, 3, &mut rng)?),
        ("random-10-3".into(), random_simple_regular(10, 3, &mut rng)?),
        ("random-10-4".into(), random_simple_regular(10, 4, &mut rng)?),
    ])
}

fn shift(q: usize, s: usize) -> Vec<usize> {
    (0..q).map(|v| (v + s) % q).collect()
}

/// Cycle with constraints `ℓ(i+1) = ℓ(i) + s`, satisfiable when `n·s ≡ 0 (mod q)`.
pub fn shift_cycle(n: usize, q: usize, s: usize) -> Result<UgInstance> {
    let c = vec![vec![shift(q, s); n], vec![shift(q, (q - s % q) % q); n]];
    UgInstance::new(circulant(n, 2), q, c)
}

/// Equality cycle with one edge shifted by one; value `1 − 1/n`.
pub fn frustrated_cycle(n: usize, q: usize) -> Result<UgInstance> {
    let mut fwd = vec![shift(q, 0); n];
    let mut back = vec![shift(q, 0); n];
    fwd[n - 1] = shift(q, 1);
    back[0] = shift(q, q - 1);
    UgInstance::new(circulant(n, 2), q, vec![fwd, back])
}

pub fn general_ug(n: usize, q: usize, edges: &[(usize, usize, usize)]) -> GeneralUg {
    GeneralUg { n, q, edges: edges.iter().map(|&(u, v, s)| (u, v, shift(q, s))).collect() }
}

/// Irregular binary games for the regularization checks.
pub fn irregular_games() -> Vec<GeneralUg> {
    vec![
        general_ug(4, 2, &[(0, 1, 0), (1, 2, 0), (2, 3, 0)]),
        general_ug(4, 2, &[(0, 1, 0), (1, 2, 0), (2, 0, 1), (2, 3, 1)]),
        general_ug(5, 2, &[(0, 1, 1), (1, 2, 1), (2, 0, 1), (3, 4, 0), (0, 4, 1)]),
        general_ug(3, 2, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]),
    ]
}

/// Binary equality constraints around a cycle; the last one is negated if asked.
pub fn csp_ring(n: usize, last_differs: bool) -> Result<CspToyInstance> {
    let eq = [true, false, false, true];
    let cs = (0..n)
        .map(|j| {
            let flip = last_differs && j == n - 1;
            CspConstraint { vars: vec![j, (j + 1) % n], accept: eq.iter().map(|&b| b != flip).collect() }
        })
        .collect();
    CspToyInstance::new(n, 2, 2, cs)
}

/// Three odd-parity constraints on five bits, satisfied by `01010`.
pub fn csp_parity() -> Result<CspToyInstance> {
    let odd: Vec<bool> = (0..8usize).map(|t| t.count_ones() % 2 == 1).collect();
    let cs = [[0, 1, 2], [2, 3, 4], [0, 3, 4]]
        .into_iter()
        .map(|vars| CspConstraint { vars: vars.to_vec(), accept: odd.clone() })
        .collect();
    CspToyInstance::new(5, 2, 3, cs)
}

pub const CSP_PARITY_SOLUTION: [usize; 5] = [0, 1, 0, 1, 0];

pub fn and_gate() -> Circuit {
    Circuit { inputs: 2, gates: vec![Gate::And { x: Lit::pos(0), y: Lit::pos(1) }], fixed: vec![] }
}

/// `x_0 x_1 = 1` on two variables with one input bit.
pub fn tiny_system() -> QuadSystem {
    QuadSystem { n: 2, m: 1, rows: vec![Bits::from_u64_msb(0b0100, 4)], b: Bits::from_bools(&[true]) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_expected_shape() {
        assert_eq!((petersen().unwrap().n(), petersen().unwrap().d()), (10, 3));
        assert_eq!((cube().unwrap().n(), cube().unwrap().d()), (8, 3));
        assert!((frustrated_cycle(8, 2).unwrap().best_value().unwrap().0 - 7.0 / 8.0).abs() < 1e-12);
        assert_eq!(shift_cycle(6, 3, 1).unwrap().best_value().unwrap().0, 1.0);
        let p = csp_parity().unwrap();
        assert_eq!(p.value(&CSP_PARITY_SOLUTION), 1.0);
        assert_eq!(csp_ring(4, true).unwrap().best_value().unwrap().0, 0.75);
    }
}
