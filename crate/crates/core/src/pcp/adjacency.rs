//! Indexing the random strings that read a given proof position.
//!
//! `AdjV(a)` is the set of random strings `r` whose queries include `a`, listed
//! in lexicographic order of `r`. The index of `r` in that list is computed by
//! inclusion–exclusion over the query events, each of which factorizes over
//! contiguous groups of components.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::hadamard::{queries, tensor, unit, untensor, PackedSystem, Randomness, Var};
use crate::error::{Error, Result};

/// Allowed values of a contiguous block of components.
#[derive(Debug, Clone, PartialEq)]
enum Allowed {
    Free(Vec<u128>),
    Empty,
    /// Sorted.
    Points(Vec<Vec<u64>>),
    FirstFixed { first: u64, second: u128 },
    SecondFixed { second: u64, first: u128 },
    /// `t[1] = t[0] ^ c`.
    Xor { c: u64, first: u128 },
    /// `t[0] = 0` or `t[1] = 0`.
    ZeroProduct { side: u128 },
}

impl Allowed {
    fn size(&self) -> u128 {
        match self {
            Allowed::Free(s) => s.iter().product(),
            Allowed::Empty => 0,
            Allowed::Points(p) => p.len() as u128,
            Allowed::FirstFixed { second, .. } => *second,
            Allowed::SecondFixed { first, .. } | Allowed::Xor { first, .. } => *first,
            Allowed::ZeroProduct { side } => 2 * side - 1,
        }
    }

    /// Allowed tuples strictly below `t`.
    fn below(&self, t: &[u64]) -> u128 {
        match self {
            Allowed::Free(s) => s.iter().zip(t).fold(0, |acc, (&d, &c)| acc * d + c as u128),
            Allowed::Empty => 0,
            Allowed::Points(p) => p.partition_point(|q| q.as_slice() < t) as u128,
            Allowed::FirstFixed { first, second } => match t[0].cmp(first) {
                std::cmp::Ordering::Greater => *second,
                std::cmp::Ordering::Equal => t[1] as u128,
                std::cmp::Ordering::Less => 0,
            },
            Allowed::SecondFixed { second, .. } => t[0] as u128 + (t[1] > *second) as u128,
            Allowed::Xor { c, .. } => t[0] as u128 + ((t[0] ^ c) < t[1]) as u128,
            Allowed::ZeroProduct { side } => {
                if t[0] == 0 {
                    t[1] as u128
                } else {
                    side + (t[0] as u128 - 1) + (t[1] > 0) as u128
                }
            }
        }
    }

    fn contains(&self, t: &[u64]) -> bool {
        match self {
            Allowed::Free(_) => true,
            Allowed::Empty => false,
            Allowed::Points(p) => p.binary_search_by(|q| q.as_slice().cmp(t)).is_ok(),
            Allowed::FirstFixed { first, .. } => t[0] == *first,
            Allowed::SecondFixed { second, .. } => t[1] == *second,
            Allowed::Xor { c, .. } => t[1] == t[0] ^ c,
            Allowed::ZeroProduct { .. } => t[0] == 0 || t[1] == 0,
        }
    }
}

/// Constraints on a pair `(s, t)`: `s = f`, `t = g`, `s ^ t = c`.
fn pair_allowed(fs: Option<u64>, ft: Option<u64>, xor: Option<u64>, ds: u128, dt: u128) -> Allowed {
    let point = |s: u64, t: u64| Allowed::Points(vec![vec![s, t]]);
    match (fs, ft, xor) {
        (Some(s), Some(t), Some(c)) => {
            if s ^ t == c {
                point(s, t)
            } else {
                Allowed::Empty
            }
        }
        (Some(s), None, Some(c)) => point(s, s ^ c),
        (None, Some(t), Some(c)) => point(t ^ c, t),
        (None, None, Some(c)) => Allowed::Xor { c, first: ds },
        (Some(s), Some(t), None) => point(s, t),
        (Some(s), None, None) => Allowed::FirstFixed { first: s, second: dt },
        (None, Some(t), None) => Allowed::SecondFixed { second: t, first: ds },
        (None, None, None) => Allowed::Free(vec![ds, dt]),
    }
}

pub const Y_EVENTS: [&str; 8] = ["y", "y'", "y+y'", "w", "w'", "e_i", "v", "v+e_i"];
pub const Z_EVENTS: [&str; 5] = ["z", "z'", "z+z'", "w⊗w'", "A^T u"];

/// Block boundaries: the groups of components each event family couples.
const Y_GROUPS: [std::ops::Range<usize>; 7] = [0..2, 2..3, 3..4, 4..5, 5..6, 6..7, 7..9];
const Z_GROUPS: [std::ops::Range<usize>; 7] = [0..1, 1..2, 2..4, 4..6, 6..7, 7..8, 8..9];

pub struct AdjacencyIndex<'a> {
    sys: &'a PackedSystem,
}

impl<'a> AdjacencyIndex<'a> {
    pub fn new(sys: &'a PackedSystem) -> Self {
        Self { sys }
    }

    fn check_var(&self, var: Var) -> Result<()> {
        let n = self.sys.layout.n;
        let ok = match var {
            Var::Y(a) => a < 1 << n,
            Var::Z(a) => a < 1 << (n * n),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("{var:?} is not a proof position")))
        }
    }

    fn event_count(var: Var) -> usize {
        match var {
            Var::Y(_) => Y_EVENTS.len(),
            Var::Z(_) => Z_EVENTS.len(),
        }
    }

    /// The intersection of the events in `mask`, as one allowed set per group.
    fn blocks(&self, var: Var, mask: u32) -> Vec<(std::ops::Range<usize>, Allowed)> {
        let sizes = self.sys.layout.sizes();
        let has = |k: usize| mask >> k & 1 == 1;
        let free = |g: &std::ops::Range<usize>| Allowed::Free(sizes[g.clone()].to_vec());
        match var {
            Var::Y(a) => {
                let n = self.sys.layout.n;
                let m = self.sys.layout.m;
                let only = |k: usize| if has(k) { Allowed::Points(vec![vec![a]]) } else { Allowed::Free(vec![sizes[k + 1]]) };
                let iv = if has(7) {
                    // v is pinned by i; `v = a` on top would need `e_i = 0`
                    let is: Vec<u64> = if has(5) {
                        (0..m as u64).filter(|&i| unit(i as usize, n) == a).collect()
                    } else {
                        (0..m as u64).collect()
                    };
                    let pts: Vec<Vec<u64>> = if has(6) {
                        Vec::new()
                    } else {
                        is.iter().map(|&i| vec![i, a ^ unit(i as usize, n)]).collect()
                    };
                    if pts.is_empty() {
                        Allowed::Empty
                    } else {
                        Allowed::Points(pts)
                    }
                } else {
                    let fi = if has(5) {
                        match (0..m as u64).find(|&i| unit(i as usize, n) == a) {
                            Some(i) => Some(i),
                            None => return vec![(0..9, Allowed::Empty)],
                        }
                    } else {
                        None
                    };
                    pair_allowed(fi, has(6).then_some(a), None, sizes[7], sizes[8])
                };
                Y_GROUPS
                    .iter()
                    .map(|g| {
                        let al = match g.start {
                            0 => pair_allowed(
                                has(0).then_some(a),
                                has(1).then_some(a),
                                has(2).then_some(a),
                                sizes[0],
                                sizes[1],
                            ),
                            4 => only(3),
                            5 => only(4),
                            7 => iv.clone(),
                            _ => free(g),
                        };
                        (g.clone(), al)
                    })
                    .collect()
            }
            Var::Z(a) => {
                let n = self.sys.layout.n;
                Z_GROUPS
                    .iter()
                    .map(|g| {
                        let al = match g.start {
                            2 => pair_allowed(
                                has(0).then_some(a),
                                has(1).then_some(a),
                                has(2).then_some(a),
                                sizes[2],
                                sizes[3],
                            ),
                            4 if has(3) => {
                                if a == 0 {
                                    Allowed::ZeroProduct { side: sizes[4] }
                                } else {
                                    match untensor(a, n) {
                                        Some((w, w2)) => Allowed::Points(vec![vec![w, w2]]),
                                        None => Allowed::Empty,
                                    }
                                }
                            }
                            6 if has(4) && self.sys.layout.l == 0 => Allowed::Empty,
                            6 if has(4) => match self.sys.solve_at(a) {
                                Some(u) if self.sys.independent => Allowed::Points(vec![vec![u]]),
                                // dependent rows give a coset; list it
                                Some(_) => Allowed::Points(
                                    (0..sizes[6] as u64).filter(|&u| self.sys.at_u(u) == a).map(|u| vec![u]).collect(),
                                ),
                                None => Allowed::Empty,
                            },
                            _ => free(g),
                        };
                        (g.clone(), al)
                    })
                    .collect()
            }
        }
    }

    /// Events grouped by the block of components they constrain.
    fn event_groups(var: Var) -> Vec<(usize, Vec<usize>)> {
        match var {
            Var::Y(_) => vec![(0, vec![0, 1, 2]), (3, vec![3]), (4, vec![4]), (6, vec![5, 6, 7])],
            Var::Z(_) => vec![(2, vec![0, 1, 2]), (3, vec![3]), (4, vec![4])],
        }
    }

    /// Per-block inclusion–exclusion terms for one position.
    pub fn list(&self, var: Var) -> Result<VarAdjacency<'a>> {
        self.check_var(var)?;
        let sizes = self.sys.layout.sizes();
        let groups = match var {
            Var::Y(_) => &Y_GROUPS,
            Var::Z(_) => &Z_GROUPS,
        };
        let mut blocks: Vec<AvoidBlock> = groups
            .iter()
            .map(|g| AvoidBlock {
                range: g.clone(),
                free: Allowed::Free(sizes[g.clone()].to_vec()),
                terms: Vec::new(),
                size: sizes[g.clone()].iter().product(),
            })
            .collect();
        for (gi, events) in Self::event_groups(var) {
            for sub in 1u32..(1 << events.len()) {
                let mask = events.iter().enumerate().filter(|(j, _)| sub >> j & 1 == 1).fold(0u32, |m, (_, &e)| m | 1 << e);
                let bl = self.blocks(var, mask);
                let al = if bl.len() == groups.len() { bl[gi].1.clone() } else { Allowed::Empty };
                if al != Allowed::Empty {
                    blocks[gi].terms.push((sub.count_ones() % 2 == 1, al));
                }
            }
            let union: i128 = blocks[gi].terms.iter().map(|(odd, a)| if *odd { a.size() as i128 } else { -(a.size() as i128) }).sum();
            blocks[gi].size -= union as u128;
        }
        let avoid: u128 = blocks.iter().map(|b| b.size).product();
        Ok(VarAdjacency { sys: self.sys, var, len: self.sys.layout.total() - avoid, blocks })
    }

    pub fn size(&self, var: Var) -> Result<u128> {
        Ok(self.list(var)?.len())
    }

    /// Size of a single event, for audits.
    pub fn event_size(&self, var: Var, event: usize) -> Result<u128> {
        self.check_var(var)?;
        if event >= Self::event_count(var) {
            return Err(Error::IndexOutOfRange { index: event, dim: Self::event_count(var) });
        }
        Ok(self.blocks(var, 1 << event).iter().map(|(_, a)| a.size()).product())
    }

    /// 0-based position of `r` in `AdjV(var)`.
    pub fn index(&self, var: Var, r: &Randomness) -> Result<u128> {
        self.list(var)?.index(r)
    }

    pub fn from_index(&self, var: Var, index: u128) -> Result<Randomness> {
        self.list(var)?.from_index(index)
    }
}

/// Tuples of one block that satisfy none of its events.
struct AvoidBlock {
    range: std::ops::Range<usize>,
    free: Allowed,
    /// Signed intersections of the block's events.
    terms: Vec<(bool, Allowed)>,
    size: u128,
}

impl AvoidBlock {
    fn below(&self, t: &[u64]) -> u128 {
        let hit: i128 = self.terms.iter().map(|(odd, a)| if *odd { a.below(t) as i128 } else { -(a.below(t) as i128) }).sum();
        self.free.below(t) - hit as u128
    }

    fn contains(&self, t: &[u64]) -> bool {
        self.terms.iter().all(|(_, a)| !a.contains(t))
    }
}

/// `AdjV` of one position, ready for repeated lookups.
///
/// Counts go through the complement: strings reading none of the events
/// factorize over blocks, since events in different blocks are independent.
pub struct VarAdjacency<'a> {
    sys: &'a PackedSystem,
    var: Var,
    blocks: Vec<AvoidBlock>,
    len: u128,
}

impl VarAdjacency<'_> {
    pub fn len(&self) -> u128 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Members strictly below `r`.
    fn count(&self, r: &Randomness) -> u128 {
        let mut avoid = 0;
        for (k, b) in self.blocks.iter().enumerate() {
            let tail: u128 = self.blocks[k + 1..].iter().map(|b| b.size).product();
            let t = &r.0[b.range.clone()];
            avoid += b.below(t) * tail;
            if !b.contains(t) {
                break;
            }
        }
        self.sys.layout.rank(r) - avoid
    }

    pub fn index(&self, r: &Randomness) -> Result<u128> {
        self.sys.layout.check(r)?;
        if !queries(self.sys, r).contains(&self.var) {
            return Err(Error::Precondition(format!("{r:?} does not read {:?}", self.var)));
        }
        Ok(self.count(r))
    }

    /// Inverse of [`Self::index`], by bisection on the rank of `r`.
    pub fn from_index(&self, index: u128) -> Result<Randomness> {
        if index >= self.len {
            return Err(Error::IndexOutOfRange { index: index as usize, dim: self.len as usize });
        }
        let layout = self.sys.layout;
        // largest rank whose strict-below count is ≤ index
        let (mut lo, mut hi) = (0u128, layout.total() - 1);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if self.count(&layout.unrank(mid)) <= index {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Ok(layout.unrank(lo))
    }
}

/// Every `AdjV` list by enumerating all random strings.
pub fn adjacency_bruteforce(sys: &PackedSystem) -> Result<BTreeMap<Var, Vec<Randomness>>> {
    if sys.layout.total() > super::hadamard::ENUMERATION_LIMIT {
        return Err(Error::BudgetExceeded(format!("{} random strings", sys.layout.total())));
    }
    let mut out: BTreeMap<Var, Vec<Randomness>> = BTreeMap::new();
    for r in sys.layout.iter() {
        for v in queries(sys, &r) {
            out.entry(v).or_default().push(r);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionType {
    Input,
    Linear,
    /// Quadratic position, split by rank-one shape and membership in the row space of `Aᵀ`.
    Quadratic { tensor: bool, row_space: bool },
}

pub fn position_type(sys: &PackedSystem, var: Var) -> PositionType {
    let n = sys.layout.n;
    match var {
        Var::Y(a) if (0..sys.layout.m).any(|i| unit(i, n) == a) => PositionType::Input,
        Var::Y(_) => PositionType::Linear,
        Var::Z(a) => PositionType::Quadratic {
            tensor: a == 0 || untensor(a, n).is_some(),
            row_space: sys.solve_at(a).is_some(),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeClass {
    pub kind: PositionType,
    pub zero: bool,
    pub positions: usize,
    /// Distinct `|AdjV|` values seen in this class.
    pub degrees: Vec<u128>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    /// By type alone.
    pub coarse: Vec<TypeClass>,
    /// By type and whether the position is the zero vector.
    pub refined: Vec<TypeClass>,
    pub coarse_uniform: bool,
    pub refined_uniform: bool,
}

pub fn uniformity_audit(sys: &PackedSystem) -> Result<UniformityReport> {
    let idx = AdjacencyIndex::new(sys);
    let n = sys.layout.n;
    let vars = (0..1u64 << n).map(Var::Y).chain((0..1u64 << (n * n)).map(Var::Z));
    let mut fine: BTreeMap<(PositionType, bool), (usize, Vec<u128>)> = BTreeMap::new();
    for v in vars {
        let zero = matches!(v, Var::Y(0) | Var::Z(0));
        let e = fine.entry((position_type(sys, v), zero)).or_default();
        e.0 += 1;
        e.1.push(idx.size(v)?);
    }
    let classes = |merge: bool| {
        let mut acc: BTreeMap<(PositionType, bool), (usize, Vec<u128>)> = BTreeMap::new();
        for (&(k, z), (c, d)) in &fine {
            let e = acc.entry((k, z && !merge)).or_default();
            e.0 += c;
            e.1.extend(d);
        }
        acc.into_iter()
            .map(|((kind, zero), (positions, mut degrees))| {
                degrees.sort_unstable();
                degrees.dedup();
                TypeClass { kind, zero, positions, degrees }
            })
            .collect::<Vec<_>>()
    };
    let (coarse, refined) = (classes(true), classes(false));
    let uniform = |c: &[TypeClass]| c.iter().all(|t| t.degrees.len() == 1);
    Ok(UniformityReport { coarse_uniform: uniform(&coarse), refined_uniform: uniform(&refined), coarse, refined })
}

/// `w ⊗ w'` re-exported for callers that build `Z` positions.
pub fn tensor_position(w: u64, w2: u64, n: usize) -> Var {
    Var::Z(tensor(w, w2, n))
}
