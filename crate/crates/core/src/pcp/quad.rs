//! Fan-in-2 circuits and their quadratic systems over GF(2).

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::bits::{gf2_rank, Bits};
use crate::error::{Error, Result};
use crate::rng::seeded;

/// A variable index, possibly negated. Inputs are `0..m`, gate `g` is `m + g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lit {
    pub var: usize,
    #[serde(default)]
    pub negated: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Self { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Self { var, negated: true }
    }

    fn flip(self) -> Self {
        Self { negated: !self.negated, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Gate {
    And { x: Lit, y: Lit },
    Or { x: Lit, y: Lit },
    Not { x: Lit },
}

/// The last gate is the output. `fixed` pins some input bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub inputs: usize,
    pub gates: Vec<Gate>,
    #[serde(default)]
    pub fixed: Vec<(usize, bool)>,
}

impl Circuit {
    pub fn validate(&self) -> Result<()> {
        if self.gates.is_empty() {
            return Err(Error::InvalidParameter("circuit has no gates".into()));
        }
        for (g, gate) in self.gates.iter().enumerate() {
            let lits: &[Lit] = match gate {
                Gate::And { x, y } | Gate::Or { x, y } => &[*x, *y],
                Gate::Not { x } => &[*x],
            };
            if lits.iter().any(|l| l.var >= self.inputs + g) {
                return Err(Error::InvalidParameter(format!("gate {g} reads a later wire")));
            }
        }
        if self.fixed.iter().any(|&(i, _)| i >= self.inputs) {
            return Err(Error::InvalidParameter("fixed bit outside the inputs".into()));
        }
        Ok(())
    }

    pub fn eval_wires(&self, input: &[bool]) -> Vec<bool> {
        let mut w = input.to_vec();
        let read = |w: &[bool], l: Lit| w[l.var] ^ l.negated;
        for gate in &self.gates {
            let v = match *gate {
                Gate::And { x, y } => read(&w, x) && read(&w, y),
                Gate::Or { x, y } => read(&w, x) || read(&w, y),
                Gate::Not { x } => !read(&w, x),
            };
            w.push(v);
        }
        w
    }

    pub fn eval(&self, input: &[bool]) -> bool {
        *self.eval_wires(input).last().unwrap()
    }

    /// Exhaustive search over inputs that agree with `fixed`.
    pub fn satisfiable(&self) -> Result<bool> {
        if self.inputs > 20 {
            return Err(Error::BudgetExceeded(format!("{} inputs", self.inputs)));
        }
        Ok((0..1u64 << self.inputs).any(|x| {
            let input: Vec<bool> = (0..self.inputs).map(|i| (x >> i) & 1 == 1).collect();
            self.fixed.iter().all(|&(i, b)| input[i] == b) && self.eval(&input)
        }))
    }

    /// Wires as literals over the reduced variable set, with NOT gates folded away.
    fn folded(&self) -> (Vec<Lit>, usize) {
        let mut map: Vec<Lit> = (0..self.inputs).map(Lit::pos).collect();
        let mut next = self.inputs;
        let resolve = |map: &[Lit], l: Lit| if l.negated { map[l.var].flip() } else { map[l.var] };
        for gate in &self.gates {
            let lit = match *gate {
                Gate::Not { x } => resolve(&map, x).flip(),
                _ => {
                    next += 1;
                    Lit::pos(next - 1)
                }
            };
            map.push(lit);
        }
        (map, next)
    }
}

/// `A (x ⊗ x) = b` with `x` of length `n` whose first `m` entries are the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadSystem {
    pub n: usize,
    pub m: usize,
    pub rows: Vec<Bits>,
    pub b: Bits,
}

/// Linear-plus-constant form over GF(2): a set of monomials `x_j x_k` (with `j = k` for linear terms).
#[derive(Default)]
struct Poly {
    terms: Vec<(usize, usize)>,
    constant: bool,
}

impl Poly {
    fn toggle(&mut self, j: usize, k: usize) {
        let key = (j.min(k), j.max(k));
        if let Some(pos) = self.terms.iter().position(|&t| t == key) {
            self.terms.swap_remove(pos);
        } else {
            self.terms.push(key);
        }
    }

    /// Adds `l`, which stands for `x` or `1 + x`.
    fn add_lit(&mut self, l: Lit) {
        self.toggle(l.var, l.var);
        self.constant ^= l.negated;
    }

    /// Adds the product of two literals.
    fn add_product(&mut self, a: Lit, b: Lit) {
        self.toggle(a.var, b.var);
        if b.negated {
            self.toggle(a.var, a.var);
        }
        if a.negated {
            self.toggle(b.var, b.var);
        }
        self.constant ^= a.negated && b.negated;
    }

    fn row(&self, n: usize) -> (Bits, bool) {
        let mut r = Bits::zeros(n * n);
        for &(j, k) in &self.terms {
            r.set(j * n + k, true);
        }
        (r, self.constant)
    }
}

pub fn circuit_to_quadsystem(circuit: &Circuit) -> Result<QuadSystem> {
    circuit.validate()?;
    let (map, n) = circuit.folded();
    let m = circuit.inputs;
    let resolve = |l: Lit| if l.negated { map[l.var].flip() } else { map[l.var] };
    let mut polys = Vec::new();
    for (g, gate) in circuit.gates.iter().enumerate() {
        let z = map[m + g];
        let mut p = Poly::default();
        match *gate {
            Gate::And { x, y } => {
                p.add_product(resolve(x), resolve(y));
                p.add_lit(z);
            }
            Gate::Or { x, y } => {
                let (x, y) = (resolve(x), resolve(y));
                p.add_lit(z);
                p.add_lit(x);
                p.add_lit(y);
                p.add_product(x, y);
            }
            Gate::Not { .. } => continue,
        }
        polys.push(p);
    }
    let mut top = Poly::default();
    top.add_lit(*map.last().unwrap());
    top.constant ^= true;
    polys.push(top);
    for &(i, bit) in &circuit.fixed {
        let mut p = Poly::default();
        p.add_lit(Lit::pos(i));
        p.constant ^= bit;
        polys.push(p);
    }
    let (rows, consts): (Vec<Bits>, Vec<bool>) = polys.iter().map(|p| p.row(n)).unzip();
    let sys = QuadSystem { n, m, rows, b: Bits::from_bools(&consts) };
    let rank = sys.rank();
    if rank < sys.rows.len() {
        return Err(Error::Precondition(format!("rows are dependent: rank {rank} of {}", sys.rows.len())));
    }
    Ok(sys)
}

impl QuadSystem {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rank(&self) -> usize {
        gf2_rank(&self.rows)
    }

    pub fn tensor(x: &[bool]) -> Bits {
        let n = x.len();
        let mut t = Bits::zeros(n * n);
        for j in (0..n).filter(|&j| x[j]) {
            for k in (0..n).filter(|&k| x[k]) {
                t.set(j * n + k, true);
            }
        }
        t
    }

    pub fn satisfied_by(&self, x: &[bool]) -> bool {
        x.len() == self.n && {
            let t = Self::tensor(x);
            self.rows.iter().enumerate().all(|(k, r)| r.dot(&t) == self.b.get(k))
        }
    }

    /// Exhaustive: is there a solution whose first `m` entries equal `input`?
    pub fn has_extension(&self, input: &[bool]) -> Result<bool> {
        let free = self.n - self.m;
        if free > 22 {
            return Err(Error::BudgetExceeded(format!("{free} free variables")));
        }
        Ok((0..1u64 << free).any(|w| {
            let mut x = input.to_vec();
            x.extend((0..free).map(|i| (w >> i) & 1 == 1));
            self.satisfied_by(&x)
        }))
    }

    /// Exhaustive: any solution at all.
    pub fn solvable(&self) -> Result<bool> {
        if self.n > 22 {
            return Err(Error::BudgetExceeded(format!("{} variables", self.n)));
        }
        Ok((0..1u64 << self.n).any(|w| {
            let x: Vec<bool> = (0..self.n).map(|i| (w >> i) & 1 == 1).collect();
            self.satisfied_by(&x)
        }))
    }
}

/// The satisfying wire assignment over the folded variables.
pub fn honest_assignment(circuit: &Circuit, input: &[bool]) -> Vec<bool> {
    let wires = circuit.eval_wires(input);
    let (map, n) = circuit.folded();
    let mut x = vec![false; n];
    for (w, lit) in map.iter().enumerate() {
        if !lit.negated {
            x[lit.var] = wires[w];
        }
    }
    x
}

/// A random formula: every gate feeds exactly one later gate, leaves are inputs.
pub fn random_formula(inputs: usize, gates: usize, seed: u64) -> Circuit {
    let mut rng = seeded(seed);
    let mut open: Vec<usize> = Vec::new();
    let mut out = Vec::with_capacity(gates);
    for g in 0..gates {
        let remaining = gates - g;
        let take = |rng: &mut crate::rng::Rng, open: &mut Vec<usize>, avoid: Option<usize>| -> Lit {
            let use_open = !open.is_empty() && (open.len() >= remaining || rng.gen_bool(0.5));
            let var = if use_open {
                open.swap_remove(rng.gen_range(0..open.len()))
            } else {
                loop {
                    let v = rng.gen_range(0..inputs);
                    if Some(v) != avoid || inputs == 1 {
                        break v;
                    }
                }
            };
            Lit { var, negated: rng.gen_bool(0.3) }
        };
        let last = g + 1 == gates;
        let gate = if !last && rng.gen_bool(0.1) && !open.is_empty() {
            Gate::Not { x: take(&mut rng, &mut open, None) }
        } else {
            let x = take(&mut rng, &mut open, None);
            let y = take(&mut rng, &mut open, Some(x.var));
            if rng.gen_bool(0.5) {
                Gate::And { x, y }
            } else {
                Gate::Or { x, y }
            }
        };
        out.push(gate);
        open.push(inputs + g);
        if last {
            // leftover open gates are joined into the output by an AND chain
            open.retain(|&v| v != inputs + g);
            while let Some(v) = open.pop() {
                let prev = inputs + out.len() - 1;
                out.push(Gate::And { x: Lit::pos(prev), y: Lit::pos(v) });
            }
        }
    }
    Circuit { inputs, gates: out, fixed: Vec::new() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_and() {
        let c = Circuit { inputs: 2, gates: vec![Gate::And { x: Lit::pos(0), y: Lit::neg(1) }], fixed: vec![] };
        let q = circuit_to_quadsystem(&c).unwrap();
        assert_eq!((q.n, q.len()), (3, 2));
        assert!(q.satisfied_by(&[true, false, true]));
        assert!(!q.satisfied_by(&[true, true, true]));
        assert!(q.satisfied_by(&honest_assignment(&c, &[true, false])));
    }

    #[test]
    fn not_is_folded() {
        let c = Circuit {
            inputs: 2,
            gates: vec![Gate::Or { x: Lit::pos(0), y: Lit::pos(1) }, Gate::Not { x: Lit::pos(2) }],
            fixed: vec![],
        };
        let q = circuit_to_quadsystem(&c).unwrap();
        assert_eq!(q.n, 3);
        assert!(q.satisfied_by(&honest_assignment(&c, &[false, false])));
        assert!(!q.solvable().unwrap() || c.satisfiable().unwrap());
    }
}
