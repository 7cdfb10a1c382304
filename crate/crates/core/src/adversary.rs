//! Worst-case prover search over unentangled proofs, product overlaps and
//! brute-force oracles.

use std::f64::consts::FRAC_PI_2;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::RegularGraph;
use crate::linalg::{hermitian_eigen, quad_form, real_symmetric_eigen, top_eigen, CMatrix, RMatrix};
use crate::qstate::{StateVector, C64};
use crate::rng::{split, Rng};

pub const DEFAULT_RESTARTS: usize = 100;
pub const CONVERGENCE_TOL: f64 = 1e-8;
pub const MAX_ROUNDS: usize = 1000;
pub const GRID_BUDGET: f64 = 1e8;
pub const PHASE_GRID: usize = 16;
/// Largest support enumerated by [`nonneg_quadratic_max`].
pub const KKT_LIMIT: usize = 16;

/// Acceptance probability that is a Hermitian quadratic form in each proof
/// slot once the other slots are fixed.
pub trait AcceptanceFunctional: Sync {
    fn dims(&self) -> Vec<usize>;

    /// `M` with `value = ⟨x_slot, M x_slot⟩` for unit `x_slot`.
    fn effective(&self, slots: &[Vec<C64>], slot: usize) -> CMatrix;

    fn value(&self, slots: &[Vec<C64>]) -> f64 {
        quad_form(&self.effective(slots, 0), &slots[0])
    }
}

/// Single-slot form `⟨x, M x⟩`.
pub struct QuadraticFunctional(pub CMatrix);

impl AcceptanceFunctional for QuadraticFunctional {
    fn dims(&self) -> Vec<usize> {
        vec![self.0.nrows()]
    }

    fn effective(&self, _: &[Vec<C64>], _: usize) -> CMatrix {
        self.0.clone()
    }
}

/// `⟨a⊗b, M a⊗b⟩` for an operator on `C^{da} ⊗ C^{db}`.
pub struct ProductFunctional {
    pub m: CMatrix,
    pub da: usize,
    pub db: usize,
}

impl AcceptanceFunctional for ProductFunctional {
    fn dims(&self) -> Vec<usize> {
        vec![self.da, self.db]
    }

    fn effective(&self, slots: &[Vec<C64>], slot: usize) -> CMatrix {
        let (da, db) = (self.da, self.db);
        if slot == 0 {
            let b = &slots[1];
            CMatrix::from_fn(da, da, |i, k| {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..db {
                    for l in 0..db {
                        acc += b[j].conj() * self.m[(i * db + j, k * db + l)] * b[l];
                    }
                }
                acc
            })
        } else {
            let a = &slots[0];
            CMatrix::from_fn(db, db, |j, l| {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..da {
                    for k in 0..da {
                        acc += a[i].conj() * self.m[(i * db + j, k * db + l)] * a[k];
                    }
                }
                acc
            })
        }
    }
}

/// Expansion test `E_r[½ + |⟨P_r ψ1, ψ2⟩|²/2]` as a two-slot functional.
pub struct ExpansionFunctional<'a> {
    pub graph: &'a RegularGraph,
}

impl AcceptanceFunctional for ExpansionFunctional<'_> {
    fn dims(&self) -> Vec<usize> {
        vec![self.graph.n(); 2]
    }

    fn effective(&self, slots: &[Vec<C64>], slot: usize) -> CMatrix {
        let n = self.graph.n();
        let d = self.graph.d() as f64;
        let mut m = CMatrix::identity(n, n) * C64::new(0.5, 0.0);
        for p in self.graph.perms() {
            let w: Vec<C64> = if slot == 0 {
                (0..n).map(|i| slots[1][p[i]]).collect()
            } else {
                let mut v = vec![C64::new(0.0, 0.0); n];
                for i in 0..n {
                    v[p[i]] = slots[0][i];
                }
                v
            };
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += w[i] * w[j].conj() / (2.0 * d);
                }
            }
        }
        m
    }
}

/// Swap test against a fixed state.
pub struct SwapFunctional(pub StateVector);

impl AcceptanceFunctional for SwapFunctional {
    fn dims(&self) -> Vec<usize> {
        vec![self.0.dim()]
    }

    fn effective(&self, _: &[Vec<C64>], _: usize) -> CMatrix {
        let v = self.0.amps();
        let n = v.len();
        CMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj() * 0.5) + CMatrix::identity(n, n) * C64::new(0.5, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeConstraint {
    Nonnegative,
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProverAnsatz {
    pub dims: Vec<usize>,
    pub constraint: AmplitudeConstraint,
    /// Optional allowed support per slot.
    pub supports: Vec<Option<Vec<usize>>>,
}

impl ProverAnsatz {
    pub fn new(dims: Vec<usize>, constraint: AmplitudeConstraint) -> Self {
        let supports = vec![None; dims.len()];
        Self { dims, constraint, supports }
    }

    pub fn with_common_support(mut self, support: Vec<usize>) -> Self {
        self.supports = vec![Some(support); self.dims.len()];
        self
    }

    fn support(&self, slot: usize) -> Vec<usize> {
        self.supports[slot].clone().unwrap_or_else(|| (0..self.dims[slot]).collect())
    }

    fn validate(&self, f: &dyn AcceptanceFunctional) -> Result<()> {
        if f.dims() != self.dims || self.supports.len() != self.dims.len() {
            return Err(Error::Precondition(format!("ansatz dims {:?} vs functional {:?}", self.dims, f.dims())));
        }
        for (s, &d) in self.supports.iter().zip(&self.dims) {
            if let Some(s) = s {
                if s.is_empty() || s.iter().any(|&i| i >= d) {
                    return Err(Error::InvalidParameter("bad support".into()));
                }
            }
        }
        Ok(())
    }

    fn random_slots(&self, rng: &mut Rng) -> Vec<Vec<C64>> {
        (0..self.dims.len())
            .map(|s| {
                let mut x = vec![C64::new(0.0, 0.0); self.dims[s]];
                for i in self.support(s) {
                    let re: f64 = StandardNormal.sample(rng);
                    x[i] = match self.constraint {
                        AmplitudeConstraint::Nonnegative => C64::new(re.abs(), 0.0),
                        AmplitudeConstraint::General => C64::new(re, StandardNormal.sample(rng)),
                    };
                }
                normalize(x)
            })
            .collect()
    }
}

fn normalize(mut x: Vec<C64>) -> Vec<C64> {
    let n = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    x.iter_mut().for_each(|c| *c /= n);
    x
}

fn restrict_real(m: &CMatrix, support: &[usize]) -> RMatrix {
    RMatrix::from_fn(support.len(), support.len(), |i, j| m[(support[i], support[j])].re)
}

fn restrict(m: &CMatrix, support: &[usize]) -> CMatrix {
    CMatrix::from_fn(support.len(), support.len(), |i, j| m[(support[i], support[j])])
}

fn embed(dim: usize, support: &[usize], x: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); dim];
    for (&i, &v) in support.iter().zip(x) {
        out[i] = v;
    }
    out
}

/// Exact `max ⟨x, M x⟩` over unit `x ≥ 0`: every maximizer is a positive
/// eigenvector of some principal submatrix.
pub fn nonneg_quadratic_max(m: &RMatrix) -> Result<(f64, Vec<f64>)> {
    let n = m.nrows();
    if n > KKT_LIMIT {
        return Err(Error::BudgetExceeded(format!("KKT enumeration on dimension {n}")));
    }
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for mask in 1u32..(1u32 << n) {
        let t: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let sub = RMatrix::from_fn(t.len(), t.len(), |i, j| m[(t[i], t[j])]);
        let (vals, vecs) = real_symmetric_eigen(&sub);
        for c in 0..vals.len() {
            if vals[c] <= best.0 {
                continue;
            }
            let col: Vec<f64> = vecs.column(c).iter().copied().collect();
            let sign = if col.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
            if col.iter().all(|&v| sign * v > -1e-12) {
                let mut x = vec![0.0; n];
                for (&i, &v) in t.iter().zip(&col) {
                    x[i] = (sign * v).max(0.0);
                }
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                x.iter_mut().for_each(|v| *v /= norm);
                let value = crate::linalg::real_quad_form(m, &x);
                if value > best.0 {
                    best = (value, x);
                }
            }
        }
    }
    Ok(best)
}

/// Best unit vector for one slot under the ansatz constraint.
fn exact_slot(m: &CMatrix, support: &[usize], constraint: AmplitudeConstraint) -> Result<(f64, Vec<C64>)> {
    let dim = m.nrows();
    match constraint {
        AmplitudeConstraint::General => {
            let (v, x) = top_eigen(&restrict(m, support));
            Ok((v, embed(dim, support, &x)))
        }
        AmplitudeConstraint::Nonnegative => {
            let (v, x) = nonneg_quadratic_max(&restrict_real(m, support))?;
            let xc: Vec<C64> = x.into_iter().map(|r| C64::new(r, 0.0)).collect();
            Ok((v, embed(dim, support, &xc)))
        }
    }
}

/// One projected power step on a slot; `None` when it would not improve.
fn power_step(m: &CMatrix, shift: f64, x: &[C64], support: &[usize], constraint: AmplitudeConstraint) -> Option<Vec<C64>> {
    let mut y = vec![C64::new(0.0, 0.0); x.len()];
    for &i in support {
        let mut acc = x[i] * shift;
        for &j in support {
            acc += m[(i, j)] * x[j];
        }
        y[i] = match constraint {
            AmplitudeConstraint::Nonnegative => C64::new(acc.re.max(0.0), 0.0),
            AmplitudeConstraint::General => acc,
        };
    }
    let norm = y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return None;
    }
    let y = normalize(y);
    (quad_form(m, &y) >= quad_form(m, x) - 1e-15).then_some(y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub best: f64,
    pub argmax: Vec<Vec<C64>>,
    pub restarts: usize,
    pub rounds: usize,
    pub monotone: bool,
    pub oracle: Option<f64>,
    /// `oracle − best`.
    pub gap: Option<f64>,
}

struct RunOutcome {
    value: f64,
    slots: Vec<Vec<C64>>,
    rounds: usize,
    monotone: bool,
}

fn ascend(f: &dyn AcceptanceFunctional, ansatz: &ProverAnsatz, mut slots: Vec<Vec<C64>>) -> RunOutcome {
    let supports: Vec<Vec<usize>> = (0..slots.len()).map(|s| ansatz.support(s)).collect();
    let mut value = f.value(&slots);
    let mut monotone = true;
    let mut rounds = 0;
    while rounds < MAX_ROUNDS {
        rounds += 1;
        let before = value;
        for s in 0..slots.len() {
            let m = f.effective(&slots, s);
            let shift = hermitian_eigen(&m).0[0].abs() + 1.0;
            for _ in 0..50 {
                match power_step(&m, shift, &slots[s], &supports[s], ansatz.constraint) {
                    Some(y) => {
                        let gain = quad_form(&m, &y) - quad_form(&m, &slots[s]);
                        slots[s] = y;
                        if gain < CONVERGENCE_TOL * 1e-2 {
                            break;
                        }
                    }
                    None => break,
                }
            }
            let now = f.value(&slots);
            if now < value - 1e-12 {
                monotone = false;
            }
            value = now;
        }
        if value - before < CONVERGENCE_TOL {
            break;
        }
    }
    RunOutcome { value, slots, rounds, monotone }
}

/// Alternating ascent from `restarts` seeded random starts.
pub fn maximize_acceptance(
    f: &dyn AcceptanceFunctional,
    ansatz: &ProverAnsatz,
    restarts: usize,
    seed: u64,
) -> Result<SearchReport> {
    ansatz.validate(f)?;
    if restarts == 0 {
        return Err(Error::InvalidParameter("zero restarts".into()));
    }
    let runs: Vec<RunOutcome> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = split(seed, r as u64);
            ascend(f, ansatz, ansatz.random_slots(&mut rng))
        })
        .collect();
    let monotone = runs.iter().all(|r| r.monotone);
    let rounds = runs.iter().map(|r| r.rounds).max().unwrap_or(0);
    // first index wins ties
    let best = runs.into_iter().reduce(|a, b| if b.value > a.value { b } else { a }).expect("restarts > 0");
    Ok(SearchReport { best: best.value, argmax: best.slots, restarts, rounds, monotone, oracle: None, gap: None })
}

/// Grid points on the unit sphere restricted to `dim` coordinates.
fn sphere_grid(dim: usize, step: f64, constraint: AmplitudeConstraint) -> Vec<Vec<C64>> {
    let per = (FRAC_PI_2 / step).ceil() as usize + 1;
    let angles: Vec<f64> = (0..per).map(|k| FRAC_PI_2 * k as f64 / (per - 1) as f64).collect();
    let mut mags: Vec<Vec<f64>> = vec![vec![1.0]];
    for _ in 1..dim {
        let mut next = Vec::with_capacity(mags.len() * per);
        for m in &mags {
            let last = *m.last().unwrap();
            for &a in &angles {
                let mut v = m.clone();
                *v.last_mut().unwrap() = last * a.cos();
                v.push(last * a.sin());
                next.push(v);
            }
        }
        mags = next;
    }
    match constraint {
        AmplitudeConstraint::Nonnegative => {
            mags.into_iter().map(|m| m.into_iter().map(|r| C64::new(r, 0.0)).collect()).collect()
        }
        AmplitudeConstraint::General => {
            let phases: Vec<C64> = (0..PHASE_GRID)
                .map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / PHASE_GRID as f64))
                .collect();
            let mut out = Vec::new();
            for m in mags {
                let combos = PHASE_GRID.pow(dim.saturating_sub(1) as u32);
                for c in 0..combos {
                    let mut code = c;
                    let v: Vec<C64> = m
                        .iter()
                        .enumerate()
                        .map(|(i, &r)| {
                            if i == 0 {
                                C64::new(r, 0.0)
                            } else {
                                let ph = phases[code % PHASE_GRID];
                                code /= PHASE_GRID;
                                ph * r
                            }
                        })
                        .collect();
                    out.push(v);
                }
            }
            out
        }
    }
}

fn grid_size(dim: usize, step: f64, constraint: AmplitudeConstraint) -> f64 {
    let per = (FRAC_PI_2 / step).ceil() + 1.0;
    let phases = match constraint {
        AmplitudeConstraint::Nonnegative => 1.0,
        AmplitudeConstraint::General => (PHASE_GRID as f64).powi(dim as i32 - 1),
    };
    per.powi(dim as i32 - 1) * phases
}

/// Exhaustive grid over every slot but the last, which is solved exactly,
/// followed by exact alternating polish from the best grid point.
pub fn grid_bruteforce(f: &dyn AcceptanceFunctional, ansatz: &ProverAnsatz, step: f64) -> Result<f64> {
    ansatz.validate(f)?;
    let k = ansatz.dims.len();
    let supports: Vec<Vec<usize>> = (0..k).map(|s| ansatz.support(s)).collect();
    let total: f64 = supports[..k - 1].iter().map(|s| grid_size(s.len(), step, ansatz.constraint)).product();
    if total > GRID_BUDGET {
        return Err(Error::BudgetExceeded(format!("{total:.3e} grid points")));
    }
    let grids: Vec<Vec<Vec<C64>>> = supports[..k - 1]
        .iter()
        .enumerate()
        .map(|(s, sup)| {
            sphere_grid(sup.len(), step, ansatz.constraint)
                .into_iter()
                .map(|x| embed(ansatz.dims[s], sup, &x))
                .collect()
        })
        .collect();
    let count = total as usize;
    let last = k - 1;
    let eval = |idx: usize| -> Result<(f64, Vec<Vec<C64>>)> {
        let mut code = idx;
        let mut slots: Vec<Vec<C64>> = grids
            .iter()
            .map(|g| {
                let x = g[code % g.len()].clone();
                code /= g.len();
                x
            })
            .collect();
        slots.push(vec![C64::new(0.0, 0.0); ansatz.dims[last]]);
        let (v, x) = exact_slot(&f.effective(&slots, last), &supports[last], ansatz.constraint)?;
        slots[last] = x;
        Ok((v, slots))
    };
    let results: Vec<(f64, usize)> =
        (0..count).into_par_iter().map(|i| eval(i).map(|(v, _)| (v, i))).collect::<Result<Vec<_>>>()?;
    let (mut best, arg) = results.into_iter().fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a });
    let (_, mut slots) = eval(arg)?;
    for _ in 0..MAX_ROUNDS {
        let before = f.value(&slots);
        for s in 0..k {
            let (_, x) = exact_slot(&f.effective(&slots, s), &supports[s], ansatz.constraint)?;
            slots[s] = x;
        }
        let after = f.value(&slots);
        best = best.max(after);
        if after - before < 1e-13 {
            break;
        }
    }
    Ok(best)
}

/// Runs the grid oracle and records it with the gap.
pub fn attach_oracle(
    report: &mut SearchReport,
    f: &dyn AcceptanceFunctional,
    ansatz: &ProverAnsatz,
    step: f64,
) -> Result<()> {
    let oracle = grid_bruteforce(f, ansatz, step)?;
    report.oracle = Some(oracle);
    report.gap = Some(oracle - report.best);
    Ok(())
}

/// Largest squared overlap with a product state over the given subsystem dims.
pub fn omega(psi: &StateVector, dims: &[usize]) -> Result<f64> {
    crate::qstate::check_dim(dims.iter().product(), psi.dim())?;
    match dims.len() {
        0 | 1 => Ok(1.0),
        2 => Ok(bipartite_omega(psi, dims[0], dims[1])),
        _ => Ok(multipartite_omega(psi, dims, 20, 11)),
    }
}

fn bipartite_omega(psi: &StateVector, da: usize, db: usize) -> f64 {
    let m = CMatrix::from_fn(da, db, |i, j| psi.amps()[i * db + j]);
    let s = m.svd(false, false).singular_values;
    let top = s.iter().cloned().fold(0.0, f64::max);
    top * top
}

/// Contraction of `psi` with the conjugates of every factor except `slot`.
fn contract(psi: &StateVector, dims: &[usize], factors: &[Vec<C64>], slot: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); dims[slot]];
    for (idx, &amp) in psi.amps().iter().enumerate() {
        let mut rem = idx;
        let mut coef = amp;
        let mut own = 0;
        for s in (0..dims.len()).rev() {
            let digit = rem % dims[s];
            rem /= dims[s];
            if s == slot {
                own = digit;
            } else {
                coef *= factors[s][digit].conj();
            }
        }
        out[own] += coef;
    }
    out
}

fn multipartite_omega(psi: &StateVector, dims: &[usize], restarts: usize, seed: u64) -> f64 {
    let ansatz = ProverAnsatz::new(dims.to_vec(), AmplitudeConstraint::General);
    (0..restarts)
        .map(|r| {
            let mut rng = split(seed, r as u64);
            let mut factors = ansatz.random_slots(&mut rng);
            let mut value = 0.0;
            for _ in 0..MAX_ROUNDS {
                let before = value;
                for s in 0..dims.len() {
                    let v = contract(psi, dims, &factors, s);
                    value = v.iter().map(|c| c.norm_sqr()).sum::<f64>();
                    factors[s] = normalize(v);
                }
                if value - before < 1e-14 {
                    break;
                }
            }
            value
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableReport {
    pub value: f64,
    pub lambda_max: f64,
    pub oracle: Option<f64>,
}

/// `max ⟨a⊗b, M a⊗b⟩` over unit product vectors.
pub fn best_separable_value(m: &CMatrix, da: usize, db: usize, restarts: usize, seed: u64) -> Result<SeparableReport> {
    crate::qstate::check_dim(da * db, m.nrows())?;
    let (vals, _) = hermitian_eigen(m);
    if vals[0] < -1e-9 {
        return Err(Error::NotPsd(vals[0]));
    }
    let f = ProductFunctional { m: m.clone(), da, db };
    let ansatz = ProverAnsatz::new(vec![da, db], AmplitudeConstraint::General);
    let report = maximize_acceptance(&f, &ansatz, restarts, seed)?;
    let oracle = if da <= 3 && db <= 3 { Some(grid_bruteforce(&f, &ansatz, 0.05)?) } else { None };
    Ok(SeparableReport { value: report.best, lambda_max: *vals.last().unwrap(), oracle })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_against_zero() {
        let f = SwapFunctional(StateVector::basis(3, 0).unwrap());
        let a = ProverAnsatz::new(vec![3], AmplitudeConstraint::Nonnegative);
        let r = maximize_acceptance(&f, &a, 5, 1).unwrap();
        assert!((r.best - 1.0).abs() < 1e-9);
        assert!(r.argmax[0][0].re > 1.0 - 1e-6);
    }

    #[test]
    fn kkt_diag() {
        let m = RMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.5]));
        let (v, x) = nonneg_quadratic_max(&m).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(x, vec![1.0, 0.0]);
    }

    #[test]
    fn omega_examples() {
        let epr = StateVector::from_real(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((omega(&epr, &[2, 2]).unwrap() - 0.5).abs() < 1e-12);
        let mut g = vec![0.0; 8];
        g[0] = 1.0;
        g[7] = 1.0;
        let ghz = StateVector::from_real(&g).unwrap();
        assert!((omega(&ghz, &[2, 2, 2]).unwrap() - 0.5).abs() < 1e-9);
    }
}
