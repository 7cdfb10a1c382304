//! Dense statevectors and the handful of operations the protocols need.

use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::{seeded, Rng};

pub const TOL: f64 = 1e-9;

pub type C64 = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    /// Validates unit norm.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n2 = norm_sqr(&amps);
        if amps.is_empty() {
            return Err(Error::ZeroVector);
        }
        if (n2 - 1.0).abs() > TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amps })
    }

    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let n = norm_sqr(&amps).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        amps.iter_mut().for_each(|a| *a /= n);
        Ok(Self { amps })
    }

    pub fn from_real(xs: &[f64]) -> Result<Self> {
        Self::normalized(xs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::IndexOutOfRange { index: i, dim });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[i] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn uniform(dim: usize) -> Self {
        let a = 1.0 / (dim as f64).sqrt();
        Self { amps: vec![C64::new(a, 0.0); dim] }
    }

    /// Haar-random state from a normalized complex Gaussian vector.
    pub fn haar(dim: usize, rng: &mut Rng) -> Self {
        let amps = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im)
            })
            .collect();
        Self::normalized(amps).expect("gaussian vector is nonzero")
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    /// Real parts if the state is real and non-negative within tolerance.
    pub fn as_nonneg(&self) -> Result<Vec<f64>> {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if a.im.abs() > TOL || a.re < -TOL {
                    Err(Error::NotNonnegative { index: i })
                } else {
                    Ok(a.re.max(0.0))
                }
            })
            .collect()
    }

    pub fn is_nonneg(&self) -> bool {
        self.as_nonneg().is_ok()
    }

    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_dim(self.dim(), perm.len())?;
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (i, &p) in perm.iter().enumerate() {
            out[p] = self.amps[i];
        }
        Ok(Self { amps: out })
    }
}

fn norm_sqr(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    dim: usize,
    amps: Vec<[f64; 2]>,
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateRepr {
            dim: self.dim(),
            amps: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = StateRepr::deserialize(d)?;
        if r.dim != r.amps.len() {
            return Err(serde::de::Error::custom("dim does not match amps length"));
        }
        StateVector::new(r.amps.iter().map(|&[re, im]| C64::new(re, im)).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// Unit vector with non-negative real entries.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegState {
    amps: Vec<f64>,
}

impl NonnegState {
    pub fn new(amps: Vec<f64>) -> Result<Self> {
        if let Some(i) = amps.iter().position(|&a| !(a >= 0.0)) {
            return Err(Error::NotNonnegative { index: i });
        }
        let n2: f64 = amps.iter().map(|a| a * a).sum();
        if (n2 - 1.0).abs() > TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amps })
    }

    pub fn normalized(amps: Vec<f64>) -> Result<Self> {
        if let Some(i) = amps.iter().position(|&a| !(a >= 0.0)) {
            return Err(Error::NotNonnegative { index: i });
        }
        let n = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self { amps: amps.into_iter().map(|a| a / n).collect() })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[f64] {
        &self.amps
    }

    pub fn to_state(&self) -> StateVector {
        StateVector { amps: self.amps.iter().map(|&a| C64::new(a, 0.0)).collect() }
    }
}

impl TryFrom<&StateVector> for NonnegState {
    type Error = Error;
    fn try_from(s: &StateVector) -> Result<Self> {
        Ok(Self { amps: s.as_nonneg()? })
    }
}

/// Flat state `1_S/√|S|` on `n` coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SubsetRepr", into = "SubsetRepr")]
pub struct SubsetState {
    n: usize,
    set: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SubsetRepr {
    n: usize,
    #[serde(rename = "S")]
    s: Vec<usize>,
}

impl TryFrom<SubsetRepr> for SubsetState {
    type Error = Error;
    fn try_from(r: SubsetRepr) -> Result<Self> {
        SubsetState::new(r.n, r.s)
    }
}

impl From<SubsetState> for SubsetRepr {
    fn from(s: SubsetState) -> Self {
        SubsetRepr { n: s.n, s: s.set }
    }
}

impl SubsetState {
    pub fn new(n: usize, mut set: Vec<usize>) -> Result<Self> {
        set.sort_unstable();
        set.dedup();
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        if let Some(&i) = set.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: i, dim: n });
        }
        Ok(Self { n, set })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn set(&self) -> &[usize] {
        &self.set
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn complement(&self) -> Result<Self> {
        let s: Vec<usize> = (0..self.n).filter(|i| self.set.binary_search(i).is_err()).collect();
        Self::new(self.n, s)
    }

    pub fn to_nonneg(&self) -> NonnegState {
        let a = 1.0 / (self.set.len() as f64).sqrt();
        let mut amps = vec![0.0; self.n];
        for &i in &self.set {
            amps[i] = a;
        }
        NonnegState { amps }
    }

    pub fn to_state(&self) -> StateVector {
        self.to_nonneg().to_state()
    }
}

/// State on `[n]×[q]` flattened as `i·q + v`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledState {
    n: usize,
    q: usize,
    state: StateVector,
}

impl LabeledState {
    pub fn new(n: usize, q: usize, state: StateVector) -> Result<Self> {
        check_dim(n * q, state.dim())?;
        Ok(Self { n, q, state })
    }

    /// The valid-set member for a full labeling.
    pub fn from_labeling(q: usize, labels: &[usize]) -> Result<Self> {
        let n = labels.len();
        let a = 1.0 / (n as f64).sqrt();
        let mut amps = vec![C64::new(0.0, 0.0); n * q];
        for (i, &v) in labels.iter().enumerate() {
            if v >= q {
                return Err(Error::IndexOutOfRange { index: v, dim: q });
            }
            amps[i * q + v] = C64::new(a, 0.0);
        }
        Self::new(n, q, StateVector::new(amps)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// Exact membership in the valid set: amplitude `1/√n` on exactly one label per vertex.
    pub fn is_valid(&self) -> bool {
        let a = 1.0 / (self.n as f64).sqrt();
        (0..self.n).all(|i| {
            let block = &self.state.amps[i * self.q..(i + 1) * self.q];
            let hits = block.iter().filter(|z| (z.re - a).abs() < TOL && z.im.abs() < TOL).count();
            let zeros = block.iter().filter(|z| z.norm() < TOL).count();
            hits == 1 && zeros == self.q - 1
        })
    }

    /// The labeling if the state is valid.
    pub fn labeling(&self) -> Option<Vec<usize>> {
        if !self.is_valid() {
            return None;
        }
        Some(
            (0..self.n)
                .map(|i| (0..self.q).find(|&v| self.state.amps[i * self.q + v].norm() > TOL).unwrap())
                .collect(),
        )
    }
}

pub fn tensor(a: &StateVector, b: &StateVector) -> StateVector {
    let amps = a.amps.iter().flat_map(|&x| b.amps.iter().map(move |&y| x * y)).collect();
    StateVector { amps }
}

/// `⟨a|b⟩`, conjugate-linear in the first argument.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<C64> {
    check_dim(a.dim(), b.dim())?;
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

pub fn trace_distance_pure(a: &StateVector, b: &StateVector) -> Result<f64> {
    let o = overlap(a, b)?.norm_sqr().min(1.0);
    Ok((1.0 - o).max(0.0).sqrt())
}

pub fn subset_state_distance(s: &SubsetState, t: &SubsetState) -> Result<f64> {
    check_dim(s.n, t.n)?;
    if !s.set.iter().all(|i| t.set.binary_search(i).is_ok()) {
        return Err(Error::NotNested);
    }
    Ok(((t.len() - s.len()) as f64 / t.len() as f64).sqrt())
}

/// Unitary q-point DFT on the value register of each vertex block.
pub fn dft_value_register(psi: &LabeledState) -> Result<StateVector> {
    let (n, q) = (psi.n, psi.q);
    if q < 2 {
        return Err(Error::InvalidParameter("q must be at least 2".into()));
    }
    let scale = 1.0 / (q as f64).sqrt();
    let omega: Vec<C64> = (0..q)
        .map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / q as f64))
        .collect();
    let mut out = vec![C64::new(0.0, 0.0); n * q];
    for i in 0..n {
        let block = &psi.state.amps[i * q..(i + 1) * q];
        for w in 0..q {
            out[i * q + w] = block.iter().enumerate().map(|(v, &a)| a * omega[(v * w) % q]).sum::<C64>() * scale;
        }
    }
    StateVector::normalized(out)
}

/// Row-major product of registers; `dims[0]` is most significant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterSpec {
    pub dims: Vec<usize>,
    pub target: usize,
}

impl RegisterSpec {
    pub fn new(dims: Vec<usize>, target: usize) -> Result<Self> {
        if target >= dims.len() {
            return Err(Error::IndexOutOfRange { index: target, dim: dims.len() });
        }
        Ok(Self { dims, target })
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Value of the target register at flat index `idx`.
    pub fn digit(&self, idx: usize) -> usize {
        let stride: usize = self.dims[self.target + 1..].iter().product();
        (idx / stride) % self.dims[self.target]
    }
}

pub fn measure_distribution(psi: &StateVector, spec: &RegisterSpec) -> Result<Vec<f64>> {
    check_dim(spec.total(), psi.dim())?;
    let mut p = vec![0.0; spec.dims[spec.target]];
    for (i, a) in psi.amps.iter().enumerate() {
        p[spec.digit(i)] += a.norm_sqr();
    }
    Ok(p)
}

/// Post-measurement state for a given outcome.
pub fn collapse(psi: &StateVector, spec: &RegisterSpec, outcome: usize) -> Result<StateVector> {
    check_dim(spec.total(), psi.dim())?;
    if outcome >= spec.dims[spec.target] {
        return Err(Error::IndexOutOfRange { index: outcome, dim: spec.dims[spec.target] });
    }
    let amps: Vec<C64> = psi
        .amps
        .iter()
        .enumerate()
        .map(|(i, &a)| if spec.digit(i) == outcome { a } else { C64::new(0.0, 0.0) })
        .collect();
    StateVector::normalized(amps).map_err(|_| Error::ZeroProbability(outcome))
}

pub fn sample_index(probs: &[f64], rng: &mut Rng) -> usize {
    let x: f64 = rng.gen::<f64>() * probs.iter().sum::<f64>();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if x < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

pub fn measure_register(psi: &StateVector, spec: &RegisterSpec, seed: u64) -> Result<(usize, StateVector)> {
    measure_register_with(psi, spec, &mut seeded(seed))
}

pub fn measure_register_with(psi: &StateVector, spec: &RegisterSpec, rng: &mut Rng) -> Result<(usize, StateVector)> {
    let p = measure_distribution(psi, spec)?;
    let k = sample_index(&p, rng);
    Ok((k, collapse(psi, spec, k)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_basis() {
        let s = tensor(&StateVector::basis(2, 0).unwrap(), &StateVector::basis(2, 1).unwrap());
        assert_eq!(s.dim(), 4);
        assert_eq!(s.amps()[1], C64::new(1.0, 0.0));
    }

    #[test]
    fn subset_distance_half() {
        let s = SubsetState::new(4, vec![0]).unwrap();
        let t = SubsetState::new(4, vec![0, 1]).unwrap();
        assert!((subset_state_distance(&s, &t).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(subset_state_distance(&t, &s), Err(Error::NotNested));
    }

    #[test]
    fn dft_valid_and_superposed() {
        let v = LabeledState::from_labeling(2, &[0, 1]).unwrap();
        let spec = RegisterSpec::new(vec![2, 2], 1).unwrap();
        let p = measure_distribution(&dft_value_register(&v).unwrap(), &spec).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12);
        let h = 0.5f64.sqrt();
        let phi = StateVector::from_real(&[h, h, 0.0, 0.0]).unwrap();
        let phi = LabeledState::new(2, 2, phi).unwrap();
        let p = measure_distribution(&dft_value_register(&phi).unwrap(), &spec).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12);
        assert!(!phi.is_valid());
    }

    #[test]
    fn json_shapes() {
        let s = SubsetState::new(8, vec![3, 1]).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"n":8,"S":[1,3]}"#);
        let v = StateVector::basis(2, 1).unwrap();
        let j = serde_json::to_string(&v).unwrap();
        assert_eq!(j, r#"{"dim":2,"amps":[[0.0,0.0],[1.0,0.0]]}"#);
        assert_eq!(serde_json::from_str::<StateVector>(&j).unwrap(), v);
        assert!(serde_json::from_str::<StateVector>(r#"{"dim":1,"amps":[[2.0,0.0]]}"#).is_err());
    }

    #[test]
    fn collapse_zero_probability() {
        let s = StateVector::basis(4, 1).unwrap();
        let spec = RegisterSpec::new(vec![2, 2], 1).unwrap();
        assert_eq!(collapse(&s, &spec, 0), Err(Error::ZeroProbability(0)));
        let (k, post) = measure_register(&s, &spec, 3).unwrap();
        assert_eq!(k, 1);
        assert_eq!(post, s);
    }
}
