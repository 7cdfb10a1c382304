//! Phase decomposition, non-negative re-encoding, product-test bounds and the
//! gap-amplification function.

use serde::{Deserialize, Serialize};

use crate::adversary::{nonneg_quadratic_max, omega};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, operator_norm, outer, quad_form, sym_projector, CMatrix, RMatrix};
use crate::property::product_accept_prob;
use crate::qstate::{measure_register, tensor, StateVector, C64};
use crate::rng::split;

/// Phases carried by the four parts, in order.
pub const PART_PHASES: [(f64, f64); 4] = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourDecomposition {
    pub weights: [f64; 4],
    /// Non-negative unit vectors; `None` when the weight is zero.
    pub parts: [Option<Vec<f64>>; 4],
}

impl FourDecomposition {
    pub fn reconstruct(&self, dim: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for (k, part) in self.parts.iter().enumerate() {
            if let Some(p) = part {
                let phase = C64::new(PART_PHASES[k].0, PART_PHASES[k].1) * self.weights[k].sqrt();
                for (o, &v) in out.iter_mut().zip(p) {
                    *o += phase * v;
                }
            }
        }
        out
    }

    /// `(Σ √α_k)²`, at most 4.
    pub fn sqrt_weight_sum_sq(&self) -> f64 {
        self.weights.iter().map(|w| w.sqrt()).sum::<f64>().powi(2)
    }
}

/// Splits amplitudes by the signs of their real and imaginary parts.
pub fn decompose_four(psi: &StateVector) -> FourDecomposition {
    let n = psi.dim();
    let mut raw = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for (i, c) in psi.amps().iter().enumerate() {
        if c.re > 0.0 {
            raw[0][i] = c.re;
        } else if c.re < 0.0 {
            raw[2][i] = -c.re;
        }
        if c.im > 0.0 {
            raw[1][i] = c.im;
        } else if c.im < 0.0 {
            raw[3][i] = -c.im;
        }
    }
    let mut weights = [0.0; 4];
    let mut parts: [Option<Vec<f64>>; 4] = [None, None, None, None];
    for k in 0..4 {
        let w: f64 = raw[k].iter().map(|v| v * v).sum();
        weights[k] = w;
        if w > 0.0 {
            let s = w.sqrt();
            parts[k] = Some(raw[k].iter().map(|v| v / s).collect());
        }
    }
    FourDecomposition { weights, parts }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourSReport {
    pub lambda_max: f64,
    pub s_plus: f64,
    pub ratio: f64,
    /// `(Σ√α)² s⁺` evaluated at a top eigenvector; must dominate `λ_max`.
    pub chain_bound: f64,
    pub passed: bool,
}

/// Compares the unconstrained maximum of `⟨ψ, M ψ⟩` with the non-negative one.
pub fn four_s_bound_check(m: &CMatrix) -> Result<FourSReport> {
    let (vals, vecs) = hermitian_eigen(m);
    if vals[0] < -1e-9 {
        return Err(Error::NotPsd(vals[0]));
    }
    let lambda_max = *vals.last().unwrap();
    if lambda_max > 1.0 + 1e-9 {
        return Err(Error::Precondition(format!("operator norm {lambda_max} exceeds 1")));
    }
    let re = RMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re);
    let (s_plus, _) = nonneg_quadratic_max(&re)?;
    let top: Vec<C64> = vecs.column(vecs.ncols() - 1).iter().copied().collect();
    let dec = decompose_four(&StateVector::normalized(top)?);
    let chain_bound = dec.sqrt_weight_sum_sq() * s_plus;
    let ratio = if s_plus > 0.0 { lambda_max / s_plus } else { f64::INFINITY };
    let passed = lambda_max <= 4.0 * s_plus + 1e-6 && lambda_max <= chain_bound + 1e-9;
    Ok(FourSReport { lambda_max, s_plus, ratio, chain_bound, passed })
}

/// Random PSD operator with norm at most 1.
pub fn random_psd(dim: usize, rank: usize, seed: u64) -> CMatrix {
    let mut rng = split(seed, 0);
    let mut m = CMatrix::zeros(dim, dim);
    for _ in 0..rank.max(1) {
        m += outer(&StateVector::haar(dim, &mut rng)) * C64::new(rand::Rng::gen::<f64>(&mut rng), 0.0);
    }
    let norm = operator_norm(&m);
    if norm > 1.0 {
        m /= C64::new(norm, 0.0);
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReencodedProof {
    pub base: StateVector,
    /// Index `r·4 + sign·2 + field`, sign 0 for non-negative, field 0 for the real part.
    pub encoded: StateVector,
}

pub fn reencode_index(r: usize, negative: bool, imaginary: bool) -> usize {
    r * 4 + (negative as usize) * 2 + imaginary as usize
}

pub fn reencode_plus(psi: &StateVector) -> ReencodedProof {
    let mut out = vec![C64::new(0.0, 0.0); psi.dim() * 4];
    for (r, c) in psi.amps().iter().enumerate() {
        out[reencode_index(r, c.re < 0.0, false)] = C64::new(c.re.abs(), 0.0);
        out[reencode_index(r, c.im < 0.0, true)] = C64::new(c.im.abs(), 0.0);
    }
    let encoded = StateVector::new(out).expect("same norm as the input");
    ReencodedProof { base: psi.clone(), encoded }
}

/// Sign transform: `|+⟩ ↦ (|0⟩+|1⟩)/√2`, `|−⟩ ↦ (−|0⟩+|1⟩)/√2`.
pub fn sign_transform() -> [[C64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[C64::new(h, 0.0), C64::new(-h, 0.0)], [C64::new(h, 0.0), C64::new(h, 0.0)]]
}

/// Field transform: `|ℝ⟩ ↦ (|0⟩+i|1⟩)/√2`, `|ℂ⟩ ↦ (i|0⟩+|1⟩)/√2`.
pub fn field_transform() -> [[C64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[C64::new(h, 0.0), C64::new(0.0, h)], [C64::new(0.0, h), C64::new(h, 0.0)]]
}

/// Applies both transforms to the sign and field registers.
pub fn apply_decoding_transforms(phi: &StateVector) -> Result<StateVector> {
    if phi.dim() % 4 != 0 {
        return Err(Error::DimensionMismatch { expected: 4 * (phi.dim() / 4 + 1), got: phi.dim() });
    }
    let (us, uf) = (sign_transform(), field_transform());
    let mut out = vec![C64::new(0.0, 0.0); phi.dim()];
    for (idx, &amp) in phi.amps().iter().enumerate() {
        let (r, s, f) = (idx / 4, (idx / 2) % 2, idx % 2);
        for s2 in 0..2 {
            for f2 in 0..2 {
                out[r * 4 + s2 * 2 + f2] += us[s2][s] * uf[f2][f] * amp;
            }
        }
    }
    StateVector::new(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeOutcome {
    pub observed: (usize, usize),
    pub collapsed: StateVector,
}

/// Exact outcome probabilities of the sign/field measurement, in the order
/// 00, 01, 10, 11, with the index-register state after observing 00.
pub fn decode_distribution(phi: &StateVector) -> Result<([f64; 4], Option<StateVector>)> {
    let t = apply_decoding_transforms(phi)?;
    let mut probs = [0.0; 4];
    for (idx, c) in t.amps().iter().enumerate() {
        probs[idx % 4] += c.norm_sqr();
    }
    let zero: Vec<C64> = t.amps().iter().step_by(4).copied().collect();
    let collapsed = if probs[0] > 1e-300 { Some(StateVector::normalized(zero)?) } else { None };
    Ok((probs, collapsed))
}

pub fn arthur_decode(phi: &StateVector, seed: u64) -> Result<DecodeOutcome> {
    let t = apply_decoding_transforms(phi)?;
    let spec = crate::qstate::RegisterSpec::new(vec![phi.dim() / 4, 4], 1)?;
    let (outcome, post) = measure_register(&t, &spec, seed)?;
    let collapsed = StateVector::normalized(post.amps().iter().skip(outcome).step_by(4).copied().collect())?;
    Ok(DecodeOutcome { observed: (outcome / 2, outcome % 2), collapsed })
}

/// `p(x²+2)/3 + (1−p)√(1−x)`.
pub fn gap_f(p: f64, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!("gap_f({p}, {x}) outside [0,1]²")));
    }
    Ok(p * (x * x + 2.0) / 3.0 + (1.0 - p) * (1.0 - x).sqrt())
}

pub fn gap_f_derivative(p: f64, x: f64) -> f64 {
    2.0 * p * x / 3.0 - (1.0 - p) / (2.0 * (1.0 - x).sqrt())
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub grid_max: f64,
    pub argmax: f64,
    pub boundary_value: f64,
    pub critical_points: [f64; 2],
    pub expected_critical: [f64; 2],
    pub passed: bool,
}

/// Sweeps `f(2/3, ·)` on a `10⁻⁶` grid and locates the interior critical points.
pub fn verify_gap_max() -> GapReport {
    let p = 2.0 / 3.0;
    let steps = 1_000_000;
    let (mut grid_max, mut argmax) = (f64::NEG_INFINITY, 0.0);
    for k in 0..=steps {
        let x = k as f64 / steps as f64;
        let v = gap_f(p, x).expect("grid inside domain");
        if v > grid_max {
            grid_max = v;
            argmax = x;
        }
    }
    let df = |x: f64| gap_f_derivative(p, x);
    // f' < 0 at 0.5, > 0 at 0.65, < 0 at 0.9
    let critical_points = [bisect(df, 0.5, 0.65), bisect(df, 0.65, 0.9)];
    let expected_critical = [(1.0 + 13f64.sqrt()) / 8.0, 0.75];
    let boundary_value = gap_f(p, 0.0).unwrap();
    let passed = (grid_max - 7.0 / 9.0).abs() <= 1e-9
        && (boundary_value - 7.0 / 9.0).abs() <= 1e-12
        && critical_points.iter().zip(&expected_critical).all(|(a, b)| (a - b).abs() <= 1e-9);
    GapReport { grid_max, argmax, boundary_value, critical_points, expected_critical, passed }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductBoundReport {
    pub dims: Vec<usize>,
    pub samples: usize,
    pub violations: usize,
    /// Largest `PT − (1−ω+ω²)` over samples with `ω ≥ ½`.
    pub max_excess_high: f64,
    /// Largest `PT − (ω²/3 + 2/3)`.
    pub max_excess_general: f64,
    pub min_omega: f64,
}

pub fn product_test_bound_audit(dims: &[usize], samples: usize, seed: u64) -> Result<ProductBoundReport> {
    let dim: usize = dims.iter().product();
    let mut rep = ProductBoundReport {
        dims: dims.to_vec(),
        samples,
        violations: 0,
        max_excess_high: f64::NEG_INFINITY,
        max_excess_general: f64::NEG_INFINITY,
        min_omega: 1.0,
    };
    for s in 0..samples {
        let mut rng = split(seed, s as u64);
        let psi = StateVector::haar(dim, &mut rng);
        let pt = product_accept_prob(&psi, &psi, dims)?;
        let w = omega(&psi, dims)?;
        rep.min_omega = rep.min_omega.min(w);
        let general = pt - (w * w / 3.0 + 2.0 / 3.0);
        rep.max_excess_general = rep.max_excess_general.max(general);
        let mut bad = general > 1e-9;
        if w >= 0.5 {
            let high = pt - (1.0 - w + w * w);
            rep.max_excess_high = rep.max_excess_high.max(high);
            bad |= high > 1e-9;
        }
        rep.violations += bad as usize;
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricIdentityReport {
    pub d: usize,
    pub samples: usize,
    pub deviation: f64,
    /// `(samples, deviation)` at intermediate checkpoints.
    pub trajectory: Vec<(usize, f64)>,
}

/// Haar average of `|θθ⟩⟨θθ|` against `Π_sym / tr Π_sym`.
pub fn symmetric_projector_identity_check(d: usize, samples: usize, seed: u64) -> Result<SymmetricIdentityReport> {
    if d == 0 || d > 6 {
        return Err(Error::InvalidParameter(format!("d = {d}")));
    }
    let target = sym_projector(d) / C64::new((d * (d + 1)) as f64 / 2.0, 0.0);
    let mut rng = split(seed, 0);
    let mut acc = CMatrix::zeros(d * d, d * d);
    let mut trajectory = Vec::new();
    let mut checkpoint = 100;
    for s in 1..=samples {
        let th = StateVector::haar(d, &mut rng);
        acc += outer(&tensor(&th, &th));
        if s == checkpoint || s == samples {
            let dev = operator_norm(&(acc.clone() / C64::new(s as f64, 0.0) - &target));
            trajectory.push((s, dev));
            checkpoint *= 10;
        }
    }
    let deviation = trajectory.last().map_or(f64::NAN, |t| t.1);
    Ok(SymmetricIdentityReport { d, samples, deviation, trajectory })
}

/// Product test on `a^{⊗ℓ}` and `b^{⊗ℓ}` against the single-shot value to the `ℓ`.
pub fn sequential_repetition(a: &StateVector, b: &StateVector, ell: usize) -> Result<(f64, f64)> {
    let single = product_accept_prob(a, b, &[a.dim()])?;
    let (mut pa, mut pb) = (a.clone(), b.clone());
    for _ in 1..ell {
        pa = tensor(&pa, a);
        pb = tensor(&pb, b);
    }
    let repeated = product_accept_prob(&pa, &pb, &vec![a.dim(); ell])?;
    Ok((repeated, single.powi(ell as i32)))
}

/// `⟨ψ, M ψ⟩` for a state, exposed for audits.
pub fn acceptance(m: &CMatrix, psi: &StateVector) -> f64 {
    quad_form(m, psi.amps())
}
