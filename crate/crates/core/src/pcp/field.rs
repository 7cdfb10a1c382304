//! Prime fields and the lines through a point of `F_p^n`.

use serde::{Deserialize, Serialize};

use super::primes::is_prime;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct FieldSpec {
    p: u64,
}

impl TryFrom<u64> for FieldSpec {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<FieldSpec> for u64 {
    fn from(f: FieldSpec) -> u64 {
        f.p
    }
}

impl FieldSpec {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::InvalidParameter(format!("{p} is not a supported prime")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a) % self.p
    }

    pub fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if a % self.p == 0 {
            return Err(Error::InvalidParameter("zero has no inverse".into()));
        }
        Ok(self.pow(a, self.p - 2))
    }

    /// Rank of a vector with the first coordinate most significant.
    pub fn encode(&self, v: &[u64]) -> u64 {
        v.iter().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn decode(&self, mut x: u64, n: usize) -> Vec<u64> {
        let mut v = vec![0; n];
        for c in v.iter_mut().rev() {
            *c = x % self.p;
            x /= self.p;
        }
        v
    }

    /// `a t + b`.
    pub fn point_on(&self, a: &[u64], b: &[u64], t: u64) -> Vec<u64> {
        a.iter().zip(b).map(|(&ai, &bi)| self.add(self.mul(ai, t), bi)).collect()
    }
}

/// The pair `(a, b)` describing `{a t + b : t ∈ F}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Line {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
}

/// Pairs `(a, b)` with `a t + b = point` for some `t`: `1 + (pⁿ−1)p`.
pub fn lines_through_count(n: usize, f: &FieldSpec) -> u64 {
    1 + (f.p().pow(n as u32) - 1) * f.p()
}

/// Offsets `b = point − a t` for fixed `a ≠ 0`, in increasing order.
fn sorted_offsets(f: &FieldSpec, a: &[u64], point: &[u64]) -> Vec<u64> {
    let mut bs: Vec<u64> = (0..f.p())
        .map(|t| f.encode(&point.iter().zip(a).map(|(&pi, &ai)| f.sub(pi, f.mul(ai, t))).collect::<Vec<_>>()))
        .collect();
    bs.sort_unstable();
    bs
}

fn check_vec(f: &FieldSpec, v: &[u64], n: usize) -> Result<()> {
    if v.len() != n || v.iter().any(|&c| c >= f.p()) {
        return Err(Error::InvalidParameter(format!("not a vector of F_{}^{n}", f.p())));
    }
    Ok(())
}

/// 1-based position of `line` among the lines through `point`, in lexicographic order of `(a, b)`.
pub fn line_index(line: &Line, point: &[u64], f: &FieldSpec) -> Result<u64> {
    let n = point.len();
    check_vec(f, point, n)?;
    check_vec(f, &line.a, n)?;
    check_vec(f, &line.b, n)?;
    let ra = f.encode(&line.a);
    if ra == 0 {
        return if line.b == point {
            Ok(1)
        } else {
            Err(Error::Precondition("constant line misses the point".into()))
        };
    }
    let bs = sorted_offsets(f, &line.a, point);
    let pos = bs
        .binary_search(&f.encode(&line.b))
        .map_err(|_| Error::Precondition("line misses the point".into()))?;
    Ok(2 + (ra - 1) * f.p() + pos as u64)
}

pub fn line_from_index(index: u64, point: &[u64], f: &FieldSpec) -> Result<Line> {
    let n = point.len();
    check_vec(f, point, n)?;
    let count = lines_through_count(n, f);
    if index == 0 || index > count {
        return Err(Error::IndexOutOfRange { index: index as usize, dim: count as usize });
    }
    if index == 1 {
        return Ok(Line { a: vec![0; n], b: point.to_vec() });
    }
    let a = f.decode((index - 2) / f.p() + 1, n);
    let bs = sorted_offsets(f, &a, point);
    let b = f.decode(bs[((index - 2) % f.p()) as usize], n);
    Ok(Line { a, b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_count() {
        let f = FieldSpec::new(3).unwrap();
        assert_eq!(lines_through_count(1, &f), 7);
        let first = line_from_index(1, &[2], &f).unwrap();
        assert_eq!(first, Line { a: vec![0], b: vec![2] });
    }

    #[test]
    fn field_axioms_spot() {
        let f = FieldSpec::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        assert!(FieldSpec::new(9).is_err());
    }
}
