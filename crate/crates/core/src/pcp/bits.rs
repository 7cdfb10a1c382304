//! Packed bit vectors over GF(2), serialized as hex.

use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            out.set(i, b);
        }
        out
    }

    /// Position 0 is the most significant of the `len` low bits of `x`.
    pub fn from_u64_msb(x: u64, len: usize) -> Self {
        let mut out = Self::zeros(len);
        for i in 0..len {
            out.set(i, (x >> (len - 1 - i)) & 1 == 1);
        }
        out
    }

    pub fn to_u64_msb(&self) -> Result<u64> {
        if self.len > 64 {
            return Err(Error::InvalidParameter(format!("{} bits do not fit a word", self.len)));
        }
        Ok((0..self.len).fold(0, |acc, i| (acc << 1) | self.get(i) as u64))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        let mask = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn dot(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum::<u32>() % 2 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| 64 * k + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    pub fn to_hex(&self) -> String {
        let mut s = String::new();
        for chunk in (0..self.len).collect::<Vec<_>>().chunks(4) {
            let nib = chunk.iter().fold(0u8, |acc, &i| (acc << 1) | self.get(i) as u8) << (4 - chunk.len());
            write!(s, "{nib:x}").unwrap();
        }
        s
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        if hex.len() != len.div_ceil(4) {
            return Err(Error::Parse(format!("{} hex digits for {len} bits", hex.len())));
        }
        let mut out = Self::zeros(len);
        for (k, ch) in hex.chars().enumerate() {
            let nib = ch.to_digit(16).ok_or_else(|| Error::Parse(format!("bad hex digit {ch:?}")))?;
            for j in 0..4 {
                let i = 4 * k + j;
                if i < len {
                    out.set(i, (nib >> (3 - j)) & 1 == 1);
                } else if (nib >> (3 - j)) & 1 == 1 {
                    return Err(Error::Parse("padding bits set".into()));
                }
            }
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct BitsRepr {
    len: usize,
    hex: String,
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BitsRepr { len: self.len, hex: self.to_hex() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = BitsRepr::deserialize(d)?;
        Bits::from_hex(&r.hex, r.len).map_err(serde::de::Error::custom)
    }
}

/// Rank over GF(2) of a list of equal-length rows.
pub fn gf2_rank(rows: &[Bits]) -> usize {
    let mut basis: Vec<(usize, Bits)> = Vec::new();
    for row in rows {
        let mut r = row.clone();
        for (pivot, b) in &basis {
            if r.get(*pivot) {
                r.xor_assign(b);
            }
        }
        if let Some(p) = r.first_one() {
            for (_, b) in basis.iter_mut() {
                if b.get(p) {
                    b.xor_assign(&r);
                }
            }
            basis.push((p, r));
        }
    }
    basis.len()
}

/// Solves `Σ_k u_k rows[k] = target`; unique when the rows are independent.
pub fn gf2_combination(rows: &[Bits], target: &Bits) -> Option<Bits> {
    // each reduced row remembers which original rows it combines
    let mut basis: Vec<(usize, Bits, Bits)> = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        let mut r = row.clone();
        let mut tag = Bits::zeros(rows.len());
        tag.set(k, true);
        for (pivot, b, t) in &basis {
            if r.get(*pivot) {
                r.xor_assign(b);
                tag.xor_assign(t);
            }
        }
        if let Some(p) = r.first_one() {
            basis.push((p, r, tag));
        }
    }
    let mut rest = target.clone();
    let mut u = Bits::zeros(rows.len());
    for (pivot, b, t) in &basis {
        if rest.get(*pivot) {
            rest.xor_assign(b);
            u.xor_assign(t);
        }
    }
    rest.is_zero().then_some(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_roundtrip() {
        let b = Bits::from_bools(&[true, false, true, true, false, true]);
        assert_eq!(b.to_hex(), "b4");
        assert_eq!(Bits::from_hex("b4", 6).unwrap(), b);
        assert!(Bits::from_hex("b5", 6).is_err());
        assert_eq!(Bits::from_u64_msb(0b1011, 4).to_u64_msb().unwrap(), 0b1011);
    }

    #[test]
    fn combination() {
        let rows = vec![Bits::from_u64_msb(0b1100, 4), Bits::from_u64_msb(0b0110, 4)];
        assert_eq!(gf2_rank(&rows), 2);
        let u = gf2_combination(&rows, &Bits::from_u64_msb(0b1010, 4)).unwrap();
        assert_eq!(u.to_u64_msb().unwrap(), 0b11);
        assert!(gf2_combination(&rows, &Bits::from_u64_msb(0b0001, 4)).is_none());
    }
}
