//! Primality and primes in short intervals.

use crate::error::{Error, Result};

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut r) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Lower end of the window `[n − 4n^{2/3}, n]`, clamped at 2.
pub fn interval_floor(n: u64) -> u64 {
    let lo = n as f64 - 4.0 * (n as f64).powf(2.0 / 3.0);
    (lo.ceil().max(2.0)) as u64
}

/// Largest prime in `[n − 4n^{2/3}, n]`.
pub fn prime_in_interval(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n = {n}")));
    }
    let lo = interval_floor(n);
    (lo..=n)
        .rev()
        .find(|&c| is_prime(c))
        .ok_or_else(|| Error::Infeasible(format!("no prime in [{lo}, {n}]")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        let sieve: Vec<u64> = (0..200).filter(|&n| n >= 2 && (2..n).all(|d| n % d != 0)).collect();
        let mr: Vec<u64> = (0..200).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, mr);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn interval() {
        assert_eq!(prime_in_interval(100).unwrap(), 97);
        assert_eq!(prime_in_interval(7).unwrap(), 7);
    }
}
