use serde::{Deserialize, Serialize};

use crate::arith::{mulmod, powmod};
use crate::error::{Error, Result};

/// Which quotient ring the transform diagonalises.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convolution {
    /// `Z_q[x] / (x^n + 1)`
    #[default]
    Negacyclic,
    /// `Z_q[x] / (x^n - 1)`
    Cyclic,
}

/// Transform parameters: `psi` is a primitive `2n`-th root of unity and
/// `omega = psi^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingParams {
    pub q: u64,
    pub order: usize,
    pub psi: u64,
    pub omega: u64,
    pub width: u32,
    pub mode: Convolution,
}

impl RingParams {
    /// Finds roots for `(q, order)` and checks `width` can hold residues.
    pub fn new(q: u64, order: usize, width: u32) -> Result<Self> {
        let (psi, omega) = find_roots(q, order)?;
        let needed = 64 - (q - 1).leading_zeros();
        if width < needed.max(3) || width > 64 {
            return Err(Error::InvalidRing(format!("width {width} cannot hold residues mod {q} ({needed} bits)")));
        }
        Ok(Self { q, order, psi, omega, width, mode: Convolution::Negacyclic })
    }

    pub fn with_mode(mut self, mode: Convolution) -> Self {
        self.mode = mode;
        self
    }

    pub fn log_order(&self) -> u32 {
        self.order.trailing_zeros()
    }

    pub fn preset(name: &str) -> Result<Self> {
        let p = PRESETS
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::Config(format!("unknown preset '{name}'")))?;
        Self::new(p.q, p.order, p.width)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub q: u64,
    pub order: usize,
    pub width: u32,
}

pub const PRESETS: &[Preset] = &[
    Preset { name: "dilithium", q: 8_380_417, order: 256, width: 24 },
    Preset { name: "falcon", q: 12_289, order: 1024, width: 16 },
    Preset { name: "kyber-class-14", q: 7681, order: 256, width: 14 },
    Preset { name: "ntt-256-16", q: 7681, order: 256, width: 16 },
    Preset { name: "he-1024-29", q: 536_856_577, order: 1024, width: 30 },
];

/// Deterministic Miller–Rabin; these bases are exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest primitive `2·order`-th root of unity `psi` mod prime `q`, and
/// `omega = psi^2`.
pub fn find_roots(q: u64, order: usize) -> Result<(u64, u64)> {
    if order < 2 || !order.is_power_of_two() {
        return Err(Error::InvalidRing(format!("order {order} is not a power of two >= 2")));
    }
    if !is_prime(q) {
        return Err(Error::NotPrime { q });
    }
    let two_n = 2 * order as u64;
    if (q - 1) % two_n != 0 {
        return Err(Error::NoRoot { q, two_n });
    }
    let exp = (q - 1) / two_n;
    // psi is primitive iff psi^order = -1, since 2n is a power of two.
    let psi0 = (2..q)
        .map(|g| powmod(g, exp, q))
        .find(|&c| powmod(c, order as u64, q) == q - 1)
        .ok_or(Error::NoRoot { q, two_n })?;
    // Every primitive root is an odd power of any other one.
    let sq = mulmod(psi0, psi0, q);
    let mut cur = psi0;
    let mut best = psi0;
    for _ in 0..order {
        best = best.min(cur);
        cur = mulmod(cur, sq, q);
    }
    Ok((best, mulmod(best, best, q)))
}

/// `i` with its low `bits` bits reversed.
pub fn bit_reverse(i: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots() {
        for (q, n) in [(7681, 256), (8380417, 256), (12289, 1024), (257, 4), (257, 128), (536856577, 1024)] {
            let (psi, omega) = find_roots(q, n).unwrap();
            assert_eq!(powmod(psi, n as u64, q), q - 1);
            assert_eq!(omega, mulmod(psi, psi, q));
        }
        assert!(matches!(find_roots(3329, 256), Err(Error::NoRoot { .. })));
        assert!(matches!(find_roots(7683, 4), Err(Error::NotPrime { .. })));
        // 257: smallest primitive 8th root is 4 (4^4 = 256 = -1)
        assert_eq!(find_roots(257, 4).unwrap().0, 4);
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751));
    }

    #[test]
    fn presets_resolve() {
        for p in PRESETS {
            let r = RingParams::preset(p.name).unwrap();
            assert_eq!(r.order, p.order);
        }
        assert!(RingParams::preset("nope").is_err());
    }

    #[test]
    fn bitrev() {
        assert_eq!(bit_reverse(1, 3), 4);
        assert_eq!(bit_reverse(3, 3), 6);
        assert_eq!(bit_reverse(1, 1), 1);
        assert_eq!(bit_reverse(0, 0), 0);
    }
}
