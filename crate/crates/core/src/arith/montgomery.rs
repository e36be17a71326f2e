use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parameters of radix-2 Montgomery multiplication with an `bits`-bit word.
///
/// `R = 2^bits`; the radix-2 variant needs no `M'` constant because the
/// reduction step only ever adds `M` or `0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MontgomeryContext {
    modulus: u64,
    bits: u32,
    r_inv: u64,
}

impl MontgomeryContext {
    pub fn new(modulus: u64, bits: u32) -> Result<Self> {
        if !(3..=64).contains(&bits) {
            return Err(Error::InvalidModulus(format!("word width {bits} outside 3..=64")));
        }
        if modulus % 2 == 0 {
            return Err(Error::InvalidModulus(format!("modulus {modulus} is even")));
        }
        let r = 1u128 << bits;
        if modulus <= 2 || modulus as u128 >= r {
            return Err(Error::InvalidModulus(format!("need 2 < M < 2^{bits}, got {modulus}")));
        }
        let r_inv = mod_inverse(r % modulus as u128, modulus as u128)
            .ok_or_else(|| Error::InvalidModulus(format!("gcd(M, R) != 1 for M = {modulus}")))?;
        Ok(Self { modulus, bits, r_inv: r_inv as u64 })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn r(&self) -> u128 {
        1u128 << self.bits
    }

    pub fn r_mod(&self) -> u64 {
        (self.r() % self.modulus as u128) as u64
    }

    pub fn r_inv(&self) -> u64 {
        self.r_inv
    }

    /// `x * R mod M`, the Montgomery form of `x`.
    pub fn to_mont(&self, x: u64) -> u64 {
        mulmod(x % self.modulus, self.r_mod(), self.modulus)
    }

    /// `R^2 mod M`; a Montgomery product with it maps `x` to `x * R mod M`.
    pub fn r2_mod(&self) -> u64 {
        mulmod(self.r_mod(), self.r_mod(), self.modulus)
    }

    /// Whether modular add/subtract have the spare top bit they rely on.
    pub fn has_headroom(&self) -> bool {
        (self.modulus as u128) < (1u128 << (self.bits - 1))
    }

    pub fn check_headroom(&self) -> Result<()> {
        if self.has_headroom() {
            Ok(())
        } else {
            Err(Error::NoHeadroom { modulus: self.modulus, bits: self.bits })
        }
    }

    pub fn check_operand(&self, value: u64) -> Result<()> {
        if (value as u128) < self.r() {
            Ok(())
        } else {
            Err(Error::OperandOutOfRange { value: value as u128, bits: self.bits })
        }
    }
}

pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m` via the extended Euclidean algorithm.
pub fn mod_inverse(a: u128, m: u128) -> Option<u128> {
    let (a, m) = (BigInt::from(a), BigInt::from(m));
    let e = a.extended_gcd(&m);
    if !e.gcd.is_one() {
        return None;
    }
    let mut x = e.x % &m;
    if x < BigInt::zero() {
        x += &m;
    }
    x.to_u128()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_invariants() {
        let ctx = MontgomeryContext::new(7, 3).unwrap();
        assert_eq!(ctx.r(), 8);
        assert_eq!(ctx.r_inv() as u128 * ctx.r() % 7, 1);
        assert!(MontgomeryContext::new(8, 4).is_err());
        assert!(MontgomeryContext::new(17, 4).is_err());
        assert!(MontgomeryContext::new(1, 4).is_err());
        assert!(MontgomeryContext::new(5, 2).is_err());
        let wide = MontgomeryContext::new(u64::MAX, 64).unwrap();
        assert_eq!(mulmod(wide.r_inv(), wide.r_mod(), u64::MAX), 1);
    }

    #[test]
    fn headroom() {
        assert!(MontgomeryContext::new(7, 4).unwrap().has_headroom());
        assert!(!MontgomeryContext::new(9, 4).unwrap().has_headroom());
        assert!(MontgomeryContext::new(8380417, 24).unwrap().has_headroom());
        assert!(!MontgomeryContext::new(8380417, 23).unwrap().has_headroom());
    }

    #[test]
    fn inverse_and_pow() {
        assert_eq!(mod_inverse(16, 9), Some(4));
        assert_eq!(mod_inverse(6, 9), None);
        assert_eq!(powmod(3, 4, 7), 81 % 7);
    }
}
