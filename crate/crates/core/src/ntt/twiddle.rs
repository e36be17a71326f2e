use serde::{Deserialize, Serialize};

use crate::arith::{mod_inverse, mulmod, powmod, MontgomeryContext};
use crate::error::{Error, Result};
use crate::ring::{bit_reverse, Convolution, RingParams};

/// Montgomery-scaled twiddles, indexed by butterfly block `k = 2^s + b`
/// (stage `s`, block `b`), `k` in `1..order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwiddleTable {
    /// `forward[k - 1] = zeta_k · R mod q`
    pub forward: Vec<u64>,
    /// `inverse[k - 1] = zeta_k^-1 · R mod q`
    pub inverse: Vec<u64>,
    /// `order^-1 · R mod q`
    pub n_inv: u64,
    /// `R^2 mod q`; a product with it moves a value into Montgomery form.
    pub r2: u64,
}

impl TwiddleTable {
    pub fn zeta(&self, k: usize) -> u64 {
        self.forward[k - 1]
    }

    pub fn zeta_inv(&self, k: usize) -> u64 {
        self.inverse[k - 1]
    }
}

/// Unscaled twiddle of block `k`.
pub fn raw_twiddle(ring: &RingParams, k: usize) -> u64 {
    let log_n = ring.log_order();
    match ring.mode {
        Convolution::Negacyclic => powmod(ring.psi, bit_reverse(k, log_n) as u64, ring.q),
        Convolution::Cyclic => {
            let s = usize::BITS - 1 - k.leading_zeros();
            let b = k - (1 << s);
            powmod(ring.omega, bit_reverse(b, log_n - 1) as u64, ring.q)
        }
    }
}

pub fn precompute_twiddles(ring: &RingParams, ctx: &MontgomeryContext) -> Result<TwiddleTable> {
    if ctx.modulus() != ring.q {
        return Err(Error::InvalidRing(format!("context modulus {} != ring modulus {}", ctx.modulus(), ring.q)));
    }
    let q = ring.q;
    let r = ctx.r_mod();
    let mut forward = Vec::with_capacity(ring.order - 1);
    let mut inverse = Vec::with_capacity(ring.order - 1);
    for k in 1..ring.order {
        let z = raw_twiddle(ring, k);
        let zi = mod_inverse(z as u128, q as u128).expect("twiddles are units") as u64;
        forward.push(mulmod(z, r, q));
        inverse.push(mulmod(zi, r, q));
    }
    let n_inv = mod_inverse(ring.order as u128, q as u128).expect("order is a unit") as u64;
    Ok(TwiddleTable { forward, inverse, n_inv: mulmod(n_inv, r, q), r2: ctx.r2_mod() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order4_table() {
        let ring = RingParams::new(257, 4, 9).unwrap();
        let ctx = MontgomeryContext::new(257, 9).unwrap();
        let t = precompute_twiddles(&ring, &ctx).unwrap();
        assert_eq!(t.forward.len(), 3);
        let r = ctx.r_mod();
        // psi = 4: zeta_1 = psi^2, zeta_2 = psi^1, zeta_3 = psi^3
        assert_eq!(t.zeta(1), mulmod(16, r, 257));
        assert_eq!(t.zeta(2), mulmod(4, r, 257));
        assert_eq!(t.zeta(3), mulmod(64, r, 257));
        for k in 1..4 {
            let prod = mulmod(mulmod(t.zeta(k), t.zeta_inv(k), 257), ctx.r_inv(), 257);
            assert_eq!(mulmod(prod, ctx.r_inv(), 257), 1);
        }
    }

    #[test]
    fn cyclic_first_stage_is_one() {
        let ring = RingParams::new(257, 8, 9).unwrap().with_mode(Convolution::Cyclic);
        assert_eq!(raw_twiddle(&ring, 1), 1);
        assert_eq!(raw_twiddle(&ring, 3), powmod(ring.omega, 2, 257));
    }
}
