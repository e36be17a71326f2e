//! Array-free reference implementations. Naive on purpose: nothing here
//! shares structure with the in-array code paths.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ring::{Convolution, RingParams};

/// `A·B·(2^n)^-1 mod M`, all in arbitrary precision.
pub fn oracle_montmul(a: u128, b: u128, m: u64, n: u32) -> Result<u64> {
    if m % 2 == 0 {
        return Err(Error::InvalidModulus(format!("modulus {m} is even")));
    }
    let m = BigInt::from(m);
    let r = BigInt::one() << n;
    let e = r.extended_gcd(&m);
    let r_inv = e.x.mod_floor(&m);
    let v = (BigInt::from(a) * BigInt::from(b) * r_inv).mod_floor(&m);
    Ok(v.to_u64().expect("residue fits"))
}

fn pow(base: u64, exp: u64, q: u64) -> u64 {
    BigInt::from(base).modpow(&BigInt::from(exp), &BigInt::from(q)).to_u64().unwrap()
}

fn inv(x: u64, q: u64) -> u64 {
    pow(x, q - 2, q)
}

/// Evaluation point exponent of output `k`, in units of `psi`.
fn point(ring: &RingParams, k: usize) -> u64 {
    match ring.mode {
        Convolution::Negacyclic => 2 * k as u64 + 1,
        Convolution::Cyclic => 2 * k as u64,
    }
}

/// Direct evaluation: `out[k] = Σ_j p_j · psi^((2k+1)j)` (negacyclic) or
/// `Σ_j p_j · omega^(kj)` (cyclic), natural order.
pub fn oracle_ntt(p: &[u64], ring: &RingParams) -> Vec<u64> {
    let q = ring.q;
    let order = 2 * ring.order as u64;
    (0..p.len())
        .map(|k| {
            let base = point(ring, k);
            let mut acc = BigInt::zero();
            for (j, &c) in p.iter().enumerate() {
                acc += BigInt::from(c) * pow(ring.psi, base * j as u64 % order, q);
            }
            acc.mod_floor(&BigInt::from(q)).to_u64().unwrap()
        })
        .collect()
}

/// Inverse of [`oracle_ntt`], also by direct summation.
pub fn oracle_intt(v: &[u64], ring: &RingParams) -> Vec<u64> {
    let q = ring.q;
    let order = 2 * ring.order as u64;
    let n_inv = inv(ring.order as u64 % q, q);
    let psi_inv = inv(ring.psi, q);
    (0..v.len())
        .map(|j| {
            let mut acc = BigInt::zero();
            for (k, &c) in v.iter().enumerate() {
                acc += BigInt::from(c) * pow(psi_inv, point(ring, k) * j as u64 % order, q);
            }
            (acc * n_inv).mod_floor(&BigInt::from(q)).to_u64().unwrap()
        })
        .collect()
}

/// `a·b mod (x^n + 1, q)` by the textbook double loop.
pub fn schoolbook_negacyclic(a: &[u64], b: &[u64], q: u64) -> Result<Vec<u64>> {
    schoolbook(a, b, q, Convolution::Negacyclic)
}

/// `a·b mod (x^n - 1, q)`.
pub fn schoolbook_cyclic(a: &[u64], b: &[u64], q: u64) -> Result<Vec<u64>> {
    schoolbook(a, b, q, Convolution::Cyclic)
}

pub fn schoolbook(a: &[u64], b: &[u64], q: u64, mode: Convolution) -> Result<Vec<u64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    let n = a.len();
    let mut acc = vec![BigInt::zero(); n];
    for i in 0..n {
        for j in 0..n {
            let prod = BigInt::from(a[i]) * BigInt::from(b[j]);
            if i + j < n {
                acc[i + j] += prod;
            } else if mode == Convolution::Negacyclic {
                acc[i + j - n] -= prod;
            } else {
                acc[i + j - n] += prod;
            }
        }
    }
    let q = BigInt::from(q);
    Ok(acc.into_iter().map(|c| c.mod_floor(&q).to_u64().unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn montmul_examples() {
        assert_eq!(oracle_montmul(4, 3, 7, 3).unwrap(), 5);
        assert_eq!(oracle_montmul(0, 5, 7, 3).unwrap(), 0);
        assert_eq!(oracle_montmul(1, 1, 9, 4).unwrap(), 4);
        assert!(oracle_montmul(1, 1, 8, 4).is_err());
        let big = u64::MAX as u128;
        let m = 18446744073709551557;
        let r_inv = BigInt::from(1u128 << 64).extended_gcd(&BigInt::from(m)).x.mod_floor(&BigInt::from(m));
        let want = (BigInt::from(big) * BigInt::from(big) * r_inv).mod_floor(&BigInt::from(m));
        assert_eq!(BigInt::from(oracle_montmul(big, big, m, 64).unwrap()), want);
    }

    #[test]
    fn ntt_golden_order4() {
        let ring = RingParams::new(257, 4, 9).unwrap();
        assert_eq!(ring.psi, 4);
        // points psi^1, psi^3, psi^5, psi^7 = 4, 64, 253, 193
        assert_eq!(oracle_ntt(&[1, 0, 0, 0], &ring), vec![1, 1, 1, 1]);
        assert_eq!(oracle_ntt(&[0, 1, 0, 0], &ring), vec![4, 64, 253, 193]);
        assert_eq!(oracle_ntt(&[1, 2, 3, 4], &ring), vec![56, 97, 42, 66]);
        assert_eq!(oracle_ntt(&[0; 4], &ring), vec![0; 4]);
    }

    #[test]
    fn roundtrip_and_convolution() {
        for mode in [Convolution::Negacyclic, Convolution::Cyclic] {
            let ring = RingParams::new(7681, 16, 14).unwrap().with_mode(mode);
            let a: Vec<u64> = (0..16).map(|i| (i * i * 31 + 7) % 7681).collect();
            let b: Vec<u64> = (0..16).map(|i| (i * 977 + 3) % 7681).collect();
            assert_eq!(oracle_intt(&oracle_ntt(&a, &ring), &ring), a);
            let prod: Vec<u64> = oracle_ntt(&a, &ring)
                .iter()
                .zip(oracle_ntt(&b, &ring))
                .map(|(x, y)| x * y % 7681)
                .collect();
            assert_eq!(oracle_intt(&prod, &ring), schoolbook(&a, &b, 7681, mode).unwrap());
        }
    }

    #[test]
    fn schoolbook_identities() {
        let q = 7681;
        let a: Vec<u64> = (0..8).map(|i| i * 100 + 1).collect();
        let mut one = vec![0; 8];
        one[0] = 1;
        assert_eq!(schoolbook_negacyclic(&a, &one, q).unwrap(), a);
        let mut x = vec![0; 8];
        x[1] = 1;
        let mut x7 = vec![0; 8];
        x7[7] = 1;
        let mut want = vec![0; 8];
        want[0] = q - 1;
        assert_eq!(schoolbook_negacyclic(&x, &x7, q).unwrap(), want);
        assert!(schoolbook_negacyclic(&a, &one[..4], q).is_err());
    }
}
