use insram_ntt::arith::ArithConfig;
use insram_ntt::bitcell::OpCounter;
use insram_ntt::ntt::{bit_reverse_permute, forward_batch, layout_plan, polymul_batch, polymul_negacyclic, ArrayDims, NttEngine};
use insram_ntt::oracle::{oracle_intt, oracle_ntt, schoolbook_negacyclic};
use insram_ntt::ring::RingParams;
use proptest::prelude::*;

fn ring16() -> RingParams {
    RingParams::new(7681, 16, 14).unwrap()
}

fn poly(n: usize, q: u64) -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::vec(0..q, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn forward_is_linear(a in poly(16, 7681), b in poly(16, 7681)) {
        let ring = ring16();
        let sum: Vec<u64> = a.iter().zip(&b).map(|(x, y)| (x + y) % 7681).collect();
        let out = forward_batch(&[a, b, sum], &ring, ArrayDims::new(22, 42), ArithConfig::default()).unwrap();
        for i in 0..16 {
            prop_assert_eq!(out[2][i], (out[0][i] + out[1][i]) % 7681);
        }
    }

    #[test]
    fn product_matches_schoolbook(a in poly(16, 7681), b in poly(16, 7681)) {
        let got = polymul_negacyclic(&a, &b, &ring16(), ArrayDims::new(40, 14)).unwrap();
        prop_assert_eq!(got, schoolbook_negacyclic(&a, &b, 7681).unwrap());
    }

    #[test]
    fn oracle_convolution_theorem(a in poly(16, 7681), b in poly(16, 7681)) {
        let ring = ring16();
        let prod: Vec<u64> = oracle_ntt(&a, &ring).iter().zip(oracle_ntt(&b, &ring)).map(|(x, y)| x * y % 7681).collect();
        prop_assert_eq!(oracle_intt(&prod, &ring), schoolbook_negacyclic(&a, &b, 7681).unwrap());
    }

    #[test]
    fn bit_reversal_is_involutive(v in proptest::collection::vec(any::<u64>(), 32)) {
        prop_assert_eq!(bit_reverse_permute(&bit_reverse_permute(&v).unwrap()).unwrap(), v);
    }
}

#[test]
fn simd_groups_equal_isolated_runs() {
    let ring = ring16();
    let polys: Vec<Vec<u64>> = (0..4u64).map(|s| (0..16u64).map(|i| (i * 1009 + s * 77) % 7681).collect()).collect();
    let together = forward_batch(&polys, &ring, ArrayDims::new(22, 56), ArithConfig::default()).unwrap();
    for (p, t) in polys.iter().zip(&together) {
        let alone = forward_batch(std::slice::from_ref(p), &ring, ArrayDims::new(22, 14), ArithConfig::default()).unwrap();
        assert_eq!(&alone[0], t);
    }
}

#[test]
fn small_examples() {
    let ring = RingParams::new(257, 4, 10).unwrap();
    let out = forward_batch(&[vec![1, 0, 0, 0], vec![5, 0, 0, 0]], &ring, ArrayDims::new(12, 20), ArithConfig::default()).unwrap();
    assert_eq!(out[0], vec![1; 4]);
    assert_eq!(out[1], vec![5; 4]);

    let n = 16;
    let a: Vec<u64> = (1..=16).collect();
    let mut one = vec![0; n];
    one[0] = 1;
    assert_eq!(polymul_negacyclic(&a, &one, &ring16(), ArrayDims::new(40, 14)).unwrap(), a);
    let mut x = vec![0; n];
    x[1] = 1;
    let mut x15 = vec![0; n];
    x15[15] = 1;
    let mut minus_one = vec![0; n];
    minus_one[0] = 7680;
    assert_eq!(polymul_negacyclic(&x, &x15, &ring16(), ArrayDims::new(40, 14)).unwrap(), minus_one);
}

#[test]
fn inverse_of_constant_spectrum() {
    let ring = ring16();
    let spectrum = vec![9u64; 16];
    let out = insram_ntt::ntt::inverse_batch(&[spectrum], &ring, ArrayDims::new(22, 14), ArithConfig::default()).unwrap();
    let mut want = vec![0; 16];
    want[0] = 9;
    assert_eq!(out[0], want);
}

#[test]
fn transforms_use_no_alignment_shifts_unless_spilled() {
    let ring = RingParams::new(7681, 32, 14).unwrap();
    let flat = NttEngine::new(&ring, ArrayDims::new(38, 28), 32, ArithConfig::default()).unwrap();
    let spilled = NttEngine::new(&ring, ArrayDims::new(22, 28), 32, ArithConfig::default()).unwrap();
    let (mut c1, mut c2) = (OpCounter::new(), OpCounter::new());
    flat.forward(&mut c1, 0).unwrap();
    flat.inverse(&mut c1, 0).unwrap();
    spilled.forward(&mut c2, 0).unwrap();
    assert_eq!(c1.counts.shift_align, 0);
    assert!(c2.counts.shift_align > 0);
}

#[test]
fn capacity_errors() {
    let ring = RingParams::new(7681, 256, 16).unwrap();
    let err = polymul_batch(&[vec![0; 256]], &[vec![0; 256]], &ring, ArrayDims::new(256, 32), ArithConfig::default());
    assert!(matches!(err, Err(insram_ntt::Error::CapacityExceeded { .. })));
    assert!(layout_plan(ArrayDims::default(), 2, 4).is_err());
    assert!(layout_plan(ArrayDims::default(), 512, 4).is_err());
}
