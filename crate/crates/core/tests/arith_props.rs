use insram_ntt::arith::{bp_add, bp_modadd, bp_modsub, ArithConfig, Bench, Latency, ModmulShift, MontgomeryContext};
use insram_ntt::oracle::oracle_montmul;
use proptest::prelude::*;

/// `(n, M, B)` with odd `M < 2^(n-1)` and `B < M`.
fn operands() -> impl Strategy<Value = (u32, u64, u64, u64)> {
    (4u32..=64).prop_flat_map(|n| {
        let top = 1u64 << (n - 1);
        let a_max = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        (Just(n), 1..top / 2, 0..=a_max, any::<u64>()).prop_map(|(n, half, a, b)| {
            let m = half * 2 + 1;
            (n, m, a, b % m)
        })
    })
}

fn config() -> impl Strategy<Value = ArithConfig> {
    (any::<bool>(), any::<bool>()).prop_map(|(dd, tile)| ArithConfig {
        latency: if dd { Latency::DataDependent } else { Latency::Deterministic },
        modmul_shift: if tile { ModmulShift::Tile } else { ModmulShift::Global },
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn constant_multiplier_matches_oracle((n, m, a, b) in operands(), cfg in config()) {
        let mut bench = Bench::new(n as usize, &[m], cfg).unwrap();
        let got = bench.modmul_const(a, &[b]).unwrap()[0];
        prop_assert_eq!(got, oracle_montmul(a as u128, b as u128, m, n).unwrap());
    }

    #[test]
    fn row_multiplier_matches_oracle((n, m, a, b) in operands(), cfg in config()) {
        let mut bench = Bench::new(n as usize, &[m], cfg).unwrap();
        let got = bench.modmul_rows(&[a], &[b]).unwrap()[0];
        prop_assert_eq!(got, oracle_montmul(a as u128, b as u128, m, n).unwrap());
    }

    #[test]
    fn modadd_modsub((n, m, u, t) in operands()) {
        let ctx = MontgomeryContext::new(m, n).unwrap();
        let u = u % m;
        prop_assert_eq!(bp_modadd(&ctx, &[u], &[t]).unwrap()[0], ((u as u128 + t as u128) % m as u128) as u64);
        prop_assert_eq!(bp_modsub(&ctx, &[u], &[t]).unwrap()[0], ((u as u128 + m as u128 - t as u128) % m as u128) as u64);
    }

    #[test]
    fn plain_add_wraps(w in 2usize..=64, x in any::<u64>(), y in any::<u64>()) {
        let mask = if w == 64 { u64::MAX } else { (1 << w) - 1 };
        prop_assert_eq!(bp_add(w, &[x & mask], &[y & mask]).unwrap()[0], (x & mask).wrapping_add(y & mask) & mask);
    }
}

#[test]
fn modmul_shift_count_is_width_plus_popcount() {
    for (n, m) in [(8u32, 97u64), (16, 7681), (24, 8380417), (64, (1u64 << 62) + 1)] {
        let ctx = MontgomeryContext::new(m, n).unwrap();
        let bench = Bench::new(n as usize, &[m], ArithConfig::default()).unwrap();
        for a in [0u64, 1, 3, 0xa5, (1u64 << (n - 1)) | 1] {
            let counts = insram_ntt::arith::compile_twiddle_commands(a, &ctx, &bench.rows).unwrap().counts();
            assert_eq!(counts.shift_global, n as u64 + a.count_ones() as u64);
            // m-selection broadcasts Sum's LSB across the tile every iteration
            assert_eq!(counts.shift_tile, n as u64 * (n as u64 - 1));
        }
    }
}

#[test]
fn headroom_and_range_errors() {
    let tight = MontgomeryContext::new(12289, 14).unwrap();
    assert!(bp_modadd(&tight, &[1], &[1]).is_err());
    let ctx = MontgomeryContext::new(7, 3).unwrap();
    let bench = Bench::new(3, &[7], ArithConfig::default()).unwrap();
    assert!(insram_ntt::arith::compile_twiddle_commands(8, &ctx, &bench.rows).is_err());
    assert!(MontgomeryContext::new(8, 3).is_err());
}

#[test]
fn data_dependent_latency_is_never_slower() {
    let q = 7681;
    let u: Vec<u64> = (0..64).map(|i| i * 37 % q).collect();
    let t: Vec<u64> = (0..64).map(|i| i * 11 % q).collect();
    let mut fixed = Bench::new(14, &[q; 64], ArithConfig::default()).unwrap();
    let cfg = ArithConfig { latency: Latency::DataDependent, ..Default::default() };
    let mut early = Bench::new(14, &[q; 64], cfg).unwrap();
    assert_eq!(fixed.modadd(&u, &t).unwrap(), early.modadd(&u, &t).unwrap());
    assert!(early.array.counts().micro_ops() <= fixed.array.counts().micro_ops());
    assert!(early.array.counts().zero_test > 0);
}
