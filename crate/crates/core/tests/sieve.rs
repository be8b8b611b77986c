use omegas_core::sieve::{
    average_order_report, normalized_export, parity_agreement, read_checkpoints_csv, summatory, value_bruteforce,
    write_checkpoints_csv, Checkpoints, Sieve, SieveConfig, SieveFunc, XiTable,
};
use proptest::prelude::*;

const FUNCS: [SieveFunc; 3] = [SieveFunc::Xi, SieveFunc::Lambda, SieveFunc::Mu];

fn config(workers: usize) -> SieveConfig {
    SieveConfig { table_size: 3_000_000, block_size: 4096, workers, memory_cap: None }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn blocks_match_trial_division(a in 1u64..5_000_000_000, len in 1u64..2000, f in 0usize..3) {
        let func = FUNCS[f];
        let sieve = Sieve::new(func, 90_000, a + len, None).unwrap();
        let block = sieve.block(a, a + len).unwrap();
        for n in a..a + len {
            prop_assert_eq!(block.value(n), value_bruteforce(func, n), "n = {}", n);
        }
        let sum: i64 = (a..a + len).map(|n| value_bruteforce(func, n) as i64).sum();
        prop_assert_eq!(block.partial_sum, sum);
    }

    #[test]
    fn summatory_matches_running_sum(x in 1u64..20_000, stride in 1u64..500, f in 0usize..3) {
        let func = FUNCS[f];
        let s = summatory(func, x, &Checkpoints::Stride(stride), &config(1)).unwrap();
        let mut running = 0i64;
        let mut expected = Vec::new();
        for n in 1..=x {
            running += value_bruteforce(func, n) as i64;
            if n % stride == 0 || n == x {
                expected.push((n, running));
            }
        }
        prop_assert_eq!(s.checkpoints, expected);
    }
}

#[test]
fn polya_values() {
    let s = summatory(SieveFunc::Lambda, 40, &Checkpoints::List(vec![2, 4, 10, 16, 40]), &config(1)).unwrap();
    assert!(s.checkpoints.iter().all(|&(_, v)| v == 0));
    let s = summatory(SieveFunc::Lambda, 1500, &Checkpoints::Stride(1), &config(1)).unwrap();
    assert!(s.checkpoints[1..].iter().all(|&(_, v)| v <= 0));
}

#[test]
fn known_summatory_values() {
    let pts = Checkpoints::List(vec![10, 100, 1000, 10_000, 100_000, 1_000_000, 10_000_000]);
    let m = summatory(SieveFunc::Mu, 10_000_000, &pts, &config(1)).unwrap();
    let vals: Vec<i64> = m.checkpoints.iter().map(|c| c.1).collect();
    assert_eq!(vals, [-1, 1, 2, -23, -48, 212, 1037]);
    let l = summatory(SieveFunc::Lambda, 10_000_000, &pts, &config(1)).unwrap();
    let vals: Vec<i64> = l.checkpoints.iter().map(|c| c.1).collect();
    assert_eq!(vals, [0, -2, -14, -94, -288, -530, -842]);
}

#[test]
fn workers_and_block_sizes_agree() {
    let pts = Checkpoints::Geometric(1.01);
    let base = summatory(SieveFunc::Xi, 3_000_000, &pts, &config(1)).unwrap();
    for (workers, block) in [(4, 4096), (16, 77_777), (3, 30)] {
        let cfg = SieveConfig { block_size: block, ..config(workers) };
        assert_eq!(summatory(SieveFunc::Xi, 3_000_000, &pts, &cfg).unwrap(), base);
    }
}

#[test]
fn checkpoint_csv_round_trip_and_export() {
    let s = summatory(SieveFunc::Xi, 5000, &Checkpoints::Stride(100), &config(1)).unwrap();
    let mut buf = Vec::new();
    write_checkpoints_csv(&s, &mut buf).unwrap();
    assert_eq!(read_checkpoints_csv(SieveFunc::Xi, buf.as_slice()).unwrap(), s);
    let rows = normalized_export(&s).unwrap();
    assert_eq!(rows.len(), 50);
    assert!((rows[0].0 - 100f64.ln()).abs() < 1e-15);
}

#[test]
fn table_persistence() {
    let t = XiTable::build(3000, SieveFunc::Lambda, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.bin");
    t.save(&p).unwrap();
    let back = XiTable::load(&p).unwrap();
    assert_eq!(back.bytes(), t.bytes());
    for n in 1..3000 {
        let want = (n % 2 != 0 && n % 3 != 0 && n % 5 != 0).then(|| value_bruteforce(SieveFunc::Lambda, n));
        assert_eq!(back.value(n), want, "n = {n}");
    }
}

#[test]
fn parity_agreement_and_average_order() {
    assert_eq!(parity_agreement(10, &config(1)).unwrap(), 8);
    let direct = (1..=100_000u64)
        .filter(|&n| value_bruteforce(SieveFunc::Xi, n) == value_bruteforce(SieveFunc::Lambda, n))
        .count() as u64;
    assert_eq!(parity_agreement(100_000, &config(2)).unwrap(), direct);

    let r = average_order_report(1_000_000).unwrap();
    let (mut w, mut big) = (0u128, 0u128);
    for n in 2..=1_000_000u64 {
        let (a, b) = omegas_core::sieve::omega_pair_bruteforce(n);
        w += a as u128;
        big += b as u128;
    }
    assert_eq!((r.sum_omega, r.sum_big_omega), (w, big));
    // Mertens-type constants 0.2615 and 1.0346, approached slowly
    assert!((r.a_est - 0.2615).abs() < 0.05 && (r.b_est - 1.0346).abs() < 0.05, "{r:?}");
}
