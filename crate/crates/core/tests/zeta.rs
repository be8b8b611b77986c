use num_complex::Complex64;
use omegas_core::hp::ComplexHp;
use omegas_core::sieve::{Sieve, SieveFunc};
use omegas_core::zeta::{ZetaConfig, ZetaKernel};

fn kernel() -> ZetaKernel {
    ZetaKernel::new(ZetaConfig::default())
}

#[test]
fn h_at_two_direct_vs_factorized() {
    let x = 1_000_000u64;
    let sieve = Sieve::new(SieveFunc::Xi, 1050, x, None).unwrap();
    let block = sieve.block(1, x + 1).unwrap();
    let direct: f64 = (1..=x).rev().map(|n| block.value(n) as f64 / (n as f64 * n as f64)).sum();

    let s = ComplexHp::from_f64(2.0, 0.0, 96);
    let h = kernel().h_factorized(&s, 100_000, 96).unwrap();
    assert!(h.tail_bound < 1e-20);
    let h = h.value.to_c64();
    assert!((h.re - direct).abs() < 1e-6, "{} vs {direct}", h.re);
    assert!(h.im.abs() < 1e-25);
}

#[test]
fn h_near_one_is_small() {
    let s = ComplexHp::from_f64(1.0 + 1e-6, 0.0, 96);
    let h = kernel().h_factorized(&s, 100_000, 96).unwrap().value.to_c64();
    assert!(h.norm() < 1e-4, "{h}");
}

#[test]
fn h_factorization_is_real_on_real_axis_and_conjugate_symmetric() {
    let k = kernel();
    for (re, im) in [(0.7, 3.0), (1.5, -20.0), (0.3, 100.0)] {
        let a = k.h_factorized(&ComplexHp::from_f64(re, im, 80), 10_000, 80).unwrap().value.to_c64();
        let b = k.h_factorized(&ComplexHp::from_f64(re, -im, 80), 10_000, 80).unwrap().value.to_c64();
        assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0), "{a} {b}");
    }
}

#[test]
fn residue_h_closure() {
    let k = kernel();
    let gamma = rug::Float::with_val(128, rug::Float::parse("14.134725141734693790457251983562470270784257115699").unwrap());
    let bits = 96;
    let r_h = k.residue_h(&gamma, 100_000, bits).unwrap().value.to_c64();
    let r_m = k.residue_m(&gamma, bits).unwrap().value.to_c64();
    let rho = ComplexHp::from_f64(0.5, gamma.to_f64(), bits);
    let f6 = k.f6(&rho, 100_000, bits).unwrap().value.to_c64();
    let mut den = Complex64::new(1.0, 0.0);
    for (m, e) in [(2.0, 1), (3.0, 2), (4.0, 3), (5.0, 6), (6.0, 9)] {
        let z = k.zeta_c64(Complex64::new(0.5 * m, gamma.to_f64() * m)).unwrap();
        den *= z.powi(e);
    }
    let closed = f6 / den * r_m;
    assert!((closed - r_h).norm() < 1e-10 * r_h.norm(), "{closed} vs {r_h}");
}
