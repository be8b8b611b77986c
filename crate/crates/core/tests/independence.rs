use std::path::Path;

use omegas_core::independence::{
    apply_transform, bareiss_determinant, build_lattice, gram_schmidt_norms_exact, gram_schmidt_norms_float, is_lll_reduced,
    lll_reduce, read_certificate, run_certification, write_certificate, CertificationParams, LllMode,
};
use omegas_core::oscillation::{anderson_stark_bound, KernelSpec, WeightedResidueSet};
use omegas_core::zeros::{load_zeros, ZeroTable};
use omegas_core::zeta::{ResidueSet, ZetaConfig, ZetaKernel};
use omegas_core::{Line, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

fn zeros() -> ZeroTable {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/zeros.txt");
    load_zeros(&path, 64).unwrap()
}

fn residues(table: &ZeroTable, problem: Problem, m: usize) -> ResidueSet {
    let kernel = ZetaKernel::new(ZetaConfig::default());
    ResidueSet::compute(&kernel, &table.records()[..m], problem, Line::Half, 64, 10_000, 1).unwrap()
}

#[test]
fn first_twenty_zeros_are_one_independent() {
    let table = zeros();
    let res = residues(&table, Problem::Mertens, 20);
    let params = CertificationParams::new(Problem::Mertens, 20, 20, 96, 0.99);
    let cert = run_certification(&params, &table, &res).unwrap();
    println!("N = {} min = {}", cert.certified_n, cert.lattices[0].min_gs_norm_sq);
    assert_eq!(cert.lattices.len(), 1);
    assert_eq!(cert.selected_indices, (1..=20).collect::<Vec<_>>());
    assert!(cert.certified_n >= 1);
}

#[test]
fn omega_small_run_and_resume() {
    let table = zeros();
    let res = residues(&table, Problem::Omega, 12);
    let dir = tempfile::tempdir().unwrap();
    let mut params = CertificationParams::new(Problem::Omega, 8, 12, 128, 0.99);
    params.resume_dir = Some(dir.path().to_owned());
    let cert = run_certification(&params, &table, &res).unwrap();
    println!("{}", write_certificate(&cert));
    assert_eq!(cert.lattices.len(), 5);
    assert!(cert.certified_n >= 1);
    assert_eq!(cert.certified_n, cert.lattices.iter().map(|l| l.n_i).min().unwrap());
    assert!(cert.t < table.records()[12].gamma && cert.t > table.records()[11].gamma);

    // records on disk are reused; a run on 4 workers gives the same certificate
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 5);
    params.workers = 4;
    let again = run_certification(&params, &table, &res).unwrap();
    assert_eq!(again, cert);
    params.resume_dir = None;
    params.mode = LllMode::Exact;
    assert_eq!(run_certification(&params, &table, &res).unwrap().certified_n, cert.certified_n);

    let text = write_certificate(&cert);
    let back = read_certificate(&text).unwrap();
    assert_eq!(back.lattices, cert.lattices);
    assert_eq!(back.selected_indices, cert.selected_indices);
    assert_eq!(write_certificate(&back), text);

    // feeding the certificate into the oscillation bound
    let kernel = KernelSpec::jurkat_peyerimhoff(cert.t.to_f64()).unwrap();
    let weighted = WeightedResidueSet::build(Problem::Omega, kernel, &table, &res).unwrap();
    let sub = weighted.restrict(&cert.selected_indices).unwrap();
    let (hi, lo) = anderson_stark_bound(&sub, cert.certified_n).unwrap();
    let n = cert.certified_n as f64;
    assert!((hi - 2.0 * n / (n + 1.0) * sub.weighted_mass()).abs() < 1e-15);
    assert_eq!(hi, -lo);
}

#[test]
fn parameter_errors() {
    let table = zeros();
    let res = residues(&table, Problem::Mertens, 20);
    assert!(run_certification(&CertificationParams::new(Problem::Mertens, 21, 20, 96, 0.99), &table, &res).is_err());
    assert!(run_certification(&CertificationParams::new(Problem::Mertens, 5, 30, 96, 0.99), &table, &res).is_err());
    let mut p = CertificationParams::new(Problem::Mertens, 5, 20, 200, 0.99);
    assert!(run_certification(&p, &table, &res).is_err());
    p.b_bits = 64;
    p.epsilon = Float::with_val(64, 10);
    assert!(run_certification(&p, &table, &res).is_err());
}

#[test]
fn certified_n_monotone_in_n() {
    let table = zeros();
    let res = residues(&table, Problem::Mertens, 14);
    let mut prev = u64::MAX;
    for n in [4, 6, 8, 10, 12] {
        let cert = run_certification(&CertificationParams::new(Problem::Mertens, n, 14, 64, 0.99), &table, &res).unwrap();
        assert!(cert.certified_n <= prev, "n = {n}: {} > {prev}", cert.certified_n);
        prev = cert.certified_n;
    }
}

#[test]
fn lll_transforms_are_unimodular_and_gs_agrees() {
    let table = zeros();
    let g: Vec<Float> = table.records()[..24].iter().map(|r| r.gamma.clone()).collect();
    for (n, b) in [(6, 40), (10, 64), (16, 96), (23, 128)] {
        let star = &g[n];
        for basis in [build_lattice(&g[..n], None, b, Some(166)).unwrap(), build_lattice(&g[..n], Some(star), b, Some(166)).unwrap()] {
            for mode in [LllMode::Exact, LllMode::Hybrid] {
                let out = lll_reduce(&basis, 0.99, mode).unwrap();
                assert_eq!(bareiss_determinant(&out.transform).abs(), 1);
                assert_eq!(apply_transform(&out.transform, &basis.rows), out.basis.rows);
                assert!(is_lll_reduced(&out.basis, 0.99).unwrap());
                let exact = gram_schmidt_norms_exact(&out.basis).unwrap();
                let float = gram_schmidt_norms_float(&out.basis, 2 * b + 64);
                for (e, f) in exact.iter().zip(&float) {
                    let rel = ((e.to_f64() - f.to_f64()) / e.to_f64()).abs();
                    assert!(rel < 1e-12, "n={n} b={b} rel={rel}");
                }
            }
        }
    }
}

/// Random integer relations with small coefficients never come closer to
/// zero (or to γ*) than the certified lattice gap allows.
#[test]
fn randomized_relation_search() {
    let table = zeros();
    let res = residues(&table, Problem::Mertens, 10);
    let params = CertificationParams::new(Problem::Mertens, 10, 10, 64, 0.99);
    let cert = run_certification(&params, &table, &res).unwrap();
    let big_n = cert.certified_n;
    assert!(big_n >= 1);
    let gammas: Vec<f64> = table.records()[..10].iter().map(|r| r.gamma.to_f64()).collect();
    let bound = big_n.min(3) as i64;
    let margin = 2f64.powi(-(params.b_bits as i32)) * 10.0 * big_n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut smallest = f64::INFINITY;
    for _ in 0..1_000_000 {
        let c: Vec<i64> = (0..10).map(|_| rng.gen_range(-bound..=bound)).collect();
        if c.iter().all(|&x| x == 0) {
            continue;
        }
        let s: f64 = c.iter().zip(&gammas).map(|(&a, g)| a as f64 * g).sum();
        smallest = smallest.min(s.abs());
    }
    println!("closest random relation {smallest:e}, margin {margin:e}");
    assert!(smallest > margin);
}
