//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use omegas_core::hp::ComplexHp;
use omegas_core::independence::{
    bareiss_determinant, build_lattice, gram_schmidt_norms_exact, gram_schmidt_norms_float, is_lll_reduced,
    lll_reduce, LllMode,
};
use omegas_core::oscillation::correlation;
use omegas_core::sieve::{omega_pair_bruteforce, Sieve, SieveFunc};
use omegas_core::zeros::load_zeros;
use omegas_core::zeta::{ZetaConfig, ZetaKernel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

const BETA: f64 = 0.735_840_306_806_498_9;
const PUBLISHED_INDICES: &str = "1-72,74-76,78-116,118-145,147-170,172-178,180,182-188,190-194,196-198,200-202,204,206,207,\
209,212-214,216,217,219,222,224,225,230,232-234,237,238,240,242-245,248-250,253,257,263,265,268,269,275,282,283,290,\
298,299,301,311,314-316,327,340,364";

fn zeros_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/zeros.txt")
}

/// Runs the binary and returns stdout; panics on failure.
fn omegas(workers: u32, args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_omegas"))
        .arg("--workers")
        .arg(workers.to_string())
        .args(args)
        .env("OMEGAS_ZEROS", zeros_path())
        .env_remove("OMEGAS_PRECISION")
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "omegas {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column_f64(text: &str, col: usize) -> Vec<f64> {
    csv_rows(text).iter().map(|r| r[col].parse().expect("number")).collect()
}

fn key(text: &str, k: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{k} = ")).or_else(|| l.strip_prefix(&format!("{k} "))))
        .unwrap_or_else(|| panic!("no '{k}' in output"))
        .trim()
        .to_string()
}

fn key_f64(text: &str, k: &str) -> f64 {
    key(text, k).parse().expect("number")
}

/// CLI invocations whose artifacts are re-run at other worker counts.
type Runs = BTreeMap<String, (Vec<String>, String)>;

fn record(runs: &mut Runs, label: &str, args: &[&str]) -> String {
    let text = omegas(1, args);
    runs.insert(label.to_string(), (args.iter().map(|s| s.to_string()).collect(), text.clone()));
    text
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn c1(runs: &mut Runs) -> Outcome {
    let text = record(runs, "1", &["sieve", "--func", "lambda", "--xmax", "40", "--points", "2,4,10,16,40"]);
    let rows = csv_rows(&text);
    let vals: Vec<String> = rows.iter().map(|r| format!("L({})={}", r[0], r[1])).collect();
    outcome(rows.len() == 5 && rows.iter().all(|r| r[1] == "0"), vals.join(" "))
}

fn c2(runs: &mut Runs) -> Outcome {
    let text = record(runs, "2", &["sieve", "--func", "lambda", "--xmax", "1500", "--stride", "1"]);
    let rows = csv_rows(&text);
    let max = rows[1..].iter().map(|r| r[1].parse::<i64>().unwrap()).max().unwrap();
    outcome(rows.len() == 1500 && max <= 0, format!("max L(x) over 2..1500 = {max}"))
}

fn c3(runs: &mut Runs) -> Outcome {
    let x = 1_000_000u64;
    let sieves: Vec<(SieveFunc, Sieve)> = [SieveFunc::Xi, SieveFunc::Lambda, SieveFunc::Mu]
        .into_iter()
        .map(|f| (f, Sieve::new(f, 1050, x, None).expect("sieve")))
        .collect();
    let blocks: Vec<_> = sieves.iter().map(|(f, s)| (*f, s.block(1, x + 1).expect("block"))).collect();
    let mut mismatches = 0u64;
    for n in 1..=x {
        let (w, big) = omega_pair_bruteforce(n);
        let sign = |k: u32| if k % 2 == 0 { 1i8 } else { -1 };
        for (f, b) in &blocks {
            let want = match f {
                SieveFunc::Xi => sign(w),
                SieveFunc::Lambda => sign(big),
                SieveFunc::Mu if w == big => sign(w),
                SieveFunc::Mu => 0,
            };
            if b.value(n) != want {
                mismatches += 1;
            }
        }
    }
    for f in ["xi", "lambda", "mu"] {
        record(runs, &format!("3-{f}"), &["sieve", "--func", f, "--xmax", "1e6", "--stride", "1000", "--block-size", "65536"]);
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches over 3 x 10^6 values"))
}

fn c4(runs: &mut Runs) -> Outcome {
    let r = record(runs, "4-by-r", &["beta", "--mode", "by-r"]);
    let p = record(runs, "4-by-product", &["beta", "--mode", "by-product", "--B", "1e7"]);
    let (rl, ru) = (key_f64(&r, "lower"), key_f64(&r, "upper"));
    let (pl, pu) = (key_f64(&p, "lower"), key_f64(&p, "upper"));
    let pass = rl > 0.735836 && ru < 0.735844 && pl <= BETA && BETA <= pu && pl > 0.73584028 && pu < 0.73584033;
    outcome(pass, format!("by-r [{rl:.12}, {ru:.12}], by-product [{pl:.12}, {pu:.12}]"))
}

fn c5(runs: &mut Runs) -> Outcome {
    let text = record(runs, "5", &["beta", "--mode", "renyi", "--prime-bound", "1e6"]);
    let beta = key(&text, "beta");
    let err = (beta.parse::<f64>().unwrap() - BETA).abs();
    outcome(err < 1e-10, format!("(1+R(-1))/2 = {beta}, error {err:.1e}"))
}

fn c6(runs: &mut Runs) -> Outcome {
    let text = record(runs, "6", &["beta", "--mode", "empirical", "--x", "1e8"]);
    let f = key_f64(&text, "fraction");
    outcome((f - 0.7358403).abs() < 1e-4, format!("beta(10^8)/10^8 = {f}"))
}

fn c7(runs: &mut Runs) -> Outcome {
    let a = record(runs, "7-a", &["series", "a-sequence", "--order", "9"]);
    let t = record(runs, "7-fk", &["series", "fk-tail", "--k", "6", "--order", "9"]);
    let a: Vec<String> = csv_rows(&a).into_iter().map(|r| r[1].clone()).collect();
    let t: Vec<String> = csv_rows(&t).into_iter().map(|r| r[1].clone()).collect();
    let pass = a.len() == 9 && a[6..] == ["18", "30", "56"] && t == ["1", "0", "0", "0", "0", "0", "0", "-18", "-30", "-56"];
    outcome(pass, format!("a = ({}), F6 = ({})", a.join(", "), t.join(", ")))
}

fn c8() -> Outcome {
    let x = 1_000_000u64;
    let block = Sieve::new(SieveFunc::Xi, 1050, x, None).unwrap().block(1, x + 1).unwrap();
    let direct: f64 = (1..=x).rev().map(|n| block.value(n) as f64 / (n as f64 * n as f64)).sum();
    let kernel = ZetaKernel::new(ZetaConfig::default());
    let h2 = kernel.h_factorized(&ComplexHp::from_f64(2.0, 0.0, 96), 100_000, 96).unwrap().value.to_c64();
    let h1 = kernel.h_factorized(&ComplexHp::from_f64(1.0 + 1e-6, 0.0, 96), 100_000, 96).unwrap().value.to_c64();
    let diff = (h2.re - direct).abs();
    outcome(
        diff < 1e-6 && h1.norm() < 1e-4,
        format!("h(2): direct {direct:.12}, factorised {:.12}, diff {diff:.1e}; |h(1+1e-6)| = {:.3e}", h2.re, h1.norm()),
    )
}

fn c9(runs: &mut Runs) -> Outcome {
    let text = record(
        runs,
        "9",
        &["oscillate", "bstar", "--problem", "l", "--kernel", "fejer", "--T", "1000", "--u", "831.846,853.853"],
    );
    let b = column_f64(&text, 1);
    let terms = key(&text, "# config: terms");
    outcome(
        terms == "649" && b[0] > 0.0 && b[1] < 0.0,
        format!("{terms} zeros, B*(831.846) = {:.6e}, B*(853.853) = {:.6}", b[0], b[1]),
    )
}

fn c10(runs: &mut Runs) -> Outcome {
    let text = record(
        runs,
        "10",
        &[
            "oscillate", "bound", "--problem", "h", "--kernel", "jp", "--m", "2365", "--epsilon", "1e-10", "--N",
            "3950", "--indices", PUBLISHED_INDICES,
        ],
    );
    let count = key(&text, "ordinates");
    let bound = key_f64(&text, "limsup_lower_bound");
    outcome(count == "239" && bound >= 1.700144, format!("{count} ordinates, 2(N/(N+1)) sum = {bound:.9}"))
}

fn c11(runs: &mut Runs) -> Outcome {
    let text = record(runs, "11", &["certify", "--problem", "m", "--n", "20", "--m", "20", "--b", "96", "--delta", "0.99"]);
    let big_n: u64 = key(&text, "certified_N").parse().unwrap();

    // unimodular transforms and exact/float Gram-Schmidt agreement on the
    // desk lattices
    let table = load_zeros(&zeros_path(), 64).unwrap();
    let g: Vec<Float> = table.records()[..21].iter().map(|r| r.gamma.clone()).collect();
    let mut props = true;
    for basis in [
        build_lattice(&g[..20], None, 96, Some(166)).unwrap(),
        build_lattice(&g[..19], Some(&g[19]), 96, Some(166)).unwrap(),
    ] {
        let out = lll_reduce(&basis, 0.99, LllMode::Hybrid).unwrap();
        props &= bareiss_determinant(&out.transform).abs() == 1;
        props &= is_lll_reduced(&out.basis, 0.99).unwrap();
        let exact = gram_schmidt_norms_exact(&out.basis).unwrap();
        let float = gram_schmidt_norms_float(&out.basis, 256);
        props &= exact.iter().zip(&float).all(|(e, f)| ((e.to_f64() - f.to_f64()) / e.to_f64()).abs() < 1e-12);
    }

    // random small relations stay far from zero
    let gammas: Vec<f64> = g[..20].iter().map(Float::to_f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut closest = f64::INFINITY;
    for _ in 0..200_000 {
        let c: Vec<i64> = (0..20).map(|_| rng.gen_range(-1..=1)).collect();
        if c.iter().any(|&x| x != 0) {
            closest = closest.min(c.iter().zip(&gammas).map(|(&a, g)| a as f64 * g).sum::<f64>().abs());
        }
    }
    let margin = 2f64.powi(-96) * 10.0;
    let pass = big_n >= 1 && props && closest > margin;
    outcome(pass, format!("N = {big_n}, LLL properties {props}, closest random relation {closest:.2e}"))
}

fn c12(runs: &mut Runs) -> Outcome {
    let xmax = (18f64).exp().floor() as u64;
    let xmax = xmax.to_string();
    let s = record(runs, "12-sieve", &["sieve", "--func", "xi", "--xmax", &xmax, "--u-grid", "15,18,300", "--normalized"]);
    let e = record(runs, "12-estimate", &["oscillate", "estimate", "--problem", "h", "--T", "5000", "--u-grid", "15,18,300"]);
    let a = column_f64(&s, 1);
    let b = column_f64(&e, 1);
    let r = correlation(&a, &b);
    let resid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    outcome(
        a.len() == 300 && r > 0.9,
        format!(
            "correlation {r:.4} over 300 points; sieve minus estimate runs from {:.3} to {:.3}",
            resid[0],
            resid[resid.len() - 1]
        ),
    )
}

fn c13(runs: &Runs) -> Outcome {
    let mut differing = Vec::new();
    for workers in [4, 16] {
        for (label, (args, text)) in runs {
            let args: Vec<&str> = args.iter().map(String::as_str).collect();
            if omegas(workers, &args) != *text {
                differing.push(format!("{label}@{workers}"));
            }
        }
    }
    let detail = if differing.is_empty() {
        format!("{} artifacts identical at 1, 4 and 16 workers", runs.len())
    } else {
        format!("differing: {}", differing.join(", "))
    };
    outcome(differing.is_empty(), detail)
}

fn main() {
    // `cargo test -- --list` and filters: nothing to enumerate
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut runs = Runs::new();
    type Check<'a> = Box<dyn FnOnce(&mut Runs) -> Outcome + 'a>;
    let criteria: Vec<(u32, &str, Duration, Check)> = vec![
        (1, "Polya identities", Duration::from_secs(1), Box::new(c1)),
        (2, "L(x) <= 0 on [2, 1500]", Duration::from_secs(1), Box::new(c2)),
        (3, "sieve vs trial division to 10^6", Duration::from_secs(60), Box::new(c3)),
        (4, "density brackets", Duration::from_secs(1800), Box::new(c4)),
        (5, "Renyi product", Duration::from_secs(60), Box::new(c5)),
        (6, "empirical density at 10^8", Duration::from_secs(300), Box::new(c6)),
        (7, "a-sequence and F6 coefficients", Duration::from_secs(1), Box::new(c7)),
        (8, "Dirichlet series consistency", Duration::from_secs(60), Box::new(|_: &mut Runs| c8())),
        (9, "Haselgrove signs", Duration::from_secs(600), Box::new(c9)),
        (10, "oscillation bound 1.700144", Duration::from_secs(3600), Box::new(c10)),
        (11, "weak independence at desk scale", Duration::from_secs(300), Box::new(c11)),
        (12, "explicit estimate vs sieved H", Duration::from_secs(7200), Box::new(c12)),
    ];
    let mut failed = 0;
    let mut report = |id: u32, name: &str, budget: Duration, o: Outcome, elapsed: Duration| {
        let pass = o.pass && elapsed <= budget;
        if !pass {
            failed += 1;
        }
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:2} {verdict}  {name}: {} [{:.2} s, budget {} s]",
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    };
    for (id, name, budget, check) in criteria {
        let t0 = Instant::now();
        let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| check(&mut runs)));
        let o = result.unwrap_or_else(|_| outcome(false, "panicked"));
        report(id, name, budget, o, t0.elapsed());
    }
    let t0 = Instant::now();
    let o = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| c13(&runs)))
        .unwrap_or_else(|_| outcome(false, "panicked"));
    report(13, "determinism across workers", Duration::from_secs(7200), o, t0.elapsed());
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
