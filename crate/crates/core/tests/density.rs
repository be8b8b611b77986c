use omegas_core::density::{beta_bounds_by_product, beta_bounds_by_r, renyi_r};
use rug::Float;

const BETA: f64 = 0.735_840_306_806_498_9;

#[test]
fn by_r_with_published_caps() {
    let b = beta_bounds_by_r(&[3_000_000, 17_500, 1500, 450, 250, 170], 128).unwrap();
    println!("{b}");
    assert!(b.lower > 0.735836 && b.upper < 0.735844);
    assert!(b.contains(BETA));
}

#[test]
fn by_product_ten_million() {
    let b = beta_bounds_by_product(10_000_000, 128, 1).unwrap();
    println!("{b}");
    assert!(b.lower > 0.735840285 && b.upper < 0.735840329);
    assert!(b.contains(BETA));
}

#[test]
fn renyi_at_minus_one() {
    let r = renyi_r(&Float::with_val(128, -1), 1_000_000).unwrap();
    let beta = (1.0 + r.value.to_f64()) / 2.0;
    println!("{beta:.16} tail {:e} err {:e}", r.tail_estimate, r.error_bound);
    assert!((beta - BETA).abs() < 1e-10);
}
