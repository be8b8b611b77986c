//! Worker pools and order-fixed reductions.
//!
//! Every parallel computation in the crate maps independent units (sieve
//! blocks, residues, lattice jobs) into an indexed `Vec` and then reduces it
//! sequentially, so results never depend on the worker count.

/// Runs `f` inside a rayon pool with exactly `workers` threads.
pub fn with_workers<R, F>(workers: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(pool) => pool.install(f),
        // thread spawning can fail in constrained sandboxes; run inline
        Err(_) => f(),
    }
}

/// Pairwise summation with a fixed tree shape.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n if n <= 8 => xs.iter().fold(0.0, |a, &b| a + b),
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}
