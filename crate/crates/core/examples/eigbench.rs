use std::time::Instant;
use zwanzig::linalg::{eigen_observer, SymMatrix};

fn main() {
    let n_levels: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2000);
    let dim = 2 * n_levels + 2;
    let mut a = SymMatrix::zeros(dim);
    let c = 1.0;
    for k in 0..(2 * n_levels + 1) {
        let level = k as f64 - n_levels as f64;
        a.set(k + 1, k + 1, level);
        a.set(0, k + 1, c);
    }
    let t0 = Instant::now();
    let eig = eigen_observer(&a, 0).unwrap();
    let dt = t0.elapsed();
    let sum_w: f64 = eig.observer_row.as_ref().unwrap().iter().map(|x| x * x).sum();
    println!(
        "dim {dim}: eigen_observer in {:.2?}, sum of observer weights = {:.12}",
        dt, sum_w
    );
}
