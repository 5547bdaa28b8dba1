use zwanzig::model::ReservoirSpec;
use zwanzig::spectrum::{secular_value_truncated, solve_spectrum};

fn main() {
    let spec = ReservoirSpec::bare_truncated(1e-3, 60);
    match solve_spectrum(&spec) {
        Ok(sol) => println!("ok, worst residual {:e}", sol.worst_residual()),
        Err(e) => println!("error: {e}"),
    }
    // Manual scan of the interval [59, 60].
    let c2 = 1e-6f64;
    for u in [1.6e-8, 1.7e-8, 1.8e-8, 1e-7, 1e-5, 1e-3, 0.5] {
        let eps = 59.0 + u;
        let direct = secular_value_truncated(&spec, eps).unwrap();
        let approx = eps - c2 / u;
        println!("u={u:.3e}  F_direct={direct:+.6e}  crude={approx:+.6e}");
    }
}
