//! Integration kernels: 15-point Gauss–Kronrod with recursive refinement,
//! Gauss–Legendre panels, and a half-period-segmented integrator with Euler
//! acceleration for oscillatory tails on semi-infinite intervals.

use crate::{Error, Result, C64};

// 7-15 Gauss-Kronrod pair, positive abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_47,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_93,
    0.279_705_391_489_276_67,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod 7-15 panel. Returns (integral, error estimate).
pub fn gk15<F>(f: &F, a: f64, b: f64) -> (C64, f64)
where
    F: Fn(f64) -> C64,
{
    let (integral, err, _) = gk15_full(f, a, b);
    (integral, err)
}

/// As `gk15`, additionally returning the integral of |f| (for roundoff
/// floors in the adaptive driver).
pub fn gk15_full<F>(f: &F, a: f64, b: f64) -> (C64, f64, f64)
where
    F: Fn(f64) -> C64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let flo = f(center - dx);
        let fhi = f(center + dx);
        let fsum = flo + fhi;
        kronrod += fsum * WGK[j];
        resabs += (flo.norm() + fhi.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += fsum * WG[j / 2];
        }
    }
    let integral = kronrod * half;
    let err = ((kronrod - gauss) * half).norm();
    (integral, err, resabs * half.abs())
}

/// Adaptive Gauss–Kronrod to absolute tolerance `tol`.
pub fn adaptive<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<C64>
where
    F: Fn(f64) -> C64,
{
    fn recurse<F: Fn(f64) -> C64>(
        f: &F,
        a: f64,
        b: f64,
        tol: f64,
        depth: usize,
        worst: &mut f64,
    ) -> C64 {
        let (whole, err, resabs) = gk15_full(f, a, b);
        // Roundoff floor: below ~100 ulp of ∫|f| the estimate is noise and
        // further splitting cannot help.
        let floor = 100.0 * f64::EPSILON * resabs;
        if err <= tol.max(floor) || depth >= 40 {
            if depth >= 40 && err > tol.max(floor) {
                *worst = worst.max(err);
            }
            return whole;
        }
        let mid = 0.5 * (a + b);
        recurse(f, a, mid, 0.5 * tol, depth + 1, worst)
            + recurse(f, mid, b, 0.5 * tol, depth + 1, worst)
    }
    let mut worst = 0.0;
    let value = recurse(f, a, b, tol, 0, &mut worst);
    if worst > tol.max(1e-300) * 1e3 {
        return Err(Error::QuadratureFailure { error: worst });
    }
    Ok(value)
}

/// Adaptive quadrature of a real integrand.
pub fn adaptive_real<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    Ok(adaptive(&|x| C64::new(f(x), 0.0), a, b, tol)?.re)
}

/// Integral over [a, ∞) of an oscillatory integrand with decaying envelope.
/// `omega(x)` estimates the local phase-rotation rate (rad per unit x); the
/// interval is cut into half-period segments and the alternating partial sums
/// are Euler-accelerated.
pub fn oscillatory_tail<F, W>(f: &F, a: f64, omega: &W, tol: f64) -> Result<C64>
where
    F: Fn(f64) -> C64,
    W: Fn(f64) -> f64,
{
    const MAX_SEGMENTS: usize = 2048;
    let mut partials = Vec::with_capacity(64);
    let mut x = a;
    let mut sum = C64::new(0.0, 0.0);
    let mut history: Vec<C64> = Vec::new();
    for seg in 0..MAX_SEGMENTS {
        let w = omega(x).abs();
        let step = if w > 1e-12 {
            (std::f64::consts::PI / w).clamp(1e-6, 50.0)
        } else {
            50.0
        };
        let (value, _) = gk15(f, x, x + step);
        // A half-period can still be mildly curved; one refinement level.
        let (v1, _) = gk15(f, x, x + 0.5 * step);
        let (v2, _) = gk15(f, x + 0.5 * step, x + step);
        let refined = v1 + v2;
        let value = if (refined - value).norm() > 0.25 * tol {
            // refine further only in pathological segments
            adaptive(f, x, x + step, 0.25 * tol)?
        } else {
            refined
        };
        sum += value;
        partials.push(sum);
        history.push(euler_accelerate(&partials));
        // Converged when the accelerated estimates settle; the raw segment
        // values may still be large (slowly decaying envelopes are the whole
        // point of the acceleration).
        if seg >= 10 {
            let h = &history[history.len() - 3..];
            if (h[2] - h[1]).norm() < 0.5 * tol && (h[1] - h[0]).norm() < 0.5 * tol {
                return Ok(h[2]);
            }
        }
        x += step;
    }
    let n = history.len();
    let last_gap = (history[n - 1] - history[n - 2]).norm();
    if last_gap < tol * 10.0 {
        Ok(history[n - 1])
    } else {
        Err(Error::QuadratureFailure { error: last_gap })
    }
}

/// Euler transformation (iterated averaging) of a partial-sum sequence.
fn euler_accelerate(partials: &[C64]) -> C64 {
    let take = partials.len().min(24);
    let mut row: Vec<C64> = partials[partials.len() - take..].to_vec();
    while row.len() > 1 {
        for i in 0..row.len() - 1 {
            row[i] = (row[i] + row[i + 1]) * 0.5;
        }
        row.pop();
    }
    row[0]
}

/// Gauss–Legendre nodes and weights on [−1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess.
        let mut x =
            (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed-order Gauss–Legendre integral of a complex integrand over [a, b],
/// split into `panels` equal panels of `order` points each.
pub fn gauss_legendre_panels<F>(f: &F, a: f64, b: f64, order: usize, panels: usize) -> C64
where
    F: Fn(f64) -> C64,
{
    let (nodes, weights) = gauss_legendre(order);
    let mut total = C64::new(0.0, 0.0);
    let width = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let center = lo + 0.5 * width;
        let half = 0.5 * width;
        for (x, w) in nodes.iter().zip(&weights) {
            total += f(center + half * x) * (*w * half);
        }
    }
    total
}
