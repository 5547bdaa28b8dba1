//! Mixed initial-state/reservoir eigenvalues from the secular equation,
//! residue weights, spectral moments, the absorption band, and the critical
//! mixing deformation.
//!
//! The secular function of the truncated system is
//! `F(ε) = ε − ε_s − Σ_n C_n²/(ε − ε_n⁰)`; it is monotone between poles, so
//! exactly one root lies in each inter-level interval plus one root beyond
//! each end of the truncated spectrum. Roots are refined in pole-local
//! coordinates, which keeps residuals at the 10⁻¹² level even for roots that
//! hug a pole.

use crate::linalg::{eigen_observer, SymMatrix};
use crate::model::{ReservoirSpec, ReservoirVariant};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// How the mixed spectrum was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SpectrumMethod {
    /// Bracketed bisection + safeguarded Newton on the secular function.
    RootSolve,
    /// Dense symmetric diagonalization (used when level order is permuted).
    Dense,
}

/// Mixed-state eigenvalues with residue weights.
#[derive(Clone, Debug)]
pub struct SpectrumSolution {
    /// Roots in ascending order.
    pub roots: Vec<f64>,
    /// Residue weights w = 1/F'(ε*); initial-state overlap of each state.
    pub weights: Vec<f64>,
    /// Root in pole-local form (anchor pole index into `poles`, offset u);
    /// empty for the dense path.
    pub local: Vec<(usize, f64)>,
    /// Unperturbed pole energies, ascending.
    pub poles: Vec<f64>,
    pub spec: ReservoirSpec,
    /// Initial-state energy ε_s (0 for the standard model).
    pub initial_offset: f64,
    pub method: SpectrumMethod,
}

impl SpectrumSolution {
    /// Σ w_n; equals 1 exactly in exact arithmetic (completeness).
    pub fn completeness(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Worst |F(ε*)| over all roots, evaluated in the local frame.
    pub fn worst_residual(&self) -> f64 {
        if self.method == SpectrumMethod::Dense {
            return f64::NAN;
        }
        let eval = SecularEval::new(&self.spec, self.initial_offset);
        self.local
            .iter()
            .map(|&(anchor, u)| eval.value_local(anchor, u).abs())
            .fold(0.0, f64::max)
    }
}

/// Secular function F(ε) per the operation contract: the bare variant with
/// zero level width uses the analytic cotangent resummation of the infinite
/// reservoir, every other case the truncated sum.
pub fn secular_value(spec: &ReservoirSpec, eps: f64) -> Result<f64> {
    if matches!(spec.variant, ReservoirVariant::Bare) && spec.level_width == 0.0 {
        let nearest = eps.round();
        let dist = (eps - nearest).abs();
        if dist < 1e-9 {
            return Err(Error::EvaluateAtPole {
                pole: nearest,
                distance: dist,
            });
        }
        let gamma_big = spec.gamma_big();
        return Ok(eps - gamma_big / (PI * eps).tan());
    }
    secular_value_truncated(spec, eps)
}

/// Secular function of the truncated reservoir (consistent with
/// `build_hamiltonian`); this is the form whose roots coincide with the
/// dense-matrix eigenvalues.
pub fn secular_value_truncated(spec: &ReservoirSpec, eps: f64) -> Result<f64> {
    spec.validate()?;
    let levels = spec.levels();
    let mut sum = 0.0;
    for l in &levels {
        let d = eps - l.energy;
        if d.abs() < 1e-9 {
            return Err(Error::EvaluateAtPole {
                pole: l.energy,
                distance: d.abs(),
            });
        }
        sum += l.coupling * l.coupling / d;
    }
    Ok(eps - sum)
}

/// Solves the full mixed spectrum of `spec` (initial state at energy 0).
pub fn solve_spectrum(spec: &ReservoirSpec) -> Result<SpectrumSolution> {
    solve_spectrum_with_offset(spec, 0.0)
}

/// As `solve_spectrum` with the initial state at energy `offset` (used by
/// the two-level-system sectors, where it is ∓Δ).
pub fn solve_spectrum_with_offset(spec: &ReservoirSpec, offset: f64) -> Result<SpectrumSolution> {
    spec.validate()?;
    if !spec.is_ordered() {
        // Level-order permutation: interlacing no longer guaranteed, fall
        // back to dense diagonalization.
        return solve_dense(spec, offset);
    }
    let eval = SecularEval::new(spec, offset);
    let n_poles = eval.poles.len();

    // Interior intervals in parallel; each solve is independent.
    let interior: Vec<(usize, f64)> = (0..n_poles - 1)
        .into_par_iter()
        .map(|i| {
            let gap = eval.poles[i + 1] - eval.poles[i];
            solve_interval(&eval, i, gap)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut local = Vec::with_capacity(n_poles + 1);
    // Root below the lowest pole.
    local.push((0, solve_outer_low(&eval)?));
    local.extend(interior);
    // Root above the highest pole.
    local.push((n_poles - 1, solve_outer_high(&eval)?));

    let mut roots = Vec::with_capacity(local.len());
    let mut weights = Vec::with_capacity(local.len());
    for &(anchor, u) in &local {
        roots.push(eval.poles[anchor] + u);
        weights.push(1.0 / eval.derivative_local(anchor, u));
    }
    Ok(SpectrumSolution {
        roots,
        weights,
        local,
        poles: eval.poles.clone(),
        spec: spec.clone(),
        initial_offset: offset,
        method: SpectrumMethod::RootSolve,
    })
}

fn solve_dense(spec: &ReservoirSpec, offset: f64) -> Result<SpectrumSolution> {
    let mut h = spec.build_hamiltonian()?;
    if !h.is_hermitian() {
        return Err(Error::InvalidSpec(
            "dense spectral fallback requires zero widths".into(),
        ));
    }
    h.diag[0] = crate::C64::new(offset, 0.0);
    let sym = h.to_symmetric()?;
    let eig = eigen_observer(&sym, 0)?;
    let row = eig.observer_row.unwrap();
    let weights = row.iter().map(|r| r * r).collect();
    let mut poles: Vec<f64> = spec.levels().iter().map(|l| l.energy).collect();
    poles.sort_by(f64::total_cmp);
    Ok(SpectrumSolution {
        roots: eig.values,
        weights,
        local: vec![],
        poles,
        spec: spec.clone(),
        initial_offset: offset,
        method: SpectrumMethod::Dense,
    })
}

/// Secular function evaluator with pole-local forms. For the bare variant,
/// the truncated sum is resummed through digamma functions, which makes one
/// evaluation O(1) instead of O(N); other variants sum directly.
struct SecularEval {
    poles: Vec<f64>,
    c2: Vec<f64>,
    offset: f64,
    /// Bare fast path: (coupling², N).
    bare: Option<(f64, i64)>,
}

impl SecularEval {
    fn new(spec: &ReservoirSpec, offset: f64) -> Self {
        let levels = spec.levels();
        let poles: Vec<f64> = levels.iter().map(|l| l.energy).collect();
        let c2: Vec<f64> = levels.iter().map(|l| l.coupling * l.coupling).collect();
        let bare = match spec.variant {
            ReservoirVariant::Bare => Some((spec.coupling * spec.coupling, spec.n_levels as i64)),
            _ => None,
        };
        SecularEval {
            poles,
            c2,
            offset,
            bare,
        }
    }

    /// F(poles[anchor] + u), stable for small |u|.
    fn value_local(&self, anchor: usize, u: f64) -> f64 {
        if let Some((c2, n)) = self.bare {
            return bare_value_local(c2, n, anchor as i64 - n, u, self.offset);
        }
        let pa = self.poles[anchor];
        let mut sum = 0.0;
        for (p, c2) in self.poles.iter().zip(&self.c2) {
            sum += c2 / ((pa - p) + u);
        }
        pa + u - self.offset - sum
    }

    /// dF/dε at poles[anchor] + u.
    fn derivative_local(&self, anchor: usize, u: f64) -> f64 {
        if let Some((c2, n)) = self.bare {
            return bare_derivative_local(c2, n, anchor as i64 - n, u);
        }
        let pa = self.poles[anchor];
        let mut sum = 0.0;
        for (p, c2) in self.poles.iter().zip(&self.c2) {
            let d = (pa - p) + u;
            sum += c2 / (d * d);
        }
        1.0 + sum
    }
}

/// Truncated bare secular function at ε = p + u (p integer, |p| ≤ N):
/// F = ε − ε_s − C²[ψ(N+1+ε) − ψ(N+1−ε)] − Γcot(πu) for |ε| within the
/// comb, and the direct digamma difference beyond it.
fn bare_value_local(c2: f64, n: i64, p: i64, u: f64, offset: f64) -> f64 {
    let nf = n as f64;
    let pf = p as f64;
    let eps = pf + u;
    let gamma_big = PI * c2;
    if p >= n && u > 0.0 {
        // Beyond the last pole: Σ = ψ(ε+N+1) − ψ(ε−N); ε−N = (p−N)+u > 0.
        let sum = digamma(eps + nf + 1.0) - digamma((pf - nf) + u);
        return eps - offset - c2 * sum;
    }
    if p <= -n && eps < -nf {
        // Mirror of the high outer branch; arguments assembled in the local
        // frame so the pole distance −(p+N)−u keeps its digits.
        let near = -((pf + nf) + u);
        let far = (nf - pf + 1.0) - u;
        let sum = -(digamma(far) - digamma(near));
        return eps - offset - c2 * sum;
    }
    // Inside the comb: cot(πε) = cot(πu) exactly for integer p; fold u to
    // the nearest integer so the sine never suffers argument-reduction loss.
    let uf = u - u.round();
    let cot = (PI * uf).cos() / (PI * uf).sin();
    let tail = digamma(nf + 1.0 + eps) - digamma(nf + 1.0 - eps);
    eps - offset - gamma_big * cot - c2 * tail
}

fn bare_derivative_local(c2: f64, n: i64, p: i64, u: f64) -> f64 {
    let nf = n as f64;
    let pf = p as f64;
    let eps = pf + u;
    if p >= n && u > 0.0 {
        let sum = trigamma((pf - nf) + u) - trigamma(eps + nf + 1.0);
        return 1.0 + c2 * sum;
    }
    if p <= -n && eps < -nf {
        let near = -((pf + nf) + u);
        let far = (nf - pf + 1.0) - u;
        let sum = trigamma(near) - trigamma(far);
        return 1.0 + c2 * sum;
    }
    let uf = u - u.round();
    let s = (PI * uf).sin();
    let comb = PI * PI / (s * s);
    let tail = trigamma(nf + 1.0 - eps) + trigamma(nf + 1.0 + eps);
    1.0 + c2 * (comb - tail)
}

/// Digamma via upward recurrence into the asymptotic series.
fn digamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut x = x;
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + x.ln() - 0.5 * inv
        - inv2
            * (1.0 / 12.0
                - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0))))
}

/// Trigamma via upward recurrence into the asymptotic series.
fn trigamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut x = x;
    let mut acc = 0.0;
    while x < 12.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + inv * (1.0 + 0.5 * inv + inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 / 42.0)))
}

/// One root in the interval above pole `anchor`, returned in pole-local
/// coordinates (anchor pole, offset). Bisection down to 1e-4·gap, then
/// Newton rejected outside the bracket (the secular function has poles at
/// both interval ends, so an unguarded Newton step can escape).
fn solve_interval(eval: &SecularEval, anchor: usize, gap: f64) -> Result<(usize, f64)> {
    // F → −∞ at u→0⁺ and +∞ at u→gap⁻. Establish a sign-changing bracket.
    let mut lo = 1e-3 * gap;
    let mut f_lo = eval.value_local(anchor, lo);
    let mut guard = 0;
    while f_lo > 0.0 {
        lo *= 1e-4;
        if lo < 1e-300 {
            return Err(Error::BracketFailure {
                lo: eval.poles[anchor],
                hi: eval.poles[anchor] + gap,
            });
        }
        f_lo = eval.value_local(anchor, lo);
        guard += 1;
        if guard > 100 {
            return Err(Error::BracketFailure {
                lo: eval.poles[anchor],
                hi: eval.poles[anchor] + gap,
            });
        }
    }
    let mut hi = gap - 1e-3 * gap;
    let mut f_hi = eval.value_local(anchor, hi);
    guard = 0;
    while f_hi < 0.0 {
        let d = (gap - hi) * 1e-4;
        hi = gap - d;
        if d < 1e-300 * gap {
            return Err(Error::BracketFailure {
                lo: eval.poles[anchor],
                hi: eval.poles[anchor] + gap,
            });
        }
        f_hi = eval.value_local(anchor, hi);
        guard += 1;
        if guard > 100 {
            return Err(Error::BracketFailure {
                lo: eval.poles[anchor],
                hi: eval.poles[anchor] + gap,
            });
        }
    }
    // Coarse localization, then refine in the frame of the nearest pole:
    // a root hugging the right pole must be refined with the right pole as
    // origin or the local offset loses all its significant digits.
    let (lo, hi) = coarse_bisect(eval, anchor, lo, hi, 1e-4 * gap);
    if lo >= 0.5 * gap {
        let u = refine_bracketed(eval, anchor + 1, lo - gap, hi - gap, gap)?;
        Ok((anchor + 1, u))
    } else {
        let u = refine_bracketed(eval, anchor, lo, hi, gap)?;
        Ok((anchor, u))
    }
}

fn coarse_bisect(eval: &SecularEval, anchor: usize, mut lo: f64, mut hi: f64, width: f64) -> (f64, f64) {
    let split = |lo: f64, hi: f64| -> f64 {
        if lo > 0.0 && hi / lo > 1e3 {
            (lo * hi).sqrt()
        } else if hi < 0.0 && lo / hi > 1e3 {
            -(lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        }
    };
    while hi - lo > width {
        let mid = split(lo, hi);
        if eval.value_local(anchor, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

fn refine_bracketed(
    eval: &SecularEval,
    anchor: usize,
    lo: f64,
    hi: f64,
    scale: f64,
) -> Result<f64> {
    // Geometric splitting reaches pole-hugging roots (u* can be many orders
    // below the interval size) in O(log log) steps where an arithmetic
    // midpoint would stall.
    let split = |lo: f64, hi: f64| -> f64 {
        if lo > 0.0 && hi / lo > 1e3 {
            (lo * hi).sqrt()
        } else if hi < 0.0 && lo / hi > 1e3 {
            -(lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        }
    };
    // Smallest residual honestly reachable in f64: F'·ulp(u) plus the
    // evaluation noise of F itself.
    let res_floor = |u: f64| -> f64 {
        let fp = eval.derivative_local(anchor, u);
        8.0 * f64::EPSILON * (fp * u.abs() + (eval.poles[anchor] + u).abs() + 1.0)
    };

    // Bisection stage down to 1e-4 of the interval.
    let (mut lo, mut hi) = coarse_bisect(eval, anchor, lo, hi, 1e-4 * scale);
    // Safeguarded Newton stage.
    let mut u = split(lo, hi);
    let mut best = (u, f64::INFINITY);
    for _ in 0..400 {
        let f = eval.value_local(anchor, u);
        if f.abs() < best.1 {
            best = (u, f.abs());
        }
        if f.abs() <= 1e-13_f64.max(res_floor(u)) {
            return Ok(u);
        }
        if f < 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let fp = eval.derivative_local(anchor, u);
        let mut next = u - f / fp;
        if !(next > lo && next < hi) {
            next = split(lo, hi);
        }
        let width_collapsed = (hi - lo) <= f64::EPSILON * (lo.abs() + hi.abs()).max(1e-306);
        if next == u || width_collapsed {
            break;
        }
        u = next;
    }
    let (u, res) = best;
    if res <= 1e-12_f64.max(2.0 * res_floor(u)) {
        Ok(u)
    } else {
        Err(Error::NonConvergence {
            iterations: 400,
            residual: res,
        })
    }
}

/// Root above the highest pole: bracket by doubling the offset.
fn solve_outer_high(eval: &SecularEval) -> Result<f64> {
    let anchor = eval.poles.len() - 1;
    let mut lo = 1e-6;
    let mut f_lo = eval.value_local(anchor, lo);
    let mut guard = 0;
    while f_lo > 0.0 {
        lo *= 1e-3;
        f_lo = eval.value_local(anchor, lo);
        guard += 1;
        if guard > 110 {
            return Err(Error::BracketFailure {
                lo: eval.poles[anchor],
                hi: f64::INFINITY,
            });
        }
    }
    let mut hi = 1.0;
    let mut f_hi = eval.value_local(anchor, hi);
    guard = 0;
    while f_hi < 0.0 {
        hi *= 2.0;
        f_hi = eval.value_local(anchor, hi);
        guard += 1;
        if guard > 60 {
            return Err(Error::BracketFailure {
                lo: eval.poles[anchor],
                hi: f64::INFINITY,
            });
        }
    }
    refine_bracketed(eval, anchor, lo, hi, hi.max(1.0))
}

/// Root below the lowest pole; local offset is negative.
fn solve_outer_low(eval: &SecularEval) -> Result<f64> {
    let mut hi = -1e-6;
    let mut f_hi = eval.value_local(0, hi);
    let mut guard = 0;
    while f_hi < 0.0 {
        hi *= 1e-3;
        f_hi = eval.value_local(0, hi);
        guard += 1;
        if guard > 110 {
            return Err(Error::BracketFailure {
                lo: f64::NEG_INFINITY,
                hi: eval.poles[0],
            });
        }
    }
    let mut lo = -1.0;
    let mut f_lo = eval.value_local(0, lo);
    guard = 0;
    while f_lo > 0.0 {
        lo *= 2.0;
        f_lo = eval.value_local(0, lo);
        guard += 1;
        if guard > 60 {
            return Err(Error::BracketFailure {
                lo: f64::NEG_INFINITY,
                hi: eval.poles[0],
            });
        }
    }
    refine_bracketed(eval, 0, lo, hi, lo.abs().max(1.0))
}

/// Moments of the mixed reservoir states around level `n` (Eq.-(9)-style
/// sums M_ν = Σ_{k≠0} C²_{n+k}/Δ_{n+k}^{ν+1} over the truncation window).
#[derive(Clone, Debug, Serialize)]
pub struct MomentsTable {
    pub base_index: i64,
    /// values[ν] for ν = 0..=ν_max.
    pub values: Vec<f64>,
    /// (offset k, gap Δ_{n+k}) pairs actually summed.
    pub gaps: Vec<(i64, f64)>,
}

pub fn moments(spec: &ReservoirSpec, n: i64, nu_max: usize) -> Result<MomentsTable> {
    spec.validate()?;
    let base = spec.level(n)?;
    let max = spec.n_levels as i64;
    let mut values = vec![0.0; nu_max + 1];
    let mut gaps = Vec::new();
    for m in -max..=max {
        if m == n {
            continue;
        }
        let l = spec.level(m)?;
        let gap = l.energy - base.energy;
        if gap.abs() < 1e-8 {
            return Err(Error::SmallDenominator {
                offset: m - n,
                gap,
            });
        }
        gaps.push((m - n, gap));
        let c2 = l.coupling * l.coupling;
        let mut denom = gap;
        for v in values.iter_mut() {
            *v += c2 / denom;
            denom *= gap;
        }
    }
    Ok(MomentsTable {
        base_index: n,
        values,
        gaps,
    })
}

/// Absorption band ρ(ε): Lorentzian envelope of half-width Γ times the comb
/// of width-γ components.
#[derive(Clone, Debug, Serialize)]
pub struct AbsorptionBand {
    pub energies: Vec<f64>,
    pub density: Vec<f64>,
    /// Envelope half-width Γ = πC².
    pub envelope_half_width: f64,
    /// Whether every component width is below half the smallest gap
    /// (well-resolved fine structure).
    pub resolved: bool,
}

pub fn absorption_band(spec: &ReservoirSpec, energies: &[f64]) -> Result<AbsorptionBand> {
    spec.validate()?;
    let levels = spec.levels();
    if levels.iter().all(|l| l.width == 0.0) {
        return Err(Error::InvalidSpec(
            "absorption band needs at least one non-zero level width".into(),
        ));
    }
    let gamma_big = spec.gamma_big();
    let min_gap = levels
        .windows(2)
        .map(|w| (w[1].energy - w[0].energy).abs())
        .fold(f64::INFINITY, f64::min);
    let max_width = levels.iter().map(|l| l.width).fold(0.0, f64::max);
    let density: Vec<f64> = energies
        .iter()
        .map(|&e| {
            let envelope = gamma_big / (e * e + gamma_big * gamma_big);
            let comb: f64 = levels
                .iter()
                .map(|l| {
                    let d = e - l.energy;
                    l.width / (d * d + l.width * l.width)
                })
                .sum();
            envelope * comb / (PI * PI)
        })
        .collect();
    Ok(AbsorptionBand {
        energies: energies.to_vec(),
        density,
        envelope_half_width: gamma_big,
        resolved: max_width < 0.5 * min_gap,
    })
}

/// Critical mixing deformation δ_c for K rationally-independent sub-lattices
/// (δ_k = k·δ): the smallest δ at which the deformed level order first
/// permutes inside the interaction window.
///
/// The window is |ε⁰| ≤ 2.5Γ — the absorption-band region whose mixed-state
/// weight still exceeds ~1/8 of the peak. With this window the scan
/// reproduces both the ~1/(3Γ) estimate and the measured product law
/// δ_c·Γ ≈ 0.2–0.35 over Γ ∈ [2, 10].
pub fn critical_mixing_deformation(gamma_big: f64, sublattices: usize) -> Result<f64> {
    if gamma_big <= 0.0 {
        return Err(Error::InvalidSpec("Γ must be positive".into()));
    }
    if sublattices < 2 {
        return Err(Error::InvalidSpec("need at least 2 sub-lattices".into()));
    }
    let window = 2.5 * gamma_big;
    let k = sublattices as i64;
    // All levels intersecting the window (plus direct neighbours as crossing
    // partners).
    let reach = (window.ceil() as i64) + k + 1;
    let indices: Vec<i64> = (-reach..=reach).collect();
    let deformed = |delta: f64| -> Vec<f64> {
        indices
            .iter()
            .map(|&n| {
                let res = n.rem_euclid(k);
                n as f64 * (1.0 + res as f64 * delta)
            })
            .collect()
    };
    let permuted = |delta: f64| -> bool {
        let e = deformed(delta);
        for w in 0..indices.len() - 1 {
            if e[w + 1] <= e[w] && (indices[w].abs() as f64 <= window || (indices[w + 1].abs() as f64) <= window)
            {
                return true;
            }
        }
        false
    };
    // Coarse forward scan, then bisection refinement.
    let step = 1e-4;
    let mut delta = step;
    while delta < 0.5 {
        if permuted(delta) {
            let mut lo = delta - step;
            let mut hi = delta;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if permuted(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(hi);
        }
        delta += step;
    }
    Err(Error::InvalidSpec(format!(
        "no level-order permutation found up to δ = 0.5 for Γ = {gamma_big}"
    )))
}

/// Convenience: dense-diagonalization eigenvalues of the spec's arrow matrix
/// (test oracle and fallback path).
pub fn dense_eigenvalues(spec: &ReservoirSpec) -> Result<Vec<f64>> {
    let h = spec.build_hamiltonian()?;
    let sym: SymMatrix = h.to_symmetric()?;
    crate::linalg::eigen_values(&sym)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Level;

    fn toy_three_level(c: f64) -> ReservoirSpec {
        let levels = vec![
            Level {
                energy: -1.0,
                coupling: c,
                width: 0.0,
            },
            Level {
                energy: 0.0,
                coupling: c,
                width: 0.0,
            },
            Level {
                energy: 1.0,
                coupling: c,
                width: 0.0,
            },
        ];
        ReservoirSpec::explicit(levels, 0.0)
    }

    #[test]
    fn cot_resummation_at_half_integer() {
        let spec = ReservoirSpec::bare_truncated(1.0, 200);
        // cot(π/2) = 0, so F(0.5) = 0.5 for the infinite bare model.
        let f = secular_value(&spec, 0.5).unwrap();
        assert!((f - 0.5).abs() < 1e-14);
    }

    #[test]
    fn pole_side_sign() {
        let spec = ReservoirSpec::bare_truncated(1.0, 200);
        let f = secular_value(&spec, 3.0 + 1e-6).unwrap();
        assert!(f < -1e5);
        assert!(secular_value(&spec, 3.0 + 1e-12).is_err());
    }

    #[test]
    fn toy_secular_value_frozen() {
        // F(0.5) = 0.5 − 0.09·(1/1.5 + 1/0.5 − 1/0.5) = 0.5 − 0.06 = 0.44
        let spec = toy_three_level(0.3);
        let f = secular_value(&spec, 0.5).unwrap();
        assert!((f - 0.44).abs() < 1e-15);
    }

    #[test]
    fn digamma_resummation_matches_direct_sum() {
        let spec = ReservoirSpec::bare_truncated(0.9, 120);
        let eval = SecularEval::new(&spec, 0.0);
        for &(anchor, u) in &[(120usize, 0.37), (120 + 57, 0.11), (120 + 119, 0.93)] {
            let fast = eval.value_local(anchor, u);
            let eps = eval.poles[anchor] + u;
            let direct = secular_value_truncated(&spec, eps).unwrap();
            assert!(
                (fast - direct).abs() < 1e-9 * (1.0 + direct.abs()),
                "anchor {anchor} u {u}: {fast} vs {direct}"
            );
        }
        // Beyond the comb as well.
        let fast = eval.value_local(240, 0.7);
        let direct = secular_value_truncated(&spec, 120.7).unwrap();
        assert!((fast - direct).abs() < 1e-9 * (1.0 + direct.abs()));
    }

    #[test]
    fn toy_roots_match_dense_diagonalization() {
        let spec = toy_three_level(0.3);
        let sol = solve_spectrum(&spec).unwrap();
        let dense = dense_eigenvalues(&spec).unwrap();
        assert_eq!(sol.len(), 4);
        for (a, b) in sol.roots.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        assert!(sol.worst_residual() < 1e-12);
        assert!((sol.completeness() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bare_roots_interlace_and_weights_complete() {
        let spec = ReservoirSpec::bare_truncated(1.0, 60);
        let sol = solve_spectrum(&spec).unwrap();
        assert_eq!(sol.len(), 2 * 60 + 2);
        for (i, w) in sol.roots.windows(2).enumerate() {
            assert!(w[1] > w[0], "roots out of order at {i}");
        }
        // One root strictly inside each unperturbed interval.
        for i in 1..sol.len() - 1 {
            let root = sol.poles[sol.local[i].0] + sol.local[i].1;
            assert!(root > sol.poles[i - 1] && root < sol.poles[i]);
        }
        assert!((sol.completeness() - 1.0).abs() < 1e-8);
        assert!(sol.worst_residual() < 1e-12);
    }

    #[test]
    fn decoupling_limit() {
        let c = 1e-3;
        let spec = ReservoirSpec::bare_truncated(c, 60);
        let sol = solve_spectrum(&spec).unwrap();
        // The initial state is degenerate with level n = 0, so the C → 0
        // limit leaves a ± pair at ε ≈ ±C carrying weight 1/2 each; all the
        // resonance weight lives there.
        let mut order: Vec<usize> = (0..sol.len()).collect();
        order.sort_by(|&a, &b| sol.roots[a].abs().total_cmp(&sol.roots[b].abs()));
        let (lo, hi) = (order[0], order[1]);
        assert!((sol.roots[lo].abs() - c).abs() < 1e-5);
        assert!((sol.roots[hi].abs() - c).abs() < 1e-5);
        assert!(sol.weights[lo] + sol.weights[hi] > 0.999);
        // Non-resonant roots sit within O(C²) of the unperturbed levels.
        for (r, p) in sol.roots.iter().skip(1).zip(&sol.poles) {
            if (r - p).abs() < 0.5 {
                assert!((r - p).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn mixing_past_threshold_falls_back_to_dense() {
        let spec = ReservoirSpec {
            variant: ReservoirVariant::MixingSublattices {
                period: 3,
                deltas: vec![0.2, 0.4],
            },
            n_levels: 12,
            coupling: 0.1,
            level_width: 0.0,
            initial_width: 0.0,
        };
        let sol = solve_spectrum(&spec).unwrap();
        assert_eq!(sol.method, SpectrumMethod::Dense);
        assert_eq!(sol.len(), 2 * 12 + 2);
        assert!((sol.completeness() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn moments_bare_symmetry_and_limit() {
        let spec = ReservoirSpec::bare_truncated(1.0, 400);
        let t = moments(&spec, 0, 1).unwrap();
        // M_0 = C² Σ_{k≠0} 1/k = 0 by symmetry.
        assert!(t.values[0].abs() < 1e-12);
        // M_1 = C² Σ 1/k² → C² π²/3; Richardson-extrapolate the truncated
        // tail (Σ_{|k|≤N} = π²/3 − 2/N + O(1/N²)).
        let n = spec.n_levels as f64;
        let extrapolated = t.values[1] + 2.0 / n;
        assert!((extrapolated - PI * PI / 3.0).abs() < 1e-4);
    }

    #[test]
    fn moments_detect_small_gap() {
        let levels = vec![
            Level {
                energy: -1.0,
                coupling: 0.2,
                width: 0.0,
            },
            Level {
                energy: 0.0,
                coupling: 0.2,
                width: 0.0,
            },
            Level {
                energy: 5e-9,
                coupling: 0.2,
                width: 0.0,
            },
        ];
        let spec = ReservoirSpec::explicit(levels, 0.0);
        let r = moments(&spec, 0, 2);
        assert!(matches!(r, Err(Error::SmallDenominator { .. })));
    }

    #[test]
    fn mixing_moment_spike_near_resonance() {
        let far = ReservoirSpec {
            variant: ReservoirVariant::MixingSublattices {
                period: 3,
                deltas: vec![0.01, 0.02],
            },
            n_levels: 30,
            coupling: 0.1,
            level_width: 0.0,
            initial_width: 0.0,
        };
        let near = ReservoirSpec {
            variant: ReservoirVariant::MixingSublattices {
                period: 3,
                deltas: vec![0.12, 0.4999],
            },
            n_levels: 30,
            coupling: 0.1,
            level_width: 0.0,
            initial_width: 0.0,
        };
        // δ₂ = 0.4999 puts level 2(1+δ₂) ≈ 2.9998 nearly on top of level 3.
        let m_far = moments(&far, 3, 1).unwrap().values[1].abs();
        let m_near = moments(&near, 3, 1).unwrap().values[1].abs();
        assert!(m_near > 100.0 * m_far, "near {m_near} vs far {m_far}");
    }

    #[test]
    fn absorption_band_shape() {
        let spec = ReservoirSpec::bare_truncated(1.0, 60).with_widths(0.05, 0.0);
        let gamma_big = spec.gamma_big();
        let grid: Vec<f64> = (-200..=200).map(|i| i as f64 * 0.05).collect();
        let band = absorption_band(&spec, &grid).unwrap();
        assert!((band.envelope_half_width - gamma_big).abs() < 1e-12);
        assert!(band.resolved);
        // Peak at a comb tooth near ε = 0 matches the direct formula.
        let idx = grid.iter().position(|&e| e == 0.0).unwrap();
        let expected = gamma_big / (gamma_big * gamma_big) / (PI * PI)
            * spec
                .levels()
                .iter()
                .map(|l| l.width / (l.energy * l.energy + l.width * l.width))
                .sum::<f64>();
        assert!((band.density[idx] - expected).abs() < 1e-12 * expected.abs());
        // Γ scaling: halving C quarters the envelope half-width.
        let spec_half = ReservoirSpec::bare_truncated(0.5, 60).with_widths(0.05, 0.0);
        let band_half = absorption_band(&spec_half, &grid).unwrap();
        assert!((band_half.envelope_half_width - gamma_big / 4.0).abs() < 1e-12);
        // Merged-components flag when γ exceeds the spacing.
        let blurred = ReservoirSpec::bare_truncated(1.0, 60).with_widths(0.6, 0.0);
        assert!(!absorption_band(&blurred, &grid).unwrap().resolved);
    }

    #[test]
    fn critical_mixing_deformation_scan() {
        // Γ = 3 → δ_c ≈ 1/(3Γ) ≈ 0.11 (the first crossing inside the window
        // is the pair (5(1+2δ), 6): δ* = 0.1).
        let d = critical_mixing_deformation(3.0, 3).unwrap();
        let estimate = 1.0 / (3.0 * 3.0);
        assert!((d - estimate).abs() / estimate < 0.15, "δ_c = {d}");
        // Product law over a range of Γ.
        for gamma in [2.0, 4.0, 6.0, 8.0, 10.0] {
            let d = critical_mixing_deformation(gamma, 3).unwrap();
            let product = d * gamma;
            assert!(
                (0.2 - 1e-6..=0.35 + 1e-6).contains(&product),
                "Γ = {gamma}: δ_c·Γ = {product}"
            );
        }
        // δ = 0 never permutes: scan must return strictly positive δ_c.
        assert!(critical_mixing_deformation(5.0, 3).unwrap() > 0.0);
    }
}
