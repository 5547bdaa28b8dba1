//! Reservoir specifications and the single-excitation sector Hamiltonian.
//!
//! Energies are in units of the bare mean inter-level spacing (ħ = 1). The
//! initial state sits at energy zero, in resonance with reservoir level
//! n = 0. The Hamiltonian in this sector is a bordered ("arrow") matrix: the
//! initial-state row/column carries the couplings, everything else is
//! diagonal; level widths enter as negative imaginary diagonal shifts.

use crate::linalg::SymMatrix;
use crate::{interaction_width, Error, Result, C64};
use serde::{Deserialize, Serialize};

/// One reservoir level: unperturbed energy, coupling to the initial state,
/// and half-width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub coupling: f64,
    pub width: f64,
}

/// Spectrum family of the reservoir.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ReservoirVariant {
    /// Equidistant spectrum, constant couplings and widths.
    Bare,
    /// ε_n = sign(n)·|n|(1 + a²n²)^{±1/2}, C_n² = C²(1 + b²n²)^{±1};
    /// `stretch = true` selects the + sign (growing spacings).
    HomogeneousDeformation { a: f64, b: f64, stretch: bool },
    /// K displaced sub-lattices with common period: ε_{mK+k} = (mK+k) + x_k,
    /// offsets 0 < x_1 < … < x_{K−1} < 1/2, sub-lattice k = 0 undeformed.
    Sublattices { period: usize, offsets: Vec<f64> },
    /// K sub-lattices with rationally independent periods:
    /// ε_{mK+k} = (mK+k)(1 + δ_k), δ_1 < … < δ_{K−1} < 1/2, δ_0 = 0.
    MixingSublattices { period: usize, deltas: Vec<f64> },
    /// Arbitrary level list, ordered by index n = −N..N.
    Explicit { levels: Vec<Level> },
}

/// Declarative description of the reservoir and its truncation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReservoirSpec {
    pub variant: ReservoirVariant,
    /// Truncation N: levels are indexed n = −N..N (2N+1 of them).
    pub n_levels: usize,
    /// Coupling strength C (ignored for Explicit, which carries its own).
    pub coupling: f64,
    /// Reservoir level half-width γ (ignored for Explicit).
    pub level_width: f64,
    /// Initial-state half-width γ_s.
    pub initial_width: f64,
}

impl ReservoirSpec {
    /// Bare spectrum with truncation chosen automatically
    /// (N = max(⌈10Γ⌉, 50), which keeps the Lorentzian tails below ~10⁻³
    /// relative weight).
    pub fn bare(coupling: f64) -> Self {
        ReservoirSpec {
            n_levels: default_truncation(coupling),
            variant: ReservoirVariant::Bare,
            coupling,
            level_width: 0.0,
            initial_width: 0.0,
        }
    }

    pub fn bare_truncated(coupling: f64, n_levels: usize) -> Self {
        ReservoirSpec {
            variant: ReservoirVariant::Bare,
            n_levels,
            coupling,
            level_width: 0.0,
            initial_width: 0.0,
        }
    }

    pub fn with_widths(mut self, level_width: f64, initial_width: f64) -> Self {
        self.level_width = level_width;
        self.initial_width = initial_width;
        self
    }

    pub fn explicit(levels: Vec<Level>, initial_width: f64) -> Self {
        let n = (levels.len().max(1) - 1) / 2;
        ReservoirSpec {
            variant: ReservoirVariant::Explicit { levels },
            n_levels: n,
            coupling: 0.0,
            level_width: 0.0,
            initial_width,
        }
    }

    /// Interaction-region width Γ = πC² (for Explicit, uses the mean C_n²).
    pub fn gamma_big(&self) -> f64 {
        match &self.variant {
            ReservoirVariant::Explicit { levels } if !levels.is_empty() => {
                let mean_c2 = levels.iter().map(|l| l.coupling * l.coupling).sum::<f64>()
                    / levels.len() as f64;
                std::f64::consts::PI * mean_c2
            }
            _ => interaction_width(self.coupling),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.coupling < 0.0 || self.level_width < 0.0 || self.initial_width < 0.0 {
            return Err(Error::InvalidSpec(
                "coupling and widths must be non-negative".into(),
            ));
        }
        if self.n_levels == 0 {
            return Err(Error::InvalidSpec("n_levels must be at least 1".into()));
        }
        match &self.variant {
            ReservoirVariant::Bare => {
                let needed = truncation_floor(self.coupling);
                if self.n_levels < needed {
                    return Err(Error::InvalidSpec(format!(
                        "n_levels = {} too small for Γ = {:.3}; need at least {} (10Γ)",
                        self.n_levels,
                        self.gamma_big(),
                        needed
                    )));
                }
            }
            ReservoirVariant::HomogeneousDeformation { a, b, .. } => {
                if !(0.0..1.0).contains(a) || !(0.0..1.0).contains(b) {
                    return Err(Error::InvalidSpec(
                        "deformation constants a, b must lie in [0, 1)".into(),
                    ));
                }
            }
            ReservoirVariant::Sublattices { period, offsets } => {
                validate_sublattice_params(*period, offsets, "offsets")?;
            }
            ReservoirVariant::MixingSublattices { period, deltas } => {
                validate_sublattice_params(*period, deltas, "deltas")?;
            }
            ReservoirVariant::Explicit { levels } => {
                if levels.is_empty() || levels.len() % 2 == 0 {
                    return Err(Error::InvalidSpec(
                        "explicit level list must have odd length 2N+1".into(),
                    ));
                }
                if levels.iter().any(|l| l.width < 0.0) {
                    return Err(Error::InvalidSpec("explicit widths must be ≥ 0".into()));
                }
            }
        }
        Ok(())
    }

    /// Unperturbed level, coupling and width for index n (|n| ≤ N).
    pub fn level(&self, n: i64) -> Result<Level> {
        let max = self.n_levels as i64;
        if n.abs() > max {
            return Err(Error::IndexOutOfRange { index: n, max });
        }
        Ok(match &self.variant {
            ReservoirVariant::Bare => Level {
                energy: n as f64,
                coupling: self.coupling,
                width: self.level_width,
            },
            ReservoirVariant::HomogeneousDeformation { a, b, stretch } => {
                let nf = n as f64;
                let ef = 1.0 + a * a * nf * nf;
                let cf = 1.0 + b * b * nf * nf;
                let (ef, cf) = if *stretch {
                    (ef.sqrt(), cf.sqrt())
                } else {
                    (1.0 / ef.sqrt(), 1.0 / cf.sqrt())
                };
                // ε_n² = n²(1+a²n²)^{±1} leaves the sign of ε_n free; take
                // sign(n)·√ to preserve the level ordering.
                Level {
                    energy: nf * ef,
                    coupling: self.coupling * cf,
                    width: self.level_width,
                }
            }
            ReservoirVariant::Sublattices { period, offsets } => {
                let k = n.rem_euclid(*period as i64) as usize;
                let offset = if k == 0 { 0.0 } else { offsets[k - 1] };
                Level {
                    energy: n as f64 + offset,
                    coupling: self.coupling,
                    width: self.level_width,
                }
            }
            ReservoirVariant::MixingSublattices { period, deltas } => {
                let k = n.rem_euclid(*period as i64) as usize;
                let delta = if k == 0 { 0.0 } else { deltas[k - 1] };
                Level {
                    energy: n as f64 * (1.0 + delta),
                    coupling: self.coupling,
                    width: self.level_width,
                }
            }
            ReservoirVariant::Explicit { levels } => levels[(n + max) as usize],
        })
    }

    /// All levels in index order n = −N..N.
    pub fn levels(&self) -> Vec<Level> {
        let max = self.n_levels as i64;
        (-max..=max).map(|n| self.level(n).unwrap()).collect()
    }

    /// First adjacent pair (by index) whose energies are out of order, if
    /// any. Level-order permutations are reported, never silently reordered.
    pub fn first_permutation(&self) -> Option<(i64, i64)> {
        let max = self.n_levels as i64;
        let mut prev = self.level(-max).unwrap().energy;
        for n in (-max + 1)..=max {
            let e = self.level(n).unwrap().energy;
            if e <= prev {
                return Some((n - 1, n));
            }
            prev = e;
        }
        None
    }

    pub fn is_ordered(&self) -> bool {
        self.first_permutation().is_none()
    }

    /// Bordered single-excitation Hamiltonian for this spec.
    pub fn build_hamiltonian(&self) -> Result<HamiltonianMatrix> {
        self.validate()?;
        let levels = self.levels();
        let mut diag = Vec::with_capacity(levels.len() + 1);
        diag.push(C64::new(0.0, -self.initial_width));
        let mut border = Vec::with_capacity(levels.len());
        for l in &levels {
            diag.push(C64::new(l.energy, -l.width));
            border.push(l.coupling);
        }
        Ok(HamiltonianMatrix { diag, border })
    }
}

fn validate_sublattice_params(period: usize, params: &[f64], what: &str) -> Result<()> {
    if period < 2 {
        return Err(Error::InvalidSpec("sub-lattice period K must be ≥ 2".into()));
    }
    if params.len() != period - 1 {
        return Err(Error::InvalidSpec(format!(
            "expected {} {what} for K = {period}",
            period - 1
        )));
    }
    let ascending = params.windows(2).all(|w| w[0] < w[1]);
    let in_range = params.iter().all(|x| *x > 0.0 && *x < 0.5);
    if !ascending || !in_range {
        return Err(Error::InvalidSpec(format!(
            "{what} must satisfy 0 < x_1 < … < x_(K−1) < 1/2"
        )));
    }
    Ok(())
}

/// Default truncation N = max(⌈10Γ⌉, 50).
pub fn default_truncation(coupling: f64) -> usize {
    truncation_floor(coupling).max(50)
}

fn truncation_floor(coupling: f64) -> usize {
    (10.0 * interaction_width(coupling)).ceil() as usize
}

/// Bordered (arrow) matrix in the single-excitation sector. Index 0 is the
/// initial state; index i ≥ 1 is reservoir level n = i − 1 − N. Only the
/// initial-state row/column has off-diagonal entries.
#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    /// ε − iγ along the diagonal (initial state first).
    pub diag: Vec<C64>,
    /// Couplings C_n, aligned with `diag[1..]`.
    pub border: Vec<f64>,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Reservoir index n for matrix position i ≥ 1.
    pub fn level_index(&self, i: usize) -> i64 {
        let n_side = (self.border.len() as i64 - 1) / 2;
        i as i64 - 1 - n_side
    }

    /// True when every width vanishes, i.e. the matrix is real symmetric.
    pub fn is_hermitian(&self) -> bool {
        self.diag.iter().all(|d| d.im == 0.0)
    }

    /// All imaginary diagonal shifts share one value (uniform decay), which
    /// factors out of the evolution exactly.
    pub fn uniform_width(&self) -> Option<f64> {
        let w = -self.diag[0].im;
        if self
            .diag
            .iter()
            .all(|d| (d.im + w).abs() <= 1e-15 * (1.0 + w.abs()))
        {
            Some(w)
        } else {
            None
        }
    }

    /// Dense real-symmetric form; requires all widths zero.
    pub fn to_symmetric(&self) -> Result<SymMatrix> {
        if !self.is_hermitian() {
            return Err(Error::InvalidSpec(
                "matrix has non-zero widths; not real symmetric".into(),
            ));
        }
        let n = self.dim();
        let mut a = SymMatrix::zeros(n);
        for (i, d) in self.diag.iter().enumerate() {
            a.set(i, i, d.re);
        }
        for (k, c) in self.border.iter().enumerate() {
            a.set(0, k + 1, *c);
        }
        Ok(a)
    }

    /// y = H x.
    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        let mut acc = C64::new(0.0, 0.0);
        for ((c, xi), yi) in self.border.iter().zip(&x[1..]).zip(y[1..].iter_mut()) {
            *yi = *c * x[0];
            acc += *c * *xi;
        }
        y[0] = acc;
        for (yi, (d, xi)) in y.iter_mut().zip(self.diag.iter().zip(x.iter())) {
            *yi += *d * *xi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_levels_are_literal() {
        let spec = ReservoirSpec::bare_truncated(1.0, 40);
        let l = spec.level(3).unwrap();
        assert_eq!((l.energy, l.coupling, l.width), (3.0, 1.0, 0.0));
        assert!(spec.level(41).is_err());
    }

    #[test]
    fn homogeneous_deformation_matches_formula() {
        let spec = ReservoirSpec {
            variant: ReservoirVariant::HomogeneousDeformation {
                a: 0.15,
                b: 0.0,
                stretch: true,
            },
            n_levels: 10,
            coupling: 1.0,
            level_width: 0.0,
            initial_width: 0.0,
        };
        let l = spec.level(2).unwrap();
        let expected = (4.0_f64 * (1.0 + 0.0225 * 4.0)).sqrt();
        assert!((l.energy - expected).abs() < 1e-15);
        let lm = spec.level(-2).unwrap();
        assert!((lm.energy + expected).abs() < 1e-15);
        assert!(spec.is_ordered());
    }

    #[test]
    fn mixing_sublattice_levels() {
        let spec = ReservoirSpec {
            variant: ReservoirVariant::MixingSublattices {
                period: 3,
                deltas: vec![0.1, 0.2],
            },
            n_levels: 9,
            coupling: 0.2,
            level_width: 0.0,
            initial_width: 0.0,
        };
        // n = mK + 1 inside sub-lattice k = 1: ε = (3m+1)(1.1)
        let l = spec.level(4).unwrap();
        assert!((l.energy - 4.0 * 1.1).abs() < 1e-15);
        let l = spec.level(-2).unwrap(); // m = -1, k = 1
        assert!((l.energy + 2.0 * 1.1).abs() < 1e-15);
    }

    #[test]
    fn decoupled_hamiltonian_is_diagonal() {
        let spec = ReservoirSpec::bare_truncated(0.0, 1);
        let h = spec.build_hamiltonian().unwrap();
        assert_eq!(h.dim(), 4);
        let diag: Vec<f64> = h.diag.iter().map(|d| d.re).collect();
        assert_eq!(diag, vec![0.0, -1.0, 0.0, 1.0]);
        assert!(h.border.iter().all(|c| *c == 0.0));
    }

    #[test]
    fn arrow_structure_and_hermiticity() {
        let spec = ReservoirSpec::bare_truncated(1.0, 50);
        let h = spec.build_hamiltonian().unwrap();
        assert!(h.is_hermitian());
        let a = h.to_symmetric().unwrap();
        assert_eq!(a.asymmetry(), 0.0);
        assert_eq!(a.get(0, 2), 1.0);
        assert_eq!(a.get(2, 0), 1.0);
        assert_eq!(a.get(1, 2), 0.0);
        // Diagonal and border reproduce level() values exactly.
        for i in 1..h.dim() {
            let n = h.level_index(i);
            let l = spec.level(n).unwrap();
            assert_eq!(h.diag[i].re, l.energy);
            assert_eq!(h.border[i - 1], l.coupling);
        }
    }

    #[test]
    fn truncation_floor_enforced() {
        // Γ = π for C = 1 → need N ≥ 32.
        let spec = ReservoirSpec::bare_truncated(1.0, 10);
        assert!(spec.validate().is_err());
        assert_eq!(default_truncation(1.0), 50);
        assert_eq!(default_truncation(3.0), 283);
    }

    #[test]
    fn mixing_params_validated() {
        let bad = ReservoirSpec {
            variant: ReservoirVariant::MixingSublattices {
                period: 3,
                deltas: vec![0.2, 0.1],
            },
            n_levels: 10,
            coupling: 0.1,
            level_width: 0.0,
            initial_width: 0.0,
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn permutation_reported_not_reordered() {
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
        assert!(spec.validate().is_ok());
        assert!(!spec.is_ordered());
        let (lo, hi) = spec.first_permutation().unwrap();
        assert_eq!(hi - lo, 1);
    }
}
