//! Dense real-symmetric eigensolver: Householder tridiagonalization followed
//! by implicit-shift QL iteration. Written for desk-scale matrices (the
//! largest routine case is a few thousand levels); no external LAPACK.
//!
//! Three output modes keep the big cases affordable:
//! * eigenvalues only,
//! * eigenvalues plus a single row of the eigenvector matrix (enough to
//!   propagate one observable; O(n²) beyond the reduction),
//! * the full eigenvector matrix.

use crate::Error;

/// Row-major square symmetric matrix. Only the lower triangle is read.
#[derive(Clone, Debug)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        self.data[r * self.n + c]
    }

    /// Sets both (i, j) and (j, i).
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    /// Maximum asymmetry |a_ij - a_ji| over the full storage.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.data[i * self.n + j] - self.data[j * self.n + i]).abs());
            }
        }
        worst
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// Eigendecomposition result. `values` ascending. `vectors`, when present, is
/// row-major with `vectors[i * n + j]` = component `i` of eigenvector `j`;
/// `observer_row`, when present, holds row `s` of the eigenvector matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<f64>>,
    pub observer_row: Option<Vec<f64>>,
}

enum VectorMode {
    None,
    Row(usize),
    Full,
}

/// Eigenvalues only.
pub fn eigen_values(a: &SymMatrix) -> Result<Vec<f64>, Error> {
    Ok(decompose(a.clone(), VectorMode::None)?.values)
}

/// Eigenvalues plus row `s` of the eigenvector matrix.
pub fn eigen_observer(a: &SymMatrix, s: usize) -> Result<SymmetricEigen, Error> {
    decompose(a.clone(), VectorMode::Row(s))
}

/// Full eigendecomposition.
pub fn eigen_full(a: &SymMatrix) -> Result<SymmetricEigen, Error> {
    decompose(a.clone(), VectorMode::Full)
}

fn decompose(mut a: SymMatrix, mode: VectorMode) -> Result<SymmetricEigen, Error> {
    let n = a.n;
    if n == 0 {
        return Ok(SymmetricEigen {
            values: vec![],
            vectors: None,
            observer_row: None,
        });
    }
    let (mut d, mut e, taus) = tridiagonalize(&mut a);

    let mut eig = match mode {
        VectorMode::None => {
            ql_implicit(&mut d, &mut e, &mut RotationSink::None)?;
            SymmetricEigen {
                values: d,
                vectors: None,
                observer_row: None,
            }
        }
        VectorMode::Row(s) => {
            let mut row = apply_reflectors_to_unit(&a, &taus, s);
            ql_implicit(&mut d, &mut e, &mut RotationSink::Row(&mut row))?;
            SymmetricEigen {
                values: d,
                vectors: None,
                observer_row: Some(row),
            }
        }
        VectorMode::Full => {
            let mut z = accumulate_q(&a, &taus);
            ql_implicit(&mut d, &mut e, &mut RotationSink::Full(&mut z, n))?;
            SymmetricEigen {
                values: d,
                vectors: Some(z),
                observer_row: None,
            }
        }
    };
    sort_ascending(&mut eig, n);
    Ok(eig)
}

/// Householder reduction to tridiagonal form. Returns (diagonal, subdiagonal,
/// taus); the reflector vectors remain packed in the lower triangle of `a`
/// (column k holds v_k in rows k+1.., with v_k[0] normalized to 1).
fn tridiagonalize(a: &mut SymMatrix) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = a.n;
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut taus = vec![0.0; n.saturating_sub(1)];
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];

    for k in 0..n.saturating_sub(1) {
        let m = n - k - 1;
        // x = A[k+1.., k]
        let mut norm2 = 0.0;
        for i in k + 1..n {
            let x = a.data[i * n + k];
            v[i] = x;
            norm2 += x * x;
        }
        let x0 = v[k + 1];
        let norm = norm2.sqrt();
        if norm == 0.0 || m == 1 {
            e[k] = x0;
            taus[k] = 0.0;
            continue;
        }
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        e[k] = alpha;
        let v0 = x0 - alpha;
        // Normalize so v[k+1] = 1.
        for item in v.iter_mut().take(n).skip(k + 2) {
            *item /= v0;
        }
        v[k + 1] = 1.0;
        let tau = -v0 / alpha; // 2 / (v^T v) for this normalization
        taus[k] = tau;

        // p = tau * A_sub * v (lower-triangle symmetric matvec)
        for item in p.iter_mut().take(n).skip(k + 1) {
            *item = 0.0;
        }
        for i in k + 1..n {
            let row = &a.data[i * n..i * n + i];
            let vi = v[i];
            let mut acc = a.data[i * n + i] * vi;
            // row part: sum_j<i  a[i][j] v[j]; and scatter a[i][j] vi into p[j]
            let (rs, vs) = (&row[k + 1..i], &v[k + 1..i]);
            for (idx, (&aij, &vj)) in rs.iter().zip(vs.iter()).enumerate() {
                acc += aij * vj;
                p[k + 1 + idx] += aij * vi;
            }
            p[i] += acc;
        }
        for item in p.iter_mut().take(n).skip(k + 1) {
            *item *= tau;
        }
        // w = p - (tau/2)(p.v) v
        let pv: f64 = (k + 1..n).map(|i| p[i] * v[i]).sum();
        let corr = 0.5 * tau * pv;
        for i in k + 1..n {
            p[i] -= corr * v[i];
        }
        // A_sub -= v w^T + w v^T (lower triangle only)
        for i in k + 1..n {
            let vi = v[i];
            let wi = p[i];
            let row = &mut a.data[i * n + k + 1..i * n + i + 1];
            let vs = &v[k + 1..i + 1];
            let ws = &p[k + 1..i + 1];
            for ((r, &vj), &wj) in row.iter_mut().zip(vs).zip(ws) {
                *r -= vi * wj + wi * vj;
            }
        }
        // Stash v (rows k+2..) back into column k for later Q recovery.
        for i in k + 2..n {
            a.data[i * n + k] = v[i];
        }
    }
    let d: Vec<f64> = (0..n).map(|i| a.data[i * n + i]).collect();
    (d, e, taus)
}

/// u = Qᵀ e_s where Q is the product of the stored reflectors.
fn apply_reflectors_to_unit(a: &SymMatrix, taus: &[f64], s: usize) -> Vec<f64> {
    let n = a.n;
    let mut u = vec![0.0; n];
    u[s] = 1.0;
    for k in 0..taus.len() {
        let tau = taus[k];
        if tau == 0.0 {
            continue;
        }
        // v_k[0] = 1 at row k+1, rest packed in column k.
        let mut dot = u[k + 1];
        for i in k + 2..n {
            dot += a.data[i * n + k] * u[i];
        }
        let f = tau * dot;
        u[k + 1] -= f;
        for i in k + 2..n {
            u[i] -= f * a.data[i * n + k];
        }
    }
    u
}

/// Back-accumulation of Q (n x n, row-major) from stored reflectors.
fn accumulate_q(a: &SymMatrix, taus: &[f64]) -> Vec<f64> {
    let n = a.n;
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    let mut v = vec![0.0; n];
    for k in (0..taus.len()).rev() {
        let tau = taus[k];
        if tau == 0.0 {
            continue;
        }
        v[k + 1] = 1.0;
        for i in k + 2..n {
            v[i] = a.data[i * n + k];
        }
        // z[k+1.., k+1..] = (I - tau v v^T) z[k+1.., k+1..]
        for j in k + 1..n {
            let mut dot = 0.0;
            for i in k + 1..n {
                dot += v[i] * z[i * n + j];
            }
            let f = tau * dot;
            for i in k + 1..n {
                z[i * n + j] -= f * v[i];
            }
        }
    }
    z
}

enum RotationSink<'a> {
    None,
    Row(&'a mut [f64]),
    Full(&'a mut [f64], usize),
}

impl RotationSink<'_> {
    #[inline]
    fn rotate(&mut self, i: usize, s: f64, c: f64) {
        match self {
            RotationSink::None => {}
            RotationSink::Row(r) => {
                let f = r[i + 1];
                r[i + 1] = s * r[i] + c * f;
                r[i] = c * r[i] - s * f;
            }
            RotationSink::Full(z, n) => {
                let n = *n;
                for k in 0..n {
                    let zi = z[k * n + i];
                    let f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * zi + c * f;
                    z[k * n + i] = c * zi - s * f;
                }
            }
        }
    }
}

/// Implicit-shift QL on a tridiagonal (d, e); rotations forwarded to `sink`.
fn ql_implicit(d: &mut [f64], e_sub: &mut [f64], sink: &mut RotationSink) -> Result<(), Error> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    // Shift subdiagonal for the NR-style indexing e[i] between d[i], d[i+1].
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&e_sub[..n - 1]);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence {
                    iterations: iter,
                    residual: e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                sink.rotate(i, s, c);
            }
            if underflow && i > l {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn sort_ascending(eig: &mut SymmetricEigen, n: usize) {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.values[i].total_cmp(&eig.values[j]));
    eig.values = order.iter().map(|&j| eig.values[j]).collect();
    if let Some(row) = &eig.observer_row {
        eig.observer_row = Some(order.iter().map(|&j| row[j]).collect());
    }
    if let Some(z) = &eig.vectors {
        let mut sorted = vec![0.0; n * n];
        for (new_j, &old_j) in order.iter().enumerate() {
            for i in 0..n {
                sorted[i * n + new_j] = z[i * n + old_j];
            }
        }
        eig.vectors = Some(sorted);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &SymMatrix, eig: &SymmetricEigen) -> f64 {
        let n = a.dim();
        let z = eig.vectors.as_ref().unwrap();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let mut av = 0.0;
                for k in 0..n {
                    av += a.get(i, k) * z[k * n + j];
                }
                worst = worst.max((av - eig.values[j] * z[i * n + j]).abs());
            }
        }
        worst
    }

    #[test]
    fn diagonal_matrix_is_its_own_spectrum() {
        let mut a = SymMatrix::zeros(4);
        for (i, v) in [3.0, -1.0, 0.5, 2.0].iter().enumerate() {
            a.set(i, i, *v);
        }
        let vals = eigen_values(&a).unwrap();
        assert_eq!(vals, vec![-1.0, 0.5, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let mut a = SymMatrix::zeros(2);
        a.set(0, 0, 1.0);
        a.set(1, 1, -1.0);
        a.set(0, 1, 2.0);
        let vals = eigen_values(&a).unwrap();
        let r = 5.0f64.sqrt();
        assert!((vals[0] + r).abs() < 1e-14);
        assert!((vals[1] - r).abs() < 1e-14);
    }

    #[test]
    fn random_symmetric_reconstruction() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 40;
        let mut a = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                a.set(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        let eig = eigen_full(&a).unwrap();
        assert!(residual(&a, &eig) < 1e-11);
        // Orthonormal columns.
        let z = eig.vectors.as_ref().unwrap();
        for j in 0..n {
            let mut norm = 0.0;
            for i in 0..n {
                norm += z[i * n + j] * z[i * n + j];
            }
            assert!((norm - 1.0).abs() < 1e-12);
        }
        // Observer row agrees with the full decomposition.
        let obs = eigen_observer(&a, 0).unwrap();
        for j in 0..n {
            assert!((obs.values[j] - eig.values[j]).abs() < 1e-12);
            assert!((obs.observer_row.as_ref().unwrap()[j].abs() - z[j].abs()).abs() < 1e-10);
        }
    }

    #[test]
    fn arrow_matrix_eigenvalues_interlace() {
        let n_side = 20;
        let dim = 2 * n_side + 2;
        let mut a = SymMatrix::zeros(dim);
        let c = 0.3;
        for k in 0..(2 * n_side + 1) {
            let level = k as f64 - n_side as f64;
            a.set(k + 1, k + 1, level);
            a.set(0, k + 1, c);
        }
        let vals = eigen_values(&a).unwrap();
        for w in vals.windows(2) {
            assert!(w[1] > w[0]);
        }
    }
}
