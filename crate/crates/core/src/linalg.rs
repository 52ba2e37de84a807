//! Dense complex Hermitian eigensolver.
//!
//! Householder reduction to a Hermitian tridiagonal matrix, a diagonal phase
//! similarity that makes the tridiagonal real, then implicit QL iterations with
//! Wilkinson-style shifts on the real symmetric tridiagonal (the classic `tql2`
//! scheme). Eigenvectors are accumulated through every stage.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_QL_ITERATIONS: usize = 60;

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

/// Diagonalizes a Hermitian matrix. Only the lower triangle is trusted; the
/// upper triangle is treated as its conjugate.
pub fn hermitian_eigen(matrix: &DMatrix<Complex64>) -> Result<HermitianEigen> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            found: matrix.ncols(),
        });
    }
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }

    let mut a = matrix.clone();
    for i in 0..n {
        for j in 0..i {
            a[(j, i)] = a[(i, j)].conj();
        }
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }

    let mut q = DMatrix::<Complex64>::identity(n, n);
    householder_tridiagonalize(&mut a, &mut q);

    // Phase similarity D so that D^H T D has real positive subdiagonal.
    let mut diag = vec![0.0; n];
    let mut sub = vec![0.0; n];
    let mut phases = vec![Complex64::new(1.0, 0.0); n];
    for i in 0..n {
        diag[i] = a[(i, i)].re;
    }
    for i in 0..n - 1 {
        let e = a[(i + 1, i)];
        let r = e.norm();
        sub[i + 1] = r;
        phases[i + 1] = if r > 0.0 { phases[i] * (e / r) } else { phases[i] };
    }
    for (col, &ph) in phases.iter().enumerate() {
        for row in 0..n {
            q[(row, col)] *= ph;
        }
    }

    let mut z = vec![vec![0.0; n]; n];
    for (i, row) in z.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    tql2(&mut diag, &mut sub, &mut z)?;

    // vectors = Q D Z, with Z real.
    let mut vectors = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        for row in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                acc += q[(row, j)] * zj[k];
            }
            vectors[(row, k)] = acc;
        }
    }
    Ok(HermitianEigen {
        values: diag,
        vectors,
    })
}

/// Reduces `a` in place to Hermitian tridiagonal form `T = Q^H A Q`,
/// right-multiplying `q` by every reflector.
fn householder_tridiagonalize(a: &mut DMatrix<Complex64>, q: &mut DMatrix<Complex64>) {
    let n = a.nrows();
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x: Vec<Complex64> = (0..m).map(|i| a[(k + 1 + i, k)]).collect();
        let xnorm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let tail = x[1..].iter().map(|v| v.norm_sqr()).sum::<f64>();
        if xnorm == 0.0 || tail == 0.0 {
            continue;
        }
        let x0 = x[0];
        let unit = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -unit * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        let tau = 2.0 / vnorm2;

        // p = tau * A_sub v, K = (tau / 2) v^H p, w = p - K v
        let mut p = vec![Complex64::new(0.0, 0.0); m];
        for (i, pi) in p.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, vj) in v.iter().enumerate() {
                acc += a[(k + 1 + i, k + 1 + j)] * vj;
            }
            *pi = acc * tau;
        }
        let mut kk = Complex64::new(0.0, 0.0);
        for (vi, pi) in v.iter().zip(&p) {
            kk += vi.conj() * pi;
        }
        let kk = kk * (tau / 2.0);
        let w: Vec<Complex64> = p.iter().zip(&v).map(|(pi, vi)| pi - kk * vi).collect();

        // A_sub -= v w^H + w v^H
        for i in 0..m {
            for j in 0..m {
                let upd = v[i] * w[j].conj() + w[i] * v[j].conj();
                a[(k + 1 + i, k + 1 + j)] -= upd;
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in 1..m {
            a[(k + 1 + i, k)] = Complex64::new(0.0, 0.0);
            a[(k, k + 1 + i)] = Complex64::new(0.0, 0.0);
        }

        // Q <- Q (I - tau v v^H)
        for row in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (j, vj) in v.iter().enumerate() {
                dot += q[(row, k + 1 + j)] * vj;
            }
            let s = dot * tau;
            for (j, vj) in v.iter().enumerate() {
                q[(row, k + 1 + j)] -= s * vj.conj();
            }
        }
    }
}

/// Implicit QL on a real symmetric tridiagonal matrix.
///
/// `d` holds the diagonal, `e[i]` the subdiagonal element `(i, i-1)` with
/// `e[0]` unused. On return `d` is sorted ascending and column `k` of `z`
/// (stored row-major as `z[row][k]`) is the matching eigenvector.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut [Vec<f64>]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NoConvergence(format!(
                        "tridiagonal QL stalled at index {l}"
                    )));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in z.iter_mut() {
                        h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Selection sort keeps eigenvector columns aligned with their values.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for row in z.iter_mut() {
                row.swap(i, k);
            }
        }
    }
    Ok(())
}

/// `V diag(f(λ)) V^H` applied to a vector without forming the product matrix.
pub(crate) fn spectral_apply(
    eigen: &HermitianEigen,
    phases: &[Complex64],
    input: &DVector<Complex64>,
) -> DVector<Complex64> {
    let mut coeffs = eigen.vectors.ad_mul(input);
    for (c, ph) in coeffs.iter_mut().zip(phases) {
        *c *= ph;
    }
    &eigen.vectors * coeffs
}
