//! Small dense symmetric linear algebra used by the barrier machinery.
//!
//! Simplex blocks are tiny (a handful of coordinates), so everything here is
//! plain `Vec<f64>` row-major with cyclic Jacobi for eigendecompositions.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn mat_vec(a: &[f64], n: usize, x: &[f64], out: &mut [f64]) {
    for i in 0..n {
        out[i] = dot(&a[i * n..(i + 1) * n], x);
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors stored as columns
/// of a row-major `n x n` matrix, so `a = v * diag(l) * v^T`.
pub fn sym_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    if n == 1 {
        return (vec![m[0]], v);
    }
    let scale: f64 = m
        .iter()
        .map(|x| x.abs())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let tol = 1e-15 * scale;
    for _sweep in 0..64 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[p * n + q].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= tol {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let lambda: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    (lambda, v)
}

/// Builds `v * diag(f(l)) * v^T` from an eigendecomposition.
pub fn sym_from_eigen(lambda: &[f64], v: &[f64], n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for k in 0..n {
        let fl = f(lambda[k]);
        for i in 0..n {
            let vik = v[i * n + k];
            for j in 0..n {
                out[i * n + j] += fl * vik * v[j * n + k];
            }
        }
    }
    out
}

/// Largest singular value of a small matrix, via eigenvalues of `a^T a`.
pub fn spectral_norm(a: &[f64], n: usize) -> f64 {
    let mut ata = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += a[k * n + i] * a[k * n + j];
            }
            ata[i * n + j] = s;
        }
    }
    let (lambda, _) = sym_eigen(&ata, n);
    lambda.iter().fold(0.0_f64, |m, &l| m.max(l.max(0.0))).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_recovers_known_spectrum() {
        // [[18, 9], [9, 18]] has eigenvalues 9 and 27.
        let a = vec![18.0, 9.0, 9.0, 18.0];
        let (mut l, v) = sym_eigen(&a, 2);
        l.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((l[0] - 9.0).abs() < 1e-12);
        assert!((l[1] - 27.0).abs() < 1e-12);
        // Reconstruct.
        let back = sym_from_eigen(&{ let (l, _) = sym_eigen(&a, 2); l }, &v, 2, |x| x);
        for (x, y) in back.iter().zip(&a) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn inverse_sqrt_squares_to_inverse() {
        let a = vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 5.0];
        let n = 3;
        let (l, v) = sym_eigen(&a, n);
        let h = sym_from_eigen(&l, &v, n, |x| 1.0 / x.sqrt());
        // h * a * h should be the identity.
        let mut ah = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += a[i * n + k] * h[k * n + j];
                }
                ah[i * n + j] = s;
            }
        }
        let mut hah = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += h[i * n + k] * ah[k * n + j];
                }
                hah[i * n + j] = s;
            }
        }
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((hah[i * n + j] - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let a = vec![2.0, 0.0, 0.0, -7.0];
        assert!((spectral_norm(&a, 2) - 7.0).abs() < 1e-10);
    }
}
