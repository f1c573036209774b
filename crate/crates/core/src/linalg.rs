//! Small dense symmetric eigen-solver (cyclic Jacobi) and the singular
//! values it yields through the Gram matrix.

/// Eigenvalues of a symmetric `n x n` matrix given row-major, in
/// descending order. Only the upper triangle needs to be meaningful.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let floor = f64::EPSILON * f64::EPSILON * scale;
    if n > 1 && scale > 0.0 {
        for _ in 0..60 {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[p * n + q].abs();
                    let diag = (a[p * n + p] * a[q * n + q]).abs().sqrt();
                    if apq <= floor || apq <= f64::EPSILON * diag {
                        continue;
                    }
                    rotate(&mut a, n, p, q);
                    rotated = true;
                }
            }
            if !rotated {
                break;
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    eig
}

/// Applies the Jacobi rotation that zeroes `a[p][q]`, keeping `a` symmetric.
fn rotate(a: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        a[k * n + p] = new_kp;
        a[p * n + k] = new_kp;
        a[k * n + q] = new_kq;
        a[q * n + k] = new_kq;
    }
    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
}

/// Singular values of the `m x d` matrix whose rows are given, in
/// descending order, `min(m, d)` of them.
///
/// Computed as square roots of the eigenvalues of whichever Gram matrix
/// (`XᵀX` or `XXᵀ`) is smaller. Accumulation is in `f64`.
pub fn singular_values(rows: &[&[f32]]) -> Vec<f64> {
    let m = rows.len();
    if m == 0 {
        return Vec::new();
    }
    let d = rows[0].len();
    let (gram, n) = if d <= m {
        let mut g = vec![0.0f64; d * d];
        for row in rows {
            for i in 0..d {
                let ri = f64::from(row[i]);
                if ri == 0.0 {
                    continue;
                }
                for j in i..d {
                    g[i * d + j] += ri * f64::from(row[j]);
                }
            }
        }
        mirror(&mut g, d);
        (g, d)
    } else {
        let mut g = vec![0.0f64; m * m];
        for i in 0..m {
            for j in i..m {
                g[i * m + j] = crate::scoring::dot(rows[i], rows[j]);
            }
        }
        mirror(&mut g, m);
        (g, m)
    };
    let eig = symmetric_eigenvalues(gram, n);
    // eigenvalues within rounding of zero are zero
    let tol = n as f64 * f64::EPSILON * eig[0].max(0.0);
    eig.into_iter()
        .map(|l| if l <= tol { 0.0 } else { l.sqrt() })
        .collect()
}

fn mirror(g: &mut [f64], n: usize) {
    for i in 0..n {
        for j in 0..i {
            g[i * n + j] = g[j * n + i];
        }
    }
}
