//! Cyclic Jacobi eigensolver for dense symmetric matrices.

use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius norm, relative to `‖A‖_F`, at which sweeping stops.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// `A = Q diag(values) Qᵀ`, with eigenvalues ascending and eigenvectors in
/// the columns of `vectors` (`vectors[row][col]`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

fn off_diagonal_norm(a: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if i != j {
                s += x * x;
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes a symmetric matrix. The input is assumed symmetric; only
/// the upper triangle drives the rotations.
pub fn jacobi_eigen(matrix: &[Vec<f64>]) -> Result<SymmetricEigen> {
    let n = matrix.len();
    if matrix.iter().any(|row| row.len() != n) {
        return Err(Error::domain("matrix must be square"));
    }
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut q: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let frob = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = OFF_DIAGONAL_TOL * frob;

    let mut sweeps = 0;
    while off_diagonal_norm(&a) > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Numeric(format!(
                "Jacobi iteration did not converge in {MAX_SWEEPS} sweeps (off-diagonal norm {:e})",
                off_diagonal_norm(&a)
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[p][r];
                if apr == 0.0 {
                    continue;
                }
                let theta = (a[r][r] - a[p][p]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                rotate(&mut a, &mut q, p, r, c, s, t);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = (0..n)
        .map(|row| order.iter().map(|&col| q[row][col]).collect())
        .collect();
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

/// Applies the rotation zeroing `a[p][r]`, keeping `a` symmetric.
fn rotate(a: &mut [Vec<f64>], q: &mut [Vec<f64>], p: usize, r: usize, c: f64, s: f64, t: f64) {
    let n = a.len();
    let apr = a[p][r];
    a[p][p] -= t * apr;
    a[r][r] += t * apr;
    a[p][r] = 0.0;
    a[r][p] = 0.0;
    for k in 0..n {
        if k != p && k != r {
            let akp = a[k][p];
            let akr = a[k][r];
            let new_p = c * akp - s * akr;
            let new_r = s * akp + c * akr;
            a[k][p] = new_p;
            a[p][k] = new_p;
            a[k][r] = new_r;
            a[r][k] = new_r;
        }
    }
    for row in q.iter_mut() {
        let qp = row[p];
        let qr = row[r];
        row[p] = c * qp - s * qr;
        row[r] = s * qp + c * qr;
    }
}
