//! Model curvature tensors, the operators they induce on 2-forms and on
//! trace-free symmetric 2-tensors, and their spectra.

mod eigen;
mod operators;
mod tensor;

pub use eigen::{jacobi_eigen, SymmetricEigen, MAX_SWEEPS, OFF_DIAGONAL_TOL};
pub use operators::{
    assemble_first_kind, assemble_full_symmetric, assemble_second_kind, eigen_spectrum,
    scalar_curvature_checks, traceless_symmetric_basis, two_form_basis, IdentityCheck,
    OperatorKind, OperatorMatrix, ScalarCurvatureReport, Spectrum, SCALAR_IDENTITY_TOL,
};
pub use tensor::{CurvatureTensor, SYMMETRY_TOL};

use rand_distr::StandardNormal;

use crate::error::Result;

pub fn model_space_form(n: usize, curvature: f64) -> Result<CurvatureTensor> {
    CurvatureTensor::space_form(n, curvature)
}

pub fn model_product_spheres(p: usize, q: usize) -> Result<CurvatureTensor> {
    CurvatureTensor::product_spheres(p, q)
}

/// Haar-ish random orthogonal matrix: Gram–Schmidt on Gaussian rows.
pub fn random_orthogonal(n: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand::Rng;
    let mut rng = crate::cones::task_rng(seed, 0);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    while rows.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            for r in &rows {
                let d: f64 = r.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(r).for_each(|(x, y)| *x -= d * y);
            }
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-8 {
            v.iter_mut().for_each(|x| *x /= len);
            rows.push(v);
        }
    }
    rows
}
