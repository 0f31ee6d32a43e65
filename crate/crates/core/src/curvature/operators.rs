use serde::{Deserialize, Serialize};

use super::eigen::jacobi_eigen;
use super::tensor::{CurvatureTensor, SYMMETRY_TOL};
use crate::error::{Error, Result};
use crate::symfun::{RealVector, SortedVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// Curvature operator on 2-forms, `N = n(n−1)/2`.
    FirstKind,
    /// Curvature operator on trace-free symmetric 2-tensors, `N = (n−1)(n+2)/2`.
    SecondKind,
    /// Kähler curvature operator on `u(n)`, `N = n²` for complex dimension `n`.
    Kaehler,
    Generic,
}

impl OperatorKind {
    /// Eigenvalue count for underlying dimension `n`; `None` for generic operators.
    pub fn eigenvalue_count(self, n: usize) -> Option<usize> {
        match self {
            OperatorKind::FirstKind => Some(n * n.saturating_sub(1) / 2),
            OperatorKind::SecondKind => Some(n.saturating_sub(1) * (n + 2) / 2),
            OperatorKind::Kaehler => Some(n * n),
            OperatorKind::Generic => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::FirstKind => "first_kind",
            OperatorKind::SecondKind => "second_kind",
            OperatorKind::Kaehler => "kaehler",
            OperatorKind::Generic => "generic",
        }
    }
}

/// Symmetric matrix of an operator in an orthonormal basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorMatrix {
    entries: Vec<Vec<f64>>,
    kind: OperatorKind,
    /// Underlying dimension `n`, when the matrix comes from a tensor.
    n: Option<usize>,
}

impl OperatorMatrix {
    pub fn new(entries: Vec<Vec<f64>>, kind: OperatorKind, n: Option<usize>) -> Result<Self> {
        let size = entries.len();
        if entries.iter().any(|row| row.len() != size) {
            return Err(Error::Validation("operator matrix must be square".into()));
        }
        if entries.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Validation("operator matrix has non-finite entries".into()));
        }
        for i in 0..size {
            for j in 0..i {
                if (entries[i][j] - entries[j][i]).abs() > SYMMETRY_TOL {
                    return Err(Error::Validation(format!(
                        "matrix not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if let (Some(dim), Some(want)) = (n, n.and_then(|d| kind.eigenvalue_count(d))) {
            if want != size {
                return Err(Error::Validation(format!(
                    "{} operator for n = {dim} must have size {want}, got {size}",
                    kind.name()
                )));
            }
        }
        Ok(OperatorMatrix { entries, kind, n })
    }

    pub fn generic(entries: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(entries, OperatorKind::Generic, None)
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn dim(&self) -> Option<usize> {
        self.n
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.size()).map(|i| self.entries[i][i]).sum()
    }
}

/// Ordered eigenvalues of an operator with its kind and underlying dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    eigenvalues: SortedVector,
    kind: OperatorKind,
    n: usize,
}

impl Spectrum {
    /// Sorts `values` and checks the length against the kind's count. For
    /// generic spectra `n` is the length itself.
    pub fn new(values: Vec<f64>, kind: OperatorKind, n: usize) -> Result<Self> {
        let v = RealVector::new(values)?;
        let n = if kind == OperatorKind::Generic { v.len() } else { n };
        if let Some(want) = kind.eigenvalue_count(n) {
            if want != v.len() {
                return Err(Error::Validation(format!(
                    "{} spectrum for n = {n} needs {want} eigenvalues, got {}",
                    kind.name(),
                    v.len()
                )));
            }
        }
        Ok(Spectrum {
            eigenvalues: SortedVector::from_vector(&v),
            kind,
            n,
        })
    }

    pub fn eigenvalues(&self) -> &SortedVector {
        &self.eigenvalues
    }

    pub fn values(&self) -> &[f64] {
        self.eigenvalues.entries()
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values().len()
    }

    pub fn is_empty(&self) -> bool {
        self.values().is_empty()
    }
}

/// Pairs `(i, j)` with `i < j` in lexicographic order.
pub fn two_form_basis(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect()
}

/// Matrix of the first-kind operator over `{e_i ∧ e_j : i < j}`; entries are `R_{ijkl}`.
pub fn assemble_first_kind(r: &CurvatureTensor) -> Result<OperatorMatrix> {
    let basis = two_form_basis(r.dim());
    let entries = basis
        .iter()
        .map(|&(i, j)| basis.iter().map(|&(k, l)| r.get(i, j, k, l)).collect())
        .collect();
    OperatorMatrix::new(entries, OperatorKind::FirstKind, Some(r.dim()))
}

/// Integer-valued orthogonal basis of trace-free symmetric matrices with
/// squared norms: `n − 1` diagonal vectors `(1, …, 1, −k, 0, …)` (Gram–Schmidt
/// on `e_k − e_{k+1}`, unnormalized) followed by `e_i⊗e_j + e_j⊗e_i`, `i < j`.
fn integer_traceless_basis(n: usize) -> Vec<(Vec<Vec<f64>>, f64)> {
    let mut basis = Vec::with_capacity((n - 1) * (n + 2) / 2);
    for k in 1..n {
        let mut h = vec![vec![0.0; n]; n];
        for (i, row) in h.iter_mut().enumerate().take(k) {
            row[i] = 1.0;
        }
        h[k][k] = -(k as f64);
        basis.push((h, (k * (k + 1)) as f64));
    }
    for (i, j) in two_form_basis(n) {
        let mut h = vec![vec![0.0; n]; n];
        h[i][j] = 1.0;
        h[j][i] = 1.0;
        basis.push((h, 2.0));
    }
    basis
}

/// Orthonormal basis of trace-free symmetric `n × n` matrices: `n − 1`
/// orthonormalized diagonal differences followed by the off-diagonal
/// elements `(e_i⊗e_j + e_j⊗e_i)/√2`.
pub fn traceless_symmetric_basis(n: usize) -> Vec<Vec<Vec<f64>>> {
    integer_traceless_basis(n)
        .into_iter()
        .map(|(h, norm2)| {
            let s = norm2.sqrt();
            h.into_iter()
                .map(|row| row.into_iter().map(|x| x / s).collect())
                .collect()
        })
        .collect()
}

/// `R̄(h)_{ij} = Σ_{k,l} R_{iklj} h_{kl}`.
fn apply_rbar(r: &CurvatureTensor, h: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = r.dim();
    let mut out = vec![vec![0.0; n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            let mut s = 0.0;
            for (k, hk) in h.iter().enumerate() {
                for (l, hkl) in hk.iter().enumerate() {
                    if *hkl != 0.0 {
                        s += r.get(i, k, l, j) * hkl;
                    }
                }
            }
            *x = s;
        }
    }
    out
}

fn frobenius_inner(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| x * y)
        .sum()
}

/// Matrix of `R̄` in the orthonormal basis obtained by normalizing `basis`.
/// Entries are formed on the integer basis and divided by the norms last,
/// which keeps space forms exact.
fn gram_matrix(r: &CurvatureTensor, basis: &[(Vec<Vec<f64>>, f64)]) -> Vec<Vec<f64>> {
    let images: Vec<_> = basis.iter().map(|(h, _)| apply_rbar(r, h)).collect();
    let size = basis.len();
    let mut m = vec![vec![0.0; size]; size];
    for a in 0..size {
        for b in a..size {
            // average the two orders so the result is exactly symmetric
            let raw = 0.5 * (frobenius_inner(&basis[a].0, &images[b]) + frobenius_inner(&basis[b].0, &images[a]));
            let (na, nb) = (basis[a].1, basis[b].1);
            let v = if na == nb { raw / na } else { raw / (na * nb).sqrt() };
            m[a][b] = v;
            m[b][a] = v;
        }
    }
    m
}

/// Matrix of the second-kind operator over [`traceless_symmetric_basis`].
pub fn assemble_second_kind(r: &CurvatureTensor) -> Result<OperatorMatrix> {
    let entries = gram_matrix(r, &integer_traceless_basis(r.dim()));
    OperatorMatrix::new(entries, OperatorKind::SecondKind, Some(r.dim()))
}

/// `R̄` on all symmetric 2-tensors: the trace-free basis followed by `g/√n`.
pub fn assemble_full_symmetric(r: &CurvatureTensor) -> Result<OperatorMatrix> {
    let n = r.dim();
    let mut basis = integer_traceless_basis(n);
    let g = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    basis.push((g, n as f64));
    OperatorMatrix::new(gram_matrix(r, &basis), OperatorKind::Generic, Some(n))
}

/// Ordered eigenvalues of a symmetric operator matrix.
pub fn eigen_spectrum(a: &OperatorMatrix) -> Result<Spectrum> {
    let e = jacobi_eigen(a.entries())?;
    Spectrum::new(e.values, a.kind(), a.dim().unwrap_or(a.size()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub relative_error: f64,
    pub holds: bool,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64, scale: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs()).max(scale);
        let relative_error = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
        IdentityCheck {
            lhs,
            rhs,
            relative_error,
            holds: relative_error <= SCALAR_IDENTITY_TOL,
        }
    }
}

pub const SCALAR_IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarCurvatureReport {
    pub n: usize,
    pub scalar_curvature: f64,
    pub first_kind: Spectrum,
    pub second_kind: Spectrum,
    /// `R_scal = 2 Σ λ_i`.
    pub first_kind_identity: IdentityCheck,
    /// `R_scal = (2n/(n+2)) Σ ν_i`.
    pub second_kind_identity: IdentityCheck,
}

impl ScalarCurvatureReport {
    pub fn holds(&self) -> bool {
        self.first_kind_identity.holds && self.second_kind_identity.holds
    }
}

/// Compares the scalar curvature with both eigenvalue sums. Relative errors
/// are measured against `max(|lhs|, |rhs|, ‖R‖_F)`.
pub fn scalar_curvature_checks(r: &CurvatureTensor) -> Result<ScalarCurvatureReport> {
    let n = r.dim();
    let nf = n as f64;
    let scal = r.scalar_curvature();
    let first = eigen_spectrum(&assemble_first_kind(r)?)?;
    let second = eigen_spectrum(&assemble_second_kind(r)?)?;
    let scale = r.frobenius_norm();
    let first_sum: f64 = first.values().iter().sum();
    let second_sum: f64 = second.values().iter().sum();
    Ok(ScalarCurvatureReport {
        n,
        scalar_curvature: scal,
        first_kind_identity: IdentityCheck::new(scal, 2.0 * first_sum, scale),
        second_kind_identity: IdentityCheck::new(scal, 2.0 * nf / (nf + 2.0) * second_sum, scale),
        first_kind: first,
        second_kind: second,
    })
}
