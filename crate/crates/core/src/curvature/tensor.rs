use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerance for the algebraic curvature symmetries.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Components `R_{ijkl}` in an orthonormal frame, stored densely.
///
/// Construction checks antisymmetry in each index pair, pair symmetry and
/// the first Bianchi identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureTensor {
    n: usize,
    data: Vec<f64>,
}

impl CurvatureTensor {
    fn zeros(n: usize) -> Self {
        CurvatureTensor {
            n,
            data: vec![0.0; n.pow(4)],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `R_{ijkl}` with 0-based indices.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }

    fn set(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        let at = self.idx(i, j, k, l);
        self.data[at] = value;
    }

    /// Builds a tensor from raw dense components and validates it.
    pub fn from_dense(n: usize, data: Vec<f64>) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain(format!("dimension n = {n} must be at least 3")));
        }
        if data.len() != n.pow(4) {
            return Err(Error::domain(format!(
                "expected {} components, got {}",
                n.pow(4),
                data.len()
            )));
        }
        let t = CurvatureTensor { n, data };
        t.validate()?;
        Ok(t)
    }

    /// Constant sectional curvature `c`: `R_{ijkl} = c (δ_ik δ_jl − δ_il δ_jk)`.
    pub fn space_form(n: usize, curvature: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain(format!("dimension n = {n} must be at least 3")));
        }
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    t.set(i, j, i, j, curvature);
                    t.set(i, j, j, i, -curvature);
                }
            }
        }
        Ok(t)
    }

    /// Riemannian product of unit spheres `S^p × S^q`.
    pub fn product_spheres(p: usize, q: usize) -> Result<Self> {
        if p < 2 || q < 2 {
            return Err(Error::domain(format!("factor dimensions ({p}, {q}) must be at least 2")));
        }
        let n = p + q;
        let mut t = Self::zeros(n);
        for block in [0..p, p..n] {
            for i in block.clone() {
                for j in block.clone() {
                    if i != j {
                        t.set(i, j, i, j, 1.0);
                        t.set(i, j, j, i, -1.0);
                    }
                }
            }
        }
        Ok(t)
    }

    /// Fills the symmetry orbit of each listed component `(i, j, k, l, value)`
    /// (0-based) and validates the result. Conflicting entries are rejected.
    pub fn from_components(n: usize, components: &[(usize, usize, usize, usize, f64)]) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain(format!("dimension n = {n} must be at least 3")));
        }
        let mut t = Self::zeros(n);
        let mut seen = vec![false; n.pow(4)];
        for &(i, j, k, l, value) in components {
            if [i, j, k, l].iter().any(|&x| x >= n) {
                return Err(Error::domain(format!(
                    "index ({}, {}, {}, {}) out of range for n = {n}",
                    i + 1,
                    j + 1,
                    k + 1,
                    l + 1
                )));
            }
            if !value.is_finite() {
                return Err(Error::Validation("component is not finite".into()));
            }
            if i == j || k == l {
                if value != 0.0 {
                    return Err(Error::Validation(format!(
                        "R_{}{}{}{} must vanish by antisymmetry",
                        i + 1,
                        j + 1,
                        k + 1,
                        l + 1
                    )));
                }
                continue;
            }
            let orbit = [
                (i, j, k, l, value),
                (j, i, k, l, -value),
                (i, j, l, k, -value),
                (j, i, l, k, value),
                (k, l, i, j, value),
                (l, k, i, j, -value),
                (k, l, j, i, -value),
                (l, k, j, i, value),
            ];
            for (a, b, c, d, v) in orbit {
                let at = t.idx(a, b, c, d);
                if seen[at] && (t.data[at] - v).abs() > SYMMETRY_TOL {
                    return Err(Error::Validation(format!(
                        "conflicting values for R_{}{}{}{}",
                        a + 1,
                        b + 1,
                        c + 1,
                        d + 1
                    )));
                }
                seen[at] = true;
                t.data[at] = v;
            }
        }
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        let bad = if (r + self.get(j, i, k, l)).abs() > SYMMETRY_TOL
                            || (r + self.get(i, j, l, k)).abs() > SYMMETRY_TOL
                        {
                            Some("antisymmetry")
                        } else if (r - self.get(k, l, i, j)).abs() > SYMMETRY_TOL {
                            Some("pair symmetry")
                        } else if (r + self.get(i, k, l, j) + self.get(i, l, j, k)).abs() > SYMMETRY_TOL {
                            Some("first Bianchi identity")
                        } else {
                            None
                        };
                        if let Some(what) = bad {
                            return Err(Error::Validation(format!(
                                "{what} fails at ({}, {}, {}, {})",
                                i + 1,
                                j + 1,
                                k + 1,
                                l + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `Σ_{i,j} R_{ijij}`.
    pub fn scalar_curvature(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.get(i, j, i, j);
            }
        }
        s
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Components in the frame `e'_a = Σ_i q[a][i] e_i`; `q` must be orthogonal.
    pub fn frame_change(&self, q: &[Vec<f64>]) -> Result<Self> {
        let n = self.n;
        if q.len() != n || q.iter().any(|row| row.len() != n) {
            return Err(Error::domain("frame matrix must be n x n"));
        }
        // contract one slot at a time: O(n^5)
        let mut cur = self.data.clone();
        for slot in 0..4 {
            let stride = n.pow(3 - slot as u32);
            let mut next = vec![0.0; cur.len()];
            for (pos, out) in next.iter_mut().enumerate() {
                let a = (pos / stride) % n;
                let base = pos - a * stride;
                *out = (0..n).map(|i| q[a][i] * cur[base + i * stride]).sum();
            }
            cur = next;
        }
        let t = CurvatureTensor { n, data: cur };
        t.validate_with(1e-10)?;
        Ok(t)
    }

    fn validate_with(&self, tol: f64) -> Result<()> {
        let scaled = CurvatureTensor {
            n: self.n,
            data: self.data.iter().map(|x| x * SYMMETRY_TOL / tol).collect(),
        };
        scaled.validate()
    }
}
