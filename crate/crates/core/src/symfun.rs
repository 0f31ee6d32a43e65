//! Elementary symmetric polynomials, fractional partial sums and the
//! vector types the rest of the crate is built on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-empty vector of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RealVector(Vec<f64>);

impl RealVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::domain("vector must have at least one entry"));
        }
        if let Some(i) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::domain(format!(
                "entry {} is not finite ({})",
                i + 1,
                entries[i]
            )));
        }
        Ok(RealVector(entries))
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.0)
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|x| x * t).collect())
    }

    pub fn sorted(&self) -> SortedVector {
        SortedVector::from_vector(self)
    }
}

impl TryFrom<Vec<f64>> for RealVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        RealVector::new(v)
    }
}

impl From<RealVector> for Vec<f64> {
    fn from(v: RealVector) -> Self {
        v.0
    }
}

impl AsRef<[f64]> for RealVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Entries in non-decreasing order together with the permutation that
/// produced them: `entries[i] == source[permutation[i]]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SortedVector {
    entries: Vec<f64>,
    permutation: Vec<usize>,
}

impl SortedVector {
    /// Stable sort; ties keep the lower source index first.
    pub fn from_vector(v: &RealVector) -> Self {
        let src = v.as_slice();
        let mut permutation: Vec<usize> = (0..src.len()).collect();
        permutation.sort_by(|&a, &b| src[a].total_cmp(&src[b]));
        let entries = permutation.iter().map(|&i| src[i]).collect();
        SortedVector {
            entries,
            permutation,
        }
    }

    /// Accepts entries that are already ordered; the permutation is the identity.
    pub fn from_sorted(entries: Vec<f64>) -> Result<Self> {
        let v = RealVector::new(entries)?;
        if v.as_slice().windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::domain("entries are not in non-decreasing order"));
        }
        let n = v.len();
        Ok(SortedVector {
            entries: v.into_inner(),
            permutation: (0..n).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.entries)
    }

    pub fn to_real_vector(&self) -> RealVector {
        RealVector(self.entries.clone())
    }
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    // scaled accumulation so large spectra do not overflow
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}

/// All of `σ_0, …, σ_k` via the product expansion of `∏(1 + t μ_i)`.
///
/// Each factor updates the coefficient array from the top down, so one pass
/// costs `O(k)` and the whole expansion `O(N k)`.
pub fn elementary_symmetric_all(v: &[f64], k: usize) -> Vec<f64> {
    let k = k.min(v.len());
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for (i, &mu) in v.iter().enumerate() {
        let top = k.min(i + 1);
        for j in (1..=top).rev() {
            e[j] += mu * e[j - 1];
        }
    }
    e
}

/// `σ_k(v)`, the sum over all `k`-subsets of the product of their entries.
pub fn elementary_symmetric(v: &RealVector, k: usize) -> Result<f64> {
    let n = v.len();
    if k == 0 || k > n {
        return Err(Error::domain(format!("k = {k} must lie in [1, {n}]")));
    }
    Ok(elementary_symmetric_all(v.as_slice(), k)[k])
}

/// `σ_2` from power sums: `((Σμ)² − Σμ²) / 2`.
pub fn sigma2_via_power_sums(v: &RealVector) -> Result<f64> {
    if v.len() < 2 {
        return Err(Error::domain("sigma_2 needs at least two entries"));
    }
    let s1: f64 = v.sum();
    let s2: f64 = v.as_slice().iter().map(|x| x * x).sum();
    Ok(0.5 * (s1 * s1 - s2))
}

/// `μ_1 + … + μ_⌊m⌋ + (m − ⌊m⌋) μ_{⌊m⌋+1}` on a sorted vector, for `m ∈ [1, N]`.
pub fn partial_sum_fractional(v: &SortedVector, m: f64) -> Result<f64> {
    let n = v.len();
    if !(m >= 1.0 && m <= n as f64) {
        return Err(Error::domain(format!("m = {m} must lie in [1, {n}]")));
    }
    Ok(weighted_partial_sum(v.entries(), m))
}

/// The same functional extended to `m ∈ (0, N]`; for `m < 1` it is `m μ_1`.
pub fn partial_sum_extended(v: &SortedVector, m: f64) -> Result<f64> {
    let n = v.len();
    if !(m > 0.0 && m <= n as f64) {
        return Err(Error::domain(format!("m = {m} must lie in (0, {n}]")));
    }
    Ok(weighted_partial_sum(v.entries(), m))
}

pub(crate) fn weighted_partial_sum(sorted: &[f64], m: f64) -> f64 {
    let whole = m.floor();
    let frac = m - whole;
    let whole = whole as usize;
    let head: f64 = sorted[..whole].iter().sum();
    // no (⌊m⌋+1)-th entry is read when m is an integer
    if frac == 0.0 {
        head
    } else {
        head + frac * sorted[whole]
    }
}

/// `partial_sum_fractional(v, m) / m`; non-decreasing in `m`.
pub fn normalized_partial_sum(v: &SortedVector, m: f64) -> Result<f64> {
    Ok(partial_sum_fractional(v, m)? / m)
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
