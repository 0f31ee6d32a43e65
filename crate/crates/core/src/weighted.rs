//! Bounded-weight eigenvalue sums and the form-degree coefficients `C_p(n)`.
//!
//! For a spectrum `ν_1 ≤ … ≤ ν_N`, a highest weight `Ω` and a total weight
//! `S ≤ N Ω`, the admissible weights are `0 ≤ ω_i ≤ Ω` with `Σ ω_i = S`. The
//! extremes of `Σ ω_i ν_i` over this set are attained greedily: put `Ω` on
//! the `⌊S/Ω⌋` largest (or smallest) entries and the remainder on the next one.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::symfun::{normalized_partial_sum, partial_sum_fractional, SortedVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightBudget {
    omega: f64,
    total: f64,
    n: usize,
}

impl WeightBudget {
    pub fn new(omega: f64, total: f64, n: usize) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) || !(total > 0.0 && total.is_finite()) {
            return Err(Error::domain("weights must be positive and finite"));
        }
        if n == 0 || total > n as f64 * omega {
            return Err(Error::domain(format!(
                "total weight {total} exceeds N * Omega = {}",
                n as f64 * omega
            )));
        }
        Ok(WeightBudget { omega, total, n })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(⌊S/Ω⌋, S − ⌊S/Ω⌋ Ω)`.
    fn split(&self) -> (usize, f64) {
        let ratio = self.total / self.omega;
        let q = (ratio.floor() as usize).min(self.n);
        let r = (self.total - q as f64 * self.omega).max(0.0);
        (q, r)
    }
}

fn check_len(spectrum: &SortedVector, budget: &WeightBudget) -> Result<()> {
    if spectrum.len() != budget.n {
        return Err(Error::domain(format!(
            "spectrum length {} does not match budget N = {}",
            spectrum.len(),
            budget.n
        )));
    }
    Ok(())
}

fn greedy<'a>(entries: impl Iterator<Item = &'a f64>, budget: &WeightBudget) -> f64 {
    let (q, r) = budget.split();
    let mut sum = 0.0;
    for (i, &nu) in entries.enumerate() {
        if i < q {
            sum += budget.omega * nu;
        } else {
            if r > 0.0 {
                sum += r * nu;
            }
            break;
        }
    }
    sum
}

/// Supremum of `Σ ω_i ν_i` over admissible weights.
pub fn weighted_sup(spectrum: &SortedVector, budget: &WeightBudget) -> Result<f64> {
    check_len(spectrum, budget)?;
    Ok(greedy(spectrum.entries().iter().rev(), budget))
}

/// Infimum of `Σ ω_i ν_i` over admissible weights.
pub fn weighted_inf(spectrum: &SortedVector, budget: &WeightBudget) -> Result<f64> {
    check_len(spectrum, budget)?;
    Ok(greedy(spectrum.entries().iter(), budget))
}

/// `(S − mΩ) ν_{m+1} + Ω Σ_{i≤m} ν_i` for an integer `1 ≤ m ≤ N`.
///
/// This bounds every admissible weighted sum from below, so it never exceeds
/// [`weighted_inf`]. For `m = N` the first term is only defined when `S = NΩ`.
pub fn weighted_lower_bound(spectrum: &SortedVector, budget: &WeightBudget, m: usize) -> Result<f64> {
    check_len(spectrum, budget)?;
    let n = spectrum.len();
    if m == 0 || m > n {
        return Err(Error::domain(format!("m = {m} must lie in [1, {n}]")));
    }
    let nu = spectrum.entries();
    let head: f64 = nu[..m].iter().sum();
    let excess = budget.total - m as f64 * budget.omega;
    if m == n {
        if excess != 0.0 {
            return Err(Error::domain("m = N requires S = N * Omega"));
        }
        return Ok(budget.omega * head);
    }
    Ok(excess * nu[m] + budget.omega * head)
}

/// `S · normalized_partial_sum(ν, S/Ω)`, the fractional form of the lower bound.
pub fn scaled_partial_sum(spectrum: &SortedVector, budget: &WeightBudget) -> Result<f64> {
    check_len(spectrum, budget)?;
    // S ≤ NΩ is enforced by the budget, so any excess over N is rounding
    let ratio = (budget.total / budget.omega).min(budget.n as f64);
    Ok(budget.total * normalized_partial_sum(spectrum, ratio)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormDegreeCoeffs {
    pub n: usize,
    pub p: usize,
    pub c_p: f64,
    pub omega_p: f64,
    pub s_p: f64,
}

/// `Ω_p = (n²p − np² − 2np + 2n² + 2n − 4p) / (n(n+2))`.
pub fn omega_value(n: f64, p: f64) -> f64 {
    (n * n * p - n * p * p - 2.0 * n * p + 2.0 * n * n + 2.0 * n - 4.0 * p) / (n * (n + 2.0))
}

/// `S_p = (3/2) p (n − p)`.
pub fn total_weight_value(n: f64, p: f64) -> f64 {
    1.5 * p * (n - p)
}

/// `C_p(n) = S_p / Ω_p` without range checks on `p`.
pub fn cp_value(n: f64, p: f64) -> f64 {
    total_weight_value(n, p) / omega_value(n, p)
}

pub fn coeff_cp(n: usize, p: usize) -> Result<FormDegreeCoeffs> {
    if n < 3 {
        return Err(Error::domain(format!("dimension n = {n} must be at least 3")));
    }
    if p == 0 || p > n / 2 {
        return Err(Error::domain(format!("p = {p} must lie in [1, {}]", n / 2)));
    }
    let (nf, pf) = (n as f64, p as f64);
    let omega_p = omega_value(nf, pf);
    let s_p = total_weight_value(nf, pf);
    Ok(FormDegreeCoeffs {
        n,
        p,
        c_p: s_p / omega_p,
        omega_p,
        s_p,
    })
}

/// `C′_1 = (3(n−1)/2) (n+2)/(2n−1)`, the improved one-form coefficient.
pub fn coeff_c1_prime(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::domain(format!("dimension n = {n} must be at least 3")));
    }
    let nf = n as f64;
    Ok(1.5 * (nf - 1.0) * (nf + 2.0) / (2.0 * nf - 1.0))
}

/// Which partial-sum hypothesis to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormHypothesis {
    /// Partial sum of length `C_p(n)`.
    DegreeCoefficient { p: usize },
    /// Partial sum of length `3n/4`, sufficient for every `p ≤ n/2`.
    ThreeQuartersN,
}

/// Whether `partial_sum(ν, L) ≥ L κ` with `L = C_p(n)` or `L = 3n/4`.
pub fn form_degree_bound(
    spectrum: &SortedVector,
    n: usize,
    hypothesis: FormHypothesis,
    kappa: f64,
    tol: f64,
) -> Result<bool> {
    if n < 3 {
        return Err(Error::domain(format!("dimension n = {n} must be at least 3")));
    }
    let n2 = (n - 1) * (n + 2) / 2;
    if spectrum.len() != n2 {
        return Err(Error::domain(format!(
            "spectrum length {} does not match N2 = {n2}",
            spectrum.len()
        )));
    }
    let length = match hypothesis {
        FormHypothesis::DegreeCoefficient { p } => coeff_cp(n, p)?.c_p,
        FormHypothesis::ThreeQuartersN => 0.75 * n as f64,
    };
    let lhs = partial_sum_fractional(spectrum, length)?;
    let rhs = length * kappa;
    let scale = spectrum.norm().max(rhs.abs()).max(1.0);
    Ok(lhs >= rhs - tol * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfun::RealVector;
    use rand::{Rng, SeedableRng};

    fn sv(x: &[f64]) -> SortedVector {
        RealVector::new(x.to_vec()).unwrap().sorted()
    }

    /// Maximum of the weighted sum over the vertices of the admissible
    /// polytope: `q` weights at Ω, one at the remainder, the rest zero.
    fn vertex_max(nu: &[f64], omega: f64, total: f64) -> f64 {
        let n = nu.len();
        let q = (total / omega).floor() as usize;
        let r = total - q as f64 * omega;
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != q {
                continue;
            }
            let base: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| omega * nu[i]).sum();
            if q == n || r == 0.0 {
                best = best.max(base);
                continue;
            }
            for j in (0..n).filter(|j| mask & (1 << j) == 0) {
                best = best.max(base + r * nu[j]);
            }
        }
        best
    }

    /// A random admissible weight vector: start uniform, then move mass
    /// between random pairs while respecting the bounds.
    fn random_weights(rng: &mut impl Rng, n: usize, omega: f64, total: f64) -> Vec<f64> {
        let mut w = vec![total / n as f64; n];
        for _ in 0..4 * n {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            if i == j {
                continue;
            }
            let room = w[i].min(omega - w[j]);
            let t = rng.random_range(0.0..=1.0) * room;
            w[i] -= t;
            w[j] += t;
        }
        w
    }

    #[test]
    fn sup_examples() {
        let b = WeightBudget::new(1.0, 2.0, 3).unwrap();
        assert_eq!(weighted_sup(&sv(&[0.0, 1.0, 2.0]), &b).unwrap(), 3.0);
        let b = WeightBudget::new(1.0, 1.5, 3).unwrap();
        assert_eq!(weighted_sup(&sv(&[0.0, 1.0, 2.0]), &b).unwrap(), 2.5);
        let b = WeightBudget::new(0.7, 2.3, 5).unwrap();
        let got = weighted_sup(&sv(&[1.25; 5]), &b).unwrap();
        assert!((got - 2.3 * 1.25).abs() < 1e-14);
        assert!(WeightBudget::new(1.0, 3.5, 3).is_err());
        assert!(weighted_sup(&sv(&[0.0, 1.0]), &WeightBudget::new(1.0, 1.0, 3).unwrap()).is_err());
    }

    #[test]
    fn weighted_bound_examples() {
        let b = WeightBudget::new(1.0, 2.0, 3).unwrap();
        let s = sv(&[0.0, 1.0, 2.0]);
        let bound = weighted_lower_bound(&s, &b, 2).unwrap();
        assert_eq!(bound, 1.0);
        assert!(bound <= weighted_sup(&s, &b).unwrap());
        assert!(bound <= weighted_inf(&s, &b).unwrap());

        let c = sv(&[0.5; 4]);
        let b = WeightBudget::new(1.5, 3.0, 4).unwrap();
        for m in 1..4 {
            assert!((weighted_lower_bound(&c, &b, m).unwrap() - 1.5).abs() < 1e-14);
        }
        assert_eq!(weighted_sup(&c, &b).unwrap(), 1.5);

        let b = WeightBudget::new(1.0, 3.0, 4).unwrap();
        assert_eq!(weighted_lower_bound(&sv(&[0.0, 0.0, 1.0, 1.0]), &b, 3).unwrap(), 1.0);
        assert!(weighted_lower_bound(&sv(&[0.0, 0.0, 1.0, 1.0]), &b, 4).is_err());
        let full = WeightBudget::new(1.0, 4.0, 4).unwrap();
        assert_eq!(weighted_lower_bound(&sv(&[0.0, 0.0, 1.0, 1.0]), &full, 4).unwrap(), 2.0);
        assert!(weighted_lower_bound(&sv(&[0.0, 0.0, 1.0, 1.0]), &b, 0).is_err());
    }

    #[test]
    fn scaled_partial_sum_examples() {
        let b = WeightBudget::new(1.0, 2.0, 3).unwrap();
        assert_eq!(scaled_partial_sum(&sv(&[0.0, 1.0, 2.0]), &b).unwrap(), 1.0);
        let b = WeightBudget::new(2.0, 4.0, 4).unwrap();
        assert_eq!(scaled_partial_sum(&sv(&[0.0, 0.0, 1.0, 1.0]), &b).unwrap(), 0.0);
        let b = WeightBudget::new(1.0, 2.5, 4).unwrap();
        assert!((scaled_partial_sum(&sv(&[3.0; 4]), &b).unwrap() - 7.5).abs() < 1e-14);
        // S/Ω below one is outside the partial-sum domain
        let b = WeightBudget::new(2.0, 1.0, 4).unwrap();
        assert!(scaled_partial_sum(&sv(&[3.0; 4]), &b).is_err());
    }

    #[test]
    fn cp_examples() {
        let c1 = coeff_cp(4, 1).unwrap();
        assert!((c1.c_p - 2.7).abs() < 1e-14);
        let c2 = coeff_cp(4, 2).unwrap();
        assert!((c2.c_p - 4.5).abs() < 1e-14);
        assert!(c2.c_p > 3.0);
        assert!(coeff_cp(4, 3).is_err());
        assert!(coeff_cp(2, 1).is_err());
        assert!((coeff_c1_prime(3).unwrap() - 3.0).abs() < 1e-14);
        assert!((coeff_c1_prime(4).unwrap() - 27.0 / 7.0).abs() < 1e-14);
        assert!((coeff_c1_prime(10).unwrap() - 13.5 * 12.0 / 19.0).abs() < 1e-13);
    }

    #[test]
    fn closed_forms_of_c1_and_c2() {
        for n in 3..=64 {
            let nf = n as f64;
            let c1 = 1.5 * nf * (nf * nf + nf - 2.0) / (3.0 * nf * nf - nf - 4.0);
            let c2 = 3.0 * nf * (nf + 2.0) * (nf - 2.0) / (4.0 * nf * nf - 6.0 * nf - 8.0);
            assert!((cp_value(nf, 1.0) - c1).abs() < 1e-12 * c1);
            assert!((cp_value(nf, 2.0) - c2).abs() < 1e-12 * c2);
            assert!(c1 <= 0.75 * nf && 0.75 * nf < c2, "n={n}");
            assert!(coeff_c1_prime(n).unwrap() >= 0.75 * nf);
            for p in 1..n / 2 {
                assert!(coeff_cp(n, p + 1).unwrap().c_p > coeff_cp(n, p).unwrap().c_p);
            }
        }
    }

    #[test]
    fn form_degree_examples() {
        let n = 4;
        let n2 = 9;
        let kappa = 0.8;
        let constant = sv(&vec![kappa; n2]);
        for h in [
            FormHypothesis::ThreeQuartersN,
            FormHypothesis::DegreeCoefficient { p: 1 },
            FormHypothesis::DegreeCoefficient { p: 2 },
        ] {
            assert!(form_degree_bound(&constant, n, h, kappa, 1e-9).unwrap());
        }
        let mut bad = vec![1.0; n2];
        bad[0] = -50.0;
        assert!(!form_degree_bound(&sv(&bad), n, FormHypothesis::ThreeQuartersN, 0.0, 1e-9).unwrap());
        assert!(form_degree_bound(&sv(&[1.0; 6]), n, FormHypothesis::ThreeQuartersN, 0.0, 1e-9).is_err());
    }

    #[test]
    fn greedy_matches_vertex_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..2_000 {
            let n = rng.random_range(1..=8);
            let nu: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let omega = rng.random_range(0.1..2.0);
            let ratio = [1.0, 1.5, 2.0, 2.5, 3.0][rng.random_range(0..5)];
            let ratio = f64::min(ratio, n as f64);
            let total = ratio * omega;
            let b = WeightBudget::new(omega, total, n).unwrap();
            let s = sv(&nu);
            let sup = weighted_sup(&s, &b).unwrap();
            assert!((sup - vertex_max(&nu, omega, total)).abs() < 1e-9);
            let neg: Vec<f64> = nu.iter().map(|x| -x).collect();
            let inf = weighted_inf(&s, &b).unwrap();
            assert!((inf + vertex_max(&neg, omega, total)).abs() < 1e-9);
            for _ in 0..5 {
                let w = random_weights(&mut rng, n, omega, total);
                let val: f64 = w.iter().zip(&nu).map(|(a, b)| a * b).sum();
                assert!(val <= sup + 1e-9 && val >= inf - 1e-9);
            }
        }
    }
}
