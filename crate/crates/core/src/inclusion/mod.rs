//! The ε-parametrized shift/positivity pair and the inclusion
//! `Γ̄⁺_2(α_ε) ⊆ P̄_{m_ε}` with its equality case.
//!
//! For `0 < ε < 1` and `N ≥ 2`:
//!
//! ```text
//! α_ε = (1 − ε) / N,    m_ε = N (N − 1) ε² / (1 + (N − 1) ε²)
//! ```
//!
//! Every `V` in the closed shifted cone with positive sum has a non-negative
//! `m_ε` partial sum, and the partial sum vanishes only for the rigid pattern
//! `(0, …, 0, c, …, c)` with exactly `m_ε` zeros.

mod sampling;
mod search;

pub use sampling::{verify_inclusion_sampling, InclusionReport, InclusionViolation, Sampler, SamplingConfig};
pub use search::{boundary_search, BoundaryReport, SearchConfig, RIGID_MATCH_TOL};

use serde::Serialize;

use crate::cones::{in_shifted_cone, ShiftParams};
use crate::error::{Error, Result};
use crate::symfun::{elementary_symmetric, weighted_partial_sum, RealVector};

/// `m_ε` as a bare formula, without the `0 < ε < 1` check.
pub fn m_for_epsilon(epsilon: f64, n: usize) -> f64 {
    let n = n as f64;
    let e2 = epsilon * epsilon;
    n * (n - 1.0) * e2 / (1.0 + (n - 1.0) * e2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonParams {
    pub epsilon: f64,
    pub n: usize,
    pub alpha_eps: f64,
    pub m_eps: f64,
}

impl EpsilonParams {
    pub fn shift_params(&self) -> ShiftParams {
        ShiftParams::new(self.alpha_eps, self.n).expect("alpha_eps lies in (0, 1/N)")
    }

    /// `(1 + (N − 1) ε²) / N`, the coefficient of `μ̄²` in the σ₂ identity.
    pub fn quadratic_coefficient(&self) -> f64 {
        let n = self.n as f64;
        (1.0 + (n - 1.0) * self.epsilon * self.epsilon) / n
    }

    /// `Some(k)` when `m_ε` equals the positive integer `k` up to `tol`.
    pub fn integer_m(&self, tol: f64) -> Option<usize> {
        let k = self.m_eps.round();
        if k >= 1.0 && (self.m_eps - k).abs() <= tol * k {
            Some(k as usize)
        } else {
            None
        }
    }
}

pub fn epsilon_to_params(epsilon: f64, n: usize) -> Result<EpsilonParams> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!("epsilon = {epsilon} must lie in (0, 1)")));
    }
    if n < 2 {
        return Err(Error::domain(format!("N = {n} must be at least 2")));
    }
    Ok(EpsilonParams {
        epsilon,
        n,
        alpha_eps: (1.0 - epsilon) / n as f64,
        m_eps: m_for_epsilon(epsilon, n),
    })
}

/// Inverse of the `ε ↦ m_ε` map: `ε = √(m / ((N − 1)(N − m)))`.
pub fn epsilon_for_target_m(m_target: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("N = {n} must be at least 2")));
    }
    let nf = n as f64;
    if !(m_target > 0.0 && m_target < nf - 1.0) {
        return Err(Error::domain(format!(
            "target m = {m_target} must lie in (0, {})",
            n - 1
        )));
    }
    Ok((m_target / ((nf - 1.0) * (nf - m_target))).sqrt())
}

/// `2σ₂(V_{α_ε}) − [((1 + (N−1)ε²)/N) μ̄² − Σμ_i²]`, zero up to rounding.
pub fn shifted_ball_residual(v: &RealVector, p: &EpsilonParams) -> Result<f64> {
    check_len(v, p)?;
    let shifted = crate::cones::shift(v, &p.shift_params())?;
    let lhs = 2.0 * elementary_symmetric(&shifted, 2)?;
    let total = v.sum();
    let squares: f64 = v.as_slice().iter().map(|x| x * x).sum();
    Ok(lhs - (p.quadratic_coefficient() * total * total - squares))
}

fn check_len(v: &RealVector, p: &EpsilonParams) -> Result<()> {
    if v.len() != p.n {
        return Err(Error::domain(format!(
            "vector length {} does not match N = {}",
            v.len(),
            p.n
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DichotomyCase {
    /// Member with a strictly positive `m_ε` partial sum.
    StrictPositive,
    /// Member on the equality locus: `m_ε` zeros followed by equal positive entries.
    BoundaryRigid,
    /// Outside the closed shifted cone.
    NotMember,
    /// The origin, a closed member with every quantity zero.
    ZeroVector,
    /// Closed member whose partial sum is non-positive but which does not
    /// match the rigid pattern; only reachable through rounding.
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyVerdict {
    pub case: DichotomyCase,
    /// The `m_ε` partial sum of the sorted input.
    pub c0: f64,
    /// `c0 / (m_ε ‖v‖₂)`, the quantity compared against `tol`.
    pub c0_margin: f64,
    pub rigid_m: Option<usize>,
    /// Margin of the input in the shifted cone `Γ⁺_2(α_ε)`.
    pub cone_margin: f64,
}

/// Classifies `v` against the inclusion and its equality case.
pub fn dichotomy_check(v: &RealVector, p: &EpsilonParams, tol: f64) -> Result<DichotomyVerdict> {
    check_len(v, p)?;
    let membership = in_shifted_cone(v, 2, &p.shift_params(), tol)?;
    let sorted = v.sorted();
    let norm = v.norm();
    let c0 = weighted_partial_sum(sorted.entries(), p.m_eps);
    let c0_margin = if norm == 0.0 { 0.0 } else { c0 / (p.m_eps * norm) };
    let verdict = |case, rigid_m| DichotomyVerdict {
        case,
        c0,
        c0_margin,
        rigid_m,
        cone_margin: membership.margin,
    };

    if norm == 0.0 {
        return Ok(verdict(DichotomyCase::ZeroVector, None));
    }
    // a zero sum forces V = 0 for closed members, so any other such input is outside
    let mean_margin = v.sum() / (norm * (v.len() as f64).sqrt());
    if !membership.member_closed || mean_margin <= tol {
        return Ok(verdict(DichotomyCase::NotMember, None));
    }
    if c0_margin > tol {
        return Ok(verdict(DichotomyCase::StrictPositive, None));
    }
    if c0_margin >= -tol {
        if let Some(k) = p.integer_m(tol) {
            // partial sums of size δ allow entries of size O(√δ) off the pattern
            if rigid_pattern_deviation(sorted.entries(), k) <= tol.sqrt() {
                return Ok(verdict(DichotomyCase::BoundaryRigid, Some(k)));
            }
        }
    }
    Ok(verdict(DichotomyCase::Inconsistent, None))
}

/// Largest entrywise distance, relative to `‖v‖₂`, between a sorted vector
/// and the closest pattern `(0, …, 0, c, …, c)` with `zeros` leading zeros.
/// Infinite when the tail mean is not positive.
pub fn rigid_pattern_deviation(sorted: &[f64], zeros: usize) -> f64 {
    let n = sorted.len();
    if zeros == 0 || zeros >= n {
        return f64::INFINITY;
    }
    let norm = crate::symfun::norm2(sorted);
    if norm == 0.0 {
        return f64::INFINITY;
    }
    let tail = &sorted[zeros..];
    let c = tail.iter().sum::<f64>() / tail.len() as f64;
    if c <= 0.0 {
        return f64::INFINITY;
    }
    let head_dev = sorted[..zeros].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let tail_dev = tail.iter().fold(0.0_f64, |m, x| m.max((x - c).abs()));
    head_dev.max(tail_dev) / norm
}

/// The rigid vector `(0, …, 0, 1, …, 1)` with `m` zeros.
pub fn sharp_witness(n: usize, m: usize) -> Result<RealVector> {
    if n < 2 || m == 0 || m >= n {
        return Err(Error::domain(format!("m = {m} must lie in [1, {}]", n.saturating_sub(1))));
    }
    let entries = (0..n).map(|i| if i < m { 0.0 } else { 1.0 }).collect();
    RealVector::new(entries)
}
