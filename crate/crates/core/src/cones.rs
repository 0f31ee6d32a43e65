//! Membership tests with signed margins for the Gårding cones, their shifted
//! versions and the m-positivity cones.
//!
//! Margins are normalized so that a single tolerance is meaningful across
//! dimensions and scales:
//!
//! * Gårding cones: `σ_j(v) / (C(N,j) · (‖v‖₂/√N)^j)`, minimized over `j ≤ k`.
//!   The constant vector with the same RMS as `v` has margin 1 for every `j`.
//! * m-positivity cones: `partial_sum(sorted(v), m) / (m · ‖v‖₂)`.
//!
//! An input is an open member when its margin exceeds `tol` and a closed
//! member when its margin is at least `-tol`. The zero vector is a closed
//! member of every cone and an open member of none.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symfun::{binomial, elementary_symmetric_all, weighted_partial_sum, RealVector};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BindingConstraint {
    /// `σ_order` attains the minimal normalized value.
    Sigma { order: usize },
    /// Source indices (0-based) of the entries entering the minimal partial sum.
    PartialSum { indices: Vec<usize> },
    /// Zero input: every constraint is tight.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeMembership {
    pub member_open: bool,
    pub member_closed: bool,
    pub margin: f64,
    pub binding_constraint: BindingConstraint,
}

impl ConeMembership {
    fn from_margin(margin: f64, binding_constraint: BindingConstraint, tol: f64) -> Self {
        ConeMembership {
            member_open: margin > tol,
            member_closed: margin >= -tol,
            margin,
            binding_constraint,
        }
    }

    fn degenerate(tol: f64) -> Self {
        Self::from_margin(0.0, BindingConstraint::Degenerate, tol)
    }
}

/// Shift parameter `α ∈ [0, 1/N)` for vectors of length `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftParams {
    alpha: f64,
    n: usize,
}

impl ShiftParams {
    pub fn new(alpha: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("N must be positive"));
        }
        if !(alpha >= 0.0 && alpha < 1.0 / n as f64) {
            return Err(Error::domain(format!(
                "alpha = {alpha} must lie in [0, 1/{n})"
            )));
        }
        Ok(ShiftParams { alpha, n })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// `V_α = V − α (Σμ_i) (1, …, 1)`.
pub fn shift(v: &RealVector, p: &ShiftParams) -> Result<RealVector> {
    if v.len() != p.n {
        return Err(Error::domain(format!(
            "vector length {} does not match N = {}",
            v.len(),
            p.n
        )));
    }
    let offset = p.alpha * v.sum();
    RealVector::new(v.as_slice().iter().map(|x| x - offset).collect())
}

fn check_order(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::domain(format!("k = {k} must lie in [1, {n}]")));
    }
    Ok(())
}

/// Memberships in `Γ⁺_1, …, Γ⁺_k` from a single pass of the σ recurrence.
pub fn garding_profile(v: &RealVector, k: usize, tol: f64) -> Result<Vec<ConeMembership>> {
    let n = v.len();
    check_order(k, n)?;
    let norm = v.norm();
    if norm == 0.0 {
        return Ok(vec![ConeMembership::degenerate(tol); k]);
    }
    let rms = norm / (n as f64).sqrt();
    let unit: Vec<f64> = v.as_slice().iter().map(|x| x / rms).collect();
    let sigma = elementary_symmetric_all(&unit, k);

    let mut out = Vec::with_capacity(k);
    let mut best = f64::INFINITY;
    let mut best_order = 1;
    for j in 1..=k {
        let value = sigma[j] / binomial(n, j);
        if value < best {
            best = value;
            best_order = j;
        }
        out.push(ConeMembership::from_margin(
            best,
            BindingConstraint::Sigma { order: best_order },
            tol,
        ));
    }
    Ok(out)
}

/// Membership in `Γ⁺_k = {σ_j > 0, j = 1..k}` and its closure.
pub fn in_garding_cone(v: &RealVector, k: usize, tol: f64) -> Result<ConeMembership> {
    Ok(garding_profile(v, k, tol)?.pop().expect("k >= 1"))
}

/// Membership of `v` in `Γ⁺_k(α)`, i.e. of `V_α` in `Γ⁺_k`.
pub fn in_shifted_cone(
    v: &RealVector,
    k: usize,
    p: &ShiftParams,
    tol: f64,
) -> Result<ConeMembership> {
    in_garding_cone(&shift(v, p)?, k, tol)
}

/// Membership in the m-positivity cone `P_m` for `m ∈ [1, N]`.
pub fn in_positivity_cone(v: &RealVector, m: f64, tol: f64) -> Result<ConeMembership> {
    let n = v.len();
    if !(m >= 1.0 && m <= n as f64) {
        return Err(Error::domain(format!("m = {m} must lie in [1, {n}]")));
    }
    Ok(positivity_membership(v, m, tol))
}

/// As [`in_positivity_cone`] but accepting `m ∈ (0, 1)`, where the defining
/// functional reduces to `m μ_1` and the cone coincides with `P_1`.
pub fn in_positivity_cone_extended(v: &RealVector, m: f64, tol: f64) -> Result<ConeMembership> {
    let n = v.len();
    if !(m > 0.0 && m <= n as f64) {
        return Err(Error::domain(format!("m = {m} must lie in (0, {n}]")));
    }
    Ok(positivity_membership(v, m, tol))
}

fn positivity_membership(v: &RealVector, m: f64, tol: f64) -> ConeMembership {
    // the minimum over index choices is attained by the smallest entries;
    // the norm is taken in sorted order so the margin is permutation invariant
    let sorted = v.sorted();
    let norm = sorted.norm();
    if norm == 0.0 {
        return ConeMembership::degenerate(tol);
    }
    let margin = weighted_partial_sum(sorted.entries(), m) / (m * norm);
    let used = (m.ceil() as usize).min(v.len());
    ConeMembership::from_margin(
        margin,
        BindingConstraint::PartialSum {
            indices: sorted.permutation()[..used].to_vec(),
        },
        tol,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NestingViolation {
    pub sample: usize,
    pub relation: String,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NestingReport {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub checks: usize,
    pub violations: Vec<NestingViolation>,
}

impl NestingReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Deterministic per-task generator: stream `task` of the seed.
pub(crate) fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

/// Samples random vectors and checks the nesting relations
/// `Γ⁺_{k+1} ⊆ Γ⁺_k`, `Γ⁺_{k+1}(α) ⊆ Γ⁺_k(α)`, `P_{m₁} ⊆ P_{m₂}` for
/// `m₁ ≤ m₂`, `Γ⁺_N = P_1` and `P_N = Γ⁺_1`.
///
/// A relation `A ⊆ B` is violated when a sample is an open member of `A`
/// but not a closed member of `B`.
pub fn nesting_check(n: usize, samples: usize, seed: u64, tol: f64) -> Result<NestingReport> {
    if n < 2 {
        return Err(Error::domain("nesting check needs N >= 2"));
    }
    let per_sample: Vec<(usize, Vec<NestingViolation>)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = task_rng(seed, i as u64);
            let (checks, violations) = nesting_sample(n, i, &mut rng, tol);
            (checks, violations)
        })
        .collect();
    let checks = per_sample.iter().map(|(c, _)| c).sum();
    let violations = per_sample.into_iter().flat_map(|(_, v)| v).collect();
    Ok(NestingReport {
        n,
        samples,
        seed,
        checks,
        violations,
    })
}

fn nesting_sample(
    n: usize,
    index: usize,
    rng: &mut ChaCha8Rng,
    tol: f64,
) -> (usize, Vec<NestingViolation>) {
    // a positive drift along (1,…,1) populates the higher-order cones
    let drift = rng.random_range(-1.0..4.0);
    let scale = 10f64.powf(rng.random_range(-3.0..3.0));
    let raw: Vec<f64> = (0..n)
        .map(|_| scale * (drift + rng.sample::<f64, _>(StandardNormal)))
        .collect();
    let v = RealVector::new(raw).expect("finite sample");
    let alpha = rng.random_range(0.0..1.0) / n as f64;
    let shift_params = ShiftParams::new(alpha, n).expect("alpha < 1/N");

    let mut checks = 0;
    let mut violations = Vec::new();
    let mut check = |inner: &ConeMembership, outer: &ConeMembership, relation: String| {
        checks += 1;
        if inner.member_open && !outer.member_closed {
            violations.push(NestingViolation {
                sample: index,
                relation,
                vector: v.as_slice().to_vec(),
            });
        }
    };

    let plain = garding_profile(&v, n, tol).expect("k = N");
    let shifted = garding_profile(&shift(&v, &shift_params).expect("len"), n, tol).expect("k = N");
    for k in 1..n {
        check(&plain[k], &plain[k - 1], format!("G{}<=G{}", k + 1, k));
        check(&shifted[k], &shifted[k - 1], format!("G{}(a)<=G{}(a)", k + 1, k));
    }

    let a: f64 = rng.random_range(1.0..=n as f64);
    let b: f64 = rng.random_range(1.0..=n as f64);
    let (m1, m2) = if a <= b { (a, b) } else { (b, a) };
    let p1 = positivity_membership(&v, m1, tol);
    let p2 = positivity_membership(&v, m2, tol);
    check(&p1, &p2, format!("P{m1}<=P{m2}"));
    let mut prev = positivity_membership(&v, 1.0, tol);
    for m in 2..=n {
        let cur = positivity_membership(&v, m as f64, tol);
        check(&prev, &cur, format!("P{}<=P{}", m - 1, m));
        prev = cur;
    }

    let p_one = positivity_membership(&v, 1.0, tol);
    let p_full = positivity_membership(&v, n as f64, tol);
    check(&plain[n - 1], &p_one, format!("G{n}<=P1"));
    check(&p_one, &plain[n - 1], format!("P1<=G{n}"));
    check(&plain[0], &p_full, format!("G1<=P{n}"));
    check(&p_full, &plain[0], format!("P{n}<=G1"));

    (checks, violations)
}
