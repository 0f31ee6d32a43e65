//! Randomized verification of `Γ⁺_2(α_ε) ⊆ P_{m_ε}`.
//!
//! On the slice `μ̄ = 1` the shifted cone is a Euclidean ball around
//! `(1/N, …, 1/N)` inside the hyperplane, of radius `ε √((N − 1)/N)`; this
//! follows from the σ₂ identity. Rejection sampling from an isotropic
//! Gaussian accepts with probability `P(T_{N−1} > 1/ε)` for a Student-t
//! variable, which is astronomically small for large `N` and small `ε`, so a
//! hit-and-run chain on that ball is available as well. Every candidate from
//! either sampler is re-tested with the cone membership routine before it is
//! counted.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{epsilon_to_params, EpsilonParams};
use crate::cones::{in_positivity_cone_extended, in_shifted_cone, task_rng};
use crate::error::Result;
use crate::symfun::RealVector;

/// Members gathered per independently seeded task.
const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    Rejection,
    HitAndRun,
    /// Rejection when its acceptance probability is at least
    /// [`SamplingConfig::min_rejection_rate`], hit-and-run otherwise.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingConfig {
    pub sampler: Sampler,
    pub tol: f64,
    /// Proposal budget per requested member for the rejection sampler.
    pub max_proposals_per_member: usize,
    pub min_rejection_rate: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            sampler: Sampler::Auto,
            tol: crate::cones::DEFAULT_TOL,
            max_proposals_per_member: 1000,
            min_rejection_rate: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionViolation {
    pub margin: f64,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionReport {
    pub n: usize,
    pub epsilon: f64,
    pub alpha_eps: f64,
    pub m_eps: f64,
    pub seed: u64,
    pub sampler: Sampler,
    pub requested: usize,
    pub proposals: usize,
    pub accepted: usize,
    pub acceptance_rate: f64,
    /// Smallest normalized `m_ε` partial sum among accepted members.
    pub min_margin: Option<f64>,
    pub violations: Vec<InclusionViolation>,
}

impl InclusionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn complete(&self) -> bool {
        self.accepted == self.requested
    }
}

/// Probability that an isotropic Gaussian vector lands in `Γ⁺_2(α_ε)`.
pub fn rejection_acceptance_probability(n: usize, epsilon: f64) -> f64 {
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("N >= 2");
    t.sf(1.0 / epsilon)
}

/// Draws `samples` members of `Γ⁺_2(α_ε)` and checks that each lies in the
/// open cone `P_{m_ε}`.
pub fn verify_inclusion_sampling(
    n: usize,
    epsilon: f64,
    samples: usize,
    seed: u64,
    config: &SamplingConfig,
) -> Result<InclusionReport> {
    let params = epsilon_to_params(epsilon, n)?;
    let sampler = match config.sampler {
        Sampler::Auto => {
            if rejection_acceptance_probability(n, epsilon) >= config.min_rejection_rate {
                Sampler::Rejection
            } else {
                Sampler::HitAndRun
            }
        }
        s => s,
    };

    let chunks = samples.div_ceil(CHUNK);
    let results: Vec<ChunkResult> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let quota = CHUNK.min(samples - c * CHUNK);
            let mut rng = task_rng(seed, c as u64);
            run_chunk(&params, sampler, quota, &mut rng, config)
        })
        .collect();

    let proposals: usize = results.iter().map(|r| r.proposals).sum();
    let accepted: usize = results.iter().map(|r| r.accepted).sum();
    let min_margin = results
        .iter()
        .filter_map(|r| r.min_margin)
        .reduce(f64::min);
    let violations = results.into_iter().flat_map(|r| r.violations).collect();
    Ok(InclusionReport {
        n,
        epsilon,
        alpha_eps: params.alpha_eps,
        m_eps: params.m_eps,
        seed,
        sampler,
        requested: samples,
        proposals,
        accepted,
        acceptance_rate: if proposals == 0 {
            0.0
        } else {
            accepted as f64 / proposals as f64
        },
        min_margin,
        violations,
    })
}

#[derive(Default)]
struct ChunkResult {
    proposals: usize,
    accepted: usize,
    min_margin: Option<f64>,
    violations: Vec<InclusionViolation>,
}

impl ChunkResult {
    /// Tests one candidate; returns whether it was a cone member.
    fn offer(&mut self, v: RealVector, params: &EpsilonParams, tol: f64) -> bool {
        self.proposals += 1;
        let member = in_shifted_cone(&v, 2, &params.shift_params(), tol)
            .expect("length matches")
            .member_open;
        if !member {
            return false;
        }
        self.accepted += 1;
        let target = in_positivity_cone_extended(&v, params.m_eps, tol).expect("m_eps in (0, N)");
        self.min_margin = Some(match self.min_margin {
            Some(m) => m.min(target.margin),
            None => target.margin,
        });
        if !target.member_open {
            self.violations.push(InclusionViolation {
                margin: target.margin,
                vector: v.into_inner(),
            });
        }
        true
    }
}

fn run_chunk(
    params: &EpsilonParams,
    sampler: Sampler,
    quota: usize,
    rng: &mut ChaCha8Rng,
    config: &SamplingConfig,
) -> ChunkResult {
    let mut out = ChunkResult::default();
    let n = params.n;
    match sampler {
        Sampler::Rejection | Sampler::Auto => {
            let budget = quota.saturating_mul(config.max_proposals_per_member);
            while out.accepted < quota && out.proposals < budget {
                let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                out.offer(RealVector::new(v).expect("finite"), params, config.tol);
            }
        }
        Sampler::HitAndRun => {
            let mut chain = BallChain::new(params);
            for _ in 0..10 * n {
                chain.step(rng);
            }
            let budget = quota.saturating_mul(config.max_proposals_per_member);
            while out.accepted < quota && out.proposals < budget {
                chain.step(rng);
                let scale = rng.sample::<f64, _>(StandardNormal).exp();
                out.offer(chain.point(scale), params, config.tol);
            }
        }
    }
    out
}

/// Hit-and-run on the ball `{w ⊥ 1, |w| < R}`, the cone's `μ̄ = 1` slice.
struct BallChain {
    n: usize,
    radius: f64,
    w: Vec<f64>,
}

impl BallChain {
    fn new(params: &EpsilonParams) -> Self {
        let n = params.n;
        let nf = n as f64;
        BallChain {
            n,
            radius: params.epsilon * ((nf - 1.0) / nf).sqrt(),
            w: vec![0.0; n],
        }
    }

    fn step(&mut self, rng: &mut ChaCha8Rng) {
        let mut d: Vec<f64> = (0..self.n).map(|_| rng.sample(StandardNormal)).collect();
        let mean = d.iter().sum::<f64>() / self.n as f64;
        d.iter_mut().for_each(|x| *x -= mean);
        let len = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len == 0.0 {
            return;
        }
        d.iter_mut().for_each(|x| *x /= len);
        // chord endpoints of w + t d on the sphere of the given radius
        let b: f64 = self.w.iter().zip(&d).map(|(a, b)| a * b).sum();
        let c = self.w.iter().map(|x| x * x).sum::<f64>() - self.radius * self.radius;
        let disc = (b * b - c).max(0.0).sqrt();
        let t = rng.random_range(-b - disc..=-b + disc);
        self.w.iter_mut().zip(&d).for_each(|(w, d)| *w += t * d);
    }

    fn point(&self, scale: f64) -> RealVector {
        let base = 1.0 / self.n as f64;
        RealVector::new(self.w.iter().map(|w| scale * (base + w)).collect()).expect("finite")
    }
}
