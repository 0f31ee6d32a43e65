//! Turns an ordered curvature spectrum and a pinching parameter `ε` into
//! positivity statements, vanishing ranges for Betti numbers and
//! topological verdict labels.
//!
//! Each verdict lists the inequalities it was derived from, with their
//! numeric values, so a report can be audited without rerunning anything.

use serde::Serialize;

use crate::cones::{in_positivity_cone_extended, in_shifted_cone, ConeMembership};
use crate::curvature::{OperatorKind, Spectrum};
use crate::error::{Error, Result};
use crate::inclusion::{epsilon_to_params, m_for_epsilon};
use crate::symfun::SortedVector;
use crate::weighted::coeff_cp;

/// Pinching threshold for one verdict, with the `m_ε` value it produces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Threshold {
    pub id: &'static str,
    /// Eigenvalue count `N` the threshold refers to.
    pub big_n: usize,
    pub epsilon: f64,
    pub target_m: f64,
    /// `m_ε` recomputed at `epsilon`.
    pub m_at_threshold: f64,
    /// The threshold is at least 1, so every admissible `ε` qualifies.
    pub vacuous: bool,
}

impl Threshold {
    fn new(id: &'static str, big_n: usize, epsilon: f64, target_m: f64) -> Self {
        Threshold {
            id,
            big_n,
            epsilon,
            target_m,
            m_at_threshold: m_for_epsilon(epsilon, big_n),
            vacuous: epsilon >= 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdTable {
    pub n: usize,
    pub first_kind: Threshold,
    pub second_kind: Threshold,
    pub kaehler: Option<KaehlerThresholds>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KaehlerThresholds {
    pub n_complex: usize,
    pub rational_cohomology: Threshold,
    pub biholomorphic: Threshold,
}

pub const ID_FIRST_KIND: &str = "first-kind-spherical-space-form";
pub const ID_SECOND_KIND: &str = "second-kind-spherical-space-form";
pub const ID_KAEHLER_RATIONAL: &str = "kaehler-rational-cohomology-cpn";
pub const ID_KAEHLER_BIHOLOMORPHIC: &str = "kaehler-biholomorphic-cpn";

fn first_kind_count(n: usize) -> usize {
    n * (n - 1) / 2
}

fn second_kind_count(n: usize) -> usize {
    (n - 1) * (n + 2) / 2
}

/// `√(2/((N₁−1)(N₁−2)))`.
pub fn eps_first_kind(n: usize) -> Result<f64> {
    check_real_dim(n)?;
    let big = first_kind_count(n) as f64;
    Ok((2.0 / ((big - 1.0) * (big - 2.0))).sqrt())
}

/// `√(3/((N₂−1)(N₂−3)))`.
pub fn eps_second_kind(n: usize) -> Result<f64> {
    check_real_dim(n)?;
    let big = second_kind_count(n) as f64;
    Ok((3.0 / ((big - 1.0) * (big - 3.0))).sqrt())
}

/// `√((3n−2)/((n³−3n+2)(n²−1)))` for complex dimension `n`.
pub fn eps_kaehler_rational(n: usize) -> Result<f64> {
    check_complex_dim(n)?;
    let nf = n as f64;
    Ok(((3.0 * nf - 2.0) / ((nf.powi(3) - 3.0 * nf + 2.0) * (nf * nf - 1.0))).sqrt())
}

/// `√(2/((n²−1)(n²−2)))` for complex dimension `n`.
pub fn eps_kaehler_biholomorphic(n: usize) -> Result<f64> {
    check_complex_dim(n)?;
    let n2 = (n * n) as f64;
    Ok((2.0 / ((n2 - 1.0) * (n2 - 2.0))).sqrt())
}

fn check_real_dim(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::domain(format!("dimension n = {n} must be at least 3")));
    }
    Ok(())
}

fn check_complex_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("complex dimension n = {n} must be at least 2")));
    }
    Ok(())
}

pub fn kaehler_thresholds(n_complex: usize) -> Result<KaehlerThresholds> {
    let nf = n_complex as f64;
    let big = n_complex * n_complex;
    Ok(KaehlerThresholds {
        n_complex,
        rational_cohomology: Threshold::new(
            ID_KAEHLER_RATIONAL,
            big,
            eps_kaehler_rational(n_complex)?,
            3.0 - 2.0 / nf,
        ),
        biholomorphic: Threshold::new(ID_KAEHLER_BIHOLOMORPHIC, big, eps_kaehler_biholomorphic(n_complex)?, 2.0),
    })
}

pub fn thresholds(n: usize, kaehler_complex_dim: Option<usize>) -> Result<ThresholdTable> {
    check_real_dim(n)?;
    Ok(ThresholdTable {
        n,
        first_kind: Threshold::new(ID_FIRST_KIND, first_kind_count(n), eps_first_kind(n)?, 2.0),
        second_kind: Threshold::new(ID_SECOND_KIND, second_kind_count(n), eps_second_kind(n)?, 3.0),
        kaehler: kaehler_complex_dim.map(kaehler_thresholds).transpose()?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = "<=")]
    AtMost,
}

/// `lhs > rhs + tolerance` or `lhs ≤ rhs + tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckedInequality {
    pub description: String,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub tolerance: f64,
    pub holds: bool,
}

impl CheckedInequality {
    fn new(description: impl Into<String>, lhs: f64, relation: Relation, rhs: f64, tolerance: f64) -> Self {
        let holds = match relation {
            Relation::Greater => lhs > rhs + tolerance,
            Relation::AtMost => lhs <= rhs + tolerance,
        };
        CheckedInequality {
            description: description.into(),
            lhs,
            relation,
            rhs,
            tolerance,
            holds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    SphericalSpaceForm,
    RationalCohomologyCpn,
    BiholomorphicCpn,
}

impl VerdictKind {
    pub fn label(self) -> &'static str {
        match self {
            VerdictKind::SphericalSpaceForm => "spherical_space_form",
            VerdictKind::RationalCohomologyCpn => "rational_cohomology_CPn",
            VerdictKind::BiholomorphicCpn => "biholomorphic_CPn",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub result: &'static str,
    pub checks: Vec<CheckedInequality>,
}

/// Betti numbers `b_low, …, b_high` vanish.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BettiRange {
    pub low: usize,
    pub high: usize,
    pub rule: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityRecord {
    pub m: f64,
    pub member: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub operator: OperatorKind,
    /// Real dimension, or complex dimension for Kähler spectra.
    pub n: usize,
    pub eigenvalue_count: usize,
    pub epsilon: f64,
    pub alpha_eps: f64,
    pub m_eps: f64,
    /// Membership in the shifted cone `Γ⁺_2(α_ε)`.
    pub hypothesis: ConeMembership,
    /// Membership in `P_{m_ε}`.
    pub m_positivity: PositivityRecord,
    pub betti_zero_ranges: Vec<BettiRange>,
    /// Empty when no verdict applies.
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub fn has_verdict(&self, kind: VerdictKind) -> bool {
        self.verdicts.iter().any(|v| v.kind == kind)
    }

    /// Verdict labels, or `["none"]`.
    pub fn verdict_labels(&self) -> Vec<&'static str> {
        if self.verdicts.is_empty() {
            vec!["none"]
        } else {
            self.verdicts.iter().map(|v| v.kind.label()).collect()
        }
    }
}

/// Shared front half: cone hypothesis and `m_ε` positivity. Returns the
/// report skeleton and whether the open hypothesis holds.
fn skeleton(
    values: &SortedVector,
    operator: OperatorKind,
    n: usize,
    epsilon: f64,
    tol: f64,
) -> Result<(ClassificationReport, bool)> {
    let big_n = values.len();
    let params = epsilon_to_params(epsilon, big_n)?;
    let v = values.to_real_vector();
    let hypothesis = in_shifted_cone(&v, 2, &params.shift_params(), tol)?;
    let positivity = in_positivity_cone_extended(&v, params.m_eps, tol)?;
    let mut notes = Vec::new();
    let open = hypothesis.member_open;
    if !hypothesis.member_closed {
        notes.push("spectrum is not in the shifted cone; no conclusions".to_string());
    } else if !open {
        notes.push(
            "spectrum lies on the boundary of the shifted cone; conclusions need strict membership".to_string(),
        );
    } else if !positivity.member_open {
        notes.push(format!(
            "inconsistent: shifted-cone member without m_eps-positivity (margin {:e})",
            positivity.margin
        ));
    }
    let report = ClassificationReport {
        operator,
        n,
        eigenvalue_count: big_n,
        epsilon,
        alpha_eps: params.alpha_eps,
        m_eps: params.m_eps,
        hypothesis,
        m_positivity: PositivityRecord {
            m: params.m_eps,
            member: positivity.member_open,
            margin: positivity.margin,
        },
        betti_zero_ranges: Vec::new(),
        verdicts: Vec::new(),
        notes,
    };
    Ok((report, open && positivity.member_open))
}

fn head_sum(values: &[f64], weights: &[f64]) -> f64 {
    values.iter().zip(weights).map(|(x, w)| x * w).sum()
}

fn eps_check(epsilon: f64, threshold: f64, tol: f64) -> CheckedInequality {
    CheckedInequality::new("epsilon <= threshold", epsilon, Relation::AtMost, threshold, tol)
}

fn positivity_check(description: &str, values: &SortedVector, weights: &[f64], tol: f64) -> CheckedInequality {
    CheckedInequality::new(
        description,
        head_sum(values.entries(), weights),
        Relation::Greater,
        0.0,
        tol * values.norm(),
    )
}

/// `⌈m⌉`, ignoring an excess of `m` over an integer below the tolerance.
fn ceil_tol(m: f64, tol: f64) -> usize {
    (m - tol * m.max(1.0)).ceil().max(1.0) as usize
}

fn expect_kind(spectrum: &Spectrum, kind: OperatorKind) -> Result<()> {
    if spectrum.kind() != kind {
        return Err(Error::domain(format!(
            "expected a {} spectrum, got {}",
            kind.name(),
            spectrum.kind().name()
        )));
    }
    Ok(())
}

fn push_verdict(report: &mut ClassificationReport, kind: VerdictKind, result: &'static str, checks: Vec<CheckedInequality>) {
    let (eps, rest) = checks.split_first().expect("threshold check first");
    if !eps.holds {
        return;
    }
    if rest.iter().all(|c| c.holds) {
        report.verdicts.push(Verdict { kind, result, checks });
    } else {
        report.notes.push(format!(
            "inconsistent: {} threshold holds but its positivity consequence fails",
            kind.label()
        ));
    }
}

/// Classification for a spectrum of the curvature operator on 2-forms.
pub fn classify_first_kind(spectrum: &Spectrum, epsilon: f64, tol: f64) -> Result<ClassificationReport> {
    expect_kind(spectrum, OperatorKind::FirstKind)?;
    let n = spectrum.dim();
    check_real_dim(n)?;
    let (mut report, holds) = skeleton(spectrum.eigenvalues(), OperatorKind::FirstKind, n, epsilon, tol)?;
    if !holds {
        return Ok(report);
    }
    let k = ceil_tol(report.m_eps, tol);
    let half_up = n.div_ceil(2);
    if k <= half_up {
        report.betti_zero_ranges.push(BettiRange {
            low: 1,
            high: n - 1,
            rule: format!("ceil(m_eps) = {k} <= ceil(n/2) = {half_up}"),
        });
        if n % 2 == 1 && k == half_up {
            report.notes.push(format!(
                "case boundary: ceil(m_eps) = {k} exceeds floor(n/2) = {}; under that stricter boundary only the split ranges would follow",
                n / 2
            ));
        }
    } else if k < n {
        let rule = format!("ceil(n/2) < ceil(m_eps) = {k} <= n - 1");
        report.betti_zero_ranges.push(BettiRange {
            low: 1,
            high: n - k,
            rule: rule.clone(),
        });
        report.betti_zero_ranges.push(BettiRange { low: k, high: n - 1, rule });
    }
    let threshold = eps_first_kind(n)?;
    push_verdict(
        &mut report,
        VerdictKind::SphericalSpaceForm,
        ID_FIRST_KIND,
        vec![
            eps_check(epsilon, threshold, tol),
            positivity_check("lambda_1 + lambda_2 > 0", spectrum.eigenvalues(), &[1.0, 1.0], tol),
        ],
    );
    Ok(report)
}

/// Classification for a spectrum of the curvature operator of the second kind.
pub fn classify_second_kind(spectrum: &Spectrum, epsilon: f64, tol: f64) -> Result<ClassificationReport> {
    expect_kind(spectrum, OperatorKind::SecondKind)?;
    let n = spectrum.dim();
    check_real_dim(n)?;
    let (mut report, holds) = skeleton(spectrum.eigenvalues(), OperatorKind::SecondKind, n, epsilon, tol)?;
    if !holds {
        return Ok(report);
    }
    let m = report.m_eps;
    let slack = tol * m.max(1.0);
    let three_quarters = 0.75 * n as f64;
    if m <= three_quarters + slack {
        report.betti_zero_ranges.push(BettiRange {
            low: 1,
            high: n - 1,
            rule: format!("m_eps <= 3n/4 = {three_quarters}"),
        });
    }
    for p in 1..=n / 2 {
        let c = coeff_cp(n, p)?.c_p;
        if m <= c + slack {
            report.betti_zero_ranges.push(BettiRange {
                low: p,
                high: n - p,
                rule: format!("m_eps <= C_{p}(n) = {c}"),
            });
        }
    }
    let threshold = eps_second_kind(n)?;
    push_verdict(
        &mut report,
        VerdictKind::SphericalSpaceForm,
        ID_SECOND_KIND,
        vec![
            eps_check(epsilon, threshold, tol),
            positivity_check("nu_1 + nu_2 + nu_3 > 0", spectrum.eigenvalues(), &[1.0, 1.0, 1.0], tol),
        ],
    );
    Ok(report)
}

/// Classification for the `n²` eigenvalues of a Kähler curvature operator in
/// complex dimension `n_complex`.
pub fn classify_kaehler(
    values: &SortedVector,
    n_complex: usize,
    epsilon: f64,
    tol: f64,
) -> Result<ClassificationReport> {
    check_complex_dim(n_complex)?;
    let want = n_complex * n_complex;
    if values.len() != want {
        return Err(Error::domain(format!(
            "Kaehler spectrum for n = {n_complex} needs {want} eigenvalues, got {}",
            values.len()
        )));
    }
    let (mut report, holds) = skeleton(values, OperatorKind::Kaehler, n_complex, epsilon, tol)?;
    if !holds {
        return Ok(report);
    }
    let third = 1.0 - 2.0 / n_complex as f64;
    push_verdict(
        &mut report,
        VerdictKind::RationalCohomologyCpn,
        ID_KAEHLER_RATIONAL,
        vec![
            eps_check(epsilon, eps_kaehler_rational(n_complex)?, tol),
            positivity_check("rho_1 + rho_2 + (1 - 2/n) rho_3 > 0", values, &[1.0, 1.0, third], tol),
        ],
    );
    push_verdict(
        &mut report,
        VerdictKind::BiholomorphicCpn,
        ID_KAEHLER_BIHOLOMORPHIC,
        vec![
            eps_check(epsilon, eps_kaehler_biholomorphic(n_complex)?, tol),
            positivity_check("rho_1 + rho_2 > 0", values, &[1.0, 1.0], tol),
        ],
    );
    Ok(report)
}

/// Dispatches on the spectrum's kind.
pub fn classify(spectrum: &Spectrum, epsilon: f64, tol: f64) -> Result<ClassificationReport> {
    match spectrum.kind() {
        OperatorKind::FirstKind => classify_first_kind(spectrum, epsilon, tol),
        OperatorKind::SecondKind => classify_second_kind(spectrum, epsilon, tol),
        OperatorKind::Kaehler => classify_kaehler(spectrum.eigenvalues(), spectrum.dim(), epsilon, tol),
        OperatorKind::Generic => Err(Error::domain("generic spectra carry no classification")),
    }
}
