//! The `gardinglab` command line.
//!
//! Exit codes: 0 success, 1 and 2 command-specific negative outcomes, 3 a
//! failed scalar-curvature identity, 64 usage errors, 65 malformed input,
//! 66 unreadable input, 70 numeric failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::classify::{self, ClassificationReport};
use crate::cones::{in_garding_cone, in_positivity_cone_extended, in_shifted_cone, ConeMembership, ShiftParams};
use crate::curvature::{
    assemble_first_kind, assemble_second_kind, eigen_spectrum, scalar_curvature_checks, CurvatureTensor,
    OperatorKind, Spectrum,
};
use crate::error::{Error, Result};
use crate::inclusion::{
    boundary_search, epsilon_for_target_m, epsilon_to_params, verify_inclusion_sampling, Sampler,
    SamplingConfig, SearchConfig,
};
use crate::io::{format_csv, format_f64, parse_tensor_components, parse_vector, read_input, write_json_line};
use crate::symfun::RealVector;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_SOFTWARE: i32 = 70;
pub const EXIT_IDENTITY: i32 = 3;

pub const CONFIG_ENV: &str = "GARDINGLAB_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Human,
    Machine,
}

/// Settings shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tol: f64,
    pub seed: u64,
    pub samples: usize,
    pub restarts: usize,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tol: crate::cones::DEFAULT_TOL,
            seed: 0,
            samples: 100_000,
            restarts: 32,
            format: OutputFormat::Human,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::domain(format!("tol = {} must be positive", self.tol)));
        }
        if self.restarts == 0 {
            return Err(Error::domain("restarts must be at least 1"));
        }
        Ok(())
    }

    /// Parses a TOML config file; unknown keys are rejected.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(1);
            Error::Parse {
                line,
                message: e.message().to_string(),
            }
        })
    }

    /// Defaults, overridden by the file named in `GARDINGLAB_CONFIG`,
    /// overridden by flags.
    pub fn resolve(flags: &GlobalArgs, config_path: Option<&Path>) -> Result<Self> {
        let mut cfg = match config_path {
            Some(path) => Self::from_toml(&std::fs::read_to_string(path)?)?,
            None => RunConfig::default(),
        };
        if let Some(t) = flags.tol {
            cfg.tol = t;
        }
        if let Some(s) = flags.seed {
            cfg.seed = s;
        }
        if let Some(s) = flags.samples {
            cfg.samples = s;
        }
        if let Some(r) = flags.restarts {
            cfg.restarts = r;
        }
        if let Some(f) = flags.format {
            cfg.format = f;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Membership tolerance
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of cone members to sample
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Random restarts for the boundary search
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Parser)]
#[command(name = "gardinglab", version, about = "Shifted Gårding cones and curvature-operator positivity")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorArg {
    First,
    Second,
    Kaehler,
}

impl OperatorArg {
    fn kind(self) -> OperatorKind {
        match self {
            OperatorArg::First => OperatorKind::FirstKind,
            OperatorArg::Second => OperatorKind::SecondKind,
            OperatorArg::Kaehler => OperatorKind::Kaehler,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerArg {
    Auto,
    Rejection,
    HitAndRun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Sphere,
    Product,
    Tensor,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test a vector for membership in Γ⁺_k, Γ⁺_k(α) or P_m
    ConeTest {
        /// Vector file, or `-` for standard input
        file: PathBuf,
        #[arg(long, required_unless_present = "m", conflicts_with = "m")]
        k: Option<usize>,
        #[arg(long)]
        m: Option<f64>,
        #[arg(long, conflicts_with_all = ["epsilon", "m"])]
        alpha: Option<f64>,
        /// Use the shift α_ε = (1 − ε)/N
        #[arg(long, conflicts_with = "m")]
        epsilon: Option<f64>,
    },
    /// Sample the shifted cone and check every member is m_ε-positive
    VerifyInclusion {
        #[arg(long)]
        n: usize,
        #[arg(long, required_unless_present = "m", conflicts_with = "m")]
        epsilon: Option<f64>,
        /// Pick ε so that m_ε equals this value
        #[arg(long)]
        m: Option<f64>,
        #[arg(long, value_enum, default_value = "auto")]
        sampler: SamplerArg,
        /// Also minimize the m_ε partial sum over the closed cone
        #[arg(long)]
        boundary_search: bool,
    },
    /// Spectrum of a model curvature tensor, as CSV
    ModelSpace {
        #[arg(value_enum)]
        kind: ModelKind,
        #[arg(long)]
        n: Option<usize>,
        /// Sectional curvature of the space form
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        curvature: f64,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        /// Component list `i j k l value` for `tensor`
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "first")]
        operator: OperatorArg,
    },
    /// Positivity, Betti-vanishing ranges and verdicts for a spectrum
    Classify {
        /// Spectrum file, or `-` for standard input
        file: PathBuf,
        /// Real dimension, or complex dimension for `kaehler`
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        operator: OperatorArg,
        #[arg(long)]
        epsilon: f64,
    },
    /// Pinching thresholds per dimension
    Thresholds {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, conflicts_with = "n")]
        n_min: Option<usize>,
        #[arg(long, conflicts_with = "n")]
        n_max: Option<usize>,
        /// Tabulate the Kähler thresholds over complex dimensions instead
        #[arg(long)]
        kaehler: bool,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) => EXIT_USAGE,
        Error::Validation(_) | Error::Parse { .. } => EXIT_DATA,
        Error::Io(_) => EXIT_NO_INPUT,
        Error::Numeric(_) => EXIT_SOFTWARE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let config_path = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    let outcome = RunConfig::resolve(&cli.global, config_path.as_deref())
        .and_then(|cfg| dispatch(&cli.command, &cfg, out));
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "gardinglab: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: &Command, cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::ConeTest {
            file,
            k,
            m,
            alpha,
            epsilon,
        } => cone_test(file, *k, *m, *alpha, *epsilon, cfg, out),
        Command::VerifyInclusion {
            n,
            epsilon,
            m,
            sampler,
            boundary_search,
        } => verify_inclusion(*n, *epsilon, *m, *sampler, *boundary_search, cfg, out),
        Command::ModelSpace {
            kind,
            n,
            curvature,
            p,
            q,
            file,
            operator,
        } => model_space(*kind, *n, *curvature, (*p, *q), file.as_deref(), *operator, cfg, out),
        Command::Classify {
            file,
            n,
            operator,
            epsilon,
        } => classify_cmd(file, *n, *operator, *epsilon, cfg, out),
        Command::Thresholds {
            n,
            n_min,
            n_max,
            kaehler,
        } => thresholds_cmd(*n, *n_min, *n_max, *kaehler, cfg, out),
    }
}

fn membership_exit(m: &ConeMembership) -> i32 {
    if m.member_open {
        0
    } else if m.member_closed {
        1
    } else {
        2
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cone_test(
    file: &Path,
    k: Option<usize>,
    m: Option<f64>,
    alpha: Option<f64>,
    epsilon: Option<f64>,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<i32> {
    let v = RealVector::new(parse_vector(&read_input(file)?)?)?;
    let n = v.len();
    let (cone, shift, membership) = match (k, m) {
        (Some(k), _) => {
            let shift = match (alpha, epsilon) {
                (Some(a), _) => Some(a),
                (None, Some(e)) => Some(epsilon_to_params(e, n)?.alpha_eps),
                (None, None) => None,
            };
            match shift {
                Some(a) => ("shifted_garding", Some(a), in_shifted_cone(&v, k, &ShiftParams::new(a, n)?, cfg.tol)?),
                None => ("garding", None, in_garding_cone(&v, k, cfg.tol)?),
            }
        }
        (None, Some(m)) => ("positivity", None, in_positivity_cone_extended(&v, m, cfg.tol)?),
        (None, None) => return Err(Error::domain("one of --k or --m is required")),
    };
    let code = membership_exit(&membership);
    match cfg.format {
        OutputFormat::Machine => write_json_line(
            out,
            &json!({
                "command": "cone-test",
                "cone": cone,
                "n": n,
                "k": k,
                "m": m,
                "alpha": shift,
                "tol": cfg.tol,
                "membership": membership,
                "exit_code": code,
            }),
        )?,
        OutputFormat::Human => {
            let param = match (k, m) {
                (Some(k), _) => format!("k = {k}"),
                (_, Some(m)) => format!("m = {}", format_f64(m)),
                _ => unreachable!(),
            };
            writeln!(out, "cone          {cone} ({param}, N = {n})")?;
            if let Some(a) = shift {
                writeln!(out, "alpha         {}", format_f64(a))?;
            }
            writeln!(out, "open member   {}", yes_no(membership.member_open))?;
            writeln!(out, "closed member {}", yes_no(membership.member_closed))?;
            writeln!(out, "margin        {:.6e}", membership.margin)?;
            writeln!(out, "binding       {}", serde_json::to_string(&membership.binding_constraint).unwrap_or_default())?;
        }
    }
    Ok(code)
}

#[allow(clippy::too_many_arguments)]
fn verify_inclusion(
    n: usize,
    epsilon: Option<f64>,
    m: Option<f64>,
    sampler: SamplerArg,
    with_search: bool,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<i32> {
    let epsilon = match (epsilon, m) {
        (Some(e), _) => e,
        (None, Some(m)) => epsilon_for_target_m(m, n)?,
        (None, None) => return Err(Error::domain("one of --epsilon or --m is required")),
    };
    let config = SamplingConfig {
        sampler: match sampler {
            SamplerArg::Auto => Sampler::Auto,
            SamplerArg::Rejection => Sampler::Rejection,
            SamplerArg::HitAndRun => Sampler::HitAndRun,
        },
        tol: cfg.tol,
        ..SamplingConfig::default()
    };
    let report = verify_inclusion_sampling(n, epsilon, cfg.samples, cfg.seed, &config)?;
    let mut notes = Vec::new();
    if cfg.samples == 0 {
        notes.push("no samples requested; the check is vacuous".to_string());
    } else if !report.complete() {
        notes.push(format!(
            "proposal budget exhausted after {} of {} members",
            report.accepted, report.requested
        ));
    }
    let search = if with_search {
        let sc = SearchConfig {
            restarts: cfg.restarts,
            tol: cfg.tol,
            ..SearchConfig::default()
        };
        Some(boundary_search(n, epsilon, cfg.seed, &sc)?)
    } else {
        None
    };
    let mut failed = !report.passed();
    if let Some(s) = &search {
        if s.min_c0 < -10.0 * cfg.tol {
            failed = true;
        }
        if !s.converged() {
            notes.push(format!(
                "boundary search: {} of {} restarts converged",
                s.converged_restarts, s.restarts
            ));
        }
        if s.matches_rigid() == Some(false) {
            notes.push("boundary search minimizer is not the rigid pattern".to_string());
        }
    }
    let code = if failed { 1 } else { 0 };
    match cfg.format {
        OutputFormat::Machine => {
            write_json_line(
                out,
                &json!({ "command": "verify-inclusion", "record": "sampling", "report": report, "notes": notes }),
            )?;
            if let Some(s) = &search {
                write_json_line(out, &json!({ "command": "verify-inclusion", "record": "boundary_search", "report": s }))?;
            }
        }
        OutputFormat::Human => {
            writeln!(out, "N             {n}")?;
            writeln!(out, "epsilon       {}", format_f64(epsilon))?;
            writeln!(out, "alpha_eps     {}", format_f64(report.alpha_eps))?;
            writeln!(out, "m_eps         {}", format_f64(report.m_eps))?;
            writeln!(out, "sampler       {:?}", report.sampler)?;
            writeln!(out, "members       {} / {}", report.accepted, report.requested)?;
            writeln!(out, "acceptance    {:.6e}", report.acceptance_rate)?;
            match report.min_margin {
                Some(mm) => writeln!(out, "min margin    {mm:.6e}")?,
                None => writeln!(out, "min margin    -")?,
            }
            writeln!(out, "violations    {}", report.violations.len())?;
            if let Some(s) = &search {
                writeln!(out, "min c0        {:.6e}", s.min_c0)?;
                writeln!(out, "minimizer     {}", format_csv(&s.minimizer))?;
                if let Some(d) = s.rigid_distance {
                    writeln!(out, "rigid dist    {d:.3e}")?;
                }
            }
            for note in &notes {
                writeln!(out, "note: {note}")?;
            }
        }
    }
    Ok(code)
}

#[allow(clippy::too_many_arguments)]
fn model_space(
    kind: ModelKind,
    n: Option<usize>,
    curvature: f64,
    (p, q): (Option<usize>, Option<usize>),
    file: Option<&Path>,
    operator: OperatorArg,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<i32> {
    let tensor = match kind {
        ModelKind::Sphere => {
            let n = n.ok_or_else(|| Error::domain("sphere needs --n"))?;
            CurvatureTensor::space_form(n, curvature)?
        }
        ModelKind::Product => match (p, q) {
            (Some(p), Some(q)) => CurvatureTensor::product_spheres(p, q)?,
            _ => return Err(Error::domain("product needs --p and --q")),
        },
        ModelKind::Tensor => {
            let path = file.ok_or_else(|| Error::domain("tensor needs --file"))?;
            parse_tensor_components(&read_input(path)?, n)?
        }
    };
    let spectrum = match operator {
        OperatorArg::First => eigen_spectrum(&assemble_first_kind(&tensor)?)?,
        OperatorArg::Second => eigen_spectrum(&assemble_second_kind(&tensor)?)?,
        OperatorArg::Kaehler => return Err(Error::domain("model spaces provide first or second kind operators")),
    };
    let checks = scalar_curvature_checks(&tensor)?;
    let code = if checks.holds() { 0 } else { EXIT_IDENTITY };
    match cfg.format {
        OutputFormat::Machine => write_json_line(
            out,
            &json!({
                "command": "model-space",
                "n": tensor.dim(),
                "operator": spectrum.kind(),
                "spectrum": spectrum.values(),
                "scalar_curvature": checks.scalar_curvature,
                "first_kind_identity": checks.first_kind_identity,
                "second_kind_identity": checks.second_kind_identity,
            }),
        )?,
        OutputFormat::Human => {
            writeln!(out, "# n={} operator={}", tensor.dim(), spectrum.kind().name())?;
            writeln!(out, "# scalar_curvature={}", format_f64(checks.scalar_curvature))?;
            for (name, c) in [
                ("first_kind_identity", &checks.first_kind_identity),
                ("second_kind_identity", &checks.second_kind_identity),
            ] {
                writeln!(
                    out,
                    "# {name}={} relative_error={:e}",
                    if c.holds { "holds" } else { "FAILS" },
                    c.relative_error
                )?;
            }
            writeln!(out, "{}", format_csv(spectrum.values()))?;
        }
    }
    Ok(code)
}

fn classify_cmd(
    file: &Path,
    n: usize,
    operator: OperatorArg,
    epsilon: f64,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<i32> {
    let values = parse_vector(&read_input(file)?)?;
    let spectrum = Spectrum::new(values, operator.kind(), n)?;
    let report = classify::classify(&spectrum, epsilon, cfg.tol)?;
    let code = if report.verdicts.is_empty() { 1 } else { 0 };
    match cfg.format {
        OutputFormat::Machine => write_json_line(out, &json!({ "command": "classify", "report": report }))?,
        OutputFormat::Human => write_classification(out, &report)?,
    }
    Ok(code)
}

fn write_classification(out: &mut dyn Write, r: &ClassificationReport) -> Result<()> {
    writeln!(out, "operator      {} (n = {}, N = {})", r.operator.name(), r.n, r.eigenvalue_count)?;
    writeln!(out, "epsilon       {}", format_f64(r.epsilon))?;
    writeln!(out, "m_eps         {}", format_f64(r.m_eps))?;
    writeln!(
        out,
        "shifted cone  open={} closed={} margin={:.6e}",
        yes_no(r.hypothesis.member_open),
        yes_no(r.hypothesis.member_closed),
        r.hypothesis.margin
    )?;
    writeln!(
        out,
        "m_eps-positive {} (margin {:.6e})",
        yes_no(r.m_positivity.member),
        r.m_positivity.margin
    )?;
    for b in &r.betti_zero_ranges {
        writeln!(out, "b_{}..b_{} = 0    [{}]", b.low, b.high, b.rule)?;
    }
    writeln!(out, "verdicts      {}", r.verdict_labels().join(", "))?;
    for v in &r.verdicts {
        for c in &v.checks {
            let rel = match c.relation {
                classify::Relation::Greater => ">",
                classify::Relation::AtMost => "<=",
            };
            writeln!(
                out,
                "  {:<24} {}: {} {rel} {}",
                v.result,
                c.description,
                format_f64(c.lhs),
                format_f64(c.rhs)
            )?;
        }
    }
    for note in &r.notes {
        writeln!(out, "note: {note}")?;
    }
    Ok(())
}

fn thresholds_cmd(
    n: Option<usize>,
    n_min: Option<usize>,
    n_max: Option<usize>,
    kaehler: bool,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<i32> {
    let floor = if kaehler { 2 } else { 3 };
    let (lo, hi) = match n {
        Some(n) => (n, n),
        None => {
            let lo = n_min.unwrap_or(floor);
            (lo, n_max.unwrap_or(lo))
        }
    };
    if lo < floor || hi < lo {
        return Err(Error::domain(format!(
            "dimension range [{lo}, {hi}] must satisfy {floor} <= n_min <= n_max"
        )));
    }
    let human = cfg.format == OutputFormat::Human;
    if human {
        if kaehler {
            writeln!(out, "{:>4} {:>22} {:>22}", "n", "eps_rational", "eps_biholo")?;
        } else {
            writeln!(out, "{:>4} {:>22} {:>22}", "n", "eps_first", "eps_second")?;
        }
    }
    let cell = |t: &classify::Threshold| {
        if t.vacuous {
            format!("{} (vacuous)", format_f64(t.epsilon))
        } else {
            format_f64(t.epsilon)
        }
    };
    for d in lo..=hi {
        if kaehler {
            let k = classify::kaehler_thresholds(d)?;
            if human {
                writeln!(out, "{d:>4} {:>22} {:>22}", cell(&k.rational_cohomology), cell(&k.biholomorphic))?;
            } else {
                write_json_line(out, &json!({ "command": "thresholds", "kaehler": k }))?;
            }
        } else {
            let t = classify::thresholds(d, None)?;
            if human {
                writeln!(out, "{d:>4} {:>22} {:>22}", cell(&t.first_kind), cell(&t.second_kind))?;
            } else {
                write_json_line(out, &json!({ "command": "thresholds", "table": t }))?;
            }
        }
    }
    Ok(EXIT_OK)
}
