//! Command-line front end.
//!
//! [`run`] parses arguments, dispatches to the library and renders the
//! report. Exit codes: 0 success, 1 verification failure, 2 configuration
//! error, 3 truncation insufficiency.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::block::{composite_block, displacement_block, squeezing_block, state_block};
use crate::composite::{
    displaced_number, modified_coherent, modified_displacement, squeezed_displaced_number, CompositeLabel,
};
use crate::error::{Error, Result};
use crate::fock::{poisson_tail_bound, FockOperator, FockVector, StretchLabel, TruncationConfig};
use crate::operators::{displacement, displacement_normal_ordered, squeezing, SqueezeLabel};
use crate::report::{complex_json, float_json, Cell, Report, Table};
use crate::states::{make_state, overlap, photon_stats, stats_from_distribution, PhotonStats};
use crate::sweep::{self, RangeSpec, SweepGrid, SweepPoint};
use crate::verify::{self, VerifyContext};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_TRUNCATION: i32 = 3;

/// Basis size for composite constructions when `--dim` is not given.
const COMPOSITE_DIM: usize = 128;
const OPERATOR_DIM: usize = 32;

#[derive(Debug, Parser)]
#[command(name = "stretched-fock", version, about = "Stretched coherent states in a truncated Fock basis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Amplitudes and photon-number distribution of a state.
    State(StateArgs),
    /// Photon statistics in closed form and from the truncated distribution.
    Stats(StatsArgs),
    /// Overlap <alpha|zeta> of two stretched coherent states.
    Overlap(OverlapArgs),
    /// Matrix of a displacement or squeezing operator.
    Operator(OperatorArgs),
    /// Run the identity suite and report per-check residuals.
    Verify(VerifyArgs),
    /// Scalar observables over a parameter grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LabelArgs {
    /// Stretch exponent in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// State label as "re,im".
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, conflicts_with = "polar")]
    zeta: Option<Complex64>,
    /// State label as "r,theta".
    #[arg(long, value_parser = parse_polar, allow_hyphen_values = true)]
    polar: Option<Complex64>,
}

impl LabelArgs {
    fn zeta(&self) -> Complex64 {
        self.zeta.or(self.polar).unwrap_or_default()
    }

    fn label(&self) -> Result<StretchLabel> {
        StretchLabel::new(self.zeta(), self.sigma)
    }

    fn params(&self, map: &mut Map<String, Value>) {
        map.insert("sigma".into(), float_json(self.sigma));
        map.insert("zeta".into(), complex_json(self.zeta()));
    }
}

#[derive(Debug, Args)]
struct SqueezeArgs {
    /// Squeeze exponent in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    upsilon: f64,
    /// Squeeze label as "re,im".
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,0")]
    xi: Complex64,
}

impl SqueezeArgs {
    fn label(&self) -> Result<SqueezeLabel> {
        SqueezeLabel::new(self.xi, self.upsilon)
    }

    fn params(&self, map: &mut Map<String, Value>) {
        map.insert("upsilon".into(), float_json(self.upsilon));
        map.insert("xi".into(), complex_json(self.xi));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StateKind {
    /// D(zeta)|0>.
    Coherent,
    /// D(zeta) S(xi) |n>.
    Squeezed,
    /// D(zeta)|n>.
    DisplacedNumber,
    /// Modified displacement by alpha applied to |zeta>.
    Modified,
}

#[derive(Debug, Args)]
struct StateArgs {
    #[command(flatten)]
    label: LabelArgs,
    #[command(flatten)]
    squeeze: SqueezeArgs,
    #[arg(long, value_enum, default_value_t = StateKind::Coherent)]
    kind: StateKind,
    /// Number-state index for the squeezed and displaced-number kinds.
    #[arg(long, default_value_t = 0)]
    n: usize,
    /// Second label "re,im" for the modified kind.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,0")]
    alpha: Complex64,
    /// Basis size. Defaults to the tail bound (coherent) or 128.
    #[arg(long)]
    dim: Option<usize>,
    /// Admissible Poisson tail mass above the basis.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(flatten)]
    label: LabelArgs,
    /// Basis size for the truncated distribution. Defaults to the tail bound.
    #[arg(long)]
    dim: Option<usize>,
    /// Admissible Poisson tail mass above the basis.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct OverlapArgs {
    #[command(flatten)]
    label: LabelArgs,
    /// Bra label as "re,im".
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,0")]
    alpha: Complex64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OperatorKind {
    Displacement,
    NormalOrdered,
    Squeezing,
    Modified,
}

#[derive(Debug, Args)]
struct OperatorArgs {
    #[command(flatten)]
    label: LabelArgs,
    #[command(flatten)]
    squeeze: SqueezeArgs,
    #[arg(long, value_enum, default_value_t = OperatorKind::Displacement)]
    kind: OperatorKind,
    /// Displacement label "re,im" of the modified kind.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,0")]
    alpha: Complex64,
    #[arg(long, default_value_t = OPERATOR_DIM)]
    dim: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Restrict the grid to one stretch exponent.
    #[arg(long)]
    sigma: Option<f64>,
    /// Restrict the grid to one squeeze exponent.
    #[arg(long)]
    upsilon: Option<f64>,
    /// Restrict the grid to one state label "re,im".
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, conflicts_with = "polar")]
    zeta: Option<Complex64>,
    /// Restrict the grid to one state label "r,theta".
    #[arg(long, value_parser = parse_polar, allow_hyphen_values = true)]
    polar: Option<Complex64>,
    /// Restrict the grid to one squeeze label "re,im".
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    xi: Option<Complex64>,
    /// Second displacement label "re,im".
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    alpha: Option<Complex64>,
    /// Basis size for operator identities.
    #[arg(long, default_value_t = 64)]
    dim: usize,
    /// Largest residual that counts as a pass.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for the randomized vectors.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated check names; all checks when absent.
    #[arg(long, value_delimiter = ',')]
    check: Vec<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Stretch exponents: "a,b,c" or "start:stop:count".
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    sigma: String,
    /// Squeeze exponents.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    upsilon: String,
    /// Moduli of the state label.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    modulus: String,
    /// Moduli of the squeeze label.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    rho: String,
    /// Argument of the state label.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phase: f64,
    /// Argument of the squeeze label.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta: f64,
    /// Bra label "re,im" of the overlap observable.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,0")]
    alpha: Complex64,
    /// Comma-separated observables.
    #[arg(long, value_delimiter = ',', default_value = "mean,mandel_q")]
    observables: Vec<String>,
    /// Basis size for the residual observable. Defaults to the tail bound.
    #[arg(long)]
    dim: Option<usize>,
    /// Admissible Poisson tail mass above the basis.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[command(flatten)]
    out: OutputArgs,
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected two comma-separated numbers, got '{s}'"));
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| format!("'{}' is not a number", parts[0]))?;
    let b: f64 = parts[1].trim().parse().map_err(|_| format!("'{}' is not a number", parts[1]))?;
    if !a.is_finite() || !b.is_finite() {
        return Err(format!("'{s}' must be finite"));
    }
    Ok((a, b))
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    parse_pair(s).map(|(re, im)| Complex64::new(re, im))
}

fn parse_polar(s: &str) -> std::result::Result<Complex64, String> {
    let (r, theta) = parse_pair(s)?;
    if r < 0.0 {
        return Err(format!("modulus must be >= 0, got {r}"));
    }
    Ok(Complex64::from_polar(r, theta))
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Truncation { .. } | Error::SeriesNonConvergence { .. } | Error::InsufficientNodes { .. } => {
            EXIT_TRUNCATION
        }
        _ => EXIT_CONFIG,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            };
        }
    };
    let (out, result) = match &cli.command {
        Command::State(a) => (&a.out, cmd_state(a).map(|r| (r, EXIT_OK, String::new()))),
        Command::Stats(a) => (&a.out, cmd_stats(a).map(|r| (r, EXIT_OK, String::new()))),
        Command::Overlap(a) => (&a.out, cmd_overlap(a).map(|r| (r, EXIT_OK, String::new()))),
        Command::Operator(a) => (&a.out, cmd_operator(a).map(|r| (r, EXIT_OK, String::new()))),
        Command::Verify(a) => (&a.out, cmd_verify(a)),
        Command::Sweep(a) => (&a.out, cmd_sweep(a).map(|r| (r, EXIT_OK, String::new()))),
    };
    match result {
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
        Ok((report, code, stderr)) => {
            let text = match out.format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            match &out.output {
                None => Outcome { code, stdout: text, stderr },
                Some(path) => match std::fs::write(path, text) {
                    Ok(()) => Outcome { code, stdout: String::new(), stderr },
                    Err(e) => Outcome {
                        code: EXIT_CONFIG,
                        stdout: String::new(),
                        stderr: format!("{stderr}error: cannot write {}: {e}\n", path.display()),
                    },
                },
            }
        }
    }
}

fn check_tail_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("--tol must lie in (0, 1), got {tol}")))
    }
}

fn truncation(dim: Option<usize>, default: impl FnOnce() -> Result<usize>, tol: f64) -> Result<TruncationConfig> {
    let dim = match dim {
        Some(d) => d,
        None => default()?,
    };
    TruncationConfig::new(dim, tol)
}

fn amplitude_table(v: &FockVector) -> Table {
    let mut t = Table::new(&["n", "re", "im", "pmf"]);
    for (n, (a, p)) in v.amps.iter().zip(v.probabilities()).enumerate() {
        t.push(vec![n.into(), a.re.into(), a.im.into(), p.into()]);
    }
    t
}

fn cmd_state(a: &StateArgs) -> Result<Report> {
    check_tail_tol(a.tol)?;
    let label = a.label.label()?;
    let squeeze = a.squeeze.label()?;
    let alpha = StretchLabel::new(a.alpha, a.label.sigma)?;
    let mut audit = Map::new();
    let state = match a.kind {
        StateKind::Coherent => {
            let cfg = truncation(a.dim, || Ok(TruncationConfig::for_mean(label.mean(), a.tol)?.dim), a.tol)?;
            let v = make_state(&label, &cfg)?;
            audit.insert("dim".into(), json!(cfg.dim));
            audit.insert("tail_bound".into(), float_json(poisson_tail_bound(label.mean(), cfg.dim)));
            audit.insert("trusted_block".into(), json!(state_block(cfg.dim, label.w().norm())));
            v
        }
        StateKind::Squeezed => {
            let cfg = truncation(a.dim, || Ok(COMPOSITE_DIM), a.tol)?;
            let lab = CompositeLabel::new(label, squeeze, a.n);
            let v = squeezed_displaced_number(&lab, &cfg)?;
            audit.insert("dim".into(), json!(cfg.dim));
            audit.insert("trusted_block".into(), json!(lab.block(cfg.dim)));
            v
        }
        StateKind::DisplacedNumber => {
            let cfg = truncation(a.dim, || Ok(COMPOSITE_DIM), a.tol)?;
            let v = displaced_number(&label, a.n, &cfg)?;
            audit.insert("dim".into(), json!(cfg.dim));
            audit.insert("trusted_block".into(), json!(displacement_block(cfg.dim, label.w().norm())));
            v
        }
        StateKind::Modified => {
            let cfg = truncation(a.dim, || Ok(COMPOSITE_DIM), a.tol)?;
            let v = modified_coherent(&alpha, &label, &cfg)?;
            audit.insert("dim".into(), json!(cfg.dim));
            audit.insert(
                "trusted_block".into(),
                json!(displacement_block(cfg.dim, alpha.w().norm() + label.w().norm())),
            );
            v
        }
    };
    audit.insert("norm_sqr".into(), float_json(state.norm_sqr()));
    let mut r = Report::new("state", amplitude_table(&state));
    r.params.insert("kind".into(), json!(kind_name(a.kind)));
    a.label.params(&mut r.params);
    a.squeeze.params(&mut r.params);
    r.params.insert("alpha".into(), complex_json(a.alpha));
    r.params.insert("n".into(), json!(a.n));
    r.params.insert("dim".into(), json!(a.dim));
    r.params.insert("tol".into(), float_json(a.tol));
    r.summary.insert("w".into(), complex_json(label.w()));
    r.audit = audit;
    Ok(r)
}

fn kind_name(k: StateKind) -> &'static str {
    match k {
        StateKind::Coherent => "coherent",
        StateKind::Squeezed => "squeezed",
        StateKind::DisplacedNumber => "displaced-number",
        StateKind::Modified => "modified",
    }
}

fn stats_row(t: &mut Table, source: &str, s: &PhotonStats) {
    t.push(vec![
        source.into(),
        s.mean.into(),
        s.second_moment.into(),
        s.variance().into(),
        s.mandel_q.unwrap_or(f64::NAN).into(),
    ]);
}

fn cmd_stats(a: &StatsArgs) -> Result<Report> {
    check_tail_tol(a.tol)?;
    let label = a.label.label()?;
    let cfg = truncation(a.dim, || Ok(TruncationConfig::for_mean(label.mean(), a.tol)?.dim), a.tol)?;
    let closed = photon_stats(&label);
    let truncated = stats_from_distribution(&make_state(&label, &cfg)?.probabilities());
    let mut t = Table::new(&["source", "mean", "second_moment", "variance", "mandel_q"]);
    stats_row(&mut t, "closed", &closed);
    stats_row(&mut t, "truncated", &truncated);
    let mut r = Report::new("stats", t);
    a.label.params(&mut r.params);
    r.params.insert("dim".into(), json!(a.dim));
    r.params.insert("tol".into(), float_json(a.tol));
    r.audit.insert("dim".into(), json!(cfg.dim));
    r.audit.insert("tail_bound".into(), float_json(poisson_tail_bound(label.mean(), cfg.dim)));
    Ok(r)
}

fn cmd_overlap(a: &OverlapArgs) -> Result<Report> {
    let zeta = a.label.label()?;
    let eta = StretchLabel::new(a.alpha, a.label.sigma)?;
    let o = overlap(&eta, &zeta)?;
    let mut t = Table::new(&["re", "im", "abs"]);
    t.push(vec![o.re.into(), o.im.into(), o.norm().into()]);
    let mut r = Report::new("overlap", t);
    a.label.params(&mut r.params);
    r.params.insert("alpha".into(), complex_json(a.alpha));
    Ok(r)
}

fn cmd_operator(a: &OperatorArgs) -> Result<Report> {
    let cfg = TruncationConfig::new(a.dim, 0.0)?;
    let label = a.label.label()?;
    let squeeze = a.squeeze.label()?;
    let alpha = StretchLabel::new(a.alpha, a.label.sigma)?;
    let (op, block): (FockOperator, usize) = match a.kind {
        OperatorKind::Displacement => (displacement(&label, &cfg), displacement_block(a.dim, label.w().norm())),
        OperatorKind::NormalOrdered => (
            displacement_normal_ordered(&label, &cfg)?,
            displacement_block(a.dim, label.w().norm()),
        ),
        OperatorKind::Squeezing => (squeezing(&squeeze, &cfg), squeezing_block(a.dim, squeeze.strength())),
        OperatorKind::Modified => (
            modified_displacement(&alpha, &label, &cfg)?,
            composite_block(a.dim, alpha.w().norm(), 0.0),
        ),
    };
    let mut t = Table::new(&["m", "n", "re", "im"]);
    for m in 0..a.dim {
        for n in 0..a.dim {
            let e = op.entry(m, n);
            t.push(vec![m.into(), n.into(), e.re.into(), e.im.into()]);
        }
    }
    let mut r = Report::new("operator", t);
    r.params.insert(
        "kind".into(),
        json!(match a.kind {
            OperatorKind::Displacement => "displacement",
            OperatorKind::NormalOrdered => "normal-ordered",
            OperatorKind::Squeezing => "squeezing",
            OperatorKind::Modified => "modified",
        }),
    );
    a.label.params(&mut r.params);
    a.squeeze.params(&mut r.params);
    r.params.insert("alpha".into(), complex_json(a.alpha));
    r.params.insert("dim".into(), json!(a.dim));
    r.audit.insert("unitarity_residual".into(), float_json(op.unitarity_residual(a.dim)));
    r.audit.insert("trusted_block".into(), json!(block));
    Ok(r)
}

fn cmd_verify(a: &VerifyArgs) -> Result<(Report, i32, String)> {
    if !(a.tol >= 0.0) || !a.tol.is_finite() {
        return Err(Error::domain(format!("--tol must be finite and >= 0, got {}", a.tol)));
    }
    let mut ctx = VerifyContext {
        dim: a.dim,
        seed: a.seed,
        ..VerifyContext::default()
    };
    if let Some(s) = a.sigma {
        ctx.sigmas = vec![s];
    }
    if let Some(u) = a.upsilon {
        ctx.upsilons = vec![u];
    }
    if let Some(z) = a.zeta.or(a.polar) {
        ctx.zetas = vec![z];
    }
    if let Some(x) = a.xi {
        ctx.xis = vec![x];
    }
    if let Some(al) = a.alpha {
        ctx.alpha = al;
    }
    // Reject bad exponents before any check runs.
    for &s in &ctx.sigmas {
        StretchLabel::new(ctx.alpha, s)?;
    }
    for &u in &ctx.upsilons {
        SqueezeLabel::new(ctx.xis[0], u)?;
    }
    TruncationConfig::new(ctx.dim, 0.0)?;
    let checks = if a.check.is_empty() {
        verify::registry()
    } else {
        verify::select(&a.check)?
    };
    let outcomes = verify::run_checks(&checks, &ctx, a.tol);

    let mut t = Table::new(&["check", "formula", "residual", "tol", "status", "detail"]);
    let mut human = String::new();
    for o in &outcomes {
        let status = match (&o.error, o.passed) {
            (Some(_), _) => "error",
            (None, true) => "pass",
            (None, false) => "fail",
        };
        let detail = o.error.as_ref().map(|e| e.to_string()).unwrap_or_default();
        t.push(vec![
            o.name.into(),
            o.formula.into(),
            o.residual.unwrap_or(f64::NAN).into(),
            a.tol.into(),
            status.into(),
            detail.clone().into(),
        ]);
        let shown = o.residual.map_or_else(|| "-".to_string(), |r| format!("{r:.3e}"));
        human.push_str(&format!("{:<4} {:<24} {:>10}  {}", status.to_uppercase(), o.name, shown, o.formula));
        if !detail.is_empty() {
            human.push_str(&format!("  [{detail}]"));
        }
        human.push('\n');
    }
    let failed = outcomes.iter().filter(|o| o.error.is_none() && !o.passed).count();
    let truncated = outcomes
        .iter()
        .filter(|o| o.error.as_ref().is_some_and(|e| exit_code(e) == EXIT_TRUNCATION))
        .count();
    let errored = outcomes.iter().filter(|o| o.error.is_some()).count();
    let code = if failed > 0 {
        EXIT_VERIFY_FAILED
    } else if truncated > 0 {
        EXIT_TRUNCATION
    } else if errored > 0 {
        EXIT_CONFIG
    } else {
        EXIT_OK
    };
    let passed = outcomes.len() - failed - errored;
    human.push_str(&format!(
        "{passed} passed, {failed} failed, {errored} errors at tol {:e}\n",
        a.tol
    ));

    let mut r = Report::new("verify", t);
    r.params.insert("sigmas".into(), json!(ctx.sigmas.iter().map(|&s| float_json(s)).collect::<Vec<_>>()));
    r.params.insert("upsilons".into(), json!(ctx.upsilons.iter().map(|&s| float_json(s)).collect::<Vec<_>>()));
    r.params.insert("zetas".into(), json!(ctx.zetas.iter().map(|&z| complex_json(z)).collect::<Vec<_>>()));
    r.params.insert("xis".into(), json!(ctx.xis.iter().map(|&z| complex_json(z)).collect::<Vec<_>>()));
    r.params.insert("alpha".into(), complex_json(ctx.alpha));
    r.params.insert("dim".into(), json!(ctx.dim));
    r.params.insert("tol".into(), float_json(a.tol));
    r.params.insert("seed".into(), json!(ctx.seed));
    r.summary.insert("passed".into(), json!(passed));
    r.summary.insert("failed".into(), json!(failed));
    r.summary.insert("errors".into(), json!(errored));
    r.audit.insert("exit_code".into(), json!(code));
    Ok((r, code, human))
}

fn cmd_sweep(a: &SweepArgs) -> Result<Report> {
    check_tail_tol(a.tol)?;
    let grid = SweepGrid {
        sigmas: RangeSpec::parse(&a.sigma)?,
        upsilons: RangeSpec::parse(&a.upsilon)?,
        moduli: RangeSpec::parse(&a.modulus)?,
        rhos: RangeSpec::parse(&a.rho)?,
        template: SweepPoint {
            sigma: 1.0,
            upsilon: 1.0,
            modulus: 0.0,
            rho: 0.0,
            phase: a.phase,
            theta: a.theta,
            alpha: a.alpha,
            dim: a.dim,
            tail_tol: a.tol,
        },
    };
    // Validate every axis value up front so a bad range fails before any work.
    for p in grid.points() {
        p.stretch()?;
        p.squeeze()?;
        StretchLabel::new(p.alpha, p.sigma)?;
    }
    let observables = sweep::select(&a.observables)?;
    let rows = sweep::run_sweep(&grid, &observables)?;
    let mut columns = vec!["sigma", "upsilon", "modulus", "rho"];
    columns.extend(observables.iter().map(|o| o.name()));
    let mut t = Table::new(&columns);
    for row in &rows {
        let p = row.point;
        let mut cells: Vec<Cell> = vec![p.sigma.into(), p.upsilon.into(), p.modulus.into(), p.rho.into()];
        cells.extend(row.values.iter().map(|&v| Cell::Float(v)));
        t.push(cells);
    }
    let mut r = Report::new("sweep", t);
    for (key, range) in [
        ("sigma", &grid.sigmas),
        ("upsilon", &grid.upsilons),
        ("modulus", &grid.moduli),
        ("rho", &grid.rhos),
    ] {
        r.params.insert(key.into(), json!(range.0.iter().map(|&v| float_json(v)).collect::<Vec<_>>()));
    }
    r.params.insert("phase".into(), float_json(a.phase));
    r.params.insert("theta".into(), float_json(a.theta));
    r.params.insert("alpha".into(), complex_json(a.alpha));
    r.params.insert("observables".into(), json!(a.observables));
    r.params.insert("dim".into(), json!(a.dim));
    r.params.insert("tol".into(), float_json(a.tol));
    r.audit.insert("points".into(), json!(rows.len()));
    Ok(r)
}
