//! Scenario-driven command-line front end.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::Serialize;
use serde::Deserialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::dyneq::{
    delay_criterion, integro_growth_bound, lyapunov_continuous_check, lyapunov_criterion, lyapunov_unit_weight,
    IntegroProblem, LyapunovProblem,
};
use crate::family::{CompositeFamily, ConvexProfile};
use crate::grid::{Anchor, GridFunction, MultiIndex, ProductScale, Region};
use crate::opial::sweep::{sweep, write_rows_csv, GeneratorConfig};
use crate::opial::{
    chain_lower_bound_audit, verify_composition_higher_order, verify_composition_unweighted, verify_mixed_order,
    verify_power_weight, verify_product_amgm, verify_rozanova, verify_rozanova_weighted, verify_single_function,
    verify_weighted_composition, Domain, Exponents, Mode, PowerVariant, ProductFactor, RozanovaInputs, TheoremId,
    Tolerance, Variant, VerificationReport, WeightedInputs,
};
use crate::timescale::ScaleSpec;
use crate::Error;

pub const SCHEMA: &str = "1";

/// Environment variable capping the sweep thread pool.
pub const THREADS_ENV: &str = "OPIAL_THREADS";

#[derive(Parser, Debug)]
#[command(name = "opial", version, about = "Opial-type inequalities on time-scale grids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate one inequality instance.
    Verify(RunArgs),
    /// Run seeded random instances of one inequality.
    Sweep(RunArgs),
    /// Evaluate a Lyapunov-type criterion.
    Lyapunov(RunArgs),
    /// Evaluate the integro-partial growth bound.
    Integro(RunArgs),
    /// Inspect time scales.
    Scale {
        #[command(subcommand)]
        action: ScaleAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum ScaleAction {
    /// Print the points of every axis of a scenario.
    Show { scenario: PathBuf },
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Scenario file (JSON).
    pub scenario: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    /// Output directory; reports go to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    match s {
        "assert" => Ok(Mode::Assert),
        "audit" => Ok(Mode::Audit),
        _ => Err(format!("unknown mode '{s}', expected assert or audit")),
    }
}

/// A grid field: a constant, explicit row-major values, or seeded uniform noise.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Constant(f64),
    Values(Vec<f64>),
    Random { seed: u64, lo: f64, hi: f64 },
}

impl FieldSpec {
    pub fn build(&self, region: &Region, stream: u64) -> Result<GridFunction, Error> {
        match self {
            FieldSpec::Constant(c) => GridFunction::constant(region, *c),
            FieldSpec::Values(v) => GridFunction::new(region.clone(), v.clone()),
            FieldSpec::Random { seed, lo, hi } => {
                if !(lo <= hi) {
                    return Err(Error::InvalidParams(format!("random field needs lo <= hi, got [{lo}, {hi}]")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(stream);
                let dist = Uniform::new_inclusive(*lo, *hi);
                GridFunction::from_fn(region, |_| dist.sample(&mut rng))
            }
        }
    }
}

/// Split point for the split forms; the theorem id fixes the anchoring otherwise.
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantSpec {
    Split(Vec<usize>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub family: CompositeFamily,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, Deserialize, Default, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKind {
    #[default]
    General,
    UnitWeight,
    Continuous,
    Delay,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LyapunovSpec {
    pub r: FieldSpec,
    pub s: FieldSpec,
    #[serde(default)]
    pub criterion: CriterionKind,
    /// Per-axis delay index maps for the delay criterion.
    pub theta: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegroSpec {
    pub w1: FieldSpec,
    pub w2: FieldSpec,
    pub w3: FieldSpec,
    pub omega: FieldSpec,
    pub gamma: f64,
}

/// Everything a run needs; unused fields are ignored by the selected command.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub theorem: Option<TheoremId>,
    #[serde(default)]
    pub scales: Vec<ScaleSpec>,
    #[serde(rename = "box")]
    pub region: Option<Region>,
    pub lambda: Option<Vec<usize>>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub family: Option<CompositeFamily>,
    /// Top derivatives on the derivative box (values of `g` on the axis for the chain rule).
    #[serde(default)]
    pub functions: Vec<FieldSpec>,
    #[serde(default)]
    pub omega: Vec<FieldSpec>,
    #[serde(default)]
    pub tau: Vec<FieldSpec>,
    pub variant: Option<VariantSpec>,
    pub xi: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub profiles: Vec<ConvexProfile>,
    #[serde(default)]
    pub varphi: Vec<FieldSpec>,
    #[serde(default)]
    pub factors: Vec<FactorSpec>,
    pub tolerance: Option<Tolerance>,
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub generator: Option<GeneratorConfig>,
    pub lyapunov: Option<LyapunovSpec>,
    pub integro: Option<IntegroSpec>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) if e.is_numeric() => 3,
            _ => 2,
        }
    }
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Whether a run found an assert-mode violation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Violation,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::Violation => 1,
        }
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config(format!("{}: {e}", path.display())))
}

/// JSON formatter printing floats with 17 significant digits.
struct SciFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with `{:.16e}` floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| CliError::Io(io::Error::other(e)))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| CliError::Io(io::Error::other(e)))
}

#[derive(serde::Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    #[serde(flatten)]
    body: &'a T,
}

/// Versioned JSON document for any report.
pub fn document<T: Serialize>(body: &T) -> Result<String, CliError> {
    to_json(&Envelope { schema: SCHEMA, body })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Writes verification reports: a single JSON object (an array for several) or one CSV line each.
pub fn emit_report(reports: &[VerificationReport], format: ReportFormat, out: &Path) -> Result<(), CliError> {
    if reports.is_empty() {
        return Err(config("no reports to write"));
    }
    let bytes = match format {
        ReportFormat::Json if reports.len() == 1 => document(&reports[0])?.into_bytes(),
        ReportFormat::Json => {
            let docs: Vec<Envelope<VerificationReport>> =
                reports.iter().map(|body| Envelope { schema: SCHEMA, body }).collect();
            to_json(&docs)?.into_bytes()
        }
        ReportFormat::Csv => {
            let rows: Vec<_> = reports
                .iter()
                .enumerate()
                .map(|(i, r)| crate::opial::sweep::SweepRow { trial: i as u64, report: r.clone() })
                .collect();
            let mut buf = Vec::new();
            write_rows_csv(&rows, &mut buf).map_err(|e| CliError::Io(io::Error::other(e)))?;
            buf
        }
    };
    fs::write(out, bytes)?;
    Ok(())
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .map(Some)
            .ok_or_else(|| config(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

fn build_scale(sc: &Scenario) -> Result<ProductScale, CliError> {
    if sc.scales.is_empty() {
        return Err(config("field 'scales' is required"));
    }
    let axes = sc.scales.iter().map(ScaleSpec::build).collect::<Result<Vec<_>, _>>()?;
    Ok(ProductScale::new(axes)?)
}

fn build_region(sc: &Scenario, scale: &ProductScale) -> Region {
    sc.region.clone().unwrap_or_else(|| scale.full_region())
}

fn build_fields(specs: &[FieldSpec], region: &Region, name: &str, count: usize) -> Result<Vec<GridFunction>, CliError> {
    if specs.len() != count {
        return Err(config(format!("field '{name}' needs {count} entries, got {}", specs.len())));
    }
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| s.build(region, i as u64).map_err(|e| config(format!("{name}[{i}]: {e}"))))
        .collect()
}

fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| config(format!("field '{name}' is required")))
}

fn build_domain(sc: &Scenario) -> Result<Domain, CliError> {
    let scale = build_scale(sc)?;
    let region = build_region(sc, &scale);
    let lambda = sc.lambda.clone().unwrap_or_else(|| vec![1; scale.dims()]);
    Ok(Domain::new(scale, region, MultiIndex::new(lambda)?)?)
}

fn exponents(sc: &Scenario) -> Result<Exponents, CliError> {
    Ok(Exponents::new(need(&sc.alpha, "alpha")?, need(&sc.beta, "beta")?)?)
}

/// Evaluates the single instance a scenario describes.
pub fn verify_scenario(sc: &Scenario) -> Result<VerificationReport, CliError> {
    let theorem = need(&sc.theorem, "theorem")?;
    let tol = sc.tolerance.unwrap_or_default();
    if theorem == TheoremId::ChainRule {
        let scale = build_scale(sc)?;
        if scale.dims() != 1 {
            return Err(config("the chain rule audit needs a single axis"));
        }
        let fam = need(&sc.family, "family")?;
        let g = build_fields(&sc.functions, &scale.full_region(), "functions", fam.arity())?;
        let g: Vec<Vec<f64>> = g.iter().map(|f| f.values().to_vec()).collect();
        let audit = chain_lower_bound_audit(&fam, scale.axis(0), &g, &tol)?;
        return audit
            .reports
            .into_iter()
            .min_by(|a, b| a.slack.total_cmp(&b.slack))
            .ok_or_else(|| config("the axis has no interior points"));
    }
    let dom = build_domain(sc)?;
    let d = dom.derivative_region();
    let omega_box = dom.omega().clone();
    match theorem {
        TheoremId::ChainRule => unreachable!("handled above"),
        TheoremId::Composition | TheoremId::CompositionHigher => {
            let fam = need(&sc.family, "family")?;
            let tops = build_fields(&sc.functions, &d, "functions", fam.arity())?;
            Ok(if theorem == TheoremId::Composition {
                verify_composition_unweighted(&dom, &fam, &tops, &tol)?
            } else {
                verify_composition_higher_order(&dom, &fam, &tops, &tol)?
            })
        }
        TheoremId::ProductLeft | TheoremId::ProductRight => {
            let k = sc.factors.len();
            if k == 0 {
                return Err(config("field 'factors' is required"));
            }
            let tops = build_fields(&sc.functions, &d, "functions", k)?;
            let omega = build_fields(&sc.omega, &omega_box, "omega", k)?;
            let tau = build_fields(&sc.tau, &omega_box, "tau", k)?;
            let factors: Vec<ProductFactor> = (0..k)
                .map(|j| ProductFactor {
                    family: &sc.factors[j].family,
                    top: &tops[j],
                    omega: &omega[j],
                    tau: &tau[j],
                    alpha: sc.factors[j].alpha,
                    beta: sc.factors[j].beta,
                })
                .collect();
            let side = if theorem == TheoremId::ProductLeft { Anchor::Left } else { Anchor::Right };
            Ok(verify_product_amgm(&dom, &factors, side, &tol)?)
        }
        TheoremId::Rozanova | TheoremId::RozanovaWeighted => {
            let fam = need(&sc.family, "family")?;
            let m = fam.arity();
            let tops = build_fields(&sc.functions, &d, "functions", m)?;
            let varphi = build_fields(&sc.varphi, &omega_box, "varphi", m)?;
            let inp = RozanovaInputs { domain: &dom, profiles: &sc.profiles, varphi: &varphi, tops: &tops, tol };
            if theorem == TheoremId::Rozanova {
                Ok(verify_rozanova(&fam, &inp)?)
            } else {
                let omega = build_fields(&sc.omega, &omega_box, "omega", m)?;
                let tau = build_fields(&sc.tau, &omega_box, "tau", m)?;
                Ok(verify_rozanova_weighted(&fam, &inp, &omega, &tau, &exponents(sc)?)?)
            }
        }
        _ => {
            let power = matches!(
                theorem,
                TheoremId::PowerLeft | TheoremId::PowerRight | TheoremId::PowerSplit | TheoremId::PowerMinmax
            );
            let fam = if power { None } else { Some(need(&sc.family, "family")?) };
            let m = fam.as_ref().map_or(1, CompositeFamily::arity);
            let tops = build_fields(&sc.functions, &d, "functions", m)?;
            let omega = build_fields(&sc.omega, &omega_box, "omega", m)?;
            let tau = build_fields(&sc.tau, &omega_box, "tau", m)?;
            let inp = WeightedInputs { domain: &dom, tops: &tops, omega: &omega, tau: &tau, exps: exponents(sc)?, tol };
            let split_point = || match &sc.variant {
                Some(VariantSpec::Split(c)) => Ok(c.clone()),
                _ => Err(config(format!("{} needs \"variant\": {{\"split\": [...]}}", theorem.name()))),
            };
            let report = match theorem {
                TheoremId::PowerLeft => verify_power_weight(&inp, &PowerVariant::Left)?,
                TheoremId::PowerRight => verify_power_weight(&inp, &PowerVariant::Right)?,
                TheoremId::PowerSplit => verify_power_weight(&inp, &PowerVariant::Split(split_point()?))?,
                TheoremId::PowerMinmax => verify_power_weight(&inp, &PowerVariant::MinMax)?,
                TheoremId::MixedOrder => {
                    verify_mixed_order(fam.as_ref().expect("family present"), &inp, &need(&sc.xi, "xi")?)?
                }
                _ => {
                    let fam = fam.as_ref().expect("family present");
                    let v = match theorem {
                        TheoremId::WeightedLeft | TheoremId::SingleLeft => Variant::Left,
                        TheoremId::WeightedRight | TheoremId::SingleRight => Variant::Right,
                        _ => Variant::Split(split_point()?),
                    };
                    if matches!(theorem, TheoremId::SingleLeft | TheoremId::SingleRight | TheoremId::SingleSplit) {
                        verify_single_function(fam, &inp, &v)?
                    } else {
                        verify_weighted_composition(fam, &inp, &v)?
                    }
                }
            };
            Ok(report)
        }
    }
}

fn effective_mode(theorem: TheoremId, sc: &Scenario, flag: Option<Mode>) -> Mode {
    if theorem.audit_only() {
        Mode::Audit
    } else {
        flag.or(sc.mode).unwrap_or(Mode::Assert)
    }
}

fn write_out(out: Option<&Path>, name: &str, text: &str) -> Result<(), CliError> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(name), text)?;
        }
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run_verify(args: &RunArgs) -> Result<Outcome, CliError> {
    let sc = load_scenario(&args.scenario)?;
    let mut report = verify_scenario(&sc)?;
    report.mode = effective_mode(report.theorem, &sc, args.mode);
    write_out(args.out.as_deref(), "report.json", &document(&report)?)?;
    Ok(if report.mode == Mode::Assert && !report.pass { Outcome::Violation } else { Outcome::Ok })
}

fn run_sweep(args: &RunArgs) -> Result<Outcome, CliError> {
    let sc = load_scenario(&args.scenario)?;
    let theorem = need(&sc.theorem, "theorem")?;
    let mode = effective_mode(theorem, &sc, args.mode);
    let seed = args.seed.or(sc.seed).unwrap_or(0);
    let trials = args.trials.or(sc.trials).ok_or_else(|| config("field 'trials' is required"))?;
    let mut cfg = sc.generator.clone().unwrap_or_default();
    if let Some(t) = sc.tolerance {
        cfg.tol = t;
    }
    let outcome = sweep(theorem, &cfg, trials, seed, mode, threads_from_env()?).map_err(|e| match e {
        Error::InvalidParams(m) => config(m),
        other => CliError::Model(other),
    })?;
    let summary = document(&outcome.summary)?;
    match args.out.as_deref() {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let file = fs::File::create(dir.join("sweep.csv"))?;
            write_rows_csv(&outcome.rows, io::BufWriter::new(file)).map_err(|e| CliError::Io(io::Error::other(e)))?;
            fs::write(dir.join("summary.json"), summary)?;
        }
        None => io::stdout().write_all(summary.as_bytes())?,
    }
    let violated = mode == Mode::Assert && outcome.summary.violation_count > 0;
    Ok(if violated { Outcome::Violation } else { Outcome::Ok })
}

fn run_lyapunov(args: &RunArgs) -> Result<Outcome, CliError> {
    let sc = load_scenario(&args.scenario)?;
    let spec = need(&sc.lyapunov, "lyapunov")?;
    let scale = build_scale(&sc)?;
    let region = build_region(&sc, &scale);
    let r = spec.r.build(&region, 0)?;
    let s = spec.s.build(&region, 1)?;
    let prob = LyapunovProblem::new(scale, region, r, s)?;
    let text = match spec.criterion {
        CriterionKind::General => document(&lyapunov_criterion(&prob)?)?,
        CriterionKind::UnitWeight => document(&lyapunov_unit_weight(&prob)?)?,
        CriterionKind::Continuous => document(&lyapunov_continuous_check(&prob)?)?,
        CriterionKind::Delay => document(&delay_criterion(&prob, &need(&spec.theta, "lyapunov.theta")?)?)?,
    };
    write_out(args.out.as_deref(), "lyapunov.json", &text)?;
    Ok(Outcome::Ok)
}

fn run_integro(args: &RunArgs) -> Result<Outcome, CliError> {
    let sc = load_scenario(&args.scenario)?;
    let spec = need(&sc.integro, "integro")?;
    let scale = build_scale(&sc)?;
    let region = build_region(&sc, &scale);
    let prob = IntegroProblem {
        w1: spec.w1.build(&region, 0)?,
        w2: spec.w2.build(&region, 1)?,
        w3: spec.w3.build(&region, 2)?,
        omega: spec.omega.build(&region, 3)?,
        alpha: need(&sc.alpha, "alpha")?,
        beta: need(&sc.beta, "beta")?,
        gamma: spec.gamma,
        scale,
        region,
    };
    write_out(args.out.as_deref(), "integro.json", &document(&integro_growth_bound(&prob)?)?)?;
    Ok(Outcome::Ok)
}

#[derive(serde::Serialize)]
struct AxisView {
    describe: String,
    points: Vec<f64>,
}

fn run_scale_show(path: &Path) -> Result<Outcome, CliError> {
    let sc = load_scenario(path)?;
    let scale = build_scale(&sc)?;
    let axes: Vec<AxisView> =
        scale.axes().iter().map(|a| AxisView { describe: a.describe(), points: a.points().to_vec() }).collect();
    #[derive(serde::Serialize)]
    struct Axes {
        axes: Vec<AxisView>,
    }
    io::stdout().write_all(document(&Axes { axes })?.as_bytes())?;
    Ok(Outcome::Ok)
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Verify(a) => run_verify(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Lyapunov(a) => run_lyapunov(a),
        Command::Integro(a) => run_integro(a),
        Command::Scale { action: ScaleAction::Show { scenario } } => run_scale_show(scenario),
    }
}

/// Parses arguments, runs the command, and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(o) => o.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
