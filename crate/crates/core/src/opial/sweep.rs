//! Seeded random instances for every inequality and their aggregate audit.

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::verify::{
    chain_lower_bound_audit, verify_composition_higher_order, verify_composition_unweighted, verify_mixed_order,
    verify_power_weight, verify_product_amgm, verify_rozanova, verify_rozanova_weighted, verify_single_function,
    verify_weighted_composition, PowerVariant, ProductFactor, RozanovaInputs, Variant, WeightedInputs,
};
use super::{admissible_splits, Domain, Exponents, Mode, TheoremId, Tolerance, VerificationReport};
use crate::family::{CompositeFamily, ConvexProfile};
use crate::grid::{Anchor, GridFunction, MultiIndex, ProductScale, Region};
use crate::timescale::{ScaleKind, TimeScale};
use crate::{Error, Result};

/// Shape of the random instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    /// Largest number of dimensions, at most 3.
    pub max_dims: usize,
    /// Largest number of composite arguments.
    pub max_arity: usize,
    /// Axis families to draw from.
    pub scale_kinds: Vec<ScaleKind>,
    /// Add the fixed right-anchored counterexample to the audit of the power and weighted right forms.
    pub include_regression: bool,
    pub tol: Tolerance,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_dims: 3,
            max_arity: 3,
            scale_kinds: vec![ScaleKind::Integers, ScaleKind::Uniform, ScaleKind::Qscale, ScaleKind::Custom],
            include_regression: true,
            tol: Tolerance::default(),
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.max_dims) {
            return Err(Error::InvalidParams(format!("max_dims must be in 1..=3, got {}", self.max_dims)));
        }
        if !(1..=4).contains(&self.max_arity) {
            return Err(Error::InvalidParams(format!("max_arity must be in 1..=4, got {}", self.max_arity)));
        }
        if self.scale_kinds.is_empty() {
            return Err(Error::InvalidParams("scale_kinds must not be empty".into()));
        }
        Ok(())
    }
}

/// One evaluated trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub trial: u64,
    pub report: VerificationReport,
}

/// A violating instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// `None` for the fixed regression instance.
    pub trial: Option<u64>,
    pub lhs: f64,
    pub rhs: f64,
    pub sigma_lhs: Option<f64>,
    pub fingerprint: super::Fingerprint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub theorem: TheoremId,
    pub mode: Mode,
    pub seed: u64,
    pub trials: u64,
    pub evaluated: u64,
    pub aborted: bool,
    pub violation_count: u64,
    /// Violations of the form with `f^sigma` on the left, where reported.
    pub sigma_violation_count: u64,
    pub min_slack: f64,
    pub max_ratio: f64,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome {
    pub summary: SweepSummary,
    pub rows: Vec<SweepRow>,
}

/// Runs `trials` seeded instances of `theorem`. Trial `i` draws from the ChaCha stream `i` of `seed`,
/// so results do not depend on `threads`.
pub fn sweep(
    theorem: TheoremId,
    cfg: &GeneratorConfig,
    trials: u64,
    seed: u64,
    mode: Mode,
    threads: Option<usize>,
) -> Result<SweepOutcome> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    if mode == Mode::Assert && theorem.audit_only() {
        return Err(Error::InvalidParams(format!("{} can only be audited", theorem.name())));
    }
    let run = || (0..trials).into_par_iter().map(|t| trial_report(theorem, cfg, seed, t)).collect::<Vec<_>>();
    let results = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    let mut rows = Vec::with_capacity(results.len());
    let mut violations = Vec::new();
    let mut aborted = false;
    if cfg.include_regression && mode == Mode::Audit {
        if let Some(r) = regression_report(theorem, &cfg.tol)? {
            if !r.pass {
                violations.push(violation(None, &r));
            }
        }
    }
    for (t, res) in (0..trials).zip(results) {
        let report = res?;
        let failed = !report.pass;
        if failed {
            violations.push(violation(Some(t), &report));
        }
        rows.push(SweepRow { trial: t, report });
        if failed && mode == Mode::Assert {
            aborted = t + 1 < trials;
            break;
        }
    }
    let summary = SweepSummary {
        theorem,
        mode,
        seed,
        trials,
        evaluated: rows.len() as u64,
        aborted,
        violation_count: violations.len() as u64,
        sigma_violation_count: rows.iter().filter(|r| r.report.sigma_form.as_ref().is_some_and(|s| !s.pass)).count()
            as u64,
        min_slack: rows.iter().map(|r| r.report.slack).fold(f64::INFINITY, f64::min),
        max_ratio: rows.iter().map(|r| r.report.ratio()).fold(0.0, f64::max),
        violations,
    };
    Ok(SweepOutcome { summary, rows })
}

fn violation(trial: Option<u64>, r: &VerificationReport) -> Violation {
    Violation {
        trial,
        lhs: r.lhs,
        rhs: r.rhs,
        sigma_lhs: r.sigma_form.as_ref().map(|s| s.lhs),
        fingerprint: r.fingerprint.clone(),
    }
}

/// The right-anchored instance on `Z[2,4]` with `f = (2, 1, 0)`, `alpha = beta = 1`, unit weights.
pub fn regression_report(theorem: TheoremId, tol: &Tolerance) -> Result<Option<VerificationReport>> {
    let scale = ProductScale::new(vec![TimeScale::integers(2, 4)?])?;
    let dom = Domain::full(scale, MultiIndex::new(vec![1])?)?;
    let top = GridFunction::constant(&dom.derivative_region(), -1.0)?;
    let ones = GridFunction::constant(dom.omega(), 1.0)?;
    let inp = WeightedInputs {
        domain: &dom,
        tops: std::slice::from_ref(&top),
        omega: std::slice::from_ref(&ones),
        tau: std::slice::from_ref(&ones),
        exps: Exponents::new(1.0, 1.0)?,
        tol: *tol,
    };
    let mut report = match theorem {
        TheoremId::PowerRight => verify_power_weight(&inp, &PowerVariant::Right)?,
        TheoremId::WeightedRight => {
            verify_weighted_composition(&CompositeFamily::SinglePower { exponent: 2.0 }, &inp, &Variant::Right)?
        }
        _ => return Ok(None),
    };
    report.fingerprint.note = Some("regression instance".into());
    Ok(Some(report))
}

/// Evaluates trial `trial` of a sweep.
pub fn trial_report(theorem: TheoremId, cfg: &GeneratorConfig, seed: u64, trial: u64) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let mut report = generate_and_verify(theorem, cfg, &mut rng)?;
    report.fingerprint.seed = Some(seed);
    report.fingerprint.trial = Some(trial);
    Ok(report)
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    Uniform::new_inclusive(lo, hi).sample(rng)
}

fn random_axis(rng: &mut ChaCha8Rng, kinds: &[ScaleKind], n: usize) -> Result<TimeScale> {
    let kind = kinds[rng.gen_range(0..kinds.len())];
    match kind {
        ScaleKind::Integers => {
            let a = rng.gen_range(-3i64..=3);
            TimeScale::integers(a, a + n as i64 - 1)
        }
        ScaleKind::Uniform => {
            let a = uniform(rng, -1.0, 1.0);
            TimeScale::uniform(a, a + uniform(rng, 1.0, 4.0), n)
        }
        ScaleKind::Qscale => {
            let q = uniform(rng, 1.2, 2.5);
            let span = uniform(rng, 1.0, 4.0);
            TimeScale::qscale(q, span / (q.powi(n as i32 - 1) - 1.0), n)
        }
        ScaleKind::Custom => {
            let mut t = uniform(rng, -1.0, 1.0);
            let mut pts = Vec::with_capacity(n);
            for _ in 0..n {
                pts.push(t);
                t += uniform(rng, 0.1, 1.5);
            }
            TimeScale::new(pts)
        }
    }
}

/// Random domain; `first_order` forces `lambda = 1`.
fn random_domain(rng: &mut ChaCha8Rng, cfg: &GeneratorConfig, first_order: bool) -> Result<Domain> {
    let n = rng.gen_range(1..=cfg.max_dims);
    let (max_lambda, max_points) = match n {
        1 => (3, 12),
        2 => (2, 6),
        _ => (2, 5),
    };
    let mut axes = Vec::with_capacity(n);
    let mut lambda = Vec::with_capacity(n);
    for _ in 0..n {
        let l = if first_order { 1 } else { rng.gen_range(1..=max_lambda) };
        let pts = rng.gen_range(2 * l..=max_points.max(2 * l));
        axes.push(random_axis(rng, &cfg.scale_kinds, pts)?);
        lambda.push(l);
    }
    Domain::full(ProductScale::new(axes)?, MultiIndex::new(lambda)?)
}

fn random_field(rng: &mut ChaCha8Rng, region: &Region, lo: f64, hi: f64) -> Result<GridFunction> {
    let dist = Uniform::new_inclusive(lo, hi);
    GridFunction::from_fn(region, |_| dist.sample(rng))
}

/// Log-uniform positive weight in `[0.5, 2]`.
fn random_weight(rng: &mut ChaCha8Rng, region: &Region) -> Result<GridFunction> {
    let dist = Uniform::new_inclusive(0.5f64.ln(), 2f64.ln());
    GridFunction::from_fn(region, |_| dist.sample(rng).exp())
}

fn random_family(rng: &mut ChaCha8Rng, m: usize) -> CompositeFamily {
    let gammas = |rng: &mut ChaCha8Rng| (0..m).map(|_| uniform(rng, 1.0, 3.0)).collect::<Vec<_>>();
    if m == 1 && rng.gen_bool(0.5) {
        return CompositeFamily::SinglePower { exponent: uniform(rng, 1.0, 3.0) };
    }
    match rng.gen_range(0..3) {
        0 => CompositeFamily::SumPower { gamma: gammas(rng) },
        1 => CompositeFamily::ProdPower { gamma: gammas(rng), signed: false },
        _ => CompositeFamily::ProdPower { gamma: gammas(rng), signed: true },
    }
}

fn random_exponents(rng: &mut ChaCha8Rng) -> Result<Exponents> {
    loop {
        let (a, b) = (uniform(rng, 0.3, 1.5), uniform(rng, 0.3, 1.5));
        if a + b >= 1.1 {
            return Exponents::new(a, b);
        }
    }
}

fn random_profile(rng: &mut ChaCha8Rng, allow_exp: bool) -> ConvexProfile {
    if allow_exp && rng.gen_bool(0.3) {
        ConvexProfile::ExpMinusOne
    } else {
        ConvexProfile::Power { gamma: uniform(rng, 1.0, 3.0) }
    }
}

fn generate_and_verify(theorem: TheoremId, cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let tol = cfg.tol;
    if theorem == TheoremId::ChainRule {
        return chain_instance(rng, cfg);
    }
    let first_order = theorem == TheoremId::Composition;
    let dom = random_domain(rng, cfg, first_order)?;
    let m = match theorem {
        TheoremId::SingleLeft
        | TheoremId::SingleRight
        | TheoremId::SingleSplit
        | TheoremId::PowerLeft
        | TheoremId::PowerRight
        | TheoremId::PowerSplit
        | TheoremId::PowerMinmax => 1,
        _ => rng.gen_range(1..=cfg.max_arity),
    };
    let fam = random_family(rng, m);
    let d = dom.derivative_region();
    let omega_box = dom.omega().clone();
    match theorem {
        TheoremId::Composition | TheoremId::CompositionHigher => {
            let tops = (0..m).map(|_| random_field(rng, &d, -1.0, 1.0)).collect::<Result<Vec<_>>>()?;
            if first_order {
                verify_composition_unweighted(&dom, &fam, &tops, &tol)
            } else {
                verify_composition_higher_order(&dom, &fam, &tops, &tol)
            }
        }
        TheoremId::ProductLeft | TheoremId::ProductRight => {
            let k = m;
            let mut parts = Vec::with_capacity(k);
            for _ in 0..k {
                let fam = CompositeFamily::SinglePower { exponent: uniform(rng, 1.0, 3.0) };
                let e = random_exponents(rng)?;
                let top = random_field(rng, &d, -1.0, 1.0)?;
                let omega = random_weight(rng, &omega_box)?;
                let tau = random_weight(rng, &omega_box)?;
                parts.push((fam, top, omega, tau, e));
            }
            let factors: Vec<ProductFactor> = parts
                .iter()
                .map(|(fam, top, omega, tau, e)| ProductFactor {
                    family: fam,
                    top,
                    omega,
                    tau,
                    alpha: e.alpha,
                    beta: e.beta,
                })
                .collect();
            let side = if theorem == TheoremId::ProductLeft { Anchor::Left } else { Anchor::Right };
            verify_product_amgm(&dom, &factors, side, &tol)
        }
        TheoremId::Rozanova | TheoremId::RozanovaWeighted => {
            let allow_exp = dom.lambda().is_ones();
            let profiles: Vec<ConvexProfile> = (0..m).map(|_| random_profile(rng, allow_exp)).collect();
            let mut varphi = Vec::with_capacity(m);
            let mut tops = Vec::with_capacity(m);
            for _ in 0..m {
                let phi = dom.anchor_left(&random_field(rng, &d, 0.5, 2.0)?)?;
                let dphi = crate::grid::mixed_delta(dom.scale(), &phi, &vec![1; dom.dims()])?;
                let raw = random_field(rng, &d, -1.0, 1.0)?;
                let top = GridFunction::from_fn(&d, |x| if dphi.at(x) > 0.0 { raw.at(x) } else { 0.0 })?;
                varphi.push(phi);
                tops.push(top);
            }
            let inp = RozanovaInputs { domain: &dom, profiles: &profiles, varphi: &varphi, tops: &tops, tol };
            if theorem == TheoremId::Rozanova {
                verify_rozanova(&fam, &inp)
            } else {
                let exps = random_exponents(rng)?;
                let omega = (0..m).map(|_| random_weight(rng, &omega_box)).collect::<Result<Vec<_>>>()?;
                let tau = (0..m).map(|_| random_weight(rng, &omega_box)).collect::<Result<Vec<_>>>()?;
                verify_rozanova_weighted(&fam, &inp, &omega, &tau, &exps)
            }
        }
        _ => {
            let exps = random_exponents(rng)?;
            let tops = (0..m).map(|_| random_field(rng, &d, -1.0, 1.0)).collect::<Result<Vec<_>>>()?;
            let omega = (0..m).map(|_| random_weight(rng, &omega_box)).collect::<Result<Vec<_>>>()?;
            let tau = (0..m).map(|_| random_weight(rng, &omega_box)).collect::<Result<Vec<_>>>()?;
            let inp = WeightedInputs { domain: &dom, tops: &tops, omega: &omega, tau: &tau, exps, tol };
            let split = |rng: &mut ChaCha8Rng| {
                let cs = admissible_splits(&dom);
                cs[rng.gen_range(0..cs.len())].clone()
            };
            match theorem {
                TheoremId::WeightedLeft => verify_weighted_composition(&fam, &inp, &Variant::Left),
                TheoremId::WeightedRight => verify_weighted_composition(&fam, &inp, &Variant::Right),
                TheoremId::WeightedSplit => verify_weighted_composition(&fam, &inp, &Variant::Split(split(rng))),
                TheoremId::SingleLeft => verify_single_function(&fam, &inp, &Variant::Left),
                TheoremId::SingleRight => verify_single_function(&fam, &inp, &Variant::Right),
                TheoremId::SingleSplit => verify_single_function(&fam, &inp, &Variant::Split(split(rng))),
                TheoremId::PowerLeft => verify_power_weight(&inp, &PowerVariant::Left),
                TheoremId::PowerRight => verify_power_weight(&inp, &PowerVariant::Right),
                TheoremId::PowerSplit => verify_power_weight(&inp, &PowerVariant::Split(split(rng))),
                TheoremId::PowerMinmax => verify_power_weight(&inp, &PowerVariant::MinMax),
                TheoremId::MixedOrder => {
                    let lam = dom.lambda().orders().to_vec();
                    let xis: Vec<Vec<usize>> =
                        (0..m).map(|_| lam.iter().map(|&l| rng.gen_range(0..l)).collect()).collect();
                    verify_mixed_order(&fam, &inp, &xis)
                }
                _ => unreachable!("handled above"),
            }
        }
    }
}

fn chain_instance(rng: &mut ChaCha8Rng, cfg: &GeneratorConfig) -> Result<VerificationReport> {
    let n = rng.gen_range(2..=12);
    let ts = random_axis(rng, &cfg.scale_kinds, n)?;
    let m = rng.gen_range(1..=cfg.max_arity);
    let fam = random_family(rng, m);
    let g: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let mut v = uniform(rng, 0.0, 1.0);
            (0..n)
                .map(|_| {
                    let cur = v;
                    if rng.gen_bool(0.8) {
                        v += uniform(rng, 0.05, 1.0);
                    }
                    cur
                })
                .collect()
        })
        .collect();
    let tol = Tolerance { rel: 1e-12, abs: 1e-12 };
    let audit = chain_lower_bound_audit(&fam, &ts, &g, &tol)?;
    let worst =
        audit.reports.into_iter().min_by(|a, b| a.slack.total_cmp(&b.slack)).ok_or(Error::TooFewPoints { len: n })?;
    Ok(worst)
}

/// CSV with one line per evaluated trial.
pub fn write_rows_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "trial",
        "theorem",
        "pass",
        "lhs",
        "rhs",
        "slack",
        "ratio",
        "sigma_lhs",
        "sigma_pass",
        "lambda",
        "family",
        "alpha",
        "beta",
        "scales",
    ])?;
    let f = |v: f64| format!("{v:.16e}");
    let opt = |v: Option<f64>| v.map(f).unwrap_or_default();
    for row in rows {
        let r = &row.report;
        let fp = &r.fingerprint;
        w.write_record([
            row.trial.to_string(),
            r.theorem.name().to_string(),
            r.pass.to_string(),
            f(r.lhs),
            f(r.rhs),
            f(r.slack),
            f(r.ratio()),
            opt(r.sigma_form.as_ref().map(|s| s.lhs)),
            r.sigma_form.as_ref().map(|s| s.pass.to_string()).unwrap_or_default(),
            fp.lambda.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" "),
            fp.family.clone(),
            opt(fp.alpha),
            opt(fp.beta),
            fp.scales.join(" x "),
        ])?;
    }
    w.flush()?;
    Ok(())
}
