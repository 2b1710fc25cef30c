use std::collections::BTreeMap;

use super::constants::{k_constant, p_constant, t_constant};
use super::{compute_v, Domain, Exponents, Fingerprint, TheoremId, Tolerance, VerificationReport};
use crate::family::{require_positive, CompositeFamily, ConvexProfile};
use crate::grid::{check_class_membership, mixed_delta, try_integrate_with, Anchor, GridFunction, Region};
use crate::sum::pow_nonneg;
use crate::timescale::TimeScale;
use crate::{Error, Result};

/// Which anchoring and which right-hand side to use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Variant {
    Left,
    Right,
    /// Two half-domain bounds joined at the given lattice point.
    Split(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PowerVariant {
    Left,
    Right,
    Split(Vec<usize>),
    /// Split chosen to balance the two half-domain constants.
    MinMax,
}

/// Shared inputs of the weighted inequalities; `tops` are the top derivatives on the
/// derivative box, weights live on `Omega`.
#[derive(Clone, Debug)]
pub struct WeightedInputs<'a> {
    pub domain: &'a Domain,
    pub tops: &'a [GridFunction],
    pub omega: &'a [GridFunction],
    pub tau: &'a [GridFunction],
    pub exps: Exponents,
    pub tol: Tolerance,
}

fn fingerprint(dom: &Domain, family: String, exps: Option<&Exponents>) -> Fingerprint {
    Fingerprint {
        scales: dom.scale().describe(),
        lambda: dom.lambda().orders().to_vec(),
        family,
        alpha: exps.map(|e| e.alpha),
        beta: exps.map(|e| e.beta),
        rescale: 1.0,
        ..Fingerprint::default()
    }
}

enum How {
    Left,
    Right,
    Both,
}

/// Anchored functions together with the top derivatives actually used.
fn anchored(dom: &Domain, tops: &[GridFunction], how: How) -> Result<(Vec<GridFunction>, Vec<GridFunction>)> {
    let mut used = Vec::with_capacity(tops.len());
    let mut fs = Vec::with_capacity(tops.len());
    for g in tops {
        match how {
            How::Left => {
                fs.push(dom.anchor_left(g)?);
                used.push(g.clone());
            }
            How::Right => {
                fs.push(dom.anchor_right(g)?);
                used.push(g.clone());
            }
            How::Both => {
                let (t, f) = dom.anchor_both(g)?;
                fs.push(f);
                used.push(t);
            }
        }
    }
    Ok((used, fs))
}

/// Split points `c` of `Omega^{kappa^{lambda-1}}` for which `[a, c]` and `[c, rho^{lambda-1}(b)]`
/// partition the summation lattice, in lexicographic order.
pub fn admissible_splits(dom: &Domain) -> Vec<Vec<usize>> {
    let d = dom.derivative_region();
    dom.kappa_region().points().filter(|c| partitions(&d, c)).collect()
}

fn partitions(d: &Region, c: &[usize]) -> bool {
    d.points().all(|x| x.iter().zip(c).all(|(a, b)| a < b) || x.iter().zip(c).all(|(a, b)| a >= b))
}

fn check_split(dom: &Domain, c: &[usize]) -> Result<(Region, Region)> {
    let kappa = dom.kappa_region();
    if !kappa.contains(c) || !partitions(&dom.derivative_region(), c) {
        return Err(Error::InadmissibleSplit(c.to_vec()));
    }
    Ok((Region { lo: kappa.lo.clone(), hi: c.to_vec() }, Region { lo: c.to_vec(), hi: kappa.hi.clone() }))
}

fn check_lengths(m: usize, inp: &WeightedInputs) -> Result<()> {
    if inp.tops.len() != m || inp.omega.len() != m || inp.tau.len() != m {
        return Err(Error::DomainMismatch(format!(
            "arity {m} but {} functions, {} omega, {} tau",
            inp.tops.len(),
            inp.omega.len(),
            inp.tau.len()
        )));
    }
    for w in inp.omega.iter().chain(inp.tau) {
        require_positive(w, "weight")?;
        if !w.region().contains_region(inp.domain.omega()) {
            return Err(Error::DomainMismatch("weights must cover the box".into()));
        }
    }
    Ok(())
}

fn check_radius(values: &[f64], radius: f64) -> Result<()> {
    match values.iter().find(|v| !(v.abs() < radius)) {
        Some(&v) => Err(Error::RadiusExceeded { value: v, radius }),
        None => Ok(()),
    }
}

/// `int_over sum_i [D_i G(|args(x)|)]^alpha |top_i|^alpha omega_i`.
fn weighted_lhs(
    dom: &Domain,
    fam: &CompositeFamily,
    args: &[GridFunction],
    tops: &[GridFunction],
    omega: &[GridFunction],
    alpha: f64,
    over: &Region,
) -> Result<f64> {
    try_integrate_with(dom.scale(), over, |x| {
        let u: Vec<f64> = args.iter().map(|f| f.at(x).abs()).collect();
        let mut acc = 0.0;
        for i in 0..u.len() {
            acc += pow_nonneg(fam.partial(i, &u)?, alpha)? * tops[i].at(x).abs().powf(alpha) * omega[i].at(x);
        }
        Ok(acc)
    })
}

/// `int_over |top|^power tau`.
fn energy(dom: &Domain, top: &GridFunction, tau: &GridFunction, power: f64, over: &Region) -> Result<f64> {
    try_integrate_with(dom.scale(), over, |x| Ok(top.at(x).abs().powf(power) * tau.at(x)))
}

fn energies(dom: &Domain, inp: &WeightedInputs, tops: &[GridFunction], over: &Region) -> Result<Vec<f64>> {
    let s = inp.exps.sum();
    tops.iter().zip(inp.tau).map(|(g, t)| energy(dom, g, t, s, over)).collect()
}

/// `K [G(U)]^{alpha/(alpha+beta)}`.
fn weighted_bound(fam: &CompositeFamily, k: f64, u: &[f64], exps: &Exponents) -> Result<f64> {
    check_radius(u, fam.radius())?;
    Ok(k * pow_nonneg(fam.eval(u)?, exps.alpha / exps.sum())?)
}

fn weighted_core(
    theorem: TheoremId,
    names: (&str, &str),
    fam: &CompositeFamily,
    inp: &WeightedInputs,
    variant: &Variant,
) -> Result<VerificationReport> {
    let m = fam.arity();
    check_lengths(m, inp)?;
    let dom = inp.domain;
    let kappa = dom.kappa_region();
    let lam = vec![dom.lambda().orders().to_vec(); m];
    let mut constants = BTreeMap::new();
    let alpha = inp.exps.alpha;
    let (tops, fs, rhs, sigma) = match variant {
        Variant::Left => {
            let (tops, fs) = anchored(dom, inp.tops, How::Left)?;
            let k = k_constant(dom, fam, inp.omega, inp.tau, &inp.exps, Anchor::Left, &kappa, &lam)?;
            constants.insert(names.0.to_string(), k);
            let u = energies(dom, inp, &tops, &kappa)?;
            (tops, fs, weighted_bound(fam, k, &u, &inp.exps)?, false)
        }
        Variant::Right => {
            let (tops, fs) = anchored(dom, inp.tops, How::Right)?;
            let k = k_constant(dom, fam, inp.omega, inp.tau, &inp.exps, Anchor::Right, &kappa, &lam)?;
            constants.insert(names.1.to_string(), k);
            let u = energies(dom, inp, &tops, &kappa)?;
            (tops, fs, weighted_bound(fam, k, &u, &inp.exps)?, true)
        }
        Variant::Split(c) => {
            let (lower, upper) = check_split(dom, c)?;
            let (tops, fs) = anchored(dom, inp.tops, How::Both)?;
            let kl = k_constant(dom, fam, inp.omega, inp.tau, &inp.exps, Anchor::Left, &lower, &lam)?;
            let kr = k_constant(dom, fam, inp.omega, inp.tau, &inp.exps, Anchor::Right, &upper, &lam)?;
            constants.insert(names.0.to_string(), kl);
            constants.insert(names.1.to_string(), kr);
            for (j, cj) in c.iter().enumerate() {
                constants.insert(format!("c{j}"), *cj as f64);
            }
            let ul = energies(dom, inp, &tops, &lower)?;
            let ur = energies(dom, inp, &tops, &upper)?;
            let rhs = weighted_bound(fam, kl, &ul, &inp.exps)? + weighted_bound(fam, kr, &ur, &inp.exps)?;
            (tops, fs, rhs, true)
        }
    };
    let lhs = weighted_lhs(dom, fam, &fs, &tops, inp.omega, alpha, &kappa)?;
    let fp = fingerprint(dom, fam.describe(), Some(&inp.exps));
    let report = VerificationReport::new(theorem, lhs, rhs, &inp.tol, constants, fp)?;
    if sigma {
        let shifted = fs.iter().map(|f| dom.sigma_shift(f)).collect::<Result<Vec<_>>>()?;
        let lhs_sigma = weighted_lhs(dom, fam, &shifted, &tops, inp.omega, alpha, &kappa)?;
        report.with_sigma_form(lhs_sigma, &inp.tol)
    } else {
        Ok(report)
    }
}

/// Weighted composite inequality with the constants `K` (left) and `K*` (right).
pub fn verify_weighted_composition(
    fam: &CompositeFamily,
    inp: &WeightedInputs,
    variant: &Variant,
) -> Result<VerificationReport> {
    let id = match variant {
        Variant::Left => TheoremId::WeightedLeft,
        Variant::Right => TheoremId::WeightedRight,
        Variant::Split(_) => TheoremId::WeightedSplit,
    };
    weighted_core(id, ("K", "K*"), fam, inp, variant)
}

/// One-function form of the weighted inequality, constants `N` and `N*`.
pub fn verify_single_function(
    fam: &CompositeFamily,
    inp: &WeightedInputs,
    variant: &Variant,
) -> Result<VerificationReport> {
    if fam.arity() != 1 {
        return Err(Error::InvalidParams("single-function form needs a one-argument family".into()));
    }
    let id = match variant {
        Variant::Left => TheoremId::SingleLeft,
        Variant::Right => TheoremId::SingleRight,
        Variant::Split(_) => TheoremId::SingleSplit,
    };
    weighted_core(id, ("N", "N*"), fam, inp, variant)
}

/// Weighted inequality with `|d^{xi_i} f_i|` inside `G` and shifted kernels `H_{lambda - xi_i}`.
pub fn verify_mixed_order(
    fam: &CompositeFamily,
    inp: &WeightedInputs,
    xis: &[Vec<usize>],
) -> Result<VerificationReport> {
    let m = fam.arity();
    check_lengths(m, inp)?;
    let dom = inp.domain;
    let lam = dom.lambda().orders();
    if xis.len() != m {
        return Err(Error::InvalidXi(format!("expected {m} lower orders, got {}", xis.len())));
    }
    let mut orders = Vec::with_capacity(m);
    for xi in xis {
        if xi.len() != dom.dims() || xi.iter().zip(lam).any(|(x, l)| x >= l) {
            return Err(Error::InvalidXi(format!("{xi:?} must satisfy 0 <= xi_j < lambda_j = {lam:?}")));
        }
        orders.push(lam.iter().zip(xi).map(|(l, x)| l - x).collect::<Vec<_>>());
    }
    let kappa = dom.kappa_region();
    let (tops, fs) = anchored(dom, inp.tops, How::Left)?;
    let args = fs.iter().zip(xis).map(|(f, xi)| mixed_delta(dom.scale(), f, xi)).collect::<Result<Vec<_>>>()?;
    let k = k_constant(dom, fam, inp.omega, inp.tau, &inp.exps, Anchor::Left, &kappa, &orders)?;
    let u = energies(dom, inp, &tops, &kappa)?;
    let rhs = weighted_bound(fam, k, &u, &inp.exps)?;
    let lhs = weighted_lhs(dom, fam, &args, &tops, inp.omega, inp.exps.alpha, &kappa)?;
    let mut constants = BTreeMap::new();
    constants.insert("K_hat".to_string(), k);
    let fp = fingerprint(dom, fam.describe(), Some(&inp.exps));
    VerificationReport::new(TheoremId::MixedOrder, lhs, rhs, &inp.tol, constants, fp)
}

/// `int_over |f|^beta |top|^alpha omega`.
fn power_lhs(
    dom: &Domain,
    f: &GridFunction,
    top: &GridFunction,
    omega: &GridFunction,
    exps: &Exponents,
    over: &Region,
) -> Result<f64> {
    try_integrate_with(dom.scale(), over, |x| {
        Ok(f.at(x).abs().powf(exps.beta) * top.at(x).abs().powf(exps.alpha) * omega.at(x))
    })
}

fn l_from_v(
    dom: &Domain,
    v: &GridFunction,
    omega: &GridFunction,
    tau: &GridFunction,
    exps: &Exponents,
    over: &Region,
) -> Result<f64> {
    let (a, b, s) = (exps.alpha, exps.beta, exps.sum());
    let integral = try_integrate_with(dom.scale(), over, |x| {
        Ok(pow_nonneg(v.at(x), s - 1.0)? * omega.at(x).powf(s / b) * tau.at(x).powf(-a / b))
    })?;
    let l = pow_nonneg(integral, b / s)?;
    if l.is_finite() {
        Ok(l)
    } else {
        Err(Error::DivergentConstant("L".into()))
    }
}

/// Power-weight inequality `int |f|^beta |d^lambda f|^alpha omega <= c L int |d^lambda f|^{alpha+beta} tau`.
pub fn verify_power_weight(inp: &WeightedInputs, variant: &PowerVariant) -> Result<VerificationReport> {
    check_lengths(1, inp)?;
    let dom = inp.domain;
    let exps = &inp.exps;
    let (omega, tau) = (&inp.omega[0], &inp.tau[0]);
    let kappa = dom.kappa_region();
    let lam = dom.lambda().orders();
    let factor = exps.power_weight_factor();
    let s = exps.sum();
    let mut constants = BTreeMap::new();
    constants.insert("factor".to_string(), factor);
    let v_left = || compute_v(dom, lam, tau, exps, Anchor::Left);
    let v_right = || compute_v(dom, lam, tau, exps, Anchor::Right);
    let (id, top, f, rhs, sigma) = match variant {
        PowerVariant::Left => {
            let (tops, fs) = anchored(dom, inp.tops, How::Left)?;
            let l = l_from_v(dom, &v_left()?, omega, tau, exps, &kappa)?;
            constants.insert("L".into(), l);
            let e = energy(dom, &tops[0], tau, s, &kappa)?;
            (TheoremId::PowerLeft, tops[0].clone(), fs[0].clone(), factor * l * e, false)
        }
        PowerVariant::Right => {
            let (tops, fs) = anchored(dom, inp.tops, How::Right)?;
            let l = l_from_v(dom, &v_right()?, omega, tau, exps, &kappa)?;
            constants.insert("L*".into(), l);
            let e = energy(dom, &tops[0], tau, s, &kappa)?;
            (TheoremId::PowerRight, tops[0].clone(), fs[0].clone(), factor * l * e, true)
        }
        PowerVariant::Split(c) => {
            let (lower, upper) = check_split(dom, c)?;
            let (tops, fs) = anchored(dom, inp.tops, How::Both)?;
            let ll = l_from_v(dom, &v_left()?, omega, tau, exps, &lower)?;
            let lr = l_from_v(dom, &v_right()?, omega, tau, exps, &upper)?;
            constants.insert("L".into(), ll);
            constants.insert("L*".into(), lr);
            for (j, cj) in c.iter().enumerate() {
                constants.insert(format!("c{j}"), *cj as f64);
            }
            let el = energy(dom, &tops[0], tau, s, &lower)?;
            let er = energy(dom, &tops[0], tau, s, &upper)?;
            (TheoremId::PowerSplit, tops[0].clone(), fs[0].clone(), factor * (ll * el + lr * er), true)
        }
        PowerVariant::MinMax => {
            let (tops, fs) = anchored(dom, inp.tops, How::Both)?;
            let (vl, vr) = (v_left()?, v_right()?);
            let mut best: Option<(f64, Vec<usize>, f64, f64)> = None;
            for c in admissible_splits(dom) {
                let (lower, upper) = check_split(dom, &c)?;
                let ll = l_from_v(dom, &vl, omega, tau, exps, &lower)?;
                let lr = l_from_v(dom, &vr, omega, tau, exps, &upper)?;
                let gap = (ll - lr).abs();
                if best.as_ref().is_none_or(|b| gap < b.0) {
                    best = Some((gap, c, ll, lr));
                }
            }
            let (_, c, ll, lr) = best.ok_or_else(|| Error::InadmissibleSplit(vec![]))?;
            constants.insert("L".into(), ll);
            constants.insert("L*".into(), lr);
            for (j, cj) in c.iter().enumerate() {
                constants.insert(format!("c{j}"), *cj as f64);
            }
            let e = energy(dom, &tops[0], tau, s, &kappa)?;
            (TheoremId::PowerMinmax, tops[0].clone(), fs[0].clone(), factor * ll.max(lr) * e, true)
        }
    };
    let lhs = power_lhs(dom, &f, &top, omega, exps, &kappa)?;
    let fp = fingerprint(dom, "power".into(), Some(exps));
    let report = VerificationReport::new(id, lhs, rhs, &inp.tol, constants, fp)?;
    if sigma {
        let lhs_sigma = power_lhs(dom, &dom.sigma_shift(&f)?, &top, omega, exps, &kappa)?;
        report.with_sigma_form(lhs_sigma, &inp.tol)
    } else {
        Ok(report)
    }
}

/// One factor of the product inequality.
#[derive(Clone, Debug)]
pub struct ProductFactor<'a> {
    pub family: &'a CompositeFamily,
    pub top: &'a GridFunction,
    pub omega: &'a GridFunction,
    pub tau: &'a GridFunction,
    pub alpha: f64,
    pub beta: f64,
}

fn product_lhs(dom: &Domain, factors: &[ProductFactor], args: &[GridFunction], over: &Region) -> Result<f64> {
    try_integrate_with(dom.scale(), over, |x| {
        let mut acc = 1.0;
        for (fac, f) in factors.iter().zip(args) {
            let d = fac.family.partial(0, &[f.at(x).abs()])?;
            acc *= pow_nonneg(d, fac.alpha)? * fac.top.at(x).abs().powf(fac.alpha) * fac.omega.at(x);
        }
        Ok(acc)
    })
}

/// Product of `k` single-function integrands bounded through the arithmetic-geometric mean inequality.
pub fn verify_product_amgm(
    dom: &Domain,
    factors: &[ProductFactor],
    side: Anchor,
    tol: &Tolerance,
) -> Result<VerificationReport> {
    let k = factors.len();
    if k == 0 {
        return Err(Error::InvalidParams("product needs at least one factor".into()));
    }
    let kf = k as f64;
    for fac in factors {
        if fac.family.arity() != 1 {
            return Err(Error::InvalidParams("product factors need one-argument families".into()));
        }
        if !(fac.alpha > 0.0 && fac.beta > 0.0 && fac.alpha + fac.beta > 1.0 / kf) {
            return Err(Error::InvalidParams(format!(
                "factor exponents need alpha, beta > 0 and alpha + beta > 1/k, got ({}, {})",
                fac.alpha, fac.beta
            )));
        }
        require_positive(fac.omega, "omega")?;
        require_positive(fac.tau, "tau")?;
    }
    let kappa = dom.kappa_region();
    let tops: Vec<GridFunction> = factors.iter().map(|f| f.top.clone()).collect();
    let (_, fs) = anchored(dom, &tops, if side == Anchor::Left { How::Left } else { How::Right })?;
    let mut constants = BTreeMap::new();
    let mut terms = Vec::with_capacity(k);
    for (j, fac) in factors.iter().enumerate() {
        let t = t_constant(dom, fac.family, fac.omega, fac.tau, fac.alpha, fac.beta, k, side, &kappa)?;
        let name = if side == Anchor::Left { "T" } else { "T*" };
        constants.insert(format!("{name}{j}"), t);
        let s = fac.alpha + fac.beta;
        let e = energy(dom, fac.top, fac.tau, kf * s, &kappa)?;
        check_radius(&[e], fac.family.radius())?;
        terms.push(t * pow_nonneg(fac.family.eval(&[e])?, fac.alpha / s)?);
    }
    let rhs = terms.iter().sum::<f64>() / kf;
    let lhs = product_lhs(dom, factors, &fs, &kappa)?;
    let fams: Vec<String> = factors.iter().map(|f| f.family.describe()).collect();
    let mut fp = fingerprint(dom, fams.join("*"), None);
    fp.note = Some(format!("exponents {:?}", factors.iter().map(|f| (f.alpha, f.beta)).collect::<Vec<_>>()));
    let id = if side == Anchor::Left { TheoremId::ProductLeft } else { TheoremId::ProductRight };
    let report = VerificationReport::new(id, lhs, rhs, tol, constants, fp)?;
    if side == Anchor::Right {
        let shifted = fs.iter().map(|f| dom.sigma_shift(f)).collect::<Result<Vec<_>>>()?;
        let lhs_sigma = product_lhs(dom, factors, &shifted, &kappa)?;
        report.with_sigma_form(lhs_sigma, tol)
    } else {
        Ok(report)
    }
}

/// Inputs for the convex-profile inequalities. `varphi` are the grid fields on `Omega`,
/// `profiles` the convex functions applied to the ratios.
#[derive(Clone, Debug)]
pub struct RozanovaInputs<'a> {
    pub domain: &'a Domain,
    pub profiles: &'a [ConvexProfile],
    pub varphi: &'a [GridFunction],
    pub tops: &'a [GridFunction],
    pub tol: Tolerance,
}

/// `w * profile(a / w)`, continued by zero at `w = a = 0`.
fn perspective(profile: &ConvexProfile, w: f64, a: f64, x: &[usize]) -> Result<f64> {
    if w > 0.0 {
        Ok(w * profile.eval(a / w))
    } else if a == 0.0 {
        Ok(0.0)
    } else {
        Err(Error::ZeroDenominator(x.to_vec()))
    }
}

/// Per-component fields shared by both convex-profile inequalities: the `G`/`F` arguments
/// `varphi * profile(|f| / varphi)` and the integrands `W = d varphi * profile(H |top| / d varphi)`.
struct ProfileFields {
    args: Vec<GridFunction>,
    w: Vec<GridFunction>,
    bound: f64,
}

fn profile_fields(inp: &RozanovaInputs, m: usize) -> Result<ProfileFields> {
    let dom = inp.domain;
    if inp.profiles.len() != m || inp.varphi.len() != m || inp.tops.len() != m {
        return Err(Error::DomainMismatch(format!("arity {m} but profile/field/function counts differ")));
    }
    for p in inp.profiles {
        p.validate()?;
    }
    let scale = dom.scale();
    let lam = dom.lambda().orders();
    let ones = vec![1; dom.dims()];
    let d = dom.derivative_region();
    let (tops, fs) = anchored(dom, inp.tops, How::Left)?;
    let bound = dom.taylor_bound();
    let mut args = Vec::with_capacity(m);
    let mut w = Vec::with_capacity(m);
    for i in 0..m {
        let phi = inp.varphi[i].restrict(dom.omega())?;
        let unit = GridFunction::constant(dom.omega(), 1.0)?;
        let cls = check_class_membership(scale, &phi, lam, Anchor::Left, 1.0, &unit)?;
        if cls.max_boundary_residual > crate::grid::BOUNDARY_TOL {
            return Err(Error::HypothesisViolated(format!(
                "field {i} does not vanish to the required order on the lower faces (residual {})",
                cls.max_boundary_residual
            )));
        }
        let dphi = mixed_delta(scale, &phi, &ones)?;
        let tiny = 1e-12 * dphi.max_abs().max(1.0);
        if dphi.min() < -tiny {
            return Err(Error::HypothesisViolated(format!("mixed first difference of field {i} is negative")));
        }
        let profile = &inp.profiles[i];
        let mut a = Vec::with_capacity(d.len());
        let mut wi = Vec::with_capacity(d.len());
        for x in d.points() {
            a.push(perspective(profile, phi.at(&x).max(0.0), fs[i].at(&x).abs(), &x)?);
            wi.push(perspective(profile, dphi.at(&x).max(0.0), bound * tops[i].at(&x).abs(), &x)?);
        }
        args.push(GridFunction::new(d.clone(), a)?);
        w.push(GridFunction::new(d.clone(), wi)?);
    }
    Ok(ProfileFields { args, w, bound })
}

/// Convex-profile composite inequality with an `H`-class family.
pub fn verify_rozanova(fam: &CompositeFamily, inp: &RozanovaInputs) -> Result<VerificationReport> {
    let m = fam.arity();
    let fields = profile_fields(inp, m)?;
    let dom = inp.domain;
    let kappa = dom.kappa_region();
    let lhs = try_integrate_with(dom.scale(), &kappa, |x| {
        let u: Vec<f64> = fields.args.iter().map(|a| a.at(x)).collect();
        check_radius(&u, fam.radius())?;
        let mut acc = 0.0;
        for i in 0..m {
            acc += fam.partial(i, &u)? * fields.w[i].at(x);
        }
        Ok(acc)
    })?;
    let totals = fields
        .w
        .iter()
        .map(|w| try_integrate_with(dom.scale(), &kappa, |x| Ok(w.at(x))))
        .collect::<Result<Vec<_>>>()?;
    check_radius(&totals, fam.radius())?;
    let rhs = fam.eval(&totals)?;
    let mut constants = BTreeMap::new();
    constants.insert("H".to_string(), fields.bound);
    let profiles: Vec<String> = inp.profiles.iter().map(ConvexProfile::describe).collect();
    let mut fp = fingerprint(dom, fam.describe(), None);
    fp.note = Some(format!("profiles {}", profiles.join(",")));
    VerificationReport::new(TheoremId::Rozanova, lhs, rhs, &inp.tol, constants, fp)
}

/// Weighted convex-profile inequality with a `G`-class family and the constant `P`.
pub fn verify_rozanova_weighted(
    fam: &CompositeFamily,
    inp: &RozanovaInputs,
    omega: &[GridFunction],
    tau: &[GridFunction],
    exps: &Exponents,
) -> Result<VerificationReport> {
    let m = fam.arity();
    if omega.len() != m || tau.len() != m {
        return Err(Error::DomainMismatch(format!("arity {m} but weight counts differ")));
    }
    let fields = profile_fields(inp, m)?;
    let dom = inp.domain;
    let kappa = dom.kappa_region();
    let (a, s) = (exps.alpha, exps.sum());
    let p = p_constant(dom, fam, omega, tau, exps, &kappa)?;
    let lhs = try_integrate_with(dom.scale(), &kappa, |x| {
        let u: Vec<f64> = fields.args.iter().map(|f| f.at(x).powf(a)).collect();
        check_radius(&u, fam.radius())?;
        let mut acc = 0.0;
        for i in 0..m {
            acc += fam.partial(i, &u)? * fields.w[i].at(x).powf(a) * omega[i].at(x);
        }
        Ok(acc)
    })?;
    let z = (0..m)
        .map(|i| try_integrate_with(dom.scale(), &kappa, |x| Ok(fields.w[i].at(x).powf(s) * tau[i].at(x))))
        .collect::<Result<Vec<_>>>()?;
    check_radius(&z, fam.radius())?;
    let rhs = p * pow_nonneg(fam.eval(&z)?, a / s)?;
    let mut constants = BTreeMap::new();
    constants.insert("P".to_string(), p);
    constants.insert("H".to_string(), fields.bound);
    let profiles: Vec<String> = inp.profiles.iter().map(ConvexProfile::describe).collect();
    let mut fp = fingerprint(dom, fam.describe(), Some(exps));
    fp.note = Some(format!("profiles {}", profiles.join(",")));
    VerificationReport::new(TheoremId::RozanovaWeighted, lhs, rhs, &inp.tol, constants, fp)
}

fn composition_core(
    id: TheoremId,
    dom: &Domain,
    fam: &CompositeFamily,
    tops: &[GridFunction],
    tol: &Tolerance,
) -> Result<VerificationReport> {
    let m = fam.arity();
    if tops.len() != m {
        return Err(Error::DomainMismatch(format!("arity {m} but {} functions", tops.len())));
    }
    let kappa = dom.kappa_region();
    let (tops, fs) = anchored(dom, tops, How::Left)?;
    let h = dom.taylor_bound();
    let totals = tops
        .iter()
        .map(|g| try_integrate_with(dom.scale(), &kappa, |x| Ok(g.at(x).abs())))
        .collect::<Result<Vec<_>>>()?;
    let scaled: Vec<f64> = totals.iter().map(|t| h * t).collect();
    check_radius(&scaled, fam.radius())?;
    let rhs = fam.eval(&scaled)? / h;
    let lhs = try_integrate_with(dom.scale(), &kappa, |x| {
        let u: Vec<f64> = fs.iter().map(|f| f.at(x).abs()).collect();
        let mut acc = 0.0;
        for i in 0..m {
            acc += fam.partial(i, &u)? * tops[i].at(x).abs();
        }
        Ok(acc)
    })?;
    let mut constants = BTreeMap::new();
    constants.insert("H".to_string(), h);
    VerificationReport::new(id, lhs, rhs, tol, constants, fingerprint(dom, fam.describe(), None))
}

/// First-order composite inequality; the domain's derivative order must be all ones.
pub fn verify_composition_unweighted(
    dom: &Domain,
    fam: &CompositeFamily,
    tops: &[GridFunction],
    tol: &Tolerance,
) -> Result<VerificationReport> {
    if !dom.lambda().is_ones() {
        return Err(Error::InvalidParams("first-order composite inequality needs lambda = 1".into()));
    }
    composition_core(TheoremId::Composition, dom, fam, tops, tol)
}

/// Higher-order composite inequality with the factor `H_lambda(b, a)`.
pub fn verify_composition_higher_order(
    dom: &Domain,
    fam: &CompositeFamily,
    tops: &[GridFunction],
    tol: &Tolerance,
) -> Result<VerificationReport> {
    composition_core(TheoremId::CompositionHigher, dom, fam, tops, tol)
}

/// Pointwise audit of the chain lower bound on a one-dimensional scale.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainAudit {
    pub reports: Vec<VerificationReport>,
    pub min_slack: f64,
    pub pass: bool,
}

/// Checks `[F(g)]^Delta >= sum_i D_i F(g) g_i^Delta` at every point of `T^kappa`.
/// In each report `lhs` is the sum of partials and `rhs` the difference quotient.
pub fn chain_lower_bound_audit(
    fam: &CompositeFamily,
    ts: &TimeScale,
    g: &[Vec<f64>],
    tol: &Tolerance,
) -> Result<ChainAudit> {
    let m = fam.arity();
    if g.len() != m {
        return Err(Error::DomainMismatch(format!("arity {m} but {} functions", g.len())));
    }
    let mut derivs = Vec::with_capacity(m);
    for (i, gi) in g.iter().enumerate() {
        let d = ts.delta_derivative(gi)?;
        if let Some(k) = d.iter().position(|v| *v < 0.0) {
            return Err(Error::HypothesisViolated(format!("function {i} decreases at index {k}")));
        }
        if let Some(v) = gi.iter().find(|v| !(**v >= 0.0 && **v < fam.radius())) {
            return Err(Error::HypothesisViolated(format!("function {i} takes the value {v} outside [0, R)")));
        }
        derivs.push(d);
    }
    let mut reports = Vec::with_capacity(ts.last());
    let mut min_slack = f64::INFINITY;
    for t in 0..ts.last() {
        let now: Vec<f64> = g.iter().map(|gi| gi[t]).collect();
        let next: Vec<f64> = g.iter().map(|gi| gi[t + 1]).collect();
        let rhs = (fam.eval(&next)? - fam.eval(&now)?) / ts.mu(t);
        let mut lhs = 0.0;
        for i in 0..m {
            lhs += fam.partial(i, &now)? * derivs[i][t];
        }
        let fp = Fingerprint {
            scales: vec![ts.describe()],
            lambda: vec![1],
            family: fam.describe(),
            rescale: 1.0,
            note: Some(format!("point {t}")),
            ..Fingerprint::default()
        };
        let r = VerificationReport::new(TheoremId::ChainRule, lhs, rhs, tol, BTreeMap::new(), fp)?;
        min_slack = min_slack.min(r.slack);
        reports.push(r);
    }
    let pass = reports.iter().all(|r| r.pass);
    Ok(ChainAudit { reports, min_slack, pass })
}
