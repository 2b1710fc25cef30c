use serde::{Deserialize, Serialize};

use super::{Domain, Exponents};
use crate::family::{require_positive, CompositeFamily};
use crate::grid::{try_integrate_with, Anchor, GridFunction, Region};
use crate::sum::{pairwise_sum, pow_nonneg};
use crate::{Error, Result};

/// Kernel integral `V` (left, over `Omega_x`) or `V*` (right, over `Omega-bar_x`):
/// `int |H_orders(x,t)|^{(a+b)/(a+b-1)} tau(t)^{1/(1-a-b)} Delta t`.
///
/// Left values cover `Omega`; right values cover `Omega^{kappa^{lambda-1}}`.
pub fn compute_v(
    dom: &Domain,
    orders: &[usize],
    tau: &GridFunction,
    exps: &Exponents,
    side: Anchor,
) -> Result<GridFunction> {
    require_positive(tau, "tau")?;
    let omega = dom.omega();
    if let Some(s) = omega.summation() {
        if !tau.region().contains_region(&s) {
            return Err(Error::DomainMismatch("tau does not cover the box".into()));
        }
    }
    if orders.len() != dom.dims() || orders.iter().zip(dom.lambda().orders()).any(|(o, l)| *o == 0 || o > l) {
        return Err(Error::InvalidParams(format!("kernel orders {orders:?} out of range")));
    }
    let kp = exps.kernel_power();
    let tp = exps.tau_power();
    let tau_pow = tau.map(|v| v.powf(tp))?;
    match side {
        Anchor::Left => GridFunction::from_fn(omega, |x| {
            let sub = Region { lo: omega.lo.clone(), hi: x.to_vec() };
            kernel_sum(dom, orders, x, &sub, &tau_pow, kp)
        }),
        Anchor::Right => {
            let top = dom.kappa_region();
            GridFunction::from_fn(&top, |x| {
                let sub = Region { lo: x.to_vec(), hi: top.hi.clone() };
                kernel_sum(dom, orders, x, &sub, &tau_pow, kp)
            })
        }
    }
    .and_then(|v| {
        if v.values().iter().all(|x| x.is_finite()) {
            Ok(v)
        } else {
            Err(Error::DivergentConstant("V".into()))
        }
    })
}

fn kernel_sum(dom: &Domain, orders: &[usize], x: &[usize], sub: &Region, tau_pow: &GridFunction, kp: f64) -> f64 {
    let scale = dom.scale();
    match sub.summation() {
        None => 0.0,
        Some(s) => {
            let terms: Vec<f64> = s
                .points()
                .map(|t| dom.kernel(orders, x, &t).abs().powf(kp) * tau_pow.at(&t) * scale.cell_measure(&t))
                .collect();
            pairwise_sum(&terms)
        }
    }
}

fn finish(name: &str, integral: f64, outer: f64) -> Result<f64> {
    let v = pow_nonneg(integral, outer)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::DivergentConstant(name.into()))
    }
}

/// `[int_over sum_i (D_i G(V(x)))^{a(a+b-1)/b} omega_i^{(a+b)/b} tau_i^{-a/b}]^{b/(a+b)}` with one
/// kernel order per component.
pub(crate) fn k_constant(
    dom: &Domain,
    fam: &CompositeFamily,
    omega: &[GridFunction],
    tau: &[GridFunction],
    exps: &Exponents,
    side: Anchor,
    over: &Region,
    orders: &[Vec<usize>],
) -> Result<f64> {
    let m = fam.arity();
    if omega.len() != m || tau.len() != m || orders.len() != m {
        return Err(Error::DomainMismatch(format!("family has arity {m} but weights/orders differ")));
    }
    for w in omega {
        require_positive(w, "omega")?;
    }
    let vs = (0..m).map(|i| compute_v(dom, &orders[i], &tau[i], exps, side)).collect::<Result<Vec<_>>>()?;
    let (a, b, s) = (exps.alpha, exps.beta, exps.sum());
    let e1 = a * (s - 1.0) / b;
    let e2 = s / b;
    let e3 = -a / b;
    let integral = try_integrate_with(dom.scale(), over, |x| {
        let v: Vec<f64> = vs.iter().map(|vi| vi.at(x)).collect();
        let mut acc = 0.0;
        for i in 0..m {
            let d = fam.partial(i, &v)?;
            acc += pow_nonneg(d, e1)? * omega[i].at(x).powf(e2) * tau[i].at(x).powf(e3);
        }
        Ok(acc)
    })?;
    finish("K", integral, b / s)
}

/// `[int_over V(x)^{a+b-1} omega^{(a+b)/b} tau^{-a/b}]^{b/(a+b)}`.
pub(crate) fn l_constant(
    dom: &Domain,
    omega: &GridFunction,
    tau: &GridFunction,
    exps: &Exponents,
    side: Anchor,
    over: &Region,
) -> Result<f64> {
    require_positive(omega, "omega")?;
    let v = compute_v(dom, dom.lambda().orders(), tau, exps, side)?;
    let (a, b, s) = (exps.alpha, exps.beta, exps.sum());
    let integral = try_integrate_with(dom.scale(), over, |x| {
        Ok(pow_nonneg(v.at(x), s - 1.0)? * omega.at(x).powf(s / b) * tau.at(x).powf(-a / b))
    })?;
    finish("L", integral, b / s)
}

/// Constant for one factor of the product inequality: the single-function constant with
/// exponents `(k alpha, k beta)` and weight `omega^k`.
pub(crate) fn t_constant(
    dom: &Domain,
    fam: &CompositeFamily,
    omega: &GridFunction,
    tau: &GridFunction,
    alpha: f64,
    beta: f64,
    k: usize,
    side: Anchor,
    over: &Region,
) -> Result<f64> {
    let kf = k as f64;
    let scaled = Exponents::new(kf * alpha, kf * beta)?;
    let omega_k = omega.map(|w| w.powi(k as i32))?;
    let orders = vec![dom.lambda().orders().to_vec()];
    k_constant(dom, fam, &[omega_k], std::slice::from_ref(tau), &scaled, side, over, &orders)
}

/// `[int_over sum_i D_i G(nu(x)) omega_i^{(a+b)/b} tau_i^{-a/b}]^{b/(a+b)}` with
/// `nu_i(x) = (int_{Omega_x} tau_i^{1/(1-a-b)})^{a(a+b-1)/b}`.
pub(crate) fn p_constant(
    dom: &Domain,
    fam: &CompositeFamily,
    omega: &[GridFunction],
    tau: &[GridFunction],
    exps: &Exponents,
    over: &Region,
) -> Result<f64> {
    let m = fam.arity();
    if omega.len() != m || tau.len() != m {
        return Err(Error::DomainMismatch(format!("family has arity {m} but weights differ")));
    }
    let (a, b, s) = (exps.alpha, exps.beta, exps.sum());
    let ones = vec![1; dom.dims()];
    let nus = (0..m)
        .map(|i| compute_v(dom, &ones, &tau[i], exps, Anchor::Left)?.map(|v| v.powf(a * (s - 1.0) / b)))
        .collect::<Result<Vec<_>>>()?;
    for w in omega {
        require_positive(w, "omega")?;
    }
    let integral = try_integrate_with(dom.scale(), over, |x| {
        let nu: Vec<f64> = nus.iter().map(|n| n.at(x)).collect();
        let mut acc = 0.0;
        for i in 0..m {
            let d = fam.partial(i, &nu)?;
            if d < 0.0 {
                return Err(Error::NegativeBase(d));
            }
            acc += d * omega[i].at(x).powf(s / b) * tau[i].at(x).powf(-a / b);
        }
        Ok(acc)
    })?;
    finish("P", integral, b / s)
}

/// Named constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstantKind {
    K,
    KStar,
    N,
    NStar,
    L,
    LStar,
    T,
    TStar,
    P,
}

/// Inputs for [`compute_weighted_constant`]. `over` defaults to `Omega^{kappa^{lambda-1}}`.
#[derive(Clone, Debug)]
pub struct ConstantInputs<'a> {
    pub domain: &'a Domain,
    pub exps: Exponents,
    pub family: Option<&'a CompositeFamily>,
    pub omega: &'a [GridFunction],
    pub tau: &'a [GridFunction],
    pub over: Option<Region>,
    /// Number of factors for the product constants.
    pub factors: usize,
}

/// Evaluates a named constant from its defining formula.
pub fn compute_weighted_constant(kind: ConstantKind, inp: &ConstantInputs) -> Result<f64> {
    let dom = inp.domain;
    let over = inp.over.clone().unwrap_or_else(|| dom.kappa_region());
    let fam = || inp.family.ok_or_else(|| Error::InvalidParams("constant needs a composite family".into()));
    let lam = dom.lambda().orders().to_vec();
    let single = |what: &str| -> Result<()> {
        if inp.omega.len() != 1 || inp.tau.len() != 1 {
            return Err(Error::InvalidParams(format!("{what} takes exactly one weight pair")));
        }
        Ok(())
    };
    match kind {
        ConstantKind::K | ConstantKind::KStar | ConstantKind::N | ConstantKind::NStar => {
            let f = fam()?;
            if matches!(kind, ConstantKind::N | ConstantKind::NStar) && f.arity() != 1 {
                return Err(Error::InvalidParams("single-function constant needs arity one".into()));
            }
            let side = if matches!(kind, ConstantKind::K | ConstantKind::N) { Anchor::Left } else { Anchor::Right };
            let orders = vec![lam; f.arity()];
            k_constant(dom, f, inp.omega, inp.tau, &inp.exps, side, &over, &orders)
        }
        ConstantKind::L | ConstantKind::LStar => {
            single("L")?;
            let side = if kind == ConstantKind::L { Anchor::Left } else { Anchor::Right };
            l_constant(dom, &inp.omega[0], &inp.tau[0], &inp.exps, side, &over)
        }
        ConstantKind::T | ConstantKind::TStar => {
            single("T")?;
            let side = if kind == ConstantKind::T { Anchor::Left } else { Anchor::Right };
            t_constant(
                dom,
                fam()?,
                &inp.omega[0],
                &inp.tau[0],
                inp.exps.alpha,
                inp.exps.beta,
                inp.factors.max(1),
                side,
                &over,
            )
        }
        ConstantKind::P => p_constant(dom, fam()?, inp.omega, inp.tau, &inp.exps, &over),
    }
}
