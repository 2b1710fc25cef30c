//! Composite functions `F(u_1, ..., u_m)`, convex profiles and weight fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grid::GridFunction;
use crate::{Error, Result};

/// Closed-form or tabulated composite function with its partial derivatives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CompositeFamily {
    /// `prod |u_i|^{gamma_i}`, optionally times `prod sign(u_i)`.
    ProdPower {
        gamma: Vec<f64>,
        #[serde(default)]
        signed: bool,
    },
    /// `sum |u_i|^{gamma_i}`.
    SumPower { gamma: Vec<f64> },
    /// `|u|^e`, one argument.
    SinglePower { exponent: f64 },
    /// One-argument function given by knots, values and derivative values, interpolated
    /// piecewise linearly on `[0, x_last]` and extended oddly (derivative evenly).
    Table { x: Vec<f64>, f: Vec<f64>, df: Vec<f64> },
}

fn sgn(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn interp(xs: &[f64], ys: &[f64], u: f64) -> f64 {
    let k = match xs.iter().position(|&x| x >= u) {
        Some(0) => return ys[0],
        Some(k) => k,
        None => return ys[ys.len() - 1],
    };
    let w = (u - xs[k - 1]) / (xs[k] - xs[k - 1]);
    ys[k - 1] + w * (ys[k] - ys[k - 1])
}

impl CompositeFamily {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        match self {
            CompositeFamily::ProdPower { gamma, .. } | CompositeFamily::SumPower { gamma } => {
                if gamma.is_empty() || gamma.iter().any(|g| !(*g > 0.0) || !g.is_finite()) {
                    return bad("exponents must be positive and finite");
                }
            }
            CompositeFamily::SinglePower { exponent } => {
                if !(*exponent > 0.0) || !exponent.is_finite() {
                    return bad("exponent must be positive and finite");
                }
            }
            CompositeFamily::Table { x, f, df } => {
                if x.len() < 2 || x.len() != f.len() || x.len() != df.len() {
                    return bad("table needs at least two knots with matching values and derivatives");
                }
                if x[0] != 0.0 || f[0] != 0.0 {
                    return bad("table must start at the origin with value zero");
                }
                if x.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("table knots must be strictly increasing");
                }
            }
        }
        Ok(())
    }

    /// Number of arguments `m`.
    pub fn arity(&self) -> usize {
        match self {
            CompositeFamily::ProdPower { gamma, .. } | CompositeFamily::SumPower { gamma } => gamma.len(),
            CompositeFamily::SinglePower { .. } | CompositeFamily::Table { .. } => 1,
        }
    }

    /// Radius `R` of the domain `(-R, R)^m`.
    pub fn radius(&self) -> f64 {
        match self {
            CompositeFamily::Table { x, .. } => x[x.len() - 1],
            _ => f64::INFINITY,
        }
    }

    /// Whether membership in both classes is known analytically (power families with exponents at least one).
    pub fn certified(&self) -> bool {
        match self {
            CompositeFamily::ProdPower { gamma, .. } | CompositeFamily::SumPower { gamma } => {
                gamma.iter().all(|&g| g >= 1.0)
            }
            CompositeFamily::SinglePower { exponent } => *exponent >= 1.0,
            CompositeFamily::Table { .. } => false,
        }
    }

    fn check(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.arity() {
            return Err(Error::DomainMismatch(format!("expected {} arguments, got {}", self.arity(), u.len())));
        }
        let r = self.radius();
        if let Some(&v) = u.iter().find(|v| !(v.abs() < r)) {
            return Err(Error::OutsideRadius { value: v, radius: r });
        }
        Ok(())
    }

    pub fn eval(&self, u: &[f64]) -> Result<f64> {
        self.check(u)?;
        Ok(match self {
            CompositeFamily::ProdPower { gamma, signed } => {
                gamma.iter().zip(u).map(|(&g, &x)| x.abs().powf(g) * if *signed { sgn(x) } else { 1.0 }).product()
            }
            CompositeFamily::SumPower { gamma } => gamma.iter().zip(u).map(|(&g, &x)| x.abs().powf(g)).sum(),
            CompositeFamily::SinglePower { exponent } => u[0].abs().powf(*exponent),
            CompositeFamily::Table { x, f, .. } => sgn(u[0]) * interp(x, f, u[0].abs()),
        })
    }

    /// `D_i F(u)`; at a zero argument the right derivative is used.
    pub fn partial(&self, i: usize, u: &[f64]) -> Result<f64> {
        self.check(u)?;
        if i >= self.arity() {
            return Err(Error::IndexOutOfRange { index: i, len: self.arity() });
        }
        Ok(match self {
            CompositeFamily::ProdPower { gamma, signed } => {
                let mut d = gamma[i] * u[i].abs().powf(gamma[i] - 1.0);
                if !*signed {
                    d *= sgn(u[i]);
                }
                for (k, (&g, &x)) in gamma.iter().zip(u).enumerate() {
                    if k != i {
                        d *= x.abs().powf(g) * if *signed { sgn(x) } else { 1.0 };
                    }
                }
                d
            }
            CompositeFamily::SumPower { gamma } => gamma[i] * u[i].abs().powf(gamma[i] - 1.0) * sgn(u[i]),
            CompositeFamily::SinglePower { exponent } => exponent * u[0].abs().powf(exponent - 1.0) * sgn(u[0]),
            CompositeFamily::Table { x, df, .. } => interp(x, df, u[0].abs()),
        })
    }

    /// Short human-readable descriptor.
    pub fn describe(&self) -> String {
        match self {
            CompositeFamily::ProdPower { gamma, signed } => {
                format!("prod_power{:?}{}", gamma, if *signed { "_signed" } else { "" })
            }
            CompositeFamily::SumPower { gamma } => format!("sum_power{gamma:?}"),
            CompositeFamily::SinglePower { exponent } => format!("single_power({exponent})"),
            CompositeFamily::Table { x, .. } => format!("table({} knots)", x.len()),
        }
    }
}

/// Result of a randomized class audit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassAudit {
    pub pass: bool,
    pub samples: usize,
    /// Largest relative violation found (zero or negative when none).
    pub worst_violation: f64,
    pub witness: Option<Vec<f64>>,
}

/// Tolerance for the class audits.
const CLASS_TOL: f64 = 1e-12;

fn sample_bound(fam: &CompositeFamily) -> f64 {
    fam.radius().min(8.0)
}

fn rel(excess: f64, scale: f64) -> f64 {
    excess / scale.abs().max(1.0)
}

/// Audits that every partial is nonnegative and increasing in each variable on `(0, R)^m`.
pub fn check_h_class(fam: &CompositeFamily, samples: usize, seed: u64) -> Result<ClassAudit> {
    fam.validate()?;
    let m = fam.arity();
    let top = sample_bound(fam);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for _ in 0..samples {
        let u: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..top) * (1.0 - 1e-9) + 1e-12).collect();
        for k in 0..m {
            let mut v = u.clone();
            v[k] = u[k] + rng.gen::<f64>() * (top * (1.0 - 1e-9) - u[k]);
            for i in 0..m {
                let du = fam.partial(i, &u)?;
                let dv = fam.partial(i, &v)?;
                let viol = rel(-du, du).max(rel(du - dv, du));
                if viol > worst {
                    worst = viol;
                    if viol > CLASS_TOL {
                        witness = Some(u.clone());
                    }
                }
            }
        }
    }
    Ok(ClassAudit { pass: worst <= CLASS_TOL, samples, worst_violation: worst, witness })
}

/// Audits `0 <= D_i G(x) <= D_i G(y)^{1/p} D_i G(z)^{1/q}` whenever `x_i <= y_i^{1/p} z_i^{1/q}`.
pub fn check_g_class(fam: &CompositeFamily, p: f64, samples: usize, seed: u64) -> Result<ClassAudit> {
    fam.validate()?;
    if !(p > 1.0) {
        return Err(Error::InvalidParams(format!("conjugate exponent must exceed one, got {p}")));
    }
    let q = p / (p - 1.0);
    let m = fam.arity();
    let top = sample_bound(fam) * (1.0 - 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for _ in 0..samples {
        let y: Vec<f64> = (0..m).map(|_| rng.gen_range(1e-6..top)).collect();
        let z: Vec<f64> = (0..m).map(|_| rng.gen_range(1e-6..top)).collect();
        let x: Vec<f64> = (0..m).map(|i| rng.gen_range(1e-6..=1.0) * y[i].powf(1.0 / p) * z[i].powf(1.0 / q)).collect();
        for i in 0..m {
            let dx = fam.partial(i, &x)?;
            let bound = fam.partial(i, &y)?.max(0.0).powf(1.0 / p) * fam.partial(i, &z)?.max(0.0).powf(1.0 / q);
            let viol = rel(-dx, dx).max(rel(dx - bound, bound));
            if viol > worst {
                worst = viol;
                if viol > CLASS_TOL {
                    witness = Some(x.clone());
                }
            }
        }
    }
    Ok(ClassAudit { pass: worst <= CLASS_TOL, samples, worst_violation: worst, witness })
}

/// Convex, nonnegative, increasing profile on `[0, inf)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConvexProfile {
    Power {
        gamma: f64,
    },
    ExpMinusOne,
    /// Piecewise-linear interpolant through knots starting at the origin.
    Table {
        x: Vec<f64>,
        y: Vec<f64>,
    },
}

impl ConvexProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexProfile::Power { gamma } if !(*gamma >= 1.0) || !gamma.is_finite() => {
                Err(Error::InvalidParams(format!("profile exponent must be at least one, got {gamma}")))
            }
            ConvexProfile::Table { x, y } if x.len() < 2 || x.len() != y.len() || x[0] != 0.0 => {
                Err(Error::InvalidParams("profile table needs matching knots starting at zero".into()))
            }
            _ => Ok(()),
        }
    }

    /// `phi(u)` for `u >= 0`; tables extend linearly past the last knot.
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            ConvexProfile::Power { gamma } => u.powf(*gamma),
            ConvexProfile::ExpMinusOne => u.exp_m1(),
            ConvexProfile::Table { x, y } => {
                let n = x.len();
                if u > x[n - 1] {
                    let slope = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
                    y[n - 1] + slope * (u - x[n - 1])
                } else {
                    interp(x, y, u)
                }
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ConvexProfile::Power { gamma } => format!("power({gamma})"),
            ConvexProfile::ExpMinusOne => "exp_minus_one".into(),
            ConvexProfile::Table { x, .. } => format!("table({} knots)", x.len()),
        }
    }
}

/// Sampled audit of convexity (midpoint), nonnegativity and monotonicity on `[0, top]`.
pub fn check_convex(profile: &ConvexProfile, top: f64, samples: usize, seed: u64) -> Result<ClassAudit> {
    profile.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for _ in 0..samples {
        let a = rng.gen_range(0.0..top);
        let b = rng.gen_range(0.0..top);
        let (fa, fb) = (profile.eval(a), profile.eval(b));
        let mid = profile.eval(0.5 * (a + b));
        let (lo, hi) = if a <= b { (fa, fb) } else { (fb, fa) };
        let viol = rel(mid - 0.5 * (fa + fb), fa + fb).max(rel(-fa, fa)).max(rel(lo - hi, hi));
        if viol > worst {
            worst = viol;
            if viol > CLASS_TOL {
                witness = Some(vec![a, b]);
            }
        }
    }
    Ok(ClassAudit { pass: worst <= CLASS_TOL, samples, worst_violation: worst, witness })
}

/// A strictly positive grid function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Weight(GridFunction);

impl Weight {
    pub fn new(f: GridFunction) -> Result<Self> {
        if let Some(v) = f.values().iter().find(|v| !(**v > 0.0)) {
            return Err(Error::NonpositiveWeight(format!("found value {v}")));
        }
        Ok(Weight(f))
    }

    pub fn field(&self) -> &GridFunction {
        &self.0
    }

    pub fn into_inner(self) -> GridFunction {
        self.0
    }
}

/// Rejects grid functions with a nonpositive value.
pub fn require_positive(f: &GridFunction, name: &str) -> Result<()> {
    if let Some(v) = f.values().iter().find(|v| !(**v > 0.0)) {
        return Err(Error::NonpositiveWeight(format!("{name} takes the value {v}")));
    }
    Ok(())
}
