use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Inequalities the harness can evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    /// Pointwise lower bound for the delta derivative of a composite function.
    ChainRule,
    /// First-order composite inequality.
    Composition,
    /// Higher-order composite inequality with the Taylor bound `H_lambda(b, a)`.
    CompositionHigher,
    WeightedLeft,
    WeightedRight,
    WeightedSplit,
    /// Weighted composite inequality with lower-order derivatives inside `G`.
    MixedOrder,
    SingleLeft,
    SingleRight,
    SingleSplit,
    PowerLeft,
    PowerRight,
    PowerSplit,
    PowerMinmax,
    ProductLeft,
    ProductRight,
    /// Convex-profile generalization of Rozanova's inequality.
    Rozanova,
    RozanovaWeighted,
}

impl TheoremId {
    pub const ALL: [TheoremId; 18] = [
        TheoremId::ChainRule,
        TheoremId::Composition,
        TheoremId::CompositionHigher,
        TheoremId::WeightedLeft,
        TheoremId::WeightedRight,
        TheoremId::WeightedSplit,
        TheoremId::MixedOrder,
        TheoremId::SingleLeft,
        TheoremId::SingleRight,
        TheoremId::SingleSplit,
        TheoremId::PowerLeft,
        TheoremId::PowerRight,
        TheoremId::PowerSplit,
        TheoremId::PowerMinmax,
        TheoremId::ProductLeft,
        TheoremId::ProductRight,
        TheoremId::Rozanova,
        TheoremId::RozanovaWeighted,
    ];

    /// Right-anchored and split forms are only ever audited.
    pub fn audit_only(self) -> bool {
        matches!(
            self,
            TheoremId::WeightedRight
                | TheoremId::WeightedSplit
                | TheoremId::SingleRight
                | TheoremId::SingleSplit
                | TheoremId::PowerRight
                | TheoremId::PowerSplit
                | TheoremId::PowerMinmax
                | TheoremId::ProductRight
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::ChainRule => "chain_rule",
            TheoremId::Composition => "composition",
            TheoremId::CompositionHigher => "composition_higher",
            TheoremId::WeightedLeft => "weighted_left",
            TheoremId::WeightedRight => "weighted_right",
            TheoremId::WeightedSplit => "weighted_split",
            TheoremId::MixedOrder => "mixed_order",
            TheoremId::SingleLeft => "single_left",
            TheoremId::SingleRight => "single_right",
            TheoremId::SingleSplit => "single_split",
            TheoremId::PowerLeft => "power_left",
            TheoremId::PowerRight => "power_right",
            TheoremId::PowerSplit => "power_split",
            TheoremId::PowerMinmax => "power_minmax",
            TheoremId::ProductLeft => "product_left",
            TheoremId::ProductRight => "product_right",
            TheoremId::Rozanova => "rozanova",
            TheoremId::RozanovaWeighted => "rozanova_weighted",
        }
    }
}

impl std::str::FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown theorem id {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Assert,
    Audit,
}

/// Pass rule `lhs <= rhs + rel |rhs| + abs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-9, abs: 1e-12 }
    }
}

impl Tolerance {
    pub fn passes(&self, lhs: f64, rhs: f64) -> bool {
        lhs <= rhs + self.rel * rhs.abs() + self.abs
    }
}

/// Identifies the instance a report was computed on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct Fingerprint {
    pub seed: Option<u64>,
    pub trial: Option<u64>,
    pub scales: Vec<String>,
    pub lambda: Vec<usize>,
    pub family: String,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    /// Factor applied to the top derivatives to meet radius preconditions.
    pub rescale: f64,
    pub note: Option<String>,
}

/// The same inequality with `f` replaced by `f^sigma` on the left-hand side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaForm {
    pub lhs: f64,
    pub slack: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: TheoremId,
    pub mode: Mode,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
    pub constants: BTreeMap<String, f64>,
    pub sigma_form: Option<SigmaForm>,
    pub fingerprint: Fingerprint,
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(name.to_string()))
    }
}

impl VerificationReport {
    pub fn new(
        theorem: TheoremId,
        lhs: f64,
        rhs: f64,
        tol: &Tolerance,
        constants: BTreeMap<String, f64>,
        fingerprint: Fingerprint,
    ) -> Result<Self> {
        let lhs = finite("left-hand side", lhs)?;
        let rhs = finite("right-hand side", rhs)?;
        for (k, v) in &constants {
            if !v.is_finite() {
                return Err(Error::DivergentConstant(k.clone()));
            }
        }
        Ok(VerificationReport {
            theorem,
            mode: if theorem.audit_only() { Mode::Audit } else { Mode::Assert },
            lhs,
            rhs,
            slack: rhs - lhs,
            pass: tol.passes(lhs, rhs),
            constants,
            sigma_form: None,
            fingerprint,
        })
    }

    pub fn with_sigma_form(mut self, lhs_sigma: f64, tol: &Tolerance) -> Result<Self> {
        let lhs = finite("sigma-shifted left-hand side", lhs_sigma)?;
        self.sigma_form = Some(SigmaForm { lhs, slack: self.rhs - lhs, pass: tol.passes(lhs, self.rhs) });
        Ok(self)
    }

    /// `lhs / rhs`, or zero when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.rhs > 0.0 {
            self.lhs / self.rhs
        } else if self.lhs <= 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}
