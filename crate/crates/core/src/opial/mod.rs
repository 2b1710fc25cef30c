//! Both sides of the Opial-type inequalities, their constants, and randomized sweeps.

mod constants;
mod domain;
mod report;
pub mod sweep;
mod verify;

pub use constants::{compute_v, compute_weighted_constant, ConstantInputs, ConstantKind};
pub use domain::Domain;
pub use report::{Fingerprint, Mode, SigmaForm, TheoremId, Tolerance, VerificationReport};
pub use verify::{
    admissible_splits, chain_lower_bound_audit, verify_composition_higher_order, verify_composition_unweighted,
    verify_mixed_order, verify_power_weight, verify_product_amgm, verify_rozanova, verify_rozanova_weighted,
    verify_single_function, verify_weighted_composition, ChainAudit, PowerVariant, ProductFactor, RozanovaInputs,
    Variant, WeightedInputs,
};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Exponent pair `(alpha, beta)` with `alpha, beta > 0` and `alpha + beta > 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub alpha: f64,
    pub beta: f64,
}

impl Exponents {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha + beta > 1.0) || !(alpha + beta).is_finite() {
            return Err(Error::InvalidParams(format!(
                "need alpha, beta > 0 and alpha + beta > 1, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(Exponents { alpha, beta })
    }

    /// `alpha + beta`.
    pub fn sum(&self) -> f64 {
        self.alpha + self.beta
    }

    /// Power applied to the Taylor kernel inside `V`: `(alpha+beta)/(alpha+beta-1)`.
    pub fn kernel_power(&self) -> f64 {
        self.sum() / (self.sum() - 1.0)
    }

    /// Power applied to `tau` inside `V`: `1/(1-alpha-beta)`.
    pub fn tau_power(&self) -> f64 {
        1.0 / (1.0 - self.sum())
    }

    /// `(alpha/(alpha+beta))^{alpha/(alpha+beta)}`.
    pub fn power_weight_factor(&self) -> f64 {
        let r = self.alpha / self.sum();
        r.powf(r)
    }
}
