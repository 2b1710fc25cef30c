//! One-dimensional finite time scales and their delta calculus.

use serde::{Deserialize, Serialize};

use crate::sum::pairwise_sum;
use crate::{Error, Result};

/// How a grid was generated. Uniform grids stand in for real intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScaleKind {
    Integers,
    Uniform,
    Qscale,
    #[default]
    Custom,
}

/// A finite, strictly increasing grid `t_0 < ... < t_N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTimeScale")]
pub struct TimeScale {
    label: Option<String>,
    #[serde(default)]
    kind: ScaleKind,
    points: Vec<f64>,
}

#[derive(Deserialize)]
struct RawTimeScale {
    label: Option<String>,
    #[serde(default)]
    kind: ScaleKind,
    points: Vec<f64>,
}

impl TryFrom<RawTimeScale> for TimeScale {
    type Error = Error;
    fn try_from(raw: RawTimeScale) -> Result<Self> {
        let mut ts = TimeScale::new(raw.points)?;
        ts.label = raw.label;
        ts.kind = raw.kind;
        Ok(ts)
    }
}

/// Jump selector for [`TimeScale::jump`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Jump {
    Sigma,
    Rho,
    RhoK(usize),
}

impl TimeScale {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints { len: points.len() });
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite(format!("grid point {i}")));
        }
        for i in 1..points.len() {
            // `!(a < b)` also rejects equal points.
            if points[i] <= points[i - 1] {
                return Err(Error::NonMonotonePoints { index: i });
            }
        }
        Ok(TimeScale { label: None, kind: ScaleKind::Custom, points })
    }

    /// `{a, a+1, ..., b}`.
    pub fn integers(a: i64, b: i64) -> Result<Self> {
        if b <= a {
            return Err(Error::TooFewPoints { len: (b - a + 1).max(0) as usize });
        }
        let mut ts = Self::new((a..=b).map(|k| k as f64).collect())?;
        ts.label = Some(format!("integers({a},{b})"));
        ts.kind = ScaleKind::Integers;
        Ok(ts)
    }

    /// `n` equally spaced points from `a` to `b`, endpoints exact.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewPoints { len: n });
        }
        let last = (n - 1) as f64;
        let mut pts: Vec<f64> = (0..n).map(|i| a + (b - a) * (i as f64 / last)).collect();
        pts[n - 1] = b;
        let mut ts = Self::new(pts)?;
        ts.label = Some(format!("uniform({a},{b},{n})"));
        ts.kind = ScaleKind::Uniform;
        Ok(ts)
    }

    /// `{a q^k : k = 0..n-1}` with `q > 1`, `a > 0`.
    pub fn qscale(q: f64, a: f64, n: usize) -> Result<Self> {
        if !(q > 1.0) || !(a > 0.0) {
            return Err(Error::InvalidParams(format!("qscale needs q > 1 and a > 0, got q={q}, a={a}")));
        }
        let mut ts = Self::new((0..n).map(|k| a * q.powi(k as i32)).collect())?;
        ts.label = Some(format!("qscale({q},{a},{n})"));
        ts.kind = ScaleKind::Qscale;
        Ok(ts)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn kind(&self) -> ScaleKind {
        self.kind
    }

    /// Label if present, otherwise a compact listing of the points.
    pub fn describe(&self) -> String {
        match &self.label {
            Some(l) => l.clone(),
            None => format!("custom{:?}", self.points),
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of points, `N + 1`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the maximum, `N`.
    pub fn last(&self) -> usize {
        self.points.len() - 1
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.points[i]
    }

    fn check(&self, i: usize) -> Result<()> {
        if i < self.points.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, len: self.points.len() })
        }
    }

    pub fn jump(&self, i: usize, kind: Jump) -> Result<usize> {
        self.check(i)?;
        Ok(match kind {
            Jump::Sigma => self.sigma(i),
            Jump::Rho => self.rho(i),
            Jump::RhoK(k) => self.rho_k(i, k),
        })
    }

    #[inline]
    pub fn sigma(&self, i: usize) -> usize {
        (i + 1).min(self.last())
    }

    #[inline]
    pub fn rho(&self, i: usize) -> usize {
        i.saturating_sub(1)
    }

    /// `rho` applied `k` times; `k = 0` is the identity.
    #[inline]
    pub fn rho_k(&self, i: usize, k: usize) -> usize {
        i.saturating_sub(k)
    }

    /// Graininess `mu(t_i)`, zero at the maximum.
    #[inline]
    pub fn mu(&self, i: usize) -> f64 {
        if i >= self.last() {
            0.0
        } else {
            self.points[i + 1] - self.points[i]
        }
    }

    /// Forward difference quotients on `T^kappa`.
    pub fn delta_derivative(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.len() {
            return Err(Error::DomainMismatch(format!(
                "function has {} values on a grid of {} points",
                f.len(),
                self.len()
            )));
        }
        Ok((0..self.last()).map(|i| (f[i + 1] - f[i]) / self.mu(i)).collect())
    }

    /// `int_{t_lo}^{t_hi} f Delta t`; `f` is indexed like the grid and must cover `min..max(lo,hi)`.
    pub fn cauchy_integral(&self, f: &[f64], lo: usize, hi: usize) -> Result<f64> {
        self.check(lo)?;
        self.check(hi)?;
        let (a, b, sign) = if lo <= hi { (lo, hi, 1.0) } else { (hi, lo, -1.0) };
        if f.len() < b {
            return Err(Error::DomainMismatch(format!("integrand has {} values, needs {}", f.len(), b)));
        }
        let terms: Vec<f64> = (a..b).map(|i| f[i] * self.mu(i)).collect();
        Ok(sign * pairwise_sum(&terms))
    }
}

/// Generator descriptor as it appears in scenario files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScaleSpec {
    Integers {
        a: i64,
        b: i64,
    },
    Uniform {
        a: f64,
        b: f64,
        n: usize,
    },
    Qscale {
        q: f64,
        a: f64,
        n: usize,
    },
    Custom {
        points: Vec<f64>,
        #[serde(default)]
        label: Option<String>,
    },
}

impl ScaleSpec {
    pub fn build(&self) -> Result<TimeScale> {
        match self {
            ScaleSpec::Integers { a, b } => TimeScale::integers(*a, *b),
            ScaleSpec::Uniform { a, b, n } => TimeScale::uniform(*a, *b, *n),
            ScaleSpec::Qscale { q, a, n } => TimeScale::qscale(*q, *a, *n),
            ScaleSpec::Custom { points, label } => {
                let ts = TimeScale::new(points.clone())?;
                Ok(match label {
                    Some(l) => ts.with_label(l.clone()),
                    None => ts,
                })
            }
        }
    }
}
