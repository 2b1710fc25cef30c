//! Product time scales, boxes, grid functions, mixed partial differences, n-fold integrals,
//! Taylor kernels and boundary-anchored construction of functions from their top derivative.

use serde::{Deserialize, Serialize};

use crate::monomial::MonomialTable;
use crate::sum::{pairwise_sum, pow_nonneg};
use crate::timescale::TimeScale;
use crate::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 4;

/// Cartesian product of one-dimensional time scales.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<TimeScale>", into = "Vec<TimeScale>")]
pub struct ProductScale {
    axes: Vec<TimeScale>,
}

impl TryFrom<Vec<TimeScale>> for ProductScale {
    type Error = Error;
    fn try_from(axes: Vec<TimeScale>) -> Result<Self> {
        ProductScale::new(axes)
    }
}

impl From<ProductScale> for Vec<TimeScale> {
    fn from(p: ProductScale) -> Self {
        p.axes
    }
}

impl ProductScale {
    pub fn new(axes: Vec<TimeScale>) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_DIM {
            return Err(Error::InvalidParams(format!("dimension must be between 1 and {MAX_DIM}, got {}", axes.len())));
        }
        Ok(ProductScale { axes })
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, j: usize) -> &TimeScale {
        &self.axes[j]
    }

    pub fn axes(&self) -> &[TimeScale] {
        &self.axes
    }

    /// The box spanning every axis completely.
    pub fn full_region(&self) -> Region {
        Region { lo: vec![0; self.dims()], hi: self.axes.iter().map(|a| a.last()).collect() }
    }

    /// `prod_j mu_j(x_j)`.
    #[inline]
    pub fn cell_measure(&self, x: &[usize]) -> f64 {
        let mut m = 1.0;
        for (j, &xj) in x.iter().enumerate() {
            m *= self.axes[j].mu(xj);
        }
        m
    }

    /// Per-axis monomial tables up to order `max_k[j]`.
    pub fn monomial_tables(&self, max_k: &[usize]) -> Vec<MonomialTable> {
        self.axes.iter().zip(max_k).map(|(a, &k)| MonomialTable::build(a, k)).collect()
    }

    pub fn describe(&self) -> Vec<String> {
        self.axes.iter().map(TimeScale::describe).collect()
    }
}

/// Per-dimension derivative orders, each at least one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct MultiIndex(Vec<usize>);

impl TryFrom<Vec<usize>> for MultiIndex {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        MultiIndex::new(v)
    }
}

impl From<MultiIndex> for Vec<usize> {
    fn from(m: MultiIndex) -> Self {
        m.0
    }
}

impl MultiIndex {
    pub fn new(orders: Vec<usize>) -> Result<Self> {
        if orders.is_empty() || orders.contains(&0) {
            return Err(Error::InvalidParams(format!("derivative orders must be positive, got {orders:?}")));
        }
        Ok(MultiIndex(orders))
    }

    pub fn ones(n: usize) -> Self {
        MultiIndex(vec![1; n])
    }

    pub fn orders(&self) -> &[usize] {
        &self.0
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    /// `|lambda|`.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_ones(&self) -> bool {
        self.0.iter().all(|&l| l == 1)
    }
}

/// Inclusive index box `lo <= x <= hi` inside a product scale.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region {
    pub lo: Vec<usize>,
    pub hi: Vec<usize>,
}

impl Region {
    pub fn new(lo: Vec<usize>, hi: Vec<usize>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::DomainMismatch("box corners have different dimensions".into()));
        }
        if let Some(j) = (0..lo.len()).find(|&j| lo[j] > hi[j]) {
            return Err(Error::DomainMismatch(format!("box is inverted along dimension {j}")));
        }
        Ok(Region { lo, hi })
    }

    pub fn dims(&self) -> usize {
        self.lo.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l + 1).collect()
    }

    /// Number of lattice points.
    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: &[usize]) -> bool {
        x.len() == self.dims() && (0..x.len()).all(|j| self.lo[j] <= x[j] && x[j] <= self.hi[j])
    }

    pub fn contains_region(&self, other: &Region) -> bool {
        other.dims() == self.dims() && (0..self.dims()).all(|j| self.lo[j] <= other.lo[j] && other.hi[j] <= self.hi[j])
    }

    /// Row-major offset of a point known to lie in the box.
    #[inline]
    pub fn offset(&self, x: &[usize]) -> usize {
        let mut off = 0;
        for j in 0..self.lo.len() {
            off = off * (self.hi[j] - self.lo[j] + 1) + (x[j] - self.lo[j]);
        }
        off
    }

    /// Lattice points in row-major order (last dimension fastest).
    pub fn points(&self) -> Points {
        Points { lo: self.lo.clone(), hi: self.hi.clone(), cur: Some(self.lo.clone()) }
    }

    /// The points an n-fold integral over this box sums: `lo <= x < hi` in every dimension.
    /// `None` when the box is degenerate along some axis.
    pub fn summation(&self) -> Option<Region> {
        if (0..self.dims()).any(|j| self.hi[j] == self.lo[j]) {
            return None;
        }
        Some(Region { lo: self.lo.clone(), hi: self.hi.iter().map(|h| h - 1).collect() })
    }

    /// Same box with `hi_j` moved by `delta[j]` (negative shrinks).
    pub fn resize_hi(&self, delta: &[isize]) -> Result<Region> {
        let mut hi = self.hi.clone();
        for j in 0..self.dims() {
            let v = hi[j] as isize + delta[j];
            if v < self.lo[j] as isize {
                return Err(Error::AxisTooShort { dim: j });
            }
            hi[j] = v as usize;
        }
        Ok(Region { lo: self.lo.clone(), hi })
    }

    /// Checks `a < rho^{lambda-1}(b)` along every axis.
    pub fn check_admissible(&self, scale: &ProductScale, lambda: &MultiIndex) -> Result<()> {
        if lambda.dims() != self.dims() || scale.dims() != self.dims() {
            return Err(Error::DomainMismatch("dimension of the derivative order differs from the box".into()));
        }
        for j in 0..self.dims() {
            let top = scale.axis(j).rho_k(self.hi[j], lambda.orders()[j] - 1);
            if self.lo[j] >= top {
                return Err(Error::InadmissibleLambda { dim: j });
            }
        }
        Ok(())
    }

    /// `Omega`.
    pub fn omega(&self) -> Region {
        self.clone()
    }

    /// `Omega_x = [a, x]`.
    pub fn omega_at(&self, x: &[usize]) -> Result<Region> {
        self.require(x)?;
        Ok(Region { lo: self.lo.clone(), hi: x.to_vec() })
    }

    /// `Omega-bar_x = [x, rho^{lambda-1}(b)]`.
    pub fn omega_bar_at(&self, scale: &ProductScale, x: &[usize], lambda: &MultiIndex) -> Result<Region> {
        self.require(x)?;
        let top = self.omega_kappa(scale, lambda)?;
        if !top.contains(x) {
            return Err(Error::DomainMismatch(format!("point {x:?} lies above rho^(lambda-1)(b)")));
        }
        Ok(Region { lo: x.to_vec(), hi: top.hi })
    }

    /// `Omega^{kappa^{lambda-1}} = [a, rho^{lambda-1}(b)]`.
    pub fn omega_kappa(&self, scale: &ProductScale, lambda: &MultiIndex) -> Result<Region> {
        self.check_admissible(scale, lambda)?;
        let hi = (0..self.dims()).map(|j| scale.axis(j).rho_k(self.hi[j], lambda.orders()[j] - 1)).collect();
        Ok(Region { lo: self.lo.clone(), hi })
    }

    /// `Omega'`: the box with the first dimension removed.
    pub fn omega_prime(&self) -> Result<Region> {
        if self.dims() < 2 {
            return Err(Error::DomainMismatch("a one-dimensional box has no reduced box".into()));
        }
        Ok(Region { lo: self.lo[1..].to_vec(), hi: self.hi[1..].to_vec() })
    }

    fn require(&self, x: &[usize]) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::DomainMismatch(format!("point {x:?} is outside the box")))
        }
    }
}

/// Row-major odometer over a box.
pub struct Points {
    lo: Vec<usize>,
    hi: Vec<usize>,
    cur: Option<Vec<usize>>,
}

impl Iterator for Points {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let mut next = out.clone();
        let mut j = next.len();
        loop {
            if j == 0 {
                self.cur = None;
                break;
            }
            j -= 1;
            if next[j] < self.hi[j] {
                next[j] += 1;
                self.cur = Some(next);
                break;
            }
            next[j] = self.lo[j];
        }
        Some(out)
    }
}

/// Real values on every lattice point of a box, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGridFunction")]
pub struct GridFunction {
    region: Region,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawGridFunction {
    region: Region,
    values: Vec<f64>,
}

impl TryFrom<RawGridFunction> for GridFunction {
    type Error = Error;
    fn try_from(raw: RawGridFunction) -> Result<Self> {
        let region = Region::new(raw.region.lo, raw.region.hi)?;
        GridFunction::new(region, raw.values)
    }
}

impl GridFunction {
    pub fn new(region: Region, values: Vec<f64>) -> Result<Self> {
        if values.len() != region.len() {
            return Err(Error::DomainMismatch(format!("{} values for a box of {} points", values.len(), region.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("grid value at offset {i}")));
        }
        Ok(GridFunction { region, values })
    }

    pub fn from_fn(region: &Region, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let values = region.points().map(|p| f(&p)).collect();
        GridFunction::new(region.clone(), values)
    }

    pub fn constant(region: &Region, c: f64) -> Result<Self> {
        GridFunction::new(region.clone(), vec![c; region.len()])
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at an absolute lattice point (panics outside the box).
    #[inline]
    pub fn at(&self, x: &[usize]) -> f64 {
        debug_assert!(self.region.contains(x), "{x:?} outside {:?}", self.region);
        self.values[self.region.offset(x)]
    }

    pub fn get(&self, x: &[usize]) -> Result<f64> {
        if self.region.contains(x) {
            Ok(self.at(x))
        } else {
            Err(Error::DomainMismatch(format!("point {x:?} is outside the function's box")))
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        GridFunction::new(self.region.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    /// Restriction to a sub-box.
    pub fn restrict(&self, region: &Region) -> Result<Self> {
        if !self.region.contains_region(region) {
            return Err(Error::DomainMismatch("restriction box is not contained in the domain".into()));
        }
        GridFunction::from_fn(region, |p| self.at(p))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Offsets of the first element of every fiber along `dim`, plus the stride along it.
fn fibers(shape: &[usize], dim: usize) -> (Vec<usize>, usize) {
    let stride: usize = shape[dim + 1..].iter().product();
    let outer: usize = shape[..dim].iter().product();
    let mut starts = Vec::with_capacity(outer * stride);
    for o in 0..outer {
        for inner in 0..stride {
            starts.push(o * shape[dim] * stride + inner);
        }
    }
    (starts, stride)
}

fn check_dims(scale: &ProductScale, f: &GridFunction) -> Result<()> {
    if f.region.dims() != scale.dims() {
        return Err(Error::DomainMismatch("function and scale have different dimensions".into()));
    }
    if let Some(j) = (0..scale.dims()).find(|&j| f.region.hi[j] > scale.axis(j).last()) {
        return Err(Error::DomainMismatch(format!("function box exceeds axis {j}")));
    }
    Ok(())
}

/// Forward difference quotient along `dim`; the result lives on the box shrunk by one index there.
pub fn partial_delta(scale: &ProductScale, f: &GridFunction, dim: usize) -> Result<GridFunction> {
    check_dims(scale, f)?;
    if dim >= scale.dims() {
        return Err(Error::IndexOutOfRange { index: dim, len: scale.dims() });
    }
    if f.region.hi[dim] == f.region.lo[dim] {
        return Err(Error::AxisTooShort { dim });
    }
    let mut delta = vec![0isize; scale.dims()];
    delta[dim] = -1;
    let out_region = f.region.resize_hi(&delta)?;
    let in_shape = f.region.shape();
    let out_shape = out_region.shape();
    let (in_starts, stride) = fibers(&in_shape, dim);
    let (out_starts, _) = fibers(&out_shape, dim);
    let axis = scale.axis(dim);
    let lo = f.region.lo[dim];
    let mut out = vec![0.0; out_region.len()];
    for (&si, &so) in in_starts.iter().zip(&out_starts) {
        for k in 0..out_shape[dim] {
            let a = f.values[si + k * stride];
            let b = f.values[si + (k + 1) * stride];
            out[so + k * stride] = (b - a) / axis.mu(lo + k);
        }
    }
    GridFunction::new(out_region, out)
}

/// `lambda_j` partial differences along each axis `j`.
pub fn mixed_delta(scale: &ProductScale, f: &GridFunction, lambda: &[usize]) -> Result<GridFunction> {
    if lambda.len() != f.region.dims() {
        return Err(Error::DomainMismatch("derivative order has the wrong dimension".into()));
    }
    let mut cur = f.clone();
    for (j, &l) in lambda.iter().enumerate() {
        if f.region.hi[j] - f.region.lo[j] < l {
            return Err(Error::AxisTooShort { dim: j });
        }
        for _ in 0..l {
            cur = partial_delta(scale, &cur, j)?;
        }
    }
    Ok(cur)
}

/// `sum_{lo <= x < hi} value(x) prod_j mu_j(x_j)` in row-major order with pairwise reduction.
pub fn integrate_with(scale: &ProductScale, region: &Region, mut value: impl FnMut(&[usize]) -> f64) -> f64 {
    match region.summation() {
        None => 0.0,
        Some(s) => {
            let terms: Vec<f64> = s.points().map(|p| value(&p) * scale.cell_measure(&p)).collect();
            pairwise_sum(&terms)
        }
    }
}

/// Fallible variant of [`integrate_with`].
pub fn try_integrate_with(
    scale: &ProductScale,
    region: &Region,
    mut value: impl FnMut(&[usize]) -> Result<f64>,
) -> Result<f64> {
    match region.summation() {
        None => Ok(0.0),
        Some(s) => {
            let mut terms = Vec::with_capacity(s.len());
            for p in s.points() {
                terms.push(value(&p)? * scale.cell_measure(&p));
            }
            Ok(pairwise_sum(&terms))
        }
    }
}

/// n-fold delta integral of `f` over `region`.
pub fn nfold_integral(scale: &ProductScale, f: &GridFunction, region: &Region) -> Result<f64> {
    check_dims(scale, f)?;
    if region.dims() != scale.dims() {
        return Err(Error::DomainMismatch("integration box has the wrong dimension".into()));
    }
    if let Some(s) = region.summation() {
        if !f.region.contains_region(&s) {
            return Err(Error::DomainMismatch("integrand does not cover the integration box".into()));
        }
    }
    Ok(integrate_with(scale, region, |p| f.at(p)))
}

/// `H_lambda(x, t) = prod_j h_{lambda_j - 1}(x_j, sigma_j(t_j))`.
pub fn kernel_h(
    scale: &ProductScale,
    tables: &[MonomialTable],
    lambda: &[usize],
    x: &[usize],
    t: &[usize],
) -> Result<f64> {
    let mut h = 1.0;
    for j in 0..lambda.len() {
        if lambda[j] == 0 {
            return Err(Error::InvalidParams("kernel order must be positive".into()));
        }
        h *= tables[j].eval(lambda[j] - 1, x[j], scale.axis(j).sigma(t[j]))?;
    }
    Ok(h)
}

/// Unchecked kernel evaluation for inner loops.
#[inline]
pub(crate) fn kernel_fast(
    scale: &ProductScale,
    tables: &[MonomialTable],
    lambda: &[usize],
    x: &[usize],
    t: &[usize],
) -> f64 {
    let mut h = 1.0;
    for j in 0..lambda.len() {
        h *= tables[j].get(lambda[j] - 1, x[j], scale.axis(j).sigma(t[j]));
    }
    h
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    Left,
    Right,
}

/// One cumulative integration along `dim`, extending the box by one index.
fn integrate_axis(scale: &ProductScale, g: &GridFunction, dim: usize, anchor: Anchor) -> Result<GridFunction> {
    let mut delta = vec![0isize; scale.dims()];
    delta[dim] = 1;
    let out_region = g.region.resize_hi(&delta)?;
    if out_region.hi[dim] > scale.axis(dim).last() {
        return Err(Error::AxisTooShort { dim });
    }
    let in_shape = g.region.shape();
    let out_shape = out_region.shape();
    let (in_starts, stride) = fibers(&in_shape, dim);
    let (out_starts, _) = fibers(&out_shape, dim);
    let axis = scale.axis(dim);
    let lo = g.region.lo[dim];
    let len = in_shape[dim];
    let mut out = vec![0.0; out_region.len()];
    for (&si, &so) in in_starts.iter().zip(&out_starts) {
        match anchor {
            Anchor::Left => {
                let mut acc = 0.0;
                for k in 0..len {
                    acc += g.values[si + k * stride] * axis.mu(lo + k);
                    out[so + (k + 1) * stride] = acc;
                }
            }
            Anchor::Right => {
                let mut acc = 0.0;
                for k in (0..len).rev() {
                    acc -= g.values[si + k * stride] * axis.mu(lo + k);
                    out[so + k * stride] = acc;
                }
            }
        }
    }
    GridFunction::new(out_region, out)
}

fn anchor(scale: &ProductScale, g: &GridFunction, lambda: &[usize], side: Anchor) -> Result<GridFunction> {
    check_dims(scale, g)?;
    if lambda.len() != scale.dims() {
        return Err(Error::DomainMismatch("derivative order has the wrong dimension".into()));
    }
    let mut cur = g.clone();
    for (j, &l) in lambda.iter().enumerate() {
        for _ in 0..l {
            cur = integrate_axis(scale, &cur, j, side)?;
        }
    }
    Ok(cur)
}

/// Builds `f` with `mixed_delta(f, lambda) = g` and all derivatives of order below `lambda_j`
/// vanishing on the lower faces `x_j = a_j`.
///
/// `g` lives on `[a, b - lambda]`; the result lives on `[a, b]`.
pub fn anchor_left(scale: &ProductScale, g: &GridFunction, lambda: &[usize]) -> Result<GridFunction> {
    anchor(scale, g, lambda, Anchor::Left)
}

/// Builds `f` with `mixed_delta(f, lambda) = g` and all derivatives of order below `lambda_j`
/// vanishing on the upper faces `x_j = rho^{lambda_j - 1}(b_j)`, by downward integration.
///
/// `g` lives on `[a, b - lambda]`; the result lives on `[a, b]` and is zero on the last
/// `lambda_j` layers along each axis, so its restriction to `Omega^{kappa^{lambda-1}}` carries
/// the right-anchored conditions.
pub fn anchor_right(scale: &ProductScale, g: &GridFunction, lambda: &[usize]) -> Result<GridFunction> {
    anchor(scale, g, lambda, Anchor::Right)
}

/// Outcome of [`check_class_membership`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    pub max_boundary_residual: f64,
    pub energy: f64,
    pub energy_finite: bool,
}

/// Boundary tolerance for anchored derivatives.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Checks the vanishing-derivative conditions at the anchor and finiteness of
/// `int |d^lambda f|^p tau` over the box where the top derivative exists.
pub fn check_class_membership(
    scale: &ProductScale,
    f: &GridFunction,
    lambda: &[usize],
    side: Anchor,
    p: f64,
    tau: &GridFunction,
) -> Result<Membership> {
    check_dims(scale, f)?;
    let region = f.region.clone();
    let mut residual: f64 = 0.0;
    for j in 0..scale.dims() {
        let face = match side {
            Anchor::Left => region.lo[j],
            Anchor::Right => {
                if region.hi[j] + 1 < lambda[j] + region.lo[j] {
                    return Err(Error::AxisTooShort { dim: j });
                }
                region.hi[j] + 1 - lambda[j]
            }
        };
        let mut d = f.clone();
        for k in 0..lambda[j] {
            if k > 0 {
                d = partial_delta(scale, &d, j)?;
            }
            for pt in d.region.points() {
                if pt[j] == face {
                    residual = residual.max(d.at(&pt).abs());
                }
            }
        }
    }
    let top = mixed_delta(scale, f, lambda)?;
    if !tau.region.contains_region(&top.region) {
        return Err(Error::DomainMismatch("weight does not cover the derivative box".into()));
    }
    let whole = top.region.resize_hi(&vec![1; scale.dims()])?;
    let energy = try_integrate_with(scale, &whole, |x| Ok(pow_nonneg(top.at(x).abs(), p)? * tau.at(x)))?;
    let energy_finite = energy.is_finite();
    Ok(Membership {
        member: residual <= BOUNDARY_TOL && energy_finite,
        max_boundary_residual: residual,
        energy,
        energy_finite,
    })
}
