use nalgebra::DMatrix;

use crate::grid::{self, GridFunction, MultiIndex, ProductScale, Region};
use crate::monomial::MonomialTable;
use crate::{Error, Result};

/// A box `Omega` in a product scale together with the derivative order `lambda` and the
/// monomial tables its Taylor kernels need.
#[derive(Clone, Debug)]
pub struct Domain {
    scale: ProductScale,
    omega: Region,
    lambda: MultiIndex,
    tables: Vec<MonomialTable>,
}

impl Domain {
    pub fn new(scale: ProductScale, omega: Region, lambda: MultiIndex) -> Result<Self> {
        if !scale.full_region().contains_region(&omega) {
            return Err(Error::DomainMismatch("box is not inside the product scale".into()));
        }
        omega.check_admissible(&scale, &lambda)?;
        let orders: Vec<usize> = lambda.orders().iter().map(|l| l - 1).collect();
        let tables = scale.monomial_tables(&orders);
        Ok(Domain { scale, omega, lambda, tables })
    }

    /// Whole product scale as `Omega`.
    pub fn full(scale: ProductScale, lambda: MultiIndex) -> Result<Self> {
        let omega = scale.full_region();
        Domain::new(scale, omega, lambda)
    }

    pub fn scale(&self) -> &ProductScale {
        &self.scale
    }

    pub fn omega(&self) -> &Region {
        &self.omega
    }

    pub fn lambda(&self) -> &MultiIndex {
        &self.lambda
    }

    pub fn dims(&self) -> usize {
        self.scale.dims()
    }

    /// Box on which the top derivative lives: `[a, b - lambda]`.
    pub fn derivative_region(&self) -> Region {
        let hi = (0..self.dims()).map(|j| self.omega.hi[j] - self.lambda.orders()[j]).collect();
        Region { lo: self.omega.lo.clone(), hi }
    }

    /// `Omega^{kappa^{lambda-1}}`; integrating over it sums exactly the derivative box.
    pub fn kappa_region(&self) -> Region {
        let hi = (0..self.dims()).map(|j| self.omega.hi[j] + 1 - self.lambda.orders()[j]).collect();
        Region { lo: self.omega.lo.clone(), hi }
    }

    /// `H_lambda(b, a)`.
    pub fn taylor_bound(&self) -> f64 {
        self.kernel(self.lambda.orders(), &self.omega.hi, &self.omega.lo)
    }

    /// `H_orders(x, t)`; orders must not exceed `lambda`.
    #[inline]
    pub fn kernel(&self, orders: &[usize], x: &[usize], t: &[usize]) -> f64 {
        grid::kernel_fast(&self.scale, &self.tables, orders, x, t)
    }

    pub fn tables(&self) -> &[MonomialTable] {
        &self.tables
    }

    fn check_top(&self, g: &GridFunction) -> Result<()> {
        if g.region() != &self.derivative_region() {
            return Err(Error::DomainMismatch(format!(
                "top derivative must live on {:?}, got {:?}",
                self.derivative_region(),
                g.region()
            )));
        }
        Ok(())
    }

    /// Function with top derivative `g` and vanishing lower derivatives on the lower faces.
    pub fn anchor_left(&self, g: &GridFunction) -> Result<GridFunction> {
        self.check_top(g)?;
        grid::anchor_left(&self.scale, g, self.lambda.orders())
    }

    /// Function with top derivative `g` and vanishing lower derivatives at `rho^{lambda-1}(b)`.
    pub fn anchor_right(&self, g: &GridFunction) -> Result<GridFunction> {
        self.check_top(g)?;
        grid::anchor_right(&self.scale, g, self.lambda.orders())
    }

    /// Projects `g` so that its left-anchored primitive also satisfies the right-anchored
    /// conditions; returns the projected top derivative and the function.
    pub fn anchor_both(&self, g: &GridFunction) -> Result<(GridFunction, GridFunction)> {
        self.check_top(g)?;
        let region = g.region().clone();
        let shape = region.shape();
        let mut values = g.values().to_vec();
        for j in 0..self.dims() {
            let p = self.axis_projector(j, shape[j])?;
            let stride: usize = shape[j + 1..].iter().product();
            let outer: usize = shape[..j].iter().product();
            let len = shape[j];
            let mut fiber = vec![0.0; len];
            for o in 0..outer {
                for inner in 0..stride {
                    let base = o * len * stride + inner;
                    for (k, v) in fiber.iter_mut().enumerate() {
                        *v = values[base + k * stride];
                    }
                    for r in 0..len {
                        let mut acc = 0.0;
                        for c in 0..len {
                            acc += p[(r, c)] * fiber[c];
                        }
                        values[base + r * stride] = acc;
                    }
                }
            }
        }
        let top = GridFunction::new(region, values)?;
        let f = grid::anchor_left(&self.scale, &top, self.lambda.orders())?;
        Ok((top, f))
    }

    /// Orthogonal projector onto top-derivative fibers whose left-anchored primitive vanishes on
    /// the last `lambda_j` grid points of the axis.
    fn axis_projector(&self, j: usize, len: usize) -> Result<DMatrix<f64>> {
        let l = self.lambda.orders()[j];
        let axis = self.scale.axis(j);
        let lo = self.omega.lo[j];
        let total = len + l;
        let mut a = DMatrix::<f64>::zeros(l, len);
        for c in 0..len {
            let mut f = vec![0.0; total];
            f[c] = 1.0;
            for _ in 0..l {
                let mut next = vec![0.0; total];
                for k in 1..total {
                    next[k] = next[k - 1] + f[k - 1] * axis.mu(lo + k - 1);
                }
                f = next;
            }
            for r in 0..l {
                a[(r, c)] = f[len + r];
            }
        }
        let gram = &a * a.transpose();
        let inv = gram
            .try_inverse()
            .ok_or_else(|| Error::DomainMismatch(format!("axis {j} is too short for two-sided anchoring")))?;
        Ok(DMatrix::<f64>::identity(len, len) - a.transpose() * inv * a)
    }

    /// `f(sigma(x))` for every point of the derivative box.
    pub fn sigma_shift(&self, f: &GridFunction) -> Result<GridFunction> {
        GridFunction::from_fn(&self.derivative_region(), |x| {
            let s: Vec<usize> = x.iter().enumerate().map(|(j, &xj)| self.scale.axis(j).sigma(xj)).collect();
            f.at(&s)
        })
    }
}
