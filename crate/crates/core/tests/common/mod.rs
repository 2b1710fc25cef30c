//! Reference evaluators written directly from the definitions: raw point arrays, explicit
//! nested loops, no library numerics.
#![allow(dead_code, clippy::needless_range_loop, clippy::type_complexity)]

pub fn mu(p: &[f64], i: usize) -> f64 {
    if i + 1 < p.len() {
        p[i + 1] - p[i]
    } else {
        0.0
    }
}

pub fn sigma(p: &[f64], i: usize) -> usize {
    (i + 1).min(p.len() - 1)
}

/// Every lattice point of the inclusive box `[lo, hi]`, last axis fastest.
pub fn points(lo: &[usize], hi: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for j in 0..lo.len() {
        let mut next = Vec::new();
        for p in &out {
            for i in lo[j]..=hi[j] {
                let mut q = p.clone();
                q.push(i);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Summation points `lo <= t < hi` of the box.
pub fn sum_points(lo: &[usize], hi: &[usize]) -> Vec<Vec<usize>> {
    if lo.iter().zip(hi).any(|(l, h)| l >= h) {
        return Vec::new();
    }
    let top: Vec<usize> = hi.iter().map(|h| h - 1).collect();
    points(lo, &top)
}

pub fn cell(axes: &[Vec<f64>], t: &[usize]) -> f64 {
    t.iter().enumerate().map(|(j, &i)| mu(&axes[j], i)).product()
}

/// `h[k][t][s]` for `k <= max_k` by the signed recursion
/// `h_{k+1}(t, s) = int_s^t h_k(tau, s) Delta tau`.
pub fn monomials(p: &[f64], max_k: usize) -> Vec<Vec<Vec<f64>>> {
    let n = p.len();
    let mut h = vec![vec![vec![1.0; n]; n]];
    for k in 0..max_k {
        let prev = &h[k];
        let mut next = vec![vec![0.0; n]; n];
        for s in 0..n {
            for t in 0..n {
                let mut acc = 0.0;
                if t >= s {
                    for tau in s..t {
                        acc += prev[tau][s] * mu(p, tau);
                    }
                } else {
                    for tau in t..s {
                        acc -= prev[tau][s] * mu(p, tau);
                    }
                }
                next[t][s] = acc;
            }
        }
        h.push(next);
    }
    h
}

/// Tables and axes for kernel evaluation `H_lambda(x, t) = prod_j h_{lambda_j-1}(x_j, sigma(t_j))`.
pub struct Kernel {
    pub axes: Vec<Vec<f64>>,
    pub tables: Vec<Vec<Vec<Vec<f64>>>>,
}

impl Kernel {
    pub fn new(axes: &[Vec<f64>], max_order: usize) -> Self {
        Kernel { axes: axes.to_vec(), tables: axes.iter().map(|p| monomials(p, max_order)).collect() }
    }

    pub fn eval(&self, lam: &[usize], x: &[usize], t: &[usize]) -> f64 {
        (0..lam.len()).map(|j| self.tables[j][lam[j] - 1][x[j]][sigma(&self.axes[j], t[j])]).product()
    }
}

/// `f(x) = sum_{t in D, t < x} H(x, t) g(t) mu(t)`.
pub fn anchor_left_kernel(
    k: &Kernel,
    lo: &[usize],
    hi: &[usize],
    lam: &[usize],
    g: &dyn Fn(&[usize]) -> f64,
) -> Vec<f64> {
    let dhi: Vec<usize> = hi.iter().zip(lam).map(|(h, l)| h - l).collect();
    points(lo, hi)
        .iter()
        .map(|x| {
            let mut acc = 0.0;
            for t in points(lo, &dhi) {
                if t.iter().zip(x).all(|(a, b)| a < b) {
                    acc += k.eval(lam, x, &t) * g(&t) * cell(&k.axes, &t);
                }
            }
            acc
        })
        .collect()
}

/// `f(x) = (-1)^n sum_{t in D, t >= x} H(x, t) g(t) mu(t)`.
pub fn anchor_right_kernel(
    k: &Kernel,
    lo: &[usize],
    hi: &[usize],
    lam: &[usize],
    g: &dyn Fn(&[usize]) -> f64,
) -> Vec<f64> {
    let dhi: Vec<usize> = hi.iter().zip(lam).map(|(h, l)| h - l).collect();
    let sign = if lo.len().is_multiple_of(2) { 1.0 } else { -1.0 };
    points(lo, hi)
        .iter()
        .map(|x| {
            let mut acc = 0.0;
            for t in points(lo, &dhi) {
                if t.iter().zip(x).all(|(a, b)| a >= b) {
                    acc += k.eval(lam, x, &t) * g(&t) * cell(&k.axes, &t);
                }
            }
            sign * acc
        })
        .collect()
}

pub fn anchor(
    k: &Kernel,
    lo: &[usize],
    hi: &[usize],
    lam: &[usize],
    g: &dyn Fn(&[usize]) -> f64,
    side: Side,
) -> Vec<f64> {
    match side {
        Side::Left => anchor_left_kernel(k, lo, hi, lam, g),
        Side::Right => anchor_right_kernel(k, lo, hi, lam, g),
    }
}

pub fn offset(lo: &[usize], hi: &[usize], x: &[usize]) -> usize {
    let mut o = 0;
    for j in 0..lo.len() {
        o = o * (hi[j] - lo[j] + 1) + (x[j] - lo[j]);
    }
    o
}

/// Both sides of the left power-weight inequality on the whole scale, from the definitions.
pub struct PowerInstance<'a> {
    pub axes: &'a [Vec<f64>],
    pub lam: &'a [usize],
    pub alpha: f64,
    pub beta: f64,
    pub g: &'a dyn Fn(&[usize]) -> f64,
    pub omega: &'a dyn Fn(&[usize]) -> f64,
    pub tau: &'a dyn Fn(&[usize]) -> f64,
}

fn full_box(axes: &[Vec<f64>]) -> (Vec<usize>, Vec<usize>) {
    (vec![0; axes.len()], axes.iter().map(|p| p.len() - 1).collect())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Left,
    Right,
}

/// `V(x) = int |H(x,t)|^{s/(s-1)} tau^{1/(1-s)}` over `[a, x)` (left) or `[x, b - lambda + 1)` (right).
pub fn kernel_integral(k: &Kernel, lam: &[usize], s: f64, tau: &dyn Fn(&[usize]) -> f64, side: Side) -> Vec<f64> {
    let (lo, hi) = full_box(&k.axes);
    let top: Vec<usize> = hi.iter().zip(lam).map(|(h, l)| h + 1 - l).collect();
    points(&lo, &hi)
        .iter()
        .map(|x| {
            let over = match side {
                Side::Left => sum_points(&lo, x),
                Side::Right => sum_points(x, &top),
            };
            over.iter()
                .map(|t| k.eval(lam, x, t).abs().powf(s / (s - 1.0)) * tau(t).powf(1.0 / (1.0 - s)) * cell(&k.axes, t))
                .sum()
        })
        .collect()
}

pub fn power_weight(inst: &PowerInstance, side: Side) -> (f64, f64) {
    let (a, b) = (inst.alpha, inst.beta);
    let s = a + b;
    let maxl = *inst.lam.iter().max().unwrap();
    let k = Kernel::new(inst.axes, maxl);
    let (lo, hi) = full_box(inst.axes);
    let f = anchor(&k, &lo, &hi, inst.lam, inst.g, side);
    let v = kernel_integral(&k, inst.lam, s, inst.tau, side);
    let top: Vec<usize> = hi.iter().zip(inst.lam).map(|(h, l)| h + 1 - l).collect();
    let mut lhs = 0.0;
    let mut l_int = 0.0;
    let mut energy = 0.0;
    for x in sum_points(&lo, &top) {
        let o = offset(&lo, &hi, &x);
        let c = cell(inst.axes, &x);
        let g = (inst.g)(&x).abs();
        lhs += f[o].abs().powf(b) * g.powf(a) * (inst.omega)(&x) * c;
        l_int += v[o].powf(s - 1.0) * (inst.omega)(&x).powf(s / b) * (inst.tau)(&x).powf(-a / b) * c;
        energy += g.powf(s) * (inst.tau)(&x) * c;
    }
    let l = l_int.powf(b / s);
    let factor = (a / s).powf(a / s);
    (lhs, factor * l * energy)
}

/// Both sides of the weighted composite inequality for `G(u) = sum_i u_i^{p_i}`.
#[allow(clippy::too_many_arguments)]
pub fn weighted_sum_power(
    side: Side,
    axes: &[Vec<f64>],
    lam: &[usize],
    alpha: f64,
    beta: f64,
    powers: &[f64],
    g: &[&dyn Fn(&[usize]) -> f64],
    omega: &[&dyn Fn(&[usize]) -> f64],
    tau: &[&dyn Fn(&[usize]) -> f64],
) -> (f64, f64) {
    let m = powers.len();
    let s = alpha + beta;
    let maxl = *lam.iter().max().unwrap();
    let k = Kernel::new(axes, maxl);
    let (lo, hi) = full_box(axes);
    let fs: Vec<Vec<f64>> = (0..m).map(|i| anchor(&k, &lo, &hi, lam, g[i], side)).collect();
    let vs: Vec<Vec<f64>> = (0..m).map(|i| kernel_integral(&k, lam, s, tau[i], side)).collect();
    let dg = |i: usize, u: f64| powers[i] * u.abs().powf(powers[i] - 1.0);
    let top: Vec<usize> = hi.iter().zip(lam).map(|(h, l)| h + 1 - l).collect();
    let (mut lhs, mut kint) = (0.0, 0.0);
    let mut u = vec![0.0; m];
    for x in sum_points(&lo, &top) {
        let o = offset(&lo, &hi, &x);
        let c = cell(axes, &x);
        for i in 0..m {
            let gi = (g[i])(&x).abs();
            lhs += dg(i, fs[i][o]).powf(alpha) * gi.powf(alpha) * (omega[i])(&x) * c;
            kint += dg(i, vs[i][o]).powf(alpha * (s - 1.0) / beta)
                * (omega[i])(&x).powf(s / beta)
                * (tau[i])(&x).powf(-alpha / beta)
                * c;
            u[i] += gi.powf(s) * (tau[i])(&x) * c;
        }
    }
    let gval: f64 = (0..m).map(|i| u[i].powf(powers[i])).sum();
    (lhs, kint.powf(beta / s) * gval.powf(alpha / s))
}

/// Lyapunov constants from the definitions with nested loops.
pub struct LyapunovOracle {
    pub s: Vec<f64>,
    pub s_star: Vec<f64>,
    pub k: f64,
    pub l: f64,
    pub m: f64,
    pub n: Vec<f64>,
    pub value: f64,
}

pub fn lyapunov(
    axes: &[Vec<f64>; 2],
    lo: [usize; 2],
    hi: [usize; 2],
    r: &dyn Fn(&[usize]) -> f64,
    s: &dyn Fn(&[usize]) -> f64,
) -> LyapunovOracle {
    let c2 = |t: &[usize]| mu(&axes[0], t[0]) * mu(&axes[1], t[1]);
    let sfield = |x: &[usize]| -> f64 {
        let mut acc = 0.0;
        for t1 in x[0]..hi[0] {
            for t2 in x[1]..hi[1] {
                acc += s(&[t1, t2]) * c2(&[t1, t2]);
            }
        }
        acc
    };
    let all = points(&lo, &hi);
    let svals: Vec<f64> = all.iter().map(|x| sfield(x)).collect();
    let sup = svals.iter().copied().fold(0.0, f64::max);
    let (a2, b1, b2) = (axes[1][lo[1]], axes[0][hi[0]], axes[1][hi[1]]);
    let s_star: Vec<f64> = (lo[0]..=hi[0]).map(|i| (b2 - a2) * sup * (b1 - axes[0][i])).collect();
    let w = |x: &[usize]| (s_star[x[0] - lo[0]] + sfield(x)).powi(2) / r(x);
    let inner_lower = |x: &[usize]| -> f64 {
        let mut acc = 0.0;
        for t1 in lo[0]..x[0] {
            for t2 in lo[1]..x[1] {
                acc += c2(&[t1, t2]) / r(&[t1, t2]);
            }
        }
        acc
    };
    let inner_upper = |x: &[usize]| -> f64 {
        let mut acc = 0.0;
        for t1 in x[0]..hi[0] {
            for t2 in x[1]..hi[1] {
                acc += c2(&[t1, t2]) / r(&[t1, t2]);
            }
        }
        acc
    };
    let sums = sum_points(&lo, &hi);
    let mut best: Option<(f64, f64, f64)> = None;
    for c in &all {
        let ok = sums.iter().all(|x| (x[0] < c[0] && x[1] < c[1]) || (x[0] >= c[0] && x[1] >= c[1]));
        if !ok {
            continue;
        }
        let mut k2 = 0.0;
        let mut l2 = 0.0;
        for x in &sums {
            if x[0] < c[0] && x[1] < c[1] {
                k2 += inner_lower(x) * w(x) * c2(x);
            } else {
                l2 += inner_upper(x) * w(x) * c2(x);
            }
        }
        let (k, l) = (f64::sqrt(k2), f64::sqrt(l2));
        if best.is_none_or(|b| (k - l).abs() < b.0) {
            best = Some(((k - l).abs(), k, l));
        }
    }
    let (_, k, l) = best.unwrap();
    let half = std::f64::consts::SQRT_2 / 2.0;
    let m = half * k.max(l);
    let mut n = Vec::new();
    for x1 in lo[0]..=hi[0] {
        let mut bestn: Option<(f64, f64)> = None;
        for c in lo[1]..=hi[1] {
            let (mut n1, mut n2) = (0.0, 0.0);
            for x2 in lo[1]..hi[1] {
                let x = [x1, x2];
                if x2 < c {
                    let mut inner = 0.0;
                    for t2 in lo[1]..x2 {
                        inner += mu(&axes[1], t2) / r(&[x1, t2]);
                    }
                    n1 += inner * w(&x) * mu(&axes[1], x2);
                } else {
                    let mut inner = 0.0;
                    for t2 in x2..hi[1] {
                        inner += mu(&axes[1], t2) / r(&[x1, t2]);
                    }
                    n2 += inner * w(&x) * mu(&axes[1], x2);
                }
            }
            let (n1, n2) = (n1.sqrt(), n2.sqrt());
            if bestn.is_none_or(|b| (n1 - n2).abs() < b.0) {
                bestn = Some(((n1 - n2).abs(), half * n1.max(n2)));
            }
        }
        n.push(bestn.unwrap().1);
    }
    let sup_term = (lo[0]..hi[0]).map(|x1| mu(&axes[0], x1) * n[x1 - lo[0]]).fold(0.0, f64::max);
    LyapunovOracle { s: svals, s_star, k, l, m, n, value: 2.0 * m + sup_term }
}

/// Maximum of a unimodal function on `[lo, hi]` by golden-section search.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    f(0.5 * (lo + hi))
}

pub fn binomial(n: i64, k: u32) -> f64 {
    if n < k as i64 {
        return 0.0;
    }
    let mut acc: i128 = 1;
    for i in 0..k as i128 {
        acc = acc * (n as i128 - i) / (i + 1);
    }
    acc as f64
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
