//! The weighted-derivative calculus on coefficient tables, the zero
//! partition of the step kernel, and the extremal derivative that witnesses
//! the lower bound of the class error.
//!
//! The derivative of `f` with respect to `(psi, beta)` is the function `phi`
//! whose Fourier coefficients are obtained from those of `f` by dividing by
//! `psi(k)` and rotating the `(a_k, b_k)` pair by `theta = beta pi / 2`.

use crate::error::{Error, Result};
use crate::fourier::{PeriodicGrid, TrigCoeffs};
use crate::psi::PsiSpec;
use std::f64::consts::PI;

/// Parameters of a weighted function class: weight plus phase shift.
#[derive(Debug, Clone)]
pub struct ClassParams {
    pub psi: PsiSpec,
    pub beta: f64,
}

impl ClassParams {
    pub fn new(psi: PsiSpec, beta: f64) -> Self {
        Self { psi, beta }
    }

    /// Rotation angle `theta = beta pi / 2`.
    pub fn theta(&self) -> f64 {
        self.beta * PI / 2.0
    }
}

/// Map derivative coefficients to function coefficients: multiply by
/// `psi(k)` and rotate by `+theta`. The derivative series carries no
/// constant term; the output constant is set to zero.
pub fn integrate_derivative(phi: &TrigCoeffs, params: &ClassParams) -> Result<TrigCoeffs> {
    if phi.a0 != 0.0 {
        return Err(Error::InvalidParams(format!(
            "derivative series must have zero constant term, got a0 = {}",
            phi.a0
        )));
    }
    let (sin_t, cos_t) = params.theta().sin_cos();
    let m = phi.max_harmonic();
    let mut a = vec![0.0; m];
    let mut b = vec![0.0; m];
    for k in 1..=m {
        let w = params.psi.eval(k as f64)?;
        a[k - 1] = w * (phi.a[k - 1] * cos_t - phi.b[k - 1] * sin_t);
        b[k - 1] = w * (phi.a[k - 1] * sin_t + phi.b[k - 1] * cos_t);
    }
    TrigCoeffs::new(0.0, a, b)
}

/// Exact inverse of [`integrate_derivative`]: rotate by `-theta`, divide by
/// `psi(k)`, drop the constant term.
pub fn differentiate(f: &TrigCoeffs, params: &ClassParams) -> Result<TrigCoeffs> {
    let (sin_t, cos_t) = params.theta().sin_cos();
    let m = f.max_harmonic();
    let mut a = vec![0.0; m];
    let mut b = vec![0.0; m];
    for k in 1..=m {
        let w = params.psi.eval(k as f64)?;
        a[k - 1] = (f.a[k - 1] * cos_t + f.b[k - 1] * sin_t) / w;
        b[k - 1] = (-f.a[k - 1] * sin_t + f.b[k - 1] * cos_t) / w;
    }
    TrigCoeffs::new(0.0, a, b)
}

/// Which sandwich of `mu(n)` against `n/p` and `n` is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    MuLeNOverP,
    Between,
    MuGtN,
}

/// Zero partition of the step kernel: the grid `t_k = (2k+1-beta) pi/2`,
/// midpoints `x_k = t_k + pi/2`, and the four indices that bracket the
/// active integration windows.
#[derive(Debug, Clone)]
pub struct PartitionData {
    pub n: usize,
    pub p: usize,
    pub beta: f64,
    pub mu_n: f64,
    pub regime: Regime,
    pub k0: i64,
    pub k1: i64,
    pub k2: i64,
    pub k3: i64,
}

impl PartitionData {
    pub fn t_k(&self, k: i64) -> f64 {
        t_node(self.beta, k)
    }

    pub fn x_k(&self, k: i64) -> f64 {
        t_node(self.beta, k) + PI / 2.0
    }

    /// The step kernel: `1/x_k` on `[t_k, t_{k+1}]` for `k` inside either
    /// index window, zero outside.
    pub fn step_kernel(&self, t: f64) -> f64 {
        let k = ((2.0 * t / PI + self.beta - 1.0) / 2.0).floor() as i64;
        let in_left = k >= self.k0 && k <= self.k1 - 1;
        let in_right = k >= self.k2 && k <= self.k3 - 1;
        if in_left || in_right {
            1.0 / self.x_k(k)
        } else {
            0.0
        }
    }
}

fn t_node(beta: f64, k: i64) -> f64 {
    (2.0 * k as f64 + 1.0 - beta) * PI / 2.0
}

/// Smallest `k` with `t_k >= x`.
fn k_at_or_above(beta: f64, x: f64) -> i64 {
    ((2.0 * x / PI + beta - 1.0) / 2.0).ceil() as i64
}

/// Select the regime from `mu(n)` and build the bracketing indices.
pub fn build_partition(params: &ClassParams, n: usize, p: usize) -> Result<PartitionData> {
    if n == 0 || p == 0 || p > n {
        return Err(Error::InvalidParams(format!("need 1 <= p <= n, got n={n}, p={p}")));
    }
    let mu = params.psi.characteristics(n as f64)?.mu;
    let nf = n as f64;
    let np = nf / p as f64;
    let beta = params.beta;
    let (regime, k0, k1, k2, k3) = if mu <= np {
        (
            Regime::MuLeNOverP,
            k_at_or_above(beta, -np),
            k_at_or_above(beta, -mu) - 1,
            k_at_or_above(beta, mu),
            k_at_or_above(beta, np) - 1,
        )
    } else if mu <= nf {
        (
            Regime::Between,
            k_at_or_above(beta, -mu),
            k_at_or_above(beta, -np) - 1,
            k_at_or_above(beta, np),
            k_at_or_above(beta, mu) - 1,
        )
    } else {
        (
            Regime::MuGtN,
            k_at_or_above(beta, -nf),
            k_at_or_above(beta, -np) - 1,
            k_at_or_above(beta, np),
            k_at_or_above(beta, nf) - 1,
        )
    };
    Ok(PartitionData { n, p, beta, mu_n: mu, regime, k0, k1, k2, k3 })
}

/// The extremal derivative: a 2pi-periodic function with `|phi0| <= 1` and
/// zero mean, equal to `sign(l_n(nt) sin(nt + theta))` on `[-1, 1]` and
/// constant elsewhere. The constant is whatever balances the mean and is
/// always attainable within `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct ExtremalDerivative {
    partition: PartitionData,
    theta: f64,
    n: usize,
    /// Fill value outside `[-1, 1]`, balancing the continuous mean.
    fill: f64,
}

impl ExtremalDerivative {
    /// Sign pattern `sign(l_n(nt) sin(nt + theta))` for `t` in `[-1, 1]`.
    fn pattern(&self, t: f64) -> f64 {
        let arg = self.n as f64 * t;
        let v = self.partition.step_kernel(arg) * (arg + self.theta).sin();
        if v > 0.0 {
            1.0
        } else if v < 0.0 {
            -1.0
        } else {
            0.0
        }
    }

    /// Evaluate at any real `t` (periodized to `(-pi, pi]`).
    pub fn eval(&self, t: f64) -> f64 {
        let mut x = (t + PI).rem_euclid(2.0 * PI) - PI;
        if x <= -PI {
            x += 2.0 * PI;
        }
        if x.abs() <= 1.0 {
            self.pattern(x)
        } else {
            self.fill
        }
    }

    /// Sample on the uniform grid, with the fill value adjusted so the grid
    /// mean is exactly zero.
    pub fn grid(&self, grid_size: usize) -> Result<PeriodicGrid> {
        if grid_size < 64 * self.n {
            return Err(Error::InvalidParams(format!(
                "grid too coarse to resolve sign changes: need N >= {}, got {grid_size}",
                64 * self.n
            )));
        }
        let mut inside_sum = 0.0;
        let mut outside = Vec::new();
        let mut values = vec![0.0; grid_size];
        for (j, slot) in values.iter_mut().enumerate() {
            let mut x = 2.0 * PI * j as f64 / grid_size as f64;
            if x > PI {
                x -= 2.0 * PI;
            }
            if x.abs() <= 1.0 {
                let v = self.pattern(x);
                inside_sum += v;
                *slot = v;
            } else {
                outside.push(j);
            }
        }
        // grid-exact zero mean; the fill stays inside [-1, 1] because the
        // outside region is wider than the signed interior mass
        let fill = (-inside_sum / outside.len() as f64).clamp(-1.0, 1.0);
        for j in outside {
            values[j] = fill;
        }
        PeriodicGrid::new(values)
    }
}

/// Build the extremal derivative for the class at `(n, p)`.
pub fn build_extremal_derivative(
    params: &ClassParams,
    n: usize,
    p: usize,
) -> Result<ExtremalDerivative> {
    let partition = build_partition(params, n, p)?;
    let theta = params.theta();
    let mut ed = ExtremalDerivative { partition, theta, n, fill: 0.0 };
    // continuous-mean balancing fill: integrate the sign pattern over
    // [-1, 1] exactly by walking its breakpoints
    let mut cuts: Vec<f64> = vec![-1.0, 1.0];
    let nf = n as f64;
    // zeros of sin(nt + theta)
    let j_lo = ((-nf + theta) / PI).floor() as i64 - 1;
    let j_hi = ((nf + theta) / PI).ceil() as i64 + 1;
    for j in j_lo..=j_hi {
        let t = (j as f64 * PI - theta) / nf;
        if t > -1.0 && t < 1.0 {
            cuts.push(t);
        }
    }
    // jumps of the step kernel at t_k / n
    let part = &ed.partition;
    for k in (part.k0 - 1)..=(part.k3 + 1) {
        let t = part.t_k(k) / nf;
        if t > -1.0 && t < 1.0 {
            cuts.push(t);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut signed_mass = 0.0;
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        signed_mass += ed.pattern(mid) * (w[1] - w[0]);
    }
    ed.fill = (-signed_mass / (2.0 * PI - 2.0)).clamp(-1.0, 1.0);
    Ok(ed)
}
