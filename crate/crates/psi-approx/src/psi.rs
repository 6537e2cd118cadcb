//! Catalog of admissible weight functions `psi` and their half-decay
//! characteristics.
//!
//! A weight is a positive, convex, decreasing-to-zero function on `[1, inf)`.
//! Its half-decay point `eta(t)` is where the weight has dropped to half of
//! `psi(t)`; the half-decay period is `T(t) = eta(t) - t` and the half-decay
//! modulus is `mu(t) = t / T(t)`.

use crate::error::{Error, Result};

/// Relative tolerance for the weight inverse.
pub const TOL_INV: f64 = 1e-12;

/// Built-in weight families plus tabulated data.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiFamily {
    /// `t^{-r}`, `r > 0`.
    Power { r: f64 },
    /// `1 / (t^r ln(t + b))`, `r > 0`, `b >= 1`.
    PowerLog { r: f64, b: f64 },
    /// `exp(-alpha t^r)`, `alpha > 0`, `r > 0`.
    Exp { alpha: f64, r: f64 },
    /// `1 / ln(t + 1)`.
    Log,
    /// Monotone cubic interpolant (in log-value space) through decreasing
    /// convex knots `(t_i, psi_i)`, `t_i >= 1`.
    Tabulated(Tabulated),
}

/// A validated weight specification. `scale` multiplies the family value and
/// does not change `eta`, `T` or `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiSpec {
    family: PsiFamily,
    scale: f64,
}

/// Half-decay characteristics at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiCharacteristics {
    pub t: f64,
    pub psi: f64,
    /// Point where the weight halves: `psi(eta) = psi(t) / 2`.
    pub eta: f64,
    /// Half-decay period `T = eta - t`.
    pub period: f64,
    /// Half-decay modulus `mu = t / T`.
    pub mu: f64,
}

/// Grid-level evidence for the membership sets of the weight.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyReport {
    /// min/max of `t / T(t)` over the grid.
    pub mu_min: f64,
    pub mu_max: f64,
    /// `mu` bounded both ways on the grid (bounded-ratio evidence).
    pub in_mc: bool,
    /// `mu` nondecreasing on the grid and at least doubled across it.
    pub in_minf_plus: bool,
    /// sup of the finite-difference derivative of `eta` over the grid.
    pub eta_prime_sup: f64,
    /// No growth trend in the finite-difference `eta'` across the grid.
    pub in_f_numeric: bool,
}

impl PsiSpec {
    pub fn power(r: f64) -> Result<Self> {
        if r <= 0.0 || !r.is_finite() {
            return Err(Error::InvalidSpec(format!("power: r must be positive, got {r}")));
        }
        Ok(Self { family: PsiFamily::Power { r }, scale: 1.0 })
    }

    pub fn power_log(r: f64, b: f64) -> Result<Self> {
        if r <= 0.0 || !r.is_finite() {
            return Err(Error::InvalidSpec(format!("powerlog: r must be positive, got {r}")));
        }
        if b < 1.0 || !b.is_finite() {
            return Err(Error::InvalidSpec(format!("powerlog: b must be >= 1, got {b}")));
        }
        Ok(Self { family: PsiFamily::PowerLog { r, b }, scale: 1.0 })
    }

    pub fn exp(alpha: f64, r: f64) -> Result<Self> {
        if alpha <= 0.0 || r <= 0.0 || !alpha.is_finite() || !r.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "exp: alpha and r must be positive, got alpha={alpha}, r={r}"
            )));
        }
        Ok(Self { family: PsiFamily::Exp { alpha, r }, scale: 1.0 })
    }

    pub fn log() -> Self {
        Self { family: PsiFamily::Log, scale: 1.0 }
    }

    pub fn tabulated(knots: Vec<(f64, f64)>, tail_floor: f64) -> Result<Self> {
        let tab = Tabulated::new(knots, tail_floor)?;
        Ok(Self { family: PsiFamily::Tabulated(tab), scale: 1.0 })
    }

    /// Same weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if c <= 0.0 || !c.is_finite() {
            return Err(Error::InvalidSpec(format!("scale must be positive, got {c}")));
        }
        Ok(Self { family: self.family.clone(), scale: self.scale * c })
    }

    pub fn family(&self) -> &PsiFamily {
        &self.family
    }

    /// Evaluate `psi(t)`, `t >= 1`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 1.0) {
            return Err(Error::Domain(format!("psi is defined for t >= 1, got t={t}")));
        }
        let v = match &self.family {
            PsiFamily::Power { r } => t.powf(-r),
            PsiFamily::PowerLog { r, b } => 1.0 / (t.powf(*r) * (t + b).ln()),
            PsiFamily::Exp { alpha, r } => (-alpha * t.powf(*r)).exp(),
            PsiFamily::Log => 1.0 / (t + 1.0).ln(),
            PsiFamily::Tabulated(tab) => tab.eval(t)?,
        };
        Ok(self.scale * v)
    }

    /// `psi(1)`, the largest attainable value.
    pub fn at_one(&self) -> f64 {
        // t = 1 is always in the domain of every validated spec
        self.eval(1.0).expect("psi(1) must evaluate")
    }

    /// Inverse weight: the `t >= 1` with `psi(t) = y`, for `0 < y <= psi(1)`.
    ///
    /// Closed forms for the Power, Exp and Log families; bracketing bisection
    /// for PowerLog and Tabulated.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(y > 0.0) || !y.is_finite() {
            return Err(Error::Range(format!("inverse: y must be positive, got {y}")));
        }
        let y0 = y / self.scale;
        let top = self.at_one() / self.scale;
        if y0 > top * (1.0 + 1e-14) {
            return Err(Error::Range(format!(
                "inverse: y={y} exceeds psi(1)={}",
                top * self.scale
            )));
        }
        let y0 = y0.min(top);
        match &self.family {
            PsiFamily::Power { r } => Ok(y0.powf(-1.0 / r).max(1.0)),
            PsiFamily::Exp { alpha, r } => Ok(((1.0 / y0).ln() / alpha).powf(1.0 / r).max(1.0)),
            PsiFamily::Log => Ok(((1.0 / y0).exp() - 1.0).max(1.0)),
            PsiFamily::PowerLog { .. } | PsiFamily::Tabulated(_) => self.inverse_by_bisection(y0 * self.scale),
        }
    }

    /// Bracketing bisection for the inverse of a strictly decreasing weight.
    /// The bracket grows geometrically from `[1, 2]` until the target is
    /// enclosed.
    fn inverse_by_bisection(&self, y: f64) -> Result<f64> {
        let mut lo = 1.0_f64;
        let mut hi = 2.0_f64;
        let max_t = match &self.family {
            PsiFamily::Tabulated(tab) => tab.t_max(),
            _ => f64::INFINITY,
        };
        let mut expansions = 0;
        while self.eval(hi.min(max_t))? > y {
            if hi >= max_t {
                return Err(Error::Range(format!(
                    "inverse: y={y} below tabulated range (psi({max_t}) = {})",
                    self.eval(max_t)?
                )));
            }
            hi = (hi * 2.0).min(max_t);
            expansions += 1;
            if expansions > 1100 {
                return Err(Error::NonConvergence(format!("inverse bracket expansion stalled at y={y}")));
            }
        }
        hi = hi.min(max_t);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid)? > y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let got = self.eval(t)?;
        if (got - y).abs() > 1e-9 * y.abs() {
            return Err(Error::NonConvergence(format!(
                "inverse: residual {:.3e} at y={y}",
                (got - y).abs()
            )));
        }
        Ok(t)
    }

    /// Half-decay characteristics at `t`.
    pub fn characteristics(&self, t: f64) -> Result<PsiCharacteristics> {
        let psi = self.eval(t)?;
        let eta = self.inverse(psi / 2.0)?;
        let period = eta - t;
        if !(period > 0.0) {
            return Err(Error::NonConvergence(format!(
                "characteristics: eta={eta} does not exceed t={t}"
            )));
        }
        Ok(PsiCharacteristics { t, psi, eta, period, mu: t / period })
    }

    /// Grid-level membership evidence over `[t_lo, t_hi]` with `samples`
    /// geometrically spaced nodes. Flags are trend evidence, not proofs.
    pub fn classify(&self, t_lo: f64, t_hi: f64, samples: usize) -> Result<ClassifyReport> {
        if !(t_lo >= 1.0) || !(t_hi > t_lo) {
            return Err(Error::Domain(format!("classify: need 1 <= t_lo < t_hi, got [{t_lo}, {t_hi}]")));
        }
        if samples < 16 {
            return Err(Error::InvalidParams(format!("classify: need samples >= 16, got {samples}")));
        }
        let ratio = (t_hi / t_lo).powf(1.0 / (samples - 1) as f64);
        let mut chars = Vec::with_capacity(samples);
        for i in 0..samples {
            let t = t_lo * ratio.powi(i as i32);
            chars.push(self.characteristics(t)?);
        }
        let mu_min = chars.iter().map(|c| c.mu).fold(f64::INFINITY, f64::min);
        let mu_max = chars.iter().map(|c| c.mu).fold(0.0_f64, f64::max);
        let in_mc = mu_max <= 8.0 * mu_min;

        let mut nondecreasing = true;
        for w in chars.windows(2) {
            if w[1].mu < w[0].mu - 1e-9 * w[0].mu.abs().max(1.0) {
                nondecreasing = false;
            }
        }
        let in_minf_plus = nondecreasing && mu_max >= 2.0 * mu_min;

        let mut eta_prime = Vec::with_capacity(samples - 1);
        for w in chars.windows(2) {
            eta_prime.push((w[1].eta - w[0].eta) / (w[1].t - w[0].t));
        }
        let eta_prime_sup = eta_prime.iter().cloned().fold(0.0_f64, f64::max);
        // Growth trend: compare the last quarter of the grid against the
        // first quarter; a bounded eta' stays flat across scales.
        let q = eta_prime.len() / 4;
        let head = eta_prime[..q.max(1)].iter().cloned().fold(0.0_f64, f64::max);
        let tail = eta_prime[eta_prime.len() - q.max(1)..].iter().cloned().fold(0.0_f64, f64::max);
        let in_f_numeric = tail <= 2.0 * head;

        Ok(ClassifyReport { mu_min, mu_max, in_mc, in_minf_plus, eta_prime_sup, in_f_numeric })
    }
}

/// Monotone cubic interpolation of decreasing convex data, done in
/// log-value space so positivity and monotonicity survive interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    t: Vec<f64>,
    /// `ln psi` at the knots.
    logv: Vec<f64>,
    /// Fritsch-Carlson slopes of `ln psi`.
    slope: Vec<f64>,
}

impl Tabulated {
    fn new(knots: Vec<(f64, f64)>, tail_floor: f64) -> Result<Self> {
        if knots.len() < 4 {
            return Err(Error::InvalidSpec(format!(
                "tabulated: need at least 4 knots, got {}",
                knots.len()
            )));
        }
        if !(tail_floor > 0.0) {
            return Err(Error::InvalidSpec(format!("tabulated: tail floor must be positive, got {tail_floor}")));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidSpec("tabulated: knot abscissae must be strictly increasing".into()));
            }
        }
        if knots[0].0 < 1.0 {
            return Err(Error::InvalidSpec(format!("tabulated: knots must have t >= 1, got t={}", knots[0].0)));
        }
        let psi1 = knots[0].1;
        for &(t, v) in &knots {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidSpec(format!("tabulated: psi({t}) = {v} is not positive")));
            }
        }
        for w in knots.windows(2) {
            if w[1].1 > w[0].1 + 1e-12 * psi1 {
                return Err(Error::InvalidSpec(format!(
                    "tabulated: values must be non-increasing, psi({}) < psi({})",
                    w[0].0, w[1].0
                )));
            }
        }
        // Midpoint convexity via second differences on the raw values, with
        // a small slack so benign rounding noise does not reject the data.
        for w in knots.windows(3) {
            let (t0, v0) = w[0];
            let (t1, v1) = w[1];
            let (t2, v2) = w[2];
            let lin = v0 + (v2 - v0) * (t1 - t0) / (t2 - t0);
            if v1 > lin + 1e-9 * psi1 {
                return Err(Error::InvalidSpec(format!("tabulated: data not convex near t={t1}")));
            }
        }
        if knots[knots.len() - 1].1 > tail_floor {
            return Err(Error::InvalidSpec(format!(
                "tabulated: last knot value {} is above the decay floor {tail_floor}",
                knots[knots.len() - 1].1
            )));
        }
        let t: Vec<f64> = knots.iter().map(|k| k.0).collect();
        let logv: Vec<f64> = knots.iter().map(|k| k.1.ln()).collect();
        let slope = fritsch_carlson_slopes(&t, &logv);
        Ok(Self { t, logv, slope })
    }

    fn t_max(&self) -> f64 {
        *self.t.last().unwrap()
    }

    fn eval(&self, x: f64) -> Result<f64> {
        let n = self.t.len();
        if x < self.t[0] || x > self.t[n - 1] {
            return Err(Error::Domain(format!(
                "tabulated: t={x} outside knot range [{}, {}]",
                self.t[0],
                self.t[n - 1]
            )));
        }
        let i = match self.t.binary_search_by(|a| a.partial_cmp(&x).unwrap()) {
            Ok(i) => return Ok(self.logv[i].exp()),
            Err(i) => i - 1,
        };
        let h = self.t[i + 1] - self.t[i];
        let s = (x - self.t[i]) / h;
        let (y0, y1) = (self.logv[i], self.logv[i + 1]);
        let (m0, m1) = (self.slope[i] * h, self.slope[i + 1] * h);
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        Ok((h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1).exp())
    }
}

/// Monotonicity-preserving slopes (Fritsch-Carlson) for cubic Hermite data.
fn fritsch_carlson_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut d = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        d.push((y[i + 1] - y[i]) / (x[i + 1] - x[i]));
    }
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for i in 1..n - 1 {
        if d[i - 1] * d[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            m[i] = 0.5 * (d[i - 1] + d[i]);
        }
    }
    for i in 0..n - 1 {
        if d[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let a = m[i] / d[i];
        let b = m[i + 1] / d[i];
        let s = a * a + b * b;
        if s > 9.0 {
            let tau = 3.0 / s.sqrt();
            m[i] = tau * a * d[i];
            m[i + 1] = tau * b * d[i];
        }
    }
    m
}
