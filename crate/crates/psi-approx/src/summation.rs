//! Multiplier tables for the ramped summation operators and their classical
//! special cases, and their diagonal action on coefficient tables.
//!
//! Every operator here keeps harmonics `k <= n - p` untouched and tapers the
//! last `p - 1` harmonics with a ramp `1 - phi(k)/phi(n)` for some increasing
//! `phi` with `phi(n - p) = 0` (or a fixed taper when `p = n`).

use crate::error::{Error, Result};
use crate::fourier::TrigCoeffs;
use crate::psi::PsiSpec;

/// Which classical operator a multiplier table represents.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    /// Ramp `phi(k) = (k - n + p) / psi(k)`.
    UPsi(PsiSpec),
    /// Ramp `phi(k) = k - n + p`.
    ValleePoussin,
    /// `p = n`, taper `1 - (k/n)^s`.
    Zygmund { s: f64 },
    /// `p = n`, taper `1 - k/n`.
    Fejer,
    /// `p = 1`, partial sum of order `n - 1`.
    Fourier,
    /// `p = n`, taper `1 - phi(k)/phi(n)` from a user table `phi(1..=n)`.
    GenZygmund { phi: Vec<f64> },
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::UPsi(_) => "u",
            Method::ValleePoussin => "vp",
            Method::Zygmund { .. } => "zygmund",
            Method::Fejer => "fejer",
            Method::Fourier => "fourier",
            Method::GenZygmund { .. } => "genz",
        }
    }
}

/// A multiplier table `lambda(k)`, `k = 0..n-1`, defining a summation
/// operator of order `n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSet {
    n: usize,
    p: usize,
    lambda: Vec<f64>,
    method: Method,
}

impl MultiplierSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn method(&self) -> &Method {
        &self.method
    }
}

/// Build the multiplier table for a method at order `n` and ramp width `p`.
pub fn build_multipliers(method: Method, n: usize, p: usize) -> Result<MultiplierSet> {
    if n == 0 || p == 0 || p > n {
        return Err(Error::InvalidParams(format!("need 1 <= p <= n, got n={n}, p={p}")));
    }
    match &method {
        Method::Zygmund { s } => {
            if p != n {
                return Err(Error::InvalidParams(format!("zygmund requires p = n, got p={p}, n={n}")));
            }
            if !(*s > 0.0) {
                return Err(Error::InvalidParams(format!("zygmund exponent must be positive, got {s}")));
            }
        }
        Method::Fejer | Method::GenZygmund { .. } => {
            if p != n {
                return Err(Error::InvalidParams(format!(
                    "{} requires p = n, got p={p}, n={n}",
                    method.tag()
                )));
            }
        }
        Method::Fourier => {
            if p != 1 {
                return Err(Error::InvalidParams(format!("fourier requires p = 1, got p={p}")));
            }
        }
        Method::UPsi(_) | Method::ValleePoussin => {}
    }

    let lambda = match &method {
        Method::Fourier => vec![1.0; n],
        Method::ValleePoussin => ramp_table(n, p, |k| (k as f64) - (n as f64) + (p as f64)),
        Method::Fejer => ramp_table(n, p, |k| k as f64),
        Method::Zygmund { s } => ramp_table(n, p, |k| (k as f64).powf(*s)),
        Method::GenZygmund { phi } => {
            if phi.len() < n {
                return Err(Error::InvalidParams(format!(
                    "genz: phi table must cover k = 1..={n}, got {} entries",
                    phi.len()
                )));
            }
            for w in phi[..n].windows(2) {
                if w[1] <= w[0] {
                    return Err(Error::InvalidParams("genz: phi table must be strictly increasing".into()));
                }
            }
            if !(phi[n - 1] > 0.0) {
                return Err(Error::InvalidParams(format!("genz: phi(n) must be positive, got {}", phi[n - 1])));
            }
            // phi is indexed from k = 1
            ramp_table(n, p, |k| if k == 0 { 0.0 } else { phi[k - 1] })
        }
        Method::UPsi(psi) => {
            let phi_u = |k: usize| -> Result<f64> {
                let pk = psi.eval(k as f64)?;
                Ok(((k as f64) - (n as f64) + (p as f64)) / pk)
            };
            let phi_n = phi_u(n)?;
            if !(phi_n > 0.0) {
                return Err(Error::InvalidParams(format!("u: phi(n) = {phi_n} is not positive")));
            }
            // the ramp generator must increase on the ramp; reject weights
            // for which it does not
            let mut prev = 0.0;
            let lo = n.saturating_sub(p) + 1;
            for k in lo..=n {
                let v = phi_u(k)?;
                if v <= prev && k > lo {
                    return Err(Error::InvalidParams(format!(
                        "u: ramp generator not increasing at k={k} (phi={v})"
                    )));
                }
                prev = v;
            }
            let mut lambda = vec![1.0; n];
            for (k, l) in lambda.iter_mut().enumerate().take(n).skip(lo) {
                *l = 1.0 - phi_u(k)? / phi_n;
            }
            lambda
        }
    };

    Ok(MultiplierSet { n, p, lambda, method })
}

/// Table `1 - phi(k)/phi(n)` on the ramp `k = n-p+1..n-1`, 1 below it.
/// Every generator used here vanishes at `k = n - p` (or the ramp covers
/// the whole table when `p = n`), so the two branches agree at the break.
fn ramp_table<F: Fn(usize) -> f64>(n: usize, p: usize, phi: F) -> Vec<f64> {
    let lo = n - p;
    let denom = phi(n);
    let mut lambda = vec![1.0; n];
    for (k, l) in lambda.iter_mut().enumerate().take(n).skip(lo + 1) {
        *l = 1.0 - phi(k) / denom;
    }
    lambda
}

/// Apply a multiplier table to a coefficient table. Harmonics at and above
/// `n` are dropped: the operator's image is the polynomials of degree
/// `<= n - 1`.
pub fn apply_multipliers(mult: &MultiplierSet, coeffs: &TrigCoeffs) -> TrigCoeffs {
    let n = mult.n;
    let m_out = n - 1;
    let mut a = vec![0.0; m_out];
    let mut b = vec![0.0; m_out];
    for k in 1..=m_out {
        if k <= coeffs.max_harmonic() {
            a[k - 1] = mult.lambda[k] * coeffs.a[k - 1];
            b[k - 1] = mult.lambda[k] * coeffs.b[k - 1];
        }
    }
    TrigCoeffs { a0: mult.lambda[0] * coeffs.a0, a, b }
}
