//! Leading asymptotic term of the class error of the ramped operators, and
//! the normalized remainder against a measured error.
//!
//! The constant `A` depends on how the half-decay period `T(n)` of the
//! weight compares with 1 and with the ramp width `p`:
//!
//! * `T <= 1`: `A = ln p` (weight halves within one harmonic),
//! * `1 < T <= p`: `A = ln(p / T)`,
//! * `T > p`: `A = ln(T / p)`.
//!
//! The leading term of the class error is `psi(n) (4/pi^2) A` plus bounded
//! lower-order contributions.

use crate::error::{Error, Result};
use crate::psi::PsiSpec;
use std::f64::consts::PI;

/// Which branch of the piecewise constant was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ACase {
    /// `T(n) <= 1`.
    PeriodBelowOne,
    /// `1 < T(n) <= p`.
    PeriodBelowRamp,
    /// `T(n) > p`.
    PeriodAboveRamp,
}

impl ACase {
    pub fn tag(&self) -> &'static str {
        match self {
            ACase::PeriodBelowOne => "T<=1",
            ACase::PeriodBelowRamp => "1<T<=p",
            ACase::PeriodAboveRamp => "T>p",
        }
    }
}

/// The constant `A`, its branch, and the resulting leading term.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticEstimate {
    pub a_value: f64,
    pub case: ACase,
    /// Half-decay period `T(n)` used for the branch selection.
    pub period: f64,
    /// `psi(n) (4/pi^2) A`.
    pub main_term: f64,
}

/// Evaluate the piecewise constant `A` and the leading term at `(n, p)`.
pub fn estimate(psi: &PsiSpec, n: usize, p: usize) -> Result<AsymptoticEstimate> {
    if n == 0 || p == 0 || p > n {
        return Err(Error::InvalidParams(format!("need 1 <= p <= n, got n={n}, p={p}")));
    }
    let chars = psi.characteristics(n as f64)?;
    let period = chars.period;
    let pf = p as f64;
    let (a_value, case) = if period <= 1.0 {
        (pf.ln(), ACase::PeriodBelowOne)
    } else if period <= pf {
        ((pf / period).ln(), ACase::PeriodBelowRamp)
    } else {
        ((period / pf).ln(), ACase::PeriodAboveRamp)
    };
    let main_term = chars.psi * (4.0 / (PI * PI)) * a_value;
    Ok(AsymptoticEstimate { a_value, case, period, main_term })
}

/// Leading term of the partial-sum error (`p = 1`): the positive part of
/// `ln T(n)`.
pub fn estimate_partial_sum(psi: &PsiSpec, n: usize) -> Result<AsymptoticEstimate> {
    estimate(psi, n, 1)
}

/// Normalized remainder of a measured class error against the leading term:
/// `measured / psi(n) - (4/pi^2) A`.
pub fn remainder(measured: f64, psi: &PsiSpec, n: usize, p: usize) -> Result<f64> {
    let est = estimate(psi, n, p)?;
    let psi_n = psi.eval(n as f64)?;
    Ok(measured / psi_n - (4.0 / (PI * PI)) * est.a_value)
}

/// Exact leading term of the flat-ramp operator on the exponential weight
/// `exp(-alpha t)`: `exp(-alpha (n - p + 1)) 4 / (p pi (1 - exp(-2 alpha)))`.
pub fn vp_exponential_main_term(alpha: f64, n: usize, p: usize) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParams(format!("alpha must be positive, got {alpha}")));
    }
    if n == 0 || p == 0 || p > n {
        return Err(Error::InvalidParams(format!("need 1 <= p <= n, got n={n}, p={p}")));
    }
    let e = (-alpha * (n as f64 - p as f64 + 1.0)).exp();
    Ok(e * 4.0 / (p as f64 * PI * (1.0 - (-2.0 * alpha).exp())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn slow_weight_long_period() {
        // psi = 1/t: T(n) = n, so T > p and A = ln(n/p)
        let psi = PsiSpec::power(1.0).unwrap();
        let est = estimate(&psi, 100, 1).unwrap();
        assert_eq!(est.case, ACase::PeriodAboveRamp);
        assert_relative_eq!(est.a_value, 100.0_f64.ln(), max_relative = 1e-9);
        assert_relative_eq!(est.period, 100.0, max_relative = 1e-9);
        assert_relative_eq!(
            est.main_term,
            0.01 * (4.0 / (PI * PI)) * 100.0_f64.ln(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn fast_weight_short_period() {
        // exp(-t ln 2): T = 1 everywhere, so A = ln p
        let psi = PsiSpec::exp(LN_2, 1.0).unwrap();
        let est = estimate(&psi, 20, 5).unwrap();
        assert_eq!(est.case, ACase::PeriodBelowOne);
        assert_relative_eq!(est.a_value, 5.0_f64.ln(), max_relative = 1e-9);
    }

    #[test]
    fn full_ramp_on_slow_weight_vanishes() {
        // psi = 1/t with p = n: T = n = p, A = ln(p/T) = 0
        let psi = PsiSpec::power(1.0).unwrap();
        let est = estimate(&psi, 64, 64).unwrap();
        assert_eq!(est.case, ACase::PeriodBelowRamp);
        assert!(est.a_value.abs() < 1e-9);
    }

    #[test]
    fn continuous_across_period_one() {
        // exp(-alpha t) has constant T = ln 2 / alpha; straddle T = 1
        let lo = PsiSpec::exp(LN_2 / (1.0 - 1e-8), 1.0).unwrap();
        let hi = PsiSpec::exp(LN_2 / (1.0 + 1e-8), 1.0).unwrap();
        let a_lo = estimate(&lo, 30, 7).unwrap();
        let a_hi = estimate(&hi, 30, 7).unwrap();
        assert_ne!(a_lo.case, a_hi.case);
        assert_relative_eq!(a_lo.a_value, a_hi.a_value, epsilon = 1e-6);
    }

    #[test]
    fn continuous_across_period_equals_ramp() {
        // power weight: T(n) = (2^{1/r} - 1) n; tune r so T(100) = 50
        let r0 = LN_2 / 1.5_f64.ln();
        let lo = PsiSpec::power(r0 * (1.0 + 1e-8)).unwrap();
        let hi = PsiSpec::power(r0 * (1.0 - 1e-8)).unwrap();
        let a_lo = estimate(&lo, 100, 50).unwrap();
        let a_hi = estimate(&hi, 100, 50).unwrap();
        assert_ne!(a_lo.case, a_hi.case);
        assert_relative_eq!(a_lo.a_value, a_hi.a_value, epsilon = 1e-6);
        assert!(a_lo.a_value.abs() < 1e-6);
    }

    #[test]
    fn partial_sum_is_positive_log_of_period() {
        let psi = PsiSpec::power(1.0).unwrap();
        for n in [2usize, 10, 100] {
            let est = estimate_partial_sum(&psi, n).unwrap();
            let direct = (n as f64).ln().max(0.0);
            assert_relative_eq!(est.a_value, direct, max_relative = 1e-8);
        }
        // fast weight: period <= 1 clamps to zero
        let fast = PsiSpec::exp(2.0, 1.0).unwrap();
        let est = estimate_partial_sum(&fast, 10).unwrap();
        assert!(est.a_value.abs() < 1e-12);
    }

    #[test]
    fn remainder_of_exact_leading_term_is_zero() {
        let psi = PsiSpec::power(2.0).unwrap();
        let est = estimate(&psi, 40, 8).unwrap();
        let r = remainder(est.main_term, &psi, 40, 8).unwrap();
        assert!(r.abs() < 1e-12);
        // one weight-unit above the leading term normalizes to 1
        let psi_n = psi.eval(40.0).unwrap();
        let r1 = remainder(est.main_term + psi_n, &psi, 40, 8).unwrap();
        assert_relative_eq!(r1, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn flat_ramp_exponential_closed_form() {
        // alpha = ln 2, n = 10, p = 5: 2^{-6} 4 / (5 pi (3/4)) = 1/(60 pi)
        let v = vp_exponential_main_term(LN_2, 10, 5).unwrap();
        assert_relative_eq!(v, 1.0 / (60.0 * PI), max_relative = 1e-12);
        assert!(vp_exponential_main_term(-1.0, 10, 5).is_err());
        assert!(vp_exponential_main_term(1.0, 5, 10).is_err());
    }

    #[test]
    fn rejects_bad_orders() {
        let psi = PsiSpec::power(1.0).unwrap();
        assert!(estimate(&psi, 0, 0).is_err());
        assert!(estimate(&psi, 4, 5).is_err());
    }
}
