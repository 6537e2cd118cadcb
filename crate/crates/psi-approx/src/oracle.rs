//! Exact deviation machinery: the deviation kernel of a summation operator
//! over a weighted class, its L1 class error, and the lower bound witnessed
//! by the extremal derivative.
//!
//! The deviation of the operator at a class member with derivative `phi` is
//! `(1/pi) int phi(x + t) K(t) dt`, where `K` collects the tapered ramp
//! harmonics and the untouched spectrum above the operator order:
//!
//! `K(t) = sum_{k<n} (1 - lambda(k)) psi(k) cos(kt + theta)
//!       + sum_{k>=n} psi(k) cos(kt + theta)`.
//!
//! The class error over the unit ball of derivatives is `(1/pi) ||K||_1`.

use crate::error::{Error, Result};
use crate::psi::PsiSpec;
use crate::psi_class::{build_extremal_derivative, ClassParams};
use crate::quad::{integrate_periodic, l1_norm_periodic, QuadResult, SINGULARITY_WINDOW};
use crate::summation::{build_multipliers, Method, MultiplierSet};
use std::cell::RefCell;
use std::f64::consts::PI;

/// Hard cap on tail terms summed per kernel evaluation.
pub const MAX_TAIL_TERMS: usize = 10_000_000;

/// Upper envelope of the operator's coefficient response on the unit class
/// ball: zero below the ramp, the ramp taper times the weight across it,
/// the bare weight above the operator order. Argument is `u = k / n`.
pub fn tau_eval(psi: &PsiSpec, n: usize, p: usize, u: f64) -> Result<f64> {
    if n == 0 || p == 0 || p > n {
        return Err(Error::InvalidParams(format!("need 1 <= p <= n, got n={n}, p={p}")));
    }
    if !(u >= 0.0) || !u.is_finite() {
        return Err(Error::Domain(format!("tau is defined for u >= 0, got {u}")));
    }
    let nf = n as f64;
    let break_lo = (nf - p as f64) / nf;
    if u <= break_lo {
        Ok(0.0)
    } else if u <= 1.0 {
        Ok(psi.eval(nf)? * (nf * u - nf + p as f64) / p as f64)
    } else {
        psi.eval(nf * u)
    }
}

/// The deviation kernel of one summation operator over one class.
#[derive(Debug, Clone)]
pub struct DeviationKernel {
    psi: PsiSpec,
    theta: f64,
    n: usize,
    /// `(1 - lambda(k)) psi(k)` for `k = 1..n-1`; zero below the ramp.
    ramp_weight: Vec<f64>,
    /// First `k` with a nonzero ramp weight.
    ramp_start: usize,
    /// Default per-evaluation tail tolerance.
    eps_tail: f64,
    /// Memoized `psi(n + i)`; the tail revisits the same integer abscissae
    /// on every kernel evaluation.
    psi_tail: RefCell<Vec<f64>>,
}

/// One capped tail evaluation: the value, the achieved remainder bound, and
/// whether the term cap was hit before the bound met the request.
struct TailEval {
    value: f64,
    bound: f64,
    capped: bool,
}

impl DeviationKernel {
    pub fn new(params: &ClassParams, mult: &MultiplierSet, eps_tail: f64) -> Result<Self> {
        if !(eps_tail > 0.0) || !eps_tail.is_finite() {
            return Err(Error::InvalidParams(format!(
                "tail tolerance must be positive, got {eps_tail}"
            )));
        }
        let n = mult.n();
        let lambda = mult.lambda();
        let mut ramp_weight = Vec::with_capacity(n.saturating_sub(1));
        for k in 1..n {
            ramp_weight.push((1.0 - lambda[k]) * params.psi.eval(k as f64)?);
        }
        let ramp_start = ramp_weight
            .iter()
            .position(|w| *w != 0.0)
            .map(|i| i + 1)
            .unwrap_or(n);
        Ok(Self {
            psi: params.psi.clone(),
            theta: params.theta(),
            n,
            ramp_weight,
            ramp_start,
            eps_tail,
            psi_tail: RefCell::new(Vec::new()),
        })
    }

    /// `psi(n + i)` through the memo table.
    fn psi_at(&self, i: usize) -> Result<f64> {
        {
            let cache = self.psi_tail.borrow();
            if i < cache.len() {
                return Ok(cache[i]);
            }
        }
        let mut cache = self.psi_tail.borrow_mut();
        let target = (i + 1).max(cache.len() * 2).max(64);
        for j in cache.len()..target {
            match self.psi.eval((self.n + j) as f64) {
                Ok(v) => cache.push(v),
                // prefetch past the requested index may leave the domain of
                // a tabulated weight; only the requested index must succeed
                Err(_) if j > i => break,
                Err(e) => return Err(e),
            }
        }
        Ok(cache[i])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps_tail(&self) -> f64 {
        self.eps_tail
    }

    /// Reduce to `(-pi, pi]` and keep evaluation points off the singular
    /// point at zero.
    fn reduce(&self, t: f64) -> f64 {
        let mut x = (t + PI).rem_euclid(2.0 * PI) - PI;
        if x <= -PI {
            x += 2.0 * PI;
        }
        if x.abs() < SINGULARITY_WINDOW {
            x = if x < 0.0 { -SINGULARITY_WINDOW } else { SINGULARITY_WINDOW };
        }
        x
    }

    /// Tapered finite part: `sum_{k<n} (1 - lambda(k)) psi(k) cos(kt + theta)`.
    fn finite_part(&self, t: f64) -> f64 {
        let (st, ct) = t.sin_cos();
        let (sin_th, cos_th) = self.theta.sin_cos();
        // start the recurrence at k = ramp_start
        let start = self.ramp_start as f64 * t;
        let (mut sk, mut ck) = start.sin_cos();
        let mut acc = 0.0;
        for k in self.ramp_start..self.n {
            let w = self.ramp_weight[k - 1];
            if w != 0.0 {
                acc += w * (cos_th * ck - sin_th * sk);
            }
            let c_next = ck * ct - sk * st;
            let s_next = sk * ct + ck * st;
            ck = c_next;
            sk = s_next;
        }
        acc
    }

    /// Tail `sum_{k>=n} psi(k) cos(kt + theta)` by summation by parts:
    /// with `q = e^{it}`, `D = 1/(1-q)` and `d_k = psi(k) - psi(k-1)`,
    ///
    /// `sum_{k>=n} psi(k) q^k = D (psi(n) q^n + sum_{k>n} d_k q^k)`.
    ///
    /// After truncating at `M` the remainder is below
    /// `|D| min(psi(M), 2 |D| |d_{M+1}|)`: the first bound from the total
    /// variation of the weight past `M`, the second from summing the
    /// (nonnegative, by convexity) second differences once more.
    fn tail_capped(&self, t: f64, eps: f64) -> Result<TailEval> {
        let n = self.n;
        let nf = n as f64;
        // D = 1/(1-q)
        let (st, ct) = t.sin_cos();
        let denom = (1.0 - ct) * (1.0 - ct) + st * st;
        let d_re = (1.0 - ct) / denom;
        let d_im = st / denom;
        let d_abs = (d_re * d_re + d_im * d_im).sqrt();

        // acc = psi(n) q^n + sum d_k q^k, complex
        let start = nf * t;
        let (mut sk, mut ck) = start.sin_cos();
        let mut psi_prev = self.psi_at(0)?;
        let mut acc_re = psi_prev * ck;
        let mut acc_im = psi_prev * sk;

        let mut bound = d_abs * psi_prev;
        let mut capped = true;
        let mut psi_cur = psi_prev;
        for step in 1..=MAX_TAIL_TERMS {
            let c_next = ck * ct - sk * st;
            let s_next = sk * ct + ck * st;
            ck = c_next;
            sk = s_next;
            psi_cur = self.psi_at(step)?;
            let dk = psi_cur - psi_prev;
            // remainder bound for truncation at M = k - 1
            bound = d_abs * psi_prev.min(2.0 * d_abs * dk.abs());
            if bound <= eps {
                capped = false;
                break;
            }
            acc_re += dk * ck;
            acc_im += dk * sk;
            psi_prev = psi_cur;
            if step % 8192 == 0 {
                // renormalize the unit rotation to stop drift
                let norm = (ck * ck + sk * sk).sqrt();
                ck /= norm;
                sk /= norm;
            }
        }
        if capped {
            // total-variation bound only; psi_prev has caught up to psi_cur
            bound = d_abs * psi_cur;
        }

        // value = Re(e^{i theta} D acc), bound scales by |e^{i theta} D| = |D|
        // already folded in above
        let s_re = d_re * acc_re - d_im * acc_im;
        let s_im = d_re * acc_im + d_im * acc_re;
        let (sin_th, cos_th) = self.theta.sin_cos();
        Ok(TailEval { value: cos_th * s_re - sin_th * s_im, bound, capped })
    }

    /// Evaluate `K(t)` to the kernel's own tail tolerance. Fails with
    /// `TailBudget` when the weight decays too slowly near this `t` for the
    /// requested tolerance.
    pub fn eval(&self, t: f64) -> Result<f64> {
        self.eval_with_tol(t, self.eps_tail).map(|(v, _)| v)
    }

    /// Evaluate with an explicit tail tolerance; returns the value and the
    /// achieved remainder bound.
    pub fn eval_with_tol(&self, t: f64, eps: f64) -> Result<(f64, f64)> {
        let x = self.reduce(t);
        let tail = self.tail_capped(x, eps)?;
        if tail.capped && tail.bound > eps {
            return Err(Error::TailBudget { t: x, eps });
        }
        Ok((self.finite_part(x) + tail.value, tail.bound))
    }

    /// Best-effort evaluation: never fails on a slow tail, reports the
    /// achieved bound instead.
    fn eval_capped(&self, t: f64, eps: f64) -> Result<(f64, f64)> {
        let x = self.reduce(t);
        let tail = self.tail_capped(x, eps)?;
        Ok((self.finite_part(x) + tail.value, tail.bound))
    }
}

/// A measured class error with its accumulated error budget.
#[derive(Debug, Clone, Copy)]
pub struct ClassError {
    pub value: f64,
    /// Quadrature error plus integrated tail tolerance plus any defect from
    /// capped tail evaluations.
    pub err_estimate: f64,
    pub panels: usize,
}

struct KernelQuad {
    quad: QuadResult,
    eps_integral: f64,
    defect: f64,
}

/// Shared driver: run a quadrature pass over the kernel with the pointwise
/// relaxed tail tolerance `eps(t) = eps_tail max(1, t0/|t|)`, `t0 = pi/n`.
/// The relaxation keeps the summation-by-parts tail affordable near `t = 0`;
/// its contribution to the integral stays of order `eps_tail log n`.
fn kernel_quad<G: FnMut(f64, f64) -> f64>(
    kernel: &DeviationKernel,
    tol: f64,
    signed_weight: Option<G>,
) -> Result<KernelQuad> {
    let eps_tail = kernel.eps_tail();
    let t0 = PI / kernel.n() as f64;
    let mut defect_psi_max = 0.0_f64;
    let mut failure: Option<Error> = None;
    let mut weight = signed_weight;
    let signed = weight.is_some();
    let mut f = |t: f64| -> f64 {
        let eps = eps_tail * (t0 / t.abs()).max(1.0);
        match kernel.eval_capped(t, eps) {
            Ok((v, bound)) => {
                if bound > eps {
                    // psi-equivalent of the achieved bound; integrates to a
                    // log factor, accounted for below
                    let psi_eq = bound * 2.0 * (t / 2.0).sin().abs();
                    defect_psi_max = defect_psi_max.max(psi_eq);
                }
                match &mut weight {
                    Some(w) => v * w(t, v),
                    None => v,
                }
            }
            Err(e) => {
                if failure.is_none() {
                    failure = Some(e);
                }
                0.0
            }
        }
    };
    let quad = if signed {
        integrate_periodic(&mut f, tol)?
    } else {
        l1_norm_periodic(&mut f, tol)?
    };
    if let Some(e) = failure {
        return Err(e);
    }

    // integral of the pointwise tail tolerance over the period
    let delta = SINGULARITY_WINDOW;
    let eps_integral = 2.0 * eps_tail * (PI + t0 * (t0.max(delta) / delta).ln());
    // integral of |D(t)| over |t| in [delta, pi] is below 2 ln(4/delta)
    let defect = defect_psi_max * 2.0 * (4.0 / delta).ln();
    Ok(KernelQuad { quad, eps_integral, defect })
}

/// Class error of a summation operator: `(1/pi) ||K||_1`.
pub fn class_error_for_multipliers(
    params: &ClassParams,
    mult: &MultiplierSet,
    tol: f64,
) -> Result<ClassError> {
    if !(tol > 0.0 && tol <= 0.1) {
        return Err(Error::InvalidParams(format!("tol must be in (0, 0.1], got {tol}")));
    }
    let psi_n = params.psi.eval(mult.n() as f64)?;
    let eps_tail = tol * psi_n / 100.0;
    let kernel = DeviationKernel::new(params, mult, eps_tail)?;
    let kq = kernel_quad::<fn(f64, f64) -> f64>(&kernel, tol, None)?;
    Ok(ClassError {
        value: kq.quad.value / PI,
        err_estimate: (kq.quad.err_estimate + kq.eps_integral + kq.defect) / PI,
        panels: kq.quad.panels,
    })
}

/// Class error of a named method at `(n, p)`.
pub fn class_error_for_method(
    params: &ClassParams,
    method: Method,
    n: usize,
    p: usize,
    tol: f64,
) -> Result<ClassError> {
    let mult = build_multipliers(method, n, p)?;
    class_error_for_multipliers(params, &mult, tol)
}

/// Class error of the weight-adapted ramp operator at `(n, p)`.
pub fn class_error(params: &ClassParams, n: usize, p: usize, tol: f64) -> Result<ClassError> {
    class_error_for_method(params, Method::UPsi(params.psi.clone()), n, p, tol)
}

/// Deviation `(1/pi) int phi(t) K(t) dt` of a specific derivative at `x = 0`.
/// For any admissible `phi` this is a lower bound for the class error.
pub fn deviation_functional<F: FnMut(f64) -> f64>(
    params: &ClassParams,
    mult: &MultiplierSet,
    mut phi: F,
    tol: f64,
) -> Result<ClassError> {
    if !(tol > 0.0 && tol <= 0.1) {
        return Err(Error::InvalidParams(format!("tol must be in (0, 0.1], got {tol}")));
    }
    let psi_n = params.psi.eval(mult.n() as f64)?;
    let eps_tail = tol * psi_n / 100.0;
    let kernel = DeviationKernel::new(params, mult, eps_tail)?;
    let kq = kernel_quad(&kernel, tol, Some(|t: f64, _v: f64| phi(t)))?;
    Ok(ClassError {
        value: kq.quad.value / PI,
        err_estimate: (kq.quad.err_estimate + kq.eps_integral + kq.defect) / PI,
        panels: kq.quad.panels,
    })
}

/// Class error recomputed by substituting `sign(K)` for the derivative in
/// the deviation functional. Agreement with [`class_error_for_multipliers`]
/// confirms that the supremum over the unit ball is attained by the sign of
/// the kernel.
pub fn attained_by_kernel_sign(
    params: &ClassParams,
    mult: &MultiplierSet,
    tol: f64,
) -> Result<ClassError> {
    if !(tol > 0.0 && tol <= 0.1) {
        return Err(Error::InvalidParams(format!("tol must be in (0, 0.1], got {tol}")));
    }
    let psi_n = params.psi.eval(mult.n() as f64)?;
    let eps_tail = tol * psi_n / 100.0;
    let kernel = DeviationKernel::new(params, mult, eps_tail)?;
    let kq = kernel_quad(&kernel, tol, Some(|_t: f64, v: f64| v.signum()))?;
    Ok(ClassError {
        value: kq.quad.value / PI,
        err_estimate: (kq.quad.err_estimate + kq.eps_integral + kq.defect) / PI,
        panels: kq.quad.panels,
    })
}

/// Lower bound on the class error from the explicit extremal derivative.
pub fn lower_bound_extremal(
    params: &ClassParams,
    n: usize,
    p: usize,
    tol: f64,
) -> Result<ClassError> {
    let mult = build_multipliers(Method::UPsi(params.psi.clone()), n, p)?;
    let ed = build_extremal_derivative(params, n, p)?;
    let mut r = deviation_functional(params, &mult, |t| ed.eval(t), tol)?;
    // -phi is admissible whenever phi is, so the bound is one-signed
    r.value = r.value.abs();
    Ok(r)
}
