//! Coefficient analysis and synthesis of periodic functions on uniform
//! grids, plus the grid sup norm.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Finite cosine/sine coefficient table. The constant term follows the
/// halved convention: the represented function is
/// `a0/2 + sum_k (a_k cos kx + b_k sin kx)`, `k = 1..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigCoeffs {
    pub a0: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl TrigCoeffs {
    pub fn new(a0: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::SizeMismatch(a.len(), b.len()));
        }
        if !a0.is_finite() || a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("coefficients must be finite".into()));
        }
        Ok(Self { a0, a, b })
    }

    pub fn zero(m: usize) -> Self {
        Self { a0: 0.0, a: vec![0.0; m], b: vec![0.0; m] }
    }

    /// Highest harmonic index carried by the table.
    pub fn max_harmonic(&self) -> usize {
        self.a.len()
    }

    /// Pointwise evaluation of the represented trigonometric polynomial.
    pub fn eval_at(&self, x: f64) -> f64 {
        let mut acc = 0.5 * self.a0;
        // recurrence on (cos kx, sin kx)
        let (sx, cx) = x.sin_cos();
        let (mut sk, mut ck) = (0.0_f64, 1.0_f64);
        for k in 0..self.a.len() {
            let c_next = ck * cx - sk * sx;
            let s_next = sk * cx + ck * sx;
            ck = c_next;
            sk = s_next;
            acc += self.a[k] * ck + self.b[k] * sk;
        }
        acc
    }
}

/// Samples of a 2pi-periodic function at `x_j = 2 pi j / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicGrid {
    pub values: Vec<f64>,
}

impl PeriodicGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParams("grid must have at least one sample".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("grid values must be finite".into()));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.len() as f64
    }

    pub fn from_fn<F: FnMut(f64) -> f64>(n: usize, mut f: F) -> Result<Self> {
        let values = (0..n).map(|j| f(2.0 * PI * j as f64 / n as f64)).collect();
        Self::new(values)
    }

    /// Grid mean, the trapezoidal surrogate of the function mean.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }
}

/// Trapezoidal-rule Fourier analysis up to harmonic `m`. Exact for
/// trigonometric polynomials of degree `<= m` when `N >= 2m + 2`.
pub fn analyze(grid: &PeriodicGrid, m: usize) -> Result<TrigCoeffs> {
    let n = grid.len();
    if n < 2 * m + 2 {
        return Err(Error::Aliasing { n, m });
    }
    let scale = 2.0 / n as f64;
    let a0 = scale * grid.values.iter().sum::<f64>();
    let mut a = vec![0.0; m];
    let mut b = vec![0.0; m];
    for (idx, (ak, bk)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
        let k = idx + 1;
        let step = 2.0 * PI * k as f64 / n as f64;
        let (s1, c1) = step.sin_cos();
        let (mut sk, mut ck) = (0.0_f64, 1.0_f64);
        let (mut sa, mut sb) = (0.0_f64, 0.0_f64);
        for &v in &grid.values {
            sa += v * ck;
            sb += v * sk;
            let c_next = ck * c1 - sk * s1;
            let s_next = sk * c1 + ck * s1;
            ck = c_next;
            sk = s_next;
        }
        *ak = scale * sa;
        *bk = scale * sb;
    }
    TrigCoeffs::new(a0, a, b)
}

/// Evaluate a coefficient table on a uniform grid of `n` nodes.
pub fn synthesize(coeffs: &TrigCoeffs, n: usize) -> Result<PeriodicGrid> {
    if n == 0 {
        return Err(Error::InvalidParams("grid size must be positive".into()));
    }
    PeriodicGrid::from_fn(n, |x| coeffs.eval_at(x))
}

/// `max_j |f_j - g_j|` over grids of equal size; a lower bound for the true
/// sup norm of the difference.
pub fn sup_norm_diff(f: &PeriodicGrid, g: &PeriodicGrid) -> Result<f64> {
    if f.len() != g.len() {
        return Err(Error::SizeMismatch(f.len(), g.len()));
    }
    Ok(f.values
        .iter()
        .zip(&g.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Default measurement grid size for deviations of an order-`n` operator.
pub fn default_grid_size(n: usize) -> usize {
    (64 * n).max(4096)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn analyze_pure_cosine() {
        let grid = PeriodicGrid::from_fn(16, |x| (3.0 * x).cos()).unwrap();
        let c = analyze(&grid, 5).unwrap();
        for k in 0..5 {
            let want = if k == 2 { 1.0 } else { 0.0 };
            assert_relative_eq!(c.a[k], want, epsilon = 1e-12);
            assert_relative_eq!(c.b[k], 0.0, epsilon = 1e-12);
        }
        assert_relative_eq!(c.a0, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn analyze_constant_halved_convention() {
        let grid = PeriodicGrid::from_fn(8, |_| 0.5).unwrap();
        let c = analyze(&grid, 2).unwrap();
        assert_relative_eq!(c.a0, 1.0, epsilon = 1e-13);
        assert!(c.a.iter().chain(c.b.iter()).all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn analyze_aliasing_guard() {
        let grid = PeriodicGrid::from_fn(8, |x| x.cos()).unwrap();
        assert!(matches!(analyze(&grid, 4), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn synthesize_explicit_degree_one() {
        let c = TrigCoeffs::new(0.0, vec![1.0], vec![0.0]).unwrap();
        let g = synthesize(&c, 4).unwrap();
        let want = [1.0, 0.0, -1.0, 0.0];
        for (v, w) in g.values.iter().zip(want.iter()) {
            assert_relative_eq!(v, w, epsilon = 1e-15);
        }
    }

    #[test]
    fn synthesize_zero_table() {
        let g = synthesize(&TrigCoeffs::zero(5), 12).unwrap();
        assert!(g.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn roundtrip_random_degree_eight() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let a: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let c = TrigCoeffs::new(rng.gen_range(-1.0..1.0), a, b).unwrap();
            let g = synthesize(&c, 32).unwrap();
            let back = analyze(&g, 8).unwrap();
            assert_relative_eq!(back.a0, c.a0, epsilon = 1e-12);
            for k in 0..8 {
                assert_relative_eq!(back.a[k], c.a[k], epsilon = 1e-12);
                assert_relative_eq!(back.b[k], c.b[k], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn sup_norm_cases() {
        let f = PeriodicGrid::from_fn(64, |x| x.cos()).unwrap();
        let z = PeriodicGrid::from_fn(64, |_| 0.0).unwrap();
        assert_relative_eq!(sup_norm_diff(&f, &f).unwrap(), 0.0);
        assert_relative_eq!(sup_norm_diff(&f, &z).unwrap(), 1.0, epsilon = 1e-15);

        let f_fine = PeriodicGrid::from_fn(2048, |x| x.cos() + 0.3 * (5.0 * x).sin()).unwrap();
        let z_fine = PeriodicGrid::from_fn(2048, |_| 0.0).unwrap();
        let f_coarse = PeriodicGrid::from_fn(64, |x| x.cos() + 0.3 * (5.0 * x).sin()).unwrap();
        let z_coarse = PeriodicGrid::from_fn(64, |_| 0.0).unwrap();
        assert!(
            sup_norm_diff(&f_fine, &z_fine).unwrap() >= sup_norm_diff(&f_coarse, &z_coarse).unwrap()
        );

        let g = PeriodicGrid::from_fn(32, |_| 0.0).unwrap();
        assert!(matches!(sup_norm_diff(&f, &g), Err(Error::SizeMismatch(_, _))));
    }

    proptest! {
        // sup_norm_diff is a metric: symmetry and triangle inequality.
        #[test]
        fn sup_norm_is_metric(seed in 0u64..500) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = 32;
            let f = PeriodicGrid::new((0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
            let g = PeriodicGrid::new((0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
            let h = PeriodicGrid::new((0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
            let fg = sup_norm_diff(&f, &g).unwrap();
            let gf = sup_norm_diff(&g, &f).unwrap();
            let fh = sup_norm_diff(&f, &h).unwrap();
            let hg = sup_norm_diff(&h, &g).unwrap();
            prop_assert!((fg - gf).abs() < 1e-15);
            prop_assert!(fg <= fh + hg + 1e-15);
        }

        // analyze . synthesize is the identity for m <= (N-2)/2.
        #[test]
        fn analyze_synthesize_identity(seed in 0u64..500) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m = rng.gen_range(0usize..12);
            let n = 2 * m + 2 + rng.gen_range(0usize..10);
            let a: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let c = TrigCoeffs::new(rng.gen_range(-3.0..3.0), a, b).unwrap();
            let back = analyze(&synthesize(&c, n).unwrap(), m).unwrap();
            prop_assert!((back.a0 - c.a0).abs() < 1e-12);
            for k in 0..m {
                prop_assert!((back.a[k] - c.a[k]).abs() < 1e-12);
                prop_assert!((back.b[k] - c.b[k]).abs() < 1e-12);
            }
        }
    }
}
