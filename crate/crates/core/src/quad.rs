//! Quadrature and sequence-acceleration building blocks.
//!
//! Everything here is generic over [`QuadValue`] so the same adaptive
//! drivers serve real integrands and complex contour integrands.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Integral value with an absolute error estimate.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

// 21-point Kronrod extension of the 10-point Gauss-Legendre rule.
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208056781156,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

fn qk21<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = T::zero();
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        let pair = f1 + f2;
        kronrod = kronrod + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).magnitude();
    (value, err)
}

/// Globally adaptive 21-point Gauss-Kronrod quadrature on a finite interval.
///
/// Stops when the summed error estimate drops below
/// `max(abs_tol, rel_tol * |I|)` or `max_intervals` is exhausted; in the
/// latter case `converged` is false.
pub fn gauss_kronrod<T, F>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> QuadResult<T>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let (v0, e0) = qk21(&mut f, a, b);
    let mut intervals: Vec<(f64, f64, T, f64)> = vec![(a, b, v0, e0)];
    let mut evaluations = 21;
    loop {
        let total = intervals.iter().fold(T::zero(), |acc, iv| acc + iv.2);
        let err: f64 = intervals.iter().map(|iv| iv.3).sum();
        let target = abs_tol.max(rel_tol * total.magnitude());
        if err <= target || intervals.len() >= max_intervals {
            return QuadResult {
                value: total,
                error: err,
                converged: err <= target,
                evaluations,
            };
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty interval list");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval cannot be split further in floating point
            let total = intervals.iter().fold(T::zero(), |acc, iv| acc + iv.2);
            return QuadResult {
                value: total + qk21(&mut f, lo, hi).0,
                error: err,
                converged: false,
                evaluations,
            };
        }
        let (vl, el) = qk21(&mut f, lo, mid);
        let (vr, er) = qk21(&mut f, mid, hi);
        evaluations += 42;
        intervals.push((lo, mid, vl, el));
        intervals.push((mid, hi, vr, er));
    }
}

/// Tanh-sinh (double exponential) quadrature on `[a, b]` with level
/// halving; the error estimate is the difference between the last two
/// levels.
pub fn tanh_sinh<T, F>(mut f: F, a: f64, b: f64, tol: f64, max_level: usize) -> QuadResult<T>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    const T_MAX: f64 = 4.0;
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let hpi = std::f64::consts::FRAC_PI_2;
    let mut evaluations = 0;

    // contribution of node t (and its mirror -t)
    let node = |t: f64, f: &mut F| -> T {
        let s = hpi * t.sinh();
        let cosh_s = s.cosh();
        let w = hpi * t.cosh() / (cosh_s * cosh_s);
        // distance from the nearer endpoint, computed without cancellation
        let gap = half * 2.0 / ((2.0 * s.abs()).exp() + 1.0);
        if t == 0.0 {
            return f(center) * (w * half);
        }
        let (xl, xr) = (a + gap, b - gap);
        let mut acc = T::zero();
        if xl > a {
            acc = acc + f(xl);
        }
        if xr < b {
            acc = acc + f(xr);
        }
        acc * (w * half)
    };

    let mut h = 1.0;
    let mut sum = node(0.0, &mut f);
    evaluations += 1;
    let mut k = 1;
    while (k as f64) * h <= T_MAX {
        sum = sum + node(k as f64 * h, &mut f);
        evaluations += 2;
        k += 1;
    }
    let mut estimate = sum * h;
    let mut error = f64::INFINITY;
    for _level in 1..=max_level {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= T_MAX {
            sum = sum + node(k as f64 * h, &mut f);
            evaluations += 2;
            k += 2;
        }
        let next = sum * h;
        error = (next - estimate).magnitude();
        estimate = next;
        if error <= tol {
            return QuadResult {
                value: estimate,
                error,
                converged: true,
                evaluations,
            };
        }
    }
    QuadResult {
        value: estimate,
        error,
        converged: error <= tol,
        evaluations,
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss-Jacobi rule on `[0, 1]` for the weight `s^b`, `b > -1`, built
/// from the eigen-decomposition of the Jacobi matrix (Golub-Welsch).
/// Weights sum to `1/(b+1)`.
pub fn gauss_jacobi_unit(n: usize, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(b > -1.0 && n > 0);
    // Jacobi (a = 0, b) recurrence on [-1, 1], shifted to [0, 1].
    let a = 0.0;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let alpha = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        jm[(k, k)] = 0.5 * (1.0 + alpha);
        if k + 1 < n {
            let m = kf + 1.0;
            let s1 = 2.0 * m + a + b;
            let beta = if m == 1.0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
            } else {
                4.0 * m * (m + a) * (m + b) * (m + a + b)
                    / (s1 * s1 * (s1 + 1.0) * (s1 - 1.0))
            };
            let off = 0.5 * beta.sqrt();
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jm);
    let mu0 = 1.0 / (b + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.into_iter().unzip()
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums.
///
/// Returns the highest-order even-column estimate and an error estimate
/// from the spread of the last entries.
pub fn wynn_epsilon(sums: &[f64]) -> (f64, f64) {
    let n = sums.len();
    if n == 0 {
        return (0.0, f64::INFINITY);
    }
    if n < 3 {
        let last = sums[n - 1];
        let err = if n == 2 { (sums[1] - sums[0]).abs() } else { f64::INFINITY };
        return (last, err);
    }
    // prev = column k-1, cur = column k
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut best = sums[n - 1];
    let mut best_err = (sums[n - 1] - sums[n - 2]).abs();
    let mut k = 0;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 {
                // exact convergence in this column
                return if k % 2 == 0 {
                    (cur[i + 1], best_err.min(f64::EPSILON * cur[i + 1].abs()))
                } else {
                    (best, best_err)
                };
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        k += 1;
        if k % 2 == 0 && next.len() >= 2 {
            let m = next.len();
            let est = next[m - 1];
            let err = (next[m - 1] - next[m - 2]).abs();
            if err.is_finite() && est.is_finite() && err <= best_err {
                best = est;
                best_err = err;
            }
        }
        prev = cur;
        cur = next;
    }
    (best, best_err)
}

/// Levin-type transform with user supplied remainder estimates `omega`.
///
/// With `omega[n] = a[n]` (the `t` variant) this is well suited to the
/// alternating panel sums of Fourier-type integrals.
pub fn levin(sums: &[f64], omega: &[f64], scale: f64) -> f64 {
    let k = sums.len() - 1;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut binom = 1.0;
    let kf = k as f64;
    for j in 0..=k {
        let jf = j as f64;
        let c = binom
            * ((scale + jf) / (scale + kf)).powf(kf - 1.0)
            * if j % 2 == 0 { 1.0 } else { -1.0 };
        num += c * sums[j] / omega[j];
        den += c / omega[j];
        binom = binom * (kf - jf) / (jf + 1.0);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_is_exact_for_degree_31() {
        // K21 integrates polynomials up to degree 31 exactly.
        for p in [0, 2, 10, 20, 30] {
            let (v, _) = qk21(&mut |x: f64| x.powi(p), -1.0, 1.0);
            let exact = 2.0 / (p as f64 + 1.0);
            assert!((v - exact).abs() < 1e-15, "p={p}: {v} vs {exact}");
        }
        let wsum: f64 = WGK[..10].iter().sum::<f64>() * 2.0 + WGK[10];
        assert!((wsum - 2.0).abs() < 1e-15);
        let gsum: f64 = WG.iter().sum::<f64>() * 2.0;
        assert!((gsum - 2.0).abs() < 1e-15);
        // 10-point Gauss rule exact up to degree 19
        let mut g = 0.0;
        for j in 0..10 {
            if j % 2 == 1 {
                g += 2.0 * WG[j / 2] * XGK[j].powi(18);
            }
        }
        assert!((g - 2.0 / 19.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_gk_handles_sqrt_endpoint() {
        let r = gauss_kronrod(|x: f64| x.sqrt(), 0.0, 1.0, 1e-13, 1e-13, 200);
        assert!(r.converged);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn complex_gk_integrates_exponential() {
        let r = gauss_kronrod(
            |x: f64| Complex64::new(0.0, x).exp(),
            0.0,
            std::f64::consts::PI,
            1e-14,
            0.0,
            100,
        );
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = tanh_sinh(|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-12, 10);
        assert!((r.value - 2.0).abs() < 1e-9, "{}", r.value);
        let r = tanh_sinh(|x: f64| (-x * x).exp(), -3.0, 3.0, 1e-14, 10);
        let exact = std::f64::consts::PI.sqrt() * 0.999977909503001415;
        assert!((r.value - exact).abs() < 1e-13);
    }

    #[test]
    fn gauss_legendre_weights_and_exactness() {
        for n in [1, 2, 5, 16, 33] {
            let (x, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-14);
            let deg = 2 * n - 2;
            let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((v - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn gauss_jacobi_moments() {
        // ∫_0^1 s^b s^k ds = 1/(b+k+1)
        for b in [-0.5, -0.2, 0.0, 0.7] {
            let (x, w) = gauss_jacobi_unit(12, b);
            for k in 0..20 {
                let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
                let exact = 1.0 / (b + k as f64 + 1.0);
                assert!((v - exact).abs() < 1e-13, "b={b} k={k}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = 1 - 1/2 + 1/3 - ...
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=20)
            .map(|n| {
                s += if n % 2 == 1 { 1.0 } else { -1.0 } / n as f64;
                s
            })
            .collect();
        let (v, e) = wynn_epsilon(&sums);
        assert!((v - 2f64.ln()).abs() < 1e-12, "{v}");
        assert!(e < 1e-9);
    }

    #[test]
    fn levin_accelerates_alternating_series() {
        let terms: Vec<f64> = (1..=16)
            .map(|n| if n % 2 == 1 { 1.0 } else { -1.0 } / n as f64)
            .collect();
        let sums: Vec<f64> = terms
            .iter()
            .scan(0.0, |acc, t| {
                *acc += t;
                Some(*acc)
            })
            .collect();
        let v = levin(&sums, &terms, 1.0);
        assert!((v - 2f64.ln()).abs() < 1e-13, "{v}");
    }
}
