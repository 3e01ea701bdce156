//! Brute-force reference routes used to certify the closed forms.
//!
//! These are deliberately simple and slow. Each returns a value together
//! with an error estimate and refuses (with an error) when it cannot
//! certify its own accuracy.

use crate::error::{Error, Result};
use crate::quad::{gauss_kronrod, wynn_epsilon};
use crate::special::ln_gamma_abs;
use num_complex::Complex64;
use std::f64::consts::PI;

/// A reference value with its certified (or estimated) absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    pub error: f64,
}

/// Defining series of `E_{α,β}(z)` with compensated (Neumaier) summation.
///
/// The error bound accounts for the truncated tail and for the rounding of
/// every term; if it exceeds `target` the call fails instead of returning
/// a value that cancellation has destroyed.
pub fn ml_series_oracle(alpha: f64, beta: f64, z: f64, target: f64) -> Result<OracleValue> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::domain("ml_series_oracle needs alpha > 0, beta > 0"));
    }
    if z.abs() > 30.0 {
        return Err(Error::Cancellation(format!("|z| = {} exceeds 30", z.abs())));
    }
    // per-term relative error of z^n / Γ(nα+β) in double precision
    const TERM_REL: f64 = 1e-14;
    let ln_abs_z = z.abs().ln();
    let peak = z.abs().powf(1.0 / alpha);
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut abs_sum = 0.0;
    let mut last = f64::INFINITY;
    for n in 0..200_000u32 {
        let arg = n as f64 * alpha + beta;
        let term = if n == 0 {
            crate::special::reciprocal_gamma(beta)
        } else if z == 0.0 {
            0.0
        } else {
            let ln_mag = n as f64 * ln_abs_z - ln_gamma_abs(arg);
            if ln_mag > 700.0 {
                return Err(Error::Cancellation(format!(
                    "series terms overflow for alpha={alpha}, z={z}"
                )));
            }
            if arg < crate::special::GAMMA_MAX_ARG && ln_mag > -700.0 {
                z.powi(n as i32) * crate::special::reciprocal_gamma(arg)
            } else {
                let sign = if z < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
                sign * ln_mag.exp()
            }
        };
        // Neumaier summation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        abs_sum += term.abs();
        last = term.abs();
        if arg > peak + 2.0 && arg > 3.0 && last < target / 10.0 {
            break;
        }
    }
    let error = last + TERM_REL * abs_sum + f64::EPSILON * (sum + comp).abs();
    if error > target {
        return Err(Error::Cancellation(format!(
            "certified error {error:e} exceeds target {target:e} (alpha={alpha}, beta={beta}, z={z})"
        )));
    }
    Ok(OracleValue { value: sum + comp, error })
}

/// Trapezoid rule on the parabolic Bromwich contour
/// `s(θ) = N (0.1309 − 0.1194 θ² + 0.25 i θ) / t`, θ ∈ (−π, π), with `N`
/// midpoint nodes. Only the upper half is evaluated; `F(s̄) = F̄(s)`.
fn talbot(fhat: &dyn Fn(Complex64) -> Complex64, t: f64, n: usize) -> f64 {
    let nf = n as f64;
    let mut acc = 0.0;
    for k in n / 2..n {
        let theta = -PI + (k as f64 + 0.5) * 2.0 * PI / nf;
        let z = Complex64::new(nf * (0.1309 - 0.1194 * theta * theta), nf * 0.25 * theta);
        let dz = Complex64::new(-nf * 0.2388 * theta, nf * 0.25);
        acc += (z.exp() * fhat(z / t) * dz).im;
    }
    2.0 * acc / (nf * t)
}

/// Numerical inverse Laplace transform on a parabolic (Talbot-type)
/// deformation of the Bromwich line.
///
/// The estimate uses `nodes` contour nodes; the error is the difference
/// to a run with twice as many. Fails when that difference exceeds
/// `1e-8 · max(1, |f(t)|)`.
pub fn invert_laplace(
    fhat: &dyn Fn(Complex64) -> Complex64,
    t: f64,
    nodes: usize,
) -> Result<OracleValue> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("t = {t} must be positive")));
    }
    if nodes < 4 {
        return Err(Error::domain("at least 4 Talbot nodes are required"));
    }
    let coarse = talbot(fhat, t, nodes);
    let fine = talbot(fhat, t, 2 * nodes);
    let error = (coarse - fine).abs();
    if !error.is_finite() || error > 1e-8 * coarse.abs().max(1.0) {
        return Err(Error::NonConvergence {
            what: "Talbot inversion".into(),
            estimate: error,
        });
    }
    Ok(OracleValue { value: coarse, error })
}

/// `(1/π) ∫_0^∞ cos(kx) S(k) dk` for an even, bounded, decaying symbol.
///
/// The half line is cut at the zeros of `cos(kx)`; panel integrals are
/// accumulated by adaptive Gauss-Kronrod and the alternating partial sums
/// are extrapolated with Wynn's epsilon algorithm. The run is repeated
/// with halved tolerance and both results must agree.
pub fn fourier_invert_oracle(symbol: &dyn Fn(f64) -> f64, x: f64, tol: f64) -> Result<OracleValue> {
    let a = fourier_pass(symbol, x.abs(), tol)?;
    let b = fourier_pass(symbol, x.abs(), tol / 2.0)?;
    let error = a.error.max((a.value - b.value).abs());
    if error > tol {
        return Err(Error::NonConvergence {
            what: "Fourier inversion oracle".into(),
            estimate: error,
        });
    }
    Ok(OracleValue { value: b.value, error })
}

fn fourier_pass(symbol: &dyn Fn(f64) -> f64, x: f64, tol: f64) -> Result<OracleValue> {
    let panel_tol = tol * 1e-3;
    if x == 0.0 {
        return fourier_at_origin(symbol, tol);
    }
    let period = PI / x;
    let mut sums: Vec<f64> = Vec::new();
    let mut total = 0.0;
    let mut lo = 0.0;
    let mut hi = 0.5 * period;
    let mut alternating_run = 0;
    let mut prev_panel = 0.0;
    let mut small_run = 0;
    for _ in 0..200_000 {
        let r = gauss_kronrod(|k: f64| (k * x).cos() * symbol(k), lo, hi, panel_tol, 1e-14, 200);
        let panel = r.value;
        total += panel;
        sums.push(total);
        if panel.abs() < panel_tol {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 4 && symbol(hi).abs() < panel_tol {
            return Ok(OracleValue { value: total / PI, error: 4.0 * panel_tol });
        }
        if panel * prev_panel < 0.0 && panel.abs() < prev_panel.abs() {
            alternating_run += 1;
        } else {
            alternating_run = 0;
        }
        prev_panel = panel;
        if alternating_run >= 40 {
            let tail = &sums[sums.len() - 30..];
            let (v, e) = wynn_epsilon(tail);
            let (v2, _) = wynn_epsilon(&tail[..24]);
            let err = e.max((v - v2).abs());
            if err < tol * PI * 0.1 {
                return Ok(OracleValue { value: v / PI, error: err / PI });
            }
            // decay rate check: partial-sum increments should shrink
            let first = (tail[1] - tail[0]).abs();
            let lastd = (tail[29] - tail[28]).abs();
            if lastd > 0.9 * first {
                return Err(Error::NonConvergence {
                    what: "oscillatory tail acceleration (decay too slow)".into(),
                    estimate: err / PI,
                });
            }
            if alternating_run > 400 {
                return Err(Error::NonConvergence {
                    what: "oscillatory tail acceleration".into(),
                    estimate: err / PI,
                });
            }
        }
        lo = hi;
        hi += period;
    }
    Err(Error::NonConvergence {
        what: "Fourier inversion oracle panel budget".into(),
        estimate: f64::INFINITY,
    })
}

fn fourier_at_origin(symbol: &dyn Fn(f64) -> f64, tol: f64) -> Result<OracleValue> {
    let k0 = 1.0;
    let head = gauss_kronrod(|k: f64| symbol(k), 0.0, k0, tol * 1e-3, 1e-14, 400);
    // tail on k = k0 e^u
    let mut tail = 0.0;
    let mut err = head.error;
    let mut u0 = 0.0;
    for _ in 0..200 {
        let r = gauss_kronrod(
            |u: f64| {
                let k = k0 * u.exp();
                symbol(k) * k
            },
            u0,
            u0 + 2.0,
            tol * 1e-3,
            1e-14,
            200,
        );
        tail += r.value;
        err += r.error;
        u0 += 2.0;
        let k = k0 * u0.exp();
        let edge = (symbol(k) * k).abs();
        if r.value.abs() < tol * 1e-3 && edge < tol * 1e-3 {
            return Ok(OracleValue { value: (head.value + tail) / PI, error: err / PI + tol * 1e-3 });
        }
        if u0 > 12.0 {
            let k_prev = k0 * (u0 - 2.0).exp();
            let prev_edge = (symbol(k_prev) * k_prev).abs();
            if edge > prev_edge * 0.99 {
                return Err(Error::NonConvergence {
                    what: "symbol decays too slowly for the integral at x = 0".into(),
                    estimate: edge,
                });
            }
        }
    }
    Err(Error::NonConvergence {
        what: "tail integration at x = 0".into(),
        estimate: f64::INFINITY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ml;

    #[test]
    fn series_oracle_elementary_values() {
        let v = ml_series_oracle(1.0, 1.0, -1.0, 1e-13).unwrap();
        assert!((v.value - (-1f64).exp()).abs() < 1e-15);
        let v = ml_series_oracle(2.0, 2.0, -4.0, 1e-13).unwrap();
        assert!((v.value - 2f64.sin() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn series_oracle_refuses_large_argument_and_cancellation() {
        assert!(matches!(ml_series_oracle(1.0, 1.0, -31.0, 1e-10), Err(Error::Cancellation(_))));
        // E_{1/2}(-30) needs terms around e^{900}
        assert!(matches!(ml_series_oracle(0.5, 1.0, -30.0, 1e-10), Err(Error::Cancellation(_))));
    }

    #[test]
    fn series_oracle_mid_range_reference() {
        // E_{0.6,0.6}(-5), 40-digit reference
        let v = ml_series_oracle(0.6, 0.6, -5.0, 2e-7).unwrap();
        assert!((v.value - 0.011732767406084412348).abs() <= v.error, "{}", v.value);
        assert!(v.error <= 2e-7);
        assert!(ml_series_oracle(0.6, 0.6, -5.0, 1e-9).is_err());
    }

    #[test]
    fn talbot_elementary_pair() {
        let f = |s: Complex64| 1.0 / (1.0 + s);
        let v = invert_laplace(&f, 1.0, 32).unwrap();
        assert!((v.value - (-1f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn talbot_fractional_relaxation() {
        // s^{β-1}/(a+s^β) -> E_β(-a t^β)
        let beta = 0.7;
        let f = move |s: Complex64| s.powf(beta - 1.0) / (1.0 + s.powf(beta));
        let v = invert_laplace(&f, 2.0, 48).unwrap();
        let want = ml(0.7, 1.0, -(2f64.powf(0.7))).unwrap();
        assert!((v.value - want).abs() < 1e-10, "{} vs {want}", v.value);
        // s^{β-2}/(a+s^β) -> t E_{β,2}(-a t^β)
        let beta = 1.5;
        let f = move |s: Complex64| s.powf(beta - 2.0) / (1.0 + s.powf(beta));
        let t = 1.3;
        let v = invert_laplace(&f, t, 48).unwrap();
        let want = t * ml(1.5, 2.0, -t.powf(1.5)).unwrap();
        assert!((v.value - want).abs() < 1e-10, "{} vs {want}", v.value);
    }

    #[test]
    fn fourier_oracle_elementary_pairs() {
        let g = fourier_invert_oracle(&|k: f64| (-k * k).exp(), 0.0, 1e-12).unwrap();
        assert!((g.value - 0.5 / PI.sqrt()).abs() < 1e-12);
        let l = fourier_invert_oracle(&|k: f64| (-k).exp(), 1.0, 1e-12).unwrap();
        assert!((l.value - 0.5 / PI).abs() < 1e-12, "{}", l.value);
        // algebraic decay needs the epsilon extrapolation: ∫cos(kx)/(1+k²) = π e^{-x}/2
        let a = fourier_invert_oracle(&|k: f64| 1.0 / (1.0 + k * k), 2.0, 1e-10).unwrap();
        assert!((a.value - 0.5 * (-2f64).exp()).abs() < 1e-10, "{}", a.value);
    }

    #[test]
    fn fourier_oracle_rejects_non_integrable_origin_value() {
        let r = fourier_invert_oracle(&|k: f64| 1.0 / (1.0 + k).sqrt(), 0.0, 1e-8);
        assert!(r.is_err());
    }
}
