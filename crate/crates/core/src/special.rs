//! Gamma, reciprocal gamma and the two-parameter Mittag-Leffler function
//! on the non-positive real axis.
//!
//! `E_{α,β}(z) = Σ_{n≥0} z^n / Γ(nα + β)`
//!
//! Three regimes are used for `z ≤ 0`:
//! - `|z| ≤ 1`: the defining power series,
//! - large `|z|`: the algebraic asymptotic series plus, for `α > 1`, the
//!   exponentially decaying (oscillatory) pole contributions, used only
//!   when its optimally truncated remainder is below `1e-14`,
//! - otherwise: quadrature of the Hankel-type representation
//!   `E_{α,β}(z) = (1/2πi) ∫_C e^u u^{α-β} / (u^α - z) du`
//!   along a parabolic contour, with residues of the poles `u^α = z` that
//!   lie to the right of the contour added explicitly.

use crate::error::{Error, Result};
use crate::quad::gauss_kronrod;
use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Largest argument for which `Γ(x)` is finite in double precision.
pub const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

/// `sin(πx)`, exactly zero at integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

fn lanczos_series(z: f64) -> f64 {
    // z = x - 1
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    a
}

/// Γ(x) for real `x`.
///
/// Fails at the poles (non-positive integers) and for `x` beyond the
/// double-precision overflow threshold.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("gamma of NaN"));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    if x > GAMMA_MAX_ARG {
        return Err(Error::Overflow(x));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / (sin_pi(x) * gamma_unchecked(1.0 - x));
    }
    if x == x.round() && x <= 23.0 {
        // exact factorials
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return f;
    }
    if x > 20.0 {
        // upward recurrence from [10, 11) keeps the Lanczos power small
        let n = (x - 10.0).floor();
        let mut y = x - n;
        let mut g = gamma_unchecked(y);
        while y < x - 0.5 {
            g *= y;
            y += 1.0;
        }
        return g;
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let a = lanczos_series(z);
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
}

/// `ln |Γ(x)|` for real `x` that is not a pole.
pub fn ln_gamma_abs(x: f64) -> f64 {
    if x < 0.5 {
        return PI.ln() - sin_pi(x).abs().ln() - ln_gamma_abs(1.0 - x);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_series(z).ln()
}

/// 1/Γ(x), an entire function: exactly zero at the non-positive integers.
pub fn reciprocal_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > 0.5 {
        if x < GAMMA_MAX_ARG {
            return 1.0 / gamma_unchecked(x);
        }
        return (-ln_gamma_abs(x)).exp();
    }
    // 1/Γ(x) = sin(πx) Γ(1-x) / π
    let s = sin_pi(x);
    if 1.0 - x < GAMMA_MAX_ARG {
        s * gamma_unchecked(1.0 - x) / PI
    } else {
        s.signum() * (s.abs().ln() + ln_gamma_abs(1.0 - x) - PI.ln()).exp()
    }
}

fn complex_ln_sin_pi(z: Complex64) -> Complex64 {
    // sin(π z) is 2-periodic in z; reduce the real part first
    let re = z.re - 2.0 * (0.5 * z.re).round();
    let w = Complex64::new(PI * re, PI * z.im);
    if w.im.abs() < 15.0 {
        return w.sin().ln();
    }
    if w.im < 0.0 {
        return complex_ln_sin_pi(z.conj()).conj();
    }
    // sin w = -e^{-iw}(1 - e^{2iw}) / (2i), imaginary part mod 2π
    let i = Complex64::new(0.0, 1.0);
    -i * w + (Complex64::new(1.0, 0.0) - (2.0 * i * w).exp()).ln()
        + Complex64::new(-std::f64::consts::LN_2, 0.5 * PI)
}

/// `ln Γ(z)` for complex `z`. The imaginary part is only determined
/// modulo 2π; callers exponentiate sums of these values.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return Complex64::new(PI.ln(), 0.0)
            - complex_ln_sin_pi(z)
            - ln_gamma_complex(Complex64::new(1.0, 0.0) - z);
    }
    let zm = z - 1.0;
    let t = zm + (LANCZOS_G + 0.5);
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        a += *c / (zm + k as f64);
    }
    LN_SQRT_2PI + (zm + 0.5) * t.ln() - t + a.ln()
}

/// Γ(z) for complex `z`.
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && is_nonpositive_integer(z.re) {
        return Err(Error::Pole(z.re));
    }
    Ok(ln_gamma_complex(z).exp())
}

/// Parameters of one Mittag-Leffler evaluation `E_{α,β}(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLQuery {
    pub alpha: f64,
    pub beta: f64,
    pub z: f64,
}

impl MLQuery {
    pub fn new(alpha: f64, beta: f64, z: f64) -> Result<Self> {
        let q = MLQuery { alpha, beta, z };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::domain(format!("alpha = {} not in (0, 2]", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta <= 3.0) {
            return Err(Error::domain(format!("beta = {} not in (0, 3]", self.beta)));
        }
        if !(self.z <= 0.0) {
            return Err(Error::domain(format!("z = {} must be <= 0", self.z)));
        }
        Ok(())
    }
}

/// Evaluation strategy chosen for a Mittag-Leffler query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlRegime {
    Series,
    Contour,
    Asymptotic,
}

/// `E_{α,β}(z)` for `z ≤ 0`, absolute error below `1e-10`.
pub fn mittag_leffler(q: &MLQuery) -> Result<f64> {
    q.validate()?;
    Ok(ml_eval(q.alpha, q.beta, q.z).0)
}

/// Convenience wrapper around [`mittag_leffler`].
pub fn ml(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    mittag_leffler(&MLQuery { alpha, beta, z })
}

/// Like [`mittag_leffler`] but also reports the regime used.
pub fn mittag_leffler_with_regime(q: &MLQuery) -> Result<(f64, MlRegime)> {
    q.validate()?;
    Ok(ml_eval(q.alpha, q.beta, q.z))
}

/// Unchecked evaluation; parameters must satisfy the [`MLQuery`] invariants.
pub(crate) fn ml_eval(alpha: f64, beta: f64, z: f64) -> (f64, MlRegime) {
    let x = -z;
    if x <= 1.0 {
        return (ml_series(alpha, beta, z), MlRegime::Series);
    }
    if x >= 50.0 {
        if let Some(v) = ml_asymptotic(alpha, beta, x) {
            return (v, MlRegime::Asymptotic);
        }
    }
    (ml_contour(alpha, beta, x), MlRegime::Contour)
}

fn ml_series(alpha: f64, beta: f64, z: f64) -> f64 {
    let mut sum = 0.0;
    let mut zn = 1.0;
    for n in 0..2000 {
        let arg = n as f64 * alpha + beta;
        let term = zn * reciprocal_gamma(arg);
        sum += term;
        if arg > 3.0 && term.abs() < 1e-17 {
            break;
        }
        zn *= z;
        if zn == 0.0 {
            break;
        }
    }
    sum
}

/// Poles `u` with `u^α = -x` on the principal sheet, upper half plane.
fn ml_pole(alpha: f64, x: f64) -> Option<Complex64> {
    if alpha <= 1.0 {
        return None;
    }
    Some(Complex64::from_polar(x.powf(1.0 / alpha), PI / alpha))
}

fn ml_pole_contribution(alpha: f64, beta: f64, p: Complex64) -> f64 {
    // residue of e^u u^{α-β}/(u^α - z) at p, plus its conjugate
    let r = p.powf(1.0 - beta) * p.exp() / alpha;
    2.0 * r.re
}

fn ml_asymptotic(alpha: f64, beta: f64, x: f64) -> Option<f64> {
    const TARGET: f64 = 1e-14;
    let lnx = x.ln();
    let mut sum = 0.0;
    let mut prev_bound = f64::INFINITY;
    let mut converged = false;
    for k in 1..400 {
        let kf = k as f64;
        let s = beta - alpha * kf;
        let bound = if s > 0.5 {
            (reciprocal_gamma(s) * (-kf * lnx).exp()).abs()
        } else {
            (ln_gamma_abs(1.0 - s) - kf * lnx - PI.ln()).exp()
        };
        // E ~ -Σ z^{-k}/Γ(β-αk) with z = -x
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        sum += sign * (-kf * lnx).exp() * reciprocal_gamma(s);
        if bound < TARGET * 1e-2 {
            converged = true;
            break;
        }
        if bound > prev_bound && k > 3 {
            break;
        }
        prev_bound = bound;
    }
    if !converged {
        return None;
    }
    if let Some(p) = ml_pole(alpha, x) {
        sum += ml_pole_contribution(alpha, beta, p);
    }
    Some(sum)
}

fn ml_contour(alpha: f64, beta: f64, x: f64) -> f64 {
    // parabola u(v) = μ (1 + iv)^2 encloses the branch cut on (-∞, 0]
    let pole = ml_pole(alpha, x);
    let mu = match pole {
        Some(p) => {
            // parabola parameter that passes through p
            let mu_p = 0.5 * (p.re + p.norm());
            if mu_p > 3.0 {
                1.0
            } else {
                mu_p + 2.0
            }
        }
        None => 1.0,
    };
    let z = Complex64::new(-x, 0.0);
    let integrand = |v: f64| -> Complex64 {
        let w = Complex64::new(1.0, v);
        let u = mu * w * w;
        let ua = u.powf(alpha);
        u.exp() * u.powf(alpha - beta) / (ua - z) * w
    };
    let v_max = (1.0 + 45.0 / mu).sqrt();
    let scale = mu.exp() * mu.powf(alpha - beta).max(1.0) / (mu.powf(alpha) + x).min(1.0);
    let r = gauss_kronrod(integrand, 0.0, v_max, 1e-16 * scale.max(1.0), 1e-15, 400);
    let mut value = 2.0 * mu / PI * r.value.re;
    if let Some(p) = pole {
        // poles outside the parabola region are picked up as residues
        let contour_re = mu * (1.0 - (p.im / (2.0 * mu)).powi(2));
        if p.re > contour_re {
            value += ml_pole_contribution(alpha, beta, p);
        }
    }
    value
}
