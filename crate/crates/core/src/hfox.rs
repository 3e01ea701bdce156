//! Fox H-functions of real positive argument.
//!
//! An instance is described by [`HFunctionSpec`]; it is evaluated either by
//! quadrature of the Mellin-Barnes integral along a vertical line or by
//! summing residues to the left or right of that line.

use crate::error::{Error, Result};
use crate::quad::tanh_sinh;
use crate::special::{ln_gamma_abs, ln_gamma_complex, reciprocal_gamma, sin_pi};
use num_complex::Complex64;
use std::f64::consts::PI;

/// A value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Orders and parameters of `H^{m,n}_{p,q}[z | (a_j, A_j); (b_j, B_j)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HFunctionSpec {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub upper: Vec<(f64, f64)>,
    pub lower: Vec<(f64, f64)>,
}

impl HFunctionSpec {
    pub fn new(m: usize, n: usize, upper: Vec<(f64, f64)>, lower: Vec<(f64, f64)>) -> Result<Self> {
        let spec = HFunctionSpec {
            m,
            n,
            p: upper.len(),
            q: lower.len(),
            upper,
            lower,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p != self.upper.len() || self.q != self.lower.len() {
            return Err(Error::domain("orders p, q must match the parameter list lengths"));
        }
        if self.n > self.p || self.m < 1 || self.m > self.q {
            return Err(Error::domain(format!(
                "orders must satisfy 0 <= n <= p and 1 <= m <= q (m={}, n={}, p={}, q={})",
                self.m, self.n, self.p, self.q
            )));
        }
        for &(a, big_a) in &self.upper {
            if !(a.is_finite() && big_a.is_finite() && big_a > 0.0) {
                return Err(Error::domain(format!("bad upper parameter ({a}, {big_a})")));
            }
        }
        for &(b, big_b) in &self.lower {
            if !(b.is_finite() && big_b.is_finite() && big_b > 0.0) {
                return Err(Error::domain(format!("bad lower parameter ({b}, {big_b})")));
            }
        }
        // left and right pole families must not share a point
        for &(a, big_a) in &self.upper[..self.n] {
            for &(b, big_b) in &self.lower[..self.m] {
                for k in 0..=40 {
                    for l in 0..=40 {
                        let lhs = big_a * (b + k as f64);
                        let rhs = big_b * (a - l as f64 - 1.0);
                        if (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0) {
                            return Err(Error::InvalidContour(format!(
                                "left pole of Gamma({b} + {big_b} xi) coincides with right pole of Gamma(1 - {a} - {big_a} xi)"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `a* = Σ_{j≤n} A_j − Σ_{j>n} A_j + Σ_{j≤m} B_j − Σ_{j>m} B_j`; the
    /// Mellin-Barnes integrand decays like `exp(−π a* |Im ξ| / 2)`.
    pub fn a_star(&self) -> f64 {
        let up: f64 = self
            .upper
            .iter()
            .enumerate()
            .map(|(j, &(_, a))| if j < self.n { a } else { -a })
            .sum();
        let low: f64 = self
            .lower
            .iter()
            .enumerate()
            .map(|(j, &(_, b))| if j < self.m { b } else { -b })
            .sum();
        up + low
    }

    /// `Δ = Σ B_j − Σ A_j`. The left residue series converges for every
    /// argument when Δ > 0, the right one when Δ < 0.
    pub fn delta(&self) -> f64 {
        self.lower.iter().map(|l| l.1).sum::<f64>() - self.upper.iter().map(|u| u.1).sum::<f64>()
    }

    /// Rightmost pole of the `Γ(b_j + B_j ξ)`, `j ≤ m`.
    pub fn max_left_pole(&self) -> f64 {
        self.lower[..self.m]
            .iter()
            .map(|&(b, big_b)| -b / big_b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Leftmost pole of the `Γ(1 − a_j − A_j ξ)`, `j ≤ n` (infinite if n = 0).
    pub fn min_right_pole(&self) -> f64 {
        self.upper[..self.n]
            .iter()
            .map(|&(a, big_a)| (1.0 - a) / big_a)
            .fold(f64::INFINITY, f64::min)
    }

    /// Midpoint of the pole-free strip, or one half to the right of the
    /// last left pole when there are no right poles.
    pub fn default_abscissa(&self) -> Result<f64> {
        let (l, r) = (self.max_left_pole(), self.min_right_pole());
        if !(l < r) {
            return Err(Error::InvalidContour(format!(
                "no vertical line separates the pole families (left {l}, right {r})"
            )));
        }
        Ok(if r.is_finite() { 0.5 * (l + r) } else { l + 0.5 })
    }

    /// Divide every `A_j`, `B_j` by `delta`, so that
    /// `H(x^δ) = (1/δ) H_scaled(x)`.
    pub fn scale_argument(&self, delta: f64) -> Result<HFunctionSpec> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::domain(format!("scale factor {delta} must be positive")));
        }
        let mut out = self.clone();
        for u in &mut out.upper {
            u.1 /= delta;
        }
        for l in &mut out.lower {
            l.1 /= delta;
        }
        Ok(out)
    }
}

/// How the Mellin-Barnes integral is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourKind {
    /// Loop around all left poles; summed as a residue series.
    LeftLoop,
    /// Loop around all right poles; summed as a residue series.
    RightLoop,
    /// Straight line `Re ξ = γ`, integrated numerically.
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourChoice {
    pub kind: ContourKind,
    /// Abscissa of the vertical line; `None` picks the middle of the gap.
    pub gamma: Option<f64>,
    /// Truncation height of the vertical line; `None` picks it from the
    /// observed decay of the integrand.
    pub half_width: Option<f64>,
    /// Maximum tanh-sinh refinement level per panel.
    pub max_level: usize,
    /// Absolute accuracy target.
    pub tol: f64,
}

impl ContourChoice {
    pub fn vertical() -> Self {
        ContourChoice {
            kind: ContourKind::Vertical,
            gamma: None,
            half_width: None,
            max_level: 8,
            tol: 1e-12,
        }
    }

    pub fn vertical_at(gamma: f64) -> Self {
        ContourChoice {
            gamma: Some(gamma),
            ..Self::vertical()
        }
    }

    pub fn left_loop() -> Self {
        ContourChoice {
            kind: ContourKind::LeftLoop,
            ..Self::vertical()
        }
    }

    pub fn right_loop() -> Self {
        ContourChoice {
            kind: ContourKind::RightLoop,
            ..Self::vertical()
        }
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// `ln Θ(ξ)`; the imaginary part is only meaningful modulo 2π. Returns
/// `None` when a denominator gamma sits on a pole (Θ = 0).
fn ln_theta(spec: &HFunctionSpec, xi: Complex64) -> Result<Option<Complex64>> {
    let one = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut num = |arg: Complex64| -> Result<()> {
        if arg.im == 0.0 && is_nonpositive_integer(arg.re) {
            return Err(Error::Pole(arg.re));
        }
        acc += ln_gamma_complex(arg);
        Ok(())
    };
    for &(b, big_b) in &spec.lower[..spec.m] {
        num(b + big_b * xi)?;
    }
    for &(a, big_a) in &spec.upper[..spec.n] {
        num(one - a - big_a * xi)?;
    }
    let mut den = Vec::with_capacity(spec.p + spec.q);
    for &(b, big_b) in &spec.lower[spec.m..] {
        den.push(one - b - big_b * xi);
    }
    for &(a, big_a) in &spec.upper[spec.n..] {
        den.push(a + big_a * xi);
    }
    for arg in den {
        if arg.im == 0.0 && is_nonpositive_integer(arg.re) {
            return Ok(None);
        }
        acc -= ln_gamma_complex(arg);
    }
    Ok(Some(acc))
}

/// The gamma-product ratio `Θ(ξ)` of the Mellin-Barnes integrand; empty
/// products are 1.
pub fn theta(spec: &HFunctionSpec, xi: Complex64) -> Result<Complex64> {
    Ok(match ln_theta(spec, xi)? {
        Some(l) => l.exp(),
        None => Complex64::new(0.0, 0.0),
    })
}

/// `(1/2πi) ∫ Θ(ξ) z^{−ξ} dξ` for `z > 0` along the chosen contour.
pub fn evaluate(spec: &HFunctionSpec, z: f64, contour: &ContourChoice) -> Result<Estimate> {
    spec.validate()?;
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::domain(format!("H-function argument {z} must be positive")));
    }
    match contour.kind {
        ContourKind::Vertical => evaluate_vertical(spec, z, contour),
        ContourKind::LeftLoop => residue_series(spec, z, Side::Left, usize::MAX),
        ContourKind::RightLoop => residue_series(spec, z, Side::Right, usize::MAX),
    }
}

fn evaluate_vertical(spec: &HFunctionSpec, z: f64, contour: &ContourChoice) -> Result<Estimate> {
    let a_star = spec.a_star();
    if !(a_star > 0.0) {
        return Err(Error::NonDecaying(format!("a* = {a_star} is not positive")));
    }
    let gamma = match contour.gamma {
        Some(g) => {
            let (l, r) = (spec.max_left_pole(), spec.min_right_pole());
            if !(g > l && g < r) {
                return Err(Error::InvalidContour(format!(
                    "abscissa {g} does not separate left poles (<= {l}) from right poles (>= {r})"
                )));
            }
            g
        }
        None => spec.default_abscissa()?,
    };
    let ln_z = z.ln();
    let log_modulus = |y: f64| -> Result<f64> {
        Ok(match ln_theta(spec, Complex64::new(gamma, y))? {
            Some(l) => l.re - gamma * ln_z,
            None => f64::NEG_INFINITY,
        })
    };

    // scan for the peak and the height where the integrand has died out
    const STEP: f64 = 0.25;
    const Y_CAP: f64 = 2e4;
    let mut peak = f64::NEG_INFINITY;
    let mut abs_integral = 0.0;
    let mut y = 0.0;
    let height = loop {
        let lm = log_modulus(y)?;
        peak = peak.max(lm);
        if lm.is_finite() {
            abs_integral += STEP * lm.exp();
        }
        if let Some(h) = contour.half_width {
            if y >= h {
                break h;
            }
        } else if y >= 1.0 && lm < peak - 39.2 {
            break y;
        }
        y += STEP;
        if y > Y_CAP {
            return Err(Error::NonDecaying(format!(
                "integrand still above 1e-17 of its peak at Im xi = {Y_CAP}"
            )));
        }
    };
    if !peak.is_finite() {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }

    let width = if ln_z.abs() > 0.0 { (PI / ln_z.abs()).min(1.0) } else { 1.0 };
    let panels = (height / width).ceil().max(1.0) as usize;
    let width = height / panels as f64;
    let panel_tol = (contour.tol * PI / panels as f64).max(1e-16 * peak.exp() * width);
    let mut failure: Option<Error> = None;
    let integrand = |y: f64| -> f64 {
        let xi = Complex64::new(gamma, y);
        match ln_theta(spec, xi) {
            Ok(Some(l)) => (l - xi * ln_z).exp().re,
            Ok(None) => 0.0,
            Err(_) => f64::NAN,
        }
    };
    let mut total = 0.0;
    let mut comp = 0.0;
    let mut error = 0.0;
    for i in 0..panels {
        let lo = i as f64 * width;
        let r = tanh_sinh(integrand, lo, lo + width, panel_tol, contour.max_level);
        if !r.value.is_finite() {
            failure = Some(Error::NonConvergence {
                what: "Mellin-Barnes quadrature".into(),
                estimate: f64::INFINITY,
            });
            break;
        }
        let t = total + r.value;
        comp += if total.abs() >= r.value.abs() {
            (total - t) + r.value
        } else {
            (r.value - t) + total
        };
        total = t;
        error += r.error;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    // truncation beyond the cut and rounding in the gamma products
    let truncation = 1e-17 * peak.exp() * 4.0 / (PI * a_star);
    let rounding = 64.0 * f64::EPSILON * abs_integral;
    Ok(Estimate {
        value: (total + comp) / PI,
        error: (error + truncation + rounding) / PI,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy)]
struct Pole {
    pos: f64,
    // factor index into `lower` (left) or `upper` (right)
    family: usize,
    // pole order within its family
    index: usize,
}

/// Poles of the numerator gammas on one side, at most `reach` away from
/// the contour abscissa `gamma0`, sorted by distance from it.
fn poles_on_side(spec: &HFunctionSpec, side: Side, gamma0: f64, reach: f64) -> Vec<Pole> {
    let mut out = Vec::new();
    match side {
        Side::Left => {
            for (j, &(b, big_b)) in spec.lower[..spec.m].iter().enumerate() {
                for k in 0.. {
                    let pos = -(b + k as f64) / big_b;
                    if gamma0 - pos > reach {
                        break;
                    }
                    out.push(Pole { pos, family: j, index: k });
                }
            }
        }
        Side::Right => {
            for (j, &(a, big_a)) in spec.upper[..spec.n].iter().enumerate() {
                for l in 0.. {
                    let pos = (1.0 - a + l as f64) / big_a;
                    if pos - gamma0 > reach {
                        break;
                    }
                    out.push(Pole { pos, family: j, index: l });
                }
            }
        }
    }
    out.sort_by(|p, q| (p.pos - gamma0).abs().total_cmp(&(q.pos - gamma0).abs()));
    out
}

/// `ln|Γ(x)|` and the sign of `Γ(x)` for real non-pole `x`.
fn signed_ln_gamma(x: f64) -> (f64, f64) {
    let sign = if x > 0.0 || sin_pi(x) > 0.0 { 1.0 } else { -1.0 };
    (ln_gamma_abs(x), sign)
}

/// Residue contribution of an isolated simple pole, as `(ln|term|, sign)`;
/// `None` when the term vanishes because a denominator gamma has a pole.
fn simple_pole_term(spec: &HFunctionSpec, side: Side, pole: Pole, ln_z: f64) -> Option<(f64, f64, f64)> {
    let xi = pole.pos;
    let k = pole.index as f64;
    let (scale, skip_lower, skip_upper) = match side {
        Side::Left => (spec.lower[pole.family].1, Some(pole.family), None),
        Side::Right => (spec.upper[pole.family].1, None, Some(pole.family)),
    };
    let mut ln_mag = -ln_gamma_abs(k + 1.0) - scale.ln() - xi * ln_z;
    let mut sign = if pole.index % 2 == 0 { 1.0 } else { -1.0 };
    // magnitude of the summed logarithms, for the rounding estimate
    let mut scale_sum = ln_mag.abs() + (xi * ln_z).abs();
    for (j, &(b, big_b)) in spec.lower.iter().enumerate() {
        if Some(j) == skip_lower {
            continue;
        }
        let (arg, numerator) = if j < spec.m {
            (b + big_b * xi, true)
        } else {
            (1.0 - b - big_b * xi, false)
        };
        if !numerator && is_nonpositive_integer(arg) {
            return None;
        }
        let (l, s) = signed_ln_gamma(arg);
        ln_mag += if numerator { l } else { -l };
        scale_sum += l.abs();
        sign *= s;
    }
    for (j, &(a, big_a)) in spec.upper.iter().enumerate() {
        if Some(j) == skip_upper {
            continue;
        }
        let (arg, numerator) = if j < spec.n {
            (1.0 - a - big_a * xi, true)
        } else {
            (a + big_a * xi, false)
        };
        if !numerator && is_nonpositive_integer(arg) {
            return None;
        }
        let (l, s) = signed_ln_gamma(arg);
        ln_mag += if numerator { l } else { -l };
        scale_sum += l.abs();
        sign *= s;
    }
    // each gamma factor carries ~1e-14 relative error
    let rel = 1e-14 * (spec.p + spec.q) as f64 + 2.0 * f64::EPSILON * scale_sum;
    Some((ln_mag, sign, rel))
}

/// Residue of `Θ(ξ) z^{−ξ}` summed over all poles inside a circle, by the
/// trapezoidal rule; the error estimate compares two node counts.
fn circle_residue(spec: &HFunctionSpec, center: f64, radius: f64, ln_z: f64) -> Result<Estimate> {
    let rule = |nodes: usize| -> Result<f64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..nodes {
            let phase = Complex64::from_polar(1.0, 2.0 * PI * (i as f64 + 0.5) / nodes as f64);
            let xi = center + radius * phase;
            if let Some(l) = ln_theta(spec, xi)? {
                acc += (l - xi * ln_z).exp() * phase;
            }
        }
        Ok(acc.re * radius / nodes as f64)
    };
    let coarse = rule(64)?;
    let fine = rule(96)?;
    Ok(Estimate {
        value: fine,
        error: (fine - coarse).abs(),
    })
}

/// Numerator poles closer than this are summed together on a circle.
const CLUSTER_GAP: f64 = 0.05;

/// Sum of residues on one side of the contour. Coincident or nearly
/// coincident poles are grouped and their joint residue is taken on a
/// circle, so rational parameter ratios (higher-order poles) need no
/// special treatment. At most `max_clusters` pole groups are used.
fn residue_series(spec: &HFunctionSpec, z: f64, side: Side, max_clusters: usize) -> Result<Estimate> {
    let gamma0 = spec.default_abscissa()?;
    let ln_z = z.ln();
    let asymptotic = match side {
        Side::Left => spec.delta() < 0.0,
        Side::Right => spec.delta() > 0.0,
    };
    if side == Side::Right && spec.n == 0 {
        return Err(Error::InvalidContour("no right poles to sum".into()));
    }
    let mut reach = 32.0;
    loop {
        let poles = poles_on_side(spec, side, gamma0, reach + 1.0);
        let other = poles_on_side(
            spec,
            if side == Side::Left { Side::Right } else { Side::Left },
            gamma0,
            4.0,
        );
        let mut sorted = poles.clone();
        sorted.sort_by(|p, q| p.pos.total_cmp(&q.pos));
        // group neighbours on the real line
        let mut clusters: Vec<Vec<Pole>> = Vec::new();
        for p in sorted {
            match clusters.last_mut() {
                Some(c) if (p.pos - c.last().expect("non-empty").pos).abs() < CLUSTER_GAP => c.push(p),
                _ => clusters.push(vec![p]),
            }
        }
        clusters.sort_by(|c, d| {
            (c[0].pos - gamma0).abs().total_cmp(&(d[0].pos - gamma0).abs())
        });
        let all_pos: Vec<f64> = poles.iter().chain(other.iter()).map(|p| p.pos).collect();

        let mut terms: Vec<(f64, f64, f64)> = Vec::new(); // (distance, value, error)
        let mut overflow = false;
        for c in clusters.iter().take(max_clusters) {
            let dist = (c[0].pos - gamma0).abs();
            if dist > reach {
                continue;
            }
            let (value, err) = if c.len() == 1 {
                match simple_pole_term(spec, side, c[0], ln_z) {
                    None => (0.0, 0.0),
                    Some((lm, s, rel)) => {
                        if lm > 700.0 {
                            overflow = true;
                            break;
                        }
                        let v = s * lm.exp();
                        (v, rel * v.abs())
                    }
                }
            } else {
                let lo = c.first().expect("non-empty").pos;
                let hi = c.last().expect("non-empty").pos;
                let center = 0.5 * (lo + hi);
                let half = 0.5 * (hi - lo);
                let outside = all_pos
                    .iter()
                    .filter(|&&x| x < lo - 1e-12 || x > hi + 1e-12)
                    .map(|&x| (x - center).abs())
                    .fold(f64::INFINITY, f64::min);
                let radius = 0.5 * (half + outside.min(half + 1.0));
                let r = circle_residue(spec, center, radius, ln_z)?;
                if !(r.value.is_finite() && r.error.is_finite()) || r.value.abs() > 1e300 {
                    overflow = true;
                    break;
                }
                let v = if side == Side::Right { -r.value } else { r.value };
                (v, r.error)
            };
            terms.push((dist, value, err));
        }
        let exhausted = terms.len() >= max_clusters;
        let peak = terms.iter().map(|t| t.1.abs()).fold(0.0, f64::max);
        let tail_terms: Vec<f64> = terms
            .iter()
            .filter(|t| t.0 > 0.75 * reach)
            .map(|t| t.1.abs())
            .collect();
        let tail = tail_terms.iter().copied().fold(0.0, f64::max);
        let settled = !overflow && !tail_terms.is_empty() && (tail <= 1e-17 * peak || peak == 0.0);
        if settled || (max_clusters != usize::MAX && exhausted && !overflow) {
            let last = if settled {
                tail
            } else {
                // the last three non-vanishing terms bound the truncation
                terms
                    .iter()
                    .rev()
                    .map(|t| t.1.abs())
                    .filter(|&a| a > 0.0)
                    .take(3)
                    .fold(0.0, f64::max)
            };
            return Ok(sum_terms(&terms, terms.len(), last));
        }
        if asymptotic || overflow || reach > 4096.0 {
            if !asymptotic {
                return Err(Error::Divergence(format!(
                    "residue series did not settle (side {side:?}, z = {z})"
                )));
            }
            // optimal truncation where the term envelope is smallest
            let (imin, tmin) = (0..terms.len())
                .map(|i| (i, 2.0 * envelope(&terms, i)))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap_or((0, 0.0));
            if overflow || imin + 1 < terms.len() || reach > 4096.0 {
                return Ok(sum_terms(&terms, imin, tmin));
            }
        }
        reach *= 2.0;
    }
}

/// Largest magnitude among the three non-vanishing terms from `start` on;
/// isolated small terms do not make a sum look converged.
fn envelope(terms: &[(f64, f64, f64)], start: usize) -> f64 {
    let tail: Vec<f64> = terms[start.min(terms.len())..]
        .iter()
        .map(|t| t.1.abs())
        .filter(|&a| a > 0.0)
        .take(3)
        .collect();
    if tail.len() < 3 {
        return tail.iter().copied().fold(0.0, f64::max).max(if tail.is_empty() { f64::INFINITY } else { 0.0 });
    }
    tail.iter().copied().fold(0.0, f64::max)
}

fn sum_terms(terms: &[(f64, f64, f64)], count: usize, truncation: f64) -> Estimate {
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut abs_sum = 0.0;
    let mut term_error = 0.0;
    for &(_, v, e) in &terms[..count] {
        term_error += e;
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
        abs_sum += v.abs();
    }
    Estimate {
        value: sum + comp,
        error: truncation + term_error + 4.0 * f64::EPSILON * abs_sum,
    }
}

impl HFunctionSpec {
    /// `E_{α,β}(−x) = H^{1,1}_{1,2}[x | (0,1); (0,1), (1−β,α)]`.
    pub fn mittag_leffler(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(1, 1, vec![(0.0, 1.0)], vec![(0.0, 1.0), (1.0 - beta, alpha)])
    }

    /// Kernel of the delta-initial-data solution,
    /// `N(x,t) = t^{β−1}/(α|x|) · H^{2,1}_{3,3}[u]` with
    /// `u = |x| / (η t^β)^{1/α}`.
    pub fn green_kernel(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0 && beta > 0.0 && beta <= 2.0) {
            return Err(Error::domain(format!(
                "green kernel needs 0 < alpha <= 2 and 0 < beta <= 2 (alpha={alpha}, beta={beta})"
            )));
        }
        Self::new(
            2,
            1,
            vec![(1.0, 1.0 / alpha), (beta, beta / alpha), (1.0, 0.5)],
            vec![(1.0, 1.0), (1.0, 1.0 / alpha), (1.0, 0.5)],
        )
    }

    /// The β = 1 kernel after cancelling `Γ(1+ξ/α)`: the symmetric stable
    /// law, `H^{1,1}_{2,2}[u | (1,1/α),(1,1/2); (1,1),(1,1/2)]`.
    pub fn levy_stable(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::domain(format!("stable index {alpha} outside (0, 2]")));
        }
        Self::new(
            1,
            1,
            vec![(1.0, 1.0 / alpha), (1.0, 0.5)],
            vec![(1.0, 1.0), (1.0, 0.5)],
        )
    }

    /// The α = 2 stable law after one more cancellation:
    /// `H^{1,0}_{1,1}[u | (1,1/2); (1,1)] = u e^{−u²/4} / √π`.
    pub fn gaussian() -> Self {
        HFunctionSpec {
            m: 1,
            n: 0,
            p: 1,
            q: 1,
            upper: vec![(1.0, 0.5)],
            lower: vec![(1.0, 1.0)],
        }
    }
}

/// Reduced kernel `N · (η t^β)^{1/α} / t^{β−1}` at `x = 0`.
///
/// Finite when β = 1 or α > 1/2; for β = 1 it is the stable-law value
/// `Γ(1+1/α)/π`.
pub fn green_at_origin(alpha: f64, beta: f64) -> Result<f64> {
    if beta == 1.0 {
        return Ok(crate::special::gamma(1.0 + 1.0 / alpha)? / PI);
    }
    if alpha <= 0.5 {
        return Err(Error::Divergence(format!(
            "kernel is singular at x = 0 for alpha = {alpha} <= 1/2, beta = {beta}"
        )));
    }
    // residue at ξ = −1; removable 0/0 at α = 1
    let eps = 1.0 - 1.0 / alpha;
    if eps.abs() < 1e-6 {
        const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
        return Ok(beta * (1.0 + EULER_GAMMA * beta * eps) / (alpha * PI));
    }
    Ok(reciprocal_gamma(beta - beta / alpha) / (alpha * sin_pi(1.0 / alpha)))
}

/// Small-distance expansion of the reduced kernel
/// `N · (η t^β)^{1/α} / t^{β−1} = H(u) / (α u)`, from the residues at the
/// poles of `Γ(1+ξ)` and `Γ(1+ξ/α)`, using at most `terms` pole groups.
/// Coinciding poles (rational α) are summed jointly.
pub fn green_series_small_x(alpha: f64, beta: f64, u: f64, terms: usize) -> Result<Estimate> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::domain(format!("similarity variable {u} must be positive")));
    }
    if terms == 0 {
        return Err(Error::domain("at least one term is required"));
    }
    let spec = HFunctionSpec::green_kernel(alpha, beta)?;
    let h = residue_series(&spec, u, Side::Left, terms)?;
    Ok(Estimate {
        value: h.value / (alpha * u),
        error: h.error / (alpha * u),
    })
}

/// Large-distance expansion of `|x| N / t^{β−1}` in `v = η t^β / |x|^α`,
/// from the poles of `Γ(−ξ/α)`:
/// `Σ_ν (−1)^ν Γ(1+αν) v^ν / [Γ(β+βν) Γ(1+αν/2) Γ(−αν/2)]`.
///
/// The ν = 0 coefficient vanishes, so the leading behaviour is `∝ v`.
/// For α < β the series converges; otherwise it is asymptotic and is cut
/// at its smallest term, which also serves as the error estimate.
pub fn green_series_large_x(alpha: f64, beta: f64, v: f64, terms: usize) -> Result<Estimate> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::domain(format!("expansion variable {v} must be positive")));
    }
    HFunctionSpec::green_kernel(alpha, beta)?;
    if alpha == 2.0 {
        return Err(Error::Divergence(
            "all algebraic tail terms vanish for alpha = 2; the tail is exponentially small".into(),
        ));
    }
    let ln_v = v.ln();
    let mut values = Vec::with_capacity(terms);
    let mut errors = Vec::with_capacity(terms);
    for nu in 0..terms {
        let x = alpha * nu as f64;
        let r = reciprocal_gamma(-0.5 * x);
        if r == 0.0 {
            values.push(0.0);
            errors.push(0.0);
            continue;
        }
        let (lg1, s1) = signed_ln_gamma(1.0 + x);
        let (lg2, s2) = signed_ln_gamma(beta + beta * nu as f64);
        let (lg3, s3) = signed_ln_gamma(1.0 + 0.5 * x);
        let ln_mag = lg1 - lg2 - lg3 + r.abs().ln() + nu as f64 * ln_v;
        if ln_mag > 700.0 {
            break;
        }
        let sign = if nu % 2 == 0 { 1.0 } else { -1.0 } * s1 * s2 * s3 * r.signum();
        let value = sign * ln_mag.exp();
        let scale = lg1.abs() + lg2.abs() + lg3.abs() + (nu as f64 * ln_v).abs();
        values.push(value);
        errors.push(value.abs() * (4e-14 + 2.0 * f64::EPSILON * scale));
    }
    let nonzero: Vec<usize> = (0..values.len()).filter(|&i| values[i] != 0.0).collect();
    if nonzero.len() < 4 {
        return Err(Error::Divergence(format!("too few non-vanishing terms for v = {v}")));
    }
    // envelope of three consecutive non-vanishing terms, so that a term
    // that is small only because 1/Γ(−αν/2) is near a zero is not taken
    // for the optimal cut
    let window = |k: usize| -> f64 {
        nonzero[k..(k + 3).min(nonzero.len())]
            .iter()
            .map(|&i| values[i].abs())
            .fold(0.0, f64::max)
    };
    let kmin = (0..nonzero.len() - 2)
        .min_by(|&k, &l| window(k).total_cmp(&window(l)))
        .expect("non-empty");
    if kmin == 0 {
        return Err(Error::Divergence(format!(
            "terms do not decrease for v = {v}; the expansion needs larger |x|"
        )));
    }
    let converging = kmin + 3 >= nonzero.len();
    let stop = if converging { values.len() } else { nonzero[kmin] };
    let truncation = 4.0 * window(kmin);
    let sum: f64 = values[..stop].iter().sum();
    let error = truncation + errors[..stop].iter().sum::<f64>();
    Ok(Estimate { value: sum, error })
}
