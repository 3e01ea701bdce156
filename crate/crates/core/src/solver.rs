//! Green's functions and the spectral solution of the space-time
//! fractional reaction-diffusion problem
//! `D_t^β N = η D_x^α N + φ(x, t)` on the real line.

use crate::error::{Error, Result};
use crate::hfox::{
    evaluate, green_at_origin, green_series_large_x, green_series_small_x, ContourChoice,
    Estimate, HFunctionSpec,
};
use crate::quad::{gauss_jacobi_unit, gauss_legendre, levin};
use crate::special::{ml, ml_eval, reciprocal_gamma};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

/// Parameters of one Green's function evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensQuery {
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub x: f64,
    pub t: f64,
}

impl GreensQuery {
    pub fn new(alpha: f64, beta: f64, eta: f64, x: f64, t: f64) -> Result<Self> {
        let q = GreensQuery { alpha, beta, eta, x, t };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        validate_model(self.alpha, self.beta, self.eta)?;
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::domain(format!("time t = {} must be positive", self.t)));
        }
        if !self.x.is_finite() {
            return Err(Error::domain(format!("position x = {} must be finite", self.x)));
        }
        Ok(())
    }

    /// Length scale `(η t^β)^{1/α}`.
    pub fn length_scale(&self) -> f64 {
        (self.eta * self.t.powf(self.beta)).powf(1.0 / self.alpha)
    }

    /// Similarity variable `u = |x| / (η t^β)^{1/α}`.
    pub fn similarity(&self) -> f64 {
        self.x.abs() / self.length_scale()
    }
}

pub(crate) fn validate_model(alpha: f64, beta: f64, eta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::domain(format!("space order alpha = {alpha} outside (0, 2]")));
    }
    if !(beta > 0.0 && beta <= 2.0) {
        return Err(Error::domain(format!("time order beta = {beta} outside (0, 2]")));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::domain(format!("diffusion coefficient eta = {eta} must be positive")));
    }
    Ok(())
}

/// Which route produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    CosineQuadrature,
    MellinBarnes,
    Series,
    Spectral,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::CosineQuadrature => "cosine-quadrature",
            Method::MellinBarnes => "mellin-barnes",
            Method::Series => "series",
            Method::Spectral => "spectral",
        }
    }
}

/// A Green's function value with its error estimate and route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenValue {
    pub value: f64,
    pub error: f64,
    pub method: Method,
}

/// Half-period panels summed directly before sequence acceleration starts.
const LEVIN_TERMS: usize = 18;

fn gl_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64, nodes: &[f64], weights: &[f64]) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    nodes
        .iter()
        .zip(weights)
        .map(|(&x, &w)| w * f(c + h * x))
        .sum::<f64>()
        * h
}

/// `∫_0^b f` on geometrically graded panels, for integrands that are
/// smooth in `ln κ` but not at 0.
fn graded_head(f: &dyn Fn(f64) -> f64, b: f64, nodes: &[f64], weights: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut hi = b;
    for _ in 0..60 {
        let lo = 0.5 * hi;
        sum += gl_panel(f, lo, hi, nodes, weights);
        hi = lo;
    }
    // the remaining [0, b·2^-60] is below rounding
    sum
}

/// `(1/π) ∫_0^∞ cos(κ u) K(κ) dκ` for the reduced kernel
/// `K(κ) ≈ E_{β,β}(−κ^α)`.
///
/// For `u > 0` the half line is cut at the zeros of the cosine, panels are
/// integrated by Gauss-Legendre and the alternating panel sums are
/// accelerated by a Levin t-transform. At `u = 0` the tail beyond the
/// quadrature range is integrated term by term from the large-argument
/// expansion of the Mittag-Leffler function.
fn cosine_transform(kernel: &dyn Fn(f64) -> f64, alpha: f64, beta: f64, u: f64) -> Result<Estimate> {
    let (nodes, weights) = gauss_legendre(24);
    let (nodes2, weights2) = gauss_legendre(32);
    if u == 0.0 {
        if beta != 1.0 && 2.0 * alpha <= 1.0 {
            return Err(Error::Divergence(format!(
                "Green's function is infinite at x = 0 for alpha = {alpha} <= 1/2"
            )));
        }
        // beyond κ_max (κ^α = 1000) the expansion −Σ_{j≥2} (−κ^α)^{−j}/Γ(β−βj) is used
        let kmax = 1000f64.powf(1.0 / alpha).max(4.0);
        let head = |n: &[f64], w: &[f64]| -> f64 {
            let mut s = graded_head(kernel, 1.0, n, w);
            let mut lo = 1.0;
            while lo < kmax {
                let hi = (2.0 * lo).min(kmax);
                s += gl_panel(kernel, lo, hi, n, w);
                lo = hi;
            }
            s
        };
        let a = head(&nodes, &weights);
        let b = head(&nodes2, &weights2);
        let mut tail = 0.0;
        let mut last = 0.0;
        if beta != 1.0 {
            for j in 2..30 {
                let jf = j as f64;
                let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
                let term = sign * reciprocal_gamma(beta - beta * jf) * kmax.powf(1.0 - alpha * jf)
                    / (alpha * jf - 1.0);
                if term == 0.0 {
                    // 1/Γ at a pole
                    continue;
                }
                tail += term;
                last = term.abs();
                if last < 1e-17 {
                    break;
                }
            }
        }
        return Ok(Estimate {
            value: (b + tail) / PI,
            error: ((a - b).abs() + last + 1e-15 * b.abs()) / PI,
        });
    }

    let f = |k: f64| (k * u).cos() * kernel(k);
    let half = PI / u;
    let z0 = 0.5 * half;
    let head = graded_head(&f, z0, &nodes, &weights);
    let head2 = graded_head(&f, z0, &nodes2, &weights2);
    // direct summation until the kernel is in its monotone tail
    let start = ((4.0 - z0) / half).ceil().max(0.0) as usize;
    let mut sums = Vec::new();
    let mut terms = Vec::new();
    let mut total = head2;
    let mut lo = z0;
    let max_panels = 2_000_000;
    let mut count = 0;
    loop {
        let a = gl_panel(&f, lo, lo + half, &nodes, &weights);
        total += a;
        lo += half;
        count += 1;
        if count > start {
            sums.push(total);
            terms.push(a);
        }
        // exponentially decaying kernels need no acceleration
        if count > start && a.abs() < 1e-17 * total.abs().max(1e-300) && kernel(lo).abs() < 1e-17 {
            return Ok(Estimate {
                value: total / PI,
                error: ((head - head2).abs() + 4.0 * a.abs() + 1e-15 * total.abs()) / PI,
            });
        }
        if sums.len() >= LEVIN_TERMS + 4 {
            break;
        }
        if count > max_panels {
            return Err(Error::NonConvergence {
                what: "cosine quadrature (too many half-period panels)".into(),
                estimate: a.abs(),
            });
        }
    }
    let last = terms.last().map_or(0.0, |t| t.abs());
    // tail already at rounding level (H-function symbols are noisy down there)
    if last < 1e-15 * total.abs() {
        return Ok(Estimate {
            value: total / PI,
            error: ((head - head2).abs() + 4.0 * last + 1e-15 * total.abs()) / PI,
        });
    }
    // terms must alternate for the t-transform to be meaningful
    if terms.windows(2).any(|w| w[0] * w[1] > 0.0) {
        return Err(Error::NonConvergence {
            what: "cosine quadrature (panel sums do not alternate)".into(),
            estimate: terms.last().map_or(f64::INFINITY, |t| t.abs()),
        });
    }
    let n = sums.len();
    let full = levin(&sums[n - LEVIN_TERMS..], &terms[n - LEVIN_TERMS..], 1.0);
    let shorter = levin(&sums[n - LEVIN_TERMS..n - 2], &terms[n - LEVIN_TERMS..n - 2], 1.0);
    let error = (full - shorter).abs() + (head - head2).abs() + 1e-15 * full.abs();
    Ok(Estimate {
        value: full / PI,
        error: error / PI,
    })
}

/// `G2(x,t) = (1/π) ∫_0^∞ cos(kx) E_{β,β}(−η k^α t^β) dk`, by the cosine
/// quadrature route.
pub fn greens_g2(q: &GreensQuery) -> Result<Estimate> {
    q.validate()?;
    let (alpha, beta) = (q.alpha, q.beta);
    let kernel = move |k: f64| ml_eval(beta, beta, -k.powf(alpha)).0;
    let s = q.length_scale();
    let r = cosine_transform(&kernel, alpha, beta, q.similarity())?;
    Ok(Estimate {
        value: r.value / s,
        error: r.error / s,
    })
}

/// `G1(x,t) = t^{β−1} G2(x,t)`, the response to a unit point source in
/// the order-(β−1) initial condition.
pub fn greens_g1(q: &GreensQuery) -> Result<Estimate> {
    let g2 = greens_g2(q)?;
    let p = q.t.powf(q.beta - 1.0);
    Ok(Estimate {
        value: p * g2.value,
        error: p * g2.error,
    })
}

/// `G2` again, but with the Fourier symbol evaluated as the H-function
/// `(1/α) H^{1,1}_{1,2}[κ | (0,1/α); (0,1/α), (1−β,β/α)]` instead of the
/// Mittag-Leffler routine. Slow; meant as a cross-check.
pub fn greens_via_cosine(q: &GreensQuery) -> Result<Estimate> {
    q.validate()?;
    let (alpha, beta) = (q.alpha, q.beta);
    let spec = HFunctionSpec::mittag_leffler(beta, beta)?.scale_argument(alpha)?;
    let contour = ContourChoice {
        tol: 1e-13,
        ..ContourChoice::vertical()
    };
    let kernel = |k: f64| -> f64 {
        if k == 0.0 {
            return reciprocal_gamma(beta);
        }
        evaluate(&spec, k, &contour).map_or(f64::NAN, |e| e.value / alpha)
    };
    let s = q.length_scale();
    let r = cosine_transform(&kernel, alpha, beta, q.similarity())?;
    if !r.value.is_finite() {
        return Err(Error::NonConvergence {
            what: "H-function symbol inside cosine quadrature".into(),
            estimate: f64::INFINITY,
        });
    }
    Ok(Estimate {
        value: r.value / s,
        error: r.error / s,
    })
}

/// Accuracy a series or Mellin-Barnes value must reach before it is
/// preferred over the next route (relative to the reduced kernel).
const ROUTE_TOL: f64 = 1e-10;

/// Reduced kernel `n(u) = N (η t^β)^{1/α} / t^{β−1}` with the route used.
pub fn reduced_kernel(alpha: f64, beta: f64, u: f64) -> Result<GreenValue> {
    validate_model(alpha, beta, 1.0)?;
    if beta >= 2.0 {
        return Err(Error::domain("the delta-initial-data kernel needs beta < 2"));
    }
    if !(u >= 0.0 && u.is_finite()) {
        return Err(Error::domain(format!("similarity variable {u} must be finite and >= 0")));
    }
    if u == 0.0 {
        let v = green_at_origin(alpha, beta)?;
        return Ok(GreenValue {
            value: v,
            error: 1e-14 * v.abs(),
            method: Method::Series,
        });
    }
    let accept = |e: &Estimate| e.value.is_finite() && e.error <= ROUTE_TOL * e.value.abs().max(1e-300);
    if u <= 1.0 && alpha > beta {
        if let Ok(e) = green_series_small_x(alpha, beta, u, 400) {
            if accept(&e) {
                return Ok(GreenValue {
                    value: e.value,
                    error: e.error,
                    method: Method::Series,
                });
            }
        }
    }
    if u >= 3.0 && alpha < 2.0 {
        let v = u.powf(-alpha);
        if let Ok(e) = green_series_large_x(alpha, beta, v, 400) {
            // |x| N / t^{β−1} = u n(u)
            let e = Estimate {
                value: e.value / u,
                error: e.error / u,
            };
            if accept(&e) {
                return Ok(GreenValue {
                    value: e.value,
                    error: e.error,
                    method: Method::Series,
                });
            }
        }
    }
    let spec = HFunctionSpec::green_kernel(alpha, beta)?;
    let mb = evaluate(&spec, u, &ContourChoice::vertical());
    if let Ok(h) = mb {
        let e = Estimate {
            value: h.value / (alpha * u),
            error: h.error / (alpha * u),
        };
        if e.error <= 1e-8 * e.value.abs().max(1e-300) || e.error < 1e-13 {
            return Ok(GreenValue {
                value: e.value,
                error: e.error,
                method: Method::MellinBarnes,
            });
        }
    }
    let kernel = move |k: f64| ml_eval(beta, beta, -k.powf(alpha)).0;
    let c = cosine_transform(&kernel, alpha, beta, u)?;
    Ok(GreenValue {
        value: c.value,
        error: c.error,
        method: Method::CosineQuadrature,
    })
}

/// Solution for `f = δ(x)`, `g = 0`, `φ = 0`:
/// `N(x,t) = t^{β−1}/(α|x|) H^{2,1}_{3,3}[|x|/(η t^β)^{1/α}]`, which equals
/// `greens_g1`. The route is picked per point (series near 0 and far out,
/// Mellin-Barnes in between, cosine quadrature as fallback).
pub fn green_delta(q: &GreensQuery) -> Result<GreenValue> {
    q.validate()?;
    let r = reduced_kernel(q.alpha, q.beta, q.similarity())?;
    let p = q.t.powf(q.beta - 1.0) / q.length_scale();
    Ok(GreenValue {
        value: p * r.value,
        error: p * r.error,
        method: r.method,
    })
}

/// `Ñ(k,t) = f̃ t^{β−1} E_{β,β}(−η|k|^α t^β) + g̃ t^{β−2} E_{β,β−1}(−η|k|^α t^β)`.
///
/// The second term belongs to the order-(β−2) initial condition and only
/// exists for β > 1; a non-zero `g` with β ≤ 1 is rejected.
pub fn mode_evolution(
    k: f64,
    t: f64,
    alpha: f64,
    beta: f64,
    eta: f64,
    f: Complex64,
    g: Complex64,
) -> Result<Complex64> {
    validate_model(alpha, beta, eta)?;
    if !(t > 0.0) {
        return Err(Error::domain(format!("time t = {t} must be positive")));
    }
    let z = -eta * k.abs().powf(alpha) * t.powf(beta);
    let mut out = f * (t.powf(beta - 1.0) * ml(beta, beta, z)?);
    if g != Complex64::new(0.0, 0.0) {
        if beta <= 1.0 {
            return Err(Error::domain(
                "second initial condition g is only defined for beta > 1",
            ));
        }
        out += g * (t.powf(beta - 2.0) * ml(beta, beta - 1.0, z)?);
    }
    Ok(out)
}

/// Uniform grid `x_i = x_min + i (x_max − x_min)/(count − 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, count: usize) -> Result<Self> {
        let g = Grid { x_min, x_max, count };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min < self.x_max) {
            return Err(Error::domain(format!(
                "grid bounds [{}, {}] must be finite and increasing",
                self.x_min, self.x_max
            )));
        }
        if self.count < 2 {
            return Err(Error::domain("grid needs at least two nodes"));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.count - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.count).map(|i| self.x_min + i as f64 * h).collect()
    }
}

/// Initial data on the grid.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Zero,
    /// Values at the grid nodes.
    Samples(Vec<f64>),
    /// Unit point mass at `at`, represented exactly in Fourier space.
    Delta { at: f64 },
}

/// Time dependence of a separable source `φ(x,t) = s(x) p(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeProfile {
    Constant,
    /// `p(t) = e^{−rate·t}`
    Exponential { rate: f64 },
    /// `p(t) = t^exponent`, exponent > −1
    Power { exponent: f64 },
}

impl TimeProfile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Exponential { rate } => (-rate * t).exp(),
            TimeProfile::Power { exponent } => t.powf(exponent),
        }
    }
}

/// Inhomogeneity `φ(x,t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    None,
    Separable { spatial: Vec<f64>, profile: TimeProfile },
    /// Snapshots `values[m]` at increasing `times[m]`, linear in between.
    Sampled { times: Vec<f64>, values: Vec<Vec<f64>> },
}

/// Full problem: model, grid, initial data `f` (order β−1), `g` (order
/// β−2, only for β > 1), source and target time.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub grid: Grid,
    pub f: InitialData,
    pub g: InitialData,
    pub source: Source,
    pub t_end: f64,
}

/// Values of a solution on a set of nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Route that produced the field (for pointwise fields, the one used
    /// most often).
    pub method: Method,
    /// Per-node route.
    pub methods: Vec<Method>,
    /// Per-node absolute error estimates.
    pub errors: Vec<f64>,
    /// Bound on the absolute error over the whole field.
    pub err_estimate: f64,
}

fn check_decay(name: &str, v: &[f64]) -> Result<()> {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let edge = v[0].abs().max(v[v.len() - 1].abs());
    if max > 0.0 && edge >= 1e-8 * max {
        return Err(Error::BoundaryDecay(format!(
            "{name} is {edge:e} at the grid edge (max {max:e})"
        )));
    }
    Ok(())
}

fn check_samples(name: &str, v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::domain(format!("{name} has {} samples, grid has {n}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain(format!("{name} contains non-finite samples")));
    }
    check_decay(name, v)
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        validate_model(self.alpha, self.beta, self.eta)?;
        self.grid.validate()?;
        let n = self.grid.count;
        if !n.is_power_of_two() {
            return Err(Error::domain(format!("grid count {n} is not a power of two")));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::domain(format!("t_end = {} must be positive", self.t_end)));
        }
        for (name, d) in [("f", &self.f), ("g", &self.g)] {
            if let InitialData::Samples(v) = d {
                check_samples(name, v, n)?;
            }
        }
        let g_present = match &self.g {
            InitialData::Zero => false,
            InitialData::Samples(v) => v.iter().any(|&x| x != 0.0),
            InitialData::Delta { .. } => true,
        };
        if g_present && self.beta <= 1.0 {
            return Err(Error::domain(
                "g (order beta-2 initial data) is only defined for beta > 1",
            ));
        }
        match &self.source {
            Source::None => {}
            Source::Separable { spatial, profile } => {
                check_samples("phi", spatial, n)?;
                if let TimeProfile::Power { exponent } = profile {
                    if !(*exponent > -1.0) {
                        return Err(Error::domain("source time exponent must exceed -1"));
                    }
                }
            }
            Source::Sampled { times, values } => {
                if times.len() < 2 || times.len() != values.len() {
                    return Err(Error::domain("sampled source needs matching times and snapshots (at least two)"));
                }
                if times[0] > 0.0 || times[times.len() - 1] < self.t_end {
                    return Err(Error::domain("sampled source times must cover [0, t_end]"));
                }
                if times.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::domain("sampled source times must increase"));
                }
                for v in values {
                    check_samples("phi", v, n)?;
                }
            }
        }
        Ok(())
    }
}

/// Product-integration rule for `∫_0^t ξ^{β−1} E_{β,β}(−λ ξ^β) F(t−ξ) dξ`.
///
/// Panels are graded geometrically towards ξ = 0 (first panel carries the
/// weight ξ^{β−1} in Gauss-Jacobi form) and towards ξ = t; `breaks` adds
/// further panel ends (kinks of F). Returns nodes and weights so the same
/// rule can be applied to many `F`.
struct ConvolutionRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

const GRADING_LEVELS: usize = 30;

fn convolution_rule(t: f64, beta: f64, breaks: &[f64], order: usize) -> ConvolutionRule {
    let (gl_x, gl_w) = gauss_legendre(order);
    let (gj_x, gj_w) = gauss_jacobi_unit(order, beta - 1.0);
    let mut ends = vec![0.0, t];
    let a0 = t * 0.5f64.powi(GRADING_LEVELS as i32);
    for j in 0..GRADING_LEVELS {
        let p = t * 0.5f64.powi(j as i32 + 1);
        ends.push(p);
        ends.push(t - p);
    }
    ends.push(a0);
    ends.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < t));
    ends.sort_by(f64::total_cmp);
    ends.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * t);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in ends.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if lo == 0.0 {
            // ∫_0^hi ξ^{β−1} F = hi^β ∫_0^1 s^{β−1} F(hi s) ds
            let scale = hi.powf(beta);
            for (&x, &wt) in gj_x.iter().zip(&gj_w) {
                nodes.push(hi * x);
                weights.push(scale * wt);
            }
        } else {
            let c = 0.5 * (lo + hi);
            let h = 0.5 * (hi - lo);
            for (&x, &wt) in gl_x.iter().zip(&gl_w) {
                let xi = c + h * x;
                nodes.push(xi);
                weights.push(h * wt * xi.powf(beta - 1.0));
            }
        }
    }
    ConvolutionRule { nodes, weights }
}

impl ConvolutionRule {
    /// Kernel values `E_{β,β}(−λ ξ^β)` times the weights.
    fn kernel_weights(&self, lambda: f64, beta: f64) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&xi, &w)| w * ml_eval(beta, beta, -lambda * xi.powf(beta)).0)
            .collect()
    }
}

fn fft_forward(v: &[Complex64]) -> Vec<Complex64> {
    let mut buf = v.to_vec();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

fn fft_inverse(v: &[Complex64]) -> Vec<Complex64> {
    let mut buf = v.to_vec();
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    buf
}

/// Continuous Fourier coefficients `∫ f(x) e^{−ik(x−x_min)} dx` of grid
/// data at the DFT wavenumbers.
fn transform_samples(v: &[f64], h: f64) -> Vec<Complex64> {
    let c: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_forward(&c).into_iter().map(|z| z * h).collect()
}

/// Signed DFT wavenumbers for `n` nodes of spacing `h`.
pub fn wavenumbers(n: usize, h: f64) -> Vec<f64> {
    let l = n as f64 * h;
    (0..n)
        .map(|j| {
            let s = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
            2.0 * PI * s / l
        })
        .collect()
}

fn transform_initial(d: &InitialData, grid: &Grid, ks: &[f64]) -> Option<Vec<Complex64>> {
    let h = grid.spacing();
    match d {
        InitialData::Zero => None,
        InitialData::Samples(v) => Some(transform_samples(v, h)),
        InitialData::Delta { at } => {
            let n = ks.len();
            let shift = at - grid.x_min;
            Some(
                ks.iter()
                    .enumerate()
                    .map(|(j, &k)| {
                        if n % 2 == 0 && j == n / 2 {
                            // Nyquist mode: average of ±k keeps the field real
                            Complex64::new((k * shift).cos(), 0.0)
                        } else {
                            Complex64::from_polar(1.0, -k * shift)
                        }
                    })
                    .collect(),
            )
        }
    }
}

/// Mode coefficients `Ñ(k_j, t)` of the solution in the convention of
/// [`transform_samples`], with an absolute error estimate per mode.
pub fn solution_modes(s: &Scenario) -> Result<(Vec<Complex64>, Vec<f64>)> {
    s.validate()?;
    let n = s.grid.count;
    let h = s.grid.spacing();
    let ks = wavenumbers(n, h);
    let (alpha, beta, eta, t) = (s.alpha, s.beta, s.eta, s.t_end);
    let zero = Complex64::new(0.0, 0.0);
    let f = transform_initial(&s.f, &s.grid, &ks);
    let g = transform_initial(&s.g, &s.grid, &ks);
    let mut modes = vec![zero; n];
    let mut errors = vec![0.0; n];
    for j in 0..n {
        let fj = f.as_ref().map_or(zero, |v| v[j]);
        let gj = g.as_ref().map_or(zero, |v| v[j]);
        if fj != zero || gj != zero {
            modes[j] = mode_evolution(ks[j], t, alpha, beta, eta, fj, gj)?;
            errors[j] = 1e-14 * (fj.norm() + gj.norm()) * t.powf(beta - 1.0).max(t.powf(beta - 2.0));
        }
    }
    if let Source::None = s.source {
        return Ok((modes, errors));
    }

    // source term: time convolution per mode
    let (snapshots, breaks): (Vec<(f64, Vec<Complex64>)>, Vec<f64>) = match &s.source {
        Source::Separable { spatial, .. } => (vec![(0.0, transform_samples(spatial, h))], vec![]),
        Source::Sampled { times, values } => (
            times
                .iter()
                .zip(values)
                .map(|(&tm, v)| (tm, transform_samples(v, h)))
                .collect(),
            times.iter().map(|&tm| t - tm).collect(),
        ),
        Source::None => unreachable!(),
    };
    let coarse = convolution_rule(t, beta, &breaks, 10);
    let fine = convolution_rule(t, beta, &breaks, 16);
    // time factor at τ = t − ξ for every node: either p(τ) or the
    // interpolation weights between snapshots
    let time_weights = |rule: &ConvolutionRule| -> Vec<Vec<(usize, f64)>> {
        rule.nodes
            .iter()
            .map(|&xi| {
                let tau = t - xi;
                match &s.source {
                    Source::Separable { profile, .. } => vec![(0, profile.value(tau))],
                    Source::Sampled { times, .. } => {
                        let m = times.partition_point(|&tm| tm <= tau).clamp(1, times.len() - 1);
                        let (t0, t1) = (times[m - 1], times[m]);
                        let w = (tau - t0) / (t1 - t0);
                        vec![(m - 1, 1.0 - w), (m, w)]
                    }
                    Source::None => vec![],
                }
            })
            .collect()
    };
    let tw_coarse = time_weights(&coarse);
    let tw_fine = time_weights(&fine);
    let apply = |kw: &[f64], tw: &[Vec<(usize, f64)>], j: usize| -> Complex64 {
        let mut acc = zero;
        for (w, parts) in kw.iter().zip(tw) {
            for &(m, c) in parts {
                acc += snapshots[m].1[j] * (w * c);
            }
        }
        acc
    };
    // modes j and n − j share |k|, hence the kernel weights
    for key in 0..=n / 2 {
        let pair = if key == 0 || key == n - key { vec![key] } else { vec![key, n - key] };
        if pair.iter().all(|&j| snapshots.iter().all(|sn| sn.1[j] == zero)) {
            continue;
        }
        let lambda = eta * ks[key].abs().powf(alpha);
        let kc = coarse.kernel_weights(lambda, beta);
        let kf = fine.kernel_weights(lambda, beta);
        for j in pair {
            let a = apply(&kc, &tw_coarse, j);
            let b = apply(&kf, &tw_fine, j);
            modes[j] += b;
            errors[j] += (a - b).norm() + 1e-14 * b.norm();
        }
    }
    Ok((modes, errors))
}

/// Bound on `(1/π) ∫_{k_N}^∞ |Ñ(k)| dk`, the modes lost above the Nyquist
/// wavenumber, from a power law through the mode magnitudes near `k_N/2`
/// and `k_N`. Kernels with β ≠ 1 decay only algebraically in k.
fn truncation_bound(modes: &[Complex64], h: f64) -> f64 {
    let n = modes.len();
    if n < 32 {
        return 0.0;
    }
    let band = |c: usize| {
        (c - 4..=c)
            .map(|j| modes[j].norm().max(modes[(n - j) % n].norm()))
            .fold(0.0f64, f64::max)
    };
    let hi = band(n / 2);
    let lo = band(n / 4 + 2);
    if hi == 0.0 {
        return 0.0;
    }
    let p = (lo / hi).log2().max(1.5);
    let k_nyquist = PI / h;
    hi * k_nyquist / ((p - 1.0) * PI)
}

/// Solution of the full problem on the scenario grid by the spectral
/// route: transform the data, evolve every mode, transform back. The
/// domain is treated as periodic with period `count · h`, so the data (and
/// the solution) must be negligible at the edges.
pub fn solve_theorem(s: &Scenario) -> Result<SolutionField> {
    let (modes, mode_errors) = solution_modes(s)?;
    let n = s.grid.count;
    let h = s.grid.spacing();
    let l = n as f64 * h;
    let back = fft_inverse(&modes);
    let values: Vec<f64> = back.iter().map(|z| z.re / l).collect();
    let imag = back.iter().fold(0.0f64, |m, z| m.max(z.im.abs())) / l;
    let roundoff = 4.0 * f64::EPSILON * modes.iter().map(|z| z.norm()).sum::<f64>() / l;
    let quad: f64 = mode_errors.iter().sum::<f64>() / l;
    // periodic images: the field at the edges measures the wrap-around
    let edge = values[0].abs().max(values[n - 1].abs());
    let err_estimate = imag + roundoff + quad + 2.0 * edge + truncation_bound(&modes, h);
    Ok(SolutionField {
        grid: s.grid.nodes(),
        values,
        method: Method::Spectral,
        methods: vec![Method::Spectral; n],
        errors: vec![err_estimate; n],
        err_estimate,
    })
}

/// Delta-initial-data solution evaluated pointwise at arbitrary nodes.
pub fn green_field(alpha: f64, beta: f64, eta: f64, t: f64, nodes: &[f64]) -> Result<SolutionField> {
    let mut values = Vec::with_capacity(nodes.len());
    let mut errors = Vec::with_capacity(nodes.len());
    let mut methods = Vec::with_capacity(nodes.len());
    for &x in nodes {
        let r = green_delta(&GreensQuery::new(alpha, beta, eta, x, t)?)?;
        values.push(r.value);
        errors.push(r.error);
        methods.push(r.method);
    }
    let count = |m: Method| methods.iter().filter(|&&x| x == m).count();
    let method = [Method::Series, Method::MellinBarnes, Method::CosineQuadrature]
        .into_iter()
        .max_by_key(|&m| count(m))
        .unwrap_or(Method::Series);
    let err_estimate = errors.iter().fold(0.0, |m: f64, &e| m.max(e));
    Ok(SolutionField {
        grid: nodes.to_vec(),
        values,
        method,
        methods,
        errors,
        err_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fourier_invert_oracle;
    use crate::special::gamma;

    fn q(alpha: f64, beta: f64, eta: f64, x: f64, t: f64) -> GreensQuery {
        GreensQuery::new(alpha, beta, eta, x, t).unwrap()
    }

    fn gaussian(x: f64, eta: f64, t: f64) -> f64 {
        (-x * x / (4.0 * eta * t)).exp() / (4.0 * PI * eta * t).sqrt()
    }

    #[test]
    fn query_validation() {
        assert!(GreensQuery::new(2.5, 1.0, 1.0, 0.0, 1.0).is_err());
        assert!(GreensQuery::new(1.0, 0.0, 1.0, 0.0, 1.0).is_err());
        assert!(GreensQuery::new(1.0, 1.0, -1.0, 0.0, 1.0).is_err());
        assert!(GreensQuery::new(1.0, 1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn g1_closed_forms_at_origin() {
        let g = greens_g1(&q(2.0, 1.0, 1.0, 0.0, 1.0)).unwrap();
        assert!((g.value - 0.28209479177387814).abs() < 1e-12);
        let c = greens_g1(&q(1.0, 1.0, 1.0, 0.0, 1.0)).unwrap();
        assert!((c.value - 1.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn g1_against_fourier_oracle() {
        let g = greens_g1(&q(1.5, 1.0, 1.0, 1.0, 1.0)).unwrap();
        let o = fourier_invert_oracle(&|k: f64| (-k.powf(1.5)).exp(), 1.0, 1e-9).unwrap();
        assert!((g.value - o.value).abs() < 1e-8, "{} vs {}", g.value, o.value);
    }

    #[test]
    fn g2_relations() {
        let a = q(1.3, 1.0, 0.7, 0.4, 2.0);
        assert_eq!(greens_g1(&a).unwrap().value, greens_g2(&a).unwrap().value);
        let b = q(1.3, 0.6, 0.7, 0.4, 1.0);
        assert_eq!(greens_g1(&b).unwrap().value, greens_g2(&b).unwrap().value);
        let c = q(1.3, 0.6, 0.7, 0.4, 2.5);
        let ratio = greens_g1(&c).unwrap().value / greens_g2(&c).unwrap().value;
        assert!((ratio - 2.5f64.powf(-0.4)).abs() < 1e-14);
        let d = greens_g2(&q(2.0, 1.0, 1.0, 0.0, 4.0)).unwrap();
        assert!((d.value - (16.0 * PI).powf(-0.5)).abs() < 1e-12);
    }

    #[test]
    fn evenness_is_exact() {
        for &(a, b) in &[(1.5, 0.8), (0.9, 1.0)] {
            let p = greens_g1(&q(a, b, 1.0, 0.8, 1.3)).unwrap().value;
            let m = greens_g1(&q(a, b, 1.0, -0.8, 1.3)).unwrap().value;
            assert_eq!(p, m);
            let p = green_delta(&q(a, b, 1.0, 0.8, 1.3)).unwrap().value;
            let m = green_delta(&q(a, b, 1.0, -0.8, 1.3)).unwrap().value;
            assert_eq!(p, m);
        }
    }

    #[test]
    fn green_delta_half_order_time() {
        // β = 1/2, α = 1: symbol t^{-1/2} E_{1/2,1/2}(−k t^{1/2}) at t = 1
        let g = green_delta(&q(1.0, 0.5, 1.0, 1.0, 1.0)).unwrap();
        let o = fourier_invert_oracle(&|k: f64| ml(0.5, 0.5, -k).unwrap(), 1.0, 1e-9).unwrap();
        assert!((g.value - o.value).abs() < 1e-8, "{} vs {}", g.value, o.value);
    }

    #[test]
    fn green_delta_matches_g1() {
        for &(a, b) in &[(1.5, 0.8), (1.2, 0.5), (0.8, 0.9), (1.9, 1.0)] {
            for &x in &[0.0, 0.3, 1.7, 6.0] {
                let qq = q(a, b, 0.8, x, 1.4);
                let d = green_delta(&qq).unwrap();
                let g = greens_g1(&qq).unwrap();
                assert!(
                    (d.value - g.value).abs() <= 1e-9 + d.error + g.error,
                    "alpha={a} beta={b} x={x}: {} vs {}",
                    d.value,
                    g.value
                );
            }
        }
    }

    #[test]
    fn gaussian_and_cauchy_limits() {
        for &x in &[0.0, 0.5, 2.0, 5.0] {
            let g = green_delta(&q(2.0, 1.0, 0.5, x, 2.0)).unwrap();
            assert!((g.value - gaussian(x, 0.5, 2.0)).abs() < 1e-12, "x={x}");
            let c = green_delta(&q(1.0, 1.0, 0.5, x, 2.0)).unwrap();
            let exact = 1.0 / (PI * (1.0 + x * x));
            assert!((c.value - exact).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn self_similarity() {
        let (a, b, eta) = (1.4, 0.7, 0.9);
        let q1 = q(a, b, eta, 0.9, 1.0);
        let t2: f64 = 3.0;
        let x2 = 0.9 * (t2.powf(b)).powf(1.0 / a);
        let q2 = q(a, b, eta, x2, t2);
        let f1 = a * 0.9 * green_delta(&q1).unwrap().value;
        let f2 = a * x2 * green_delta(&q2).unwrap().value / t2.powf(b - 1.0);
        assert!((f1 - f2).abs() < 1e-12 * f1);
    }

    #[test]
    fn cosine_route_with_h_function_symbol() {
        let c = greens_via_cosine(&q(1.0, 1.0, 1.0, 2.0, 1.0)).unwrap();
        assert!((c.value - 0.2 / PI).abs() < 1e-9, "{}", c.value);
        let g = greens_via_cosine(&q(2.0, 1.0, 1.0, 0.0, 1.0)).unwrap();
        assert!((g.value - 0.28209479177387814).abs() < 1e-9);
        let qq = q(1.5, 0.8, 1.0, 0.7, 1.0);
        let a = greens_via_cosine(&qq).unwrap();
        let b = greens_g2(&qq).unwrap();
        assert!((a.value - b.value).abs() < 1e-7);
    }

    #[test]
    fn mode_evolution_examples() {
        let f = Complex64::new(0.7, 0.2);
        let g = Complex64::new(-0.3, 0.1);
        let (beta, t) = (1.5, 1.7);
        let v = mode_evolution(0.0, t, 1.2, beta, 1.0, f, g).unwrap();
        let exact = f * (t.powf(beta - 1.0) / gamma(beta).unwrap())
            + g * (t.powf(beta - 2.0) / gamma(beta - 1.0).unwrap());
        assert!((v - exact).norm() < 1e-13);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let heat = mode_evolution(1.3, 0.8, 2.0, 1.0, 0.6, one, zero).unwrap();
        assert!((heat.re - (-0.6 * 1.69 * 0.8f64).exp()).abs() < 1e-14);
        let levy = mode_evolution(-1.3, 0.8, 0.7, 1.0, 0.6, one, zero).unwrap();
        assert!((levy.re - (-0.6 * 1.3f64.powf(0.7) * 0.8).exp()).abs() < 1e-14);
        assert!(mode_evolution(1.0, 1.0, 1.0, 0.9, 1.0, one, one).is_err());
    }

    fn scenario(alpha: f64, beta: f64, f: InitialData) -> Scenario {
        Scenario {
            alpha,
            beta,
            eta: 1.0,
            grid: Grid::new(-20.0, 20.0, 256).unwrap(),
            f,
            g: InitialData::Zero,
            source: Source::None,
            t_end: 1.0,
        }
    }

    #[test]
    fn zero_data_gives_zero_field() {
        let s = solve_theorem(&scenario(1.5, 0.9, InitialData::Zero)).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn spectral_delta_is_the_heat_kernel() {
        let s = solve_theorem(&scenario(2.0, 1.0, InitialData::Delta { at: 0.0 })).unwrap();
        for (&x, &v) in s.grid.iter().zip(&s.values) {
            assert!((v - gaussian(x, 1.0, 1.0)).abs() < 1e-12, "x={x}");
        }
        // a single hot node of unit mass is the same kernel centred on it
        let grid = Grid::new(-20.0, 20.0, 256).unwrap();
        let nodes = grid.nodes();
        let mut f = vec![0.0; 256];
        f[128] = 1.0 / grid.spacing();
        let s = solve_theorem(&scenario(2.0, 1.0, InitialData::Samples(f))).unwrap();
        let c = nodes[128];
        for (&x, &v) in nodes.iter().zip(&s.values) {
            assert!((v - gaussian(x - c, 1.0, 1.0)).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn spectral_modes_follow_mode_evolution() {
        let sc = scenario(1.5, 0.8, InitialData::Delta { at: 0.0 });
        let s = solve_theorem(&sc).unwrap();
        let h = sc.grid.spacing();
        let back = transform_samples(&s.values, h);
        let ks = wavenumbers(256, h);
        let f = transform_initial(&sc.f, &sc.grid, &ks).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        for j in 0..256 {
            let m = mode_evolution(ks[j], 1.0, 1.5, 0.8, 1.0, f[j], zero).unwrap();
            assert!((back[j] - m).norm() < 1e-12, "mode {j}");
        }
    }

    #[test]
    fn symmetric_data_symmetric_field() {
        let grid = Grid::new(-10.0, 10.0, 128).unwrap();
        let f: Vec<f64> = grid.nodes().iter().map(|x| (-x * x).exp()).collect();
        let mut sc = scenario(1.3, 0.7, InitialData::Samples(f.clone()));
        sc.grid = grid;
        sc.source = Source::Separable {
            spatial: f,
            profile: TimeProfile::Exponential { rate: 0.5 },
        };
        let s = solve_theorem(&sc).unwrap();
        let n = s.values.len();
        for i in 0..n {
            assert!((s.values[i] - s.values[n - 1 - i]).abs() <= 1e-14 + s.err_estimate);
        }
    }

    #[test]
    fn constant_source_convolution_closed_form() {
        // ∫_0^t ξ^{β−1} E_{β,β}(−λξ^β) dξ = t^β E_{β,β+1}(−λ t^β)
        let grid = Grid::new(-15.0, 15.0, 64).unwrap();
        let spatial: Vec<f64> = grid.nodes().iter().map(|x| (-x * x / 2.0).exp()).collect();
        for &beta in &[0.6, 1.0, 1.7] {
            let sc = Scenario {
                alpha: 1.4,
                beta,
                eta: 0.8,
                grid,
                f: InitialData::Zero,
                g: InitialData::Zero,
                source: Source::Separable {
                    spatial: spatial.clone(),
                    profile: TimeProfile::Constant,
                },
                t_end: 1.6,
            };
            let (modes, errors) = solution_modes(&sc).unwrap();
            let ks = wavenumbers(64, grid.spacing());
            let st = transform_samples(&spatial, grid.spacing());
            for j in 0..64 {
                let tb = 1.6f64.powf(beta);
                let lam = 0.8 * ks[j].abs().powf(1.4);
                let exact = st[j] * (tb * ml(beta, beta + 1.0, -lam * tb).unwrap());
                assert!(
                    (modes[j] - exact).norm() < 1e-10 * st[j].norm().max(1e-3),
                    "beta={beta} mode {j}: {} vs {}",
                    modes[j],
                    exact
                );
                assert!(errors[j] < 1e-8);
            }
        }
    }

    #[test]
    fn sampled_constant_source_matches_separable() {
        let grid = Grid::new(-15.0, 15.0, 64).unwrap();
        let spatial: Vec<f64> = grid.nodes().iter().map(|x| (-x * x / 2.0).exp()).collect();
        let mut sc = Scenario {
            alpha: 1.4,
            beta: 0.8,
            eta: 1.0,
            grid,
            f: InitialData::Zero,
            g: InitialData::Zero,
            source: Source::Separable {
                spatial: spatial.clone(),
                profile: TimeProfile::Constant,
            },
            t_end: 1.0,
        };
        let a = solve_theorem(&sc).unwrap();
        sc.source = Source::Sampled {
            times: vec![0.0, 0.4, 1.0],
            values: vec![spatial.clone(), spatial.clone(), spatial],
        };
        let b = solve_theorem(&sc).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-11);
        }
    }

    #[test]
    fn narrow_initial_data_approaches_the_kernel() {
        let grid = Grid::new(-200.0, 200.0, 8192).unwrap();
        let nodes = grid.nodes();
        let probe: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].abs() < 3.0).step_by(40).collect();
        let kernel = |x: f64| green_delta(&q(1.5, 0.9, 1.0, x, 1.0)).unwrap().value;
        let mut last = f64::INFINITY;
        for &sigma in &[0.2, 0.1, 0.05] {
            let f: Vec<f64> = nodes
                .iter()
                .map(|x| (-x * x / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt()))
                .collect();
            let mut sc = scenario(1.5, 0.9, InitialData::Samples(f));
            sc.grid = grid;
            let s = solve_theorem(&sc).unwrap();
            let dev = probe
                .iter()
                .map(|&i| (s.values[i] - kernel(nodes[i])).abs())
                .fold(0.0, f64::max);
            assert!(dev < last, "sigma={sigma}: {dev}");
            last = dev;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn scenario_validation() {
        let mut sc = scenario(1.5, 0.9, InitialData::Samples(vec![1.0; 256]));
        assert!(matches!(solve_theorem(&sc), Err(Error::BoundaryDecay(_))));
        sc.f = InitialData::Zero;
        sc.g = InitialData::Delta { at: 0.0 };
        assert!(matches!(solve_theorem(&sc), Err(Error::Domain(_))));
        sc.g = InitialData::Zero;
        sc.grid = Grid::new(-1.0, 1.0, 100).unwrap();
        assert!(solve_theorem(&sc).is_err());
    }

    #[test]
    fn second_initial_condition() {
        // β = 1.5, g = δ: Ñ = t^{β−2} E_{β,β−1}(−η|k|^α t^β)
        let mut sc = scenario(1.2, 1.5, InitialData::Zero);
        sc.g = InitialData::Delta { at: 0.0 };
        let s = solve_theorem(&sc).unwrap();
        let h = sc.grid.spacing();
        let back = transform_samples(&s.values, h);
        let ks = wavenumbers(256, h);
        let g = transform_initial(&sc.g, &sc.grid, &ks).unwrap();
        for j in [0usize, 3, 50, 128, 200] {
            let m = g[j] * ml(1.5, 0.5, -ks[j].abs().powf(1.2)).unwrap();
            assert!((back[j] - m).norm() < 1e-12);
        }
    }
}
