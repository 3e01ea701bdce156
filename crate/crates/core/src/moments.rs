//! Fractional order moments `<|x|^δ>(t) = ∫ |x|^δ N(x,t) dx` of the
//! delta-initial-data solution, in closed form and by quadrature.

use crate::error::{Error, Result};
use crate::solver::{validate_model, SolutionField};
use crate::special::{gamma, reciprocal_gamma};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentQuery {
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub t: f64,
}

impl MomentQuery {
    pub fn new(delta: f64, alpha: f64, beta: f64, eta: f64, t: f64) -> Result<Self> {
        let m = MomentQuery { delta, alpha, beta, eta, t };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        validate_model(self.alpha, self.beta, self.eta)?;
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::domain(format!("time t = {} must be positive", self.t)));
        }
        if !(self.delta > -1.0 && self.delta + self.alpha > 0.0) {
            return Err(Error::domain(format!(
                "moment order delta = {} needs delta > -1 and delta + alpha > 0",
                self.delta
            )));
        }
        // the kernel has a |x|^{-1-α} tail unless α = 2
        if self.alpha < 2.0 && self.delta >= self.alpha {
            return Err(Error::domain(format!(
                "moment of order delta = {} is infinite for alpha = {}",
                self.delta, self.alpha
            )));
        }
        Ok(())
    }

    /// True when β > 1, where the closed form is used beyond the range in
    /// which the delta-data solution was derived.
    pub fn outside_derived_range(&self) -> bool {
        self.beta > 1.0
    }
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// `(2/α) η^{δ/α} t^{βδ/α+β−1} Γ(−δ/α)Γ(1+δ)Γ(1+δ/α) / [Γ(−δ/2)Γ(β+βδ/α)Γ(1+δ/2)]`.
pub fn moment_closed_form(m: &MomentQuery) -> Result<f64> {
    m.validate()?;
    let (d, a, b) = (m.delta, m.alpha, m.beta);
    if is_pole(-d / a) || is_pole(-d / 2.0) {
        return Err(Error::domain(format!(
            "delta = {d} sits on a gamma pole of the closed form; use the limit \
             operations (moment_limit_zero, msd_classical or moment_extrapolated)"
        )));
    }
    let ratio = gamma(-d / a)? * reciprocal_gamma(-d / 2.0);
    let rest = gamma(1.0 + d)? * gamma(1.0 + d / a)?
        * reciprocal_gamma(b + b * d / a)
        * reciprocal_gamma(1.0 + d / 2.0);
    let scale = m.eta.powf(d / a) * m.t.powf(b * d / a + b - 1.0);
    Ok(2.0 / a * scale * ratio * rest)
}

const LIMIT_EPS: [f64; 2] = [1e-4, 1e-5];

/// Closed form continued to a pole order by evaluating at `δ ± ε` for
/// ε = 1e-4 and 1e-5 and Richardson-extrapolating the symmetric means.
pub fn moment_extrapolated(m: &MomentQuery) -> Result<f64> {
    let at = |e: f64| -> Result<f64> {
        let lo = moment_closed_form(&MomentQuery { delta: m.delta - e, ..*m })?;
        let hi = moment_closed_form(&MomentQuery { delta: m.delta + e, ..*m })?;
        Ok(0.5 * (lo + hi))
    };
    let coarse = at(LIMIT_EPS[0])?;
    let fine = at(LIMIT_EPS[1])?;
    // symmetric means are even in ε
    let r = (LIMIT_EPS[0] / LIMIT_EPS[1]).powi(2);
    Ok((r * fine - coarse) / (r - 1.0))
}

/// `lim_{δ→0} <|x|^δ> = t^{β−1}/Γ(β)`, the total mass at time t.
pub fn moment_limit_zero(alpha: f64, beta: f64, eta: f64, t: f64) -> Result<f64> {
    validate_model(alpha, beta, eta)?;
    Ok(t.powf(beta - 1.0) * reciprocal_gamma(beta))
}

/// Mean squared displacement of the α = 2 kernel, `2η t^{2β−1}/Γ(2β)`.
pub fn msd_classical(beta: f64, eta: f64, t: f64) -> f64 {
    2.0 * eta * t.powf(2.0 * beta - 1.0) * reciprocal_gamma(2.0 * beta)
}

/// `∫ |x|^δ N dx` from a symmetric field. Nodes at `x < 0` must mirror
/// nodes at `x > 0`; a field given on `x ≥ 0` only is extended evenly.
/// Geometric node sets are integrated by the trapezoid rule in `ln x`,
/// anything else by product-linear interpolation against `x^δ`. Beyond the
/// last node a single power law fitted on the outermost decade is
/// integrated analytically.
pub fn moment_quadrature(field: &SolutionField, delta: f64) -> Result<f64> {
    if !(delta > -1.0) {
        return Err(Error::domain(format!("moment order delta = {delta} must exceed -1")));
    }
    let (origin, pos) = half_line(field)?;
    if pos.len() < 4 {
        return Err(Error::domain("need at least four nodes with x > 0"));
    }
    let d1 = delta + 1.0;
    let (x1, v1) = pos[0];
    let mut body = match origin {
        // N linear on [0, x1]
        Some(v0) => x1.powf(d1) * (v0 / d1 + (v1 - v0) / (delta + 2.0)),
        None => v1 * x1.powf(d1) / d1,
    };
    if is_geometric(&pos) {
        let step = (pos[1].0 / pos[0].0).ln();
        let f: Vec<f64> = pos.iter().map(|&(x, v)| x.powf(d1) * v).collect();
        let n = f.len();
        let inner: f64 = f[1..n - 1].iter().sum();
        body += step * (inner + 0.5 * (f[0] + f[n - 1]));
    } else {
        for w in pos.windows(2) {
            let ((a, na), (b, nb)) = (w[0], w[1]);
            let slope = (nb - na) / (b - a);
            let m0 = (b.powf(d1) - a.powf(d1)) / d1;
            let m1 = (b.powf(delta + 2.0) - a.powf(delta + 2.0)) / (delta + 2.0);
            body += (na - slope * a) * m0 + slope * m1;
        }
    }
    let tail = if outer_nodes_vanish(field) {
        0.0
    } else {
        power_tail(&pos, delta, body)?
    };
    Ok(2.0 * (body + tail))
}

fn half_line(field: &SolutionField) -> Result<(Option<f64>, Vec<(f64, f64)>)> {
    if field.grid.len() != field.values.len() {
        return Err(Error::domain("field nodes and values differ in length"));
    }
    let mut origin = None;
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (&x, &v) in field.grid.iter().zip(&field.values) {
        if x > 0.0 {
            pos.push((x, v));
        } else if x < 0.0 {
            neg.push((-x, v));
        } else {
            origin = Some(v);
        }
    }
    pos.sort_by(|a, b| a.0.total_cmp(&b.0));
    if !neg.is_empty() {
        neg.sort_by(|a, b| a.0.total_cmp(&b.0));
        let scale = pos.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
        let tol = 1e-8 * scale + 2.0 * field.err_estimate;
        let mirrored = neg.len() == pos.len()
            && neg.iter().zip(&pos).all(|(n, p)| {
                (n.0 - p.0).abs() <= 1e-9 * p.0 && (n.1 - p.1).abs() <= tol
            });
        if !mirrored {
            return Err(Error::domain("moment quadrature needs a field symmetric about x = 0"));
        }
    }
    Ok((origin, pos))
}

/// True when the three outermost positive nodes are zero within their own
/// error estimates, so there is no tail left to extrapolate.
fn outer_nodes_vanish(field: &SolutionField) -> bool {
    if field.errors.len() != field.grid.len() {
        return false;
    }
    let mut outer: Vec<(f64, f64, f64)> = (0..field.grid.len())
        .filter(|&i| field.grid[i] > 0.0)
        .map(|i| (field.grid[i], field.values[i], field.errors[i]))
        .collect();
    outer.sort_by(|a, b| b.0.total_cmp(&a.0));
    outer.len() >= 3 && outer[..3].iter().all(|&(_, v, e)| v.abs() <= e)
}

fn is_geometric(pos: &[(f64, f64)]) -> bool {
    let r = (pos[1].0 / pos[0].0).ln();
    r > 0.0
        && pos
            .windows(2)
            .all(|w| ((w[1].0 / w[0].0).ln() - r).abs() <= 1e-9 * r)
}

/// `∫_X^∞ x^δ C x^{−p} dx` with `C x^{−p}` fitted on `[X/10, X]`.
fn power_tail(pos: &[(f64, f64)], delta: f64, body: f64) -> Result<f64> {
    let xmax = pos.last().expect("non-empty").0;
    let outer = pos[pos.len() - 3..]
        .iter()
        .fold(0.0f64, |m, &(x, v)| m.max((x.powf(delta + 1.0) * v).abs()));
    // fast (e.g. Gaussian) decay: the last nodes are rounding noise
    if outer <= 1e-12 * body.abs() {
        return Ok(0.0);
    }
    let decade: Vec<(f64, f64)> = pos
        .iter()
        .filter(|p| p.0 >= 0.1 * xmax)
        .map(|&(x, v)| (x.ln(), v))
        .collect();
    if decade.len() < 3 || decade.iter().any(|p| !(p.1 > 0.0)) {
        return Err(Error::TailFit(format!(
            "outermost decade [{:e}, {xmax:e}] has too few positive samples",
            0.1 * xmax
        )));
    }
    let pts: Vec<(f64, f64)> = decade.iter().map(|&(s, v)| (s, v.ln())).collect();
    let n = pts.len() as f64;
    let ms = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ml = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - ms).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - ms) * (p.1 - ml)).sum();
    let slope = sxy / sxx;
    let p = -slope;
    let resid = pts
        .iter()
        .fold(0.0f64, |m, q| m.max((q.1 - ml - slope * (q.0 - ms)).abs()));
    if resid > 1e-3 {
        return Err(Error::TailFit(format!(
            "outermost decade is not a single power law (log residual {resid:.2e})"
        )));
    }
    let excess = p - delta - 1.0;
    if excess <= 0.0 {
        return Err(Error::TailFit(format!(
            "fitted decay |x|^-{p:.4} is too slow for a moment of order {delta}"
        )));
    }
    let c_at_x = (ml + slope * (xmax.ln() - ms)).exp();
    Ok(c_at_x * xmax.powf(delta + 1.0) / excess)
}
