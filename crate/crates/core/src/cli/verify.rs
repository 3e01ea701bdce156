//! Verification suites run by `fracrd verify`.

use crate::error::{Error, Result};
use crate::hfox::{evaluate, green_series_large_x, green_series_small_x, ContourChoice, HFunctionSpec};
use crate::moments::{
    moment_closed_form, moment_extrapolated, moment_limit_zero, moment_quadrature, msd_classical,
    MomentQuery,
};
use crate::solver::{green_delta, green_field, greens_g1, GreensQuery};
use crate::special::{gamma, ml, reciprocal_gamma, sin_pi};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Identities,
    Routes,
    Moments,
    Asymptotics,
    All,
}

impl Suite {
    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Routes => "routes",
            Suite::Moments => "moments",
            Suite::Asymptotics => "asymptotics",
            Suite::All => "all",
        }
    }
}

/// Outcome of one invariant: worst deviation over its cases and the
/// inputs of the worst (or first failing) case.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub worst: f64,
    pub tol: f64,
    pub case: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.worst <= self.tol
    }
}

struct Tracker {
    check: Check,
}

impl Tracker {
    fn new(suite: &'static str, name: impl Into<String>, tol: f64) -> Self {
        Tracker {
            check: Check {
                suite,
                name: name.into(),
                worst: 0.0,
                tol,
                case: String::new(),
            },
        }
    }

    fn record(&mut self, dev: Result<f64>, case: impl FnOnce() -> String) {
        let c = &mut self.check;
        if c.worst.is_infinite() {
            return;
        }
        match dev {
            Ok(d) if d.is_finite() => {
                if d > c.worst || c.case.is_empty() {
                    c.worst = c.worst.max(d);
                    c.case = case();
                }
            }
            Ok(d) => {
                c.worst = f64::INFINITY;
                c.case = format!("{} (deviation {d})", case());
            }
            Err(e) => {
                c.worst = f64::INFINITY;
                c.case = format!("{}: {e}", case());
            }
        }
    }

    fn done(self) -> Check {
        self.check
    }
}

fn tol_or(tol: Option<f64>, default: f64) -> f64 {
    tol.unwrap_or(default)
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

pub fn identities(tol: Option<f64>) -> Vec<Check> {
    let s = "identities";
    let mut out = Vec::new();
    let reductions: [(&str, f64, f64, fn(f64) -> (f64, f64)); 3] = [
        ("E_{1,1}(z) = exp(z)", 1.0, 1.0, |z| (z, z.exp())),
        ("E_{2,1}(-z^2) = cos(z)", 2.0, 1.0, |z| (-z * z, z.cos())),
        ("E_{2,2}(-z^2) = sin(z)/z", 2.0, 2.0, |z| {
            (-z * z, if z == 0.0 { 1.0 } else { z.sin() / z })
        }),
    ];
    for (name, a, b, pair) in reductions {
        let mut t = Tracker::new(s, name, tol_or(tol, 1e-10));
        for z in linspace(-10.0, 0.0, 100) {
            let (arg, exact) = pair(z);
            t.record(ml(a, b, arg).map(|v| (v - exact).abs()), || format!("z = {z}"));
        }
        out.push(t.done());
    }

    let mut t = Tracker::new(s, "E_{a,b}(z) = 1/G(b) + z E_{a,a+b}(z)", tol_or(tol, 1e-10));
    for &a in &[0.5, 0.8, 1.3, 1.9] {
        for &b in &[0.5, 1.0, 1.1] {
            for &z in &[-20.0, -3.0, -0.5, -0.05] {
                let dev = (|| {
                    let lhs = ml(a, b, z)?;
                    let rhs = reciprocal_gamma(b) + z * ml(a, a + b, z)?;
                    Ok((lhs - rhs).abs() / lhs.abs().max(1.0))
                })();
                t.record(dev, || format!("alpha = {a}, beta = {b}, z = {z}"));
            }
        }
    }
    out.push(t.done());

    let mut t = Tracker::new(s, "H^{1,1}_{1,2} reduces to E_{a,b}(-x)", tol_or(tol, 1e-8));
    for &(a, b) in &[(0.5, 1.0), (0.9, 0.9), (1.5, 0.7), (1.9, 1.2)] {
        for &x in &[0.1, 1.0, 4.0] {
            let dev = (|| {
                let spec = HFunctionSpec::mittag_leffler(a, b)?;
                let h = evaluate(&spec, x, &ContourChoice::vertical())?;
                Ok((h.value - ml(a, b, -x)?).abs())
            })();
            t.record(dev, || format!("alpha = {a}, beta = {b}, x = {x}"));
        }
    }
    out.push(t.done());

    let mut t = Tracker::new(s, "G(x) G(1-x) = pi / sin(pi x)", tol_or(tol, 1e-13));
    for x in linspace(-4.7, 5.3, 41) {
        let dev = (|| {
            let lhs = gamma(x)? * gamma(1.0 - x)?;
            let rhs = PI / sin_pi(x);
            Ok((lhs - rhs).abs() / rhs.abs())
        })();
        t.record(dev, || format!("x = {x}"));
    }
    out.push(t.done());

    let mut t = Tracker::new(s, "alpha = 2, beta = 1 kernel is Gaussian", tol_or(tol, 1e-8));
    for x in linspace(0.0, 8.0, 33) {
        let dev = green_delta(&GreensQuery { alpha: 2.0, beta: 1.0, eta: 1.0, x, t: 1.0 })
            .map(|g| (g.value - (-x * x / 4.0).exp() / (4.0 * PI).sqrt()).abs());
        t.record(dev, || format!("eta = 1, t = 1, x = {x}"));
    }
    out.push(t.done());

    let mut t = Tracker::new(s, "alpha = 1, beta = 1 kernel is Cauchy", tol_or(tol, 1e-8));
    for x in linspace(0.0, 10.0, 41) {
        let dev = green_delta(&GreensQuery { alpha: 1.0, beta: 1.0, eta: 0.5, x, t: 2.0 })
            .map(|g| (g.value - 1.0 / (PI * (1.0 + x * x))).abs());
        t.record(dev, || format!("eta = 0.5, t = 2, x = {x}"));
    }
    out.push(t.done());
    out
}

/// Reduced kernel `n(u)` (η = t = 1) by every route that applies at `u`.
pub fn kernel_routes(alpha: f64, beta: f64, u: f64) -> Result<Vec<(&'static str, f64, f64)>> {
    let mut v = Vec::new();
    let q = GreensQuery::new(alpha, beta, 1.0, u, 1.0)?;
    let c = greens_g1(&q)?;
    v.push(("cosine", c.value, c.error));
    let spec = HFunctionSpec::green_kernel(alpha, beta)?;
    let h = evaluate(&spec, u, &ContourChoice::vertical())?;
    v.push(("mellin-barnes", h.value / (alpha * u), h.error / (alpha * u)));
    if alpha > beta && u <= 2.0 {
        let s = green_series_small_x(alpha, beta, u, 400)?;
        v.push(("series-small", s.value, s.error));
    }
    if u >= 2.0 && alpha < 2.0 {
        if let Ok(s) = green_series_large_x(alpha, beta, u.powf(-alpha), 400) {
            if s.error / u <= 1e-8 {
                v.push(("series-large", s.value / u, s.error / u));
            }
        }
    }
    Ok(v)
}

pub const ROUTE_U: [f64; 7] = [0.05, 0.2, 0.5, 1.0, 2.0, 3.5, 5.0];

pub fn routes(tol: Option<f64>) -> Vec<Check> {
    let mut out = Vec::new();
    for &a in &[1.2, 1.5, 1.8] {
        for &b in &[0.5, 0.8, 1.0] {
            let mut t = Tracker::new("routes", format!("routes agree, alpha = {a}, beta = {b}"), tol_or(tol, 1e-6));
            for &u in &ROUTE_U {
                let dev = kernel_routes(a, b, u).map(|r| {
                    let mut worst = 0.0f64;
                    for i in 0..r.len() {
                        for j in i + 1..r.len() {
                            worst = worst.max((r[i].1 - r[j].1).abs());
                        }
                    }
                    worst
                });
                t.record(dev, || format!("u = {u}"));
            }
            out.push(t.done());
        }
    }
    out
}

/// Geometric nodes `lo · 10^{i/per_decade}` up to `hi`.
pub fn geometric_nodes(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let n = ((hi / lo).log10() * per_decade as f64).round() as usize;
    (0..=n).map(|i| lo * 10f64.powf(i as f64 / per_decade as f64)).collect()
}

pub fn moments(tol: Option<f64>) -> Vec<Check> {
    let s = "moments";
    let mut out = Vec::new();
    let mut t = Tracker::new(s, "delta -> 0 limit is t^(beta-1)/G(beta)", tol_or(tol, 1e-7));
    for &(a, b, eta, time) in &[(1.5, 0.8, 1.0, 1.0), (0.7, 1.6, 2.0, 0.5), (1.2, 0.4, 0.3, 3.0), (2.0, 1.0, 1.0, 2.0)] {
        let dev = (|| {
            let lim = moment_extrapolated(&MomentQuery { delta: 0.0, alpha: a, beta: b, eta, t: time })?;
            let exact = moment_limit_zero(a, b, eta, time)?;
            Ok((lim - exact).abs() / exact)
        })();
        t.record(dev, || format!("alpha = {a}, beta = {b}, eta = {eta}, t = {time}"));
    }
    out.push(t.done());

    let mut t = Tracker::new(s, "(delta, alpha) -> (2, 2) limit is 2 eta t^(2beta-1)/G(2beta)", tol_or(tol, 1e-7));
    for &(b, eta, time) in &[(1.0, 1.0, 1.0), (0.6, 2.0, 1.5), (1.7, 0.5, 0.8), (0.3, 1.0, 4.0)] {
        let dev = moment_extrapolated(&MomentQuery { delta: 2.0, alpha: 2.0, beta: b, eta, t: time })
            .map(|lim| (lim - msd_classical(b, eta, time)).abs() / msd_classical(b, eta, time));
        t.record(dev, || format!("beta = {b}, eta = {eta}, t = {time}"));
    }
    out.push(t.done());

    let mut t = Tracker::new(s, "quadrature moments match the closed form", tol_or(tol, 1e-3));
    let nodes = geometric_nodes(1e-6, 1e14, 16);
    for &a in &[1.2, 1.5, 1.8] {
        for &b in &[0.6, 0.9, 1.0] {
            let field = green_field(a, b, 1.0, 1.0, &nodes);
            for &d in &[0.1, 0.5, 0.9 * a] {
                let dev = (|| {
                    let f = field.as_ref().map_err(Clone::clone)?;
                    let q = moment_quadrature(f, d)?;
                    let c = moment_closed_form(&MomentQuery::new(d, a, b, 1.0, 1.0)?)?;
                    Ok((q - c).abs() / c.abs())
                })();
                t.record(dev, || format!("delta = {d}, alpha = {a}, beta = {b}"));
            }
        }
    }
    out.push(t.done());

    let mut t = Tracker::new(s, "quadrature MSD of the alpha = 2 field", tol_or(tol, 1e-3));
    let nodes = geometric_nodes(1e-6, 60.0, 40);
    for &(b, eta, time) in &[(1.0, 1.0, 1.0), (0.6, 1.0, 2.0), (0.9, 0.5, 1.0)] {
        let dev = (|| {
            let f = green_field(2.0, b, eta, time, &nodes)?;
            let m = moment_quadrature(&f, 2.0)?;
            Ok((m - msd_classical(b, eta, time)).abs() / msd_classical(b, eta, time))
        })();
        t.record(dev, || format!("beta = {b}, eta = {eta}, t = {time}"));
    }
    out.push(t.done());
    out
}

pub fn asymptotics(tol: Option<f64>) -> Vec<Check> {
    let s = "asymptotics";
    let mut out = Vec::new();
    let mut t = Tracker::new(s, "beta = 1 tail decays like |x|^-(1+alpha)", tol_or(tol, 0.05));
    for &a in &[0.6, 1.0, 1.3, 1.8] {
        let dev = (|| {
            let xs = [1e3, 3e3, 1e4];
            let mut pts = Vec::new();
            for &x in &xs {
                let g = green_delta(&GreensQuery::new(a, 1.0, 1.0, x, 1.0)?)?;
                pts.push((x.ln(), g.value.ln()));
            }
            let slope = (pts[2].1 - pts[0].1) / (pts[2].0 - pts[0].0);
            Ok((slope + 1.0 + a).abs())
        })();
        t.record(dev, || format!("alpha = {a}, x in [1e3, 1e4]"));
    }
    out.push(t.done());

    let mut t = Tracker::new(s, "small-x prefactor G(1+1/a)G(1-1/a)/(pi G(b-b/a))", tol_or(tol, 1e-4));
    for &a in &[1.2, 1.5, 1.8] {
        for &b in &[0.5, 0.9, 1.0, 1.4] {
            for &(eta, time) in &[(1.0, 1.0), (0.7, 2.0)] {
                let dev = (|| {
                    let scale = (eta * f64::powf(time, b)).powf(1.0 / a);
                    let x = 1e-4 * scale;
                    let g = green_delta(&GreensQuery::new(a, b, eta, x, time)?)?;
                    let pre = gamma(1.0 + 1.0 / a)? * gamma(1.0 - 1.0 / a)?
                        / (PI * eta.powf(1.0 / a) * time.powf(1.0 + b / a - b) * gamma(b - b / a)?);
                    Ok((g.value - pre).abs() / pre)
                })();
                t.record(dev, || format!("alpha = {a}, beta = {b}, eta = {eta}, t = {time}"));
            }
        }
    }
    out.push(t.done());
    out
}

pub fn run_suite(suite: Suite, tol: Option<f64>) -> Result<Vec<Check>> {
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(Error::domain(format!("tolerance {t} must be positive")));
        }
    }
    Ok(match suite {
        Suite::Identities => identities(tol),
        Suite::Routes => routes(tol),
        Suite::Moments => moments(tol),
        Suite::Asymptotics => asymptotics(tol),
        Suite::All => {
            let mut v = identities(tol);
            v.extend(routes(tol));
            v.extend(moments(tol));
            v.extend(asymptotics(tol));
            v
        }
    })
}
