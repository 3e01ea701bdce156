//! Scenario files: TOML with `[model]`, `[grid]`, `[initial]` and
//! `[source]` tables.
//!
//! ```text
//! [model]
//! alpha = 1.5
//! beta = 0.9
//! eta = 1.0
//! t = 1.0
//!
//! [grid]
//! x_min = -40.0
//! x_max = 40.0
//! count = 512
//!
//! [initial]
//! f = "gaussian:0.5"      # or "delta", "delta:x0", "box:w", "zero", or [v0, v1, ...]
//!
//! [source]
//! spatial = "box:2"
//! profile = "exp:0.5"     # "constant", "exp:rate" or "power:exponent"
//! ```

use crate::error::{Error, Result};
use crate::solver::{Grid, InitialData, Scenario, Source, TimeProfile};
use serde::Deserialize;
use std::f64::consts::PI;
use std::ops::Range;
use toml::Spanned;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    model: Model,
    grid: GridTable,
    #[serde(default)]
    initial: Initial,
    source: Option<SourceTable>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Model {
    alpha: f64,
    beta: f64,
    eta: f64,
    t: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridTable {
    x_min: f64,
    x_max: f64,
    count: Spanned<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Initial {
    f: Option<Spanned<Data>>,
    g: Option<Spanned<Data>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceTable {
    spatial: Spanned<Data>,
    profile: Option<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Data {
    Preset(String),
    Table(Vec<f64>),
}

/// 1-based line and column of a byte offset.
fn locate(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

fn parse_error(text: &str, span: Option<Range<usize>>, message: impl Into<String>) -> Error {
    let (line, column) = span.map_or((0, 0), |s| locate(text, s.start));
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn number(text: &str, span: &Range<usize>, s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| parse_error(text, Some(span.clone()), format!("{what}: '{s}' is not a number")))
}

fn initial_data(text: &str, d: &Spanned<Data>, grid: &Grid) -> Result<InitialData> {
    let span = d.span();
    let nodes = grid.nodes();
    match d.get_ref() {
        Data::Table(v) => {
            if v.len() != grid.count {
                return Err(parse_error(
                    text,
                    Some(span),
                    format!("sample table has {} values, grid has {}", v.len(), grid.count),
                ));
            }
            Ok(InitialData::Samples(v.clone()))
        }
        Data::Preset(p) => {
            let (name, arg) = match p.split_once(':') {
                Some((n, a)) => (n.trim(), Some(a)),
                None => (p.trim(), None),
            };
            match (name, arg) {
                ("zero", None) => Ok(InitialData::Zero),
                ("delta", None) => Ok(InitialData::Delta { at: 0.0 }),
                ("delta", Some(a)) => Ok(InitialData::Delta {
                    at: number(text, &span, a, "delta position")?,
                }),
                ("gaussian", Some(a)) => {
                    let s = number(text, &span, a, "gaussian width")?;
                    if !(s > 0.0) {
                        return Err(parse_error(text, Some(span), "gaussian width must be positive"));
                    }
                    let c = 1.0 / (s * (2.0 * PI).sqrt());
                    Ok(InitialData::Samples(
                        nodes.iter().map(|x| c * (-x * x / (2.0 * s * s)).exp()).collect(),
                    ))
                }
                ("box", Some(a)) => {
                    let w = number(text, &span, a, "box width")?;
                    if !(w > 0.0) {
                        return Err(parse_error(text, Some(span), "box width must be positive"));
                    }
                    Ok(InitialData::Samples(
                        nodes
                            .iter()
                            .map(|x| if x.abs() <= 0.5 * w { 1.0 / w } else { 0.0 })
                            .collect(),
                    ))
                }
                _ => Err(parse_error(
                    text,
                    Some(span),
                    format!("unknown initial data '{p}' (expected zero, delta[:x0], gaussian:s, box:w or a table)"),
                )),
            }
        }
    }
}

fn profile(text: &str, p: &Spanned<String>) -> Result<TimeProfile> {
    let span = p.span();
    let s = p.get_ref().trim();
    match s.split_once(':') {
        None if s == "constant" => Ok(TimeProfile::Constant),
        Some(("exp", a)) => Ok(TimeProfile::Exponential {
            rate: number(text, &span, a, "exponential rate")?,
        }),
        Some(("power", a)) => Ok(TimeProfile::Power {
            exponent: number(text, &span, a, "power exponent")?,
        }),
        _ => Err(parse_error(
            text,
            Some(span),
            format!("unknown time profile '{s}' (expected constant, exp:rate or power:exponent)"),
        )),
    }
}

/// Parse and validate a scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let file: File = toml::from_str(text).map_err(|e| parse_error(text, e.span(), e.message().trim()))?;
    let count = &file.grid.count;
    let grid = Grid::new(file.grid.x_min, file.grid.x_max, *count.get_ref())
        .map_err(|e| parse_error(text, Some(count.span()), e.to_string()))?;
    let f = match &file.initial.f {
        Some(d) => initial_data(text, d, &grid)?,
        None => InitialData::Zero,
    };
    let g = match &file.initial.g {
        Some(d) => initial_data(text, d, &grid)?,
        None => InitialData::Zero,
    };
    let source = match &file.source {
        None => Source::None,
        Some(s) => {
            let spatial = match initial_data(text, &s.spatial, &grid)? {
                InitialData::Samples(v) => v,
                InitialData::Zero => vec![0.0; grid.count],
                InitialData::Delta { .. } => {
                    return Err(parse_error(
                        text,
                        Some(s.spatial.span()),
                        "a point source needs a sampled profile; use gaussian:s or box:w",
                    ))
                }
            };
            let profile = match &s.profile {
                Some(p) => profile(text, p)?,
                None => TimeProfile::Constant,
            };
            Source::Separable { spatial, profile }
        }
    };
    let m = file.model;
    let scenario = Scenario {
        alpha: m.alpha,
        beta: m.beta,
        eta: m.eta,
        grid,
        f,
        g,
        source,
        t_end: m.t,
    };
    scenario.validate()?;
    Ok(scenario)
}
