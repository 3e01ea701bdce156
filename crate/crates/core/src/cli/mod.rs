//! Command-line front end: `green`, `solve`, `moments` and `verify`.

pub mod output;
pub mod scenario;
pub mod verify;

use crate::error::{Error, Result};
use crate::moments::{
    moment_closed_form, moment_extrapolated, moment_limit_zero, moment_quadrature, MomentQuery,
};
use crate::solver::{green_delta, green_field, solve_theorem, GreensQuery};
use clap::{Args, Parser, Subcommand};
use output::{Cell, Format, Table};
use std::path::PathBuf;
use verify::{geometric_nodes, run_suite, Suite};

#[derive(Debug, Parser)]
#[command(name = "fracrd", version, about = "Space-time fractional reaction-diffusion kernels, solutions and moments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Delta-initial-data solution on a uniform x grid.
    Green {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Solve the problem described by a scenario file.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Fractional moments <|x|^delta> of the delta-initial-data solution.
    Moments {
        #[command(flatten)]
        model: ModelArgs,
        /// Moment orders, comma separated.
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        delta: Vec<f64>,
    },
    /// Run verification suites; exits with 4 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Replace every check's tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ModelArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub eta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub x_max: f64,
    /// Number of nodes; 1 evaluates at x-min only.
    #[arg(long, default_value_t = 101)]
    pub x_count: usize,
}

impl GridArgs {
    pub fn nodes(&self) -> Result<Vec<f64>> {
        if self.x_count == 1 {
            return Ok(vec![self.x_min]);
        }
        Ok(crate::solver::Grid::new(self.x_min, self.x_max, self.x_count)?.nodes())
    }
}

const FIELD_COLUMNS: [&str; 4] = ["x", "value", "err_estimate", "method"];

fn model_meta(t: &mut Table, m: &ModelArgs) {
    t.meta("alpha", m.alpha);
    t.meta("beta", m.beta);
    t.meta("eta", m.eta);
    t.meta("t", m.t);
}

pub fn run_green(model: &ModelArgs, grid: &GridArgs) -> Result<Table> {
    let mut table = Table::new(&FIELD_COLUMNS);
    model_meta(&mut table, model);
    for x in grid.nodes()? {
        let g = green_delta(&GreensQuery::new(model.alpha, model.beta, model.eta, x, model.t)?)?;
        table.rows.push(vec![
            Cell::Num(x),
            Cell::Num(g.value),
            Cell::Num(g.error),
            Cell::Text(g.method.as_str().into()),
        ]);
    }
    Ok(table)
}

pub fn run_solve_text(text: &str) -> Result<Table> {
    let s = scenario::parse_scenario(text)?;
    let field = solve_theorem(&s)?;
    let mut table = Table::new(&FIELD_COLUMNS);
    table.meta("alpha", s.alpha);
    table.meta("beta", s.beta);
    table.meta("eta", s.eta);
    table.meta("t", s.t_end);
    table.meta("count", s.grid.count);
    table.meta("err_estimate", output::sci(field.err_estimate));
    for i in 0..field.values.len() {
        table.rows.push(vec![
            Cell::Num(field.grid[i]),
            Cell::Num(field.values[i]),
            Cell::Num(field.errors[i]),
            Cell::Text(field.methods[i].as_str().into()),
        ]);
    }
    Ok(table)
}

pub fn run_solve(path: &PathBuf) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    run_solve_text(&text)
}

/// Closed form (or its limit at gamma poles) next to the quadrature of the
/// pointwise kernel on a geometric grid.
pub fn run_moments(model: &ModelArgs, deltas: &[f64]) -> Result<Table> {
    let mut table = Table::new(&["delta", "value", "err_estimate", "method"]);
    model_meta(&mut table, model);
    if model.beta > 1.0 {
        table.meta("note", "beta > 1 lies outside the range the closed form was derived for");
    }
    let scale = (model.eta * model.t.powf(model.beta)).powf(1.0 / model.alpha);
    let hi = if model.alpha == 2.0 { 60.0 } else { 1e14 };
    let nodes: Vec<f64> = geometric_nodes(1e-6, hi, 16).iter().map(|u| u * scale).collect();
    let coarse: Vec<f64> = nodes.iter().step_by(2).copied().collect();
    let field = green_field(model.alpha, model.beta, model.eta, model.t, &nodes)?;
    let half = green_field(model.alpha, model.beta, model.eta, model.t, &coarse)?;
    for &d in deltas {
        let m = MomentQuery::new(d, model.alpha, model.beta, model.eta, model.t)?;
        let even_pole = model.alpha == 2.0 && d > 0.0 && d % 2.0 == 0.0;
        let (value, method) = if d == 0.0 {
            (moment_limit_zero(m.alpha, m.beta, m.eta, m.t)?, "limit")
        } else if even_pole {
            (moment_extrapolated(&m)?, "limit")
        } else {
            (moment_closed_form(&m)?, "closed-form")
        };
        table.rows.push(vec![
            Cell::Num(d),
            Cell::Num(value),
            Cell::Num(8.0 * f64::EPSILON * value.abs()),
            Cell::Text(method.into()),
        ]);
        let q = moment_quadrature(&field, d)?;
        let q2 = moment_quadrature(&half, d)?;
        table.rows.push(vec![
            Cell::Num(d),
            Cell::Num(q),
            Cell::Num((q - q2).abs()),
            Cell::Text("quadrature".into()),
        ]);
    }
    Ok(table)
}

pub fn run_verify(suite: Suite, tol: Option<f64>) -> Result<(Table, Vec<verify::Check>)> {
    let checks = run_suite(suite, tol)?;
    let mut table = Table::new(&["suite", "check", "worst", "tol", "status", "case"]);
    table.meta("suite", suite.as_str());
    for c in &checks {
        table.rows.push(vec![
            Cell::Text(c.suite.into()),
            Cell::Text(c.name.clone()),
            Cell::Num(c.worst),
            Cell::Num(c.tol),
            Cell::Text(if c.passed() { "pass" } else { "FAIL" }.into()),
            Cell::Text(c.case.clone()),
        ]);
    }
    Ok((table, checks))
}

fn emit(table: &Table, cli: &Cli) -> Result<()> {
    let text = table.render(cli.format)?;
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Execute one command and write its table.
pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Green { model, grid } => emit(&run_green(model, grid)?, cli),
        Command::Solve { scenario } => emit(&run_solve(scenario)?, cli),
        Command::Moments { model, delta } => emit(&run_moments(model, delta)?, cli),
        Command::Verify { suite, tol } => {
            let (table, checks) = run_verify(*suite, *tol)?;
            emit(&table, cli)?;
            let failed: Vec<String> = checks
                .iter()
                .filter(|c| !c.passed())
                .map(|c| format!("{} / {}: worst {:e} > {:e} at {}", c.suite, c.name, c.worst, c.tol, c.case))
                .collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Error::Verification(failed.join("; ")))
            }
        }
    }
}
