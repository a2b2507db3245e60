//! Command-line surface and the CSV/JSON writers behind it.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::{sweep_grid, transversality_check, SweepResult};
use crate::criteria::{
    appendix_c_report, make_challenger, overtakes, sum_criterion_def2, sum_criterion_def3,
    terminal_term_limit, theorem_condition_ratio, CriteriaConfig, CriterionReport, Strategy,
};
use crate::error::{Error, Result};
use crate::finite_solver::{
    solve_closed_form, solve_dp_oracle, solve_policy_recursion, FiniteSolution, PolicyRecursion,
    SolveMethod,
};
use crate::limit_engine::{limit_closed_form, limit_numeric, LimitPath};
use crate::model::{make_growth_model, GrowthParams, Path, ProblemSpec};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;

/// A full, serializable description of one run.
#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[command(
    name = "horizon",
    version,
    about = "Finite-horizon optima of the one-sector growth model, their limit, and optimality checks"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Args, Serialize, Deserialize)]
pub struct ParamArgs {
    /// Output elasticity, in (0, 1).
    #[arg(long)]
    pub alpha: f64,
    /// Discount factor, in (0, 1/alpha).
    #[arg(long)]
    pub beta: f64,
    /// Initial capital, in (0, 1).
    #[arg(long)]
    pub k0: f64,
}

impl ParamArgs {
    pub fn validate(&self) -> Result<GrowthParams> {
        GrowthParams::new(self.alpha, self.beta, self.k0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Args, Serialize, Deserialize)]
pub struct ToleranceArgs {
    /// Threshold for limit-is-zero checks.
    #[arg(long, default_value_t = 1e-6)]
    pub zero_tol: f64,
    /// Successive-difference threshold for convergence.
    #[arg(long, default_value_t = 1e-8)]
    pub cauchy_tol: f64,
    /// Leading values dropped before tail statistics.
    #[arg(long, default_value_t = 5)]
    pub burn_in: usize,
}

impl ToleranceArgs {
    pub fn config(&self) -> CriteriaConfig {
        CriteriaConfig {
            zero_tol: self.zero_tol,
            cauchy_tol: self.cauchy_tol,
            burn_in: self.burn_in,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Recursion,
    ClosedForm,
    DpOracle,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Optimal path for a finite horizon.
    Solve {
        #[command(flatten)]
        params: ParamArgs,
        /// Horizon.
        #[arg(long = "T")]
        horizon: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Recursion)]
        method: MethodArg,
        /// Grid size for the DP oracle.
        #[arg(long, default_value_t = 4001)]
        grid: usize,
    },
    /// Limit path through `t_max`.
    Limit {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        t_max: usize,
        /// Extract the limit from finite solutions instead of the closed form.
        #[arg(long)]
        numeric: bool,
        /// Cauchy tolerance for the numeric limit.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Ratio condition, convergence, terminal-term and transversality checks (JSON).
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        t_max: usize,
        #[command(flatten)]
        tolerances: ToleranceArgs,
    },
    /// Compare challengers against the limit path (JSON).
    Compare {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        t_max: usize,
        /// `constant-saving:S`, `greedy:EPS` or `perturb-limit:DELTA:T_STAR`; repeatable.
        #[arg(long = "challenger", required = true)]
        challengers: Vec<String>,
        #[command(flatten)]
        tolerances: ToleranceArgs,
    },
    /// Steady states over an (alpha, beta) grid.
    Sweep {
        /// Comma-separated output elasticities.
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<f64>,
        /// Comma-separated discount factors.
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
        #[arg(long, default_value_t = 0.3)]
        k0: f64,
    },
}

/// One line of a path table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathRow {
    pub t: usize,
    pub k: f64,
    pub c: f64,
    pub lambda: f64,
    pub u: f64,
}

pub const PATH_HEADER: [&str; 5] = ["t", "k", "c", "lambda", "u"];

pub fn path_rows(spec: &ProblemSpec, path: &Path) -> Vec<PathRow> {
    path.points()
        .iter()
        .map(|p| PathRow {
            t: p.t,
            k: p.k,
            c: p.c,
            lambda: 1.0 / p.c,
            u: spec.gain(p.t, p.c, p.k),
        })
        .collect()
}

/// Shortest round-trip form, switching to exponent notation at the extremes.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// CSV with header `t,k,c,lambda,u`; floats in shortest round-trip form.
pub fn write_path_csv<W: Write>(out: W, rows: &[PathRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PATH_HEADER).map_err(csv_error)?;
    for r in rows {
        w.write_record([r.t.to_string(), num(r.k), num(r.c), num(r.lambda), num(r.u)])
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_path_csv<R: Read>(input: R) -> Result<Vec<PathRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_error)?;
    if header.iter().ne(PATH_HEADER) {
        return Err(Error::Io(format!("unexpected header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

#[derive(Debug, Clone, Serialize)]
struct ParamsOut {
    alpha: f64,
    beta: f64,
    k0: f64,
}

impl From<&GrowthParams> for ParamsOut {
    fn from(p: &GrowthParams) -> Self {
        Self {
            alpha: p.alpha(),
            beta: p.beta(),
            k0: p.k0(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct CheckOut<'a> {
    name: &'a str,
    pass: bool,
    applicable: bool,
    tolerance: f64,
    estimate: f64,
    window: Option<(usize, usize)>,
    notes: &'a [String],
}

impl<'a> From<&'a CriterionReport> for CheckOut<'a> {
    fn from(r: &'a CriterionReport) -> Self {
        Self {
            name: &r.name,
            pass: r.pass,
            applicable: r.applicable,
            tolerance: r.tolerance,
            estimate: r.estimate,
            window: r.window(),
            notes: &r.notes,
        }
    }
}

#[derive(Serialize)]
struct PathReport<'a> {
    params: ParamsOut,
    method: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    objective: Option<f64>,
    rows: &'a [PathRow],
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    params: ParamsOut,
    method: &'a str,
    t_max: usize,
    checks: Vec<CheckOut<'a>>,
}

#[derive(Serialize)]
struct ChallengerOut<'a> {
    challenger: String,
    checks: Vec<CheckOut<'a>>,
}

#[derive(Serialize)]
struct CompareReport<'a> {
    params: ParamsOut,
    method: &'a str,
    t_max: usize,
    challengers: Vec<ChallengerOut<'a>>,
}

fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn method_name(method: SolveMethod) -> &'static str {
    match method {
        SolveMethod::Recursion => "recursion",
        SolveMethod::ClosedForm => "closed-form",
        SolveMethod::DpOracle => "dp-oracle",
    }
}

fn write_sweep<W: Write>(out: W, format: Format, sweep: &SweepResult) -> Result<()> {
    if format == Format::Json {
        return write_json(out, sweep);
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "alpha",
        "beta",
        "k_inf",
        "c_inf",
        "lambda_inf",
        "feasible",
        "formula_level",
        "domain_breach",
        "monotonicity",
    ])
    .map_err(csv_error)?;
    for c in &sweep.cells {
        let mono = match c.monotonicity {
            Some(m) => serde_json::to_value(m)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default(),
            None => String::new(),
        };
        w.write_record([
            num(c.alpha),
            num(c.beta),
            num(c.steady.k_inf),
            num(c.steady.c_inf),
            num(c.steady.lambda_inf),
            c.feasible.to_string(),
            c.formula_level.to_string(),
            c.domain_breach.to_string(),
            mono,
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn solve(
    params: &GrowthParams,
    horizon: usize,
    method: MethodArg,
    grid: usize,
) -> Result<FiniteSolution> {
    match method {
        MethodArg::Recursion => Ok(solve_policy_recursion(params, horizon)),
        MethodArg::ClosedForm => solve_closed_form(params, horizon),
        MethodArg::DpOracle => solve_dp_oracle(&make_growth_model(params), horizon, grid),
    }
}

fn write_path<W: Write>(
    out: W,
    format: Format,
    params: &GrowthParams,
    method: &str,
    objective: Option<f64>,
    path: &Path,
) -> Result<()> {
    let rows = path_rows(&make_growth_model(params), path);
    match format {
        Format::Csv => write_path_csv(out, &rows),
        Format::Json => write_json(
            out,
            &PathReport {
                params: params.into(),
                method,
                objective,
                rows: &rows,
            },
        ),
    }
}

/// Runs `config`, writing its artifact to `out`. Returns whether every check passed.
pub fn dispatch_to<W: Write>(config: &RunConfig, out: W) -> Result<bool> {
    match &config.command {
        Command::Solve {
            params,
            horizon,
            method,
            grid,
        } => {
            let p = params.validate()?;
            let sol = solve(&p, *horizon, *method, *grid)?;
            write_path(
                out,
                config.format,
                &p,
                method_name(sol.method),
                Some(sol.objective),
                &sol.path,
            )?;
            Ok(true)
        }
        Command::Limit {
            params,
            t_max,
            numeric,
            tol,
        } => {
            let p = params.validate()?;
            let limit = if *numeric {
                limit_numeric(&make_growth_model(&p), &PolicyRecursion(p), *t_max, *tol)?
            } else {
                limit_closed_form(&p)
            };
            let method = match limit {
                LimitPath::ClosedForm(_) => "closed-form",
                LimitPath::Numeric(_) => "numeric",
            };
            write_path(
                out,
                config.format,
                &p,
                method,
                None,
                &limit.to_path(*t_max)?,
            )?;
            Ok(true)
        }
        Command::Verify {
            params,
            t_max,
            tolerances,
        } => {
            let p = params.validate()?;
            let cfg = tolerances.config();
            let limit = limit_closed_form(&p).to_path(*t_max)?;
            let reports = [
                theorem_condition_ratio(&p, *t_max, &cfg)?,
                appendix_c_report(&p, *t_max, &cfg)?,
                terminal_term_limit(&p, &limit, *t_max, &cfg)?,
                transversality_check(&p, *t_max),
            ];
            let pass = reports.iter().all(|r| r.pass || !r.applicable);
            write_json(
                out,
                &VerifyReport {
                    params: (&p).into(),
                    method: method_name(SolveMethod::Recursion),
                    t_max: *t_max,
                    checks: reports.iter().map(CheckOut::from).collect(),
                },
            )?;
            Ok(pass)
        }
        Command::Compare {
            params,
            t_max,
            challengers,
            tolerances,
        } => {
            let p = params.validate()?;
            let cfg = tolerances.config();
            let spec = make_growth_model(&p);
            let limit = limit_closed_form(&p).to_path(*t_max + 1)?;
            let mut all = Vec::with_capacity(challengers.len());
            for desc in challengers {
                let strategy: Strategy = desc.parse()?;
                let ch = make_challenger(&spec, &strategy, *t_max, Some(&limit))?;
                all.push((
                    strategy.to_string(),
                    [
                        overtakes(&spec, &ch, &limit, *t_max, &cfg)?,
                        sum_criterion_def2(&spec, &ch, &limit, *t_max, &cfg)?,
                        sum_criterion_def3(&spec, &ch, &limit, *t_max, &cfg)?,
                    ],
                ));
            }
            let pass = all.iter().all(|(_, rs)| rs.iter().all(|r| r.pass));
            write_json(
                out,
                &CompareReport {
                    params: (&p).into(),
                    method: "closed-form",
                    t_max: *t_max,
                    challengers: all
                        .iter()
                        .map(|(name, rs)| ChallengerOut {
                            challenger: name.clone(),
                            checks: rs.iter().map(CheckOut::from).collect(),
                        })
                        .collect(),
                },
            )?;
            Ok(pass)
        }
        Command::Sweep { alphas, betas, k0 } => {
            write_sweep(out, config.format, &sweep_grid(alphas, betas, *k0)?)?;
            Ok(true)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::ParameterOutOfRange(_) | Error::Domain(_) | Error::InfeasibleStrategy { .. } => {
            EXIT_INVALID_INPUT
        }
        _ => EXIT_CHECK_FAILED,
    }
}

/// Runs `config` against its configured output and maps the outcome to an exit code.
pub fn dispatch(config: &RunConfig) -> i32 {
    let result = match &config.out {
        Some(path) => File::create(path)
            .map_err(Error::from)
            .and_then(|f| dispatch_to(config, BufWriter::new(f))),
        None => dispatch_to(config, io::stdout().lock()),
    };
    match result {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Parses arguments and dispatches; usage errors exit with [`EXIT_INVALID_INPUT`].
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(config) => dispatch(&config),
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID_INPUT
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("horizon").chain(args.iter().copied())).unwrap()
    }

    fn output(args: &[&str]) -> (Result<bool>, String) {
        let mut buf = Vec::new();
        let r = dispatch_to(&parse(args), &mut buf);
        (r, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn two_period_solution_as_csv() {
        let (r, text) = output(&[
            "solve", "--alpha", "0.5", "--beta", "1", "--k0", "0.25", "--T", "1",
        ]);
        assert!(r.unwrap());
        let rows = read_path_csv(text.as_bytes()).unwrap();
        assert!(text.starts_with("t,k,c,lambda,u\n") && text.ends_with('\n'));
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].k, 0.25);
        assert!((rows[0].c - 1.0 / 3.0).abs() < 1e-12);
        assert!((rows[1].k - 1.0 / 6.0).abs() < 1e-12);
        assert!((rows[1].c - (1.0f64 / 6.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trips() {
        let p = GrowthParams::new(0.3, 0.9, 0.7).unwrap();
        let sol = solve_policy_recursion(&p, 40);
        let rows = path_rows(&make_growth_model(&p), &sol.path);
        let mut buf = Vec::new();
        write_path_csv(&mut buf, &rows).unwrap();
        assert_eq!(read_path_csv(buf.as_slice()).unwrap(), rows);
        assert!(read_path_csv("t,k,c\n0,1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn steady_start_gives_flat_capital() {
        let (_, text) = output(&[
            "limit", "--alpha", "0.5", "--beta", "1", "--k0", "0.25", "--t-max", "20",
        ]);
        let rows = read_path_csv(text.as_bytes()).unwrap();
        assert!(rows.iter().all(|r| r.k == 0.25));
    }

    #[test]
    fn invalid_parameters_name_the_constraint() {
        let (r, _) = output(&[
            "solve", "--alpha", "0.5", "--beta", "2.5", "--k0", "0.3", "--T", "3",
        ]);
        let e = r.unwrap_err();
        assert!(e.to_string().contains("beta must lie in (0, 1/alpha)"));
        assert_eq!(exit_code_for(&e), EXIT_INVALID_INPUT);
    }

    #[test]
    fn sweep_has_one_row_per_cell() {
        let (_, text) = output(&["sweep", "--alphas", "0.5,0.99", "--betas", "0.9,1.05"]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].starts_with("alpha,beta,k_inf,c_inf,lambda_inf,feasible"));
        assert!(lines[4].starts_with("0.99,1.05,") && lines[4].contains(",false,true,true,"));
    }

    #[test]
    fn compare_reports_every_challenger() {
        let (r, text) = output(&[
            "compare",
            "--alpha",
            "0.5",
            "--beta",
            "0.9",
            "--k0",
            "0.3",
            "--t-max",
            "60",
            "--challenger",
            "greedy:1e-6",
            "--challenger",
            "constant-saving:0.2",
        ]);
        assert!(r.unwrap());
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["challengers"].as_array().unwrap().len(), 2);
        assert_eq!(v["challengers"][0]["checks"][0]["name"], "overtaking");
    }

    #[test]
    fn config_serializes() {
        let c = parse(&[
            "verify", "--alpha", "0.5", "--beta", "0.9", "--k0", "0.3", "--t-max", "50",
            "--format", "json",
        ]);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), c);
    }
}
