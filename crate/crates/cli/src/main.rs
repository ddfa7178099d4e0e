//! `nradix`: numerical radius bounds from the command line.
//!
//! Exit codes: 0 success, 1 inequality violation, 2 input error,
//! 3 numerical failure.

mod report;
mod sweep;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nradix::bounds::{BoundContext, BoundId, BoundParams, Param};
use nradix::harness::{run_verification_with, VerifyConfig, VerifySummary};
use nradix::matrix::{emit_matrix, example_2x2, example_3x3, parse_matrix};
use nradix::radius::numerical_radius_with;
use nradix::spectral::operator_norm;
use nradix::{CMatrix, Exec};
use serde::Serialize;

use report::{
    csv_rows, num, param_map, records_csv, records_table, table, CsvCells, Format, ReportRecord,
};
use sweep::{Sweep, SweepParam};

#[derive(Parser)]
#[command(
    name = "nradix",
    version,
    about = "Numerical radius and a catalog of its upper bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Relative tolerance of the certified numerical radius
    #[arg(long, global = true, env = "NRADIX_TOL_RADIUS", default_value_t = 1e-9)]
    tol_radius: f64,

    /// Relative slack tolerance for inequality checks
    #[arg(long, global = true, env = "NRADIX_TOL_SLACK", default_value_t = 1e-8)]
    tol_slack: f64,

    /// Report elapsed times (makes output non-reproducible)
    #[arg(long, global = true)]
    timing: bool,

    /// Run everything on the calling thread
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every catalog bound at one parameter point
    Bounds {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Sweep one parameter and tabulate the bounds that depend on it
    Compare {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        params: ParamArgs,
        /// Sweep as name=start:stop:step with name one of t, alpha, r
        #[arg(long)]
        sweep: String,
    },
    /// Run the randomized inequality verification
    Verify {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Comma-separated matrix dimensions
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 3, 4, 5, 6, 7, 8])]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Corrupt one catalog entry (for testing the violation path)
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
    /// Print a built-in example matrix in the input JSON format
    Example { name: ExampleName },
}

#[derive(Args)]
struct InputArgs {
    /// Matrix JSON file: {"rows": m, "cols": n, "data": [[re, im], ...]}
    #[arg(long, conflicts_with = "example", required_unless_present = "example")]
    input: Option<PathBuf>,
    /// Use a built-in example matrix instead of a file
    #[arg(long)]
    example: Option<ExampleName>,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, default_value_t = 0.5)]
    t: f64,
    /// Also used as the f(λ) = λ^α exponent of TH4_POWER
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
}

impl ParamArgs {
    fn params(&self) -> BoundParams {
        BoundParams::t(self.t)
            .with_alpha(self.alpha)
            .with_r(self.r)
            .with_p(self.p)
            .with_fg_alpha(self.alpha)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleName {
    /// [[0,2,0],[0,0,3],[0,0,0]] ⊕ [1]
    #[value(name = "paper-3x3")]
    Example3x3,
    /// [[0,2],[0,0]] ⊕ [1]
    #[value(name = "paper-2x2")]
    Example2x2,
}

impl ExampleName {
    fn matrix(self) -> CMatrix {
        match self {
            ExampleName::Example3x3 => example_3x3(),
            ExampleName::Example2x2 => example_2x2(),
        }
    }
}

enum Failure {
    Input(String),
    Numerical(String),
    Violation,
}

impl From<nradix::Error> for Failure {
    fn from(e: nradix::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type CliResult = Result<String, Failure>;

fn load(input: &InputArgs) -> Result<CMatrix, Failure> {
    let a = match (&input.input, input.example) {
        (_, Some(name)) => name.matrix(),
        (Some(path), None) => {
            let bytes = std::fs::read(path)
                .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
            parse_matrix(&bytes)?
        }
        (None, None) => {
            return Err(Failure::Input(
                "one of --input or --example is required".into(),
            ))
        }
    };
    if !a.is_square() {
        return Err(Failure::Input(format!(
            "matrix must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(a)
}

struct Session {
    format: Format,
    tol_radius: f64,
    tol_slack: f64,
    timing: bool,
    exec: Exec,
}

impl Session {
    fn context(&self, a: &CMatrix) -> Result<BoundContext, Failure> {
        let tol = self.tol_radius * operator_norm(a).max(1.0);
        let w = numerical_radius_with(a, tol, self.exec)?;
        Ok(BoundContext::with_radius(a, w)?)
    }

    fn eval(
        &self,
        ctx: &BoundContext,
        id: BoundId,
        params: &BoundParams,
    ) -> Result<ReportRecord, Failure> {
        let start = Instant::now();
        let r = ctx.eval(id, params)?;
        let ms = self.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
        Ok(ReportRecord::from_result(&r, ms))
    }

    fn bounds(&self, a: &CMatrix, params: &BoundParams) -> CliResult {
        let ctx = self.context(a)?;
        let records = BoundId::ALL
            .iter()
            .map(|&id| self.eval(&ctx, id, params))
            .collect::<Result<Vec<_>, _>>()?;
        let w = ctx.radius();
        Ok(match self.format {
            Format::Json => to_json(&BoundsReport {
                w: Enclosure { lo: w.lo, hi: w.hi },
                norm: ctx.norm(),
                records: &records,
            }),
            Format::Csv => records_csv(&records),
            Format::Table => format!(
                "w(A) in [{}, {}]   ‖A‖ = {}   n = {}\n\n{}",
                num(w.lo),
                num(w.hi),
                num(ctx.norm()),
                a.rows(),
                records_table(&records)
            ),
        })
    }

    fn compare(&self, a: &CMatrix, base: &BoundParams, sweep: &Sweep) -> CliResult {
        let ctx = self.context(a)?;
        let ids: Vec<BoundId> = BoundId::ALL
            .iter()
            .copied()
            .filter(|id| {
                let req = id.required();
                match sweep.param {
                    SweepParam::T => req.contains(&Param::T),
                    SweepParam::Alpha => {
                        req.contains(&Param::Alpha) || req.contains(&Param::FgAlpha)
                    }
                    SweepParam::R => req.contains(&Param::R),
                }
            })
            .collect();
        let alpha_sweep = sweep.param == SweepParam::Alpha;
        let mut rows = Vec::new();
        for &x in &sweep.points {
            let params = match sweep.param {
                SweepParam::T => base.with_t(x),
                SweepParam::Alpha => base.with_alpha(x).with_fg_alpha(x),
                SweepParam::R => base.with_r(x),
            };
            let records = ids
                .iter()
                .map(|&id| self.eval(&ctx, id, &params))
                .collect::<Result<Vec<_>, _>>()?;
            let h = if alpha_sweep {
                Some(ctx.alpha_norm(x)?)
            } else {
                None
            };
            rows.push(CompareRow {
                param: x,
                alpha_norm: h,
                records,
            });
        }
        let minimum = if alpha_sweep {
            let (alpha, value) = ctx.min_alpha_norm(101)?;
            let lamai = self.eval(&ctx, BoundId::Lamai, base)?;
            Some(AlphaMin {
                alpha,
                value,
                lamai,
            })
        } else {
            None
        };
        let w = ctx.radius();
        let name = sweep.param.name();
        Ok(match self.format {
            Format::Json => to_json(&CompareReport {
                sweep: name,
                w: Enclosure { lo: w.lo, hi: w.hi },
                norm: ctx.norm(),
                rows: &rows,
                min_alpha_norm: minimum.as_ref(),
            }),
            Format::Csv => {
                let empty = BTreeMap::new();
                let h_params: Vec<BTreeMap<String, f64>> = rows
                    .iter()
                    .map(|r| BTreeMap::from([("alpha".to_string(), r.param)]))
                    .collect();
                let min_params = minimum
                    .as_ref()
                    .map(|m| BTreeMap::from([("alpha".to_string(), m.alpha)]));
                let mut out: Vec<CsvCells> = Vec::new();
                for (row, hp) in rows.iter().zip(&h_params) {
                    out.extend(row.records.iter().map(|r| {
                        (
                            r.id.as_str(),
                            &r.params,
                            Some(r.value),
                            Some(r.w),
                            Some(r.slack),
                        )
                    }));
                    if let Some(h) = row.alpha_norm {
                        out.push(("ALPHA_NORM", hp, Some(h), None, None));
                    }
                }
                if let (Some(m), Some(mp)) = (&minimum, &min_params) {
                    out.push(("MIN_ALPHA_NORM", mp, Some(m.value), None, None));
                    out.push((
                        m.lamai.id.as_str(),
                        &empty,
                        Some(m.lamai.value),
                        Some(m.lamai.w),
                        Some(m.lamai.slack),
                    ));
                }
                csv_rows(out)
            }
            Format::Table => {
                let mut headers: Vec<String> = vec![name.to_string()];
                headers.extend(ids.iter().map(|id| id.name().to_string()));
                if alpha_sweep {
                    headers.push("h(alpha)".into());
                }
                let body: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| {
                        let mut cells = vec![format!("{}", r.param)];
                        cells.extend(r.records.iter().map(|rec| format!("{:.9}", rec.value)));
                        if let Some(h) = r.alpha_norm {
                            cells.push(format!("{h:.9}"));
                        }
                        cells
                    })
                    .collect();
                let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
                let fixed = other_params_label(base, sweep.param);
                let mut out = format!(
                    "w(A) in [{}, {}]   ‖A‖ = {}   fixed: {fixed}\n\n",
                    num(w.lo),
                    num(w.hi),
                    num(ctx.norm())
                );
                out.push_str(&table(&header_refs, &body));
                if let Some(m) = &minimum {
                    out.push_str(&format!(
                        "\nmin h(alpha) = {} at alpha = {:.10}\nLAMAI = {} (slack {:.3e})\n",
                        num(m.value),
                        m.alpha,
                        num(m.lamai.value),
                        m.lamai.slack
                    ));
                }
                out
            }
        })
    }

    fn verify(
        &self,
        trials: usize,
        dims: Vec<usize>,
        seed: u64,
        fault: Option<String>,
    ) -> (CliResult, Option<VerifySummary>) {
        if trials > 0 && (dims.is_empty() || dims.contains(&0)) {
            return (
                Err(Failure::Input(
                    "--dims must list positive dimensions".into(),
                )),
                None,
            );
        }
        let fault = match fault.map(|f| f.parse::<BoundId>()).transpose() {
            Ok(f) => f,
            Err(e) => return (Err(e.into()), None),
        };
        let mut cfg = VerifyConfig::new(trials, dims.clone(), seed);
        cfg.slack_tol = self.tol_slack;
        cfg.exec = self.exec;
        cfg.fault = fault;
        let start = Instant::now();
        let s = run_verification_with(&cfg);
        let ms = self.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
        let text = match self.format {
            Format::Json => to_json(&VerifyReport {
                seed,
                dims: &dims,
                clean: s.is_clean(),
                elapsed_ms: ms,
                summary: &s,
            }),
            Format::Csv => {
                let empty = BTreeMap::new();
                csv_rows(
                    s.min_slack_per_bound
                        .iter()
                        .map(|(id, &m)| (id.as_str(), &empty, None, None, Some(m))),
                )
            }
            Format::Table => {
                let mut out = format!(
                    "trials {}   seed {seed}   dims {:?}\nviolations {}   chain failures {}   consistency failures {}   square-zero failures {}   lemma failures {}   numerical failures {}\n",
                    s.trials,
                    dims,
                    s.violations.len(),
                    s.chain_failures.len(),
                    s.consistency_failures.len(),
                    s.nilpotent_failures.len(),
                    s.lemma_failures.len(),
                    s.numerical_failures.len()
                );
                if let Some(ms) = ms {
                    out.push_str(&format!("elapsed {ms:.1} ms\n"));
                }
                if !s.min_slack_per_bound.is_empty() {
                    let rows: Vec<Vec<String>> = s
                        .min_slack_per_bound
                        .iter()
                        .map(|(k, v)| vec![k.clone(), format!("{v:.3e}")])
                        .collect();
                    out.push('\n');
                    out.push_str(&table(&["id", "min slack"], &rows));
                }
                out
            }
        };
        (Ok(text), Some(s))
    }
}

#[derive(Serialize)]
struct Enclosure {
    lo: f64,
    hi: f64,
}

#[derive(Serialize)]
struct BoundsReport<'a> {
    w: Enclosure,
    norm: f64,
    records: &'a [ReportRecord],
}

#[derive(Serialize)]
struct CompareReport<'a> {
    sweep: &'static str,
    w: Enclosure,
    norm: f64,
    rows: &'a [CompareRow],
    #[serde(skip_serializing_if = "Option::is_none")]
    min_alpha_norm: Option<&'a AlphaMin>,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    seed: u64,
    dims: &'a [usize],
    clean: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
    summary: &'a VerifySummary,
}

#[derive(Serialize)]
struct CompareRow {
    param: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_norm: Option<f64>,
    records: Vec<ReportRecord>,
}

#[derive(Serialize)]
struct AlphaMin {
    alpha: f64,
    value: f64,
    lamai: ReportRecord,
}

fn other_params_label(p: &BoundParams, swept: SweepParam) -> String {
    let mut m = param_map(p);
    m.remove(swept.name());
    if swept == SweepParam::Alpha {
        m.remove("fg_alpha");
    }
    m.iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn report_problems(s: &VerifySummary, seed: u64) {
    for v in &s.violations {
        eprintln!(
            "violation: {} {} slack {:.3e} in trial {} (replay: --seed {seed}, trial {}; {:?} dim {} matrix seed {} scale {})",
            v.bound,
            serde_json::to_string(&v.params).unwrap_or_default(),
            v.slack,
            v.trial,
            v.trial,
            v.spec.kind,
            v.spec.dim,
            v.spec.seed,
            v.spec.scale
        );
    }
    let groups = [
        ("chain failure", &s.chain_failures),
        ("consistency failure", &s.consistency_failures),
        ("square-zero failure", &s.nilpotent_failures),
        ("lemma failure", &s.lemma_failures),
        ("numerical failure", &s.numerical_failures),
    ];
    for (label, list) in groups {
        for f in list {
            eprintln!(
                "{label}: {} in trial {} (replay: --seed {seed}, trial {}; {:?} dim {} matrix seed {})",
                f.what, f.trial, f.trial, f.spec.kind, f.spec.dim, f.spec.seed
            );
        }
    }
}

fn run(cli: Cli) -> Result<(String, ExitCode), Failure> {
    if !(cli.tol_radius > 0.0 && cli.tol_radius.is_finite())
        || !(cli.tol_slack >= 0.0 && cli.tol_slack.is_finite())
    {
        return Err(Failure::Input(
            "tolerances must be finite and positive".into(),
        ));
    }
    let session = Session {
        format: cli.format,
        tol_radius: cli.tol_radius,
        tol_slack: cli.tol_slack,
        timing: cli.timing,
        exec: if cli.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        },
    };
    match cli.command {
        Command::Bounds { input, params } => {
            let a = load(&input)?;
            Ok((session.bounds(&a, &params.params())?, ExitCode::SUCCESS))
        }
        Command::Compare {
            input,
            params,
            sweep,
        } => {
            let sweep: Sweep = sweep
                .parse()
                .map_err(|e: sweep::SweepError| Failure::Input(e.to_string()))?;
            let a = load(&input)?;
            Ok((
                session.compare(&a, &params.params(), &sweep)?,
                ExitCode::SUCCESS,
            ))
        }
        Command::Verify {
            trials,
            dims,
            seed,
            inject_fault,
        } => {
            let (text, summary) = session.verify(trials, dims, seed, inject_fault);
            let text = text?;
            let s = summary.expect("summary accompanies a successful run");
            report_problems(&s, seed);
            if !s.is_clean() {
                print!("{text}");
                return Err(Failure::Violation);
            }
            if s.trials > 0 && 2 * s.numerical_failures.len() > s.trials {
                print!("{text}");
                return Err(Failure::Numerical(format!(
                    "{} of {} trials failed numerically",
                    s.numerical_failures.len(),
                    s.trials
                )));
            }
            Ok((text, ExitCode::SUCCESS))
        }
        Command::Example { name } => {
            let mut s = emit_matrix(&name.matrix());
            s.push('\n');
            Ok((s, ExitCode::SUCCESS))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, code)) => {
            print!("{text}");
            code
        }
        Err(Failure::Violation) => ExitCode::from(1),
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
