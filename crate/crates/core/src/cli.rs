//! The `prizealloc` command line.
//!
//! Exit codes: 0 on success or pass, 1 when an axiom check fails, 2 on
//! invalid input.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{self, Tolerances};
use crate::axioms::{self, Axiom, SampleBudget, DEFAULT_SEED};
use crate::io::{
    format_number, load_prize_data, parse_rule_spec, DataFormat, Provenance, Report, ReportBody,
    Row, TableBlock,
};
use crate::model::{Competition, EventSet};
use crate::rules::{self, RuleSpec};
use crate::solver;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "prizealloc",
    version,
    about = "Prize allocation rules for rank-order competitions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Allocate an endowment among n ranked competitors.
    Allocate(AllocateArgs),
    /// Allocation tables over several competitor counts and endowments.
    Table(TableArgs),
    /// Allocation path as CSV `endowment,prize_1,…,prize_n`.
    Path(PathArgs),
    /// Check one axiom against a rule.
    Check(CheckArgs),
    /// Check every axiom against several rules.
    Matrix(MatrixArgs),
    /// Fit observed prize tables to a rule family.
    Fit(FitArgs),
    /// Classify observed prize tables.
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
pub struct AllocateArgs {
    /// Rule spec, e.g. `geometric:lambda=0.5`.
    #[arg(long)]
    pub rule: String,
    /// Competitor count(s), comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long)]
    pub endowment: f64,
    /// Print the machine-readable report.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub rule: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// `start:stop:step` or a comma-separated list.
    #[arg(long)]
    pub endowments: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    #[arg(long)]
    pub rule: String,
    #[arg(long)]
    pub n: usize,
    /// Largest endowment on the path.
    #[arg(long)]
    pub endowment: f64,
    /// Endowment step, default `0.01 · max(1, endowment)`.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Largest competitor count sampled.
    #[arg(long, default_value_t = 5)]
    pub max_n: usize,
    /// Random endowment draws added to the grid `0, 0.25, …, 10`.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Equality tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

impl BudgetArgs {
    fn budget(&self) -> SampleBudget {
        let mut grid: Vec<f64> = (0..=40).map(|k| k as f64 * 0.25).collect();
        if self.samples > 0 {
            let full = axioms::default_grid(self.seed);
            let draws: Vec<f64> = full
                .into_iter()
                .filter(|e| (e * 4.0).fract() != 0.0)
                .collect();
            grid.extend(draws.into_iter().take(self.samples));
            if self.samples > 50 {
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(1));
                grid.extend((50..self.samples).map(|_| rng.random_range(0.0..=10.0)));
            }
        }
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        SampleBudget {
            max_n: self.max_n,
            endowment_grid: grid,
            tolerance: self.tol,
            ..SampleBudget::with_seed(self.seed)
        }
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub rule: String,
    /// anonymity, order, monotonicity, lipschitz, scale-invariance or
    /// consistency.
    #[arg(long)]
    pub axiom: String,
    /// weak / winner-loser-strict / strict for order; weak / winner-strict /
    /// strict for monotonicity; full / bilateral / local / top for
    /// consistency.
    #[arg(long)]
    pub mode: Option<String>,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// Rules to check (repeatable); defaults to the bundled rule set.
    #[arg(long)]
    pub rule: Vec<String>,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Geometric,
    Proportional,
    Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Data file; `wcoop2019.json` and `pga2019.json` are bundled.
    #[arg(long)]
    pub data: PathBuf,
    /// Data format, guessed from the extension when absent.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Endowment of a CSV event (default: sum of the listed prizes).
    #[arg(long)]
    pub endowment: Option<f64>,
    /// Relative fit tolerance.
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
    /// Absolute slack in data units for rounded figures.
    #[arg(long, default_value_t = 1.0)]
    pub slack: f64,
}

impl DataArgs {
    fn load(&self) -> Result<EventSet, String> {
        let format = match self.format {
            Some(FormatArg::Csv) => DataFormat::Csv,
            Some(FormatArg::Json) => DataFormat::Json,
            None => DataFormat::from_path(&self.data).ok_or_else(|| {
                format!(
                    "cannot tell the format of {}; pass --format",
                    self.data.display()
                )
            })?,
        };
        load_prize_data(&self.data, format, self.endowment).map_err(|e| e.to_string())
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances {
            tau_fit: self.tol,
            abs_slack: self.slack,
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[command(flatten)]
    pub data: DataArgs,
    /// Also compare every prefix of each table with this rule.
    #[arg(long)]
    pub rule: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub json: bool,
}

/// Parses `start:stop:step` (inclusive) or `a,b,c`.
pub fn parse_endowments(text: &str) -> Result<Vec<f64>, String> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{s}` is not a number"))
    };
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(format!("expected start:stop:step, got `{text}`"));
        };
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if !(step.is_finite() && step > 0.0) || stop < start {
            return Err(format!("invalid range `{text}`"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=count).map(|k| start + k as f64 * step).collect()
    } else {
        text.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() || values.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(format!(
            "endowments must be non-negative numbers, got `{text}`"
        ));
    }
    Ok(values)
}

fn rule(text: &str) -> Result<RuleSpec, String> {
    parse_rule_spec(text).map_err(|e| e.to_string())
}

fn emit(out: &mut dyn Write, report: &Report) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(report).map_err(std::io::Error::other)?;
    writeln!(out, "{text}")
}

fn join(values: &[f64], sep: &str) -> String {
    values
        .iter()
        .map(|v| format_number(*v))
        .collect::<Vec<_>>()
        .join(sep)
}

enum Failure {
    Input(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Input(e)
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run_from_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli.command, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            code
        }
    }
}

/// Runs one command, writing the report to `out` and diagnostics to `err`.
pub fn run(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match command {
        Command::Allocate(a) => allocate(a, out),
        Command::Table(a) => table(a, out),
        Command::Path(a) => path(a, out),
        Command::Check(a) => check(a, out),
        Command::Matrix(a) => matrix(a, out),
        Command::Fit(a) => fit(a, out),
        Command::Classify(a) => classify(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn allocate(a: AllocateArgs, out: &mut dyn Write) -> Outcome {
    let spec = rule(&a.rule)?;
    let mut reports = Vec::new();
    for &n in &a.n {
        let comp = Competition::canonical(n, a.endowment).map_err(|e| e.to_string())?;
        let alloc = rules::allocate(&spec, &comp).map_err(|e| e.to_string())?;
        if a.json {
            reports.push(Report {
                command: "allocate".into(),
                provenance: Provenance {
                    rule: Some(spec.to_string()),
                    ..Provenance::new()
                },
                result: ReportBody::Allocation {
                    endowment: a.endowment,
                    prizes: alloc
                        .entries()
                        .iter()
                        .map(|(id, p)| (id.to_string(), *p))
                        .collect(),
                },
            });
        } else {
            writeln!(out, "{}", join(&alloc.by_position(), " "))?;
        }
    }
    for r in &reports {
        emit(out, r)?;
    }
    Ok(EXIT_OK)
}

fn table(a: TableArgs, out: &mut dyn Write) -> Outcome {
    let spec = rule(&a.rule)?;
    let endowments = parse_endowments(&a.endowments)?;
    let cfg = solver::SolverConfig::default();
    let mut blocks = Vec::new();
    for &n in &a.n {
        if n == 0 {
            return Err(Failure::Input(
                "competitor counts must be at least 1".into(),
            ));
        }
        let rows = endowments
            .iter()
            .map(|&e| {
                rules::prizes_by_position(&spec, n, e, &cfg)
                    .map(|prizes| Row {
                        endowment: e,
                        prizes,
                    })
                    .map_err(|err| err.to_string())
            })
            .collect::<Result<Vec<_>, _>>()?;
        blocks.push(TableBlock { n, rows });
    }
    if a.json {
        let report = Report {
            command: "table".into(),
            provenance: Provenance {
                rule: Some(spec.to_string()),
                ..Provenance::new()
            },
            result: ReportBody::Table { blocks },
        };
        emit(out, &report)?;
        return Ok(EXIT_OK);
    }
    writeln!(out, "# rule {spec}")?;
    for (k, block) in blocks.iter().enumerate() {
        if k > 0 {
            writeln!(out)?;
        }
        writeln!(out, "n={}", block.n)?;
        let header: Vec<String> = (1..=block.n).map(|i| format!("phi_{i}")).collect();
        writeln!(out, "{}\tE", header.join("\t"))?;
        for row in &block.rows {
            writeln!(
                out,
                "{}\t{}",
                join(&row.prizes, "\t"),
                format_number(row.endowment)
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn path(a: PathArgs, out: &mut dyn Write) -> Outcome {
    let spec = rule(&a.rule)?;
    let step = a.step.unwrap_or_else(|| solver::default_step(a.endowment));
    let trace = solver::trace_path(&spec, a.n, a.endowment, step).map_err(|e| e.to_string())?;
    let samples: Vec<Row> = (&trace).into();
    if a.json {
        let report = Report {
            command: "path".into(),
            provenance: Provenance {
                rule: Some(spec.to_string()),
                ..Provenance::new()
            },
            result: ReportBody::Path { n: a.n, samples },
        };
        emit(out, &report)?;
        return Ok(EXIT_OK);
    }
    let header: Vec<String> = (1..=a.n).map(|i| format!("prize_{i}")).collect();
    writeln!(out, "endowment,{}", header.join(","))?;
    for row in &samples {
        writeln!(
            out,
            "{},{}",
            format_number(row.endowment),
            join(&row.prizes, ",")
        )?;
    }
    Ok(EXIT_OK)
}

fn budget_line(b: &SampleBudget) -> String {
    format!(
        "budget: n = 1..{}, {} endowments in [0, {}], seed {}, tolerance {:e}",
        b.max_n,
        b.endowment_grid.len(),
        format_number(b.endowment_grid.last().copied().unwrap_or(0.0)),
        b.rng_seed,
        b.tolerance
    )
}

fn check(a: CheckArgs, out: &mut dyn Write) -> Outcome {
    let spec = rule(&a.rule)?;
    let axiom = Axiom::from_parts(&a.axiom, a.mode.as_deref()).map_err(|e| e.to_string())?;
    let budget = a.budget.budget();
    let verdict = axioms::check(&spec, axiom, &budget).map_err(|e| e.to_string())?;
    let code = if verdict.failed() { EXIT_FAIL } else { EXIT_OK };
    if a.json {
        let report = Report {
            command: "check".into(),
            provenance: Provenance {
                rule: Some(spec.to_string()),
                seed: Some(budget.rng_seed),
                budget: Some(budget),
                ..Provenance::new()
            },
            result: ReportBody::Check { verdict },
        };
        emit(out, &report)?;
    } else {
        writeln!(out, "{verdict}")?;
        writeln!(out, "{}", budget_line(&budget))?;
    }
    Ok(code)
}

fn matrix(a: MatrixArgs, out: &mut dyn Write) -> Outcome {
    let rules_to_check: Vec<(String, RuleSpec)> = if a.rule.is_empty() {
        rules::bundled()
    } else {
        a.rule
            .iter()
            .map(|text| rule(text).map(|r| (r.to_string(), r)))
            .collect::<Result<_, _>>()?
    };
    let budget = a.budget.budget();
    let matrix = axioms::run_axiom_matrix(&rules_to_check, &budget).map_err(|e| e.to_string())?;
    let any_fail = matrix
        .rows
        .iter()
        .any(|(_, v)| v.iter().any(|v| v.failed()));
    if a.json {
        let report = Report {
            command: "matrix".into(),
            provenance: Provenance {
                seed: Some(budget.rng_seed),
                budget: Some(budget),
                ..Provenance::new()
            },
            result: ReportBody::Matrix { matrix },
        };
        emit(out, &report)?;
    } else {
        write!(out, "{}", matrix.render())?;
        writeln!(out, "{}", budget_line(&budget))?;
        for (_, verdicts) in &matrix.rows {
            for v in verdicts.iter().filter(|v| v.failed()) {
                writeln!(out, "\n{v}")?;
            }
        }
    }
    Ok(if any_fail { EXIT_FAIL } else { EXIT_OK })
}

fn fit(a: FitArgs, out: &mut dyn Write) -> Outcome {
    let events = a.data.load()?;
    let tol = a.data.tolerances();
    let err = |e: analysis::AnalysisError| e.to_string();
    let reports = match a.family {
        Family::Geometric => events
            .events
            .iter()
            .map(|t| analysis::fit_geometric(t, tol.tau_fit).map_err(err))
            .collect::<Result<Vec<_>, _>>()?,
        Family::Interval => events
            .events
            .iter()
            .map(|t| analysis::detect_interval_pattern(t, tol.tau_fit).map_err(err))
            .collect::<Result<Vec<_>, _>>()?,
        Family::Proportional => vec![analysis::fit_proportional(&events, &tol).map_err(err)?],
    };
    let spec = a.rule.as_deref().map(rule).transpose()?;
    let prefix_checks = match &spec {
        Some(r) => events
            .events
            .iter()
            .map(|t| analysis::check_data_top_consistency(t, r, &tol).map_err(err))
            .collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    let code = if prefix_checks.iter().all(|c| c.passed()) {
        EXIT_OK
    } else {
        EXIT_FAIL
    };
    if a.json {
        let report = Report {
            command: "fit".into(),
            provenance: Provenance {
                rule: spec.map(|r| r.to_string()),
                tolerances: Some(tol),
                data: Some(a.data.data.display().to_string()),
                ..Provenance::new()
            },
            result: ReportBody::Fit {
                reports,
                prefix_checks,
            },
        };
        emit(out, &report)?;
        return Ok(code);
    }
    let names: Vec<&str> = events.events.iter().map(|t| t.name.as_str()).collect();
    if a.family == Family::Proportional {
        writeln!(out, "events: {}", names.join("; "))?;
        writeln!(out, "{}", reports[0])?;
        if let analysis::FitParams::Proportional { shares } = &reports[0].params {
            for t in &events.events {
                let rebuilt: Vec<f64> = shares.iter().map(|s| s / 100.0 * t.endowment).collect();
                writeln!(out, "  reconstructed {}: {}", t.name, join(&rebuilt, " "))?;
            }
        }
    } else {
        for (name, r) in names.iter().zip(&reports) {
            writeln!(out, "{name}\n{r}")?;
        }
    }
    for c in &prefix_checks {
        match c.first_failure {
            None => writeln!(out, "{}: every prefix reproduced by {}", c.table, c.rule)?,
            Some(m) => writeln!(
                out,
                "{}: prefix of length {m} not reproduced by {} (max relative deviation {:.4})",
                c.table,
                c.rule,
                c.prefixes[m - 1].max_rel_dev
            )?,
        }
    }
    Ok(code)
}

fn classify(a: ClassifyArgs, out: &mut dyn Write) -> Outcome {
    let events = a.data.load()?;
    let tol = a.data.tolerances();
    let c = analysis::classify(&events, &tol).map_err(|e| e.to_string())?;
    let names: Vec<String> = events.events.iter().map(|t| t.name.clone()).collect();
    if a.json {
        let report = Report {
            command: "classify".into(),
            provenance: Provenance {
                tolerances: Some(tol),
                data: Some(a.data.data.display().to_string()),
                ..Provenance::new()
            },
            result: ReportBody::Classify {
                events: names,
                classification: Box::new(c),
            },
        };
        emit(out, &report)?;
        return Ok(EXIT_OK);
    }
    writeln!(out, "events: {}", names.join("; "))?;
    writeln!(out, "order preserved: {}", c.order_preserved)?;
    writeln!(out, "{}", c.geometric)?;
    writeln!(out, "{}", c.proportional)?;
    writeln!(out, "{}", c.interval_pattern)?;
    if let Some(s) = &c.scale_invariant_across_events {
        writeln!(out, "{s}")?;
    }
    writeln!(
        out,
        "tier: {} (shape only, not a proof of the axiom)",
        c.tier
    )?;
    Ok(EXIT_OK)
}
