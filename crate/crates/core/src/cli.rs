//! The `sumrank` command line.
//!
//! Subcommands `count`, `prob`, `scan` and `bounds` each build a report from
//! [`crate::report`] and print it as text, JSON or CSV. Exit status is 0 on
//! success, 2 for invalid input and 3 when an exhaustive check would exceed
//! the enumeration budget.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use thiserror::Error;

use crate::counting::{
    self, corollary_bound, count_rank_t, exact_prob_full_sumrank, gaussian_binomial, lower_bound_prob,
    pentagonal_lower_bound, pochhammer_partial, q_pochhammer_q, quarter_threshold_applies, CountingError,
    Scenario, DEFAULT_POCHHAMMER_TERMS,
};
use crate::field::{is_prime_power, FieldSpec};
use crate::matrix::OrderedPartition;
use crate::oracle::{self, EnumerationBudget, OracleError, DEFAULT_MAX_POINTS};
use crate::partitions::enumerate_partitions;
use crate::report::{
    decimal, exact_pair, partition_label, BoundsReport, CountReport, EstimateInfo, ExperimentReport, PochhammerInfo,
    ScanReport, ScanRow, ScenarioInfo,
};
use crate::sampling::{estimate_prob, SamplerConfig, SamplingError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Budget(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<CountingError> for CliError {
    fn from(e: CountingError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SamplingError> for CliError {
    fn from(e: SamplingError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "sumrank", version, about = "Exact and simulated full sum-rank probabilities over F_q")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Q_t values, Gaussian binomials and rank-t matrix counts.
    Count(CountArgs),
    /// Probability that a random rank-t matrix has sum-rank weight l*t.
    Prob(ProbArgs),
    /// Exact probability for every partition of n into l parts >= t.
    Scan(ScanArgs),
    /// Pentagonal and corollary bounds and the q-Pochhammer enclosure.
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub t: usize,
    /// Report the number of t-dimensional subspaces of F_q^m.
    #[arg(long)]
    pub subspaces: bool,
    /// Also count by exhaustive enumeration.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, value_name = "POINTS", default_value_t = DEFAULT_MAX_POINTS)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct ProbArgs {
    #[arg(long)]
    pub q: u64,
    /// Row count; defaults to max(t, largest part).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub t: usize,
    /// Block sizes, e.g. 2,2.
    #[arg(long, value_name = "a,b,c")]
    pub partition: String,
    /// Monte Carlo trials (0 disables simulation).
    #[arg(long, default_value_t = 0)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also compute the probability by exhaustive enumeration.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, value_name = "POINTS", default_value_t = DEFAULT_MAX_POINTS)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub ell: usize,
    #[arg(long)]
    pub t: usize,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub ell: usize,
}

fn require_prime_power(q: u64) -> Result<(), CliError> {
    if is_prime_power(q) {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{q} is not a prime power")))
    }
}

fn budget(points: u64) -> Result<EnumerationBudget, CliError> {
    EnumerationBudget::new(points).map_err(|e| CliError::Validation(e.to_string()))
}

pub fn cmd_count(args: &CountArgs) -> Result<CountReport, CliError> {
    require_prime_power(args.q)?;
    let CountArgs { q, m, t, .. } = *args;
    if args.n.is_none() && !args.subspaces {
        return Err(CliError::Validation("--n is required unless --subspaces is given".into()));
    }
    if m == 0 || args.n == Some(0) {
        return Err(CliError::Validation("dimensions must be positive".into()));
    }
    if t > m {
        return Err(CliError::Validation(format!("t = {t} exceeds m = {m}")));
    }
    if let Some(n) = args.n {
        if t > n {
            return Err(CliError::Validation(format!("t = {t} exceeds n = {n}")));
        }
    }
    let gb = gaussian_binomial(m, t, q)?;
    let rank_t = args.n.map(|n| count_rank_t(m, n, t, q)).transpose()?;
    let (mut oracle_rank, mut oracle_sub) = (None, None);
    if args.verify {
        let field = std::sync::Arc::new(FieldSpec::new(q).map_err(|e| CliError::Validation(e.to_string()))?);
        let b = budget(args.budget)?;
        if let Some(n) = args.n {
            oracle_rank = Some(oracle::brute_count_rank_t(m, n, t, &field, &b)?.to_string());
        }
        if args.subspaces {
            oracle_sub = Some(oracle::brute_count_subspaces(m, t, &field, &b)?.to_string());
        }
    }
    Ok(CountReport {
        q,
        m,
        n: args.n,
        t,
        q_t_of_q_m: q_pochhammer_q(q, m, t).to_string(),
        q_t_of_q_n: args.n.map(|n| q_pochhammer_q(q, n, t).to_string()),
        q_t_of_q_t: q_pochhammer_q(q, t, t).to_string(),
        gaussian_binomial: gb.to_string(),
        count_rank_t: rank_t.map(|c| c.to_string()),
        subspaces: args.subspaces.then(|| gb.to_string()),
        oracle_count_rank_t: oracle_rank,
        oracle_subspaces: oracle_sub,
    })
}

pub fn cmd_prob(args: &ProbArgs) -> Result<ExperimentReport, CliError> {
    require_prime_power(args.q)?;
    let partition: OrderedPartition = args
        .partition
        .parse()
        .map_err(|e: crate::matrix::MatrixError| CliError::Validation(e.to_string()))?;
    let m = args.m.unwrap_or_else(|| args.t.max(partition.max_part()));
    let s = Scenario::new(args.q, m, args.t, partition)?;
    s.check_parts()?;
    let (n, ell, t, q) = (s.n(), s.ell(), s.t, s.q);

    let exact = exact_prob_full_sumrank(&s)?;
    let lower = lower_bound_prob(n, ell, t, q)?;
    let corollary = corollary_bound(q, ell);
    let enclosure = pochhammer_partial(q, DEFAULT_POCHHAMMER_TERMS);

    let estimate = if args.trials > 0 {
        let r = estimate_prob(&s, &SamplerConfig::new(args.seed, args.trials)?)?;
        let err = (&r.estimate - &exact).abs();
        Some(EstimateInfo {
            hits: r.hits,
            trials: r.trials,
            estimate: counting::ratio_string(&r.estimate),
            estimate_decimal: decimal(&r.estimate),
            stderr: r.stderr,
            abs_error: decimal(&err),
        })
    } else {
        None
    };
    let oracle = if args.verify {
        Some(oracle::brute_conditional_prob(&s, &budget(args.budget)?)?)
    } else {
        None
    };

    let (exact_s, exact_d) = exact_pair(&exact);
    let (lower_s, lower_d) = exact_pair(&lower);
    let (cor_s, cor_d) = exact_pair(&corollary);
    Ok(ExperimentReport {
        scenario: ScenarioInfo { q, m, n, t, ell, partition: s.partition.parts().to_vec() },
        exact: exact_s,
        exact_decimal: exact_d,
        lower_bound: lower_s,
        lower_bound_decimal: lower_d,
        is_extremal: ell == 1 || t == 0 || s.partition.is_extremal_for(t),
        corollary_bound: cor_s,
        corollary_bound_decimal: cor_d,
        pochhammer: PochhammerInfo::from(&enclosure),
        estimate,
        oracle_agrees: oracle.as_ref().map(|o| o == &exact),
        oracle: oracle.as_ref().map(counting::ratio_string),
        timestamp: chrono::Utc::now().to_rfc3339(),
        seed: args.seed,
    })
}

pub fn cmd_scan(args: &ScanArgs) -> Result<ScanReport, CliError> {
    require_prime_power(args.q)?;
    let ScanArgs { q, n, ell, t } = *args;
    if ell == 0 || t == 0 || n == 0 {
        return Err(CliError::Validation("n, ell and t must be positive".into()));
    }
    if n < ell * t {
        return Err(CliError::Validation(format!("n = {n} < ell*t = {}", ell * t)));
    }
    let lower = lower_bound_prob(n, ell, t, q)?;
    let lower_s = counting::ratio_string(&lower);
    let mut rows = Vec::new();
    for p in enumerate_partitions(n, ell, t) {
        let exact = exact_prob_full_sumrank(&Scenario::new(q, t, t, p.clone())?)?;
        rows.push((exact, p));
    }
    // stable: ties keep lexicographic enumeration order
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(ScanReport {
        q,
        n,
        ell,
        t,
        rows: rows
            .into_iter()
            .map(|(exact, p)| ScanRow {
                partition: p.parts().to_vec(),
                exact_decimal: decimal(&exact),
                exact: counting::ratio_string(&exact),
                lower_bound: lower_s.clone(),
                is_extremal: p.is_extremal_for(t),
            })
            .collect(),
    })
}

pub fn cmd_bounds(args: &BoundsArgs) -> Result<BoundsReport, CliError> {
    require_prime_power(args.q)?;
    if args.ell == 0 {
        return Err(CliError::Validation("ell must be positive".into()));
    }
    let (pent_s, pent_d) = exact_pair(&pentagonal_lower_bound(args.q));
    let (cor_s, cor_d) = exact_pair(&corollary_bound(args.q, args.ell));
    Ok(BoundsReport {
        q: args.q,
        ell: args.ell,
        pentagonal_lower_bound: pent_s,
        pentagonal_lower_bound_decimal: pent_d,
        corollary_bound: cor_s,
        corollary_bound_decimal: cor_d,
        pochhammer: PochhammerInfo::from(&pochhammer_partial(args.q, DEFAULT_POCHHAMMER_TERMS)),
        quarter_threshold: quarter_threshold_applies(args.q, args.ell),
    })
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn csv_rows(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn json<T: serde::Serialize>(x: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(x).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn render_count(r: &CountReport, format: Format) -> Result<String, CliError> {
    let fields: Vec<(&str, String)> = vec![
        ("q", r.q.to_string()),
        ("m", r.m.to_string()),
        ("n", opt(&r.n)),
        ("t", r.t.to_string()),
        ("Q_t(q^m)", r.q_t_of_q_m.clone()),
        ("Q_t(q^n)", opt(&r.q_t_of_q_n)),
        ("Q_t(q^t)", r.q_t_of_q_t.clone()),
        ("gaussian_binomial", r.gaussian_binomial.clone()),
        ("count_rank_t", opt(&r.count_rank_t)),
        ("subspaces", opt(&r.subspaces)),
        ("oracle_count_rank_t", opt(&r.oracle_count_rank_t)),
        ("oracle_subspaces", opt(&r.oracle_subspaces)),
    ];
    match format {
        Format::Json => json(r),
        Format::Csv => csv_rows(
            &["quantity", "value"],
            &fields
                .into_iter()
                .filter(|(_, v)| !v.is_empty())
                .map(|(k, v)| vec![k.to_string(), v])
                .collect::<Vec<_>>(),
        ),
        Format::Text => Ok(fields
            .into_iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()),
    }
}

fn render_prob(r: &ExperimentReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(r),
        Format::Csv => {
            let est = r.estimate.as_ref();
            csv_rows(
                &[
                    "partition",
                    "exact",
                    "lower_bound",
                    "is_extremal",
                    "q",
                    "m",
                    "t",
                    "corollary_bound",
                    "pochhammer",
                    "hits",
                    "trials",
                    "estimate",
                    "stderr",
                    "oracle",
                    "seed",
                ],
                &[vec![
                    partition_label(&r.scenario.partition),
                    r.exact.clone(),
                    r.lower_bound.clone(),
                    r.is_extremal.to_string(),
                    r.scenario.q.to_string(),
                    r.scenario.m.to_string(),
                    r.scenario.t.to_string(),
                    r.corollary_bound.clone(),
                    r.pochhammer.value.clone(),
                    opt(&est.map(|e| e.hits)),
                    opt(&est.map(|e| e.trials)),
                    opt(&est.map(|e| e.estimate.clone())),
                    opt(&est.map(|e| e.stderr)),
                    opt(&r.oracle),
                    r.seed.to_string(),
                ]],
            )
        }
        Format::Text => {
            let s = &r.scenario;
            let mut out = format!(
                "scenario: q={} m={} n={} t={} l={} partition={}\n",
                s.q,
                s.m,
                s.n,
                s.t,
                s.ell,
                partition_label(&s.partition)
            );
            out += &format!("exact = {} ({})\n", r.exact, r.exact_decimal);
            out += &format!(
                "lower_bound = {} ({}){}\n",
                r.lower_bound,
                r.lower_bound_decimal,
                if r.is_extremal { " [attained: extremal partition]" } else { "" }
            );
            out += &format!("corollary_bound = {} ({})\n", r.corollary_bound, r.corollary_bound_decimal);
            out += &format!(
                "pochhammer (1/q;1/q)_inf in [{}, {}]\n",
                r.pochhammer.lower, r.pochhammer.upper
            );
            if let Some(e) = &r.estimate {
                out += &format!(
                    "estimate = {} ({}) from {} / {} trials, stderr {:.6}, |estimate - exact| = {}\n",
                    e.estimate, e.estimate_decimal, e.hits, e.trials, e.stderr, e.abs_error
                );
            }
            if let (Some(o), Some(agree)) = (&r.oracle, r.oracle_agrees) {
                out += &format!("oracle = {o} (agrees: {agree})\n");
            }
            Ok(out)
        }
    }
}

fn render_scan(r: &ScanReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(r),
        Format::Csv => csv_rows(
            &["partition", "exact", "lower_bound", "is_extremal"],
            &r.rows
                .iter()
                .map(|row| {
                    vec![
                        partition_label(&row.partition),
                        row.exact.clone(),
                        row.lower_bound.clone(),
                        row.is_extremal.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        Format::Text => {
            let mut out = format!("q={} n={} l={} t={}\n", r.q, r.n, r.ell, r.t);
            for row in &r.rows {
                out += &format!(
                    "{} {} ({}){}\n",
                    partition_label(&row.partition),
                    row.exact,
                    row.exact_decimal,
                    if row.is_extremal { " *" } else { "" }
                );
            }
            Ok(out)
        }
    }
}

fn render_bounds(r: &BoundsReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(r),
        Format::Csv => csv_rows(
            &[
                "q",
                "ell",
                "pentagonal_lower_bound",
                "corollary_bound",
                "pochhammer",
                "pochhammer_lower",
                "pochhammer_upper",
                "quarter_threshold",
            ],
            &[vec![
                r.q.to_string(),
                r.ell.to_string(),
                r.pentagonal_lower_bound.clone(),
                r.corollary_bound.clone(),
                r.pochhammer.value.clone(),
                r.pochhammer.lower.clone(),
                r.pochhammer.upper.clone(),
                r.quarter_threshold.to_string(),
            ]],
        ),
        Format::Text => Ok(format!(
            "q={} l={}\npentagonal_lower_bound = {} ({})\ncorollary_bound = {} ({})\n\
             pochhammer (1/q;1/q)_inf in [{}, {}]\nquarter_threshold (l <= q-1) = {}\n",
            r.q,
            r.ell,
            r.pentagonal_lower_bound,
            r.pentagonal_lower_bound_decimal,
            r.corollary_bound,
            r.corollary_bound_decimal,
            r.pochhammer.lower,
            r.pochhammer.upper,
            r.quarter_threshold
        )),
    }
}

/// Execute a parsed command and render its report.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Count(a) => render_count(&cmd_count(a)?, cli.format),
        Command::Prob(a) => render_prob(&cmd_prob(a)?, cli.format),
        Command::Scan(a) => render_scan(&cmd_scan(a)?, cli.format),
        Command::Bounds(a) => render_bounds(&cmd_bounds(a)?, cli.format),
    }
}

/// Parse `args` (including the program name), run, and write the report to
/// `stdout` or `--out`. Returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(rendered.as_bytes()) } else { stdout.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = execute(&cli).and_then(|text| match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
