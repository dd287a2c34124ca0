//! `dualrisk`: ruin, dividend and gain-count analytics for the Erlang(n)
//! dual risk model, with a Monte Carlo cross-check and built-in reference
//! tables.
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical failure,
//! 4 reference-table mismatch beyond tolerance.

use clap::{Args, Parser, Subcommand};
use dualrisk_cli::output::{Cell, Table};
use dualrisk_cli::{figures, tables};
use dualrisk_core::counts::{self, GainCountChain, TargetCountChain};
use dualrisk_core::divdist::DividendDistribution;
use dualrisk_core::dividends;
use dualrisk_core::{ruin, CoreError, ModelSpec};
use dualrisk_sim as sim;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dualrisk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,

    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args, Clone)]
struct SpecArg {
    /// Model file (JSON: {n, lambda, c, delta, barrier, gains: [{weight, rate, shape}]}).
    /// Defaults to the built-in Erlang-gain model with c = 1.
    #[arg(long)]
    spec: Option<std::path::PathBuf>,

    /// Override the dividend barrier from the model file.
    #[arg(long)]
    barrier: Option<f64>,

    /// Override the interest force from the model file.
    #[arg(long)]
    delta: Option<f64>,
}

impl SpecArg {
    fn load(&self) -> Result<ModelSpec, CliError> {
        let mut spec = match &self.spec {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Validation(format!("cannot read {path:?}: {e}")))?;
                let spec: ModelSpec = serde_json::from_str(&text)
                    .map_err(|e| CliError::Validation(format!("invalid model file: {e}")))?;
                spec.validate().map_err(CliError::from)?;
                spec
            }
            None => tables::erlang_spec(1.0, None),
        };
        if let Some(b) = self.barrier {
            spec = spec.with_barrier(b);
        }
        if let Some(d) = self.delta {
            spec = spec.with_delta(d);
        }
        Ok(spec)
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}")))
        .collect()
}

#[derive(Subcommand)]
enum Command {
    /// Laplace transform of the ruin time psi(u, delta), or the ultimate
    /// ruin probability when delta = 0.
    Ruin {
        #[command(flatten)]
        spec: SpecArg,
        /// Initial surplus values (comma separated).
        #[arg(long, value_parser = parse_list, default_value = "0,1,2,3,4,5")]
        u: Vec<f64>,
    },
    /// Discounted single-dividend moments, aggregate moments and the first
    /// dividend's share of the total.
    Dividends {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, value_parser = parse_list, default_value = "0,1,2,3,4,5")]
        u: Vec<f64>,
        /// Largest single-dividend moment order to report.
        #[arg(long, default_value_t = 1)]
        k_max: u32,
        /// Aggregate-dividend moment order.
        #[arg(long, default_value_t = 1)]
        order: u32,
    },
    /// Distribution of a single dividend amount: G(u, b; x), chi(u, b) and
    /// the defective/conditional densities.
    Divdist {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, value_parser = parse_list, default_value = "1,2,3,4,5")]
        u: Vec<f64>,
        #[arg(long, value_parser = parse_list, default_value = "1,2,3,4,5")]
        x: Vec<f64>,
    },
    /// Gain-count distributions: q(u, m) down to ruin and, when a barrier is
    /// set, r(u, b, m) up to the barrier.
    Counts {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, value_parser = parse_list, default_value = "0,1,2,3,4,5")]
        u: Vec<f64>,
        /// Largest count index m.
        #[arg(long, default_value_t = 5)]
        m_max: usize,
    },
    /// Monte Carlo estimate of one quantity.
    Simulate {
        #[command(flatten)]
        spec: SpecArg,
        /// One of: ruin-lt, phi, barrier-prob, dividend-cdf, q-pmf, r-pmf,
        /// aggregate.
        #[arg(long)]
        quantity: String,
        /// Initial surplus.
        #[arg(long, default_value_t = 1.0)]
        u: f64,
        /// Moment order for phi / aggregate.
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Threshold for dividend-cdf.
        #[arg(long, default_value_t = 1.0)]
        x: f64,
        /// Largest count index for the pmf quantities.
        #[arg(long, default_value_t = 5)]
        m_max: usize,
        #[arg(long, default_value_t = 100_000)]
        paths: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Recompute a built-in reference table and report cell differences
    /// against the embedded golden values.
    Reproduce {
        /// Table id, 1..=18.
        #[arg(long)]
        table: u32,
        /// Absolute comparison tolerance.
        #[arg(long, default_value_t = 5e-4)]
        tolerance: f64,
    },
    /// Emit the data series behind a reference figure (1..=7).
    Figure {
        #[arg(long)]
        id: u32,
    },
}

enum CliError {
    Validation(String),
    Numerical(String),
    Mismatch(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidModel(_) | CoreError::InvalidArgument(_) | CoreError::CapExceeded { .. } => {
                CliError::Validation(e.to_string())
            }
            other => CliError::Numerical(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format.clone();
    let out_path = cli.out.clone();
    match run(cli) {
        Ok(table) => {
            let text = if format == "json" { table.to_json() } else { table.to_csv() };
            match out_path {
                Some(p) => {
                    if let Err(e) = std::fs::write(&p, text) {
                        eprintln!("error: cannot write {p:?}: {e}");
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Mismatch(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(4)
        }
    }
}

fn run(cli: Cli) -> Result<Table, CliError> {
    match cli.command {
        Command::Ruin { spec, u } => {
            let spec = spec.load()?;
            let mut t = Table::new(vec!["u", "psi"]);
            for &uu in &u {
                let v = if spec.delta > 0.0 {
                    ruin::psi(&spec, spec.delta, uu)?
                } else {
                    ruin::psi_ultimate(&spec, uu)?
                };
                t.push(vec![Cell::Num(uu), Cell::Num(v)]);
            }
            Ok(t)
        }
        Command::Dividends { spec, u, k_max, order } => {
            let spec = spec.load()?;
            if spec.delta <= 0.0 {
                return Err(CliError::Validation("dividends need delta > 0".into()));
            }
            let mut headers = vec!["u".to_string()];
            for k in 0..=k_max {
                headers.push(format!("phi_{k}"));
            }
            headers.push(format!("V_{order}"));
            headers.push("first_dividend_share".into());
            let mut t = Table {
                headers,
                rows: Vec::new(),
            };
            for &uu in &u {
                let mut row = vec![Cell::Num(uu)];
                for k in 0..=k_max {
                    row.push(Cell::Num(dividends::phi(&spec, k, spec.delta, uu)?));
                }
                row.push(Cell::Num(dividends::v_moment(&spec, order, spec.delta, uu)?));
                row.push(Cell::Num(dividends::first_dividend_share(&spec, spec.delta, uu)?));
                t.push(row);
            }
            Ok(t)
        }
        Command::Divdist { spec, u, x } => {
            let spec = spec.load()?;
            let dist = DividendDistribution::new(&spec)?;
            let mut t = Table::new(vec!["u", "x", "G", "chi", "g", "g_conditional"]);
            for &uu in &u {
                let chi = dist.chi(uu)?;
                for &xx in &x {
                    let g = dist.density(uu, xx)?;
                    t.push(vec![
                        Cell::Num(uu),
                        Cell::Num(xx),
                        Cell::Num(dist.cdf(uu, xx)?),
                        Cell::Num(chi),
                        Cell::Num(g),
                        Cell::Num(if chi > 0.0 { g / chi } else { f64::NAN }),
                    ]);
                }
            }
            Ok(t)
        }
        Command::Counts { spec, u, m_max } => {
            let spec = spec.load()?;
            let mut q_chain = GainCountChain::new(&spec);
            let mut r_chain = match spec.barrier {
                Some(_) => Some(TargetCountChain::new(&spec)?),
                None => None,
            };
            let mut t = Table::new(vec!["quantity", "m", "u", "value"]);
            for m in 0..=m_max {
                for &uu in &u {
                    t.push(vec![
                        Cell::text("q"),
                        Cell::Num(m as f64),
                        Cell::Num(uu),
                        Cell::Num(q_chain.value(uu, m)?),
                    ]);
                }
            }
            if let (Some(chain), Some(b)) = (r_chain.as_mut(), spec.barrier) {
                for m in 1..=m_max {
                    for &uu in &u {
                        if uu <= b {
                            t.push(vec![
                                Cell::text("r"),
                                Cell::Num(m as f64),
                                Cell::Num(uu),
                                Cell::Num(chain.value(uu, b, m)?),
                            ]);
                        }
                    }
                }
                for &uu in &u {
                    if uu <= b {
                        let tail = counts::r_tail(&spec, uu, b, m_max);
                        if let Ok(v) = tail {
                            t.push(vec![
                                Cell::text("r_tail"),
                                Cell::Num(m_max as f64),
                                Cell::Num(uu),
                                Cell::Num(v),
                            ]);
                        }
                    }
                }
            }
            Ok(t)
        }
        Command::Simulate { spec, quantity, u, k, x, m_max, paths, seed } => {
            let spec = spec.load()?;
            let delta = spec.delta;
            let q = match quantity.as_str() {
                "ruin-lt" => sim::Quantity::RuinLt { delta },
                "phi" => sim::Quantity::DiscountedDividendMoment { k, delta },
                "barrier-prob" => sim::Quantity::BarrierProb,
                "dividend-cdf" => sim::Quantity::DividendCdfAt { x },
                "q-pmf" => sim::Quantity::GainCountRuinPmf { max_m: m_max },
                "r-pmf" => sim::Quantity::GainCountTargetPmf { max_m: m_max },
                "aggregate" => sim::Quantity::AggregateDividends { delta, order: k },
                other => {
                    return Err(CliError::Validation(format!(
                        "unknown quantity {other:?}; use ruin-lt, phi, barrier-prob, \
                         dividend-cdf, q-pmf, r-pmf or aggregate"
                    )))
                }
            };
            if matches!(
                q,
                sim::Quantity::DiscountedDividendMoment { .. }
                    | sim::Quantity::BarrierProb
                    | sim::Quantity::DividendCdfAt { .. }
                    | sim::Quantity::GainCountTargetPmf { .. }
                    | sim::Quantity::AggregateDividends { .. }
            ) && spec.barrier.is_none()
            {
                return Err(CliError::Validation("this quantity needs a barrier".into()));
            }
            let cfg = sim::SimulationConfig::new(spec, u, paths, seed);
            let report = sim::run(&cfg, &q);
            let mut t = Table::new(vec!["quantity", "mean", "std_error", "paths", "censored_fraction"]);
            for (label, est) in report.labels.iter().zip(&report.estimates) {
                t.push(vec![
                    Cell::text(label.clone()),
                    Cell::Num(est.mean),
                    Cell::Num(est.std_error),
                    Cell::Num(est.n as f64),
                    Cell::Num(report.censored_fraction),
                ]);
            }
            Ok(t)
        }
        Command::Reproduce { table: id, tolerance } => {
            let def = tables::table(id).ok_or_else(|| {
                CliError::Validation(format!("unknown table id {id}; valid ids are 1..=18"))
            })?;
            let cmp = tables::compare(def, tolerance)?;
            let mut headers = vec![def.row_header.to_string()];
            headers.extend(def.col_labels.iter().map(|s| s.to_string()));
            headers.push("abs_diff".into());
            let mut t = Table { headers, rows: Vec::new() };
            for (i, row) in cmp.computed.iter().enumerate() {
                let mut cells = vec![Cell::text(def.row_labels[i])];
                let mut row_diff = 0.0f64;
                for (j, &v) in row.iter().enumerate() {
                    cells.push(Cell::Num(v));
                    row_diff = row_diff.max((v - def.golden[i][j]).abs());
                }
                cells.push(Cell::Num(row_diff));
                t.push(cells);
            }
            if cmp.failures.is_empty() {
                Ok(t)
            } else {
                let text = t.to_csv();
                Err(CliError::Mismatch(format!(
                    "{text}# table {id}: {} of {} cells beyond tolerance {tolerance:.1e} \
                     (worst abs diff {:.3e})",
                    cmp.failures.len(),
                    cmp.computed.iter().map(Vec::len).sum::<usize>(),
                    cmp.worst_abs_diff
                )))
            }
        }
        Command::Figure { id } => figures::figure(id).map_err(CliError::from),
    }
}
