use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use poldp::analysis::{apoldp, AnalysisError};
use poldp::exec::Execution;
use poldp::harness::{
    generate_instances, report_threshold, sweep, verify_suite, EpsilonGrid, ExperimentConfig, Generator, HarnessError,
    ThresholdRow, DEFAULT_LP_VOTERS, DEFAULT_SIM_VOTERS,
};
use poldp::mechanism::{central_realization, posterior_matrix, DesignMatrix, Epsilon, Mechanism};
use poldp::simulation::{
    estimate_win_probability, exact_win_probability, DeletionPlan, PlanPolicy, EXACT_MAX_CANDIDATES, EXACT_MAX_VOTERS,
};

const EXIT_INVALID: u8 = 1;
const EXIT_ROW_FAILURES: u8 = 2;

#[derive(Parser)]
#[command(name = "poldp", version, about = "Deletion-attack cost of plurality elections under local differential privacy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the design matrix P, posterior Q and central realization τ̂.
    Mechanism(Common),
    /// Evaluate the normalized attack cost at a single ε.
    Apoldp(Common),
    /// Evaluate every instance × mechanism × grid point.
    Sweep(Common),
    /// Run the sandwich, concentration, winning-probability and oracle checks.
    Verify(Common),
    /// Report the security threshold per instance and mechanism.
    Threshold(Common),
    /// Estimate the winning probability of an explicit deletion plan.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Deletions per reported candidate, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        plan: Vec<u64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GeneratorKind {
    FixedGap,
    Dirichlet,
}

#[derive(Args, Clone)]
struct Common {
    /// Mechanisms to evaluate; defaults to all.
    #[arg(long, value_delimiter = ',')]
    mechanism: Vec<Mechanism>,
    #[arg(long)]
    m: Option<usize>,
    /// Voters; defaults to 1e8 for LP paths and 1e5 for simulation paths.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, default_value_t = 0.2)]
    phi: f64,
    #[arg(long, value_enum, default_value_t = GeneratorKind::FixedGap)]
    generator: GeneratorKind,
    /// Explicit λ, comma-separated; overrides the generator.
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<f64>,
    /// A single privacy level (`inf` allowed for `apoldp` and `mechanism`).
    #[arg(long, conflicts_with = "eps_grid")]
    eps: Option<Epsilon>,
    /// start:stop:step
    #[arg(long)]
    eps_grid: Option<EpsilonGrid>,
    #[arg(long, default_value_t = 0.999)]
    xi: f64,
    #[arg(long, default_value_t = 0.001)]
    delta: f64,
    /// Relative τ̂ perturbation for the sandwich check.
    #[arg(long, default_value_t = 0.001)]
    band: f64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 200)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Run on a single thread.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn config(&self, default_n: u64) -> Result<ExperimentConfig, HarnessError> {
        let defaults = ExperimentConfig::default();
        let generator = if !self.lambda.is_empty() {
            Generator::Explicit { lambda: self.lambda.clone() }
        } else {
            match self.generator {
                GeneratorKind::FixedGap => Generator::FixedGap { phi: self.phi },
                GeneratorKind::Dirichlet => Generator::Dirichlet,
            }
        };
        let grid = match (self.eps, self.eps_grid) {
            (Some(Epsilon::Finite(e)), _) => EpsilonGrid::single(e),
            (Some(Epsilon::Infinite), _) => {
                return Err(HarnessError::InvalidConfig("eps = inf is only supported by apoldp and mechanism".into()))
            }
            (None, Some(g)) => g,
            (None, None) => defaults.grid,
        };
        let config = ExperimentConfig {
            mechanisms: if self.mechanism.is_empty() { defaults.mechanisms } else { self.mechanism.clone() },
            m: self.m.unwrap_or(if self.lambda.is_empty() { defaults.m } else { self.lambda.len() }),
            n: self.n.unwrap_or(default_n),
            generator,
            grid,
            xi: self.xi,
            delta: self.delta,
            band: self.band,
            trials: self.trials,
            instances: self.instances,
            seed: self.seed,
            execution: if self.sequential { Execution::Sequential } else { Execution::Parallel },
        };
        config.validate()?;
        Ok(config)
    }

    /// The single mechanism a point command works on.
    fn mechanism(&self) -> Result<Mechanism, HarnessError> {
        match self.mechanism.as_slice() {
            [] => Ok(Mechanism::RandomizedResponse),
            [one] => Ok(*one),
            _ => Err(HarnessError::InvalidConfig("this command takes a single --mechanism".into())),
        }
    }

    fn epsilon(&self) -> Result<Epsilon, HarnessError> {
        if self.eps_grid.is_some() {
            return Err(HarnessError::InvalidConfig("this command takes --eps, not --eps-grid".into()));
        }
        self.eps.ok_or_else(|| HarnessError::InvalidConfig("--eps is required".into()))
    }

    /// Config for single-system commands; `eps` is validated separately.
    fn point_config(&self, default_n: u64) -> Result<ExperimentConfig, HarnessError> {
        Common { eps: None, eps_grid: None, ..self.clone() }.config(default_n)
    }

    fn writer(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

/// Any error that stops a command before its rows are complete; reported
/// with the invalid-configuration exit code.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Whether any emitted row carries a failure status.
type Outcome = Result<bool, Failure>;

fn write_json(common: &Common, value: &serde_json::Value) -> Result<(), Failure> {
    let mut out = common.writer()?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn first_system(config: &ExperimentConfig) -> Result<poldp::election::VotingSystem, Failure> {
    let config = ExperimentConfig { instances: 1, ..config.clone() };
    Ok(generate_instances(&config)?.remove(0))
}

fn run_mechanism(common: &Common) -> Outcome {
    let config = common.point_config(DEFAULT_LP_VOTERS)?;
    let system = first_system(&config)?;
    let mechanism = common.mechanism()?;
    let epsilon = common.epsilon()?;
    let p = DesignMatrix::build(mechanism, system.candidates(), epsilon)?;
    let q = posterior_matrix(&p, &system)?;
    let tau_hat = central_realization(&p, &system)?.tau_hat;
    let value = json!({
        "mechanism": mechanism,
        "epsilon": epsilon.to_string(),
        "n": system.voters(),
        "lambda": system.lambda(),
        "p": p.matrix().rows(),
        "q": q.matrix().rows(),
        "tau_hat": tau_hat,
    });
    write_json(common, &value)?;
    Ok(false)
}

fn run_apoldp(common: &Common) -> Outcome {
    let config = common.point_config(DEFAULT_LP_VOTERS)?;
    let system = first_system(&config)?;
    let mechanism = common.mechanism()?;
    let epsilon = common.epsilon()?;
    let base = json!({
        "mechanism": mechanism,
        "epsilon": epsilon.to_string(),
        "n": system.voters(),
        "lambda": system.lambda(),
    });
    let (status, result, failed) = match apoldp(&system, mechanism, epsilon) {
        Ok(r) => ("ok".to_string(), serde_json::to_value(r)?, false),
        Err(AnalysisError::AttackFree) => ("attack-free".to_string(), serde_json::Value::Null, true),
        Err(e @ AnalysisError::ConditionFailed(_)) => (format!("condition-failed: {e}"), serde_json::Value::Null, true),
        Err(e @ AnalysisError::Mechanism(_)) => return Err(Failure(e.to_string())),
        Err(e) => (format!("error: {e}"), serde_json::Value::Null, true),
    };
    let mut value = base;
    value["status"] = json!(status);
    value["result"] = result;
    match common.format {
        Some(Format::Csv) => {
            let mut out = common.writer()?;
            writeln!(out, "mechanism,epsilon,n,apoldp,opt_lp,classical_cost,at_plateau,condition_passed,status")?;
            let r = &value["result"];
            let field = |k: &str| if r.is_null() { String::new() } else { r[k].to_string() };
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                mechanism,
                epsilon,
                system.voters(),
                field("value"),
                field("opt_lp"),
                field("classical"),
                field("at_plateau"),
                field("condition_passed"),
                status.split(':').next().unwrap_or_default(),
            )?;
            out.flush()?;
        }
        _ => write_json(common, &value)?,
    }
    Ok(failed)
}

fn run_sweep(common: &Common) -> Outcome {
    let config = common.config(DEFAULT_LP_VOTERS)?;
    let output = sweep(&config)?;
    let mut out = common.writer()?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => output.write_csv(&mut out)?,
        Format::Json => output.write_json(&mut out)?,
    }
    out.flush()?;
    Ok(output.has_failures())
}

fn run_verify(common: &Common) -> Outcome {
    let config = common.config(DEFAULT_LP_VOTERS)?;
    let checks = verify_suite(&config)?;
    let failed = checks.iter().any(|c| !c.passed);
    match common.format {
        Some(Format::Csv) => {
            let mut out = common.writer()?;
            writeln!(out, "check,passed")?;
            for c in &checks {
                writeln!(out, "{},{}", c.name, c.passed)?;
            }
            out.flush()?;
        }
        _ => write_json(common, &json!({ "config": config, "checks": checks }))?,
    }
    Ok(failed)
}

fn threshold_csv(rows: &[ThresholdRow], out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "instance_id,mechanism,lambda,epsilon_star,stated_max,lp_max,agreement,status")?;
    for row in rows {
        let lambda: Vec<String> = row.lambda.iter().map(f64::to_string).collect();
        let (eps, stated, lp, agree) = match &row.report {
            Some(r) => (r.epsilon_star.to_string(), r.stated_max.to_string(), r.lp_max.to_string(), r.agreement.to_string()),
            None => Default::default(),
        };
        let status = row.status.split(':').next().unwrap_or_default();
        writeln!(out, "{},{},{},{eps},{stated},{lp},{agree},{status}", row.instance_id, row.mechanism, lambda.join(";"))?;
    }
    Ok(())
}

fn run_threshold(common: &Common) -> Outcome {
    let config = common.point_config(DEFAULT_LP_VOTERS)?;
    let rows = report_threshold(&config)?;
    let failed = rows.iter().any(|r| r.report.is_none());
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = common.writer()?;
            threshold_csv(&rows, &mut out)?;
            out.flush()?;
        }
        Format::Json => write_json(common, &json!({ "config": config, "rows": rows }))?,
    }
    Ok(failed)
}

fn run_simulate(common: &Common, plan: &[u64]) -> Outcome {
    let config = common.point_config(DEFAULT_SIM_VOTERS)?;
    let system = first_system(&config)?;
    let mechanism = common.mechanism()?;
    let epsilon = common.epsilon()?;
    if plan.len() != system.candidates() {
        return Err(Failure(format!("plan has {} entries but m = {}", plan.len(), system.candidates())));
    }
    let p = DesignMatrix::build(mechanism, system.candidates(), epsilon)?;
    let plan = DeletionPlan { x: plan.to_vec() };
    let policy = PlanPolicy::Fixed { plan: plan.clone() };
    let estimate = estimate_win_probability(&system, &p, &policy, config.trials, config.seed, config.execution)
        ?;
    let exact = if system.voters() <= EXACT_MAX_VOTERS && system.candidates() <= EXACT_MAX_CANDIDATES {
        Some(exact_win_probability(&system, &p, &plan)?)
    } else {
        None
    };
    let value = json!({
        "mechanism": mechanism,
        "epsilon": epsilon.to_string(),
        "n": system.voters(),
        "lambda": system.lambda(),
        "plan": plan,
        "estimate": estimate,
        "exact": exact,
    });
    write_json(common, &value)?;
    Ok(false)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(EXIT_INVALID),
            };
        }
    };
    let outcome = match &cli.command {
        Command::Mechanism(c) => run_mechanism(c),
        Command::Apoldp(c) => run_apoldp(c),
        Command::Sweep(c) => run_sweep(c),
        Command::Verify(c) => run_verify(c),
        Command::Threshold(c) => run_threshold(c),
        Command::Simulate { common, plan } => run_simulate(common, plan),
    };
    match outcome {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(EXIT_ROW_FAILURES),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
