use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fscil_cli::report::{self, ReportFormat, SweepRow};
use fscil_cli::spec_file::{load_synth_spec, parse_placement};
use fscil_cli::{format, CliError};
use fscil_core::{
    generate_dataset, monte_carlo_overlap, overlap_bound, run_protocol, InferenceOptions,
    OverlapQuery, ProtocolConfig, RunOptions, SessionDataset, StrategyConfig, StrategyVariant,
    SynthSpec,
};

#[derive(Parser)]
#[command(name = "fscil", about = "Prototype-classifier simulation for few-shot class-incremental protocols")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic Gaussian dataset file.
    GenSynth(GenSynthArgs),
    /// Run the (T+1)-session protocol with one strategy.
    Run(RunArgs),
    /// Grid over one hyperparameter, several seeds each; long-format CSV.
    Sweep(SweepArgs),
    /// Check the analytic overlap bound against a Monte Carlo estimate.
    Lemma(LemmaArgs),
    /// Validate a dataset file and print the report.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct GenSynthArgs {
    #[arg(long)]
    classes: usize,
    #[arg(long)]
    base: usize,
    #[arg(long)]
    sessions: usize,
    #[arg(long)]
    way: usize,
    #[arg(long)]
    shot: usize,
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    sigma: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 50)]
    test_per_class: usize,
    #[arg(long, default_value_t = 50)]
    base_train_per_class: usize,
    /// Mean placement: sphere | simplex.
    #[arg(long, default_value = "sphere")]
    placement: String,
    /// Distance of the mean constellation center from the origin.
    #[arg(long, default_value_t = 0.0)]
    center_norm: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Baseline,
    Exp2,
    Average,
    Weight,
}

impl From<StrategyArg> for StrategyVariant {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Baseline => StrategyVariant::Baseline,
            StrategyArg::Exp2 => StrategyVariant::Exp2,
            StrategyArg::Average => StrategyVariant::Average,
            StrategyArg::Weight => StrategyVariant::Weight,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// Dataset file to load; mutually exclusive with --synth.
    #[arg(long, conflicts_with = "synth")]
    dataset: Option<PathBuf>,
    /// TOML synth spec; the dataset is generated in-process.
    #[arg(long)]
    synth: Option<PathBuf>,
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    #[arg(long = "R", default_value_t = 40)]
    top_r: usize,
    #[arg(long, default_value_t = 0.8, allow_hyphen_values = true)]
    tau: f64,
    #[arg(long, default_value_t = 0.05)]
    beta_base: f64,
    #[arg(long, default_value_t = 0.3)]
    beta_inc: f64,
    /// Streaming chunk size; 0 processes each session as one batch.
    #[arg(long, default_value_t = 0)]
    chunk: usize,
    /// Skip explore/exploit updates during the base session.
    #[arg(long, default_value_t = false)]
    no_base_update: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report output path; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Hyperparameter to sweep: R | tau | beta-base | beta-inc.
    #[arg(long)]
    param: String,
    /// Comma-separated parameter values.
    #[arg(long)]
    values: String,
    /// Seeds per parameter value.
    #[arg(long, default_value_t = 1)]
    repeat: u64,
    /// Sweep CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LemmaArgs {
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, default_value_t = 16)]
    dim: usize,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    dataset: PathBuf,
}

fn exit_code_for(err: &CliError) -> ExitCode {
    match err {
        CliError::Core(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let result = match cli.command {
        Command::GenSynth(args) => cmd_gen_synth(args),
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Lemma(args) => cmd_lemma(args),
        Command::Validate(args) => cmd_validate(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Validation(report) = &e {
                for v in &report.violations {
                    eprintln!("  violation: {v}");
                }
            }
            exit_code_for(&e)
        }
    }
}

fn cmd_gen_synth(args: GenSynthArgs) -> fscil_cli::Result<ExitCode> {
    let spec = SynthSpec {
        protocol: ProtocolConfig {
            total_classes: args.classes,
            base_classes: args.base,
            sessions: args.sessions,
            way: args.way,
            shot: args.shot,
            dim: args.dim,
        },
        sigma_intra: args.sigma,
        target_delta_inter: args.delta,
        mean_placement: parse_placement(&args.placement)?,
        test_per_class: args.test_per_class,
        base_train_per_class: args.base_train_per_class,
        center_norm: args.center_norm,
        seed: args.seed,
    };
    let dataset = generate_dataset(&spec)?;
    format::write_dataset(&dataset, &args.out)?;
    println!(
        "wrote {} (fingerprint {:016x})",
        args.out.display(),
        dataset.fingerprint()
    );
    Ok(ExitCode::SUCCESS)
}

fn resolve_dataset(args: &RunArgs, seed_override: Option<u64>) -> fscil_cli::Result<SessionDataset> {
    match (&args.dataset, &args.synth) {
        (Some(path), None) => format::load_dataset(path),
        (None, Some(path)) => {
            let mut spec = load_synth_spec(path)?;
            if let Some(seed) = seed_override {
                spec.seed = seed;
            }
            Ok(generate_dataset(&spec)?)
        }
        _ => Err(CliError::Config(
            "exactly one of --dataset and --synth is required".into(),
        )),
    }
}

fn strategy_of(args: &RunArgs) -> StrategyConfig {
    StrategyConfig {
        variant: args.strategy.into(),
        top_r: args.top_r,
        tau: args.tau,
        beta_base: args.beta_base,
        beta_inc: args.beta_inc,
    }
}

fn run_options(args: &RunArgs) -> RunOptions {
    RunOptions {
        inference: InferenceOptions {
            chunk_size: args.chunk,
            update_base_session: !args.no_base_update,
        },
        seed: args.seed,
    }
}

fn cmd_run(args: RunArgs) -> fscil_cli::Result<ExitCode> {
    let dataset = resolve_dataset(&args, Some(args.seed).filter(|_| args.synth.is_some()))?;
    let outcome = run_protocol(&dataset, &strategy_of(&args), &run_options(&args))?;
    let format = match args.format {
        FormatArg::Csv => ReportFormat::Csv,
        FormatArg::Json => ReportFormat::Json,
    };
    match &args.report {
        Some(path) => {
            report::write_report(&outcome.report, path, format)?;
            println!("wrote {}", path.display());
        }
        None => {
            let text = match format {
                ReportFormat::Csv => report::report_to_csv(&outcome.report),
                ReportFormat::Json => report::report_to_json(&outcome.report),
            };
            print!("{text}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: SweepArgs) -> fscil_cli::Result<ExitCode> {
    let values: Vec<f64> = args
        .values
        .split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("bad sweep value `{v}`")))
        })
        .collect::<fscil_cli::Result<_>>()?;
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    let mut rows = Vec::new();
    for (vi, &value) in values.iter().enumerate() {
        for rep in 0..args.repeat.max(1) {
            let seed = args.run.seed + (vi as u64) * args.repeat.max(1) + rep;
            let mut run_args = RunArgs {
                dataset: args.run.dataset.clone(),
                synth: args.run.synth.clone(),
                seed,
                ..copy_run_params(&args.run)
            };
            match args.param.as_str() {
                "R" => run_args.top_r = value as usize,
                "tau" => run_args.tau = value,
                "beta-base" => run_args.beta_base = value,
                "beta-inc" => run_args.beta_inc = value,
                other => {
                    return Err(CliError::Config(format!(
                        "param must be one of R, tau, beta-base, beta-inc; got `{other}`"
                    )))
                }
            }
            let dataset =
                resolve_dataset(&run_args, Some(seed).filter(|_| run_args.synth.is_some()))?;
            let outcome = run_protocol(&dataset, &strategy_of(&run_args), &run_options(&run_args))?;
            for s in &outcome.report.sessions {
                rows.push(SweepRow {
                    param: args.param.clone(),
                    value,
                    seed,
                    session: s.session,
                    overall: s.overall_accuracy,
                    incremental: s.incremental_accuracy,
                });
            }
        }
    }
    let csv = report::sweep_to_csv(&rows);
    match &args.out {
        Some(path) => {
            std::fs::write(path, csv)?;
            println!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn copy_run_params(run: &RunArgs) -> RunArgs {
    RunArgs {
        dataset: run.dataset.clone(),
        synth: run.synth.clone(),
        strategy: run.strategy,
        top_r: run.top_r,
        tau: run.tau,
        beta_base: run.beta_base,
        beta_inc: run.beta_inc,
        chunk: run.chunk,
        no_base_update: run.no_base_update,
        seed: run.seed,
        report: None,
        format: run.format,
    }
}

fn cmd_lemma(args: LemmaArgs) -> fscil_cli::Result<ExitCode> {
    let query = OverlapQuery {
        delta: args.delta,
        sigma: args.sigma,
        epsilon: args.eps,
        dim: args.dim,
        trials: args.trials,
        seed: args.seed,
    };
    let estimate = monte_carlo_overlap(&query)?;
    let analytic = overlap_bound(args.delta, args.sigma, args.eps);
    // the additive term absorbs the second-order error the proof drops
    let ratio = args.eps / args.delta;
    let tolerance = (3.0 * estimate.stderr).max(0.002 + 0.5 * ratio * ratio);
    let pass = (estimate.probability - analytic).abs() <= tolerance;
    println!("analytic_bound={analytic}");
    println!("empirical={}", estimate.probability);
    println!("stderr={}", estimate.stderr);
    println!("tolerance={tolerance}");
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_validate(args: ValidateArgs) -> fscil_cli::Result<ExitCode> {
    let text_path = args.dataset;
    match format::load_dataset(&text_path) {
        Ok(dataset) => {
            println!("ok: {} (fingerprint {:016x})", text_path.display(), dataset.fingerprint());
            Ok(ExitCode::SUCCESS)
        }
        Err(CliError::Validation(report)) => {
            println!("invalid: {}", text_path.display());
            for v in &report.violations {
                println!("  violation: {v}");
            }
            Ok(ExitCode::from(1))
        }
        Err(other) => Err(other),
    }
}
