use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qd_cascade::presets::FigureId;
use qd_cascade_cli::commands::{self, Summary};
use qd_cascade_cli::config::{self, Origin, RunConfig, Setting, Sweep};
use qd_cascade_cli::CliError;

#[derive(Parser)]
#[command(name = "qd-cascade", version, about = "Phonon-assisted cascade emission in a driven three-level quantum dot")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// `key = value` file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (or directory for `figure`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// VAR:START:STOP:POINTS
    #[arg(long, global = true)]
    sweep: Option<String>,

    #[command(flatten)]
    values: ValueFlags,
}

#[derive(Subcommand)]
enum Command {
    /// Steady state observables, optionally over a sweep.
    Steady,
    /// Time evolution from an initial state.
    Evolve,
    /// Compare the engine against closed-form results.
    Check,
    /// Reproduce a figure preset.
    Figure { id: String },
}

#[derive(Args)]
struct ValueFlags {
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma1: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma3: Option<String>,
    #[arg(long = "big_gamma2", alias = "big-gamma2", global = true, allow_hyphen_values = true)]
    big_gamma2: Option<String>,
    #[arg(long = "big_gamma3", alias = "big-gamma3", global = true, allow_hyphen_values = true)]
    big_gamma3: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega1: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega3: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    nbar: Option<String>,
    /// custom, ow_zero or ow_eq_ou
    #[arg(long, global = true)]
    case: Option<String>,
    /// state_1, state_2, state_3, state_w, state_u, state_b, state_d,
    /// maximally_mixed, diag:P1,P2,P3 or diag_super:P2,PW,PU
    #[arg(long, global = true)]
    init: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    tmax: Option<String>,
    #[arg(long = "sample_every", alias = "sample-every", global = true, allow_hyphen_values = true)]
    sample_every: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    phi: Option<String>,
}

impl ValueFlags {
    fn settings(&self) -> Vec<Setting> {
        let pairs = [
            ("gamma1", &self.gamma1),
            ("gamma3", &self.gamma3),
            ("big_gamma2", &self.big_gamma2),
            ("big_gamma3", &self.big_gamma3),
            ("omega1", &self.omega1),
            ("omega3", &self.omega3),
            ("delta", &self.delta),
            ("nbar", &self.nbar),
            ("case", &self.case),
            ("init", &self.init),
            ("tmax", &self.tmax),
            ("sample_every", &self.sample_every),
            ("phi", &self.phi),
        ];
        pairs
            .into_iter()
            .filter_map(|(key, v)| {
                v.as_ref().map(|value| Setting { key: key.to_string(), value: value.clone(), origin: Origin::Flag })
            })
            .collect()
    }
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut settings = Vec::new();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        settings = config::parse_file(&path.display().to_string(), &text)?;
    }
    settings.extend(cli.values.settings());
    if let Some(out) = &cli.out {
        settings.push(Setting { key: "out".into(), value: out.display().to_string(), origin: Origin::Flag });
    }
    let sweep = cli
        .sweep
        .as_deref()
        .map(|s| s.parse::<Sweep>().map_err(|e| CliError::Usage(format!("--sweep: {e}"))))
        .transpose()?;
    RunConfig::from_settings(&settings, sweep)
}

fn with_output<F>(cfg: &RunConfig, body: F) -> Result<Summary, CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<Summary, CliError>,
{
    match &cfg.out {
        Some(path) => {
            let file = fs::File::create(path)?;
            let mut w = BufWriter::new(file);
            let r = body(&mut w);
            w.flush()?;
            r
        }
        None => body(&mut io::stdout().lock()),
    }
}

fn run(cli: &Cli) -> Result<Summary, CliError> {
    let cfg = load(cli)?;
    match &cli.command {
        Command::Steady => {
            let pool = commands::thread_pool(cli.jobs)?;
            with_output(&cfg, |w| commands::run_steady(&cfg, &pool, w))
        }
        Command::Evolve => with_output(&cfg, |w| commands::run_evolve(&cfg, None, w)),
        Command::Check => with_output(&cfg, |w| commands::run_check(&cfg, w)),
        Command::Figure { id } => {
            let id: FigureId = id.parse().map_err(|e: qd_cascade::Error| CliError::Usage(e.to_string()))?;
            let pool = commands::thread_pool(cli.jobs)?;
            let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let (paths, summary) = commands::run_figure(id, &dir, &pool)?;
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            Ok(summary)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) if summary.failures == 0 => ExitCode::SUCCESS,
        Ok(summary) => {
            eprintln!("qd-cascade: {} point(s) or check(s) failed", summary.failures);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("qd-cascade: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
