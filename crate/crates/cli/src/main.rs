//! `gaugeqed`: run configured scenarios and write CSV datasets.

mod config;
mod error;
mod output;
mod scenarios;

use clap::{Parser, Subcommand};
use error::CliError;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gaugeqed", version, about = "Arbitrary-gauge cavity QED scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its CSV files.
    Run {
        config: PathBuf,
        /// Worker threads for independent sweep points.
        #[arg(long, env = "GAUGEQED_JOBS")]
        jobs: Option<usize>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Check a configuration without running it.
    Validate { config: PathBuf },
    /// Print the scenario names.
    ListScenarios,
}

fn read_config(path: &Path) -> Result<config::Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    config::parse(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn output_path(dir: &Path, name: &str, suffix: Option<&str>) -> PathBuf {
    match suffix {
        None => dir.join(name),
        Some(s) => {
            let p = Path::new(name);
            let stem = p.file_stem().map_or(name.into(), |s| s.to_string_lossy());
            match p.extension() {
                Some(ext) => dir.join(format!("{stem}_{s}.{}", ext.to_string_lossy())),
                None => dir.join(format!("{stem}_{s}")),
            }
        }
    }
}

fn run(path: &Path, jobs: Option<usize>, out: &Path) -> Result<(), CliError> {
    let cfg = read_config(path)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let name = cfg.scenario.name();
    let outcome = pool.install(|| scenarios::run(&cfg.scenario))?;

    let hash: String = Sha256::digest(cfg.text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    let figure = cfg.figure.clone().or_else(|| scenarios::default_figure(name).map(String::from));
    let mut preamble = vec![
        ("generator".to_string(), format!("gaugeqed {}", env!("CARGO_PKG_VERSION"))),
        ("scenario".to_string(), name.to_string()),
    ];
    if let Some(f) = figure {
        preamble.push(("figure".to_string(), f));
    }
    preamble.push(("config sha256".to_string(), hash));

    std::fs::create_dir_all(out).map_err(|e| CliError::Io { path: out.display().to_string(), source: e })?;
    let file = cfg.output.clone().unwrap_or_else(|| format!("{name}.csv"));
    for table in &outcome.tables {
        let p = output_path(out, &file, table.suffix.as_deref());
        let text = output::render(&preamble, &outcome.report, table);
        std::fs::write(&p, text).map_err(|e| CliError::Io { path: p.display().to_string(), source: e })?;
        println!("wrote {} ({} rows)", p.display(), table.rows.len());
    }
    for (k, v) in &outcome.report.residuals {
        println!("  residual {k}: {}", output::format_num(*v));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, jobs, out } => run(config, *jobs, out),
        Command::Validate { config } => read_config(config).map(|c| println!("ok: {} ({})", config.display(), c.scenario.name())),
        Command::ListScenarios => {
            for s in config::SCENARIOS {
                println!("{s}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
