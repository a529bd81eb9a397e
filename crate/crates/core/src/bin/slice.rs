use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use curvedlp::config::RunConfig;
use curvedlp::run_pipeline;
use tracing_subscriber::EnvFilter;

/// Slice a mesh into curved layers and write grayscale cure masks.
#[derive(Debug, Parser)]
#[command(name = "slice", version)]
struct Args {
    /// TOML run configuration.
    #[arg(long, required_unless_present = "print_config")]
    config: Option<PathBuf>,
    /// Override the layer count.
    #[arg(long)]
    layers: Option<usize>,
    /// Override the output directory.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Skip the mask round-trip check.
    #[arg(long)]
    no_verify: bool,
    /// Print the effective configuration (defaults if no --config) and exit.
    #[arg(long)]
    print_config: bool,
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .init();
    let args = Args::parse();

    let mut cfg = match &args.config {
        Some(path) => match RunConfig::load(path) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        None => RunConfig::default(),
    };
    if let Some(n) = args.layers {
        cfg.layer_count = n;
    }
    if let Some(out) = args.output {
        cfg.output_dir = out;
    }
    if args.no_verify {
        cfg.verify = false;
    }
    if args.print_config {
        print!("{}", cfg.to_toml());
        return ExitCode::SUCCESS;
    }

    match run_pipeline(&cfg) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            let failed = outcome.failed_layers();
            if !failed.is_empty() {
                eprintln!("verification failed for layers {failed:?}");
            }
            println!(
                "{} layers written to {}",
                outcome.summaries.len(),
                outcome.output_dir.display()
            );
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
