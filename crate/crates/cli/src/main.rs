use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use fanowave::{config::Experiment, presets, CliError};

#[derive(Parser)]
#[command(
    name = "fanowave",
    version,
    about = "Few-photon waveguide transport experiments"
)]
struct Cli {
    /// Experiment or preset to run; `list` shows the available names.
    name: String,

    /// JSON file merged over the experiment or preset defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Dotted-path override, e.g. `--set pte.v=2`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,

    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Print the resolved configuration and exit without running.
    #[arg(long)]
    dry_run: bool,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.name == "list" {
        println!("experiments:");
        for e in Experiment::ALL {
            println!("  {}", e.name());
        }
        println!("presets:");
        for p in presets::NAMES {
            println!("  {p}");
        }
        return Ok(());
    }
    let cfg = fanowave::resolve(
        &cli.name,
        cli.config.as_deref(),
        &cli.sets,
        cli.out.as_deref(),
    )?;
    if cli.dry_run {
        println!(
            "{}",
            serde_json::to_string_pretty(&cfg).expect("config serialises")
        );
        return Ok(());
    }
    let summary = fanowave::execute(&cli.name, &cfg)?;
    for f in &summary.files {
        println!("{}", summary.output_dir.join(f).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fanowave: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
