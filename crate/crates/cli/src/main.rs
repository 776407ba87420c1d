use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use lagshadow_cli::catalog;
use lagshadow_cli::pipeline::run_scene;
use lagshadow_cli::scene::Scene;

#[derive(Parser)]
#[command(name = "lagshadow", version, about = "Gradient-flow skeletons of divisor complements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on a scene file and persist the report.
    Run {
        scene: PathBuf,
        /// Output directory (defaults to the scene's directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scene's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Classify ascending fates on an NxN chart-0 grid.
        #[arg(long)]
        grid: Option<usize>,
        /// Override the Newton multistart budget.
        #[arg(long)]
        starts: Option<usize>,
    },
    /// Inspect the bundled golden scenes.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// List all bundled scenes with their expected outcomes.
    List,
    /// Print one bundled scene and its expectation as JSON.
    Describe { name: String },
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { scene, out, seed, grid, starts } => {
            let text = std::fs::read_to_string(&scene)
                .with_context(|| format!("reading {}", scene.display()))?;
            let mut parsed = Scene::from_json(&text)?;
            if let Some(seed) = seed {
                parsed.controls.seed = seed;
            }
            if let Some(grid) = grid {
                parsed.controls.grid = grid;
            }
            if let Some(starts) = starts {
                parsed.controls.starts = starts;
            }
            let out_dir = match out {
                Some(d) => d,
                None => scene.parent().map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".")),
            };
            std::fs::create_dir_all(&out_dir)?;

            let output = run_scene(&parsed)?;
            let report_path = out_dir.join("report.json");
            std::fs::write(&report_path, serde_json::to_string_pretty(&output.report)?)?;
            if let Some(svg) = &output.svg {
                std::fs::write(out_dir.join("skeleton.svg"), svg)?;
            }
            if let Some(fates) = &output.fates {
                std::fs::write(out_dir.join("fates.json"), serde_json::to_string(fates)?)?;
            }

            match &output.report.verdict {
                Some(v) => println!(
                    "verdict: {} ({} component{})",
                    if v.nonempty { "nonempty" } else { "empty" },
                    v.components,
                    if v.components == 1 { "" } else { "s" },
                ),
                None => println!("verdict: unavailable"),
            }
            if let Some(err) = &output.report.error {
                eprintln!("stage {} failed: {}", err.stage, err.message);
            }
            println!("report: {}", report_path.display());
            Ok(output.ok)
        }
        Command::Catalog { command } => {
            match command {
                CatalogCommand::List => {
                    for entry in catalog::catalog() {
                        println!("{:20} {}", entry.name, entry.expectation);
                    }
                }
                CatalogCommand::Describe { name } => {
                    let Some(entry) = catalog::find(&name) else {
                        bail!("unknown scene {name:?}; see `lagshadow catalog list`");
                    };
                    println!("# {}", entry.expectation);
                    println!("{}", serde_json::to_string_pretty(&entry.scene)?);
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
