use anyhow::Context;
use clap::{Parser, Subcommand};
use gluelocus_cli::config::SceneConfig;
use gluelocus_cli::scene::{run_scene, Overrides};
use std::path::PathBuf;
use std::process::ExitCode;

/// Classify developable surface bands glued along a shared curve.
#[derive(Parser)]
#[command(name = "gluelocus", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scene configuration and write its requested artifacts.
    Run {
        /// Path to a scene configuration (JSON).
        config: PathBuf,
        /// Override the configured sample count.
        #[arg(long)]
        samples: Option<usize>,
        /// Override the zero tolerance of the shape decisions.
        #[arg(long)]
        tol: Option<f64>,
        /// Directory the artifact targets are resolved against.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            samples,
            tol,
            out_dir,
        } => {
            let loaded = match SceneConfig::load(&config)
                .with_context(|| format!("loading {}", config.display()))
            {
                Ok(loaded) => loaded,
                Err(err) => return fail(err),
            };
            let overrides = Overrides { samples, tol };
            match run_scene(&loaded, overrides, &out_dir) {
                Ok(outcome) => {
                    print_summary(&outcome);
                    if outcome.unresolved {
                        eprintln!("warning: some singular points are unresolved");
                        ExitCode::from(2)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(err) => fail(err),
            }
        }
    }
}

fn fail(err: anyhow::Error) -> ExitCode {
    eprintln!("error: {err:#}");
    ExitCode::FAILURE
}

fn print_summary(outcome: &gluelocus_cli::scene::RunOutcome) {
    let report = &outcome.report;
    println!("scene: {}", report.scene);
    for note in &report.notes {
        println!("note: {note}");
    }
    for surface in &report.surfaces {
        match surface.shape.as_deref() {
            Some(shape) => {
                let mut line = format!("{}: {shape}", surface.name);
                if let Some(apex) = surface.apex {
                    line.push_str(&format!(
                        ", apex ({:.6}, {:.6}, {:.6})",
                        apex[0], apex[1], apex[2]
                    ));
                }
                for point in &surface.points {
                    line.push_str(&format!(", {} at t = {}", point.label, point.t));
                }
                println!("{line}");
            }
            None => println!(
                "{}: absent ({})",
                surface.name,
                surface.reason.as_deref().unwrap_or("no reason recorded")
            ),
        }
    }
    if let Some(theta) = &report.theta {
        if theta.constant {
            println!("rotation angle: {:.12} (constant)", theta.start);
        } else {
            println!(
                "rotation angle: {:.12} .. {:.12}",
                theta.start, theta.end
            );
        }
    }
    for path in &outcome.written {
        println!("wrote {}", path.display());
    }
}
