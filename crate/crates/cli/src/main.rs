use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lagroid_cli::commands::{self, CommandError, Output};

#[derive(Parser)]
#[command(name = "lagroid", version, about = "Groupoid and Lie algebroid mechanics toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario described by a JSON config.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Check the groupoid axioms of a groupoid document.
    Validate { groupoid: PathBuf },
    /// Quadratic expansion of the canonical c-Lagrangian at a chart point.
    Expand {
        #[arg(long)]
        chart: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long = "cK", default_value_t = 10.0)]
        c_k: f64,
    },
    /// Integrate a geodesic and print it as CSV.
    Geodesic {
        #[arg(long)]
        chart: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        v: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        smax: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Positive-type test of a function on a groupoid.
    StateCheck { groupoid: PathBuf, phi: PathBuf },
}

fn finish(result: Result<Output, CommandError>) -> i32 {
    match result {
        Ok(out) => {
            print!("{}", out.text);
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, output_dir } => lagroid_cli::run_config(&config, output_dir.as_deref()),
        Command::Validate { groupoid } => finish(commands::validate(&groupoid)),
        Command::Expand { chart, x, m, c_k } => finish(commands::expand(&chart, &x, m, c_k)),
        Command::Geodesic { chart, x, v, smax, step } => finish(commands::geodesic(&chart, &x, &v, smax, step)),
        Command::StateCheck { groupoid, phi } => finish(commands::state_check(&groupoid, &phi)),
    };
    ExitCode::from(code as u8)
}
