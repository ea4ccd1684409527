use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "nlflow", version, about = "Run nonlocal bistable flow scenarios")]
struct Cli {
    /// Directory receiving one subdirectory per scenario.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Number of scenarios run concurrently.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    parallel: u16,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenario files or presets.
    Run {
        #[arg(required = true, value_name = "CONFIG")]
        targets: Vec<String>,
    },
    /// List the embedded presets.
    ListPresets {
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { targets } => {
            nlflow::execute(&targets, &cli.out, cli.parallel.into(), &mut std::io::stdout(), &mut std::io::stderr())
        }
        Command::ListPresets { json } => {
            print!("{}", nlflow::list_presets(json));
            nlflow::EXIT_OK
        }
    };
    ExitCode::from(code as u8)
}
