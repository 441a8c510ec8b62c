use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use jets::frontend::{builtin_names, builtin_source, parse_session, render_reports, run_session, Format};

#[derive(Parser)]
#[command(name = "jets", version, about = "Verify variational Lie algebroid structures exactly")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the checks of a session file.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        /// Only run checks whose target, command or `command target` matches.
        #[arg(long)]
        check: Option<String>,
    },
    /// Run a built-in example session.
    Example {
        name: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        /// Only run checks whose target, command or `command target` matches.
        #[arg(long)]
        check: Option<String>,
        /// Print the session source instead of running it.
        #[arg(long)]
        show: bool,
    },
    /// List the built-in example sessions.
    List,
}

fn run_text(text: &str, origin: &str, format: OutputFormat, only: Option<&str>) -> ExitCode {
    let session = match parse_session(text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{origin}: {e}");
            return ExitCode::from(2);
        }
    };
    let outcomes = match run_session(&session, only) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{origin}: {e}");
            return ExitCode::from(2);
        }
    };
    if only.is_some() && outcomes.is_empty() {
        eprintln!("{origin}: no check matches");
        return ExitCode::from(2);
    }
    let format = match format {
        OutputFormat::Text => Format::Text,
        OutputFormat::Json => Format::Json,
    };
    print!("{}", render_reports(&outcomes, format));
    if outcomes.iter().all(|o| o.report.passed()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Cmd::Run { file, format, check } => match std::fs::read_to_string(&file) {
            Ok(text) => run_text(&text, &file.display().to_string(), format, check.as_deref()),
            Err(e) => {
                eprintln!("{}: {e}", file.display());
                ExitCode::from(2)
            }
        },
        Cmd::Example { name, format, check, show } => match builtin_source(&name) {
            Some(text) if show => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Some(text) => run_text(text, &name, format, check.as_deref()),
            None => {
                eprintln!("unknown example `{name}`; available: {}", builtin_names().join(", "));
                ExitCode::from(2)
            }
        },
        Cmd::List => {
            for n in builtin_names() {
                println!("{n}");
            }
            ExitCode::SUCCESS
        }
    }
}
