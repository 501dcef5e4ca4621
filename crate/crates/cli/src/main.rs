//! Command-line pipeline: simulate, ingest, train, classify, eval, analyze.
//!
//! Exit codes are a stable contract: 0 success, 1 usage error (bad flags or
//! unreadable inputs), 2 data error (unusable content), 3 pipeline abort
//! (step 1 produced no reliable negatives). Log level comes from the
//! `POLITISHIFT_LOG` environment variable.

mod commands;
mod manifest;
mod util;

use clap::Parser;

#[derive(Parser)]
#[command(name = "politishift", version, about = "Politicization measurement pipeline")]
struct Cli {
    /// Bound internal parallelism (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: commands::Command,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("POLITISHIFT_LOG")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own exit code is 2; usage errors are 1 here. Help and
            // version output stay successful.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };

    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            log::warn!("could not set thread count: {e}");
        }
    }

    match commands::run(cli.command) {
        Ok(()) => {}
        Err(failure) => {
            eprintln!("error: {:#}", failure.error());
            std::process::exit(failure.exit_code());
        }
    }
}
