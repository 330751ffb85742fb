use clap::Parser;
use lgcone::cli::{init_thread_pool, run, Cli, CliError};

fn main() {
    init_thread_pool();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help and version print normally; parse failures are usage errors
            if e.use_stderr() {
                eprintln!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    if let Err(e) = run(cli) {
        if !matches!(e, CliError::VerificationFailed) {
            eprintln!("{}", e.message());
        }
        std::process::exit(e.exit_code());
    }
}
