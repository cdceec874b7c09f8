use clap::error::ErrorKind;
use clap::Parser;
use diamtors_cli::{run_experiment, Cli, CliError};

fn fail(e: CliError) -> ! {
    eprintln!("{}", e.to_json());
    std::process::exit(e.exit_code());
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => fail(CliError::Config(e.to_string().trim().to_owned())),
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            fail(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("the global pool is configured once");
    }
    if let Err(e) = run_experiment(&cli.config(), cli.out.as_deref()) {
        fail(e);
    }
}
