mod args;
mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::resolve;
use error::CliResult;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let name = cli.command.name();
    let file = cli.config.as_deref();
    let mut out = commands::Output::new(&cli.out)?;
    match &cli.command {
        Command::Theory(flags) => {
            let params = resolve(name, file, flags)?;
            commands::theory(&params, &mut out)?;
            out.finish(name, &params)
        }
        Command::Simulate(flags) => {
            let params = resolve(name, file, flags)?;
            commands::simulate(&params, &mut out)?;
            out.finish(name, &params)
        }
        Command::Correct(flags) => {
            let params = resolve(name, file, flags)?;
            commands::correct(&params, &mut out)?;
            out.finish(name, &params)
        }
        Command::Fit(flags) => {
            let params = resolve(name, file, flags)?;
            commands::fit(&params, &mut out)?;
            out.finish(name, &params)
        }
        Command::ErrorSurface(flags) => {
            let params = resolve(name, file, flags)?;
            commands::error_surface_cmd(&params, &mut out)?;
            out.finish(name, &params)
        }
        Command::Pipeline(flags) => {
            let params = resolve(name, file, flags)?;
            let fit = commands::pipeline(&params, &mut out)?;
            println!("b = {:.4}, tau_c = {:.4} ns", fit.b, fit.tau_c);
            out.finish(name, &params)
        }
    }
}
