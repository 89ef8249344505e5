mod args;
mod commands;
mod config;
mod output;

use clap::Parser;

fn main() {
    std::process::exit(run(std::env::args_os()));
}

/// Exit codes: 0 on success, 1 for usage or configuration errors, 2 when a
/// campaign finishes but records a bound violation.
fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}
