use std::process::ExitCode;

use clap::Parser;

use kms_thermo_cli::{run, Cli, Format};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&out.report).expect("report serializes"));
                    eprintln!("{}", out.summary);
                }
                Format::Text => println!("{}", out.summary),
            }
            if !out.passed {
                eprintln!("verification failed");
            }
            ExitCode::from(out.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
