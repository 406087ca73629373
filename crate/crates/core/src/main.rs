use std::process::ExitCode;

use clap::Parser;
use mbkdv::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.into_config().and_then(|config| {
        let report = run(&config)?;
        report.write(&config.output_dir)?;
        Ok((report, config.output_dir))
    });
    match result {
        Ok((report, dir)) => {
            for notice in &report.metadata.notices {
                eprintln!("note: {notice}");
            }
            println!("{}", serde_json::to_string_pretty(&report.summary).expect("summary serializes"));
            eprintln!("wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
