use affine_vlab_cli::{apply_overrides, init_threads, parse_config, run, CliError, Command, EXIT_IO, EXIT_OK};
use clap::Parser;
use std::io::Write;
use std::process::ExitCode;

/// Affine Sobolev energies and variational problems on grids.
#[derive(Parser, Debug)]
#[command(name = "affine-vlab", version)]
struct Args {
    /// constants, energy, eigen, solve, scan-lambda, verify, dump-field or heatmap
    command: String,
    /// Configuration file with `key = value` lines.
    config: Option<String>,
    /// Extra `key=value` settings; they replace the file's values.
    #[arg(short = 's', long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (overrides `out`).
    #[arg(long)]
    out: Option<String>,
    /// Omit the timestamp comment from CSV files.
    #[arg(long)]
    no_timestamp: bool,
}

fn execute(args: Args) -> Result<Vec<String>, CliError> {
    init_threads()?;
    let command: Command = args.command.parse().map_err(CliError::Usage)?;
    let text = match &args.config {
        None => String::new(),
        Some(path) => std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?,
    };
    let mut overrides = vec![("command".to_string(), command.name().to_string())];
    for kv in &args.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Usage(format!("expected KEY=VALUE, got '{}'", kv)))?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(dir) = &args.out {
        overrides.push(("out".to_string(), dir.clone()));
    }
    let mut cfg = parse_config(&apply_overrides(&text, &overrides))?;
    cfg.timestamp = !args.no_timestamp;
    let res = run(&cfg)?;
    let mut lines = res.summary;
    lines.extend(res.files.iter().map(|f| format!("wrote {}", res.out_dir.join(f).display())));
    Ok(lines)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_IO as u8 } else { EXIT_OK as u8 });
        }
    };
    match execute(args) {
        Ok(lines) => {
            let mut out = std::io::stdout().lock();
            for l in lines {
                if writeln!(out, "{}", l).is_err() {
                    break;
                }
            }
            ExitCode::from(EXIT_OK as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
