use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rmf_lab::experiment::{parse_config_text, run, Command, ExperimentConfig};
use rmf_lab::LabError;

/// Batch experiments on Rademacher random multiplicative functions.
///
/// Every flag is also a config-file key (`key = value` per line, `#`
/// comments). Flags override the file.
#[derive(Parser, Debug)]
#[command(name = "rmf-lab", version)]
struct Cli {
    /// simulate | lower-probe | verify | schedule | chaos-probe | identity-check
    command: String,
    /// Suite names for `verify` (default: all).
    suites: Vec<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated seed list, decimal or 0x-hex.
    #[arg(long)]
    seed: Option<String>,
    /// Number of seeds base-seed, base-seed+1, ...
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    base_seed: Option<String>,
    #[arg(long)]
    x_max: Option<String>,
    /// rademacher | completely-mult | steinhaus
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    test_gamma: Option<String>,
    #[arg(long = "K")]
    k: Option<String>,
    /// `a..b` or a single value.
    #[arg(long)]
    ell: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    ladder_k: Option<String>,
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    y_ladder: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    sieve_ceiling: Option<String>,
    /// full | quick
    #[arg(long)]
    scale: Option<String>,
    #[arg(long)]
    abort_after: Option<String>,
}

impl Cli {
    fn flag_pairs(&self) -> Vec<(String, String)> {
        let flags = [
            ("seed", &self.seed),
            ("seeds", &self.seeds),
            ("base-seed", &self.base_seed),
            ("x-max", &self.x_max),
            ("model", &self.model),
            ("gamma", &self.gamma),
            ("test-gamma", &self.test_gamma),
            ("K", &self.k),
            ("ell", &self.ell),
            ("lambda", &self.lambda),
            ("ladder-k", &self.ladder_k),
            ("threshold", &self.threshold),
            ("q", &self.q),
            ("sigma", &self.sigma),
            ("y-ladder", &self.y_ladder),
            ("samples", &self.samples),
            ("out", &self.out),
            ("format", &self.format),
            ("workers", &self.workers),
            ("sieve-ceiling", &self.sieve_ceiling),
            ("scale", &self.scale),
            ("abort-after", &self.abort_after),
        ];
        let mut out: Vec<(String, String)> =
            flags.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))).collect();
        if !self.suites.is_empty() {
            out.push(("suites".into(), self.suites.join(",")));
        }
        out
    }
}

fn config(cli: &Cli) -> Result<ExperimentConfig, LabError> {
    let command: Command = cli.command.parse()?;
    let mut pairs = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| LabError::Config(format!("{}: {e}", p.display())))?;
            parse_config_text(&text)?
        }
        None => Vec::new(),
    };
    // a seed choice on the command line replaces the file's
    let flags = cli.flag_pairs();
    if flags.iter().any(|(k, _)| k == "seed" || k == "seeds") {
        pairs.retain(|(k, _)| !matches!(k.replace('_', "-").as_str(), "seed" | "seeds"));
    }
    pairs.extend(flags);
    pairs.retain(|(k, _)| k != "command");
    ExperimentConfig::from_pairs(command, &pairs)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config(&cli).and_then(|c| run(&c));
    match result {
        Ok((report, code)) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            for v in &report.verdicts {
                eprintln!("{}", v.summary());
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
