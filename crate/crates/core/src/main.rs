use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};

use hardylab::batch::{emit, parse_config, render_csv, render_json, run, OutputFormat, RunConfig, RunReport, Selection};
use hardylab::catalog::{sharp_constant_for, Family, Params};
use hardylab::model::HomogeneousSetting;
use hardylab::sharpness::{frs_constant, frs_minimizer};

/// Numerical verification of weighted Hardy-type inequalities on radial profiles.
#[derive(Parser)]
#[command(name = "hardylab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the hypotheses of every instance in a config.
    Validate { config: PathBuf },
    /// Evaluate every instance on its profiles, plus the identity checks.
    Verify { config: PathBuf },
    /// Run the sharpness probes.
    Probe { config: PathBuf },
    /// Run everything and write the report.
    Report {
        config: PathBuf,
        #[arg(long, value_parser = OutputFormat::from_str)]
        format: Option<OutputFormat>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The constant c_p of the remainder estimates and its minimizer.
    Frs { p: f64 },
    /// Sharp constant of a family, e.g. `constants EulerHardy Q=4 p=2 alpha=0`.
    Constants { family: String, params: Vec<String> },
}

fn load(path: &PathBuf) -> Result<(RunConfig, String), String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let config = parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((config, text))
}

fn summary(report: &RunReport) {
    for item in &report.items {
        let status = serde_json::to_value(item.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        match &item.error {
            Some(e) => println!("{:<13} {:<40} {status}: {e}", item.kind, item.name),
            None => println!("{:<13} {:<40} {status}", item.kind, item.name),
        }
    }
    println!("{} items in {:.3} s", report.items.len(), report.meta.wall_time_s);
}

fn batch(path: &PathBuf, selection: Selection) -> Result<i32, String> {
    let (config, text) = load(path)?;
    let report = run(&config, &text, selection);
    summary(&report);
    Ok(report.exit_code())
}

fn parse_params(items: &[String]) -> Result<(f64, f64, Params), String> {
    let mut table = toml::Table::new();
    let (mut q, mut sigma) = (None, 1.0);
    for item in items {
        let (k, v) = item.split_once('=').ok_or_else(|| format!("expected name=value, got {item}"))?;
        let v: f64 = v.trim().parse().map_err(|_| format!("{k}: not a number: {v}"))?;
        match k.trim() {
            "Q" => q = Some(v),
            "sigma" => sigma = v,
            other => {
                table.insert(other.to_string(), toml::Value::Float(v));
            }
        }
    }
    let params: Params = table.try_into().map_err(|e: toml::de::Error| e.message().to_string())?;
    Ok((q.ok_or("missing Q=<homogeneous dimension>")?, sigma, params))
}

fn execute(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Validate { config } => batch(&config, Selection::Validate),
        Command::Verify { config } => batch(&config, Selection::Verify),
        Command::Probe { config } => batch(&config, Selection::Probe),
        Command::Report { config: path, format, out } => {
            let (config, text) = load(&path)?;
            let report = run(&config, &text, Selection::All);
            let spec = config.output.as_ref();
            let format = format.or(spec.map(|o| o.format)).unwrap_or(OutputFormat::Json);
            let out = out.or_else(|| spec.and_then(|o| o.path.clone()).map(PathBuf::from));
            match out {
                Some(p) => emit(&report, format, &p).map_err(|e| e.to_string())?,
                None => {
                    let body = match format {
                        OutputFormat::Json => render_json(&report),
                        OutputFormat::Csv => render_csv(&report),
                    };
                    print!("{}", body.map_err(|e| e.to_string())?);
                }
            }
            Ok(report.exit_code())
        }
        Command::Frs { p } => {
            let c = frs_constant(p).map_err(|e| e.to_string())?;
            let (t, _) = frs_minimizer(p);
            println!("{}", serde_json::json!({ "p": p, "c_p": c, "minimizer": t }));
            Ok(0)
        }
        Command::Constants { family, params } => {
            let family = Family::from_str(&family).map_err(|e| e.to_string())?;
            let (q, sigma, params) = parse_params(&params)?;
            let setting = HomogeneousSetting::with_sigma(q, sigma).map_err(|e| e.to_string())?;
            let c = sharp_constant_for(family, &params, &setting).map_err(|e| e.to_string())?;
            println!("{}", serde_json::to_string(&c).map_err(|e| e.to_string())?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    // usage errors exit with 1; clap's own default of 2 means "inconclusive" here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
