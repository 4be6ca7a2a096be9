use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cslbounds::config::{GridSpec, OutputFormat, RunConfig};
use cslbounds::oracle::verification_report;
use cslbounds::registry::{apply_overrides, evaluate};
use cslbounds::report::regression_report;
use cslbounds::scan::scan;
use cslbounds::Error;

#[derive(Parser)]
#[command(
    name = "cslbounds",
    version,
    about = "Bounds on the CSL collapse rate from experiment and astrophysics"
)]
struct Cli {
    /// JSON run configuration merged over the built-in defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Case {
    Standard,
    Case1,
    Case2,
}

impl Case {
    fn name(self) -> &'static str {
        match self {
            Case::Standard => "standard",
            Case::Case1 => "case1",
            Case::Case2 => "case2",
        }
    }
}

#[derive(clap::Args)]
struct ParamArgs {
    #[arg(long, value_enum)]
    case: Option<Case>,
    /// Collapse rate in s^-1
    #[arg(long)]
    lambda: Option<f64>,
    /// Correlation length in cm
    #[arg(long = "rc")]
    r_c: Option<f64>,
}

impl ParamArgs {
    fn given(&self) -> bool {
        self.case.is_some() || self.lambda.is_some() || self.r_c.is_some()
    }

    fn apply(&self, cfg: &mut RunConfig) -> cslbounds::Result<()> {
        if let Some(c) = self.case {
            cfg.case = c.name().to_string();
            cfg.lambda_s_inv = None;
            cfg.r_c_cm = None;
        }
        if self.lambda.is_some() {
            cfg.lambda_s_inv = self.lambda;
        }
        if self.r_c.is_some() {
            cfg.r_c_cm = self.r_c;
        }
        cfg.validate()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compare every anchored value with its published figure
    Report {
        /// Only rows for this channel
        #[arg(long)]
        channel: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Multiply every tolerance; 0 demands exact agreement
        #[arg(long)]
        tolerance_scale: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate channels over a (lambda, r_C) grid
    Scan {
        /// Restrict to these channels (repeatable)
        #[arg(long = "channel")]
        channels: Vec<String>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; output does not depend on this
        #[arg(long)]
        threads: Option<usize>,
        /// With --case, --lambda or --rc the grid collapses to that single cell
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Evaluate one channel; extra `--key value` pairs override model inputs
    Eval {
        channel: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, hide = true)]
        overrides: Vec<String>,
    },
    /// Run the numerical verification suite
    Oracle {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnknownChannel(_) => 3,
        Error::Config(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::InvalidParameter { .. }
        | Error::DimensionMismatch { .. }
        | Error::NonFinite(_) => 2,
        _ => 1,
    }
}

fn sink(out: &Option<PathBuf>) -> cslbounds::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn pairs(raw: &[String]) -> cslbounds::Result<Overrides> {
    let mut out = Vec::new();
    let mut it = raw.iter();
    while let Some(k) = it.next() {
        let key = k
            .strip_prefix("--")
            .ok_or_else(|| Error::Config(format!("expected --key value, found '{k}'")))?;
        let (key, value) = match key.split_once('=') {
            Some((a, b)) => (a.to_string(), b.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| Error::Config(format!("override --{key} needs a value")))?;
                (key.to_string(), v.clone())
            }
        };
        out.push((key, value));
    }
    Ok(out)
}

type Overrides = Vec<(String, String)>;

/// Common flags that ended up among the trailing overrides.
fn split_common(
    mut params: ParamArgs,
    mut format: Format,
    overrides: Overrides,
) -> cslbounds::Result<(ParamArgs, Format, Overrides)> {
    let mut rest = Vec::new();
    let bad = |k: &str, v: &str| Error::Config(format!("invalid value '{v}' for --{k}"));
    for (k, v) in overrides {
        match k.as_str() {
            "lambda" => params.lambda = Some(v.parse().map_err(|_| bad(&k, &v))?),
            "rc" => params.r_c = Some(v.parse().map_err(|_| bad(&k, &v))?),
            "case" => params.case = Some(Case::from_str(&v, true).map_err(|_| bad(&k, &v))?),
            "format" => format = Format::from_str(&v, true).map_err(|_| bad(&k, &v))?,
            _ => rest.push((k, v)),
        }
    }
    Ok((params, format, rest))
}

fn run(cli: Cli) -> cslbounds::Result<u8> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Report {
            channel,
            format,
            tolerance_scale,
            out,
        } => {
            if let Some(s) = tolerance_scale {
                cfg.tolerance_scale = s;
                cfg.validate()?;
            }
            let mut report = regression_report(&cfg.models, cfg.tolerance_scale)?;
            if let Some(c) = channel {
                report = report.filtered(&c)?;
            }
            let mut w = sink(&out)?;
            match format {
                Format::Text => writeln!(w, "{report}")?,
                Format::Csv => report.write_csv(&mut w)?,
                Format::Json => {
                    serde_json::to_writer_pretty(&mut w, &report)?;
                    writeln!(w)?;
                }
            }
            w.flush()?;
            Ok(if report.all_pass() { 0 } else { 1 })
        }
        Command::Scan {
            channels,
            format,
            out,
            threads,
            params,
        } => {
            if !channels.is_empty() {
                cfg.channels = channels;
            }
            let grid = if params.given() {
                params.apply(&mut cfg)?;
                GridSpec::single(&cfg.params()?)
            } else {
                cfg.grid.clone()
            };
            cfg.validate()?;
            let format = match format {
                Some(Format::Json) => OutputFormat::Json,
                Some(Format::Csv) => OutputFormat::Csv,
                Some(Format::Text) => return Err(Error::Config("scan writes csv or json".into())),
                None => cfg.output,
            };
            let result = scan(&grid, &cfg.channels, &cfg.models, threads)?;
            let mut w = sink(&out)?;
            result.write(format, &mut w)?;
            w.flush()?;
            Ok(0)
        }
        Command::Eval {
            channel,
            params,
            format,
            overrides,
        } => {
            let (params, format, overrides) = split_common(params, format, pairs(&overrides)?)?;
            params.apply(&mut cfg)?;
            let models = apply_overrides(&channel, &cfg.models, &overrides)?;
            let eval = evaluate(&channel, &cfg.params()?, &models)?;
            let mut w = sink(&None)?;
            match format {
                Format::Text | Format::Csv => {
                    for r in eval.all() {
                        writeln!(w, "{r}")?;
                    }
                }
                Format::Json => {
                    let all: Vec<_> = eval.all().collect();
                    serde_json::to_writer_pretty(&mut w, &all)?;
                    writeln!(w)?;
                }
            }
            w.flush()?;
            Ok(0)
        }
        Command::Oracle { params, format } => {
            params.apply(&mut cfg)?;
            let report = verification_report(&cfg.params()?)?;
            let mut w = sink(&None)?;
            match format {
                Format::Json | Format::Csv => {
                    serde_json::to_writer_pretty(&mut w, &report)?;
                    writeln!(w)?;
                }
                Format::Text => {
                    for c in &report.checks {
                        writeln!(
                            w,
                            "{:<44} {:>14.6e} {:>14.6e} {:>10.2e} {:>8.0e}  {}",
                            c.name,
                            c.computed,
                            c.reference,
                            c.deviation,
                            c.tolerance,
                            if c.pass { "PASS" } else { "FAIL" }
                        )?;
                    }
                }
            }
            w.flush()?;
            Ok(if report.all_pass() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
