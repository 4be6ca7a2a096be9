//! Exclusion grid over (λ, r_C).

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{BoundKind, ChannelResult, Flag};
use crate::config::{GridSpec, Models, OutputFormat};
use crate::cslcore::CslParams;
use crate::error::{Error, Result};
use crate::registry::{evaluate, is_known};

pub const COMBINED: &str = "combined";
pub const CSV_HEADER: [&str; 7] = [
    "lambda_s_inv",
    "r_c_cm",
    "channel",
    "verdict",
    "bound_s_inv",
    "multiplier",
    "flags",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Allowed,
    Excluded,
    LowerBoundUnmet,
    Flagged,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Allowed => "allowed",
            Verdict::Excluded => "excluded",
            Verdict::LowerBoundUnmet => "lower_bound_unmet",
            Verdict::Flagged => "flagged",
        })
    }
}

/// Compare λ against a bound widened by its uncertainty in the direction
/// favourable to λ.
pub fn verdict_for(lambda: f64, r: &ChannelResult) -> Verdict {
    if r.has_flag(Flag::Dubious) || r.has_flag(Flag::InvalidRegime) {
        return Verdict::Flagged;
    }
    let widen = 10f64.powf(r.uncertainty_decades);
    let bound = r.lambda_bound.value();
    match r.kind {
        BoundKind::UpperBound if lambda > bound * widen => Verdict::Excluded,
        BoundKind::LowerBound if lambda < bound / widen => Verdict::LowerBoundUnmet,
        _ => Verdict::Allowed,
    }
}

/// Whether a channel's verdict enters the combined verdict.
pub fn counts_toward_combined(r: &ChannelResult) -> bool {
    r.flags.is_empty()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellEntry {
    pub channel: String,
    pub verdict: Verdict,
    pub bound_s_inv: Option<f64>,
    pub multiplier: Option<f64>,
    pub flags: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub lambda_s_inv: f64,
    pub r_c_cm: f64,
    pub entries: Vec<CellEntry>,
}

impl Cell {
    pub fn verdict(&self, channel: &str) -> Option<Verdict> {
        self.entries.iter().find(|e| e.channel == channel).map(|e| e.verdict)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExclusionGrid {
    pub lambda_axis: Vec<f64>,
    pub rc_axis: Vec<f64>,
    pub channels: Vec<String>,
    /// Row-major: all λ for the first r_C, then the next r_C.
    pub cells: Vec<Cell>,
}

impl ExclusionGrid {
    pub fn cell(&self, i_lambda: usize, j_rc: usize) -> &Cell {
        &self.cells[j_rc * self.lambda_axis.len() + i_lambda]
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for c in &self.cells {
            for e in &c.entries {
                w.write_record([
                    format!("{:.6e}", c.lambda_s_inv),
                    format!("{:.6e}", c.r_c_cm),
                    e.channel.clone(),
                    e.verdict.to_string(),
                    e.bound_s_inv.map(|b| format!("{b:.6e}")).unwrap_or_default(),
                    e.multiplier.map(|m| format!("{m:.6e}")).unwrap_or_default(),
                    e.flags.clone(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, format: OutputFormat, out: W) -> Result<()> {
        match format {
            OutputFormat::Csv => self.write_csv(out),
            OutputFormat::Json => self.write_json(out),
        }
    }
}

fn evaluate_cell(lambda: f64, r_c: f64, channels: &[String], m: &Models) -> Cell {
    let params = CslParams::from_values(lambda, r_c);
    let mut entries = Vec::with_capacity(channels.len() + 1);
    let mut excluded = false;
    let mut unmet = false;
    for id in channels {
        let result = params
            .as_ref()
            .map_err(|e| e.to_string())
            .and_then(|p| evaluate(id, p, m).map_err(|e| e.to_string()));
        let entry = match result {
            Ok(e) => {
                let r = e.primary;
                let verdict = verdict_for(lambda, &r);
                if counts_toward_combined(&r) {
                    excluded |= verdict == Verdict::Excluded;
                    unmet |= verdict == Verdict::LowerBoundUnmet;
                }
                CellEntry {
                    channel: id.clone(),
                    verdict,
                    bound_s_inv: Some(r.lambda_bound.value()),
                    multiplier: Some(r.multiplier_vs_standard),
                    flags: r.flags_label(),
                }
            }
            Err(_) => CellEntry {
                channel: id.clone(),
                verdict: Verdict::Flagged,
                bound_s_inv: None,
                multiplier: None,
                flags: Flag::InvalidRegime.as_str().to_string(),
            },
        };
        entries.push(entry);
    }
    let combined = if excluded {
        Verdict::Excluded
    } else if unmet {
        Verdict::LowerBoundUnmet
    } else {
        Verdict::Allowed
    };
    entries.push(CellEntry {
        channel: COMBINED.to_string(),
        verdict: combined,
        bound_s_inv: None,
        multiplier: None,
        flags: String::new(),
    });
    Cell {
        lambda_s_inv: lambda,
        r_c_cm: r_c,
        entries,
    }
}

/// Evaluate every channel in every cell. `threads` of `None` uses the
/// global pool; the result does not depend on the worker count.
pub fn scan(grid: &GridSpec, channels: &[String], models: &Models, threads: Option<usize>) -> Result<ExclusionGrid> {
    grid.validate()?;
    if channels.is_empty() {
        return Err(Error::Config("channel list is empty".into()));
    }
    for c in channels {
        if !is_known(c) {
            return Err(Error::UnknownChannel(c.clone()));
        }
    }
    let (lambda_axis, rc_axis) = grid.axes();
    let points: Vec<(f64, f64)> = rc_axis
        .iter()
        .flat_map(|&r| lambda_axis.iter().map(move |&l| (l, r)))
        .collect();
    let run = || -> Vec<Cell> {
        points
            .par_iter()
            .map(|&(l, r)| evaluate_cell(l, r, channels, models))
            .collect()
    };
    let cells = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    Ok(ExclusionGrid {
        lambda_axis,
        rc_axis,
        channels: channels.to_vec(),
        cells,
    })
}
