//! Result type shared by all constraint channels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cslcore::{CslParams, LAMBDA_STANDARD};
use crate::error::{Error, Result};
use crate::units::{Dim, Qty, Unit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    /// λ must be at least `lambda_bound` for the observed process to complete.
    LowerBound,
    /// λ must not exceed `lambda_bound`.
    UpperBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Flag {
    /// The comparison itself is questionable; never used for exclusion.
    Dubious,
    /// Known to overestimate the rate.
    OverBound,
    /// The quoted requirement is an upper estimate ("or less").
    UpperEstimate,
    /// A reference rate rather than a constraint.
    Informational,
    /// Inputs fall outside the regime where the formula holds.
    InvalidRegime,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Flag::Dubious => "dubious",
            Flag::OverBound => "over_bound",
            Flag::UpperEstimate => "upper_estimate",
            Flag::Informational => "informational",
            Flag::InvalidRegime => "invalid_regime",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub name: String,
    pub value: f64,
    pub unit: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelResult {
    pub channel_id: String,
    pub kind: BoundKind,
    /// Required λ (lower bounds) or largest allowed λ (upper bounds), s^-1.
    pub lambda_bound: Qty,
    /// `lambda_bound / 2.2e-17 s^-1`.
    pub multiplier_vs_standard: f64,
    /// `lambda_bound / λ` for the λ the channel was evaluated at.
    pub factor_vs_params: f64,
    pub uncertainty_decades: f64,
    pub observables: Vec<Observable>,
    pub flags: Vec<Flag>,
    pub notes: Vec<String>,
    pub refs: Vec<String>,
}

impl ChannelResult {
    pub fn new(
        channel_id: &str,
        kind: BoundKind,
        lambda_bound: Qty,
        params: &CslParams,
        uncertainty_decades: f64,
    ) -> Result<Self> {
        lambda_bound.expect_dim(Dim::RATE, "lambda bound")?;
        if lambda_bound.value() < 0.0 {
            return Err(Error::invalid("lambda_bound", "must be non-negative"));
        }
        Ok(Self {
            channel_id: channel_id.to_string(),
            kind,
            lambda_bound,
            multiplier_vs_standard: lambda_bound.value() / LAMBDA_STANDARD,
            factor_vs_params: (lambda_bound / params.lambda()).as_scalar()?,
            uncertainty_decades,
            observables: Vec::new(),
            flags: Vec::new(),
            notes: Vec::new(),
            refs: Vec::new(),
        })
    }

    /// Record `q` expressed in `unit`.
    pub fn observe(mut self, name: &str, q: Qty, unit: &Unit) -> Result<Self> {
        self.observables.push(Observable {
            name: name.to_string(),
            value: q.to(unit)?,
            unit: unit.symbol.to_string(),
        });
        Ok(self)
    }

    pub fn observe_scalar(mut self, name: &str, value: f64) -> Self {
        self.observables.push(Observable {
            name: name.to_string(),
            value,
            unit: "1".to_string(),
        });
        self
    }

    pub fn flag(mut self, flag: Flag) -> Self {
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
            self.flags.sort();
        }
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn cite(mut self, reference: impl Into<String>) -> Self {
        self.refs.push(reference.into());
        self
    }

    pub fn observable(&self, name: &str) -> Option<f64> {
        self.observables.iter().find(|o| o.name == name).map(|o| o.value)
    }

    pub fn has_flag(&self, flag: Flag) -> bool {
        self.flags.contains(&flag)
    }

    pub fn flags_label(&self) -> String {
        self.flags.iter().map(|f| f.as_str()).collect::<Vec<_>>().join(";")
    }
}

impl fmt::Display for ChannelResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            BoundKind::LowerBound => "lower bound (required lambda)",
            BoundKind::UpperBound => "upper bound (allowed lambda)",
        };
        writeln!(f, "channel      {}", self.channel_id)?;
        writeln!(f, "kind         {kind}")?;
        writeln!(f, "lambda       {:.3e} s^-1", self.lambda_bound.value())?;
        writeln!(
            f,
            "multiplier   {:.3e} x standard (+/- {} decades)",
            self.multiplier_vs_standard, self.uncertainty_decades
        )?;
        writeln!(f, "vs params    {:.3e}", self.factor_vs_params)?;
        for o in &self.observables {
            writeln!(f, "  {:<36} {:.4e} {}", o.name, o.value, o.unit)?;
        }
        if !self.flags.is_empty() {
            writeln!(f, "flags        {}", self.flags_label())?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        for r in &self.refs {
            writeln!(f, "ref:  {r}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::units::{CM, PER_S};

    #[test]
    fn multiplier_tracks_standard() {
        let p = CslParams::case_i();
        let r = ChannelResult::new("x", BoundKind::UpperBound, PER_S.of(1.1e-5), &p, 1.0).unwrap();
        assert!(((r.multiplier_vs_standard - 1.1e-5 / 2.2e-17) / r.multiplier_vs_standard).abs() < 1e-12);
        assert!((r.factor_vs_params - 1.1e-5 / 4e-10).abs() / r.factor_vs_params < 1e-12);
    }

    #[test]
    fn wrong_dimension_rejected() {
        let p = CslParams::standard();
        assert!(ChannelResult::new("x", BoundKind::UpperBound, CM.of(1.0), &p, 0.0).is_err());
    }

    #[test]
    fn flags_deduplicate_and_sort() {
        let p = CslParams::standard();
        let r = ChannelResult::new("x", BoundKind::UpperBound, PER_S.of(1.0), &p, 0.0)
            .unwrap()
            .flag(Flag::OverBound)
            .flag(Flag::Dubious)
            .flag(Flag::OverBound);
        assert_eq!(r.flags_label(), "dubious;over_bound");
    }
}
