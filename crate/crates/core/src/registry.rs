//! Channel identifiers, evaluation by id, and key overrides for single runs.

use serde_json::Value;

use crate::channel::ChannelResult;
use crate::config::Models;
use crate::cslcore::CslParams;
use crate::error::{Error, Result};
use crate::lower_channels::{etched_track_lower_bound, photographic_lower_bound, vision_estimates};
use crate::phonon::photographic_thermal_channel;
use crate::upper_channels::{
    cmb_budget_bound, dust_grain_bound, excitation_bound, fullerene_bound, igm_bound, igm_combined, igm_present_bound,
    planetary_bound, radiation_bounds, supercurrent_bound, ExcitationTarget,
};

/// Channels that produce a bound on λ and take part in scans.
pub const SCAN_CHANNELS: &[&str] = &[
    "photographic",
    "photographic_thermal",
    "etched_track",
    "fullerene",
    "supercurrent",
    "hydrogen",
    "proton",
    "germanium",
    "radiation",
    "cmb",
    "igm",
    "dust",
    "planetary",
];

/// Reference rates that `eval` reports but scans skip.
pub const INFO_CHANNELS: &[&str] = &["vision"];

pub fn is_known(id: &str) -> bool {
    SCAN_CHANNELS.contains(&id) || INFO_CHANNELS.contains(&id)
}

/// Model sections a channel reads, in lookup order for overrides.
pub fn model_sections(id: &str) -> Result<&'static [&'static str]> {
    Ok(match id {
        "photographic" => &["emulsion"],
        "photographic_thermal" => &["lattice", "emulsion"],
        "etched_track" => &["track"],
        "fullerene" => &["fullerene"],
        "supercurrent" => &["supercurrent"],
        "hydrogen" | "germanium" => &[],
        "proton" => &["proton_scale_gev"],
        "radiation" => &["radiation"],
        "cmb" => &["cmb"],
        "igm" => &["cosmology", "igm_high_z", "igm_present", "igm_present_age_s"],
        "dust" => &["dust"],
        "planetary" => &["planetary"],
        "vision" => &[],
        other => return Err(Error::UnknownChannel(other.to_string())),
    })
}

/// Short names accepted on the command line.
pub fn resolve_alias(key: &str) -> &str {
    match key {
        "Tg" | "tg" | "T_g" => "grain_temperature_k",
        "kappa" | "kappa'" => "kappa_prime",
        other => other,
    }
}

/// Primary result plus any companion results for display.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub primary: ChannelResult,
    pub companions: Vec<ChannelResult>,
}

impl Evaluation {
    fn single(primary: ChannelResult) -> Self {
        Self {
            primary,
            companions: Vec::new(),
        }
    }

    pub fn all(&self) -> impl Iterator<Item = &ChannelResult> {
        self.companions.iter().chain(std::iter::once(&self.primary))
    }
}

pub fn evaluate(id: &str, p: &CslParams, m: &Models) -> Result<Evaluation> {
    Ok(match id {
        "photographic" => Evaluation::single(photographic_lower_bound(p, &m.emulsion)?),
        "photographic_thermal" => Evaluation::single(photographic_thermal_channel(p, &m.lattice, &m.emulsion)?),
        "etched_track" => Evaluation::single(etched_track_lower_bound(p, &m.track)?),
        "fullerene" => Evaluation::single(fullerene_bound(p, &m.fullerene)?),
        "supercurrent" => Evaluation::single(supercurrent_bound(p, &m.supercurrent)?),
        "hydrogen" => Evaluation::single(excitation_bound(p, &ExcitationTarget::hydrogen())?),
        "proton" => {
            let constituent = excitation_bound(p, &ExcitationTarget::proton_constituent(m.proton_scale_gev))?;
            let current = excitation_bound(p, &ExcitationTarget::proton_current(m.proton_scale_gev))?;
            Evaluation {
                primary: constituent,
                companions: vec![current],
            }
        }
        "germanium" => Evaluation::single(excitation_bound(p, &ExcitationTarget::germanium_nuclear())?),
        "radiation" => {
            let (free, neutral) = radiation_bounds(p, &m.radiation)?;
            Evaluation {
                primary: neutral,
                companions: vec![free],
            }
        }
        "cmb" => Evaluation::single(cmb_budget_bound(p, &m.cmb)?),
        "igm" => {
            let hi = igm_bound(p, &m.cosmology, &m.igm_high_z)?;
            let lo = igm_present_bound(p, &m.igm_present, m.igm_present_age_s)?;
            let combined = igm_combined(p, &[hi.clone(), lo.clone()])?;
            Evaluation {
                primary: combined,
                companions: vec![hi, lo],
            }
        }
        "dust" => Evaluation::single(dust_grain_bound(p, &m.dust)?),
        "planetary" => Evaluation::single(planetary_bound(p, &m.planetary)?),
        "vision" => {
            let mut v = vision_estimates(p)?;
            let rod = v
                .pop()
                .ok_or_else(|| Error::Precondition("no vision estimates".into()))?;
            Evaluation {
                primary: rod,
                companions: v,
            }
        }
        other => return Err(Error::UnknownChannel(other.to_string())),
    })
}

fn parse_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

/// Apply `key = value` overrides to the model sections of channel `id`.
/// Keys may be plain field names (searched in the channel's sections),
/// aliases, or dotted paths such as `dust.kappa_prime`.
pub fn apply_overrides(id: &str, models: &Models, overrides: &[(String, String)]) -> Result<Models> {
    let sections = model_sections(id)?;
    let mut doc = serde_json::to_value(models)?;
    for (key, raw) in overrides {
        let key = resolve_alias(key.trim_start_matches('-'));
        let value = parse_value(raw);
        let target = if let Some((section, field)) = key.split_once('.') {
            doc.get_mut(section)
                .and_then(|s| s.get_mut(field))
                .ok_or_else(|| Error::Config(format!("unknown override '{key}'")))?
        } else {
            let mut found = None;
            for s in sections {
                let has = match &doc[*s] {
                    Value::Object(o) => o.contains_key(key),
                    _ => *s == key,
                };
                if has {
                    found = Some(*s);
                    break;
                }
            }
            let s = found.ok_or_else(|| Error::Config(format!("channel '{id}' has no parameter '{key}'")))?;
            match &mut doc[s] {
                Value::Object(o) => o.get_mut(key).expect("checked"),
                other => other,
            }
        };
        *target = value;
    }
    let merged: Models = serde_json::from_value(doc).map_err(|e| Error::Config(format!("invalid override: {e}")))?;
    merged.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(merged)
}
