//! Run configuration: a single JSON document merged over embedded defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cslcore::CslParams;
use crate::error::{Error, Result};
use crate::lower_channels::{EmulsionModel, TrackModel};
use crate::phonon::{CarrierModel, LatticeModel};
use crate::projections::ParameterCase;
use crate::upper_channels::{
    CmbModel, Cosmology, DustModel, FullereneModel, IgmState, PlanetaryModel, RadiationModel, SupercurrentModel,
    UNIVERSE_AGE_S,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULTS_JSON: &str = include_str!("../config/defaults.json");
pub const SCHEMA_JSON: &str = include_str!("../config/config.schema.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lambda_min_s_inv: f64,
    pub lambda_max_s_inv: f64,
    pub lambda_points: usize,
    pub r_c_min_cm: f64,
    pub r_c_max_cm: f64,
    pub r_c_points: usize,
}

impl GridSpec {
    pub fn single(p: &CslParams) -> Self {
        Self {
            lambda_min_s_inv: p.lambda().value(),
            lambda_max_s_inv: p.lambda().value(),
            lambda_points: 1,
            r_c_min_cm: p.r_c().value(),
            r_c_max_cm: p.r_c().value(),
            r_c_points: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, lo, hi, n) in [
            (
                "lambda",
                self.lambda_min_s_inv,
                self.lambda_max_s_inv,
                self.lambda_points,
            ),
            ("r_c", self.r_c_min_cm, self.r_c_max_cm, self.r_c_points),
        ] {
            if !(lo > 0.0 && hi.is_finite()) {
                return Err(Error::Config(format!("grid {name} range must be positive and finite")));
            }
            if n == 0 {
                return Err(Error::Config(format!("grid {name} needs at least one point")));
            }
            if n == 1 && lo != hi {
                return Err(Error::Config(format!("grid {name} with one point needs min == max")));
            }
            if n > 1 && !(hi > lo) {
                return Err(Error::Config(format!("grid {name} max must exceed min")));
            }
        }
        Ok(())
    }

    /// Log-spaced axes, strictly increasing.
    pub fn axes(&self) -> (Vec<f64>, Vec<f64>) {
        (
            log_axis(self.lambda_min_s_inv, self.lambda_max_s_inv, self.lambda_points),
            log_axis(self.r_c_min_cm, self.r_c_max_cm, self.r_c_points),
        )
    }
}

fn log_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else if i == 0 {
                lo
            } else {
                10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Models {
    pub emulsion: EmulsionModel,
    pub track: TrackModel,
    pub fullerene: FullereneModel,
    pub supercurrent: SupercurrentModel,
    pub proton_scale_gev: f64,
    pub radiation: RadiationModel,
    pub cmb: CmbModel,
    pub cosmology: Cosmology,
    pub igm_high_z: IgmState,
    pub igm_present: IgmState,
    pub igm_present_age_s: f64,
    pub dust: DustModel,
    pub planetary: PlanetaryModel,
    pub lattice: LatticeModel,
    pub carrier: CarrierModel,
}

impl Default for Models {
    fn default() -> Self {
        Self {
            emulsion: EmulsionModel::default(),
            track: TrackModel::default(),
            fullerene: FullereneModel::default(),
            supercurrent: SupercurrentModel::default(),
            proton_scale_gev: 250.0,
            radiation: RadiationModel::default(),
            cmb: CmbModel::default(),
            cosmology: Cosmology::default(),
            igm_high_z: IgmState::default(),
            igm_present: IgmState::present_day(),
            igm_present_age_s: UNIVERSE_AGE_S,
            dust: DustModel::default(),
            planetary: PlanetaryModel::default(),
            lattice: LatticeModel::default(),
            carrier: CarrierModel::default(),
        }
    }
}

impl Models {
    pub fn validate(&self) -> Result<()> {
        self.emulsion.validate()?;
        self.track.validate()?;
        self.cosmology.validate()?;
        self.lattice.validate()?;
        if !(self.proton_scale_gev > 0.0) {
            return Err(Error::Config("proton_scale_gev must be positive".into()));
        }
        if !(self.igm_present_age_s > 0.0) {
            return Err(Error::Config("igm_present_age_s must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub case: String,
    pub lambda_s_inv: Option<f64>,
    pub r_c_cm: Option<f64>,
    pub channels: Vec<String>,
    pub output: OutputFormat,
    pub grid: GridSpec,
    /// Multiplies every regression tolerance; 0 demands exact agreement.
    pub tolerance_scale: f64,
    /// Reserved; every computation is deterministic.
    pub seed: Option<u64>,
    pub models: Models,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::from_value(serde_json::from_str(DEFAULTS_JSON).expect("embedded defaults parse"))
            .expect("embedded defaults are valid")
    }
}

/// Objects merge key by key; anything else replaces.
pub fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

impl RunConfig {
    fn from_value(v: Value) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_value(v).map_err(|e| Error::Config(format!("schema violation: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parse a user document and merge it over the defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let overlay: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
        if !overlay.is_object() {
            return Err(Error::Config("config must be a JSON object".into()));
        }
        Self::with_overlay(overlay)
    }

    pub fn with_overlay(overlay: Value) -> Result<Self> {
        let mut base: Value = serde_json::from_str(DEFAULTS_JSON)?;
        merge(&mut base, overlay);
        Self::from_value(base)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.case.parse::<ParameterCase>()?;
        if self.channels.is_empty() {
            return Err(Error::Config("channel list is empty".into()));
        }
        for c in &self.channels {
            if !crate::registry::is_known(c) {
                return Err(Error::UnknownChannel(c.clone()));
            }
        }
        if !(self.tolerance_scale >= 0.0 && self.tolerance_scale.is_finite()) {
            return Err(Error::Config("tolerance_scale must be non-negative".into()));
        }
        self.grid.validate()?;
        self.models.validate()?;
        self.params()?;
        Ok(())
    }

    /// The named case with any explicit λ or r_C applied on top.
    pub fn params(&self) -> Result<CslParams> {
        let mut p = self.case.parse::<ParameterCase>()?.params;
        if let Some(l) = self.lambda_s_inv {
            p = p.with_lambda(l).map_err(|e| Error::Config(e.to_string()))?;
        }
        if let Some(r) = self.r_c_cm {
            p = p.with_r_c(r).map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn embedded_defaults_match_code_defaults() {
        let cfg = RunConfig::default();
        let code = Models::default();
        assert_eq!(cfg.models.emulsion, code.emulsion);
        assert_eq!(cfg.models.track, code.track);
        assert_eq!(cfg.models.fullerene, code.fullerene);
        assert_eq!(cfg.models.supercurrent, code.supercurrent);
        assert_eq!(cfg.models.radiation, code.radiation);
        assert_eq!(cfg.models.cmb, code.cmb);
        assert_eq!(cfg.models.cosmology, code.cosmology);
        assert_eq!(cfg.models.igm_high_z, code.igm_high_z);
        assert!((cfg.models.igm_present.temperature_k / code.igm_present.temperature_k - 1.0).abs() < 1e-14);
        assert_eq!(cfg.models.dust, code.dust);
        assert_eq!(cfg.models.planetary, code.planetary);
        assert_eq!(cfg.models.lattice, code.lattice);
        assert_eq!(cfg.models.carrier, code.carrier);
        assert_eq!(cfg.params().unwrap(), CslParams::standard());
    }

    #[test]
    fn partial_override_keeps_siblings() {
        let cfg = RunConfig::from_json(r#"{"models": {"dust": {"grain_temperature_k": 25}}}"#).unwrap();
        assert_eq!(cfg.models.dust.grain_temperature_k, 25.0);
        assert_eq!(cfg.models.dust.kappa_prime, 0.05);
        assert_eq!(cfg.models.igm_present.z, 0.06);
    }

    #[test]
    fn schema_violations() {
        assert!(matches!(RunConfig::from_json(r#"{"bogus": 1}"#), Err(Error::Config(_))));
        assert!(matches!(
            RunConfig::from_json(r#"{"models": {"dust": {"kappa": 1}}}"#),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            RunConfig::from_json(r#"{"schema_version": 2}"#),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            RunConfig::from_json(r#"{"channels": []}"#),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            RunConfig::from_json(r#"{"channels": ["nope"]}"#),
            Err(Error::UnknownChannel(_))
        ));
        assert!(matches!(RunConfig::from_json("[1]"), Err(Error::Config(_))));
        assert!(matches!(
            RunConfig::from_json(r#"{"case": "case9"}"#),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            RunConfig::from_json(r#"{"lambda_s_inv": -1}"#),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn explicit_parameters_override_case() {
        let cfg = RunConfig::with_overlay(json!({"case": "case2", "lambda_s_inv": 1e-9})).unwrap();
        let p = cfg.params().unwrap();
        assert_eq!(p.lambda().value(), 1e-9);
        assert_eq!(p.r_c().value(), 1e-4);
    }

    #[test]
    fn axes_are_log_spaced_and_increasing() {
        let (l, r) = RunConfig::default().grid.axes();
        assert_eq!(l.len(), 50);
        assert_eq!(l[0], 1e-18);
        assert_eq!(l[49], 1e-2);
        assert_eq!(r[49], 1e-3);
        assert!(l.windows(2).all(|w| w[1] > w[0]));
        let step = (l[1] / l[0]).log10();
        assert!(((l[30] / l[29]).log10() - step).abs() < 1e-12);
    }

    #[test]
    fn schema_lists_every_top_level_key() {
        let schema: Value = serde_json::from_str(SCHEMA_JSON).unwrap();
        let defaults: Value = serde_json::from_str(DEFAULTS_JSON).unwrap();
        let props = schema["properties"].as_object().unwrap();
        for key in defaults.as_object().unwrap().keys() {
            assert!(props.contains_key(key), "schema lacks {key}");
        }
        let model_props = schema["properties"]["models"]["properties"].as_object().unwrap();
        for key in defaults["models"].as_object().unwrap().keys() {
            assert!(model_props.contains_key(key), "schema lacks models.{key}");
        }
    }
}
