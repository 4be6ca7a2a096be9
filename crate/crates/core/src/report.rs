//! Regression table of anchored values: computed against published, with a
//! per-row tolerance.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::Models;
use crate::cslcore::{heating_rate, reduction_rate, CslParams, MassConfig};
use crate::error::{Error, Result};
use crate::lower_channels::{
    etched_track_lower_bound, photographic_lower_bound, photographic_side_estimates, vision_estimates,
};
use crate::phonon::{
    electron_slowdown_reduction, log10_suppression_from_ratio, mean_coherence_factor, slowdown_factor,
    thermal_fluctuation_bound, CarrierModel, SlowdownMethod,
};
use crate::projections::{collett_pearle_case, mirror_projection, ParameterCase};
use crate::registry::evaluate;
use crate::units::{constants, units};
use crate::upper_channels::{
    cmb_budget_bound, dust_grain_bound, excitation_bound, excitation_rate, fullerene_bound, igm_bound, planetary_bound,
    radiation_bounds, supercurrent_bound, ExcitationTarget,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Tolerance {
    /// `|c − p|/|p| ≤ r`.
    Relative(f64),
    /// `|log10(c/p)| ≤ log10(f)`.
    Factor(f64),
    /// `|c − p| ≤ a`.
    Absolute(f64),
}

impl Tolerance {
    pub fn deviation(&self, computed: f64, published: f64) -> f64 {
        match self {
            Tolerance::Relative(_) => ((computed - published) / published).abs(),
            Tolerance::Factor(_) => (computed / published).log10().abs(),
            Tolerance::Absolute(_) => (computed - published).abs(),
        }
    }

    pub fn limit(&self, scale: f64) -> f64 {
        match *self {
            Tolerance::Relative(r) => r * scale,
            Tolerance::Factor(f) => f.log10() * scale,
            Tolerance::Absolute(a) => a * scale,
        }
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tolerance::Relative(r) if *r >= 1e-4 => write!(f, "±{}%", (r * 1e6).round() / 1e4),
            Tolerance::Relative(r) => write!(f, "±{r:.0e} rel"),
            Tolerance::Factor(x) => write!(f, "×{x}"),
            Tolerance::Absolute(a) => write!(f, "±{a}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub channel: String,
    pub quantity: String,
    pub unit: String,
    pub computed: f64,
    pub published: f64,
    pub tolerance: Tolerance,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tolerance_scale: f64,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn filtered(&self, channel: &str) -> Result<Report> {
        let rows: Vec<ReportRow> = self.rows.iter().filter(|r| r.channel == channel).cloned().collect();
        if rows.is_empty() {
            return Err(Error::UnknownChannel(channel.to_string()));
        }
        Ok(Report {
            tolerance_scale: self.tolerance_scale,
            rows,
        })
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "channel",
            "quantity",
            "unit",
            "computed",
            "published",
            "tolerance",
            "deviation",
            "status",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.channel.clone(),
                r.quantity.clone(),
                r.unit.clone(),
                format!("{:.4e}", r.computed),
                format!("{:.4e}", r.published),
                r.tolerance.to_string(),
                format!("{:.3e}", r.deviation),
                if r.pass { "PASS" } else { "FAIL" }.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<14} {:<34} {:>12} {:>12} {:>9} {:>10}  status",
            "channel", "quantity", "computed", "published", "tol", "deviation"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<14} {:<34} {:>12.4e} {:>12.4e} {:>9} {:>10.3e}  {}",
                r.channel,
                r.quantity,
                r.computed,
                r.published,
                r.tolerance.to_string(),
                r.deviation,
                if r.pass { "PASS" } else { "FAIL" }
            )?;
        }
        let failed = self.failures().count();
        write!(
            f,
            "{} rows, {} passed, {} failed",
            self.rows.len(),
            self.rows.len() - failed,
            failed
        )
    }
}

struct Rows {
    scale: f64,
    rows: Vec<ReportRow>,
}

impl Rows {
    fn add(&mut self, channel: &str, quantity: &str, unit: &str, computed: f64, published: f64, tolerance: Tolerance) {
        let deviation = tolerance.deviation(computed, published);
        let pass = deviation.is_finite() && deviation <= tolerance.limit(self.scale);
        self.rows.push(ReportRow {
            channel: channel.into(),
            quantity: quantity.into(),
            unit: unit.into(),
            computed,
            published,
            tolerance,
            deviation,
            pass,
        });
    }
}

fn obs(r: &crate::channel::ChannelResult, name: &str) -> Result<f64> {
    r.observable(name)
        .ok_or_else(|| Error::Precondition(format!("{} lacks observable {name}", r.channel_id)))
}

/// Every anchored value, evaluated with `models` at the parameter sets the
/// published numbers refer to.
pub fn regression_report(models: &Models, tolerance_scale: f64) -> Result<Report> {
    use Tolerance::*;
    let std = CslParams::standard();
    let case_i = CslParams::case_i();
    let case_ii = CslParams::case_ii();
    let k = constants();
    let mut t = Rows {
        scale: tolerance_scale,
        rows: Vec::new(),
    };

    let e = &models.emulsion;
    let photo = photographic_lower_bound(&std, e)?;
    let eq8 = reduction_rate(&std, &MassConfig::saturated(5640.0, e.grains_per_track as f64)?)?;
    t.add(
        "photographic",
        "saturated_reduction_rate",
        "s^-1",
        eq8.value(),
        1.3e-8,
        Relative(0.10),
    );
    t.add(
        "photographic",
        "required_multiplier",
        "1",
        photo.multiplier_vs_standard,
        2e9,
        Relative(0.10),
    );
    let side = photographic_side_estimates(
        &std,
        units::EV.of(3.0),
        units::S.of(1.0 / e.speck_formation_rate_s_inv),
        1.0,
    )?;
    t.add(
        "photographic",
        "recoil_rate_times_n",
        "s^-1",
        side[0].rate.value(),
        0.5e-6,
        Relative(0.30),
    );
    t.add(
        "photographic",
        "ion_back_motion_rate_times_n",
        "s^-1",
        side[1].rate.value(),
        1e-13,
        Relative(0.30),
    );

    let track = etched_track_lower_bound(&std, &models.track)?;
    t.add(
        "etched_track",
        "required_multiplier",
        "1",
        track.multiplier_vs_standard,
        5e9,
        Relative(0.25),
    );

    let vision = vision_estimates(&case_i)?;
    t.add(
        "vision",
        "rhodopsin_rate_case_i",
        "s^-1",
        obs(&vision[0], "reduction_rate")?,
        3e-4,
        Relative(0.30),
    );
    t.add(
        "vision",
        "rod_chain_rate_case_i",
        "s^-1",
        obs(&vision[1], "reduction_rate")?,
        2e5,
        Relative(0.30),
    );

    let heat = heating_rate(&std, k.m_n)?;
    t.add(
        "heating",
        "proton_heating",
        "erg/s",
        heat.to(&units::ERG_PER_S)?,
        1.1e-37,
        Relative(0.05),
    );
    t.add(
        "heating",
        "proton_heating_ev",
        "eV/s",
        heat.to(&units::EV_PER_S)?,
        6.8e-26,
        Relative(0.05),
    );

    let igm = igm_bound(&std, &models.cosmology, &models.igm_high_z)?;
    t.add(
        "igm",
        "cooling_rate_z3",
        "eV/s",
        obs(&igm, "cooling_rate")?,
        0.5e-16,
        Relative(0.10),
    );
    t.add(
        "igm",
        "multiplier_z3",
        "1",
        igm.multiplier_vs_standard,
        8e8,
        Relative(0.25),
    );
    t.add("igm", "dt_dz_z3", "yr", obs(&igm, "dt_dz")?, 0.8e9, Relative(0.05));
    let combined = evaluate("igm", &std, models)?.primary;
    t.add(
        "igm_combined",
        "multiplier",
        "1",
        combined.multiplier_vs_standard,
        1e8,
        Factor(10.0),
    );

    let ge = excitation_bound(&std, &ExcitationTarget::germanium_nuclear())?;
    t.add(
        "germanium",
        "lambda_bound",
        "s^-1",
        ge.lambda_bound.value(),
        6e-3,
        Relative(0.20),
    );

    let (free, neutral) = radiation_bounds(&std, &models.radiation)?;
    t.add(
        "radiation",
        "free_electron_bound",
        "s^-1",
        free.lambda_bound.value(),
        1.7e-11,
        Factor(2.0),
    );
    t.add(
        "radiation",
        "neutralized_multiplier",
        "1",
        neutral.multiplier_vs_standard,
        1e12,
        Factor(10.0),
    );

    let dust = dust_grain_bound(&std, &models.dust)?;
    t.add(
        "dust",
        "emissivity",
        "eV s^-1 cm^-3",
        obs(&dust, "emissivity")?,
        2e14,
        Relative(0.25),
    );
    t.add(
        "dust",
        "volumetric_heating",
        "eV s^-1 cm^-3",
        obs(&dust, "volumetric_heating")?,
        7e-2,
        Relative(0.10),
    );
    t.add(
        "dust",
        "multiplier",
        "1",
        dust.multiplier_vs_standard,
        1e15,
        Factor(10.0),
    );

    let sc = supercurrent_bound(&std, &models.supercurrent)?;
    t.add(
        "supercurrent",
        "decay_rate",
        "s^-1",
        obs(&sc, "decay_rate")?,
        4.4e-27,
        Relative(0.15),
    );
    let sc1 = supercurrent_bound(&case_i, &models.supercurrent)?;
    t.add(
        "supercurrent",
        "decay_rate_case_i",
        "s^-1",
        obs(&sc1, "decay_rate")?,
        1e-19,
        Factor(2.0),
    );

    let h = excitation_bound(&std, &ExcitationTarget::hydrogen())?;
    t.add(
        "hydrogen",
        "excitation_rate",
        "s^-1",
        obs(&h, "excitation_rate")?,
        0.7e-35,
        Relative(0.30),
    );
    t.add(
        "hydrogen",
        "multiplier",
        "1",
        h.multiplier_vs_standard,
        4e17,
        Relative(0.10),
    );

    let bare = |target: ExcitationTarget| {
        excitation_rate(
            &std,
            &ExcitationTarget {
                selection_suppression: 1.0,
                ..target
            },
        )
    };
    let scale = models.proton_scale_gev;
    t.add(
        "proton",
        "constituent_rate",
        "s^-1",
        bare(ExcitationTarget::proton_constituent(scale))?.value(),
        1e-50,
        Factor(10.0),
    );
    t.add(
        "proton",
        "current_rate",
        "s^-1",
        bare(ExcitationTarget::proton_current(scale))?.value(),
        1e-53,
        Factor(10.0),
    );
    let proton = excitation_bound(&std, &ExcitationTarget::proton_constituent(scale))?;
    t.add(
        "proton",
        "suppressed_multiplier",
        "1",
        proton.multiplier_vs_standard,
        1e18,
        Factor(10.0),
    );

    let cmb = cmb_budget_bound(&std, &models.cmb)?;
    t.add("cmb", "multiplier", "1", cmb.multiplier_vs_standard, 1e12, Factor(10.0));

    let ful = fullerene_bound(&std, &models.fullerene)?;
    t.add(
        "fullerene",
        "multiplier",
        "1",
        ful.multiplier_vs_standard,
        5e12,
        Relative(0.20),
    );

    let planet = planetary_bound(&std, &models.planetary)?;
    t.add(
        "planetary",
        "multiplier",
        "1",
        planet.multiplier_vs_standard,
        5e5,
        Relative(0.25),
    );

    let l = &models.lattice;
    let c = &models.carrier;
    let n = 1e9;
    let f_tot = slowdown_factor(&std, l, c, n, false, SlowdownMethod::Analytic)?;
    t.add("phonon", "electron_f_tot", "1", f_tot, 328.0, Relative(0.03));
    t.add(
        "phonon",
        "mean_coherence_factor",
        "1",
        mean_coherence_factor(&std, l, c)?,
        1e-3,
        Relative(0.20),
    );
    let gamma_e = electron_slowdown_reduction(&std, l, c, n, true)?;
    t.add(
        "phonon",
        "electron_reduction_rate",
        "s^-1",
        gamma_e.value(),
        1e-17,
        Factor(2.0),
    );
    let ion = CarrierModel::ion(80.0);
    let ratio = (ion.k_min(l) / ion.k_th(l)?).as_scalar()?;
    t.add(
        "phonon",
        "log10_ion_suppression",
        "1",
        log10_suppression_from_ratio(ratio),
        -65.0,
        Absolute(3.0),
    );
    t.add(
        "phonon",
        "thermal_rate_per_group",
        "s^-1",
        thermal_fluctuation_bound(&std, l, n, 1.0)?.value(),
        2e-9,
        Relative(0.30),
    );
    t.add(
        "phonon",
        "thermal_rate_20_groups",
        "s^-1",
        thermal_fluctuation_bound(&std, l, n, 20.0)?.value(),
        4e-8,
        Relative(0.30),
    );

    let second = units::S.of(1.0);
    t.add(
        "collett_pearle",
        "ratio_per_s_case_i",
        "s^-1",
        collett_pearle_case(&ParameterCase::case_i(), second)?,
        6.6e2,
        Relative(0.05),
    );
    t.add(
        "collett_pearle",
        "ratio_per_s_case_ii",
        "s^-1",
        collett_pearle_case(&ParameterCase::case_ii(), second)?,
        1.8e4,
        Relative(0.05),
    );

    let side_len = units::CM.of(1e-3);
    let density = units::G_PER_CM3.of(10.0);
    t.add(
        "mirror",
        "eta_multiplier_case_i",
        "1",
        mirror_projection(&case_i, side_len, density)?.eta_multiplier,
        2e7,
        Relative(0.10),
    );
    t.add(
        "mirror",
        "eta_multiplier_case_ii",
        "1",
        mirror_projection(&case_ii, side_len, density)?.eta_multiplier,
        1.5e11,
        Relative(0.10),
    );

    t.add(
        "cases",
        "lambda_multiplier_case_i",
        "1",
        case_i.lambda_ratio(),
        2e7,
        Relative(0.10),
    );
    t.add(
        "cases",
        "lambda_multiplier_case_ii",
        "1",
        case_ii.lambda_ratio(),
        1.4e9,
        Relative(0.10),
    );

    Ok(Report {
        tolerance_scale,
        rows: t.rows,
    })
}
