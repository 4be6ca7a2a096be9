//! Lower bounds on λ: latent-image formation in photographic emulsions and
//! etched-track detectors, side estimates, and the visual-system numbers.

use serde::{Deserialize, Serialize};

use crate::channel::{BoundKind, ChannelResult, Flag};
use crate::cslcore::{reduction_rate, CslParams, EllMode, MassConfig};
use crate::error::{Error, Result};
use crate::units::{constants, units, Dim, Qty};

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive, got {v}")))
    }
}

/// Silver-halide emulsion. Lengths in cm, rates in s^-1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmulsionModel {
    pub atoms_per_speck: u32,
    pub grains_per_track: u32,
    pub ag_weight: f64,
    pub br_weight: f64,
    pub grain_diameter_cm: f64,
    pub gelatine_diffusion_range_cm: f64,
    pub speck_formation_rate_s_inv: f64,
    pub formation_rate_uncertainty_decades: f64,
}

impl Default for EmulsionModel {
    fn default() -> Self {
        Self {
            atoms_per_speck: 30,
            grains_per_track: 20,
            ag_weight: 108.0,
            br_weight: 80.0,
            grain_diameter_cm: 1e-5,
            gelatine_diffusion_range_cm: 1e-4,
            speck_formation_rate_s_inv: 30.0,
            formation_rate_uncertainty_decades: 2.0,
        }
    }
}

impl EmulsionModel {
    pub fn validate(&self) -> Result<()> {
        positive("atoms_per_speck", self.atoms_per_speck as f64)?;
        positive("grains_per_track", self.grains_per_track as f64)?;
        positive("ag_weight", self.ag_weight)?;
        positive("br_weight", self.br_weight)?;
        positive("grain_diameter_cm", self.grain_diameter_cm)?;
        positive("gelatine_diffusion_range_cm", self.gelatine_diffusion_range_cm)?;
        if !(self.speck_formation_rate_s_inv >= 0.0) {
            return Err(Error::invalid("speck_formation_rate_s_inv", "must be non-negative"));
        }
        Ok(())
    }
}

/// Mean of `min(ℓ²/(4r_C²), 1)` for `ℓ` uniform on `[0, d]`.
pub fn uniform_displacement_factor(d: f64, r_c: f64) -> f64 {
    if d <= 2.0 * r_c {
        d * d / (12.0 * r_c * r_c)
    } else {
        1.0 - 4.0 * r_c / (3.0 * d)
    }
}

/// Reduction rate of the latent image and the λ it requires.
pub fn photographic_lower_bound(p: &CslParams, e: &EmulsionModel) -> Result<ChannelResult> {
    e.validate()?;
    let r_c = p.r_c().value();
    let atoms = e.atoms_per_speck as f64;
    let groups = e.grains_per_track as f64;
    let (rate, regime) = if r_c <= e.grain_diameter_cm {
        let n = atoms * (e.ag_weight + e.br_weight);
        let m = MassConfig::saturated(n, groups)?;
        (reduction_rate(p, &m)?, "saturated: whole speck displaced beyond r_C")
    } else {
        let n_ag = atoms * e.ag_weight;
        let n_br = atoms * e.br_weight;
        let f_ag = (e.grain_diameter_cm / (2.0 * r_c)).powi(2).min(1.0);
        let f_br = uniform_displacement_factor(e.gelatine_diffusion_range_cm, r_c);
        let weight = n_ag * n_ag * f_ag + n_br * n_br * f_br;
        (
            p.lambda() * (groups * weight),
            "suppressed: Ag within the grain, Br spread through the gelatine",
        )
    };
    let target = Qty::new(e.speck_formation_rate_s_inv, Dim::RATE)?;
    let required = if rate.value() > 0.0 {
        p.lambda() * (target / rate).as_scalar()?
    } else {
        return Err(Error::Precondition("latent-image reduction rate vanished".into()));
    };
    let res = ChannelResult::new(
        "photographic",
        BoundKind::LowerBound,
        required,
        p,
        e.formation_rate_uncertainty_decades,
    )?
    .observe("reduction_rate", rate, &units::PER_S)?
    .observe("speck_formation_rate", target, &units::PER_S)?
    .observe_scalar("required_factor_vs_params", (target / rate).as_scalar()?)
    .note(regime);
    Ok(res)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideEstimate {
    pub name: String,
    pub rate: Qty,
}

/// Recoil of the whole detector and ion back-motion, per group count `groups`.
pub fn photographic_side_estimates(
    p: &CslParams,
    photon_energy: Qty,
    elapsed: Qty,
    groups: f64,
) -> Result<Vec<SideEstimate>> {
    photon_energy.expect_dim(Dim::ENERGY, "photon energy")?;
    elapsed.expect_dim(Dim::TIME, "elapsed time")?;
    if photon_energy.value() < 0.0 {
        return Err(Error::invalid("photon_energy", "must be non-negative"));
    }
    positive("N", groups)?;
    let k = constants();
    let momentum = photon_energy / k.c;
    let x = (momentum * elapsed / (k.m_n * p.r_c())).as_scalar()?;
    let recoil = p.lambda() * (x * x / (4.0 * groups));
    let back_motion = p.lambda() * (108.0f64.powi(2) / (4.0 * groups));
    Ok(vec![
        SideEstimate {
            name: "recoil".into(),
            rate: recoil,
        },
        SideEstimate {
            name: "ion_back_motion".into(),
            rate: back_motion,
        },
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumCriterion {
    Thermal,
    Chemical,
}

/// Track of lattice distortion left by a charged particle. Lengths in cm,
/// times in s, density in cm^-3.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackModel {
    pub distortion_radius_cm: f64,
    pub track_length_cm: f64,
    pub nucleon_density_cm3: f64,
    pub criterion: EquilibriumCriterion,
    pub thermal_time_min_s: f64,
    pub thermal_time_max_s: f64,
    pub chemical_time_s: f64,
}

impl Default for TrackModel {
    fn default() -> Self {
        Self {
            distortion_radius_cm: 1e-6,
            track_length_cm: 1e-3,
            nucleon_density_cm3: 1e24,
            criterion: EquilibriumCriterion::Chemical,
            thermal_time_min_s: 1e-12,
            thermal_time_max_s: 1e-9,
            chemical_time_s: 3e-8,
        }
    }
}

impl TrackModel {
    pub fn validate(&self) -> Result<()> {
        positive("distortion_radius_cm", self.distortion_radius_cm)?;
        positive("track_length_cm", self.track_length_cm)?;
        positive("nucleon_density_cm3", self.nucleon_density_cm3)?;
        positive("thermal_time_min_s", self.thermal_time_min_s)?;
        positive("thermal_time_max_s", self.thermal_time_max_s)?;
        positive("chemical_time_s", self.chemical_time_s)?;
        if self.thermal_time_min_s > self.thermal_time_max_s {
            return Err(Error::invalid("thermal_time_min_s", "exceeds thermal_time_max_s"));
        }
        if self.thermal_time_max_s >= self.chemical_time_s {
            return Err(Error::invalid(
                "thermal_time_max_s",
                "thermal time must precede chemical time",
            ));
        }
        Ok(())
    }
}

/// Reduction rate of an etched-track latent image and the λ needed to finish
/// within the equilibration time.
pub fn etched_track_lower_bound(p: &CslParams, t: &TrackModel) -> Result<ChannelResult> {
    t.validate()?;
    let r_c = p.r_c().value();
    let ell = t.distortion_radius_cm;
    let n = t.nucleon_density_cm3 * std::f64::consts::PI * ell * ell * r_c;
    let groups = (t.track_length_cm / r_c).max(1.0);
    let mode = if ell < r_c {
        EllMode::SmallEllExpansion
    } else {
        EllMode::Exact6a
    };
    let m = MassConfig::new(n.max(f64::MIN_POSITIVE), groups, 1.0, units::CM.of(ell), mode)?;
    let rate = reduction_rate(p, &m)?;
    let factor_for = |time: f64| 1.0 / (time * rate.value());
    let (id, time, unc) = match t.criterion {
        EquilibriumCriterion::Chemical => ("etched_track", t.chemical_time_s, 0.5),
        EquilibriumCriterion::Thermal => (
            "etched_track_thermal",
            t.thermal_time_max_s,
            (t.thermal_time_max_s / t.thermal_time_min_s).log10(),
        ),
    };
    let required = p.lambda() * factor_for(time);
    let mut res = ChannelResult::new(id, BoundKind::LowerBound, required, p, unc)?
        .observe("reduction_rate", rate, &units::PER_S)?
        .observe_scalar("nucleons_per_group", n)
        .observe_scalar("groups", groups)
        .observe("criterion_time", units::S.of(time), &units::S)?;
    match t.criterion {
        EquilibriumCriterion::Chemical => {
            res = res
                .flag(Flag::UpperEstimate)
                .note("chemical equilibration sets the longest allowed time, so the requirement may be smaller");
        }
        EquilibriumCriterion::Thermal => {
            res = res
                .observe_scalar("required_factor_shortest_time", factor_for(t.thermal_time_min_s))
                .observe_scalar("required_factor_longest_time", factor_for(t.thermal_time_max_s))
                .note("lambda bound quoted at the longest thermal time; the shortest raises it by the time ratio");
        }
    }
    Ok(res)
}

/// Conformational change of one rhodopsin molecule and the rod amplification chain.
pub fn vision_estimates(p: &CslParams) -> Result<Vec<ChannelResult>> {
    let rhodopsin = MassConfig::new(4e4, 1.0, 1.0, units::CM.of(4e-7), EllMode::SmallEllExpansion)?;
    let rod = MassConfig::saturated(300.0 * 3000.0 * 23.0, 1.0)?;
    let mut out = Vec::new();
    for (id, m, time, note) in [
        (
            "vision_rhodopsin",
            rhodopsin,
            2e-13,
            "cis-trans change completes in 200 fs",
        ),
        (
            "vision_rod",
            rod,
            0.3,
            "rod response time 300 ms; about 3000 cations blocked by several hundred channels",
        ),
    ] {
        let rate = reduction_rate(p, &m)?;
        let required = p.lambda() * (1.0 / (rate.value() * time));
        out.push(
            ChannelResult::new(id, BoundKind::LowerBound, required, p, 1.0)?
                .observe("reduction_rate", rate, &units::PER_S)?
                .observe("response_time", units::S.of(time), &units::S)?
                .flag(Flag::Informational)
                .note(note),
        );
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhotoreceptorScaling {
    /// Exponent of ℓ in the detector response rate.
    pub rate_exponent: i32,
    /// Exponent of ℓ in the spatial resolution.
    pub resolution_exponent: i32,
    /// ℓ equals r_C: the rate exponent changes from 4 (below) to 1 (above).
    pub crossover: bool,
}

/// How response rate and resolution scale with receptor size `ell`.
pub fn photoreceptor_tradeoff(ell: Qty, r_c: Qty) -> Result<PhotoreceptorScaling> {
    ell.expect_dim(Dim::LENGTH, "receptor size")?;
    r_c.expect_dim(Dim::LENGTH, "r_C")?;
    positive("ell", ell.value())?;
    positive("r_C", r_c.value())?;
    let x = ell.value() / r_c.value();
    let crossover = (x - 1.0).abs() <= 1e-12;
    Ok(PhotoreceptorScaling {
        rate_exponent: if x <= 1.0 { 4 } else { 1 },
        resolution_exponent: -2,
        crossover,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::units::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn photographic_standard() {
        let r = photographic_lower_bound(&CslParams::standard(), &EmulsionModel::default()).unwrap();
        assert!(rel(r.observable("reduction_rate").unwrap(), 1.3996e-8) < 1e-4);
        assert!(rel(r.multiplier_vs_standard, 2.143e9) < 1e-3);
        assert!((r.multiplier_vs_standard / 2e9).log10().abs() <= 2.0);
        assert_eq!(r.uncertainty_decades, 2.0);
    }

    #[test]
    fn photographic_large_rc() {
        let p = CslParams::from_values(2.2e-17, 1e-4).unwrap();
        let r = photographic_lower_bound(&p, &EmulsionModel::default()).unwrap();
        assert!(rel(r.observable("reduction_rate").unwrap(), 2.2e-10) < 0.02);
        assert!(rel(r.multiplier_vs_standard, 1.4e11) < 0.05);
    }

    #[test]
    fn no_formation_no_requirement() {
        let e = EmulsionModel {
            speck_formation_rate_s_inv: 0.0,
            ..EmulsionModel::default()
        };
        let r = photographic_lower_bound(&CslParams::standard(), &e).unwrap();
        assert_eq!(r.multiplier_vs_standard, 0.0);
    }

    #[test]
    fn gelatine_average() {
        assert!(rel(uniform_displacement_factor(1.0, 1.0), 1.0 / 12.0) < 1e-15);
        let (a, b) = (
            uniform_displacement_factor(2.0, 1.0),
            uniform_displacement_factor(2.0 + 1e-12, 1.0),
        );
        assert!((a - b).abs() < 1e-9);
        assert!(uniform_displacement_factor(1e6, 1.0) < 1.0);
    }

    #[test]
    fn side_estimates() {
        let s = photographic_side_estimates(&CslParams::standard(), EV.of(3.0), S.of(1.0 / 30.0), 1.0).unwrap();
        assert!(rel(s[0].rate.value(), 5.6e-7) < 0.01);
        assert!(rel(s[1].rate.value(), 6.415e-14) < 1e-3);
        let z = photographic_side_estimates(&CslParams::standard(), EV.of(0.0), S.of(1.0), 1.0).unwrap();
        assert_eq!(z[0].rate.value(), 0.0);
    }

    #[test]
    fn etched_track_standard() {
        let r = etched_track_lower_bound(&CslParams::standard(), &TrackModel::default()).unwrap();
        assert!(rel(r.observable("reduction_rate").unwrap(), 5.43e-3) < 2e-3);
        assert!(rel(r.multiplier_vs_standard, 6.14e9) < 5e-3);
        assert!(r.has_flag(Flag::UpperEstimate));
        let t = TrackModel {
            criterion: EquilibriumCriterion::Thermal,
            ..TrackModel::default()
        };
        let r = etched_track_lower_bound(&CslParams::standard(), &t).unwrap();
        let lo = r.observable("required_factor_longest_time").unwrap();
        let hi = r.observable("required_factor_shortest_time").unwrap();
        assert!((1e11..3e11).contains(&lo), "{lo}");
        assert!(hi > 1e14 && hi < 3e14, "{hi}");
    }

    #[test]
    fn etched_track_large_rc_tenfold() {
        let a = etched_track_lower_bound(&CslParams::standard(), &TrackModel::default()).unwrap();
        let p = CslParams::from_values(2.2e-17, 1e-4).unwrap();
        let b = etched_track_lower_bound(&p, &TrackModel::default()).unwrap();
        assert!(rel(b.multiplier_vs_standard / a.multiplier_vs_standard, 10.0) < 1e-9);
    }

    #[test]
    fn track_model_validation() {
        let t = TrackModel {
            thermal_time_max_s: 1e-7,
            ..TrackModel::default()
        };
        assert!(t.validate().is_err());
    }

    #[test]
    fn vision_case_i() {
        let v = vision_estimates(&CslParams::case_i()).unwrap();
        assert!(rel(v[0].observable("reduction_rate").unwrap(), 2.56e-4) < 1e-9);
        assert!(rel(v[1].observable("reduction_rate").unwrap(), 1.7139e5) < 1e-4);
    }

    #[test]
    fn vision_standard_rod_rate() {
        let v = vision_estimates(&CslParams::standard()).unwrap();
        let rod = v[1].observable("reduction_rate").unwrap();
        assert!(rel(rod, 9.43e-3) < 1e-3);
        let shortfall = (1.0 / (rod * 0.3)).log10();
        assert!((2.0..3.5).contains(&shortfall));
    }

    #[test]
    fn tradeoff_regimes() {
        let rc = CM.of(1e-5);
        let a = photoreceptor_tradeoff(CM.of(1e-6), rc).unwrap();
        assert_eq!((a.rate_exponent, a.resolution_exponent, a.crossover), (4, -2, false));
        let b = photoreceptor_tradeoff(CM.of(1e-4), rc).unwrap();
        assert_eq!((b.rate_exponent, b.resolution_exponent), (1, -2));
        assert!(photoreceptor_tradeoff(rc, rc).unwrap().crossover);
        assert!(photoreceptor_tradeoff(CM.of(0.0), rc).is_err());
    }
}
