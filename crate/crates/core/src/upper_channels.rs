//! Upper bounds on λ from interference, supercurrents, excitation, radiation
//! and the heating budget of cosmic and planetary matter.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::{BoundKind, ChannelResult, Flag};
use crate::cslcore::{
    heating_rate, neutralization_correction, radiated_power_spectrum, reduction_rate, CslParams, EllMode, MassConfig,
};
use crate::error::{Error, Result};
use crate::units::{constants, si, units, Dim, Qty};

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive, got {v}")))
    }
}

/// λ at which a rate linear in λ reaches `limit`.
fn lambda_at(p: &CslParams, rate: Qty, limit: Qty) -> Result<Qty> {
    if !(rate.value() > 0.0) {
        return Err(Error::Precondition("rate vanishes; no bound on lambda".into()));
    }
    Ok(p.lambda() * (limit / rate).as_scalar()?)
}

/// Molecular interferometry. Lengths in cm, times in s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FullereneModel {
    pub nucleons: f64,
    pub grating_cm: f64,
    pub transit_s: f64,
}

impl Default for FullereneModel {
    fn default() -> Self {
        Self {
            nucleons: 1000.0,
            grating_cm: 2.5e-5,
            transit_s: 1e-2,
        }
    }
}

pub fn fullerene_bound(p: &CslParams, f: &FullereneModel) -> Result<ChannelResult> {
    positive("nucleons", f.nucleons)?;
    positive("grating_cm", f.grating_cm)?;
    positive("transit_s", f.transit_s)?;
    let m = MassConfig::new(f.nucleons, 1.0, 1.0, units::CM.of(f.grating_cm), EllMode::Exact6a)?;
    let rate = reduction_rate(p, &m)?;
    let limit = Qty::new(1.0 / f.transit_s, Dim::RATE)?;
    let bound = lambda_at(p, rate, limit)?;
    ChannelResult::new("fullerene", BoundKind::UpperBound, bound, p, 0.5)?
        .observe("reduction_rate", rate, &units::PER_S)?
        .observe_scalar(
            "washout_nucleons",
            fullerene_washout_nucleons(p, f.grating_cm, f.transit_s)?,
        )
        .note("bound where one reduction occurs during the beam transit")
        .cite("Arndt et al., C60 interferometry")
        .pipe_ok()
}

/// Molecule size (nucleons) at which the interference pattern washes out.
pub fn fullerene_washout_nucleons(p: &CslParams, grating_cm: f64, transit_s: f64) -> Result<f64> {
    positive("grating_cm", grating_cm)?;
    positive("transit_s", transit_s)?;
    let m = MassConfig::new(1.0, 1.0, 1.0, units::CM.of(grating_cm), EllMode::Exact6a)?;
    let per_n2 = reduction_rate(p, &m)?.value();
    Ok((1.0 / (per_n2 * transit_s)).sqrt())
}

/// Persistent current in a superconducting ring. `k_F` in cm^-1, limit in s^-1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SupercurrentModel {
    pub k_fermi_cm_inv: f64,
    pub decay_limit_s_inv: f64,
}

impl Default for SupercurrentModel {
    fn default() -> Self {
        Self {
            k_fermi_cm_inv: 1.0 / (0.6e-3 * 1e-5),
            decay_limit_s_inv: 3e-13,
        }
    }
}

/// Fractional decay rate `λ (r_C k_F)^{-1} (m_e/m_N)²`.
pub fn supercurrent_decay_rate(p: &CslParams, k_fermi: Qty) -> Result<Qty> {
    k_fermi.expect_dim(Dim::WAVENUMBER, "Fermi wave number")?;
    let x = (p.r_c() * k_fermi).as_scalar()?;
    if !(x > 1.0) {
        return Err(Error::Precondition(format!(
            "r_C k_F = {x} must exceed 1 for the indistinguishability factor"
        )));
    }
    let k = constants();
    let ratio = (k.m_e / k.m_n).as_scalar()?;
    Ok(p.lambda() * (ratio * ratio / x))
}

pub fn supercurrent_bound(p: &CslParams, s: &SupercurrentModel) -> Result<ChannelResult> {
    positive("k_fermi_cm_inv", s.k_fermi_cm_inv)?;
    positive("decay_limit_s_inv", s.decay_limit_s_inv)?;
    let rate = supercurrent_decay_rate(p, units::PER_CM.of(s.k_fermi_cm_inv))?;
    let bound = lambda_at(p, rate, units::PER_S.of(s.decay_limit_s_inv))?;
    ChannelResult::new("supercurrent", BoundKind::UpperBound, bound, p, 0.5)?
        .observe("decay_rate", rate, &units::PER_S)?
        .observe("decay_time", 1.0 / rate, &units::YEAR)?
        .note("recombination processes leading to the formation of Cooper pairs are neglected")
        .pipe_ok()
}

/// Internal excitation of a bound system of radius `a0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcitationTarget {
    pub label: String,
    pub a0_cm: f64,
    pub constituent_mass_g: f64,
    #[serde(default = "one")]
    pub selection_suppression: f64,
    /// When set, `rate_limit_s_inv` is per kilogram of material.
    #[serde(default)]
    pub number_per_kg: Option<f64>,
    pub rate_limit_s_inv: f64,
}

fn one() -> f64 {
    1.0
}

impl ExcitationTarget {
    /// Cosmic hydrogen surviving 4e17 s.
    pub fn hydrogen() -> Self {
        Self {
            label: "hydrogen".into(),
            a0_cm: 1e-8,
            constituent_mass_g: si::M_E,
            selection_suppression: 1.0,
            number_per_kg: None,
            rate_limit_s_inv: 1.0 / 4e17,
        }
    }

    /// Proton with constituent quarks (`m_N/3`) and the selection-rule factor
    /// `(m_N/Λ)⁴` for new physics at `scale_gev`.
    pub fn proton_constituent(scale_gev: f64) -> Self {
        Self {
            label: "proton_constituent".into(),
            a0_cm: 1e-13,
            constituent_mass_g: si::M_N / 3.0,
            selection_suppression: proton_selection_suppression(scale_gev),
            number_per_kg: None,
            rate_limit_s_inv: proton_decay_limit(),
        }
    }

    /// Proton with 10 MeV current quarks.
    pub fn proton_current(scale_gev: f64) -> Self {
        Self {
            label: "proton_current".into(),
            constituent_mass_g: 10.0 * units::MEV.to_base / si::C.powi(2),
            ..Self::proton_constituent(scale_gev)
        }
    }

    /// Germanium nucleus knocked into excitation, seen as 11 keV photons.
    pub fn germanium_nuclear() -> Self {
        Self {
            label: "germanium".into(),
            a0_cm: 1.4e-13 * 73.0f64.cbrt(),
            constituent_mass_g: si::M_N,
            selection_suppression: 1.0,
            number_per_kg: Some(GERMANIUM_ATOMS_PER_KG),
            rate_limit_s_inv: GERMANIUM_RATE_LIMIT_PER_KEV_KG_DAY / si::DAY,
        }
    }
}

pub const GERMANIUM_ATOMS_PER_KG: f64 = 8.3e24;
/// Observed ceiling on 11 keV events, per keV per kg per day.
pub const GERMANIUM_RATE_LIMIT_PER_KEV_KG_DAY: f64 = 0.05;

/// `(m_N c² / Λ)⁴`.
pub fn proton_selection_suppression(scale_gev: f64) -> f64 {
    let m_n_gev = si::M_N * si::C.powi(2) / units::GEV.to_base;
    (m_n_gev / scale_gev).powi(4)
}

/// Proton decay rate ceiling, 1e-33 per year.
pub fn proton_decay_limit() -> f64 {
    1e-33 / si::YEAR
}

/// `Ṗ = λ (m/m_N)² (a0/r_C)⁴ × suppression`.
pub fn excitation_rate(p: &CslParams, t: &ExcitationTarget) -> Result<Qty> {
    positive("a0_cm", t.a0_cm)?;
    positive("constituent_mass_g", t.constituent_mass_g)?;
    if !(t.selection_suppression >= 0.0) {
        return Err(Error::invalid("selection_suppression", "must be non-negative"));
    }
    let a0 = units::CM.of(t.a0_cm);
    let x = (a0 / p.r_c()).as_scalar()?;
    if x >= 1.0 {
        return Err(Error::Precondition(format!("a0/r_C = {x} must be below 1")));
    }
    let mass = (units::G.of(t.constituent_mass_g) / constants().m_n).as_scalar()?;
    Ok(p.lambda() * (mass * mass * x.powi(4) * t.selection_suppression))
}

pub fn excitation_bound(p: &CslParams, t: &ExcitationTarget) -> Result<ChannelResult> {
    positive("rate_limit_s_inv", t.rate_limit_s_inv)?;
    let rate = excitation_rate(p, t)?;
    let observed = match t.number_per_kg {
        Some(n) => {
            positive("number_per_kg", n)?;
            rate * n
        }
        None => rate,
    };
    let bound = lambda_at(p, observed, units::PER_S.of(t.rate_limit_s_inv))?;
    let id = format!("excitation_{}", t.label);
    let mut res = ChannelResult::new(&id, BoundKind::UpperBound, bound, p, 1.0)?
        .observe("excitation_rate", rate, &units::PER_S)?
        .observe_scalar("selection_suppression", t.selection_suppression);
    if t.selection_suppression != 1.0 {
        let bare = lambda_at(
            p,
            observed * (1.0 / t.selection_suppression),
            units::PER_S.of(t.rate_limit_s_inv),
        )?;
        res = res.observe_scalar(
            "multiplier_without_suppression",
            bare.value() / crate::cslcore::LAMBDA_STANDARD,
        );
    }
    if t.label == "germanium" {
        res = res
            .note(
                "this bound is a factor of 10^3 higher than the one quoted by Collett and Pearle: \
                 they give lambda^-1 r_C^4 > 2e-15 cm^4 s, while their numbers give \
                 lambda^-1 r_C^4 > 2e-18 cm^4 s",
            )
            .note("quadrupole excitation of the first nuclear level gives about 1e14 times standard (catalog value)")
            .cite("Collett and Pearle, germanium 11 keV emission");
    }
    Ok(res)
}

/// Radiation from quasi-free electrons in germanium. Energies in eV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadiationModel {
    pub photon_energy_ev: f64,
    pub bin_width_ev: f64,
    pub electrons_per_atom: f64,
    pub atoms_per_kg: f64,
    pub rate_limit_per_kev_kg_day: f64,
    pub core_radius_cm: f64,
    pub core_v_over_c: f64,
}

impl Default for RadiationModel {
    fn default() -> Self {
        Self {
            photon_energy_ev: 11e3,
            bin_width_ev: 1e3,
            electrons_per_atom: 4.0,
            atoms_per_kg: GERMANIUM_ATOMS_PER_KG,
            rate_limit_per_kev_kg_day: GERMANIUM_RATE_LIMIT_PER_KEV_KG_DAY,
            core_radius_cm: 1e-8,
            core_v_over_c: 0.3e-3,
        }
    }
}

/// Photon emission from free electrons compared with the germanium counting
/// limit. Returns the bare bound and the bound after charge neutralization.
pub fn radiation_bounds(p: &CslParams, r: &RadiationModel) -> Result<(ChannelResult, ChannelResult)> {
    for (n, v) in [
        ("photon_energy_ev", r.photon_energy_ev),
        ("bin_width_ev", r.bin_width_ev),
        ("electrons_per_atom", r.electrons_per_atom),
        ("atoms_per_kg", r.atoms_per_kg),
        ("rate_limit_per_kev_kg_day", r.rate_limit_per_kev_kg_day),
    ] {
        positive(n, v)?;
    }
    let spectrum = radiated_power_spectrum(p, units::EV.of(r.photon_energy_ev))?;
    let per_kg = spectrum * units::EV.of(r.bin_width_ev) * (r.electrons_per_atom * r.atoms_per_kg);
    let limit = units::PER_S.of(r.rate_limit_per_kev_kg_day * r.bin_width_ev / 1e3 / si::DAY);
    let bare = lambda_at(p, per_kg, limit)?;
    let correction = neutralization_correction(units::CM.of(r.core_radius_cm), r.core_v_over_c, p)?;
    let corrected = lambda_at(p, per_kg * correction, limit)?;
    let free = ChannelResult::new("radiation_free", BoundKind::UpperBound, bare, p, 0.3)?
        .observe("spectrum_at_bin", spectrum, &units::PER_S_PER_EV)?
        .observe("events_per_kg", per_kg, &units::PER_S)?
        .flag(Flag::Informational)
        .note("free-electron emission without the neutralizing core")
        .cite("Fu, spontaneous radiation of free electrons");
    let neutral = ChannelResult::new("radiation", BoundKind::UpperBound, corrected, p, 1.0)?
        .observe_scalar("neutralization_correction", correction)
        .observe("events_per_kg", per_kg * correction, &units::PER_S)?
        .note("core charge cancels the emission up to (a0/r_C)^2 + (v/c)^2 + (a0/r_C)(v/c)")
        .cite("Fu, spontaneous radiation of free electrons");
    Ok((free, neutral))
}

/// Age of the universe used for accumulated heating, s.
pub const UNIVERSE_AGE_S: f64 = 4e17;
/// Ten billion years, s.
pub const TEN_GYR_S: f64 = 3.15e17;

/// Photon energy budget of the microwave background. Energies in eV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CmbModel {
    pub photons_per_baryon: f64,
    pub fraction: f64,
    pub photon_energy_ev: f64,
    pub elapsed_s: f64,
}

impl Default for CmbModel {
    fn default() -> Self {
        Self {
            photons_per_baryon: 1e9,
            fraction: 0.1,
            photon_energy_ev: 2.6e-4,
            elapsed_s: TEN_GYR_S,
        }
    }
}

pub fn cmb_budget_bound(p: &CslParams, c: &CmbModel) -> Result<ChannelResult> {
    positive("photons_per_baryon", c.photons_per_baryon)?;
    positive("photon_energy_ev", c.photon_energy_ev)?;
    positive("elapsed_s", c.elapsed_s)?;
    if !(c.fraction >= 0.0) {
        return Err(Error::invalid("fraction", "must be non-negative"));
    }
    let elapsed = units::S.of(c.elapsed_s);
    let gained = heating_rate(p, constants().m_n)? * elapsed;
    let allowed = units::EV.of(c.fraction * c.photons_per_baryon * c.photon_energy_ev);
    let bound = p.lambda() * (allowed / gained).as_scalar()?;
    ChannelResult::new("cmb", BoundKind::UpperBound, bound, p, 1.0)?
        .observe("energy_per_proton", gained, &units::EV)?
        .observe("equivalent_temperature", gained / constants().k_b, &units::KELVIN)?
        .observe("allowed_energy", allowed, &units::EV)?
        .pipe_ok()
}

/// Flat Friedmann cosmology.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Cosmology {
    pub h0_km_s_mpc: f64,
    pub omega_m: f64,
    pub omega_l: f64,
}

impl Default for Cosmology {
    fn default() -> Self {
        Self {
            h0_km_s_mpc: 71.0,
            omega_m: 0.26,
            omega_l: 0.74,
        }
    }
}

impl Cosmology {
    pub fn new(h0_km_s_mpc: f64, omega_m: f64, omega_l: f64) -> Result<Self> {
        let c = Self {
            h0_km_s_mpc,
            omega_m,
            omega_l,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        positive("h0_km_s_mpc", self.h0_km_s_mpc)?;
        if self.omega_m < 0.0 || self.omega_l < 0.0 {
            return Err(Error::invalid("omega", "density fractions must be non-negative"));
        }
        if (self.omega_m + self.omega_l - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("omega", "omega_m + omega_l must equal 1"));
        }
        Ok(())
    }

    pub fn h0(&self) -> Qty {
        units::KM_PER_S_PER_MPC.of(self.h0_km_s_mpc)
    }
}

/// `|dt/dz| = 1/[H0 (1+z) √(Ω_m(1+z)³ + Ω_Λ)]`.
pub fn lookback_derivative(c: &Cosmology, z: f64) -> Result<Qty> {
    c.validate()?;
    if !(z >= 0.0 && z.is_finite()) {
        return Err(Error::invalid("z", "redshift must be non-negative"));
    }
    let zp = 1.0 + z;
    Ok(1.0 / (c.h0() * (zp * (c.omega_m * zp.powi(3) + c.omega_l).sqrt())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IgmState {
    pub z: f64,
    pub temperature_k: f64,
    pub temperature_log10_uncertainty: f64,
}

impl Default for IgmState {
    fn default() -> Self {
        Self {
            z: 3.0,
            temperature_k: 2e4,
            temperature_log10_uncertainty: 0.0,
        }
    }
}

impl IgmState {
    pub fn present_day() -> Self {
        Self {
            z: 0.06,
            temperature_k: 10f64.powf(3.7),
            temperature_log10_uncertainty: 0.5,
        }
    }
}

/// Adiabatic cooling at redshift `z` balanced against proton heating.
pub fn igm_bound(p: &CslParams, c: &Cosmology, s: &IgmState) -> Result<ChannelResult> {
    positive("temperature_k", s.temperature_k)?;
    let dtdz = lookback_derivative(c, s.z)?;
    let kt = constants().k_b * units::KELVIN.of(s.temperature_k);
    let cooling = 3.0 * kt / ((1.0 + s.z) * dtdz);
    let heating = heating_rate(p, constants().m_n)?;
    let bound = p.lambda() * (cooling / heating).as_scalar()?;
    ChannelResult::new(
        "igm_z3",
        BoundKind::UpperBound,
        bound,
        p,
        s.temperature_log10_uncertainty.max(0.1),
    )?
    .observe("dt_dz", dtdz, &units::YEAR)?
    .observe("cooling_rate", cooling, &units::EV_PER_S)?
    .observe("heating_rate", heating, &units::EV_PER_S)?
    .note("recombination cooling ignored; including it would loosen the bound by at most a factor of 6")
    .cite("Hui and Haiman; Schaye et al., IGM temperatures")
    .pipe_ok()
}

/// Accumulated heating over `age_s` kept below `(3/2) k_B T`.
pub fn igm_present_bound(p: &CslParams, s: &IgmState, age_s: f64) -> Result<ChannelResult> {
    positive("temperature_k", s.temperature_k)?;
    positive("age_s", age_s)?;
    let thermal = 1.5 * constants().k_b * units::KELVIN.of(s.temperature_k);
    let gained = heating_rate(p, constants().m_n)? * units::S.of(age_s);
    let bound = p.lambda() * (thermal / gained).as_scalar()?;
    ChannelResult::new(
        "igm_z0",
        BoundKind::UpperBound,
        bound,
        p,
        s.temperature_log10_uncertainty,
    )?
    .observe("thermal_energy", thermal, &units::EV)?
    .observe("accumulated_heating", gained, &units::EV)?
    .cite("Ricotti, Gnedin and Shull, low-redshift IGM temperature")
    .pipe_ok()
}

/// Average the logarithmic multipliers; the spread (at least half a decade)
/// rounded to whole decades is the uncertainty.
pub fn igm_combined(p: &CslParams, parts: &[ChannelResult]) -> Result<ChannelResult> {
    if parts.is_empty() {
        return Err(Error::invalid("parts", "need at least one IGM bound"));
    }
    let logs: Vec<f64> = parts.iter().map(|r| r.lambda_bound.value().log10()).collect();
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    let half_spread = logs.iter().map(|l| (l - mean).abs()).fold(0.0, f64::max);
    let widest = parts.iter().map(|r| r.uncertainty_decades).fold(0.0, f64::max);
    let unc = half_spread.max(widest).max(0.5).round();
    let bound = Qty::new(10f64.powf(mean), Dim::RATE)?;
    let mut res = ChannelResult::new("igm", BoundKind::UpperBound, bound, p, unc)?;
    for r in parts {
        res = res.observe_scalar(&format!("{}_multiplier", r.channel_id), r.multiplier_vs_standard);
    }
    Ok(res)
}

/// The two IGM bounds and their combination.
pub fn igm_suite(p: &CslParams, c: &Cosmology) -> Result<[ChannelResult; 3]> {
    let hi_z = igm_bound(p, c, &IgmState::default())?;
    let lo_z = igm_present_bound(p, &IgmState::present_day(), UNIVERSE_AGE_S)?;
    let combined = igm_combined(p, &[hi_z.clone(), lo_z.clone()])?;
    Ok([hi_z, lo_z, combined])
}

/// Interstellar dust grains. Temperature in K, density in cm^-3.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DustModel {
    pub grain_temperature_k: f64,
    pub kappa_prime: f64,
    pub nucleon_density_cm3: f64,
}

impl Default for DustModel {
    fn default() -> Self {
        Self {
            grain_temperature_k: 20.0,
            kappa_prime: 0.05,
            nucleon_density_cm3: 1e24,
        }
    }
}

/// Volume emissivity `W = 32π · 24.9 · c (kT)⁵/(hc)⁴ · κ'`.
pub fn dust_emissivity(t_g: Qty, kappa_prime: f64) -> Result<Qty> {
    t_g.expect_dim(Dim::TEMPERATURE, "grain temperature")?;
    positive("T_g", t_g.value())?;
    let k = constants();
    let kt = k.k_b * t_g;
    let hc = k.h * k.c;
    Ok(32.0 * PI * 24.9 * k.c * kt.powi(5) / hc.powi(4) * kappa_prime)
}

pub fn dust_grain_bound(p: &CslParams, d: &DustModel) -> Result<ChannelResult> {
    positive("nucleon_density_cm3", d.nucleon_density_cm3)?;
    if !(d.kappa_prime >= 0.0) {
        return Err(Error::invalid("kappa_prime", "must be non-negative"));
    }
    let w = dust_emissivity(units::KELVIN.of(d.grain_temperature_k), d.kappa_prime)?;
    let heating = heating_rate(p, constants().m_n)? * units::PER_CM3.of(d.nucleon_density_cm3);
    let bound = p.lambda() * (w / heating).as_scalar()?;
    ChannelResult::new("dust", BoundKind::UpperBound, bound, p, 1.0)?
        .observe("emissivity", w, &units::EV_PER_S_CM3)?
        .observe("volumetric_heating", heating, &units::EV_PER_S_CM3)?
        .cite("Draine, dust grain emission")
        .pipe_ok()
}

/// Planetary heat flow. `L/M` in erg g^-1 s^-1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanetaryModel {
    pub luminosity_per_mass: f64,
    pub body: String,
}

impl Default for PlanetaryModel {
    fn default() -> Self {
        Self {
            luminosity_per_mass: 4e-8,
            body: "Uranus".into(),
        }
    }
}

/// Collisional decoherence exceeds collapse in planetary matter by this many
/// decades at the IGM limit (catalog value).
pub const COLLISION_DOMINANCE_DECADES: f64 = 28.0;

/// Proton heating per gram of matter.
pub fn heating_per_gram(p: &CslParams) -> Result<Qty> {
    let k = constants();
    Ok(heating_rate(p, k.m_n)? / k.m_n)
}

pub fn planetary_bound(p: &CslParams, m: &PlanetaryModel) -> Result<ChannelResult> {
    positive("luminosity_per_mass", m.luminosity_per_mass)?;
    let per_gram = heating_per_gram(p)?;
    let lm = units::ERG_PER_G_S.of(m.luminosity_per_mass);
    let bound = p.lambda() * (lm / per_gram).as_scalar()?;
    ChannelResult::new("planetary", BoundKind::UpperBound, bound, p, 0.5)?
        .observe("heating_per_gram", per_gram, &units::ERG_PER_G_S)?
        .observe("luminosity_per_mass", lm, &units::ERG_PER_G_S)?
        .observe_scalar("collision_dominance_decades", COLLISION_DOMINANCE_DECADES)
        .flag(Flag::Dubious)
        .note(format!(
            "dubious: dissipative equilibration; collisional decoherence in {} dominates and \
             any stochastic heating should equilibrate to zero",
            m.body
        ))
        .cite("de Pater and Lissauer, planetary L/M table")
        .pipe_ok()
}

trait PipeOk: Sized {
    fn pipe_ok(self) -> Result<Self> {
        Ok(self)
    }
}

impl PipeOk for ChannelResult {}
