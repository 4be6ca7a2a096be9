//! Reduction driven by lattice phonons: emission by hot electrons while they
//! thermalize, the suppressed ionic contribution, and thermal fluctuations
//! of the whole lattice.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::{BoundKind, ChannelResult, Flag};
use crate::cslcore::CslParams;
use crate::error::{Error, Result};
use crate::lower_channels::EmulsionModel;
use crate::oracle::quadrature::integrate_points;
use crate::oracle::QuadratureSpec;
use crate::units::{constants, si, units, Dim, Qty};

/// Crystal lattice. Speeds in cm/s, frequencies in s^-1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeModel {
    pub sound_speed_cm_s: f64,
    pub debye_frequency_s_inv: f64,
    pub atom_mass_nucleons: f64,
    pub nucleon_density_cm3: f64,
    pub temperature_k: f64,
}

impl Default for LatticeModel {
    fn default() -> Self {
        Self {
            sound_speed_cm_s: 3e5,
            debye_frequency_s_inv: 3e13,
            atom_mass_nucleons: 100.0,
            nucleon_density_cm3: 1e24,
            temperature_k: 300.0,
        }
    }
}

impl LatticeModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sound_speed_cm_s", self.sound_speed_cm_s),
            ("debye_frequency_s_inv", self.debye_frequency_s_inv),
            ("atom_mass_nucleons", self.atom_mass_nucleons),
            ("nucleon_density_cm3", self.nucleon_density_cm3),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.temperature_k >= 0.0 && self.temperature_k.is_finite()) {
            return Err(Error::invalid("temperature_k", "must be non-negative"));
        }
        if self.debye_wavelength().value() <= self.lattice_spacing().value() {
            return Err(Error::invalid(
                "debye_frequency_s_inv",
                "Debye wavelength must exceed the lattice spacing",
            ));
        }
        Ok(())
    }

    pub fn sound_speed(&self) -> Qty {
        units::CM_PER_S.of(self.sound_speed_cm_s)
    }

    pub fn debye_frequency(&self) -> Qty {
        units::PER_S.of(self.debye_frequency_s_inv)
    }

    pub fn atom_mass(&self) -> Qty {
        constants().m_n * self.atom_mass_nucleons
    }

    pub fn temperature(&self) -> Qty {
        units::KELVIN.of(self.temperature_k)
    }

    /// `2π c_s / ω_D`.
    pub fn debye_wavelength(&self) -> Qty {
        self.sound_speed() * (2.0 * PI) / self.debye_frequency()
    }

    /// Cube root of the volume per atom.
    pub fn lattice_spacing(&self) -> Qty {
        let per_atom = self.atom_mass_nucleons / self.nucleon_density_cm3;
        units::CM.of(per_atom.cbrt())
    }

    /// Nucleons in a cube of side `r_C`.
    pub fn nucleons_per_cell(&self, p: &CslParams) -> f64 {
        self.nucleon_density_cm3 * p.r_c().value().powi(3)
    }
}

/// Charge carrier moving through the lattice. Mass in g, wave number in cm^-1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CarrierModel {
    pub effective_mass_g: f64,
    pub k0_cm_inv: f64,
}

impl Default for CarrierModel {
    fn default() -> Self {
        Self::electron()
    }
}

impl CarrierModel {
    /// A photoelectron of a few eV.
    pub fn electron() -> Self {
        Self {
            effective_mass_g: si::M_E,
            k0_cm_inv: 1e9,
        }
    }

    /// Thermalized ion of the given atomic weight.
    pub fn ion(atomic_weight: f64) -> Self {
        Self {
            effective_mass_g: units::AMU.to_base * atomic_weight,
            k0_cm_inv: 0.0,
        }
    }

    pub fn effective_mass(&self) -> Qty {
        units::G.of(self.effective_mass_g)
    }

    /// `√(3 m* k_B T)/ħ`.
    pub fn k_th(&self, l: &LatticeModel) -> Result<Qty> {
        let k = constants();
        Ok((3.0 * self.effective_mass() * k.k_b * l.temperature()).sqrt()? / k.hbar)
    }

    /// `m* c_s / ħ`.
    pub fn k_min(&self, l: &LatticeModel) -> Qty {
        self.effective_mass() * l.sound_speed() / constants().hbar
    }

    pub fn k0(&self) -> Qty {
        units::PER_CM.of(self.k0_cm_inv)
    }
}

/// `min[1, (2π c_s/(r_C ω))³]`.
pub fn coherence_factor(p: &CslParams, l: &LatticeModel, omega: Qty) -> Result<f64> {
    omega.expect_dim(Dim::RATE, "phonon frequency")?;
    if !(omega.value() > 0.0) {
        return Err(Error::invalid("omega", "must be positive"));
    }
    let x = (l.sound_speed() * (2.0 * PI) / (p.r_c() * omega)).as_scalar()?;
    Ok(x.powi(3).min(1.0))
}

/// `f(ω) = ħn/(4 r_C² m_N ω)`, times the coherence factor when requested.
/// The reduction rate from one phonon is `λ f`.
pub fn phonon_mode_rate_factor(
    p: &CslParams,
    l: &LatticeModel,
    n: f64,
    omega: Qty,
    with_coherence: bool,
) -> Result<f64> {
    omega.expect_dim(Dim::RATE, "phonon frequency")?;
    if !(omega.value() > 0.0) {
        return Err(Error::invalid("omega", "must be positive"));
    }
    let k = constants();
    let f = (k.hbar * n / (4.0 * p.r_c().powi(2) * k.m_n * omega)).as_scalar()?;
    let g = if with_coherence {
        coherence_factor(p, l, omega)?
    } else {
        1.0
    };
    Ok(f * g)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SlowdownMethod {
    /// Closed form; with coherence the factor `(π/(r_C k_th))²` is applied.
    Analytic,
    /// Exact integral of the piecewise coherence factor, in closed form.
    ExactCoherence,
    /// Nested quadrature with emission-rate constant `sigma`.
    Numeric { sigma: f64 },
}

fn slowdown_prefactor(p: &CslParams, l: &LatticeModel, n: f64) -> Result<f64> {
    let k = constants();
    let a = k.hbar * n / (4.0 * p.r_c().powi(2) * k.m_n * l.sound_speed());
    a.expect_dim(Dim::WAVENUMBER, "slowdown prefactor")?;
    Ok(a.value())
}

fn check_slowdown(l: &LatticeModel, c: &CarrierModel, n: f64) -> Result<(f64, f64, f64)> {
    l.validate()?;
    if !(n > 0.0) {
        return Err(Error::invalid("n", "must be positive"));
    }
    let k_th = c.k_th(l)?.value();
    let k_min = c.k_min(l).value();
    let k0 = c.k0().value();
    if !(k_th > k_min) {
        return Err(Error::Precondition(format!(
            "thermal wave number {k_th:.3e} must exceed the emission threshold {k_min:.3e}"
        )));
    }
    if !(k0 >= k_th) {
        return Err(Error::Precondition(format!(
            "initial wave number {k0:.3e} is below the thermal wave number {k_th:.3e}"
        )));
    }
    Ok((k_th, k0, k_min))
}

/// `⟨G⟩ = (π/(r_C k_th))²`.
pub fn mean_coherence_factor(p: &CslParams, l: &LatticeModel, c: &CarrierModel) -> Result<f64> {
    let x = (p.r_c() * c.k_th(l)?).as_scalar()?;
    Ok((PI / x).powi(2))
}

/// Dimensionless `f_tot` for one electron slowing from `k0` to `k_th`.
pub fn slowdown_factor(
    p: &CslParams,
    l: &LatticeModel,
    c: &CarrierModel,
    n: f64,
    with_coherence: bool,
    method: SlowdownMethod,
) -> Result<f64> {
    let (k_th, k0, _) = check_slowdown(l, c, n)?;
    let a = slowdown_prefactor(p, l, n)?;
    let q_c = 2.0 * PI / p.r_c().value();
    match method {
        SlowdownMethod::Analytic => {
            let bare = 5.0 / 8.0 * a * (1.0 / k_th - 1.0 / k0);
            Ok(if with_coherence {
                bare * mean_coherence_factor(p, l, c)?
            } else {
                bare
            })
        }
        SlowdownMethod::ExactCoherence => {
            if !with_coherence {
                return Ok(5.0 / 8.0 * a * (1.0 / k_th - 1.0 / k0));
            }
            let k_c = q_c / 2.0;
            let mut total = 0.0;
            let lo_end = k0.min(k_c);
            if k_th < lo_end {
                total += 5.0 / 8.0 * a * (1.0 / k_th - 1.0 / lo_end);
            }
            let hi_start = k_th.max(k_c);
            if hi_start < k0 {
                let cube = hi_start.powi(-3) - k0.powi(-3);
                let quart = hi_start.powi(-4) - k0.powi(-4);
                total += 5.0 / 16.0 * a * (0.5 * q_c * q_c * cube - q_c.powi(3) / 8.0 * quart);
            }
            Ok(total)
        }
        SlowdownMethod::Numeric { sigma } => {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::invalid("sigma", "must be positive"));
            }
            numeric_slowdown(a, k_th, k0, q_c, sigma, with_coherence)
        }
    }
}

fn numeric_slowdown(a: f64, k_th: f64, k0: f64, q_c: f64, sigma: f64, with_g: bool) -> Result<f64> {
    if k0 == k_th {
        return Ok(0.0);
    }
    let spec = QuadratureSpec::new(f64::MIN_POSITIVE, 1e-9, 50)?;
    let g = |q: f64| if with_g && q > q_c { (q_c / q).powi(3) } else { 1.0 };
    let mut inner_err = None;
    let outer = integrate_points(
        |k| {
            let rate = |q: f64| 5.0 / 16.0 * sigma * q * q / k;
            let f = |q: f64| if q > 0.0 { a / q } else { 0.0 };
            let top = 2.0 * k;
            let pts: Vec<f64> = if with_g && q_c < top {
                vec![0.0, q_c, top]
            } else {
                vec![0.0, top]
            };
            match integrate_points(|q| rate(q) * f(q) * g(q), &pts, &spec) {
                Ok(r) => r.value / (sigma * k.powi(3)),
                Err(e) => {
                    inner_err.get_or_insert(e);
                    0.0
                }
            }
        },
        &geometric_points(k_th, k0, q_c / 2.0),
        &spec,
    )?;
    if let Some(e) = inner_err {
        return Err(e);
    }
    Ok(outer.value)
}

fn geometric_points(a: f64, b: f64, kink: f64) -> Vec<f64> {
    let decades = (b / a).log10().ceil().max(1.0) as usize;
    let mut pts: Vec<f64> = (0..=decades)
        .map(|i| a * (b / a).powf(i as f64 / decades as f64))
        .collect();
    if kink > a && kink < b {
        pts.push(kink);
        pts.sort_by(f64::total_cmp);
    }
    *pts.last_mut().expect("non-empty") = b;
    pts
}

/// `λ f_tot` (times `⟨G⟩` when requested) for an electron slowing down.
pub fn electron_slowdown_reduction(
    p: &CslParams,
    l: &LatticeModel,
    c: &CarrierModel,
    n: f64,
    with_coherence: bool,
) -> Result<Qty> {
    let f = slowdown_factor(p, l, c, n, with_coherence, SlowdownMethod::Analytic)?;
    Ok(p.lambda() * f)
}

/// `exp(−1.5 (k_min/k_th)²)`.
pub fn ion_emission_suppression(c: &CarrierModel, l: &LatticeModel) -> Result<f64> {
    let k_th = c.k_th(l)?;
    if k_th.value() == 0.0 {
        return Ok(0.0);
    }
    Ok(suppression_from_ratio((c.k_min(l) / k_th).as_scalar()?))
}

pub fn suppression_from_ratio(ratio: f64) -> f64 {
    (-1.5 * ratio * ratio).exp()
}

/// `log10` of the suppression, usable where the value itself underflows.
pub fn log10_suppression_from_ratio(ratio: f64) -> f64 {
    -1.5 * ratio * ratio / std::f64::consts::LN_10
}

/// `k_min/k_th` for a carrier of `mass_ratio` times the baseline effective mass.
pub fn scaled_threshold_ratio(baseline_ratio: f64, mass_ratio: f64) -> f64 {
    baseline_ratio * mass_ratio.sqrt()
}

/// `3π c_s/(r_C ω_D)`, the coherence factor averaged over the Debye spectrum.
pub fn debye_coherence_factor(p: &CslParams, l: &LatticeModel) -> Result<f64> {
    let x = (l.sound_speed() * (3.0 * PI) / (p.r_c() * l.debye_frequency())).as_scalar()?;
    Ok(x.min(1.0))
}

/// `2λ (9/4) k_B T n² N/(r_C² M_atom ω_D²) · 3π c_s/(r_C ω_D)`.
pub fn thermal_fluctuation_bound(p: &CslParams, l: &LatticeModel, n: f64, groups: f64) -> Result<Qty> {
    l.validate()?;
    if !(n > 0.0 && groups > 0.0) {
        return Err(Error::invalid("n, N", "must be positive"));
    }
    let k = constants();
    let f = (2.25 * k.k_b * l.temperature() * (n * n * groups)
        / (p.r_c().powi(2) * l.atom_mass() * l.debye_frequency().powi(2)))
    .as_scalar()?;
    Ok(p.lambda() * (2.0 * f * debye_coherence_factor(p, l)?))
}

/// Thermal fluctuation rate from direct integration over a Debye spectrum
/// with `ω²` density of states and three modes per atom.
pub fn thermal_fluctuation_numeric(
    p: &CslParams,
    l: &LatticeModel,
    n: f64,
    groups: f64,
    with_coherence: bool,
) -> Result<Qty> {
    l.validate()?;
    let k = constants();
    let w_d = l.debye_frequency_s_inv;
    let atoms = groups * n * k.m_n.value() / l.atom_mass().value();
    let kt = (k.k_b * l.temperature()).value();
    let hbar = k.hbar.value();
    let w_c = 2.0 * PI * l.sound_speed_cm_s / p.r_c().value();
    let mut failure = None;
    let integrand = |w: f64| {
        if w == 0.0 {
            return 0.0;
        }
        let density = 9.0 * atoms * w * w / w_d.powi(3);
        let occupation = kt / (hbar * w);
        match phonon_mode_rate_factor(p, l, n, units::PER_S.of(w), with_coherence) {
            Ok(f) => density * occupation * f,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let pts = if w_c < w_d { vec![0.0, w_c, w_d] } else { vec![0.0, w_d] };
    let spec = QuadratureSpec::new(f64::MIN_POSITIVE, 1e-10, 50)?;
    let r = integrate_points(integrand, &pts, &spec)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(p.lambda() * (2.0 * r.value))
}

/// Photographic requirement recomputed with the lattice thermal-fluctuation
/// rate in place of the ionic displacement rate. Overestimates the rate.
pub fn photographic_thermal_channel(p: &CslParams, l: &LatticeModel, e: &EmulsionModel) -> Result<ChannelResult> {
    e.validate()?;
    let n = l.nucleons_per_cell(p);
    let rate = thermal_fluctuation_bound(p, l, n, e.grains_per_track as f64)?;
    let target = units::PER_S.of(e.speck_formation_rate_s_inv);
    let required = p.lambda() * (target / rate).as_scalar()?;
    ChannelResult::new(
        "photographic_thermal",
        BoundKind::LowerBound,
        required,
        p,
        e.formation_rate_uncertainty_decades,
    )?
    .observe("reduction_rate", rate, &units::PER_S)?
    .observe_scalar("nucleons_per_cell", n)
    .flag(Flag::OverBound)
    .note("expected to be a substantial overestimate: most atoms move almost identically in both branches")
    .pipe()
}

trait Pipe: Sized {
    fn pipe(self) -> Result<Self> {
        Ok(self)
    }
}

impl Pipe for ChannelResult {}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn std() -> CslParams {
        CslParams::standard()
    }

    #[test]
    fn wave_numbers() {
        let l = LatticeModel::default();
        let e = CarrierModel::electron();
        assert!(rel(e.k_th(&l).unwrap().value(), 1.0088e7) < 1e-3);
        assert!(rel(e.k_min(&l).value(), 2.591e5) < 1e-3);
        l.validate().unwrap();
    }

    #[test]
    fn coherence_factor_limits() {
        let p = std();
        let l = LatticeModel::default();
        let boundary = units::PER_S.of(2.0 * PI * 3e5 / 1e-5);
        assert_eq!(coherence_factor(&p, &l, boundary).unwrap(), 1.0);
        let spacing = units::PER_S.of(2.0 * PI * 3e5 / 1e-8);
        let g = coherence_factor(&p, &l, spacing).unwrap();
        assert!(rel(g, 1.0 / l.nucleons_per_cell(&p)) < 1e-9);
    }

    #[test]
    fn mode_factor_matches_displacement_substitution() {
        let p = std();
        let l = LatticeModel::default();
        let n = 1e9;
        let groups = 50.0;
        let w = 1e10;
        let k = constants();
        let m = k.m_n.value() * n * groups;
        let ell2 = k.hbar.value() / (m * w);
        let eq9 = groups * n * n * ell2 / (4.0 * 1e-10);
        let f = phonon_mode_rate_factor(&p, &l, n, units::PER_S.of(w), false).unwrap();
        assert!(rel(f, eq9) < 1e-12);
    }

    #[test]
    fn slowdown_defaults() {
        let p = std();
        let l = LatticeModel::default();
        let c = CarrierModel::electron();
        let f = slowdown_factor(&p, &l, &c, 1e9, false, SlowdownMethod::Analytic).unwrap();
        assert!(rel(f, 322.2) < 2e-3, "{f}");
        assert!(rel(f, 328.0) < 0.03);
        let g = mean_coherence_factor(&p, &l, &c).unwrap();
        assert!(rel(g, 9.70e-4) < 2e-3);
        let gamma = electron_slowdown_reduction(&p, &l, &c, 1e9, true).unwrap().value();
        assert!(gamma > 0.5e-17 && gamma < 2e-17, "{gamma}");
    }

    #[test]
    fn slowdown_numeric_agrees() {
        let p = std();
        let l = LatticeModel::default();
        let k_th = CarrierModel::electron().k_th(&l).unwrap().value();
        for ratio in [2.0, 10.0, 100.0] {
            let c = CarrierModel {
                k0_cm_inv: ratio * k_th,
                ..CarrierModel::electron()
            };
            for with_g in [false, true] {
                let target = if with_g {
                    SlowdownMethod::ExactCoherence
                } else {
                    SlowdownMethod::Analytic
                };
                let a = slowdown_factor(&p, &l, &c, 1e9, with_g, target).unwrap();
                let n = slowdown_factor(&p, &l, &c, 1e9, with_g, SlowdownMethod::Numeric { sigma: 1.0 }).unwrap();
                assert!(rel(n, a) < 1e-6, "ratio {ratio} G {with_g}: {n} vs {a}");
            }
        }
    }

    #[test]
    fn zero_interval() {
        let p = std();
        let l = LatticeModel::default();
        let k_th = CarrierModel::electron().k_th(&l).unwrap().value();
        let c = CarrierModel {
            k0_cm_inv: k_th,
            ..CarrierModel::electron()
        };
        for m in [SlowdownMethod::Analytic, SlowdownMethod::Numeric { sigma: 1.0 }] {
            assert_eq!(slowdown_factor(&p, &l, &c, 1e9, false, m).unwrap(), 0.0);
        }
        let slow = CarrierModel {
            k0_cm_inv: 0.5 * k_th,
            ..CarrierModel::electron()
        };
        assert!(matches!(
            slowdown_factor(&p, &l, &slow, 1e9, false, SlowdownMethod::Analytic),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn ion_suppression() {
        let l = LatticeModel::default();
        let e = CarrierModel::electron();
        let s = ion_emission_suppression(&e, &l).unwrap();
        assert!(s > 0.998 && s < 1.0);
        let br = CarrierModel::ion(80.0);
        let ratio = (br.k_min(&l) / br.k_th(&l).unwrap()).as_scalar().unwrap();
        assert!(rel(ratio, 9.81) < 0.01, "{ratio}");
        assert!((log10_suppression_from_ratio(ratio) + 65.0).abs() < 3.0);
        assert!((log10_suppression_from_ratio(10.0) + 65.14).abs() < 0.01);
        assert_eq!(suppression_from_ratio(0.0), 1.0);
    }

    #[test]
    fn thermal_fluctuations() {
        let p = std();
        let l = LatticeModel::default();
        let per_n = thermal_fluctuation_bound(&p, &l, 1e9, 1.0).unwrap().value();
        assert!(rel(per_n, 2.567e-9) < 1e-3, "{per_n}");
        let n20 = thermal_fluctuation_bound(&p, &l, 1e9, 20.0).unwrap().value();
        assert!(rel(n20, 5.13e-8) < 1e-3);
        let cold = LatticeModel {
            temperature_k: 0.0,
            ..LatticeModel::default()
        };
        assert_eq!(thermal_fluctuation_bound(&p, &cold, 1e9, 20.0).unwrap().value(), 0.0);
    }

    #[test]
    fn debye_integration_reproduces_closed_forms() {
        let p = std();
        let l = LatticeModel::default();
        let bare = thermal_fluctuation_numeric(&p, &l, 1e9, 20.0, false).unwrap().value();
        let g = debye_coherence_factor(&p, &l).unwrap();
        let closed = thermal_fluctuation_bound(&p, &l, 1e9, 20.0).unwrap().value();
        assert!(rel(bare * g, closed) < 1e-8);
        let with_g = thermal_fluctuation_numeric(&p, &l, 1e9, 20.0, true).unwrap().value();
        assert!(rel(with_g / bare, g) < 0.05);
    }

    #[test]
    fn thermal_channel_over_bound() {
        let r = photographic_thermal_channel(&std(), &LatticeModel::default(), &EmulsionModel::default()).unwrap();
        assert!(r.has_flag(Flag::OverBound));
        assert!(rel(r.observable("reduction_rate").unwrap(), 5.13e-8) < 1e-3);
    }
}
