//! CSL parameters and the master rate formulas: reduction, heating and
//! noise-driven radiation from charged particles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{constants, units, Dim, Qty};

pub const LAMBDA_STANDARD: f64 = 2.2e-17;
pub const R_C_STANDARD: f64 = 1e-5;

pub const GAMMA_DIM: Dim = Dim::new(3, 0, -1, 0);
pub const ETA_DIM: Dim = Dim::new(-2, 0, -1, 0);
/// Mean-square acceleration per unit time, cm² s^-3.
pub const ACCEL_INTENSITY_DIM: Dim = Dim::new(2, 0, -3, 0);

/// Collapse rate `λ` and correlation length `r_C`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CslParams {
    lambda: Qty,
    r_c: Qty,
}

impl CslParams {
    pub fn new(lambda: Qty, r_c: Qty) -> Result<Self> {
        lambda.expect_dim(Dim::RATE, "lambda")?;
        r_c.expect_dim(Dim::LENGTH, "r_C")?;
        if !(lambda.value() > 0.0) {
            return Err(Error::invalid(
                "lambda",
                format!("must be positive, got {}", lambda.value()),
            ));
        }
        if !(r_c.value() > 0.0) {
            return Err(Error::invalid("r_C", format!("must be positive, got {}", r_c.value())));
        }
        Ok(Self { lambda, r_c })
    }

    /// From `λ` in s^-1 and `r_C` in cm.
    pub fn from_values(lambda: f64, r_c: f64) -> Result<Self> {
        Self::new(Qty::new(lambda, Dim::RATE)?, Qty::new(r_c, Dim::LENGTH)?)
    }

    pub fn standard() -> Self {
        Self::from_values(LAMBDA_STANDARD, R_C_STANDARD).expect("valid preset")
    }

    pub fn case_i() -> Self {
        Self::from_values(4e-10, 1e-5).expect("valid preset")
    }

    pub fn case_ii() -> Self {
        Self::from_values(3e-8, 1e-4).expect("valid preset")
    }

    /// Recover `λ` from `γ = 8π^{3/2} r_C³ λ`.
    pub fn from_gamma(gamma: Qty, r_c: Qty) -> Result<Self> {
        gamma.expect_dim(GAMMA_DIM, "gamma")?;
        r_c.expect_dim(Dim::LENGTH, "r_C")?;
        let lambda = gamma / (8.0 * PI.powf(1.5) * r_c.powi(3));
        Self::new(lambda, r_c)
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::from_values(lambda, self.r_c.value())
    }

    pub fn with_r_c(&self, r_c: f64) -> Result<Self> {
        Self::from_values(self.lambda.value(), r_c)
    }

    pub fn lambda(&self) -> Qty {
        self.lambda
    }

    pub fn r_c(&self) -> Qty {
        self.r_c
    }

    /// `α = 1/r_C²`.
    pub fn alpha(&self) -> Qty {
        1.0 / self.r_c.powi(2)
    }

    /// `γ = 8π^{3/2} r_C³ λ`.
    pub fn gamma(&self) -> Qty {
        8.0 * PI.powf(1.5) * self.r_c.powi(3) * self.lambda
    }

    /// Small-displacement coupling `η = λ/(2 r_C²)`.
    pub fn eta(&self) -> Qty {
        self.lambda / (2.0 * self.r_c.powi(2))
    }

    /// Ratio of `λ` to the standard value.
    pub fn lambda_ratio(&self) -> f64 {
        self.lambda.value() / LAMBDA_STANDARD
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EllMode {
    Exact6a,
    SmallEllExpansion,
    Saturated,
}

/// Which quantity the reduction rate describes. The variance-based reading
/// gives twice the density-matrix decay rate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateConvention {
    #[default]
    DensityMatrix,
    Variance,
}

impl RateConvention {
    pub fn factor(self) -> f64 {
        match self {
            RateConvention::DensityMatrix => 1.0,
            RateConvention::Variance => 2.0,
        }
    }
}

/// `n` nucleons per coherent group, `groups` groups separated by more than
/// `r_C`, each displaced by `ell`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassConfig {
    pub n: f64,
    pub groups: f64,
    pub mass_ratio: f64,
    pub ell: Qty,
    pub mode: EllMode,
}

impl MassConfig {
    pub fn new(n: f64, groups: f64, mass_ratio: f64, ell: Qty, mode: EllMode) -> Result<Self> {
        for (name, v) in [("n", n), ("N", groups), ("mass_ratio", mass_ratio)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        ell.expect_dim(Dim::LENGTH, "displacement")?;
        if ell.value() < 0.0 {
            return Err(Error::invalid("ell", "displacement must be non-negative"));
        }
        Ok(Self {
            n,
            groups,
            mass_ratio,
            ell,
            mode,
        })
    }

    /// Displacement well beyond `r_C`: the suppression factor is 1.
    pub fn saturated(n: f64, groups: f64) -> Result<Self> {
        Self::new(n, groups, 1.0, units::CM.of(0.0), EllMode::Saturated)
    }
}

/// `1 - e^{-u}` without cancellation for small `u`.
fn one_minus_exp_neg(u: f64) -> f64 {
    -(-u).exp_m1()
}

/// Off-diagonal decay rate for the mass configuration.
pub fn reduction_rate(p: &CslParams, m: &MassConfig) -> Result<Qty> {
    reduction_rate_with(p, m, RateConvention::DensityMatrix)
}

pub fn reduction_rate_with(p: &CslParams, m: &MassConfig, convention: RateConvention) -> Result<Qty> {
    let base = p.lambda() * (m.n * m.n * m.groups * m.mass_ratio * m.mass_ratio);
    let u = (m.ell / (2.0 * p.r_c())).powi(2).as_scalar()?;
    let factor = match m.mode {
        EllMode::Exact6a => one_minus_exp_neg(u),
        EllMode::SmallEllExpansion => {
            if m.ell.value() > p.r_c().value() {
                return Err(Error::Precondition(format!(
                    "small-displacement expansion needs ell <= r_C (ell = {:e} cm, r_C = {:e} cm)",
                    m.ell.value(),
                    p.r_c().value()
                )));
            }
            u
        }
        EllMode::Saturated => 1.0,
    };
    Ok(base * (factor * convention.factor()))
}

/// Secular energy gain `(3/4) λ ħ² M / (r_C² m_N²)`, erg/s.
pub fn heating_rate(p: &CslParams, total_mass: Qty) -> Result<Qty> {
    total_mass.expect_dim(Dim::MASS, "heated mass")?;
    if total_mass.value() < 0.0 {
        return Err(Error::invalid("mass", "must be non-negative"));
    }
    let k = constants();
    Ok(0.75 * p.lambda() * k.hbar.powi(2) * total_mass / (p.r_c().powi(2) * k.m_n.powi(2)))
}

/// `E[ẍ²] dt = 3ħ²λ/(2 m_N² r_C²)`, summed over the three axes.
pub fn acceleration_intensity(p: &CslParams) -> Qty {
    let k = constants();
    1.5 * k.hbar.powi(2) * p.lambda() / (k.m_n.powi(2) * p.r_c().powi(2))
}

/// The same intensity from the quadratic small-displacement model: momentum
/// diffusion `ħ²η` along each axis.
pub fn acceleration_intensity_qmupl(p: &CslParams) -> Qty {
    let k = constants();
    3.0 * k.hbar.powi(2) * p.eta() / k.m_n.powi(2)
}

/// Photon emission rate per unit photon energy for white-noise acceleration of
/// intensity `intensity` (Larmor dipole formula with `e² = α ħ c`).
pub fn spectrum_from_acceleration(intensity: Qty, k_photon: Qty) -> Result<Qty> {
    intensity.expect_dim(ACCEL_INTENSITY_DIM, "acceleration intensity")?;
    check_photon_energy(k_photon)?;
    let k = constants();
    Ok(2.0 * k.alpha_fs * intensity / (3.0 * PI * k.c.powi(2) * k_photon))
}

fn check_photon_energy(k_photon: Qty) -> Result<()> {
    k_photon.expect_dim(Dim::ENERGY, "photon energy")?;
    if !(k_photon.value() > 0.0) {
        return Err(Error::invalid("k_photon", "photon energy must be positive"));
    }
    Ok(())
}

/// `dΓ/dk = α λ (ħc)² / (π r_C² (m_N c²)² k)` per free charged particle.
pub fn radiated_power_spectrum(p: &CslParams, k_photon: Qty) -> Result<Qty> {
    check_photon_energy(k_photon)?;
    let k = constants();
    let mc2 = k.m_n * k.c.powi(2);
    Ok(k.alpha_fs * p.lambda() * k.hbar_c.powi(2) / (PI * p.r_c().powi(2) * mc2.powi(2) * k_photon))
}

/// Radiated power `∫₀^{k_max} k dΓ/dk dk`.
pub fn total_radiated_power(p: &CslParams, k_max: Qty) -> Result<Qty> {
    let per_k = radiated_power_spectrum(p, k_max)? * k_max;
    Ok(per_k * k_max)
}

/// Fractional survival of the radiation amplitude when the emitting electron
/// sits in a neutral atom of radius `a0` moving at `v/c`.
pub fn neutralization_correction(a0: Qty, v_over_c: f64, p: &CslParams) -> Result<f64> {
    a0.expect_dim(Dim::LENGTH, "atomic radius")?;
    let x = (a0 / p.r_c()).as_scalar()?;
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Precondition(format!("a0/r_C = {x} must lie in [0, 1)")));
    }
    if !(0.0..1.0).contains(&v_over_c) {
        return Err(Error::Precondition(format!("v/c = {v_over_c} must lie in [0, 1)")));
    }
    Ok(x * x + v_over_c * v_over_c + x * v_over_c)
}
