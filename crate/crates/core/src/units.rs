//! Dimensioned quantities in CGS-Gaussian units, with temperature as a fourth
//! base dimension.
//!
//! Electromagnetic coupling only ever enters through the dimensionless fine
//! structure constant, so no charge dimension is carried. Energies are stored
//! in erg; eV, keV and friends are conversion targets only.

use std::fmt;
use std::ops::{Div, Mul, Neg};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponents of (length, mass, time, temperature).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Dim {
    pub length: i16,
    pub mass: i16,
    pub time: i16,
    pub temperature: i16,
}

impl Dim {
    pub const fn new(length: i16, mass: i16, time: i16, temperature: i16) -> Self {
        Self {
            length,
            mass,
            time,
            temperature,
        }
    }

    pub const NONE: Dim = Dim::new(0, 0, 0, 0);
    pub const LENGTH: Dim = Dim::new(1, 0, 0, 0);
    pub const MASS: Dim = Dim::new(0, 1, 0, 0);
    pub const TIME: Dim = Dim::new(0, 0, 1, 0);
    pub const TEMPERATURE: Dim = Dim::new(0, 0, 0, 1);
    pub const RATE: Dim = Dim::new(0, 0, -1, 0);
    pub const ENERGY: Dim = Dim::new(2, 1, -2, 0);
    pub const POWER: Dim = Dim::new(2, 1, -3, 0);
    pub const ACTION: Dim = Dim::new(2, 1, -1, 0);
    pub const MOMENTUM: Dim = Dim::new(1, 1, -1, 0);
    pub const VELOCITY: Dim = Dim::new(1, 0, -1, 0);
    pub const WAVENUMBER: Dim = Dim::new(-1, 0, 0, 0);
    pub const NUMBER_DENSITY: Dim = Dim::new(-3, 0, 0, 0);
    pub const MOMENT_OF_INERTIA: Dim = Dim::new(2, 1, 0, 0);
    /// Rate per unit energy, e.g. photons per second per eV.
    pub const SPECTRAL_RATE: Dim = Dim::new(-2, -1, 1, 0);

    pub const fn mul(self, o: Dim) -> Dim {
        Dim::new(
            self.length + o.length,
            self.mass + o.mass,
            self.time + o.time,
            self.temperature + o.temperature,
        )
    }

    pub const fn div(self, o: Dim) -> Dim {
        Dim::new(
            self.length - o.length,
            self.mass - o.mass,
            self.time - o.time,
            self.temperature - o.temperature,
        )
    }

    pub const fn powi(self, p: i16) -> Dim {
        Dim::new(self.length * p, self.mass * p, self.time * p, self.temperature * p)
    }

    /// `self^(num/den)`, defined only when every exponent times `num` is divisible by `den`.
    pub fn pow_ratio(self, num: i16, den: i16) -> Option<Dim> {
        if den == 0 {
            return None;
        }
        let f = |e: i16| {
            let scaled = e * num;
            (scaled % den == 0).then_some(scaled / den)
        };
        Some(Dim::new(
            f(self.length)?,
            f(self.mass)?,
            f(self.time)?,
            f(self.temperature)?,
        ))
    }

    pub fn is_dimensionless(self) -> bool {
        self == Dim::NONE
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_dimensionless() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        for (sym, e) in [
            ("cm", self.length),
            ("g", self.mass),
            ("s", self.time),
            ("K", self.temperature),
        ] {
            match e {
                0 => {}
                1 => parts.push(sym.to_string()),
                _ => parts.push(format!("{sym}^{e}")),
            }
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// A finite value tagged with its dimension.
///
/// Arithmetic operators panic if a result is not finite; constructors that take
/// user input go through [`Qty::new`] and report an error instead.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Qty {
    value: f64,
    dim: Dim,
}

impl Qty {
    pub fn new(value: f64, dim: Dim) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("{value} [{dim}]")));
        }
        Ok(Self { value, dim })
    }

    fn make(value: f64, dim: Dim) -> Self {
        assert!(
            value.is_finite(),
            "quantity arithmetic produced a non-finite value [{dim}]"
        );
        Self { value, dim }
    }

    pub fn scalar(value: f64) -> Self {
        Self::make(value, Dim::NONE)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn has_dim(&self, dim: Dim) -> bool {
        self.dim == dim
    }

    /// Value of a dimensionless quantity.
    pub fn as_scalar(&self) -> Result<f64> {
        self.expect_dim(Dim::NONE, "as_scalar")?;
        Ok(self.value)
    }

    pub fn expect_dim(&self, dim: Dim, context: &str) -> Result<()> {
        if self.dim != dim {
            return Err(Error::DimensionMismatch {
                context: context.to_string(),
                expected: dim,
                found: self.dim,
            });
        }
        Ok(())
    }

    pub fn try_add(self, o: Qty) -> Result<Qty> {
        self.expect_dim(o.dim, "addition")?;
        Qty::new(self.value + o.value, self.dim)
    }

    pub fn try_sub(self, o: Qty) -> Result<Qty> {
        self.expect_dim(o.dim, "subtraction")?;
        Qty::new(self.value - o.value, self.dim)
    }

    pub fn powi(self, p: i16) -> Qty {
        Qty::make(self.value.powi(i32::from(p)), self.dim.powi(p))
    }

    /// Square root; every exponent must be even.
    pub fn sqrt(self) -> Result<Qty> {
        self.pow_ratio(1, 2)
    }

    pub fn pow_ratio(self, num: i16, den: i16) -> Result<Qty> {
        let dim = self.dim.pow_ratio(num, den).ok_or_else(|| Error::DimensionMismatch {
            context: format!("power {num}/{den}"),
            expected: Dim::NONE,
            found: self.dim,
        })?;
        Qty::new(self.value.powf(f64::from(num) / f64::from(den)), dim)
    }

    pub fn abs(self) -> Qty {
        Qty::make(self.value.abs(), self.dim)
    }

    pub fn min(self, o: Qty) -> Result<Qty> {
        self.expect_dim(o.dim, "min")?;
        Ok(if o.value < self.value { o } else { self })
    }

    pub fn is_positive(&self) -> bool {
        self.value > 0.0
    }

    /// Numeric value expressed in `unit`.
    pub fn to(&self, unit: &Unit) -> Result<f64> {
        self.expect_dim(unit.dim, unit.symbol)?;
        Ok(self.value / unit.to_base)
    }
}

impl fmt::Display for Qty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6e} {}", self.value, self.dim)
    }
}

impl Mul for Qty {
    type Output = Qty;
    fn mul(self, o: Qty) -> Qty {
        Qty::make(self.value * o.value, self.dim.mul(o.dim))
    }
}

impl Div for Qty {
    type Output = Qty;
    fn div(self, o: Qty) -> Qty {
        Qty::make(self.value / o.value, self.dim.div(o.dim))
    }
}

impl Mul<f64> for Qty {
    type Output = Qty;
    fn mul(self, o: f64) -> Qty {
        Qty::make(self.value * o, self.dim)
    }
}

impl Mul<Qty> for f64 {
    type Output = Qty;
    fn mul(self, o: Qty) -> Qty {
        Qty::make(self * o.value, o.dim)
    }
}

impl Div<f64> for Qty {
    type Output = Qty;
    fn div(self, o: f64) -> Qty {
        Qty::make(self.value / o, self.dim)
    }
}

impl Div<Qty> for f64 {
    type Output = Qty;
    fn div(self, o: Qty) -> Qty {
        Qty::make(self / o.value, Dim::NONE.div(o.dim))
    }
}

impl Neg for Qty {
    type Output = Qty;
    fn neg(self) -> Qty {
        Qty::make(-self.value, self.dim)
    }
}

/// Pass iff `q` carries exactly `expected`.
pub fn assert_dim(q: &Qty, expected: Dim) -> bool {
    q.dim == expected
}

/// A named unit: multiply a value in this unit by `to_base` to get CGS.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unit {
    pub symbol: &'static str,
    pub dim: Dim,
    pub to_base: f64,
}

impl Unit {
    pub const fn new(symbol: &'static str, dim: Dim, to_base: f64) -> Self {
        Self { symbol, dim, to_base }
    }

    /// Quantity holding `value` of this unit.
    pub fn of(&self, value: f64) -> Qty {
        Qty::make(value * self.to_base, self.dim)
    }
}

/// Rescale `q` into `target`, returning the numeric value in that unit.
pub fn convert(q: Qty, target: &Unit) -> Result<f64> {
    q.to(target)
}

pub mod si {
    //! Exact or CODATA 2018 values, CGS.

    pub const HBAR: f64 = 1.054_571_817e-27; // erg s
    pub const C: f64 = 2.997_924_58e10; // cm/s
    pub const K_B: f64 = 1.380_649e-16; // erg/K
    /// Nucleon mass, taken as the proton mass.
    pub const M_N: f64 = 1.672_621_923_69e-24; // g
    pub const M_E: f64 = 9.109_383_701_5e-28; // g
    pub const EV: f64 = 1.602_176_634e-12; // erg
    /// Julian year.
    pub const YEAR: f64 = 3.155_76e7; // s
    pub const DAY: f64 = 86_400.0; // s
    pub const PARSEC: f64 = 3.085_677_581_491_367e18; // cm
    pub const MPC: f64 = 1.0e6 * PARSEC;
    pub const ALPHA_FS: f64 = 1.0 / 137.04;
}

pub mod units {
    //! Unit catalog used for conversion and for reading config values.
    use super::{si, Dim, Unit};

    pub const CM: Unit = Unit::new("cm", Dim::LENGTH, 1.0);
    pub const M: Unit = Unit::new("m", Dim::LENGTH, 100.0);
    pub const KM: Unit = Unit::new("km", Dim::LENGTH, 1.0e5);
    pub const MICRON: Unit = Unit::new("um", Dim::LENGTH, 1.0e-4);
    pub const ANGSTROM: Unit = Unit::new("A", Dim::LENGTH, 1.0e-8);
    pub const MPC: Unit = Unit::new("Mpc", Dim::LENGTH, si::MPC);
    pub const G: Unit = Unit::new("g", Dim::MASS, 1.0);
    pub const KG: Unit = Unit::new("kg", Dim::MASS, 1.0e3);
    pub const AMU: Unit = Unit::new("amu", Dim::MASS, 1.660_539_066_60e-24);
    pub const S: Unit = Unit::new("s", Dim::TIME, 1.0);
    pub const DAY: Unit = Unit::new("day", Dim::TIME, si::DAY);
    pub const YEAR: Unit = Unit::new("yr", Dim::TIME, si::YEAR);
    pub const KELVIN: Unit = Unit::new("K", Dim::TEMPERATURE, 1.0);
    pub const ERG: Unit = Unit::new("erg", Dim::ENERGY, 1.0);
    pub const JOULE: Unit = Unit::new("J", Dim::ENERGY, 1.0e7);
    pub const EV: Unit = Unit::new("eV", Dim::ENERGY, si::EV);
    pub const KEV: Unit = Unit::new("keV", Dim::ENERGY, 1.0e3 * si::EV);
    pub const MEV: Unit = Unit::new("MeV", Dim::ENERGY, 1.0e6 * si::EV);
    pub const GEV: Unit = Unit::new("GeV", Dim::ENERGY, 1.0e9 * si::EV);
    pub const PER_S: Unit = Unit::new("s^-1", Dim::RATE, 1.0);
    pub const PER_YEAR: Unit = Unit::new("yr^-1", Dim::RATE, 1.0 / si::YEAR);
    pub const PER_DAY: Unit = Unit::new("day^-1", Dim::RATE, 1.0 / si::DAY);
    pub const ERG_PER_S: Unit = Unit::new("erg/s", Dim::POWER, 1.0);
    pub const EV_PER_S: Unit = Unit::new("eV/s", Dim::POWER, si::EV);
    pub const EV_PER_S_CM3: Unit = Unit::new("eV s^-1 cm^-3", Dim::new(-1, 1, -3, 0), si::EV);
    pub const ERG_PER_G_S: Unit = Unit::new("erg g^-1 s^-1", Dim::new(2, 0, -3, 0), 1.0);
    pub const ERG_S: Unit = Unit::new("erg s", Dim::ACTION, 1.0);
    pub const EV_CM: Unit = Unit::new("eV cm", Dim::new(3, 1, -2, 0), si::EV);
    pub const CM_PER_S: Unit = Unit::new("cm/s", Dim::VELOCITY, 1.0);
    pub const KM_PER_S_PER_MPC: Unit = Unit::new("km/s/Mpc", Dim::RATE, 1.0e5 / si::MPC);
    pub const PER_CM: Unit = Unit::new("cm^-1", Dim::WAVENUMBER, 1.0);
    pub const PER_CM3: Unit = Unit::new("cm^-3", Dim::NUMBER_DENSITY, 1.0);
    pub const PER_CM5: Unit = Unit::new("cm^-5", Dim::new(-5, 0, 0, 0), 1.0);
    pub const PER_KG: Unit = Unit::new("kg^-1", Dim::new(0, -1, 0, 0), 1.0e-3);
    pub const G_CM2: Unit = Unit::new("g cm^2", Dim::MOMENT_OF_INERTIA, 1.0);
    pub const G_PER_CM3: Unit = Unit::new("g cm^-3", Dim::new(-3, 1, 0, 0), 1.0);
    pub const CM3_PER_S: Unit = Unit::new("cm^3 s^-1", Dim::new(3, 0, -1, 0), 1.0);
    pub const PER_CM2: Unit = Unit::new("cm^-2", Dim::new(-2, 0, 0, 0), 1.0);
    pub const PER_CM2_S: Unit = Unit::new("cm^-2 s^-1", Dim::new(-2, 0, -1, 0), 1.0);
    pub const PER_S_PER_EV: Unit = Unit::new("s^-1 eV^-1", Dim::SPECTRAL_RATE, 1.0 / si::EV);
    pub const RAD: Unit = Unit::new("rad", Dim::NONE, 1.0);
    pub const ONE: Unit = Unit::new("1", Dim::NONE, 1.0);

    pub const CATALOG: &[Unit] = &[
        CM,
        M,
        KM,
        MICRON,
        ANGSTROM,
        MPC,
        G,
        KG,
        AMU,
        S,
        DAY,
        YEAR,
        KELVIN,
        ERG,
        JOULE,
        EV,
        KEV,
        MEV,
        GEV,
        PER_S,
        PER_YEAR,
        PER_DAY,
        ERG_PER_S,
        EV_PER_S,
        EV_PER_S_CM3,
        ERG_PER_G_S,
        ERG_S,
        EV_CM,
        CM_PER_S,
        KM_PER_S_PER_MPC,
        PER_CM,
        PER_CM3,
        PER_CM5,
        PER_KG,
        G_CM2,
        G_PER_CM3,
        CM3_PER_S,
        PER_CM2,
        PER_CM2_S,
        PER_S_PER_EV,
        RAD,
        ONE,
    ];
}

/// Physical constants as dimensioned quantities.
#[derive(Clone, Debug)]
pub struct Constants {
    pub hbar: Qty,
    pub h: Qty,
    pub c: Qty,
    pub k_b: Qty,
    pub m_n: Qty,
    pub m_e: Qty,
    pub alpha_fs: f64,
    pub ev: Qty,
    pub year: Qty,
    pub day: Qty,
    /// ħc, held in CGS (erg cm); read it in eV cm with [`units::EV_CM`].
    pub hbar_c: Qty,
}

impl Constants {
    fn build() -> Self {
        let hbar = Qty::make(si::HBAR, Dim::ACTION);
        let c = Qty::make(si::C, Dim::VELOCITY);
        Constants {
            hbar,
            h: hbar * (2.0 * std::f64::consts::PI),
            c,
            k_b: Qty::make(si::K_B, Dim::ENERGY.div(Dim::TEMPERATURE)),
            m_n: Qty::make(si::M_N, Dim::MASS),
            m_e: Qty::make(si::M_E, Dim::MASS),
            alpha_fs: si::ALPHA_FS,
            ev: units::EV.of(1.0),
            year: units::YEAR.of(1.0),
            day: units::DAY.of(1.0),
            hbar_c: hbar * c,
        }
    }

    /// Squared electron charge in natural (Heaviside-Lorentz) form, 4πα.
    pub fn e_squared_natural(&self) -> f64 {
        4.0 * std::f64::consts::PI * self.alpha_fs
    }
}

/// Shared constants table.
pub fn constants() -> &'static Constants {
    static CONSTANTS: OnceLock<Constants> = OnceLock::new();
    CONSTANTS.get_or_init(Constants::build)
}

#[cfg(test)]
mod tests {
    use super::units::*;
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn heating_rate_erg_to_ev() {
        let q = ERG_PER_S.of(1.1e-37);
        let ev_s = convert(q, &EV_PER_S).unwrap();
        assert!(rel(ev_s, 6.87e-26) < 2e-3, "{ev_s}");
    }

    #[test]
    fn zero_converts_to_zero() {
        assert_eq!(convert(ERG.of(0.0), &EV).unwrap(), 0.0);
    }

    #[test]
    fn kelvin_times_boltzmann_in_ev() {
        // k_B = 8.617333e-5 eV/K
        let e = KELVIN.of(2.0e4) * constants().k_b;
        assert!(rel(e.to(&EV).unwrap(), 2.0e4 * 8.617_333e-5) < 1e-6);
        assert!(rel(e.to(&EV).unwrap(), 1.724) < 1e-3);
    }

    #[test]
    fn convert_rejects_mismatched_dimension() {
        let err = convert(CM.of(1.0), &EV).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn assert_dim_cases() {
        let lambda = PER_S.of(2.2e-17);
        let r_c = CM.of(1e-5);
        assert!(assert_dim(&lambda, Dim::RATE));
        assert!(!assert_dim(&r_c, Dim::RATE));
        let k = constants();
        let q = k.hbar.powi(2) / (r_c.powi(2) * k.m_n);
        // erg^2 s^2 / (cm^2 g) = g cm^2 s^-2 = energy; times a rate would be power
        assert!(assert_dim(&q, Dim::ENERGY));
        assert!(assert_dim(&(q * lambda), Dim::POWER));
    }

    #[test]
    fn addition_requires_equal_dims() {
        assert!(CM.of(1.0).try_add(CM.of(2.0)).is_ok());
        assert!(CM.of(1.0).try_add(S.of(2.0)).is_err());
        assert!(CM.of(1.0).try_sub(G.of(2.0)).is_err());
    }

    #[test]
    fn sqrt_needs_even_exponents() {
        assert!(CM.of(4.0).sqrt().is_err());
        let a = CM.of(3.0).powi(2).sqrt().unwrap();
        assert!(a.has_dim(Dim::LENGTH));
        assert!((a.value() - 3.0).abs() < 1e-15);
        let g = PER_CM2.of(1e10).pow_ratio(3, 2).unwrap();
        assert!(g.has_dim(Dim::NUMBER_DENSITY));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(Qty::new(f64::NAN, Dim::NONE).is_err());
        assert!(Qty::new(f64::INFINITY, Dim::LENGTH).is_err());
    }

    #[test]
    fn hbar_c_in_ev_cm() {
        let k = constants();
        let direct = si::HBAR * si::C / si::EV;
        assert!(rel(k.hbar_c.to(&EV_CM).unwrap(), direct) < 1e-12);
        assert!(rel(direct, 1.973_269_804e-5) < 1e-8);
    }

    #[test]
    fn fine_structure_pinned() {
        let k = constants();
        assert_eq!(k.alpha_fs, 1.0 / 137.04);
        assert!(rel(k.e_squared_natural(), 4.0 * std::f64::consts::PI / 137.04) < 1e-15);
    }

    #[test]
    fn dim_display() {
        assert_eq!(Dim::ENERGY.to_string(), "cm^2 g s^-2");
        assert_eq!(Dim::NONE.to_string(), "1");
    }
}
