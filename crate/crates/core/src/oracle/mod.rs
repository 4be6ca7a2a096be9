//! Independent numerical checks of the closed-form rates.
//!
//! The kernel route recomputes decoherence and heating from `G(y)` obtained by
//! quadrature; the grid route integrates a position-space density matrix and
//! fits the decay of one coherence.

pub mod fit;
pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::correlation::{fd_spec, CorrelationKernel, Estimate, KernelShape};
use crate::cslcore::{self, CslParams, EllMode, MassConfig, RateConvention};
use crate::error::{Error, Result};
use crate::units::{constants, units, Dim, Qty};

pub use quadrature::{QuadResult, QuadratureSpec};

/// Tight defaults for oracle convolutions; `abs_tol` is relative to `G(0)`.
pub fn oracle_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-12,
        rel_tol: 1e-12,
        max_depth: 50,
    }
}

fn check_scale(p: &CslParams, kernel: &CorrelationKernel) -> Result<()> {
    let a = p.r_c().value();
    let b = kernel.r_c().value();
    if ((a - b) / a).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "kernel scale {b:e} cm differs from r_C = {a:e} cm"
        )));
    }
    Ok(())
}

/// `γ [G(0) - G(ℓ)]` with both convolution values from radial quadrature.
pub fn decoherence_rate_from_kernel(
    p: &CslParams,
    kernel: &CorrelationKernel,
    separation: Qty,
    spec: &QuadratureSpec,
) -> Result<Qty> {
    check_scale(p, kernel)?;
    separation.expect_dim(Dim::LENGTH, "separation")?;
    if separation.value() < 0.0 {
        return Err(Error::invalid("separation", "must be non-negative"));
    }
    if separation.value() == 0.0 {
        return Ok(p.lambda() * 0.0);
    }
    let g0 = kernel.self_convolve_numeric(separation * 0.0, spec)?.value;
    let gl = kernel.self_convolve_numeric(separation, spec)?.value;
    Ok(p.gamma() * g0.try_sub(gl)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelHeating {
    pub power: Qty,
    /// `power / (λ ħ² M / (r_C² m_N²))`; 3/4 for the Gaussian kernel.
    pub coefficient: f64,
    pub curvature: Estimate,
}

/// `(ħ²γ/(2 m_N²)) M (-∇²G(0))` with the curvature from finite differences.
pub fn heating_from_kernel(p: &CslParams, kernel: &CorrelationKernel, mass: Qty) -> Result<KernelHeating> {
    check_scale(p, kernel)?;
    mass.expect_dim(Dim::MASS, "heated mass")?;
    if !(mass.value() > 0.0) {
        return Err(Error::invalid("mass", "must be positive"));
    }
    let k = constants();
    let curvature = kernel.curvature_numeric(&fd_spec())?;
    let power = k.hbar.powi(2) * p.gamma() * mass * curvature.value / (2.0 * k.m_n.powi(2));
    let unit = p.lambda() * k.hbar.powi(2) * mass / (p.r_c().powi(2) * k.m_n.powi(2));
    Ok(KernelHeating {
        power,
        coefficient: (power / unit).as_scalar()?,
        curvature,
    })
}

/// Uniform one-dimensional position grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositionGrid {
    pub x_min: Qty,
    pub spacing: Qty,
    pub points: usize,
}

impl PositionGrid {
    pub fn new(x_min: Qty, spacing: Qty, points: usize) -> Result<Self> {
        x_min.expect_dim(Dim::LENGTH, "grid origin")?;
        spacing.expect_dim(Dim::LENGTH, "grid spacing")?;
        if !(spacing.value() > 0.0) {
            return Err(Error::invalid("spacing", "must be positive"));
        }
        if points < 2 {
            return Err(Error::invalid("points", "need at least two grid points"));
        }
        Ok(Self { x_min, spacing, points })
    }

    /// `points` nodes spaced by `r_C / per_rc`, centred on zero.
    pub fn centred(r_c: Qty, per_rc: usize, points: usize) -> Result<Self> {
        let spacing = r_c / per_rc as f64;
        Self::new(spacing * (-((points - 1) as f64) / 2.0), spacing, points)
    }

    pub fn position(&self, i: usize) -> f64 {
        self.x_min.value() + i as f64 * self.spacing.value()
    }

    fn node(&self, x: Qty) -> Result<usize> {
        x.expect_dim(Dim::LENGTH, "grid position")?;
        let t = (x.value() - self.x_min.value()) / self.spacing.value();
        let i = t.round();
        if i < 0.0 || i >= self.points as f64 || (t - i).abs() > 1e-6 {
            return Err(Error::Precondition(format!(
                "position {:e} cm is not a node of the grid",
                x.value()
            )));
        }
        Ok(i as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySettings {
    /// Integration horizon; `None` picks three decay times of the pair.
    pub horizon: Option<Qty>,
    pub steps: usize,
    pub convention: RateConvention,
}

impl Default for DecaySettings {
    fn default() -> Self {
        Self {
            horizon: None,
            steps: 400,
            convention: RateConvention::DensityMatrix,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: Qty,
    pub r_squared: f64,
    pub e_folds: f64,
}

/// Evolve `ρ` under pure collapse decoherence on `grid`, starting from an equal
/// superposition of the two nodes, and fit the decay of `⟨x|ρ|y⟩`.
pub fn grid_decay_fit(
    p: &CslParams,
    kernel: &CorrelationKernel,
    grid: &PositionGrid,
    pair: (Qty, Qty),
    settings: &DecaySettings,
) -> Result<DecayFit> {
    check_scale(p, kernel)?;
    let (ix, iy) = (grid.node(pair.0)?, grid.node(pair.1)?);
    let n = grid.points;
    let gamma = p.gamma().value() * settings.convention.factor();
    let rc3 = p.r_c().value().powi(3);

    let mut g_of_offset = vec![0.0; n];
    for (d, g) in g_of_offset.iter_mut().enumerate() {
        let y = kernel.r_c() * (d as f64 * grid.spacing.value() / p.r_c().value());
        *g = kernel.self_convolve(y)?.value() * rc3;
    }
    let rates: Vec<f64> = (0..n * n)
        .map(|k| {
            let d = (k / n).abs_diff(k % n);
            gamma * (g_of_offset[0] - g_of_offset[d]) / rc3
        })
        .collect();

    let target = rates[ix * n + iy];
    if target == 0.0 {
        return Ok(DecayFit {
            rate: p.lambda() * 0.0,
            r_squared: 1.0,
            e_folds: 0.0,
        });
    }
    let horizon = match settings.horizon {
        Some(h) => {
            h.expect_dim(Dim::TIME, "horizon")?;
            h.value()
        }
        None => 3.0 / target,
    };
    if settings.steps < 10 {
        return Err(Error::invalid("steps", "need at least ten steps"));
    }

    let mut rho = vec![0.0; n * n];
    for &a in &[ix, iy] {
        for &b in &[ix, iy] {
            rho[a * n + b] = 0.5;
        }
    }
    let deriv = |r: &[f64], out: &mut [f64]| {
        for k in 0..r.len() {
            out[k] = -rates[k] * r[k];
        }
    };
    let dt = horizon / settings.steps as f64;
    let mut ts = vec![0.0];
    let mut ys = vec![rho[ix * n + iy]];
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![0.0; n * n],
        vec![0.0; n * n],
        vec![0.0; n * n],
        vec![0.0; n * n],
        vec![0.0; n * n],
    );
    for step in 1..=settings.steps {
        deriv(&rho, &mut k1);
        for k in 0..rho.len() {
            tmp[k] = rho[k] + 0.5 * dt * k1[k];
        }
        deriv(&tmp, &mut k2);
        for k in 0..rho.len() {
            tmp[k] = rho[k] + 0.5 * dt * k2[k];
        }
        deriv(&tmp, &mut k3);
        for k in 0..rho.len() {
            tmp[k] = rho[k] + dt * k3[k];
        }
        deriv(&tmp, &mut k4);
        for k in 0..rho.len() {
            rho[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        }
        ts.push(step as f64 * dt);
        ys.push(rho[ix * n + iy].abs());
    }
    let e_folds = (ys[0] / ys[ys.len() - 1]).ln();
    if !(e_folds >= 2.0) {
        return Err(Error::InsufficientDecay(format!(
            "coherence fell by only {e_folds:.3} e-folds over {horizon:e} s"
        )));
    }
    let (rate, r_squared) = fit::exponential_decay_fit(&ts, &ys)?;
    Ok(DecayFit {
        rate: Qty::new(rate, Dim::RATE)?,
        r_squared,
        e_folds,
    })
}

/// One line of the verification report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    pub computed: f64,
    pub reference: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleCheck {
    fn relative(name: impl Into<String>, computed: f64, reference: f64, tolerance: f64) -> Self {
        let deviation = if reference == 0.0 {
            computed.abs()
        } else {
            ((computed - reference) / reference).abs()
        };
        Self {
            name: name.into(),
            computed,
            reference,
            deviation,
            tolerance,
            pass: deviation <= tolerance,
        }
    }

    fn bound(name: impl Into<String>, computed: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            computed,
            reference: 0.0,
            deviation: computed.abs(),
            tolerance: limit,
            pass: computed.abs() <= limit,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub lambda_s_inv: f64,
    pub r_c_cm: f64,
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Odd-order coefficients `(c1, c3)` of a degree-7 fit to `G(s)/G(0)` on `[0, 0.3]`.
pub fn odd_taylor_coefficients(kernel: &CorrelationKernel, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let g0 = kernel.self_convolve_numeric(kernel.r_c() * 0.0, spec)?.value.value();
    let mut ss = Vec::new();
    let mut ys = Vec::new();
    for i in 0..=60 {
        let s = 0.3 * i as f64 / 60.0;
        let g = kernel.self_convolve_numeric(kernel.r_c() * s, spec)?.value.value();
        ss.push(s);
        ys.push(g / g0);
    }
    let c = fit::polyfit(&ss, &ys, 7)?;
    Ok((c[1], c[3]))
}

/// Run every kernel-route check at the given parameters.
pub fn verification_report(p: &CslParams) -> Result<OracleReport> {
    let spec = oracle_spec();
    let gauss = CorrelationKernel::gaussian(p.r_c())?;
    let expo = CorrelationKernel::exponential(p.r_c())?;
    let mut checks = Vec::new();

    for k in [&gauss, &expo] {
        let label = shape_label(k);
        checks.push(OracleCheck::relative(
            format!("{label}: normalization"),
            k.normalization(&QuadratureSpec::default())?,
            1.0,
            1e-6,
        ));
    }

    for s in [0.1, 1.0, 3.0] {
        let ell = p.r_c() * s;
        let route = decoherence_rate_from_kernel(p, &gauss, ell, &spec)?;
        let m = MassConfig::new(1.0, 1.0, 1.0, ell, EllMode::Exact6a)?;
        let closed = cslcore::reduction_rate(p, &m)?;
        checks.push(OracleCheck::relative(
            format!("gaussian: kernel decoherence vs closed form, ell = {s} r_C"),
            route.value(),
            closed.value(),
            1e-5,
        ));
    }

    for s in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let y = p.r_c() * s;
        for k in [&gauss, &expo] {
            let num = k.self_convolve_numeric(y, &spec)?.value.value();
            let closed = k.self_convolve(y)?.value();
            checks.push(OracleCheck::relative(
                format!("{}: G quadrature vs closed form, s = {s}", shape_label(k)),
                num,
                closed,
                1e-6,
            ));
        }
    }

    for k in [&gauss, &expo] {
        let (c1, c3) = odd_taylor_coefficients(k, &spec)?;
        checks.push(OracleCheck::bound(
            format!("{}: fitted s^1 coefficient", shape_label(k)),
            c1,
            1e-4,
        ));
        checks.push(OracleCheck::bound(
            format!("{}: fitted s^3 coefficient", shape_label(k)),
            c3,
            1e-4,
        ));
    }

    let m_n = constants().m_n;
    let heat = heating_from_kernel(p, &gauss, m_n)?;
    checks.push(OracleCheck::relative(
        "gaussian: kernel heating vs closed form",
        heat.power.value(),
        cslcore::heating_rate(p, m_n)?.value(),
        1e-5,
    ));
    let heat = heating_from_kernel(p, &expo, m_n)?;
    checks.push(OracleCheck::relative(
        "exponential: kernel heating coefficient vs sqrt(pi)/16",
        heat.coefficient,
        std::f64::consts::PI.sqrt() / 16.0,
        1e-5,
    ));

    let grid = PositionGrid::centred(p.r_c(), 4, 33)?;
    let x = p.r_c() * -1.5;
    let fitted = grid_decay_fit(p, &gauss, &grid, (x, p.r_c() * 1.5), &DecaySettings::default())?;
    let m = MassConfig::new(1.0, 1.0, 1.0, p.r_c() * 3.0, EllMode::Exact6a)?;
    checks.push(OracleCheck::relative(
        "gaussian: grid decay fit vs closed form, 3 r_C",
        fitted.rate.value(),
        cslcore::reduction_rate(p, &m)?.value(),
        1e-5,
    ));
    checks.push(OracleCheck::relative(
        "gaussian: grid decay fit r^2",
        fitted.r_squared,
        1.0,
        1e-4,
    ));

    Ok(OracleReport {
        lambda_s_inv: p.lambda().value(),
        r_c_cm: p.r_c().to(&units::CM)?,
        checks,
    })
}

fn shape_label(k: &CorrelationKernel) -> &'static str {
    match k.shape() {
        KernelShape::Gaussian => "gaussian",
        KernelShape::Exponential => "exponential",
        KernelShape::CustomRadial(_) => "custom",
    }
}
