//! Noise correlation kernels `g(x)`, their self-convolution `G(y)` and the
//! curvature `-∇²G(0)` that sets the heating coefficient.
//!
//! Numerics run on the dimensionless profile `ĝ(s) = r_C³ g(s r_C)`, so the
//! same code serves every `r_C`.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::quadrature::{adaptive_points, integrate_points, QuadratureSpec};
use crate::units::{Dim, Qty};

/// Custom profiles are cut off at this many correlation lengths.
pub const TRUNCATION_RADIUS: f64 = 12.0;

pub const CURVATURE_DIM: Dim = Dim::new(-5, 0, 0, 0);

/// Tabulated radial profile `p(s)`, `s = |x|/r_C`, linearly interpolated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    radii: Vec<f64>,
    values: Vec<f64>,
    norm: f64,
    truncated_fraction: f64,
    cumulative: Vec<f64>,
}

impl RadialProfile {
    pub fn new(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() != values.len() {
            return Err(Error::invalid("profile", "radius and value columns differ in length"));
        }
        if radii.len() < 2 {
            return Err(Error::invalid("profile", "need at least two points"));
        }
        if radii.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::invalid("profile", "non-finite entry"));
        }
        if radii[0] < 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "profile",
                "radii must be non-negative and strictly increasing",
            ));
        }
        if values.iter().any(|&v| v < 0.0) {
            return Err(Error::invalid("profile", "values must be non-negative"));
        }
        let mut p = Self {
            radii,
            values,
            norm: 1.0,
            truncated_fraction: 0.0,
            cumulative: Vec::new(),
        };
        let mut acc = p.values[0] * p.radii[0] * p.radii[0] / 2.0;
        p.cumulative.push(acc);
        for i in 1..p.radii.len() {
            acc += p.segment_moment(i, p.radii[i]);
            p.cumulative.push(acc);
        }
        let kept = p.raw_moment(0.0, TRUNCATION_RADIUS);
        let full = p.raw_moment(0.0, f64::INFINITY);
        if !(kept > 0.0) {
            return Err(Error::invalid("profile", "zero weight inside the truncation radius"));
        }
        p.norm = 1.0 / (4.0 * PI * kept);
        p.truncated_fraction = (full - kept) / full;
        Ok(p)
    }

    /// Parse two whitespace- or comma-separated columns; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut radii = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|c| !c.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::Config(format!(
                    "profile line {}: expected two columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let num = |c: &str| {
                c.parse::<f64>()
                    .map_err(|e| Error::Config(format!("profile line {}: {e}", lineno + 1)))
            };
            radii.push(num(cols[0])?);
            values.push(num(cols[1])?);
        }
        Self::new(radii, values)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn raw(&self, s: f64) -> f64 {
        let last = self.radii.len() - 1;
        if s <= self.radii[0] {
            return self.values[0];
        }
        if s > self.radii[last] {
            return 0.0;
        }
        let i = self.radii.partition_point(|&r| r < s).max(1);
        let (r0, r1) = (self.radii[i - 1], self.radii[i]);
        let t = (s - r0) / (r1 - r0);
        self.values[i - 1] + t * (self.values[i] - self.values[i - 1])
    }

    // ∫ s² p(s) ds over [a, b], exact for the piecewise-linear interpolant.
    fn raw_moment(&self, a: f64, b: f64) -> f64 {
        let top = b.min(*self.radii.last().expect("non-empty"));
        let mut pts = vec![a];
        pts.extend(self.radii.iter().copied().filter(|&r| r > a && r < top));
        pts.push(top);
        if top <= a {
            return 0.0;
        }
        let spec = QuadratureSpec::default();
        adaptive_points(|s| s * s * self.raw(s), &pts, &spec).value
    }

    /// Fraction of the untruncated profile weight lying beyond [`TRUNCATION_RADIUS`].
    pub fn truncated_fraction(&self) -> f64 {
        self.truncated_fraction
    }

    fn value(&self, s: f64) -> f64 {
        if s > TRUNCATION_RADIUS {
            0.0
        } else {
            self.norm * self.raw(s)
        }
    }

    fn nodes_in(&self, lo: f64, hi: f64) -> impl Iterator<Item = f64> + '_ {
        self.radii.iter().copied().filter(move |&r| r > lo && r < hi)
    }

    fn reach(&self) -> f64 {
        TRUNCATION_RADIUS.min(*self.radii.last().expect("non-empty"))
    }

    // ∫ v p(v) dv over [radii[i-1], x] on segment i, x within the segment.
    fn segment_moment(&self, i: usize, x: f64) -> f64 {
        let (a, b) = (self.radii[i - 1], self.radii[i]);
        let slope = (self.values[i] - self.values[i - 1]) / (b - a);
        let y0 = self.values[i - 1];
        y0 * (x * x - a * a) / 2.0 + slope * ((x.powi(3) - a.powi(3)) / 3.0 - a * (x * x - a * a) / 2.0)
    }

    /// `∫₀^x v ĝ(v) dv`, exact for the interpolant.
    fn first_moment_to(&self, x: f64) -> f64 {
        let x = x.min(self.reach());
        let (r0, p0) = (self.radii[0], self.values[0]);
        if x <= r0 {
            return self.norm * p0 * x * x / 2.0;
        }
        let i = self.radii.partition_point(|&r| r < x).clamp(1, self.radii.len() - 1);
        self.norm * (self.cumulative[i - 1] + self.segment_moment(i, x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum KernelShape {
    Gaussian,
    Exponential,
    CustomRadial(RadialProfile),
}

/// A correlation kernel shape together with its length scale `r_C`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationKernel {
    shape: KernelShape,
    r_c: Qty,
}

/// A numerically evaluated convolution value with its error estimate (same units).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: Qty,
    pub abs_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionResult {
    pub g0: Qty,
    /// `-∇²G(0)`, cm^-5.
    pub curvature: Qty,
    /// `(s, G(s r_C) r_C³)` pairs.
    pub samples: Vec<(f64, f64)>,
}

impl CorrelationKernel {
    pub fn new(shape: KernelShape, r_c: Qty) -> Result<Self> {
        r_c.expect_dim(Dim::LENGTH, "correlation length")?;
        if !(r_c.value() > 0.0) {
            return Err(Error::invalid("r_C", format!("must be positive, got {}", r_c.value())));
        }
        Ok(Self { shape, r_c })
    }

    pub fn gaussian(r_c: Qty) -> Result<Self> {
        Self::new(KernelShape::Gaussian, r_c)
    }

    pub fn exponential(r_c: Qty) -> Result<Self> {
        Self::new(KernelShape::Exponential, r_c)
    }

    pub fn shape(&self) -> &KernelShape {
        &self.shape
    }

    pub fn r_c(&self) -> Qty {
        self.r_c
    }

    pub fn with_r_c(&self, r_c: Qty) -> Result<Self> {
        Self::new(self.shape.clone(), r_c)
    }

    fn rc3(&self) -> f64 {
        self.r_c.value().powi(3)
    }

    fn density(&self, hat: f64) -> Qty {
        Qty::new(hat / self.rc3(), Dim::NUMBER_DENSITY).expect("finite kernel value")
    }

    fn scaled(&self, x: Qty, what: &str) -> Result<f64> {
        x.expect_dim(Dim::LENGTH, what)?;
        Ok(x.value().abs() / self.r_c.value())
    }

    /// Dimensionless profile `ĝ(s)`, normalized so `4π∫s²ĝ ds = 1`.
    pub fn g_hat(&self, s: f64) -> f64 {
        match &self.shape {
            KernelShape::Gaussian => (2.0 * PI).powf(-1.5) * (-0.5 * s * s).exp(),
            KernelShape::Exponential => (-s).exp() / (8.0 * PI),
            KernelShape::CustomRadial(p) => p.value(s),
        }
    }

    pub fn eval_g(&self, x: Qty) -> Result<Qty> {
        let s = self.scaled(x, "kernel argument")?;
        Ok(self.density(self.g_hat(s)))
    }

    fn reach(&self) -> f64 {
        match &self.shape {
            KernelShape::Gaussian => TRUNCATION_RADIUS,
            KernelShape::Exponential => 45.0,
            KernelShape::CustomRadial(p) => p.reach(),
        }
    }

    fn breakpoints(&self, lo: f64, hi: f64, extra: &[f64]) -> Vec<f64> {
        let mut pts = vec![lo, hi];
        pts.extend(extra.iter().copied().filter(|&x| x > lo && x < hi));
        if let KernelShape::CustomRadial(p) = &self.shape {
            pts.extend(p.nodes_in(lo, hi));
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `∫ d³x g` by radial quadrature.
    pub fn normalization(&self, spec: &QuadratureSpec) -> Result<f64> {
        let reach = self.reach();
        let pts = self.breakpoints(0.0, reach, &[]);
        let r = integrate_points(|s| 4.0 * PI * s * s * self.g_hat(s), &pts, spec)?;
        Ok(r.value)
    }

    fn conv_hat_closed(&self, s: f64) -> Option<f64> {
        match self.shape {
            KernelShape::Gaussian => Some((4.0 * PI).powf(-1.5) * (-0.25 * s * s).exp()),
            KernelShape::Exponential => Some((1.0 + s + s * s / 3.0) * (-s).exp() / (64.0 * PI)),
            KernelShape::CustomRadial(_) => None,
        }
    }

    fn conv_hat_zero(&self, spec: &QuadratureSpec) -> Result<(f64, f64)> {
        let reach = self.reach();
        let pts = self.breakpoints(0.0, reach, &[]);
        let tight = spec.with_abs_tol(f64::MIN_POSITIVE);
        let r = integrate_points(
            |u| {
                let g = self.g_hat(u);
                4.0 * PI * u * u * g * g
            },
            &pts,
            &tight,
        )?;
        Ok((r.value, r.abs_error))
    }

    // Ĝ(σ) = (2π/σ) ∫ u ĝ(u) H(u) du,  H(u) = ∫_{|u-σ|}^{u+σ} v ĝ(v) dv.
    fn conv_hat_numeric(&self, sigma: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
        let (g0, g0_err) = self.conv_hat_zero(spec)?;
        if sigma == 0.0 {
            return Ok((g0, g0_err));
        }
        let reach = self.reach();
        let abs_target = spec.abs_tol * g0;
        let first_moment = {
            let pts = self.breakpoints(0.0, reach, &[]);
            adaptive_points(|u| u * self.g_hat(u), &pts, &QuadratureSpec::default()).value
        };
        let prefactor = 2.0 * PI / sigma;
        let inner_spec = spec.with_abs_tol(0.5 * abs_target / (prefactor * first_moment));
        let outer_spec = spec.with_abs_tol(0.5 * abs_target / prefactor);

        let mut worst_inner = 0.0f64;
        let mut inner_failed = false;
        let lo = (sigma - reach).max(0.0);
        let mut kinks = vec![sigma];
        if let KernelShape::CustomRadial(p) = &self.shape {
            for r in p.nodes_in(0.0, reach) {
                kinks.extend([r - sigma, r + sigma, sigma - r]);
            }
        }
        let outer_pts = self.breakpoints(lo, sigma + reach, &kinks);
        let outer = adaptive_points(
            |u| {
                let g = self.g_hat(u);
                if g == 0.0 {
                    return 0.0;
                }
                let a = (u - sigma).abs();
                let b = u + sigma;
                if let KernelShape::CustomRadial(p) = &self.shape {
                    return u * g * (p.first_moment_to(b) - p.first_moment_to(a));
                }
                let h = adaptive_points(|v| v * self.g_hat(v), &[a, b], &inner_spec);
                worst_inner = worst_inner.max(h.abs_error);
                inner_failed |= !h.converged;
                u * g * h.value
            },
            &outer_pts,
            &outer_spec,
        );
        let value = prefactor * outer.value;
        let err = prefactor * (outer.abs_error + first_moment * worst_inner);
        if inner_failed || !outer.converged || !value.is_finite() {
            return Err(Error::Quadrature {
                achieved: err,
                requested: spec.tolerance_for(value).max(abs_target),
            });
        }
        Ok((value, err))
    }

    /// `G(y)`: closed form for the analytic kernels, radial quadrature otherwise.
    pub fn self_convolve(&self, y: Qty) -> Result<Qty> {
        let s = self.scaled(y, "convolution offset")?;
        match self.conv_hat_closed(s) {
            Some(v) => Ok(self.density(v)),
            None => Ok(self.self_convolve_numeric(y, &kernel_spec())?.value),
        }
    }

    /// `G(y)` by radial quadrature regardless of shape. `spec.abs_tol` is read
    /// as a fraction of `G(0)`.
    pub fn self_convolve_numeric(&self, y: Qty, spec: &QuadratureSpec) -> Result<Estimate> {
        let s = self.scaled(y, "convolution offset")?;
        let (v, err) = self.conv_hat_numeric(s, spec)?;
        Ok(Estimate {
            value: self.density(v),
            abs_error: err / self.rc3(),
        })
    }

    /// `-∇²G(0)`: analytic for the built-in kernels, finite differences otherwise.
    pub fn curvature_at_origin(&self) -> Result<Qty> {
        let r2 = self.r_c.value().powi(2);
        let hat = match self.shape {
            KernelShape::Gaussian => 1.5 * (4.0 * PI).powf(-1.5),
            KernelShape::Exponential => 1.0 / (64.0 * PI),
            KernelShape::CustomRadial(_) => return Ok(self.curvature_numeric(&fd_spec())?.value),
        };
        Qty::new(hat / (self.rc3() * r2), CURVATURE_DIM)
    }

    /// `-∇²G(0)` from Richardson-extrapolated second differences of the
    /// numerical convolution. Steps are 0.04, 0.02 and 0.01 `r_C`.
    pub fn curvature_numeric(&self, spec: &QuadratureSpec) -> Result<Estimate> {
        let (g0, _) = self.conv_hat_zero(spec)?;
        let steps = [0.04, 0.02, 0.01];
        let mut d = [0.0; 3];
        for (k, &h) in steps.iter().enumerate() {
            let (gh, _) = self.conv_hat_numeric(h, spec)?;
            d[k] = 2.0 * (gh - g0) / (h * h);
        }
        let r1 = [(4.0 * d[1] - d[0]) / 3.0, (4.0 * d[2] - d[1]) / 3.0];
        let r2 = (16.0 * r1[1] - r1[0]) / 15.0;
        let err = (r2 - r1[1]).abs();
        // G(s) = G0 + G2 s² + ..., D → 2 G2 = G''(0), and -∇²G(0) = -3 G''(0).
        let curvature_hat = -3.0 * r2;
        if !(curvature_hat > 0.0) || err > 1e-5 * curvature_hat.abs() {
            return Err(Error::Differentiation(format!(
                "second difference {curvature_hat:e} with error estimate {err:e}"
            )));
        }
        let scale = self.rc3() * self.r_c.value().powi(2);
        Ok(Estimate {
            value: Qty::new(curvature_hat / scale, CURVATURE_DIM)?,
            abs_error: 3.0 * err / scale,
        })
    }

    pub fn convolution_profile(&self, s_values: &[f64]) -> Result<ConvolutionResult> {
        let mut samples = Vec::with_capacity(s_values.len());
        for &s in s_values {
            if !s.is_finite() {
                return Err(Error::NonFinite(format!("sample offset {s}")));
            }
            let g = self.self_convolve(self.r_c * s)?;
            samples.push((s.abs(), g.value() * self.rc3()));
        }
        Ok(ConvolutionResult {
            g0: self.self_convolve(self.r_c * 0.0)?,
            curvature: self.curvature_at_origin()?,
            samples,
        })
    }
}

/// Default accuracy for kernel convolutions (absolute part relative to `G(0)`).
pub fn kernel_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-9,
        rel_tol: 1e-10,
        max_depth: 40,
    }
}

pub(crate) fn fd_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        max_depth: 50,
    }
}
