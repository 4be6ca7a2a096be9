//! Acceptance gate: one test per criterion. Every check prints a PASS/FAIL
//! line so `cargo test -- --nocapture` doubles as a readable report.

use cslbounds::channel::BoundKind;
use cslbounds::config::{Models, RunConfig};
use cslbounds::correlation::CorrelationKernel;
use cslbounds::cslcore::{
    acceleration_intensity, heating_rate, reduction_rate, CslParams, EllMode, MassConfig, ACCEL_INTENSITY_DIM, ETA_DIM,
    GAMMA_DIM, LAMBDA_STANDARD, R_C_STANDARD,
};
use cslbounds::lower_channels::{photographic_side_estimates, vision_estimates};
use cslbounds::oracle::{decoherence_rate_from_kernel, heating_from_kernel, odd_taylor_coefficients, oracle_spec};
use cslbounds::phonon::{
    electron_slowdown_reduction, log10_suppression_from_ratio, mean_coherence_factor, slowdown_factor,
    thermal_fluctuation_bound, CarrierModel, LatticeModel, SlowdownMethod,
};
use cslbounds::projections::{collett_pearle_case, mirror_projection, ParameterCase};
use cslbounds::registry::{evaluate, SCAN_CHANNELS};
use cslbounds::report::Tolerance::{self, Absolute, Factor, Relative};
use cslbounds::scan::{scan, Verdict, COMBINED};
use cslbounds::units::{constants, units, Dim};
use cslbounds::upper_channels::{
    dust_grain_bound, excitation_bound, excitation_rate, igm_bound, lookback_derivative, radiation_bounds,
    supercurrent_bound, Cosmology, ExcitationTarget,
};

struct Gate {
    criterion: u32,
    failures: Vec<String>,
}

impl Gate {
    fn new(criterion: u32) -> Self {
        Self {
            criterion,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, what: &str, computed: f64, target: f64, tol: Tolerance) {
        let dev = tol.deviation(computed, target);
        let limit = tol.limit(1.0);
        let pass = dev <= limit;
        println!(
            "criterion {:>2} {}  {what}: computed {computed:.4e}, target {target:.4e}, deviation {dev:.3e} (limit {limit:.3e}, {tol})",
            self.criterion,
            if pass { "PASS" } else { "FAIL" },
        );
        if !pass {
            self.failures.push(what.to_string());
        }
    }

    fn require(&mut self, what: &str, ok: bool, detail: impl std::fmt::Display) {
        println!(
            "criterion {:>2} {}  {what}: {detail}",
            self.criterion,
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failures.push(what.to_string());
        }
    }

    fn finish(self) {
        assert!(
            self.failures.is_empty(),
            "criterion {} failed: {:?}",
            self.criterion,
            self.failures
        );
    }
}

fn std() -> CslParams {
    CslParams::standard()
}

fn obs(r: &cslbounds::channel::ChannelResult, name: &str) -> f64 {
    r.observable(name)
        .unwrap_or_else(|| panic!("{} has no observable {name}", r.channel_id))
}

#[test]
fn criterion_01_saturated_reduction_rate() {
    let mut g = Gate::new(1);
    let rate = reduction_rate(&std(), &MassConfig::saturated(5640.0, 20.0).unwrap()).unwrap();
    g.require("rate has dimension 1/time", rate.has_dim(Dim::RATE), rate.dim());
    let exact = LAMBDA_STANDARD * 5640f64.powi(2) * 20.0;
    g.check("lambda n^2 N, exact product", rate.value(), exact, Relative(1e-12));
    g.check("lambda n^2 N vs 1.3e-8", rate.value(), 1.3e-8, Relative(0.10));
    g.finish();
}

#[test]
fn criterion_02_proton_heating() {
    let mut g = Gate::new(2);
    let h = heating_rate(&std(), constants().m_n).unwrap();
    g.check(
        "per-proton heating, erg/s",
        h.to(&units::ERG_PER_S).unwrap(),
        1.1e-37,
        Relative(0.05),
    );
    g.check(
        "per-proton heating, eV/s",
        h.to(&units::EV_PER_S).unwrap(),
        6.8e-26,
        Relative(0.05),
    );
    g.finish();
}

#[test]
fn criterion_03_igm_high_redshift() {
    let mut g = Gate::new(3);
    let m = Models::default();
    let igm = igm_bound(&std(), &m.cosmology, &m.igm_high_z).unwrap();
    g.check(
        "cooling rate at z = 3, eV/s",
        obs(&igm, "cooling_rate"),
        0.5e-16,
        Relative(0.10),
    );
    g.check("multiplier at z = 3", igm.multiplier_vs_standard, 8e8, Relative(0.25));
    let dtdz = lookback_derivative(&Cosmology::default(), 3.0).unwrap();
    g.check(
        "|dt/dz| at z = 3, yr",
        dtdz.abs().to(&units::YEAR).unwrap(),
        0.8e9,
        Relative(0.05),
    );
    g.finish();
}

#[test]
fn criterion_04_germanium() {
    let mut g = Gate::new(4);
    let ge = excitation_bound(&std(), &ExcitationTarget::germanium_nuclear()).unwrap();
    g.check(
        "germanium lambda bound, s^-1",
        ge.lambda_bound.value(),
        6e-3,
        Relative(0.20),
    );
    g.finish();
}

#[test]
fn criterion_05_radiation() {
    let mut g = Gate::new(5);
    let (free, neutral) = radiation_bounds(&std(), &Models::default().radiation).unwrap();
    g.check(
        "free-electron bound, s^-1",
        free.lambda_bound.value(),
        1.7e-11,
        Factor(2.0),
    );
    g.check(
        "neutralized multiplier",
        neutral.multiplier_vs_standard,
        1e12,
        Factor(10.0),
    );
    g.finish();
}

#[test]
fn criterion_06_dust() {
    let mut g = Gate::new(6);
    let d = Models::default().dust;
    g.require(
        "inputs T_g = 20 K, kappa' = 0.05",
        d.grain_temperature_k == 20.0 && d.kappa_prime == 0.05,
        format!("{} K, {}", d.grain_temperature_k, d.kappa_prime),
    );
    let r = dust_grain_bound(&std(), &d).unwrap();
    g.check(
        "emissivity W, eV s^-1 cm^-3",
        obs(&r, "emissivity"),
        2e14,
        Relative(0.25),
    );
    g.check(
        "volumetric heating, eV s^-1 cm^-3",
        obs(&r, "volumetric_heating"),
        7e-2,
        Relative(0.10),
    );
    g.finish();
}

#[test]
fn criterion_07_supercurrent() {
    let mut g = Gate::new(7);
    let m = Models::default().supercurrent;
    let s = supercurrent_bound(&std(), &m).unwrap();
    g.check(
        "decay rate at standard parameters",
        obs(&s, "decay_rate"),
        4.4e-27,
        Relative(0.15),
    );
    let s1 = supercurrent_bound(&CslParams::case_i(), &m).unwrap();
    g.check("decay rate at case I", obs(&s1, "decay_rate"), 1e-19, Factor(2.0));
    g.finish();
}

#[test]
fn criterion_08_excitation_family() {
    let mut g = Gate::new(8);
    let h = excitation_rate(&std(), &ExcitationTarget::hydrogen()).unwrap();
    g.check("hydrogen excitation rate", h.value(), 0.7e-35, Relative(0.30));
    let scale = Models::default().proton_scale_gev;
    let bare = |t: ExcitationTarget| {
        excitation_rate(
            &std(),
            &ExcitationTarget {
                selection_suppression: 1.0,
                ..t
            },
        )
        .unwrap()
        .value()
    };
    g.check(
        "proton, constituent mass",
        bare(ExcitationTarget::proton_constituent(scale)),
        1e-50,
        Factor(10.0),
    );
    g.check(
        "proton, current mass",
        bare(ExcitationTarget::proton_current(scale)),
        1e-53,
        Factor(10.0),
    );
    g.finish();
}

#[test]
fn criterion_09_phonon_channels() {
    let mut g = Gate::new(9);
    let p = std();
    let l = LatticeModel::default();
    let c = CarrierModel::electron();
    let n = 1e9;
    let numeric = SlowdownMethod::Numeric { sigma: 1.0 };

    let analytic = slowdown_factor(&p, &l, &c, n, false, SlowdownMethod::Analytic).unwrap();
    let integral = slowdown_factor(&p, &l, &c, n, false, numeric).unwrap();
    g.check("f_tot analytic vs double integral", analytic, integral, Relative(0.01));
    g.check("f_tot vs 328", analytic, 328.0, Relative(0.03));

    let exact_g = slowdown_factor(&p, &l, &c, n, true, SlowdownMethod::ExactCoherence).unwrap();
    let integral_g = slowdown_factor(&p, &l, &c, n, true, numeric).unwrap();
    g.check(
        "f_tot with coherence, closed form vs double integral",
        exact_g,
        integral_g,
        Relative(0.01),
    );

    let mean_g = integral_g / integral;
    let formula = mean_coherence_factor(&p, &l, &c).unwrap();
    g.check("<G> numeric vs (pi/(r_C k_th))^2", mean_g, formula, Relative(0.20));
    g.check("<G> vs 1e-3", formula, 1e-3, Relative(0.20));

    let gamma_r = electron_slowdown_reduction(&p, &l, &c, n, true).unwrap();
    g.check("electron reduction rate, s^-1", gamma_r.value(), 1e-17, Factor(2.0));

    let ion = CarrierModel::ion(80.0);
    let ratio = (ion.k_min(&l) / ion.k_th(&l).unwrap()).as_scalar().unwrap();
    g.check(
        "log10 ion emission suppression",
        log10_suppression_from_ratio(ratio),
        -65.0,
        Absolute(3.0),
    );

    let per_group = thermal_fluctuation_bound(&p, &l, n, 1.0).unwrap().value();
    g.check("thermal bound per group, s^-1", per_group, 2e-9, Relative(0.30));
    let twenty = thermal_fluctuation_bound(&p, &l, n, 20.0).unwrap().value();
    g.check("thermal bound at N = 20, s^-1", twenty, 4e-8, Relative(0.30));
    g.finish();
}

#[test]
fn criterion_10_collett_pearle() {
    let mut g = Gate::new(10);
    let t = units::S.of(1.0);
    let r1 = collett_pearle_case(&ParameterCase::case_i(), t).unwrap();
    let r2 = collett_pearle_case(&ParameterCase::case_ii(), t).unwrap();
    g.check("case I ratio per second", r1, 6.6e2, Relative(0.05));
    g.check("case II ratio per second", r2, 1.8e4, Relative(0.05));
    let r1_10 = collett_pearle_case(&ParameterCase::case_i(), units::S.of(10.0)).unwrap();
    g.check("linear in t", r1_10 / r1, 10.0, Relative(1e-12));
    g.finish();
}

#[test]
fn criterion_11_mirror() {
    let mut g = Gate::new(11);
    let side = units::CM.of(1e-3);
    let density = units::G_PER_CM3.of(10.0);
    for (label, p, quoted) in [
        ("case I", CslParams::case_i(), 2e7),
        ("case II", CslParams::case_ii(), 1.5e11),
    ] {
        let m = mirror_projection(&p, side, density).unwrap();
        let from_ratios = (p.lambda().value() / LAMBDA_STANDARD) * (p.r_c().value() / R_C_STANDARD).powi(2);
        g.check(
            &format!("{label} eta multiplier vs (lambda, r_C) ratios"),
            m.eta_multiplier,
            from_ratios,
            Relative(1e-12),
        );
        g.check(
            &format!("{label} eta multiplier vs quoted"),
            m.eta_multiplier,
            quoted,
            Relative(0.10),
        );
    }
    g.finish();
}

#[test]
fn criterion_12_correlation_oracle() {
    let mut g = Gate::new(12);
    let p = std();
    let spec = oracle_spec();
    let gauss = CorrelationKernel::gaussian(p.r_c()).unwrap();
    let expo = CorrelationKernel::exponential(p.r_c()).unwrap();

    for s in [0.1, 1.0, 3.0] {
        let ell = p.r_c() * s;
        let route = decoherence_rate_from_kernel(&p, &gauss, ell, &spec).unwrap();
        let closed = reduction_rate(&p, &MassConfig::new(1.0, 1.0, 1.0, ell, EllMode::Exact6a).unwrap()).unwrap();
        g.check(
            &format!("gaussian kernel decoherence, ell = {s} r_C"),
            route.value(),
            closed.value(),
            Relative(1e-5),
        );
    }
    for s in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let y = p.r_c() * s;
        let num = expo.self_convolve_numeric(y, &spec).unwrap().value.value();
        let closed = expo.self_convolve(y).unwrap().value();
        g.check(
            &format!("exponential G quadrature vs closed form, s = {s}"),
            num,
            closed,
            Relative(1e-6),
        );
    }
    for (label, k) in [("gaussian", &gauss), ("exponential", &expo)] {
        let (c1, c3) = odd_taylor_coefficients(k, &spec).unwrap();
        g.check(&format!("{label} fitted s^1 coefficient"), c1, 0.0, Absolute(1e-4));
        g.check(&format!("{label} fitted s^3 coefficient"), c3, 0.0, Absolute(1e-4));
    }
    let m_n = constants().m_n;
    let heat = heating_from_kernel(&p, &gauss, m_n).unwrap();
    g.check(
        "gaussian kernel heating vs closed form",
        heat.power.value(),
        heating_rate(&p, m_n).unwrap().value(),
        Relative(1e-5),
    );
    g.finish();
}

#[test]
fn criterion_13_side_estimates() {
    let mut g = Gate::new(13);
    let e = Models::default().emulsion;
    let side = photographic_side_estimates(
        &std(),
        units::EV.of(3.0),
        units::S.of(1.0 / e.speck_formation_rate_s_inv),
        1.0,
    )
    .unwrap();
    g.check(
        "photographic recoil, N * rate",
        side[0].rate.value(),
        0.5e-6,
        Relative(0.30),
    );
    g.check("ion back-motion, N * rate", side[1].rate.value(), 1e-13, Relative(0.30));

    let vision = vision_estimates(&CslParams::case_i()).unwrap();
    g.check(
        "rhodopsin at case I",
        obs(&vision[0], "reduction_rate"),
        3e-4,
        Relative(0.30),
    );
    g.check(
        "rod chain at case I",
        obs(&vision[1], "reduction_rate"),
        2e5,
        Relative(0.30),
    );
    g.finish();
}

fn sample_params() -> Vec<CslParams> {
    let mut out = Vec::new();
    for lambda in [1e-18, 2.2e-17, 4e-10, 3e-8, 1e-3] {
        for r_c in [1e-6, 1e-5, 1e-4, 1e-3] {
            out.push(CslParams::from_values(lambda, r_c).unwrap());
        }
    }
    out
}

#[test]
fn criterion_14_properties() {
    let mut g = Gate::new(14);
    let models = Models::default();

    // dimension closure
    let mut bad = Vec::new();
    for p in sample_params() {
        let dims_ok = p.gamma().has_dim(GAMMA_DIM)
            && p.eta().has_dim(ETA_DIM)
            && acceleration_intensity(&p).has_dim(ACCEL_INTENSITY_DIM)
            && heating_rate(&p, constants().m_n).unwrap().has_dim(Dim::POWER);
        if !dims_ok {
            bad.push(format!("core at {:?}", p));
        }
        for id in SCAN_CHANNELS {
            match evaluate(id, &p, &models) {
                Ok(e) => {
                    for r in e.all() {
                        if !r.lambda_bound.has_dim(Dim::RATE) {
                            bad.push(format!("{id} bound dimension {}", r.lambda_bound.dim()));
                        }
                    }
                }
                Err(err) => bad.push(format!("{id}: {err}")),
            }
        }
    }
    let mismatch = units::CM.of(1.0).try_add(units::S.of(1.0)).is_err();
    g.require(
        "dimension closure over channels and core operations",
        bad.is_empty() && mismatch,
        if bad.is_empty() {
            "all dimensions consistent".to_string()
        } else {
            bad.join("; ")
        },
    );

    // λ-linearity and r_C scaling
    let base = std();
    let sat = MassConfig::saturated(100.0, 3.0).unwrap();
    let r1 = reduction_rate(&base, &sat).unwrap().value();
    let r7 = reduction_rate(&base.with_lambda(7.0 * LAMBDA_STANDARD).unwrap(), &sat)
        .unwrap()
        .value();
    g.check("reduction rate linear in lambda", r7 / r1, 7.0, Relative(1e-12));
    let h1 = heating_rate(&base, constants().m_n).unwrap().value();
    let h3 = heating_rate(&base.with_r_c(3.0 * R_C_STANDARD).unwrap(), constants().m_n)
        .unwrap()
        .value();
    g.check("heating scales as r_C^-2", h3 / h1, 1.0 / 9.0, Relative(1e-12));
    let ell = |p: &CslParams, s: f64, mode| {
        reduction_rate(p, &MassConfig::new(10.0, 1.0, 1.0, p.r_c() * s, mode).unwrap())
            .unwrap()
            .value()
    };
    let wide = base.with_r_c(4.0 * R_C_STANDARD).unwrap();
    g.check(
        "exact rate depends on ell/r_C only",
        ell(&wide, 0.7, EllMode::Exact6a),
        ell(&base, 0.7, EllMode::Exact6a),
        Relative(1e-12),
    );

    // Exact6a / SmallEll ordering and limits
    let mut ordered = true;
    for s in [1e-3, 0.1, 0.5, 0.9, 1.0] {
        ordered &= ell(&base, s, EllMode::Exact6a) <= ell(&base, s, EllMode::SmallEllExpansion) * (1.0 + 1e-12);
    }
    g.require(
        "exact rate never exceeds the small-ell expansion",
        ordered,
        "checked ell/r_C from 1e-3 to 1",
    );
    g.check(
        "small-ell limit",
        ell(&base, 1e-4, EllMode::Exact6a),
        ell(&base, 1e-4, EllMode::SmallEllExpansion),
        Relative(1e-8),
    );
    g.check(
        "large-ell limit saturates",
        ell(&base, 20.0, EllMode::Exact6a),
        ell(&base, 20.0, EllMode::Saturated),
        Relative(1e-12),
    );

    // scan determinism
    let cfg = RunConfig::default();
    let one = scan(&cfg.grid, &cfg.channels, &cfg.models, Some(1)).unwrap();
    let four = scan(&cfg.grid, &cfg.channels, &cfg.models, Some(4)).unwrap();
    let bytes = |grid: &cslbounds::scan::ExclusionGrid| {
        let (mut csv, mut json) = (Vec::new(), Vec::new());
        grid.write_csv(&mut csv).unwrap();
        grid.write_json(&mut json).unwrap();
        (csv, json)
    };
    let (a, b) = (bytes(&one), bytes(&four));
    g.require(
        "scan output identical for 1 and 4 workers",
        a == b,
        format!("csv {} bytes, json {} bytes", a.0.len(), a.1.len()),
    );

    // grid verdict monotonicity
    let probe = std();
    let mut violations = Vec::new();
    for id in &cfg.channels {
        let kind = evaluate(id, &probe, &cfg.models).unwrap().primary.kind;
        for j in 0..one.rc_axis.len() {
            let verdicts: Vec<Verdict> = (0..one.lambda_axis.len())
                .map(|i| one.cell(i, j).verdict(id).unwrap())
                .collect();
            let ok = match kind {
                BoundKind::UpperBound => verdicts
                    .windows(2)
                    .all(|w| w[0] != Verdict::Excluded || w[1] == Verdict::Excluded),
                BoundKind::LowerBound => verdicts
                    .windows(2)
                    .all(|w| w[1] != Verdict::LowerBoundUnmet || w[0] == Verdict::LowerBoundUnmet),
            };
            if !ok {
                violations.push(format!("{id} at r_C = {:.3e}", one.rc_axis[j]));
            }
        }
    }
    g.require(
        "excluded upward-closed, unmet downward-closed in lambda",
        violations.is_empty(),
        if violations.is_empty() {
            "no violations".to_string()
        } else {
            violations.join("; ")
        },
    );

    // the window between the latent-image and IGM bounds brackets case I
    let case_i = CslParams::case_i();
    let photo = evaluate("photographic", &case_i, &cfg.models).unwrap().primary;
    let igm = evaluate("igm", &case_i, &cfg.models).unwrap().primary;
    let lo = photo.lambda_bound.value() / 10f64.powf(photo.uncertainty_decades);
    let hi = igm.lambda_bound.value() * 10f64.powf(igm.uncertainty_decades);
    let target = case_i.lambda().value();
    g.require(
        "latent-image / IGM window brackets lambda ~ 4e-10 (factor 2)",
        lo <= 2.0 * target && hi >= 2.0 * target && lo < hi,
        format!("window [{lo:.3e}, {hi:.3e}] s^-1 at r_C = {:.0e}", case_i.r_c().value()),
    );
    let j = (0..one.rc_axis.len())
        .min_by(|&a, &b| {
            let d = |x: f64| (x / 1e-5).log10().abs();
            d(one.rc_axis[a]).total_cmp(&d(one.rc_axis[b]))
        })
        .unwrap();
    let allowed: Vec<f64> = (0..one.lambda_axis.len())
        .filter(|&i| one.cell(i, j).verdict(COMBINED) == Some(Verdict::Allowed))
        .map(|i| one.lambda_axis[i])
        .collect();
    let near = allowed.iter().any(|&l| (l / 4e-10).log10().abs() < 0.3);
    g.require(
        "default grid has an allowed window near 4e-10 at r_C ~ 1e-5",
        near,
        format!(
            "r_C = {:.3e}, allowed lambda {:?}",
            one.rc_axis[j],
            allowed.iter().map(|l| format!("{l:.2e}")).collect::<Vec<_>>()
        ),
    );
    g.finish();
}
