use std::fs;

use cslbounds::config::RunConfig;
use cslbounds::correlation::{CorrelationKernel, KernelShape, RadialProfile};
use cslbounds::cslcore::{reduction_rate, CslParams, EllMode, MassConfig};
use cslbounds::oracle::{decoherence_rate_from_kernel, oracle_spec};
use cslbounds::Error;

#[test]
fn config_overlay_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    fs::write(
        &path,
        r#"{"case": "case2", "channels": ["igm", "dust"], "models": {"dust": {"kappa_prime": 0.1}}}"#,
    )
    .unwrap();
    let cfg = RunConfig::from_file(&path).unwrap();
    assert_eq!(cfg.channels, ["igm", "dust"]);
    assert_eq!(cfg.models.dust.kappa_prime, 0.1);
    assert_eq!(cfg.models.dust.grain_temperature_k, 20.0);
    assert_eq!(cfg.params().unwrap(), CslParams::case_ii());

    fs::write(&path, r#"{"models": {"dust": {"colour": "red"}}}"#).unwrap();
    assert!(matches!(RunConfig::from_file(&path), Err(Error::Config(_))));
    fs::write(&path, r#"{"channels": ["dust", "astrology"]}"#).unwrap();
    assert!(matches!(RunConfig::from_file(&path), Err(Error::UnknownChannel(_))));
    assert!(matches!(
        RunConfig::from_file(dir.path().join("missing.json")),
        Err(Error::Config(_))
    ));
}

#[test]
fn tabulated_gaussian_profile_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.txt");
    let mut text = String::from("# s, exp(-s^2/2)\n");
    for i in 0..=1200 {
        let s = i as f64 * 0.01;
        text.push_str(&format!("{s}, {:e}\n", (-s * s / 2.0).exp()));
    }
    fs::write(&path, text).unwrap();
    let profile = RadialProfile::from_file(&path).unwrap();
    assert!(profile.truncated_fraction() < 1e-20);

    let p = CslParams::standard();
    let custom = CorrelationKernel::new(KernelShape::CustomRadial(profile), p.r_c()).unwrap();
    let ell = p.r_c() * 1.0;
    let route = decoherence_rate_from_kernel(&p, &custom, ell, &oracle_spec()).unwrap();
    let m = MassConfig::new(1.0, 1.0, 1.0, ell, EllMode::Exact6a).unwrap();
    let closed = reduction_rate(&p, &m).unwrap();
    assert!((route / closed).as_scalar().unwrap().ln().abs() < 1e-3);

    fs::write(&path, "0 1\n1 2 3\n").unwrap();
    assert!(matches!(RadialProfile::from_file(&path), Err(Error::Config(_))));
}
