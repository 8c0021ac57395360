//! Golden-file pin of the inversion payload: the exact JSON for the
//! perturbative coefficients through order 3 must never drift.

use qcperiod::cli::{run, CommandName, Format, RunConfig};

#[test]
fn inversion_payload_matches_the_committed_golden_file() {
    let mut config = RunConfig::new(CommandName::Invert);
    config.n_max = 3;
    config.format = Format::Json;
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(&config, &mut out, &mut err);
    assert_eq!(code, 0, "invert failed: {}", String::from_utf8_lossy(&err));
    let got = String::from_utf8(out).expect("payload is UTF-8");
    let golden = include_str!("data/invert_nmax3.golden.json");
    assert_eq!(got, golden, "serialized inversion payload drifted");
}

#[test]
fn gw_payload_matches_the_committed_example() {
    let mut config = RunConfig::new(CommandName::Gw);
    config.d_max = 6;
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(&config, &mut out, &mut err);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_slice(&out).expect("valid JSON");
    let list: Vec<&str> = v["data"]["N"]
        .as_array()
        .expect("N is an array")
        .iter()
        .map(|x| x.as_str().expect("counts are decimal strings"))
        .collect();
    assert_eq!(list, ["1", "1", "12", "620", "87304", "26312976"]);
}
