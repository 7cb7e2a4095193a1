use bt_control::chua::*;
use bt_control::sim::{find_limit_cycle, IntegratorConfig};

#[test]
fn every_region_matches_its_inventory() {
    for sc in region_scenarios() {
        let (_, c) = run_scenario(&sc).unwrap();
        assert!(c.matched, "{}: {:?}", c.name, c.mismatches);
    }
}

#[test]
fn region_b_frequency_near_hopf() {
    let p = ChuaParams::bt(0.8, 1.0, [0.0, -0.01, -0.0075, 0.3]);
    let m = ChuaModel::new(p).unwrap();
    let c = find_limit_cycle(&m, [0.05, 0.0, -0.05], Some([0.0; 3]), &IntegratorConfig::with_horizon(2e4)).unwrap();
    let w = chua_primary_cycle_estimate(&p).unwrap().angular_frequency;
    let ratio = c.angular_frequency / w;
    assert!((0.8..=1.2).contains(&ratio), "{ratio}");
}

#[test]
fn scenario_file_round_trip() {
    let text = r#"{"gains":[0,0.02,0,0.3],"alpha":0.8,"a":1,"initial_conditions":[[-0.02,-0.001,0.1]],"t_max":3000}"#;
    let f: ScenarioFile = serde_json::from_str(text).unwrap();
    let p = f.into_params().unwrap();
    assert_eq!(p.gains(), [0.0, 0.02, 0.0, 0.3]);
    assert!(serde_json::from_str::<ScenarioFile>(r#"{"gains":[0,0,0,0],"alpha":0.8,"a":1,"initial_conditions":[],"t_max":1,"bogus":1}"#).is_err());
}
