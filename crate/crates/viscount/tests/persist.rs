use serde_json::Value;
use viscount::bench::query_points;
use viscount::persist::{index_from_json, index_to_json, PersistError};
use viscount::pipeline::build;
use viscount::RunConfig;
use viscount_core::scene::{generate_random, GenParams};

fn saved(n: usize, seed: u64) -> (String, RunConfig) {
    let scene = generate_random(&GenParams::new(n), seed).unwrap();
    let cfg = RunConfig { seed, ..RunConfig::default() };
    let (_, built) = build(&scene, &cfg).unwrap();
    (index_to_json(&built.index, &cfg), cfg)
}

fn tamper(text: &str, f: impl FnOnce(&mut Value)) -> Result<(), PersistError> {
    let mut v: Value = serde_json::from_str(text).unwrap();
    f(&mut v);
    index_from_json(&v.to_string()).map(|_| ())
}

#[test]
fn round_trip_preserves_answers_and_bytes() {
    let (text, cfg) = saved(8, 4);
    let (index, loaded_cfg) = index_from_json(&text).unwrap();
    assert_eq!(loaded_cfg, cfg);
    assert_eq!(index_to_json(&index, &loaded_cfg), text);
    let scene = generate_random(&GenParams::new(8), 4).unwrap();
    let (_, fresh) = build(&scene, &cfg).unwrap();
    for p in query_points(&scene, 100, 9, 0) {
        assert_eq!(index.query(&p).unwrap(), fresh.index.query(&p).unwrap());
    }
}

#[test]
fn rejects_tampered_files() {
    let (text, _) = saved(5, 2);
    tamper(&text, |_| {}).unwrap();
    assert!(matches!(tamper(&text, |v| v["version"] = 2.into()), Err(PersistError::Version { version: 2, .. })));
    assert!(matches!(tamper(&text, |v| v["config"]["alpha"] = "3/2".into()), Err(PersistError::Config(_))));
    assert!(matches!(tamper(&text, |v| v["cutting"]["alpha"] = "1/3".into()), Err(PersistError::Invalid(_))));
    assert!(matches!(tamper(&text, |v| v["cutting"]["r"] = 1.into()), Err(PersistError::Invalid(_))));
    assert!(matches!(tamper(&text, |v| v["cells"][0]["count"] = 99.into()), Err(PersistError::Invalid(_))));
    assert!(matches!(tamper(&text, |v| v["cells"][0]["rep"] = v["cells"][1]["rep"].clone()), Err(PersistError::Invalid(_))));
    assert!(matches!(tamper(&text, |v| v["edges"][0]["colors"] = serde_json::json!([7])), Err(PersistError::Invalid(_))));
    assert!(matches!(tamper(&text, |v| v["scene"]["segments"][0][0] = "x".into()), Err(PersistError::Number(_))));
    assert!(matches!(tamper(&text, |v| v["extra"] = 1.into()), Err(PersistError::Json(_))));
    let crossing = |v: &mut Value| {
        v["scene"]["segments"][0] = serde_json::json!(["0/1", "0/1", "1000/1", "1000/1"]);
    };
    assert!(matches!(tamper(&text, crossing), Err(PersistError::Scene(_))));
}
