use std::path::Path;

use rlwe_core::oracle::{draw_rlwe, draw_uniform, secret_hash, ErrorSpec, RlweInstance, SampleSet};
use rlwe_core::sampler::{BinomialSpec, GaussianSpec};
use rlwe_core::{CycloRing, Error, FamilyRing, Ring};

fn family_instance(seed: u64) -> RlweInstance {
    let ring = Ring::Family(FamilyRing::new(5, 2, 11).unwrap());
    RlweInstance::new(ring, ErrorSpec::Gaussian(GaussianSpec::new(2.5).unwrap()), seed).unwrap()
}

#[test]
fn save_load_save_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (i, set) in [
        draw_rlwe(&family_instance(1), 40).unwrap(),
        draw_uniform(&family_instance(1), 40).unwrap(),
        draw_rlwe(
            &RlweInstance::new(Ring::Cyclo(CycloRing::new(16, 97).unwrap()), ErrorSpec::Binomial(BinomialSpec::new(4).unwrap()), 2).unwrap(),
            25,
        )
        .unwrap(),
    ]
    .into_iter()
    .enumerate()
    {
        let p1 = dir.path().join(format!("{i}a.jsonl"));
        let p2 = dir.path().join(format!("{i}b.jsonl"));
        set.save(&p1).unwrap();
        SampleSet::load(&p1).unwrap().save(&p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }
}

#[test]
fn header_fields() {
    let inst = family_instance(9);
    let set = draw_rlwe(&inst, 3).unwrap();
    let text = String::from_utf8(set.to_bytes()).unwrap();
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["schema_version"], 1);
    assert_eq!(header["ring_kind"], "family");
    assert_eq!(header["p"], 5);
    assert_eq!(header["d"], 2);
    assert!(header.get("m").is_none());
    assert_eq!(header["q"], 11);
    assert_eq!(header["error_kind"], "gaussian");
    assert_eq!(header["width_or_k"], 2.5);
    assert_eq!(header["seed"], 9);
    assert_eq!(header["count"], 3);
    assert_eq!(header["secret_hash"], secret_hash(inst.secret()));
    assert_eq!(header["secret_hash"].as_str().unwrap().len(), 64);
    for line in text.lines().skip(1) {
        let rec: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(rec.as_object().unwrap().keys().collect::<Vec<_>>(), ["a", "b"]);
        assert_eq!(rec["a"].as_array().unwrap().len(), 8);
    }
}

#[test]
fn missing_file_is_io_error() {
    assert!(matches!(SampleSet::load(Path::new("/nonexistent/x.jsonl")), Err(Error::Io { .. })));
}

#[test]
fn bad_header_is_line_one() {
    let text = r#"{"schema_version":1,"ring_kind":"family","p":3,"d":4,"q":13,"error_kind":"zero","width_or_k":0.0,"seed":0,"count":0,"secret_hash":""}"#;
    match SampleSet::read_from(text.as_bytes(), Path::new("h.jsonl")) {
        Err(Error::Parse { line, message, .. }) => {
            assert_eq!(line, 1);
            assert!(message.contains("squarefree"), "{message}");
        }
        other => panic!("{other:?}"),
    }
    let text = r#"{"schema_version":2,"ring_kind":"cyclo","m":8,"q":17,"error_kind":"zero","width_or_k":0.0,"seed":0,"count":0,"secret_hash":""}"#;
    assert!(matches!(SampleSet::read_from(text.as_bytes(), Path::new("h")), Err(Error::Parse { line: 1, .. })));
}

#[test]
fn regenerated_secret_matches_commitment() {
    let set = draw_rlwe(&family_instance(12), 5).unwrap();
    let again = RlweInstance::new(set.ring().unwrap(), set.header.error_spec().unwrap(), set.header.seed).unwrap();
    assert_eq!(again.secret_hash(), set.header.secret_hash);
    assert_eq!(draw_rlwe(&again, 5).unwrap(), set);
}
