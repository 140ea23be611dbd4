//! The files under `rules/` are commitments: loading them must reproduce the
//! built-in rule sets structurally, and printing must reproduce the files'
//! rule blocks byte for byte.

use std::path::PathBuf;

use zxcheck::rules::{clifford_t_rules, extended_rules, load_rules, print_rules};

fn read(rel: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("cannot read {path:?}: {e}"))
}

#[test]
fn clifford_t_file_matches_the_built_in_set() {
    let loaded = load_rules(&read("rules/clifford_t.rules")).expect("file loads");
    assert_eq!(loaded, clifford_t_rules());
}

#[test]
fn zxc_file_matches_the_built_in_set() {
    let loaded = load_rules(&read("rules/zxc.rules")).expect("file loads");
    assert_eq!(loaded, extended_rules());
    let names: Vec<&str> = loaded.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(
        names,
        ["S1", "S2", "S3", "E", "B1", "B2", "EU", "H", "K2", "SUP", "C", "BW", "A"]
    );
}

#[test]
fn files_are_canonical_prints() {
    for rel in ["rules/clifford_t.rules", "rules/zxc.rules"] {
        let text = read(rel);
        let loaded = load_rules(&text).expect("file loads");
        let printed = print_rules(&loaded);
        // the files carry a leading comment; everything after it is the print
        assert!(
            text.ends_with(&printed),
            "{rel} body diverged from the canonical print"
        );
        let reloaded = load_rules(&printed).expect("canonical print reloads");
        assert_eq!(reloaded, loaded);
    }
}
