//! Stable-toolchain counterpart of the fuzz targets: arbitrary and mutated
//! inputs must produce errors, never panics.

use std::fs;
use std::path::Path;

use proptest::prelude::*;

use boundcount::expr::parse;
use boundcount::potential::Potential;

fn seeds(dir: &str) -> Vec<String> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(dir);
    let mut out: Vec<String> = fs::read_dir(root)
        .unwrap()
        .map(|e| fs::read_to_string(e.unwrap().path()).unwrap())
        .collect();
    out.sort();
    out
}

fn mutate(src: &str, edits: &[(usize, char)]) -> String {
    let mut chars: Vec<char> = src.chars().collect();
    for &(at, c) in edits {
        if chars.is_empty() {
            chars.push(c);
            continue;
        }
        let i = at % chars.len();
        match at % 3 {
            0 => chars[i] = c,
            1 => chars.insert(i, c),
            _ => {
                chars.remove(i);
            }
        }
    }
    chars.into_iter().collect()
}

#[test]
fn corpus_seeds_parse() {
    for s in seeds("parse_expr") {
        let e = parse(&s).unwrap();
        let again = parse(&e.to_string()).unwrap();
        assert_eq!(again.to_string(), e.to_string());
    }
    for s in seeds("parse_potential_file") {
        let v = Potential::from_json(&s).unwrap();
        let again = Potential::from_json(&v.to_json()).unwrap();
        assert_eq!(again.pieces.len(), v.pieces.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, ..ProptestConfig::default() })]

    #[test]
    fn expressions_never_panic(src in "[-+*/^().,0-9a-z eE]{0,40}") {
        if let Ok(e) = parse(&src) {
            let _ = parse(&e.to_string());
        }
    }

    #[test]
    fn mutated_expressions_never_panic(k in 0usize..5, edits in prop::collection::vec((0usize..200, any::<char>()), 1..6)) {
        let s = &seeds("parse_expr")[k];
        let _ = parse(&mutate(s, &edits));
    }

    #[test]
    fn mutated_files_never_panic(k in 0usize..4, edits in prop::collection::vec((0usize..400, any::<char>()), 1..6)) {
        let s = &seeds("parse_potential_file")[k];
        if let Ok(v) = Potential::from_json(&mutate(s, &edits)) {
            let again = Potential::from_json(&v.to_json());
            prop_assert!(again.is_ok(), "{}", v.to_json());
        }
    }
}
