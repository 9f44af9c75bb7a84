//! Frozen sieve output. The counts below were produced by the exhaustive
//! sieve itself and are pinned here so any change in classification shows up.

mod common;

use common::size;
use relmon_core::sieve::{classify_all, witness_pair, SieveMode};

const GOLDEN: [&str; 4] = [
    include_str!("golden/classification_n1.csv"),
    include_str!("golden/classification_n2.csv"),
    include_str!("golden/classification_n3.csv"),
    include_str!("golden/classification_n4.csv"),
];

#[test]
fn csv_matches_golden_files() {
    for n in 1..=4 {
        let c = classify_all(size(n), SieveMode::SymmetryReduced).unwrap();
        assert!(
            c.to_csv() == GOLDEN[n - 1],
            "classification for n={n} drifted from golden file"
        );
    }
}

#[test]
fn full_pair_sieve_matches_golden_small() {
    for n in 1..=3 {
        let c = classify_all(size(n), SieveMode::FullPairs).unwrap();
        assert!(c.to_csv() == GOLDEN[n - 1], "n={n}");
    }
}

#[test]
fn frozen_counts() {
    // (units, reducible, irreducible, irreducible classes)
    let expected = [
        (1, 1, 0, 0),
        (2, 14, 0, 0),
        (6, 500, 6, 1),
        (24, 65248, 264, 3),
    ];
    for (n, want) in (1..=4).zip(expected) {
        let c = classify_all(size(n), SieveMode::SymmetryReduced).unwrap();
        let counts = c.counts();
        assert_eq!(
            (
                counts.units,
                counts.reducible,
                counts.irreducible,
                c.class_reps().len()
            ),
            want,
            "n={n}"
        );
    }
}

#[test]
fn frozen_witnesses() {
    let c = classify_all(size(4), SieveMode::SymmetryReduced).unwrap();
    let reps: Vec<String> = c.class_reps().iter().map(ToString::to_string).collect();
    assert_eq!(reps.len(), 3);
    let (p, q) = witness_pair(&c).unwrap();
    assert_eq!(
        (p.to_string(), q.to_string()),
        (reps[0].clone(), reps[1].clone())
    );
    assert_eq!(
        (p.to_string().as_str(), q.to_string().as_str()),
        ("4:16ac", "4:359e")
    );

    let c3 = classify_all(size(3), SieveMode::SymmetryReduced).unwrap();
    // the lone class at n = 3 is the complement of the identity
    assert_eq!(c3.class_reps()[0].to_string(), "3:0ee");
    assert_eq!(witness_pair(&c3), None);
}

#[test]
fn golden_rows_are_self_consistent() {
    for text in GOLDEN {
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("relation,status,canonical"));
        for (i, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 3);
            let r: relmon_core::Relation = fields[0].parse().unwrap();
            assert_eq!(r.index(), i);
            let status: relmon_core::Status = fields[1].parse().unwrap();
            assert_eq!(status == relmon_core::Status::Unit, r.is_unit());
            let canon: relmon_core::Relation = fields[2].parse().unwrap();
            assert!(canon <= r);
        }
    }
}
