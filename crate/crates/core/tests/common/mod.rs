#![allow(dead_code)]

use rand::Rng;
use relmon_core::boolrel::{permutations, Relation, SetSize};

pub fn size(n: usize) -> SetSize {
    SetSize::new(n).unwrap()
}

/// Composition straight from the definition, cell by cell.
pub fn oracle_compose(r: &Relation, s: &Relation) -> Relation {
    let k = r.n().get();
    let mut pairs = Vec::new();
    for i in 0..k {
        for l in 0..k {
            if (0..k).any(|j| r.get(i, j) && s.get(j, l)) {
                pairs.push((i, l));
            }
        }
    }
    Relation::from_pairs(r.n(), &pairs).unwrap()
}

/// Searches the whole monoid for a two-sided inverse.
pub fn has_inverse(r: &Relation) -> bool {
    let n = r.n();
    let id = Relation::identity(n);
    (0..n.monoid_order())
        .map(|bits| Relation::from_index(n, bits))
        .any(|s| oracle_compose(r, &s) == id && oracle_compose(&s, r) == id)
}

/// Minimum over all (n!)^2 row/column permutation images.
pub fn orbit_minimum(r: &Relation) -> Relation {
    let perms = permutations(r.n().get());
    let mut best = *r;
    for left in &perms {
        for right in &perms {
            let u = Relation::from_permutation(left).unwrap();
            let v = Relation::from_permutation(right).unwrap();
            best = best.min(oracle_compose(&oracle_compose(&u, r), &v));
        }
    }
    best
}

pub fn random_relation<R: Rng>(rng: &mut R, n: SetSize) -> Relation {
    let mask = if n.cells() == 64 {
        u64::MAX
    } else {
        (1u64 << n.cells()) - 1
    };
    Relation::new(n, rng.random::<u64>() & mask).unwrap()
}

pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.random_range(0..=i));
    }
    p
}

fn tables(m: usize, leq: impl Fn(usize, usize) -> bool) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let glb = |a: usize, b: usize| {
        let lower: Vec<usize> = (0..m).filter(|&z| leq(z, a) && leq(z, b)).collect();
        *lower
            .iter()
            .find(|&&z| lower.iter().all(|&w| leq(w, z)))
            .unwrap()
    };
    let lub = |a: usize, b: usize| {
        let upper: Vec<usize> = (0..m).filter(|&z| leq(a, z) && leq(b, z)).collect();
        *upper
            .iter()
            .find(|&&z| upper.iter().all(|&w| leq(z, w)))
            .unwrap()
    };
    let meet = (0..m)
        .map(|a| (0..m).map(|b| glb(a, b)).collect())
        .collect();
    let join = (0..m)
        .map(|a| (0..m).map(|b| lub(a, b)).collect())
        .collect();
    (meet, join)
}

/// Diamond: bottom 0, atoms 1 2 3, top 4.
pub fn m3_tables() -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    tables(5, |a, b| a == b || a == 0 || b == 4)
}

/// Pentagon: 0 < 1 < 2 < 4 and 0 < 3 < 4.
pub fn n5_tables() -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    tables(5, |a, b| a == b || a == 0 || b == 4 || (a == 1 && b == 2))
}
