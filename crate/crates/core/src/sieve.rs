//! Unit / reducible / irreducible classification of `B_n` for `n <= 4`.
//!
//! Two relations are associates when one is `u * r * v` for units `u`, `v`,
//! i.e. they differ by a row permutation and a column permutation. The
//! canonical representative of an associate class is its smallest bit vector.
//!
//! The sieve marks every product of two non-units. The full mode walks all
//! non-unit pairs. The reduced mode only walks right factors drawn from one
//! representative per associate class, which suffices because
//! `a * (u b0 v) = ((a u) * b0) * v` and the reducible set is closed under the
//! associate action.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::boolrel::{permutations, units, DenseKernel, Relation, SetSize};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Status {
    Unit,
    Reducible,
    Irreducible,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Unit => "unit",
            Status::Reducible => "reducible",
            Status::Irreducible => "irreducible",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(Status::Unit),
            "reducible" => Ok(Status::Reducible),
            "irreducible" => Ok(Status::Irreducible),
            other => Err(Error::Parse(format!("unknown status {other:?}"))),
        }
    }
}

/// A pair of units `(u, v)` acting by `r -> u * r * v`, stored as the
/// permutations of `0..n` they realize.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AssociateAction {
    left: Vec<usize>,
    right: Vec<usize>,
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter()
        .all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

impl AssociateAction {
    pub fn new(left: Vec<usize>, right: Vec<usize>) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::SizeMismatch {
                left: left.len(),
                right: right.len(),
            });
        }
        if !is_permutation(&left) || !is_permutation(&right) {
            return Err(Error::Parse("associate action needs two bijections".into()));
        }
        Ok(AssociateAction { left, right })
    }

    pub fn left_unit(&self) -> Relation {
        Relation::from_permutation(&self.left).expect("validated")
    }

    pub fn right_unit(&self) -> Relation {
        Relation::from_permutation(&self.right).expect("validated")
    }

    pub fn apply(&self, r: &Relation) -> Result<Relation> {
        if r.n().get() != self.left.len() {
            return Err(Error::SizeMismatch {
                left: self.left.len(),
                right: r.n().get(),
            });
        }
        Ok(r.act(&self.left, &self.right))
    }

    pub fn inverse(&self) -> Self {
        AssociateAction {
            left: invert(&self.left),
            right: invert(&self.right),
        }
    }
}

/// Smallest bit vector in the associate orbit of `r`.
///
/// For a fixed column permutation the minimum over row permutations puts the
/// rows in non-increasing order from row 0 upward (row `n-1` is the most
/// significant), so only the `n!` column permutations are enumerated.
pub fn canonical(r: &Relation) -> Relation {
    let n = r.n();
    let k = n.get();
    let identity: Vec<usize> = (0..k).collect();
    permutations(k)
        .iter()
        .map(|cols| {
            let mut rows: Vec<u64> = r.act(&identity, cols).rows().collect();
            rows.sort_unstable_by(|a, b| b.cmp(a));
            let bits = rows
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, row)| acc | row << (i * k));
            Relation::new(n, bits).expect("row permutation keeps width")
        })
        .min()
        .expect("at least one permutation")
}

pub fn are_associates(r: &Relation, s: &Relation) -> Result<bool> {
    if r.n() != s.n() {
        return Err(Error::SizeMismatch {
            left: r.n().get(),
            right: s.n().get(),
        });
    }
    Ok(canonical(r) == canonical(s))
}

/// Canonical form of every element of `B_n`, indexed by bit vector.
pub fn canonical_table(n: SetSize) -> Result<Vec<u16>> {
    let n = SetSize::enumerable(n.get())?;
    Ok((0..n.monoid_order())
        .into_par_iter()
        .map(|bits| canonical(&Relation::from_index(n, bits)).bits() as u16)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SieveMode {
    /// Every non-unit times every non-unit.
    FullPairs,
    /// Right factor restricted to associate-class representatives.
    SymmetryReduced,
}

const NO_FACTOR: u32 = u32::MAX;

/// Result of the sieve over all of `B_n`.
///
/// Equality compares the status array and class representatives only; the
/// recorded factorizations depend on the sieve mode.
#[derive(Debug, Clone)]
pub struct Classification {
    n: SetSize,
    status: Vec<Status>,
    canonical: Vec<u16>,
    class_reps: Vec<Relation>,
    // left | right << 16 for every reducible element
    factors: Vec<u32>,
}

impl PartialEq for Classification {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.status == other.status && self.class_reps == other.class_reps
    }
}

impl Eq for Classification {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StatusCounts {
    pub units: usize,
    pub reducible: usize,
    pub irreducible: usize,
}

impl StatusCounts {
    pub fn total(&self) -> usize {
        self.units + self.reducible + self.irreducible
    }
}

impl Classification {
    pub fn n(&self) -> SetSize {
        self.n
    }

    pub fn status(&self, r: &Relation) -> Status {
        self.status[r.index()]
    }

    pub fn statuses(&self) -> &[Status] {
        &self.status
    }

    /// Canonical form of `r`, from the precomputed table.
    pub fn canonical_of(&self, r: &Relation) -> Relation {
        Relation::from_index(self.n, self.canonical[r.index()] as usize)
    }

    pub fn canonical_table(&self) -> &[u16] {
        &self.canonical
    }

    /// Canonical representatives of the irreducible associate classes, ascending.
    pub fn class_reps(&self) -> &[Relation] {
        &self.class_reps
    }

    /// Non-unit factors `(a, b)` with `a * b = r`, recorded for reducible `r`.
    pub fn factorization(&self, r: &Relation) -> Option<(Relation, Relation)> {
        let code = self.factors[r.index()];
        (code != NO_FACTOR).then(|| {
            (
                Relation::from_index(self.n, (code & 0xffff) as usize),
                Relation::from_index(self.n, (code >> 16) as usize),
            )
        })
    }

    pub fn counts(&self) -> StatusCounts {
        let mut counts = StatusCounts::default();
        for s in &self.status {
            match s {
                Status::Unit => counts.units += 1,
                Status::Reducible => counts.reducible += 1,
                Status::Irreducible => counts.irreducible += 1,
            }
        }
        counts
    }

    /// Overwrites one status tag. Only meant for mutation testing of the
    /// downstream verifiers.
    #[doc(hidden)]
    pub fn corrupt_status(&mut self, r: &Relation, status: Status) {
        self.status[r.index()] = status;
    }

    /// Writes `relation,status,canonical` rows for every element.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "relation,status,canonical")?;
        for (bits, status) in self.status.iter().enumerate() {
            let r = Relation::from_index(self.n, bits);
            writeln!(out, "{},{},{}", r, status, self.canonical_of(&r))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Per-worker sink: a 2^(n^2)-bit mark set plus the first factorization seen.
struct Sink {
    marks: Vec<u64>,
    factors: Vec<u32>,
}

impl Sink {
    fn new(order: usize) -> Self {
        Sink {
            marks: vec![0; order.div_ceil(64)],
            factors: vec![NO_FACTOR; order],
        }
    }

    fn merge(mut self, other: Sink) -> Sink {
        for (a, b) in self.marks.iter_mut().zip(&other.marks) {
            *a |= b;
        }
        for (a, b) in self.factors.iter_mut().zip(&other.factors) {
            *a = (*a).min(*b);
        }
        self
    }
}

/// Marks `a * b` for every non-unit `a` and every right factor in `rights`.
/// Iteration is ascending in `(b, a)`, so the factor recorded for each
/// product is the smallest such pair within this chunk.
fn sieve_chunk(n: SetSize, rights: &[u16], lefts: &[u16]) -> Sink {
    let mut sink = Sink::new(n.monoid_order());
    for &b in rights {
        let kernel = DenseKernel::new(&Relation::from_index(n, b as usize));
        for &a in lefts {
            let p = kernel.left_compose(a) as usize;
            let word = &mut sink.marks[p >> 6];
            let bit = 1u64 << (p & 63);
            if *word & bit == 0 {
                *word |= bit;
                sink.factors[p] = u32::from(a) | u32::from(b) << 16;
            }
        }
    }
    sink
}

fn run_sieve(n: SetSize, rights: &[u16], lefts: &[u16]) -> Sink {
    let chunks = (rayon::current_num_threads() * 4).max(1);
    let chunk_len = rights.len().div_ceil(chunks).max(1);
    rights
        .par_chunks(chunk_len)
        .map(|chunk| sieve_chunk(n, chunk, lefts))
        .reduce(|| Sink::new(n.monoid_order()), Sink::merge)
}

/// Classifies every element of `B_n`.
pub fn classify_all(n: SetSize, mode: SieveMode) -> Result<Classification> {
    let n = SetSize::enumerable(n.get())?;
    let order = n.monoid_order();
    let canonical = canonical_table(n)?;
    let is_unit: Vec<bool> = (0..order)
        .map(|bits| Relation::from_index(n, bits).is_unit())
        .collect();
    let nonunits: Vec<u16> = (0..order)
        .filter(|&b| !is_unit[b])
        .map(|b| b as u16)
        .collect();

    let mut factors = match mode {
        SieveMode::FullPairs => run_sieve(n, &nonunits, &nonunits).factors,
        SieveMode::SymmetryReduced => {
            let reps: Vec<u16> = nonunits
                .iter()
                .copied()
                .filter(|&b| canonical[b as usize] == b)
                .collect();
            let seeds = run_sieve(n, &reps, &nonunits).factors;
            close_under_associates(n, &canonical, &seeds)
        }
    };

    let mut status = vec![Status::Irreducible; order];
    for bits in 0..order {
        if is_unit[bits] {
            status[bits] = Status::Unit;
            factors[bits] = NO_FACTOR;
        } else if factors[bits] != NO_FACTOR {
            status[bits] = Status::Reducible;
        }
    }

    let mut class_reps: Vec<Relation> = (0..order)
        .filter(|&bits| status[bits] == Status::Irreducible && canonical[bits] as usize == bits)
        .map(|bits| Relation::from_index(n, bits))
        .collect();
    class_reps.sort();

    Ok(Classification {
        n,
        status,
        canonical,
        class_reps,
        factors,
    })
}

/// Extends seed factorizations to every associate of a seeded product.
/// If `g(x) = u x v = a b` is seeded then `x = (u^-1 a)(b v^-1)`.
fn close_under_associates(n: SetSize, canonical: &[u16], seeds: &[u32]) -> Vec<u32> {
    let order = n.monoid_order();
    let mut seeded_class = vec![false; order];
    for (bits, &f) in seeds.iter().enumerate() {
        if f != NO_FACTOR {
            seeded_class[canonical[bits] as usize] = true;
        }
    }
    let perms = permutations(n.get());
    let identity: Vec<usize> = (0..n.get()).collect();
    let inverses: Vec<Vec<usize>> = perms.iter().map(|p| invert(p)).collect();

    (0..order)
        .into_par_iter()
        .map(|bits| {
            if seeds[bits] != NO_FACTOR {
                return seeds[bits];
            }
            if !seeded_class[canonical[bits] as usize] {
                return NO_FACTOR;
            }
            let x = Relation::from_index(n, bits);
            for (li, left) in perms.iter().enumerate() {
                for (ri, right) in perms.iter().enumerate() {
                    let image = x.act(left, right).index();
                    let code = seeds[image];
                    if code == NO_FACTOR {
                        continue;
                    }
                    let a = Relation::from_index(n, (code & 0xffff) as usize);
                    let b = Relation::from_index(n, (code >> 16) as usize);
                    let a = a.act(&inverses[li], &identity);
                    let b = b.act(&identity, &inverses[ri]);
                    return a.bits() as u32 | (b.bits() as u32) << 16;
                }
            }
            unreachable!("seeded class without a seeded member")
        })
        .collect()
}

/// The two smallest irreducible class representatives, if there are two classes.
pub fn witness_pair(c: &Classification) -> Option<(Relation, Relation)> {
    match c.class_reps() {
        [p, q, ..] => Some((*p, *q)),
        _ => None,
    }
}

/// Searches for non-units `a`, `b` with `a * b = target` by scanning every
/// left factor `a`.
///
/// For a fixed `a`, any right factor with `a * b ⊆ target` must have row `j`
/// inside the intersection of the target rows `i` with `a(i, j)`. The product
/// is monotone in `b`, so the row-wise maximal choice decides solvability; if
/// that choice is a unit, its sub-relations are enumerated for a non-unit.
pub fn find_nonunit_factorization(target: &Relation) -> Result<Option<(Relation, Relation)>> {
    let n = SetSize::enumerable(target.n().get())?;
    let k = n.get();
    let full_row = (1u64 << k) - 1;
    let target_rows: Vec<u64> = target.rows().collect();

    for a in (0..n.monoid_order()).map(|bits| Relation::from_index(n, bits)) {
        if a.is_unit() {
            continue;
        }
        let mut max_rows = vec![full_row; k];
        for (i, row) in a.rows().enumerate() {
            for (j, slot) in max_rows.iter_mut().enumerate() {
                if row >> j & 1 == 1 {
                    *slot &= target_rows[i];
                }
            }
        }
        let widest = rows_to_relation(n, &max_rows);
        if a.compose(&widest)? != *target {
            continue;
        }
        if !widest.is_unit() {
            return Ok(Some((a, widest)));
        }
        let mut sub = widest.bits();
        loop {
            sub = (sub.wrapping_sub(1)) & widest.bits();
            let b = Relation::new(n, sub)?;
            if !b.is_unit() && a.compose(&b)? == *target {
                return Ok(Some((a, b)));
            }
            if sub == 0 {
                break;
            }
        }
    }
    Ok(None)
}

fn rows_to_relation(n: SetSize, rows: &[u64]) -> Relation {
    let k = n.get();
    let bits = rows
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, row)| acc | row << (i * k));
    Relation::new(n, bits).expect("rows fit")
}

/// Direct check of the classification on small monoids: the status of each
/// element recomputed from the naive product over all pairs.
pub fn classify_naive(n: SetSize) -> Result<Vec<Status>> {
    let n = SetSize::enumerable(n.get())?;
    let all: Vec<Relation> = crate::boolrel::all_relations(n)?.collect();
    let unit_set = units(n);
    let mut status: Vec<Status> = all
        .iter()
        .map(|r| {
            if unit_set.contains(r) {
                Status::Unit
            } else {
                Status::Irreducible
            }
        })
        .collect();
    for a in all.iter().filter(|r| !r.is_unit()) {
        for b in all.iter().filter(|r| !r.is_unit()) {
            let p = crate::boolrel::compose_naive(a, b)?;
            status[p.index()] = Status::Reducible;
        }
    }
    Ok(status)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolrel::{all_relations, compose};

    fn size(n: usize) -> SetSize {
        SetSize::new(n).unwrap()
    }

    /// Minimum over the full two-sided orbit, enumerated explicitly.
    fn canonical_by_orbit(r: &Relation) -> Relation {
        let perms = permutations(r.n().get());
        let mut best = *r;
        for left in &perms {
            for right in &perms {
                best = best.min(r.act(left, right));
            }
        }
        best
    }

    #[test]
    fn canonical_of_fixed_points() {
        let n = size(4);
        assert_eq!(canonical(&Relation::zero(n)), Relation::zero(n));
        assert_eq!(canonical(&Relation::full(n)), Relation::full(n));
    }

    #[test]
    fn canonical_of_identity_is_orbit_minimum() {
        let n = size(4);
        let id = Relation::identity(n);
        let min_perm = units(n).into_iter().min().unwrap();
        assert_eq!(canonical_by_orbit(&id), min_perm);
        assert_eq!(canonical(&id), min_perm);
        // anti-diagonal: rows 0..3 carry bits 3,2,1,0
        assert_eq!(min_perm.to_string(), "4:1248");
    }

    #[test]
    fn canonical_matches_orbit_enumeration_exhaustively_small() {
        for k in 1..=3 {
            for r in all_relations(size(k)).unwrap() {
                let c = canonical(&r);
                assert_eq!(c, canonical_by_orbit(&r), "{r}");
                assert_eq!(canonical(&c), c);
            }
        }
    }

    #[test]
    fn associates_examples() {
        let n = size(4);
        let r = Relation::from_pairs(n, &[(0, 1), (1, 1), (2, 3)]).unwrap();
        assert!(are_associates(&r, &r).unwrap());
        assert!(!are_associates(&Relation::identity(n), &Relation::zero(n)).unwrap());
        let action = AssociateAction::new(vec![2, 0, 3, 1], vec![1, 3, 0, 2]).unwrap();
        let moved = compose(
            &compose(&action.left_unit(), &r).unwrap(),
            &action.right_unit(),
        )
        .unwrap();
        assert_eq!(action.apply(&r).unwrap(), moved);
        assert!(are_associates(&r, &moved).unwrap());
        assert_eq!(action.inverse().apply(&moved).unwrap(), r);
        assert!(are_associates(&r, &Relation::identity(size(3))).is_err());
    }

    #[test]
    fn action_rejects_non_bijections() {
        assert!(AssociateAction::new(vec![0, 0], vec![0, 1]).is_err());
        assert!(AssociateAction::new(vec![0, 1], vec![0, 1, 2]).is_err());
    }

    #[test]
    fn n1_classification() {
        for mode in [SieveMode::FullPairs, SieveMode::SymmetryReduced] {
            let c = classify_all(size(1), mode).unwrap();
            let id = Relation::identity(size(1));
            let zero = Relation::zero(size(1));
            assert_eq!(c.status(&id), Status::Unit);
            assert_eq!(c.status(&zero), Status::Reducible);
            assert!(c.class_reps().is_empty());
            assert_eq!(witness_pair(&c), None);
        }
    }

    #[test]
    fn rejects_large_n() {
        assert_eq!(
            classify_all(size(5), SieveMode::SymmetryReduced).unwrap_err(),
            Error::EnumerationTooLarge { n: 5 }
        );
    }

    #[test]
    fn sieve_matches_naive_definition_small() {
        for k in 1..=3 {
            let naive = classify_naive(size(k)).unwrap();
            for mode in [SieveMode::FullPairs, SieveMode::SymmetryReduced] {
                let c = classify_all(size(k), mode).unwrap();
                assert_eq!(c.statuses(), naive.as_slice(), "n={k} {mode:?}");
            }
        }
    }

    #[test]
    fn recorded_factorizations_are_valid() {
        for k in 1..=3 {
            for mode in [SieveMode::FullPairs, SieveMode::SymmetryReduced] {
                let c = classify_all(size(k), mode).unwrap();
                for r in all_relations(size(k)).unwrap() {
                    match (c.status(&r), c.factorization(&r)) {
                        (Status::Reducible, Some((a, b))) => {
                            assert!(!a.is_unit() && !b.is_unit());
                            assert_eq!(compose(&a, &b).unwrap(), r);
                        }
                        (Status::Reducible, None) => panic!("missing factors for {r}"),
                        (_, f) => assert_eq!(f, None),
                    }
                }
            }
        }
    }

    #[test]
    fn factorization_scan_agrees_with_sieve_small() {
        for k in 1..=3 {
            let c = classify_all(size(k), SieveMode::SymmetryReduced).unwrap();
            for r in all_relations(size(k)).unwrap().filter(|r| !r.is_unit()) {
                let found = find_nonunit_factorization(&r).unwrap();
                assert_eq!(found.is_some(), c.status(&r) == Status::Reducible, "{r}");
                if let Some((a, b)) = found {
                    assert!(!a.is_unit() && !b.is_unit());
                    assert_eq!(compose(&a, &b).unwrap(), r);
                }
            }
        }
    }

    #[test]
    fn csv_shape() {
        let c = classify_all(size(1), SieveMode::FullPairs).unwrap();
        assert_eq!(
            c.to_csv(),
            "relation,status,canonical\n1:0,reducible,1:0\n1:1,unit,1:1\n"
        );
    }

    #[test]
    fn status_round_trips_through_text() {
        for s in [Status::Unit, Status::Reducible, Status::Irreducible] {
            assert_eq!(s.as_str().parse::<Status>().unwrap(), s);
        }
        assert!("prime".parse::<Status>().is_err());
    }
}
