//! Finite distributive lattices given by meet/join tables, lattice-valued
//! correspondences, and the idempotent localization onto relations on four
//! points.
//!
//! A correspondence on `X` with values in `L` composes by
//! `(r s)(x, z) = join over y of meet(r(x, y), s(y, z))`. For an atom `c` and
//! a four-element `Y ⊆ X`, the correspondence `e` with `c` on the
//! `Y`-diagonal and bottom elsewhere is idempotent, and `e M e` is a copy of
//! the relation monoid on `Y`: every cell of a localized element is bottom
//! off `Y × Y` and bottom or `c` on it.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::boolrel::{Relation, SetSize};
use crate::error::{Error, Result};

/// Largest lattice accepted.
pub const MAX_LATTICE_SIZE: usize = 64;
/// Largest set size for correspondences.
pub const MAX_CORR_N: usize = 6;
/// Size of the localizing subset.
pub const LOCAL_SIZE: usize = 4;

/// Element id of a lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeElement(pub u8);

impl LatticeElement {
    #[inline]
    pub fn id(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for LatticeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A validated finite distributive lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    size: usize,
    meet: Vec<u8>,
    join: Vec<u8>,
}

fn check_table(table: &[Vec<usize>], m: usize, which: &str) -> Result<Vec<u8>> {
    if table.len() != m || table.iter().any(|row| row.len() != m) {
        return Err(Error::Lattice(format!("{which} table is not {m}x{m}")));
    }
    let mut flat = Vec::with_capacity(m * m);
    for (a, row) in table.iter().enumerate() {
        for (b, &v) in row.iter().enumerate() {
            if v >= m {
                return Err(Error::Lattice(format!(
                    "{which}({a}, {b}) = {v} is not an element id"
                )));
            }
            flat.push(v as u8);
        }
    }
    Ok(flat)
}

/// Validates meet and join tables, checking every lattice axiom and
/// distributivity over all triples. The error names the first failed axiom
/// and its witness.
pub fn verify_lattice(meet: &[Vec<usize>], join: &[Vec<usize>]) -> Result<Lattice> {
    let m = meet.len();
    if m == 0 {
        return Err(Error::Lattice("empty lattice".into()));
    }
    if m > MAX_LATTICE_SIZE {
        return Err(Error::Lattice(format!(
            "{m} elements exceeds the maximum of {MAX_LATTICE_SIZE}"
        )));
    }
    let l = Lattice {
        size: m,
        meet: check_table(meet, m, "meet")?,
        join: check_table(join, m, "join")?,
    };
    l.check_axioms()?;
    Ok(l)
}

impl Lattice {
    fn check_axioms(&self) -> Result<()> {
        let m = self.size;
        let fail =
            |axiom: &'static str, witness: Vec<usize>| Err(Error::AxiomViolated { axiom, witness });
        for a in 0..m {
            if self.meet_id(a, a) != a {
                return fail("meet idempotence", vec![a]);
            }
            if self.join_id(a, a) != a {
                return fail("join idempotence", vec![a]);
            }
        }
        for a in 0..m {
            for b in 0..m {
                if self.meet_id(a, b) != self.meet_id(b, a) {
                    return fail("meet commutativity", vec![a, b]);
                }
                if self.join_id(a, b) != self.join_id(b, a) {
                    return fail("join commutativity", vec![a, b]);
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let (ab, bc) = (self.meet_id(a, b), self.meet_id(b, c));
                    if self.meet_id(ab, c) != self.meet_id(a, bc) {
                        return fail("meet associativity", vec![a, b, c]);
                    }
                    let (ab, bc) = (self.join_id(a, b), self.join_id(b, c));
                    if self.join_id(ab, c) != self.join_id(a, bc) {
                        return fail("join associativity", vec![a, b, c]);
                    }
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                if self.meet_id(a, self.join_id(a, b)) != a {
                    return fail("absorption a ∧ (a ∨ b) = a", vec![a, b]);
                }
                if self.join_id(a, self.meet_id(a, b)) != a {
                    return fail("absorption a ∨ (a ∧ b) = a", vec![a, b]);
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let lhs = self.meet_id(a, self.join_id(b, c));
                    let rhs = self.join_id(self.meet_id(a, b), self.meet_id(a, c));
                    if lhs != rhs {
                        return fail("distributivity", vec![a, b, c]);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_trivial(&self) -> bool {
        self.size < 2
    }

    #[inline]
    fn meet_id(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size + b] as usize
    }

    #[inline]
    fn join_id(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size + b] as usize
    }

    #[inline]
    pub fn meet(&self, a: LatticeElement, b: LatticeElement) -> LatticeElement {
        LatticeElement(self.meet[a.id() * self.size + b.id()])
    }

    #[inline]
    pub fn join(&self, a: LatticeElement, b: LatticeElement) -> LatticeElement {
        LatticeElement(self.join[a.id() * self.size + b.id()])
    }

    /// `a <= b` iff `a ∧ b = a`.
    pub fn leq(&self, a: LatticeElement, b: LatticeElement) -> bool {
        self.meet(a, b) == a
    }

    pub fn element(&self, id: usize) -> Result<LatticeElement> {
        if id < self.size {
            Ok(LatticeElement(id as u8))
        } else {
            Err(Error::Lattice(format!(
                "element {id} out of range for a {}-element lattice",
                self.size
            )))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = LatticeElement> {
        (0..self.size).map(|id| LatticeElement(id as u8))
    }

    /// Meet of all elements.
    pub fn bottom(&self) -> LatticeElement {
        self.elements()
            .reduce(|a, b| self.meet(a, b))
            .expect("nonempty")
    }

    /// Join of all elements.
    pub fn top(&self) -> LatticeElement {
        self.elements()
            .reduce(|a, b| self.join(a, b))
            .expect("nonempty")
    }

    /// Elements covering the bottom, ascending by id.
    pub fn atoms(&self) -> Vec<LatticeElement> {
        let bottom = self.bottom();
        self.elements()
            .filter(|&c| c != bottom)
            .filter(|&c| {
                !self
                    .elements()
                    .any(|z| z != bottom && z != c && self.leq(z, c))
            })
            .collect()
    }

    pub fn is_atom(&self, c: LatticeElement) -> bool {
        self.atoms().contains(&c)
    }

    /// Parses the text form: element count, then the meet rows, then the
    /// join rows, ids separated by whitespace.
    pub fn parse(text: &str) -> Result<Lattice> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let m: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty lattice file".into()))?
            .parse()
            .map_err(|_| Error::Parse("first line must be the element count".into()))?;
        let mut read_table = |which: &str| -> Result<Vec<Vec<usize>>> {
            (0..m)
                .map(|row| {
                    let line = lines.next().ok_or_else(|| {
                        Error::Parse(format!("{which} table ends before row {row}"))
                    })?;
                    line.split_whitespace()
                        .map(|tok| {
                            tok.parse().map_err(|_| {
                                Error::Parse(format!("bad id {tok:?} in {which} table"))
                            })
                        })
                        .collect()
                })
                .collect()
        };
        let meet = read_table("meet")?;
        let join = read_table("join")?;
        if lines.next().is_some() {
            return Err(Error::Parse("trailing lines after the join table".into()));
        }
        verify_lattice(&meet, &join)
    }

    pub fn to_text(&self) -> String {
        let m = self.size;
        let mut out = format!("{m}\n");
        for table in [&self.meet, &self.join] {
            for row in table.chunks(m) {
                let row: Vec<String> = row.iter().map(u8::to_string).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        out
    }

    fn from_ops(
        m: usize,
        meet: impl Fn(usize, usize) -> usize,
        join: impl Fn(usize, usize) -> usize,
    ) -> Result<Lattice> {
        let table = |op: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<usize>> {
            (0..m).map(|a| (0..m).map(|b| op(a, b)).collect()).collect()
        };
        verify_lattice(&table(&meet), &table(&join))
    }
}

/// The chain `0 < 1 < .. < k-1`.
pub fn build_chain(k: usize) -> Result<Lattice> {
    if k == 0 {
        return Err(Error::Lattice("a chain needs at least one element".into()));
    }
    Lattice::from_ops(k, usize::min, usize::max)
}

/// Subsets of a `k`-set, element id = bitmask.
pub fn build_boolean(k: usize) -> Result<Lattice> {
    if k > 4 {
        return Err(Error::Lattice(format!(
            "boolean lattice of rank {k} is too large (max 4)"
        )));
    }
    Lattice::from_ops(1 << k, |a, b| a & b, |a, b| a | b)
}

/// Lattice of down-sets of the poset on `0..k` generated by `edges`
/// (`(i, j)` meaning `i < j`), ordered by inclusion. Ids follow the
/// ascending bitmask order of the down-sets, so id 0 is the empty set.
pub fn build_downsets(k: usize, edges: &[(usize, usize)]) -> Result<Lattice> {
    if k > 16 {
        return Err(Error::Lattice(format!(
            "poset with {k} points is too large"
        )));
    }
    // below[j] = points strictly below j
    let mut below = vec![0u32; k];
    for &(i, j) in edges {
        if i >= k || j >= k {
            return Err(Error::Lattice(format!("edge {i} < {j} outside 0..{k}")));
        }
        below[j] |= 1 << i;
    }
    loop {
        let mut changed = false;
        for j in 0..k {
            let mut acc = below[j];
            for i in 0..k {
                if below[j] >> i & 1 == 1 {
                    acc |= below[i];
                }
            }
            if acc != below[j] {
                below[j] = acc;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if let Some(j) = (0..k).find(|&j| below[j] >> j & 1 == 1) {
        return Err(Error::Lattice(format!(
            "poset relation has a cycle through {j}"
        )));
    }
    let downsets: Vec<u32> = (0u32..1 << k)
        .filter(|&s| (0..k).all(|j| s >> j & 1 == 0 || below[j] & !s == 0))
        .collect();
    let m = downsets.len();
    if m > MAX_LATTICE_SIZE {
        return Err(Error::Lattice(format!(
            "{m} down-sets exceeds the maximum of {MAX_LATTICE_SIZE}"
        )));
    }
    let id_of = |s: u32| {
        downsets
            .binary_search(&s)
            .expect("down-sets closed under ∩ and ∪")
    };
    Lattice::from_ops(
        m,
        |a, b| id_of(downsets[a] & downsets[b]),
        |a, b| id_of(downsets[a] | downsets[b]),
    )
}

/// Parses the poset text form: point count, then `i j` lines for `i < j`.
pub fn parse_poset(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let k: usize = lines
        .next()
        .ok_or_else(|| Error::Parse("empty poset file".into()))?
        .parse()
        .map_err(|_| Error::Parse("first line must be the point count".into()))?;
    let edges = lines
        .map(|line| {
            let ids: Vec<usize> = line
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Parse(format!("bad poset line {line:?}")))
                })
                .collect::<Result<_>>()?;
            match ids[..] {
                [i, j] => Ok((i, j)),
                _ => Err(Error::Parse(format!("bad poset line {line:?}"))),
            }
        })
        .collect::<Result<_>>()?;
    Ok((k, edges))
}

/// Builtin lattices: `chain1`..`chain8`, `boolean1`..`boolean4`.
pub fn builtin(name: &str) -> Result<Lattice> {
    let parse_rank = |suffix: &str| suffix.parse::<usize>().ok();
    if let Some(k) = name.strip_prefix("chain").and_then(parse_rank) {
        if (1..=8).contains(&k) {
            return build_chain(k);
        }
    }
    if let Some(k) = name.strip_prefix("boolean").and_then(parse_rank) {
        if (1..=4).contains(&k) {
            return build_boolean(k);
        }
    }
    Err(Error::Lattice(format!("unknown builtin lattice {name:?}")))
}

/// A function `X × X -> L`, stored row-major by element id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Correspondence {
    n: SetSize,
    cells: Vec<u8>,
}

impl Correspondence {
    pub fn new(n: SetSize, cells: Vec<LatticeElement>) -> Result<Self> {
        if n.get() > MAX_CORR_N {
            return Err(Error::SizeOutOfRange {
                n: n.get(),
                max: MAX_CORR_N,
            });
        }
        if cells.len() != n.cells() {
            return Err(Error::Parse(format!(
                "{} cells for an {}x{} correspondence",
                cells.len(),
                n,
                n
            )));
        }
        Ok(Correspondence {
            n,
            cells: cells.into_iter().map(|c| c.0).collect(),
        })
    }

    pub fn constant(n: SetSize, value: LatticeElement) -> Result<Self> {
        Self::new(n, vec![value; n.cells()])
    }

    /// `on_diag` on the diagonal, `off_diag` elsewhere.
    pub fn diagonal(n: SetSize, on_diag: LatticeElement, off_diag: LatticeElement) -> Result<Self> {
        let k = n.get();
        let cells = (0..k * k)
            .map(|i| if i / k == i % k { on_diag } else { off_diag })
            .collect();
        Self::new(n, cells)
    }

    /// Encodes a relation with `present` for related pairs and `absent` elsewhere.
    pub fn from_relation(
        r: &Relation,
        present: LatticeElement,
        absent: LatticeElement,
    ) -> Result<Self> {
        let k = r.n().get();
        let cells = (0..k * k)
            .map(|i| if r.get(i / k, i % k) { present } else { absent })
            .collect();
        Self::new(r.n(), cells)
    }

    /// Uniformly random cells.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, l: &Lattice, n: SetSize) -> Result<Self> {
        let cells = (0..n.cells())
            .map(|_| LatticeElement(rng.random_range(0..l.size()) as u8))
            .collect();
        Self::new(n, cells)
    }

    pub fn n(&self) -> SetSize {
        self.n
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> LatticeElement {
        LatticeElement(self.cells[x * self.n.get() + y])
    }

    pub fn cells(&self) -> impl Iterator<Item = LatticeElement> + '_ {
        self.cells.iter().map(|&c| LatticeElement(c))
    }

    fn check_against(&self, l: &Lattice) -> Result<()> {
        match self.cells.iter().find(|&&c| c as usize >= l.size()) {
            Some(c) => Err(Error::Lattice(format!(
                "cell value {c} is not an element of a {}-element lattice",
                l.size()
            ))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Correspondence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.n)?;
        for (i, c) in self.cells.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Correspondence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, body) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in correspondence {s:?}")))?;
        let n = SetSize::new(
            n.parse()
                .map_err(|_| Error::Parse(format!("bad set size in {s:?}")))?,
        )?;
        let cells = body
            .split(',')
            .map(|t| {
                t.parse::<u8>()
                    .map(LatticeElement)
                    .map_err(|_| Error::Parse(format!("bad cell {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Correspondence::new(n, cells)
    }
}

/// `(r s)(x, z) = join over y of meet(r(x, y), s(y, z))`.
pub fn compose_corr(l: &Lattice, r: &Correspondence, s: &Correspondence) -> Result<Correspondence> {
    if r.n != s.n {
        return Err(Error::SizeMismatch {
            left: r.n.get(),
            right: s.n.get(),
        });
    }
    r.check_against(l)?;
    s.check_against(l)?;
    let k = r.n.get();
    let bottom = l.bottom().0;
    let mut cells = vec![bottom; k * k];
    for x in 0..k {
        for z in 0..k {
            let mut acc = bottom as usize;
            for y in 0..k {
                let m = l.meet_id(r.cells[x * k + y] as usize, s.cells[y * k + z] as usize);
                acc = l.join_id(acc, m);
            }
            cells[x * k + z] = acc as u8;
        }
    }
    Ok(Correspondence { n: r.n, cells })
}

/// The idempotent `e` with atom `c` on the `Y`-diagonal, together with the
/// data identifying `e M e` with relations on `Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Localizer {
    lattice: Lattice,
    n: SetSize,
    y: Vec<usize>,
    atom: LatticeElement,
    bottom: LatticeElement,
    e: Correspondence,
}

/// Builds `e` for a four-element `Y` (zero-based, any order) and atom `c`.
pub fn make_localizer(
    l: &Lattice,
    n: SetSize,
    y: &[usize],
    c: LatticeElement,
) -> Result<Localizer> {
    if l.is_trivial() {
        return Err(Error::Localizer("nontrivial lattice required".into()));
    }
    if n.get() < LOCAL_SIZE || n.get() > MAX_CORR_N {
        return Err(Error::Localizer(format!(
            "set size {n} outside {LOCAL_SIZE}..={MAX_CORR_N}"
        )));
    }
    let mut subset = y.to_vec();
    subset.sort_unstable();
    subset.dedup();
    if subset.len() != LOCAL_SIZE || y.len() != LOCAL_SIZE {
        return Err(Error::Localizer(format!(
            "Y must have exactly {LOCAL_SIZE} distinct points, got {y:?}"
        )));
    }
    if let Some(&p) = subset.iter().find(|&&p| p >= n.get()) {
        return Err(Error::Localizer(format!(
            "point {p} of Y outside the {n}-element set"
        )));
    }
    if c.id() >= l.size() || !l.is_atom(c) {
        return Err(Error::Localizer(format!("element {c} is not an atom")));
    }
    let bottom = l.bottom();
    let k = n.get();
    let cells = (0..k * k)
        .map(|i| {
            let (x, z) = (i / k, i % k);
            if x == z && subset.contains(&x) {
                c
            } else {
                bottom
            }
        })
        .collect();
    let e = Correspondence::new(n, cells)?;
    if compose_corr(l, &e, &e)? != e {
        return Err(Error::Localizer("e is not idempotent".into()));
    }
    Ok(Localizer {
        lattice: l.clone(),
        n,
        y: subset,
        atom: c,
        bottom,
        e,
    })
}

impl Localizer {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn n(&self) -> SetSize {
        self.n
    }

    /// Zero-based points of `Y`, ascending.
    pub fn subset(&self) -> &[usize] {
        &self.y
    }

    pub fn atom(&self) -> LatticeElement {
        self.atom
    }

    pub fn bottom(&self) -> LatticeElement {
        self.bottom
    }

    pub fn idempotent(&self) -> &Correspondence {
        &self.e
    }

    /// `e α e`.
    pub fn localize(&self, alpha: &Correspondence) -> Result<Correspondence> {
        let l = &self.lattice;
        compose_corr(l, &compose_corr(l, &self.e, alpha)?, &self.e)
    }

    /// Maps `α` to the relation on `Y` read off from `e α e`: position `i`
    /// of the result is the `i`-th smallest point of `Y`.
    pub fn project(&self, alpha: &Correspondence) -> Result<Relation> {
        let beta = self.localize(alpha)?;
        let k = self.n.get();
        for x in 0..k {
            for z in 0..k {
                let v = beta.get(x, z);
                let inside = self.y.contains(&x) && self.y.contains(&z);
                let ok = v == self.bottom || (inside && v == self.atom);
                if !ok {
                    return Err(Error::Localizer(format!(
                        "localized cell ({x}, {z}) = {v} breaks the bottom/atom structure"
                    )));
                }
            }
        }
        let local = SetSize::new(LOCAL_SIZE)?;
        let mut pairs = Vec::new();
        for (i, &x) in self.y.iter().enumerate() {
            for (j, &z) in self.y.iter().enumerate() {
                if beta.get(x, z) == self.atom {
                    pairs.push((i, j));
                }
            }
        }
        Relation::from_pairs(local, &pairs)
    }

    /// The correspondence with the atom where `b` holds on `Y × Y`.
    pub fn lift(&self, b: &Relation) -> Result<Correspondence> {
        if b.n().get() != LOCAL_SIZE {
            return Err(Error::SizeMismatch {
                left: LOCAL_SIZE,
                right: b.n().get(),
            });
        }
        let k = self.n.get();
        let mut cells = vec![self.bottom; k * k];
        for (i, &x) in self.y.iter().enumerate() {
            for (j, &z) in self.y.iter().enumerate() {
                if b.get(i, j) {
                    cells[x * k + z] = self.atom;
                }
            }
        }
        Correspondence::new(self.n, cells)
    }
}

/// Outcome of the localization property suite for one [`Localizer`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalizationReport {
    pub idempotent: bool,
    /// Relations on `Y` checked by lift/project round trip (all of them).
    pub roundtrip_checked: usize,
    pub roundtrip_failures: usize,
    pub seed: u64,
    pub samples: usize,
    /// Random pairs where `project` failed to be multiplicative.
    pub hom_failures: usize,
    /// Random localized elements where `lift(project(α')) != α'`.
    pub bijection_failures: usize,
}

impl LocalizationReport {
    pub fn passed(&self) -> bool {
        self.idempotent
            && self.roundtrip_failures == 0
            && self.hom_failures == 0
            && self.bijection_failures == 0
    }
}

const SAMPLE_BLOCKS: usize = 64;

/// Runs the localization suite: idempotency of `e`, exhaustive
/// `project ∘ lift` round trip over all relations on `Y`, and `samples`
/// random pairs (see [`localizer_random_failures`]). Output depends only on
/// `seed` and `samples`.
pub fn check_localizer(loc: &Localizer, seed: u64, samples: usize) -> Result<LocalizationReport> {
    let e = loc.idempotent();
    let idempotent = compose_corr(loc.lattice(), e, e)? == *e;
    let (roundtrip_checked, roundtrip_failures) = localizer_roundtrip_failures(loc)?;
    let (hom_failures, bijection_failures) = localizer_random_failures(loc, seed, samples)?;
    Ok(LocalizationReport {
        idempotent,
        roundtrip_checked,
        roundtrip_failures,
        seed,
        samples,
        hom_failures,
        bijection_failures,
    })
}

/// Checks `project(lift(b)) = b` and `e lift(b) e = lift(b)` for every
/// relation `b` on `Y`. Returns `(checked, failures)`.
pub fn localizer_roundtrip_failures(loc: &Localizer) -> Result<(usize, usize)> {
    use rayon::prelude::*;

    let local = SetSize::new(LOCAL_SIZE)?;
    let failures = (0..local.monoid_order())
        .into_par_iter()
        .map(|bits| -> Result<usize> {
            let b = Relation::from_index(local, bits);
            let lifted = loc.lift(&b)?;
            let ok = loc.localize(&lifted)? == lifted && loc.project(&lifted)? == b;
            Ok(usize::from(!ok))
        })
        .try_reduce(|| 0, |x, y| Ok(x + y))?;
    Ok((local.monoid_order(), failures))
}

/// For `samples` random pairs `α, β` with `α' = eαe`, `β' = eβe`, counts
/// failures of `project(α' β') = project(α') ; project(β')` and of
/// `lift(project(α')) = α'`. Returns `(product failures, bijection failures)`.
pub fn localizer_random_failures(
    loc: &Localizer,
    seed: u64,
    samples: usize,
) -> Result<(usize, usize)> {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rayon::prelude::*;

    let l = loc.lattice();
    let block_len = samples.div_ceil(SAMPLE_BLOCKS).max(1);
    (0..SAMPLE_BLOCKS)
        .into_par_iter()
        .map(|block| -> Result<(usize, usize)> {
            let start = block * block_len;
            let count = samples.saturating_sub(start).min(block_len);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block as u64);
            let mut failures = (0, 0);
            for _ in 0..count {
                let alpha = loc.localize(&Correspondence::random(&mut rng, l, loc.n())?)?;
                let beta = loc.localize(&Correspondence::random(&mut rng, l, loc.n())?)?;
                let product = loc.project(&compose_corr(l, &alpha, &beta)?)?;
                let (pa, pb) = (loc.project(&alpha)?, loc.project(&beta)?);
                if product != pa.compose(&pb)? {
                    failures.0 += 1;
                }
                if loc.lift(&pa)? != alpha {
                    failures.1 += 1;
                }
            }
            Ok(failures)
        })
        .try_reduce(|| (0, 0), |x, y| Ok((x.0 + y.0, x.1 + y.1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolrel::{all_relations, compose};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn size(n: usize) -> SetSize {
        SetSize::new(n).unwrap()
    }

    fn e(id: u8) -> LatticeElement {
        LatticeElement(id)
    }

    fn m3_tables() -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        // 0 bottom, 1 2 3 atoms, 4 top
        let meet = |a: usize, b: usize| match (a, b) {
            _ if a == b => a,
            (4, x) | (x, 4) => x,
            _ => 0,
        };
        let join = |a: usize, b: usize| match (a, b) {
            _ if a == b => a,
            (0, x) | (x, 0) => x,
            _ => 4,
        };
        let t = |op: &dyn Fn(usize, usize) -> usize| {
            (0..5).map(|a| (0..5).map(|b| op(a, b)).collect()).collect()
        };
        (t(&meet), t(&join))
    }

    fn n5_tables() -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        // 0 < 1 < 2 < 4 and 0 < 3 < 4, with 3 incomparable to 1 and 2
        let leq = |a: usize, b: usize| a == b || a == 0 || b == 4 || (a == 1 && b == 2);
        let meet = |a: usize, b: usize| {
            (0..5)
                .filter(|&z| leq(z, a) && leq(z, b))
                .max_by_key(|&z| (0..5).filter(|&w| leq(w, z)).count())
                .unwrap()
        };
        let join = |a: usize, b: usize| {
            (0..5)
                .filter(|&z| leq(a, z) && leq(b, z))
                .min_by_key(|&z| (0..5).filter(|&w| leq(w, z)).count())
                .unwrap()
        };
        let t = |op: &dyn Fn(usize, usize) -> usize| {
            (0..5).map(|a| (0..5).map(|b| op(a, b)).collect()).collect()
        };
        (t(&meet), t(&join))
    }

    #[test]
    fn two_element_chain_accepted() {
        let l = verify_lattice(&[vec![0, 0], vec![0, 1]], &[vec![0, 1], vec![1, 1]]).unwrap();
        assert_eq!(l, build_chain(2).unwrap());
    }

    #[test]
    fn diamond_rejected_with_distributivity_witness() {
        let (meet, join) = m3_tables();
        match verify_lattice(&meet, &join) {
            Err(Error::AxiomViolated { axiom, witness }) => {
                assert_eq!(axiom, "distributivity");
                assert_eq!(witness, vec![1, 2, 3]);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn pentagon_rejected() {
        let (meet, join) = n5_tables();
        let err = verify_lattice(&meet, &join).unwrap_err();
        assert!(
            matches!(
                err,
                Error::AxiomViolated {
                    axiom: "distributivity",
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn malformed_tables_rejected() {
        assert!(verify_lattice(&[vec![0, 0]], &[vec![0, 1]]).is_err());
        assert!(verify_lattice(&[vec![0, 2], vec![0, 1]], &[vec![0, 1], vec![1, 1]]).is_err());
        // join = meet breaks absorption
        let err = verify_lattice(&[vec![0, 0], vec![0, 1]], &[vec![0, 0], vec![0, 1]]).unwrap_err();
        assert!(
            matches!(err, Error::AxiomViolated { axiom, .. } if axiom.starts_with("absorption"))
        );
    }

    #[test]
    fn builders() {
        let b2 = build_boolean(2).unwrap();
        assert_eq!(b2.size(), 4);
        assert_eq!(b2.atoms(), vec![e(1), e(2)]);
        assert_eq!(build_downsets(2, &[]).unwrap(), b2);
        let chain3 = build_downsets(2, &[(0, 1)]).unwrap();
        assert_eq!(chain3, build_chain(3).unwrap());
        assert!(build_downsets(2, &[(0, 1), (1, 0)]).is_err());
        assert!(build_downsets(1, &[(0, 0)]).is_err());
        assert!(build_boolean(5).is_err());
        assert!(build_chain(0).is_err());
    }

    #[test]
    fn bottom_and_atoms() {
        let c3 = build_chain(3).unwrap();
        assert_eq!(c3.bottom(), e(0));
        assert_eq!(c3.top(), e(2));
        assert_eq!(c3.atoms(), vec![e(1)]);
        assert!(build_chain(1).unwrap().atoms().is_empty());
        let d = build_downsets(3, &[(0, 2), (1, 2)]).unwrap();
        assert_eq!(d.atoms().len(), 2);
    }

    #[test]
    fn atom_meet_law() {
        for l in ["chain2", "chain3", "chain5", "boolean2", "boolean3"].map(|s| builtin(s).unwrap())
        {
            let bottom = l.bottom();
            for c in l.atoms() {
                for a in l.elements() {
                    let m = l.meet(c, a);
                    assert!(m == bottom || m == c);
                }
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let l = build_boolean(2).unwrap();
        assert_eq!(Lattice::parse(&l.to_text()).unwrap(), l);
        assert!(Lattice::parse("2\n0 0\n0 1\n0 1\n").is_err());
        let (k, edges) = parse_poset("3\n0 2\n1 2\n").unwrap();
        assert_eq!((k, edges), (3, vec![(0, 2), (1, 2)]));
    }

    #[test]
    fn builtin_names() {
        assert!(builtin("chain1").unwrap().is_trivial());
        assert_eq!(builtin("chain8").unwrap().size(), 8);
        assert_eq!(builtin("boolean4").unwrap().size(), 16);
        assert!(builtin("chain9").is_err());
        assert!(builtin("m3").is_err());
    }

    #[test]
    fn correspondence_text() {
        let c: Correspondence = "2:0,1,2,0".parse().unwrap();
        assert_eq!(c.to_string(), "2:0,1,2,0");
        assert!("2:0,1,2".parse::<Correspondence>().is_err());
        assert!("7:0".parse::<Correspondence>().is_err());
    }

    #[test]
    fn compose_corr_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for l in ["chain3", "boolean2"].map(|s| builtin(s).unwrap()) {
            let n = size(4);
            let id = Correspondence::diagonal(n, l.top(), l.bottom()).unwrap();
            let zero = Correspondence::constant(n, l.bottom()).unwrap();
            for _ in 0..200 {
                let r = Correspondence::random(&mut rng, &l, n).unwrap();
                assert_eq!(compose_corr(&l, &id, &r).unwrap(), r);
                assert_eq!(compose_corr(&l, &r, &id).unwrap(), r);
                assert_eq!(compose_corr(&l, &zero, &r).unwrap(), zero);
            }
        }
    }

    #[test]
    fn compose_corr_errors() {
        let l = build_chain(2).unwrap();
        let a = Correspondence::constant(size(2), e(0)).unwrap();
        let b = Correspondence::constant(size(3), e(0)).unwrap();
        assert!(compose_corr(&l, &a, &b).is_err());
        let bad = Correspondence::constant(size(2), e(5)).unwrap();
        assert!(compose_corr(&l, &a, &bad).is_err());
    }

    #[test]
    fn chain2_agrees_with_relations_at_n2() {
        let l = build_chain(2).unwrap();
        let n = size(2);
        for r in all_relations(n).unwrap() {
            for s in all_relations(n).unwrap() {
                let rc = Correspondence::from_relation(&r, e(1), e(0)).unwrap();
                let sc = Correspondence::from_relation(&s, e(1), e(0)).unwrap();
                let expected =
                    Correspondence::from_relation(&compose(&r, &s).unwrap(), e(1), e(0)).unwrap();
                assert_eq!(compose_corr(&l, &rc, &sc).unwrap(), expected);
            }
        }
    }

    #[test]
    fn localizer_on_chain2_full_subset() {
        let l = build_chain(2).unwrap();
        let loc = make_localizer(&l, size(4), &[0, 1, 2, 3], e(1)).unwrap();
        assert_eq!(
            loc.idempotent(),
            &Correspondence::diagonal(size(4), e(1), e(0)).unwrap()
        );
    }

    #[test]
    fn localizer_idempotency_by_cell_evaluation() {
        // boolean(2), n = 5, Y = first four points, c = {0}
        let l = build_boolean(2).unwrap();
        let loc = make_localizer(&l, size(5), &[0, 1, 2, 3], e(1)).unwrap();
        let ev = loc.idempotent();
        for x in 0..5 {
            for y in 0..5 {
                let joined = (0..5)
                    .map(|z| l.meet(ev.get(x, z), ev.get(z, y)))
                    .fold(l.bottom(), |acc, v| l.join(acc, v));
                let expected = if x == y && x < 4 { e(1) } else { e(0) };
                assert_eq!(joined, expected, "cell ({x}, {y})");
            }
        }
    }

    #[test]
    fn localizer_rejections() {
        let c3 = build_chain(3).unwrap();
        let err = make_localizer(&c3, size(4), &[0, 1, 2, 3], c3.top()).unwrap_err();
        assert!(err.to_string().contains("not an atom"));
        let c1 = build_chain(1).unwrap();
        let err = make_localizer(&c1, size(4), &[0, 1, 2, 3], e(0)).unwrap_err();
        assert!(err.to_string().contains("nontrivial lattice required"));
        assert!(make_localizer(&c3, size(5), &[0, 1, 2], e(1)).is_err());
        assert!(make_localizer(&c3, size(5), &[0, 1, 2, 2], e(1)).is_err());
        assert!(make_localizer(&c3, size(5), &[0, 1, 2, 5], e(1)).is_err());
        assert!(make_localizer(&c3, size(3), &[0, 1, 2, 3], e(1)).is_err());
    }

    #[test]
    fn project_and_lift_basics() {
        let l = build_chain(5).unwrap();
        let loc = make_localizer(&l, size(6), &[5, 1, 3, 0], e(1)).unwrap();
        assert_eq!(loc.subset(), &[0, 1, 3, 5]);
        let four = size(4);
        assert_eq!(
            loc.project(loc.idempotent()).unwrap(),
            Relation::identity(four)
        );
        let zero = Correspondence::constant(size(6), l.bottom()).unwrap();
        assert_eq!(loc.project(&zero).unwrap(), Relation::zero(four));
        assert_eq!(
            loc.lift(&Relation::identity(four)).unwrap(),
            *loc.idempotent()
        );
        assert_eq!(loc.lift(&Relation::zero(four)).unwrap(), zero);
        for b in all_relations(four).unwrap() {
            let lifted = loc.lift(&b).unwrap();
            assert_eq!(loc.localize(&lifted).unwrap(), lifted);
            assert_eq!(loc.project(&lifted).unwrap(), b);
        }
    }

    #[test]
    fn localization_suite_small_run() {
        let l = build_chain(3).unwrap();
        let loc = make_localizer(&l, size(5), &[0, 2, 3, 4], e(1)).unwrap();
        let report = check_localizer(&loc, 11, 500).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.roundtrip_checked, 65536);
        assert_eq!(check_localizer(&loc, 11, 500).unwrap(), report);
    }

    #[test]
    fn project_rejects_broken_structure() {
        // a localizer whose atom field is tampered with no longer matches e
        let l = build_chain(3).unwrap();
        let mut loc = make_localizer(&l, size(4), &[0, 1, 2, 3], e(1)).unwrap();
        loc.atom = e(2);
        assert!(loc
            .project(&Correspondence::constant(size(4), e(2)).unwrap())
            .is_err());
    }
}
