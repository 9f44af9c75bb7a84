//! Binary relations on a finite set `{0, .., n-1}` stored as bit-packed
//! boolean matrices.
//!
//! Bit `i * n + j` of the row-major bit vector is set iff `(i, j)` is in the
//! relation, so row `i` occupies the `n` bits starting at `i * n`. The
//! textual form is `n:hex`, the lowercase hex of the bit vector zero-padded
//! to `ceil(n^2 / 4)` digits (the 4x4 identity is `4:8421`).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest set size supported by composition.
pub const MAX_N: usize = 8;
/// Largest set size for which the whole monoid is enumerated.
pub const MAX_ENUM_N: usize = 4;

/// Cardinality of the underlying set, `1..=8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetSize(u8);

impl SetSize {
    pub fn new(n: usize) -> Result<Self> {
        if (1..=MAX_N).contains(&n) {
            Ok(SetSize(n as u8))
        } else {
            Err(Error::SizeOutOfRange { n, max: MAX_N })
        }
    }

    /// Like [`SetSize::new`] but also enforces the enumeration bound.
    pub fn enumerable(n: usize) -> Result<Self> {
        let size = Self::new(n)?;
        if n > MAX_ENUM_N {
            return Err(Error::EnumerationTooLarge { n });
        }
        Ok(size)
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// Number of matrix cells, `n^2`.
    #[inline]
    pub fn cells(self) -> usize {
        self.get() * self.get()
    }

    /// `n!`
    pub fn factorial(self) -> usize {
        (1..=self.get()).product()
    }

    /// `2^(n^2)`, only meaningful for enumerable sizes.
    pub fn monoid_order(self) -> usize {
        1usize << self.cells()
    }
}

impl fmt::Display for SetSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[inline]
fn cell_mask(cells: usize) -> u64 {
    if cells == 64 {
        u64::MAX
    } else {
        (1u64 << cells) - 1
    }
}

/// An element of the monoid of binary relations on an `n`-element set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation {
    n: SetSize,
    bits: u64,
}

impl Relation {
    pub fn new(n: SetSize, bits: u64) -> Result<Self> {
        let limit = n.cells();
        if bits & !cell_mask(limit) != 0 {
            return Err(Error::StrayBits { bits, limit });
        }
        Ok(Relation { n, bits })
    }

    /// Builds a relation from dense bit-vector indices produced by enumeration.
    ///
    /// # Panics
    /// If `bits` does not fit in `n^2` bits.
    pub fn from_index(n: SetSize, bits: usize) -> Self {
        Self::new(n, bits as u64).expect("index within 2^(n^2)")
    }

    /// Builds a relation from zero-based pairs.
    pub fn from_pairs(n: SetSize, pairs: &[(usize, usize)]) -> Result<Self> {
        let k = n.get();
        let mut bits = 0u64;
        for &(i, j) in pairs {
            if i >= k || j >= k {
                return Err(Error::Parse(format!("pair ({i}, {j}) outside 0..{k}")));
            }
            bits |= 1 << (i * k + j);
        }
        Ok(Relation { n, bits })
    }

    pub fn zero(n: SetSize) -> Self {
        Relation { n, bits: 0 }
    }

    pub fn full(n: SetSize) -> Self {
        Relation {
            n,
            bits: cell_mask(n.cells()),
        }
    }

    pub fn identity(n: SetSize) -> Self {
        let k = n.get();
        let bits = (0..k).fold(0u64, |acc, i| acc | 1 << (i * k + i));
        Relation { n, bits }
    }

    /// The permutation relation `{(i, perm[i])}`.
    pub fn from_permutation(perm: &[usize]) -> Result<Self> {
        let n = SetSize::new(perm.len())?;
        let mut seen = 0u32;
        for &p in perm {
            if p >= perm.len() || seen & (1 << p) != 0 {
                return Err(Error::Parse(format!("{perm:?} is not a permutation")));
            }
            seen |= 1 << p;
        }
        let pairs: Vec<_> = perm.iter().copied().enumerate().collect();
        Self::from_pairs(n, &pairs)
    }

    #[inline]
    pub fn n(&self) -> SetSize {
        self.n
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        let k = self.n.get();
        debug_assert!(i < k && j < k);
        self.bits >> (i * k + j) & 1 == 1
    }

    /// Row `i` as an `n`-bit mask (bit `j` set iff `(i, j)` is present).
    #[inline]
    pub fn row(&self, i: usize) -> u64 {
        let k = self.n.get();
        (self.bits >> (i * k)) & cell_mask(k)
    }

    pub fn rows(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.n.get()).map(|i| self.row(i))
    }

    fn from_rows(n: SetSize, rows: impl IntoIterator<Item = u64>) -> Self {
        let k = n.get();
        let bits = rows
            .into_iter()
            .enumerate()
            .fold(0u64, |acc, (i, row)| acc | row << (i * k));
        Relation { n, bits }
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn compose(&self, other: &Relation) -> Result<Relation> {
        compose(self, other)
    }

    /// True iff `self` is a permutation matrix: exactly one bit in every
    /// row and every column.
    pub fn is_unit(&self) -> bool {
        let k = self.n.get();
        let mut cols = 0u64;
        for row in self.rows() {
            if row.count_ones() != 1 {
                return false;
            }
            cols |= row;
        }
        cols == cell_mask(k)
    }

    /// `u * self * v` where `u` and `v` are the permutation relations of
    /// `left` and `right`: row `i` of the result is row `left[i]` of `self`,
    /// and column `right[j]` of the result is column `j` of `self`.
    pub fn act(&self, left: &[usize], right: &[usize]) -> Relation {
        let k = self.n.get();
        debug_assert_eq!(left.len(), k);
        debug_assert_eq!(right.len(), k);
        let rows = left.iter().map(|&src| {
            let row = self.row(src);
            right
                .iter()
                .enumerate()
                .filter(|&(j, _)| row >> j & 1 == 1)
                .fold(0u64, |acc, (_, &dst)| acc | 1 << dst)
        });
        Relation::from_rows(self.n, rows)
    }

    pub fn transpose(&self) -> Relation {
        let k = self.n.get();
        let mut bits = 0u64;
        for i in 0..k {
            for j in 0..k {
                if self.get(i, j) {
                    bits |= 1 << (j * k + i);
                }
            }
        }
        Relation { n: self.n, bits }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.n.cells().div_ceil(4);
        write!(f, "{}:{:0width$x}", self.n, self.bits, width = width)
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, hex) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in relation {s:?}")))?;
        let n: usize = n
            .parse()
            .map_err(|_| Error::Parse(format!("bad set size in {s:?}")))?;
        let n = SetSize::new(n)?;
        if hex.is_empty() || hex.len() > 16 || hex.bytes().any(|b| b.is_ascii_uppercase()) {
            return Err(Error::Parse(format!("bad hex in {s:?}")));
        }
        let bits =
            u64::from_str_radix(hex, 16).map_err(|_| Error::Parse(format!("bad hex in {s:?}")))?;
        Relation::new(n, bits)
    }
}

/// Relational composition: `(r;s)(i,k)` iff `r(i,j)` and `s(j,k)` for some `j`.
pub fn compose(r: &Relation, s: &Relation) -> Result<Relation> {
    if r.n != s.n {
        return Err(Error::SizeMismatch {
            left: r.n.get(),
            right: s.n.get(),
        });
    }
    Ok(RowTable::new(s).left_compose(r))
}

/// Textbook triple loop. Used as the reference for the table kernels.
pub fn compose_naive(r: &Relation, s: &Relation) -> Result<Relation> {
    if r.n != s.n {
        return Err(Error::SizeMismatch {
            left: r.n.get(),
            right: s.n.get(),
        });
    }
    let k = r.n.get();
    let mut bits = 0u64;
    for i in 0..k {
        for l in 0..k {
            if (0..k).any(|j| r.get(i, j) && s.get(j, l)) {
                bits |= 1 << (i * k + l);
            }
        }
    }
    Ok(Relation { n: r.n, bits })
}

/// OR-combinations of the rows of a fixed right operand, indexed by row
/// bitmask. Composing any left operand against it costs `n` lookups.
#[derive(Debug, Clone)]
pub struct RowTable {
    n: SetSize,
    table: Vec<u64>,
}

impl RowTable {
    pub fn new(right: &Relation) -> Self {
        let k = right.n.get();
        let mut table = vec![0u64; 1 << k];
        for mask in 1usize..1 << k {
            let low = mask.trailing_zeros() as usize;
            table[mask] = table[mask & (mask - 1)] | right.row(low);
        }
        RowTable { n: right.n, table }
    }

    #[inline]
    pub fn left_compose(&self, left: &Relation) -> Relation {
        debug_assert_eq!(left.n, self.n);
        let rows = left.rows().map(|row| self.table[row as usize]);
        Relation::from_rows(self.n, rows)
    }
}

/// Dense kernel for `n <= 4`, where a relation fits in a `u16`.
///
/// For `n = 4` the row table is widened to 256 entries covering two rows at
/// a time, so a product is two lookups.
#[derive(Debug, Clone)]
pub struct DenseKernel {
    n: usize,
    rows: [u16; 16],
    pairs: [u16; 256],
}

impl DenseKernel {
    pub fn new(right: &Relation) -> Self {
        let k = right.n.get();
        assert!(k <= MAX_ENUM_N, "dense kernel requires n <= 4");
        let mut rows = [0u16; 16];
        for mask in 1usize..1 << k {
            let low = mask.trailing_zeros() as usize;
            rows[mask] = rows[mask & (mask - 1)] | right.row(low) as u16;
        }
        let mut pairs = [0u16; 256];
        if k == 4 {
            for (byte, slot) in pairs.iter_mut().enumerate() {
                *slot = rows[byte & 0xf] | rows[byte >> 4] << 4;
            }
        }
        DenseKernel { n: k, rows, pairs }
    }

    /// Bits of `left ; right` for `left` given by its bit vector.
    #[inline(always)]
    pub fn left_compose(&self, left: u16) -> u16 {
        match self.n {
            4 => self.pairs[(left & 0xff) as usize] | self.pairs[(left >> 8) as usize] << 8,
            n => {
                let mask = (1u16 << n) - 1;
                let mut out = 0u16;
                for i in 0..n {
                    out |= self.rows[((left >> (i * n)) & mask) as usize] << (i * n);
                }
                out
            }
        }
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

/// The unit group of `B_n`: the `n!` permutation relations, ascending by bits.
pub fn units(n: SetSize) -> Vec<Relation> {
    let mut out: Vec<Relation> = permutations(n.get())
        .iter()
        .map(|p| Relation::from_permutation(p).expect("valid permutation"))
        .collect();
    out.sort();
    out
}

/// Every relation on an `n`-element set, ascending by bit vector.
pub fn all_relations(n: SetSize) -> Result<impl Iterator<Item = Relation>> {
    if n.get() > MAX_ENUM_N {
        return Err(Error::EnumerationTooLarge { n: n.get() });
    }
    Ok((0..n.monoid_order()).map(move |bits| Relation::from_index(n, bits)))
}
