//! Packed binary vectors and matrices.
//!
//! Matrices are stored column-major: every decoder and certifier works one
//! item signature at a time, and the OR of a defective set is a word-wise
//! OR of columns. Row access is still available (O(n) per row).
//!
//! Text formats:
//! * vector: one line of `0`/`1` characters;
//! * matrix: a header line `m n`, then `m` lines of exactly `n` characters.

use std::fmt;

use crate::error::{contract, parse_err, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// Dense binary vector. Bits past `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVec {
            words: vec![!0; words_for(len)],
            len,
        };
        v.clear_tail();
        v
    }

    /// Builds a vector from 0/1 values; any non-zero entry counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        bits.iter().map(|&b| b != 0).collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn push(&mut self, value: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Positions of the 1 bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(wi * WORD + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn hamming_distance(&self, other: &BitVec) -> usize {
        assert_eq!(self.len, other.len, "hamming distance needs equal lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn or_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "OR needs equal lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn complement(&self) -> BitVec {
        let mut v = BitVec {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        v.clear_tail();
        v
    }

    /// `self ≤ other` elementwise, i.e. no position has a 1-0 match.
    pub fn is_covered_by(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "coverage needs equal lengths");
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Subsequence with the positions in `deleted` removed, order preserved.
    pub fn delete_indices(&self, deleted: &[usize]) -> Result<BitVec> {
        let mut sorted = deleted.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            contract!(w[0] != w[1], "duplicate deletion index {}", w[0]);
        }
        if let Some(&last) = sorted.last() {
            contract!(
                last < self.len,
                "deletion index {last} out of range for length {}",
                self.len
            );
        }
        let mut out = BitVec::zeros(self.len - sorted.len());
        let mut next = sorted.iter().peekable();
        let mut o = 0;
        for i in 0..self.len {
            if next.peek() == Some(&&i) {
                next.next();
                continue;
            }
            if self.get(i) {
                out.set(o, true);
            }
            o += 1;
        }
        Ok(out)
    }

    /// Maximal-run decomposition as `(symbol, length)` pairs.
    pub fn runs(&self) -> Vec<(bool, usize)> {
        let mut runs: Vec<(bool, usize)> = Vec::new();
        for b in self.iter() {
            match runs.last_mut() {
                Some((s, n)) if *s == b => *n += 1,
                _ => runs.push((b, 1)),
            }
        }
        runs
    }

    pub fn from_runs(runs: &[(bool, usize)]) -> BitVec {
        let total = runs.iter().map(|r| r.1).sum();
        let mut v = BitVec::zeros(total);
        let mut pos = 0;
        for &(b, n) in runs {
            if b {
                for i in pos..pos + n {
                    v.set(i, true);
                }
            }
            pos += n;
        }
        v
    }

    /// Copy of positions `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        assert!(start <= end && end <= self.len, "slice {start}..{end} out of range");
        (start..end).map(|i| self.get(i)).collect()
    }

    pub fn concat(parts: &[&BitVec]) -> BitVec {
        parts.iter().flat_map(|p| p.iter()).collect()
    }

    /// Copy extended with zeros (or truncated) to `len`.
    pub fn resized(&self, len: usize) -> BitVec {
        let mut out = BitVec::zeros(len);
        for i in 0..len.min(self.len) {
            if self.get(i) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    pub fn parse(text: &str) -> Result<BitVec> {
        let line = text.trim_end_matches(['\n', '\r']);
        line.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(parse_err(1, format!("unexpected character {other:?}"))),
            })
            .collect()
    }

    fn clear_tail(&mut self) {
        let r = self.len % WORD;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }
}

impl FromIterator<bool> for BitVec {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut v = BitVec::default();
        for b in iter {
            v.push(b);
        }
        v
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[{}]", self.to_bit_string())
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

/// Sorted set of item indices drawn from a universe of `n` items.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DefectiveSet {
    indices: Vec<usize>,
    universe: usize,
}

impl DefectiveSet {
    pub fn new(universe: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        if let Some(&last) = indices.last() {
            contract!(last < universe, "item {last} outside universe of {universe}");
        }
        Ok(DefectiveSet { indices, universe })
    }

    pub fn empty(universe: usize) -> Self {
        DefectiveSet {
            indices: Vec::new(),
            universe,
        }
    }

    pub fn full(universe: usize) -> Self {
        DefectiveSet {
            indices: (0..universe).collect(),
            universe,
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, item: usize) -> bool {
        self.indices.binary_search(&item).is_ok()
    }

    pub fn is_subset_of(&self, other: &DefectiveSet) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }
}

/// `m × n` binary matrix; row = pooled test, column = item signature.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    columns: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            columns: vec![BitVec::zeros(rows); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Matrix whose columns are `columns`; all must share one length.
    pub fn from_columns(rows: usize, columns: Vec<BitVec>) -> Result<Self> {
        for (j, c) in columns.iter().enumerate() {
            contract!(
                c.len() == rows,
                "column {j} has length {}, expected {rows}",
                c.len()
            );
        }
        Ok(BitMatrix { rows, columns })
    }

    pub fn from_rows(rows: &[BitVec]) -> Result<Self> {
        let n = rows.first().map_or(0, BitVec::len);
        for (i, r) in rows.iter().enumerate() {
            contract!(r.len() == n, "row {i} has length {}, expected {n}", r.len());
        }
        let mut m = BitMatrix::zeros(rows.len(), n);
        for (i, r) in rows.iter().enumerate() {
            for j in r.support() {
                m.set(i, j, true);
            }
        }
        Ok(m)
    }

    /// Convenience for literal matrices in tests and examples.
    pub fn from_row_bits(rows: &[&[u8]]) -> Result<Self> {
        let rows: Vec<BitVec> = rows.iter().map(|r| BitVec::from_bits(r)).collect();
        BitMatrix::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.columns[c].get(r)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.columns[c].set(r, value);
    }

    pub fn column(&self, c: usize) -> &BitVec {
        &self.columns[c]
    }

    pub fn columns(&self) -> &[BitVec] {
        &self.columns
    }

    pub fn row(&self, r: usize) -> BitVec {
        assert!(r < self.rows, "row {r} out of range");
        self.columns.iter().map(|c| c.get(r)).collect()
    }

    /// OR of the columns in `set`; all-zero for the empty set.
    pub fn or_columns(&self, set: &DefectiveSet) -> Result<BitVec> {
        self.or_of(set.indices())
    }

    pub fn or_of(&self, items: &[usize]) -> Result<BitVec> {
        let mut acc = BitVec::zeros(self.rows);
        for &i in items {
            contract!(i < self.cols(), "column {i} out of range for {} columns", self.cols());
            acc.or_assign(&self.columns[i]);
        }
        Ok(acc)
    }

    /// Rows listed in `indices`, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> BitMatrix {
        let columns = self
            .columns
            .iter()
            .map(|c| indices.iter().map(|&r| c.get(r)).collect())
            .collect();
        BitMatrix {
            rows: indices.len(),
            columns,
        }
    }

    /// Same columns, with the rows in `deleted` removed.
    pub fn delete_rows(&self, deleted: &[usize]) -> Result<BitMatrix> {
        let columns = self
            .columns
            .iter()
            .map(|c| c.delete_indices(deleted))
            .collect::<Result<Vec<_>>>()?;
        Ok(BitMatrix {
            rows: self.rows - deleted.len(),
            columns,
        })
    }

    /// Vertical concatenation of blocks sharing a column count.
    pub fn stack(blocks: &[BitMatrix]) -> Result<BitMatrix> {
        let n = blocks.first().map_or(0, BitMatrix::cols);
        for b in blocks {
            contract!(b.cols() == n, "blocks must share a column count");
        }
        let rows = blocks.iter().map(BitMatrix::rows).sum();
        let columns = (0..n)
            .map(|j| {
                let parts: Vec<&BitVec> = blocks.iter().map(|b| b.column(j)).collect();
                BitVec::concat(&parts)
            })
            .collect();
        Ok(BitMatrix { rows, columns })
    }

    /// First pair of equal columns, if any.
    pub fn duplicate_columns(&self) -> Option<(usize, usize)> {
        let mut seen = std::collections::HashMap::new();
        for (j, c) in self.columns.iter().enumerate() {
            if let Some(&i) = seen.get(c) {
                return Some((i, j));
            }
            seen.insert(c, j);
        }
        None
    }

    pub fn column_weights(&self) -> Vec<usize> {
        self.columns.iter().map(BitVec::weight).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols());
        for r in 0..self.rows {
            s.push_str(&self.row(r).to_bit_string());
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<BitMatrix> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(parse_err(1, "header must be \"m n\""));
        }
        let m: usize = dims[0].parse().map_err(|_| parse_err(1, "bad row count"))?;
        let n: usize = dims[1].parse().map_err(|_| parse_err(1, "bad column count"))?;
        let mut rows = Vec::with_capacity(m);
        for i in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| parse_err(i + 2, "missing matrix row"))?;
            let row = BitVec::parse(line).map_err(|_| parse_err(i + 2, "bad matrix row"))?;
            if row.len() != n {
                return Err(parse_err(
                    i + 2,
                    format!("row has {} entries, expected {n}", row.len()),
                ));
            }
            rows.push(row);
        }
        let mut mat = BitMatrix::zeros(m, n);
        for (i, r) in rows.iter().enumerate() {
            for j in r.support() {
                mat.set(i, j, true);
            }
        }
        Ok(mat)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols())?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(bits: &[u8]) -> BitVec {
        BitVec::from_bits(bits)
    }

    #[test]
    fn or_columns_identity() {
        let a = BitMatrix::identity(3);
        let s = DefectiveSet::new(3, [0, 2]).unwrap();
        assert_eq!(a.or_columns(&s).unwrap(), v(&[1, 0, 1]));
        assert_eq!(a.or_columns(&DefectiveSet::empty(3)).unwrap(), BitVec::zeros(3));
    }

    #[test]
    fn or_columns_worked_saffron_matrix() {
        let a = BitMatrix::from_row_bits(&[&[0, 1, 1], &[1, 0, 1], &[0, 1, 1], &[0, 0, 1]])
            .unwrap();
        let s = DefectiveSet::new(3, [1, 2]).unwrap();
        assert_eq!(a.or_columns(&s).unwrap(), v(&[1, 1, 1, 1]));
    }

    #[test]
    fn or_columns_rejects_out_of_range() {
        let a = BitMatrix::identity(3);
        assert!(a.or_of(&[3]).is_err());
        assert!(DefectiveSet::new(3, [5]).is_err());
    }

    #[test]
    fn delete_indices_examples() {
        assert_eq!(v(&[1, 0, 1, 0]).delete_indices(&[0]).unwrap(), v(&[0, 1, 0]));
        let x = v(&[1, 0, 0, 1, 1]);
        assert_eq!(x.delete_indices(&[]).unwrap(), x);
        assert_eq!(v(&[1, 1, 0]).delete_indices(&[0, 1, 2]).unwrap(), BitVec::zeros(0));
        assert!(x.delete_indices(&[5]).is_err());
        assert!(x.delete_indices(&[1, 1]).is_err());
    }

    #[test]
    fn weight_examples() {
        assert_eq!(v(&[0, 0, 0]).weight(), 0);
        assert_eq!(v(&[1, 0, 1, 1, 0, 1, 1]).weight(), 5);
    }

    #[test]
    fn runs_examples() {
        assert_eq!(
            v(&[0, 0, 1, 1, 1, 0]).runs(),
            vec![(false, 2), (true, 3), (false, 1)]
        );
        assert!(BitVec::zeros(0).runs().is_empty());
        assert_eq!(v(&[1]).runs(), vec![(true, 1)]);
    }

    #[test]
    fn runs_round_trip_exhaustive_to_length_20() {
        for len in 0..=20 {
            for code in 0u32..(1 << len) {
                let x: BitVec = (0..len).map(|i| (code >> i) & 1 == 1).collect();
                let runs = x.runs();
                for w in runs.windows(2) {
                    assert_ne!(w[0].0, w[1].0);
                }
                assert_eq!(BitVec::from_runs(&runs), x);
            }
        }
    }

    #[test]
    fn matrix_text_round_trip() {
        let a = BitMatrix::from_row_bits(&[&[1, 0, 1], &[0, 1, 1]]).unwrap();
        let text = a.to_text();
        assert_eq!(text, "2 3\n101\n011\n");
        assert_eq!(BitMatrix::parse(&text).unwrap(), a);
        assert!(BitMatrix::parse("2 3\n101\n01\n").is_err());
        assert!(BitMatrix::parse("2 3\n101\n").is_err());
        assert!(BitMatrix::parse("2 3\n101\n0a1\n").is_err());
    }

    #[test]
    fn complement_and_coverage() {
        let x = v(&[1, 0, 1, 0, 0]);
        assert_eq!(x.complement(), v(&[0, 1, 0, 1, 1]));
        assert!(x.is_covered_by(&v(&[1, 1, 1, 0, 0])));
        assert!(!x.is_covered_by(&v(&[1, 1, 0, 1, 1])));
    }

    fn bits(max: usize) -> impl Strategy<Value = Vec<u8>> {
        proptest::collection::vec(0u8..=1, 0..max)
    }

    proptest! {
        #[test]
        fn weight_matches_loop(b in bits(200)) {
            let x = BitVec::from_bits(&b);
            prop_assert_eq!(x.weight(), b.iter().filter(|&&v| v == 1).count());
            prop_assert_eq!(x.support().len(), x.weight());
        }

        #[test]
        fn delete_length_contract(b in bits(150), seed in any::<u64>()) {
            let x = BitVec::from_bits(&b);
            let t: Vec<usize> = (0..x.len()).filter(|i| (seed >> (i % 64)) & 1 == 1).collect();
            let y = x.delete_indices(&t).unwrap();
            prop_assert_eq!(y.len(), x.len() - t.len());
            let kept: Vec<bool> = (0..x.len()).filter(|i| !t.contains(i)).map(|i| x.get(i)).collect();
            prop_assert_eq!(y.iter().collect::<Vec<_>>(), kept);
        }

        #[test]
        fn runs_round_trip_long(b in bits(300)) {
            let x = BitVec::from_bits(&b);
            prop_assert_eq!(BitVec::from_runs(&x.runs()), x);
        }

        #[test]
        fn or_matches_entry_loop(
            entries in proptest::collection::vec(0u8..=1, 48),
            mask in 0u8..64,
        ) {
            let rows: Vec<&[u8]> = entries.chunks(6).collect();
            let a = BitMatrix::from_row_bits(&rows).unwrap();
            let set: Vec<usize> = (0..6).filter(|i| (mask >> i) & 1 == 1).collect();
            let got = a.or_of(&set).unwrap();
            for r in 0..8 {
                let expect = set.iter().any(|&c| entries[r * 6 + c] == 1);
                prop_assert_eq!(got.get(r), expect);
            }
        }

        #[test]
        fn or_is_monotone(
            entries in proptest::collection::vec(0u8..=1, 40),
            small in 0u8..32,
            extra in 0u8..32,
        ) {
            let rows: Vec<&[u8]> = entries.chunks(5).collect();
            let a = BitMatrix::from_row_bits(&rows).unwrap();
            let s1: Vec<usize> = (0..5).filter(|i| (small >> i) & 1 == 1).collect();
            let s2: Vec<usize> = (0..5).filter(|i| ((small | extra) >> i) & 1 == 1).collect();
            prop_assert!(a.or_of(&s1).unwrap().is_covered_by(&a.or_of(&s2).unwrap()));
        }
    }
}
