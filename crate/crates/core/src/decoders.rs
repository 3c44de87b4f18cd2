//! Recovery algorithms for every scheme family.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::bitcore::{BitMatrix, BitVec, DefectiveSet};
use crate::combinatorics::binomial;
use crate::constructions::{SchemeAux, TestingScheme};
use crate::distances::{check_coverage, CoverageBudget};
use crate::error::{contract, parse_err, Error, Result};
use crate::gfcodes::InnerDecodeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecodeStatus {
    Exact,
    Failed,
    Ambiguous,
}

impl DecodeStatus {
    pub fn name(&self) -> &'static str {
        match self {
            DecodeStatus::Exact => "exact",
            DecodeStatus::Failed => "failed",
            DecodeStatus::Ambiguous => "ambiguous",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub coverage_calls: usize,
    pub deletion_sets_tried: u128,
    pub blocks_decoded: usize,
    pub blocks_rejected: usize,
    pub blocks_ambiguous: usize,
    pub blocks_undecodable: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub recovered: DefectiveSet,
    pub status: DecodeStatus,
    pub diagnostics: Diagnostics,
}

impl DecodeResult {
    fn exact(recovered: DefectiveSet, diagnostics: Diagnostics) -> Self {
        DecodeResult {
            recovered,
            status: DecodeStatus::Exact,
            diagnostics,
        }
    }

    fn failed(universe: usize, diagnostics: Diagnostics) -> Self {
        DecodeResult {
            recovered: DefectiveSet::empty(universe),
            status: DecodeStatus::Failed,
            diagnostics,
        }
    }

    /// `status item1 item2 ...`
    pub fn to_line(&self) -> String {
        let mut s = self.status.name().to_string();
        for i in self.recovered.indices() {
            s.push(' ');
            s.push_str(&i.to_string());
        }
        s
    }

    /// Inverse of [`to_line`](Self::to_line) over a universe of `n` items.
    pub fn parse_line(line: &str, n: usize) -> Result<(DecodeStatus, DefectiveSet)> {
        let mut toks = line.split_whitespace();
        let status = match toks.next() {
            Some("exact") => DecodeStatus::Exact,
            Some("failed") => DecodeStatus::Failed,
            Some("ambiguous") => DecodeStatus::Ambiguous,
            _ => return Err(parse_err(1, "unknown decode status")),
        };
        let items: Vec<usize> = toks
            .map(|t| t.parse().map_err(|_| parse_err(1, format!("bad item {t:?}"))))
            .collect::<Result<_>>()?;
        Ok((status, DefectiveSet::new(n, items)?))
    }
}

impl fmt::Display for DecodeResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

fn check_received_len(m: usize, got: usize, delta: usize) -> Result<()> {
    contract!(
        got <= m && got + delta >= m,
        "received length {got} outside [{}, {m}]",
        m.saturating_sub(delta)
    );
    Ok(())
}

/// Drops every item that appears in a negative test.
pub fn disjunct_decode(b: &BitMatrix, y: &BitVec) -> Result<DefectiveSet> {
    contract!(y.len() == b.rows(), "outcome length {} != {} tests", y.len(), b.rows());
    // an item survives iff none of its tests came back negative
    let keep = b
        .columns()
        .iter()
        .enumerate()
        .filter(|(_, col)| col.is_covered_by(y))
        .map(|(j, _)| j);
    DefectiveSet::new(b.cols(), keep)
}

/// Rounds every run up to the next multiple of `Δ + 1` (exact multiples
/// stay as they are).
pub fn greedy_complete(received: &BitVec, delta: usize) -> BitVec {
    let block = delta + 1;
    let runs: Vec<(bool, usize)> = received
        .runs()
        .into_iter()
        .map(|(b, len)| (b, len.div_ceil(block) * block))
        .collect();
    BitVec::from_runs(&runs)
}

/// Run rounding, one outcome per block, then [`disjunct_decode`] on the
/// base matrix.
pub fn repetition_decode(scheme: &TestingScheme, received: &BitVec, delta: usize) -> Result<DecodeResult> {
    let start = Instant::now();
    let SchemeAux::Repetition { base } = scheme.aux() else {
        return Err(Error::Contract(format!("repetition decoder given a {} scheme", scheme.kind())));
    };
    contract!(
        delta == scheme.delta(),
        "budget {delta} differs from the scheme's {}",
        scheme.delta()
    );
    let m = scheme.rows();
    check_received_len(m, received.len(), delta)?;
    let full = greedy_complete(received, delta);
    let mut diag = Diagnostics::default();
    if full.len() != m {
        diag.elapsed = start.elapsed();
        return Ok(DecodeResult::failed(scheme.items(), diag));
    }
    let y: BitVec = (0..base.rows()).map(|j| full.get(j * (delta + 1))).collect();
    let recovered = disjunct_decode(base, &y)?;
    diag.elapsed = start.elapsed();
    Ok(DecodeResult::exact(recovered, diag))
}

/// `col` with some `s = m − len(received)` entries removed can be covered by
/// `received`. Tries every deletion set in lexicographic order.
///
/// For a sorted set `t_0 < … < t_{s−1}`, output positions in
/// `[t_{r−1} − r + 1, t_r − r)` read `col[i + r]`, so coverage reduces to
/// `s + 1` range queries on prefix sums of the shifted violations
/// `col[i + r] ∧ ¬received[i]`.
struct ShiftedViolations {
    /// `prefix[r][i]` counts violations at shift `r` among outputs `0..i`.
    prefix: Vec<Vec<u32>>,
}

impl ShiftedViolations {
    fn new(col: &BitVec, received: &BitVec) -> Self {
        let len = received.len();
        let s = col.len() - len;
        let prefix = (0..=s)
            .map(|r| {
                let mut acc = vec![0u32; len + 1];
                for i in 0..len {
                    let bad = col.get(i + r) && !received.get(i);
                    acc[i + 1] = acc[i] + bad as u32;
                }
                acc
            })
            .collect();
        ShiftedViolations { prefix }
    }

    fn clean(&self, r: usize, lo: usize, hi: usize) -> bool {
        lo >= hi || self.prefix[r][hi] == self.prefix[r][lo]
    }

    /// Returns whether some deletion set works and how many sets were tried.
    fn search(&self, m: usize) -> (bool, u128) {
        let s = self.prefix.len() - 1;
        let len = m - s;
        let mut t: Vec<usize> = (0..s).collect();
        let mut tried = 0u128;
        loop {
            tried += 1;
            let mut ok = true;
            let mut lo = 0;
            for (r, &tr) in t.iter().enumerate() {
                let hi = tr - r;
                if !self.clean(r, lo, hi) {
                    ok = false;
                    break;
                }
                lo = hi;
            }
            if ok && self.clean(s, lo, len) {
                return (true, tried);
            }
            // next combination
            let mut i = s;
            loop {
                if i == 0 {
                    return (false, tried);
                }
                i -= 1;
                if t[i] < m - s + i {
                    t[i] += 1;
                    for j in i + 1..s {
                        t[j] = t[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
}

/// Keeps item `j` iff some way of deleting `m − len(received)` entries of
/// column `j` leaves a vector covered by `received`.
///
/// `cap` bounds the number of deletion sets per column.
pub fn bruteforce_dd_decode(a: &BitMatrix, received: &BitVec, delta: usize, cap: u128) -> Result<DecodeResult> {
    let start = Instant::now();
    let m = a.rows();
    check_received_len(m, received.len(), delta)?;
    let sets = binomial(m, m - received.len());
    if sets > cap {
        return Err(Error::Infeasible { work: sets, cap });
    }
    let outcomes: Vec<(bool, u128)> = a
        .columns()
        .par_iter()
        .map(|col| ShiftedViolations::new(col, received).search(m))
        .collect();
    let keep = outcomes.iter().enumerate().filter(|(_, o)| o.0).map(|(j, _)| j);
    let recovered = DefectiveSet::new(a.cols(), keep)?;
    let diag = Diagnostics {
        deletion_sets_tried: outcomes.iter().map(|o| o.1).sum(),
        elapsed: start.elapsed(),
        ..Diagnostics::default()
    };
    Ok(DecodeResult::exact(recovered, diag))
}

/// Keeps item `j` iff `check_coverage(received, A_j, Δ)`.
pub fn coverage_decode(a: &BitMatrix, received: &BitVec, delta: usize) -> Result<DecodeResult> {
    let start = Instant::now();
    check_received_len(a.rows(), received.len(), delta)?;
    let keep: Vec<bool> = a
        .columns()
        .par_iter()
        .map(|col| check_coverage(received, col, CoverageBudget(delta)))
        .collect::<Result<_>>()?;
    let recovered = DefectiveSet::new(a.cols(), keep.iter().enumerate().filter(|(_, &k)| k).map(|(j, _)| j))?;
    let diag = Diagnostics {
        coverage_calls: a.cols(),
        elapsed: start.elapsed(),
        ..Diagnostics::default()
    };
    Ok(DecodeResult::exact(recovered, diag))
}

/// Which part of an accepted block is handed to the inner decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SingletonPrefix {
    /// The first `h/2 − Δ` entries, always a `≤ Δ`-deletion subsequence
    /// of the block's codeword.
    #[default]
    Definite,
    /// The first `h/2` entries.
    Half,
}

/// A block is treated as a singleton iff its weight lies in
/// `[h/2 − Δ, h/2 + Δ]`.
pub fn singleton_weight_accepts(weight: usize, h: usize, delta: usize) -> bool {
    let half = h / 2;
    weight > 0 && weight + delta >= half && weight <= half + delta
}

/// Weights of the `h`-high blocks of `received` zero-padded to `m`.
pub fn block_weights(received: &BitVec, m: usize, h: usize) -> Vec<usize> {
    let padded = received.resized(m);
    (0..m / h).map(|j| padded.slice(j * h, (j + 1) * h).weight()).collect()
}

pub fn singleton_decode(scheme: &TestingScheme, received: &BitVec, delta: usize) -> Result<DecodeResult> {
    singleton_decode_with(scheme, received, delta, SingletonPrefix::Definite)
}

/// Pads to `m`, cuts into blocks, inner-decodes every block that passes
/// [`singleton_weight_accepts`], and returns the union of decoded items.
pub fn singleton_decode_with(
    scheme: &TestingScheme,
    received: &BitVec,
    delta: usize,
    prefix: SingletonPrefix,
) -> Result<DecodeResult> {
    let start = Instant::now();
    let SchemeAux::Saffron { signatures, inner, .. } = scheme.aux() else {
        return Err(Error::Contract(format!("singleton decoder given a {} scheme", scheme.kind())));
    };
    contract!(
        inner.min_hamming_distance() > 3 * delta,
        "inner distance {} must exceed 3*delta = {}",
        inner.min_hamming_distance(),
        3 * delta
    );
    let m = scheme.rows();
    let n = scheme.items();
    let h = signatures.rows();
    check_received_len(m, received.len(), delta)?;
    let padded = received.resized(m);
    let take = match prefix {
        SingletonPrefix::Definite => h / 2 - delta,
        SingletonPrefix::Half => h / 2,
    };
    let decoded: Vec<Option<std::result::Result<u64, InnerDecodeError>>> = (0..m / h)
        .into_par_iter()
        .map(|j| {
            let block = padded.slice(j * h, (j + 1) * h);
            singleton_weight_accepts(block.weight(), h, delta)
                .then(|| inner.decode(&block.slice(0, take)))
        })
        .collect();
    let mut diag = Diagnostics::default();
    let mut items = Vec::new();
    for d in decoded {
        match d {
            None => diag.blocks_rejected += 1,
            Some(Ok(u)) if (u as u128) < n as u128 => {
                diag.blocks_decoded += 1;
                items.push(u as usize);
            }
            Some(Ok(_)) | Some(Err(InnerDecodeError::NotACodeword)) | Some(Err(InnerDecodeError::Length)) => {
                diag.blocks_undecodable += 1
            }
            Some(Err(InnerDecodeError::Ambiguous)) => diag.blocks_ambiguous += 1,
        }
    }
    diag.elapsed = start.elapsed();
    if items.is_empty() {
        return Ok(DecodeResult::failed(n, diag));
    }
    Ok(DecodeResult::exact(DefectiveSet::new(n, items)?, diag))
}
