//! Prime-field codes and deletion-correcting inner codes.
//!
//! Codeword symbols are integer labels `0..q`; the label order is the
//! order used by the ℓ∞ gap. Reed–Solomon codebooks evaluate every
//! polynomial of degree `< K` at the points `0, 1, ..., N-1`.

use std::fmt;

use crate::bitcore::BitVec;
use crate::decoders::greedy_complete;
use crate::error::{contract, parse_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        contract!(p < (1 << 16), "field modulus {p} above the supported 2^16");
        contract!(is_prime(p), "{p} is not prime");
        Ok(PrimeField { p })
    }

    /// Smallest prime strictly greater than `bound`.
    pub fn next_above(bound: u32) -> Result<Self> {
        let mut p = bound + 1;
        while !is_prime(p) {
            p += 1;
        }
        PrimeField::new(p)
    }

    pub fn order(&self) -> u32 {
        self.p
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Horner evaluation; `coeffs[i]` multiplies `x^i`.
    pub fn eval(&self, coeffs: &[u32], x: u32) -> u32 {
        coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Equal-length words over the labels `0..q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    q: u32,
    len: usize,
    words: Vec<Vec<u32>>,
    min_hamming: Option<usize>,
    linf_gap: Option<u32>,
}

impl Codebook {
    /// Codebook whose minimum distance is computed by pairwise scan.
    pub fn new(q: u32, len: usize, words: Vec<Vec<u32>>) -> Result<Self> {
        for (i, w) in words.iter().enumerate() {
            contract!(w.len() == len, "word {i} has length {}, expected {len}", w.len());
            contract!(w.iter().all(|&s| s < q), "word {i} has a label >= {q}");
        }
        let mut cb = Codebook {
            q,
            len,
            words,
            min_hamming: None,
            linf_gap: None,
        };
        cb.min_hamming = cb.recompute_min_hamming();
        Ok(cb)
    }

    pub fn alphabet(&self) -> u32 {
        self.q
    }

    pub fn word_len(&self) -> usize {
        self.len
    }

    pub fn words(&self) -> &[Vec<u32>] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Recorded minimum pairwise Hamming distance (`None` for < 2 words).
    pub fn min_hamming(&self) -> Option<usize> {
        self.min_hamming
    }

    /// Gap certified by [`linf_embed`], if this codebook came from it.
    pub fn linf_gap(&self) -> Option<u32> {
        self.linf_gap
    }

    pub fn recompute_min_hamming(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, a) in self.words.iter().enumerate() {
            for b in &self.words[i + 1..] {
                let d = a.iter().zip(b).filter(|(x, y)| x != y).count();
                best = Some(best.map_or(d, |v| v.min(d)));
            }
        }
        best
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.q, self.len, self.words.len());
        for w in &self.words {
            let line: Vec<String> = w.iter().map(u32::to_string).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Codebook> {
        let mut lines = text.lines();
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing header"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(1, "bad header field")))
            .collect::<Result<_>>()?;
        let [q, len, count] = header[..] else {
            return Err(parse_err(1, "header must be \"q N count\""));
        };
        let mut words = Vec::with_capacity(count);
        for i in 0..count {
            let line = lines.next().ok_or_else(|| parse_err(i + 2, "missing codeword"))?;
            let w: Vec<u32> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| parse_err(i + 2, "bad label")))
                .collect::<Result<_>>()?;
            if w.len() != len {
                return Err(parse_err(i + 2, format!("codeword has {} labels, expected {len}", w.len())));
            }
            words.push(w);
        }
        Codebook::new(q as u32, len, words).map_err(|e| match e {
            Error::Contract(msg) => parse_err(0, msg),
            other => other,
        })
    }
}

/// `[N, K, N−K+1]` Reed–Solomon codebook over `F_p`, all `p^K` messages.
///
/// Message `r` has coefficients given by the base-`p` digits of `r`,
/// least significant first.
pub fn rs_codebook(field: PrimeField, n: usize, k: usize) -> Result<Codebook> {
    let p = field.order();
    contract!(k >= 1, "RS dimension must be at least 1");
    contract!(k <= n, "RS dimension {k} exceeds length {n}");
    contract!(n as u64 <= p as u64, "RS length {n} exceeds field size {p}");
    let count = (p as u64).checked_pow(k as u32).filter(|&c| c <= 1 << 24);
    let count = count.ok_or_else(|| Error::Contract(format!("{p}^{k} codewords is too many")))?;
    let words = (0..count)
        .map(|r| {
            let mut digits = r;
            let coeffs: Vec<u32> = (0..k)
                .map(|_| {
                    let d = (digits % p as u64) as u32;
                    digits /= p as u64;
                    d
                })
                .collect();
            (0..n as u32).map(|x| field.eval(&coeffs, x)).collect()
        })
        .collect();
    Ok(Codebook {
        q: p,
        len: n,
        words,
        min_hamming: (count > 1).then_some(n - k + 1),
        linf_gap: None,
    })
}

/// Scales every label by `delta` into the alphabet of `target`, so any two
/// differing coordinates differ by at least `delta`.
pub fn linf_embed(code: &Codebook, delta: u32, target: PrimeField) -> Result<Codebook> {
    contract!(delta >= 1, "embedding gap must be at least 1");
    contract!(delta < code.q, "embedding gap {delta} must be below the alphabet size {}", code.q);
    contract!(
        target.order() as u64 > delta as u64 * code.q as u64 + 1,
        "target alphabet {} must exceed delta*q + 1 = {}",
        target.order(),
        delta as u64 * code.q as u64 + 1
    );
    let words = code
        .words
        .iter()
        .map(|w| w.iter().map(|&s| s * delta).collect())
        .collect();
    Ok(Codebook {
        q: target.order(),
        len: code.len,
        words,
        min_hamming: code.min_hamming,
        linf_gap: Some(delta),
    })
}

/// True iff every pair of distinct words has at least `d` coordinates
/// whose labels differ by `delta` or more.
pub fn check_linf(code: &Codebook, delta: u32, d: usize) -> Result<bool> {
    contract!(d <= code.len, "d = {d} exceeds word length {}", code.len);
    for (i, a) in code.words.iter().enumerate() {
        for b in &code.words[i + 1..] {
            let far = a.iter().zip(b).filter(|(x, y)| x.abs_diff(**y) >= delta).count();
            if far < d {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Why an inner deletion decoder gave up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerDecodeError {
    /// Received length outside `[N_c − Δ_c, N_c]`.
    Length,
    /// Could not be mapped back to a valid codeword.
    NotACodeword,
    /// More than one codeword explains the received word.
    Ambiguous,
}

impl fmt::Display for InnerDecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InnerDecodeError::Length => "received length out of range",
            InnerDecodeError::NotACodeword => "no codeword",
            InnerDecodeError::Ambiguous => "ambiguous",
        })
    }
}

impl std::error::Error for InnerDecodeError {}

/// Binary code correcting up to [`radius`](DeletionCode::radius) deletions.
///
/// Contract: for every message `msg` and every subsequence `r` of
/// `encode(msg)` with at most `radius()` symbols deleted,
/// `decode(r) == Ok(msg)`.
pub trait DeletionCode: fmt::Debug + Send + Sync {
    fn message_bits(&self) -> usize;
    fn codeword_len(&self) -> usize;
    fn radius(&self) -> usize;
    fn min_hamming_distance(&self) -> usize;
    fn encode(&self, message: u64) -> BitVec;
    fn decode(&self, received: &BitVec) -> std::result::Result<u64, InnerDecodeError>;
    /// Key-value description persisted in scheme metadata.
    fn describe(&self) -> String;
}

/// Distance-boosting binary map applied before bit repetition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterCode {
    /// Message bits unchanged (distance 1).
    Identity,
    /// Systematic shortened Hamming code (distance 3).
    Hamming,
    /// Shortened Hamming code plus overall parity (distance 4).
    ExtendedHamming,
    /// Every bit repeated `r` times (distance `r`).
    Repetition(usize),
}

impl OuterCode {
    /// Cheapest outer map with distance at least `d`.
    pub fn for_distance(d: usize) -> OuterCode {
        match d {
            0 | 1 => OuterCode::Identity,
            2 | 3 => OuterCode::Hamming,
            4 => OuterCode::ExtendedHamming,
            r => OuterCode::Repetition(r),
        }
    }

    pub fn distance(&self) -> usize {
        match self {
            OuterCode::Identity => 1,
            OuterCode::Hamming => 3,
            OuterCode::ExtendedHamming => 4,
            OuterCode::Repetition(r) => *r,
        }
    }

    fn name(&self) -> String {
        match self {
            OuterCode::Identity => "identity".into(),
            OuterCode::Hamming => "hamming".into(),
            OuterCode::ExtendedHamming => "extended-hamming".into(),
            OuterCode::Repetition(r) => format!("repetition{r}"),
        }
    }

    fn from_name(name: &str) -> Option<OuterCode> {
        match name {
            "identity" => Some(OuterCode::Identity),
            "hamming" => Some(OuterCode::Hamming),
            "extended-hamming" => Some(OuterCode::ExtendedHamming),
            other => other
                .strip_prefix("repetition")
                .and_then(|r| r.parse().ok())
                .map(OuterCode::Repetition),
        }
    }

    fn parity_bits(k: usize) -> usize {
        (1..).find(|&r| (1usize << r) - r > k).unwrap()
    }

    /// Syndrome column of message bit `i`: the `i`-th integer that is not
    /// a power of two, starting at 3.
    fn syndrome_columns(k: usize) -> Vec<usize> {
        (3usize..).filter(|c| !c.is_power_of_two()).take(k).collect()
    }

    fn len(&self, k: usize) -> usize {
        match self {
            OuterCode::Identity => k,
            OuterCode::Hamming => k + Self::parity_bits(k),
            OuterCode::ExtendedHamming => k + Self::parity_bits(k) + 1,
            OuterCode::Repetition(r) => k * r,
        }
    }

    fn encode(&self, k: usize, msg: u64) -> Vec<bool> {
        let bits: Vec<bool> = (0..k).map(|i| (msg >> i) & 1 == 1).collect();
        match self {
            OuterCode::Identity => bits,
            OuterCode::Repetition(r) => bits.iter().flat_map(|&b| std::iter::repeat_n(b, *r)).collect(),
            OuterCode::Hamming | OuterCode::ExtendedHamming => {
                let cols = Self::syndrome_columns(k);
                let mut out = bits.clone();
                for j in 0..Self::parity_bits(k) {
                    let parity = bits
                        .iter()
                        .zip(&cols)
                        .filter(|(&b, &c)| b && (c >> j) & 1 == 1)
                        .count()
                        % 2
                        == 1;
                    out.push(parity);
                }
                if *self == OuterCode::ExtendedHamming {
                    let overall = out.iter().filter(|&&b| b).count() % 2 == 1;
                    out.push(overall);
                }
                out
            }
        }
    }

    fn decode(&self, k: usize, word: &[bool]) -> Option<u64> {
        let msg = match self {
            OuterCode::Repetition(r) => (0..k).map(|i| word[i * r]).collect::<Vec<_>>(),
            _ => word[..k].to_vec(),
        };
        let msg = msg
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i));
        (self.encode(k, msg) == word).then_some(msg)
    }
}

/// Outer map followed by repeating every bit `Δ + 1` times.
///
/// Decoding rounds every observed run up to a multiple of `Δ + 1`, which
/// undoes any `≤ Δ` deletions because no run of the codeword is shorter
/// than `Δ + 1`, then inverts the outer map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepetitionDeletionCode {
    message_bits: usize,
    radius: usize,
    outer: OuterCode,
}

impl RepetitionDeletionCode {
    pub fn with_outer(message_bits: usize, radius: usize, outer: OuterCode) -> Result<Self> {
        contract!((1..=63).contains(&message_bits), "message bits must be in 1..=63");
        if let OuterCode::Repetition(r) = outer {
            contract!(r >= 1, "outer repetition factor must be at least 1");
        }
        Ok(RepetitionDeletionCode {
            message_bits,
            radius,
            outer,
        })
    }

    pub fn outer(&self) -> OuterCode {
        self.outer
    }

    /// Parses the output of [`DeletionCode::describe`].
    pub fn from_description(text: &str) -> Result<Self> {
        let mut k = None;
        let mut radius = None;
        let mut outer = None;
        for tok in text.split_whitespace() {
            match tok.split_once('=') {
                Some(("bits", v)) => k = v.parse().ok(),
                Some(("radius", v)) => radius = v.parse().ok(),
                Some(("outer", v)) => outer = OuterCode::from_name(v),
                _ => {}
            }
        }
        match (k, radius, outer) {
            (Some(k), Some(r), Some(o)) => RepetitionDeletionCode::with_outer(k, r, o),
            _ => Err(Error::Contract(format!("bad inner code description {text:?}"))),
        }
    }
}

/// Deletion code of `message_bits` bits correcting `delta` deletions,
/// with Hamming distance at least `pre_distance · (delta + 1)`.
pub fn repetition_deletion_code(
    message_bits: usize,
    delta: usize,
    pre_distance: usize,
) -> Result<RepetitionDeletionCode> {
    contract!(
        delta == 0 || pre_distance >= 3,
        "pre-distance {pre_distance} < 3 cannot separate singleton weights at delta {delta}"
    );
    RepetitionDeletionCode::with_outer(message_bits, delta, OuterCode::for_distance(pre_distance))
}

impl DeletionCode for RepetitionDeletionCode {
    fn message_bits(&self) -> usize {
        self.message_bits
    }

    fn codeword_len(&self) -> usize {
        self.outer.len(self.message_bits) * (self.radius + 1)
    }

    fn radius(&self) -> usize {
        self.radius
    }

    fn min_hamming_distance(&self) -> usize {
        self.outer.distance() * (self.radius + 1)
    }

    fn encode(&self, message: u64) -> BitVec {
        self.outer
            .encode(self.message_bits, message)
            .into_iter()
            .flat_map(|b| std::iter::repeat_n(b, self.radius + 1))
            .collect()
    }

    fn decode(&self, received: &BitVec) -> std::result::Result<u64, InnerDecodeError> {
        let n = self.codeword_len();
        if received.len() > n || received.len() + self.radius < n {
            return Err(InnerDecodeError::Length);
        }
        let full = greedy_complete(received, self.radius);
        if full.len() != n {
            return Err(InnerDecodeError::NotACodeword);
        }
        let step = self.radius + 1;
        let outer_word: Vec<bool> = (0..n / step).map(|i| full.get(i * step)).collect();
        self.outer
            .decode(self.message_bits, &outer_word)
            .ok_or(InnerDecodeError::NotACodeword)
    }

    fn describe(&self) -> String {
        format!(
            "repetition bits={} radius={} outer={}",
            self.message_bits,
            self.radius,
            self.outer.name()
        )
    }
}

/// `a` is a (not necessarily contiguous) subsequence of `b`.
pub fn is_subsequence(a: &BitVec, b: &BitVec) -> bool {
    let mut j = 0;
    for bit in a.iter() {
        while j < b.len() && b.get(j) != bit {
            j += 1;
        }
        if j == b.len() {
            return false;
        }
        j += 1;
    }
    true
}

/// Index of the unique codeword having `received` (cut to `len(c) − Δ`
/// symbols when longer) as a subsequence.
pub fn bruteforce_subsequence_decode(
    codewords: &[BitVec],
    received: &BitVec,
    delta: usize,
) -> std::result::Result<usize, InnerDecodeError> {
    let longest = codewords.iter().map(BitVec::len).max().unwrap_or(0);
    if received.len() + delta < longest {
        return Err(InnerDecodeError::Length);
    }
    let mut found = None;
    for (i, c) in codewords.iter().enumerate() {
        let keep = c.len().saturating_sub(delta).min(received.len());
        let probe = received.slice(0, keep);
        if is_subsequence(&probe, c) {
            if found.is_some() {
                return Err(InnerDecodeError::Ambiguous);
            }
            found = Some(i);
        }
    }
    found.ok_or(InnerDecodeError::NotACodeword)
}

/// Arbitrary binary codebook decoded by subsequence search; message `i`
/// is codeword `i`.
#[derive(Debug, Clone)]
pub struct SubsequenceCodebook {
    codewords: Vec<BitVec>,
    radius: usize,
    min_distance: usize,
}

impl SubsequenceCodebook {
    pub fn new(codewords: Vec<BitVec>, radius: usize) -> Result<Self> {
        contract!(codewords.len() >= 2, "need at least two codewords");
        let len = codewords[0].len();
        contract!(
            codewords.iter().all(|c| c.len() == len),
            "codewords must share one length"
        );
        let mut min_distance = usize::MAX;
        for (i, a) in codewords.iter().enumerate() {
            for b in &codewords[i + 1..] {
                min_distance = min_distance.min(a.hamming_distance(b));
            }
        }
        Ok(SubsequenceCodebook {
            codewords,
            radius,
            min_distance,
        })
    }

    pub fn codewords(&self) -> &[BitVec] {
        &self.codewords
    }
}

impl DeletionCode for SubsequenceCodebook {
    fn message_bits(&self) -> usize {
        (usize::BITS - (self.codewords.len() - 1).leading_zeros()) as usize
    }

    fn codeword_len(&self) -> usize {
        self.codewords[0].len()
    }

    fn radius(&self) -> usize {
        self.radius
    }

    fn min_hamming_distance(&self) -> usize {
        self.min_distance
    }

    fn encode(&self, message: u64) -> BitVec {
        self.codewords[message as usize].clone()
    }

    fn decode(&self, received: &BitVec) -> std::result::Result<u64, InnerDecodeError> {
        if received.len() > self.codeword_len() {
            return Err(InnerDecodeError::Length);
        }
        bruteforce_subsequence_decode(&self.codewords, received, self.radius).map(|i| i as u64)
    }

    fn describe(&self) -> String {
        format!(
            "subsequence count={} len={} radius={}",
            self.codewords.len(),
            self.codeword_len(),
            self.radius
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::Combinations;

    fn pairwise_min(code: &Codebook) -> usize {
        let mut best = usize::MAX;
        for a in code.words() {
            for b in code.words() {
                if a != b {
                    best = best.min(a.iter().zip(b).filter(|(x, y)| x != y).count());
                }
            }
        }
        best
    }

    #[test]
    fn field_construction() {
        assert!(PrimeField::new(7).is_ok());
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(65_537).is_err());
        assert_eq!(PrimeField::next_above(6).unwrap().order(), 7);
        assert_eq!(PrimeField::next_above(11).unwrap().order(), 13);
        let f = PrimeField::new(5).unwrap();
        assert_eq!(f.eval(&[1, 2, 3], 2), (1 + 4 + 12) % 5);
    }

    #[test]
    fn rs_examples() {
        let f5 = PrimeField::new(5).unwrap();
        let c = rs_codebook(f5, 4, 2).unwrap();
        assert_eq!(c.len(), 25);
        assert_eq!(c.min_hamming(), Some(3));
        assert_eq!(pairwise_min(&c), 3);
        assert_eq!(c.recompute_min_hamming(), Some(3));

        let f3 = PrimeField::new(3).unwrap();
        let c = rs_codebook(f3, 3, 2).unwrap();
        assert_eq!(c.len(), 9);
        assert_eq!(pairwise_min(&c), 2);

        let c = rs_codebook(f5, 4, 1).unwrap();
        assert!(c.words().iter().all(|w| w.iter().all(|&s| s == w[0])));
        assert_eq!(pairwise_min(&c), 4);

        assert!(rs_codebook(f3, 4, 2).is_err());
        assert!(rs_codebook(f5, 2, 3).is_err());
    }

    #[test]
    fn rs_is_mds_for_small_fields() {
        for p in [2u32, 3, 5, 7] {
            let f = PrimeField::new(p).unwrap();
            for n in 1..=p as usize {
                for k in 1..=n.min(3) {
                    let c = rs_codebook(f, n, k).unwrap();
                    if c.len() > 1 {
                        assert_eq!(pairwise_min(&c), n - k + 1, "p={p} n={n} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn linf_embedding_properties() {
        let f5 = PrimeField::new(5).unwrap();
        let f11 = PrimeField::new(11).unwrap();
        let rs = rs_codebook(f5, 4, 2).unwrap();

        let same = linf_embed(&rs, 1, f11).unwrap();
        assert_eq!(same.words(), rs.words());
        assert_eq!(same.alphabet(), 11);

        let f13 = PrimeField::new(13).unwrap();
        let e2 = linf_embed(&rs, 2, f13).unwrap();
        // every differing coordinate is at least 2 apart
        for a in e2.words() {
            for b in e2.words() {
                for (x, y) in a.iter().zip(b) {
                    assert!(x == y || x.abs_diff(*y) >= 2);
                }
            }
        }
        assert_eq!(pairwise_min(&e2), 3);
        assert!(check_linf(&e2, 2, 3).unwrap());

        let f3 = PrimeField::new(3).unwrap();
        let constant = rs_codebook(f3, 3, 1).unwrap();
        let e3 = linf_embed(&constant, 2, f11).unwrap();
        assert!(check_linf(&e3, 2, 3).unwrap());
        let e3 = linf_embed(&constant, 3, f11).unwrap_err();
        assert!(matches!(e3, Error::Contract(_)));
        let e3 = linf_embed(&constant, 2, f11).unwrap();
        assert_eq!(e3.linf_gap(), Some(2));

        // target must exceed delta*q + 1, and delta must stay below q
        assert!(linf_embed(&rs, 2, f11).is_err());
        assert!(linf_embed(&rs, 2, PrimeField::new(7).unwrap()).is_err());
        assert!(linf_embed(&rs, 0, f11).is_err());
        assert!(linf_embed(&rs, 5, PrimeField::new(29).unwrap()).is_err());
    }

    #[test]
    fn embedding_preserves_hamming_for_all_small_codes() {
        for p in [2u32, 3, 5] {
            let f = PrimeField::new(p).unwrap();
            for n in 2..=p as usize {
                let c = rs_codebook(f, n, 1.max(n - 1)).unwrap();
                for delta in 1..p {
                    let t = PrimeField::next_above(delta * p + 1).unwrap();
                    let e = linf_embed(&c, delta, t).unwrap();
                    for (i, a) in c.words().iter().enumerate() {
                        for (j, b) in c.words().iter().enumerate() {
                            let d0 = a.iter().zip(b).filter(|(x, y)| x != y).count();
                            let (ea, eb) = (&e.words()[i], &e.words()[j]);
                            let d1 = ea.iter().zip(eb).filter(|(x, y)| x != y).count();
                            assert_eq!(d0, d1);
                        }
                    }
                    assert!(check_linf(&e, delta, c.min_hamming().unwrap()).unwrap());
                }
            }
        }
    }

    #[test]
    fn check_linf_unembedded_rs() {
        let rs = rs_codebook(PrimeField::new(5).unwrap(), 4, 2).unwrap();
        assert!(check_linf(&rs, 0, 0).unwrap());
        assert!(check_linf(&rs, 1, 3).unwrap());
        // Exhaustive scan: polynomials a + bx and a + (b+1)x differ by 1 at
        // x = 1, so the gap-2 condition can hold on at most 3 coordinates.
        let counted = {
            let mut worst = usize::MAX;
            for a in rs.words() {
                for b in rs.words() {
                    if a != b {
                        worst = worst.min(a.iter().zip(b).filter(|(x, y)| x.abs_diff(**y) >= 2).count());
                    }
                }
            }
            worst
        };
        assert_eq!(check_linf(&rs, 2, 3).unwrap(), counted >= 3);
        assert!(check_linf(&rs, 1, 5).is_err());
    }

    #[test]
    fn codebook_text_round_trip() {
        let rs = rs_codebook(PrimeField::new(3).unwrap(), 3, 2).unwrap();
        let text = rs.to_text();
        assert!(text.starts_with("3 3 9\n0 0 0\n"));
        let back = Codebook::parse(&text).unwrap();
        assert_eq!(back.words(), rs.words());
        assert_eq!(back.min_hamming(), Some(2));
        assert!(Codebook::parse("3 3 2\n0 1 2\n").is_err());
        assert!(Codebook::parse("3 3 1\n0 1 5\n").is_err());
    }

    #[test]
    fn outer_codes_meet_their_distance() {
        for k in 1..=8usize {
            for outer in [
                OuterCode::Identity,
                OuterCode::Hamming,
                OuterCode::ExtendedHamming,
                OuterCode::Repetition(5),
            ] {
                let words: Vec<Vec<bool>> = (0..1u64 << k).map(|m| outer.encode(k, m)).collect();
                let mut best = usize::MAX;
                for (i, a) in words.iter().enumerate() {
                    assert_eq!(a.len(), outer.len(k));
                    assert_eq!(outer.decode(k, a), Some(i as u64));
                    for b in &words[i + 1..] {
                        best = best.min(a.iter().zip(b).filter(|(x, y)| x != y).count());
                    }
                }
                if k > 1 || outer != OuterCode::Identity {
                    assert!(best >= outer.distance(), "{outer:?} k={k}: {best}");
                }
            }
        }
    }

    fn assert_corrects_all(code: &dyn DeletionCode) {
        let n = code.codeword_len();
        for msg in 0..1u64 << code.message_bits() {
            let c = code.encode(msg);
            assert_eq!(c.len(), n);
            for d in 0..=code.radius() {
                for t in Combinations::new(n, d) {
                    let r = c.delete_indices(&t).unwrap();
                    assert_eq!(code.decode(&r), Ok(msg), "msg={msg} deleted={t:?}");
                }
            }
        }
    }

    #[test]
    fn repetition_code_examples() {
        let code = RepetitionDeletionCode::with_outer(3, 1, OuterCode::Identity).unwrap();
        let msg = 0b101;
        let c = code.encode(msg);
        assert_eq!(c.to_bit_string(), "110011");
        for i in 0..6 {
            assert_eq!(code.decode(&c.delete_indices(&[i]).unwrap()), Ok(msg));
        }
        let plain = RepetitionDeletionCode::with_outer(4, 0, OuterCode::Identity).unwrap();
        for m in 0..16 {
            assert_eq!(plain.encode(m).len(), 4);
            assert_eq!(plain.decode(&plain.encode(m)), Ok(m));
        }
        assert_eq!(code.decode(&BitVec::zeros(3)), Err(InnerDecodeError::Length));
    }

    #[test]
    fn repetition_code_corrects_exhaustively() {
        let k4d2 = repetition_deletion_code(4, 2, 3).unwrap();
        assert_corrects_all(&k4d2);
        assert_corrects_all(&RepetitionDeletionCode::with_outer(4, 2, OuterCode::Identity).unwrap());
        assert_corrects_all(&repetition_deletion_code(3, 1, 4).unwrap());
        assert_corrects_all(&repetition_deletion_code(2, 2, 5).unwrap());
    }

    #[test]
    fn repetition_code_distance_is_exact_lower_bound() {
        for (k, d, pre) in [(4, 1, 3), (4, 2, 3), (3, 1, 4), (5, 2, 5)] {
            let code = repetition_deletion_code(k, d, pre).unwrap();
            let words: Vec<BitVec> = (0..1u64 << k).map(|m| code.encode(m)).collect();
            let sub = SubsequenceCodebook::new(words, d).unwrap();
            assert!(sub.min_hamming_distance() >= code.min_hamming_distance());
            assert!(code.min_hamming_distance() >= pre * (d + 1));
            assert!(code.min_hamming_distance() > 3 * d);
        }
        assert!(repetition_deletion_code(4, 1, 2).is_err());
        assert!(repetition_deletion_code(4, 0, 1).is_ok());
    }

    #[test]
    fn description_round_trip() {
        let code = repetition_deletion_code(6, 1, 4).unwrap();
        let back = RepetitionDeletionCode::from_description(&code.describe()).unwrap();
        assert_eq!(back, code);
        assert!(RepetitionDeletionCode::from_description("repetition bits=3").is_err());
    }

    #[test]
    fn subsequence_decode_examples() {
        let code = RepetitionDeletionCode::with_outer(2, 1, OuterCode::Identity).unwrap();
        let words: Vec<BitVec> = (0..4).map(|m| code.encode(m)).collect();
        for (i, w) in words.iter().enumerate() {
            let prefix = w.slice(0, w.len() - 1);
            assert_eq!(bruteforce_subsequence_decode(&words, &prefix, 1), Ok(i));
        }
        let two = vec![BitVec::from_bits(&[0, 0, 1, 0]), BitVec::from_bits(&[0, 1, 0, 0])];
        assert_eq!(
            bruteforce_subsequence_decode(&two, &BitVec::zeros(3), 1),
            Err(InnerDecodeError::Ambiguous)
        );
        assert_eq!(
            bruteforce_subsequence_decode(&two, &BitVec::ones(3), 1),
            Err(InnerDecodeError::NotACodeword)
        );
    }

    #[test]
    fn subsequence_decode_never_wrong_on_far_codebooks() {
        // Hamming distance 6 > 3Δ for Δ = 1
        let code = repetition_deletion_code(4, 1, 3).unwrap();
        let words: Vec<BitVec> = (0..16).map(|m| code.encode(m)).collect();
        let book = SubsequenceCodebook::new(words.clone(), 1).unwrap();
        assert!(book.min_hamming_distance() > 3);
        for (i, w) in words.iter().enumerate() {
            for d in 0..=1 {
                for t in Combinations::new(w.len(), d) {
                    let r = w.delete_indices(&t).unwrap();
                    assert_eq!(bruteforce_subsequence_decode(&words, &r, 1), Ok(i));
                }
            }
        }
        assert_corrects_all(&book);
    }
}
