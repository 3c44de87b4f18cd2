//! Testing-matrix families and their decoder metadata.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::bitcore::{BitMatrix, BitVec};
use crate::error::{contract, parse_err, Result};
use crate::gfcodes::{check_linf, Codebook, DeletionCode, RepetitionDeletionCode};
use crate::rng::SeededRng;

/// Resampling attempts before a Bernoulli matrix with duplicate columns is
/// returned anyway.
const MAX_RESAMPLES: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Repetition,
    Bernoulli,
    PaddedKs,
    Saffron,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Repetition => "repetition",
            SchemeKind::Bernoulli => "bernoulli",
            SchemeKind::PaddedKs => "padded-ks",
            SchemeKind::Saffron => "saffron",
        }
    }

    pub fn from_name(name: &str) -> Option<SchemeKind> {
        match name {
            "repetition" => Some(SchemeKind::Repetition),
            "bernoulli" => Some(SchemeKind::Bernoulli),
            "padded-ks" => Some(SchemeKind::PaddedKs),
            "saffron" => Some(SchemeKind::Saffron),
            _ => None,
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Kind-specific construction data.
#[derive(Debug, Clone)]
pub enum SchemeAux {
    Repetition {
        base: BitMatrix,
    },
    Bernoulli {
        scale: f64,
        /// Seed that produced the final matrix (differs from the requested
        /// seed after duplicate-column resampling).
        seed: u64,
    },
    PaddedKs {
        codebook: Codebook,
        d: usize,
        k_max: usize,
    },
    Saffron {
        /// `M × n`; entry `(j, i)` is the edge between right node `j` and item `i`.
        adjacency: BitMatrix,
        /// `h × n`; column `i` is the signature of item `i`.
        signatures: BitMatrix,
        inner: Arc<dyn DeletionCode>,
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone)]
pub struct TestingScheme {
    matrix: BitMatrix,
    k: usize,
    delta: usize,
    aux: SchemeAux,
}

impl TestingScheme {
    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn kind(&self) -> SchemeKind {
        match self.aux {
            SchemeAux::Repetition { .. } => SchemeKind::Repetition,
            SchemeAux::Bernoulli { .. } => SchemeKind::Bernoulli,
            SchemeAux::PaddedKs { .. } => SchemeKind::PaddedKs,
            SchemeAux::Saffron { .. } => SchemeKind::Saffron,
        }
    }

    pub fn aux(&self) -> &SchemeAux {
        &self.aux
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn items(&self) -> usize {
        self.matrix.cols()
    }

    /// Same design, different sparsity. Padded Kautz–Singleton schemes
    /// refuse `k` above their certified maximum.
    pub fn with_sparsity(mut self, k: usize) -> Result<Self> {
        if let SchemeAux::PaddedKs { k_max, .. } = self.aux {
            contract!(k <= k_max, "k = {k} exceeds certified k_max = {k_max}");
        }
        self.k = k;
        Ok(self)
    }

    /// Block height of a SAFFRON scheme.
    pub fn block_height(&self) -> Option<usize> {
        match &self.aux {
            SchemeAux::Saffron { signatures, .. } => Some(signatures.rows()),
            _ => None,
        }
    }

    /// Writes `<stem>.matrix`, `<stem>.meta` and, for padded Kautz–Singleton
    /// schemes, `<stem>.codebook`. Returns the metadata path.
    pub fn save(&self, stem: &Path) -> std::io::Result<PathBuf> {
        let matrix_path = stem.with_extension("matrix");
        let meta_path = stem.with_extension("meta");
        fs::write(&matrix_path, self.matrix.to_text())?;
        let mut meta = vec![
            ("kind".to_string(), self.kind().name().to_string()),
            ("n".into(), self.items().to_string()),
            ("m".into(), self.rows().to_string()),
            ("k".into(), self.k.to_string()),
            ("delta".into(), self.delta.to_string()),
            ("matrix".into(), file_name(&matrix_path)),
        ];
        match &self.aux {
            SchemeAux::Repetition { base } => {
                meta.push(("block".into(), (self.delta + 1).to_string()));
                meta.push(("base_rows".into(), base.rows().to_string()));
            }
            SchemeAux::Bernoulli { scale, seed } => {
                meta.push(("scale".into(), scale.to_string()));
                meta.push(("seed".into(), seed.to_string()));
            }
            SchemeAux::PaddedKs { codebook, d, k_max } => {
                let cb_path = stem.with_extension("codebook");
                fs::write(&cb_path, codebook.to_text())?;
                meta.push(("block".into(), (codebook.alphabet() as usize + self.delta).to_string()));
                meta.push(("q".into(), codebook.alphabet().to_string()));
                meta.push(("d".into(), d.to_string()));
                meta.push(("k_max".into(), k_max.to_string()));
                meta.push(("codebook".into(), file_name(&cb_path)));
            }
            SchemeAux::Saffron {
                adjacency,
                signatures,
                inner,
                seed,
            } => {
                meta.push(("block".into(), signatures.rows().to_string()));
                meta.push(("right_nodes".into(), adjacency.rows().to_string()));
                if let Some(seed) = seed {
                    meta.push(("seed".into(), seed.to_string()));
                }
                meta.push(("inner".into(), inner.describe()));
            }
        }
        let text: String = meta.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        fs::write(&meta_path, text)?;
        Ok(meta_path)
    }

    /// Inverse of [`save`](Self::save); takes the metadata path.
    pub fn load(meta_path: &Path) -> Result<TestingScheme> {
        let dir = meta_path.parent().unwrap_or(Path::new("."));
        let text = read(meta_path)?;
        let meta = parse_key_values(&text)?;
        let get = |key: &str| {
            meta.get(key)
                .map(String::as_str)
                .ok_or_else(|| parse_err(0, format!("metadata is missing {key}")))
        };
        let num = |key: &str| -> Result<usize> {
            get(key)?
                .parse()
                .map_err(|_| parse_err(0, format!("metadata {key} is not a count")))
        };
        let kind = SchemeKind::from_name(get("kind")?)
            .ok_or_else(|| parse_err(0, "unknown scheme kind"))?;
        let matrix = BitMatrix::parse(&read(&dir.join(get("matrix")?))?)?;
        let (k, delta) = (num("k")?, num("delta")?);
        let aux = match kind {
            SchemeKind::Repetition => {
                let step = delta + 1;
                let rows: Vec<usize> = (0..matrix.rows()).step_by(step).collect();
                SchemeAux::Repetition {
                    base: matrix.select_rows(&rows),
                }
            }
            SchemeKind::Bernoulli => SchemeAux::Bernoulli {
                scale: get("scale")?.parse().map_err(|_| parse_err(0, "bad scale"))?,
                seed: get("seed")?.parse().map_err(|_| parse_err(0, "bad seed"))?,
            },
            SchemeKind::PaddedKs => SchemeAux::PaddedKs {
                codebook: Codebook::parse(&read(&dir.join(get("codebook")?))?)?,
                d: num("d")?,
                k_max: num("k_max")?,
            },
            SchemeKind::Saffron => {
                let inner: Arc<dyn DeletionCode> =
                    Arc::new(RepetitionDeletionCode::from_description(get("inner")?)?);
                let h = num("block")?;
                let right = num("right_nodes")?;
                contract!(right * h == matrix.rows(), "saffron block sizes disagree with matrix");
                let signatures = signature_matrix(inner.as_ref(), matrix.cols())?;
                contract!(signatures.rows() == h, "inner code does not match block height");
                let mut adjacency = BitMatrix::zeros(right, matrix.cols());
                for (i, col) in matrix.columns().iter().enumerate() {
                    for j in 0..right {
                        let block = col.slice(j * h, (j + 1) * h);
                        if block.weight() > 0 {
                            contract!(&block == signatures.column(i), "block {j} of item {i} is not its signature");
                            adjacency.set(j, i, true);
                        }
                    }
                }
                SchemeAux::Saffron {
                    adjacency,
                    signatures,
                    inner,
                    seed: meta.get("seed").and_then(|s| s.parse().ok()),
                }
            }
        };
        Ok(TestingScheme {
            matrix,
            k,
            delta,
            aux,
        })
    }
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| parse_err(0, format!("{}: {e}", p.display())))
}

/// Flat `key=value` lines; blank lines and `#` comments are ignored.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| parse_err(i + 1, "expected key=value"))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Repeats every row of `base` `Δ + 1` times in place.
pub fn repetition_scheme(base: &BitMatrix, k: usize, delta: usize) -> TestingScheme {
    let step = delta + 1;
    let rows: Vec<usize> = (0..base.rows() * step).map(|r| r / step).collect();
    TestingScheme {
        matrix: base.select_rows(&rows),
        k,
        delta,
        aux: SchemeAux::Repetition { base: base.clone() },
    }
}

/// Row count `⌈c·(k² ln n + Δk)⌉` of the Bernoulli design.
pub fn bernoulli_rows(n: usize, k: usize, delta: usize, scale: f64) -> usize {
    let (n, k, delta) = (n as f64, k as f64, delta as f64);
    (scale * (k * k * n.ln() + delta * k)).ceil() as usize
}

/// Every entry independently 1 with probability `1/k`, sampled row by row.
///
/// If two columns coincide the matrix is redrawn with seed `seed + 1`, and
/// so on. With `k = 1` every entry is 1 and no redraw is attempted.
pub fn bernoulli_scheme(n: usize, k: usize, delta: usize, scale: f64, seed: u64) -> Result<TestingScheme> {
    contract!(k >= 1, "sparsity must be at least 1");
    contract!(n > k, "need more items ({n}) than the sparsity ({k})");
    contract!(scale > 0.0, "scale factor must be positive");
    let m = bernoulli_rows(n, k, delta, scale);
    let p = 1.0 / k as f64;
    let draw = |s: u64| {
        let mut rng = SeededRng::new(s);
        let mut a = BitMatrix::zeros(m, n);
        for r in 0..m {
            for c in 0..n {
                if rng.bernoulli(p) {
                    a.set(r, c, true);
                }
            }
        }
        a
    };
    let mut used = seed;
    let mut matrix = draw(used);
    if k > 1 {
        while let Some((a, b)) = matrix.duplicate_columns() {
            if used - seed + 1 >= MAX_RESAMPLES {
                log::warn!("bernoulli: columns {a} and {b} still equal after {MAX_RESAMPLES} draws");
                break;
            }
            log::info!("bernoulli: seed {used} gave equal columns {a} and {b}, redrawing");
            used = used.wrapping_add(1);
            matrix = draw(used);
        }
    }
    Ok(TestingScheme {
        matrix,
        k,
        delta,
        aux: SchemeAux::Bernoulli { scale, seed: used },
    })
}

/// `⌊N / (N − d + Δ)⌋`, or one less than the codebook size when the
/// denominator vanishes.
pub fn padded_ks_k_max(len: usize, d: usize, delta: usize, words: usize) -> usize {
    match len - d + delta {
        0 => words.saturating_sub(1),
        denom => len / denom,
    }
}

/// Padded Kautz–Singleton map of a codebook with the `(Δ, d)`-ℓ∞ property.
///
/// A symbol with label `i` becomes a block of length `q + Δ` whose only 1
/// sits at offset `Δ + i`.
pub fn padded_ks_scheme(code: &Codebook, delta: usize, d: usize, k: usize) -> Result<TestingScheme> {
    contract!(d <= code.word_len(), "d = {d} exceeds word length {}", code.word_len());
    // with Δ = 0 a gap of 1 is plain Hamming distance
    contract!(
        check_linf(code, delta.max(1) as u32, d)?,
        "codebook lacks the ({delta}, {d}) l-infinity property"
    );
    let k_max = padded_ks_k_max(code.word_len(), d, delta, code.len());
    contract!(k <= k_max, "k = {k} exceeds certified k_max = {k_max}");
    let q = code.alphabet() as usize;
    let block = q + delta;
    let columns = code
        .words()
        .iter()
        .map(|w| {
            let mut col = BitVec::zeros(w.len() * block);
            for (pos, &label) in w.iter().enumerate() {
                col.set(pos * block + delta + label as usize, true);
            }
            col
        })
        .collect();
    Ok(TestingScheme {
        matrix: BitMatrix::from_columns(code.word_len() * block, columns)?,
        k,
        delta,
        aux: SchemeAux::PaddedKs {
            codebook: code.clone(),
            d,
            k_max,
        },
    })
}

/// Right-node count `⌈e·(k² ln n + k(1+α) ln k)⌉`.
pub fn saffron_right_nodes(n: usize, k: usize, alpha: f64) -> usize {
    let (n, k) = (n as f64, k as f64);
    (std::f64::consts::E * (k * k * n.ln() + k * (1.0 + alpha) * k.ln())).ceil() as usize
}

/// Column `i` is `encode(i)` stacked over its complement.
pub fn signature_matrix(inner: &dyn DeletionCode, n: usize) -> Result<BitMatrix> {
    let bits = inner.message_bits();
    contract!(
        bits >= 64 || n as u128 <= 1u128 << bits,
        "inner code has 2^{bits} messages, fewer than {n} items"
    );
    let columns = (0..n as u64)
        .map(|i| {
            let c = inner.encode(i);
            BitVec::concat(&[&c, &c.complement()])
        })
        .collect();
    BitMatrix::from_columns(2 * inner.codeword_len(), columns)
}

/// SAFFRON design from an explicit bipartite graph and signature matrix.
///
/// Block `j` holds `signatures` column `i` wherever `adjacency[j][i] = 1`
/// and zeros elsewhere.
pub fn saffron_from_parts(
    adjacency: &BitMatrix,
    signatures: &BitMatrix,
    inner: Arc<dyn DeletionCode>,
    k: usize,
    delta: usize,
) -> Result<TestingScheme> {
    contract!(
        adjacency.cols() == signatures.cols(),
        "graph has {} items, signatures {}",
        adjacency.cols(),
        signatures.cols()
    );
    let h = signatures.rows();
    let zero = BitVec::zeros(h);
    let columns = (0..adjacency.cols())
        .map(|i| {
            let parts: Vec<&BitVec> = (0..adjacency.rows())
                .map(|j| {
                    if adjacency.get(j, i) {
                        signatures.column(i)
                    } else {
                        &zero
                    }
                })
                .collect();
            BitVec::concat(&parts)
        })
        .collect();
    Ok(TestingScheme {
        matrix: BitMatrix::from_columns(adjacency.rows() * h, columns)?,
        k,
        delta,
        aux: SchemeAux::Saffron {
            adjacency: adjacency.clone(),
            signatures: signatures.clone(),
            inner,
            seed: None,
        },
    })
}

/// Random SAFFRON design; each item–right-node edge is present with
/// probability `1/k`, sampled right node by right node. The deletion
/// budget is the inner code's radius.
pub fn saffron_scheme(
    n: usize,
    k: usize,
    alpha: f64,
    inner: Arc<dyn DeletionCode>,
    seed: u64,
) -> Result<TestingScheme> {
    contract!(k >= 1, "sparsity must be at least 1");
    contract!(n >= 1, "need at least one item");
    let delta = inner.radius();
    contract!(
        inner.min_hamming_distance() > 3 * delta,
        "inner distance {} must exceed 3*delta = {}",
        inner.min_hamming_distance(),
        3 * delta
    );
    let signatures = signature_matrix(inner.as_ref(), n)?;
    let right = saffron_right_nodes(n, k, alpha);
    let p = 1.0 / k as f64;
    let mut rng = SeededRng::new(seed);
    let mut adjacency = BitMatrix::zeros(right, n);
    for j in 0..right {
        for i in 0..n {
            if rng.bernoulli(p) {
                adjacency.set(j, i, true);
            }
        }
    }
    let mut scheme = saffron_from_parts(&adjacency, &signatures, inner, k, delta)?;
    if let SchemeAux::Saffron { seed: s, .. } = &mut scheme.aux {
        *s = Some(seed);
    }
    Ok(scheme)
}
