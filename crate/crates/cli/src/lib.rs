//! Experiment harness behind the `delgt` binary.
//!
//! Settings come from a flat `key=value` map (config file merged with
//! command-line flags, flags winning); keys match the long flag names.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use delgt::channel::{adversary, corrupt, run_tests, Adversary};
use delgt::combinatorics::{binomial, count_subsets_up_to, unrank};
use delgt::constructions::{
    bernoulli_scheme, padded_ks_scheme, parse_key_values, repetition_scheme, saffron_scheme, SchemeKind, TestingScheme,
};
use delgt::decoders::{bruteforce_dd_decode, coverage_decode, disjunct_decode, repetition_decode, singleton_decode, DecodeResult,
    DecodeStatus, Diagnostics,
};
use delgt::gfcodes::{linf_embed, repetition_deletion_code, rs_codebook, DeletionCode, PrimeField};
use delgt::rng::{SeededRng, RNG_ALGORITHM};
use delgt::{BitMatrix, BitVec, DefectiveSet, DEFAULT_CAP};

pub const CSV_HEADER: &str = "construction,n,m,k,delta,trial,seed,adversary,decoder,success,time_us";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decoder {
    Disjunct,
    Repetition,
    Bruteforce,
    Coverage,
    Singleton,
}

impl Decoder {
    pub fn name(&self) -> &'static str {
        match self {
            Decoder::Disjunct => "disjunct",
            Decoder::Repetition => "repetition",
            Decoder::Bruteforce => "bruteforce",
            Decoder::Coverage => "coverage",
            Decoder::Singleton => "singleton",
        }
    }

    pub fn from_name(s: &str) -> Option<Decoder> {
        match s {
            "disjunct" => Some(Decoder::Disjunct),
            "repetition" => Some(Decoder::Repetition),
            "bruteforce" => Some(Decoder::Bruteforce),
            "coverage" => Some(Decoder::Coverage),
            "singleton" => Some(Decoder::Singleton),
            _ => None,
        }
    }

    pub fn default_for(kind: SchemeKind) -> Decoder {
        match kind {
            SchemeKind::Repetition => Decoder::Repetition,
            SchemeKind::Bernoulli | SchemeKind::PaddedKs => Decoder::Coverage,
            SchemeKind::Saffron => Decoder::Singleton,
        }
    }

    fn check_compatible(&self, kind: SchemeKind, delta: usize) -> Result<()> {
        match (self, kind) {
            (Decoder::Repetition, k) if k != SchemeKind::Repetition => {
                bail!("the repetition decoder needs a repetition scheme, not {k}")
            }
            (Decoder::Singleton, k) if k != SchemeKind::Saffron => {
                bail!("the singleton decoder needs a saffron scheme, not {k}")
            }
            (Decoder::Disjunct, _) if delta > 0 => bail!("the disjunct decoder tolerates no deletions"),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Decoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Runs `decoder` on a received vector.
pub fn decode(decoder: Decoder, scheme: &TestingScheme, received: &BitVec, cap: u128) -> delgt::Result<DecodeResult> {
    let delta = scheme.delta();
    match decoder {
        Decoder::Disjunct => {
            let start = Instant::now();
            let recovered = disjunct_decode(scheme.matrix(), received)?;
            Ok(DecodeResult {
                recovered,
                status: DecodeStatus::Exact,
                diagnostics: Diagnostics {
                    elapsed: start.elapsed(),
                    ..Diagnostics::default()
                },
            })
        }
        Decoder::Repetition => repetition_decode(scheme, received, delta),
        Decoder::Bruteforce => bruteforce_dd_decode(scheme.matrix(), received, delta, cap),
        Decoder::Coverage => coverage_decode(scheme.matrix(), received, delta),
        Decoder::Singleton => singleton_decode(scheme, received, delta),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub construction: SchemeKind,
    pub n: usize,
    pub k: usize,
    pub delta: usize,
    pub scale_c: f64,
    pub alpha: f64,
    pub seed: u64,
    /// Base matrix file for repetition schemes (identity when absent).
    pub base: Option<PathBuf>,
    pub rs_p: u32,
    pub rs_len: usize,
    pub rs_dim: usize,
    /// Label scaling of the ℓ∞ embedding (defaults to `max(Δ, 1)`).
    pub embed_gap: Option<u32>,
    /// Embedded alphabet (defaults to the least prime above `gap·p + 1`).
    pub target_p: Option<u32>,
    /// Declared ℓ∞ distance (defaults to `len − dim + 1`).
    pub d: Option<usize>,
    pub inner_distance: usize,
    /// Previously constructed scheme (`.meta` file); overrides construction.
    pub scheme: Option<PathBuf>,
    pub decoder: Option<Decoder>,
    pub adversary: Adversary,
    pub trials: usize,
    pub out: Option<PathBuf>,
    pub cap: u128,
    pub timing: bool,
    pub resample_scheme: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            construction: SchemeKind::Bernoulli,
            n: 12,
            k: 2,
            delta: 1,
            scale_c: 3.0,
            alpha: 1.0,
            seed: 0,
            base: None,
            rs_p: 5,
            rs_len: 4,
            rs_dim: 2,
            embed_gap: None,
            target_p: None,
            d: None,
            inner_distance: 3,
            scheme: None,
            decoder: None,
            adversary: Adversary::RandomSubset,
            trials: 10,
            out: None,
            cap: DEFAULT_CAP,
            timing: true,
            resample_scheme: false,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| anyhow!("invalid value {v:?} for {key}"))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "1" | "true" | "yes" => Ok(true),
        "0" | "false" | "no" => Ok(false),
        _ => bail!("invalid value {v:?} for {key}"),
    }
}

impl ExperimentConfig {
    /// Reads a flat `key=value` document.
    pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>> {
        Ok(parse_key_values(text)?)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let mut c = ExperimentConfig::default();
        for (key, v) in map {
            let v = v.as_str();
            match key.as_str() {
                "construction" => {
                    c.construction = SchemeKind::from_name(v).ok_or_else(|| anyhow!("unknown construction {v:?}"))?
                }
                "n" => c.n = parse_value(key, v)?,
                "k" => c.k = parse_value(key, v)?,
                "delta" => c.delta = parse_value(key, v)?,
                "scale-c" => c.scale_c = parse_value(key, v)?,
                "alpha" => c.alpha = parse_value(key, v)?,
                "seed" => c.seed = parse_value(key, v)?,
                "base" => c.base = Some(v.into()),
                "rs-p" => c.rs_p = parse_value(key, v)?,
                "rs-len" => c.rs_len = parse_value(key, v)?,
                "rs-dim" => c.rs_dim = parse_value(key, v)?,
                "embed-gap" => c.embed_gap = Some(parse_value(key, v)?),
                "target-p" => c.target_p = Some(parse_value(key, v)?),
                "d" => c.d = Some(parse_value(key, v)?),
                "inner-distance" => c.inner_distance = parse_value(key, v)?,
                "scheme" => c.scheme = Some(v.into()),
                "decoder" => c.decoder = Some(Decoder::from_name(v).ok_or_else(|| anyhow!("unknown decoder {v:?}"))?),
                "adversary" => {
                    c.adversary = Adversary::from_name(v).ok_or_else(|| anyhow!("unknown adversary {v:?}"))?
                }
                "trials" => c.trials = parse_value(key, v)?,
                "out" => c.out = Some(v.into()),
                "cap" => c.cap = parse_value(key, v)?,
                "timing" => c.timing = parse_bool(key, v)?,
                "resample-scheme" => c.resample_scheme = parse_bool(key, v)?,
                other => bail!("unknown setting {other:?}"),
            }
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            bail!("n must be positive");
        }
        if self.k == 0 {
            bail!("k must be positive");
        }
        if !(self.scale_c > 0.0) {
            bail!("scale-c must be positive");
        }
        if !(self.alpha >= 0.0) {
            bail!("alpha must be non-negative");
        }
        if self.cap == 0 {
            bail!("cap must be positive");
        }
        Ok(())
    }

    /// Builds (or loads) the scheme, using `seed` for random families.
    pub fn build_scheme(&self, seed: u64) -> Result<TestingScheme> {
        if let Some(path) = &self.scheme {
            return TestingScheme::load(path).with_context(|| format!("loading {}", path.display()));
        }
        let scheme = match self.construction {
            SchemeKind::Repetition => {
                let base = match &self.base {
                    Some(p) => BitMatrix::parse(&std::fs::read_to_string(p).with_context(|| p.display().to_string())?)?,
                    None => BitMatrix::identity(self.n),
                };
                repetition_scheme(&base, self.k, self.delta)
            }
            SchemeKind::Bernoulli => bernoulli_scheme(self.n, self.k, self.delta, self.scale_c, seed)?,
            SchemeKind::PaddedKs => {
                let rs = rs_codebook(PrimeField::new(self.rs_p)?, self.rs_len, self.rs_dim)?;
                let gap = self.embed_gap.unwrap_or(self.delta.max(1) as u32);
                let target = match self.target_p {
                    Some(p) => PrimeField::new(p)?,
                    None => PrimeField::next_above(gap * self.rs_p + 1)?,
                };
                let code = linf_embed(&rs, gap, target)?;
                let d = self.d.unwrap_or(self.rs_len - self.rs_dim + 1);
                padded_ks_scheme(&code, self.delta, d, self.k)?
            }
            SchemeKind::Saffron => {
                let bits = (usize::BITS - (self.n.max(2) - 1).leading_zeros()) as usize;
                let inner: Arc<dyn DeletionCode> =
                    Arc::new(repetition_deletion_code(bits, self.delta, self.inner_distance)?);
                saffron_scheme(self.n, self.k, self.alpha, inner, seed)?
            }
        };
        Ok(scheme)
    }

    pub fn decoder_for(&self, scheme: &TestingScheme) -> Result<Decoder> {
        let d = self.decoder.unwrap_or_else(|| Decoder::default_for(scheme.kind()));
        d.check_compatible(scheme.kind(), scheme.delta())?;
        Ok(d)
    }
}

/// Uniform draw among all subsets of `0..n` with at most `k` elements.
pub fn sample_defectives(rng: &mut SeededRng, n: usize, k: usize) -> Vec<usize> {
    let mut r = rng.below_u128(count_subsets_up_to(n, k));
    for size in 0..=k.min(n) {
        let c = binomial(n, size);
        if r < c {
            return unrank(n, size, r);
        }
        r -= c;
    }
    unreachable!("rank below the subset count")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentRecord {
    pub construction: SchemeKind,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub delta: usize,
    pub trial: usize,
    pub seed: u64,
    pub adversary: Adversary,
    pub decoder: Decoder,
    pub planted: DefectiveSet,
    pub deleted: Vec<usize>,
    pub result: DecodeResult,
    pub success: bool,
    pub time_us: u128,
}

impl ExperimentRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.construction,
            self.n,
            self.m,
            self.k,
            self.delta,
            self.trial,
            self.seed,
            self.adversary.name(),
            self.decoder,
            self.success as u8,
            self.time_us
        )
    }
}

/// One seeded trial: plant, test, corrupt, decode.
pub fn run_trial(
    config: &ExperimentConfig,
    scheme: &TestingScheme,
    decoder: Decoder,
    trial: usize,
) -> Result<ExperimentRecord> {
    let seed = config.seed.wrapping_add(trial as u64);
    let mut rng = SeededRng::new(seed);
    let n = scheme.items();
    let planted = DefectiveSet::new(n, sample_defectives(&mut rng, n, scheme.k()))?;
    let y = run_tests(scheme, &planted)?;
    let cap = config.cap;
    let judge = |r: &BitVec| decode(decoder, scheme, r, cap).is_ok_and(|res| res.recovered == planted);
    let trace = adversary(config.adversary, &y, scheme.delta(), Some(&judge), rng.next_u64(), cap)?;
    let received = corrupt(&y, &trace)?;
    let start = Instant::now();
    let result = decode(decoder, scheme, &received, cap)?;
    let elapsed = start.elapsed();
    Ok(ExperimentRecord {
        construction: scheme.kind(),
        n,
        m: scheme.rows(),
        k: scheme.k(),
        delta: scheme.delta(),
        trial,
        seed,
        adversary: config.adversary,
        decoder,
        success: result.recovered == planted,
        planted,
        deleted: trace.deleted().to_vec(),
        result,
        time_us: if config.timing { elapsed.as_micros() } else { 0 },
    })
}

/// Runs every trial in index order, streaming CSV rows to `out`.
pub fn run_trials(config: &ExperimentConfig, out: &mut dyn Write) -> Result<Vec<ExperimentRecord>> {
    writeln!(out, "# rng={RNG_ALGORITHM}")?;
    writeln!(out, "{CSV_HEADER}")?;
    let mut records = Vec::with_capacity(config.trials);
    let mut shared = None;
    for t in 0..config.trials {
        let scheme = if config.resample_scheme {
            config.build_scheme(config.seed.wrapping_add(t as u64))?
        } else {
            if shared.is_none() {
                shared = Some(config.build_scheme(config.seed)?);
            }
            shared.clone().unwrap()
        };
        let decoder = config.decoder_for(&scheme)?;
        let rec = run_trial(config, &scheme, decoder, t)?;
        writeln!(out, "{}", rec.csv_row())?;
        log::debug!("trial {t}: planted {:?} got {}", rec.planted.indices(), rec.result);
        records.push(rec);
    }
    if records.is_empty() {
        // still reject incompatible settings
        let scheme = config.build_scheme(config.seed)?;
        config.decoder_for(&scheme)?;
    }
    Ok(records)
}

/// Reads a vector from a file, or takes the argument itself as bits.
pub fn read_vector(arg: &str) -> Result<BitVec> {
    let path = std::path::Path::new(arg);
    let text = if path.exists() {
        std::fs::read_to_string(path).with_context(|| arg.to_string())?
    } else {
        arg.to_string()
    };
    Ok(BitVec::parse(text.trim())?)
}
