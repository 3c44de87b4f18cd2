//! Test outcomes and the adversarial deletion channel.

use std::fmt;

use rayon::prelude::*;

use crate::bitcore::{BitVec, DefectiveSet};
use crate::combinatorics::{binomial, unrank};
use crate::constructions::TestingScheme;
use crate::error::{contract, parse_err, Error, Result};
use crate::rng::SeededRng;

/// Positions removed from an uncorrupted outcome vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CorruptionTrace {
    deleted: Vec<usize>,
    budget: usize,
}

impl CorruptionTrace {
    /// Sorts `deleted`; rejects repeats and sets larger than `budget`.
    pub fn new(mut deleted: Vec<usize>, budget: usize) -> Result<Self> {
        deleted.sort_unstable();
        contract!(
            deleted.windows(2).all(|w| w[0] < w[1]),
            "deletion set has repeated indices"
        );
        contract!(
            deleted.len() <= budget,
            "{} deletions exceed the budget {budget}",
            deleted.len()
        );
        Ok(CorruptionTrace { deleted, budget })
    }

    pub fn empty(budget: usize) -> Self {
        CorruptionTrace {
            deleted: Vec::new(),
            budget,
        }
    }

    pub fn deleted(&self) -> &[usize] {
        &self.deleted
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.deleted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deleted.is_empty()
    }

    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self.deleted.iter().map(usize::to_string).collect();
        parts.join(" ") + "\n"
    }

    /// Reads one line of indices; the budget is the number read.
    pub fn parse(text: &str) -> Result<Self> {
        let deleted: Vec<usize> = text
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(1, format!("bad index {t:?}"))))
            .collect::<Result<_>>()?;
        let budget = deleted.len();
        CorruptionTrace::new(deleted, budget).map_err(|e| match e {
            Error::Contract(msg) => parse_err(1, msg),
            other => other,
        })
    }
}

impl fmt::Display for CorruptionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_text().trim_end())
    }
}

/// Noiseless outcome vector, the OR of the defective columns.
pub fn run_tests(scheme: &TestingScheme, x: &DefectiveSet) -> Result<BitVec> {
    contract!(
        x.len() <= scheme.k(),
        "{} defectives exceed the sparsity {}",
        x.len(),
        scheme.k()
    );
    scheme.matrix().or_columns(x)
}

pub fn corrupt(y: &BitVec, trace: &CorruptionTrace) -> Result<BitVec> {
    y.delete_indices(&trace.deleted)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Adversary {
    /// Uniform `Δ`-subset.
    RandomSubset,
    /// The first `Δ` positions.
    Prefix,
    /// Every `Δ`-subset in lexicographic order; the first one that makes the
    /// judged decoder fail, else the lexicographically first.
    ExhaustiveWorst,
}

impl Adversary {
    pub fn name(&self) -> &'static str {
        match self {
            Adversary::RandomSubset => "random",
            Adversary::Prefix => "prefix",
            Adversary::ExhaustiveWorst => "exhaustive",
        }
    }

    pub fn from_name(name: &str) -> Option<Adversary> {
        match name {
            "random" => Some(Adversary::RandomSubset),
            "prefix" => Some(Adversary::Prefix),
            "exhaustive" => Some(Adversary::ExhaustiveWorst),
            _ => None,
        }
    }
}

/// Returns `true` when decoding the received vector gives the right answer.
pub type Judge<'a> = &'a (dyn Fn(&BitVec) -> bool + Sync);

/// Chooses `Δ` positions of `y` to delete.
///
/// `judge` is required by [`Adversary::ExhaustiveWorst`] and ignored
/// otherwise; `cap` bounds the number of subsets it may try.
pub fn adversary(
    strategy: Adversary,
    y: &BitVec,
    delta: usize,
    judge: Option<Judge<'_>>,
    seed: u64,
    cap: u128,
) -> Result<CorruptionTrace> {
    let m = y.len();
    contract!(delta <= m, "budget {delta} exceeds outcome length {m}");
    match strategy {
        Adversary::Prefix => CorruptionTrace::new((0..delta).collect(), delta),
        Adversary::RandomSubset => CorruptionTrace::new(SeededRng::new(seed).subset(m, delta), delta),
        Adversary::ExhaustiveWorst => {
            let judge = judge.ok_or_else(|| Error::Contract("exhaustive adversary needs a decoder".into()))?;
            let total = binomial(m, delta);
            if total > cap {
                return Err(Error::Infeasible { work: total, cap });
            }
            let failing = (0..total as u64).into_par_iter().find_first(|&r| {
                let t = unrank(m, delta, r as u128);
                let received = y.delete_indices(&t).expect("unranked subsets are valid");
                !judge(&received)
            });
            let rank = failing.unwrap_or(0);
            CorruptionTrace::new(unrank(m, delta, rank as u128), delta)
        }
    }
}
