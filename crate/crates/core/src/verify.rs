//! Brute-force certificates for disjunctness and separability, with and
//! without deletions.
//!
//! Every check first computes its enumeration size and refuses to run
//! above `cap`. Work is split across threads, but a failing property
//! always reports the lexicographically first counterexample.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;

use crate::bitcore::{BitMatrix, BitVec};
use crate::combinatorics::{binomial, count_subsets_up_to, subsets_up_to, Combinations};
use crate::distances::{adel_witness, lcs, lcs_alignment};
use crate::error::{Error, Result};

/// Why a property fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Column `column` is covered by the OR of `cover`.
    Covered { column: usize, cover: Vec<usize> },
    /// Two distinct subsets with equal OR.
    EqualUnions { first: Vec<usize>, second: Vec<usize> },
    /// Deleting `deleted_first` from `∨ first` and `deleted_second` from
    /// `∨ second` (each of size `Δ`) gives the same vector.
    CommonSubsequence {
        first: Vec<usize>,
        second: Vec<usize>,
        deleted_first: Vec<usize>,
        deleted_second: Vec<usize>,
    },
    /// Column `column` without `deleted_column` is covered by `∨ cover`
    /// without `deleted_cover`.
    CoveredAfterDeletion {
        column: usize,
        cover: Vec<usize>,
        deleted_column: Vec<usize>,
        deleted_cover: Vec<usize>,
    },
}

fn list(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(usize::to_string).collect();
    format!("[{}]", parts.join(","))
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Covered { column, cover } => write!(f, "column {column} covered by {}", list(cover)),
            Witness::EqualUnions { first, second } => {
                write!(f, "unions of {} and {} are equal", list(first), list(second))
            }
            Witness::CommonSubsequence {
                first,
                second,
                deleted_first,
                deleted_second,
            } => write!(
                f,
                "unions of {} minus {} and {} minus {} are equal",
                list(first),
                list(deleted_first),
                list(second),
                list(deleted_second)
            ),
            Witness::CoveredAfterDeletion {
                column,
                cover,
                deleted_column,
                deleted_cover,
            } => write!(
                f,
                "column {column} minus {} covered by union of {} minus {}",
                list(deleted_column),
                list(cover),
                list(deleted_cover)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub name: &'static str,
    pub k: usize,
    pub delta: usize,
    pub holds: bool,
    pub witness: Option<Witness>,
    /// Enumeration size the check was budgeted for.
    pub work: u128,
}

impl PropertyReport {
    fn new(name: &'static str, k: usize, delta: usize, work: u128, witness: Option<Witness>) -> Self {
        PropertyReport {
            name,
            k,
            delta,
            holds: witness.is_none(),
            witness,
            work,
        }
    }

    /// `key=value` lines.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "property={}\nk={}\ndelta={}\nholds={}\nwork={}\n",
            self.name, self.k, self.delta, self.holds, self.work
        );
        if let Some(w) = &self.witness {
            s.push_str(&format!("witness={w}\n"));
        }
        s
    }
}

fn guard(work: u128, cap: u128) -> Result<()> {
    if work > cap {
        return Err(Error::Infeasible { work, cap });
    }
    Ok(())
}

/// `k`-subsets of the columns other than `i0`, lexicographically.
fn others(n: usize, i0: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    Combinations::new(n - 1, k).map(move |s| s.into_iter().map(|j| if j >= i0 { j + 1 } else { j }).collect())
}

/// No column is covered by the OR of any `k` others.
pub fn is_disjunct(b: &BitMatrix, k: usize, cap: u128) -> Result<PropertyReport> {
    let n = b.cols();
    if n == 0 {
        return Ok(PropertyReport::new("disjunct", k, 0, 0, None));
    }
    let size = k.min(n - 1);
    let work = binomial(n - 1, size).saturating_mul(n as u128);
    guard(work, cap)?;
    let witness = (0..n).into_par_iter().find_map_first(|i0| {
        others(n, i0, size)
            .find(|s| b.column(i0).is_covered_by(&b.or_of(s).unwrap()))
            .map(|cover| Witness::Covered { column: i0, cover })
    });
    Ok(PropertyReport::new("disjunct", k, 0, work, witness))
}

/// ORs of all subsets of size `≤ k` are pairwise distinct.
pub fn is_separable(b: &BitMatrix, k: usize, cap: u128) -> Result<PropertyReport> {
    let work = count_subsets_up_to(b.cols(), k);
    guard(work, cap)?;
    let mut seen: HashMap<BitVec, Vec<usize>> = HashMap::new();
    let mut witness = None;
    for s in subsets_up_to(b.cols(), k) {
        let union = b.or_of(&s)?;
        if let Some(first) = seen.get(&union) {
            witness = Some(Witness::EqualUnions {
                first: first.clone(),
                second: s,
            });
            break;
        }
        seen.insert(union, s);
    }
    Ok(PropertyReport::new("separable", k, 0, work, witness))
}

/// Every two distinct subsets of size `≤ k` (the empty set included) have
/// unions at deletion distance at least `Δ`. `Δ = 0` is plain
/// separability.
pub fn is_deletion_separable(a: &BitMatrix, k: usize, delta: usize, cap: u128) -> Result<PropertyReport> {
    if delta == 0 {
        let mut r = is_separable(a, k, cap)?;
        r.name = "del-separable";
        return Ok(r);
    }
    let count = count_subsets_up_to(a.cols(), k);
    let work = binomial(count.min(usize::MAX as u128) as usize, 2);
    guard(work, cap)?;
    let subsets: Vec<Vec<usize>> = subsets_up_to(a.cols(), k).collect();
    let unions: Vec<BitVec> = subsets.iter().map(|s| a.or_of(s)).collect::<Result<_>>()?;
    let m = a.rows();
    let keep = m.saturating_sub(delta);
    let witness = (0..subsets.len()).into_par_iter().find_map_first(|x| {
        (x + 1..subsets.len())
            .find(|&y| lcs(&unions[x], &unions[y]) >= keep)
            .map(|y| {
                let pairs = &lcs_alignment(&unions[x], &unions[y])[..keep];
                let kept_x: Vec<usize> = pairs.iter().map(|p| p.0).collect();
                let kept_y: Vec<usize> = pairs.iter().map(|p| p.1).collect();
                Witness::CommonSubsequence {
                    first: subsets[x].clone(),
                    second: subsets[y].clone(),
                    deleted_first: complement(&kept_x, m),
                    deleted_second: complement(&kept_y, m),
                }
            })
    });
    Ok(PropertyReport::new("del-separable", k, delta, work, witness))
}

fn complement(kept: &[usize], m: usize) -> Vec<usize> {
    let mut it = kept.iter().peekable();
    (0..m)
        .filter(|i| {
            if it.peek() == Some(&i) {
                it.next();
                false
            } else {
                true
            }
        })
        .collect()
}

/// For every column and every `k` other columns, the column keeps a 1-0
/// match against their union under any `Δ` deletions on each side.
pub fn is_deletion_disjunct(a: &BitMatrix, k: usize, delta: usize, cap: u128) -> Result<PropertyReport> {
    let n = a.cols();
    let m = a.rows();
    if n == 0 {
        return Ok(PropertyReport::new("del-disjunct", k, delta, 0, None));
    }
    let size = k.min(n - 1);
    let work = binomial(n - 1, size)
        .saturating_mul(n as u128)
        .saturating_mul(binomial(m, delta));
    guard(work, cap)?;
    let scan = |i0: usize| -> Result<Option<Witness>> {
        for cover in others(n, i0, size) {
            let union = a.or_of(&cover)?;
            if let Some((t1, t2)) = adel_witness(a.column(i0), &union, delta)? {
                return Ok(Some(Witness::CoveredAfterDeletion {
                    column: i0,
                    cover,
                    deleted_column: t1,
                    deleted_cover: t2,
                }));
            }
        }
        Ok(None)
    };
    let witness = (0..n)
        .into_par_iter()
        .find_map_first(|i0| scan(i0).transpose())
        .transpose()?;
    Ok(PropertyReport::new("del-disjunct", k, delta, work, witness))
}

/// Re-checks a counterexample against `a` from first principles.
pub fn witness_is_valid(a: &BitMatrix, w: &Witness) -> Result<bool> {
    Ok(match w {
        Witness::Covered { column, cover } => !cover.contains(column) && a.column(*column).is_covered_by(&a.or_of(cover)?),
        Witness::EqualUnions { first, second } => first != second && a.or_of(first)? == a.or_of(second)?,
        Witness::CommonSubsequence {
            first,
            second,
            deleted_first,
            deleted_second,
        } => {
            deleted_first.len() == deleted_second.len()
                && first != second
                && a.or_of(first)?.delete_indices(deleted_first)? == a.or_of(second)?.delete_indices(deleted_second)?
        }
        Witness::CoveredAfterDeletion {
            column,
            cover,
            deleted_column,
            deleted_cover,
        } => {
            deleted_column.len() == deleted_cover.len()
                && !cover.contains(column)
                && a.column(*column)
                    .delete_indices(deleted_column)?
                    .is_covered_by(&a.or_of(cover)?.delete_indices(deleted_cover)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{bernoulli_scheme, padded_ks_scheme, repetition_scheme};
    use crate::distances::deletion_distance;
    use crate::gfcodes::{linf_embed, rs_codebook, PrimeField};
    use crate::DEFAULT_CAP;

    fn ones(m: usize, n: usize) -> BitMatrix {
        BitMatrix::from_columns(m, vec![BitVec::ones(m); n]).unwrap()
    }

    #[test]
    fn identity_is_disjunct_and_separable() {
        for n in 2..=6 {
            for k in 1..n {
                assert!(is_disjunct(&BitMatrix::identity(n), k, DEFAULT_CAP).unwrap().holds);
            }
            for k in 1..=n {
                assert!(is_separable(&BitMatrix::identity(n), k, DEFAULT_CAP).unwrap().holds);
            }
        }
    }

    #[test]
    fn duplicates_and_all_ones_fail_with_witnesses() {
        let dup = BitMatrix::from_row_bits(&[&[1, 0, 1], &[0, 1, 0]]).unwrap();
        let r = is_disjunct(&dup, 1, DEFAULT_CAP).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witness, Some(Witness::Covered { column: 0, cover: vec![2] }));
        assert!(witness_is_valid(&dup, r.witness.as_ref().unwrap()).unwrap());

        let all = ones(4, 3);
        let r = is_separable(&all, 2, DEFAULT_CAP).unwrap();
        assert!(!r.holds);
        assert_eq!(
            r.witness,
            Some(Witness::EqualUnions {
                first: vec![0],
                second: vec![1]
            })
        );
        let r = is_deletion_separable(&all, 2, 1, DEFAULT_CAP).unwrap();
        assert!(!r.holds);
        assert!(witness_is_valid(&all, r.witness.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn caps_are_enforced() {
        let id = BitMatrix::identity(30);
        assert!(matches!(is_disjunct(&id, 5, 1000), Err(Error::Infeasible { .. })));
        assert!(matches!(is_separable(&id, 5, 1000), Err(Error::Infeasible { .. })));
        assert!(matches!(is_deletion_separable(&id, 3, 1, 1000), Err(Error::Infeasible { .. })));
        assert!(matches!(is_deletion_disjunct(&id, 2, 2, 1000), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn repetition_identity_is_deletion_separable() {
        let s = repetition_scheme(&BitMatrix::identity(4), 2, 2);
        assert!(is_deletion_separable(s.matrix(), 2, 2, DEFAULT_CAP).unwrap().holds);
        assert!(!is_deletion_separable(s.matrix(), 2, 3, DEFAULT_CAP).unwrap().holds);
    }

    #[test]
    fn deletion_separable_matches_pairwise_distance() {
        for seed in 0..8 {
            let a = bernoulli_scheme(6, 2, 1, 0.7, seed).unwrap();
            let subs: Vec<Vec<usize>> = subsets_up_to(6, 2).collect();
            for delta in 0..=3 {
                let expect = subs.iter().enumerate().all(|(i, s)| {
                    subs[i + 1..].iter().all(|t| {
                        let d = deletion_distance(&a.matrix().or_of(s).unwrap(), &a.matrix().or_of(t).unwrap()).unwrap();
                        if delta == 0 {
                            d >= 0
                        } else {
                            d >= delta as i64
                        }
                    })
                });
                let r = is_deletion_separable(a.matrix(), 2, delta, DEFAULT_CAP).unwrap();
                assert_eq!(r.holds, expect, "seed {seed} delta {delta}");
                if let Some(w) = &r.witness {
                    assert!(witness_is_valid(a.matrix(), w).unwrap());
                }
            }
            let sep = is_separable(a.matrix(), 2, DEFAULT_CAP).unwrap().holds;
            assert_eq!(is_deletion_separable(a.matrix(), 2, 0, DEFAULT_CAP).unwrap().holds, sep);
        }
    }

    #[test]
    fn padded_ks_needs_a_gap_wider_than_the_shift() {
        let rs = rs_codebook(PrimeField::new(5).unwrap(), 4, 2).unwrap();
        // gap exactly 1: one deletion above the constant-1 word aligns it
        // with the constant-0 word
        let tight = linf_embed(&rs, 1, PrimeField::new(7).unwrap()).unwrap();
        let s = padded_ks_scheme(&tight, 1, 3, 2).unwrap();
        let r = is_deletion_disjunct(s.matrix(), 1, 1, DEFAULT_CAP).unwrap();
        assert!(!r.holds);
        assert!(witness_is_valid(s.matrix(), r.witness.as_ref().unwrap()).unwrap());

        let wide = linf_embed(&rs, 2, PrimeField::new(13).unwrap()).unwrap();
        let s = padded_ks_scheme(&wide, 1, 3, 2).unwrap();
        let r = is_deletion_disjunct(s.matrix(), 2, 1, DEFAULT_CAP).unwrap();
        assert!(r.holds, "{:?}", r.witness);
        assert!(is_deletion_separable(s.matrix(), 2, 1, DEFAULT_CAP).unwrap().holds);
    }

    #[test]
    fn light_columns_are_not_deletion_disjunct() {
        // column 0 has weight 2, so two deletions erase it
        let a = BitMatrix::from_row_bits(&[&[1, 0, 1], &[1, 1, 0], &[0, 1, 1], &[0, 1, 1]]).unwrap();
        let r = is_deletion_disjunct(&a, 1, 2, DEFAULT_CAP).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert!(witness_is_valid(&a, &w).unwrap());
        assert!(matches!(w, Witness::CoveredAfterDeletion { column: 0, .. }));
    }

    #[test]
    fn implications_on_random_corpus() {
        for seed in 0..20 {
            let s = bernoulli_scheme(7, 2, 1, 1.2, seed).unwrap();
            let a = s.matrix();
            for delta in 0..=2 {
                let dd = is_deletion_disjunct(a, 2, delta, DEFAULT_CAP).unwrap();
                let ds = is_deletion_separable(a, 2, delta, DEFAULT_CAP).unwrap();
                if dd.holds {
                    assert!(ds.holds, "seed {seed} delta {delta}");
                    assert!(a.column_weights().iter().all(|&w| w > delta));
                } else {
                    assert!(witness_is_valid(a, dd.witness.as_ref().unwrap()).unwrap());
                }
            }
            let dj = is_disjunct(a, 2, DEFAULT_CAP).unwrap();
            if dj.holds {
                assert!(is_separable(a, 2, DEFAULT_CAP).unwrap().holds);
            }
            assert_eq!(dj.holds, is_deletion_disjunct(a, 2, 0, DEFAULT_CAP).unwrap().holds);
        }
    }

    #[test]
    fn report_text() {
        let r = is_disjunct(&BitMatrix::identity(5), 3, DEFAULT_CAP).unwrap();
        assert_eq!(r.to_text(), "property=disjunct\nk=3\ndelta=0\nholds=true\nwork=20\n");
    }
}
