//! Subset enumeration shared by the certifiers, adversaries, and oracles.

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is exact at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographic iterator over the `k`-subsets of `0..n`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let current = (k <= n).then(|| (0..k).collect());
        Combinations { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// All subsets of `0..n` of size `0..=k`, by size then lexicographically.
pub fn subsets_up_to(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=k.min(n)).flat_map(move |s| Combinations::new(n, s))
}

pub fn count_subsets_up_to(n: usize, k: usize) -> u128 {
    (0..=k.min(n)).fold(0u128, |acc, s| acc.saturating_add(binomial(n, s)))
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
pub fn unrank(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    assert!(rank < binomial(n, k), "rank out of range");
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let remaining = k - slot - 1;
        loop {
            let with_next = binomial(n - next - 1, remaining);
            if rank < with_next {
                out.push(next);
                next += 1;
                break;
            }
            rank -= with_next;
            next += 1;
        }
    }
    out
}
