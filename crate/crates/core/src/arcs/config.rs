use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SiltError};

/// Largest `n` accepted by [`enumerate_configurations`].
pub const MAX_ENUMERATION_N: usize = 5;

/// One endpoint of an arc; labels are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Endpoint {
    R(usize),
    S(usize),
}

impl Endpoint {
    pub fn label(self) -> usize {
        match self {
            Endpoint::R(k) | Endpoint::S(k) => k,
        }
    }

    pub fn is_r(self) -> bool {
        matches!(self, Endpoint::R(_))
    }

    /// `r_k <-> s_k`.
    pub fn swapped(self) -> Endpoint {
        match self {
            Endpoint::R(k) => Endpoint::S(k),
            Endpoint::S(k) => Endpoint::R(k),
        }
    }

    fn relabeled(self, k: usize) -> Endpoint {
        match self {
            Endpoint::R(_) => Endpoint::R(k),
            Endpoint::S(_) => Endpoint::S(k),
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::R(k) => write!(f, "r{k}"),
            Endpoint::S(k) => write!(f, "s{k}"),
        }
    }
}

impl FromStr for Endpoint {
    type Err = SiltError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || SiltError::domain("word", format!("cannot parse endpoint {s:?}"));
        let mut chars = s.chars();
        let head = chars.next().ok_or_else(bad)?;
        let rest = chars.as_str();
        let rest = rest.strip_prefix('_').unwrap_or(rest);
        let k: usize = rest.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        match head {
            'r' | 'R' => Ok(Endpoint::R(k)),
            's' | 'S' => Ok(Endpoint::S(k)),
            _ => Err(bad()),
        }
    }
}

/// An interleaving of `r_1, s_1, ..., r_n, s_n` with each `r_k` before its `s_k`.
///
/// Positions are numbered `1..=2n`; gap `j` lies between positions `j` and `j + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Endpoint>", into = "Vec<Endpoint>")]
pub struct PairConfiguration {
    n: usize,
    word: Vec<Endpoint>,
}

impl PairConfiguration {
    pub fn new(word: Vec<Endpoint>) -> Result<Self> {
        if word.is_empty() || word.len() % 2 != 0 {
            return Err(SiltError::domain(
                "word",
                format!("need an even, nonzero number of endpoints, got {}", word.len()),
            ));
        }
        let n = word.len() / 2;
        let mut r_seen = vec![false; n];
        let mut s_seen = vec![false; n];
        for e in &word {
            let k = e.label();
            if k == 0 || k > n {
                return Err(SiltError::domain("word", format!("label {e} outside 1..={n}")));
            }
            match e {
                Endpoint::R(_) => {
                    if r_seen[k - 1] {
                        return Err(SiltError::domain("word", format!("{e} repeated")));
                    }
                    r_seen[k - 1] = true;
                }
                Endpoint::S(_) => {
                    if s_seen[k - 1] {
                        return Err(SiltError::domain("word", format!("{e} repeated")));
                    }
                    if !r_seen[k - 1] {
                        return Err(SiltError::domain("word", format!("{e} precedes r{k}")));
                    }
                    s_seen[k - 1] = true;
                }
            }
        }
        Ok(PairConfiguration { n, word })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn word(&self) -> &[Endpoint] {
        &self.word
    }

    /// Number of gaps, `2n - 1`.
    pub fn gap_count(&self) -> usize {
        2 * self.n - 1
    }

    /// Endpoint at 1-based position `a`.
    pub fn at(&self, a: usize) -> Endpoint {
        self.word[a - 1]
    }

    /// 1-based positions `(r_k, s_k)` for every label `k = 1..=n`.
    pub fn positions(&self) -> Vec<(usize, usize)> {
        let mut pos = vec![(0, 0); self.n];
        for (i, e) in self.word.iter().enumerate() {
            match e {
                Endpoint::R(k) => pos[k - 1].0 = i + 1,
                Endpoint::S(k) => pos[k - 1].1 = i + 1,
            }
        }
        pos
    }

    /// Reverses the word and swaps `r <-> s`.
    pub fn reversed(&self) -> PairConfiguration {
        PairConfiguration {
            n: self.n,
            word: self.word.iter().rev().map(|e| e.swapped()).collect(),
        }
    }

    /// Relabels arcs so that the `r`'s appear as `r_1, r_2, ...` from left to right.
    pub fn canonical_form(&self) -> PairConfiguration {
        let mut map = vec![0; self.n + 1];
        let mut next = 1;
        for e in &self.word {
            if let Endpoint::R(k) = e {
                map[*k] = next;
                next += 1;
            }
        }
        PairConfiguration {
            n: self.n,
            word: self.word.iter().map(|e| e.relabeled(map[e.label()])).collect(),
        }
    }

    /// Sub-configuration on positions `lo..=hi`, relabeled `1..` in increasing
    /// order of the original labels. Returns the original labels alongside.
    pub(crate) fn restrict(&self, lo: usize, hi: usize) -> (PairConfiguration, Vec<usize>) {
        relabel(&self.word[lo - 1..hi])
    }
}

/// Relabels a balanced sub-word `1..` in increasing order of its labels.
pub(crate) fn relabel(slice: &[Endpoint]) -> (PairConfiguration, Vec<usize>) {
    let mut labels: Vec<usize> = slice
        .iter()
        .filter(|e| e.is_r())
        .map(|e| e.label())
        .collect();
    labels.sort_unstable();
    let mut map = BTreeMap::new();
    for (i, &k) in labels.iter().enumerate() {
        map.insert(k, i + 1);
    }
    let word = slice.iter().map(|e| e.relabeled(map[&e.label()])).collect();
    (
        PairConfiguration {
            n: labels.len(),
            word,
        },
        labels,
    )
}

impl fmt::Display for PairConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.word.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl FromStr for PairConfiguration {
    type Err = SiltError;

    /// Accepts `r1,r2,s2,s1`, `r1 r2 s2 s1` or `r_1, r_2, s_2, s_1`.
    fn from_str(s: &str) -> Result<Self> {
        let word = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(Endpoint::from_str)
            .collect::<Result<Vec<_>>>()?;
        PairConfiguration::new(word)
    }
}

impl TryFrom<Vec<Endpoint>> for PairConfiguration {
    type Error = SiltError;

    fn try_from(word: Vec<Endpoint>) -> Result<Self> {
        PairConfiguration::new(word)
    }
}

impl From<PairConfiguration> for Vec<Endpoint> {
    fn from(c: PairConfiguration) -> Self {
        c.word
    }
}

/// All raw words for `n` arcs, in lexicographic order of the word
/// (with `r_k < s_k` and smaller labels first).
pub fn enumerate_configurations(n: usize) -> Result<Vec<PairConfiguration>> {
    if n == 0 || n > MAX_ENUMERATION_N {
        return Err(SiltError::Combinatorics(format!(
            "enumeration supports 1 <= n <= {MAX_ENUMERATION_N}, got {n}"
        )));
    }
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(2 * n);
    let mut state = vec![0u8; n]; // 0 unused, 1 open, 2 closed
    fn go(
        n: usize,
        word: &mut Vec<Endpoint>,
        state: &mut [u8],
        out: &mut Vec<PairConfiguration>,
    ) {
        if word.len() == 2 * n {
            out.push(PairConfiguration {
                n,
                word: word.clone(),
            });
            return;
        }
        for k in 0..n {
            if state[k] == 0 {
                state[k] = 1;
                word.push(Endpoint::R(k + 1));
                go(n, word, state, out);
                word.pop();
                state[k] = 0;
            }
        }
        for k in 0..n {
            if state[k] == 1 {
                state[k] = 2;
                word.push(Endpoint::S(k + 1));
                go(n, word, state, out);
                word.pop();
                state[k] = 1;
            }
        }
    }
    go(n, &mut word, &mut state, &mut out);
    Ok(out)
}

/// Groups words by [`PairConfiguration::canonical_form`]; keys are sorted.
pub fn equivalence_classes(
    configs: &[PairConfiguration],
) -> BTreeMap<PairConfiguration, Vec<PairConfiguration>> {
    let mut classes: BTreeMap<PairConfiguration, Vec<PairConfiguration>> = BTreeMap::new();
    for c in configs {
        classes.entry(c.canonical_form()).or_default().push(c.clone());
    }
    classes
}
