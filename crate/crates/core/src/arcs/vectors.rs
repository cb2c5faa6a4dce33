use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::config::{Endpoint, PairConfiguration};

/// `u_j` as integer coefficients on `p_1..p_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UVector {
    /// 1-based gap index in `1..=2n-1`.
    pub gap_index: usize,
    pub coefficients: Vec<i64>,
}

impl UVector {
    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0)
    }

    /// Whether `p_k` (1-based) appears as a term.
    pub fn contains(&self, k: usize) -> bool {
        self.coefficients[k - 1] != 0
    }

    /// `p_1 + p_3` style rendering; `0` for the zero vector.
    pub fn render(&self) -> String {
        let terms: Vec<String> = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| match c {
                1 => format!("p_{}", k + 1),
                c => format!("{c}p_{}", k + 1),
            })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }
}

/// `u_j = sum of p_k over arcs covering gap j`, for `j = 1..=2n-1`.
pub fn compute_u_vectors(c: &PairConfiguration) -> Vec<UVector> {
    let n = c.n();
    let mut current = vec![0i64; n];
    let mut out = Vec::with_capacity(c.gap_count());
    for (i, e) in c.word()[..c.gap_count()].iter().enumerate() {
        match e {
            Endpoint::R(k) => current[k - 1] += 1,
            Endpoint::S(k) => current[k - 1] -= 1,
        }
        out.push(UVector {
            gap_index: i + 1,
            coefficients: current.clone(),
        });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapKind {
    Increasing,
    Decreasing,
}

/// Gap `j` is increasing iff `u_j - u_{j-1} = +p_k`, i.e. the `j`-th endpoint is an `r`.
pub fn classify_gaps(c: &PairConfiguration) -> Vec<GapKind> {
    c.word()[..c.gap_count()]
        .iter()
        .map(|e| {
            if e.is_r() {
                GapKind::Increasing
            } else {
                GapKind::Decreasing
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FreeVariables {
    /// Labels `k` with no `s` strictly inside `(r_k, s_k)`.
    pub s_free: BTreeSet<usize>,
    /// Labels `k` with no `r` strictly inside `(r_k, s_k)`.
    pub r_free: BTreeSet<usize>,
}

pub fn find_free_variables(c: &PairConfiguration) -> FreeVariables {
    let mut out = FreeVariables::default();
    for (k, (a, b)) in c.positions().into_iter().enumerate() {
        let inside = &c.word()[a..b - 1];
        if !inside.iter().any(|e| !e.is_r()) {
            out.s_free.insert(k + 1);
        }
        if !inside.iter().any(|e| e.is_r()) {
            out.r_free.insert(k + 1);
        }
    }
    out
}

/// Labels whose `r_k` and `s_k` are adjacent.
pub fn find_isolated_intervals(c: &PairConfiguration) -> BTreeSet<usize> {
    c.positions()
        .into_iter()
        .enumerate()
        .filter(|(_, (a, b))| b - a == 1)
        .map(|(k, _)| k + 1)
        .collect()
}

/// The gap sets for which both spanning clauses hold.
///
/// `rising`: gaps `j` with `u_{j+1} - u_j = +p_k` (position `j + 1` is an `r`).
/// `falling`: gaps `j` with `u_j - u_{j-1} = -p_k` (position `j` is an `s`).
/// `falling` coincides with the decreasing gaps of [`classify_gaps`]; `rising`
/// is the mirror image under word reversal. With the literal increasing gaps
/// the first clause already fails for `r_1 s_1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaGapSets {
    pub rising: BTreeSet<usize>,
    pub falling: BTreeSet<usize>,
}

pub fn lemma_gap_sets(c: &PairConfiguration) -> LemmaGapSets {
    let g = c.gap_count();
    LemmaGapSets {
        rising: (1..=g).filter(|&j| c.at(j + 1).is_r()).collect(),
        falling: (1..=g).filter(|&j| !c.at(j).is_r()).collect(),
    }
}

/// Rank over the rationals by fraction-free (Bareiss) elimination.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let Some(first) = rows.first() else {
        return 0;
    };
    let cols = first.len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), cols, "ragged matrix");
            r.iter().map(|&x| x as i128).collect()
        })
        .collect();
    let mut rank = 0;
    let mut prev = 1i128;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for i in rank + 1..m.len() {
            for j in col + 1..cols {
                m[i][j] = (m[rank][col] * m[i][j] - m[i][col] * m[rank][j]) / prev;
            }
            m[i][col] = 0;
        }
        prev = m[rank][col];
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// True iff the vectors span all of `p_1..p_n`.
pub fn verify_span(vectors: &[UVector], n: usize) -> bool {
    if vectors.iter().any(|v| v.coefficients.len() != n) {
        return false;
    }
    let rows: Vec<Vec<i64>> = vectors.iter().map(|v| v.coefficients.clone()).collect();
    integer_rank(&rows) == n
}

/// Whether two families span the same subspace.
pub fn same_span(a: &[Vec<i64>], b: &[Vec<i64>]) -> bool {
    let ra = integer_rank(a);
    let rb = integer_rank(b);
    let both: Vec<Vec<i64>> = a.iter().chain(b).cloned().collect();
    ra == rb && integer_rank(&both) == ra
}

/// Unit vectors `p_k` for the given labels.
pub fn unit_vectors(labels: impl IntoIterator<Item = usize>, n: usize) -> Vec<Vec<i64>> {
    labels
        .into_iter()
        .map(|k| {
            let mut v = vec![0; n];
            v[k - 1] = 1;
            v
        })
        .collect()
}
