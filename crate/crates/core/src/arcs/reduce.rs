use serde::{Deserialize, Serialize};

use super::config::{relabel, Endpoint, PairConfiguration};
use super::vectors::find_isolated_intervals;

/// A maximal block of the word over which `union (r_k, s_k)` is connected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    /// First and last 1-based positions in the parent word.
    pub first: usize,
    pub last: usize,
    /// Parent labels, ascending; the sub-configuration uses `1..` in this order.
    pub labels: Vec<usize>,
    pub config: PairConfiguration,
}

impl Component {
    /// Parent gap index of the component's gap `j`.
    pub fn parent_gap(&self, j: usize) -> usize {
        self.first - 1 + j
    }
}

/// Splits the word wherever no arc is open. Gaps between components have `u_j = 0`.
pub fn connected_components(c: &PairConfiguration) -> Vec<Component> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 1;
    for (i, e) in c.word().iter().enumerate() {
        match e {
            Endpoint::R(_) => depth += 1,
            Endpoint::S(_) => depth -= 1,
        }
        if depth == 0 {
            let (config, labels) = c.restrict(start, i + 1);
            out.push(Component {
                first: start,
                last: i + 1,
                labels,
                config,
            });
            start = i + 2;
        }
    }
    out
}

/// One removed isolated arc.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalStep {
    /// Label in the original word.
    pub label: usize,
    /// Original gap indices making up the gap that carried the isolated `p`.
    pub removed_gap: Vec<usize>,
    /// Original gaps of the two neighbours `u_{j-1} = u_{j+1}` that were merged;
    /// empty when the neighbour was a boundary gap (`u = 0`) and got dropped.
    pub merged: Vec<usize>,
}

/// Result of removing isolated arcs until none are left.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsolatedReduction {
    pub steps: Vec<RemovalStep>,
    /// `None` when every arc was integrated out.
    pub reduced: Option<PairConfiguration>,
    /// Original label of each arc of `reduced`.
    pub labels: Vec<usize>,
    /// For each gap of `reduced`, the original gaps it stands for. A gap built
    /// from `k` originals carries `k` copies of its power in the denominator.
    pub gap_origins: Vec<Vec<usize>>,
}

impl IsolatedReduction {
    /// Number of original gaps merged into reduced gap `j` (1-based).
    pub fn multiplicity(&self, j: usize) -> usize {
        self.gap_origins[j - 1].len()
    }
}

/// Structural isolated-interval removal.
///
/// Removing an adjacent pair `r_k s_k` at positions `a, a+1` deletes gap `a`
/// and identifies gaps `a-1` and `a+1`, whose `u`-vectors agree. Repeats until
/// no isolated arc is left.
pub fn remove_isolated_intervals(c: &PairConfiguration) -> IsolatedReduction {
    let mut word: Vec<Endpoint> = c.word().to_vec();
    // gaps[i] = originals of the gap after word[i]; the boundary gaps 0 and 2n are
    // tracked as `None` so that anything merged into them is dropped.
    let mut gaps: Vec<Option<Vec<usize>>> = (0..=word.len())
        .map(|j| (j != 0 && j != word.len()).then(|| vec![j]))
        .collect();
    let mut steps = Vec::new();
    loop {
        let Some(i) = (0..word.len().saturating_sub(1))
            .find(|&i| matches!((word[i], word[i + 1]), (Endpoint::R(a), Endpoint::S(b)) if a == b))
        else {
            break;
        };
        // word[i] sits at position i+1; the gaps around it are i, i+1, i+2.
        let label = word[i].label();
        let removed_gap = gaps[i + 1].take().expect("inner gap");
        let left = gaps[i].take();
        let right = gaps[i + 2].take();
        let merged_gap = match (left, right) {
            (Some(mut l), Some(r)) => {
                l.extend(r);
                Some(l)
            }
            _ => None,
        };
        let merged = merged_gap.clone().unwrap_or_default();
        word.drain(i..i + 2);
        gaps.splice(i..i + 3, [merged_gap]);
        steps.push(RemovalStep {
            label,
            removed_gap,
            merged,
        });
    }
    if word.is_empty() {
        return IsolatedReduction {
            steps,
            reduced: None,
            labels: Vec::new(),
            gap_origins: Vec::new(),
        };
    }
    let len = word.len();
    let (reduced, labels) = relabel(&word);
    let gap_origins = gaps[1..len]
        .iter()
        .map(|g| g.clone().unwrap_or_default())
        .collect();
    debug_assert!(find_isolated_intervals(&reduced).is_empty());
    IsolatedReduction {
        steps,
        reduced: Some(reduced),
        labels,
        gap_origins,
    }
}
