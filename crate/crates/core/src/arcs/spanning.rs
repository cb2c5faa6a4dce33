use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::config::PairConfiguration;
use super::reduce::connected_components;
use super::vectors::{
    compute_u_vectors, find_free_variables, find_isolated_intervals, integer_rank,
    lemma_gap_sets, UVector,
};
use crate::error::{Result, SiltError};

/// Power bookkeeping over gaps `1..=2n-1`; `m[j - 1]` is `m_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MAssignment {
    pub m: Vec<u8>,
}

impl MAssignment {
    pub fn new(m: Vec<u8>) -> Result<Self> {
        if let Some(&x) = m.iter().find(|&&x| x > 2) {
            return Err(SiltError::domain("m", format!("entries must be 0, 1 or 2, got {x}")));
        }
        Ok(MAssignment { m })
    }

    /// `m_j` for 1-based `j`.
    pub fn get(&self, j: usize) -> u8 {
        self.m[j - 1]
    }

    pub fn has_consecutive_twos(&self) -> bool {
        self.m.windows(2).any(|w| w[0] == 2 && w[1] == 2)
    }

    /// All-zero assignment for a configuration.
    pub fn zeros(c: &PairConfiguration) -> Self {
        MAssignment {
            m: vec![0; c.gap_count()],
        }
    }
}

/// Every `m`-vector obtained by letting each endpoint pick one of its two
/// flanking gaps, dropping choices that land on the boundary gaps `0` or `2n`.
/// Deduplicated and sorted.
pub fn enumerate_m_assignments(c: &PairConfiguration) -> Result<Vec<MAssignment>> {
    let len = 2 * c.n();
    let gaps = c.gap_count();
    let mut out = BTreeSet::new();
    let mut m = vec![0u8; gaps];
    // Position a (1-based) flanks gaps a-1 and a.
    fn go(a: usize, len: usize, m: &mut Vec<u8>, out: &mut BTreeSet<Vec<u8>>) {
        if a > len {
            out.insert(m.clone());
            return;
        }
        for g in [a - 1, a] {
            if g == 0 || g == len {
                continue;
            }
            m[g - 1] += 1;
            go(a + 1, len, m, out);
            m[g - 1] -= 1;
        }
    }
    go(1, len, &mut m, &mut out);
    let out: Vec<MAssignment> = out.into_iter().map(|m| MAssignment { m }).collect();
    if let Some(bad) = out.iter().find(|a| a.has_consecutive_twos()) {
        return Err(SiltError::Combinatorics(format!(
            "{c}: assignment {:?} has consecutive m = 2",
            bad.m
        )));
    }
    Ok(out)
}

/// Spanning sets built from the two lemma clauses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanningWitness {
    /// Rising gaps plus one chosen gap per `r`-free label.
    pub a: BTreeSet<usize>,
    /// Falling gaps plus one chosen gap per `s`-free label.
    pub b: BTreeSet<usize>,
    /// `label -> gap` choices for `A`.
    pub a_choices: BTreeMap<usize, usize>,
    pub b_choices: BTreeMap<usize, usize>,
    /// Admissible gaps (`m_j <= 1`, containing `p_k`) per free label.
    pub a_candidates: BTreeMap<usize, Vec<usize>>,
    pub b_candidates: BTreeMap<usize, Vec<usize>>,
    pub a_spans: bool,
    pub b_spans: bool,
    /// Whether every gap of `A ∩ B` has `m_j <= 1`.
    pub intersection_admissible: bool,
}

fn check_m(c: &PairConfiguration, m: &MAssignment) -> Result<()> {
    if m.m.len() != c.gap_count() {
        return Err(SiltError::domain(
            "m",
            format!("expected {} gaps, got {}", c.gap_count(), m.m.len()),
        ));
    }
    if m.m.iter().any(|&x| x > 2) {
        return Err(SiltError::domain("m", "entries must be 0, 1 or 2"));
    }
    Ok(())
}

fn spans(u: &[UVector], gaps: &BTreeSet<usize>, n: usize) -> bool {
    let rows: Vec<Vec<i64>> = gaps.iter().map(|&j| u[j - 1].coefficients.clone()).collect();
    integer_rank(&rows) == n
}

/// Builds `A` and `B` component by component.
///
/// For each `r`-free `p_k` the first gap outside the rising set that contains
/// `p_k` and has `m_j <= 1` is added to `A`; `B` is built the same way from the
/// falling set and the `s`-free labels. Gaps with `u_j = 0` between components
/// are never used.
pub fn build_spanning_sets(c: &PairConfiguration, m: &MAssignment) -> Result<SpanningWitness> {
    check_m(c, m)?;
    let iso = find_isolated_intervals(c);
    if !iso.is_empty() {
        return Err(SiltError::domain(
            "configuration",
            format!("{c} has isolated intervals {iso:?}; remove them first"),
        ));
    }
    let n = c.n();
    let u = compute_u_vectors(c);
    let mut w = SpanningWitness {
        a: BTreeSet::new(),
        b: BTreeSet::new(),
        a_choices: BTreeMap::new(),
        b_choices: BTreeMap::new(),
        a_candidates: BTreeMap::new(),
        b_candidates: BTreeMap::new(),
        a_spans: false,
        b_spans: false,
        intersection_admissible: false,
    };
    for comp in connected_components(c) {
        let cu = compute_u_vectors(&comp.config);
        let sets = lemma_gap_sets(&comp.config);
        let free = find_free_variables(&comp.config);
        let parent = |j: usize| comp.parent_gap(j);
        let candidates = |k: usize, base: &BTreeSet<usize>| -> Vec<usize> {
            (1..=comp.config.gap_count())
                .filter(|j| !base.contains(j) && cu[j - 1].contains(k) && m.get(parent(*j)) <= 1)
                .map(parent)
                .collect()
        };
        w.a.extend(sets.rising.iter().map(|&j| parent(j)));
        w.b.extend(sets.falling.iter().map(|&j| parent(j)));
        for (free_set, base, choices, cands, side) in [
            (&free.r_free, &sets.rising, &mut w.a_choices, &mut w.a_candidates, "A"),
            (&free.s_free, &sets.falling, &mut w.b_choices, &mut w.b_candidates, "B"),
        ] {
            for &k in free_set {
                let label = comp.labels[k - 1];
                let list = candidates(k, base);
                let Some(&first) = list.first() else {
                    return Err(SiltError::Combinatorics(format!(
                        "{c} with m = {:?}: no gap with m <= 1 available for p_{label} in {side}",
                        m.m
                    )));
                };
                choices.insert(label, first);
                cands.insert(label, list);
            }
        }
    }
    w.a.extend(w.a_choices.values());
    w.b.extend(w.b_choices.values());
    w.a_spans = spans(&u, &w.a, n);
    w.b_spans = spans(&u, &w.b, n);
    w.intersection_admissible = w.a.intersection(&w.b).all(|&j| m.get(j) <= 1);
    if !(w.a_spans && w.b_spans) {
        return Err(SiltError::Combinatorics(format!(
            "{c} with m = {:?}: A = {:?} spans {}, B = {:?} spans {}",
            m.m, w.a, w.a_spans, w.b, w.b_spans
        )));
    }
    Ok(w)
}

/// A pair of bases `A`, `B` of nonzero gaps with `m_j <= 1` on `A ∩ B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    pub a: BTreeSet<usize>,
    pub b: BTreeSet<usize>,
}

/// Exhaustive search over pairs of `n`-element spanning gap sets, preferring the
/// smallest intersection. `None` when no admissible pair exists.
pub fn find_admissible_pair(c: &PairConfiguration, m: &MAssignment) -> Result<Option<AdmissiblePair>> {
    check_m(c, m)?;
    let n = c.n();
    if n > super::config::MAX_ENUMERATION_N {
        return Err(SiltError::Combinatorics(format!(
            "witness search supports n <= {}, got {n}",
            super::config::MAX_ENUMERATION_N
        )));
    }
    let u = compute_u_vectors(c);
    let nonzero: Vec<usize> = u.iter().filter(|v| !v.is_zero()).map(|v| v.gap_index).collect();
    let mut bases: Vec<BTreeSet<usize>> = Vec::new();
    let k = nonzero.len();
    if k < n {
        return Ok(None);
    }
    // Subsets of size n by bitmask.
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let set: BTreeSet<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| nonzero[i]).collect();
        if spans(&u, &set, n) {
            bases.push(set);
        }
    }
    let mut best: Option<(usize, AdmissiblePair)> = None;
    for a in &bases {
        for b in &bases {
            let inter: Vec<usize> = a.intersection(b).copied().collect();
            if inter.iter().any(|&j| m.get(j) > 1) {
                continue;
            }
            if best.as_ref().is_none_or(|(s, _)| inter.len() < *s) {
                best = Some((
                    inter.len(),
                    AdmissiblePair {
                        a: a.clone(),
                        b: b.clone(),
                    },
                ));
            }
        }
    }
    Ok(best.map(|(_, p)| p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arcs::enumerate_configurations;

    fn cfg(w: &str) -> PairConfiguration {
        w.parse().unwrap()
    }

    #[test]
    fn single_arc_assignments() {
        let a = enumerate_m_assignments(&cfg("r1 s1")).unwrap();
        assert_eq!(a, vec![MAssignment { m: vec![2] }]);
    }

    #[test]
    fn assignment_brute_force_n2() {
        // Independent enumeration over the 4^n endpoint choices.
        for c in enumerate_configurations(2).unwrap() {
            let mut expected = BTreeSet::new();
            for bits in 0u32..16 {
                let mut m = vec![0u8; 3];
                let mut ok = true;
                for a in 1..=4usize {
                    let g = if bits >> (a - 1) & 1 == 0 { a - 1 } else { a };
                    if g == 0 || g == 4 {
                        ok = false;
                        break;
                    }
                    m[g - 1] += 1;
                }
                if ok {
                    expected.insert(m);
                }
            }
            let got: BTreeSet<Vec<u8>> = enumerate_m_assignments(&c)
                .unwrap()
                .into_iter()
                .map(|a| a.m)
                .collect();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn no_consecutive_twos_and_bounded_count() {
        for n in 1..=4 {
            for c in enumerate_configurations(n).unwrap() {
                let a = enumerate_m_assignments(&c).unwrap();
                assert!(a.len() <= 4usize.pow(n as u32));
                for m in &a {
                    assert!(!m.has_consecutive_twos());
                    let total: usize = m.m.iter().map(|&x| x as usize).sum();
                    assert_eq!(total, 2 * n);
                }
            }
        }
    }

    #[test]
    fn crossing_pair_needs_no_augmentation() {
        let c = cfg("r1 r2 s1 s2");
        let w = build_spanning_sets(&c, &MAssignment::zeros(&c)).unwrap();
        assert!(w.a_spans && w.b_spans);
        assert_eq!(w.a, BTreeSet::from([1, 2]));
        let inc: BTreeSet<usize> = crate::arcs::classify_gaps(&c)
            .iter()
            .enumerate()
            .filter(|(_, &k)| k == crate::arcs::GapKind::Increasing)
            .map(|(j, _)| j + 1)
            .collect();
        assert_eq!(inc, BTreeSet::from([1, 2]));
        let rows: Vec<Vec<i64>> = inc
            .iter()
            .map(|&j| compute_u_vectors(&c)[j - 1].coefficients.clone())
            .collect();
        assert_eq!(integer_rank(&rows), 2);
    }

    #[test]
    fn isolated_configuration_is_rejected() {
        let c = cfg("r1 r2 s2 s1");
        assert!(matches!(
            build_spanning_sets(&c, &MAssignment::zeros(&c)),
            Err(SiltError::Domain { .. })
        ));
        assert!(build_spanning_sets(&cfg("r1 r2 s1 s2"), &MAssignment { m: vec![0, 0] }).is_err());
    }

    #[test]
    fn exhaustive_construction_small() {
        let mut valleys = 0;
        for n in 2..=3 {
            for c in enumerate_configurations(n).unwrap() {
                if !find_isolated_intervals(&c).is_empty() {
                    continue;
                }
                for m in enumerate_m_assignments(&c).unwrap() {
                    let w = build_spanning_sets(&c, &m).unwrap();
                    for (k, &j) in &w.a_choices {
                        assert!(m.get(j) <= 1 && compute_u_vectors(&c)[j - 1].contains(*k));
                    }
                    if !w.intersection_admissible {
                        valleys += 1;
                        let p = find_admissible_pair(&c, &m).unwrap().expect("witness");
                        assert!(p.a.intersection(&p.b).all(|&j| m.get(j) <= 1));
                    }
                }
            }
        }
        assert!(valleys > 0);
    }

    #[test]
    fn valley_example() {
        let c = cfg("r1 r2 s1 r3 s2 s3");
        let m = MAssignment::new(vec![2, 0, 2, 0, 2]).unwrap();
        let w = build_spanning_sets(&c, &m).unwrap();
        assert!(w.a.contains(&3) && w.b.contains(&3));
        assert!(!w.intersection_admissible);
        let p = find_admissible_pair(&c, &m).unwrap().unwrap();
        assert!(p.a.intersection(&p.b).all(|&j| m.get(j) <= 1));
    }
}
