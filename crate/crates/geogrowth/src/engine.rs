//! Layered ball enumeration with exact geodesic counting.
//!
//! The ball is grown frontier by frontier. For an element `h` first seen at
//! distance `l+1`, every edge from the previous layer contributes its
//! geodesic count, so `p(h) = Σ p(g)` over geodesic predecessors `g = h·x^-1`.
//! Counts are arbitrary precision; doubled alphabets make them grow like 2^n.

use std::collections::{BTreeSet, HashMap};

use num::rational::Ratio;
use num::{BigUint, One, Zero};
use thiserror::Error;

use crate::genset::{GenSet, GenSetError};
use crate::group::{Epimorphism, Group, GroupError};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    GenSet(#[from] GenSetError),
    #[error("element cap {cap} exceeded; last complete radius {last_complete_radius}")]
    ElementCap { cap: usize, last_complete_radius: usize },
    #[error("element lies outside the computed ball")]
    OutsideBall,
    #[error("word is longer than the census radius")]
    WordTooLong,
    #[error("unknown letter label {0:?}")]
    UnknownLabel(String),
    #[error("requested letter statistics were not tracked at census time")]
    TrackingDisabled,
    #[error("epimorphism maps a letter to the identity")]
    EpimorphismCollapsesLetter,
}

/// Opt-in per-element statistics and resource limits for a census run.
#[derive(Debug, Clone)]
pub struct CensusOptions {
    /// Letter indices whose occurrence counts are tracked (min/max over
    /// geodesics per element).
    pub tracked: Option<BTreeSet<usize>>,
    /// Letter indices forming the pure subalphabet whose reachability flag
    /// is maintained.
    pub pure_sub: Option<BTreeSet<usize>>,
    pub element_cap: usize,
}

pub const DEFAULT_ELEMENT_CAP: usize = 20_000_000;

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions { tracked: None, pure_sub: None, element_cap: DEFAULT_ELEMENT_CAP }
    }
}

#[derive(Debug, Clone)]
pub struct Record<E> {
    pub elem: E,
    pub dist: u32,
    pub count: BigUint,
    pub tracked_min: u32,
    pub tracked_max: u32,
    pub pure: bool,
}

#[derive(Debug, Clone)]
pub struct LengthStats {
    pub sphere_size: u64,
    pub sphere_geodesics: BigUint,
    pub tracked_max: u32,
    pub pure_reachable: bool,
}

/// Immutable result of a ball enumeration of radius `n_max`.
pub struct Census<G: Group> {
    pub n_max: usize,
    pub labels: Vec<String>,
    pub letter_elems: Vec<G::Elem>,
    records: Vec<Record<G::Elem>>,
    index: HashMap<Vec<u8>, usize>,
    pub per_len: Vec<LengthStats>,
    pub options: CensusOptions,
}

/// Exact distances and geodesic counts for the full ball of radius `n_max`.
pub fn bfs_census<G: Group>(
    group: &G,
    genset: &GenSet<G>,
    n_max: usize,
    opts: &CensusOptions,
) -> Result<Census<G>, EngineError> {
    let letters: Vec<G::Elem> = genset.elements();
    let tracked: Vec<bool> = (0..letters.len())
        .map(|i| opts.tracked.as_ref().is_some_and(|s| s.contains(&i)))
        .collect();
    let pure_sub: Vec<bool> = (0..letters.len())
        .map(|i| opts.pure_sub.as_ref().is_some_and(|s| s.contains(&i)))
        .collect();

    let mut records: Vec<Record<G::Elem>> = Vec::new();
    let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut per_len: Vec<LengthStats> = Vec::new();

    let id = group.identity();
    index.insert(group.canonical_key(&id), 0);
    records.push(Record {
        elem: id,
        dist: 0,
        count: BigUint::one(),
        tracked_min: 0,
        tracked_max: 0,
        pure: true,
    });
    let mut layer: Vec<usize> = vec![0];
    per_len.push(LengthStats {
        sphere_size: 1,
        sphere_geodesics: BigUint::one(),
        tracked_max: 0,
        pure_reachable: true,
    });

    for depth in 0..n_max {
        let mut next_layer: Vec<usize> = Vec::new();
        for &gi in &layer {
            for (xi, x) in letters.iter().enumerate() {
                let g = records[gi].elem.clone();
                let h = group.multiply(&g, x)?;
                let key = group.canonical_key(&h);
                let tr = if tracked[xi] { 1 } else { 0 };
                match index.get(&key) {
                    Some(&hi) => {
                        if records[hi].dist as usize == depth + 1 {
                            let add = records[gi].count.clone();
                            records[hi].count += add;
                            let cand_max = records[gi].tracked_max + tr;
                            let cand_min = records[gi].tracked_min + tr;
                            if cand_max > records[hi].tracked_max {
                                records[hi].tracked_max = cand_max;
                            }
                            if cand_min < records[hi].tracked_min {
                                records[hi].tracked_min = cand_min;
                            }
                            if records[gi].pure && pure_sub[xi] {
                                records[hi].pure = true;
                            }
                        }
                        // dist <= depth: non-geodesic edge, ignore
                    }
                    None => {
                        if records.len() >= opts.element_cap {
                            return Err(EngineError::ElementCap {
                                cap: opts.element_cap,
                                last_complete_radius: depth,
                            });
                        }
                        let hi = records.len();
                        index.insert(key, hi);
                        records.push(Record {
                            elem: h,
                            dist: (depth + 1) as u32,
                            count: records[gi].count.clone(),
                            tracked_min: records[gi].tracked_min + tr,
                            tracked_max: records[gi].tracked_max + tr,
                            pure: records[gi].pure && pure_sub[xi],
                        });
                        next_layer.push(hi);
                    }
                }
            }
        }
        let mut stats = LengthStats {
            sphere_size: next_layer.len() as u64,
            sphere_geodesics: BigUint::zero(),
            tracked_max: 0,
            pure_reachable: false,
        };
        for &hi in &next_layer {
            stats.sphere_geodesics += records[hi].count.clone();
            if records[hi].tracked_max > stats.tracked_max {
                stats.tracked_max = records[hi].tracked_max;
            }
            if records[hi].pure {
                stats.pure_reachable = true;
            }
        }
        per_len.push(stats);
        layer = next_layer;
    }

    Ok(Census {
        n_max,
        labels: genset.labels(),
        letter_elems: letters,
        records,
        index,
        per_len,
        options: opts.clone(),
    })
}

impl<G: Group> Census<G> {
    pub fn lookup(&self, group: &G, elem: &G::Elem) -> Option<&Record<G::Elem>> {
        self.index.get(&group.canonical_key(elem)).map(|&i| &self.records[i])
    }

    pub fn records(&self) -> &[Record<G::Elem>] {
        &self.records
    }

    pub fn element_count(&self) -> usize {
        self.records.len()
    }

    /// Exact geodesic count `p_X(g)`.
    pub fn geodesic_count_to(&self, group: &G, elem: &G::Elem) -> Result<&BigUint, EngineError> {
        self.lookup(group, elem).map(|r| &r.count).ok_or(EngineError::OutsideBall)
    }

    pub fn distance_to(&self, group: &G, elem: &G::Elem) -> Result<usize, EngineError> {
        self.lookup(group, elem).map(|r| r.dist as usize).ok_or(EngineError::OutsideBall)
    }

    /// Per-length geodesic word counts `σ_Γ(l)`.
    pub fn sigma_big_gamma(&self) -> Vec<BigUint> {
        self.per_len.iter().map(|s| s.sphere_geodesics.clone()).collect()
    }

    /// Sphere sizes `σ_γ(l)`.
    pub fn sigma_gamma(&self) -> Vec<u64> {
        self.per_len.iter().map(|s| s.sphere_size).collect()
    }

    /// Cumulative geodesic growth `Γ(n)`.
    pub fn big_gamma(&self) -> Vec<BigUint> {
        let mut acc = BigUint::zero();
        self.per_len
            .iter()
            .map(|s| {
                acc += s.sphere_geodesics.clone();
                acc.clone()
            })
            .collect()
    }

    /// Cumulative word growth `γ(n)`.
    pub fn gamma(&self) -> Vec<u64> {
        let mut acc = 0u64;
        self.per_len
            .iter()
            .map(|s| {
                acc += s.sphere_size;
                acc
            })
            .collect()
    }

    fn letter_index(&self, label: &str) -> Result<usize, EngineError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| EngineError::UnknownLabel(label.to_string()))
    }

    pub fn evaluate_word(&self, group: &G, word: &[&str]) -> Result<G::Elem, EngineError> {
        let mut acc = group.identity();
        for label in word {
            let i = self.letter_index(label)?;
            acc = group.multiply(&acc, &self.letter_elems[i])?;
        }
        Ok(acc)
    }

    /// True iff every prefix of length `i` evaluates to an element at
    /// distance `i`.
    pub fn is_geodesic_word(&self, group: &G, word: &[&str]) -> Result<bool, EngineError> {
        if word.len() > self.n_max {
            return Err(EngineError::WordTooLong);
        }
        let mut acc = group.identity();
        for (i, label) in word.iter().enumerate() {
            let li = self.letter_index(label)?;
            acc = group.multiply(&acc, &self.letter_elems[li])?;
            if self.distance_to(group, &acc)? != i + 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Per-length maximum over geodesic words of tracked-letter occurrences.
    pub fn letter_stats(&self, tracked: &BTreeSet<usize>) -> Result<Vec<u32>, EngineError> {
        match &self.options.tracked {
            Some(t) if t == tracked => Ok(self.per_len.iter().map(|s| s.tracked_max).collect()),
            _ => Err(EngineError::TrackingDisabled),
        }
    }

    /// Longest geodesic word using only letters of the configured pure
    /// subalphabet, restricted to the ball of radius `within`.
    pub fn pure_subalphabet_max_geodesic_length(
        &self,
        sub: &BTreeSet<usize>,
        within: usize,
    ) -> Result<usize, EngineError> {
        match &self.options.pure_sub {
            Some(s) if s == sub => {}
            _ => return Err(EngineError::TrackingDisabled),
        }
        let limit = within.min(self.n_max);
        Ok((0..=limit).rev().find(|&l| self.per_len[l].pure_reachable).unwrap_or(0))
    }

    /// True iff `|word| <= θ · d(1, value)`.
    pub fn theta_efficient(
        &self,
        group: &G,
        word: &[&str],
        theta: Ratio<u64>,
    ) -> Result<bool, EngineError> {
        if word.len() > self.n_max {
            return Err(EngineError::WordTooLong);
        }
        let value = self.evaluate_word(group, word)?;
        let d = self.distance_to(group, &value)? as u64;
        Ok(word.len() as u64 * theta.denom() <= theta.numer() * d)
    }

    /// CSV export with exact decimal integers and LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("length,sphere_size,sphere_geodesics,cumulative_gamma,cumulative_Gamma\n");
        let gamma = self.gamma();
        let big_gamma = self.big_gamma();
        for l in 0..=self.n_max {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                l, self.per_len[l].sphere_size, self.per_len[l].sphere_geodesics, gamma[l], big_gamma[l]
            ));
        }
        out
    }
}

#[derive(Debug)]
pub struct QuotientReport {
    pub holds: bool,
    pub first_violation: Option<usize>,
    pub source_big_gamma: Vec<BigUint>,
    pub target_big_gamma: Vec<BigUint>,
}

/// Runs censuses on both sides of an epimorphism, taking the image letters
/// as a multiset, and checks `Γ_G(l) ≥ Γ_G'(l)` for `l ≤ n`.
pub fn quotient_compare<S: Group, T: Group>(
    phi: &Epimorphism<S, T>,
    genset: &GenSet<S>,
    n: usize,
    opts: &CensusOptions,
) -> Result<QuotientReport, EngineError> {
    phi.check_homomorphism(&genset.elements())?;
    let target_id = phi.target.identity();
    let mut image_letters = Vec::new();
    for l in &genset.letters {
        let img = phi.apply(&l.elem)?;
        if img == target_id {
            return Err(EngineError::EpimorphismCollapsesLetter);
        }
        image_letters.push((l.label.clone(), img));
    }
    let image_genset: GenSet<T> = GenSet::symmetric_closure(phi.target, image_letters)?;
    let source = bfs_census(phi.source, genset, n, opts)?;
    let target = bfs_census(phi.target, &image_genset, n, opts)?;
    let sg = source.big_gamma();
    let tg = target.big_gamma();
    let first_violation = (0..=n).find(|&l| sg[l] < tg[l]);
    Ok(QuotientReport {
        holds: first_violation.is_none(),
        first_violation,
        source_big_gamma: sg,
        target_big_gamma: tg,
    })
}
