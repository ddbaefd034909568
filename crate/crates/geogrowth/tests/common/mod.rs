//! Brute-force word enumeration, independent of the engine: every word over
//! the alphabet is evaluated, so distances, geodesic counts and geodesic
//! word sets are obtained without any shortest-path reasoning.

// each test target uses a different subset of these helpers
#![allow(dead_code)]

use std::collections::HashMap;

use geogrowth::genset::GenSet;
use geogrowth::group::Group;
use num::BigUint;

pub struct BruteForce<G: Group> {
    pub max_len: usize,
    pub labels: Vec<String>,
    pub dist: HashMap<Vec<u8>, usize>,
    pub count: HashMap<Vec<u8>, BigUint>,
    /// Geodesic words by length, as letter-index sequences.
    pub geodesic_words: Vec<Vec<Vec<usize>>>,
    pub sphere: Vec<u64>,
    _marker: std::marker::PhantomData<G>,
}

impl<G: Group> BruteForce<G> {
    pub fn sigma_big_gamma(&self) -> Vec<BigUint> {
        self.geodesic_words.iter().map(|ws| BigUint::from(ws.len())).collect()
    }

    pub fn word_labels(&self, word: &[usize]) -> Vec<String> {
        word.iter().map(|&i| self.labels[i].clone()).collect()
    }
}

/// Membership in the known geodesic language for the swap extension of the
/// plane over {a, a^-1, t}: a^x, a^x t a^y, and a^{x1} t a^{y1} t a^{x2}
/// with x1·x2 >= 0 and y1 != 0, exponents over Z.
pub fn swap_language_member(word: &[usize], a: usize, a_inv: usize, t: usize) -> bool {
    let mut segments: Vec<Option<i64>> = Vec::new();
    let mut current: Option<i64> = Some(0);
    let mut t_count = 0usize;
    for &l in word {
        if l == t {
            segments.push(current);
            current = Some(0);
            t_count += 1;
        } else {
            let step = if l == a {
                1
            } else if l == a_inv {
                -1
            } else {
                unreachable!()
            };
            current = match current {
                Some(0) => Some(step),
                Some(x) if (x > 0) == (step > 0) => Some(x + step),
                _ => None,
            };
        }
    }
    segments.push(current);
    if segments.iter().any(Option::is_none) {
        return false;
    }
    let seg: Vec<i64> = segments.into_iter().map(Option::unwrap).collect();
    match t_count {
        0 | 1 => true,
        2 => seg[1] != 0 && seg[0] * seg[2] >= 0,
        _ => false,
    }
}

/// Enumerates all |X|^l words for every l ≤ max_len. The distance of an
/// element is the least length of a word evaluating to it; a word is
/// geodesic iff its endpoint's distance equals its length.
pub fn brute_force<G: Group>(group: &G, genset: &GenSet<G>, max_len: usize) -> BruteForce<G> {
    let letters = genset.elements();
    let labels = genset.labels();
    let mut dist: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut count: HashMap<Vec<u8>, BigUint> = HashMap::new();
    let mut sphere = vec![0u64; max_len + 1];

    // (word, endpoint) for the current length
    let mut layer: Vec<(Vec<usize>, G::Elem)> = vec![(Vec::new(), group.identity())];
    let mut all_layers: Vec<Vec<(Vec<usize>, G::Elem)>> = Vec::new();
    for len in 0..=max_len {
        for (_, e) in &layer {
            let key = group.canonical_key(e);
            match dist.get(&key) {
                None => {
                    dist.insert(key.clone(), len);
                    count.insert(key, BigUint::from(1u32));
                    sphere[len] += 1;
                }
                Some(&d) if d == len => {
                    *count.get_mut(&key).unwrap() += 1u32;
                }
                _ => {}
            }
        }
        all_layers.push(std::mem::take(&mut layer));
        if len < max_len {
            for (w, e) in &all_layers[len] {
                for (i, x) in letters.iter().enumerate() {
                    let mut w2 = w.clone();
                    w2.push(i);
                    layer.push((w2, group.multiply(e, x).unwrap()));
                }
            }
        }
    }

    let geodesic_words = all_layers
        .iter()
        .enumerate()
        .map(|(len, words)| {
            words
                .iter()
                .filter(|(_, e)| dist[&group.canonical_key(e)] == len)
                .map(|(w, _)| w.clone())
                .collect()
        })
        .collect();

    BruteForce {
        max_len,
        labels,
        dist,
        count,
        geodesic_words,
        sphere,
        _marker: std::marker::PhantomData,
    }
}
