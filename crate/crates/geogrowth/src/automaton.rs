//! Empirical inference of a deterministic automaton for the geodesic
//! language from lookahead cone-type signatures.
//!
//! The signature of a geodesic word is the set of its geodesic extensions of
//! length at most `k`; since all geodesics to an element have equal length,
//! the signature depends only on the endpoint. Elements sharing a signature
//! are merged into one state. The construction is validated, not certified:
//! path counts must reproduce the engine's counts exactly.

use std::collections::HashMap;

use num::{BigUint, One, Zero};
use thiserror::Error;

use crate::engine::{Census, EngineError};
use crate::group::Group;

#[derive(Debug, Error)]
pub enum AutomatonError {
    #[error("census radius {radius} too small for lookahead {k}")]
    RadiusTooSmall { radius: usize, k: usize },
    #[error("inconsistent at k={k}: {witness}")]
    Inconsistent { k: usize, witness: String },
    #[error("state {0} was never seen in the training interior; raise the training radius")]
    InsufficientTraining(usize),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Deterministic automaton for the geodesic language; every state accepts.
#[derive(Debug, Clone)]
pub struct ConeDfa {
    pub lookahead: usize,
    pub training_radius: usize,
    pub start: usize,
    pub alphabet: Vec<String>,
    /// `transitions[state][letter]`, `None` meaning reject.
    pub transitions: Vec<Vec<Option<usize>>>,
}

impl ConeDfa {
    pub fn num_states(&self) -> usize {
        self.transitions.len()
    }

    /// Numbers of accepted words of each length up to `n`, by iterated
    /// transition counting with big integers.
    pub fn count_per_length(&self, n: usize) -> Vec<BigUint> {
        let mut state_counts = vec![BigUint::zero(); self.num_states()];
        state_counts[self.start] = BigUint::one();
        let mut out = Vec::with_capacity(n + 1);
        out.push(BigUint::one());
        for _ in 1..=n {
            let mut next = vec![BigUint::zero(); self.num_states()];
            for (s, c) in state_counts.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for succ in self.transitions[s].iter().flatten() {
                    next[*succ] += c;
                }
            }
            out.push(next.iter().sum());
            state_counts = next;
        }
        out
    }

    /// Number of accepted words of length at most `n`.
    pub fn count_cumulative(&self, n: usize) -> BigUint {
        self.count_per_length(n).iter().sum()
    }

    /// Adjacency-list text export: one `state letter successor` line per
    /// transition.
    pub fn to_adjacency_text(&self) -> String {
        let mut out = String::new();
        for (s, row) in self.transitions.iter().enumerate() {
            for (x, succ) in row.iter().enumerate() {
                if let Some(t) = succ {
                    out.push_str(&format!("{} {} {}\n", s, self.alphabet[x], t));
                }
            }
        }
        out
    }

    pub fn counts_csv(&self, n: usize) -> String {
        let per_len = self.count_per_length(n);
        let mut out = String::from("length,words,cumulative\n");
        let mut acc = BigUint::zero();
        for (l, c) in per_len.iter().enumerate() {
            acc += c;
            out.push_str(&format!("{l},{c},{acc}\n"));
        }
        out
    }
}

/// Sorted list of geodesic extension words of length ≤ k from `elem`.
fn signature<G: Group>(
    group: &G,
    census: &Census<G>,
    elem: &G::Elem,
    dist: usize,
    k: usize,
) -> Result<Vec<Vec<usize>>, AutomatonError> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<(G::Elem, usize, Vec<usize>)> = vec![(elem.clone(), dist, Vec::new())];
    while let Some((g, d, word)) = stack.pop() {
        if word.len() == k {
            continue;
        }
        for (xi, x) in census.letter_elems.iter().enumerate() {
            let h = group.multiply(&g, x).map_err(EngineError::from)?;
            if let Some(r) = census.lookup(group, &h) {
                if r.dist as usize == d + 1 {
                    let mut w = word.clone();
                    w.push(xi);
                    out.push(w.clone());
                    stack.push((h, d + 1, w));
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Infers a cone-type automaton from a census, or reports the inconsistency
/// witness so the caller can raise `k`.
pub fn infer_geodesic_dfa<G: Group>(
    group: &G,
    census: &Census<G>,
    k: usize,
) -> Result<ConeDfa, AutomatonError> {
    if k == 0 || k + 1 >= census.n_max {
        return Err(AutomatonError::RadiusTooSmall { radius: census.n_max, k });
    }
    let sig_radius = census.n_max - k;
    let num_letters = census.letter_elems.len();

    // signature and state id for every element in the training region
    let mut state_of_sig: HashMap<Vec<Vec<usize>>, usize> = HashMap::new();
    let mut state_of_elem: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut states: Vec<Vec<Vec<usize>>> = Vec::new();
    for r in census.records() {
        let d = r.dist as usize;
        if d > sig_radius {
            continue;
        }
        let sig = signature(group, census, &r.elem, d, k)?;
        let id = *state_of_sig.entry(sig.clone()).or_insert_with(|| {
            states.push(sig);
            states.len() - 1
        });
        state_of_elem.insert(group.canonical_key(&r.elem), id);
    }

    // transitions, checked for determinism over all interior elements
    #[derive(Clone, Copy, PartialEq)]
    enum Cell {
        Unset,
        Reject,
        Go(usize),
    }
    let mut table = vec![vec![Cell::Unset; num_letters]; states.len()];
    let mut interior_seen = vec![false; states.len()];
    for r in census.records() {
        let d = r.dist as usize;
        if d + 1 > sig_radius {
            continue;
        }
        let s = state_of_elem[&group.canonical_key(&r.elem)];
        interior_seen[s] = true;
        for (xi, x) in census.letter_elems.iter().enumerate() {
            let h = group.multiply(&r.elem, x).map_err(EngineError::from)?;
            let cell = match census.lookup(group, &h) {
                Some(hr) if hr.dist as usize == d + 1 => {
                    Cell::Go(state_of_elem[&group.canonical_key(&h)])
                }
                _ => Cell::Reject,
            };
            match (table[s][xi], cell) {
                (Cell::Unset, c) => table[s][xi] = c,
                (a, b) if a == b => {}
                _ => {
                    return Err(AutomatonError::Inconsistent {
                        k,
                        witness: format!(
                            "elements with equal signatures disagree on letter {:?} from state {} (element {})",
                            census.labels[xi],
                            s,
                            group.display(&r.elem)
                        ),
                    });
                }
            }
        }
    }
    for (s, seen) in interior_seen.iter().enumerate() {
        if !seen {
            return Err(AutomatonError::InsufficientTraining(s));
        }
    }
    let start = state_of_elem[&group.canonical_key(&group.identity())];
    let transitions = table
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|c| match c {
                    Cell::Go(t) => Some(t),
                    _ => None,
                })
                .collect()
        })
        .collect();
    Ok(ConeDfa {
        lookahead: k,
        training_radius: census.n_max,
        start,
        alphabet: census.labels.clone(),
        transitions,
    })
}

/// Tries increasing lookaheads up to `k_max`, returning the first automaton
/// that infers consistently.
pub fn infer_with_escalation<G: Group>(
    group: &G,
    census: &Census<G>,
    k_max: usize,
) -> Result<ConeDfa, AutomatonError> {
    let mut last = None;
    for k in 1..=k_max {
        match infer_geodesic_dfa(group, census, k) {
            Ok(dfa) => return Ok(dfa),
            Err(e @ AutomatonError::Inconsistent { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(AutomatonError::RadiusTooSmall { radius: census.n_max, k: k_max }))
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub pass: bool,
    pub first_divergence: Option<usize>,
    pub checked_to: usize,
}

/// Exact comparison of automaton path counts against the engine census.
pub fn validate<G: Group>(dfa: &ConeDfa, census: &Census<G>) -> ValidationReport {
    let counts = dfa.count_per_length(census.n_max);
    let sigma = census.sigma_big_gamma();
    let first_divergence = (0..=census.n_max).find(|&l| counts[l] != sigma[l]);
    ValidationReport { pass: first_divergence.is_none(), first_divergence, checked_to: census.n_max }
}
