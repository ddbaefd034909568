//! Generating sets as ordered lists of labeled letters with multiset
//! semantics: several letters may map to the same group element. All
//! constructors return symmetric, identity-free sets.

use std::collections::HashMap;

use thiserror::Error;

use crate::group::{
    lattice_index, ClosureIndex, Group, GroupElement, GroupError, VirtuallyAbelianGroup,
};

#[derive(Debug, Error)]
pub enum GenSetError {
    #[error("letter {0:?} maps to the identity element")]
    IdentityLetter(String),
    #[error("unknown letter label {0:?}")]
    UnknownLabel(String),
    #[error("cannot tokenize word {0:?} over the base labels")]
    BadWord(String),
    #[error("empty letter list")]
    Empty,
    #[error("letters do not generate the group (checked to radius {0})")]
    DoesNotGenerate(usize),
    #[error("normal closure of x has infinite index")]
    InfiniteClosure,
    #[error("x must lie in the translation lattice")]
    NotInLattice,
    #[error("short set S does not generate the lattice")]
    ShortSetTooSmall,
    #[error("no letters outside the lattice subgroup")]
    NoFlippingLetters,
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone)]
pub struct Letter<E> {
    pub label: String,
    pub elem: E,
    /// Index of the formal inverse letter; self for involutions.
    pub inverse: usize,
    pub dominant: bool,
}

#[derive(Debug, Clone)]
pub struct GenSet<G: Group> {
    pub letters: Vec<Letter<G::Elem>>,
}

fn derived_inverse_label(label: &str) -> String {
    match label.strip_suffix("^-1") {
        Some(base) => base.to_string(),
        None => format!("{label}^-1"),
    }
}

impl<G: Group> GenSet<G> {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.letters.iter().map(|l| l.label.clone()).collect()
    }

    pub fn elements(&self) -> Vec<G::Elem> {
        self.letters.iter().map(|l| l.elem.clone()).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.letters.iter().position(|l| l.label == label)
    }

    pub fn inverse_label(&self, i: usize) -> &str {
        &self.letters[self.letters[i].inverse].label
    }

    pub fn dominant_indices(&self) -> Vec<usize> {
        (0..self.letters.len()).filter(|&i| self.letters[i].dominant).collect()
    }

    pub fn non_dominant_indices(&self) -> Vec<usize> {
        (0..self.letters.len()).filter(|&i| !self.letters[i].dominant).collect()
    }

    /// Builds a symmetric set from labeled letters, pairing existing mutual
    /// inverses and appending missing formal inverses with derived labels.
    /// Involutions become self-inverse letters and are not duplicated.
    pub fn symmetric_closure(
        group: &G,
        letters: Vec<(String, G::Elem)>,
    ) -> Result<GenSet<G>, GenSetError> {
        if letters.is_empty() {
            return Err(GenSetError::Empty);
        }
        let identity = group.identity();
        let mut out: Vec<Letter<G::Elem>> = Vec::new();
        for (label, elem) in letters {
            if elem == identity {
                return Err(GenSetError::IdentityLetter(label));
            }
            out.push(Letter { label, elem, inverse: usize::MAX, dominant: false });
        }
        let n = out.len();
        for i in 0..n {
            if out[i].inverse != usize::MAX {
                continue;
            }
            let inv = group.inverse(&out[i].elem)?;
            if inv == out[i].elem {
                out[i].inverse = i;
                continue;
            }
            // pair with a later unpaired letter carrying the inverse element
            let partner = (i + 1..n).find(|&j| out[j].inverse == usize::MAX && out[j].elem == inv);
            match partner {
                Some(j) => {
                    out[i].inverse = j;
                    out[j].inverse = i;
                }
                None => {
                    let j = out.len();
                    let label = derived_inverse_label(&out[i].label);
                    out.push(Letter { label, elem: inv, inverse: i, dominant: false });
                    out[i].inverse = j;
                }
            }
        }
        // appended letters already have their pairing set
        for l in &out {
            debug_assert!(l.inverse < out.len());
        }
        Ok(GenSet { letters: out })
    }

    /// Duplicates every letter with a fresh primed label mapping to the same
    /// element.
    pub fn double(&self) -> GenSet<G> {
        let n = self.letters.len();
        let mut letters = self.letters.clone();
        for l in &self.letters {
            letters.push(Letter {
                label: format!("{}'", l.label),
                elem: l.elem.clone(),
                inverse: l.inverse + n,
                dominant: l.dominant,
            });
        }
        GenSet { letters }
    }

    /// New letters for the values of words over this set's labels,
    /// symmetrized.
    pub fn from_words(
        group: &G,
        base: &GenSet<G>,
        words: &[&str],
    ) -> Result<GenSet<G>, GenSetError> {
        let mut letters = Vec::new();
        for &word in words {
            let value = base.evaluate(group, word)?;
            letters.push((word.to_string(), value));
        }
        GenSet::symmetric_closure(group, letters)
    }

    /// Evaluates a word written as a concatenation of letter labels.
    pub fn evaluate(&self, group: &G, word: &str) -> Result<G::Elem, GenSetError> {
        let indices = self
            .tokenize(word)
            .ok_or_else(|| GenSetError::BadWord(word.to_string()))?;
        let mut acc = group.identity();
        for i in indices {
            acc = group.multiply(&acc, &self.letters[i].elem)?;
        }
        Ok(acc)
    }

    /// Splits a concatenated word into letter indices, backtracking over
    /// label boundaries.
    pub fn tokenize(&self, word: &str) -> Option<Vec<usize>> {
        fn go<E>(letters: &[Letter<E>], rest: &str, acc: &mut Vec<usize>) -> bool {
            if rest.is_empty() {
                return true;
            }
            // try longer labels first so "a^-1" wins over "a"
            let mut candidates: Vec<usize> = (0..letters.len())
                .filter(|&i| rest.starts_with(&letters[i].label))
                .collect();
            candidates.sort_by_key(|&i| std::cmp::Reverse(letters[i].label.len()));
            for i in candidates {
                acc.push(i);
                if go(letters, &rest[letters[i].label.len()..], acc) {
                    return true;
                }
                acc.pop();
            }
            false
        }
        let mut acc = Vec::new();
        if go(&self.letters, word, &mut acc) {
            Some(acc)
        } else {
            None
        }
    }

    /// Checks symmetry, identity-freeness and generation up to `radius`.
    pub fn validate(&self, group: &G, radius: usize) -> Result<(), GenSetError> {
        if self.letters.is_empty() {
            return Err(GenSetError::Empty);
        }
        let identity = group.identity();
        for (i, l) in self.letters.iter().enumerate() {
            if l.elem == identity {
                return Err(GenSetError::IdentityLetter(l.label.clone()));
            }
            let j = l.inverse;
            if j >= self.letters.len()
                || self.letters[j].inverse != i
                || group.inverse(&l.elem)? != self.letters[j].elem
            {
                return Err(GenSetError::BadWord(format!("broken inverse pairing at {}", l.label)));
            }
        }
        if !group.generates(&self.elements(), radius) {
            return Err(GenSetError::DoesNotGenerate(radius));
        }
        Ok(())
    }
}

/// One short generator from the Example 4.2 construction: an element of the
/// lattice subgroup together with a two-letter spelling over the ambient set.
#[derive(Debug, Clone)]
pub struct ShortGenerator {
    pub elem: GroupElement,
    pub spelling: [String; 2],
}

/// Splits `X` into letters inside and outside the lattice subgroup `H`, and
/// returns `S = {z^2 | z in H-letters} ∪ {yy' | y,y' outside H}` with
/// identity products discarded, deduplicated by element.
pub fn g2_short_set(
    group: &VirtuallyAbelianGroup,
    genset: &GenSet<VirtuallyAbelianGroup>,
) -> Result<Vec<ShortGenerator>, GenSetError> {
    let identity = group.identity();
    let inside: Vec<&Letter<GroupElement>> =
        genset.letters.iter().filter(|l| l.elem.f == group.finite.identity).collect();
    let outside: Vec<&Letter<GroupElement>> =
        genset.letters.iter().filter(|l| l.elem.f != group.finite.identity).collect();
    if outside.is_empty() {
        return Err(GenSetError::NoFlippingLetters);
    }
    let mut seen: HashMap<Vec<u8>, ()> = HashMap::new();
    let mut out = Vec::new();
    let mut push = |elem: GroupElement, spelling: [String; 2]| {
        if elem != identity && seen.insert(group.canonical_key(&elem), ()).is_none() {
            out.push(ShortGenerator { elem, spelling });
        }
    };
    for z in &inside {
        let sq = group.multiply(&z.elem, &z.elem)?;
        push(sq, [z.label.clone(), z.label.clone()]);
    }
    for y in &outside {
        for y2 in &outside {
            let prod = group.multiply(&y.elem, &y2.elem)?;
            push(prod, [y.label.clone(), y2.label.clone()]);
        }
    }
    Ok(out)
}

/// The §-style generating set `X = S ∪ {x^N, x^-N} ∪ R ∪ R^-1` built from a
/// dominating element `x`, a power `N` and a seed `S0` for the short set.
///
/// `R` consists of the coset representatives `(0, f)` for the nontrivial
/// finite parts. `D` is computed generically from the representatives and
/// folded into the seed; `S` is the closure of the seed under inversion and
/// conjugation by all representatives. The two power letters are tagged as
/// dominant.
pub fn main_theorem_genset(
    group: &VirtuallyAbelianGroup,
    x: &GroupElement,
    n_power: u32,
    s0: &[GroupElement],
) -> Result<GenSet<VirtuallyAbelianGroup>, GenSetError> {
    if x.f != group.finite.identity {
        return Err(GenSetError::NotInLattice);
    }
    match group.normal_closure_index(x)? {
        ClosureIndex::Infinite => return Err(GenSetError::InfiniteClosure),
        ClosureIndex::Finite(_) => {}
    }
    let identity = group.identity();

    // coset representatives (0, f) for f != identity, closed under inverses
    let mut reps: Vec<(String, GroupElement)> = Vec::new();
    for f in 0..group.finite.order {
        if f == group.finite.identity {
            continue;
        }
        reps.push((format!("q{f}"), GroupElement::new(vec![0; group.rank], f)));
    }
    let rep_elems: Vec<GroupElement> = reps.iter().map(|(_, e)| e.clone()).collect();
    let mut rep_pool: Vec<GroupElement> = rep_elems.clone();
    for r in &rep_elems {
        let ri = group.inverse(r)?;
        if !rep_pool.contains(&ri) {
            rep_pool.push(ri);
        }
    }

    // D = { p q r^-1 | pi(r) = pi(p) pi(q) }, identities discarded
    let mut seed: Vec<GroupElement> = Vec::new();
    for p in &rep_pool {
        for q in &rep_pool {
            for r in &rep_pool {
                if group.finite.mult[p.f][q.f] != r.f {
                    continue;
                }
                let pq = group.multiply(p, q)?;
                let d = group.multiply(&pq, &group.inverse(r)?)?;
                if d != identity {
                    seed.push(d);
                }
            }
        }
    }
    for s in s0 {
        if s.f != group.finite.identity {
            return Err(GenSetError::NotInLattice);
        }
        if *s == identity {
            return Err(GenSetError::IdentityLetter("S0 element".into()));
        }
        seed.push(s.clone());
    }

    // close under inversion and conjugation by the representatives
    let mut closure: Vec<GroupElement> = Vec::new();
    let mut seen: HashMap<Vec<u8>, ()> = HashMap::new();
    let mut work = seed;
    while let Some(s) = work.pop() {
        if seen.insert(group.canonical_key(&s), ()).is_some() {
            continue;
        }
        closure.push(s.clone());
        work.push(group.inverse(&s)?);
        for r in &rep_pool {
            let conj = group.multiply(&group.multiply(r, &s)?, &group.inverse(r)?)?;
            work.push(conj);
        }
    }
    let vectors: Vec<Vec<i64>> = closure.iter().map(|s| s.v.clone()).collect();
    if lattice_index(&vectors, group.rank) != Some(1) {
        return Err(GenSetError::ShortSetTooSmall);
    }
    // deterministic order for labeling
    closure.sort_by_key(|s| group.canonical_key(s));

    let mut letters: Vec<(String, GroupElement)> = Vec::new();
    for (i, s) in closure.iter().enumerate() {
        letters.push((format!("s{i}"), s.clone()));
    }
    let mut xn = identity.clone();
    for _ in 0..n_power {
        xn = group.multiply(&xn, x)?;
    }
    if xn == identity {
        return Err(GenSetError::IdentityLetter("x^N".into()));
    }
    letters.push(("y".into(), xn));
    for (label, elem) in reps {
        letters.push((label, elem));
    }
    let mut genset = GenSet::symmetric_closure(group, letters)?;
    for l in genset.letters.iter_mut() {
        if l.label == "y" || l.label == "y^-1" {
            l.dominant = true;
        }
    }
    Ok(genset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builtin as groups;
    use crate::group::Group;

    fn letter(label: &str, v: Vec<i64>, f: usize) -> (String, GroupElement) {
        (label.to_string(), GroupElement::new(v, f))
    }

    #[test]
    fn symmetric_closure_z() {
        let g = groups::z();
        let x = GenSet::symmetric_closure(&g, vec![letter("t", vec![1], 0)]).unwrap();
        assert_eq!(x.labels(), vec!["t", "t^-1"]);
        assert_eq!(x.letters[0].inverse, 1);
        assert_eq!(x.letters[1].inverse, 0);
    }

    #[test]
    fn symmetric_closure_g1_involution() {
        let g = groups::g1();
        let x = GenSet::symmetric_closure(
            &g,
            vec![letter("a", vec![1, 0], 0), letter("t", vec![0, 0], 1)],
        )
        .unwrap();
        assert_eq!(x.labels(), vec!["a", "t", "a^-1"]);
        // t is its own inverse
        let ti = x.index_of("t").unwrap();
        assert_eq!(x.letters[ti].inverse, ti);
    }

    #[test]
    fn symmetric_closure_rejects_identity() {
        let g = groups::z();
        let err = GenSet::symmetric_closure(&g, vec![letter("a", vec![0], 0)]);
        assert!(matches!(err, Err(GenSetError::IdentityLetter(_))));
    }

    #[test]
    fn symmetric_closure_idempotent() {
        let g = groups::z_cross_c2();
        let x = GenSet::symmetric_closure(
            &g,
            vec![letter("t", vec![1], 0), letter("a", vec![0], 1)],
        )
        .unwrap();
        let again = GenSet::symmetric_closure(
            &g,
            x.letters.iter().map(|l| (l.label.clone(), l.elem.clone())).collect(),
        )
        .unwrap();
        assert_eq!(again.len(), x.len());
    }

    #[test]
    fn double_z() {
        let g = groups::z();
        let x = GenSet::symmetric_closure(&g, vec![letter("t", vec![1], 0)]).unwrap();
        let d = x.double();
        assert_eq!(d.len(), 4);
        assert_eq!(d.letters[2].elem, d.letters[0].elem);
        assert_eq!(d.letters[2].label, "t'");
        d.validate(&g, 3).unwrap();
    }

    #[test]
    fn from_words_substitution() {
        // Example substituting c = at in Z x C2
        let g = groups::z_cross_c2();
        let base = GenSet::symmetric_closure(
            &g,
            vec![letter("t", vec![1], 0), letter("a", vec![0], 1)],
        )
        .unwrap();
        let x = GenSet::from_words(&g, &base, &["t", "at"]).unwrap();
        assert_eq!(x.len(), 4);
        let c = x.index_of("at").unwrap();
        assert_eq!(x.letters[c].elem, GroupElement::new(vec![1], 1));
        // c^2 = t^2
        let c2 = g.multiply(&x.letters[c].elem, &x.letters[c].elem).unwrap();
        assert_eq!(c2, GroupElement::new(vec![2], 0));
    }

    #[test]
    fn from_words_repetition_preserved() {
        let g = groups::z2();
        let base = GenSet::symmetric_closure(
            &g,
            vec![letter("a", vec![1, 0], 0), letter("b", vec![0, 1], 0)],
        )
        .unwrap();
        let x = GenSet::from_words(&g, &base, &["a", "b", "ab"]).unwrap();
        assert_eq!(x.len(), 6);
        let err = GenSet::from_words(&g, &base, &["a", "a"]);
        // duplicates are letters in their own right
        assert_eq!(err.unwrap().len(), 4);
    }

    #[test]
    fn from_words_identity_rejected() {
        let g = groups::z();
        let base = GenSet::symmetric_closure(&g, vec![letter("t", vec![1], 0)]).unwrap();
        assert!(GenSet::from_words(&g, &base, &["tt^-1"]).is_err());
    }

    #[test]
    fn main_theorem_g1() {
        let g = groups::g1();
        let a = GroupElement::translation(vec![1, 0]);
        let x = main_theorem_genset(&g, &a, 3, &[a.clone()]).unwrap();
        // S = {a^{±1}, b^{±1}}, plus y = a^3, y^-1, and the involution t
        assert_eq!(x.len(), 7);
        let mut elems = x.elements();
        elems.sort_by_key(|e| g.canonical_key(e));
        let mut expected = vec![
            GroupElement::translation(vec![1, 0]),
            GroupElement::translation(vec![-1, 0]),
            GroupElement::translation(vec![0, 1]),
            GroupElement::translation(vec![0, -1]),
            GroupElement::translation(vec![3, 0]),
            GroupElement::translation(vec![-3, 0]),
            GroupElement::new(vec![0, 0], 1),
        ];
        expected.sort_by_key(|e| g.canonical_key(e));
        assert_eq!(elems, expected);
        assert_eq!(x.dominant_indices().len(), 2);
        x.validate(&g, 4).unwrap();
    }

    #[test]
    fn main_theorem_dinf() {
        let g = groups::dinf();
        let t = GroupElement::translation(vec![1]);
        let x = main_theorem_genset(&g, &t, 2, &[t.clone()]).unwrap();
        // {t^{±1}, t^{±2}, s}
        assert_eq!(x.len(), 5);
        let mut elems = x.elements();
        elems.sort_by_key(|e| g.canonical_key(e));
        let mut expected = vec![
            GroupElement::translation(vec![1]),
            GroupElement::translation(vec![-1]),
            GroupElement::translation(vec![2]),
            GroupElement::translation(vec![-2]),
            GroupElement::new(vec![0], 1),
        ];
        expected.sort_by_key(|e| g.canonical_key(e));
        assert_eq!(elems, expected);
    }

    #[test]
    fn main_theorem_infinite_closure_rejected() {
        let g = groups::g1();
        let ab = GroupElement::translation(vec![1, 1]);
        assert!(matches!(
            main_theorem_genset(&g, &ab, 3, &[ab.clone()]),
            Err(GenSetError::InfiniteClosure)
        ));
    }

    #[test]
    fn main_theorem_closure_invariance() {
        // S is invariant under inversion and conjugation by representatives
        let g = groups::g1();
        let a = GroupElement::translation(vec![1, 0]);
        let x = main_theorem_genset(&g, &a, 3, &[a.clone()]).unwrap();
        let t = GroupElement::new(vec![0, 0], 1);
        let s_letters: Vec<_> = x
            .letters
            .iter()
            .filter(|l| !l.dominant && l.elem.f == 0)
            .map(|l| l.elem.clone())
            .collect();
        for s in &s_letters {
            let inv = g.inverse(s).unwrap();
            assert!(s_letters.contains(&inv));
            let conj = g
                .multiply(&g.multiply(&t, s).unwrap(), &g.inverse(&t).unwrap())
                .unwrap();
            assert!(s_letters.contains(&conj));
        }
    }

    #[test]
    fn g2_short_set_standard() {
        let g = groups::g2();
        let x = GenSet::symmetric_closure(
            &g,
            vec![
                letter("a", vec![1, 0], 0),
                letter("b", vec![0, 1], 0),
                letter("t", vec![0, 0], 1),
            ],
        )
        .unwrap();
        let s = g2_short_set(&g, &x).unwrap();
        let mut vecs: Vec<Vec<i64>> = s.iter().map(|sg| sg.elem.v.clone()).collect();
        vecs.sort();
        let mut expected = vec![vec![2, 0], vec![-2, 0], vec![0, 2], vec![0, -2]];
        expected.sort();
        assert_eq!(vecs, expected);
        // spellings have X-length 2
        for sg in &s {
            let word = format!("{}{}", sg.spelling[0], sg.spelling[1]);
            assert_eq!(x.evaluate(&g, &word).unwrap(), sg.elem);
        }
    }

    #[test]
    fn g2_short_set_skew() {
        let g = groups::g2();
        let base = GenSet::symmetric_closure(
            &g,
            vec![
                letter("a", vec![1, 0], 0),
                letter("b", vec![0, 1], 0),
                letter("t", vec![0, 0], 1),
            ],
        )
        .unwrap();
        let x = GenSet::from_words(&g, &base, &["a", "ab", "t"]).unwrap();
        let s = g2_short_set(&g, &x).unwrap();
        let mut vecs: Vec<Vec<i64>> = s.iter().map(|sg| sg.elem.v.clone()).collect();
        vecs.sort();
        let mut expected =
            vec![vec![2, 0], vec![-2, 0], vec![2, 2], vec![-2, -2]];
        expected.sort();
        assert_eq!(vecs, expected);
    }

    #[test]
    fn g2_short_set_symmetric() {
        let g = groups::g2();
        let x = GenSet::symmetric_closure(
            &g,
            vec![
                letter("a", vec![1, 0], 0),
                letter("b", vec![0, 1], 0),
                letter("t", vec![0, 0], 1),
                letter("u", vec![1, 1], 1),
            ],
        )
        .unwrap();
        let s = g2_short_set(&g, &x).unwrap();
        let elems: Vec<GroupElement> = s.iter().map(|sg| sg.elem.clone()).collect();
        for e in &elems {
            assert!(elems.contains(&g.inverse(e).unwrap()));
        }
    }

    #[test]
    fn tokenize_prefers_inverse_labels() {
        let g = groups::z();
        let x = GenSet::symmetric_closure(&g, vec![letter("t", vec![1], 0)]).unwrap();
        let toks = x.tokenize("t^-1t").unwrap();
        assert_eq!(toks, vec![1, 0]);
    }
}
