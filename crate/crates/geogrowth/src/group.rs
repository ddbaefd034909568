//! Concrete models for the groups under study: semidirect products `Z^r ⋊ F`
//! with `F` a finite group acting by integer matrices, and the discrete
//! Heisenberg group. Elements carry exact 64-bit coordinates with checked
//! arithmetic; overflow is a hard error, never silent wraparound.

use std::collections::{HashSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("coordinate overflow in group arithmetic")]
    Overflow,
    #[error("invalid finite group table: {0}")]
    BadTable(String),
    #[error("invalid group data: {0}")]
    BadGroup(String),
    #[error("element does not lie in the translation lattice")]
    NotInLattice,
    #[error("map fails the homomorphism law on a generator pair")]
    NotHomomorphism,
    #[error("malformed canonical key")]
    BadKey,
}

/// Minimal interface the enumeration machinery needs from a group model.
pub trait Group {
    type Elem: Clone + Eq + Hash + Debug;

    fn identity(&self) -> Self::Elem;
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, GroupError>;
    fn inverse(&self, a: &Self::Elem) -> Result<Self::Elem, GroupError>;
    /// Injective, deterministic byte encoding of an element.
    fn canonical_key(&self, a: &Self::Elem) -> Vec<u8>;
    fn display(&self, a: &Self::Elem) -> String;
    /// True if the symmetrized span of `elems` plausibly generates the whole
    /// group, checked on the ball of the given radius.
    fn generates(&self, elems: &[Self::Elem], radius: usize) -> bool;
}

fn checked_add(a: i64, b: i64) -> Result<i64, GroupError> {
    a.checked_add(b).ok_or(GroupError::Overflow)
}

fn checked_mul(a: i64, b: i64) -> Result<i64, GroupError> {
    a.checked_mul(b).ok_or(GroupError::Overflow)
}

// ---------------------------------------------------------------------------
// Finite group multiplication tables
// ---------------------------------------------------------------------------

/// A finite group given by its full multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupTable {
    pub order: usize,
    pub mult: Vec<Vec<usize>>,
    pub inv: Vec<usize>,
    pub identity: usize,
}

impl FiniteGroupTable {
    /// Builds the table from a multiplication matrix, locating the identity,
    /// computing inverses and checking associativity exhaustively.
    pub fn new(mult: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let order = mult.len();
        if order == 0 {
            return Err(GroupError::BadTable("empty table".into()));
        }
        for row in &mult {
            if row.len() != order || row.iter().any(|&x| x >= order) {
                return Err(GroupError::BadTable("table is not square over 0..order".into()));
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|i| mult[e][i] == i && mult[i][e] == i))
            .ok_or_else(|| GroupError::BadTable("no identity element".into()))?;
        let mut inv = vec![usize::MAX; order];
        for i in 0..order {
            inv[i] = (0..order)
                .find(|&j| mult[i][j] == identity && mult[j][i] == identity)
                .ok_or_else(|| GroupError::BadTable(format!("element {i} has no inverse")))?;
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if mult[mult[a][b]][c] != mult[a][mult[b][c]] {
                        return Err(GroupError::BadTable(format!(
                            "associativity fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteGroupTable { order, mult, inv, identity })
    }

    pub fn trivial() -> Self {
        FiniteGroupTable { order: 1, mult: vec![vec![0]], inv: vec![0], identity: 0 }
    }

    pub fn cyclic(n: usize) -> Self {
        let mult = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        FiniteGroupTable::new(mult).expect("cyclic table is valid")
    }
}

// ---------------------------------------------------------------------------
// Integer matrix helpers
// ---------------------------------------------------------------------------

pub type IntMatrix = Vec<Vec<i64>>;

pub fn identity_matrix(r: usize) -> IntMatrix {
    (0..r)
        .map(|i| (0..r).map(|j| if i == j { 1 } else { 0 }).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix, GroupError> {
    let r = a.len();
    if r == 0 || b.is_empty() {
        return Ok(vec![vec![]; r]);
    }
    let mut out = vec![vec![0i64; b[0].len()]; r];
    for i in 0..r {
        for j in 0..b[0].len() {
            let mut acc: i64 = 0;
            for (k, bk) in b.iter().enumerate() {
                acc = checked_add(acc, checked_mul(a[i][k], bk[j])?)?;
            }
            out[i][j] = acc;
        }
    }
    Ok(out)
}

pub fn mat_vec(a: &IntMatrix, v: &[i64]) -> Result<Vec<i64>, GroupError> {
    let mut out = vec![0i64; a.len()];
    for (i, row) in a.iter().enumerate() {
        let mut acc: i64 = 0;
        for (k, &vk) in v.iter().enumerate() {
            acc = checked_add(acc, checked_mul(row[k], vk)?)?;
        }
        out[i] = acc;
    }
    Ok(out)
}

/// Determinant by fraction-free elimination over i128. Ranks here are tiny.
pub fn determinant(m: &IntMatrix) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let swap = (k + 1..n).find(|&i| a[i][k] != 0);
            match swap {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Triangularizes the row span of `vectors` inside `Z^rank` by integer row
/// reduction. Returns the diagonal of the triangular basis, or `None` if the
/// lattice has rank < `rank`.
pub fn lattice_diagonal(vectors: &[Vec<i64>], rank: usize) -> Option<Vec<i128>> {
    if rank == 0 {
        return Some(vec![]);
    }
    let mut rows: Vec<Vec<i128>> = vectors
        .iter()
        .filter(|v| v.iter().any(|&x| x != 0))
        .map(|v| v.iter().map(|&x| x as i128).collect())
        .collect();
    let mut diag = Vec::with_capacity(rank);
    let mut pivot = 0usize;
    for col in 0..rank {
        loop {
            // pick the row with the smallest nonzero entry in this column
            let best = (pivot..rows.len())
                .filter(|&i| rows[i][col] != 0)
                .min_by_key(|&i| rows[i][col].unsigned_abs());
            let best = match best {
                Some(b) => b,
                None => return None,
            };
            rows.swap(pivot, best);
            let mut all_cleared = true;
            for i in pivot + 1..rows.len() {
                if rows[i][col] != 0 {
                    let q = rows[i][col].div_euclid(rows[pivot][col]);
                    for j in 0..rank {
                        rows[i][j] -= q * rows[pivot][j];
                    }
                    if rows[i][col] != 0 {
                        all_cleared = false;
                    }
                }
            }
            if all_cleared {
                break;
            }
        }
        diag.push(rows[pivot][col]);
        pivot += 1;
    }
    Some(diag)
}

/// Index of the sublattice spanned by `vectors` in `Z^rank`, or `None` when
/// the span has deficient rank.
pub fn lattice_index(vectors: &[Vec<i64>], rank: usize) -> Option<u128> {
    lattice_diagonal(vectors, rank).map(|d| d.iter().map(|x| x.unsigned_abs()).product())
}

pub fn lattice_rank(vectors: &[Vec<i64>], rank: usize) -> usize {
    let mut rows: Vec<Vec<i128>> = vectors
        .iter()
        .filter(|v| v.iter().any(|&x| x != 0))
        .map(|v| v.iter().map(|&x| x as i128).collect())
        .collect();
    let mut pivots = 0usize;
    for col in 0..rank {
        loop {
            let best = (pivots..rows.len())
                .filter(|&i| rows[i][col] != 0)
                .min_by_key(|&i| rows[i][col].unsigned_abs());
            let best = match best {
                Some(b) => b,
                None => break,
            };
            rows.swap(pivots, best);
            let mut cleared = true;
            for i in pivots + 1..rows.len() {
                if rows[i][col] != 0 {
                    let q = rows[i][col].div_euclid(rows[pivots][col]);
                    for j in 0..rank {
                        rows[i][j] -= q * rows[pivots][j];
                    }
                    if rows[i][col] != 0 {
                        cleared = false;
                    }
                }
            }
            if cleared {
                pivots += 1;
                break;
            }
        }
    }
    pivots
}

// ---------------------------------------------------------------------------
// Virtually abelian groups Z^r ⋊ F
// ---------------------------------------------------------------------------

/// `Z^rank ⋊ F` where the finite group `F` acts by the integer matrices
/// `action[f]`.
#[derive(Debug, Clone)]
pub struct VirtuallyAbelianGroup {
    pub rank: usize,
    pub finite: FiniteGroupTable,
    pub action: Vec<IntMatrix>,
}

/// `(v, f)` with multiplication `(v,f)·(w,g) = (v + φ_f w, fg)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub v: Vec<i64>,
    pub f: usize,
}

impl GroupElement {
    pub fn new(v: Vec<i64>, f: usize) -> Self {
        GroupElement { v, f }
    }

    pub fn translation(v: Vec<i64>) -> Self {
        GroupElement { v, f: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureIndex {
    Finite(u128),
    Infinite,
}

impl VirtuallyAbelianGroup {
    pub fn new(
        rank: usize,
        finite: FiniteGroupTable,
        action: Vec<IntMatrix>,
    ) -> Result<Self, GroupError> {
        if action.len() != finite.order {
            return Err(GroupError::BadGroup("one action matrix per finite element required".into()));
        }
        for m in &action {
            if m.len() != rank || m.iter().any(|row| row.len() != rank) {
                return Err(GroupError::BadGroup("action matrix has wrong shape".into()));
            }
            let d = determinant(m);
            if d != 1 && d != -1 {
                return Err(GroupError::BadGroup("action matrix is not in GL(r, Z)".into()));
            }
        }
        if action[finite.identity] != identity_matrix(rank) {
            return Err(GroupError::BadGroup("identity must act trivially".into()));
        }
        for f in 0..finite.order {
            for g in 0..finite.order {
                let lhs = mat_mul(&action[f], &action[g])?;
                if lhs != action[finite.mult[f][g]] {
                    return Err(GroupError::BadGroup("action is not a homomorphism".into()));
                }
            }
        }
        Ok(VirtuallyAbelianGroup { rank, finite, action })
    }

    /// Index in `G` of the normal closure of `x`, which must lie in the
    /// translation lattice. The lattice spanned by the orbit `{φ_f(v)}` is
    /// triangularized; the group index is `|F|` times the lattice index.
    pub fn normal_closure_index(&self, x: &GroupElement) -> Result<ClosureIndex, GroupError> {
        if x.f != self.finite.identity {
            return Err(GroupError::NotInLattice);
        }
        let orbit: Result<Vec<Vec<i64>>, GroupError> =
            self.action.iter().map(|m| mat_vec(m, &x.v)).collect();
        match lattice_index(&orbit?, self.rank) {
            Some(idx) => Ok(ClosureIndex::Finite(idx * self.finite.order as u128)),
            None => Ok(ClosureIndex::Infinite),
        }
    }

    pub fn decode_key(&self, key: &[u8]) -> Result<GroupElement, GroupError> {
        if key.len() != 4 + 8 * self.rank {
            return Err(GroupError::BadKey);
        }
        let f = u32::from_le_bytes(key[0..4].try_into().unwrap()) as usize;
        if f >= self.finite.order {
            return Err(GroupError::BadKey);
        }
        let mut v = Vec::with_capacity(self.rank);
        for i in 0..self.rank {
            let start = 4 + 8 * i;
            v.push(i64::from_le_bytes(key[start..start + 8].try_into().unwrap()));
        }
        Ok(GroupElement { v, f })
    }
}

impl Group for VirtuallyAbelianGroup {
    type Elem = GroupElement;

    fn identity(&self) -> GroupElement {
        GroupElement { v: vec![0; self.rank], f: self.finite.identity }
    }

    fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        let moved = mat_vec(&self.action[a.f], &b.v)?;
        let mut v = Vec::with_capacity(self.rank);
        for i in 0..self.rank {
            v.push(checked_add(a.v[i], moved[i])?);
        }
        Ok(GroupElement { v, f: self.finite.mult[a.f][b.f] })
    }

    fn inverse(&self, a: &GroupElement) -> Result<GroupElement, GroupError> {
        let fi = self.finite.inv[a.f];
        let moved = mat_vec(&self.action[fi], &a.v)?;
        let v = moved
            .into_iter()
            .map(|x| x.checked_neg().ok_or(GroupError::Overflow))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GroupElement { v, f: fi })
    }

    fn canonical_key(&self, a: &GroupElement) -> Vec<u8> {
        let mut key = Vec::with_capacity(4 + 8 * self.rank);
        key.extend_from_slice(&(a.f as u32).to_le_bytes());
        for &x in &a.v {
            key.extend_from_slice(&x.to_le_bytes());
        }
        key
    }

    fn display(&self, a: &GroupElement) -> String {
        let coords: Vec<String> = a.v.iter().map(|x| x.to_string()).collect();
        format!("({};{})", coords.join(","), a.f)
    }

    fn generates(&self, elems: &[Self::Elem], radius: usize) -> bool {
        let ball = small_ball(self, elems, radius);
        let ball = match ball {
            Some(b) => b,
            None => return false,
        };
        let cosets: HashSet<usize> = ball.iter().map(|g| g.f).collect();
        if cosets.len() != self.finite.order {
            return false;
        }
        let lattice: Vec<Vec<i64>> = ball
            .iter()
            .filter(|g| g.f == self.finite.identity)
            .map(|g| g.v.clone())
            .collect();
        lattice_rank(&lattice, self.rank) == self.rank
    }
}

/// Symmetrized ball of the given radius, used only for validation checks.
fn small_ball<G: Group>(group: &G, elems: &[G::Elem], radius: usize) -> Option<Vec<G::Elem>> {
    let mut gens: Vec<G::Elem> = Vec::new();
    for e in elems {
        gens.push(e.clone());
        gens.push(group.inverse(e).ok()?);
    }
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut out = Vec::new();
    let mut frontier = VecDeque::new();
    let id = group.identity();
    seen.insert(group.canonical_key(&id));
    out.push(id.clone());
    frontier.push_back(id);
    for _ in 0..radius {
        let mut next = VecDeque::new();
        while let Some(g) = frontier.pop_front() {
            for x in &gens {
                let h = group.multiply(&g, x).ok()?;
                if seen.insert(group.canonical_key(&h)) {
                    out.push(h.clone());
                    next.push_back(h);
                }
            }
        }
        frontier = next;
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Discrete Heisenberg group
// ---------------------------------------------------------------------------

/// Upper unitriangular 3x3 integer matrices in coordinates `(a, b, c)` with
/// `(a,b,c)·(a',b',c') = (a+a', b+b', c+c'+a·b')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeisenbergGroup;

pub type HeisenbergElement = [i64; 3];

impl Group for HeisenbergGroup {
    type Elem = HeisenbergElement;

    fn identity(&self) -> HeisenbergElement {
        [0, 0, 0]
    }

    fn multiply(&self, x: &HeisenbergElement, y: &HeisenbergElement) -> Result<HeisenbergElement, GroupError> {
        Ok([
            checked_add(x[0], y[0])?,
            checked_add(x[1], y[1])?,
            checked_add(checked_add(x[2], y[2])?, checked_mul(x[0], y[1])?)?,
        ])
    }

    fn inverse(&self, x: &HeisenbergElement) -> Result<HeisenbergElement, GroupError> {
        Ok([
            x[0].checked_neg().ok_or(GroupError::Overflow)?,
            x[1].checked_neg().ok_or(GroupError::Overflow)?,
            checked_add(checked_mul(x[0], x[1])?, x[2].checked_neg().ok_or(GroupError::Overflow)?)?,
        ])
    }

    fn canonical_key(&self, x: &HeisenbergElement) -> Vec<u8> {
        let mut key = Vec::with_capacity(24);
        for &c in x {
            key.extend_from_slice(&c.to_le_bytes());
        }
        key
    }

    fn display(&self, x: &HeisenbergElement) -> String {
        format!("({},{},{})", x[0], x[1], x[2])
    }

    fn generates(&self, elems: &[Self::Elem], radius: usize) -> bool {
        match small_ball(self, elems, radius) {
            Some(ball) => {
                let set: HashSet<HeisenbergElement> = ball.into_iter().collect();
                set.contains(&[1, 0, 0]) && set.contains(&[0, 1, 0]) && set.contains(&[0, 0, 1])
            }
            None => false,
        }
    }
}

// ---------------------------------------------------------------------------
// Epimorphisms
// ---------------------------------------------------------------------------

/// A surjective homomorphism between two concrete group models, represented
/// by its elementwise map.
pub struct Epimorphism<'a, S: Group, T: Group> {
    pub source: &'a S,
    pub target: &'a T,
    map: Box<dyn Fn(&S::Elem) -> Result<T::Elem, GroupError> + 'a>,
}

impl<'a, S: Group, T: Group> Epimorphism<'a, S, T> {
    pub fn new<F>(source: &'a S, target: &'a T, map: F) -> Self
    where
        F: Fn(&S::Elem) -> Result<T::Elem, GroupError> + 'a,
    {
        Epimorphism { source, target, map: Box::new(map) }
    }

    pub fn apply(&self, g: &S::Elem) -> Result<T::Elem, GroupError> {
        (self.map)(g)
    }

    /// Checks `φ(g·h) = φ(g)·φ(h)` on all pairs from the given generators.
    pub fn check_homomorphism(&self, gens: &[S::Elem]) -> Result<(), GroupError> {
        for g in gens {
            for h in gens {
                let gh = self.source.multiply(g, h)?;
                let lhs = self.apply(&gh)?;
                let rhs = self.target.multiply(&self.apply(g)?, &self.apply(h)?)?;
                if lhs != rhs {
                    return Err(GroupError::NotHomomorphism);
                }
            }
        }
        Ok(())
    }

    /// Checks that the image of the generating set generates the target, up
    /// to the given ball radius.
    pub fn check_image_generates(&self, gens: &[S::Elem], radius: usize) -> Result<bool, GroupError> {
        let images: Result<Vec<T::Elem>, GroupError> = gens.iter().map(|g| self.apply(g)).collect();
        Ok(self.target.generates(&images?, radius))
    }
}

/// Epimorphism between two semidirect-product models, given by an integer
/// matrix on the lattice parts and a map of finite parts.
pub fn va_epimorphism<'a>(
    source: &'a VirtuallyAbelianGroup,
    target: &'a VirtuallyAbelianGroup,
    matrix: IntMatrix,
    finite_map: Vec<usize>,
) -> Result<Epimorphism<'a, VirtuallyAbelianGroup, VirtuallyAbelianGroup>, GroupError> {
    if matrix.len() != target.rank
        || matrix.iter().any(|row| row.len() != source.rank)
        || finite_map.len() != source.finite.order
        || finite_map.iter().any(|&f| f >= target.finite.order)
    {
        return Err(GroupError::BadGroup("epimorphism data has wrong shape".into()));
    }
    Ok(Epimorphism::new(source, target, move |g: &GroupElement| {
        Ok(GroupElement { v: mat_vec(&matrix, &g.v)?, f: finite_map[g.f] })
    }))
}

/// The abelianization `(a,b,c) ↦ (a,b)` onto a rank-2 lattice model.
pub fn heisenberg_abelianization<'a>(
    source: &'a HeisenbergGroup,
    target: &'a VirtuallyAbelianGroup,
) -> Result<Epimorphism<'a, HeisenbergGroup, VirtuallyAbelianGroup>, GroupError> {
    if target.rank != 2 || target.finite.order != 1 {
        return Err(GroupError::BadGroup("abelianization target must be Z^2".into()));
    }
    Ok(Epimorphism::new(source, target, move |x: &HeisenbergElement| {
        Ok(GroupElement { v: vec![x[0], x[1]], f: 0 })
    }))
}

// ---------------------------------------------------------------------------
// Built-in groups
// ---------------------------------------------------------------------------

pub mod builtin {
    use super::*;

    pub fn z() -> VirtuallyAbelianGroup {
        VirtuallyAbelianGroup::new(1, FiniteGroupTable::trivial(), vec![identity_matrix(1)]).unwrap()
    }

    pub fn z2() -> VirtuallyAbelianGroup {
        VirtuallyAbelianGroup::new(2, FiniteGroupTable::trivial(), vec![identity_matrix(2)]).unwrap()
    }

    /// `Z × C2`.
    pub fn z_cross_c2() -> VirtuallyAbelianGroup {
        VirtuallyAbelianGroup::new(
            1,
            FiniteGroupTable::cyclic(2),
            vec![identity_matrix(1), identity_matrix(1)],
        )
        .unwrap()
    }

    /// `Z^2 ⋊ C2` with the involution swapping the basis vectors.
    pub fn g1() -> VirtuallyAbelianGroup {
        VirtuallyAbelianGroup::new(
            2,
            FiniteGroupTable::cyclic(2),
            vec![identity_matrix(2), vec![vec![0, 1], vec![1, 0]]],
        )
        .unwrap()
    }

    /// `Z^2 ⋊ C2` with the involution inverting both basis vectors.
    pub fn g2() -> VirtuallyAbelianGroup {
        VirtuallyAbelianGroup::new(
            2,
            FiniteGroupTable::cyclic(2),
            vec![identity_matrix(2), vec![vec![-1, 0], vec![0, -1]]],
        )
        .unwrap()
    }

    /// The infinite dihedral group `Z ⋊_{-1} C2`.
    pub fn dinf() -> VirtuallyAbelianGroup {
        VirtuallyAbelianGroup::new(1, FiniteGroupTable::cyclic(2), vec![identity_matrix(1), vec![vec![-1]]])
            .unwrap()
    }

    pub fn heisenberg() -> HeisenbergGroup {
        HeisenbergGroup
    }
}

/// Looks up a built-in virtually abelian group by name.
pub fn builtin_va(name: &str) -> Option<VirtuallyAbelianGroup> {
    match name {
        "Z" => Some(builtin::z()),
        "Z2" => Some(builtin::z2()),
        "ZxC2" => Some(builtin::z_cross_c2()),
        "G1" => Some(builtin::g1()),
        "G2" => Some(builtin::g2()),
        "Dinf" => Some(builtin::dinf()),
        _ => None,
    }
}
