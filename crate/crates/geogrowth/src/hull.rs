//! Exact planar lattice geometry: convex hulls of generator vectors,
//! membership in scaled polygons, and the exponential-witness checks that
//! hang off a boundary edge. All membership tests are exact; the boundary
//! cases (midpoints of scaled edges) land exactly on scaled hull boundaries,
//! so floating point is never used.

use num::rational::Ratio;
use num::BigUint;
use num_integer::binomial;
use thiserror::Error;

use crate::engine::{bfs_census, CensusOptions, EngineError};
use crate::genset::{g2_short_set, GenSet, GenSetError};
use crate::group::VirtuallyAbelianGroup;

#[derive(Debug, Error)]
pub enum HullError {
    #[error("need at least two distinct points")]
    TooFewPoints,
    #[error("points are collinear: hull is degenerate")]
    Degenerate,
    #[error("generating set does not span the plane")]
    NotPlanar,
    #[error("group must have rank 2 for hull arguments")]
    WrongRank,
    #[error(transparent)]
    GenSet(#[from] GenSetError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

pub type Point = [i64; 2];

fn cross(o: Point, a: Point, b: Point) -> i128 {
    (a[0] as i128 - o[0] as i128) * (b[1] as i128 - o[1] as i128)
        - (a[1] as i128 - o[1] as i128) * (b[0] as i128 - o[0] as i128)
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Edge {
    /// Outward normal; interior satisfies `<normal, q> <= support`.
    normal: [i64; 2],
    support: i64,
}

/// Convex polygon with integer vertices in counterclockwise order.
#[derive(Debug, Clone)]
pub struct LatticePolygon {
    pub vertices: Vec<Point>,
    edges: Vec<Edge>,
}

/// Monotone-chain hull with collinear interior points removed.
pub fn convex_hull(points: &[Point], require_nondegenerate: bool) -> Result<LatticePolygon, HullError> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 2 {
        return Err(HullError::TooFewPoints);
    }
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    let vertices: Vec<Point> = lower.into_iter().chain(upper).collect();
    if vertices.len() < 3 {
        if require_nondegenerate {
            return Err(HullError::Degenerate);
        }
        // segment hull: represent with the two extreme points and no edges
        let vs = if vertices.len() == 2 { vertices } else { vec![pts[0], pts[pts.len() - 1]] };
        return Ok(LatticePolygon { vertices: vs, edges: Vec::new() });
    }
    let mut edges = Vec::with_capacity(vertices.len());
    for i in 0..vertices.len() {
        let p = vertices[i];
        let q = vertices[(i + 1) % vertices.len()];
        // outward normal of the ccw edge p->q
        let normal = [q[1] - p[1], p[0] - q[0]];
        let support = normal[0]
            .checked_mul(p[0])
            .and_then(|x| normal[1].checked_mul(p[1]).and_then(|y| x.checked_add(y)))
            .expect("support value fits in i64 at desk scale");
        edges.push(Edge { normal, support });
    }
    Ok(LatticePolygon { vertices, edges })
}

impl LatticePolygon {
    pub fn is_degenerate(&self) -> bool {
        self.edges.is_empty()
    }

    /// Exact membership `q ∈ λP`, i.e. `<ν_e, q> ≤ λ·h_e` for every edge.
    pub fn scaled_contains(&self, lambda: Ratio<i64>, q: Point) -> bool {
        debug_assert!(!self.is_degenerate());
        let num = *lambda.numer() as i128;
        let den = *lambda.denom() as i128;
        self.edges.iter().all(|e| {
            let dot = e.normal[0] as i128 * q[0] as i128 + e.normal[1] as i128 * q[1] as i128;
            den * dot <= num * e.support as i128
        })
    }

    pub fn contains(&self, q: Point) -> bool {
        self.scaled_contains(Ratio::new(1, 1), q)
    }

    /// Adjacent vertex pairs, each a full boundary edge.
    pub fn edge_endpoints(&self) -> Vec<(Point, Point)> {
        (0..self.vertices.len())
            .map(|i| (self.vertices[i], self.vertices[(i + 1) % self.vertices.len()]))
            .collect()
    }
}

/// Projects a rank-2 lattice element to the plane.
pub fn project(v: &[i64]) -> Point {
    [v[0], v[1]]
}

/// The two letters spanning the lexicographically first boundary edge of the
/// hull of the letter vectors; ties in the endpoint lookup are broken by
/// letter order.
pub fn hull_edge_pair(
    group: &VirtuallyAbelianGroup,
    genset: &GenSet<VirtuallyAbelianGroup>,
) -> Result<(usize, usize), HullError> {
    if group.rank != 2 {
        return Err(HullError::WrongRank);
    }
    let points: Vec<Point> = genset.letters.iter().map(|l| project(&l.elem.v)).collect();
    let hull = convex_hull(&points, true).map_err(|e| match e {
        HullError::Degenerate | HullError::TooFewPoints => HullError::NotPlanar,
        other => other,
    })?;
    // each edge is named by the first letters reaching its endpoints; pick
    // the edge whose letter pair comes first
    let letter_at = |p: Point| {
        genset
            .letters
            .iter()
            .position(|l| project(&l.elem.v) == p)
            .expect("hull vertex comes from a letter")
    };
    let mut pairs: Vec<(usize, usize)> = hull
        .edge_endpoints()
        .into_iter()
        .map(|(p, q)| {
            let (i, j) = (letter_at(p), letter_at(q));
            if i <= j {
                (i, j)
            } else {
                (j, i)
            }
        })
        .collect();
    pairs.sort_unstable();
    Ok(pairs[0])
}

/// Outcome of one exponential-witness verification.
#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub n: usize,
    pub word: Vec<String>,
    pub expected_distance: usize,
    pub distance: usize,
    pub count: BigUint,
    pub binomial_bound: BigUint,
    pub pass: bool,
}

impl WitnessReport {
    pub fn render(&self) -> String {
        format!(
            "n={} word={} distance={} (expected {}) geodesics={} bound=C(2n,n)={} {}",
            self.n,
            self.word.join(" "),
            self.distance,
            self.expected_distance,
            self.count,
            self.binomial_bound,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Witness for a plain rank-2 lattice: `x_i^n x_j^n` along a hull edge must
/// sit at distance `2n` with at least `C(2n,n)` geodesics.
pub fn exponential_witness_z2(
    group: &VirtuallyAbelianGroup,
    genset: &GenSet<VirtuallyAbelianGroup>,
    n: usize,
    opts: &CensusOptions,
) -> Result<WitnessReport, HullError> {
    if group.rank != 2 || group.finite.order != 1 {
        return Err(HullError::WrongRank);
    }
    let (i, j) = hull_edge_pair(group, genset)?;
    let mut word = Vec::with_capacity(2 * n);
    for _ in 0..n {
        word.push(genset.letters[i].label.clone());
    }
    for _ in 0..n {
        word.push(genset.letters[j].label.clone());
    }
    verify_witness(group, genset, &word, 2 * n, n, opts)
}

/// Witness for the flip extension of the plane: the short-set spellings give
/// a word of `X`-length `4n` at distance exactly `4n`.
pub fn exponential_witness_g2(
    group: &VirtuallyAbelianGroup,
    genset: &GenSet<VirtuallyAbelianGroup>,
    n: usize,
    opts: &CensusOptions,
) -> Result<WitnessReport, HullError> {
    if group.rank != 2 {
        return Err(HullError::WrongRank);
    }
    let shorts = g2_short_set(group, genset)?;
    let points: Vec<Point> = shorts.iter().map(|s| project(&s.elem.v)).collect();
    let hull = convex_hull(&points, true)?;
    let mut edges = hull.edge_endpoints();
    edges.sort_by_key(|&(p, q)| if p <= q { (p, q) } else { (q, p) });
    let (p, q) = edges[0];
    let s1 = shorts.iter().find(|s| project(&s.elem.v) == p).expect("vertex from short set");
    let s2 = shorts.iter().find(|s| project(&s.elem.v) == q).expect("vertex from short set");
    let mut word = Vec::with_capacity(4 * n);
    for _ in 0..n {
        word.push(s1.spelling[0].clone());
        word.push(s1.spelling[1].clone());
    }
    for _ in 0..n {
        word.push(s2.spelling[0].clone());
        word.push(s2.spelling[1].clone());
    }
    verify_witness(group, genset, &word, 4 * n, n, opts)
}

fn verify_witness(
    group: &VirtuallyAbelianGroup,
    genset: &GenSet<VirtuallyAbelianGroup>,
    word: &[String],
    expected_distance: usize,
    n: usize,
    opts: &CensusOptions,
) -> Result<WitnessReport, HullError> {
    let census = bfs_census(group, genset, expected_distance, opts)?;
    let refs: Vec<&str> = word.iter().map(|s| s.as_str()).collect();
    let endpoint = census.evaluate_word(group, &refs)?;
    let distance = census.distance_to(group, &endpoint)?;
    let count = census.geodesic_count_to(group, &endpoint)?.clone();
    let bound: BigUint = binomial(BigUint::from(2 * n as u64), BigUint::from(n as u64));
    let pass = distance == expected_distance && count >= bound;
    Ok(WitnessReport {
        n,
        word: word.to_vec(),
        expected_distance,
        distance,
        count,
        binomial_bound: bound,
        pass,
    })
}

/// Exhaustive containment check backing the hull argument for plain rank-2
/// lattices: every element `z` of the census satisfies `z̄ ∈ d(z)·P`.
pub fn containment_z2(
    group: &VirtuallyAbelianGroup,
    genset: &GenSet<VirtuallyAbelianGroup>,
    census: &crate::engine::Census<VirtuallyAbelianGroup>,
) -> Result<bool, HullError> {
    if group.rank != 2 {
        return Err(HullError::WrongRank);
    }
    let points: Vec<Point> = genset.letters.iter().map(|l| project(&l.elem.v)).collect();
    let hull = convex_hull(&points, true)?;
    Ok(census.records().iter().all(|r| {
        hull.scaled_contains(Ratio::new(r.dist as i64, 1), project(&r.elem.v))
    }))
}

/// Exhaustive containment check for the flip extension: every `h` in the
/// lattice subgroup satisfies `h̄ ∈ (d(h)/2)·P(S̄)`.
pub fn containment_g2(
    group: &VirtuallyAbelianGroup,
    genset: &GenSet<VirtuallyAbelianGroup>,
    census: &crate::engine::Census<VirtuallyAbelianGroup>,
) -> Result<bool, HullError> {
    if group.rank != 2 {
        return Err(HullError::WrongRank);
    }
    let shorts = g2_short_set(group, genset)?;
    let points: Vec<Point> = shorts.iter().map(|s| project(&s.elem.v)).collect();
    let hull = convex_hull(&points, true)?;
    Ok(census
        .records()
        .iter()
        .filter(|r| r.elem.f == group.finite.identity)
        .all(|r| hull.scaled_contains(Ratio::new(r.dist as i64, 2), project(&r.elem.v))))
}
