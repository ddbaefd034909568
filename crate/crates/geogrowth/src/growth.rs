//! Classification of exact integer growth sequences: exact polynomial
//! degree via finite differences, minimal linear recurrences over the
//! rationals, and sound exponential rate lower bounds.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{BigUint, FromPrimitive, One, Signed, ToPrimitive, Zero};
use num_integer::binomial;
use thiserror::Error;

use crate::engine::{Census, EngineError};
use crate::group::Group;

#[derive(Debug, Error)]
pub enum GrowthError {
    #[error("sequence too short: need at least {need} terms, have {have}")]
    TooShort { need: usize, have: usize },
    #[error("sequence tail contains zeros")]
    ZeroTail,
    #[error("cumulative sequence must be non-decreasing and non-negative")]
    NotCumulative,
    #[error("tracked-letter maximum is not stable over the tail window")]
    KNotStable,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    Cumulative,
    PerLength,
}

#[derive(Debug, Clone)]
pub struct GrowthSequence {
    pub values: Vec<BigInt>,
    pub kind: SequenceKind,
}

impl GrowthSequence {
    pub fn new(values: Vec<BigInt>, kind: SequenceKind) -> Result<Self, GrowthError> {
        if values.iter().any(|v| v.is_negative()) {
            return Err(GrowthError::NotCumulative);
        }
        if kind == SequenceKind::Cumulative && values.windows(2).any(|w| w[0] > w[1]) {
            return Err(GrowthError::NotCumulative);
        }
        Ok(GrowthSequence { values, kind })
    }

    pub fn cumulative_from_biguint(values: &[BigUint]) -> Self {
        GrowthSequence {
            values: values.iter().map(|v| BigInt::from(v.clone())).collect(),
            kind: SequenceKind::Cumulative,
        }
    }

    pub fn per_length_from_biguint(values: &[BigUint]) -> Self {
        GrowthSequence {
            values: values.iter().map(|v| BigInt::from(v.clone())).collect(),
            kind: SequenceKind::PerLength,
        }
    }

    /// Per-length increments; the sequence itself when already per-length.
    pub fn per_length(&self) -> Vec<BigInt> {
        match self.kind {
            SequenceKind::PerLength => self.values.clone(),
            SequenceKind::Cumulative => {
                let mut out = Vec::with_capacity(self.values.len());
                let mut prev = BigInt::zero();
                for v in &self.values {
                    out.push(v - &prev);
                    prev = v.clone();
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Polynomial { degree: usize },
    Exponential { lower_bound: f64, estimate: f64 },
    Recurrence { order: usize, coefficients: Vec<BigRational> },
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct Evidence {
    pub window: usize,
    pub delta: f64,
    pub recurrence: Option<(usize, Vec<BigRational>)>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub verdict: Verdict,
    pub evidence: Evidence,
}

impl Classification {
    pub fn render(&self) -> String {
        let head = match &self.verdict {
            Verdict::Polynomial { degree } => format!("polynomial degree {degree}"),
            Verdict::Exponential { lower_bound, estimate } => {
                format!("exponential (rate lower bound {lower_bound:.4}, estimate {estimate:.4})")
            }
            Verdict::Recurrence { order, .. } => format!("rational (recurrence order {order})"),
            Verdict::Inconclusive => "inconclusive".to_string(),
        };
        let rec = match &self.evidence.recurrence {
            Some((order, coeffs)) => {
                let cs: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                format!("; recurrence order {} coefficients [{}]", order, cs.join(", "))
            }
            None => String::new(),
        };
        format!("{head} (window {}{rec})", self.evidence.window)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyParams {
    pub delta: f64,
    pub window: usize,
    pub degree_cap: usize,
    pub max_order: usize,
    pub holdout: usize,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams { delta: 0.1, window: 10, degree_cap: 8, max_order: 8, holdout: 10 }
    }
}

/// Smallest `d` such that the `(d+1)`-th finite differences vanish on the
/// final `window` entries; exact, never a fit.
pub fn finite_difference_degree(
    seq: &[BigInt],
    window: usize,
    degree_cap: usize,
) -> Result<Option<usize>, GrowthError> {
    let need = window + degree_cap + 1;
    if seq.len() < need {
        return Err(GrowthError::TooShort { need, have: seq.len() });
    }
    let mut diffs = seq.to_vec();
    for d in 0..=degree_cap {
        diffs = diffs.windows(2).map(|w| &w[1] - &w[0]).collect();
        let tail = &diffs[diffs.len().saturating_sub(window)..];
        if tail.iter().all(|x| x.is_zero()) {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recurrence {
    pub order: usize,
    /// `s[n] = c[0]·s[n-1] + … + c[order-1]·s[n-order]`.
    pub coefficients: Vec<BigRational>,
    /// First index from which the recurrence holds on the data.
    pub valid_from: usize,
}

/// Minimal connection polynomial of the sequence prefix via the
/// Berlekamp-Massey recurrence over the rationals.
fn berlekamp_massey(s: &[BigRational]) -> Vec<BigRational> {
    // connection polynomial C(x) = 1 + c_1 x + ... + c_L x^L with
    // s[n] + sum c_i s[n-i] = 0 for L <= n < s.len()
    let mut c = vec![BigRational::one()];
    let mut b = vec![BigRational::one()];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bb = BigRational::one();
    for n in 0..s.len() {
        let mut delta = s[n].clone();
        for i in 1..=l {
            delta += &c[i] * &s[n - i];
        }
        if delta.is_zero() {
            m += 1;
        } else if 2 * l <= n {
            let t = c.clone();
            let coef = &delta / &bb;
            if c.len() < b.len() + m {
                c.resize(b.len() + m, BigRational::zero());
            }
            for (i, bi) in b.iter().enumerate() {
                c[i + m] -= &coef * bi;
            }
            l = n + 1 - l;
            b = t;
            bb = delta;
            m = 1;
        } else {
            let coef = &delta / &bb;
            if c.len() < b.len() + m {
                c.resize(b.len() + m, BigRational::zero());
            }
            for (i, bi) in b.iter().enumerate() {
                c[i + m] -= &coef * bi;
            }
            m += 1;
        }
    }
    c.truncate(l + 1);
    c
}

/// Minimal-order linear recurrence with exact rational coefficients, fitted
/// on the prefix and required to predict the final `holdout` terms exactly.
pub fn linear_recurrence(
    seq: &[BigInt],
    max_order: usize,
    holdout: usize,
) -> Result<Option<Recurrence>, GrowthError> {
    let need = 2 * max_order + holdout;
    if seq.len() < need {
        return Err(GrowthError::TooShort { need, have: seq.len() });
    }
    let fit_len = seq.len() - holdout;
    let prefix: Vec<BigRational> =
        seq[..fit_len].iter().map(|v| BigRational::from(v.clone())).collect();
    let c = berlekamp_massey(&prefix);
    let order = c.len() - 1;
    if order == 0 || order > max_order {
        return Ok(None);
    }
    let coefficients: Vec<BigRational> = c[1..].iter().map(|x| -x.clone()).collect();
    // verify across the fit region and the holdout suffix
    let all: Vec<BigRational> = seq.iter().map(|v| BigRational::from(v.clone())).collect();
    for n in order..all.len() {
        let mut pred = BigRational::zero();
        for (i, coef) in coefficients.iter().enumerate() {
            pred += coef * &all[n - 1 - i];
        }
        if pred != all[n] {
            return Ok(None);
        }
    }
    Ok(Some(Recurrence { order, coefficients, valid_from: order }))
}

/// Continues a sequence with a recurrence up to index `to` inclusive.
pub fn extrapolate(seq: &[BigInt], rec: &Recurrence, to: usize) -> Vec<BigRational> {
    let mut vals: Vec<BigRational> = seq.iter().map(|v| BigRational::from(v.clone())).collect();
    while vals.len() <= to {
        let n = vals.len();
        let mut next = BigRational::zero();
        for (i, coef) in rec.coefficients.iter().enumerate() {
            next += coef * &vals[n - 1 - i];
        }
        vals.push(next);
    }
    vals
}

/// `a / b` as f64 for arbitrarily large operands.
pub fn big_ratio_to_f64(a: &BigInt, b: &BigInt) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let shift = a.bits().max(b.bits()).saturating_sub(512) as u64;
    let an = (a >> shift).to_f64().unwrap_or(f64::INFINITY);
    let bn = (b >> shift).to_f64().unwrap_or(f64::INFINITY);
    an / bn
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    big_ratio_to_f64(x.numer(), x.denom())
}

/// Largest `b` (up to rounding slack) with `b^n <= v`, verified exactly, so
/// the returned bound is sound.
fn nth_root_lower(v: &BigInt, n: usize) -> f64 {
    debug_assert!(v.is_positive() && n > 0);
    let bits = v.bits() as f64;
    let mut b = 2f64.powf((bits - 1.0) / n as f64);
    // refine upward from the crude bit estimate, then certify downward
    let precise = big_ratio_to_f64(v, &BigInt::one()).powf(1.0 / n as f64);
    if precise.is_finite() && precise > 0.0 {
        b = precise;
    }
    for _ in 0..128 {
        let candidate = BigRational::from_float(b).unwrap_or_else(BigRational::zero);
        if candidate.pow(n as i32) <= BigRational::from(v.clone()) {
            return b;
        }
        b *= 1.0 - 1e-9;
    }
    // fall back to a grossly safe value
    1.0
}

/// Sound lower bound `min_n values[n]^{1/n}` over the tail window, plus the
/// last per-length ratio as a growth-rate estimate.
pub fn exponential_rate(seq: &GrowthSequence, window: usize) -> Result<(f64, f64), GrowthError> {
    let values = &seq.values;
    if values.len() < window + 1 {
        return Err(GrowthError::TooShort { need: window + 1, have: values.len() });
    }
    let start = values.len() - window;
    if values[start..].iter().any(|v| v.is_zero()) {
        return Err(GrowthError::ZeroTail);
    }
    let lower = (start..values.len())
        .map(|n| nth_root_lower(&values[n], n))
        .fold(f64::INFINITY, f64::min);
    let per_len = seq.per_length();
    let mut estimate = f64::NAN;
    for w in per_len.windows(2).rev() {
        if !w[0].is_zero() && !w[1].is_zero() {
            estimate = big_ratio_to_f64(&w[1], &w[0]);
            break;
        }
    }
    Ok((lower, estimate))
}

/// Full classification: exact polynomial first, then recurrence detection
/// with the asymptotics read off extrapolated terms, then the raw
/// exponential rate test.
pub fn classify(seq: &GrowthSequence, params: &ClassifyParams) -> Result<Classification, GrowthError> {
    let need = params.window + 2;
    if seq.values.len() < need {
        return Err(GrowthError::TooShort { need, have: seq.values.len() });
    }
    let mut evidence = Evidence {
        window: params.window,
        delta: params.delta,
        recurrence: None,
        notes: Vec::new(),
    };

    // the exact sub-tests are skipped, not fatal, when the sequence is too
    // short for them; the rate test below still applies
    let difference_degree =
        match finite_difference_degree(&seq.values, params.window, params.degree_cap) {
            Ok(d) => d,
            Err(GrowthError::TooShort { .. }) => {
                evidence.notes.push("sequence too short for the finite-difference test".into());
                None
            }
            Err(e) => return Err(e),
        };
    if let Some(d) = difference_degree {
        evidence.notes.push("exact vanishing finite differences".into());
        return Ok(Classification { verdict: Verdict::Polynomial { degree: d }, evidence });
    }

    let recurrence = match linear_recurrence(&seq.values, params.max_order, params.holdout) {
        Ok(r) => r,
        Err(GrowthError::TooShort { .. }) => {
            evidence.notes.push("sequence too short for recurrence detection".into());
            None
        }
        Err(e) => return Err(e),
    };
    if let Some(rec) = recurrence {
        evidence.recurrence = Some((rec.order, rec.coefficients.clone()));
        let far = 400usize.max(seq.values.len() + 100);
        let ext = extrapolate(&seq.values, &rec, far);
        let tail_ratio = if ext[far - 1].is_zero() {
            f64::INFINITY
        } else {
            rational_to_f64(&(&ext[far] / &ext[far - 1]))
        };
        if tail_ratio >= 1.0 + params.delta {
            let (lower, estimate) = exponential_rate(seq, params.window)?;
            evidence.notes.push("recurrence with exponentially growing extrapolation".into());
            return Ok(Classification {
                verdict: Verdict::Exponential { lower_bound: lower, estimate },
                evidence,
            });
        }
        // subexponential rational sequence: estimate the degree from the
        // doubling quotient of far extrapolated terms
        let half = far / 2;
        if ext[half].is_positive() && ext[far].is_positive() {
            let q = rational_to_f64(&(&ext[far] / &ext[half]));
            let d = q.log2();
            let rounded = d.round();
            if (d - rounded).abs() < 0.2 && rounded >= 0.0 {
                evidence.notes.push(format!("degree from extrapolation quotient {q:.4}"));
                return Ok(Classification {
                    verdict: Verdict::Polynomial { degree: rounded as usize },
                    evidence,
                });
            }
        }
        let verdict = Verdict::Recurrence { order: rec.order, coefficients: rec.coefficients };
        return Ok(Classification { verdict, evidence });
    }

    match exponential_rate(seq, params.window) {
        Ok((lower, estimate)) if lower >= 1.0 + params.delta => {
            evidence.notes.push("tail n-th root lower bound".into());
            Ok(Classification {
                verdict: Verdict::Exponential { lower_bound: lower, estimate },
                evidence,
            })
        }
        _ => Ok(Classification { verdict: Verdict::Inconclusive, evidence }),
    }
}

#[derive(Debug, Clone)]
pub struct Lemma52Report {
    pub k: u32,
    pub m: usize,
    pub checked_from: usize,
    pub checked_to: usize,
    pub pass: bool,
    pub first_failure: Option<usize>,
}

/// Verifies the dominating-generator counting bound: with `k` the measured
/// maximum number of non-dominant letters in a geodesic and `m` the number
/// of non-dominant letters,
/// `σ_Γ(n) ≤ (k+1)·2^(k+1)·m^k·C(n,k)` and
/// `Γ(n) ≤ 2^(k+1)·m^k·(k+1)·(n+1)·C(n,k)` for `max(1,k) ≤ n ≤ radius`.
pub fn lemma52_bound_check<G: Group>(
    census: &Census<G>,
    dominant: &[usize],
    stability_window: usize,
) -> Result<Lemma52Report, GrowthError> {
    let tracked: BTreeSet<usize> = (0..census.labels.len())
        .filter(|i| !dominant.contains(i))
        .collect();
    let stats = census.letter_stats(&tracked)?;
    if stats.len() < stability_window + 1 {
        return Err(GrowthError::TooShort { need: stability_window + 1, have: stats.len() });
    }
    let tail = &stats[stats.len() - stability_window..];
    let k = tail[0];
    if tail.iter().any(|&x| x != k) {
        return Err(GrowthError::KNotStable);
    }
    let m = tracked.len();
    let sigma = census.sigma_big_gamma();
    let big_gamma = census.big_gamma();
    let ku = k as usize;
    let factor = BigUint::from_usize(ku + 1).unwrap()
        * BigUint::from_u32(2).unwrap().pow(k + 1)
        * BigUint::from_usize(m).unwrap().pow(k);
    let from = ku.max(1);
    let mut first_failure = None;
    for n in from..=census.n_max {
        let binom = binomial(BigUint::from_usize(n).unwrap(), BigUint::from_u32(k).unwrap());
        let sphere_bound = &factor * &binom;
        let cumulative_bound = &sphere_bound * BigUint::from_usize(n + 1).unwrap();
        if sigma[n] > sphere_bound || big_gamma[n] > cumulative_bound {
            first_failure = Some(n);
            break;
        }
    }
    Ok(Lemma52Report {
        k,
        m,
        checked_from: from,
        checked_to: census.n_max,
        pass: first_failure.is_none(),
        first_failure,
    })
}
