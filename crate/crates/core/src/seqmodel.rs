//! Weighted mixed-norm sequence spaces `ℓ_q(2^{js} ℓ_p(α))` on the dyadic
//! block structure `I_{j,i}`: lattice counts, weights, norms and per-block
//! scales.
//!
//! The lattice norm `|k|` is Euclidean.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{rational_to_f64, ExtReal, Rational};

pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    /// Exact lattice count, refused when `2^{d(j+i)}` exceeds `cap`.
    Exact { cap: u128 },
    /// Exactly `2^{d(j+i)}`.
    Surrogate,
}

impl Default for CountMode {
    fn default() -> Self {
        CountMode::Exact { cap: DEFAULT_ENUMERATION_CAP }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("EnumerationTooLarge: 2^{bits} points exceed the cap {cap}")]
    EnumerationTooLarge { bits: u32, cap: u128 },
    #[error("UnsupportedDimension: exact counts need d in 1..=3, got {0}")]
    UnsupportedDimension(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequenceSpaceSpec {
    #[serde(with = "crate::params::rational_string")]
    pub s: Rational,
    pub p: ExtReal,
    pub q: ExtReal,
    #[serde(with = "crate::params::rational_string")]
    pub alpha: Rational,
    pub d: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlockCell {
    pub j: u32,
    pub i: u32,
    pub cardinality: u128,
    pub scale: f64,
}

fn isqrt(v: u128) -> u128 {
    if v < 2 {
        return v;
    }
    let mut x = (v as f64).sqrt() as u128;
    while x * x > v {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= v {
        x += 1;
    }
    x
}

/// Number of `k ∈ Z^d` with `|k|² ≤ r2`.
fn ball_count(d: u32, r2: u128) -> u128 {
    match d {
        0 => 1,
        1 => 2 * isqrt(r2) + 1,
        _ => {
            let r = isqrt(r2);
            let mut total = ball_count(d - 1, r2);
            for x in 1..=r {
                total += 2 * ball_count(d - 1, r2 - x * x);
            }
            total
        }
    }
}

/// `|I_{j,0}| = #{|k| ≤ 2^j}` and `|I_{j,i}| = #{2^{j+i-1} < |k| ≤ 2^{j+i}}`.
pub fn block_cardinality(j: u32, i: u32, d: u32, mode: CountMode) -> Result<u128, SeqError> {
    let m = j + i;
    match mode {
        CountMode::Surrogate => {
            let bits = d * m;
            if bits >= 128 {
                return Err(SeqError::EnumerationTooLarge { bits, cap: u128::MAX });
            }
            Ok(1u128 << bits)
        }
        CountMode::Exact { cap } => {
            if !(1..=3).contains(&d) {
                return Err(SeqError::UnsupportedDimension(d));
            }
            let bits = d * m;
            if bits >= 127 || (1u128 << bits) > cap {
                return Err(SeqError::EnumerationTooLarge { bits, cap });
            }
            let outer = ball_count(d, 1u128 << (2 * m));
            if i == 0 {
                Ok(outer)
            } else {
                Ok(outer - ball_count(d, 1u128 << (2 * (m - 1))))
            }
        }
    }
}

/// Lattice points of `I_{j,i}` in lexicographic order; intended for small cells.
pub fn block_indices(j: u32, i: u32, d: u32) -> Vec<Vec<i64>> {
    let m = j + i;
    let outer = 1i128 << (2 * m);
    let inner = if i == 0 { -1 } else { 1i128 << (2 * (m - 1)) };
    let r = 1i64 << m;
    let mut out = Vec::new();
    let mut k = vec![-r; d as usize];
    loop {
        let n2: i128 = k.iter().map(|&x| i128::from(x) * i128::from(x)).sum();
        if n2 <= outer && n2 > inner {
            out.push(k.clone());
        }
        let mut pos = 0;
        loop {
            if pos == k.len() {
                return out;
            }
            if k[pos] < r {
                k[pos] += 1;
                break;
            }
            k[pos] = -r;
            pos += 1;
        }
    }
}

/// `(1 + |2^{-j} k|²)^{α/2}`.
pub fn weight_at(j: u32, k: &[i64], alpha: f64) -> f64 {
    let scale = (-(j as f64)).exp2();
    let x2: f64 = k.iter().map(|&c| (c as f64 * scale).powi(2)).sum();
    (1.0 + x2).powf(alpha / 2.0)
}

/// `2^{-jδ-iα}`.
pub fn block_scale(j: u32, i: u32, delta: f64, alpha: f64) -> f64 {
    (-(j as f64) * delta - (i as f64) * alpha).exp2()
}

pub fn block_cell(
    j: u32,
    i: u32,
    d: u32,
    delta: f64,
    alpha: f64,
    mode: CountMode,
) -> Result<BlockCell, SeqError> {
    Ok(BlockCell {
        j,
        i,
        cardinality: block_cardinality(j, i, d, mode)?,
        scale: block_scale(j, i, delta, alpha),
    })
}

/// Finitely supported `λ_{j,k}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseSequence {
    pub entries: BTreeMap<(u32, Vec<i64>), Complex64>,
}

impl SparseSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, j: u32, k: Vec<i64>, value: Complex64) {
        if value == Complex64::new(0.0, 0.0) {
            self.entries.remove(&(j, k));
        } else {
            self.entries.insert((j, k), value);
        }
    }

    pub fn insert_real(&mut self, j: u32, k: Vec<i64>, value: f64) {
        self.insert(j, k, Complex64::new(value, 0.0));
    }

    pub fn scaled(&self, t: Complex64) -> Self {
        let mut out = SparseSequence::new();
        for ((j, k), v) in &self.entries {
            out.insert(*j, k.clone(), v * t);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn lp_accumulate(values: impl Iterator<Item = f64>, p: ExtReal) -> f64 {
    match p {
        ExtReal::Inf => values.fold(0.0, f64::max),
        ExtReal::Finite(r) => {
            let p = rational_to_f64(&r);
            values.map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

/// `‖λ | ℓ_q(2^{js} ℓ_p(α))‖`, sup at infinite exponents.
pub fn norm(lambda: &SparseSequence, spec: &SequenceSpaceSpec) -> f64 {
    let alpha = rational_to_f64(&spec.alpha);
    let s = rational_to_f64(&spec.s);
    let mut levels: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for ((j, k), v) in &lambda.entries {
        levels.entry(*j).or_default().push(v.norm() * weight_at(*j, k, alpha));
    }
    let per_level = levels
        .into_iter()
        .map(|(j, vals)| (j as f64 * s).exp2() * lp_accumulate(vals.into_iter(), spec.p));
    lp_accumulate(per_level, spec.q)
}

impl Serialize for SparseSequence {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.entries.len()))?;
        for ((j, k), v) in &self.entries {
            if v.im == 0.0 {
                seq.serialize_element(&(j, k, v.re))?;
            } else {
                seq.serialize_element(&(j, k, [v.re, v.im]))?;
            }
        }
        seq.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawValue {
    Real(f64),
    Complex([f64; 2]),
}

impl<'de> Deserialize<'de> for SparseSequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<(u32, Vec<i64>, RawValue)> = Vec::deserialize(d)?;
        let mut out = SparseSequence::new();
        for (j, k, v) in raw {
            let value = match v {
                RawValue::Real(re) => Complex64::new(re, 0.0),
                RawValue::Complex([re, im]) => Complex64::new(re, im),
            };
            if !value.re.is_finite() || !value.im.is_finite() {
                return Err(de::Error::custom("non-finite entry"));
            }
            out.insert(j, k, value);
        }
        Ok(out)
    }
}
