//! Embedding parameters, derived exponents and the compactness predicate.
//!
//! All exponent arithmetic is exact: finite values are `Ratio<i128>` and the
//! upper end of the Lebesgue scale is a tagged [`ExtReal::Inf`] token.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational used for every exponent in the crate.
pub type Rational = Ratio<i128>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("cannot parse `{0}` as an exact rational")]
    BadNumber(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("malformed entry `{0}` (expected key=value)")]
    MalformedEntry(String),
    #[error("field `{field}`: {reason}")]
    BadField { field: &'static str, reason: String },
    #[error("invalid JSON: {0}")]
    Json(String),
}

/// Parse `"a/b"`, an integer, or a decimal string (optionally with an
/// exponent) into an exact rational.
pub fn parse_rational(raw: &str) -> Result<Rational, ParseError> {
    let s = raw.trim();
    if s.is_empty() {
        return Err(ParseError::BadNumber(raw.to_string()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: i128 = num
            .trim()
            .parse()
            .map_err(|_| ParseError::BadNumber(raw.to_string()))?;
        let den: i128 = den
            .trim()
            .parse()
            .map_err(|_| ParseError::BadNumber(raw.to_string()))?;
        if den == 0 {
            return Err(ParseError::ZeroDenominator(raw.to_string()));
        }
        return Ok(Rational::new(num, den));
    }
    parse_decimal(s).ok_or_else(|| ParseError::BadNumber(raw.to_string()))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut num: i128 = 0;
    for b in int_part.bytes().chain(frac_part.bytes()) {
        num = num.checked_mul(10)?.checked_add(i128::from(b - b'0'))?;
    }
    let scale = exp - frac_part.len() as i32;
    let ten_pow = |k: u32| 10i128.checked_pow(k);
    let value = if scale >= 0 {
        Rational::from_integer(num.checked_mul(ten_pow(scale as u32)?)?)
    } else {
        Rational::new(num, ten_pow(scale.unsigned_abs())?)
    };
    Some(if negative { -value } else { value })
}

/// Render a rational as `"a"` or `"a/b"`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Strict floor: the largest integer strictly smaller than `r`.
pub fn strict_floor(r: &Rational) -> i128 {
    let f = r.floor();
    if f == *r {
        f.to_integer() - 1
    } else {
        f.to_integer()
    }
}

/// Serde adapter writing rationals as `"a/b"` strings.
pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_rational(&v).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_str(&format_rational(r)),
                None => s.serialize_none(),
            }
        }
    }
}

fn value_to_rational(v: &serde_json::Value) -> Result<Rational, ParseError> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(ParseError::BadNumber(other.to_string())),
    }
}

/// An extended real in `[-∞, ∞]` restricted to rationals plus `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtReal {
    Finite(Rational),
    Inf,
}

impl ExtReal {
    pub const ONE: ExtReal = ExtReal::Finite(Ratio::new_raw(1, 1));
    pub const TWO: ExtReal = ExtReal::Finite(Ratio::new_raw(2, 1));

    pub fn int(v: i128) -> Self {
        ExtReal::Finite(Rational::from_integer(v))
    }

    pub fn ratio(n: i128, d: i128) -> Self {
        ExtReal::Finite(Rational::new(n, d))
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, ExtReal::Inf)
    }

    pub fn finite(&self) -> Option<Rational> {
        match self {
            ExtReal::Finite(r) => Some(*r),
            ExtReal::Inf => None,
        }
    }

    /// `1/p`, with `1/∞ = 0`. The value must be nonzero.
    pub fn recip(&self) -> Rational {
        match self {
            ExtReal::Finite(r) => r.recip(),
            ExtReal::Inf => Rational::zero(),
        }
    }

    /// Hölder conjugate `p'` for `p ∈ [1, ∞]`.
    pub fn conjugate(&self) -> ExtReal {
        match self {
            ExtReal::Inf => ExtReal::ONE,
            ExtReal::Finite(r) if r.is_one() => ExtReal::Inf,
            ExtReal::Finite(r) => ExtReal::Finite(r / (r - Rational::one())),
        }
    }

    /// Whether the value lies in the Banach range `[1, ∞]`.
    pub fn is_banach_exponent(&self) -> bool {
        match self {
            ExtReal::Inf => true,
            ExtReal::Finite(r) => *r >= Rational::one(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::Finite(r) => rational_to_f64(r),
            ExtReal::Inf => f64::INFINITY,
        }
    }
}

impl From<Rational> for ExtReal {
    fn from(r: Rational) -> Self {
        ExtReal::Finite(r)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Inf, ExtReal::Inf) => Ordering::Equal,
            (ExtReal::Inf, _) => Ordering::Greater,
            (_, ExtReal::Inf) => Ordering::Less,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Inf => f.write_str("inf"),
            ExtReal::Finite(r) => f.write_str(&format_rational(r)),
        }
    }
}

impl FromStr for ExtReal {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "∞" => Ok(ExtReal::Inf),
            _ => parse_rational(s).map(ExtReal::Finite),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_ext(&v).map_err(serde::de::Error::custom)
    }
}

fn value_to_ext(v: &serde_json::Value) -> Result<ExtReal, ParseError> {
    match v {
        serde_json::Value::String(s) => s.parse(),
        serde_json::Value::Number(n) => parse_rational(&n.to_string()).map(ExtReal::Finite),
        other => Err(ParseError::BadNumber(other.to_string())),
    }
}

/// The parameter tuple `(s1, s2, p1, p2, q1, q2, d, alpha)` of the embedding
/// of the weighted space `A^{s1}_{p1,q1}(w_alpha)` into `A^{s2}_{p2,q2}`.
///
/// Fields are public and unchecked; use [`EmbeddingParams::validate`] to list
/// structural violations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EmbeddingParams {
    pub s1: Rational,
    pub s2: Rational,
    pub p1: ExtReal,
    pub p2: ExtReal,
    pub q1: ExtReal,
    pub q2: ExtReal,
    pub d: u32,
    pub alpha: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
pub enum Violation {
    #[error("s2<s1 required")]
    SmoothnessOrder,
    #[error("{0}: p in [1,∞] required")]
    LebesgueRange(&'static str),
    #[error("{0}: q in [1,∞] required")]
    FineIndexRange(&'static str),
    #[error("alpha>0 required")]
    NonPositiveAlpha,
    #[error("d>=1 required")]
    ZeroDimension,
}

impl EmbeddingParams {
    /// Build parameters with `q1 = q2 = 2`; the fine indices never affect the
    /// exponents in the non-limiting case.
    pub fn new(
        s1: Rational,
        s2: Rational,
        p1: ExtReal,
        p2: ExtReal,
        d: u32,
        alpha: Rational,
    ) -> Self {
        EmbeddingParams {
            s1,
            s2,
            p1,
            p2,
            q1: ExtReal::TWO,
            q2: ExtReal::TWO,
            d,
            alpha,
        }
    }

    /// Set `s2 = 0` and pick `s1` so that the smoothness surplus equals
    /// `delta`. The result violates `s2 < s1` when
    /// `delta <= d(1/p2 - 1/p1)`.
    pub fn with_delta(p1: ExtReal, p2: ExtReal, d: u32, alpha: Rational, delta: Rational) -> Self {
        let gap = delta + Rational::from_integer(i128::from(d)) * (p1.recip() - p2.recip());
        EmbeddingParams::new(gap, Rational::zero(), p1, p2, d, alpha)
    }

    /// Every structural invariant that fails; empty when the input is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.s2 >= self.s1 {
            out.push(Violation::SmoothnessOrder);
        }
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !p.is_banach_exponent() {
                out.push(Violation::LebesgueRange(name));
            }
        }
        for (name, q) in [("q1", self.q1), ("q2", self.q2)] {
            if !q.is_banach_exponent() {
                out.push(Violation::FineIndexRange(name));
            }
        }
        if !self.alpha.is_positive() {
            out.push(Violation::NonPositiveAlpha);
        }
        if self.d == 0 {
            out.push(Violation::ZeroDimension);
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn dim(&self) -> Rational {
        Rational::from_integer(i128::from(self.d))
    }

    /// δ = s1 − s2 − d(1/p1 − 1/p2).
    pub fn delta(&self) -> Rational {
        self.s1 - self.s2 - self.dim() * (self.p1.recip() - self.p2.recip())
    }

    pub fn derive(&self) -> DerivedQuantities {
        derive(self)
    }

    pub fn is_compact(&self) -> bool {
        is_compact(self)
    }

    /// Parse either a JSON object or flat `key=value` text separated by
    /// commas, semicolons, whitespace or newlines.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        if text.trim_start().starts_with('{') {
            let v: serde_json::Value =
                serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
            Self::from_json_value(&v)
        } else {
            Self::from_kv(text)
        }
    }

    pub fn from_kv(text: &str) -> Result<Self, ParseError> {
        let mut b = Builder::default();
        for entry in text
            .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
            .filter(|e| !e.is_empty())
        {
            if entry.starts_with('#') {
                continue;
            }
            let (k, v) = entry
                .split_once('=')
                .ok_or_else(|| ParseError::MalformedEntry(entry.to_string()))?;
            b.set(k.trim(), &serde_json::Value::String(v.trim().to_string()))?;
        }
        b.finish()
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self, ParseError> {
        let obj = v
            .as_object()
            .ok_or_else(|| ParseError::Json("expected a JSON object".into()))?;
        let mut b = Builder::default();
        for (k, v) in obj {
            b.set(k, v)?;
        }
        b.finish()
    }
}

#[derive(Default)]
struct Builder {
    s1: Option<Rational>,
    s2: Option<Rational>,
    p1: Option<ExtReal>,
    p2: Option<ExtReal>,
    q1: Option<ExtReal>,
    q2: Option<ExtReal>,
    d: Option<u32>,
    alpha: Option<Rational>,
}

impl Builder {
    fn set(&mut self, key: &str, v: &serde_json::Value) -> Result<(), ParseError> {
        match key {
            "s1" => self.s1 = Some(value_to_rational(v)?),
            "s2" => self.s2 = Some(value_to_rational(v)?),
            "p1" => self.p1 = Some(value_to_ext(v)?),
            "p2" => self.p2 = Some(value_to_ext(v)?),
            "q1" => self.q1 = Some(value_to_ext(v)?),
            "q2" => self.q2 = Some(value_to_ext(v)?),
            "alpha" => self.alpha = Some(value_to_rational(v)?),
            "d" => {
                let r = value_to_rational(v)?;
                let d = if r.is_integer() { r.to_integer().to_u32() } else { None };
                self.d = Some(d.ok_or_else(|| ParseError::BadField {
                    field: "d",
                    reason: format!("expected a nonnegative integer, got {}", format_rational(&r)),
                })?);
            }
            other => return Err(ParseError::UnknownField(other.to_string())),
        }
        Ok(())
    }

    fn finish(self) -> Result<EmbeddingParams, ParseError> {
        Ok(EmbeddingParams {
            s1: self.s1.ok_or(ParseError::MissingField("s1"))?,
            s2: self.s2.ok_or(ParseError::MissingField("s2"))?,
            p1: self.p1.ok_or(ParseError::MissingField("p1"))?,
            p2: self.p2.ok_or(ParseError::MissingField("p2"))?,
            q1: self.q1.unwrap_or(ExtReal::TWO),
            q2: self.q2.unwrap_or(ExtReal::TWO),
            d: self.d.ok_or(ParseError::MissingField("d"))?,
            alpha: self.alpha.ok_or(ParseError::MissingField("alpha"))?,
        })
    }
}

impl FromStr for EmbeddingParams {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EmbeddingParams::parse(s)
    }
}

impl fmt::Display for EmbeddingParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "s1={},s2={},p1={},p2={},q1={},q2={},d={},alpha={}",
            format_rational(&self.s1),
            format_rational(&self.s2),
            self.p1,
            self.p2,
            self.q1,
            self.q2,
            self.d,
            format_rational(&self.alpha)
        )
    }
}

impl Serialize for EmbeddingParams {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("EmbeddingParams", 8)?;
        st.serialize_field("s1", &format_rational(&self.s1))?;
        st.serialize_field("s2", &format_rational(&self.s2))?;
        st.serialize_field("p1", &self.p1)?;
        st.serialize_field("p2", &self.p2)?;
        st.serialize_field("q1", &self.q1)?;
        st.serialize_field("q2", &self.q2)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("alpha", &format_rational(&self.alpha))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for EmbeddingParams {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        EmbeddingParams::from_json_value(&v).map_err(serde::de::Error::custom)
    }
}

/// The symbols every exponent case reads.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivedQuantities {
    #[serde(with = "rational_string")]
    pub delta: Rational,
    #[serde(with = "rational_string")]
    pub mu: Rational,
    #[serde(with = "rational_string")]
    pub p_tilde_inv: Rational,
    #[serde(serialize_with = "rational_string::option::serialize")]
    pub theta: Option<Rational>,
    #[serde(serialize_with = "rational_string::option::serialize")]
    pub theta1: Option<Rational>,
    pub p1_conj: ExtReal,
    pub p2_conj: ExtReal,
}

/// θ = (1/p1 − 1/p2)/(1/2 − 1/p2); `None` when p2 = 2.
pub fn theta(p1: ExtReal, p2: ExtReal) -> Option<Rational> {
    let half = Rational::new(1, 2);
    let den = half - p2.recip();
    (!den.is_zero()).then(|| (p1.recip() - p2.recip()) / den)
}

/// θ₁ = (1/p1 − 1/p2)/(1/p1 − 1/2); `None` when p1 = 2.
pub fn theta1(p1: ExtReal, p2: ExtReal) -> Option<Rational> {
    let half = Rational::new(1, 2);
    let den = p1.recip() - half;
    (!den.is_zero()).then(|| (p1.recip() - p2.recip()) / den)
}

pub fn derive(params: &EmbeddingParams) -> DerivedQuantities {
    let delta = params.delta();
    let mu = delta.min(params.alpha);
    let p_tilde_inv = if params.d == 0 {
        params.p1.recip()
    } else {
        mu / params.dim() + params.p1.recip()
    };
    DerivedQuantities {
        delta,
        mu,
        p_tilde_inv,
        theta: theta(params.p1, params.p2),
        theta1: theta1(params.p1, params.p2),
        p1_conj: params.p1.conjugate(),
        p2_conj: params.p2.conjugate(),
    }
}

/// `min(alpha, delta) > d·max(1/p2 − 1/p1, 0)`, decided exactly.
pub fn is_compact(params: &EmbeddingParams) -> bool {
    let mu = params.delta().min(params.alpha);
    let gap = (params.p2.recip() - params.p1.recip()).max(Rational::zero());
    mu > params.dim() * gap
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn parses_rationals_exactly() {
        assert_eq!(parse_rational("3/4").unwrap(), r(3, 4));
        assert_eq!(parse_rational("0.3").unwrap(), r(3, 10));
        assert_eq!(parse_rational("-1.25").unwrap(), r(-5, 4));
        assert_eq!(parse_rational("2").unwrap(), r(2, 1));
        assert_eq!(parse_rational("1e-1").unwrap(), r(1, 10));
        assert_eq!(parse_rational(".5").unwrap(), r(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn strict_floor_drops_integers() {
        assert_eq!(strict_floor(&r(24, 1)), 23);
        assert_eq!(strict_floor(&r(17, 2)), 8);
        assert_eq!(strict_floor(&r(-1, 2)), -1);
    }

    #[test]
    fn conjugate_table() {
        assert_eq!(ExtReal::ONE.conjugate(), ExtReal::Inf);
        assert_eq!(ExtReal::Inf.conjugate(), ExtReal::ONE);
        assert_eq!(ExtReal::int(4).conjugate(), ExtReal::ratio(4, 3));
        assert_eq!(ExtReal::TWO.conjugate(), ExtReal::TWO);
        assert_eq!(ExtReal::Inf.recip(), Rational::zero());
    }

    #[test]
    fn inf_orders_last() {
        assert!(ExtReal::Inf > ExtReal::int(1_000_000));
        assert!(ExtReal::ratio(4, 3) < ExtReal::ratio(3, 2));
    }

    #[test]
    fn derive_first_example() {
        let p = EmbeddingParams::new(r(2, 1), r(0, 1), ExtReal::ONE, ExtReal::TWO, 1, r(1, 1));
        let dq = derive(&p);
        assert_eq!(dq.delta, r(3, 2));
        assert_eq!(dq.mu, r(1, 1));
        assert_eq!(dq.p_tilde_inv, r(2, 1));
        assert_eq!(dq.theta, None);
        assert_eq!(dq.theta1, Some(r(1, 1)));
    }

    #[test]
    fn derive_second_example() {
        let p = EmbeddingParams::new(r(1, 1), r(0, 1), ExtReal::int(4), ExtReal::TWO, 1, r(1, 1));
        let dq = derive(&p);
        assert_eq!(dq.delta, r(5, 4));
        assert_eq!(dq.mu, r(1, 1));
        assert_eq!(dq.p_tilde_inv, r(5, 4));
    }

    #[test]
    fn derive_infinite_exponents() {
        let p = EmbeddingParams::new(r(1, 1), r(0, 1), ExtReal::Inf, ExtReal::Inf, 2, r(3, 1));
        let dq = derive(&p);
        assert_eq!(dq.delta, r(1, 1));
        assert_eq!(dq.mu, r(1, 1));
        assert_eq!(dq.p1_conj, ExtReal::ONE);
    }

    #[test]
    fn compactness_examples() {
        // p2 < p1: threshold d(1/p2 - 1/p1) = 1/2 exceeds alpha = 3/10.
        let p = EmbeddingParams::new(r(3, 2), r(0, 1), ExtReal::TWO, ExtReal::ONE, 1, r(3, 10));
        assert_eq!(p.delta(), r(2, 1));
        assert!(!is_compact(&p));

        let p = EmbeddingParams::new(r(2, 1), r(0, 1), ExtReal::ONE, ExtReal::TWO, 1, r(1, 1));
        assert!(is_compact(&p));

        // delta = 1/4 with d = 2, p1 = 4, p2 = 2 forces s1 - s2 = -1/4, so
        // the tuple is structurally invalid but still evaluable.
        let p = EmbeddingParams::new(r(0, 1), r(1, 4), ExtReal::int(4), ExtReal::TWO, 2, r(1, 1));
        assert_eq!(p.delta(), r(1, 4));
        assert!(!is_compact(&p));
        assert_eq!(p.validate(), vec![Violation::SmoothnessOrder]);
    }

    #[test]
    fn validate_reports_everything() {
        let mut p = EmbeddingParams::new(r(0, 1), r(1, 1), ExtReal::ONE, ExtReal::TWO, 1, r(1, 1));
        let v = p.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].to_string(), "s2<s1 required");

        p.s1 = r(2, 1);
        p.p1 = ExtReal::ratio(1, 2);
        let v = p.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().contains("p in [1,∞]"));

        p.p1 = ExtReal::ONE;
        assert!(p.validate().is_empty());

        let bad = EmbeddingParams {
            s1: r(0, 1),
            s2: r(0, 1),
            p1: ExtReal::ratio(1, 2),
            p2: ExtReal::ratio(1, 3),
            q1: ExtReal::int(0),
            q2: ExtReal::TWO,
            d: 0,
            alpha: r(-1, 1),
        };
        assert_eq!(bad.validate().len(), 6);
    }

    #[test]
    fn kv_and_json_parse_agree() {
        let kv = EmbeddingParams::parse("s1=2, s2=0, p1=1, p2=inf, q1=2, q2=inf, d=1, alpha=0.3")
            .unwrap();
        let js = EmbeddingParams::parse(
            r#"{"s1": 2, "s2": "0", "p1": 1, "p2": "inf", "q1": "2", "q2": "inf", "d": 1, "alpha": 0.3}"#,
        )
        .unwrap();
        assert_eq!(kv, js);
        assert_eq!(kv.alpha, r(3, 10));
        assert_eq!(kv.p2, ExtReal::Inf);
        let round = EmbeddingParams::parse(&kv.to_string()).unwrap();
        assert_eq!(round, kv);
        let json = serde_json::to_string(&kv).unwrap();
        assert_eq!(serde_json::from_str::<EmbeddingParams>(&json).unwrap(), kv);
    }

    #[test]
    fn parse_errors_are_specific() {
        assert_eq!(
            EmbeddingParams::parse("s1=1,s2=0,p1=1,p2=2,d=1").unwrap_err(),
            ParseError::MissingField("alpha")
        );
        assert!(matches!(
            EmbeddingParams::parse("s1=1,s2=0,p1=1,p2=2,d=1,alpha=1,beta=2").unwrap_err(),
            ParseError::UnknownField(_)
        ));
        assert!(matches!(
            EmbeddingParams::parse("s1=1,s2=0,p1=1,p2=2,d=1/2,alpha=1").unwrap_err(),
            ParseError::BadField { field: "d", .. }
        ));
    }

    #[test]
    fn with_delta_hits_target() {
        for (p1, p2) in [(ExtReal::ONE, ExtReal::int(4)), (ExtReal::int(4), ExtReal::ONE)] {
            for delta in [r(-1, 2), r(0, 1), r(1, 3), r(5, 2)] {
                let p = EmbeddingParams::with_delta(p1, p2, 3, r(1, 1), delta);
                assert_eq!(p.delta(), delta);
                let gap = delta + r(3, 1) * (p1.recip() - p2.recip());
                assert_eq!(p.is_valid(), gap > r(0, 1), "{p}");
            }
        }
    }
}
