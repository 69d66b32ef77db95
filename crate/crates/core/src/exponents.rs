//! Case tables for the decay exponent ϰ in `d_n ~ n^{-ϰ}` (Kolmogorov) and
//! `c_n ~ n^{-ϰ}` (Gelfand), plus the classifier deciding when approximation,
//! Gelfand and Kolmogorov numbers are equivalent.
//!
//! Every decision is exact. Entry points come in two flavours: one taking
//! full [`EmbeddingParams`] (which also gates compactness and the
//! non-limiting hypothesis δ ≠ α) and a direct `(p1, p2, μ/d)` form used by
//! the duality checks, where δ is not available.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::params::{
    format_rational, is_compact, rational_string, theta, theta1, EmbeddingParams, ExtReal,
    Rational, Violation,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WidthKind {
    Kolmogorov,
    Gelfand,
}

impl WidthKind {
    pub fn dual(self) -> Self {
        match self {
            WidthKind::Kolmogorov => WidthKind::Gelfand,
            WidthKind::Gelfand => WidthKind::Kolmogorov,
        }
    }
}

impl fmt::Display for WidthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WidthKind::Kolmogorov => "kolmogorov",
            WidthKind::Gelfand => "gelfand",
        })
    }
}

impl std::str::FromStr for WidthKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "kolmogorov" | "k" | "d" => Ok(WidthKind::Kolmogorov),
            "gelfand" | "g" | "c" => Ok(WidthKind::Gelfand),
            other => Err(format!("unknown width kind `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
}

impl CaseId {
    pub const ALL: [CaseId; 6] = [CaseId::I, CaseId::Ii, CaseId::Iii, CaseId::Iv, CaseId::V, CaseId::Vi];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::I => "i",
            CaseId::Ii => "ii",
            CaseId::Iii => "iii",
            CaseId::Iv => "iv",
            CaseId::V => "v",
            CaseId::Vi => "vi",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for CaseId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Which case fired and the resulting exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegimeDecision {
    pub width_kind: WidthKind,
    pub case_id: CaseId,
    #[serde(with = "rational_string")]
    pub kappa: Rational,
    /// Hypothesis tags that were checked (`a`, `b`, `c`) followed by the
    /// sub-region tags of the matching case.
    pub assumptions_used: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    A,
    C,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::A => "a",
            Hypothesis::C => "c",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExponentError {
    #[error("InvalidParams: {}", join_violations(.0))]
    InvalidParams(Vec<Violation>),
    #[error("NotCompact: min(alpha, delta) = {mu} <= {threshold} = d*max(1/p2 - 1/p1, 0)")]
    NotCompact { mu: String, threshold: String },
    #[error("LimitingCase: delta == alpha excluded by hypothesis (b)")]
    LimitingCase,
    #[error("HypothesisFailure: hypothesis ({tag}) violated: {detail}")]
    HypothesisFailure { tag: Hypothesis, detail: String },
    #[error("BoundaryCase: {detail}; the case table is silent on this equality")]
    BoundaryCase { detail: String },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl ExponentError {
    pub fn name(&self) -> &'static str {
        match self {
            ExponentError::InvalidParams(_) => "InvalidParams",
            ExponentError::NotCompact { .. } => "NotCompact",
            ExponentError::LimitingCase => "LimitingCase",
            ExponentError::HypothesisFailure { .. } => "HypothesisFailure",
            ExponentError::BoundaryCase { .. } => "BoundaryCase",
        }
    }
}

fn half() -> Rational {
    Rational::new(1, 2)
}

fn check_exponents(p1: ExtReal, p2: ExtReal) -> Result<(), ExponentError> {
    let mut v = Vec::new();
    if !p1.is_banach_exponent() {
        v.push(Violation::LebesgueRange("p1"));
    }
    if !p2.is_banach_exponent() {
        v.push(Violation::LebesgueRange("p2"));
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(ExponentError::InvalidParams(v))
    }
}

/// Shared gate for hypothesis (a) on the direct entry points. `m` is μ/d.
fn check_hypothesis_a(p1: ExtReal, p2: ExtReal, m: Rational) -> Result<(), ExponentError> {
    if !m.is_positive() {
        return Err(ExponentError::NotCompact {
            mu: format_rational(&m),
            threshold: "0".into(),
        });
    }
    // p~ < p2 is 1/p2 < m + 1/p1.
    if p2 < p1 && p2.recip() >= m + p1.recip() {
        return Err(ExponentError::HypothesisFailure {
            tag: Hypothesis::A,
            detail: format!("p2 = {p2} <= p~ with p2 < p1"),
        });
    }
    Ok(())
}

fn boundary(lhs: &str, rhs: &Rational) -> ExponentError {
    ExponentError::BoundaryCase {
        detail: format!("mu/d == {lhs} = {}", format_rational(rhs)),
    }
}

fn decision(kind: WidthKind, case_id: CaseId, kappa: Rational, tags: &[&str]) -> RegimeDecision {
    let mut assumptions_used = vec!["a".to_string(), "c".to_string()];
    assumptions_used.extend(tags.iter().map(|t| t.to_string()));
    RegimeDecision {
        width_kind: kind,
        case_id,
        kappa,
        assumptions_used,
    }
}

/// Deliberate classifier defects used to check that the table scan notices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ClassifierVariant {
    #[default]
    Faithful,
    /// Use `1/θ` (resp. `1/θ₁`) in the gates between cases (v) and (vi).
    InvertedTheta,
}

impl ClassifierVariant {
    fn apply(self, t: Rational) -> Rational {
        match self {
            ClassifierVariant::Faithful => t,
            ClassifierVariant::InvertedTheta => t.recip(),
        }
    }
}

/// Kolmogorov exponent from `(p1, p2, μ/d)`; skips hypothesis (b), which
/// needs δ and α separately.
pub fn kolmogorov_exponent_at(
    p1: ExtReal,
    p2: ExtReal,
    mu_over_d: Rational,
) -> Result<RegimeDecision, ExponentError> {
    kolmogorov_at(p1, p2, mu_over_d, ClassifierVariant::Faithful)
}

fn kolmogorov_at(
    p1: ExtReal,
    p2: ExtReal,
    mu_over_d: Rational,
    variant: ClassifierVariant,
) -> Result<RegimeDecision, ExponentError> {
    use CaseId::*;
    let kind = WidthKind::Kolmogorov;
    let m = mu_over_d;
    check_exponents(p1, p2)?;
    check_hypothesis_a(p1, p2, m)?;
    if p1 < p2 && p2.is_inf() {
        return Err(ExponentError::HypothesisFailure {
            tag: Hypothesis::C,
            detail: "p2 < inf required when p1 < p2".into(),
        });
    }
    let two = ExtReal::TWO;
    let (i1, i2, i3) = (p1.recip(), p2.recip(), half());

    if p2 < p1 {
        return Ok(decision(kind, Ii, m + i1 - i2, &["ii:p~<p2<p1"]));
    }
    let mut tags = Vec::new();
    if p2 <= two {
        tags.push("i:p1<=p2<=2");
    }
    if p1 == p2 && p1 > two {
        tags.push("i:2<p1=p2");
    }
    if !tags.is_empty() {
        return Ok(decision(kind, I, m, &tags));
    }
    // Remaining region: p1 < p2, 2 < p2 < inf.
    if p1 < two {
        let gate = i2;
        return match m.cmp(&gate) {
            std::cmp::Ordering::Greater => Ok(decision(kind, Iii, m + i3 - i2, &["iii:1<=p1<2<p2<inf"])),
            std::cmp::Ordering::Less => Ok(decision(kind, Iv, m * p2_half(p2), &["iv:1<=p1<2<p2<inf"])),
            std::cmp::Ordering::Equal => Err(boundary("1/p2", &gate)),
        };
    }
    let th = variant.apply(theta(p1, p2).expect("p2 > 2 here"));
    let gate = th * i2;
    match m.cmp(&gate) {
        std::cmp::Ordering::Greater => Ok(decision(kind, V, m + i1 - i2, &["v:2<=p1<p2<inf"])),
        std::cmp::Ordering::Less => Ok(decision(kind, Vi, m * p2_half(p2), &["vi:2<=p1<p2<inf"])),
        std::cmp::Ordering::Equal => Err(boundary("theta/p2", &gate)),
    }
}

fn p2_half(p: ExtReal) -> Rational {
    p.finite().expect("finite exponent") * half()
}

/// Gelfand exponent from `(p1, p2, μ/d)`.
pub fn gelfand_exponent_at(
    p1: ExtReal,
    p2: ExtReal,
    mu_over_d: Rational,
) -> Result<RegimeDecision, ExponentError> {
    gelfand_at(p1, p2, mu_over_d, ClassifierVariant::Faithful)
}

fn gelfand_at(
    p1: ExtReal,
    p2: ExtReal,
    mu_over_d: Rational,
    variant: ClassifierVariant,
) -> Result<RegimeDecision, ExponentError> {
    use CaseId::*;
    let kind = WidthKind::Gelfand;
    let m = mu_over_d;
    check_exponents(p1, p2)?;
    check_hypothesis_a(p1, p2, m)?;
    if p1 < p2 && p1 == ExtReal::ONE {
        return Err(ExponentError::HypothesisFailure {
            tag: Hypothesis::C,
            detail: "p1 > 1 required when p1 < p2".into(),
        });
    }
    let two = ExtReal::TWO;
    let (i1, i2, i3) = (p1.recip(), p2.recip(), half());

    if p2 < p1 {
        return Ok(decision(kind, Ii, m + i1 - i2, &["ii:p~<p2<p1"]));
    }
    let mut tags = Vec::new();
    if p1 >= two {
        tags.push("i:2<=p1<=p2<=inf");
    }
    if p1 == p2 && p1 < two {
        tags.push("i:1<=p1=p2<2");
    }
    if !tags.is_empty() {
        return Ok(decision(kind, I, m, &tags));
    }
    // Remaining region: 1 < p1 < 2, p1 < p2.
    let p1c = p1.conjugate();
    let inv_p1c = p1c.recip();
    if p2 > two {
        let gate = inv_p1c;
        return match m.cmp(&gate) {
            std::cmp::Ordering::Greater => Ok(decision(kind, Iii, m + i1 - i3, &["iii:1<p1<2<p2<=inf"])),
            std::cmp::Ordering::Less => Ok(decision(kind, Iv, m * p2_half(p1c), &["iv:1<p1<2<p2<=inf"])),
            std::cmp::Ordering::Equal => Err(boundary("1/p1'", &gate)),
        };
    }
    let th1 = variant.apply(theta1(p1, p2).expect("p1 < 2 here"));
    let gate = th1 * inv_p1c;
    match m.cmp(&gate) {
        std::cmp::Ordering::Greater => Ok(decision(kind, V, m + i1 - i2, &["v:1<p1<p2<=2"])),
        std::cmp::Ordering::Less => Ok(decision(kind, Vi, m * p2_half(p1c), &["vi:1<p1<p2<=2"])),
        std::cmp::Ordering::Equal => Err(boundary("theta1/p1'", &gate)),
    }
}

pub fn exponent_at(
    kind: WidthKind,
    p1: ExtReal,
    p2: ExtReal,
    mu_over_d: Rational,
) -> Result<RegimeDecision, ExponentError> {
    exponent_at_with(kind, p1, p2, mu_over_d, ClassifierVariant::Faithful)
}

pub fn exponent_at_with(
    kind: WidthKind,
    p1: ExtReal,
    p2: ExtReal,
    mu_over_d: Rational,
    variant: ClassifierVariant,
) -> Result<RegimeDecision, ExponentError> {
    match kind {
        WidthKind::Kolmogorov => kolmogorov_at(p1, p2, mu_over_d, variant),
        WidthKind::Gelfand => gelfand_at(p1, p2, mu_over_d, variant),
    }
}

/// Gates shared by both tables on full parameters: ranges, compactness,
/// smoothness order, then the non-limiting hypothesis. Returns μ/d.
fn gate(params: &EmbeddingParams) -> Result<Rational, ExponentError> {
    let (order, range): (Vec<_>, Vec<_>) = params
        .validate()
        .into_iter()
        .partition(|v| matches!(v, Violation::SmoothnessOrder));
    if !range.is_empty() {
        return Err(ExponentError::InvalidParams(range));
    }
    let dq = params.derive();
    if !is_compact(params) {
        let gap = (params.p2.recip() - params.p1.recip()).max(Rational::zero());
        return Err(ExponentError::NotCompact {
            mu: format_rational(&dq.mu),
            threshold: format_rational(&(params.dim() * gap)),
        });
    }
    if !order.is_empty() {
        return Err(ExponentError::InvalidParams(order));
    }
    if dq.delta == params.alpha {
        return Err(ExponentError::LimitingCase);
    }
    Ok(dq.mu / params.dim())
}

fn with_b(mut d: RegimeDecision) -> RegimeDecision {
    d.assumptions_used.insert(1, "b".to_string());
    d
}

pub fn kolmogorov_exponent(params: &EmbeddingParams) -> Result<RegimeDecision, ExponentError> {
    let m = gate(params)?;
    kolmogorov_exponent_at(params.p1, params.p2, m).map(with_b)
}

pub fn gelfand_exponent(params: &EmbeddingParams) -> Result<RegimeDecision, ExponentError> {
    let m = gate(params)?;
    gelfand_exponent_at(params.p1, params.p2, m).map(with_b)
}

pub fn exponent(kind: WidthKind, params: &EmbeddingParams) -> Result<RegimeDecision, ExponentError> {
    exponent_with(kind, params, ClassifierVariant::Faithful)
}

pub fn exponent_with(
    kind: WidthKind,
    params: &EmbeddingParams,
    variant: ClassifierVariant,
) -> Result<RegimeDecision, ExponentError> {
    let m = gate(params)?;
    exponent_at_with(kind, params.p1, params.p2, m, variant).map(with_b)
}

/// Which of `a_n ~ c_n`, `a_n ~ d_n`, `c_n ~ d_n` the known tables imply.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonVerdict {
    pub a_sim_c: bool,
    pub a_sim_d: bool,
    pub c_sim_d: bool,
    pub matched_clauses: Vec<String>,
}

/// Evaluate every comparison clause at `(p1, p2, μ/d)`.
pub fn compare_widths_at(p1: ExtReal, p2: ExtReal, mu_over_d: Rational) -> ComparisonVerdict {
    let m = mu_over_d;
    let one = ExtReal::ONE;
    let two = ExtReal::TWO;
    let p1c = p1.conjugate();
    // p~ < p2  <=>  1/p2 < m + 1/p1
    let tilde_below_p2 = p2.recip() < m + p1.recip();
    let m_ne = |p: ExtReal| m != p.recip();

    let mut clauses = Vec::new();
    let mut hit = |tag: &str, cond: bool| {
        if cond {
            clauses.push(tag.to_string());
        }
        cond
    };
    let ic_a = hit("i(a)", two <= p1 && p1 < p2);
    let ic_b = hit("i(b)", tilde_below_p2 && p2 <= p1);
    let ic_c = hit("i(c)", one < p1 && p1 < p1c && p1c <= p2 && m_ne(p1c));
    let id_a = hit("ii(a)", p1 < p2 && p2 <= two);
    let id_b = hit("ii(b)", tilde_below_p2 && p2 <= p1);
    let id_c = hit(
        "ii(c)",
        p1 < two && two < p2 && p2 <= p1c && !p2.is_inf() && m_ne(p2),
    );
    let iii_a = hit("iii(a)", tilde_below_p2 && p2 <= p1);
    let iii_b = hit("iii(b)", one < p1 && p1 < p1c && p1c == p2 && !p2.is_inf() && m_ne(p2));

    ComparisonVerdict {
        a_sim_c: ic_a || ic_b || ic_c,
        a_sim_d: id_a || id_b || id_c,
        c_sim_d: iii_a || iii_b,
        matched_clauses: clauses,
    }
}

pub fn compare_widths(params: &EmbeddingParams) -> ComparisonVerdict {
    let dq = params.derive();
    let m = if params.d == 0 {
        Rational::zero()
    } else {
        dq.mu / params.dim()
    };
    compare_widths_at(params.p1, params.p2, m)
}

/// Step-regime constants `(τ, h)` such that the finite-dimensional model is
/// bounded by `N^{1/τ} n^{-1/h}`; `None` outside cases (iii)–(vi).
pub fn step_constants(kind: WidthKind, p1: ExtReal, p2: ExtReal) -> Option<(Rational, Rational)> {
    let two = ExtReal::TWO;
    let r2 = Rational::from_integer(2);
    match kind {
        WidthKind::Kolmogorov => {
            if !(p1 < p2 && two < p2 && !p2.is_inf()) {
                return None;
            }
            let p2f = p2.finite()?;
            if p1 < two {
                Some((p2f, r2))
            } else {
                let th = theta(p1, p2)?;
                Some((p2f / th, r2 / th))
            }
        }
        WidthKind::Gelfand => {
            if !(p1 < p2 && ExtReal::ONE < p1 && p1 < two) {
                return None;
            }
            let p1c = p1.conjugate().finite()?;
            if p2 > two {
                Some((p1c, r2))
            } else {
                let th1 = theta1(p1, p2)?;
                Some((p1c / th1, r2 / th1))
            }
        }
    }
}

/// Closed form of `κ` for a given case, without the region logic above.
pub fn kappa_formula(kind: WidthKind, case_id: CaseId, p1: ExtReal, p2: ExtReal, m: Rational) -> Option<Rational> {
    let (i1, i2) = (p1.recip(), p2.recip());
    let h = half();
    Some(match (kind, case_id) {
        (_, CaseId::I) => m,
        (_, CaseId::Ii) | (_, CaseId::V) => m + i1 - i2,
        (WidthKind::Kolmogorov, CaseId::Iii) => m + h - i2,
        (WidthKind::Kolmogorov, CaseId::Iv) | (WidthKind::Kolmogorov, CaseId::Vi) => m * p2.finite()? * h,
        (WidthKind::Gelfand, CaseId::Iii) => m + i1 - h,
        (WidthKind::Gelfand, CaseId::Iv) | (WidthKind::Gelfand, CaseId::Vi) => {
            m * p1.conjugate().finite()? * h
        }
    })
}

impl RegimeDecision {
    pub fn kappa_f64(&self) -> f64 {
        crate::params::rational_to_f64(&self.kappa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn params(p1: ExtReal, p2: ExtReal, d: u32, alpha: Rational, delta: Rational) -> EmbeddingParams {
        EmbeddingParams::with_delta(p1, p2, d, alpha, delta)
    }

    #[test]
    fn kolmogorov_case_i() {
        let p = params(ExtReal::ONE, ExtReal::TWO, 1, r(1, 1), r(3, 2));
        let dec = kolmogorov_exponent(&p).unwrap();
        assert_eq!(dec.case_id, CaseId::I);
        assert_eq!(dec.kappa, r(1, 1));
        assert_eq!(dec.assumptions_used[..3], ["a", "b", "c"]);
    }

    #[test]
    fn kolmogorov_case_iii() {
        let p = params(ExtReal::ONE, ExtReal::int(4), 1, r(2, 1), r(3, 1));
        let dec = kolmogorov_exponent(&p).unwrap();
        assert_eq!((dec.case_id, dec.kappa), (CaseId::Iii, r(9, 4)));
    }

    #[test]
    fn kolmogorov_case_vi() {
        let p = params(ExtReal::TWO, ExtReal::int(4), 1, r(1, 5), r(5, 4));
        assert_eq!(p.derive().theta, Some(r(1, 1)));
        let dec = kolmogorov_exponent(&p).unwrap();
        assert_eq!((dec.case_id, dec.kappa), (CaseId::Vi, r(2, 5)));
    }

    #[test]
    fn kolmogorov_case_ii() {
        let p = params(ExtReal::int(4), ExtReal::TWO, 1, r(1, 1), r(5, 4));
        let dec = kolmogorov_exponent(&p).unwrap();
        assert_eq!((dec.case_id, dec.kappa), (CaseId::Ii, r(3, 4)));
    }

    #[test]
    fn gelfand_case_i() {
        let p = params(ExtReal::int(3), ExtReal::int(4), 1, r(1, 1), r(2, 1));
        let dec = gelfand_exponent(&p).unwrap();
        assert_eq!((dec.case_id, dec.kappa), (CaseId::I, r(1, 1)));
    }

    #[test]
    fn gelfand_case_iv() {
        let p = params(ExtReal::ratio(4, 3), ExtReal::int(3), 1, r(1, 5), r(7, 12));
        let dec = gelfand_exponent(&p).unwrap();
        assert_eq!((dec.case_id, dec.kappa), (CaseId::Iv, r(2, 5)));
    }

    #[test]
    fn gelfand_rejects_p1_one() {
        let p = params(ExtReal::ONE, ExtReal::int(3), 1, r(1, 1), r(2, 1));
        match gelfand_exponent(&p) {
            Err(ExponentError::HypothesisFailure { tag: Hypothesis::C, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn kolmogorov_rejects_p2_inf() {
        let p = params(ExtReal::ONE, ExtReal::Inf, 1, r(1, 1), r(2, 1));
        assert!(matches!(
            kolmogorov_exponent(&p),
            Err(ExponentError::HypothesisFailure { tag: Hypothesis::C, .. })
        ));
    }

    #[test]
    fn limiting_and_compactness_gates() {
        let p = params(ExtReal::ONE, ExtReal::TWO, 1, r(1, 1), r(1, 1));
        assert_eq!(kolmogorov_exponent(&p), Err(ExponentError::LimitingCase));
        assert!(kolmogorov_exponent(&p)
            .unwrap_err()
            .to_string()
            .starts_with("LimitingCase: delta == alpha"));
        let p = params(ExtReal::TWO, ExtReal::ONE, 1, r(3, 10), r(2, 1));
        assert_eq!(kolmogorov_exponent(&p).unwrap_err().name(), "NotCompact");
        let p = params(ExtReal::ONE, ExtReal::TWO, 1, r(1, 1), r(-1, 2));
        assert_eq!(gelfand_exponent(&p).unwrap_err().name(), "NotCompact");
    }

    #[test]
    fn boundaries_are_reported() {
        // mu/d = 1/p2 exactly in the (iii)/(iv) region
        let e = kolmogorov_exponent_at(ExtReal::ONE, ExtReal::int(4), r(1, 4)).unwrap_err();
        assert_eq!(e.name(), "BoundaryCase");
        // mu/d = theta/p2 with p1 = 3, p2 = 6: theta = (1/6)/(1/3) = 1/2
        let e = kolmogorov_exponent_at(ExtReal::int(3), ExtReal::int(6), r(1, 12)).unwrap_err();
        assert_eq!(e.name(), "BoundaryCase");
        let e = gelfand_exponent_at(ExtReal::ratio(4, 3), ExtReal::int(4), r(1, 4)).unwrap_err();
        assert_eq!(e.name(), "BoundaryCase");
        // p1 = 4/3, p2 = 2: theta1 = (3/4-1/2)/(3/4-1/2) = 1, gate = 1/4
        let e = gelfand_exponent_at(ExtReal::ratio(4, 3), ExtReal::TWO, r(1, 4)).unwrap_err();
        assert_eq!(e.name(), "BoundaryCase");
    }

    #[test]
    fn hypothesis_a_on_direct_entry() {
        // p2 < p1 with 1/p2 - 1/p1 = 1/4 >= m
        let e = kolmogorov_exponent_at(ExtReal::int(4), ExtReal::TWO, r(1, 4)).unwrap_err();
        assert!(matches!(e, ExponentError::HypothesisFailure { tag: Hypothesis::A, .. }));
    }

    #[test]
    fn equality_cells_at_two() {
        let k = kolmogorov_exponent_at(ExtReal::TWO, ExtReal::TWO, r(1, 3)).unwrap();
        assert_eq!(k.case_id, CaseId::I);
        assert_eq!(k.assumptions_used, ["a", "c", "i:p1<=p2<=2"]);
        let g = gelfand_exponent_at(ExtReal::TWO, ExtReal::TWO, r(1, 3)).unwrap();
        assert_eq!(g.assumptions_used, ["a", "c", "i:2<=p1<=p2<=inf"]);
        let k = kolmogorov_exponent_at(ExtReal::Inf, ExtReal::Inf, r(1, 3)).unwrap();
        assert_eq!(k.assumptions_used, ["a", "c", "i:2<p1=p2"]);
    }

    #[test]
    fn comparison_examples() {
        let m = r(1, 2);
        let v = compare_widths_at(ExtReal::int(3), ExtReal::int(4), m);
        assert!(v.a_sim_c);
        assert!(v.matched_clauses.contains(&"i(a)".to_string()));

        let v = compare_widths_at(ExtReal::ONE, ExtReal::TWO, m);
        assert!(v.a_sim_d);
        assert!(v.matched_clauses.contains(&"ii(a)".to_string()));

        let v = compare_widths_at(ExtReal::ratio(4, 3), ExtReal::int(4), m);
        assert!(v.c_sim_d);
        assert!(v.matched_clauses.contains(&"iii(b)".to_string()));
        // boundary mu = d/p2 kills the (iii)(b) clause
        let v = compare_widths_at(ExtReal::ratio(4, 3), ExtReal::int(4), r(1, 4));
        assert!(!v.c_sim_d);
    }

    #[test]
    fn step_constants_match_cases() {
        let (tau, h) = step_constants(WidthKind::Kolmogorov, ExtReal::TWO, ExtReal::int(4)).unwrap();
        assert_eq!((tau, h), (r(4, 1), r(2, 1)));
        let (tau, h) = step_constants(WidthKind::Kolmogorov, ExtReal::int(3), ExtReal::int(6)).unwrap();
        assert_eq!((tau, h), (r(12, 1), r(4, 1)));
        assert!(step_constants(WidthKind::Kolmogorov, ExtReal::ONE, ExtReal::TWO).is_none());
        let (tau, _) = step_constants(WidthKind::Gelfand, ExtReal::ratio(4, 3), ExtReal::int(3)).unwrap();
        assert_eq!(tau, r(4, 1));
    }
}
