//! Order models for Kolmogorov and Gelfand numbers of the identity
//! `ℓ_{p1}^N → ℓ_{p2}^N`, with the duality transform between the two kinds
//! and a brute-force coordinate-subspace oracle for the exact `p2 < p1`
//! formula.
//!
//! Order constants are normalized to 1. [`ModelCurve`] is the same model in
//! pure `f64` form, for callers that evaluate dimensions too large for `u64`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exponents::WidthKind;
use crate::params::{rational_to_f64, theta, theta1, ExtReal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteWidthQuery {
    pub kind: WidthKind,
    pub p1: ExtReal,
    pub p2: ExtReal,
    #[serde(rename = "N")]
    pub big_n: u64,
    pub n: u64,
}

impl FiniteWidthQuery {
    pub fn new(kind: WidthKind, p1: ExtReal, p2: ExtReal, big_n: u64, n: u64) -> Self {
        FiniteWidthQuery { kind, p1, p2, big_n, n }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Fidelity {
    Exact,
    OrderModel,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelWidth {
    pub value: f64,
    pub fidelity: Fidelity,
    pub formula_tag: &'static str,
    /// `n` lies outside the range the clause is stated for and the
    /// piecewise extension was used.
    pub extended: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FinwidthError {
    #[error("InvalidQuery: {0}")]
    InvalidQuery(String),
    #[error("UnsupportedRegion: no {kind} clause covers p1={p1}, p2={p2}")]
    UnsupportedRegion { kind: WidthKind, p1: ExtReal, p2: ExtReal },
    #[error("OracleTooLarge: N={0} exceeds the enumeration limit {ORACLE_MAX_N}")]
    OracleTooLarge(u64),
}

impl FinwidthError {
    pub fn name(&self) -> &'static str {
        match self {
            FinwidthError::InvalidQuery(_) => "InvalidQuery",
            FinwidthError::UnsupportedRegion { .. } => "UnsupportedRegion",
            FinwidthError::OracleTooLarge(_) => "OracleTooLarge",
        }
    }
}

/// Shape of `n ↦ width(N, n)` on `1 ≤ n ≤ N`; every curve is 0 for `n > N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelCurve {
    /// Constant 1.
    Flat,
    /// `min(1, N^a n^{-1/2})^θ`.
    Gluskin { a: f64, theta: f64 },
    /// `(N - n + 1)^c`.
    Exact { c: f64 },
}

impl ModelCurve {
    pub fn eval(&self, big_n: f64, n: f64) -> f64 {
        if n > big_n {
            return 0.0;
        }
        match *self {
            ModelCurve::Flat => 1.0,
            ModelCurve::Gluskin { a, theta } => {
                let base = (a * big_n.log2() - 0.5 * n.log2()).min(0.0);
                (base * theta).exp2()
            }
            ModelCurve::Exact { c } => (big_n - n + 1.0).powf(c),
        }
    }

    /// Smallest `n` past which the curve starts to decrease before rank.
    pub fn knee(&self, big_n: f64) -> f64 {
        match *self {
            ModelCurve::Gluskin { a, .. } => (2.0 * a * big_n.log2()).exp2().min(big_n),
            _ => 1.0,
        }
    }
}

/// A resolved clause: curve, tag, base fidelity and declared `n`-range as a
/// fraction of `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Clause {
    pub curve: ModelCurve,
    pub tag: &'static str,
    pub fidelity: Fidelity,
    pub declared_fraction: f64,
}

impl Clause {
    pub fn width(&self, big_n: u64, n: u64) -> ModelWidth {
        let rank_zero = n > big_n;
        let value = self.curve.eval(big_n as f64, n as f64);
        ModelWidth {
            value,
            fidelity: if rank_zero { Fidelity::Exact } else { self.fidelity },
            formula_tag: if rank_zero { "rank" } else { self.tag },
            extended: !rank_zero && (n as f64) > self.declared_fraction * big_n as f64,
        }
    }
}

/// Deliberate model defects used to check that verification suites notice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ModelVariant {
    #[default]
    Faithful,
    /// Replace θ (resp. θ₁) by its reciprocal.
    InvertedTheta,
}

pub fn clause(kind: WidthKind, p1: ExtReal, p2: ExtReal) -> Result<Clause, FinwidthError> {
    clause_with(kind, p1, p2, ModelVariant::Faithful)
}

pub fn clause_with(
    kind: WidthKind,
    p1: ExtReal,
    p2: ExtReal,
    variant: ModelVariant,
) -> Result<Clause, FinwidthError> {
    if !p1.is_banach_exponent() || !p2.is_banach_exponent() {
        return Err(FinwidthError::InvalidQuery(format!("p1={p1}, p2={p2} outside [1,inf]")));
    }
    let unsupported = || FinwidthError::UnsupportedRegion { kind, p1, p2 };
    let two = ExtReal::TWO;
    let exact = |tag| Clause {
        curve: ModelCurve::Flat,
        tag,
        fidelity: Fidelity::Exact,
        declared_fraction: 1.0,
    };
    if p2 < p1 {
        return Ok(Clause {
            curve: ModelCurve::Exact { c: rational_to_f64(&(p2.recip() - p1.recip())) },
            tag: "exact",
            fidelity: Fidelity::Exact,
            declared_fraction: 1.0,
        });
    }
    let adjust = |t: f64| match variant {
        ModelVariant::Faithful => t,
        ModelVariant::InvertedTheta => 1.0 / t,
    };
    let order = |curve, tag, declared_fraction| Clause {
        curve,
        tag,
        fidelity: Fidelity::OrderModel,
        declared_fraction,
    };
    match kind {
        WidthKind::Kolmogorov => {
            if p1 == p2 {
                return Ok(exact(if p1 > two { "k.iii" } else { "k.i" }));
            }
            if p2 <= two {
                return Ok(order(ModelCurve::Flat, "k.i", 0.25));
            }
            if p2.is_inf() {
                return Err(unsupported());
            }
            let a = rational_to_f64(&p2.recip());
            if p1 < two {
                Ok(order(ModelCurve::Gluskin { a, theta: 1.0 }, "k.ii", 0.25))
            } else {
                let t = adjust(rational_to_f64(&theta(p1, p2).expect("p2 > 2")));
                Ok(order(ModelCurve::Gluskin { a, theta: t }, "k.iv", 1.0))
            }
        }
        WidthKind::Gelfand => {
            if p1 == p2 {
                return Ok(exact(if p1 < two { "g.iii" } else { "g.i" }));
            }
            if p1 >= two {
                return Ok(order(ModelCurve::Flat, "g.i", 0.25));
            }
            if p1 == ExtReal::ONE {
                return Err(unsupported());
            }
            let a = rational_to_f64(&p1.conjugate().recip());
            if p2 > two {
                Ok(order(ModelCurve::Gluskin { a, theta: 1.0 }, "g.ii", 0.25))
            } else {
                let t = adjust(rational_to_f64(&theta1(p1, p2).expect("p1 < 2")));
                Ok(order(ModelCurve::Gluskin { a, theta: t }, "g.iv", 1.0))
            }
        }
    }
}

fn check_query(q: &FiniteWidthQuery) -> Result<(), FinwidthError> {
    if q.big_n == 0 || q.n == 0 {
        return Err(FinwidthError::InvalidQuery("N >= 1 and n >= 1 required".into()));
    }
    Ok(())
}

pub fn model_width(q: &FiniteWidthQuery) -> Result<ModelWidth, FinwidthError> {
    model_width_with(q, ModelVariant::Faithful)
}

pub fn model_width_with(q: &FiniteWidthQuery, variant: ModelVariant) -> Result<ModelWidth, FinwidthError> {
    check_query(q)?;
    Ok(clause_with(q.kind, q.p1, q.p2, variant)?.width(q.big_n, q.n))
}

pub fn kolmogorov_model(p1: ExtReal, p2: ExtReal, big_n: u64, n: u64) -> Result<ModelWidth, FinwidthError> {
    model_width(&FiniteWidthQuery::new(WidthKind::Kolmogorov, p1, p2, big_n, n))
}

pub fn gelfand_model(p1: ExtReal, p2: ExtReal, big_n: u64, n: u64) -> Result<ModelWidth, FinwidthError> {
    model_width(&FiniteWidthQuery::new(WidthKind::Gelfand, p1, p2, big_n, n))
}

/// Swap the width kind and pass to the adjoint exponents `(p2', p1')`.
pub fn dualize(q: &FiniteWidthQuery) -> FiniteWidthQuery {
    FiniteWidthQuery {
        kind: q.kind.dual(),
        p1: q.p2.conjugate(),
        p2: q.p1.conjugate(),
        ..*q
    }
}

/// Clause tag of the dual query's model.
pub fn dual_tag(tag: &str) -> Option<&'static str> {
    Some(match tag {
        "k.i" => "g.i",
        "k.ii" => "g.ii",
        "k.iii" => "g.iii",
        "k.iv" => "g.iv",
        "g.i" => "k.i",
        "g.ii" => "k.ii",
        "g.iii" => "k.iii",
        "g.iv" => "k.iv",
        "exact" => "exact",
        "rank" => "rank",
        _ => return None,
    })
}

pub const ORACLE_MAX_N: u64 = 12;

fn lp_norm(values: &[f64], p: ExtReal) -> f64 {
    match p {
        ExtReal::Inf => values.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        ExtReal::Finite(r) => {
            let p = rational_to_f64(&r);
            values.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

/// Coordinate-subspace width for `p2 < p1`, by enumeration.
///
/// For every coordinate subspace spanned by `n - 1` unit vectors the
/// residual identity acts on the complementary coordinates; its norm is
/// bounded below by testing every `ℓ_{p1}`-normalized indicator vector
/// supported there and evaluating the `ℓ_{p2}` norm by explicit summation.
/// Returns the minimum over subspaces of that maximum. Work grows like `3^N`.
pub fn coordinate_oracle(p1: ExtReal, p2: ExtReal, big_n: u64, n: u64) -> Result<f64, FinwidthError> {
    if big_n > ORACLE_MAX_N {
        return Err(FinwidthError::OracleTooLarge(big_n));
    }
    if big_n == 0 || n == 0 {
        return Err(FinwidthError::InvalidQuery("N >= 1 and n >= 1 required".into()));
    }
    if !(p2 < p1) {
        return Err(FinwidthError::InvalidQuery("coordinate oracle requires p2 < p1".into()));
    }
    if n > big_n {
        return Ok(0.0);
    }
    let nn = big_n as u32;
    let full: u32 = (1u32 << nn) - 1;
    let removed = (n - 1) as u32;
    let subsets: Vec<u32> = (0..=full).filter(|s| s.count_ones() == removed).collect();
    let best = subsets
        .par_iter()
        .map(|&s| {
            let rest = full & !s;
            let mut worst = 0.0f64;
            // walk every nonempty subset u of rest
            let mut u = rest;
            while u != 0 {
                let k = u.count_ones() as usize;
                let entry = match p1 {
                    ExtReal::Inf => 1.0,
                    ExtReal::Finite(r) => (k as f64).powf(-1.0 / rational_to_f64(&r)),
                };
                let v = vec![entry; k];
                worst = worst.max(lp_norm(&v, p2));
                u = (u - 1) & rest;
            }
            worst
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn kolmogorov_examples() {
        let w = kolmogorov_model(ExtReal::int(4), ExtReal::TWO, 10, 3).unwrap();
        assert!(close(w.value, 8f64.powf(0.25)));
        assert_eq!(w.fidelity, Fidelity::Exact);
        let w = kolmogorov_model(ExtReal::int(4), ExtReal::TWO, 10, 10).unwrap();
        assert!(close(w.value, 1.0));
        let w = kolmogorov_model(ExtReal::int(4), ExtReal::TWO, 10, 11).unwrap();
        assert_eq!((w.value, w.fidelity, w.formula_tag), (0.0, Fidelity::Exact, "rank"));
        let w = kolmogorov_model(ExtReal::ONE, ExtReal::int(4), 256, 64).unwrap();
        assert!(close(w.value, 0.5));
        assert_eq!((w.fidelity, w.formula_tag, w.extended), (Fidelity::OrderModel, "k.ii", false));
    }

    #[test]
    fn gelfand_examples() {
        let w = gelfand_model(ExtReal::ratio(4, 3), ExtReal::int(8), 256, 16).unwrap();
        assert!(close(w.value, 1.0));
        assert_eq!((w.fidelity, w.formula_tag), (Fidelity::OrderModel, "g.ii"));
        let w = gelfand_model(ExtReal::int(4), ExtReal::TWO, 10, 3).unwrap();
        assert!(close(w.value, 8f64.powf(0.25)));
        let w = gelfand_model(ExtReal::ratio(3, 2), ExtReal::ratio(3, 2), 7, 5).unwrap();
        assert_eq!((w.value, w.fidelity), (1.0, Fidelity::Exact));
    }

    #[test]
    fn unsupported_regions() {
        let e = kolmogorov_model(ExtReal::ONE, ExtReal::Inf, 8, 2).unwrap_err();
        assert_eq!(e.name(), "UnsupportedRegion");
        let e = gelfand_model(ExtReal::ONE, ExtReal::int(3), 8, 2).unwrap_err();
        assert_eq!(e.name(), "UnsupportedRegion");
    }

    #[test]
    fn extension_is_flagged() {
        let w = kolmogorov_model(ExtReal::ONE, ExtReal::int(4), 256, 100).unwrap();
        assert!(w.extended);
        // continued past the Gluskin range: N^{1/4} n^{-1/2}
        assert!(close(w.value, 4.0 / 10.0));
        let w = kolmogorov_model(ExtReal::ONE, ExtReal::TWO, 64, 16).unwrap();
        assert_eq!((w.value, w.extended), (1.0, false));
    }

    #[test]
    fn dualize_examples() {
        let q = FiniteWidthQuery::new(WidthKind::Gelfand, ExtReal::int(4), ExtReal::TWO, 10, 3);
        let dq = dualize(&q);
        assert_eq!(dq.kind, WidthKind::Kolmogorov);
        assert_eq!((dq.p1, dq.p2), (ExtReal::TWO, ExtReal::ratio(4, 3)));
        assert_eq!(dualize(&dq), q);
        let a = model_width(&q).unwrap();
        let b = model_width(&dq).unwrap();
        assert!(close(a.value, b.value));
        assert_eq!(b.formula_tag, "exact");
    }

    #[test]
    fn oracle_examples() {
        assert!(close(coordinate_oracle(ExtReal::Inf, ExtReal::ONE, 5, 2).unwrap(), 4.0));
        assert!(close(coordinate_oracle(ExtReal::TWO, ExtReal::ONE, 4, 4).unwrap(), 1.0));
        let v = coordinate_oracle(ExtReal::int(3), ExtReal::TWO, 8, 3).unwrap();
        assert!(close(v, 6f64.powf(0.5 - 1.0 / 3.0)));
        assert_eq!(coordinate_oracle(ExtReal::int(3), ExtReal::TWO, 4, 5).unwrap(), 0.0);
        assert_eq!(
            coordinate_oracle(ExtReal::int(3), ExtReal::TWO, 13, 3).unwrap_err(),
            FinwidthError::OracleTooLarge(13)
        );
        assert!(coordinate_oracle(ExtReal::TWO, ExtReal::int(3), 4, 1).is_err());
    }

    #[test]
    fn curve_knee() {
        let c = ModelCurve::Gluskin { a: 0.25, theta: 1.0 };
        assert!(close(c.knee(256.0), 16.0));
        assert_eq!(c.eval(256.0, 16.0), 1.0);
        assert!(close(c.eval(256.0, 64.0), 0.5));
    }
}
