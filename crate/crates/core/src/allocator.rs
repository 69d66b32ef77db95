//! Budget allocation over the dyadic blocks `(j, i)` of the discretized
//! embedding `ℓ_{q1}(2^{jδ} ℓ_{p1}(α)) → ℓ_{q2}(ℓ_{p2})`.
//!
//! Every block is replaced by its finite-dimensional width model with
//! cardinality `2^{d(j+i)}` and scale `2^{-jδ-iα}`, all constants 1. An
//! allocation grants block `(j, i)` the index `n_{j,i}` and costs
//! `Σ (n_{j,i} - 1)`; its value is `Σ scale · width(2^{d(j+i)}, n_{j,i})`
//! plus the untouched tail. Three strategies are provided:
//!
//! * `PaperStep4`, the three-zone split for `μ < d/τ`,
//! * `PaperStep3`, the `P`/`Q` split for `μ > d/τ`,
//! * `Greedy`, water-filling along the lower convex hull of every block.
//!
//! Lower bounds come from single blocks `(j, 0)` and `(0, i)` sampled at
//! `N/4` and at the knee `[N^{2a}]`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exponents::{exponent, step_constants, ExponentError, RegimeDecision, WidthKind};
use crate::finwidths::{clause, Clause, FinwidthError, ModelCurve};
use crate::params::{rational_to_f64, strict_floor, EmbeddingParams, Rational};

/// Largest exponent of two used for block cardinalities.
const MAX_BITS: u32 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    PaperStep4,
    PaperStep3,
    Greedy,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::PaperStep4 => "paper-step4",
            Strategy::PaperStep3 => "paper-step3",
            Strategy::Greedy => "greedy",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum AllocError {
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error(transparent)]
    Model(#[from] FinwidthError),
    #[error("RegimeMismatch: {0}")]
    RegimeMismatch(String),
    #[error("InfeasibleConstraints: {0}")]
    InfeasibleConstraints(String),
    #[error("InvalidBudget: {0}")]
    InvalidBudget(String),
}

impl AllocError {
    pub fn name(&self) -> &'static str {
        match self {
            AllocError::Exponent(e) => e.name(),
            AllocError::Model(e) => e.name(),
            AllocError::RegimeMismatch(_) => "RegimeMismatch",
            AllocError::InfeasibleConstraints(_) => "InfeasibleConstraints",
            AllocError::InvalidBudget(_) => "InvalidBudget",
        }
    }
}

/// The block-diagonal model of one embedding under one width kind.
#[derive(Clone, Debug)]
pub struct BlockModel {
    pub kind: WidthKind,
    pub d: u32,
    pub delta: f64,
    pub alpha: f64,
    pub mu: f64,
    pub kappa: f64,
    pub decision: RegimeDecision,
    pub clause: Clause,
    exact_delta: Rational,
    exact_alpha: Rational,
    exact_mu: Rational,
    /// `a` in `N^a n^{-1/2}` for Gluskin-type clauses.
    knee_a: Option<Rational>,
    step: Option<(Rational, Rational)>,
    /// `w(N, 1) = N^{c1}`.
    c1: f64,
}

impl BlockModel {
    pub fn new(params: &EmbeddingParams, kind: WidthKind) -> Result<Self, AllocError> {
        let decision = exponent(kind, params)?;
        let clause = clause(kind, params.p1, params.p2)?;
        let dq = params.derive();
        let knee_a = match clause.curve {
            ModelCurve::Gluskin { .. } => Some(match kind {
                WidthKind::Kolmogorov => params.p2.recip(),
                WidthKind::Gelfand => params.p1.conjugate().recip(),
            }),
            _ => None,
        };
        let c1 = match clause.curve {
            ModelCurve::Exact { c } => c,
            _ => 0.0,
        };
        Ok(BlockModel {
            kind,
            d: params.d,
            delta: rational_to_f64(&dq.delta),
            alpha: rational_to_f64(&params.alpha),
            mu: rational_to_f64(&dq.mu),
            kappa: decision.kappa_f64(),
            decision,
            clause,
            exact_delta: dq.delta,
            exact_alpha: params.alpha,
            exact_mu: dq.mu,
            knee_a,
            step: step_constants(kind, params.p1, params.p2),
            c1,
        })
    }

    pub fn cells_on(&self, m: u32) -> f64 {
        f64::from(self.d * m).exp2()
    }

    pub fn scale(&self, j: u32, i: u32) -> f64 {
        (-(f64::from(j)) * self.delta - f64::from(i) * self.alpha).exp2()
    }

    pub fn cell_value(&self, j: u32, i: u32, n: f64) -> f64 {
        self.scale(j, i) * self.clause.curve.eval(self.cells_on(j + i), n)
    }

    /// `Σ_{m > top} Σ_{j+i=m} 2^{-jδ-iα} · w(2^{dm}, 1)`, closed form.
    pub fn tail(&self, top: u32) -> f64 {
        geometric_tail(self.delta, self.alpha, f64::from(self.d) * self.c1, top)
    }

    /// `Σ_{m > top} Σ_{j+i=m} 2^{-jδ-iα}`.
    pub fn scale_tail(&self, top: u32) -> f64 {
        geometric_tail(self.delta, self.alpha, 0.0, top)
    }

    /// `(τ, h)` of the step regimes, if the case has one.
    pub fn step_constants(&self) -> Option<(Rational, Rational)> {
        self.step
    }

    /// Smallest diagonal whose tail is below `tol`, within the `f64` range.
    pub fn diagonal_for_tail(&self, tol: f64) -> u32 {
        let cap = MAX_BITS / self.d.max(1);
        (0..cap).find(|&m| self.tail(m) <= tol).unwrap_or(cap)
    }

    /// Default diagonal cap: tail below `1e-4 · n_max^{-ϰ}`.
    pub fn auto_diagonal(&self, n_max: u64) -> u32 {
        self.diagonal_for_tail(1e-4 * (n_max as f64).powf(-self.kappa))
    }

    fn regime(&self) -> Result<(Rational, Rational, std::cmp::Ordering), AllocError> {
        let (tau, h) = self.step.ok_or_else(|| {
            AllocError::RegimeMismatch(format!(
                "case {} has no step regime; only cases iii-vi do",
                self.decision.case_id
            ))
        })?;
        let d_over_tau = Rational::from_integer(i128::from(self.d)) / tau;
        Ok((tau, h, self.exact_mu.cmp(&d_over_tau)))
    }

    /// The fixed-plan strategy matching the regime: Step 4 for `μ < d/τ`,
    /// Step 3 for `μ > d/τ`.
    pub fn paper_strategy(&self) -> Result<Strategy, AllocError> {
        match self.regime()?.2 {
            std::cmp::Ordering::Less => Ok(Strategy::PaperStep4),
            std::cmp::Ordering::Greater => Ok(Strategy::PaperStep3),
            std::cmp::Ordering::Equal => Err(AllocError::RegimeMismatch("mu == d/tau".into())),
        }
    }
}

/// `Σ_{m>top} 2^{gm} Σ_{j+i=m} 2^{-jδ-iα}`.
fn geometric_tail(delta: f64, alpha: f64, g: f64, top: u32) -> f64 {
    let (lo, hi) = if delta < alpha { (delta, alpha) } else { (alpha, delta) };
    let q = (g - lo).exp2();
    if q >= 1.0 {
        return f64::INFINITY;
    }
    let start = f64::from(top) + 1.0;
    if hi == lo {
        // Σ_{m ≥ s} (m+1) q^m
        let s = start;
        return q.powf(s) * ((s + 1.0) * (1.0 - q) + q) / (1.0 - q).powi(2);
    }
    let r = (lo - hi).exp2();
    // Σ_{m ≥ s} q^m (1 - r^{m+1}) / (1 - r)
    let a = q.powf(start) / (1.0 - q);
    let b = r * (q * r).powf(start) / (1.0 - q * r);
    (a - b) / (1.0 - r)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Breakdown {
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
}

impl Breakdown {
    pub fn total(&self) -> f64 {
        self.delta1 + self.delta2 + self.delta3
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AllocationPlan {
    pub strategy: Strategy,
    /// `n' = 1 + Σ (n_{j,i} - 1)`, the index the bound applies to.
    pub n_total: u64,
    /// The budget index requested.
    pub n_requested: u64,
    #[serde(rename = "M1")]
    pub m1: Option<i64>,
    #[serde(rename = "M2")]
    pub m2: Option<i64>,
    pub epsilon: Option<f64>,
    pub z1: Option<f64>,
    pub z2: Option<f64>,
    pub max_diagonal: u32,
    #[serde(serialize_with = "budgets_as_list")]
    pub budgets: BTreeMap<(u32, u32), u64>,
    pub breakdown: Breakdown,
    pub bound: f64,
}

fn budgets_as_list<S: Serializer>(b: &BTreeMap<(u32, u32), u64>, s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry {
        j: u32,
        i: u32,
        n: u64,
    }
    s.collect_seq(b.iter().map(|(&(j, i), &n)| Entry { j, i, n }))
}

impl AllocationPlan {
    /// `Σ (n_{j,i} - 1)`.
    pub fn spent(&self) -> u64 {
        self.budgets.values().map(|&n| n - 1).sum()
    }
}

/// `[a]`: the largest integer strictly below `a`.
fn strict_floor_f64(a: f64) -> i64 {
    let f = a.floor();
    if f == a {
        f as i64 - 1
    } else {
        f as i64
    }
}

fn exact_log2(n: u64) -> Option<u32> {
    n.is_power_of_two().then(|| n.trailing_zeros())
}

/// `M1 = [log2 n / d - log2 log2 n / d]`, `M2 = [τ/h · log2 n / d]`.
pub fn step4_diagonals(n: u64, d: u32, tau_over_h: Rational) -> (i64, i64) {
    let dd = i128::from(d);
    match exact_log2(n) {
        Some(l) => {
            let lr = Rational::from_integer(i128::from(l));
            let m1 = match exact_log2(u64::from(l)) {
                Some(ll) => strict_floor(&((lr - Rational::from_integer(i128::from(ll))) / dd)) as i64,
                None => strict_floor_f64((f64::from(l) - f64::from(l).log2()) / f64::from(d)),
            };
            let m2 = strict_floor(&(tau_over_h * lr / dd)) as i64;
            (m1, m2)
        }
        None => {
            let l = (n as f64).log2();
            let m1 = strict_floor_f64((l - l.log2()) / f64::from(d));
            let m2 = strict_floor_f64(rational_to_f64(&tau_over_h) * l / f64::from(d));
            (m1, m2)
        }
    }
}

/// `(ε, z1, z2)` for the Step-4 zone split.
pub fn step4_exponents(model: &BlockModel, tau: f64, h: f64) -> Result<(f64, f64, f64), AllocError> {
    let d = f64::from(model.d);
    let (delta, alpha) = (model.delta, model.alpha);
    let (eps, z1, z2) = if model.exact_delta > model.exact_alpha {
        let z1 = (h / 2.0) * (d / tau - alpha);
        let z2 = z1 - h * ((delta - alpha) / 2.0).min(z1 / (2.0 * h));
        (z1 * tau / (h * d), z1, z2)
    } else {
        let z2 = (h / 2.0) * (d / tau - delta);
        let z1 = z2 - h * ((alpha - delta) / 2.0).min(z2 / (2.0 * h));
        (z2 * tau / (h * d), z1, z2)
    };
    let ok = if model.exact_delta > model.exact_alpha {
        alpha + z1 / h < d / tau && (z1 - z2) / h > 0.0 && (z1 - z2) / h < delta - alpha
    } else {
        delta + z2 / h < d / tau && (z2 - z1) / h > 0.0 && (z2 - z1) / h < alpha - delta
    };
    if !(ok && z1 > 0.0 && z2 > 0.0 && eps > 0.0 && eps < 1.0) {
        return Err(AllocError::InfeasibleConstraints(format!(
            "eps={eps}, z1={z1}, z2={z2} violate the Step-4 constraints"
        )));
    }
    Ok((eps, z1, z2))
}

fn to_count(x: f64) -> u64 {
    if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x as u64
    }
}

/// Three-zone plan for the regime `μ < d/τ`.
pub fn paper_allocation_step4(n: u64, model: &BlockModel) -> Result<AllocationPlan, AllocError> {
    if n < 4 {
        return Err(AllocError::InvalidBudget("Step 4 needs n >= 4".into()));
    }
    let (tau_r, h_r, ord) = model.regime()?;
    if ord != std::cmp::Ordering::Less {
        return Err(AllocError::RegimeMismatch(format!(
            "Step 4 needs mu < d/tau; mu = {}, d/tau = {}",
            model.mu,
            f64::from(model.d) / rational_to_f64(&tau_r)
        )));
    }
    if model.exact_delta == model.exact_alpha {
        return Err(AllocError::RegimeMismatch("delta == alpha".into()));
    }
    let (tau, h) = (rational_to_f64(&tau_r), rational_to_f64(&h_r));
    let (m1, m2) = step4_diagonals(n, model.d, tau_r / h_r);
    if m1 < 0 || m2 <= m1 {
        return Err(AllocError::InfeasibleConstraints(format!("M1 = {m1}, M2 = {m2}")));
    }
    if m2 as u64 * u64::from(model.d) > u64::from(MAX_BITS) {
        return Err(AllocError::InvalidBudget(format!("M2 = {m2} exceeds the f64 range")));
    }
    let (eps, z1, z2) = step4_exponents(model, tau, h)?;
    let (m1, m2) = (m1 as u32, m2 as u32);
    let base = (1.0 - eps) * (n as f64).log2();
    let mut budgets = BTreeMap::new();
    let mut delta2 = 0.0;
    for m in 0..=m2 {
        let cells = model.cells_on(m);
        for j in 0..=m {
            let i = m - j;
            let nji = if m <= m1 {
                cells + 1.0
            } else {
                let raw = (base + f64::from(i) * z1 + f64::from(j) * z2).exp2();
                strict_floor_f64(raw).max(1) as f64
            }
            .min(cells + 1.0);
            if m > m1 {
                delta2 += model.cell_value(j, i, nji);
            }
            budgets.insert((j, i), to_count(nji));
        }
    }
    let delta3 = model.tail(m2);
    let breakdown = Breakdown { delta1: 0.0, delta2, delta3 };
    let spent: u64 = budgets.values().map(|&b| b - 1).sum();
    Ok(AllocationPlan {
        strategy: Strategy::PaperStep4,
        n_total: spent + 1,
        n_requested: n,
        m1: Some(i64::from(m1)),
        m2: Some(i64::from(m2)),
        epsilon: Some(eps),
        z1: Some(z1),
        z2: Some(z2),
        max_diagonal: m2,
        budgets,
        breakdown,
        bound: breakdown.total(),
    })
}

/// Split `budget` among weights `a_k` as `n_k = max(1, ⌊budget · a_k^σ / Σ a^σ⌋)`,
/// capped at full rank.
fn lagrange_split(budget: f64, weights: &[(u32, u32, f64, f64)], sigma: f64) -> Vec<f64> {
    let total: f64 = weights.iter().map(|w| w.2.powf(sigma)).sum();
    weights
        .iter()
        .map(|&(_, _, a, cap)| (budget * a.powf(sigma) / total).floor().max(1.0).min(cap))
        .collect()
}

/// `P`/`Q` plan for the regime `μ > d/τ` with `n = 2^{dM}` per half.
pub fn paper_step3(n: u64, model: &BlockModel, max_diagonal: Option<u32>) -> Result<AllocationPlan, AllocError> {
    if n < 1 {
        return Err(AllocError::InvalidBudget("n >= 1 required".into()));
    }
    let (tau_r, h_r, ord) = model.regime()?;
    if ord != std::cmp::Ordering::Greater {
        return Err(AllocError::RegimeMismatch(format!(
            "Step 3 needs mu > d/tau; mu = {}, d/tau = {}",
            model.mu,
            f64::from(model.d) / rational_to_f64(&tau_r)
        )));
    }
    let d = f64::from(model.d);
    let (tau, h) = (rational_to_f64(&tau_r), rational_to_f64(&h_r));
    let big_m = ((n as f64).log2() / d).floor() as u32;
    let unit = (d * f64::from(big_m)).exp2();
    let inv_gamma = 1.5 * model.mu / d - 1.0 / tau;
    let s = 1.0 / (inv_gamma + 1.0 / h);
    let top = max_diagonal.unwrap_or_else(|| model.auto_diagonal(n)).max(big_m);

    let mut p_cells = Vec::new();
    let mut q_cells = Vec::new();
    for m in 0..=top {
        let cells = model.cells_on(m);
        for j in 0..=m {
            let i = m - j;
            let sc = model.scale(j, i);
            if m <= big_m {
                p_cells.push((j, i, sc * (f64::from(m) * d * (1.0 / tau + inv_gamma)).exp2(), cells + 1.0));
            } else {
                q_cells.push((j, i, sc * (f64::from(m) * d / tau).exp2(), cells + 1.0));
            }
        }
    }
    let mut budgets = BTreeMap::new();
    let mut breakdown = Breakdown::default();
    let p_alloc = lagrange_split(unit, &p_cells, s / (s + 1.0));
    for (&(j, i, _, _), &nji) in p_cells.iter().zip(&p_alloc) {
        breakdown.delta1 += model.cell_value(j, i, nji);
        budgets.insert((j, i), to_count(nji));
    }
    if !q_cells.is_empty() {
        let q_alloc = lagrange_split(unit, &q_cells, h / (h + 1.0));
        for (&(j, i, _, _), &nji) in q_cells.iter().zip(&q_alloc) {
            breakdown.delta2 += model.cell_value(j, i, nji);
            budgets.insert((j, i), to_count(nji));
        }
    }
    breakdown.delta3 = model.tail(top);
    let spent: u64 = budgets.values().map(|&b| b - 1).sum();
    Ok(AllocationPlan {
        strategy: Strategy::PaperStep3,
        n_total: spent + 1,
        n_requested: n,
        m1: None,
        m2: Some(i64::from(big_m)),
        epsilon: None,
        z1: None,
        z2: None,
        max_diagonal: top,
        budgets,
        breakdown,
        bound: breakdown.total(),
    })
}

struct HullCell {
    j: u32,
    i: u32,
    /// Hull vertices `(n, value)`; the first is `(1, value(1))`.
    hull: Vec<(f64, f64)>,
}

#[derive(Clone, Copy)]
struct Segment {
    eff: f64,
    cell: u32,
    idx: u16,
    cost: f64,
}

/// Precomputed greedy state; reusable across budgets up to `n_cap`.
pub struct GreedySolver<'a> {
    model: &'a BlockModel,
    top: u32,
    n_cap: u64,
    cells: Vec<HullCell>,
    segments: Vec<Segment>,
}

fn lower_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b when it lies on or above the chord a-p
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

impl<'a> GreedySolver<'a> {
    /// Build hulls for every cell with `j + i ≤ top`, allowing budgets up to `n_cap`.
    pub fn new(model: &'a BlockModel, top: u32, n_cap: u64) -> Self {
        let cap = n_cap as f64;
        let negligible = 1e-6 * model.tail(top).max(1e-300) / (f64::from(top) + 1.0).powi(2);
        let cells: Vec<HullCell> = (0..=top)
            .into_par_iter()
            .flat_map_iter(|m| {
                let big_n = model.cells_on(m);
                let curve = model.clause.curve;
                (0..=m).map(move |j| {
                    let i = m - j;
                    let sc = model.scale(j, i);
                    let mut ns = vec![1.0];
                    if sc * curve.eval(big_n, 1.0) > negligible {
                        let limit = (big_n + 1.0).min(cap);
                        let mut t = 1u32;
                        loop {
                            let x = (f64::from(t) / 16.0).exp2().round();
                            if x > limit {
                                break;
                            }
                            ns.push(x);
                            t += 1;
                        }
                        let knee = curve.knee(big_n);
                        for x in [knee.floor(), knee.ceil(), big_n, big_n + 1.0] {
                            if x >= 1.0 && x <= limit {
                                ns.push(x);
                            }
                        }
                        ns.sort_by(f64::total_cmp);
                        ns.dedup();
                    }
                    let pts: Vec<(f64, f64)> = ns.iter().map(|&x| (x, sc * curve.eval(big_n, x))).collect();
                    HullCell { j, i, hull: lower_hull(&pts) }
                })
            })
            .collect();
        let mut segments = Vec::new();
        for (c, cell) in cells.iter().enumerate() {
            for (k, w) in cell.hull.windows(2).enumerate() {
                let gain = w[0].1 - w[1].1;
                if gain > 0.0 {
                    let cost = w[1].0 - w[0].0;
                    segments.push(Segment { eff: gain / cost, cell: c as u32, idx: k as u16, cost });
                }
            }
        }
        segments.par_sort_by(|a, b| {
            let (ca, cb) = (&cells[a.cell as usize], &cells[b.cell as usize]);
            b.eff
                .total_cmp(&a.eff)
                .then((ca.j + ca.i).cmp(&(cb.j + cb.i)))
                .then(ca.j.cmp(&cb.j))
                .then(a.idx.cmp(&b.idx))
        });
        GreedySolver { model, top, n_cap, cells, segments }
    }

    pub fn max_diagonal(&self) -> u32 {
        self.top
    }

    /// Allocate `n - 1` units and return the per-cell indices (sparse) and the bound.
    pub fn solve(&self, n: u64) -> Result<AllocationPlan, AllocError> {
        if n < 1 || n > self.n_cap {
            return Err(AllocError::InvalidBudget(format!("n = {n} outside 1..={}", self.n_cap)));
        }
        let mut remaining = (n - 1) as f64;
        let mut level = vec![0u16; self.cells.len()];
        let mut blocked = vec![false; self.cells.len()];
        let mut first_blocked: Option<usize> = None;
        for seg in &self.segments {
            let c = seg.cell as usize;
            if blocked[c] {
                continue;
            }
            if seg.cost <= remaining {
                remaining -= seg.cost;
                level[c] = seg.idx + 1;
            } else {
                blocked[c] = true;
                first_blocked.get_or_insert(c);
            }
            if remaining < 1.0 {
                break;
            }
        }
        let mut alloc: Vec<f64> = self
            .cells
            .iter()
            .zip(&level)
            .map(|(cell, &l)| cell.hull[l as usize].0)
            .collect();
        if let Some(c) = first_blocked {
            if remaining >= 1.0 {
                alloc[c] += remaining.floor();
            }
        }
        let mut budgets = BTreeMap::new();
        let mut breakdown = Breakdown::default();
        for (cell, &a) in self.cells.iter().zip(&alloc) {
            let v = self.model.cell_value(cell.j, cell.i, a);
            if a > 1.0 {
                budgets.insert((cell.j, cell.i), to_count(a));
            }
            breakdown.delta2 += v;
        }
        breakdown.delta3 = self.model.tail(self.top);
        let spent: u64 = budgets.values().map(|&b| b - 1).sum();
        Ok(AllocationPlan {
            strategy: Strategy::Greedy,
            n_total: spent + 1,
            n_requested: n,
            m1: None,
            m2: None,
            epsilon: None,
            z1: None,
            z2: None,
            max_diagonal: self.top,
            budgets,
            breakdown,
            bound: breakdown.total(),
        })
    }
}

/// Greedy plan for a single budget. `max_diagonal` defaults to the tail rule.
pub fn greedy_allocation(n: u64, model: &BlockModel, max_diagonal: Option<u32>) -> Result<AllocationPlan, AllocError> {
    let top = max_diagonal.unwrap_or_else(|| model.auto_diagonal(n));
    GreedySolver::new(model, top, n.max(1)).solve(n)
}

pub fn plan(n: u64, model: &BlockModel, strategy: Strategy, max_diagonal: Option<u32>) -> Result<AllocationPlan, AllocError> {
    match strategy {
        Strategy::PaperStep4 => paper_allocation_step4(n, model),
        Strategy::PaperStep3 => paper_step3(n, model, max_diagonal),
        Strategy::Greedy => greedy_allocation(n, model, max_diagonal),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SequenceKind {
    UpperBound,
    LowerBound,
}

impl SequenceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SequenceKind::UpperBound => "upper",
            SequenceKind::LowerBound => "lower",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WidthSequence {
    pub points: Vec<(u64, f64)>,
    pub kind: SequenceKind,
    pub strategy: Option<Strategy>,
}

impl WidthSequence {
    pub fn value_at(&self, n: u64) -> Option<f64> {
        self.points
            .binary_search_by_key(&n, |p| p.0)
            .ok()
            .map(|k| self.points[k].1)
    }

    pub fn strategy_label(&self) -> &'static str {
        match (self.kind, self.strategy) {
            (_, Some(s)) => s.as_str(),
            (SequenceKind::LowerBound, None) => "single-block",
            (SequenceKind::UpperBound, None) => "",
        }
    }
}

/// `n = round(2^{k + t/per_octave})` between `n_min` and `n_max`, deduplicated.
pub fn dyadic_grid(n_min: u64, n_max: u64, per_octave: u32) -> Vec<u64> {
    let per = per_octave.max(1);
    let lo = (n_min.max(1) as f64).log2();
    let hi = (n_max.max(1) as f64).log2();
    let steps = ((hi - lo) * f64::from(per)).round() as u64;
    let mut out: Vec<u64> = (0..=steps)
        .map(|s| (lo + s as f64 / f64::from(per)).exp2().round() as u64)
        .filter(|&n| n >= n_min && n <= n_max)
        .collect();
    out.dedup();
    out
}

/// Keep `n` strictly increasing and enforce a nonincreasing running minimum.
fn monotone_upper(mut pts: Vec<(u64, f64)>) -> Vec<(u64, f64)> {
    pts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup_by_key(|p| p.0);
    let mut best = f64::INFINITY;
    for p in &mut pts {
        best = best.min(p.1);
        p.1 = best;
    }
    pts
}

/// Upper bounds over `grid`. Greedy points sit at the requested `n`; fixed-plan
/// points sit at the index `n'` their plan actually spends.
pub fn upper_bound_sequence(model: &BlockModel, grid: &[u64], strategy: Strategy) -> Result<WidthSequence, AllocError> {
    let n_max = grid.iter().copied().max().unwrap_or(1);
    let pts: Vec<(u64, f64)> = match strategy {
        Strategy::Greedy => {
            let solver = GreedySolver::new(model, model.auto_diagonal(n_max), n_max);
            grid.par_iter()
                .map(|&n| solver.solve(n).map(|p| (n, p.bound)))
                .collect::<Result<_, _>>()?
        }
        Strategy::PaperStep3 => {
            let top = model.auto_diagonal(n_max);
            grid.par_iter()
                .map(|&n| paper_step3(n, model, Some(top)).map(|p| (p.n_total, p.bound)))
                .collect::<Result<_, _>>()?
        }
        Strategy::PaperStep4 => grid
            .par_iter()
            .map(|&n| paper_allocation_step4(n, model).map(|p| (p.n_total, p.bound)))
            .collect::<Result<_, _>>()?,
    };
    Ok(WidthSequence {
        points: monotone_upper(pts),
        kind: SequenceKind::UpperBound,
        strategy: Some(strategy),
    })
}

/// One single-block lower bound: block `(j, i)` sampled at index `sample`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlockSample {
    pub j: u32,
    pub i: u32,
    pub sample: f64,
    pub value: f64,
}

/// Samples from blocks `(j, 0)` and `(0, i)` at `⌊N/4⌋` and `[N^{2a}]`,
/// each kept only inside the clause's declared range.
pub fn lower_bound_samples(model: &BlockModel, n_max: u64) -> Vec<BlockSample> {
    let d = model.d;
    let declared = model.clause.declared_fraction;
    let mut out = Vec::new();
    let limit = MAX_BITS / d.max(1);
    for m in 1..=limit {
        let big_n = model.cells_on(m);
        let mut samples = Vec::new();
        if d * m >= 2 {
            samples.push((big_n / 4.0).floor());
        }
        if let Some(a) = model.knee_a {
            let e = Rational::from_integer(2 * i128::from(d * m)) * a;
            let knee = if e.is_integer() {
                (rational_to_f64(&e)).exp2() - 1.0
            } else {
                rational_to_f64(&e).exp2().floor()
            };
            samples.push(knee);
        }
        let mut done = true;
        for s in samples {
            if s < 1.0 || s > declared * big_n {
                continue;
            }
            if s <= n_max as f64 * 2.0 {
                done = false;
            }
            for (j, i) in [(m, 0), (0, m)] {
                out.push(BlockSample { j, i, sample: s, value: model.cell_value(j, i, s) });
            }
        }
        if done && big_n / 4.0 > n_max as f64 * 2.0 {
            break;
        }
    }
    out
}

/// `lower(n) = max { value_b : sample_b ≥ n }`.
pub fn lower_bound_sequence(model: &BlockModel, grid: &[u64]) -> Result<WidthSequence, AllocError> {
    let n_max = grid.iter().copied().max().unwrap_or(1);
    let samples = lower_bound_samples(model, n_max);
    let points = grid
        .iter()
        .filter_map(|&n| {
            samples
                .iter()
                .filter(|b| b.sample >= n as f64 && b.value > 0.0)
                .map(|b| b.value)
                .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
                .map(|v| (n, v))
        })
        .collect();
    Ok(WidthSequence { points, kind: SequenceKind::LowerBound, strategy: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdealNormParams {
    pub r: f64,
    pub rho: f64,
}

impl IdealNormParams {
    pub fn new(r: f64, rho: f64) -> Result<Self, String> {
        if !(r > 0.0) {
            return Err(format!("r = {r} must be positive"));
        }
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(format!("rho = {rho} must lie in (0, 1]"));
        }
        Ok(IdealNormParams { r, rho })
    }
}

/// `max_n n^{1/r} · value(n)`.
pub fn ideal_norm(seq: &WidthSequence, r: f64) -> f64 {
    seq.points
        .iter()
        .map(|&(n, v)| (n as f64).powf(1.0 / r) * v)
        .fold(f64::NEG_INFINITY, f64::max)
}
