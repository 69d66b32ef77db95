//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::Command;
use std::time::{Duration, Instant};

use nwidths::allocator::{paper_allocation_step4, step4_diagonals, BlockModel, Strategy};
use nwidths::exponents::{ClassifierVariant, WidthKind};
use nwidths::finwidths::{coordinate_oracle, ModelVariant};
use nwidths::params::{EmbeddingParams, ExtReal, Rational};
use nwidths::verify::{self, SlopeCheck, TAIL_CONSTANT};
use serde_json::Value;

fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

fn ext(s: &str) -> ExtReal {
    s.parse().unwrap()
}

/// `(p1, p2, d, alpha, delta)` with `s2 = 0`.
type Set = (&'static str, &'static str, u32, (i128, i128), (i128, i128));

fn params(s: &Set) -> EmbeddingParams {
    EmbeddingParams::with_delta(ext(s.0), ext(s.1), s.2, r(s.3 .0, s.3 .1), r(s.4 .0, s.4 .1))
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn report(k: u32, name: &str, elapsed: Duration, limit: Option<Duration>, mut o: Outcome) -> bool {
    if let Some(limit) = limit {
        if elapsed > limit {
            o.passed = false;
            o.detail.push_str(&format!("; exceeded {limit:?}"));
        }
    }
    println!(
        "criterion {k} [{name}]: {} ({:.2?}) {}",
        if o.passed { "PASS" } else { "FAIL" },
        elapsed,
        o.detail
    );
    o.passed
}

/// Hand-computed cases and exponents, two per case of each table.
const KOLMOGOROV: [(Set, &str, &str); 12] = [
    (("1", "2", 1, (1, 1), (3, 1)), "i", "1"),
    (("3", "3", 2, (1, 2), (2, 1)), "i", "1/4"),
    (("4", "2", 1, (1, 1), (3, 1)), "ii", "3/4"),
    (("inf", "2", 1, (1, 1), (2, 1)), "ii", "1/2"),
    (("1", "4", 1, (2, 1), (9, 4)), "iii", "9/4"),
    (("3/2", "6", 2, (1, 1), (3, 4)), "iii", "17/24"),
    (("1", "4", 1, (1, 8), (3, 2)), "iv", "1/4"),
    (("4/3", "3", 3, (1, 2), (2, 1)), "iv", "1/4"),
    (("4", "8", 1, (2, 1), (20, 1)), "v", "17/8"),
    (("3", "6", 2, (1, 2), (1, 1)), "v", "5/12"),
    (("2", "4", 1, (1, 5), (5, 4)), "vi", "2/5"),
    (("3", "6", 1, (1, 24), (1, 1)), "vi", "1/8"),
];

const GELFAND: [(Set, &str, &str); 12] = [
    (("2", "inf", 1, (1, 1), (2, 1)), "i", "1"),
    (("4/3", "4/3", 3, (3, 4), (1, 1)), "i", "1/4"),
    (("4", "2", 1, (1, 1), (3, 1)), "ii", "3/4"),
    (("2", "4/3", 2, (1, 1), (3, 2)), "ii", "1/4"),
    (("4/3", "4", 1, (1, 1), (2, 1)), "iii", "5/4"),
    (("3/2", "inf", 2, (2, 1), (1, 1)), "iii", "2/3"),
    (("4/3", "4", 1, (1, 8), (1, 1)), "iv", "1/4"),
    (("3/2", "3", 2, (1, 2), (1, 1)), "iv", "3/8"),
    (("4/3", "2", 1, (1, 1), (2, 1)), "v", "5/4"),
    (("6/5", "3/2", 1, (1, 2), (1, 1)), "v", "2/3"),
    (("4/3", "2", 1, (1, 8), (1, 1)), "vi", "1/4"),
    (("6/5", "3/2", 1, (1, 24), (1, 1)), "vi", "1/8"),
];

fn criterion_1() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for (kind, table) in [("kolmogorov", &KOLMOGOROV), ("gelfand", &GELFAND)] {
        let path = dir.path().join(format!("{kind}.txt"));
        let lines: Vec<String> = table.iter().map(|(s, _, _)| params(s).to_string()).collect();
        std::fs::write(&path, lines.join("\n")).unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_nwidths"))
            .args(["classify", "--kind", kind, "--grid", path.to_str().unwrap()])
            .output()
            .unwrap();
        let rows: Value = serde_json::from_slice(&out.stdout).unwrap();
        for ((set, case, kappa), row) in table.iter().zip(rows.as_array().unwrap()) {
            checked += 1;
            let got = &row[kind];
            if got["case_id"] != *case || got["kappa"] != *kappa {
                mismatches.push(format!("{kind} {set:?}: expected {case} {kappa}, got {got}"));
            }
        }
    }
    Outcome {
        passed: checked == 24 && mismatches.is_empty(),
        detail: format!("{checked} sets, {} mismatches {mismatches:?}", mismatches.len()),
    }
}

fn criterion_2() -> Outcome {
    let grid = ["1", "4/3", "3/2", "2", "3", "4", "inf"].map(ext);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut failures = Vec::new();
    for &p1 in &grid {
        for &p2 in &grid {
            if !(p2 < p1) {
                continue;
            }
            let c = nwidths::params::rational_to_f64(&(p2.recip() - p1.recip()));
            for big_n in 1..=12u64 {
                for n in 1..=big_n {
                    let expected = ((big_n - n + 1) as f64).powf(c);
                    let got = coordinate_oracle(p1, p2, big_n, n).unwrap();
                    let rel = (got - expected).abs() / expected;
                    worst = worst.max(rel);
                    checked += 1;
                    if rel > 1e-12 {
                        failures.push(format!("p1={p1} p2={p2} N={big_n} n={n}: {got} vs {expected}"));
                    }
                }
            }
        }
    }
    Outcome {
        passed: failures.is_empty() && checked > 0,
        detail: format!("{checked} comparisons, max relative error {worst:.1e}, {} failures", failures.len()),
    }
}

/// One set per Kolmogorov case for the slope runs.
const SLOPE_SETS: [(&str, Set); 6] = [
    ("i", ("1", "2", 1, (1, 1), (3, 1))),
    ("ii", ("4", "2", 1, (1, 1), (3, 1))),
    ("iii", ("1", "8", 1, (2, 1), (40, 1))),
    ("iv", ("1", "5/2", 5, (3, 4), (20, 1))),
    ("v", ("4", "8", 1, (2, 1), (20, 1))),
    ("vi", ("9/4", "8/3", 5, (3, 4), (20, 1))),
];

fn slope_runs() -> Vec<(&'static str, SlopeCheck)> {
    SLOPE_SETS
        .iter()
        .map(|(case, set)| {
            let c = verify::slope_check(&params(set), WidthKind::Kolmogorov, verify::DEFAULT_WINDOW, Strategy::Greedy, 4)
                .unwrap();
            (*case, c)
        })
        .collect()
}

fn criterion_3(runs: &[(&str, SlopeCheck)]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (case, c) in runs {
        let case_ok = c.decision.case_id.as_str() == *case && c.passed;
        ok &= case_ok;
        parts.push(format!(
            "{case}: kappa={} up{:+.3} lo{:+.3}{}",
            nwidths::params::format_rational(&c.decision.kappa),
            c.upper.deviation().unwrap(),
            c.lower.deviation().unwrap(),
            if c.lower_le_upper { "" } else { " lower>upper" }
        ));
    }
    Outcome { passed: ok && runs.len() == 6, detail: parts.join("; ") }
}

fn criterion_4(runs: &[(&str, SlopeCheck)]) -> Outcome {
    let spreads: Vec<String> = runs.iter().map(|(case, c)| format!("{case}: {:.2}", c.octave_spread)).collect();
    Outcome {
        passed: runs.iter().all(|(_, c)| c.octave_spread <= 10.0),
        detail: format!("max/min octave sup of n^kappa*upper: {}", spreads.join(", ")),
    }
}

fn criterion_5() -> Outcome {
    let clean = verify::table_scan(ClassifierVariant::Faithful);
    let mutant = verify::table_scan(ClassifierVariant::InvertedTheta);
    let axioms = verify::axiom_suite(ModelVariant::Faithful);
    let axioms_mutant = verify::axiom_suite(ModelVariant::InvertedTheta);
    let passed = clean.cells_tested >= 10_000
        && clean.is_clean()
        && !mutant.violations.is_empty()
        && axioms.is_clean()
        && !axioms_mutant.violations.is_empty();
    Outcome {
        passed,
        detail: format!(
            "{} cells, {} violations, declared {:?}; mutant flags {}; axiom suite {} cells, {} violations, mutant flags {}",
            clean.cells_tested,
            clean.violations.len(),
            clean.declared,
            mutant.violations.len(),
            axioms.cells_tested,
            axioms.violations.len(),
            axioms_mutant.violations.len()
        ),
    }
}

const STEP4_SET: Set = ("1", "4", 1, (1, 8), (3, 2));

fn criterion_6(runs: &[(&str, SlopeCheck)]) -> (Outcome, String) {
    let n = 1u64 << 12;
    let model = BlockModel::new(&params(&STEP4_SET), WidthKind::Kolmogorov).unwrap();
    let (tau, h) = model.step_constants().unwrap();
    let diagonals = step4_diagonals(n, 1, tau / h);
    let plan = paper_allocation_step4(n, &model).unwrap();
    let m1 = plan.m1.unwrap() as u32;
    let delta1: f64 = plan
        .budgets
        .iter()
        .filter(|(&(j, i), _)| j + i <= m1)
        .map(|(&(j, i), &b)| model.cell_value(j, i, b as f64))
        .sum();
    let eps = plan.epsilon.unwrap();
    let conserved = plan.spent() == plan.n_total - 1
        && plan.budgets.iter().all(|(&(j, i), &b)| b >= 1 && b as f64 <= model.cells_on(j + i) + 1.0);
    let tails: Vec<(&str, f64)> = runs.iter().map(|(case, c)| (*case, c.tail_constant)).collect();
    let tails_ok = tails.iter().all(|t| t.1 <= TAIL_CONSTANT);
    let passed = tau / h == r(2, 1)
        && diagonals == (8, 23)
        && plan.m1 == Some(8)
        && plan.m2 == Some(23)
        && plan.breakdown.delta1 == 0.0
        && delta1 == 0.0
        && eps > 0.0
        && eps < 1.0
        && conserved
        && tails_ok;
    let detail = format!(
        "M1={} M2={} delta1={} eps={eps} spent={} n'={}; max_M<=40 delta3/2^(-M mu) on slope sets: {}",
        plan.m1.unwrap(),
        plan.m2.unwrap(),
        plan.breakdown.delta1,
        plan.spent(),
        plan.n_total,
        tails.iter().map(|(c, t)| format!("{c} {t:.3}")).collect::<Vec<_>>().join(", ")
    );
    let step4_tail = plan.breakdown.delta3 / (-(23.0) * model.mu).exp2();
    let note = format!(
        "note 6: Step-4 set (p1=1,p2=4,d=1,alpha=1/8,delta=3/2) has delta3(M2)/2^(-M2 mu) = {step4_tail:.2}, \
         max over M<=40 = {:.2}; tau/h = 2 forces mu < 1/4 there, so the ratio exceeds 1/(2^(1/4)-1) > 5",
        verify::tail_constant(&model, 40)
    );
    (Outcome { passed, detail }, note)
}

fn main() {
    let mut all = true;

    let t = Instant::now();
    let o = criterion_1();
    all &= report(1, "exponent tables", t.elapsed(), Some(Duration::from_secs(1)), o);

    let t = Instant::now();
    let o = criterion_2();
    all &= report(2, "oracle equivalence", t.elapsed(), Some(Duration::from_secs(30)), o);

    let t = Instant::now();
    let runs = slope_runs();
    let slope_time = t.elapsed();
    all &= report(3, "slope reproduction", slope_time, Some(Duration::from_secs(300)), criterion_3(&runs));
    all &= report(4, "ideal-norm boundedness", slope_time, None, criterion_4(&runs));

    let t = Instant::now();
    let o = criterion_5();
    all &= report(5, "table scan", t.elapsed(), Some(Duration::from_secs(120)), o);

    let t = Instant::now();
    let (o, note) = criterion_6(&runs);
    all &= report(6, "step-4 plan", t.elapsed(), None, o);
    println!("{note}");

    if !all {
        std::process::exit(1);
    }
}
