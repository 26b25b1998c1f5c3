//! Exact certification of extended formulations against brute-force matroid
//! oracles, a greedy cross-check, and the rectangle cover of the slack
//! matrix.
//!
//! A certificate has three parts: every independent set's characteristic
//! vector lifts to a feasible point, no point exceeds `r(S)` on `x(S)` for any
//! `S`, and no coordinate goes negative. The independence polytope is exactly
//! `{x >= 0 : x(S) <= r(S) for all S}`, so the three together prove that the
//! projection equals it.

mod rectangles;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::extform::{Direction, EfError, ExtendedFormulation, LpOutcome, PreparedLp};
use crate::matroid::{BinaryMatroid, ElementSet, MatroidError};
use crate::par::Execution;
use crate::rational::Rational;

pub use rectangles::{
    rectangle_cover, validity_of_exchange_claim, ExchangeReport, IndependenceFamily, Rectangle, RectangleKind,
    RectangleReport, DEFAULT_RECTANGLE_CAP,
};

pub const DEFAULT_CERTIFY_CAP: usize = 12;
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("projected labels differ from the ground set (missing: {missing:?}, extra: {extra:?})")]
    LabelMismatch { missing: Vec<String>, extra: Vec<String> },
    #[error("ground set has {size} elements, above the cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Ef(#[from] EfError),
}

/// Optimum as reported: an exact value, or `infeasible` / `unbounded`.
fn outcome_text(o: &LpOutcome) -> String {
    match o {
        LpOutcome::Optimal(v) => v.to_string(),
        LpOutcome::Infeasible => "infeasible".into(),
        LpOutcome::Unbounded => "unbounded".into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexCheck {
    pub set: Vec<String>,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankCheck {
    pub subset: Vec<String>,
    pub lp_max: String,
    pub rank: usize,
    pub pass: bool,
    pub tight: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonnegCheck {
    pub element: String,
    pub lp_min: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub vertex_checks: usize,
    pub vertex_failures: usize,
    pub rank_checks: usize,
    pub rank_failures: usize,
    pub rank_tight: usize,
    pub nonneg_checks: usize,
    pub nonneg_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timings {
    pub prepare_ms: f64,
    pub vertex_ms: f64,
    pub rank_ms: f64,
    pub nonneg_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub schema_version: u32,
    pub elements: Vec<String>,
    pub pass: bool,
    pub counts: Counts,
    pub vertex_checks: Vec<VertexCheck>,
    pub rank_checks: Vec<RankCheck>,
    pub nonneg_checks: Vec<NonnegCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    pub cap: usize,
    pub exec: Execution,
    pub timings: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { cap: DEFAULT_CERTIFY_CAP, exec: Execution::default(), timings: false }
    }
}

/// Projected variable index of every ground-set element, in element order.
fn projection_indices(ef: &ExtendedFormulation, m: &BinaryMatroid) -> Result<Vec<usize>, VerifyError> {
    let mut ef_labels: Vec<&str> = ef.projected_labels();
    ef_labels.sort_unstable();
    let mut m_labels: Vec<&str> = m.labels().iter().map(String::as_str).collect();
    m_labels.sort_unstable();
    if ef_labels != m_labels {
        let missing = m_labels.iter().filter(|l| ef_labels.binary_search(l).is_err()).map(|l| l.to_string()).collect();
        let extra = ef_labels.iter().filter(|l| m_labels.binary_search(l).is_err()).map(|l| l.to_string()).collect();
        return Err(VerifyError::LabelMismatch { missing, extra });
    }
    Ok(m.labels().iter().map(|l| ef.projected_index(l).expect("checked above")).collect())
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

pub fn certify_equality(ef: &ExtendedFormulation, m: &BinaryMatroid) -> Result<CertificationReport, VerifyError> {
    certify_equality_with(ef, m, CertifyOptions::default())
}

pub fn certify_equality_with(
    ef: &ExtendedFormulation,
    m: &BinaryMatroid,
    opts: CertifyOptions,
) -> Result<CertificationReport, VerifyError> {
    let n = m.len();
    if n > opts.cap.min(63) {
        return Err(VerifyError::CapExceeded { size: n, cap: opts.cap.min(63) });
    }
    let idx = projection_indices(ef, m)?;
    let t = Instant::now();
    let lp: PreparedLp = ef.prepare();
    let prepare_ms = ms(t);

    let t = Instant::now();
    let independent = m.enumerate_independent_sets(n)?;
    let vertex_checks: Vec<VertexCheck> = opts.exec.map(&independent, |&s| {
        let fixes: Vec<(usize, Rational)> =
            (0..n).map(|e| (idx[e], if s.contains(e) { Rational::one() } else { Rational::zero() })).collect();
        VertexCheck { set: m.set_labels(s).into_iter().map(String::from).collect(), feasible: lp.feasible_with(&fixes) }
    });
    let vertex_ms = ms(t);

    let t = Instant::now();
    let subsets: Vec<ElementSet> = (0..1u64 << n).map(ElementSet).collect();
    let rank_checks: Vec<RankCheck> = opts.exec.map(&subsets, |&s| {
        let obj: Vec<(usize, Rational)> = s.iter().map(|e| (idx[e], Rational::one())).collect();
        let out = lp.optimize(&obj, Direction::Maximize);
        let rank = m.rank_of_set(s);
        let r = Rational::from(rank);
        let (pass, tight) = match &out {
            LpOutcome::Optimal(v) => (*v <= r, *v == r),
            LpOutcome::Infeasible => (true, false),
            LpOutcome::Unbounded => (false, false),
        };
        RankCheck { subset: m.set_labels(s).into_iter().map(String::from).collect(), lp_max: outcome_text(&out), rank, pass, tight }
    });
    let rank_ms = ms(t);

    let t = Instant::now();
    let elements: Vec<usize> = (0..n).collect();
    let nonneg_checks: Vec<NonnegCheck> = opts.exec.map(&elements, |&e| {
        let out = lp.optimize(&[(idx[e], Rational::one())], Direction::Minimize);
        let pass = match &out {
            LpOutcome::Optimal(v) => !v.is_negative(),
            LpOutcome::Infeasible => true,
            LpOutcome::Unbounded => false,
        };
        NonnegCheck { element: m.label(e).to_string(), lp_min: outcome_text(&out), pass }
    });
    let nonneg_ms = ms(t);

    let counts = Counts {
        vertex_checks: vertex_checks.len(),
        vertex_failures: vertex_checks.iter().filter(|c| !c.feasible).count(),
        rank_checks: rank_checks.len(),
        rank_failures: rank_checks.iter().filter(|c| !c.pass).count(),
        rank_tight: rank_checks.iter().filter(|c| c.tight).count(),
        nonneg_checks: nonneg_checks.len(),
        nonneg_failures: nonneg_checks.iter().filter(|c| !c.pass).count(),
    };
    let pass = counts.vertex_failures == 0 && counts.rank_failures == 0 && counts.nonneg_failures == 0;
    let timings = opts.timings.then_some(Timings { prepare_ms, vertex_ms, rank_ms, nonneg_ms });
    Ok(CertificationReport {
        schema_version: SCHEMA_VERSION,
        elements: m.labels().to_vec(),
        pass,
        counts,
        vertex_checks,
        rank_checks,
        nonneg_checks,
        timings,
    })
}

fn braces(set: &[String]) -> String {
    format!("{{{}}}", set.join(","))
}

impl CertificationReport {
    /// Human-readable summary: one line per check family, then every
    /// failing check.
    pub fn to_text(&self) -> String {
        let c = &self.counts;
        let mut s = format!("certification: {}\n", if self.pass { "PASS" } else { "FAIL" });
        s += &format!("elements: {}\n", self.elements.len());
        s += &format!("vertex checks: {}/{} feasible\n", c.vertex_checks - c.vertex_failures, c.vertex_checks);
        s += &format!(
            "rank checks: {}/{} within rank ({} tight)\n",
            c.rank_checks - c.rank_failures,
            c.rank_checks,
            c.rank_tight
        );
        s += &format!("nonnegativity checks: {}/{}\n", c.nonneg_checks - c.nonneg_failures, c.nonneg_checks);
        for v in self.vertex_checks.iter().filter(|v| !v.feasible) {
            s += &format!("  infeasible vertex {}\n", braces(&v.set));
        }
        for r in self.rank_checks.iter().filter(|r| !r.pass) {
            s += &format!("  rank violated on {}: lp max {} > r = {}\n", braces(&r.subset), r.lp_max, r.rank);
        }
        for x in self.nonneg_checks.iter().filter(|x| !x.pass) {
            s += &format!("  negative coordinate {}: lp min {}\n", x.element, x.lp_min);
        }
        if let Some(t) = &self.timings {
            s += &format!(
                "timings (ms): prepare {:.1}, vertex {:.1}, rank {:.1}, nonneg {:.1}\n",
                t.prepare_ms, t.vertex_ms, t.rank_ms, t.nonneg_ms
            );
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreedyMismatch {
    pub weights: Vec<i64>,
    pub lp: String,
    pub greedy: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreedyReport {
    pub schema_version: u32,
    pub seed: u64,
    pub trials: usize,
    pub weight_range: (i64, i64),
    pub agreements: usize,
    pub mismatches: Vec<GreedyMismatch>,
    pub pass: bool,
}

impl GreedyReport {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "greedy cross-check: {} ({}/{} agree, seed {}, weights in [{}, {}])\n",
            if self.pass { "PASS" } else { "FAIL" },
            self.agreements,
            self.trials,
            self.seed,
            self.weight_range.0,
            self.weight_range.1
        );
        for m in &self.mismatches {
            s += &format!("  weights {:?}: lp {} vs greedy {}\n", m.weights, m.lp, m.greedy);
        }
        s
    }
}

/// Compares `max c.x` over the formulation with the greedy optimum on
/// `trials` seeded integer objectives drawn uniformly from `weight_range`.
pub fn greedy_cross_check(
    ef: &ExtendedFormulation,
    m: &BinaryMatroid,
    trials: usize,
    seed: u64,
    weight_range: (i64, i64),
    exec: Execution,
) -> Result<GreedyReport, VerifyError> {
    let idx = projection_indices(ef, m)?;
    let lp = ef.prepare();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objectives: Vec<Vec<i64>> =
        (0..trials).map(|_| (0..m.len()).map(|_| rng.gen_range(weight_range.0..=weight_range.1)).collect()).collect();
    let results: Vec<Option<GreedyMismatch>> = exec.map(&objectives, |w| {
        let weights: Vec<Rational> = w.iter().map(|&x| Rational::from_integer(x)).collect();
        let obj: Vec<(usize, Rational)> = idx.iter().copied().zip(weights.iter().cloned()).collect();
        let got = lp.optimize(&obj, Direction::Maximize);
        let (_, greedy) = m.greedy_max(&weights);
        (got != LpOutcome::Optimal(greedy.clone())).then(|| GreedyMismatch {
            weights: w.clone(),
            lp: outcome_text(&got),
            greedy: greedy.to_string(),
        })
    });
    let mismatches: Vec<GreedyMismatch> = results.into_iter().flatten().collect();
    Ok(GreedyReport {
        schema_version: SCHEMA_VERSION,
        seed,
        trials,
        weight_range,
        agreements: trials - mismatches.len(),
        pass: mismatches.is_empty(),
        mismatches,
    })
}
