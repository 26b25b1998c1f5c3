//! Rectangle cover of the non-incidence pairs of the independence polytope.
//!
//! A pair `(S, I)` of a nonempty set and an independent set is non-incident
//! when `|I ∩ S| <= r(S) - 1`, i.e. `χ(I)` is not on the face `x(S) = r(S)`.
//! Every such pair admits a single-element witness (`e ∈ S \ I` with
//! `I + e` independent) or an exchange witness (`e ∈ S \ I`, `f ∈ I \ S` with
//! `I - f + e` independent), which yields `|E|^2` rectangles covering all of
//! them.

use serde::Serialize;

use crate::matroid::{BinaryMatroid, ElementSet, MatroidError};

pub const DEFAULT_RECTANGLE_CAP: usize = 8;

/// An arbitrary family of subsets of `{0..n}`, tested by membership. The
/// rank of `S` is the size of a largest member inside `S`.
#[derive(Debug, Clone)]
pub struct IndependenceFamily {
    labels: Vec<String>,
    member: Vec<bool>,
    rank: Vec<usize>,
}

impl IndependenceFamily {
    pub fn new(labels: Vec<String>, members: &[ElementSet]) -> Self {
        let n = labels.len();
        assert!(n <= 20, "families are tabulated over all 2^n subsets");
        let mut member = vec![false; 1 << n];
        for s in members {
            member[s.0 as usize] = true;
        }
        // rank(S) = max(|S| if S is a member, max over S - e).
        let mut rank = vec![0usize; 1 << n];
        for mask in 0..1usize << n {
            let own = if member[mask] { mask.count_ones() as usize } else { 0 };
            let sub = (0..n).filter(|&e| mask >> e & 1 == 1).map(|e| rank[mask & !(1 << e)]).max().unwrap_or(0);
            rank[mask] = own.max(sub);
        }
        Self { labels, member, rank }
    }

    pub fn from_matroid(m: &BinaryMatroid, cap: usize) -> Result<Self, MatroidError> {
        if m.len() > cap {
            return Err(MatroidError::CapExceeded { size: m.len(), cap });
        }
        Ok(Self::new(m.labels().to_vec(), &m.enumerate_independent_sets(cap)?))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, s: ElementSet) -> bool {
        self.member[s.0 as usize]
    }

    pub fn rank(&self, s: ElementSet) -> usize {
        self.rank[s.0 as usize]
    }

    pub fn members(&self) -> Vec<ElementSet> {
        (0..self.member.len() as u64).map(ElementSet).filter(|&s| self.contains(s)).collect()
    }

    fn non_incident(&self, s: ElementSet, i: ElementSet) -> bool {
        i.intersection(s).len() + 1 <= self.rank(s)
    }

    fn set_labels(&self, s: ElementSet) -> Vec<String> {
        s.iter().map(|e| self.labels[e].clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RectangleKind {
    /// `{S : e ∈ S} x {I : e ∉ I, I + e independent}`.
    Single { e: usize },
    /// `{S : e ∈ S, f ∉ S} x {I : e ∉ I, f ∈ I, I - f + e independent}`.
    Pair { e: usize, f: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rectangle {
    pub kind: RectangleKind,
    pub rows: usize,
    pub cols: usize,
    #[serde(skip)]
    pub sets: Vec<ElementSet>,
    #[serde(skip)]
    pub independents: Vec<ElementSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RectangleReport {
    pub elements: usize,
    pub rectangles: usize,
    pub nonempty_rectangles: usize,
    pub bound: usize,
    pub non_incident_pairs: usize,
    pub covered_pairs: usize,
    pub invalid_pairs: usize,
    pub valid: bool,
    pub complete: bool,
    pub within_bound: bool,
    pub pass: bool,
}

impl RectangleReport {
    pub fn coverage_percent(&self) -> f64 {
        if self.non_incident_pairs == 0 {
            100.0
        } else {
            100.0 * self.covered_pairs as f64 / self.non_incident_pairs as f64
        }
    }

    pub fn to_text(&self) -> String {
        format!(
            "rectangle cover: {}\nelements: {}\nrectangles: {} ({} nonempty), bound |E|^2 = {}\nnon-incident pairs: {}\ncoverage {}%\ninvalid pairs: {}\n",
            if self.pass { "PASS" } else { "FAIL" },
            self.elements,
            self.rectangles,
            self.nonempty_rectangles,
            self.bound,
            self.non_incident_pairs,
            format_percent(self.coverage_percent()),
            self.invalid_pairs,
        )
    }
}

fn format_percent(p: f64) -> String {
    if p == 100.0 {
        "100".into()
    } else {
        format!("{p:.2}")
    }
}

/// Builds the `|E|` single and `|E|(|E|-1)` pair rectangles with their
/// enumerated members, then checks validity, coverage of every
/// non-incident pair, and the count bound.
pub fn rectangle_cover(fam: &IndependenceFamily) -> (Vec<Rectangle>, RectangleReport) {
    let n = fam.len();
    let all: Vec<ElementSet> = (0..1u64 << n).map(ElementSet).collect();
    let members = fam.members();
    let mut rects = Vec::with_capacity(n * n);
    for e in 0..n {
        let sets: Vec<ElementSet> = all.iter().copied().filter(|s| s.contains(e)).collect();
        let independents: Vec<ElementSet> =
            members.iter().copied().filter(|i| !i.contains(e) && fam.contains(i.insert(e))).collect();
        rects.push(Rectangle { kind: RectangleKind::Single { e }, rows: sets.len(), cols: independents.len(), sets, independents });
    }
    for e in 0..n {
        for f in (0..n).filter(|&f| f != e) {
            let sets: Vec<ElementSet> = all.iter().copied().filter(|s| s.contains(e) && !s.contains(f)).collect();
            let independents: Vec<ElementSet> = members
                .iter()
                .copied()
                .filter(|i| !i.contains(e) && i.contains(f) && fam.contains(i.remove(f).insert(e)))
                .collect();
            rects.push(Rectangle { kind: RectangleKind::Pair { e, f }, rows: sets.len(), cols: independents.len(), sets, independents });
        }
    }

    // Index members so (S, I) pairs can be marked in a flat table.
    let mut member_pos = vec![usize::MAX; 1 << n];
    for (k, i) in members.iter().enumerate() {
        member_pos[i.0 as usize] = k;
    }
    let mut covered = vec![false; all.len() * members.len()];
    let mut invalid = 0;
    for r in &rects {
        for &s in &r.sets {
            for &i in &r.independents {
                if !fam.non_incident(s, i) {
                    invalid += 1;
                }
                covered[s.0 as usize * members.len() + member_pos[i.0 as usize]] = true;
            }
        }
    }
    let mut non_incident = 0;
    let mut hit = 0;
    for &s in all.iter().filter(|s| !s.is_empty()) {
        for (k, &i) in members.iter().enumerate() {
            if fam.non_incident(s, i) {
                non_incident += 1;
                if covered[s.0 as usize * members.len() + k] {
                    hit += 1;
                }
            }
        }
    }
    let bound = n * n;
    let report = RectangleReport {
        elements: n,
        rectangles: rects.len(),
        nonempty_rectangles: rects.iter().filter(|r| r.rows > 0 && r.cols > 0).count(),
        bound,
        non_incident_pairs: non_incident,
        covered_pairs: hit,
        invalid_pairs: invalid,
        valid: invalid == 0,
        complete: hit == non_incident,
        within_bound: rects.len() <= bound,
        pass: invalid == 0 && hit == non_incident && rects.len() <= bound,
    };
    (rects, report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExchangeReport {
    pub holds: bool,
    pub pairs_checked: usize,
    pub counterexample: Option<(Vec<String>, Vec<String>)>,
}

/// Checks, for every `S` and every member `I`, that `(S, I)` is non-incident
/// exactly when a single-element or exchange witness exists.
pub fn validity_of_exchange_claim(fam: &IndependenceFamily) -> ExchangeReport {
    let n = fam.len();
    let members = fam.members();
    let mut checked = 0;
    for s in (0..1u64 << n).map(ElementSet) {
        for &i in &members {
            checked += 1;
            let out: Vec<usize> = s.difference(i).iter().collect();
            let inside: Vec<usize> = i.difference(s).iter().collect();
            let witness = out.iter().any(|&e| fam.contains(i.insert(e)))
                || out.iter().any(|&e| inside.iter().any(|&f| fam.contains(i.remove(f).insert(e))));
            if witness != fam.non_incident(s, i) {
                return ExchangeReport {
                    holds: false,
                    pairs_checked: checked,
                    counterexample: Some((fam.set_labels(s), fam.set_labels(i))),
                };
            }
        }
    }
    ExchangeReport { holds: true, pairs_checked: checked, counterexample: None }
}
