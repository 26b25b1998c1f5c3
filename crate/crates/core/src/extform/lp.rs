//! Exact rational simplex over extended formulations.
//!
//! Every formulation variable is free; each inequality gets a nonnegative
//! slack. Free variables are eliminated by Gauss-Jordan pivots (their defining
//! rows are kept aside), which leaves a standard-form system over slacks
//! alone. A phase-1 feasible basis of that system is computed once, after which
//! each objective is a phase-2 run from a copy of the basis, and each point
//! check is a warm-started phase 1 on a handful of appended rows. Pivoting
//! follows Bland's rule throughout.

use serde::Serialize;

use super::{ExtendedFormulation, Sense};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum LpOutcome {
    Optimal(Rational),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal(v) => Some(v),
            _ => None,
        }
    }
}

type SparseRow = Vec<(usize, Rational)>;

/// `coeffs . x = rhs` with sorted, nonzero coefficients.
#[derive(Debug, Clone)]
struct Row {
    coeffs: SparseRow,
    rhs: Rational,
}

impl Row {
    fn get(&self, col: usize) -> Option<&Rational> {
        self.coeffs.binary_search_by_key(&col, |(c, _)| *c).ok().map(|i| &self.coeffs[i].1)
    }

    fn scale(&mut self, factor: &Rational) {
        for (_, v) in self.coeffs.iter_mut() {
            *v *= factor;
        }
        self.rhs *= factor;
    }

    /// `self += factor * other`.
    fn axpy(&mut self, factor: &Rational, other: &Row) {
        let mut merged = Vec::with_capacity(self.coeffs.len() + other.coeffs.len());
        let (mut i, mut j) = (0, 0);
        let a = std::mem::take(&mut self.coeffs);
        while i < a.len() || j < other.coeffs.len() {
            let take_a = j == other.coeffs.len() || (i < a.len() && a[i].0 < other.coeffs[j].0);
            let take_b = i == a.len() || (j < other.coeffs.len() && other.coeffs[j].0 < a[i].0);
            if take_a {
                merged.push(a[i].clone());
                i += 1;
            } else if take_b {
                merged.push((other.coeffs[j].0, factor * &other.coeffs[j].1));
                j += 1;
            } else {
                let mut v = a[i].1.clone();
                v.add_mul(factor, &other.coeffs[j].1);
                if !v.is_zero() {
                    merged.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        self.coeffs = merged;
        self.rhs.add_mul(factor, &other.rhs);
    }
}

/// Dense simplex tableau in canonical form: `rows[i][basis[i]] = 1` and every
/// basic column is a unit vector. The last entry of each row is its rhs.
#[derive(Debug, Clone)]
struct Tableau {
    ncols: usize,
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
}

enum SimplexEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.ncols]
    }

    fn add_zero_columns(&mut self, k: usize) {
        for row in self.rows.iter_mut() {
            let rhs = row.pop().expect("rhs entry");
            row.extend(std::iter::repeat_n(Rational::zero(), k));
            row.push(rhs);
        }
        self.ncols += k;
    }

    fn pivot(&mut self, r: usize, c: usize, objective: &mut [Rational]) {
        let inv = self.rows[r][c].recip();
        if inv != Rational::one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
        }
        let pivot_row = self.rows[r].clone();
        let nz: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |row: &mut [Rational]| {
            if row[c].is_zero() {
                return;
            }
            let f = -&row[c];
            for &j in &nz {
                row[j].add_mul(&f, &pivot_row[j]);
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(objective);
        self.basis[r] = c;
    }

    /// Minimizes with Bland's rule. `objective` holds reduced costs for every
    /// column followed by minus the current objective value. Only columns
    /// below `enter_limit` may enter the basis.
    fn run(&mut self, objective: &mut [Rational], enter_limit: usize) -> SimplexEnd {
        loop {
            let Some(c) = (0..enter_limit).find(|&j| objective[j].is_negative()) else {
                return SimplexEnd::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return SimplexEnd::Unbounded,
                Some((r, _)) => self.pivot(r, c, objective),
            }
        }
    }

    /// Phase-1 objective row for artificials occupying columns
    /// `art_start..ncols` in the rows `art_rows`.
    fn phase1_objective(&self, art_rows: &[usize], art_start: usize) -> Vec<Rational> {
        let mut obj = vec![Rational::zero(); self.ncols + 1];
        for &i in art_rows {
            for (j, v) in self.rows[i].iter().enumerate() {
                if (j < art_start || j == self.ncols) && !v.is_zero() {
                    obj[j] -= v;
                }
            }
        }
        obj
    }
}

#[derive(Debug, Clone)]
enum State {
    Infeasible,
    Feasible(Tableau),
}

/// A formulation reduced to standard form with a feasible basis (or a proof
/// of infeasibility), ready for repeated optimization.
#[derive(Debug, Clone)]
pub struct PreparedLp {
    num_slacks: usize,
    /// For pivoted free variables: `x_v + coeffs . cols = rhs`, where columns
    /// `< num_slacks` are slacks and the rest are unpivoted free variables.
    definitions: Vec<Option<Row>>,
    /// Reduced-space column of each unpivoted free variable.
    free_column: Vec<Option<usize>>,
    state: State,
    source: ExtendedFormulation,
}

impl PreparedLp {
    pub fn new(ef: &ExtendedFormulation) -> Self {
        Self::build(ef.clone())
    }

    fn build(source: ExtendedFormulation) -> Self {
        let n = source.vars.len();
        let ns = source.inequalities.len();
        let mut rows: Vec<Row> = Vec::with_capacity(ns + source.equations.len());
        for (k, q) in source.inequalities.iter().enumerate() {
            let mut coeffs = q.row.coeffs.clone();
            let s = match q.sense {
                Sense::Le => Rational::one(),
                Sense::Ge => Rational::from_integer(-1),
            };
            coeffs.push((n + k, s));
            rows.push(Row { coeffs, rhs: q.row.rhs.clone() });
        }
        for e in &source.equations {
            rows.push(Row { coeffs: e.coeffs.clone(), rhs: e.rhs.clone() });
        }

        // Eliminate free variables, always pivoting in the shortest row that
        // still holds one. A pivoted variable survives only in its own row,
        // so any free column left in an unused row is unpivoted.
        let mut used = vec![false; rows.len()];
        let mut pivot_row_of: Vec<Option<usize>> = vec![None; n];
        loop {
            let candidate = rows
                .iter()
                .enumerate()
                .filter(|(r, row)| !used[*r] && row.coeffs.first().is_some_and(|(c, _)| *c < n))
                .min_by_key(|(r, row)| (row.coeffs.len(), *r))
                .map(|(r, _)| r);
            let Some(r) = candidate else { break };
            let row = &rows[r];
            let free: Vec<&(usize, Rational)> = row.coeffs.iter().take_while(|(c, _)| *c < n).collect();
            let &(col, _) = free
                .iter()
                .find(|(_, v)| v.abs() == Rational::one())
                .copied()
                .unwrap_or(free[0]);
            let inv = row.get(col).expect("pivot entry").recip();
            rows[r].scale(&inv);
            let pr = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i == r {
                    continue;
                }
                if let Some(v) = row.get(col) {
                    let f = -v;
                    row.axpy(&f, &pr);
                }
            }
            used[r] = true;
            pivot_row_of[col] = Some(r);
        }

        let mut free_column = vec![None; n];
        let mut next = ns;
        for v in 0..n {
            if pivot_row_of[v].is_none() {
                free_column[v] = Some(next);
                next += 1;
            }
        }
        let remap = |c: usize| if c >= n { c - n } else { free_column[c].expect("unpivoted free column") };
        let definitions: Vec<Option<Row>> = pivot_row_of
            .iter()
            .enumerate()
            .map(|(v, r)| {
                r.map(|r| {
                    let row = &rows[r];
                    let mut coeffs: SparseRow =
                        row.coeffs.iter().filter(|(c, _)| *c != v).map(|(c, x)| (remap(*c), x.clone())).collect();
                    coeffs.sort_by_key(|(c, _)| *c);
                    Row { coeffs, rhs: row.rhs.clone() }
                })
            })
            .collect();

        let mut constraint_rows = Vec::new();
        let mut infeasible = false;
        for (r, row) in rows.iter().enumerate() {
            if used[r] {
                continue;
            }
            if row.coeffs.is_empty() {
                infeasible |= !row.rhs.is_zero();
                continue;
            }
            debug_assert!(row.coeffs.iter().all(|(c, _)| *c >= n));
            let mut dense = vec![Rational::zero(); ns + 1];
            for (c, v) in &row.coeffs {
                dense[c - n] = v.clone();
            }
            dense[ns] = row.rhs.clone();
            constraint_rows.push(dense);
        }

        let state = if infeasible { State::Infeasible } else { phase_one(ns, constraint_rows) };
        Self { num_slacks: ns, definitions, free_column, state, source }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self.state, State::Feasible(_))
    }

    /// Expresses `sum c_v x_v` as `constant + d . cols` in reduced space.
    fn reduce_objective(&self, objective: &[(usize, Rational)]) -> (Rational, Vec<(usize, Rational)>) {
        let mut constant = Rational::zero();
        let mut d: std::collections::BTreeMap<usize, Rational> = Default::default();
        for (v, c) in objective {
            if c.is_zero() {
                continue;
            }
            match &self.definitions[*v] {
                Some(def) => {
                    constant.add_mul(c, &def.rhs);
                    let neg = -c;
                    for (col, a) in &def.coeffs {
                        d.entry(*col).or_default().add_mul(&neg, a);
                    }
                }
                None => {
                    *d.entry(self.free_column[*v].expect("free column")).or_default() += c;
                }
            }
        }
        (constant, d.into_iter().filter(|(_, v)| !v.is_zero()).collect())
    }

    pub fn optimize(&self, objective: &[(usize, Rational)], direction: Direction) -> LpOutcome {
        let State::Feasible(tab) = &self.state else {
            return LpOutcome::Infeasible;
        };
        let signed: Vec<(usize, Rational)> = match direction {
            Direction::Minimize => objective.to_vec(),
            Direction::Maximize => objective.iter().map(|(v, c)| (*v, -c)).collect(),
        };
        let (constant, d) = self.reduce_objective(&signed);
        if d.iter().any(|(c, _)| *c >= self.num_slacks) {
            return LpOutcome::Unbounded;
        }
        let ns = self.num_slacks;
        let mut cost = vec![Rational::zero(); ns + 1];
        for (c, v) in d {
            cost[c] = v;
        }
        // Reduced costs relative to the stored basis.
        let mut obj = cost.clone();
        obj[ns] = Rational::zero();
        for (i, row) in tab.rows.iter().enumerate() {
            let cb = &cost[tab.basis[i]];
            if cb.is_zero() {
                continue;
            }
            let f = -cb;
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    obj[j].add_mul(&f, v);
                }
            }
        }
        let mut work = tab.clone();
        match work.run(&mut obj, ns) {
            SimplexEnd::Unbounded => LpOutcome::Unbounded,
            SimplexEnd::Optimal => {
                let z = &constant - &obj[ns];
                LpOutcome::Optimal(match direction {
                    Direction::Minimize => z,
                    Direction::Maximize => -z,
                })
            }
        }
    }

    /// Feasibility of the system with `x_v = value` appended for each pair.
    pub fn feasible_with(&self, fixes: &[(usize, Rational)]) -> bool {
        let State::Feasible(tab) = &self.state else {
            return false;
        };
        let ns = self.num_slacks;
        let mut extra = Vec::with_capacity(fixes.len());
        for (v, value) in fixes {
            let Some(def) = &self.definitions[*v] else {
                return self.feasible_from_scratch(fixes);
            };
            if def.coeffs.iter().any(|(c, _)| *c >= ns) {
                return self.feasible_from_scratch(fixes);
            }
            let mut dense = vec![Rational::zero(); ns + 1];
            for (c, a) in &def.coeffs {
                dense[*c] = a.clone();
            }
            dense[ns] = &def.rhs - value;
            extra.push(dense);
        }

        let mut work = tab.clone();
        let mut art_rows = Vec::new();
        let mut pending = Vec::new();
        for mut f in extra {
            for (i, row) in work.rows.iter().enumerate() {
                let b = work.basis[i];
                if f[b].is_zero() {
                    continue;
                }
                let g = -&f[b];
                for (j, v) in row.iter().enumerate() {
                    if !v.is_zero() {
                        f[j].add_mul(&g, v);
                    }
                }
            }
            if f[..ns].iter().all(Rational::is_zero) {
                if !f[ns].is_zero() {
                    return false;
                }
                continue;
            }
            if f[ns].is_negative() {
                for v in f.iter_mut() {
                    *v = -&*v;
                }
            }
            pending.push(f);
        }
        if pending.is_empty() {
            return true;
        }
        let k = pending.len();
        work.add_zero_columns(k);
        let width = work.ncols;
        for (t, f) in pending.into_iter().enumerate() {
            let mut row = f[..ns].to_vec();
            row.extend(std::iter::repeat_n(Rational::zero(), k));
            row[ns + t] = Rational::one();
            row.push(f[ns].clone());
            debug_assert_eq!(row.len(), width + 1);
            art_rows.push(work.rows.len());
            work.rows.push(row);
            work.basis.push(ns + t);
        }
        let mut obj = work.phase1_objective(&art_rows, ns);
        work.run(&mut obj, ns);
        obj[work.ncols].is_zero()
    }

    fn feasible_from_scratch(&self, fixes: &[(usize, Rational)]) -> bool {
        let mut ef = self.source.clone();
        for (v, value) in fixes {
            ef.add_equation(vec![(*v, Rational::one())], value.clone()).expect("index from this formulation");
        }
        PreparedLp::build(ef).is_feasible()
    }
}

/// Phase 1 over `rows` (dense over `ns` nonnegative columns plus rhs):
/// artificials on every row, minimize their sum, then drive any artificial
/// left at level zero out of the basis or drop its redundant row.
fn phase_one(ns: usize, mut rows: Vec<Vec<Rational>>) -> State {
    let m = rows.len();
    for row in rows.iter_mut() {
        if row[ns].is_negative() {
            for v in row.iter_mut() {
                *v = -&*v;
            }
        }
    }
    let mut tab = Tableau { ncols: ns, rows, basis: Vec::new() };
    tab.add_zero_columns(m);
    for i in 0..m {
        tab.rows[i][ns + i] = Rational::one();
        tab.basis.push(ns + i);
    }
    let art: Vec<usize> = (0..m).collect();
    let mut obj = tab.phase1_objective(&art, ns);
    tab.run(&mut obj, ns);
    if !obj[tab.ncols].is_zero() {
        return State::Infeasible;
    }
    let mut keep = vec![true; m];
    for i in 0..m {
        if tab.basis[i] < ns {
            continue;
        }
        match (0..ns).find(|&j| !tab.rows[i][j].is_zero()) {
            Some(j) => tab.pivot(i, j, &mut obj),
            None => keep[i] = false,
        }
    }
    let mut rows = Vec::new();
    let mut basis = Vec::new();
    for (i, mut row) in tab.rows.into_iter().enumerate() {
        if keep[i] {
            let rhs = row.pop().expect("rhs entry");
            row.truncate(ns);
            row.push(rhs);
            rows.push(row);
            basis.push(tab.basis[i]);
        }
    }
    State::Feasible(Tableau { ncols: ns, rows, basis })
}
