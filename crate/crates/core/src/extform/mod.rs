//! Extended formulations: rational linear systems over named variables, some
//! of which are flagged as projected onto a labeled ground set.
//!
//! The projection is always a coordinate projection. Operations that demote a
//! projected variable (coupling, fixing, monotonization) keep it in the system
//! as an auxiliary variable rather than eliminating it.

mod export;
pub mod lp;

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::rational::Rational;

pub use lp::{Direction, LpOutcome, PreparedLp};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EfError {
    #[error("projected label `{0}` appears on both sides")]
    LabelCollision(String),
    #[error("`{0}` is not a projected variable")]
    NotProjected(String),
    #[error("label `{0}` is used more than once")]
    DuplicateLabel(String),
    #[error("point list is empty")]
    EmptyPointSet,
    #[error("point {index} has {got} coordinates, expected {expected}")]
    PointDimension { index: usize, got: usize, expected: usize },
    #[error("variable index {0} out of range")]
    VariableOutOfRange(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    /// Ground-set label when the variable is projected.
    pub label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Le,
    Ge,
}

/// Sparse linear form with a right-hand side; coefficients are sorted by
/// variable index, merged and nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRow {
    pub coeffs: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

impl LinearRow {
    pub fn new(coeffs: Vec<(usize, Rational)>, rhs: Rational) -> Self {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (v, c) in coeffs {
            *acc.entry(v).or_default() += &c;
        }
        let coeffs = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Self { coeffs, rhs }
    }

    fn shifted(&self, offset: usize) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(v, c)| (v + offset, c.clone())).collect(),
            rhs: self.rhs.clone(),
        }
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(v, c)| c * &point[*v]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inequality {
    pub row: LinearRow,
    pub sense: Sense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EfSize {
    pub inequalities: usize,
    pub equations: usize,
    pub variables: usize,
}

#[derive(Debug, Clone, Default)]
pub struct ExtendedFormulation {
    vars: Vec<Variable>,
    inequalities: Vec<Inequality>,
    equations: Vec<LinearRow>,
    projected: HashMap<String, usize>,
}

fn one() -> Rational {
    Rational::one()
}

fn minus_one() -> Rational {
    Rational::from_integer(-1)
}

impl ExtendedFormulation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_projected(&mut self, name: impl Into<String>, label: impl Into<String>) -> Result<usize, EfError> {
        let label = label.into();
        if self.projected.contains_key(&label) {
            return Err(EfError::DuplicateLabel(label));
        }
        let idx = self.vars.len();
        self.projected.insert(label.clone(), idx);
        self.vars.push(Variable { name: name.into(), label: Some(label) });
        Ok(idx)
    }

    pub fn add_auxiliary(&mut self, name: impl Into<String>) -> usize {
        self.vars.push(Variable { name: name.into(), label: None });
        self.vars.len() - 1
    }

    fn check_vars(&self, coeffs: &[(usize, Rational)]) -> Result<(), EfError> {
        match coeffs.iter().find(|(v, _)| *v >= self.vars.len()) {
            Some((v, _)) => Err(EfError::VariableOutOfRange(*v)),
            None => Ok(()),
        }
    }

    pub fn add_inequality(&mut self, coeffs: Vec<(usize, Rational)>, sense: Sense, rhs: Rational) -> Result<(), EfError> {
        self.check_vars(&coeffs)?;
        self.inequalities.push(Inequality { row: LinearRow::new(coeffs, rhs), sense });
        Ok(())
    }

    pub fn add_equation(&mut self, coeffs: Vec<(usize, Rational)>, rhs: Rational) -> Result<(), EfError> {
        self.check_vars(&coeffs)?;
        self.equations.push(LinearRow::new(coeffs, rhs));
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn inequalities(&self) -> &[Inequality] {
        &self.inequalities
    }

    pub fn equations(&self) -> &[LinearRow] {
        &self.equations
    }

    /// Stored counts. Equations are not part of the size notion, which
    /// counts inequalities only.
    pub fn size(&self) -> EfSize {
        EfSize {
            inequalities: self.inequalities.len(),
            equations: self.equations.len(),
            variables: self.vars.len(),
        }
    }

    /// Projected labels in variable order.
    pub fn projected_labels(&self) -> Vec<&str> {
        self.vars.iter().filter_map(|v| v.label.as_deref()).collect()
    }

    pub fn projected_index(&self, label: &str) -> Result<usize, EfError> {
        self.projected.get(label).copied().ok_or_else(|| EfError::NotProjected(label.to_string()))
    }

    fn demote(&mut self, idx: usize) {
        if let Some(label) = self.vars[idx].label.take() {
            self.projected.remove(&label);
            self.vars[idx].name = format!("y({label})");
        }
    }

    /// Shared body of `monotonize` and `affine_complement`: fresh projected
    /// `x >= 0` and `x <= y` resp. `x + y <= 1` for each old projected `y`.
    fn lift_below(&self, complement: bool) -> Self {
        let mut out = self.clone();
        let old: Vec<(usize, String)> = self
            .vars
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.label.clone().map(|l| (i, l)))
            .collect();
        for (y, label) in old {
            out.demote(y);
            let x = out.add_projected(format!("x({label})"), label).expect("label freed by demotion");
            out.inequalities.push(Inequality { row: LinearRow::new(vec![(x, one())], Rational::zero()), sense: Sense::Ge });
            let row = if complement {
                LinearRow::new(vec![(x, one()), (y, one())], one())
            } else {
                LinearRow::new(vec![(x, one()), (y, minus_one())], Rational::zero())
            };
            out.inequalities.push(Inequality { row, sense: Sense::Le });
        }
        out
    }

    /// Down-closure within the nonnegative orthant: `{x >= 0 : x <= y, y in P}`.
    /// Adds exactly two inequalities per projected variable.
    pub fn monotonize(&self) -> Self {
        self.lift_below(false)
    }

    /// `{x : 0 <= x <= 1 - y, y in P}`. Adds exactly two inequalities per
    /// projected variable.
    pub fn affine_complement(&self) -> Self {
        self.lift_below(true)
    }

    /// Cartesian product; projected labels must be disjoint.
    pub fn product(&self, other: &Self) -> Result<Self, EfError> {
        if let Some(l) = other.projected_labels().into_iter().find(|l| self.projected.contains_key(*l)) {
            return Err(EfError::LabelCollision(l.to_string()));
        }
        let offset = self.vars.len();
        let mut out = self.clone();
        out.vars.extend(other.vars.iter().cloned());
        for (l, &i) in &other.projected {
            out.projected.insert(l.clone(), i + offset);
        }
        out.inequalities
            .extend(other.inequalities.iter().map(|q| Inequality { row: q.row.shifted(offset), sense: q.sense }));
        out.equations.extend(other.equations.iter().map(|e| e.shifted(offset)));
        Ok(out)
    }

    /// Prefixes every variable name and projected label.
    pub fn with_prefix(&self, prefix: &str) -> Self {
        let mut out = self.clone();
        out.projected.clear();
        for (i, v) in out.vars.iter_mut().enumerate() {
            v.name = format!("{prefix}{}", v.name);
            if let Some(l) = v.label.as_mut() {
                *l = format!("{prefix}{l}");
                out.projected.insert(l.clone(), i);
            }
        }
        out
    }

    /// Adds `x_left + x_right = 1` per pair and projects all paired
    /// coordinates away.
    pub fn couple(&self, pairs: &[(String, String)]) -> Result<Self, EfError> {
        let mut seen = HashSet::new();
        for (l, r) in pairs {
            for x in [l, r] {
                if !seen.insert(x.as_str()) {
                    return Err(EfError::DuplicateLabel(x.clone()));
                }
            }
        }
        let mut out = self.clone();
        let mut demoted = Vec::new();
        for (l, r) in pairs {
            let (li, ri) = (self.projected_index(l)?, self.projected_index(r)?);
            out.equations.push(LinearRow::new(vec![(li, one()), (ri, one())], one()));
            demoted.extend([li, ri]);
        }
        for i in demoted {
            out.demote(i);
        }
        Ok(out)
    }

    /// Adds `x_label = value` and projects the coordinate away. On an
    /// independence polytope, fixing to 0 deletes the element and fixing to
    /// 1 contracts it.
    pub fn fix_variable(&self, label: &str, value: bool) -> Result<Self, EfError> {
        let i = self.projected_index(label)?;
        let mut out = self.clone();
        let rhs = if value { one() } else { Rational::zero() };
        out.equations.push(LinearRow::new(vec![(i, one())], rhs));
        out.demote(i);
        Ok(out)
    }

    /// Convex hull of 0/1 points: `x = sum_P lambda_P P`, `sum lambda = 1`,
    /// `lambda >= 0`.
    pub fn vrep_lift<S: AsRef<str>>(labels: &[S], points: &[Vec<bool>]) -> Result<Self, EfError> {
        if points.is_empty() {
            return Err(EfError::EmptyPointSet);
        }
        let mut ef = Self::new();
        let xs: Vec<usize> = labels
            .iter()
            .map(|l| ef.add_projected(format!("x({})", l.as_ref()), l.as_ref()))
            .collect::<Result<_, _>>()?;
        let mut lambdas = Vec::with_capacity(points.len());
        for (k, p) in points.iter().enumerate() {
            if p.len() != labels.len() {
                return Err(EfError::PointDimension { index: k, got: p.len(), expected: labels.len() });
            }
            lambdas.push(ef.add_auxiliary(format!("lambda{k}")));
        }
        for (e, &x) in xs.iter().enumerate() {
            let mut coeffs = vec![(x, one())];
            coeffs.extend(points.iter().zip(&lambdas).filter(|(p, _)| p[e]).map(|(_, &l)| (l, minus_one())));
            ef.equations.push(LinearRow::new(coeffs, Rational::zero()));
        }
        ef.equations.push(LinearRow::new(lambdas.iter().map(|&l| (l, one())).collect(), one()));
        for &l in &lambdas {
            ef.inequalities.push(Inequality { row: LinearRow::new(vec![(l, one())], Rational::zero()), sense: Sense::Ge });
        }
        Ok(ef)
    }

    fn objective_indices<S: AsRef<str>>(&self, objective: &[(S, Rational)]) -> Result<Vec<(usize, Rational)>, EfError> {
        objective
            .iter()
            .map(|(l, c)| Ok((self.projected_index(l.as_ref())?, c.clone())))
            .collect()
    }

    /// Phase-1 solve, reusable across many objectives and point checks.
    pub fn prepare(&self) -> PreparedLp {
        PreparedLp::new(self)
    }

    /// Exact optimum of a linear objective over projected coordinates.
    pub fn lp_optimize<S: AsRef<str>>(&self, objective: &[(S, Rational)], direction: Direction) -> Result<LpOutcome, EfError> {
        let obj = self.objective_indices(objective)?;
        Ok(self.prepare().optimize(&obj, direction))
    }

    /// Whether some auxiliary witness extends the given projected assignment.
    pub fn lp_feasible_point<S: AsRef<str>>(&self, assignment: &[(S, Rational)]) -> Result<bool, EfError> {
        let fixes = self.objective_indices(assignment)?;
        Ok(self.prepare().feasible_with(&fixes))
    }

    /// Testing hook: changes one right-hand side so that the origin leaves
    /// the projection. Prefers the first nonnegativity row `x >= 0` of a
    /// projected variable, tightened to `x >= 1`. Otherwise the first
    /// equation with a projected variable `x` (of coefficient `c`) gets
    /// right-hand side `c`, which forces `x >= 1` on rows like
    /// `x - sum lambda = 0`. Last resort: shift the first row by one.
    pub fn with_injected_fault(&self) -> Self {
        let mut out = self.clone();
        let projected = |v: usize| self.vars[v].label.is_some();
        let nonneg = self.inequalities.iter().position(|q| match (&q.row.coeffs[..], q.sense) {
            ([(v, c)], Sense::Ge) => projected(*v) && c.is_positive() && q.row.rhs.is_zero(),
            ([(v, c)], Sense::Le) => projected(*v) && c.is_negative() && q.row.rhs.is_zero(),
            _ => false,
        });
        if let Some(k) = nonneg {
            let row = &mut out.inequalities[k].row;
            row.rhs = row.coeffs[0].1.clone();
            return out;
        }
        let eq = self.equations.iter().enumerate().find_map(|(k, e)| e.coeffs.iter().find(|(v, _)| projected(*v)).map(|(_, c)| (k, c.clone())));
        if let Some((k, c)) = eq {
            out.equations[k].rhs += &c;
        } else if let Some(e) = out.equations.first_mut() {
            e.rhs += &one();
        } else if let Some(q) = out.inequalities.first_mut() {
            q.row.rhs += &one();
        }
        out
    }

    /// Whether `point` (one value per variable) satisfies every constraint.
    pub fn satisfies(&self, point: &[Rational]) -> bool {
        self.equations.iter().all(|e| e.eval(point) == e.rhs)
            && self.inequalities.iter().all(|q| {
                let v = q.row.eval(point);
                match q.sense {
                    Sense::Le => v <= q.row.rhs,
                    Sense::Ge => v >= q.row.rhs,
                }
            })
    }
}

#[cfg(test)]
mod tests;
