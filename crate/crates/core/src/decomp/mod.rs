//! Decomposition trees of binary matroids: leaves are graphic, cographic or
//! small explicit matroids, internal nodes are 1-, 2- and 3-sums.
//!
//! A sum node does not store its blocks. Everything is derived from the
//! children's defining matrices:
//!
//! * 2-sum: the left child is `M(a A)` and the right child `M(b^T; B)`; the
//!   glue elements are `r1` (the column `a`) and `r2` (the unit column of the
//!   `b` row).
//! * 3-sum: the left child is `M(a a A; 0 1 c^T)` and the right child
//!   `M(0 1 b^T; d d B)`. On the left, `p1` is the identity element of the
//!   last row, `r1` and `q1` the columns `(a;0)` and `(a;1)`. On the right,
//!   `r2` is the identity element of the first row, `p2` and `q2` the columns
//!   `(0;d)` and `(1;d)`.
//!
//! The sum's elements are, in order, the identity elements of `A`, those of
//! `B`, the columns of `A`, then the columns of `B`, labelled `left/...` and
//! `right/...` after the child element they come from. Blocks and glue
//! vectors given in a tree file are checked against the derived ones.

mod format;

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::extform::{EfError, ExtendedFormulation};
use crate::gf2::{assemble_1sum, assemble_2sum, assemble_3sum, Gf2Error, Gf2Matrix, Gf2Vector};
use crate::graphic::{cographic_independence_ef, cographic_matrix, graphic_independence_ef, network_matrix, Graph, GraphError};
use crate::matroid::{default_labels, BinaryMatroid, ElementSet, MatroidError, DEFAULT_ENUMERATION_CAP};
use crate::par::Execution;

pub use format::{parse_tree_file, parse_tree_str, write_tree_files};

pub const LEFT_PREFIX: &str = "left/";
pub const RIGHT_PREFIX: &str = "right/";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecompError {
    #[error("{file}: line {line}: {msg}")]
    Parse { file: String, line: usize, msg: String },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("node `{node}`: {msg}")]
    Shape { node: String, msg: String },
    #[error("node `{node}`: given {what} does not match the one derived from the children")]
    GlueMismatch { node: String, what: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Ef(#[from] EfError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafKind {
    Graphic(Graph),
    Cographic(Graph),
    Small(Gf2Matrix),
}

impl LeafKind {
    pub fn name(&self) -> &'static str {
        match self {
            LeafKind::Graphic(_) => "graphic",
            LeafKind::Cographic(_) => "cographic",
            LeafKind::Small(_) => "small",
        }
    }
}

/// Optional glue data supplied with a sum node, checked against the
/// children.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GivenGlue {
    pub a: Option<Gf2Vector>,
    pub b: Option<Gf2Vector>,
    pub c: Option<Gf2Vector>,
    pub d: Option<Gf2Vector>,
    pub a_block: Option<Gf2Matrix>,
    pub b_block: Option<Gf2Matrix>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Leaf { id: String, kind: LeafKind },
    Sum { id: String, k: u8, left: Box<Node>, right: Box<Node>, given: GivenGlue },
}

/// A defining matrix `A` together with the labels of the elements of
/// `(I | A)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defining {
    pub matrix: Gf2Matrix,
    pub labels: Vec<String>,
}

impl Defining {
    pub fn matroid(&self) -> BinaryMatroid {
        BinaryMatroid::from_matrix(&self.matrix, Some(self.labels.clone())).expect("labels are distinct by construction")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Glue element indices (0-based) in the left and right child.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GlueElements {
    pub r: (usize, usize),
    pub p: Option<(usize, usize)>,
    pub q: Option<(usize, usize)>,
}

/// How a sum is realized from its children: elements fixed to 0 (deleted)
/// or 1 (contracted) on either side, then pairs coupled by `x + y = 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CompositionPlan {
    pub left_fixes: Vec<(usize, bool)>,
    pub right_fixes: Vec<(usize, bool)>,
    pub pairs: Vec<(usize, usize)>,
    pub case: &'static str,
}

/// Everything derived for one sum node.
#[derive(Debug, Clone)]
pub struct SumLayout {
    pub k: u8,
    pub a_block: Gf2Matrix,
    pub b_block: Gf2Matrix,
    pub a: Gf2Vector,
    pub b: Gf2Vector,
    pub c: Gf2Vector,
    pub d: Gf2Vector,
    pub glue: Option<GlueElements>,
    pub plan: CompositionPlan,
    /// Child element index to sum element index; `None` for glue.
    pub left_map: Vec<Option<usize>>,
    pub right_map: Vec<Option<usize>>,
    pub sum: Defining,
}

fn shape(node: &str, msg: impl Into<String>) -> DecompError {
    DecompError::Shape { node: node.to_string(), msg: msg.into() }
}

fn col_range(m: &Gf2Matrix, c: usize, rows: std::ops::Range<usize>) -> Gf2Vector {
    Gf2Vector::from_bits(&rows.map(|r| m.get(r, c)).collect::<Vec<_>>())
}

fn row_range(m: &Gf2Matrix, r: usize, cols: std::ops::Range<usize>) -> Gf2Vector {
    Gf2Vector::from_bits(&cols.map(|c| m.get(r, c)).collect::<Vec<_>>())
}

impl SumLayout {
    pub fn new(id: &str, k: u8, left: &Defining, right: &Defining) -> Result<Self, DecompError> {
        let (l, r) = (&left.matrix, &right.matrix);
        let (pl, ql, pr, qr) = (l.num_rows(), l.num_cols(), r.num_rows(), r.num_cols());
        let none = Gf2Vector::zeros(0);
        let (a_block, b_block, a, b, c, d, glue) = match k {
            1 => (l.clone(), r.clone(), none.clone(), none.clone(), none.clone(), none, None),
            2 => {
                if ql == 0 {
                    return Err(shape(id, "2-sum left child needs a column for a"));
                }
                if pr == 0 {
                    return Err(shape(id, "2-sum right child needs a row for b"));
                }
                let glue = GlueElements { r: (pl, 0), p: None, q: None };
                (
                    l.submatrix(0..pl, 1..ql),
                    r.submatrix(1..pr, 0..qr),
                    col_range(l, 0, 0..pl),
                    row_range(r, 0, 0..qr),
                    none.clone(),
                    none,
                    Some(glue),
                )
            }
            3 => {
                if pl == 0 || ql < 2 {
                    return Err(shape(id, "3-sum left child must have the form (a a A; 0 1 c^T)"));
                }
                if pr == 0 || qr < 2 {
                    return Err(shape(id, "3-sum right child must have the form (0 1 b^T; d d B)"));
                }
                let m1 = pl - 1;
                if l.get(m1, 0) || !l.get(m1, 1) {
                    return Err(shape(id, "last row of the left child must start with 0 1"));
                }
                if (0..m1).any(|i| l.get(i, 0) != l.get(i, 1)) {
                    return Err(shape(id, "first two columns of the left child must agree above the last row"));
                }
                if r.get(0, 0) || !r.get(0, 1) {
                    return Err(shape(id, "first row of the right child must start with 0 1"));
                }
                if (1..pr).any(|i| r.get(i, 0) != r.get(i, 1)) {
                    return Err(shape(id, "first two columns of the right child must agree below the first row"));
                }
                let m2 = pr - 1;
                let glue = GlueElements { r: (m1 + 1, 0), p: Some((m1, m2 + 1)), q: Some((m1 + 2, m2 + 2)) };
                (
                    l.submatrix(0..m1, 2..ql),
                    r.submatrix(1..pr, 2..qr),
                    col_range(l, 0, 0..m1),
                    row_range(r, 0, 2..qr),
                    row_range(l, m1, 2..ql),
                    col_range(r, 0, 1..pr),
                    Some(glue),
                )
            }
            _ => return Err(shape(id, format!("k must be 1, 2 or 3, got {k}"))),
        };

        let matrix = match k {
            1 => assemble_1sum(&a_block, &b_block),
            2 => assemble_2sum(&a_block, &a, &b, &b_block)?,
            _ => assemble_3sum(&a_block, &a, &b, &c, &d, &b_block)?,
        };

        // Positions of each child element in the sum's (I | S) order.
        let (ra, ca, rb, cb) = (a_block.num_rows(), a_block.num_cols(), b_block.num_rows(), b_block.num_cols());
        let mut left_map = vec![None; left.len()];
        let mut right_map = vec![None; right.len()];
        let (l_row0, l_col0, r_row0, r_col0) = match k {
            1 => (0, pl, 0, pr),
            2 => (0, pl + 1, 1, 1 + rb),
            _ => (0, ra + 3, 1, rb + 3),
        };
        for i in 0..ra {
            left_map[l_row0 + i] = Some(i);
        }
        for j in 0..ca {
            left_map[l_col0 + j] = Some(ra + rb + j);
        }
        for i in 0..rb {
            right_map[r_row0 + i] = Some(ra + i);
        }
        for j in 0..cb {
            right_map[r_col0 + j] = Some(ra + rb + ca + j);
        }

        let mut labels = vec![String::new(); ra + rb + ca + cb];
        for (i, m) in left_map.iter().enumerate() {
            if let Some(s) = m {
                labels[*s] = format!("{LEFT_PREFIX}{}", left.labels[i]);
            }
        }
        for (i, m) in right_map.iter().enumerate() {
            if let Some(s) = m {
                labels[*s] = format!("{RIGHT_PREFIX}{}", right.labels[i]);
            }
        }

        let plan = plan_for(k, glue.as_ref(), &a, &d);
        Ok(Self { k, a_block, b_block, a, b, c, d, glue, plan, left_map, right_map, sum: Defining { matrix, labels } })
    }

    /// Checks user-supplied blocks and glue vectors.
    pub fn check_given(&self, id: &str, given: &GivenGlue) -> Result<(), DecompError> {
        let mismatch = |what: &str| DecompError::GlueMismatch { node: id.to_string(), what: what.to_string() };
        let vectors = [("a", &given.a, &self.a), ("b", &given.b, &self.b), ("c", &given.c, &self.c), ("d", &given.d, &self.d)];
        for (name, g, derived) in vectors {
            if let Some(g) = g {
                let used = match self.k {
                    1 => false,
                    2 => matches!(name, "a" | "b"),
                    _ => true,
                };
                if !used || g != derived {
                    return Err(mismatch(name));
                }
            }
        }
        if given.a_block.as_ref().is_some_and(|m| *m != self.a_block) {
            return Err(mismatch("A"));
        }
        if given.b_block.as_ref().is_some_and(|m| *m != self.b_block) {
            return Err(mismatch("B"));
        }
        Ok(())
    }
}

/// The composition plan. Degenerate glue (`a = 0` or `d = 0`) makes some
/// glue elements loops or parallel to others; those are deleted or
/// contracted so that the remaining pairs give the sum.
fn plan_for(k: u8, glue: Option<&GlueElements>, a: &Gf2Vector, d: &Gf2Vector) -> CompositionPlan {
    let Some(g) = glue else {
        return CompositionPlan { case: "k=1", ..Default::default() };
    };
    let two_sum = |plan: &mut CompositionPlan, case_nonzero: &'static str, case_zero: &'static str| {
        if a.is_zero() {
            plan.left_fixes.push((g.r.0, false));
            plan.right_fixes.push((g.r.1, true));
            plan.case = case_zero;
        } else {
            plan.pairs.push(g.r);
            plan.case = case_nonzero;
        }
    };
    let mut plan = CompositionPlan::default();
    if k == 2 {
        two_sum(&mut plan, "k=2", "k=2,a=0");
        return plan;
    }
    let (p, q) = (g.p.expect("3-sum glue"), g.q.expect("3-sum glue"));
    if d.is_zero() {
        // (A a b^T; 0 B) is the 2-sum of M(a A) and M(b^T; B): contract p1
        // and delete q1 (now parallel to r1); p2 is a loop and q2 parallel
        // to r2.
        plan.left_fixes.extend([(p.0, true), (q.0, false)]);
        plan.right_fixes.extend([(p.1, false), (q.1, false)]);
        two_sum(&mut plan, "k=3,d=0", "k=3,a=0,d=0");
    } else if a.is_zero() {
        // (A 0; d c^T B) is the 2-sum of M(A; c^T) and M(d B) glued at p.
        plan.left_fixes.extend([(g.r.0, false), (q.0, false)]);
        plan.right_fixes.extend([(g.r.1, true), (q.1, false)]);
        plan.pairs.push(p);
        plan.case = "k=3,a=0";
    } else {
        plan.pairs.extend([g.r, p, q]);
        plan.case = "k=3";
    }
    plan
}

/// Which glue patterns a combined pair of independent sets may show.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlueRule {
    ExactlyOne,
    AtLeastOne,
}

impl Node {
    pub fn id(&self) -> &str {
        match self {
            Node::Leaf { id, .. } | Node::Sum { id, .. } => id,
        }
    }

    pub fn leaf(id: impl Into<String>, kind: LeafKind) -> Self {
        Node::Leaf { id: id.into(), kind }
    }

    pub fn sum(id: impl Into<String>, k: u8, left: Node, right: Node) -> Self {
        Node::Sum { id: id.into(), k, left: Box::new(left), right: Box::new(right), given: GivenGlue::default() }
    }

    pub fn children(&self) -> Option<(&Node, &Node)> {
        match self {
            Node::Sum { left, right, .. } => Some((left, right)),
            Node::Leaf { .. } => None,
        }
    }

    /// The defining matrix of the node's matroid, rebuilt bottom-up.
    pub fn defining(&self) -> Result<Defining, DecompError> {
        match self {
            Node::Leaf { kind, .. } => Ok(match kind {
                LeafKind::Graphic(g) => {
                    let (matrix, labels) = network_matrix(g);
                    Defining { matrix, labels }
                }
                LeafKind::Cographic(g) => {
                    let (matrix, labels) = cographic_matrix(g);
                    Defining { matrix, labels }
                }
                LeafKind::Small(m) => Defining { matrix: m.clone(), labels: default_labels(m.num_rows() + m.num_cols()) },
            }),
            Node::Sum { .. } => Ok(self.layout()?.sum),
        }
    }

    /// Layout of a sum node; errors on leaves.
    pub fn layout(&self) -> Result<SumLayout, DecompError> {
        let Node::Sum { id, k, left, right, given } = self else {
            return Err(shape(self.id(), "not a sum node"));
        };
        let layout = SumLayout::new(id, *k, &left.defining()?, &right.defining()?)?;
        layout.check_given(id, given)?;
        Ok(layout)
    }

    pub fn matroid(&self) -> Result<BinaryMatroid, DecompError> {
        Ok(self.defining()?.matroid())
    }

    pub fn glue_elements(&self) -> Result<GlueElements, DecompError> {
        self.layout()?.glue.ok_or_else(|| shape(self.id(), "a 1-sum has no glue elements"))
    }

    pub fn nodes(&self) -> Vec<&Node> {
        let mut out = vec![self];
        if let Some((l, r)) = self.children() {
            out.extend(l.nodes());
            out.extend(r.nodes());
        }
        out
    }

    pub fn leaves(&self) -> Vec<&Node> {
        self.nodes().into_iter().filter(|n| matches!(n, Node::Leaf { .. })).collect()
    }

    pub fn build_ef(&self) -> Result<ExtendedFormulation, DecompError> {
        self.build_ef_with(Execution::default())
    }

    /// Recursive construction: leaf formulations, then product, fixes and
    /// coupling at every sum node. Children are built independently.
    pub fn build_ef_with(&self, exec: Execution) -> Result<ExtendedFormulation, DecompError> {
        match self {
            Node::Leaf { kind, .. } => match kind {
                LeafKind::Graphic(g) => Ok(graphic_independence_ef(g)),
                LeafKind::Cographic(g) => Ok(cographic_independence_ef(g)),
                LeafKind::Small(_) => {
                    let d = self.defining()?;
                    let sets = d.matroid().enumerate_independent_sets(DEFAULT_ENUMERATION_CAP)?;
                    let points: Vec<Vec<bool>> = sets.iter().map(|s| (0..d.len()).map(|i| s.contains(i)).collect()).collect();
                    Ok(ExtendedFormulation::vrep_lift(&d.labels, &points)?)
                }
            },
            Node::Sum { left, right, .. } => {
                let (lef, ref_) = exec.join(|| left.build_ef_with(exec), || right.build_ef_with(exec));
                let (lef, ref_) = (lef?, ref_?);
                let layout = self.layout()?;
                let (ld, rd) = (left.defining()?, right.defining()?);
                compose_ef(&layout, &ld, &rd, &lef, &ref_)
            }
        }
    }

    /// Independent sets of the node's matroid, combined bottom-up from the
    /// leaves with the sum rule, sorted by bit mask.
    pub fn independent_sets_bottom_up(&self, rule: GlueRule) -> Result<Vec<ElementSet>, DecompError> {
        match self {
            Node::Leaf { .. } => {
                let mut sets = self.matroid()?.enumerate_independent_sets(DEFAULT_ENUMERATION_CAP)?;
                sets.sort_unstable();
                Ok(sets)
            }
            Node::Sum { left, right, .. } => {
                let layout = self.layout()?;
                let l = left.independent_sets_bottom_up(rule)?;
                let r = right.independent_sets_bottom_up(rule)?;
                Ok(combine_families(&layout, &l, &r, rule))
            }
        }
    }

    /// The sum rule applied to brute-force families of the two children.
    pub fn sum_independent_sets(&self, rule: GlueRule) -> Result<Vec<ElementSet>, DecompError> {
        let Some((left, right)) = self.children() else {
            return Err(shape(self.id(), "not a sum node"));
        };
        let layout = self.layout()?;
        let l = left.matroid()?.enumerate_independent_sets(DEFAULT_ENUMERATION_CAP)?;
        let r = right.matroid()?.enumerate_independent_sets(DEFAULT_ENUMERATION_CAP)?;
        Ok(combine_families(&layout, &l, &r, rule))
    }
}

/// Product of the prefixed child formulations, with the plan's fixes and
/// couplings applied.
pub fn compose_ef(
    layout: &SumLayout,
    left: &Defining,
    right: &Defining,
    left_ef: &ExtendedFormulation,
    right_ef: &ExtendedFormulation,
) -> Result<ExtendedFormulation, DecompError> {
    let ll = |i: usize| format!("{LEFT_PREFIX}{}", left.labels[i]);
    let rl = |i: usize| format!("{RIGHT_PREFIX}{}", right.labels[i]);
    let mut l = left_ef.with_prefix(LEFT_PREFIX);
    for &(i, v) in &layout.plan.left_fixes {
        l = l.fix_variable(&ll(i), v)?;
    }
    let mut r = right_ef.with_prefix(RIGHT_PREFIX);
    for &(i, v) in &layout.plan.right_fixes {
        r = r.fix_variable(&rl(i), v)?;
    }
    let pairs: Vec<(String, String)> = layout.plan.pairs.iter().map(|&(i, j)| (ll(i), rl(j))).collect();
    Ok(l.product(&r)?.couple(&pairs)?)
}

/// Filters a child family by the plan's fixes and groups it by the pattern
/// on the paired glue elements (bit `t` set when the set holds the `t`-th
/// pair's element). Each set is mapped into sum coordinates.
fn grouped(
    family: &[ElementSet],
    fixes: &[(usize, bool)],
    paired: &[usize],
    map: &[Option<usize>],
) -> HashMap<u32, Vec<ElementSet>> {
    let mut out: HashMap<u32, Vec<ElementSet>> = HashMap::new();
    for &s in family {
        if fixes.iter().any(|&(i, v)| s.contains(i) != v) {
            continue;
        }
        let key = paired.iter().enumerate().fold(0u32, |k, (t, &i)| if s.contains(i) { k | 1 << t } else { k });
        let mapped = ElementSet::from_indices(s.iter().filter_map(|i| map[i]));
        out.entry(key).or_default().push(mapped);
    }
    out
}

/// `{ I1' + I2' }` over independent pairs whose glue patterns satisfy the
/// rule on every coupled pair, after restricting to the plan's deletions
/// and contractions.
pub fn combine_families(layout: &SumLayout, left: &[ElementSet], right: &[ElementSet], rule: GlueRule) -> Vec<ElementSet> {
    let plan = &layout.plan;
    let lp: Vec<usize> = plan.pairs.iter().map(|p| p.0).collect();
    let rp: Vec<usize> = plan.pairs.iter().map(|p| p.1).collect();
    let lg = grouped(left, &plan.left_fixes, &lp, &layout.left_map);
    let rg = grouped(right, &plan.right_fixes, &rp, &layout.right_map);
    let full = (1u32 << plan.pairs.len()) - 1;
    let mut out = BTreeSet::new();
    for (&kl, ls) in &lg {
        for (&kr, rs) in &rg {
            let ok = match rule {
                GlueRule::ExactlyOne => kl ^ kr == full && kl & kr == 0,
                GlueRule::AtLeastOne => kl | kr == full,
            };
            if !ok {
                continue;
            }
            for &a in ls {
                for &b in rs {
                    out.insert(a.union(b));
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Row/column blocks of a matrix: components of the bipartite graph on rows
/// and columns joined by nonzero entries. Zero rows and columns are blocks
/// of their own. Blocks are ordered by their smallest row, then column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

pub fn find_1sums(m: &Gf2Matrix) -> Vec<Block> {
    let (p, q) = (m.num_rows(), m.num_cols());
    // Vertices 0..p are rows, p..p+q columns.
    let mut comp = vec![usize::MAX; p + q];
    let mut blocks = Vec::new();
    for s in 0..p + q {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        comp[s] = id;
        let mut block = Block { rows: Vec::new(), cols: Vec::new() };
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            let next: Vec<usize> = if x < p {
                block.rows.push(x);
                (0..q).filter(|&c| m.get(x, c)).map(|c| p + c).collect()
            } else {
                block.cols.push(x - p);
                (0..p).filter(|&r| m.get(r, x - p)).collect()
            };
            for y in next {
                if comp[y] == usize::MAX {
                    comp[y] = id;
                    stack.push(y);
                }
            }
        }
        block.rows.sort_unstable();
        block.cols.sort_unstable();
        blocks.push(block);
    }
    blocks
}

/// The leaf-size recursion: `g(1) = 1` and, for `n >= 2`, the maximum of
/// `n`, `g(t) + g(n-t)` for `3 <= t <= n-3`, `g(t+1) + g(n-t+1)` for
/// `2 <= t <= n-2`, and `g(t+3) + g(n-t+3)` for `4 <= t <= n-4`.
pub fn g_table(n_max: usize) -> Vec<u64> {
    let mut g = vec![0u64; n_max.max(1) + 1];
    g[1] = 1;
    for n in 2..=n_max {
        let mut best = n as u64;
        for t in 3..=n.saturating_sub(3) {
            best = best.max(g[t] + g[n - t]);
        }
        for t in 2..=n.saturating_sub(2) {
            best = best.max(g[t + 1] + g[n - t + 1]);
        }
        for t in 4..=n.saturating_sub(4) {
            best = best.max(g[t + 3] + g[n - t + 3]);
        }
        g[n] = best;
    }
    g
}

pub fn g_bound(n: usize) -> u64 {
    assert!(n >= 1, "g is defined for n >= 1");
    g_table(n)[n]
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeInfo {
    pub id: String,
    pub kind: String,
    pub ground_set: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
    pub nodes: Vec<NodeInfo>,
    pub root_ground_set: usize,
    pub leaf_total: usize,
    pub g_bound: u64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Shape checks (errors) and the cardinality conditions of the
/// decomposition theorem (warnings: leaves of at least 3 elements, 3-sum
/// children of at least 7), plus per-node ground-set sizes and the leaf
/// total against `g`.
pub fn validate(root: &Node) -> ValidationReport {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let mut nodes = Vec::new();
    for node in root.nodes() {
        let info = match node {
            Node::Leaf { id, kind } => node.defining().map(|d| {
                if d.len() < 3 {
                    warnings.push(format!("leaf `{id}` has {} elements, fewer than 3", d.len()));
                }
                NodeInfo { id: id.clone(), kind: kind.name().to_string(), ground_set: d.len(), case: None }
            }),
            Node::Sum { id, k, left, right, .. } => node.layout().map(|l| {
                if *k == 3 {
                    for child in [left, right] {
                        if let Ok(d) = child.defining() {
                            if d.len() < 7 {
                                warnings.push(format!(
                                    "3-sum `{id}` has child `{}` with {} elements, fewer than 7",
                                    child.id(),
                                    d.len()
                                ));
                            }
                        }
                    }
                }
                NodeInfo { id: id.clone(), kind: format!("{k}-sum"), ground_set: l.sum.len(), case: Some(l.plan.case) }
            }),
        };
        match info {
            Ok(i) => nodes.push(i),
            Err(e) => errors.push(e.to_string()),
        }
    }
    // Report only the first error along a failing path; ancestors of a bad
    // node repeat it.
    let mut seen = HashSet::new();
    errors.retain(|e| seen.insert(e.clone()));
    let root_size = nodes.first().filter(|n| n.id == root.id()).map_or(0, |n| n.ground_set);
    let leaf_total =
        root.leaves().iter().filter_map(|l| nodes.iter().find(|n| n.id == l.id())).map(|n| n.ground_set).sum();
    let g = if root_size >= 1 { g_bound(root_size) } else { 0 };
    if errors.is_empty() && leaf_total as u64 > g {
        warnings.push(format!("leaf total {leaf_total} exceeds g({root_size}) = {g}"));
    }
    ValidationReport { errors, warnings, nodes, root_ground_set: root_size, leaf_total, g_bound: g }
}
