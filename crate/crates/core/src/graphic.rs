//! Graphs, their network-matrix representations, and the spanning-forest,
//! graphic and cographic formulations built on Martin's flow system.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write;

use rand::Rng;

use crate::extform::{ExtendedFormulation, Sense};
use crate::gf2::Gf2Matrix;
use crate::matroid::BinaryMatroid;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("edge `{label}` has endpoint {vertex}, but the graph has {n} vertices")]
    EndpointOutOfRange { label: String, vertex: usize, n: usize },
    #[error("duplicate edge label `{0}`")]
    DuplicateLabel(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub label: String,
    pub u: usize,
    pub v: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

/// Undirected multigraph on vertices `0..n`. Loops and parallel edges are
/// allowed; edge labels are distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(num_vertices: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut seen = HashSet::new();
        for e in &edges {
            for x in [e.u, e.v] {
                if x >= num_vertices {
                    return Err(GraphError::EndpointOutOfRange { label: e.label.clone(), vertex: x, n: num_vertices });
                }
            }
            if !seen.insert(e.label.as_str()) {
                return Err(GraphError::DuplicateLabel(e.label.clone()));
            }
        }
        Ok(Self { num_vertices, edges })
    }

    /// Edges labelled `e1, e2, ...` in the given order.
    pub fn from_pairs(num_vertices: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let edges = pairs
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| Edge { label: format!("e{}", i + 1), u, v })
            .collect();
        Self::new(num_vertices, edges)
    }

    pub fn complete(n: usize) -> Self {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self::from_pairs(n, &pairs).expect("valid complete graph")
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn labels(&self) -> Vec<String> {
        self.edges.iter().map(|e| e.label.clone()).collect()
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut comp = vec![usize::MAX; self.num_vertices];
        let mut out = Vec::new();
        for s in 0..self.num_vertices {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &(_, y) in &adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = id;
                        members.push(y);
                        stack.push(y);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// `adj[x]` lists `(edge index, other endpoint)` in edge order; loops are
    /// left out.
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.num_vertices];
        for (i, e) in self.edges.iter().enumerate() {
            if !e.is_loop() {
                adj[e.u].push((i, e.v));
                adj[e.v].push((i, e.u));
            }
        }
        adj
    }

    /// Text format: `n m`, then `m` lines `label u v`. `#` starts a comment.
    pub fn parse_text(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line, msg: &str| GraphError::Parse { line, msg: msg.to_string() };
        let (hl, header) = lines.next().ok_or_else(|| err(1, "missing `n m` header"))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(hl, "header must be two nonnegative integers")))
            .collect::<Result<_, _>>()?;
        let [n, m] = nums[..] else {
            return Err(err(hl, "header must be two nonnegative integers"));
        };
        let mut edges = Vec::with_capacity(m);
        for (ln, line) in lines.by_ref() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [label, u, v] = toks[..] else {
                return Err(err(ln, "edge lines are `label u v`"));
            };
            let parse = |t: &str| t.parse::<usize>().map_err(|_| err(ln, "endpoints must be vertex indices"));
            let (u, v) = (parse(u)?, parse(v)?);
            for x in [u, v] {
                if x >= n {
                    return Err(err(ln, &format!("vertex {x} out of range for {n} vertices")));
                }
            }
            edges.push(Edge { label: label.to_string(), u, v });
            if edges.len() > m {
                return Err(err(ln, &format!("more than the declared {m} edges")));
            }
        }
        if edges.len() != m {
            return Err(err(hl, &format!("declared {m} edges, found {}", edges.len())));
        }
        if n == 0 && m == 0 {
            return Err(err(hl, "empty graph"));
        }
        Self::new(n, edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.num_vertices, self.edges.len());
        for e in &self.edges {
            let _ = writeln!(s, "{} {} {}", e.label, e.u, e.v);
        }
        s
    }

    /// Uniform random multigraph with `m` edges on `n` vertices.
    pub fn random<R: Rng>(rng: &mut R, n: usize, m: usize, allow_loops: bool) -> Self {
        let pairs: Vec<(usize, usize)> = (0..m)
            .map(|_| loop {
                let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if allow_loops || u != v || n == 1 {
                    break (u, v);
                }
            })
            .collect();
        Self::from_pairs(n, &pairs).expect("endpoints in range")
    }
}

/// Breadth-first spanning forest: for each component (lowest vertex first)
/// a BFS from its smallest vertex. Returns tree edge indices in discovery
/// order and, per vertex, its parent edge.
fn bfs_forest(g: &Graph) -> (Vec<usize>, Vec<Option<(usize, usize)>>, Vec<usize>) {
    let adj = g.adjacency();
    let n = g.num_vertices;
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    let mut tree = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &(e, y) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((e, x));
                    depth[y] = depth[x] + 1;
                    tree.push(e);
                    queue.push_back(y);
                }
            }
        }
    }
    (tree, parent, depth)
}

/// GF(2) network matrix with respect to a BFS spanning forest `T`: rows are
/// tree edges in discovery order, columns the remaining edges in edge order,
/// and entry `(t, e)` is set when the tree path between the ends of `e` uses
/// `t`. Loops give zero columns. The returned labels are tree labels then
/// non-tree labels, matching the element order of `(I | N)`.
pub fn network_matrix(g: &Graph) -> (Gf2Matrix, Vec<String>) {
    let (tree, parent, depth) = bfs_forest(g);
    let mut row_of = vec![usize::MAX; g.edges.len()];
    for (r, &e) in tree.iter().enumerate() {
        row_of[e] = r;
    }
    let non_tree: Vec<usize> = (0..g.edges.len()).filter(|&e| row_of[e] == usize::MAX).collect();
    let mut m = Gf2Matrix::zeros(tree.len(), non_tree.len());
    for (c, &e) in non_tree.iter().enumerate() {
        let (mut u, mut v) = (g.edges[e].u, g.edges[e].v);
        while u != v {
            if depth[u] < depth[v] {
                std::mem::swap(&mut u, &mut v);
            }
            let (pe, pu) = parent[u].expect("non-root vertex has a parent");
            m.set(row_of[pe], c, true);
            u = pu;
        }
    }
    let labels = tree.iter().chain(&non_tree).map(|&e| g.edges[e].label.clone()).collect();
    (m, labels)
}

/// The cycle matroid `M(G)` in network-matrix element order.
pub fn graphic_matroid(g: &Graph) -> BinaryMatroid {
    let (m, labels) = network_matrix(g);
    BinaryMatroid::from_matrix(&m, Some(labels)).expect("edge labels are distinct")
}

/// Defining matrix of the bond matroid `M*(G)`: the transposed network
/// matrix, whose identity block is the non-tree edges.
pub fn cographic_matrix(g: &Graph) -> (Gf2Matrix, Vec<String>) {
    let (m, labels) = network_matrix(g);
    let p = m.num_rows();
    let dual_labels = labels[p..].iter().chain(&labels[..p]).cloned().collect();
    (m.transpose(), dual_labels)
}

pub fn cographic_matroid(g: &Graph) -> BinaryMatroid {
    let (m, labels) = cographic_matrix(g);
    BinaryMatroid::from_matrix(&m, Some(labels)).expect("edge labels are distinct")
}

fn one() -> Rational {
    Rational::one()
}

/// Martin's formulation of the spanning-forest polytope, one block per
/// component with at least two vertices. For every root `k` of a component,
/// `z[k](i->j)` orients the chosen tree towards `k`: each non-root vertex
/// has one outgoing unit and the root none. Projected variables are the edge
/// variables, labelled by edge labels, in edge order.
///
/// Inequalities: `z >= 0` for both orientations of every edge and root, and
/// `x <= 1`, i.e. exactly `2|V_H||E_H| + |E_H|` per component. `x >= 0` is
/// implied by `x = z + z'` and is not written.
pub fn spanning_forest_ef(g: &Graph) -> ExtendedFormulation {
    let mut ef = ExtendedFormulation::new();
    let xs: Vec<usize> = g
        .edges
        .iter()
        .map(|e| ef.add_projected(format!("x({})", e.label), e.label.clone()).expect("edge labels are distinct"))
        .collect();
    for (i, e) in g.edges.iter().enumerate() {
        if e.is_loop() {
            ef.add_equation(vec![(xs[i], one())], Rational::zero()).expect("own variable");
        }
    }
    let adj = g.adjacency();
    for comp in g.components() {
        if comp.len() < 2 {
            continue;
        }
        let in_comp: HashSet<usize> = comp.iter().copied().collect();
        let comp_edges: Vec<usize> =
            (0..g.edges.len()).filter(|&i| !g.edges[i].is_loop() && in_comp.contains(&g.edges[i].u)).collect();
        ef.add_equation(comp_edges.iter().map(|&e| (xs[e], one())).collect(), Rational::from(comp.len() - 1))
            .expect("own variables");
        for &k in &comp {
            // fwd[e] orients u -> v, bwd[e] orients v -> u.
            let mut fwd = vec![usize::MAX; g.edges.len()];
            let mut bwd = vec![usize::MAX; g.edges.len()];
            for &e in &comp_edges {
                let label = &g.edges[e].label;
                fwd[e] = ef.add_auxiliary(format!("z[{k}]({label}+)"));
                bwd[e] = ef.add_auxiliary(format!("z[{k}]({label}-)"));
                ef.add_equation(vec![(fwd[e], one()), (bwd[e], one()), (xs[e], -one())], Rational::zero())
                    .expect("own variables");
                for z in [fwd[e], bwd[e]] {
                    ef.add_inequality(vec![(z, one())], Sense::Ge, Rational::zero()).expect("own variable");
                }
            }
            for &i in &comp {
                let out: Vec<(usize, Rational)> = adj[i]
                    .iter()
                    .map(|&(e, _)| (if g.edges[e].u == i { fwd[e] } else { bwd[e] }, one()))
                    .collect();
                let rhs = if i == k { Rational::zero() } else { one() };
                ef.add_equation(out, rhs).expect("own variables");
            }
        }
        for &e in &comp_edges {
            ef.add_inequality(vec![(xs[e], one())], Sense::Le, one()).expect("own variable");
        }
    }
    ef
}

/// `{x >= 0 : x <= y for a spanning-forest point y}`.
pub fn graphic_independence_ef(g: &Graph) -> ExtendedFormulation {
    spanning_forest_ef(g).monotonize()
}

/// `{x >= 0 : x <= 1 - y for a spanning-forest point y}`.
pub fn cographic_independence_ef(g: &Graph) -> ExtendedFormulation {
    spanning_forest_ef(g).affine_complement()
}
