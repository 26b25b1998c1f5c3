//! Deterministic sample decomposition trees: a desk-scale corpus covering
//! every leaf kind and every composition case, and a family of growing 1-/2-sum
//! trees of graphic leaves.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomp::{LeafKind, Node};
use crate::gf2::{Gf2Matrix, Gf2Vector};
use crate::graphic::{cographic_matrix, network_matrix, Graph};

#[derive(Debug, Clone)]
pub struct Sample {
    pub name: String,
    pub tree: Node,
}

fn sample(name: &str, tree: Node) -> Sample {
    Sample { name: name.to_string(), tree }
}

fn graphic(id: &str, g: Graph) -> Node {
    Node::leaf(id, LeafKind::Graphic(g))
}

fn cographic(id: &str, g: Graph) -> Node {
    Node::leaf(id, LeafKind::Cographic(g))
}

fn small(id: &str, cols: usize, rows: &[&str]) -> Node {
    Node::leaf(id, LeafKind::Small(Gf2Matrix::from_strs(cols, rows).expect("well-formed sample matrix")))
}

fn small_matrix(id: &str, m: Gf2Matrix) -> Node {
    Node::leaf(id, LeafKind::Small(m))
}

/// The 10-element regular matroid R10 in standard form.
pub fn r10() -> Gf2Matrix {
    Gf2Matrix::from_strs(5, &["11001", "11100", "01110", "00111", "10011"]).expect("R10")
}

/// Required zero/nonzero status of the glue vectors of a 3-sum side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Glue {
    Zero,
    Nonzero,
}

/// Whether `m` has the left 3-sum form `(a a A; 0 1 c^T)`.
pub fn left_3sum_shape(m: &Gf2Matrix, a: Glue) -> bool {
    let (p, q) = (m.num_rows(), m.num_cols());
    if p == 0 || q < 2 || m.get(p - 1, 0) || !m.get(p - 1, 1) {
        return false;
    }
    if (0..p - 1).any(|i| m.get(i, 0) != m.get(i, 1)) {
        return false;
    }
    let a_zero = (0..p - 1).all(|i| !m.get(i, 0));
    a_zero == (a == Glue::Zero)
}

/// Whether `m` has the right 3-sum form `(0 1 b^T; d d B)`.
pub fn right_3sum_shape(m: &Gf2Matrix, d: Glue) -> bool {
    let (p, q) = (m.num_rows(), m.num_cols());
    if p == 0 || q < 2 || m.get(0, 0) || !m.get(0, 1) {
        return false;
    }
    if (1..p).any(|i| m.get(i, 0) != m.get(i, 1)) {
        return false;
    }
    let d_zero = (1..p).all(|i| !m.get(i, 0));
    d_zero == (d == Glue::Zero)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Searches random graphs on `n` vertices with `m` edges until the
/// (co)graphic defining matrix fits the requested 3-sum side.
fn search_3sum_graph(rng: &mut ChaCha8Rng, cographic_leaf: bool, side: Side, n: usize, m: usize, glue: Glue) -> Graph {
    for _ in 0..200_000 {
        let g = Graph::random(rng, n, m, glue == Glue::Zero);
        let mat = if cographic_leaf { cographic_matrix(&g).0 } else { network_matrix(&g).0 };
        let ok = match side {
            Side::Left => left_3sum_shape(&mat, glue),
            Side::Right => right_3sum_shape(&mat, glue),
        };
        if ok {
            return g;
        }
    }
    panic!("no graph with {n} vertices and {m} edges fits the requested 3-sum form");
}

fn random_bits(rng: &mut ChaCha8Rng, len: usize, glue: Glue) -> Gf2Vector {
    loop {
        let v = Gf2Vector::from_bits(&(0..len).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
        if v.is_zero() == (glue == Glue::Zero) {
            return v;
        }
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, p: usize, q: usize) -> Gf2Matrix {
    let rows: Vec<Vec<bool>> = (0..p).map(|_| (0..q).map(|_| rng.gen_bool(0.5)).collect()).collect();
    Gf2Matrix::from_rows(q, &rows).expect("consistent shape")
}

/// `(a a A; 0 1 c^T)` with random `A` (`m1 x q1`) and `c`.
fn left_3sum_matrix(rng: &mut ChaCha8Rng, m1: usize, q1: usize, a: Glue) -> Gf2Matrix {
    let av = random_bits(rng, m1, a);
    let c = random_bits(rng, q1, Glue::Nonzero);
    let inner = random_matrix(rng, m1, q1);
    let mut m = Gf2Matrix::zeros(m1 + 1, q1 + 2);
    for i in 0..m1 {
        m.set(i, 0, av.get(i));
        m.set(i, 1, av.get(i));
        for j in 0..q1 {
            m.set(i, j + 2, inner.get(i, j));
        }
    }
    m.set(m1, 1, true);
    for j in 0..q1 {
        m.set(m1, j + 2, c.get(j));
    }
    m
}

/// `(0 1 b^T; d d B)` with random `B` (`m2 x q2`) and `b`.
fn right_3sum_matrix(rng: &mut ChaCha8Rng, m2: usize, q2: usize, d: Glue) -> Gf2Matrix {
    let dv = random_bits(rng, m2, d);
    let b = random_bits(rng, q2, Glue::Nonzero);
    let inner = random_matrix(rng, m2, q2);
    let mut m = Gf2Matrix::zeros(m2 + 1, q2 + 2);
    m.set(0, 1, true);
    for j in 0..q2 {
        m.set(0, j + 2, b.get(j));
    }
    for i in 0..m2 {
        m.set(i + 1, 0, dv.get(i));
        m.set(i + 1, 1, dv.get(i));
        for j in 0..q2 {
            m.set(i + 1, j + 2, inner.get(i, j));
        }
    }
    m
}

/// A graph whose network matrix has a zero first column: its first non-tree
/// edge is a loop.
fn graph_with_leading_loop() -> Graph {
    // BFS from 0 takes 0-1 and 0-2 as tree edges; the loop precedes the
    // chord 1-2 in edge order.
    Graph::from_pairs(3, &[(0, 1), (1, 1), (1, 2), (0, 2)]).expect("valid graph")
}

fn wheel(spokes: usize) -> Graph {
    let mut pairs: Vec<(usize, usize)> = (1..=spokes).map(|i| (0, i)).collect();
    pairs.extend((1..=spokes).map(|i| (i, i % spokes + 1)));
    Graph::from_pairs(spokes + 1, &pairs).expect("valid wheel")
}

/// The certification corpus: every tree has at most 12 root elements.
pub fn corpus() -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let k3 = || Graph::complete(3);
    let k4 = || Graph::complete(4);
    let mut out = vec![
        sample("graphic-k3", graphic("g", k3())),
        sample("graphic-k4", graphic("g", k4())),
        sample("cographic-k4", cographic("c", k4())),
        sample("cographic-wheel4", cographic("c", wheel(4))),
        sample("small-r10", small_matrix("r10", r10())),
        sample("sum1-k3-k3", Node::sum("s", 1, graphic("l", k3()), graphic("r", k3()))),
        sample("sum1-graphic-cographic", Node::sum("s", 1, graphic("l", k4()), cographic("r", k4()))),
        sample(
            "sum1-nested-small",
            Node::sum("s", 1, Node::sum("t", 1, graphic("l", k3()), cographic("m", k3())), small("r", 2, &["11", "01"])),
        ),
        sample("sum2-k4-k4", Node::sum("s", 2, graphic("l", k4()), graphic("r", k4()))),
        sample("sum2-cographic-graphic", Node::sum("s", 2, cographic("l", wheel(4)), graphic("r", k3()))),
        sample("sum2-small-graphic", Node::sum("s", 2, small("l", 3, &["101", "110", "011"]), graphic("r", k4()))),
        sample("sum2-r10-k3", Node::sum("s", 2, small_matrix("l", r10()), graphic("r", k3()))),
        sample("sum2-a0-small", Node::sum("s", 2, small("l", 3, &["011", "001", "010"]), graphic("r", k4()))),
        sample("sum2-a0-graphic-loop", Node::sum("s", 2, graphic("l", graph_with_leading_loop()), cographic("r", k4()))),
        sample(
            "sum2-nested",
            Node::sum("s", 2, Node::sum("t", 2, graphic("l", k4()), graphic("m", k3())), cographic("r", k3())),
        ),
    ];

    // Generic 3-sums fitted from random graphs.
    let gl = search_3sum_graph(&mut rng, false, Side::Left, 5, 9, Glue::Nonzero);
    let gr = search_3sum_graph(&mut rng, false, Side::Right, 5, 8, Glue::Nonzero);
    out.push(sample("sum3-graphic-graphic", Node::sum("s", 3, graphic("l", gl), graphic("r", gr))));
    let cl = search_3sum_graph(&mut rng, true, Side::Left, 4, 8, Glue::Nonzero);
    let gr = search_3sum_graph(&mut rng, false, Side::Right, 5, 9, Glue::Nonzero);
    out.push(sample("sum3-cographic-graphic", Node::sum("s", 3, cographic("l", cl), graphic("r", gr))));
    let gl = search_3sum_graph(&mut rng, false, Side::Left, 5, 8, Glue::Nonzero);
    let cr = search_3sum_graph(&mut rng, true, Side::Right, 4, 8, Glue::Nonzero);
    out.push(sample("sum3-graphic-cographic", Node::sum("s", 3, graphic("l", gl), cographic("r", cr))));

    // 3-sums of explicit matrices, including the degenerate glue cases.
    let cases = [
        ("sum3-small", Glue::Nonzero, Glue::Nonzero, (3, 3), (3, 2)),
        ("sum3-small-d0", Glue::Nonzero, Glue::Zero, (2, 3), (3, 3)),
        ("sum3-small-a0", Glue::Zero, Glue::Nonzero, (3, 2), (2, 3)),
        ("sum3-small-a0-d0", Glue::Zero, Glue::Zero, (2, 2), (2, 3)),
    ];
    for (name, a, d, (m1, q1), (m2, q2)) in cases {
        let l = left_3sum_matrix(&mut rng, m1, q1, a);
        let r = right_3sum_matrix(&mut rng, m2, q2, d);
        out.push(sample(name, Node::sum("s", 3, small_matrix("l", l), small_matrix("r", r))));
    }
    let gl = search_3sum_graph(&mut rng, false, Side::Left, 4, 7, Glue::Nonzero);
    let r = right_3sum_matrix(&mut rng, 2, 3, Glue::Zero);
    out.push(sample("sum3-graphic-small-d0", Node::sum("s", 3, graphic("l", gl), small_matrix("r", r))));

    // A 3-sum whose left child is itself a 2-sum.
    let inner = (0..200_000)
        .find_map(|_| {
            let t = Node::sum("t", 2, graphic("l", k3()), graphic("m", Graph::random(&mut rng, 4, 6, false)));
            let m = t.defining().ok()?.matrix;
            left_3sum_shape(&m, Glue::Nonzero).then_some(t)
        })
        .expect("a 2-sum of K3 and a 6-edge graph fits the left 3-sum form");
    let r = right_3sum_matrix(&mut rng, 3, 2, Glue::Nonzero);
    out.push(sample("sum3-over-sum2", Node::sum("s", 3, inner, small_matrix("r", r))));
    out
}

/// 1-/2-sum chains of random connected graphic leaves, with ground sets
/// between 10 and 60 elements.
pub fn scaling_family() -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xfa111);
    let mut out = Vec::new();
    for target in (12..=60).step_by(4) {
        let mut leaves = 0;
        let mut tree: Option<Node> = None;
        let mut size = 0;
        // Grow until the next leaf would overshoot the target.
        loop {
            let g = random_connected_graph(&mut rng, 4, 7);
            let e = g.edges().len();
            let k = if (leaves + 1) % 3 == 0 { 1 } else { 2 };
            let grown = if tree.is_none() { e } else if k == 1 { size + e } else { size + e - 2 };
            if grown > target {
                break;
            }
            let leaf = graphic(&format!("g{leaves}"), g);
            leaves += 1;
            size = grown;
            tree = Some(match tree {
                None => leaf,
                Some(t) => Node::sum(format!("s{leaves}"), k, t, leaf),
            });
        }
        out.push(sample(&format!("chain-{size}"), tree.expect("at least one leaf")));
    }
    out
}

/// A connected simple graph on `n` vertices: a random spanning tree plus
/// `extra` further edges.
fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (order[rng.gen_range(0..i)], order[i])).collect();
    while pairs.len() < m {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            pairs.push((u, v));
        }
    }
    pairs.shuffle(rng);
    Graph::from_pairs(n, &pairs).expect("valid graph")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::validate;

    #[test]
    fn corpus_is_valid_and_small() {
        let c = corpus();
        assert!(c.len() >= 20);
        for s in &c {
            let report = validate(&s.tree);
            assert!(report.is_valid(), "{}: {:?}", s.name, report.errors);
            assert!(report.root_ground_set <= 12, "{} has {} elements", s.name, report.root_ground_set);
        }
    }

    #[test]
    fn corpus_is_deterministic() {
        let a: Vec<Node> = corpus().into_iter().map(|s| s.tree).collect();
        let b: Vec<Node> = corpus().into_iter().map(|s| s.tree).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn scaling_family_spans_range() {
        let sizes: Vec<usize> = scaling_family().iter().map(|s| s.tree.defining().unwrap().len()).collect();
        assert!(sizes.iter().all(|n| (10..=60).contains(n)), "{sizes:?}");
        assert!(sizes.first().is_some_and(|&n| n <= 15));
        assert!(sizes.last().is_some_and(|&n| n >= 55));
    }
}
