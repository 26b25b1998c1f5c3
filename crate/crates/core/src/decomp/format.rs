//! Tree files. One declaration per line:
//!
//! ```text
//! leaf <id> graphic|cographic|small <file>
//! sum <id> k=<1|2|3> left=<id> right=<id> [a=<bits>] [b=<bits>] [c=<bits>] [d=<bits>] [A=<file>] [B=<file>]
//! root <id>
//! ```
//!
//! Paths are relative to the tree file. `#` starts a comment. Every declared
//! node must be reachable from the root exactly once.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use super::{DecompError, GivenGlue, LeafKind, Node};
use crate::gf2::{Gf2Matrix, Gf2Vector};
use crate::graphic::Graph;

enum Decl {
    Leaf { kind: String, path: String },
    Sum { k: u8, left: String, right: String, bits: HashMap<char, Gf2Vector>, blocks: HashMap<char, String> },
}

struct Parser<'a> {
    file: String,
    base: &'a Path,
    decls: HashMap<String, (usize, Decl)>,
}

impl Parser<'_> {
    fn err(&self, line: usize, msg: impl Into<String>) -> DecompError {
        DecompError::Parse { file: self.file.clone(), line, msg: msg.into() }
    }

    fn read(&self, rel: &str) -> Result<String, DecompError> {
        let path = self.base.join(rel);
        fs::read_to_string(&path).map_err(|e| DecompError::Io { path: path.display().to_string(), msg: e.to_string() })
    }

    fn load_graph(&self, rel: &str) -> Result<Graph, DecompError> {
        Graph::parse_text(&self.read(rel)?).map_err(|e| DecompError::Io { path: rel.to_string(), msg: e.to_string() })
    }

    fn load_matrix(&self, rel: &str) -> Result<Gf2Matrix, DecompError> {
        Gf2Matrix::parse_text(&self.read(rel)?).map_err(|e| DecompError::Io { path: rel.to_string(), msg: e.to_string() })
    }

    fn build(&self, id: &str, line: usize, stack: &mut Vec<String>, used: &mut HashSet<String>) -> Result<Node, DecompError> {
        let Some((decl_line, decl)) = self.decls.get(id) else {
            return Err(self.err(line, format!("unknown node `{id}`")));
        };
        if stack.iter().any(|s| s == id) {
            return Err(self.err(*decl_line, format!("cycle through node `{id}`")));
        }
        if !used.insert(id.to_string()) {
            return Err(self.err(*decl_line, format!("node `{id}` is referenced more than once")));
        }
        match decl {
            Decl::Leaf { kind, path } => {
                let at = |e: DecompError| self.err(*decl_line, e.to_string());
                let kind = match kind.as_str() {
                    "graphic" => LeafKind::Graphic(self.load_graph(path).map_err(at)?),
                    "cographic" => LeafKind::Cographic(self.load_graph(path).map_err(at)?),
                    "small" => LeafKind::Small(self.load_matrix(path).map_err(at)?),
                    other => return Err(self.err(*decl_line, format!("unknown leaf kind `{other}`"))),
                };
                Ok(Node::leaf(id, kind))
            }
            Decl::Sum { k, left, right, bits, blocks } => {
                let at = |e: DecompError| self.err(*decl_line, e.to_string());
                stack.push(id.to_string());
                let l = self.build(left, *decl_line, stack, used)?;
                let r = self.build(right, *decl_line, stack, used)?;
                stack.pop();
                let given = GivenGlue {
                    a: bits.get(&'a').cloned(),
                    b: bits.get(&'b').cloned(),
                    c: bits.get(&'c').cloned(),
                    d: bits.get(&'d').cloned(),
                    a_block: blocks.get(&'A').map(|p| self.load_matrix(p)).transpose().map_err(at)?,
                    b_block: blocks.get(&'B').map(|p| self.load_matrix(p)).transpose().map_err(at)?,
                };
                Ok(Node::Sum { id: id.to_string(), k: *k, left: Box::new(l), right: Box::new(r), given })
            }
        }
    }
}

pub fn parse_tree_file(path: &Path) -> Result<Node, DecompError> {
    let text = fs::read_to_string(path).map_err(|e| DecompError::Io { path: path.display().to_string(), msg: e.to_string() })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_tree_str(&text, base, &path.display().to_string())
}

/// Parses tree text whose relative paths resolve against `base`.
pub fn parse_tree_str(text: &str, base: &Path, file: &str) -> Result<Node, DecompError> {
    let mut p = Parser { file: file.to_string(), base, decls: HashMap::new() };
    let mut root: Option<(usize, String)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "root" => {
                let [_, id] = toks[..] else {
                    return Err(p.err(line, "expected `root <id>`"));
                };
                if root.is_some() {
                    return Err(p.err(line, "duplicate root declaration"));
                }
                root = Some((line, id.to_string()));
            }
            "leaf" => {
                let [_, id, kind, path] = toks[..] else {
                    return Err(p.err(line, "expected `leaf <id> <kind> <file>`"));
                };
                if !matches!(kind, "graphic" | "cographic" | "small") {
                    return Err(p.err(line, format!("unknown leaf kind `{kind}`")));
                }
                let decl = Decl::Leaf { kind: kind.to_string(), path: path.to_string() };
                if p.decls.insert(id.to_string(), (line, decl)).is_some() {
                    return Err(p.err(line, format!("duplicate node id `{id}`")));
                }
            }
            "sum" => {
                if toks.len() < 2 {
                    return Err(p.err(line, "expected `sum <id> k=.. left=.. right=..`"));
                }
                let id = toks[1];
                let mut fields: HashMap<&str, &str> = HashMap::new();
                for t in &toks[2..] {
                    let Some((key, value)) = t.split_once('=') else {
                        return Err(p.err(line, format!("expected key=value, got `{t}`")));
                    };
                    if !matches!(key, "k" | "left" | "right" | "a" | "b" | "c" | "d" | "A" | "B") {
                        return Err(p.err(line, format!("unknown field `{key}`")));
                    }
                    if fields.insert(key, value).is_some() {
                        return Err(p.err(line, format!("field `{key}` given twice")));
                    }
                }
                let need = |key: &str| fields.get(key).copied().ok_or_else(|| p.err(line, format!("missing `{key}=`")));
                let k: u8 = match need("k")? {
                    "1" => 1,
                    "2" => 2,
                    "3" => 3,
                    other => return Err(p.err(line, format!("k must be 1, 2 or 3, got `{other}`"))),
                };
                let (left, right) = (need("left")?.to_string(), need("right")?.to_string());
                let mut bits = HashMap::new();
                for key in ['a', 'b', 'c', 'd'] {
                    if let Some(v) = fields.get(key.to_string().as_str()) {
                        let vec = Gf2Vector::parse_bits(v).map_err(|e| p.err(line, format!("{key}=: {e}")))?;
                        bits.insert(key, vec);
                    }
                }
                let mut blocks = HashMap::new();
                for key in ['A', 'B'] {
                    if let Some(v) = fields.get(key.to_string().as_str()) {
                        blocks.insert(key, v.to_string());
                    }
                }
                let decl = Decl::Sum { k, left, right, bits, blocks };
                if p.decls.insert(id.to_string(), (line, decl)).is_some() {
                    return Err(p.err(line, format!("duplicate node id `{id}`")));
                }
            }
            other => return Err(p.err(line, format!("unknown declaration `{other}`"))),
        }
    }
    let (root_line, root_id) = root.ok_or_else(|| p.err(text.lines().count().max(1), "missing `root <id>`"))?;
    let mut used = HashSet::new();
    let node = p.build(&root_id, root_line, &mut Vec::new(), &mut used)?;
    let mut unused: Vec<(&usize, &String)> =
        p.decls.iter().filter(|(id, _)| !used.contains(*id)).map(|(id, (l, _))| (l, id)).collect();
    unused.sort();
    if let Some((line, id)) = unused.first() {
        return Err(p.err(**line, format!("node `{id}` is not reachable from the root")));
    }
    Ok(node)
}

fn write(path: &Path, text: &str) -> Result<(), DecompError> {
    fs::write(path, text).map_err(|e| DecompError::Io { path: path.display().to_string(), msg: e.to_string() })
}

/// Writes a tree file `<dir>/<stem>.tree` plus one file per leaf and per
/// sum block. Sum lines carry the derived glue vectors and blocks, so the
/// file documents itself and is checked again on reading.
pub fn write_tree_files(dir: &Path, stem: &str, root: &Node) -> Result<PathBuf, DecompError> {
    fs::create_dir_all(dir).map_err(|e| DecompError::Io { path: dir.display().to_string(), msg: e.to_string() })?;
    let mut lines = Vec::new();
    let mut nodes = root.nodes();
    nodes.reverse();
    for node in nodes {
        match node {
            Node::Leaf { id, kind } => {
                let (ext, text) = match kind {
                    LeafKind::Graphic(g) | LeafKind::Cographic(g) => ("graph", g.to_text()),
                    LeafKind::Small(m) => ("mat", m.to_text()),
                };
                let name = format!("{stem}.{id}.{ext}");
                write(&dir.join(&name), &text)?;
                lines.push(format!("leaf {id} {} {name}", kind.name()));
            }
            Node::Sum { id, k, left, right, .. } => {
                let layout = node.layout()?;
                let mut line = format!("sum {id} k={k} left={} right={}", left.id(), right.id());
                let vectors: &[(&str, &Gf2Vector)] = match k {
                    1 => &[],
                    2 => &[("a", &layout.a), ("b", &layout.b)],
                    _ => &[("a", &layout.a), ("b", &layout.b), ("c", &layout.c), ("d", &layout.d)],
                };
                for (key, v) in vectors {
                    if !v.is_empty() {
                        line.push_str(&format!(" {key}={}", v.to_bit_string()));
                    }
                }
                for (key, m) in [("A", &layout.a_block), ("B", &layout.b_block)] {
                    if m.num_rows() + m.num_cols() > 0 {
                        let name = format!("{stem}.{id}.{key}.mat");
                        write(&dir.join(&name), &m.to_text())?;
                        line.push_str(&format!(" {key}={name}"));
                    }
                }
                lines.push(line);
            }
        }
    }
    lines.push(format!("root {}", root.id()));
    let path = dir.join(format!("{stem}.tree"));
    write(&path, &(lines.join("\n") + "\n"))?;
    Ok(path)
}
