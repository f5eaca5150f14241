//! Freudenthal ends of locally finite simplicial trees given as finite
//! presentations: a finite tree with unit edges, plus marked vertices from
//! which an infinite ray leaves.
//!
//! Unit edges put vertex `v` at integer depth `n`, i.e. level `e^{-n}`. Only
//! comparisons of depths matter, so the tree is presented with the
//! order-isomorphic rational levels `2^{-n}` and every level read back out is
//! reported as the integer `n`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::duality::ends_of;
use crate::error::{Error, Result};
use crate::rational::{Level, Rational};
use crate::tree::{LeafKind, NodeId, NodeSpec, TreePresentation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialTreeInput {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub root: Option<String>,
    /// One entry per infinite ray; a vertex may carry several.
    #[serde(default)]
    pub rays: Vec<String>,
}

impl SimplicialTreeInput {
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        Ok(serde_json::from_value(value.clone())?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreudenthalReport {
    pub root: String,
    pub end_count: usize,
    /// Ray names `vertex#k`, in the order of the matrix.
    pub ends: Vec<String>,
    /// `depths[i][j]` is the depth at which rays `i` and `j` separate; the
    /// end-space distance is `e^{-depths[i][j]}`. `None` on the diagonal.
    pub depths: Vec<Vec<Option<u32>>>,
    /// The same matrix as strings: `0` on the diagonal, else `e^-n`.
    pub distances: Vec<Vec<String>>,
    pub compact: bool,
    pub summary: String,
}

fn ray_name(vertex: &str, k: usize) -> String {
    format!("{vertex}#{k}")
}

/// Dyadic stand-in for the level `e^{-depth}`.
fn dyadic(depth: u32) -> Level {
    Level::new(Rational::new(1.into(), num_bigint::BigInt::from(1) << depth)).expect("positive")
}

fn depth_of(level: &Rational) -> u32 {
    let d = level.denom();
    (d.bits() - 1) as u32
}

/// Builds the rooted level presentation of the input: vertices become nodes
/// at their depth, each ray marker becomes a RAY child one step deeper, and
/// childless vertices without rays become TIPs.
pub fn presentation(input: &SimplicialTreeInput) -> Result<(TreePresentation, String)> {
    let n = input.vertices.len();
    if n == 0 {
        return Err(Error::InvalidSimplicial("no vertices".into()));
    }
    let mut index = HashMap::new();
    for (i, v) in input.vertices.iter().enumerate() {
        if index.insert(v.as_str(), i).is_some() {
            return Err(Error::InvalidSimplicial(format!("duplicate vertex `{v}`")));
        }
    }
    let lookup = |v: &str| index.get(v).copied().ok_or_else(|| Error::InvalidSimplicial(format!("unknown vertex `{v}`")));
    let mut adj = vec![Vec::new(); n];
    for (a, b) in &input.edges {
        let (i, j) = (lookup(a)?, lookup(b)?);
        if i == j {
            return Err(Error::InvalidSimplicial(format!("loop at `{a}`: the input is cyclic")));
        }
        adj[i].push(j);
        adj[j].push(i);
    }
    let root = match &input.root {
        Some(r) => lookup(r)?,
        None => 0,
    };
    let mut depth = vec![None; n];
    let mut parent = vec![None; n];
    let mut order = Vec::with_capacity(n);
    depth[root] = Some(0u32);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &adj[v] {
            if depth[w].is_none() {
                depth[w] = Some(depth[v].expect("visited") + 1);
                parent[w] = Some(v);
                queue.push_back(w);
            }
        }
    }
    if order.len() < n {
        let missing = (0..n).find(|&v| depth[v].is_none()).expect("unvisited vertex");
        return Err(Error::InvalidSimplicial(format!(
            "disconnected: `{}` is unreachable from `{}`",
            input.vertices[missing], input.vertices[root]
        )));
    }
    if input.edges.len() != n - 1 {
        return Err(Error::InvalidSimplicial(format!(
            "cyclic: {} edges on {} connected vertices",
            input.edges.len(),
            n
        )));
    }

    let mut rays: BTreeMap<usize, usize> = BTreeMap::new();
    for r in &input.rays {
        *rays.entry(lookup(r)?).or_default() += 1;
    }
    let mut specs: Vec<NodeSpec> = (0..n)
        .map(|v| NodeSpec {
            id: NodeId(v as u64),
            level: dyadic(depth[v].expect("connected")),
            children: Vec::new(),
            leaf: None,
            label: None,
        })
        .collect();
    for &v in &order {
        if let Some(p) = parent[v] {
            specs[p].children.push(NodeId(v as u64));
        }
    }
    let mut next = n as u64;
    for (&v, &count) in &rays {
        for k in 0..count {
            specs.push(NodeSpec {
                id: NodeId(next),
                level: dyadic(depth[v].expect("connected") + 1),
                children: Vec::new(),
                leaf: Some(LeafKind::Ray),
                label: Some(ray_name(&input.vertices[v], k)),
            });
            specs[v].children.push(NodeId(next));
            next += 1;
        }
    }
    for (v, spec) in specs.iter_mut().enumerate().take(n) {
        if v != root && spec.children.is_empty() {
            spec.leaf = Some(LeafKind::Tip);
        }
    }
    Ok((TreePresentation::from_specs(specs)?, input.vertices[root].clone()))
}

/// Roots, prunes and reports the end space of a simplicial tree.
pub fn freudenthal(input: &SimplicialTreeInput) -> Result<FreudenthalReport> {
    let (tree, root) = presentation(input)?;
    let pruned = match tree.prune() {
        Ok(p) => p,
        Err(Error::TrivialTree) => {
            return Ok(FreudenthalReport {
                root,
                end_count: 0,
                ends: Vec::new(),
                depths: Vec::new(),
                distances: Vec::new(),
                compact: true,
                summary: "0 ends: compact, trivial proper homotopy type".into(),
            })
        }
        Err(e) => return Err(e),
    };
    let view = ends_of(&pruned)?;
    let mut order: Vec<usize> = (0..view.space.len()).collect();
    order.sort_by(|&a, &b| view.space.label(a).cmp(view.space.label(b)));
    let ends: Vec<String> = order.iter().map(|&i| view.space.label(i).to_string()).collect();
    let depths: Vec<Vec<Option<u32>>> = order
        .iter()
        .map(|&i| {
            order.iter().map(|&j| (i != j).then(|| depth_of(view.space.distance(i, j)))).collect()
        })
        .collect();
    let distances = depths
        .iter()
        .map(|row| row.iter().map(|d| d.map_or_else(|| "0".to_string(), |n| format!("e^-{n}"))).collect())
        .collect();
    let end_count = ends.len();
    Ok(FreudenthalReport {
        root,
        end_count,
        ends,
        depths,
        distances,
        compact: false,
        summary: format!("{end_count} end{}", if end_count == 1 { "" } else { "s" }),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreudenthalComparison {
    pub ends: (usize, usize),
    pub equivalent: bool,
    pub note: String,
}

/// Proper homotopy comparison: the pruned end spaces are finite discrete
/// spaces, which are homeomorphic exactly when they have the same number of
/// points.
pub fn compare(a: &SimplicialTreeInput, b: &SimplicialTreeInput) -> Result<FreudenthalComparison> {
    let (x, y) = (freudenthal(a)?.end_count, freudenthal(b)?.end_count);
    Ok(FreudenthalComparison {
        ends: (x, y),
        equivalent: x == y,
        note: "finite discrete end spaces are homeomorphic iff they are in bijection; compared by end count".into(),
    })
}
