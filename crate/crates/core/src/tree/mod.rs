//! Finite presentations of rooted R-trees in level coordinates.
//!
//! A presentation is a rooted tree of nodes, each carrying a [`Level`]. Levels
//! strictly decrease from parent to child (depth increases). Leaves are tagged
//! either [`LeafKind::Ray`], a branch continuing to infinite depth, or
//! [`LeafKind::Tip`], a branch ending at the leaf's level. The level stored on
//! a RAY leaf is only a marker on the ray and carries no metric information.
//!
//! Points are `(carrier leaf, level)` pairs; two pairs denote the same point
//! when their carriers have not yet separated at that level.

mod canonical;
mod cut;
mod dot;
mod metric;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{rat, Level};

pub use canonical::{canonical_encoding, Correspondence};
pub use cut::Component;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LeafKind {
    #[serde(rename = "RAY")]
    Ray,
    #[serde(rename = "TIP")]
    Tip,
}

/// Construction input for one node of a presentation.
#[derive(Clone, Debug)]
pub struct NodeSpec {
    pub id: NodeId,
    pub level: Level,
    pub children: Vec<NodeId>,
    pub leaf: Option<LeafKind>,
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    id: NodeId,
    level: Level,
    parent: Option<usize>,
    children: Vec<usize>,
    kind: Option<LeafKind>,
    label: Option<String>,
    hops: usize,
}

impl Node {
    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn kind(&self) -> Option<LeafKind> {
        self.kind
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// A validated finite rooted tree presentation.
#[derive(Clone, Debug)]
pub struct TreePresentation {
    nodes: Vec<Node>,
    root: usize,
    index: HashMap<NodeId, usize>,
}

impl PartialEq for TreePresentation {
    fn eq(&self, other: &Self) -> bool {
        self.to_json() == other.to_json()
    }
}

impl Eq for TreePresentation {}

/// A point of a presented tree: the point at `level` on the root-to-leaf
/// branch of `carrier`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TreePoint {
    pub carrier: NodeId,
    pub level: Level,
}

impl TreePoint {
    pub fn new(carrier: NodeId, level: Level) -> Self {
        TreePoint { carrier, level }
    }
}

impl fmt::Display for TreePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.carrier, self.level)
    }
}

/// Floating-point tolerance attached to every [`ApproxPoint`].
pub const APPROX_TOLERANCE: f64 = 1e-12;

/// A point whose level left the rationals (geodesic interpolation).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ApproxPoint {
    pub carrier: NodeId,
    pub level: f64,
}

impl ApproxPoint {
    pub fn from_exact(p: &TreePoint) -> Self {
        ApproxPoint { carrier: p.carrier, level: p.level.to_f64() }
    }
}

#[derive(Serialize, Deserialize)]
struct NodeJson {
    id: u64,
    level: Level,
    #[serde(default)]
    children: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    nodes: Vec<NodeJson>,
    #[serde(default)]
    leaves: BTreeMap<String, LeafKind>,
}

impl TreePresentation {
    /// Validates and assembles a presentation. The root is the unique node
    /// that is nobody's child.
    pub fn from_specs(specs: Vec<NodeSpec>) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::InvalidTree("no nodes".into()));
        }
        let mut index = HashMap::with_capacity(specs.len());
        for (i, s) in specs.iter().enumerate() {
            if index.insert(s.id, i).is_some() {
                return Err(Error::InvalidTree(format!("duplicate node id {}", s.id)));
            }
        }
        let mut parent: Vec<Option<usize>> = vec![None; specs.len()];
        for (i, s) in specs.iter().enumerate() {
            for c in &s.children {
                let ci = *index.get(c).ok_or(Error::UnknownNode(*c))?;
                if parent[ci].replace(i).is_some() || ci == i {
                    return Err(Error::InvalidTree(format!("node {c} has more than one parent")));
                }
            }
        }
        let roots: Vec<usize> = (0..specs.len()).filter(|&i| parent[i].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidTree(format!(
                "expected exactly one root, found {}",
                roots.len()
            )));
        }
        let root = roots[0];
        if !specs[root].level.is_root() {
            return Err(Error::InvalidTree(format!(
                "root level must be 1, found {}",
                specs[root].level
            )));
        }

        let mut nodes: Vec<Node> = specs
            .iter()
            .enumerate()
            .map(|(i, s)| Node {
                id: s.id,
                level: s.level.clone(),
                parent: parent[i],
                children: s.children.iter().map(|c| index[c]).collect(),
                kind: s.leaf,
                label: s.label.clone(),
                hops: 0,
            })
            .collect();

        // Reachability and hop depths; cycles would leave nodes unvisited.
        let mut visited = 0usize;
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            visited += 1;
            let children = nodes[i].children.clone();
            for c in children {
                if nodes[c].level >= nodes[i].level {
                    return Err(Error::InvalidTree(format!(
                        "child {} level {} is not below parent {} level {}",
                        nodes[c].id, nodes[c].level, nodes[i].id, nodes[i].level
                    )));
                }
                nodes[c].hops = nodes[i].hops + 1;
                stack.push(c);
            }
        }
        if visited != nodes.len() {
            return Err(Error::InvalidTree("some nodes are unreachable from the root".into()));
        }

        for (i, n) in nodes.iter().enumerate() {
            match (n.children.is_empty(), n.kind, i == root) {
                (true, None, false) => {
                    return Err(Error::InvalidTree(format!("leaf {} has no RAY/TIP tag", n.id)))
                }
                (false, Some(_), _) => {
                    return Err(Error::InvalidTree(format!("internal node {} is tagged as a leaf", n.id)))
                }
                (_, Some(_), true) => {
                    return Err(Error::InvalidTree("the root cannot be tagged".into()))
                }
                _ => {}
            }
        }
        let mut labels = HashSet::new();
        for n in &nodes {
            if let Some(l) = &n.label {
                if !labels.insert(l.as_str()) {
                    return Err(Error::InvalidTree(format!("duplicate label `{l}`")));
                }
            }
        }
        Ok(TreePresentation { nodes, root, index })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: TreeJson = serde_json::from_value(value.clone())?;
        let mut tags = HashMap::new();
        for (k, v) in raw.leaves {
            let id: u64 = k
                .trim()
                .parse()
                .map_err(|_| Error::Malformed(format!("leaf key `{k}` is not a node id")))?;
            tags.insert(NodeId(id), v);
        }
        let known: HashSet<NodeId> = raw.nodes.iter().map(|n| NodeId(n.id)).collect();
        if let Some(stray) = tags.keys().find(|k| !known.contains(k)) {
            return Err(Error::UnknownNode(*stray));
        }
        let specs = raw
            .nodes
            .into_iter()
            .map(|n| NodeSpec {
                id: NodeId(n.id),
                level: n.level,
                children: n.children.into_iter().map(NodeId).collect(),
                leaf: tags.get(&NodeId(n.id)).copied(),
                label: n.label,
            })
            .collect();
        Self::from_specs(specs)
    }

    /// JSON with nodes listed in preorder.
    pub fn to_json(&self) -> serde_json::Value {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        let mut leaves = BTreeMap::new();
        for i in self.preorder_indices() {
            let n = &self.nodes[i];
            nodes.push(NodeJson {
                id: n.id.0,
                level: n.level.clone(),
                children: n.children.iter().map(|&c| self.nodes[c].id.0).collect(),
                label: n.label.clone(),
            });
            if let Some(k) = n.kind {
                leaves.insert(n.id.0.to_string(), k);
            }
        }
        serde_json::to_value(TreeJson { nodes, leaves }).expect("tree serializes")
    }

    /// Specs in preorder, for rebuilding modified copies.
    pub fn to_specs(&self) -> Vec<NodeSpec> {
        self.preorder_indices()
            .into_iter()
            .map(|i| {
                let n = &self.nodes[i];
                NodeSpec {
                    id: n.id,
                    level: n.level.clone(),
                    children: n.children.iter().map(|&c| self.nodes[c].id).collect(),
                    leaf: n.kind,
                    label: n.label.clone(),
                }
            })
            .collect()
    }

    pub(crate) fn preorder_indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(i) = stack.pop() {
            out.push(i);
            stack.extend(self.nodes[i].children.iter().rev());
        }
        out
    }

    pub(crate) fn idx(&self, id: NodeId) -> Result<usize> {
        self.index.get(&id).copied().ok_or(Error::UnknownNode(id))
    }

    pub(crate) fn node_at(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub(crate) fn children_idx(&self, i: usize) -> &[usize] {
        &self.nodes[i].children
    }

    pub(crate) fn root_idx(&self) -> usize {
        self.root
    }

    pub fn root(&self) -> NodeId {
        self.nodes[self.root].id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> Result<&Node> {
        Ok(&self.nodes[self.idx(id)?])
    }

    pub fn children(&self, id: NodeId) -> Result<Vec<NodeId>> {
        let i = self.idx(id)?;
        Ok(self.nodes[i].children.iter().map(|&c| self.nodes[c].id).collect())
    }

    pub fn parent(&self, id: NodeId) -> Result<Option<NodeId>> {
        let i = self.idx(id)?;
        Ok(self.nodes[i].parent.map(|p| self.nodes[p].id))
    }

    /// All nodes in preorder.
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.preorder_indices().into_iter().map(move |i| &self.nodes[i])
    }

    /// Tagged leaves in preorder.
    pub fn leaves(&self) -> Vec<NodeId> {
        self.nodes().filter(|n| n.kind.is_some()).map(|n| n.id).collect()
    }

    pub fn ray_leaves(&self) -> Vec<NodeId> {
        self.nodes().filter(|n| n.kind == Some(LeafKind::Ray)).map(|n| n.id).collect()
    }

    pub fn leaf_kind(&self, id: NodeId) -> Result<Option<LeafKind>> {
        Ok(self.node(id)?.kind)
    }

    pub fn leaf_by_label(&self, label: &str) -> Option<NodeId> {
        self.nodes.iter().find(|n| n.kind.is_some() && n.label.as_deref() == Some(label)).map(|n| n.id)
    }

    /// Label of a leaf used when exporting its end: the explicit label, or the
    /// node id.
    pub fn end_label(&self, id: NodeId) -> Result<String> {
        let n = self.node(id)?;
        Ok(n.label.clone().unwrap_or_else(|| id.0.to_string()))
    }

    /// The single-node tree with empty end space.
    pub fn is_trivial(&self) -> bool {
        self.nodes[self.root].children.is_empty()
    }

    /// True iff the tree is nontrivial and has no TIP leaf.
    pub fn is_geodesically_complete(&self) -> bool {
        !self.is_trivial() && self.nodes.iter().all(|n| n.kind != Some(LeafKind::Tip))
    }

    pub fn require_complete(&self) -> Result<()> {
        if self.is_trivial() {
            return Err(Error::TrivialTree);
        }
        match self.nodes.iter().find(|n| n.kind == Some(LeafKind::Tip)) {
            Some(t) => Err(Error::NotGeodesicallyComplete(t.id)),
            None => Ok(()),
        }
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        while self.nodes[a].hops > self.nodes[b].hops {
            a = self.nodes[a].parent.expect("non-root has parent");
        }
        while self.nodes[b].hops > self.nodes[a].hops {
            b = self.nodes[b].parent.expect("non-root has parent");
        }
        while a != b {
            a = self.nodes[a].parent.expect("non-root has parent");
            b = self.nodes[b].parent.expect("non-root has parent");
        }
        a
    }

    /// Level of the branch point where two leaves separate; `None` when they
    /// are the same leaf (they never separate).
    pub fn carrier_meet_level(&self, a: NodeId, b: NodeId) -> Result<Option<&Level>> {
        let (ia, ib) = (self.idx(a)?, self.idx(b)?);
        if ia == ib {
            return Ok(None);
        }
        Ok(Some(&self.nodes[self.lca(ia, ib)].level))
    }

    /// Checks that `p` names a point of the tree.
    pub fn check_point(&self, p: &TreePoint) -> Result<()> {
        let n = self.node(p.carrier)?;
        match n.kind {
            None => Err(Error::InvalidPoint(format!("carrier {} is not a leaf", p.carrier))),
            Some(LeafKind::Tip) if p.level < n.level => Err(Error::InvalidPoint(format!(
                "level {} is beyond the end of TIP {} at level {}",
                p.level, p.carrier, n.level
            ))),
            _ => Ok(()),
        }
    }

    /// Semantic equality of two point representations.
    pub fn same_point(&self, x: &TreePoint, y: &TreePoint) -> Result<bool> {
        if x.level != y.level {
            return Ok(false);
        }
        Ok(match self.carrier_meet_level(x.carrier, y.carrier)? {
            None => true,
            Some(m) => x.level >= *m,
        })
    }

    pub fn root_point(&self) -> Result<TreePoint> {
        let carrier = *self.leaves().first().ok_or(Error::TrivialTree)?;
        Ok(TreePoint::new(carrier, Level::one()))
    }

    /// Deepest node level strictly below every branch level: `min level / 2`.
    pub fn level_below_all(&self) -> Level {
        let min = self.nodes.iter().map(|n| n.level.value()).min().expect("nonempty").clone();
        Level::new(min * rat(1, 2)).expect("half of a level is a level")
    }
}
