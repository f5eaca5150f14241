use std::collections::BTreeMap;

use super::{LeafKind, NodeId, NodeSpec, TreePresentation};
use crate::error::{Error, Result};
use crate::rational::{rat, Level};

/// Leaf-to-leaf bijection witnessing a rooted isometry.
pub type Correspondence = BTreeMap<NodeId, NodeId>;

struct CanonicalNode {
    encoding: String,
    specs: Vec<NodeSpec>,
}

impl TreePresentation {
    /// Removes every node all of whose leaves are TIPs, leaving the maximal
    /// geodesically complete subtree.
    pub fn prune(&self) -> Result<TreePresentation> {
        let order = self.preorder_indices();
        let mut has_ray = vec![false; self.nodes.len()];
        for &i in order.iter().rev() {
            let n = &self.nodes[i];
            has_ray[i] = n.kind == Some(LeafKind::Ray) || n.children.iter().any(|&c| has_ray[c]);
        }
        if !has_ray[self.root] {
            return Err(Error::TrivialTree);
        }
        let specs = order
            .into_iter()
            .filter(|&i| has_ray[i])
            .map(|i| {
                let n = &self.nodes[i];
                NodeSpec {
                    id: n.id,
                    level: n.level.clone(),
                    children: n.children.iter().filter(|&&c| has_ray[c]).map(|&c| self.nodes[c].id).collect(),
                    leaf: n.kind,
                    label: n.label.clone(),
                }
            })
            .collect();
        TreePresentation::from_specs(specs)
    }

    /// Canonical form: internal non-root nodes with a single child are
    /// suppressed, RAY markers sit at half their parent's level, and children
    /// are ordered by their recursive encoding. Node ids are preserved.
    pub fn canonicalize(&self) -> TreePresentation {
        let CanonicalNode { specs, .. } = self.canonical_node(self.root, None);
        TreePresentation::from_specs(specs).expect("canonical form of a valid tree is valid")
    }

    fn canonical_node(&self, i: usize, parent_level: Option<&Level>) -> CanonicalNode {
        let n = &self.nodes[i];
        let level = match (n.kind, parent_level) {
            (Some(LeafKind::Ray), Some(p)) => Level::new(p.value() * rat(1, 2)).expect("level"),
            _ => n.level.clone(),
        };
        let mut kids: Vec<CanonicalNode> = n
            .children
            .iter()
            .map(|&c| {
                let mut c = c;
                while self.nodes[c].children.len() == 1 {
                    c = self.nodes[c].children[0];
                }
                self.canonical_node(c, Some(&level))
            })
            .collect();
        kids.sort_by(|a, b| a.encoding.cmp(&b.encoding));

        let encoding = match n.kind {
            Some(LeafKind::Ray) => "R".to_string(),
            Some(LeafKind::Tip) => format!("T{}", level),
            None => {
                let inner: Vec<&str> = kids.iter().map(|k| k.encoding.as_str()).collect();
                format!("N{}[{}]", level, inner.join(","))
            }
        };
        let mut specs = vec![NodeSpec {
            id: n.id,
            level,
            children: kids.iter().map(|k| k.specs[0].id).collect(),
            leaf: n.kind,
            label: n.label.clone(),
        }];
        for k in kids {
            specs.extend(k.specs);
        }
        CanonicalNode { encoding, specs }
    }

    /// Finds a leaf bijection preserving every separation level and TIP
    /// level, if the trees are rooted isometric.
    pub fn rooted_isometric(&self, other: &TreePresentation) -> Option<Correspondence> {
        let a = self.canonical_node(self.root, None);
        let b = other.canonical_node(other.root, None);
        if a.encoding != b.encoding {
            return None;
        }
        let ta = TreePresentation::from_specs(a.specs).ok()?;
        let tb = TreePresentation::from_specs(b.specs).ok()?;
        let mut map = Correspondence::new();
        let mut stack = vec![(ta.root, tb.root)];
        while let Some((i, j)) = stack.pop() {
            let (ni, nj) = (&ta.nodes[i], &tb.nodes[j]);
            if ni.kind.is_some() {
                map.insert(ni.id, nj.id);
            }
            if ni.children.len() != nj.children.len() {
                return None;
            }
            stack.extend(ni.children.iter().copied().zip(nj.children.iter().copied()));
        }
        self.verify_correspondence(other, &map).then_some(map)
    }

    /// Direct check that `map` is a bijection of leaves preserving leaf kinds,
    /// TIP levels and all pairwise separation levels.
    pub fn verify_correspondence(&self, other: &TreePresentation, map: &Correspondence) -> bool {
        let mine = self.leaves();
        let theirs = other.leaves();
        if mine.len() != theirs.len() || map.len() != mine.len() {
            return false;
        }
        let mut images: Vec<NodeId> = map.values().copied().collect();
        images.sort();
        let mut sorted = theirs.clone();
        sorted.sort();
        if images != sorted {
            return false;
        }
        for (k, &x) in mine.iter().enumerate() {
            let Some(&fx) = map.get(&x) else { return false };
            let (nx, nfx) = (self.node(x).expect("leaf"), other.node(fx).expect("leaf"));
            if nx.kind != nfx.kind || (nx.kind == Some(LeafKind::Tip) && nx.level != nfx.level) {
                return false;
            }
            for &y in &mine[k + 1..] {
                let fy = map[&y];
                let lhs = self.carrier_meet_level(x, y).expect("leaf");
                let rhs = other.carrier_meet_level(fx, fy).expect("leaf");
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }
}

/// The recursive canonical encoding of a tree; equal encodings characterize
/// rooted isometry.
pub fn canonical_encoding(tree: &TreePresentation) -> String {
    tree.canonical_node(tree.root, None).encoding
}
