//! The two object-level functors: the end space of a tree and the tree of an
//! ultrametric space, together with their round-trip checks.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{rat, serde_rational, Level, Rational};
use crate::tree::{Correspondence, LeafKind, NodeId, NodeSpec, TreePresentation};
use crate::ultrametric::FiniteUltrametricSpace;

/// The end space of a tree with each point tied back to its RAY leaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndSpaceView {
    pub space: FiniteUltrametricSpace,
    /// `leaves[i]` is the RAY leaf of point `i` of `space`.
    pub leaves: Vec<NodeId>,
}

impl EndSpaceView {
    pub fn leaf_of(&self, point: usize) -> NodeId {
        self.leaves[point]
    }

    pub fn point_of(&self, leaf: NodeId) -> Option<usize> {
        self.leaves.iter().position(|&l| l == leaf)
    }
}

/// End space of a geodesically complete tree: one point per RAY leaf, with
/// distance the level at which two rays separate.
pub fn ends_of(tree: &TreePresentation) -> Result<EndSpaceView> {
    tree.require_complete()?;
    let leaves = tree.ray_leaves();
    let labels = leaves.iter().map(|&l| tree.end_label(l)).collect::<Result<Vec<_>>>()?;
    let n = leaves.len();
    let mut dist = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let m = tree
                .carrier_meet_level(leaves[i], leaves[j])?
                .expect("distinct leaves separate")
                .value()
                .clone();
            dist[i][j] = m.clone();
            dist[j][i] = m;
        }
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
        return Err(Error::InvalidTree(format!("two rays carry the end label `{dup}`")));
    }
    let space = FiniteUltrametricSpace::from_trusted(labels, dist);
    Ok(EndSpaceView { space, leaves })
}

/// The dendrogram of `space` in level coordinates.
///
/// The root sits at level 1; below it there is one branch node per merge,
/// at the level equal to the merge distance, and one labelled RAY leaf per
/// point. When the diameter is below 1 the root has a single child. Node ids
/// are assigned in preorder and siblings are ordered by their least label.
pub fn tree_of(space: &FiniteUltrametricSpace) -> Result<TreePresentation> {
    if space.is_empty() {
        return Err(Error::EmptySpace);
    }
    let mut members: Vec<usize> = (0..space.len()).collect();
    members.sort_by(|&a, &b| space.label(a).cmp(space.label(b)));

    let mut specs: Vec<NodeSpec> = Vec::new();
    let root = push_node(&mut specs, Level::one(), None, None);
    let child = if members.len() == 1 {
        Some(push_ray(&mut specs, space, members[0], &Level::one()))
    } else {
        let diam = max_distance(space, &members);
        if diam.is_one() {
            let kids = build_children(&mut specs, space, &members, &Level::one());
            specs[root].children = kids;
            None
        } else {
            Some(build_branch(&mut specs, space, &members, diam))
        }
    };
    if let Some(c) = child {
        specs[root].children = vec![c];
    }
    TreePresentation::from_specs(specs)
}

fn push_node(specs: &mut Vec<NodeSpec>, level: Level, leaf: Option<LeafKind>, label: Option<String>) -> usize {
    specs.push(NodeSpec {
        id: NodeId(specs.len() as u64),
        level,
        children: Vec::new(),
        leaf,
        label,
    });
    specs.len() - 1
}

fn push_ray(specs: &mut Vec<NodeSpec>, space: &FiniteUltrametricSpace, point: usize, parent: &Level) -> NodeId {
    let level = Level::new(parent.value() * rat(1, 2)).expect("level");
    let i = push_node(specs, level, Some(LeafKind::Ray), Some(space.label(point).to_string()));
    specs[i].id
}

fn max_distance(space: &FiniteUltrametricSpace, members: &[usize]) -> Rational {
    let first = members[0];
    // In an ultrametric space the diameter of a set is attained from any member.
    members.iter().map(|&m| space.distance(first, m)).max().cloned().unwrap_or_else(Rational::zero)
}

fn build_branch(specs: &mut Vec<NodeSpec>, space: &FiniteUltrametricSpace, members: &[usize], level: Rational) -> NodeId {
    let level = Level::new(level).expect("positive merge distance");
    let i = push_node(specs, level.clone(), None, None);
    let kids = build_children(specs, space, members, &level);
    specs[i].children = kids;
    specs[i].id
}

fn build_children(specs: &mut Vec<NodeSpec>, space: &FiniteUltrametricSpace, members: &[usize], level: &Level) -> Vec<NodeId> {
    space
        .partition_indices(members, level.value(), true)
        .into_iter()
        .map(|block| {
            if block.len() == 1 {
                push_ray(specs, space, block[0], level)
            } else {
                let d = max_distance(space, &block);
                build_branch(specs, space, &block, d)
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceMismatch {
    pub x: String,
    pub y: String,
    #[serde(with = "serde_rational")]
    pub expected: Rational,
    #[serde(with = "serde_rational")]
    pub found: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UltrametricRoundtripReport {
    pub ok: bool,
    pub points: usize,
    pub first_mismatch: Option<DistanceMismatch>,
}

/// Compares `space` with the end space of its tree, pair by pair, exactly.
pub fn roundtrip_ultrametric_check(space: &FiniteUltrametricSpace) -> Result<UltrametricRoundtripReport> {
    let ends = ends_of(&tree_of(space)?)?.space;
    if ends.len() != space.len() {
        return Err(Error::CrossCheck(format!(
            "{} points became {} ends",
            space.len(),
            ends.len()
        )));
    }
    let mut first_mismatch = None;
    'outer: for i in 0..space.len() {
        for j in (i + 1)..space.len() {
            let (x, y) = (space.label(i), space.label(j));
            let found = ends.distance_by_label(x, y)?;
            if found != space.distance(i, j) {
                first_mismatch = Some(DistanceMismatch {
                    x: x.to_string(),
                    y: y.to_string(),
                    expected: space.distance(i, j).clone(),
                    found: found.clone(),
                });
                break 'outer;
            }
        }
    }
    Ok(UltrametricRoundtripReport { ok: first_mismatch.is_none(), points: space.len(), first_mismatch })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeRoundtripReport {
    pub ok: bool,
    pub ends: usize,
    /// Leaf of the input tree to leaf of the rebuilt tree, found from the
    /// canonical forms.
    pub correspondence: Option<Correspondence>,
    /// Whether matching each ray to the rebuilt ray carrying its end label is
    /// itself a separation-preserving bijection.
    pub label_correspondence_ok: bool,
}

/// Rebuilds a tree from its end space and tests rooted isometry of the
/// canonical forms.
pub fn roundtrip_tree_check(tree: &TreePresentation) -> Result<TreeRoundtripReport> {
    let view = ends_of(tree)?;
    let rebuilt = tree_of(&view.space)?;
    let correspondence = tree.canonicalize().rooted_isometric(&rebuilt.canonicalize());
    let by_label: Option<Correspondence> = view
        .leaves
        .iter()
        .enumerate()
        .map(|(i, &leaf)| rebuilt.leaf_by_label(view.space.label(i)).map(|r| (leaf, r)))
        .collect();
    let label_correspondence_ok = by_label.is_some_and(|m| tree.verify_correspondence(&rebuilt, &m));
    Ok(TreeRoundtripReport {
        ok: correspondence.is_some(),
        ends: view.leaves.len(),
        correspondence,
        label_correspondence_ok,
    })
}
