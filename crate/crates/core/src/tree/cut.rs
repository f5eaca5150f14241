use num_traits::One;
use serde::Serialize;

use super::{LeafKind, NodeId, TreePoint, TreePresentation};
use crate::error::{Error, Result};
use crate::rational::Level;

/// A point `c` of the sphere at some level together with the leaves whose
/// branches continue into the subtree `T_c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub point: TreePoint,
    pub carriers: Vec<NodeId>,
}

impl TreePresentation {
    /// The components of the tree beyond level `u`, one per point of the
    /// sphere at that level. A branch node lying exactly at `u` is the cut
    /// point of the subtree it roots.
    ///
    /// Components appear in preorder; each cut point is represented on the
    /// first of its carriers.
    pub fn components_beyond(&self, u: &Level) -> Result<Vec<Component>> {
        if u.value().is_one() {
            return Err(Error::LevelOutOfRange("cut level must be below 1".into()));
        }
        let mut out = Vec::new();
        let mut stack = vec![self.root_idx()];
        while let Some(i) = stack.pop() {
            let n = self.node_at(i);
            if n.level() <= u {
                let carriers = self.leaves_below(i);
                out.push(Component {
                    point: TreePoint::new(carriers[0], u.clone()),
                    carriers,
                });
            } else if n.is_leaf() {
                if n.kind() == Some(LeafKind::Ray) {
                    out.push(Component {
                        point: TreePoint::new(n.id(), u.clone()),
                        carriers: vec![n.id()],
                    });
                }
            } else {
                stack.extend(self.children_idx(i).iter().rev());
            }
        }
        Ok(out)
    }

    /// The sphere at level `u` (depth `-ln u`): one point per component.
    pub fn cut_set(&self, u: &Level) -> Result<Vec<TreePoint>> {
        Ok(self.components_beyond(u)?.into_iter().map(|c| c.point).collect())
    }

    /// Leaves of the subtree rooted at node index `i`, in preorder.
    pub(crate) fn leaves_below(&self, i: usize) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![i];
        while let Some(j) = stack.pop() {
            let n = self.node_at(j);
            if n.kind().is_some() {
                out.push(n.id());
            }
            stack.extend(self.children_idx(j).iter().rev());
        }
        out
    }
}
