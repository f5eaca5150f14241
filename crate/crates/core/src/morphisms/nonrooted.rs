use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::EndMap;
use crate::duality::ends_of;
use crate::error::{Error, Result};
use crate::rational::{serde_rational, Rational, TreeDistance};
use crate::tree::{NodeId, TreePoint, TreePresentation};
use crate::ultrametric::FiniteUltrametricSpace;

/// Where the source root lands in the target, and how far that is from the
/// target root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonRootedOffset {
    pub p: TreePoint,
    pub d0: TreeDistance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundViolation {
    pub x: String,
    pub y: String,
    #[serde(with = "serde_rational")]
    pub source: Rational,
    #[serde(with = "serde_rational")]
    pub target: Rational,
    #[serde(with = "serde_rational")]
    pub lower: Rational,
    #[serde(with = "serde_rational")]
    pub upper: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonRootedReport {
    pub ok: bool,
    pub offset: NonRootedOffset,
    pub pairs_checked: usize,
    pub violations: Vec<BoundViolation>,
    #[serde(skip)]
    pub end_map: EndMap,
}

impl NonRootedReport {
    pub fn summary(&self) -> String {
        let factor = self.offset.p.level.clone();
        if self.ok {
            format!("all {} end pairs within factor [{}, 1/{}]", self.pairs_checked, factor, factor)
        } else {
            format!("{} of {} end pairs distorted beyond [{}, 1/{}]", self.violations.len(), self.pairs_checked, factor, factor)
        }
    }
}

/// Checks that a claimed non-rooted isometry, given by the leaf bijection
/// `sigma` and the image `p` of the source root, distorts end distances by a
/// factor in `[u_p, 1/u_p]` where `u_p` is the level of `p`.
pub fn nonrooted_end_map(
    source: &TreePresentation,
    target: &TreePresentation,
    sigma: &BTreeMap<NodeId, NodeId>,
    p: &TreePoint,
) -> Result<NonRootedReport> {
    let d0 = target.norm(p)?;
    let s = ends_of(source)?;
    let t = ends_of(target)?;
    let keys: BTreeSet<NodeId> = sigma.keys().copied().collect();
    let values: BTreeSet<NodeId> = sigma.values().copied().collect();
    if keys != s.leaves.iter().copied().collect() || values != t.leaves.iter().copied().collect() || values.len() != keys.len() {
        return Err(Error::InvalidMap("sigma is not a bijection of RAY leaves".into()));
    }
    let assignment: Vec<usize> = s.leaves.iter().map(|f| t.point_of(sigma[f]).expect("checked")).collect();
    let u = p.level.value();
    let mut violations = Vec::new();
    let mut pairs_checked = 0;
    for i in 0..s.space.len() {
        for j in (i + 1)..s.space.len() {
            pairs_checked += 1;
            let d = s.space.distance(i, j);
            let e = t.space.distance(assignment[i], assignment[j]);
            let (lower, upper) = (u * d, d / u);
            if *e < lower || *e > upper {
                violations.push(BoundViolation {
                    x: s.space.label(i).to_string(),
                    y: s.space.label(j).to_string(),
                    source: d.clone(),
                    target: e.clone(),
                    lower,
                    upper,
                });
            }
        }
    }
    let end_map = EndMap::from_indices(s.space, t.space, assignment)?;
    Ok(NonRootedReport {
        ok: violations.is_empty(),
        offset: NonRootedOffset { p: p.clone(), d0 },
        pairs_checked,
        violations,
        end_map,
    })
}

/// End space of `tree` seen from the point `p` instead of the root.
///
/// A ray `F` leaves the arc `[root, p]` at level `α_F`. Two rays leaving at
/// different points separate, seen from `p`, where the deeper one leaves;
/// two rays leaving at the same point `α` separate at their own meet `m`,
/// which lies `-ln(m/α)` beyond it.
pub fn rerooted_end_space(tree: &TreePresentation, p: &TreePoint) -> Result<FiniteUltrametricSpace> {
    tree.check_point(p)?;
    let view = ends_of(tree)?;
    let u = p.level.value();
    let alpha: Vec<Rational> = view
        .leaves
        .iter()
        .map(|&f| {
            Ok(match tree.carrier_meet_level(p.carrier, f)? {
                Some(m) if m.value() > u => m.value().clone(),
                _ => u.clone(),
            })
        })
        .collect::<Result<_>>()?;
    let n = view.leaves.len();
    let mut dist = vec![vec![Rational::from_integer(0.into()); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = if alpha[i] == alpha[j] {
                u * view.space.distance(i, j) / (&alpha[i] * &alpha[i])
            } else {
                u / alpha[i].clone().min(alpha[j].clone())
            };
            dist[i][j] = d.clone();
            dist[j][i] = d;
        }
    }
    FiniteUltrametricSpace::new(view.space.labels().to_vec(), dist)
}

/// The tree `tree` re-rooted at `p`, presented as the tree of its re-rooted
/// end space, with the label-matching leaf bijection into `tree`.
pub fn reroot(tree: &TreePresentation, p: &TreePoint) -> Result<(TreePresentation, BTreeMap<NodeId, NodeId>)> {
    let space = rerooted_end_space(tree, p)?;
    let rerooted = crate::duality::tree_of(&space)?;
    let mut sigma = BTreeMap::new();
    for leaf in rerooted.ray_leaves() {
        let label = rerooted.end_label(leaf)?;
        let back = tree
            .ray_leaves()
            .into_iter()
            .find(|&l| tree.end_label(l).is_ok_and(|x| x == label))
            .ok_or(Error::UnknownLabel(label))?;
        sigma.insert(leaf, back);
    }
    Ok((rerooted, sigma))
}
