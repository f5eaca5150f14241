use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{concave_majorant, modulus_of, ConcaveMajorant, EndMap, PiecewiseLinear, StepModulus};
use crate::duality::tree_of;
use crate::error::{Error, Result};
use crate::rational::Level;
use crate::tree::{NodeId, TreePoint, TreePresentation};

/// A rooted tree map `(F, u) ↦ (σF, r_F(u))` given by an end map on RAY
/// leaves and one level reparametrization per source leaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadialTreeMap {
    source: TreePresentation,
    target: TreePresentation,
    sigma: BTreeMap<NodeId, NodeId>,
    reparam: BTreeMap<NodeId, PiecewiseLinear>,
}

#[derive(Serialize, Deserialize)]
struct RadialJson {
    source: serde_json::Value,
    target: serde_json::Value,
    sigma: BTreeMap<String, u64>,
    reparam: BTreeMap<String, PiecewiseLinear>,
}

fn parse_id(s: &str) -> Result<NodeId> {
    s.parse().map(NodeId).map_err(|_| Error::Malformed(format!("`{s}` is not a node id")))
}

impl RadialTreeMap {
    /// Checks the shape of the data: both trees geodesically complete,
    /// `sigma` a total map of RAY leaves, one reparametrization per source
    /// leaf with value 1 at 1. Compatibility is checked separately by
    /// [`Self::check_compatibility`].
    pub fn new(
        source: TreePresentation,
        target: TreePresentation,
        sigma: BTreeMap<NodeId, NodeId>,
        reparam: BTreeMap<NodeId, PiecewiseLinear>,
    ) -> Result<Self> {
        source.require_complete()?;
        target.require_complete()?;
        let leaves = source.ray_leaves();
        let targets = target.ray_leaves();
        for f in &leaves {
            let image = sigma.get(f).ok_or_else(|| Error::InvalidMap(format!("leaf {f} has no image")))?;
            if !targets.contains(image) {
                return Err(Error::InvalidMap(format!("image {image} of {f} is not a RAY leaf of the target")));
            }
            let r = reparam.get(f).ok_or_else(|| Error::InvalidMap(format!("leaf {f} has no reparametrization")))?;
            if !r.values().last().is_some_and(|v| v.is_one()) {
                return Err(Error::InvalidMap(format!("reparametrization of {f} is not 1 at 1")));
            }
        }
        if sigma.len() != leaves.len() || reparam.len() != leaves.len() {
            return Err(Error::InvalidMap("map data names nodes that are not source RAY leaves".into()));
        }
        Ok(RadialTreeMap { source, target, sigma, reparam })
    }

    pub fn identity(tree: &TreePresentation) -> Result<Self> {
        let leaves = tree.ray_leaves();
        Self::new(
            tree.clone(),
            tree.clone(),
            leaves.iter().map(|&l| (l, l)).collect(),
            leaves.iter().map(|&l| (l, PiecewiseLinear::identity())).collect(),
        )
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: RadialJson = serde_json::from_value(value.clone())?;
        let source = TreePresentation::from_json(&raw.source)?;
        let target = TreePresentation::from_json(&raw.target)?;
        let sigma = raw
            .sigma
            .iter()
            .map(|(k, v)| Ok((parse_id(k)?, NodeId(*v))))
            .collect::<Result<_>>()?;
        let reparam = raw
            .reparam
            .into_iter()
            .map(|(k, v)| Ok((parse_id(&k)?, v)))
            .collect::<Result<_>>()?;
        Self::new(source, target, sigma, reparam)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let raw = RadialJson {
            source: self.source.to_json(),
            target: self.target.to_json(),
            sigma: self.sigma.iter().map(|(k, v)| (k.0.to_string(), v.0)).collect(),
            reparam: self.reparam.iter().map(|(k, v)| (k.0.to_string(), v.clone())).collect(),
        };
        serde_json::to_value(raw).expect("radial map serializes")
    }

    pub fn source(&self) -> &TreePresentation {
        &self.source
    }

    pub fn target(&self) -> &TreePresentation {
        &self.target
    }

    pub fn sigma(&self) -> &BTreeMap<NodeId, NodeId> {
        &self.sigma
    }

    pub fn reparams(&self) -> &BTreeMap<NodeId, PiecewiseLinear> {
        &self.reparam
    }

    pub fn reparam(&self, leaf: NodeId) -> Result<&PiecewiseLinear> {
        self.reparam.get(&leaf).ok_or(Error::UnknownNode(leaf))
    }

    pub fn image_leaf(&self, leaf: NodeId) -> Result<NodeId> {
        self.sigma.get(&leaf).copied().ok_or(Error::UnknownNode(leaf))
    }

    /// Image of `x` computed on its own carrier only.
    pub(crate) fn eval_on_carrier(&self, x: &TreePoint) -> Result<TreePoint> {
        let r = self.reparam(x.carrier)?.eval(x.level.value());
        if r.is_zero() {
            return Err(Error::InvalidMap(format!("{x} is sent to infinity")));
        }
        Ok(TreePoint::new(self.image_leaf(x.carrier)?, Level::new(r)?))
    }

    /// Image of a source point. Every carrier through `x` is tried; they must
    /// all give the same target point.
    pub fn eval(&self, x: &TreePoint) -> Result<TreePoint> {
        self.source.check_point(x)?;
        let image = self.eval_on_carrier(x)?;
        for g in self.source.ray_leaves() {
            if g == x.carrier {
                continue;
            }
            let through = self.source.carrier_meet_level(x.carrier, g)?.is_some_and(|m| *m <= x.level);
            if through {
                let alt = self.eval_on_carrier(&TreePoint::new(g, x.level.clone()))?;
                if !self.target.same_point(&image, &alt)? {
                    return Err(Error::IllDefined(x.carrier, g));
                }
            }
        }
        Ok(image)
    }

    /// Well-definedness: for leaves `F, G` meeting at level `m`, the two
    /// reparametrizations agree on `[m,1]` and the images separate no
    /// later than `r_F(m)`.
    pub fn check_compatibility(&self) -> Result<()> {
        let leaves = self.source.ray_leaves();
        for (k, &f) in leaves.iter().enumerate() {
            for &g in &leaves[k + 1..] {
                let m = self.source.carrier_meet_level(f, g)?.expect("distinct leaves").value();
                let (rf, rg) = (&self.reparam[&f], &self.reparam[&g]);
                if !rf.agrees_on(rg, m) {
                    return Err(Error::IllDefined(f, g));
                }
                if let Some(image_meet) = self.target.carrier_meet_level(self.sigma[&f], self.sigma[&g])? {
                    if *image_meet.value() > rf.eval(m) {
                        return Err(Error::IllDefined(f, g));
                    }
                }
            }
        }
        Ok(())
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &RadialTreeMap) -> Result<RadialTreeMap> {
        if self.target != next.source {
            return Err(Error::Mismatch);
        }
        let sigma = self.sigma.iter().map(|(&f, s)| (f, next.sigma[s])).collect();
        let reparam = self
            .reparam
            .iter()
            .map(|(&f, r)| (f, r.then(&next.reparam[&self.sigma[&f]])))
            .collect();
        RadialTreeMap::new(self.source.clone(), next.target.clone(), sigma, reparam)
    }
}

/// The induced tree map together with the data it was built from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InducedTreeMap {
    pub modulus: StepModulus,
    pub majorant: ConcaveMajorant,
    #[serde(serialize_with = "ser_radial")]
    pub map: RadialTreeMap,
}

fn ser_radial<S: serde::Serializer>(m: &RadialTreeMap, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.to_json().serialize(s)
}

/// `f̂`: the map between the trees of the two spaces that follows `f` on
/// ends and reparametrizes every ray by the normalized majorant `λ`.
pub fn induce_tree_map(f: &EndMap) -> Result<RadialTreeMap> {
    Ok(induce_tree_map_detailed(f)?.map)
}

pub fn induce_tree_map_detailed(f: &EndMap) -> Result<InducedTreeMap> {
    let modulus = modulus_of(f);
    let majorant = concave_majorant(&modulus);
    let source = tree_of(f.source())?;
    let target = tree_of(f.target())?;
    let mut sigma = BTreeMap::new();
    let mut reparam = BTreeMap::new();
    for leaf in source.ray_leaves() {
        let label = source.end_label(leaf)?;
        let image = f.image(&label)?;
        let image_leaf = target.leaf_by_label(image).ok_or_else(|| Error::UnknownLabel(image.to_string()))?;
        sigma.insert(leaf, image_leaf);
        reparam.insert(leaf, majorant.as_pl().clone());
    }
    let map = RadialTreeMap::new(source, target, sigma, reparam)?;
    Ok(InducedTreeMap { modulus, majorant, map })
}
