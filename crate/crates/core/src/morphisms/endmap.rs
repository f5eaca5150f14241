use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ultrametric::FiniteUltrametricSpace;

/// A total map between the points of two finite ultrametric spaces. Finite
/// spaces are discrete, so every such map is uniformly continuous.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndMap {
    source: FiniteUltrametricSpace,
    target: FiniteUltrametricSpace,
    assignment: Vec<usize>,
}

#[derive(Deserialize)]
struct EndMapJson {
    source: serde_json::Value,
    target: serde_json::Value,
    map: BTreeMap<String, String>,
}

impl EndMap {
    pub fn new(
        source: FiniteUltrametricSpace,
        target: FiniteUltrametricSpace,
        map: &BTreeMap<String, String>,
    ) -> Result<Self> {
        for key in map.keys() {
            source.index_of(key)?;
        }
        let assignment = source
            .labels()
            .iter()
            .map(|l| {
                let image = map.get(l).ok_or_else(|| Error::InvalidMap(format!("point `{l}` has no image")))?;
                target.index_of(image)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EndMap { source, target, assignment })
    }

    /// Builds a map from an index assignment (`assignment[i]` is the image of
    /// source point `i`).
    pub fn from_indices(
        source: FiniteUltrametricSpace,
        target: FiniteUltrametricSpace,
        assignment: Vec<usize>,
    ) -> Result<Self> {
        if assignment.len() != source.len() || assignment.iter().any(|&j| j >= target.len()) {
            return Err(Error::InvalidMap("assignment does not match the spaces".into()));
        }
        Ok(EndMap { source, target, assignment })
    }

    pub fn identity(space: &FiniteUltrametricSpace) -> Self {
        EndMap { source: space.clone(), target: space.clone(), assignment: (0..space.len()).collect() }
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: EndMapJson = serde_json::from_value(value.clone())?;
        let source = FiniteUltrametricSpace::from_json(&raw.source)?;
        let target = FiniteUltrametricSpace::from_json(&raw.target)?;
        Self::new(source, target, &raw.map)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "map": self.label_map(),
        })
    }

    pub fn source(&self) -> &FiniteUltrametricSpace {
        &self.source
    }

    pub fn target(&self) -> &FiniteUltrametricSpace {
        &self.target
    }

    pub fn image_index(&self, i: usize) -> usize {
        self.assignment[i]
    }

    pub fn image(&self, label: &str) -> Result<&str> {
        let i = self.source.index_of(label)?;
        Ok(self.target.label(self.assignment[i]))
    }

    pub fn label_map(&self) -> BTreeMap<String, String> {
        (0..self.source.len())
            .map(|i| (self.source.label(i).to_string(), self.target.label(self.assignment[i]).to_string()))
            .collect()
    }

    /// `next ∘ self`; the target of `self` must equal the source of `next`.
    pub fn then(&self, next: &EndMap) -> Result<EndMap> {
        if self.target != next.source {
            return Err(Error::Mismatch);
        }
        let assignment = self.assignment.iter().map(|&j| next.assignment[j]).collect();
        Ok(EndMap { source: self.source.clone(), target: next.target.clone(), assignment })
    }

    /// Equality of the underlying functions, independent of point order.
    pub fn same_function(&self, other: &EndMap) -> bool {
        self.source.distance_map() == other.source.distance_map()
            && self.target.distance_map() == other.target.distance_map()
            && self.label_map() == other.label_map()
    }
}
