use serde::Serialize;

use super::checks::{check_metrically_proper, sufficient_source_level};
use super::{EndMap, RadialTreeMap};
use crate::duality::ends_of;
use crate::error::{Error, Result};
use crate::rational::{rat, Level};
use crate::tree::Component;

fn require_proper(m: &RadialTreeMap) -> Result<()> {
    let report = check_metrically_proper(m)?;
    if report.ok {
        Ok(())
    } else {
        Err(Error::NotProper(report.summary()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentPair {
    pub source: Component,
    pub target: Component,
}

/// The map induced on components: each component of the source beyond
/// `source_level` lands inside exactly one component of the target beyond
/// `target_level`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentMap {
    pub source_level: Level,
    pub target_level: Level,
    pub pairs: Vec<ComponentPair>,
}

/// Component map at target level `mu`, using the least sufficient source
/// level.
pub fn component_map(m: &RadialTreeMap, mu: &Level) -> Result<ComponentMap> {
    component_map_at(m, mu, None)
}

/// As [`component_map`], at a caller-chosen source level `nu`, which must lie
/// at or below the least sufficient one.
pub fn component_map_at(m: &RadialTreeMap, mu: &Level, nu: Option<&Level>) -> Result<ComponentMap> {
    require_proper(m)?;
    m.check_compatibility()?;
    if mu.is_root() {
        return Err(Error::LevelOutOfRange("target cut level must be below 1".into()));
    }
    let least = sufficient_source_level(m, mu)?.expect("proper");
    let nu = match nu {
        Some(nu) if *nu > least => {
            return Err(Error::LevelOutOfRange(format!(
                "source level {nu} does not map beyond {mu}; need at most {least}"
            )))
        }
        Some(nu) => nu.clone(),
        None => least,
    };
    let (source, target) = (m.source(), m.target());
    let targets = target.components_beyond(mu)?;
    let mut pairs = Vec::new();
    for comp in source.components_beyond(&nu)? {
        let image = m.eval_on_carrier(&comp.point)?;
        let mut hit = None;
        for t in &targets {
            if target.in_subtree(&t.point, &image)? {
                hit = Some(t);
                break;
            }
        }
        let hit = hit.ok_or_else(|| Error::CrossCheck(format!("image {image} of {} is in no component", comp.point)))?;
        for &g in &comp.carriers {
            let along = m.eval_on_carrier(&crate::tree::TreePoint::new(g, nu.clone()))?;
            if !target.in_subtree(&hit.point, &along)? {
                return Err(Error::CrossCheck(format!(
                    "component of {} splits across target components ({} vs {})",
                    comp.point, hit.point, along
                )));
            }
        }
        pairs.push(ComponentPair { source: comp, target: hit.clone() });
    }
    Ok(ComponentMap { source_level: nu, target_level: mu.clone(), pairs })
}

/// The end map `σ` of a proper radial map, confirmed by chasing components:
/// as the target level goes to 0 the image component of every ray shrinks
/// to the single ray `σF`.
pub fn induce_end_map(m: &RadialTreeMap) -> Result<EndMap> {
    require_proper(m)?;
    let source = ends_of(m.source())?;
    let target = ends_of(m.target())?;
    let assignment = source
        .leaves
        .iter()
        .map(|&f| {
            let image = m.image_leaf(f)?;
            target.point_of(image).ok_or(Error::UnknownNode(image))
        })
        .collect::<Result<Vec<_>>>()?;

    let floor = m.target().level_below_all();
    let mut mu = Level::new(rat(1, 2))?;
    let mut previous: Option<ComponentMap> = None;
    loop {
        let last = mu <= floor;
        let cm = component_map(m, &mu)?;
        for (i, &f) in source.leaves.iter().enumerate() {
            let image = target.leaves[assignment[i]];
            let pair = cm
                .pairs
                .iter()
                .find(|p| p.source.carriers.contains(&f))
                .ok_or_else(|| Error::CrossCheck(format!("ray {f} lies in no component")))?;
            if !pair.target.carriers.contains(&image) {
                return Err(Error::CrossCheck(format!("ray {f} does not follow its image {image}")));
            }
            if last && pair.target.carriers != [image] {
                return Err(Error::CrossCheck(format!("image component of ray {f} does not shrink to {image}")));
            }
            if let Some(prev) = &previous {
                let before = prev.pairs.iter().find(|p| p.source.carriers.contains(&f)).expect("total");
                if pair.target.carriers.iter().any(|c| !before.target.carriers.contains(c)) {
                    return Err(Error::CrossCheck(format!("image components of ray {f} do not nest")));
                }
            }
        }
        if last {
            break;
        }
        previous = Some(cm);
        mu = Level::new(mu.value() * rat(1, 2))?;
    }
    EndMap::from_indices(source.space, target.space, assignment)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub by_end_map: bool,
    pub by_components: bool,
    pub source_level: Level,
    pub target_level: Level,
}

impl EquivalenceReport {
    pub fn summary(&self) -> String {
        if self.equivalent {
            format!("equivalent: same end map, same components beyond level {}", self.target_level)
        } else {
            format!("not equivalent: end maps differ, components differ beyond level {}", self.target_level)
        }
    }
}

/// Decides `m ∼ m'` by comparing end maps, cross-checked against the
/// component maps at a target level below every target branch point and a
/// source level below every source branch point and both sufficient levels.
/// Below those levels every component is a single ray, so the component
/// maps are exactly the end maps.
pub fn maps_equivalent(m: &RadialTreeMap, other: &RadialTreeMap) -> Result<EquivalenceReport> {
    if m.source() != other.source() || m.target() != other.target() {
        return Err(Error::Mismatch);
    }
    let by_end_map = induce_end_map(m)?.same_function(&induce_end_map(other)?);

    let mu = m.target().level_below_all();
    let mut nu = m.source().level_below_all();
    for map in [m, other] {
        let least = sufficient_source_level(map, &mu)?.expect("proper");
        if least < nu {
            nu = least;
        }
    }
    let a = component_map_at(m, &mu, Some(&nu))?;
    let b = component_map_at(other, &mu, Some(&nu))?;
    let mut by_components = a.pairs.len() == b.pairs.len();
    for (p, q) in a.pairs.iter().zip(&b.pairs) {
        by_components &= p.source.point == q.source.point && m.target().same_point(&p.target.point, &q.target.point)?;
    }
    if by_end_map != by_components {
        return Err(Error::CrossCheck(format!(
            "end maps say {by_end_map}, component maps say {by_components}"
        )));
    }
    Ok(EquivalenceReport { equivalent: by_end_map, by_end_map, by_components, source_level: nu, target_level: mu })
}
