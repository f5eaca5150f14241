use serde::Serialize;

use super::checks::sufficient_source_level;
use super::RadialTreeMap;
use crate::error::{Error, Result};
use crate::rational::Level;
use crate::tree::{ApproxPoint, TreePoint};

/// Slack allowed in floating-point inequality checks.
pub const INEQUALITY_TOLERANCE: f64 = 1e-9;

fn same_ends(m: &RadialTreeMap, other: &RadialTreeMap) -> Result<()> {
    if m.source() != other.source() || m.target() != other.target() {
        return Err(Error::Mismatch);
    }
    Ok(())
}

/// Shortest-path homotopy: the point at fraction `t` of the geodesic from
/// `m(x)` to `other(x)`.
pub fn homotopy_eval(m: &RadialTreeMap, other: &RadialTreeMap, x: &TreePoint, t: f64) -> Result<ApproxPoint> {
    same_ends(m, other)?;
    let (a, b) = (m.eval(x)?, other.eval(x)?);
    m.target().geodesic_point(&a, &b, t)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomotopySample {
    pub t: f64,
    pub distance: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomotopyBoundReport {
    pub ok: bool,
    pub bound: f64,
    pub samples: usize,
    pub violations: Vec<HomotopySample>,
    /// Largest `distance - bound` seen.
    pub worst_excess: f64,
}

/// Checks `d(H_t x, H_t y) <= max(d(m x, m y), d(m' x, m' y))` at each `t`.
pub fn homotopy_bound_check(
    m: &RadialTreeMap,
    other: &RadialTreeMap,
    x: &TreePoint,
    y: &TreePoint,
    ts: &[f64],
) -> Result<HomotopyBoundReport> {
    same_ends(m, other)?;
    let target = m.target();
    let (mx, my, ox, oy) = (m.eval(x)?, m.eval(y)?, other.eval(x)?, other.eval(y)?);
    let bound = target.distance(&mx, &my)?.value().max(target.distance(&ox, &oy)?.value());
    let mut violations = Vec::new();
    let mut worst_excess = f64::NEG_INFINITY;
    for &t in ts {
        let hx = target.geodesic_point(&mx, &ox, t)?;
        let hy = target.geodesic_point(&my, &oy, t)?;
        let distance = target.approx_distance(&hx, &hy)?;
        worst_excess = worst_excess.max(distance - bound);
        if distance > bound + INEQUALITY_TOLERANCE {
            violations.push(HomotopySample { t, distance, bound });
        }
    }
    Ok(HomotopyBoundReport { ok: violations.is_empty(), bound, samples: ts.len(), violations, worst_excess })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentStayReport {
    pub ok: bool,
    /// Cut point of the target component that must contain the whole path.
    pub component: TreePoint,
    pub source_level: Level,
    pub escaped_at: Vec<f64>,
}

/// For `x` beyond the shared sufficient source level of target level `mu`,
/// checks that the homotopy path of `x` stays inside one target component
/// beyond `mu`.
pub fn homotopy_component_check(
    m: &RadialTreeMap,
    other: &RadialTreeMap,
    mu: &Level,
    x: &TreePoint,
    ts: &[f64],
) -> Result<ComponentStayReport> {
    same_ends(m, other)?;
    let mut nu: Option<Level> = None;
    for map in [m, other] {
        let least = sufficient_source_level(map, mu)?
            .ok_or_else(|| Error::NotProper("a reparametrization does not reach 0".into()))?;
        nu = Some(match nu {
            Some(n) if n < least => n,
            _ => least,
        });
    }
    let nu = nu.expect("two maps");
    if x.level > nu {
        return Err(Error::LevelOutOfRange(format!("{x} is not beyond the shared level {nu}")));
    }
    let target = m.target();
    let image = m.eval(x)?;
    let component = target
        .components_beyond(mu)?
        .into_iter()
        .find(|c| target.in_subtree(&c.point, &image).unwrap_or(false))
        .ok_or_else(|| Error::CrossCheck(format!("{image} is in no component beyond {mu}")))?
        .point;
    let mut escaped_at = Vec::new();
    for &t in ts {
        let h = homotopy_eval(m, other, x, t)?;
        if !target.approx_in_subtree(&component, &h)? {
            escaped_at.push(t);
        }
    }
    Ok(ComponentStayReport { ok: escaped_at.is_empty(), component, source_level: nu, escaped_at })
}
