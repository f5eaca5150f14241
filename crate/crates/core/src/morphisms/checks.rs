use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use super::RadialTreeMap;
use crate::error::Result;
use crate::rational::{format_rational, rat, Level, Rational, TreeDistance};
use crate::tree::{NodeId, TreePoint, TreePresentation};

/// At most this many failing pairs are kept as witnesses.
const MAX_WITNESSES: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LipschitzWitness {
    pub x: TreePoint,
    pub y: TreePoint,
    pub source: TreeDistance,
    pub image: TreeDistance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LipschitzReport {
    pub ok: bool,
    pub pairs_checked: usize,
    pub failures: usize,
    pub witnesses: Vec<LipschitzWitness>,
}

impl LipschitzReport {
    pub fn summary(&self) -> String {
        if self.ok {
            format!("non-expansive on all {} pairs", self.pairs_checked)
        } else {
            let w = &self.witnesses[0];
            format!(
                "{} of {} pairs expanded; e.g. {} and {}: distance {} became {}",
                self.failures, self.pairs_checked, w.x, w.y, w.source, w.image
            )
        }
    }
}

/// `prod(a) / prod(b)` compared with 1, by cross-multiplying the unreduced
/// numerators and denominators; no gcd is taken.
fn product_exceeds(a: [&Rational; 4], b: [&Rational; 4]) -> bool {
    let fold = |xs: &[&Rational; 4], f: fn(&Rational) -> &BigInt| xs.iter().fold(BigInt::one(), |acc, x| acc * f(x));
    fold(&a, Rational::numer) * fold(&b, Rational::denom) > fold(&b, Rational::numer) * fold(&a, Rational::denom)
}

/// Exact test of `d(m(x), m(y)) <= d(x, y)` on every given pair.
///
/// With `q = u_m^2 / (u_x u_y)`, expansion means
/// `u_m'^2 u_x u_y > u_m^2 u_fx u_fy`.
pub fn check_lipschitz1(m: &RadialTreeMap, pairs: &[(TreePoint, TreePoint)]) -> Result<LipschitzReport> {
    m.check_compatibility()?;
    let (source, target) = (m.source(), m.target());
    let mut failures = 0;
    let mut witnesses = Vec::new();
    for (x, y) in pairs {
        let meet = source.meet(x, y)?;
        let (fx, fy) = (m.eval_on_carrier(x)?, m.eval_on_carrier(y)?);
        let image_meet = target.meet(&fx, &fy)?;
        let (um, vm) = (meet.level.value(), image_meet.level.value());
        if product_exceeds(
            [vm, vm, x.level.value(), y.level.value()],
            [um, um, fx.level.value(), fy.level.value()],
        ) {
            failures += 1;
            if witnesses.len() < MAX_WITNESSES {
                let (d, image) = (source.distance(x, y)?, target.distance(&fx, &fy)?);
                witnesses.push(LipschitzWitness { x: x.clone(), y: y.clone(), source: d, image });
            }
        }
    }
    Ok(LipschitzReport { ok: failures == 0, pairs_checked: pairs.len(), failures, witnesses })
}

fn ancestor_levels(tree: &TreePresentation, leaf: NodeId) -> Result<Vec<Level>> {
    let mut out = Vec::new();
    let mut cur = Some(leaf);
    while let Some(id) = cur {
        out.push(tree.node(id)?.level().clone());
        cur = tree.parent(id)?;
    }
    Ok(out)
}

/// Every point at which something can change: on each carrier, the levels of
/// its branch points, the reparametrization breakpoints, the levels mapping
/// onto target branch points, the root and one level below everything.
/// Points are deduplicated up to semantic equality.
pub fn breakpoint_points(m: &RadialTreeMap) -> Result<Vec<TreePoint>> {
    let source = m.source();
    let leaves = source.ray_leaves();
    let below = source.level_below_all();
    let mut seen: BTreeSet<TreePoint> = BTreeSet::new();
    for &f in &leaves {
        let r = m.reparam(f)?;
        let mut levels: BTreeSet<Rational> = BTreeSet::new();
        levels.insert(Rational::one());
        levels.insert(below.value().clone());
        levels.extend(ancestor_levels(source, f)?.into_iter().map(Level::into_inner));
        levels.extend(r.breakpoints().iter().filter(|x| !x.is_zero()).cloned());
        for l in ancestor_levels(m.target(), m.image_leaf(f)?)? {
            levels.extend(r.first_at_least(l.value()).filter(|x| !x.is_zero()));
            levels.extend(r.last_at_most(l.value()).filter(|x| !x.is_zero()));
        }
        for u in levels {
            let u = Level::new(u)?;
            let mut carrier = f;
            for &g in &leaves {
                if g == f || source.carrier_meet_level(f, g)?.is_some_and(|m| *m <= u) {
                    carrier = g;
                    break;
                }
            }
            seen.insert(TreePoint::new(carrier, u));
        }
    }
    Ok(seen.into_iter().collect())
}

/// All unordered pairs of distinct points.
pub fn all_pairs(points: &[TreePoint]) -> Vec<(TreePoint, TreePoint)> {
    let mut out = Vec::with_capacity(points.len() * points.len().saturating_sub(1) / 2);
    for (k, x) in points.iter().enumerate() {
        for y in &points[k + 1..] {
            out.push((x.clone(), y.clone()));
        }
    }
    out
}

/// A random point on a random RAY carrier. Levels are dyadic with up to 20
/// bits, scaled down by up to `2^-12` so deep points are well represented.
pub fn sample_point<R: Rng + ?Sized>(tree: &TreePresentation, rng: &mut R) -> TreePoint {
    sample_on(&tree.ray_leaves(), rng)
}

fn sample_on<R: Rng + ?Sized>(leaves: &[NodeId], rng: &mut R) -> TreePoint {
    let carrier = leaves[rng.random_range(0..leaves.len())];
    let k: i64 = rng.random_range(1..=(1 << 20));
    let shift: u32 = rng.random_range(0..=12);
    let level = rat(k, 1 << (20 + shift));
    TreePoint::new(carrier, Level::new(level).expect("positive dyadic level"))
}

pub fn sample_pairs<R: Rng + ?Sized>(tree: &TreePresentation, n: usize, rng: &mut R) -> Vec<(TreePoint, TreePoint)> {
    let leaves = tree.ray_leaves();
    (0..n).map(|_| (sample_on(&leaves, rng), sample_on(&leaves, rng))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProperFailure {
    pub leaf: NodeId,
    pub reason: String,
}

/// Target radius `M` (as the level `e^{-M}`) and a source radius `N` whose
/// complement of the ball maps beyond `M`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusWitness {
    pub target_level: Level,
    pub source_level: Level,
    pub target_depth: f64,
    pub source_depth: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProperReport {
    pub ok: bool,
    pub failures: Vec<ProperFailure>,
    pub witnesses: Vec<RadiusWitness>,
}

impl ProperReport {
    pub fn summary(&self) -> String {
        if self.ok {
            format!("metrically proper; {} radius witnesses", self.witnesses.len())
        } else {
            let f = &self.failures[0];
            format!("not metrically proper: leaf {}: {}", f.leaf, f.reason)
        }
    }
}

/// Least source level whose points all map to level `<= mu`: the minimum
/// over leaves of the generalized inverse `max{u : r_F(u) <= mu}`.
pub fn sufficient_source_level(m: &RadialTreeMap, mu: &Level) -> Result<Option<Level>> {
    let mut best: Option<Rational> = None;
    for r in m.reparams().values() {
        match r.last_at_most(mu.value()) {
            Some(u) if !u.is_zero() => {
                if !best.as_ref().is_some_and(|b| *b <= u) {
                    best = Some(u);
                }
            }
            _ => return Ok(None),
        }
    }
    best.map(Level::new).transpose()
}

/// Level-space properness: every reparametrization vanishes at 0 and only
/// there. Passing maps get a table of `M ↦ N` radius witnesses at each
/// target branch level and one level below all of them.
pub fn check_metrically_proper(m: &RadialTreeMap) -> Result<ProperReport> {
    let mut failures = Vec::new();
    for (&leaf, r) in m.reparams() {
        let at_zero = &r.values()[0];
        if !at_zero.is_zero() {
            failures.push(ProperFailure {
                leaf,
                reason: format!("level {} at infinity: the ray has bounded image", format_rational(at_zero)),
            });
        } else if r.values()[1].is_zero() {
            failures.push(ProperFailure {
                leaf,
                reason: format!("vanishes on (0, {}]: points are sent to infinity", format_rational(&r.breakpoints()[1])),
            });
        }
    }
    let mut witnesses = Vec::new();
    if failures.is_empty() {
        let target = m.target();
        let mut levels: BTreeSet<Level> = target.nodes().map(|n| n.level().clone()).filter(|l| !l.is_root()).collect();
        levels.insert(target.level_below_all());
        for mu in levels.into_iter().rev() {
            let nu = sufficient_source_level(m, &mu)?.expect("proper maps have positive inverses");
            witnesses.push(RadiusWitness {
                target_depth: mu.depth(),
                source_depth: nu.depth(),
                target_level: mu,
                source_level: nu,
            });
        }
    }
    Ok(ProperReport { ok: failures.is_empty(), failures, witnesses })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BornologousReport {
    pub ok: bool,
    /// Largest depth-space slope over all leaves: the map sends points at
    /// distance `R` to points at distance at most `constant * R`.
    #[serde(with = "serde_opt_rational")]
    pub constant: Option<Rational>,
}

mod serde_opt_rational {
    use super::*;
    pub fn serialize<S: serde::Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        r.as_ref().map(format_rational).serialize(s)
    }
}

impl BornologousReport {
    pub fn summary(&self) -> String {
        match &self.constant {
            Some(c) => format!("bornologous with constant {}", format_rational(c)),
            None => "not bornologous: some reparametrization vanishes".into(),
        }
    }
}

pub fn check_bornologous(m: &RadialTreeMap) -> BornologousReport {
    let mut constant = Some(Rational::zero());
    for r in m.reparams().values() {
        constant = match (constant, r.max_depth_slope()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
    }
    BornologousReport { ok: constant.is_some(), constant }
}

/// Preimage of a closed target ball around the root, certified by a source
/// cut set that lies inside it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropernessWitness {
    /// The ball is `{ level >= target_level }`.
    pub target_level: Level,
    /// Every source point at level `>= preimage_level` maps into the ball.
    pub preimage_level: Level,
    pub cut_set: Vec<TreePoint>,
    pub cut_set_size: usize,
    /// Each cut point's image was checked to lie in the ball.
    pub verified: bool,
}

pub fn properness_witness(m: &RadialTreeMap, target_level: &Level) -> Result<PropernessWitness> {
    let mut nu = Rational::zero();
    for r in m.reparams().values() {
        let h = r.first_at_least(target_level.value()).unwrap_or_else(Rational::one);
        if h > nu {
            nu = h;
        }
    }
    let preimage_level = if nu.is_zero() { m.source().level_below_all() } else { Level::new(nu)? };
    let cut_set = if preimage_level.is_root() {
        vec![m.source().root_point()?]
    } else {
        m.source().cut_set(&preimage_level)?
    };
    let mut verified = true;
    for c in &cut_set {
        verified &= m.eval(c)?.level >= *target_level;
    }
    Ok(PropernessWitness {
        target_level: target_level.clone(),
        preimage_level,
        cut_set_size: cut_set.len(),
        cut_set,
        verified,
    })
}
