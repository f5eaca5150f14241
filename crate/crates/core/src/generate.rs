//! Seeded random instances for property tests, acceptance runs and
//! benchmarks.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::morphisms::{EndMap, PiecewiseLinear, RadialTreeMap, StepModulus};
use crate::rational::{rat, Level, Rational};
use crate::tree::{LeafKind, NodeId, NodeSpec, TreePresentation};
use crate::ultrametric::FiniteUltrametricSpace;

/// Distances of random spaces are multiples of `1 / LEVEL_GRID`.
pub const LEVEL_GRID: i64 = 1 << 16;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random ultrametric space on `n` points labelled `p0, p1, …` built by
/// nested random splits; distances are `j / 2^16` and strictly shrink down
/// the hierarchy.
pub fn random_ultrametric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> FiniteUltrametricSpace {
    assert!(n > 0, "a space needs a point");
    let mut dist = vec![vec![Rational::zero(); n]; n];
    let members: Vec<usize> = (0..n).collect();
    split(rng, &members, LEVEL_GRID, &mut dist);
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    FiniteUltrametricSpace::new(labels, dist).expect("nested splits give an ultrametric")
}

fn split<R: Rng + ?Sized>(rng: &mut R, members: &[usize], upper: i64, dist: &mut [Vec<Rational>]) {
    if members.len() < 2 {
        return;
    }
    let level = if upper == LEVEL_GRID && rng.random_bool(0.3) {
        LEVEL_GRID
    } else {
        rng.random_range((upper / 8).max(1)..=upper)
    };
    let k = if level == 1 { members.len() } else { rng.random_range(2..=members.len().min(4)) };
    let mut shuffled = members.to_vec();
    shuffled.shuffle(rng);
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &m) in shuffled.iter().enumerate() {
        let g = if i < k { i } else { rng.random_range(0..k) };
        groups[g].push(m);
    }
    let d = rat(level, LEVEL_GRID);
    for (a, ga) in groups.iter().enumerate() {
        for gb in &groups[a + 1..] {
            for &x in ga {
                for &y in gb {
                    dist[x][y] = d.clone();
                    dist[y][x] = d.clone();
                }
            }
        }
    }
    for g in &groups {
        split(rng, g, level - 1, dist);
    }
}

/// A random geodesically complete tree with at most `max_ends` ends and at
/// most `max_levels` levels of internal nodes below the root. Node levels
/// shrink by random factors `k/8`; internal nodes of degree two occur. Ids
/// are random and children unordered.
pub fn random_complete_tree<R: Rng + ?Sized>(rng: &mut R, max_ends: usize, max_levels: usize) -> TreePresentation {
    assert!(max_ends >= 1 && max_levels >= 1);
    let mut specs: Vec<NodeSpec> = Vec::new();
    let quota = rng.random_range(1..=max_ends);
    grow(rng, &mut specs, Level::one(), 0, quota, max_levels, true);
    let tree = TreePresentation::from_specs(specs).expect("generated tree is valid");
    relabeled_copy(rng, &tree).0
}

fn shrink<R: Rng + ?Sized>(rng: &mut R, level: &Level) -> Level {
    Level::new(level.value() * rat(rng.random_range(1..=7), 8)).expect("positive")
}

fn grow<R: Rng + ?Sized>(
    rng: &mut R,
    specs: &mut Vec<NodeSpec>,
    level: Level,
    depth: usize,
    quota: usize,
    max_levels: usize,
    root: bool,
) -> NodeId {
    let id = NodeId(specs.len() as u64);
    let at = specs.len();
    specs.push(NodeSpec { id, level: level.clone(), children: Vec::new(), leaf: None, label: None });
    if !root && quota == 1 && (depth >= max_levels || rng.random_bool(0.7)) {
        specs[at].leaf = Some(LeafKind::Ray);
        return id;
    }
    let parts: Vec<usize> = if depth >= max_levels {
        vec![1; quota]
    } else if quota == 1 || rng.random_bool(0.1) {
        vec![quota]
    } else {
        let k = rng.random_range(2..=quota.min(4));
        let mut parts = vec![1; k];
        for _ in k..quota {
            parts[rng.random_range(0..k)] += 1;
        }
        parts
    };
    let mut children = Vec::with_capacity(parts.len());
    for q in parts {
        let child_level = shrink(rng, &level);
        if depth >= max_levels {
            let cid = NodeId(specs.len() as u64);
            specs.push(NodeSpec { id: cid, level: child_level, children: Vec::new(), leaf: Some(LeafKind::Ray), label: None });
            children.push(cid);
        } else {
            children.push(grow(rng, specs, child_level, depth + 1, q, max_levels, false));
        }
    }
    specs[at].children = children;
    id
}

/// The same tree with fresh random ids and shuffled child lists, together
/// with the id translation.
pub fn relabeled_copy<R: Rng + ?Sized>(rng: &mut R, tree: &TreePresentation) -> (TreePresentation, BTreeMap<NodeId, NodeId>) {
    let specs = tree.to_specs();
    let mut pool: Vec<u64> = (0..(specs.len() as u64 * 10)).collect();
    pool.shuffle(rng);
    let map: BTreeMap<NodeId, NodeId> = specs.iter().zip(pool).map(|(s, new)| (s.id, NodeId(new))).collect();
    let mut out: Vec<NodeSpec> = specs
        .into_iter()
        .map(|mut s| {
            s.id = map[&s.id];
            s.children = s.children.iter().map(|c| map[c]).collect();
            s.children.shuffle(rng);
            s
        })
        .collect();
    out.shuffle(rng);
    (TreePresentation::from_specs(out).expect("relabeling preserves validity"), map)
}

/// Moves one branching node (at least two children, not the root) halfway
/// up to its parent. This changes the separation level of the rays below
/// it. `None` when the tree has no such node.
pub fn perturb_branch_level<R: Rng + ?Sized>(rng: &mut R, tree: &TreePresentation) -> Option<TreePresentation> {
    let candidates: Vec<NodeId> = tree
        .nodes()
        .filter(|n| n.id() != tree.root() && n.kind().is_none())
        .filter(|n| tree.children(n.id()).map(|c| c.len() >= 2).unwrap_or(false))
        .map(|n| n.id())
        .collect();
    if candidates.is_empty() {
        return None;
    }
    let pick = candidates[rng.random_range(0..candidates.len())];
    let parent = tree.parent(pick).ok()??;
    let parent_level = tree.node(parent).ok()?.level().value().clone();
    let mut specs = tree.to_specs();
    for s in &mut specs {
        if s.id == pick {
            s.level = Level::new((s.level.value() + &parent_level) * rat(1, 2)).ok()?;
        }
    }
    TreePresentation::from_specs(specs).ok()
}

pub fn random_end_map<R: Rng + ?Sized>(
    rng: &mut R,
    source: &FiniteUltrametricSpace,
    target: &FiniteUltrametricSpace,
) -> EndMap {
    let assignment = (0..source.len()).map(|_| rng.random_range(0..target.len())).collect();
    EndMap::from_indices(source.clone(), target.clone(), assignment).expect("indices in range")
}

/// A random step modulus with at most `max_steps` jumps on the grid
/// `k / grid`.
pub fn random_step_modulus<R: Rng + ?Sized>(rng: &mut R, grid: i64, max_steps: usize) -> StepModulus {
    let steps = rng.random_range(0..=max_steps.min(grid as usize));
    let mut xs: Vec<i64> = (1..=grid).collect();
    xs.shuffle(rng);
    let mut xs: Vec<i64> = xs.into_iter().take(steps).collect();
    xs.sort_unstable();
    let mut ys: Vec<i64> = (0..steps).map(|_| rng.random_range(0..=grid)).collect();
    ys.sort_unstable();
    let breakpoints = std::iter::once(Rational::zero()).chain(xs.iter().map(|&x| rat(x, grid))).collect();
    let values = std::iter::once(Rational::zero()).chain(ys.iter().map(|&y| rat(y, grid))).collect();
    StepModulus::new(breakpoints, values).expect("sorted grid data")
}

/// Same `σ`, with every reparametrization replaced below the leaf's
/// nearest separation level by a random proper piece. The result is
/// compatible whenever `m` is.
pub fn tail_variant<R: Rng + ?Sized>(rng: &mut R, m: &RadialTreeMap) -> RadialTreeMap {
    let source = m.source();
    let leaves = source.ray_leaves();
    let mut reparam = BTreeMap::new();
    for &f in &leaves {
        let g = m.reparam(f).expect("leaf");
        let mut cut = Rational::one();
        for &h in &leaves {
            if let Some(l) = source.carrier_meet_level(f, h).expect("leaves") {
                if *l.value() < cut {
                    cut = l.value().clone();
                }
            }
        }
        let at_cut = g.eval(&cut);
        let b = &cut * rat(rng.random_range(1..=15), 16);
        let y = &at_cut * rat(rng.random_range(1..=15), 16);
        let mut xs = vec![Rational::zero(), b, cut.clone()];
        let mut ys = vec![Rational::zero(), y, at_cut];
        for (x, v) in g.points() {
            if *x > cut {
                xs.push(x.clone());
                ys.push(v.clone());
            }
        }
        reparam.insert(f, PiecewiseLinear::new(xs, ys).expect("monotone tail"));
    }
    RadialTreeMap::new(source.clone(), m.target().clone(), m.sigma().clone(), reparam).expect("same shape")
}

/// `n` points `x0…` pairwise at distance `near`, plus `y` at distance
/// `far > near` from all of them.
pub fn star_space(n: usize, near: &Rational, far: &Rational) -> FiniteUltrametricSpace {
    let mut names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    names.push("y".into());
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((names[i].clone(), names[j].clone(), near.clone()));
        }
        pairs.push((names[i].clone(), "y".to_string(), far.clone()));
    }
    FiniteUltrametricSpace::from_pairs(&names, &pairs).expect("star is ultrametric")
}

/// The identity-on-labels map between two stars that keeps the near
/// distance and pushes `y` further out; its induced tree map is metrically
/// proper yet pulls a bounded ball back onto a cut set with more than `n`
/// points.
pub fn star_family_map(n: usize) -> EndMap {
    let near = rat(1, 4);
    let source = star_space(n, &near, &rat(1, 2));
    let target = star_space(n, &near, &rat(3, 4));
    let assignment = (0..source.len()).collect();
    EndMap::from_indices(source, target, assignment).expect("same labels")
}
