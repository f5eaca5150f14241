//! Brute-force oracles shared by the integration tests. They deliberately
//! avoid the library's own algorithms.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use ultratree::morphisms::StepModulus;
use ultratree::rational::to_f64;
use ultratree::{NodeId, Rational, TreePresentation};

/// Separation level of two leaves, found by walking parent pointers.
pub fn meet_by_ancestors(tree: &TreePresentation, a: NodeId, b: NodeId) -> Rational {
    let mut above_a = BTreeSet::new();
    let mut cur = Some(a);
    while let Some(id) = cur {
        above_a.insert(id);
        cur = tree.parent(id).unwrap();
    }
    let mut cur = Some(b);
    while let Some(id) = cur {
        if above_a.contains(&id) {
            return tree.node(id).unwrap().level().value().clone();
        }
        cur = tree.parent(id).unwrap();
    }
    unreachable!("leaves of one tree share the root")
}

/// All pairwise separation levels of RAY leaves, keyed by end label.
pub fn meet_table(tree: &TreePresentation) -> BTreeMap<(String, String), Rational> {
    let leaves = tree.ray_leaves();
    let mut out = BTreeMap::new();
    for &a in &leaves {
        for &b in &leaves {
            if a != b {
                let key = (tree.end_label(a).unwrap(), tree.end_label(b).unwrap());
                out.insert(key, meet_by_ancestors(tree, a, b));
            }
        }
    }
    out
}

/// Sorted multiset of pairwise separation levels; an isometry invariant.
pub fn meet_multiset(tree: &TreePresentation) -> Vec<Rational> {
    let leaves = tree.ray_leaves();
    let mut out = Vec::new();
    for (k, &a) in leaves.iter().enumerate() {
        for &b in &leaves[k + 1..] {
            out.push(meet_by_ancestors(tree, a, b));
        }
    }
    out.sort();
    out
}

/// Whether a leaf map is a bijection of RAY leaves preserving every pairwise
/// separation level.
pub fn preserves_meets(a: &TreePresentation, b: &TreePresentation, map: &BTreeMap<NodeId, NodeId>) -> bool {
    let la = a.ray_leaves();
    let lb: BTreeSet<NodeId> = b.ray_leaves().into_iter().collect();
    let images: BTreeSet<NodeId> = la.iter().filter_map(|l| map.get(l).copied()).collect();
    if images != lb || la.len() != lb.len() {
        return false;
    }
    for (k, &x) in la.iter().enumerate() {
        for &y in &la[k + 1..] {
            if meet_by_ancestors(a, x, y) != meet_by_ancestors(b, map[&x], map[&y]) {
                return false;
            }
        }
    }
    true
}

/// The literal sup-over-chords definition on the grid `k / n`: for every
/// grid point `x`, the largest value at `x` of a chord between grid points
/// `x1 <= x <= x2` of the step function, with the value at 1 forced to 1.
///
/// For each left end `x1` a suffix maximum of chord slopes to `x2 >= x`
/// makes this quadratic instead of cubic.
pub fn grid_majorant(rho: &StepModulus, n: usize) -> Vec<f64> {
    let bps: Vec<f64> = rho.breakpoints().iter().map(to_f64).collect();
    let vals: Vec<f64> = rho.values().iter().map(to_f64).collect();
    let step = |x: f64| -> f64 {
        let mut v = 0.0;
        for (b, y) in bps.iter().zip(&vals) {
            if *b <= x + 1e-15 {
                v = *y;
            }
        }
        v
    };
    let mut r: Vec<f64> = (0..=n).map(|k| step(k as f64 / n as f64)).collect();
    r[n] = 1.0;
    let mut best = r.clone();
    for i in 0..n {
        let mut suffix = vec![f64::NEG_INFINITY; n + 2];
        for j in (i + 1..=n).rev() {
            let slope = (r[j] - r[i]) / ((j - i) as f64 / n as f64);
            suffix[j] = suffix[j + 1].max(slope);
        }
        for k in i + 1..=n {
            let v = r[i] + (k - i) as f64 / n as f64 * suffix[k];
            if v > best[k] {
                best[k] = v;
            }
        }
    }
    best
}
