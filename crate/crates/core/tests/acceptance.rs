//! Acceptance run: every criterion prints one PASS/FAIL line; the process
//! fails if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::Rng;
use ultratree::generate::{
    perturb_branch_level, random_complete_tree, random_end_map, random_step_modulus, random_ultrametric,
    relabeled_copy, seeded, star_family_map, tail_variant,
};
use ultratree::morphisms::{
    all_pairs, breakpoint_points, check_lipschitz1, component_map_at, homotopy_bound_check,
    homotopy_component_check, homotopy_eval, nonrooted_end_map, properness_witness, reroot, sample_pairs,
    sample_point, sufficient_source_level,
};
use ultratree::rational::{rat, to_f64};
use ultratree::tree::APPROX_TOLERANCE;
use ultratree::{
    concave_majorant, ends_of, induce_end_map, induce_tree_map, maps_equivalent, tree_of, ApproxPoint,
    EndMap, FiniteUltrametricSpace, Level, NodeId, RadialTreeMap, Rational, StepModulus, TreePoint,
    TreePresentation,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(limit: Duration, start: Instant, detail: String) -> Outcome {
    let took = start.elapsed();
    if took > limit {
        Err(format!("{detail}; took {:.2?}, limit {:.0?}", took, limit))
    } else {
        Ok(format!("{detail} in {:.2?}", took))
    }
}

fn random_space<R: Rng>(rng: &mut R, max: usize) -> FiniteUltrametricSpace {
    let n = rng.random_range(1..=max);
    random_ultrametric(rng, n)
}

fn random_map<R: Rng>(rng: &mut R) -> EndMap {
    let s = random_space(rng, 16);
    let t = random_space(rng, 16);
    random_end_map(rng, &s, &t)
}

fn roundtrip_isometry() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(1);
    let mut largest = 0;
    for k in 0..200 {
        let u = random_space(&mut rng, 64);
        largest = largest.max(u.len());
        let back = ends_of(&tree_of(&u).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?.space;
        ensure!(back.len() == u.len(), "space {k}: {} points came back as {}", u.len(), back.len());
        for i in 0..u.len() {
            for j in 0..u.len() {
                let found = back.distance_by_label(u.label(i), u.label(j)).map_err(|e| e.to_string())?;
                ensure!(found == u.distance(i, j), "space {k}: d({},{}) changed", u.label(i), u.label(j));
            }
        }
    }
    within(Duration::from_secs(5), start, format!("200 spaces up to {largest} points, exact"))
}

fn tree_roundtrip() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(2);
    let mut most = 0;
    for k in 0..200 {
        let t = random_complete_tree(&mut rng, 64, 8);
        most = most.max(t.ray_leaves().len());
        let rebuilt = tree_of(&ends_of(&t).map_err(|e| e.to_string())?.space).map_err(|e| e.to_string())?;
        let map = t.canonicalize().rooted_isometric(&rebuilt.canonicalize());
        let map = map.ok_or_else(|| format!("tree {k} rejected"))?;
        ensure!(common::preserves_meets(&t, &rebuilt, &map), "tree {k}: correspondence fails the meet oracle");
    }
    within(Duration::from_secs(5), start, format!("200 trees up to {most} ends accepted"))
}

fn majorant_correctness() -> Outcome {
    let mut rng = seeded(3);
    let mut worst = 0.0f64;
    for k in 0..50 {
        let rho = random_step_modulus(&mut rng, 1024, 24);
        let lambda = concave_majorant(&rho);
        for (b, v) in rho.breakpoints().iter().zip(rho.values()) {
            ensure!(lambda.eval(b) >= *v, "modulus {k}: majorant below the step at {b}");
        }
        let slopes = lambda.slopes();
        ensure!(slopes.windows(2).all(|w| w[0] > w[1]), "modulus {k}: chord slopes not strictly decreasing");
        ensure!(lambda.values().windows(2).all(|w| w[0] <= w[1]), "modulus {k}: not nondecreasing");
        let xs = lambda.breakpoints();
        for i in 1..xs.len() {
            for j in (i + 1)..xs.len() {
                // λ(a)/a <= λ(b)/b for b < a.
                let (b, a) = (&xs[i], &xs[j]);
                ensure!(lambda.eval(a) * b <= lambda.eval(b) * a, "modulus {k}: λ(u)/u increases");
            }
        }
        let oracle = common::grid_majorant(&rho, 1024);
        for (i, o) in oracle.iter().enumerate() {
            let diff = (to_f64(&lambda.eval(&rat(i as i64, 1024))) - o).abs();
            worst = worst.max(diff);
            ensure!(diff <= 1e-9, "modulus {k}: grid oracle differs by {diff:e} at {i}/1024");
        }
    }
    let s3 = StepModulus::new(vec![Rational::zero(), rat(1, 4)], vec![Rational::zero(), rat(1, 2)])
        .map_err(|e| e.to_string())?;
    let fixture = concave_majorant(&s3);
    for k in 0..=64 {
        let u = rat(k, 64);
        let expected = if u <= rat(1, 4) { &u * rat(2, 1) } else { rat(1, 2) + rat(2, 3) * (&u - rat(1, 4)) };
        ensure!(fixture.eval(&u) == expected, "fixture differs at {u}");
    }
    Ok(format!("50 moduli, max grid deviation {worst:.1e}; fixture exact"))
}

fn lipschitz_of_induced_maps() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(4);
    let mut pairs_total = 0;
    for k in 0..50 {
        let f = random_map(&mut rng);
        let m = induce_tree_map(&f).map_err(|e| e.to_string())?;
        let mut pairs = all_pairs(&breakpoint_points(&m).map_err(|e| e.to_string())?);
        pairs.extend(sample_pairs(m.source(), 10_000, &mut rng));
        pairs_total += pairs.len();
        let report = check_lipschitz1(&m, &pairs).map_err(|e| e.to_string())?;
        ensure!(report.ok, "map {k}: {}", report.summary());
    }
    within(Duration::from_secs(10), start, format!("50 maps, {pairs_total} pairs, zero expansions"))
}

fn functor_identities() -> Outcome {
    let mut rng = seeded(5);
    for k in 0..50 {
        let f = random_map(&mut rng);
        let m = induce_tree_map(&f).map_err(|e| e.to_string())?;
        let back = induce_end_map(&m).map_err(|e| e.to_string())?;
        ensure!(back.same_function(&f), "map {k}: end map not recovered");
    }
    for k in 0..30 {
        let a = random_space(&mut rng, 12);
        let b = random_space(&mut rng, 12);
        let c = random_space(&mut rng, 12);
        let (f, g) = (random_end_map(&mut rng, &a, &b), random_end_map(&mut rng, &b, &c));
        let (fh, gh) = (induce_tree_map(&f).map_err(|e| e.to_string())?, induce_tree_map(&g).map_err(|e| e.to_string())?);
        let composite = fh.then(&gh).map_err(|e| e.to_string())?;
        let direct = induce_end_map(&composite).map_err(|e| e.to_string())?;
        let gf = f.then(&g).map_err(|e| e.to_string())?;
        ensure!(direct.same_function(&gf), "pair {k}: composite does not induce g∘f");
        let chained = induce_end_map(&fh).and_then(|x| x.then(&induce_end_map(&gh)?)).map_err(|e| e.to_string())?;
        ensure!(direct.same_function(&chained), "pair {k}: induced end maps do not compose");
    }
    Ok("50 round trips and 30 composites exact".into())
}

/// An induced map whose source has at least two points and whose target has
/// at least two points, so one image can be moved.
fn movable_map<R: Rng>(rng: &mut R) -> EndMap {
    loop {
        let f = random_map(rng);
        if f.source().len() >= 2 && f.target().len() >= 2 {
            return f;
        }
    }
}

fn equivalence_iff_same_end_map() -> Outcome {
    let mut rng = seeded(6);
    for k in 0..30 {
        let f = movable_map(&mut rng);
        let m = induce_tree_map(&f).map_err(|e| e.to_string())?;
        let other = tail_variant(&mut rng, &m);
        ensure!(other.reparams() != m.reparams(), "pair {k}: variant has the same reparametrizations");
        let report = maps_equivalent(&m, &other).map_err(|e| e.to_string())?;
        ensure!(report.equivalent && report.by_components, "pair {k}: same σ judged inequivalent");
    }
    for k in 0..30 {
        let f = movable_map(&mut rng);
        let i = rng.random_range(0..f.source().len());
        let old = f.image_index(i);
        let new = (old + rng.random_range(1..f.target().len())) % f.target().len();
        let assignment = (0..f.source().len()).map(|j| if j == i { new } else { f.image_index(j) }).collect();
        let g = EndMap::from_indices(f.source().clone(), f.target().clone(), assignment).map_err(|e| e.to_string())?;
        let (m, other) = (induce_tree_map(&f).map_err(|e| e.to_string())?, induce_tree_map(&g).map_err(|e| e.to_string())?);
        let report = maps_equivalent(&m, &other).map_err(|e| e.to_string())?;
        ensure!(!report.equivalent && !report.by_components, "pair {k}: moved σ judged equivalent");
        // Independent look at the deepest component maps.
        let a = component_map_at(&m, &report.target_level, Some(&report.source_level)).map_err(|e| e.to_string())?;
        let b = component_map_at(&other, &report.target_level, Some(&report.source_level)).map_err(|e| e.to_string())?;
        let differs = a.pairs.iter().zip(&b.pairs).any(|(p, q)| p.target.carriers != q.target.carriers);
        ensure!(differs, "pair {k}: deep component maps agree");
    }
    Ok("30 equivalent and 30 inequivalent pairs, cross-checked on components".into())
}

fn approx_gap(tree: &TreePresentation, p: &ApproxPoint, q: &TreePoint) -> f64 {
    tree.approx_distance(p, &ApproxPoint::from_exact(q)).unwrap().abs()
}

fn homotopy_contracts() -> Outcome {
    let mut rng = seeded(7);
    let mut maps: Vec<(RadialTreeMap, RadialTreeMap)> = Vec::new();
    for _ in 0..10 {
        let m = induce_tree_map(&random_map(&mut rng)).map_err(|e| e.to_string())?;
        let other = tail_variant(&mut rng, &m);
        maps.push((m, other));
    }
    let mut worst_end = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    for k in 0..1000 {
        let (m, other) = &maps[k % maps.len()];
        let x = sample_point(m.source(), &mut rng);
        let y = sample_point(m.source(), &mut rng);
        let t: f64 = rng.random_range(0.0..=1.0);
        let target = m.target();
        let h0 = homotopy_eval(m, other, &x, 0.0).map_err(|e| e.to_string())?;
        let h1 = homotopy_eval(m, other, &x, 1.0).map_err(|e| e.to_string())?;
        let e0 = approx_gap(target, &h0, &m.eval(&x).map_err(|e| e.to_string())?);
        let e1 = approx_gap(target, &h1, &other.eval(&x).map_err(|e| e.to_string())?);
        worst_end = worst_end.max(e0).max(e1);
        ensure!(e0 <= 1e-12 && e1 <= 1e-12, "sample {k}: endpoints off by {e0:e}, {e1:e}");
        let report = homotopy_bound_check(m, other, &x, &y, &[t]).map_err(|e| e.to_string())?;
        worst_excess = worst_excess.max(report.worst_excess);
        ensure!(report.ok, "sample {k}: distance bound broken at t={t}");
    }
    let ts: Vec<f64> = (0..=32).map(|i| i as f64 / 32.0).collect();
    let mut stays = 0;
    for (m, other) in &maps {
        let levels: Vec<Level> = m.target().nodes().map(|n| n.level().clone()).filter(|l| !l.is_root()).collect();
        for mu in levels {
            let nu = [m, other]
                .iter()
                .map(|map| sufficient_source_level(map, &mu).unwrap().unwrap())
                .min()
                .unwrap();
            let p = sample_point(m.source(), &mut rng);
            let x = TreePoint::new(p.carrier, Level::new(nu.value() * p.level.value()).unwrap());
            let report = homotopy_component_check(m, other, &mu, &x, &ts).map_err(|e| e.to_string())?;
            ensure!(report.ok, "path of {x} leaves its component beyond {mu} at t={:?}", report.escaped_at);
            // The component is the one containing the other endpoint too.
            ensure!(
                m.target().in_subtree(&report.component, &other.eval(&x).unwrap()).unwrap(),
                "endpoints of {x} lie in different components"
            );
            stays += 1;
        }
    }
    Ok(format!(
        "endpoints within {worst_end:.1e}, max bound excess {worst_excess:.1e} (tolerance {APPROX_TOLERANCE:e}/1e-9), {stays} component paths"
    ))
}

fn properness_family() -> Outcome {
    let mut previous = 0;
    let mut sizes = Vec::new();
    for n in (2..=256).step_by(2) {
        let m = induce_tree_map(&star_family_map(n)).map_err(|e| e.to_string())?;
        let w = properness_witness(&m, &Level::new(rat(1, 4)).unwrap()).map_err(|e| e.to_string())?;
        ensure!(w.verified, "n={n}: cut set not inside the preimage");
        ensure!(w.cut_set_size >= n, "n={n}: witness {} < n", w.cut_set_size);
        ensure!(w.cut_set_size > previous, "n={n}: witness did not grow");
        previous = w.cut_set_size;
        if n.is_power_of_two() {
            sizes.push(format!("{n}→{}", w.cut_set_size));
        }
    }
    Ok(format!("witnesses strictly increasing: {}", sizes.join(", ")))
}

fn isometry_detection() -> Outcome {
    let mut rng = seeded(9);
    let (mut accepted, mut rejected) = (0, 0);
    while accepted < 100 || rejected < 100 {
        let t = random_complete_tree(&mut rng, 64, 8);
        if accepted < 100 {
            let (copy, _) = relabeled_copy(&mut rng, &t);
            let map = t.rooted_isometric(&copy).ok_or_else(|| format!("copy {accepted} rejected"))?;
            ensure!(common::preserves_meets(&t, &copy, &map), "copy {accepted}: bijection fails the meet oracle");
            accepted += 1;
        }
        if rejected < 100 {
            if let Some(bent) = perturb_branch_level(&mut rng, &t) {
                ensure!(
                    common::meet_multiset(&t) != common::meet_multiset(&bent),
                    "perturbation {rejected} kept every separation level"
                );
                let (bent, _) = relabeled_copy(&mut rng, &bent);
                ensure!(t.rooted_isometric(&bent).is_none(), "perturbation {rejected} accepted");
                rejected += 1;
            }
        }
    }
    Ok("100 relabeled copies accepted, 100 perturbations rejected".into())
}

/// Leaves `f, g, h` with `d(f,g) < d(f,h)`, if any.
fn uneven_triple(tree: &TreePresentation) -> Option<(NodeId, NodeId, NodeId)> {
    let leaves = tree.ray_leaves();
    for &f in &leaves {
        for &g in &leaves {
            for &h in &leaves {
                if f != g && f != h && g != h {
                    let (dg, dh) = (common::meet_by_ancestors(tree, f, g), common::meet_by_ancestors(tree, f, h));
                    if dg < dh {
                        return Some((f, g, h));
                    }
                }
            }
        }
    }
    None
}

fn nonrooted_bound() -> Outcome {
    let mut rng = seeded(10);
    let mut checked = 0;
    while checked < 30 {
        let t = random_complete_tree(&mut rng, 24, 6);
        let Some((f, g, h)) = uneven_triple(&t) else { continue };

        let p = sample_point(&t, &mut rng);
        let (source, sigma) = reroot(&t, &p).map_err(|e| e.to_string())?;
        let report = nonrooted_end_map(&source, &t, &sigma, &p).map_err(|e| e.to_string())?;
        ensure!(report.ok, "tree {checked}: {}", report.summary());
        let u = p.level.value();
        let (s, e) = (ends_of(&source).unwrap(), ends_of(&t).unwrap());
        for i in 0..s.space.len() {
            for j in (i + 1)..s.space.len() {
                let d = s.space.distance(i, j);
                let (x, y) = (e.point_of(sigma[&s.leaf_of(i)]).unwrap(), e.point_of(sigma[&s.leaf_of(j)]).unwrap());
                let dd = e.space.distance(x, y);
                ensure!(u * d <= *dd && dd * u <= *d, "tree {checked}: oracle finds a pair out of bounds");
            }
        }
        ensure!(report.offset.d0.q() * u == Rational::one(), "tree {checked}: d0 is not -ln u_p");

        // Root offset chosen so that the ratio d(f,h)/d(f,g) exceeds 1/u^2.
        let ratio = common::meet_by_ancestors(&t, f, h) / common::meet_by_ancestors(&t, f, g);
        let level = (Rational::one() + Rational::one() / &ratio) * rat(1, 2);
        let q = TreePoint::new(f, Level::new(level).unwrap());
        let (source, sigma) = reroot(&t, &q).map_err(|e| e.to_string())?;
        let inverse: BTreeMap<NodeId, NodeId> = sigma.iter().map(|(a, b)| (*b, *a)).collect();
        let mut swapped = sigma.clone();
        swapped.insert(inverse[&g], h);
        swapped.insert(inverse[&h], g);
        let report = nonrooted_end_map(&source, &t, &swapped, &q).map_err(|e| e.to_string())?;
        ensure!(!report.ok, "tree {checked}: distorted map passed");
        checked += 1;
    }
    Ok("30 re-rooted trees within [u_p, 1/u_p]; 30 constructed distortions detected".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("round-trip isometry of ultrametric spaces", roundtrip_isometry),
        ("tree round-trip up to rooted isometry", tree_roundtrip),
        ("concave majorant correctness", majorant_correctness),
        ("induced tree maps are 1-Lipschitz", lipschitz_of_induced_maps),
        ("functor identities on maps", functor_identities),
        ("equivalence iff equal end maps", equivalence_iff_same_end_map),
        ("homotopy contracts", homotopy_contracts),
        ("properness counterexample family", properness_family),
        ("rooted isometry detection", isometry_detection),
        ("non-rooted bi-Lipschitz bound", nonrooted_bound),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
