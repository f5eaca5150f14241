use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use ultratree::generate::seeded;
use ultratree::morphisms::{
    all_pairs, breakpoint_points, check_bornologous, check_lipschitz1, check_metrically_proper, homotopy_eval,
    induce_tree_map_detailed, sample_pairs,
};
use ultratree::simplicial::compare;
use ultratree::{
    ends_of, freudenthal, induce_end_map, maps_equivalent, roundtrip_tree_check, roundtrip_ultrametric_check,
    tree_of, validate_ultrametric, EndMap, Error, FiniteUltrametricSpace, Level, NodeId, RadialTreeMap,
    SimplicialTreeInput, TreePoint, TreePresentation,
};

#[derive(Parser)]
#[command(name = "ultratree", version, about = "Rooted R-trees, ultrametric end spaces and the maps between them")]
struct Cli {
    /// Input JSON file; `-` reads standard input.
    #[arg(long, short, global = true, default_value = "-")]
    input: String,
    /// Output file; standard output when absent.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Emit trees as Graphviz DOT instead of JSON.
    #[arg(long, global = true)]
    dot: bool,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of sampled point pairs.
    #[arg(long, global = true, default_value_t = 10_000)]
    samples: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an ultrametric space, tree, map or simplicial tree.
    Validate,
    /// Tree of an ultrametric space.
    ToTree {
        /// Also check that the ends of the tree reproduce the space.
        #[arg(long)]
        roundtrip: bool,
    },
    /// End space of a tree.
    Ends {
        /// Also check that the tree of the ends is rooted isometric to the input.
        #[arg(long)]
        roundtrip: bool,
    },
    /// Round-trip check of a space or a tree.
    Roundtrip,
    /// Induced tree map of an end map, with its checks.
    Induce,
    /// Run one check on a tree map (an end map is induced first).
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        /// Second map, for `equiv`.
        #[arg(long)]
        other: Option<PathBuf>,
    },
    /// Point of the straight-line homotopy between two equivalent maps.
    HomotopyEval {
        #[arg(long)]
        other: PathBuf,
        /// Source point as `LEAF@LEVEL`, the leaf given by end label or node id.
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
    },
    /// Remove every branch that carries no ray.
    Prune,
    /// Rooted isometry test of two trees.
    Isometry {
        #[arg(long)]
        other: PathBuf,
    },
    /// Freudenthal ends of a simplicial tree.
    Freudenthal {
        /// Second simplicial tree to compare up to proper homotopy.
        #[arg(long)]
        other: Option<PathBuf>,
    },
    /// Graphviz rendering of a tree, or of the tree of a space.
    ExportDot,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Lipschitz,
    Proper,
    Coarse,
    Equiv,
}

/// What a command produced and whether its check passed.
struct Outcome {
    body: String,
    ok: bool,
}

impl Outcome {
    fn json(value: Value, ok: bool) -> Self {
        Outcome { body: pretty(&value), ok }
    }
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

enum Input {
    Space(Value),
    Tree(TreePresentation),
    EndMap(EndMap),
    Radial(RadialTreeMap),
    Simplicial(SimplicialTreeInput),
}

impl Input {
    fn kind(&self) -> &'static str {
        match self {
            Input::Space(_) => "ultrametric space",
            Input::Tree(_) => "tree",
            Input::EndMap(_) => "end map",
            Input::Radial(_) => "tree map",
            Input::Simplicial(_) => "simplicial tree",
        }
    }
}

fn read_json(path: &str) -> Result<Value, Error> {
    let text = if path == "-" {
        std::io::read_to_string(std::io::stdin())?
    } else {
        fs::read_to_string(path)?
    };
    Ok(serde_json::from_str(&text)?)
}

/// Reads a file and decides its kind from its top-level keys.
fn load(path: &str) -> Result<Input, Error> {
    let value = read_json(path)?;
    let has = |k: &str| value.get(k).is_some();
    if has("sigma") {
        Ok(Input::Radial(RadialTreeMap::from_json(&value)?))
    } else if has("map") {
        Ok(Input::EndMap(EndMap::from_json(&value)?))
    } else if has("nodes") {
        Ok(Input::Tree(TreePresentation::from_json(&value)?))
    } else if has("vertices") {
        Ok(Input::Simplicial(SimplicialTreeInput::from_json(&value)?))
    } else if has("points") {
        Ok(Input::Space(value))
    } else {
        Err(Error::Malformed(format!(
            "{path}: expected a space (points), tree (nodes), end map (map), tree map (sigma) or simplicial tree (vertices)"
        )))
    }
}

fn wrong_kind(input: &Input, wanted: &str) -> Error {
    Error::Malformed(format!("expected {wanted}, got {}", input.kind()))
}

fn load_space(path: &str) -> Result<FiniteUltrametricSpace, Error> {
    match load(path)? {
        Input::Space(v) => FiniteUltrametricSpace::from_json(&v),
        other => Err(wrong_kind(&other, "an ultrametric space")),
    }
}

fn load_tree(path: &str) -> Result<TreePresentation, Error> {
    match load(path)? {
        Input::Tree(t) => Ok(t),
        other => Err(wrong_kind(&other, "a tree")),
    }
}

/// A tree map, inducing one when given an end map.
fn load_map(path: &str) -> Result<RadialTreeMap, Error> {
    match load(path)? {
        Input::Radial(m) => Ok(m),
        Input::EndMap(f) => Ok(induce_tree_map_detailed(&f)?.map),
        other => Err(wrong_kind(&other, "a tree map or an end map")),
    }
}

fn load_simplicial(path: &str) -> Result<SimplicialTreeInput, Error> {
    match load(path)? {
        Input::Simplicial(s) => Ok(s),
        other => Err(wrong_kind(&other, "a simplicial tree")),
    }
}

fn path_str(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn tree_out(cli: &Cli, tree: &TreePresentation) -> String {
    if cli.dot {
        tree.to_dot()
    } else {
        pretty(&tree.to_json())
    }
}

fn parse_point(tree: &TreePresentation, spec: &str) -> Result<TreePoint, Error> {
    let (leaf, level) =
        spec.split_once('@').ok_or_else(|| Error::Malformed(format!("point `{spec}` is not LEAF@LEVEL")))?;
    let carrier = match tree.leaf_by_label(leaf) {
        Some(id) => id,
        None => leaf.parse().map(NodeId).map_err(|_| Error::UnknownLabel(leaf.to_string()))?,
    };
    let p = TreePoint::new(carrier, Level::parse(level)?);
    tree.check_point(&p)?;
    Ok(p)
}

fn lipschitz(cli: &Cli, m: &RadialTreeMap) -> Result<Value, Error> {
    let mut pairs = all_pairs(&breakpoint_points(m)?);
    pairs.extend(sample_pairs(m.source(), cli.samples, &mut seeded(cli.seed)));
    Ok(to_value(&check_lipschitz1(m, &pairs)?))
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let input = cli.input.as_str();
    Ok(match &cli.command {
        Command::Validate => match load(input)? {
            Input::Space(v) => {
                let (labels, matrix) = ultratree::ultrametric::parse_space_json(&v)?;
                let report = validate_ultrametric(&labels, &matrix)?;
                let summary = report.summary();
                let mut value = to_value(&report);
                value["summary"] = json!(summary);
                Outcome::json(value, report.ok)
            }
            Input::Tree(t) => {
                let complete = t.is_geodesically_complete();
                Outcome::json(
                    json!({"ok": true, "kind": "tree", "nodes": t.len(), "ends": t.ray_leaves().len(), "geodesically_complete": complete}),
                    true,
                )
            }
            Input::EndMap(f) => Outcome::json(
                json!({"ok": true, "kind": "end map", "source_points": f.source().len(), "target_points": f.target().len()}),
                true,
            ),
            Input::Radial(m) => {
                let verdict = m.check_compatibility();
                let ok = verdict.is_ok();
                Outcome::json(
                    json!({"ok": ok, "kind": "tree map", "compatibility": verdict.err().map_or("ok".to_string(), |e| e.to_string())}),
                    ok,
                )
            }
            Input::Simplicial(s) => {
                ultratree::simplicial::presentation(&s)?;
                Outcome::json(json!({"ok": true, "kind": "simplicial tree", "vertices": s.vertices.len()}), true)
            }
        },
        Command::ToTree { roundtrip } => {
            let space = load_space(input)?;
            let tree = tree_of(&space)?;
            let ok = if *roundtrip { roundtrip_ultrametric_check(&space)?.ok } else { true };
            Outcome { body: tree_out(cli, &tree), ok }
        }
        Command::Ends { roundtrip } => {
            let tree = load_tree(input)?;
            let view = ends_of(&tree)?;
            let ok = if *roundtrip { roundtrip_tree_check(&tree)?.ok } else { true };
            if cli.dot {
                Outcome { body: tree_of(&view.space)?.to_dot(), ok }
            } else {
                Outcome::json(view.space.to_json(), ok)
            }
        }
        Command::Roundtrip => match load(input)? {
            Input::Space(v) => {
                let report = roundtrip_ultrametric_check(&FiniteUltrametricSpace::from_json(&v)?)?;
                Outcome::json(to_value(&report), report.ok)
            }
            Input::Tree(t) => {
                let report = roundtrip_tree_check(&t)?;
                Outcome::json(to_value(&report), report.ok)
            }
            other => return Err(wrong_kind(&other, "an ultrametric space or a tree")),
        },
        Command::Induce => {
            let f = match load(input)? {
                Input::EndMap(f) => f,
                other => return Err(wrong_kind(&other, "an end map")),
            };
            let induced = induce_tree_map_detailed(&f)?;
            let lip = lipschitz(cli, &induced.map)?;
            let proper = check_metrically_proper(&induced.map)?;
            let coarse = check_bornologous(&induced.map);
            let back = induce_end_map(&induced.map)?.same_function(&f);
            let ok = lip["ok"] == json!(true) && proper.ok && coarse.ok && back;
            if cli.dot {
                return Ok(Outcome { body: induced.map.source().to_dot(), ok });
            }
            let mut value = to_value(&induced);
            value["checks"] = json!({
                "lipschitz": lip,
                "proper": to_value(&proper),
                "bornologous": to_value(&coarse),
                "recovers_end_map": back,
            });
            Outcome::json(value, ok)
        }
        Command::Check { kind, other } => {
            let m = load_map(input)?;
            match kind {
                CheckKind::Lipschitz => {
                    let value = lipschitz(cli, &m)?;
                    let ok = value["ok"] == json!(true);
                    Outcome::json(value, ok)
                }
                CheckKind::Proper => {
                    let report = check_metrically_proper(&m)?;
                    Outcome::json(to_value(&report), report.ok)
                }
                CheckKind::Coarse => {
                    let report = check_bornologous(&m);
                    Outcome::json(to_value(&report), report.ok)
                }
                CheckKind::Equiv => {
                    let other = other.as_ref().ok_or_else(|| Error::Malformed("`check equiv` needs --other".into()))?;
                    let report = maps_equivalent(&m, &load_map(&path_str(other))?)?;
                    Outcome::json(to_value(&report), report.equivalent)
                }
            }
        }
        Command::HomotopyEval { other, point, t } => {
            if !(0.0..=1.0).contains(t) {
                return Err(Error::Malformed(format!("t = {t} is outside [0,1]")));
            }
            let m = load_map(input)?;
            let o = load_map(&path_str(other))?;
            let x = parse_point(m.source(), point)?;
            let h = homotopy_eval(&m, &o, &x, *t)?;
            let value = json!({
                "x": to_value(&x),
                "t": t,
                "start": to_value(&m.eval(&x)?),
                "end": to_value(&o.eval(&x)?),
                "point": to_value(&h),
                "depth": -h.level.ln(),
            });
            Outcome::json(value, true)
        }
        Command::Prune => {
            let tree = load_tree(input)?;
            Outcome { body: tree_out(cli, &tree.prune()?), ok: true }
        }
        Command::Isometry { other } => {
            let (a, b) = (load_tree(input)?, load_tree(&path_str(other))?);
            let found = a.rooted_isometric(&b);
            let verified = found.as_ref().is_some_and(|c| a.verify_correspondence(&b, c));
            Outcome::json(json!({"isometric": verified, "correspondence": to_value(&found)}), verified)
        }
        Command::Freudenthal { other } => {
            let a = load_simplicial(input)?;
            match other {
                None => Outcome::json(to_value(&freudenthal(&a)?), true),
                Some(p) => {
                    let report = compare(&a, &load_simplicial(&path_str(p))?)?;
                    Outcome::json(to_value(&report), report.equivalent)
                }
            }
        }
        Command::ExportDot => {
            let tree = match load(input)? {
                Input::Tree(t) => t,
                Input::Space(v) => tree_of(&FiniteUltrametricSpace::from_json(&v)?)?,
                other => return Err(wrong_kind(&other, "a tree or an ultrametric space")),
            };
            Outcome { body: tree.to_dot(), ok: true }
        }
    })
}

fn emit(cli: &Cli, body: &str) -> std::io::Result<()> {
    match &cli.output {
        Some(path) => fs::write(path, body),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli, &outcome.body) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("check failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
