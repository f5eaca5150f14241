//! Finite ultrametric spaces of diameter at most 1.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, serde_rational, Rational};

/// One breach of the ultrametric axioms found by [`validate_ultrametric`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonzeroDiagonal {
        point: String,
        #[serde(with = "serde_rational")]
        value: Rational,
    },
    Asymmetric {
        x: String,
        y: String,
        #[serde(with = "serde_rational")]
        forward: Rational,
        #[serde(with = "serde_rational")]
        backward: Rational,
    },
    ZeroOffDiagonal { x: String, y: String },
    OutOfRange {
        x: String,
        y: String,
        #[serde(with = "serde_rational")]
        value: Rational,
    },
    /// `d(x,y) > max(d(x,via), d(via,y))`.
    StrongTriangle {
        x: String,
        via: String,
        y: String,
        #[serde(with = "serde_rational")]
        d_xy: Rational,
        #[serde(with = "serde_rational")]
        d_x_via: Rational,
        #[serde(with = "serde_rational")]
        d_via_y: Rational,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonzeroDiagonal { point, value } => {
                write!(f, "d({point},{point}) = {value} != 0")
            }
            Violation::Asymmetric { x, y, forward, backward } => {
                write!(f, "d({x},{y}) = {forward} but d({y},{x}) = {backward}")
            }
            Violation::ZeroOffDiagonal { x, y } => write!(f, "d({x},{y}) = 0 for distinct points"),
            Violation::OutOfRange { x, y, value } => {
                write!(f, "d({x},{y}) = {value} outside [0,1]")
            }
            Violation::StrongTriangle { x, via, y, d_xy, d_x_via, d_via_y } => write!(
                f,
                "strong triangle inequality fails at ({x},{via},{y}): {d_xy} > max({d_x_via},{d_via_y})"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport { ok: violations.is_empty(), violations }
    }

    pub fn summary(&self) -> String {
        if self.ok {
            "valid ultrametric space of diameter <= 1".to_string()
        } else {
            let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
            format!("{} violation(s): {}", lines.len(), lines.join("; "))
        }
    }
}

/// Checks every axiom on a labelled distance matrix and lists each breach.
///
/// Structural problems (empty input, non-square matrix, duplicate labels) are
/// input errors rather than violations.
pub fn validate_ultrametric(labels: &[String], matrix: &[Vec<Rational>]) -> Result<ValidationReport> {
    let n = labels.len();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
        return Err(Error::Malformed(format!(
            "distance matrix must be {n}x{n} to match the labels"
        )));
    }
    let mut seen = HashMap::new();
    for (i, l) in labels.iter().enumerate() {
        if seen.insert(l.as_str(), i).is_some() {
            return Err(Error::Malformed(format!("duplicate label `{l}`")));
        }
    }

    let mut violations = Vec::new();
    for i in 0..n {
        if !matrix[i][i].is_zero() {
            violations.push(Violation::NonzeroDiagonal {
                point: labels[i].clone(),
                value: matrix[i][i].clone(),
            });
        }
        for j in (i + 1)..n {
            let (a, b) = (&matrix[i][j], &matrix[j][i]);
            if a != b {
                violations.push(Violation::Asymmetric {
                    x: labels[i].clone(),
                    y: labels[j].clone(),
                    forward: a.clone(),
                    backward: b.clone(),
                });
            }
            for v in [a, b] {
                if v.is_negative() || *v > Rational::one() {
                    violations.push(Violation::OutOfRange {
                        x: labels[i].clone(),
                        y: labels[j].clone(),
                        value: v.clone(),
                    });
                    break;
                }
            }
            if a.is_zero() || b.is_zero() {
                violations.push(Violation::ZeroOffDiagonal {
                    x: labels[i].clone(),
                    y: labels[j].clone(),
                });
            }
        }
    }
    for x in 0..n {
        for y in (x + 1)..n {
            let dxy = &matrix[x][y];
            for z in 0..n {
                if z == x || z == y {
                    continue;
                }
                let (dxz, dzy) = (&matrix[x][z], &matrix[z][y]);
                if dxy > dxz.max(dzy) {
                    violations.push(Violation::StrongTriangle {
                        x: labels[x].clone(),
                        via: labels[z].clone(),
                        y: labels[y].clone(),
                        d_xy: dxy.clone(),
                        d_x_via: dxz.clone(),
                        d_via_y: dzy.clone(),
                    });
                }
            }
        }
    }
    Ok(ValidationReport::from_violations(violations))
}

/// A validated finite ultrametric space with exact rational distances in `[0,1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteUltrametricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<Rational>>,
    index: HashMap<String, usize>,
}

/// Shape of a triangle in an ultrametric space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Triangle {
    Equilateral {
        side: Rational,
    },
    /// Two equal long sides and one strictly shorter side.
    Isosceles {
        long_sides: [(String, String); 2],
        long: Rational,
        short_side: (String, String),
        short: Rational,
    },
}

#[derive(Serialize, Deserialize)]
struct SpaceJson {
    points: Vec<String>,
    distances: Vec<(String, String, String)>,
}

/// Parses the JSON interchange format into labels and a square matrix without
/// checking the axioms. Missing pairs are an input error.
pub fn parse_space_json(value: &serde_json::Value) -> Result<(Vec<String>, Vec<Vec<Rational>>)> {
    let raw: SpaceJson = serde_json::from_value(value.clone())?;
    let n = raw.points.len();
    let mut index = HashMap::new();
    for (i, p) in raw.points.iter().enumerate() {
        if index.insert(p.clone(), i).is_some() {
            return Err(Error::Malformed(format!("duplicate label `{p}`")));
        }
    }
    let mut cells: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
    for (x, y, v) in &raw.distances {
        let i = *index.get(x).ok_or_else(|| Error::UnknownLabel(x.clone()))?;
        let j = *index.get(y).ok_or_else(|| Error::UnknownLabel(y.clone()))?;
        let value = parse_rational(v)?;
        if cells[i][j].as_ref().is_some_and(|old| *old != value) {
            return Err(Error::Malformed(format!("conflicting entries for ({x},{y})")));
        }
        cells[i][j] = Some(value);
    }
    let mut matrix = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            matrix[i][j] = match (&cells[i][j], &cells[j][i]) {
                (Some(v), _) | (None, Some(v)) => v.clone(),
                (None, None) if i == j => Rational::zero(),
                (None, None) => {
                    return Err(Error::Malformed(format!(
                        "missing distance for pair ({},{})",
                        raw.points[i], raw.points[j]
                    )))
                }
            };
        }
    }
    Ok((raw.points, matrix))
}

impl FiniteUltrametricSpace {
    pub fn new(labels: Vec<String>, dist: Vec<Vec<Rational>>) -> Result<Self> {
        let report = validate_ultrametric(&labels, &dist)?;
        if !report.ok {
            return Err(Error::InvalidSpace(report.summary()));
        }
        let index = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        Ok(FiniteUltrametricSpace { labels, dist, index })
    }

    /// For matrices that are ultrametric by construction (meet levels of a
    /// tree); skips the cubic triangle check.
    pub(crate) fn from_trusted(labels: Vec<String>, dist: Vec<Vec<Rational>>) -> Self {
        let index = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        FiniteUltrametricSpace { labels, dist, index }
    }

    /// Builds a space from `(x, y, d)` triples over the given labels.
    pub fn from_pairs<S: AsRef<str>>(labels: &[S], pairs: &[(S, S, Rational)]) -> Result<Self> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let json = serde_json::json!({
            "points": labels,
            "distances": pairs
                .iter()
                .map(|(x, y, d)| (x.as_ref(), y.as_ref(), format_rational(d)))
                .collect::<Vec<_>>(),
        });
        Self::from_json(&json)
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let (labels, matrix) = parse_space_json(value)?;
        Self::new(labels, matrix)
    }

    /// Canonical JSON: labels sorted lexicographically, each unordered pair
    /// listed once in that order.
    pub fn to_json(&self) -> serde_json::Value {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.labels[a].cmp(&self.labels[b]));
        let mut distances = Vec::new();
        for (k, &i) in order.iter().enumerate() {
            for &j in &order[k + 1..] {
                distances.push((
                    self.labels[i].clone(),
                    self.labels[j].clone(),
                    format_rational(&self.dist[i][j]),
                ));
            }
        }
        let points: Vec<String> = order.iter().map(|&i| self.labels[i].clone()).collect();
        serde_json::to_value(SpaceJson { points, distances }).expect("space serializes")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn distance(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn distance_by_label(&self, x: &str, y: &str) -> Result<&Rational> {
        Ok(&self.dist[self.index_of(x)?][self.index_of(y)?])
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    pub fn diameter(&self) -> Rational {
        self.dist.iter().flatten().max().cloned().unwrap_or_else(Rational::zero)
    }

    /// Points within `radius` of `center` (closed: `<=`, open: `<`), sorted by label.
    pub fn ball(&self, center: &str, radius: &Rational, closed: bool) -> Result<Vec<String>> {
        let c = self.index_of(center)?;
        let mut out: Vec<String> = (0..self.len())
            .filter(|&y| {
                let d = &self.dist[c][y];
                if closed {
                    d <= radius
                } else {
                    d < radius
                }
            })
            .map(|y| self.labels[y].clone())
            .collect();
        out.sort();
        Ok(out)
    }

    /// Groups `members` into classes of the relation `d <= radius` (or `d < radius`
    /// when `strict`), which is an equivalence in an ultrametric space. Classes
    /// keep the order of first appearance in `members`.
    pub(crate) fn partition_indices(&self, members: &[usize], radius: &Rational, strict: bool) -> Vec<Vec<usize>> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for &p in members {
            let rep = blocks.iter_mut().find(|b| {
                let d = &self.dist[b[0]][p];
                if strict {
                    d < radius
                } else {
                    d <= radius
                }
            });
            match rep {
                Some(b) => b.push(p),
                None => blocks.push(vec![p]),
            }
        }
        blocks
    }

    /// The closed balls of the given radius, each sorted by label, blocks
    /// ordered by their least label.
    pub fn partition_at(&self, radius: &Rational) -> Vec<Vec<String>> {
        let all: Vec<usize> = (0..self.len()).collect();
        let mut blocks: Vec<Vec<String>> = self
            .partition_indices(&all, radius, false)
            .into_iter()
            .map(|b| {
                let mut v: Vec<String> = b.into_iter().map(|i| self.labels[i].clone()).collect();
                v.sort();
                v
            })
            .collect();
        blocks.sort();
        blocks
    }

    pub fn isosceles_witness(&self, x: &str, y: &str, z: &str) -> Result<Triangle> {
        let (i, j, k) = (self.index_of(x)?, self.index_of(y)?, self.index_of(z)?);
        if i == j || j == k || i == k {
            return Err(Error::RepeatedPoints);
        }
        let mut sides = [
            ((x, y), &self.dist[i][j]),
            ((x, z), &self.dist[i][k]),
            ((y, z), &self.dist[j][k]),
        ];
        if sides[0].1 == sides[1].1 && sides[1].1 == sides[2].1 {
            return Ok(Triangle::Equilateral { side: sides[0].1.clone() });
        }
        // Stable sort keeps the listed order among the two equal long sides.
        sides.sort_by(|a, b| b.1.cmp(a.1));
        debug_assert_eq!(sides[0].1, sides[1].1, "valid ultrametric has no unique longest side");
        let own = |(a, b): (&str, &str)| (a.to_string(), b.to_string());
        Ok(Triangle::Isosceles {
            long_sides: [own(sides[0].0), own(sides[1].0)],
            long: sides[0].1.clone(),
            short_side: own(sides[2].0),
            short: sides[2].1.clone(),
        })
    }

    /// Distances keyed by unordered label pair; used to compare spaces across
    /// different point orders.
    pub fn distance_map(&self) -> BTreeMap<(String, String), Rational> {
        let mut out = BTreeMap::new();
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                let (a, b) = (self.labels[i].clone(), self.labels[j].clone());
                let key = if a <= b { (a, b) } else { (b, a) };
                out.insert(key, self.dist[i][j].clone());
            }
        }
        out
    }
}
