use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// A continuous nondecreasing piecewise-linear map `[0,1] -> [0,1]` with
/// rational breakpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinear {
    xs: Vec<Rational>,
    ys: Vec<Rational>,
}

impl PiecewiseLinear {
    pub fn new(xs: Vec<Rational>, ys: Vec<Rational>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidMap("a piecewise-linear map needs at least two breakpoints".into()));
        }
        if !xs[0].is_zero() || !xs[xs.len() - 1].is_one() {
            return Err(Error::InvalidMap("breakpoints must start at 0 and end at 1".into()));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMap("breakpoints must be strictly increasing".into()));
        }
        if ys.iter().any(|y| y.is_negative() || *y > Rational::one()) {
            return Err(Error::InvalidMap("values must lie in [0,1]".into()));
        }
        if ys.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidMap("values must be nondecreasing".into()));
        }
        Ok(PiecewiseLinear { xs, ys }.simplified())
    }

    pub fn identity() -> Self {
        PiecewiseLinear { xs: vec![Rational::zero(), Rational::one()], ys: vec![Rational::zero(), Rational::one()] }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.xs
    }

    pub fn values(&self) -> &[Rational] {
        &self.ys
    }

    pub fn points(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.xs.iter().zip(self.ys.iter())
    }

    /// Drops breakpoints interior to a straight segment.
    fn simplified(self) -> Self {
        let mut xs: Vec<Rational> = Vec::with_capacity(self.xs.len());
        let mut ys: Vec<Rational> = Vec::with_capacity(self.ys.len());
        for (x, y) in self.xs.into_iter().zip(self.ys) {
            while xs.len() >= 2 {
                let k = xs.len();
                let lhs = (&ys[k - 1] - &ys[k - 2]) * (&x - &xs[k - 1]);
                let rhs = (&y - &ys[k - 1]) * (&xs[k - 1] - &xs[k - 2]);
                if lhs == rhs {
                    xs.pop();
                    ys.pop();
                } else {
                    break;
                }
            }
            xs.push(x);
            ys.push(y);
        }
        PiecewiseLinear { xs, ys }
    }

    /// Exact value at `u`, clamped to the domain.
    pub fn eval(&self, u: &Rational) -> Rational {
        if *u <= self.xs[0] {
            return self.ys[0].clone();
        }
        let last = self.xs.len() - 1;
        if *u >= self.xs[last] {
            return self.ys[last].clone();
        }
        match self.xs.binary_search(u) {
            Ok(i) => self.ys[i].clone(),
            Err(j) => {
                // Unreduced arithmetic with a single reduction at the end;
                // this sits on the hot path of the sampled checks.
                let (x0, x1, y0, y1) = (&self.xs[j - 1], &self.xs[j], &self.ys[j - 1], &self.ys[j]);
                let cross = |a: &Rational, b: &Rational| (a.numer() * b.denom() - b.numer() * a.denom(), a.denom() * b.denom());
                let (wn, wd) = cross(u, x0);
                let (dn, dd) = cross(x1, x0);
                let (sn, sd) = cross(y1, y0);
                let (tn, td) = (sn * wn * dd, sd * wd * dn);
                Rational::new(y0.numer() * &td + tn * y0.denom(), y0.denom() * td)
            }
        }
    }

    pub fn eval_f64(&self, u: f64) -> f64 {
        let xs: Vec<f64> = self.xs.iter().map(crate::rational::to_f64).collect();
        let ys: Vec<f64> = self.ys.iter().map(crate::rational::to_f64).collect();
        if u <= 0.0 {
            return ys[0];
        }
        for k in 1..xs.len() {
            if u <= xs[k] {
                return ys[k - 1] + (ys[k] - ys[k - 1]) * (u - xs[k - 1]) / (xs[k] - xs[k - 1]);
            }
        }
        ys[ys.len() - 1]
    }

    /// Slope of each segment.
    pub fn slopes(&self) -> Vec<Rational> {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| (&y[1] - &y[0]) / (&x[1] - &x[0]))
            .collect()
    }

    /// `outer ∘ self`.
    pub fn then(&self, outer: &PiecewiseLinear) -> PiecewiseLinear {
        let mut xs: Vec<Rational> = self.xs.clone();
        for k in 1..self.xs.len() {
            let (y0, y1) = (&self.ys[k - 1], &self.ys[k]);
            for y in &outer.xs {
                if y0 < y && y < y1 {
                    let x0 = &self.xs[k - 1];
                    xs.push(x0 + (y - y0) * (&self.xs[k] - x0) / (y1 - y0));
                }
            }
        }
        xs.sort();
        xs.dedup();
        let ys = xs.iter().map(|x| outer.eval(&self.eval(x))).collect();
        PiecewiseLinear { xs, ys }.simplified()
    }

    /// Largest `u` with `f(u) <= mu`, if any.
    pub fn last_at_most(&self, mu: &Rational) -> Option<Rational> {
        let last = self.xs.len() - 1;
        if self.ys[0] > *mu {
            return None;
        }
        if self.ys[last] <= *mu {
            return Some(self.xs[last].clone());
        }
        let i = self.ys.iter().rposition(|y| y <= mu).expect("ys[0] <= mu");
        let (x0, x1, y0, y1) = (&self.xs[i], &self.xs[i + 1], &self.ys[i], &self.ys[i + 1]);
        Some(x0 + (mu - y0) * (x1 - x0) / (y1 - y0))
    }

    /// Smallest `u` with `f(u) >= mu`, if any.
    pub fn first_at_least(&self, mu: &Rational) -> Option<Rational> {
        let last = self.xs.len() - 1;
        if self.ys[last] < *mu {
            return None;
        }
        if self.ys[0] >= *mu {
            return Some(self.xs[0].clone());
        }
        let j = self.ys.iter().position(|y| y >= mu).expect("ys[last] >= mu");
        let (x0, x1, y0, y1) = (&self.xs[j - 1], &self.xs[j], &self.ys[j - 1], &self.ys[j]);
        Some(x0 + (mu - y0) * (x1 - x0) / (y1 - y0))
    }

    /// True when both maps coincide on `[from, 1]`.
    pub fn agrees_on(&self, other: &PiecewiseLinear, from: &Rational) -> bool {
        std::iter::once(from)
            .chain(self.xs.iter().chain(other.xs.iter()).filter(|x| *x > from))
            .all(|x| self.eval(x) == other.eval(x))
    }

    /// Supremum of the depth-space slope of `t -> -ln f(e^{-t})`, i.e. of
    /// `f'(u) u / f(u)`. `None` when `f` vanishes somewhere on `(0,1]`.
    pub fn max_depth_slope(&self) -> Option<Rational> {
        let slopes = self.slopes();
        let mut best = Rational::zero();
        for (k, s) in slopes.iter().enumerate() {
            for x in [&self.xs[k], &self.xs[k + 1]] {
                let fx = self.eval(x);
                let value = if x.is_zero() {
                    // Limit as u -> 0 on the first segment.
                    if fx.is_zero() {
                        if s.is_positive() {
                            Rational::one()
                        } else {
                            return None;
                        }
                    } else {
                        Rational::zero()
                    }
                } else if fx.is_zero() {
                    return None;
                } else {
                    s * x / fx
                };
                if value.cmp(&best) == Ordering::Greater {
                    best = value;
                }
            }
        }
        Some(best)
    }
}

impl Serialize for PiecewiseLinear {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(String, String)> =
            self.points().map(|(x, y)| (format_rational(x), format_rational(y))).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiecewiseLinear {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<(String, String)> = Vec::deserialize(d)?;
        let mut xs = Vec::with_capacity(pairs.len());
        let mut ys = Vec::with_capacity(pairs.len());
        for (x, y) in pairs {
            xs.push(parse_rational(&x).map_err(serde::de::Error::custom)?);
            ys.push(parse_rational(&y).map_err(serde::de::Error::custom)?);
        }
        PiecewiseLinear::new(xs, ys).map_err(serde::de::Error::custom)
    }
}
