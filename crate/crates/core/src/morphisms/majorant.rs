use num_traits::{One, Zero};
use serde::Serialize;

use super::{PiecewiseLinear, StepModulus};
use crate::rational::Rational;

/// Least concave majorant of a step modulus on `[0,1]`, normalized so that
/// it takes the value 1 at 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ConcaveMajorant(PiecewiseLinear);

impl ConcaveMajorant {
    pub fn as_pl(&self) -> &PiecewiseLinear {
        &self.0
    }

    pub fn into_pl(self) -> PiecewiseLinear {
        self.0
    }

    pub fn eval(&self, u: &Rational) -> Rational {
        self.0.eval(u)
    }

    pub fn breakpoints(&self) -> &[Rational] {
        self.0.breakpoints()
    }

    pub fn values(&self) -> &[Rational] {
        self.0.values()
    }

    pub fn slopes(&self) -> Vec<Rational> {
        self.0.slopes()
    }
}

/// Upper hull of the step graph's corner points `(b_i, ρ(b_i))` together with
/// `(1,1)`. Collinear corners are dropped, so chord slopes strictly decrease.
pub fn concave_majorant(rho: &StepModulus) -> ConcaveMajorant {
    let mut points: Vec<(Rational, Rational)> =
        rho.breakpoints().iter().cloned().zip(rho.values().iter().cloned()).collect();
    if points.last().is_some_and(|(b, _)| b.is_one()) {
        points.pop();
    }
    points.push((Rational::one(), Rational::one()));
    debug_assert!(points[0].0.is_zero() && points[0].1.is_zero());

    let mut hull: Vec<(Rational, Rational)> = Vec::with_capacity(points.len());
    for p in points {
        while hull.len() >= 2 {
            let (o, a) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
            let cross = (&a.0 - &o.0) * (&p.1 - &o.1) - (&a.1 - &o.1) * (&p.0 - &o.0);
            if cross >= Rational::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let (xs, ys) = hull.into_iter().unzip();
    ConcaveMajorant(PiecewiseLinear::new(xs, ys).expect("hull of a modulus is a valid map"))
}
