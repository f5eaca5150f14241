use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::EndMap;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Right-continuous nondecreasing step function on `[0,1]`: value
/// `values[i]` on `[breakpoints[i], breakpoints[i+1])`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepModulus {
    #[serde(serialize_with = "ser_vec")]
    breakpoints: Vec<Rational>,
    #[serde(serialize_with = "ser_vec")]
    values: Vec<Rational>,
}

pub(crate) fn ser_vec<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for r in v {
        seq.serialize_element(&crate::rational::format_rational(r))?;
    }
    seq.end()
}

impl StepModulus {
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::InvalidMap("a step modulus needs matching breakpoints and values".into()));
        }
        if !breakpoints[0].is_zero() || !values[0].is_zero() {
            return Err(Error::InvalidMap("a step modulus starts at (0,0)".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) || breakpoints[breakpoints.len() - 1] > Rational::one() {
            return Err(Error::InvalidMap("breakpoints must increase within [0,1]".into()));
        }
        if values.windows(2).any(|w| w[0] > w[1])
            || values.iter().any(|v| v.is_negative() || *v > Rational::one())
        {
            return Err(Error::InvalidMap("values must be nondecreasing within [0,1]".into()));
        }
        Ok(StepModulus { breakpoints, values })
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn eval(&self, delta: &Rational) -> Rational {
        match self.breakpoints.iter().rposition(|b| b <= delta) {
            Some(i) => self.values[i].clone(),
            None => Rational::zero(),
        }
    }
}

/// `ρ(δ)`: the largest image distance over source pairs at distance `≤ δ`.
/// Jumps occur only at realized source distances.
pub fn modulus_of(f: &EndMap) -> StepModulus {
    let (s, t) = (f.source(), f.target());
    let mut pairs: Vec<(&Rational, &Rational)> = Vec::new();
    for i in 0..s.len() {
        for j in (i + 1)..s.len() {
            pairs.push((s.distance(i, j), t.distance(f.image_index(i), f.image_index(j))));
        }
    }
    pairs.sort();
    let mut breakpoints = vec![Rational::zero()];
    let mut values = vec![Rational::zero()];
    for (d, image) in pairs {
        let current = values.last().expect("nonempty");
        if image > current {
            if breakpoints.last() == Some(d) {
                *values.last_mut().expect("nonempty") = image.clone();
            } else {
                breakpoints.push(d.clone());
                values.push(image.clone());
            }
        }
    }
    StepModulus { breakpoints, values }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::rational::rat;
    use crate::ultrametric::FiniteUltrametricSpace;

    fn s3(bc: Rational) -> FiniteUltrametricSpace {
        FiniteUltrametricSpace::from_pairs(
            &["a", "b", "c"],
            &[("a", "b", rat(1, 2)), ("a", "c", rat(1, 2)), ("b", "c", bc)],
        )
        .unwrap()
    }

    fn labels(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(x, y)| (x.to_string(), y.to_string())).collect()
    }

    #[test]
    fn s3_to_coarser_s3() {
        let f = EndMap::new(s3(rat(1, 4)), s3(rat(1, 2)), &labels(&[("a", "a"), ("b", "b"), ("c", "c")])).unwrap();
        let rho = modulus_of(&f);
        assert_eq!(rho.breakpoints(), &[rat(0, 1), rat(1, 4)]);
        assert_eq!(rho.values(), &[rat(0, 1), rat(1, 2)]);
        assert_eq!(rho.eval(&rat(1, 5)), rat(0, 1));
        assert_eq!(rho.eval(&rat(1, 4)), rat(1, 2));
        assert_eq!(rho.eval(&rat(1, 1)), rat(1, 2));
    }

    #[test]
    fn identity_and_constant() {
        let s = s3(rat(1, 4));
        let rho = modulus_of(&EndMap::identity(&s));
        assert_eq!(rho.breakpoints(), &[rat(0, 1), rat(1, 4), rat(1, 2)]);
        assert_eq!(rho.values(), &[rat(0, 1), rat(1, 4), rat(1, 2)]);
        let constant = EndMap::new(s.clone(), s, &labels(&[("a", "b"), ("b", "b"), ("c", "b")])).unwrap();
        let rho = modulus_of(&constant);
        assert_eq!(rho.breakpoints(), &[rat(0, 1)]);
        assert_eq!(rho.eval(&rat(1, 1)), rat(0, 1));
    }

    #[test]
    fn validation() {
        assert!(StepModulus::new(vec![rat(0, 1), rat(1, 2)], vec![rat(0, 1), rat(1, 3)]).is_ok());
        assert!(StepModulus::new(vec![rat(0, 1), rat(1, 2)], vec![rat(1, 4), rat(1, 3)]).is_err());
        assert!(StepModulus::new(vec![rat(0, 1), rat(1, 2)], vec![rat(0, 1), rat(3, 2)]).is_err());
        assert!(StepModulus::new(vec![rat(0, 1), rat(0, 1)], vec![rat(0, 1), rat(0, 1)]).is_err());
    }
}
