use super::{ApproxPoint, TreePoint, TreePresentation};
use crate::error::{Error, Result};
use crate::rational::TreeDistance;

impl TreePresentation {
    /// Distance from the root: `q = 1/u`.
    pub fn norm(&self, x: &TreePoint) -> Result<TreeDistance> {
        self.check_point(x)?;
        Ok(TreeDistance::from_level(&x.level))
    }

    /// Deepest common point of `[v,x]` and `[v,y]`.
    pub fn meet(&self, x: &TreePoint, y: &TreePoint) -> Result<TreePoint> {
        self.check_point(x)?;
        self.check_point(y)?;
        let mut level = std::cmp::max(&x.level, &y.level);
        if let Some(m) = self.carrier_meet_level(x.carrier, y.carrier)? {
            level = level.max(m);
        }
        Ok(TreePoint::new(x.carrier, level.clone()))
    }

    /// `q = u_m^2 / (u_x u_y)` with `u_m` the level of the meet.
    pub fn distance(&self, x: &TreePoint, y: &TreePoint) -> Result<TreeDistance> {
        let m = self.meet(x, y)?;
        let um = m.level.value();
        TreeDistance::from_q(um * um / (x.level.value() * y.level.value()))
    }

    /// The point at arclength `s * d(x,y)` along `[x,y]`.
    pub fn geodesic_point(&self, x: &TreePoint, y: &TreePoint, s: f64) -> Result<ApproxPoint> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidPoint(format!("arc parameter {s} outside [0,1]")));
        }
        let m = self.meet(x, y)?;
        Ok(geodesic_between(
            ApproxPoint::from_exact(x),
            ApproxPoint::from_exact(y),
            m.level.to_f64(),
            s,
        ))
    }

    /// Float distance between approximate points.
    pub fn approx_distance(&self, p: &ApproxPoint, q: &ApproxPoint) -> Result<f64> {
        let mut um = p.level.max(q.level);
        if let Some(c) = self.carrier_meet_level(p.carrier, q.carrier)? {
            um = um.max(c.to_f64());
        }
        Ok(2.0 * um.ln() - p.level.ln() - q.level.ln())
    }

    /// Whether `p` lies in the subtree `T_c` beyond `c`. The carrier test is
    /// exact; the level comparison allows [`super::APPROX_TOLERANCE`].
    pub fn approx_in_subtree(&self, c: &TreePoint, p: &ApproxPoint) -> Result<bool> {
        let cl = c.level.to_f64();
        if p.level > cl + super::APPROX_TOLERANCE {
            return Ok(false);
        }
        Ok(match self.carrier_meet_level(c.carrier, p.carrier)? {
            None => true,
            Some(m) => *m <= c.level,
        })
    }

    /// Exact version of [`Self::approx_in_subtree`].
    pub fn in_subtree(&self, c: &TreePoint, x: &TreePoint) -> Result<bool> {
        if x.level > c.level {
            return Ok(false);
        }
        Ok(match self.carrier_meet_level(c.carrier, x.carrier)? {
            None => true,
            Some(m) => *m <= c.level,
        })
    }

    /// Depth of a point, for display.
    pub fn depth(&self, x: &TreePoint) -> Result<f64> {
        self.check_point(x)?;
        Ok(x.level.depth())
    }
}

/// Interpolates along the arc from `x` up to the meet level `um` and down to
/// `y`.
pub(crate) fn geodesic_between(x: ApproxPoint, y: ApproxPoint, um: f64, s: f64) -> ApproxPoint {
    let up = (um / x.level).ln();
    let down = (um / y.level).ln();
    let a = s * (up + down);
    if s == 0.0 {
        x
    } else if s == 1.0 {
        y
    } else if a <= up {
        ApproxPoint { carrier: x.carrier, level: x.level * a.exp() }
    } else {
        ApproxPoint { carrier: y.carrier, level: um * (-(a - up)).exp() }
    }
}
