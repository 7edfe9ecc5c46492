//! Smooth radial cut-off functions.

use super::jet::Jet;
use super::{Field, Support, DEFAULT_MAX_ORDER};
use crate::error::{Error, Result};

/// `chi(x) = psi((r1 - r) / (r1 - r0))`, `r = |x - center|`, where
/// `psi(t) = g(t) / (g(t) + g(1 - t))` and `g(t) = exp(-1/t)` for `t > 0`, else 0.
///
/// `chi = 1` for `r <= r0`, `chi = 0` for `r >= r1`, smooth in between.
#[derive(Clone, Debug)]
pub struct RadialCutoff {
    center: Vec<f64>,
    r0: f64,
    r1: f64,
}

/// Below this argument `exp(-1/t)` and all its scaled derivatives are under 1e-140.
const FLAT: f64 = 2e-3;

impl RadialCutoff {
    pub fn new(center: Vec<f64>, r0: f64, r1: f64) -> Result<Self> {
        if !(r0 > 0.0 && r0 < r1 && r1.is_finite()) {
            return Err(Error::InvalidParameter(format!("cut-off needs 0 < r0 < r1, got r0={r0}, r1={r1}")));
        }
        if !(1..=3).contains(&center.len()) {
            return Err(Error::InvalidParameter("cut-off center must have 1 to 3 coordinates".into()));
        }
        Ok(RadialCutoff { center, r0, r1 })
    }

    pub fn radii(&self) -> (f64, f64) {
        (self.r0, self.r1)
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// The profile as a function of the radius (with derivatives in `r`).
    pub fn profile_jet(&self, r: f64, order: usize) -> Jet {
        let t = Jet::variable(1, order, 0, r);
        let s = t.scale(-1.0 / (self.r1 - self.r0)).add_constant(self.r1 / (self.r1 - self.r0));
        psi(&s)
    }
}

fn bump(t: &Jet) -> Jet {
    if t.value() <= FLAT {
        Jet::zero(t.dim(), t.order())
    } else {
        t.recip().scale(-1.0).exp()
    }
}

/// The transition `psi` applied to a jet whose value lies in `(0, 1)`.
fn psi(t: &Jet) -> Jet {
    let a = bump(t);
    let b = bump(&t.scale(-1.0).add_constant(1.0));
    a.mul(&a.add(&b).recip())
}

impl Field for RadialCutoff {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn max_order(&self) -> usize {
        DEFAULT_MAX_ORDER
    }

    fn jet_unchecked(&self, x: &[f64], order: usize) -> Jet {
        let dim = self.dim();
        let r2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        let r = r2.sqrt();
        if r <= self.r0 {
            return Jet::constant(dim, order, 1.0);
        }
        if r >= self.r1 {
            return Jet::zero(dim, order);
        }
        let mut s = Jet::zero(dim, order);
        for i in 0..dim {
            let d = Jet::variable(dim, order, i, x[i] - self.center[i]);
            s.add_assign(&d.mul(&d));
        }
        let rj = s.sqrt();
        let t = rj.scale(-1.0 / (self.r1 - self.r0)).add_constant(self.r1 / (self.r1 - self.r0));
        psi(&t)
    }

    fn support(&self) -> Support {
        Support::Ball { center: self.center.clone(), radius: self.r1 }
    }

    fn describe(&self) -> String {
        format!("radial cut-off r0={} r1={} around {:?}", self.r0, self.r1, self.center)
    }
}
