//! Analytic membership predictions for model singular functions and polynomials.

use serde::{Deserialize, Serialize};

use super::singular::AxialProfile;
use crate::error::{Error, Result};
use crate::exact::Exponent;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    /// Homogeneous weighted space `K^m_beta`.
    K,
    /// Non-homogeneous weighted space `J^m_beta`.
    J,
    /// Analytic class built on the `K` semi-norms.
    A,
    /// Analytic class built on the `J` norms.
    B,
}

fn check_generic(name: &str, x: f64) -> Result<()> {
    if Exponent::from_f64(x).is_integer() {
        return Err(Error::CriticalCase(format!("{name} = {x} is an integer")));
    }
    Ok(())
}

/// Membership of `r^lambda s(theta)` (near a 2D corner, `s` smooth and not identically
/// zero) in the given space: in every case the answer is `lambda > -beta - 1`, since
/// a non-polynomial function lies in `J` only through its `K` part.
pub fn membership_oracle(lambda: f64, beta: f64, space: Space, _m: usize) -> Result<bool> {
    check_generic("lambda", lambda)?;
    check_generic("beta", beta)?;
    let _ = space;
    Ok(lambda > -beta - 1.0)
}

/// Membership of a homogeneous polynomial of the given degree (not identically zero)
/// near a 2D corner.
///
/// `K^m` (and `A`): the zeroth semi-norm has integrand exponent `2(beta + d) + 1`, so
/// membership holds iff `d > -beta - 1`. `J^m`: the worst term is
/// `|alpha| = min(m, d)`, giving `max(m, d) > -beta - 1`. `B`: every `m >= kappa = -beta`
/// qualifies, so polynomials always belong.
pub fn polynomial_membership(degree: usize, beta: f64, space: Space, m: usize) -> Result<bool> {
    check_generic("beta", beta)?;
    let d = degree as f64;
    Ok(match space {
        Space::K | Space::A => d > -beta - 1.0,
        Space::J => (m.max(degree) as f64) > -beta - 1.0,
        Space::B => true,
    })
}

/// Exponent audit for `s(x_perp) g(x_par)` on a model wedge with `s ~ r^lambda`:
/// whether the order-`m` semi-norm is finite.
///
/// The term `alpha = (alpha_perp, alpha_par)` behaves like
/// `r^{2(beta + w + lambda - |alpha_perp|) + 1} dr` with `w = |alpha|` for the isotropic
/// semi-norm and `w = |alpha_perp|` for the anisotropic one; terms whose parallel
/// derivative of `g` vanishes identically drop out.
pub fn edge_exponent_audit(lambda: f64, beta_e: f64, profile: &AxialProfile, m: usize, anisotropic: bool) -> bool {
    let degree = profile.degree();
    (0..=m).all(|par| {
        if degree.is_some_and(|d| par > d) {
            return true;
        }
        let perp = m - par;
        let w = if anisotropic { perp } else { m } as f64;
        2.0 * (beta_e + w + lambda - perp as f64) + 1.0 > -1.0
    })
}
