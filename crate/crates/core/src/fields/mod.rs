//! Closed-form fields with exact derivatives of all orders.
//!
//! Every field hands out Taylor jets: the coefficients `d^alpha u(x) / alpha!` for
//! all `|alpha|` up to a requested order, computed from closed forms and jet
//! arithmetic, never from numerical differentiation.

pub mod combinators;
pub mod cutoff;
pub mod jet;
pub mod membership;
pub mod singular;
pub mod spec;

use std::fmt::Debug;
use std::sync::Arc;

use serde::Serialize;

pub use combinators::{manufactured_pair, Laplacian, ManufacturedPair, Partial, Polynomial, Product, Scaled, Sum, Zero};
pub use cutoff::RadialCutoff;
pub use jet::Jet;
pub use membership::{edge_exponent_audit, membership_oracle, polynomial_membership, Space};
pub use singular::{AxialProfile, CornerSingular, EdgeSingular3d};
pub use spec::{build_field, field_from_spec, parse_field_spec, FieldSpec};

use crate::error::{Error, Result};

/// Default highest derivative order offered by closed-form fields.
pub const DEFAULT_MAX_ORDER: usize = 24;

/// Where a field may be nonzero.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Support {
    Everywhere,
    /// Contained in the closed ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// Contained in the closed annulus.
    Annulus { center: Vec<f64>, inner: f64, outer: f64 },
    Empty,
}

/// Singular set of a field and its leading exponent.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Singularity {
    Corner { position: Vec<f64>, exponent: f64 },
    /// Straight line through `point` along coordinate `axis`.
    Edge { axis: usize, point: Vec<f64>, exponent: f64 },
}

pub trait Field: Send + Sync + Debug {
    fn dim(&self) -> usize;

    /// Highest derivative order this field can provide.
    fn max_order(&self) -> usize;

    /// Jet of order `order <= max_order()` at `x`; no argument checks.
    fn jet_unchecked(&self, x: &[f64], order: usize) -> Jet;

    fn support(&self) -> Support {
        Support::Everywhere
    }

    fn singularities(&self) -> Vec<Singularity> {
        Vec::new()
    }

    /// Whether the field is harmonic away from its singular set.
    fn is_harmonic(&self) -> bool {
        false
    }

    fn describe(&self) -> String;

    fn jet(&self, x: &[f64], order: usize) -> Result<Jet> {
        if x.len() != self.dim() {
            return Err(Error::WrongDimension { expected: self.dim(), actual: x.len() });
        }
        if order > self.max_order() {
            return Err(Error::InsufficientOrder { requested: order, available: self.max_order() });
        }
        Ok(self.jet_unchecked(x, order))
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.jet_unchecked(x, 0).value()
    }

    /// The partial derivative `d^alpha u (x)`.
    fn derivative(&self, x: &[f64], alpha: &[usize]) -> Result<f64> {
        if alpha.len() != self.dim() {
            return Err(Error::WrongDimension { expected: self.dim(), actual: alpha.len() });
        }
        let n = alpha.iter().sum();
        Ok(self.jet(x, n)?.derivative(alpha))
    }
}

pub type FieldRef = Arc<dyn Field>;

#[cfg(test)]
mod tests;
