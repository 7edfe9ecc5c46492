//! Weighted semi-norms and norms of closed-form fields, divergence detection and
//! analytic-class fits.

mod domain;
mod engine;
mod fit;

#[cfg(test)]
mod tests;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use domain::{EdgeLine, Entities, NormDomain};
pub use engine::{LayerDiagnostics, QuadratureOptions};
pub use fit::{analytic_fit, shift_constant_check, AnalyticFitReport, FitOptions, ShiftConstantReport, WindowEstimate};

use engine::{unresolved_error, Engine, Kernel, Partial};
use crate::error::{Error, Result};
use crate::fields::jet::indices_of_degree;
use crate::fields::Field;
use crate::weights::{kappa, WeightMultiExponent};

/// Which weighted quantity a channel measures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormKind {
    /// Homogeneous semi-norm: weight exponent `beta + |alpha|`, `|alpha| = m`.
    K,
    /// Non-homogeneous norm: exponent `beta + m` for all `|alpha| <= m`.
    J,
    /// Step-weighted norm: exponent `max(beta + |alpha|, 0)`, `|alpha| <= m`.
    Step,
    /// Anisotropic homogeneous semi-norm: edges use `beta_e + |alpha_perp|`.
    M,
    /// Anisotropic step-weighted norm: corners `max(beta_c + |alpha|, 0)`, edges
    /// `max(beta_e + |alpha_perp|, 0)`.
    N,
    /// Flagged entities use the homogeneous exponents; the others use `beta + m`
    /// (isotropic) or the step convention of `N` (anisotropic).
    Flagged { corners: Vec<bool>, edges: Vec<bool>, anisotropic: bool },
}

impl NormKind {
    pub fn is_seminorm(&self) -> bool {
        matches!(self, NormKind::K | NormKind::M)
    }

    pub fn name(&self) -> String {
        match self {
            NormKind::K => "K".into(),
            NormKind::J => "J".into(),
            NormKind::Step => "step".into(),
            NormKind::M => "M".into(),
            NormKind::N => "N".into(),
            NormKind::Flagged { anisotropic: false, .. } => "flagged-J".into(),
            NormKind::Flagged { anisotropic: true, .. } => "flagged-N".into(),
        }
    }
}

/// A finite value or an explicit divergence marker.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NormValue {
    Finite { value: f64 },
    /// Layer ratio that triggered detection and the layer where it happened.
    Diverged { ratio: f64, layer: usize },
}

impl NormValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            NormValue::Finite { value } => Some(*value),
            NormValue::Diverged { .. } => None,
        }
    }

    pub fn is_diverged(&self) -> bool {
        matches!(self, NormValue::Diverged { .. })
    }
}

/// Values for orders `0..=M` of one kind of norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormSequence {
    pub kind: NormKind,
    pub beta: WeightMultiExponent,
    pub domain: String,
    pub values: Vec<NormValue>,
    pub diagnostics: Vec<LayerDiagnostics>,
}

impl SeminormSequence {
    /// `m,value` lines (`inf` for diverged entries).
    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,value\n");
        for (m, v) in self.values.iter().enumerate() {
            match v {
                NormValue::Finite { value } => writeln!(s, "{m},{value:e}").unwrap(),
                NormValue::Diverged { .. } => writeln!(s, "{m},inf").unwrap(),
            }
        }
        s
    }
}

/// Evaluates weighted norms on one domain with one weight multi-exponent.
#[derive(Clone, Debug)]
pub struct NormEvaluator {
    domain: NormDomain,
    beta: WeightMultiExponent,
    entities: Entities,
    pub options: QuadratureOptions,
}

impl NormEvaluator {
    pub fn new(domain: NormDomain, beta: WeightMultiExponent) -> Result<Self> {
        domain.validate()?;
        if beta.corners.len() != domain.num_corners() || beta.edges.len() != domain.num_edges() {
            return Err(Error::MissingData(format!(
                "weights for {} corners and {} edges, domain has {} and {}",
                beta.corners.len(),
                beta.edges.len(),
                domain.num_corners(),
                domain.num_edges()
            )));
        }
        let entities = domain.entities();
        Ok(NormEvaluator { domain, beta, entities, options: QuadratureOptions::default() })
    }

    /// Same exponent at every corner and every edge.
    pub fn uniform(domain: NormDomain, beta_corner: f64, beta_edge: f64) -> Result<Self> {
        let beta = WeightMultiExponent::new(vec![beta_corner; domain.num_corners()], vec![beta_edge; domain.num_edges()])?;
        Self::new(domain, beta)
    }

    pub fn with_options(mut self, options: QuadratureOptions) -> Self {
        self.options = options;
        self
    }

    pub fn domain(&self) -> &NormDomain {
        &self.domain
    }

    pub fn beta(&self) -> &WeightMultiExponent {
        &self.beta
    }

    /// Values of `kind` for the orders `0..=max_m`.
    pub fn sequence(&self, u: &dyn Field, kind: &NormKind, max_m: usize) -> Result<SeminormSequence> {
        self.check(u, kind, max_m)?;
        let orders: Vec<usize> = (0..=max_m).collect();
        let (values, diagnostics) = self.run(u, kind, &orders)?;
        Ok(SeminormSequence {
            kind: kind.clone(),
            beta: self.beta.clone(),
            domain: self.domain.describe(),
            values,
            diagnostics,
        })
    }

    pub fn value(&self, u: &dyn Field, kind: &NormKind, m: usize) -> Result<NormValue> {
        self.check(u, kind, m)?;
        Ok(self.run(u, kind, &[m])?.0[0])
    }

    pub fn k_seminorm(&self, u: &dyn Field, m: usize) -> Result<NormValue> {
        self.value(u, &NormKind::K, m)
    }

    pub fn j_norm(&self, u: &dyn Field, m: usize) -> Result<NormValue> {
        self.value(u, &NormKind::J, m)
    }

    pub fn step_weighted_norm(&self, u: &dyn Field, m: usize) -> Result<NormValue> {
        self.value(u, &NormKind::Step, m)
    }

    pub fn m_seminorm(&self, u: &dyn Field, m: usize) -> Result<NormValue> {
        self.value(u, &NormKind::M, m)
    }

    pub fn n_norm(&self, u: &dyn Field, m: usize) -> Result<NormValue> {
        self.value(u, &NormKind::N, m)
    }

    pub fn flagged_norm(&self, u: &dyn Field, corners: &[bool], edges: &[bool], anisotropic: bool, m: usize) -> Result<NormValue> {
        let kind = NormKind::Flagged { corners: corners.to_vec(), edges: edges.to_vec(), anisotropic };
        self.value(u, &kind, m)
    }

    /// Full homogeneous norm `(sum_{k <= m} |u|_k^2)^{1/2}` built from a K or M sequence.
    pub fn full_norm(&self, u: &dyn Field, kind: &NormKind, m: usize) -> Result<NormValue> {
        if !kind.is_seminorm() {
            return self.value(u, kind, m);
        }
        let seq = self.sequence(u, kind, m)?;
        let mut s = 0.0;
        for v in &seq.values {
            match v {
                NormValue::Finite { value } => s += value * value,
                d => return Ok(*d),
            }
        }
        Ok(NormValue::Finite { value: s.sqrt() })
    }

    fn check(&self, u: &dyn Field, kind: &NormKind, m: usize) -> Result<()> {
        if u.dim() != self.domain.dim() {
            return Err(Error::WrongDimension { expected: self.domain.dim(), actual: u.dim() });
        }
        if m > u.max_order() {
            return Err(Error::InsufficientOrder { requested: m, available: u.max_order() });
        }
        match kind {
            NormKind::Step | NormKind::N => {
                let k = kappa(&self.beta);
                if (m as f64) < k - 1e-12 {
                    return Err(Error::BelowKappa { m, kappa: k });
                }
            }
            NormKind::Flagged { corners, edges, anisotropic } => {
                if corners.len() != self.beta.corners.len() || edges.len() != self.beta.edges.len() {
                    return Err(Error::MissingData("one flag per corner and per edge".into()));
                }
                if *anisotropic {
                    let unflagged = self
                        .beta
                        .corners
                        .iter()
                        .zip(corners)
                        .chain(self.beta.edges.iter().zip(edges))
                        .filter(|(_, f)| !**f)
                        .map(|(b, _)| -b.value())
                        .fold(0.0, f64::max);
                    if (m as f64) < unflagged - 1e-12 {
                        return Err(Error::BelowKappa { m, kappa: unflagged });
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn run(&self, u: &dyn Field, kind: &NormKind, orders: &[usize]) -> Result<(Vec<NormValue>, Vec<LayerDiagnostics>)> {
        let kernel = WeightKernel::new(u, &self.entities, &self.beta, kind, orders);
        let engine = Engine::new(&kernel, &self.options);
        let parts = engine.integrate(&self.domain.pieces()?, self.domain.dim())?;
        let values = parts
            .into_iter()
            .map(|p| match p {
                Partial::Value(v) => Ok(NormValue::Finite { value: v.max(0.0).sqrt() }),
                Partial::Diverged { ratio, layer } => Ok(NormValue::Diverged { ratio, layer }),
                Partial::Unresolved { ratio } => Err(unresolved_error(ratio)),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((values, engine.diagnostics.into_inner().unwrap()))
    }
}

/// One multi-index with the data its weights need.
struct IndexInfo {
    alpha: [usize; 3],
    total: usize,
    /// `|alpha_perp|` for each edge.
    perp: Vec<usize>,
}

struct WeightKernel<'a> {
    u: &'a dyn Field,
    entities: &'a Entities,
    beta_c: Vec<f64>,
    beta_e: Vec<f64>,
    kind: &'a NormKind,
    orders: Vec<usize>,
    indices: Vec<IndexInfo>,
    jet_order: usize,
}

impl<'a> WeightKernel<'a> {
    fn new(u: &'a dyn Field, entities: &'a Entities, beta: &WeightMultiExponent, kind: &'a NormKind, orders: &[usize]) -> Self {
        let jet_order = orders.iter().copied().max().unwrap_or(0);
        let dim = u.dim();
        let indices = (0..=jet_order)
            .flat_map(|n| indices_of_degree(dim, n))
            .map(|alpha| {
                let total = alpha.iter().sum();
                let perp = entities.edges.iter().map(|e| total - alpha[e.axis]).collect();
                IndexInfo { alpha, total, perp }
            })
            .collect();
        WeightKernel {
            u,
            entities,
            beta_c: beta.corner_values(),
            beta_e: beta.edge_values(),
            kind,
            orders: orders.to_vec(),
            indices,
            jet_order,
        }
    }

    /// `2 * sum_i exponent_i * ln(dist_i)` for multi-index `ix` in a channel of order `n`.
    fn log_weight(&self, ix: &IndexInfo, n: usize, ln_c: &[f64], ln_e: &[f64]) -> f64 {
        let t = ix.total as f64;
        let nf = n as f64;
        let mut s = 0.0;
        for (c, (b, l)) in self.beta_c.iter().zip(ln_c).enumerate() {
            let e = match self.kind {
                NormKind::K | NormKind::M => b + t,
                NormKind::J => b + nf,
                NormKind::Step | NormKind::N => (b + t).max(0.0),
                NormKind::Flagged { corners, anisotropic, .. } => {
                    if corners[c] {
                        b + t
                    } else if *anisotropic {
                        (b + t).max(0.0)
                    } else {
                        b + nf
                    }
                }
            };
            if e != 0.0 {
                s += e * l;
            }
        }
        for (k, (b, l)) in self.beta_e.iter().zip(ln_e).enumerate() {
            let p = ix.perp[k] as f64;
            let e = match self.kind {
                NormKind::K => b + t,
                NormKind::M => b + p,
                NormKind::J => b + nf,
                NormKind::Step => (b + t).max(0.0),
                NormKind::N => (b + p).max(0.0),
                NormKind::Flagged { edges, anisotropic, .. } => match (edges[k], anisotropic) {
                    (true, false) => b + t,
                    (true, true) => b + p,
                    (false, false) => b + nf,
                    (false, true) => (b + p).max(0.0),
                },
            };
            if e != 0.0 {
                s += e * l;
            }
        }
        2.0 * s
    }
}

impl Kernel for WeightKernel<'_> {
    fn channels(&self) -> usize {
        self.orders.len()
    }

    fn order(&self) -> usize {
        self.jet_order
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let jet = self.u.jet_unchecked(x, self.jet_order);
        if jet.is_zero() {
            return;
        }
        let mut rc = vec![0.0; self.entities.corners.len()];
        let mut re = vec![0.0; self.entities.edges.len()];
        self.entities.distances(x, &mut rc, &mut re);
        let r_min = rc.iter().copied().fold(f64::INFINITY, f64::min);
        let r_corners = if r_min.is_finite() { r_min } else { 1.0 };
        let ln_c: Vec<f64> = rc.iter().map(|r| r.ln()).collect();
        let ln_e: Vec<f64> = re.iter().map(|r| (r / r_corners).ln()).collect();
        let dim = self.u.dim();
        let seminorm = self.kind.is_seminorm();
        for ix in &self.indices {
            let d = jet.derivative(&ix.alpha[..dim]);
            if d == 0.0 {
                continue;
            }
            let d2 = d * d;
            for (slot, &n) in out.iter_mut().zip(&self.orders) {
                let wanted = if seminorm { ix.total == n } else { ix.total <= n };
                if wanted {
                    *slot += self.log_weight(ix, n, &ln_c, &ln_e).exp() * d2;
                }
            }
        }
    }
}

/// `|u|_{K; m, beta}` on `domain` with default quadrature.
pub fn k_seminorm(u: &dyn Field, domain: &NormDomain, beta: &WeightMultiExponent, m: usize) -> Result<NormValue> {
    NormEvaluator::new(domain.clone(), beta.clone())?.k_seminorm(u, m)
}

pub fn j_norm(u: &dyn Field, domain: &NormDomain, beta: &WeightMultiExponent, m: usize) -> Result<NormValue> {
    NormEvaluator::new(domain.clone(), beta.clone())?.j_norm(u, m)
}

pub fn step_weighted_norm(u: &dyn Field, domain: &NormDomain, beta: &WeightMultiExponent, m: usize) -> Result<NormValue> {
    NormEvaluator::new(domain.clone(), beta.clone())?.step_weighted_norm(u, m)
}

pub fn m_seminorm(u: &dyn Field, domain: &NormDomain, beta: &WeightMultiExponent, m: usize) -> Result<NormValue> {
    NormEvaluator::new(domain.clone(), beta.clone())?.m_seminorm(u, m)
}

pub fn n_norm(u: &dyn Field, domain: &NormDomain, beta: &WeightMultiExponent, m: usize) -> Result<NormValue> {
    NormEvaluator::new(domain.clone(), beta.clone())?.n_norm(u, m)
}
