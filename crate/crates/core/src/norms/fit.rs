//! Cauchy-type growth fits for semi-norm sequences and the shift-constant check.

use serde::{Deserialize, Serialize};

use super::{NormEvaluator, NormKind, NormValue, SeminormSequence};
use crate::error::{Error, Result};
use crate::fields::jet::factorial;
use crate::fields::Field;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Inclusive order windows compared for stability; empty means the last two
    /// windows of width 4 ending at the highest order.
    pub windows: Vec<(usize, usize)>,
    /// Largest accepted relative change of the windowed constants.
    pub drift_threshold: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { windows: Vec::new(), drift_threshold: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowEstimate {
    pub from: usize,
    pub to: usize,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticFitReport {
    /// Smallest `C` with `s_m <= C^{m+1} m!` over the computed orders; None when a
    /// value diverged.
    pub c: Option<f64>,
    /// `(s_m / m!)^{1/(m+1)}` per order.
    pub per_order: Vec<Option<f64>>,
    pub windows: Vec<WindowEstimate>,
    /// Largest relative change between consecutive windows.
    pub drift: Option<f64>,
    pub member: bool,
    pub reason: String,
}

/// Fits `s_m <= C^{m+1} m!` to a sequence with at least six entries.
pub fn analytic_fit(seq: &SeminormSequence, opts: &FitOptions) -> Result<AnalyticFitReport> {
    if seq.values.len() < 6 {
        return Err(Error::MissingData(format!("{} orders given, at least 6 needed", seq.values.len())));
    }
    if let Some(m) = seq.values.iter().position(|v| v.is_diverged()) {
        return Ok(AnalyticFitReport {
            c: None,
            per_order: seq.values.iter().map(|v| v.finite()).collect(),
            windows: Vec::new(),
            drift: None,
            member: false,
            reason: format!("order {m} diverged"),
        });
    }
    let s: Vec<f64> = seq.values.iter().map(|v| v.finite().unwrap()).collect();
    let per: Vec<f64> = s.iter().enumerate().map(|(m, v)| (v / factorial(m)).powf(1.0 / (m as f64 + 1.0))).collect();
    let c = per.iter().copied().fold(0.0, f64::max);
    let top = s.len() - 1;
    let windows: Vec<(usize, usize)> = if opts.windows.is_empty() {
        vec![(top.saturating_sub(8), top.saturating_sub(4)), (top.saturating_sub(4), top)]
    } else {
        opts.windows.clone()
    };
    let mut est = Vec::new();
    for &(a, b) in &windows {
        if a > b || b > top {
            return Err(Error::InvalidParameter(format!("window [{a}, {b}] outside 0..={top}")));
        }
        est.push(WindowEstimate { from: a, to: b, c: per[a..=b].iter().copied().fold(0.0, f64::max) });
    }
    let drift = est
        .windows(2)
        .map(|w| if w[0].c == 0.0 && w[1].c == 0.0 { 0.0 } else { (w[1].c - w[0].c).abs() / w[0].c.max(w[1].c) })
        .fold(0.0, f64::max);
    let member = drift < opts.drift_threshold;
    let reason = if member {
        format!("windowed constants drift by {drift:.3e}")
    } else {
        format!("windowed constants drift by {drift:.3e}, threshold {}", opts.drift_threshold)
    };
    Ok(AnalyticFitReport {
        c: Some(c),
        per_order: per.into_iter().map(Some).collect(),
        windows: est,
        drift: Some(drift),
        member,
        reason,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftConstantReport {
    /// `(k, C_k)` for `k = 2..=M`.
    pub constants: Vec<(usize, f64)>,
    /// `max_k C_k` over all orders divided by the maximum over `k <= M - 4`.
    pub plateau_ratio: f64,
    pub bounded: bool,
    pub u_seminorms: Vec<f64>,
    pub f_seminorms: Vec<f64>,
}

/// Smallest `C_k` with
/// `|u|_k / k! <= C_k^{k+1} (sum_{l <= k-2} |f|_l / l! + |u|_0 + |u|_1)`,
/// where `u` is measured with `beta` and `f` with `beta + 2`.
pub fn shift_constant_check(u: &dyn Field, f: &dyn Field, eval: &NormEvaluator, max_k: usize) -> Result<ShiftConstantReport> {
    if max_k < 6 {
        return Err(Error::InvalidParameter("the shift check needs orders up to at least 6".into()));
    }
    let finite = |seq: SeminormSequence, what: &str| -> Result<Vec<f64>> {
        seq.values
            .iter()
            .enumerate()
            .map(|(m, v)| match v {
                NormValue::Finite { value } => Ok(*value),
                NormValue::Diverged { .. } => Err(Error::Divergent(format!("{what} semi-norm of order {m}"))),
            })
            .collect()
    };
    let us = finite(eval.sequence(u, &NormKind::K, max_k)?, "u")?;
    let f_eval = NormEvaluator::new(eval.domain().clone(), eval.beta().shifted(2))?.with_options(eval.options.clone());
    let fs = finite(f_eval.sequence(f, &NormKind::K, max_k - 2)?, "f")?;
    let mut constants = Vec::new();
    for k in 2..=max_k {
        let lhs = us[k] / factorial(k);
        let rhs: f64 = (0..=k - 2).map(|l| fs[l] / factorial(l)).sum::<f64>() + us[0] + us[1];
        let ck = if lhs == 0.0 {
            0.0
        } else if rhs == 0.0 {
            return Err(Error::Divergent(format!("no constant fits order {k}: right-hand side vanishes")));
        } else {
            (lhs / rhs).powf(1.0 / (k as f64 + 1.0))
        };
        constants.push((k, ck));
    }
    let max_all = constants.iter().map(|c| c.1).fold(0.0, f64::max);
    let max_early = constants.iter().filter(|c| c.0 + 4 <= max_k).map(|c| c.1).fold(0.0, f64::max);
    let plateau_ratio = if max_all == 0.0 { 1.0 } else { max_all / max_early };
    Ok(ShiftConstantReport { constants, plateau_ratio, bounded: plateau_ratio <= 1.1, u_seminorms: us, f_seminorms: fs })
}
