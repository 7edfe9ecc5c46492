//! Weight multi-exponents and the admissibility and shift conditions on them.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Exponent, Rational};
use crate::geometry::{Geometry, Polygon, Polyhedron};
use crate::spectra2d::{corner_spectrum_laplace, MellinSpectrum, ProblemSpec};

/// One weight per corner and, in 3D, one per edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightMultiExponent {
    pub corners: Vec<Exponent>,
    #[serde(default)]
    pub edges: Vec<Exponent>,
}

impl WeightMultiExponent {
    pub fn new(corners: Vec<f64>, edges: Vec<f64>) -> Result<Self> {
        if corners.iter().chain(&edges).any(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter("weights must be finite".into()));
        }
        Ok(WeightMultiExponent {
            corners: corners.into_iter().map(Exponent::from_f64).collect(),
            edges: edges.into_iter().map(Exponent::from_f64).collect(),
        })
    }

    /// The same corner weight everywhere and the same edge weight on every edge.
    pub fn uniform(geom: &Geometry, beta_corner: f64, beta_edge: f64) -> Result<Self> {
        Self::new(vec![beta_corner; geom.num_corners()], vec![beta_edge; geom.num_edges()])
    }

    /// Parses `{"corners": [...], "edges": [...]}`; entries are plain numbers or
    /// serialized exponents.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Entry {
            Plain(f64),
            Full(Exponent),
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            corners: Vec<Entry>,
            #[serde(default)]
            edges: Vec<Entry>,
        }
        let doc: Doc = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let conv = |v: Vec<Entry>| -> Result<Vec<Exponent>> {
            v.into_iter()
                .map(|e| match e {
                    Entry::Plain(x) if x.is_finite() => Ok(Exponent::from_f64(x)),
                    Entry::Full(x) if x.value().is_finite() => Ok(x),
                    _ => Err(Error::Schema("weights must be finite".into())),
                })
                .collect()
        };
        Ok(WeightMultiExponent { corners: conv(doc.corners)?, edges: conv(doc.edges)? })
    }

    /// Checks that there is exactly one entry per corner and per edge.
    pub fn check_bound(&self, geom: &Geometry) -> Result<()> {
        if self.corners.len() != geom.num_corners() {
            return Err(Error::MissingData(format!(
                "{} corner weights for {} corners",
                self.corners.len(),
                geom.num_corners()
            )));
        }
        if self.edges.len() != geom.num_edges() {
            return Err(Error::MissingData(format!(
                "{} edge weights for {} edges",
                self.edges.len(),
                geom.num_edges()
            )));
        }
        Ok(())
    }

    pub fn corner_values(&self) -> Vec<f64> {
        self.corners.iter().map(|e| e.value()).collect()
    }

    pub fn edge_values(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.value()).collect()
    }

    /// Adds the same integer to every entry (e.g. `beta + 2` for right-hand sides).
    pub fn shifted(&self, k: i64) -> Self {
        WeightMultiExponent {
            corners: self.corners.iter().map(|e| e.add_int(k)).collect(),
            edges: self.edges.iter().map(|e| e.add_int(k)).collect(),
        }
    }
}

/// `kappa_beta`: the largest of `-beta` over corners and edges (0 when empty).
pub fn kappa(beta: &WeightMultiExponent) -> f64 {
    let all = beta.corners.iter().chain(&beta.edges);
    if beta.corners.is_empty() && beta.edges.is_empty() {
        return 0.0;
    }
    all.map(|b| -b.value()).fold(f64::NEG_INFINITY, f64::max)
}

/// Upper end of an admissibility interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum UpperBound {
    Finite(Exponent),
    Infinite,
}

impl UpperBound {
    fn above(&self, x: &Exponent) -> bool {
        match self {
            UpperBound::Finite(b) => x.compare(b) == Ordering::Less,
            UpperBound::Infinite => true,
        }
    }

    fn margin(&self, x: f64) -> f64 {
        match self {
            UpperBound::Finite(b) => b.value() - x,
            UpperBound::Infinite => f64::INFINITY,
        }
    }
}

/// Verdict for one entity: `lower <= value < upper`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub entity: String,
    pub id: usize,
    pub value: Exponent,
    pub lower: Exponent,
    pub upper: UpperBound,
    /// Which quantity sets the upper bound.
    pub active_bound: String,
    pub admissible: bool,
    /// Signed distance to the nearest violated endpoint (negative when violated).
    pub margin: f64,
}

fn verdict(entity: &str, id: usize, value: Exponent, lower: Exponent, upper: UpperBound, active: &str) -> Verdict {
    let lower_ok = value.compare(&lower) != Ordering::Less;
    let upper_ok = upper.above(&value);
    let margin = (value.value() - lower.value()).min(upper.margin(value.value()));
    Verdict {
        entity: entity.into(),
        id,
        value,
        lower,
        upper,
        active_bound: active.into(),
        admissible: lower_ok && upper_ok,
        margin,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub verdicts: Vec<Verdict>,
    /// Set when the inequalities are applied outside the setting where they are certified.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
}

/// Spectra of all sectors at one polygon corner (several sectors when sides of a
/// crack meet the boundary at the same point).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CornerSpectra {
    pub corner: usize,
    pub sectors: Vec<MellinSpectrum>,
}

impl CornerSpectra {
    /// Smallest positive exponent over the sectors.
    pub fn b_threshold(&self) -> Result<Exponent> {
        let mut best: Option<Exponent> = None;
        for s in &self.sectors {
            let b = s.b_threshold()?;
            if best.is_none_or(|x| b.compare(&x) == Ordering::Less) {
                best = Some(b);
            }
        }
        best.ok_or_else(|| Error::MissingData(format!("corner {} has no spectrum", self.corner)))
    }
}

/// Laplace spectra at every polygon corner, using the side tags.
pub fn polygon_corner_spectra(poly: &Polygon, window: f64) -> Result<Vec<CornerSpectra>> {
    poly.corners()
        .iter()
        .map(|c| {
            let sectors = c
                .sectors
                .iter()
                .map(|s| {
                    let bc = ProblemSpec::new(poly.sides()[s.first_side].bc, poly.sides()[s.second_side].bc);
                    corner_spectrum_laplace(s.opening, bc, window)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CornerSpectra { corner: c.id, sectors })
        })
        .collect()
}

/// Transverse Laplace spectra at every polyhedron edge, using the face tags.
pub fn polyhedron_edge_spectra(poly: &Polyhedron, window: f64) -> Result<Vec<MellinSpectrum>> {
    poly.edges()
        .iter()
        .map(|e| {
            let bc = ProblemSpec::new(poly.faces()[e.faces[0]].bc, poly.faces()[e.faces[1]].bc);
            corner_spectrum_laplace(e.opening, bc, window)
        })
        .collect()
}

fn zero() -> Exponent {
    Exponent::exact(Rational::from_integer(0))
}

/// `0 <= -beta_c - 1 < b_c` at every polygon corner.
pub fn admissible_2d(geom: &Geometry, beta: &WeightMultiExponent, spectra: &[CornerSpectra]) -> Result<AdmissibilityReport> {
    geom.as_polygon()?;
    beta.check_bound(geom)?;
    let mut verdicts = Vec::new();
    for (c, b) in beta.corners.iter().enumerate() {
        let s = spectra
            .iter()
            .find(|s| s.corner == c)
            .ok_or_else(|| Error::MissingData(format!("no spectrum for corner {c}")))?;
        let bound = s.b_threshold()?;
        verdicts.push(verdict("corner", c, b.neg().add_int(-1), zero(), UpperBound::Finite(bound), "b_c"));
    }
    Ok(AdmissibilityReport { admissible: verdicts.iter().all(|v| v.admissible), verdicts, caveat: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Dirichlet,
    Neumann,
    Mixed,
}

/// Edge conditions `0 <= -beta_e - 1 < b_e` and corner conditions
/// `-1/2 <= -beta_c - 3/2 < Lambda_c`, where `Lambda_c` is the Dirichlet limiting
/// exponent, or `min{2, lambda^Neu_c}` for Neumann problems. `corner_lambda` may
/// contain `f64::INFINITY` to drop the corner upper bound.
pub fn admissible_3d(
    geom: &Geometry,
    beta: &WeightMultiExponent,
    edge_spectra: &[MellinSpectrum],
    corner_lambda: &[f64],
    kind: ProblemKind,
) -> Result<AdmissibilityReport> {
    geom.as_polyhedron()?;
    beta.check_bound(geom)?;
    if edge_spectra.len() != geom.num_edges() {
        return Err(Error::MissingData(format!(
            "{} edge spectra for {} edges",
            edge_spectra.len(),
            geom.num_edges()
        )));
    }
    if corner_lambda.len() != geom.num_corners() {
        return Err(Error::MissingData(format!(
            "{} corner exponents for {} corners",
            corner_lambda.len(),
            geom.num_corners()
        )));
    }
    let mut verdicts = Vec::new();
    for (e, b) in beta.edges.iter().enumerate() {
        let bound = edge_spectra[e].b_threshold()?;
        verdicts.push(verdict("edge", e, b.neg().add_int(-1), zero(), UpperBound::Finite(bound), "b_e"));
    }
    for (c, b) in beta.corners.iter().enumerate() {
        let lam = corner_lambda[c];
        if lam.is_nan() || lam < 0.0 {
            return Err(Error::InvalidParameter(format!("corner {c}: limiting exponent {lam}")));
        }
        let (upper, active) = match kind {
            ProblemKind::Neumann if lam >= 2.0 => (UpperBound::Finite(Exponent::from_f64(2.0)), "two"),
            ProblemKind::Neumann => (finite_or_inf(lam), "lambda_neu"),
            _ => (finite_or_inf(lam), "lambda_dir"),
        };
        let value = b.neg().add(Exponent::exact(Rational::new(-3, 2)));
        verdicts.push(verdict("corner", c, value, Exponent::exact(Rational::new(-1, 2)), upper, active));
    }
    let caveat = (kind == ProblemKind::Mixed).then(|| {
        "mixed boundary conditions in 3D: same inequalities applied, not certified outside the framework of the underlying basic regularity results".to_string()
    });
    Ok(AdmissibilityReport { admissible: verdicts.iter().all(|v| v.admissible), verdicts, caveat })
}

fn finite_or_inf(x: f64) -> UpperBound {
    if x.is_infinite() {
        UpperBound::Infinite
    } else {
        UpperBound::Finite(Exponent::from_f64(x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftVerdict {
    pub edge: usize,
    pub value: Exponent,
    pub lower_bound_ok: bool,
    /// `k` with `-beta_e - 1 = k pi / omega_e`, when resonant.
    pub resonant_k: Option<i64>,
    pub satisfied: bool,
}

/// `0 <= -beta_e - 1` and `-beta_e - 1` not an exponent of the edge spectrum.
pub fn shift_condition_aniso(geom: &Geometry, beta: &WeightMultiExponent, edge_spectra: &[MellinSpectrum]) -> Result<Vec<ShiftVerdict>> {
    geom.as_polyhedron()?;
    beta.check_bound(geom)?;
    if edge_spectra.len() != geom.num_edges() {
        return Err(Error::MissingData("one spectrum per edge required".into()));
    }
    Ok(beta
        .edges
        .iter()
        .zip(edge_spectra)
        .enumerate()
        .map(|(e, (b, s))| {
            let value = b.neg().add_int(-1);
            let lower_bound_ok = value.compare(&zero()) != Ordering::Less;
            let resonant_k = s.contains(value).then(|| {
                let p = s.opening.pi_over().value();
                (value.value() / p).round() as i64
            });
            ShiftVerdict { edge: e, value, lower_bound_ok, resonant_k, satisfied: lower_bound_ok && resonant_k.is_none() }
        })
        .collect())
}

/// Closed-range condition at an edge: `-beta_e - 1` is not in the spectrum.
pub fn edge_closed_range_condition(beta_e: Exponent, spectrum: &MellinSpectrum) -> bool {
    !spectrum.contains(beta_e.neg().add_int(-1))
}

/// Weights `beta` with `lower < beta <= upper` satisfy a condition of the form
/// `0 <= -beta - shift < bound`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleInterval {
    /// Exclusive; `None` when unbounded below.
    pub lower: Option<Exponent>,
    /// Inclusive.
    pub upper: Exponent,
}

/// Interval of corner (2D) or edge (3D) weights: `-1 - b < beta <= -1`.
pub fn admissible_interval_2d(b: Exponent) -> AdmissibleInterval {
    AdmissibleInterval { lower: Some(b.neg().add_int(-1)), upper: Exponent::exact(Rational::from_integer(-1)) }
}

/// Interval of 3D corner weights: `-3/2 - Lambda < beta <= -1`.
pub fn admissible_interval_corner_3d(upper: UpperBound) -> AdmissibleInterval {
    let lower = match upper {
        UpperBound::Finite(l) => Some(l.neg().add(Exponent::exact(Rational::new(-3, 2)))),
        UpperBound::Infinite => None,
    };
    AdmissibleInterval { lower, upper: Exponent::exact(Rational::from_integer(-1)) }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use proptest::prelude::*;

    use super::*;
    use crate::exact::Angle;
    use crate::geometry::bundled::{cube, fichera, l_shape, slit_square};

    fn l_spectra() -> Vec<CornerSpectra> {
        polygon_corner_spectra(l_shape().as_polygon().unwrap(), 10.0).unwrap()
    }

    fn l_weights(b0: f64) -> WeightMultiExponent {
        let mut w = vec![-1.0; 6];
        w[0] = b0;
        WeightMultiExponent::new(w, vec![]).unwrap()
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(&WeightMultiExponent::new(vec![-1.5, -0.2], vec![]).unwrap()), 1.5);
        assert_eq!(kappa(&WeightMultiExponent::new(vec![-1.4], vec![-1.8]).unwrap()), 1.8);
        assert_eq!(kappa(&WeightMultiExponent::new(vec![0.0, 0.0], vec![0.0]).unwrap()), 0.0);
    }

    #[test]
    fn l_shape_dirichlet_admissibility() {
        let g = l_shape();
        let r = admissible_2d(&g, &l_weights(-1.5), &l_spectra()).unwrap();
        assert!(r.admissible);
        assert!((r.verdicts[0].margin - (2.0 / 3.0 - 0.5)).abs() < 1e-15);
        let r = admissible_2d(&g, &l_weights(-1.7), &l_spectra()).unwrap();
        assert!(!r.admissible && !r.verdicts[0].admissible);
        let r = admissible_2d(&g, &l_weights(-1.0), &l_spectra()).unwrap();
        assert!(r.admissible);
        assert_eq!(r.verdicts[0].margin, 0.0);
    }

    #[test]
    fn upper_endpoint_is_excluded_exactly() {
        let g = l_shape();
        let r = admissible_2d(&g, &l_weights(-5.0 / 3.0), &l_spectra()).unwrap();
        assert!(!r.verdicts[0].admissible);
        let r = admissible_2d(&g, &l_weights(-5.0 / 3.0 + 1e-3), &l_spectra()).unwrap();
        assert!(r.verdicts[0].admissible);
        let r = admissible_2d(&g, &l_weights(-5.0 / 3.0 - 1e-3), &l_spectra()).unwrap();
        assert!(!r.verdicts[0].admissible);
    }

    #[test]
    fn missing_spectrum_is_reported() {
        let g = l_shape();
        let spectra = l_spectra()[..3].to_vec();
        assert!(matches!(admissible_2d(&g, &l_weights(-1.5), &spectra), Err(Error::MissingData(_))));
    }

    #[test]
    fn slit_end_uses_smallest_sector_threshold() {
        let s = polygon_corner_spectra(slit_square().as_polygon().unwrap(), 10.0).unwrap();
        assert_eq!(s[0].b_threshold().unwrap().value(), 0.5);
        assert_eq!(s[1].sectors.len(), 2);
        assert_eq!(s[1].b_threshold().unwrap().value(), 2.0);
    }

    fn cube_setup(be: f64, bc: f64) -> (Geometry, WeightMultiExponent, Vec<MellinSpectrum>) {
        let g = cube();
        let w = WeightMultiExponent::uniform(&g, bc, be).unwrap();
        let s = polyhedron_edge_spectra(g.as_polyhedron().unwrap(), 10.0).unwrap();
        (g, w, s)
    }

    #[test]
    fn cube_dirichlet_admissible() {
        let (g, w, s) = cube_setup(-1.5, -2.0);
        let r = admissible_3d(&g, &w, &s, &[3.0; 8], ProblemKind::Dirichlet).unwrap();
        assert!(r.admissible);
        assert!(r.verdicts.iter().filter(|v| v.entity == "corner").all(|v| v.active_bound == "lambda_dir"));
    }

    #[test]
    fn fichera_dirichlet_inadmissible_at_reentrant_corner() {
        let g = fichera();
        let w = WeightMultiExponent::uniform(&g, -2.0, -1.2).unwrap();
        let s = polyhedron_edge_spectra(g.as_polyhedron().unwrap(), 10.0).unwrap();
        let mut lam = vec![3.0; 14];
        lam[0] = 0.45418;
        let r = admissible_3d(&g, &w, &s, &lam, ProblemKind::Dirichlet).unwrap();
        assert!(!r.admissible);
        let bad: Vec<_> = r.verdicts.iter().filter(|v| !v.admissible).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!((bad[0].entity.as_str(), bad[0].id), ("corner", 0));
    }

    #[test]
    fn cube_neumann_uses_min_with_two() {
        let (g, w, s) = cube_setup(-1.5, -2.0);
        let r = admissible_3d(&g, &w, &s, &[2.0; 8], ProblemKind::Neumann).unwrap();
        assert!(r.admissible);
        assert!(r.verdicts.iter().filter(|v| v.entity == "corner").all(|v| v.active_bound == "two"));
        let r = admissible_3d(&g, &w, &s, &[1.2; 8], ProblemKind::Neumann).unwrap();
        assert!(r.verdicts.iter().filter(|v| v.entity == "corner").all(|v| v.active_bound == "lambda_neu"));
    }

    #[test]
    fn mixed_3d_is_flagged() {
        let (g, w, s) = cube_setup(-1.5, -2.0);
        let r = admissible_3d(&g, &w, &s, &[3.0; 8], ProblemKind::Mixed).unwrap();
        assert!(r.caveat.is_some());
        assert!(admissible_3d(&g, &w, &s, &[3.0; 7], ProblemKind::Mixed).is_err());
    }

    #[test]
    fn infinite_corner_bounds_leave_only_lower_bounds() {
        let (g, w, s) = cube_setup(-1.5, -50.0);
        let r = admissible_3d(&g, &w, &s, &[f64::INFINITY; 8], ProblemKind::Dirichlet).unwrap();
        assert!(r.admissible);
        let (g, w, s) = cube_setup(-1.5, -0.9);
        let r = admissible_3d(&g, &w, &s, &[f64::INFINITY; 8], ProblemKind::Dirichlet).unwrap();
        assert!(!r.admissible);
    }

    #[test]
    fn shift_condition_examples() {
        let (g, w, s) = cube_setup(-3.0, -2.0);
        let v = shift_condition_aniso(&g, &w, &s).unwrap();
        assert!(v.iter().all(|v| !v.satisfied && v.resonant_k == Some(1)));
        let (g, w, s) = cube_setup(-2.5, -2.0);
        assert!(shift_condition_aniso(&g, &w, &s).unwrap().iter().all(|v| v.satisfied));
        let (g, w, s) = cube_setup(-0.5, -2.0);
        let v = shift_condition_aniso(&g, &w, &s).unwrap();
        assert!(v.iter().all(|v| !v.lower_bound_ok && !v.satisfied));
    }

    #[test]
    fn closed_range_examples() {
        let right = Angle::from_radians(PI / 2.0);
        let dir = corner_spectrum_laplace(right, ProblemSpec::dirichlet(), 10.0).unwrap();
        let neu = corner_spectrum_laplace(right, ProblemSpec::neumann(), 10.0).unwrap();
        assert!(edge_closed_range_condition(Exponent::from_f64(-1.5), &dir));
        assert!(!edge_closed_range_condition(Exponent::from_f64(-3.0), &dir));
        assert!(!edge_closed_range_condition(Exponent::from_f64(-1.0), &neu));
    }

    #[test]
    fn intervals() {
        let i = admissible_interval_2d(Exponent::exact(Rational::new(2, 3)));
        assert_eq!(i.lower.unwrap().exact_value(), Some(Rational::new(-5, 3)));
        assert_eq!(i.upper.value(), -1.0);
        assert_eq!(admissible_interval_corner_3d(UpperBound::Infinite).lower, None);
        let c = admissible_interval_corner_3d(UpperBound::Finite(Exponent::from_f64(3.0)));
        assert_eq!(c.lower.unwrap().value(), -4.5);
    }

    #[test]
    fn report_round_trips() {
        let r = admissible_2d(&l_shape(), &l_weights(-1.5), &l_spectra()).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: AdmissibilityReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    proptest! {
        #[test]
        fn raising_weights_keeps_admissibility(b in -1.66f64..-1.0, up in 0.0f64..0.7) {
            let g = l_shape();
            let r = admissible_2d(&g, &l_weights(b), &l_spectra()).unwrap();
            prop_assert!(r.admissible);
            let b2 = (b + up).min(-1.0);
            prop_assert!(admissible_2d(&g, &l_weights(b2), &l_spectra()).unwrap().admissible);
        }

        #[test]
        fn kappa_is_permutation_invariant(mut v in proptest::collection::vec(-5.0f64..5.0, 1..8), rot in 0usize..8) {
            let k1 = kappa(&WeightMultiExponent::new(v.clone(), vec![]).unwrap());
            let n = v.len();
            v.rotate_left(rot % n);
            v.reverse();
            prop_assert_eq!(k1, kappa(&WeightMultiExponent::new(v, vec![]).unwrap()));
        }
    }
}
