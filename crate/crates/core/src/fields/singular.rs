//! Corner and edge singular functions of the Laplacian.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::jet::{factorial, index_of, indices_of_degree, Jet};
use super::{Field, Singularity, DEFAULT_MAX_ORDER};
use crate::error::{Error, Result};
use crate::exact::{Angle, Exponent, Rational};
use crate::geometry::{BoundaryCondition, Polygon, Polyhedron};
use crate::vecmath::{cross3, dot3, sub3};
use crate::spectra2d::{ProblemSpec, SpectrumKind};

/// `r^lambda sin(lambda theta)` (or `cos`) in the sector `start < theta < start + opening`
/// around `center`, with `lambda` the `k`-th positive exponent for the side conditions.
///
/// The sine is used when the first side carries a Dirichlet condition, the cosine
/// when it carries a Neumann condition.
#[derive(Clone, Debug)]
pub struct CornerSingular {
    center: [f64; 2],
    start_angle: f64,
    opening: Angle,
    lambda: Exponent,
    k: i64,
    bc: ProblemSpec,
    max_order: usize,
}

/// `k`-th positive exponent (`k >= 1`) of the sector family.
pub fn kth_exponent(opening: Angle, bc: ProblemSpec, k: i64) -> Exponent {
    let p = opening.pi_over();
    match bc.kind() {
        SpectrumKind::Mixed => p.mul_ratio(Rational::new(2 * k - 1, 2)),
        _ => p.mul_int(k),
    }
}

impl CornerSingular {
    pub fn new(center: [f64; 2], start_angle: f64, opening: Angle, k: i64, bc: ProblemSpec) -> Result<Self> {
        let w = opening.radians();
        if !(w > 0.0 && w <= 2.0 * PI * (1.0 + 1e-12)) {
            return Err(Error::OpeningOutOfRange(w));
        }
        if k < 1 {
            return Err(Error::InvalidParameter(format!("singular function index k must be >= 1, got {k}")));
        }
        let lambda = kth_exponent(opening, bc, k);
        if lambda.is_integer() {
            return Err(Error::CriticalCase(format!(
                "exponent {lambda} is an integer: logarithmic case unsupported"
            )));
        }
        Ok(CornerSingular { center, start_angle, opening, lambda, k, bc, max_order: DEFAULT_MAX_ORDER })
    }

    /// Singular function of the first sector at a polygon corner.
    pub fn at_corner(poly: &Polygon, corner: usize, k: i64, bc: ProblemSpec) -> Result<Self> {
        let c = poly.corner(corner)?;
        let s = &c.sectors[0];
        Self::new(c.position, s.start_angle, s.opening, k, bc)
    }

    /// Same, with the side conditions of the polygon.
    pub fn at_corner_with_polygon_bc(poly: &Polygon, corner: usize, k: i64) -> Result<Self> {
        let c = poly.corner(corner)?;
        let s = &c.sectors[0];
        let bc = ProblemSpec::new(poly.sides()[s.first_side].bc, poly.sides()[s.second_side].bc);
        Self::new(c.position, s.start_angle, s.opening, k, bc)
    }

    pub fn with_max_order(mut self, m: usize) -> Self {
        self.max_order = m;
        self
    }

    pub fn lambda(&self) -> Exponent {
        self.lambda
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn opening(&self) -> Angle {
        self.opening
    }

    pub fn center(&self) -> [f64; 2] {
        self.center
    }

    pub fn start_angle(&self) -> f64 {
        self.start_angle
    }

    fn uses_sine(&self) -> bool {
        self.bc.sides[0] == BoundaryCondition::Dirichlet
    }

    /// Local polar coordinates; the branch cut points away from the sector.
    pub fn polar(&self, x: &[f64]) -> (f64, f64) {
        let (dx, dy) = (x[0] - self.center[0], x[1] - self.center[1]);
        let (s, c) = self.start_angle.sin_cos();
        let (u, v) = (c * dx + s * dy, -s * dx + c * dy);
        let r = u.hypot(v);
        let mut theta = v.atan2(u);
        let w = self.opening.radians();
        if theta <= w / 2.0 - PI {
            theta += 2.0 * PI;
        }
        if theta > w / 2.0 + PI {
            theta -= 2.0 * PI;
        }
        (r, theta)
    }

    /// 2D jet (coefficients of `d^alpha / alpha!`).
    pub fn jet2(&self, x: &[f64], order: usize) -> Jet {
        let (r, theta) = self.polar(x);
        let lam = self.lambda.value();
        let mut jet = Jet::zero(2, order);
        let coef = jet.coefficients_mut();
        let ln_r = r.ln();
        let mut falling = 1.0;
        for n in 0..=order {
            let mag = falling * ((lam - n as f64) * ln_r).exp();
            let phase0 = (lam - n as f64) * theta - n as f64 * self.start_angle;
            for a in indices_of_degree(2, n) {
                let b = a[1];
                let phase = phase0 + b as f64 * PI / 2.0;
                let d = if self.uses_sine() { mag * phase.sin() } else { mag * phase.cos() };
                coef[index_of(&a[..2])] = d / (factorial(a[0]) * factorial(b));
            }
            falling *= lam - n as f64;
        }
        jet
    }
}

impl Field for CornerSingular {
    fn dim(&self) -> usize {
        2
    }

    fn max_order(&self) -> usize {
        self.max_order
    }

    fn jet_unchecked(&self, x: &[f64], order: usize) -> Jet {
        self.jet2(x, order)
    }

    fn singularities(&self) -> Vec<Singularity> {
        vec![Singularity::Corner { position: self.center.to_vec(), exponent: self.lambda.value() }]
    }

    fn is_harmonic(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        format!(
            "corner singular function k={} lambda={} at ({}, {})",
            self.k, self.lambda, self.center[0], self.center[1]
        )
    }
}

/// Smooth factor along an edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AxialProfile {
    Constant { value: f64 },
    Sin { frequency: f64 },
    Cos { frequency: f64 },
    Exp { rate: f64 },
    /// Coefficients of `1, t, t^2, ...`.
    Polynomial { coefficients: Vec<f64> },
}

impl AxialProfile {
    /// Taylor coefficients `g^(k)(t) / k!`, `k = 0..=order`.
    pub fn taylor(&self, t: f64, order: usize) -> Vec<f64> {
        match self {
            AxialProfile::Constant { value } => {
                let mut v = vec![0.0; order + 1];
                v[0] = *value;
                v
            }
            AxialProfile::Sin { frequency: w } | AxialProfile::Cos { frequency: w } => {
                let (s, c) = (w * t).sin_cos();
                let cycle = if matches!(self, AxialProfile::Sin { .. }) { [s, c, -s, -c] } else { [c, -s, -c, s] };
                (0..=order).map(|k| cycle[k % 4] * w.powi(k as i32) / factorial(k)).collect()
            }
            AxialProfile::Exp { rate } => {
                let e = (rate * t).exp();
                (0..=order).map(|k| e * rate.powi(k as i32) / factorial(k)).collect()
            }
            AxialProfile::Polynomial { coefficients } => {
                let var = Jet::variable(1, order, 0, t);
                let mut acc = Jet::zero(1, order);
                for c in coefficients.iter().rev() {
                    acc = acc.mul(&var).add_constant(*c);
                }
                acc.coefficients().to_vec()
            }
        }
    }

    /// Whether every derivative of order `k >= 1` vanishes identically.
    pub fn is_constant(&self) -> bool {
        match self {
            AxialProfile::Constant { .. } => true,
            AxialProfile::Polynomial { coefficients } => coefficients.iter().skip(1).all(|c| *c == 0.0),
            AxialProfile::Sin { frequency } | AxialProfile::Cos { frequency } => *frequency == 0.0,
            AxialProfile::Exp { rate } => *rate == 0.0,
        }
    }

    /// Highest order with a derivative that is not identically zero (None = all).
    pub fn degree(&self) -> Option<usize> {
        match self {
            AxialProfile::Constant { .. } => Some(0),
            AxialProfile::Polynomial { coefficients } => {
                Some(coefficients.iter().rposition(|c| *c != 0.0).unwrap_or(0))
            }
            _ if self.is_constant() => Some(0),
            _ => None,
        }
    }
}

/// `s(x_perp) g(x_par)` near a straight edge parallel to a coordinate axis, with `s`
/// a corner singular function of the transverse sector.
#[derive(Clone, Debug)]
pub struct EdgeSingular3d {
    axis: usize,
    point: [f64; 3],
    transverse: CornerSingular,
    profile: AxialProfile,
}

impl EdgeSingular3d {
    /// `axis` is the edge direction; the transverse plane uses coordinates
    /// `(axis + 1) % 3` and `(axis + 2) % 3`, in that order.
    pub fn new(
        axis: usize,
        point: [f64; 3],
        start_angle: f64,
        opening: Angle,
        k: i64,
        bc: ProblemSpec,
        profile: AxialProfile,
    ) -> Result<Self> {
        if axis > 2 {
            return Err(Error::InvalidParameter(format!("axis {axis} out of range")));
        }
        let (i, j) = ((axis + 1) % 3, (axis + 2) % 3);
        let transverse = CornerSingular::new([point[i], point[j]], start_angle, opening, k, bc)?;
        Ok(EdgeSingular3d { axis, point, transverse, profile })
    }

    /// Singular function at an axis-parallel polyhedron edge, with the face conditions.
    pub fn at_edge(poly: &Polyhedron, edge: usize, k: i64, profile: AxialProfile) -> Result<Self> {
        let e = poly.edge(edge)?;
        let (a, b) = poly.edge_endpoints(edge);
        let t = sub3(b, a);
        let axis = (0..3)
            .find(|&i| (0..3).all(|j| j == i || t[j].abs() <= 1e-12 * t[i].abs()))
            .ok_or_else(|| Error::Unsupported(format!("edge {edge} is not parallel to a coordinate axis")))?;
        let mut unit = [0.0; 3];
        unit[axis] = 1.0;
        let n1 = poly.faces()[e.faces[0]].normal;
        let n2 = poly.faces()[e.faces[1]].normal;
        let tn = crate::vecmath::normalize3(t);
        let d1 = cross3(n1, tn);
        let d2 = cross3(tn, n2);
        // The sector sweeps from d1 toward -n1; take it counter-clockwise in the
        // transverse plane.
        let (i, j) = ((axis + 1) % 3, (axis + 2) % 3);
        let ccw_from_d1 = dot3(cross3(unit, d1), n1) < 0.0;
        let (start, first, second) =
            if ccw_from_d1 { (d1, e.faces[0], e.faces[1]) } else { (d2, e.faces[1], e.faces[0]) };
        let bc = ProblemSpec::new(poly.faces()[first].bc, poly.faces()[second].bc);
        Self::new(axis, a, start[j].atan2(start[i]), e.opening, k, bc, profile)
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn lambda(&self) -> Exponent {
        self.transverse.lambda()
    }

    pub fn profile(&self) -> &AxialProfile {
        &self.profile
    }

    pub fn transverse(&self) -> &CornerSingular {
        &self.transverse
    }
}

impl Field for EdgeSingular3d {
    fn dim(&self) -> usize {
        3
    }

    fn max_order(&self) -> usize {
        self.transverse.max_order
    }

    fn jet_unchecked(&self, x: &[f64], order: usize) -> Jet {
        let (i, j) = ((self.axis + 1) % 3, (self.axis + 2) % 3);
        let s = self.transverse.jet2(&[x[i], x[j]], order);
        let g = self.profile.taylor(x[self.axis], order);
        let mut out = Jet::zero(3, order);
        let coef = out.coefficients_mut();
        for n in 0..=order {
            for a in indices_of_degree(3, n) {
                let (p, q, r) = (a[self.axis], a[i], a[j]);
                coef[index_of(&a)] = g[p] * s.coef(&[q, r]);
            }
        }
        out
    }

    fn singularities(&self) -> Vec<Singularity> {
        vec![Singularity::Edge { axis: self.axis, point: self.point.to_vec(), exponent: self.lambda().value() }]
    }

    fn is_harmonic(&self) -> bool {
        self.profile.is_constant()
    }

    fn describe(&self) -> String {
        format!("edge singular function lambda={} along axis {} times {:?}", self.lambda(), self.axis, self.profile)
    }
}
