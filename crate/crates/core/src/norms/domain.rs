//! Integration domains for the weighted norms and their decomposition into pieces.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Geometry, Polygon, Polyhedron};
use crate::vecmath::{cross2, dist_point_segment, dot2, sub2, P2, P3};

/// A domain on which weighted norms are evaluated.
#[derive(Clone, Debug)]
pub enum NormDomain {
    /// `{ (r cos t, r sin t) : 0 < r < radius, start < t < start + opening }`, one corner at
    /// the origin.
    Sector { start_angle: f64, opening: f64, radius: f64 },
    Polygon(Polygon),
    /// Sector cross-section times `(z0, z1)`: one edge along the z-axis and no corners.
    Wedge { start_angle: f64, opening: f64, radius: f64, z0: f64, z1: f64 },
    /// Orthogonal polyhedra only (every edge parallel to an axis).
    Polyhedron(Polyhedron),
}

/// A straight singular edge used by the weights.
#[derive(Clone, Debug, Serialize)]
pub struct EdgeLine {
    pub a: P3,
    pub b: P3,
    pub axis: usize,
}

/// Corners and edges that carry weights.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Entities {
    pub corners: Vec<P3>,
    pub edges: Vec<EdgeLine>,
}

impl Entities {
    /// Distances to every corner and every edge.
    pub fn distances(&self, x: &[f64], r_corner: &mut [f64], r_edge: &mut [f64]) {
        for (r, c) in r_corner.iter_mut().zip(&self.corners) {
            *r = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        }
        for (r, e) in r_edge.iter_mut().zip(&self.edges) {
            *r = dist_point_segment(x, &e.a, &e.b);
        }
    }
}

impl NormDomain {
    pub fn from_geometry(geom: &Geometry) -> Result<Self> {
        match geom {
            Geometry::Polygon(p) => Ok(NormDomain::Polygon(p.clone())),
            Geometry::Polyhedron(p) => {
                if !p.is_orthogonal() {
                    return Err(Error::Unsupported("weighted norms on non-orthogonal polyhedra".into()));
                }
                Ok(NormDomain::Polyhedron(p.clone()))
            }
        }
    }

    /// The L-shaped model sector: opening `3 pi / 2`, unit radius.
    pub fn l_sector() -> Self {
        NormDomain::Sector { start_angle: 0.0, opening: 1.5 * PI, radius: 1.0 }
    }

    pub fn dim(&self) -> usize {
        match self {
            NormDomain::Sector { .. } | NormDomain::Polygon(_) => 2,
            NormDomain::Wedge { .. } | NormDomain::Polyhedron(_) => 3,
        }
    }

    pub fn num_corners(&self) -> usize {
        match self {
            NormDomain::Sector { .. } => 1,
            NormDomain::Polygon(p) => p.corners().len(),
            NormDomain::Wedge { .. } => 0,
            NormDomain::Polyhedron(p) => p.vertices().len(),
        }
    }

    pub fn num_edges(&self) -> usize {
        match self {
            NormDomain::Sector { .. } | NormDomain::Polygon(_) => 0,
            NormDomain::Wedge { .. } => 1,
            NormDomain::Polyhedron(p) => p.edges().len(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            NormDomain::Sector { start_angle, opening, radius } => {
                format!("sector(start={start_angle}, opening={opening}, radius={radius})")
            }
            NormDomain::Polygon(p) => format!("polygon({} corners)", p.corners().len()),
            NormDomain::Wedge { start_angle, opening, radius, z0, z1 } => {
                format!("wedge(start={start_angle}, opening={opening}, radius={radius}, z=[{z0},{z1}])")
            }
            NormDomain::Polyhedron(p) => format!("polyhedron({} corners, {} edges)", p.vertices().len(), p.edges().len()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.into()));
        match self {
            NormDomain::Sector { opening, radius, .. } | NormDomain::Wedge { opening, radius, .. } => {
                if !(*opening > 0.0 && *opening <= 2.0 * PI) {
                    return Err(Error::OpeningOutOfRange(*opening));
                }
                if !(*radius > 0.0) {
                    return bad("radius must be positive");
                }
                if let NormDomain::Wedge { z0, z1, .. } = self {
                    if !(z1 > z0) {
                        return bad("wedge needs z0 < z1");
                    }
                }
                Ok(())
            }
            NormDomain::Polygon(p) => {
                if p.loops().len() != 1 {
                    return Err(Error::Unsupported("norms on polygons with several boundary loops".into()));
                }
                Ok(())
            }
            NormDomain::Polyhedron(p) => {
                if !p.is_orthogonal() {
                    return Err(Error::Unsupported("weighted norms on non-orthogonal polyhedra".into()));
                }
                Ok(())
            }
        }
    }

    pub fn entities(&self) -> Entities {
        match self {
            NormDomain::Sector { .. } => Entities { corners: vec![[0.0; 3]], edges: vec![] },
            NormDomain::Polygon(p) => Entities {
                corners: p.corners().iter().map(|c| [c.position[0], c.position[1], 0.0]).collect(),
                edges: vec![],
            },
            NormDomain::Wedge { z0, z1, .. } => Entities {
                corners: vec![],
                edges: vec![EdgeLine { a: [0.0, 0.0, *z0], b: [0.0, 0.0, *z1], axis: 2 }],
            },
            NormDomain::Polyhedron(p) => Entities {
                corners: p.vertices().to_vec(),
                edges: p
                    .edges()
                    .iter()
                    .map(|e| {
                        let (a, b) = (p.vertices()[e.a], p.vertices()[e.b]);
                        let axis = (0..3).max_by(|&i, &j| (b[i] - a[i]).abs().total_cmp(&(b[j] - a[j]).abs())).unwrap();
                        EdgeLine { a, b, axis }
                    })
                    .collect(),
            },
        }
    }

    /// Splits the domain into pieces, each singular at most at one apex, vertex or edge.
    pub(crate) fn pieces(&self) -> Result<Vec<Piece>> {
        self.validate()?;
        match self {
            NormDomain::Sector { start_angle, opening, radius } => {
                Ok(vec![Piece::Sector { start: *start_angle, opening: *opening, radius: *radius }])
            }
            NormDomain::Wedge { start_angle, opening, radius, z0, z1 } => Ok(vec![Piece::Wedge {
                start: *start_angle,
                opening: *opening,
                radius: *radius,
                z0: *z0,
                z1: *z1,
            }]),
            NormDomain::Polygon(p) => polygon_pieces(p),
            NormDomain::Polyhedron(p) => polyhedron_pieces(p),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Piece {
    /// Triangle collapsed onto `apex`; layered towards the apex when `singular`.
    Triangle { apex: P2, b: P2, c: P2, singular: bool },
    Sector { start: f64, opening: f64, radius: f64 },
    Wedge { start: f64, opening: f64, radius: f64, z0: f64, z1: f64 },
    Box { lo: P3, hi: P3 },
    /// Box with a singular edge along `axis` through its vertex `vertex`.
    BoxEdge { lo: P3, hi: P3, axis: usize, vertex: P3 },
    /// Box with a singular corner at its vertex `vertex`, plus singular edges through it.
    BoxCorner { lo: P3, hi: P3, vertex: P3, edges: [bool; 3] },
}

fn polygon_pieces(p: &Polygon) -> Result<Vec<Piece>> {
    let pos: Vec<P2> = p.corners().iter().map(|c| c.position).collect();
    let mut out = Vec::new();
    for [i, j, k] in p.triangulate()? {
        let (a, b, c) = (pos[i], pos[j], pos[k]);
        let mid = |u: P2, v: P2| [(u[0] + v[0]) / 2.0, (u[1] + v[1]) / 2.0];
        let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
        out.push(Piece::Triangle { apex: a, b: ab, c: ca, singular: true });
        out.push(Piece::Triangle { apex: b, b: bc, c: ab, singular: true });
        out.push(Piece::Triangle { apex: c, b: ca, c: bc, singular: true });
        out.push(Piece::Triangle { apex: ab, b: bc, c: ca, singular: false });
    }
    Ok(out)
}

fn polyhedron_pieces(p: &Polyhedron) -> Result<Vec<Piece>> {
    let mut coords: [Vec<f64>; 3] = Default::default();
    let scale = p.diameter();
    let tol = 1e-10 * scale;
    for (i, c) in coords.iter_mut().enumerate() {
        let mut v: Vec<f64> = p.vertices().iter().map(|x| x[i]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() <= tol);
        *c = v;
    }
    let ents = NormDomain::Polyhedron(p.clone()).entities();
    let is_corner = |x: P3| ents.corners.iter().any(|c| (0..3).all(|i| (c[i] - x[i]).abs() <= tol));
    let on_edge = |x: P3| ents.edges.iter().any(|e| dist_point_segment(&x, &e.a, &e.b) <= tol);
    let mut out = Vec::new();
    for ix in 0..coords[0].len() - 1 {
        for iy in 0..coords[1].len() - 1 {
            for iz in 0..coords[2].len() - 1 {
                let lo = [coords[0][ix], coords[1][iy], coords[2][iz]];
                let hi = [coords[0][ix + 1], coords[1][iy + 1], coords[2][iz + 1]];
                let centre = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0, (lo[2] + hi[2]) / 2.0];
                if !p.contains(centre) {
                    continue;
                }
                // bisect so that every octant touches one vertex of the box
                for bits in 0..8usize {
                    let pick = |i: usize| (bits >> i) & 1 == 1;
                    let vertex: P3 = std::array::from_fn(|i| if pick(i) { hi[i] } else { lo[i] });
                    let olo: P3 = std::array::from_fn(|i| vertex[i].min(centre[i]));
                    let ohi: P3 = std::array::from_fn(|i| vertex[i].max(centre[i]));
                    let edges: [bool; 3] = std::array::from_fn(|k| {
                        let mut m = vertex;
                        m[k] = (vertex[k] + centre[k]) / 2.0;
                        on_edge(m)
                    });
                    let piece = if is_corner(vertex) {
                        Piece::BoxCorner { lo: olo, hi: ohi, vertex, edges }
                    } else {
                        match edges.iter().filter(|e| **e).count() {
                            0 => Piece::Box { lo: olo, hi: ohi },
                            1 => Piece::BoxEdge { lo: olo, hi: ohi, axis: edges.iter().position(|e| *e).unwrap(), vertex },
                            _ => return Err(Error::Degenerate("two edges meet away from a corner".into())),
                        }
                    };
                    out.push(piece);
                }
            }
        }
    }
    Ok(out)
}

/// Angle subtended at `apex` by the segment `b c`.
pub(crate) fn apex_angle(apex: P2, b: P2, c: P2) -> f64 {
    let (u, v) = (sub2(b, apex), sub2(c, apex));
    cross2(u, v).abs().atan2(dot2(u, v))
}
