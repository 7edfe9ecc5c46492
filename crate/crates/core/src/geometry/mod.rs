//! Polygons and polyhedra: openings, distance functions, neighborhoods and dyadic covers.

pub mod bundled;
pub mod document;
pub mod dyadic;
pub mod neighborhoods;
pub mod polygon;
pub mod polyhedron;

use serde::Serialize;

pub use document::{BoundaryCondition, GeometryDocument};
pub use polygon::{Corner2d, Polygon, Sector, Side};
pub use polyhedron::{Edge, Face, Polyhedron};

use crate::error::{Error, Result};
use crate::exact::Angle;
use crate::vecmath::{dist_nd, dist_point_segment};

/// A polygon or a polyhedron.
#[derive(Clone, Debug)]
pub enum Geometry {
    Polygon(Polygon),
    Polyhedron(Polyhedron),
}

/// Parses, validates and builds a geometry from its JSON description.
pub fn load_geometry(text: &str) -> Result<Geometry> {
    let doc = GeometryDocument::from_json(text)?;
    Geometry::from_document(&doc)
}

impl Geometry {
    pub fn from_document(doc: &GeometryDocument) -> Result<Self> {
        doc.validate()?;
        match doc.dimension {
            2 => Ok(Geometry::Polygon(Polygon::from_document(doc)?)),
            _ => Ok(Geometry::Polyhedron(Polyhedron::from_document(doc)?)),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Geometry::Polygon(_) => 2,
            Geometry::Polyhedron(_) => 3,
        }
    }

    pub fn as_polygon(&self) -> Result<&Polygon> {
        match self {
            Geometry::Polygon(p) => Ok(p),
            Geometry::Polyhedron(_) => Err(Error::WrongDimension { expected: 2, actual: 3 }),
        }
    }

    pub fn as_polyhedron(&self) -> Result<&Polyhedron> {
        match self {
            Geometry::Polyhedron(p) => Ok(p),
            Geometry::Polygon(_) => Err(Error::WrongDimension { expected: 3, actual: 2 }),
        }
    }

    pub fn num_corners(&self) -> usize {
        match self {
            Geometry::Polygon(p) => p.corners().len(),
            Geometry::Polyhedron(p) => p.vertices().len(),
        }
    }

    pub fn num_edges(&self) -> usize {
        match self {
            Geometry::Polygon(_) => 0,
            Geometry::Polyhedron(p) => p.edges().len(),
        }
    }

    pub fn corner_position(&self, c: usize) -> Result<Vec<f64>> {
        match self {
            Geometry::Polygon(p) => Ok(p.corner(c)?.position.to_vec()),
            Geometry::Polyhedron(p) => Ok(p.corner_position(c)?.to_vec()),
        }
    }

    pub fn corner_opening(&self, c: usize) -> Result<Angle> {
        self.as_polygon()?.corner_opening(c)
    }

    pub fn edge_opening(&self, e: usize) -> Result<Angle> {
        self.as_polyhedron()?.edge_opening(e)
    }

    pub fn min_corner_distance(&self) -> f64 {
        match self {
            Geometry::Polygon(p) => p.min_corner_distance(),
            Geometry::Polyhedron(p) => p.min_corner_distance(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Geometry::Polygon(p) => p.contains([x[0], x[1]]),
            Geometry::Polyhedron(p) => p.contains([x[0], x[1], x[2]]),
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::WrongDimension { expected: self.dimension(), actual: x.len() });
        }
        Ok(())
    }

    /// Distance functions at `x`.
    pub fn distances(&self, x: &[f64]) -> Result<Distances> {
        self.check_point(x)?;
        let corner = (0..self.num_corners())
            .map(|c| dist_nd(x, &self.corner_position(c).expect("corner exists")))
            .collect::<Vec<_>>();
        let mut edge = Vec::new();
        let mut rho = Vec::new();
        if let Geometry::Polyhedron(p) = self {
            for e in p.edges() {
                let (a, b) = p.edge_endpoints(e.id);
                edge.push(dist_point_segment(x, &a, &b));
            }
            for e in p.edges() {
                for c in [e.a, e.b] {
                    let r_c = corner[c];
                    rho.push(EdgeCornerRatio {
                        corner: c,
                        edge: e.id,
                        rho: if r_c > 0.0 { Some(edge[e.id] / r_c) } else { None },
                    });
                }
            }
        }
        Ok(Distances { corner, edge, rho })
    }

    /// `r_e / r_c` for an incident corner-edge pair.
    pub fn rho(&self, x: &[f64], corner: usize, edge: usize) -> Result<f64> {
        self.check_point(x)?;
        let p = self.as_polyhedron()?;
        let e = p.edge(edge)?;
        if e.a != corner && e.b != corner {
            return Err(Error::InvalidParameter(format!("corner {corner} is not an endpoint of edge {edge}")));
        }
        let r_c = dist_nd(x, &p.corner_position(corner)?);
        if r_c == 0.0 {
            return Err(Error::InvalidParameter("rho is undefined at the corner itself".into()));
        }
        let (a, b) = p.edge_endpoints(edge);
        Ok(dist_point_segment(x, &a, &b) / r_c)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeCornerRatio {
    pub corner: usize,
    pub edge: usize,
    /// `None` exactly at the corner.
    pub rho: Option<f64>,
}

/// `r_c` per corner, `r_e` per edge and `rho_ce` per incident pair.
#[derive(Clone, Debug, Serialize)]
pub struct Distances {
    pub corner: Vec<f64>,
    pub edge: Vec<f64>,
    pub rho: Vec<EdgeCornerRatio>,
}

impl Distances {
    pub fn rho_of(&self, corner: usize, edge: usize) -> Option<f64> {
        self.rho.iter().find(|r| r.corner == corner && r.edge == edge).and_then(|r| r.rho)
    }
}

impl Geometry {
    /// Applies a map to every vertex (used for rigid-motion checks).
    pub fn transformed(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Geometry> {
        match self {
            Geometry::Polygon(p) => Ok(Geometry::Polygon(p.transformed(|x| {
                let y = f(&x);
                [y[0], y[1]]
            })?)),
            Geometry::Polyhedron(p) => {
                let v = p.vertices().iter().map(|x| {
                    let y = f(x);
                    [y[0], y[1], y[2]]
                });
                let loops = p.faces().iter().map(|f| f.vertices.clone()).collect();
                let bcs = p.faces().iter().map(|f| f.bc).collect();
                Ok(Geometry::Polyhedron(Polyhedron::from_parts(v.collect(), loops, bcs)?))
            }
        }
    }
}
