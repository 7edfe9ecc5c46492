//! Geometrically graded meshes: isotropic layers toward polygon corners and
//! transverse-only layers toward polyhedron edges.

mod export;
mod hex;
mod planar;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::neighborhoods::NeighborhoodParams;
use crate::geometry::{BoundaryCondition, Geometry};
use crate::vecmath::{cross2, cross3, dist_point_segment, dot3, norm3, sub2, sub3, P2, P3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    Triangle,
    Quad,
    Hexahedron,
}

impl CellKind {
    pub fn num_vertices(self) -> usize {
        match self {
            CellKind::Triangle => 3,
            CellKind::Quad => 4,
            CellKind::Hexahedron => 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub kind: CellKind,
    /// Counter-clockwise in 2D; VTK hexahedron order in 3D.
    pub vertices: Vec<usize>,
    /// 0 away from the graded entities, `mu` in the `mu`-th geometric layer and
    /// `layers + 1` in the innermost core.
    pub layer: usize,
    /// Corner the cell is graded toward (2D).
    pub corner: Option<usize>,
    /// Layer along each coordinate axis (3D).
    pub axis_layers: Option<[usize; 3]>,
    /// Longest over shortest extent.
    pub anisotropy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFacet {
    /// Ordered so that the domain is on the left (2D) or behind (3D).
    pub vertices: Vec<usize>,
    /// Polygon side or polyhedron face id.
    pub entity: usize,
    pub bc: BoundaryCondition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradedMesh {
    pub dim: usize,
    pub sigma: f64,
    pub layers: usize,
    /// Radius (2D) or width (3D) of the graded zone.
    pub eps: f64,
    pub corners: Vec<Vec<f64>>,
    pub vertices: Vec<Vec<f64>>,
    pub cells: Vec<Cell>,
    pub boundary: Vec<BoundaryFacet>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeshOptions {
    pub sigma: f64,
    pub layers: usize,
    /// Graded zone size; defaults to the neighborhood radius of the geometry.
    pub eps: Option<f64>,
    /// Target size of ungraded cells; defaults to `2 eps` in 2D and `eps` in 3D.
    pub size: Option<f64>,
}

impl Default for MeshOptions {
    fn default() -> Self {
        MeshOptions { sigma: 0.5, layers: 4, eps: None, size: None }
    }
}

impl MeshOptions {
    fn resolve(&self, geom: &Geometry) -> Result<(f64, f64)> {
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(Error::InvalidParameter(format!("grading factor {} is not in (0, 1)", self.sigma)));
        }
        if self.layers == 0 {
            return Err(Error::InvalidParameter("at least one layer is required".into()));
        }
        let eps = self.eps.unwrap_or_else(|| NeighborhoodParams::default_for(geom).eps);
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("eps = {eps}")));
        }
        let scale = match geom {
            Geometry::Polygon(p) => p.diameter(),
            Geometry::Polyhedron(p) => p.diameter(),
        };
        let core = eps * self.sigma.powi(self.layers as i32);
        if core < 1e-9 * scale {
            return Err(Error::InvalidParameter(format!(
                "innermost layer size {core:.3e} is below the vertex tolerance; use fewer layers"
            )));
        }
        let size = self.size.unwrap_or(if geom.dimension() == 2 { 2.0 * eps } else { eps });
        if !(size > 0.0 && size.is_finite()) {
            return Err(Error::InvalidParameter(format!("cell size {size}")));
        }
        Ok((eps, size))
    }
}

/// Corner-graded mesh of a polygon with `layers` geometric layers of ratio `sigma`.
pub fn graded_mesh_2d(geom: &Geometry, sigma: f64, layers: usize) -> Result<GradedMesh> {
    graded_mesh_2d_with(geom, &MeshOptions { sigma, layers, ..MeshOptions::default() })
}

pub fn graded_mesh_2d_with(geom: &Geometry, opts: &MeshOptions) -> Result<GradedMesh> {
    let poly = geom.as_polygon()?;
    let (eps, size) = opts.resolve(geom)?;
    planar::build(poly, opts.sigma, opts.layers, eps, size)
}

/// Hexahedral mesh of an orthogonal polyhedron, graded toward every edge in the
/// transverse directions only and toward every corner in all directions.
pub fn aniso_graded_mesh_3d(geom: &Geometry, sigma: f64, layers: usize) -> Result<GradedMesh> {
    aniso_graded_mesh_3d_with(geom, &MeshOptions { sigma, layers, ..MeshOptions::default() })
}

pub fn aniso_graded_mesh_3d_with(geom: &Geometry, opts: &MeshOptions) -> Result<GradedMesh> {
    let poly = geom.as_polyhedron()?;
    let (eps, size) = opts.resolve(geom)?;
    hex::build(poly, opts.sigma, opts.layers, eps, size)
}

/// Dispatches on the dimension.
pub fn graded_mesh(geom: &Geometry, opts: &MeshOptions) -> Result<GradedMesh> {
    match geom {
        Geometry::Polygon(_) => graded_mesh_2d_with(geom, opts),
        Geometry::Polyhedron(_) => aniso_graded_mesh_3d_with(geom, opts),
    }
}

/// Outcome of the structural mesh checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeshAudit {
    pub cells: usize,
    pub vertices: usize,
    /// Smallest corner Jacobian normalized by the adjacent edge lengths.
    pub min_scaled_jacobian: f64,
    /// Facets used by more than two cells.
    pub overshared_facets: usize,
    /// Shared facets traversed in the same direction by both cells.
    pub orientation_mismatches: usize,
    /// Facets used once that do not lie on the boundary.
    pub open_facets: usize,
    pub unused_vertices: usize,
    /// Relative difference between the total cell measure and the domain measure.
    pub measure_defect: f64,
    /// Same for the boundary facets against the boundary measure.
    pub boundary_defect: f64,
}

impl MeshAudit {
    pub fn passed(&self) -> bool {
        self.min_scaled_jacobian > 0.0
            && self.overshared_facets == 0
            && self.orientation_mismatches == 0
            && self.open_facets == 0
            && self.unused_vertices == 0
            && self.measure_defect < 1e-9
            && self.boundary_defect < 1e-9
    }
}

impl GradedMesh {
    pub fn point(&self, v: usize) -> P3 {
        let p = &self.vertices[v];
        [p[0], p[1], if self.dim == 3 { p[2] } else { 0.0 }]
    }

    fn points(&self, cell: &Cell) -> Vec<P3> {
        cell.vertices.iter().map(|&v| self.point(v)).collect()
    }

    /// Area or volume of a cell.
    pub fn measure(&self, cell: &Cell) -> f64 {
        let x = self.points(cell);
        match cell.kind {
            CellKind::Triangle | CellKind::Quad => {
                let n = x.len();
                (0..n).map(|j| cross2(p2(x[j]), p2(x[(j + 1) % n]))).sum::<f64>() / 2.0
            }
            CellKind::Hexahedron => {
                let g = 1.0 / 3f64.sqrt();
                let mut vol = 0.0;
                for a in [-g, g] {
                    for b in [-g, g] {
                        for c in [-g, g] {
                            vol += hex_jacobian(&x, [a, b, c]);
                        }
                    }
                }
                vol
            }
        }
    }

    /// Axis-aligned extent of a cell.
    pub fn extents(&self, cell: &Cell) -> P3 {
        let x = self.points(cell);
        let mut e = [0.0; 3];
        for i in 0..3 {
            let lo = x.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
            let hi = x.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max);
            e[i] = hi - lo;
        }
        e
    }

    /// Smallest scaled Jacobian over the corners of a cell, in `[-1, 1]`.
    pub fn scaled_jacobian(&self, cell: &Cell) -> f64 {
        let x = self.points(cell);
        match cell.kind {
            CellKind::Triangle | CellKind::Quad => {
                let n = x.len();
                (0..n)
                    .map(|j| {
                        let u = sub2(p2(x[(j + 1) % n]), p2(x[j]));
                        let w = sub2(p2(x[(j + n - 1) % n]), p2(x[j]));
                        cross2(u, w) / (norm(u) * norm(w))
                    })
                    .fold(f64::INFINITY, f64::min)
            }
            CellKind::Hexahedron => HEX_CORNER_EDGES
                .iter()
                .map(|&(v, [a, b, c])| {
                    let (u, w, z) = (sub3(x[a], x[v]), sub3(x[b], x[v]), sub3(x[c], x[v]));
                    dot3(cross3(u, w), z) / (norm3(u) * norm3(w) * norm3(z))
                })
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Conformity, orientation, coverage and positive-Jacobian checks.
    pub fn audit(&self, geom: &Geometry) -> Result<MeshAudit> {
        if geom.dimension() != self.dim {
            return Err(Error::WrongDimension { expected: self.dim, actual: geom.dimension() });
        }
        let mut used = vec![false; self.vertices.len()];
        let mut facets: HashMap<Vec<usize>, Vec<Vec<usize>>> = HashMap::new();
        let mut min_jac = f64::INFINITY;
        let mut total = 0.0;
        for cell in &self.cells {
            if cell.vertices.len() != cell.kind.num_vertices() {
                return Err(Error::Mesh(format!("{:?} cell with {} vertices", cell.kind, cell.vertices.len())));
            }
            for &v in &cell.vertices {
                *used.get_mut(v).ok_or_else(|| Error::Mesh(format!("vertex {v} out of range")))? = true;
            }
            min_jac = min_jac.min(self.scaled_jacobian(cell));
            total += self.measure(cell);
            for f in cell_facets(cell) {
                let mut key = f.clone();
                key.sort_unstable();
                facets.entry(key).or_default().push(f);
            }
        }

        let mut audit = MeshAudit {
            cells: self.cells.len(),
            vertices: self.vertices.len(),
            min_scaled_jacobian: min_jac,
            overshared_facets: 0,
            orientation_mismatches: 0,
            open_facets: 0,
            unused_vertices: used.iter().filter(|u| !**u).count(),
            measure_defect: 0.0,
            boundary_defect: 0.0,
        };
        let mut boundary_measure = 0.0;
        for uses in facets.values() {
            match uses.len() {
                1 => {
                    let pts: Vec<P3> = uses[0].iter().map(|&v| self.point(v)).collect();
                    if self.on_boundary(geom, &pts) {
                        boundary_measure += facet_measure(&pts);
                    } else {
                        audit.open_facets += 1;
                    }
                }
                2 => {
                    if !reversed(&uses[0], &uses[1]) {
                        audit.orientation_mismatches += 1;
                    }
                }
                _ => audit.overshared_facets += 1,
            }
        }
        let (measure, perimeter) = domain_measures(geom);
        audit.measure_defect = (total - measure).abs() / measure;
        audit.boundary_defect = (boundary_measure - perimeter).abs() / perimeter;
        Ok(audit)
    }

    /// Runs [`GradedMesh::audit`] and turns a failed audit into an error.
    pub fn check(&self, geom: &Geometry) -> Result<MeshAudit> {
        let a = self.audit(geom)?;
        if !a.passed() {
            return Err(Error::Mesh(format!("mesh audit failed: {a:?}")));
        }
        Ok(a)
    }

    fn on_boundary(&self, geom: &Geometry, pts: &[P3]) -> bool {
        let n = pts.len() as f64;
        let c: P3 = [0, 1, 2].map(|i| pts.iter().map(|p| p[i]).sum::<f64>() / n);
        match geom {
            Geometry::Polygon(poly) => {
                let tol = 1e-10 * poly.diameter();
                poly.sides().iter().any(|s| dist_point_segment(&c[..2], &s.start, &s.end) <= tol)
            }
            Geometry::Polyhedron(poly) => (0..poly.faces().len()).any(|f| poly.face_contains(f, c)),
        }
    }

    /// Largest vertex deviation between the layer-`mu` cells at `corner` and the
    /// `sigma`-scaling (about the corner) of its layer-`(mu - 1)` cells.
    ///
    /// Infinite when the two layers cannot be matched cell by cell.
    pub fn layer_scaling_defect(&self, corner: usize, mu: usize) -> Result<f64> {
        if self.dim != 2 {
            return Err(Error::Unsupported("layer scaling is tracked for corner-graded 2D meshes".into()));
        }
        if !(2..=self.layers).contains(&mu) {
            return Err(Error::InvalidParameter(format!("layer {mu} is not in 2..={}", self.layers)));
        }
        let c = self
            .corners
            .get(corner)
            .ok_or(Error::UnknownId { kind: "corner", id: corner })?;
        let pick = |layer: usize| -> Vec<Vec<P2>> {
            self.cells
                .iter()
                .filter(|k| k.corner == Some(corner) && k.layer == layer)
                .map(|k| k.vertices.iter().map(|&v| [self.vertices[v][0], self.vertices[v][1]]).collect())
                .collect()
        };
        let outer: Vec<Vec<P2>> = pick(mu - 1)
            .into_iter()
            .map(|k| {
                k.into_iter()
                    .map(|p| [c[0] + self.sigma * (p[0] - c[0]), c[1] + self.sigma * (p[1] - c[1])])
                    .collect()
            })
            .collect();
        let inner = pick(mu);
        if outer.len() != inner.len() || inner.is_empty() {
            return Ok(f64::INFINITY);
        }
        let mut taken = vec![false; inner.len()];
        let mut defect: f64 = 0.0;
        for k in &outer {
            let dev = |other: &Vec<P2>| {
                if other.len() != k.len() {
                    return f64::INFINITY;
                }
                k.iter()
                    .zip(other)
                    .map(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs()))
                    .fold(0.0, f64::max)
            };
            let best = (0..inner.len())
                .filter(|&j| !taken[j])
                .min_by(|&i, &j| dev(&inner[i]).total_cmp(&dev(&inner[j])));
            let Some(j) = best else { return Ok(f64::INFINITY) };
            taken[j] = true;
            defect = defect.max(dev(&inner[j]));
        }
        Ok(defect)
    }

    /// Number of cells per layer index.
    pub fn layer_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.layers + 2];
        for c in &self.cells {
            counts[c.layer] += 1;
        }
        counts
    }
}

fn p2(x: P3) -> P2 {
    [x[0], x[1]]
}

fn norm(v: P2) -> f64 {
    v[0].hypot(v[1])
}

/// For each hexahedron corner, its neighbors along the local +xi, +eta, +zeta
/// directions (or the mirrored ones, keeping the frame right-handed).
const HEX_CORNER_EDGES: [(usize, [usize; 3]); 8] = [
    (0, [1, 3, 4]),
    (1, [2, 0, 5]),
    (2, [3, 1, 6]),
    (3, [0, 2, 7]),
    (4, [7, 5, 0]),
    (5, [4, 6, 1]),
    (6, [5, 7, 2]),
    (7, [6, 4, 3]),
];

/// Outward-ordered faces of a VTK hexahedron.
const HEX_FACES: [[usize; 4]; 6] =
    [[0, 3, 2, 1], [4, 5, 6, 7], [0, 1, 5, 4], [2, 3, 7, 6], [0, 4, 7, 3], [1, 2, 6, 5]];

const HEX_REF: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

/// Jacobian determinant of the trilinear map at reference point `xi`.
fn hex_jacobian(x: &[P3], xi: P3) -> f64 {
    let mut jac = [[0.0; 3]; 3];
    for (node, r) in HEX_REF.iter().enumerate() {
        let f = [1.0 + r[0] * xi[0], 1.0 + r[1] * xi[1], 1.0 + r[2] * xi[2]];
        let grad = [r[0] * f[1] * f[2] / 8.0, r[1] * f[0] * f[2] / 8.0, r[2] * f[0] * f[1] / 8.0];
        for i in 0..3 {
            for j in 0..3 {
                jac[i][j] += x[node][i] * grad[j];
            }
        }
    }
    let cols = [[jac[0][0], jac[1][0], jac[2][0]], [jac[0][1], jac[1][1], jac[2][1]], [jac[0][2], jac[1][2], jac[2][2]]];
    dot3(cross3(cols[0], cols[1]), cols[2])
}

fn cell_facets(cell: &Cell) -> Vec<Vec<usize>> {
    let v = &cell.vertices;
    match cell.kind {
        CellKind::Triangle | CellKind::Quad => {
            let n = v.len();
            (0..n).map(|j| vec![v[j], v[(j + 1) % n]]).collect()
        }
        CellKind::Hexahedron => HEX_FACES.iter().map(|f| f.iter().map(|&k| v[k]).collect()).collect(),
    }
}

/// Whether `b` is `a` traversed backwards, up to a cyclic shift.
fn reversed(a: &[usize], b: &[usize]) -> bool {
    let n = a.len();
    let Some(s) = b.iter().position(|&x| x == a[0]) else { return false };
    (0..n).all(|k| a[k] == b[(s + n - k) % n])
}

fn facet_measure(pts: &[P3]) -> f64 {
    match pts.len() {
        2 => norm3(sub3(pts[1], pts[0])),
        _ => {
            let mut n = [0.0; 3];
            for j in 1..pts.len() - 1 {
                let c = cross3(sub3(pts[j], pts[0]), sub3(pts[j + 1], pts[0]));
                for i in 0..3 {
                    n[i] += c[i];
                }
            }
            norm3(n) / 2.0
        }
    }
}

fn domain_measures(geom: &Geometry) -> (f64, f64) {
    match geom {
        Geometry::Polygon(p) => {
            let per = p.sides().iter().map(|s| (s.end[0] - s.start[0]).hypot(s.end[1] - s.start[1])).sum();
            (p.area(), per)
        }
        Geometry::Polyhedron(p) => {
            let area = p
                .faces()
                .iter()
                .map(|f| norm3(crate::geometry::polyhedron::newell(p.vertices(), &f.vertices)))
                .sum();
            (p.volume(), area)
        }
    }
}

/// Vertex store that merges points closer than a tolerance. Points carrying
/// different tags are never merged, which keeps the two lips of a slit apart.
struct VertexPool<const D: usize> {
    tol: f64,
    points: Vec<[f64; D]>,
    bins: HashMap<([i64; D], Option<usize>), Vec<usize>>,
}

impl<const D: usize> VertexPool<D> {
    fn new(tol: f64) -> Self {
        VertexPool { tol, points: Vec::new(), bins: HashMap::new() }
    }

    fn bin(&self, p: &[f64; D]) -> [i64; D] {
        p.map(|x| (x / self.tol).floor() as i64)
    }

    fn insert(&mut self, p: [f64; D], tag: Option<usize>) -> usize {
        let b = self.bin(&p);
        let offsets = 3usize.pow(D as u32);
        for o in 0..offsets {
            let mut key = b;
            let mut r = o;
            for k in key.iter_mut() {
                *k += (r % 3) as i64 - 1;
                r /= 3;
            }
            if let Some(list) = self.bins.get(&(key, tag)) {
                for &i in list {
                    let q = &self.points[i];
                    if (0..D).all(|k| (q[k] - p[k]).abs() <= self.tol) {
                        return i;
                    }
                }
            }
        }
        let id = self.points.len();
        self.points.push(p);
        self.bins.entry((b, tag)).or_default().push(id);
        id
    }
}

#[cfg(test)]
mod tests;
