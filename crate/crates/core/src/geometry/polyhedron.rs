use std::collections::HashMap;
use std::f64::consts::TAU;

use serde::Serialize;

use super::document::{BoundaryCondition, GeometryDocument};
use crate::error::{Error, Result};
use crate::exact::Angle;
use crate::vecmath::{add3, cross3, dist3, dot3, norm3, normalize3, scale3, sub3, P3};

#[derive(Clone, Debug, Serialize)]
pub struct Face {
    pub id: usize,
    /// Vertex loop, counter-clockwise seen from outside.
    pub vertices: Vec<usize>,
    /// Outward unit normal.
    pub normal: P3,
    pub bc: BoundaryCondition,
}

#[derive(Clone, Debug, Serialize)]
pub struct Edge {
    pub id: usize,
    /// Endpoints; `a -> b` is the traversal direction in `faces[0]`.
    pub a: usize,
    pub b: usize,
    pub faces: [usize; 2],
    /// Dihedral opening measured through the interior.
    pub opening: Angle,
}

#[derive(Clone, Debug)]
pub struct Polyhedron {
    vertices: Vec<P3>,
    faces: Vec<Face>,
    edges: Vec<Edge>,
    scale: f64,
}

/// Relative tolerance for face planarity.
const PLANAR_TOL: f64 = 1e-9;

impl Polyhedron {
    pub fn from_document(doc: &GeometryDocument) -> Result<Self> {
        let faces_idx = doc.faces.as_ref().ok_or_else(|| Error::Schema("missing faces".into()))?;
        let vertices: Vec<P3> = doc.vertices.iter().map(|v| [v[0], v[1], v[2]]).collect();
        let bcs = (0..faces_idx.len()).map(|i| doc.bc_of(i)).collect();
        Self::from_parts(vertices, faces_idx.clone(), bcs)
    }

    pub fn from_parts(
        vertices: Vec<P3>,
        mut loops: Vec<Vec<usize>>,
        bcs: Vec<BoundaryCondition>,
    ) -> Result<Self> {
        let scale = bbox_diag(&vertices);
        for (i, a) in vertices.iter().enumerate() {
            for b in &vertices[i + 1..] {
                if dist3(*a, *b) <= 1e-12 * scale {
                    return Err(Error::Degenerate("two vertices coincide".into()));
                }
            }
        }

        // Edge incidence, keyed by the unordered vertex pair.
        let mut uses: HashMap<(usize, usize), Vec<(usize, bool)>> = HashMap::new();
        let mut edge_order: Vec<(usize, usize)> = Vec::new();
        for (f, l) in loops.iter().enumerate() {
            let n = l.len();
            for j in 0..n {
                let (a, b) = (l[j], l[(j + 1) % n]);
                if a == b || dist3(vertices[a], vertices[b]) <= 1e-12 * scale {
                    return Err(Error::Degenerate(format!("face {f} has a zero-length edge")));
                }
                let key = (a.min(b), a.max(b));
                let entry = uses.entry(key).or_default();
                if entry.is_empty() {
                    edge_order.push(key);
                }
                entry.push((f, a < b));
            }
        }
        for (eid, key) in edge_order.iter().enumerate() {
            let u = &uses[key];
            if u.len() != 2 || u[0].1 == u[1].1 {
                return Err(Error::InconsistentNormals { edge: eid });
            }
        }

        // Global orientation from the signed volume.
        let volume: f64 = loops
            .iter()
            .map(|l| dot3(vertices[l[0]], newell(&vertices, l)) / 3.0)
            .sum();
        if volume.abs() <= 1e-14 * scale.powi(3) {
            return Err(Error::Degenerate("polyhedron has zero volume".into()));
        }
        if volume < 0.0 {
            for l in &mut loops {
                l.reverse();
            }
        }

        let mut faces = Vec::with_capacity(loops.len());
        for (f, l) in loops.iter().enumerate() {
            let nv = newell(&vertices, l);
            let len = norm3(nv);
            if len <= 1e-14 * scale * scale {
                return Err(Error::Degenerate(format!("face {f} has zero area")));
            }
            let normal = scale3(nv, 1.0 / len);
            let p0 = vertices[l[0]];
            let deviation = l
                .iter()
                .map(|&v| dot3(sub3(vertices[v], p0), normal).abs())
                .fold(0.0, f64::max);
            if deviation > PLANAR_TOL * scale {
                return Err(Error::NonPlanarFace { face: f, deviation });
            }
            faces.push(Face { id: f, vertices: l.clone(), normal, bc: bcs[f] });
        }

        let mut edges = Vec::with_capacity(edge_order.len());
        for (eid, key) in edge_order.iter().enumerate() {
            // Recompute traversal directions after the possible flip.
            let u = &uses[key];
            let dir_in = |f: usize| {
                let l = &faces[f].vertices;
                let n = l.len();
                (0..n).find_map(|j| {
                    let (a, b) = (l[j], l[(j + 1) % n]);
                    if (a, b) == *key {
                        Some(true)
                    } else if (b, a) == *key {
                        Some(false)
                    } else {
                        None
                    }
                })
            };
            let (f1, f2) = (u[0].0, u[1].0);
            let (a, b) = if dir_in(f1) == Some(true) { (key.0, key.1) } else { (key.1, key.0) };
            let t = normalize3(sub3(vertices[b], vertices[a]));
            let n1 = faces[f1].normal;
            let n2 = faces[f2].normal;
            let d1 = cross3(n1, t);
            let d2 = scale3(cross3(n2, t), -1.0);
            let inward = scale3(n1, -1.0);
            let mut ang = dot3(d2, inward).atan2(dot3(d2, d1));
            if ang <= 1e-13 {
                ang += TAU;
            }
            if !(ang > 0.0 && ang <= TAU * (1.0 + 1e-12)) {
                return Err(Error::OpeningOutOfRange(ang));
            }
            edges.push(Edge { id: eid, a, b, faces: [f1, f2], opening: Angle::from_radians(ang) });
        }
        Ok(Polyhedron { vertices, faces, edges, scale })
    }

    pub fn vertices(&self) -> &[P3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Result<&Edge> {
        self.edges.get(id).ok_or(Error::UnknownId { kind: "edge", id })
    }

    pub fn edge_opening(&self, id: usize) -> Result<Angle> {
        Ok(self.edge(id)?.opening)
    }

    pub fn corner_position(&self, id: usize) -> Result<P3> {
        self.vertices.get(id).copied().ok_or(Error::UnknownId { kind: "corner", id })
    }

    /// Edges having corner `c` as an endpoint.
    pub fn edges_at(&self, c: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.a == c || e.b == c).map(|e| e.id).collect()
    }

    /// Faces containing corner `c`.
    pub fn faces_at(&self, c: usize) -> Vec<usize> {
        self.faces.iter().filter(|f| f.vertices.contains(&c)).map(|f| f.id).collect()
    }

    pub fn edge_endpoints(&self, e: usize) -> (P3, P3) {
        let e = &self.edges[e];
        (self.vertices[e.a], self.vertices[e.b])
    }

    /// Unit direction of edge `e` pointing away from its endpoint `c`.
    pub fn edge_direction_from(&self, e: usize, c: usize) -> P3 {
        let ed = &self.edges[e];
        let other = if ed.a == c { ed.b } else { ed.a };
        normalize3(sub3(self.vertices[other], self.vertices[c]))
    }

    pub fn bbox(&self) -> (P3, P3) {
        bbox(&self.vertices)
    }

    pub fn diameter(&self) -> f64 {
        self.scale
    }

    pub fn min_corner_distance(&self) -> f64 {
        let mut d = f64::INFINITY;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.min(dist3(*a, *b));
            }
        }
        d
    }

    pub fn volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| dot3(self.vertices[f.vertices[0]], newell(&self.vertices, &f.vertices)) / 3.0)
            .sum()
    }

    /// Whether every face normal is a coordinate axis direction.
    pub fn is_orthogonal(&self) -> bool {
        self.faces.iter().all(|f| f.normal.iter().filter(|c| c.abs() > 1.0 - 1e-12).count() == 1)
    }

    /// Whether `x` lies on face `f` (in its plane, inside or on its boundary loop).
    pub fn face_contains(&self, f: usize, x: P3) -> bool {
        let face = &self.faces[f];
        let p0 = self.vertices[face.vertices[0]];
        if dot3(face.normal, sub3(x, p0)).abs() > 1e-9 * self.scale {
            return false;
        }
        point_in_face(&self.vertices, &face.vertices, face.normal, x)
    }

    /// Point-in-polyhedron by ray-crossing parity along a generic direction.
    pub fn contains(&self, x: P3) -> bool {
        let dir = normalize3([0.577_215_664_9, 0.331_662_479_0, 0.749_894_209_3]);
        let mut count = 0;
        for f in &self.faces {
            let p0 = self.vertices[f.vertices[0]];
            let denom = dot3(f.normal, dir);
            if denom.abs() < 1e-14 {
                continue;
            }
            let t = dot3(f.normal, sub3(p0, x)) / denom;
            if t <= 0.0 {
                continue;
            }
            let hit = add3(x, scale3(dir, t));
            if point_in_face(&self.vertices, &f.vertices, f.normal, hit) {
                count += 1;
            }
        }
        count % 2 == 1
    }
}

/// Area-weighted normal of a planar loop (Newell's method).
pub fn newell(v: &[P3], l: &[usize]) -> P3 {
    let mut n = [0.0; 3];
    let k = l.len();
    for j in 0..k {
        let a = v[l[j]];
        let b = v[l[(j + 1) % k]];
        n[0] += (a[1] - b[1]) * (a[2] + b[2]);
        n[1] += (a[2] - b[2]) * (a[0] + b[0]);
        n[2] += (a[0] - b[0]) * (a[1] + b[1]);
    }
    scale3(n, 0.5)
}

fn point_in_face(v: &[P3], l: &[usize], normal: P3, x: P3) -> bool {
    // Drop the dominant normal axis and test in 2D.
    let ax = (0..3)
        .max_by(|&i, &j| normal[i].abs().total_cmp(&normal[j].abs()))
        .unwrap_or(2);
    let (i, j) = ((ax + 1) % 3, (ax + 2) % 3);
    let mut inside = false;
    let n = l.len();
    for k in 0..n {
        let a = v[l[k]];
        let b = v[l[(k + 1) % n]];
        if (a[j] > x[j]) != (b[j] > x[j]) {
            let t = (x[j] - a[j]) / (b[j] - a[j]);
            if x[i] < a[i] + t * (b[i] - a[i]) {
                inside = !inside;
            }
        }
    }
    inside
}

fn bbox(v: &[P3]) -> (P3, P3) {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in v {
        for i in 0..3 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    (lo, hi)
}

fn bbox_diag(v: &[P3]) -> f64 {
    let (lo, hi) = bbox(v);
    dist3(lo, hi).max(1e-300)
}
