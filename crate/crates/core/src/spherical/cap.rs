//! Triangulations of spherical caps cut out by orthogonal corner cones.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCondition, Polyhedron};
use crate::vecmath::{add3, cross3, dot3, norm3, normalize3, scale3, sub3, P3};

/// Geometric refinement towards selected cap corners.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapGrading {
    pub sigma: f64,
    pub layers: usize,
    /// Chord distance where grading starts.
    pub radius: f64,
    pub points: Vec<P3>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    /// Polyhedron face carrying this arc, when known.
    pub face: Option<usize>,
    pub bc: BoundaryCondition,
}

/// Flat triangles with vertices on the unit sphere.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SphericalCapMesh {
    pub vertices: Vec<P3>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<BoundaryEdge>,
    pub grading: Option<CapGrading>,
    /// Target size of the ungraded part.
    pub h: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapOptions {
    pub sigma: f64,
    pub layers: usize,
    pub radius: f64,
    /// Grade only towards cap corners whose edge opening exceeds pi.
    pub reentrant_only: bool,
}

impl Default for CapOptions {
    fn default() -> Self {
        CapOptions { sigma: 0.5, layers: 6, radius: 0.5, reentrant_only: true }
    }
}

impl SphericalCapMesh {
    /// Union of coordinate octants `{s_x x > 0, s_y y > 0, s_z z > 0}` (bit i of the
    /// mask set means `s_i = -1`).
    pub fn octants(mask: &[u8], h: f64, grading: Option<CapGrading>) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::InvalidParameter(format!("mesh size {h} outside (0, 1)")));
        }
        if mask.is_empty() {
            return Err(Error::Degenerate("empty cap".into()));
        }
        let mut r = Refiner::default();
        for &o in mask {
            let s = |i: usize| if (o >> i) & 1 == 1 { -1.0 } else { 1.0 };
            let axis = |i: usize| {
                let mut v = [0.0; 3];
                v[i] = s(i);
                v
            };
            let ids = [r.vertex(axis(0)), r.vertex(axis(1)), r.vertex(axis(2))];
            let [a, b, c] = ids.map(|i| r.verts[i]);
            let outward = dot3(cross3(sub3(b, a), sub3(c, a)), add3(add3(a, b), c)) > 0.0;
            r.tris.push(if outward { [ids[0], ids[1], ids[2]] } else { [ids[1], ids[0], ids[2]] });
        }
        r.label_longest();
        r.refine_while(|t, v| longest_edge(t, v) > h);
        if let Some(g) = &grading {
            if !(g.sigma > 0.0 && g.sigma < 1.0) {
                return Err(Error::InvalidParameter(format!("grading ratio {} outside (0, 1)", g.sigma)));
            }
            r.refine_while(|t, v| {
                let centre = normalize3(scale3(add3(add3(v[t[0]], v[t[1]]), v[t[2]]), 1.0 / 3.0));
                let d = g.points.iter().map(|p| norm3(sub3(centre, *p))).fold(f64::INFINITY, f64::min);
                // size h at the outer radius, halved on every inner layer
                let mut target = h;
                let mut rad = g.radius * g.sigma;
                for _ in 0..g.layers {
                    if d < rad {
                        target *= g.sigma;
                        rad *= g.sigma;
                    }
                }
                longest_edge(t, v) > target
            });
        }
        let boundary = r.boundary_edges().into_iter().map(|(a, b)| BoundaryEdge { a, b, face: None, bc: BoundaryCondition::Dirichlet }).collect();
        Ok(SphericalCapMesh { vertices: r.verts, triangles: r.tris, boundary, grading, h })
    }

    /// The closed unit sphere.
    pub fn sphere(h: f64) -> Result<Self> {
        Self::octants(&[0, 1, 2, 3, 4, 5, 6, 7], h, None)
    }

    /// Cap cut out of the unit sphere by the tangent cone of `poly` at `corner`.
    pub fn for_corner(poly: &Polyhedron, corner: usize, h: f64, opts: &CapOptions) -> Result<Self> {
        let c = poly.corner_position(corner)?;
        let faces = poly.faces_at(corner);
        if faces.len() < 3 {
            return Err(Error::Degenerate(format!("corner {corner} has {} incident faces", faces.len())));
        }
        if !poly.is_orthogonal() {
            return Err(Error::Unsupported("spherical caps of non-orthogonal corners".into()));
        }
        let t = 0.05 * poly.min_corner_distance();
        let mask: Vec<u8> = (0u8..8)
            .filter(|&o| {
                let d: P3 = std::array::from_fn(|i| if (o >> i) & 1 == 1 { -1.0 } else { 1.0 });
                poly.contains(add3(c, scale3(d, t / 3f64.sqrt())))
            })
            .collect();
        let mut points = Vec::new();
        for e in poly.edges_at(corner) {
            if !opts.reentrant_only || poly.edge_opening(e)?.radians() > std::f64::consts::PI + 1e-9 {
                points.push(poly.edge_direction_from(e, corner));
            }
        }
        let grading = (!points.is_empty() && opts.layers > 0).then_some(CapGrading {
            sigma: opts.sigma,
            layers: opts.layers,
            radius: opts.radius,
            points,
        });
        let mut mesh = Self::octants(&mask, h, grading)?;
        for be in &mut mesh.boundary {
            let mid = normalize3(add3(mesh.vertices[be.a], mesh.vertices[be.b]));
            let x = add3(c, scale3(mid, t));
            // the arc lies on a face plane; pick the incident face containing a probe
            // slightly inside the cap along the arc
            be.face = faces.iter().copied().find(|&f| poly.face_contains(f, x));
            if let Some(f) = be.face {
                be.bc = poly.faces()[f].bc;
            }
        }
        Ok(mesh)
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| flat_area(t, &self.vertices)).sum()
    }

    /// Nodes lying on boundary arcs tagged with `bc`.
    pub fn boundary_nodes(&self, bc: Option<BoundaryCondition>) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .boundary
            .iter()
            .filter(|e| bc.is_none_or(|b| e.bc == b))
            .flat_map(|e| [e.a, e.b])
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Audits unit norms, orientation and the manifold property.
    pub fn check(&self) -> Result<()> {
        for (i, v) in self.vertices.iter().enumerate() {
            if (norm3(*v) - 1.0).abs() > 1e-12 {
                return Err(Error::Mesh(format!("vertex {i} off the unit sphere")));
            }
        }
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for (k, t) in self.triangles.iter().enumerate() {
            let [a, b, c] = t.map(|i| self.vertices[i]);
            if dot3(cross3(sub3(b, a), sub3(c, a)), add3(add3(a, b), c)) <= 0.0 {
                return Err(Error::Mesh(format!("triangle {k} is not positively oriented")));
            }
            for j in 0..3 {
                let e = (t[j], t[(j + 1) % 3]);
                if edges.insert(e, k).is_some() {
                    return Err(Error::Mesh(format!("directed edge {e:?} used twice")));
                }
            }
        }
        for &(a, b) in edges.keys() {
            if !edges.contains_key(&(b, a)) && !self.boundary.iter().any(|e| (e.a, e.b) == (a, b) || (e.a, e.b) == (b, a)) {
                return Err(Error::Mesh(format!("edge ({a}, {b}) is neither interior nor boundary")));
            }
        }
        Ok(())
    }
}

fn flat_area(t: &[usize; 3], v: &[P3]) -> f64 {
    0.5 * norm3(cross3(sub3(v[t[1]], v[t[0]]), sub3(v[t[2]], v[t[0]])))
}

fn longest_edge(t: &[usize; 3], v: &[P3]) -> f64 {
    (0..3).map(|j| norm3(sub3(v[t[j]], v[t[(j + 1) % 3]]))).fold(0.0, f64::max)
}

/// Newest-vertex bisection: triangle `[p0, p1, p2]` is split at the midpoint of `p0 p1`.
#[derive(Default)]
struct Refiner {
    verts: Vec<P3>,
    tris: Vec<[usize; 3]>,
    lookup: HashMap<[u64; 3], usize>,
    mids: HashMap<(usize, usize), usize>,
}

impl Refiner {
    fn vertex(&mut self, p: P3) -> usize {
        let key = p.map(|x| (x + 0.0).to_bits());
        if let Some(&i) = self.lookup.get(&key) {
            return i;
        }
        self.verts.push(p);
        self.lookup.insert(key, self.verts.len() - 1);
        self.verts.len() - 1
    }

    fn midpoint(&mut self, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&m) = self.mids.get(&key) {
            return m;
        }
        let p = normalize3(add3(self.verts[a], self.verts[b]));
        self.verts.push(p);
        let m = self.verts.len() - 1;
        self.mids.insert(key, m);
        m
    }

    fn bisect(&mut self, t: [usize; 3], out: &mut Vec<[usize; 3]>) {
        let m = self.midpoint(t[0], t[1]);
        out.push([t[2], t[0], m]);
        out.push([t[1], t[2], m]);
    }

    fn is_split(&self, a: usize, b: usize) -> bool {
        self.mids.contains_key(&(a.min(b), a.max(b)))
    }

    /// Bisects marked triangles, then removes hanging nodes, until nothing is marked.
    /// Makes the longest edge the refinement edge of every triangle.
    fn label_longest(&mut self) {
        let verts = &self.verts;
        for t in &mut self.tris {
            let len = |j: usize| norm3(sub3(verts[t[j]], verts[t[(j + 1) % 3]]));
            let j = (0..3).max_by(|&a, &b| len(a).total_cmp(&len(b))).unwrap();
            *t = [t[j], t[(j + 1) % 3], t[(j + 2) % 3]];
        }
    }

    fn refine_while(&mut self, mark: impl Fn(&[usize; 3], &[P3]) -> bool) {
        loop {
            let tris = std::mem::take(&mut self.tris);
            let mut out = Vec::with_capacity(tris.len() * 2);
            let mut any = false;
            for t in tris {
                if mark(&t, &self.verts) {
                    any = true;
                    self.bisect(t, &mut out);
                } else {
                    out.push(t);
                }
            }
            self.tris = out;
            self.close();
            if !any {
                break;
            }
        }
    }

    fn close(&mut self) {
        loop {
            let tris = std::mem::take(&mut self.tris);
            let mut out = Vec::with_capacity(tris.len());
            let mut any = false;
            for t in tris {
                if (0..3).any(|j| self.is_split(t[j], t[(j + 1) % 3])) {
                    any = true;
                    self.bisect(t, &mut out);
                } else {
                    out.push(t);
                }
            }
            self.tris = out;
            if !any {
                break;
            }
        }
    }

    fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let directed: HashSet<(usize, usize)> = self.tris.iter().flat_map(|t| (0..3).map(move |j| (t[j], t[(j + 1) % 3]))).collect();
        let mut out: Vec<(usize, usize)> = directed.iter().copied().filter(|&(a, b)| !directed.contains(&(b, a))).collect();
        out.sort_unstable();
        out
    }
}
