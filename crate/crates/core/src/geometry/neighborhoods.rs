//! Corner, edge and edge-vertex neighborhoods.

use serde::Serialize;

use super::Geometry;
use crate::error::{Error, Result};
use crate::vecmath::{dist_point_segment, dot3, P3};

/// Region label. Points on an interface carry every label whose closure contains them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Interior,
    Corner { corner: usize },
    Edge { edge: usize },
    CornerEdge { corner: usize, edge: usize },
}

/// Which of the three nested families to classify against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Level {
    /// Smallest sets: the roles of `outer` and `inner` are swapped.
    Inner,
    Main,
    /// Enlarged sets built from `outer` and `inner`.
    Outer,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NeighborhoodParams {
    pub inner: f64,
    pub eps: f64,
    pub outer: f64,
}

impl NeighborhoodParams {
    /// `eps` is a quarter of the smallest corner distance; `outer = 1.2 eps`, `inner = 0.8 eps`.
    pub fn default_for(geom: &Geometry) -> Self {
        let eps = 0.25 * geom.min_corner_distance();
        Self::from_eps(eps)
    }

    pub fn from_eps(eps: f64) -> Self {
        NeighborhoodParams { inner: 0.8 * eps, eps, outer: 1.2 * eps }
    }
}

/// Neighborhood decomposition of a polygon or polyhedron.
#[derive(Clone, Debug)]
pub struct NeighborhoodDecomposition {
    geom: Geometry,
    params: NeighborhoodParams,
}

pub fn decompose_neighborhoods(geom: &Geometry, params: NeighborhoodParams) -> Result<NeighborhoodDecomposition> {
    let NeighborhoodParams { inner, eps, outer } = params;
    if !(inner > 0.0 && inner < eps && eps < outer && outer.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < inner < eps < outer, got {inner}, {eps}, {outer}"
        )));
    }
    let nc = geom.num_corners();
    for c in 0..nc {
        let pc = geom.corner_position(c)?;
        for c2 in c + 1..nc {
            let d = crate::vecmath::dist_nd(&pc, &geom.corner_position(c2)?);
            if d <= 2.0 * outer {
                return Err(Error::EpsilonTooLarge(format!(
                    "balls around corners {c} and {c2} overlap (distance {d:.4}, outer radius {outer:.4})"
                )));
            }
        }
    }
    match geom {
        Geometry::Polygon(p) => {
            for c in 0..nc {
                let d = p.distance_to_far_sides(c);
                if d <= outer {
                    return Err(Error::EpsilonTooLarge(format!(
                        "corner {c} is {d:.4} from a non-incident side (outer radius {outer:.4})"
                    )));
                }
            }
        }
        Geometry::Polyhedron(p) => {
            if outer >= 1.0 {
                return Err(Error::EpsilonTooLarge(format!(
                    "outer parameter {outer} must be below 1 for edge-vertex cones"
                )));
            }
            let edges = p.edges();
            for (i, e) in edges.iter().enumerate() {
                for f in &edges[i + 1..] {
                    let adjacent = e.a == f.a || e.a == f.b || e.b == f.a || e.b == f.b;
                    let (a0, a1) = p.edge_endpoints(e.id);
                    let (b0, b1) = p.edge_endpoints(f.id);
                    if !adjacent {
                        let d = crate::vecmath::dist_segment_segment3(a0, a1, b0, b1);
                        if d <= 2.0 * outer {
                            return Err(Error::EpsilonTooLarge(format!(
                                "neighborhoods of edges {} and {} overlap (distance {d:.4})",
                                e.id, f.id
                            )));
                        }
                    } else {
                        let c = if e.a == f.a || e.a == f.b { e.a } else { e.b };
                        let u = p.edge_direction_from(e.id, c);
                        let v = p.edge_direction_from(f.id, c);
                        let angle = dot3(u, v).clamp(-1.0, 1.0).acos();
                        if angle <= 2.0 * outer.asin() {
                            return Err(Error::EpsilonTooLarge(format!(
                                "edge-vertex cones of edges {} and {} at corner {c} overlap",
                                e.id, f.id
                            )));
                        }
                    }
                }
            }
            for c in 0..nc {
                let x = p.vertices()[c];
                for face in p.faces() {
                    if face.vertices.contains(&c) {
                        continue;
                    }
                    let d = face_distance(p.vertices(), &face.vertices, face.normal, x);
                    if d <= outer {
                        return Err(Error::EpsilonTooLarge(format!(
                            "corner {c} is {d:.4} from non-incident face {}",
                            face.id
                        )));
                    }
                }
            }
        }
    }
    Ok(NeighborhoodDecomposition { geom: geom.clone(), params })
}

impl NeighborhoodDecomposition {
    pub fn params(&self) -> NeighborhoodParams {
        self.params
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    /// Labels of the closed regions containing `x` (assumed in the closure of the domain).
    pub fn classify(&self, x: &[f64]) -> Result<Vec<Region>> {
        self.classify_at(x, Level::Main)
    }

    pub fn classify_at(&self, x: &[f64], level: Level) -> Result<Vec<Region>> {
        let NeighborhoodParams { inner, eps, outer } = self.params;
        let (big, small) = match level {
            Level::Inner => (inner, outer),
            Level::Main => (eps, eps),
            Level::Outer => (outer, inner),
        };
        let d = self.geom.distances(x)?;
        let mut labels = Vec::new();
        match &self.geom {
            Geometry::Polygon(_) => {
                for (c, &r) in d.corner.iter().enumerate() {
                    if r <= big {
                        labels.push(Region::Corner { corner: c });
                    }
                }
                // Interior: outside the open balls of radius eps/2 (eps/3 for the outer level).
                let hole = match level {
                    Level::Outer => eps / 3.0,
                    _ => eps / 2.0,
                };
                if d.corner.iter().all(|&r| r >= hole) {
                    labels.push(Region::Interior);
                }
            }
            Geometry::Polyhedron(p) => {
                let closed = |c: usize, e: usize, b: f64, s: f64| -> (bool, bool) {
                    // (in closed corner region, in closed corner-edge region) w.r.t. edge e
                    let r_c = d.corner[c];
                    match d.rho_of(c, e) {
                        Some(rho) => (r_c <= b && rho >= s / 2.0, r_c <= b && rho <= b),
                        None => (true, true),
                    }
                };
                for c in 0..d.corner.len() {
                    let incident = p.edges_at(c);
                    if d.corner[c] <= big && incident.iter().all(|&e| closed(c, e, big, small).0) {
                        labels.push(Region::Corner { corner: c });
                    }
                    for &e in &incident {
                        if closed(c, e, big, small).1 {
                            labels.push(Region::CornerEdge { corner: c, edge: e });
                        }
                    }
                }
                for e in p.edges() {
                    if d.edge[e.id] <= big && d.corner[e.a] >= small / 2.0 && d.corner[e.b] >= small / 2.0 {
                        labels.push(Region::Edge { edge: e.id });
                    }
                }
                // Interior: outside the union of the open smallest sets.
                let (bi, si) = (inner, outer);
                let mut in_open_union = false;
                for c in 0..d.corner.len() {
                    let r_c = d.corner[c];
                    if r_c >= bi {
                        continue;
                    }
                    let incident = p.edges_at(c);
                    let rhos: Vec<Option<f64>> = incident.iter().map(|&e| d.rho_of(c, e)).collect();
                    if rhos.iter().all(|r| r.is_some_and(|r| r > si / 2.0)) {
                        in_open_union = true;
                    }
                    if rhos.iter().any(|r| r.is_some_and(|r| r < bi)) {
                        in_open_union = true;
                    }
                }
                for e in p.edges() {
                    if d.edge[e.id] < bi && d.corner[e.a] > si / 2.0 && d.corner[e.b] > si / 2.0 {
                        in_open_union = true;
                    }
                }
                if !in_open_union {
                    labels.push(Region::Interior);
                }
            }
        }
        labels.sort();
        Ok(labels)
    }

    /// Pairs of same-kind regions whose open sets both contain `x`.
    ///
    /// Edge pairs sharing a corner are not reported: their neighborhoods always meet
    /// near the common corner, for any choice of parameters.
    pub fn overlaps(&self, x: &[f64], level: Level) -> Result<Vec<(Region, Region)>> {
        let labels = self.strict_labels(x, level)?;
        let mut out = Vec::new();
        for (i, a) in labels.iter().enumerate() {
            for b in &labels[i + 1..] {
                let clash = match (a, b) {
                    (Region::Corner { .. }, Region::Corner { .. }) => true,
                    (Region::Edge { edge: e1 }, Region::Edge { edge: e2 }) => !self.edges_adjacent(*e1, *e2),
                    (Region::CornerEdge { corner: c1, .. }, Region::CornerEdge { corner: c2, .. }) => c1 == c2,
                    _ => false,
                };
                if clash {
                    out.push((*a, *b));
                }
            }
        }
        Ok(out)
    }

    fn edges_adjacent(&self, e1: usize, e2: usize) -> bool {
        match &self.geom {
            Geometry::Polyhedron(p) => {
                let (a, b) = (&p.edges()[e1], &p.edges()[e2]);
                a.a == b.a || a.a == b.b || a.b == b.a || a.b == b.b
            }
            Geometry::Polygon(_) => false,
        }
    }

    /// Labels of open regions (strict inequalities); interior not included.
    fn strict_labels(&self, x: &[f64], level: Level) -> Result<Vec<Region>> {
        let NeighborhoodParams { inner, eps, outer } = self.params;
        let (big, small) = match level {
            Level::Inner => (inner, outer),
            Level::Main => (eps, eps),
            Level::Outer => (outer, inner),
        };
        let d = self.geom.distances(x)?;
        let mut labels = Vec::new();
        for (c, &r) in d.corner.iter().enumerate() {
            if r < big {
                match &self.geom {
                    Geometry::Polygon(_) => labels.push(Region::Corner { corner: c }),
                    Geometry::Polyhedron(p) => {
                        let inc = p.edges_at(c);
                        if inc.iter().all(|&e| d.rho_of(c, e).is_some_and(|r| r > small / 2.0)) {
                            labels.push(Region::Corner { corner: c });
                        }
                        for e in inc {
                            if d.rho_of(c, e).is_some_and(|r| r < big) {
                                labels.push(Region::CornerEdge { corner: c, edge: e });
                            }
                        }
                    }
                }
            }
        }
        if let Geometry::Polyhedron(p) = &self.geom {
            for e in p.edges() {
                if d.edge[e.id] < big && d.corner[e.a] > small / 2.0 && d.corner[e.b] > small / 2.0 {
                    labels.push(Region::Edge { edge: e.id });
                }
            }
        }
        Ok(labels)
    }
}

/// Distance from `x` to a planar polygonal face.
fn face_distance(v: &[P3], l: &[usize], normal: P3, x: P3) -> f64 {
    let p0 = v[l[0]];
    let h = dot3([x[0] - p0[0], x[1] - p0[1], x[2] - p0[2]], normal);
    let proj = [x[0] - h * normal[0], x[1] - h * normal[1], x[2] - h * normal[2]];
    if inside_planar(v, l, normal, proj) {
        return h.abs();
    }
    let n = l.len();
    (0..n)
        .map(|k| dist_point_segment(&x, &v[l[k]], &v[l[(k + 1) % n]]))
        .fold(f64::INFINITY, f64::min)
}

fn inside_planar(v: &[P3], l: &[usize], normal: P3, x: P3) -> bool {
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
