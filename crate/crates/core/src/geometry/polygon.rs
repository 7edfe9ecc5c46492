use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::document::{BoundaryCondition, GeometryDocument};
use crate::error::{Error, Result};
use crate::exact::Angle;
use crate::vecmath::{cross2, dist2, dist_point_segment, dot2, polar_angle, sub2, P2};

/// A boundary side `start -> end`, with the domain on its left.
#[derive(Clone, Debug, Serialize)]
pub struct Side {
    pub id: usize,
    pub start: P2,
    pub end: P2,
    pub bc: BoundaryCondition,
}

/// One angular sector of the domain at a corner.
///
/// The domain occupies polar angles `start_angle < theta < start_angle + opening`
/// around the corner; `first_side` leaves along `start_angle`, `second_side`
/// arrives along `start_angle + opening`.
#[derive(Clone, Debug, Serialize)]
pub struct Sector {
    pub start_angle: f64,
    pub opening: Angle,
    pub first_side: usize,
    pub second_side: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Corner2d {
    pub id: usize,
    pub position: P2,
    pub sectors: Vec<Sector>,
    /// Total opening, the sum of the sector openings.
    pub opening: Angle,
}

/// A polygon given by one or more boundary loops.
#[derive(Clone, Debug)]
pub struct Polygon {
    loops: Vec<Vec<P2>>,
    /// Corner id of every loop occurrence, same shape as `loops`.
    loop_corners: Vec<Vec<usize>>,
    sides: Vec<Side>,
    corners: Vec<Corner2d>,
}

/// Two points closer than this (relative to the bounding box) are the same corner.
const MERGE_TOL: f64 = 1e-10;

impl Polygon {
    pub fn from_document(doc: &GeometryDocument) -> Result<Self> {
        let loops_idx = doc.loops.as_ref().ok_or_else(|| Error::Schema("missing loops".into()))?;
        let mut loops: Vec<Vec<P2>> = loops_idx
            .iter()
            .map(|l| l.iter().map(|&i| [doc.vertices[i][0], doc.vertices[i][1]]).collect())
            .collect();
        let mut bcs: Vec<Vec<BoundaryCondition>> = Vec::new();
        let mut k = 0;
        for l in loops_idx {
            bcs.push((0..l.len()).map(|j| doc.bc_of(k + j)).collect());
            k += l.len();
        }
        // Domain must lie on the left; flip if the document uses the opposite convention.
        let area: f64 = loops.iter().map(|l| signed_area(l)).sum();
        if area < 0.0 {
            for (l, b) in loops.iter_mut().zip(bcs.iter_mut()) {
                l.reverse();
                // side j (v_j -> v_{j+1}) becomes side n-2-j after reversal
                let n = b.len();
                let old = b.clone();
                for j in 0..n {
                    b[(2 * n - 2 - j) % n] = old[j];
                }
            }
        }
        let mut poly = Self::from_loops(loops, bcs)?;
        // Corner ids follow the order of the document's vertex list.
        let scale = bbox_scale(&poly.loops);
        let key = |c: &Corner2d| {
            doc.vertices
                .iter()
                .position(|v| dist2([v[0], v[1]], c.position) <= MERGE_TOL * scale)
                .unwrap_or(usize::MAX)
        };
        let mut order: Vec<usize> = (0..poly.corners.len()).collect();
        order.sort_by_key(|&i| key(&poly.corners[i]));
        let mut new_id = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            new_id[old] = new;
        }
        let mut corners: Vec<Corner2d> = order.iter().map(|&i| poly.corners[i].clone()).collect();
        for (i, c) in corners.iter_mut().enumerate() {
            c.id = i;
        }
        poly.corners = corners;
        for l in &mut poly.loop_corners {
            for c in l.iter_mut() {
                *c = new_id[*c];
            }
        }
        Ok(poly)
    }

    /// Builds a polygon from loops of points (domain on the left) and per-side tags.
    pub fn from_loops(loops: Vec<Vec<P2>>, bcs: Vec<Vec<BoundaryCondition>>) -> Result<Self> {
        let scale = bbox_scale(&loops);
        let area: f64 = loops.iter().map(|l| signed_area(l)).sum();
        if area <= 1e-12 * scale * scale {
            return Err(Error::Degenerate("polygon has zero or negative area".into()));
        }
        let mut sides = Vec::new();
        for (l, b) in loops.iter().zip(&bcs) {
            let n = l.len();
            for j in 0..n {
                let (a, c) = (l[j], l[(j + 1) % n]);
                if dist2(a, c) <= MERGE_TOL * scale {
                    return Err(Error::Degenerate(format!(
                        "side {} has zero length",
                        sides.len()
                    )));
                }
                sides.push(Side { id: sides.len(), start: a, end: c, bc: b[j] });
            }
        }

        let mut corners: Vec<Corner2d> = Vec::new();
        let mut loop_corners = Vec::new();
        let mut side_offset = 0;
        for l in &loops {
            let n = l.len();
            let mut ids = Vec::with_capacity(n);
            for j in 0..n {
                let v = l[j];
                let prev = l[(j + n - 1) % n];
                let next = l[(j + 1) % n];
                let out = sub2(next, v);
                let inc = sub2(prev, v);
                let mut ang = cross2(out, inc).atan2(dot2(out, inc));
                if ang <= 0.0 {
                    ang += TAU;
                }
                let sector = Sector {
                    start_angle: polar_angle(out),
                    opening: Angle::from_radians(ang),
                    first_side: side_offset + j,
                    second_side: side_offset + (j + n - 1) % n,
                };
                let id = match corners.iter().position(|c| dist2(c.position, v) <= MERGE_TOL * scale) {
                    Some(id) => id,
                    None => {
                        corners.push(Corner2d {
                            id: corners.len(),
                            position: v,
                            sectors: Vec::new(),
                            opening: Angle::from_radians(0.0),
                        });
                        corners.len() - 1
                    }
                };
                corners[id].sectors.push(sector);
                ids.push(id);
            }
            loop_corners.push(ids);
            side_offset += n;
        }
        for c in &mut corners {
            let total: f64 = c.sectors.iter().map(|s| s.opening.radians()).sum();
            if !(total > 0.0 && total <= TAU * (1.0 + 1e-12)) {
                return Err(Error::OpeningOutOfRange(total));
            }
            c.opening = Angle::from_radians(total);
        }
        Ok(Polygon { loops, loop_corners, sides, corners })
    }

    pub fn corners(&self) -> &[Corner2d] {
        &self.corners
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    pub fn loops(&self) -> &[Vec<P2>] {
        &self.loops
    }

    /// Corner id of every loop position, same shape as [`Polygon::loops`].
    pub fn loop_corners(&self) -> &[Vec<usize>] {
        &self.loop_corners
    }

    pub fn corner(&self, id: usize) -> Result<&Corner2d> {
        self.corners.get(id).ok_or(Error::UnknownId { kind: "corner", id })
    }

    pub fn corner_opening(&self, id: usize) -> Result<Angle> {
        Ok(self.corner(id)?.opening)
    }

    pub fn area(&self) -> f64 {
        self.loops.iter().map(|l| signed_area(l)).sum()
    }

    pub fn diameter(&self) -> f64 {
        let pts: Vec<P2> = self.loops.iter().flatten().copied().collect();
        let mut d: f64 = 0.0;
        for a in &pts {
            for b in &pts {
                d = d.max(dist2(*a, *b));
            }
        }
        d
    }

    pub fn min_corner_distance(&self) -> f64 {
        let mut d = f64::INFINITY;
        for (i, a) in self.corners.iter().enumerate() {
            for b in &self.corners[i + 1..] {
                d = d.min(dist2(a.position, b.position));
            }
        }
        d
    }

    /// Distance from corner `c` to the sides that do not touch it.
    pub fn distance_to_far_sides(&self, c: usize) -> f64 {
        let p = self.corners[c].position;
        let scale = bbox_scale(&self.loops);
        self.sides
            .iter()
            .filter(|s| dist2(s.start, p) > MERGE_TOL * scale && dist2(s.end, p) > MERGE_TOL * scale)
            .map(|s| dist_point_segment(&p, &s.start, &s.end))
            .fold(f64::INFINITY, f64::min)
    }

    /// Point-in-polygon by crossing parity; points on the boundary may go either way.
    pub fn contains(&self, x: P2) -> bool {
        let mut inside = false;
        for l in &self.loops {
            let n = l.len();
            for j in 0..n {
                let (a, b) = (l[j], l[(j + 1) % n]);
                if (a[1] > x[1]) != (b[1] > x[1]) {
                    let t = (x[1] - a[1]) / (b[1] - a[1]);
                    if x[0] < a[0] + t * (b[0] - a[0]) {
                        inside = !inside;
                    }
                }
            }
        }
        inside
    }

    /// Ear-clipping triangulation of a single (possibly weakly simple) loop.
    ///
    /// Triangles are returned as corner ids, counter-clockwise. Every triangle vertex
    /// is a polygon corner.
    pub fn triangulate(&self) -> Result<Vec<[usize; 3]>> {
        let ids = &self.loop_corners[0];
        Ok(self
            .triangulate_occurrences()?
            .into_iter()
            .map(|t| [ids[t[0]], ids[t[1]], ids[t[2]]])
            .collect())
    }

    /// Like [`Polygon::triangulate`], but triangles index positions of the single
    /// boundary loop, so the two lips of a slit stay distinct.
    pub fn triangulate_occurrences(&self) -> Result<Vec<[usize; 3]>> {
        if self.loops.len() != 1 {
            return Err(Error::Unsupported(
                "triangulation of polygons with several boundary loops".into(),
            ));
        }
        let pts = &self.loops[0];
        let scale = bbox_scale(&self.loops);
        let mut idx: Vec<usize> = (0..pts.len()).collect();
        let mut tris = Vec::new();
        while idx.len() > 3 {
            let n = idx.len();
            let mut best: Option<(usize, f64)> = None;
            for k in 0..n {
                let (ip, ic, inx) = (idx[(k + n - 1) % n], idx[k], idx[(k + 1) % n]);
                let (p, c, q) = (pts[ip], pts[ic], pts[inx]);
                let area2 = cross2(sub2(c, p), sub2(q, c));
                if area2 <= 1e-14 * scale * scale {
                    continue;
                }
                let blocked = idx.iter().any(|&j| {
                    let x = pts[j];
                    if [p, c, q].iter().any(|v| dist2(*v, x) <= MERGE_TOL * scale) {
                        return false;
                    }
                    point_in_closed_triangle(x, p, c, q, 1e-12 * scale * scale)
                });
                if blocked {
                    continue;
                }
                let quality = min_angle(p, c, q);
                if best.is_none_or(|(_, b)| quality > b) {
                    best = Some((k, quality));
                }
            }
            let (k, _) = best.ok_or_else(|| Error::Degenerate("polygon could not be triangulated".into()))?;
            let n = idx.len();
            tris.push([idx[(k + n - 1) % n], idx[k], idx[(k + 1) % n]]);
            idx.remove(k);
        }
        tris.push([idx[0], idx[1], idx[2]]);
        Ok(tris)
    }

    pub fn transformed(&self, f: impl Fn(P2) -> P2) -> Result<Polygon> {
        let loops: Vec<Vec<P2>> = self.loops.iter().map(|l| l.iter().map(|p| f(*p)).collect()).collect();
        let mut bcs = Vec::new();
        let mut k = 0;
        for l in &self.loops {
            bcs.push((0..l.len()).map(|j| self.sides[k + j].bc).collect());
            k += l.len();
        }
        Polygon::from_loops(loops, bcs)
    }
}

pub fn signed_area(l: &[P2]) -> f64 {
    let n = l.len();
    (0..n).map(|j| cross2(l[j], l[(j + 1) % n])).sum::<f64>() / 2.0
}

fn bbox_scale(loops: &[Vec<P2>]) -> f64 {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in loops.iter().flatten() {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-300)
}

fn point_in_closed_triangle(x: P2, a: P2, b: P2, c: P2, tol: f64) -> bool {
    let d1 = cross2(sub2(b, a), sub2(x, a));
    let d2 = cross2(sub2(c, b), sub2(x, b));
    let d3 = cross2(sub2(a, c), sub2(x, c));
    d1 >= -tol && d2 >= -tol && d3 >= -tol
}

fn min_angle(a: P2, b: P2, c: P2) -> f64 {
    let ang = |p: P2, q: P2, r: P2| {
        let u = sub2(q, p);
        let v = sub2(r, p);
        cross2(u, v).abs().atan2(dot2(u, v))
    };
    ang(a, b, c).min(ang(b, c, a)).min(ang(c, a, b)).min(PI)
}
