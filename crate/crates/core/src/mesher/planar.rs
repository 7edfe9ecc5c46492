use super::{BoundaryFacet, Cell, CellKind, GradedMesh, VertexPool};
use crate::error::{Error, Result};
use crate::geometry::Polygon;
use crate::vecmath::{cross2, dist2, dist_point_segment, P2};

/// Coarse ear-clipped triangles are cut into three corner triangles of radius
/// `eps` and a central hexagon. Corner triangles become `layers` trapezoid
/// strips plus a core fan, all sharing `n` arc subdivisions; hexagon pieces are
/// refined on an `n`-lattice so the two meet conformingly.
pub(super) fn build(poly: &Polygon, sigma: f64, layers: usize, eps: f64, size: f64) -> Result<GradedMesh> {
    let coarse = poly.triangulate_occurrences()?;
    let pts = &poly.loops()[0];
    let ids = &poly.loop_corners()[0];
    let np = pts.len();
    let scale = poly.diameter();
    let side_of = |a: usize, b: usize| {
        if b == (a + 1) % np {
            Some(a)
        } else if a == (b + 1) % np {
            Some(b)
        } else {
            None
        }
    };
    let toward = |a: usize, b: usize| -> P2 {
        let (p, q) = (pts[a], pts[b]);
        let d = dist2(p, q);
        [p[0] + eps * (q[0] - p[0]) / d, p[1] + eps * (q[1] - p[1]) / d]
    };

    let mut longest: f64 = 0.0;
    for t in &coarse {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let len = dist2(pts[a], pts[b]);
            if len <= 2.0 * eps * (1.0 + 1e-9) {
                return Err(Error::Mesh(format!(
                    "geometry too thin for eps = {eps}: triangulation edge of length {len}"
                )));
            }
        }
        let hex = hexagon(t, &toward);
        for piece in HEX_PIECES {
            let [a, b, c] = piece.map(|i| hex[i]);
            if cross2(sub(b, a), sub(c, a)) <= 1e-12 * scale * scale {
                return Err(Error::Mesh(format!("geometry too thin for eps = {eps}")));
            }
        }
        for j in 0..6 {
            longest = longest.max(dist2(hex[j], hex[(j + 1) % 6]));
        }
    }
    let n = ((longest / size).ceil() as usize).max(1);

    let mut pool = VertexPool::<2>::new(1e-12 * scale);
    let mut cells = Vec::new();
    let mut push = |pool: &mut VertexPool<2>, kind, verts: Vec<(P2, Option<usize>)>, layer, corner| {
        let vertices = verts.into_iter().map(|(p, tag)| pool.insert(p, tag)).collect();
        cells.push(Cell { kind, vertices, layer, corner, axis_layers: None, anisotropy: 0.0 });
    };

    for t in &coarse {
        for k in 0..3 {
            let (v, next, prev) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            let c = pts[v];
            let (en, ep) = (toward(v, next), toward(v, prev));
            let (tag_n, tag_p) = (side_of(v, next), side_of(v, prev));
            let at = |mu: usize, j: usize| -> (P2, Option<usize>) {
                let s = sigma.powi(mu as i32);
                let f = j as f64 / n as f64;
                let a = if j == 0 {
                    en
                } else if j == n {
                    ep
                } else {
                    [en[0] + f * (ep[0] - en[0]), en[1] + f * (ep[1] - en[1])]
                };
                let tag = if j == 0 { tag_n } else if j == n { tag_p } else { None };
                if mu == 0 {
                    return (a, tag);
                }
                ([c[0] + s * (a[0] - c[0]), c[1] + s * (a[1] - c[1])], tag)
            };
            for mu in 1..=layers {
                for j in 0..n {
                    let quad = vec![at(mu - 1, j), at(mu - 1, j + 1), at(mu, j + 1), at(mu, j)];
                    push(&mut pool, CellKind::Quad, quad, mu, Some(ids[v]));
                }
            }
            for j in 0..n {
                let tri = vec![(c, None), at(layers, j), at(layers, j + 1)];
                push(&mut pool, CellKind::Triangle, tri, layers + 1, Some(ids[v]));
            }
        }

        let hex = hexagon(t, &toward);
        let hex_tags = [side_of(t[0], t[1]), None, side_of(t[1], t[2]), None, side_of(t[2], t[0]), None];
        let point_tags = [hex_tags[0], hex_tags[0], hex_tags[2], hex_tags[2], hex_tags[4], hex_tags[4]];
        for piece in HEX_PIECES {
            let [a, b, c] = piece.map(|i| hex[i]);
            // Tag of the piece edge opposite each lattice coordinate line.
            let edge_tag = |i: usize, j: usize| -> Option<usize> {
                let on = |p: usize, q: usize| (p + 1) % 6 == q;
                let tag = |p: usize, q: usize| if on(p, q) { hex_tags[p] } else if on(q, p) { hex_tags[q] } else { None };
                let [pa, pb, pc] = piece;
                match (i, j) {
                    (0, 0) => return point_tags[pa],
                    (0, _) if j == n => return point_tags[pc],
                    (_, 0) if i == n => return point_tags[pb],
                    _ => {}
                }
                let mut t = None;
                if j == 0 {
                    t = t.or(tag(pa, pb));
                }
                if i == 0 {
                    t = t.or(tag(pc, pa));
                }
                if i + j == n {
                    t = t.or(tag(pb, pc));
                }
                t
            };
            let lattice = |i: usize, j: usize| -> (P2, Option<usize>) {
                let p = if (i, j) == (0, 0) {
                    a
                } else if (i, j) == (n, 0) {
                    b
                } else if (i, j) == (0, n) {
                    c
                } else {
                    let (fi, fj) = (i as f64 / n as f64, j as f64 / n as f64);
                    [a[0] + fi * (b[0] - a[0]) + fj * (c[0] - a[0]), a[1] + fi * (b[1] - a[1]) + fj * (c[1] - a[1])]
                };
                (p, edge_tag(i, j))
            };
            for j in 0..n {
                for i in 0..n - j {
                    push(&mut pool, CellKind::Triangle, vec![lattice(i, j), lattice(i + 1, j), lattice(i, j + 1)], 0, None);
                    if i + j + 1 < n {
                        push(
                            &mut pool,
                            CellKind::Triangle,
                            vec![lattice(i + 1, j), lattice(i + 1, j + 1), lattice(i, j + 1)],
                            0,
                            None,
                        );
                    }
                }
            }
        }
    }

    let vertices: Vec<Vec<f64>> = pool.points.iter().map(|p| p.to_vec()).collect();
    for cell in &mut cells {
        let m = cell.vertices.len();
        let lens: Vec<f64> = (0..m)
            .map(|j| {
                let (a, b) = (&vertices[cell.vertices[j]], &vertices[cell.vertices[(j + 1) % m]]);
                (a[0] - b[0]).hypot(a[1] - b[1])
            })
            .collect();
        let hi = lens.iter().copied().fold(0.0, f64::max);
        let lo = lens.iter().copied().fold(f64::INFINITY, f64::min);
        cell.anisotropy = hi / lo;
    }

    let boundary = boundary_facets(poly, &vertices, &cells);
    Ok(GradedMesh {
        dim: 2,
        sigma,
        layers,
        eps,
        corners: poly.corners().iter().map(|c| c.position.to_vec()).collect(),
        vertices,
        cells,
        boundary,
    })
}

/// Pieces of the hexagon, counter-clockwise.
const HEX_PIECES: [[usize; 3]; 4] = [[0, 1, 2], [2, 3, 4], [4, 5, 0], [0, 2, 4]];

/// The triangle with its three `eps`-corners cut off, counter-clockwise.
fn hexagon(t: &[usize; 3], toward: &impl Fn(usize, usize) -> P2) -> [P2; 6] {
    [
        toward(t[0], t[1]),
        toward(t[1], t[0]),
        toward(t[1], t[2]),
        toward(t[2], t[1]),
        toward(t[2], t[0]),
        toward(t[0], t[2]),
    ]
}

fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn boundary_facets(poly: &Polygon, vertices: &[Vec<f64>], cells: &[Cell]) -> Vec<BoundaryFacet> {
    use std::collections::HashMap;
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for c in cells {
        let m = c.vertices.len();
        for j in 0..m {
            let (a, b) = (c.vertices[j], c.vertices[(j + 1) % m]);
            *count.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let tol = 1e-10 * poly.diameter();
    let mut out = Vec::new();
    for c in cells {
        let m = c.vertices.len();
        for j in 0..m {
            let (a, b) = (c.vertices[j], c.vertices[(j + 1) % m]);
            if count[&(a.min(b), a.max(b))] != 1 {
                continue;
            }
            let (pa, pb) = ([vertices[a][0], vertices[a][1]], [vertices[b][0], vertices[b][1]]);
            let mid = [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0];
            let dir = sub(pb, pa);
            let side = poly.sides().iter().find(|s| {
                let sd = sub(s.end, s.start);
                dist_point_segment(&mid, &s.start, &s.end) <= tol && dir[0] * sd[0] + dir[1] * sd[1] > 0.0
            });
            if let Some(s) = side {
                out.push(BoundaryFacet { vertices: vec![a, b], entity: s.id, bc: s.bc });
            }
        }
    }
    out
}
