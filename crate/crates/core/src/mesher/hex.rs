use std::collections::HashMap;

use super::{BoundaryFacet, Cell, CellKind, GradedMesh, HEX_FACES};
use crate::error::{Error, Result};
use crate::geometry::Polyhedron;
use crate::vecmath::{cross3, dot3, sub3, P3};

/// Tensor-product hexahedra. Along every axis the coordinates of the polyhedron
/// vertices are breakpoints; within `eps` of a breakpoint the intervals shrink
/// geometrically, elsewhere they are uniform. A cell next to an edge is then
/// graded in the two transverse axes and uniform along the edge, and a cell next
/// to a corner is graded in all three.
pub(super) fn build(poly: &Polyhedron, sigma: f64, layers: usize, eps: f64, size: f64) -> Result<GradedMesh> {
    if !poly.is_orthogonal() {
        return Err(Error::Unsupported("anisotropic hexahedral meshes need axis-parallel faces".into()));
    }
    let scale = poly.diameter();
    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<Vec<usize>> = Vec::new();
    for axis in 0..3 {
        let mut breaks: Vec<f64> = poly.vertices().iter().map(|v| v[axis]).collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * scale);
        let (c, l) = axis_grid(&breaks, sigma, layers, eps, size)?;
        coords.push(c);
        labels.push(l);
    }

    let dims = [coords[0].len(), coords[1].len(), coords[2].len()];
    let mut index: HashMap<[usize; 3], usize> = HashMap::new();
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let mut cells = Vec::new();
    for k in 0..dims[2] - 1 {
        for j in 0..dims[1] - 1 {
            for i in 0..dims[0] - 1 {
                let center = [
                    (coords[0][i] + coords[0][i + 1]) / 2.0,
                    (coords[1][j] + coords[1][j + 1]) / 2.0,
                    (coords[2][k] + coords[2][k + 1]) / 2.0,
                ];
                if !poly.contains(center) {
                    continue;
                }
                let corners = [
                    [i, j, k],
                    [i + 1, j, k],
                    [i + 1, j + 1, k],
                    [i, j + 1, k],
                    [i, j, k + 1],
                    [i + 1, j, k + 1],
                    [i + 1, j + 1, k + 1],
                    [i, j + 1, k + 1],
                ];
                let verts = corners
                    .iter()
                    .map(|g| {
                        *index.entry(*g).or_insert_with(|| {
                            vertices.push(vec![coords[0][g[0]], coords[1][g[1]], coords[2][g[2]]]);
                            vertices.len() - 1
                        })
                    })
                    .collect();
                let ext = [
                    coords[0][i + 1] - coords[0][i],
                    coords[1][j + 1] - coords[1][j],
                    coords[2][k + 1] - coords[2][k],
                ];
                let axis_layers = [labels[0][i], labels[1][j], labels[2][k]];
                cells.push(Cell {
                    kind: CellKind::Hexahedron,
                    vertices: verts,
                    layer: *axis_layers.iter().max().unwrap_or(&0),
                    corner: None,
                    axis_layers: Some(axis_layers),
                    anisotropy: ext.iter().fold(0.0, |a: f64, &b| a.max(b)) / ext.iter().fold(f64::INFINITY, |a: f64, &b| a.min(b)),
                });
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::Mesh("no cell center lies inside the polyhedron".into()));
    }

    let boundary = boundary_facets(poly, &vertices, &cells);
    Ok(GradedMesh {
        dim: 3,
        sigma,
        layers,
        eps,
        corners: poly.vertices().iter().map(|v| v.to_vec()).collect(),
        vertices,
        cells,
        boundary,
    })
}

/// Graded 1D grid over sorted breakpoints, with the layer label of each interval.
fn axis_grid(breaks: &[f64], sigma: f64, layers: usize, eps: f64, size: f64) -> Result<(Vec<f64>, Vec<usize>)> {
    let mut x = vec![breaks[0]];
    let mut lab = Vec::new();
    // Offsets from a breakpoint: eps * sigma^L, ..., eps * sigma, eps.
    let offsets: Vec<f64> = (0..=layers).rev().map(|mu| eps * sigma.powi(mu as i32)).collect();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let gap = b - a;
        if gap <= 2.0 * eps * (1.0 + 1e-9) {
            return Err(Error::Mesh(format!(
                "geometry too thin for eps = {eps}: coordinate planes {a} and {b} are {gap} apart"
            )));
        }
        for (q, off) in offsets.iter().enumerate() {
            x.push(a + off);
            lab.push(layers + 1 - q);
        }
        let middle = gap - 2.0 * eps;
        let m = ((middle / size).ceil() as usize).max(1);
        for s in 1..m {
            x.push(a + eps + middle * s as f64 / m as f64);
            lab.push(0);
        }
        x.push(b - eps);
        lab.push(0);
        for (q, off) in offsets.iter().enumerate().rev().skip(1) {
            x.push(b - off);
            lab.push(layers - q);
        }
        x.push(b);
        lab.push(layers + 1);
    }
    Ok((x, lab))
}

fn boundary_facets(poly: &Polyhedron, vertices: &[Vec<f64>], cells: &[Cell]) -> Vec<BoundaryFacet> {
    let mut count: HashMap<Vec<usize>, usize> = HashMap::new();
    let face_of = |c: &Cell, f: &[usize; 4]| -> Vec<usize> { f.iter().map(|&k| c.vertices[k]).collect() };
    for c in cells {
        for f in &HEX_FACES {
            let mut key = face_of(c, f);
            key.sort_unstable();
            *count.entry(key).or_default() += 1;
        }
    }
    let p = |v: usize| -> P3 { [vertices[v][0], vertices[v][1], vertices[v][2]] };
    let mut out = Vec::new();
    for c in cells {
        for f in &HEX_FACES {
            let verts = face_of(c, f);
            let mut key = verts.clone();
            key.sort_unstable();
            if count[&key] != 1 {
                continue;
            }
            let x: Vec<P3> = verts.iter().map(|&v| p(v)).collect();
            let center = [0, 1, 2].map(|i| x.iter().map(|q| q[i]).sum::<f64>() / 4.0);
            let normal = cross3(sub3(x[1], x[0]), sub3(x[3], x[0]));
            let face = poly
                .faces()
                .iter()
                .find(|face| dot3(face.normal, normal) > 0.0 && poly.face_contains(face.id, center));
            if let Some(face) = face {
                out.push(BoundaryFacet { vertices: verts, entity: face.id, bc: face.bc });
            }
        }
    }
    out
}
