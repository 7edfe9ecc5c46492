use super::*;
use crate::geometry::bundled;

#[test]
fn l_shape_mesh_passes_audit() {
    let g = bundled::l_shape();
    let m = graded_mesh_2d(&g, 0.5, 5).unwrap();
    let a = m.check(&g).unwrap();
    assert!(a.min_scaled_jacobian > 0.05, "{a:?}");
    assert!(!m.boundary.is_empty());
}

#[test]
fn innermost_radius_is_scaled_eps() {
    let g = bundled::l_shape();
    let m = graded_mesh_2d(&g, 0.5, 5).unwrap();
    assert!((m.eps - 0.25).abs() < 1e-15);
    // Every layer-(L+1) vertex other than the corner sits within 2^-5 eps of it.
    for cell in m.cells.iter().filter(|c| c.layer == 6) {
        let c = &m.corners[cell.corner.unwrap()];
        let r = cell
            .vertices
            .iter()
            .map(|&v| (m.vertices[v][0] - c[0]).hypot(m.vertices[v][1] - c[1]))
            .fold(0.0, f64::max);
        assert!(r <= 0.25 / 32.0 * (1.0 + 1e-12));
    }
}

#[test]
fn layers_are_dyadic_copies() {
    let g = bundled::l_shape();
    let m = graded_mesh_2d(&g, 0.5, 6).unwrap();
    for c in 0..m.corners.len() {
        for mu in 2..=6 {
            let d = m.layer_scaling_defect(c, mu).unwrap();
            assert!(d < 1e-12, "corner {c} layer {mu}: {d}");
        }
    }
}

#[test]
fn other_sigma_keeps_ratio() {
    let g = bundled::square();
    let m = graded_mesh_2d(&g, 0.3, 4).unwrap();
    m.check(&g).unwrap();
    assert!(m.layer_scaling_defect(0, 3).unwrap() < 1e-12);
}

#[test]
fn cell_count_linear_in_layers() {
    let g = bundled::l_shape();
    let counts: Vec<usize> = (3..=8).map(|l| graded_mesh_2d(&g, 0.5, l).unwrap().cells.len()).collect();
    let inc: Vec<usize> = counts.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(inc.iter().all(|&d| d == inc[0] && d > 0), "{counts:?}");
}

#[test]
fn slit_lips_stay_apart() {
    let g = bundled::slit_square();
    let m = graded_mesh_2d(&g, 0.5, 3).unwrap();
    m.check(&g).unwrap();
    // Both lips of the slit carry boundary facets.
    let lips = m.boundary.iter().filter(|b| b.entity == 5 || b.entity == 6).count();
    let on_upper = m.boundary.iter().filter(|b| b.entity == 5).count();
    assert!(on_upper > 0 && lips == 2 * on_upper);
}

#[test]
fn rejects_bad_parameters() {
    let g = bundled::l_shape();
    assert!(graded_mesh_2d(&g, 1.0, 3).is_err());
    assert!(graded_mesh_2d(&g, 0.5, 0).is_err());
    assert!(graded_mesh_2d(&g, 0.5, 60).is_err());
    let thin = MeshOptions { eps: Some(0.6), ..MeshOptions::default() };
    assert!(matches!(graded_mesh_2d_with(&g, &thin), Err(Error::Mesh(_))));
    assert!(aniso_graded_mesh_3d(&g, 0.5, 3).is_err());
}

#[test]
fn cube_hex_mesh() {
    let g = bundled::cube();
    let m = aniso_graded_mesh_3d(&g, 0.5, 4).unwrap();
    let a = m.check(&g).unwrap();
    assert!(a.min_scaled_jacobian > 0.99);
    let faces = m.boundary.iter().map(|b| b.entity).collect::<std::collections::BTreeSet<_>>();
    assert_eq!(faces.len(), 6);
}

#[test]
fn edge_cells_are_transversely_graded() {
    let g = bundled::cube();
    let m = aniso_graded_mesh_3d(&g, 0.5, 5).unwrap();
    for mu in 1..=5 {
        for cell in &m.cells {
            let l = cell.axis_layers.unwrap();
            if l == [mu, mu, 0] {
                let e = m.extents(cell);
                assert!((e[0] - e[1]).abs() < 1e-14);
                assert!((e[2] / e[0] - 2f64.powi(mu as i32)).abs() < 1e-9, "{e:?}");
            }
            if l == [mu, mu, mu] {
                assert!(cell.anisotropy < 1.0 + 1e-9);
            }
        }
    }
}

#[test]
fn nonconvex_polyhedra_mesh() {
    for g in [bundled::thick_l(), bundled::fichera()] {
        let m = aniso_graded_mesh_3d(&g, 0.5, 3).unwrap();
        m.check(&g).unwrap();
    }
}

#[test]
fn single_layer_is_uniform_plus_boundary_layer() {
    let g = bundled::cube();
    let m = aniso_graded_mesh_3d(&g, 0.5, 1).unwrap();
    m.check(&g).unwrap();
    assert_eq!(m.layer_counts().len(), 3);
    assert!(m.cells.iter().all(|c| c.layer <= 2));
}

#[test]
fn json_and_vtk_export() {
    let g = bundled::l_shape();
    let m = graded_mesh_2d(&g, 0.5, 2).unwrap();
    let back = GradedMesh::from_json(&m.to_json().unwrap()).unwrap();
    assert_eq!(back, m);
    let vtk = m.to_vtk();
    assert!(vtk.starts_with("# vtk DataFile Version 3.0"));
    assert!(vtk.contains(&format!("CELL_TYPES {}", m.cells.len())));
    let h = aniso_graded_mesh_3d(&bundled::cube(), 0.5, 2).unwrap().to_vtk();
    assert!(h.lines().any(|l| l == "12"));
}

#[test]
fn audit_detects_broken_meshes() {
    let g = bundled::square();
    let mut m = graded_mesh_2d(&g, 0.5, 2).unwrap();
    let last = m.cells.pop().unwrap();
    assert!(!m.audit(&g).unwrap().passed());
    let mut flipped = last.clone();
    flipped.vertices.reverse();
    m.cells.push(flipped);
    let a = m.audit(&g).unwrap();
    assert!(a.min_scaled_jacobian < 0.0 && !a.passed());
}
