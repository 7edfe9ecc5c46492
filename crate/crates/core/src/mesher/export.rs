use std::fmt::Write;

use super::{CellKind, GradedMesh};
use crate::error::Result;

impl GradedMesh {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Legacy ASCII VTK unstructured grid with `layer` and `anisotropy` cell data.
    pub fn to_vtk(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# vtk DataFile Version 3.0");
        let _ = writeln!(s, "graded mesh, sigma {} layers {}", self.sigma, self.layers);
        let _ = writeln!(s, "ASCII\nDATASET UNSTRUCTURED_GRID");
        let _ = writeln!(s, "POINTS {} double", self.vertices.len());
        for v in 0..self.vertices.len() {
            let p = self.point(v);
            let _ = writeln!(s, "{:e} {:e} {:e}", p[0], p[1], p[2]);
        }
        let size: usize = self.cells.iter().map(|c| c.vertices.len() + 1).sum();
        let _ = writeln!(s, "CELLS {} {}", self.cells.len(), size);
        for c in &self.cells {
            let _ = write!(s, "{}", c.vertices.len());
            for v in &c.vertices {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "CELL_TYPES {}", self.cells.len());
        for c in &self.cells {
            let t = match c.kind {
                CellKind::Triangle => 5,
                CellKind::Quad => 9,
                CellKind::Hexahedron => 12,
            };
            let _ = writeln!(s, "{t}");
        }
        let _ = writeln!(s, "CELL_DATA {}", self.cells.len());
        let _ = writeln!(s, "SCALARS layer int 1\nLOOKUP_TABLE default");
        for c in &self.cells {
            let _ = writeln!(s, "{}", c.layer);
        }
        let _ = writeln!(s, "SCALARS anisotropy double 1\nLOOKUP_TABLE default");
        for c in &self.cells {
            let _ = writeln!(s, "{:e}", c.anisotropy);
        }
        s
    }
}
