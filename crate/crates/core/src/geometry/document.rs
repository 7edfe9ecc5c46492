use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary condition attached to a polygon side or a polyhedron face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    #[default]
    Dirichlet,
    Neumann,
}

/// The geometry description document.
///
/// 2D: `loops` lists boundary vertex loops with the domain on the left
/// (a crack is a side traversed twice). 3D: `faces` are planar vertex loops,
/// counter-clockwise seen from outside. `bc` maps side/face index to a tag;
/// missing entries default to Dirichlet.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GeometryDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dimension: usize,
    pub vertices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loops: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faces: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bc: BTreeMap<String, BoundaryCondition>,
}

impl GeometryDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Structural checks that do not need any geometry computation.
    pub fn validate(&self) -> Result<()> {
        if self.dimension != 2 && self.dimension != 3 {
            return Err(Error::Schema(format!("dimension must be 2 or 3, got {}", self.dimension)));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if v.len() != self.dimension {
                return Err(Error::Schema(format!("vertex {i} has {} coordinates", v.len())));
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::Schema(format!("vertex {i} has a non-finite coordinate")));
            }
        }
        let lists = match self.dimension {
            2 => self
                .loops
                .as_ref()
                .ok_or_else(|| Error::Schema("2D geometry needs \"loops\"".into()))?,
            _ => self
                .faces
                .as_ref()
                .ok_or_else(|| Error::Schema("3D geometry needs \"faces\"".into()))?,
        };
        if lists.is_empty() {
            return Err(Error::Schema("no loops/faces given".into()));
        }
        for (i, l) in lists.iter().enumerate() {
            if l.len() < if self.dimension == 2 { 2 } else { 3 } {
                return Err(Error::Schema(format!("loop/face {i} has too few vertices")));
            }
            if let Some(bad) = l.iter().find(|&&v| v >= self.vertices.len()) {
                return Err(Error::Schema(format!("loop/face {i} references missing vertex {bad}")));
            }
        }
        for key in self.bc.keys() {
            key.parse::<usize>()
                .map_err(|_| Error::Schema(format!("bc key {key:?} is not an index")))?;
        }
        Ok(())
    }

    /// Boundary condition of side/face `index`.
    pub fn bc_of(&self, index: usize) -> BoundaryCondition {
        self.bc.get(&index.to_string()).copied().unwrap_or_default()
    }
}
