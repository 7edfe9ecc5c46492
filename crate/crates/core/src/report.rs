//! Analysis reports written by the command-line front end.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;
use crate::exact::Angle;
use crate::geometry::Geometry;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub parameters: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerSummary {
    pub id: usize,
    pub position: Vec<f64>,
    /// Interior opening; omitted for polyhedron vertices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opening: Option<Angle>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSummary {
    pub id: usize,
    pub corners: [usize; 2],
    pub opening: Angle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub source: String,
    pub dimension: usize,
    /// Area or volume.
    pub measure: f64,
    pub corners: Vec<CornerSummary>,
    pub edges: Vec<EdgeSummary>,
}

impl GeometrySummary {
    pub fn new(source: &str, geom: &Geometry) -> Self {
        match geom {
            Geometry::Polygon(p) => GeometrySummary {
                source: source.to_string(),
                dimension: 2,
                measure: p.area(),
                corners: p
                    .corners()
                    .iter()
                    .map(|c| CornerSummary { id: c.id, position: c.position.to_vec(), opening: Some(c.opening) })
                    .collect(),
                edges: Vec::new(),
            },
            Geometry::Polyhedron(p) => GeometrySummary {
                source: source.to_string(),
                dimension: 3,
                measure: p.volume(),
                corners: p
                    .vertices()
                    .iter()
                    .enumerate()
                    .map(|(id, v)| CornerSummary { id, position: v.to_vec(), opening: None })
                    .collect(),
                edges: p
                    .edges()
                    .iter()
                    .map(|e| EdgeSummary { id: e.id, corners: [e.a, e.b], opening: e.opening })
                    .collect(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub provenance: Provenance,
    pub geometry: GeometrySummary,
    pub result: Value,
}

impl AnalysisReport {
    pub fn new(command: &str, parameters: Value, geometry: GeometrySummary, result: Value) -> Self {
        AnalysisReport {
            provenance: Provenance {
                tool: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                command: command.to_string(),
                parameters,
            },
            geometry,
            result,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
