//! Example geometries shipped with the library.

use super::{load_geometry, Geometry};
use crate::error::{Error, Result};

/// `(name, JSON document)` for every bundled geometry.
pub const BUNDLED: &[(&str, &str)] = &[
    ("square", include_str!("../../geometries/square.json")),
    ("l-shape", include_str!("../../geometries/l_shape.json")),
    ("slit-square", include_str!("../../geometries/slit_square.json")),
    ("cube", include_str!("../../geometries/cube.json")),
    ("thick-l", include_str!("../../geometries/thick_l.json")),
    ("fichera", include_str!("../../geometries/fichera.json")),
];

pub fn bundled_document(name: &str) -> Result<&'static str> {
    let key = name.trim_end_matches(".json").replace('_', "-");
    BUNDLED
        .iter()
        .find(|(n, _)| *n == key)
        .map(|(_, d)| *d)
        .ok_or_else(|| Error::Schema(format!("no bundled geometry named {name:?}")))
}

pub fn bundled(name: &str) -> Result<Geometry> {
    load_geometry(bundled_document(name)?)
}

pub fn square() -> Geometry {
    bundled("square").expect("bundled square loads")
}

/// `(-1,1)^2` minus the closed quadrant `[0,1] x [-1,0]`; corner 0 is the re-entrant corner.
pub fn l_shape() -> Geometry {
    bundled("l-shape").expect("bundled L-shape loads")
}

/// `(-1,1)^2` cut along `[0,1] x {0}`; corner 0 is the crack tip.
pub fn slit_square() -> Geometry {
    bundled("slit-square").expect("bundled slit square loads")
}

/// The unit cube `[0,1]^3`; corner 0 is the origin.
pub fn cube() -> Geometry {
    bundled("cube").expect("bundled cube loads")
}

/// L-shape extruded over `z in [0,1]`.
pub fn thick_l() -> Geometry {
    bundled("thick-l").expect("bundled thick L loads")
}

/// `(-1,1)^3` minus `[0,1)^3`; corner 0 is the re-entrant vertex at the origin.
pub fn fichera() -> Geometry {
    bundled("fichera").expect("bundled Fichera corner loads")
}
