//! Textual field specifications: a constructor name followed by `key=value` pairs,
//! e.g. `corner_singular k=1 corner=0 cutoff=auto`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{AxialProfile, CornerSingular, EdgeSingular3d, FieldRef, Polynomial, Product, RadialCutoff};
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::spectra2d::ProblemSpec;

pub const FIELD_NAMES: &[&str] = &["corner_singular", "edge_singular", "constant", "polynomial", "cutoff"];

#[derive(Clone, Debug, PartialEq)]
pub struct FieldSpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

pub fn parse_field_spec(text: &str) -> Result<FieldSpec> {
    let mut words = text.split_whitespace();
    let name = words.next().ok_or_else(|| Error::InvalidParameter("empty field specification".into()))?;
    let mut params = BTreeMap::new();
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got {w:?}")))?;
        if params.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::InvalidParameter(format!("parameter {k:?} given twice")));
        }
    }
    Ok(FieldSpec { name: name.to_string(), params })
}

struct Params<'a> {
    name: &'a str,
    map: BTreeMap<String, String>,
}

impl Params<'_> {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn num<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("{}: cannot parse {key}={v}", self.name))),
        }
    }

    fn list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        self.take(key)
            .map(|v| {
                v.split(',')
                    .map(|x| x.parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::InvalidParameter(format!("{}: cannot parse {key}={v}", self.name)))
            })
            .transpose()
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => Err(Error::InvalidParameter(format!("{}: unknown parameter {k:?}", self.name))),
            None => Ok(()),
        }
    }
}

fn problem(bc: &str) -> Result<Option<ProblemSpec>> {
    match bc {
        "geometry" => Ok(None),
        "dirichlet" | "dir" => Ok(Some(ProblemSpec::dirichlet())),
        "neumann" | "neu" => Ok(Some(ProblemSpec::neumann())),
        "mixed" => Ok(Some(ProblemSpec::mixed())),
        _ => Err(Error::InvalidParameter(format!("unknown boundary condition {bc:?}"))),
    }
}

/// Builds the field named by `spec` on `geom`.
///
/// Defaults: `corner_singular` and `edge_singular` pick the corner (edge) of
/// largest opening, `k = 1` and the geometry's boundary conditions;
/// `corner_singular` is multiplied by a cut-off equal to 1 within `eps` of its
/// corner and 0 beyond `2 eps` (`cutoff=none` disables it).
pub fn build_field(spec: &FieldSpec, geom: &Geometry) -> Result<FieldRef> {
    let mut p = Params { name: &spec.name, map: spec.params.clone() };
    let field: FieldRef = match spec.name.as_str() {
        "corner_singular" => {
            let poly = geom.as_polygon()?;
            let default_corner = (0..geom.num_corners())
                .max_by(|&a, &b| {
                    let oa = poly.corners()[a].opening.radians();
                    let ob = poly.corners()[b].opening.radians();
                    oa.total_cmp(&ob).then(b.cmp(&a))
                })
                .unwrap_or(0);
            let corner = p.num("corner", default_corner)?;
            let k = p.num("k", 1i64)?;
            let bc = problem(&p.take("bc").unwrap_or_else(|| "geometry".into()))?;
            let s = match bc {
                None => CornerSingular::at_corner_with_polygon_bc(poly, corner, k)?,
                Some(bc) => CornerSingular::at_corner(poly, corner, k, bc)?,
            };
            let center = poly.corner(corner)?.position.to_vec();
            let cutoff = p.take("cutoff").unwrap_or_else(|| "auto".into());
            let radii = match cutoff.as_str() {
                "none" => None,
                "auto" => {
                    let eps = 0.25 * geom.min_corner_distance();
                    Some((eps, 2.0 * eps))
                }
                other => {
                    let v: Vec<f64> = other
                        .split(',')
                        .map(|x| x.parse())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| Error::InvalidParameter(format!("cutoff={other}")))?;
                    match v[..] {
                        [r0, r1] => Some((r0, r1)),
                        _ => return Err(Error::InvalidParameter("cutoff needs r0,r1".into())),
                    }
                }
            };
            let s: FieldRef = Arc::new(s);
            match radii {
                None => s,
                Some((r0, r1)) => Arc::new(Product(Arc::new(RadialCutoff::new(center, r0, r1)?), s)),
            }
        }
        "edge_singular" => {
            let poly = geom.as_polyhedron()?;
            let default_edge = (0..geom.num_edges())
                .max_by(|&a, &b| {
                    let oa = poly.edges()[a].opening.radians();
                    let ob = poly.edges()[b].opening.radians();
                    oa.total_cmp(&ob).then(b.cmp(&a))
                })
                .unwrap_or(0);
            let edge = p.num("edge", default_edge)?;
            let k = p.num("k", 1i64)?;
            let frequency = p.num("frequency", 1.0)?;
            let profile = match p.take("profile").as_deref().unwrap_or("constant") {
                "constant" => AxialProfile::Constant { value: p.num("value", 1.0)? },
                "sin" => AxialProfile::Sin { frequency },
                "cos" => AxialProfile::Cos { frequency },
                "exp" => AxialProfile::Exp { rate: frequency },
                other => return Err(Error::InvalidParameter(format!("unknown axial profile {other:?}"))),
            };
            Arc::new(EdgeSingular3d::at_edge(poly, edge, k, profile)?)
        }
        "constant" => Arc::new(Polynomial::constant(geom.dimension(), p.num("value", 1.0)?)),
        "polynomial" => {
            let terms = p
                .take("terms")
                .ok_or_else(|| Error::InvalidParameter("polynomial: missing terms=c:a,b+...".into()))?;
            let mut out = Vec::new();
            for t in terms.split('+') {
                let (c, powers) = t
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidParameter(format!("polynomial term {t:?}")))?;
                let c: f64 = c.parse().map_err(|_| Error::InvalidParameter(format!("coefficient {c:?}")))?;
                let a = powers
                    .split(',')
                    .map(|x| x.parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::InvalidParameter(format!("powers {powers:?}")))?;
                out.push((a, c));
            }
            Arc::new(Polynomial::new(geom.dimension(), out)?)
        }
        "cutoff" => {
            let center = p
                .list("center")?
                .ok_or_else(|| Error::InvalidParameter("cutoff: missing center".into()))?;
            if center.len() != geom.dimension() {
                return Err(Error::WrongDimension { expected: geom.dimension(), actual: center.len() });
            }
            Arc::new(RadialCutoff::new(center, p.num("r0", f64::NAN)?, p.num("r1", f64::NAN)?)?)
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown field {other:?}; available: {}",
                FIELD_NAMES.join(", ")
            )))
        }
    };
    p.finish()?;
    Ok(field)
}

pub fn field_from_spec(text: &str, geom: &Geometry) -> Result<FieldRef> {
    build_field(&parse_field_spec(text)?, geom)
}
