//! C interface to the cornerreg library.
//!
//! Objects are opaque handles created by `cr_*_new`/`cr_*_from_*` functions and
//! released with the matching `cr_*_free`. Every fallible call returns a
//! [`CrStatus`]; on failure [`cr_last_error`] describes what went wrong.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cornerreg::fields::{field_from_spec, FieldRef};
use cornerreg::geometry::bundled::bundled;
use cornerreg::geometry::{load_geometry, Geometry};
use cornerreg::mesher::{graded_mesh, GradedMesh, MeshOptions};
use cornerreg::norms::{NormDomain, NormEvaluator, NormKind, NormValue};
use cornerreg::spherical::{corner_exponent_pipeline, ExponentKind, PipelineOptions};
use cornerreg::weights::{admissible_2d, polygon_corner_spectra, polyhedron_edge_spectra, WeightMultiExponent};
use cornerreg::Error;

/// Status codes. Library errors use the same numbers as the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidString = 2,
    Schema = 3,
    Geometry = 4,
    MissingData = 5,
    InvalidParameter = 6,
    Quadrature = 7,
    Solver = 8,
    Unsupported = 9,
    Mesh = 10,
    Io = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrNormSpace {
    K = 0,
    J = 1,
    Step = 2,
    M = 3,
    N = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrExponentKind {
    Dirichlet = 0,
    Neumann = 1,
}

/// A polygon or polyhedron.
pub struct CrGeometry(Geometry);

/// A closed-form field bound to the geometry it was built on.
pub struct CrField(FieldRef);

/// A graded mesh.
pub struct CrMesh(GradedMesh);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CrStatus {
    match e.code() {
        3 => CrStatus::Schema,
        4 => CrStatus::Geometry,
        5 => CrStatus::MissingData,
        6 => CrStatus::InvalidParameter,
        7 => CrStatus::Quadrature,
        8 => CrStatus::Solver,
        9 => CrStatus::Unsupported,
        10 => CrStatus::Mesh,
        _ => CrStatus::Io,
    }
}

enum Fail {
    Status(CrStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CrStatus::Ok,
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(&msg);
            s
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            CrStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(CrStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(CrStatus::InvalidString, format!("{what} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn cr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn cr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a geometry document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cr_geometry_from_json(json: *const c_char, out: *mut *mut CrGeometry) -> CrStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(CrGeometry(load_geometry(text)?)));
        Ok(())
    })
}

/// Loads a bundled geometry: square, l-shape, slit-square, cube, thick-l, fichera.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cr_geometry_bundled(name: *const c_char, out: *mut *mut CrGeometry) -> CrStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(CrGeometry(bundled(name)?)));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn cr_geometry_free(g: *mut CrGeometry) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Dimension, corner count and edge count.
///
/// # Safety
/// `g` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn cr_geometry_info(
    g: *const CrGeometry,
    dimension: *mut usize,
    corners: *mut usize,
    edges: *mut usize,
) -> CrStatus {
    guard(|| {
        let g = &handle(g, "geometry")?.0;
        *out_arg(dimension, "dimension")? = g.dimension();
        *out_arg(corners, "corners")? = g.num_corners();
        *out_arg(edges, "edges")? = g.num_edges();
        Ok(())
    })
}

/// Smallest positive singular exponent at polygon corner `id` (2D) or edge `id`
/// (3D), with the boundary conditions of the geometry.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cr_b_threshold(g: *const CrGeometry, id: usize, out: *mut f64) -> CrStatus {
    guard(|| {
        let g = &handle(g, "geometry")?.0;
        let out = out_arg(out, "out")?;
        let b = match g {
            Geometry::Polygon(p) => {
                let s = polygon_corner_spectra(p, 10.0)?;
                s.get(id).ok_or(Error::UnknownId { kind: "corner", id })?.b_threshold()?
            }
            Geometry::Polyhedron(p) => {
                let s = polyhedron_edge_spectra(p, 10.0)?;
                s.get(id).ok_or(Error::UnknownId { kind: "edge", id })?.b_threshold()?
            }
        };
        *out = b.value();
        Ok(())
    })
}

/// Whether the corner weights `betas` (one per polygon corner) are admissible.
///
/// # Safety
/// `g` must be a live handle; `betas` must hold `n` doubles; `admissible` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cr_admissible_2d(
    g: *const CrGeometry,
    betas: *const f64,
    n: usize,
    admissible: *mut bool,
) -> CrStatus {
    guard(|| {
        let g = &handle(g, "geometry")?.0;
        if betas.is_null() {
            return Err(null("betas"));
        }
        let out = out_arg(admissible, "admissible")?;
        let beta = WeightMultiExponent::new(std::slice::from_raw_parts(betas, n).to_vec(), Vec::new())?;
        let spectra = polygon_corner_spectra(g.as_polygon()?, 10.0)?;
        *out = admissible_2d(g, &beta, &spectra)?.admissible;
        Ok(())
    })
}

/// Limiting exponent at polyhedron corner `corner` from a spherical-cap
/// refinement study with coarsest size `h0` over `levels` levels.
///
/// # Safety
/// `g` must be a live handle; `lambda` and `error` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cr_corner_exponent(
    g: *const CrGeometry,
    corner: usize,
    kind: u32,
    h0: f64,
    levels: usize,
    lambda: *mut f64,
    error: *mut f64,
) -> CrStatus {
    guard(|| {
        let g = &handle(g, "geometry")?.0;
        let kind = match kind {
            k if k == CrExponentKind::Dirichlet as u32 => ExponentKind::Dirichlet,
            k if k == CrExponentKind::Neumann as u32 => ExponentKind::Neumann,
            k => return Err(Error::InvalidParameter(format!("exponent kind {k}")).into()),
        };
        let lambda = out_arg(lambda, "lambda")?;
        let error = out_arg(error, "error")?;
        let opts = PipelineOptions { h0, levels, ..PipelineOptions::default() };
        let est = corner_exponent_pipeline(g, corner, kind, &opts)?;
        *lambda = est.lambda;
        *error = est.error;
        Ok(())
    })
}

/// Builds a field from a specification such as `"corner_singular k=1"`.
///
/// # Safety
/// `g` must be a live handle; `spec` a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cr_field_from_spec(g: *const CrGeometry, spec: *const c_char, out: *mut *mut CrField) -> CrStatus {
    guard(|| {
        let g = &handle(g, "geometry")?.0;
        let spec = str_arg(spec, "spec")?;
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(CrField(field_from_spec(spec, g)?)));
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn cr_field_free(f: *mut CrField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Value of the field at `x` (`dim` coordinates).
///
/// # Safety
/// `f` must be a live handle; `x` must hold `dim` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cr_field_value(f: *const CrField, x: *const f64, dim: usize, out: *mut f64) -> CrStatus {
    guard(|| {
        let f = &handle(f, "field")?.0;
        if x.is_null() {
            return Err(null("x"));
        }
        let out = out_arg(out, "out")?;
        *out = f.jet(std::slice::from_raw_parts(x, dim), 0)?.value();
        Ok(())
    })
}

/// Weighted (semi-)norms of orders `0..=max_order` with uniform corner and edge
/// weights. `values` receives `max_order + 1` entries; diverged orders are +inf.
///
/// # Safety
/// Handles must be live; `values` must have room for `max_order + 1` doubles.
#[no_mangle]
pub unsafe extern "C" fn cr_norm_sequence(
    g: *const CrGeometry,
    f: *const CrField,
    space: u32,
    beta_corner: f64,
    beta_edge: f64,
    max_order: usize,
    values: *mut f64,
) -> CrStatus {
    guard(|| {
        let g = &handle(g, "geometry")?.0;
        let f = &handle(f, "field")?.0;
        if values.is_null() {
            return Err(null("values"));
        }
        let kind = match space {
            0 => NormKind::K,
            1 => NormKind::J,
            2 => NormKind::Step,
            3 => NormKind::M,
            4 => NormKind::N,
            s => return Err(Error::InvalidParameter(format!("norm space {s}")).into()),
        };
        let eval = NormEvaluator::uniform(NormDomain::from_geometry(g)?, beta_corner, beta_edge)?;
        let seq = eval.sequence(f.as_ref(), &kind, max_order)?;
        let out = std::slice::from_raw_parts_mut(values, max_order + 1);
        for (o, v) in out.iter_mut().zip(&seq.values) {
            *o = match v {
                NormValue::Finite { value } => *value,
                NormValue::Diverged { .. } => f64::INFINITY,
            };
        }
        Ok(())
    })
}

/// Graded mesh: corner layers for polygons, anisotropic edge layers for polyhedra.
///
/// # Safety
/// `g` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cr_mesh_generate(g: *const CrGeometry, sigma: f64, layers: usize, out: *mut *mut CrMesh) -> CrStatus {
    guard(|| {
        let g = &handle(g, "geometry")?.0;
        let out = out_arg(out, "out")?;
        let m = graded_mesh(g, &MeshOptions { sigma, layers, ..MeshOptions::default() })?;
        m.check(g)?;
        *out = Box::into_raw(Box::new(CrMesh(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn cr_mesh_free(m: *mut CrMesh) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn cr_mesh_size(m: *const CrMesh, vertices: *mut usize, cells: *mut usize) -> CrStatus {
    guard(|| {
        let m = &handle(m, "mesh")?.0;
        *out_arg(vertices, "vertices")? = m.vertices.len();
        *out_arg(cells, "cells")? = m.cells.len();
        Ok(())
    })
}

/// Writes the mesh as JSON (`format = 0`) or legacy VTK (`format = 1`).
///
/// # Safety
/// `m` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cr_mesh_write(m: *const CrMesh, path: *const c_char, format: u32) -> CrStatus {
    guard(|| {
        let m = &handle(m, "mesh")?.0;
        let path = str_arg(path, "path")?;
        let text = match format {
            0 => m.to_json()?,
            1 => m.to_vtk(),
            f => return Err(Error::InvalidParameter(format!("mesh format {f}")).into()),
        };
        std::fs::write(path, text).map_err(Error::from)?;
        Ok(())
    })
}

/// Mesh as a JSON string; release it with [`cr_string_free`].
///
/// # Safety
/// `m` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cr_mesh_to_json(m: *const CrMesh, out: *mut *mut c_char) -> CrStatus {
    guard(|| {
        let m = &handle(m, "mesh")?.0;
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let s = CString::new(m.to_json()?).map_err(|_| Error::Mesh("JSON contains NUL".into()))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn cr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
