//! Laplace-Beltrami eigenvalues on spherical caps and the corner exponents they give.

mod cap;
mod eigen;
pub mod linalg;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cap::{BoundaryEdge, CapGrading, CapOptions, SphericalCapMesh};
pub use eigen::{lowest_eigenpairs, EigenOptions, EigenPairs};
use linalg::CsrMatrix;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCondition, Geometry};
use crate::vecmath::{cross3, dot3, norm3, sub3};

/// Boundary condition imposed on the cap boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapCondition {
    Dirichlet,
    Neumann,
    /// Dirichlet on arcs whose face is Dirichlet, natural elsewhere.
    FromFaces,
}

/// Stiffness and mass matrices of P1 elements on the flat triangles.
pub fn assemble(mesh: &SphericalCapMesh) -> (CsrMatrix, CsrMatrix) {
    let v = &mesh.vertices;
    let per: Vec<([usize; 3], [[f64; 3]; 3], f64)> = mesh
        .triangles
        .par_iter()
        .map(|t| {
            let p = t.map(|i| v[i]);
            let e = [sub3(p[2], p[1]), sub3(p[0], p[2]), sub3(p[1], p[0])];
            let area = 0.5 * norm3(cross3(e[0], e[1]));
            let k = std::array::from_fn(|i| std::array::from_fn(|j| dot3(e[i], e[j]) / (4.0 * area)));
            (*t, k, area)
        })
        .collect();
    let mut kt = Vec::with_capacity(9 * per.len());
    let mut mt = Vec::with_capacity(9 * per.len());
    for (t, k, area) in per {
        for i in 0..3 {
            for j in 0..3 {
                kt.push((t[i], t[j], k[i][j]));
                mt.push((t[i], t[j], if i == j { area / 6.0 } else { area / 12.0 }));
            }
        }
    }
    let n = v.len();
    (CsrMatrix::from_triplets(n, kt), CsrMatrix::from_triplets(n, mt))
}

/// Lowest `k` eigenvalues of the surface Laplacian on `mesh`.
pub fn laplace_beltrami_eigs(mesh: &SphericalCapMesh, bc: CapCondition, k: usize, opts: &EigenOptions) -> Result<EigenPairs> {
    let (stiff, mass) = assemble(mesh);
    let fixed = match bc {
        CapCondition::Dirichlet => mesh.boundary_nodes(None),
        CapCondition::Neumann => Vec::new(),
        CapCondition::FromFaces => mesh.boundary_nodes(Some(BoundaryCondition::Dirichlet)),
    };
    let mut is_fixed = vec![false; mesh.vertices.len()];
    fixed.iter().for_each(|&i| is_fixed[i] = true);
    let free: Vec<usize> = (0..mesh.vertices.len()).filter(|&i| !is_fixed[i]).collect();
    let (ks, ms) = (stiff.restrict(&free), mass.restrict(&free));
    let mut pairs = lowest_eigenpairs(&ks, &ms, k, opts)?;
    // back to full vertex numbering, zero on fixed nodes
    for vec in &mut pairs.vectors {
        let mut full = vec![0.0; mesh.vertices.len()];
        for (p, &i) in free.iter().enumerate() {
            full[i] = vec[p];
        }
        *vec = full;
    }
    Ok(pairs)
}

/// `lambda = -1/2 + sqrt(mu + 1/4)`.
pub fn corner_limit_exponent(mu: f64) -> Result<f64> {
    if !(mu >= 0.0) {
        return Err(Error::InvalidParameter(format!("eigenvalue {mu} is negative")));
    }
    Ok(-0.5 + (mu + 0.25).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub value: f64,
    pub error: f64,
    /// Observed convergence rate in powers of the mesh size.
    pub rate: f64,
    pub monotone: bool,
}

/// Richardson extrapolation from values on meshes of size `h, h/2, h/4, ...`,
/// using the last three levels.
pub fn richardson(values: &[f64]) -> Result<Extrapolation> {
    let n = values.len();
    if n < 3 {
        return Err(Error::InvalidParameter("extrapolation needs three levels".into()));
    }
    let (a, b, c) = (values[n - 3], values[n - 2], values[n - 1]);
    let monotone = values.windows(2).all(|w| w[1] <= w[0]) || values.windows(2).all(|w| w[1] >= w[0]);
    let (d1, d2) = (a - b, b - c);
    let rate = if d1 * d2 > 0.0 && d2 != 0.0 { (d1 / d2).log2().clamp(0.5, 4.0) } else { 2.0 };
    let value = c - d2 / (2f64.powf(rate) - 1.0);
    Ok(Extrapolation { value, error: (value - c).abs(), rate, monotone })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub h: f64,
    pub vertices: usize,
    pub triangles: usize,
    pub eigenvalues: Vec<f64>,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub levels: Vec<LevelResult>,
    /// One extrapolation per requested eigenvalue.
    pub extrapolated: Vec<Extrapolation>,
}

/// Eigenvalues on meshes built by `build(h)` for `h = h0, h0/2, ...`, extrapolated.
pub fn refinement_study(
    build: impl Fn(f64) -> Result<SphericalCapMesh>,
    bc: CapCondition,
    k: usize,
    h0: f64,
    levels: usize,
    opts: &EigenOptions,
) -> Result<EigenResult> {
    if levels < 3 {
        return Err(Error::InvalidParameter("a refinement study needs at least 3 levels".into()));
    }
    let mut out = Vec::new();
    for l in 0..levels {
        let h = h0 * 0.5f64.powi(l as i32);
        let mesh = build(h)?;
        let pairs = laplace_beltrami_eigs(&mesh, bc, k, opts)?;
        out.push(LevelResult {
            h,
            vertices: mesh.vertices.len(),
            triangles: mesh.triangles.len(),
            eigenvalues: pairs.values,
            iterations: pairs.iterations,
        });
    }
    let extrapolated = (0..k)
        .map(|i| richardson(&out.iter().map(|l| l.eigenvalues[i]).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    Ok(EigenResult { levels: out, extrapolated })
}

/// Dirichlet or Neumann corner exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentKind {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub h0: f64,
    pub levels: usize,
    pub cap: CapOptions,
    pub eigen: EigenOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { h0: 0.2, levels: 3, cap: CapOptions::default(), eigen: EigenOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub corner: usize,
    pub kind: ExponentKind,
    pub lambda: f64,
    pub error: f64,
    /// The eigenvalue used: the first for Dirichlet, the second for Neumann.
    pub mu: f64,
    pub study: EigenResult,
}

/// Refinement study on the cap of `corner` and the extrapolated exponent.
pub fn corner_exponent_pipeline(geom: &Geometry, corner: usize, kind: ExponentKind, opts: &PipelineOptions) -> Result<ExponentEstimate> {
    let poly = geom.as_polyhedron()?;
    let (bc, index) = match kind {
        ExponentKind::Dirichlet => (CapCondition::Dirichlet, 0),
        ExponentKind::Neumann => (CapCondition::Neumann, 1),
    };
    let study = refinement_study(
        |h| SphericalCapMesh::for_corner(poly, corner, h, &opts.cap),
        bc,
        index + 1,
        opts.h0,
        opts.levels,
        &opts.eigen,
    )?;
    let ex = &study.extrapolated[index];
    let mu = ex.value.max(0.0);
    let lambda = corner_limit_exponent(mu)?;
    let lo = corner_limit_exponent((mu - ex.error).max(0.0))?;
    let hi = corner_limit_exponent(mu + ex.error)?;
    Ok(ExponentEstimate { corner, kind, lambda, error: (hi - lo) / 2.0, mu, study })
}
