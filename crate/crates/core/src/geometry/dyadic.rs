//! Dyadic coverings of corner sectors, wedges and edge-vertex cones.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Canonical region shapes, in local coordinates anchored at the corner (the edge
/// lies along the third axis for wedges and edge-vertex cones).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DyadicRegion {
    /// Plane sector `0 < theta < opening`; reference cell `1/4 < r < 1`.
    CornerSector { opening: f64 },
    /// Neighborhood of a 3D corner; reference cell `1/4 < |x| < 1`.
    CornerBall,
    /// Wedge `sector x R`; reference cell `{1/4 < |x_perp| < 1} x (-1/2, 1/2)`.
    Wedge { opening: f64 },
    /// Cone around the edge `{x3 >= 0}` at a corner; reference cell
    /// `eps/4 < r_c < eps, rho < eps`.
    EdgeVertex { eps: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DyadicCell {
    pub mu: u32,
    /// Axial translate index (wedges only).
    pub nu: Option<i64>,
}

impl DyadicCell {
    pub fn scale(&self) -> f64 {
        0.5f64.powi(self.mu as i32)
    }

    /// Offset added to the reference cell before scaling.
    pub fn shift(&self) -> [f64; 3] {
        [0.0, 0.0, self.nu.map_or(0.0, |n| n as f64 / 2.0)]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DyadicCover {
    pub region: DyadicRegion,
    pub mu_max: u32,
    pub cells: Vec<DyadicCell>,
    pub multiplicity_bound: usize,
}

pub fn dyadic_cover(region: DyadicRegion, mu_max: u32) -> Result<DyadicCover> {
    match region {
        DyadicRegion::CornerSector { opening } | DyadicRegion::Wedge { opening } => {
            if !(opening > 0.0 && opening <= TAU * (1.0 + 1e-12)) {
                return Err(Error::OpeningOutOfRange(opening));
            }
        }
        DyadicRegion::EdgeVertex { eps } => {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::InvalidParameter(format!("edge-vertex eps must lie in (0,1), got {eps}")));
            }
        }
        DyadicRegion::CornerBall => {}
    }
    let mut cells = Vec::new();
    for mu in 0..=mu_max {
        match region {
            DyadicRegion::Wedge { .. } => {
                let lim = 1i64 << (mu + 1);
                for nu in -lim + 1..lim {
                    cells.push(DyadicCell { mu, nu: Some(nu) });
                }
            }
            _ => cells.push(DyadicCell { mu, nu: None }),
        }
    }
    let multiplicity_bound = match region {
        DyadicRegion::Wedge { .. } => 12,
        _ => 3,
    };
    Ok(DyadicCover { region, mu_max, cells, multiplicity_bound })
}

/// Polar angle of `(x, y)` in `[0, 2pi)`.
fn angle(x: f64, y: f64) -> f64 {
    let a = y.atan2(x);
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

fn in_sector(x: f64, y: f64, opening: f64) -> bool {
    let a = angle(x, y);
    a > 0.0 && a < opening || (opening >= TAU && a == 0.0 && x > 0.0)
}

impl DyadicCover {
    /// Whether local point `x` (2 or 3 coordinates) lies in the reference cell.
    pub fn in_reference(&self, x: &[f64]) -> bool {
        match self.region {
            DyadicRegion::CornerSector { opening } => {
                let r = x[0].hypot(x[1]);
                r > 0.25 && r < 1.0 && in_sector(x[0], x[1], opening)
            }
            DyadicRegion::CornerBall => {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                r > 0.25 && r < 1.0
            }
            DyadicRegion::Wedge { opening } => {
                let r = x[0].hypot(x[1]);
                r > 0.25 && r < 1.0 && in_sector(x[0], x[1], opening) && x[2].abs() < 0.5
            }
            DyadicRegion::EdgeVertex { eps } => {
                let (r, rho) = edge_vertex_coords(x);
                r > eps / 4.0 && r < eps && rho < eps
            }
        }
    }

    /// Whether `x` lies in the cell `2^{-mu} (V + shift)`.
    pub fn cell_contains(&self, cell: &DyadicCell, x: &[f64]) -> bool {
        let s = cell.scale();
        let sh = cell.shift();
        let local: Vec<f64> = x.iter().enumerate().map(|(i, &v)| v / s - sh[i]).collect();
        self.in_reference(&local)
    }

    /// Whether `x` lies in the covered target region.
    pub fn target_contains(&self, x: &[f64]) -> bool {
        match self.region {
            DyadicRegion::CornerSector { opening } => {
                let r = x[0].hypot(x[1]);
                r > 0.0 && r < 1.0 && in_sector(x[0], x[1], opening)
            }
            DyadicRegion::CornerBall => {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                r > 0.0 && r < 1.0
            }
            DyadicRegion::Wedge { opening } => {
                let r = x[0].hypot(x[1]);
                r > 0.0 && r < 1.0 && in_sector(x[0], x[1], opening) && x[2].abs() < 1.0
            }
            DyadicRegion::EdgeVertex { eps } => {
                let (r, rho) = edge_vertex_coords(x);
                r > 0.0 && r < eps && rho < eps
            }
        }
    }

    /// Distance from the singular set that the cover resolves: `r` for corners and
    /// edge-vertex cones, `|x_perp|` for wedges.
    pub fn radial(&self, x: &[f64]) -> f64 {
        match self.region {
            DyadicRegion::CornerSector { .. } | DyadicRegion::Wedge { .. } => x[0].hypot(x[1]),
            _ => (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt(),
        }
    }

    /// Number of cells containing `x`.
    pub fn multiplicity(&self, x: &[f64]) -> usize {
        self.cells.iter().filter(|c| self.cell_contains(c, x)).count()
    }

    /// Inner and outer radius of a cell in the resolved radial variable.
    pub fn cell_radii(&self, cell: &DyadicCell) -> (f64, f64) {
        let s = cell.scale();
        match self.region {
            DyadicRegion::EdgeVertex { eps } => (s * eps / 4.0, s * eps),
            _ => (s / 4.0, s),
        }
    }

    /// Samples the target region and reports coverage (above the finest resolved
    /// radius) and the largest multiplicity seen.
    pub fn check_sampled(&self, samples: usize, seed: u64) -> CoverCheck {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = match self.region {
            DyadicRegion::CornerSector { .. } => 2,
            _ => 3,
        };
        let outer = match self.region {
            DyadicRegion::EdgeVertex { eps } => eps,
            _ => 1.0,
        };
        let floor = self.cell_radii(&DyadicCell { mu: self.mu_max, nu: None }).0;
        let mut report = CoverCheck { samples: 0, uncovered: 0, max_multiplicity: 0 };
        let mut tries = 0;
        while report.samples < samples && tries < samples * 200 {
            tries += 1;
            // Log-uniform radius so that every scale gets samples.
            let r = floor * (outer / floor).powf(rng.random::<f64>());
            let x: Vec<f64> = match self.region {
                DyadicRegion::Wedge { .. } => {
                    let t = rng.random::<f64>() * TAU;
                    vec![r * t.cos(), r * t.sin(), rng.random_range(-1.0..1.0)]
                }
                _ => {
                    let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                    if n < 1e-3 {
                        continue;
                    }
                    v.iter_mut().for_each(|a| *a *= r / n);
                    v
                }
            };
            if !self.target_contains(&x) || self.radial(&x) <= floor {
                continue;
            }
            report.samples += 1;
            let m = self.multiplicity(&x);
            if m == 0 {
                report.uncovered += 1;
            }
            report.max_multiplicity = report.max_multiplicity.max(m);
        }
        report
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CoverCheck {
    pub samples: usize,
    pub uncovered: usize,
    pub max_multiplicity: usize,
}

/// `(r_c, rho)` for the model edge `{x3 >= 0}` emanating from the origin.
fn edge_vertex_coords(x: &[f64]) -> (f64, f64) {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let r_e = if x[2] >= 0.0 { x[0].hypot(x[1]) } else { r };
    (r, if r > 0.0 { r_e / r } else { 0.0 })
}
