//! Layered quadrature: fixed Gauss rules on smooth pieces, dyadic layers with
//! ratio tests and geometric tail summation towards singular apexes and edges.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::domain::{apex_angle, Piece};
use crate::error::{Error, Result};
use crate::quadrature::{Accumulator, GaussRule};
use crate::vecmath::{cross2, sub2, P3};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Gauss points per direction and panel in 2D and along the wedge.
    pub order: usize,
    /// Gauss points per direction on 3D boxes.
    pub order_3d: usize,
    /// Radial panels per dyadic layer.
    pub radial_panels: usize,
    pub max_layers: usize,
    pub min_layers: usize,
    /// A layer ratio at or above `1 - divergence_gap` counts towards divergence.
    pub divergence_gap: f64,
    /// Consecutive high ratios that declare divergence.
    pub divergence_run: usize,
    /// Accepted change of the tail estimate between layers, relative to the total.
    pub tail_tolerance: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            order: 12,
            order_3d: 6,
            radial_panels: 2,
            max_layers: 60,
            min_layers: 3,
            divergence_gap: 1e-3,
            divergence_run: 8,
            tail_tolerance: 1e-12,
        }
    }
}

/// Integrand evaluated at a point, one value per channel.
pub(crate) trait Kernel: Sync {
    fn channels(&self) -> usize;
    /// Highest derivative order involved; sets the angular resolution.
    fn order(&self) -> usize;
    fn eval(&self, x: &[f64], out: &mut [f64]);
}

/// Outcome of one channel over one piece.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Partial {
    Value(f64),
    Diverged { ratio: f64, layer: usize },
    Unresolved { ratio: f64 },
}

/// Per-piece layer statistics.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LayerDiagnostics {
    pub layers: usize,
    /// Last layer ratio per channel (None when the layer sums vanished).
    pub tail_ratios: Vec<Option<f64>>,
}

pub(crate) struct Engine<'a, K: Kernel> {
    pub kernel: &'a K,
    pub opts: &'a QuadratureOptions,
    rule: GaussRule,
    rule_3d: GaussRule,
    pub diagnostics: std::sync::Mutex<Vec<LayerDiagnostics>>,
}

type Points = Vec<([f64; 3], f64)>;

impl<'a, K: Kernel> Engine<'a, K> {
    pub fn new(kernel: &'a K, opts: &'a QuadratureOptions) -> Self {
        Engine {
            kernel,
            opts,
            rule: GaussRule::new(opts.order),
            rule_3d: GaussRule::new(opts.order_3d),
            diagnostics: Default::default(),
        }
    }

    pub fn integrate(&self, pieces: &[Piece], dim: usize) -> Result<Vec<Partial>> {
        let parts: Vec<Vec<Partial>> = pieces.par_iter().map(|p| self.piece(p, dim)).collect::<Result<_>>()?;
        Ok(combine(&parts, self.kernel.channels()))
    }

    fn angular_panels(&self, span: f64) -> usize {
        ((span * (self.kernel.order() as f64 + 2.0) / PI).ceil() as usize).max(1)
    }

    fn sum_points(&self, pts: &Points, dim: usize) -> Vec<f64> {
        let nc = self.kernel.channels();
        let chunks: Vec<Vec<f64>> = pts
            .par_chunks(64)
            .map(|chunk| {
                let mut acc = vec![Accumulator::default(); nc];
                let mut buf = vec![0.0; nc];
                for (x, w) in chunk {
                    buf.iter_mut().for_each(|b| *b = 0.0);
                    self.kernel.eval(&x[..dim], &mut buf);
                    for (a, b) in acc.iter_mut().zip(&buf) {
                        a.add(w * b);
                    }
                }
                acc.iter().map(|a| a.value()).collect()
            })
            .collect();
        (0..nc)
            .map(|c| {
                let mut a = Accumulator::default();
                chunks.iter().for_each(|v| a.add(v[c]));
                a.value()
            })
            .collect()
    }

    fn direct(&self, pts: &Points, dim: usize) -> Vec<Partial> {
        self.sum_points(pts, dim).into_iter().map(Partial::Value).collect()
    }

    fn piece(&self, piece: &Piece, dim: usize) -> Result<Vec<Partial>> {
        match piece {
            Piece::Triangle { apex, b, c, singular } => {
                let span = apex_angle(*apex, *b, *c);
                if *singular {
                    self.layered(|mu| {
                        let s1 = 0.5f64.powi(mu as i32);
                        Ok(self.direct(&self.triangle_points(*apex, *b, *c, s1 / 2.0, s1, span), dim))
                    })
                } else {
                    Ok(self.direct(&self.triangle_points(*apex, *b, *c, 0.0, 1.0, span), dim))
                }
            }
            Piece::Sector { start, opening, radius } => self.layered(|mu| {
                let r1 = radius * 0.5f64.powi(mu as i32);
                Ok(self.direct(&self.polar_points(*start, *opening, r1 / 2.0, r1, None), dim))
            }),
            Piece::Wedge { start, opening, radius, z0, z1 } => self.layered(|mu| {
                let r1 = radius * 0.5f64.powi(mu as i32);
                Ok(self.direct(&self.polar_points(*start, *opening, r1 / 2.0, r1, Some((*z0, *z1))), dim))
            }),
            Piece::Box { lo, hi } => Ok(self.direct(&self.box_points(*lo, *hi), dim)),
            Piece::BoxEdge { lo, hi, axis, vertex } => {
                let (i, j) = ((axis + 1) % 3, (axis + 2) % 3);
                self.layered(|mu| {
                    let s = 0.5f64.powi(mu as i32);
                    let mut pts = Vec::new();
                    for (a, b) in [(0.5, 0.0), (0.0, 0.5), (0.5, 0.5)] {
                        let (blo, bhi) = sub_box(*lo, *hi, *vertex, |k| {
                            if k == i {
                                (a * s, (a + 0.5) * s)
                            } else if k == j {
                                (b * s, (b + 0.5) * s)
                            } else {
                                (0.0, 1.0)
                            }
                        });
                        pts.extend(self.box_points(blo, bhi));
                    }
                    Ok(self.direct(&pts, dim))
                })
            }
            Piece::BoxCorner { lo, hi, vertex, edges } => self.layered(|mu| {
                let s = 0.5f64.powi(mu as i32);
                let mut smooth = Vec::new();
                let mut nested = Vec::new();
                for bits in 1..8usize {
                    let on = |k: usize| (bits >> k) & 1 == 1;
                    let (blo, bhi) = sub_box(*lo, *hi, *vertex, |k| {
                        let a = if on(k) { 0.5 } else { 0.0 };
                        (a * s, (a + 0.5) * s)
                    });
                    let single = (0..3).filter(|&k| on(k)).collect::<Vec<_>>();
                    match single.as_slice() {
                        [k] if edges[*k] => {
                            let mut v = *vertex;
                            v[*k] = if vertex[*k] == lo[*k] { blo[*k] } else { bhi[*k] };
                            nested.push(Piece::BoxEdge { lo: blo, hi: bhi, axis: *k, vertex: v });
                        }
                        _ => smooth.extend(self.box_points(blo, bhi)),
                    }
                }
                let mut parts = vec![self.direct(&smooth, dim)];
                for p in &nested {
                    parts.push(self.piece(p, dim)?);
                }
                Ok(combine(&parts, self.kernel.channels()))
            }),
        }
    }

    /// Collapsed rule on `{apex + s (b + t (c - b) - apex) : s0 < s < s1, 0 < t < 1}`.
    fn triangle_points(&self, apex: [f64; 2], b: [f64; 2], c: [f64; 2], s0: f64, s1: f64, span: f64) -> Points {
        let area2 = cross2(sub2(b, apex), sub2(c, apex)).abs();
        let ss = self.rule.composite(s0, s1, self.opts.radial_panels);
        let ts = self.rule.composite(0.0, 1.0, self.angular_panels(span));
        let mut pts = Vec::with_capacity(ss.len() * ts.len());
        for &(s, ws) in &ss {
            for &(t, wt) in &ts {
                let e = [b[0] + t * (c[0] - b[0]) - apex[0], b[1] + t * (c[1] - b[1]) - apex[1]];
                pts.push(([apex[0] + s * e[0], apex[1] + s * e[1], 0.0], ws * wt * s * area2));
            }
        }
        pts
    }

    fn polar_points(&self, start: f64, opening: f64, r0: f64, r1: f64, z: Option<(f64, f64)>) -> Points {
        let rs = self.rule.composite(r0, r1, self.opts.radial_panels);
        let ts = self.rule.composite(start, start + opening, self.angular_panels(opening));
        let zs = match z {
            Some((z0, z1)) => self.rule.composite(z0, z1, self.angular_panels(z1 - z0)),
            None => vec![(0.0, 1.0)],
        };
        let mut pts = Vec::with_capacity(rs.len() * ts.len() * zs.len());
        for &(r, wr) in &rs {
            for &(t, wt) in &ts {
                let (s, c) = t.sin_cos();
                for &(zz, wz) in &zs {
                    pts.push(([r * c, r * s, zz], wr * wt * wz * r));
                }
            }
        }
        pts
    }

    fn box_points(&self, lo: P3, hi: P3) -> Points {
        let q = &self.rule_3d;
        let mut pts = Vec::with_capacity(q.len().pow(3));
        let h = [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]];
        let vol = h[0] * h[1] * h[2];
        for (x, wx) in q.nodes.iter().zip(&q.weights) {
            for (y, wy) in q.nodes.iter().zip(&q.weights) {
                for (z, wz) in q.nodes.iter().zip(&q.weights) {
                    pts.push(([lo[0] + h[0] * x, lo[1] + h[1] * y, lo[2] + h[2] * z], vol * wx * wy * wz));
                }
            }
        }
        pts
    }

    /// Sums layer contributions `A_mu` with ratio tests and a geometric tail.
    fn layered(&self, layer: impl Fn(usize) -> Result<Vec<Partial>>) -> Result<Vec<Partial>> {
        let nc = self.kernel.channels();
        let o = self.opts;
        let mut state: Vec<Option<Partial>> = vec![None; nc];
        let mut sums = vec![Accumulator::default(); nc];
        let mut prev: Vec<Option<f64>> = vec![None; nc];
        let mut ratios: Vec<Vec<f64>> = vec![Vec::new(); nc];
        let mut high = vec![0usize; nc];
        let mut zeros = vec![0usize; nc];
        let mut used = 0;
        for mu in 0..o.max_layers {
            if state.iter().all(|s| s.is_some()) {
                break;
            }
            used = mu + 1;
            let vals = layer(mu)?;
            for c in 0..nc {
                if state[c].is_some() {
                    continue;
                }
                let a = match vals[c] {
                    Partial::Value(a) => a,
                    other => {
                        state[c] = Some(other);
                        continue;
                    }
                };
                sums[c].add(a);
                let total = sums[c].value();
                if a == 0.0 {
                    zeros[c] += 1;
                    prev[c] = Some(0.0);
                    if zeros[c] >= 3 && mu + 1 >= o.min_layers {
                        state[c] = Some(Partial::Value(total));
                    }
                    continue;
                }
                zeros[c] = 0;
                if let Some(p) = prev[c].filter(|p| *p > 0.0) {
                    let q = a / p;
                    ratios[c].push(q);
                    if q >= 1.0 - o.divergence_gap {
                        high[c] += 1;
                        if high[c] >= o.divergence_run {
                            state[c] = Some(Partial::Diverged { ratio: q, layer: mu });
                            continue;
                        }
                    } else {
                        high[c] = 0;
                    }
                    let r = &ratios[c];
                    if mu + 1 >= o.min_layers && r.len() >= 2 {
                        let (q1, q0) = (r[r.len() - 1], r[r.len() - 2]);
                        if q1 < 1.0 - o.divergence_gap && q0 < 1.0 - o.divergence_gap {
                            let tail1 = a * q1 / (1.0 - q1);
                            let tail0 = a * q0 / (1.0 - q0);
                            if (tail1 - tail0).abs() <= o.tail_tolerance * (total + tail1) {
                                state[c] = Some(Partial::Value(total + tail1));
                            }
                        }
                    }
                }
                prev[c] = Some(a);
            }
        }
        self.diagnostics.lock().unwrap().push(LayerDiagnostics {
            layers: used,
            tail_ratios: ratios.iter().map(|r| r.last().copied()).collect(),
        });
        Ok(state
            .into_iter()
            .enumerate()
            .map(|(c, s)| s.unwrap_or(Partial::Unresolved { ratio: ratios[c].last().copied().unwrap_or(f64::NAN) }))
            .collect())
    }
}

/// Box spanned from `vertex` (a vertex of `[lo, hi]`) by the relative ranges `f(k)`.
fn sub_box(lo: P3, hi: P3, vertex: P3, f: impl Fn(usize) -> (f64, f64)) -> (P3, P3) {
    let mut a = [0.0; 3];
    let mut b = [0.0; 3];
    for k in 0..3 {
        let (t0, t1) = f(k);
        let (from, to) = if vertex[k] == lo[k] { (lo[k], hi[k]) } else { (hi[k], lo[k]) };
        let p0 = from + t0 * (to - from);
        let p1 = from + t1 * (to - from);
        a[k] = p0.min(p1);
        b[k] = p0.max(p1);
    }
    (a, b)
}

pub(crate) fn combine(parts: &[Vec<Partial>], nc: usize) -> Vec<Partial> {
    (0..nc)
        .map(|c| {
            let mut acc = Accumulator::default();
            let mut worst: Option<Partial> = None;
            for p in parts {
                match p[c] {
                    Partial::Value(v) => acc.add(v),
                    d @ Partial::Diverged { .. } => {
                        if !matches!(worst, Some(Partial::Diverged { .. })) {
                            worst = Some(d);
                        }
                    }
                    u @ Partial::Unresolved { .. } => {
                        if worst.is_none() {
                            worst = Some(u);
                        }
                    }
                }
            }
            worst.unwrap_or(Partial::Value(acc.value()))
        })
        .collect()
}

pub(crate) fn unresolved_error(ratio: f64) -> Error {
    Error::Quadrature(format!("layer sums did not settle (last ratio {ratio})"))
}
