//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use cornerreg::exact::Angle;
use cornerreg::fields::{
    edge_exponent_audit, manufactured_pair, membership_oracle, AxialProfile, CornerSingular, EdgeSingular3d, FieldRef,
    Polynomial, Product, RadialCutoff, Space, Sum,
};
use cornerreg::geometry::bundled;
use cornerreg::mesher::{aniso_graded_mesh_3d, graded_mesh_2d};
use cornerreg::norms::{analytic_fit, shift_constant_check, FitOptions, NormDomain, NormEvaluator, NormKind, NormValue};
use cornerreg::spectra2d::{corner_spectrum_laplace, ProblemSpec};
use cornerreg::spherical::{corner_exponent_pipeline, ExponentKind, PipelineOptions};
use cornerreg::weights::{admissible_2d, polygon_corner_spectra, WeightMultiExponent};

const EXPONENT_TOL: f64 = 0.02;
/// Fichera reference exponents (published benchmark values).
const FICHERA_DIR: f64 = 0.45418;
const FICHERA_NEU: f64 = 0.84001;
/// `max(j / step, step / j)` over the L-shape suite below, measured once.
const FROZEN_EQUIV_C: f64 = 6.162869367106665;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// `-1/2 + sqrt(mu + 1/4)` for the spherical harmonic eigenvalue `mu = l (l + 1)`.
fn harmonic_exponent(degree: u32) -> f64 {
    let mu = f64::from(degree * (degree + 1));
    -0.5 + (mu + 0.25).sqrt()
}

fn l_singular(k: i64) -> CornerSingular {
    CornerSingular::new([0.0, 0.0], 0.0, Angle::from_radians(1.5 * PI), k, ProblemSpec::dirichlet()).unwrap()
}

fn finite(v: NormValue) -> Option<f64> {
    v.finite()
}

fn exponents(name: &str, dir_ref: f64, neu_ref: f64, budget: Duration) -> Outcome {
    let geom = bundled::bundled(name).unwrap();
    let opts = PipelineOptions::default();
    let t = Instant::now();
    let d = corner_exponent_pipeline(&geom, 0, ExponentKind::Dirichlet, &opts);
    let n = corner_exponent_pipeline(&geom, 0, ExponentKind::Neumann, &opts);
    let elapsed = t.elapsed();
    match (d, n) {
        (Ok(d), Ok(n)) => {
            let pass = (d.lambda - dir_ref).abs() <= EXPONENT_TOL
                && (n.lambda - neu_ref).abs() <= EXPONENT_TOL
                && opts.levels == 3
                && elapsed < budget;
            outcome(
                pass,
                format!(
                    "dir {:.6} (ref {dir_ref:.5}), neu {:.6} (ref {neu_ref:.5}), {:.1} s of {} s",
                    d.lambda,
                    n.lambda,
                    elapsed.as_secs_f64(),
                    budget.as_secs()
                ),
            )
        }
        (d, n) => outcome(false, format!("pipeline failed: {:?} {:?}", d.err(), n.err())),
    }
}

fn criterion_1() -> Outcome {
    // Octant harmonics: xyz (degree 3) for Dirichlet, x^2 - y^2 (degree 2) for Neumann.
    exponents("cube", harmonic_exponent(3), harmonic_exponent(2), Duration::from_secs(60))
}

fn criterion_2() -> Outcome {
    exponents("fichera", FICHERA_DIR, FICHERA_NEU, Duration::from_secs(300))
}

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    for omega in [PI / 2.0, PI, 1.5 * PI, 2.0 * PI] {
        let b = corner_spectrum_laplace(Angle::from_radians(omega), ProblemSpec::dirichlet(), 10.0)
            .and_then(|s| s.b_threshold());
        match b {
            Ok(b) => worst = worst.max((b.value() - PI / omega).abs()),
            Err(e) => return outcome(false, format!("omega {omega}: {e}")),
        }
    }
    let geom = bundled::l_shape();
    let spectra = polygon_corner_spectra(geom.as_polygon().unwrap(), 10.0).unwrap();
    let boundary = -1.0 - 2.0 / 3.0;
    let verdict = |beta: f64| {
        let w = WeightMultiExponent::uniform(&geom, beta, 0.0).unwrap();
        admissible_2d(&geom, &w, &spectra).unwrap().admissible
    };
    let inside = verdict(boundary + 1e-3);
    let outside = verdict(boundary - 1e-3);
    outcome(
        worst <= 1e-14 && inside && !outside,
        format!("max |b - pi/omega| = {worst:.1e}; beta = -5/3 +- 1e-3 admissible: {inside} / {outside}"),
    )
}

fn criterion_4() -> Outcome {
    // lambda = 2k/3 on the L-sector, k not divisible by 3.
    let ks = [1, 2, 4, 5, 7, 8, 10, 11, 13, 14];
    let mut agree = 0;
    let mut mismatches = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        let u = l_singular(k);
        let lam = u.lambda().value();
        for j in 0..10 {
            let beta = -0.55 - 0.9 * j as f64;
            let ev = NormEvaluator::uniform(NormDomain::l_sector(), beta, 0.0).unwrap();
            let m = (i + j) % 3;
            let numeric = !ev.k_seminorm(&u, m).unwrap().is_diverged();
            let oracle = membership_oracle(lam, beta, Space::K, m).unwrap();
            if numeric == oracle {
                agree += 1;
            } else {
                mismatches.push((k, beta));
            }
        }
    }
    outcome(agree == 100, format!("{agree}/100 verdicts match; mismatches {mismatches:?}"))
}

fn criterion_5() -> Outcome {
    let ev = NormEvaluator::uniform(NormDomain::l_sector(), -1.5, 0.0).unwrap();
    let seq = ev.sequence(&l_singular(1), &NormKind::K, 12).unwrap();
    let all_finite = seq.values.iter().all(|v| !v.is_diverged());
    let fit = analytic_fit(&seq, &FitOptions { windows: vec![(4, 8), (8, 12)], drift_threshold: 0.1 }).unwrap();
    let drift = fit.drift.unwrap_or(f64::INFINITY);
    let cs: Vec<String> = fit.windows.iter().map(|w| format!("{:.4}", w.c)).collect();
    outcome(
        all_finite && drift < 0.1,
        format!("orders 0..=12 finite: {all_finite}; window constants {cs:?}, drift {drift:.3e}"),
    )
}

fn criterion_6() -> Outcome {
    let ev = NormEvaluator::uniform(NormDomain::l_sector(), -1.5, 0.0).unwrap();
    let cases: [(i64, f64, f64); 3] = [(1, 0.3, 0.7), (2, 0.25, 0.8), (1, 0.5, 0.9)];
    let mut ratios = Vec::new();
    for (k, r0, r1) in cases {
        let u: FieldRef = Arc::new(l_singular(k));
        let chi: FieldRef = Arc::new(RadialCutoff::new(vec![0.0, 0.0], r0, r1).unwrap());
        let pair = manufactured_pair(u, chi).unwrap();
        match shift_constant_check(pair.u.as_ref(), pair.f.as_ref(), &ev, 12) {
            Ok(rep) => ratios.push(rep.plateau_ratio),
            Err(e) => return outcome(false, format!("pair k={k}: {e}")),
        }
    }
    let pass = ratios.iter().all(|r| *r <= 1.1);
    outcome(pass, format!("plateau ratios {ratios:.4?} (limit 1.1)"))
}

fn equivalence_suite() -> Vec<FieldRef> {
    let poly = |terms: Vec<(Vec<usize>, f64)>| -> FieldRef { Arc::new(Polynomial::new(2, terms).unwrap()) };
    let sing = |k: i64| -> FieldRef { Arc::new(l_singular(k)) };
    let mut suite: Vec<FieldRef> = vec![
        poly(vec![(vec![0, 0], 1.0)]),
        poly(vec![(vec![1, 0], 1.0)]),
        poly(vec![(vec![0, 1], -2.0), (vec![0, 0], 0.5)]),
        poly(vec![(vec![2, 0], 1.0)]),
        poly(vec![(vec![1, 1], 3.0)]),
        poly(vec![(vec![2, 0], 1.0), (vec![0, 2], -1.0)]),
        poly(vec![(vec![3, 0], 1.0), (vec![1, 2], -3.0)]),
        poly(vec![(vec![2, 1], 1.0), (vec![0, 0], 1.0)]),
        poly(vec![(vec![4, 0], 1.0), (vec![0, 3], 0.5), (vec![1, 0], -1.0)]),
        poly(vec![(vec![2, 2], 1.0), (vec![0, 1], 1.0)]),
        sing(1),
        sing(2),
        sing(4),
        sing(5),
    ];
    suite.push(Arc::new(Sum(vec![sing(1), poly(vec![(vec![0, 0], 1.0)])])));
    suite.push(Arc::new(Sum(vec![sing(2), poly(vec![(vec![1, 1], -1.0)])])));
    suite.push(Arc::new(Product(sing(1), poly(vec![(vec![1, 0], 1.0), (vec![0, 0], 1.0)]))));
    suite.push(Arc::new(Product(sing(1), Arc::new(RadialCutoff::new(vec![0.0, 0.0], 0.3, 0.7).unwrap()))));
    suite.push(Arc::new(Product(sing(4), poly(vec![(vec![0, 1], 2.0)]))));
    suite.push(Arc::new(Sum(vec![sing(1), sing(2), poly(vec![(vec![2, 0], 1.0)])])));
    suite
}

fn equivalence_constant() -> Result<f64, String> {
    let geom = bundled::l_shape();
    let ev = NormEvaluator::uniform(NormDomain::from_geometry(&geom).unwrap(), -1.5, 0.0).unwrap();
    let mut c: f64 = 1.0;
    for (i, u) in equivalence_suite().iter().enumerate() {
        for m in [2, 3] {
            let j = finite(ev.j_norm(u.as_ref(), m).map_err(|e| e.to_string())?);
            let s = finite(ev.step_weighted_norm(u.as_ref(), m).map_err(|e| e.to_string())?);
            match (j, s) {
                (Some(j), Some(s)) if j > 0.0 && s > 0.0 => c = c.max(j / s).max(s / j),
                _ => return Err(format!("field {i}, m = {m}: j {j:?}, step {s:?}")),
            }
        }
    }
    Ok(c)
}

fn criterion_7() -> Outcome {
    let (a, b) = match (equivalence_constant(), equivalence_constant()) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return outcome(false, e),
    };
    let run_drift = (a - b).abs() / a;
    let frozen_drift = (a - FROZEN_EQUIV_C).abs() / FROZEN_EQUIV_C;
    outcome(
        run_drift < 1e-9 && frozen_drift < 1e-9,
        format!("20 fields, m = 2, 3: c = {a:?} (frozen {FROZEN_EQUIV_C:?}), drift {frozen_drift:.1e}, repeat drift {run_drift:.1e}"),
    )
}

fn criterion_8() -> Outcome {
    let lam = 2.0 / 3.0;
    let beta_e = -1.5;
    let profile = AxialProfile::Sin { frequency: 1.0 };
    let dom = NormDomain::Wedge { start_angle: 0.0, opening: 1.5 * PI, radius: 1.0, z0: 0.0, z1: 1.0 };
    let ev = NormEvaluator::uniform(dom, 0.0, beta_e).unwrap();
    let u = EdgeSingular3d::new(2, [0.0; 3], 0.0, Angle::from_radians(1.5 * PI), 1, ProblemSpec::dirichlet(), profile.clone()).unwrap();
    let mut m_ok = true;
    let mut k_match = true;
    let mut k_verdicts = String::new();
    for m in 0..=8 {
        let mv = ev.m_seminorm(&u, m).unwrap();
        m_ok &= !mv.is_diverged() && edge_exponent_audit(lam, beta_e, &profile, m, true);
        let kv = !ev.k_seminorm(&u, m).unwrap().is_diverged();
        k_match &= kv == edge_exponent_audit(lam, beta_e, &profile, m, false);
        k_verdicts.push(if kv { 'F' } else { 'D' });
    }
    outcome(
        m_ok && k_match,
        format!("M finite m = 0..8: {m_ok}; K verdicts {k_verdicts} (F finite, D diverged) match audit: {k_match}"),
    )
}

fn criterion_9() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in [1, 2, 4] {
        let u = l_singular(k);
        let lam = u.lambda().value();
        for (beta, m) in [(-0.5, 0), (-1.5, 2), (-0.2, 4), (-2.5, 3)] {
            if lam <= -beta - 1.0 {
                continue;
            }
            let whole = NormEvaluator::uniform(NormDomain::l_sector(), beta, 0.0).unwrap();
            let half = NormDomain::Sector { start_angle: 0.0, opening: 1.5 * PI, radius: 0.5 };
            let half = NormEvaluator::uniform(half, beta, 0.0).unwrap();
            let (Some(a), Some(b)) = (finite(whole.k_seminorm(&u, m).unwrap()), finite(half.k_seminorm(&u, m).unwrap())) else {
                return outcome(false, format!("k = {k}, beta = {beta}, m = {m}: diverged"));
            };
            let expected = 2f64.powf(-(beta + lam + 1.0));
            worst = worst.max((b / a - expected).abs() / expected);
        }
    }
    outcome(worst <= 1e-10, format!("max relative deviation from 2^-(beta + lambda + 1): {worst:.1e}"))
}

fn criterion_10() -> Outcome {
    let mut defect: f64 = 0.0;
    for name in ["l-shape", "slit-square", "square"] {
        let geom = bundled::bundled(name).unwrap();
        let mesh = match graded_mesh_2d(&geom, 0.5, 4) {
            Ok(m) => m,
            Err(e) => return outcome(false, format!("{name}: {e}")),
        };
        for c in 0..mesh.corners.len() {
            for mu in 2..=4 {
                defect = defect.max(mesh.layer_scaling_defect(c, mu).unwrap());
            }
        }
    }
    let mut aspect_worst: f64 = 1.0;
    let mut seen = 0;
    for name in ["cube", "fichera"] {
        let geom = bundled::bundled(name).unwrap();
        let mesh = aniso_graded_mesh_3d(&geom, 0.5, 4).unwrap();
        for cell in &mesh.cells {
            let l = cell.axis_layers.unwrap();
            let graded: Vec<usize> = (0..3).filter(|&i| l[i] > 0).collect();
            // edge-layer cells: two transverse axes in the same layer, axial axis ungraded.
            // The core cells (label layers + 1) repeat the size of layer `layers`.
            if graded.len() != 2 || l[graded[0]] != l[graded[1]] || l[graded[0]] > mesh.layers {
                continue;
            }
            let axial = (0..3).find(|i| l[*i] == 0).unwrap();
            let e = mesh.extents(cell);
            let ratio = e[axial] / e[graded[0]].max(e[graded[1]]);
            let expected = 2f64.powi(l[graded[0]] as i32);
            aspect_worst = aspect_worst.max(ratio / expected).max(expected / ratio);
            seen += 1;
        }
    }
    outcome(
        defect <= 1e-9 && seen > 0 && aspect_worst <= 2.0,
        format!("2D layer scaling defect {defect:.1e}; 3D aspect off 2^mu by at most x{aspect_worst:.3} over {seen} edge cells"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("cube corner exponents", criterion_1),
        ("Fichera corner exponents", criterion_2),
        ("2D thresholds and L-shape admissibility", criterion_3),
        ("membership grid", criterion_4),
        ("analytic-class fit", criterion_5),
        ("shift-constant plateau", criterion_6),
        ("J / step-weighted equivalence", criterion_7),
        ("anisotropy discrimination", criterion_8),
        ("dyadic scaling law", criterion_9),
        ("mesh realizability", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "[{}] {:>2} {name}: {} ({:.1} s)",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/10 passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
