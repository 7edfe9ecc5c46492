use std::f64::consts::PI;
use std::sync::Arc;

use super::*;
use crate::exact::Angle;
use crate::fields::{membership_oracle, AxialProfile, CornerSingular, EdgeSingular3d, Polynomial, Space};
use crate::geometry::bundled;
use crate::spectra2d::ProblemSpec;

fn l_singular(k: i64) -> CornerSingular {
    CornerSingular::new([0.0, 0.0], 0.0, Angle::from_radians(1.5 * PI), k, ProblemSpec::dirichlet()).unwrap()
}

fn value(v: NormValue) -> f64 {
    v.finite().expect("finite value")
}

#[test]
fn constant_on_l_sector() {
    let ev = NormEvaluator::uniform(NormDomain::l_sector(), -0.5, 0.0).unwrap();
    let one = Polynomial::constant(2, 1.0);
    let v = value(ev.k_seminorm(&one, 0).unwrap());
    assert!((v - (1.5 * PI).sqrt()).abs() < 1e-12, "{v}");
}

#[test]
fn singular_diverges_below_threshold() {
    let ev = NormEvaluator::uniform(NormDomain::l_sector(), -1.8, 0.0).unwrap();
    match ev.k_seminorm(&l_singular(1), 0).unwrap() {
        NormValue::Diverged { ratio, .. } => assert!(ratio >= 1.0),
        v => panic!("{v:?}"),
    }
}

#[test]
fn unweighted_l2_on_square() {
    // unit-diameter square, beta = 0: plain L2 norm of x^2 y
    let s = 1.0 / 2f64.sqrt();
    let geom = bundled::square().transformed(|x| vec![s * x[0], s * x[1]]).unwrap();
    let dom = NormDomain::from_geometry(&geom).unwrap();
    let ev = NormEvaluator::uniform(dom, 0.0, 0.0).unwrap();
    let p = Polynomial::new(2, vec![(vec![2, 1], 1.0)]).unwrap();
    let v = value(ev.k_seminorm(&p, 0).unwrap());
    // int_0^s int_0^s x^4 y^2 = s^5/5 * s^3/3
    let exact = (s.powi(8) / 15.0).sqrt();
    assert!((v - exact).abs() < 1e-8 * exact, "{v} vs {exact}");
}

#[test]
fn j_norm_of_constant() {
    let ev = NormEvaluator::uniform(NormDomain::l_sector(), -1.5, 0.0).unwrap();
    let one = Polynomial::constant(2, 1.0);
    // weight r^{2(beta + 2)} = r: (3 pi / 2) int_0^1 r^2 dr
    let v = value(ev.j_norm(&one, 2).unwrap());
    assert!((v - (0.5 * PI).sqrt()).abs() < 1e-12);
    assert!(ev.j_norm(&one, 0).unwrap().is_diverged());
}

#[test]
fn step_weighted_requires_kappa() {
    let ev = NormEvaluator::uniform(NormDomain::l_sector(), -1.5, 0.0).unwrap();
    let one = Polynomial::constant(2, 1.0);
    assert!(matches!(ev.step_weighted_norm(&one, 1), Err(crate::Error::BelowKappa { .. })));
    // weight max(beta, 0) = 1 at alpha = 0: plain L2
    let v = value(ev.step_weighted_norm(&one, 2).unwrap());
    assert!((v - (0.75 * PI).sqrt()).abs() < 1e-12);
    // degree [-beta - 1] = 0 polynomial is finite for every m >= kappa
    for m in 2..6 {
        assert!(!ev.step_weighted_norm(&one, m).unwrap().is_diverged());
    }
}

#[test]
fn k_top_order_equals_j_top_seminorm() {
    // J_m^2 - J_{m}^2 restricted to |alpha| = m equals the K semi-norm squared
    let ev = NormEvaluator::uniform(NormDomain::l_sector(), -0.5, 0.0).unwrap();
    let u = l_singular(2);
    let k3 = value(ev.k_seminorm(&u, 3).unwrap());
    let kinds = NormKind::Flagged { corners: vec![true], edges: vec![], anisotropic: false };
    let flagged = value(ev.value(&u, &kinds, 3).unwrap());
    let full = value(ev.full_norm(&u, &NormKind::K, 3).unwrap());
    assert!((flagged - full).abs() < 1e-12 * full);
    assert!(k3 <= full);
}

#[test]
fn dilation_covariance() {
    let u = l_singular(1);
    let lam = 2.0 / 3.0;
    for (beta, m) in [(-0.5, 0), (-1.5, 2), (-0.2, 4)] {
        let w = NormEvaluator::uniform(NormDomain::l_sector(), beta, 0.0).unwrap();
        let half = NormDomain::Sector { start_angle: 0.0, opening: 1.5 * PI, radius: 0.5 };
        let h = NormEvaluator::uniform(half, beta, 0.0).unwrap();
        let a = value(w.k_seminorm(&u, m).unwrap());
        let b = value(h.k_seminorm(&u, m).unwrap());
        let expected = 2f64.powf(-(beta + lam + 1.0));
        assert!((b / a - expected).abs() < 1e-10, "{beta} {m}: {}", b / a - expected);
    }
}

#[test]
fn divergence_matches_membership_grid() {
    let ks = [1, 2, 4, 5, 7, 8, 10, 11, 13, 14];
    let mut agree = 0;
    for (i, k) in ks.iter().enumerate() {
        let u = l_singular(*k);
        let lam = u.lambda().value();
        for j in 0..10 {
            let beta = -0.55 - 0.9 * j as f64;
            let ev = NormEvaluator::uniform(NormDomain::l_sector(), beta, 0.0).unwrap();
            let m = (i + j) % 3;
            let numeric = !ev.k_seminorm(&u, m).unwrap().is_diverged();
            let oracle = membership_oracle(lam, beta, Space::K, m).unwrap();
            if numeric == oracle {
                agree += 1;
            }
        }
    }
    assert_eq!(agree, 100);
}

#[test]
fn analytic_fit_of_l_singular() {
    let ev = NormEvaluator::uniform(NormDomain::l_sector(), -1.5, 0.0).unwrap();
    let seq = ev.sequence(&l_singular(1), &NormKind::K, 12).unwrap();
    let fit = analytic_fit(&seq, &FitOptions { windows: vec![(4, 8), (8, 12)], drift_threshold: 0.1 }).unwrap();
    eprintln!("{:?}", fit);
    assert!(fit.member, "{fit:?}");
}

#[test]
fn analytic_fit_of_zero_and_divergent() {
    let ev = NormEvaluator::uniform(NormDomain::l_sector(), -1.8, 0.0).unwrap();
    let seq = ev.sequence(&l_singular(1), &NormKind::K, 6).unwrap();
    let fit = analytic_fit(&seq, &FitOptions::default()).unwrap();
    assert!(!fit.member && fit.c.is_none());
    let zero = crate::fields::Zero { dim: 2 };
    let seq = ev.sequence(&zero, &NormKind::K, 8).unwrap();
    let fit = analytic_fit(&seq, &FitOptions::default()).unwrap();
    assert!(fit.member);
    assert_eq!(fit.c, Some(0.0));
    let short = ev.sequence(&zero, &NormKind::K, 3).unwrap();
    assert!(analytic_fit(&short, &FitOptions::default()).is_err());
}

#[test]
fn wedge_edge_field() {
    let dom = NormDomain::Wedge { start_angle: 0.0, opening: 1.5 * PI, radius: 1.0, z0: 0.0, z1: 1.0 };
    let ev = NormEvaluator::uniform(dom, 0.0, -1.5).unwrap();
    let mk = |p| {
        EdgeSingular3d::new(2, [0.0, 0.0, 0.0], 0.0, Angle::from_radians(1.5 * PI), 1, ProblemSpec::dirichlet(), p).unwrap()
    };
    let flat = mk(AxialProfile::Constant { value: 1.0 });
    for m in 0..4 {
        let k = value(ev.k_seminorm(&flat, m).unwrap());
        let mm = value(ev.m_seminorm(&flat, m).unwrap());
        assert!((k - mm).abs() <= 1e-12 * k, "{m}: {k} {mm}");
    }
    let wavy = mk(AxialProfile::Sin { frequency: 1.0 });
    for m in 0..4 {
        let k = ev.k_seminorm(&wavy, m).unwrap();
        let mm = ev.m_seminorm(&wavy, m).unwrap();
        eprintln!("{m} {k:?} {mm:?}");
    }
    assert_eq!(value(ev.m_seminorm(&crate::fields::Zero { dim: 3 }, 2).unwrap()), 0.0);
}

#[test]
fn flagged_reduces_to_extremes() {
    let s = 0.5;
    let geom = bundled::square().transformed(|x| vec![s * x[0], s * x[1]]).unwrap();
    let dom = NormDomain::from_geometry(&geom).unwrap();
    let ev = NormEvaluator::uniform(dom, -0.7, 0.0).unwrap();
    let u = Polynomial::new(2, vec![(vec![1, 1], 1.0), (vec![0, 3], 2.0), (vec![0, 0], 0.5)]).unwrap();
    let m = 2;
    let all = vec![true; 4];
    let none = vec![false; 4];
    let some = vec![true, false, false, false];
    let k = value(ev.full_norm(&u, &NormKind::K, m).unwrap());
    let j = value(ev.j_norm(&u, m).unwrap());
    let f_all = value(ev.flagged_norm(&u, &all, &[], false, m).unwrap());
    let f_none = value(ev.flagged_norm(&u, &none, &[], false, m).unwrap());
    let f_some = value(ev.flagged_norm(&u, &some, &[], false, m).unwrap());
    assert!((f_all - k).abs() <= 1e-12 * k);
    assert!((f_none - j).abs() <= 1e-12 * j);
    assert!(j <= f_some && f_some <= k, "{j} {f_some} {k}");
}

#[test]
fn csv_export() {
    let ev = NormEvaluator::uniform(NormDomain::l_sector(), -1.8, 0.0).unwrap();
    let seq = ev.sequence(&Polynomial::constant(2, 1.0), &NormKind::K, 2).unwrap();
    let csv = seq.to_csv();
    assert!(csv.starts_with("m,value\n0,inf\n1,0e0\n"), "{csv}");
}

#[test]
fn shift_constants_plateau() {
    let u: crate::fields::FieldRef = Arc::new(l_singular(1));
    let chi: crate::fields::FieldRef = Arc::new(crate::fields::RadialCutoff::new(vec![0.0, 0.0], 0.3, 0.7).unwrap());
    let pair = crate::fields::manufactured_pair(u, chi).unwrap();
    let ev = NormEvaluator::uniform(NormDomain::l_sector(), -1.5, 0.0).unwrap();
    let rep = shift_constant_check(pair.u.as_ref(), pair.f.as_ref(), &ev, 12).unwrap();
    eprintln!("{:?} {}", rep.constants, rep.plateau_ratio);
    assert!(rep.bounded);
}
