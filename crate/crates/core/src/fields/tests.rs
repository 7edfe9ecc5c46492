use std::f64::consts::PI;
use std::sync::Arc;

use super::jet::indices_of_degree;
use super::*;
use crate::exact::Angle;
use crate::spectra2d::ProblemSpec;

fn l_singular(k: i64) -> CornerSingular {
    CornerSingular::new([0.0, 0.0], 0.0, Angle::from_radians(1.5 * PI), k, ProblemSpec::dirichlet()).unwrap()
}

/// Central difference of the exact order-(n-1) derivatives.
fn fd_check(f: &dyn Field, x: &[f64], max_order: usize, rel: f64) {
    let h = 1e-5;
    let dim = f.dim();
    for n in 1..=max_order {
        for a in indices_of_degree(dim, n) {
            let alpha = &a[..dim];
            let exact = f.derivative(x, alpha).unwrap();
            // lower one index that is positive
            let i = (0..dim).find(|&i| alpha[i] > 0).unwrap();
            let mut lower = alpha.to_vec();
            lower[i] -= 1;
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let fd = (f.derivative(&xp, &lower).unwrap() - f.derivative(&xm, &lower).unwrap()) / (2.0 * h);
            let scale = exact.abs().max(f.derivative(x, &lower).unwrap().abs()).max(1e-3);
            assert!((exact - fd).abs() <= rel * scale, "{alpha:?} at {x:?}: exact {exact} fd {fd}");
        }
    }
}

#[test]
fn corner_singular_value() {
    let u = l_singular(1);
    let th = 0.75 * PI;
    assert!((u.value(&[th.cos(), th.sin()]) - 1.0).abs() < 1e-15);
    assert_eq!(u.lambda().value(), 2.0 / 3.0);
}

#[test]
fn critical_exponent_rejected() {
    let err = CornerSingular::new([0.0, 0.0], 0.0, Angle::from_radians(1.5 * PI), 3, ProblemSpec::dirichlet());
    assert!(matches!(err, Err(crate::Error::CriticalCase(_))));
    let err = CornerSingular::new([0.0, 0.0], 0.0, Angle::from_radians(PI / 2.0), 1, ProblemSpec::dirichlet());
    assert!(matches!(err, Err(crate::Error::CriticalCase(_))));
}

#[test]
fn second_derivatives_scale_like_r_to_minus_four_thirds() {
    let u = l_singular(1);
    let th: f64 = 2.0;
    for a in [[2, 0], [1, 1], [0, 2]] {
        let near = u.derivative(&[0.1 * th.cos(), 0.1 * th.sin()], &a).unwrap();
        let far = u.derivative(&[0.2 * th.cos(), 0.2 * th.sin()], &a).unwrap();
        assert!((far / near - 2f64.powf(-4.0 / 3.0)).abs() < 1e-13);
    }
}

#[test]
fn singular_functions_are_harmonic() {
    for (w, bc, k) in [
        (1.5 * PI, ProblemSpec::dirichlet(), 1),
        (1.5 * PI, ProblemSpec::neumann(), 2),
        (2.0 * PI, ProblemSpec::dirichlet(), 1),
        (0.9, ProblemSpec::mixed(), 1),
    ] {
        let u = CornerSingular::new([0.3, -0.2], 0.4, Angle::from_radians(w), k, bc).unwrap();
        for i in 0..20 {
            let th = 0.4 + w * (i as f64 + 0.5) / 20.0;
            let r = 0.05 + 0.04 * i as f64;
            let x = [0.3 + r * th.cos(), -0.2 + r * th.sin()];
            let lap = u.jet(&x, 6).unwrap().laplacian();
            let scale = u.derivative(&x, &[2, 0]).unwrap().abs().max(1.0);
            for c in lap.coefficients() {
                assert!(c.abs() <= 1e-10 * scale * 1e3, "{c}");
            }
            assert!(lap.value().abs() <= 1e-10 * scale);
        }
    }
}

#[test]
fn boundary_conditions_hold_on_the_sides() {
    let w = 1.5 * PI;
    let dir = CornerSingular::new([0.0, 0.0], 0.3, Angle::from_radians(w), 1, ProblemSpec::dirichlet()).unwrap();
    let neu = CornerSingular::new([0.0, 0.0], 0.3, Angle::from_radians(w), 1, ProblemSpec::neumann()).unwrap();
    for r in [0.1, 0.5, 0.9] {
        for th in [0.3 + 1e-12, 0.3 + w - 1e-12] {
            let x = [r * th.cos(), r * th.sin()];
            assert!(dir.value(&x).abs() < 1e-10);
            // normal derivative: gradient dotted with the angular direction
            let g = [neu.derivative(&x, &[1, 0]).unwrap(), neu.derivative(&x, &[0, 1]).unwrap()];
            let n = [-th.sin(), th.cos()];
            assert!((g[0] * n[0] + g[1] * n[1]).abs() < 1e-10);
        }
    }
}

#[test]
fn exact_derivatives_match_finite_differences() {
    let u = l_singular(1);
    for x in [[0.3, 0.4], [-0.5, 0.2], [-0.3, -0.6], [0.7, 0.05]] {
        fd_check(&u, &x, 4, 1e-6);
    }
    let e = EdgeSingular3d::new(
        2,
        [0.0, 0.0, 0.0],
        0.0,
        Angle::from_radians(1.5 * PI),
        1,
        ProblemSpec::dirichlet(),
        AxialProfile::Sin { frequency: 1.0 },
    )
    .unwrap();
    fd_check(&e, &[0.3, -0.4, 0.2], 4, 1e-6);
    let chi = RadialCutoff::new(vec![0.0, 0.0], 0.2, 0.6).unwrap();
    fd_check(&chi, &[0.25, 0.2], 4, 1e-6);
    let p = Product(Arc::new(chi), Arc::new(u));
    fd_check(&p, &[0.1, 0.35], 4, 1e-6);
}

#[test]
fn mixed_partials_commute() {
    let u = l_singular(2);
    let x = [0.2, 0.45];
    let h = 1e-5;
    let dxy = (u.derivative(&[0.2, 0.45 + h], &[1, 0]).unwrap() - u.derivative(&[0.2, 0.45 - h], &[1, 0]).unwrap()) / (2.0 * h);
    let dyx = (u.derivative(&[0.2 + h, 0.45], &[0, 1]).unwrap() - u.derivative(&[0.2 - h, 0.45], &[0, 1]).unwrap()) / (2.0 * h);
    let exact = u.derivative(&x, &[1, 1]).unwrap();
    assert!((dxy - exact).abs() < 1e-7 * exact.abs().max(1.0));
    assert!((dyx - exact).abs() < 1e-7 * exact.abs().max(1.0));
}

#[test]
fn homogeneity() {
    let u = l_singular(1);
    let x = [-0.4, 0.3];
    for t in [1.0, 0.5, 0.1, 1e-3] {
        let lhs = u.value(&[t * x[0], t * x[1]]);
        let rhs = t.powf(2.0 / 3.0) * u.value(&x);
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
    }
}

#[test]
fn edge_field_with_constant_profile() {
    let e = EdgeSingular3d::new(
        0,
        [0.0, 0.0, 0.0],
        0.0,
        Angle::from_radians(1.5 * PI),
        1,
        ProblemSpec::dirichlet(),
        AxialProfile::Constant { value: 1.0 },
    )
    .unwrap();
    let x = [0.2, 0.3, -0.1];
    let j = e.jet(&x, 5).unwrap();
    for n in 1..=5 {
        for a in indices_of_degree(3, n) {
            if a[0] > 0 {
                assert_eq!(j.derivative(&a), 0.0);
            }
        }
    }
    // transverse derivatives scale like r_e^{lambda - |alpha_perp|}, independent of x_par
    let a = [0, 2, 1];
    let d1 = e.derivative(&[0.7, 0.2, -0.1], &a).unwrap();
    let d2 = e.derivative(&[-0.4, 0.4, -0.2], &a).unwrap();
    assert!((d2 / d1 - 2f64.powf(2.0 / 3.0 - 3.0)).abs() < 1e-12);
    assert!((e.derivative(&[5.0, 0.2, -0.1], &a).unwrap() - d1).abs() < 1e-12 * d1.abs());
}

#[test]
fn edge_field_with_sine_profile() {
    let e = EdgeSingular3d::new(
        1,
        [0.0, 0.0, 0.0],
        0.0,
        Angle::from_radians(1.5 * PI),
        1,
        ProblemSpec::dirichlet(),
        AxialProfile::Sin { frequency: 1.0 },
    )
    .unwrap();
    let x = [0.2, 0.7, -0.3];
    let u = e.value(&x);
    assert!((e.derivative(&x, &[0, 2, 0]).unwrap() + u).abs() < 1e-14);
    assert!(!e.is_harmonic());
}

#[test]
fn cutoff_basics() {
    let (r0, r1) = (0.2, 0.5);
    let chi = RadialCutoff::new(vec![0.0, 0.0], r0, r1).unwrap();
    assert_eq!(chi.value(&[r0 / 2.0, 0.0]), 1.0);
    assert_eq!(chi.value(&[0.0, 2.0 * r1]), 0.0);
    for x in [[0.05, 0.0], [0.0, 0.6], [-0.4, 0.4]] {
        let j = chi.jet(&x, 4).unwrap();
        assert!(j.coefficients()[1..].iter().all(|c| *c == 0.0));
    }
    assert!(RadialCutoff::new(vec![0.0, 0.0], 0.5, 0.5).is_err());
    assert!((chi.value(&[0.35, 0.0]) - 0.5).abs() < 1e-15);
}

#[test]
fn cutoff_slope_constant_is_frozen() {
    // sup |chi'| (r1 - r0) sampled densely; the maximum sits at the midpoint where
    // the profile slope is 2 by hand computation.
    let chi = RadialCutoff::new(vec![0.0], 1.0, 3.0).unwrap();
    let mut d: f64 = 0.0;
    for i in 0..=20000 {
        let r = 1.0 + 2.0 * i as f64 / 20000.0;
        d = d.max(chi.derivative(&[r], &[1]).unwrap().abs() * 2.0);
    }
    assert!((d - CUTOFF_SLOPE).abs() < 1e-9, "{d}");
    let chi2 = RadialCutoff::new(vec![0.0, 0.0], 0.1, 0.15).unwrap();
    for i in 0..=2000 {
        let r = 0.1 + 0.05 * i as f64 / 2000.0;
        let g = chi2.derivative(&[r, 0.0], &[1, 0]).unwrap();
        assert!(g.abs() <= CUTOFF_SLOPE / 0.05 * (1.0 + 1e-12));
    }
}

const CUTOFF_SLOPE: f64 = 2.0;

#[test]
fn manufactured_pair_properties() {
    let u: FieldRef = Arc::new(l_singular(1));
    let chi: FieldRef = Arc::new(RadialCutoff::new(vec![0.0, 0.0], 0.3, 0.7).unwrap());
    let pair = manufactured_pair(u.clone(), chi.clone()).unwrap();
    // zero near the corner and outside
    for x in [[0.1, 0.1], [-0.2, -0.1], [0.8, 0.5], [-0.9, 0.9]] {
        assert_eq!(pair.f.value(&x), 0.0);
    }
    let lap: FieldRef = Arc::new(Laplacian(Arc::new(Product(chi.clone(), u.clone()))));
    for x in [[0.4, 0.2], [-0.3, 0.35], [-0.45, -0.3], [0.5, 0.01]] {
        let f = pair.f.value(&x);
        // combinator cross-check
        assert!((lap.value(&x) - f).abs() < 1e-10 * f.abs().max(1.0));
        // Richardson-extrapolated finite-difference Laplacian of the exact gradient
        let fd_lap = |h: f64| {
            let mut s = 0.0;
            for i in 0..2 {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                let mut a = [0, 0];
                a[i] = 1;
                s += (pair.u.derivative(&xp, &a).unwrap() - pair.u.derivative(&xm, &a).unwrap()) / (2.0 * h);
            }
            s
        };
        let fd = (4.0 * fd_lap(5e-4) - fd_lap(1e-3)) / 3.0;
        assert!((fd - f).abs() < 1e-9 * f.abs().max(1.0), "{fd} vs {f}");
    }
    assert!(manufactured_pair(Arc::new(RadialCutoff::new(vec![0.0, 0.0], 0.1, 0.2).unwrap()), chi).is_err());
}

#[test]
fn membership_examples() {
    assert!(membership_oracle(2.0 / 3.0, -1.5, Space::K, 4).unwrap());
    assert!(!membership_oracle(2.0 / 3.0, -1.8, Space::K, 4).unwrap());
    assert!(membership_oracle(1.0, -1.5, Space::K, 0).is_err());
    assert!(membership_oracle(2.0 / 3.0, -2.0, Space::K, 0).is_err());
    assert!(polynomial_membership(0, -1.5, Space::B, 2).unwrap());
    assert!(!polynomial_membership(0, -1.5, Space::A, 2).unwrap());
    assert!(polynomial_membership(1, -1.5, Space::A, 2).unwrap());
}

#[test]
fn edge_audit() {
    let sin = AxialProfile::Sin { frequency: 1.0 };
    let one = AxialProfile::Constant { value: 1.0 };
    for m in 0..=8 {
        assert!(edge_exponent_audit(2.0 / 3.0, -1.5, &sin, m, true));
        assert!(edge_exponent_audit(2.0 / 3.0, -1.5, &sin, m, false));
        assert!(edge_exponent_audit(2.0 / 3.0, -1.5, &one, m, false));
        assert!(!edge_exponent_audit(2.0 / 3.0, -1.8, &sin, m, true));
    }
    // isotropic weights tame the lowest parallel orders only
    assert!(!edge_exponent_audit(2.0 / 3.0, -1.8, &sin, 2, false));
    assert!(!edge_exponent_audit(2.0 / 3.0, -1.8, &one, 2, false));
}

#[test]
fn edge_singular_at_reentrant_edges_vanishes_on_faces() {
    let fichera = crate::geometry::bundled::fichera();
    let poly = fichera.as_polyhedron().unwrap();
    let mut checked = 0;
    for e in 0..poly.edges().len() {
        if (poly.edges()[e].opening.radians() - 1.5 * PI).abs() > 1e-12 {
            continue;
        }
        let u = EdgeSingular3d::at_edge(poly, e, 1, AxialProfile::Constant { value: 1.0 }).unwrap();
        assert!((u.lambda().value() - 2.0 / 3.0).abs() < 1e-14);
        let (a, b) = poly.edge_endpoints(e);
        let mid: [f64; 3] = std::array::from_fn(|i| (a[i] + b[i]) / 2.0);
        let axis = u.axis();
        let (i, j) = ((axis + 1) % 3, (axis + 2) % 3);
        // Around the edge the field is positive exactly where the domain is, and
        // vanishes on the two faces.
        for q in 0..16 {
            let th = (q as f64 + 0.5) * PI / 8.0;
            let mut x = mid;
            x[i] += 0.05 * th.cos();
            x[j] += 0.05 * th.sin();
            let v = u.value(&x);
            if poly.contains(x) {
                assert!(v > 0.0, "edge {e} angle {th}");
            }
        }
        let faces = poly.edges()[e].faces;
        for f in faces {
            let n = poly.faces()[f].normal;
            // Direction in the face, away from the edge.
            let t: [f64; 3] = std::array::from_fn(|k| if k == axis { 1.0 } else { 0.0 });
            let d = crate::vecmath::cross3(n, t);
            for s in [-1.0, 1.0] {
                let x: [f64; 3] = std::array::from_fn(|k| mid[k] + s * 0.05 * d[k]);
                if poly.face_contains(f, x) {
                    assert!(u.value(&x).abs() < 1e-12, "edge {e} face {f}");
                }
            }
        }
        checked += 1;
    }
    assert_eq!(checked, 3);
}

#[test]
fn field_specs() {
    let l = crate::geometry::bundled::l_shape();
    let spec = parse_field_spec("corner_singular k=2 cutoff=none").unwrap();
    assert_eq!(spec.name, "corner_singular");
    let u = build_field(&spec, &l).unwrap();
    let x = [0.0, 0.5];
    let direct = l_singular(2);
    assert!((u.value(&x) - direct.value(&x)).abs() < 1e-15);
    let cut = field_from_spec("corner_singular", &l).unwrap();
    assert_eq!(cut.value(&[0.9, 0.9]), 0.0);
    assert!((cut.value(&[0.1, 0.1]) - l_singular(1).value(&[0.1, 0.1])).abs() < 1e-15);
    let p = field_from_spec("polynomial terms=2:1,0+1:0,2", &l).unwrap();
    assert!((p.value(&[3.0, 2.0]) - 10.0).abs() < 1e-14);
    let c = field_from_spec("constant value=4", &crate::geometry::bundled::cube()).unwrap();
    assert_eq!(c.dim(), 3);
    assert!(field_from_spec("corner_singular k=1 wrong=3", &l).is_err());
    assert!(field_from_spec("nonsense", &l).is_err());
    assert!(field_from_spec("corner_singular k", &l).is_err());
    assert!(field_from_spec("edge_singular", &l).is_err());
    let e = field_from_spec("edge_singular profile=sin frequency=2", &crate::geometry::bundled::fichera()).unwrap();
    assert!(!e.singularities().is_empty());
}
