//! Mellin spectra of the Laplacian at plane corners (also the transverse spectra of
//! 3D edges) and the thresholds derived from them.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Angle, Exponent, Rational};
use crate::geometry::BoundaryCondition;

/// Boundary conditions on the two sides meeting at a corner or edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub sides: [BoundaryCondition; 2],
}

impl ProblemSpec {
    pub fn new(first: BoundaryCondition, second: BoundaryCondition) -> Self {
        ProblemSpec { sides: [first, second] }
    }

    pub fn dirichlet() -> Self {
        Self::new(BoundaryCondition::Dirichlet, BoundaryCondition::Dirichlet)
    }

    pub fn neumann() -> Self {
        Self::new(BoundaryCondition::Neumann, BoundaryCondition::Neumann)
    }

    pub fn mixed() -> Self {
        Self::new(BoundaryCondition::Dirichlet, BoundaryCondition::Neumann)
    }

    pub fn kind(&self) -> SpectrumKind {
        use BoundaryCondition::*;
        match self.sides {
            [Dirichlet, Dirichlet] => SpectrumKind::DirichletDirichlet,
            [Neumann, Neumann] => SpectrumKind::NeumannNeumann,
            _ => SpectrumKind::Mixed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    DirichletDirichlet,
    NeumannNeumann,
    Mixed,
}

/// Singular exponents of the Laplacian in a sector, materialized in `[-window, window]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MellinSpectrum {
    pub kind: SpectrumKind,
    pub opening: Angle,
    pub window: f64,
    /// Strictly increasing, symmetric about 0.
    pub exponents: Vec<Exponent>,
}

/// `pi / omega`, the spacing of the Dirichlet and Neumann families.
fn spacing(opening: Angle) -> Exponent {
    opening.pi_over()
}

/// The `l`-th member of the exponent family (`l` ranges over all integers; for
/// Dirichlet `l = 0` is not a member).
fn family(kind: SpectrumKind, opening: Angle, l: i64) -> Exponent {
    let p = spacing(opening);
    match kind {
        SpectrumKind::DirichletDirichlet | SpectrumKind::NeumannNeumann => p.mul_int(l),
        SpectrumKind::Mixed => p.mul_ratio(Rational::new(2 * l + 1, 2)),
    }
}

fn check_opening(opening: Angle) -> Result<()> {
    let w = opening.radians();
    if !(w > 0.0 && w <= std::f64::consts::TAU * (1.0 + 1e-12)) {
        return Err(Error::OpeningOutOfRange(w));
    }
    Ok(())
}

pub fn corner_spectrum_laplace(opening: Angle, bc: ProblemSpec, window: f64) -> Result<MellinSpectrum> {
    check_opening(opening)?;
    if !(window > 0.0 && window.is_finite()) {
        return Err(Error::InvalidParameter(format!("window must be positive, got {window}")));
    }
    let kind = bc.kind();
    let p = spacing(opening).value();
    let lmax = (window / p).floor() as i64 + 1;
    let mut exponents: Vec<Exponent> = (-lmax - 1..=lmax)
        .filter(|&l| !(kind == SpectrumKind::DirichletDirichlet && l == 0))
        .map(|l| family(kind, opening, l))
        .filter(|e| e.value().abs() <= window)
        .collect();
    exponents.sort_by(|a, b| a.compare(b));
    Ok(MellinSpectrum { kind, opening, window, exponents })
}

impl MellinSpectrum {
    /// Smallest positive exponent: the width of the spectrum-free strip right of 0.
    pub fn b_threshold(&self) -> Result<Exponent> {
        self.exponents
            .iter()
            .find(|e| e.value() > 0.0)
            .copied()
            .ok_or(Error::WindowTooSmall { window: self.window })
    }

    /// Whether `x` is an exponent of the family, independently of the window
    /// (exact when both sides are rational, 1e-12 slack otherwise).
    pub fn contains(&self, x: Exponent) -> bool {
        let p = spacing(self.opening);
        let ratio = x.value() / p.value();
        let l = match self.kind {
            SpectrumKind::Mixed => ((ratio - 0.5).round()) as i64,
            _ => ratio.round() as i64,
        };
        if self.kind == SpectrumKind::DirichletDirichlet && l == 0 {
            return false;
        }
        family(self.kind, self.opening, l).compare(&x) == Ordering::Equal
    }
}

pub fn b_threshold(spectrum: &MellinSpectrum) -> Result<Exponent> {
    spectrum.b_threshold()
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SingularExponent {
    /// Index `k >= 1` in the family.
    pub k: i64,
    pub value: Exponent,
    /// Integer exponents carry a logarithmic term, which is not modeled.
    pub critical: bool,
}

/// Positive exponents in `(0, n + 1]`, in increasing order.
pub fn singular_exponents_up_to(opening: Angle, bc: ProblemSpec, n: u32) -> Result<Vec<SingularExponent>> {
    check_opening(opening)?;
    let kind = bc.kind();
    let top = Exponent::exact(Rational::from_integer(n as i64 + 1));
    let mut out = Vec::new();
    for k in 1.. {
        let l = match kind {
            SpectrumKind::Mixed => k - 1,
            _ => k,
        };
        let value = family(kind, opening, l);
        if value.compare(&top) == Ordering::Greater {
            break;
        }
        out.push(SingularExponent { k, value, critical: value.is_integer() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use nalgebra::DMatrix;
    use proptest::prelude::*;

    use super::*;

    fn values(s: &MellinSpectrum) -> Vec<f64> {
        s.exponents.iter().map(|e| e.value()).collect()
    }

    #[test]
    fn l_shape_dirichlet() {
        let s = corner_spectrum_laplace(Angle::from_radians(1.5 * PI), ProblemSpec::dirichlet(), 3.0).unwrap();
        let b = s.b_threshold().unwrap();
        assert_eq!(b.exact_value(), Some(Rational::new(2, 3)));
        assert!(!s.exponents.iter().any(|e| e.value() == 0.0));
    }

    #[test]
    fn half_plane_is_smooth() {
        let s = corner_spectrum_laplace(Angle::from_radians(PI), ProblemSpec::dirichlet(), 3.5).unwrap();
        assert_eq!(values(&s), vec![-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn mixed_right_angle() {
        let s = corner_spectrum_laplace(Angle::from_radians(PI / 2.0), ProblemSpec::mixed(), 4.0).unwrap();
        assert_eq!(s.b_threshold().unwrap().value(), 1.0);
        assert_eq!(values(&s), vec![-3.0, -1.0, 1.0, 3.0]);
    }

    #[test]
    fn mixed_threshold_is_pi_over_two_omega() {
        let w = 1.5 * PI;
        let s = corner_spectrum_laplace(Angle::from_radians(w), ProblemSpec::mixed(), 2.0).unwrap();
        assert!((s.b_threshold().unwrap().value() - PI / (2.0 * w)).abs() < 1e-15);
    }

    #[test]
    fn sixty_degrees_dirichlet() {
        let s = corner_spectrum_laplace(Angle::from_radians(PI / 3.0), ProblemSpec::dirichlet(), 10.0).unwrap();
        assert_eq!(s.b_threshold().unwrap().value(), 3.0);
    }

    #[test]
    fn window_too_small() {
        let s = corner_spectrum_laplace(Angle::from_radians(PI / 3.0), ProblemSpec::dirichlet(), 2.0).unwrap();
        assert!(matches!(s.b_threshold(), Err(Error::WindowTooSmall { .. })));
    }

    #[test]
    fn exponents_up_to() {
        let ex = singular_exponents_up_to(Angle::from_radians(1.5 * PI), ProblemSpec::dirichlet(), 1).unwrap();
        let v: Vec<(f64, bool)> = ex.iter().map(|e| (e.value.value(), e.critical)).collect();
        assert_eq!(v, vec![(2.0 / 3.0, false), (4.0 / 3.0, false), (2.0, true)]);
        assert!(singular_exponents_up_to(Angle::from_radians(PI / 2.0), ProblemSpec::dirichlet(), 0)
            .unwrap()
            .is_empty());
        let crack = singular_exponents_up_to(Angle::from_radians(2.0 * PI), ProblemSpec::dirichlet(), 0).unwrap();
        let v: Vec<(f64, bool)> = crack.iter().map(|e| (e.value.value(), e.critical)).collect();
        assert_eq!(v, vec![(0.5, false), (1.0, true)]);
    }

    #[test]
    fn b_times_omega_is_pi() {
        for w in [PI / 2.0, PI, 1.5 * PI, 2.0 * PI, 0.77, 2.5] {
            let s = corner_spectrum_laplace(Angle::from_radians(w), ProblemSpec::dirichlet(), 10.0).unwrap();
            assert!((s.b_threshold().unwrap().value() * w - PI).abs() <= 1e-14, "{w}");
        }
    }

    #[test]
    fn neumann_is_dirichlet_plus_zero() {
        for w in [0.4, PI / 2.0, 1.5 * PI, 2.0 * PI] {
            let a = Angle::from_radians(w);
            let d = corner_spectrum_laplace(a, ProblemSpec::dirichlet(), 6.0).unwrap();
            let n = corner_spectrum_laplace(a, ProblemSpec::neumann(), 6.0).unwrap();
            let mut dv = values(&d);
            dv.push(0.0);
            dv.sort_by(f64::total_cmp);
            assert_eq!(dv, values(&n));
        }
    }

    #[test]
    fn membership_is_window_independent() {
        let s = corner_spectrum_laplace(Angle::from_radians(PI / 2.0), ProblemSpec::dirichlet(), 1.0).unwrap();
        assert!(s.contains(Exponent::from_f64(2.0)));
        assert!(s.contains(Exponent::from_f64(40.0)));
        assert!(!s.contains(Exponent::from_f64(0.0)));
        assert!(!s.contains(Exponent::from_f64(0.5)));
        let n = corner_spectrum_laplace(Angle::from_radians(PI / 2.0), ProblemSpec::neumann(), 1.0).unwrap();
        assert!(n.contains(Exponent::from_f64(0.0)));
        let m = corner_spectrum_laplace(Angle::from_radians(PI / 2.0), ProblemSpec::mixed(), 1.0).unwrap();
        assert!(m.contains(Exponent::from_f64(-3.0)) && !m.contains(Exponent::from_f64(2.0)));
    }

    /// Eigenvalues of -phi'' on (0, w) with phi(0) = 0 and phi'(w) = 0, by second-order
    /// finite differences. The square roots are the mixed exponents.
    fn mixed_ode_exponents(w: f64, n: usize) -> Vec<f64> {
        let h = w / n as f64;
        let mut a = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = 2.0 / (h * h);
            if i + 1 < n {
                a[(i, i + 1)] = -1.0 / (h * h);
                a[(i + 1, i)] = -1.0 / (h * h);
            }
        }
        // Neumann end: half-cell mass, symmetrized.
        let s = 2f64.sqrt();
        a[(n - 1, n - 2)] = -s / (h * h);
        a[(n - 2, n - 1)] = -s / (h * h);
        let mut ev: Vec<f64> = a.symmetric_eigenvalues().iter().map(|v| v.sqrt()).collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    #[test]
    fn mixed_family_matches_ode_eigenproblem() {
        for w in [PI / 2.0, 1.2, 1.5 * PI, 2.0 * PI] {
            let ode = mixed_ode_exponents(w, 400);
            let s = corner_spectrum_laplace(Angle::from_radians(w), ProblemSpec::mixed(), 6.0).unwrap();
            let positive: Vec<f64> = values(&s).into_iter().filter(|v| *v > 0.0).take(3).collect();
            for (a, b) in positive.iter().zip(&ode) {
                assert!((a - b).abs() / a < 1e-3, "{w}: {a} vs {b}");
            }
        }
    }

    proptest! {
        #[test]
        fn spectra_are_symmetric_and_increasing(w in 0.05f64..6.28, window in 0.5f64..20.0, k in 0usize..3) {
            let bc = [ProblemSpec::dirichlet(), ProblemSpec::neumann(), ProblemSpec::mixed()][k];
            let s = corner_spectrum_laplace(Angle::from_radians(w), bc, window).unwrap();
            let v = values(&s);
            for pair in v.windows(2) {
                prop_assert!(pair[0] < pair[1]);
            }
            let n = v.len();
            for i in 0..n {
                prop_assert!((v[i] + v[n - 1 - i]).abs() < 1e-12);
            }
            prop_assert_eq!(v.contains(&0.0), k == 1);
        }
    }
}
