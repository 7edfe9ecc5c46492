//! Products, sums, derivatives of fields, polynomials, and manufactured pairs.

use std::sync::Arc;

use super::jet::Jet;
use super::{Field, FieldRef, Singularity, Support};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Zero {
    pub dim: usize,
}

impl Field for Zero {
    fn dim(&self) -> usize {
        self.dim
    }

    fn max_order(&self) -> usize {
        usize::MAX
    }

    fn jet_unchecked(&self, _x: &[f64], order: usize) -> Jet {
        Jet::zero(self.dim, order)
    }

    fn support(&self) -> Support {
        Support::Empty
    }

    fn is_harmonic(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        "zero".into()
    }
}

/// `sum coefficient * x^alpha`.
#[derive(Clone, Debug)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<(Vec<usize>, f64)>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        if terms.iter().any(|(a, _)| a.len() != dim) {
            return Err(Error::InvalidParameter("monomial exponent length differs from dimension".into()));
        }
        Ok(Polynomial { dim, terms })
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Polynomial { dim, terms: vec![(vec![0; dim], c)] }
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().filter(|(_, c)| *c != 0.0).map(|(a, _)| a.iter().sum()).max().unwrap_or(0)
    }

    /// Lowest total degree among the nonzero terms.
    pub fn low_degree(&self) -> usize {
        self.terms.iter().filter(|(_, c)| *c != 0.0).map(|(a, _)| a.iter().sum()).min().unwrap_or(0)
    }
}

impl Field for Polynomial {
    fn dim(&self) -> usize {
        self.dim
    }

    fn max_order(&self) -> usize {
        usize::MAX
    }

    fn jet_unchecked(&self, x: &[f64], order: usize) -> Jet {
        let vars: Vec<Jet> = (0..self.dim).map(|i| Jet::variable(self.dim, order, i, x[i])).collect();
        let mut acc = Jet::zero(self.dim, order);
        for (alpha, c) in &self.terms {
            let mut t = Jet::constant(self.dim, order, *c);
            for (i, &p) in alpha.iter().enumerate() {
                for _ in 0..p {
                    t = t.mul(&vars[i]);
                }
            }
            acc.add_assign(&t);
        }
        acc
    }

    fn is_harmonic(&self) -> bool {
        // Checked exactly on the coefficients.
        let mut lap = std::collections::BTreeMap::<Vec<usize>, f64>::new();
        for (alpha, c) in &self.terms {
            for i in 0..self.dim {
                if alpha[i] >= 2 {
                    let mut b = alpha.clone();
                    b[i] -= 2;
                    *lap.entry(b).or_default() += c * (alpha[i] * (alpha[i] - 1)) as f64;
                }
            }
        }
        lap.values().all(|v| *v == 0.0)
    }

    fn describe(&self) -> String {
        format!("polynomial of degree {}", self.degree())
    }
}

#[derive(Clone, Debug)]
pub struct Product(pub FieldRef, pub FieldRef);

impl Field for Product {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn max_order(&self) -> usize {
        self.0.max_order().min(self.1.max_order())
    }

    fn jet_unchecked(&self, x: &[f64], order: usize) -> Jet {
        let a = self.0.jet_unchecked(x, order);
        if a.is_zero() {
            return a;
        }
        let b = self.1.jet_unchecked(x, order);
        a.mul(&b)
    }

    fn support(&self) -> Support {
        match (self.0.support(), self.1.support()) {
            (Support::Empty, _) | (_, Support::Empty) => Support::Empty,
            (Support::Everywhere, s) | (s, Support::Everywhere) => s,
            (s, _) => s,
        }
    }

    fn singularities(&self) -> Vec<Singularity> {
        let mut v = self.0.singularities();
        v.extend(self.1.singularities());
        v
    }

    fn describe(&self) -> String {
        format!("({}) * ({})", self.0.describe(), self.1.describe())
    }
}

#[derive(Clone, Debug)]
pub struct Sum(pub Vec<FieldRef>);

impl Field for Sum {
    fn dim(&self) -> usize {
        self.0[0].dim()
    }

    fn max_order(&self) -> usize {
        self.0.iter().map(|f| f.max_order()).min().unwrap_or(usize::MAX)
    }

    fn jet_unchecked(&self, x: &[f64], order: usize) -> Jet {
        let mut acc = Jet::zero(self.dim(), order);
        for f in &self.0 {
            acc.add_assign(&f.jet_unchecked(x, order));
        }
        acc
    }

    fn support(&self) -> Support {
        let supports: Vec<Support> = self.0.iter().map(|f| f.support()).filter(|s| *s != Support::Empty).collect();
        match supports.split_first() {
            None => Support::Empty,
            Some((s, rest)) if rest.iter().all(|r| r == s) => s.clone(),
            _ => Support::Everywhere,
        }
    }

    fn singularities(&self) -> Vec<Singularity> {
        self.0.iter().flat_map(|f| f.singularities()).collect()
    }

    fn is_harmonic(&self) -> bool {
        self.0.iter().all(|f| f.is_harmonic())
    }

    fn describe(&self) -> String {
        self.0.iter().map(|f| format!("({})", f.describe())).collect::<Vec<_>>().join(" + ")
    }
}

#[derive(Clone, Debug)]
pub struct Scaled(pub f64, pub FieldRef);

impl Field for Scaled {
    fn dim(&self) -> usize {
        self.1.dim()
    }

    fn max_order(&self) -> usize {
        self.1.max_order()
    }

    fn jet_unchecked(&self, x: &[f64], order: usize) -> Jet {
        self.1.jet_unchecked(x, order).scale(self.0)
    }

    fn support(&self) -> Support {
        if self.0 == 0.0 {
            Support::Empty
        } else {
            self.1.support()
        }
    }

    fn singularities(&self) -> Vec<Singularity> {
        self.1.singularities()
    }

    fn is_harmonic(&self) -> bool {
        self.1.is_harmonic()
    }

    fn describe(&self) -> String {
        format!("{} * ({})", self.0, self.1.describe())
    }
}

/// `d u / d x_axis`.
#[derive(Clone, Debug)]
pub struct Partial(pub usize, pub FieldRef);

impl Field for Partial {
    fn dim(&self) -> usize {
        self.1.dim()
    }

    fn max_order(&self) -> usize {
        self.1.max_order().saturating_sub(1)
    }

    fn jet_unchecked(&self, x: &[f64], order: usize) -> Jet {
        self.1.jet_unchecked(x, order + 1).partial(self.0)
    }

    fn support(&self) -> Support {
        self.1.support()
    }

    fn singularities(&self) -> Vec<Singularity> {
        self.1.singularities()
    }

    fn is_harmonic(&self) -> bool {
        self.1.is_harmonic()
    }

    fn describe(&self) -> String {
        format!("d/dx{} ({})", self.0, self.1.describe())
    }
}

#[derive(Clone, Debug)]
pub struct Laplacian(pub FieldRef);

impl Field for Laplacian {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn max_order(&self) -> usize {
        self.0.max_order().saturating_sub(2)
    }

    fn jet_unchecked(&self, x: &[f64], order: usize) -> Jet {
        if self.0.is_harmonic() {
            return Jet::zero(self.dim(), order);
        }
        self.0.jet_unchecked(x, order + 2).laplacian()
    }

    fn support(&self) -> Support {
        if self.0.is_harmonic() {
            Support::Empty
        } else {
            self.0.support()
        }
    }

    fn singularities(&self) -> Vec<Singularity> {
        self.0.singularities()
    }

    fn describe(&self) -> String {
        format!("Laplacian of ({})", self.0.describe())
    }
}

/// `u_tilde = chi u` and `f = Laplacian(chi u) = u Laplacian(chi) + 2 grad chi . grad u`.
#[derive(Clone, Debug)]
pub struct ManufacturedPair {
    pub u: FieldRef,
    pub f: FieldRef,
}

/// Builds the pair for a harmonic `u`. Both fields provide derivatives up to
/// `min(max orders) - 2`.
pub fn manufactured_pair(u: FieldRef, cutoff: FieldRef) -> Result<ManufacturedPair> {
    if !u.is_harmonic() {
        return Err(Error::InvalidParameter("manufactured pairs need a harmonic field".into()));
    }
    if u.dim() != cutoff.dim() {
        return Err(Error::WrongDimension { expected: u.dim(), actual: cutoff.dim() });
    }
    let m = u.max_order().min(cutoff.max_order());
    if m < 2 {
        return Err(Error::InsufficientOrder { requested: 2, available: m });
    }
    let mut terms: Vec<FieldRef> = vec![Arc::new(Product(Arc::new(Laplacian(cutoff.clone())), u.clone()))];
    for i in 0..u.dim() {
        terms.push(Arc::new(Scaled(
            2.0,
            Arc::new(Product(Arc::new(Partial(i, cutoff.clone())), Arc::new(Partial(i, u.clone())))),
        )));
    }
    let f: FieldRef = Arc::new(Truncated(Arc::new(Sum(terms)), m - 2));
    let ut: FieldRef = Arc::new(Truncated(Arc::new(Product(cutoff, u)), m - 2));
    Ok(ManufacturedPair { u: ut, f })
}

/// Caps the advertised derivative order.
#[derive(Clone, Debug)]
pub struct Truncated(pub FieldRef, pub usize);

impl Field for Truncated {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn max_order(&self) -> usize {
        self.1.min(self.0.max_order())
    }

    fn jet_unchecked(&self, x: &[f64], order: usize) -> Jet {
        self.0.jet_unchecked(x, order)
    }

    fn support(&self) -> Support {
        self.0.support()
    }

    fn singularities(&self) -> Vec<Singularity> {
        self.0.singularities()
    }

    fn is_harmonic(&self) -> bool {
        self.0.is_harmonic()
    }

    fn describe(&self) -> String {
        self.0.describe()
    }
}
