//! Truncated multivariate Taylor series ("jets").
//!
//! A jet of order `N` in `d <= 3` variables stores `c_alpha = d^alpha u / alpha!`
//! for `|alpha| <= N`, in graded order: total degree first, then by the trailing
//! exponents.

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

/// Number of multi-indices of total degree `<= order` in `dim` variables.
pub fn jet_len(dim: usize, order: usize) -> usize {
    match dim {
        1 => order + 1,
        2 => (order + 1) * (order + 2) / 2,
        _ => (order + 1) * (order + 2) * (order + 3) / 6,
    }
}

/// Position of a multi-index in the graded ordering.
pub fn index_of(alpha: &[usize]) -> usize {
    match alpha.len() {
        1 => alpha[0],
        2 => {
            let n = alpha[0] + alpha[1];
            n * (n + 1) / 2 + alpha[1]
        }
        _ => {
            let n = alpha[0] + alpha[1] + alpha[2];
            let s = alpha[1] + alpha[2];
            n * (n + 1) * (n + 2) / 6 + s * (s + 1) / 2 + alpha[2]
        }
    }
}

/// All multi-indices of total degree exactly `n`, in graded order.
pub fn indices_of_degree(dim: usize, n: usize) -> Vec<[usize; MAX_DIM]> {
    match dim {
        1 => vec![[n, 0, 0]],
        2 => (0..=n).map(|b| [n - b, b, 0]).collect(),
        _ => {
            let mut v = Vec::new();
            for s in 0..=n {
                for c in 0..=s {
                    v.push([n - s, s - c, c]);
                }
            }
            v
        }
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `alpha!` for a multi-index.
pub fn multi_factorial(alpha: &[usize]) -> f64 {
    alpha.iter().map(|&a| factorial(a)).product()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    dim: usize,
    order: usize,
    coef: Vec<f64>,
}

impl Jet {
    pub fn zero(dim: usize, order: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "jets support 1 to 3 variables");
        Jet { dim, order, coef: vec![0.0; jet_len(dim, order)] }
    }

    pub fn constant(dim: usize, order: usize, c: f64) -> Self {
        let mut j = Self::zero(dim, order);
        j.coef[0] = c;
        j
    }

    /// The coordinate function `x_i` expanded at a point where it equals `value`.
    pub fn variable(dim: usize, order: usize, i: usize, value: f64) -> Self {
        let mut j = Self::constant(dim, order, value);
        if order >= 1 {
            let mut alpha = [0; MAX_DIM];
            alpha[i] = 1;
            j.coef[index_of(&alpha[..dim])] = 1.0;
        }
        j
    }

    pub fn from_coefficients(dim: usize, order: usize, coef: Vec<f64>) -> Result<Self> {
        if coef.len() != jet_len(dim, order) {
            return Err(Error::InvalidParameter("jet coefficient count mismatch".into()));
        }
        Ok(Jet { dim, order, coef })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coef
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coef
    }

    pub fn value(&self) -> f64 {
        self.coef[0]
    }

    /// Taylor coefficient `d^alpha u / alpha!`.
    pub fn coef(&self, alpha: &[usize]) -> f64 {
        let n: usize = alpha.iter().sum();
        if n > self.order {
            return 0.0;
        }
        self.coef[index_of(alpha)]
    }

    /// The partial derivative `d^alpha u`.
    pub fn derivative(&self, alpha: &[usize]) -> f64 {
        self.coef(alpha) * multi_factorial(alpha)
    }

    pub fn is_zero(&self) -> bool {
        self.coef.iter().all(|&c| c == 0.0)
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        Jet { dim: self.dim, order, coef: self.coef[..jet_len(self.dim, order)].to_vec() }
    }

    pub fn add(&self, other: &Jet) -> Jet {
        let order = self.order.min(other.order);
        let n = jet_len(self.dim, order);
        Jet { dim: self.dim, order, coef: (0..n).map(|i| self.coef[i] + other.coef[i]).collect() }
    }

    pub fn add_assign(&mut self, other: &Jet) {
        let n = jet_len(self.dim, self.order.min(other.order));
        self.coef.truncate(n);
        self.order = self.order.min(other.order);
        for i in 0..n {
            self.coef[i] += other.coef[i];
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet { dim: self.dim, order: self.order, coef: self.coef.iter().map(|c| c * s).collect() }
    }

    pub fn add_constant(&self, c: f64) -> Jet {
        let mut j = self.clone();
        j.coef[0] += c;
        j
    }

    /// Truncated product.
    pub fn mul(&self, other: &Jet) -> Jet {
        let order = self.order.min(other.order);
        let mut out = Jet::zero(self.dim, order);
        let (x, y, z) = (&self.coef, &other.coef, &mut out.coef);
        match self.dim {
            1 => {
                for i in 0..=order {
                    if x[i] == 0.0 {
                        continue;
                    }
                    for j in 0..=order - i {
                        z[i + j] += x[i] * y[j];
                    }
                }
            }
            2 => {
                for n1 in 0..=order {
                    let base1 = n1 * (n1 + 1) / 2;
                    for b1 in 0..=n1 {
                        let xv = x[base1 + b1];
                        if xv == 0.0 {
                            continue;
                        }
                        for n2 in 0..=order - n1 {
                            let base2 = n2 * (n2 + 1) / 2;
                            let n = n1 + n2;
                            let base = n * (n + 1) / 2 + b1;
                            for b2 in 0..=n2 {
                                z[base + b2] += xv * y[base2 + b2];
                            }
                        }
                    }
                }
            }
            _ => {
                let t = |n: usize| n * (n + 1) * (n + 2) / 6;
                let tri = |s: usize| s * (s + 1) / 2;
                for n1 in 0..=order {
                    for s1 in 0..=n1 {
                        for c1 in 0..=s1 {
                            let xv = x[t(n1) + tri(s1) + c1];
                            if xv == 0.0 {
                                continue;
                            }
                            for n2 in 0..=order - n1 {
                                let n = n1 + n2;
                                for s2 in 0..=n2 {
                                    let s = s1 + s2;
                                    let row = t(n) + tri(s) + c1;
                                    let row2 = t(n2) + tri(s2);
                                    for c2 in 0..=s2 {
                                        z[row + c2] += xv * y[row2 + c2];
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// `f(self)` for a univariate `f` given by its Taylor coefficients
    /// `f^(k)(a) / k!` at `a = self.value()`.
    pub fn compose(&self, taylor: &[f64]) -> Jet {
        let mut h = self.clone();
        h.coef[0] = 0.0;
        let n = self.order.min(taylor.len().saturating_sub(1));
        let mut res = Jet::constant(self.dim, self.order, taylor[n]);
        for k in (0..n).rev() {
            res = res.mul(&h);
            res.coef[0] += taylor[k];
        }
        res
    }

    pub fn exp(&self) -> Jet {
        let a = self.value().exp();
        let t: Vec<f64> = (0..=self.order).map(|k| a / factorial(k)).collect();
        self.compose(&t)
    }

    /// `self^p`; requires a positive value unless `p` is a non-negative integer.
    pub fn powf(&self, p: f64) -> Jet {
        let a = self.value();
        let mut t = Vec::with_capacity(self.order + 1);
        let mut binom = 1.0;
        for k in 0..=self.order {
            t.push(binom * a.powf(p - k as f64));
            binom *= (p - k as f64) / (k as f64 + 1.0);
        }
        self.compose(&t)
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn recip(&self) -> Jet {
        let a = self.value();
        let t: Vec<f64> = (0..=self.order)
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / a.powi(k as i32 + 1))
            .collect();
        self.compose(&t)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let t: Vec<f64> = (0..=self.order)
            .map(|k| [s, c, -s, -c][k % 4] / factorial(k))
            .collect();
        self.compose(&t)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let t: Vec<f64> = (0..=self.order)
            .map(|k| [c, -s, -c, s][k % 4] / factorial(k))
            .collect();
        self.compose(&t)
    }

    /// Jet of `d u / d x_axis`, one order lower.
    pub fn partial(&self, axis: usize) -> Jet {
        let order = self.order.saturating_sub(1);
        let mut out = Jet::zero(self.dim, order);
        for n in 0..=order {
            for a in indices_of_degree(self.dim, n) {
                let mut up = a;
                up[axis] += 1;
                out.coef[index_of(&a[..self.dim])] = (up[axis] as f64) * self.coef[index_of(&up[..self.dim])];
            }
        }
        out
    }

    /// Jet of the Laplacian, two orders lower.
    pub fn laplacian(&self) -> Jet {
        let mut out = Jet::zero(self.dim, self.order.saturating_sub(2));
        for i in 0..self.dim {
            out.add_assign(&self.partial(i).partial(i));
        }
        out
    }

    /// Embeds a jet in fewer variables, listing which of the `dim` variables it uses.
    pub fn embed(&self, dim: usize, axes: &[usize]) -> Jet {
        let mut out = Jet::zero(dim, self.order);
        for n in 0..=self.order {
            for a in indices_of_degree(self.dim, n) {
                let mut b = [0; MAX_DIM];
                for (k, &ax) in axes.iter().enumerate() {
                    b[ax] = a[k];
                }
                out.coef[index_of(&b[..dim])] = self.coef[index_of(&a[..self.dim])];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_layout_is_dense() {
        for dim in 1..=3 {
            let mut seen = vec![false; jet_len(dim, 7)];
            for n in 0..=7 {
                for a in indices_of_degree(dim, n) {
                    let i = index_of(&a[..dim]);
                    assert!(!seen[i]);
                    seen[i] = true;
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn product_of_polynomials() {
        // (1 + x + y)^2 at the origin, 2D.
        let x = Jet::variable(2, 4, 0, 0.0);
        let y = Jet::variable(2, 4, 1, 0.0);
        let p = x.add(&y).add_constant(1.0);
        let q = p.mul(&p);
        assert_eq!(q.coef(&[0, 0]), 1.0);
        assert_eq!(q.coef(&[1, 1]), 2.0);
        assert_eq!(q.coef(&[2, 0]), 1.0);
        assert_eq!(q.coef(&[3, 0]), 0.0);
        // 3D: (x y z) * (x + z)
        let v: Vec<Jet> = (0..3).map(|i| Jet::variable(3, 5, i, 0.0)).collect();
        let r = v[0].mul(&v[1]).mul(&v[2]).mul(&v[0].add(&v[2]));
        assert_eq!(r.coef(&[2, 1, 1]), 1.0);
        assert_eq!(r.coef(&[1, 1, 2]), 1.0);
        assert_eq!(r.coefficients().iter().filter(|c| **c != 0.0).count(), 2);
    }

    #[test]
    fn composition_matches_closed_forms() {
        // exp(x + 2y) at (0.3, -0.1): d^alpha = 2^b exp(0.1)
        let x = Jet::variable(2, 6, 0, 0.3);
        let y = Jet::variable(2, 6, 1, -0.1);
        let e = x.add(&y.scale(2.0)).exp();
        for n in 0..=6 {
            for a in indices_of_degree(2, n) {
                let expect = 2f64.powi(a[1] as i32) * 0.1f64.exp();
                assert!((e.derivative(&a[..2]) - expect).abs() < 1e-12 * expect);
            }
        }
        // 1/x and sqrt(x) in 1D
        let t = Jet::variable(1, 5, 0, 2.0);
        let r = t.recip();
        assert!((r.derivative(&[3]) + 6.0 / 16.0).abs() < 1e-14);
        let s = t.sqrt();
        assert!((s.derivative(&[2]) + 0.25 * 2f64.powf(-1.5)).abs() < 1e-14);
        let sn = t.sin();
        assert!((sn.derivative(&[3]) + 2f64.cos()).abs() < 1e-14);
    }

    #[test]
    fn partials_and_laplacian() {
        // u = x^3 y^2 + z at (1, 2, 3)
        let v: Vec<Jet> = [1.0, 2.0, 3.0].iter().enumerate().map(|(i, &c)| Jet::variable(3, 6, i, c)).collect();
        let u = v[0].mul(&v[0]).mul(&v[0]).mul(&v[1]).mul(&v[1]).add(&v[2]);
        let ux = u.partial(0);
        assert!((ux.value() - 3.0 * 4.0).abs() < 1e-12);
        let lap = u.laplacian();
        // 6 x y^2 + 2 x^3 = 24 + 2
        assert!((lap.value() - 26.0).abs() < 1e-12);
        assert_eq!(lap.order(), 4);
    }

    #[test]
    fn embedding() {
        let t = Jet::variable(1, 4, 0, 0.5).sin();
        let e = t.embed(3, &[2]);
        assert_eq!(e.coef(&[0, 0, 3]), t.coef(&[3]));
        assert_eq!(e.coef(&[1, 0, 0]), 0.0);
    }
}
