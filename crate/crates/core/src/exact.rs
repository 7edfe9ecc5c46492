//! Rational multiples of pi and exponents that keep an exact value when one is known.
//!
//! Openings such as `3pi/2` produce spectra like `{2/3, 4/3, ...}`. Resonance tests
//! (`-beta - 1 == k pi / omega`) are equality tests, so exponents carry an exact rational
//! alongside the float whenever the inputs allow it.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = Ratio<i64>;

/// Slack used for float comparisons when no exact value is available.
pub const FLOAT_SLACK: f64 = 1e-12;

/// Largest denominator considered when snapping a float to a rational.
pub const MAX_DENOMINATOR: i64 = 720;

/// Finds `p/q` with `q <= max_den` and `|x - p/q| <= 1e-12 * max(1, |x|)`.
pub fn snap_rational(x: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() || x.abs() > 1e9 {
        return None;
    }
    let tol = FLOAT_SLACK * x.abs().max(1.0);
    for q in 1..=max_den {
        let p = (x * q as f64).round();
        if (x - p / q as f64).abs() <= tol {
            return Some(Rational::new(p as i64, q));
        }
    }
    None
}

pub fn ratio_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn format_ratio(r: Rational) -> String {
    if *r.denom() == 1 {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_ratio(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            (q != 0).then(|| Rational::new(p, q))
        }
        None => s.parse::<i64>().ok().map(Rational::from_integer),
    }
}

/// An angle in radians, with its value as a rational multiple of pi when known.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Angle {
    radians: f64,
    pi_multiple: Option<Rational>,
}

impl Angle {
    /// Snaps to a rational multiple of pi when the float is within slack of one.
    pub fn from_radians(radians: f64) -> Self {
        let pi_multiple = snap_rational(radians / PI, MAX_DENOMINATOR);
        match pi_multiple {
            Some(r) => Angle { radians: ratio_to_f64(r) * PI, pi_multiple },
            None => Angle { radians, pi_multiple: None },
        }
    }

    pub fn pi_times(r: Rational) -> Self {
        Angle { radians: ratio_to_f64(r) * PI, pi_multiple: Some(r) }
    }

    pub fn radians(&self) -> f64 {
        self.radians
    }

    pub fn pi_multiple(&self) -> Option<Rational> {
        self.pi_multiple
    }

    /// `pi / omega` as an exponent.
    pub fn pi_over(&self) -> Exponent {
        match self.pi_multiple {
            Some(r) if *r.numer() != 0 => Exponent::exact(r.recip()),
            _ => Exponent::real(PI / self.radians),
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.radians.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Angle::from_radians(f64::deserialize(d)?))
    }
}

/// A real exponent with an optional exact rational value.
#[derive(Clone, Copy, Debug)]
pub struct Exponent {
    value: f64,
    exact: Option<Rational>,
}

impl Exponent {
    pub fn exact(r: Rational) -> Self {
        Exponent { value: ratio_to_f64(r), exact: Some(r) }
    }

    pub fn real(value: f64) -> Self {
        Exponent { value, exact: None }
    }

    /// Snaps user input such as `-1.5` or `-3` to an exact value when possible.
    pub fn from_f64(value: f64) -> Self {
        match snap_rational(value, MAX_DENOMINATOR) {
            Some(r) => Exponent::exact(r),
            None => Exponent::real(value),
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact_value(&self) -> Option<Rational> {
        self.exact
    }

    pub fn is_integer(&self) -> bool {
        match self.exact {
            Some(r) => r.is_integer(),
            None => (self.value - self.value.round()).abs() <= FLOAT_SLACK * self.value.abs().max(1.0),
        }
    }

    pub fn neg(self) -> Self {
        Exponent { value: -self.value, exact: self.exact.map(|r| -r) }
    }

    pub fn add(self, other: Exponent) -> Self {
        match (self.exact, other.exact) {
            (Some(a), Some(b)) => Exponent::exact(a + b),
            _ => Exponent::real(self.value + other.value),
        }
    }

    pub fn add_int(self, k: i64) -> Self {
        self.add(Exponent::exact(Rational::from_integer(k)))
    }

    pub fn mul_int(self, k: i64) -> Self {
        match self.exact {
            Some(r) => Exponent::exact(r * k),
            None => Exponent::real(self.value * k as f64),
        }
    }

    pub fn mul_ratio(self, r: Rational) -> Self {
        match self.exact {
            Some(e) => Exponent::exact(e * r),
            None => Exponent::real(self.value * ratio_to_f64(r)),
        }
    }

    /// Three-way comparison; exact when both sides are exact, otherwise with float slack.
    pub fn compare(&self, other: &Exponent) -> Ordering {
        if let (Some(a), Some(b)) = (self.exact, other.exact) {
            return a.cmp(&b);
        }
        let scale = self.value.abs().max(other.value.abs()).max(1.0);
        if (self.value - other.value).abs() <= FLOAT_SLACK * scale {
            Ordering::Equal
        } else if self.value < other.value {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    pub fn approx_eq(&self, other: &Exponent) -> bool {
        self.compare(other) == Ordering::Equal
    }
}

impl PartialEq for Exponent {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(r) => write!(f, "{}", format_ratio(r)),
            None => write!(f, "{}", self.value),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ExponentRepr {
    value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ExponentRepr { value: self.value, exact: self.exact.map(format_ratio) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ExponentRepr::deserialize(d)?;
        Ok(match repr.exact.as_deref().and_then(parse_ratio) {
            Some(r) => Exponent::exact(r),
            None => Exponent::real(repr.value),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snaps_common_openings() {
        let a = Angle::from_radians(1.5 * PI);
        assert_eq!(a.pi_multiple(), Some(Rational::new(3, 2)));
        assert_eq!(a.pi_over().exact_value(), Some(Rational::new(2, 3)));
        let b = Angle::from_radians(1.0);
        assert!(b.pi_multiple().is_none());
    }

    #[test]
    fn resonance_is_exact() {
        let beta = Exponent::from_f64(-3.0);
        let shifted = beta.neg().add_int(-1);
        let two = Angle::from_radians(PI / 2.0).pi_over();
        assert_eq!(shifted.compare(&two), Ordering::Equal);
        let near = Exponent::from_f64(-2.0 - 1e-6).neg().add_int(-1);
        assert_ne!(near.compare(&Exponent::exact(Rational::from_integer(1))), Ordering::Equal);
    }

    #[test]
    fn serde_keeps_exact_part() {
        let e = Exponent::exact(Rational::new(2, 3));
        let s = serde_json::to_string(&e).unwrap();
        let back: Exponent = serde_json::from_str(&s).unwrap();
        assert_eq!(back.exact_value(), Some(Rational::new(2, 3)));
    }
}
