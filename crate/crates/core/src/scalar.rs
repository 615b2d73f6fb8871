//! Scalar abstraction for edge lengths and distances.
//!
//! The graph kernels are generic over the scalar: `f32`/`f64` for quick
//! experiments, `Ratio<i64>` when results must be exact. The exact rational
//! is the canonical choice for everything bundled with this crate; all ratio
//! and coefficient conditions in the boundary calculus are evaluated in it.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Num, Signed};

/// Canonical exact scalar. Edge lengths in the bundled models are small
/// rationals, so `i64` numerators are plenty.
pub type Rat = Ratio<i64>;

pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    fn from_int(n: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Exact rational representation, when one exists. Used to pick the
    /// integer distance kernel; returning `None` forces the generic kernel.
    fn to_ratio(&self) -> Option<(i64, i64)>;

    /// Total order. Panics on incomparable values (NaN); graph data is
    /// validated to be finite, so this is unreachable in practice.
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).expect("incomparable scalar values")
    }

    fn half(&self) -> Self {
        self.clone() / Self::from_int(2)
    }

    fn parse(s: &str) -> Option<Self>;

    /// Canonical display form, stable across runs; used in reports and files.
    fn render(&self) -> String {
        format!("{self}")
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a.total_cmp(&b) == Ordering::Less {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a.total_cmp(&b) == Ordering::Greater {
            b
        } else {
            a
        }
    }
}

impl Scalar for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_ratio(&self) -> Option<(i64, i64)> {
        // Only whole and half values are recognized exactly; anything else
        // goes through the generic kernel.
        for den in [1i64, 2] {
            let scaled = self * den as f64;
            if scaled.fract() == 0.0 && scaled.abs() < 2f64.powi(52) {
                return Some((scaled as i64, den));
            }
        }
        None
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }

    fn parse(s: &str) -> Option<Self> {
        f64::from_str(s).ok()
    }
}

impl Scalar for f32 {
    fn from_int(n: i64) -> Self {
        n as f32
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }

    fn to_ratio(&self) -> Option<(i64, i64)> {
        (*self as f64).to_ratio()
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        f32::total_cmp(self, other)
    }

    fn parse(s: &str) -> Option<Self> {
        f32::from_str(s).ok()
    }
}

impl Scalar for Rat {
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(n)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }

    fn to_ratio(&self) -> Option<(i64, i64)> {
        Some((*self.numer(), *self.denom()))
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        Ord::cmp(self, other)
    }

    fn parse(s: &str) -> Option<Self> {
        if let Some((n, d)) = s.split_once('/') {
            let n = i64::from_str(n.trim()).ok()?;
            let d = i64::from_str(d.trim()).ok()?;
            if d == 0 {
                return None;
            }
            Some(Ratio::new(n, d))
        } else {
            let n = i64::from_str(s.trim()).ok()?;
            Some(Ratio::from_integer(n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parse_and_render_round_trip() {
        for s in ["3", "-2", "7/2", "1/3"] {
            let v = Rat::parse(s).unwrap();
            assert_eq!(Rat::parse(&v.render()).unwrap(), v);
        }
        assert_eq!(Rat::parse("4/2").unwrap().render(), "2");
        assert!(Rat::parse("1/0").is_none());
    }

    #[test]
    fn float_ratio_detection() {
        assert_eq!(2.0f64.to_ratio(), Some((2, 1)));
        assert_eq!(0.5f64.to_ratio(), Some((1, 2)));
        assert_eq!(0.3f64.to_ratio(), None);
    }

    #[test]
    fn half_is_exact_for_rationals() {
        assert_eq!(Rat::from_int(7).half(), Rat::from_ratio(7, 2));
    }
}
