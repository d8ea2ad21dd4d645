//! Empirical distribution functions and the Kolmogorov-Smirnov distance.

use crate::{Error, Result};

/// A distribution function that can be compared against a step function.
pub trait Cdf {
    /// `P(X <= x)`.
    fn cdf(&self, x: f64) -> f64;

    /// `P(X < x)`; equals [`Cdf::cdf`] away from atoms.
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }

    /// Locations of jumps. The supremum distance to a step function is
    /// attained at the union of both functions' jump locations.
    fn jumps(&self) -> Vec<f64>;
}

/// Right-continuous step function built from (optionally weighted) samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    values: Vec<f64>,
    heights: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        Self::weighted(samples.iter().map(|&x| (x, 1.0)))
    }

    /// Samples with nonnegative weights; heights are normalized by the total.
    pub fn weighted<I>(samples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut pairs: Vec<(f64, f64)> = samples
            .into_iter()
            .filter(|(x, w)| !x.is_nan() && *w > 0.0)
            .collect();
        if pairs.is_empty() {
            return Err(Error::EmptySample);
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = pairs.iter().map(|p| p.1).sum();

        let mut values: Vec<f64> = Vec::new();
        let mut heights: Vec<f64> = Vec::new();
        let mut acc = 0.0;
        for (x, w) in pairs {
            acc += w;
            if values.last() == Some(&x) {
                *heights.last_mut().unwrap() = acc / total;
            } else {
                values.push(x);
                heights.push(acc / total);
            }
        }
        *heights.last_mut().unwrap() = 1.0;
        Ok(EmpiricalCdf { values, heights })
    }

    /// Distinct sample values, ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `F` at each distinct value.
    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn mean(&self) -> f64 {
        let mut prev = 0.0;
        let mut sum = 0.0;
        for (x, h) in self.values.iter().zip(&self.heights) {
            sum += x * (h - prev);
            prev = *h;
        }
        sum
    }
}

impl Cdf for EmpiricalCdf {
    fn cdf(&self, x: f64) -> f64 {
        let idx = self.values.partition_point(|v| *v <= x);
        if idx == 0 {
            0.0
        } else {
            self.heights[idx - 1]
        }
    }

    fn cdf_left(&self, x: f64) -> f64 {
        let idx = self.values.partition_point(|v| *v < x);
        if idx == 0 {
            0.0
        } else {
            self.heights[idx - 1]
        }
    }

    fn jumps(&self) -> Vec<f64> {
        self.values.clone()
    }
}

/// Sup-norm distance between two distribution functions, checked on both
/// sides of every jump of either.
pub fn ks_distance(a: &dyn Cdf, b: &dyn Cdf) -> f64 {
    let mut points = a.jumps();
    points.extend(b.jumps());
    points
        .into_iter()
        .map(|x| {
            let right = (a.cdf(x) - b.cdf(x)).abs();
            let left = (a.cdf_left(x) - b.cdf_left(x)).abs();
            right.max(left)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn three_point_example() {
        let f = EmpiricalCdf::new(&[0.2, 0.5, 1.0]).unwrap();
        assert!((f.cdf(0.5) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(f.cdf(0.1), 0.0);
        assert_eq!(f.cdf(1.0), 1.0);
        assert!((f.cdf_left(0.5) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn empty_is_rejected() {
        assert_eq!(EmpiricalCdf::new(&[]), Err(Error::EmptySample));
    }

    #[test]
    fn self_distance_is_zero() {
        let f = EmpiricalCdf::new(&[0.3, 0.1, 0.1, 0.9]).unwrap();
        assert_eq!(ks_distance(&f, &f), 0.0);
    }

    #[test]
    fn shifted_atom_mass() {
        // Ten equal atoms; move one atom's 0.1 mass from 0.35 to 0.55.
        let base: Vec<f64> = (0..10).map(|i| i as f64 / 10.0 + 0.05).collect();
        let mut moved = base.clone();
        moved[3] = 0.55;
        let a = EmpiricalCdf::new(&base).unwrap();
        let b = EmpiricalCdf::new(&moved).unwrap();
        assert!((ks_distance(&a, &b) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn weights_split_mass() {
        let f = EmpiricalCdf::weighted([(1.0, 0.5), (2.0, 0.25), (3.0, 0.25)]).unwrap();
        assert!((f.cdf(1.5) - 0.5).abs() < 1e-15);
        assert!((f.mean() - 1.75).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn ecdf_is_a_cdf(xs in prop::collection::vec(-10.0f64..10.0, 1..200)) {
            let f = EmpiricalCdf::new(&xs).unwrap();
            let mut prev = 0.0;
            for w in f.heights() {
                prop_assert!(*w >= prev && *w <= 1.0);
                prev = *w;
            }
            prop_assert_eq!(f.cdf(10.0), 1.0);
            prop_assert_eq!(f.cdf(-10.0 - 1e-9), 0.0);
        }

        #[test]
        fn ks_is_symmetric_and_bounded(
            xs in prop::collection::vec(0.0f64..1.0, 1..50),
            ys in prop::collection::vec(0.0f64..1.0, 1..50),
        ) {
            let a = EmpiricalCdf::new(&xs).unwrap();
            let b = EmpiricalCdf::new(&ys).unwrap();
            let d = ks_distance(&a, &b);
            prop_assert!((0.0..=1.0).contains(&d));
            prop_assert_eq!(d, ks_distance(&b, &a));
        }
    }
}
