//! Search-space primitives: parameter points, box domains and experiment records.

use rand::Rng;
use thiserror::Error;

/// Errors raised when constructing or querying a [`BoxDomain`].
#[derive(Debug, Error)]
pub enum DomainError {
    #[error("domain needs at least one dimension")]
    Empty,
    #[error("dimension {dim}: lower bound {lower} exceeds upper bound {upper}")]
    InvertedBounds { dim: usize, lower: f64, upper: f64 },
    #[error("dimension {dim}: bound is not finite")]
    NonFiniteBound { dim: usize },
}

/// A point in the tunable-parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterPoint(Vec<f64>);

impl ParameterPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        ParameterPoint(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl From<Vec<f64>> for ParameterPoint {
    fn from(coords: Vec<f64>) -> Self {
        ParameterPoint(coords)
    }
}

impl From<&[f64]> for ParameterPoint {
    fn from(coords: &[f64]) -> Self {
        ParameterPoint(coords.to_vec())
    }
}

impl std::ops::Deref for ParameterPoint {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// An axis-aligned box: the product of per-dimension closed intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, DomainError> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(DomainError::Empty);
        }
        for (d, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(DomainError::NonFiniteBound { dim: d });
            }
            if lo > hi {
                return Err(DomainError::InvertedBounds { dim: d, lower: lo, upper: hi });
            }
        }
        Ok(BoxDomain { lower, upper })
    }

    /// Convenience constructor from `(lo, hi)` pairs.
    pub fn from_bounds(bounds: &[(f64, f64)]) -> Result<Self, DomainError> {
        let (lower, upper) = bounds.iter().copied().unzip();
        BoxDomain::new(lower, upper)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn span(&self, dim: usize) -> f64 {
        self.upper[dim] - self.lower[dim]
    }

    pub fn contains(&self, point: &ParameterPoint) -> bool {
        point.dim() == self.dim()
            && point
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&x, (&lo, &hi))| x >= lo && x <= hi)
    }

    /// Projects a point onto the box, coordinate by coordinate.
    pub fn clamp(&self, point: &ParameterPoint) -> ParameterPoint {
        let coords = point
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&x, (&lo, &hi))| x.clamp(lo, hi))
            .collect();
        ParameterPoint(coords)
    }

    /// `n` evenly spaced values covering dimension `dim`, endpoints included.
    pub fn linspace(&self, dim: usize, n: usize) -> Vec<f64> {
        assert!(n >= 2, "linspace needs at least two points");
        let (lo, hi) = (self.lower[dim], self.upper[dim]);
        let step = (hi - lo) / (n - 1) as f64;
        (0..n)
            .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
            .collect()
    }

    /// Draws a uniform point from the box.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> ParameterPoint {
        let coords = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| if lo == hi { lo } else { rng.random_range(lo..=hi) })
            .collect();
        ParameterPoint(coords)
    }
}

/// One completed experiment: where it ran and what was measured.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub point: ParameterPoint,
    pub objective: f64,
    pub constraints: Vec<f64>,
}

impl Observation {
    pub fn new(point: ParameterPoint, objective: f64, constraints: Vec<f64>) -> Self {
        Observation { point, objective, constraints }
    }

    /// Feasible means every constraint output is at or below zero.
    pub fn is_feasible(&self) -> bool {
        self.constraints.iter().all(|&g| g <= 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn box_rejects_bad_bounds() {
        assert!(BoxDomain::new(vec![], vec![]).is_err());
        assert!(BoxDomain::new(vec![1.0], vec![0.0]).is_err());
        assert!(BoxDomain::new(vec![f64::NAN], vec![1.0]).is_err());
        assert!(BoxDomain::new(vec![0.0], vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn contains_and_clamp() {
        let b = BoxDomain::from_bounds(&[(0.0, 1.0), (-2.0, 2.0)]).unwrap();
        assert!(b.contains(&vec![0.0, 2.0].into()));
        assert!(!b.contains(&vec![1.5, 0.0].into()));
        assert!(!b.contains(&vec![0.5].into()));
        let clamped = b.clamp(&vec![1.5, -3.0].into());
        assert_eq!(clamped.coords(), &[1.0, -2.0]);
    }

    #[test]
    fn linspace_hits_endpoints() {
        let b = BoxDomain::from_bounds(&[(-2.0, 2.0)]).unwrap();
        let xs = b.linspace(0, 5);
        assert_eq!(xs, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn samples_stay_inside() {
        let b = BoxDomain::from_bounds(&[(0.0, 1.0), (5.0, 5.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let p = b.sample(&mut rng);
            assert!(b.contains(&p));
            assert_eq!(p[1], 5.0);
        }
    }

    #[test]
    fn feasibility_is_inclusive_at_zero() {
        let obs = Observation::new(vec![0.0].into(), 1.0, vec![0.0]);
        assert!(obs.is_feasible());
        let obs = Observation::new(vec![0.0].into(), 1.0, vec![1e-12]);
        assert!(!obs.is_feasible());
    }
}
