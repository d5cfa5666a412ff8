//! Points and grids on the unit simplex, plus the constants shared by the
//! estimators.

use std::fmt;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant, the mean of the standard Gumbel law.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_86;

/// Variance of the standard Gumbel law, π²/6.
pub const GUMBEL_VARIANCE: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// Membership tolerance for the simplex.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// A point of the unit simplex Δ_p, stored as barycentric weights that sum
/// to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    weights: Vec<f64>,
}

impl SimplexPoint {
    /// Builds a point from raw weights.
    ///
    /// Entries in `[-1e-12, 0)` are treated as round-off and clipped to zero,
    /// then the vector is renormalized. Anything further from the simplex is
    /// rejected.
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::NotASimplexPoint(format!(
                "need at least 2 weights, got {}",
                weights.len()
            )));
        }
        if let Some(bad) = weights
            .iter()
            .find(|w| !w.is_finite() || **w < -SIMPLEX_TOL)
        {
            return Err(Error::NotASimplexPoint(format!("entry {bad} is negative")));
        }
        let clipped: Vec<f64> = weights.iter().map(|w| w.max(0.0)).collect();
        let sum: f64 = clipped.iter().sum();
        if sum <= 0.0 || (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::NotASimplexPoint(format!(
                "weights {weights:?} sum to {sum}"
            )));
        }
        Ok(Self {
            weights: clipped.into_iter().map(|w| w / sum).collect(),
        })
    }

    /// The unit vector e_j (zero-based `j`).
    pub fn vertex(p: usize, j: usize) -> Self {
        assert!(p >= 2 && j < p, "vertex index {j} out of range for p = {p}");
        let mut weights = vec![0.0; p];
        weights[j] = 1.0;
        Self { weights }
    }

    /// The barycentre (1/p, …, 1/p).
    pub fn centroid(p: usize) -> Self {
        assert!(p >= 2, "simplex dimension must be at least 2");
        Self {
            weights: vec![1.0 / p as f64; p],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// True iff the point is exactly e_j (zero-based `j`).
    pub fn is_vertex(&self, j: usize) -> bool {
        j < self.dim()
            && self
                .weights
                .iter()
                .enumerate()
                .all(|(k, &w)| if k == j { w == 1.0 } else { w == 0.0 })
    }

    /// Index of the vertex this point coincides with, if any.
    pub fn vertex_index(&self) -> Option<usize> {
        (0..self.dim()).find(|&j| self.is_vertex(j))
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    pub(crate) fn check_dim(&self, p: usize) -> Result<()> {
        if self.dim() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for SimplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, w) in self.weights.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, ")")
    }
}

/// How a grid was generated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridDescriptor {
    /// All points with coordinates in {0, 1/m, …, 1}.
    Full { p: usize, resolution: usize },
    /// Points (t, t, 1 − 2t) for t = step, 2·step, … < 1/2.
    Line { step: f64 },
    /// An explicit list of points.
    Custom,
}

/// An ordered list of distinct simplex points of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexGrid {
    points: Vec<SimplexPoint>,
    descriptor: GridDescriptor,
}

impl SimplexGrid {
    /// The line {w ∈ Δ_3 : w1 = w2}, sampled at t = step, 2·step, … < 1/2.
    pub fn line_w1_eq_w2(step: f64) -> Result<Self> {
        if !(step > 0.0 && step < 0.5) {
            return Err(Error::InvalidStep(step));
        }
        let mut points = Vec::new();
        let mut k = 1usize;
        loop {
            let t = k as f64 * step;
            if t >= 0.5 - SIMPLEX_TOL {
                break;
            }
            points.push(SimplexPoint::new(&[t, t, 1.0 - 2.0 * t])?);
            k += 1;
        }
        Ok(Self {
            points,
            descriptor: GridDescriptor::Line { step },
        })
    }

    /// Every point of Δ_p whose coordinates are multiples of 1/resolution,
    /// in lexicographic order of the integer coordinates.
    pub fn full(p: usize, resolution: usize) -> Result<Self> {
        if p < 2 || resolution == 0 {
            return Err(Error::InvalidGrid(format!(
                "full grid needs p >= 2 and resolution >= 1 (got p = {p}, m = {resolution})"
            )));
        }
        let mut points = Vec::new();
        let mut counts = vec![0usize; p];
        compositions(resolution, 0, &mut counts, &mut |c| {
            let w: Vec<f64> = c.iter().map(|&k| k as f64 / resolution as f64).collect();
            points.push(w);
        });
        let points = points
            .iter()
            .map(|w| SimplexPoint::new(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            points,
            descriptor: GridDescriptor::Full { p, resolution },
        })
    }

    /// A grid from explicit points; all must share a dimension and be distinct.
    pub fn from_points(points: Vec<SimplexPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("no points".into()));
        }
        let p = points[0].dim();
        for (i, pt) in points.iter().enumerate() {
            pt.check_dim(p)?;
            if points[..i].contains(pt) {
                return Err(Error::InvalidGrid(format!("duplicate point {pt}")));
            }
        }
        Ok(Self {
            points,
            descriptor: GridDescriptor::Custom,
        })
    }

    pub fn points(&self) -> &[SimplexPoint] {
        &self.points
    }

    pub fn descriptor(&self) -> GridDescriptor {
        self.descriptor
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Dimension of the points (0 for an empty grid).
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, SimplexPoint::dim)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SimplexPoint> {
        self.points.iter()
    }
}

impl<'a> IntoIterator for &'a SimplexGrid {
    type Item = &'a SimplexPoint;
    type IntoIter = std::slice::Iter<'a, SimplexPoint>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

fn compositions(remaining: usize, idx: usize, counts: &mut [usize], out: &mut impl FnMut(&[usize])) {
    if idx + 1 == counts.len() {
        counts[idx] = remaining;
        out(counts);
        return;
    }
    for k in 0..=remaining {
        counts[idx] = k;
        compositions(remaining - k, idx + 1, counts, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    #[allow(clippy::excessive_precision)]
    fn euler_gamma_digits() {
        // -Γ'(1) = 0.577215664901532860606512...
        assert!((EULER_GAMMA - 0.577_215_664_901_532_860_6).abs() < 1e-15);
        assert!((GUMBEL_VARIANCE - 1.644_934_066_848_226_4).abs() < 1e-15);
    }

    #[test]
    fn centroid_and_vertex() {
        let c = SimplexPoint::new(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!((c.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert_eq!(c.vertex_index(), None);

        let v = SimplexPoint::new(&[1.0, 0.0, 0.0]).unwrap();
        assert!(v.is_vertex(0));
        assert!(!v.is_vertex(1));
        assert_eq!(v, SimplexPoint::vertex(3, 0));
    }

    #[test]
    fn rejects_off_simplex() {
        assert!(matches!(
            SimplexPoint::new(&[0.2, 0.2, 0.7]),
            Err(Error::NotASimplexPoint(_))
        ));
        assert!(SimplexPoint::new(&[0.5]).is_err());
        assert!(SimplexPoint::new(&[1.5, -0.5]).is_err());
        assert!(SimplexPoint::new(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn clips_round_off() {
        let p = SimplexPoint::new(&[1.0 + 5e-13, -5e-13]).unwrap();
        assert_eq!(p.weights()[1], 0.0);
        assert!((p.weights()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn line_grid_quarter_step() {
        let g = SimplexGrid::line_w1_eq_w2(0.25).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.points()[0].weights(), &[0.25, 0.25, 0.5]);
    }

    #[test]
    fn line_grid_tenth_step() {
        let g = SimplexGrid::line_w1_eq_w2(0.1).unwrap();
        let ts: Vec<f64> = g.iter().map(|p| p.weights()[0]).collect();
        assert_eq!(ts.len(), 4);
        for (t, want) in ts.iter().zip([0.1, 0.2, 0.3, 0.4]) {
            assert!((t - want).abs() < 1e-12);
        }
    }

    #[test]
    fn line_grid_default_step_has_19_points() {
        assert_eq!(SimplexGrid::line_w1_eq_w2(0.025).unwrap().len(), 19);
    }

    #[test]
    fn line_grid_bad_step() {
        for s in [0.6, 0.5, 0.0, -0.1, f64::NAN] {
            assert!(matches!(
                SimplexGrid::line_w1_eq_w2(s),
                Err(Error::InvalidStep(_))
            ));
        }
    }

    #[test]
    fn full_grid_counts() {
        // C(m + p - 1, p - 1) points
        assert_eq!(SimplexGrid::full(3, 4).unwrap().len(), 15);
        assert_eq!(SimplexGrid::full(2, 4).unwrap().len(), 5);
        assert_eq!(SimplexGrid::full(4, 2).unwrap().len(), 10);
        let g = SimplexGrid::full(3, 7).unwrap();
        assert!(g.iter().filter(|p| p.vertex_index().is_some()).count() == 3);
    }

    #[test]
    fn from_points_rejects_duplicates() {
        let c = SimplexPoint::centroid(3);
        assert!(SimplexGrid::from_points(vec![c.clone(), c]).is_err());
        assert!(SimplexGrid::from_points(vec![
            SimplexPoint::centroid(3),
            SimplexPoint::centroid(2)
        ])
        .is_err());
    }

    proptest! {
        #[test]
        fn constructed_points_are_on_simplex(raw in proptest::collection::vec(0.0f64..10.0, 2..6)) {
            let s: f64 = raw.iter().sum();
            prop_assume!(s > 1e-6);
            let w: Vec<f64> = raw.iter().map(|x| x / s).collect();
            let p = SimplexPoint::new(&w).unwrap();
            prop_assert!((p.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(p.weights().iter().all(|&x| x >= 0.0));
        }

        #[test]
        fn line_grid_components_equal(step in 0.001f64..0.499) {
            let g = SimplexGrid::line_w1_eq_w2(step).unwrap();
            for p in &g {
                prop_assert_eq!(p.weights()[0].to_bits(), p.weights()[1].to_bits());
            }
        }
    }
}
