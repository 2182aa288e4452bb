//! Nerves of equal-radius ball covers of a point cloud.
//!
//! An index set `J` is a face at radius `r` when the balls `B_i(r)`, `i ∈ J`,
//! share a point, which happens exactly when the smallest ball enclosing
//! `{z_i : i ∈ J}` has radius at most `r`.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::hierarchy::is_decomposable;
use crate::simplicial::{SimplicialComplex, VertexSet, MAX_VERTICES};
use crate::{Error, Result};

/// Largest face dimension ever tested.
pub const MAX_NERVE_DIM: usize = 8;

/// Slack added to the radius in face tests.
pub const FACE_TOLERANCE: f64 = 1e-9;

/// Points `z_1..z_p` in `ℝ^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    d: usize,
    points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let first = points.first().ok_or_else(|| Error::InvalidInput("point cloud is empty".into()))?;
        let d = first.len();
        if d == 0 {
            return Err(Error::InvalidInput("points need at least one coordinate".into()));
        }
        if points.len() > MAX_VERTICES {
            return Err(Error::TooManyVertices { p: points.len(), max: MAX_VERTICES });
        }
        for pt in &points {
            if pt.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: pt.len() });
            }
            if pt.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("point has non-finite coordinates".into()));
            }
        }
        Ok(PointCloud { d, points })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// The points with labels in `set` (labels are 1-based).
    pub fn subset(&self, set: VertexSet) -> Vec<&[f64]> {
        set.iter().map(|i| self.points[i - 1].as_slice()).collect()
    }
}

/// A closed Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    fn contains(&self, x: &[f64]) -> bool {
        distance(&self.center, x) <= self.radius * (1.0 + 1e-12) + 1e-12
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// The smallest ball with every point of `boundary` on its sphere, centred in
/// their affine hull. `None` for an empty boundary.
fn circumball(boundary: &[&[f64]]) -> Option<Ball> {
    let (&origin, rest) = boundary.split_first()?;
    if rest.is_empty() {
        return Some(Ball { center: origin.to_vec(), radius: 0.0 });
    }
    let m = rest.len();
    let diffs: Vec<DVector<f64>> =
        rest.iter().map(|q| DVector::from_iterator(origin.len(), q.iter().zip(origin).map(|(a, b)| a - b))).collect();
    let gram = DMatrix::from_fn(m, m, |i, j| 2.0 * diffs[i].dot(&diffs[j]));
    let rhs = DVector::from_iterator(m, diffs.iter().map(|v| v.norm_squared()));
    let lambda = match gram.clone().lu().solve(&rhs) {
        Some(l) if l.iter().all(|x| x.is_finite()) => l,
        // affinely dependent boundary: least squares
        _ => gram.svd(true, true).solve(&rhs, 1e-12).ok()?,
    };
    let mut center = DVector::from_column_slice(origin);
    for (l, v) in lambda.iter().zip(&diffs) {
        center += v * *l;
    }
    let center: Vec<f64> = center.iter().copied().collect();
    let radius = boundary.iter().map(|q| distance(&center, q)).fold(0.0, f64::max);
    Some(Ball { center, radius })
}

fn welzl<'a>(points: &[&'a [f64]], boundary: &mut Vec<&'a [f64]>, d: usize) -> Option<Ball> {
    if points.is_empty() || boundary.len() == d + 1 {
        return circumball(boundary);
    }
    let (&last, rest) = points.split_last().expect("non-empty");
    let ball = welzl(rest, boundary, d);
    if ball.as_ref().is_some_and(|b| b.contains(last)) {
        return ball;
    }
    boundary.push(last);
    let ball = welzl(rest, boundary, d);
    boundary.pop();
    ball
}

/// The minimal enclosing ball, by Welzl's randomised incremental algorithm
/// over a fixed-seed shuffle (so results are reproducible).
pub fn smallest_enclosing_ball(points: &[&[f64]]) -> Result<Ball> {
    let first = points.first().ok_or_else(|| Error::InvalidInput("no points to enclose".into()))?;
    let d = first.len();
    if let Some(bad) = points.iter().find(|q| q.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad.len() });
    }
    let mut order = points.to_vec();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eb));
    let ball = welzl(&order, &mut Vec::with_capacity(d + 1), d).expect("non-empty input has a ball");
    Ok(ball)
}

fn check_radius(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("radius must be non-negative, got {r}")))
    }
}

/// The effective face-dimension limit: the request (default `p − 1`) capped
/// at `p − 1` and at [`MAX_NERVE_DIM`].
pub fn effective_max_dim(cloud: &PointCloud, max_dim: Option<usize>) -> usize {
    max_dim.unwrap_or(cloud.len() - 1).min(cloud.len() - 1).min(MAX_NERVE_DIM)
}

/// The nerve at radius `r`, built level by level: a set of size `k + 1` is
/// tested only when all its `k`-subsets are faces.
pub fn nerve_complex(cloud: &PointCloud, r: f64, max_dim: Option<usize>) -> Result<SimplicialComplex> {
    check_radius(r)?;
    let p = cloud.len();
    let top = effective_max_dim(cloud, max_dim);
    let mut faces: Vec<VertexSet> = (1..=p).map(VertexSet::singleton).collect();
    let mut level = faces.clone();
    for _ in 0..top {
        let known: std::collections::BTreeSet<VertexSet> = level.iter().copied().collect();
        let mut candidates = Vec::new();
        for (i, a) in level.iter().enumerate() {
            for b in &level[i + 1..] {
                let joined = a.union(*b);
                if joined.len() != a.len() + 1 || candidates.contains(&joined) {
                    continue;
                }
                if joined.iter().all(|v| known.contains(&joined.difference(VertexSet::singleton(v)))) {
                    candidates.push(joined);
                }
            }
        }
        let accepted: Vec<bool> = candidates
            .par_iter()
            .map(|&set| {
                let ball = smallest_enclosing_ball(&cloud.subset(set)).expect("non-empty subset");
                ball.radius <= r + FACE_TOLERANCE
            })
            .collect();
        level = candidates.into_iter().zip(accepted).filter(|(_, ok)| *ok).map(|(s, _)| s).collect();
        if level.is_empty() {
            break;
        }
        faces.extend(level.iter().copied());
    }
    SimplicialComplex::new(p, faces)
}

/// One radius of a filtration.
#[derive(Clone, Debug, PartialEq)]
pub struct FiltrationStep {
    pub radius: f64,
    pub complex: SimplicialComplex,
    pub decomposable: bool,
}

/// Nerves at strictly increasing radii, each a subcomplex of the next.
pub fn filtration(cloud: &PointCloud, radii: &[f64], max_dim: Option<usize>) -> Result<Vec<FiltrationStep>> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("filtration needs at least one radius".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("radii must be strictly increasing".into()));
    }
    radii
        .iter()
        .map(|&radius| {
            let complex = nerve_complex(cloud, radius, max_dim)?;
            let decomposable = is_decomposable(&complex);
            Ok(FiltrationStep { radius, complex, decomposable })
        })
        .collect()
}
