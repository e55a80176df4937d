//! Point clouds in the curvature `-eps^2` plane and greedy separated nets.
//!
//! Points live in the Poincaré disk; the geodesic distance of the unit-curvature
//! disk is divided by `eps`. Each point carries `1 - |z|^2` computed from its
//! radial coordinate, so distances stay accurate near the boundary.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance applied to every distance comparison.
pub const DISTANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    eps: f64,
    points: Vec<Point>,
    one_minus_r2: Vec<f64>,
    index: HashMap<usize, usize>,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::domain(format!("curvature scale must lie in (0, 1], got {eps}")));
    }
    Ok(())
}

impl PointCloud {
    /// Builds a cloud from disk coordinates; ids must be unique and every
    /// point strictly inside the unit disk.
    pub fn new(eps: f64, points: Vec<Point>) -> Result<Self> {
        check_eps(eps)?;
        let one_minus_r2 = points
            .iter()
            .map(|p| {
                let r = p.x.hypot(p.y);
                (1.0 - r) * (1.0 + r)
            })
            .collect();
        Self::assemble(eps, points, one_minus_r2)
    }

    fn assemble(eps: f64, points: Vec<Point>, one_minus_r2: Vec<f64>) -> Result<Self> {
        let mut index = HashMap::with_capacity(points.len());
        for (i, (p, &w)) in points.iter().zip(&one_minus_r2).enumerate() {
            if !(w > 0.0 && p.x.is_finite() && p.y.is_finite()) {
                return Err(Error::domain(format!("point {} is not inside the unit disk", p.id)));
            }
            if index.insert(p.id, i).is_some() {
                return Err(Error::domain(format!("duplicate point id {}", p.id)));
            }
        }
        Ok(Self {
            eps,
            points,
            one_minus_r2,
            index,
        })
    }

    /// Points given by hyperbolic polar coordinates `(rho, theta)` in the
    /// curvature `-eps^2` metric, with ids `0..n`.
    pub fn from_polar(eps: f64, polar: &[(f64, f64)]) -> Result<Self> {
        check_eps(eps)?;
        let mut points = Vec::with_capacity(polar.len());
        let mut weights = Vec::with_capacity(polar.len());
        for (id, &(rho, theta)) in polar.iter().enumerate() {
            if !(rho >= 0.0 && rho.is_finite()) {
                return Err(Error::domain(format!("radial coordinate must be finite and >= 0, got {rho}")));
            }
            let half = 0.5 * eps * rho;
            let r = half.tanh();
            points.push(Point {
                id,
                x: r * theta.cos(),
                y: r * theta.sin(),
            });
            weights.push(1.0 / (half.cosh() * half.cosh()));
        }
        Self::assemble(eps, points, weights)
    }

    /// Points on one geodesic through the origin at signed positions `s`.
    pub fn on_geodesic(eps: f64, positions: &[f64]) -> Result<Self> {
        let polar: Vec<_> = positions
            .iter()
            .map(|&s| (s.abs(), if s < 0.0 { std::f64::consts::PI } else { 0.0 }))
            .collect();
        Self::from_polar(eps, &polar)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn position(&self, id: usize) -> Result<usize> {
        self.index.get(&id).copied().ok_or(Error::UnknownPoint(id))
    }

    /// Distance between the points at positions `i` and `j`.
    pub fn distance_at(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (p, q) = (&self.points[i], &self.points[j]);
        let gap2 = (p.x - q.x).powi(2) + (p.y - q.y).powi(2);
        let x = 2.0 * gap2 / (self.one_minus_r2[i] * self.one_minus_r2[j]);
        // acosh(1 + x) without cancellation for small x
        (x + (x * (x + 2.0)).sqrt()).ln_1p() / self.eps
    }

    /// Distance between points by id.
    pub fn distance(&self, a: usize, b: usize) -> Result<f64> {
        Ok(self.distance_at(self.position(a)?, self.position(b)?))
    }

    /// Distance from the point at position `i` to the disk centre.
    pub fn radius_at(&self, i: usize) -> f64 {
        let p = &self.points[i];
        let r = p.x.hypot(p.y);
        // 2 atanh(r) = ln((1 + r)^2 / (1 - r^2))
        2.0 * r.atanh() / self.eps
    }
}

/// Area-uniform sample of `n` points in the ball of radius `radius` about the
/// origin in the curvature `-eps^2` plane.
pub fn sample_hyperbolic_ball(eps: f64, radius: f64, n: usize, seed: u64) -> Result<PointCloud> {
    check_eps(eps)?;
    if n == 0 {
        return Err(Error::domain("sample size must be >= 1"));
    }
    if !(radius > 0.0 && eps * radius <= 20.0) {
        return Err(Error::domain(format!(
            "ball radius must lie in (0, 20/eps], got {radius}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = (0.5 * eps * radius).sinh();
    let polar: Vec<_> = (0..n)
        .map(|_| {
            // area within rho is proportional to sinh^2(eps rho / 2)
            let u: f64 = rng.gen();
            let rho = 2.0 * (u.sqrt() * top).asinh() / eps;
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            (rho, theta)
        })
        .collect();
    PointCloud::from_polar(eps, &polar)
}

/// Mean distance to the centre for the area-uniform law on a ball.
pub fn ball_mean_radius(eps: f64, radius: f64) -> f64 {
    let s = eps * radius;
    (s * s.cosh() - s.sinh()) / (s.cosh() - 1.0) / eps
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetResult {
    pub selected: Vec<usize>,
    pub r: f64,
    pub is_separated: bool,
    pub is_net: bool,
}

/// Maximal `r`-separated subset chosen greedily, scanning positions from
/// `seed_index` with wraparound.
pub fn greedy_separated_net(cloud: &PointCloud, r: f64, seed_index: usize) -> Result<NetResult> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("net radius must be positive, got {r}")));
    }
    if cloud.is_empty() {
        return Err(Error::domain("cannot build a net on an empty cloud"));
    }
    let n = cloud.len();
    let mut chosen: Vec<usize> = Vec::new();
    for k in 0..n {
        let i = (seed_index % n + k) % n;
        if chosen
            .iter()
            .all(|&j| cloud.distance_at(i, j) >= r - DISTANCE_TOL)
        {
            chosen.push(i);
        }
    }
    let selected: Vec<usize> = chosen.iter().map(|&i| cloud.points[i].id).collect();
    let (is_separated, is_net) = verify_net(cloud, &selected, r)?;
    Ok(NetResult {
        selected,
        r,
        is_separated,
        is_net,
    })
}

/// Brute-force separation and covering checks, both with [`DISTANCE_TOL`].
pub fn verify_net(cloud: &PointCloud, candidate: &[usize], r: f64) -> Result<(bool, bool)> {
    let pos = candidate
        .iter()
        .map(|&id| cloud.position(id))
        .collect::<Result<Vec<_>>>()?;
    let is_separated = pos.par_iter().enumerate().all(|(a, &i)| {
        pos[a + 1..]
            .iter()
            .all(|&j| i != j && cloud.distance_at(i, j) >= r - DISTANCE_TOL)
    });
    let is_net = (0..cloud.len())
        .into_par_iter()
        .all(|i| pos.iter().any(|&j| cloud.distance_at(i, j) <= r + DISTANCE_TOL));
    Ok((is_separated, is_net))
}

/// True when no unselected point can be added without breaking separation.
pub fn is_maximal(cloud: &PointCloud, net: &NetResult) -> Result<bool> {
    let pos = net
        .selected
        .iter()
        .map(|&id| cloud.position(id))
        .collect::<Result<Vec<_>>>()?;
    let mut in_net = vec![false; cloud.len()];
    for &i in &pos {
        in_net[i] = true;
    }
    Ok((0..cloud.len()).into_par_iter().all(|i| {
        in_net[i] || pos.iter().any(|&j| cloud.distance_at(i, j) < net.r - DISTANCE_TOL)
    }))
}

/// `max{1, 16 area / (pi r)}`, flagged when `r < 4` (outside the hypothesis).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CardinalityBound {
    pub value: f64,
    pub in_hypothesis: bool,
}

pub fn net_cardinality_bound(area: f64, r: f64) -> Result<CardinalityBound> {
    if !(area > 0.0 && r > 0.0) {
        return Err(Error::domain(format!(
            "area and radius must be positive, got area {area}, r {r}"
        )));
    }
    Ok(CardinalityBound {
        value: (16.0 * area / (std::f64::consts::PI * r)).max(1.0),
        in_hypothesis: r >= 4.0,
    })
}

/// Per-component bounds summed over thick components, against the closed form
/// `(N + 1) + 64 (g - 1) / (eps^2 r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateBound {
    pub sum: f64,
    pub ceiling: f64,
    pub holds: bool,
    pub in_hypothesis: bool,
}

pub fn aggregate_net_bound(
    component_areas: &[f64],
    r: f64,
    genus: u32,
    n_short: usize,
    eps: f64,
) -> Result<AggregateBound> {
    check_eps(eps)?;
    if genus < 2 {
        return Err(Error::domain(format!("genus must be >= 2, got {genus}")));
    }
    if component_areas.len() > n_short + 1 {
        return Err(Error::domain(format!(
            "{} thick components exceed N + 1 = {}",
            component_areas.len(),
            n_short + 1
        )));
    }
    let total_area = 4.0 * std::f64::consts::PI * (genus as f64 - 1.0) / (eps * eps);
    let used: f64 = component_areas.iter().sum();
    if used > total_area * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "component areas sum to {used}, more than the surface area {total_area}"
        )));
    }
    let mut sum = 0.0;
    let mut in_hypothesis = true;
    for &a in component_areas {
        let b = net_cardinality_bound(a, r)?;
        sum += b.value;
        in_hypothesis &= b.in_hypothesis;
    }
    let ceiling = (n_short + 1) as f64 + 64.0 * (genus as f64 - 1.0) / (eps * eps * r);
    Ok(AggregateBound {
        sum,
        ceiling,
        holds: sum <= ceiling,
        in_hypothesis,
    })
}
