//! Combinatorial surfaces: a pants decomposition encoded as a cubic
//! multigraph whose vertices are pairs of pants and whose edges are the
//! `3g - 3` decomposition curves, each carrying its hyperbolic length.

use std::collections::HashSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::collar::CollarProfile;
use crate::error::{DescriptorError, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Curve {
    pub id: String,
    pub length: f64,
    /// Pants on either side; equal entries encode a self-loop.
    pub ends: [usize; 2],
}

/// Genus plus pants-graph with curve lengths.
///
/// Deserializes from `{"genus": int, "curves": [{"id", "length", "ends"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDescriptor {
    pub genus: i64,
    pub curves: Vec<Curve>,
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            components: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("epsilon must be positive, got {epsilon}")))
    }
}

impl SurfaceDescriptor {
    pub fn pants_count(&self) -> usize {
        (2 * self.genus - 2).max(0) as usize
    }

    /// Checks every descriptor invariant, returning the first violation.
    ///
    /// Order: genus, curve count, pants index, duplicate id, length, degree,
    /// connectivity.
    pub fn validate(&self) -> std::result::Result<(), DescriptorError> {
        if self.genus < 2 || self.genus > u32::MAX as i64 / 3 {
            return Err(DescriptorError::Genus(self.genus));
        }
        let genus = self.genus as u32;
        let expected = 3 * genus as usize - 3;
        if self.curves.len() != expected {
            return Err(DescriptorError::CurveCount {
                genus,
                expected,
                found: self.curves.len(),
            });
        }
        let pants_count = self.pants_count();
        let mut seen = HashSet::with_capacity(self.curves.len());
        for curve in &self.curves {
            if let Some(&pants) = curve.ends.iter().find(|&&p| p >= pants_count) {
                return Err(DescriptorError::PantsIndex {
                    curve: curve.id.clone(),
                    pants,
                    pants_count,
                });
            }
            if !seen.insert(curve.id.as_str()) {
                return Err(DescriptorError::DuplicateId(curve.id.clone()));
            }
            if !(curve.length.is_finite() && curve.length > 0.0) {
                return Err(DescriptorError::Length {
                    curve: curve.id.clone(),
                    length: curve.length,
                });
            }
        }
        let mut degree = vec![0usize; pants_count];
        for curve in &self.curves {
            degree[curve.ends[0]] += 1;
            degree[curve.ends[1]] += 1;
        }
        if let Some((pants, &d)) = degree.iter().enumerate().find(|(_, &d)| d != 3) {
            return Err(DescriptorError::Degree { pants, degree: d });
        }
        let components = self.components_without(|_| false);
        if components != 1 {
            return Err(DescriptorError::Disconnected { components });
        }
        Ok(())
    }

    fn components_without<F: Fn(&Curve) -> bool>(&self, cut: F) -> usize {
        let mut uf = UnionFind::new(self.pants_count());
        for curve in self.curves.iter().filter(|c| !cut(c)) {
            uf.union(curve.ends[0], curve.ends[1]);
        }
        uf.components()
    }

    /// Curves of length strictly below `2 epsilon`.
    pub fn short_curves(&self, epsilon: f64) -> Result<Vec<&Curve>> {
        check_epsilon(epsilon)?;
        Ok(self
            .curves
            .iter()
            .filter(|c| c.length < 2.0 * epsilon)
            .collect())
    }

    /// `N_eps`: number of decomposition curves shorter than `2 epsilon`.
    pub fn count_short_geodesics(&self, epsilon: f64) -> Result<usize> {
        Ok(self.short_curves(epsilon)?.len())
    }

    /// `I_eps`: components of the pants graph after deleting the short curves.
    pub fn thick_component_count(&self, epsilon: f64) -> Result<usize> {
        self.validate()?;
        check_epsilon(epsilon)?;
        Ok(self.components_without(|c| c.length < 2.0 * epsilon))
    }

    /// Gauss-Bonnet area and thin-part area, where each short curve's thin
    /// part is its collar of half-width `w - trim`.
    pub fn area_budget(&self, epsilon: f64, trim: f64) -> Result<DecompositionReport> {
        self.validate()?;
        check_epsilon(epsilon)?;
        if !(trim >= 0.0 && trim.is_finite()) {
            return Err(Error::domain(format!("trim must be non-negative, got {trim}")));
        }
        let mut per_collar = Vec::new();
        let mut thin_area = 0.0;
        for curve in self.short_curves(epsilon)? {
            let profile = CollarProfile::new(curve.length)?;
            let half_width = profile.width - trim;
            if half_width <= 0.0 {
                return Err(Error::domain(format!(
                    "trim {trim} is not below the collar width {} of curve {}",
                    profile.width, curve.id
                )));
            }
            let area = profile.area_at(half_width);
            thin_area += area;
            per_collar.push(CollarSummary {
                id: curve.id.clone(),
                length: curve.length,
                width: profile.width,
                thin_half_width: half_width,
                boundary_length: profile.boundary_length_at(half_width),
                thin_area: area,
            });
        }
        let total_area = 4.0 * PI * (self.genus - 1) as f64;
        if thin_area >= total_area {
            return Err(Error::domain(format!(
                "thin area {thin_area} is not below the total area {total_area}"
            )));
        }
        Ok(DecompositionReport {
            epsilon,
            trim,
            genus: self.genus as u32,
            short_curves: per_collar.iter().map(|c| c.id.clone()).collect(),
            n_short: per_collar.len(),
            thick_components: self.components_without(|c| c.length < 2.0 * epsilon),
            total_area,
            thin_area,
            per_collar,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollarSummary {
    pub id: String,
    pub length: f64,
    pub width: f64,
    pub thin_half_width: f64,
    pub boundary_length: f64,
    pub thin_area: f64,
}

/// Thick-thin accounting of a descriptor at one `epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub epsilon: f64,
    pub trim: f64,
    pub genus: u32,
    pub short_curves: Vec<String>,
    pub n_short: usize,
    pub thick_components: usize,
    pub total_area: f64,
    pub thin_area: f64,
    pub per_collar: Vec<CollarSummary>,
}
