//! Descriptor generators: the two illustrative surface families and random
//! cubic pants graphs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::surface::{Curve, SurfaceDescriptor};

fn check_genus(genus: u32) -> Result<()> {
    if genus < 2 {
        return Err(Error::domain(format!("genus must be >= 2, got {genus}")));
    }
    Ok(())
}

fn build(genus: u32, edges: Vec<(usize, usize, f64)>) -> SurfaceDescriptor {
    SurfaceDescriptor {
        genus: genus as i64,
        curves: edges
            .into_iter()
            .enumerate()
            .map(|(i, (a, b, length))| Curve {
                id: format!("c{i}"),
                length,
                ends: [a, b],
            })
            .collect(),
    }
}

/// Surface with a few non-separating short curves.
///
/// The pants graph is a `2g - 2` cycle plus the antipodal matching; the first
/// `n_short` cycle edges get `short_length`, everything else `long_length`.
pub fn sparse_short_family(
    genus: u32,
    n_short: usize,
    short_length: f64,
    long_length: f64,
) -> Result<SurfaceDescriptor> {
    check_genus(genus)?;
    let n = 2 * genus as usize - 2;
    let half = genus as usize - 1;
    if n_short > n {
        return Err(Error::domain(format!(
            "at most {n} cycle curves can be short, asked for {n_short}"
        )));
    }
    let mut edges = Vec::with_capacity(3 * half);
    for i in 0..n {
        let length = if i < n_short { short_length } else { long_length };
        edges.push((i, (i + 1) % n, length));
    }
    for i in 0..half {
        edges.push((i, i + half, long_length));
    }
    Ok(build(genus, edges))
}

/// Surface cut by `g + 1` short separating curves into two spheres with
/// `g + 1` holes each.
///
/// Each half is a chain of `g - 1` pants joined by long curves; the short
/// curves pair the free cuffs of the two halves in order.
pub fn two_piece_family(genus: u32, short_length: f64, long_length: f64) -> Result<SurfaceDescriptor> {
    check_genus(genus)?;
    let per_half = genus as usize - 1;
    let mut edges = Vec::with_capacity(3 * per_half);
    let mut cuffs: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (side, free) in cuffs.iter_mut().enumerate() {
        let offset = side * per_half;
        for i in 0..per_half {
            let internal = usize::from(i > 0) + usize::from(i + 1 < per_half);
            free.extend(std::iter::repeat(offset + i).take(3 - internal));
            if i + 1 < per_half {
                edges.push((offset + i, offset + i + 1, long_length));
            }
        }
    }
    debug_assert_eq!(cuffs[0].len(), genus as usize + 1);
    for (&a, &b) in cuffs[0].iter().zip(cuffs[1].iter()) {
        edges.push((a, b, short_length));
    }
    Ok(build(genus, edges))
}

/// Uniform random pairing of three stubs per pants, rejected until connected.
/// Lengths are log-uniform on `[min_length, max_length]`.
pub fn random_cubic<R: Rng>(
    genus: u32,
    min_length: f64,
    max_length: f64,
    rng: &mut R,
) -> Result<SurfaceDescriptor> {
    check_genus(genus)?;
    if !(min_length > 0.0 && max_length >= min_length) {
        return Err(Error::domain("length range must satisfy 0 < min <= max"));
    }
    let n = 2 * genus as usize - 2;
    let (lo, hi) = (min_length.ln(), max_length.ln());
    loop {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| [v, v, v]).collect();
        stubs.shuffle(rng);
        let edges: Vec<_> = stubs
            .chunks_exact(2)
            .map(|p| (p[0], p[1], rng.gen_range(lo..=hi).exp()))
            .collect();
        let d = build(genus, edges);
        if d.validate().is_ok() {
            return Ok(d);
        }
    }
}
