//! Benchmark fixtures shared by the criterion benches.

use hypermult_core::families::sparse_short_family;
use hypermult_core::SurfaceDescriptor;

/// A mid-sized descriptor with a handful of short curves.
pub fn sample_descriptor(genus: u32) -> SurfaceDescriptor {
    let n_short = (genus as f64).sqrt() as usize;
    sparse_short_family(genus, n_short, 0.01, 2.0).expect("genus >= 2")
}
