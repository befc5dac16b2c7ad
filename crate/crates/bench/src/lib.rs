//! Shared fixtures for the criterion benchmarks.

use qgrass_core::grassmann::Scheme;
use qgrass_core::Subspace;

/// Every member of the scheme through the first coordinate point.
pub fn dictator_members(scheme: &Scheme) -> Vec<Subspace> {
    let p = Subspace::coordinate(scheme.ambient(), &[0]).expect("n >= 1");
    scheme
        .universe()
        .members()
        .iter()
        .filter(|m| p.is_contained_in(m).expect("same ambient"))
        .cloned()
        .collect()
}
