//! Brute-force exact TSP oracle for one cluster.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::instance::{tour_length, DistanceMatrix, Tour};

/// Largest cluster the exhaustive solver accepts (10! permutations).
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub best_tour: Tour,
    pub best_length: f64,
    pub permutations_examined: u64,
}

/// Enumerate every permutation of the cluster and return the
/// lexicographically smallest one attaining the minimum depot-anchored
/// length.
pub fn brute_force_tsp(cluster: &[u32], dm: &DistanceMatrix, depot_id: u32) -> Result<ExactResult> {
    brute_force_tsp_capped(cluster, dm, depot_id, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn brute_force_tsp_capped(
    cluster: &[u32],
    dm: &DistanceMatrix,
    depot_id: u32,
    cap: usize,
) -> Result<ExactResult> {
    if cluster.is_empty() {
        return Err(Error::InvalidParameter("cluster must not be empty".into()));
    }
    if cluster.len() > cap {
        return Err(Error::ClusterTooLarge { size: cluster.len(), cap });
    }
    let mut ids = cluster.to_vec();
    ids.sort_unstable();
    // sorted input makes itertools yield permutations in lexicographic
    // order, so keeping the first strict improvement canonicalizes ties
    let mut best: Option<(Vec<u32>, f64)> = None;
    let mut examined = 0u64;
    for perm in ids.iter().copied().permutations(ids.len()) {
        let len = tour_length(&Tour(perm.clone()), depot_id, dm)?;
        examined += 1;
        match &best {
            Some((_, b)) if *b <= len => {}
            _ => best = Some((perm, len)),
        }
    }
    let (tour, length) = best.expect("non-empty cluster has permutations");
    Ok(ExactResult { best_tour: Tour(tour), best_length: length, permutations_examined: examined })
}
