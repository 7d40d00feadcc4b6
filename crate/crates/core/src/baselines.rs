//! Simulated annealing and tabu search tour optimizers.
//!
//! Both operate on the 2-opt neighborhood (segment reversal) over one
//! cluster's depot-anchored tour and are deterministic under their seeds.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{tour_length, DistanceMatrix, Tour};
use crate::trace::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealParams {
    pub initial_temp: f64,
    /// geometric factor in (0, 1)
    pub cooling_rate: f64,
    pub steps_per_temp: usize,
    pub min_temp: f64,
    pub seed: u64,
}

impl AnnealParams {
    /// Scale-aware defaults: starting temperature at the cluster's mean
    /// edge length, 100 * cluster-size moves per temperature level.
    pub fn scaled(cluster: &[u32], dm: &DistanceMatrix, depot_id: u32, seed: u64) -> Result<Self> {
        let mut nodes = cluster.to_vec();
        nodes.push(depot_id);
        let mut sum = 0.0;
        let mut count = 0usize;
        for (i, &a) in nodes.iter().enumerate() {
            for &b in &nodes[i + 1..] {
                sum += dm.by_id(a, b)?;
                count += 1;
            }
        }
        let mean_edge = if count > 0 { sum / count as f64 } else { 1.0 };
        Ok(Self {
            initial_temp: mean_edge.max(1e-3 + f64::EPSILON),
            cooling_rate: 0.995,
            steps_per_temp: 100 * cluster.len().max(1),
            min_temp: 1e-3,
            seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cooling_rate > 0.0 && self.cooling_rate < 1.0) {
            return Err(Error::InvalidParameter("cooling_rate must be in (0, 1)".into()));
        }
        if !(self.min_temp > 0.0 && self.min_temp < self.initial_temp) {
            return Err(Error::InvalidParameter(
                "min_temp must be positive and below initial_temp".into(),
            ));
        }
        if self.steps_per_temp == 0 {
            return Err(Error::InvalidParameter("steps_per_temp must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TabuParams {
    pub tenure: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl TabuParams {
    /// Tenure of half the cluster size (rounded up), 1000 iterations.
    pub fn scaled(cluster_size: usize, seed: u64) -> Self {
        Self { tenure: cluster_size.div_ceil(2).max(1), max_iterations: 1000, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tenure < 1 {
            return Err(Error::InvalidParameter("tenure must be at least 1".into()));
        }
        Ok(())
    }
}

/// Reverse the tour segment `[i..=j]`.
pub fn two_opt_neighbor(tour: &Tour, i: usize, j: usize) -> Result<Tour> {
    if i >= j || j >= tour.len() {
        return Err(Error::InvalidParameter(format!(
            "2-opt indices ({i}, {j}) invalid for tour of length {}",
            tour.len()
        )));
    }
    let mut ids = tour.0.clone();
    ids[i..=j].reverse();
    Ok(Tour(ids))
}

/// Length change of reversing `[i..=j]` in O(1): only the two boundary
/// edges change under a symmetric metric.
fn reversal_delta(
    order: &[usize],
    depot: usize,
    i: usize,
    j: usize,
    dm: &DistanceMatrix,
) -> f64 {
    let prev = if i == 0 { depot } else { order[i - 1] };
    let next = if j == order.len() - 1 { depot } else { order[j + 1] };
    dm.by_index(prev, order[j]) + dm.by_index(order[i], next)
        - dm.by_index(prev, order[i])
        - dm.by_index(order[j], next)
}

struct Walk<'a> {
    order: Vec<usize>,
    ids: Vec<u32>,
    depot: usize,
    dm: &'a DistanceMatrix,
    current_len: f64,
}

impl<'a> Walk<'a> {
    fn new(cluster: &[u32], dm: &'a DistanceMatrix, depot_id: u32, rng: &mut impl Rng) -> Result<Self> {
        if cluster.is_empty() {
            return Err(Error::InvalidParameter("cluster must not be empty".into()));
        }
        let mut ids = cluster.to_vec();
        ids.shuffle(rng);
        let order = ids.iter().map(|&id| dm.index_of(id)).collect::<Result<Vec<_>>>()?;
        let depot = dm.index_of(depot_id)?;
        let current_len = tour_length(&Tour(ids.clone()), depot_id, dm)?;
        Ok(Self { order, ids, depot, dm, current_len })
    }

    fn delta(&self, i: usize, j: usize) -> f64 {
        reversal_delta(&self.order, self.depot, i, j, self.dm)
    }

    fn apply(&mut self, i: usize, j: usize) {
        let d = self.delta(i, j);
        self.order[i..=j].reverse();
        self.ids[i..=j].reverse();
        self.current_len += d;
    }

    fn tour(&self) -> Tour {
        Tour(self.ids.clone())
    }
}

/// Metropolis walk over random 2-opt moves with geometric cooling. The
/// trace records one row per temperature level (best and current length).
pub fn simulated_annealing(
    cluster: &[u32],
    params: &AnnealParams,
    dm: &DistanceMatrix,
    depot_id: u32,
) -> Result<(Tour, Trace)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut walk = Walk::new(cluster, dm, depot_id, &mut rng)?;
    let mut best = walk.tour();
    let mut best_len = walk.current_len;
    let mut trace = Trace::default();
    trace.push(0, best_len, walk.current_len);

    if cluster.len() < 2 {
        return Ok((best, trace));
    }

    let n = cluster.len();
    let mut temp = params.initial_temp;
    let mut level = 0;
    while temp > params.min_temp {
        level += 1;
        for _ in 0..params.steps_per_temp {
            let i = rng.gen_range(0..n - 1);
            let j = rng.gen_range(i + 1..n);
            let delta = walk.delta(i, j);
            let accept = delta < 0.0 || rng.gen::<f64>() < (-delta / temp).exp();
            if accept {
                walk.apply(i, j);
                if walk.current_len < best_len {
                    best_len = walk.current_len;
                    best = walk.tour();
                }
            }
        }
        trace.push(level, best_len, walk.current_len);
        temp *= params.cooling_rate;
    }
    Ok((best, trace))
}

/// Steepest descent over the full 2-opt neighborhood with a move-attribute
/// tabu list and best-ever aspiration. If every move is tabu and none
/// aspirates, the best move is taken anyway.
pub fn tabu_search(
    cluster: &[u32],
    params: &TabuParams,
    dm: &DistanceMatrix,
    depot_id: u32,
) -> Result<(Tour, Trace)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut walk = Walk::new(cluster, dm, depot_id, &mut rng)?;
    let mut best = walk.tour();
    let mut best_len = walk.current_len;
    let mut trace = Trace::default();
    trace.push(0, best_len, walk.current_len);

    let n = cluster.len();
    if n < 2 {
        return Ok((best, trace));
    }

    // expiry iteration per (i, j) move attribute
    let mut tabu_until = vec![0usize; n * n];
    for iter in 1..=params.max_iterations {
        let mut chosen: Option<(usize, usize, f64)> = None;
        let mut fallback: Option<(usize, usize, f64)> = None;
        for i in 0..n - 1 {
            for j in i + 1..n {
                let delta = walk.delta(i, j);
                if fallback.map_or(true, |(_, _, d)| delta < d) {
                    fallback = Some((i, j, delta));
                }
                let is_tabu = tabu_until[i * n + j] >= iter;
                let aspirates = walk.current_len + delta < best_len - 1e-12;
                if is_tabu && !aspirates {
                    continue;
                }
                if chosen.map_or(true, |(_, _, d)| delta < d) {
                    chosen = Some((i, j, delta));
                }
            }
        }
        let (i, j, _) = chosen.or(fallback).expect("n >= 2 yields at least one move");
        walk.apply(i, j);
        tabu_until[i * n + j] = iter + params.tenure;
        if walk.current_len < best_len {
            best_len = walk.current_len;
            best = walk.tour();
        }
        trace.push(iter, best_len, walk.current_len);
    }
    Ok((best, trace))
}
