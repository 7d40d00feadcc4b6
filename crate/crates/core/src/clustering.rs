//! k-means partitioning of the non-depot cities into one group per vehicle.
//!
//! The depot is excluded from clustering; every vehicle's tour starts and
//! ends there regardless of which cluster it serves.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Centroid {
    pub x: f64,
    pub y: f64,
}

/// How the initial centroids are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitMode {
    /// Deterministic farthest-point seeding from a seed-chosen start.
    FarthestPoint,
    /// k distinct points drawn uniformly.
    Random,
}

/// A partition of the non-depot cities into k vehicle groups.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub k: usize,
    /// city id -> cluster index in [0, k)
    pub labels: HashMap<u32, usize>,
    pub centroids: Vec<Centroid>,
    /// within-cluster sum of squared point-to-centroid distances
    pub wcss: f64,
    pub iterations: usize,
}

impl ClusterAssignment {
    /// City ids of cluster `j`, in instance order.
    pub fn members(&self, inst: &Instance, j: usize) -> Vec<u32> {
        inst.cities()
            .iter()
            .filter(|c| self.labels.get(&c.id) == Some(&j))
            .map(|c| c.id)
            .collect()
    }
}

fn sq_dist(p: (f64, f64), c: &Centroid) -> f64 {
    let dx = p.0 - c.x;
    let dy = p.1 - c.y;
    dx * dx + dy * dy
}

/// Farthest-point seeding: a seed-chosen start, then each next centroid is
/// the point maximizing its minimum distance to the centroids so far.
pub fn init_centroids_farthest(points: &[(f64, f64)], k: usize, seed: u64) -> Result<Vec<Centroid>> {
    if k < 1 || k > points.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must be in 1..={}",
            points.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = rng.gen_range(0..points.len());
    let mut chosen = vec![first];
    while chosen.len() < k {
        let mut best = None;
        for (i, p) in points.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let min_d = chosen
                .iter()
                .map(|&c| sq_dist(*p, &Centroid { x: points[c].0, y: points[c].1 }))
                .fold(f64::INFINITY, f64::min);
            match best {
                Some((_, d)) if d >= min_d => {}
                _ => best = Some((i, min_d)),
            }
        }
        chosen.push(best.expect("k <= points.len() leaves a candidate").0);
    }
    Ok(chosen.into_iter().map(|i| Centroid { x: points[i].0, y: points[i].1 }).collect())
}

/// k distinct points drawn uniformly.
pub fn init_centroids_random(points: &[(f64, f64)], k: usize, seed: u64) -> Result<Vec<Centroid>> {
    if k < 1 || k > points.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must be in 1..={}",
            points.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..points.len()).collect();
    indices.shuffle(&mut rng);
    indices.truncate(k);
    Ok(indices.into_iter().map(|i| Centroid { x: points[i].0, y: points[i].1 }).collect())
}

/// Label each point with the index of its nearest centroid; ties go to the
/// lowest centroid index.
pub fn assign_points(points: &[(f64, f64)], centroids: &[Centroid]) -> Vec<usize> {
    assert!(!centroids.is_empty(), "need at least one centroid");
    points
        .iter()
        .map(|&p| {
            let mut best = 0;
            let mut best_d = sq_dist(p, &centroids[0]);
            for (j, c) in centroids.iter().enumerate().skip(1) {
                let d = sq_dist(p, c);
                if d < best_d {
                    best = j;
                    best_d = d;
                }
            }
            best
        })
        .collect()
}

/// Barycenter of each cluster. Every cluster must have at least one point.
pub fn recompute_centroids(points: &[(f64, f64)], labels: &[usize], k: usize) -> Vec<Centroid> {
    let mut sums = vec![(0.0, 0.0, 0usize); k];
    for (&p, &l) in points.iter().zip(labels) {
        sums[l].0 += p.0;
        sums[l].1 += p.1;
        sums[l].2 += 1;
    }
    sums.into_iter()
        .map(|(sx, sy, count)| {
            assert!(count > 0, "recompute_centroids requires non-empty clusters");
            Centroid { x: sx / count as f64, y: sy / count as f64 }
        })
        .collect()
}

fn wcss_of(points: &[(f64, f64)], labels: &[usize], centroids: &[Centroid]) -> f64 {
    points
        .iter()
        .zip(labels)
        .map(|(&p, &l)| sq_dist(p, &centroids[l]))
        .sum()
}

/// Move a worst-assigned point into each empty cluster so every vehicle
/// gets work. Donor clusters must keep at least one point.
fn repair_empty_clusters(points: &[(f64, f64)], labels: &mut [usize], centroids: &[Centroid], k: usize) {
    loop {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else { return };
        let mut pick = None;
        for (i, &p) in points.iter().enumerate() {
            if counts[labels[i]] <= 1 {
                continue;
            }
            let d = sq_dist(p, &centroids[labels[i]]);
            match pick {
                Some((_, best)) if best >= d => {}
                _ => pick = Some((i, d)),
            }
        }
        let (i, _) = pick.expect("more points than clusters");
        labels[i] = empty;
    }
}

struct RunResult {
    labels: Vec<usize>,
    centroids: Vec<Centroid>,
    wcss: f64,
    iterations: usize,
    wcss_history: Vec<f64>,
}

/// Per-restart record from [`kmeans_detailed`].
#[derive(Debug, Clone)]
pub struct RestartDetail {
    pub wcss: f64,
    pub iterations: usize,
    /// wcss measured after each Lloyd iteration; non-increasing
    pub wcss_history: Vec<f64>,
}

fn lloyd_run(
    points: &[(f64, f64)],
    k: usize,
    seed: u64,
    max_iter: usize,
    init: InitMode,
) -> Result<RunResult> {
    let mut centroids = match init {
        InitMode::FarthestPoint => init_centroids_farthest(points, k, seed)?,
        InitMode::Random => init_centroids_random(points, k, seed)?,
    };
    let mut labels = assign_points(points, &centroids);
    repair_empty_clusters(points, &mut labels, &centroids, k);
    let mut prev_wcss = f64::INFINITY;
    let mut iterations = 0;
    let mut wcss_history = Vec::new();
    while iterations < max_iter {
        iterations += 1;
        centroids = recompute_centroids(points, &labels, k);
        let mut next = assign_points(points, &centroids);
        repair_empty_clusters(points, &mut next, &centroids, k);
        let wcss = wcss_of(points, &next, &centroids);
        debug_assert!(wcss <= prev_wcss + 1e-9, "wcss must not increase per Lloyd iteration");
        prev_wcss = wcss;
        wcss_history.push(wcss);
        if next == labels {
            break;
        }
        labels = next;
    }
    centroids = recompute_centroids(points, &labels, k);
    let wcss = wcss_of(points, &labels, &centroids);
    Ok(RunResult { labels, centroids, wcss, iterations, wcss_history })
}

/// Lloyd iteration with `restarts` independent runs (sub-seeded from
/// `seed`); the assignment with the lowest wcss wins, ties going to the
/// earliest restart. The depot never appears in the result.
pub fn kmeans(
    inst: &Instance,
    k: usize,
    seed: u64,
    max_iter: usize,
    restarts: usize,
    init: InitMode,
) -> Result<ClusterAssignment> {
    Ok(kmeans_detailed(inst, k, seed, max_iter, restarts, init)?.0)
}

/// [`kmeans`] plus one [`RestartDetail`] per restart, in restart order.
pub fn kmeans_detailed(
    inst: &Instance,
    k: usize,
    seed: u64,
    max_iter: usize,
    restarts: usize,
    init: InitMode,
) -> Result<(ClusterAssignment, Vec<RestartDetail>)> {
    let ids = inst.non_depot_ids();
    if k < 1 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if ids.len() < k {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds the {} non-depot cities",
            ids.len()
        )));
    }
    if restarts < 1 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    let points: Vec<(f64, f64)> = ids
        .iter()
        .map(|&id| {
            let c = inst.city(id).expect("non_depot_ids come from the instance");
            (c.x, c.y)
        })
        .collect();

    let mut best: Option<RunResult> = None;
    let mut details = Vec::with_capacity(restarts);
    for r in 0..restarts {
        let run = lloyd_run(&points, k, derive_seed(seed, "kmeans-restart", r as u64), max_iter, init)?;
        details.push(RestartDetail {
            wcss: run.wcss,
            iterations: run.iterations,
            wcss_history: run.wcss_history.clone(),
        });
        let better = match &best {
            Some(b) => run.wcss < b.wcss,
            None => true,
        };
        if better {
            best = Some(run);
        }
    }
    let best = best.expect("restarts >= 1");
    let labels = ids.iter().copied().zip(best.labels.iter().copied()).collect();
    Ok((
        ClusterAssignment {
            k,
            labels,
            centroids: best.centroids,
            wcss: best.wcss,
            iterations: best.iterations,
        },
        details,
    ))
}

pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_RESTARTS: usize = 10;
