//! The two-stage solve pipeline and the benchmark harness.

use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use mvrp_core::baselines::{simulated_annealing, tabu_search, AnnealParams, TabuParams};
use mvrp_core::clustering::{kmeans, ClusterAssignment};
use mvrp_core::exact::brute_force_tsp_capped;
use mvrp_core::ga::run_ga;
use mvrp_core::instance::{
    build_distance_matrix, generate_random_instance, instance_to_string, read_instance,
    DistanceMatrix, Instance, Tour,
};
use mvrp_core::seed::derive_seed;
use mvrp_core::trace::Trace;

use crate::config::Overrides;
use crate::report::{RunInfo, SolveReport, VehicleReport, SCHEMA_VERSION};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ga,
    Sa,
    Tabu,
    Exact,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Algorithm::Ga => "ga",
            Algorithm::Sa => "sa",
            Algorithm::Tabu => "tabu",
            Algorithm::Exact => "exact",
        };
        f.write_str(s)
    }
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    format!("sha256:{:x}", Sha256::digest(bytes))
}

pub fn instance_digest(inst: &Instance) -> String {
    digest_bytes(instance_to_string(inst).as_bytes())
}

/// Digest of a cluster assignment: the member lists per cluster index, in
/// instance order. Identical clusters across algorithms hash identically.
pub fn cluster_assignment_digest(asg: &ClusterAssignment, inst: &Instance) -> String {
    let mut text = String::new();
    for j in 0..asg.k {
        text.push_str(&format!("{j}:"));
        for id in asg.members(inst, j) {
            text.push_str(&format!(" {id}"));
        }
        text.push('\n');
    }
    digest_bytes(text.as_bytes())
}

fn solve_cluster(
    algorithm: Algorithm,
    cluster: &[u32],
    dm: &DistanceMatrix,
    depot_id: u32,
    seed: u64,
    overrides: &Overrides,
) -> Result<(Tour, Trace), CliError> {
    match algorithm {
        Algorithm::Ga => {
            let params = overrides.ga_params(seed)?;
            Ok(run_ga(cluster, &params, dm, depot_id)?)
        }
        Algorithm::Sa => {
            let mut params = AnnealParams::scaled(cluster, dm, depot_id, seed)?;
            if let Some(v) = overrides.sa_initial_temp()? {
                params.initial_temp = v;
            }
            if let Some(v) = overrides.sa_cooling_rate()? {
                params.cooling_rate = v;
            }
            if let Some(v) = overrides.sa_steps_per_temp()? {
                params.steps_per_temp = v;
            }
            if let Some(v) = overrides.sa_min_temp()? {
                params.min_temp = v;
            }
            Ok(simulated_annealing(cluster, &params, dm, depot_id)?)
        }
        Algorithm::Tabu => {
            let mut params = TabuParams::scaled(cluster.len(), seed);
            if let Some(v) = overrides.tabu_tenure()? {
                params.tenure = v;
            }
            if let Some(v) = overrides.tabu_max_iterations()? {
                params.max_iterations = v;
            }
            Ok(tabu_search(cluster, &params, dm, depot_id)?)
        }
        Algorithm::Exact => {
            let res = brute_force_tsp_capped(cluster, dm, depot_id, overrides.exact_cap()?)?;
            let mut trace = Trace::default();
            trace.push(0, res.best_length, res.best_length);
            Ok((res.best_tour, trace))
        }
    }
}

/// Parameter record for the report; per-vehicle seeds derive from the
/// master seed and are not repeated here.
fn params_record(algorithm: Algorithm, overrides: &Overrides) -> Result<serde_json::Value, CliError> {
    let value = match algorithm {
        Algorithm::Ga => {
            let p = overrides.ga_params(0)?;
            serde_json::json!({
                "population_size": p.population_size,
                "mating_pool_size": p.mating_pool_size,
                "crossover_prob": p.crossover_prob,
                "mutation_prob": p.mutation_prob,
                "max_generations": p.max_generations,
                "stall_generations": p.stall_generations,
                "mutation": p.mutation,
            })
        }
        Algorithm::Sa => serde_json::json!({
            // null means scaled per cluster
            "initial_temp": overrides.sa_initial_temp()?,
            "cooling_rate": overrides.sa_cooling_rate()?.unwrap_or(0.995),
            "steps_per_temp": overrides.sa_steps_per_temp()?,
            "min_temp": overrides.sa_min_temp()?.unwrap_or(1e-3),
        }),
        Algorithm::Tabu => serde_json::json!({
            "tenure": overrides.tabu_tenure()?,
            "max_iterations": overrides.tabu_max_iterations()?.unwrap_or(1000),
        }),
        Algorithm::Exact => serde_json::json!({ "cap": overrides.exact_cap()? }),
    };
    Ok(value)
}

pub struct SolveOutcome {
    pub report: SolveReport,
    pub traces: Vec<Trace>,
}

/// Run k-means then the selected optimizer on each cluster.
pub fn solve_instance(
    inst: &Instance,
    digest: String,
    k: usize,
    algorithm: Algorithm,
    master_seed: u64,
    overrides: &Overrides,
) -> Result<SolveOutcome, CliError> {
    if k < 1 || k > inst.non_depot_ids().len() {
        return Err(CliError::Usage(format!(
            "k = {k} must be in 1..={}",
            inst.non_depot_ids().len()
        )));
    }
    let dm = build_distance_matrix(inst);

    let t0 = Instant::now();
    let asg = kmeans(
        inst,
        k,
        derive_seed(master_seed, "kmeans", 0),
        overrides.kmeans_max_iter()?,
        overrides.kmeans_restarts()?,
        overrides.kmeans_init()?,
    )?;
    let clustering_ms = t0.elapsed().as_secs_f64() * 1e3;

    let t1 = Instant::now();
    let mut vehicles = Vec::with_capacity(k);
    let mut traces = Vec::with_capacity(k);
    let mut total = 0.0;
    for j in 0..k {
        let cluster = asg.members(inst, j);
        let seed = derive_seed(master_seed, "solve-cluster", j as u64);
        let (tour, trace) = solve_cluster(algorithm, &cluster, &dm, inst.depot_id(), seed, overrides)?;
        let distance = mvrp_core::tour_length(&tour, inst.depot_id(), &dm)?;
        total += distance;
        vehicles.push(VehicleReport {
            vehicle: j + 1,
            cluster,
            tour: tour.0,
            distance,
            trace: format!("trace_vehicle_{}.csv", j + 1),
        });
        traces.push(trace);
    }
    let solve_ms = t1.elapsed().as_secs_f64() * 1e3;

    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs().to_string())
        .unwrap_or_default();

    Ok(SolveOutcome {
        report: SolveReport {
            schema_version: SCHEMA_VERSION,
            instance_digest: digest,
            k,
            algorithm: algorithm.to_string(),
            params: params_record(algorithm, overrides)?,
            master_seed,
            vehicles,
            total_distance: total,
            run_info: RunInfo { timestamp, clustering_ms, solve_ms },
        },
        traces,
    })
}

pub enum BenchSource {
    File(PathBuf),
    Generator { n: usize, side: f64, depot: u32 },
}

pub struct BenchSpec {
    pub source: BenchSource,
    pub k: usize,
    pub algorithms: Vec<Algorithm>,
    pub seeds: Vec<u64>,
}

pub struct BenchCell {
    pub seed: u64,
    pub algorithm: Algorithm,
    pub cluster_digest: String,
    /// per-vehicle distances, vehicle order; None when the solve failed
    pub per_vehicle: Option<Vec<f64>>,
    pub error: Option<String>,
}

impl BenchCell {
    pub fn total(&self) -> Option<f64> {
        self.per_vehicle.as_ref().map(|v| v.iter().sum())
    }
}

pub struct BenchResults {
    pub k: usize,
    pub algorithms: Vec<Algorithm>,
    pub seeds: Vec<u64>,
    pub cells: Vec<BenchCell>,
}

/// Run every (algorithm, seed) pair. Clustering happens once per seed and
/// is shared by all algorithms, so per-vehicle distances are comparable.
pub fn run_bench(spec: &BenchSpec, overrides: &Overrides) -> Result<BenchResults, CliError> {
    if spec.algorithms.is_empty() || spec.seeds.is_empty() {
        return Err(CliError::Usage("bench needs at least one algorithm and one seed".into()));
    }
    let mut cells = Vec::new();
    for &seed in &spec.seeds {
        let inst = match &spec.source {
            BenchSource::File(path) => read_instance(path)?,
            BenchSource::Generator { n, side, depot } => {
                generate_random_instance(*n, *side, *depot, seed)?
            }
        };
        if spec.k < 1 || spec.k > inst.non_depot_ids().len() {
            return Err(CliError::Usage(format!(
                "k = {} must be in 1..={}",
                spec.k,
                inst.non_depot_ids().len()
            )));
        }
        let dm = build_distance_matrix(&inst);
        let asg = kmeans(
            &inst,
            spec.k,
            derive_seed(seed, "kmeans", 0),
            overrides.kmeans_max_iter()?,
            overrides.kmeans_restarts()?,
            overrides.kmeans_init()?,
        )?;
        let cluster_digest = cluster_assignment_digest(&asg, &inst);
        for &algorithm in &spec.algorithms {
            let mut per_vehicle = Vec::with_capacity(spec.k);
            let mut error = None;
            for j in 0..spec.k {
                let cluster = asg.members(&inst, j);
                let sub_seed = derive_seed(seed, "solve-cluster", j as u64);
                match solve_cluster(algorithm, &cluster, &dm, inst.depot_id(), sub_seed, overrides)
                    .and_then(|(tour, _)| {
                        Ok(mvrp_core::tour_length(&tour, inst.depot_id(), &dm)?)
                    }) {
                    Ok(d) => per_vehicle.push(d),
                    Err(e) => {
                        error = Some(e.to_string());
                        break;
                    }
                }
            }
            cells.push(BenchCell {
                seed,
                algorithm,
                cluster_digest: cluster_digest.clone(),
                per_vehicle: if error.is_none() { Some(per_vehicle) } else { None },
                error,
            });
        }
    }
    Ok(BenchResults {
        k: spec.k,
        algorithms: spec.algorithms.clone(),
        seeds: spec.seeds.clone(),
        cells,
    })
}

impl BenchResults {
    fn cell(&self, seed: u64, algorithm: Algorithm) -> &BenchCell {
        self.cells
            .iter()
            .find(|c| c.seed == seed && c.algorithm == algorithm)
            .expect("every (seed, algorithm) pair has a cell")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed,algorithm,vehicle,distance,cluster_digest\n");
        for cell in &self.cells {
            match &cell.per_vehicle {
                Some(dists) => {
                    for (j, d) in dists.iter().enumerate() {
                        out.push_str(&format!(
                            "{},{},{},{},{}\n",
                            cell.seed,
                            cell.algorithm,
                            j + 1,
                            d,
                            cell.cluster_digest
                        ));
                    }
                    out.push_str(&format!(
                        "{},{},total,{},{}\n",
                        cell.seed,
                        cell.algorithm,
                        cell.total().expect("per_vehicle present"),
                        cell.cluster_digest
                    ));
                }
                None => {
                    out.push_str(&format!(
                        "{},{},total,FAILED,{}\n",
                        cell.seed, cell.algorithm, cell.cluster_digest
                    ));
                }
            }
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let width = 12;
        for &seed in &self.seeds {
            let digest = &self.cell(seed, self.algorithms[0]).cluster_digest;
            out.push_str(&format!("seed {seed} (clusters {})\n", &digest[..19.min(digest.len())]));
            out.push_str(&format!("{:>width$}", "vehicle"));
            for a in &self.algorithms {
                out.push_str(&format!("{:>width$}", a.to_string()));
            }
            out.push('\n');
            for j in 0..self.k {
                out.push_str(&format!("{:>width$}", j + 1));
                for &a in &self.algorithms {
                    match &self.cell(seed, a).per_vehicle {
                        Some(d) => out.push_str(&format!("{:>width$.4}", d[j])),
                        None => out.push_str(&format!("{:>width$}", "FAILED")),
                    }
                }
                out.push('\n');
            }
            out.push_str(&format!("{:>width$}", "total"));
            for &a in &self.algorithms {
                match self.cell(seed, a).total() {
                    Some(t) => out.push_str(&format!("{:>width$.4}", t)),
                    None => out.push_str(&format!("{:>width$}", "FAILED")),
                }
            }
            out.push_str("\n\n");
        }
        out.push_str("totals per algorithm across seeds\n");
        out.push_str(&format!("{:>width$}{:>width$}{:>width$}{:>width$}\n", "algorithm", "runs", "mean", "min"));
        for &a in &self.algorithms {
            let totals: Vec<f64> =
                self.seeds.iter().filter_map(|&s| self.cell(s, a).total()).collect();
            if totals.is_empty() {
                out.push_str(&format!("{:>width$}{:>width$}{:>width$}{:>width$}\n", a.to_string(), 0, "-", "-"));
            } else {
                let mean = totals.iter().sum::<f64>() / totals.len() as f64;
                let min = totals.iter().fold(f64::INFINITY, |m, &v| m.min(v));
                out.push_str(&format!(
                    "{:>width$}{:>width$}{:>width$.4}{:>width$.4}\n",
                    a.to_string(),
                    totals.len(),
                    mean,
                    min
                ));
            }
        }
        out
    }
}
