//! Solver toolkit for the multiple vehicle routing problem.
//!
//! The pipeline is cluster-first route-second: k-means splits the
//! non-depot cities into one group per vehicle, then each group's tour is
//! optimized independently. A genetic algorithm is the main optimizer;
//! simulated annealing, tabu search and a brute-force exact solver serve
//! as baselines and oracle. A time-indexed 0/1 model of the per-cluster
//! problem can be exported in LP format and used to validate tours.

pub mod baselines;
pub mod clustering;
pub mod error;
pub mod exact;
pub mod ga;
pub mod instance;
pub mod milp;
pub mod seed;
pub mod trace;

pub use error::{Error, Result};
pub use instance::{
    build_distance_matrix, euclidean_distance, generate_random_instance, read_instance,
    tour_length, write_instance, City, DistanceMatrix, Instance, Tour,
};
pub use trace::{Trace, TraceRecord};
