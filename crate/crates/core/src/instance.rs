//! Cities, instances, distances and instance file I/O.
//!
//! An instance is a depot-rooted set of cities in the Euclidean plane. The
//! text format is one header line `N <n> DEPOT <id>` followed by `id x y`
//! lines (space separated, LF, coordinates with 9 significant digits).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A city in the plane. Ids are 1-based labels, unique within an instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct City {
    pub id: u32,
    pub x: f64,
    pub y: f64,
}

/// Straight-line distance between two cities.
pub fn euclidean_distance(a: &City, b: &City) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    (dx * dx + dy * dy).sqrt()
}

/// A depot-rooted point set: the problem input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    cities: Vec<City>,
    depot_id: u32,
}

impl Instance {
    pub fn new(cities: Vec<City>, depot_id: u32) -> Result<Self> {
        if cities.len() < 2 {
            return Err(Error::InvalidParameter(
                "an instance needs at least 2 cities (depot + 1)".into(),
            ));
        }
        let mut seen = HashMap::new();
        for c in &cities {
            if !c.x.is_finite() || !c.y.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "city {} has non-finite coordinates",
                    c.id
                )));
            }
            if seen.insert(c.id, ()).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate city id {}", c.id)));
            }
        }
        if !seen.contains_key(&depot_id) {
            return Err(Error::InvalidParameter(format!(
                "depot id {depot_id} does not match any city"
            )));
        }
        Ok(Self { cities, depot_id })
    }

    pub fn cities(&self) -> &[City] {
        &self.cities
    }

    pub fn depot_id(&self) -> u32 {
        self.depot_id
    }

    pub fn depot(&self) -> &City {
        self.city(self.depot_id).expect("depot id validated at construction")
    }

    pub fn city(&self, id: u32) -> Option<&City> {
        self.cities.iter().find(|c| c.id == id)
    }

    /// Ids of all cities except the depot, in instance order.
    pub fn non_depot_ids(&self) -> Vec<u32> {
        self.cities
            .iter()
            .filter(|c| c.id != self.depot_id)
            .map(|c| c.id)
            .collect()
    }
}

/// Distances cached for up to this many cities; above it they are computed
/// on demand to bound memory.
pub const DISTANCE_CACHE_LIMIT: usize = 2000;

/// Pairwise Euclidean distances, indexed either by city id or by position
/// in the instance's city list. Immutable and safe to share.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    ids: Vec<u32>,
    id_to_index: HashMap<u32, usize>,
    coords: Vec<(f64, f64)>,
    cache: Option<Vec<f64>>,
}

/// Precompute the matrix for an instance; entry order follows city list order.
pub fn build_distance_matrix(inst: &Instance) -> DistanceMatrix {
    DistanceMatrix::build(inst)
}

impl DistanceMatrix {
    pub fn build(inst: &Instance) -> Self {
        let n = inst.cities().len();
        let ids: Vec<u32> = inst.cities().iter().map(|c| c.id).collect();
        let coords: Vec<(f64, f64)> = inst.cities().iter().map(|c| (c.x, c.y)).collect();
        let id_to_index = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let cache = if n <= DISTANCE_CACHE_LIMIT {
            let mut d = vec![0.0; n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let (xa, ya) = coords[i];
                    let (xb, yb) = coords[j];
                    let dist = ((xa - xb).powi(2) + (ya - yb).powi(2)).sqrt();
                    d[i * n + j] = dist;
                    d[j * n + i] = dist;
                }
            }
            Some(d)
        } else {
            None
        };
        Self { ids, id_to_index, coords, cache }
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn index_of(&self, id: u32) -> Result<usize> {
        self.id_to_index.get(&id).copied().ok_or(Error::UnknownCityId(id))
    }

    pub fn by_index(&self, i: usize, j: usize) -> f64 {
        match &self.cache {
            Some(d) => d[i * self.ids.len() + j],
            None => {
                let (xa, ya) = self.coords[i];
                let (xb, yb) = self.coords[j];
                ((xa - xb).powi(2) + (ya - yb).powi(2)).sqrt()
            }
        }
    }

    pub fn by_id(&self, a: u32, b: u32) -> Result<f64> {
        Ok(self.by_index(self.index_of(a)?, self.index_of(b)?))
    }
}

/// A vehicle's route: an ordered subset of non-depot city ids, interpreted
/// as depot -> c1 -> ... -> ck -> depot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tour(pub Vec<u32>);

impl Tour {
    pub fn ids(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Depot-anchored length of a tour; an empty tour has length 0.
pub fn tour_length(tour: &Tour, depot_id: u32, dm: &DistanceMatrix) -> Result<f64> {
    if tour.is_empty() {
        return Ok(0.0);
    }
    let depot = dm.index_of(depot_id)?;
    let mut prev = depot;
    let mut total = 0.0;
    for &id in tour.ids() {
        let idx = dm.index_of(id)?;
        total += dm.by_index(prev, idx);
        prev = idx;
    }
    total += dm.by_index(prev, depot);
    Ok(total)
}

/// Render a coordinate with 9 significant digits, plain decimal.
pub fn format_coord(v: f64) -> String {
    if v == 0.0 {
        return "0.00000000".to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    let prec = (8 - exp).max(0) as usize;
    format!("{v:.prec$}")
}

fn quantize_coord(v: f64) -> f64 {
    format_coord(v).parse().expect("formatted coordinate parses back")
}

/// Draw `n` cities uniformly in `[0, side]^2`; the city at 1-based position
/// `depot_index` becomes the depot. Identical seeds yield identical
/// instances. Coordinates are quantized to the file format's 9 significant
/// digits so write/read round-trips are exact.
pub fn generate_random_instance(n: usize, side: f64, depot_index: u32, seed: u64) -> Result<Instance> {
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    if !(side > 0.0) {
        return Err(Error::InvalidParameter("side must be positive".into()));
    }
    if depot_index < 1 || depot_index as usize > n {
        return Err(Error::InvalidParameter(format!(
            "depot index {depot_index} out of range 1..={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cities = (1..=n as u32)
        .map(|id| City {
            id,
            x: quantize_coord(rng.gen::<f64>() * side),
            y: quantize_coord(rng.gen::<f64>() * side),
        })
        .collect();
    Instance::new(cities, depot_index)
}

/// Serialize an instance to the plain-text format.
pub fn instance_to_string(inst: &Instance) -> String {
    let mut out = String::new();
    writeln!(out, "N {} DEPOT {}", inst.cities().len(), inst.depot_id()).unwrap();
    for c in inst.cities() {
        writeln!(out, "{} {} {}", c.id, format_coord(c.x), format_coord(c.y)).unwrap();
    }
    out
}

pub fn write_instance(inst: &Instance, path: &Path) -> Result<()> {
    std::fs::write(path, instance_to_string(inst))?;
    Ok(())
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or(Error::Parse { line: 1, message: "empty file".into() })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (n, depot_id) = match fields.as_slice() {
        ["N", n, "DEPOT", d] => {
            let n: usize = n.parse().map_err(|_| Error::Parse {
                line: 1,
                message: format!("bad city count {n:?}"),
            })?;
            let d: u32 = d.parse().map_err(|_| Error::Parse {
                line: 1,
                message: format!("bad depot id {d:?}"),
            })?;
            (n, d)
        }
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "expected header `N <n> DEPOT <id>`".into(),
            })
        }
    };

    let mut cities = Vec::with_capacity(n);
    let mut seen = HashMap::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected `id x y`, got {} fields", fields.len()),
            });
        }
        let id: u32 = fields[0].parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("bad city id {:?}", fields[0]),
        })?;
        let x: f64 = fields[1].parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("bad x coordinate {:?}", fields[1]),
        })?;
        let y: f64 = fields[2].parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("bad y coordinate {:?}", fields[2]),
        })?;
        if seen.insert(id, ()).is_some() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("duplicate city id {id}"),
            });
        }
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("non-finite coordinate for city {id}"),
            });
        }
        cities.push(City { id, x, y });
    }
    if cities.len() != n {
        return Err(Error::Parse {
            line: 1,
            message: format!("header declares {n} cities, file has {}", cities.len()),
        });
    }
    if !seen.contains_key(&depot_id) {
        return Err(Error::Parse {
            line: 1,
            message: format!("depot id {depot_id} not among the listed cities"),
        });
    }
    Instance::new(cities, depot_id).map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}
