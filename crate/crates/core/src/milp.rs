//! Time-indexed 0/1 model of the single-vehicle routing problem.
//!
//! Variables x_ijt (i != j, 1-based) indicate that the arc i -> j is used
//! at step t. The module builds the model symbolically, exports it in LP
//! text format, and checks candidate assignments for feasibility; it never
//! invokes a solver.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::instance::{DistanceMatrix, Instance, Tour};

/// The model: city count plus the distance coefficients, with constraint
/// rows generated on demand in a fixed order.
#[derive(Debug, Clone)]
pub struct IlpModel {
    n: usize,
    /// row-major n x n distances in city list order
    dist: Vec<f64>,
}

/// One equality row: sum of signed terms over variables (i, j, t) = rhs.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintRow {
    pub name: String,
    pub terms: Vec<((usize, usize, usize), f64)>,
    pub rhs: f64,
}

pub fn build_model(inst: &Instance, dm: &DistanceMatrix) -> Result<IlpModel> {
    let n = inst.cities().len();
    if n < 2 {
        return Err(Error::InvalidParameter("model needs at least 2 cities".into()));
    }
    let mut dist = vec![0.0; n * n];
    for (i, a) in inst.cities().iter().enumerate() {
        for (j, _) in inst.cities().iter().enumerate() {
            dist[i * n + j] = dm.by_id(a.id, inst.cities()[j].id)?;
        }
    }
    Ok(IlpModel { n, dist })
}

impl IlpModel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variable_count(&self) -> usize {
        self.n * (self.n - 1) * self.n
    }

    /// Distance coefficient for the 1-based model indices (i, j).
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[(i - 1) * self.n + (j - 1)]
    }

    /// All variables in export order: i, then j, then t, 1-based, i != j.
    pub fn variables(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n = self.n;
        (1..=n).flat_map(move |i| {
            (1..=n)
                .filter(move |&j| j != i)
                .flat_map(move |j| (1..=n).map(move |t| (i, j, t)))
        })
    }

    /// Constraint rows in a fixed order: one-arc-per-step, leave-each-city-
    /// once, reach-each-city-once, then the step-continuity rows (the
    /// successor step wraps from t = n back to t = 1 to close the tour).
    pub fn rows(&self) -> Vec<ConstraintRow> {
        let n = self.n;
        let mut rows = Vec::with_capacity(3 * n + n * n);
        for t in 1..=n {
            let terms = (1..=n)
                .flat_map(|i| (1..=n).filter(move |&j| j != i).map(move |j| ((i, j, t), 1.0)))
                .collect();
            rows.push(ConstraintRow { name: format!("c2_t{t}"), terms, rhs: 1.0 });
        }
        for i in 1..=n {
            let terms = (1..=n)
                .filter(|&j| j != i)
                .flat_map(|j| (1..=n).map(move |t| ((i, j, t), 1.0)))
                .collect();
            rows.push(ConstraintRow { name: format!("c3_i{i}"), terms, rhs: 1.0 });
        }
        for j in 1..=n {
            let terms = (1..=n)
                .filter(|&i| i != j)
                .flat_map(|i| (1..=n).map(move |t| ((i, j, t), 1.0)))
                .collect();
            rows.push(ConstraintRow { name: format!("c4_j{j}"), terms, rhs: 1.0 });
        }
        for j in 1..=n {
            for t in 1..=n {
                let succ = if t == n { 1 } else { t + 1 };
                let mut terms: Vec<((usize, usize, usize), f64)> = (1..=n)
                    .filter(|&i| i != j)
                    .map(|i| ((i, j, t), 1.0))
                    .collect();
                terms.extend((1..=n).filter(|&k| k != j).map(|k| ((j, k, succ), -1.0)));
                rows.push(ConstraintRow { name: format!("c5_j{j}_t{t}"), terms, rhs: 0.0 });
            }
        }
        rows
    }
}

/// A candidate 0/1 assignment, stored as the set of variables equal to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSolution {
    n: usize,
    ones: BTreeSet<(usize, usize, usize)>,
}

impl IndicatorSolution {
    pub fn new(n: usize, ones: impl IntoIterator<Item = (usize, usize, usize)>) -> Result<Self> {
        let ones: BTreeSet<_> = ones.into_iter().collect();
        for &(i, j, t) in &ones {
            if i == j || i < 1 || j < 1 || t < 1 || i > n || j > n || t > n {
                return Err(Error::InvalidParameter(format!(
                    "indicator ({i}, {j}, {t}) out of range for n = {n}"
                )));
            }
        }
        Ok(Self { n, ones })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, i: usize, j: usize, t: usize) -> f64 {
        if self.ones.contains(&(i, j, t)) {
            1.0
        } else {
            0.0
        }
    }

    pub fn ones(&self) -> impl Iterator<Item = &(usize, usize, usize)> {
        self.ones.iter()
    }
}

/// Encode a single closed tour over every non-depot city: step t of
/// depot -> c1 -> ... -> depot sets exactly one indicator. Model indices
/// are 1-based positions in the instance's city list.
pub fn tour_to_indicators(tour: &Tour, depot_id: u32, inst: &Instance) -> Result<IndicatorSolution> {
    if depot_id != inst.depot_id() {
        return Err(Error::InvalidParameter(format!(
            "depot id {depot_id} does not match the instance depot {}",
            inst.depot_id()
        )));
    }
    let n = inst.cities().len();
    let pos = |id: u32| -> Result<usize> {
        inst.cities()
            .iter()
            .position(|c| c.id == id)
            .map(|p| p + 1)
            .ok_or(Error::UnknownCityId(id))
    };
    let mut seen = BTreeSet::new();
    for &id in tour.ids() {
        if id == depot_id || !seen.insert(id) {
            return Err(Error::InvalidParameter(format!(
                "tour repeats or includes the depot: city {id}"
            )));
        }
    }
    for c in inst.cities() {
        if c.id != depot_id && !seen.contains(&c.id) {
            return Err(Error::IncompleteTour(c.id));
        }
    }
    let mut sequence = Vec::with_capacity(n);
    sequence.push(pos(depot_id)?);
    for &id in tour.ids() {
        sequence.push(pos(id)?);
    }
    let ones = (0..n).map(|t| (sequence[t], sequence[(t + 1) % n], t + 1));
    IndicatorSolution::new(n, ones)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Feasible { objective: f64 },
    Infeasible { row: String, lhs: f64, rhs: f64 },
}

/// Evaluate every constraint row in order; the verdict names the first
/// violated row, or carries the objective value when all rows hold.
pub fn check_feasibility(sol: &IndicatorSolution, model: &IlpModel) -> Verdict {
    assert_eq!(sol.n(), model.n(), "solution and model sizes must agree");
    for row in model.rows() {
        let lhs: f64 = row.terms.iter().map(|&((i, j, t), c)| c * sol.value(i, j, t)).sum();
        if (lhs - row.rhs).abs() > 1e-9 {
            return Verdict::Infeasible { row: row.name, lhs, rhs: row.rhs };
        }
    }
    let objective = sol.ones().map(|&(i, j, _)| model.distance(i, j)).sum();
    Verdict::Feasible { objective }
}

fn var_name(i: usize, j: usize, t: usize) -> String {
    format!("x_{i}_{j}_{t}")
}

fn write_terms(out: &mut String, terms: &[(String, f64)]) {
    for (k, (name, coef)) in terms.iter().enumerate() {
        if k > 0 && k % 6 == 0 {
            out.push_str("\n   ");
        }
        if k == 0 {
            if *coef < 0.0 {
                out.push_str("- ");
            }
        } else if *coef < 0.0 {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let mag = coef.abs();
        if mag == 1.0 {
            out.push_str(name);
        } else {
            let _ = write!(out, "{mag} {name}");
        }
    }
}

/// Render the model in LP text format; byte-stable for a fixed model.
pub fn model_to_lp_string(model: &IlpModel) -> String {
    let mut out = String::new();
    out.push_str("\\ time-indexed routing model\n");
    out.push_str("\\ objective ranges over all ordered pairs i != j; self-loop terms are excluded\n");
    out.push_str("Minimize\n obj: ");
    let obj_terms: Vec<(String, f64)> = model
        .variables()
        .map(|(i, j, t)| (var_name(i, j, t), model.distance(i, j)))
        .collect();
    write_terms(&mut out, &obj_terms);
    out.push_str("\nSubject To\n");
    for row in model.rows() {
        let _ = write!(out, " {}: ", row.name);
        let terms: Vec<(String, f64)> =
            row.terms.iter().map(|&((i, j, t), c)| (var_name(i, j, t), c)).collect();
        write_terms(&mut out, &terms);
        let _ = writeln!(out, " = {}", row.rhs);
    }
    out.push_str("Binaries\n");
    for (k, (i, j, t)) in model.variables().enumerate() {
        if k % 8 == 0 {
            if k > 0 {
                out.push('\n');
            }
            out.push(' ');
        }
        out.push(' ');
        out.push_str(&var_name(i, j, t));
    }
    out.push_str("\nEnd\n");
    out
}

pub fn export_lp(model: &IlpModel, path: &Path) -> Result<()> {
    std::fs::write(path, model_to_lp_string(model))?;
    Ok(())
}
