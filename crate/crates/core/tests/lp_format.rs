//! Re-parse exported LP files with an independent reader and check the
//! declared structure. The reader below knows nothing about the writer's
//! internals; it only follows the LP text grammar (sections, named rows,
//! variable tokens).

use std::collections::BTreeSet;

use mvrp_core::instance::{build_distance_matrix, generate_random_instance};
use mvrp_core::milp::{build_model, model_to_lp_string};

struct ParsedLp {
    objective_vars: BTreeSet<String>,
    rows: Vec<(String, Vec<(f64, String)>, f64)>,
    binaries: BTreeSet<String>,
}

/// Minimal LP-format reader: comments, Minimize, Subject To, Binaries, End.
fn parse_lp(text: &str) -> ParsedLp {
    #[derive(PartialEq)]
    enum Section {
        Preamble,
        Objective,
        Constraints,
        Binaries,
        Done,
    }
    let mut section = Section::Preamble;
    let mut objective = String::new();
    let mut row_texts: Vec<String> = Vec::new();
    let mut binaries = BTreeSet::new();

    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.starts_with('\\') || trimmed.is_empty() {
            continue;
        }
        match trimmed {
            "Minimize" | "Maximize" => {
                section = Section::Objective;
                continue;
            }
            "Subject To" => {
                section = Section::Constraints;
                continue;
            }
            "Binaries" | "Binary" => {
                section = Section::Binaries;
                continue;
            }
            "End" => {
                section = Section::Done;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Objective => {
                objective.push(' ');
                objective.push_str(trimmed);
            }
            Section::Constraints => {
                // a row starts with `name:`; continuation lines don't
                if trimmed.contains(':') {
                    row_texts.push(trimmed.to_string());
                } else {
                    let last = row_texts.last_mut().expect("continuation before any row");
                    last.push(' ');
                    last.push_str(trimmed);
                }
            }
            Section::Binaries => {
                for tok in trimmed.split_whitespace() {
                    binaries.insert(tok.to_string());
                }
            }
            Section::Preamble | Section::Done => panic!("unexpected line {trimmed:?}"),
        }
    }
    assert!(section == Section::Done, "file must end with End");

    let parse_expr = |expr: &str| -> Vec<(f64, String)> {
        let mut terms = Vec::new();
        let mut sign = 1.0;
        let mut coef: Option<f64> = None;
        for tok in expr.split_whitespace() {
            match tok {
                "+" => sign = 1.0,
                "-" => sign = -1.0,
                _ => {
                    if let Ok(v) = tok.parse::<f64>() {
                        coef = Some(v);
                    } else {
                        terms.push((sign * coef.take().unwrap_or(1.0), tok.to_string()));
                        sign = 1.0;
                    }
                }
            }
        }
        terms
    };

    let obj_expr = objective.split_once(':').map(|(_, e)| e.to_string()).unwrap_or(objective);
    let objective_vars = parse_expr(&obj_expr).into_iter().map(|(_, v)| v).collect();

    let rows = row_texts
        .into_iter()
        .map(|row| {
            let (name, rest) = row.split_once(':').expect("row has a name");
            let (lhs, rhs) = rest.split_once('=').expect("equality row");
            (name.trim().to_string(), parse_expr(lhs), rhs.trim().parse().unwrap())
        })
        .collect();

    ParsedLp { objective_vars, rows, binaries }
}

#[test]
fn exported_n3_model_has_18_variables_and_18_rows() {
    let inst = generate_random_instance(3, 35.0, 1, 5).unwrap();
    let dm = build_distance_matrix(&inst);
    let model = build_model(&inst, &dm).unwrap();
    let parsed = parse_lp(&model_to_lp_string(&model));
    assert_eq!(parsed.binaries.len(), 18);
    assert_eq!(parsed.objective_vars.len(), 18);
    assert_eq!(parsed.objective_vars, parsed.binaries);
    assert_eq!(parsed.rows.len(), 18);
}

#[test]
fn exported_rows_match_the_symbolic_model() {
    let inst = generate_random_instance(4, 35.0, 2, 9).unwrap();
    let dm = build_distance_matrix(&inst);
    let model = build_model(&inst, &dm).unwrap();
    let parsed = parse_lp(&model_to_lp_string(&model));
    let rows = model.rows();
    assert_eq!(parsed.rows.len(), rows.len());
    for (parsed_row, row) in parsed.rows.iter().zip(&rows) {
        assert_eq!(parsed_row.0, row.name);
        assert_eq!(parsed_row.2, row.rhs);
        assert_eq!(parsed_row.1.len(), row.terms.len());
        for ((coef, var), ((i, j, t), want_coef)) in parsed_row.1.iter().zip(&row.terms) {
            assert_eq!(var, &format!("x_{i}_{j}_{t}"));
            assert_eq!(coef, want_coef);
        }
    }
}

#[test]
fn objective_coefficients_survive_the_round_trip() {
    let inst = generate_random_instance(3, 35.0, 1, 6).unwrap();
    let dm = build_distance_matrix(&inst);
    let model = build_model(&inst, &dm).unwrap();
    let text = model_to_lp_string(&model);
    let obj_section = text.split("Minimize").nth(1).unwrap().split("Subject To").next().unwrap();
    for (i, j, t) in model.variables() {
        assert!(obj_section.contains(&format!("x_{i}_{j}_{t}")));
        let d = model.distance(i, j);
        if d != 1.0 {
            assert!(obj_section.contains(&format!("{d}")), "missing coefficient {d}");
        }
    }
}
