//! Convergence traces shared by all optimizers.
//!
//! CSV shape is `generation,best_length,mean_length`. For the local-search
//! optimizers the third column carries the current (incumbent) length.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub generation: usize,
    pub best_length: f64,
    pub mean_length: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trace(pub Vec<TraceRecord>);

impl Trace {
    pub fn push(&mut self, generation: usize, best_length: f64, mean_length: f64) {
        self.0.push(TraceRecord { generation, best_length, mean_length });
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn best_lengths(&self) -> Vec<f64> {
        self.0.iter().map(|r| r.best_length).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("generation,best_length,mean_length\n");
        for r in &self.0 {
            out.push_str(&format!("{},{},{}\n", r.generation, r.best_length, r.mean_length));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "generation,best_length,mean_length" => {}
            Some((_, h)) => {
                return Err(Error::Parse { line: 1, message: format!("unexpected header {h:?}") })
            }
            None => return Err(Error::Parse { line: 1, message: "empty trace".into() }),
        }
        let mut records = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected 3 fields, got {}", fields.len()),
                });
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("bad number {s:?}"),
                })
            };
            records.push(TraceRecord {
                generation: fields[0].trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("bad generation {:?}", fields[0]),
                })?,
                best_length: parse(fields[1])?,
                mean_length: parse(fields[2])?,
            });
        }
        if records.is_empty() {
            return Err(Error::Parse { line: 1, message: "trace has no records".into() });
        }
        Ok(Trace(records))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut t = Trace::default();
        t.push(0, 150.0, 171.25);
        t.push(1, 140.5, 160.0);
        assert_eq!(Trace::from_csv(&t.to_csv()).unwrap(), t);
    }

    #[test]
    fn empty_trace_is_a_parse_error() {
        assert!(Trace::from_csv("generation,best_length,mean_length\n").is_err());
        assert!(Trace::from_csv("").is_err());
    }
}
