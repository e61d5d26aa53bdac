use serde::{Deserialize, Serialize};

use crate::format::sig9;

/// Populations sampled on a time grid, one column per level.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub labels: Vec<String>,
    pub times: Vec<f64>,
    pub populations: Vec<Vec<f64>>,
}

impl EvolutionTrace {
    pub fn new(labels: Vec<String>) -> Self {
        Self { labels, times: Vec::new(), populations: Vec::new() }
    }

    pub fn push(&mut self, t: f64, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.labels.len());
        self.times.push(t);
        self.populations.push(row);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn column(&self, idx: usize) -> Vec<f64> {
        self.populations.iter().map(|r| r[idx]).collect()
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.populations.last().map(Vec::as_slice)
    }

    /// `(time, value)` of the maximum of one column.
    pub fn max_of(&self, idx: usize) -> Option<(f64, f64)> {
        self.times
            .iter()
            .zip(&self.populations)
            .map(|(&t, r)| (t, r[idx]))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Largest |Σ p - 1| over the samples.
    pub fn max_trace_error(&self) -> f64 {
        self.populations
            .iter()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with header `t_ps,<labels...>`, nine significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_ps");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (t, row) in self.times.iter().zip(&self.populations) {
            out.push_str(&sig9(*t));
            for p in row {
                out.push(',');
                out.push_str(&sig9(*p));
            }
            out.push('\n');
        }
        out
    }
}
