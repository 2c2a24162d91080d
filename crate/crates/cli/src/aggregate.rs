//! Mean ± sd tables and Welch comparisons over metric TSVs.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Result};
use morphkit::metrics::{compare_means, mean_and_sd};

/// Rows of a `metric\tvalue` file.
pub fn parse_metrics_tsv(text: &str) -> Result<Vec<(String, String)>> {
    let mut lines = text.lines();
    if lines.next() != Some("metric\tvalue") {
        bail!("expected a `metric\\tvalue` header");
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| match l.split_once('\t') {
            Some((k, v)) => Ok((k.to_string(), v.to_string())),
            None => bail!("line {}: expected two columns", i + 2),
        })
        .collect()
}

/// File name without `.metrics.tsv` and a trailing `_s<seed>`.
pub fn group_name(path: &Path) -> String {
    let name = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    let name = name
        .strip_suffix(".metrics.tsv")
        .or_else(|| name.strip_suffix(".tsv"))
        .unwrap_or(&name);
    match name.rsplit_once("_s") {
        Some((group, seed)) if !seed.is_empty() && seed.bytes().all(|b| b.is_ascii_digit()) => group.to_string(),
        _ => name.to_string(),
    }
}

/// Numeric samples per (group, metric), in first-seen order.
#[derive(Debug, Default)]
pub struct Aggregate {
    groups: Vec<String>,
    metrics: Vec<String>,
    values: Vec<Vec<Vec<f64>>>,
}

impl Aggregate {
    pub fn add(&mut self, group: &str, rows: &[(String, String)]) {
        let g = match self.groups.iter().position(|x| x == group) {
            Some(g) => g,
            None => {
                self.groups.push(group.to_string());
                self.values.push(vec![Vec::new(); self.metrics.len()]);
                self.groups.len() - 1
            }
        };
        for (k, v) in rows {
            let Ok(x) = v.parse::<f64>() else { continue };
            let m = match self.metrics.iter().position(|x| x == k) {
                Some(m) => m,
                None => {
                    self.metrics.push(k.clone());
                    for per_group in &mut self.values {
                        per_group.push(Vec::new());
                    }
                    self.metrics.len() - 1
                }
            };
            self.values[g][m].push(x);
        }
    }

    /// `group\tmetric\tn\tmean\tsd`; sd is empty for single samples.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("group\tmetric\tn\tmean\tsd\n");
        for (g, group) in self.groups.iter().enumerate() {
            for (m, metric) in self.metrics.iter().enumerate() {
                let xs = &self.values[g][m];
                if xs.is_empty() {
                    continue;
                }
                let (mean, sd) = mean_and_sd(xs);
                let sd = if xs.len() > 1 { sd.to_string() } else { String::new() };
                let _ = writeln!(out, "{group}\t{metric}\t{}\t{mean}\t{sd}", xs.len());
            }
        }
        out
    }

    /// Welch tests for every metric between every pair of groups with at
    /// least two samples each.
    pub fn welch_tsv(&self) -> String {
        let mut out = String::from("metric\tgroup_a\tgroup_b\tt\tdf\tp\n");
        for (m, metric) in self.metrics.iter().enumerate() {
            for a in 0..self.groups.len() {
                for b in a + 1..self.groups.len() {
                    if let Ok(w) = compare_means(&self.values[a][m], &self.values[b][m]) {
                        let _ = writeln!(
                            out,
                            "{metric}\t{}\t{}\t{}\t{}\t{}",
                            self.groups[a], self.groups[b], w.t, w.df, w.p
                        );
                    }
                }
            }
        }
        out
    }

    /// Metrics as rows, groups as columns.
    pub fn to_table(&self) -> String {
        let cell = |xs: &[f64]| -> String {
            match xs.len() {
                0 => "-".into(),
                1 => format!("{:.3}", xs[0]),
                _ => {
                    let (mean, sd) = mean_and_sd(xs);
                    format!("{mean:.3} ± {sd:.3}")
                }
            }
        };
        let mut grid = vec![std::iter::once("metric".to_string()).chain(self.groups.iter().cloned()).collect::<Vec<_>>()];
        for (m, metric) in self.metrics.iter().enumerate() {
            let mut row = vec![metric.clone()];
            row.extend((0..self.groups.len()).map(|g| cell(&self.values[g][m])));
            grid.push(row);
        }
        let widths: Vec<usize> = (0..grid[0].len())
            .map(|c| grid.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in grid {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(s, &w)| format!("{s}{}", " ".repeat(w - s.chars().count())))
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }
}
