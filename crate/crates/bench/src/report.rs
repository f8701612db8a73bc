use std::fmt::Write as _;

use crate::{Samples, Variant};

/// Statistics for one (variant, object count) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub variant: Variant,
    pub object_count: usize,
    pub mean_latency_s: f64,
    /// Sample standard deviation of the latencies.
    pub stddev_s: f64,
    pub throughput_rps: f64,
    pub samples: usize,
    pub max_latency_s: f64,
}

impl Cell {
    pub fn from_samples(variant: Variant, object_count: usize, s: &Samples) -> Self {
        let xs: Vec<f64> = s.latencies.iter().map(|d| d.as_secs_f64()).collect();
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n.max(1) as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Cell {
            variant,
            object_count,
            mean_latency_s: mean,
            stddev_s: var.sqrt(),
            throughput_rps: n as f64 / s.wall.as_secs_f64().max(f64::MIN_POSITIVE),
            samples: n,
            max_latency_s: xs.iter().copied().fold(0.0, f64::max),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub cells: Vec<Cell>,
}

impl BenchReport {
    pub fn cell(&self, variant: Variant, object_count: usize) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.variant == variant && c.object_count == object_count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format {s:?}; expected table or csv")),
        }
    }
}

pub const CSV_HEADER: &str = "variant,object_count,mean_latency_s,stddev_s,throughput_rps,samples";

pub fn emit_report(report: &BenchReport, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for c in &report.cells {
                let _ = writeln!(
                    out,
                    "{},{},{:.6e},{:.6e},{:.6e},{}",
                    c.variant, c.object_count, c.mean_latency_s, c.stddev_s, c.throughput_rps, c.samples
                );
            }
            out
        }
        Format::Table => {
            let header = [
                "variant",
                "objects",
                "mean latency (s)",
                "std dev (s)",
                "throughput (req/s)",
                "samples",
            ];
            let rows: Vec<[String; 6]> = report
                .cells
                .iter()
                .map(|c| {
                    [
                        c.variant.to_string(),
                        c.object_count.to_string(),
                        format!("{:.6}", c.mean_latency_s),
                        format!("{:.6}", c.stddev_s),
                        format!("{:.1}", c.throughput_rps),
                        c.samples.to_string(),
                    ]
                })
                .collect();
            let mut widths = header.map(str::len);
            for r in &rows {
                for (w, cell) in widths.iter_mut().zip(r) {
                    *w = (*w).max(cell.len());
                }
            }
            let mut out = String::new();
            let line = |out: &mut String, cells: &[&str]| {
                let parts: Vec<String> = cells
                    .iter()
                    .zip(widths)
                    .enumerate()
                    .map(|(i, (c, w))| {
                        if i == 0 {
                            format!("{c:<w$}")
                        } else {
                            format!("{c:>w$}")
                        }
                    })
                    .collect();
                out.push_str(parts.join("  ").trim_end());
                out.push('\n');
            };
            line(&mut out, &header);
            let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
            line(&mut out, &rule.iter().map(String::as_str).collect::<Vec<_>>());
            for r in &rows {
                line(&mut out, &r.iter().map(String::as_str).collect::<Vec<_>>());
            }
            out
        }
    }
}

/// Reads back the CSV written by [`emit_report`]. `max_latency_s` is not part
/// of the format and comes back as zero.
pub fn parse_csv(text: &str) -> Result<BenchReport, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err("missing or unexpected header".into());
    }
    let mut cells = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let f: Vec<&str> = line.split(',').collect();
        let bad = |what: &str| format!("row {}: bad {what}", i + 1);
        if f.len() != 6 {
            return Err(bad("column count"));
        }
        cells.push(Cell {
            variant: f[0].parse().map_err(|_| bad("variant"))?,
            object_count: f[1].parse().map_err(|_| bad("object_count"))?,
            mean_latency_s: f[2].parse().map_err(|_| bad("mean_latency_s"))?,
            stddev_s: f[3].parse().map_err(|_| bad("stddev_s"))?,
            throughput_rps: f[4].parse().map_err(|_| bad("throughput_rps"))?,
            samples: f[5].parse().map_err(|_| bad("samples"))?,
            max_latency_s: 0.0,
        });
    }
    Ok(BenchReport { cells })
}
