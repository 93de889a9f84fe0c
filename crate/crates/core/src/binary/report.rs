use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressionRow {
    pub label: String,
    pub xml_bytes: u64,
    pub binary_bytes: u64,
    pub reduction_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressionReport {
    pub rows: Vec<CompressionRow>,
    pub average_reduction_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("'{0}' has an XML size of zero")]
    ZeroXmlSize(String),
    #[error("no rows to report")]
    Empty,
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Per-file reductions `(1 - binary/xml) * 100` rounded to two decimals,
/// and their mean, also rounded to two decimals.
pub fn compression_report<S: AsRef<str>>(pairs: &[(S, u64, u64)]) -> Result<CompressionReport, ReportError> {
    if pairs.is_empty() {
        return Err(ReportError::Empty);
    }
    let mut rows = Vec::with_capacity(pairs.len());
    for (label, xml, bin) in pairs {
        let label = label.as_ref().to_string();
        if *xml == 0 {
            return Err(ReportError::ZeroXmlSize(label));
        }
        let reduction_pct = round2((1.0 - *bin as f64 / *xml as f64) * 100.0);
        rows.push(CompressionRow { label, xml_bytes: *xml, binary_bytes: *bin, reduction_pct });
    }
    let mean = rows.iter().map(|r| r.reduction_pct).sum::<f64>() / rows.len() as f64;
    Ok(CompressionReport { rows, average_reduction_pct: round2(mean) })
}

pub(crate) fn thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

impl fmt::Display for CompressionReport {
    /// Aligned text table: label, XML size, binary size, reduction.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = ["File Size (in bytes)", ".x3d", ".s3db", "% Reduction"];
        let footer = "Average Reduction";
        let cells: Vec<[String; 4]> = self
            .rows
            .iter()
            .map(|r| {
                [r.label.clone(), thousands(r.xml_bytes), thousands(r.binary_bytes), format!("{:.2}", r.reduction_pct)]
            })
            .collect();
        let mut w = head.map(|h| h.chars().count());
        w[0] = w[0].max(footer.len());
        for row in &cells {
            for (i, c) in row.iter().enumerate() {
                w[i] = w[i].max(c.chars().count());
            }
        }
        writeln!(f, "{:<w0$}  {:>w1$}  {:>w2$}  {:>w3$}", head[0], head[1], head[2], head[3], w0 = w[0], w1 = w[1], w2 = w[2], w3 = w[3])?;
        for row in &cells {
            writeln!(f, "{:<w0$}  {:>w1$}  {:>w2$}  {:>w3$}", row[0], row[1], row[2], row[3], w0 = w[0], w1 = w[1], w2 = w[2], w3 = w[3])?;
        }
        writeln!(
            f,
            "{:<w0$}  {:>w1$}  {:>w2$}  {:>w3$.2}",
            footer,
            "",
            "",
            self.average_reduction_pct,
            w0 = w[0],
            w1 = w[1],
            w2 = w[2],
            w3 = w[3]
        )
    }
}
