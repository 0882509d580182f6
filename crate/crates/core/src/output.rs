//! CSV time series, key=value summaries, and sweep tables.
//!
//! Reals are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64` exactly, so replays can be compared byte for
//! byte.

use std::io::{self, BufRead, Write};

use crate::error::{Result, SimError};
use crate::harness::EnsembleSummary;
use crate::metrics::TimeSeriesRecord;

/// Formats a real with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_header(brands: usize) -> String {
    let mut h = String::from("t,fluctuation");
    for b in 0..brands {
        h.push_str(&format!(",share_{b}"));
    }
    h.push_str(",dominant");
    h
}

/// Writes the header `t,fluctuation,share_0,...,share_{N-1},dominant` and
/// one row per record.
pub fn emit_csv<W: Write>(sink: &mut W, brands: usize, records: &[TimeSeriesRecord]) -> Result<()> {
    writeln!(sink, "{}", csv_header(brands))?;
    for r in records {
        debug_assert_eq!(r.shares.len(), brands);
        write!(sink, "{},{}", r.t, fmt_real(r.fluctuation))?;
        for s in &r.shares {
            write!(sink, ",{}", fmt_real(*s))?;
        }
        writeln!(sink, ",{}", r.dominant)?;
    }
    sink.flush()?;
    Ok(())
}

fn bad_csv(msg: impl Into<String>) -> SimError {
    SimError::Io(io::Error::new(io::ErrorKind::InvalidData, msg.into()))
}

/// Parses CSV written by [`emit_csv`].
pub fn parse_csv<R: BufRead>(source: R) -> Result<Vec<TimeSeriesRecord>> {
    let mut lines = source.lines();
    let header = lines.next().ok_or_else(|| bad_csv("missing header"))??;
    let columns = header.split(',').count();
    if columns < 4 {
        return Err(bad_csv("header has too few columns"));
    }
    let brands = columns - 3;
    if header != csv_header(brands) {
        return Err(bad_csv(format!("unexpected header `{header}`")));
    }
    let mut records = Vec::new();
    for line in lines {
        let line = line?;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns {
            return Err(bad_csv(format!(
                "row has {} fields, expected {columns}",
                fields.len()
            )));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| bad_csv(format!("bad number `{s}`")))
        };
        let int = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| bad_csv(format!("bad integer `{s}`")))
        };
        records.push(TimeSeriesRecord {
            t: int(fields[0])?,
            fluctuation: num(fields[1])?,
            shares: fields[2..2 + brands]
                .iter()
                .map(|s| num(s))
                .collect::<Result<_>>()?,
            dominant: int(fields[columns - 1])? as usize,
        });
    }
    Ok(records)
}

/// Writes a summary as flat `key=value` lines.
pub fn emit_summary<W: Write>(sink: &mut W, summary: &EnsembleSummary) -> Result<()> {
    writeln!(sink, "runs={}", summary.runs)?;
    writeln!(
        sink,
        "consensus_fraction={}",
        fmt_real(summary.consensus_fraction)
    )?;
    writeln!(
        sink,
        "mean_sweeps_to_consensus={}",
        summary
            .mean_sweeps_to_consensus
            .map(fmt_real)
            .unwrap_or_default()
    )?;
    for (b, h) in summary.dominant_brand_histogram.iter().enumerate() {
        writeln!(sink, "dominant_hist_{b}={}", fmt_real(*h))?;
    }
    sink.flush()?;
    Ok(())
}

/// Writes one row per swept value:
/// `<param>,runs,consensus_fraction,mean_sweeps_to_consensus,dominant_hist_0,...`.
pub fn emit_sweep_csv<W: Write>(
    sink: &mut W,
    param: &str,
    brands: usize,
    rows: &[(String, EnsembleSummary)],
) -> Result<()> {
    write!(
        sink,
        "{param},runs,consensus_fraction,mean_sweeps_to_consensus"
    )?;
    for b in 0..brands {
        write!(sink, ",dominant_hist_{b}")?;
    }
    writeln!(sink)?;
    for (value, s) in rows {
        write!(
            sink,
            "{value},{},{},{}",
            s.runs,
            fmt_real(s.consensus_fraction),
            s.mean_sweeps_to_consensus.map(fmt_real).unwrap_or_default()
        )?;
        // Sweeping N changes the histogram width; pad to the widest row.
        for b in 0..brands {
            let h = s.dominant_brand_histogram.get(b).copied().unwrap_or(0.0);
            write!(sink, ",{}", fmt_real(h))?;
        }
        writeln!(sink)?;
    }
    sink.flush()?;
    Ok(())
}
