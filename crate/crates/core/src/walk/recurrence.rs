use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::simulate::{WalkSample, WalkSeed};
use crate::dynamics::CellPartition;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkRecord {
    pub walk: usize,
    pub seed: WalkSeed,
    pub final_position: i64,
    pub min_position: i64,
    pub max_position: i64,
    pub first_return: Option<usize>,
    pub censored: bool,
    pub both_signs: bool,
    /// Fraction of partition cells containing some `ω_k`.
    pub cell_coverage: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceReport {
    pub walks: usize,
    pub length: usize,
    pub cell_count: usize,
    pub return_fraction: f64,
    pub sign_coverage: f64,
    pub median_cell_coverage: f64,
    pub records: Vec<WalkRecord>,
}

// The walk visits every position between its extremes, so {ω_k} is exactly
// the orbit segment f^min x, …, f^max x.
fn coverage<S: CellPartition>(sys: &S, w: &WalkSample<S::Point>) -> f64 {
    let mut seen = vec![false; sys.cell_count()];
    let mut hits = 0usize;
    let mut y = sys.iterate(&w.start, w.min_position());
    for k in w.min_position()..=w.max_position() {
        if k > w.min_position() {
            y = sys.forward(&y);
        }
        let c = sys.cell_of(&y);
        if !seen[c] {
            seen[c] = true;
            hits += 1;
        }
    }
    hits as f64 / seen.len() as f64
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn recurrence_stats<S: CellPartition>(sys: &S, samples: &[WalkSample<S::Point>]) -> Result<RecurrenceReport> {
    if samples.is_empty() {
        return Err(Error::Precondition("recurrence statistics need at least one walk".into()));
    }
    let records: Vec<WalkRecord> = samples
        .par_iter()
        .enumerate()
        .map(|(i, w)| WalkRecord {
            walk: i,
            seed: w.seed,
            final_position: w.final_position(),
            min_position: w.min_position(),
            max_position: w.max_position(),
            first_return: w.first_return(),
            censored: w.first_return().is_none(),
            both_signs: w.both_signs(),
            cell_coverage: coverage(sys, w),
        })
        .collect();
    let n = records.len() as f64;
    let mut cov: Vec<f64> = records.iter().map(|r| r.cell_coverage).collect();
    Ok(RecurrenceReport {
        walks: records.len(),
        length: samples.iter().map(WalkSample::len).max().unwrap_or(0),
        cell_count: sys.cell_count(),
        return_fraction: records.iter().filter(|r| !r.censored).count() as f64 / n,
        sign_coverage: records.iter().filter(|r| r.both_signs).count() as f64 / n,
        median_cell_coverage: median(&mut cov),
        records,
    })
}

impl RecurrenceReport {
    /// Per-walk summary; `first_return` is empty for censored walks.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "walk,master_seed,stream,s_n,min_s,max_s,first_return,censored,cell_coverage")?;
        for r in &self.records {
            let fr = r.first_return.map(|k| k.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{:.16e}",
                r.walk,
                r.seed.master,
                r.seed.stream,
                r.final_position,
                r.min_position,
                r.max_position,
                fr,
                r.censored,
                r.cell_coverage
            )?;
        }
        Ok(())
    }
}
