use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// A value counts as an obstruction when it exceeds its bound by more than this.
pub const CLASSIFICATION_SLACK: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Vanishing,
    Obstruction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    NoObstructionFound,
    Obstruction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionRecord {
    pub id: String,
    pub value: f64,
    pub bound: f64,
    pub classification: Classification,
}

impl ObstructionRecord {
    pub fn new(id: impl Into<String>, value: f64, bound: f64) -> Self {
        let classification = if value.abs() > bound + CLASSIFICATION_SLACK {
            Classification::Obstruction
        } else {
            Classification::Vanishing
        };
        Self { id: id.into(), value, bound, classification }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub records: Vec<ObstructionRecord>,
    pub verdict: Verdict,
}

impl ObstructionReport {
    pub fn new(records: Vec<ObstructionRecord>) -> Self {
        let verdict = if records.iter().any(|r| r.classification == Classification::Obstruction) {
            Verdict::Obstruction
        } else {
            Verdict::NoObstructionFound
        };
        Self { records, verdict }
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.records.extend(other.records);
        Self::new(self.records)
    }

    pub fn max_abs_value(&self) -> f64 {
        self.records.iter().map(|r| r.value.abs()).fold(0.0, f64::max)
    }

    pub fn obstruction_count(&self) -> usize {
        self.records.iter().filter(|r| r.classification == Classification::Obstruction).count()
    }

    /// Header `id,value,bound,classification`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "id,value,bound,classification")?;
        for r in &self.records {
            let class = match r.classification {
                Classification::Vanishing => "vanishing",
                Classification::Obstruction => "obstruction",
            };
            // Quote ids that would split the row.
            let id = if r.id.contains([',', '"']) { format!("\"{}\"", r.id.replace('"', "\"\"")) } else { r.id.clone() };
            writeln!(w, "{id},{:.16e},{:.16e},{class}", r.value, r.bound)?;
        }
        Ok(())
    }
}
