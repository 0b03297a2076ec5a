use rayon::prelude::*;

use super::report::{ObstructionRecord, ObstructionReport};
use crate::dynamics::{CatMap, TorusPoint, MAX_PERIOD};
use crate::error::{Error, Result};
use crate::observable::Observable;

/// Birkhoff sums of `obs` over every periodic orbit of minimal period
/// `1..=max_period`, one record per orbit (id `p<n>:<m0>,<m1>` naming the
/// orbit's smallest residue modulo `|det(A^n - I)|`).
pub fn livshitz_obstruction(cat: &CatMap, obs: &Observable<TorusPoint>, max_period: u32) -> Result<ObstructionReport> {
    if !(1..=MAX_PERIOD).contains(&max_period) {
        return Err(Error::OutOfRange { what: "max_period", value: i64::from(max_period), allowed: "1..=14" });
    }
    let mut records = Vec::new();
    for n in 1..=max_period {
        let lat = cat.periodic_lattice(n)?;
        let orbits = lat.prime_orbits();
        let batch: Vec<ObstructionRecord> = orbits
            .par_iter()
            .map(|orbit| {
                let sum: f64 = orbit.iter().map(|m| obs.eval(&lat.point(m))).sum();
                ObstructionRecord::new(format!("p{n}:{}/{}", orbit[0][0], orbit[0][1]), sum, 0.0)
            })
            .collect();
        records.extend(batch);
    }
    Ok(ObstructionReport::new(records))
}
