use crate::dynamics::MapSystem;

/// The orbit `f^k x` together with a cached value `v(f^k x)`, grown on demand
/// in both directions.
///
/// A nearest-neighbour walk only ever asks for `k` adjacent to the span it has
/// already seen, so the tape grows by at most one slot per step and each orbit
/// point costs one map application and one evaluation of `v`.
pub struct EnvironmentTape<'a, S: MapSystem, F> {
    sys: &'a S,
    value: F,
    // ahead[j] = f^j x, behind[j] = f^{-1-j} x
    ahead: Vec<(S::Point, f64)>,
    behind: Vec<(S::Point, f64)>,
}

impl<'a, S, F> EnvironmentTape<'a, S, F>
where
    S: MapSystem,
    F: Fn(&S::Point) -> f64,
{
    pub fn new(sys: &'a S, x: S::Point, value: F) -> Self {
        let v = value(&x);
        Self { sys, value, ahead: vec![(x, v)], behind: Vec::new() }
    }

    #[inline]
    fn slot(&mut self, k: i64) -> &(S::Point, f64) {
        if k >= 0 {
            let j = k as usize;
            while self.ahead.len() <= j {
                let y = self.sys.forward(&self.ahead[self.ahead.len() - 1].0);
                let v = (self.value)(&y);
                self.ahead.push((y, v));
            }
            &self.ahead[j]
        } else {
            let j = (-1 - k) as usize;
            while self.behind.len() <= j {
                let from = self.behind.last().map_or(self.ahead[0].0, |e| e.0);
                let y = self.sys.backward(&from);
                let v = (self.value)(&y);
                self.behind.push((y, v));
            }
            &self.behind[j]
        }
    }

    /// `f^k x`.
    #[inline]
    pub fn point(&mut self, k: i64) -> S::Point {
        self.slot(k).0
    }

    /// `v(f^k x)`.
    #[inline]
    pub fn value(&mut self, k: i64) -> f64 {
        self.slot(k).1
    }

    /// Inclusive range of positions materialized so far.
    pub fn span(&self) -> (i64, i64) {
        (-(self.behind.len() as i64), self.ahead.len() as i64 - 1)
    }
}
