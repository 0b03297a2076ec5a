use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tape::EnvironmentTape;
use crate::dynamics::MapSystem;
use crate::markov::EnvironmentProfile;
use crate::rng::stream;

/// Environment states are stored every `DEFAULT_STRIDE` steps.
pub const DEFAULT_STRIDE: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkSeed {
    pub master: u64,
    pub stream: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    /// Number of steps `N`.
    pub len: usize,
    /// Store `ω_k` for `k` divisible by `stride`; 0 stores nothing.
    pub stride: usize,
}

impl WalkConfig {
    pub fn new(len: usize) -> Self {
        Self { len, stride: DEFAULT_STRIDE }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }
}

/// One quenched trajectory. Steps are packed one bit each (`1` for `+1`);
/// positions and environments are reconstructed from them and the start point.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkSample<P> {
    pub start: P,
    pub seed: WalkSeed,
    len: usize,
    stride: usize,
    steps: Vec<u64>,
    env: Vec<P>,
    final_position: i64,
    min_position: i64,
    max_position: i64,
    first_return: Option<usize>,
}

impl<P: Copy> WalkSample<P> {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn packed_steps(&self) -> &[u64] {
        &self.steps
    }

    /// `X_k` for `1 <= k <= N`.
    #[inline]
    pub fn step(&self, k: usize) -> i8 {
        debug_assert!(k >= 1 && k <= self.len);
        let b = k - 1;
        if (self.steps[b / 64] >> (b % 64)) & 1 == 1 {
            1
        } else {
            -1
        }
    }

    /// `X_1, …, X_N`.
    pub fn steps(&self) -> impl Iterator<Item = i8> + '_ {
        (1..=self.len).map(move |k| self.step(k))
    }

    /// `S_0 = 0, S_1, …, S_N`.
    pub fn positions(&self) -> impl Iterator<Item = i64> + '_ {
        std::iter::once(0).chain(self.steps().scan(0i64, |s, x| {
            *s += i64::from(x);
            Some(*s)
        }))
    }

    /// Pairs `(S_{k-1}, X_k)` for `k = 1..N`.
    pub fn transitions(&self) -> impl Iterator<Item = (i64, i8)> + '_ {
        self.positions().zip(self.steps())
    }

    /// `ω_0, ω_stride, ω_{2·stride}, …`.
    pub fn environment(&self) -> &[P] {
        &self.env
    }

    pub fn final_position(&self) -> i64 {
        self.final_position
    }

    pub fn min_position(&self) -> i64 {
        self.min_position
    }

    pub fn max_position(&self) -> i64 {
        self.max_position
    }

    /// Smallest `k >= 1` with `S_k = 0`; `None` when censored at `N`.
    pub fn first_return(&self) -> Option<usize> {
        self.first_return
    }

    pub fn both_signs(&self) -> bool {
        self.min_position < 0 && self.max_position > 0
    }

    /// `Σ_{k<n} v(ω_k)` for each checkpoint `n` (nondecreasing, at most `N`).
    pub fn additive_sums<S>(&self, sys: &S, v: impl Fn(&P) -> f64, checkpoints: &[usize]) -> Vec<f64>
    where
        S: MapSystem<Point = P>,
    {
        let lo = self.min_position;
        let mut table = Vec::with_capacity((self.max_position - lo + 1) as usize);
        let mut y = sys.iterate(&self.start, lo);
        for k in lo..=self.max_position {
            if k > lo {
                y = sys.forward(&y);
            }
            table.push(v(&y));
        }
        let mut out = Vec::with_capacity(checkpoints.len());
        let mut acc = 0.0;
        let mut done = 0;
        let mut pos = self.positions();
        for &n in checkpoints {
            assert!(n >= done && n <= self.len, "checkpoints must be nondecreasing and at most N");
            for s in pos.by_ref().take(n - done) {
                acc += table[(s - lo) as usize];
            }
            done = n;
            out.push(acc);
        }
        out
    }
}

/// Runs `cfg.len` steps from `x` on the generator stream named by `seed`.
pub fn simulate_quenched<S: MapSystem>(
    sys: &S,
    profile: &EnvironmentProfile<S::Point>,
    x: S::Point,
    cfg: &WalkConfig,
    seed: WalkSeed,
) -> WalkSample<S::Point> {
    let mut rng = stream(seed.master, seed.stream);
    let mut tape = EnvironmentTape::new(sys, x, |y: &S::Point| profile.p_at(y));
    let mut steps = vec![0u64; cfg.len.div_ceil(64)];
    let mut env = Vec::new();
    if let Some(n) = cfg.len.checked_div(cfg.stride) {
        env.reserve(n + 1);
        env.push(x);
    }
    let (mut s, mut lo, mut hi) = (0i64, 0i64, 0i64);
    let mut first_return = None;
    for k in 0..cfg.len {
        let up = rng.gen::<f64>() < tape.value(s);
        if up {
            steps[k / 64] |= 1 << (k % 64);
            s += 1;
            hi = hi.max(s);
        } else {
            s -= 1;
            lo = lo.min(s);
        }
        if s == 0 && first_return.is_none() {
            first_return = Some(k + 1);
        }
        if cfg.stride > 0 && (k + 1) % cfg.stride == 0 {
            env.push(tape.point(s));
        }
    }
    WalkSample {
        start: x,
        seed,
        len: cfg.len,
        stride: cfg.stride,
        steps,
        env,
        final_position: s,
        min_position: lo,
        max_position: hi,
        first_return,
    }
}

/// Walk `i` starts at `starts[i]` and uses stream `i` of `master_seed`.
pub fn simulate_ensemble<S: MapSystem>(
    sys: &S,
    profile: &EnvironmentProfile<S::Point>,
    starts: &[S::Point],
    cfg: &WalkConfig,
    master_seed: u64,
) -> Vec<WalkSample<S::Point>> {
    starts
        .par_iter()
        .enumerate()
        .map(|(i, x)| simulate_quenched(sys, profile, *x, cfg, WalkSeed { master: master_seed, stream: i as u64 }))
        .collect()
}
