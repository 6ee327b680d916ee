use std::io::Write;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::backend::{StepTable, WalkBackend};
use super::ledger::Ledger;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, walker_stream};

const TAG_WALK: u64 = 0x7761_6c6b;
/// Walkers per parallel task.
const CHUNK: u64 = 256;

pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WalkMode {
    /// `walkers` from every position, each run until absorbed.
    SteadyState,
    /// `walkers` from `source`, each run for exactly `steps` steps.
    TimeDependent { source: usize, steps: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WalkConfig {
    /// Walkers per start position.
    pub walkers: u64,
    pub mode: WalkMode,
    /// Per-walker step cap in steady-state mode.
    pub max_steps: u64,
}

impl WalkConfig {
    pub fn steady(walkers: u64) -> Self {
        Self {
            walkers,
            mode: WalkMode::SteadyState,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    pub fn time_dependent(walkers: u64, source: usize, steps: u64) -> Self {
        Self {
            walkers,
            mode: WalkMode::TimeDependent { source, steps },
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

/// `n[i][j]`: step starts at position `j` by walkers launched from `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PassageMatrix {
    pub n: usize,
    /// Walkers per start position.
    pub w: u64,
    counts: Vec<u64>,
}

impl PassageMatrix {
    fn zeros(n: usize, w: u64) -> Self {
        Self {
            n,
            w,
            counts: vec![0; n * n],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.counts[i * self.n..(i + 1) * self.n]
    }

    pub fn row_total(&self, i: usize) -> u64 {
        self.row(i).iter().sum()
    }

    /// Sparse CSV `i,j,count`; zero entries are omitted.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "i,j,count")?;
        for i in 0..self.n {
            for (j, &c) in self.row(i).iter().enumerate() {
                if c > 0 {
                    writeln!(out, "{i},{j},{c}")?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WalkOutput {
    Passage(PassageMatrix),
    /// Terminal position histogram of a time-dependent run.
    Terminal(Vec<u64>),
}

impl WalkOutput {
    pub fn passage(&self) -> Option<&PassageMatrix> {
        match self {
            WalkOutput::Passage(p) => Some(p),
            WalkOutput::Terminal(_) => None,
        }
    }

    pub fn terminal(&self) -> Option<&[u64]> {
        match self {
            WalkOutput::Terminal(t) => Some(t),
            WalkOutput::Passage(_) => None,
        }
    }
}

/// Runs one absorbing walk, adding its occupancy to `row`; returns steps.
#[inline]
fn absorb_walk(
    table: &StepTable,
    absorbing: usize,
    start: usize,
    seed: u64,
    walker: u64,
    cap: u64,
    row: &mut [u64],
) -> Result<u64> {
    let mut rng = walker_stream(seed, start, walker);
    let mut pos = start;
    let mut steps = 0u64;
    // one 64-bit draw feeds two steps; a 32-bit draw costs nearly as much
    loop {
        let x = rng.next_u64();
        for r in [x as u32, (x >> 32) as u32] {
            if pos == absorbing {
                return Ok(steps);
            }
            if steps == cap {
                return Err(Error::CapExceeded { start, walker, cap });
            }
            row[pos] += 1;
            pos = table.advance(pos, r);
            steps += 1;
        }
    }
}

#[inline]
fn fixed_walk(table: &StepTable, source: usize, seed: u64, walker: u64, steps: u64) -> usize {
    let mut rng = walker_stream(seed, source, walker);
    let mut pos = source;
    for _ in 0..steps / 2 {
        let x = rng.next_u64();
        pos = table.advance(pos, x as u32);
        pos = table.advance(pos, (x >> 32) as u32);
    }
    if steps % 2 == 1 {
        pos = table.advance(pos, rng.next_u64() as u32);
    }
    pos
}

fn chunks(w: u64) -> impl Iterator<Item = (u64, u64)> + Clone {
    (0..w.div_ceil(CHUNK)).map(move |c| (c * CHUNK, ((c + 1) * CHUNK).min(w)))
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(Error::Config("workers must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Launches the walkers of `cfg` on `backend`.
///
/// Each walker owns the stream keyed by `(master_seed, start, walker)`, and
/// all reductions are integer sums, so the output does not depend on
/// `workers`.
pub fn run_walkers(
    cfg: &WalkConfig,
    backend: &WalkBackend,
    master_seed: u64,
    workers: usize,
) -> Result<(WalkOutput, Ledger)> {
    let table = backend.table();
    let n = table.len();
    if cfg.walkers == 0 {
        return Err(Error::Config("walkers per position must be >= 1".into()));
    }
    let seed = derive_seed(master_seed, &[TAG_WALK]);
    let pool = pool(workers)?;
    let (out, steps) = match cfg.mode {
        WalkMode::SteadyState => {
            let absorbing = table.absorbing().ok_or_else(|| {
                Error::Config("steady-state walks need an absorbing boundary".into())
            })?;
            let tasks: Vec<(usize, u64, u64)> = (0..n)
                .flat_map(|i| chunks(cfg.walkers).map(move |(a, b)| (i, a, b)))
                .collect();
            let parts: Vec<Result<(usize, Vec<u64>, u64)>> = pool.install(|| {
                tasks
                    .par_iter()
                    .map(|&(start, a, b)| {
                        let mut row = vec![0u64; n];
                        let mut steps = 0u64;
                        for walker in a..b {
                            steps += absorb_walk(table, absorbing, start, seed, walker, cfg.max_steps, &mut row)?;
                        }
                        Ok((start, row, steps))
                    })
                    .collect()
            });
            let mut pm = PassageMatrix::zeros(n, cfg.walkers);
            let mut steps = 0u64;
            for part in parts {
                let (i, row, s) = part?;
                for (acc, c) in pm.counts[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *acc += c;
                }
                steps += s;
            }
            (WalkOutput::Passage(pm), steps)
        }
        WalkMode::TimeDependent { source, steps } => {
            if source >= n || Some(source) == table.absorbing() {
                return Err(Error::domain(format!("source {source} is not a live position")));
            }
            if table.absorbing().is_some() {
                return Err(Error::Config("time-dependent walks need reflecting boundaries".into()));
            }
            let hists: Vec<Vec<u64>> = pool.install(|| {
                chunks(cfg.walkers)
                    .collect::<Vec<_>>()
                    .par_iter()
                    .map(|&(a, b)| {
                        let mut h = vec![0u64; n];
                        for walker in a..b {
                            h[fixed_walk(table, source, seed, walker, steps)] += 1;
                        }
                        h
                    })
                    .collect()
            });
            let mut hist = vec![0u64; n];
            for h in hists {
                for (acc, c) in hist.iter_mut().zip(h) {
                    *acc += c;
                }
            }
            (WalkOutput::Terminal(hist), steps * cfg.walkers)
        }
    };
    log::debug!("walk finished: {steps} steps on {n} positions");
    Ok((out, Ledger::new(steps, backend.cost())))
}
