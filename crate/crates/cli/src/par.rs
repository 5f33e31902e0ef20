//! Deterministic parallel trial loops.
//!
//! Trials are split into fixed-size chunks by index; chunk `c` covers
//! trials `[c*chunk, (c+1)*chunk)` and trial `t` always draws from
//! `base.offset(t)`. Chunks are mapped in parallel, collected in index
//! order, and folded sequentially, so the result is bit-identical for any
//! worker count; workers only change the scheduling.

use forrelation_core::RngStream;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Name of the environment variable supplying the default worker count.
pub const WORKERS_ENV: &str = "FORRELATION_WORKERS";

/// Worker count: explicit flag, else `FORRELATION_WORKERS`, else the
/// machine's available parallelism.
pub fn resolve_workers(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&w| w >= 1)
    })
    .unwrap_or_else(|| {
        std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1)
    })
    .max(1)
}

/// Runs `trials` independent trials and folds their contributions into an
/// accumulator of type `A`, deterministically for any `workers`.
pub fn parallel_fold<A, Init, Step, Merge>(
    workers: usize,
    base: RngStream,
    trials: u64,
    chunk: u64,
    init: Init,
    step: Step,
    merge: Merge,
) -> A
where
    A: Send,
    Init: Fn() -> A + Sync + Send,
    Step: Fn(&mut A, u64, &mut ChaCha8Rng) + Sync + Send,
    Merge: Fn(&mut A, A),
{
    assert!(chunk >= 1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    let chunk_count = trials.div_ceil(chunk);
    let partials: Vec<A> = pool.install(|| {
        (0..chunk_count)
            .into_par_iter()
            .map(|c| {
                let mut acc = init();
                let hi = ((c + 1) * chunk).min(trials);
                for t in c * chunk..hi {
                    let mut rng = base.offset(t).rng();
                    step(&mut acc, t, &mut rng);
                }
                acc
            })
            .collect()
    });
    let mut total = init();
    for part in partials {
        merge(&mut total, part);
    }
    total
}

/// Maps `tasks` independent seeded tasks in parallel, preserving order;
/// task `i` receives `base.offset(i)`.
pub fn parallel_tasks<T, F>(workers: usize, base: RngStream, tasks: u64, run: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, RngStream) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(|| {
        (0..tasks)
            .into_par_iter()
            .map(|i| run(i, base.offset(i)))
            .collect()
    })
}
