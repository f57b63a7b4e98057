//! Sequential / data-parallel execution of the inner loops.
//!
//! Every kernel works on fixed-size chunks whose partial results are combined
//! in chunk order, so the two execution modes produce bitwise-identical
//! output regardless of the number of worker threads.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Rows per work unit. Independent of the thread count.
pub const CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Runs on the rayon pool; identical to `Sequential` without the
    /// `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

fn chunk_ranges(len: usize, chunk: usize) -> impl Iterator<Item = Range<usize>> + Clone {
    (0..len.div_ceil(chunk)).map(move |c| c * chunk..((c + 1) * chunk).min(len))
}

/// Writes `f(i)` into `out[i]` for every index.
pub fn fill<F>(exec: Execution, out: &mut [f64], f: F)
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, block)| {
            let base = c * CHUNK;
            for (k, slot) in block.iter_mut().enumerate() {
                *slot = f(base + k);
            }
        });
        return;
    }
    let _ = exec;
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = f(i);
    }
}

/// Runs `f(first_index, block)` over consecutive chunks of `out`.
pub fn for_each_chunk_mut<T, F>(exec: Execution, out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        out.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, block)| f(c * CHUNK, block));
        return;
    }
    let _ = exec;
    for (c, block) in out.chunks_mut(CHUNK).enumerate() {
        f(c * CHUNK, block);
    }
}

/// Like [`for_each_chunk_mut`] but collects one value per chunk, in order.
pub fn map_chunks_mut<T, R, F>(exec: Execution, out: &mut [T], f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(usize, &mut [T]) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return out
            .par_chunks_mut(CHUNK)
            .enumerate()
            .map(|(c, block)| f(c * CHUNK, block))
            .collect();
    }
    let _ = exec;
    out.chunks_mut(CHUNK)
        .enumerate()
        .map(|(c, block)| f(c * CHUNK, block))
        .collect()
}

/// Evaluates `f` on each chunk range of `0..len`, in order.
pub fn map_ranges<R, F>(exec: Execution, len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(Range<usize>) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        let ranges: Vec<_> = chunk_ranges(len, CHUNK).collect();
        return ranges.into_par_iter().map(f).collect();
    }
    let _ = exec;
    chunk_ranges(len, CHUNK).map(f).collect()
}

/// Maps over independent items (blocks, eigenvectors), preserving order.
pub fn map_items<I, R, F>(exec: Execution, items: &[I], f: F) -> Vec<R>
where
    I: Sync,
    R: Send,
    F: Fn(&I) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Deterministic sum of `f(i)` over `0..len`.
pub fn sum_by<F>(exec: Execution, len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_ranges(exec, len, |r| r.map(&f).sum::<f64>())
        .into_iter()
        .sum()
}

/// Neumaier-compensated variant of [`sum_by`].
pub fn compensated_sum_by<F>(exec: Execution, len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let partials = map_ranges(exec, len, |r| {
        let mut acc = Neumaier::default();
        for i in r {
            acc.add(f(i));
        }
        acc
    });
    let mut total = Neumaier::default();
    for p in partials {
        total.add(p.sum);
        total.add(p.comp);
    }
    total.value()
}

pub fn dot(exec: Execution, a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    sum_by(exec, a.len(), |i| a[i] * b[i])
}

pub fn norm2(exec: Execution, a: &[f64]) -> f64 {
    dot(exec, a, a).sqrt()
}

pub fn l1_distance(exec: Execution, a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    sum_by(exec, a.len(), |i| (a[i] - b[i]).abs())
}

pub fn sort_unstable<T: Ord + Send>(exec: Execution, v: &mut [T]) {
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        v.par_sort_unstable();
        return;
    }
    let _ = exec;
    v.sort_unstable();
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
