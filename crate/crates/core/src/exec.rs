//! Sequential and data-parallel execution of the inner loops.
//!
//! Every kernel is written against the [`Exec`] trait so the sequential
//! fallback stays compiled (and benchmarkable) even when the `parallel`
//! feature is on. Reductions are arranged so that both backends produce
//! bit-identical results: sums are accumulated over fixed-size chunks in
//! index order, and "best element" reductions use a strict total order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk width for order-independent floating-point sums. Fixed so the
/// parallel and sequential backends add the same partial sums.
pub(crate) const SUM_CHUNK: usize = 4096;

pub trait Exec: Sync {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;

    fn fill_indexed<T, F>(&self, out: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;

    /// Sum of `f(i)` over `0..n`, chunked for reproducibility.
    fn sum_indexed<F>(&self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send;

    /// Best element under `better` (a strict total order: `better(a, b)`
    /// means `a` must replace `b`). `eval` may skip indices with `None`.
    fn best_indexed<T, F, C>(&self, n: usize, eval: F, better: C) -> Option<T>
    where
        T: Send,
        F: Fn(usize) -> Option<T> + Sync + Send,
        C: Fn(&T, &T) -> bool + Sync + Send;
}

/// Single-threaded backend.
pub struct Seq;

impl Exec for Seq {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }

    fn fill_indexed<T, F>(&self, out: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = f(i);
        }
    }

    fn sum_indexed<F>(&self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let mut total = 0.0;
        let mut start = 0;
        while start < n {
            let end = (start + SUM_CHUNK).min(n);
            let mut part = 0.0;
            for i in start..end {
                part += f(i);
            }
            total += part;
            start = end;
        }
        total
    }

    fn best_indexed<T, F, C>(&self, n: usize, eval: F, better: C) -> Option<T>
    where
        T: Send,
        F: Fn(usize) -> Option<T> + Sync + Send,
        C: Fn(&T, &T) -> bool + Sync + Send,
    {
        let mut best: Option<T> = None;
        for i in 0..n {
            if let Some(cand) = eval(i) {
                match &best {
                    Some(cur) if !better(&cand, cur) => {}
                    _ => best = Some(cand),
                }
            }
        }
        best
    }
}

/// Rayon-backed backend.
#[cfg(feature = "parallel")]
pub struct Par;

#[cfg(feature = "parallel")]
impl Exec for Par {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).into_par_iter().map(f).collect()
    }

    fn fill_indexed<T, F>(&self, out: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        out.par_iter_mut().enumerate().for_each(|(i, slot)| *slot = f(i));
    }

    fn sum_indexed<F>(&self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let chunks = n.div_ceil(SUM_CHUNK);
        let partials: Vec<f64> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * SUM_CHUNK;
                let end = (start + SUM_CHUNK).min(n);
                let mut part = 0.0;
                for i in start..end {
                    part += f(i);
                }
                part
            })
            .collect();
        partials.iter().sum()
    }

    fn best_indexed<T, F, C>(&self, n: usize, eval: F, better: C) -> Option<T>
    where
        T: Send,
        F: Fn(usize) -> Option<T> + Sync + Send,
        C: Fn(&T, &T) -> bool + Sync + Send,
    {
        (0..n)
            .into_par_iter()
            .filter_map(eval)
            .reduce_with(|a, b| if better(&b, &a) { b } else { a })
    }
}

#[cfg(feature = "parallel")]
pub use Par as Auto;
#[cfg(not(feature = "parallel"))]
pub use Seq as Auto;
