//! Data-parallel helpers with a sequential fallback.
//!
//! Without the `parallel` feature every [`Execution`] runs sequentially.
//! Reductions use a fixed chunking so sequential and parallel runs produce
//! bitwise-identical sums.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length used by [`dot`] and [`for_each_chunk_mut`].
pub const CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when work will actually be spread across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `0..n`, returning results in index order.
pub fn map_range<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Maps `f` over a slice, returning results in order.
pub fn map_slice<S, T, F>(exec: Execution, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Calls `f(offset, chunk)` for each [`CHUNK`]-sized piece of `out`.
pub fn for_each_chunk_mut<T, F>(exec: Execution, out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        out.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| f(c * CHUNK, chunk));
        return;
    }
    let _ = exec;
    out.chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(c, chunk)| f(c * CHUNK, chunk));
}

/// Dot product with a deterministic reduction order.
pub fn dot(exec: Execution, a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let partial = |(x, y): (&[f64], &[f64])| -> f64 { x.iter().zip(y).map(|(p, q)| p * q).sum() };
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        let parts: Vec<f64> = a
            .par_chunks(CHUNK)
            .zip(b.par_chunks(CHUNK))
            .map(partial)
            .collect();
        return parts.into_iter().sum();
    }
    let _ = exec;
    a.chunks(CHUNK).zip(b.chunks(CHUNK)).map(partial).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_bitwise() {
        let a: Vec<f64> = (0..20_000).map(|i| ((i as f64) * 0.37).sin()).collect();
        let b: Vec<f64> = (0..20_000).map(|i| ((i as f64) * 0.11).cos()).collect();
        let s = dot(Execution::Sequential, &a, &b);
        let p = dot(Execution::Parallel, &a, &b);
        assert_eq!(s.to_bits(), p.to_bits());

        let sq = map_range(Execution::Sequential, 100, |i| i * i);
        let pq = map_range(Execution::Parallel, 100, |i| i * i);
        assert_eq!(sq, pq);

        let mut x = vec![0usize; 10_000];
        for_each_chunk_mut(Execution::Parallel, &mut x, |off, c| {
            for (k, v) in c.iter_mut().enumerate() {
                *v = off + k;
            }
        });
        assert!(x.iter().enumerate().all(|(i, v)| i == *v));
    }
}
