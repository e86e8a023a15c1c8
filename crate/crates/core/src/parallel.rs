//! Order-preserving map over independent jobs, on rayon when the `parallel`
//! feature is enabled and sequentially otherwise.

/// How [`map`] schedules its jobs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// Applies `f` to every item, returning results in input order.
///
/// `threads` caps the worker count of the parallel path; `None` uses rayon's
/// global pool. Without the `parallel` feature both modes run sequentially.
pub fn map<T, R, F>(items: &[T], mode: Execution, threads: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode {
        Execution::Sequential => items.iter().map(f).collect(),
        Execution::Parallel => parallel_map(items, threads, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, R, F>(items: &[T], threads: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    let run = || items.par_iter().map(&f).collect();
    match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                log::warn!("could not build a {n}-thread pool ({e}); using the global pool");
                run()
            }
        },
        None => run(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, R, F>(items: &[T], _threads: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Thread cap from the `GRADBENCH_THREADS` environment variable, if set to a
/// positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("GRADBENCH_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_and_keep_order() {
        let items: Vec<u64> = (0..200).collect();
        let seq = map(&items, Execution::Sequential, None, |v| v * v);
        let par = map(&items, Execution::Parallel, Some(3), |v| v * v);
        assert_eq!(seq, par);
        assert_eq!(seq[17], 289);
    }
}
