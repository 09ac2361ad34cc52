//! Index-parallel map with a sequential fallback.
//!
//! Results always come back in index order, so any reduction performed over
//! them afterwards is independent of the worker count.

/// Worker count; `0` means "all available threads".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Workers(pub usize);

impl Workers {
    pub const SEQUENTIAL: Workers = Workers(1);
    pub const ALL: Workers = Workers(0);

    fn is_sequential(self) -> bool {
        self.0 == 1 || cfg!(not(feature = "parallel"))
    }
}

impl Default for Workers {
    fn default() -> Self {
        Workers::ALL
    }
}

/// `(0..count).map(f)`, possibly spread over a thread pool.
pub fn map_indices<T, E, F>(count: u64, workers: Workers, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64) -> Result<T, E> + Sync + Send,
{
    if workers.is_sequential() {
        return (0..count).map(f).collect();
    }
    parallel::map_indices(count, workers, f)
}

#[cfg(feature = "parallel")]
mod parallel {
    use super::Workers;
    use rayon::prelude::*;

    pub(super) fn map_indices<T, E, F>(count: u64, workers: Workers, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(u64) -> Result<T, E> + Sync + Send,
    {
        let run = || (0..count).into_par_iter().map(&f).collect::<Result<Vec<T>, E>>();
        if workers.0 == 0 {
            return run();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(workers.0).build() {
            Ok(pool) => pool.install(run),
            // thread spawn failure: degrade to the global pool
            Err(_) => run(),
        }
    }
}

#[cfg(not(feature = "parallel"))]
mod parallel {
    use super::Workers;

    pub(super) fn map_indices<T, E, F>(count: u64, _workers: Workers, f: F) -> Result<Vec<T>, E>
    where
        F: Fn(u64) -> Result<T, E>,
    {
        (0..count).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        for w in [Workers(1), Workers(2), Workers(4), Workers::ALL] {
            let v: Vec<u64> = map_indices::<_, (), _>(1000, w, |i| Ok(i * i)).unwrap();
            assert_eq!(v, (0..1000).map(|i| i * i).collect::<Vec<_>>());
        }
    }

    #[test]
    fn errors_propagate() {
        let r: Result<Vec<u64>, u64> = map_indices(100, Workers(3), |i| if i == 57 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(57));
    }
}
