use ineqcert_core::exec::Executor;
use rayon::prelude::*;

/// Order-preserving parallel map on a dedicated rayon pool.
pub struct RayonExecutor {
    pool: rayon::ThreadPool,
    workers: usize,
}

impl RayonExecutor {
    pub fn new(workers: usize) -> anyhow::Result<RayonExecutor> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
        Ok(RayonExecutor { pool, workers })
    }
}

impl Executor for RayonExecutor {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        if self.workers == 1 || items.len() < 2 {
            return items.iter().map(f).collect();
        }
        self.pool.install(|| items.par_iter().map(f).collect())
    }

    fn workers(&self) -> usize {
        self.workers
    }
}
