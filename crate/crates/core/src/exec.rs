//! Work distribution. The kernel only needs an order-preserving parallel map;
//! the std companion crate supplies a thread-pool implementation.

use alloc::vec::Vec;

pub trait Executor: Sync {
    /// Applies `f` to every item; the output order matches the input order.
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send;

    fn workers(&self) -> usize;
}

/// Runs everything on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        items.iter().map(f).collect()
    }

    fn workers(&self) -> usize {
        1
    }
}
