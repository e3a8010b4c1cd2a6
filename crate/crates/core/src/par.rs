//! Execution mode for the data-parallel loops.
//!
//! Every parallel loop in the crate is written as "map an index range, then
//! reduce in index order", so sequential and parallel runs produce
//! bit-identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Execution::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Maps `f` over `0..n`, returning results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
        }
    }

    /// Smallest index in `0..n` for which `f` returns `Some`.
    pub fn find_first<T, F>(self, n: usize, f: F) -> Option<T>
    where
        T: Send,
        F: Fn(usize) -> Option<T> + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).find_map(f),
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().find_map_first(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let v = Execution::default().map(100, |i| i * i);
        assert_eq!(v, (0..100).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn find_first_is_leftmost() {
        let hit = Execution::default().find_first(1000, |i| (i % 7 == 3).then_some(i));
        assert_eq!(hit, Some(3));
        assert_eq!(Execution::Sequential.find_first(10, |_| None::<usize>), None);
    }
}
