use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

type SolveFn<I, O> = dyn Fn(&I) -> Option<O> + Send + Sync;

/// A solver whose every invocation is counted.
///
/// The counter is the executable meaning of "uses of the principle": a run
/// that consults a counted solver once has made one typical use of it.
/// Increments are atomic, so concurrent callers are all accounted for.
pub struct CountedSolver<I: ?Sized, O> {
    inner: Box<SolveFn<I, O>>,
    calls: AtomicU64,
}

impl<I: ?Sized, O> CountedSolver<I, O> {
    pub fn new(solver: impl Fn(&I) -> Option<O> + Send + Sync + 'static) -> Self {
        CountedSolver { inner: Box::new(solver), calls: AtomicU64::new(0) }
    }

    pub fn solve(&self, instance: &I) -> Option<O> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        (self.inner)(instance)
    }

    pub fn count(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<I: ?Sized, O> fmt::Debug for CountedSolver<I, O> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CountedSolver").field("calls", &self.count()).finish()
    }
}

pub fn counted<I: ?Sized, O>(solver: impl Fn(&I) -> Option<O> + Send + Sync + 'static) -> CountedSolver<I, O> {
    CountedSolver::new(solver)
}

/// The outcome of a computation together with the number of solver calls it
/// made.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run<T> {
    pub value: T,
    pub applications: u64,
}

impl<T> Run<T> {
    pub fn is_one_typical_use(&self) -> bool {
        self.applications == 1
    }
}

/// Run `body` against `solver`, attributing to it the calls it makes.
///
/// Calls made concurrently by other users of the same solver would be
/// attributed too; give each run its own solver when that matters.
pub fn counted_run<I: ?Sized, O, T>(
    solver: &CountedSolver<I, O>,
    body: impl FnOnce(&CountedSolver<I, O>) -> T,
) -> Run<T> {
    let before = solver.count();
    let value = body(solver);
    Run { value, applications: solver.count() - before }
}
