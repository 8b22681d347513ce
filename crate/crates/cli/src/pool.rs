//! Pair-level fan-out with a worker cap from `CHAOSKIT_THREADS` (0 = auto).
//! Results are merged by input index, so the output is deterministic no
//! matter how many workers ran.

pub fn worker_count(items: usize) -> usize {
    let configured = std::env::var("CHAOSKIT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    let auto = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let n = if configured == 0 { auto } else { configured };
    n.clamp(1, items.max(1))
}

/// Order-preserving parallel map over a slice.
pub fn parallel_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    let workers = worker_count(items.len());
    if workers <= 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let mut buckets: Vec<Vec<(usize, U)>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                scope.spawn(move || {
                    items
                        .iter()
                        .enumerate()
                        .skip(w)
                        .step_by(workers)
                        .map(|(i, item)| (i, f(item)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        buckets = handles.into_iter().map(|h| h.join().unwrap()).collect();
    });
    let mut merged: Vec<(usize, U)> = buckets.into_iter().flatten().collect();
    merged.sort_by_key(|(i, _)| *i);
    merged.into_iter().map(|(_, u)| u).collect()
}
