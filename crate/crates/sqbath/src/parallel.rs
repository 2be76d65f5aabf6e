//! Deterministic fan-out of independent, indexed work items.
//!
//! Every item `i` is produced by the same pure call `f(i)` no matter which
//! worker runs it, and results are reassembled in index order, so the output
//! is bit-identical for any thread count.  Workers take indices round-robin
//! (`w, w + threads, ...`), which balances sweeps whose cost varies smoothly
//! along the grid.

/// Evaluate `f(0..n_items)` on up to `threads` workers, results in index order.
pub(crate) fn run_indexed<T, F>(n_items: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = threads.max(1).min(n_items.max(1));
    if workers <= 1 {
        return (0..n_items).map(f).collect();
    }
    let mut slots: Vec<Option<T>> = (0..n_items).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(workers);
        for w in 0..workers {
            let f = &f;
            handles.push(scope.spawn(move || {
                let mut out = Vec::new();
                let mut i = w;
                while i < n_items {
                    out.push((i, f(i)));
                    i += workers;
                }
                out
            }));
        }
        for h in handles {
            for (i, v) in h.join().expect("worker panicked") {
                slots[i] = Some(v);
            }
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("every index is assigned to exactly one worker"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::run_indexed;

    #[test]
    fn matches_serial_for_any_thread_count() {
        let serial: Vec<u64> = (0..97u64).map(|i| i * i + 1).collect();
        for threads in [1, 2, 7, 64] {
            let par = run_indexed(97, threads, |i| (i as u64) * (i as u64) + 1);
            assert_eq!(par, serial, "threads = {threads}");
        }
    }

    #[test]
    fn handles_empty_and_oversubscribed_inputs() {
        let empty: Vec<u32> = run_indexed(0, 8, |_| 7);
        assert!(empty.is_empty());
        let tiny = run_indexed(3, 64, |i| i);
        assert_eq!(tiny, vec![0, 1, 2]);
    }
}
