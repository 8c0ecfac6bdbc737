//! Multi-threaded exhaustive verification.
//!
//! The verification plan splits the partition space into shards keyed by
//! restricted-growth prefixes.  Workers claim shard indices from a shared
//! counter, so any thread count produces the same shard outcomes, and the
//! canonical merge makes the final report independent of completion order.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use hedonic_core::popularity::{PopularityReport, ShardOutcome, VerificationPlan};
use hedonic_core::{HedonicGame, Partition, Result};

/// Exhaustively verifies popularity using up to `threads` workers.
/// The report is byte-identical to the single-threaded one.
pub fn verify_popular_threaded(
    game: &HedonicGame,
    target: &Partition,
    limit: usize,
    threads: usize,
) -> Result<PopularityReport> {
    let plan = VerificationPlan::new(game, target, limit)?;
    let shard_count = plan.shard_count();
    if threads <= 1 || shard_count <= 1 {
        return Ok(plan.run_sequential());
    }
    let next_shard = AtomicUsize::new(0);
    let outcomes: Mutex<Vec<Option<ShardOutcome>>> = Mutex::new(vec![None; shard_count]);
    let workers = threads.min(shard_count);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next_shard.fetch_add(1, Ordering::Relaxed);
                if index >= shard_count {
                    break;
                }
                let outcome = plan.run_shard(index);
                outcomes.lock().expect("no poisoned worker")[index] = Some(outcome);
            });
        }
    });
    let outcomes = outcomes.into_inner().expect("no poisoned worker");
    Ok(plan.merge(&outcomes))
}
