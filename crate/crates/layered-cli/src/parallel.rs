//! Multi-worker level scan with output identical to the sequential one.
//!
//! Worker `j` walks the full restricted-growth-string stream but tests only
//! classes whose rank is `j` modulo the worker count (advancing is amortised
//! constant time, so the duplicated walking is cheap next to witness tests).
//! The merged result is the minimum failing rank, which is exactly the class
//! the sequential scan stops at; pass counts come from the closed-form class
//! count. Budgeted, resumed, or symmetry-pruned scans are rejected upstream,
//! so the translation rank = tested-class number holds.

use std::sync::atomic::{AtomicU64, Ordering};

use layered_core::search::{rgs_count, CompiledLevel, LevelScan, LevelStart, RgsIter};
use layered_core::Error;

pub fn scan_parallel(
    jobs: usize,
    level: &CompiledLevel,
    start: LevelStart,
) -> Result<(LevelScan, u64), Error> {
    if start.rgs.is_some() || start.budget.is_some() {
        return Err(Error::InvalidConfig(
            "parallel scans do not support resume or budgets".into(),
        ));
    }
    let d = level.domain_len();
    let total = rgs_count(d, level.r);
    let best = AtomicU64::new(u64::MAX);
    let mut fails: Vec<Option<(u64, Vec<u8>)>> = Vec::new();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..jobs as u64)
            .map(|j| {
                let best = &best;
                s.spawn(move || worker(level, jobs as u64, j, best))
            })
            .collect();
        fails = handles.into_iter().map(|h| h.join().expect("scan worker")).collect();
    });
    let first_fail = fails.into_iter().flatten().min_by_key(|(rank, _)| *rank);
    Ok(match first_fail {
        Some((rank, rgs)) => (
            LevelScan::Fail {
                rgs,
                classes_checked: rank as u128 + 1,
            },
            rank + 1,
        ),
        None => {
            let nodes = u64::try_from(total).map_err(|_| Error::FragmentTooLarge {
                needed: total,
                cap: u64::MAX as u128,
            })?;
            (LevelScan::Pass { classes_checked: total }, nodes)
        }
    })
}

fn worker(level: &CompiledLevel, jobs: u64, shard: u64, best: &AtomicU64) -> Option<(u64, Vec<u8>)> {
    let mut it = RgsIter::start(level.domain_len(), level.r);
    let mut rank = 0u64;
    let mut hint = 0usize;
    while it.live() {
        if rank % jobs == shard && !level.has_witness(it.digits(), &mut hint) {
            best.fetch_min(rank, Ordering::Relaxed);
            return Some((rank, it.digits().to_vec()));
        }
        // Another worker's failure at a smaller rank ends this shard.
        if rank % 8192 == 0 && best.load(Ordering::Relaxed) < rank {
            return None;
        }
        rank += 1;
        it.advance();
    }
    None
}
