//! Extremum deque with a bounded in-memory hot tail and a disk-resident
//! prefix.
//!
//! The logical structure is one monotonic deque. Its strongest entries, which
//! change rarely, live in a chain of immutable-in-the-middle pages on disk,
//! strongest page first; the newest, weakest entries stay in memory. Page
//! summaries make the common cases cheap: a value weaker than the whole hot
//! tail never touches disk, a value stronger than a whole page discards that
//! page without reading it, and only a boundary page is ever read and
//! rewritten. Departures compare against the front summary, so non-matching
//! leaves cost no I/O at all.

mod index;
mod store;

pub use index::{PageSummary, SummaryIndex};
pub use store::PageId;

use crate::error::{Error, Result};
use crate::maxdeque::{DequeEntry, MonotonicDeque, Polarity};
use crate::value::Scalar;
use std::path::PathBuf;
use store::PageStore;

/// Tuning for a spilled deque session.
#[derive(Debug, Clone)]
pub struct SpillConfig {
    /// Hot-tail entries kept in memory before overflow flushes to disk.
    pub memory_budget: usize,
    /// Entries per page slot.
    pub page_capacity: usize,
    /// Children per index-tree node.
    pub index_fanout: usize,
    /// Summary count above which lookups go through the tree.
    pub tree_threshold: usize,
    /// Directory for the page file.
    pub dir: PathBuf,
}

impl Default for SpillConfig {
    fn default() -> SpillConfig {
        SpillConfig {
            memory_budget: 4096,
            page_capacity: 256,
            index_fanout: 64,
            tree_threshold: 4096,
            dir: std::env::temp_dir(),
        }
    }
}

impl SpillConfig {
    fn validate(&self) -> Result<()> {
        if self.memory_budget < 1 {
            return Err(Error::Ingest("memory budget must be at least 1".into()));
        }
        if self.page_capacity < 1 {
            return Err(Error::Ingest("page capacity must be at least 1".into()));
        }
        if self.index_fanout < 2 {
            return Err(Error::Ingest("index fanout must be at least 2".into()));
        }
        Ok(())
    }
}

/// Counters for the disk half of a spilled deque.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IoStats {
    pub page_reads: u64,
    pub page_writes: u64,
    pub pages_live: u64,
    pub index_node_reads: u64,
}

pub struct SpilledDeque<T> {
    hot: MonotonicDeque<T>,
    store: PageStore<T>,
    index: SummaryIndex<T>,
    polarity: Polarity,
    memory_budget: usize,
    page_capacity: usize,
    hot_tail_peak: usize,
    pages_live_peak: u64,
}

impl<T: Scalar> SpilledDeque<T> {
    pub fn new(polarity: Polarity, config: &SpillConfig) -> Result<SpilledDeque<T>> {
        config.validate()?;
        Ok(SpilledDeque {
            hot: MonotonicDeque::new(polarity),
            store: PageStore::create(&config.dir, config.page_capacity)?,
            index: SummaryIndex::new(polarity, config.index_fanout, config.tree_threshold),
            polarity,
            memory_budget: config.memory_budget,
            page_capacity: config.page_capacity,
            hot_tail_peak: 0,
            pages_live_peak: 0,
        })
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn is_empty(&self) -> bool {
        self.hot.is_empty() && self.index.is_empty()
    }

    /// Entries currently in the in-memory hot tail.
    pub fn hot_len(&self) -> usize {
        self.hot.len()
    }

    pub fn hot_tail_peak(&self) -> usize {
        self.hot_tail_peak
    }

    pub fn pages_live_peak(&self) -> u64 {
        self.pages_live_peak
    }

    /// A value enters the window.
    ///
    /// Values weaker than the hot-tail front are absorbed in memory. A value
    /// dominating the whole hot tail consults the page chain: pages entirely
    /// dominated are discarded without being read, and only the single
    /// boundary page is read (and rewritten when part of it survives). The
    /// entering value itself always lands in the hot tail, so a call performs
    /// at most one data-page read and one truncation write, plus the writes of
    /// any overflow flush.
    pub fn enter(&mut self, v: T) -> Result<()> {
        if !v.is_finite_scalar() {
            return Err(Error::NonFiniteValue(v.to_f64_lossy()));
        }
        let absorbed_by_hot = match self.hot.front() {
            Some(front) => !self.polarity.dominates(&v, &front.value),
            None => false,
        };
        if absorbed_by_hot {
            self.hot.enter(v)?;
        } else {
            // Everything in the hot tail is strictly weaker than v.
            self.hot.clear();
            let merged = self.discard_dominated(v)?;
            self.hot.enter_merged(v, merged + 1)?;
        }
        if self.hot.len() > self.memory_budget {
            self.flush_overflow()?;
        }
        self.hot_tail_peak = self.hot_tail_peak.max(self.hot.len());
        Ok(())
    }

    /// A value leaves the window in FIFO order.
    ///
    /// The front of the structure is the front summary's first value, so a
    /// non-matching leave is a pure comparison. A matching leave reads the
    /// front page, decrements or drops its front entry, and either rewrites
    /// the page or frees it: at most one read and one write.
    pub fn leave(&mut self, v: T) -> Result<()> {
        let Some(front) = self.index.front().copied() else {
            return self.hot.leave(v);
        };
        if front.first.total_cmp(&v).is_ne() {
            return Ok(());
        }
        let mut entries = self.store.read_page(front.page)?;
        debug_assert!(!entries.is_empty());
        entries[0].count -= 1;
        if entries[0].count == 0 {
            entries.remove(0);
        }
        if entries.is_empty() {
            self.store.release(front.page);
            self.index.pop_front();
        } else {
            self.store.write_page(front.page, &entries)?;
            self.index.set_front_first(entries[0].value);
        }
        Ok(())
    }

    /// Current window extremum, served without I/O.
    pub fn current_extremum(&self) -> Option<T> {
        match self.index.front() {
            Some(front) => Some(front.first),
            None => self.hot.current_extremum(),
        }
    }

    /// Packs the oldest hot entries into pages until the hot tail fits the
    /// budget again. Each iteration fills one page with up to a page's worth
    /// of entries, so a single-entry overflow costs a single page write.
    pub fn flush_overflow(&mut self) -> Result<()> {
        while self.hot.len() > self.memory_budget {
            let take = self.page_capacity.min(self.hot.len());
            let mut entries = Vec::with_capacity(take);
            for _ in 0..take {
                entries.push(self.hot.pop_front_entry().expect("hot entry"));
            }
            let id = self.store.alloc();
            self.store.write_page(id, &entries)?;
            self.index.push_back(PageSummary {
                page: id,
                first: entries[0].value,
                last: entries[entries.len() - 1].value,
            });
        }
        self.pages_live_peak = self.pages_live_peak.max(self.store.live_pages());
        Ok(())
    }

    /// Io counters up to now.
    pub fn read_io_stats(&self) -> IoStats {
        IoStats {
            page_reads: self.store.page_reads,
            page_writes: self.store.page_writes,
            pages_live: self.store.live_pages(),
            index_node_reads: self.index.node_reads(),
        }
    }

    /// Frees every page `v` dominates without reading it, truncates the one
    /// boundary page if `v` lands inside it, and returns the repeat count of
    /// a stored entry equal to `v`, which the caller folds into the hot tail.
    fn discard_dominated(&mut self, v: T) -> Result<u64> {
        let cand = self.index.find_candidate_page(v);
        let keep = match cand {
            Some((pos, _)) => pos + 1,
            None => 0,
        };
        let mut merged = 0u64;
        if keep < self.index.len() {
            // Pages past the candidate hold nothing stronger than v; an equal
            // value can only be the very first entry of the first such page.
            let victim_front = *self.index.get(keep);
            if victim_front.first.total_cmp(&v).is_eq() {
                let entries = self.store.read_page(victim_front.page)?;
                merged = entries[0].count;
            }
            for s in self.index.split_off(keep) {
                self.store.release(s.page);
            }
        }
        if let Some((pos, page)) = cand {
            let last = self.index.get(pos).last;
            if !self.polarity.dominates(&last, &v) {
                // Boundary inside the candidate page: keep the dominating
                // prefix, absorb an equal entry's count, drop the rest.
                let mut entries = self.store.read_page(page)?;
                let cut = entries
                    .iter()
                    .position(|e| !self.polarity.dominates(&e.value, &v))
                    .unwrap_or(entries.len());
                debug_assert!(cut >= 1, "candidate first dominates v");
                if cut < entries.len() && entries[cut].value.total_cmp(&v).is_eq() {
                    merged = entries[cut].count;
                }
                entries.truncate(cut);
                self.store.write_page(page, &entries)?;
                self.index.set_last(pos, entries[entries.len() - 1].value);
            }
        }
        Ok(merged)
    }

    /// Whole logical deque, strongest first. Diagnostic: reads bypass the I/O
    /// counters.
    pub fn collect_entries(&mut self) -> Result<Vec<DequeEntry<T>>> {
        let mut out = Vec::new();
        let pages: Vec<PageId> = self.index.iter().map(|s| s.page).collect();
        for page in pages {
            out.extend(self.store.read_page_uncounted(page)?);
        }
        out.extend(self.hot.entries().copied());
        Ok(out)
    }

    /// Checks every structural invariant; panics on violation. Debugging aid
    /// for tests: reads bypass the I/O counters.
    pub fn assert_valid(&mut self) {
        assert!(
            self.hot.len() <= self.memory_budget,
            "hot tail exceeds budget"
        );
        self.hot.assert_valid();
        let pages: Vec<PageSummary<T>> = self.index.iter().copied().collect();
        let mut all: Vec<DequeEntry<T>> = Vec::new();
        for s in &pages {
            let entries = self.store.read_page_uncounted(s.page).expect("page read");
            assert!(!entries.is_empty(), "empty page persisted");
            assert!(entries.len() <= self.page_capacity);
            assert!(
                entries[0].value.total_cmp(&s.first).is_eq(),
                "summary first drifted"
            );
            assert!(
                entries[entries.len() - 1].value.total_cmp(&s.last).is_eq(),
                "summary last drifted"
            );
            all.extend(entries);
        }
        all.extend(self.hot.entries().copied());
        for pair in all.windows(2) {
            assert!(
                self.polarity.dominates(&pair[0].value, &pair[1].value),
                "global order violated: {:?} then {:?}",
                pair[0],
                pair[1]
            );
        }
        assert!(all.iter().all(|e| e.count >= 1));
        assert_eq!(self.index.len() as u64, self.store.live_pages());
    }
}
