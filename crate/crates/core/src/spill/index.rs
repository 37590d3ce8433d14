//! Page summaries and the candidate-page lookup.
//!
//! Every page is summarized by its strongest and weakest value. Summaries sit
//! in chain order, strongest page first, and page ranges never overlap, so the
//! page that could contain any given value is unique. Lookups run against the
//! in-memory summary list (zero page I/O); past a size threshold a fanout tree
//! is layered on top, and each tree node visited during a descent counts as
//! one index-node read, mirroring the on-disk layout this models.

use super::store::PageId;
use crate::maxdeque::Polarity;
use crate::value::Scalar;
use std::collections::VecDeque;

/// Strongest (`first`) and weakest (`last`) value held by one page.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageSummary<T> {
    pub page: PageId,
    pub first: T,
    pub last: T,
}

/// One level-group of child ranges; children are summaries at level 0 and
/// nodes of the level below otherwise.
#[derive(Debug, Clone, Copy)]
struct TreeNode<T> {
    first: T,
    last: T,
    child_start: usize,
    child_len: usize,
}

#[derive(Debug)]
pub struct SummaryIndex<T> {
    summaries: VecDeque<PageSummary<T>>,
    polarity: Polarity,
    fanout: usize,
    tree_threshold: usize,
    /// Bottom-up levels; `levels[0]` groups summaries, the last level is the
    /// single root. Rebuilt lazily after mutations.
    levels: Vec<Vec<TreeNode<T>>>,
    dirty: bool,
    node_reads: u64,
}

impl<T: Scalar> SummaryIndex<T> {
    pub fn new(polarity: Polarity, fanout: usize, tree_threshold: usize) -> SummaryIndex<T> {
        assert!(fanout >= 2);
        SummaryIndex {
            summaries: VecDeque::new(),
            polarity,
            fanout,
            tree_threshold,
            levels: Vec::new(),
            dirty: false,
            node_reads: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.summaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summaries.is_empty()
    }

    pub fn get(&self, pos: usize) -> &PageSummary<T> {
        &self.summaries[pos]
    }

    pub fn front(&self) -> Option<&PageSummary<T>> {
        self.summaries.front()
    }

    pub fn back(&self) -> Option<&PageSummary<T>> {
        self.summaries.back()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PageSummary<T>> {
        self.summaries.iter()
    }

    pub fn node_reads(&self) -> u64 {
        self.node_reads
    }

    /// True while the lookup path goes through the fanout tree.
    pub fn tree_active(&self) -> bool {
        self.summaries.len() > self.tree_threshold
    }

    pub fn push_back(&mut self, summary: PageSummary<T>) {
        if let Some(back) = self.summaries.back() {
            debug_assert!(
                self.polarity.dominates(&back.last, &summary.first),
                "chain order violated"
            );
        }
        self.summaries.push_back(summary);
        self.dirty = true;
    }

    pub fn pop_front(&mut self) -> Option<PageSummary<T>> {
        self.dirty = true;
        self.summaries.pop_front()
    }

    /// Drops every summary at or past `pos`, returning them front-to-back.
    pub fn split_off(&mut self, pos: usize) -> Vec<PageSummary<T>> {
        let tail: Vec<PageSummary<T>> = self.summaries.drain(pos..).collect();
        if !tail.is_empty() {
            self.dirty = true;
        }
        tail
    }

    pub fn set_front_first(&mut self, value: T) {
        let front = self.summaries.front_mut().expect("front summary");
        if front.first.total_cmp(&value).is_ne() {
            front.first = value;
            self.dirty = true;
        }
    }

    pub fn set_last(&mut self, pos: usize, value: T) {
        let s = &mut self.summaries[pos];
        if s.last.total_cmp(&value).is_ne() {
            s.last = value;
            self.dirty = true;
        }
    }

    /// Position and id of the unique page whose value range contains the
    /// weakest stored value still dominating `v`; `None` when `v` dominates
    /// every stored value.
    ///
    /// The flat list answers with zero I/O of any kind. With the tree active,
    /// every node visited on the root-to-summary path counts as one
    /// index-node read.
    pub fn find_candidate_page(&mut self, v: T) -> Option<(usize, PageId)> {
        if self.tree_active() {
            self.find_via_tree(v)
        } else {
            self.find_flat(v)
        }
    }

    fn find_flat(&self, v: T) -> Option<(usize, PageId)> {
        // Page firsts weaken strictly along the chain, so domination over `v`
        // is a prefix property.
        let x = self
            .summaries
            .partition_point(|s| self.polarity.dominates(&s.first, &v));
        if x == 0 {
            return None;
        }
        Some((x - 1, self.summaries[x - 1].page))
    }

    fn find_via_tree(&mut self, v: T) -> Option<(usize, PageId)> {
        self.rebuild_if_dirty();
        let root_level = self.levels.len() - 1;
        debug_assert_eq!(self.levels[root_level].len(), 1);
        self.node_reads += 1; // root
        let mut node = self.levels[root_level][0];
        if !self.polarity.dominates(&node.first, &v) {
            return None;
        }
        for level in (0..root_level).rev() {
            let children = &self.levels[level][node.child_start..node.child_start + node.child_len];
            let x = children
                .iter()
                .position(|c| !self.polarity.dominates(&c.first, &v))
                .unwrap_or(children.len());
            debug_assert!(x >= 1, "parent dominated, so its first child must");
            node = children[x - 1];
            self.node_reads += 1;
        }
        // Final hop from the level-0 node to the summary it covers.
        let pos = {
            let base = node.child_start;
            let group = self
                .summaries
                .range(base..base + node.child_len)
                .collect::<Vec<_>>();
            let x = group
                .iter()
                .position(|s| !self.polarity.dominates(&s.first, &v))
                .unwrap_or(group.len());
            debug_assert!(x >= 1);
            base + x - 1
        };
        self.node_reads += 1;
        Some((pos, self.summaries[pos].page))
    }

    fn rebuild_if_dirty(&mut self) {
        if !self.dirty {
            return;
        }
        self.levels.clear();
        if self.summaries.is_empty() {
            self.dirty = false;
            return;
        }
        let mut level: Vec<TreeNode<T>> = self
            .summaries
            .iter()
            .collect::<Vec<_>>()
            .chunks(self.fanout)
            .scan(0usize, |start, chunk| {
                let node = TreeNode {
                    first: chunk[0].first,
                    last: chunk[chunk.len() - 1].last,
                    child_start: *start,
                    child_len: chunk.len(),
                };
                *start += chunk.len();
                Some(node)
            })
            .collect();
        loop {
            let done = level.len() == 1;
            self.levels.push(level.clone());
            if done {
                break;
            }
            level = level
                .chunks(self.fanout)
                .scan(0usize, |start, chunk| {
                    let node = TreeNode {
                        first: chunk[0].first,
                        last: chunk[chunk.len() - 1].last,
                        child_start: *start,
                        child_len: chunk.len(),
                    };
                    *start += chunk.len();
                    Some(node)
                })
                .collect();
        }
        self.dirty = false;
    }
}
