//! Fixed-slot page file.
//!
//! One file per deque; slot `id` lives at byte offset `id * slot_bytes`. A
//! slot holds `[entry_count: u32 LE]` followed by `entry_count` records of
//! `[value: 8 bytes LE][count: u64 LE]`; the value bytes are the two's
//! complement integer or the IEEE 754 bits, fixed by the deque's element type.
//! Freed slots go on a free list and are reused; the file never compacts.

use crate::error::{Error, Result};
use crate::maxdeque::DequeEntry;
use crate::value::Scalar;
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::marker::PhantomData;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

pub type PageId = u64;

const HEADER_BYTES: usize = 4;
const ENTRY_BYTES: usize = 16;

static FILE_SEQ: AtomicU64 = AtomicU64::new(0);

pub(crate) struct PageStore<T> {
    file: File,
    path: PathBuf,
    page_capacity: usize,
    slot_bytes: usize,
    free: Vec<PageId>,
    slots: u64,
    pub(crate) page_reads: u64,
    pub(crate) page_writes: u64,
    _marker: PhantomData<T>,
}

impl<T: Scalar> PageStore<T> {
    pub fn create(dir: &Path, page_capacity: usize) -> Result<PageStore<T>> {
        assert!(page_capacity >= 1);
        std::fs::create_dir_all(dir)?;
        let seq = FILE_SEQ.fetch_add(1, Ordering::Relaxed);
        let path = dir.join(format!("spill-{}-{}.pages", std::process::id(), seq));
        let file = OpenOptions::new()
            .read(true)
            .write(true)
            .create_new(true)
            .open(&path)?;
        Ok(PageStore {
            file,
            path,
            page_capacity,
            slot_bytes: HEADER_BYTES + ENTRY_BYTES * page_capacity,
            free: Vec::new(),
            slots: 0,
            page_reads: 0,
            page_writes: 0,
            _marker: PhantomData,
        })
    }

    /// Pages currently holding data.
    pub fn live_pages(&self) -> u64 {
        self.slots - self.free.len() as u64
    }

    pub fn alloc(&mut self) -> PageId {
        if let Some(id) = self.free.pop() {
            return id;
        }
        let id = self.slots;
        self.slots += 1;
        id
    }

    pub fn release(&mut self, id: PageId) {
        debug_assert!(id < self.slots);
        debug_assert!(!self.free.contains(&id));
        self.free.push(id);
    }

    pub fn write_page(&mut self, id: PageId, entries: &[DequeEntry<T>]) -> Result<()> {
        debug_assert!(!entries.is_empty() && entries.len() <= self.page_capacity);
        let mut buf = vec![0u8; self.slot_bytes];
        buf[..4].copy_from_slice(&(entries.len() as u32).to_le_bytes());
        for (i, e) in entries.iter().enumerate() {
            let at = HEADER_BYTES + i * ENTRY_BYTES;
            buf[at..at + 8].copy_from_slice(&e.value.to_le_bytes8());
            buf[at + 8..at + 16].copy_from_slice(&e.count.to_le_bytes());
        }
        self.file
            .seek(SeekFrom::Start(id * self.slot_bytes as u64))?;
        self.file.write_all(&buf)?;
        self.page_writes += 1;
        Ok(())
    }

    pub fn read_page(&mut self, id: PageId) -> Result<Vec<DequeEntry<T>>> {
        let entries = self.read_page_raw(id)?;
        self.page_reads += 1;
        Ok(entries)
    }

    /// Diagnostic read that bypasses the I/O counters.
    pub fn read_page_uncounted(&mut self, id: PageId) -> Result<Vec<DequeEntry<T>>> {
        self.read_page_raw(id)
    }

    fn read_page_raw(&mut self, id: PageId) -> Result<Vec<DequeEntry<T>>> {
        debug_assert!(id < self.slots);
        let mut buf = vec![0u8; self.slot_bytes];
        self.file
            .seek(SeekFrom::Start(id * self.slot_bytes as u64))?;
        self.file.read_exact(&mut buf)?;
        let n = u32::from_le_bytes(buf[..4].try_into().expect("4-byte header")) as usize;
        if n == 0 || n > self.page_capacity {
            return Err(Error::SpillIo(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("page {id} holds invalid entry count {n}"),
            )));
        }
        let mut entries = Vec::with_capacity(n);
        for i in 0..n {
            let at = HEADER_BYTES + i * ENTRY_BYTES;
            let value = T::from_le_bytes8(buf[at..at + 8].try_into().expect("8-byte value"));
            let count = u64::from_le_bytes(buf[at + 8..at + 16].try_into().expect("8-byte count"));
            entries.push(DequeEntry { value, count });
        }
        Ok(entries)
    }
}

impl<T> Drop for PageStore<T> {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}
