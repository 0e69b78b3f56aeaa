//! Peak memory around a single mining job.
//!
//! Linux exposes the resident high-water mark as `VmHWM`, and writing `5` to
//! `/proc/self/clear_refs` resets it. Where that reset is not possible the
//! figure would include everything before the job, so we fall back to the
//! allocation high-water mark kept by [`CountingAlloc`].

use std::alloc::{GlobalAlloc, Layout, System};
use std::fs;
use std::sync::atomic::{AtomicUsize, Ordering};

use coium::PeakMemory;

pub struct CountingAlloc;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for CountingAlloc {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            grow(layout.size());
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }

    unsafe fn alloc_zeroed(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc_zeroed(layout);
        if !p.is_null() {
            grow(layout.size());
        }
        p
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = System.realloc(ptr, layout, new_size);
        if !p.is_null() {
            if new_size >= layout.size() {
                grow(new_size - layout.size());
            } else {
                CURRENT.fetch_sub(layout.size() - new_size, Ordering::Relaxed);
            }
        }
        p
    }
}

fn grow(by: usize) {
    let now = CURRENT.fetch_add(by, Ordering::Relaxed) + by;
    PEAK.fetch_max(now, Ordering::Relaxed);
}

enum Source {
    Rss,
    Alloc { base: usize },
}

pub struct MemoryProbe(Source);

impl MemoryProbe {
    /// Call right before the job.
    pub fn start() -> Self {
        if fs::write("/proc/self/clear_refs", "5").is_ok() && vm_hwm().is_some() {
            return MemoryProbe(Source::Rss);
        }
        let base = CURRENT.load(Ordering::Relaxed);
        PEAK.store(base, Ordering::Relaxed);
        MemoryProbe(Source::Alloc { base })
    }

    pub fn finish(self) -> Option<PeakMemory> {
        match self.0 {
            Source::Rss => vm_hwm().map(|bytes| PeakMemory {
                bytes,
                source: "rss-vmhwm".to_string(),
            }),
            Source::Alloc { base } => Some(PeakMemory {
                bytes: PEAK.load(Ordering::Relaxed).saturating_sub(base) as u64,
                source: "alloc-hwm".to_string(),
            }),
        }
    }
}

fn vm_hwm() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}
