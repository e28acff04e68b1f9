//! Order-maintenance list: amortized constant-ish insertion of an item just
//! before or just after an existing one, deletion, relocation, and O(1)
//! order comparison between any two live items.
//!
//! The representation is a two-level labeling scheme. Items live in buckets
//! of bounded size arranged in a doubly-linked chain; each bucket carries a
//! 64-bit label strictly increasing along the chain, and each item carries a
//! 64-bit sub-label strictly increasing within its bucket. Comparing two
//! items is one lexicographic comparison of `(bucket label, sub-label)`.
//! When an insertion finds no room between neighboring labels, the bucket is
//! re-spaced or split (and, rarely, all bucket labels are renumbered); the
//! relative order of existing items never changes, so handed-out comparisons
//! stay stable. Rebalancing touches O(bucket) items, which amortizes to
//! polylogarithmic cost per operation.

use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use thiserror::Error;

/// Bucket capacity before a split. Small enough that rebalancing stays cheap,
/// large enough that bucket-chain maintenance is rare.
const MAX_BUCKET: usize = 64;

/// Sentinel for "no bucket" in chain links and slot bookkeeping.
const NIL: u32 = u32::MAX;

static NEXT_LIST_ID: AtomicU64 = AtomicU64::new(1);

/// Opaque token for one live item in one list.
///
/// A handle is valid from the insertion that produced it until the item is
/// deleted; it survives relocations of its item. Handles remember the list
/// that issued them, so using one against another list is an error rather
/// than silent nonsense.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrderHandle {
    slot: u32,
    generation: u32,
    list: u64,
}

/// Snapshot of an item's position, totally ordered to match the list order.
///
/// A key is valid only until the next mutating call on the list: insertions,
/// deletions, and moves may relabel items. Callers that sort or heapify by
/// position must finish consuming their keys before mutating the list again.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PositionKey {
    bucket_label: u64,
    sub_label: u64,
}

/// Misuse of an [`OrderHandle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OrderError {
    /// The handle's item was deleted (or the handle was forged).
    #[error("stale order handle: the item was deleted")]
    StaleHandle,
    /// The handle was issued by a different list instance.
    #[error("order handle belongs to a different list")]
    ForeignList,
}

struct Slot<T> {
    generation: u32,
    /// Owning bucket, or `NIL` while the slot is free.
    bucket: u32,
    sub_label: u64,
    value: Option<T>,
}

struct Bucket {
    label: u64,
    prev: u32,
    next: u32,
    /// `(sub_label, slot)` pairs, ascending by sub-label.
    items: Vec<(u64, u32)>,
}

/// The list itself. `T` is arbitrary per-item payload.
pub struct OrderList<T> {
    list_id: u64,
    slots: Vec<Slot<T>>,
    free_slots: Vec<u32>,
    buckets: Vec<Bucket>,
    free_buckets: Vec<u32>,
    head: u32,
    len: usize,
}

enum Side {
    Before,
    After,
}

impl<T> Default for OrderList<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> OrderList<T> {
    /// Create an empty list.
    pub fn new() -> Self {
        OrderList {
            list_id: NEXT_LIST_ID.fetch_add(1, AtomicOrdering::Relaxed),
            slots: Vec::new(),
            free_slots: Vec::new(),
            buckets: Vec::new(),
            free_buckets: Vec::new(),
            head: NIL,
            len: 0,
        }
    }

    /// Number of live items.
    pub fn len(&self) -> usize {
        self.len
    }

    /// True if no items are live.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn check(&self, h: OrderHandle) -> Result<(), OrderError> {
        if h.list != self.list_id {
            return Err(OrderError::ForeignList);
        }
        match self.slots.get(h.slot as usize) {
            Some(s) if s.generation == h.generation && s.bucket != NIL => Ok(()),
            _ => Err(OrderError::StaleHandle),
        }
    }

    fn handle(&self, slot: u32) -> OrderHandle {
        OrderHandle {
            slot,
            generation: self.slots[slot as usize].generation,
            list: self.list_id,
        }
    }

    /// Insert `value` before all existing items (as the sole item if the
    /// list is empty) and return its handle.
    pub fn insert_first(&mut self, value: T) -> OrderHandle {
        if self.head == NIL {
            let mid = u64::MAX / 2;
            let b = self.alloc_bucket(mid, NIL, NIL);
            self.head = b;
            let slot = self.alloc_slot(value);
            self.slots[slot as usize].bucket = b;
            self.slots[slot as usize].sub_label = mid;
            self.buckets[b as usize].items.push((mid, slot));
            self.len += 1;
            self.handle(slot)
        } else {
            let first_slot = self.buckets[self.head as usize].items[0].1;
            let anchor = self.handle(first_slot);
            self.insert_before(anchor, value)
                .expect("first item handle is live by construction")
        }
    }

    /// Insert `value` immediately before `anchor`: afterwards no live item
    /// orders strictly between the new item and `anchor`.
    pub fn insert_before(&mut self, anchor: OrderHandle, value: T) -> Result<OrderHandle, OrderError> {
        self.check(anchor)?;
        let slot = self.alloc_slot(value);
        self.place_relative(anchor.slot, slot, Side::Before);
        self.len += 1;
        Ok(self.handle(slot))
    }

    /// Insert `value` immediately after `anchor`.
    pub fn insert_after(&mut self, anchor: OrderHandle, value: T) -> Result<OrderHandle, OrderError> {
        self.check(anchor)?;
        let slot = self.alloc_slot(value);
        self.place_relative(anchor.slot, slot, Side::After);
        self.len += 1;
        Ok(self.handle(slot))
    }

    /// Remove the item, returning its payload. The relative order of all
    /// other items is untouched; the handle becomes stale.
    pub fn delete(&mut self, h: OrderHandle) -> Result<T, OrderError> {
        self.check(h)?;
        self.detach(h.slot);
        let s = &mut self.slots[h.slot as usize];
        s.generation = s.generation.wrapping_add(1);
        let value = s.value.take().expect("live slot holds a value");
        self.free_slots.push(h.slot);
        self.len -= 1;
        Ok(value)
    }

    /// Relocate the item `x` to sit immediately before `anchor`, keeping its
    /// handle valid. Relocating an item before itself is a no-op.
    pub fn move_before(&mut self, anchor: OrderHandle, x: OrderHandle) -> Result<(), OrderError> {
        self.check(anchor)?;
        self.check(x)?;
        if anchor.slot == x.slot {
            return Ok(());
        }
        self.detach(x.slot);
        self.place_relative(anchor.slot, x.slot, Side::Before);
        Ok(())
    }

    /// Relocate the item `x` to sit immediately after `anchor`, keeping its
    /// handle valid. Relocating an item after itself is a no-op.
    pub fn move_after(&mut self, anchor: OrderHandle, x: OrderHandle) -> Result<(), OrderError> {
        self.check(anchor)?;
        self.check(x)?;
        if anchor.slot == x.slot {
            return Ok(());
        }
        self.detach(x.slot);
        self.place_relative(anchor.slot, x.slot, Side::After);
        Ok(())
    }

    /// True iff `x` strictly precedes `y`. An item never precedes itself.
    pub fn compare(&self, x: OrderHandle, y: OrderHandle) -> Result<bool, OrderError> {
        self.check(x)?;
        self.check(y)?;
        if x.slot == y.slot {
            return Ok(false);
        }
        Ok(self.key_of(x.slot) < self.key_of(y.slot))
    }

    /// The item's position snapshot; see [`PositionKey`] for its lifetime.
    pub fn position_key(&self, h: OrderHandle) -> Result<PositionKey, OrderError> {
        self.check(h)?;
        Ok(self.key_of(h.slot))
    }

    /// Shared access to the item's payload.
    pub fn get(&self, h: OrderHandle) -> Result<&T, OrderError> {
        self.check(h)?;
        Ok(self.slots[h.slot as usize]
            .value
            .as_ref()
            .expect("live slot holds a value"))
    }

    /// All live items in list order.
    pub fn iter(&self) -> Iter<'_, T> {
        Iter {
            list: self,
            bucket: self.head,
            index: 0,
        }
    }

    fn key_of(&self, slot: u32) -> PositionKey {
        let s = &self.slots[slot as usize];
        PositionKey {
            bucket_label: self.buckets[s.bucket as usize].label,
            sub_label: s.sub_label,
        }
    }

    fn alloc_slot(&mut self, value: T) -> u32 {
        if let Some(slot) = self.free_slots.pop() {
            let s = &mut self.slots[slot as usize];
            s.value = Some(value);
            slot
        } else {
            self.slots.push(Slot {
                generation: 0,
                bucket: NIL,
                sub_label: 0,
                value: Some(value),
            });
            (self.slots.len() - 1) as u32
        }
    }

    fn alloc_bucket(&mut self, label: u64, prev: u32, next: u32) -> u32 {
        if let Some(b) = self.free_buckets.pop() {
            let bucket = &mut self.buckets[b as usize];
            bucket.label = label;
            bucket.prev = prev;
            bucket.next = next;
            bucket.items.clear();
            b
        } else {
            self.buckets.push(Bucket {
                label,
                prev,
                next,
                items: Vec::with_capacity(MAX_BUCKET / 2),
            });
            (self.buckets.len() - 1) as u32
        }
    }

    /// Remove the slot from its bucket, freeing the bucket if it empties.
    /// The slot keeps its generation and payload; `bucket` becomes `NIL`.
    fn detach(&mut self, slot: u32) {
        let b = self.slots[slot as usize].bucket;
        let sub = self.slots[slot as usize].sub_label;
        let items = &mut self.buckets[b as usize].items;
        let idx = items
            .binary_search_by_key(&sub, |e| e.0)
            .expect("live slot is present in its bucket");
        items.remove(idx);
        self.slots[slot as usize].bucket = NIL;

        if self.buckets[b as usize].items.is_empty() {
            let (prev, next) = {
                let bucket = &self.buckets[b as usize];
                (bucket.prev, bucket.next)
            };
            if prev != NIL {
                self.buckets[prev as usize].next = next;
            } else {
                self.head = next;
            }
            if next != NIL {
                self.buckets[next as usize].prev = prev;
            }
            self.free_buckets.push(b);
        }
    }

    /// Place a detached slot immediately before or after the anchor slot,
    /// rebalancing labels as needed.
    fn place_relative(&mut self, anchor_slot: u32, moving_slot: u32, side: Side) {
        loop {
            let b = self.slots[anchor_slot as usize].bucket;
            debug_assert_ne!(b, NIL, "anchor must be live");
            let anchor_sub = self.slots[anchor_slot as usize].sub_label;
            let items = &self.buckets[b as usize].items;
            let idx = items
                .binary_search_by_key(&anchor_sub, |e| e.0)
                .expect("live anchor is present in its bucket");
            let insert_at = match side {
                Side::Before => idx,
                Side::After => idx + 1,
            };
            let lo = if insert_at == 0 { 0 } else { items[insert_at - 1].0 };
            let hi = if insert_at == items.len() {
                u64::MAX
            } else {
                items[insert_at].0
            };

            if hi - lo >= 2 {
                let sub = lo + (hi - lo) / 2;
                self.buckets[b as usize].items.insert(insert_at, (sub, moving_slot));
                self.slots[moving_slot as usize].bucket = b;
                self.slots[moving_slot as usize].sub_label = sub;
                if self.buckets[b as usize].items.len() > MAX_BUCKET {
                    self.split_bucket(b);
                }
                return;
            }

            // No label room at this position: make room and retry. Both
            // paths leave every remaining gap at least 2^57 wide, so the
            // retry succeeds.
            if self.buckets[b as usize].items.len() >= MAX_BUCKET {
                self.split_bucket(b);
            } else {
                self.respace_bucket(b);
            }
        }
    }

    /// Spread the bucket's sub-labels evenly over the full range.
    fn respace_bucket(&mut self, b: u32) {
        let count = self.buckets[b as usize].items.len() as u64;
        debug_assert!(count > 0);
        let step = u64::MAX / (count + 1);
        for i in 0..count as usize {
            let sub = (i as u64 + 1) * step;
            let slot = self.buckets[b as usize].items[i].1;
            self.buckets[b as usize].items[i].0 = sub;
            self.slots[slot as usize].sub_label = sub;
        }
    }

    /// Split the bucket in half, giving the upper half a fresh bucket chained
    /// immediately after, and re-space both halves.
    fn split_bucket(&mut self, b: u32) {
        let mid = self.buckets[b as usize].items.len() / 2;
        debug_assert!(mid >= 1, "never split a bucket of fewer than two items");
        let upper: Vec<(u64, u32)> = self.buckets[b as usize].items.split_off(mid);

        let label = self.label_after(b);
        let next = self.buckets[b as usize].next;
        let nb = self.alloc_bucket(label, b, next);
        self.buckets[b as usize].next = nb;
        if next != NIL {
            self.buckets[next as usize].prev = nb;
        }
        for &(_, slot) in &upper {
            self.slots[slot as usize].bucket = nb;
        }
        self.buckets[nb as usize].items = upper;

        self.respace_bucket(b);
        self.respace_bucket(nb);
    }

    /// A label strictly between bucket `b`'s and its successor's, renumbering
    /// the whole chain first if the gap is exhausted.
    fn label_after(&mut self, b: u32) -> u64 {
        let gap_of = |list: &Self, b: u32| {
            let lo = list.buckets[b as usize].label;
            let next = list.buckets[b as usize].next;
            let hi = if next == NIL {
                u64::MAX
            } else {
                list.buckets[next as usize].label
            };
            (lo, hi)
        };
        let (lo, hi) = gap_of(self, b);
        if hi - lo >= 2 {
            return lo + (hi - lo) / 2;
        }
        self.renumber_buckets();
        let (lo, hi) = gap_of(self, b);
        debug_assert!(hi - lo >= 2, "renumbering restores label gaps");
        lo + (hi - lo) / 2
    }

    /// Assign evenly spaced labels along the whole bucket chain. Item order
    /// is untouched, so comparisons across the renumbering are consistent.
    fn renumber_buckets(&mut self) {
        let mut count = 0u64;
        let mut b = self.head;
        while b != NIL {
            count += 1;
            b = self.buckets[b as usize].next;
        }
        debug_assert!(count > 0);
        let step = u64::MAX / (count + 1);
        let mut label = step;
        let mut b = self.head;
        while b != NIL {
            self.buckets[b as usize].label = label;
            label += step;
            b = self.buckets[b as usize].next;
        }
    }
}

/// Iterator over live items in list order.
pub struct Iter<'a, T> {
    list: &'a OrderList<T>,
    bucket: u32,
    index: usize,
}

impl<'a, T> Iterator for Iter<'a, T> {
    type Item = (OrderHandle, &'a T);

    fn next(&mut self) -> Option<Self::Item> {
        while self.bucket != NIL {
            let bucket = &self.list.buckets[self.bucket as usize];
            if self.index < bucket.items.len() {
                let slot = bucket.items[self.index].1;
                self.index += 1;
                let value = self.list.slots[slot as usize]
                    .value
                    .as_ref()
                    .expect("live slot holds a value");
                return Some((self.list.handle(slot), value));
            }
            self.bucket = bucket.next;
            self.index = 0;
        }
        None
    }
}
