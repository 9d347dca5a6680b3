/// Sentinel for "no neighbour" in the intrusive list.
const NIL: u32 = u32::MAX;

/// LRU cache over object indices `0..n`, kept as an intrusive doubly linked
/// recency list (most recent at the head) with O(1) membership lookup.
#[derive(Debug, Clone)]
pub struct LruState {
    capacity: usize,
    len: usize,
    head: u32,
    tail: u32,
    prev: Vec<u32>,
    next: Vec<u32>,
    present: Vec<bool>,
}

impl LruState {
    /// Empty cache holding at most `capacity` of `n_objects` objects.
    ///
    /// # Panics
    ///
    /// If `n_objects` does not fit the `u32` index space.
    pub fn new(n_objects: usize, capacity: usize) -> Self {
        assert!(n_objects < NIL as usize, "too many objects for u32 indices");
        Self {
            capacity,
            len: 0,
            head: NIL,
            tail: NIL,
            prev: vec![NIL; n_objects],
            next: vec![NIL; n_objects],
            present: vec![false; n_objects],
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, object: usize) -> bool {
        self.present[object]
    }

    /// Requests `object`: moves it to the front on a hit, inserts it and
    /// evicts the least recently used object on a miss. Returns whether the
    /// request hit.
    pub fn access(&mut self, object: usize) -> bool {
        let idx = object as u32;
        let hit = self.present[object];
        if hit {
            if self.head != idx {
                self.unlink(idx);
                self.push_front(idx);
            }
        } else if self.capacity > 0 {
            if self.len == self.capacity {
                let victim = self.tail;
                self.unlink(victim);
                self.present[victim as usize] = false;
                self.len -= 1;
            }
            self.push_front(idx);
            self.present[object] = true;
            self.len += 1;
        }
        debug_assert!(self.len <= self.capacity);
        debug_assert!(self.capacity == 0 || self.head == idx);
        hit
    }

    /// Cached objects, most recently used first.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let mut cur = self.head;
        std::iter::from_fn(move || {
            if cur == NIL {
                None
            } else {
                let out = cur as usize;
                cur = self.next[out];
                Some(out)
            }
        })
    }

    fn unlink(&mut self, idx: u32) {
        let (p, n) = (self.prev[idx as usize], self.next[idx as usize]);
        if p == NIL {
            self.head = n;
        } else {
            self.next[p as usize] = n;
        }
        if n == NIL {
            self.tail = p;
        } else {
            self.prev[n as usize] = p;
        }
        self.prev[idx as usize] = NIL;
        self.next[idx as usize] = NIL;
    }

    fn push_front(&mut self, idx: u32) {
        self.prev[idx as usize] = NIL;
        self.next[idx as usize] = self.head;
        if self.head == NIL {
            self.tail = idx;
        } else {
            self.prev[self.head as usize] = idx;
        }
        self.head = idx;
    }
}
