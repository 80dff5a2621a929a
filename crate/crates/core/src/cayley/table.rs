//! Open-addressing table of element keys stored in one byte arena.
//!
//! Lookup compares the 64-bit hash first and then the full key bytes, so
//! hash collisions never merge distinct elements.

pub type KeyHasher = fn(&[u8]) -> u64;

/// FNV-1a followed by a splitmix finalizer. Stable across runs and
/// platforms, which keeps ball construction order reproducible.
pub fn stable_hash(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^= h >> 30;
    h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h ^= h >> 27;
    h = h.wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

#[derive(Clone)]
pub struct KeyTable {
    arena: Vec<u8>,
    /// `offsets[i]..offsets[i + 1]` spans key `i` in the arena.
    offsets: Vec<u64>,
    hashes: Vec<u64>,
    /// Entry index plus one; zero marks an empty slot.
    slots: Vec<u32>,
    hasher: KeyHasher,
}

impl Default for KeyTable {
    fn default() -> Self {
        KeyTable::new()
    }
}

impl KeyTable {
    pub fn new() -> Self {
        KeyTable::with_hasher(stable_hash)
    }

    /// A table using a custom hash; tests inject degenerate hashes here.
    pub fn with_hasher(hasher: KeyHasher) -> Self {
        KeyTable { arena: Vec::new(), offsets: vec![0], hashes: Vec::new(), slots: vec![0; 16], hasher }
    }

    pub fn len(&self) -> usize {
        self.hashes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hashes.is_empty()
    }

    pub fn key(&self, i: usize) -> &[u8] {
        &self.arena[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    /// Approximate heap footprint in bytes.
    pub fn bytes_used(&self) -> usize {
        self.arena.capacity() + 8 * self.offsets.capacity() + 8 * self.hashes.capacity() + 4 * self.slots.capacity()
    }

    fn probe(&self, key: &[u8], h: u64) -> Result<usize, usize> {
        let mask = self.slots.len() - 1;
        let mut pos = h as usize & mask;
        loop {
            match self.slots[pos] {
                0 => return Err(pos),
                s => {
                    let i = (s - 1) as usize;
                    if self.hashes[i] == h && self.key(i) == key {
                        return Ok(i);
                    }
                }
            }
            pos = (pos + 1) & mask;
        }
    }

    pub fn get(&self, key: &[u8]) -> Option<usize> {
        self.probe(key, (self.hasher)(key)).ok()
    }

    /// Index of `key`, inserting it if absent; the flag is `true` on insert.
    pub fn insert(&mut self, key: &[u8]) -> (usize, bool) {
        let h = (self.hasher)(key);
        match self.probe(key, h) {
            Ok(i) => (i, false),
            Err(slot) => {
                let i = self.hashes.len();
                assert!(i < u32::MAX as usize - 1, "key table full");
                self.arena.extend_from_slice(key);
                self.offsets.push(self.arena.len() as u64);
                self.hashes.push(h);
                self.slots[slot] = i as u32 + 1;
                if 8 * self.len() > 5 * self.slots.len() {
                    self.grow();
                }
                (i, true)
            }
        }
    }

    fn grow(&mut self) {
        let cap = self.slots.len() * 2;
        let mask = cap - 1;
        let mut slots = vec![0u32; cap];
        for (i, &h) in self.hashes.iter().enumerate() {
            let mut pos = h as usize & mask;
            while slots[pos] != 0 {
                pos = (pos + 1) & mask;
            }
            slots[pos] = i as u32 + 1;
        }
        self.slots = slots;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colliding_hashes_keep_keys_distinct() {
        let mut t = KeyTable::with_hasher(|_| 7);
        let keys: Vec<Vec<u8>> = (0u16..300).map(|i| i.to_le_bytes().to_vec()).collect();
        for (n, k) in keys.iter().enumerate() {
            assert_eq!(t.insert(k), (n, true));
        }
        for (n, k) in keys.iter().enumerate() {
            assert_eq!(t.insert(k), (n, false));
            assert_eq!(t.get(k), Some(n));
            assert_eq!(t.key(n), k.as_slice());
        }
        assert_eq!(t.get(&[1, 2, 3]), None);
    }

    #[test]
    fn prefix_keys_are_distinct() {
        let mut t = KeyTable::new();
        let (a, _) = t.insert(&[1, 2]);
        let (b, _) = t.insert(&[1, 2, 0]);
        let (c, _) = t.insert(&[]);
        assert!(a != b && b != c && a != c);
        assert_eq!(t.get(&[1, 2]), Some(a));
        assert_eq!(t.get(&[]), Some(c));
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(stable_hash(b"loop"), stable_hash(b"loop"));
        assert_ne!(stable_hash(b"loop"), stable_hash(b"pool"));
    }
}
