//! Generational slab whose nodes are threaded onto intrusive doubly linked
//! lists.
//!
//! One [`ListArena`] stores the nodes of many lists; each list is
//! represented by a [`ListHead`] kept wherever the owner of the list lives.
//! Keys stay valid until their node is removed, removal is O(1) given the
//! key and the list head, and lists are traversed in insertion order.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::marker::PhantomData;

const NIL: u32 = u32::MAX;

pub struct Key<T> {
    index: u32,
    generation: u32,
    _marker: PhantomData<fn() -> T>,
}

impl<T> Key<T> {
    fn new(index: u32, generation: u32) -> Self {
        Key { index, generation, _marker: PhantomData }
    }

    /// A key that never resolves.
    pub fn dangling() -> Self {
        Key::new(NIL, u32::MAX)
    }

    pub fn index(self) -> usize {
        self.index as usize
    }
}

impl<T> Clone for Key<T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for Key<T> {}

impl<T> PartialEq for Key<T> {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.generation == other.generation
    }
}

impl<T> Eq for Key<T> {}

impl<T> Hash for Key<T> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.index.hash(state);
        self.generation.hash(state);
    }
}

impl<T> fmt::Debug for Key<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}v{}", self.index, self.generation)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ListHead {
    head: u32,
    tail: u32,
    len: usize,
}

impl Default for ListHead {
    fn default() -> Self {
        ListHead { head: NIL, tail: NIL, len: 0 }
    }
}

impl ListHead {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

#[derive(Debug, Clone)]
struct Node<T> {
    value: T,
    prev: u32,
    next: u32,
}

#[derive(Debug, Clone)]
struct Slot<T> {
    generation: u32,
    node: Option<Node<T>>,
}

#[derive(Debug, Clone)]
pub struct ListArena<T> {
    slots: Vec<Slot<T>>,
    free: Vec<u32>,
    live: usize,
}

impl<T> Default for ListArena<T> {
    fn default() -> Self {
        ListArena { slots: Vec::new(), free: Vec::new(), live: 0 }
    }
}

impl<T> ListArena<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of live nodes across all lists.
    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// Number of slots ever allocated (live or free).
    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn contains(&self, key: Key<T>) -> bool {
        self.node(key).is_some()
    }

    pub fn get(&self, key: Key<T>) -> Option<&T> {
        self.node(key).map(|n| &n.value)
    }

    pub fn get_mut(&mut self, key: Key<T>) -> Option<&mut T> {
        match self.slots.get_mut(key.index as usize) {
            Some(slot) if slot.generation == key.generation => slot.node.as_mut().map(|n| &mut n.value),
            _ => None,
        }
    }

    pub fn push_back(&mut self, list: &mut ListHead, value: T) -> Key<T> {
        let node = Node { value, prev: list.tail, next: NIL };
        let index = match self.free.pop() {
            Some(i) => {
                self.slots[i as usize].node = Some(node);
                i
            }
            None => {
                let i = u32::try_from(self.slots.len()).expect("arena exhausted");
                assert!(i != NIL, "arena exhausted");
                self.slots.push(Slot { generation: 0, node: Some(node) });
                i
            }
        };
        if list.tail == NIL {
            list.head = index;
        } else {
            self.slots[list.tail as usize].node.as_mut().expect("dangling tail").next = index;
        }
        list.tail = index;
        list.len += 1;
        self.live += 1;
        Key::new(index, self.slots[index as usize].generation)
    }

    /// Unlinks `key` from `list` and frees its slot. The caller must pass the
    /// list the node was pushed onto.
    pub fn remove(&mut self, list: &mut ListHead, key: Key<T>) -> Option<T> {
        let slot = self.slots.get_mut(key.index as usize)?;
        if slot.generation != key.generation {
            return None;
        }
        let node = slot.node.take()?;
        slot.generation = slot.generation.wrapping_add(1);
        if node.prev == NIL {
            debug_assert_eq!(list.head, key.index);
            list.head = node.next;
        } else {
            self.slots[node.prev as usize].node.as_mut().expect("dangling prev").next = node.next;
        }
        if node.next == NIL {
            debug_assert_eq!(list.tail, key.index);
            list.tail = node.prev;
        } else {
            self.slots[node.next as usize].node.as_mut().expect("dangling next").prev = node.prev;
        }
        list.len -= 1;
        self.live -= 1;
        self.free.push(key.index);
        Some(node.value)
    }

    pub fn first(&self, list: &ListHead) -> Option<Key<T>> {
        self.key_at(list.head)
    }

    pub fn last(&self, list: &ListHead) -> Option<Key<T>> {
        self.key_at(list.tail)
    }

    /// Successor of `key` in whatever list holds it.
    pub fn next(&self, key: Key<T>) -> Option<Key<T>> {
        self.node(key).and_then(|n| self.key_at(n.next))
    }

    pub fn iter<'a>(&'a self, list: &ListHead) -> Iter<'a, T> {
        Iter { arena: self, cursor: list.head, remaining: list.len }
    }

    /// Keys of `list` in order, collected so the arena can be mutated while
    /// walking them.
    pub fn keys(&self, list: &ListHead) -> Vec<Key<T>> {
        self.iter(list).map(|(k, _)| k).collect()
    }

    fn key_at(&self, index: u32) -> Option<Key<T>> {
        if index == NIL {
            None
        } else {
            Some(Key::new(index, self.slots[index as usize].generation))
        }
    }

    fn node(&self, key: Key<T>) -> Option<&Node<T>> {
        match self.slots.get(key.index as usize) {
            Some(slot) if slot.generation == key.generation => slot.node.as_ref(),
            _ => None,
        }
    }
}

pub struct Iter<'a, T> {
    arena: &'a ListArena<T>,
    cursor: u32,
    remaining: usize,
}

impl<'a, T> Iterator for Iter<'a, T> {
    type Item = (Key<T>, &'a T);

    fn next(&mut self) -> Option<Self::Item> {
        if self.cursor == NIL {
            return None;
        }
        let slot = &self.arena.slots[self.cursor as usize];
        let node = slot.node.as_ref().expect("dangling list link");
        let key = Key::new(self.cursor, slot.generation);
        self.cursor = node.next;
        self.remaining = self.remaining.saturating_sub(1);
        Some((key, &node.value))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}
