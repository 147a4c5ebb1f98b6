use std::collections::VecDeque;
use std::sync::Arc;

/// One stored step `(s_k, a_k, r_k, s_{k+1}, A_{k+1})`. The presented action
/// list of `s_k` is kept as well so slot-based models can rebuild their input.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Arc<str>,
    pub actions: Vec<Arc<str>>,
    pub taken: usize,
    pub reward: f64,
    pub next_state: Arc<str>,
    /// Empty when `terminal`.
    pub next_actions: Vec<Arc<str>>,
    pub terminal: bool,
}

impl Transition {
    pub fn action(&self) -> &str {
        &self.actions[self.taken]
    }
}

/// Fixed-capacity FIFO replay memory.
#[derive(Debug, Clone)]
pub struct ReplayMemory {
    capacity: usize,
    buffer: VecDeque<Transition>,
    inserted: u64,
}

impl ReplayMemory {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayMemory {
            capacity,
            buffer: VecDeque::with_capacity(capacity.min(1 << 16)),
            inserted: 0,
        }
    }

    pub fn push(&mut self, t: Transition) {
        if self.buffer.len() == self.capacity {
            self.buffer.pop_front();
        }
        self.buffer.push_back(t);
        self.inserted += 1;
    }

    pub fn extend(&mut self, ts: impl IntoIterator<Item = Transition>) {
        for t in ts {
            self.push(t);
        }
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Total insertions since creation, including evicted tuples.
    pub fn inserted(&self) -> u64 {
        self.inserted
    }

    pub fn get(&self, i: usize) -> Option<&Transition> {
        self.buffer.get(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.buffer.iter()
    }
}
