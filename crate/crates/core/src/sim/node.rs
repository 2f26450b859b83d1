use std::collections::VecDeque;

/// FIFO queue of the deadline node. Entries are arrival slot indices.
#[derive(Debug, Clone, Default)]
pub struct DeadlineNodeState {
    queue: VecDeque<u64>,
    pub arrivals: u64,
    pub deliveries: u64,
    pub drops: u64,
}

impl DeadlineNodeState {
    /// A packet arriving at the boundary of slot `t`; its first
    /// transmission opportunity is slot `t + 1`.
    pub fn arrive(&mut self, t: u64) {
        debug_assert!(self.queue.back().is_none_or(|last| *last < t));
        self.queue.push_back(t);
        self.arrivals += 1;
    }

    /// Opportunity index (1-based) of the head-of-line packet in slot `t`, if
    /// one is eligible.
    pub fn hol_opportunity(&self, t: u64) -> Option<u64> {
        self.queue.front().filter(|a| **a < t).map(|a| t - a)
    }

    /// Removes the head-of-line packet as delivered and returns its arrival slot.
    pub fn deliver(&mut self) -> u64 {
        self.deliveries += 1;
        self.queue.pop_front().expect("deliver with an empty queue")
    }

    /// Removes the head-of-line packet as lost and returns its arrival slot.
    pub fn drop_hol(&mut self) -> u64 {
        self.drops += 1;
        self.queue.pop_front().expect("drop with an empty queue")
    }

    pub fn queued(&self) -> usize {
        self.queue.len()
    }
}

/// Age at the controller of one AoI node's updates.
#[derive(Debug, Clone, Copy)]
pub struct AoiNodeState {
    pub age: u64,
}

impl Default for AoiNodeState {
    fn default() -> Self {
        AoiNodeState { age: 1 }
    }
}

impl AoiNodeState {
    /// End-of-slot update: back to 1 on delivery of a fresh sample, one more slot otherwise.
    pub fn advance(&mut self, delivered: bool) {
        self.age = if delivered { 1 } else { self.age + 1 };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_arrival_is_not_eligible_in_its_own_slot() {
        let mut q = DeadlineNodeState::default();
        q.arrive(4);
        assert_eq!(q.hol_opportunity(4), None);
        assert_eq!(q.hol_opportunity(5), Some(1));
        assert_eq!(q.hol_opportunity(7), Some(3));
        q.arrive(5);
        assert_eq!(q.deliver(), 4);
        assert_eq!(q.hol_opportunity(6), Some(1));
        assert_eq!(q.drop_hol(), 5);
        assert_eq!(q.arrivals, q.deliveries + q.drops + q.queued() as u64);
    }

    #[test]
    fn age_recursion() {
        let mut a = AoiNodeState::default();
        a.advance(false);
        a.advance(false);
        assert_eq!(a.age, 3);
        a.advance(true);
        assert_eq!(a.age, 1);
    }
}
