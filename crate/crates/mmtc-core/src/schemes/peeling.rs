//! Replica graphs and the peeling (iterative SIC) decoder.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

/// Bipartite graph of users and the slots carrying their replicas. Every
/// replica points to its siblings through the user's slot list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameGraph {
    pub n_slots: usize,
    /// Distinct slots per user.
    pub user_slots: Vec<Vec<usize>>,
}

impl FrameGraph {
    pub fn new(n_slots: usize, user_slots: Vec<Vec<usize>>) -> Self {
        FrameGraph { n_slots, user_slots }
    }

    pub fn n_users(&self) -> usize {
        self.user_slots.len()
    }

    /// Users transmitting in each slot.
    pub fn slot_users(&self) -> Vec<Vec<usize>> {
        let mut out = alloc::vec![Vec::new(); self.n_slots];
        for (u, slots) in self.user_slots.iter().enumerate() {
            for &s in slots {
                out[s].push(u);
            }
        }
        out
    }

    /// Every user has between 1 and `max_replicas` distinct in-range slots.
    pub fn is_valid(&self, max_replicas: usize) -> bool {
        self.user_slots.iter().all(|slots| {
            let mut s = slots.clone();
            s.sort_unstable();
            s.dedup();
            !slots.is_empty()
                && slots.len() <= max_replicas
                && s.len() == slots.len()
                && slots.iter().all(|&x| x < self.n_slots)
        })
    }
}

/// Peeling decoder: a slot holding exactly one unresolved replica whose user
/// is visible decodes that user; all its replicas are then cancelled. Runs
/// until no slot can decode a new user.
pub fn peel(graph: &FrameGraph, visible: &[bool]) -> Vec<bool> {
    let slot_users = graph.slot_users();
    let mut remaining: Vec<usize> = slot_users.iter().map(Vec::len).collect();
    let mut resolved = alloc::vec![false; graph.n_users()];
    let mut queue: VecDeque<usize> = (0..graph.n_slots).filter(|&s| remaining[s] == 1).collect();
    while let Some(s) = queue.pop_front() {
        if remaining[s] != 1 {
            continue;
        }
        let Some(&u) = slot_users[s].iter().find(|&&u| !resolved[u]) else {
            continue;
        };
        if !visible[u] {
            continue;
        }
        resolved[u] = true;
        for &t in &graph.user_slots[u] {
            remaining[t] -= 1;
            if remaining[t] == 1 {
                queue.push_back(t);
            }
        }
    }
    resolved
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn chain_resolves() {
        // u0 alone in slot 0, shares slot 1 with u1, u1 shares slot 2 with u2.
        let g = FrameGraph::new(3, vec![vec![0, 1], vec![1, 2], vec![2]]);
        assert_eq!(peel(&g, &[true; 3]), [true, true, true]);
    }

    #[test]
    fn invisible_user_blocks_its_slot() {
        let g = FrameGraph::new(2, vec![vec![0], vec![0, 1]]);
        assert_eq!(peel(&g, &[true, true]), [true, true]);
        assert_eq!(peel(&g, &[true, false]), [false, false]);
        assert_eq!(peel(&g, &[false, true]), [false, true]);
    }

    #[test]
    fn stopping_set() {
        let g = FrameGraph::new(2, vec![vec![0, 1], vec![0, 1]]);
        assert_eq!(peel(&g, &[true, true]), [false, false]);
    }
}
