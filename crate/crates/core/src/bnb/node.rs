use std::cmp::Ordering;

use crate::qp::SubproblemLabel;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeStatus {
    Open,
    Pruned,
    Branched,
    Infeasible,
}

/// A leaf of the branch-and-bound tree.
#[derive(Clone, Debug)]
pub struct TreeNode<T> {
    pub id: u64,
    pub label: SubproblemLabel,
    /// Certified lower bound over all binary completions of `label`.
    pub bound: T,
    /// Full-length point: the fixed values plus the relaxation solution on the free coordinates.
    pub relax_x: Vec<T>,
    pub status: NodeStatus,
}

impl<T> TreeNode<T> {
    pub fn depth(&self) -> usize {
        self.label.depth()
    }
}

/// Heap entry: smallest bound first, then the deeper node, then the older one.
pub(crate) struct Ranked<T>(pub TreeNode<T>);

impl<T: Scalar> Ranked<T> {
    fn key_cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        a.bound
            .partial_cmp(&b.bound)
            .unwrap_or(Ordering::Equal)
            .then_with(|| b.depth().cmp(&a.depth()))
            .then_with(|| a.id.cmp(&b.id))
    }
}

impl<T: Scalar> PartialEq for Ranked<T> {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Ranked<T> {}

impl<T: Scalar> PartialOrd for Ranked<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Ranked<T> {
    // reversed: BinaryHeap pops the maximum
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

/// Best binary feasible point found so far.
#[derive(Clone, Debug, PartialEq)]
pub struct Incumbent<T> {
    pub x: Vec<T>,
    pub value: T,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BinaryHeap;

    fn node(id: u64, bound: f64, depth: usize) -> Ranked<f64> {
        Ranked(TreeNode {
            id,
            label: SubproblemLabel::from_bits(vec![false; depth]),
            bound,
            relax_x: Vec::new(),
            status: NodeStatus::Open,
        })
    }

    #[test]
    fn heap_order() {
        let mut heap = BinaryHeap::new();
        heap.push(node(0, 2.0, 1));
        heap.push(node(1, 1.0, 1));
        heap.push(node(2, 1.0, 3));
        heap.push(node(3, 1.0, 3));
        let ids: Vec<u64> = std::iter::from_fn(|| heap.pop().map(|r| r.0.id)).collect();
        assert_eq!(ids, vec![2, 3, 1, 0]);
    }
}
