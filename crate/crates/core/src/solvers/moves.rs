//! Move deltas for open paths.
//!
//! Reversing `route[i..=j]` of an open path replaces at most two edges: the
//! one entering position `i` (absent when `i == 0`) and the one leaving
//! position `j` (absent when `j` is the last position). Closed-tour 2-opt
//! formulas always touch two edges and would be wrong at the path ends.

use crate::num::Scalar;
use crate::problem::DenseCosts;

/// Cost change of reversing `route[i..=j]`, `i < j`.
#[inline]
pub(crate) fn two_opt_delta<T: Scalar>(d: &DenseCosts<T>, route: &[usize], i: usize, j: usize) -> T {
    debug_assert!(i < j && j < route.len());
    let mut delta = T::zero();
    if i > 0 {
        let prev = route[i - 1];
        delta = delta + d.at(prev, route[j]) - d.at(prev, route[i]);
    }
    if j + 1 < route.len() {
        let next = route[j + 1];
        delta = delta + d.at(route[i], next) - d.at(route[j], next);
    }
    delta
}

pub(crate) fn apply_two_opt(route: &mut [usize], i: usize, j: usize) {
    route[i..=j].reverse();
}

/// Relocation of the segment `route[start..start + len]`. After removal,
/// the segment is inserted before position `insert_at` of the shortened
/// route (or at its end), optionally reversed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct OrOpt {
    pub start: usize,
    pub len: usize,
    pub insert_at: usize,
    pub reversed: bool,
}

impl OrOpt {
    pub(crate) fn is_noop(&self) -> bool {
        self.insert_at == self.start && (!self.reversed || self.len == 1)
    }

    pub(crate) fn delta<T: Scalar>(&self, d: &DenseCosts<T>, route: &[usize]) -> T {
        let n = route.len();
        let end = self.start + self.len - 1;
        let (first, last) = (route[self.start], route[end]);
        let prev = (self.start > 0).then(|| route[self.start - 1]);
        let next = (end + 1 < n).then(|| route[end + 1]);

        let mut delta = T::zero();
        if let Some(p) = prev {
            delta = delta - d.at(p, first);
        }
        if let Some(q) = next {
            delta = delta - d.at(last, q);
        }
        if let (Some(p), Some(q)) = (prev, next) {
            delta = delta + d.at(p, q);
        }

        let reduced = |k: usize| if k < self.start { route[k] } else { route[k + self.len] };
        let x = (self.insert_at > 0).then(|| reduced(self.insert_at - 1));
        let y = (self.insert_at < n - self.len).then(|| reduced(self.insert_at));
        let (head, tail) = if self.reversed { (last, first) } else { (first, last) };
        if let Some(x) = x {
            delta = delta + d.at(x, head);
        }
        if let Some(y) = y {
            delta = delta + d.at(tail, y);
        }
        if let (Some(x), Some(y)) = (x, y) {
            delta = delta - d.at(x, y);
        }
        delta
    }

    pub(crate) fn apply(&self, route: &mut [usize]) {
        if self.insert_at <= self.start {
            route[self.insert_at..self.start + self.len].rotate_right(self.len);
        } else {
            route[self.start..self.insert_at + self.len].rotate_left(self.len);
        }
        if self.reversed {
            route[self.insert_at..self.insert_at + self.len].reverse();
        }
    }
}
