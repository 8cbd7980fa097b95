//! Maximum bipartite matching (Hopcroft-Karp) and Hall-condition witnesses.

use std::collections::VecDeque;

const UNMATCHED: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteMatching {
    pub left_to_right: Vec<Option<usize>>,
    pub right_to_left: Vec<Option<usize>>,
    pub size: usize,
}

impl BipartiteMatching {
    pub fn is_left_perfect(&self) -> bool {
        self.size == self.left_to_right.len()
    }
}

/// Maximum matching of the bipartite graph with `adjacency[l]` listing the
/// right neighbours of left vertex `l`.
pub fn maximum_matching(adjacency: &[Vec<usize>], n_right: usize) -> BipartiteMatching {
    let n_left = adjacency.len();
    let mut left = vec![UNMATCHED; n_left];
    let mut right = vec![UNMATCHED; n_right];
    let mut layer = vec![0usize; n_left];
    let mut size = 0;

    loop {
        // BFS from free left vertices builds the layered graph.
        let mut queue = VecDeque::new();
        for l in 0..n_left {
            if left[l] == UNMATCHED {
                layer[l] = 0;
                queue.push_back(l);
            } else {
                layer[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adjacency[l] {
                let next = right[r];
                if next == UNMATCHED {
                    found = true;
                } else if layer[next] == usize::MAX {
                    layer[next] = layer[l] + 1;
                    queue.push_back(next);
                }
            }
        }
        if !found {
            break;
        }
        let mut cursor = vec![0usize; n_left];
        for l in 0..n_left {
            if left[l] == UNMATCHED && augment(l, adjacency, &mut left, &mut right, &mut layer, &mut cursor) {
                size += 1;
            }
        }
    }

    BipartiteMatching {
        left_to_right: left.iter().map(|&r| (r != UNMATCHED).then_some(r)).collect(),
        right_to_left: right.iter().map(|&l| (l != UNMATCHED).then_some(l)).collect(),
        size,
    }
}

fn augment(
    l: usize,
    adjacency: &[Vec<usize>],
    left: &mut [usize],
    right: &mut [usize],
    layer: &mut [usize],
    cursor: &mut [usize],
) -> bool {
    while cursor[l] < adjacency[l].len() {
        let r = adjacency[l][cursor[l]];
        cursor[l] += 1;
        let next = right[r];
        let ok =
            next == UNMATCHED || (layer[next] == layer[l] + 1 && augment(next, adjacency, left, right, layer, cursor));
        if ok {
            left[l] = r;
            right[r] = l;
            return true;
        }
    }
    layer[l] = usize::MAX;
    false
}

/// Left vertices reachable by alternating paths from unmatched left vertices
/// of a maximum matching. When the matching is not left-perfect this set has
/// fewer neighbours than members.
pub fn hall_violator(adjacency: &[Vec<usize>], matching: &BipartiteMatching) -> Option<Vec<usize>> {
    if matching.is_left_perfect() {
        return None;
    }
    let n_left = adjacency.len();
    let mut reached = vec![false; n_left];
    let mut queue: VecDeque<usize> = (0..n_left).filter(|&l| matching.left_to_right[l].is_none()).collect();
    for &l in &queue {
        reached[l] = true;
    }
    while let Some(l) = queue.pop_front() {
        for &r in &adjacency[l] {
            if let Some(next) = matching.right_to_left[r] {
                if !reached[next] {
                    reached[next] = true;
                    queue.push_back(next);
                }
            }
        }
    }
    Some((0..n_left).filter(|&l| reached[l]).collect())
}

/// Right neighbours of a set of left vertices, sorted and deduplicated.
pub fn neighbourhood(adjacency: &[Vec<usize>], subset: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = subset.iter().flat_map(|&l| adjacency[l].iter().copied()).collect();
    out.sort_unstable();
    out.dedup();
    out
}
