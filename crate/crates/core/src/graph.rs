//! Undirected graph helpers on adjacency lists: connectivity and bridges.

use std::collections::VecDeque;

pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u != v {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    adj
}

/// Nodes reachable from `src`, optionally ignoring the undirected edge `skip`.
pub fn reachable(adj: &[Vec<usize>], src: usize, skip: Option<(usize, usize)>) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[src] = true;
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if let Some((a, b)) = skip {
                if (u == a && v == b) || (u == b && v == a) {
                    continue;
                }
            }
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

pub fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    n == 0 || reachable(&adjacency(n, edges), 0, None).into_iter().all(|x| x)
}

/// Bridges `(u, v)` with `u < v`, sorted. Iterative lowlink search, so deep
/// paths do not overflow the stack. Assumes a simple graph.
pub fn bridges(adj: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let n = adj.len();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut out = Vec::new();
    let mut time = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // (node, parent, next neighbor index)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        while let Some(&mut (u, parent, ref mut next)) = stack.last_mut() {
            if *next < adj[u].len() {
                let v = adj[u][*next];
                *next += 1;
                if v == parent {
                    continue;
                }
                if disc[v] == usize::MAX {
                    disc[v] = time;
                    low[v] = time;
                    time += 1;
                    stack.push((v, u, 0));
                } else {
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[u]);
                    if low[u] > disc[parent] {
                        out.push((parent.min(u), parent.max(u)));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_edges_are_all_bridges() {
        let adj = adjacency(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(bridges(&adj), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn cycle_has_no_bridges() {
        let adj = adjacency(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        assert!(bridges(&adj).is_empty());
    }

    #[test]
    fn bridge_between_triangles() {
        let edges = [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)];
        let adj = adjacency(6, &edges);
        assert_eq!(bridges(&adj), vec![(2, 3)]);
        let side = reachable(&adj, 2, Some((2, 3)));
        assert_eq!(side.iter().filter(|&&x| x).count(), 3);
        assert!(is_connected(6, &edges));
        assert!(!is_connected(6, &edges[..3]));
    }
}
