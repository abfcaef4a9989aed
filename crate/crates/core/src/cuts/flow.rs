use std::collections::VecDeque;

use super::WeightedGraph;
use crate::scalar::Scalar;

/// Edmonds-Karp on the dense capacity matrix `w` (self-loops ignored).
/// Returns the source side of a minimum cut.
pub(super) fn max_flow_min_cut<S: Scalar>(g: &WeightedGraph<S>, s: usize, t: usize) -> Vec<bool> {
    let n = g.n();
    let mut res: Vec<S> = (0..n * n)
        .map(|k| if k / n == k % n { S::zero() } else { g.w[(k / n, k % n)] })
        .collect();
    let scale = g.w.max_abs().max(S::min_positive_value());
    let tiny = scale * S::epsilon() * S::from_count(n.max(2));
    let adj = g.adjacency();
    let mut parent = vec![usize::MAX; n];
    loop {
        parent.iter_mut().for_each(|p| *p = usize::MAX);
        parent[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for &v in &adj[u] {
                if parent[v] == usize::MAX && res[u * n + v] > tiny {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[t] == usize::MAX {
            break;
        }
        let mut push = S::infinity();
        let mut v = t;
        while v != s {
            let u = parent[v];
            push = push.min(res[u * n + v]);
            v = u;
        }
        let mut v = t;
        while v != s {
            let u = parent[v];
            res[u * n + v] -= push;
            res[v * n + u] += push;
            v = u;
        }
    }
    parent.iter().map(|&p| p != usize::MAX).collect()
}
