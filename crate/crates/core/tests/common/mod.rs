//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use misinfo::network::{EdgeSpec, SocialNetwork};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random connected simple graph: a random spanning tree plus extra edges.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, extra: f64) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        edges.push(ordered(order[k], parent));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !edges.contains(&(i, j)) && rng.gen_bool(extra) {
                edges.push((i, j));
            }
        }
    }
    edges.sort_unstable();
    edges
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// One forceful direction on an undirected edge: `(influenced, forceful, alpha)`.
pub type Push = (usize, usize, f64);

/// Builds a network on `edges` with random meeting rows and random
/// interaction splits. Pairs listed in `pushes` get the given alpha; all
/// others have alpha = 0.
pub fn build<R: Rng>(rng: &mut R, n: usize, edges: &[(usize, usize)], pushes: &[Push], epsilon: f64) -> SocialNetwork<f64> {
    let mut nbrs = vec![Vec::new(); n];
    for &(u, v) in edges {
        nbrs[u].push(v);
        nbrs[v].push(u);
    }
    let mut specs = Vec::new();
    for i in 0..n {
        let w: Vec<f64> = nbrs[i].iter().map(|_| rng.gen_range(0.2..1.0)).collect();
        let total: f64 = w.iter().sum();
        for (&j, &wj) in nbrs[i].iter().zip(&w) {
            let alpha = pushes
                .iter()
                .find(|&&(a, b, _)| (a, b) == (i, j))
                .map_or(0.0, |&(_, _, al)| al);
            let gamma = if rng.gen_bool(0.3) { rng.gen_range(0.0..0.3) * (1.0 - alpha) } else { 0.0 };
            specs.push(EdgeSpec {
                i,
                j,
                p: wj / total,
                alpha,
                beta: 1.0 - alpha - gamma,
                gamma,
            });
        }
    }
    SocialNetwork::from_edges(n, epsilon, &specs).expect("well-formed edge list")
}

/// Random valid network with vertex-disjoint forceful edges.
pub fn random_disjoint_network<R: Rng>(rng: &mut R, n: usize) -> SocialNetwork<f64> {
    let edges = random_connected(rng, n, 0.3);
    let mut shuffled = edges.clone();
    shuffled.shuffle(rng);
    let mut used = vec![false; n];
    let mut pushes = Vec::new();
    for (u, v) in shuffled {
        if used[u] || used[v] || !rng.gen_bool(0.5) {
            continue;
        }
        used[u] = true;
        used[v] = true;
        let (a, b) = if rng.gen_bool(0.5) { (u, v) } else { (v, u) };
        pushes.push((a, b, rng.gen_range(0.1..0.9)));
        if rng.gen_bool(0.2) {
            pushes.push((b, a, rng.gen_range(0.1..0.9)));
        }
    }
    let eps = rng.gen_range(0.05..=0.5);
    build(rng, n, &edges, &pushes, eps)
}

/// Two random connected clusters joined by one bridge `(u, v)`.
pub fn random_bridged<R: Rng>(rng: &mut R) -> (usize, Vec<(usize, usize)>, (usize, usize)) {
    let (s1, s2) = (rng.gen_range(2..=6), rng.gen_range(2..=6));
    let mut edges = random_connected(rng, s1, 0.4);
    edges.extend(random_connected(rng, s2, 0.4).into_iter().map(|(a, b)| (a + s1, b + s1)));
    let bridge = (rng.gen_range(0..s1), s1 + rng.gen_range(0..s2));
    edges.push(bridge);
    edges.sort_unstable();
    (s1 + s2, edges, bridge)
}

pub fn mark(pass: bool, id: usize, label: &str, detail: impl std::fmt::Display) {
    println!("[{}] criterion {id}: {label} ({detail})", if pass { "PASS" } else { "FAIL" });
}
