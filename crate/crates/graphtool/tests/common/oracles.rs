//! Brute-force reference answers computed straight from the edge list.

use std::collections::VecDeque;

use graphtool_core::graph::Graph;

fn arcs(g: &Graph) -> Vec<(usize, usize, u64)> {
    let mut out = Vec::new();
    for e in g.edges() {
        let w = e.weight.map_or(1, u64::from);
        out.push((e.u as usize, e.v as usize, w));
        if !g.directed() {
            out.push((e.v as usize, e.u as usize, w));
        }
    }
    out
}

fn arc_matrix(g: &Graph) -> Vec<Vec<Option<u64>>> {
    let n = g.node_count() as usize;
    let mut m = vec![vec![None; n]; n];
    for (u, v, w) in arcs(g) {
        m[u][v] = Some(w);
    }
    m
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Some vertex subset can be arranged into a closed walk visiting each vertex
/// once (two vertices for directed graphs, three for undirected).
pub fn has_cycle(g: &Graph) -> bool {
    let n = g.node_count() as usize;
    let m = arc_matrix(g);
    let min = if g.directed() { 2 } else { 3 };
    for mask in 1u32..(1 << n) {
        let verts: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        if verts.len() < min {
            continue;
        }
        let first = verts[0];
        for perm in permutations(&verts[1..]) {
            let mut cycle = vec![first];
            cycle.extend(perm);
            let closed = (0..cycle.len()).all(|i| m[cycle[i]][cycle[(i + 1) % cycle.len()]].is_some());
            if closed {
                return true;
            }
        }
    }
    false
}

pub fn max_triangle(g: &Graph) -> Option<u64> {
    let n = g.node_count() as usize;
    let m = arc_matrix(g);
    let mut best = None;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if let (Some(x), Some(y), Some(z)) = (m[a][b], m[b][c], m[a][c]) {
                    best = best.max(Some(x + y + z));
                }
            }
        }
    }
    best
}

/// Every ordering of all nodes that respects every arc.
pub fn topological_orders(g: &Graph) -> Vec<Vec<u32>> {
    let n = g.node_count() as usize;
    let arcs = arcs(g);
    let nodes: Vec<usize> = (0..n).collect();
    permutations(&nodes)
        .into_iter()
        .filter(|p| {
            let mut pos = vec![0; n];
            for (i, &v) in p.iter().enumerate() {
                pos[v] = i;
            }
            arcs.iter().all(|&(u, v, _)| pos[u] < pos[v])
        })
        .map(|p| p.into_iter().map(|v| v as u32).collect())
        .collect()
}

pub fn degree(g: &Graph, node: u32) -> u64 {
    g.edges()
        .iter()
        .map(|e| (e.u == node) as u64 + (e.v == node) as u64)
        .sum()
}

pub fn edge_exists(g: &Graph, u: u32, v: u32) -> bool {
    g.edges()
        .iter()
        .any(|e| (e.u == u && e.v == v) || (!g.directed() && e.u == v && e.v == u))
}

pub fn reachable(g: &Graph, from: u32, to: u32) -> bool {
    let n = g.node_count() as usize;
    let arcs = arcs(g);
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([from as usize]);
    seen[from as usize] = true;
    while let Some(u) = queue.pop_front() {
        for &(a, b, _) in &arcs {
            if a == u && !seen[b] {
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    seen[to as usize]
}

/// Minimum over all simple paths; `None` when `to` is unreachable.
pub fn shortest_by_paths(g: &Graph, from: u32, to: u32) -> Option<u64> {
    fn walk(m: &[Vec<Option<u64>>], at: usize, to: usize, seen: &mut Vec<bool>, cost: u64, best: &mut Option<u64>) {
        if at == to {
            *best = Some(best.map_or(cost, |b| b.min(cost)));
            return;
        }
        for next in 0..m.len() {
            if let Some(w) = m[at][next] {
                if !seen[next] {
                    seen[next] = true;
                    walk(m, next, to, seen, cost + w, best);
                    seen[next] = false;
                }
            }
        }
    }
    let m = arc_matrix(g);
    let mut seen = vec![false; m.len()];
    seen[from as usize] = true;
    let mut best = None;
    walk(&m, from as usize, to as usize, &mut seen, 0, &mut best);
    best
}

/// Minimum capacity over every cut separating `source` from `sink`.
pub fn min_cut(g: &Graph, source: u32, sink: u32) -> u64 {
    let n = g.node_count() as usize;
    let arcs = arcs(g);
    let others: Vec<usize> = (0..n).filter(|&v| v != source as usize && v != sink as usize).collect();
    let mut best = u64::MAX;
    for mask in 0u32..(1 << others.len()) {
        let mut side = vec![false; n];
        side[source as usize] = true;
        for (i, &v) in others.iter().enumerate() {
            if mask & (1 << i) != 0 {
                side[v] = true;
            }
        }
        let cut: u64 = arcs
            .iter()
            .filter(|&&(u, v, _)| side[u] && !side[v])
            .map(|&(_, _, w)| w)
            .sum();
        best = best.min(cut);
    }
    best
}

/// Kahn's algorithm never sees two zero-in-degree nodes at once.
pub fn single_source_at_every_step(g: &Graph) -> bool {
    let n = g.node_count() as usize;
    let arcs = arcs(g);
    let mut indeg = vec![0usize; n];
    for &(_, v, _) in &arcs {
        indeg[v] += 1;
    }
    let mut done = vec![false; n];
    for _ in 0..n {
        let ready: Vec<usize> = (0..n).filter(|&v| !done[v] && indeg[v] == 0).collect();
        if ready.len() != 1 {
            return false;
        }
        done[ready[0]] = true;
        for &(u, v, _) in &arcs {
            if u == ready[0] {
                indeg[v] -= 1;
            }
        }
    }
    true
}
