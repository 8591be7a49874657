//! Edmonds-Karp maximum flow over a residual arc list.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_node, Answer, ToolError};
use crate::graph::{Graph, NodeId};

struct Arc {
    to: usize,
    cap: u64,
}

struct Residual {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl Residual {
    fn new(n: usize) -> Self {
        Self {
            arcs: Vec::new(),
            out: vec![Vec::new(); n],
        }
    }

    // arc i and its reverse i ^ 1 are stored as a pair
    fn add(&mut self, from: usize, to: usize, cap: u64) {
        self.out[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap });
        self.out[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0 });
    }
}

/// Integer max flow from `source` to `sink`. Undirected edges become two
/// anti-parallel arcs, each with the edge's full capacity; unweighted edges
/// have capacity 1.
pub fn maximum_flow(g: &Graph, source: NodeId, sink: NodeId) -> Result<Answer, ToolError> {
    check_node(g, source)?;
    check_node(g, sink)?;
    if source == sink {
        return Err(ToolError::SameSourceSink);
    }
    let n = g.node_count() as usize;
    let mut net = Residual::new(n);
    for e in g.edges() {
        net.add(e.u as usize, e.v as usize, e.cost());
        if !g.directed() {
            net.add(e.v as usize, e.u as usize, e.cost());
        }
    }

    let (s, t) = (source as usize, sink as usize);
    let mut total = 0u64;
    let mut via = vec![usize::MAX; n];
    loop {
        via.fill(usize::MAX);
        let mut queue = VecDeque::from([s]);
        let mut found = false;
        while let Some(node) = queue.pop_front() {
            for &a in &net.out[node] {
                let arc = &net.arcs[a];
                if arc.cap > 0 && arc.to != s && via[arc.to] == usize::MAX {
                    via[arc.to] = a;
                    if arc.to == t {
                        found = true;
                        break;
                    }
                    queue.push_back(arc.to);
                }
            }
            if found {
                break;
            }
        }
        if !found {
            break;
        }

        let mut bottleneck = u64::MAX;
        let mut node = t;
        while node != s {
            let a = via[node];
            bottleneck = bottleneck.min(net.arcs[a].cap);
            node = net.arcs[a ^ 1].to;
        }
        let mut node = t;
        while node != s {
            let a = via[node];
            net.arcs[a].cap -= bottleneck;
            net.arcs[a ^ 1].cap += bottleneck;
            node = net.arcs[a ^ 1].to;
        }
        total += bottleneck;
    }
    Ok(Answer::Value(total))
}
