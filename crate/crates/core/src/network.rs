//! The state network: one node per representable value, one edge `i -> F_n(i)`.
//!
//! Every node has out-degree one, so the graph is a functional graph. Each
//! weakly connected component is a single cycle (possibly a self-loop) with
//! in-trees hanging off it.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixed_point::{
    step_unchecked, ControlParameter, LogisticMap, Precision, QuantizationMode,
};

/// Networks are stored with 32-bit labels, so `2^n` must fit a `u32`.
pub const MAX_NETWORK_BITS: u32 = 31;

/// Dense successor table of the digitized map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateNetwork {
    map: LogisticMap,
    successor: Vec<u32>,
}

impl StateNetwork {
    /// Wraps an existing successor table, checking every entry.
    pub fn from_successors(map: LogisticMap, successor: Vec<u32>) -> Result<Self> {
        let expected = map.precision.node_count();
        if successor.len() as u64 != expected {
            return Err(Error::format(
                "successor table",
                format!("{} entries, expected {expected}", successor.len()),
            ));
        }
        let scale = map.precision.scale();
        if let Some(bad) = successor.iter().find(|&&s| u64::from(s) > scale) {
            return Err(Error::NodeOutOfRange {
                node: u64::from(*bad),
                max: scale,
            });
        }
        Ok(StateNetwork { map, successor })
    }

    pub fn map(&self) -> &LogisticMap {
        &self.map
    }

    pub fn mu(&self) -> &ControlParameter {
        &self.map.mu
    }

    pub fn precision(&self) -> Precision {
        self.map.precision
    }

    pub fn mode(&self) -> QuantizationMode {
        self.map.mode
    }

    pub fn len(&self) -> usize {
        self.successor.len()
    }

    pub fn is_empty(&self) -> bool {
        self.successor.is_empty()
    }

    /// Largest label, `2^n`.
    pub fn max_label(&self) -> usize {
        self.successor.len() - 1
    }

    #[inline]
    pub fn successor(&self, i: usize) -> usize {
        self.successor[i] as usize
    }

    pub fn successors(&self) -> &[u32] {
        &self.successor
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.successor
            .iter()
            .enumerate()
            .map(|(i, &s)| (i, s as usize))
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::NodeOutOfRange {
                node: i as u64,
                max: self.max_label() as u64,
            });
        }
        Ok(())
    }
}

/// Evaluates the map at every node.
pub fn build_network(
    mu: ControlParameter,
    n: Precision,
    mode: QuantizationMode,
) -> Result<StateNetwork> {
    if n.bits() > MAX_NETWORK_BITS {
        return Err(Error::Precision(format!(
            "networks are limited to {MAX_NETWORK_BITS} bits, got {}",
            n.bits()
        )));
    }
    let successor = (0..n.node_count())
        .into_par_iter()
        .map(|i| step_unchecked(i, &mu, n, mode) as u32)
        .collect();
    Ok(StateNetwork {
        map: LogisticMap::new(mu, n, mode),
        successor,
    })
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len as u32).collect(),
            size: vec![1; len],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a as u32;
        self.size[a] += self.size[b];
        true
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r] as usize
    }
}

/// Every cycle, each rotated to start at its smallest label, listed in
/// ascending order of that label. Self-loops are cycles of length one.
pub fn find_cycles(net: &StateNetwork) -> Vec<Vec<usize>> {
    const UNVISITED: u8 = 0;
    const IN_PROGRESS: u8 = 1;
    const DONE: u8 = 2;

    let mut color = vec![UNVISITED; net.len()];
    let mut cycles = Vec::new();
    let mut path = Vec::new();
    for start in 0..net.len() {
        if color[start] != UNVISITED {
            continue;
        }
        let mut x = start;
        while color[x] == UNVISITED {
            color[x] = IN_PROGRESS;
            path.push(x);
            x = net.successor(x);
        }
        if color[x] == IN_PROGRESS {
            let pos = path.iter().rposition(|&p| p == x).expect("on current path");
            cycles.push(canonical_cycle(&path[pos..]));
        }
        for &p in &path {
            color[p] = DONE;
        }
        path.clear();
    }
    cycles.sort_unstable_by_key(|c| c[0]);
    cycles
}

fn canonical_cycle(cycle: &[usize]) -> Vec<usize> {
    let lo = (0..cycle.len()).min_by_key(|&k| cycle[k]).unwrap_or(0);
    cycle[lo..].iter().chain(&cycle[..lo]).copied().collect()
}

/// `in_degree[v] = |{ i : F(i) = v }|`.
pub fn in_degrees(net: &StateNetwork) -> Vec<u32> {
    let mut deg = vec![0u32; net.len()];
    for &s in net.successors() {
        deg[s as usize] += 1;
    }
    deg
}

/// Transient length of every node: steps until first landing on a cycle.
pub fn tail_lengths(net: &StateNetwork) -> Vec<u32> {
    const UNKNOWN: u32 = u32::MAX;
    let mut tail = vec![UNKNOWN; net.len()];
    for cycle in find_cycles(net) {
        for c in cycle {
            tail[c] = 0;
        }
    }
    let mut path = Vec::new();
    for start in 0..net.len() {
        let mut x = start;
        while tail[x] == UNKNOWN {
            path.push(x);
            x = net.successor(x);
        }
        let mut t = tail[x];
        for &p in path.iter().rev() {
            t += 1;
            tail[p] = t;
        }
        path.clear();
    }
    tail
}

pub fn tail_length(net: &StateNetwork, i: usize) -> Result<u32> {
    net.check_node(i)?;
    let on_cycle = on_cycle_mask(net);
    let mut x = i;
    let mut t = 0;
    while !on_cycle[x] {
        x = net.successor(x);
        t += 1;
    }
    Ok(t)
}

fn on_cycle_mask(net: &StateNetwork) -> Vec<bool> {
    let mut mask = vec![false; net.len()];
    for c in find_cycles(net).into_iter().flatten() {
        mask[c] = true;
    }
    mask
}

/// One weakly connected component with its unique cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentInfo {
    pub id: usize,
    pub node_count: usize,
    /// Smallest member label; second sort key.
    pub min_label: usize,
    /// Cycle in successor order, starting from its smallest label.
    pub cycle: Vec<usize>,
    pub cycle_length: usize,
    pub max_tail_length: u32,
}

/// Everything derived from one network, computed in a single pass.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub cycles: Vec<Vec<usize>>,
    /// Index into `components` for each node.
    pub component_of: Vec<u32>,
    pub components: Vec<ComponentInfo>,
    pub in_degree: Vec<u32>,
    pub tail: Vec<u32>,
}

impl Analysis {
    pub fn new(net: &StateNetwork) -> Self {
        let cycles = find_cycles(net);
        let in_degree = in_degrees(net);
        let tail = tail_lengths(net);

        let mut uf = UnionFind::new(net.len());
        for (i, s) in net.edges() {
            uf.union(i, s);
        }

        // provisional components keyed by root, in order of first (smallest) member
        let mut slot = vec![u32::MAX; net.len()];
        let mut comps: Vec<ComponentInfo> = Vec::new();
        let mut member_slot = vec![0u32; net.len()];
        for i in 0..net.len() {
            let r = uf.find(i);
            if slot[r] == u32::MAX {
                slot[r] = comps.len() as u32;
                comps.push(ComponentInfo {
                    id: 0,
                    node_count: 0,
                    min_label: i,
                    cycle: Vec::new(),
                    cycle_length: 0,
                    max_tail_length: 0,
                });
            }
            let c = &mut comps[slot[r] as usize];
            c.node_count += 1;
            c.max_tail_length = c.max_tail_length.max(tail[i]);
            member_slot[i] = slot[r];
        }
        for cycle in &cycles {
            let c = &mut comps[member_slot[cycle[0]] as usize];
            debug_assert!(c.cycle.is_empty(), "two cycles in one component");
            c.cycle = cycle.clone();
            c.cycle_length = cycle.len();
        }

        let mut order: Vec<usize> = (0..comps.len()).collect();
        order.sort_by(|&a, &b| {
            comps[b]
                .node_count
                .cmp(&comps[a].node_count)
                .then(comps[a].min_label.cmp(&comps[b].min_label))
        });
        let mut rank = vec![0u32; comps.len()];
        for (new_id, &old) in order.iter().enumerate() {
            rank[old] = new_id as u32;
        }
        let components = order
            .iter()
            .enumerate()
            .map(|(id, &old)| ComponentInfo {
                id,
                ..comps[old].clone()
            })
            .collect();
        let component_of = member_slot.iter().map(|&s| rank[s as usize]).collect();

        Analysis {
            cycles,
            component_of,
            components,
            in_degree,
            tail,
        }
    }

    /// Label of the largest in-degree, ties to the smallest label.
    pub fn max_in_degree_node(&self) -> (usize, u32) {
        let mut best = (0, self.in_degree[0]);
        for (v, &d) in self.in_degree.iter().enumerate() {
            if d > best.1 {
                best = (v, d);
            }
        }
        best
    }

    pub fn summary(&self) -> NetworkSummary {
        let (max_in_degree_node, max_in_degree) = self.max_in_degree_node();
        NetworkSummary {
            component_count: self.components.len(),
            cycle_count: self.cycles.len(),
            components: self.components.clone(),
            self_loop_nodes: self
                .cycles
                .iter()
                .filter(|c| c.len() == 1)
                .map(|c| c[0])
                .collect(),
            max_in_degree_node,
            max_in_degree,
        }
    }
}

/// Weakly connected components, largest first, ties by smallest member.
pub fn weak_components(net: &StateNetwork) -> Vec<ComponentInfo> {
    Analysis::new(net).components
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NetworkSummary {
    pub component_count: usize,
    pub cycle_count: usize,
    pub components: Vec<ComponentInfo>,
    pub self_loop_nodes: Vec<usize>,
    pub max_in_degree_node: usize,
    pub max_in_degree: u32,
}

pub fn summarize(net: &StateNetwork) -> NetworkSummary {
    Analysis::new(net).summary()
}
