//! Small labeled graphs assembled at query or cache-build time, with
//! multi-source Dijkstra and A*.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

/// Directed graph over sparse `u32` node keys; each arc carries a label that
/// the caller uses to reconstruct what the arc stands for.
#[derive(Clone, Debug)]
pub struct SearchGraph<L> {
    index: HashMap<u32, usize>,
    keys: Vec<u32>,
    adj: Vec<Vec<(usize, f64, L)>>,
}

impl<L> Default for SearchGraph<L> {
    fn default() -> Self {
        Self {
            index: HashMap::new(),
            keys: Vec::new(),
            adj: Vec::new(),
        }
    }
}

/// Result of a Dijkstra run, indexed by internal node slot.
#[derive(Clone, Debug)]
pub struct ShortestPaths {
    dist: Vec<f64>,
    parent: Vec<Option<(usize, usize)>>,
    pub settled: usize,
}

#[derive(Clone, Debug)]
pub struct AStarResult<L> {
    pub cost: f64,
    /// Node keys from source to target.
    pub nodes: Vec<u32>,
    pub labels: Vec<L>,
    pub closed: usize,
}

struct Entry {
    f: f64,
    g: f64,
    slot: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then(self.g.total_cmp(&other.g))
            .then(other.slot.cmp(&self.slot))
    }
}

impl<L: Clone> SearchGraph<L> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&mut self, key: u32) -> usize {
        if let Some(&s) = self.index.get(&key) {
            return s;
        }
        let s = self.keys.len();
        self.index.insert(key, s);
        self.keys.push(key);
        self.adj.push(Vec::new());
        s
    }

    pub fn slot(&self, key: u32) -> Option<usize> {
        self.index.get(&key).copied()
    }

    pub fn key(&self, slot: usize) -> u32 {
        self.keys[slot]
    }

    pub fn node_count(&self) -> usize {
        self.keys.len()
    }

    pub fn arc_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn add_arc(&mut self, from: u32, to: u32, weight: f64, label: L) {
        let a = self.node(from);
        let b = self.node(to);
        self.adj[a].push((b, weight, label));
    }

    /// Multi-source Dijkstra; each source starts at its given offset.
    pub fn dijkstra(&self, sources: &[(u32, f64)]) -> ShortestPaths {
        let n = self.keys.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut parent = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        for &(k, d) in sources {
            if let Some(s) = self.slot(k) {
                if d < dist[s] {
                    dist[s] = d;
                    heap.push(Entry {
                        f: d,
                        g: d,
                        slot: s,
                    });
                }
            }
        }
        let mut settled = 0;
        while let Some(Entry { g, slot, .. }) = heap.pop() {
            if done[slot] || g > dist[slot] {
                continue;
            }
            done[slot] = true;
            settled += 1;
            for (ai, (to, w, _)) in self.adj[slot].iter().enumerate() {
                let nd = g + w;
                if nd < dist[*to] {
                    dist[*to] = nd;
                    parent[*to] = Some((slot, ai));
                    heap.push(Entry {
                        f: nd,
                        g: nd,
                        slot: *to,
                    });
                }
            }
        }
        ShortestPaths {
            dist,
            parent,
            settled,
        }
    }

    pub fn distance(&self, sp: &ShortestPaths, key: u32) -> Option<f64> {
        let s = self.slot(key)?;
        sp.dist[s].is_finite().then_some(sp.dist[s])
    }

    /// Arc labels along the shortest path to `key`, plus the source it
    /// started from.
    pub fn path_to(&self, sp: &ShortestPaths, key: u32) -> Option<(u32, Vec<L>)> {
        let mut s = self.slot(key)?;
        if !sp.dist[s].is_finite() {
            return None;
        }
        let mut labels = Vec::new();
        while let Some((p, ai)) = sp.parent[s] {
            labels.push(self.adj[p][ai].2.clone());
            s = p;
        }
        labels.reverse();
        Some((self.keys[s], labels))
    }

    /// A* from `source` to `target` with heuristic `h` (must be admissible
    /// for optimality). Ties on f prefer the larger g.
    pub fn astar(
        &self,
        source: u32,
        target: u32,
        h: impl Fn(u32) -> f64,
    ) -> Option<AStarResult<L>> {
        let s = self.slot(source)?;
        let t = self.slot(target)?;
        let n = self.keys.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut closed = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[s] = 0.0;
        heap.push(Entry {
            f: h(source),
            g: 0.0,
            slot: s,
        });
        let mut closed_count = 0;
        while let Some(Entry { g, slot, .. }) = heap.pop() {
            if closed[slot] || g > dist[slot] {
                continue;
            }
            closed[slot] = true;
            closed_count += 1;
            if slot == t {
                let mut nodes = vec![self.keys[t]];
                let mut labels = Vec::new();
                let mut cur = t;
                while let Some((p, ai)) = parent[cur] {
                    labels.push(self.adj[p][ai].2.clone());
                    nodes.push(self.keys[p]);
                    cur = p;
                }
                nodes.reverse();
                labels.reverse();
                return Some(AStarResult {
                    cost: g,
                    nodes,
                    labels,
                    closed: closed_count,
                });
            }
            for (ai, (to, w, _)) in self.adj[slot].iter().enumerate() {
                if closed[*to] {
                    continue;
                }
                let nd = g + w;
                if nd < dist[*to] {
                    dist[*to] = nd;
                    parent[*to] = Some((slot, ai));
                    heap.push(Entry {
                        f: nd + h(self.keys[*to]),
                        g: nd,
                        slot: *to,
                    });
                }
            }
        }
        None
    }
}
