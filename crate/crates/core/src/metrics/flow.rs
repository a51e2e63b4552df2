//! Dinic max-flow on small integer-capacity networks.
//!
//! Used only to decide feasibility of a candidate bottleneck value: the
//! network is bipartite-with-diagonal and has unit capacities almost
//! everywhere, where Dinic behaves like Hopcroft-Karp.

pub struct FlowNetwork {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u32>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> FlowNetwork {
        FlowNetwork {
            adj: vec![Vec::new(); nodes],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    /// Add a directed edge with the given capacity (and its residual).
    pub fn add_edge(&mut self, from: usize, to: usize, cap: u32) {
        self.adj[from].push(self.to.len());
        self.to.push(to);
        self.cap.push(cap);
        self.adj[to].push(self.to.len());
        self.to.push(from);
        self.cap.push(0);
    }

    pub fn max_flow(&mut self, source: usize, sink: usize) -> u32 {
        let mut total = 0;
        let mut level = vec![u32::MAX; self.adj.len()];
        let mut queue = Vec::with_capacity(self.adj.len());
        loop {
            // BFS: layer the residual graph from the source.
            level.fill(u32::MAX);
            level[source] = 0;
            queue.clear();
            queue.push(source);
            let mut head = 0;
            while head < queue.len() {
                let u = queue[head];
                head += 1;
                for &e in &self.adj[u] {
                    let v = self.to[e];
                    if self.cap[e] > 0 && level[v] == u32::MAX {
                        level[v] = level[u] + 1;
                        queue.push(v);
                    }
                }
            }
            if level[sink] == u32::MAX {
                return total;
            }
            // DFS blocking flow with per-node edge cursors.
            let mut cursor = vec![0usize; self.adj.len()];
            loop {
                let pushed = self.push(source, sink, u32::MAX, &level, &mut cursor);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
    }

    fn push(
        &mut self,
        u: usize,
        sink: usize,
        limit: u32,
        level: &[u32],
        cursor: &mut [usize],
    ) -> u32 {
        if u == sink {
            return limit;
        }
        while cursor[u] < self.adj[u].len() {
            let e = self.adj[u][cursor[u]];
            let v = self.to[e];
            if self.cap[e] > 0 && level[v] == level[u] + 1 {
                let pushed = self.push(v, sink, limit.min(self.cap[e]), level, cursor);
                if pushed > 0 {
                    self.cap[e] -= pushed;
                    self.cap[e ^ 1] += pushed;
                    return pushed;
                }
            }
            cursor[u] += 1;
        }
        0
    }

    /// Forward edges out of `node` that carry flow (edge target per unit).
    pub fn saturated_targets(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[node]
            .iter()
            .filter(|&&e| e % 2 == 0 && self.cap[e ^ 1] > 0)
            .map(|&e| self.to[e])
    }
}
