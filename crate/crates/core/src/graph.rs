//! Precedence graphs of max-plus polynomial matrices.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::maxplus::MaxPlusPolyMatrix;

/// Arc `from → to` with weight `W` (seconds) and duration `D` (event lag).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
    pub duration: u32,
}

/// Directed multigraph on nodes `0..n`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PrecedenceGraph {
    n: usize,
    arcs: Vec<Arc>,
}

impl PrecedenceGraph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            arcs: Vec::new(),
        }
    }

    /// One arc `j → i` of weight `w` and duration `l` per monomial `w γ^l` at `(i, j)`.
    pub fn from_poly_matrix(a: &MaxPlusPolyMatrix) -> Self {
        let mut g = Self::new(a.dim());
        for m in a.monomials() {
            g.add_arc(m.j, m.i, m.w, m.l);
        }
        g
    }

    pub fn add_arc(&mut self, from: usize, to: usize, weight: f64, duration: u32) {
        assert!(from < self.n && to < self.n, "arc endpoint out of range");
        self.arcs.push(Arc {
            from,
            to,
            weight,
            duration,
        });
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Indices of arcs leaving each node.
    pub fn out_arcs(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for (k, a) in self.arcs.iter().enumerate() {
            out[a.from].push(k);
        }
        out
    }

    /// Indices of arcs entering each node.
    pub fn in_arcs(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (k, a) in self.arcs.iter().enumerate() {
            inc[a.to].push(k);
        }
        inc
    }

    /// Subgraph keeping only the arcs accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(&Arc) -> bool) -> Self {
        Self {
            n: self.n,
            arcs: self.arcs.iter().copied().filter(|a| keep(a)).collect(),
        }
    }

    /// Sub-graph of zero-duration arcs, the graph of `A_0`.
    pub fn zero_duration_subgraph(&self) -> Self {
        self.filter(|a| a.duration == 0)
    }

    fn reachable_from(&self, start: usize, forward: bool) -> Vec<bool> {
        let mut adj = vec![Vec::new(); self.n];
        for a in &self.arcs {
            if forward {
                adj[a.from].push(a.to);
            } else {
                adj[a.to].push(a.from);
            }
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Every node reaches every other node. The empty graph is not strongly connected.
    pub fn is_strongly_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        self.reachable_from(0, true).iter().all(|&b| b)
            && self.reachable_from(0, false).iter().all(|&b| b)
    }

    /// No directed cycle (self-loops count as cycles).
    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Kahn order taking the smallest ready node first; `None` when cyclic.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.n];
        let mut succ = vec![Vec::new(); self.n];
        for a in &self.arcs {
            indeg[a.to] += 1;
            succ[a.from].push(a.to);
        }
        let mut ready: BinaryHeap<Reverse<usize>> = (0..self.n)
            .filter(|&v| indeg[v] == 0)
            .map(Reverse)
            .collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(Reverse(u)) = ready.pop() {
            order.push(u);
            for &v in &succ[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    ready.push(Reverse(v));
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    /// Some node lying on a cycle, if any.
    pub fn node_on_cycle(&self) -> Option<usize> {
        let order = self.topological_order();
        if order.is_some() {
            return None;
        }
        // nodes left with positive in-degree after peeling; one of them is on a cycle
        let mut indeg = vec![0usize; self.n];
        let mut succ = vec![Vec::new(); self.n];
        for a in &self.arcs {
            indeg[a.to] += 1;
            succ[a.from].push(a.to);
        }
        let mut stack: Vec<usize> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        while let Some(u) = stack.pop() {
            for &v in &succ[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    stack.push(v);
                }
            }
        }
        // walk predecessors inside the remainder until a node repeats
        let mut pred = vec![usize::MAX; self.n];
        for a in &self.arcs {
            if indeg[a.from] > 0 && indeg[a.to] > 0 {
                pred[a.to] = a.from;
            }
        }
        let mut u = (0..self.n).find(|&v| indeg[v] > 0)?;
        let mut seen = vec![false; self.n];
        while !seen[u] {
            seen[u] = true;
            u = pred[u];
        }
        Some(u)
    }
}

/// An elementary cycle given by its arcs, rotated to start at its smallest node.
#[derive(Clone, Debug, PartialEq)]
pub struct Cycle {
    arcs: Vec<Arc>,
}

impl Cycle {
    /// Canonicalizes the rotation. Panics if `arcs` is empty or not a closed walk.
    pub fn new(mut arcs: Vec<Arc>) -> Self {
        assert!(!arcs.is_empty(), "empty cycle");
        for w in arcs.windows(2) {
            assert_eq!(w[0].to, w[1].from, "arcs do not chain");
        }
        assert_eq!(arcs.last().unwrap().to, arcs[0].from, "walk is not closed");
        let start = (0..arcs.len()).min_by_key(|&k| arcs[k].from).unwrap();
        arcs.rotate_left(start);
        Self { arcs }
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Node sequence starting at the smallest node.
    pub fn nodes(&self) -> Vec<usize> {
        self.arcs.iter().map(|a| a.from).collect()
    }

    pub fn weight(&self) -> f64 {
        self.arcs.iter().map(|a| a.weight).sum()
    }

    pub fn duration(&self) -> u32 {
        self.arcs.iter().map(|a| a.duration).sum()
    }

    /// `W(c) / D(c)`; infinite for a zero-duration cycle.
    pub fn mean(&self) -> f64 {
        let d = self.duration();
        if d == 0 {
            f64::INFINITY
        } else {
            self.weight() / f64::from(d)
        }
    }
}
