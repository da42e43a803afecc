//! Spectral elements of max-plus polynomial matrices.
//!
//! The generalized eigenvalue of an irreducible `A(γ)` whose zero-lag part is
//! acyclic is the maximum cycle ratio `max_c W(c)/D(c)` of its precedence
//! graph. Durations can exceed one, so this is a cycle-*ratio* problem; it is
//! solved by Howard's policy iteration on the max-plus eigen-equation
//! `v_j = max_{i→j} (W − μ·D + v_i)`.

use crate::error::{Error, Result};
use crate::graph::{Arc, Cycle, PrecedenceGraph};
use crate::maxplus::MaxPlusPolyMatrix;

const MAX_POLICY_ITERATIONS: usize = 10_000;

/// Maximum cycle ratio and one cycle attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleMean {
    pub mu: f64,
    /// Lexicographically smallest node sequence among critical cycles.
    pub critical_cycle: Cycle,
}

/// Generalized eigenpair `A(μ⁻¹) ⊗ v = v`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenResult {
    pub mu: f64,
    pub eigenvector: Vec<f64>,
    pub critical_cycle: Cycle,
}

impl EigenResult {
    /// `‖A(μ⁻¹) ⊗ v − v‖_∞`.
    pub fn residual(&self, a: &MaxPlusPolyMatrix) -> f64 {
        fixed_point_residual(a, self.mu, &self.eigenvector)
    }
}

/// Sup-norm residual of `A(μ⁻¹) ⊗ v = v`.
pub fn fixed_point_residual(a: &MaxPlusPolyMatrix, mu: f64, v: &[f64]) -> f64 {
    let am = a.eval(-mu);
    (0..a.dim())
        .map(|i| {
            let lhs = (0..a.dim())
                .filter_map(|j| am.get(i, j).value().map(|aij| aij + v[j]))
                .fold(f64::NEG_INFINITY, f64::max);
            (lhs - v[i]).abs()
        })
        .fold(0.0, f64::max)
}

fn weight_scale(g: &PrecedenceGraph) -> f64 {
    g.arcs().iter().map(|a| a.weight.abs()).fold(1.0, f64::max)
}

fn check_preconditions(g: &PrecedenceGraph) -> Result<()> {
    if g.node_count() == 0 || g.arcs().is_empty() {
        return Err(Error::EmptyGraph);
    }
    if let Some(node) = g.zero_duration_subgraph().node_on_cycle() {
        return Err(Error::ZeroDurationCycle { node });
    }
    if !g.is_strongly_connected() {
        return Err(Error::Reducible);
    }
    Ok(())
}

struct Policy {
    mu: f64,
    values: Vec<f64>,
}

/// Howard policy iteration. A policy picks one incoming arc per node; its
/// functional graph decomposes into cycles with hanging trees.
fn policy_iteration(g: &PrecedenceGraph) -> Result<Policy> {
    const UNSEEN: usize = usize::MAX;
    const DONE: usize = usize::MAX - 1;

    let n = g.node_count();
    let arcs = g.arcs();
    let incoming = g.in_arcs();
    let scale = weight_scale(g);
    let eps_ratio = 1e-12 * scale;
    let eps_value = 1e-10 * scale * n as f64;

    let mut policy = Vec::with_capacity(n);
    for list in &incoming {
        let best = list
            .iter()
            .copied()
            .max_by(|&a, &b| arcs[a].weight.total_cmp(&arcs[b].weight))
            .ok_or(Error::Reducible)?;
        policy.push(best);
    }

    let mut values = vec![0.0; n];
    let mut ratio = vec![0.0; n];
    let eval_arc = |arc: &Arc, r: f64, values: &[f64]| {
        arc.weight - f64::from(arc.duration) * r + values[arc.from]
    };

    for _ in 0..MAX_POLICY_ITERATIONS {
        // value determination
        let mut state = vec![UNSEEN; n];
        let mut best_cycle_mean = f64::NEG_INFINITY;
        for start in 0..n {
            if state[start] != UNSEEN {
                continue;
            }
            let mut path = Vec::new();
            let mut u = start;
            while state[u] == UNSEEN {
                state[u] = start;
                path.push(u);
                u = arcs[policy[u]].from;
            }
            let tree_end = if state[u] == start {
                let pos = path
                    .iter()
                    .position(|&x| x == u)
                    .expect("cycle root on path");
                let cycle_arcs: Vec<Arc> =
                    path[pos..].iter().rev().map(|&x| arcs[policy[x]]).collect();
                let eta = Cycle::new(cycle_arcs).mean();
                best_cycle_mean = best_cycle_mean.max(eta);
                ratio[u] = eta;
                for idx in (pos + 1..path.len()).rev() {
                    let x = path[idx];
                    ratio[x] = eta;
                    values[x] = eval_arc(&arcs[policy[x]], eta, &values);
                }
                pos
            } else {
                path.len()
            };
            for idx in (0..tree_end).rev() {
                let x = path[idx];
                let pred = arcs[policy[x]].from;
                ratio[x] = ratio[pred];
                values[x] = eval_arc(&arcs[policy[x]], ratio[x], &values);
            }
            for &x in &path {
                state[x] = DONE;
            }
        }

        // improvement towards larger ratios
        let mut changed = false;
        for j in 0..n {
            let mut best = policy[j];
            let mut best_ratio = ratio[j];
            for &k in &incoming[j] {
                let r = ratio[arcs[k].from];
                if r > best_ratio + eps_ratio {
                    best_ratio = r;
                    best = k;
                }
            }
            if best != policy[j] {
                policy[j] = best;
                changed = true;
            }
        }
        if changed {
            continue;
        }

        // improvement of the bias within equal ratios
        for j in 0..n {
            let r = ratio[j];
            let mut best = policy[j];
            let mut best_value = eval_arc(&arcs[best], r, &values);
            for &k in &incoming[j] {
                if (ratio[arcs[k].from] - r).abs() > eps_ratio {
                    continue;
                }
                let val = eval_arc(&arcs[k], r, &values);
                if val > best_value + eps_value {
                    best_value = val;
                    best = k;
                }
            }
            if best != policy[j] {
                policy[j] = best;
                changed = true;
            }
        }
        if !changed {
            return Ok(Policy {
                mu: best_cycle_mean,
                values,
            });
        }
    }
    Err(Error::NoConvergence(MAX_POLICY_ITERATIONS))
}

/// Longest-path potentials from `root` in the graph reweighted by `W − μ·D`.
fn longest_paths(g: &PrecedenceGraph, mu: f64, root: usize) -> Vec<f64> {
    let n = g.node_count();
    let mut v = vec![f64::NEG_INFINITY; n];
    v[root] = 0.0;
    for _ in 0..n {
        let mut changed = false;
        for a in g.arcs() {
            if v[a.from] == f64::NEG_INFINITY {
                continue;
            }
            let cand = a.weight - f64::from(a.duration) * mu + v[a.from];
            if cand > v[a.to] {
                v[a.to] = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    v
}

/// Lexicographically smallest elementary cycle in the tight subgraph.
fn smallest_critical_cycle(g: &PrecedenceGraph, mu: f64, potentials: &[f64]) -> Option<Cycle> {
    let n = g.node_count();
    let tol = 1e-9 * weight_scale(g) * n as f64;
    let slack =
        |a: &Arc| a.weight - f64::from(a.duration) * mu + potentials[a.from] - potentials[a.to];
    let tight = g.filter(|a| slack(a) >= -tol);
    let out = tight.out_arcs();
    let tight_arcs = tight.arcs();

    // best parallel arc u → x in the tight graph
    let best_arc = |u: usize, x: usize| -> Option<Arc> {
        out[u]
            .iter()
            .map(|&k| tight_arcs[k])
            .filter(|a| a.to == x)
            .max_by(|a, b| slack(a).total_cmp(&slack(b)))
    };

    // can `target` be reached from `from` through nodes ≥ floor that are not blocked?
    let reaches = |from: usize, target: usize, floor: usize, blocked: &[bool]| -> bool {
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            for &k in &out[u] {
                let x = tight_arcs[k].to;
                if x == target {
                    return true;
                }
                if x >= floor && !blocked[x] && !seen[x] {
                    seen[x] = true;
                    stack.push(x);
                }
            }
        }
        false
    };

    for s in 0..n {
        let blocked = vec![false; n];
        if !reaches(s, s, s, &blocked) {
            continue;
        }
        let mut on_path = vec![false; n];
        on_path[s] = true;
        let mut u = s;
        let mut cycle = Vec::new();
        loop {
            if let Some(a) = best_arc(u, s) {
                cycle.push(a);
                return Some(Cycle::new(cycle));
            }
            let mut succ: Vec<usize> = out[u]
                .iter()
                .map(|&k| tight_arcs[k].to)
                .filter(|&x| x > s && !on_path[x])
                .collect();
            succ.sort_unstable();
            succ.dedup();
            let next = succ.into_iter().find(|&x| reaches(x, s, s, &on_path))?;
            cycle.push(best_arc(u, next).expect("tight arc exists"));
            on_path[next] = true;
            u = next;
        }
    }
    None
}

/// Maximum cycle ratio `max_c W(c)/D(c)` of a strongly connected graph.
pub fn max_cycle_mean(g: &PrecedenceGraph) -> Result<CycleMean> {
    check_preconditions(g)?;
    let policy = policy_iteration(g)?;
    let cycle = critical_cycle(g, policy.mu, &policy.values)?;
    Ok(CycleMean {
        mu: policy.mu,
        critical_cycle: cycle,
    })
}

fn critical_cycle(g: &PrecedenceGraph, mu: f64, howard_values: &[f64]) -> Result<Cycle> {
    // Howard's bias is a sub-fixed point up to rounding; potentials from a
    // node on a policy cycle are tight along every critical cycle.
    if let Some(c) = smallest_critical_cycle(g, mu, howard_values) {
        return Ok(c);
    }
    let root = (0..g.node_count()).next().ok_or(Error::EmptyGraph)?;
    let potentials = longest_paths(g, mu, root);
    smallest_critical_cycle(g, mu, &potentials).ok_or(Error::NoConvergence(0))
}

/// Generalized eigenpair of an irreducible `A(γ)` with acyclic `G(A_0)`.
pub fn generalized_eigenpair(a: &MaxPlusPolyMatrix) -> Result<EigenResult> {
    let g = PrecedenceGraph::from_poly_matrix(a);
    if g.node_count() == 0 || g.arcs().is_empty() {
        return Err(Error::EmptyGraph);
    }
    if !g.is_strongly_connected() {
        return Err(Error::Reducible);
    }
    let CycleMean { mu, critical_cycle } = max_cycle_mean(&g)?;
    let root = critical_cycle.nodes()[0];
    let eigenvector = longest_paths(&g, mu, root);
    Ok(EigenResult {
        mu,
        eigenvector,
        critical_cycle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_loop() {
        let mut g = PrecedenceGraph::new(1);
        g.add_arc(0, 0, 5.0, 1);
        let r = max_cycle_mean(&g).unwrap();
        assert_eq!(r.mu, 5.0);
        assert_eq!(r.critical_cycle.nodes(), vec![0]);
    }

    #[test]
    fn ratio_beats_weight() {
        // cycles (W=10, D=2) and (W=7, D=1) sharing node 0
        let mut g = PrecedenceGraph::new(2);
        g.add_arc(0, 1, 6.0, 1);
        g.add_arc(1, 0, 4.0, 1);
        g.add_arc(0, 0, 7.0, 1);
        let r = max_cycle_mean(&g).unwrap();
        assert_eq!(r.mu, 7.0);
        assert_eq!(r.critical_cycle.nodes(), vec![0]);
    }

    #[test]
    fn zero_duration_cycle_rejected() {
        let mut g = PrecedenceGraph::new(2);
        g.add_arc(0, 1, 1.0, 0);
        g.add_arc(1, 0, 1.0, 0);
        assert!(matches!(
            max_cycle_mean(&g),
            Err(Error::ZeroDurationCycle { .. })
        ));
    }

    #[test]
    fn reducible_rejected() {
        let mut g = PrecedenceGraph::new(2);
        g.add_arc(0, 0, 1.0, 1);
        g.add_arc(0, 1, 1.0, 1);
        assert_eq!(max_cycle_mean(&g), Err(Error::Reducible));
    }

    #[test]
    fn tie_returns_smallest_node_sequence() {
        // two cycles of mean 3: 1→2→1 and 0→3→0
        let mut g = PrecedenceGraph::new(4);
        g.add_arc(1, 2, 3.0, 1);
        g.add_arc(2, 1, 3.0, 1);
        g.add_arc(0, 3, 2.0, 1);
        g.add_arc(3, 0, 4.0, 1);
        g.add_arc(0, 1, 0.0, 1);
        g.add_arc(2, 0, 0.0, 1);
        let r = max_cycle_mean(&g).unwrap();
        assert_eq!(r.mu, 3.0);
        assert_eq!(r.critical_cycle.nodes(), vec![0, 3]);
    }

    #[test]
    fn scalar_eigenpair() {
        let mut a = MaxPlusPolyMatrix::zero(1);
        a.add_monomial(0, 0, 1, 4.5).unwrap();
        let e = generalized_eigenpair(&a).unwrap();
        assert_eq!(e.mu, 4.5);
        assert!(e.residual(&a) < 1e-12);
    }

    #[test]
    fn eigenpair_with_implicit_arcs() {
        // x0(k) = max(x1(k) + 2, x0(k−1) + 1), x1(k) = x0(k−2) + 7
        let mut a = MaxPlusPolyMatrix::zero(2);
        a.add_monomial(0, 1, 0, 2.0).unwrap();
        a.add_monomial(0, 0, 1, 1.0).unwrap();
        a.add_monomial(1, 0, 2, 7.0).unwrap();
        let e = generalized_eigenpair(&a).unwrap();
        assert_eq!(e.mu, 4.5);
        assert!(e.residual(&a) < 1e-9);
    }

    #[test]
    fn cyclic_zero_lag_part_rejected() {
        let mut a = MaxPlusPolyMatrix::zero(2);
        a.add_monomial(0, 1, 0, 2.0).unwrap();
        a.add_monomial(1, 0, 0, 2.0).unwrap();
        assert!(matches!(
            generalized_eigenpair(&a),
            Err(Error::ZeroDurationCycle { .. })
        ));
    }
}
