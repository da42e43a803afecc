#![allow(dead_code)]

use metro_dynamics::dp::{LagTerm, LaggedPiece, LaggedSystem};
use metro_dynamics::graph::{Arc, Cycle, PrecedenceGraph};
use metro_dynamics::line::{LineModel, TrainPlacement};
use rand::seq::SliceRandom;
use rand::Rng;

/// Largest `W(c)/D(c)` over all elementary cycles, by brute-force enumeration.
pub fn enumerate_max_cycle_ratio(g: &PrecedenceGraph) -> Option<(f64, Vec<usize>)> {
    let out = g.out_arcs();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut path: Vec<Arc> = Vec::new();
    let mut on_path = vec![false; g.node_count()];

    fn dfs(
        g: &PrecedenceGraph,
        out: &[Vec<usize>],
        start: usize,
        u: usize,
        path: &mut Vec<Arc>,
        on_path: &mut [bool],
        best: &mut Option<(f64, Vec<usize>)>,
    ) {
        for &k in &out[u] {
            let a = g.arcs()[k];
            if a.to == start {
                path.push(a);
                let c = Cycle::new(path.clone());
                let mean = c.mean();
                let better = match best {
                    None => true,
                    Some((b, nodes)) => mean > *b || (mean == *b && c.nodes() < *nodes),
                };
                if better {
                    *best = Some((mean, c.nodes()));
                }
                path.pop();
            } else if a.to > start && !on_path[a.to] {
                on_path[a.to] = true;
                path.push(a);
                dfs(g, out, start, a.to, path, on_path, best);
                path.pop();
                on_path[a.to] = false;
            }
        }
    }

    for s in 0..g.node_count() {
        on_path[s] = true;
        dfs(g, &out, s, s, &mut path, &mut on_path, &mut best);
        on_path[s] = false;
    }
    best
}

/// Strongly connected multigraph on `n` nodes whose cycles all have positive duration.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize) -> PrecedenceGraph {
    loop {
        let mut g = PrecedenceGraph::new(n);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        for i in 0..n {
            let d = if i == 0 { 1 } else { rng.gen_range(0..=2) };
            g.add_arc(perm[i], perm[(i + 1) % n], rng.gen_range(-20.0..80.0), d);
        }
        for _ in 0..rng.gen_range(0..=2 * n) {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            g.add_arc(a, b, rng.gen_range(-20.0..80.0), rng.gen_range(0..=3));
        }
        if g.zero_duration_subgraph().is_acyclic() {
            return g;
        }
    }
}

/// Random line with `n` segments; roughly half the nodes are platforms.
pub fn random_line<R: Rng>(rng: &mut R, n: usize) -> LineModel {
    let platform: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let r = (0..n).map(|_| rng.gen_range(5.0..60.0)).collect();
    let w = platform
        .iter()
        .map(|&p| if p { rng.gen_range(5.0..40.0) } else { 0.0 })
        .collect();
    let s = (0..n).map(|_| rng.gen_range(5.0..60.0)).collect();
    LineModel::from_parts(r, w, s, platform, vec![200.0; n]).unwrap()
}

/// Line with at least one platform, so demand and control have somewhere to act.
pub fn random_line_with_platforms<R: Rng>(rng: &mut R, n: usize) -> LineModel {
    loop {
        let m = random_line(rng, n);
        if !m.platforms().is_empty() {
            return m;
        }
    }
}

/// `m` trains on distinct random segments.
pub fn random_placement<R: Rng>(rng: &mut R, n: usize, m: usize) -> TrainPlacement {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let mut b = vec![false; n];
    for &j in &idx[..m] {
        b[j] = true;
    }
    TrainPlacement::from_flags(b)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Random convex combination of 1..=3 terms.
pub fn convex_terms<R: Rng>(rng: &mut R, choices: &[(usize, u32)]) -> Vec<LagTerm> {
    let k = rng.gen_range(1..=3.min(choices.len()));
    let mut w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    (0..k)
        .map(|q| {
            let (col, lag) = choices[rng.gen_range(0..choices.len())];
            LagTerm {
                col,
                lag,
                coef: w[q],
            }
        })
        .collect()
}

/// Random monotone homogeneous system with memory `depth` whose lag-0 graph
/// only points from lower to higher indices, and a ring at lag 1 for connectivity.
pub fn random_lagged<R: Rng>(rng: &mut R, n: usize, depth: u32) -> LaggedSystem {
    let mut sys = LaggedSystem::new(n);
    for j in 0..n {
        sys.add_piece(
            j,
            LaggedPiece {
                terms: vec![LagTerm {
                    col: (j + 1) % n,
                    lag: 1,
                    coef: 1.0,
                }],
                c: rng.gen_range(0.0..30.0),
            },
        )
        .unwrap();
        let mut choices: Vec<(usize, u32)> = Vec::new();
        for col in 0..n {
            for lag in 1..=depth {
                choices.push((col, lag));
            }
            if col < j {
                choices.push((col, 0));
            }
        }
        for _ in 0..rng.gen_range(1..=3) {
            sys.add_piece(
                j,
                LaggedPiece {
                    terms: convex_terms(rng, &choices),
                    c: rng.gen_range(-10.0..40.0),
                },
            )
            .unwrap();
        }
    }
    // make sure the requested depth is actually used
    let j = rng.gen_range(0..n);
    sys.add_piece(
        j,
        LaggedPiece {
            terms: vec![LagTerm {
                col: rng.gen_range(0..n),
                lag: depth,
                coef: 1.0,
            }],
            c: 5.0,
        },
    )
    .unwrap();
    sys
}
