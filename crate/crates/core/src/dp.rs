//! Piecewise max-affine dynamic-programming systems
//! `x_j(k) = max_u ([M^u x(k−1)]_j + [N^u x(k)]_j + c^u_j)`,
//! their reduction to explicit first-order form, and growth-rate estimation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::PrecedenceGraph;
use crate::maxplus::MaxPlusPolyMatrix;

/// Seed used by the randomized property checks unless one is supplied.
pub const DEFAULT_SEED: u64 = 0x6d65_7472_6f21;

/// Relative spread under which per-component growth rates are reported as one value.
pub const GROWTH_AGREEMENT_TOL: f64 = 1e-6;

const ROW_SUM_TOL: f64 = 1e-12;

/// One affine form `Σ prev_i·x_i(k−1) + Σ cur_i·x_i(k) + c`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    #[serde(default)]
    pub prev: Vec<(usize, f64)>,
    #[serde(default)]
    pub cur: Vec<(usize, f64)>,
    pub c: f64,
}

impl Piece {
    pub fn new(prev: Vec<(usize, f64)>, cur: Vec<(usize, f64)>, c: f64) -> Self {
        Self { prev, cur, c }
    }

    /// `x_col(k − lag) + c` with unit coefficient, `lag ∈ {0, 1}`.
    pub fn shift(col: usize, lag: u32, c: f64) -> Self {
        match lag {
            0 => Self::new(Vec::new(), vec![(col, 1.0)], c),
            1 => Self::new(vec![(col, 1.0)], Vec::new(), c),
            _ => panic!("first-order piece cannot carry lag {lag}"),
        }
    }

    #[inline]
    fn eval(&self, x_prev: &[f64], x_cur: &[f64]) -> f64 {
        let mut s = self.c;
        for &(i, a) in &self.prev {
            s += a * x_prev[i];
        }
        for &(i, a) in &self.cur {
            s += a * x_cur[i];
        }
        s
    }

    fn coefficient_sum(&self) -> f64 {
        self.prev.iter().chain(&self.cur).map(|t| t.1).sum()
    }

    fn is_nonnegative(&self) -> bool {
        self.prev.iter().chain(&self.cur).all(|t| t.1 >= 0.0)
    }
}

/// A family of pieces per state component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxAffineSystem {
    n: usize,
    rows: Vec<Vec<Piece>>,
}

impl MaxAffineSystem {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            rows: vec![Vec::new(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<Piece>] {
        &self.rows
    }

    pub fn pieces(&self, row: usize) -> &[Piece] {
        &self.rows[row]
    }

    pub fn add_piece(&mut self, row: usize, piece: Piece) -> Result<()> {
        for &idx in std::iter::once(&row).chain(piece.prev.iter().chain(&piece.cur).map(|t| &t.0)) {
            if idx >= self.n {
                return Err(Error::IndexOutOfRange {
                    index: idx,
                    dim: self.n,
                });
            }
        }
        self.rows[row].push(piece);
        Ok(())
    }

    /// One piece per monomial; `A(γ)` must have degree ≤ 1.
    pub fn from_poly_matrix(a: &MaxPlusPolyMatrix) -> Result<Self> {
        let mut sys = Self::new(a.dim());
        for m in a.monomials() {
            if m.l > 1 {
                return Err(Error::InvalidConfig(format!(
                    "monomial of degree {} needs state augmentation",
                    m.l
                )));
            }
            sys.add_piece(m.i, Piece::shift(m.j, m.l, m.w))?;
        }
        Ok(sys)
    }

    /// Back to `A(γ)` when every piece is a single unit-coefficient shift.
    pub fn to_poly_matrix(&self) -> Option<MaxPlusPolyMatrix> {
        let mut a = MaxPlusPolyMatrix::zero(self.n);
        for (i, row) in self.rows.iter().enumerate() {
            for p in row {
                let (col, lag) = match (p.prev.as_slice(), p.cur.as_slice()) {
                    ([(j, a)], []) if *a == 1.0 => (*j, 1),
                    ([], [(j, a)]) if *a == 1.0 => (*j, 0),
                    _ => return None,
                };
                a.add_monomial(i, col, lag, p.c).ok()?;
            }
        }
        Some(a)
    }

    /// Componentwise max over pieces, reading both vectors as given.
    pub fn evaluate(&self, x_prev: &[f64], x_cur: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x_prev.len())?;
        self.check_len(x_cur.len())?;
        Ok((0..self.n)
            .map(|j| self.evaluate_row(j, x_prev, x_cur))
            .collect())
    }

    /// Right-hand side of component `j` alone.
    #[inline]
    pub fn evaluate_row(&self, j: usize, x_prev: &[f64], x_cur: &[f64]) -> f64 {
        self.rows[j]
            .iter()
            .map(|p| p.eval(x_prev, x_cur))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Arc `i → j` whenever row `j` reads `x_i(k)` with a nonzero coefficient.
    pub fn implicit_graph(&self) -> PrecedenceGraph {
        let mut g = PrecedenceGraph::new(self.n);
        for (j, row) in self.rows.iter().enumerate() {
            for p in row {
                for &(i, a) in &p.cur {
                    if a != 0.0 {
                        g.add_arc(i, j, a, 0);
                    }
                }
            }
        }
        g
    }

    /// Arcs `i → j` for positive coefficients at lag 0 and lag 1, i.e. the graph
    /// of `x ↦ f(x, x)`.
    pub fn dependency_graph(&self) -> PrecedenceGraph {
        let mut g = PrecedenceGraph::new(self.n);
        for (j, row) in self.rows.iter().enumerate() {
            for p in row {
                for &(i, a) in &p.cur {
                    if a > 0.0 {
                        g.add_arc(i, j, a, 0);
                    }
                }
                for &(i, a) in &p.prev {
                    if a > 0.0 {
                        g.add_arc(i, j, a, 1);
                    }
                }
            }
        }
        g
    }

    /// Per row: every piece has nonnegative coefficients with lag-1 and lag-0
    /// sums in `[0, 1]` and a total of exactly one.
    pub fn substochastic_rows(&self) -> Vec<bool> {
        self.rows
            .iter()
            .map(|row| {
                row.iter().all(|p| {
                    let m: f64 = p.prev.iter().map(|t| t.1).sum();
                    let nn: f64 = p.cur.iter().map(|t| t.1).sum();
                    p.is_nonnegative()
                        && m <= 1.0 + ROW_SUM_TOL
                        && nn <= 1.0 + ROW_SUM_TOL
                        && (p.coefficient_sum() - 1.0).abs() <= ROW_SUM_TOL
                })
            })
            .collect()
    }

    pub fn is_substochastic(&self) -> bool {
        self.substochastic_rows().into_iter().all(|b| b)
    }

    /// Update order in which no component reads a lag-0 value not yet computed.
    pub fn explicit_order(&self) -> Result<Vec<usize>> {
        let g = self.implicit_graph();
        g.topological_order().ok_or_else(|| Error::ImplicitCycle {
            node: g.node_on_cycle().unwrap_or(0),
        })
    }

    /// Solves one implicit step in `order`; `x_cur` is overwritten.
    pub fn step_into(&self, order: &[usize], x_prev: &[f64], x_cur: &mut [f64]) {
        for &j in order {
            x_cur[j] = self.evaluate_row(j, x_prev, x_cur);
        }
    }

    pub fn step(&self, order: &[usize], x_prev: &[f64]) -> Vec<f64> {
        let mut x = vec![f64::NEG_INFINITY; self.n];
        self.step_into(order, x_prev, &mut x);
        x
    }

    /// Runs `steps` updates from `x0` and estimates growth over a trailing window.
    pub fn iterate(&self, x0: &[f64], steps: usize) -> Result<Iteration> {
        self.check_len(x0.len())?;
        let order = self.explicit_order()?;
        let mut trajectory = Vec::with_capacity(steps + 1);
        trajectory.push(x0.to_vec());
        for k in 0..steps {
            let next = self.step(&order, &trajectory[k]);
            trajectory.push(next);
        }
        let growth = GrowthResult::from_trajectory(&trajectory, Some(self));
        Ok(Iteration { trajectory, growth })
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n,
                actual: len,
            })
        }
    }
}

/// Trajectory `x(0..=K)` and its growth estimate.
#[derive(Clone, Debug)]
pub struct Iteration {
    pub trajectory: Vec<Vec<f64>>,
    pub growth: GrowthResult,
}

/// Trailing window used for growth estimates: `max(50, K/10)`, capped at `K`.
pub fn growth_window(steps: usize) -> usize {
    (steps / 10).max(50).min(steps)
}

/// Asymptotic average growth estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthResult {
    /// Per-component `(x_j(K) − x_j(K−P)) / P`.
    pub chi: Vec<f64>,
    /// Common value when the relative spread of `chi` is below tolerance.
    pub mu: Option<f64>,
    /// `x(K) − K·μ`, shifted to a zero minimum.
    pub eigvec: Option<Vec<f64>>,
    /// `‖f(v, v − μ) − v‖_∞` for the reported eigenvector.
    pub residual: Option<f64>,
}

impl GrowthResult {
    pub fn from_trajectory(trajectory: &[Vec<f64>], sys: Option<&MaxAffineSystem>) -> Self {
        let k = trajectory.len() - 1;
        let p = growth_window(k).max(1);
        let last = &trajectory[k];
        let first = &trajectory[k - p.min(k)];
        let chi: Vec<f64> = last
            .iter()
            .zip(first)
            .map(|(a, b)| (a - b) / p as f64)
            .collect();
        let mu = common_value(&chi);
        let eigvec = mu.map(|mu| {
            let raw: Vec<f64> = last.iter().map(|x| x - k as f64 * mu).collect();
            let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
            raw.into_iter().map(|x| x - lo).collect::<Vec<_>>()
        });
        let residual = match (sys, mu, &eigvec) {
            (Some(sys), Some(mu), Some(v)) => {
                let shifted: Vec<f64> = v.iter().map(|x| x - mu).collect();
                sys.evaluate(&shifted, v).ok().map(|fv| {
                    fv.iter()
                        .zip(v)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
            }
            _ => None,
        };
        Self {
            chi,
            mu,
            eigvec,
            residual,
        }
    }

    /// Mean of `chi`, regardless of agreement.
    pub fn mean(&self) -> f64 {
        self.chi.iter().sum::<f64>() / self.chi.len() as f64
    }

    /// `(max − min) / |mean|`.
    pub fn relative_spread(&self) -> f64 {
        spread(&self.chi)
    }
}

fn spread(v: &[f64]) -> f64 {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (hi - lo) / mean.abs().max(f64::MIN_POSITIVE)
}

fn common_value(chi: &[f64]) -> Option<f64> {
    if chi.is_empty() || chi.iter().any(|c| !c.is_finite()) {
        return None;
    }
    (spread(chi) < GROWTH_AGREEMENT_TOL).then(|| chi.iter().sum::<f64>() / chi.len() as f64)
}

/// A map `f(x^(0), …, x^(L−1))` from `L` stacked state vectors to one.
pub trait HomogeneousMap {
    fn dim(&self) -> usize;
    /// Number of argument vectors, lag 0 included.
    fn arg_count(&self) -> usize;
    /// `args[l]` holds `x(k − l)`.
    fn apply(&self, args: &[Vec<f64>]) -> Vec<f64>;
}

impl HomogeneousMap for MaxAffineSystem {
    fn dim(&self) -> usize {
        self.n
    }

    fn arg_count(&self) -> usize {
        2
    }

    fn apply(&self, args: &[Vec<f64>]) -> Vec<f64> {
        (0..self.n)
            .map(|j| self.evaluate_row(j, &args[1], &args[0]))
            .collect()
    }
}

/// Term `coef · x_col(k − lag)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagTerm {
    pub col: usize,
    pub lag: u32,
    pub coef: f64,
}

/// Affine form over arbitrary lags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LaggedPiece {
    pub terms: Vec<LagTerm>,
    pub c: f64,
}

/// Max-affine system with memory: `x(k) = f(x(k), x(k−1), …, x(k−D))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaggedSystem {
    n: usize,
    rows: Vec<Vec<LaggedPiece>>,
}

impl LaggedSystem {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            rows: vec![Vec::new(); n],
        }
    }

    pub fn from_poly_matrix(a: &MaxPlusPolyMatrix) -> Self {
        let mut sys = Self::new(a.dim());
        for m in a.monomials() {
            sys.rows[m.i].push(LaggedPiece {
                terms: vec![LagTerm {
                    col: m.j,
                    lag: m.l,
                    coef: 1.0,
                }],
                c: m.w,
            });
        }
        sys
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<LaggedPiece>] {
        &self.rows
    }

    pub fn add_piece(&mut self, row: usize, piece: LaggedPiece) -> Result<()> {
        if row >= self.n {
            return Err(Error::IndexOutOfRange {
                index: row,
                dim: self.n,
            });
        }
        if let Some(t) = piece.terms.iter().find(|t| t.col >= self.n) {
            return Err(Error::IndexOutOfRange {
                index: t.col,
                dim: self.n,
            });
        }
        self.rows[row].push(piece);
        Ok(())
    }

    /// Memory depth: the largest lag read (at least 1).
    pub fn depth(&self) -> u32 {
        self.rows
            .iter()
            .flatten()
            .flat_map(|p| p.terms.iter().map(|t| t.lag))
            .max()
            .unwrap_or(1)
            .max(1)
    }

    /// Graph of lag-`lag` dependencies (arc `col → row` for positive coefficients).
    pub fn lag_graph(&self, lag: u32) -> PrecedenceGraph {
        let mut g = PrecedenceGraph::new(self.n);
        for (j, row) in self.rows.iter().enumerate() {
            for p in row {
                for t in p.terms.iter().filter(|t| t.lag == lag && t.coef > 0.0) {
                    g.add_arc(t.col, j, t.coef, lag);
                }
            }
        }
        g
    }

    /// Graph of `x ↦ f(x, …, x)`.
    pub fn combined_graph(&self) -> PrecedenceGraph {
        let mut g = PrecedenceGraph::new(self.n);
        for (j, row) in self.rows.iter().enumerate() {
            for p in row {
                for t in p.terms.iter().filter(|t| t.coef > 0.0) {
                    g.add_arc(t.col, j, t.coef, t.lag);
                }
            }
        }
        g
    }

    fn eval_row(&self, j: usize, history: &[&[f64]]) -> f64 {
        self.rows[j]
            .iter()
            .map(|p| {
                p.c + p
                    .terms
                    .iter()
                    .map(|t| t.coef * history[t.lag as usize][t.col])
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Direct recursion from `initial[q] = x(−q)`, `q = 0..D`, for `steps` updates.
    /// Returns `x(0..=steps)`.
    pub fn simulate(&self, initial: &[Vec<f64>], steps: usize) -> Result<Vec<Vec<f64>>> {
        let depth = self.depth() as usize;
        if initial.len() != depth {
            return Err(Error::DimensionMismatch {
                expected: depth,
                actual: initial.len(),
            });
        }
        let g0 = self.lag_graph(0);
        let mut implicit = PrecedenceGraph::new(self.n);
        for (j, row) in self.rows.iter().enumerate() {
            for p in row {
                for t in p.terms.iter().filter(|t| t.lag == 0 && t.coef != 0.0) {
                    implicit.add_arc(t.col, j, t.coef, 0);
                }
            }
        }
        let order = implicit
            .topological_order()
            .ok_or_else(|| Error::ImplicitCycle {
                node: g0
                    .node_on_cycle()
                    .or_else(|| implicit.node_on_cycle())
                    .unwrap_or(0),
            })?;
        // past[q] = x(k − 1 − q) while computing x(k)
        let mut past: Vec<Vec<f64>> = initial.to_vec();
        let mut out = vec![initial[0].clone()];
        for _ in 0..steps {
            let mut cur = vec![f64::NEG_INFINITY; self.n];
            for &j in &order {
                let mut hist: Vec<&[f64]> = Vec::with_capacity(depth + 1);
                hist.push(&cur);
                hist.extend(past.iter().map(|v| v.as_slice()));
                let val = self.eval_row(j, &hist);
                cur[j] = val;
            }
            past.rotate_right(1);
            past[0] = cur.clone();
            out.push(cur);
        }
        Ok(out)
    }
}

impl HomogeneousMap for LaggedSystem {
    fn dim(&self) -> usize {
        self.n
    }

    fn arg_count(&self) -> usize {
        self.depth() as usize + 1
    }

    fn apply(&self, args: &[Vec<f64>]) -> Vec<f64> {
        let hist: Vec<&[f64]> = args.iter().map(|v| v.as_slice()).collect();
        (0..self.n).map(|j| self.eval_row(j, &hist)).collect()
    }
}

/// First-order system equivalent to a system with memory.
#[derive(Clone, Debug)]
pub struct AugmentedSystem {
    pub system: MaxAffineSystem,
    /// Dimension of the original state; components `0..original_dim` are preserved.
    pub original_dim: usize,
    /// `(source, delay)` carried by each added component, in index order.
    pub delay_nodes: Vec<(usize, u32)>,
}

impl AugmentedSystem {
    /// Initial state `z(0)` from the original history `history[q] = x(−q)`.
    pub fn lift_history(&self, history: &[Vec<f64>]) -> Vec<f64> {
        let mut z = history[0].clone();
        z.extend(
            self.delay_nodes
                .iter()
                .map(|&(src, q)| history[q as usize][src]),
        );
        z
    }
}

/// Replaces every dependence on `x_j(k − l)`, `l ≥ 2`, by a delay line of
/// `l − 1` new components `z_q(k) = z_{q−1}(k−1)`, `z_1(k) = x_j(k−1)`.
/// Delay lines are shared per source component.
pub fn state_augment(sys: &LaggedSystem) -> AugmentedSystem {
    let n = sys.dim();
    let mut max_lag = vec![0u32; n];
    for p in sys.rows().iter().flatten() {
        for t in &p.terms {
            max_lag[t.col] = max_lag[t.col].max(t.lag);
        }
    }
    let mut delay_nodes = Vec::new();
    let mut node_of = vec![Vec::new(); n];
    for (src, &l) in max_lag.iter().enumerate() {
        for q in 1..l {
            node_of[src].push(n + delay_nodes.len());
            delay_nodes.push((src, q));
        }
    }
    let total = n + delay_nodes.len();
    let mut out = MaxAffineSystem::new(total);
    for (j, row) in sys.rows().iter().enumerate() {
        for p in row {
            let mut piece = Piece {
                c: p.c,
                ..Piece::default()
            };
            for t in &p.terms {
                match t.lag {
                    0 => piece.cur.push((t.col, t.coef)),
                    1 => piece.prev.push((t.col, t.coef)),
                    l => piece.prev.push((node_of[t.col][l as usize - 2], t.coef)),
                }
            }
            out.rows[j].push(piece);
        }
    }
    for (k, &(src, q)) in delay_nodes.iter().enumerate() {
        let feed = if q == 1 {
            src
        } else {
            node_of[src][q as usize - 2]
        };
        out.rows[n + k].push(Piece::shift(feed, 1, 0.0));
    }
    AugmentedSystem {
        system: out,
        original_dim: n,
        delay_nodes,
    }
}

/// Dependency graph of the explicit map `z(k) = h(z(k−1))` obtained by
/// substituting lag-0 terms along the explicit order.
pub fn explicit_dependency_graph(sys: &MaxAffineSystem) -> Result<PrecedenceGraph> {
    let order = sys.explicit_order()?;
    let n = sys.dim();
    let mut deps: Vec<Vec<bool>> = vec![vec![false; n]; n];
    for &j in &order {
        let mut row = vec![false; n];
        for p in sys.pieces(j) {
            for &(i, a) in &p.prev {
                if a > 0.0 {
                    row[i] = true;
                }
            }
            for &(i, a) in &p.cur {
                if a > 0.0 {
                    for (r, &d) in row.iter_mut().zip(&deps[i]) {
                        *r |= d;
                    }
                }
            }
        }
        deps[j] = row;
    }
    let mut g = PrecedenceGraph::new(n);
    for (j, row) in deps.iter().enumerate() {
        for (i, &d) in row.iter().enumerate() {
            if d {
                g.add_arc(i, j, 1.0, 1);
            }
        }
    }
    Ok(g)
}

/// A randomized counterexample to one of the checked properties.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub trial: usize,
    pub component: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of [`check_homogeneous_monotone`].
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyReport {
    pub trials: usize,
    pub homogeneity: Option<Counterexample>,
    pub monotonicity: Option<Counterexample>,
    pub nonexpansiveness: Option<Counterexample>,
}

impl PropertyReport {
    pub fn is_homogeneous(&self) -> bool {
        self.homogeneity.is_none()
    }

    pub fn is_monotone(&self) -> bool {
        self.monotonicity.is_none()
    }

    pub fn is_nonexpansive(&self) -> bool {
        self.nonexpansiveness.is_none()
    }

    pub fn passes(&self) -> bool {
        self.is_homogeneous() && self.is_monotone() && self.is_nonexpansive()
    }
}

/// Randomized check of additive 1-homogeneity, monotonicity and sup-norm
/// non-expansiveness. Points are drawn with spread `scale`; monotonicity is
/// probed both with single-coordinate and with full nonnegative perturbations.
pub fn check_homogeneous_monotone<F: HomogeneousMap + ?Sized>(
    map: &F,
    trials: usize,
    scale: f64,
    seed: u64,
) -> PropertyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = map.dim();
    let lags = map.arg_count();
    let tol = |a: f64, b: f64| 1e-9 * (1.0 + a.abs().max(b.abs()));
    let mut report = PropertyReport {
        trials,
        homogeneity: None,
        monotonicity: None,
        nonexpansiveness: None,
    };
    let random_point = |rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
        (0..lags)
            .map(|_| (0..n).map(|_| rng.gen_range(-scale..scale)).collect())
            .collect()
    };

    for trial in 0..trials {
        let x = random_point(&mut rng);
        let fx = map.apply(&x);

        if report.homogeneity.is_none() {
            let a: f64 = rng.gen_range(-scale..scale);
            let shifted: Vec<Vec<f64>> = x
                .iter()
                .map(|v| v.iter().map(|xi| xi + a).collect())
                .collect();
            let fs = map.apply(&shifted);
            if let Some(i) = (0..n).find(|&i| (fs[i] - (fx[i] + a)).abs() > tol(fs[i], fx[i] + a)) {
                report.homogeneity = Some(Counterexample {
                    trial,
                    component: i,
                    lhs: fs[i],
                    rhs: fx[i] + a,
                });
            }
        }

        if report.monotonicity.is_none() {
            let mut y = x.clone();
            if rng.gen_bool(0.5) {
                let l = rng.gen_range(0..lags);
                let i = rng.gen_range(0..n);
                y[l][i] += rng.gen_range(0.0..scale);
            } else {
                for v in &mut y {
                    for yi in v.iter_mut() {
                        *yi += rng.gen_range(0.0..scale);
                    }
                }
            }
            let fy = map.apply(&y);
            if let Some(i) = (0..n).find(|&i| fx[i] > fy[i] + tol(fx[i], fy[i])) {
                report.monotonicity = Some(Counterexample {
                    trial,
                    component: i,
                    lhs: fx[i],
                    rhs: fy[i],
                });
            }
        }

        if report.nonexpansiveness.is_none() {
            let mut y = x.clone();
            let radius: f64 = rng.gen_range(0.0..scale);
            for v in &mut y {
                for yi in v.iter_mut() {
                    *yi += rng.gen_range(-radius..=radius);
                }
            }
            let dist = x
                .iter()
                .flatten()
                .zip(y.iter().flatten())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let fy = map.apply(&y);
            if let Some(i) = (0..n).find(|&i| (fx[i] - fy[i]).abs() > dist + tol(fx[i], fy[i])) {
                report.nonexpansiveness = Some(Counterexample {
                    trial,
                    component: i,
                    lhs: (fx[i] - fy[i]).abs(),
                    rhs: dist,
                });
            }
        }
    }
    report
}
