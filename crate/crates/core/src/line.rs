//! Discretized metro line, train placement and the three departure-time dynamics.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dp::{MaxAffineSystem, Piece};
use crate::error::{Error, Result};
use crate::maxplus::MaxPlusPolyMatrix;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

fn default_schema() -> u32 {
    CONFIG_SCHEMA_VERSION
}

fn default_train_length() -> f64 {
    90.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationSpec {
    pub name: String,
    /// Distance to the next station in the running direction; absent on the last one.
    #[serde(default)]
    pub distance_to_next: Option<f64>,
}

/// A rate given once for every platform or once per platform (in loop order).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rates {
    Uniform(f64),
    PerPlatform(Vec<f64>),
}

impl Default for Rates {
    fn default() -> Self {
        Rates::Uniform(0.0)
    }
}

impl Rates {
    fn expand(&self, platforms: usize, what: &str) -> Result<Vec<f64>> {
        match self {
            Rates::Uniform(v) => Ok(vec![*v; platforms]),
            Rates::PerPlatform(v) if v.len() == platforms => Ok(v.clone()),
            Rates::PerPlatform(v) => Err(Error::InvalidConfig(format!(
                "{what}: expected {platforms} platform values, got {}",
                v.len()
            ))),
        }
    }
}

/// Passenger arrival (`lambda`) and upload (`alpha`) rates, passengers/s.
/// When `od_matrix` is present, `lambda_j` is the row sum `Σ_i λ_ji`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DemandSpec {
    #[serde(default)]
    pub lambda: Rates,
    #[serde(default)]
    pub alpha: Rates,
    #[serde(default)]
    pub od_matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentRounding {
    /// `max(1, floor(ℓ / target))` segments per inter-station.
    #[default]
    Floor,
    /// `ceil(ℓ / target)` segments per inter-station.
    Ceil,
}

impl SegmentRounding {
    fn count(self, length: f64, target: f64) -> usize {
        let q = length / target;
        let k = match self {
            SegmentRounding::Floor => q.floor(),
            SegmentRounding::Ceil => q.ceil(),
        };
        (k as usize).max(1)
    }
}

/// Line description as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub stations: Vec<StationSpec>,
    /// Length of the turnaround run at each end of the line (m).
    pub terminus_length: f64,
    pub target_segment_length: f64,
    #[serde(default)]
    pub segment_rounding: SegmentRounding,
    #[serde(default = "default_train_length")]
    pub train_length: f64,
    pub v_run: f64,
    pub v_terminus: f64,
    /// Acceleration out of a station (m/s²); constant speed when absent.
    #[serde(default)]
    pub acceleration: Option<f64>,
    /// Braking into a station (m/s²); constant speed when absent.
    #[serde(default)]
    pub deceleration: Option<f64>,
    pub w_min_platform: f64,
    pub s_min: f64,
    #[serde(default)]
    pub w_max_default: Option<f64>,
    #[serde(default)]
    pub demand: DemandSpec,
}

impl LineConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Inter-station lengths in the running direction.
    pub fn inter_station_lengths(&self) -> Vec<f64> {
        self.stations
            .iter()
            .filter_map(|s| s.distance_to_next)
            .collect()
    }

    pub fn platform_count(&self) -> usize {
        2 * self.stations.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return bad(format!(
                "unsupported schema_version {}",
                self.schema_version
            ));
        }
        if self.stations.len() < 2 {
            return bad("at least two stations are required".into());
        }
        let (last, inner) = self.stations.split_last().unwrap();
        if last.distance_to_next.is_some() {
            return bad(format!(
                "last station `{}` must not have distance_to_next",
                last.name
            ));
        }
        for s in inner {
            match s.distance_to_next {
                Some(d) if d > 0.0 && d.is_finite() => {}
                Some(d) => {
                    return bad(format!(
                        "distance after `{}` must be positive, got {d}",
                        s.name
                    ))
                }
                None => return bad(format!("station `{}` is missing distance_to_next", s.name)),
            }
        }
        for (field, v) in [
            ("terminus_length", self.terminus_length),
            ("target_segment_length", self.target_segment_length),
            ("train_length", self.train_length),
            ("v_run", self.v_run),
            ("v_terminus", self.v_terminus),
            ("s_min", self.s_min),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{field} must be positive, got {v}"));
            }
        }
        for (field, v) in [
            ("acceleration", self.acceleration),
            ("deceleration", self.deceleration),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("{field} must be positive, got {v}"));
                }
            }
        }
        if !(self.w_min_platform >= 0.0 && self.w_min_platform.is_finite()) {
            return bad(format!(
                "w_min_platform must be nonnegative, got {}",
                self.w_min_platform
            ));
        }
        if let Some(w) = self.w_max_default {
            if !(w >= self.w_min_platform && w.is_finite()) {
                return bad(format!(
                    "w_max_default must be at least w_min_platform, got {w}"
                ));
            }
        }
        self.platform_demand().map(|_| ())
    }

    /// `(λ, α)` per platform in loop order.
    pub fn platform_demand(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let p = self.platform_count();
        let alpha = self.demand.alpha.expand(p, "demand.alpha")?;
        let lambda = match &self.demand.od_matrix {
            Some(od) => {
                if od.len() != p || od.iter().any(|row| row.len() != p) {
                    return Err(Error::InvalidConfig(format!(
                        "demand.od_matrix must be {p}×{p}"
                    )));
                }
                od.iter().map(|row| row.iter().sum()).collect()
            }
            None => self.demand.lambda.expand(p, "demand.lambda")?,
        };
        for (j, (&l, &a)) in lambda.iter().zip(&alpha).enumerate() {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "lambda at platform {j} must be nonnegative, got {l}"
                )));
            }
            if l > 0.0 && !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "alpha at platform {j} must be positive where lambda > 0, got {a}"
                )));
            }
        }
        Ok((lambda, alpha))
    }
}

/// Per-node passenger rates; zero away from platforms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Demand {
    pub lambda: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl Demand {
    pub fn zero(n: usize) -> Self {
        Self {
            lambda: vec![0.0; n],
            alpha: vec![0.0; n],
        }
    }

    /// Spreads per-platform rates (loop order) over the nodes of `model`.
    pub fn from_platform_rates(model: &LineModel, lambda: &[f64], alpha: &[f64]) -> Result<Self> {
        let platforms = model.platforms();
        if lambda.len() != platforms.len() || alpha.len() != platforms.len() {
            return Err(Error::DimensionMismatch {
                expected: platforms.len(),
                actual: lambda.len().min(alpha.len()),
            });
        }
        let mut d = Self::zero(model.n());
        for (p, &j) in platforms.iter().enumerate() {
            d.lambda[j] = lambda[p];
            d.alpha[j] = alpha[p];
        }
        Ok(d)
    }

    /// Same upload rates, arrival rates multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            lambda: self.lambda.iter().map(|l| l * c).collect(),
            alpha: self.alpha.clone(),
        }
    }

    /// `λ_j / α_j`, zero where nothing arrives.
    pub fn ratio(&self, j: usize) -> f64 {
        if self.lambda[j] == 0.0 {
            0.0
        } else {
            self.lambda[j] / self.alpha[j]
        }
    }

    fn check(&self, model: &LineModel) -> Result<()> {
        let n = model.n();
        if self.lambda.len() != n || self.alpha.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: self.lambda.len(),
            });
        }
        for j in 0..n {
            let (l, a) = (self.lambda[j], self.alpha[j]);
            if l < 0.0 || (l > 0.0 && !(a > 0.0)) {
                return Err(Error::InvalidConfig(format!(
                    "node {j}: lambda {l}, alpha {a}"
                )));
            }
            if l > 0.0 && !model.is_platform(j) {
                return Err(Error::InvalidConfig(format!(
                    "node {j} is not a platform but has lambda {l}"
                )));
            }
        }
        Ok(())
    }
}

/// Discretized circular line. Segment `j` runs from node `j−1` to node `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineModel {
    r: Vec<f64>,
    w_min: Vec<f64>,
    s_min: Vec<f64>,
    is_platform: Vec<bool>,
    segment_length: Vec<f64>,
    labels: Vec<Option<String>>,
    demand: Demand,
    w_max_default: Option<f64>,
}

impl LineModel {
    /// Direct construction; `w_min` must vanish off platforms.
    pub fn from_parts(
        r: Vec<f64>,
        w_min: Vec<f64>,
        s_min: Vec<f64>,
        is_platform: Vec<bool>,
        segment_length: Vec<f64>,
    ) -> Result<Self> {
        let n = r.len();
        for len in [
            w_min.len(),
            s_min.len(),
            is_platform.len(),
            segment_length.len(),
        ] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: len,
                });
            }
        }
        if n < 2 {
            return Err(Error::InvalidConfig(
                "a line needs at least two segments".into(),
            ));
        }
        for j in 0..n {
            if !(r[j] >= 0.0 && r[j].is_finite()) || !(s_min[j] > 0.0) || !(w_min[j] >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "segment {j}: bad r, w_min or s_min"
                )));
            }
            if !is_platform[j] && w_min[j] != 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "w_min must be zero at non-platform node {j}"
                )));
            }
            if !(segment_length[j] > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "segment {j} has nonpositive length"
                )));
            }
        }
        Ok(Self {
            labels: vec![None; n],
            demand: Demand::zero(n),
            r,
            w_min,
            s_min,
            is_platform,
            segment_length,
            w_max_default: None,
        })
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    /// Total length `L` (m).
    pub fn length(&self) -> f64 {
        self.segment_length.iter().sum()
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn w_min(&self) -> &[f64] {
        &self.w_min
    }

    pub fn s_min(&self) -> &[f64] {
        &self.s_min
    }

    pub fn segment_lengths(&self) -> &[f64] {
        &self.segment_length
    }

    /// `t̲_j = r_j + w̲_j`.
    pub fn t_min(&self, j: usize) -> f64 {
        self.r[j] + self.w_min[j]
    }

    pub fn t_min_all(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.t_min(j)).collect()
    }

    pub fn is_platform(&self, j: usize) -> bool {
        self.is_platform[j]
    }

    pub fn platform_flags(&self) -> &[bool] {
        &self.is_platform
    }

    /// Platform nodes in loop order.
    pub fn platforms(&self) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.is_platform[j]).collect()
    }

    pub fn label(&self, j: usize) -> Option<&str> {
        self.labels[j].as_deref()
    }

    /// Rates read from the configuration.
    pub fn demand(&self) -> &Demand {
        &self.demand
    }

    pub fn w_max_default(&self) -> Option<f64> {
        self.w_max_default
    }

    pub fn sum_t_min(&self) -> f64 {
        (0..self.n()).map(|j| self.t_min(j)).sum()
    }

    pub fn sum_s_min(&self) -> f64 {
        self.s_min.iter().sum()
    }

    /// `max_j (t̲_j + s̲_j)`.
    pub fn h_min(&self) -> f64 {
        (0..self.n())
            .map(|j| self.t_min(j) + self.s_min[j])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[inline]
    pub fn prev(&self, j: usize) -> usize {
        (j + self.n() - 1) % self.n()
    }

    #[inline]
    pub fn next(&self, j: usize) -> usize {
        (j + 1) % self.n()
    }
}

/// Time to reach `x` on an inter-station of length `len`, starting and ending at rest.
fn run_time(x: f64, len: f64, v: f64, accel: Option<f64>, decel: Option<f64>) -> f64 {
    let mut vp = v;
    let ramp = |a: Option<f64>, v: f64| a.map_or(0.0, |a| v * v / (2.0 * a));
    let (mut xa, mut xb) = (ramp(accel, v), ramp(decel, v));
    if xa + xb > len {
        // triangular profile
        let inv = accel.map_or(0.0, |a| 1.0 / a) + decel.map_or(0.0, |b| 1.0 / b);
        vp = (2.0 * len / inv).sqrt();
        xa = ramp(accel, vp);
        xb = ramp(decel, vp);
    }
    let ta = accel.map_or(0.0, |a| vp / a);
    let total = ta + (len - xa - xb) / vp + decel.map_or(0.0, |b| vp / b);
    match (accel, decel) {
        (Some(a), _) if x <= xa => (2.0 * x / a).sqrt(),
        (_, Some(b)) if x > len - xb => total - (2.0 * (len - x) / b).sqrt(),
        _ => ta + (x - xa) / vp,
    }
}

/// Splits the line into segments and closes it into a loop: direction A from the
/// first to the last station, a terminus run, direction B back, and a second terminus run.
pub fn segmentize(cfg: &LineConfig) -> Result<LineModel> {
    cfg.validate()?;
    let names: Vec<&str> = cfg.stations.iter().map(|s| s.name.as_str()).collect();
    let lengths = cfg.inter_station_lengths();

    let mut r = Vec::new();
    let mut seg = Vec::new();
    let mut platform = Vec::new();
    let mut labels = Vec::new();

    let mut push_run =
        |len: f64, speed: f64, accel: Option<f64>, decel: Option<f64>, end: String| -> Result<()> {
            let k = cfg.segment_rounding.count(len, cfg.target_segment_length);
            let piece = len / k as f64;
            if piece < cfg.train_length {
                return Err(Error::InvalidConfig(format!(
                    "segment of {piece:.1} m before `{end}` is shorter than a train ({} m)",
                    cfg.train_length
                )));
            }
            for q in 0..k {
                let (x0, x1) = (q as f64 * piece, (q + 1) as f64 * piece);
                r.push(
                    run_time(x1, len, speed, accel, decel) - run_time(x0, len, speed, accel, decel),
                );
                seg.push(piece);
                let last = q + 1 == k;
                platform.push(last);
                labels.push(last.then(|| end.clone()));
            }
            Ok(())
        };

    let (a, b) = (cfg.acceleration, cfg.deceleration);
    for (i, &len) in lengths.iter().enumerate() {
        push_run(len, cfg.v_run, a, b, format!("{} A", names[i + 1]))?;
    }
    push_run(
        cfg.terminus_length,
        cfg.v_terminus,
        None,
        None,
        format!("{} B", names[names.len() - 1]),
    )?;
    for (i, &len) in lengths.iter().enumerate().rev() {
        push_run(len, cfg.v_run, a, b, format!("{} B", names[i]))?;
    }
    push_run(
        cfg.terminus_length,
        cfg.v_terminus,
        None,
        None,
        format!("{} A", names[0]),
    )?;

    // loop starts at the first station's direction-A platform
    let n = r.len();
    r.rotate_right(1);
    seg.rotate_right(1);
    platform.rotate_right(1);
    labels.rotate_right(1);

    let w_min = platform
        .iter()
        .map(|&p| if p { cfg.w_min_platform } else { 0.0 })
        .collect();
    let mut model = LineModel::from_parts(r, w_min, vec![cfg.s_min; n], platform, seg)?;
    model.labels = labels;
    model.w_max_default = cfg.w_max_default;
    let (lambda, alpha) = cfg.platform_demand()?;
    model.demand = Demand::from_platform_rates(&model, &lambda, &alpha)?;
    Ok(model)
}

/// Initial occupancy: `b_j = 1` when a train sits on segment `j` at time zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainPlacement {
    b: Vec<bool>,
}

impl TrainPlacement {
    pub fn from_flags(b: Vec<bool>) -> Self {
        Self { b }
    }

    pub fn flags(&self) -> &[bool] {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    /// Number of trains `m`.
    pub fn m(&self) -> usize {
        self.b.iter().filter(|&&x| x).count()
    }

    #[inline]
    pub fn b(&self, j: usize) -> u32 {
        u32::from(self.b[j])
    }

    /// `b̄_j = 1 − b_j`.
    #[inline]
    pub fn b_bar(&self, j: usize) -> u32 {
        1 - self.b(j)
    }

    /// Occupied segments in loop order.
    pub fn occupied(&self) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.b[j]).collect()
    }

    pub fn is_degenerate(&self) -> bool {
        let m = self.m();
        m == 0 || m == self.n()
    }
}

/// Evenly spread trains: `b_j = 1` at `j = floor(i·n/m)`, `i = 0..m`.
pub fn place_trains(model: &LineModel, m: usize) -> Result<TrainPlacement> {
    let n = model.n();
    if m > n {
        return Err(Error::TrainCount {
            trains: m,
            segments: n,
        });
    }
    let mut b = vec![false; n];
    for i in 0..m {
        b[i * n / m] = true;
    }
    Ok(TrainPlacement { b })
}

/// Every departure counter starts at zero.
pub fn default_initial_departures(model: &LineModel, _placement: &TrainPlacement) -> Vec<f64> {
    vec![0.0; model.n()]
}

fn check_placement(model: &LineModel, placement: &TrainPlacement) -> Result<()> {
    if placement.n() != model.n() {
        return Err(Error::DimensionMismatch {
            expected: model.n(),
            actual: placement.n(),
        });
    }
    Ok(())
}

/// `A(γ)` with `t̲_j γ^{b_j}` at `(j, j−1)` and `s̲_{j+1} γ^{b̄_{j+1}}` at `(j, j+1)`.
pub fn build_maxplus_system(
    model: &LineModel,
    placement: &TrainPlacement,
) -> Result<MaxPlusPolyMatrix> {
    check_placement(model, placement)?;
    let n = model.n();
    let mut a = MaxPlusPolyMatrix::zero(n);
    for j in 0..n {
        let (p, q) = (model.prev(j), model.next(j));
        a.add_monomial(j, p, placement.b(j), model.t_min(j))?;
        a.add_monomial(j, q, placement.b_bar(q), model.s_min[q])?;
    }
    Ok(a)
}

fn travel_piece(model: &LineModel, placement: &TrainPlacement, j: usize) -> Piece {
    Piece::shift(model.prev(j), placement.b(j), model.t_min(j))
}

fn safety_piece(model: &LineModel, placement: &TrainPlacement, j: usize) -> Piece {
    let q = model.next(j);
    Piece::shift(q, placement.b_bar(q), model.s_min[q])
}

/// Adds `coef · d_col(k − lag)` to a piece.
fn push_term(piece: &mut Piece, col: usize, lag: u32, coef: f64) {
    if coef == 0.0 {
        return;
    }
    let side = if lag == 0 {
        &mut piece.cur
    } else {
        &mut piece.prev
    };
    match side.iter_mut().find(|t| t.0 == col) {
        Some(t) => t.1 += coef,
        None => side.push((col, coef)),
    }
}

/// Max-plus dynamics as a max-affine system (two pieces per node).
pub fn build_maxplus_affine(
    model: &LineModel,
    placement: &TrainPlacement,
) -> Result<MaxAffineSystem> {
    check_placement(model, placement)?;
    let mut sys = MaxAffineSystem::new(model.n());
    for j in 0..model.n() {
        sys.add_piece(j, travel_piece(model, placement, j))?;
        sys.add_piece(j, safety_piece(model, placement, j))?;
    }
    Ok(sys)
}

/// Dwell time bounded below by `(λ_j/α_j)·g_j`. Platforms with `λ_j = 0` keep
/// the two max-plus pieces.
pub fn build_demand_coupled_system(
    model: &LineModel,
    placement: &TrainPlacement,
    demand: &Demand,
) -> Result<MaxAffineSystem> {
    check_placement(model, placement)?;
    demand.check(model)?;
    let mut sys = MaxAffineSystem::new(model.n());
    for j in 0..model.n() {
        sys.add_piece(j, travel_piece(model, placement, j))?;
        let rho = demand.ratio(j);
        if rho > 0.0 {
            let mut p = Piece {
                c: (1.0 + rho) * model.r[j],
                ..Piece::default()
            };
            push_term(&mut p, model.prev(j), placement.b(j), 1.0 + rho);
            push_term(&mut p, j, 1, -rho);
            sys.add_piece(j, p)?;
        }
        sys.add_piece(j, safety_piece(model, placement, j))?;
    }
    Ok(sys)
}

/// Dwell-time law parameters per node. Entries at non-platform nodes are unused.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlParameters {
    /// Max-plus headway `h̃` used for `w̄` and `λ̃`.
    pub h_tilde: f64,
    /// Platform-average dwell time of the max-plus run.
    pub w_star: f64,
    pub w_bar: Vec<f64>,
    pub theta: Vec<f64>,
    pub delta: Vec<f64>,
    pub lambda_tilde: Vec<f64>,
    /// Event-dependent gains `δ_j^k`; the stable builder only accepts constant gains.
    #[serde(default)]
    pub delta_by_event: Option<Vec<Vec<f64>>>,
}

impl ControlParameters {
    /// Same `δ` and `w̄` at every platform.
    pub fn uniform(model: &LineModel, demand: &Demand, delta: f64, w_bar: f64) -> Self {
        let n = model.n();
        let theta = (0..n).map(|j| delta * demand.ratio(j)).collect();
        Self {
            h_tilde: w_bar,
            w_star: f64::NAN,
            w_bar: vec![w_bar; n],
            theta,
            delta: vec![delta; n],
            lambda_tilde: vec![f64::NAN; n],
            delta_by_event: None,
        }
    }
}

/// Stabilized dwell law: the middle piece is
/// `(1−δ_j)·d_{j−1}(k−b_j) + δ_j·d_j(k−1) + (1−δ_j)·r_j + w̄_j` at platforms.
pub fn build_controlled_system(
    model: &LineModel,
    placement: &TrainPlacement,
    ctrl: &ControlParameters,
) -> Result<MaxAffineSystem> {
    check_placement(model, placement)?;
    if ctrl.delta_by_event.is_some() {
        return Err(Error::InvalidConfig(
            "event-dependent control gains are not supported".into(),
        ));
    }
    let n = model.n();
    if ctrl.delta.len() != n || ctrl.w_bar.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: ctrl.delta.len().min(ctrl.w_bar.len()),
        });
    }
    let mut sys = MaxAffineSystem::new(n);
    for j in 0..n {
        sys.add_piece(j, travel_piece(model, placement, j))?;
        if model.is_platform(j) {
            let delta = ctrl.delta[j];
            if !(0.0..=1.0).contains(&delta) {
                return Err(Error::ControlGain {
                    node: j,
                    value: delta,
                });
            }
            let mut p = Piece {
                c: (1.0 - delta) * model.r[j] + ctrl.w_bar[j],
                ..Piece::default()
            };
            push_term(&mut p, model.prev(j), placement.b(j), 1.0 - delta);
            push_term(&mut p, j, 1, delta);
            sys.add_piece(j, p)?;
        }
        sys.add_piece(j, safety_piece(model, placement, j))?;
    }
    Ok(sys)
}

/// `max{Σt̲/m, max_j(t̲_j+s̲_j), Σs̲/(n−m)}`; infinite for `m ∈ {0, n}`.
pub fn closed_form_headway(model: &LineModel, m: usize) -> f64 {
    let n = model.n();
    if m == 0 || m >= n {
        return f64::INFINITY;
    }
    (model.sum_t_min() / m as f64)
        .max(model.h_min())
        .max(model.sum_s_min() / (n - m) as f64)
}
