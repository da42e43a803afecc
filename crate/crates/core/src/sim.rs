//! Departure-time simulation and the derived traffic series.

use std::io::Write;

use crate::dp::{GrowthResult, MaxAffineSystem};
use crate::error::{Error, Result};
use crate::line::{LineModel, TrainPlacement};

/// One-off additive delay on `d_node(event)`, applied as soon as it is computed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Perturbation {
    pub node: usize,
    pub event: usize,
    pub delay: f64,
}

/// Update order for the line dynamics; a cyclic order means `m ∈ {0, n}`.
pub fn line_update_order(sys: &MaxAffineSystem, placement: &TrainPlacement) -> Result<Vec<usize>> {
    sys.explicit_order().map_err(|e| match e {
        Error::ImplicitCycle { .. } => Error::FullyImplicit {
            trains: placement.m(),
            segments: placement.n(),
        },
        other => other,
    })
}

/// Runs `steps` events from `d0`, optionally with a delay injection.
pub fn run_departures(
    sys: &MaxAffineSystem,
    placement: &TrainPlacement,
    d0: &[f64],
    steps: usize,
    perturbation: Option<Perturbation>,
) -> Result<Vec<Vec<f64>>> {
    if d0.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            actual: d0.len(),
        });
    }
    let order = line_update_order(sys, placement)?;
    let mut d = Vec::with_capacity(steps + 1);
    d.push(d0.to_vec());
    for k in 1..=steps {
        let prev = &d[k - 1];
        let mut cur = vec![f64::NEG_INFINITY; sys.dim()];
        for &j in &order {
            let mut v = sys.evaluate_row(j, prev, &cur);
            if let Some(p) = perturbation {
                if p.event == k && p.node == j {
                    v += p.delay;
                }
            }
            cur[j] = v;
        }
        d.push(cur);
    }
    Ok(d)
}

/// Simulated trajectory with per-event series for `k = 1..=K`.
#[derive(Clone, Debug)]
pub struct SimulationResult {
    /// `d[k][j]`, `k = 0..=K`.
    pub departures: Vec<Vec<f64>>,
    /// `series[k−1][j]` for `k = 1..=K`.
    pub arrivals: Vec<Vec<f64>>,
    pub dwell: Vec<Vec<f64>>,
    pub separation: Vec<Vec<f64>>,
    pub headway_series: Vec<Vec<f64>>,
    pub growth: GrowthResult,
    r: Vec<f64>,
    is_platform: Vec<bool>,
    trains: usize,
}

impl SimulationResult {
    fn from_departures(
        d: Vec<Vec<f64>>,
        model: &LineModel,
        placement: &TrainPlacement,
        sys: &MaxAffineSystem,
    ) -> Self {
        let n = model.n();
        let steps = d.len() - 1;
        let mut arrivals = Vec::with_capacity(steps);
        let mut dwell = Vec::with_capacity(steps);
        let mut separation = Vec::with_capacity(steps);
        let mut headway = Vec::with_capacity(steps);
        for k in 1..=steps {
            let (mut a, mut w, mut g, mut h) =
                (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
            for j in 0..n {
                let src = d[k - placement.b(j) as usize][model.prev(j)];
                a[j] = src + model.r()[j];
                w[j] = d[k][j] - a[j];
                g[j] = a[j] - d[k - 1][j];
                h[j] = d[k][j] - d[k - 1][j];
            }
            arrivals.push(a);
            dwell.push(w);
            separation.push(g);
            headway.push(h);
        }
        let growth = GrowthResult::from_trajectory(&d, Some(sys));
        Self {
            departures: d,
            arrivals,
            dwell,
            separation,
            headway_series: headway,
            growth,
            r: model.r().to_vec(),
            is_platform: model.platform_flags().to_vec(),
            trains: placement.m(),
        }
    }

    pub fn steps(&self) -> usize {
        self.departures.len() - 1
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn trains(&self) -> usize {
        self.trains
    }

    /// Asymptotic headway: mean of the per-node growth estimates.
    pub fn headway(&self) -> f64 {
        self.growth.mu.unwrap_or_else(|| self.growth.mean())
    }

    /// `s_j^k = g_j^k − r_j`.
    pub fn s_time(&self, k: usize, j: usize) -> f64 {
        self.separation[k - 1][j] - self.r[j]
    }

    /// `t_j^k = r_j + w_j^k`.
    pub fn t_time(&self, k: usize, j: usize) -> f64 {
        self.r[j] + self.dwell[k - 1][j]
    }

    /// First event of the stationary tail (trailing half).
    pub fn tail_start(&self) -> usize {
        self.steps() / 2 + 1
    }

    fn tail_mean(&self, nodes: impl Fn(usize) -> bool, value: impl Fn(usize, usize) -> f64) -> f64 {
        let (mut sum, mut count) = (0.0, 0usize);
        for k in self.tail_start()..=self.steps() {
            for j in (0..self.n()).filter(|&j| nodes(j)) {
                sum += value(k, j);
                count += 1;
            }
        }
        sum / count as f64
    }

    /// Tail averages over all nodes.
    pub fn node_averages(&self) -> Averages {
        self.averages(|_| true)
    }

    /// Tail averages over platform nodes only (`w*`, `g*`, ...).
    pub fn platform_averages(&self) -> Averages {
        self.averages(|j| self.is_platform[j])
    }

    fn averages(&self, nodes: impl Fn(usize) -> bool + Copy) -> Averages {
        Averages {
            h: self.tail_mean(nodes, |k, j| self.headway_series[k - 1][j]),
            w: self.tail_mean(nodes, |k, j| self.dwell[k - 1][j]),
            g: self.tail_mean(nodes, |k, j| self.separation[k - 1][j]),
            t: self.tail_mean(nodes, |k, j| self.t_time(k, j)),
            s: self.tail_mean(nodes, |k, j| self.s_time(k, j)),
        }
    }

    /// `w*`: platform dwell averaged over the tail.
    pub fn w_star(&self) -> f64 {
        self.platform_averages().w
    }

    /// Relative deviations of the averaged traffic identities on the tail.
    pub fn identity_report(&self) -> IdentityReport {
        let avg = self.node_averages();
        let (n, m) = (self.n() as f64, self.trains as f64);
        let rel = |x: f64| (x - avg.h).abs() / avg.h.abs();
        IdentityReport {
            h_eq_g_plus_w: rel(avg.g + avg.w),
            h_eq_t_plus_s: rel(avg.t + avg.s),
            h_eq_nt_over_m: rel(n / m * avg.t),
            h_eq_ns_over_free: rel(n / (n - m) * avg.s),
            max_event_residual: self.max_event_residual(),
        }
    }

    /// `max |h_j^k − g_j^k − w_j^k|` over every event.
    pub fn max_event_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.steps() {
            for j in 0..self.n() {
                worst = worst.max(
                    (self.headway_series[k][j] - self.separation[k][j] - self.dwell[k][j]).abs(),
                );
            }
        }
        worst
    }

    /// Long-format CSV with columns `k,j,d,a,w,g,h`, one row per event and node.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["k", "j", "d", "a", "w", "g", "h"])?;
        for k in 1..=self.steps() {
            for j in 0..self.n() {
                wtr.write_record([
                    k.to_string(),
                    j.to_string(),
                    self.departures[k][j].to_string(),
                    self.arrivals[k - 1][j].to_string(),
                    self.dwell[k - 1][j].to_string(),
                    self.separation[k - 1][j].to_string(),
                    self.headway_series[k - 1][j].to_string(),
                ])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Tail averages of the traffic series (seconds).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Averages {
    pub h: f64,
    pub w: f64,
    pub g: f64,
    pub t: f64,
    pub s: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityReport {
    pub h_eq_g_plus_w: f64,
    pub h_eq_t_plus_s: f64,
    pub h_eq_nt_over_m: f64,
    pub h_eq_ns_over_free: f64,
    pub max_event_residual: f64,
}

impl IdentityReport {
    pub fn max_relative(&self) -> f64 {
        self.h_eq_g_plus_w
            .max(self.h_eq_t_plus_s)
            .max(self.h_eq_nt_over_m)
            .max(self.h_eq_ns_over_free)
    }
}

/// Simulates `steps` events of a line system from `d0`.
pub fn simulate(
    sys: &MaxAffineSystem,
    model: &LineModel,
    placement: &TrainPlacement,
    d0: &[f64],
    steps: usize,
) -> Result<SimulationResult> {
    simulate_perturbed(sys, model, placement, d0, steps, None)
}

pub fn simulate_perturbed(
    sys: &MaxAffineSystem,
    model: &LineModel,
    placement: &TrainPlacement,
    d0: &[f64],
    steps: usize,
    perturbation: Option<Perturbation>,
) -> Result<SimulationResult> {
    if sys.dim() != model.n() {
        return Err(Error::DimensionMismatch {
            expected: model.n(),
            actual: sys.dim(),
        });
    }
    if steps == 0 {
        return Err(Error::InvalidConfig(
            "at least one event is required".into(),
        ));
    }
    let d = run_departures(sys, placement, d0, steps, perturbation)?;
    Ok(SimulationResult::from_departures(d, model, placement, sys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line::{
        build_maxplus_affine, closed_form_headway, default_initial_departures, place_trains,
    };

    fn toy() -> LineModel {
        let n = 8;
        let platform: Vec<bool> = (0..n).map(|j| j % 2 == 0).collect();
        let w = platform
            .iter()
            .map(|&p| if p { 20.0 } else { 0.0 })
            .collect();
        let r = (0..n).map(|j| 15.0 + j as f64).collect();
        LineModel::from_parts(r, w, vec![30.0; n], platform, vec![200.0; n]).unwrap()
    }

    #[test]
    fn fully_implicit_is_reported() {
        let m = toy();
        for trains in [0, 8] {
            let p = place_trains(&m, trains).unwrap();
            let sys = build_maxplus_affine(&m, &p).unwrap();
            let err = simulate(&sys, &m, &p, &[0.0; 8], 10).unwrap_err();
            assert_eq!(
                err,
                Error::FullyImplicit {
                    trains,
                    segments: 8
                }
            );
        }
    }

    #[test]
    fn headway_matches_closed_form() {
        let m = toy();
        for trains in 1..8 {
            let p = place_trains(&m, trains).unwrap();
            let sys = build_maxplus_affine(&m, &p).unwrap();
            let res = simulate(&sys, &m, &p, &default_initial_departures(&m, &p), 3000).unwrap();
            let h = closed_form_headway(&m, trains);
            assert!(
                (res.headway() - h).abs() / h < 1e-3,
                "m={trains}: {} vs {h}",
                res.headway()
            );
            assert!(res.max_event_residual() < 1e-9);
        }
    }

    #[test]
    fn perturbation_is_applied_once() {
        let m = toy();
        let p = place_trains(&m, 3).unwrap();
        let sys = build_maxplus_affine(&m, &p).unwrap();
        let d0 = vec![0.0; 8];
        let base = run_departures(&sys, &p, &d0, 20, None).unwrap();
        let pert = run_departures(
            &sys,
            &p,
            &d0,
            20,
            Some(Perturbation {
                node: 2,
                event: 5,
                delay: 10.0,
            }),
        )
        .unwrap();
        assert_eq!(base[4], pert[4]);
        assert!(pert[5][2] >= base[5][2] + 10.0 - 1e-12);
        for k in 0..=20 {
            for j in 0..8 {
                assert!(pert[k][j] - base[k][j] <= 10.0 + 1e-9);
            }
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let m = toy();
        let p = place_trains(&m, 2).unwrap();
        let sys = build_maxplus_affine(&m, &p).unwrap();
        let res = simulate(&sys, &m, &p, &[0.0; 8], 3).unwrap();
        let mut buf = Vec::new();
        res.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,j,d,a,w,g,h");
        assert_eq!(lines.len(), 1 + 3 * 8);
    }
}
