//! Fundamental diagram, traffic phases, passenger stability and the
//! dwell-control parameter rule, plus the sweeps built on them.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::line::{
    build_controlled_system, build_demand_coupled_system, build_maxplus_affine,
    closed_form_headway, default_initial_departures, place_trains, ControlParameters, Demand,
    LineModel, TrainPlacement,
};
use crate::sim::{run_departures, simulate, Perturbation};

/// Events simulated for the max-plus baseline behind `w*`.
pub const BASELINE_EVENTS: usize = 5000;

/// Demand scale factors used by the sweeps.
pub const DEFAULT_SCALES: [f64; 6] = [0.5, 1.0, 2.0, 3.0, 5.0, 9.0];

const ASYMMETRIC_PROFILE: &str = include_str!("../data/asymmetric_demand.json");

/// Aggregates of the trapezoidal diagram. SI units throughout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramParams {
    pub n: usize,
    /// `L` (m).
    pub length: f64,
    /// `Σt̲ / L` (s/m).
    pub tau: f64,
    /// Free speed `1/τ` (m/s).
    pub v: f64,
    /// `Σs̲ / L` (s/m).
    pub omega: f64,
    /// Backward wave speed `1/ω` (m/s).
    pub w_prime: f64,
    pub h_min: f64,
    /// `1/h_min` (trains/s).
    pub f_max: f64,
    /// `n / L` (trains/m).
    pub rho_bar: f64,
    /// `L / n` (m).
    pub sigma_min: f64,
    /// Node averages of `w̲_j`, `r_j` and `g̲_j = r_j + s̲_j`.
    pub w_min_avg: f64,
    pub r_avg: f64,
    pub g_min_avg: f64,
}

impl DiagramParams {
    pub fn from_model(model: &LineModel) -> Self {
        let n = model.n();
        let length = model.length();
        let sum_t = model.sum_t_min();
        let sum_s = model.sum_s_min();
        let h_min = model.h_min();
        let r_avg = model.r().iter().sum::<f64>() / n as f64;
        Self {
            n,
            length,
            tau: sum_t / length,
            v: length / sum_t,
            omega: sum_s / length,
            w_prime: length / sum_s,
            h_min,
            f_max: 1.0 / h_min,
            rho_bar: n as f64 / length,
            sigma_min: length / n as f64,
            w_min_avg: model.w_min().iter().sum::<f64>() / n as f64,
            r_avg,
            g_min_avg: r_avg + sum_s / n as f64,
        }
    }

    /// Upper edge of the free-flow phase, `f_max / v`.
    pub fn free_flow_limit(&self) -> f64 {
        self.f_max / self.v
    }

    /// Lower edge of the congestion phase, `ρ̄ − f_max / w′`.
    pub fn congestion_onset(&self) -> f64 {
        self.rho_bar - self.f_max / self.w_prime
    }

    /// Whether the plateau has positive width.
    pub fn has_plateau(&self) -> bool {
        self.free_flow_limit() <= self.congestion_onset()
    }

    fn check(&self, rho: f64) -> Result<()> {
        if (0.0..=self.rho_bar).contains(&rho) {
            Ok(())
        } else {
            Err(Error::DensityOutOfRange {
                rho,
                max: self.rho_bar,
            })
        }
    }

    fn check_open(&self, rho: f64) -> Result<()> {
        if rho > 0.0 && rho < self.rho_bar {
            Ok(())
        } else {
            Err(Error::DensityOutOfRange {
                rho,
                max: self.rho_bar,
            })
        }
    }
}

/// `h(ρ) = max{τ/ρ, h_min, ω/(ρ̄ − ρ)}`; infinite at both ends.
pub fn h_of_rho(p: &DiagramParams, rho: f64) -> Result<f64> {
    p.check(rho)?;
    if rho == 0.0 || rho == p.rho_bar {
        return Ok(f64::INFINITY);
    }
    Ok((p.tau / rho).max(p.h_min).max(p.omega / (p.rho_bar - rho)))
}

/// `h(σ) = max{τσ, h_min, ω/(1/σ̲ − 1/σ)}` for `σ ≥ σ̲`.
pub fn h_of_sigma(p: &DiagramParams, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::DensityOutOfRange {
            rho: f64::INFINITY,
            max: p.rho_bar,
        });
    }
    h_of_rho(p, 1.0 / sigma)
}

/// `f(ρ) = min{vρ, f_max, w′(ρ̄ − ρ)}` (trains/s).
pub fn f_of_rho(p: &DiagramParams, rho: f64) -> Result<f64> {
    p.check(rho)?;
    Ok((p.v * rho)
        .min(p.f_max)
        .min(p.w_prime * (p.rho_bar - rho))
        .max(0.0))
}

/// Average dwell time `w(ρ)`.
pub fn w_of_rho(p: &DiagramParams, rho: f64) -> Result<f64> {
    p.check_open(rho)?;
    Ok(p.w_min_avg
        .max(p.h_min / p.rho_bar * rho - p.r_avg)
        .max(p.omega / (p.rho_bar - rho) - p.g_min_avg))
}

/// Average safe separation time `g(ρ)`.
pub fn g_of_rho(p: &DiagramParams, rho: f64) -> Result<f64> {
    p.check_open(rho)?;
    Ok((p.tau / rho - p.w_min_avg)
        .max(p.r_avg + p.h_min - p.h_min / p.rho_bar * rho)
        .max(p.g_min_avg))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    FreeFlow,
    MaxFrequency,
    Congestion,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::FreeFlow => "free_flow",
            Phase::MaxFrequency => "max_frequency",
            Phase::Congestion => "congestion",
        })
    }
}

/// Phase at density `ρ`; both boundaries belong to the plateau.
pub fn classify_phase(p: &DiagramParams, rho: f64) -> Result<Phase> {
    p.check(rho)?;
    Ok(if rho < p.free_flow_limit() {
        Phase::FreeFlow
    } else if rho > p.congestion_onset() {
        Phase::Congestion
    } else {
        Phase::MaxFrequency
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub rho: f64,
    pub sigma: f64,
    pub h: f64,
    pub f: f64,
    pub w: f64,
    pub g: f64,
    pub phase: Phase,
}

pub fn phase_point(p: &DiagramParams, rho: f64) -> Result<PhasePoint> {
    Ok(PhasePoint {
        rho,
        sigma: 1.0 / rho,
        h: h_of_rho(p, rho)?,
        f: f_of_rho(p, rho)?,
        w: w_of_rho(p, rho)?,
        g: g_of_rho(p, rho)?,
        phase: classify_phase(p, rho)?,
    })
}

/// `steps` interior densities `ρ̄·i/(steps+1)`.
pub fn phase_diagram(p: &DiagramParams, steps: usize) -> Result<Vec<PhasePoint>> {
    (1..=steps)
        .map(|i| phase_point(p, p.rho_bar * i as f64 / (steps + 1) as f64))
        .collect()
}

/// Smallest train count attaining the minimal closed-form headway.
pub fn optimal_train_count(model: &LineModel) -> usize {
    let mut best = (f64::INFINITY, 0);
    for m in 1..model.n() {
        let h = closed_form_headway(model, m);
        if h < best.0 {
            best = (h, m);
        }
    }
    best.1
}

/// Server stability `λ < α·w*/h` (strict).
pub fn passenger_stability(lambda: f64, alpha: f64, w_star: f64, h: f64) -> bool {
    lambda < alpha * w_star / h
}

/// `α·w*/h`, the largest arrival rate a platform can absorb.
pub fn demand_threshold(alpha: f64, w_star: f64, h: f64) -> f64 {
    alpha * w_star / h
}

/// Max-plus headway and platform dwell for a placement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub h_tilde: f64,
    pub w_star: f64,
}

/// Runs the max-plus line for [`BASELINE_EVENTS`] and averages platform dwell
/// over the trailing half.
pub fn maxplus_baseline(model: &LineModel, placement: &TrainPlacement) -> Result<Baseline> {
    let sys = build_maxplus_affine(model, placement)?;
    let res = simulate(
        &sys,
        model,
        placement,
        &default_initial_departures(model, placement),
        BASELINE_EVENTS,
    )?;
    Ok(Baseline {
        h_tilde: closed_form_headway(model, placement.m()),
        w_star: res.w_star(),
    })
}

/// Parameter rule `w̄_j = h̃`, `λ̃_j = α_j w*/h̃`, `δ_j = λ̃_j / max(λ_j, λ̃_j)`.
pub fn control_params_from_baseline(
    model: &LineModel,
    demand: &Demand,
    base: Baseline,
) -> ControlParameters {
    let n = model.n();
    let mut ctrl = ControlParameters {
        h_tilde: base.h_tilde,
        w_star: base.w_star,
        w_bar: vec![base.h_tilde; n],
        theta: vec![0.0; n],
        delta: vec![1.0; n],
        lambda_tilde: vec![0.0; n],
        delta_by_event: None,
    };
    for j in model.platforms() {
        let (lambda, alpha) = (demand.lambda[j], demand.alpha[j]);
        let lt = demand_threshold(alpha, base.w_star, base.h_tilde);
        ctrl.lambda_tilde[j] = lt;
        ctrl.delta[j] = if lambda <= lt { 1.0 } else { lt / lambda };
        ctrl.theta[j] = ctrl.delta[j] * demand.ratio(j);
    }
    ctrl
}

pub fn control_params(
    model: &LineModel,
    placement: &TrainPlacement,
    demand: &Demand,
) -> Result<ControlParameters> {
    if placement.is_degenerate() {
        return Err(Error::FullyImplicit {
            trains: placement.m(),
            segments: placement.n(),
        });
    }
    let base = maxplus_baseline(model, placement)?;
    Ok(control_params_from_baseline(model, demand, base))
}

/// Named arrival-rate profile over the platforms, in loop order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemandProfile {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    pub lambda: Vec<f64>,
}

impl DemandProfile {
    /// Built-in asymmetric profile (mean 1, max 3 passengers/s).
    pub fn asymmetric() -> Self {
        serde_json::from_str(ASYMMETRIC_PROFILE).expect("bundled profile parses")
    }

    pub fn symmetric(platforms: usize) -> Self {
        Self {
            name: "symmetric".into(),
            description: None,
            lambda: vec![1.0; platforms],
        }
    }

    /// `symmetric`, `asymmetric`, or `config` (the rates of the line configuration).
    pub fn by_name(name: &str, model: &LineModel) -> Result<Self> {
        let platforms = model.platforms();
        match name {
            "symmetric" => Ok(Self::symmetric(platforms.len())),
            "asymmetric" => Ok(Self::asymmetric()),
            "config" => Ok(Self {
                name: "config".into(),
                description: None,
                lambda: platforms
                    .iter()
                    .map(|&j| model.demand().lambda[j])
                    .collect(),
            }),
            other => Err(Error::UnknownProfile(other.to_string())),
        }
    }

    /// Per-node demand with upload rates taken from `model`'s configuration,
    /// or `default_alpha` where none is configured.
    pub fn to_demand(&self, model: &LineModel, default_alpha: f64) -> Result<Demand> {
        let alpha: Vec<f64> = model
            .platforms()
            .iter()
            .map(|&j| {
                if model.demand().alpha[j] > 0.0 {
                    model.demand().alpha[j]
                } else {
                    default_alpha
                }
            })
            .collect();
        Demand::from_platform_rates(model, &self.lambda, &alpha)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemandSweepRow {
    pub m: usize,
    /// Density `m / L` (trains/m).
    pub rho: f64,
    pub c: f64,
    pub h: f64,
    /// Frequency `1/h` (trains/s).
    pub f: f64,
    /// Max-plus headway at the same `m`.
    pub h_tilde: f64,
    /// Smallest platform gain.
    pub min_delta: f64,
}

/// Controlled headway for each `(m, c)`, with `λ = c·demand.λ`. Rows are ordered
/// by `m` then by `c`; `m ∈ {0, n}` yields infinite-headway rows.
pub fn sweep_density(
    model: &LineModel,
    demand: &Demand,
    m_values: &[usize],
    scales: &[f64],
    steps: usize,
) -> Result<Vec<DemandSweepRow>> {
    let length = model.length();
    let blocks: Vec<Result<Vec<DemandSweepRow>>> = m_values
        .par_iter()
        .map(|&m| {
            let placement = place_trains(model, m)?;
            let rho = m as f64 / length;
            if placement.is_degenerate() {
                return Ok(scales
                    .iter()
                    .map(|&c| DemandSweepRow {
                        m,
                        rho,
                        c,
                        h: f64::INFINITY,
                        f: 0.0,
                        h_tilde: f64::INFINITY,
                        min_delta: f64::NAN,
                    })
                    .collect());
            }
            let base = maxplus_baseline(model, &placement)?;
            let d0 = default_initial_departures(model, &placement);
            scales
                .iter()
                .map(|&c| {
                    let ctrl = control_params_from_baseline(model, &demand.scaled(c), base);
                    let sys = build_controlled_system(model, &placement, &ctrl)?;
                    let res = simulate(&sys, model, &placement, &d0, steps)?;
                    let h = res.headway();
                    let min_delta = model
                        .platforms()
                        .iter()
                        .map(|&j| ctrl.delta[j])
                        .fold(f64::INFINITY, f64::min);
                    Ok(DemandSweepRow {
                        m,
                        rho,
                        c,
                        h,
                        f: 1.0 / h,
                        h_tilde: base.h_tilde,
                        min_delta,
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for b in blocks {
        rows.extend(b?);
    }
    Ok(rows)
}

/// Delay injection experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstabilityScenario {
    pub node: usize,
    pub event: usize,
    pub delay: f64,
    /// Events observed after the injection.
    pub horizon: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstabilityReport {
    pub scenario: InstabilityScenario,
    /// `max_j |a'_j^k − a_j^k|` for `k = event..=event+horizon`.
    pub deviations: Vec<f64>,
    /// Largest deviation divided by the injected delay.
    pub amplification: f64,
}

/// Compares arrivals with and without a one-off delay under the dynamics `sys`.
pub fn instability_metric(
    sys: &crate::dp::MaxAffineSystem,
    model: &LineModel,
    placement: &TrainPlacement,
    scenario: InstabilityScenario,
) -> Result<InstabilityReport> {
    if scenario.node >= model.n() {
        return Err(Error::IndexOutOfRange {
            index: scenario.node,
            dim: model.n(),
        });
    }
    if !(scenario.delay > 0.0) || scenario.event == 0 {
        return Err(Error::InvalidConfig(
            "delay must be positive and injected at an event ≥ 1".into(),
        ));
    }
    let steps = scenario.event + scenario.horizon;
    let d0 = default_initial_departures(model, placement);
    let base = run_departures(sys, placement, &d0, steps, None)?;
    let pert = Perturbation {
        node: scenario.node,
        event: scenario.event,
        delay: scenario.delay,
    };
    let moved = run_departures(sys, placement, &d0, steps, Some(pert))?;
    let n = model.n();
    let deviations: Vec<f64> = (scenario.event..=steps)
        .map(|k| {
            (0..n)
                .map(|j| {
                    let src = k - placement.b(j) as usize;
                    let p = model.prev(j);
                    (moved[src][p] - base[src][p]).abs()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let amplification = deviations.iter().copied().fold(0.0, f64::max) / scenario.delay;
    Ok(InstabilityReport {
        scenario,
        deviations,
        amplification,
    })
}

/// Demand with `λ_j = ratio·α_j` at every platform, `α` from the configuration
/// (or `default_alpha`).
pub fn uniform_ratio_demand(model: &LineModel, ratio: f64, default_alpha: f64) -> Result<Demand> {
    let alpha: Vec<f64> = model
        .platforms()
        .iter()
        .map(|&j| {
            if model.demand().alpha[j] > 0.0 {
                model.demand().alpha[j]
            } else {
                default_alpha
            }
        })
        .collect();
    let lambda: Vec<f64> = alpha.iter().map(|a| a * ratio).collect();
    Demand::from_platform_rates(model, &lambda, &alpha)
}

/// Uncontrolled and controlled responses to the same delay at the first loaded platform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstabilityComparison {
    pub uncontrolled: InstabilityReport,
    pub controlled: InstabilityReport,
}

pub fn compare_instability(
    model: &LineModel,
    m: usize,
    demand: &Demand,
    delay: f64,
    event: usize,
    horizon: usize,
) -> Result<InstabilityComparison> {
    let placement = place_trains(model, m)?;
    if placement.is_degenerate() {
        return Err(Error::FullyImplicit {
            trains: m,
            segments: model.n(),
        });
    }
    let node = model
        .platforms()
        .into_iter()
        .find(|&j| demand.lambda[j] > 0.0)
        .or_else(|| model.platforms().first().copied())
        .unwrap_or(0);
    let scenario = InstabilityScenario {
        node,
        event,
        delay,
        horizon,
    };
    let open = build_demand_coupled_system(model, &placement, demand)?;
    let ctrl = control_params(model, &placement, demand)?;
    let closed = build_controlled_system(model, &placement, &ctrl)?;
    Ok(InstabilityComparison {
        uncontrolled: instability_metric(&open, model, &placement, scenario)?,
        controlled: instability_metric(&closed, model, &placement, scenario)?,
    })
}

const PER_KM: f64 = 1000.0;
const PER_HOUR: f64 = 3600.0;

fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x}")
    }
}

/// `phase_diagram.csv`: a units comment line, then `rho,sigma,h,f,w,g,phase`.
pub fn write_phase_diagram_csv<W: Write>(points: &[PhasePoint], mut out: W) -> Result<()> {
    writeln!(
        out,
        "# units: rho trains/km, sigma m, h s, f trains/h, w s, g s"
    )?;
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["rho", "sigma", "h", "f", "w", "g", "phase"])?;
    for p in points {
        wtr.write_record([
            num(p.rho * PER_KM),
            num(p.sigma),
            num(p.h),
            num(p.f * PER_HOUR),
            num(p.w),
            num(p.g),
            p.phase.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `demand_sweep.csv`: a units comment line, then `profile,m,rho,c,h,f,h_tilde`.
pub fn write_demand_sweep_csv<W: Write>(
    profile: &str,
    rows: &[DemandSweepRow],
    mut out: W,
) -> Result<()> {
    writeln!(
        out,
        "# units: m trains, rho trains/km, c dimensionless, h s, f trains/h, h_tilde s"
    )?;
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["profile", "m", "rho", "c", "h", "f", "h_tilde"])?;
    for r in rows {
        wtr.write_record([
            profile.to_string(),
            r.m.to_string(),
            num(r.rho * PER_KM),
            num(r.c),
            num(r.h),
            num(r.f * PER_HOUR),
            num(r.h_tilde),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `instability.csv`: a units comment line, then `event` and one deviation column per report.
pub fn write_instability_csv<W: Write>(
    reports: &[(&str, &InstabilityReport)],
    mut out: W,
) -> Result<()> {
    writeln!(out, "# units: event index, deviations s")?;
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = vec!["event".to_string()];
    header.extend(reports.iter().map(|(name, _)| name.to_string()));
    wtr.write_record(&header)?;
    let rows = reports
        .iter()
        .map(|(_, r)| r.deviations.len())
        .max()
        .unwrap_or(0);
    let first = reports.first().map_or(0, |(_, r)| r.scenario.event);
    for i in 0..rows {
        let mut rec = vec![(first + i).to_string()];
        rec.extend(
            reports
                .iter()
                .map(|(_, r)| r.deviations.get(i).map_or(String::new(), |&d| num(d))),
        );
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_line() -> LineModel {
        let n = 4;
        let platform = vec![true; n];
        LineModel::from_parts(
            vec![20.0; n],
            vec![20.0; n],
            vec![30.0; n],
            platform,
            vec![200.0; n],
        )
        .unwrap()
    }

    #[test]
    fn toy_aggregates() {
        let p = DiagramParams::from_model(&uniform_line());
        assert!((p.tau - 0.2).abs() < 1e-15);
        assert!((p.omega - 0.15).abs() < 1e-15);
        assert_eq!(p.h_min, 70.0);
        assert!((p.rho_bar - 0.005).abs() < 1e-15);
    }

    #[test]
    fn endpoints_of_the_trapezoid() {
        let p = DiagramParams::from_model(&uniform_line());
        assert_eq!(f_of_rho(&p, 0.0).unwrap(), 0.0);
        assert_eq!(f_of_rho(&p, p.rho_bar).unwrap(), 0.0);
        assert_eq!(h_of_rho(&p, 0.0).unwrap(), f64::INFINITY);
        assert!(h_of_rho(&p, -1e-6).is_err());
        assert!(w_of_rho(&p, 0.0).is_err());
        assert_eq!(classify_phase(&p, 0.0).unwrap(), Phase::FreeFlow);
        assert_eq!(
            classify_phase(&p, 0.99 * p.rho_bar).unwrap(),
            Phase::Congestion
        );
    }

    #[test]
    fn stability_threshold_is_strict() {
        assert!(passenger_stability(0.0, 30.0, 20.0, 72.0));
        let lt = demand_threshold(30.0, 20.0, 72.0);
        assert!((lt - 8.3333).abs() < 1e-4);
        assert!(!passenger_stability(lt, 30.0, 20.0, 72.0));
    }

    #[test]
    fn gain_rule() {
        let model = uniform_line();
        let mut d = Demand::zero(4);
        for j in 0..4 {
            d.alpha[j] = 30.0;
        }
        let base = Baseline {
            h_tilde: 80.0,
            w_star: 20.0,
        };
        let lt = 30.0 * 20.0 / 80.0;
        d.lambda[2] = 2.0 * lt;
        d.lambda[1] = 0.5 * lt;
        let ctrl = control_params_from_baseline(&model, &d, base);
        assert_eq!(ctrl.delta[2], 0.5);
        assert_eq!(ctrl.delta[1], 1.0);
        assert_eq!(ctrl.delta[0], 1.0);
        assert!(ctrl.w_bar.iter().all(|&w| w == 80.0));
    }

    #[test]
    fn asymmetric_profile_shape() {
        let p = DemandProfile::asymmetric();
        assert_eq!(p.lambda.len(), 18);
        let mean = p.lambda.iter().sum::<f64>() / 18.0;
        assert!((mean - 1.0).abs() < 1e-12);
        assert_eq!(p.lambda.iter().copied().fold(0.0, f64::max), 3.0);
    }

    #[test]
    fn unknown_profile() {
        assert_eq!(
            DemandProfile::by_name("weekend", &uniform_line()),
            Err(Error::UnknownProfile("weekend".into()))
        );
    }

    #[test]
    fn phase_csv_layout() {
        let p = DiagramParams::from_model(&uniform_line());
        let pts = phase_diagram(&p, 3).unwrap();
        assert_eq!(pts.len(), 3);
        let mut buf = Vec::new();
        write_phase_diagram_csv(&pts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# units"));
        assert_eq!(lines[1], "rho,sigma,h,f,w,g,phase");
        assert_eq!(lines.len(), 5);
    }
}
