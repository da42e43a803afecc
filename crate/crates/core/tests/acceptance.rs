mod common;

use std::time::{Duration, Instant};

use common::{
    enumerate_max_cycle_ratio, random_lagged, random_line, random_line_with_platforms,
    random_placement, rel_err,
};
use metro_dynamics::analysis::{
    compare_instability, control_params, optimal_train_count, sweep_density, uniform_ratio_demand,
    DiagramParams, DEFAULT_SCALES,
};
use metro_dynamics::dp::{check_homogeneous_monotone, state_augment, GrowthResult, DEFAULT_SEED};
use metro_dynamics::graph::PrecedenceGraph;
use metro_dynamics::line::{
    build_controlled_system, build_demand_coupled_system, build_maxplus_affine,
    build_maxplus_system, closed_form_headway, default_initial_departures, place_trains,
    segmentize, ControlParameters, Demand, LineConfig, LineModel,
};
use metro_dynamics::sim::simulate;
use metro_dynamics::spectral::{generalized_eigenpair, max_cycle_mean};
use metro_dynamics::PARIS_LINE14;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

fn paris() -> LineModel {
    segmentize(&LineConfig::from_json_str(PARIS_LINE14).unwrap()).unwrap()
}

fn headway_at_capacity() -> Outcome {
    let t = Instant::now();
    let model = paris();
    let placement = place_trains(&model, 21).unwrap();
    let h = closed_form_headway(&model, 21);
    let mu = generalized_eigenpair(&build_maxplus_system(&model, &placement).unwrap())
        .unwrap()
        .mu;
    let sys = build_maxplus_affine(&model, &placement).unwrap();
    let sim = simulate(
        &sys,
        &model,
        &placement,
        &default_initial_departures(&model, &placement),
        5000,
    )
    .unwrap()
    .headway();
    let elapsed = t.elapsed();
    let ok = (70.0..=75.0).contains(&h)
        && rel_err(mu, h) <= 5e-3
        && rel_err(sim, h) <= 5e-3
        && elapsed < Duration::from_secs(5);
    (
        ok,
        format!("h={h:.4} s, spectral={mu:.4} s, simulated={sim:.4} s, {elapsed:.2?}"),
    )
}

fn diagram_aggregates() -> Outcome {
    let t = Instant::now();
    let p = DiagramParams::from_model(&paris());
    let (v, w, f) = (p.v * 3.6, p.w_prime * 3.6, p.f_max * 3600.0);
    let elapsed = t.elapsed();
    let ok = (40.5..=42.0).contains(&v)
        && (26.0..=27.5).contains(&w)
        && (48.0..=52.0).contains(&f)
        && (p.length - 17_294.0).abs() < 1e-9
        && elapsed < Duration::from_secs(1);
    (
        ok,
        format!(
            "v={v:.3} km/h, w'={w:.3} km/h, f_max={f:.3} /h, L={:.3} km, {elapsed:.2?}",
            p.length / 1000.0
        ),
    )
}

fn optimal_count() -> Outcome {
    let model = paris();
    let p = DiagramParams::from_model(&model);
    let m = optimal_train_count(&model);
    let edge = (p.free_flow_limit() * p.length).ceil() as usize;
    (
        m.abs_diff(21) <= 1 && m == edge,
        format!("argmin m={m}, left plateau edge={edge}"),
    )
}

fn spectral_oracle() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0004);
    let mut worst = (0.0f64, 0.0f64);
    let mut ok = true;
    for _ in 0..50 {
        let n = rng.gen_range(2..=8);
        let m = rng.gen_range(1..n);
        let model = random_line(&mut rng, n);
        let placement = random_placement(&mut rng, n, m);
        let a = build_maxplus_system(&model, &placement).unwrap();
        let g = PrecedenceGraph::from_poly_matrix(&a);
        let pi = max_cycle_mean(&g).unwrap().mu;
        let (brute, _) = enumerate_max_cycle_ratio(&g).unwrap();
        let closed = closed_form_headway(&model, m);
        let sys = build_maxplus_affine(&model, &placement).unwrap();
        let d0: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let sim = simulate(&sys, &model, &placement, &d0, 5000)
            .unwrap()
            .headway();
        worst.0 = worst.0.max(rel_err(pi, closed));
        worst.1 = worst.1.max(rel_err(sim, pi));
        ok &= pi == brute && rel_err(pi, closed) <= 1e-12 && rel_err(sim, pi) <= 1e-3;
    }
    let elapsed = t.elapsed();
    ok &= elapsed < Duration::from_secs(30);
    (
        ok,
        format!(
            "max |PI-closed|/closed={:.1e}, max sim error={:.1e}, {elapsed:.2?}",
            worst.0, worst.1
        ),
    )
}

fn unit_gain_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0005);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.gen_range(3..=12);
        let m = rng.gen_range(1..n);
        let model = random_line_with_platforms(&mut rng, n);
        let placement = place_trains(&model, m).unwrap();
        let h = closed_form_headway(&model, m);
        let mut demand = Demand::zero(n);
        for j in model.platforms() {
            demand.lambda[j] = rng.gen_range(0.0..3.0);
            demand.alpha[j] = 30.0;
        }
        let ctrl = ControlParameters::uniform(&model, &demand, 1.0, h);
        let sys = build_controlled_system(&model, &placement, &ctrl).unwrap();
        let d0: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let growth = simulate(&sys, &model, &placement, &d0, 5000)
            .unwrap()
            .headway();
        worst = worst.max(rel_err(growth, h));
    }
    (worst <= 1e-3, format!("max relative error {worst:.1e}"))
}

fn dominance_and_stability() -> Outcome {
    let model = paris();
    let n = model.n();
    let demand = model.demand().clone();
    let ms: Vec<usize> = (1..n).step_by(2).collect();
    let rows = sweep_density(&model, &demand, &ms, &DEFAULT_SCALES, 3000).unwrap();
    let dominance = rows.iter().all(|r| r.h >= r.h_tilde * (1.0 - 1e-3));
    let mut ok = dominance;
    let mut runs = Vec::new();
    for &c in &DEFAULT_SCALES {
        let block: Vec<_> = rows.iter().filter(|r| r.c == c).collect();
        if !block.iter().any(|r| r.min_delta == 1.0) {
            continue;
        }
        let mut best = 0;
        let mut cur = 0;
        for r in &block {
            cur = if rel_err(r.h, r.h_tilde) <= 5e-3 {
                cur + 1
            } else {
                0
            };
            best = best.max(cur);
        }
        ok &= best >= 2;
        runs.push(format!("c={c}:{best}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0006);
    let mut spread = 0.0f64;
    for (m, c) in [(10, 1.0), (21, 3.0), (40, 9.0), (60, 0.5)] {
        let placement = place_trains(&model, m).unwrap();
        let ctrl = control_params(&model, &placement, &demand.scaled(c)).unwrap();
        let sys = build_controlled_system(&model, &placement, &ctrl).unwrap();
        let hs: Vec<f64> = (0..2)
            .map(|_| {
                let d0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1000.0)).collect();
                simulate(&sys, &model, &placement, &d0, 5000)
                    .unwrap()
                    .headway()
            })
            .collect();
        spread = spread.max(rel_err(hs[0], hs[1]));
    }
    ok &= spread <= 1e-3;
    (
        ok,
        format!(
            "h >= h_tilde on {} cells: {dominance}; equality run lengths [{}]; initial-state spread {spread:.1e}",
            rows.len(),
            runs.join(", ")
        ),
    )
}

fn instability() -> Outcome {
    let model = paris();
    let demand = uniform_ratio_demand(&model, 0.1, 30.0).unwrap();
    let cmp = compare_instability(&model, 4, &demand, 30.0, 20, 200).unwrap();
    let (u, c) = (cmp.uncontrolled.amplification, cmp.controlled.amplification);
    (
        u > 1.0 && c <= 1.0 + 1e-9,
        format!("m=4, uncontrolled amplification {u:.3e}, controlled {c:.12}"),
    )
}

fn augmentation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0008);
    let mut worst = 0.0f64;
    let mut growth_err = 0.0f64;
    for _ in 0..30 {
        let n = rng.gen_range(2..=6);
        let depth = rng.gen_range(2..=3);
        let sys = random_lagged(&mut rng, n, depth);
        let history: Vec<Vec<f64>> = (0..depth)
            .map(|_| (0..n).map(|_| rng.gen_range(-100.0..100.0)).collect())
            .collect();
        let aug = state_augment(&sys);
        let steps = 2000;
        let direct = sys.simulate(&history, steps).unwrap();
        let it = aug
            .system
            .iterate(&aug.lift_history(&history), steps)
            .unwrap();
        for k in 0..=100 {
            for j in 0..n {
                worst = worst.max((direct[k][j] - it.trajectory[k][j]).abs());
            }
        }
        let original: Vec<Vec<f64>> = direct.iter().map(|x| x[..n].to_vec()).collect();
        let g_orig = GrowthResult::from_trajectory(&original, None).mean();
        growth_err = growth_err.max(rel_err(it.growth.mean(), g_orig));
    }
    (
        worst <= 1e-9 && growth_err <= 1e-9,
        format!("max deviation {worst:.1e}, growth mismatch {growth_err:.1e}"),
    )
}

fn identities() -> Outcome {
    let model = paris();
    let mut worst = 0.0f64;
    for m in [5, 15, 21, 35, 50, 70] {
        let placement = place_trains(&model, m).unwrap();
        let sys = build_maxplus_affine(&model, &placement).unwrap();
        let res = simulate(
            &sys,
            &model,
            &placement,
            &default_initial_departures(&model, &placement),
            5000,
        )
        .unwrap();
        worst = worst.max(res.identity_report().max_relative());
    }
    let placement = place_trains(&model, 21).unwrap();
    let open = build_demand_coupled_system(&model, &placement, model.demand()).unwrap();
    let open_report = check_homogeneous_monotone(&open, 4000, 1000.0, DEFAULT_SEED);
    let ctrl = control_params(&model, &placement, &model.demand().scaled(3.0)).unwrap();
    let closed = build_controlled_system(&model, &placement, &ctrl).unwrap();
    let closed_report = check_homogeneous_monotone(&closed, 4000, 1000.0, DEFAULT_SEED);
    let ok = worst <= 5e-3 && !open_report.is_monotone() && closed_report.passes();
    (
        ok,
        format!(
            "max identity error {worst:.1e}; uncontrolled monotone={}, controlled passes={}",
            open_report.is_monotone(),
            closed_report.passes()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("headway at capacity", headway_at_capacity),
        ("fundamental diagram aggregates", diagram_aggregates),
        ("optimal train count", optimal_count),
        ("spectral oracle equivalence", spectral_oracle),
        ("unit-gain control reduces to max-plus", unit_gain_reduction),
        (
            "controlled dominance and initial-state independence",
            dominance_and_stability,
        ),
        ("delay amplification without control", instability),
        ("state augmentation", augmentation),
        ("stationary identities and monotonicity", identities),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, detail) = run();
        println!(
            "{} {}: {name} ({detail})",
            if ok { "PASS" } else { "FAIL" },
            i + 1
        );
        failed += usize::from(!ok);
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
