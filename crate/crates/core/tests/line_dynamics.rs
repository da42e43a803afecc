mod common;

use common::{random_line, random_line_with_platforms, random_placement, rel_err};
use metro_dynamics::analysis::{compare_instability, control_params, uniform_ratio_demand};
use metro_dynamics::line::{
    build_controlled_system, build_demand_coupled_system, build_maxplus_affine,
    closed_form_headway, default_initial_departures, place_trains, segmentize, ControlParameters,
    Demand, LineConfig, LineModel,
};
use metro_dynamics::sim::simulate;
use metro_dynamics::{Error, PARIS_LINE14};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn paris() -> LineModel {
    segmentize(&LineConfig::from_json_str(PARIS_LINE14).unwrap()).unwrap()
}

#[test]
fn paris_line_geometry() {
    let m = paris();
    assert_eq!(m.n(), 78);
    assert!((m.length() - 17_294.0).abs() < 1e-9);
    assert_eq!(m.platforms().len(), 18);
    for j in 0..m.n() {
        if !m.is_platform(j) {
            assert_eq!(m.w_min()[j], 0.0);
        }
        assert!(m.segment_lengths()[j] > 90.0);
    }
    assert_eq!(m.label(0), Some("Saint-Lazare A"));
    assert!(m.platforms().iter().all(|&j| m.label(j).is_some()));
}

#[test]
fn simulated_headway_matches_closed_form_on_random_lines() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..50 {
        let n = rng.gen_range(2..=12);
        let m = rng.gen_range(1..n);
        let model = random_line(&mut rng, n);
        let placement = random_placement(&mut rng, n, m);
        let sys = build_maxplus_affine(&model, &placement).unwrap();
        let d0: Vec<f64> = (0..n).map(|_| rng.gen_range(-300.0..300.0)).collect();
        let res = simulate(&sys, &model, &placement, &d0, 5000).unwrap();
        let h = closed_form_headway(&model, m);
        assert!(rel_err(res.headway(), h) < 1e-3, "{} vs {h}", res.headway());
    }
}

#[test]
fn headway_does_not_depend_on_initial_departures() {
    let model = paris();
    let placement = place_trains(&model, 30).unwrap();
    let sys = build_maxplus_affine(&model, &placement).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let d1: Vec<f64> = (0..model.n()).map(|_| rng.gen_range(0.0..600.0)).collect();
    let a = simulate(
        &sys,
        &model,
        &placement,
        &default_initial_departures(&model, &placement),
        5000,
    )
    .unwrap();
    let b = simulate(&sys, &model, &placement, &d1, 5000).unwrap();
    assert!(rel_err(a.headway(), b.headway()) < 1e-3);
}

#[test]
fn identities_hold_on_stationary_tails() {
    let model = paris();
    for m in [10, 21, 40, 60] {
        let placement = place_trains(&model, m).unwrap();
        let sys = build_maxplus_affine(&model, &placement).unwrap();
        let res = simulate(
            &sys,
            &model,
            &placement,
            &default_initial_departures(&model, &placement),
            4000,
        )
        .unwrap();
        let rep = res.identity_report();
        assert!(rep.max_relative() < 5e-3, "m={m}: {rep:?}");
        assert!(rep.max_event_residual < 1e-9);
    }
}

#[test]
fn controlled_rows_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..30 {
        let n = rng.gen_range(3..=12);
        let model = random_line_with_platforms(&mut rng, n);
        let m = rng.gen_range(1..n);
        let placement = random_placement(&mut rng, n, m);
        let mut ctrl = ControlParameters::uniform(&model, &Demand::zero(n), 1.0, 100.0);
        ctrl.delta
            .iter_mut()
            .for_each(|d| *d = rng.gen_range(0.0..=1.0));
        let sys = build_controlled_system(&model, &placement, &ctrl).unwrap();
        for row in sys.rows() {
            for p in row {
                let s: f64 = p.prev.iter().chain(&p.cur).map(|t| t.1).sum();
                assert!((s - 1.0).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn controlled_headway_dominates_maxplus() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..15 {
        let n = rng.gen_range(4..=12);
        let model = random_line_with_platforms(&mut rng, n);
        let m = rng.gen_range(1..n);
        let placement = place_trains(&model, m).unwrap();
        let h_tilde = closed_form_headway(&model, m);
        let mut prev_h = 0.0;
        for c in [0.0, 0.5, 2.0, 10.0] {
            let mut demand = Demand::zero(n);
            for j in model.platforms() {
                demand.lambda[j] = c;
                demand.alpha[j] = 30.0;
            }
            let ctrl = control_params(&model, &placement, &demand).unwrap();
            let sys = build_controlled_system(&model, &placement, &ctrl).unwrap();
            let h = simulate(&sys, &model, &placement, &vec![0.0; n], 5000)
                .unwrap()
                .headway();
            assert!(h >= h_tilde * (1.0 - 1e-3), "c={c}: {h} < {h_tilde}");
            assert!(h >= prev_h * (1.0 - 1e-3));
            prev_h = h;
        }
    }
}

#[test]
fn delays_are_amplified_without_control() {
    let model = paris();
    for ratio in [0.05, 0.1, 0.2] {
        let demand = uniform_ratio_demand(&model, ratio, 30.0).unwrap();
        let cmp = compare_instability(&model, 4, &demand, 30.0, 20, 200).unwrap();
        assert!(cmp.uncontrolled.amplification > 1.0, "ratio {ratio}");
        assert!(cmp.controlled.amplification <= 1.0 + 1e-9, "ratio {ratio}");
    }
}

#[test]
fn demand_free_coupled_system_matches_maxplus_trajectory() {
    let model = paris();
    let placement = place_trains(&model, 25).unwrap();
    let a = build_demand_coupled_system(&model, &placement, &Demand::zero(model.n())).unwrap();
    let b = build_maxplus_affine(&model, &placement).unwrap();
    let d0 = vec![0.0; model.n()];
    let ra = simulate(&a, &model, &placement, &d0, 500).unwrap();
    let rb = simulate(&b, &model, &placement, &d0, 500).unwrap();
    assert_eq!(ra.departures, rb.departures);
}

#[test]
fn config_file_round_trip_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("line.json");
    let cfg = LineConfig::from_json_str(PARIS_LINE14).unwrap();
    std::fs::write(&path, cfg.to_json_pretty()).unwrap();
    let back = LineConfig::from_path(&path).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(segmentize(&back).unwrap().r(), paris().r());

    assert!(matches!(
        LineConfig::from_path(dir.path().join("nope.json")),
        Err(Error::Io(_))
    ));
    assert!(matches!(
        LineConfig::from_json_str("{"),
        Err(Error::Json(_))
    ));
    let mut v: serde_json::Value = serde_json::from_str(PARIS_LINE14).unwrap();
    v["schema_version"] = 2.into();
    assert!(matches!(
        LineConfig::from_json_str(&v.to_string()),
        Err(Error::InvalidConfig(_))
    ));
    v["schema_version"] = 1.into();
    v["s_min"] = (-1.0).into();
    assert!(matches!(
        LineConfig::from_json_str(&v.to_string()),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn simulation_csv_export() {
    let model = paris();
    let placement = place_trains(&model, 21).unwrap();
    let sys = build_maxplus_affine(&model, &placement).unwrap();
    let res = simulate(&sys, &model, &placement, &vec![0.0; model.n()], 10).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.csv");
    res.write_csv(std::fs::File::create(&path).unwrap())
        .unwrap();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(&path)
        .unwrap();
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["k", "j", "d", "a", "w", "g", "h"]
    );
    assert!(rdr.records().count() >= 10 * model.n());
}
