mod common;

use std::f64::consts::PI;

use niph::fit::{
    angular_error, expected_peak, fit_parameters, FitConfig, HomologyDim, PeakObservation,
};
use niph::geometry::rotate_cloud;
use niph::io::report_json;
use niph::network::{parse_geojson, sample_network, LineNetwork};
use niph::persistence::Weighting;
use niph::pipeline::{run_niph, NiphConfig, ProbePlan};
use niph::synth::{gen_grid, GridSpec};
use proptest::prelude::*;

fn noisy_grid(seed: u64) -> niph::PointCloud {
    gen_grid(&GridSpec {
        noise_bound: 0.05,
        seed,
        ..GridSpec::clean(7, 5, 1.0, 2.0, 0.4)
    })
    .unwrap()
}

#[test]
fn report_json_is_deterministic_across_thread_counts() {
    let cloud = noisy_grid(3);
    let plan = ProbePlan::even(6, vec![1.5, 1.8], HomologyDim::Zero, Weighting::Unit).unwrap();
    let json = |threads| {
        let cfg = NiphConfig {
            threads: Some(threads),
            ..NiphConfig::default()
        };
        report_json(&run_niph(&cloud, &plan, &cfg).unwrap()).unwrap()
    };
    let first = json(1);
    assert_eq!(first, json(1));
    assert_eq!(first, json(4));
    let value: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(value["probes"].as_array().unwrap().len(), 12);
    assert!(value["fit"]["phi"].is_number());
}

#[test]
fn rotation_moves_peaks_by_less_than_a_grid_step() {
    let cloud = noisy_grid(4);
    let plan = ProbePlan::even(8, vec![1.7], HomologyDim::Zero, Weighting::Unit).unwrap();
    let cfg = NiphConfig::default();
    let base = run_niph(&cloud, &plan, &cfg).unwrap();
    let theta = 0.83;
    let turned = run_niph(
        &rotate_cloud(&cloud, theta).unwrap(),
        &plan.rotated(theta),
        &cfg,
    )
    .unwrap();
    for (a, b) in base.diagrams.iter().zip(&turned.diagrams) {
        let step = a.density.as_ref().map_or(0.0, |d| d.step());
        assert!(
            (a.peak - b.peak).abs() <= step + 1e-12,
            "{} vs {}",
            a.peak,
            b.peak
        );
    }
    let (f0, f1) = (base.fit.unwrap(), turned.fit.unwrap());
    assert!(angular_error(f1.phi, f0.phi + theta) < 0.1);
}

#[test]
fn default_plans() {
    let road = ProbePlan::road_default(HomologyDim::Zero);
    assert_eq!(road.directions.len(), 15);
    assert_eq!(road.factors.len(), 9);
    assert_eq!(road.factors[0], 1.2);
    assert_eq!(*road.factors.last().unwrap(), 2.5);
    let synth = ProbePlan::synthetic_default(HomologyDim::One);
    assert_eq!(synth.directions.len(), 8);
    assert_eq!(synth.factors, vec![2.0]);
    for w in synth.directions.windows(2) {
        assert!((w[1] - w[0] - PI / 8.0).abs() < 1e-12);
    }
}

#[test]
fn fixtures_parse_and_sample() {
    let grid = parse_geojson(include_str!("fixtures/grid_city.geojson")).unwrap();
    assert!(grid.projection.is_some());
    let residential = vec!["residential".to_string()];
    let a = sample_network(&grid, &residential, 500, 9).unwrap();
    let b = sample_network(&grid, &residential, 500, 9).unwrap();
    assert_eq!(a.coords(), b.coords());
    assert_ne!(
        a.coords(),
        sample_network(&grid, &residential, 500, 10)
            .unwrap()
            .coords()
    );
}

proptest! {
    // each case runs two full fits
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn fit_follows_rotated_directions(phi in 0.0..PI, s in 1.1..1.8f64, theta in 0.0..PI) {
        let cfg = FitConfig::default();
        let obs = |shift: f64| -> Vec<PeakObservation> {
            (0..8)
                .map(|k| {
                    let psi = PI * k as f64 / 8.0 + shift;
                    let peak = expected_peak(HomologyDim::Zero, psi, 2.0, phi + shift, 0.01, s).unwrap();
                    PeakObservation::new(psi, 2.0, peak, HomologyDim::Zero).unwrap()
                })
                .collect()
        };
        let a = fit_parameters(&obs(0.0), &cfg).unwrap();
        let b = fit_parameters(&obs(theta), &cfg).unwrap();
        prop_assert!(angular_error(b.phi, a.phi + theta) < 0.06, "{} {} {}", a.phi, b.phi, theta);
        prop_assert!((a.s - b.s).abs() < 1e-2 && (a.var - b.var).abs() < 1e-3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sampling_follows_length(l1 in 0.5..5.0f64, l2 in 0.5..5.0f64, seed in 0u64..1000) {
        let net = LineNetwork::new(
            vec![vec![[0.0, 0.0], [l1, 0.0]], vec![[0.0, 10.0], [0.0, 10.0 + l2]]],
            vec![None, None],
        )
        .unwrap();
        let n = 40_000;
        let cloud = sample_network(&net, &[], n, seed).unwrap();
        let first = cloud.points().filter(|p| p[1] == 0.0).count() as f64 / n as f64;
        prop_assert!((first - l1 / (l1 + l2)).abs() < 0.01, "{first}");
    }
}
