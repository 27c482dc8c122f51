use std::f64::consts::PI;

use circsizer::circkernel::Angle;
use circsizer::inference::{BootstrapConfig, CellState, Data};
use circsizer::io::{map_from_json, map_to_json};
use circsizer::render::{render_svg, RenderSpec};
use circsizer::simgen::{regression_scenario, sample_mixture, sample_regression, scenario, simulation_rng};
use circsizer::sizermap::{build_map, SmoothingGrid};

fn config(seed: u64) -> BootstrapConfig {
    BootstrapConfig {
        b: 100,
        b2: 40,
        seed,
        ..Default::default()
    }
}

#[test]
fn d2_map_end_to_end() {
    let sample = sample_mixture(&scenario("D2").unwrap(), 200, &mut simulation_rng(4)).unwrap();
    let grid = SmoothingGrid::from_values(120, &[5.0, 10.0]).unwrap();
    let map = build_map(&Data::Density(sample), &grid, &config(4), 5.0).unwrap();
    assert_eq!(map.cell_count(), 240);

    let ring = map.features().remove(1);
    assert_eq!(ring.peaks().len(), 2);
    for target in [PI / 2.0, 1.5 * PI] {
        let t = Angle::new(target).unwrap();
        assert!(ring.peaks().iter().any(|p| p.distance(t) < 0.35));
    }

    let json = map_to_json(&map).unwrap();
    assert_eq!(map_from_json(&json).unwrap(), map);
    let svg = render_svg(&map, &RenderSpec::default());
    assert_eq!(svg.matches(r#"class="cell""#).count(), 240);
}

#[test]
fn rotating_the_data_rotates_the_map() {
    let ngrid = 96;
    let shift = 24;
    let sample = sample_mixture(&scenario("D3").unwrap(), 150, &mut simulation_rng(8)).unwrap();
    let rotated = sample.rotated(2.0 * PI * shift as f64 / ngrid as f64).unwrap();
    let grid = SmoothingGrid::from_values(ngrid, &[4.0, 12.0]).unwrap();
    let a = build_map(&Data::Density(sample), &grid, &config(2), 5.0).unwrap();
    let b = build_map(&Data::Density(rotated), &grid, &config(2), 5.0).unwrap();
    for k in 0..2 {
        let (sa, sb) = (a.states(k), b.states(k));
        let agree = (0..ngrid).filter(|&j| sa[j] == sb[(j + shift) % ngrid]).count();
        // resampling is by index, so only rounding of the rotated angles differs
        assert!(agree >= ngrid - 2, "ring {k}: {agree}/{ngrid}");
    }
}

#[test]
fn regression_map_finds_both_modes() {
    let model = regression_scenario("R1").unwrap();
    let sample = sample_regression(&model, 200, &mut simulation_rng(1)).unwrap();
    let grid = SmoothingGrid::from_values(60, &[10.0]).unwrap();
    let map = build_map(&Data::Regression(sample), &grid, &config(1), 5.0).unwrap();
    let peaks = map.features()[0].peaks();
    assert_eq!(peaks.len(), 2, "{peaks:?}");
    assert!(peaks.iter().any(|p| p.distance(Angle::new(PI).unwrap()) < 0.35), "{peaks:?}");
    assert!(peaks.iter().any(|p| p.distance(Angle::new(1.75 * PI).unwrap()) < 0.6), "{peaks:?}");
    assert!(map.ring(0).iter().any(|c| c.state == CellState::Increasing));
}
