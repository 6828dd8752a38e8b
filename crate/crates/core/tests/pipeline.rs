mod common;

use covinterp::filter::{make_caratheodory, make_circle_filter, Spacing};
use covinterp::reduction::{reduce, ReduceOptions};

#[test]
fn reduces_order_twenty_models_to_stable_degree_thirteen() {
    let opts = ReduceOptions {
        period: Some(1.0 / 250.0),
        ..Default::default()
    };
    let filters = [
        ("caratheodory:14", make_caratheodory(14).unwrap()),
        ("circle:0.95:14:even", make_circle_filter(14, 0.95, Spacing::Even, true).unwrap()),
    ];
    let mut rng = common::rng(3);
    for _ in 0..4 {
        let model = common::random_continuous_model(&mut rng, 20);
        for (name, filter) in &filters {
            let out = reduce(&model, filter, name, &opts).unwrap();
            assert!(out.report.reduced_stable, "{name}");
            assert_eq!(out.report.degree, 13, "{name}");
            assert!(out.report.lambda >= 1.0 - 1e-8, "{name}: {}", out.report.lambda);
            assert!(out.report.markov_residual < 1e-6, "{name}: {}", out.report.markov_residual);
        }
    }
}

#[test]
fn low_degree_model_gives_minimal_stable_realization() {
    use covinterp::numkit::{c64, real_matrix};
    use covinterp::realize::{Domain, StateSpaceModel};
    use covinterp::reduction::max_circle_deviation;
    let model = StateSpaceModel::new(
        real_matrix(2, 2, &[-5.0, 100.0, -100.0, -5.0]),
        real_matrix(2, 1, &[1.0, 0.0]),
        real_matrix(1, 2, &[0.0, 1.0]),
        c64(0.0, 0.0),
        Domain::Continuous,
    )
    .unwrap();
    let filter = make_circle_filter(4, 0.95, Spacing::Even, true).unwrap();
    let opts = ReduceOptions {
        period: Some(0.004),
        ..Default::default()
    };
    let out = reduce(&model, &filter, "circle", &opts).unwrap();
    assert_eq!(out.report.multiplicity, 2);
    assert!(out.report.reduced_stable);
    assert!(out.state_space.is_stable());
    assert!((out.report.lambda - 1.0).abs() < 1e-10);
    let dev = max_circle_deviation(&out.discrete_input, &out.state_space, 256).unwrap();
    assert!(dev < 1e-8, "{dev:e}");
}
