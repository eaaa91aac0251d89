use proptest::prelude::*;

use specasym_cli::config::{Boundary, Class, Coefficient, Form, Indices, Order, Settings, Tolerances, WeightForm};
use specasym_cli::ProblemConfig;

fn complex() -> impl Strategy<Value = [f64; 2]> {
    [prop::num::f64::NORMAL | prop::num::f64::ZERO, prop::num::f64::NORMAL | prop::num::f64::ZERO]
}

fn class() -> impl Strategy<Value = Option<Class>> {
    prop_oneof![Just(None), Just(Some(Class::L1)), Just(Some(Class::L2))]
}

fn coefficient() -> impl Strategy<Value = Coefficient> {
    prop_oneof![
        class().prop_map(|class| Coefficient::Zero { class }),
        (complex(), class()).prop_map(|(value, class)| Coefficient::Constant { value, class }),
        (1usize..4, class())
            .prop_flat_map(|(pieces, class)| {
                (
                    prop::collection::vec(0.01f64..1.0, pieces - 1),
                    prop::collection::vec(prop::collection::vec(complex(), 0..4), pieces),
                    Just(class),
                )
            })
            .prop_map(|(mut inner, coeffs, class)| {
                inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let mut breakpoints = vec![0.0];
                breakpoints.extend(inner);
                breakpoints.push(1.0);
                Coefficient::PiecewisePoly {
                    breakpoints,
                    coeffs,
                    class,
                }
            }),
    ]
}

fn form() -> impl Strategy<Value = Form> {
    (0usize..4, prop::collection::vec(complex(), 0..3)).prop_map(|(p, u)| Form { p, u })
}

fn config() -> impl Strategy<Value = ProblemConfig> {
    (
        2usize..7,
        prop::collection::vec(0usize..3, 1..6),
        prop::collection::vec(coefficient(), 1..6),
        prop::collection::vec(form(), 1..3),
        prop::collection::vec(form(), 1..3),
        prop::option::of((0usize..4, prop::collection::vec(complex(), 0..3))),
        (prop::option::of(1i64..5), prop::option::of(5i64..50), prop::option::of(1e-14f64..1e-3)),
    )
        .prop_map(|(n, i, coefficients, left, right, weight, (l_min, l_max, tol))| ProblemConfig {
            order: Order { n },
            indices: Some(Indices { i }),
            coefficients: Some(coefficients),
            boundary: Boundary {
                r: left.len(),
                left,
                right,
            },
            weight_form: weight.map(|(p0, u0)| WeightForm { p0, u0 }),
            raw_matrix: None,
            settings: Settings {
                tolerances: Tolerances {
                    integration: tol,
                    ..Tolerances::default()
                },
                l_min,
                l_max,
                ..Settings::default()
            },
        })
}

proptest! {
    #[test]
    fn parse_serialize_parse_is_identity(cfg in config()) {
        let text = cfg.to_toml();
        let back = ProblemConfig::from_toml(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_toml(), text);
    }
}
