use proptest::prelude::*;
use schofield_core::oracle::bruteforce_pairs;
use schofield_core::quiver::APPENDIX_PRESETS;
use schofield_core::reflection::pairs_any_orientation;
use schofield_core::report::emit_report;
use schofield_core::{DimVector, EuclideanQuiver, ModuleId, SchofieldPair};

fn keys(p: &[SchofieldPair]) -> std::collections::BTreeSet<(String, String, u32, u32)> {
    p.iter().map(SchofieldPair::key).collect()
}

#[test]
fn identify_inverts_dim_of_on_every_preset() {
    for name in APPENDIX_PRESETS {
        let eq = EuclideanQuiver::parse(name).unwrap();
        for x in eq.exceptional_roots_below(&eq.delta().scale(2)).unwrap() {
            let id = eq.identify(&x).unwrap();
            assert_eq!(eq.dim_of(&id).unwrap(), x, "{name} {id}");
        }
    }
}

#[test]
fn oracle_agrees_on_a13_and_d5() {
    for name in ["A~1,3", "D~5"] {
        let eq = EuclideanQuiver::parse(name).unwrap();
        for z in eq.exceptional_roots_below(&eq.delta().scale(2)).unwrap() {
            assert_eq!(keys(&bruteforce_pairs(&eq, &z).unwrap()), keys(&eq.all_pairs(&z).unwrap()), "{name} {z}");
        }
    }
}

#[test]
fn report_round_trips_through_json() {
    let eq = EuclideanQuiver::parse("D~4").unwrap();
    let report = emit_report(&eq, 0..2).unwrap();
    let value: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    for section in value["sections"].as_array().unwrap() {
        for line in section["lines"].as_array().unwrap() {
            let id: ModuleId = line["module"].as_str().unwrap().parse().unwrap();
            let pairs: Vec<SchofieldPair> = serde_json::from_value(line["pairs"].clone()).unwrap();
            let z = eq.dim_of(&id).unwrap();
            assert_eq!(keys(&pairs), keys(&eq.all_pairs(&z).unwrap()));
            for p in &pairs {
                assert_eq!(eq.dim_of(&p.x.id).unwrap(), p.x.dim);
                assert_eq!(eq.dim_of(&p.y.id).unwrap(), p.y.dim);
            }
        }
    }
}

#[test]
fn non_exceptional_input_is_refused() {
    let eq = EuclideanQuiver::parse("A~2,2").unwrap();
    assert!(eq.all_pairs(eq.delta()).is_err());
    assert!(eq.all_pairs(&DimVector::from([1, 2])).is_err());
}

fn orientation(name: &'static str) -> impl Strategy<Value = EuclideanQuiver> {
    let base = EuclideanQuiver::parse(name).unwrap();
    let n = base.n();
    let edges: Vec<(usize, usize)> = base.quiver().arrows().iter().map(|a| (a.tail, a.head)).collect();
    prop::collection::vec(any::<bool>(), edges.len()).prop_filter_map("cyclic", move |flips| {
        let arrows = edges.iter().zip(flips).map(|(&(t, h), f)| if f { (h, t) } else { (t, h) }).collect();
        schofield_core::Quiver::new(n, arrows).ok().and_then(|q| EuclideanQuiver::new(q).ok())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn procedure_matches_direct_on_d6(eq in orientation("D~6")) {
        for z in eq.exceptional_roots_below(eq.delta()).unwrap() {
            prop_assert_eq!(keys(&pairs_any_orientation(&eq, &z).unwrap()), keys(&eq.all_pairs(&z).unwrap()));
        }
    }

    #[test]
    fn count_theorem_on_random_a_orientations(eq in orientation("A~2,4")) {
        for z in eq.exceptional_roots_below(&eq.delta().scale(2)).unwrap() {
            prop_assert_eq!(eq.all_pairs(&z).unwrap().len() + 1, z.support());
        }
    }
}
