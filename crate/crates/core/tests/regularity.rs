mod common;

use std::collections::BTreeMap;

use common::{all_triangulations, fm_regular, general_position, margins, pt, r};
use proptest::prelude::*;
use regsub::regularity::{
    is_regular, lower_envelope_points, replay_witness, verify_certificate, Domain, Regularity,
};
use regsub::{realize, Complex, Point, Vertex};

fn point_set() -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((0i64..7, 0i64..7), 5..=6)
        .prop_map(|xy| xy.iter().map(|&(x, y)| pt(&[x, y])).collect::<Vec<Point>>())
        .prop_filter("general position", |p| general_position(p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lower_envelopes_are_regular(pts in point_set(), hs in prop::collection::vec(-20i64..20, 6)) {
        let heights: Vec<_> = pts.iter().zip(&hs).map(|(p, h)| &p[0] * &p[0] + &p[1] * &p[1] + r(*h)).collect();
        let Ok(t) = lower_envelope_points(&pts, &heights) else {
            return Err(TestCaseError::reject("non-generic heights"));
        };
        match is_regular(Domain::triangulation(&t)).unwrap() {
            Regularity::Regular(cert) => {
                prop_assert!(verify_certificate(Domain::triangulation(&t), &cert).unwrap());
                let oracle = margins(t.facets(), t.coords(), &cert.heights.heights);
                prop_assert_eq!(&oracle, &cert.margins);
                prop_assert!(oracle.values().all(|m| m > &r(0)));
            }
            Regularity::Irregular(_) => prop_assert!(false, "lower envelope declared irregular"),
        }
    }

    #[test]
    fn decision_agrees_with_elimination(pts in point_set(), pick in any::<prop::sample::Index>()) {
        let all = all_triangulations(&pts);
        let facets = pick.get(&all);
        let coords: BTreeMap<Vertex, Point> = pts.iter().cloned().enumerate().map(|(i, p)| (i as Vertex, p)).collect();
        let used: BTreeMap<Vertex, Point> = coords
            .iter()
            .filter(|(v, _)| facets.iter().any(|f| f.contains(**v)))
            .map(|(v, p)| (*v, p.clone()))
            .collect();
        let t = realize(Complex::new(facets.iter().cloned().map(|f| f.into_vec())).unwrap(), used.clone()).unwrap();
        let dom = Domain::triangulation(&t);
        let expected = fm_regular(facets, &used);
        match is_regular(dom).unwrap() {
            Regularity::Regular(cert) => {
                prop_assert!(expected);
                prop_assert!(verify_certificate(dom, &cert).unwrap());
            }
            Regularity::Irregular(w) => {
                prop_assert!(!expected);
                prop_assert!(replay_witness(dom, &w).unwrap());
            }
        }
    }
}

#[test]
fn tampered_certificate_is_rejected() {
    let t = regsub::fixtures::square_triangulations().0;
    let dom = Domain::triangulation(&t);
    let Regularity::Regular(mut cert) = is_regular(dom).unwrap() else {
        panic!("square triangulation is regular");
    };
    for m in cert.margins.values_mut() {
        *m += r(1);
    }
    assert!(!verify_certificate(dom, &cert).unwrap());
}

#[test]
fn spiral_witness_replays() {
    let t = regsub::fixtures::spiral6();
    let dom = Domain::triangulation(&t);
    let Regularity::Irregular(w) = is_regular(dom).unwrap() else {
        panic!("spiral is not regular");
    };
    assert!(replay_witness(dom, &w).unwrap());
    assert!(!fm_regular(t.facets(), t.coords()));
}
