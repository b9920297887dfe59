mod common;

use fillvol::complex::{
    build_complex, census_figure_eight, load_complex, save_complex, FacePairingData,
    PeripheralPaths, Perm, ShortEdgeRef,
};
use fillvol::Error;
use serde_json::Value;

const FIG8: &str = include_str!("../data/figure_eight.json");
const COVER: &str = include_str!("data/figure_eight_double_cover.json");

fn edit(f: impl FnOnce(&mut Value)) -> Vec<u8> {
    let mut v: Value = serde_json::from_str(FIG8).unwrap();
    f(&mut v);
    serde_json::to_vec(&v).unwrap()
}

#[test]
fn census_shape() {
    let (cx, template) = census_figure_eight();
    assert_eq!(cx.tetrahedron_count(), 2);
    assert_eq!(cx.orientations(), &[1, -1]);
    assert_eq!(cx.classes().len(), 2);
    assert_eq!(cx.short_edge_count(), 12);
    assert_eq!(cx.vertex_count(), 4);
    assert_eq!(cx.cusps()[0].euler_characteristic(), 0);
    assert_eq!(template.len(), 12);
    for class in cx.classes() {
        assert_eq!(class.members.len(), 6);
    }
}

#[test]
fn peripheral_curves_are_a_basis() {
    let cx = common::fig8();
    let c = &cx.cusps()[0];
    assert_eq!(cx.homology_class(&c.meridian), (1, 0));
    assert_eq!(cx.homology_class(&c.longitude), (0, 1));
    for t in 0..2 {
        for v in 0..4 {
            assert_eq!(cx.homology_class(&cx.triangle_cycle(t, v)), (0, 0));
        }
    }
}

#[test]
fn json_round_trip() {
    let cx = common::fig8();
    let again = load_complex(&save_complex(&cx)).unwrap();
    assert_eq!(again.face_pairing_data(), cx.face_pairing_data());
    assert_eq!(again.peripheral_paths(), cx.peripheral_paths());
    assert_eq!(again.sigma_template(), cx.sigma_template());
    assert_eq!(save_complex(&again), save_complex(&cx));
}

#[test]
fn swapped_face_partners_break_the_cusp_torus() {
    // Faces 2 and 3 of tetrahedron 0 trade partners.
    let bytes = edit(|v| {
        let g = v["face_gluings"].as_array_mut().unwrap();
        g[2]["nbr_face"] = 1.into();
        g[2]["perm"] = serde_json::json!(Perm::ordered(2, 1).images());
        g[3]["nbr_face"] = 0.into();
        g[3]["perm"] = serde_json::json!(Perm::ordered(3, 0).images());
    });
    match load_complex(&bytes) {
        Err(Error::NotTorus { cusp: 0, euler }) => assert_ne!(euler, 0),
        other => panic!("expected a torus failure, got {other:?}"),
    }
}

#[test]
fn order_reversing_permutation_is_rejected() {
    let bytes = edit(|v| v["face_gluings"][0]["perm"] = serde_json::json!([2, 1, 0, 3]));
    assert!(matches!(
        load_complex(&bytes),
        Err(Error::InconsistentOrdering { .. } | Error::InvalidGluing { .. })
    ));
}

#[test]
fn missing_gluing_is_rejected() {
    let bytes = edit(|v| {
        v["face_gluings"].as_array_mut().unwrap().pop();
    });
    assert!(matches!(
        load_complex(&bytes),
        Err(Error::UngluedFace { .. })
    ));
}

#[test]
fn duplicate_class_ids_are_rejected() {
    let cx = common::fig8();
    let mut v: Value = serde_json::from_slice(&save_complex(&cx)).unwrap();
    v["long_edge_classes"][1]["id"] = 0.into();
    let err = load_complex(&serde_json::to_vec(&v).unwrap()).unwrap_err();
    assert!(err.to_string().contains("duplicate"), "{err}");
}

#[test]
fn version_and_unknown_fields() {
    assert!(matches!(
        load_complex(&edit(|v| v["format_version"] = 7.into())),
        Err(Error::Version(7))
    ));
    assert!(matches!(
        load_complex(&edit(|v| v["extra"] = 1.into())),
        Err(Error::Malformed(_))
    ));
}

#[test]
fn open_peripheral_path_is_rejected() {
    let bytes = edit(|v| v["cusps"][0]["longitude"] = serde_json::json!([7, 8]));
    assert!(matches!(load_complex(&bytes), Err(Error::BadPath { .. })));
}

#[test]
fn dependent_peripheral_pair_is_rejected() {
    let bytes = edit(|v| v["cusps"][0]["longitude"] = serde_json::json!([7]));
    assert!(matches!(
        load_complex(&bytes),
        Err(Error::NotBasis { cusp: 0 })
    ));
}

#[test]
fn wrong_orientation_override_is_rejected() {
    let cx = common::fig8();
    let r = build_complex(
        &cx.face_pairing_data(),
        &cx.peripheral_paths(),
        Some(&[1, 1]),
    );
    assert!(matches!(r, Err(Error::Orientation { .. })));
}

#[test]
fn face_pairs_with_ordered_permutations() {
    let cx = common::fig8();
    let pairs: Vec<_> = cx
        .face_pairing_data()
        .gluings
        .iter()
        .map(|g| ((g.tet, g.face), (g.nbr_tet, g.nbr_face)))
        .collect();
    let fp = FacePairingData::from_face_pairs(2, &pairs);
    assert_eq!(fp, cx.face_pairing_data());
}

#[test]
fn short_edges_have_two_slots_and_one_cusp() {
    let cx = common::fig8();
    for (i, e) in cx.short_edges().iter().enumerate() {
        assert_eq!(e.slots.len(), 2);
        for s in &e.slots {
            let r = cx.short_ref(*s);
            assert_eq!(
                r,
                ShortEdgeRef {
                    edge: i,
                    forward: true
                }
            );
            assert_eq!(cx.short_ref(s.reversed()), r.reversed());
        }
    }
}

#[test]
fn double_cover_fixture_matches_construction() {
    let built = common::double_cover(&common::fig8());
    let fixture = load_complex(COVER.as_bytes()).unwrap();
    assert_eq!(fixture.face_pairing_data(), built.face_pairing_data());
    assert_eq!(fixture.peripheral_paths(), built.peripheral_paths());
    assert_eq!(fixture.tetrahedron_count(), 4);
    assert_eq!(fixture.cusp_count(), 1);
    assert_eq!(fixture.cusps()[0].euler_characteristic(), 0);
}

#[test]
fn template_must_match_peripheral_holonomy() {
    let cx = common::fig8();
    let mut template = cx.sigma_template().unwrap().to_vec();
    template.swap(0, 6);
    let stripped = build_complex(&cx.face_pairing_data(), &cx.peripheral_paths(), None).unwrap();
    assert!(matches!(
        stripped.with_sigma_template(template),
        Err(Error::Template(_))
    ));
    let empty = PeripheralPaths::default();
    assert!(build_complex(&cx.face_pairing_data(), &[empty], None).is_err());
}
