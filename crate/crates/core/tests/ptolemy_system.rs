mod common;

use std::time::Instant;

use common::c;
use fillvol::cocycle::{sigma_from_holonomy, sigma_fundamental, GaugeAction};
use fillvol::complex::{load_complex, FIGURE_EIGHT_L1, FIGURE_EIGHT_L2};
use fillvol::peripheral::{
    a_polynomial, factor_hint, reduced_quadratics, resultant_quadratics, LaurentPoly, Quadratic,
};
use fillvol::ptolemy::{
    build_system, check_filling_representation, cross_ratios, gluing_check, natural_cocycle, solve,
    PtolemyAssignment,
};
use fillvol::{Complex64, Error};

const APOLY: &str = "L - L*M^2 - M^4 - 2*L*M^4 - L^2*M^4 - L*M^6 + L*M^8";

fn quad(terms: [&[(i64, i32, i32)]; 3]) -> Quadratic {
    terms.map(|ts| {
        ts.iter().fold(LaurentPoly::zero(), |p, &(k, m, l)| {
            p.add(&LaurentPoly::term(k, m, l))
        })
    })
}

fn monomial(p: &LaurentPoly) -> Option<(i64, i32, i32)> {
    match p.0.iter().collect::<Vec<_>>()[..] {
        [(&(m, l), &k)] => Some((k, m, l)),
        _ => None,
    }
}

/// Equal after multiplying `a` by some `±M^i L^j`.
fn same_up_to_unit(a: &Quadratic, b: &Quadratic) -> bool {
    let (ka, ma, la) = monomial(&a[0]).unwrap();
    let (kb, mb, lb) = monomial(&b[0]).unwrap();
    if ka.abs() != kb.abs() {
        return false;
    }
    let unit = LaurentPoly::term(kb / ka, mb - ma, lb - la);
    a.iter().zip(b).all(|(x, y)| x.mul(&unit) == *y)
}

#[test]
fn reduced_system_matches_the_worked_example() {
    let cx = common::fig8();
    assert_eq!((FIGURE_EIGHT_L1, FIGURE_EIGHT_L2), (1, 0));
    let [f, g] = reduced_quadratics(&cx).unwrap();
    // L^-1 M^-2 + z - M^2 z^2 and 1 - z - L z^2 with z = c(l1)/c(l2)
    let first = quad([&[(-1, 2, 0)], &[(1, 0, 0)], &[(1, -2, -1)]]);
    let second = quad([&[(-1, 0, 1)], &[(-1, 0, 0)], &[(1, 0, 0)]]);
    assert!(same_up_to_unit(&f, &first), "{:?}", f);
    assert!(same_up_to_unit(&g, &second), "{:?}", g);
}

#[test]
fn a_polynomial_is_exact() {
    let start = Instant::now();
    let p = a_polynomial(&common::fig8()).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert_eq!(p.to_string(), APOLY);
    let coeffs: Vec<i64> = p.0.values().copied().collect();
    assert_eq!(coeffs.len(), 7);
    let mut sorted = coeffs.clone();
    sorted.sort();
    assert_eq!(sorted, vec![-2, -1, -1, -1, -1, 1, 1]);
}

#[test]
fn a_polynomial_at_m_equal_one() {
    let p = a_polynomial(&common::fig8()).unwrap();
    let at = p.at_m_equals_one();
    assert_eq!(at, vec![-1, -2, -1]);
    assert_eq!(factor_hint(&at), "-(1+L)^2");
}

#[test]
fn a_polynomial_vanishes_on_solutions() {
    let cx = common::fig8();
    let p = a_polynomial(&cx).unwrap();
    for m in [c(0.7, 0.2), c(1.3, -0.4), c(-0.5, 0.9)] {
        for l in common::a_curve(m) {
            assert!(p.eval(m, l).norm() < 1e-10);
            let sigma = sigma_from_holonomy(&cx, &[(m, l)]).unwrap();
            let sols = solve(&build_system(&cx, &sigma).unwrap(), 16, 3, 1e-12).unwrap();
            assert_eq!(sols.len(), 1, "one point up to the diagonal action");
        }
    }
}

#[test]
fn empty_variety_off_the_curve() {
    let cx = common::fig8();
    let sigma = sigma_from_holonomy(&cx, &[(c(0.7, 0.2), c(2.0, 1.0))]).unwrap();
    assert!(matches!(
        solve(&build_system(&cx, &sigma).unwrap(), 16, 3, 1e-12),
        Err(Error::NoSolution)
    ));
}

#[test]
fn resultant_rejects_vanishing_leading_coefficient() {
    let f = quad([&[], &[(1, 0, 0)], &[(1, 0, 0)]]);
    let g = quad([&[(1, 0, 0)], &[], &[(-1, 0, 0)]]);
    assert!(matches!(
        resultant_quadratics(&f, &g),
        Err(Error::Resultant(_))
    ));
}

#[test]
fn resultant_of_shared_root_vanishes() {
    // (z - M)(z - 1) and (z - M)(z + L)
    let f = quad([&[(1, 0, 0)], &[(-1, 1, 0), (-1, 0, 0)], &[(1, 1, 0)]]);
    let g = quad([&[(1, 0, 0)], &[(-1, 1, 0), (1, 0, 1)], &[(-1, 1, 1)]]);
    assert!(resultant_quadratics(&f, &g).unwrap().is_zero());
}

#[test]
fn unsupported_triangulation() {
    let cover = load_complex(include_bytes!("data/figure_eight_double_cover.json")).unwrap();
    assert!(matches!(a_polynomial(&cover), Err(Error::Unsupported(_))));
}

#[test]
fn complete_structure_is_regular() {
    let cx = common::fig8();
    let sigma = sigma_from_holonomy(&cx, &[(c(1.0, 0.0), c(-1.0, 0.0))]).unwrap();
    let sols = solve(&build_system(&cx, &sigma).unwrap(), 32, 0, 1e-12).unwrap();
    let sixth = Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
    let geometric: Vec<_> = sols
        .iter()
        .filter(|s| {
            let z = cross_ratios(s, &sigma, &cx).unwrap();
            z.iter()
                .zip(cx.orientations())
                .all(|(z, &e)| (z.oriented(e) - sixth).norm() < 1e-9)
        })
        .collect();
    assert_eq!(geometric.len(), 1);
    let z = cross_ratios(geometric[0], &sigma, &cx).unwrap();
    assert!(gluing_check(&z, &cx) < 1e-12);
}

#[test]
fn natural_cocycle_is_flat_and_sees_the_holonomy() {
    let cx = common::fig8();
    let m = c(0.9, 0.3);
    let l = common::a_curve(m)[1];
    let sigma = sigma_from_holonomy(&cx, &[(m, l)]).unwrap();
    let sol = &solve(&build_system(&cx, &sigma).unwrap(), 16, 1, 1e-12).unwrap()[0];
    let nat = natural_cocycle(sol, &sigma, &cx);
    assert!(nat.max_residual(&cx) < 1e-12);
    // Peripheral holonomy is upper triangular with the σ-period on the diagonal.
    let hol = nat.holonomy(&cx, &cx.cusps()[0].meridian);
    assert!(hol.0[1][0].norm() < 1e-12);
    let d = hol.0[0][0];
    assert!(
        (d - m).norm() < 1e-10 || (d - 1.0 / m).norm() < 1e-10,
        "{d}"
    );
    let unfilled = fillvol::peripheral::FillingVector::unfilled(1);
    let check = check_filling_representation(sol, &sigma, &cx, &unfilled);
    assert!(!check.passed, "generic holonomy is not parabolic");
}

#[test]
fn template_and_fundamental_sigma_share_periods() {
    let cx = common::fig8();
    let t = [(c(0.9, 0.3), c(-0.8, 0.6))];
    let a = sigma_from_holonomy(&cx, &t).unwrap();
    let b = sigma_fundamental(&cx, &t).unwrap();
    use fillvol::cocycle::Cochain;
    for path in [&cx.cusps()[0].meridian, &cx.cusps()[0].longitude] {
        let x = a.induced_hom(&cx, 0, path).unwrap();
        let y = b.induced_hom(&cx, 0, path).unwrap();
        assert!((x - y).norm() < 1e-12);
    }
    assert!(a.triangle_residual(&cx) < 1e-12 && b.triangle_residual(&cx) < 1e-12);
}

#[test]
fn zero_gauge_is_rejected() {
    let cx = common::fig8();
    let c0 = PtolemyAssignment {
        values: vec![c(1.0, 0.0); 2],
    };
    let mut tau = vec![c(1.0, 0.0); cx.vertex_count()];
    tau[2] = c(0.0, 0.0);
    assert!(matches!(c0.act_tau(&cx, &tau), Err(Error::ZeroGauge(2))));
}
