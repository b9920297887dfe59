//! Bundled triangulations.

use super::{load_complex, TruncatedComplex};
use crate::monomial::Monomial;

const FIGURE_EIGHT: &str = include_str!("../../data/figure_eight.json");

/// Long-edge class carrying the label `l1` of the standard two-tetrahedron
/// picture of the figure-eight knot exterior.
pub const FIGURE_EIGHT_L1: usize = 1;
/// Long-edge class carrying the label `l2`.
pub const FIGURE_EIGHT_L2: usize = 0;

/// Signed short-edge ids of the labels `s1, ..., s12` (index 0 is `s1`).
/// Labels sharing a σ-value are matched up to their order within the group.
pub const FIGURE_EIGHT_SHORT_LABELS: [i32; 12] = [5, 7, -4, 3, 11, 2, 8, 12, 6, 10, -1, 9];

/// The figure-eight knot exterior with its σ template in `(M, L)`.
pub fn census_figure_eight() -> (TruncatedComplex, Vec<Monomial>) {
    let cx = load_complex(FIGURE_EIGHT.as_bytes()).expect("bundled census is valid");
    let template = cx
        .sigma_template()
        .expect("bundled census carries a template")
        .to_vec();
    (cx, template)
}
