//! Flattenings built from a Ptolemy assignment and a log-cocycle, with the
//! edge, cusp and filling conditions evaluated on them.

use num_complex::Complex64;
use rand::Rng;

use crate::cocycle::{
    lift_log_cocycle_with_trees, Cochain, LogCocycle, MultiplicativeCocycle, PeripheralLog,
};
use crate::complex::{
    inverse_path, missing, reduce_cyclic, ShortEdgeRef, ShortSlot, SpanningTree, TruncatedComplex,
};
use crate::dilog::{log, psi};
use crate::ptolemy::{coefficient_slots, cross_ratios, start_rng, PtolemyAssignment};
use crate::{pi_i, Error, Result, PI};

/// Distance from an integer allowed when reading off `p` and `q`.
pub const INTEGRALITY_TOL: f64 = 1e-6;

/// `(z; p, q)` together with the log-parameters it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Flattening {
    pub tet: usize,
    pub eps: i8,
    pub z: Complex64,
    /// `(α⁰, α¹, α²)` on edges 01/23, 03/12 and 02/13.
    pub alpha: [Complex64; 3],
    pub p: i64,
    pub q: i64,
}

impl Flattening {
    /// The log-parameter on tetrahedron edge `ab`.
    pub fn at_edge(&self, a: usize, b: usize) -> Complex64 {
        match crate::complex::edge_index(a, b) {
            0 | 5 => self.alpha[0],
            2 | 3 => self.alpha[1],
            _ => self.alpha[2],
        }
    }

    /// `|α⁰ + α¹ + α²|`.
    pub fn sum_residual(&self) -> f64 {
        (self.alpha[0] + self.alpha[1] + self.alpha[2]).norm()
    }

    /// Largest distance from an integer among `(α⁰ - log z)/πi`,
    /// `(α¹ - log z')/πi` and `(α² - log z'')/πi`.
    pub fn branch_defect(&self) -> f64 {
        let one = Complex64::new(1.0, 0.0);
        let logs = [log(self.z), -log(one - self.z), log(one - self.z.inv())];
        self.alpha
            .iter()
            .zip(logs)
            .map(|(&a, l)| {
                let k = (a - l) / pi_i();
                (k - Complex64::new(k.re.round(), 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatteningSet {
    pub entries: Vec<Flattening>,
}

impl FlatteningSet {
    pub fn max_sum_residual(&self) -> f64 {
        self.entries
            .iter()
            .map(Flattening::sum_residual)
            .fold(0.0, f64::max)
    }

    pub fn max_branch_defect(&self) -> f64 {
        self.entries
            .iter()
            .map(Flattening::branch_defect)
            .fold(0.0, f64::max)
    }
}

/// Requires `a` to be a lift of σ and `p, q` to come out integral.
pub fn build_flattenings(
    c: &PtolemyAssignment,
    a: &LogCocycle,
    sigma: &MultiplicativeCocycle,
    cx: &TruncatedComplex,
) -> Result<FlatteningSet> {
    a.validate(sigma, cx)?;
    let set = build_flattenings_unchecked(c, a, sigma, cx)?;
    for (raw, f) in raw_branches(&set).into_iter().zip(&set.entries) {
        let off = (raw.0 - Complex64::new(f.p as f64, 0.0))
            .norm()
            .max((raw.1 - Complex64::new(f.q as f64, 0.0)).norm());
        if off > INTEGRALITY_TOL {
            return Err(Error::Incongruent(format!(
                "branch integers of tetrahedron {} off by {off:.3e}",
                f.tet
            )));
        }
    }
    Ok(set)
}

fn raw_branches(set: &FlatteningSet) -> Vec<(Complex64, Complex64)> {
    let one = Complex64::new(1.0, 0.0);
    set.entries
        .iter()
        .map(|f| {
            (
                (f.alpha[0] - log(f.z)) / pi_i(),
                (f.alpha[1] + log(one - f.z)) / pi_i(),
            )
        })
        .collect()
}

/// Same formulas without the congruence and integrality checks; `p, q` are
/// rounded. Only useful for diagnosing a bad `a`.
pub fn build_flattenings_unchecked(
    c: &PtolemyAssignment,
    a: &LogCocycle,
    sigma: &MultiplicativeCocycle,
    cx: &TruncatedComplex,
) -> Result<FlatteningSet> {
    let shapes = cross_ratios(c, sigma, cx)?;
    let mut entries = Vec::with_capacity(shapes.len());
    for (t, s) in shapes.iter().enumerate() {
        let lc = |x, y| log(c.oriented(cx, t, x, y));
        let [k1, k2] = coefficient_slots(t);
        let sum = |slots: [ShortSlot; 4]| slots.iter().map(|&s| a.slot(cx, s)).sum::<Complex64>();
        let a0 = lc(0, 3) + lc(1, 2) - lc(0, 2) - lc(1, 3) + sum(k2);
        let a1 = lc(0, 2) + lc(1, 3) - lc(0, 1) - lc(2, 3) - sum(k1);
        let mut f = Flattening {
            tet: t,
            eps: cx.orientation(t),
            z: s.z,
            alpha: [a0, a1, -a0 - a1],
            p: 0,
            q: 0,
        };
        let one = Complex64::new(1.0, 0.0);
        f.p = ((a0 - log(f.z)) / pi_i()).re.round() as i64;
        f.q = ((a1 + log(one - f.z)) / pi_i()).re.round() as i64;
        entries.push(f);
    }
    Ok(FlatteningSet { entries })
}

/// `max |Σ ε α|` over the long-edge classes.
pub fn edge_condition_check(flattenings: &FlatteningSet, cx: &TruncatedComplex) -> f64 {
    cx.classes()
        .iter()
        .map(|class| {
            class
                .members
                .iter()
                .map(|m| {
                    flattenings.entries[m.tet].at_edge(m.a, m.b) * cx.orientation(m.tet) as f64
                })
                .sum::<Complex64>()
                .norm()
        })
        .fold(0.0, f64::max)
}

/// One pass of a normal path through the cusp triangle at `(tet, v)`: it
/// enters across the side opposite `exit`, leaves across the side opposite
/// `entry`, and so passes the corner `corner` (on tetrahedron edge
/// `v`–`corner`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormalStep {
    pub tet: usize,
    pub v: usize,
    pub corner: usize,
    pub entry: usize,
    pub exit: usize,
}

/// A closed normal path in the cusp triangulation, given by its corners.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalPath {
    pub cusp: usize,
    pub steps: Vec<NormalStep>,
}

/// A crossing out of the triangle at `(tet, v)` across the side joining
/// corners `x` and `y`.
type Crossing = (usize, usize, usize, usize);

fn cross(cx: &TruncatedComplex, (t, v, a, c): Crossing) -> Crossing {
    let (t2, p) = cx.neighbor(t, missing([v, a, c]));
    (t2, p.apply(v), p.apply(a), p.apply(c))
}

fn same_side((t, v, a, c): Crossing, (t2, v2, a2, c2): Crossing) -> bool {
    (t, v) == (t2, v2) && ((a, c) == (a2, c2) || (a, c) == (c2, a2))
}

impl NormalPath {
    /// Pushes a closed edge path slightly to its left, giving a normal path
    /// in the same free homotopy class.
    pub fn from_edge_path(
        cx: &TruncatedComplex,
        cusp: usize,
        path: &[ShortEdgeRef],
    ) -> Result<NormalPath> {
        cx.check_closed(cusp, path)?;
        let path = reduce_cyclic(path);
        let n = path.len();
        let budget = 8 * cx.tetrahedron_count() + 8;
        let mut crossings: Vec<Crossing> = Vec::new();
        for k in 0..n {
            let (e_in, e_out) = (path[k], path[(k + 1) % n]);
            let rep = left_slot(cx, e_in)?;
            let (mut t, mut v, mut corner, mut side) = (rep.tet, rep.v, rep.b, rep.a);
            let mut turns = 0;
            loop {
                let c = missing([v, corner, side]);
                if cx.short_ref(ShortSlot {
                    tet: t,
                    v,
                    a: corner,
                    b: c,
                }) == e_out
                {
                    break;
                }
                turns += 1;
                if turns > budget {
                    return Err(Error::NotNormal(format!(
                        "no way from {} to {}",
                        e_in.to_signed(),
                        e_out.to_signed()
                    )));
                }
                crossings.push((t, v, corner, c));
                let (t2, v2, a2, c2) = cross(cx, (t, v, corner, c));
                (t, v, corner, side) = (t2, v2, a2, c2);
            }
        }
        // Drop crossings that immediately come back through the same side.
        let mut changed = true;
        while changed && crossings.len() >= 2 {
            changed = false;
            for i in 0..crossings.len() {
                let j = (i + 1) % crossings.len();
                if same_side(cross(cx, crossings[i]), crossings[j]) {
                    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                    crossings.remove(hi);
                    crossings.remove(lo);
                    changed = true;
                    break;
                }
            }
        }
        let mut steps = Vec::with_capacity(crossings.len());
        for i in 0..crossings.len() {
            let (t, v, a, c) = cross(cx, crossings[i]);
            let (t3, v3, x, y) = crossings[(i + 1) % crossings.len()];
            if (t, v) != (t3, v3) {
                return Err(Error::NotNormal(
                    "consecutive crossings are not in one triangle".into(),
                ));
            }
            let corner = [a, c].into_iter().find(|w| *w == x || *w == y);
            let Some(corner) = corner else {
                return Err(Error::NotNormal(format!(
                    "path re-enters through the entering side of triangle ({t}, {v})"
                )));
            };
            let entry = if a == corner { c } else { a };
            let exit = if x == corner { y } else { x };
            if entry == exit {
                return Err(Error::NotNormal(format!(
                    "path re-enters through the entering side of triangle ({t}, {v})"
                )));
            }
            steps.push(NormalStep {
                tet: t,
                v,
                corner,
                entry,
                exit,
            });
        }
        let np = NormalPath { cusp, steps };
        np.validate(cx)?;
        Ok(np)
    }

    /// Each step must leave across the side the next step enters from, and
    /// no step may leave across its entering side.
    pub fn validate(&self, cx: &TruncatedComplex) -> Result<()> {
        let n = self.steps.len();
        for (i, s) in self.steps.iter().enumerate() {
            if missing([s.corner, s.entry, s.exit]) != s.v || s.entry == s.exit {
                return Err(Error::NotNormal(format!(
                    "step {i} is not a corner passage"
                )));
            }
            if cx.vertex_cusp(cx.corner_vertex(s.tet, s.v, s.corner)) != self.cusp {
                return Err(Error::NotNormal(format!("step {i} is on another cusp")));
            }
            let next = self.steps[(i + 1) % n];
            let (t2, v2, a2, c2) = cross(cx, (s.tet, s.v, s.corner, s.exit));
            let arrives = (t2, v2) == (next.tet, next.v)
                && ((a2, c2) == (next.corner, next.entry) || (a2, c2) == (next.entry, next.corner));
            if !arrives {
                return Err(Error::NotNormal(format!(
                    "step {i} does not lead into step {}",
                    (i + 1) % n
                )));
            }
        }
        Ok(())
    }
}

/// The slot of `e` whose triangle lies to the left of it.
fn left_slot(cx: &TruncatedComplex, e: ShortEdgeRef) -> Result<ShortSlot> {
    cx.short_edges()[e.edge]
        .slots
        .iter()
        .map(|&s| if e.forward { s } else { s.reversed() })
        .find(|s| cx.is_ccw(s.tet, s.v, s.a, s.b, missing([s.v, s.a, s.b])))
        .ok_or(Error::Orientation {
            tet: cx.slot_of(e).tet,
        })
}

/// Signed sum of log-parameters picked up along `path`: `+ε α` on the corner
/// edge when the corner lies to the left, `-ε α` otherwise.
pub fn normal_path_sum(
    flattenings: &FlatteningSet,
    cx: &TruncatedComplex,
    path: &NormalPath,
) -> Complex64 {
    path.steps
        .iter()
        .map(|s| {
            let left = if cx.is_ccw(s.tet, s.v, s.corner, s.entry, s.exit) {
                1.0
            } else {
                -1.0
            };
            flattenings.entries[s.tet].at_edge(s.v, s.corner) * left * cx.orientation(s.tet) as f64
        })
        .sum()
}

/// Path sum along the normal push-off of `edge_path` minus `2 a(edge_path)`.
pub fn cusp_condition_check(
    flattenings: &FlatteningSet,
    a: &LogCocycle,
    cx: &TruncatedComplex,
    cusp: usize,
    edge_path: &[ShortEdgeRef],
) -> Result<Complex64> {
    let b = a.induced_hom(cx, cusp, edge_path)?;
    let normal = NormalPath::from_edge_path(cx, cusp, edge_path)?;
    Ok(normal_path_sum(flattenings, cx, &normal) - b * 2.0)
}

/// The edge path `μ^x λ^y` on `cusp`.
pub fn peripheral_word(cx: &TruncatedComplex, cusp: usize, x: i64, y: i64) -> Vec<ShortEdgeRef> {
    let c = &cx.cusps()[cusp];
    let power = |p: &[ShortEdgeRef], k: i64| -> Vec<ShortEdgeRef> {
        let base = if k < 0 { inverse_path(p) } else { p.to_vec() };
        (0..k.unsigned_abs())
            .flat_map(|_| base.iter().copied())
            .collect()
    };
    let mut word = power(&c.meridian, x);
    word.extend(power(&c.longitude, y));
    word
}

/// `|x - y|` with the real part compared modulo `m`.
pub fn distance_mod(x: Complex64, y: Complex64, m: f64) -> f64 {
    let d = (x.re - y.re).rem_euclid(m);
    Complex64::new(d.min(m - d), x.im - y.im).norm()
}

/// Recomputes Ψ for `trials` lifts of σ with periods `b`, each from random
/// spanning trees followed by a random `θ ∈ πiℤ` gauge, and returns the
/// largest pairwise difference modulo π².
pub fn psi_independence_test(
    c: &PtolemyAssignment,
    sigma: &MultiplicativeCocycle,
    b: &PeripheralLog,
    cx: &TruncatedComplex,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = start_rng(seed, 0x5eed);
    let mut values = Vec::with_capacity(trials);
    for _ in 0..trials {
        let trees: Vec<SpanningTree> = (0..cx.cusp_count())
            .map(|j| cx.random_spanning_tree(j, &mut rng))
            .collect();
        let refs: Vec<&SpanningTree> = trees.iter().collect();
        let a = lift_log_cocycle_with_trees(sigma, b, cx, &refs)?;
        let theta: Vec<Complex64> = (0..cx.vertex_count())
            .map(|_| pi_i() * rng.gen_range(-3..=3) as f64)
            .collect();
        let a = a.act_theta(cx, &theta);
        values.push(psi(&build_flattenings(c, &a, sigma, cx)?)?);
    }
    let mut worst: f64 = 0.0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            worst = worst.max(distance_mod(values[i], values[j], PI * PI));
        }
    }
    Ok(worst)
}
