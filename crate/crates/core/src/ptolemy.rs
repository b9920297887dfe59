//! σ-deformed Ptolemy equations, their numerical solution, and the
//! geometric data recovered from a solution: short-edge parameters, the
//! natural SL(2, ℂ) cocycle and cross-ratios.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cocycle::{check_tau, GaugeAction, MultiplicativeCocycle};
use crate::complex::{others, ShortEdgeRef, ShortSlot, TruncatedComplex};
use crate::linalg::newton_step;
use crate::monomial::Monomial;
use crate::peripheral::{Filling, FillingVector};
use crate::{Error, Result, PI};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_STARTS: usize = 64;
pub const MAX_ITERATIONS: usize = 200;
/// Coordinates or cross-ratios closer than this are the same solution.
pub const DEDUP_TOL: f64 = 1e-8;
/// Cross-ratios within this distance of 0 or 1 are degenerate.
pub const DEGENERATE_TOL: f64 = 1e-10;

type Var = (usize, i8);

/// Class variables of one tetrahedron's relation
/// `c02 c13 = K1 c01 c23 + K2 c03 c12`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationShape {
    pub tet: usize,
    /// `[02·13, 01·23, 03·12]`, each as two (class, sign) factors.
    pub products: [[Var; 2]; 3],
}

impl EquationShape {
    fn new(cx: &TruncatedComplex, t: usize) -> Self {
        let v = |a, b| cx.long_class(t, a, b);
        EquationShape {
            tet: t,
            products: [[v(0, 2), v(1, 3)], [v(0, 1), v(2, 3)], [v(0, 3), v(1, 2)]],
        }
    }

    fn product(&self, k: usize, c: &[Complex64]) -> Complex64 {
        let [(i, si), (j, sj)] = self.products[k];
        c[i] * c[j] * (si * sj) as f64
    }

    /// `∂(product k)/∂c_var`.
    fn product_derivative(&self, k: usize, c: &[Complex64], var: usize) -> Complex64 {
        let [(i, si), (j, sj)] = self.products[k];
        let s = (si * sj) as f64;
        let mut d = Complex64::new(0.0, 0.0);
        if i == var {
            d += c[j] * s;
        }
        if j == var {
            d += c[i] * s;
        }
        d
    }

    fn residual(&self, k: [Complex64; 2], c: &[Complex64]) -> Complex64 {
        self.product(0, c) - k[0] * self.product(1, c) - k[1] * self.product(2, c)
    }
}

/// The slots whose σ-values multiply to `K1` and `K2`.
pub fn coefficient_slots(t: usize) -> [[ShortSlot; 4]; 2] {
    let s = |v, a, b| ShortSlot { tet: t, v, a, b };
    [
        [s(0, 1, 2), s(2, 3, 0), s(1, 0, 3), s(3, 2, 1)],
        [s(0, 3, 2), s(2, 1, 0), s(1, 2, 3), s(3, 0, 1)],
    ]
}

/// Gauge classes: for each cusp, the least class incident to it that is
/// not already used.
pub fn gauge_classes(cx: &TruncatedComplex) -> Vec<usize> {
    let mut used = Vec::new();
    for j in 0..cx.cusp_count() {
        let pick = (0..cx.classes().len()).find(|&k| {
            let (u, v) = cx.class_ends(k);
            !used.contains(&k) && (cx.vertex_cusp(u) == j || cx.vertex_cusp(v) == j)
        });
        let pick = pick.or_else(|| (0..cx.classes().len()).find(|k| !used.contains(k)));
        used.extend(pick);
    }
    used
}

/// The Ptolemy relations with numeric coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PtolemySystem {
    pub equations: Vec<EquationShape>,
    pub coefficients: Vec<[Complex64; 2]>,
    pub class_count: usize,
    pub gauge: Vec<usize>,
}

pub fn build_system(cx: &TruncatedComplex, sigma: &MultiplicativeCocycle) -> Result<PtolemySystem> {
    if sigma.values().len() != cx.short_edge_count() {
        return Err(Error::Malformed(format!(
            "sigma has {} values for {} short edges",
            sigma.values().len(),
            cx.short_edge_count()
        )));
    }
    let mut equations = Vec::new();
    let mut coefficients = Vec::new();
    for t in 0..cx.tetrahedron_count() {
        equations.push(EquationShape::new(cx, t));
        let k = coefficient_slots(t).map(|slots| {
            slots
                .iter()
                .map(|&s| sigma.slot(cx, s))
                .product::<Complex64>()
        });
        if k.iter().any(|z| z.norm() == 0.0 || !z.is_finite()) {
            return Err(Error::Malformed(format!(
                "degenerate coefficient at tetrahedron {t}"
            )));
        }
        coefficients.push(k);
    }
    Ok(PtolemySystem {
        equations,
        coefficients,
        class_count: cx.classes().len(),
        gauge: gauge_classes(cx),
    })
}

impl PtolemySystem {
    pub fn residuals(&self, c: &PtolemyAssignment) -> Vec<Complex64> {
        self.equations
            .iter()
            .zip(&self.coefficients)
            .map(|(e, &k)| e.residual(k, &c.values))
            .collect()
    }

    pub fn max_residual(&self, c: &PtolemyAssignment) -> f64 {
        self.residuals(c)
            .iter()
            .map(|r| r.norm())
            .fold(0.0, f64::max)
    }

    fn free_classes(&self) -> Vec<usize> {
        (0..self.class_count)
            .filter(|k| !self.gauge.contains(k))
            .collect()
    }

    fn expand(&self, free: &[usize], x: &[Complex64]) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(1.0, 0.0); self.class_count];
        for (&k, &v) in free.iter().zip(x) {
            c[k] = v;
        }
        c
    }

    /// Shapes used for deduplication.
    fn shapes(&self, c: &[Complex64]) -> Vec<Complex64> {
        self.equations
            .iter()
            .zip(&self.coefficients)
            .map(|(e, k)| k[1] * e.product(2, c) / e.product(0, c))
            .collect()
    }
}

/// `c`: long-edge class → ℂˣ.
#[derive(Clone, Debug, PartialEq)]
pub struct PtolemyAssignment {
    pub values: Vec<Complex64>,
}

impl PtolemyAssignment {
    /// `c` on the tetrahedron edge oriented `a → b`.
    pub fn oriented(&self, cx: &TruncatedComplex, t: usize, a: usize, b: usize) -> Complex64 {
        let (k, s) = cx.long_class(t, a, b);
        self.values[k] * s as f64
    }

    /// The diagonal action of `(z_1, ..., z_h)`.
    pub fn act_diagonal(
        &self,
        cx: &TruncatedComplex,
        z: &[Complex64],
    ) -> Result<PtolemyAssignment> {
        let tau: Vec<Complex64> = (0..cx.vertex_count())
            .map(|v| z[cx.vertex_cusp(v)])
            .collect();
        self.act_tau(cx, &tau)
    }
}

impl GaugeAction for PtolemyAssignment {
    /// `c^τ(l) = τ(v₁) τ(v₂) c(l)`.
    fn act_tau(&self, cx: &TruncatedComplex, tau: &[Complex64]) -> Result<Self> {
        check_tau(tau, cx)?;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let (u, v) = cx.class_ends(k);
                c * tau[u] * tau[v]
            })
            .collect();
        Ok(PtolemyAssignment { values })
    }
}

/// Result of one Newton run.
pub(crate) fn newton<F>(eval: F, mut x: Vec<Complex64>, tol: f64) -> Option<Vec<Complex64>>
where
    F: Fn(&[Complex64]) -> Option<(Vec<Complex64>, Vec<Vec<Complex64>>)>,
{
    for _ in 0..MAX_ITERATIONS {
        let (f, jac) = eval(&x)?;
        let dx = newton_step(&jac, &f)?;
        let mut big: f64 = 0.0;
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
            big = big.max(d.norm() / (1.0 + xi.norm()));
        }
        if !big.is_finite() {
            return None;
        }
        if big < 1e-14 {
            break;
        }
    }
    let (f, _) = eval(&x)?;
    let res = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
    (res < tol).then_some(x)
}

/// Random start: log-uniform modulus in `[0.1, 10]`, uniform phase.
pub(crate) fn random_point<R: Rng>(rng: &mut R) -> Complex64 {
    let r = 10f64.powf(rng.gen_range(-1.0..=1.0));
    Complex64::from_polar(r, rng.gen_range(-PI..PI))
}

pub(crate) fn start_rng(seed: u64, job: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ job.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Lexicographic key on coordinates rounded to 1e-9.
pub(crate) fn rounded_key(zs: &[Complex64]) -> Vec<(i64, i64)> {
    zs.iter()
        .map(|z| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64))
        .collect()
}

pub(crate) fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
}

/// Multistart Newton over the gauge-fixed system.
pub fn solve(
    system: &PtolemySystem,
    starts: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<PtolemyAssignment>> {
    let free = system.free_classes();
    let eval = |x: &[Complex64]| {
        let c = system.expand(&free, x);
        let f: Vec<Complex64> = system
            .equations
            .iter()
            .zip(&system.coefficients)
            .map(|(e, &k)| e.residual(k, &c))
            .collect();
        let jac = system
            .equations
            .iter()
            .zip(&system.coefficients)
            .map(|(e, &k)| {
                free.iter()
                    .map(|&var| {
                        e.product_derivative(0, &c, var)
                            - k[0] * e.product_derivative(1, &c, var)
                            - k[1] * e.product_derivative(2, &c, var)
                    })
                    .collect()
            })
            .collect();
        f.iter().all(|v| v.is_finite()).then_some((f, jac))
    };
    let found: Vec<Vec<Complex64>> = (0..starts as u64)
        .into_par_iter()
        .filter_map(|job| {
            let mut rng = start_rng(seed, job);
            let x0: Vec<Complex64> = free.iter().map(|_| random_point(&mut rng)).collect();
            let x = newton(eval, x0, tol)?;
            let c = system.expand(&free, &x);
            c.iter().all(|z| z.norm() > DEDUP_TOL).then_some(c)
        })
        .collect();
    let mut unique: Vec<Vec<Complex64>> = Vec::new();
    for c in found {
        let dup = unique.iter().any(|u| {
            close(u, &c, DEDUP_TOL) || close(&system.shapes(u), &system.shapes(&c), DEDUP_TOL)
        });
        if !dup {
            unique.push(c);
        }
    }
    if unique.is_empty() {
        return Err(Error::NoSolution);
    }
    unique.sort_by_key(|c| rounded_key(c));
    Ok(unique
        .into_iter()
        .map(|values| PtolemyAssignment { values })
        .collect())
}

/// Short-edge parameters of every slot, indexed `[t][v][a][b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortEdgeParams {
    values: Vec<[[[Complex64; 4]; 4]; 4]>,
}

impl ShortEdgeParams {
    pub fn get(&self, s: ShortSlot) -> Complex64 {
        self.values[s.tet][s.v][s.a][s.b]
    }
}

/// `c(s) = -σ(P: Q→X)/σ(Q: X→P) · c(Q→P)/(c(P→X) c(X→Q))` for the short
/// edge at `X` running from the corner on `XP` to the corner on `XQ`.
pub fn short_edge_params(
    c: &PtolemyAssignment,
    sigma: &MultiplicativeCocycle,
    cx: &TruncatedComplex,
) -> ShortEdgeParams {
    let zero = Complex64::new(0.0, 0.0);
    let mut values = vec![[[[zero; 4]; 4]; 4]; cx.tetrahedron_count()];
    for (t, tv) in values.iter_mut().enumerate() {
        for x in 0..4 {
            for p in others(x) {
                for q in others(x) {
                    if p == q {
                        continue;
                    }
                    let s = |v, a, b| sigma.slot(cx, ShortSlot { tet: t, v, a, b });
                    let cl = |a, b| c.oriented(cx, t, a, b);
                    tv[x][p][q] = -s(p, q, x) / s(q, x, p) * cl(q, p) / (cl(p, x) * cl(x, q));
                }
            }
        }
    }
    ShortEdgeParams { values }
}

/// 2×2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Mat2 {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Mat2([[o, z], [z, o]])
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2(std::array::from_fn(|i| {
            std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j])
        }))
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Inverse of a determinant-one matrix.
    pub fn inv_sl2(&self) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2([[d, -b], [-c, a]])
    }

    pub fn pow(&self, k: i64) -> Mat2 {
        let base = if k < 0 { self.inv_sl2() } else { *self };
        (0..k.unsigned_abs()).fold(Mat2::identity(), |acc, _| acc.mul(&base))
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2(self.0.map(|r| r.map(|x| x * s)))
    }

    pub fn distance(&self, o: &Mat2) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - o.0[i][j]).norm());
            }
        }
        d
    }
}

/// The natural cocycle on long and short edges of every truncated
/// tetrahedron.
#[derive(Clone, Debug, PartialEq)]
pub struct NaturalCocycle {
    long: Vec<[[Mat2; 4]; 4]>,
    short: Vec<[[[Mat2; 4]; 4]; 4]>,
}

impl NaturalCocycle {
    /// `φ` on the long edge `a → b` of tetrahedron `t`.
    pub fn long(&self, t: usize, a: usize, b: usize) -> Mat2 {
        self.long[t][a][b]
    }

    pub fn short(&self, s: ShortSlot) -> Mat2 {
        self.short[s.tet][s.v][s.a][s.b]
    }

    /// Product along a cusp edge-path.
    pub fn holonomy(&self, cx: &TruncatedComplex, path: &[ShortEdgeRef]) -> Mat2 {
        path.iter().fold(Mat2::identity(), |acc, &e| {
            acc.mul(&self.short(cx.slot_of(e)))
        })
    }

    /// Largest deviation from `I` over boundary-triangle and hexagon
    /// products.
    pub fn max_residual(&self, cx: &TruncatedComplex) -> f64 {
        let id = Mat2::identity();
        let mut worst: f64 = 0.0;
        for t in 0..cx.tetrahedron_count() {
            let s = |v, a, b| self.short(ShortSlot { tet: t, v, a, b });
            for v in 0..4 {
                let [a, b, c] = others(v);
                worst = worst.max(s(v, a, b).mul(&s(v, b, c)).mul(&s(v, c, a)).distance(&id));
            }
            for d in 0..4 {
                let [u, v, w] = others(d);
                let h = self
                    .long(t, w, u)
                    .mul(&s(u, w, v))
                    .mul(&self.long(t, u, v))
                    .mul(&s(v, u, w))
                    .mul(&self.long(t, v, w))
                    .mul(&s(w, v, u));
                worst = worst.max(h.distance(&id));
            }
        }
        worst
    }
}

pub fn natural_cocycle(
    c: &PtolemyAssignment,
    sigma: &MultiplicativeCocycle,
    cx: &TruncatedComplex,
) -> NaturalCocycle {
    let params = short_edge_params(c, sigma, cx);
    let id = Mat2::identity();
    let zero = Complex64::new(0.0, 0.0);
    let mut long = vec![[[id; 4]; 4]; cx.tetrahedron_count()];
    let mut short = vec![[[[id; 4]; 4]; 4]; cx.tetrahedron_count()];
    for t in 0..cx.tetrahedron_count() {
        for a in 0..4 {
            for b in 0..4 {
                if a == b {
                    continue;
                }
                let x = c.oriented(cx, t, a, b);
                long[t][a][b] = Mat2([[zero, -x.inv()], [x, zero]]);
            }
        }
        for v in 0..4 {
            for a in others(v) {
                for b in others(v) {
                    if a == b {
                        continue;
                    }
                    let slot = ShortSlot { tet: t, v, a, b };
                    let s = sigma.slot(cx, slot);
                    short[t][v][a][b] = Mat2([[s, params.get(slot)], [zero, s.inv()]]);
                }
            }
        }
    }
    NaturalCocycle { long, short }
}

/// Outcome of [`check_filling_representation`].
#[derive(Clone, Debug, PartialEq)]
pub struct FillingCheck {
    pub passed: bool,
    /// Per cusp: distance of `ρ(μ^r λ^s)` from `±I`, or of the traces of
    /// `ρ(μ)`, `ρ(λ)` from `±2` for unfilled cusps.
    pub residuals: Vec<f64>,
}

pub const FILLING_TOL: f64 = 1e-8;

pub fn check_filling_representation(
    c: &PtolemyAssignment,
    sigma: &MultiplicativeCocycle,
    cx: &TruncatedComplex,
    filling: &FillingVector,
) -> FillingCheck {
    let phi = natural_cocycle(c, sigma, cx);
    let id = Mat2::identity();
    let residuals: Vec<f64> = cx
        .cusps()
        .iter()
        .enumerate()
        .map(|(j, cusp)| {
            let hm = phi.holonomy(cx, &cusp.meridian);
            let hl = phi.holonomy(cx, &cusp.longitude);
            match filling.0.get(j) {
                Some(&Filling::Filled(r, s)) => {
                    let p = cx.tail(cusp.meridian[0]);
                    let q = cx.tail(cusp.longitude[0]);
                    let w = phi.holonomy(cx, &cx.tree(j).path_between(cx, p, q));
                    let hl = w.mul(&hl).mul(&w.inv_sl2());
                    let h = hm.pow(r).mul(&hl.pow(s));
                    h.distance(&id).min(h.distance(&id.scale(-1.0)))
                }
                _ => {
                    let off = |m: Mat2| (m.trace() - 2.0).norm().min((m.trace() + 2.0).norm());
                    off(hm).max(off(hl))
                }
            }
        })
        .collect();
    let passed = residuals.iter().all(|r| *r < FILLING_TOL);
    FillingCheck { passed, residuals }
}

/// Shape parameters `z`, `z' = 1/(1-z)`, `z'' = 1 - 1/z` of one tetrahedron,
/// relative to its vertex ordering: `z` sits on edges 01 and 23, `z'` on 03
/// and 12, `z''` on 02 and 13.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shapes {
    pub z: Complex64,
    pub zp: Complex64,
    pub zpp: Complex64,
}

impl Shapes {
    pub fn new(z: Complex64) -> Shapes {
        let one = Complex64::new(1.0, 0.0);
        Shapes {
            z,
            zp: (one - z).inv(),
            zpp: one - z.inv(),
        }
    }

    /// The parameter attached to tetrahedron edge `ab`.
    pub fn at_edge(&self, a: usize, b: usize) -> Complex64 {
        match crate::complex::edge_index(a, b) {
            0 | 5 => self.z,
            2 | 3 => self.zp,
            _ => self.zpp,
        }
    }

    /// Geometric shape: `z` for positively and `1/z` for negatively
    /// oriented tetrahedra.
    pub fn oriented(&self, eps: i8) -> Complex64 {
        if eps > 0 {
            self.z
        } else {
            self.z.inv()
        }
    }
}

/// `z = K2 c03 c12 / (c02 c13)` per tetrahedron.
pub fn cross_ratios(
    c: &PtolemyAssignment,
    sigma: &MultiplicativeCocycle,
    cx: &TruncatedComplex,
) -> Result<Vec<Shapes>> {
    (0..cx.tetrahedron_count())
        .map(|t| {
            let k2: Complex64 = coefficient_slots(t)[1]
                .iter()
                .map(|&s| sigma.slot(cx, s))
                .product();
            let cl = |a, b| c.oriented(cx, t, a, b);
            let z = k2 * cl(0, 3) * cl(1, 2) / (cl(0, 2) * cl(1, 3));
            if !z.is_finite() || z.norm() < DEGENERATE_TOL || (z - 1.0).norm() < DEGENERATE_TOL {
                return Err(Error::Degenerate(t));
            }
            Ok(Shapes::new(z))
        })
        .collect()
}

/// `max |Π z(e)^ε - 1|` over the long-edge classes.
pub fn gluing_check(shapes: &[Shapes], cx: &TruncatedComplex) -> f64 {
    cx.classes()
        .iter()
        .map(|class| {
            let p = class
                .members
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, m| {
                    let z = shapes[m.tet].at_edge(m.a, m.b);
                    if cx.orientation(m.tet) > 0 {
                        acc * z
                    } else {
                        acc / z
                    }
                });
            (p - 1.0).norm()
        })
        .fold(0.0, f64::max)
}

/// The Ptolemy relations with σ-monomial coefficients in `(M_j, L_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametricSystem {
    pub equations: Vec<EquationShape>,
    pub coefficients: Vec<[Monomial; 2]>,
    pub class_count: usize,
    pub gauge: Vec<usize>,
}

pub fn build_parametric(cx: &TruncatedComplex, sigma: &[Monomial]) -> Result<ParametricSystem> {
    if sigma.len() != cx.short_edge_count() {
        return Err(Error::Malformed(
            "sigma monomials do not cover the short edges".into(),
        ));
    }
    let h = cx.cusp_count();
    let value = |s: ShortSlot| {
        let e = cx.short_ref(s);
        if e.forward {
            sigma[e.edge].clone()
        } else {
            sigma[e.edge].inv()
        }
    };
    let mut equations = Vec::new();
    let mut coefficients = Vec::new();
    for t in 0..cx.tetrahedron_count() {
        equations.push(EquationShape::new(cx, t));
        coefficients.push(coefficient_slots(t).map(|slots| {
            slots
                .iter()
                .fold(Monomial::one(h), |acc, &s| acc.mul(&value(s)))
        }));
    }
    Ok(ParametricSystem {
        equations,
        coefficients,
        class_count: cx.classes().len(),
        gauge: gauge_classes(cx),
    })
}

impl ParametricSystem {
    /// Residuals and Jacobian in `(c_free, m_j, l_j)` at class values `c`
    /// and logarithmic holonomy `logs`.
    pub(crate) fn eval(
        &self,
        c: &[Complex64],
        logs: &[(Complex64, Complex64)],
        free: &[usize],
        log_vars: &[usize],
    ) -> (Vec<Complex64>, Vec<Vec<Complex64>>) {
        let mut f = Vec::with_capacity(self.equations.len());
        let mut jac = Vec::with_capacity(self.equations.len());
        for (e, k) in self.equations.iter().zip(&self.coefficients) {
            let kv = [k[0].eval_log(logs), k[1].eval_log(logs)];
            f.push(e.residual(kv, c));
            let mut row: Vec<Complex64> = free
                .iter()
                .map(|&var| {
                    e.product_derivative(0, c, var)
                        - kv[0] * e.product_derivative(1, c, var)
                        - kv[1] * e.product_derivative(2, c, var)
                })
                .collect();
            let (p1, p2) = (e.product(1, c), e.product(2, c));
            for &j in log_vars {
                let dm = -(kv[0] * p1 * k[0].exps[j].0 as f64 + kv[1] * p2 * k[1].exps[j].0 as f64);
                let dl = -(kv[0] * p1 * k[0].exps[j].1 as f64 + kv[1] * p2 * k[1].exps[j].1 as f64);
                row.push(dm);
                row.push(dl);
            }
            jac.push(row);
        }
        (f, jac)
    }

    pub fn free_classes(&self) -> Vec<usize> {
        (0..self.class_count)
            .filter(|k| !self.gauge.contains(k))
            .collect()
    }
}
