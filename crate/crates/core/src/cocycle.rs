//! Boundary cocycles: multiplicative σ, additive log-cocycles `a`, and the
//! peripheral log data `b`.

use num_complex::Complex64;

use crate::complex::{ShortEdgeRef, ShortSlot, SpanningTree, TruncatedComplex};
use crate::dilog::log;
use crate::monomial::Monomial;
use crate::peripheral::{Filling, FillingVector};
use crate::{pi_i, Error, Result, PI};

/// Holonomy constraint and `k`-integrality tolerance.
pub const HOLONOMY_TOL: f64 = 1e-8;
/// Tolerance for `(a(e) - log σ(e)) / πi` being an integer.
pub const CONGRUENCE_TOL: f64 = 1e-9;

/// `σ ∈ Z¹(∂N; ℂˣ)`, stored on forward-oriented short edges.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicativeCocycle {
    values: Vec<Complex64>,
    targets: Vec<(Complex64, Complex64)>,
}

impl MultiplicativeCocycle {
    /// Wraps raw values; the caller is responsible for the cocycle condition.
    pub fn from_values(values: Vec<Complex64>, targets: Vec<(Complex64, Complex64)>) -> Self {
        MultiplicativeCocycle { values, targets }
    }

    pub fn value(&self, e: ShortEdgeRef) -> Complex64 {
        let v = self.values[e.edge];
        if e.forward {
            v
        } else {
            v.inv()
        }
    }

    pub fn slot(&self, cx: &TruncatedComplex, s: ShortSlot) -> Complex64 {
        self.value(cx.short_ref(s))
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `(M_j, L_j)` per cusp.
    pub fn targets(&self) -> &[(Complex64, Complex64)] {
        &self.targets
    }

    /// Largest `|σ(∂T) - 1|` over the boundary triangles.
    pub fn triangle_residual(&self, cx: &TruncatedComplex) -> f64 {
        let mut worst: f64 = 0.0;
        for t in 0..cx.tetrahedron_count() {
            for v in 0..4 {
                let p = cx
                    .triangle_cycle(t, v)
                    .iter()
                    .fold(Complex64::new(1.0, 0.0), |acc, &e| acc * self.value(e));
                worst = worst.max((p - 1.0).norm());
            }
        }
        worst
    }
}

/// An element of `𝔸`: additive values on forward-oriented short edges.
#[derive(Clone, Debug, PartialEq)]
pub struct LogCocycle {
    values: Vec<Complex64>,
}

impl LogCocycle {
    pub fn from_values(values: Vec<Complex64>) -> Self {
        LogCocycle { values }
    }

    pub fn value(&self, e: ShortEdgeRef) -> Complex64 {
        let v = self.values[e.edge];
        if e.forward {
            v
        } else {
            -v
        }
    }

    pub fn slot(&self, cx: &TruncatedComplex, s: ShortSlot) -> Complex64 {
        self.value(cx.short_ref(s))
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Checks the triangle sums and the congruence with `log σ`; returns the
    /// largest triangle-sum residual.
    pub fn validate(&self, sigma: &MultiplicativeCocycle, cx: &TruncatedComplex) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for t in 0..cx.tetrahedron_count() {
            for v in 0..4 {
                let s: Complex64 = cx.triangle_cycle(t, v).iter().map(|&e| self.value(e)).sum();
                worst = worst.max(s.norm());
            }
        }
        for (i, (&a, &s)) in self.values.iter().zip(sigma.values()).enumerate() {
            let r = congruence_defect(a, s);
            if r > CONGRUENCE_TOL {
                return Err(Error::Incongruent(format!(
                    "short edge {} off by {r:.3e}",
                    i + 1
                )));
            }
        }
        Ok(worst)
    }

    /// `ι(a)`: the periods along `(μ_j, λ_j)`.
    pub fn iota(&self, cx: &TruncatedComplex) -> Vec<(Complex64, Complex64)> {
        cx.cusps()
            .iter()
            .map(|c| {
                let sum = |p: &[ShortEdgeRef]| p.iter().map(|&e| self.value(e)).sum::<Complex64>();
                (sum(&c.meridian), sum(&c.longitude))
            })
            .collect()
    }

    /// `a^θ(e) = a(e) - θ(tail) + θ(head)`.
    pub fn act_theta(&self, cx: &TruncatedComplex, theta: &[Complex64]) -> LogCocycle {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let e = &cx.short_edges()[i];
                a - theta[e.tail] + theta[e.head]
            })
            .collect();
        LogCocycle { values }
    }
}

/// Distance of `(a - log s)/(πi)` from the nearest integer.
pub fn congruence_defect(a: Complex64, s: Complex64) -> f64 {
    let k = (a - log(s)) / pi_i();
    (k - Complex64::new(k.re.round(), 0.0)).norm()
}

/// Per-cusp `b(μ) = log M + uπi`, `b(λ) = log L + vπi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeripheralLogEntry {
    pub u: i64,
    pub v: i64,
    pub mu: Complex64,
    pub lambda: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeripheralLog {
    pub entries: Vec<PeripheralLogEntry>,
}

impl PeripheralLog {
    pub fn from_uv(targets: &[(Complex64, Complex64)], uv: &[(i64, i64)]) -> Self {
        let entries = targets
            .iter()
            .zip(uv)
            .map(|(&(m, l), &(u, v))| PeripheralLogEntry {
                u,
                v,
                mu: log(m) + pi_i() * u as f64,
                lambda: log(l) + pi_i() * v as f64,
            })
            .collect();
        PeripheralLog { entries }
    }

    pub fn uv(&self) -> Vec<(i64, i64)> {
        self.entries.iter().map(|e| (e.u, e.v)).collect()
    }

    /// `b_j` on a class `x μ + y λ`.
    pub fn on_class(&self, cusp: usize, (x, y): (i64, i64)) -> Complex64 {
        let e = &self.entries[cusp];
        e.mu * x as f64 + e.lambda * y as f64
    }
}

/// Cochains that can be evaluated along closed edge-paths.
pub trait Cochain {
    /// Product (multiplicative) or sum (additive) of the values along a closed
    /// path on `cusp`.
    fn induced_hom(
        &self,
        cx: &TruncatedComplex,
        cusp: usize,
        path: &[ShortEdgeRef],
    ) -> Result<Complex64>;
}

impl Cochain for MultiplicativeCocycle {
    fn induced_hom(
        &self,
        cx: &TruncatedComplex,
        cusp: usize,
        path: &[ShortEdgeRef],
    ) -> Result<Complex64> {
        cx.check_closed(cusp, path)?;
        Ok(path
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, &e| acc * self.value(e)))
    }
}

impl Cochain for LogCocycle {
    fn induced_hom(
        &self,
        cx: &TruncatedComplex,
        cusp: usize,
        path: &[ShortEdgeRef],
    ) -> Result<Complex64> {
        cx.check_closed(cusp, path)?;
        Ok(path.iter().map(|&e| self.value(e)).sum())
    }
}

/// σ as monomials in `(M_j, L_j)`: the complex's template if present,
/// otherwise the fundamental-cycle construction.
pub fn sigma_monomials(cx: &TruncatedComplex) -> Vec<Monomial> {
    match cx.sigma_template() {
        Some(t) => t.to_vec(),
        None => coordinate_monomials(cx),
    }
}

/// Trivial on the spanning trees; each other edge carries the class of its
/// fundamental cycle.
pub fn coordinate_monomials(cx: &TruncatedComplex) -> Vec<Monomial> {
    let h = cx.cusp_count();
    cx.short_edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let (x, y) = cx.coordinates(i);
            let mut m = Monomial::one(h);
            m.exps[e.cusp] = (x as i32, y as i32);
            m
        })
        .collect()
}

fn check_targets(targets: &[(Complex64, Complex64)], cx: &TruncatedComplex) -> Result<()> {
    if targets.len() != cx.cusp_count() {
        return Err(Error::Malformed(format!(
            "{} holonomy targets for {} cusps",
            targets.len(),
            cx.cusp_count()
        )));
    }
    for (j, &(m, l)) in targets.iter().enumerate() {
        let ok = |z: Complex64| z.norm() > 0.0 && z.is_finite();
        if !ok(m) || !ok(l) {
            return Err(Error::ZeroTarget(j));
        }
    }
    Ok(())
}

fn evaluate(
    cx: &TruncatedComplex,
    monomials: &[Monomial],
    targets: &[(Complex64, Complex64)],
) -> Result<MultiplicativeCocycle> {
    check_targets(targets, cx)?;
    let sigma = MultiplicativeCocycle {
        values: monomials.iter().map(|m| m.eval(targets)).collect(),
        targets: targets.to_vec(),
    };
    for (j, c) in cx.cusps().iter().enumerate() {
        let (m, l) = targets[j];
        let gm = sigma.induced_hom(cx, j, &c.meridian)?;
        let gl = sigma.induced_hom(cx, j, &c.longitude)?;
        if (gm - m).norm() > 1e-10 * m.norm().max(1.0)
            || (gl - l).norm() > 1e-10 * l.norm().max(1.0)
        {
            return Err(Error::Template(format!(
                "induced holonomy mismatch on cusp {j}"
            )));
        }
    }
    Ok(sigma)
}

/// σ with peripheral holonomy `(M_j, L_j)`.
pub fn sigma_from_holonomy(
    cx: &TruncatedComplex,
    targets: &[(Complex64, Complex64)],
) -> Result<MultiplicativeCocycle> {
    evaluate(cx, &sigma_monomials(cx), targets)
}

/// Like [`sigma_from_holonomy`] but always uses the fundamental-cycle
/// construction, ignoring any template.
pub fn sigma_fundamental(
    cx: &TruncatedComplex,
    targets: &[(Complex64, Complex64)],
) -> Result<MultiplicativeCocycle> {
    evaluate(cx, &coordinate_monomials(cx), targets)
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// All integer `(u, v)` with `r u + s v = n`, the one minimizing
/// `|u| + |v|` (ties: smaller `u`, then smaller `v`).
pub fn minimal_solution(r: i64, s: i64, n: i64) -> Result<(i64, i64)> {
    let (g, x, y) = ext_gcd(r, s);
    let (x, y) = if g < 0 { (-x, -y) } else { (x, y) };
    if g.abs() != 1 {
        return Err(Error::NotCoprime { r, s });
    }
    let (u0, v0) = (n * x, n * y);
    // u = u0 + s t, v = v0 - r t; the optimum sits next to a breakpoint.
    let mut ts = vec![0i64];
    for (num, den) in [(-u0, s), (v0, r)] {
        if den != 0 {
            let q = num.div_euclid(den);
            ts.extend([q - 1, q, q + 1, q + 2]);
        }
    }
    let best = ts
        .into_iter()
        .map(|t| (u0 + s * t, v0 - r * t))
        .min_by_key(|&(u, v)| (u.abs() + v.abs(), u, v))
        .unwrap();
    Ok(best)
}

/// Chooses `b` satisfying `b(μ^r λ^s) = 0` on filled cusps and
/// `b(μ) = b(λ) = 0` on unfilled ones.
pub fn select_b(
    sigma: &MultiplicativeCocycle,
    cx: &TruncatedComplex,
    filling: &FillingVector,
    uv_override: Option<&[(i64, i64)]>,
) -> Result<PeripheralLog> {
    let h = cx.cusp_count();
    if filling.0.len() != h {
        return Err(Error::Filling(format!(
            "{} entries for {} cusps",
            filling.0.len(),
            h
        )));
    }
    if let Some(o) = uv_override {
        if o.len() != h {
            return Err(Error::Filling(format!(
                "{} (u, v) overrides for {} cusps",
                o.len(),
                h
            )));
        }
    }
    let mut targets = Vec::with_capacity(h);
    let mut uv = Vec::with_capacity(h);
    for (j, c) in cx.cusps().iter().enumerate() {
        let m = sigma.induced_hom(cx, j, &c.meridian)?;
        let l = sigma.induced_hom(cx, j, &c.longitude)?;
        targets.push((m, l));
        let violated = |reason: String| Error::Holonomy { cusp: j, reason };
        let choice = match filling.0[j] {
            Filling::Unfilled => {
                let sign_lift = |z: Complex64| -> Option<i64> {
                    if (z - 1.0).norm() < HOLONOMY_TOL {
                        Some(0)
                    } else if (z + 1.0).norm() < HOLONOMY_TOL {
                        Some(-1)
                    } else {
                        None
                    }
                };
                let u = sign_lift(m).ok_or_else(|| violated(format!("M = {m} is not ±1")))?;
                let v = sign_lift(l).ok_or_else(|| violated(format!("L = {l} is not ±1")))?;
                if let Some(o) = uv_override {
                    if o[j] != (u, v) {
                        return Err(violated(format!("override {:?} does not give b = 0", o[j])));
                    }
                }
                (u, v)
            }
            Filling::Filled(r, s) => {
                let k = branch_index(m, l, r, s).map_err(violated)?;
                match uv_override {
                    Some(o) => {
                        let (u, v) = o[j];
                        if r * u + s * v != -2 * k {
                            return Err(violated(format!(
                                "override ({u}, {v}) violates {r}u + {s}v = {}",
                                -2 * k
                            )));
                        }
                        (u, v)
                    }
                    None => minimal_solution(r, s, -2 * k)?,
                }
            }
        };
        uv.push(choice);
    }
    Ok(PeripheralLog::from_uv(&targets, &uv))
}

/// `k = (r log M + s log L) / 2πi`, required to be an integer.
pub fn branch_index(
    m: Complex64,
    l: Complex64,
    r: i64,
    s: i64,
) -> std::result::Result<i64, String> {
    let w = (log(m) * r as f64 + log(l) * s as f64) / (pi_i() * 2.0);
    let k = w.re.round();
    if (w - k).norm() * 2.0 * PI > HOLONOMY_TOL {
        return Err(format!("M^{r} L^{s} != 1 (k = {w})"));
    }
    Ok(k as i64)
}

/// Lifts σ to `a ∈ 𝔸` with `ι(a) = b`, using the cached spanning trees.
pub fn lift_log_cocycle(
    sigma: &MultiplicativeCocycle,
    b: &PeripheralLog,
    cx: &TruncatedComplex,
) -> Result<LogCocycle> {
    let trees: Vec<&SpanningTree> = (0..cx.cusp_count()).map(|j| cx.tree(j)).collect();
    lift_log_cocycle_with_trees(sigma, b, cx, &trees)
}

pub fn lift_log_cocycle_with_trees(
    sigma: &MultiplicativeCocycle,
    b: &PeripheralLog,
    cx: &TruncatedComplex,
    trees: &[&SpanningTree],
) -> Result<LogCocycle> {
    for (j, c) in cx.cusps().iter().enumerate() {
        let e = &b.entries[j];
        let m = sigma.induced_hom(cx, j, &c.meridian)?;
        let l = sigma.induced_hom(cx, j, &c.longitude)?;
        if congruence_defect(e.mu, m) > CONGRUENCE_TOL
            || congruence_defect(e.lambda, l) > CONGRUENCE_TOL
        {
            return Err(Error::Incongruent(format!(
                "b on cusp {j} is not a logarithm of the holonomy"
            )));
        }
    }
    let mut values = vec![Complex64::new(0.0, 0.0); cx.short_edge_count()];
    let mut known = vec![false; cx.short_edge_count()];
    for (j, tree) in trees.iter().enumerate() {
        for &i in &tree.edges {
            debug_assert_eq!(cx.short_edges()[i].cusp, j);
            values[i] = log(sigma.values()[i]);
            known[i] = true;
        }
    }
    for i in 0..cx.short_edge_count() {
        if known[i] {
            continue;
        }
        let j = cx.short_edges()[i].cusp;
        let e = ShortEdgeRef {
            edge: i,
            forward: true,
        };
        let cycle = trees[j].fundamental_cycle(cx, e);
        let tree_part: Complex64 = cycle
            .iter()
            .filter(|x| x.edge != i)
            .map(|x| {
                if x.forward {
                    values[x.edge]
                } else {
                    -values[x.edge]
                }
            })
            .sum();
        let value = b.on_class(j, cx.homology_class(&cycle)) - tree_part;
        if congruence_defect(value, sigma.values()[i]) > CONGRUENCE_TOL {
            return Err(Error::Incongruent(format!(
                "lift of short edge {} is not a logarithm of σ",
                i + 1
            )));
        }
        values[i] = value;
    }
    Ok(LogCocycle { values })
}

/// Gauge action of `τ: cusp vertices → ℂˣ`.
pub trait GaugeAction: Sized {
    fn act_tau(&self, cx: &TruncatedComplex, tau: &[Complex64]) -> Result<Self>;
}

pub(crate) fn check_tau(tau: &[Complex64], cx: &TruncatedComplex) -> Result<()> {
    if tau.len() != cx.vertex_count() {
        return Err(Error::Malformed(format!(
            "{} gauge values for {} vertices",
            tau.len(),
            cx.vertex_count()
        )));
    }
    match tau.iter().position(|z| z.norm() == 0.0 || !z.is_finite()) {
        Some(v) => Err(Error::ZeroGauge(v)),
        None => Ok(()),
    }
}

impl GaugeAction for MultiplicativeCocycle {
    /// `σ^τ(e) = τ(tail)⁻¹ σ(e) τ(head)`.
    fn act_tau(&self, cx: &TruncatedComplex, tau: &[Complex64]) -> Result<Self> {
        check_tau(tau, cx)?;
        let values = self
            .values
            .iter()
            .zip(cx.short_edges())
            .map(|(&s, e)| s * tau[e.head] / tau[e.tail])
            .collect();
        Ok(MultiplicativeCocycle {
            values,
            targets: self.targets.clone(),
        })
    }
}
