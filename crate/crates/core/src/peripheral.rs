//! Dehn-filling data: filling vectors, the joint solve for boundary holonomy
//! and Ptolemy coordinates, geometric candidate selection, and the exact
//! resultant path for one-variable reduced systems.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cocycle::{branch_index, sigma_monomials, MultiplicativeCocycle, HOLONOMY_TOL};
use crate::complex::TruncatedComplex;
use crate::dilog::{log, volume_bw};
use crate::monomial::Monomial;
use crate::ptolemy::{
    build_parametric, build_system, check_filling_representation, close, cross_ratios, newton,
    random_point, rounded_key, start_rng, PtolemyAssignment, Shapes, DEDUP_TOL,
};
use crate::{pi_i, Error, Result, PI};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Filling {
    Unfilled,
    Filled(i64, i64),
}

impl Filling {
    pub fn filled(r: i64, s: i64) -> Result<Filling> {
        if gcd(r, s) != 1 {
            return Err(Error::NotCoprime { r, s });
        }
        Ok(Filling::Filled(r, s))
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Filling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filling::Unfilled => write!(f, "inf"),
            Filling::Filled(r, s) => write!(f, "{r}/{s}"),
        }
    }
}

/// One [`Filling`] per cusp.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FillingVector(pub Vec<Filling>);

impl FillingVector {
    pub fn unfilled(cusps: usize) -> Self {
        FillingVector(vec![Filling::Unfilled; cusps])
    }
}

impl FromStr for FillingVector {
    type Err = Error;

    /// Comma-separated `r/s` or `inf` per cusp.
    fn from_str(s: &str) -> Result<Self> {
        let parse_one = |p: &str| -> Result<Filling> {
            let p = p.trim();
            if p == "inf" || p == "∞" {
                return Ok(Filling::Unfilled);
            }
            let (r, s) = p
                .split_once('/')
                .ok_or_else(|| Error::Filling(format!("expected r/s or inf, got {p:?}")))?;
            let num = |x: &str| {
                x.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Filling(format!("bad integer in {p:?}")))
            };
            Filling::filled(num(r)?, num(s)?)
        };
        s.split(',')
            .map(parse_one)
            .collect::<Result<Vec<_>>>()
            .map(FillingVector)
    }
}

impl fmt::Display for FillingVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// A solution of the augmented system.
#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyCandidate {
    /// `(M_j, L_j)` per cusp.
    pub targets: Vec<(Complex64, Complex64)>,
    pub sigma: MultiplicativeCocycle,
    pub assignment: PtolemyAssignment,
    /// Branch integer per filled cusp.
    pub k: Vec<Option<i64>>,
    pub shapes: Vec<Shapes>,
    /// `Σ ε_j D(z_j)`.
    pub volume: f64,
    pub ptolemy_residual: f64,
    pub filling_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FillingOptions {
    pub k_range: (i64, i64),
    pub starts: usize,
    pub seed: u64,
    pub tol: f64,
    /// Start every run from these `(M_j, L_j)` instead of random holonomy.
    pub initial: Option<Vec<(Complex64, Complex64)>>,
}

impl Default for FillingOptions {
    fn default() -> Self {
        FillingOptions {
            k_range: (-8, 8),
            starts: crate::ptolemy::DEFAULT_STARTS,
            seed: 0,
            tol: crate::ptolemy::DEFAULT_TOL,
            initial: None,
        }
    }
}

/// Newton solve of the Ptolemy equations with σ-monomial coefficients,
/// jointly with `r m + s l = 2πik` on filled cusps and `M, L = ±1` on
/// unfilled ones.
pub fn solve_filling(
    cx: &TruncatedComplex,
    filling: &FillingVector,
    opts: &FillingOptions,
) -> Result<Vec<HolonomyCandidate>> {
    let h = cx.cusp_count();
    if filling.0.len() != h {
        return Err(Error::Filling(format!(
            "{} entries for {} cusps",
            filling.0.len(),
            h
        )));
    }
    if let Some(init) = &opts.initial {
        if init.len() != h {
            return Err(Error::Filling(format!(
                "{} holonomy seeds for {} cusps",
                init.len(),
                h
            )));
        }
    }
    let monomials = sigma_monomials(cx);
    let system = build_parametric(cx, &monomials)?;
    let free = system.free_classes();
    let filled: Vec<usize> = (0..h)
        .filter(|&j| matches!(filling.0[j], Filling::Filled(..)))
        .collect();
    let unfilled: Vec<usize> = (0..h)
        .filter(|&j| filling.0[j] == Filling::Unfilled)
        .collect();

    // Sign lifts of unfilled cusps and branch indices of filled ones.
    let mut lift_sets: Vec<Vec<(Complex64, Complex64)>> =
        vec![vec![
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            h
        ]];
    for &j in &unfilled {
        let mut next = Vec::new();
        for base in &lift_sets {
            for (a, b) in [(0.0, 0.0), (0.0, PI), (PI, 0.0), (PI, PI)] {
                let mut l = base.clone();
                l[j] = (Complex64::new(0.0, a), Complex64::new(0.0, b));
                next.push(l);
            }
        }
        lift_sets = next;
    }
    let mut k_sets: Vec<Vec<i64>> = vec![vec![]];
    for _ in &filled {
        k_sets = k_sets
            .into_iter()
            .flat_map(|ks| {
                (opts.k_range.0..=opts.k_range.1).map(move |k| [ks.clone(), vec![k]].concat())
            })
            .collect();
    }
    let mut jobs = Vec::new();
    for lifts in &lift_sets {
        for ks in &k_sets {
            for start in 0..opts.starts {
                jobs.push((lifts.clone(), ks.clone(), start));
            }
        }
    }

    let solutions: Vec<(Vec<Complex64>, Vec<(Complex64, Complex64)>)> = jobs
        .par_iter()
        .enumerate()
        .filter_map(|(job, (lifts, ks, _))| {
            let mut rng = start_rng(opts.seed, job as u64);
            let mut x: Vec<Complex64> = free.iter().map(|_| random_point(&mut rng)).collect();
            for &j in &filled {
                let (m, l) = match &opts.initial {
                    Some(init) => (log(init[j].0), log(init[j].1)),
                    None => (log(random_point(&mut rng)), log(random_point(&mut rng))),
                };
                x.push(m);
                x.push(l);
            }
            let unpack = |x: &[Complex64]| {
                let mut c = vec![Complex64::new(1.0, 0.0); system.class_count];
                for (&k, &v) in free.iter().zip(x) {
                    c[k] = v;
                }
                let mut logs = lifts.clone();
                for (i, &j) in filled.iter().enumerate() {
                    logs[j] = (x[free.len() + 2 * i], x[free.len() + 2 * i + 1]);
                }
                (c, logs)
            };
            let eval = |x: &[Complex64]| {
                let (c, logs) = unpack(x);
                if logs
                    .iter()
                    .any(|(m, l)| m.re.abs() > 50.0 || l.re.abs() > 50.0)
                {
                    return None;
                }
                let (mut f, mut jac) = system.eval(&c, &logs, &free, &filled);
                for (i, &j) in filled.iter().enumerate() {
                    let Filling::Filled(r, s) = filling.0[j] else {
                        unreachable!()
                    };
                    let (m, l) = logs[j];
                    f.push(m * r as f64 + l * s as f64 - pi_i() * 2.0 * ks[i] as f64);
                    let mut row = vec![Complex64::new(0.0, 0.0); x.len()];
                    row[free.len() + 2 * i] = Complex64::new(r as f64, 0.0);
                    row[free.len() + 2 * i + 1] = Complex64::new(s as f64, 0.0);
                    jac.push(row);
                }
                f.iter().all(|v| v.is_finite()).then_some((f, jac))
            };
            let x = newton(eval, x, opts.tol)?;
            let (c, logs) = unpack(&x);
            c.iter().all(|z| z.norm() > DEDUP_TOL).then_some((c, logs))
        })
        .collect();

    let mut candidates: Vec<HolonomyCandidate> = Vec::new();
    for (c, logs) in solutions {
        let targets: Vec<(Complex64, Complex64)> =
            logs.iter().map(|(m, l)| (m.exp(), l.exp())).collect();
        let Ok(candidate) = make_candidate(cx, filling, &monomials, targets, c) else {
            continue;
        };
        let dup = candidates.iter().any(|o| {
            let flat = |t: &[(Complex64, Complex64)]| {
                t.iter().flat_map(|&(m, l)| [m, l]).collect::<Vec<_>>()
            };
            let shapes = |s: &[Shapes]| s.iter().map(|x| x.z).collect::<Vec<_>>();
            close(&flat(&o.targets), &flat(&candidate.targets), DEDUP_TOL)
                && close(&shapes(&o.shapes), &shapes(&candidate.shapes), DEDUP_TOL)
        });
        if !dup {
            candidates.push(candidate);
        }
    }
    if candidates.is_empty() {
        return Err(Error::NoSolution);
    }
    candidates.sort_by_key(|c| {
        let mut key = rounded_key(
            &c.targets
                .iter()
                .flat_map(|&(m, l)| [m, l])
                .collect::<Vec<_>>(),
        );
        key.extend(rounded_key(
            &c.shapes.iter().map(|s| s.z).collect::<Vec<_>>(),
        ));
        key
    });
    Ok(candidates)
}

/// Builds and vets a candidate; degenerate or non-filling solutions are
/// rejected.
fn make_candidate(
    cx: &TruncatedComplex,
    filling: &FillingVector,
    monomials: &[Monomial],
    targets: Vec<(Complex64, Complex64)>,
    c: Vec<Complex64>,
) -> Result<HolonomyCandidate> {
    let sigma = MultiplicativeCocycle::from_values(
        monomials.iter().map(|m| m.eval(&targets)).collect(),
        targets.clone(),
    );
    let assignment = PtolemyAssignment { values: c };
    let system = build_system(cx, &sigma)?;
    let ptolemy_residual = system.max_residual(&assignment);
    let shapes = cross_ratios(&assignment, &sigma, cx)?;
    let check = check_filling_representation(&assignment, &sigma, cx, filling);
    if !check.passed {
        return Err(Error::Holonomy {
            cusp: 0,
            reason: "representation does not factor through the filling".into(),
        });
    }
    let mut k = Vec::with_capacity(targets.len());
    for (j, &(m, l)) in targets.iter().enumerate() {
        k.push(match filling.0[j] {
            Filling::Filled(r, s) => {
                let kj = branch_index(m, l, r, s)
                    .map_err(|reason| Error::Holonomy { cusp: j, reason })?;
                if (m.powi(r as i32) * l.powi(s as i32) - 1.0).norm() > HOLONOMY_TOL {
                    return Err(Error::Holonomy {
                        cusp: j,
                        reason: "M^r L^s != 1".into(),
                    });
                }
                Some(kj)
            }
            Filling::Unfilled => None,
        });
    }
    let eps: Vec<(Complex64, i8)> = shapes
        .iter()
        .enumerate()
        .map(|(t, s)| (s.z, cx.orientation(t)))
        .collect();
    let volume = volume_bw(&eps)?;
    let filling_residual = check.residuals.iter().cloned().fold(0.0, f64::max);
    Ok(HolonomyCandidate {
        targets,
        sigma,
        assignment,
        k,
        shapes,
        volume,
        ptolemy_residual,
        filling_residual,
    })
}

/// Volumes closer than this are treated as tied.
pub const VOLUME_TIE: f64 = 1e-9;

fn tie_key(c: &HolonomyCandidate) -> Vec<i64> {
    let r = |x: f64| (x * 1e9).round() as i64;
    let mut key = Vec::new();
    for &(m, _) in &c.targets {
        key.extend([r(m.norm()), -r(m.re), -r(m.im)]);
    }
    for &(_, l) in &c.targets {
        key.extend([r(l.norm()), -r(l.re), -r(l.im)]);
    }
    for s in &c.shapes {
        key.extend([r(s.z.re), r(s.z.im)]);
    }
    key
}

/// Maximum-volume candidate; near-ties go to the smallest `|M|`, then the
/// largest `Re M`, then the largest `Im M`.
pub fn select_geometric(candidates: &[HolonomyCandidate]) -> Result<&HolonomyCandidate> {
    let best = candidates
        .iter()
        .map(|c| c.volume)
        .fold(f64::NEG_INFINITY, f64::max);
    candidates
        .iter()
        .filter(|c| c.volume >= best - VOLUME_TIE)
        .min_by(|a, b| {
            tie_key(a)
                .cmp(&tie_key(b))
                .then(b.volume.partial_cmp(&a.volume).unwrap_or(Ordering::Equal))
        })
        .ok_or(Error::Empty)
}

/// Integer Laurent polynomial in `M`, `L`, keyed by `(deg_M, deg_L)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPoly(pub BTreeMap<(i32, i32), i64>);

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn constant(c: i64) -> Self {
        LaurentPoly::term(c, 0, 0)
    }

    pub fn term(c: i64, m: i32, l: i32) -> Self {
        let mut p = LaurentPoly::zero();
        p.add_term(c, m, l);
        p
    }

    pub fn from_monomial(m: &Monomial) -> Self {
        let (a, b) = m.exps.first().copied().unwrap_or((0, 0));
        LaurentPoly::term(if m.negative { -1 } else { 1 }, a, b)
    }

    fn add_term(&mut self, c: i64, m: i32, l: i32) {
        if c == 0 {
            return;
        }
        let e = self.0.entry((m, l)).or_insert(0);
        *e += c;
        if *e == 0 {
            self.0.remove(&(m, l));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut p = self.clone();
        for (&(m, l), &c) in &o.0 {
            p.add_term(c, m, l);
        }
        p
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly(self.0.iter().map(|(&k, &c)| (k, -c)).collect())
    }

    pub fn sub(&self, o: &LaurentPoly) -> LaurentPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (&(m1, l1), &c1) in &self.0 {
            for (&(m2, l2), &c2) in &o.0 {
                p.add_term(c1 * c2, m1 + m2, l1 + l2);
            }
        }
        p
    }

    /// Multiplies by the monomial making all exponents non-negative with a
    /// zero minimum in each variable, and fixes the sign so that the term
    /// with the smallest `(deg_M, deg_L)` is positive.
    pub fn normalized(&self) -> LaurentPoly {
        let Some(mm) = self.0.keys().map(|k| k.0).min() else {
            return self.clone();
        };
        let ml = self.0.keys().map(|k| k.1).min().unwrap();
        let sign = if self.0.values().next().copied().unwrap_or(1) < 0 {
            -1
        } else {
            1
        };
        LaurentPoly(
            self.0
                .iter()
                .map(|(&(m, l), &c)| ((m - mm, l - ml), sign * c))
                .collect(),
        )
    }

    /// Substitutes `M = 1`, giving coefficients of `L^0, L^1, ...` after
    /// clearing negative powers.
    pub fn at_m_equals_one(&self) -> Vec<i64> {
        let mut by_l: BTreeMap<i32, i64> = BTreeMap::new();
        for (&(_, l), &c) in &self.0 {
            *by_l.entry(l).or_insert(0) += c;
        }
        by_l.retain(|_, c| *c != 0);
        let Some(lo) = by_l.keys().next().copied() else {
            return vec![];
        };
        let hi = *by_l.keys().last().unwrap();
        (lo..=hi)
            .map(|l| by_l.get(&l).copied().unwrap_or(0))
            .collect()
    }

    pub fn eval(&self, m: Complex64, l: Complex64) -> Complex64 {
        self.0
            .iter()
            .map(|(&(a, b), &c)| m.powi(a) * l.powi(b) * c as f64)
            .sum()
    }
}

fn monomial_text(m: i32, l: i32) -> String {
    let mut parts = Vec::new();
    for (name, e) in [("L", l), ("M", m)] {
        match e {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (&(m, l), &c)) in self.0.iter().enumerate() {
            let mono = monomial_text(m, l);
            let mag = c.unsigned_abs();
            let body = match (mono.is_empty(), mag) {
                (true, _) => mag.to_string(),
                (false, 1) => mono,
                (false, _) => format!("{mag}*{mono}"),
            };
            match (i, c < 0) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

/// `a z² + b z + c` with Laurent-polynomial coefficients `[a, b, c]`.
pub type Quadratic = [LaurentPoly; 3];

/// Sylvester resultant of two quadratics, expanded exactly.
pub fn resultant_quadratics(f: &Quadratic, g: &Quadratic) -> Result<LaurentPoly> {
    if f[0].is_zero() || g[0].is_zero() {
        return Err(Error::Resultant(
            "leading coefficient is identically zero".into(),
        ));
    }
    let z = LaurentPoly::zero();
    let m = [
        [f[0].clone(), f[1].clone(), f[2].clone(), z.clone()],
        [z.clone(), f[0].clone(), f[1].clone(), f[2].clone()],
        [g[0].clone(), g[1].clone(), g[2].clone(), z.clone()],
        [z.clone(), g[0].clone(), g[1].clone(), g[2].clone()],
    ];
    let mut det = LaurentPoly::zero();
    for p in permutations4() {
        let mut inversions = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if p[i] > p[j] {
                    inversions += 1;
                }
            }
        }
        let term = (0..4).fold(LaurentPoly::constant(1), |acc, i| acc.mul(&m[i][p[i]]));
        det = if inversions % 2 == 0 {
            det.add(&term)
        } else {
            det.sub(&term)
        };
    }
    Ok(det)
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|x| p.contains(&x)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// The two Ptolemy relations of a two-tetrahedron one-cusp triangulation as
/// quadratics in the reduced variable `z = c(free class)` with the gauge
/// class set to 1.
pub fn reduced_quadratics(cx: &TruncatedComplex) -> Result<[Quadratic; 2]> {
    if cx.tetrahedron_count() != 2 || cx.cusp_count() != 1 || cx.classes().len() != 2 {
        return Err(Error::Unsupported(format!(
            "need 2 tetrahedra, 1 cusp and 2 edge classes, got {}, {} and {}",
            cx.tetrahedron_count(),
            cx.cusp_count(),
            cx.classes().len()
        )));
    }
    let system = build_parametric(cx, &sigma_monomials(cx))?;
    let free = system.free_classes()[0];
    let mut out: Vec<Quadratic> = Vec::new();
    for (e, k) in system.equations.iter().zip(&system.coefficients) {
        let mut q: Quadratic = [
            LaurentPoly::zero(),
            LaurentPoly::zero(),
            LaurentPoly::zero(),
        ];
        let coeffs = [
            LaurentPoly::constant(1),
            LaurentPoly::from_monomial(&k[0]).neg(),
            LaurentPoly::from_monomial(&k[1]).neg(),
        ];
        for (p, coeff) in e.products.iter().zip(coeffs) {
            let deg = p.iter().filter(|v| v.0 == free).count();
            let sign = (p[0].1 * p[1].1) as i64;
            q[2 - deg] = q[2 - deg].add(&coeff.mul(&LaurentPoly::constant(sign)));
        }
        out.push(q);
    }
    let [f, g]: [Quadratic; 2] = out.try_into().expect("two equations");
    Ok([f, g])
}

/// The eliminant of the reduced variable, normalized.
pub fn a_polynomial(cx: &TruncatedComplex) -> Result<LaurentPoly> {
    let [f, g] = reduced_quadratics(cx)?;
    Ok(resultant_quadratics(&f, &g)?.normalized())
}

/// Factors a univariate integer polynomial (coefficients of `L^0, L^1, ...`)
/// over its integer roots, e.g. `-(1+L)^2`.
pub fn factor_hint(coeffs: &[i64]) -> String {
    let mut poly: Vec<i64> = coeffs.to_vec();
    while poly.last() == Some(&0) {
        poly.pop();
    }
    if poly.is_empty() {
        return "0".into();
    }
    let mut shift = 0;
    while poly[0] == 0 {
        poly.remove(0);
        shift += 1;
    }
    let mut factors: Vec<(i64, u32)> = Vec::new();
    let divisors = |n: i64| -> Vec<i64> {
        let n = n.abs();
        (1..=n)
            .filter(|d| n % d == 0)
            .flat_map(|d| [d, -d])
            .collect()
    };
    for root in divisors(poly[0]) {
        let mut mult = 0;
        while poly.len() > 1 {
            // synthetic division by (L - root)
            let n = poly.len() - 1;
            let mut q = vec![0i64; n];
            let mut carry = 0i64;
            for i in (0..=n).rev() {
                let v = poly[i] + carry;
                if i == 0 {
                    carry = v;
                } else {
                    q[i - 1] = v;
                    carry = v * root;
                }
            }
            if carry != 0 {
                break;
            }
            poly = q;
            mult += 1;
        }
        if mult > 0 {
            factors.push((root, mult));
        }
    }
    let mut parts = Vec::new();
    let lead = if poly.len() == 1 { poly[0] } else { 1 };
    if shift > 0 {
        parts.push(if shift == 1 {
            "L".to_string()
        } else {
            format!("L^{shift}")
        });
    }
    for (root, mult) in factors {
        let lin = match -root {
            c if c > 0 => format!("({c}+L)"),
            c => format!("({c}+L)").replace("+L)", "+L)"),
        };
        parts.push(if mult == 1 {
            lin
        } else {
            format!("{lin}^{mult}")
        });
    }
    if poly.len() > 1 {
        let rest = LaurentPoly(
            poly.iter()
                .enumerate()
                .map(|(i, &c)| ((0, i as i32), c))
                .filter(|(_, c)| *c != 0)
                .collect(),
        );
        parts.push(format!("({rest})"));
    }
    let body = parts.join("*");
    match lead {
        1 => body,
        -1 => format!("-{body}"),
        c => format!("{c}*{body}"),
    }
}
