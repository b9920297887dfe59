//! End-to-end volume computation for a filled (or unfilled) triangulation.

use num_complex::Complex64;
use serde::Serialize;

use crate::cocycle::{lift_log_cocycle, select_b, LogCocycle, PeripheralLog};
use crate::complex::TruncatedComplex;
use crate::dilog::{complex_volume, psi, Diagnostics, VolumeReport};
use crate::flattening::{
    build_flattenings, build_flattenings_unchecked, cusp_condition_check, edge_condition_check,
    peripheral_word, psi_independence_test, FlatteningSet,
};
use crate::peripheral::{
    select_geometric, solve_filling, Filling, FillingOptions, FillingVector, HolonomyCandidate,
};
use crate::ptolemy::gluing_check;
use crate::{pi_i, Error, Result};

pub const GLUING_TOL: f64 = 1e-10;
pub const EDGE_TOL: f64 = 1e-10;
pub const CUSP_TOL: f64 = 1e-9;
pub const FILLING_TOL: f64 = 1e-8;
pub const INDEPENDENCE_TOL: f64 = 1e-8;
pub const VOLUME_BW_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeConfig {
    pub filling: FillingVector,
    /// Pick the candidate nearest to these `(M_j, L_j)` instead of the one
    /// with the largest volume; also used as Newton seeds.
    pub holonomy: Option<Vec<(Complex64, Complex64)>>,
    pub uv: Option<Vec<(i64, i64)>>,
    pub options: FillingOptions,
    pub link_exterior: bool,
    /// Adds πi/2 to `a` on the first short edge before building flattenings.
    pub corrupt_a: bool,
    pub independence_trials: usize,
}

impl VolumeConfig {
    pub fn new(filling: FillingVector) -> Self {
        VolumeConfig {
            filling,
            holonomy: None,
            uv: None,
            options: FillingOptions::default(),
            link_exterior: false,
            corrupt_a: false,
            independence_trials: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &'static str, residual: f64, tol: f64) -> Check {
        Check {
            name,
            residual,
            tol,
            passed: residual.is_finite() && residual < tol,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VolumeOutcome {
    pub candidates: Vec<HolonomyCandidate>,
    pub selected: usize,
    pub b: PeripheralLog,
    pub a: LogCocycle,
    pub flattenings: FlatteningSet,
    pub report: VolumeReport,
    pub checks: Vec<Check>,
}

impl VolumeOutcome {
    pub fn selected(&self) -> &HolonomyCandidate {
        &self.candidates[self.selected]
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn nearest(candidates: &[HolonomyCandidate], targets: &[(Complex64, Complex64)]) -> Result<usize> {
    let dist = |c: &HolonomyCandidate| -> f64 {
        c.targets
            .iter()
            .zip(targets)
            .map(|(&(m, l), &(m0, l0))| (m - m0).norm() + (l - l0).norm())
            .sum()
    };
    (0..candidates.len())
        .min_by(|&i, &j| dist(&candidates[i]).total_cmp(&dist(&candidates[j])))
        .ok_or(Error::Empty)
}

pub fn run_volume(cx: &TruncatedComplex, cfg: &VolumeConfig) -> Result<VolumeOutcome> {
    let mut options = cfg.options.clone();
    if options.initial.is_none() {
        options.initial = cfg.holonomy.clone();
    }
    let candidates = solve_filling(cx, &cfg.filling, &options)?;
    let selected = match &cfg.holonomy {
        Some(t) => nearest(&candidates, t)?,
        None => {
            let best = select_geometric(&candidates)?;
            candidates
                .iter()
                .position(|c| std::ptr::eq(c, best))
                .expect("selected from the list")
        }
    };
    let cand = &candidates[selected];
    let sigma = &cand.sigma;
    let c = &cand.assignment;
    let b = select_b(sigma, cx, &cfg.filling, cfg.uv.as_deref())?;
    let mut a = lift_log_cocycle(sigma, &b, cx)?;
    let flattenings = if cfg.corrupt_a {
        let mut values = a.values().to_vec();
        values[0] += pi_i() * 0.5;
        a = LogCocycle::from_values(values);
        build_flattenings_unchecked(c, &a, sigma, cx)?
    } else {
        build_flattenings(c, &a, sigma, cx)?
    };

    let gluing = gluing_check(&cand.shapes, cx);
    let edge = edge_condition_check(&flattenings, cx);
    let mut cusp: f64 = 0.0;
    for j in 0..cx.cusp_count() {
        let mut words = vec![(1, 0), (0, 1), (1, 1)];
        if let Filling::Filled(r, s) = cfg.filling.0[j] {
            words.push((r, s));
        }
        for (x, y) in words {
            let path = peripheral_word(cx, j, x, y);
            cusp = cusp.max(cusp_condition_check(&flattenings, &a, cx, j, &path)?.norm());
        }
    }
    let independence = if cfg.independence_trials > 1 {
        psi_independence_test(c, sigma, &b, cx, cfg.independence_trials, cfg.options.seed)?
    } else {
        0.0
    };
    let psi_value = psi(&flattenings)?;
    let mut report = complex_volume(psi_value, cfg.link_exterior);
    let volume_bw = (psi_value.im - cand.volume).abs();
    report.diagnostics = Diagnostics {
        gluing: Some(gluing),
        edge: Some(edge),
        cusp: Some(cusp),
        filling: Some(cand.filling_residual),
        psi_independence: Some(independence),
        volume_bw: Some(volume_bw),
    };
    let checks = vec![
        Check::new("gluing", gluing, GLUING_TOL),
        Check::new("edge", edge, EDGE_TOL),
        Check::new("cusp", cusp, CUSP_TOL),
        Check::new("filling", cand.filling_residual, FILLING_TOL),
        Check::new("psi_independence", independence, INDEPENDENCE_TOL),
        Check::new("volume_bw", volume_bw, VOLUME_BW_TOL),
    ];
    Ok(VolumeOutcome {
        candidates,
        selected,
        b,
        a,
        flattenings,
        report,
        checks,
    })
}
