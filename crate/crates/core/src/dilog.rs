//! Dilogarithm, Bloch-Wigner function, extended Rogers dilogarithm and the
//! complex volume assembled from a flattening.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::flattening::FlatteningSet;
use crate::{pi_i, Error, Result, PI};

const PI2_6: f64 = PI * PI / 6.0;

/// Principal logarithm with imaginary part in `(-π, π]`; a negative zero
/// imaginary part counts as `+0`, so `log(-1) = πi`.
pub fn log(z: Complex64) -> Complex64 {
    Complex64::new(z.re, z.im + 0.0).ln()
}

/// `B_{2k} / (2k+1)!` for `k = 1..=15`.
fn bernoulli_coeffs() -> &'static [f64; 15] {
    static C: OnceLock<[f64; 15]> = OnceLock::new();
    C.get_or_init(|| {
        const B: [(f64, f64); 15] = [
            (1.0, 6.0),
            (-1.0, 30.0),
            (1.0, 42.0),
            (-1.0, 30.0),
            (5.0, 66.0),
            (-691.0, 2730.0),
            (7.0, 6.0),
            (-3617.0, 510.0),
            (43867.0, 798.0),
            (-174611.0, 330.0),
            (854513.0, 138.0),
            (-236364091.0, 2730.0),
            (8553103.0, 6.0),
            (-23749461029.0, 870.0),
            (8615841276005.0, 14322.0),
        ];
        let mut out = [0.0; 15];
        let mut fact = 1.0;
        let mut n = 1.0;
        for (k, &(num, den)) in B.iter().enumerate() {
            // (2k+3)! from (2k+1)!
            fact *= (n + 1.0) * (n + 2.0);
            n += 2.0;
            out[k] = num / den / fact;
        }
        out
    })
}

/// Series in `u = -log(1-z)`, accurate for `|z| ≤ 1`, `Re z ≤ 1/2`.
fn li2_bernoulli(z: Complex64) -> Complex64 {
    let u = -log(Complex64::new(1.0, 0.0) - z);
    let u2 = u * u;
    let mut sum = u - u2 * 0.25;
    let mut pw = u * u2;
    for &c in bernoulli_coeffs() {
        let term = pw * c;
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
        pw *= u2;
    }
    sum
}

fn li2_unit_disk(z: Complex64) -> Complex64 {
    if z.re > 0.5 {
        let w = Complex64::new(1.0, 0.0) - z;
        -li2_bernoulli(w) + PI2_6 - log(z) * log(w)
    } else {
        li2_bernoulli(z)
    }
}

/// The dilogarithm on the principal branch, continuous from below on the cut
/// `(1, ∞)`.
pub fn li2(z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return z;
    }
    if z == Complex64::new(1.0, 0.0) {
        return Complex64::new(PI2_6, 0.0);
    }
    if z.norm() > 1.0 {
        let l = log(-z);
        -li2_unit_disk(z.inv()) - PI2_6 - l * l * 0.5
    } else {
        li2_unit_disk(z)
    }
}

fn check_regular(z: Complex64) -> Result<()> {
    if z.norm() < 1e-300 || (z - 1.0).norm() < 1e-300 || !z.is_finite() {
        return Err(Error::Degenerate(usize::MAX));
    }
    Ok(())
}

/// `D(z) = Im Li₂(z) + arg(1 - z) log|z|`.
pub fn bloch_wigner(z: Complex64) -> Result<f64> {
    check_regular(z)?;
    Ok(li2(z).im + log(Complex64::new(1.0, 0.0) - z).im * z.norm().ln())
}

/// `R(z; p, q) = Li₂(z) + (πi/2)(p log(1-z) + q log z) + ½ log(1-z) log z - π²/2`.
pub fn rogers_extended(z: Complex64, p: i64, q: i64) -> Result<Complex64> {
    check_regular(z)?;
    let lz = log(z);
    let l1z = log(Complex64::new(1.0, 0.0) - z);
    Ok(li2(z) + pi_i() * 0.5 * (l1z * p as f64 + lz * q as f64) + l1z * lz * 0.5 - PI * PI * 0.5)
}

/// `x` reduced into `[0, m)`.
pub fn reduce_mod(x: f64, m: f64) -> f64 {
    let r = x.rem_euclid(m) + 0.0;
    if r >= m {
        0.0
    } else {
        r
    }
}

/// `Σ ε_j R(z_j; p_j, q_j)` with the real part reduced into `[0, π²)`.
pub fn psi(flattenings: &FlatteningSet) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for f in &flattenings.entries {
        total += rogers_extended(f.z, f.p, f.q)? * f.eps as f64;
    }
    Ok(Complex64::new(reduce_mod(total.re, PI * PI), total.im))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulus {
    HalfPiSquared,
    PiSquared,
}

impl Modulus {
    pub fn value(self) -> f64 {
        match self {
            Modulus::HalfPiSquared => PI * PI / 2.0,
            Modulus::PiSquared => PI * PI,
        }
    }
}

/// Residuals of the checks run alongside a volume computation.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub gluing: Option<f64>,
    pub edge: Option<f64>,
    pub cusp: Option<f64>,
    pub filling: Option<f64>,
    pub psi_independence: Option<f64>,
    pub volume_bw: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeReport {
    /// Ψ with real part reduced modulo [`VolumeReport::modulus`].
    #[serde(serialize_with = "as_pair")]
    pub psi: Complex64,
    pub volume: f64,
    pub cs: f64,
    pub modulus: Modulus,
    pub diagnostics: Diagnostics,
}

/// Serializes a complex number as `[re, im]`.
pub fn as_pair<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// `i Vol_ℂ = Ψ`: volume `Im Ψ`, Chern-Simons `-Re Ψ`, reduced modulo
/// `π²/2`, or `π²` for link exteriors.
pub fn complex_volume(psi_value: Complex64, link_exterior: bool) -> VolumeReport {
    let modulus = if link_exterior {
        Modulus::PiSquared
    } else {
        Modulus::HalfPiSquared
    };
    let m = modulus.value();
    VolumeReport {
        psi: Complex64::new(reduce_mod(psi_value.re, m), psi_value.im),
        volume: psi_value.im,
        cs: reduce_mod(-psi_value.re, m),
        modulus,
        diagnostics: Diagnostics::default(),
    }
}

/// `Σ ε_j D(z_j)`.
pub fn volume_bw(shapes: &[(Complex64, i8)]) -> Result<f64> {
    let mut v = 0.0;
    for (j, &(z, eps)) in shapes.iter().enumerate() {
        v += eps as f64 * bloch_wigner(z).map_err(|_| Error::Degenerate(j))?;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // mpmath, 40 digits
    const ORACLE: [((f64, f64), (f64, f64)); 7] = [
        ((0.3, 0.4), (0.26659686674274041589, 0.46136289181910899428)),
        (
            (-2.0, 1.0),
            (-1.4890920430306578229, 0.54093100319857905892),
        ),
        (
            (5.0, -3.0),
            (0.033260008208192192025, -4.6816673723804519905),
        ),
        ((0.9, -0.2), (1.1898655826035623809, -0.4471849047239117407)),
        ((-0.5, 0.0), (-0.44841420692364620244, 0.0)),
        ((0.6, 0.7), (0.46036818286372290957, 0.90993794579668867061)),
        ((1.5, 0.01), (2.3535336909691917116, 1.2784961886409322699)),
    ];

    #[test]
    fn li2_matches_oracle() {
        for &((x, y), (re, im)) in &ORACLE {
            let v = li2(c(x, y));
            let want = c(re, im);
            assert!(
                (v - want).norm() <= 1e-13 * want.norm().max(1.0),
                "{x}+{y}i: {v} vs {want}"
            );
        }
    }

    #[test]
    fn li2_at_sixth_root_of_unity() {
        let z = Complex64::from_polar(1.0, PI / 3.0);
        let v = li2(z);
        assert!((v - c(0.27415567780803773941, 1.014941606409653625)).norm() < 1e-14);
    }

    #[test]
    fn li2_on_cut_is_continuous_from_below() {
        let v = li2(c(3.0, 0.0));
        assert!((v - c(2.320180423313098396, -3.451392295223202661)).norm() < 1e-13);
        let below = li2(c(3.0, -1e-12));
        assert!((v - below).norm() < 1e-10);
    }

    #[test]
    fn log_of_minus_one() {
        assert_eq!(log(c(-1.0, -0.0)).im, PI);
        assert_eq!(log(c(-1.0, 0.0)).im, PI);
    }

    #[test]
    fn rogers_oracle() {
        let z = Complex64::from_polar(1.0, PI / 3.0);
        let r = rogers_extended(z, 0, 0).unwrap();
        assert!((r - c(-4.112335167120566091, 1.014941606409653625)).norm() < 1e-12);
        let r = rogers_extended(c(0.3, 0.4), 1, -2).unwrap();
        assert!((r - c(-0.6241988343676672003, 2.3806694691726841188)).norm() < 1e-12);
    }

    #[test]
    fn bloch_wigner_values() {
        assert!((bloch_wigner(c(2.0, 1.0)).unwrap() - 0.51166639855382349597).abs() < 1e-13);
        assert!(bloch_wigner(c(0.0, 0.0)).is_err());
        assert!(bloch_wigner(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn complex_volume_reduction() {
        let r = complex_volume(c(0.0, 0.0), false);
        assert_eq!((r.volume, r.cs), (0.0, 0.0));
        let r = complex_volume(c(1.967879974, 1.918602377), true);
        assert!((r.cs - (PI * PI - 1.967879974)).abs() < 1e-12);
        assert_eq!(r.modulus, Modulus::PiSquared);
    }
}
