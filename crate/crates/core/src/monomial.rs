//! Signed Laurent monomials in the holonomy variables `M_j`, `L_j`.

use std::fmt;

use num_complex::Complex64;

use crate::{Error, Result};

/// `±Π M_j^m_j L_j^l_j`, one `(m_j, l_j)` pair per cusp.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub negative: bool,
    pub exps: Vec<(i32, i32)>,
}

impl Monomial {
    pub fn one(cusps: usize) -> Self {
        Monomial {
            negative: false,
            exps: vec![(0, 0); cusps],
        }
    }

    pub fn meridian(cusps: usize, j: usize) -> Self {
        let mut m = Self::one(cusps);
        m.exps[j].0 = 1;
        m
    }

    pub fn longitude(cusps: usize, j: usize) -> Self {
        let mut m = Self::one(cusps);
        m.exps[j].1 = 1;
        m
    }

    pub fn is_one(&self) -> bool {
        !self.negative && self.exps.iter().all(|&e| e == (0, 0))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            negative: self.negative ^ other.negative,
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| (a.0 + b.0, a.1 + b.1))
                .collect(),
        }
    }

    pub fn inv(&self) -> Monomial {
        Monomial {
            negative: self.negative,
            exps: self.exps.iter().map(|&(m, l)| (-m, -l)).collect(),
        }
    }

    pub fn pow(&self, k: i32) -> Monomial {
        Monomial {
            negative: self.negative && k.rem_euclid(2) == 1,
            exps: self.exps.iter().map(|&(m, l)| (m * k, l * k)).collect(),
        }
    }

    /// Value at `(M_j, L_j)`.
    pub fn eval(&self, targets: &[(Complex64, Complex64)]) -> Complex64 {
        let mut v = Complex64::new(if self.negative { -1.0 } else { 1.0 }, 0.0);
        for (&(m, l), &(mv, lv)) in self.exps.iter().zip(targets) {
            v *= mv.powi(m) * lv.powi(l);
        }
        v
    }

    /// Value at `M_j = exp(m_j)`, `L_j = exp(l_j)`.
    pub fn eval_log(&self, logs: &[(Complex64, Complex64)]) -> Complex64 {
        let mut e = Complex64::new(0.0, 0.0);
        for (&(m, l), &(mv, lv)) in self.exps.iter().zip(logs) {
            e += mv * m as f64 + lv * l as f64;
        }
        let v = e.exp();
        if self.negative {
            -v
        } else {
            v
        }
    }

    /// Parse `1`, `-1`, `M^-1*L`, `M0^2*L1`, ...
    pub fn parse(s: &str, cusps: usize) -> Result<Monomial> {
        let bad = |why: &str| Error::Template(format!("{why} in monomial {s:?}"));
        let mut t = s.trim();
        let mut out = Monomial::one(cusps);
        if let Some(rest) = t.strip_prefix('-') {
            out.negative = true;
            t = rest.trim();
        }
        if t.is_empty() {
            return Err(bad("empty monomial"));
        }
        if t == "1" {
            return Ok(out);
        }
        for factor in t.split('*') {
            let factor = factor.trim();
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (
                    b.trim(),
                    e.trim().parse::<i32>().map_err(|_| bad("bad exponent"))?,
                ),
                None => (factor, 1),
            };
            let mut chars = base.chars();
            let var = chars.next().ok_or_else(|| bad("empty factor"))?;
            let idx = chars.as_str();
            let j = if idx.is_empty() {
                if cusps != 1 {
                    return Err(bad("cusp index required"));
                }
                0
            } else {
                idx.parse::<usize>().map_err(|_| bad("bad cusp index"))?
            };
            if j >= cusps {
                return Err(bad("cusp index out of range"));
            }
            match var {
                'M' => out.exps[j].0 += exp,
                'L' => out.exps[j].1 += exp,
                _ => return Err(bad("unknown variable")),
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let single = self.exps.len() == 1;
        let mut parts = Vec::new();
        for (j, &(m, l)) in self.exps.iter().enumerate() {
            for (name, e) in [("L", l), ("M", m)] {
                if e == 0 {
                    continue;
                }
                let var = if single {
                    name.to_string()
                } else {
                    format!("{name}{j}")
                };
                parts.push(if e == 1 { var } else { format!("{var}^{e}") });
            }
        }
        let body = if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        };
        if self.negative {
            write!(f, "-{body}")
        } else {
            write!(f, "{body}")
        }
    }
}
