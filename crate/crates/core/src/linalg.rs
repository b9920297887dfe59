//! Small dense solvers: exact rational elimination and complex
//! Gauss-Newton steps for systems with a handful of unknowns.

use num_complex::Complex64;
use num_rational::Rational64;

/// Unique rational solution of `A x = b`, or `None` when the system is
/// inconsistent or underdetermined.
pub(crate) fn solve_rational(
    rows: &[Vec<i64>],
    rhs: &[i64],
    cols: usize,
) -> Option<Vec<Rational64>> {
    let mut m: Vec<Vec<Rational64>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut row: Vec<Rational64> = r.iter().map(|&x| Rational64::from_integer(x)).collect();
            row.push(Rational64::from_integer(b));
            row
        })
        .collect();
    let zero = Rational64::from_integer(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != zero) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != zero {
                let f = m[i][c];
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if pivots.len() < cols {
        return None;
    }
    if m[r..].iter().any(|row| row[cols] != zero) {
        return None;
    }
    Some((0..cols).map(|i| m[i][cols]).collect())
}

/// Solves the square system `A x = b` by partial pivoting.
pub(crate) fn solve_square(
    mut a: Vec<Vec<Complex64>>,
    mut b: Vec<Complex64>,
) -> Option<Vec<Complex64>> {
    let n = b.len();
    let scale = a.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm()))?;
        if a[p][c].norm() <= scale * 1e-14 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in c..n {
                let v = a[c][k];
                a[i][k] -= f * v;
            }
            let v = b[c];
            b[i] -= f * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= a[i][k] * x[k];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

/// Least-squares step `min |J dx + f|` through the normal equations;
/// square systems are solved directly.
pub(crate) fn newton_step(jac: &[Vec<Complex64>], f: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = jac.first()?.len();
    let rhs: Vec<Complex64> = f.iter().map(|v| -v).collect();
    if jac.len() == n {
        return solve_square(jac.to_vec(), rhs);
    }
    let mut a = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    for (row, &r) in jac.iter().zip(&rhs) {
        for i in 0..n {
            let ci = row[i].conj();
            b[i] += ci * r;
            for k in 0..n {
                a[i][k] += ci * row[k];
            }
        }
    }
    solve_square(a, b)
}
