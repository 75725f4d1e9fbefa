//! Dense symmetric positive-definite helpers for the Newton and IRLS solvers.

#![allow(clippy::needless_range_loop)]

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Square {
    pub n: usize,
    pub a: Vec<f64>,
}

impl Square {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            a: vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * self.n + j]
    }

    /// Copy the upper triangle into the lower one.
    pub fn symmetrize_from_upper(&mut self) {
        for i in 0..self.n {
            for j in 0..i {
                self.a[i * self.n + j] = self.a[j * self.n + i];
            }
        }
    }
}

/// Relative pivot below which a column counts as linearly dependent.
pub(crate) const PIVOT_TOL: f64 = 1e-10;

/// Lower Cholesky factor of an SPD matrix, or the index of the first column
/// whose pivot collapses relative to its diagonal.
pub(crate) fn cholesky(m: &Square) -> Result<Square, usize> {
    let n = m.n;
    let mut l = Square::zeros(n);
    for j in 0..n {
        let mut d = m.at(j, j);
        for k in 0..j {
            d -= l.at(j, k) * l.at(j, k);
        }
        if d.is_nan() || d <= PIVOT_TOL * m.at(j, j).abs() || !d.is_finite() {
            return Err(j);
        }
        let d = d.sqrt();
        *l.at_mut(j, j) = d;
        for i in j + 1..n {
            let mut s = m.at(i, j);
            for k in 0..j {
                s -= l.at(i, k) * l.at(j, k);
            }
            *l.at_mut(i, j) = s / d;
        }
    }
    Ok(l)
}

/// Columns that are (numerically) linear combinations of earlier columns,
/// found by a Cholesky pass over a Gram matrix that skips failed pivots.
pub(crate) fn dependent_columns(gram: &Square) -> Vec<usize> {
    let n = gram.n;
    let mut l = Square::zeros(n);
    let mut bad = Vec::new();
    for j in 0..n {
        let mut d = gram.at(j, j);
        for k in 0..j {
            d -= l.at(j, k) * l.at(j, k);
        }
        if d.is_nan() || d <= PIVOT_TOL * gram.at(j, j).abs() || gram.at(j, j) == 0.0 {
            bad.push(j);
            continue;
        }
        let d = d.sqrt();
        *l.at_mut(j, j) = d;
        for i in j + 1..n {
            let mut s = gram.at(i, j);
            for k in 0..j {
                s -= l.at(i, k) * l.at(j, k);
            }
            *l.at_mut(i, j) = s / d;
        }
    }
    bad
}

/// Solve `L Lᵀ x = b`.
pub(crate) fn cholesky_solve(l: &Square, b: &[f64]) -> Vec<f64> {
    let n = l.n;
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l.at(i, k) * y[k];
        }
        y[i] = s / l.at(i, i);
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l.at(k, i) * y[k];
        }
        y[i] = s / l.at(i, i);
    }
    y
}

/// `(L Lᵀ)⁻¹`.
pub(crate) fn cholesky_inverse(l: &Square) -> Square {
    let n = l.n;
    let mut inv = Square::zeros(n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        let col = cholesky_solve(l, &e);
        for i in 0..n {
            *inv.at_mut(i, j) = col[i];
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_and_invert() {
        let m = Square {
            n: 3,
            a: vec![4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0],
        };
        let l = cholesky(&m).unwrap();
        let x = cholesky_solve(&l, &[1.0, 2.0, 3.0]);
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| m.at(i, j) * x[j]).sum();
            assert!((r - [1.0, 2.0, 3.0][i]).abs() < 1e-12);
        }
        let inv = cholesky_inverse(&l);
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| m.at(i, k) * inv.at(k, j)).sum();
                assert!((v - f64::from(u8::from(i == j))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn detects_dependence() {
        // columns: 1, x, 2x  -> third is dependent
        let x = [1.0, 2.0, 3.0, 4.0];
        let cols = [
            vec![1.0; 4],
            x.to_vec(),
            x.iter().map(|v| 2.0 * v).collect::<Vec<_>>(),
        ];
        let mut g = Square::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                *g.at_mut(i, j) = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
            }
        }
        assert_eq!(dependent_columns(&g), vec![2]);
        assert_eq!(cholesky(&g), Err(2));
    }
}
