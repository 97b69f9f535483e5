//! Small dense solvers: complex Gaussian elimination at a chosen precision and
//! exact rational elimination.

use rug::{Complex, Float, Rational};

use crate::error::{Error, Result};
use crate::numerics::abs;

/// Row-major square complex matrix.
#[derive(Debug, Clone)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex>,
}

impl CMatrix {
    pub fn zeros(n: usize, prec: u32) -> Self {
        Self {
            n,
            data: vec![Complex::new(prec); n * n],
        }
    }

    pub fn from_fn(n: usize, prec: u32, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut m = Self::zeros(n, prec);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = Complex::with_val(prec, f(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Complex {
        &self.data[i * self.n + j]
    }

    pub fn prec(&self) -> u32 {
        self.data.first().map(|z| z.prec().0).unwrap_or(53)
    }

    pub fn mul_vec(&self, x: &[Complex]) -> Vec<Complex> {
        let prec = self.prec();
        (0..self.n)
            .map(|i| {
                let mut s = Complex::new(prec);
                for (j, xj) in x.iter().enumerate() {
                    s += Complex::with_val(prec, self.get(i, j) * xj);
                }
                s
            })
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| abs(self.get(i, j)).to_f64()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// LU factors with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

/// Solution of a dense system together with a 1-norm condition estimate.
#[derive(Debug, Clone)]
pub struct Solved {
    pub x: Vec<Complex>,
    pub condition: f64,
}

impl Lu {
    /// Factors `a`; a pivot below `2^{8-prec}` times the largest entry is
    /// reported as [`Error::SingularSystem`].
    pub fn factor(a: &CMatrix) -> Result<Self> {
        let n = a.n;
        let prec = a.prec();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = lu
            .data
            .iter()
            .map(|z| abs(z).to_f64())
            .fold(0.0, f64::max);
        if scale == 0.0 && n > 0 {
            return Err(Error::SingularSystem("zero matrix".into()));
        }
        let threshold = scale * 2f64.powi(8 - prec as i32);
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, abs(lu.get(i, k)).to_f64()))
                .fold((k, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
            if pmax <= threshold {
                return Err(Error::SingularSystem(format!(
                    "pivot {pmax:.3e} in column {k} below {threshold:.3e}"
                )));
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu.get(k, k).clone();
            for i in (k + 1)..n {
                let f = Complex::with_val(prec, lu.get(i, k) / &pivot);
                for j in (k + 1)..n {
                    let t = Complex::with_val(prec, &f * lu.get(k, j));
                    lu.data[i * n + j] -= t;
                }
                lu.data[i * n + k] = f;
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[Complex]) -> Vec<Complex> {
        let n = self.lu.n;
        let prec = self.lu.prec();
        let mut y: Vec<Complex> = self
            .perm
            .iter()
            .map(|&p| Complex::with_val(prec, &b[p]))
            .collect();
        for i in 0..n {
            for j in 0..i {
                let t = Complex::with_val(prec, self.lu.get(i, j) * &y[j]);
                y[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let t = Complex::with_val(prec, self.lu.get(i, j) * &y[j]);
                y[i] -= t;
            }
            let d = self.lu.get(i, i).clone();
            y[i] /= d;
        }
        y
    }

    /// `||A^{-1}||_1` by explicit inversion; fine for the small systems here.
    pub fn inverse_norm1(&self) -> f64 {
        let n = self.lu.n;
        let prec = self.lu.prec();
        let mut best: f64 = 0.0;
        for j in 0..n {
            let e: Vec<Complex> = (0..n)
                .map(|i| Complex::with_val(prec, if i == j { 1 } else { 0 }))
                .collect();
            let col = self.solve(&e);
            best = best.max(col.iter().map(|z| abs(z).to_f64()).sum());
        }
        best
    }
}

/// Solves `a x = b` and reports the 1-norm condition number.
pub fn solve(a: &CMatrix, b: &[Complex]) -> Result<Solved> {
    if b.len() != a.n {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    let lu = Lu::factor(a)?;
    let x = lu.solve(b);
    let condition = a.norm1() * lu.inverse_norm1();
    Ok(Solved { x, condition })
}

/// Max-norm residual `|a x - b|_inf`.
pub fn residual(a: &CMatrix, x: &[Complex], b: &[Complex]) -> Float {
    let prec = a.prec();
    let ax = a.mul_vec(x);
    ax.iter()
        .zip(b)
        .map(|(l, r)| abs(&Complex::with_val(prec, l - r)))
        .fold(Float::new(prec), |m, v| if v > m { v } else { m })
}

/// Exact Gaussian elimination over the rationals.
pub fn solve_rational(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    let mut m: Vec<Vec<Rational>> = a.to_vec();
    let mut rhs: Vec<Rational> = b.to_vec();
    for k in 0..n {
        let p = (k..n)
            .find(|&i| m[i][k] != 0)
            .ok_or_else(|| Error::SingularSystem(format!("exact zero pivot in column {k}")))?;
        m.swap(k, p);
        rhs.swap(k, p);
        for i in (k + 1)..n {
            if m[i][k] == 0 {
                continue;
            }
            let f = Rational::from(&m[i][k] / &m[k][k]);
            for j in k..n {
                let t = Rational::from(&f * &m[k][j]);
                m[i][j] -= t;
            }
            let t = Rational::from(&f * &rhs[k]);
            rhs[i] -= t;
        }
    }
    let mut x = vec![Rational::new(); n];
    for i in (0..n).rev() {
        let mut s = rhs[i].clone();
        for j in (i + 1)..n {
            s -= Rational::from(&m[i][j] * &x[j]);
        }
        x[i] = s / &m[i][i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::complex;

    #[test]
    fn solves_small_complex_system() {
        let p = 128;
        let a = CMatrix::from_fn(2, p, |i, j| match (i, j) {
            (0, 0) => complex(p, 2.0, 0.0),
            (0, 1) => complex(p, 0.0, 1.0),
            (1, 0) => complex(p, 1.0, 0.0),
            _ => complex(p, 3.0, 0.0),
        });
        let b = vec![complex(p, 1.0, 0.0), complex(p, 0.0, 1.0)];
        let s = solve(&a, &b).unwrap();
        assert!(residual(&a, &s.x, &b).to_f64() < 1e-35);
        assert!(s.condition >= 1.0);
    }

    #[test]
    fn singular_is_reported() {
        let p = 128;
        let a = CMatrix::from_fn(2, p, |_, _| complex(p, 1.0, 0.0));
        let b = vec![complex(p, 1.0, 0.0), complex(p, 1.0, 0.0)];
        assert!(matches!(solve(&a, &b), Err(Error::SingularSystem(_))));
        let r = vec![vec![Rational::from(1), Rational::from(2)]; 2];
        assert!(solve_rational(&r, &[Rational::from(1), Rational::from(1)]).is_err());
    }

    #[test]
    fn rational_solve_is_exact() {
        let a = vec![
            vec![Rational::from(1), Rational::from(0)],
            vec![Rational::from(0), Rational::from((1, 3))],
        ];
        let x = solve_rational(&a, &[Rational::from(1), Rational::from(2)]).unwrap();
        assert_eq!(x, vec![Rational::from(1), Rational::from(6)]);
    }
}
