//! Dense matrices over the scalar field. Scalars here are always free of
//! `Π`, so every nonzero entry is invertible.

use crate::error::{CalcError, Result};
use crate::formal_calculus::{Scalar, Q};

pub type Mat = Vec<Vec<Scalar>>;

pub fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect()).collect()
}

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![Scalar::zero(); c]; r]
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let k = b.len();
    let mut out = zeros(n, m);
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    out[i][j] += &(&a[i][l] * &b[l][j]);
                }
            }
        }
    }
    out
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect()
}

pub fn scale(a: &Mat, c: &Scalar) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

pub fn is_zero(a: &Mat) -> bool {
    a.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

pub fn apply(a: &Mat, v: &[Scalar]) -> Vec<Scalar> {
    a.iter()
        .map(|r| {
            let mut acc = Scalar::zero();
            for (x, y) in r.iter().zip(v) {
                if !x.is_zero() && !y.is_zero() {
                    acc += &(x * y);
                }
            }
            acc
        })
        .collect()
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(a: &mut Mat) -> Result<Vec<usize>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].inverse()?;
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    if !a[r][j].is_zero() {
                        let t = &f * &a[r][j];
                        a[i][j] = &a[i][j] - &t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(pivots)
}

/// Basis of the null space, as column vectors.
pub fn kernel(a: &Mat) -> Result<Vec<Vec<Scalar>>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut m = a.clone();
    let pivots = rref(&mut m)?;
    let mut out = Vec::new();
    for f in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Scalar::zero(); cols];
        v[f] = Scalar::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -m[r][f].clone();
        }
        out.push(v);
    }
    Ok(out)
}

pub fn inverse(a: &Mat) -> Result<Mat> {
    let n = a.len();
    let mut m: Mat = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            row
        })
        .collect();
    let piv = rref(&mut m)?;
    if piv.len() < n || piv[n - 1] != n - 1 {
        return Err(CalcError::NotInvertible("singular matrix".into()));
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn transpose(a: &Mat) -> Mat {
    let c = a.first().map_or(0, |r| r.len());
    (0..c).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn from_q(a: &[Vec<Q>]) -> Mat {
    a.iter().map(|r| r.iter().map(|x| Scalar::from_q(x.clone())).collect()).collect()
}

/// `Σ_{j≥1} (-1)^{j+1} u^j / j` for nilpotent `u`.
pub fn nilpotent_log(u: &Mat) -> Result<Mat> {
    let n = u.len();
    let mut acc = zeros(n, n);
    let mut p = u.clone();
    for j in 1..=n + 1 {
        if is_zero(&p) {
            return Ok(acc);
        }
        let c = Q::new(if j % 2 == 1 { 1 } else { -1 }, j as i64);
        acc = add(&acc, &scale(&p, &Scalar::from_q(c)));
        p = mul(&p, u);
    }
    Err(CalcError::NotNilpotent(n))
}

/// `Σ_k a^k / k!` for nilpotent `a`.
pub fn nilpotent_exp(a: &Mat) -> Result<Mat> {
    let n = a.len();
    let mut acc = identity(n);
    let mut p = identity(n);
    for k in 1..=n + 1 {
        p = mul(&p, a);
        if is_zero(&p) {
            return Ok(acc);
        }
        acc = add(&acc, &scale(&p, &Scalar::from_q(Q::inv_factorial(k as u64))));
    }
    Err(CalcError::NotNilpotent(n))
}

/// Smallest `k` with `a^k = 0`, or `None` past the dimension.
pub fn nilpotency_index(a: &Mat) -> Option<usize> {
    let n = a.len();
    let mut p = identity(n);
    for k in 0..=n {
        if is_zero(&p) {
            return Some(k);
        }
        p = mul(&p, a);
    }
    None
}
