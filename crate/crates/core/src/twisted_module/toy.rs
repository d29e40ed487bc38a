//! A finite toy with a nontrivial nilpotent part, used to exercise the
//! log-power decompositions that the shipped modules never reach.
//!
//! The algebra side is `span{u0, u1}` with `N u1 = u0`; the module side is
//! `span{w0, w1}` with `N_W w1 = w0`. Log-free operators are
//! `Y_0(u1, x) = x^{-1}E` and `Y_0(u0, x) = x^{-1}N_W` with `E = diag(0, 1)`,
//! so that `[N_W, E] = N_W` and conjugation by `x^{N_W}` is compatible with
//! `N`. The full operator is defined by `Y(u, x) = Y_0(x^{-N}u, x)`.

use crate::error::Result;
use crate::formal_calculus::expand::nilpotent_monomial;
use crate::formal_calculus::{mul, nilpotent_power, Coeff, Scalar, Series, Var, Window};
use crate::verdict::{compare_series, first_failure, Verdict};

/// A vector in a small coordinate space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseVec(pub Vec<Scalar>);

impl Coeff for DenseVec {
    fn zero() -> Self {
        DenseVec(Vec::new())
    }
    fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let get = |v: &Vec<Scalar>, i: usize| v.get(i).cloned().unwrap_or_else(Scalar::zero);
        DenseVec((0..n).map(|i| &get(&self.0, i) + &get(&other.0, i)).collect())
    }
    fn scale(&self, s: &Scalar) -> Self {
        DenseVec(self.0.iter().map(|c| c * s).collect())
    }
    fn same(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl std::fmt::Display for DenseVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

type Mat2 = [[Scalar; 2]; 2];

fn m2(a: [[i64; 2]; 2]) -> Mat2 {
    a.map(|r| r.map(Scalar::int))
}

fn apply(m: &Mat2, v: &DenseVec) -> DenseVec {
    let get = |i: usize| v.0.get(i).cloned().unwrap_or_else(Scalar::zero);
    DenseVec((0..2).map(|i| &(&m[i][0] * &get(0)) + &(&m[i][1] * &get(1))).collect())
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = m2([[0, 0], [0, 0]]);
    for (i, row) in out.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            *c = &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
        }
    }
    out
}

fn mat_sub(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = a.clone();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = &a[i][j] - &b[i][j];
        }
    }
    out
}

fn mat_add(a: &Mat2, b: &Mat2) -> Mat2 {
    mat_sub(a, &mat_sub(&m2([[0, 0], [0, 0]]), b))
}

fn mat_scale(a: &Mat2, c: &Scalar) -> Mat2 {
    a.clone().map(|r| r.map(|x| &x * c))
}

pub struct NilpotentToy {
    /// `N` on the algebra side, in the basis `(u0, u1)`.
    pub n_v: Mat2,
    /// `N_W` in the basis `(w0, w1)`.
    pub n_w: Mat2,
    pub e: Mat2,
}

impl Default for NilpotentToy {
    fn default() -> Self {
        NilpotentToy { n_v: m2([[0, 1], [0, 0]]), n_w: m2([[0, 1], [0, 0]]), e: m2([[0, 0], [0, 1]]) }
    }
}

impl NilpotentToy {
    /// Residue matrix of `Y_0(u, x)`, linear in `u`.
    pub fn y0_matrix(&self, u: &DenseVec) -> Mat2 {
        let c = |i: usize| u.0.get(i).cloned().unwrap_or_else(Scalar::zero);
        mat_add(&mat_scale(&self.n_w, &c(0)), &mat_scale(&self.e, &c(1)))
    }

    pub fn basis(i: usize) -> DenseVec {
        let mut v = vec![Scalar::zero(), Scalar::zero()];
        v[i] = Scalar::one();
        DenseVec(v)
    }

    fn x_power(&self, x: Var, v: &DenseVec, m: &Mat2, sign: i64, hw: i64) -> Result<Series<DenseVec>> {
        let mm = mat_scale(m, &Scalar::int(sign));
        nilpotent_power(x, v, move |c| apply(&mm, c), 2, hw)
    }

    /// `Y_0(u, x) s` for a series `s` of module vectors, as `x^{-1}A(u)s`.
    fn y0_on(&self, u: &DenseVec, s: &Series<DenseVec>) -> Series<DenseVec> {
        let a = self.y0_matrix(u);
        s.map(false, move |c| apply(&a, c)).mul_monomial(Var::X, -Rational::from_integer(1))
    }

    /// `Y(u, x) w = Y_0(x^{-N}u, x) w`: the logarithm comes from `u`.
    pub fn full(&self, u: &DenseVec, w: &DenseVec, hw: i64) -> Result<Series<DenseVec>> {
        let xu = self.x_power(Var::X, u, &self.n_v, -1, hw)?;
        let mut terms = Vec::new();
        for (mono, c) in xu.entries()? {
            let k = mono.log_powers[0];
            let logs = Series::monomial(&[(Var::X, Rational::from_integer(0), k)], Scalar::one(), hw).with_window(Window::symmetric(1, hw, 2));
            let a = self.y0_matrix(&c);
            let y = Series::monomial(&[(Var::X, -Rational::from_integer(1), 0)], apply(&a, w), hw);
            terms.push(mul(&logs, &y)?);
        }
        Ok(total(terms, hw).with_window(Window::symmetric(1, hw, 2)))
    }

    /// `x^{-N_W} Y_0(u, x) x^{N_W} w`.
    pub fn conjugated(&self, u: &DenseVec, w: &DenseVec, hw: i64) -> Result<Series<DenseVec>> {
        let xw = self.x_power(Var::X, w, &self.n_w, 1, hw)?;
        let inner = self.y0_on(u, &xw);
        let parts = nilpotent_monomial(Var::X, 2, hw)?;
        let mut terms = Vec::new();
        let mut cur = inner;
        for (k, p) in parts.iter().enumerate() {
            let s = if k % 2 == 1 { Scalar::int(-1) } else { Scalar::one() };
            terms.push(mul(&p.scale(&s), &cur)?);
            let nw = self.n_w.clone();
            cur = cur.map(false, move |c| apply(&nw, c));
        }
        Ok(total(terms, hw).with_window(Window::symmetric(1, hw, 2)))
    }

    /// `Σ_k (-1)^k/k! (log x)^k ad_{N_W}^k(Y_0(u, x)) w`.
    pub fn commutator_series(&self, u: &DenseVec, w: &DenseVec, hw: i64) -> Result<Series<DenseVec>> {
        let parts = nilpotent_monomial(Var::X, 3, hw)?;
        let mut ad = self.y0_matrix(u);
        let mut terms = Vec::new();
        for (k, p) in parts.iter().enumerate() {
            let s = if k % 2 == 1 { Scalar::int(-1) } else { Scalar::one() };
            let y = Series::monomial(&[(Var::X, -Rational::from_integer(1), 0)], apply(&ad, w), hw);
            terms.push(mul(&p.scale(&s), &y)?);
            ad = mat_sub(&mat_mul(&self.n_w, &ad), &mat_mul(&ad, &self.n_w));
        }
        Ok(total(terms, hw).with_window(Window::symmetric(1, hw, 2)))
    }

    /// `Y^{tw}(w, x) v`: `Y(v, y) w` with `y^n = e^{πin}x^n`, `log y = log x + Π`.
    /// `L_W(-1)` is zero on the toy.
    pub fn twist(&self, w: &DenseVec, v: &DenseVec, hw: i64) -> Result<Series<DenseVec>> {
        let full = self.full(v, w, hw)?;
        let mut on_y = Vec::new();
        for (mono, c) in full.entries()? {
            on_y.push(Series::monomial(&[(Var::Y, mono.powers[0], mono.log_powers[0])], c, hw));
        }
        if on_y.is_empty() {
            return Ok(total(on_y, hw));
        }
        let s = Series::sum(&on_y).with_window(Window::symmetric(1, hw, 2));
        Ok(s.log_substitute(Var::Y, Var::X)?.with_window(Window::symmetric(1, hw, 2)))
    }

    /// `Y^{tw}_0(w, x) v = Y^{tw}(w, x) x^{N} v`.
    pub fn twist0(&self, w: &DenseVec, v: &DenseVec, hw: i64) -> Result<Series<DenseVec>> {
        let xv = self.x_power(Var::X, v, &self.n_v, 1, hw)?;
        self.twist_on(w, &xv, hw)
    }

    /// Applies `Y^{tw}(w, x)` to a series of algebra vectors in `x`.
    fn twist_on(&self, w: &DenseVec, s: &Series<DenseVec>, hw: i64) -> Result<Series<DenseVec>> {
        let mut terms = Vec::new();
        for (mono, c) in s.entries()? {
            let logs = Series::monomial(&[(Var::X, mono.powers[0], mono.log_powers[0])], Scalar::one(), hw).with_window(Window::symmetric(1, hw, 2));
            terms.push(mul(&logs, &self.twist(w, &c, hw)?)?);
        }
        Ok(total(terms, hw).with_window(Window::symmetric(1, hw, 2)))
    }

    pub fn check_y0_decomposition(&self, hw: i64) -> Verdict {
        let win = Window::symmetric(1, hw, 2);
        let mut out = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let (u, w) = (Self::basis(i), Self::basis(j));
                let f = self.full(&u, &w, hw)?;
                out.push(compare_series("y0-conjugation", &f, &self.conjugated(&u, &w, hw)?, &win, |c| c.to_string()));
                out.push(compare_series("y0-commutator", &f, &self.commutator_series(&u, &w, hw)?, &win, |c| c.to_string()));
                // the log-constant term is Y_0 itself
                let y0 = Series::monomial(&[(Var::X, -Rational::from_integer(1), 0)], apply(&self.y0_matrix(&u), &w), hw);
                out.push(compare_series("y0-constant-term", &f.log_constant_term(Var::X), &y0, &win, |c| c.to_string()));
            }
        }
        first_failure(out)
    }

    /// `Y^{tw}(w, x) = Y^{tw}_0(w, x) x^{-N}` with `Y^{tw}_0` free of logs.
    pub fn check_twist_decomposition(&self, hw: i64) -> Verdict {
        let win = Window::symmetric(1, hw, 2);
        let mut out = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let (w, v) = (Self::basis(i), Self::basis(j));
                let t0 = self.twist0(&w, &v, hw)?;
                out.push(compare_series("twist0-log-free", &t0, &t0.log_constant_term(Var::X), &win, |c| c.to_string()));
                let xv = self.x_power(Var::X, &v, &self.n_v, -1, hw)?;
                let mut terms = Vec::new();
                for (mono, c) in xv.entries()? {
                    let logs = Series::monomial(&[(Var::X, mono.powers[0], mono.log_powers[0])], Scalar::one(), hw).with_window(win.clone());
                    terms.push(mul(&logs, &self.twist0(&w, &c, hw)?)?);
                }
                let r = total(terms, hw);
                out.push(compare_series("twist-decomposition", &self.twist(&w, &v, hw)?, &r, &win, |c| c.to_string()));
            }
        }
        first_failure(out)
    }
}

type Rational = num_rational::Rational64;

fn total(terms: Vec<Series<DenseVec>>, hw: i64) -> Series<DenseVec> {
    if terms.is_empty() {
        Series::zero(vec![Var::X], Window::symmetric(1, hw, 2))
    } else {
        Series::sum(&terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_has_logs_and_decomposes() {
        let t = NilpotentToy::default();
        let f = t.full(&NilpotentToy::basis(1), &NilpotentToy::basis(1), 4).unwrap();
        // x^{-1}(E - log x N_W) w1 = x^{-1}(w1 - log x w0)
        let c = f.coeff_at(&[(Var::X, -Rational::from_integer(1), 1)]);
        assert_eq!(c, DenseVec(vec![Scalar::int(-1), Scalar::zero()]));
        assert_eq!(t.check_y0_decomposition(4).unwrap(), None);
        assert_eq!(t.check_twist_decomposition(4).unwrap(), None);
    }

    #[test]
    fn broken_bracket_is_caught() {
        // [N_W, E] = 0 breaks compatibility with N
        let t = NilpotentToy { e: m2([[1, 0], [0, 1]]), ..NilpotentToy::default() };
        assert!(t.check_y0_decomposition(4).unwrap().is_some());
    }
}
