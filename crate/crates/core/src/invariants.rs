//! h-polynomials, Hilbert coefficients and related numerical invariants.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::TruncatedModule;
use crate::presentation::Presentation;

/// Polynomial in `z` with integer coefficients, lowest degree first and no
/// trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntPoly(Vec<i64>);

impl IntPoly {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPoly(coeffs)
    }

    pub fn zero() -> Self {
        IntPoly(Vec::new())
    }

    pub fn constant(c: i64) -> Self {
        IntPoly::new(vec![c])
    }

    pub fn from_usize(coeffs: &[usize]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| c as i64).collect())
    }

    /// `1 + z + ... + z^{k-1}`.
    pub fn geometric(k: usize) -> Self {
        IntPoly::new(vec![1; k])
    }

    /// `(1 - z)^k`.
    pub fn one_minus_z_pow(k: usize) -> Self {
        let mut c = vec![0i64; k + 1];
        let mut binom = 1i64;
        for (i, slot) in c.iter_mut().enumerate() {
            *slot = if i % 2 == 0 { binom } else { -binom };
            binom = binom * (k as i64 - i as i64) / (i as i64 + 1);
        }
        IntPoly::new(c)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval_one(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.0.len().max(other.0.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.0.len().max(other.0.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn scale(&self, c: i64) -> IntPoly {
        IntPoly::new(self.0.iter().map(|&x| x * c).collect())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut c = vec![0i64; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        IntPoly::new(c)
    }

    /// Terms of degree `< n`.
    pub fn truncate(&self, n: usize) -> IntPoly {
        IntPoly::new(self.0.iter().take(n).copied().collect())
    }
}

impl fmt::Display for IntPoly {
    /// `3 + 3z^2 - z^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match (i, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "z")?,
                (1, _) => write!(f, "{a}z")?,
                (_, 1) => write!(f, "z^{i}")?,
                _ => write!(f, "{a}z^{i}")?,
            }
        }
        Ok(())
    }
}

/// `binom(n, k)` for integer `n` (possibly negative) and `k >= 0`, as the
/// polynomial `n (n-1) ... (n-k+1) / k!`.
pub fn binomial(n: i64, k: usize) -> i64 {
    let mut acc: i128 = 1;
    for i in 0..k as i64 {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc as i64
}

/// h-polynomial together with the dimension `r` of the module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HData {
    pub h: IntPoly,
    pub r: usize,
}

impl HData {
    pub fn new(h: IntPoly, r: usize) -> Self {
        HData { h, r }
    }

    /// `e(M) = h(1)`.
    pub fn multiplicity(&self) -> i64 {
        self.h.eval_one()
    }

    /// `e_i = h^{(i)}(1) / i! = sum_k binom(k, i) h_k`, defined for every `i`.
    pub fn hilbert_coefficient(&self, i: usize) -> i64 {
        self.h.coeffs().iter().enumerate().map(|(k, &hk)| binomial(k as i64, i) * hk).sum()
    }

    /// `e_0 .. e_r`.
    pub fn hilbert_coefficients(&self) -> Vec<i64> {
        (0..=self.r).map(|i| self.hilbert_coefficient(i)).collect()
    }

    /// Coefficient of `z^n` in `h(z) / (1-z)^r`, i.e. `l(m^n M / m^{n+1} M)`.
    pub fn graded_length(&self, n: usize) -> i64 {
        if self.r == 0 {
            return self.h.coeff(n);
        }
        self.h
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(k, _)| *k <= n)
            .map(|(k, &hk)| hk * binomial((n - k + self.r - 1) as i64, self.r - 1))
            .sum()
    }

    /// Hilbert-Samuel function `l(M / m^{n+1} M)`.
    pub fn samuel(&self, n: usize) -> i64 {
        (0..=n).map(|m| self.graded_length(m)).sum()
    }

    /// Value of the Hilbert-Samuel polynomial
    /// `P(X) = sum_i (-1)^i e_i binom(X + r - i, r - i)` at `X = n`.
    pub fn samuel_polynomial_at(&self, n: i64) -> i64 {
        (0..=self.r)
            .map(|i| {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                sign * self.hilbert_coefficient(i) * binomial(n + (self.r - i) as i64, self.r - i)
            })
            .sum()
    }

    /// The Hilbert-Samuel polynomial written in the binomial basis.
    pub fn samuel_polynomial_string(&self) -> String {
        let mut out = String::new();
        for i in 0..=self.r {
            let e = self.hilbert_coefficient(i);
            let signed = if i % 2 == 0 { e } else { -e };
            if signed == 0 {
                continue;
            }
            let k = self.r - i;
            let term = if k == 0 {
                format!("{}", signed.unsigned_abs())
            } else {
                let shift = if k == 0 { String::new() } else { format!(" + {k}") };
                let binom = format!("C(n{shift}, {k})");
                if signed.unsigned_abs() == 1 {
                    binom
                } else {
                    format!("{}*{binom}", signed.unsigned_abs())
                }
            };
            if out.is_empty() {
                if signed < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if signed < 0 { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    pub fn predicates(&self) -> Predicates {
        let e = self.multiplicity();
        let h0 = self.h.coeff(0);
        let h1 = self.h.coeff(1);
        Predicates { ulrich: e == h0, minimal_multiplicity: e == h0 + h1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicates {
    pub ulrich: bool,
    pub minimal_multiplicity: bool,
}

/// `mu(M)`, `i(M)`, `ord(det phi)` and `dim M`, read off the presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicInvariants {
    pub mu: usize,
    pub i_m: u32,
    pub ord_det: u32,
    pub dim: usize,
}

pub fn basic_invariants(pres: &Presentation) -> BasicInvariants {
    BasicInvariants { mu: pres.size(), i_m: pres.i_m(), ord_det: pres.ord_det(), dim: pres.dim() }
}

/// h-polynomial of a zero-dimensional module: the generating function of its
/// graded lengths. Certified by a vanishing graded piece below the truncation
/// (then `m^k M = m^{k+1} M`, hence `m^k M = 0` by Nakayama).
pub fn h_dim_zero(model: &TruncatedModule) -> Result<IntPoly> {
    let g = model.graded_lengths();
    match g.iter().position(|&x| x == 0) {
        Some(k) => Ok(IntPoly::from_usize(&g[..k])),
        None => Err(Error::truncation(model.truncation(), "zero-dimensional module not yet exhausted")),
    }
}

/// Direct fit `h = (1-z)^r * sum_{n<N} l(m^n M / m^{n+1} M) z^n mod z^N`.
///
/// The fit is exact as soon as `deg h < N`; we require the two top
/// coefficients of the truncated product to vanish as evidence of that.
pub fn h_direct_fit(graded: &[usize], r: usize) -> Result<IntPoly> {
    let n = graded.len();
    let prod = IntPoly::from_usize(graded).mul(&IntPoly::one_minus_z_pow(r)).truncate(n);
    if n < 3 || prod.coeff(n - 1) != 0 || prod.coeff(n - 2) != 0 {
        return Err(Error::truncation(n, "direct h fit has not stabilized"));
    }
    Ok(prod)
}

/// Exponents `a_1 <= ... <= a_t` with `M = ⊕ Q'/(y^{a_i})` for a module
/// presented over one variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DvrDecomposition {
    pub a: Vec<u32>,
}

impl DvrDecomposition {
    pub fn sum(&self) -> u64 {
        self.a.iter().map(|&x| x as u64).sum()
    }

    /// Number of summands `Q'/(y^a)` with `a` equal to the order of the
    /// hypersurface equation, i.e. free summands over `Q'/(g)`.
    pub fn free_summands(&self, ord_g: u32) -> usize {
        self.a.iter().filter(|&&x| x == ord_g).count()
    }
}

/// Smith form over `k[[y]] / (y^N)`: repeatedly move an entry of least order
/// to the pivot position, write it as `y^a u` with `u` a unit, and clear its
/// row and column. Dividing by `y^a` loses `a` digits of precision, which the
/// product with the pivot row (all of order `>= a`) restores, so entries stay
/// exact modulo `y^N`.
pub fn dvr_decomposition(pres: &Presentation, truncation: usize) -> Result<DvrDecomposition> {
    if pres.nvars() != 1 {
        return Err(Error::Precondition(format!(
            "elementary divisors need a one-variable presentation, got {} variables",
            pres.nvars()
        )));
    }
    let f = pres.field();
    let n = truncation;
    let t = pres.size();
    let series = |i: usize, j: usize| -> Vec<u32> {
        let mut v = vec![0u32; n];
        for (m, c) in pres.entry(i, j).terms() {
            let d = m.degree() as usize;
            if d < n {
                v[d] = c;
            }
        }
        v
    };
    let mut a: Vec<Vec<Vec<u32>>> = (0..t).map(|i| (0..t).map(|j| series(i, j)).collect()).collect();
    let ord = |v: &[u32]| v.iter().position(|&x| x != 0);
    let mul = |x: &[u32], y: &[u32]| -> Vec<u32> {
        let mut out = vec![0u32; n];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate().take(n - i) {
                out[i + j] = f.add(out[i + j], f.mul(xi, yj));
            }
        }
        out
    };
    let inverse = |u: &[u32]| -> Vec<u32> {
        // Newton-free recurrence: (u * w)_k = [k == 0].
        let mut w = vec![0u32; n];
        let u0inv = f.inv(u[0]);
        w[0] = u0inv;
        for k in 1..n {
            let mut s = 0;
            for i in 1..=k {
                s = f.add(s, f.mul(u[i], w[k - i]));
            }
            w[k] = f.neg(f.mul(s, u0inv));
        }
        w
    };
    let mut exps = Vec::with_capacity(t);
    for k in 0..t {
        let mut best: Option<(usize, usize, usize)> = None;
        for i in k..t {
            for j in k..t {
                if let Some(o) = ord(&a[i][j]) {
                    if best.is_none_or(|(bo, _, _)| o < bo) {
                        best = Some((o, i, j));
                    }
                }
            }
        }
        let Some((o, bi, bj)) = best else {
            return Err(Error::truncation(n, "elementary divisor beyond truncation"));
        };
        a.swap(k, bi);
        for row in a.iter_mut() {
            row.swap(k, bj);
        }
        // pivot = y^o * u
        let mut u = a[k][k][o..].to_vec();
        u.resize(n, 0);
        let uinv = inverse(&u);
        for i in k + 1..t {
            if ord(&a[i][k]).is_none() {
                continue;
            }
            let mut q = a[i][k][o..].to_vec();
            q.resize(n, 0);
            let factor = mul(&q, &uinv);
            let pivot_row = a[k].clone();
            for j in k..t {
                let sub = mul(&factor, &pivot_row[j]);
                for (x, s) in a[i][j].iter_mut().zip(sub) {
                    *x = f.sub(*x, s);
                }
            }
        }
        for j in k + 1..t {
            if ord(&a[k][j]).is_none() {
                continue;
            }
            let mut q = a[k][j][o..].to_vec();
            q.resize(n, 0);
            let factor = mul(&q, &uinv);
            for i in k..t {
                let sub = mul(&factor, &a[i][k].clone());
                for (x, s) in a[i][j].iter_mut().zip(sub) {
                    *x = f.sub(*x, s);
                }
            }
        }
        exps.push(o as u32);
    }
    exps.sort_unstable();
    let d = DvrDecomposition { a: exps };
    if d.sum() + 1 >= n as u64 {
        return Err(Error::truncation(n, "sum of elementary divisor orders too close to the truncation"));
    }
    Ok(d)
}
