//! Sparse multivariate polynomials over F_p.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], which orders first by
//! total degree and then lexicographically on the exponent vector. Iteration
//! order is therefore deterministic, and the lowest-degree terms come first,
//! which is what the order queries and truncations want.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::linalg::Mat;

/// Exponent vector with a cached total degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    degree: u32,
    exps: Vec<u16>,
}

impl Monomial {
    pub fn new(exps: Vec<u16>) -> Self {
        let degree = exps.iter().map(|&e| e as u32).sum();
        Monomial { degree, exps }
    }

    pub fn one(nvars: usize) -> Self {
        Monomial { degree: 0, exps: vec![0; nvars] }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Monomial { degree: 1, exps }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Monomial { degree: self.degree + other.degree, exps }
    }

    /// Every monomial in `nvars` variables of exactly the given degree, in
    /// increasing monomial order.
    pub fn all_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u16; nvars];
        fn rec(i: usize, left: u32, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
            if i + 1 == cur.len() {
                cur[i] = left as u16;
                out.push(cur.clone());
                return;
            }
            for e in 0..=left {
                cur[i] = e as u16;
                rec(i + 1, left - e, cur, out);
            }
            cur[i] = 0;
        }
        if nvars == 0 {
            return if degree == 0 { vec![Monomial::one(0)] } else { Vec::new() };
        }
        let mut raw = Vec::new();
        rec(0, degree, &mut cur, &mut raw);
        for e in raw {
            out.push(Monomial { degree, exps: e });
        }
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Order of a polynomial at the origin. The zero polynomial has
/// `Order::Infinite`, which compares above every finite order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(v) => Some(v),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(v) => write!(f, "{v}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    field: FieldSpec,
    nvars: usize,
    terms: BTreeMap<Monomial, u32>,
}

impl Poly {
    pub fn zero(field: FieldSpec, nvars: usize) -> Self {
        Poly { field, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(field: FieldSpec, nvars: usize, c: u32) -> Self {
        let mut p = Poly::zero(field, nvars);
        p.add_term(Monomial::one(nvars), c % field.characteristic());
        p
    }

    pub fn var(field: FieldSpec, nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut p = Poly::zero(field, nvars);
        p.terms.insert(Monomial::var(nvars, i), 1);
        p
    }

    pub fn monomial(field: FieldSpec, m: Monomial, c: u32) -> Self {
        let mut p = Poly::zero(field, m.exps.len());
        p.add_term(m, c % field.characteristic());
        p
    }

    /// Linear form `sum c_i x_i`.
    pub fn linear_form(field: FieldSpec, coeffs: &[u32]) -> Self {
        let mut p = Poly::zero(field, coeffs.len());
        for (i, &c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(coeffs.len(), i), c % field.characteristic());
        }
        p
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, u32)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Adds `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: u32) {
        debug_assert_eq!(m.exps.len(), self.nvars);
        if c == 0 {
            return;
        }
        let f = self.field;
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn ord(&self) -> Order {
        match self.terms.keys().next() {
            Some(m) => Order::Finite(m.degree),
            None => Order::Infinite,
        }
    }

    /// Total degree, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree)
    }

    /// Homogeneous component of the given degree.
    pub fn homogeneous_part(&self, degree: u32) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree == degree)
            .map(|(m, &c)| (m.clone(), c))
            .collect();
        Poly { field: self.field, nvars: self.nvars, terms }
    }

    /// Lowest-degree homogeneous component.
    pub fn initial_form(&self) -> Poly {
        match self.ord() {
            Order::Finite(d) => self.homogeneous_part(d),
            Order::Infinite => self.clone(),
        }
    }

    /// Drops every term of total degree `>= n`.
    pub fn truncate(&self, n: u32) -> Poly {
        let terms = self
            .terms
            .iter()
            .take_while(|(m, _)| m.degree < n)
            .map(|(m, &c)| (m.clone(), c))
            .collect();
        Poly { field: self.field, nvars: self.nvars, terms }
    }

    fn check_compatible(&self, other: &Poly) {
        assert_eq!(self.field, other.field, "polynomials over different fields");
        assert_eq!(self.nvars, other.nvars, "polynomials in different numbers of variables");
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.check_compatible(other);
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(self.field.neg(1))
    }

    pub fn scale(&self, c: u32) -> Poly {
        let f = self.field;
        if c.is_multiple_of(f.characteristic()) {
            return Poly::zero(f, self.nvars);
        }
        let terms = self.terms.iter().map(|(m, &a)| (m.clone(), f.mul(a, c))).collect();
        Poly { field: f, nvars: self.nvars, terms }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.mul_bounded(other, None)
    }

    /// Product with every term of total degree `>= n` discarded.
    pub fn mul_truncated(&self, other: &Poly, n: u32) -> Poly {
        self.mul_bounded(other, Some(n))
    }

    fn mul_bounded(&self, other: &Poly, bound: Option<u32>) -> Poly {
        self.check_compatible(other);
        let f = self.field;
        let mut out = Poly::zero(f, self.nvars);
        for (ma, &ca) in &self.terms {
            if let Some(n) = bound {
                if ma.degree >= n {
                    break;
                }
            }
            for (mb, &cb) in &other.terms {
                if let Some(n) = bound {
                    if ma.degree + mb.degree >= n {
                        break;
                    }
                }
                out.add_term(ma.mul(mb), f.mul(ca, cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(self.field, self.nvars, 1);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn eval(&self, point: &[u32]) -> u32 {
        assert_eq!(point.len(), self.nvars);
        let f = self.field;
        let mut acc = 0;
        for (m, &c) in &self.terms {
            let mut t = c;
            for (i, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    t = f.mul(t, f.pow(point[i], e as u64));
                }
            }
            acc = f.add(acc, t);
        }
        acc
    }

    /// Substitutes `x_i -> images[i]`. All images must share the field and a
    /// common number of variables, which becomes the result's.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars);
        let f = self.field;
        let target_vars = images.first().map_or(0, |p| p.nvars);
        let mut powers: Vec<Vec<Poly>> = images
            .iter()
            .map(|p| vec![Poly::constant(f, target_vars, 1), p.clone()])
            .collect();
        let mut out = Poly::zero(f, target_vars);
        for (m, &c) in &self.terms {
            let mut t = Poly::constant(f, target_vars, c);
            for (i, &e) in m.exps.iter().enumerate() {
                let e = e as usize;
                while powers[i].len() <= e {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                if e > 0 {
                    t = t.mul(&powers[i][e]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Applies the linear change `x_i -> sum_j change[i][j] x_j`.
    /// Fails unless `change` is an invertible `nvars x nvars` matrix.
    pub fn linear_substitute(&self, change: &[Vec<u32>]) -> Result<Poly> {
        check_invertible(self.field, self.nvars, change)?;
        let images: Vec<Poly> =
            change.iter().map(|row| Poly::linear_form(self.field, row)).collect();
        Ok(self.substitute(&images))
    }

    /// Removes variable `k`, which must not occur in any term.
    pub fn drop_variable(&self, k: usize) -> Poly {
        let mut out = Poly::zero(self.field, self.nvars - 1);
        for (m, &c) in &self.terms {
            assert_eq!(m.exps[k], 0, "variable {k} still occurs");
            let mut exps = m.exps.clone();
            exps.remove(k);
            out.terms.insert(Monomial { degree: m.degree, exps }, c);
        }
        out
    }

    /// Sets variable `k` to zero and removes it.
    pub fn eliminate_variable(&self, k: usize) -> Poly {
        let mut out = Poly::zero(self.field, self.nvars - 1);
        for (m, &c) in &self.terms {
            if m.exps[k] != 0 {
                continue;
            }
            let mut exps = m.exps.clone();
            exps.remove(k);
            out.terms.insert(Monomial { degree: m.degree, exps }, c);
        }
        out
    }

    /// Appends `extra` fresh variables that do not occur.
    pub fn extend_vars(&self, extra: usize) -> Poly {
        let mut out = Poly::zero(self.field, self.nvars + extra);
        for (m, &c) in &self.terms {
            let mut exps = m.exps.clone();
            exps.resize(self.nvars + extra, 0);
            out.terms.insert(Monomial { degree: m.degree, exps }, c);
        }
        out
    }

    /// Formats with the given variable names, highest-degree terms first,
    /// coefficients as symmetric residues: `3*x^2*y - x + 1`.
    pub fn to_string_with(&self, vars: &[String]) -> String {
        assert_eq!(vars.len(), self.nvars);
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (idx, (m, &c)) in self.terms.iter().rev().enumerate() {
            let v = self.field.to_signed(c);
            let neg = v < 0;
            let a = v.unsigned_abs();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            if a != 1 || m.degree == 0 {
                factors.push(a.to_string());
            }
            for (i, &e) in m.exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(vars[i].clone()),
                    _ => factors.push(format!("{}^{}", vars[i], e)),
                }
            }
            s.push_str(&factors.join("*"));
        }
        s
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_var_names(self.nvars);
        f.write_str(&self.to_string_with(&names))
    }
}

/// `x, y, z, w` for up to four variables, `x1..xn` beyond.
pub fn default_var_names(n: usize) -> Vec<String> {
    const SHORT: [&str; 4] = ["x", "y", "z", "w"];
    if n <= SHORT.len() {
        SHORT[..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

pub(crate) fn check_invertible(field: FieldSpec, n: usize, change: &[Vec<u32>]) -> Result<()> {
    if change.len() != n || change.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(format!("change of coordinates must be {n}x{n}")));
    }
    let m = Mat::from_rows(field, change);
    if m.rank() != n {
        return Err(Error::SingularChange);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

/// Largest exponent accepted by the parser.
const MAX_EXPONENT: u64 = 1000;

/// Parses a polynomial expression over the given variables.
///
/// Grammar (whitespace insignificant):
/// ```text
/// expr   := ['-'] term (('+' | '-') term)*
/// term   := factor ('*' factor)*
/// factor := base ('^' uint)?
/// base   := int | var | '(' expr ')'
/// ```
/// Errors carry the 1-based column of the offending character.
pub fn parse(text: &str, vars: &[String], field: FieldSpec) -> Result<Poly> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0, vars, field };
    p.skip_ws();
    if p.pos == p.chars.len() {
        return Err(p.error("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected character '{}'", p.chars[p.pos])));
    }
    Ok(e)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    vars: &'a [String],
    field: FieldSpec,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse { column: self.pos + 1, message: message.into() }
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> Error {
        Error::Parse { column: pos + 1, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly> {
        let negate = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = self.base()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        if !matches!(self.chars.get(self.pos), Some(c) if c.is_ascii_digit()) {
            return Err(self.error("exponent must be a non-negative integer literal"));
        }
        let mut e: u64 = 0;
        while let Some(c) = self.chars.get(self.pos).and_then(|c| c.to_digit(10)) {
            e = e.saturating_mul(10).saturating_add(c as u64);
            self.pos += 1;
        }
        if e > MAX_EXPONENT {
            return Err(self.error_at(start, format!("exponent {e} exceeds {MAX_EXPONENT}")));
        }
        Ok(base.pow(e as u32))
    }

    fn base(&mut self) -> Result<Poly> {
        let nvars = self.vars.len();
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let p = self.field.characteristic() as u64;
                let mut v: u64 = 0;
                while let Some(d) = self.chars.get(self.pos).and_then(|c| c.to_digit(10)) {
                    v = (v * 10 + d as u64) % p;
                    self.pos += 1;
                }
                Ok(Poly::constant(self.field, nvars, v as u32))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while matches!(self.chars.get(self.pos), Some(c) if c.is_alphanumeric() || *c == '_')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Poly::var(self.field, nvars, i)),
                    None => Err(self.error_at(start, format!("unknown identifier '{name}'"))),
                }
            }
            Some(c) => Err(self.error(format!("unexpected character '{c}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn f() -> FieldSpec {
        FieldSpec::default()
    }

    fn p(text: &str, vars: &[&str]) -> Poly {
        parse(text, &names(vars), f()).unwrap()
    }

    #[test]
    fn parse_basic() {
        let y2 = p("y^2", &["x", "y"]);
        assert_eq!(y2, Poly::monomial(f(), Monomial::new(vec![0, 2]), 1));
        assert!(p("x*y - y*x", &["x", "y"]).is_zero());
        let g = p("x^2*(x-y)", &["x", "y", "z"]);
        assert_eq!(g, p("x^3 - x^2*y", &["x", "y", "z"]));
        assert_eq!(g.ord(), Order::Finite(3));
    }

    #[test]
    fn parse_errors_report_columns() {
        let v = names(&["x", "y"]);
        match parse("x + q", &v, f()) {
            Err(Error::Parse { column, message }) => {
                assert_eq!(column, 5);
                assert!(message.contains("unknown identifier"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("x^-1", &v, f()), Err(Error::Parse { column: 3, .. })));
        assert!(matches!(parse("x^y", &v, f()), Err(Error::Parse { .. })));
        assert!(matches!(parse("(x + y", &v, f()), Err(Error::Parse { column: 7, .. })));
        assert!(matches!(parse("x y", &v, f()), Err(Error::Parse { column: 3, .. })));
        assert!(matches!(parse("", &v, f()), Err(Error::Parse { column: 1, .. })));
        assert!(matches!(parse("x + - y", &v, f()), Err(Error::Parse { column: 5, .. })));
    }

    #[test]
    fn integer_literals_reduce() {
        let v = names(&["x"]);
        assert_eq!(parse("32004", &v, f()).unwrap(), Poly::constant(f(), 1, 1));
        assert!(parse("32003*x", &v, f()).unwrap().is_zero());
    }

    #[test]
    fn ord_examples() {
        assert_eq!(p("y^2 + x^3", &["x", "y"]).ord(), Order::Finite(2));
        assert_eq!(Poly::zero(f(), 2).ord(), Order::Infinite);
        assert!(Order::Finite(1000) < Order::Infinite);
    }

    #[test]
    fn truncated_products() {
        let v = ["x", "y"];
        assert_eq!(p("y", &v).mul_truncated(&p("y", &v), 3), p("y^2", &v));
        assert!(p("y^2", &v).mul_truncated(&p("y", &v), 3).is_zero());
        assert_eq!(p("x+y", &v).mul_truncated(&p("x-y", &v), 10), p("x^2-y^2", &v));
    }

    #[test]
    fn substitution_examples() {
        let v = ["x", "y"];
        let y = p("y", &v);
        let id = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(y.linear_substitute(&id).unwrap(), y);
        let shear = vec![vec![1, 0], vec![1, 1]];
        assert_eq!(y.linear_substitute(&shear).unwrap(), p("x+y", &v));
        let singular = vec![vec![1, 1], vec![2, 2]];
        assert_eq!(y.linear_substitute(&singular), Err(Error::SingularChange));
    }

    #[test]
    fn printing() {
        let v = ["x", "y"];
        assert_eq!(p("-x + 3*x^2*y", &v).to_string_with(&names(&v)), "3*x^2*y - x");
        assert_eq!(p("-1", &v).to_string_with(&names(&v)), "-1");
        assert_eq!(p("y - 5", &v).to_string_with(&names(&v)), "y - 5");
        assert_eq!(Poly::zero(f(), 2).to_string(), "0");
    }

    #[test]
    fn monomials_of_degree() {
        let ms = Monomial::all_of_degree(3, 2);
        assert_eq!(ms.len(), 6);
        assert!(ms.windows(2).all(|w| w[0] < w[1]));
    }

    fn arb_poly(nvars: usize, max_deg: u16, max_terms: usize) -> impl Strategy<Value = Poly> {
        proptest::collection::vec(
            (proptest::collection::vec(0..=max_deg, nvars), 0u32..32003),
            0..=max_terms,
        )
        .prop_map(move |terms| {
            let mut out = Poly::zero(FieldSpec::default(), nvars);
            for (e, c) in terms {
                out.add_term(Monomial::new(e), c);
            }
            out
        })
    }

    fn reference_mul(a: &Poly, b: &Poly) -> Poly {
        // Schoolbook product through explicit term lists, independent of the
        // early-exit logic in `mul_bounded`.
        let fld = a.field();
        let mut acc = Poly::zero(fld, a.nvars());
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                let single = Poly::monomial(fld, ma.mul(mb), fld.mul(ca, cb));
                acc = acc.add(&single);
            }
        }
        acc
    }

    proptest! {
        #[test]
        fn ord_is_additive(a in arb_poly(3, 3, 5), b in arb_poly(3, 3, 5)) {
            prop_assume!(!a.is_zero() && !b.is_zero());
            let (oa, ob) = (a.ord().finite().unwrap(), b.ord().finite().unwrap());
            prop_assert_eq!(a.mul(&b).ord(), Order::Finite(oa + ob));
        }

        #[test]
        fn parse_print_roundtrip(a in arb_poly(3, 4, 6)) {
            let v = names(&["x", "y", "z"]);
            let text = a.to_string_with(&v);
            prop_assert_eq!(parse(&text, &v, f()).unwrap(), a);
        }

        #[test]
        fn truncated_mul_matches_reference(a in arb_poly(2, 4, 5), b in arb_poly(2, 4, 5), n in 0u32..9) {
            prop_assert_eq!(a.mul_truncated(&b, n), reference_mul(&a, &b).truncate(n));
        }

        #[test]
        fn substitution_round_trip(a in arb_poly(3, 3, 5), m in proptest::collection::vec(0u32..32003, 9)) {
            let change: Vec<Vec<u32>> = m.chunks(3).map(|r| r.to_vec()).collect();
            let mat = Mat::from_rows(f(), &change);
            prop_assume!(mat.rank() == 3);
            let inv = mat.inverse().unwrap();
            // x -> Cx followed by x -> C^{-1}x composes to the identity.
            let there = a.linear_substitute(&change).unwrap();
            let back = there.linear_substitute(&inv.to_rows()).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
