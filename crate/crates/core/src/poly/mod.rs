//! Exact multivariate polynomials over Q.

mod groebner;
mod points;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::Ring;

pub use groebner::{
    buchberger, degree_truncate, eliminate, ideal_sum, intersect, member, normal_form,
    normal_form_with_cofactors, s_polynomial, GroebnerBasis,
};
pub use points::{vanishing_ideal, vanishing_ideal_by_intersection};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: Vec<u32>,
    deg: u32,
}

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial {
            exps: vec![0; nvars],
            deg: 0,
        }
    }

    pub fn var(nvars: usize, i: usize) -> Monomial {
        let mut m = Monomial::one(nvars);
        m.exps[i] = 1;
        m.deg = 1;
        m
    }

    pub fn from_exps(exps: Vec<u32>) -> Monomial {
        let deg = exps.iter().sum();
        Monomial { exps, deg }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
            deg: self.deg + other.deg,
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.deg <= other.deg && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: other.exps.iter().zip(&self.exps).map(|(a, b)| a - b).collect(),
            deg: other.deg - self.deg,
        }
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial::from_exps(self.exps.iter().zip(&other.exps).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn degree_in(&self, vars: std::ops::Range<usize>) -> u32 {
        self.exps[vars].iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    /// Total degree, then lexicographic with variable 0 largest.
    Grlex,
    /// Variables `>= keep` are compared first (grlex among them), then grlex on
    /// the variables below `keep`; eliminates the upper block.
    Block { keep: usize },
}

fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match *self {
            MonomialOrder::Grlex => a.deg.cmp(&b.deg).then_with(|| a.exps.cmp(&b.exps)),
            MonomialOrder::Block { keep } => {
                let k = keep.min(a.exps.len());
                grlex(&a.exps[k..], &b.exps[k..]).then_with(|| grlex(&a.exps[..k], &b.exps[..k]))
            }
        }
    }
}

/// Names of the variables of a polynomial ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableSpace {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl VariableSpace {
    pub fn named<S: Into<String>>(names: impl IntoIterator<Item = S>) -> VariableSpace {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        VariableSpace { names, index }
    }

    /// `z[q,k]` followed by `blocks` copies `x[i,q,k]`, `q < n`, `k ≤ l`,
    /// `1 ≤ i ≤ blocks`. Variable `z[q,k]` has index `q(l+1)+k` and
    /// `x[i,q,k]` has index `i·n(l+1) + q(l+1)+k`.
    pub fn semantic(n: usize, l: usize, blocks: usize) -> VariableSpace {
        let mut names = Vec::new();
        for q in 0..n {
            for k in 0..=l {
                names.push(format!("z[{q},{k}]"));
            }
        }
        for i in 1..=blocks {
            for q in 0..n {
                for k in 0..=l {
                    names.push(format!("x[{i},{q},{k}]"));
                }
            }
        }
        VariableSpace::named(names)
    }

    pub fn with_extra(&self, name: &str) -> VariableSpace {
        let mut v = self.names.clone();
        v.push(name.to_string());
        VariableSpace::named(v)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    order: MonomialOrder,
    // strictly descending under `order`, no zero coefficients
    terms: Vec<(Monomial, BigRational)>,
}

impl Polynomial {
    pub fn zero(nvars: usize, order: MonomialOrder) -> Polynomial {
        Polynomial {
            nvars,
            order,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, order: MonomialOrder, c: BigRational) -> Polynomial {
        Polynomial::from_terms(nvars, order, [(Monomial::one(nvars), c)])
    }

    pub fn one(nvars: usize, order: MonomialOrder) -> Polynomial {
        Polynomial::constant(nvars, order, BigRational::one())
    }

    pub fn var(nvars: usize, order: MonomialOrder, i: usize) -> Polynomial {
        Polynomial::from_terms(nvars, order, [(Monomial::var(nvars, i), BigRational::one())])
    }

    /// Combines like terms and sorts.
    pub fn from_terms(
        nvars: usize,
        order: MonomialOrder,
        terms: impl IntoIterator<Item = (Monomial, BigRational)>,
    ) -> Polynomial {
        let mut acc: HashMap<Monomial, BigRational> = HashMap::new();
        for (m, c) in terms {
            debug_assert_eq!(m.nvars(), nvars);
            *acc.entry(m).or_insert_with(BigRational::zero) += c;
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        Polynomial {
            nvars,
            order,
            terms,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn terms(&self) -> &[(Monomial, BigRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// A nonzero constant.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.deg == 0
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn leading_coefficient(&self) -> Option<&BigRational> {
        self.terms.first().map(|t| &t.1)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.deg).max().unwrap_or(0)
    }

    /// Largest total degree within a block of variables.
    pub fn degree_in(&self, vars: std::ops::Range<usize>) -> u32 {
        self.terms.iter().map(|t| t.0.degree_in(vars.clone())).max().unwrap_or(0)
    }

    pub fn uses_vars_from(&self, first: usize) -> bool {
        self.terms.iter().any(|t| t.0.exps[first..].iter().any(|&e| e > 0))
    }

    fn compatible(&self, other: &Polynomial) {
        assert_eq!(self.nvars, other.nvars, "polynomials over different rings");
        assert_eq!(self.order, other.order, "polynomials under different orders");
    }

    fn merge(&self, other: &Polynomial, sign: bool) -> Polynomial {
        self.compatible(other);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => self.order.cmp(&a.0, &b.0),
                (Some(_), None) => Ordering::Greater,
                _ => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let (m, c) = &other.terms[j];
                    out.push((m.clone(), if sign { c.clone() } else { -c }));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if sign {
                        &self.terms[i].1 + &other.terms[j].1
                    } else {
                        &self.terms[i].1 - &other.terms[j].1
                    };
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Polynomial {
            nvars: self.nvars,
            order: self.order,
            terms: out,
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.merge(other, true)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.merge(other, false)
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars, self.order);
        }
        Polynomial {
            nvars: self.nvars,
            order: self.order,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// `c·m·self`; the order is preserved by multiplication.
    pub fn mul_term(&self, m: &Monomial, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars, self.order);
        }
        Polynomial {
            nvars: self.nvars,
            order: self.order,
            terms: self.terms.iter().map(|(n, a)| (n.mul(m), a * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.compatible(other);
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(self.nvars, self.order);
        }
        let mut acc: HashMap<Monomial, BigRational> = HashMap::new();
        for (m, a) in &self.terms {
            for (n, b) in &other.terms {
                *acc.entry(m.mul(n)).or_insert_with(BigRational::zero) += a * b;
            }
        }
        Polynomial::from_terms(self.nvars, self.order, acc)
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut r = Polynomial::one(self.nvars, self.order);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Scales so that the leading coefficient is 1.
    pub fn monic(&self) -> Polynomial {
        match self.leading_coefficient() {
            None => self.clone(),
            Some(c) if c.is_one() => self.clone(),
            Some(c) => self.scale(&c.recip()),
        }
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        let mut s = BigRational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (e, x) in m.exps.iter().zip(point) {
                for _ in 0..*e {
                    v *= x;
                }
            }
            s += v;
        }
        s
    }

    /// Replaces variable `i` by `images[i]`; all images share one ring.
    pub fn substitute(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.nvars, "one image per variable expected");
        let (nv, ord) = match images.first() {
            Some(p) => (p.nvars, p.order),
            None => (0, self.order),
        };
        let mut powers: HashMap<(usize, u32), Polynomial> = HashMap::new();
        let mut out = Polynomial::zero(nv, ord);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(nv, ord, c.clone());
            for (i, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = powers.entry((i, e)).or_insert_with(|| images[i].pow(e));
                t = t.mul(p);
            }
            out = out.add(&t);
        }
        out
    }

    /// Moves variable `i` to `map[i]` in a ring with `nvars` variables.
    pub fn map_vars(&self, map: &[usize], nvars: usize, order: MonomialOrder) -> Polynomial {
        Polynomial::from_terms(
            nvars,
            order,
            self.terms.iter().map(|(m, c)| {
                let mut e = vec![0; nvars];
                for (i, &x) in m.exps.iter().enumerate() {
                    if x > 0 {
                        e[map[i]] += x;
                    }
                }
                (Monomial::from_exps(e), c.clone())
            }),
        )
    }

    /// The same polynomial in a ring with `nvars ≥ self.nvars` variables.
    pub fn extend(&self, nvars: usize, order: MonomialOrder) -> Polynomial {
        let map: Vec<usize> = (0..self.nvars).collect();
        self.map_vars(&map, nvars, order)
    }

    /// Drops trailing variables, which must not occur.
    pub fn truncate(&self, nvars: usize, order: MonomialOrder) -> Polynomial {
        assert!(!self.uses_vars_from(nvars), "truncating a variable in use");
        Polynomial::from_terms(
            nvars,
            order,
            self.terms
                .iter()
                .map(|(m, c)| (Monomial::from_exps(m.exps[..nvars].to_vec()), c.clone())),
        )
    }

    pub fn with_order(&self, order: MonomialOrder) -> Polynomial {
        let mut p = self.clone();
        p.order = order;
        p.terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        p
    }

    pub fn display<'a>(&'a self, vars: &'a VariableSpace) -> PolyDisplay<'a> {
        PolyDisplay { p: self, vars }
    }

    /// Parses `3/2*z[1,0]^2*x[2,1,1] - 1`, using the names of `vars`.
    pub fn parse(text: &str, vars: &VariableSpace, order: MonomialOrder) -> Result<Polynomial> {
        PolyParser {
            s: text.as_bytes(),
            pos: 0,
            vars,
            order,
        }
        .parse()
    }
}

pub struct PolyDisplay<'a> {
    p: &'a Polynomial,
    vars: &'a VariableSpace,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.p.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            let mut factors = Vec::new();
            if m.deg == 0 || !a.is_one() {
                factors.push(a.to_string());
            }
            for (v, &e) in m.exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars.name(v).to_string()),
                    _ => factors.push(format!("{}^{e}", self.vars.name(v))),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

struct PolyParser<'a> {
    s: &'a [u8],
    pos: usize,
    vars: &'a VariableSpace,
    order: MonomialOrder,
}

impl PolyParser<'_> {
    fn fail<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse {
            line: 1,
            column: self.pos + 1,
            message: msg.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Polynomial> {
        let n = self.vars.len();
        let mut terms = Vec::new();
        let mut sign = true;
        if self.peek() == Some(b'-') {
            sign = false;
            self.pos += 1;
        }
        loop {
            let (m, c) = self.term()?;
            terms.push((m, if sign { c } else { -c }));
            match self.peek() {
                None => break,
                Some(b'+') => sign = true,
                Some(b'-') => sign = false,
                Some(_) => return self.fail("expected `+` or `-`"),
            }
            self.pos += 1;
        }
        Ok(Polynomial::from_terms(n, self.order, terms))
    }

    fn number(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.fail("expected a number");
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().unwrap())
    }

    fn term(&mut self) -> Result<(Monomial, BigRational)> {
        let mut exps = vec![0u32; self.vars.len()];
        let mut c = BigRational::one();
        loop {
            match self.peek() {
                Some(d) if d.is_ascii_digit() => {
                    let num = self.number()?;
                    let den = if self.peek() == Some(b'/') {
                        self.pos += 1;
                        self.number()?
                    } else {
                        BigInt::one()
                    };
                    if den.is_zero() {
                        return self.fail("zero denominator");
                    }
                    c *= BigRational::new(num, den);
                }
                Some(ch) if ch.is_ascii_alphabetic() || ch == b'_' => {
                    let start = self.pos;
                    while self.pos < self.s.len() {
                        let b = self.s[self.pos];
                        if b.is_ascii_alphanumeric() || b == b'_' || b == b'\'' {
                            self.pos += 1;
                        } else if b == b'[' {
                            while self.pos < self.s.len() && self.s[self.pos] != b']' {
                                self.pos += 1;
                            }
                            self.pos += 1;
                            break;
                        } else {
                            break;
                        }
                    }
                    let name: String = std::str::from_utf8(&self.s[start..self.pos.min(self.s.len())])
                        .unwrap()
                        .chars()
                        .filter(|c| !c.is_whitespace())
                        .collect();
                    let Some(v) = self.vars.lookup(&name) else {
                        return self.fail(&format!("unknown variable `{name}`"));
                    };
                    let mut e = 1u32;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        e = match u32::try_from(self.number()?) {
                            Ok(e) => e,
                            Err(_) => return self.fail("exponent too large"),
                        };
                    }
                    exps[v] += e;
                }
                _ => return self.fail("expected a number or a variable"),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                return Ok((Monomial::from_exps(exps), c));
            }
        }
    }
}

/// The polynomial ring as a [`Ring`] context.
#[derive(Debug, Clone, Copy)]
pub struct PolyRing {
    pub nvars: usize,
    pub order: MonomialOrder,
}

impl Ring for PolyRing {
    type Elem = Polynomial;

    fn zero(&self) -> Polynomial {
        Polynomial::zero(self.nvars, self.order)
    }
    fn one(&self) -> Polynomial {
        Polynomial::one(self.nvars, self.order)
    }
    fn add(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        a.add(b)
    }
    fn mul(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        a.mul(b)
    }
    fn from_int(&self, c: &BigInt) -> Polynomial {
        Polynomial::constant(self.nvars, self.order, BigRational::from_integer(c.clone()))
    }
    fn is_zero(&self, a: &Polynomial) -> bool {
        a.is_zero()
    }
}

#[cfg(test)]
mod tests;
