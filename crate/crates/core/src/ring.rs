//! Sparse multivariate polynomials over the rationals, reduced modulo a
//! small confluent rewrite system.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent vector, ordered graded-lexicographically (total degree first,
/// then the first differing exponent, larger exponent is larger).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect())
    }

    fn shares_variable(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| *a > 0 && *b > 0)
    }

    /// All monomials in `nvars` variables of total degree exactly `d`,
    /// in descending graded-lex order.
    pub fn of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        fn rec(prefix: &mut Vec<u32>, left: usize, rest: u32, out: &mut Vec<Monomial>) {
            if left == 1 {
                prefix.push(rest);
                out.push(Monomial(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in (0..=rest).rev() {
                prefix.push(e);
                rec(prefix, left - 1, rest - e, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if nvars == 0 {
            if d == 0 {
                out.push(Monomial(vec![]));
            }
            return out;
        }
        rec(&mut Vec::new(), nvars, d, &mut out);
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial; no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Poly::monomial(nvars, Monomial::one(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Rational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Poly::monomial(nvars, Monomial::var(nvars, i), Rational::one())
    }

    pub fn monomial(nvars: usize, m: Monomial, c: Rational) -> Self {
        debug_assert_eq!(m.nvars(), nvars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// `Some(c)` if the polynomial is a constant (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Maximal total degree; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// `Some(d)` if every term has total degree `d`; `None` for zero or mixed.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Monomial::degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Poly, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, d) in &other.terms {
            self.add_term(m.clone(), d * c);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut r = self.clone();
        r.add_assign_scaled(other, &Rational::one());
        r
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut r = self.clone();
        r.add_assign_scaled(other, &-Rational::one());
        r
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(n, d)| (n.mul(m), d * c)).collect(),
        }
    }

    /// Product of representatives, without reduction.
    pub fn mul_raw(&self, other: &Poly) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                r.add_term(m.mul(n), c * d);
            }
        }
        r
    }

    /// Formal partial derivative in generator `i` (0-based).
    pub fn derivative(&self, i: usize) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut n = m.clone();
            n.0[i] -= 1;
            r.add_term(n, c * rat(e as i64));
        }
        r
    }
}

fn permutations(r: usize) -> Vec<Vec<usize>> {
    if r > 8 {
        return vec![(0..r).collect()];
    }
    let mut out = vec![vec![]];
    for k in 0..r {
        let mut next = Vec::new();
        for p in &out {
            for pos in 0..=k {
                let mut q = p.clone();
                q.insert(pos, k);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

fn orientable(rules: &[RewriteRule], r: usize) -> bool {
    let key = |m: &Monomial, perm: &[usize], graded: bool| {
        let mut k: Vec<u32> = Vec::with_capacity(r + 1);
        if graded {
            k.push(m.degree());
        }
        k.extend(perm.iter().map(|&i| m.0[i]));
        k
    };
    permutations(r).iter().any(|perm| {
        [true, false].iter().any(|&graded| {
            rules.iter().all(|rule| {
                let lead = key(&rule.lead, perm, graded);
                rule.tail.terms().all(|(m, _)| key(m, perm, graded) < lead)
            })
        })
    })
}

/// A rewrite rule `lead -> tail`; the represented relation is `lead - tail`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RewriteRule {
    pub lead: Monomial,
    pub tail: Poly,
}

impl RewriteRule {
    pub fn relation(&self) -> Poly {
        let mut r = self.tail.neg();
        r.add_term(self.lead.clone(), Rational::one());
        r
    }
}

/// Generator names together with the rewrite system defining the quotient.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ring {
    names: Vec<String>,
    rules: Vec<RewriteRule>,
}

impl Ring {
    pub fn polynomial(names: Vec<String>) -> Self {
        Ring {
            names,
            rules: Vec::new(),
        }
    }

    /// Some lex or graded-lex order (under a permutation of the generators)
    /// must put every tail strictly below its leading monomial, so that
    /// reduction terminates under any strategy. Rules whose
    /// leading monomials share a variable are rejected unless
    /// `assert_confluent` is set.
    pub fn new(names: Vec<String>, rules: Vec<RewriteRule>, assert_confluent: bool) -> Result<Self> {
        let r = names.len();
        for rule in &rules {
            if rule.lead.nvars() != r || rule.tail.nvars() != r {
                return Err(Error::PresentationMismatch);
            }
            if rule.lead.is_one() {
                return Err(Error::UnorientableRules);
            }
        }
        if !rules.is_empty() && !orientable(&rules, r) {
            return Err(Error::UnorientableRules);
        }
        if !assert_confluent {
            for (k, a) in rules.iter().enumerate() {
                for b in &rules[k + 1..] {
                    if a.lead.shares_variable(&b.lead) {
                        let ring = Ring::polynomial(names.clone());
                        return Err(Error::NonConfluentRules {
                            first: ring.monomial_string(&a.lead),
                            second: ring.monomial_string(&b.lead),
                        });
                    }
                }
            }
        }
        Ok(Ring { names, rules })
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn is_free(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn zero(&self) -> Poly {
        Poly::zero(self.nvars())
    }

    pub fn one(&self) -> Poly {
        Poly::one(self.nvars())
    }

    pub fn constant(&self, c: Rational) -> Poly {
        Poly::constant(self.nvars(), c)
    }

    pub fn var(&self, i: usize) -> Poly {
        Poly::var(self.nvars(), i)
    }

    pub fn is_normal(&self, p: &Poly) -> bool {
        p.terms()
            .all(|(m, _)| self.rules.iter().all(|r| !r.lead.divides(m)))
    }

    pub fn is_normal_monomial(&self, m: &Monomial) -> bool {
        self.rules.iter().all(|r| !r.lead.divides(m))
    }

    /// Reduces the largest reducible term until none remains. Each step
    /// replaces a monomial by strictly smaller ones, so this terminates.
    pub fn normal_form(&self, p: &Poly) -> Poly {
        if self.rules.is_empty() {
            return p.clone();
        }
        let mut p = p.clone();
        loop {
            let hit = p.terms.iter().rev().find_map(|(m, _)| {
                self.rules
                    .iter()
                    .find(|r| r.lead.divides(m))
                    .map(|r| (m.clone(), r))
            });
            let Some((m, rule)) = hit else { break };
            let c = p.terms.remove(&m).unwrap();
            let q = rule.lead.quotient_of(&m);
            for (n, d) in rule.tail.terms() {
                p.add_term(n.mul(&q), d * &c);
            }
        }
        p
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.normal_form(&a.mul_raw(b))
    }

    pub fn pow(&self, a: &Poly, e: u32) -> Poly {
        let mut r = self.one();
        for _ in 0..e {
            r = self.mul(&r, a);
        }
        r
    }

    /// Formal partial derivative of the given representative.
    pub fn partial_derivative(&self, p: &Poly, i: usize) -> Result<Poly> {
        if i >= self.nvars() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.nvars(),
            });
        }
        if p.nvars() != self.nvars() {
            return Err(Error::PresentationMismatch);
        }
        Ok(p.derivative(i))
    }

    pub fn poly_equal(&self, p: &Poly, q: &Poly) -> Result<bool> {
        if p.nvars() != self.nvars() || q.nvars() != self.nvars() {
            return Err(Error::PresentationMismatch);
        }
        Ok(self.normal_form(p) == self.normal_form(q))
    }

    pub fn monomial_string(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (i, &e) in m.exponents().iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.names[i].clone()),
                _ => parts.push(format!("{}^{}", self.names[i], e)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    pub fn display<'a>(&'a self, p: &'a Poly) -> PolyDisplay<'a> {
        PolyDisplay { ring: self, poly: p }
    }

    pub fn poly_string(&self, p: &Poly) -> String {
        self.display(p).to_string()
    }
}

pub struct PolyDisplay<'a> {
    ring: &'a Ring,
    poly: &'a Poly,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.poly.terms().rev().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{}", a)?;
            } else if a.is_one() {
                f.write_str(&self.ring.monomial_string(m))?;
            } else {
                write!(f, "{}*{}", a, self.ring.monomial_string(m))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn sphere() -> Ring {
        let r = Ring::polynomial(names(&["x", "y", "z"]));
        let tail = r.one().sub(&r.mul(&r.var(0), &r.var(0))).sub(&r.mul(&r.var(1), &r.var(1)));
        Ring::new(
            names(&["x", "y", "z"]),
            vec![RewriteRule {
                lead: Monomial::from_exponents(vec![0, 0, 2]),
                tail,
            }],
            false,
        )
        .unwrap()
    }

    #[test]
    fn grlex_order() {
        let x = Monomial::from_exponents(vec![1, 0, 0]);
        let y = Monomial::from_exponents(vec![0, 1, 0]);
        let y2 = Monomial::from_exponents(vec![0, 2, 0]);
        let xz = Monomial::from_exponents(vec![1, 0, 1]);
        assert!(x > y);
        assert!(y2 > x);
        assert!(xz < Monomial::from_exponents(vec![1, 1, 0]));
        let all = Monomial::of_degree(3, 2);
        assert_eq!(all.len(), 6);
        assert!(all.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn sphere_reduction() {
        let r = sphere();
        let z = r.var(2);
        let z3 = r.mul(&r.mul(&z, &z), &z);
        assert_eq!(r.poly_string(&z3), "-x^2*z - y^2*z + z");
        let mut rel = r.constant(rat(-1));
        for i in 0..3 {
            rel = rel.add(&r.var(i).mul_raw(&r.var(i)));
        }
        assert!(r.normal_form(&rel).is_zero());
        assert!(r.poly_equal(&r.mul(&z, &z), &r.normal_form(&r.mul(&z, &z))).unwrap());
    }

    #[test]
    fn partials() {
        let r = Ring::polynomial(names(&["x", "y"]));
        let x2y = r.var(0).mul_raw(&r.var(0)).mul_raw(&r.var(1));
        assert_eq!(r.poly_string(&r.partial_derivative(&x2y, 0).unwrap()), "2*x*y");
        assert!(r.partial_derivative(&r.constant(rat(5)), 1).unwrap().is_zero());
        assert_eq!(
            r.partial_derivative(&x2y, 2),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        );
    }

    #[test]
    fn printing() {
        let r = Ring::polynomial(names(&["x", "y"]));
        let p = r.var(0).scale(&ratio(-3, 2)).add(&r.constant(rat(-1))).add(&r.var(1).mul_raw(&r.var(1)));
        assert_eq!(r.poly_string(&p), "y^2 - 3/2*x - 1");
        assert_eq!(r.poly_string(&r.zero()), "0");
    }

    #[test]
    fn overlapping_rules_rejected() {
        let n = names(&["x", "y"]);
        let r0 = Ring::polynomial(n.clone());
        let rules = vec![
            RewriteRule { lead: Monomial::from_exponents(vec![2, 0]), tail: r0.var(1) },
            RewriteRule { lead: Monomial::from_exponents(vec![1, 1]), tail: r0.one() },
        ];
        assert!(matches!(
            Ring::new(n.clone(), rules.clone(), false),
            Err(Error::NonConfluentRules { .. })
        ));
        assert!(Ring::new(n.clone(), rules, true).is_ok());
        let tail = r0.var(0).mul_raw(&r0.var(0)).add(&r0.var(1).mul_raw(&r0.var(1)));
        let bad = vec![RewriteRule { lead: Monomial::from_exponents(vec![1, 1]), tail }];
        assert_eq!(Ring::new(n, bad, false), Err(Error::UnorientableRules));
    }
}
