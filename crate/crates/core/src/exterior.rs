//! Multivectors and Kähler forms over a presentation, and the exterior
//! calculus relating them.

use std::collections::BTreeMap;
use std::marker::PhantomData;

use num_traits::One;

use crate::blade::Blade;
use crate::error::{Error, Result};
use crate::presentation::SmoothPresentation;
use crate::ring::{rat, Poly, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VectorKind {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormKind {}

/// A homogeneous element `sum_J c_J e_J` of degree `degree`, canonical for
/// the presentation that built it; zero coefficients are never stored.
#[derive(Debug)]
pub struct Graded<K> {
    owner: u64,
    degree: usize,
    terms: BTreeMap<Blade, Poly>,
    kind: PhantomData<K>,
}

impl<K> Clone for Graded<K> {
    fn clone(&self) -> Self {
        Self::from_parts(self.owner, self.degree, self.terms.clone())
    }
}

/// Zero elements compare equal regardless of degree.
impl<K> PartialEq for Graded<K> {
    fn eq(&self, other: &Self) -> bool {
        self.owner == other.owner
            && self.terms == other.terms
            && (self.degree == other.degree || self.terms.is_empty())
    }
}

impl<K> Eq for Graded<K> {}

/// `sum_J c_J (dx_J)*`.
pub type Multivector = Graded<VectorKind>;
/// `sum_J c_J dx_J`.
pub type KForm = Graded<FormKind>;

impl<K> Graded<K> {
    pub(crate) fn from_parts(owner: u64, degree: usize, terms: BTreeMap<Blade, Poly>) -> Self {
        Graded {
            owner,
            degree,
            terms,
            kind: PhantomData,
        }
    }

    pub(crate) fn owner(&self) -> u64 {
        self.owner
    }

    pub fn zero(pres: &SmoothPresentation, degree: usize) -> Self {
        Self::from_parts(pres.id(), degree, BTreeMap::new())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Blade, Poly> {
        &self.terms
    }

    pub fn coeff(&self, b: Blade) -> Option<&Poly> {
        self.terms.get(&b)
    }

    /// The degree-0 coefficient.
    pub fn scalar_part(&self, nvars: usize) -> Poly {
        self.terms
            .get(&Blade::EMPTY)
            .cloned()
            .unwrap_or_else(|| Poly::zero(nvars))
    }

    fn combine(&self, other: &Self, c: &Rational) -> Self {
        assert_eq!(self.owner, other.owner, "operands from different presentations");
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            let mut r = other.scale(c);
            r.owner = self.owner;
            return r;
        }
        assert_eq!(self.degree, other.degree, "adding elements of different degree");
        let mut terms = self.terms.clone();
        for (b, p) in &other.terms {
            let e = terms.entry(*b).or_insert_with(|| Poly::zero(p.nvars()));
            e.add_assign_scaled(p, c);
            if e.is_zero() {
                terms.remove(b);
            }
        }
        Self::from_parts(self.owner, self.degree, terms)
    }

    /// Sum; a zero operand adopts the other's degree.
    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, &Rational::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, &-Rational::one())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(b, p)| (*b, p.scale(c)))
            .filter(|(_, p)| !p.is_zero())
            .collect();
        Self::from_parts(self.owner, self.degree, terms)
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&rat(c))
    }
}

fn sign_rat(s: i32) -> Rational {
    rat(s as i64)
}

fn parity(k: usize) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub(crate) fn minus_one_pow(k: usize) -> Rational {
    rat(parity(k))
}

impl SmoothPresentation {
    /// Canonical multivector from representative terms.
    pub fn multivector(&self, p: usize, terms: impl IntoIterator<Item = (Blade, Poly)>) -> Multivector {
        let mut map: BTreeMap<Blade, Poly> = BTreeMap::new();
        for (b, c) in terms {
            let e = map.entry(b).or_insert_with(|| Poly::zero(self.nvars()));
            *e = e.add(&c);
        }
        self.canonicalize_mv(p, map)
    }

    /// Canonical form from representative terms.
    pub fn form(&self, q: usize, terms: impl IntoIterator<Item = (Blade, Poly)>) -> KForm {
        let mut map: BTreeMap<Blade, Poly> = BTreeMap::new();
        for (b, c) in terms {
            let e = map.entry(b).or_insert_with(|| Poly::zero(self.nvars()));
            *e = e.add(&c);
        }
        self.canonicalize_form(q, map)
    }

    pub fn scalar_mv(&self, a: &Poly) -> Multivector {
        self.multivector(0, [(Blade::EMPTY, a.clone())])
    }

    pub fn scalar_form(&self, a: &Poly) -> KForm {
        self.form(0, [(Blade::EMPTY, a.clone())])
    }

    /// The derivation `sum_j values[j] (dx_j)*`, where `values[j]` is its
    /// value on `x_j`.
    pub fn derivation_from_values(&self, values: &[Poly]) -> Multivector {
        self.multivector(
            1,
            values.iter().enumerate().map(|(j, v)| (Blade::single(j), v.clone())),
        )
    }

    /// The multivector with `F(x_L) = value(L)` on every sorted `p`-subset `L`.
    pub fn mv_from_generator_values(&self, p: usize, mut value: impl FnMut(Blade) -> Poly) -> Multivector {
        if p > self.dim() {
            return Multivector::zero(self, p);
        }
        let terms: Vec<_> = Blade::subsets(self.nvars(), p)
            .into_iter()
            .map(|l| (l, value(l)))
            .collect();
        self.multivector(p, terms)
    }

    /// `a * x` for a canonical `x`.
    pub fn scale_poly<K>(&self, a: &Poly, x: &Graded<K>) -> Graded<K> {
        let ring = self.ring();
        let terms = x
            .terms()
            .iter()
            .map(|(b, c)| (*b, ring.mul(a, c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Graded::from_parts(x.owner(), x.degree(), terms)
    }

    /// `da` for a function `a`.
    pub fn differential(&self, a: &Poly) -> KForm {
        let terms: Vec<_> = (0..self.nvars())
            .map(|i| (Blade::single(i), self.dual_derivation_raw(i, a)))
            .collect();
        self.form(1, terms)
    }
}

fn wedge_terms(
    pres: &SmoothPresentation,
    a: &BTreeMap<Blade, Poly>,
    b: &BTreeMap<Blade, Poly>,
) -> BTreeMap<Blade, Poly> {
    let mut out: BTreeMap<Blade, Poly> = BTreeMap::new();
    for (j, f) in a {
        for (k, g) in b {
            if let Some(s) = j.wedge_sign(*k) {
                let e = out.entry(j.union(*k)).or_insert_with(|| Poly::zero(pres.nvars()));
                e.add_assign_scaled(&f.mul_raw(g), &sign_rat(s));
            }
        }
    }
    out
}

pub fn mv_wedge(pres: &SmoothPresentation, f: &Multivector, g: &Multivector) -> Result<Multivector> {
    pres.check_owner(f)?;
    pres.check_owner(g)?;
    let p = f.degree() + g.degree();
    Ok(pres.canonicalize_mv(p, wedge_terms(pres, f.terms(), g.terms())))
}

pub fn form_wedge(pres: &SmoothPresentation, a: &KForm, b: &KForm) -> Result<KForm> {
    pres.check_owner(a)?;
    pres.check_owner(b)?;
    let q = a.degree() + b.degree();
    Ok(pres.canonicalize_form(q, wedge_terms(pres, a.terms(), b.terms())))
}

/// Determinant of a square matrix of representatives, by cofactor expansion
/// along the first row. Not reduced.
fn det_raw(m: &[Vec<Poly>], nvars: usize) -> Poly {
    let k = m.len();
    if k == 0 {
        return Poly::one(nvars);
    }
    let cols: Vec<usize> = (0..k).collect();
    fn rec(m: &[Vec<Poly>], row: usize, cols: &[usize], nvars: usize) -> Poly {
        if cols.len() == 1 {
            return m[row][cols[0]].clone();
        }
        let mut acc = Poly::zero(nvars);
        for (b, &c) in cols.iter().enumerate() {
            if m[row][c].is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&d| d != c).collect();
            let minor = rec(m, row + 1, &rest, nvars);
            acc.add_assign_scaled(&m[row][c].mul_raw(&minor), &rat(parity(b)));
        }
        acc
    }
    rec(m, 0, &cols, nvars)
}

/// `F(a_1, .., a_p) = sum_J f_J det[(dx_{J_i})*(a_j)]`.
pub fn mv_apply(pres: &SmoothPresentation, f: &Multivector, args: &[Poly]) -> Result<Poly> {
    pres.check_owner(f)?;
    if args.len() != f.degree() {
        return Err(Error::ArityMismatch {
            expected: f.degree(),
            got: args.len(),
        });
    }
    for a in args {
        pres.check_poly(a)?;
    }
    Ok(apply_raw(pres, f, args))
}

pub(crate) fn apply_raw(pres: &SmoothPresentation, f: &Multivector, args: &[Poly]) -> Poly {
    let r = pres.nvars();
    if f.is_zero() {
        return Poly::zero(r);
    }
    if args.is_empty() {
        return f.scalar_part(r);
    }
    // d[i][b] = (dx_i)*(args[b])
    let d: Vec<Vec<Poly>> = (0..r)
        .map(|i| args.iter().map(|a| pres.dual_derivation_raw(i, a)).collect())
        .collect();
    let mut acc = Poly::zero(r);
    for (j, c) in f.terms() {
        let rows: Vec<Vec<Poly>> = j.indices().iter().map(|&i| d[i].clone()).collect();
        let det = det_raw(&rows, r);
        if !det.is_zero() {
            acc = acc.add(&c.mul_raw(&det));
        }
    }
    pres.ring().normal_form(&acc)
}

/// Evaluation of `F` on the generator tuple `x_L`.
pub(crate) fn apply_on_generators(pres: &SmoothPresentation, f: &Multivector, l: Blade) -> Poly {
    let mut acc = Poly::zero(pres.nvars());
    for (j, c) in f.terms() {
        let det = pres.minor(*j, l);
        if !det.is_zero() {
            acc = acc.add(&c.mul_raw(&det));
        }
    }
    pres.ring().normal_form(&acc)
}

/// `sum_{J,K} f_J c_K det E_{J,K}`.
pub fn pair(pres: &SmoothPresentation, f: &Multivector, w: &KForm) -> Result<Poly> {
    pres.check_owner(f)?;
    pres.check_owner(w)?;
    if f.degree() != w.degree() {
        return Err(Error::DegreeMismatch {
            left: f.degree(),
            right: w.degree(),
        });
    }
    Ok(pair_terms(pres, f.terms(), w.terms()))
}

fn pair_terms(pres: &SmoothPresentation, f: &BTreeMap<Blade, Poly>, w: &BTreeMap<Blade, Poly>) -> Poly {
    let mut acc = Poly::zero(pres.nvars());
    for (j, fj) in f {
        for (k, det) in pres.minors_row(*j) {
            if let Some(ck) = w.get(k) {
                acc = acc.add(&fj.mul_raw(ck).mul_raw(det));
            }
        }
    }
    pres.ring().normal_form(&acc)
}

/// `iota_F(c dx_K) = sum_{A in K, |A| = p} sgn(A, K\A) c F(x_A) dx_{K\A}`;
/// zero of degree 0 when `q < p`.
pub fn contract_form(pres: &SmoothPresentation, f: &Multivector, w: &KForm) -> Result<KForm> {
    pres.check_owner(f)?;
    pres.check_owner(w)?;
    let (p, q) = (f.degree(), w.degree());
    if q < p {
        return Ok(KForm::zero(pres, 0));
    }
    let mut values: BTreeMap<Blade, Poly> = BTreeMap::new();
    let mut out: BTreeMap<Blade, Poly> = BTreeMap::new();
    for (k, c) in w.terms() {
        for a in k.sub_blades(p) {
            let fa = values
                .entry(a)
                .or_insert_with(|| apply_on_generators(pres, f, a));
            if fa.is_zero() {
                continue;
            }
            let rest = k.minus(a);
            let s = a.wedge_sign(rest).unwrap();
            let e = out.entry(rest).or_insert_with(|| Poly::zero(pres.nvars()));
            e.add_assign_scaled(&c.mul_raw(fa), &sign_rat(s));
        }
    }
    Ok(pres.canonicalize_form(q - p, out))
}

/// `(iota_w F)(x_L) = F(dx_L ^ w)`; zero of degree 0 when `q < p`.
pub fn contract_mv(pres: &SmoothPresentation, w: &KForm, f: &Multivector) -> Result<Multivector> {
    pres.check_owner(f)?;
    pres.check_owner(w)?;
    let (p, q) = (w.degree(), f.degree());
    if q < p {
        return Ok(Multivector::zero(pres, 0));
    }
    let m = q - p;
    if m > pres.dim() || f.is_zero() || w.is_zero() {
        return Ok(Multivector::zero(pres, m));
    }
    let mut out = BTreeMap::new();
    for l in Blade::subsets(pres.nvars(), m) {
        let mut lw: BTreeMap<Blade, Poly> = BTreeMap::new();
        for (k, c) in w.terms() {
            if let Some(s) = l.wedge_sign(*k) {
                lw.insert(l.union(*k), c.scale(&sign_rat(s)));
            }
        }
        let v = pair_terms(pres, f.terms(), &lw);
        if !v.is_zero() {
            out.insert(l, v);
        }
    }
    Ok(Graded::from_parts(pres.id(), m, out))
}

/// `d(sum_J c_J dx_J) = sum_J sum_i (dx_i)*(c_J) dx_i ^ dx_J`.
pub fn de_rham(pres: &SmoothPresentation, w: &KForm) -> Result<KForm> {
    pres.check_owner(w)?;
    let mut out: BTreeMap<Blade, Poly> = BTreeMap::new();
    for (j, c) in w.terms() {
        for i in 0..pres.nvars() {
            if j.contains(i) {
                continue;
            }
            let di = pres.dual_derivation_raw(i, c);
            if di.is_zero() {
                continue;
            }
            let s = Blade::single(i).wedge_sign(*j).unwrap();
            let e = out
                .entry(Blade::single(i).union(*j))
                .or_insert_with(|| Poly::zero(pres.nvars()));
            e.add_assign_scaled(&di, &sign_rat(s));
        }
    }
    Ok(pres.canonicalize_form(w.degree() + 1, out))
}

/// `L_xi = d iota_xi + iota_xi d`.
pub fn lie_derivative(pres: &SmoothPresentation, xi: &Multivector, w: &KForm) -> Result<KForm> {
    if xi.degree() != 1 {
        return Err(Error::DegreeMismatch {
            left: xi.degree(),
            right: 1,
        });
    }
    let second = contract_form(pres, xi, &de_rham(pres, w)?)?;
    if w.degree() == 0 {
        return Ok(second);
    }
    let first = de_rham(pres, &contract_form(pres, xi, w)?)?;
    Ok(first.add(&second))
}

/// Schouten–Nijenhuis bracket, evaluated on generator tuples:
/// `[P,Q](a) = (-1)^{(p-1)(q-1)} sum_{S_{q,p-1}} sgn P(Q(a'), a'') - sum_{S_{p,q-1}} sgn Q(P(a'), a'')`.
pub fn schouten(pres: &SmoothPresentation, pm: &Multivector, qm: &Multivector) -> Result<Multivector> {
    pres.check_owner(pm)?;
    pres.check_owner(qm)?;
    let (p, q) = (pm.degree(), qm.degree());
    if p + q == 0 {
        return Ok(Multivector::zero(pres, 0));
    }
    let m = p + q - 1;
    if m > pres.dim() || pm.is_zero() || qm.is_zero() {
        return Ok(Multivector::zero(pres, m));
    }
    let r = pres.nvars();
    let first_sign = if p >= 1 && q >= 1 {
        minus_one_pow((p - 1) * (q - 1))
    } else {
        // (-1)^{(p-1)(q-1)} with one factor equal to -1
        minus_one_pow(if p == 0 { q + 1 } else { p + 1 })
    };
    Ok(pres.mv_from_generator_values(m, |l| {
        let gens: Vec<usize> = l.indices();
        let mut acc = Poly::zero(r);
        if p >= 1 {
            // sum over S_{q, p-1}: inner Q on q generators
            for inner in Blade::subsets(m, q) {
                let (val, s) = nested_value(pres, pm, qm, &gens, inner);
                acc.add_assign_scaled(&val, &(first_sign.clone() * sign_rat(s)));
            }
        }
        if q >= 1 {
            for inner in Blade::subsets(m, p) {
                let (val, s) = nested_value(pres, qm, pm, &gens, inner);
                acc.add_assign_scaled(&val, &-sign_rat(s));
            }
        }
        pres.ring().normal_form(&acc)
    }))
}

/// `outer(inner(a_S), a_rest)` for positions `S` of `gens`, with the shuffle sign.
fn nested_value(
    pres: &SmoothPresentation,
    outer: &Multivector,
    inner: &Multivector,
    gens: &[usize],
    positions: Blade,
) -> (Poly, i32) {
    let r = pres.nvars();
    let all = Blade::from_indices(&(0..gens.len()).collect::<Vec<_>>()).unwrap();
    let rest = all.minus(positions);
    let s = positions.wedge_sign(rest).unwrap();
    let inner_gens = Blade::from_indices(
        &positions.indices().iter().map(|&k| gens[k]).collect::<Vec<_>>(),
    )
    .unwrap();
    let v = apply_on_generators(pres, inner, inner_gens);
    if v.is_zero() {
        return (Poly::zero(r), s);
    }
    let mut args = vec![v];
    args.extend(rest.indices().iter().map(|&k| Poly::var(r, gens[k])));
    (apply_raw(pres, outer, &args), s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane() -> SmoothPresentation {
        SmoothPresentation::polynomial(&["x", "y"])
    }

    fn b(ix: &[usize]) -> Blade {
        Blade::from_indices(ix).unwrap()
    }

    #[test]
    fn wedge_and_apply_on_plane() {
        let pr = plane();
        let one = pr.ring().one();
        let dx = pr.multivector(1, [(b(&[0]), one.clone())]);
        let dy = pr.multivector(1, [(b(&[1]), one.clone())]);
        let w = mv_wedge(&pr, &dx, &dy).unwrap();
        assert_eq!(w.coeff(b(&[0, 1])), Some(&one));
        let x = pr.ring().var(0);
        let y = pr.ring().var(1);
        let x2y = x.mul_raw(&x).mul_raw(&y);
        let v = mv_apply(&pr, &w, &[x2y, y.clone()]).unwrap();
        assert_eq!(pr.poly_string(&v), "2*x*y");
        assert_eq!(mv_apply(&pr, &w, &[y.clone(), y.clone()]).unwrap(), pr.ring().zero());
        assert!(matches!(mv_apply(&pr, &w, &[y]), Err(Error::ArityMismatch { .. })));
        let xdx = pr.multivector(1, [(b(&[0]), x)]);
        assert!(mv_wedge(&pr, &dx, &xdx).unwrap().is_zero());
    }

    #[test]
    fn contractions_on_plane() {
        let pr = plane();
        let one = pr.ring().one();
        let dx_dy = pr.form(2, [(b(&[0, 1]), one.clone())]);
        let px = pr.multivector(1, [(b(&[0]), one.clone())]);
        let pxy = pr.multivector(2, [(b(&[0, 1]), one.clone())]);
        let dy = pr.form(1, [(b(&[1]), one.clone())]);
        assert_eq!(contract_form(&pr, &px, &dx_dy).unwrap(), dy);
        assert_eq!(contract_form(&pr, &pxy, &dx_dy).unwrap(), pr.scalar_form(&one));
        let dx = pr.form(1, [(b(&[0]), one.clone())]);
        assert!(contract_form(&pr, &pxy, &dx).unwrap().is_zero());
        let py = pr.multivector(1, [(b(&[1]), one.clone())]);
        assert_eq!(contract_mv(&pr, &dx, &pxy).unwrap(), py.neg());
    }

    #[test]
    fn de_rham_and_lie() {
        let pr = plane();
        let x = pr.ring().var(0);
        let y = pr.ring().var(1);
        let x2y = x.mul_raw(&x).mul_raw(&y);
        let d = de_rham(&pr, &pr.scalar_form(&x2y)).unwrap();
        assert_eq!(d.coeff(b(&[0])).map(|p| pr.poly_string(p)), Some("2*x*y".into()));
        assert_eq!(d.coeff(b(&[1])).map(|p| pr.poly_string(p)), Some("x^2".into()));
        let ydx = pr.form(1, [(b(&[0]), y.clone())]);
        let one = pr.ring().one();
        let vol = pr.form(2, [(b(&[0, 1]), one.clone())]);
        assert_eq!(de_rham(&pr, &ydx).unwrap(), vol.neg());
        let xpx = pr.multivector(1, [(b(&[0]), x.clone())]);
        assert_eq!(lie_derivative(&pr, &xpx, &vol).unwrap(), vol);
        let px = pr.multivector(1, [(b(&[0]), one)]);
        assert!(lie_derivative(&pr, &px, &vol).unwrap().is_zero());
    }

    #[test]
    fn schouten_basics() {
        let pr = plane();
        let one = pr.ring().one();
        let x = pr.ring().var(0);
        let px = pr.multivector(1, [(b(&[0]), one.clone())]);
        let xpx = pr.multivector(1, [(b(&[0]), x.clone())]);
        assert_eq!(schouten(&pr, &px, &xpx).unwrap(), px);
        let pi = pr.multivector(2, [(b(&[0, 1]), one.clone())]);
        assert!(schouten(&pr, &pi, &pi).unwrap().is_zero());
        let x2 = x.mul_raw(&x);
        let a = pr.scalar_mv(&x2);
        let pa = schouten(&pr, &px, &a).unwrap();
        assert_eq!(pa, pr.scalar_mv(&x.scale(&rat(2))));
        // [a, Q] = -Q(a) for a derivation Q
        let ap = schouten(&pr, &a, &px).unwrap();
        assert_eq!(ap, pr.scalar_mv(&x.scale(&rat(-2))));
        // [d_x ^ d_y, x d_x] = d_x ^ d_y (decomposable formula)
        assert_eq!(schouten(&pr, &pi, &xpx).unwrap(), pi);
    }
}
