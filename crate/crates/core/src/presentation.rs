//! Smooth-algebra presentations: generators, rewrite rules, smooth dimension,
//! the dual-basis matrix and volume data.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::One;

use crate::blade::{Blade, MAX_GENERATORS};
use crate::error::{Error, Result};
use crate::exterior::{Graded, KForm, Multivector};
use crate::report::ValidationReport;
use crate::ring::{rat, Poly, Ring};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Minors `det E_{J,K}` of one size, indexed both ways. Only nonzero minors
/// are stored.
#[derive(Clone, Debug, Default)]
struct MinorTable {
    by_row: BTreeMap<Blade, Vec<(Blade, Poly)>>,
    by_col: BTreeMap<Blade, Vec<(Blade, Poly)>>,
}

/// Everything that fixes the algebra `R` and its dual basis `{dx_i, (dx_i)*}`.
///
/// `dual[i][j] = (dx_i)*(x_j)`. Values built from one presentation carry its
/// identity; clones share that identity.
#[derive(Clone, Debug)]
pub struct SmoothPresentation {
    id: u64,
    ring: Ring,
    dim: usize,
    dual: Vec<Vec<Poly>>,
    identity_dual: bool,
    volume_a: BTreeMap<Blade, Poly>,
    volume_b: BTreeMap<Blade, Poly>,
    minors: Vec<MinorTable>,
}

impl SmoothPresentation {
    /// The polynomial ring on `names` with `E = I`, `n = r`, `vol = dx_1 ^ .. ^ dx_r`.
    pub fn polynomial(names: &[&str]) -> Self {
        let ring = Ring::polynomial(names.iter().map(|s| s.to_string()).collect());
        let n = ring.nvars();
        Self::new(ring, n, None, None).expect("free presentation is well formed")
    }

    /// `dual = None` means `E = I`; `volume = None` means `a = b = 1` on the
    /// first `n` generators. Entries are reduced to normal form.
    pub fn new(
        ring: Ring,
        dim: usize,
        dual: Option<Vec<Vec<Poly>>>,
        volume: Option<(BTreeMap<Blade, Poly>, BTreeMap<Blade, Poly>)>,
    ) -> Result<Self> {
        let r = ring.nvars();
        if r > MAX_GENERATORS {
            return Err(Error::InvalidPresentation(format!(
                "at most {MAX_GENERATORS} generators are supported"
            )));
        }
        if dim > r {
            return Err(Error::InvalidPresentation(format!(
                "smooth dimension {dim} exceeds generator count {r}"
            )));
        }
        let (dual, identity_dual) = match dual {
            None => (
                (0..r)
                    .map(|i| (0..r).map(|j| if i == j { ring.one() } else { ring.zero() }).collect())
                    .collect(),
                true,
            ),
            Some(rows) => {
                if rows.len() != r || rows.iter().any(|row| row.len() != r) {
                    return Err(Error::InvalidPresentation(format!(
                        "dual-basis matrix must be {r}x{r}"
                    )));
                }
                let rows: Vec<Vec<Poly>> = rows
                    .iter()
                    .map(|row| row.iter().map(|p| ring.normal_form(p)).collect())
                    .collect();
                let is_id = rows.iter().enumerate().all(|(i, row)| {
                    row.iter().enumerate().all(|(j, p)| {
                        if i == j {
                            p.as_constant().is_some_and(|c| c.is_one())
                        } else {
                            p.is_zero()
                        }
                    })
                });
                (rows, is_id)
            }
        };
        let top = Blade::from_indices(&(0..dim).collect::<Vec<_>>()).unwrap();
        let (volume_a, volume_b) = match volume {
            None => {
                let m: BTreeMap<Blade, Poly> = [(top, ring.one())].into();
                (m.clone(), m)
            }
            Some((a, b)) => {
                for k in a.keys().chain(b.keys()) {
                    if k.degree() != dim || k.indices().iter().any(|&i| i >= r) {
                        return Err(Error::InvalidPresentation(format!(
                            "volume index sets must be {dim}-subsets of the generators"
                        )));
                    }
                }
                let norm = |m: BTreeMap<Blade, Poly>| {
                    m.into_iter()
                        .map(|(k, p)| (k, ring.normal_form(&p)))
                        .filter(|(_, p)| !p.is_zero())
                        .collect::<BTreeMap<_, _>>()
                };
                (norm(a), norm(b))
            }
        };
        for p in volume_a.values().chain(volume_b.values()).chain(dual.iter().flatten()) {
            if p.nvars() != r {
                return Err(Error::PresentationMismatch);
            }
        }
        let mut pres = SmoothPresentation {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            ring,
            dim,
            dual,
            identity_dual,
            volume_a,
            volume_b,
            minors: Vec::new(),
        };
        pres.minors = pres.compute_minors((dim + 1).min(r));
        Ok(pres)
    }

    fn compute_minors(&self, max: usize) -> Vec<MinorTable> {
        let r = self.nvars();
        let mut dets: Vec<BTreeMap<(Blade, Blade), Poly>> = Vec::new();
        dets.push([((Blade::EMPTY, Blade::EMPTY), self.ring.one())].into());
        for q in 1..=max {
            let mut cur = BTreeMap::new();
            for rows in Blade::subsets(r, q) {
                let ri = rows.indices();
                let first = ri[0];
                let rest_rows = rows.minus(Blade::single(first));
                for cols in Blade::subsets(r, q) {
                    // Laplace expansion along the first row
                    let mut acc = Poly::zero(r);
                    for (b, &c) in cols.indices().iter().enumerate() {
                        let e = &self.dual[first][c];
                        if e.is_zero() {
                            continue;
                        }
                        let rest_cols = cols.minus(Blade::single(c));
                        if let Some(m) = dets[q - 1].get(&(rest_rows, rest_cols)) {
                            let sign = if b % 2 == 0 { rat(1) } else { rat(-1) };
                            acc.add_assign_scaled(&e.mul_raw(m), &sign);
                        }
                    }
                    let acc = self.ring.normal_form(&acc);
                    if !acc.is_zero() {
                        cur.insert((rows, cols), acc);
                    }
                }
            }
            dets.push(cur);
        }
        dets.into_iter()
            .map(|d| {
                let mut t = MinorTable::default();
                for ((j, k), p) in d {
                    t.by_row.entry(j).or_default().push((k, p.clone()));
                    t.by_col.entry(k).or_default().push((j, p));
                }
                t
            })
            .collect()
    }

    pub(crate) fn id(&self) -> u64 {
        self.id
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    /// Smooth dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn names(&self) -> &[String] {
        self.ring.names()
    }

    /// No rewrite rules and `E = I`.
    pub fn is_free(&self) -> bool {
        self.ring.is_free() && self.identity_dual
    }

    pub fn has_identity_dual(&self) -> bool {
        self.identity_dual
    }

    pub fn dual_entry(&self, i: usize, j: usize) -> &Poly {
        &self.dual[i][j]
    }

    pub fn volume_a(&self) -> &BTreeMap<Blade, Poly> {
        &self.volume_a
    }

    pub fn volume_b(&self) -> &BTreeMap<Blade, Poly> {
        &self.volume_b
    }

    /// `det E_{J,K}`, zero when `|J| != |K|` or the size exceeds `n + 1`.
    pub fn minor(&self, j: Blade, k: Blade) -> Poly {
        let q = j.degree();
        if q != k.degree() || q >= self.minors.len() {
            return self.ring.zero();
        }
        self.minors[q]
            .by_row
            .get(&j)
            .and_then(|v| v.iter().find(|(kk, _)| *kk == k))
            .map(|(_, p)| p.clone())
            .unwrap_or_else(|| self.ring.zero())
    }

    /// Nonzero `(K, det E_{J,K})` for fixed `J`.
    pub(crate) fn minors_row(&self, j: Blade) -> &[(Blade, Poly)] {
        let q = j.degree();
        self.minors
            .get(q)
            .and_then(|t| t.by_row.get(&j))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Nonzero `(J, det E_{J,K})` for fixed `K`.
    pub(crate) fn minors_col(&self, k: Blade) -> &[(Blade, Poly)] {
        let q = k.degree();
        self.minors
            .get(q)
            .and_then(|t| t.by_col.get(&k))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.nvars() {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.nvars(),
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_owner<K>(&self, x: &Graded<K>) -> Result<()> {
        if x.owner() == self.id {
            Ok(())
        } else {
            Err(Error::PresentationMismatch)
        }
    }

    pub(crate) fn check_poly(&self, p: &Poly) -> Result<()> {
        if p.nvars() == self.nvars() {
            Ok(())
        } else {
            Err(Error::PresentationMismatch)
        }
    }

    /// `(dx_i)*(a)` for `i` 0-based.
    pub fn dual_derivation(&self, i: usize, a: &Poly) -> Result<Poly> {
        self.check_index(i)?;
        self.check_poly(a)?;
        Ok(self.dual_derivation_raw(i, a))
    }

    pub(crate) fn dual_derivation_raw(&self, i: usize, a: &Poly) -> Poly {
        if self.identity_dual {
            return self.ring.normal_form(&a.derivative(i));
        }
        let mut acc = Poly::zero(self.nvars());
        for (j, e) in self.dual[i].iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let da = a.derivative(j);
            if !da.is_zero() {
                acc = acc.add(&da.mul_raw(e));
            }
        }
        self.ring.normal_form(&acc)
    }

    /// Projects a representative onto `Omega^q(R)`: `c'_K = sum_J c_J det E_{K,J}`.
    pub fn canonicalize_form(&self, q: usize, terms: BTreeMap<Blade, Poly>) -> KForm {
        let terms = self.project(q, terms, true);
        Graded::from_parts(self.id, q, terms)
    }

    /// Projects a representative onto `X^p(R)`: `f'_K = sum_J f_J det E_{J,K}`.
    pub fn canonicalize_mv(&self, p: usize, terms: BTreeMap<Blade, Poly>) -> Multivector {
        let terms = self.project(p, terms, false);
        Graded::from_parts(self.id, p, terms)
    }

    fn project(&self, q: usize, terms: BTreeMap<Blade, Poly>, form: bool) -> BTreeMap<Blade, Poly> {
        if q > self.dim {
            return BTreeMap::new();
        }
        let mut normal: BTreeMap<Blade, Poly> = BTreeMap::new();
        for (b, p) in terms {
            debug_assert_eq!(b.degree(), q);
            let p = self.ring.normal_form(&p);
            if !p.is_zero() {
                normal.insert(b, p);
            }
        }
        if self.identity_dual {
            return normal;
        }
        let mut out: BTreeMap<Blade, Poly> = BTreeMap::new();
        for (j, c) in &normal {
            let list = if form { self.minors_col(*j) } else { self.minors_row(*j) };
            for (k, det) in list {
                let e = out.entry(*k).or_insert_with(|| Poly::zero(self.nvars()));
                *e = e.add(&c.mul_raw(det));
            }
        }
        out.into_iter()
            .map(|(k, p)| (k, self.ring.normal_form(&p)))
            .filter(|(_, p)| !p.is_zero())
            .collect()
    }

    /// `vol = sum_I a_I dx_I`.
    pub fn vol(&self) -> KForm {
        self.canonicalize_form(self.dim, self.volume_a.clone())
    }

    /// `vol* = sum_I b_I (dx_I)*`.
    pub fn vol_star(&self) -> Multivector {
        self.canonicalize_mv(self.dim, self.volume_b.clone())
    }

    pub fn poly_string(&self, p: &Poly) -> String {
        self.ring.poly_string(p)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_presentation(self)
    }
}

/// Runs every necessary condition on `(E, a, b)` and reports residues.
pub fn validate_presentation(pres: &SmoothPresentation) -> ValidationReport {
    let ring = pres.ring();
    let r = pres.nvars();
    let n = pres.dim();
    let show = |p: &Poly| ring.poly_string(p);
    let name = |i: usize| pres.names()[i].clone();
    let mut rep = ValidationReport::new();

    let mut trace = ring.zero();
    for i in 0..r {
        trace = trace.add(pres.dual_entry(i, i));
    }
    let residue = trace.sub(&ring.constant(rat(n as i64)));
    let witnesses = if residue.is_zero() {
        vec![]
    } else {
        vec![(String::new(), show(&residue))]
    };
    rep.group("trace", format!("trace = {}", show(&trace)), witnesses);

    let mut witnesses = Vec::new();
    for i in 0..r {
        for j in 0..r {
            let mut acc = pres.dual_entry(i, j).neg();
            for k in 0..r {
                acc = acc.add(&pres.dual_entry(i, k).mul_raw(pres.dual_entry(k, j)));
            }
            let acc = ring.normal_form(&acc);
            if !acc.is_zero() {
                witnesses.push((format!("[{},{}]", name(i), name(j)), show(&acc)));
            }
        }
    }
    rep.group("idempotency", "", witnesses);

    let mut witnesses = Vec::new();
    for rule in ring.rules() {
        let rho = rule.relation();
        for i in 0..r {
            let mut acc = ring.zero();
            for j in 0..r {
                acc = acc.add(&pres.dual_entry(i, j).mul_raw(&rho.derivative(j)));
            }
            let acc = ring.normal_form(&acc);
            if !acc.is_zero() {
                witnesses.push((
                    format!("[{}; {}]", show(&rho), name(i)),
                    show(&acc),
                ));
            }
        }
    }
    rep.group("relation_gradients", "", witnesses);

    let mut sum = ring.zero();
    for (k, a) in pres.volume_a() {
        if let Some(b) = pres.volume_b().get(k) {
            sum = sum.add(&a.mul_raw(b));
        }
    }
    let sum = ring.normal_form(&sum);
    let residue = sum.sub(&ring.one());
    let witnesses = if residue.is_zero() {
        vec![]
    } else {
        vec![(String::new(), show(&residue))]
    };
    rep.group("volume_normalization", format!("sum a_I b_I = {}", show(&sum)), witnesses);

    let blade_name = |b: Blade| {
        b.indices().iter().map(|&i| name(i)).collect::<Vec<_>>().join(",")
    };
    let zero = ring.zero();
    let mut witnesses = Vec::new();
    let vol = pres.vol();
    let vol_star = pres.vol_star();
    for k in Blade::subsets(r, n) {
        let a = pres.volume_a().get(&k).unwrap_or(&zero);
        let d = vol.coeff(k).unwrap_or(&zero).sub(a);
        if !d.is_zero() {
            witnesses.push((format!("[a({})]", blade_name(k)), show(&d)));
        }
        let b = pres.volume_b().get(&k).unwrap_or(&zero);
        let d = vol_star.coeff(k).unwrap_or(&zero).sub(b);
        if !d.is_zero() {
            witnesses.push((format!("[b({})]", blade_name(k)), show(&d)));
        }
        for l in Blade::subsets(r, n) {
            let bl = pres.volume_b().get(&l).unwrap_or(&zero);
            let d = ring.normal_form(&pres.minor(k, l).sub(&a.mul_raw(bl)));
            if !d.is_zero() {
                witnesses.push((
                    format!("[det({};{})]", blade_name(k), blade_name(l)),
                    show(&d),
                ));
            }
        }
    }
    rep.group("volume_consistency", "", witnesses);

    let mut witnesses = Vec::new();
    if n < r {
        for j in Blade::subsets(r, n + 1) {
            for (k, det) in pres.minors_row(j) {
                witnesses.push((
                    format!("[det({};{})]", blade_name(j), blade_name(*k)),
                    show(det),
                ));
            }
        }
    }
    rep.group("top_vanishing", "", witnesses);
    rep
}

impl PartialEq for SmoothPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}
