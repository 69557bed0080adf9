//! Poisson brackets given by their generator table, Hamiltonian derivations
//! and the (twisted) Poisson chain and cochain differentials.

use std::collections::BTreeMap;

use crate::blade::Blade;
use crate::error::{Error, Result};
use crate::exterior::{
    apply_raw, contract_form, de_rham, minus_one_pow, mv_apply, mv_wedge, schouten, KForm, Multivector,
};
use crate::presentation::SmoothPresentation;
use crate::report::ValidationReport;
use crate::ring::{rat, Poly};

/// Bracket table `{x_i, x_j}` for `i < j`; missing entries are zero.
pub type BracketTable = BTreeMap<(usize, usize), Poly>;

/// A bivector `pi` built from its bracket table.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonStructure {
    pi: Multivector,
    table: BracketTable,
}

impl PoissonStructure {
    /// Builds `pi` without checking the Jacobi identity. Entries with
    /// `i > j` are stored as `-{x_j, x_i}`; diagonal entries must vanish.
    pub fn from_table_unchecked(
        pres: &SmoothPresentation,
        entries: impl IntoIterator<Item = ((usize, usize), Poly)>,
    ) -> Result<Self> {
        let ring = pres.ring();
        let mut table = BracketTable::new();
        for ((i, j), p) in entries {
            pres.check_index(i)?;
            pres.check_index(j)?;
            pres.check_poly(&p)?;
            let p = ring.normal_form(&p);
            if i == j {
                if !p.is_zero() {
                    return Err(Error::InvalidPoisson(format!(
                        "{{{0}, {0}}} must vanish",
                        pres.names()[i]
                    )));
                }
                continue;
            }
            let (key, val) = if i < j { ((i, j), p) } else { ((j, i), p.neg()) };
            if let Some(old) = table.get(&key) {
                if *old != val {
                    return Err(Error::InvalidPoisson(format!(
                        "conflicting entries for {{{}, {}}}",
                        pres.names()[key.0],
                        pres.names()[key.1]
                    )));
                }
            }
            if !val.is_zero() {
                table.insert(key, val);
            }
        }
        let pi = pres.multivector(
            2,
            table
                .iter()
                .map(|(&(i, j), p)| (Blade::from_indices(&[i, j]).unwrap(), p.clone())),
        );
        Ok(PoissonStructure { pi, table })
    }

    /// Builds and validates; a failed check is reported as `InvalidPoisson`.
    pub fn new(
        pres: &SmoothPresentation,
        entries: impl IntoIterator<Item = ((usize, usize), Poly)>,
    ) -> Result<Self> {
        let ps = Self::from_table_unchecked(pres, entries)?;
        let report = validate_poisson(pres, &ps.table);
        if let Some(f) = report.failures().next() {
            return Err(Error::InvalidPoisson(format!("{}: {}", f.name, f.detail)));
        }
        Ok(ps)
    }

    pub fn zero(pres: &SmoothPresentation) -> Self {
        PoissonStructure {
            pi: Multivector::zero(pres, 2),
            table: BracketTable::new(),
        }
    }

    pub fn pi(&self) -> &Multivector {
        &self.pi
    }

    pub fn table(&self) -> &BracketTable {
        &self.table
    }

    /// `{x_i, x_j}` read from the table, antisymmetrically.
    pub fn entry(&self, pres: &SmoothPresentation, i: usize, j: usize) -> Poly {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.table.get(&(i, j)).cloned().unwrap_or_else(|| pres.ring().zero()),
            std::cmp::Ordering::Greater => self
                .table
                .get(&(j, i))
                .map(Poly::neg)
                .unwrap_or_else(|| pres.ring().zero()),
            std::cmp::Ordering::Equal => pres.ring().zero(),
        }
    }

    /// Common degree `w` of all nonzero table entries, if they are
    /// homogeneous of one degree. `Some(None)` for the zero table.
    pub fn homogeneous_weight(&self) -> Option<Option<u32>> {
        let mut w = None;
        for p in self.table.values() {
            let d = p.homogeneous_degree()?;
            match w {
                None => w = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        Some(w)
    }
}

fn table_entry(table: &BracketTable, r: usize, i: usize, j: usize) -> Poly {
    match i.cmp(&j) {
        std::cmp::Ordering::Less => table.get(&(i, j)).cloned().unwrap_or_else(|| Poly::zero(r)),
        std::cmp::Ordering::Greater => table.get(&(j, i)).map(Poly::neg).unwrap_or_else(|| Poly::zero(r)),
        std::cmp::Ordering::Equal => Poly::zero(r),
    }
}

/// `{f, x_k} = sum_l df/dx_l {x_l, x_k}` on representatives, not reduced.
fn free_bracket_with_generator(table: &BracketTable, r: usize, f: &Poly, k: usize) -> Poly {
    let mut acc = Poly::zero(r);
    for l in 0..r {
        let t = table_entry(table, r, l, k);
        if t.is_zero() {
            continue;
        }
        let d = f.derivative(l);
        if !d.is_zero() {
            acc = acc.add(&d.mul_raw(&t));
        }
    }
    acc
}

/// Jacobi on generator triples, compatibility with the relations,
/// `[pi, pi] = 0`, and agreement of `pi` with the table.
pub fn validate_poisson(pres: &SmoothPresentation, table: &BracketTable) -> ValidationReport {
    let ring = pres.ring();
    let r = pres.nvars();
    let names = pres.names();
    let mut rep = ValidationReport::new();
    let ps = match PoissonStructure::from_table_unchecked(pres, table.clone()) {
        Ok(ps) => ps,
        Err(e) => {
            rep.fail("table", e.to_string());
            return rep;
        }
    };
    let table = &ps.table;

    let mut witnesses = Vec::new();
    for i in 0..r {
        for j in i + 1..r {
            for k in j + 1..r {
                let t = |a: usize, b: usize, c: usize| {
                    free_bracket_with_generator(table, r, &table_entry(table, r, a, b), c)
                };
                let jac = ring.normal_form(&t(i, j, k).add(&t(j, k, i)).add(&t(k, i, j)));
                if !jac.is_zero() {
                    witnesses.push((
                        format!("[{},{},{}]", names[i], names[j], names[k]),
                        ring.poly_string(&jac),
                    ));
                }
            }
        }
    }
    rep.group("jacobi", "", witnesses);

    let mut witnesses = Vec::new();
    for rule in ring.rules() {
        let rho = rule.relation();
        for j in 0..r {
            let v = ring.normal_form(&free_bracket_with_generator(table, r, &rho, j));
            if !v.is_zero() {
                witnesses.push((
                    format!("[{{{}, {}}}]", ring.poly_string(&rho), names[j]),
                    ring.poly_string(&v),
                ));
            }
        }
    }
    rep.group("relation_compatibility", "", witnesses);

    let mut witnesses = Vec::new();
    for i in 0..r {
        for j in i + 1..r {
            let v = apply_raw(pres, &ps.pi, &[ring.var(i), ring.var(j)]);
            let d = v.sub(&table_entry(table, r, i, j));
            if !d.is_zero() {
                witnesses.push((format!("[{},{}]", names[i], names[j]), ring.poly_string(&d)));
            }
        }
    }
    rep.group("table_consistency", "", witnesses);

    let pp = schouten(pres, &ps.pi, &ps.pi).expect("same presentation");
    let witnesses = if pp.is_zero() {
        vec![]
    } else {
        vec![(String::new(), crate::expr::render_multivector(pres, &pp))]
    };
    rep.group("schouten_pi_pi", "", witnesses);
    rep
}

/// `{a, b} = pi(a, b)`.
pub fn bracket(pres: &SmoothPresentation, ps: &PoissonStructure, a: &Poly, b: &Poly) -> Result<Poly> {
    mv_apply(pres, &ps.pi, &[a.clone(), b.clone()])
}

/// `H_a` with `H_a(x_j) = {a, x_j}`.
pub fn hamiltonian(pres: &SmoothPresentation, ps: &PoissonStructure, a: &Poly) -> Result<Multivector> {
    pres.check_owner(&ps.pi)?;
    pres.check_poly(a)?;
    let ring = pres.ring();
    let values: Vec<Poly> = (0..pres.nvars())
        .map(|j| apply_raw(pres, &ps.pi, &[a.clone(), ring.var(j)]))
        .collect();
    Ok(pres.derivation_from_values(&values))
}

/// A derivation `phi` with `[pi, phi] = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonDerivation {
    phi: Multivector,
}

impl PoissonDerivation {
    pub fn new(pres: &SmoothPresentation, ps: &PoissonStructure, phi: Multivector) -> Result<Self> {
        pres.check_owner(&phi)?;
        if phi.degree() != 1 && !phi.is_zero() {
            return Err(Error::DegreeMismatch {
                left: phi.degree(),
                right: 1,
            });
        }
        let d = schouten(pres, &ps.pi, &phi)?;
        if !d.is_zero() {
            return Err(Error::NotPoissonDerivation(crate::expr::render_multivector(pres, &d)));
        }
        Ok(PoissonDerivation { phi })
    }

    pub fn zero(pres: &SmoothPresentation) -> Self {
        PoissonDerivation {
            phi: Multivector::zero(pres, 1),
        }
    }

    pub fn phi(&self) -> &Multivector {
        &self.phi
    }

    pub fn into_inner(self) -> Multivector {
        self.phi
    }

    /// `phi + other`; sums of Poisson derivations are Poisson derivations.
    pub fn add(&self, other: &PoissonDerivation) -> PoissonDerivation {
        PoissonDerivation {
            phi: self.phi.add(&other.phi),
        }
    }
}

/// `delta_phi F = [pi, F] - phi ^ F`.
pub fn cochain_delta(
    pres: &SmoothPresentation,
    ps: &PoissonStructure,
    f: &Multivector,
    phi: Option<&PoissonDerivation>,
) -> Result<Multivector> {
    let mut out = schouten(pres, &ps.pi, f)?;
    if out.is_zero() {
        out = Multivector::zero(pres, f.degree() + 1);
    }
    if let Some(phi) = phi {
        out = out.sub(&mv_wedge(pres, &phi.phi, f)?);
    }
    Ok(out)
}

/// `partial_phi w = iota_pi d w - d iota_pi w + iota_phi w`.
pub fn chain_partial(
    pres: &SmoothPresentation,
    ps: &PoissonStructure,
    w: &KForm,
    phi: Option<&PoissonDerivation>,
) -> Result<KForm> {
    pres.check_owner(w)?;
    pres.check_owner(&ps.pi)?;
    let q = w.degree();
    if q == 0 {
        return Ok(KForm::zero(pres, 0));
    }
    let mut out = contract_form(pres, &ps.pi, &de_rham(pres, w)?)?;
    if out.is_zero() {
        out = KForm::zero(pres, q - 1);
    }
    if q >= 2 {
        out = out.sub(&de_rham(pres, &contract_form(pres, &ps.pi, w)?)?);
    }
    if let Some(phi) = phi {
        out = out.add(&contract_form(pres, &phi.phi, w)?);
    }
    Ok(out)
}

/// `{m, a}_M = {m, a} + m phi(a)`.
fn module_bracket(pres: &SmoothPresentation, ps: &PoissonStructure, phi: Option<&PoissonDerivation>, m: &Poly, a: &Poly) -> Poly {
    let mut v = apply_raw(pres, &ps.pi, &[m.clone(), a.clone()]);
    if let Some(phi) = phi {
        let pa = apply_raw(pres, &phi.phi, std::slice::from_ref(a));
        v = v.add(&pres.ring().mul(m, &pa));
    }
    v
}

/// The cochain differential written out on generator tuples:
/// `sum_i (-1)^i {F(.., ^a_i, ..), a_i}_M + sum_{i<j} (-1)^{i+j} F({a_i, a_j}, ..)`.
pub fn cochain_delta_direct(
    pres: &SmoothPresentation,
    ps: &PoissonStructure,
    f: &Multivector,
    phi: Option<&PoissonDerivation>,
) -> Result<Multivector> {
    pres.check_owner(f)?;
    let p = f.degree();
    let ring = pres.ring();
    let r = pres.nvars();
    Ok(pres.mv_from_generator_values(p + 1, |l| {
        let gens = l.indices();
        let args: Vec<Poly> = gens.iter().map(|&g| ring.var(g)).collect();
        let mut acc = Poly::zero(r);
        for i in 0..=p {
            let rest: Vec<Poly> = args.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, a)| a.clone()).collect();
            let fv = apply_raw(pres, f, &rest);
            let term = module_bracket(pres, ps, phi, &fv, &args[i]);
            acc.add_assign_scaled(&term, &minus_one_pow(i + 1));
        }
        for i in 0..=p {
            for j in i + 1..=p {
                let b = apply_raw(pres, &ps.pi, &[args[i].clone(), args[j].clone()]);
                let mut fargs = vec![b];
                fargs.extend(args.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, a)| a.clone()));
                let term = apply_raw(pres, f, &fargs);
                acc.add_assign_scaled(&term, &minus_one_pow(i + j));
            }
        }
        ring.normal_form(&acc)
    }))
}

/// The chain differential written out on each term `m dx_K`:
/// `sum_i (-1)^{i-1} {m, a_i}_M d^a_i + sum_{i<j} (-1)^{i+j} m d{a_i, a_j} ^ ..`.
pub fn chain_partial_direct(
    pres: &SmoothPresentation,
    ps: &PoissonStructure,
    w: &KForm,
    phi: Option<&PoissonDerivation>,
) -> Result<KForm> {
    pres.check_owner(w)?;
    let q = w.degree();
    if q == 0 {
        return Ok(KForm::zero(pres, 0));
    }
    let ring = pres.ring();
    let r = pres.nvars();
    let mut out: BTreeMap<Blade, Poly> = BTreeMap::new();
    let add = |b: Blade, c: Poly, out: &mut BTreeMap<Blade, Poly>| {
        let e = out.entry(b).or_insert_with(|| Poly::zero(r));
        *e = e.add(&c);
    };
    for (k, m) in w.terms() {
        let gens = k.indices();
        for i in 0..q {
            let a = ring.var(gens[i]);
            let v = module_bracket(pres, ps, phi, m, &a);
            let rest = k.minus(Blade::single(gens[i]));
            add(rest, v.scale(&minus_one_pow(i)), &mut out);
        }
        for i in 0..q {
            for j in i + 1..q {
                let b = apply_raw(pres, &ps.pi, &[ring.var(gens[i]), ring.var(gens[j])]);
                let db = pres.differential(&b);
                let rest = k.minus(Blade::single(gens[i])).minus(Blade::single(gens[j]));
                let sign = minus_one_pow(i + j);
                for (l, c) in db.terms() {
                    if let Some(s) = l.wedge_sign(rest) {
                        let coeff = m.mul_raw(c).scale(&(sign.clone() * rat(s as i64)));
                        add(l.union(rest), coeff, &mut out);
                    }
                }
            }
        }
    }
    Ok(pres.canonicalize_form(q - 1, out))
}
