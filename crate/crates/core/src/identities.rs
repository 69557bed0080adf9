//! Seeded randomized identity suites over the bundled structures.
//!
//! Each check draws `samples` instances and stops at the first
//! counterexample, which it reports as the witness.

use rand::Rng;

use crate::blade::Blade;
use crate::bundled;
use crate::bv::{bv_delta, bv_delta_explicit, bv_twisted, gerstenhaber_via_bv, BvOperator};
use crate::duality::{ddag, flat, verify_duality_square, verify_untwisted_square, DualityContext};
use crate::error::{Error, Result};
use crate::exterior::{
    contract_form, contract_mv, de_rham, form_wedge, minus_one_pow, mv_apply, mv_wedge, pair, schouten, KForm,
    Multivector,
};
use crate::expr::{parse_form, parse_multivector, parse_poly, render_form, render_multivector};
use crate::homology::{cohomology_dims, duality_dim_check, untwisted_dim_check};
use crate::modular::{modular_derivation, modular_oracle, pseudo_unimodular_witness};
use crate::poisson::{
    chain_partial, chain_partial_direct, cochain_delta, cochain_delta_direct, hamiltonian, validate_poisson,
    PoissonDerivation, PoissonStructure,
};
use crate::presentation::SmoothPresentation;
use crate::random::{self, SuiteRng};
use crate::report::ValidationReport;
use crate::ring::{rat, Poly};

pub const SUITES: &[&str] = &[
    "exterior",
    "poisson",
    "modular",
    "differentials",
    "duality",
    "bv",
    "twisted",
    "homology",
    "roundtrip",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub samples: usize,
    pub seed: u64,
    /// Bound on coefficient degrees of random elements.
    pub max_degree: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            samples: 100,
            seed: random::DEFAULT_SEED,
            max_degree: 3,
        }
    }
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<ValidationReport> {
    let mut s = Suite::new(name, cfg);
    match name {
        "exterior" => exterior(&mut s)?,
        "poisson" => poisson(&mut s)?,
        "modular" => modular(&mut s)?,
        "differentials" => differentials(&mut s)?,
        "duality" => duality(&mut s)?,
        "bv" => bv(&mut s)?,
        "twisted" => twisted(&mut s)?,
        "homology" => homology(&mut s)?,
        "roundtrip" => roundtrip(&mut s)?,
        other => return Err(Error::UnknownSuite(other.to_string())),
    }
    Ok(s.report)
}

pub fn run_all(cfg: &SuiteConfig) -> Result<ValidationReport> {
    let mut report = ValidationReport::new();
    for name in SUITES {
        report.extend(run_suite(name, cfg)?);
    }
    Ok(report)
}

struct Suite {
    name: String,
    cfg: SuiteConfig,
    rng: SuiteRng,
    report: ValidationReport,
}

type Witness = Result<Option<String>>;

impl Suite {
    fn new(name: &str, cfg: &SuiteConfig) -> Self {
        Suite {
            name: name.to_string(),
            cfg: *cfg,
            rng: random::rng(cfg.seed),
            report: ValidationReport::new(),
        }
    }

    fn label(&self, check: &str, on: &str) -> String {
        format!("{}/{check}[{on}]", self.name)
    }

    /// Runs `f` on `n` fresh instances.
    fn prop_n(&mut self, check: &str, on: &str, n: usize, mut f: impl FnMut(&mut SuiteRng) -> Witness) {
        let label = self.label(check, on);
        for i in 0..n {
            match f(&mut self.rng) {
                Ok(None) => {}
                Ok(Some(w)) => return self.report.fail(label, format!("instance {i}: {w}")),
                Err(e) => return self.report.fail(label, format!("instance {i}: {e}")),
            }
        }
        self.report.pass(label, format!("{n} instances"));
    }

    fn prop(&mut self, check: &str, on: &str, f: impl FnMut(&mut SuiteRng) -> Witness) {
        let n = self.cfg.samples;
        self.prop_n(check, on, n, f);
    }

    fn fact(&mut self, check: &str, on: &str, w: Witness) {
        let label = self.label(check, on);
        match w {
            Ok(None) => self.report.pass(label, ""),
            Ok(Some(w)) => self.report.fail(label, w),
            Err(e) => self.report.fail(label, e.to_string()),
        }
    }
}

struct Structure {
    name: &'static str,
    pres: SmoothPresentation,
    ps: PoissonStructure,
}

fn load(name: &'static str) -> Result<Structure> {
    let doc = bundled::load(name)?;
    let ps = doc.poisson()?;
    Ok(Structure {
        name,
        pres: doc.presentation,
        ps,
    })
}

fn load_all(names: &[&'static str]) -> Result<Vec<Structure>> {
    names.iter().map(|n| load(n)).collect()
}

const ALL_VALID: &[&str] = &[
    "free_symplectic_plane",
    "quadratic_plane",
    "so3_free",
    "sphere_so3",
    "zero_structure",
];

fn same_mv(pres: &SmoothPresentation, a: &Multivector, b: &Multivector) -> Option<String> {
    (a != b).then(|| format!("{} != {}", render_multivector(pres, a), render_multivector(pres, b)))
}

fn same_form(pres: &SmoothPresentation, a: &KForm, b: &KForm) -> Option<String> {
    (a != b).then(|| format!("{} != {}", render_form(pres, a), render_form(pres, b)))
}

fn same_poly(pres: &SmoothPresentation, a: &Poly, b: &Poly) -> Option<String> {
    (a != b).then(|| format!("{} != {}", pres.poly_string(a), pres.poly_string(b)))
}

fn zero_mv(pres: &SmoothPresentation, a: &Multivector) -> Option<String> {
    (!a.is_zero()).then(|| format!("nonzero {}", render_multivector(pres, a)))
}

fn zero_form(pres: &SmoothPresentation, a: &KForm) -> Option<String> {
    (!a.is_zero()).then(|| format!("nonzero {}", render_form(pres, a)))
}

fn basis_mv(pres: &SmoothPresentation, b: Blade) -> Multivector {
    pres.multivector(b.degree(), [(b, pres.ring().one())])
}

fn basis_form(pres: &SmoothPresentation, b: Blade) -> KForm {
    pres.form(b.degree(), [(b, pres.ring().one())])
}

fn exterior(s: &mut Suite) -> Result<()> {
    let deg = s.cfg.max_degree;
    for st in load_all(&["so3_free", "sphere_so3"])? {
        let (pres, ps) = (&st.pres, &st.ps);
        let n = pres.dim();
        s.prop("d_squared", st.name, |g| {
            let q = g.gen_range(0..=n);
            let w = random::form(g, pres, q, deg);
            Ok(zero_form(pres, &de_rham(pres, &de_rham(pres, &w)?)?))
        });
        s.prop("contraction_commutation", st.name, |g| {
            let p1 = g.gen_range(0..=n);
            let p2 = g.gen_range(0..=n - p1);
            let q = g.gen_range(p1 + p2..=n);
            let f = random::multivector(g, pres, p1, deg);
            let h = random::multivector(g, pres, p2, deg);
            let w = random::form(g, pres, q, deg);
            let lhs = contract_form(pres, &f, &contract_form(pres, &h, &w)?)?;
            let rhs = contract_form(pres, &h, &contract_form(pres, &f, &w)?)?.scale(&minus_one_pow(p1 * p2));
            Ok(same_form(pres, &lhs, &rhs))
        });
        s.prop("contraction_of_wedge_with_exact", st.name, |g| {
            let q = g.gen_range(0..n);
            let p = g.gen_range(0..=q + 1);
            let f = random::multivector(g, pres, p, deg);
            let w = random::form(g, pres, q, deg);
            let da = pres.differential(&random::poly(g, pres, deg, 3));
            let lhs = contract_form(pres, &f, &form_wedge(pres, &w, &da)?)?;
            let first = form_wedge(pres, &contract_form(pres, &f, &w)?, &da)?;
            let second = contract_form(pres, &contract_mv(pres, &da, &f)?, &w)?;
            let rhs = first.add(&second.scale(&minus_one_pow(q + 1 + p)));
            Ok(same_form(pres, &lhs, &rhs))
        });
        s.prop("derivation_on_top_forms", st.name, |g| {
            let f = random::multivector(g, pres, 1, deg);
            let a = random::poly(g, pres, deg, 3);
            let eta = random::form(g, pres, n, deg);
            let lhs = pres.scale_poly(&mv_apply(pres, &f, std::slice::from_ref(&a))?, &eta);
            let rhs = form_wedge(pres, &pres.differential(&a), &contract_form(pres, &f, &eta)?)?;
            Ok(same_form(pres, &lhs, &rhs))
        });
        s.prop("hamiltonian_on_top_forms", st.name, |g| {
            let a = random::poly(g, pres, deg, 3);
            let eta = random::form(g, pres, n, deg);
            let lhs = contract_form(pres, &hamiltonian(pres, ps, &a)?, &eta)?;
            let rhs = form_wedge(pres, &pres.differential(&a), &contract_form(pres, ps.pi(), &eta)?)?.neg();
            Ok(same_form(pres, &lhs, &rhs))
        });
        s.prop("pairing_through_complements", st.name, |g| {
            let p = g.gen_range(0..=n);
            let f = random::multivector(g, pres, p, deg);
            let w = random::form(g, pres, p, deg);
            let mut sum = pres.ring().zero();
            for b in Blade::subsets(pres.nvars(), n - p) {
                let fi = mv_wedge(pres, &f, &basis_mv(pres, b))?;
                let wi = form_wedge(pres, &w, &basis_form(pres, b))?;
                if !fi.is_zero() && !wi.is_zero() {
                    sum = sum.add(&pair(pres, &fi, &wi)?);
                }
            }
            Ok(same_poly(pres, &pair(pres, &f, &w)?, &sum))
        });
        s.prop("contraction_by_differential", st.name, |g| {
            let a = random::poly(g, pres, deg, 3);
            let lhs = contract_mv(pres, &pres.differential(&a), ps.pi())?;
            Ok(same_mv(pres, &lhs, &hamiltonian(pres, ps, &a)?.neg()))
        });
        let small = (s.cfg.samples / 5).max(1);
        s.prop_n("schouten_jacobi", st.name, small, |g| {
            let (p, q, r) = (g.gen_range(0..=2), g.gen_range(0..=2), g.gen_range(0..=2));
            let a = random::multivector(g, pres, p, 2);
            let b = random::multivector(g, pres, q, 2);
            let c = random::multivector(g, pres, r, 2);
            let lhs = schouten(pres, &a, &schouten(pres, &b, &c)?)?;
            let rhs = schouten(pres, &schouten(pres, &a, &b)?, &c)?.add(
                &schouten(pres, &b, &schouten(pres, &a, &c)?)?
                    .scale(&minus_one_pow((p + 1) * (q + 1))),
            );
            Ok(same_mv(pres, &lhs, &rhs))
        });
        s.prop("schouten_skew", st.name, |g| {
            let (p, q) = (g.gen_range(0..=n), g.gen_range(0..=n));
            let a = random::multivector(g, pres, p, deg);
            let b = random::multivector(g, pres, q, deg);
            let lhs = schouten(pres, &a, &b)?;
            let rhs = schouten(pres, &b, &a)?.scale(&minus_one_pow((p + 1) * (q + 1) + 1));
            Ok(same_mv(pres, &lhs, &rhs))
        });
    }
    Ok(())
}

fn poisson(s: &mut Suite) -> Result<()> {
    for name in bundled::NONZERO_POISSON {
        let doc = bundled::load(name)?;
        let report = validate_poisson(&doc.presentation, &doc.table);
        let failures: Vec<String> = report.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        s.fact("valid", name, Ok((!failures.is_empty()).then(|| failures.join("; "))));
    }
    let doc = bundled::load("corrupted_so3")?;
    let report = validate_poisson(&doc.presentation, &doc.table);
    let jacobi = report.failures().find(|c| c.name.starts_with("jacobi")).cloned();
    s.fact(
        "corrupted_rejected",
        "corrupted_so3",
        Ok(match jacobi {
            Some(_) if doc.poisson().is_err() => None,
            Some(_) => Some("structure accepted".into()),
            None => Some("no jacobiator witness".into()),
        }),
    );
    let deg = s.cfg.max_degree;
    for st in load_all(bundled::NONZERO_POISSON)? {
        let (pres, ps) = (&st.pres, &st.ps);
        s.prop("bracket_leibniz", st.name, |g| {
            let a = random::poly(g, pres, deg, 3);
            let b = random::poly(g, pres, deg, 3);
            let c = random::poly(g, pres, deg, 3);
            let ring = pres.ring();
            let br = |u: &Poly, v: &Poly| mv_apply(pres, ps.pi(), &[u.clone(), v.clone()]);
            let lhs = br(&a, &ring.mul(&b, &c))?;
            let rhs = ring.mul(&br(&a, &b)?, &c).add(&ring.mul(&b, &br(&a, &c)?));
            let skew = br(&a, &b)?.add(&br(&b, &a)?);
            Ok(same_poly(pres, &lhs, &rhs).or_else(|| (!skew.is_zero()).then(|| "bracket not skew".into())))
        });
    }
    Ok(())
}

fn modular(s: &mut Suite) -> Result<()> {
    let deg = s.cfg.max_degree;
    for st in load_all(ALL_VALID)? {
        let (pres, ps) = (&st.pres, &st.ps);
        let md = modular_derivation(pres, ps)?;
        let mut w = None;
        for j in 0..pres.nvars() {
            let x = pres.ring().var(j);
            let oracle = modular_oracle(pres, ps, &x)?;
            let value = mv_apply(pres, &md.phi, &[x])?;
            if let Some(m) = same_poly(pres, &value, &oracle) {
                w = Some(format!("at {}: {m}", pres.names()[j]));
                break;
            }
        }
        s.fact("formula_matches_oracle", st.name, Ok(w));
        let expected = match st.name {
            "quadratic_plane" => "x*(d x)* - y*(d y)*",
            _ => "0",
        };
        let got = render_multivector(pres, &md.phi);
        s.fact("value", st.name, Ok((got != expected).then(|| format!("{got}, expected {expected}"))));
        if st.name == "sphere_so3" {
            s.fact("second_part_vanishes", st.name, Ok(zero_mv(pres, &md.phi2)));
        }
        s.prop("oracle_on_random_elements", st.name, |g| {
            let a = random::poly(g, pres, deg, 3);
            Ok(same_poly(pres, &mv_apply(pres, &md.phi, std::slice::from_ref(&a))?, &modular_oracle(pres, ps, &a)?))
        });
        s.fact("cocycle", st.name, cochain_delta(pres, ps, &md.phi, None).map(|d| zero_mv(pres, &d)));
        let vol = pres.vol();
        let phi_vol = PoissonDerivation::new(pres, ps, md.phi.clone())?;
        let lhs = chain_partial(pres, ps, &vol, None)?;
        let rhs = contract_form(pres, &md.phi, &vol)?.neg();
        let twisted = chain_partial(pres, ps, &vol, Some(&phi_vol))?;
        s.fact(
            "volume_cycle",
            st.name,
            Ok(same_form(pres, &lhs, &rhs).or_else(|| zero_form(pres, &twisted))),
        );
        s.prop("closed_forms_give_derivations", st.name, |g| {
            let w = random::closed_one_form(g, pres, deg);
            let phi = contract_mv(pres, &w, ps.pi())?;
            let phi = if phi.is_zero() { Multivector::zero(pres, 1) } else { phi };
            Ok(zero_mv(pres, &schouten(pres, ps.pi(), &phi)?))
        });
    }
    Ok(())
}

fn differentials(s: &mut Suite) -> Result<()> {
    let deg = s.cfg.max_degree.min(2);
    for st in load_all(ALL_VALID)? {
        let (pres, ps) = (&st.pres, &st.ps);
        let n = pres.dim();
        let phi_vol = PoissonDerivation::new(pres, ps, modular_derivation(pres, ps)?.phi)?;
        s.prop("delta_squared", st.name, |g| {
            let p = g.gen_range(0..=n);
            let f = random::multivector(g, pres, p, deg);
            let phi = random::poisson_derivation(g, pres, ps, deg)?;
            let twist = g.gen_bool(0.5).then_some(&phi);
            let d1 = cochain_delta(pres, ps, &f, twist)?;
            Ok(zero_mv(pres, &cochain_delta(pres, ps, &d1, twist)?))
        });
        s.prop("partial_squared", st.name, |g| {
            let q = g.gen_range(0..=n);
            let w = random::form(g, pres, q, deg);
            let phi = random::poisson_derivation(g, pres, ps, deg)?;
            let twist = if g.gen_bool(0.5) { phi } else { phi_vol.clone() };
            let d1 = chain_partial(pres, ps, &w, Some(&twist))?;
            Ok(zero_form(pres, &chain_partial(pres, ps, &d1, Some(&twist))?))
        });
        s.prop("contraction_intertwines", st.name, |g| {
            let p = g.gen_range(0..=n);
            let q = g.gen_range(p..=n);
            let f = random::multivector(g, pres, p, deg);
            let w = random::form(g, pres, q, deg);
            let phi = random::poisson_derivation(g, pres, ps, deg)?;
            let lhs = contract_form(pres, &f, &chain_partial(pres, ps, &w, Some(&phi))?)?.sub(
                &chain_partial(pres, ps, &contract_form(pres, &f, &w)?, Some(&phi))?.scale(&minus_one_pow(p)),
            );
            let rhs = contract_form(pres, &cochain_delta(pres, ps, &f, None)?, &w)?;
            Ok(same_form(pres, &lhs, &rhs))
        });
        s.prop("delta_leibniz", st.name, |g| {
            let p = g.gen_range(0..=n);
            let q = g.gen_range(0..=n - p);
            let f = random::multivector(g, pres, p, deg);
            let h = random::multivector(g, pres, q, deg);
            let phi = random::poisson_derivation(g, pres, ps, deg)?;
            let lhs = cochain_delta(pres, ps, &mv_wedge(pres, &f, &h)?, Some(&phi))?;
            let rhs = mv_wedge(pres, &cochain_delta(pres, ps, &f, None)?, &h)?.add(
                &mv_wedge(pres, &f, &cochain_delta(pres, ps, &h, Some(&phi))?)?.scale(&minus_one_pow(p)),
            );
            Ok(same_mv(pres, &lhs, &rhs))
        });
        s.prop("partial_anticommutes_with_d", st.name, |g| {
            let q = g.gen_range(0..=n);
            let w = random::form(g, pres, q, deg);
            let a = chain_partial(pres, ps, &de_rham(pres, &w)?, None)?;
            let b = de_rham(pres, &chain_partial(pres, ps, &w, None)?)?;
            Ok(zero_form(pres, &a.add(&b)))
        });
        s.prop("delta_direct_formula", st.name, |g| {
            let p = g.gen_range(0..=n);
            let f = random::multivector(g, pres, p, deg);
            let phi = random::poisson_derivation(g, pres, ps, deg)?;
            let twist = g.gen_bool(0.5).then_some(&phi);
            Ok(same_mv(
                pres,
                &cochain_delta(pres, ps, &f, twist)?,
                &cochain_delta_direct(pres, ps, &f, twist)?,
            ))
        });
        s.prop("partial_direct_formula", st.name, |g| {
            let q = g.gen_range(0..=n);
            let w = random::form(g, pres, q, deg);
            let phi = random::poisson_derivation(g, pres, ps, deg)?;
            let twist = g.gen_bool(0.5).then_some(&phi);
            Ok(same_form(
                pres,
                &chain_partial(pres, ps, &w, twist)?,
                &chain_partial_direct(pres, ps, &w, twist)?,
            ))
        });
    }
    Ok(())
}

fn duality(s: &mut Suite) -> Result<()> {
    let deg = s.cfg.max_degree;
    for st in load_all(ALL_VALID)? {
        let (pres, ps) = (&st.pres, &st.ps);
        let n = pres.dim();
        let ctx = DualityContext::new(pres)?;
        s.prop("round_trips", st.name, |g| {
            for p in 0..=n {
                let f = random::multivector(g, pres, p, deg);
                let w = random::form(g, pres, p, deg);
                if let Some(m) = same_mv(pres, &flat(&ctx, &ddag(&ctx, &f)?)?, &f) {
                    return Ok(Some(format!("flat after ddag in degree {p}: {m}")));
                }
                if let Some(m) = same_form(pres, &ddag(&ctx, &flat(&ctx, &w)?)?, &w) {
                    return Ok(Some(format!("ddag after flat in degree {p}: {m}")));
                }
            }
            Ok(None)
        });
        s.prop("factorization", st.name, |g| {
            let p = g.gen_range(0..=n);
            let f = random::multivector(g, pres, p, deg);
            let mut sum = KForm::zero(pres, n - p);
            for b in Blade::subsets(pres.nvars(), p) {
                let v = mv_apply(pres, &f, &b.indices().into_iter().map(|i| pres.ring().var(i)).collect::<Vec<_>>())?;
                let c = contract_form(pres, &basis_mv(pres, b), ctx.vol())?;
                sum = sum.add(&pres.scale_poly(&v, &c));
            }
            Ok(same_form(pres, &ddag(&ctx, &f)?, &sum))
        });
        s.prop("square_commutes", st.name, |g| {
            let p = g.gen_range(0..=n);
            let f = random::multivector(g, pres, p, deg);
            let phi = random::poisson_derivation(g, pres, ps, deg.min(2))?;
            let twist = g.gen_bool(0.5).then_some(&phi);
            let r = verify_duality_square(&ctx, ps, &f, twist);
            let first = r.failures().next().map(|c| c.detail.clone());
            Ok(first)
        });
    }
    let st = load("quadratic_plane")?;
    let (pres, ps) = (&st.pres, &st.ps);
    let ctx = DualityContext::new(pres)?;
    let mut failed = 0;
    let mut first = None;
    let n = s.cfg.samples;
    for _ in 0..n {
        let p = s.rng.gen_range(0..=pres.dim());
        let f = random::multivector(&mut s.rng, pres, p, deg);
        let r = verify_untwisted_square(&ctx, ps, &f, None);
        let residue = r.failures().next().map(|c| c.detail.clone());
        if let Some(residue) = residue {
            failed += 1;
            first.get_or_insert(residue);
        }
    }
    let label = s.label("untwisted_square_fails", st.name);
    match first {
        Some(residue) => s
            .report
            .pass(label, format!("{failed} of {n} instances fail, first {residue}")),
        None => s.report.fail(label, "every untwisted square commuted"),
    }
    Ok(())
}

fn bv(s: &mut Suite) -> Result<()> {
    let deg = s.cfg.max_degree;
    for st in load_all(ALL_VALID)? {
        let (pres, ps) = (&st.pres, &st.ps);
        let n = pres.dim();
        let ctx = DualityContext::new(pres)?;
        let op = BvOperator::untwisted(ctx);
        let phi = modular_derivation(pres, ps)?.phi;
        s.prop("routes_agree", st.name, |g| {
            let p = g.gen_range(1..=n);
            let f = random::multivector(g, pres, p, deg);
            Ok(same_mv(pres, &bv_delta(&op, &f)?, &bv_delta_explicit(pres, &f)?))
        });
        s.prop("square_zero", st.name, |g| {
            let p = g.gen_range(0..=n);
            let f = random::multivector(g, pres, p, deg);
            let d = bv_delta(&op, &f)?;
            Ok(zero_mv(pres, &bv_delta(&op, &d)?))
        });
        s.prop("generates_schouten", st.name, |g| {
            let p = g.gen_range(0..=n);
            let q = g.gen_range(0..=n + 1 - p.max(1));
            let a = random::multivector(g, pres, p, deg);
            let b = random::multivector(g, pres, q, deg);
            Ok(same_mv(pres, &gerstenhaber_via_bv(&op, &a, &b)?, &schouten(pres, &a, &b)?))
        });
        let w = bv_delta(&op, ps.pi());
        s.fact("delta_pi_is_modular", st.name, w.map(|d| same_mv(pres, &d, &phi)));
        s.prop("homotopy_formula", st.name, |g| {
            let p = g.gen_range(0..=n);
            let f = random::multivector(g, pres, p, deg);
            let df = cochain_delta(pres, ps, &f, None)?;
            let a = if p == n { Multivector::zero(pres, n) } else { bv_delta(&op, &df)? };
            let b = cochain_delta(pres, ps, &bv_delta(&op, &f)?, None)?;
            let b = if p == 0 { Multivector::zero(pres, 1) } else { b };
            Ok(same_mv(pres, &a.add(&b), &schouten(pres, &phi, &f)?))
        });
        s.prop("contraction_of_wedge", st.name, |g| {
            let p = g.gen_range(1..=n);
            let q = g.gen_range(1..=n + 1 - p);
            let a = random::multivector(g, pres, p, deg);
            let b = random::multivector(g, pres, q, deg);
            let w = random::form(g, pres, p + q - 1, deg);
            let lhs = contract_mv(pres, &w, &mv_wedge(pres, &a, &b)?)?;
            let alpha = contract_form(pres, &b, &w)?;
            let beta = contract_form(pres, &a, &w)?;
            let rhs = contract_mv(pres, &alpha, &a)?
                .scale(&minus_one_pow((p - 1) * q))
                .add(&contract_mv(pres, &beta, &b)?.scale(&minus_one_pow(p)));
            Ok(same_mv(pres, &lhs, &rhs))
        });
        s.prop("contraction_of_bracket", st.name, |g| {
            let p = g.gen_range(1..=n);
            let q = g.gen_range(1..=n + 1 - p);
            let a = random::multivector(g, pres, p, deg);
            let b = random::multivector(g, pres, q, deg);
            let w = random::form(g, pres, p + q - 1, deg);
            let lhs = contract_form(pres, &schouten(pres, &a, &b)?, &w)?;
            let t1 = contract_form(pres, &a, &de_rham(pres, &contract_form(pres, &b, &w)?)?)?;
            let t2 = contract_form(pres, &b, &de_rham(pres, &contract_form(pres, &a, &w)?)?)?;
            let t3 = contract_form(pres, &mv_wedge(pres, &a, &b)?, &de_rham(pres, &w)?)?;
            let rhs = t1
                .scale(&minus_one_pow((p - 1) * (q - 1)))
                .sub(&t2)
                .add(&t3.scale(&minus_one_pow(p)));
            Ok(same_form(pres, &lhs, &rhs))
        });
        s.prop("delta_and_contraction", st.name, |g| {
            let p = g.gen_range(1..=n);
            let f = random::multivector(g, pres, p, deg);
            let w = random::form(g, pres, p - 1, deg);
            let lhs = contract_mv(pres, &w, &bv_delta(&op, &f)?)?;
            let rhs = bv_delta(&op, &contract_mv(pres, &w, &f)?)?.add(&contract_mv(pres, &de_rham(pres, &w)?, &f)?);
            Ok(same_mv(pres, &lhs, &rhs))
        });
        let casimirs = casimir_generator(st.name, pres);
        s.prop("casimirs_are_modular_invariant", st.name, |g| {
            let mut a = pres.ring().constant(rat(g.gen_range(-3..=3)));
            let mut power = pres.ring().one();
            for _ in 0..2 {
                power = pres.ring().mul(&power, &casimirs);
                a = a.add(&power.scale(&rat(g.gen_range(-3..=3))));
            }
            let d = cochain_delta(pres, ps, &pres.scalar_mv(&a), None)?;
            if !d.is_zero() {
                return Ok(Some(format!("{} is not a Casimir", pres.poly_string(&a))));
            }
            Ok((!mv_apply(pres, &phi, &[a.clone()])?.is_zero()).then(|| pres.poly_string(&a)))
        });
    }
    for name in ["free_symplectic_plane", "so3_free"] {
        let st = load(name)?;
        let pres = &st.pres;
        let op = BvOperator::untwisted(DualityContext::new(pres)?);
        let n = pres.dim();
        s.prop_n("monomial_closed_form", name, 20, |g| {
            let p = g.gen_range(1..=n);
            let f = random::monomial_multivector(g, pres, p, deg);
            let (b, c) = f.terms().iter().next().map(|(b, c)| (*b, c.clone())).unwrap();
            let mut expected = Multivector::zero(pres, p - 1);
            for (j, i) in b.indices().into_iter().enumerate() {
                let rest = b.minus(Blade::single(i));
                let t = pres.multivector(p - 1, [(rest, c.derivative(i).scale(&minus_one_pow(j + 1)))]);
                expected = expected.add(&t);
            }
            Ok(same_mv(pres, &bv_delta(&op, &f)?, &expected))
        });
    }
    Ok(())
}

/// A known Casimir element of each bundled structure, or `1`.
fn casimir_generator(name: &str, pres: &SmoothPresentation) -> Poly {
    match name {
        "so3_free" => parse_poly(pres.ring(), "x^2 + y^2 + z^2").expect("valid polynomial"),
        "zero_structure" => pres.ring().var(0),
        _ => pres.ring().one(),
    }
}

fn twisted(s: &mut Suite) -> Result<()> {
    let deg = s.cfg.max_degree.min(2);
    for st in load_all(ALL_VALID)? {
        let (pres, ps) = (&st.pres, &st.ps);
        let n = pres.dim();
        let ctx = DualityContext::new(pres)?;
        let plain = BvOperator::untwisted(ctx.clone());
        let draw = |g: &mut SuiteRng| -> Result<(KForm, BvOperator, PoissonDerivation)> {
            let w = random::closed_one_form(g, pres, deg);
            let op = BvOperator::new(ctx.clone(), Some(w.clone()))?;
            let phi = contract_mv(pres, &w, ps.pi())?;
            let phi = if phi.is_zero() { Multivector::zero(pres, 1) } else { phi };
            Ok((w, op, PoissonDerivation::new(pres, ps, phi)?))
        };
        s.prop("d_t_squared", st.name, |g| {
            let (_, op, _) = draw(g)?;
            let q = g.gen_range(0..=n);
            let w = random::form(g, pres, q, deg);
            Ok(zero_form(pres, &op.twisted_de_rham(&op.twisted_de_rham(&w)?)?))
        });
        s.prop("partial_t_is_commutator", st.name, |g| {
            let (_, op, phi) = draw(g)?;
            let q = g.gen_range(0..=n);
            let w = random::form(g, pres, q, deg);
            let lhs = chain_partial(pres, ps, &w, Some(&phi))?;
            let a = contract_form(pres, ps.pi(), &op.twisted_de_rham(&w)?)?;
            let b = op.twisted_de_rham(&contract_form(pres, ps.pi(), &w)?)?;
            let rhs = if q == 0 { KForm::zero(pres, 0) } else { a.sub(&b) };
            Ok(same_form(pres, &lhs, &rhs))
        });
        s.prop("partial_t_anticommutes_with_d_t", st.name, |g| {
            let (_, op, phi) = draw(g)?;
            let q = g.gen_range(0..=n);
            let w = random::form(g, pres, q, deg);
            let a = chain_partial(pres, ps, &op.twisted_de_rham(&w)?, Some(&phi))?;
            let b = op.twisted_de_rham(&chain_partial(pres, ps, &w, Some(&phi))?)?;
            let b = if q == 0 { KForm::zero(pres, 1) } else { b };
            Ok(zero_form(pres, &a.add(&b)))
        });
        s.prop("delta_t_squared", st.name, |g| {
            let (_, op, _) = draw(g)?;
            let p = g.gen_range(0..=n);
            let f = random::multivector(g, pres, p, deg);
            Ok(zero_mv(pres, &bv_twisted(&op, &bv_twisted(&op, &f)?)?))
        });
        s.prop("delta_t_routes_agree", st.name, |g| {
            let (w, op, _) = draw(g)?;
            let p = g.gen_range(0..=n);
            let f = random::multivector(g, pres, p, deg);
            let via_dual = bv_delta(&op, &f)?;
            if let Some(m) = same_mv(pres, &via_dual, &bv_twisted(&op, &f)?) {
                return Ok(Some(m));
            }
            let diff = via_dual.sub(&bv_delta(&plain, &f)?);
            let expected = if p == 0 {
                Multivector::zero(pres, 0)
            } else {
                contract_mv(pres, &w, &f)?.scale(&minus_one_pow(p + 1))
            };
            Ok(same_mv(pres, &diff, &expected))
        });
        s.prop("delta_t_generates_schouten", st.name, |g| {
            let (_, op, _) = draw(g)?;
            let p = g.gen_range(0..=n);
            let q = g.gen_range(0..=n + 1 - p.max(1));
            let a = random::multivector(g, pres, p, deg);
            let b = random::multivector(g, pres, q, deg);
            Ok(same_mv(pres, &gerstenhaber_via_bv(&op, &a, &b)?, &schouten(pres, &a, &b)?))
        });
        s.prop("non_closed_rejected", st.name, |g| {
            let w = random::closed_one_form(g, pres, deg);
            let bad = w.add(&parse_form(pres, &format!("{}*d {}", pres.names()[1], pres.names()[0]))?);
            Ok(match BvOperator::new(ctx.clone(), Some(bad)) {
                Err(Error::NotClosed(_)) => None,
                Err(e) => Some(e.to_string()),
                Ok(_) => Some("accepted".into()),
            })
        });
    }
    for name in ["free_symplectic_plane", "so3_free", "sphere_so3", "quadratic_plane"] {
        let st = load(name)?;
        let found = pseudo_unimodular_witness(&st.pres, &st.ps, 6)?;
        let w = match (name, found) {
            ("quadratic_plane", None) => None,
            ("quadratic_plane", Some(w)) => Some(format!("unexpected witness {}", render_form(&st.pres, &w))),
            (_, Some(w)) if w.is_zero() => None,
            (_, Some(w)) => Some(format!("expected 0, found {}", render_form(&st.pres, &w))),
            (_, None) => Some("none up to degree 6".into()),
        };
        s.fact("pseudo_unimodular", name, Ok(w));
    }
    Ok(())
}

fn homology(s: &mut Suite) -> Result<()> {
    let st = load("free_symplectic_plane")?;
    let t = cohomology_dims(&st.pres, &st.ps, None, 0..=2, 0..=6)?;
    let mut w = None;
    for ((p, d), e) in &t.entries {
        let expected = usize::from(*p == 0 && *d == 0);
        if e.homology != expected {
            w = Some(format!("dim PH^{p} at degree {d} is {}, expected {expected}", e.homology));
            break;
        }
    }
    s.fact("symplectic_cohomology", st.name, Ok(w));
    for name in ["free_symplectic_plane", "quadratic_plane"] {
        let st = load(name)?;
        let r = duality_dim_check(&st.pres, &st.ps, 0..=2, 0..=6);
        let first = r.failures().next().map(|c| format!("{}: {}", c.name, c.detail));
        s.fact("duality_dims", name, Ok(first));
    }
    let st = load("quadratic_plane")?;
    let r = untwisted_dim_check(&st.pres, &st.ps, 0..=2, 0..=6);
    let label = s.label("untwisted_dims_mismatch", st.name);
    let first = r.failures().next().map(|c| format!("first mismatch {}: {}", c.name, c.detail));
    match first {
        Some(m) => s.report.pass(label, m),
        None => s.report.fail(label, "every strand matched"),
    }
    for name in ["free_symplectic_plane", "quadratic_plane", "so3_free"] {
        let st = load(name)?;
        s.fact("euler_characteristic", name, euler_check(&st));
    }
    Ok(())
}

/// Along each strand, `sum_p (-1)^p dim PH^p` equals the alternating sum
/// of the cochain dimensions.
fn euler_check(st: &Structure) -> Witness {
    let w = st.ps.homogeneous_weight().flatten().unwrap_or(1) as i64;
    let r = st.pres.nvars();
    let t = cohomology_dims(&st.pres, &st.ps, None, 0..=r, 0..=8)?;
    for s0 in 0..=4i64 {
        let (mut euler_h, mut euler_c) = (0i64, 0i64);
        for p in 0..=r {
            let d = s0 + p as i64 * (w - 1);
            if d < 0 {
                continue;
            }
            let Some(e) = t.get(p, d as usize) else {
                return Ok(Some(format!("strand {s0} leaves the computed range")));
            };
            let blades = Blade::subsets(r, p).len() as i64;
            let monos = crate::ring::Monomial::of_degree(r, d as u32).len() as i64;
            let sign = if p % 2 == 0 { 1 } else { -1 };
            euler_h += sign * e.homology as i64;
            euler_c += sign * blades * monos;
        }
        if euler_h != euler_c {
            return Ok(Some(format!("strand {s0}: {euler_h} != {euler_c}")));
        }
    }
    Ok(None)
}

fn roundtrip(s: &mut Suite) -> Result<()> {
    let deg = s.cfg.max_degree;
    for st in load_all(&["quadratic_plane", "so3_free", "sphere_so3"])? {
        let pres = &st.pres;
        let n = pres.dim();
        s.prop("render_parse", st.name, |g| {
            let k = g.gen_range(0..=n);
            Ok(match g.gen_range(0..3) {
                0 => {
                    let p = random::poly(g, pres, deg, 4);
                    let text = pres.poly_string(&p);
                    same_poly(pres, &parse_poly(pres.ring(), &text)?, &p)
                }
                1 => {
                    let w = random::form(g, pres, k, deg);
                    let back = parse_form(pres, &render_form(pres, &w))?;
                    same_form(pres, &back, &w)
                }
                _ => {
                    let f = random::multivector(g, pres, k, deg);
                    let back = parse_multivector(pres, &render_multivector(pres, &f))?;
                    same_mv(pres, &back, &f)
                }
            })
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert_eq!(
            run_suite("nope", &SuiteConfig::default()),
            Err(Error::UnknownSuite("nope".into()))
        );
    }

    #[test]
    fn small_run_passes() {
        let cfg = SuiteConfig {
            samples: 3,
            ..SuiteConfig::default()
        };
        let report = run_all(&cfg).unwrap();
        let failures: Vec<String> = report.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        assert!(failures.is_empty(), "{failures:#?}");
    }
}
