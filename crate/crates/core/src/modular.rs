//! The modular derivation of a Poisson structure, its definitional oracle,
//! and bounded-degree witness searches for (pseudo-)unimodularity.

use std::collections::BTreeMap;

use crate::blade::Blade;
use crate::error::{Error, Result};
use crate::exterior::{apply_raw, contract_mv, de_rham, lie_derivative, pair, KForm, Multivector};
use crate::poisson::{hamiltonian, PoissonStructure};
use crate::presentation::SmoothPresentation;
use crate::linalg::SparseSystem;
use crate::ring::{Monomial, Poly, Rational};

/// `phi = phi1 + phi2` with `phi1(a) = sum_s (dx_s)*({a, x_s})` and
/// `phi2(a) = sum_I {a, a_I} b_I`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModularData {
    pub phi: Multivector,
    pub phi1: Multivector,
    pub phi2: Multivector,
}

pub fn modular_derivation(pres: &SmoothPresentation, ps: &PoissonStructure) -> Result<ModularData> {
    pres.check_owner(ps.pi())?;
    let ring = pres.ring();
    let r = pres.nvars();
    let mut v1 = Vec::with_capacity(r);
    let mut v2 = Vec::with_capacity(r);
    for j in 0..r {
        let xj = ring.var(j);
        let mut s1 = ring.zero();
        for s in 0..r {
            let b = apply_raw(pres, ps.pi(), &[xj.clone(), ring.var(s)]);
            s1 = s1.add(&pres.dual_derivation_raw(s, &b));
        }
        v1.push(s1);
        let mut s2 = ring.zero();
        for (k, a) in pres.volume_a() {
            if let Some(b) = pres.volume_b().get(k) {
                let br = apply_raw(pres, ps.pi(), &[xj.clone(), a.clone()]);
                s2 = s2.add(&ring.mul(&br, b));
            }
        }
        v2.push(s2);
    }
    let phi1 = pres.derivation_from_values(&v1);
    let phi2 = pres.derivation_from_values(&v2);
    let phi = phi1.add(&phi2);
    Ok(ModularData { phi, phi1, phi2 })
}

/// `L_{H_a}(vol) / vol`, divided through the pairing with `vol*` and
/// checked by multiplying back.
pub fn modular_oracle(pres: &SmoothPresentation, ps: &PoissonStructure, a: &Poly) -> Result<Poly> {
    let h = hamiltonian(pres, ps, a)?;
    let vol = pres.vol();
    let lie = lie_derivative(pres, &h, &vol)?;
    let c = pair(pres, &pres.vol_star(), &lie)?;
    let residue = lie.sub(&pres.scale_poly(&c, &vol));
    if !residue.is_zero() {
        return Err(Error::DivisionInconsistent(crate::expr::render_form(pres, &residue)));
    }
    Ok(c)
}

/// Normal monomials of total degree at most `d`, ascending.
fn normal_monomials(pres: &SmoothPresentation, d: u32) -> Vec<Monomial> {
    let mut out: Vec<Monomial> = (0..=d)
        .flat_map(|k| Monomial::of_degree(pres.nvars(), k))
        .filter(|m| pres.ring().is_normal_monomial(m))
        .collect();
    out.sort();
    out
}

fn coefficients<K>(x: &crate::exterior::Graded<K>, tag: u8) -> BTreeMap<(u8, Blade, Monomial), Rational> {
    let mut out = BTreeMap::new();
    for (b, p) in x.terms() {
        for (m, c) in p.terms() {
            out.insert((tag, *b, m.clone()), c.clone());
        }
    }
    out
}

/// Some `u` of degree at most `max_degree` with `H_u = target`, searching
/// degree bounds `0..=max_degree` in turn.
pub fn hamiltonian_witness(
    pres: &SmoothPresentation,
    ps: &PoissonStructure,
    target: &Multivector,
    max_degree: u32,
) -> Result<Option<Poly>> {
    pres.check_owner(target)?;
    let rhs = coefficients(target, 0);
    for d in 0..=max_degree {
        let monos = normal_monomials(pres, d);
        let mut sys = SparseSystem::new();
        for m in &monos {
            let u = Poly::monomial(pres.nvars(), m.clone(), Rational::from_integer(1.into()));
            sys.push_column(coefficients(&hamiltonian(pres, ps, &u)?, 0));
        }
        if let Some(sol) = sys.solve(&rhs) {
            let u = Poly::from_terms(pres.nvars(), monos.into_iter().zip(sol));
            if hamiltonian(pres, ps, &u)? == *target {
                return Ok(Some(u));
            }
        }
    }
    Ok(None)
}

/// Some closed 1-form `w` with coefficients of degree at most `max_degree`
/// and `iota_w pi = phi_vol`.
pub fn pseudo_unimodular_witness(
    pres: &SmoothPresentation,
    ps: &PoissonStructure,
    max_degree: u32,
) -> Result<Option<KForm>> {
    let md = modular_derivation(pres, ps)?;
    let rhs = coefficients(&md.phi, 0);
    for d in 0..=max_degree {
        let monos = normal_monomials(pres, d);
        let mut sys = SparseSystem::new();
        let mut unknowns = Vec::new();
        for i in 0..pres.nvars() {
            for m in &monos {
                let w = pres.form(
                    1,
                    [(Blade::single(i), Poly::monomial(pres.nvars(), m.clone(), Rational::from_integer(1.into())))],
                );
                let mut col = coefficients(&contract_mv(pres, &w, ps.pi())?, 0);
                col.extend(coefficients(&de_rham(pres, &w)?, 1));
                sys.push_column(col);
                unknowns.push(w);
            }
        }
        if let Some(sol) = sys.solve(&rhs) {
            let mut w = KForm::zero(pres, 1);
            for (basis, c) in unknowns.iter().zip(sol) {
                w = w.add(&basis.scale(&c));
            }
            let ok = contract_mv(pres, &w, ps.pi())? == md.phi && de_rham(pres, &w)?.is_zero();
            if ok {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::expr::{parse_multivector, render_multivector};

    #[test]
    fn quadratic_plane_modular() {
        let doc = bundled::load("quadratic_plane").unwrap();
        let pres = &doc.presentation;
        let ps = doc.poisson().unwrap();
        let md = modular_derivation(pres, &ps).unwrap();
        assert_eq!(render_multivector(pres, &md.phi), "x*(d x)* - y*(d y)*");
        let x = pres.ring().var(0);
        assert_eq!(modular_oracle(pres, &ps, &x).unwrap(), x);
        assert!(modular_oracle(pres, &ps, &pres.ring().one()).unwrap().is_zero());
        assert_eq!(hamiltonian_witness(pres, &ps, &md.phi, 6).unwrap(), None);
        assert_eq!(pseudo_unimodular_witness(pres, &ps, 6).unwrap(), None);
    }

    #[test]
    fn symplectic_witnesses() {
        let doc = bundled::load("free_symplectic_plane").unwrap();
        let pres = &doc.presentation;
        let ps = doc.poisson().unwrap();
        let target = parse_multivector(pres, "(d y)*").unwrap();
        let u = hamiltonian_witness(pres, &ps, &target, 1).unwrap().unwrap();
        assert_eq!(pres.poly_string(&u), "x");
        let zero = Multivector::zero(pres, 1);
        assert_eq!(hamiltonian_witness(pres, &ps, &zero, 3).unwrap(), Some(pres.ring().zero()));
        let w = pseudo_unimodular_witness(pres, &ps, 2).unwrap().unwrap();
        assert!(w.is_zero());
    }
}
