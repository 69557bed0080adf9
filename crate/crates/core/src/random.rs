//! Seeded random elements for the identity suites.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::blade::Blade;
use crate::error::Result;
use crate::exterior::{contract_mv, KForm, Multivector};
use crate::modular::modular_derivation;
use crate::poisson::{hamiltonian, PoissonDerivation, PoissonStructure};
use crate::presentation::SmoothPresentation;
use crate::ring::{rat, Monomial, Poly};

pub use rand::SeedableRng;
pub type SuiteRng = ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 20240601;

pub fn rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Normal form of up to `max_terms` monomials of degree at most
/// `max_degree` with coefficients in `-3..=3`.
pub fn poly(rng: &mut SuiteRng, pres: &SmoothPresentation, max_degree: u32, max_terms: usize) -> Poly {
    let r = pres.nvars();
    let mut p = Poly::zero(r);
    let k = rng.gen_range(1..=max_terms);
    for _ in 0..k {
        let d = rng.gen_range(0..=max_degree);
        let monos = Monomial::of_degree(r, d);
        let m = monos[rng.gen_range(0..monos.len())].clone();
        p.add_term(m, rat(rng.gen_range(-3..=3)));
    }
    pres.ring().normal_form(&p)
}

/// A homogeneous polynomial of degree exactly `d` on a free presentation.
pub fn homogeneous_poly(rng: &mut SuiteRng, pres: &SmoothPresentation, d: u32, max_terms: usize) -> Poly {
    let r = pres.nvars();
    let monos = Monomial::of_degree(r, d);
    let mut p = Poly::zero(r);
    for _ in 0..rng.gen_range(1..=max_terms) {
        let m = monos[rng.gen_range(0..monos.len())].clone();
        p.add_term(m, rat(rng.gen_range(-3..=3)));
    }
    p
}

fn coefficients(rng: &mut SuiteRng, pres: &SmoothPresentation, k: usize, max_degree: u32) -> Vec<(Blade, Poly)> {
    let mut out = Vec::new();
    for b in Blade::subsets(pres.nvars(), k) {
        if rng.gen_bool(0.7) {
            out.push((b, poly(rng, pres, max_degree, 3)));
        }
    }
    out
}

pub fn multivector(rng: &mut SuiteRng, pres: &SmoothPresentation, p: usize, max_degree: u32) -> Multivector {
    let t = coefficients(rng, pres, p, max_degree);
    pres.multivector(p, t)
}

pub fn form(rng: &mut SuiteRng, pres: &SmoothPresentation, q: usize, max_degree: u32) -> KForm {
    let t = coefficients(rng, pres, q, max_degree);
    pres.form(q, t)
}

/// `c * x^e e_J` for a random blade `J`, exponent vector `e` and `c`.
pub fn monomial_multivector(rng: &mut SuiteRng, pres: &SmoothPresentation, p: usize, max_degree: u32) -> Multivector {
    let blades = Blade::subsets(pres.nvars(), p);
    let b = blades[rng.gen_range(0..blades.len())];
    let d = rng.gen_range(0..=max_degree);
    let monos = Monomial::of_degree(pres.nvars(), d);
    let m = monos[rng.gen_range(0..monos.len())].clone();
    let c = rat(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
    pres.multivector(p, [(b, Poly::monomial(pres.nvars(), m, c))])
}

/// `df + sum_i c_i dx_i` with constant `c_i`.
pub fn closed_one_form(rng: &mut SuiteRng, pres: &SmoothPresentation, max_degree: u32) -> KForm {
    let f = poly(rng, pres, max_degree, 3);
    let mut w = pres.differential(&f);
    for i in 0..pres.nvars() {
        let c = rng.gen_range(-2..=2);
        if c != 0 {
            w = w.add(&pres.form(1, [(Blade::single(i), pres.ring().constant(rat(c)))]));
        }
    }
    if w.is_zero() {
        KForm::zero(pres, 1)
    } else {
        w
    }
}

/// `H_u + c phi_vol + iota_w pi` with `w` closed.
pub fn poisson_derivation(
    rng: &mut SuiteRng,
    pres: &SmoothPresentation,
    ps: &PoissonStructure,
    max_degree: u32,
) -> Result<PoissonDerivation> {
    let u = poly(rng, pres, max_degree, 3);
    let mut phi = hamiltonian(pres, ps, &u)?;
    let c = rng.gen_range(-2..=2);
    if c != 0 {
        phi = phi.add(&modular_derivation(pres, ps)?.phi.scale_int(c));
    }
    let w = closed_one_form(rng, pres, max_degree);
    phi = phi.add(&contract_mv(pres, &w, ps.pi())?);
    if phi.is_zero() {
        phi = Multivector::zero(pres, 1);
    }
    PoissonDerivation::new(pres, ps, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::exterior::de_rham;

    #[test]
    fn seeded_and_reproducible() {
        let pres = SmoothPresentation::polynomial(&["x", "y"]);
        let draw = |seed| {
            let mut g = rng(seed);
            (0..5).map(|_| poly(&mut g, &pres, 3, 3)).collect::<Vec<_>>()
        };
        let (a, b) = (draw(7), draw(7));
        assert_eq!(a, b);
    }

    #[test]
    fn closed_forms_are_closed() {
        let doc = bundled::load("sphere_so3").unwrap();
        let pres = &doc.presentation;
        let ps = doc.poisson().unwrap();
        let mut g = rng(3);
        for _ in 0..5 {
            let w = closed_one_form(&mut g, pres, 2);
            assert!(de_rham(pres, &w).unwrap().is_zero());
            poisson_derivation(&mut g, pres, &ps, 2).unwrap();
        }
    }
}
