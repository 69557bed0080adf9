//! Worked values on the bundled structures, checked through the public API
//! and the text syntax.

use poisson_bv::bundled;
use poisson_bv::bv::{bv_delta, bv_delta_explicit, BvOperator};
use poisson_bv::duality::{dag, ddag, flat, DualityContext};
use poisson_bv::expr::{parse_form, parse_multivector, parse_poly, render_multivector};
use poisson_bv::exterior::{contract_form, contract_mv, de_rham, lie_derivative, mv_apply, pair, schouten};
use poisson_bv::input::{parse_document, InputDocument};
use poisson_bv::modular::{hamiltonian_witness, modular_derivation, modular_oracle, pseudo_unimodular_witness};
use poisson_bv::poisson::{bracket, chain_partial, cochain_delta, hamiltonian, validate_poisson, PoissonStructure};
use poisson_bv::{Error, KForm, Multivector, Poly, SmoothPresentation};

fn doc(name: &str) -> InputDocument {
    bundled::load(name).unwrap()
}

fn structure(d: &InputDocument) -> PoissonStructure {
    d.poisson().unwrap()
}

fn p(pres: &SmoothPresentation, s: &str) -> Poly {
    pres.ring().normal_form(&parse_poly(pres.ring(), s).unwrap())
}

fn mv(pres: &SmoothPresentation, s: &str) -> Multivector {
    parse_multivector(pres, s).unwrap()
}

fn form(pres: &SmoothPresentation, s: &str) -> KForm {
    parse_form(pres, s).unwrap()
}

#[test]
fn sphere_normal_forms() {
    let d = doc("sphere_so3");
    let pres = &d.presentation;
    assert_eq!(p(pres, "z^3"), p(pres, "z - x^2*z - y^2*z"));
    assert!(p(pres, "x^2 + y^2 + z^2 - 1").is_zero());
    assert!(pres.ring().poly_equal(&p(pres, "z^2"), &p(pres, "1 - x^2 - y^2")).unwrap());
}

#[test]
fn sphere_dual_derivations() {
    let d = doc("sphere_so3");
    let pres = &d.presentation;
    let f = p(pres, "x*y");
    assert_eq!(pres.dual_derivation(0, &f).unwrap(), p(pres, "y - 2*x^2*y"));
    assert!(pres.dual_derivation(0, &p(pres, "x^2 + y^2 + z^2")).unwrap().is_zero());
}

#[test]
fn sphere_canonical_projection() {
    let d = doc("sphere_so3");
    let pres = &d.presentation;
    assert!(form(pres, "x*d x + y*d y + z*d z").is_zero());
    assert!(form(pres, "d x ^ d y ^ d z").is_zero());
    assert!(mv(pres, "(d x)* ^ (d y)* ^ (d z)*").is_zero());
    assert!(mv(pres, "x*(d x)* + y*(d y)* + z*(d z)*").is_zero());
    let w = form(pres, "x*d y ^ d z + y*d z ^ d x + z*d x ^ d y");
    assert!(de_rham(pres, &w).unwrap().is_zero());
    assert_eq!(pair(pres, &pres.vol_star(), &pres.vol()).unwrap(), pres.ring().one());
}

#[test]
fn corrupted_sphere_dual_basis_is_rejected() {
    let d = doc("sphere_so3");
    let ok = poisson_bv::validate_presentation(&d.presentation);
    assert!(ok.passed(), "{ok}");
    let text = bundled::source("sphere_so3").unwrap().replace("(x, x) = 1 - x^2", "(x, x) = 1");
    assert_ne!(text, bundled::source("sphere_so3").unwrap());
    let bad = parse_document(&text).unwrap();
    let r = poisson_bv::validate_presentation(&bad.presentation);
    let failed: Vec<_> = r.failures().map(|c| c.name.as_str()).collect();
    assert!(failed.contains(&"trace"), "{r}");
    assert!(failed.contains(&"idempotency[x,x]"), "{r}");
}

#[test]
fn free_plane_calculus() {
    let pres = SmoothPresentation::polynomial(&["x", "y"]);
    let dxdy = form(&pres, "d x ^ d y");
    assert_eq!(contract_form(&pres, &mv(&pres, "(d x)*"), &dxdy).unwrap(), form(&pres, "d y"));
    assert_eq!(
        contract_form(&pres, &mv(&pres, "(d x)* ^ (d y)*"), &dxdy).unwrap(),
        form(&pres, "1")
    );
    assert_eq!(
        contract_mv(&pres, &form(&pres, "d x"), &mv(&pres, "(d x)* ^ (d y)*")).unwrap(),
        mv(&pres, "-(d y)*")
    );
    assert_eq!(
        mv_apply(&pres, &mv(&pres, "(d x)* ^ (d y)*"), &[p(&pres, "x^2*y"), p(&pres, "y")]).unwrap(),
        p(&pres, "2*x*y")
    );
    assert_eq!(de_rham(&pres, &form(&pres, "y*d x")).unwrap(), form(&pres, "-d x ^ d y"));
    assert_eq!(pres.differential(&p(&pres, "x^2*y")), form(&pres, "2*x*y*d x + x^2*d y"));
    assert_eq!(lie_derivative(&pres, &mv(&pres, "x*(d x)*"), &dxdy).unwrap(), dxdy);
    assert!(lie_derivative(&pres, &mv(&pres, "(d x)*"), &dxdy).unwrap().is_zero());
    assert_eq!(
        schouten(&pres, &mv(&pres, "(d x)*"), &mv(&pres, "x*(d x)*")).unwrap(),
        mv(&pres, "(d x)*")
    );
    let v = mv(&pres, "y*(d x)* + x^2*(d y)*");
    let a = p(&pres, "x^3 + y");
    let expected = mv_apply(&pres, &v, std::slice::from_ref(&a)).unwrap();
    assert_eq!(schouten(&pres, &v, &pres.scalar_mv(&a)).unwrap(), pres.scalar_mv(&expected));
}

#[test]
fn brackets_and_hamiltonians() {
    let d = doc("quadratic_plane");
    let (pres, ps) = (&d.presentation, structure(&d));
    assert_eq!(bracket(pres, &ps, &p(pres, "x^2"), &p(pres, "y")).unwrap(), p(pres, "2*x^2*y"));

    let d = doc("free_symplectic_plane");
    let (pres, ps) = (&d.presentation, structure(&d));
    assert_eq!(hamiltonian(pres, &ps, &p(pres, "x")).unwrap(), mv(pres, "(d y)*"));
    assert_eq!(hamiltonian_witness(pres, &ps, &mv(pres, "(d y)*"), 1).unwrap(), Some(p(pres, "x")));
    assert!(hamiltonian(pres, &ps, &p(pres, "5")).unwrap().is_zero());
    assert!(chain_partial(pres, &ps, &form(pres, "d x ^ d y"), None).unwrap().is_zero());

    let d = doc("sphere_so3");
    let (pres, ps) = (&d.presentation, structure(&d));
    assert_eq!(bracket(pres, &ps, &p(pres, "x"), &p(pres, "y")).unwrap(), p(pres, "z"));
    assert_eq!(hamiltonian(pres, &ps, &p(pres, "x")).unwrap(), mv(pres, "z*(d y)* - y*(d z)*"));
    assert_eq!(
        contract_mv(pres, &form(pres, "d x"), ps.pi()).unwrap(),
        hamiltonian(pres, &ps, &p(pres, "x")).unwrap().neg()
    );
}

#[test]
fn casimir_is_a_cocycle() {
    let d = doc("so3_free");
    let (pres, ps) = (&d.presentation, structure(&d));
    let c = pres.scalar_mv(&p(pres, "x^2 + y^2 + z^2"));
    assert!(cochain_delta(pres, &ps, &c, None).unwrap().is_zero());
}

#[test]
fn jacobi_witness_on_corrupted_table() {
    let d = doc("corrupted_so3");
    let r = validate_poisson(&d.presentation, &d.table);
    assert!(!r.passed());
    let jac = r.failures().find(|c| c.name == "jacobi[x,y,z]").expect("jacobi failure");
    assert!(!jac.detail.is_empty() && jac.detail != "0", "{}", jac.detail);
    assert!(d.poisson().is_err());
}

#[test]
fn modular_values() {
    for (name, expected) in [
        ("quadratic_plane", "x*(d x)* - y*(d y)*"),
        ("free_symplectic_plane", "0"),
        ("so3_free", "0"),
        ("sphere_so3", "0"),
    ] {
        let d = doc(name);
        let (pres, ps) = (&d.presentation, structure(&d));
        let md = modular_derivation(pres, &ps).unwrap();
        assert_eq!(render_multivector(pres, &md.phi), expected, "{name}");
        for j in 0..pres.nvars() {
            let x = pres.ring().var(j);
            let via_phi = mv_apply(pres, &md.phi, std::slice::from_ref(&x)).unwrap();
            assert_eq!(modular_oracle(pres, &ps, &x).unwrap(), via_phi, "{name}");
        }
    }
    let d = doc("sphere_so3");
    assert!(modular_derivation(&d.presentation, &structure(&d)).unwrap().phi2.is_zero());
    let d = doc("quadratic_plane");
    let (pres, ps) = (&d.presentation, structure(&d));
    assert_eq!(modular_oracle(pres, &ps, &p(pres, "x")).unwrap(), p(pres, "x"));
    assert!(modular_oracle(pres, &ps, &p(pres, "1")).unwrap().is_zero());
}

#[test]
fn pseudo_unimodularity() {
    for name in ["free_symplectic_plane", "so3_free", "sphere_so3"] {
        let d = doc(name);
        let w = pseudo_unimodular_witness(&d.presentation, &structure(&d), 6).unwrap();
        assert!(w.expect(name).is_zero(), "{name}");
    }
    let d = doc("quadratic_plane");
    let (pres, ps) = (&d.presentation, structure(&d));
    assert!(pseudo_unimodular_witness(pres, &ps, 6).unwrap().is_none());
    let phi = modular_derivation(pres, &ps).unwrap().phi;
    assert!(hamiltonian_witness(pres, &ps, &phi, 6).unwrap().is_none());
}

#[test]
fn duality_maps_on_the_plane() {
    let pres = SmoothPresentation::polynomial(&["x", "y"]);
    let ctx = DualityContext::new(&pres).unwrap();
    let dx = mv(&pres, "(d x)*");
    assert_eq!(ddag(&ctx, &dx).unwrap(), form(&pres, "d y"));
    assert_eq!(flat(&ctx, &form(&pres, "d y")).unwrap(), dx);
    assert_eq!(dag(&ctx, &dx).unwrap(), form(&pres, "-d y"));
    assert_eq!(ddag(&ctx, &mv(&pres, "1")).unwrap(), pres.vol());
    assert_eq!(flat(&ctx, &pres.vol()).unwrap(), mv(&pres, "1"));
    let a = mv(&pres, "x - 3*y^2");
    assert_eq!(dag(&ctx, &a).unwrap(), pres.scale_poly(&p(&pres, "x - 3*y^2"), &pres.vol()));

    let d = doc("sphere_so3");
    let ctx = DualityContext::new(&d.presentation).unwrap();
    assert_eq!(ddag(&ctx, ctx.vol_star()).unwrap(), form(&d.presentation, "1"));
}

#[test]
fn bv_examples() {
    let pres = SmoothPresentation::polynomial(&["x", "y"]);
    let op = BvOperator::untwisted(DualityContext::new(&pres).unwrap());
    let f = mv(&pres, "x^2*y*(d x)* ^ (d y)*");
    let expected = mv(&pres, "x^2*(d x)* - 2*x*y*(d y)*");
    assert_eq!(bv_delta(&op, &f).unwrap(), expected);
    assert_eq!(bv_delta_explicit(&pres, &f).unwrap(), expected);
    assert!(bv_delta(&op, &mv(&pres, "x^3")).unwrap().is_zero());

    for name in ["quadratic_plane", "sphere_so3"] {
        let d = doc(name);
        let (pres, ps) = (&d.presentation, structure(&d));
        let op = BvOperator::untwisted(DualityContext::new(pres).unwrap());
        let phi = modular_derivation(pres, &ps).unwrap().phi;
        assert_eq!(bv_delta(&op, ps.pi()).unwrap(), phi, "{name}");
        assert_eq!(bv_delta_explicit(pres, ps.pi()).unwrap(), phi, "{name}");
    }
}

#[test]
fn non_closed_twist_is_rejected() {
    let pres = SmoothPresentation::polynomial(&["x", "y"]);
    let ctx = DualityContext::new(&pres).unwrap();
    let err = BvOperator::new(ctx, Some(form(&pres, "y*d x"))).unwrap_err();
    assert!(matches!(err, Error::NotClosed(_)), "{err}");
}

#[test]
fn parse_errors_carry_location() {
    let text = "[ring]\ngenerators = x, y\n\n[poisson]\n{x, y} = w\n";
    match parse_document(text) {
        Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (5, 10)),
        other => panic!("expected a parse error, got {:?}", other.map(|_| ())),
    }
}
