//! The duality isomorphisms between multivectors and forms over a
//! presentation with a volume form, and the twisted duality square.

use crate::error::{Error, Result};
use crate::exterior::{contract_form, contract_mv, minus_one_pow, pair, KForm, Multivector};
use crate::expr::render_form;
use crate::modular::modular_derivation;
use crate::poisson::{chain_partial, cochain_delta, PoissonDerivation, PoissonStructure};
use crate::presentation::SmoothPresentation;
use crate::report::ValidationReport;

/// A presentation with `vol` and `vol*`; `pair(vol*, vol) = 1`.
#[derive(Clone, Debug)]
pub struct DualityContext {
    pres: SmoothPresentation,
    vol: KForm,
    vol_star: Multivector,
}

impl DualityContext {
    pub fn new(pres: &SmoothPresentation) -> Result<Self> {
        let vol = pres.vol();
        let vol_star = pres.vol_star();
        let c = pair(pres, &vol_star, &vol)?;
        if c != pres.ring().one() {
            return Err(Error::InvalidPresentation(format!(
                "pairing of vol* with vol is {}, not 1",
                pres.poly_string(&c)
            )));
        }
        Ok(DualityContext {
            pres: pres.clone(),
            vol,
            vol_star,
        })
    }

    pub fn presentation(&self) -> &SmoothPresentation {
        &self.pres
    }

    pub fn vol(&self) -> &KForm {
        &self.vol
    }

    pub fn vol_star(&self) -> &Multivector {
        &self.vol_star
    }

    fn check_degree(&self, p: usize) -> Result<()> {
        if p > self.pres.dim() {
            return Err(Error::DegreeOutOfRange {
                degree: p,
                max: self.pres.dim(),
            });
        }
        Ok(())
    }
}

/// `(-1)^{p(p+1)/2}`.
fn dag_sign(p: usize) -> crate::ring::Rational {
    minus_one_pow(p * (p + 1) / 2)
}

/// `F -> iota_F vol`, of degree `n - p`.
pub fn ddag(ctx: &DualityContext, f: &Multivector) -> Result<KForm> {
    ctx.check_degree(f.degree())?;
    let out = contract_form(&ctx.pres, f, &ctx.vol)?;
    Ok(if out.is_zero() {
        KForm::zero(&ctx.pres, ctx.pres.dim() - f.degree())
    } else {
        out
    })
}

/// `w -> iota_w vol*`, of degree `n - q`.
pub fn flat(ctx: &DualityContext, w: &KForm) -> Result<Multivector> {
    ctx.check_degree(w.degree())?;
    let out = contract_mv(&ctx.pres, w, &ctx.vol_star)?;
    Ok(if out.is_zero() {
        Multivector::zero(&ctx.pres, ctx.pres.dim() - w.degree())
    } else {
        out
    })
}

/// `(-1)^{p(p+1)/2} ddag(F)`.
pub fn dag(ctx: &DualityContext, f: &Multivector) -> Result<KForm> {
    Ok(ddag(ctx, f)?.scale(&dag_sign(f.degree())))
}

/// Inverse of `dag`: a form of degree `n - p` goes to a `p`-vector.
pub fn dag_inverse(ctx: &DualityContext, w: &KForm) -> Result<Multivector> {
    let f = flat(ctx, w)?;
    let p = f.degree();
    Ok(f.scale(&dag_sign(p)))
}

fn square(
    ctx: &DualityContext,
    ps: &PoissonStructure,
    f: &Multivector,
    phi: Option<&PoissonDerivation>,
    twisted: bool,
) -> Result<KForm> {
    let pres = &ctx.pres;
    let md = modular_derivation(pres, ps)?;
    let phi_vol = PoissonDerivation::new(pres, ps, md.phi)?;
    let chain_twist = match (phi, twisted) {
        (Some(phi), true) => Some(phi.add(&phi_vol)),
        (None, true) => Some(phi_vol),
        (phi, false) => phi.cloned(),
    };
    let lhs = chain_partial(pres, ps, &dag(ctx, f)?, chain_twist.as_ref())?;
    let delta = cochain_delta(pres, ps, f, phi)?;
    let rhs = if f.degree() < pres.dim() {
        dag(ctx, &delta)?
    } else {
        KForm::zero(pres, 0)
    };
    Ok(lhs.sub(&rhs))
}

fn square_report(name: &str, ctx: &DualityContext, residue: Result<KForm>) -> ValidationReport {
    let mut report = ValidationReport::new();
    match residue {
        Ok(r) if r.is_zero() => report.pass(name, "commutes"),
        Ok(r) => report.fail(name, format!("residue {}", render_form(&ctx.pres, &r))),
        Err(e) => report.fail(name, e.to_string()),
    }
    report
}

/// Checks `partial_{phi + phi_vol}(dag F) = dag(delta_phi F)`.
pub fn verify_duality_square(
    ctx: &DualityContext,
    ps: &PoissonStructure,
    f: &Multivector,
    phi: Option<&PoissonDerivation>,
) -> ValidationReport {
    square_report("duality_square", ctx, square(ctx, ps, f, phi, true))
}

/// The same square with the modular twist left off the chain side.
pub fn verify_untwisted_square(
    ctx: &DualityContext,
    ps: &PoissonStructure,
    f: &Multivector,
    phi: Option<&PoissonDerivation>,
) -> ValidationReport {
    square_report("untwisted_duality_square", ctx, square(ctx, ps, f, phi, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::expr::{parse_form, parse_multivector, render_multivector};

    #[test]
    fn plane_examples() {
        let pres = SmoothPresentation::polynomial(&["x", "y"]);
        let ctx = DualityContext::new(&pres).unwrap();
        let dx = parse_multivector(&pres, "(d x)*").unwrap();
        assert_eq!(render_form(&pres, &ddag(&ctx, &dx).unwrap()), "d y");
        assert_eq!(render_form(&pres, &dag(&ctx, &dx).unwrap()), "-d y");
        let dy = parse_form(&pres, "d y").unwrap();
        assert_eq!(render_multivector(&pres, &flat(&ctx, &dy).unwrap()), "(d x)*");
        assert_eq!(ddag(&ctx, &pres.scalar_mv(&pres.ring().one())).unwrap(), *ctx.vol());
        assert_eq!(render_multivector(&pres, &flat(&ctx, ctx.vol()).unwrap()), "1");
        let f = parse_multivector(&pres, "x*y*(d x)* ^ (d y)*").unwrap();
        assert_eq!(dag(&ctx, &f).unwrap(), ddag(&ctx, &f).unwrap().neg());
        assert_eq!(dag_inverse(&ctx, &dag(&ctx, &f).unwrap()).unwrap(), f);
    }

    #[test]
    fn sphere_vol_star() {
        let doc = bundled::load("sphere_so3").unwrap();
        let ctx = DualityContext::new(&doc.presentation).unwrap();
        let one = doc.presentation.scalar_form(&doc.presentation.ring().one());
        assert_eq!(ddag(&ctx, ctx.vol_star()).unwrap(), one);
    }

    #[test]
    fn quadratic_square_needs_twist() {
        let doc = bundled::load("quadratic_plane").unwrap();
        let pres = &doc.presentation;
        let ps = doc.poisson().unwrap();
        let ctx = DualityContext::new(pres).unwrap();
        let f = pres.scalar_mv(&pres.ring().one());
        assert!(verify_duality_square(&ctx, &ps, &f, None).passed());
        let bad = verify_untwisted_square(&ctx, &ps, &f, None);
        assert!(!bad.passed());
        let g = parse_multivector(pres, "x^2*(d y)*").unwrap();
        assert!(verify_duality_square(&ctx, &ps, &g, None).passed());
    }
}
