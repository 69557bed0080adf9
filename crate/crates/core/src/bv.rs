//! The BV operator generating the Schouten bracket, by the duality route
//! and by its explicit formula, and its twist by a closed 1-form.

use crate::duality::{dag, dag_inverse, DualityContext};
use crate::error::{Error, Result};
use crate::exterior::{apply_raw, contract_mv, de_rham, form_wedge, minus_one_pow, mv_wedge, KForm, Multivector};
use crate::expr::render_form;
use crate::presentation::SmoothPresentation;
use crate::ring::Poly;

/// `Delta = dag^{-1} d_t dag` with `d_t = d - w ^` for the closed twist `w`
/// (`d_t = d` without one).
#[derive(Clone, Debug)]
pub struct BvOperator {
    ctx: DualityContext,
    twist: Option<KForm>,
}

impl BvOperator {
    pub fn new(ctx: DualityContext, twist: Option<KForm>) -> Result<Self> {
        if let Some(w) = &twist {
            let pres = ctx.presentation();
            if w.degree() != 1 && !w.is_zero() {
                return Err(Error::DegreeMismatch {
                    left: w.degree(),
                    right: 1,
                });
            }
            let dw = de_rham(pres, w)?;
            if !dw.is_zero() {
                return Err(Error::NotClosed(render_form(pres, &dw)));
            }
        }
        Ok(BvOperator { ctx, twist })
    }

    pub fn untwisted(ctx: DualityContext) -> Self {
        BvOperator { ctx, twist: None }
    }

    pub fn context(&self) -> &DualityContext {
        &self.ctx
    }

    pub fn twist(&self) -> Option<&KForm> {
        self.twist.as_ref()
    }

    fn pres(&self) -> &SmoothPresentation {
        self.ctx.presentation()
    }

    /// `d_t` on forms.
    pub fn twisted_de_rham(&self, w: &KForm) -> Result<KForm> {
        let pres = self.pres();
        let mut out = de_rham(pres, w)?;
        if let Some(t) = &self.twist {
            out = out.sub(&form_wedge(pres, t, w)?);
        }
        Ok(if out.is_zero() {
            KForm::zero(pres, w.degree() + 1)
        } else {
            out
        })
    }

    /// Delta on any degree: zero of degree 0 for `p = 0`, zero for `p > n`.
    fn apply(&self, f: &Multivector) -> Result<Multivector> {
        let pres = self.pres();
        let p = f.degree();
        if p == 0 {
            return Ok(Multivector::zero(pres, 0));
        }
        if p > pres.dim() {
            return Ok(Multivector::zero(pres, p - 1));
        }
        let w = self.twisted_de_rham(&dag(&self.ctx, f)?)?;
        let out = dag_inverse(&self.ctx, &w)?;
        Ok(if out.is_zero() {
            Multivector::zero(pres, p - 1)
        } else {
            out
        })
    }
}

/// Delta by the duality route, using the operator's twist if present.
pub fn bv_delta(op: &BvOperator, f: &Multivector) -> Result<Multivector> {
    op.pres().check_owner(f)?;
    if f.degree() > op.pres().dim() {
        return Err(Error::DegreeOutOfRange {
            degree: f.degree(),
            max: op.pres().dim(),
        });
    }
    op.apply(f)
}

/// `Delta(P)(a) = (-1)^p [sum_l (dx_l)*(P(a, x_l)) + sum_I P(a, a_I) b_I]`
/// on generator tuples `a`, untwisted.
pub fn bv_delta_explicit(pres: &SmoothPresentation, f: &Multivector) -> Result<Multivector> {
    pres.check_owner(f)?;
    let p = f.degree();
    if p == 0 {
        return Ok(Multivector::zero(pres, 0));
    }
    let ring = pres.ring();
    let sign = minus_one_pow(p);
    Ok(pres.mv_from_generator_values(p - 1, |l| {
        let args: Vec<Poly> = l.indices().into_iter().map(|g| ring.var(g)).collect();
        let mut acc = ring.zero();
        for s in 0..pres.nvars() {
            let mut a = args.clone();
            a.push(ring.var(s));
            acc = acc.add(&pres.dual_derivation_raw(s, &apply_raw(pres, f, &a)));
        }
        for (k, vol_a) in pres.volume_a() {
            if let Some(b) = pres.volume_b().get(k) {
                let mut a = args.clone();
                a.push(vol_a.clone());
                acc = acc.add(&ring.mul(&apply_raw(pres, f, &a), b));
            }
        }
        acc.scale(&sign)
    }))
}

/// `(-1)^p (Delta(P ^ Q) - Delta(P) ^ Q - (-1)^p P ^ Delta(Q))`.
pub fn gerstenhaber_via_bv(op: &BvOperator, pm: &Multivector, qm: &Multivector) -> Result<Multivector> {
    let pres = op.pres();
    let p = pm.degree();
    let pq = mv_wedge(pres, pm, qm)?;
    let pq = if pq.is_zero() {
        Multivector::zero(pres, p + qm.degree())
    } else {
        pq
    };
    let mut out = op.apply(&pq)?;
    out = out.sub(&mv_wedge(pres, &op.apply(pm)?, qm)?);
    out = out.sub(&mv_wedge(pres, pm, &op.apply(qm)?)?.scale(&minus_one_pow(p)));
    let out = out.scale(&minus_one_pow(p));
    let m = (p + qm.degree()).saturating_sub(1);
    Ok(if out.is_zero() {
        Multivector::zero(pres, m)
    } else {
        out
    })
}

/// `Delta(P) - (-1)^p iota_w P` with Delta untwisted and `w` the
/// operator's twist.
pub fn bv_twisted(op: &BvOperator, f: &Multivector) -> Result<Multivector> {
    let pres = op.pres();
    let base = bv_delta(&BvOperator::untwisted(op.ctx.clone()), f)?;
    let Some(w) = &op.twist else {
        return Ok(base);
    };
    let p = f.degree();
    if p == 0 {
        return Ok(base);
    }
    let out = base.sub(&contract_mv(pres, w, f)?.scale(&minus_one_pow(p)));
    Ok(if out.is_zero() {
        Multivector::zero(pres, p - 1)
    } else {
        out
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::expr::{parse_form, parse_multivector, render_multivector};
    use crate::exterior::schouten;
    use crate::modular::modular_derivation;

    fn plane() -> (SmoothPresentation, BvOperator) {
        let pres = SmoothPresentation::polynomial(&["x", "y"]);
        let op = BvOperator::untwisted(DualityContext::new(&pres).unwrap());
        (pres, op)
    }

    #[test]
    fn closed_form_example() {
        let (pres, op) = plane();
        let p = parse_multivector(&pres, "x^2*y*(d x)* ^ (d y)*").unwrap();
        let d = bv_delta(&op, &p).unwrap();
        assert_eq!(render_multivector(&pres, &d), "x^2*(d x)* - 2*x*y*(d y)*");
        assert_eq!(bv_delta_explicit(&pres, &p).unwrap(), d);
        let a = pres.scalar_mv(&pres.ring().var(0));
        assert!(bv_delta(&op, &a).unwrap().is_zero());
    }

    #[test]
    fn delta_of_pi_is_modular() {
        for name in bundled::NONZERO_POISSON {
            let doc = bundled::load(name).unwrap();
            let pres = &doc.presentation;
            let ps = doc.poisson().unwrap();
            let op = BvOperator::untwisted(DualityContext::new(pres).unwrap());
            let phi = modular_derivation(pres, &ps).unwrap().phi;
            assert_eq!(bv_delta(&op, ps.pi()).unwrap(), phi, "{name}");
            assert_eq!(bv_delta_explicit(pres, ps.pi()).unwrap(), phi, "{name}");
        }
    }

    #[test]
    fn bracket_of_vector_fields() {
        let (pres, op) = plane();
        let p = parse_multivector(&pres, "x*y*(d x)* + (d y)*").unwrap();
        let q = parse_multivector(&pres, "y^2*(d x)* - x*(d y)*").unwrap();
        assert_eq!(gerstenhaber_via_bv(&op, &p, &q).unwrap(), schouten(&pres, &p, &q).unwrap());
        let a = parse_multivector(&pres, "x^2*y").unwrap();
        assert_eq!(gerstenhaber_via_bv(&op, &a, &q).unwrap(), schouten(&pres, &a, &q).unwrap());
    }

    #[test]
    fn twisted_examples() {
        let (pres, _) = plane();
        let ctx = DualityContext::new(&pres).unwrap();
        let w = parse_form(&pres, "d x").unwrap();
        let op = BvOperator::new(ctx.clone(), Some(w)).unwrap();
        let dx = parse_multivector(&pres, "(d x)*").unwrap();
        assert_eq!(render_multivector(&pres, &bv_twisted(&op, &dx).unwrap()), "1");
        assert_eq!(bv_delta(&op, &dx).unwrap(), bv_twisted(&op, &dx).unwrap());
        let bad = parse_form(&pres, "y*d x").unwrap();
        assert!(matches!(BvOperator::new(ctx, Some(bad)), Err(Error::NotClosed(_))));
    }
}
