//! Graded dimensions of Poisson cohomology and twisted Poisson homology for
//! homogeneous brackets on a polynomial ring.
//!
//! With common bracket degree `w`, an element `c e_J` with `deg c = d` sits
//! at coefficient degree `d`; the cochain differential maps degree
//! `(p, d)` to `(p + 1, d + w - 1)` and the chain differential maps `(q, d)`
//! to `(q - 1, d + w - 1)`, so every strand is finite-dimensional.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use crate::blade::Blade;
use crate::error::{Error, Result};
use crate::exterior::Graded;
use crate::linalg::SparseSystem;
use crate::modular::modular_derivation;
use crate::poisson::{chain_partial, cochain_delta, PoissonDerivation, PoissonStructure};
use crate::presentation::SmoothPresentation;
use crate::report::ValidationReport;
use crate::ring::{rat, Monomial, Poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StrandEntry {
    pub kernel: usize,
    pub image_in: usize,
    pub homology: usize,
}

/// `(degree, coefficient degree) -> dimensions`; `homology = kernel - image_in`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StrandTable {
    pub entries: BTreeMap<(usize, usize), StrandEntry>,
}

impl StrandTable {
    pub fn get(&self, p: usize, d: usize) -> Option<&StrandEntry> {
        self.entries.get(&(p, d))
    }

    /// Sum of `homology` over coefficient degrees for degree `p`.
    pub fn total(&self, p: usize) -> usize {
        self.entries
            .iter()
            .filter(|((q, _), _)| *q == p)
            .map(|(_, e)| e.homology)
            .sum()
    }

    /// One `p d dim_ker dim_im dim_H` line per entry.
    pub fn lines(&self) -> String {
        let mut s = String::new();
        for ((p, d), e) in &self.entries {
            s.push_str(&format!("{p} {d} {} {} {}\n", e.kernel, e.image_in, e.homology));
        }
        s
    }
}

impl fmt::Display for StrandTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>3} {:>3} {:>7} {:>7} {:>7}", "p", "d", "dim_ker", "dim_im", "dim_H")?;
        for ((p, d), e) in &self.entries {
            writeln!(f, "{p:>3} {d:>3} {:>7} {:>7} {:>7}", e.kernel, e.image_in, e.homology)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Cochain,
    Chain,
}

/// The common bracket degree `w`, taken from `phi` (as `deg + 1`) when
/// `pi = 0`, and `1` when both vanish.
fn weight(pres: &SmoothPresentation, ps: &PoissonStructure, phi: Option<&PoissonDerivation>) -> Result<i64> {
    if !pres.is_free() {
        return Err(Error::NotFreePresentation);
    }
    let w = ps
        .homogeneous_weight()
        .ok_or_else(|| Error::NotGraded("bracket entries have mixed degrees".into()))?;
    let mut phi_deg = None;
    if let Some(phi) = phi {
        for c in phi.phi().terms().values() {
            let d = c
                .homogeneous_degree()
                .ok_or_else(|| Error::NotGraded("twist coefficients are not homogeneous".into()))?;
            match phi_deg {
                None => phi_deg = Some(d),
                Some(e) if e != d => return Err(Error::NotGraded("twist coefficients have mixed degrees".into())),
                _ => {}
            }
        }
    }
    match (w, phi_deg) {
        (Some(w), Some(e)) if e as i64 != w as i64 - 1 => Err(Error::NotGraded(format!(
            "twist coefficients have degree {e}, brackets have degree {w}"
        ))),
        (Some(w), _) => Ok(w as i64),
        (None, Some(e)) => Ok(e as i64 + 1),
        (None, None) => Ok(1),
    }
}

struct Strands<'a> {
    pres: &'a SmoothPresentation,
    ps: &'a PoissonStructure,
    phi: Option<&'a PoissonDerivation>,
    side: Side,
    w: i64,
    ranks: BTreeMap<(usize, usize), usize>,
}

impl<'a> Strands<'a> {
    fn new(
        pres: &'a SmoothPresentation,
        ps: &'a PoissonStructure,
        phi: Option<&'a PoissonDerivation>,
        side: Side,
    ) -> Result<Self> {
        let w = weight(pres, ps, phi)?;
        Ok(Strands {
            pres,
            ps,
            phi,
            side,
            w,
            ranks: BTreeMap::new(),
        })
    }

    fn basis(&self, p: usize, d: usize) -> Vec<(Blade, Monomial)> {
        let r = self.pres.nvars();
        if p > r {
            return Vec::new();
        }
        let monos = Monomial::of_degree(r, d as u32);
        Blade::subsets(r, p)
            .into_iter()
            .flat_map(|b| monos.iter().map(move |m| (b, m.clone())))
            .collect()
    }

    fn columns<K>(&self, x: &Graded<K>, target: i64) -> Result<BTreeMap<(Blade, Monomial), crate::ring::Rational>> {
        let mut col = BTreeMap::new();
        for (b, c) in x.terms() {
            for (m, v) in c.terms() {
                if m.degree() as i64 != target {
                    return Err(Error::NotGraded(format!(
                        "differential leaves the strand: coefficient degree {} instead of {target}",
                        m.degree()
                    )));
                }
                col.insert((*b, m.clone()), v.clone());
            }
        }
        Ok(col)
    }

    /// Rank of the differential leaving `(p, d)`.
    fn rank(&mut self, p: usize, d: usize) -> Result<usize> {
        if let Some(&k) = self.ranks.get(&(p, d)) {
            return Ok(k);
        }
        let target = d as i64 + self.w - 1;
        let r = self.pres.nvars();
        let mut sys = SparseSystem::new();
        let trivial = match self.side {
            Side::Cochain => p >= r,
            Side::Chain => p == 0,
        };
        if !trivial {
            for (b, m) in self.basis(p, d) {
                let c = Poly::monomial(r, m, rat(1));
                let col = match self.side {
                    Side::Cochain => {
                        let f = self.pres.multivector(p, [(b, c)]);
                        self.columns(&cochain_delta(self.pres, self.ps, &f, self.phi)?, target)?
                    }
                    Side::Chain => {
                        let w = self.pres.form(p, [(b, c)]);
                        self.columns(&chain_partial(self.pres, self.ps, &w, self.phi)?, target)?
                    }
                };
                sys.push_column(col);
            }
        }
        let k = sys.rank();
        self.ranks.insert((p, d), k);
        Ok(k)
    }

    /// Source strand of the differential arriving at `(p, d)`.
    fn source(&self, p: usize, d: usize) -> Option<(usize, usize)> {
        let sd = d as i64 - (self.w - 1);
        if sd < 0 {
            return None;
        }
        match self.side {
            Side::Cochain => p.checked_sub(1).map(|q| (q, sd as usize)),
            Side::Chain => (p < self.pres.nvars()).then_some((p + 1, sd as usize)),
        }
    }

    fn entry(&mut self, p: usize, d: usize) -> Result<StrandEntry> {
        let dim = self.basis(p, d).len();
        let kernel = dim - self.rank(p, d)?;
        let image_in = match self.source(p, d) {
            Some((q, e)) => self.rank(q, e)?,
            None => 0,
        };
        Ok(StrandEntry {
            kernel,
            image_in,
            homology: kernel - image_in,
        })
    }

    fn table(&mut self, p_range: RangeInclusive<usize>, d_range: RangeInclusive<usize>) -> Result<StrandTable> {
        let mut t = StrandTable::default();
        for p in p_range {
            for d in d_range.clone() {
                let e = self.entry(p, d)?;
                t.entries.insert((p, d), e);
            }
        }
        Ok(t)
    }
}

/// `dim PH^p` at each coefficient degree, for `delta_phi`.
pub fn cohomology_dims(
    pres: &SmoothPresentation,
    ps: &PoissonStructure,
    phi: Option<&PoissonDerivation>,
    p_range: RangeInclusive<usize>,
    d_range: RangeInclusive<usize>,
) -> Result<StrandTable> {
    Strands::new(pres, ps, phi, Side::Cochain)?.table(p_range, d_range)
}

/// `dim PH_q(R, R_phi)` at each coefficient degree, for `partial_phi`.
pub fn homology_dims(
    pres: &SmoothPresentation,
    ps: &PoissonStructure,
    phi: Option<&PoissonDerivation>,
    q_range: RangeInclusive<usize>,
    d_range: RangeInclusive<usize>,
) -> Result<StrandTable> {
    Strands::new(pres, ps, phi, Side::Chain)?.table(q_range, d_range)
}

fn dim_comparison(
    pres: &SmoothPresentation,
    ps: &PoissonStructure,
    p_range: RangeInclusive<usize>,
    d_range: RangeInclusive<usize>,
    twisted: bool,
) -> Result<Vec<(String, String)>> {
    let n = pres.dim();
    let p_range = *p_range.start()..=(*p_range.end()).min(n);
    let twist = if twisted {
        let md = modular_derivation(pres, ps)?;
        Some(PoissonDerivation::new(pres, ps, md.phi)?)
    } else {
        None
    };
    let co = cohomology_dims(pres, ps, None, p_range.clone(), d_range.clone())?;
    let lo = n - *p_range.end();
    let hi = n - *p_range.start();
    let ho = homology_dims(pres, ps, twist.as_ref(), lo..=hi, d_range.clone())?;
    let mut mismatches = Vec::new();
    for p in p_range {
        for d in d_range.clone() {
            let a = co.get(p, d).unwrap().homology;
            let b = ho.get(n - p, d).unwrap().homology;
            if a != b {
                mismatches.push((
                    format!("[p={p},d={d}]"),
                    format!("dim PH^{p} = {a}, dim PH_{} = {b}", n - p),
                ));
            }
        }
    }
    Ok(mismatches)
}

fn comparison_report(
    name: &str,
    pres: &SmoothPresentation,
    ps: &PoissonStructure,
    p_range: RangeInclusive<usize>,
    d_range: RangeInclusive<usize>,
    twisted: bool,
) -> ValidationReport {
    let mut report = ValidationReport::new();
    let detail = format!(
        "p = {}..{}, d = {}..{}",
        p_range.start(),
        p_range.end(),
        d_range.start(),
        d_range.end()
    );
    match dim_comparison(pres, ps, p_range, d_range, twisted) {
        Ok(m) => report.group(name, detail, m),
        Err(e) => report.fail(name, e.to_string()),
    }
    report
}

/// `dim PH^p(R)_d = dim PH_{n-p}(R, R_t)_d` with the modular twist.
pub fn duality_dim_check(
    pres: &SmoothPresentation,
    ps: &PoissonStructure,
    p_range: RangeInclusive<usize>,
    d_range: RangeInclusive<usize>,
) -> ValidationReport {
    comparison_report("duality_dims", pres, ps, p_range, d_range, true)
}

/// The same comparison against untwisted homology `PH_{n-p}(R, R)`.
pub fn untwisted_dim_check(
    pres: &SmoothPresentation,
    ps: &PoissonStructure,
    p_range: RangeInclusive<usize>,
    d_range: RangeInclusive<usize>,
) -> ValidationReport {
    comparison_report("untwisted_duality_dims", pres, ps, p_range, d_range, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    #[test]
    fn symplectic_plane() {
        let doc = bundled::load("free_symplectic_plane").unwrap();
        let ps = doc.poisson().unwrap();
        let t = cohomology_dims(&doc.presentation, &ps, None, 0..=2, 0..=6).unwrap();
        assert_eq!(t.get(0, 0).unwrap().homology, 1);
        assert_eq!(t.total(0), 1);
        assert_eq!(t.total(1), 0);
        assert_eq!(t.total(2), 0);
        assert!(duality_dim_check(&doc.presentation, &ps, 0..=2, 0..=6).passed());
    }

    #[test]
    fn zero_structure_counts_everything() {
        let doc = bundled::load("zero_structure").unwrap();
        let ps = doc.poisson().unwrap();
        let co = cohomology_dims(&doc.presentation, &ps, None, 0..=2, 0..=3).unwrap();
        let ho = homology_dims(&doc.presentation, &ps, None, 0..=2, 0..=3).unwrap();
        for d in 0..=3 {
            assert_eq!(co.get(0, d).unwrap().homology, d + 1);
            assert_eq!(co.get(1, d).unwrap().homology, 2 * (d + 1));
            assert_eq!(ho.get(2, d).unwrap().homology, d + 1);
        }
    }

    #[test]
    fn quadratic_plane_needs_twist() {
        let doc = bundled::load("quadratic_plane").unwrap();
        let ps = doc.poisson().unwrap();
        assert!(duality_dim_check(&doc.presentation, &ps, 0..=2, 0..=6).passed());
        let bad = untwisted_dim_check(&doc.presentation, &ps, 0..=2, 0..=6);
        assert!(!bad.passed());
        assert_eq!(bad.failures().next().unwrap().name, "untwisted_duality_dims[p=0,d=0]");
    }

    #[test]
    fn sphere_is_rejected() {
        let doc = bundled::load("sphere_so3").unwrap();
        let ps = doc.poisson().unwrap();
        assert_eq!(
            cohomology_dims(&doc.presentation, &ps, None, 0..=1, 0..=1),
            Err(Error::NotFreePresentation)
        );
    }
}
