//! The sectioned `.pois` structure file.
//!
//! ```text
//! [ring]
//! generators = x, y, z
//! smooth_dim = 2
//! relation = z^2 -> 1 - x^2 - y^2
//!
//! [dual_basis]
//! (x, x) = 1 - x^2        # (d x)*(x); unlisted entries are 0
//!
//! [volume]
//! a(y, z) = x
//! b(y, z) = x
//!
//! [poisson]
//! {x, y} = z
//!
//! [options]
//! assert_confluent = true
//! ```
//!
//! Omitting `[dual_basis]` means the identity matrix; omitting `[volume]`
//! means `a = b = 1` on the first `smooth_dim` generators; `smooth_dim`
//! defaults to the number of generators.

use std::collections::BTreeMap;

use crate::blade::{permutation_sign, Blade};
use crate::error::{Error, Result};
use crate::expr::parse_poly_at;
use crate::poisson::{BracketTable, PoissonStructure};
use crate::presentation::SmoothPresentation;
use crate::ring::{rat, Poly, RewriteRule, Ring};

/// A loaded structure file. The Poisson table is not validated here.
#[derive(Clone, Debug)]
pub struct InputDocument {
    pub presentation: SmoothPresentation,
    pub table: BracketTable,
    pub has_poisson: bool,
}

impl InputDocument {
    pub fn poisson_unchecked(&self) -> Result<PoissonStructure> {
        PoissonStructure::from_table_unchecked(&self.presentation, self.table.clone())
    }

    pub fn poisson(&self) -> Result<PoissonStructure> {
        PoissonStructure::new(&self.presentation, self.table.clone())
    }
}

struct Line<'a> {
    no: usize,
    key: &'a str,
    key_col: usize,
    value: &'a str,
    value_col: usize,
}

fn perr<T>(line: usize, column: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        column,
        message: msg.into(),
    })
}

fn col_of(full: &str, part: &str) -> usize {
    // part is a subslice of full
    let off = part.as_ptr() as usize - full.as_ptr() as usize;
    full[..off].chars().count() + 1
}

fn is_name(s: &str) -> bool {
    let mut c = s.chars();
    matches!(c.next(), Some(ch) if ch.is_alphabetic() || ch == '_')
        && c.all(|ch| ch.is_alphanumeric() || ch == '_')
}

/// Parses a comma-separated list of generator names inside the delimiters
/// `open` / `close`; returns indices and their column positions.
fn name_tuple(
    ring: &Ring,
    text: &str,
    full: &str,
    no: usize,
    open: char,
    close: char,
) -> Result<Vec<usize>> {
    let t = text.trim();
    let col = col_of(full, t);
    let inner = match t.strip_prefix(open).and_then(|s| s.strip_suffix(close)) {
        Some(s) => s,
        None => return perr(no, col, format!("expected `{open}name, ..{close}`")),
    };
    let mut out = Vec::new();
    for part in inner.split(',') {
        let name = part.trim();
        let c = col_of(full, name);
        if name.is_empty() {
            return perr(no, c, "empty generator name");
        }
        match ring.index_of(name) {
            Some(i) => out.push(i),
            None => return perr(no, c, format!("undeclared generator `{name}`")),
        }
    }
    Ok(out)
}

pub fn parse_document(text: &str) -> Result<InputDocument> {
    let mut sections: BTreeMap<String, (usize, Vec<Line>)> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (k, raw) in text.lines().enumerate() {
        let no = k + 1;
        let content = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let tcol = col_of(raw, trimmed);
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return perr(no, tcol, "unterminated section header");
            };
            let name = name.trim().to_string();
            if !["ring", "dual_basis", "volume", "poisson", "options"].contains(&name.as_str()) {
                return perr(no, tcol, format!("unknown section `{name}`"));
            }
            if sections.contains_key(&name) {
                return perr(no, tcol, format!("duplicate section `{name}`"));
            }
            sections.insert(name.clone(), (no, Vec::new()));
            current = Some(name);
            continue;
        }
        let Some(sec) = &current else {
            return perr(no, tcol, "entry outside of any section");
        };
        let Some(eq) = trimmed.find('=') else {
            return perr(no, tcol, "expected `key = value`");
        };
        let key = trimmed[..eq].trim();
        let value = trimmed[eq + 1..].trim();
        if key.is_empty() {
            return perr(no, tcol, "missing key");
        }
        let value_col = if value.is_empty() {
            col_of(raw, &trimmed[eq + 1..])
        } else {
            col_of(raw, value)
        };
        if value.is_empty() {
            return perr(no, value_col, "missing value");
        }
        sections.get_mut(sec).unwrap().1.push(Line {
            no,
            key,
            key_col: col_of(raw, key),
            value,
            value_col,
        });
    }
    let raw_lines: Vec<&str> = text.lines().collect();
    let full = |no: usize| raw_lines[no - 1];

    let Some((ring_line, ring_entries)) = sections.get("ring") else {
        return perr(1, 1, "missing [ring] section");
    };
    let mut names: Option<Vec<String>> = None;
    let mut dim: Option<(usize, usize, usize)> = None;
    let mut relations: Vec<&Line> = Vec::new();
    for l in ring_entries {
        match l.key {
            "generators" => {
                let mut v = Vec::new();
                for part in l.value.split(',') {
                    let n = part.trim();
                    let c = col_of(full(l.no), n);
                    if !is_name(n) || n == "d" {
                        return perr(l.no, c, format!("invalid generator name `{n}`"));
                    }
                    if v.iter().any(|x: &String| x == n) {
                        return perr(l.no, c, format!("duplicate generator `{n}`"));
                    }
                    v.push(n.to_string());
                }
                names = Some(v);
            }
            "smooth_dim" => match l.value.parse::<usize>() {
                Ok(n) => dim = Some((n, l.no, l.value_col)),
                Err(_) => return perr(l.no, l.value_col, "smooth_dim must be a non-negative integer"),
            },
            "relation" => relations.push(l),
            other => return perr(l.no, l.key_col, format!("unknown key `{other}` in [ring]")),
        }
    }
    let Some(names) = names else {
        return perr(*ring_line, 1, "[ring] needs `generators`");
    };
    let free_ring = Ring::polynomial(names.clone());
    let r = names.len();

    let mut assert_confluent = false;
    if let Some((_, entries)) = sections.get("options") {
        for l in entries {
            match (l.key, l.value) {
                ("assert_confluent", "true") => assert_confluent = true,
                ("assert_confluent", "false") => assert_confluent = false,
                ("assert_confluent", _) => return perr(l.no, l.value_col, "expected `true` or `false`"),
                (other, _) => return perr(l.no, l.key_col, format!("unknown option `{other}`")),
            }
        }
    }

    let mut rules = Vec::new();
    for l in &relations {
        let Some(arrow) = l.value.find("->") else {
            return perr(l.no, l.value_col, "expected `leading monomial -> tail`");
        };
        let lhs = l.value[..arrow].trim();
        let rhs = l.value[arrow + 2..].trim();
        let lcol = col_of(full(l.no), lhs);
        let lead = parse_poly_at(&free_ring, lhs, l.no, lcol)?;
        let lead = match lead.leading() {
            Some((m, c)) if lead.num_terms() == 1 && *c == rat(1) && !m.is_one() => m.clone(),
            _ => return perr(l.no, lcol, "leading side must be a monic non-constant monomial"),
        };
        let tail = parse_poly_at(&free_ring, rhs, l.no, col_of(full(l.no), rhs))?;
        rules.push(RewriteRule { lead, tail });
    }
    let ring = match Ring::new(names.clone(), rules, assert_confluent) {
        Ok(ring) => ring,
        Err(e) => {
            let at = relations.first().map(|l| (l.no, l.value_col)).unwrap_or((*ring_line, 1));
            return perr(at.0, at.1, e.to_string());
        }
    };
    let (n, _, _) = dim.unwrap_or((r, *ring_line, 1));
    if n > r {
        let (_, no, c) = dim.unwrap();
        return perr(no, c, format!("smooth_dim {n} exceeds the {r} generators"));
    }

    let dual = match sections.get("dual_basis") {
        None => None,
        Some((_, entries)) => {
            let mut e: Vec<Vec<Poly>> = vec![vec![ring.zero(); r]; r];
            let mut seen = BTreeMap::new();
            for l in entries {
                let idx = name_tuple(&ring, l.key, full(l.no), l.no, '(', ')')?;
                if idx.len() != 2 {
                    return perr(l.no, l.key_col, "dual-basis keys are pairs `(x_i, x_j)`");
                }
                if seen.insert((idx[0], idx[1]), ()).is_some() {
                    return perr(l.no, l.key_col, "duplicate dual-basis entry");
                }
                e[idx[0]][idx[1]] = parse_poly_at(&ring, l.value, l.no, l.value_col)?;
            }
            Some(e)
        }
    };

    let volume = match sections.get("volume") {
        None => None,
        Some((_, entries)) => {
            let mut a = BTreeMap::new();
            let mut b = BTreeMap::new();
            for l in entries {
                let (which, rest) = if let Some(rest) = l.key.strip_prefix('a') {
                    (&mut a, rest)
                } else if let Some(rest) = l.key.strip_prefix('b') {
                    (&mut b, rest)
                } else {
                    return perr(l.no, l.key_col, "volume keys are `a(..)` or `b(..)`");
                };
                let idx = name_tuple(&ring, rest, full(l.no), l.no, '(', ')')?;
                if idx.len() != n {
                    return perr(l.no, l.key_col, format!("volume keys need {n} generators"));
                }
                let Some(blade) = Blade::from_indices(&idx).filter(|bl| bl.degree() == n) else {
                    return perr(l.no, l.key_col, "repeated generator in volume key");
                };
                let sign = permutation_sign(&idx);
                let p = parse_poly_at(&ring, l.value, l.no, l.value_col)?.scale(&rat(sign as i64));
                if which.insert(blade, p).is_some() {
                    return perr(l.no, l.key_col, "duplicate volume entry");
                }
            }
            Some((a, b))
        }
    };

    let presentation = SmoothPresentation::new(ring.clone(), n, dual, volume)
        .map_err(|e| Error::Parse {
            line: *ring_line,
            column: 1,
            message: e.to_string(),
        })?;

    let mut table = BracketTable::new();
    let has_poisson = sections.contains_key("poisson");
    if let Some((_, entries)) = sections.get("poisson") {
        for l in entries {
            let idx = name_tuple(&ring, l.key, full(l.no), l.no, '{', '}')?;
            if idx.len() != 2 || idx[0] == idx[1] {
                return perr(l.no, l.key_col, "bracket keys are `{x_i, x_j}` with i != j");
            }
            let p = parse_poly_at(&ring, l.value, l.no, l.value_col)?;
            let (key, val) = if idx[0] < idx[1] {
                ((idx[0], idx[1]), p)
            } else {
                ((idx[1], idx[0]), p.neg())
            };
            if table.insert(key, val).is_some() {
                return perr(l.no, l.key_col, "bracket entry given twice");
            }
        }
    }
    table.retain(|_, p| !p.is_zero());
    Ok(InputDocument {
        presentation,
        table,
        has_poisson,
    })
}
