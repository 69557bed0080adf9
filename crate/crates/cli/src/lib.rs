//! Command dispatch for `poisson-bv-calc`; `run` returns the exit status
//! and the rendered report instead of printing.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use rand::Rng as _;

use poisson_bv::bv::{bv_delta, bv_delta_explicit, bv_twisted, BvOperator};
use poisson_bv::duality::{ddag, flat, verify_duality_square, DualityContext};
use poisson_bv::expr::{parse_form, parse_multivector, render_form, render_multivector};
use poisson_bv::homology::{cohomology_dims, duality_dim_check, homology_dims, untwisted_dim_check, StrandTable};
use poisson_bv::identities::{run_all, run_suite, SuiteConfig};
use poisson_bv::input::{parse_document, InputDocument};
use poisson_bv::modular::{modular_derivation, pseudo_unimodular_witness};
use poisson_bv::poisson::{chain_partial, cochain_delta, validate_poisson, PoissonDerivation, PoissonStructure};
use poisson_bv::random::{self, DEFAULT_SEED};
use poisson_bv::{bundled, validate_presentation, Error, Multivector, SmoothPresentation, ValidationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "poisson-bv-calc", version, about = "Exact Poisson calculus on smooth algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Ranges {
    /// Degree range of multivectors or forms, `A..B` or `A`.
    #[arg(long = "p", value_parser = parse_range, default_value = "0..2")]
    p: RangeInclusive<usize>,
    /// Coefficient degree range, `C..D` or `C`.
    #[arg(long = "deg", value_parser = parse_range, default_value = "0..6")]
    deg: RangeInclusive<usize>,
    /// Print `p d dim_ker dim_im dim_H` lines instead of the aligned table.
    #[arg(long)]
    lines: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Presentation and Poisson structure checks.
    Validate { file: String },
    /// The modular derivation and its two parts.
    Modular { file: String },
    /// The Poisson cohomology differential of a multivector.
    Delta {
        file: String,
        multivector: String,
        /// A Poisson derivation twisting the coefficients.
        #[arg(long)]
        twist: Option<String>,
    },
    /// The Poisson homology differential of a form.
    Partial {
        file: String,
        form: String,
        /// A Poisson derivation twisting the coefficients, or `modular`.
        #[arg(long)]
        twist: Option<String>,
    },
    /// The Schouten bracket of two multivectors.
    Schouten { file: String, p: String, q: String },
    /// The BV operator by the duality route and by the explicit formula.
    Bv { file: String, multivector: String },
    /// The BV operator twisted by a closed 1-form.
    BvTwisted {
        file: String,
        multivector: String,
        #[arg(long)]
        omega: String,
    },
    /// Random instances of the duality isomorphisms and the twisted square.
    DualityCheck {
        file: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long = "max-degree", default_value_t = 2)]
        max_degree: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Graded dimensions of Poisson cohomology.
    Cohomology {
        file: String,
        #[command(flatten)]
        ranges: Ranges,
        #[arg(long)]
        twist: Option<String>,
    },
    /// Graded dimensions of Poisson homology.
    Homology {
        file: String,
        #[command(flatten)]
        ranges: Ranges,
        /// A Poisson derivation, or `modular` for the modular derivation.
        #[arg(long)]
        twist: Option<String>,
    },
    /// Compares cohomology with modular-twisted homology, strand by strand.
    DualityDims {
        file: String,
        #[command(flatten)]
        ranges: Ranges,
        /// Compare against untwisted homology instead.
        #[arg(long)]
        untwisted: bool,
    },
    /// Searches a closed 1-form whose contraction with pi is the modular derivation.
    PseudoUnimodular {
        file: String,
        #[arg(long = "max-degree", default_value_t = 6)]
        max_degree: u32,
    },
    /// Runs the randomized identity suites.
    Identities {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long = "max-degree", default_value_t = 3)]
        max_degree: u32,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a non-negative integer"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?);
            if a > b {
                return Err(format!("empty range `{s}`"));
            }
            Ok(a..=b)
        }
        None => num(s).map(|a| a..=a),
    }
}

/// A command outcome: exit status and text.
struct Outcome {
    code: i32,
    text: String,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { code: EXIT_OK, text }
    }

    fn report(report: &ValidationReport) -> Self {
        Outcome {
            code: if report.passed() { EXIT_OK } else { EXIT_CHECK_FAILED },
            text: report.to_string(),
        }
    }
}

/// An error with its exit status.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::UnknownSuite(_) => EXIT_USAGE,
            _ => EXIT_CHECK_FAILED,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Reads `path`; a missing file whose stem names a bundled structure
/// falls back to the bundled copy.
fn load(path: &str) -> Result<InputDocument, Failure> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let stem = Path::new(path).file_stem().and_then(|s| s.to_str()).unwrap_or("");
            match bundled::source(stem) {
                Some(t) if e.kind() == std::io::ErrorKind::NotFound => t.to_string(),
                _ => return Err(usage(format!("{path}: {e}"))),
            }
        }
    };
    parse_document(&text).map_err(|e| match e {
        Error::Parse { .. } => usage(format!("{path}:{e}")),
        other => other.into(),
    })
}

fn argument<T>(what: &str, r: poisson_bv::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| match e {
        Error::Parse { column, message, .. } => usage(format!("{what}: column {column}: {message}")),
        other => other.into(),
    })
}

fn structure(doc: &InputDocument) -> Result<PoissonStructure, Failure> {
    if !doc.has_poisson {
        return Err(usage("the structure file has no [poisson] section"));
    }
    Ok(doc.poisson()?)
}

fn derivation(
    pres: &SmoothPresentation,
    ps: &PoissonStructure,
    text: Option<&str>,
) -> Result<Option<PoissonDerivation>, Failure> {
    let Some(text) = text else { return Ok(None) };
    let phi = if text.trim() == "modular" {
        modular_derivation(pres, ps)?.phi
    } else {
        argument("--twist", parse_multivector(pres, text))?
    };
    let phi = if phi.is_zero() { Multivector::zero(pres, 1) } else { phi };
    Ok(Some(PoissonDerivation::new(pres, ps, phi)?))
}

fn table_text(t: &StrandTable, lines: bool) -> String {
    if lines {
        t.lines()
    } else {
        t.to_string()
    }
}

fn dispatch(cli: Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::Validate { file } => {
            let doc = load(&file)?;
            let mut report = validate_presentation(&doc.presentation);
            if doc.has_poisson {
                report.extend(validate_poisson(&doc.presentation, &doc.table));
            }
            Ok(Outcome::report(&report))
        }
        Command::Modular { file } => {
            let doc = load(&file)?;
            let ps = structure(&doc)?;
            let pres = &doc.presentation;
            let md = modular_derivation(pres, &ps)?;
            Ok(Outcome::ok(format!(
                "phi_vol = {}\nphi_1 = {}\nphi_2 = {}\n",
                render_multivector(pres, &md.phi),
                render_multivector(pres, &md.phi1),
                render_multivector(pres, &md.phi2)
            )))
        }
        Command::Delta { file, multivector, twist } => {
            let doc = load(&file)?;
            let ps = structure(&doc)?;
            let pres = &doc.presentation;
            let f = argument("multivector", parse_multivector(pres, &multivector))?;
            let phi = derivation(pres, &ps, twist.as_deref())?;
            let d = cochain_delta(pres, &ps, &f, phi.as_ref())?;
            Ok(Outcome::ok(format!("{}\n", render_multivector(pres, &d))))
        }
        Command::Partial { file, form, twist } => {
            let doc = load(&file)?;
            let ps = structure(&doc)?;
            let pres = &doc.presentation;
            let w = argument("form", parse_form(pres, &form))?;
            let phi = derivation(pres, &ps, twist.as_deref())?;
            let d = chain_partial(pres, &ps, &w, phi.as_ref())?;
            Ok(Outcome::ok(format!("{}\n", render_form(pres, &d))))
        }
        Command::Schouten { file, p, q } => {
            let doc = load(&file)?;
            let pres = &doc.presentation;
            let a = argument("P", parse_multivector(pres, &p))?;
            let b = argument("Q", parse_multivector(pres, &q))?;
            let s = poisson_bv::exterior::schouten(pres, &a, &b)?;
            Ok(Outcome::ok(format!("{}\n", render_multivector(pres, &s))))
        }
        Command::Bv { file, multivector } => {
            let doc = load(&file)?;
            let pres = &doc.presentation;
            let f = argument("multivector", parse_multivector(pres, &multivector))?;
            let op = BvOperator::untwisted(DualityContext::new(pres)?);
            let a = bv_delta(&op, &f)?;
            let b = bv_delta_explicit(pres, &f)?;
            let mut text = format!(
                "duality route: {}\nexplicit formula: {}\n",
                render_multivector(pres, &a),
                render_multivector(pres, &b)
            );
            let code = if a == b {
                text.push_str("routes agree\n");
                EXIT_OK
            } else {
                text.push_str("routes differ\n");
                EXIT_CHECK_FAILED
            };
            Ok(Outcome { code, text })
        }
        Command::BvTwisted { file, multivector, omega } => {
            let doc = load(&file)?;
            let pres = &doc.presentation;
            let f = argument("multivector", parse_multivector(pres, &multivector))?;
            let w = argument("--omega", parse_form(pres, &omega))?;
            let op = BvOperator::new(DualityContext::new(pres)?, Some(w))?;
            let a = bv_twisted(&op, &f)?;
            let b = bv_delta(&op, &f)?;
            let mut text = format!(
                "twisted operator: {}\nduality route with d - omega^: {}\n",
                render_multivector(pres, &a),
                render_multivector(pres, &b)
            );
            let code = if a == b {
                text.push_str("routes agree\n");
                EXIT_OK
            } else {
                text.push_str("routes differ\n");
                EXIT_CHECK_FAILED
            };
            Ok(Outcome { code, text })
        }
        Command::DualityCheck {
            file,
            samples,
            max_degree,
            seed,
        } => {
            let doc = load(&file)?;
            let ps = structure(&doc)?;
            let pres = &doc.presentation;
            let ctx = DualityContext::new(pres)?;
            let mut g = random::rng(seed);
            let mut report = ValidationReport::new();
            let n = pres.dim();
            let (mut trips, mut squares) = (None, None);
            for i in 0..samples {
                let p = g.gen_range(0..=n);
                let f = random::multivector(&mut g, pres, p, max_degree);
                let w = random::form(&mut g, pres, p, max_degree);
                if trips.is_none()
                    && (flat(&ctx, &ddag(&ctx, &f)?)? != f || ddag(&ctx, &flat(&ctx, &w)?)? != w)
                {
                    trips = Some(format!("instance {i}: {}", render_multivector(pres, &f)));
                }
                let phi = random::poisson_derivation(&mut g, pres, &ps, max_degree)?;
                let twist = g.gen_bool(0.5).then_some(&phi);
                let r = verify_duality_square(&ctx, &ps, &f, twist);
                let first = r.failures().next().map(|c| c.detail.clone());
                if let (None, Some(d)) = (&squares, first) {
                    squares = Some(format!("instance {i}: {d}"));
                }
            }
            let detail = format!("{samples} instances, seed {seed}");
            match trips {
                None => report.pass("round_trips", detail.clone()),
                Some(w) => report.fail("round_trips", w),
            }
            match squares {
                None => report.pass("duality_square", detail),
                Some(w) => report.fail("duality_square", w),
            }
            Ok(Outcome::report(&report))
        }
        Command::Cohomology { file, ranges, twist } => {
            let doc = load(&file)?;
            let ps = structure(&doc)?;
            let pres = &doc.presentation;
            let phi = derivation(pres, &ps, twist.as_deref())?;
            let t = cohomology_dims(pres, &ps, phi.as_ref(), ranges.p, ranges.deg)?;
            Ok(Outcome::ok(table_text(&t, ranges.lines)))
        }
        Command::Homology { file, ranges, twist } => {
            let doc = load(&file)?;
            let ps = structure(&doc)?;
            let pres = &doc.presentation;
            let phi = derivation(pres, &ps, twist.as_deref())?;
            let t = homology_dims(pres, &ps, phi.as_ref(), ranges.p, ranges.deg)?;
            Ok(Outcome::ok(table_text(&t, ranges.lines)))
        }
        Command::DualityDims { file, ranges, untwisted } => {
            let doc = load(&file)?;
            let ps = structure(&doc)?;
            let pres = &doc.presentation;
            let report = if untwisted {
                untwisted_dim_check(pres, &ps, ranges.p, ranges.deg)
            } else {
                duality_dim_check(pres, &ps, ranges.p, ranges.deg)
            };
            Ok(Outcome::report(&report))
        }
        Command::PseudoUnimodular { file, max_degree } => {
            let doc = load(&file)?;
            let ps = structure(&doc)?;
            let pres = &doc.presentation;
            Ok(Outcome::ok(match pseudo_unimodular_witness(pres, &ps, max_degree)? {
                Some(w) => format!("omega = {}\n", render_form(pres, &w)),
                None => format!("none up to degree {max_degree}\n"),
            }))
        }
        Command::Identities {
            suite,
            samples,
            seed,
            max_degree,
        } => {
            let cfg = SuiteConfig {
                samples,
                seed,
                max_degree,
            };
            let report = match suite {
                Some(name) => run_suite(&name, &cfg)?,
                None => run_all(&cfg)?,
            };
            let mut out = Outcome::report(&report);
            let failed = report.failures().count();
            let _ = writeln!(
                out.text,
                "{} checks, {failed} failed (seed {seed})",
                report.checks.len()
            );
            Ok(out)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return (code, e.render().to_string());
        }
    };
    match dispatch(cli) {
        Ok(o) => (o.code, o.text),
        Err(f) => (f.code, format!("error: {}\n", f.message)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> (i32, String) {
        run(std::iter::once("poisson-bv-calc").chain(args.iter().copied()))
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0..6"), Ok(0..=6));
        assert_eq!(parse_range("2..=3"), Ok(2..=3));
        assert_eq!(parse_range("4"), Ok(4..=4));
        assert!(parse_range("3..1").is_err());
        assert!(parse_range("a..2").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(cli(&["modular", "so3_free"]).0, EXIT_OK);
        assert_eq!(cli(&["validate", "corrupted_so3"]).0, EXIT_CHECK_FAILED);
        assert_eq!(cli(&["delta", "so3_free", "(d x)*", "--twist", "(d x)*"]).0, EXIT_CHECK_FAILED);
        assert_eq!(cli(&["homology", "sphere_so3"]).0, EXIT_CHECK_FAILED);
        assert_eq!(cli(&["delta", "so3_free", "(d q)*"]).0, EXIT_USAGE);
        assert_eq!(cli(&["identities", "--suite", "nope"]).0, EXIT_USAGE);
        assert_eq!(cli(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(cli(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn twisted_delta_subtracts_the_wedge() {
        // delta_phi(1) = [pi, 1] - phi ^ 1 = -phi
        let (code, out) = cli(&["delta", "quadratic_plane", "1", "--twist", "modular"]);
        assert_eq!((code, out.as_str()), (0, "-x*(d x)* + y*(d y)*\n"));
    }
}
