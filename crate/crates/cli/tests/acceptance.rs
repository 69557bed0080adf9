//! One pass/fail line per acceptance criterion. Every comparison is exact.

use std::path::PathBuf;
use std::process::{Command, ExitCode};

use poisson_bv_calc::run;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn cli(args: &[&str]) -> (i32, String) {
    run(std::iter::once("poisson-bv-calc").chain(args.iter().copied()))
}

/// Runs one identity suite at `samples` instances and requires that every
/// named check appears and that nothing failed.
fn suite(name: &str, samples: usize, required: &[&str]) -> Verdict {
    let n = samples.to_string();
    let (code, out) = cli(&["identities", "--suite", name, "--samples", &n]);
    let lines: Vec<&str> = out.lines().filter(|l| l.starts_with("ok ") || l.starts_with("FAIL ")).collect();
    if let Some(bad) = lines.iter().find(|l| l.starts_with("FAIL")) {
        return verdict(false, bad.to_string());
    }
    for r in required {
        let prefix = format!("{name}/{r}");
        if !lines.iter().any(|l| l["ok".len()..].trim_start().starts_with(&prefix)) {
            return verdict(false, format!("check `{prefix}` missing"));
        }
    }
    verdict(code == 0, format!("{} checks at {samples} samples, exit {code}", lines.len()))
}

fn all(parts: Vec<Verdict>) -> Verdict {
    match parts.iter().find(|v| !v.ok) {
        Some(v) => verdict(false, v.detail.clone()),
        None => verdict(true, parts.iter().map(|v| v.detail.as_str()).collect::<Vec<_>>().join("; ")),
    }
}

fn expect_output(args: &[&str], code: i32, expected: &str) -> Verdict {
    let (c, out) = cli(args);
    if c == code && out == expected {
        verdict(true, format!("`{}` exact", args.join(" ")))
    } else {
        verdict(false, format!("`{}` gave exit {c}: {out:?}", args.join(" ")))
    }
}

fn c1() -> Verdict {
    suite(
        "exterior",
        100,
        &[
            "d_squared[so3_free]",
            "d_squared[sphere_so3]",
            "contraction_commutation",
            "contraction_of_wedge_with_exact",
            "derivation_on_top_forms",
            "hamiltonian_on_top_forms",
            "pairing_through_complements",
        ],
    )
}

fn c2() -> Verdict {
    let mut parts = vec![suite(
        "poisson",
        100,
        &[
            "valid[free_symplectic_plane]",
            "valid[quadratic_plane]",
            "valid[so3_free]",
            "valid[sphere_so3]",
            "corrupted_rejected",
        ],
    )];
    let (code, out) = cli(&["validate", "corrupted_so3.pois"]);
    let witness = out.lines().find(|l| l.starts_with("FAIL jacobi"));
    parts.push(match witness {
        Some(w) if code == 1 && !w.ends_with("witness 0") => verdict(true, format!("corrupted table: {w}")),
        _ => verdict(false, format!("corrupted table: exit {code}, {out:?}")),
    });
    all(parts)
}

fn c3() -> Verdict {
    let mut parts = vec![suite(
        "modular",
        100,
        &[
            "formula_matches_oracle",
            "value[quadratic_plane]",
            "value[sphere_so3]",
            "value[free_symplectic_plane]",
            "value[so3_free]",
            "second_part_vanishes[sphere_so3]",
        ],
    )];
    for (file, phi) in [
        ("quadratic_plane.pois", "x*(d x)* - y*(d y)*"),
        ("sphere_so3.pois", "0"),
        ("free_symplectic_plane.pois", "0"),
        ("so3_free.pois", "0"),
    ] {
        let (code, out) = cli(&["modular", file]);
        let first = out.lines().next().unwrap_or("");
        let ok = code == 0 && first == format!("phi_vol = {phi}");
        parts.push(verdict(ok, format!("{file}: {first}")));
    }
    let (_, out) = cli(&["modular", "sphere_so3.pois"]);
    parts.push(verdict(out.lines().nth(2) == Some("phi_2 = 0"), "sphere phi_2 = 0"));
    all(parts)
}

fn c4() -> Verdict {
    suite(
        "differentials",
        100,
        &[
            "delta_squared",
            "partial_squared",
            "contraction_intertwines",
            "delta_leibniz",
            "partial_anticommutes_with_d",
            "delta_direct_formula",
            "partial_direct_formula",
        ],
    )
}

fn c5() -> Verdict {
    let mut parts = vec![suite(
        "duality",
        100,
        &[
            "round_trips",
            "square_commutes[free_symplectic_plane]",
            "square_commutes[quadratic_plane]",
            "square_commutes[so3_free]",
            "square_commutes[sphere_so3]",
            "untwisted_square_fails[quadratic_plane]",
        ],
    )];
    for file in ["quadratic_plane", "sphere_so3"] {
        let (code, out) = cli(&["duality-check", file, "--samples", "100"]);
        parts.push(verdict(code == 0, format!("duality-check {file} exit {code}")));
        if code != 0 {
            parts.push(verdict(false, out));
        }
    }
    all(parts)
}

fn c6() -> Verdict {
    let mut parts = vec![suite(
        "bv",
        100,
        &[
            "routes_agree",
            "square_zero",
            "generates_schouten",
            "delta_pi_is_modular",
            "homotopy_formula",
            "monomial_closed_form",
            "contraction_of_wedge",
            "contraction_of_bracket",
            "delta_and_contraction",
        ],
    )];
    parts.push(expect_output(
        &["bv", "quadratic_plane", "x^2*y*(d x)* ^ (d y)*"],
        0,
        "duality route: x^2*(d x)* - 2*x*y*(d y)*\nexplicit formula: x^2*(d x)* - 2*x*y*(d y)*\nroutes agree\n",
    ));
    all(parts)
}

fn c7() -> Verdict {
    let mut parts = vec![suite(
        "twisted",
        100,
        &[
            "d_t_squared",
            "partial_t_is_commutator",
            "partial_t_anticommutes_with_d_t",
            "delta_t_squared",
            "delta_t_generates_schouten",
            "non_closed_rejected",
            "pseudo_unimodular",
        ],
    )];
    for file in ["free_symplectic_plane", "so3_free", "sphere_so3"] {
        parts.push(expect_output(&["pseudo-unimodular", file, "--max-degree", "6"], 0, "omega = 0\n"));
    }
    parts.push(expect_output(
        &["pseudo-unimodular", "quadratic_plane", "--max-degree", "6"],
        0,
        "none up to degree 6\n",
    ));
    let (code, out) = cli(&["bv-twisted", "quadratic_plane", "x*(d x)*", "--omega", "y*d x"]);
    parts.push(verdict(
        code == 1 && out.contains("not closed"),
        format!("non-closed omega: exit {code}"),
    ));
    all(parts)
}

fn c8() -> Verdict {
    let mut parts = vec![suite(
        "homology",
        100,
        &[
            "symplectic_cohomology",
            "duality_dims[free_symplectic_plane]",
            "duality_dims[quadratic_plane]",
            "untwisted_dims_mismatch",
        ],
    )];
    let (code, out) = cli(&["cohomology", "free_symplectic_plane", "--p", "0..2", "--deg", "0..6", "--lines"]);
    let mut bad = None;
    for l in out.lines() {
        let v: Vec<usize> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
        let expected = usize::from(v[0] == 0 && v[1] == 0);
        if v[4] != expected {
            bad = Some(l.to_string());
        }
    }
    parts.push(verdict(
        code == 0 && out.lines().count() == 21 && bad.is_none(),
        match &bad {
            None => "symplectic PH^0 = 1 at degree 0, zero on the other 20 strands".to_string(),
            Some(l) => format!("symplectic strand `{l}`"),
        },
    ));
    for file in ["free_symplectic_plane", "quadratic_plane"] {
        let (code, _) = cli(&["duality-dims", file, "--p", "0..2", "--deg", "0..6"]);
        parts.push(verdict(code == 0, format!("duality-dims {file} exit {code}")));
    }
    let (code, out) = cli(&["duality-dims", "quadratic_plane", "--p", "0..2", "--deg", "0..6", "--untwisted"]);
    let mismatches = out.lines().filter(|l| l.starts_with("FAIL")).count();
    parts.push(verdict(code == 1 && mismatches > 0, format!("untwisted: {mismatches} mismatching strands")));
    all(parts)
}

fn binary(args: &[&str]) -> (i32, String) {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let out = Command::new(env!("CARGO_BIN_EXE_poisson-bv-calc"))
        .args(args)
        .current_dir(root)
        .output()
        .expect("spawn poisson-bv-calc");
    let mut text = String::from_utf8(out.stdout).expect("utf-8 stdout");
    text.push_str(&String::from_utf8(out.stderr).expect("utf-8 stderr"));
    (out.status.code().unwrap_or(-1), text)
}

const VALIDATE_SPHERE: &str = "\
ok   trace (trace = 2)
ok   idempotency
ok   relation_gradients
ok   volume_normalization (sum a_I b_I = 1)
ok   volume_consistency
ok   top_vanishing
ok   jacobi
ok   relation_compatibility
ok   table_consistency
ok   schouten_pi_pi
";

fn c9() -> Verdict {
    let transcripts: [(&[&str], &str); 3] = [
        (
            &["modular", "examples/quadratic_plane.pois"],
            "phi_vol = x*(d x)* - y*(d y)*\nphi_1 = x*(d x)* - y*(d y)*\nphi_2 = 0\n",
        ),
        (&["validate", "examples/sphere_so3.pois"], VALIDATE_SPHERE),
        (
            &["pseudo-unimodular", "examples/quadratic_plane.pois", "--max-degree", "6"],
            "none up to degree 6\n",
        ),
    ];
    let mut parts = Vec::new();
    for (args, expected) in transcripts {
        let first = binary(args);
        let again = binary(args);
        let ok = first.0 == 0 && first.1 == expected && again == first;
        let detail = if ok {
            format!("`{}` byte-identical", args.join(" "))
        } else {
            format!("`{}` exit {}: {:?}", args.join(" "), first.0, first.1)
        };
        parts.push(verdict(ok, detail));
    }
    let path = std::env::temp_dir().join(format!("undeclared-{}.pois", std::process::id()));
    std::fs::write(&path, "[ring]\ngenerators = x, y\n\n[poisson]\n{x, y} = w\n").unwrap();
    let p = path.to_string_lossy().into_owned();
    let (code, out) = binary(&["validate", &p]);
    let _ = std::fs::remove_file(&path);
    parts.push(verdict(
        code == 2 && out.contains(":5:10: undeclared generator `w`"),
        format!("undeclared generator: exit {code}"),
    ));
    parts.push(suite(
        "roundtrip",
        200,
        &["render_parse[quadratic_plane]", "render_parse[so3_free]", "render_parse[sphere_so3]"],
    ));
    all(parts)
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("exterior-calculus suite", c1),
        ("Poisson validation", c2),
        ("modular derivation cross-check", c3),
        ("differential suite", c4),
        ("duality", c5),
        ("BV suite", c6),
        ("twisted suite and pseudo-unimodularity", c7),
        ("homology dimensions", c8),
        ("CLI transcripts and round trip", c9),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let v = check();
        let tag = if v.ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {}: {title} ({})", i + 1, v.detail);
        failed += usize::from(!v.ok);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
