//! Command-line interface to the operator-algebra workbench: ad-hoc
//! computations (b-functions, radial restrictions, spectral images,
//! normal forms, calibration tables) and named verification suites.
//!
//! # Key Operations
//!
//! - `catalog` lists the builtin parameter entries.
//! - `bfunction`, `radial`, `hc` evaluate a word in the generators and
//!   print the requested transform of it.
//! - `center-test` checks one spectral polynomial against the center
//!   criterion from both sides.
//! - `smith-nf` normalizes a word in the abstract three-generator
//!   algebra, optionally in its quotient.
//! - `oracle` prints a concrete calibration table.
//! - `verify` runs a named theorem suite and exits nonzero on failure.
//!
//! # Design Notes
//!
//! Batch only, no interactive loop.  Randomized suites draw from a
//! seeded generator recorded in the report, so every counterexample is
//! reproducible from the command line that found it.  Exit codes: 0 for
//! pass, 1 for a verification failure (with the counterexample
//! serialized to stdout), 2 for usage errors.

mod suites;

use clap::{Parser, Subcommand};
use serde_json::json;

use parabolic::{
    det_model, gamma, quadratic_model, r_to_a, ConcreteModel, OracleError, PVType, SmithContext,
    SymPoly, TeeContext, UContext,
};

/// A failed run: either the invocation was malformed or a verification
/// suite found a counterexample.
pub enum Failure {
    Usage(String),
    Verification(serde_json::Value),
}

impl Failure {
    fn usage(e: impl std::fmt::Display) -> Failure {
        Failure::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "parabolic", version, about = "Exact operator-algebra workbench")]
struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the builtin parameter catalog.
    Catalog,
    /// Print the b-function of a word in the generators X, Xinv, Y, E.
    Bfunction {
        /// Parameter entry, e.g. A:3, C:2, quadratic:5, custom:2:9.
        #[arg(long)]
        pv: String,
        /// Word over the generators, e.g. "[Y,X]" or "X*Y - E".
        #[arg(long, default_value = "Y")]
        word: String,
    },
    /// Print the radial restriction of a word: the one-variable operator
    /// on functions of the fundamental invariant.
    Radial {
        #[arg(long)]
        pv: String,
        #[arg(long, default_value = "Y")]
        word: String,
    },
    /// Print the spectral image of a degree-zero word.
    Hc {
        #[arg(long)]
        pv: String,
        #[arg(long, default_value = "Y*X")]
        word: String,
        /// Coordinate system for the output: spectral r or exponent a.
        #[arg(long, value_parser = ["r", "a"], default_value = "r")]
        vars: String,
    },
    /// Test a spectral polynomial against the center criterion: shift
    /// invariance on one side, commutation with X and Y on the other.
    CenterTest {
        #[arg(long)]
        pv: String,
        /// Symmetric polynomial in r0..rn, e.g. "r0*r1 - r0 - r1".
        #[arg(long)]
        poly: String,
    },
    /// Normalize a word in the three-generator algebra over the
    /// rationals, optionally projecting to the quotient.
    SmithNf {
        /// Grading step parameter.
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Commutation datum f as a polynomial in t.
        #[arg(long, default_value = "t")]
        f: String,
        /// Also print the canonical form in the quotient algebra.
        #[arg(long)]
        quotient: bool,
        /// Word over x, y, e with rational literals, e.g. "y*x*x - 2*e".
        word: String,
    },
    /// Calibrate a concrete model and print the measured cells.
    Oracle {
        /// Concrete model: det:2, det:3, or quadratic:K.
        #[arg(long)]
        model: String,
        /// Sweep all exponent vectors with coordinate sum up to this.
        #[arg(long, default_value_t = 4)]
        max_a: u32,
    },
    /// Run a named verification suite.
    Verify {
        /// One of: grading, t0-commutative, degree-growth, hc-generators,
        /// center, tau-ideals, smith-pbw, casimir, iso, oracle.
        #[arg(long)]
        theorem: String,
        /// Restrict to one parameter entry (default: whole catalog).
        #[arg(long)]
        pv: Option<String>,
        /// Random cases per check.
        #[arg(long, default_value_t = 25)]
        trials: u32,
        /// Seed for the deterministic generator.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Grading step for the abstract-algebra suites.
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Commutation datum for the abstract-algebra suites.
        #[arg(long, default_value = "t")]
        f: Option<String>,
        /// Cell bound for the oracle suite.
        #[arg(long, default_value_t = 4)]
        max_a: u32,
    },
}

fn main() {
    // Die quietly when a downstream pipe closes early.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let json = cli.json;
    match dispatch(cli) {
        Ok(()) => {}
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(Failure::Verification(report)) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                println!("FAIL {}", render_failure(&report));
            }
            std::process::exit(1);
        }
    }
}

fn render_failure(report: &serde_json::Value) -> String {
    let what = report
        .get("check")
        .and_then(|v| v.as_str())
        .unwrap_or("verification failure");
    format!(
        "{what}\ncounterexample: {}",
        serde_json::to_string(report).unwrap()
    )
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let json = cli.json;
    match cli.command {
        Command::Catalog => cmd_catalog(json),
        Command::Bfunction { pv, word } => cmd_bfunction(json, &pv, &word),
        Command::Radial { pv, word } => cmd_radial(json, &pv, &word),
        Command::Hc { pv, word, vars } => cmd_hc(json, &pv, &word, &vars),
        Command::CenterTest { pv, poly } => cmd_center_test(json, &pv, &poly),
        Command::SmithNf {
            n,
            f,
            quotient,
            word,
        } => cmd_smith_nf(json, n, &f, quotient, &word),
        Command::Oracle { model, max_a } => cmd_oracle(json, &model, max_a),
        Command::Verify {
            theorem,
            pv,
            trials,
            seed,
            n,
            f,
            max_a,
        } => suites::run(suites::Request {
            json,
            theorem,
            pv,
            trials,
            seed,
            n,
            f: f.unwrap_or_else(|| "t".into()),
            max_a,
        }),
    }
}

fn parse_pv(spec: &str) -> Result<PVType, Failure> {
    PVType::from_spec_str(spec).map_err(Failure::usage)
}

fn cmd_catalog(json: bool) -> Result<(), Failure> {
    let entries = PVType::catalog();
    if json {
        let rows: Vec<serde_json::Value> = entries.iter().map(PVType::to_json).collect();
        println!("{}", serde_json::to_string_pretty(&rows).unwrap());
        return Ok(());
    }
    println!("{:<14}{:>4}{:>6}{:>8}", "label", "n", "k", "d");
    for pv in &entries {
        println!("{:<14}{:>4}{:>6}{:>8}", pv.label(), pv.n(), pv.k(), pv.d());
    }
    Ok(())
}

fn cmd_bfunction(json: bool, pv: &str, word: &str) -> Result<(), Failure> {
    let pv = parse_pv(pv)?;
    let tee = TeeContext::new(pv.clone());
    let u = tee.evaluate_word(word).map_err(Failure::usage)?;
    let b = tee.bfunction(&u).map_err(Failure::usage)?;
    // The spectral form only exists at grade 0; graded words keep b(a).
    let spectral = if b.degree() == 0 {
        Some(gamma(&b, tee.rho()).map_err(Failure::usage)?)
    } else {
        None
    };
    if json {
        let mut report = json!({
            "pv": pv.label(),
            "word": word,
            "grade": b.degree(),
            "b_a": b.poly().to_string(),
        });
        if let Some(s) = &spectral {
            report["b_r"] = json!(s.poly().to_string());
        }
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
        return Ok(());
    }
    println!("pv:    {}", pv.label());
    println!("word:  {word}");
    println!("grade: {}", b.degree());
    println!("b(a) = {}", b.poly());
    if let Some(s) = &spectral {
        println!("b(r) = {}", s.poly());
    }
    Ok(())
}

fn cmd_radial(json: bool, pv: &str, word: &str) -> Result<(), Failure> {
    let pv = parse_pv(pv)?;
    let tee = TeeContext::new(pv.clone());
    let u = tee.evaluate_word(word).map_err(Failure::usage)?;
    let radial = u.radial_restriction();
    if json {
        let report = json!({
            "pv": pv.label(),
            "word": word,
            "radial": radial.to_string(),
        });
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
        return Ok(());
    }
    println!("pv:     {}", pv.label());
    println!("word:   {word}");
    println!("radial: {radial}");
    Ok(())
}

fn cmd_hc(json: bool, pv: &str, word: &str, vars: &str) -> Result<(), Failure> {
    let pv = parse_pv(pv)?;
    let tee = TeeContext::new(pv.clone());
    let u = tee.evaluate_word(word).map_err(Failure::usage)?;
    let image = tee.gamma_of(&u).map_err(Failure::usage)?;
    let rendered = match vars {
        "a" => r_to_a(&image).to_string(),
        _ => image.poly().to_string(),
    };
    if json {
        let report = json!({
            "pv": pv.label(),
            "word": word,
            "vars": vars,
            "image": rendered,
        });
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
        return Ok(());
    }
    println!("pv:    {}", pv.label());
    println!("word:  {word}");
    println!("image({vars}) = {rendered}");
    Ok(())
}

fn cmd_center_test(json: bool, pv: &str, poly: &str) -> Result<(), Failure> {
    let pv = parse_pv(pv)?;
    let tee = TeeContext::new(pv.clone());
    let s = SymPoly::parse(tee.n(), poly).map_err(Failure::usage)?;
    if !s.is_symmetric() {
        return Err(Failure::Usage(format!(
            "{poly} is not symmetric, so it has no degree-zero pullback"
        )));
    }
    let invariant = s.is_tau_invariant();
    let g = tee.from_spectral(&s);
    let commutes_x = tee.x().commutator(&g).map_err(Failure::usage)?.is_zero();
    let commutes_y = tee.y().commutator(&g).map_err(Failure::usage)?.is_zero();
    let central = commutes_x && commutes_y;
    if invariant != central {
        return Err(Failure::Verification(json!({
            "check": "shift invariance must coincide with centrality",
            "pv": pv.label(),
            "poly": poly,
            "tau_invariant": invariant,
            "commutes_with_X": commutes_x,
            "commutes_with_Y": commutes_y,
        })));
    }
    if json {
        let report = json!({
            "pv": pv.label(),
            "poly": poly,
            "tau_invariant": invariant,
            "central": central,
        });
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
        return Ok(());
    }
    println!("pv:   {}", pv.label());
    println!("poly: {poly}");
    println!(
        "tau-invariant: {invariant}; commutes with X: {commutes_x}; with Y: {commutes_y}"
    );
    println!(
        "verdict: {}",
        if central { "central" } else { "not central" }
    );
    Ok(())
}

fn cmd_smith_nf(json: bool, n: u32, f: &str, quotient: bool, word: &str) -> Result<(), Failure> {
    let ctx = SmithContext::from_text(&[], n, f).map_err(Failure::usage)?;
    let el = ctx.parse_word(word).map_err(Failure::usage)?;
    let projected = if quotient {
        let uctx = UContext::from_smith(&ctx);
        Some(uctx.project(&ctx, &el).map_err(Failure::usage)?)
    } else {
        None
    };
    if json {
        let mut report = json!({
            "n": n,
            "f": f,
            "word": word,
            "normal_form": el.to_string(),
        });
        if let Some(q) = &projected {
            report["quotient_form"] = json!(q.to_string());
        }
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
        return Ok(());
    }
    println!("normal form: {el}");
    if let Some(q) = projected {
        println!("quotient:    {q}");
    }
    Ok(())
}

/// Parse "det:M" or "quadratic:K" into a concrete model.
fn parse_model(spec: &str) -> Result<ConcreteModel, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let model = match parts.as_slice() {
        ["det", m] => {
            let m: usize = m.parse().map_err(Failure::usage)?;
            det_model(m)
        }
        ["quadratic" | "q", k] => {
            let k: usize = k.parse().map_err(Failure::usage)?;
            quadratic_model(k)
        }
        _ => {
            return Err(Failure::Usage(format!(
                "unknown model '{spec}' (expected det:M or quadratic:K)"
            )))
        }
    };
    model.map_err(Failure::usage)
}

fn cmd_oracle(json: bool, model: &str, max_a: u32) -> Result<(), Failure> {
    if max_a < 2 {
        return Err(Failure::Usage("--max-a must be at least 2".into()));
    }
    let mut concrete = parse_model(model)?;
    let label = concrete.pv().label().to_string();
    let report = match concrete.calibrate_and_check(max_a) {
        Ok(report) => report,
        Err(e @ (OracleError::CalibrationMismatch { .. } | OracleError::NotProportional { .. })) => {
            return Err(Failure::Verification(json!({
                "check": "one calibration constant explains every cell",
                "model": model,
                "pv": label,
                "counterexample": e.to_string(),
            })));
        }
        Err(e) => return Err(Failure::usage(e)),
    };
    if json {
        let cells: Vec<serde_json::Value> = report
            .cells
            .iter()
            .map(|(a, b)| json!({ "a": a, "b": b.to_string() }))
            .collect();
        let out = json!({
            "model": model,
            "pv": label,
            "c": report.c.to_string(),
            "cells": cells,
        });
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
        return Ok(());
    }
    println!("model: {model} (pv {label})");
    println!("calibration c = {}", report.c);
    println!("{:<14}{}", "a", "measured b");
    for (a, b) in &report.cells {
        let coords: Vec<String> = a.iter().map(u32::to_string).collect();
        println!("{:<14}{}", format!("({})", coords.join(",")), b);
    }
    Ok(())
}
