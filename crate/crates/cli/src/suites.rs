//! Named verification suites behind `verify --theorem`: each one runs a
//! deterministic seeded batch of checks and either reports every check
//! line or aborts with a serialized counterexample.
//!
//! # Key Operations
//!
//! - [`run`] dispatches a [`Request`] to the matching suite, prints the
//!   report, and maps any counterexample to a verification failure.
//!
//! # Design Notes
//!
//! Suites never trust a check they did not compute in the same process:
//! every expected value is rebuilt from the closed form, never read from
//! a table.  Randomness comes from one seeded generator per parameter
//! entry, so a failing run can be reproduced exactly from its report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use parabolic::{
    det_model, det_rat, quadratic_model, r_vars, random_symmetric, rat, ratio, sigma0, solve_u,
    tau_invariant_generators, verify_iso, CenterRing, ConcreteModel, Letter, OracleError, PVType,
    Poly, Rat, SmithContext, SmithElement, Strategy, SymPoly, TeeContext, TorusElement, VarSet,
};

use crate::Failure;

pub struct Request {
    pub json: bool,
    pub theorem: String,
    pub pv: Option<String>,
    pub trials: u32,
    pub seed: u64,
    pub n: u32,
    pub f: String,
    pub max_a: u32,
}

pub fn run(req: Request) -> Result<(), Failure> {
    let checks = match req.theorem.as_str() {
        "grading" => suite_grading(&req)?,
        "t0-commutative" => suite_t0_commutative(&req)?,
        "degree-growth" => suite_degree_growth(&req)?,
        "hc-generators" => suite_hc_generators(&req)?,
        "center" => suite_center(&req)?,
        "tau-ideals" => suite_tau_ideals(&req)?,
        "smith-pbw" => suite_smith_pbw(&req)?,
        "casimir" => suite_casimir(&req)?,
        "iso" => suite_iso(&req)?,
        "oracle" => suite_oracle(&req)?,
        other => {
            return Err(Failure::Usage(format!(
                "unknown theorem '{other}' (expected grading, t0-commutative, degree-growth, \
                 hc-generators, center, tau-ideals, smith-pbw, casimir, iso, or oracle)"
            )))
        }
    };
    if req.json {
        let report = json!({
            "theorem": req.theorem,
            "seed": req.seed,
            "trials": req.trials,
            "status": "pass",
            "checks": checks,
        });
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        for line in &checks {
            println!("pass  {line}");
        }
        println!("ok: {} verified (seed {})", req.theorem, req.seed);
    }
    Ok(())
}

/// The parameter entries a suite runs over: one explicit entry, or the
/// whole builtin catalog.
fn selection(req: &Request) -> Result<Vec<PVType>, Failure> {
    match &req.pv {
        Some(spec) => Ok(vec![PVType::from_spec_str(spec).map_err(Failure::usage)?]),
        None => Ok(PVType::catalog()),
    }
}

fn fail(req: &Request, check: &str, data: serde_json::Value) -> Failure {
    Failure::Verification(json!({
        "theorem": req.theorem,
        "check": check,
        "seed": req.seed,
        "counterexample": data,
    }))
}

/// A random product of generators with its grade, for grading checks.
fn random_graded_word<R: Rng>(tee: &TeeContext, rng: &mut R) -> (TorusElement, i64) {
    let mut el = TorusElement::scalar(tee.n(), ratio(rng.gen_range(1..=5), rng.gen_range(1..=3)));
    let mut grade = 0i64;
    for _ in 0..rng.gen_range(1..=4) {
        let (factor, g) = match rng.gen_range(0..4) {
            0 => (tee.x(), 1),
            1 => (tee.xinv(), -1),
            2 => (tee.y(), -1),
            _ => (tee.e(), 0),
        };
        el = el.skew_mul(factor).expect("same rank");
        grade += g;
    }
    (el, grade)
}

fn suite_grading(req: &Request) -> Result<Vec<String>, Failure> {
    let mut lines = Vec::new();
    for pv in selection(req)? {
        let tee = TeeContext::new(pv.clone());
        let step = rat(tee.n() as i64 + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
        for _ in 0..req.trials {
            let (w1, g1) = random_graded_word(&tee, &mut rng);
            let (w2, g2) = random_graded_word(&tee, &mut rng);
            let prod = w1.skew_mul(&w2).expect("same rank");
            if !prod.is_homogeneous_of(g1 + g2) {
                return Err(fail(
                    req,
                    "grades add under the skew product",
                    json!({ "pv": pv.label(), "left": w1.to_string(), "right": w2.to_string() }),
                ));
            }
            let el = w1.try_add(&w2).expect("same rank");
            let mut reassembled = TorusElement::zero(tee.n());
            for m in el.degrees() {
                let part = tee.grade_project(&el, m);
                let bracket = tee.e().commutator(&part).expect("same rank");
                if !part.is_homogeneous_of(m)
                    || bracket != part.scale(&(step.clone() * rat(m)))
                {
                    return Err(fail(
                        req,
                        "the Euler bracket reads (n+1) times the grade",
                        json!({ "pv": pv.label(), "grade": m, "part": part.to_string() }),
                    ));
                }
                reassembled = reassembled.try_add(&part).expect("same rank");
            }
            if reassembled != el {
                return Err(fail(
                    req,
                    "grade projections reassemble the element",
                    json!({ "pv": pv.label(), "element": el.to_string() }),
                ));
            }
        }
        lines.push(format!(
            "grades add, parts regrade, Euler bracket reads the grade: {} words [{}]",
            req.trials,
            pv.label()
        ));
    }
    Ok(lines)
}

fn suite_t0_commutative(req: &Request) -> Result<Vec<String>, Failure> {
    let mut lines = Vec::new();
    for pv in selection(req)? {
        let tee = TeeContext::new(pv.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
        for _ in 0..req.trials {
            let a = tee.random_t0_element(&mut rng, 3);
            let b = tee.random_t0_element(&mut rng, 3);
            let c = a.commutator(&b).expect("same rank");
            if !c.is_zero() {
                return Err(fail(
                    req,
                    "degree-zero operators commute",
                    json!({
                        "pv": pv.label(),
                        "a": a.to_string(),
                        "b": b.to_string(),
                        "commutator": c.to_string(),
                    }),
                ));
            }
        }
        lines.push(format!(
            "degree-zero operators commute: {} random pairs [{}]",
            req.trials,
            pv.label()
        ));
    }
    Ok(lines)
}

fn suite_degree_growth(req: &Request) -> Result<Vec<String>, Failure> {
    let mut lines = Vec::new();
    for pv in selection(req)? {
        let n = pv.n() as i64;
        if n == 0 {
            if req.pv.is_some() {
                return Err(Failure::Usage(
                    "the degree-growth law concerns entries with n >= 1".into(),
                ));
            }
            continue;
        }
        let tee = TeeContext::new(pv.clone());
        for q in 1..=5u32 {
            let b = tee.hq_sequence(q);
            let got = b
                .poly()
                .degree_in("a0")
                .expect("exponent coordinates include a0")
                .unwrap_or(0);
            let want = (q as i64 - 1) * (n - 1) + n;
            if got != want {
                return Err(fail(
                    req,
                    "tower b-function degree grows linearly",
                    json!({
                        "pv": pv.label(),
                        "q": q,
                        "expected_degree": want,
                        "measured_degree": got,
                        "b": b.poly().to_string(),
                    }),
                ));
            }
        }
        lines.push(format!(
            "a0-degree of the tower is (q-1)(n-1)+n for q = 1..5 [{}]",
            pv.label()
        ));
    }
    Ok(lines)
}

fn suite_hc_generators(req: &Request) -> Result<Vec<String>, Failure> {
    let mut lines = Vec::new();
    for pv in selection(req)? {
        let tee = TeeContext::new(pv.clone());
        let n = tee.n();
        let rv = r_vars(n);
        let offset = pv.d() * rat(n as i64) / rat(4);
        let mut images = Vec::with_capacity(n + 1);
        for ell in 0..=n as i64 {
            let img = tee.gamma_of(&tee.d_ell(ell)).expect("degree zero");
            let mut want = Poly::one_in(&rv);
            for i in 0..=n {
                let factor = Poly::var(&rv, &format!("r{i}"))
                    .try_add(&Poly::constant(&rv, offset.clone() + rat(ell)))
                    .expect("same context");
                want = want.try_mul(&factor).expect("same context");
            }
            if img.poly() != &want || !img.is_symmetric() {
                return Err(fail(
                    req,
                    "shifted generators have the closed-form spectral image",
                    json!({
                        "pv": pv.label(),
                        "ell": ell,
                        "expected": want.to_string(),
                        "got": img.poly().to_string(),
                    }),
                ));
            }
            images.push(img);
        }

        // Algebraic independence, probed by a nonsingular Jacobian at a
        // random rational point with pairwise distinct coordinates.
        let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
        let mut nonsingular = false;
        for _ in 0..8 {
            let point: Vec<Rat> = loop {
                let p: Vec<Rat> = (0..=n)
                    .map(|_| ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4)))
                    .collect();
                let distinct = p
                    .iter()
                    .enumerate()
                    .all(|(i, a)| p.iter().skip(i + 1).all(|b| a != b));
                if distinct {
                    break p;
                }
            };
            let mut jac = Vec::with_capacity(n + 1);
            for img in &images {
                let mut row = Vec::with_capacity(n + 1);
                for i in 0..=n {
                    let cell = img
                        .poly()
                        .derivative(&format!("r{i}"))
                        .expect("spectral coordinates")
                        .eval(&point)
                        .expect("full point");
                    row.push(cell);
                }
                jac.push(row);
            }
            if det_rat(jac) != rat(0) {
                nonsingular = true;
                break;
            }
        }
        if !nonsingular {
            return Err(fail(
                req,
                "generator Jacobian is nonsingular at a random point",
                json!({ "pv": pv.label() }),
            ));
        }
        lines.push(format!(
            "spectral images match the closed form and are independent [{}]",
            pv.label()
        ));
    }
    Ok(lines)
}

fn suite_center(req: &Request) -> Result<Vec<String>, Failure> {
    let mut lines = Vec::new();
    for pv in selection(req)? {
        let tee = TeeContext::new(pv.clone());
        let center = CenterRing::for_pv(&pv);
        let n = tee.n();
        let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
        for _ in 0..req.trials {
            let z = center.random_element(&mut rng, 2);
            let g = tee.from_spectral(&z);
            let cx = tee.x().commutator(&g).expect("same rank");
            let cy = tee.y().commutator(&g).expect("same rank");
            if !cx.is_zero() || !cy.is_zero() {
                return Err(fail(
                    req,
                    "shift-invariant pullbacks are central",
                    json!({ "pv": pv.label(), "poly": z.poly().to_string() }),
                ));
            }
        }
        for _ in 0..req.trials {
            let mut s = random_symmetric(n, &mut rng, 2);
            if s.is_tau_invariant() {
                let bumped = s.poly().try_add(&sigma0(n)).expect("same context");
                s = SymPoly::new(n, bumped);
            }
            let g = tee.from_spectral(&s);
            let cx = tee.x().commutator(&g).expect("same rank");
            if cx.is_zero() {
                return Err(fail(
                    req,
                    "non-invariant pullbacks fail to commute with X",
                    json!({ "pv": pv.label(), "poly": s.poly().to_string() }),
                ));
            }
        }
        lines.push(format!(
            "{} invariant pullbacks central, {} shifted ones break on X [{}]",
            req.trials,
            req.trials,
            pv.label()
        ));
    }
    Ok(lines)
}

fn suite_tau_ideals(req: &Request) -> Result<Vec<String>, Failure> {
    let mut lines = Vec::new();
    for pv in selection(req)? {
        let tee = TeeContext::new(pv.clone());
        let center = CenterRing::for_pv(&pv);
        let n = tee.n();
        let rv = r_vars(n);
        let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
        for _ in 0..req.trials {
            let g = random_symmetric(n, &mut rng, 2);
            let pairs =
                tau_invariant_generators(std::slice::from_ref(&g)).map_err(Failure::usage)?;
            let mut acc = Poly::zero_in(&rv);
            for (alpha, power) in &pairs {
                if !alpha.is_tau_invariant() {
                    return Err(fail(
                        req,
                        "extracted ideal generators are shift invariant",
                        json!({ "pv": pv.label(), "generator": alpha.poly().to_string() }),
                    ));
                }
                let term = alpha
                    .poly()
                    .try_mul(&sigma0(n).pow(*power))
                    .expect("same context");
                acc = acc.try_add(&term).expect("same context");
            }
            if &acc != g.poly() {
                return Err(fail(
                    req,
                    "generator pairs recombine to the input",
                    json!({ "pv": pv.label(), "input": g.poly().to_string() }),
                ));
            }
        }
        // Graded two-sided law: conjugation by X fixes invariant
        // pullbacks, so they slide past every X power unchanged.
        for _ in 0..req.trials {
            let z = center.random_element(&mut rng, 2);
            let g = tee.from_spectral(&z);
            if tee.tau(&g) != g {
                return Err(fail(
                    req,
                    "conjugation by X fixes invariant pullbacks",
                    json!({ "pv": pv.label(), "poly": z.poly().to_string() }),
                ));
            }
            for i in 1..=2i64 {
                let xi = tee.x_power(i);
                let left = xi.skew_mul(&g).expect("same rank");
                let right = g.skew_mul(&xi).expect("same rank");
                if left != right {
                    return Err(fail(
                        req,
                        "invariant pullbacks slide past X powers",
                        json!({ "pv": pv.label(), "poly": z.poly().to_string(), "power": i }),
                    ));
                }
            }
        }
        lines.push(format!(
            "generator extraction recombines and the graded ideal law holds: {} samples [{}]",
            req.trials,
            pv.label()
        ));
    }
    Ok(lines)
}

fn random_letters<R: Rng>(rng: &mut R, max_len: usize) -> Vec<Letter> {
    (0..rng.gen_range(1..=max_len))
        .map(|_| match rng.gen_range(0..3) {
            0 => Letter::X,
            1 => Letter::Y,
            _ => Letter::E,
        })
        .collect()
}

fn random_smith_element<R: Rng>(ctx: &SmithContext, rng: &mut R) -> SmithElement {
    let mut el = ctx.zero();
    for _ in 0..rng.gen_range(1..=3) {
        let coeff = Poly::constant(
            ctx.ring(),
            ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4)),
        );
        if coeff.is_zero() {
            continue;
        }
        let mono = ctx.monomial(
            rng.gen_range(0..=2),
            rng.gen_range(0..=2),
            rng.gen_range(0..=2),
            &coeff,
        );
        el = el.try_add(&mono).expect("same context");
    }
    el
}

fn smith_context(req: &Request) -> Result<SmithContext, Failure> {
    SmithContext::from_text(&[], req.n, &req.f).map_err(Failure::usage)
}

fn suite_smith_pbw(req: &Request) -> Result<Vec<String>, Failure> {
    let ctx = smith_context(req)?;
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    for _ in 0..req.trials {
        let w1 = random_letters(&mut rng, 5);
        let w2 = random_letters(&mut rng, 4);
        let left = ctx.normalize_word(&w1, Strategy::Leftmost);
        let right = ctx.normalize_word(&w1, Strategy::Rightmost);
        if left != right {
            return Err(fail(
                req,
                "normal forms are strategy independent",
                json!({ "word": format!("{w1:?}"), "n": req.n, "f": req.f }),
            ));
        }
        let mut cat = w1.clone();
        cat.extend_from_slice(&w2);
        let whole = ctx.normalize_word(&cat, Strategy::Leftmost);
        let pieces = ctx
            .smith_mul(&left, &ctx.normalize_word(&w2, Strategy::Leftmost))
            .expect("same context");
        if whole != pieces {
            return Err(fail(
                req,
                "normalization is compatible with multiplication",
                json!({ "left": format!("{w1:?}"), "right": format!("{w2:?}") }),
            ));
        }
    }
    Ok(vec![format!(
        "rewriting is confluent and multiplicative: {} word pairs [n = {}, f = {}]",
        req.trials, req.n, req.f
    )])
}

fn suite_casimir(req: &Request) -> Result<Vec<String>, Failure> {
    let ctx = smith_context(req)?;
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let omega = ctx.casimir();
    for _ in 0..req.trials {
        let a = random_smith_element(&ctx, &mut rng);
        let bracket = ctx.commutator(&omega, &a).expect("same context");
        if !bracket.is_zero() {
            return Err(fail(
                req,
                "the Casimir element is central",
                json!({ "n": req.n, "f": req.f, "element": a.to_string() }),
            ));
        }
    }
    if ctx.casimir_symmetrized() != omega.scale(&rat(2)) {
        return Err(fail(
            req,
            "the symmetrized Casimir is twice the Casimir",
            json!({ "n": req.n, "f": req.f }),
        ));
    }

    // Difference-equation round trips at this grading step.
    let tvars = VarSet::new(&["t"]);
    let t = Poly::var(&tvars, "t");
    let step = rat(req.n as i64 + 1);
    for _ in 0..8 {
        let mut f = Poly::zero_in(&tvars);
        for d in 0..=rng.gen_range(0..=4u32) {
            f = f
                .try_add(&t.pow(d).scale(&ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4))))
                .expect("same context");
        }
        let u = solve_u(&f, req.n);
        let diff = u
            .shift("t", &step)
            .expect("plain variable")
            .try_sub(&u)
            .expect("same context");
        if diff != f || u.coeff(&[0]) != rat(0) {
            return Err(fail(
                req,
                "the difference equation round-trips with zero constant term",
                json!({ "n": req.n, "f": f.to_string(), "u": u.to_string() }),
            ));
        }
    }
    Ok(vec![format!(
        "Casimir central on {} elements, symmetrized form doubles it, 8 difference equations solved [n = {}, f = {}]",
        req.trials, req.n, req.f
    )])
}

fn suite_iso(req: &Request) -> Result<Vec<String>, Failure> {
    let mut lines = Vec::new();
    for pv in selection(req)? {
        match verify_iso(&pv, req.trials.max(1), req.seed) {
            Ok(report) => lines.push(format!("{report} [{}]", pv.label())),
            Err(e) => {
                return Err(fail(
                    req,
                    "the quotient presentation maps isomorphically",
                    json!({ "pv": pv.label(), "failure": e.to_string() }),
                ))
            }
        }
    }
    Ok(lines)
}

fn suite_oracle(req: &Request) -> Result<Vec<String>, Failure> {
    if req.max_a < 2 {
        return Err(Failure::Usage("--max-a must be at least 2".into()));
    }
    let models: Vec<(&str, Result<ConcreteModel, OracleError>)> = vec![
        ("det:2", det_model(2)),
        ("det:3", det_model(3)),
        ("quadratic:4", quadratic_model(4)),
        ("quadratic:5", quadratic_model(5)),
        ("quadratic:6", quadratic_model(6)),
    ];
    let mut lines = Vec::new();
    for (spec, model) in models {
        let mut model = model.map_err(Failure::usage)?;
        match model.calibrate_and_check(req.max_a) {
            Ok(report) => lines.push(format!(
                "one constant c = {} explains {} cells [{spec}]",
                report.c,
                report.cells.len()
            )),
            Err(e) => {
                return Err(fail(
                    req,
                    "one calibration constant explains every cell",
                    json!({ "model": spec, "failure": e.to_string() }),
                ))
            }
        }
    }
    Ok(lines)
}
