//! Randomized laws of the finite-presentation algebra on x, y, e and of
//! its quotient where xy becomes a polynomial in e: strategy-independent
//! normal forms, PBW freeness at small degree, the sliding identities,
//! the weight grading, centrality of the Casimir, and multiplicativity
//! of the quotient projection.

use parabolic::{
    rat, ratio, solve_u, ExactPoly, Letter, Poly, Rat, SmithContext, SmithElement, Strategy,
    UContext, VarSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn contexts() -> Vec<SmithContext> {
    vec![
        SmithContext::from_text(&[], 0, "t").unwrap(),
        SmithContext::from_text(&["c"], 1, "t^2 + c").unwrap(),
        SmithContext::from_text(&["c"], 2, "t^3 - c*t + 1").unwrap(),
    ]
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<Letter> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| match rng.gen_range(0..3u8) {
            0 => Letter::X,
            1 => Letter::Y,
            _ => Letter::E,
        })
        .collect()
}

fn random_rat(rng: &mut ChaCha8Rng) -> Rat {
    ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4))
}

/// Random ring polynomial: a constant plus degree-one terms in each
/// ring variable, coefficients small rationals.
fn random_ring_poly(ring: &std::sync::Arc<VarSet>, rng: &mut ChaCha8Rng) -> ExactPoly {
    let mut p = Poly::constant(ring, random_rat(rng));
    for name in ring.names() {
        let v = Poly::var(ring, name).scale(&random_rat(rng));
        p = p.try_add(&v).unwrap();
    }
    p
}

/// Random element: one to three PBW monomials with powers at most two.
fn random_element(ctx: &SmithContext, rng: &mut ChaCha8Rng) -> SmithElement {
    let mut out = ctx.zero();
    for _ in 0..rng.gen_range(1..=3) {
        let j = rng.gen_range(0..=2);
        let i = rng.gen_range(0..=2);
        let k = rng.gen_range(0..=2);
        let coeff = random_ring_poly(ctx.ring(), rng);
        out = out.try_add(&ctx.monomial(j, i, k, &coeff)).unwrap();
    }
    out
}

/// Random polynomial in the distinguished last variable with ring
/// coefficients, degree at most `max_deg`.
fn random_epoly(ctx: &SmithContext, rng: &mut ChaCha8Rng, max_deg: u32) -> ExactPoly {
    let evars = ctx.poly_vars();
    let mut p = Poly::zero_in(evars);
    for d in 0..=max_deg {
        let c = random_rat(rng);
        if c == rat(0) {
            continue;
        }
        let mut exps = vec![0i32; evars.len()];
        *exps.last_mut().unwrap() = d as i32;
        if evars.len() > 1 && rng.gen_bool(0.5) {
            exps[0] = 1;
        }
        p = p.try_add(&Poly::monomial(evars, &exps, c)).unwrap();
    }
    p
}

#[test]
fn normal_forms_are_strategy_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(211);
    for ctx in contexts() {
        for _ in 0..40 {
            let w1 = random_word(&mut rng, 5);
            let w2 = random_word(&mut rng, 5);
            let mut joined = w1.clone();
            joined.extend_from_slice(&w2);
            let left = ctx.normalize_word(&joined, Strategy::Leftmost);
            let right = ctx.normalize_word(&joined, Strategy::Rightmost);
            assert_eq!(left, right, "strategies disagree on {joined:?}");
            let product = ctx
                .smith_mul(
                    &ctx.normalize_word(&w1, Strategy::Leftmost),
                    &ctx.normalize_word(&w2, Strategy::Rightmost),
                )
                .unwrap();
            assert_eq!(left, product, "normal form is not multiplicative");
        }
    }
}

/// Rank of a rational matrix by Gaussian elimination.
fn rank_rat(mut m: Vec<Vec<Rat>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut col = 0;
    while rank < rows && col < cols {
        let Some(pivot) = (rank..rows).find(|&r| m[r][col] != rat(0)) else {
            col += 1;
            continue;
        };
        m.swap(rank, pivot);
        let lead = m[rank][col].clone();
        for c in col..cols {
            m[rank][c] = m[rank][c].clone() / lead.clone();
        }
        for r in 0..rows {
            if r != rank && m[r][col] != rat(0) {
                let factor = m[r][col].clone();
                for c in col..cols {
                    m[r][c] = m[r][c].clone() - factor.clone() * m[rank][c].clone();
                }
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

#[test]
fn small_monomials_normalize_to_a_free_family() {
    let ctx = SmithContext::from_text(&["c"], 1, "t^2 + c").unwrap();
    // Normal forms of y^i x^j e^k for i, j, k up to two.
    let mut forms = Vec::new();
    for i in 0..=2u32 {
        for j in 0..=2u32 {
            for k in 0..=2u32 {
                let mut word = Vec::new();
                word.extend(std::iter::repeat(Letter::Y).take(i as usize));
                word.extend(std::iter::repeat(Letter::X).take(j as usize));
                word.extend(std::iter::repeat(Letter::E).take(k as usize));
                forms.push(ctx.normalize_word(&word, Strategy::Leftmost));
            }
        }
    }
    assert_eq!(forms.len(), 27);

    // Collect every PBW key that appears, then evaluate coefficients at a
    // generic rational point of the ring; full rank there implies the
    // normal forms are independent over the ring.
    let mut keys: Vec<(u32, u32, u32)> = Vec::new();
    for form in &forms {
        for (key, _) in form.terms() {
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
    }
    let point = [ratio(5, 7)];
    let matrix: Vec<Vec<Rat>> = forms
        .iter()
        .map(|form| {
            keys.iter()
                .map(|&(j, i, k)| form.coefficient(j, i, k).eval(&point).unwrap())
                .collect()
        })
        .collect();
    assert_eq!(rank_rat(matrix), 27);

    // A random nonzero combination therefore cannot vanish.
    let mut rng = ChaCha8Rng::seed_from_u64(223);
    let mut combo = ctx.zero();
    for form in &forms {
        let c = ratio(rng.gen_range(1..=9), rng.gen_range(1..=4));
        combo = combo.try_add(&form.scale(&c)).unwrap();
    }
    assert!(!combo.is_zero());
}

#[test]
fn e_polynomials_slide_past_x_and_y() {
    let mut rng = ChaCha8Rng::seed_from_u64(227);
    for ctx in contexts() {
        let step = rat(ctx.n() as i64 + 1);
        for _ in 0..10 {
            let p = random_epoly(&ctx, &mut rng, 5);
            let shifted = p.shift("t", &step).unwrap();
            // P(e) x = x P(e+n+1).
            let lhs = ctx.smith_mul(&ctx.from_e_poly(&p), &ctx.x()).unwrap();
            let rhs = ctx.smith_mul(&ctx.x(), &ctx.from_e_poly(&shifted)).unwrap();
            assert_eq!(lhs, rhs);
            // P(e+n+1) y = y P(e).
            let lhs = ctx.smith_mul(&ctx.from_e_poly(&shifted), &ctx.y()).unwrap();
            let rhs = ctx.smith_mul(&ctx.y(), &ctx.from_e_poly(&p)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn weight_components_multiply_additively() {
    let mut rng = ChaCha8Rng::seed_from_u64(229);
    for ctx in contexts() {
        for _ in 0..15 {
            let a = random_element(&ctx, &mut rng);
            let b = random_element(&ctx, &mut rng);
            let product = ctx.smith_mul(&a, &b).unwrap();
            let mut expected: std::collections::BTreeMap<i64, SmithElement> =
                std::collections::BTreeMap::new();
            for (u, au) in a.weight() {
                for (v, bv) in b.weight() {
                    let part = ctx.smith_mul(&au, &bv).unwrap();
                    expected
                        .entry(u + v)
                        .and_modify(|acc| *acc = acc.try_add(&part).unwrap())
                        .or_insert(part);
                }
            }
            expected.retain(|_, v| !v.is_zero());
            assert_eq!(product.weight(), expected);
        }
    }
}

#[test]
fn casimir_is_central_for_random_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(233);
    for ctx in contexts() {
        let omega = ctx.casimir();
        for _ in 0..50 {
            let a = random_element(&ctx, &mut rng);
            let bracket = ctx.commutator(&a, &omega).unwrap();
            assert!(bracket.is_zero(), "Casimir failed to commute with {a}");
        }
    }
}

#[test]
fn difference_equation_round_trips_for_random_f() {
    let mut rng = ChaCha8Rng::seed_from_u64(239);
    let vars = VarSet::new(&["c", "t"]);
    for _ in 0..20 {
        let mut f = Poly::zero_in(&vars);
        for d in 0..=4 {
            let c = random_rat(&mut rng);
            let cexp = i32::from(rng.gen_bool(0.5));
            f = f
                .try_add(&Poly::monomial(&vars, &[cexp, d], c))
                .unwrap();
        }
        for n in [0u32, 1, 2] {
            let u = solve_u(&f, n);
            let step = rat(n as i64 + 1);
            let delta = u.shift("t", &step).unwrap().try_sub(&u).unwrap();
            assert_eq!(delta, f);
            assert_eq!(u.coeff(&[0, 0]), rat(0), "constant term not normalized");
            assert_eq!(u.coeff(&[1, 0]), rat(0), "constant term not normalized");
        }
    }
}

#[test]
fn quotient_projection_is_multiplicative_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(241);
    for ctx in contexts() {
        let q = UContext::from_smith(&ctx);
        for _ in 0..10 {
            let a = random_element(&ctx, &mut rng);
            let b = random_element(&ctx, &mut rng);
            let lhs = q.project(&ctx, &ctx.smith_mul(&a, &b).unwrap()).unwrap();
            let rhs = q
                .u_mul(&q.project(&ctx, &a).unwrap(), &q.project(&ctx, &b).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn quotient_products_are_associative_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(251);
    for ctx in contexts() {
        let q = UContext::from_smith(&ctx);
        for _ in 0..10 {
            let a = q.project(&ctx, &random_element(&ctx, &mut rng)).unwrap();
            let b = q.project(&ctx, &random_element(&ctx, &mut rng)).unwrap();
            let c = q.project(&ctx, &random_element(&ctx, &mut rng)).unwrap();
            let left = q.u_mul(&q.u_mul(&a, &b).unwrap(), &c).unwrap();
            let right = q.u_mul(&a, &q.u_mul(&b, &c).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }
}
