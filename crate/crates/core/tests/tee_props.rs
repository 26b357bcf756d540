//! Algebra-level properties of the generator calculus: commutativity of
//! the degree-0 subalgebra, the Euler grading, twist commutation, the
//! b-function bookkeeping of products, centrality consequences, and the
//! degree growth of the commutator tower.

use parabolic::pv_catalog::Family;
use parabolic::sym_harish::{diagonal_extension, random_symmetric};
use parabolic::{rat, PVType, TeeContext, TorusElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Representative catalog entries with n = 0..3 and varied multiplicity.
fn contexts() -> Vec<TeeContext> {
    [
        PVType::builtin(Family::A, 1).unwrap(),  // n = 0
        PVType::builtin(Family::A, 2).unwrap(),  // n = 1, d = 2
        PVType::quadratic(5).unwrap(),           // n = 1, d = 3
        PVType::builtin(Family::C, 3).unwrap(),  // n = 2, d = 1
        PVType::builtin(Family::E7, 7).unwrap(), // n = 2, d = 8
        PVType::builtin(Family::A, 4).unwrap(),  // n = 3, d = 2
    ]
    .into_iter()
    .map(TeeContext::new)
    .collect()
}

#[test]
fn degree_zero_subalgebra_commutes() {
    for ctx in contexts() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = ctx.random_t0_element(&mut rng, 2);
            let b = ctx.random_t0_element(&mut rng, 2);
            assert!(
                a.commutator(&b).unwrap().is_zero(),
                "degree-0 elements must commute on {}",
                ctx.pv().label()
            );
        }
    }
}

#[test]
fn euler_commutator_reads_the_grade() {
    for ctx in contexts() {
        let n_plus_1 = rat(ctx.n() as i64 + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for p in -2..=2i64 {
            // Homogeneous degree-p element: random degree-0 body times X^p.
            let body = ctx.random_t0_element(&mut rng, 2);
            let u = body.skew_mul(&ctx.x_power(p)).unwrap();
            let expected = u.scale(&(n_plus_1.clone() * rat(p)));
            assert_eq!(
                ctx.e().commutator(&u).unwrap(),
                expected,
                "grade {p} on {}",
                ctx.pv().label()
            );
        }
    }
}

#[test]
fn twist_commutation_with_x_and_y() {
    for ctx in contexts() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..10 {
            let r = ctx.random_t0_element(&mut rng, 2);
            let tau_r = ctx.tau(&r);
            assert_eq!(
                ctx.x().skew_mul(&r).unwrap(),
                tau_r.skew_mul(ctx.x()).unwrap(),
                "X R = tau(R) X on {}",
                ctx.pv().label()
            );
            assert_eq!(
                r.skew_mul(ctx.y()).unwrap(),
                ctx.y().skew_mul(&tau_r).unwrap(),
                "R Y = Y tau(R) on {}",
                ctx.pv().label()
            );
        }
    }
}

#[test]
fn product_bfunctions_shift_by_degree() {
    for ctx in contexts() {
        let b_y = ctx.bfunction(ctx.y()).unwrap();
        let xy = ctx.bfunction(&ctx.evaluate_word("XY").unwrap()).unwrap();
        let yx = ctx.bfunction(&ctx.evaluate_word("YX").unwrap()).unwrap();
        assert_eq!(xy.degree(), 0);
        assert_eq!(xy.poly(), b_y.poly(), "b_XY = b_Y on {}", ctx.pv().label());
        assert_eq!(
            yx.poly(),
            &b_y.poly().shift("a0", &rat(1)).unwrap(),
            "b_YX = b_Y(a0+1) on {}",
            ctx.pv().label()
        );
    }
}

#[test]
fn quadratic_bracket_matches_euler_plus_half_k() {
    for k in [4, 5, 6, 7] {
        let ctx = TeeContext::new(PVType::quadratic(k).unwrap());
        let bracket = ctx.evaluate_word("[Y,X]").unwrap();
        let expected = ctx
            .e()
            .try_add(&TorusElement::scalar(1, parabolic::ratio(k as i64, 2)))
            .unwrap();
        assert_eq!(bracket, expected, "quadratic k = {k}");
    }
}

#[test]
fn tower_degree_growth() {
    // a0-degree of the q-th tower b-function is (q-1)(n-1) + n.
    let entries = [
        PVType::builtin(Family::A, 2).unwrap(),
        PVType::quadratic(6).unwrap(),
        PVType::builtin(Family::A, 3).unwrap(),
        PVType::builtin(Family::C, 3).unwrap(),
        PVType::builtin(Family::A, 4).unwrap(),
        PVType::builtin(Family::C, 4).unwrap(),
    ];
    for pv in entries {
        let ctx = TeeContext::new(pv);
        let n = ctx.n() as i64;
        for q in 1..=5u32 {
            let b = ctx.hq_sequence(q);
            let expected = (q as i64 - 1) * (n - 1) + n;
            assert_eq!(
                b.poly().degree_in("a0").unwrap(),
                Some(expected),
                "q = {q} on {}",
                ctx.pv().label()
            );
        }
    }
}

#[test]
fn central_elements_commute_with_everything() {
    for ctx in contexts() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..10 {
            // tau-invariant spectral data pulled back to the operator side.
            let z_spec = diagonal_extension(&random_symmetric(ctx.n(), &mut rng, 2));
            let z = ctx.from_spectral(&z_spec);
            assert!(ctx.is_central(&z), "pullback fails on {}", ctx.pv().label());
            assert!(z.commutator(ctx.x()).unwrap().is_zero());
            assert!(z.commutator(ctx.y()).unwrap().is_zero());
            assert!(z.commutator(ctx.e()).unwrap().is_zero());
        }
    }
}

#[test]
fn twist_invariant_elements_slide_past_x_powers() {
    for ctx in contexts() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..5 {
            let g_spec = diagonal_extension(&random_symmetric(ctx.n(), &mut rng, 2));
            let g = ctx.from_spectral(&g_spec);
            assert_eq!(ctx.tau(&g), g);
            for i in [-2i64, -1, 1, 2, 3] {
                let xi = ctx.x_power(i);
                assert_eq!(
                    xi.skew_mul(&g).unwrap(),
                    g.skew_mul(&xi).unwrap(),
                    "X^{i} g = g X^{i} on {}",
                    ctx.pv().label()
                );
            }
        }
    }
}

#[test]
fn decomposition_round_trips_on_random_elements() {
    for ctx in contexts().into_iter().take(4) {
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        for _ in 0..10 {
            // Random element of the full algebra: degree-0 bodies times X-powers.
            let mut u = TorusElement::zero(ctx.n());
            for _ in 0..3 {
                let body = ctx.random_t0_element(&mut rng, 1);
                let i = rng.gen_range(-2..=2);
                u = u
                    .try_add(&body.skew_mul(&ctx.x_power(i)).unwrap())
                    .unwrap();
            }
            let terms = ctx.decompose_t(&u).unwrap();
            assert_eq!(ctx.recompose_t(&terms), u);

            // Random element of the polynomial part: bodies times X- and Y-powers.
            let mut v = TorusElement::zero(ctx.n());
            for _ in 0..3 {
                let body = ctx.random_t0_element(&mut rng, 1);
                let factor = if rng.gen_bool(0.5) {
                    ctx.x_power(rng.gen_range(0..=2))
                } else {
                    ctx.y().pow(rng.gen_range(1..=2)).unwrap()
                };
                v = v.try_add(&body.skew_mul(&factor).unwrap()).unwrap();
            }
            let d = ctx.decompose_t0xy(&v).unwrap();
            assert_eq!(d.recompose(&ctx), v);
        }
    }
}
