//! Cross-checks of the quotient presentation against the torus operator
//! model: the presentation polynomial reproduces the spectral image of
//! XY on every catalog space, its derived commutation datum matches the
//! spectral bracket, the generator map passes the full isomorphism
//! check, and the two-step decomposition (powers of X and Y outside,
//! central E-expansions inside) reassembles random elements exactly.

use parabolic::{
    build_u_xy, r_vars, sigma0, verify_iso, CenterRing, ExactPoly, IsoBridge, PVType, Poly,
    TorusElement,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn catalog_small() -> Vec<PVType> {
    PVType::catalog()
        .into_iter()
        .filter(|pv| pv.n() <= 3)
        .collect()
}

/// sigma0 substituted for t, the other variables fixed.
fn at_sigma0(p: &ExactPoly, n: usize) -> ExactPoly {
    let rv = r_vars(n);
    let mut images: Vec<ExactPoly> = rv
        .names()
        .iter()
        .map(|name| Poly::var(&rv, name))
        .collect();
    images.push(sigma0(n));
    p.substitute(&images).unwrap()
}

#[test]
fn presentation_round_trips_on_every_catalog_space() {
    for pv in catalog_small() {
        let bridge = IsoBridge::new(&pv);
        let pres = build_u_xy(&pv);
        let center = CenterRing::for_pv(&pv);
        for beta in pres.betas() {
            assert!(
                center.contains(beta),
                "{}: coefficient {} left the center",
                pv.label(),
                beta
            );
        }
        let tee = bridge.tee();
        let xy = tee.x().skew_mul(tee.y()).unwrap();
        let want = tee.gamma_of(&xy).unwrap();
        assert_eq!(
            pres.eval_at_sigma0().poly(),
            want.poly(),
            "{}: u_XY at sigma0 missed the spectral image of XY",
            pv.label()
        );
    }
}

#[test]
fn derived_datum_matches_the_spectral_bracket_everywhere() {
    for pv in catalog_small() {
        let tee_bridge = IsoBridge::new(&pv);
        let tee = tee_bridge.tee();
        let pres = tee_bridge.presentation();
        let yx = tee.y().skew_mul(tee.x()).unwrap();
        let xy = tee.x().skew_mul(tee.y()).unwrap();
        let want = tee
            .gamma_of(&yx)
            .unwrap()
            .poly()
            .try_sub(tee.gamma_of(&xy).unwrap().poly())
            .unwrap();
        assert_eq!(
            at_sigma0(&pres.f_xy(), tee.n()),
            want,
            "{}: derived datum missed the bracket",
            pv.label()
        );
    }
}

#[test]
fn isomorphism_checks_pass_on_representative_spaces() {
    for (spec, trials) in [("A:2", 15), ("A:3", 10), ("B:3", 15), ("C:3", 10)] {
        let pv = PVType::from_spec_str(spec).unwrap();
        let report = verify_iso(&pv, trials, 97).unwrap();
        assert_eq!(report.pairs, trials, "{spec}");
        assert!(report.probes >= 16, "{spec}");
    }
}

#[test]
fn center_expansion_round_trips_on_random_operators() {
    for (spec, seed) in [("A:2", 301u64), ("C:3", 307), ("B:2", 311)] {
        let pv = PVType::from_spec_str(spec).unwrap();
        let bridge = IsoBridge::new(&pv);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10 {
            let h = bridge.tee().random_t0_element(&mut rng, 3);
            let zs = bridge.expand_over_center(&h).unwrap();
            let back = bridge.assemble_from_center(&zs).unwrap();
            assert_eq!(back, h, "{spec}: expansion failed to reassemble {h}");
        }
    }
}

#[test]
fn two_step_decomposition_reassembles_random_elements() {
    for (spec, seed) in [("A:2", 401u64), ("A:3", 409), ("D1:4", 419)] {
        let pv = PVType::from_spec_str(spec).unwrap();
        let bridge = IsoBridge::new(&pv);
        let tee = bridge.tee();
        let n = tee.n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            // Random element of the span of X- and Y-powers with
            // degree-zero coefficients on the right.
            let mut w = TorusElement::zero(n);
            for _ in 0..rng.gen_range(1..=3) {
                let coeff = tee.random_t0_element(&mut rng, 2);
                let power = rng.gen_range(-2i64..=2);
                let shell = if power >= 0 {
                    tee.x_power(power)
                } else {
                    tee.y().pow((-power) as u32).unwrap()
                };
                w = w.try_add(&shell.skew_mul(&coeff).unwrap()).unwrap();
            }
            let dec = tee.decompose_t0xy(&w).unwrap();
            for (_, coeff) in dec.neg() {
                let zs = bridge.expand_over_center(coeff).unwrap();
                assert_eq!(&bridge.assemble_from_center(&zs).unwrap(), coeff);
            }
            for (_, coeff) in dec.pos() {
                let zs = bridge.expand_over_center(coeff).unwrap();
                assert_eq!(&bridge.assemble_from_center(&zs).unwrap(), coeff);
            }
            assert_eq!(dec.recompose(tee), w, "{spec}: recomposition drifted");
        }
    }
}
