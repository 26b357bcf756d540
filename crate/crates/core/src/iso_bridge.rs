//! The presentation of the polynomial-coefficient operator algebra as a
//! quotient algebra over its center, and the machine check that sending
//! the quotient generators to X, Y, E is an isomorphism.
//!
//! The degree-zero part pairs with powers of X and Y to span the algebra
//! of polynomial-coefficient operators, and its center consists of the
//! twist-invariant spectral polynomials.  Expanding the spectral image
//! of XY along powers of the total spectral sum produces a one-variable
//! polynomial u_XY with central coefficients; the quotient algebra built
//! from u_XY then maps onto the operator algebra by x to X, y to Y, e to
//! E.  This module builds u_XY, transports coefficients back through the
//! spectral map at the boundary, and verifies the isomorphism by direct
//! computation: defining relations, multiplicativity on random canonical
//! pairs, and injectivity on a bounded monomial basis.
//!
//! # Key Operations
//!
//! - [`build_u_xy`] packages the expansion of the spectral image of XY
//!   into a presentation polynomial with central coefficients.
//! - [`IsoBridge::phi`] maps a canonical quotient element to a torus
//!   operator, transporting each central coefficient once.
//! - [`IsoBridge::verify_iso`] (and the [`verify_iso`] convenience) runs
//!   the relation, homomorphism, and injectivity checks.
//! - [`IsoBridge::expand_over_center`] rewrites a degree-zero operator as
//!   a polynomial in E with central coefficients, the inner layer of the
//!   full two-step decomposition.
//!
//! # Design Notes
//!
//! Center elements are carried as their spectral images, so coefficient
//! arithmetic is plain polynomial arithmetic in `r0..rn`; the inverse
//! spectral transport happens exactly once, inside `phi`.  The quotient
//! context reuses the generic canonical-form machinery over the concrete
//! ring `Q[r0..rn]`, with membership in the center enforced on the
//! coefficients that enter and leave.  Injectivity is probed on the
//! canonical monomials of bounded degree rather than proved; every
//! failure carries the offending elements in the error.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

use thiserror::Error;

use crate::exact_poly::{rat, ExactPoly, Poly, PolyError, Rat, VarSet};
use crate::pv_catalog::PVType;
use crate::smith::{lift, t_coefficients, SmithError, UContext, UElement};
use crate::sym_harish::{
    decompose_tau, diagonal_extension, r_vars, random_symmetric, sigma0, SymError, SymPoly,
};
use crate::tee_algebra::{TeeContext, TeeError};
use crate::torus_weyl::{x_vars, TorusElement, TorusError};

/// Errors from building the presentation or checking the isomorphism.
#[derive(Debug, Error)]
pub enum IsoError {
    /// A defining relation failed in the torus model.
    #[error("relation {name} failed: {detail}")]
    Relation { name: &'static str, detail: String },
    /// phi(a b) differed from phi(a) phi(b).
    #[error("homomorphism failed on a = {a}, b = {b}")]
    Homomorphism { a: String, b: String },
    /// Two distinct canonical monomials collided or left the span.
    #[error("injectivity probe failed: {first} vs {second}")]
    Injectivity { first: String, second: String },
    /// A coefficient was not a twist-invariant symmetric polynomial.
    #[error("coefficient lies outside the center: {0}")]
    OutsideCenter(String),
    #[error(transparent)]
    Tee(#[from] TeeError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Smith(#[from] SmithError),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The center, carried as spectral images: symmetric polynomials in
/// `r0..rn` invariant under the simultaneous shift by one.
///
/// Contains all constants; closure of add and mul is re-checked on every
/// operation rather than assumed.
#[derive(Debug, Clone)]
pub struct CenterRing {
    n: usize,
    d: Rat,
}

impl CenterRing {
    pub fn for_pv(pv: &PVType) -> CenterRing {
        CenterRing {
            n: pv.n(),
            d: pv.d(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The multiplicity parameter of the underlying space.
    pub fn d(&self) -> &Rat {
        &self.d
    }

    /// Membership: right rank, symmetric, and shift invariant.
    pub fn contains(&self, s: &SymPoly) -> bool {
        s.n() == self.n && s.is_symmetric() && s.is_tau_invariant()
    }

    fn ensure(&self, s: &SymPoly) -> Result<(), IsoError> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(IsoError::OutsideCenter(s.to_string()))
        }
    }

    /// Admit a spectral polynomial as a center element, or reject it.
    pub fn element(&self, s: SymPoly) -> Result<SymPoly, IsoError> {
        self.ensure(&s)?;
        Ok(s)
    }

    pub fn constant(&self, c: Rat) -> SymPoly {
        SymPoly::constant(self.n, c)
    }

    /// Sum with the closure check applied to the result.
    pub fn add(&self, a: &SymPoly, b: &SymPoly) -> Result<SymPoly, IsoError> {
        self.ensure(a)?;
        self.ensure(b)?;
        let out = SymPoly::new(self.n, a.poly().try_add(b.poly())?);
        self.ensure(&out)?;
        Ok(out)
    }

    /// Product with the closure check applied to the result.
    pub fn mul(&self, a: &SymPoly, b: &SymPoly) -> Result<SymPoly, IsoError> {
        self.ensure(a)?;
        self.ensure(b)?;
        let out = SymPoly::new(self.n, a.poly().try_mul(b.poly())?);
        self.ensure(&out)?;
        Ok(out)
    }

    /// Random nonzero center element: the diagonal extension of a random
    /// symmetric polynomial plus a random constant.  At rank one the
    /// center is the constants and the fallback covers it.
    pub fn random_element<R: Rng>(&self, rng: &mut R, max_factors: u32) -> SymPoly {
        for _ in 0..8 {
            let base = diagonal_extension(&random_symmetric(self.n, rng, max_factors));
            let c = rat(rng.gen_range(-5..=5));
            let poly = base
                .poly()
                .try_add(&Poly::constant(base.poly().vars(), c))
                .expect("same context");
            let s = SymPoly::new(self.n, poly);
            if !s.is_zero() {
                debug_assert!(self.contains(&s));
                return s;
            }
        }
        self.constant(rat(1))
    }
}

/// The presentation polynomial u_XY: one variable `t` over the center,
/// expanded so that substituting the total spectral sum for t recovers
/// the spectral image of XY exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UxyPresentation {
    n: usize,
    poly: ExactPoly,
    betas: Vec<SymPoly>,
}

impl UxyPresentation {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The polynomial in `[r0..rn, t]`.
    pub fn poly(&self) -> &ExactPoly {
        &self.poly
    }

    /// Center coefficients by ascending t-power.
    pub fn betas(&self) -> &[SymPoly] {
        &self.betas
    }

    /// Substitute the total spectral sum for t.
    pub fn eval_at_sigma0(&self) -> SymPoly {
        let rv = r_vars(self.n);
        let mut images: Vec<ExactPoly> = rv
            .names()
            .iter()
            .map(|name| Poly::var(&rv, name))
            .collect();
        images.push(sigma0(self.n));
        SymPoly::new(self.n, self.poly.substitute(&images).expect("plain powers"))
    }

    /// The derived commutation datum u_XY(t+n+1) - u_XY(t).
    pub fn f_xy(&self) -> ExactPoly {
        let step = rat(self.n as i64 + 1);
        self.poly
            .shift("t", &step)
            .expect("plain variable")
            .try_sub(&self.poly)
            .expect("same context")
    }

    /// The quotient algebra over `Q[r0..rn]` presented by this u.
    pub fn u_context(&self) -> UContext {
        UContext::new(&r_vars(self.n), self.n as u32, &self.poly)
            .expect("presentation context is valid")
    }
}

/// Build u_XY: take the spectral image of XY, expand along powers of the
/// total spectral sum, and package the twist-invariant coefficients.
pub fn build_u_xy(pv: &PVType) -> UxyPresentation {
    let tee = TeeContext::new(pv.clone());
    let n = tee.n();
    let xy = tee.x().skew_mul(tee.y()).expect("same rank");
    let image = tee.gamma_of(&xy).expect("XY has degree zero");
    let betas = decompose_tau(&image).expect("spectral image is symmetric");
    let rv = r_vars(n);
    let mut names: Vec<&str> = rv.names().iter().map(String::as_str).collect();
    names.push("t");
    let evars = VarSet::new(&names);
    let t = Poly::var(&evars, "t");
    let mut poly = Poly::zero_in(&evars);
    for (j, beta) in betas.iter().enumerate() {
        let term = lift(beta.poly(), &evars)
            .try_mul(&t.pow(j as u32))
            .expect("same context");
        poly = poly.try_add(&term).expect("same context");
    }
    UxyPresentation { n, poly, betas }
}

/// Report of a successful isomorphism verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoReport {
    pub relations: usize,
    pub pairs: u32,
    pub probes: usize,
}

impl fmt::Display for IsoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} relations, {} random pairs, {} injectivity probes",
            self.relations, self.pairs, self.probes
        )
    }
}

/// Everything needed to move between the quotient presentation and the
/// torus model for one space: the operator context, the center, the
/// presentation, and the quotient context it induces.
pub struct IsoBridge {
    tee: TeeContext,
    center: CenterRing,
    pres: UxyPresentation,
    uctx: UContext,
}

impl IsoBridge {
    pub fn new(pv: &PVType) -> IsoBridge {
        let tee = TeeContext::new(pv.clone());
        let center = CenterRing::for_pv(pv);
        let pres = build_u_xy(pv);
        let uctx = pres.u_context();
        IsoBridge {
            tee,
            center,
            pres,
            uctx,
        }
    }

    pub fn tee(&self) -> &TeeContext {
        &self.tee
    }

    pub fn center(&self) -> &CenterRing {
        &self.center
    }

    pub fn presentation(&self) -> &UxyPresentation {
        &self.pres
    }

    pub fn u_context(&self) -> &UContext {
        &self.uctx
    }

    /// Image of an e-polynomial with central coefficients.  Each t-power
    /// slice must be central; the whole polynomial then maps through one
    /// fused substitution `ri -> X0+..+Xi+rho_i`, `t -> b_E(X)`, which
    /// equals transporting each slice and multiplying powers of E since
    /// degree-0 parts multiply as plain polynomials.
    fn phi_epoly(&self, p: &ExactPoly) -> Result<TorusElement, IsoError> {
        let n = self.tee.n();
        let rv = r_vars(n);
        for slice in t_coefficients(p, &rv) {
            if slice.is_zero() {
                continue;
            }
            self.center.ensure(&SymPoly::new(n, slice))?;
        }
        let xv = x_vars(n);
        let mut partial = Poly::zero_in(&xv);
        let mut images = Vec::with_capacity(n + 2);
        for (i, r) in self.tee.rho().components().iter().enumerate() {
            partial = partial.try_add(&Poly::var(&xv, &format!("X{i}")))?;
            images.push(partial.try_add(&Poly::constant(&xv, r.clone()))?);
        }
        images.push(self.tee.e().part_poly(0));
        Ok(TorusElement::part(n, 0, p.substitute(&images)?))
    }

    /// The algebra map: x to X, y to Y, e to E, coefficients through the
    /// inverse spectral transport.
    pub fn phi(&self, el: &UElement) -> Result<TorusElement, IsoError> {
        let n = self.tee.n();
        let mut acc = TorusElement::zero(n);
        for (m, p) in el.x_side() {
            let image = self.phi_epoly(p)?;
            let xm = self.tee.x_power(m as i64);
            acc = acc.try_add(&xm.skew_mul(&image)?)?;
        }
        for (l, q) in el.y_side() {
            let image = self.phi_epoly(q)?;
            let yl = self.tee.y().pow(l)?;
            acc = acc.try_add(&yl.skew_mul(&image)?)?;
        }
        Ok(acc)
    }

    /// Random canonical term: a center coefficient times a small t-power
    /// times a small x- or y-power.  Products of such terms reach every
    /// rewrite case; sums add nothing to a bilinear check.
    pub fn random_canonical<R: Rng>(&self, rng: &mut R) -> UElement {
        let evars = self.uctx.poly_vars();
        let t = Poly::var(evars, "t");
        let z = self.center.random_element(rng, 1);
        let epow = rng.gen_range(0..=2u32);
        let coeff = lift(z.poly(), evars)
            .try_mul(&t.pow(epow))
            .expect("same context");
        if rng.gen_bool(0.5) {
            self.uctx.monomial_x(rng.gen_range(0..=2), &coeff)
        } else {
            self.uctx.monomial_y(rng.gen_range(1..=2), &coeff)
        }
    }

    /// Expand a degree-zero operator as central coefficients along powers
    /// of E: u = sum of gamma_inverse(z_i) E^i.
    pub fn expand_over_center(&self, u: &TorusElement) -> Result<Vec<SymPoly>, IsoError> {
        let image = self.tee.gamma_of(u)?;
        let zs = decompose_tau(&image)?;
        for z in &zs {
            self.center.ensure(z)?;
        }
        Ok(zs)
    }

    /// Rebuild the operator from its central E-expansion.
    pub fn assemble_from_center(&self, zs: &[SymPoly]) -> Result<TorusElement, IsoError> {
        let n = self.tee.n();
        let mut acc = TorusElement::zero(n);
        for (i, z) in zs.iter().enumerate() {
            if z.is_zero() {
                continue;
            }
            let central = self.tee.from_spectral(z);
            let ei = self.tee.e().pow(i as u32)?;
            acc = acc.try_add(&central.skew_mul(&ei)?)?;
        }
        Ok(acc)
    }

    /// Canonical monomials x^m e^r and y^l e^k of total degree at most
    /// `bound`, the injectivity probe basis.
    fn probe_monomials(&self, bound: u32) -> Vec<UElement> {
        let evars = self.uctx.poly_vars();
        let t = Poly::var(evars, "t");
        let mut out = Vec::new();
        for m in 0..=bound {
            for r in 0..=(bound - m) {
                out.push(self.uctx.monomial_x(m, &t.pow(r)));
            }
        }
        for l in 1..=bound {
            for k in 0..=(bound - l) {
                out.push(self.uctx.monomial_y(l, &t.pow(k)));
            }
        }
        out
    }

    /// Run the isomorphism checks: defining relations in the torus model,
    /// multiplicativity on random canonical pairs, and injectivity with
    /// span membership on the bounded monomial basis.
    pub fn verify_iso(&self, trials: u32, seed: u64) -> Result<IsoReport, IsoError> {
        assert!(trials >= 1, "at least one trial");
        let n = self.tee.n();
        let step = rat(n as i64 + 1);
        let x = self.tee.x();
        let y = self.tee.y();
        let e = self.tee.e();

        // Defining relations.
        let lhs = e.commutator(x)?;
        if lhs != x.scale(&step) {
            return Err(IsoError::Relation {
                name: "[E,X] = (n+1)X",
                detail: format!("got {lhs}"),
            });
        }
        let lhs = e.commutator(y)?;
        if lhs != y.scale(&step).negate() {
            return Err(IsoError::Relation {
                name: "[E,Y] = -(n+1)Y",
                detail: format!("got {lhs}"),
            });
        }
        let u_of_e = self.uctx.from_e_poly(self.uctx.u_poly());
        let lhs = self.phi(&u_of_e)?;
        if lhs != x.skew_mul(y)? {
            return Err(IsoError::Relation {
                name: "XY = u_XY(E)",
                detail: format!("got {lhs}"),
            });
        }
        let shifted = self.uctx.u_poly().shift("t", &step)?;
        let lhs = self.phi(&self.uctx.from_e_poly(&shifted))?;
        if lhs != y.skew_mul(x)? {
            return Err(IsoError::Relation {
                name: "YX = u_XY(E+n+1)",
                detail: format!("got {lhs}"),
            });
        }
        let relations = 4;

        // Homomorphism on random canonical pairs.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let a = self.random_canonical(&mut rng);
            let b = self.random_canonical(&mut rng);
            let lhs = self.phi(&self.uctx.u_mul(&a, &b)?)?;
            let rhs = self.phi(&a)?.skew_mul(&self.phi(&b)?)?;
            if lhs != rhs {
                return Err(IsoError::Homomorphism {
                    a: a.to_string(),
                    b: b.to_string(),
                });
            }
        }

        // Injectivity and span membership on the bounded monomial basis.
        let monos = self.probe_monomials(3);
        let mut images: Vec<(UElement, TorusElement)> = Vec::with_capacity(monos.len());
        for mono in monos {
            let img = self.phi(&mono)?;
            if img.is_zero() {
                return Err(IsoError::Injectivity {
                    first: mono.to_string(),
                    second: "0".into(),
                });
            }
            if let Some((prev, _)) = images.iter().find(|(_, i)| *i == img) {
                return Err(IsoError::Injectivity {
                    first: prev.to_string(),
                    second: mono.to_string(),
                });
            }
            self.tee.decompose_t0xy(&img)?;
            images.push((mono, img));
        }
        let probes = images.len();

        Ok(IsoReport {
            relations,
            pairs: trials,
            probes,
        })
    }
}

/// Build the bridge for a space and run the full verification.
pub fn verify_iso(pv: &PVType, trials: u32, seed: u64) -> Result<IsoReport, IsoError> {
    IsoBridge::new(pv).verify_iso(trials, seed)
}
