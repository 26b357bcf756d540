//! Symmetric-polynomial toolkit in the `r0..rn` coordinates.
//!
//! The change of variables `ri = a0 + .. + ai` turns b-functions of
//! degree-0 operators into polynomials on which the full symmetric group
//! acts; the spectral-parameter map `gamma` is `b(r - rho)` for the fixed
//! vector `rho_i = (d/4)(-n + 2i)`.  Images of degree-0 operators are
//! symmetric, the twist `tau` becomes the all-coordinates shift
//! `r -> r + 1`, and the center corresponds to polynomials invariant
//! under both actions.
//!
//! # Key Operations
//! - `a_to_r` / `r_to_a`: the exact change of variables.
//! - `gamma`: b-function to spectral polynomial; symmetry is the
//!   membership test for the degree-0 subalgebra.
//! - `decompose_tau`: the unique expansion `P = sum_i alpha_i * sigma0^i`
//!   with every `alpha_i` symmetric and shift-invariant, built by
//!   constant extension along `(1, .., 1)`.
//! - `tau_invariant_generators`: the constructive shift-invariant
//!   generator extraction for ideals, as `(generator, sigma0-power)`
//!   pairs.
//! - `center_split`: the spectral side of "degree-0 subalgebra =
//!   center + Euler-multiples".
//!
//! # Design Notes
//! - Symmetry is checked by substituting adjacent transpositions, which
//!   generate the full symmetric group; no orbit enumeration.
//! - `decompose_tau` follows the constant-extension construction: the
//!   substitution `ri -> ri - sigma0/(n+1)` restricts a polynomial to
//!   the hyperplane `sigma0 = 0` and extends it constantly along the
//!   diagonal, so the difference divides exactly by `sigma0`.  The
//!   denominators `(n+1)^deg` this introduces stay exact over the
//!   rationals.
//! - Randomized helpers build candidates from power sums, which are
//!   symmetric by construction.

use crate::exact_poly::{rat, ratio, ExactPoly, Poly, PolyError, Rat, VarSet};
use crate::pv_catalog::PVType;
use crate::tee_algebra::BFunction;
use num_traits::Zero;
use rand::Rng;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymError {
    #[error("polynomial is not symmetric in r0..rn")]
    NotSymmetric,
    #[error("b-function has degree {0}, need degree 0")]
    NotDegreeZero(i64),
    #[error("generator is neither symmetric nor shift-invariant")]
    BadGenerator,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Variable context `a0..an` (cell coordinates).
pub fn a_vars(n: usize) -> Arc<VarSet> {
    let names: Vec<String> = (0..=n).map(|i| format!("a{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    VarSet::new(&refs)
}

/// Variable context `r0..rn` (spectral coordinates).
pub fn r_vars(n: usize) -> Arc<VarSet> {
    let names: Vec<String> = (0..=n).map(|i| format!("r{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    VarSet::new(&refs)
}

/// The half-sum vector `rho_i = (d/4)(-n + 2i)`, `i = 0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoVector {
    n: usize,
    components: Vec<Rat>,
}

impl RhoVector {
    pub fn for_pv(pv: &PVType) -> RhoVector {
        let n = pv.n();
        let quarter = pv.d() / rat(4);
        let components: Vec<Rat> = (0..=n)
            .map(|i| quarter.clone() * rat(-(n as i64) + 2 * i as i64))
            .collect();
        let rho = RhoVector { n, components };
        debug_assert!(rho.components.iter().cloned().sum::<Rat>().is_zero());
        rho
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[Rat] {
        &self.components
    }
}

/// Polynomial in `r0..rn` with its symmetry and shift-invariance cached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymPoly {
    n: usize,
    poly: ExactPoly,
    symmetric: bool,
    tau_invariant: bool,
}

impl SymPoly {
    pub fn new(n: usize, poly: ExactPoly) -> SymPoly {
        assert_eq!(
            poly.vars().names(),
            r_vars(n).names(),
            "SymPoly lives in the r0..rn context"
        );
        let symmetric = poly_is_symmetric(n, &poly);
        let tau_invariant = diagonal_derivative(n, &poly).is_zero();
        SymPoly {
            n,
            poly,
            symmetric,
            tau_invariant,
        }
    }

    pub fn parse(n: usize, text: &str) -> Result<SymPoly, PolyError> {
        Ok(SymPoly::new(n, Poly::parse(&r_vars(n), text)?))
    }

    pub fn constant(n: usize, c: Rat) -> SymPoly {
        SymPoly::new(n, Poly::constant(&r_vars(n), c))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn poly(&self) -> &ExactPoly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Invariance under all adjacent transpositions `ri <-> r(i+1)`.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Invariance under the all-coordinates shift `r -> r + 1`.
    pub fn is_tau_invariant(&self) -> bool {
        self.tau_invariant
    }
}

impl fmt::Display for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

fn poly_is_symmetric(n: usize, p: &ExactPoly) -> bool {
    // Adjacent transpositions only permute exponents, so compare the
    // coefficient of each monomial with its swapped partner.
    for i in 0..n {
        for (mono, c) in p.terms() {
            let mut e = mono.exps().to_vec();
            e.swap(i, i + 1);
            if p.coeff(&e) != *c {
                return false;
            }
        }
    }
    true
}

/// Directional derivative along `(1, .., 1)`; a polynomial is invariant
/// under the unit shift of every coordinate exactly when this vanishes.
fn diagonal_derivative(n: usize, p: &ExactPoly) -> ExactPoly {
    let mut dir = Poly::zero_in(p.vars());
    for i in 0..=n {
        dir = dir
            .try_add(&p.derivative(&format!("r{i}")).expect("r-variable exists"))
            .expect("same context");
    }
    dir
}

fn tau_shift_poly(n: usize, p: &ExactPoly, amount: i64) -> ExactPoly {
    let mut out = p.clone();
    for i in 0..=n {
        out = out
            .shift(&format!("r{i}"), &rat(amount))
            .expect("r-variable exists");
    }
    out
}

/// `sigma0 = r0 + .. + rn`.
pub fn sigma0(n: usize) -> ExactPoly {
    let vars = r_vars(n);
    let mut acc = Poly::zero_in(&vars);
    for i in 0..=n {
        acc = acc.try_add(&Poly::var(&vars, &format!("r{i}"))).unwrap();
    }
    acc
}

/// Substitute `a0 = r0`, `ai = ri - r(i-1)`.
pub fn a_to_r(p: &ExactPoly) -> SymPoly {
    let n = p.vars().len() - 1;
    assert_eq!(
        p.vars().names(),
        a_vars(n).names(),
        "a_to_r expects the a0..an context"
    );
    let rv = r_vars(n);
    let images: Vec<ExactPoly> = (0..=n)
        .map(|i| {
            let ri = Poly::var(&rv, &format!("r{i}"));
            if i == 0 {
                ri
            } else {
                ri.try_sub(&Poly::var(&rv, &format!("r{}", i - 1))).unwrap()
            }
        })
        .collect();
    SymPoly::new(n, p.substitute(&images).expect("matching contexts"))
}

/// Substitute `ri = a0 + .. + ai`; exact inverse of [`a_to_r`].
pub fn r_to_a(s: &SymPoly) -> ExactPoly {
    let n = s.n();
    let av = a_vars(n);
    let mut partial = Poly::zero_in(&av);
    let mut images = Vec::with_capacity(n + 1);
    for i in 0..=n {
        partial = partial.try_add(&Poly::var(&av, &format!("a{i}"))).unwrap();
        images.push(partial.clone());
    }
    s.poly().substitute(&images).expect("matching contexts")
}

/// Transport a degree-0 b-function to spectral coordinates without the
/// symmetry requirement: `b(r - rho)` as a raw candidate.
pub fn gamma_candidate(b: &BFunction, rho: &RhoVector) -> Result<SymPoly, SymError> {
    if b.degree() != 0 {
        return Err(SymError::NotDegreeZero(b.degree()));
    }
    // One substitution `ai -> (ri - rho_i) - (r(i-1) - rho_(i-1))` fuses
    // the coordinate change with the shift.
    let n = rho.n();
    let rv = r_vars(n);
    let images: Vec<ExactPoly> = (0..=n)
        .map(|i| {
            let mut im = Poly::var(&rv, &format!("r{i}"))
                .try_add(&Poly::constant(&rv, -rho.components()[i].clone()))
                .unwrap();
            if i > 0 {
                let prev = Poly::var(&rv, &format!("r{}", i - 1))
                    .try_add(&Poly::constant(&rv, -rho.components()[i - 1].clone()))
                    .unwrap();
                im = im.try_sub(&prev).unwrap();
            }
            im
        })
        .collect();
    let poly = b.poly().substitute(&images).expect("matching contexts");
    Ok(SymPoly::new(n, poly))
}

/// The spectral-parameter map `gamma(D)(r) = b_D(r - rho)`; symmetric
/// output is exactly membership of `D` in the degree-0 subalgebra.
pub fn gamma(b: &BFunction, rho: &RhoVector) -> Result<SymPoly, SymError> {
    let s = gamma_candidate(b, rho)?;
    if !s.is_symmetric() {
        return Err(SymError::NotSymmetric);
    }
    Ok(s)
}

/// Inverse transport: spectral polynomial back to a b-function in `a`.
/// One substitution `ri -> a0 + .. + ai + rho_i` fuses the shift with
/// the coordinate change.
pub fn gamma_inverse(s: &SymPoly, rho: &RhoVector) -> BFunction {
    let n = s.n();
    let av = a_vars(n);
    let mut partial = Poly::zero_in(&av);
    let mut images = Vec::with_capacity(n + 1);
    for (i, r) in rho.components().iter().enumerate() {
        partial = partial
            .try_add(&Poly::var(&av, &format!("a{i}")))
            .unwrap();
        images.push(
            partial
                .try_add(&Poly::constant(&av, r.clone()))
                .unwrap(),
        );
    }
    BFunction::new(0, s.poly().substitute(&images).expect("matching contexts"))
}

/// The all-coordinates shift `P(r) -> P(r0 + 1, .., rn + 1)`.
pub fn tau_shift(s: &SymPoly) -> SymPoly {
    SymPoly::new(s.n(), tau_shift_poly(s.n(), s.poly(), 1))
}

/// Constant extension along `(1, .., 1)`: substitute
/// `ri -> ri - sigma0/(n+1)`.  Always shift-invariant; symmetric when the
/// input is.
fn extend_along_diagonal(n: usize, p: &ExactPoly) -> ExactPoly {
    let rv = r_vars(n);
    let correction = sigma0(n).scale(&(rat(-1) / rat(n as i64 + 1)));
    let images: Vec<ExactPoly> = (0..=n)
        .map(|i| {
            Poly::var(&rv, &format!("r{i}"))
                .try_add(&correction)
                .unwrap()
        })
        .collect();
    p.substitute(&images).expect("same context")
}

/// Constant extension along the diagonal as a public operation: the
/// result agrees with `s` on the hyperplane `sigma0 = 0` and is always
/// shift-invariant; it keeps symmetry.  Fixed points are exactly the
/// shift-invariant polynomials.
pub fn diagonal_extension(s: &SymPoly) -> SymPoly {
    SymPoly::new(s.n(), extend_along_diagonal(s.n(), s.poly()))
}

/// A reproducible random symmetric polynomial: a short combination of
/// power-sum products `p_j = sum_i ri^j` with small rational
/// coefficients.  Never zero.
pub fn random_symmetric<R: Rng>(n: usize, rng: &mut R, max_factors: u32) -> SymPoly {
    let rv = r_vars(n);
    let power_sum = |j: u32| {
        let mut acc = Poly::zero_in(&rv);
        for i in 0..=n {
            acc = acc
                .try_add(&Poly::var(&rv, &format!("r{i}")).pow(j))
                .unwrap();
        }
        acc
    };
    loop {
        let mut total = Poly::zero_in(&rv);
        for _ in 0..rng.gen_range(1..=3) {
            let mut prod = Poly::one_in(&rv);
            for _ in 0..rng.gen_range(0..=max_factors) {
                prod = prod.try_mul(&power_sum(rng.gen_range(1..=3))).unwrap();
            }
            total = total
                .try_add(&prod.scale(&ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4))))
                .unwrap();
        }
        if !total.is_zero() {
            return SymPoly::new(n, total);
        }
    }
}

/// Unique expansion `s = sum_i alpha_i * sigma0^i` with each `alpha_i`
/// symmetric and shift-invariant.  Index `i` is the `sigma0`-power; the
/// list may contain zero entries below the top power.
pub fn decompose_tau(s: &SymPoly) -> Result<Vec<SymPoly>, SymError> {
    if !s.is_symmetric() {
        return Err(SymError::NotSymmetric);
    }
    decompose_tau_unchecked(s)
}

fn decompose_tau_unchecked(s: &SymPoly) -> Result<Vec<SymPoly>, SymError> {
    let n = s.n();
    let sig = sigma0(n);
    let mut rest = s.poly().clone();
    let mut alphas = Vec::new();
    while !rest.is_zero() {
        let alpha = extend_along_diagonal(n, &rest);
        let diff = rest.try_sub(&alpha)?;
        // diff vanishes on the hyperplane sigma0 = 0, so sigma0 divides it.
        rest = diff.divide_exact(&sig)?;
        let alpha = SymPoly::new(n, alpha);
        debug_assert!(alpha.is_tau_invariant());
        alphas.push(alpha);
    }
    while alphas.last().is_some_and(SymPoly::is_zero) {
        alphas.pop();
    }
    Ok(alphas)
}

/// Re-expand a `decompose_tau` result: `sum_i alphas[i] * sigma0^i`.
pub fn recompose_tau(n: usize, alphas: &[SymPoly]) -> SymPoly {
    let sig = sigma0(n);
    let mut acc = Poly::zero_in(&r_vars(n));
    let mut power = Poly::one_in(&r_vars(n));
    for a in alphas {
        acc = acc.try_add(&a.poly().try_mul(&power).unwrap()).unwrap();
        power = power.try_mul(&sig).unwrap();
    }
    SymPoly::new(n, acc)
}

/// Shift-invariant generators for the ideal generated by `gens`, as
/// `(generator, sigma0-power)` pairs: each input expands exactly as
/// `sum pairs (g, i) -> g * sigma0^i` over its own pairs.
///
/// Accepts symmetric or already shift-invariant generators.
pub fn tau_invariant_generators(
    gens: &[SymPoly],
) -> Result<Vec<(SymPoly, u32)>, SymError> {
    let mut out = Vec::new();
    for g in gens {
        if !g.is_symmetric() && !g.is_tau_invariant() {
            return Err(SymError::BadGenerator);
        }
        let alphas = decompose_tau_unchecked(g)?;
        let mut expansion: Vec<(SymPoly, u32)> = Vec::new();
        for (i, alpha) in alphas.iter().enumerate() {
            if !alpha.is_zero() {
                assert!(alpha.is_tau_invariant(), "construction yields invariants");
                expansion.push((alpha.clone(), i as u32));
            }
        }
        // The pairs recombine to the input: g = sum g_i * sigma0^i.
        let complete = recompose_tau(g.n(), &alphas);
        assert_eq!(&complete.poly().clone(), g.poly(), "recombination is exact");
        out.extend(expansion);
    }
    Ok(out)
}

/// Split `gamma(b) = z + sigma0 * q`: the shift-invariant component `z`
/// and the remainder divisible by `sigma0`.
pub fn center_split(b: &BFunction, rho: &RhoVector) -> Result<(SymPoly, SymPoly), SymError> {
    let g = gamma(b, rho)?;
    let alphas = decompose_tau(&g)?;
    let n = g.n();
    let z = alphas
        .first()
        .cloned()
        .unwrap_or_else(|| SymPoly::constant(n, rat(0)));
    let rest = SymPoly::new(n, g.poly().try_sub(z.poly())?);
    Ok((z, rest))
}

/// Exact determinant by Gaussian elimination over the rationals.
pub fn det_rat(mut m: Vec<Vec<Rat>>) -> Rat {
    let size = m.len();
    let mut det = rat(1);
    for col in 0..size {
        let Some(pivot) = (col..size).find(|&row| !m[row][col].is_zero()) else {
            return rat(0);
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let lead = m[col][col].clone();
        det *= lead.clone();
        for row in col + 1..size {
            let factor = m[row][col].clone() / lead.clone();
            for k in col..size {
                let sub = factor.clone() * m[col][k].clone();
                m[row][k] -= sub;
            }
        }
    }
    det
}
