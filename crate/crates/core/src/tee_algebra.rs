//! The operator algebra generated by multiplication by the fundamental
//! invariant, its inverse on the open orbit, the dual invariant
//! differential operator, and the Euler operator, realized inside the
//! torus model.
//!
//! For a catalog entry with rank parameter `n` and multiplicity `d`, the
//! four generators become
//!
//! ```text
//! X    = (1, 1)
//! Xinv = (-1, 1)
//! E    = (0, (n+1)X0 + nX1 + .. + Xn)
//! Y    = (-1, prod_{j=0..n} (X0 + X1 + .. + Xj + j*d/2))
//! ```
//!
//! and every word in them normalizes to a finite sum of parts `(m, P)`.
//! The degree `m` counts invariant units: a part of degree `m` moves the
//! cell index `a` to `a + m*e0` (polynomial degree changes by `m(n+1)`),
//! scaling by `P(a)`.  The scalar polynomial of a homogeneous element,
//! read in the cell coordinates `a0..an`, is its b-function.
//!
//! # Key Operations
//! - `evaluate_word`: tiny expression grammar over `X Y Xinv E` with
//!   juxtaposition products, rational scalars, and `[u,v]` brackets.
//! - `bfunction` / `grade_project`: eigenvalue extraction and grading.
//! - `tau` / `tau_inv`: conjugation by `X`; per part, `X0 -> X0 -| 1`.
//! - `d_ell` / `hq_sequence`: the shifted-operator family
//!   `X^(1-l) Y X^l` and the commutator tower `H1 = [X,Y]`,
//!   `Hq = [X,[Y,H(q-1)]]`.
//! - `is_in_t0` / `is_central`: membership via spectral symmetry and
//!   `a0`-independence.
//! - `decompose_t` / `decompose_t0xy`: expansions over the degree-0
//!   subalgebra with `X`-powers, resp. `Y`- and `X`-powers; failure of
//!   the second detects elements with non-polynomial coefficients.
//!
//! # Design Notes
//! - Words normalize immediately through the skew product; no expression
//!   tree is kept.
//! - Membership tests route through the spectral map: a degree-0 element
//!   belongs to the commutative subalgebra exactly when its b-function,
//!   moved to `r`-coordinates and shifted by `-rho`, is symmetric.
//! - Both decompositions are per-degree and total: each part either
//!   yields a valid degree-0 coefficient or the whole element is
//!   rejected with the offending degree.

use crate::exact_poly::{rat, ratio, ExactPoly, Poly, PolyError, Rat, VarSet};
use crate::pv_catalog::PVType;
use crate::sym_harish::{a_vars, gamma, gamma_inverse, RhoVector, SymError, SymPoly};
use crate::torus_weyl::{x_vars, TorusElement, TorusError};
use rand::Rng;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TeeError {
    #[error("word parse error: {0}")]
    Parse(String),
    #[error("element mixes cell-shift degrees {0:?}")]
    NotHomogeneous(Vec<i64>),
    #[error("degree-{0} coefficient fails the degree-0 membership test")]
    MembershipFailure(i64),
    #[error("no polynomial-coefficient expansion: degree {0} obstructs")]
    NotInT0XY(i64),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Eigenvalue data of a homogeneous operator: on the cell with index
/// `a`, the operator acts as `poly(a)` times the degree-`p` cell shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BFunction {
    p: i64,
    poly: ExactPoly,
}

impl BFunction {
    /// `poly` must live in the `a0..an` cell-coordinate context.
    pub fn new(p: i64, poly: ExactPoly) -> BFunction {
        let n = poly.vars().len() - 1;
        assert_eq!(
            poly.vars().names(),
            a_vars(n).names(),
            "b-functions live in the a0..an context"
        );
        BFunction { p, poly }
    }

    /// Cell-shift degree in invariant units.
    pub fn degree(&self) -> i64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.poly.vars().len() - 1
    }

    pub fn poly(&self) -> &ExactPoly {
        &self.poly
    }

    pub fn eval(&self, a: &[Rat]) -> Result<Rat, PolyError> {
        self.poly.eval(a)
    }
}

impl fmt::Display for BFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "degree {}: {}", self.p, self.poly)
    }
}

/// Rename a polynomial into an equally long variable context, preserving
/// positions.
fn rename(p: &ExactPoly, to: &Arc<VarSet>) -> ExactPoly {
    assert_eq!(p.vars().len(), to.len(), "contexts must have equal length");
    let images: Vec<ExactPoly> = to.names().iter().map(|v| Poly::var(to, v)).collect();
    p.substitute(&images).expect("plain renaming")
}

/// One catalog entry's generators, cached together with the spectral
/// shift vector.  Immutable after construction.
#[derive(Debug, Clone)]
pub struct TeeContext {
    pv: PVType,
    rho: RhoVector,
    x_elt: TorusElement,
    xinv_elt: TorusElement,
    y_elt: TorusElement,
    e_elt: TorusElement,
}

impl TeeContext {
    pub fn new(pv: PVType) -> TeeContext {
        let n = pv.n();
        let vars = x_vars(n);
        let rho = RhoVector::for_pv(&pv);

        let mut b_e = Poly::zero_in(&vars);
        for i in 0..=n {
            let coeff = rat((n + 1 - i) as i64);
            b_e = b_e
                .try_add(&Poly::var(&vars, &format!("X{i}")).scale(&coeff))
                .unwrap();
        }

        let mut b_y = Poly::one_in(&vars);
        let mut partial = Poly::zero_in(&vars);
        for j in 0..=n {
            partial = partial
                .try_add(&Poly::var(&vars, &format!("X{j}")))
                .unwrap();
            let offset = Poly::constant(&vars, pv.d_half() * rat(j as i64));
            b_y = b_y.try_mul(&partial.try_add(&offset).unwrap()).unwrap();
        }

        TeeContext {
            x_elt: TorusElement::part(n, 1, Poly::one_in(&vars)),
            xinv_elt: TorusElement::part(n, -1, Poly::one_in(&vars)),
            y_elt: TorusElement::part(n, -1, b_y),
            e_elt: TorusElement::part(n, 0, b_e),
            pv,
            rho,
        }
    }

    pub fn pv(&self) -> &PVType {
        &self.pv
    }

    pub fn n(&self) -> usize {
        self.pv.n()
    }

    pub fn rho(&self) -> &RhoVector {
        &self.rho
    }

    pub fn x(&self) -> &TorusElement {
        &self.x_elt
    }

    pub fn xinv(&self) -> &TorusElement {
        &self.xinv_elt
    }

    pub fn y(&self) -> &TorusElement {
        &self.y_elt
    }

    pub fn e(&self) -> &TorusElement {
        &self.e_elt
    }

    /// The degree-0 polynomial of `Y` (eigenvalue polynomial in the `X`
    /// context).
    pub fn b_y_poly(&self) -> ExactPoly {
        self.y_elt.part_poly(-1)
    }

    pub fn b_e_poly(&self) -> ExactPoly {
        self.e_elt.part_poly(0)
    }

    /// `X^i` for any integer `i`; negative powers use the inverse.
    pub fn x_power(&self, i: i64) -> TorusElement {
        TorusElement::part(self.n(), i, Poly::one_in(&x_vars(self.n())))
    }

    /// Evaluate a word over the generators.  Grammar: identifiers
    /// `X Y Xinv E`, juxtaposition (optionally `*`) for products,
    /// `+`/`-` for sums, integer or rational (`3/2`) scalars, `[u,v]`
    /// for commutators, parentheses for grouping.
    pub fn evaluate_word(&self, word: &str) -> Result<TorusElement, TeeError> {
        let toks = lex_word(word)?;
        let mut parser = WordParser {
            ctx: self,
            toks,
            pos: 0,
        };
        let out = parser.expr()?;
        if parser.pos != parser.toks.len() {
            return Err(TeeError::Parse(format!(
                "unexpected {} after a complete expression",
                parser.toks[parser.pos]
            )));
        }
        Ok(out)
    }

    /// The degree-`p` component of `u`.
    pub fn grade_project(&self, u: &TorusElement, p: i64) -> TorusElement {
        TorusElement::part(self.n(), p, u.part_poly(p))
    }

    /// Eigenvalue data of a homogeneous element, in cell coordinates.
    /// The zero element reports degree 0 with the zero polynomial.
    pub fn bfunction(&self, u: &TorusElement) -> Result<BFunction, TeeError> {
        let degs = u.degrees();
        match degs.len() {
            0 => Ok(BFunction::new(0, Poly::zero_in(&a_vars(self.n())))),
            1 => Ok(BFunction::new(
                degs[0],
                rename(&u.part_poly(degs[0]), &a_vars(self.n())),
            )),
            _ => Err(TeeError::NotHomogeneous(degs)),
        }
    }

    /// Rebuild the torus element a b-function came from.
    pub fn element_of(&self, b: &BFunction) -> TorusElement {
        assert_eq!(b.n(), self.n(), "rank mismatch");
        TorusElement::part(self.n(), b.degree(), rename(b.poly(), &x_vars(self.n())))
    }

    /// Spectral polynomial of a degree-0 element: b-function moved to
    /// `r`-coordinates and shifted by `-rho`.  Symmetry of the result is
    /// the membership test for the commutative degree-0 subalgebra.
    pub fn gamma_of(&self, u: &TorusElement) -> Result<SymPoly, TeeError> {
        Ok(gamma(&self.bfunction(u)?, &self.rho)?)
    }

    /// Pull a spectral polynomial back to a degree-0 torus element.
    pub fn from_spectral(&self, s: &SymPoly) -> TorusElement {
        self.element_of(&gamma_inverse(s, &self.rho))
    }

    fn shift_all_parts(&self, u: &TorusElement, amount: i64) -> TorusElement {
        TorusElement::from_parts(
            self.n(),
            u.parts()
                .map(|(m, p)| (m, p.shift("X0", &rat(amount)).expect("X0 exists"))),
        )
    }

    /// Conjugation by `X`: per part, `X0 -> X0 - 1`.
    pub fn tau(&self, u: &TorusElement) -> TorusElement {
        self.shift_all_parts(u, -1)
    }

    /// Conjugation by `Xinv`: per part, `X0 -> X0 + 1`.
    pub fn tau_inv(&self, u: &TorusElement) -> TorusElement {
        self.shift_all_parts(u, 1)
    }

    /// The commutator tower `H1 = [X,Y]`, `Hq = [X,[Y,H(q-1)]]`; every
    /// member is homogeneous of degree 0.
    pub fn hq(&self, q: u32) -> TorusElement {
        assert!(q >= 1, "the tower starts at q = 1");
        let mut h = self.x_elt.commutator(&self.y_elt).unwrap();
        for _ in 1..q {
            let inner = self.y_elt.commutator(&h).unwrap();
            h = self.x_elt.commutator(&inner).unwrap();
        }
        h
    }

    /// b-function of the `q`-th tower member.
    pub fn hq_sequence(&self, q: u32) -> BFunction {
        self.bfunction(&self.hq(q))
            .expect("the tower is homogeneous of degree 0")
    }

    /// The shifted operator family `D_l = X^(1-l) Y X^l`, homogeneous of
    /// degree 0; `D_0 = XY`.
    pub fn d_ell(&self, ell: i64) -> TorusElement {
        self.x_power(1 - ell)
            .skew_mul(&self.y_elt)
            .and_then(|u| u.skew_mul(&self.x_power(ell)))
            .expect("matching ranks")
    }

    /// Degree-0 membership: homogeneous of degree 0 with symmetric
    /// spectral polynomial.
    pub fn is_in_t0(&self, u: &TorusElement) -> bool {
        if !u.is_homogeneous_of(0) {
            return false;
        }
        self.gamma_of(u).is_ok()
    }

    /// Central elements: degree-0 members whose polynomial is invariant
    /// under `X0 -> X0 + 1` (equivalently, commuting with `X`; such
    /// elements commute with `Y` automatically).
    pub fn is_central(&self, u: &TorusElement) -> bool {
        if !self.is_in_t0(u) {
            return false;
        }
        let p = u.part_poly(0);
        p.shift("X0", &rat(1)).expect("X0 exists") == p
    }

    /// Expansion `u = sum_i u_i X^i` with every `u_i` in the degree-0
    /// subalgebra; the membership of each coefficient is the test for
    /// `u` lying in the operator algebra at all.
    pub fn decompose_t(&self, u: &TorusElement) -> Result<Vec<(i64, TorusElement)>, TeeError> {
        let mut out = Vec::new();
        for (i, p) in u.parts() {
            let coeff = TorusElement::part(self.n(), 0, p.shift("X0", &rat(-i))?);
            if !self.is_in_t0(&coeff) {
                return Err(TeeError::MembershipFailure(i));
            }
            debug_assert_eq!(
                coeff.skew_mul(&self.x_power(i)).unwrap(),
                TorusElement::part(self.n(), i, p.clone())
            );
            out.push((i, coeff));
        }
        Ok(out)
    }

    /// Re-expand a [`decompose_t`] result: `sum_i u_i X^i`.
    pub fn recompose_t(&self, terms: &[(i64, TorusElement)]) -> TorusElement {
        let mut acc = TorusElement::zero(self.n());
        for (i, u_i) in terms {
            let prod = u_i.skew_mul(&self.x_power(*i)).expect("matching ranks");
            acc = acc.try_add(&prod).expect("matching ranks");
        }
        acc
    }

    /// Expansion over the polynomial-coefficient subalgebra:
    /// `u = sum_{i>0} u_i Y^i + sum_{i>=0} v_i X^i`.  Negative degrees
    /// must divide exactly by the matching `Y`-power; failure certifies
    /// that `u` needs the inverse invariant.
    pub fn decompose_t0xy(&self, u: &TorusElement) -> Result<T0XYDecomposition, TeeError> {
        let mut neg = Vec::new();
        let mut pos = Vec::new();
        for (m, p) in u.parts() {
            if m >= 0 {
                let coeff = TorusElement::part(self.n(), 0, p.shift("X0", &rat(-m))?);
                if !self.is_in_t0(&coeff) {
                    return Err(TeeError::NotInT0XY(m));
                }
                pos.push((m, coeff));
            } else {
                let i = (-m) as u32;
                let divisor = self.y_elt.pow(i).expect("matching ranks").part_poly(m);
                let quotient = p
                    .divide_exact(&divisor)
                    .map_err(|_| TeeError::NotInT0XY(m))?;
                let coeff =
                    TorusElement::part(self.n(), 0, quotient.shift("X0", &rat(-m))?);
                if !self.is_in_t0(&coeff) {
                    return Err(TeeError::NotInT0XY(m));
                }
                neg.push((i, coeff));
            }
        }
        Ok(T0XYDecomposition {
            n: self.n(),
            neg,
            pos,
        })
    }

    /// A reproducible random element of the degree-0 subalgebra: a short
    /// sum of products of `E` and shifted operators `D_l`, with small
    /// rational coefficients.
    pub fn random_t0_element<R: Rng>(&self, rng: &mut R, max_factors: u32) -> TorusElement {
        let mut acc = TorusElement::zero(self.n());
        for _ in 0..rng.gen_range(1..=3) {
            let mut prod = TorusElement::one(self.n());
            for _ in 0..rng.gen_range(0..=max_factors) {
                let factor = if rng.gen_range(0..4) == 0 {
                    self.e_elt.clone()
                } else {
                    self.d_ell(rng.gen_range(-3..=3))
                };
                prod = prod.skew_mul(&factor).unwrap();
            }
            let c = ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4));
            acc = acc.try_add(&prod.scale(&c)).unwrap();
        }
        acc
    }
}

/// Result of [`TeeContext::decompose_t0xy`]: coefficients over the
/// degree-0 subalgebra, `neg` paired with `Y`-powers (`i >= 1`) and
/// `pos` with `X`-powers (`i >= 0`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct T0XYDecomposition {
    n: usize,
    neg: Vec<(u32, TorusElement)>,
    pos: Vec<(i64, TorusElement)>,
}

impl T0XYDecomposition {
    pub fn neg(&self) -> &[(u32, TorusElement)] {
        &self.neg
    }

    pub fn pos(&self) -> &[(i64, TorusElement)] {
        &self.pos
    }

    /// `sum u_i Y^i + sum v_i X^i`; exact inverse of the decomposition.
    pub fn recompose(&self, ctx: &TeeContext) -> TorusElement {
        let mut acc = TorusElement::zero(self.n);
        for (i, u_i) in &self.neg {
            let y_pow = ctx.y().pow(*i).expect("matching ranks");
            acc = acc
                .try_add(&u_i.skew_mul(&y_pow).expect("matching ranks"))
                .expect("matching ranks");
        }
        for (i, v_i) in &self.pos {
            acc = acc
                .try_add(&v_i.skew_mul(&ctx.x_power(*i)).expect("matching ranks"))
                .expect("matching ranks");
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(Rat),
    Plus,
    Minus,
    Star,
    Slash,
    LBracket,
    RBracket,
    Comma,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Num(c) => write!(f, "'{c}'"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::LBracket => write!(f, "'['"),
            Tok::RBracket => write!(f, "']'"),
            Tok::Comma => write!(f, "','"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
        }
    }
}

/// Generator names, longest first so maximal munch picks `Xinv` over `X`.
const GENERATORS: [&str; 4] = ["Xinv", "X", "Y", "E"];

fn lex_word(word: &str) -> Result<Vec<Tok>, TeeError> {
    let chars: Vec<char> = word.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            let run: String = chars[start..i].iter().collect();
            // Split a run like "XY" into generator names by maximal munch.
            let mut rest = run.as_str();
            while !rest.is_empty() {
                let Some(name) = GENERATORS.iter().find(|g| rest.starts_with(**g)) else {
                    return Err(TeeError::Parse(format!(
                        "unknown generator in '{run}' (expected X, Y, Xinv, E)"
                    )));
                };
                toks.push(Tok::Ident(name.to_string()));
                rest = &rest[name.len()..];
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let value: Rat = digits.parse().expect("digit run");
            toks.push(Tok::Num(value));
            continue;
        }
        toks.push(match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => {
                return Err(TeeError::Parse(format!("unexpected character '{other}'")));
            }
        });
        i += 1;
    }
    Ok(toks)
}

struct WordParser<'a> {
    ctx: &'a TeeContext,
    toks: Vec<Tok>,
    pos: usize,
}

impl WordParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next_is(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), TeeError> {
        if self.next_is(&t) {
            Ok(())
        } else {
            Err(TeeError::Parse(match self.peek() {
                Some(found) => format!("expected {t}, found {found}"),
                None => format!("expected {t}, found end of word"),
            }))
        }
    }

    fn expr(&mut self) -> Result<TorusElement, TeeError> {
        let mut acc = TorusElement::zero(self.ctx.n());
        loop {
            let sign = if self.next_is(&Tok::Minus) {
                rat(-1)
            } else {
                self.next_is(&Tok::Plus);
                rat(1)
            };
            let term = self.term()?;
            acc = acc.try_add(&term.scale(&sign))?;
            match self.peek() {
                Some(Tok::Plus) | Some(Tok::Minus) => continue,
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<TorusElement, TeeError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Ident(_)) | Some(Tok::Num(_)) | Some(Tok::LBracket)
                | Some(Tok::LParen) => {
                    let f = self.factor()?;
                    acc = acc.skew_mul(&f)?;
                }
                Some(Tok::Star) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.skew_mul(&f)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<TorusElement, TeeError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(TeeError::Parse("expected a factor, found end of word".into()));
        };
        self.pos += 1;
        match tok {
            Tok::Ident(name) => Ok(match name.as_str() {
                "X" => self.ctx.x_elt.clone(),
                "Xinv" => self.ctx.xinv_elt.clone(),
                "Y" => self.ctx.y_elt.clone(),
                "E" => self.ctx.e_elt.clone(),
                _ => unreachable!("lexer only emits generator names"),
            }),
            Tok::Num(num) => {
                let value = if self.next_is(&Tok::Slash) {
                    match self.peek().cloned() {
                        Some(Tok::Num(den)) if den != rat(0) => {
                            self.pos += 1;
                            num / den
                        }
                        _ => {
                            return Err(TeeError::Parse(
                                "expected a nonzero integer denominator after '/'".into(),
                            ))
                        }
                    }
                } else {
                    num
                };
                Ok(TorusElement::scalar(self.ctx.n(), value))
            }
            Tok::LBracket => {
                let left = self.expr()?;
                self.expect(Tok::Comma)?;
                let right = self.expr()?;
                self.expect(Tok::RBracket)?;
                Ok(left.commutator(&right)?)
            }
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            other => Err(TeeError::Parse(format!("expected a factor, found {other}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pv_catalog::Family;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx_a3() -> TeeContext {
        TeeContext::new(PVType::builtin(Family::A, 3).unwrap())
    }

    fn ctx_quadratic(k: u32) -> TeeContext {
        TeeContext::new(PVType::quadratic(k).unwrap())
    }

    fn xp(n: usize, s: &str) -> ExactPoly {
        Poly::parse(&x_vars(n), s).unwrap()
    }

    fn ap(n: usize, s: &str) -> ExactPoly {
        Poly::parse(&a_vars(n), s).unwrap()
    }

    #[test]
    fn generator_polynomials() {
        // A:3 has n = 2, d/2 = 1.
        let ctx = ctx_a3();
        assert_eq!(ctx.b_e_poly(), xp(2, "3*X0 + 2*X1 + X2"));
        let expected = xp(2, "X0")
            .try_mul(&xp(2, "X0 + X1 + 1"))
            .unwrap()
            .try_mul(&xp(2, "X0 + X1 + X2 + 2"))
            .unwrap();
        assert_eq!(ctx.b_y_poly(), expected);

        // C:2 has n = 1, d = 1, so d/2 = 1/2.
        let ctx = TeeContext::new(PVType::builtin(Family::C, 2).unwrap());
        assert_eq!(
            ctx.b_y_poly(),
            xp(1, "X0").try_mul(&xp(1, "X0 + X1 + 1/2")).unwrap()
        );
    }

    #[test]
    fn word_basic_products() {
        let ctx = ctx_quadratic(4);
        let b_y = ctx.b_y_poly();
        assert_eq!(
            ctx.evaluate_word("XY").unwrap(),
            TorusElement::part(1, 0, b_y.clone())
        );
        assert_eq!(
            ctx.evaluate_word("YX").unwrap(),
            TorusElement::part(1, 0, b_y.shift("X0", &rat(1)).unwrap())
        );
        assert_eq!(ctx.evaluate_word("X Xinv").unwrap(), TorusElement::one(1));
    }

    #[test]
    fn word_brackets_scalars_parens() {
        let ctx = ctx_quadratic(4);
        let yx = ctx.evaluate_word("YX").unwrap();
        let xy = ctx.evaluate_word("XY").unwrap();
        assert_eq!(
            ctx.evaluate_word("[Y,X]").unwrap(),
            yx.try_sub(&xy).unwrap()
        );
        assert_eq!(
            ctx.evaluate_word("2XY - 3E").unwrap(),
            xy.scale(&rat(2)).try_sub(&ctx.e().scale(&rat(3))).unwrap()
        );
        assert_eq!(
            ctx.evaluate_word("1/2 X").unwrap(),
            ctx.x().scale(&ratio(1, 2))
        );
        assert_eq!(ctx.evaluate_word("-E").unwrap(), ctx.e().negate());
        assert_eq!(
            ctx.evaluate_word("(X + E) Y").unwrap(),
            ctx.x()
                .try_add(ctx.e())
                .unwrap()
                .skew_mul(ctx.y())
                .unwrap()
        );
        assert_eq!(ctx.evaluate_word("X*Y").unwrap(), ctx.evaluate_word("XY").unwrap());
    }

    #[test]
    fn word_errors() {
        let ctx = ctx_quadratic(4);
        for bad in ["", "  ", "[X", "X +", "Z", "5/", "5/0", "X/2", "()", "X )"] {
            assert!(
                matches!(ctx.evaluate_word(bad), Err(TeeError::Parse(_))),
                "word {bad:?} should fail to parse"
            );
        }
    }

    #[test]
    fn grade_projection() {
        let ctx = ctx_quadratic(4);
        assert_eq!(ctx.grade_project(ctx.x(), 1), ctx.x().clone());
        assert!(ctx.grade_project(ctx.x(), 0).is_zero());
        let mixed = ctx.evaluate_word("XY + X").unwrap();
        assert_eq!(
            ctx.grade_project(&mixed, 0),
            TorusElement::part(1, 0, ctx.b_y_poly())
        );
    }

    #[test]
    fn bfunction_extraction() {
        let ctx = ctx_a3();
        let b = ctx.bfunction(ctx.y()).unwrap();
        assert_eq!(b.degree(), -1);
        let expected = ap(2, "a0")
            .try_mul(&ap(2, "a0 + a1 + 1"))
            .unwrap()
            .try_mul(&ap(2, "a0 + a1 + a2 + 2"))
            .unwrap();
        assert_eq!(b.poly(), &expected);

        let b_e = ctx.bfunction(ctx.e()).unwrap();
        assert_eq!(b_e.degree(), 0);
        assert_eq!(b_e.poly(), &ap(2, "3*a0 + 2*a1 + a2"));

        let mixed = ctx.x().try_add(ctx.e()).unwrap();
        assert_eq!(
            ctx.bfunction(&mixed),
            Err(TeeError::NotHomogeneous(vec![0, 1]))
        );

        // Round-trip through element_of.
        assert_eq!(ctx.element_of(&b), ctx.y().clone());
    }

    #[test]
    fn tau_is_conjugation_by_x() {
        let ctx = ctx_a3();
        let n_plus_1 = Poly::constant(&x_vars(2), rat(3));
        assert_eq!(
            ctx.tau(ctx.e()),
            TorusElement::part(2, 0, ctx.b_e_poly().try_sub(&n_plus_1).unwrap())
        );
        assert_eq!(ctx.tau(ctx.x()), ctx.x().clone());

        for word in ["Y", "EY", "X + E", "[Y,X] E"] {
            let u = ctx.evaluate_word(word).unwrap();
            let conj = ctx
                .x()
                .skew_mul(&u)
                .unwrap()
                .skew_mul(ctx.xinv())
                .unwrap();
            assert_eq!(ctx.tau(&u), conj, "tau must be conjugation on {word:?}");
            assert_eq!(ctx.tau_inv(&ctx.tau(&u)), u);
        }
    }

    #[test]
    fn quadratic_bracket_is_euler_plus_half_k() {
        for k in [4, 5, 6] {
            let ctx = ctx_quadratic(k);
            let bracket = ctx.evaluate_word("[Y,X]").unwrap();
            let expected = ctx
                .e()
                .try_add(&TorusElement::scalar(1, ratio(k as i64, 2)))
                .unwrap();
            assert_eq!(bracket, expected, "k = {k}");
        }
    }

    #[test]
    fn tower_bfunctions() {
        // H1 = [X,Y] has b-function b_Y(a) - b_Y(a0+1, a~).
        let ctx = ctx_quadratic(4);
        let b1 = ctx.hq_sequence(1);
        assert_eq!(b1.degree(), 0);
        // n = 1, d/2 = 1: -(2a0 + a1 + 1 + 1).
        assert_eq!(b1.poly(), &ap(1, "-2*a0 - a1 - 2"));

        let b_y = ctx.bfunction(ctx.y()).unwrap();
        let shifted = b_y.poly().shift("a0", &rat(1)).unwrap();
        assert_eq!(b1.poly(), &b_y.poly().try_sub(&shifted).unwrap());

        // q = 3 at n = 2: a0-degree (q-1)(n-1) + n = 4.
        let ctx = ctx_a3();
        let b3 = ctx.hq_sequence(3);
        assert_eq!(b3.poly().degree_in("a0").unwrap(), Some(4));
    }

    #[test]
    fn shifted_operator_family() {
        let ctx = ctx_a3();
        for ell in -2..=3 {
            let expected =
                TorusElement::part(2, 0, ctx.b_y_poly().shift("X0", &rat(ell)).unwrap());
            assert_eq!(ctx.d_ell(ell), expected, "ell = {ell}");
        }
        assert_eq!(ctx.d_ell(0), ctx.evaluate_word("XY").unwrap());
    }

    #[test]
    fn x_power_consistency() {
        let ctx = ctx_quadratic(5);
        assert_eq!(ctx.x_power(0), TorusElement::one(1));
        assert_eq!(ctx.x_power(2), ctx.x().pow(2).unwrap());
        assert_eq!(ctx.x_power(-2), ctx.xinv().pow(2).unwrap());
    }

    #[test]
    fn degree_zero_membership() {
        let ctx = ctx_a3();
        assert!(ctx.is_in_t0(&ctx.evaluate_word("XY").unwrap()));
        assert!(ctx.is_in_t0(ctx.e()));
        assert!(ctx.is_in_t0(&TorusElement::zero(2)));
        assert!(!ctx.is_in_t0(ctx.x()));
        // A degree-0 part that is not spectrally symmetric.
        assert!(!ctx.is_in_t0(&TorusElement::part(2, 0, xp(2, "X1"))));
    }

    #[test]
    fn centrality() {
        let ctx = ctx_a3();
        assert!(ctx.is_central(&TorusElement::scalar(2, rat(7))));
        assert!(!ctx.is_central(ctx.e()));
        let shifted_e = ctx.tau_inv(ctx.e()).try_sub(ctx.e()).unwrap();
        assert_eq!(shifted_e, TorusElement::scalar(2, rat(3)));
        assert!(ctx.is_central(&shifted_e));
        // Central elements commute with Y without being asked to.
        assert!(shifted_e.commutator(ctx.y()).unwrap().is_zero());
    }

    #[test]
    fn decompose_full_algebra() {
        let ctx = ctx_a3();
        let x_terms = ctx.decompose_t(ctx.x()).unwrap();
        assert_eq!(x_terms, vec![(1, TorusElement::one(2))]);

        let y_terms = ctx.decompose_t(ctx.y()).unwrap();
        assert_eq!(y_terms.len(), 1);
        assert_eq!(y_terms[0].0, -1);
        assert_eq!(
            y_terms[0].1,
            TorusElement::part(2, 0, ctx.b_y_poly().shift("X0", &rat(1)).unwrap())
        );
        assert_eq!(ctx.recompose_t(&y_terms), ctx.y().clone());

        let mixed = ctx.e().try_add(ctx.x()).unwrap();
        let terms = ctx.decompose_t(&mixed).unwrap();
        assert_eq!(
            terms,
            vec![(0, ctx.e().clone()), (1, TorusElement::one(2))]
        );
        assert_eq!(ctx.recompose_t(&terms), mixed);

        assert_eq!(
            ctx.decompose_t(&TorusElement::part(2, 0, xp(2, "X1"))),
            Err(TeeError::MembershipFailure(0))
        );
    }

    #[test]
    fn decompose_polynomial_part() {
        let ctx = ctx_a3();

        let d = ctx.decompose_t0xy(ctx.y()).unwrap();
        assert_eq!(d.neg(), &[(1, TorusElement::one(2))]);
        assert!(d.pos().is_empty());
        assert_eq!(d.recompose(&ctx), ctx.y().clone());

        let yy = ctx.evaluate_word("YY").unwrap();
        let d = ctx.decompose_t0xy(&yy).unwrap();
        assert_eq!(d.neg(), &[(2, TorusElement::one(2))]);
        assert_eq!(d.recompose(&ctx), yy);

        assert_eq!(
            ctx.decompose_t0xy(ctx.xinv()),
            Err(TeeError::NotInT0XY(-1))
        );

        let mixed = ctx.evaluate_word("E Y Y + X X X + X Y").unwrap();
        let d = ctx.decompose_t0xy(&mixed).unwrap();
        assert_eq!(d.recompose(&ctx), mixed);
        for (_, coeff) in d.neg() {
            assert!(ctx.is_in_t0(coeff));
        }
    }

    #[test]
    fn sampled_elements_stay_degree_zero() {
        let ctx = ctx_quadratic(5);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let u = ctx.random_t0_element(&mut rng, 2);
            assert!(ctx.is_in_t0(&u));
        }
        let a = ctx.random_t0_element(&mut rng, 2);
        let b = ctx.random_t0_element(&mut rng, 2);
        assert!(a.commutator(&b).unwrap().is_zero());
    }

    #[test]
    fn grading_via_euler_commutator() {
        let ctx = ctx_a3();
        let n_plus_1 = rat(3);
        assert_eq!(
            ctx.e().commutator(ctx.x()).unwrap(),
            ctx.x().scale(&n_plus_1)
        );
        assert_eq!(
            ctx.e().commutator(ctx.y()).unwrap(),
            ctx.y().scale(&-n_plus_1)
        );
    }
}
