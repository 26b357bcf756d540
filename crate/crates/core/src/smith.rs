//! Generalized Smith algebra S(R,f,n) over a commutative polynomial
//! coefficient ring, and its quotient U(R,u,n) by the Casimir ideal.
//!
//! S(R,f,n) is generated by x, y, e over R subject to [e,x] = (n+1)x,
//! [e,y] = -(n+1)y, [y,x] = f(e).  Elements are kept in PBW normal form
//! x^j y^i e^k with coefficients in R; products run a terminating rewrite
//! on words over {x,y,e} whose normal form is strategy independent.
//! U(R,u,n) replaces the commutation rule by the two identities
//! x y = u(e) and y x = u(e+n+1), which collapse every element to a
//! canonical sum of x-side and y-side monomials with e-polynomial
//! coefficients.
//!
//! # Key Operations
//!
//! - [`SmithContext::smith_mul`] multiplies PBW normal forms through the
//!   word rewrite system; [`SmithContext::normalize_word`] exposes the
//!   rewrite itself with a choice of reduction strategy.
//! - [`solve_u`] inverts the difference equation u(t+n+1) - u(t) = f(t),
//!   normalized to zero constant term.
//! - [`SmithContext::casimir`] builds the central element xy - u(e);
//!   [`SmithContext::casimir_symmetrized`] builds xy + yx - u(e+n+1) - u(e)
//!   independently so their ratio is a checkable fact, not a definition.
//! - [`SmithElement::weight`] splits an element by the letter balance
//!   j - i, the eigenvalue grading of ad(e)/(n+1).
//! - [`UContext::u_mul`] multiplies canonical forms in the quotient;
//!   [`UContext::project`] sends PBW monomials through the u-reduction.
//!
//! # Design Notes
//!
//! The PBW order is fixed as x before y before e, so every rewrite rule
//! orients left to right and the system terminates: a step either lowers
//! the letter-inversion count or shortens the word.  The distinguished
//! polynomial variable is named `t` and always sits last in the extended
//! context `ring + [t]`; f and u live there, and U-coefficients reuse the
//! same context with t standing for e.  Coefficient rings are concrete
//! polynomial rings over the rationals, so all arithmetic stays exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::exact_poly::{rat, ExactPoly, Poly, PolyError, Rat, VarSet};

/// Errors from Smith-algebra construction, parsing, and arithmetic.
#[derive(Debug, Error)]
pub enum SmithError {
    /// Word or expression text that does not parse.
    #[error("parse error: {0}")]
    Parse(String),
    /// Operands built for a different ring, grading integer, or f.
    #[error("operands belong to different Smith contexts")]
    ContextMismatch,
    /// Ring names that collide with the reserved letters x, y, e, t.
    #[error("bad coefficient ring: {0}")]
    BadRing(String),
    /// Underlying polynomial failure.
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// One generator letter of a word over {x, y, e}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Letter {
    X,
    Y,
    E,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::X => write!(f, "x"),
            Letter::Y => write!(f, "y"),
            Letter::E => write!(f, "e"),
        }
    }
}

/// Which misordered adjacent pair a rewrite step picks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

/// Side tag for the canonical form of the quotient algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    X,
    Y,
}

fn letter_rank(l: Letter) -> u8 {
    match l {
        Letter::X => 0,
        Letter::Y => 1,
        Letter::E => 2,
    }
}

/// Extend a ring context by the trailing distinguished variable `t`.
fn extended_vars(ring: &Arc<VarSet>) -> Arc<VarSet> {
    let mut names: Vec<&str> = ring.names().iter().map(String::as_str).collect();
    names.push("t");
    VarSet::new(&names)
}

/// Reinterpret a ring polynomial inside `ring + [t]` (t-exponent zero).
pub fn lift(p: &ExactPoly, extended: &Arc<VarSet>) -> ExactPoly {
    assert_eq!(
        extended.len(),
        p.vars().len() + 1,
        "extended context must add exactly one variable"
    );
    Poly::from_terms(
        extended,
        p.terms().map(|(m, c)| {
            let mut exps = m.exps().to_vec();
            exps.push(0);
            (exps, c.clone())
        }),
    )
}

/// Coefficients of t-powers, lowest first, as ring polynomials.
///
/// The input lives in `ring + [t]`; the output drops the trailing t
/// coordinate.  Zero input yields an empty list.
pub fn t_coefficients(p: &ExactPoly, ring: &Arc<VarSet>) -> Vec<ExactPoly> {
    assert_eq!(
        p.vars().len(),
        ring.len() + 1,
        "input must extend the ring by one variable"
    );
    let deg = match p.degree_in(t_name(p.vars())).expect("t is present") {
        Some(d) => d,
        None => return Vec::new(),
    };
    let mut out = Vec::with_capacity(deg as usize + 1);
    for s in 0..=deg {
        out.push(Poly::from_terms(
            ring,
            p.terms().filter_map(|(m, c)| {
                let exps = m.exps();
                if *exps.last().expect("nonempty exponents") == s as i32 {
                    Some((exps[..exps.len() - 1].to_vec(), c.clone()))
                } else {
                    None
                }
            }),
        ));
    }
    out
}

fn t_name(vars: &Arc<VarSet>) -> &str {
    vars.names().last().expect("context has a trailing variable")
}

/// Solve u(t + n + 1) - u(t) = f(t) for u with zero constant term.
///
/// The argument variable is the last one of f's context.  The solution is
/// unique up to an additive constant; fixing the constant term to zero
/// picks a canonical representative.  Works degree by degree: the top
/// slice c of t^m forces the candidate term c t^(m+1) / ((n+1)(m+1)),
/// whose forward difference cancels that slice exactly.
pub fn solve_u(f: &ExactPoly, n: u32) -> ExactPoly {
    let vars = f.vars();
    assert!(
        vars.laurent_index().is_none(),
        "difference equation needs an ordinary polynomial variable"
    );
    let t = t_name(vars).to_string();
    let tidx = vars.len() - 1;
    let step = rat(n as i64 + 1);
    let mut u = Poly::zero_in(vars);
    let mut rem = f.clone();
    while let Some(m) = rem.degree_in(&t).expect("t is present") {
        // Top slice of t^m, kept in the same context with t cleared.
        let top = Poly::from_terms(
            vars,
            rem.terms().filter_map(|(mono, c)| {
                let exps = mono.exps();
                if exps[tidx] as i64 == m {
                    let mut e = exps.to_vec();
                    e[tidx] = 0;
                    Some((e, c.clone()))
                } else {
                    None
                }
            }),
        );
        let mut exps = vec![0; vars.len()];
        exps[tidx] = (m + 1) as i32;
        let scale = rat(1) / (step.clone() * rat(m + 1));
        let cand = top
            .try_mul(&Poly::monomial(vars, &exps, scale))
            .expect("same context");
        let delta = cand
            .shift(&t, &step)
            .expect("plain variable")
            .try_sub(&cand)
            .expect("same context");
        u = u.try_add(&cand).expect("same context");
        rem = rem.try_sub(&delta).expect("same context");
    }
    u
}

/// The algebra S(R,f,n): ring, grading integer, and commutation datum f.
///
/// Holds the t-power slices of f and the solved u as caches; both are
/// determined by f and n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithContext {
    ring: Arc<VarSet>,
    evars: Arc<VarSet>,
    n: u32,
    f: ExactPoly,
    f_slices: Vec<ExactPoly>,
    u: ExactPoly,
}

impl SmithContext {
    /// Build the context; f must live in `ring + [t]`.
    pub fn new(ring: &Arc<VarSet>, n: u32, f: &ExactPoly) -> Result<SmithContext, SmithError> {
        if ring.laurent_index().is_some() {
            return Err(SmithError::BadRing(
                "coefficient ring must not have a Laurent variable".into(),
            ));
        }
        for name in ring.names() {
            if ["x", "y", "e", "t"].contains(&name.as_str()) {
                return Err(SmithError::BadRing(format!(
                    "ring variable `{name}` collides with a reserved letter"
                )));
            }
        }
        let evars = extended_vars(ring);
        if f.vars() != &evars {
            return Err(SmithError::Poly(PolyError::VarMismatch));
        }
        let f_slices = t_coefficients(f, ring);
        let u = solve_u(f, n);
        Ok(SmithContext {
            ring: ring.clone(),
            evars,
            n,
            f: f.clone(),
            f_slices,
            u,
        })
    }

    /// Convenience constructor parsing f from text.
    pub fn from_text(
        ring_names: &[&str],
        n: u32,
        f_text: &str,
    ) -> Result<SmithContext, SmithError> {
        let ring = VarSet::new(ring_names);
        let evars = extended_vars(&ring);
        let f = Poly::parse(&evars, f_text)?;
        SmithContext::new(&ring, n, &f)
    }

    pub fn ring(&self) -> &Arc<VarSet> {
        &self.ring
    }

    /// The extended context `ring + [t]` where f and u live.
    pub fn poly_vars(&self) -> &Arc<VarSet> {
        &self.evars
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn f(&self) -> &ExactPoly {
        &self.f
    }

    /// The solved u with u(t+n+1) - u(t) = f(t) and zero constant term.
    pub fn u_poly(&self) -> &ExactPoly {
        &self.u
    }

    pub fn zero(&self) -> SmithElement {
        SmithElement::zero(&self.ring)
    }

    pub fn one(&self) -> SmithElement {
        self.monomial(0, 0, 0, &Poly::one_in(&self.ring))
    }

    pub fn x(&self) -> SmithElement {
        self.monomial(1, 0, 0, &Poly::one_in(&self.ring))
    }

    pub fn y(&self) -> SmithElement {
        self.monomial(0, 1, 0, &Poly::one_in(&self.ring))
    }

    pub fn e(&self) -> SmithElement {
        self.monomial(0, 0, 1, &Poly::one_in(&self.ring))
    }

    /// Ring scalar as an element.
    pub fn scalar(&self, c: &ExactPoly) -> SmithElement {
        assert_eq!(c.vars(), &self.ring, "scalar must live in the ring");
        self.monomial(0, 0, 0, c)
    }

    /// A single PBW monomial coeff * x^j y^i e^k (already normal form).
    pub fn monomial(&self, j: u32, i: u32, k: u32, coeff: &ExactPoly) -> SmithElement {
        assert_eq!(coeff.vars(), &self.ring, "coefficient must live in the ring");
        let mut el = SmithElement::zero(&self.ring);
        el.insert((j, i, k), coeff.clone());
        el
    }

    /// p(t) read as p(e): t-power slices become e-powers.
    pub fn from_e_poly(&self, p: &ExactPoly) -> SmithElement {
        assert_eq!(p.vars(), &self.evars, "argument must live in ring + [t]");
        let mut el = SmithElement::zero(&self.ring);
        for (s, slice) in t_coefficients(p, &self.ring).into_iter().enumerate() {
            if !slice.is_zero() {
                el.insert((0, 0, s as u32), slice);
            }
        }
        el
    }

    fn check(&self, a: &SmithElement) -> Result<(), SmithError> {
        if a.ring == self.ring {
            Ok(())
        } else {
            Err(SmithError::ContextMismatch)
        }
    }

    /// Normal form of a single word with coefficient one.
    pub fn normalize_word(&self, word: &[Letter], strategy: Strategy) -> SmithElement {
        self.normalize_items(
            vec![(Poly::one_in(&self.ring), word.to_vec())],
            strategy,
        )
    }

    fn normalize_items(
        &self,
        items: Vec<(ExactPoly, Vec<Letter>)>,
        strategy: Strategy,
    ) -> SmithElement {
        // Frontier keyed by (x+y letter count, inversion count, word).
        // Every rewrite child is strictly smaller under this key, so
        // popping the maximum processes each distinct word exactly once;
        // coefficients of coinciding words merge on insertion.
        let mut frontier: BTreeMap<(usize, usize, Vec<Letter>), ExactPoly> = BTreeMap::new();
        for (coeff, word) in items {
            merge_word(&mut frontier, coeff, word);
        }
        let mut out = SmithElement::zero(&self.ring);
        while let Some(((_, _, word), coeff)) = frontier.pop_last() {
            match find_redex(&word, strategy) {
                None => {
                    // Sorted word: tally letter counts into the PBW key.
                    let j = word.iter().filter(|l| **l == Letter::X).count() as u32;
                    let i = word.iter().filter(|l| **l == Letter::Y).count() as u32;
                    let k = word.iter().filter(|l| **l == Letter::E).count() as u32;
                    out.insert((j, i, k), coeff);
                }
                Some(idx) => {
                    for (c, w) in self.rewrite_at(&coeff, &word, idx) {
                        merge_word(&mut frontier, c, w);
                    }
                }
            }
        }
        out
    }

    /// Expand the redex at `idx` into the rewritten alternatives.
    fn rewrite_at(
        &self,
        coeff: &ExactPoly,
        word: &[Letter],
        idx: usize,
    ) -> Vec<(ExactPoly, Vec<Letter>)> {
        let plus = Poly::constant(&self.ring, rat(self.n as i64 + 1));
        let mut children = Vec::new();
        match (word[idx], word[idx + 1]) {
            (Letter::Y, Letter::X) => {
                // y x = x y + f(e).
                let mut swapped = word.to_vec();
                swapped[idx] = Letter::X;
                swapped[idx + 1] = Letter::Y;
                children.push((coeff.clone(), swapped));
                for (s, fs) in self.f_slices.iter().enumerate() {
                    if fs.is_zero() {
                        continue;
                    }
                    let mut w = Vec::with_capacity(word.len() - 2 + s);
                    w.extend_from_slice(&word[..idx]);
                    w.extend(std::iter::repeat(Letter::E).take(s));
                    w.extend_from_slice(&word[idx + 2..]);
                    children.push((coeff.try_mul(fs).expect("ring context"), w));
                }
            }
            (Letter::E, Letter::X) => {
                // e x = x e + (n+1) x.
                let mut swapped = word.to_vec();
                swapped[idx] = Letter::X;
                swapped[idx + 1] = Letter::E;
                children.push((coeff.clone(), swapped));
                let mut short = word.to_vec();
                short.remove(idx);
                children.push((coeff.try_mul(&plus).expect("ring context"), short));
            }
            (Letter::E, Letter::Y) => {
                // e y = y e - (n+1) y.
                let mut swapped = word.to_vec();
                swapped[idx] = Letter::Y;
                swapped[idx + 1] = Letter::E;
                children.push((coeff.clone(), swapped));
                let mut short = word.to_vec();
                short.remove(idx);
                children.push((coeff.try_mul(&plus.negate()).expect("ring context"), short));
            }
            other => unreachable!("not a redex: {other:?}"),
        }
        children
    }

    /// Product in PBW normal form.
    pub fn smith_mul(
        &self,
        a: &SmithElement,
        b: &SmithElement,
    ) -> Result<SmithElement, SmithError> {
        self.check(a)?;
        self.check(b)?;
        let mut items = Vec::new();
        for ((j1, i1, k1), c1) in a.terms() {
            for ((j2, i2, k2), c2) in b.terms() {
                let mut word =
                    Vec::with_capacity((j1 + i1 + k1 + j2 + i2 + k2) as usize);
                word.extend(std::iter::repeat(Letter::X).take(j1 as usize));
                word.extend(std::iter::repeat(Letter::Y).take(i1 as usize));
                word.extend(std::iter::repeat(Letter::E).take(k1 as usize));
                word.extend(std::iter::repeat(Letter::X).take(j2 as usize));
                word.extend(std::iter::repeat(Letter::Y).take(i2 as usize));
                word.extend(std::iter::repeat(Letter::E).take(k2 as usize));
                items.push((c1.try_mul(c2)?, word));
            }
        }
        Ok(self.normalize_items(items, Strategy::Leftmost))
    }

    /// a b - b a.
    pub fn commutator(
        &self,
        a: &SmithElement,
        b: &SmithElement,
    ) -> Result<SmithElement, SmithError> {
        self.smith_mul(a, b)?.try_sub(&self.smith_mul(b, a)?)
    }

    /// Repeated product; pow(a, 0) is one.
    pub fn pow(&self, a: &SmithElement, e: u32) -> Result<SmithElement, SmithError> {
        let mut out = self.one();
        for _ in 0..e {
            out = self.smith_mul(&out, a)?;
        }
        Ok(out)
    }

    /// The central element xy - u(e) in normal form.
    pub fn casimir(&self) -> SmithElement {
        let xy = self
            .smith_mul(&self.x(), &self.y())
            .expect("same context");
        xy.try_sub(&self.from_e_poly(&self.u))
            .expect("same context")
    }

    /// xy + yx - u(e+n+1) - u(e), built independently of `casimir`.
    pub fn casimir_symmetrized(&self) -> SmithElement {
        let xy = self
            .smith_mul(&self.x(), &self.y())
            .expect("same context");
        let yx = self
            .smith_mul(&self.y(), &self.x())
            .expect("same context");
        let step = rat(self.n as i64 + 1);
        let shifted = self
            .u
            .shift(t_name(&self.evars), &step)
            .expect("plain variable");
        xy.try_add(&yx)
            .expect("same context")
            .try_sub(&self.from_e_poly(&shifted))
            .expect("same context")
            .try_sub(&self.from_e_poly(&self.u))
            .expect("same context")
    }

    /// Parse an expression over x, y, e, ring variables, and rationals.
    ///
    /// Grammar: sums and differences of products; juxtaposition or `*`
    /// multiplies; `[a,b]` is a commutator; parentheses group; integer
    /// literals may carry a `/denominator`.
    pub fn parse_word(&self, text: &str) -> Result<SmithElement, SmithError> {
        let toks = lex_smith(text, &self.ring)?;
        let mut parser = SmithParser {
            ctx: self,
            toks,
            pos: 0,
        };
        let el = parser.expr()?;
        if parser.pos != parser.toks.len() {
            return Err(SmithError::Parse(format!(
                "trailing input at token {}",
                parser.pos
            )));
        }
        Ok(el)
    }
}

fn find_redex(word: &[Letter], strategy: Strategy) -> Option<usize> {
    let misordered = |i: usize| letter_rank(word[i]) > letter_rank(word[i + 1]);
    let last = word.len().checked_sub(1)?;
    match strategy {
        Strategy::Leftmost => (0..last).find(|&i| misordered(i)),
        Strategy::Rightmost => (0..last).rev().find(|&i| misordered(i)),
    }
}

/// Key under which every rewrite child is strictly smaller: a swap keeps
/// the letters and lowers the inversion count, dropping an e keeps x+y
/// and removes at least one inversion, and an f-slice removes an x and
/// a y.
fn frontier_key(word: Vec<Letter>) -> (usize, usize, Vec<Letter>) {
    let xy = word
        .iter()
        .filter(|l| matches!(l, Letter::X | Letter::Y))
        .count();
    let mut inversions = 0;
    for i in 0..word.len() {
        for j in (i + 1)..word.len() {
            if letter_rank(word[i]) > letter_rank(word[j]) {
                inversions += 1;
            }
        }
    }
    (xy, inversions, word)
}

fn merge_word(
    frontier: &mut BTreeMap<(usize, usize, Vec<Letter>), ExactPoly>,
    coeff: ExactPoly,
    word: Vec<Letter>,
) {
    if coeff.is_zero() {
        return;
    }
    match frontier.entry(frontier_key(word)) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(coeff);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = e.get().try_add(&coeff).expect("same ring");
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

/// Element of S(R,f,n) in PBW normal form.
///
/// Keys (j, i, k) stand for x^j y^i e^k; coefficients are nonzero ring
/// polynomials.  Zero is the empty map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithElement {
    ring: Arc<VarSet>,
    terms: BTreeMap<(u32, u32, u32), ExactPoly>,
}

impl SmithElement {
    pub fn zero(ring: &Arc<VarSet>) -> SmithElement {
        SmithElement {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn ring(&self) -> &Arc<VarSet> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending key order.
    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32, u32), &ExactPoly)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    /// Coefficient of x^j y^i e^k (zero if absent).
    pub fn coefficient(&self, j: u32, i: u32, k: u32) -> ExactPoly {
        self.terms
            .get(&(j, i, k))
            .cloned()
            .unwrap_or_else(|| Poly::zero_in(&self.ring))
    }

    fn insert(&mut self, key: (u32, u32, u32), coeff: ExactPoly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().try_add(&coeff).expect("same ring");
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn try_add(&self, other: &SmithElement) -> Result<SmithElement, SmithError> {
        if self.ring != other.ring {
            return Err(SmithError::ContextMismatch);
        }
        let mut out = self.clone();
        for (key, coeff) in other.terms() {
            out.insert(key, coeff.clone());
        }
        Ok(out)
    }

    pub fn negate(&self) -> SmithElement {
        SmithElement {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, v.negate()))
                .collect(),
        }
    }

    pub fn try_sub(&self, other: &SmithElement) -> Result<SmithElement, SmithError> {
        self.try_add(&other.negate())
    }

    /// Multiply every coefficient by a rational scalar.
    pub fn scale(&self, c: &Rat) -> SmithElement {
        let mut out = SmithElement::zero(&self.ring);
        for (key, coeff) in self.terms() {
            out.insert(key, coeff.scale(c));
        }
        out
    }

    /// Multiply every coefficient by a ring polynomial.
    pub fn scale_poly(&self, p: &ExactPoly) -> SmithElement {
        assert_eq!(p.vars(), &self.ring, "scalar must live in the ring");
        let mut out = SmithElement::zero(&self.ring);
        for (key, coeff) in self.terms() {
            out.insert(key, coeff.try_mul(p).expect("same ring"));
        }
        out
    }

    /// Split by the letter balance nu = j - i; ad(e) acts on the nu
    /// component as multiplication by nu(n+1).
    pub fn weight(&self) -> BTreeMap<i64, SmithElement> {
        let mut out: BTreeMap<i64, SmithElement> = BTreeMap::new();
        for ((j, i, k), coeff) in self.terms() {
            let nu = j as i64 - i as i64;
            out.entry(nu)
                .or_insert_with(|| SmithElement::zero(&self.ring))
                .insert((j, i, k), coeff.clone());
        }
        out
    }
}

impl Add for &SmithElement {
    type Output = SmithElement;
    fn add(self, rhs: Self) -> SmithElement {
        self.try_add(rhs).expect("same Smith context")
    }
}

impl Sub for &SmithElement {
    type Output = SmithElement;
    fn sub(self, rhs: Self) -> SmithElement {
        self.try_sub(rhs).expect("same Smith context")
    }
}

impl Neg for &SmithElement {
    type Output = SmithElement;
    fn neg(self) -> SmithElement {
        self.negate()
    }
}

impl fmt::Display for SmithElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((j, i, k), coeff) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono = pbw_mono_string(j, i, k);
            if mono.is_empty() {
                write!(f, "({coeff})")?;
            } else if coeff.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "({coeff})*{mono}")?;
            }
        }
        Ok(())
    }
}

fn pbw_mono_string(j: u32, i: u32, k: u32) -> String {
    let mut parts = Vec::new();
    for (letter, p) in [("x", j), ("y", i), ("e", k)] {
        match p {
            0 => {}
            1 => parts.push(letter.to_string()),
            _ => parts.push(format!("{letter}^{p}")),
        }
    }
    parts.join("*")
}

/// The quotient algebra U(R,u,n) with x y = u(e), y x = u(e+n+1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UContext {
    ring: Arc<VarSet>,
    evars: Arc<VarSet>,
    n: u32,
    u: ExactPoly,
}

impl UContext {
    /// Build the context; u must live in `ring + [t]`.
    pub fn new(ring: &Arc<VarSet>, n: u32, u: &ExactPoly) -> Result<UContext, SmithError> {
        if ring.laurent_index().is_some() {
            return Err(SmithError::BadRing(
                "coefficient ring must not have a Laurent variable".into(),
            ));
        }
        for name in ring.names() {
            if ["x", "y", "e", "t"].contains(&name.as_str()) {
                return Err(SmithError::BadRing(format!(
                    "ring variable `{name}` collides with a reserved letter"
                )));
            }
        }
        let evars = extended_vars(ring);
        if u.vars() != &evars {
            return Err(SmithError::Poly(PolyError::VarMismatch));
        }
        Ok(UContext {
            ring: ring.clone(),
            evars,
            n,
            u: u.clone(),
        })
    }

    /// The quotient of the given Smith algebra by its Casimir ideal.
    pub fn from_smith(sctx: &SmithContext) -> UContext {
        UContext {
            ring: sctx.ring.clone(),
            evars: sctx.evars.clone(),
            n: sctx.n,
            u: sctx.u.clone(),
        }
    }

    pub fn ring(&self) -> &Arc<VarSet> {
        &self.ring
    }

    pub fn poly_vars(&self) -> &Arc<VarSet> {
        &self.evars
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn u_poly(&self) -> &ExactPoly {
        &self.u
    }

    /// The commutation datum recovered from u: u(t+n+1) - u(t).
    pub fn f_poly(&self) -> ExactPoly {
        let step = rat(self.n as i64 + 1);
        self.u
            .shift(t_name(&self.evars), &step)
            .expect("plain variable")
            .try_sub(&self.u)
            .expect("same context")
    }

    pub fn zero(&self) -> UElement {
        UElement::zero(&self.evars)
    }

    pub fn one(&self) -> UElement {
        self.monomial_x(0, &Poly::one_in(&self.evars))
    }

    pub fn x(&self) -> UElement {
        self.monomial_x(1, &Poly::one_in(&self.evars))
    }

    pub fn y(&self) -> UElement {
        self.monomial_y(1, &Poly::one_in(&self.evars))
    }

    pub fn e(&self) -> UElement {
        self.monomial_x(0, &Poly::var(&self.evars, "t"))
    }

    /// p(t) read as the e-polynomial p(e).
    pub fn from_e_poly(&self, p: &ExactPoly) -> UElement {
        self.monomial_x(0, p)
    }

    /// Ring scalar as an element.
    pub fn scalar(&self, c: &ExactPoly) -> UElement {
        assert_eq!(c.vars(), &self.ring, "scalar must live in the ring");
        self.monomial_x(0, &lift(c, &self.evars))
    }

    /// x^m times an e-polynomial coefficient (canonical by construction).
    pub fn monomial_x(&self, m: u32, p: &ExactPoly) -> UElement {
        assert_eq!(p.vars(), &self.evars, "coefficient must live in ring + [t]");
        let mut el = UElement::zero(&self.evars);
        el.add_x(m, p.clone());
        el
    }

    /// y^l (l >= 1) times an e-polynomial coefficient.
    pub fn monomial_y(&self, l: u32, p: &ExactPoly) -> UElement {
        assert!(l >= 1, "y-side power must be positive");
        assert_eq!(p.vars(), &self.evars, "coefficient must live in ring + [t]");
        let mut el = UElement::zero(&self.evars);
        el.add_y(l, p.clone());
        el
    }

    fn check(&self, a: &UElement) -> Result<(), SmithError> {
        if a.evars == self.evars {
            Ok(())
        } else {
            Err(SmithError::ContextMismatch)
        }
    }

    fn shift_amount(&self, count: i64) -> Rat {
        rat(count * (self.n as i64 + 1))
    }

    /// Product reduced to the canonical two-sided form.
    ///
    /// Mixed letter blocks collapse through x y = u(e) and
    /// y x = u(e+n+1): x^m y^l and y^l x^m leave a pure block times a
    /// product of shifted copies of u.
    pub fn u_mul(&self, a: &UElement, b: &UElement) -> Result<UElement, SmithError> {
        self.check(a)?;
        self.check(b)?;
        let t = t_name(&self.evars);
        let mut out = UElement::zero(&self.evars);
        for (&m1, p1) in &a.x_terms {
            for (&m2, p2) in &b.x_terms {
                // x^m1 p1(e) x^m2 p2(e) = x^(m1+m2) p1(e + m2(n+1)) p2(e).
                let shifted = p1.shift(t, &self.shift_amount(m2 as i64))?;
                out.add_x(m1 + m2, shifted.try_mul(p2)?);
            }
            for (&l, q) in &b.y_terms {
                // x^m1 p1(e) y^l q(e) = x^m1 y^l p1(e - l(n+1)) q(e), then
                // x^m1 y^l collapses to min(m1,l) shifted u-factors.
                let mut epoly = p1
                    .shift(t, &self.shift_amount(-(l as i64)))?
                    .try_mul(q)?;
                let r = m1.min(l);
                for s in (l - r)..l {
                    let factor = self.u.shift(t, &self.shift_amount(-(s as i64)))?;
                    epoly = epoly.try_mul(&factor)?;
                }
                if m1 >= l {
                    out.add_x(m1 - l, epoly);
                } else {
                    out.add_y(l - m1, epoly);
                }
            }
        }
        for (&l1, q1) in &a.y_terms {
            for (&m, p) in &b.x_terms {
                // y^l1 q1(e) x^m p(e) = y^l1 x^m q1(e + m(n+1)) p(e), then
                // y^l1 x^m collapses to min(l1,m) shifted u-factors.
                let mut epoly = q1.shift(t, &self.shift_amount(m as i64))?.try_mul(p)?;
                let r = l1.min(m);
                for s in (m - r + 1)..=m {
                    let factor = self.u.shift(t, &self.shift_amount(s as i64))?;
                    epoly = epoly.try_mul(&factor)?;
                }
                if l1 >= m {
                    out.add_y(l1 - m, epoly);
                } else {
                    out.add_x(m - l1, epoly);
                }
            }
            for (&l2, q2) in &b.y_terms {
                // y^l1 q1(e) y^l2 q2(e) = y^(l1+l2) q1(e - l2(n+1)) q2(e).
                let shifted = q1.shift(t, &self.shift_amount(-(l2 as i64)))?;
                out.add_y(l1 + l2, shifted.try_mul(q2)?);
            }
        }
        Ok(out)
    }

    /// Repeated product; pow(a, 0) is one.
    pub fn pow(&self, a: &UElement, e: u32) -> Result<UElement, SmithError> {
        let mut out = self.one();
        for _ in 0..e {
            out = self.u_mul(&out, a)?;
        }
        Ok(out)
    }

    /// Canonical image of a PBW normal form under the quotient map.
    ///
    /// Requires matching ring and n, and that the Smith f equals
    /// u(t+n+1) - u(t).
    pub fn project(
        &self,
        sctx: &SmithContext,
        a: &SmithElement,
    ) -> Result<UElement, SmithError> {
        if sctx.ring != self.ring || sctx.n != self.n || sctx.f != self.f_poly() {
            return Err(SmithError::ContextMismatch);
        }
        let t = Poly::var(&self.evars, "t");
        let mut out = self.zero();
        for ((j, i, k), coeff) in a.terms() {
            let xs = self.monomial_x(j, &Poly::one_in(&self.evars));
            let term = if i > 0 {
                self.u_mul(&xs, &self.monomial_y(i, &Poly::one_in(&self.evars)))?
            } else {
                xs
            };
            let term = self.u_mul(&term, &self.from_e_poly(&t.pow(k)))?;
            let term = self.u_mul(&self.scalar(coeff), &term)?;
            out = out.try_add(&term)?;
        }
        Ok(out)
    }

    /// Canonical forms of x^s P(e) for the given P are pairwise distinct
    /// and nonzero; the products are computed, not assembled.
    pub fn injectivity_probe(&self, s: u32, ps: &[ExactPoly]) -> Result<bool, SmithError> {
        let xs = self.pow(&self.x(), s)?;
        let mut seen: Vec<UElement> = Vec::with_capacity(ps.len());
        for p in ps {
            let el = self.u_mul(&xs, &self.from_e_poly(p))?;
            if el.is_zero() || seen.contains(&el) {
                return Ok(false);
            }
            seen.push(el);
        }
        Ok(true)
    }
}

/// Element of U(R,u,n) in canonical form: a sum of x^m p(e) and
/// y^l q(e) terms with l >= 1; pure e-polynomials sit on the x side at
/// power zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UElement {
    evars: Arc<VarSet>,
    x_terms: BTreeMap<u32, ExactPoly>,
    y_terms: BTreeMap<u32, ExactPoly>,
}

impl UElement {
    pub fn zero(evars: &Arc<VarSet>) -> UElement {
        UElement {
            evars: evars.clone(),
            x_terms: BTreeMap::new(),
            y_terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.x_terms.is_empty() && self.y_terms.is_empty()
    }

    /// x-side terms (power, e-polynomial coefficient), ascending.
    pub fn x_side(&self) -> impl Iterator<Item = (u32, &ExactPoly)> {
        self.x_terms.iter().map(|(k, v)| (*k, v))
    }

    /// y-side terms (power >= 1, e-polynomial coefficient), ascending.
    pub fn y_side(&self) -> impl Iterator<Item = (u32, &ExactPoly)> {
        self.y_terms.iter().map(|(k, v)| (*k, v))
    }

    /// Flattened view keyed by side, letter power, and e-power, with
    /// coefficients projected down to the ring.
    pub fn canonical_terms(&self, ring: &Arc<VarSet>) -> Vec<(Side, u32, u32, ExactPoly)> {
        let mut out = Vec::new();
        for (side, map) in [(Side::X, &self.x_terms), (Side::Y, &self.y_terms)] {
            for (&power, p) in map {
                for (s, slice) in t_coefficients(p, ring).into_iter().enumerate() {
                    if !slice.is_zero() {
                        out.push((side, power, s as u32, slice));
                    }
                }
            }
        }
        out
    }

    fn add_x(&mut self, m: u32, p: ExactPoly) {
        if p.is_zero() {
            return;
        }
        match self.x_terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().try_add(&p).expect("same context");
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn add_y(&mut self, l: u32, p: ExactPoly) {
        if l == 0 {
            // A fully collapsed y block is a pure e-polynomial.
            self.add_x(0, p);
            return;
        }
        if p.is_zero() {
            return;
        }
        match self.y_terms.entry(l) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().try_add(&p).expect("same context");
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn try_add(&self, other: &UElement) -> Result<UElement, SmithError> {
        if self.evars != other.evars {
            return Err(SmithError::ContextMismatch);
        }
        let mut out = self.clone();
        for (&m, p) in &other.x_terms {
            out.add_x(m, p.clone());
        }
        for (&l, q) in &other.y_terms {
            out.add_y(l, q.clone());
        }
        Ok(out)
    }

    pub fn negate(&self) -> UElement {
        UElement {
            evars: self.evars.clone(),
            x_terms: self
                .x_terms
                .iter()
                .map(|(k, v)| (*k, v.negate()))
                .collect(),
            y_terms: self
                .y_terms
                .iter()
                .map(|(k, v)| (*k, v.negate()))
                .collect(),
        }
    }

    pub fn try_sub(&self, other: &UElement) -> Result<UElement, SmithError> {
        self.try_add(&other.negate())
    }

    pub fn scale(&self, c: &Rat) -> UElement {
        let mut out = UElement::zero(&self.evars);
        for (&m, p) in &self.x_terms {
            out.add_x(m, p.scale(c));
        }
        for (&l, q) in &self.y_terms {
            out.add_y(l, q.scale(c));
        }
        out
    }
}

impl Add for &UElement {
    type Output = UElement;
    fn add(self, rhs: Self) -> UElement {
        self.try_add(rhs).expect("same quotient context")
    }
}

impl Sub for &UElement {
    type Output = UElement;
    fn sub(self, rhs: Self) -> UElement {
        self.try_sub(rhs).expect("same quotient context")
    }
}

impl Neg for &UElement {
    type Output = UElement;
    fn neg(self) -> UElement {
        self.negate()
    }
}

impl fmt::Display for UElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Render coefficients with the trailing variable shown as e.
        let mut names: Vec<&str> = self
            .evars
            .names()
            .iter()
            .take(self.evars.len() - 1)
            .map(String::as_str)
            .collect();
        names.push("e");
        let display_vars = VarSet::new(&names);
        let shown = |p: &ExactPoly| -> ExactPoly {
            Poly::from_terms(
                &display_vars,
                p.terms().map(|(m, c)| (m.exps().to_vec(), c.clone())),
            )
        };
        let mut first = true;
        for (side, map) in [("x", &self.x_terms), ("y", &self.y_terms)] {
            for (&power, p) in map {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                let coeff = shown(p);
                if power == 0 {
                    write!(f, "({coeff})")?;
                } else if power == 1 {
                    write!(f, "{side}*({coeff})")?;
                } else {
                    write!(f, "{side}^{power}*({coeff})")?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum STok {
    Name(String),
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

/// Split text into tokens; alphanumeric runs are munched greedily over
/// the generator letters and the ring variable names, longest first.
fn lex_smith(text: &str, ring: &Arc<VarSet>) -> Result<Vec<STok>, SmithError> {
    let mut names: Vec<String> = ring.names().to_vec();
    names.extend(["x".to_string(), "y".to_string(), "e".to_string()]);
    names.sort_by_key(|s| std::cmp::Reverse(s.len()));
    let chars: Vec<char> = text.chars().collect();
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
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let run: String = chars[start..i].iter().collect();
            let mut rest = run.as_str();
            while !rest.is_empty() {
                let Some(name) = names.iter().find(|n| rest.starts_with(n.as_str())) else {
                    return Err(SmithError::Parse(format!(
                        "unknown name in `{run}` (expected x, y, e, or a ring variable)"
                    )));
                };
                toks.push(STok::Name(name.clone()));
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
            let value: i64 = digits
                .parse()
                .map_err(|_| SmithError::Parse(format!("integer out of range: {digits}")))?;
            toks.push(STok::Num(rat(value)));
            continue;
        }
        let tok = match c {
            '+' => STok::Plus,
            '-' => STok::Minus,
            '*' => STok::Star,
            '/' => STok::Slash,
            '[' => STok::LBracket,
            ']' => STok::RBracket,
            ',' => STok::Comma,
            '(' => STok::LParen,
            ')' => STok::RParen,
            other => {
                return Err(SmithError::Parse(format!("unexpected character `{other}`")));
            }
        };
        toks.push(tok);
        i += 1;
    }
    Ok(toks)
}

struct SmithParser<'a> {
    ctx: &'a SmithContext,
    toks: Vec<STok>,
    pos: usize,
}

impl SmithParser<'_> {
    fn peek(&self) -> Option<&STok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<STok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &STok) -> Result<(), SmithError> {
        match self.next() {
            Some(ref t) if t == want => Ok(()),
            other => Err(SmithError::Parse(format!(
                "expected {want:?}, found {other:?}"
            ))),
        }
    }

    fn expr(&mut self) -> Result<SmithElement, SmithError> {
        let mut negate = false;
        if let Some(STok::Minus) = self.peek() {
            self.pos += 1;
            negate = true;
        } else if let Some(STok::Plus) = self.peek() {
            self.pos += 1;
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.negate();
        }
        loop {
            match self.peek() {
                Some(STok::Plus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.try_add(&t)?;
                }
                Some(STok::Minus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.try_sub(&t)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<SmithElement, SmithError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(STok::Star) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = self.ctx.smith_mul(&acc, &f)?;
                }
                Some(STok::Name(_)) | Some(STok::Num(_)) | Some(STok::LBracket)
                | Some(STok::LParen) => {
                    let f = self.factor()?;
                    acc = self.ctx.smith_mul(&acc, &f)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SmithElement, SmithError> {
        match self.next() {
            Some(STok::Name(name)) => match name.as_str() {
                "x" => Ok(self.ctx.x()),
                "y" => Ok(self.ctx.y()),
                "e" => Ok(self.ctx.e()),
                other => Ok(self
                    .ctx
                    .scalar(&Poly::var(&self.ctx.ring, other))),
            },
            Some(STok::Num(value)) => {
                let mut value = value;
                if let Some(STok::Slash) = self.peek() {
                    self.pos += 1;
                    match self.next() {
                        Some(STok::Num(den)) => {
                            if den == rat(0) {
                                return Err(SmithError::Parse(
                                    "division by zero".into(),
                                ));
                            }
                            value = value / den;
                        }
                        other => {
                            return Err(SmithError::Parse(format!(
                                "expected denominator, found {other:?}"
                            )));
                        }
                    }
                }
                Ok(self
                    .ctx
                    .scalar(&Poly::constant(&self.ctx.ring, value)))
            }
            Some(STok::LBracket) => {
                let a = self.expr()?;
                self.expect(&STok::Comma)?;
                let b = self.expr()?;
                self.expect(&STok::RBracket)?;
                self.ctx.commutator(&a, &b)
            }
            Some(STok::LParen) => {
                let inner = self.expr()?;
                self.expect(&STok::RParen)?;
                Ok(inner)
            }
            other => Err(SmithError::Parse(format!(
                "expected a factor, found {other:?}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx_with_c(n: u32, f_text: &str) -> SmithContext {
        SmithContext::from_text(&["c"], n, f_text).expect("valid context")
    }

    fn epoly(ctx: &SmithContext, text: &str) -> ExactPoly {
        Poly::parse(ctx.poly_vars(), text).expect("valid polynomial")
    }

    fn ring_poly(ctx: &SmithContext, text: &str) -> ExactPoly {
        Poly::parse(ctx.ring(), text).expect("valid polynomial")
    }

    #[test]
    fn yx_normalizes_to_xy_plus_f() {
        let ctx = ctx_with_c(1, "t^2 + c");
        let got = ctx.smith_mul(&ctx.y(), &ctx.x()).unwrap();
        let mut want = ctx.monomial(1, 1, 0, &ring_poly(&ctx, "1"));
        want = want
            .try_add(&ctx.monomial(0, 0, 2, &ring_poly(&ctx, "1")))
            .unwrap();
        want = want.try_add(&ctx.monomial(0, 0, 0, &ring_poly(&ctx, "c"))).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn ex_normalizes_with_grading_shift() {
        let ctx = ctx_with_c(1, "t^2 + c");
        let got = ctx.smith_mul(&ctx.e(), &ctx.x()).unwrap();
        let want = ctx
            .monomial(1, 0, 1, &ring_poly(&ctx, "1"))
            .try_add(&ctx.monomial(1, 0, 0, &ring_poly(&ctx, "2")))
            .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn ey_normalizes_with_negative_shift() {
        let ctx = ctx_with_c(1, "t^2 + c");
        let got = ctx.smith_mul(&ctx.e(), &ctx.y()).unwrap();
        let want = ctx
            .monomial(0, 1, 1, &ring_poly(&ctx, "1"))
            .try_add(&ctx.monomial(0, 1, 0, &ring_poly(&ctx, "-2")))
            .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn poly_in_e_slides_past_x() {
        let ctx = ctx_with_c(2, "t^2 + c*t");
        let p = ctx.from_e_poly(&epoly(&ctx, "t^2 + 3*t"));
        let shifted = ctx.from_e_poly(
            &epoly(&ctx, "t^2 + 3*t").shift("t", &rat(3)).unwrap(),
        );
        let left = ctx.smith_mul(&p, &ctx.x()).unwrap();
        let right = ctx.smith_mul(&ctx.x(), &shifted).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn solve_u_matches_known_closed_forms() {
        let one_var = VarSet::new(&["t"]);
        let f = Poly::parse(&one_var, "t").unwrap();
        let u = solve_u(&f, 0);
        assert_eq!(u, Poly::parse(&one_var, "1/2*t^2 - 1/2*t").unwrap());

        let cring = VarSet::new(&["c", "t"]);
        let fc = Poly::parse(&cring, "c").unwrap();
        let uc = solve_u(&fc, 2);
        assert_eq!(uc, Poly::parse(&cring, "1/3*c*t").unwrap());

        let zero = Poly::zero_in(&one_var);
        assert!(solve_u(&zero, 1).is_zero());
    }

    #[test]
    fn solve_u_round_trips_and_kills_constant_term() {
        let vars = VarSet::new(&["c", "t"]);
        let f = Poly::parse(&vars, "2*t^3 - c*t + 5").unwrap();
        for n in [0u32, 1, 2] {
            let u = solve_u(&f, n);
            let step = rat(n as i64 + 1);
            let delta = u.shift("t", &step).unwrap().try_sub(&u).unwrap();
            assert_eq!(delta, f);
            assert_eq!(u.coeff(&[0, 0]), rat(0));
        }
    }

    #[test]
    fn casimir_commutes_with_generators() {
        let ctx = ctx_with_c(1, "t^2 + c");
        let omega = ctx.casimir();
        for g in [ctx.x(), ctx.y(), ctx.e()] {
            assert!(ctx.commutator(&omega, &g).unwrap().is_zero());
        }
    }

    #[test]
    fn symmetrized_casimir_is_twice_the_casimir() {
        for (n, f_text) in [(0, "t"), (1, "t^2 + c"), (2, "t^3 - c*t + 1")] {
            let ctx = ctx_with_c(n, f_text);
            let omega = ctx.casimir();
            let sym = ctx.casimir_symmetrized();
            assert_eq!(sym, omega.scale(&rat(2)));
        }
    }

    #[test]
    fn weight_splits_by_letter_balance() {
        let ctx = ctx_with_c(1, "t^2 + c");
        assert_eq!(ctx.x().weight().keys().copied().collect::<Vec<_>>(), vec![1]);
        let xy = ctx.smith_mul(&ctx.x(), &ctx.y()).unwrap();
        assert_eq!(xy.weight().keys().copied().collect::<Vec<_>>(), vec![0]);
        let xxy_e = ctx
            .smith_mul(
                &ctx.smith_mul(&ctx.pow(&ctx.x(), 2).unwrap(), &ctx.y()).unwrap(),
                &ctx.e(),
            )
            .unwrap();
        assert_eq!(
            xxy_e.weight().keys().copied().collect::<Vec<_>>(),
            vec![1]
        );
    }

    #[test]
    fn ad_e_reads_the_weight() {
        let ctx = ctx_with_c(1, "t^2 + c");
        // Mixed element with components at several weights.
        let a = ctx
            .parse_word("x x y + 3 e y + c x e")
            .unwrap();
        for (nu, comp) in a.weight() {
            let ad = ctx.commutator(&ctx.e(), &comp).unwrap();
            assert_eq!(ad, comp.scale(&rat(nu * 2)));
        }
    }

    #[test]
    fn u_product_rules_match_the_presentation() {
        let ctx = ctx_with_c(1, "t^2 + c");
        let q = UContext::from_smith(&ctx);
        let xy = q.u_mul(&q.x(), &q.y()).unwrap();
        assert_eq!(xy, q.from_e_poly(q.u_poly()));
        let yx = q.u_mul(&q.y(), &q.x()).unwrap();
        let shifted = q.u_poly().shift("t", &rat(2)).unwrap();
        assert_eq!(yx, q.from_e_poly(&shifted));
    }

    #[test]
    fn u_reduction_is_order_independent() {
        let ctx = ctx_with_c(1, "t^2 + c");
        let q = UContext::from_smith(&ctx);
        let x2 = q.pow(&q.x(), 2).unwrap();
        let y2 = q.pow(&q.y(), 2).unwrap();
        let a = q.u_mul(&x2, &y2).unwrap();
        let xy = q.u_mul(&q.x(), &q.y()).unwrap();
        let b = q
            .u_mul(&q.u_mul(&q.x(), &xy).unwrap(), &q.y())
            .unwrap();
        assert_eq!(a, b);
        // Closed form: u(e) u(e - (n+1)).
        let down = q.u_poly().shift("t", &rat(-2)).unwrap();
        let want = q.from_e_poly(&q.u_poly().try_mul(&down).unwrap());
        assert_eq!(a, want);
    }

    #[test]
    fn probes_yield_distinct_canonical_forms() {
        let ctx = ctx_with_c(0, "t");
        let q = UContext::from_smith(&ctx);
        let t = Poly::var(q.poly_vars(), "t");
        let probe0 = q.u_mul(&q.one(), &q.from_e_poly(&t)).unwrap();
        assert_eq!(probe0, q.monomial_x(0, &t));
        let probe2 = q
            .u_mul(&q.pow(&q.x(), 2).unwrap(), &q.one())
            .unwrap();
        assert_eq!(probe2, q.monomial_x(2, &Poly::one_in(q.poly_vars())));
        let ps: Vec<ExactPoly> = (1..=5)
            .map(|d| t.pow(d).try_add(&Poly::constant(q.poly_vars(), rat(d as i64))).unwrap())
            .collect();
        assert!(q.injectivity_probe(2, &ps).unwrap());
    }

    #[test]
    fn projection_sends_the_casimir_to_zero() {
        for (n, f_text) in [(0, "t"), (1, "t^2 + c"), (2, "t^3 - c*t + 1")] {
            let ctx = ctx_with_c(n, f_text);
            let q = UContext::from_smith(&ctx);
            let image = q.project(&ctx, &ctx.casimir()).unwrap();
            assert!(image.is_zero());
        }
    }

    #[test]
    fn projection_is_multiplicative_on_a_pair() {
        let ctx = ctx_with_c(1, "t^2 + c");
        let q = UContext::from_smith(&ctx);
        let a = ctx.parse_word("y e + c x").unwrap();
        let b = ctx.parse_word("x y - 2 e").unwrap();
        let lhs = q.project(&ctx, &ctx.smith_mul(&a, &b).unwrap()).unwrap();
        let rhs = q
            .u_mul(&q.project(&ctx, &a).unwrap(), &q.project(&ctx, &b).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn parser_matches_constructed_products() {
        let ctx = ctx_with_c(1, "t^2 + c");
        let parsed = ctx.parse_word("y x").unwrap();
        assert_eq!(parsed, ctx.smith_mul(&ctx.y(), &ctx.x()).unwrap());
        let bracket = ctx.parse_word("[y, x]").unwrap();
        assert_eq!(bracket, ctx.from_e_poly(ctx.f()));
        let graded = ctx.parse_word("e x - x e - 2x").unwrap();
        assert!(graded.is_zero());
        let mixed = ctx.parse_word("c*e + 1/2").unwrap();
        let want = ctx
            .monomial(0, 0, 1, &ring_poly(&ctx, "c"))
            .try_add(&ctx.monomial(0, 0, 0, &ring_poly(&ctx, "1/2")))
            .unwrap();
        assert_eq!(mixed, want);
    }

    #[test]
    fn strategies_agree_on_a_mixed_word() {
        let ctx = ctx_with_c(1, "t^2 + c");
        let word = [
            Letter::E,
            Letter::E,
            Letter::Y,
            Letter::X,
            Letter::E,
            Letter::X,
        ];
        let left = ctx.normalize_word(&word, Strategy::Leftmost);
        let right = ctx.normalize_word(&word, Strategy::Rightmost);
        assert_eq!(left, right);
        assert!(!left.is_zero());
    }

    #[test]
    fn pbw_monomial_is_a_fixed_point() {
        let ctx = ctx_with_c(1, "t^2 + c");
        let word = [Letter::X, Letter::Y, Letter::E];
        let nf = ctx.normalize_word(&word, Strategy::Leftmost);
        assert_eq!(nf, ctx.monomial(1, 1, 1, &ring_poly(&ctx, "1")));
    }

    #[test]
    fn rational_coefficient_ring_works() {
        let ctx = SmithContext::from_text(&[], 0, "t").unwrap();
        let yx = ctx.smith_mul(&ctx.y(), &ctx.x()).unwrap();
        let want = ctx
            .monomial(1, 1, 0, &Poly::one_in(ctx.ring()))
            .try_add(&ctx.monomial(0, 0, 1, &Poly::one_in(ctx.ring())))
            .unwrap();
        assert_eq!(yx, want);
    }

    #[test]
    fn context_rejects_reserved_ring_names() {
        assert!(matches!(
            SmithContext::from_text(&["t"], 0, "t"),
            Err(SmithError::BadRing(_))
        ));
        assert!(matches!(
            SmithContext::from_text(&["x"], 0, "t"),
            Err(SmithError::BadRing(_))
        ));
    }
}
