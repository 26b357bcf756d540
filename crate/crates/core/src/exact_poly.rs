//! Exact rational scalars and sparse multivariate polynomials.
//!
//! # Key Operations
//! - Ring arithmetic (`try_add`, `try_mul`, operator sugar on references).
//! - `shift`: substitute `var ↦ var + c`, expanded exactly.
//! - `divide_exact`: exact single-divisor division under graded-lex order,
//!   with `NotDivisible` as a first-class outcome.
//! - `substitute`: evaluate at a vector of polynomial images.
//! - Canonical text rendering and a parser for the same grammar.
//!
//! # Design Notes
//! - Coefficients are generic over [`Scalar`]; the workbench instantiates
//!   everything at [`Rat`] so every comparison is exact.
//! - A variable set may flag at most one variable as Laurent (exponents of
//!   either sign); division factors the Laurent variable out first so the
//!   reduction loop runs over ordinary monomials.
//! - Monomials are ordered graded-lexicographically in the declared
//!   variable order, which fixes the leading term, the division behavior,
//!   and the rendering order.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};
use std::str::FromStr;
use std::sync::Arc;
use thiserror::Error;

/// Exact rational, always reduced, denominator positive.  Values that fit
/// machine words stay there; arithmetic promotes to arbitrary precision
/// only on overflow and demotes on the way back, so the representation is
/// canonical and derived equality is value equality.
#[derive(Clone, PartialEq, Eq)]
pub struct Rat(Repr);

#[derive(Clone, PartialEq, Eq)]
enum Repr {
    /// Numerator and positive denominator, coprime.
    Small(i64, i64),
    /// Reduced and sign-normalized, and outside the small range.
    Big(Box<BigRational>),
}

impl Rat {
    /// Canonical value of `n/d` from wide intermediates; `d` must be
    /// nonzero.  Products of two word-sized values cannot overflow here.
    fn small(n: i128, d: i128) -> Rat {
        assert!(d != 0, "denominator is zero");
        let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
        if n == 0 {
            return Rat(Repr::Small(0, 1));
        }
        let g = n.abs().gcd(&d);
        let (n, d) = (n / g, d / g);
        if n >= i64::MIN as i128 && n <= i64::MAX as i128 && d <= i64::MAX as i128 {
            Rat(Repr::Small(n as i64, d as i64))
        } else {
            Rat(Repr::Big(Box::new(BigRational::new_raw(
                n.into(),
                d.into(),
            ))))
        }
    }

    /// Demote a canonical big value when it fits machine words.
    fn from_big(r: BigRational) -> Rat {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            return Rat(Repr::Small(n, d));
        }
        Rat(Repr::Big(Box::new(r)))
    }

    fn big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw((*n).into(), (*d).into()),
            Repr::Big(b) => (**b).clone(),
        }
    }

    /// Integer part, rounded toward zero.
    fn trunc(&self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => Rat(Repr::Small(n / d, 1)),
            Repr::Big(b) => Rat::from_big(b.trunc()),
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = num_rational::ParseRatioError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<BigRational>().map(Rat::from_big)
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        if let (Repr::Small(an, ad), Repr::Small(bn, bd)) = (&self.0, &rhs.0) {
            let (an, ad) = (*an as i128, *ad as i128);
            let (bn, bd) = (*bn as i128, *bd as i128);
            if let Some(num) = (an * bd).checked_add(bn * ad) {
                return Rat::small(num, ad * bd);
            }
        }
        Rat::from_big(self.big() + rhs.big())
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, rhs: Rat) -> Rat {
        self + (-rhs)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match self.0 {
            Repr::Small(n, d) => Rat::small(-(n as i128), d as i128),
            Repr::Big(b) => Rat::from_big(-*b),
        }
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        if let (Repr::Small(an, ad), Repr::Small(bn, bd)) = (&self.0, &rhs.0) {
            let (an, ad) = (*an as i128, *ad as i128);
            let (bn, bd) = (*bn as i128, *bd as i128);
            let g1 = an.abs().gcd(&bd);
            let g2 = bn.abs().gcd(&ad);
            return Rat::small((an / g1) * (bn / g2), (ad / g2) * (bd / g1));
        }
        Rat::from_big(self.big() * rhs.big())
    }
}

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        if let (Repr::Small(an, ad), Repr::Small(bn, bd)) = (&self.0, &rhs.0) {
            assert!(*bn != 0, "division by zero");
            let (an, ad) = (*an as i128, *ad as i128);
            let (bn, bd) = (*bn as i128, *bd as i128);
            let g1 = an.abs().gcd(&bn.abs());
            let g2 = ad.abs().gcd(&bd.abs());
            return Rat::small((an / g1) * (bd / g2), (ad / g2) * (bn / g1));
        }
        Rat::from_big(self.big() / rhs.big())
    }
}

impl Rem for Rat {
    type Output = Rat;
    fn rem(self, rhs: Rat) -> Rat {
        let q = (self.clone() / rhs.clone()).trunc();
        self - q * rhs
    }
}

impl std::ops::AddAssign for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        *self = std::mem::replace(self, Rat::zero()) + rhs;
    }
}

impl std::ops::SubAssign for Rat {
    fn sub_assign(&mut self, rhs: Rat) {
        *self = std::mem::replace(self, Rat::zero()) - rhs;
    }
}

impl std::ops::MulAssign for Rat {
    fn mul_assign(&mut self, rhs: Rat) {
        *self = std::mem::replace(self, Rat::zero()) * rhs;
    }
}

impl std::ops::DivAssign for Rat {
    fn div_assign(&mut self, rhs: Rat) {
        *self = std::mem::replace(self, Rat::zero()) / rhs;
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for Rat {
    fn product<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::one(), |a, b| a * b)
    }
}

impl Zero for Rat {
    fn zero() -> Rat {
        Rat(Repr::Small(0, 1))
    }
    fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }
}

impl One for Rat {
    fn one() -> Rat {
        Rat(Repr::Small(1, 1))
    }
    fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        if let (Repr::Small(an, ad), Repr::Small(bn, bd)) = (&self.0, &other.0) {
            let lhs = *an as i128 * *bd as i128;
            let rhs = *bn as i128 * *ad as i128;
            return lhs.cmp(&rhs);
        }
        self.big().cmp(&other.big())
    }
}

impl num_traits::Num for Rat {
    type FromStrRadixErr = num_rational::ParseRatioError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        BigRational::from_str_radix(s, radix).map(Rat::from_big)
    }
}

impl Signed for Rat {
    fn abs(&self) -> Rat {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn abs_sub(&self, other: &Rat) -> Rat {
        if self <= other {
            Rat::zero()
        } else {
            self.clone() - other.clone()
        }
    }
    fn signum(&self) -> Rat {
        match &self.0 {
            Repr::Small(0, _) => Rat::zero(),
            Repr::Small(n, _) => Rat(Repr::Small(n.signum(), 1)),
            Repr::Big(b) => Rat::from_big(b.signum()),
        }
    }
    fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }
    fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }
}

impl FromPrimitive for Rat {
    fn from_i64(n: i64) -> Option<Rat> {
        Some(Rat(Repr::Small(n, 1)))
    }
    fn from_u64(n: u64) -> Option<Rat> {
        Some(Rat::small(n as i128, 1))
    }
    fn from_f64(f: f64) -> Option<Rat> {
        BigRational::from_float(f).map(Rat::from_big)
    }
}

/// The concrete polynomial type used throughout the workbench.
pub type ExactPoly = Poly<Rat>;

/// `n` as an exact rational.
pub fn rat(n: i64) -> Rat {
    Rat(Repr::Small(n, 1))
}

/// `n/d` as an exact rational.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::small(n as i128, d as i128)
}

/// Coefficient scalars: a field with exact (or at least closed) arithmetic.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Signed
    + FromPrimitive
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Div<Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + fmt::Display
        + Zero
        + One
        + Signed
        + FromPrimitive
        + Neg<Output = Self>
        + Sub<Output = Self>
        + Div<Output = Self>
{
}

/// Small integer embedded into the scalar type.
pub(crate) fn c_i64<C: Scalar>(n: i64) -> C {
    C::from_i64(n).expect("small integer embeds into any Scalar")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable contexts differ")]
    VarMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVar(String),
    #[error("cannot shift Laurent variable `{0}`")]
    LaurentShift(String),
    #[error("division by the zero polynomial")]
    DivideByZero,
    #[error("not divisible")]
    NotDivisible,
    #[error("substitution requires non-negative exponents")]
    LaurentSubstitution,
    #[error("evaluation would invert zero")]
    EvalAtPole,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Ordered variable names, at most one flagged Laurent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarSet {
    names: Vec<String>,
    laurent: Option<usize>,
}

impl VarSet {
    /// Ordinary (non-Laurent) variables in the given order.
    pub fn new(names: &[&str]) -> Arc<VarSet> {
        Arc::new(VarSet {
            names: names.iter().map(|s| s.to_string()).collect(),
            laurent: None,
        })
    }

    /// Variables with one of them allowed negative exponents.
    pub fn with_laurent(names: &[&str], laurent: &str) -> Arc<VarSet> {
        let idx = names
            .iter()
            .position(|s| *s == laurent)
            .expect("Laurent variable must be among the names");
        Arc::new(VarSet {
            names: names.iter().map(|s| s.to_string()).collect(),
            laurent: Some(idx),
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|s| s == name)
    }

    pub fn laurent_index(&self) -> Option<usize> {
        self.laurent
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.names.join(", "))
    }
}

/// Exponent vector ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mono(Vec<i32>);

impl Mono {
    pub fn exps(&self) -> &[i32] {
        &self.0
    }

    fn total_degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.0.len(), other.0.len());
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial: finite map from monomials to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly<C> {
    vars: Arc<VarSet>,
    terms: BTreeMap<Mono, C>,
}

impl<C: Scalar> Poly<C> {
    pub fn zero_in(vars: &Arc<VarSet>) -> Self {
        Poly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Arc<VarSet>, c: C) -> Self {
        let mut p = Poly::zero_in(vars);
        if !c.is_zero() {
            p.terms.insert(Mono(vec![0; vars.len()]), c);
        }
        p
    }

    pub fn one_in(vars: &Arc<VarSet>) -> Self {
        Poly::constant(vars, C::one())
    }

    /// The named variable as a polynomial; panics on an unknown name.
    pub fn var(vars: &Arc<VarSet>, name: &str) -> Self {
        let idx = vars
            .index_of(name)
            .unwrap_or_else(|| panic!("unknown variable `{name}` in {vars}"));
        let mut exps = vec![0; vars.len()];
        exps[idx] = 1;
        Poly::monomial(vars, &exps, C::one())
    }

    /// Single term; exponents must respect the Laurent flag.
    pub fn monomial(vars: &Arc<VarSet>, exps: &[i32], coeff: C) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length mismatch");
        for (i, &e) in exps.iter().enumerate() {
            assert!(
                e >= 0 || vars.laurent_index() == Some(i),
                "negative exponent on non-Laurent variable `{}`",
                vars.names()[i]
            );
        }
        let mut p = Poly::zero_in(vars);
        if !coeff.is_zero() {
            p.terms.insert(Mono(exps.to_vec()), coeff);
        }
        p
    }

    /// Sum of `(exponents, coefficient)` terms; merges duplicates, drops zeros.
    pub fn from_terms<I>(vars: &Arc<VarSet>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i32>, C)>,
    {
        let mut p = Poly::zero_in(vars);
        for (exps, c) in terms {
            p.add_term(Mono(exps), c);
        }
        p
    }

    fn add_term(&mut self, m: Mono, c: C) {
        debug_assert_eq!(m.0.len(), self.vars.len());
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(m, c)| m.is_unit() && c.clone() == C::one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &C)> {
        self.terms.iter()
    }

    /// Leading (greatest) term under the monomial order; `None` for zero.
    pub fn leading(&self) -> Option<(&Mono, &C)> {
        self.terms.iter().next_back()
    }

    /// Coefficient of the given exponent vector (zero if absent).
    pub fn coeff(&self, exps: &[i32]) -> C {
        self.terms
            .get(&Mono(exps.to_vec()))
            .cloned()
            .unwrap_or_else(C::zero)
    }

    /// The constant term.
    pub fn constant_term(&self) -> C {
        self.coeff(&vec![0; self.vars.len()])
    }

    /// True when the polynomial is a constant (including zero).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Mono::is_unit)
    }

    fn check_same_vars(&self, other: &Self) -> Result<(), PolyError> {
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            Ok(())
        } else {
            Err(PolyError::VarMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_same_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.try_add(&other.negate())
    }

    pub fn negate(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_same_vars(other)?;
        let mut out = Poly::zero_in(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let exps: Vec<i32> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.add_term(Mono(exps), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Poly::zero_in(&self.vars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.clone() * c.clone();
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Poly::one_in(&self.vars);
        for _ in 0..e {
            out = out.try_mul(self).expect("same context");
        }
        out
    }

    /// Substitute `var ↦ var + c`, expanded exactly via the binomial row.
    pub fn shift(&self, var: &str, c: &C) -> Result<Self, PolyError> {
        let idx = self
            .vars
            .index_of(var)
            .ok_or_else(|| PolyError::UnknownVar(var.to_string()))?;
        if self.vars.laurent_index() == Some(idx) {
            return Err(PolyError::LaurentShift(var.to_string()));
        }
        if c.is_zero() {
            return Ok(self.clone());
        }
        let mut out = Poly::zero_in(&self.vars);
        for (m, coeff) in &self.terms {
            let e = m.0[idx];
            // (var + c)^e expanded with binomials built by the exact
            // multiplicative recurrence b_{p+1} = b_p (e-p)/(p+1).
            let mut binom = C::one();
            let mut cpow = C::one();
            let mut row: Vec<(i32, C)> = Vec::with_capacity(e as usize + 1);
            for p in (0..=e).rev() {
                row.push((p, binom.clone() * cpow.clone()));
                if p > 0 {
                    binom = binom * c_i64::<C>(p as i64)
                        / c_i64::<C>((e - p + 1) as i64);
                    cpow = cpow * c.clone();
                }
            }
            for (p, w) in row {
                let mut exps = m.0.clone();
                exps[idx] = p;
                out.add_term(Mono(exps), coeff.clone() * w);
            }
        }
        Ok(out)
    }

    /// Partial derivative in `var` (Laurent exponents differentiate too).
    pub fn derivative(&self, var: &str) -> Result<Self, PolyError> {
        let idx = self
            .vars
            .index_of(var)
            .ok_or_else(|| PolyError::UnknownVar(var.to_string()))?;
        let mut out = Poly::zero_in(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[idx] = e - 1;
            out.add_term(Mono(exps), c.clone() * c_i64::<C>(e as i64));
        }
        Ok(out)
    }

    /// Max exponent of `var`; `None` is the degree of the zero polynomial.
    pub fn degree_in(&self, var: &str) -> Result<Option<i64>, PolyError> {
        let idx = self
            .vars
            .index_of(var)
            .ok_or_else(|| PolyError::UnknownVar(var.to_string()))?;
        Ok(self.terms.keys().map(|m| m.0[idx] as i64).max())
    }

    /// Total degree; `None` for zero.
    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(Mono::total_degree).max()
    }

    /// Factor out the minimal Laurent exponent so all exponents are >= 0.
    fn laurent_normalize(&self) -> (i32, Self) {
        let Some(li) = self.vars.laurent_index() else {
            return (0, self.clone());
        };
        let Some(min) = self.terms.keys().map(|m| m.0[li]).min() else {
            return (0, self.clone());
        };
        if min == 0 {
            return (0, self.clone());
        }
        let mut out = Poly::zero_in(&self.vars);
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            exps[li] -= min;
            out.terms.insert(Mono(exps), c.clone());
        }
        (min, out)
    }

    /// Exact quotient `self / divisor`, or `NotDivisible`.
    ///
    /// Leading-term reduction under the graded-lex order; the Laurent
    /// variable (a unit) is factored out of both operands first.
    pub fn divide_exact(&self, divisor: &Self) -> Result<Self, PolyError> {
        self.check_same_vars(divisor)?;
        if divisor.is_zero() {
            return Err(PolyError::DivideByZero);
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let (sp, p) = self.laurent_normalize();
        let (sq, q) = divisor.laurent_normalize();
        let (qm, qc) = q.leading().expect("divisor is nonzero");
        let (qm, qc) = (qm.clone(), qc.clone());
        let mut rem = p;
        let mut quot = Poly::zero_in(&self.vars);
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading().expect("remainder is nonzero");
                (m.clone(), c.clone())
            };
            let mut exps = Vec::with_capacity(rm.0.len());
            for (a, b) in rm.0.iter().zip(&qm.0) {
                if a < b {
                    return Err(PolyError::NotDivisible);
                }
                exps.push(a - b);
            }
            let t = Poly::monomial(&self.vars, &exps, rc / qc.clone());
            rem = rem.try_sub(&t.try_mul(&q)?)?;
            quot = quot.try_add(&t)?;
        }
        if sp != sq {
            let li = self.vars.laurent_index().expect("Laurent shift is nonzero");
            let mut exps = vec![0; self.vars.len()];
            exps[li] = sp - sq;
            quot = quot.try_mul(&Poly::monomial(&self.vars, &exps, C::one()))?;
        }
        Ok(quot)
    }

    /// Evaluate at a point, one scalar per variable.
    pub fn eval(&self, point: &[C]) -> Result<C, PolyError> {
        assert_eq!(point.len(), self.vars.len(), "point length mismatch");
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = point[i].clone();
                if e < 0 && base.is_zero() {
                    return Err(PolyError::EvalAtPole);
                }
                let mut pw = C::one();
                for _ in 0..e.unsigned_abs() {
                    pw = pw * base.clone();
                }
                if e < 0 {
                    pw = C::one() / pw;
                }
                term = term * pw;
            }
            acc = acc + term;
        }
        Ok(acc)
    }

    /// Evaluate at a vector of polynomial images, one per variable.
    ///
    /// All images must share one variable context; the source must have no
    /// negative exponents.
    pub fn substitute(&self, images: &[Poly<C>]) -> Result<Poly<C>, PolyError> {
        assert_eq!(images.len(), self.vars.len(), "one image per variable");
        let target = images
            .first()
            .map(|p| p.vars.clone())
            .unwrap_or_else(|| VarSet::new(&[]));
        for im in images {
            if !(Arc::ptr_eq(&im.vars, &target) || im.vars == target) {
                return Err(PolyError::VarMismatch);
            }
        }
        for m in self.terms.keys() {
            if m.0.iter().any(|&e| e < 0) {
                return Err(PolyError::LaurentSubstitution);
            }
        }
        let entries: Vec<(&Mono, &C)> = self.terms.iter().collect();
        Ok(substitute_level(&entries, 0, images, &target))
    }

    /// Parse the canonical rendering, e.g. `3/2*X0^2*X1 - 1` or `t^-1`.
    pub fn parse(vars: &Arc<VarSet>, input: &str) -> Result<Self, PolyError>
    where
        C: FromStr,
    {
        parse_poly(vars, input)
    }
}

/// Horner evaluation over one variable at a time: group the monomials by
/// the exponent at `depth`, recurse on the tail, and fold the groups in
/// descending exponent order so each step multiplies by a small power of
/// the image instead of rebuilding `image^e` per monomial.
fn substitute_level<C: Scalar>(
    entries: &[(&Mono, &C)],
    depth: usize,
    images: &[Poly<C>],
    target: &Arc<VarSet>,
) -> Poly<C> {
    if entries.is_empty() {
        return Poly::zero_in(target);
    }
    if depth == images.len() {
        // Exponents are exhausted, so at most one monomial remains.
        let mut acc = Poly::zero_in(target);
        for (_, c) in entries {
            acc = acc
                .try_add(&Poly::constant(target, (*c).clone()))
                .expect("same context");
        }
        return acc;
    }
    let mut groups: BTreeMap<i32, Vec<(&Mono, &C)>> = BTreeMap::new();
    for &(m, c) in entries {
        groups.entry(m.0[depth]).or_default().push((m, c));
    }
    let mut acc = Poly::zero_in(target);
    let mut prev: Option<i32> = None;
    for (&e, group) in groups.iter().rev() {
        if let Some(p) = prev {
            acc = acc
                .try_mul(&images[depth].pow((p - e) as u32))
                .expect("same context");
        }
        acc = acc
            .try_add(&substitute_level(group, depth + 1, images, target))
            .expect("same context");
        prev = Some(e);
    }
    if let Some(p) = prev {
        if p > 0 {
            acc = acc
                .try_mul(&images[depth].pow(p as u32))
                .expect("same context");
        }
    }
    acc
}

impl<C: Scalar> Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: Self) -> Poly<C> {
        self.try_add(rhs).expect("variable contexts differ")
    }
}

impl<C: Scalar> Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: Self) -> Poly<C> {
        self.try_sub(rhs).expect("variable contexts differ")
    }
}

impl<C: Scalar> Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: Self) -> Poly<C> {
        self.try_mul(rhs).expect("variable contexts differ")
    }
}

impl<C: Scalar> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        self.negate()
    }
}

impl<C: Scalar> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Terms in descending monomial order, signs pulled out of the
        // coefficients: "3/2*X0^2*X1 - 1".
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || m.is_unit() {
                factors.push(format!("{mag}"));
            }
            for (idx, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = &self.vars.names()[idx];
                if e == 1 {
                    factors.push(name.clone());
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Parser for the canonical grammar.

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Star,
    Caret,
    Plus,
    Minus,
}

fn lex(input: &str) -> Result<Vec<Tok>, PolyError> {
    let mut toks = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(&ch) = chars.peek() {
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '*' => {
                chars.next();
                toks.push(Tok::Star);
            }
            '^' => {
                chars.next();
                toks.push(Tok::Caret);
            }
            '+' => {
                chars.next();
                toks.push(Tok::Plus);
            }
            '-' => {
                chars.next();
                toks.push(Tok::Minus);
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() || c == '/' || c == '.' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(Tok::Num(s));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(Tok::Ident(s));
            }
            c => return Err(PolyError::Parse(format!("unexpected character `{c}`"))),
        }
    }
    Ok(toks)
}

fn parse_poly<C>(vars: &Arc<VarSet>, input: &str) -> Result<Poly<C>, PolyError>
where
    C: Scalar + FromStr,
{
    let toks = lex(input)?;
    let mut pos = 0;
    let mut acc = Poly::zero_in(vars);
    while pos < toks.len() {
        let mut sign = false;
        while pos < toks.len() {
            match toks[pos] {
                Tok::Plus => pos += 1,
                Tok::Minus => {
                    sign = !sign;
                    pos += 1;
                }
                _ => break,
            }
        }
        if pos >= toks.len() {
            return Err(PolyError::Parse("dangling sign".into()));
        }
        let term = parse_term(vars, &toks, &mut pos)?;
        acc = acc.try_add(&if sign { term.negate() } else { term })?;
        if pos < toks.len() && !matches!(toks[pos], Tok::Plus | Tok::Minus) {
            return Err(PolyError::Parse("expected `+` or `-` between terms".into()));
        }
    }
    Ok(acc)
}

fn parse_term<C>(vars: &Arc<VarSet>, toks: &[Tok], pos: &mut usize) -> Result<Poly<C>, PolyError>
where
    C: Scalar + FromStr,
{
    let mut acc = Poly::one_in(vars);
    loop {
        let factor = parse_factor(vars, toks, pos)?;
        acc = acc.try_mul(&factor)?;
        if *pos < toks.len() && toks[*pos] == Tok::Star {
            *pos += 1;
        } else {
            return Ok(acc);
        }
    }
}

fn parse_factor<C>(vars: &Arc<VarSet>, toks: &[Tok], pos: &mut usize) -> Result<Poly<C>, PolyError>
where
    C: Scalar + FromStr,
{
    match toks.get(*pos) {
        Some(Tok::Num(s)) => {
            *pos += 1;
            let c = C::from_str(s)
                .map_err(|_| PolyError::Parse(format!("bad numeric literal `{s}`")))?;
            Ok(Poly::constant(vars, c))
        }
        Some(Tok::Ident(name)) => {
            *pos += 1;
            let idx = vars
                .index_of(name)
                .ok_or_else(|| PolyError::UnknownVar(name.clone()))?;
            let mut exp: i32 = 1;
            if toks.get(*pos) == Some(&Tok::Caret) {
                *pos += 1;
                let mut neg = false;
                if toks.get(*pos) == Some(&Tok::Minus) {
                    neg = true;
                    *pos += 1;
                }
                match toks.get(*pos) {
                    Some(Tok::Num(s)) => {
                        *pos += 1;
                        let e: i32 = s
                            .parse()
                            .map_err(|_| PolyError::Parse(format!("bad exponent `{s}`")))?;
                        exp = if neg { -e } else { e };
                    }
                    _ => return Err(PolyError::Parse("expected exponent after `^`".into())),
                }
            }
            if exp < 0 && vars.laurent_index() != Some(idx) {
                return Err(PolyError::Parse(format!(
                    "negative exponent on non-Laurent variable `{name}`"
                )));
            }
            let mut exps = vec![0; vars.len()];
            exps[idx] = exp;
            Ok(Poly::monomial(vars, &exps, C::one()))
        }
        _ => Err(PolyError::Parse("expected a number or variable".into())),
    }
}
