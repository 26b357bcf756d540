//! The extended Weyl algebra of a one-dimensional torus with polynomial
//! coefficients in `X0..Xn`, the ambient exact model for every operator
//! in the workbench.
//!
//! An element is a finite sum of parts `(m, P)` with `m` an integer and
//! `P` a polynomial in `X0..Xn`.  The part `(m, P)` encodes the operator
//! `t^m P(t d/dt, X1, .., Xn)`: `X0` plays the role of `t d/dt` and the
//! remaining variables are central scalars.  The product is the
//! shift-twisted bilinear extension of
//!
//! ```text
//! (m, P) * (l, Q) = (m + l, P(X0 + l, X~) * Q)
//! ```
//!
//! which is exactly composition of the operators above, so normal forms
//! here decide operator identities.
//!
//! # Key Operations
//! - `skew_mul`, `commutator`: the twisted product and its bracket.
//! - `lemma_word`: the reordering identity for `(t d/dt)^i t^l (t d/dt)^j`,
//!   computed by the engine and checked against the binomial closed form.
//! - `apply_to_cell`: the action on an abstract cell indexed by
//!   `a = (a0..an)`, where a part `(m, P)` sends `a` to `a + m*e0` with
//!   scalar `P(a)`.
//! - `radial_restriction`: the slice `X1 = .. = Xn = 0`, the operator
//!   induced on functions of the invariant alone.

use crate::exact_poly::{c_i64, rat, ExactPoly, Poly, PolyError, Rat, VarSet};
use num_traits::{One, Zero};
use serde_json::json;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorusError {
    #[error("rank mismatch: n = {0} vs n = {1}")]
    RankMismatch(usize, usize),
    #[error("part polynomial: {0}")]
    Part(#[from] PolyError),
    #[error("bad JSON: {0}")]
    Json(String),
}

/// Variable context `X0..Xn` shared by all parts at rank parameter `n`.
pub fn x_vars(n: usize) -> Arc<VarSet> {
    let names: Vec<String> = (0..=n).map(|i| format!("X{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    VarSet::new(&refs)
}

/// Element of the extended torus Weyl algebra at rank parameter `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusElement {
    n: usize,
    parts: BTreeMap<i64, ExactPoly>,
}

impl TorusElement {
    pub fn zero(n: usize) -> Self {
        TorusElement {
            n,
            parts: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        TorusElement::scalar(n, rat(1))
    }

    pub fn scalar(n: usize, c: Rat) -> Self {
        TorusElement::part(n, 0, Poly::constant(&x_vars(n), c))
    }

    /// Single part `(m, p)`; `p` must live in the `X0..Xn` context.
    pub fn part(n: usize, m: i64, p: ExactPoly) -> Self {
        assert_eq!(
            p.vars().names(),
            x_vars(n).names(),
            "part polynomial must use the X0..Xn context"
        );
        let mut parts = BTreeMap::new();
        if !p.is_zero() {
            parts.insert(m, p);
        }
        TorusElement { n, parts }
    }

    pub fn from_parts<I>(n: usize, iter: I) -> Self
    where
        I: IntoIterator<Item = (i64, ExactPoly)>,
    {
        let mut acc = TorusElement::zero(n);
        for (m, p) in iter {
            assert_eq!(
                p.vars().names(),
                x_vars(n).names(),
                "part polynomial must use the X0..Xn context"
            );
            acc.add_part(m, p);
        }
        acc
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// Parts in ascending degree order.
    pub fn parts(&self) -> impl Iterator<Item = (i64, &ExactPoly)> {
        self.parts.iter().map(|(&m, p)| (m, p))
    }

    pub fn part_poly(&self, m: i64) -> ExactPoly {
        self.parts
            .get(&m)
            .cloned()
            .unwrap_or_else(|| Poly::zero_in(&x_vars(self.n)))
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.parts.keys().copied().collect()
    }

    /// True when the element is concentrated in a single degree `m`.
    pub fn is_homogeneous_of(&self, m: i64) -> bool {
        self.parts.keys().all(|&d| d == m)
    }

    fn check_rank(&self, other: &Self) -> Result<(), TorusError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(TorusError::RankMismatch(self.n, other.n))
        }
    }

    fn add_part(&mut self, m: i64, p: ExactPoly) {
        if p.is_zero() {
            return;
        }
        match self.parts.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().try_add(&p).expect("parts share the X context");
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, TorusError> {
        self.check_rank(other)?;
        let mut out = self.clone();
        for (&m, p) in &other.parts {
            out.add_part(m, p.clone());
        }
        Ok(out)
    }

    pub fn negate(&self) -> Self {
        let mut out = self.clone();
        for p in out.parts.values_mut() {
            *p = p.negate();
        }
        out
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, TorusError> {
        self.try_add(&other.negate())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return TorusElement::zero(self.n);
        }
        let mut out = self.clone();
        for p in out.parts.values_mut() {
            *p = p.scale(c);
        }
        out
    }

    /// Shift-twisted product: `(m,P)*(l,Q) = (m+l, P(X0+l, X~) Q)`.
    pub fn skew_mul(&self, other: &Self) -> Result<Self, TorusError> {
        self.check_rank(other)?;
        let mut out = TorusElement::zero(self.n);
        for (&m, p) in &self.parts {
            for (&l, q) in &other.parts {
                let twisted = p.shift("X0", &rat(l))?;
                out.add_part(m + l, twisted.try_mul(q)?);
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self, TorusError> {
        self.skew_mul(other)?.try_sub(&other.skew_mul(self)?)
    }

    pub fn pow(&self, e: u32) -> Result<Self, TorusError> {
        let mut out = TorusElement::one(self.n);
        for _ in 0..e {
            out = out.skew_mul(self)?;
        }
        Ok(out)
    }

    /// Action on the abstract cell `a = (a0..an)`: each part `(m, P)`
    /// contributes the cell `a + m*e0` with scalar `P(a)`; zero scalars
    /// are dropped.  Entries come back in ascending degree order.
    pub fn apply_to_cell(&self, a: &[Rat]) -> Vec<(Vec<Rat>, Rat)> {
        assert_eq!(a.len(), self.n + 1, "cell index has n + 1 coordinates");
        let mut out = Vec::new();
        for (&m, p) in &self.parts {
            let scalar = p.eval(a).expect("non-negative exponents");
            if scalar.is_zero() {
                continue;
            }
            let mut cell = a.to_vec();
            cell[0] = cell[0].clone() + rat(m);
            out.push((cell, scalar));
        }
        out
    }

    /// The slice `X1 = .. = Xn = 0`, returned in the rank-0 context: the
    /// operator induced on functions of the invariant alone.
    pub fn radial_restriction(&self) -> TorusElement {
        let target = x_vars(0);
        let mut out = TorusElement::zero(0);
        for (&m, p) in &self.parts {
            let sliced = Poly::from_terms(
                &target,
                p.terms().filter_map(|(mono, c)| {
                    let e = mono.exps();
                    if e[1..].iter().all(|&x| x == 0) {
                        Some((vec![e[0]], c.clone()))
                    } else {
                        None
                    }
                }),
            );
            out.add_part(m, sliced);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "n": self.n,
            "parts": self
                .parts
                .iter()
                .map(|(m, p)| json!({"m": m, "poly": p.to_string()}))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, TorusError> {
        let bad = |msg: &str| TorusError::Json(msg.to_string());
        let n = v["n"].as_u64().ok_or_else(|| bad("missing n"))? as usize;
        let vars = x_vars(n);
        let mut out = TorusElement::zero(n);
        for entry in v["parts"].as_array().ok_or_else(|| bad("missing parts"))? {
            let m = entry["m"].as_i64().ok_or_else(|| bad("part missing m"))?;
            let text = entry["poly"].as_str().ok_or_else(|| bad("part missing poly"))?;
            let p = Poly::parse(&vars, text).map_err(|e| bad(&e.to_string()))?;
            out.add_part(m, p);
        }
        Ok(out)
    }
}

/// The reordering word `(t d/dt)^i t^l (t d/dt)^j`, computed by the
/// engine in the rank-0 context and checked against the closed form
/// `sum_p binom(i,p) l^(i-p) t^l (t d/dt)^(p+j)`.
pub fn lemma_word(i: u32, l: i64, j: u32) -> TorusElement {
    let vars = x_vars(0);
    let x0 = Poly::var(&vars, "X0");
    let left = TorusElement::part(0, 0, x0.pow(i));
    let mid = TorusElement::part(0, l, Poly::one_in(&vars));
    let right = TorusElement::part(0, 0, x0.pow(j));
    let product = left
        .skew_mul(&mid)
        .and_then(|u| u.skew_mul(&right))
        .expect("rank-0 products");

    let mut closed = Poly::zero_in(&vars);
    let mut binom = Rat::one();
    let mut lpow = Rat::one();
    // Walk p = i down to 0 so l^(i-p) accumulates one factor per step.
    let mut rows: Vec<(u32, Rat)> = Vec::new();
    for p in (0..=i).rev() {
        rows.push((p, binom.clone() * lpow.clone()));
        if p > 0 {
            binom = binom * c_i64::<Rat>(p as i64) / c_i64::<Rat>((i - p + 1) as i64);
            lpow = lpow * rat(l);
        }
    }
    for (p, w) in rows {
        closed = closed.try_add(&x0.pow(p + j).scale(&w)).expect("same context");
    }
    let closed_elt = TorusElement::part(0, l, closed);
    assert_eq!(product, closed_elt, "reordering closed form must agree");
    product
}

impl Add for &TorusElement {
    type Output = TorusElement;
    fn add(self, rhs: Self) -> TorusElement {
        self.try_add(rhs).expect("rank mismatch")
    }
}

impl Sub for &TorusElement {
    type Output = TorusElement;
    fn sub(self, rhs: Self) -> TorusElement {
        self.try_sub(rhs).expect("rank mismatch")
    }
}

impl Mul for &TorusElement {
    type Output = TorusElement;
    fn mul(self, rhs: Self) -> TorusElement {
        self.skew_mul(rhs).expect("rank mismatch")
    }
}

impl Neg for &TorusElement {
    type Output = TorusElement;
    fn neg(self) -> TorusElement {
        self.negate()
    }
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = self
            .parts
            .iter()
            .map(|(m, p)| format!("t^{m} (*) [{p}]"))
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}
