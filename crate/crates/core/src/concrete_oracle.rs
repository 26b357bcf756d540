//! Brute-force ground truth: honest differential operators with
//! polynomial coefficients acting on actual polynomials, for the
//! quadratic and determinant models.
//!
//! The abstract calculus predicts how the lowering operator acts on the
//! cells spanned by products of the fundamental invariants.  This module
//! builds the invariants and the operators concretely, applies them by
//! exact differentiation, and measures the resulting scalars with no
//! algebraic shortcuts.  One scalar, fitted once per model, must then
//! explain every measured cell; the fit is the executable content of the
//! normalization convention.
//!
//! # Key Operations
//!
//! - [`DiffOp::apply`] acts on a polynomial by exact differentiation.
//! - [`quadratic_model`] and [`det_model`] construct the two concrete
//!   families with their invariants and operators.
//! - [`ConcreteModel::empirical_b`] measures the scalar by which the
//!   lowering operator maps one invariant cell into the previous one.
//! - [`ConcreteModel::calibrate_and_check`] fits the single calibration
//!   constant and sweeps every cell up to a bound against the predicted
//!   eigenvalue polynomial.
//!
//! # Design Notes
//!
//! The quadratic form is split over the rationals (pairs plus one square
//! when the dimension is odd), keeping every computation exact; any
//! nondegenerate form is equivalent to it over the complex numbers.  The
//! lowering operator is the dual form in derivatives, with the Gram
//! matrix inverted, so the calibration constant comes out of the
//! measurement rather than being normalized away.  Determinant models
//! stop at size three: the operator on the fourth determinant power
//! already touches thousands of terms, which is desk scale, not beyond.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::exact_poly::{rat, ExactPoly, Poly, PolyError, Rat, VarSet};
use crate::pv_catalog::{Family, PVType, PvError};
use crate::tee_algebra::{TeeContext, TeeError};

/// Errors from concrete application and measurement.
#[derive(Debug, Error)]
pub enum OracleError {
    /// Operator and polynomial live in different variable contexts.
    #[error("operator and polynomial live in different variable contexts")]
    ContextMismatch,
    /// The measured image is not a scalar multiple of the expected cell.
    #[error("image is not proportional to the expected cell at a = {a:?}: got {image}")]
    NotProportional { a: Vec<u32>, image: String },
    /// A cell disagreed with the single fitted constant.
    #[error("calibration mismatch at a = {a:?}: predicted {expected}, measured {got}")]
    CalibrationMismatch {
        a: Vec<u32>,
        expected: Rat,
        got: Rat,
    },
    /// More exponent slots than the model has invariants.
    #[error("exponent vector has {got} slots but the model carries {have} invariants")]
    BadExponents { got: usize, have: usize },
    #[error(transparent)]
    Pv(#[from] PvError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Tee(#[from] TeeError),
}

/// A concrete polynomial coordinate space.
#[derive(Debug, Clone)]
pub struct PolySpace {
    vars: Arc<VarSet>,
}

impl PolySpace {
    /// Coordinates x1..xk.
    pub fn coordinates(k: usize) -> PolySpace {
        let names: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        PolySpace {
            vars: VarSet::new(&refs),
        }
    }

    /// Matrix coordinates x11..xmm, row major.
    pub fn matrix(m: usize) -> PolySpace {
        let mut names = Vec::with_capacity(m * m);
        for i in 1..=m {
            for j in 1..=m {
                names.push(format!("x{i}{j}"));
            }
        }
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        PolySpace {
            vars: VarSet::new(&refs),
        }
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn k(&self) -> usize {
        self.vars.names().len()
    }

    pub fn var(&self, name: &str) -> ExactPoly {
        Poly::var(&self.vars, name)
    }

    pub fn parse(&self, text: &str) -> Result<ExactPoly, PolyError> {
        Poly::parse(&self.vars, text)
    }
}

/// A differential operator in normal order: a finite sum of polynomial
/// coefficients times derivative monomials, all derivatives on the
/// right.  The map from exponent vector to coefficient is the canonical
/// form; like terms merge on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffOp {
    vars: Arc<VarSet>,
    terms: BTreeMap<Vec<u32>, ExactPoly>,
}

impl DiffOp {
    pub fn zero(space: &PolySpace) -> DiffOp {
        DiffOp {
            vars: Arc::clone(space.vars()),
            terms: BTreeMap::new(),
        }
    }

    fn insert(&mut self, exps: Vec<u32>, coeff: ExactPoly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let merged = o.get().try_add(&coeff).expect("same context");
                if merged.is_zero() {
                    o.remove();
                } else {
                    o.insert(merged);
                }
            }
        }
    }

    /// Constant-coefficient operator from a dual polynomial: each
    /// monomial in the coordinates becomes the same monomial in the
    /// derivatives, with the same coefficient.
    pub fn from_dual(space: &PolySpace, p: &ExactPoly) -> Result<DiffOp, OracleError> {
        if p.vars() != space.vars() {
            return Err(OracleError::ContextMismatch);
        }
        let mut op = DiffOp::zero(space);
        for (mono, c) in p.terms() {
            let exps: Vec<u32> = mono
                .exps()
                .iter()
                .map(|&e| u32::try_from(e).expect("dual polynomial has plain powers"))
                .collect();
            op.insert(exps, Poly::constant(space.vars(), c.clone()));
        }
        Ok(op)
    }

    /// The Euler operator: the sum of each coordinate times the matching
    /// derivative.
    pub fn euler(space: &PolySpace) -> DiffOp {
        let k = space.k();
        let mut op = DiffOp::zero(space);
        for (i, name) in space.vars().names().to_vec().iter().enumerate() {
            let mut exps = vec![0u32; k];
            exps[i] = 1;
            op.insert(exps, space.var(name));
        }
        op
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &ExactPoly)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exact action on a polynomial: differentiate per the exponent
    /// vector, multiply by the coefficient, and sum.  Linear in p.
    pub fn apply(&self, p: &ExactPoly) -> Result<ExactPoly, OracleError> {
        if p.vars() != &self.vars {
            return Err(OracleError::ContextMismatch);
        }
        let names = self.vars.names().to_vec();
        let mut out = Poly::zero_in(&self.vars);
        for (exps, coeff) in &self.terms {
            let mut cur = p.clone();
            'diff: for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    if cur.is_zero() {
                        break 'diff;
                    }
                    cur = cur.derivative(&names[i])?;
                }
            }
            out = out.try_add(&coeff.try_mul(&cur)?)?;
        }
        Ok(out)
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.vars.names();
        let mut first = true;
        for (exps, coeff) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut parts = Vec::new();
            if !coeff.is_one() || exps.iter().all(|&e| e == 0) {
                parts.push(format!("({coeff})"));
            }
            for (i, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(format!("d{}", names[i])),
                    _ => parts.push(format!("d{}^{}", names[i], e)),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// Free-function form of the exact action, matching the operator method.
pub fn apply(op: &DiffOp, p: &ExactPoly) -> Result<ExactPoly, OracleError> {
    op.apply(p)
}

/// One concrete realization: the space, the fundamental invariants in
/// decreasing degree, the lowering and Euler operators, and the fitted
/// calibration constant once measured.
#[derive(Debug, Clone)]
pub struct ConcreteModel {
    pv: PVType,
    space: PolySpace,
    deltas: Vec<ExactPoly>,
    y_op: DiffOp,
    e_op: DiffOp,
    calibration: Option<Rat>,
}

impl ConcreteModel {
    pub fn pv(&self) -> &PVType {
        &self.pv
    }

    pub fn space(&self) -> &PolySpace {
        &self.space
    }

    /// The invariants, highest degree first.
    pub fn deltas(&self) -> &[ExactPoly] {
        &self.deltas
    }

    pub fn delta(&self, i: usize) -> &ExactPoly {
        &self.deltas[i]
    }

    pub fn y_op(&self) -> &DiffOp {
        &self.y_op
    }

    pub fn e_op(&self) -> &DiffOp {
        &self.e_op
    }

    pub fn calibration(&self) -> Option<&Rat> {
        self.calibration.as_ref()
    }

    /// The monomial cell: the product of invariant powers.
    pub fn cell(&self, a: &[u32]) -> Result<ExactPoly, OracleError> {
        if a.len() > self.deltas.len() {
            return Err(OracleError::BadExponents {
                got: a.len(),
                have: self.deltas.len(),
            });
        }
        let mut p = Poly::one_in(self.space.vars());
        for (i, &e) in a.iter().enumerate() {
            p = p.try_mul(&self.deltas[i].pow(e))?;
        }
        Ok(p)
    }

    /// Measure the scalar by which the lowering operator sends the cell
    /// at `a` into the cell with the first exponent lowered by one.
    /// A nonzero image that is not an exact scalar multiple falsifies
    /// equivariance and errors.
    pub fn empirical_b(&self, a: &[u32]) -> Result<Rat, OracleError> {
        let image = self.y_op.apply(&self.cell(a)?)?;
        if image.is_zero() {
            return Ok(rat(0));
        }
        if a.is_empty() || a[0] == 0 {
            return Err(OracleError::NotProportional {
                a: a.to_vec(),
                image: image.to_string(),
            });
        }
        let mut lowered = a.to_vec();
        lowered[0] -= 1;
        let target = self.cell(&lowered)?;
        let ratio = match (image.leading(), target.leading()) {
            (Some((_, ci)), Some((_, ct))) => ci.clone() / ct.clone(),
            _ => {
                return Err(OracleError::NotProportional {
                    a: a.to_vec(),
                    image: image.to_string(),
                })
            }
        };
        let predicted = target.scale(&ratio);
        if predicted != image {
            return Err(OracleError::NotProportional {
                a: a.to_vec(),
                image: image.to_string(),
            });
        }
        Ok(ratio)
    }

    /// Fit the calibration constant on the first cell, then sweep every
    /// exponent vector with coordinate sum at most `max_norm` and check
    /// that the one constant explains each measured scalar.
    pub fn calibrate_and_check(&mut self, max_norm: u32) -> Result<CalibrationReport, OracleError> {
        assert!(max_norm >= 2, "sweep at least the first two layers");
        let tee = TeeContext::new(self.pv.clone());
        let b_y = tee.bfunction(tee.y())?;
        let rank = self.deltas.len();

        let mut first = vec![0u32; rank];
        first[0] = 1;
        let measured = self.empirical_b(&first)?;
        let predicted = b_y.eval(&to_rats(&first))?;
        let c = measured / predicted;

        let mut cells = Vec::new();
        for a in exponent_vectors(rank, max_norm) {
            let got = self.empirical_b(&a)?;
            let expected = c.clone() * b_y.eval(&to_rats(&a))?;
            if got != expected {
                return Err(OracleError::CalibrationMismatch { a, expected, got });
            }
            cells.push((a, got));
        }
        self.calibration = Some(c.clone());
        Ok(CalibrationReport { c, cells })
    }
}

fn to_rats(a: &[u32]) -> Vec<Rat> {
    a.iter().map(|&e| rat(e as i64)).collect()
}

/// All exponent vectors of the given length with coordinate sum at most
/// the bound, in lexicographic order.
fn exponent_vectors(len: usize, max_norm: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; len];
    fn rec(cur: &mut Vec<u32>, slot: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if slot == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[slot] = e;
            rec(cur, slot + 1, left - e, out);
        }
        cur[slot] = 0;
    }
    rec(&mut cur, 0, max_norm, &mut out);
    out
}

/// The calibration constant and every measured cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CalibrationReport {
    pub c: Rat,
    pub cells: Vec<(Vec<u32>, Rat)>,
}

impl fmt::Display for CalibrationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "calibration c = {}", self.c)?;
        for (a, b) in &self.cells {
            let coords: Vec<String> = a.iter().map(u32::to_string).collect();
            writeln!(f, "  a = ({})  b = {}", coords.join(","), b)?;
        }
        Ok(())
    }
}

/// The split quadratic model on k coordinates: the invariant pairs off
/// the coordinates (odd k keeps one square), the lowering operator is
/// the dual form in derivatives with the Gram matrix inverted.
pub fn quadratic_model(k: usize) -> Result<ConcreteModel, OracleError> {
    let pv = PVType::quadratic(k as u32)?;
    let space = PolySpace::coordinates(k);
    let vars = space.vars();

    let mut delta0 = Poly::zero_in(vars);
    let mut dual = Poly::zero_in(vars);
    let mut i = 1;
    while i + 1 <= k {
        let pair = space.var(&format!("x{i}")).try_mul(&space.var(&format!("x{}", i + 1)))?;
        delta0 = delta0.try_add(&pair)?;
        dual = dual.try_add(&pair.scale(&rat(4)))?;
        i += 2;
    }
    if i == k {
        let square = space.var(&format!("x{k}")).pow(2);
        delta0 = delta0.try_add(&square)?;
        dual = dual.try_add(&square)?;
    }
    let delta1 = space.var("x1");

    let y_op = DiffOp::from_dual(&space, &dual)?;
    let e_op = DiffOp::euler(&space);
    Ok(ConcreteModel {
        pv,
        space,
        deltas: vec![delta0, delta1],
        y_op,
        e_op,
        calibration: None,
    })
}

/// The determinant model on m by m matrix coordinates: the invariants
/// are the leading principal minors in decreasing size, the lowering
/// operator is the determinant in derivatives.
pub fn det_model(m: usize) -> Result<ConcreteModel, OracleError> {
    let pv = PVType::builtin(Family::A, m as u32)?;
    let space = PolySpace::matrix(m);

    let mut deltas = Vec::with_capacity(m);
    for size in (1..=m).rev() {
        let idx: Vec<usize> = (1..=size).collect();
        deltas.push(minor(&space, &idx, &idx)?);
    }
    let full: Vec<usize> = (1..=m).collect();
    let y_op = DiffOp::from_dual(&space, &minor(&space, &full, &full)?)?;
    let e_op = DiffOp::euler(&space);
    Ok(ConcreteModel {
        pv,
        space,
        deltas,
        y_op,
        e_op,
        calibration: None,
    })
}

/// Determinant of the submatrix on the given rows and columns, by
/// Laplace expansion along the first listed row.
fn minor(space: &PolySpace, rows: &[usize], cols: &[usize]) -> Result<ExactPoly, OracleError> {
    if rows.is_empty() {
        return Ok(Poly::one_in(space.vars()));
    }
    let row = rows[0];
    let rest = &rows[1..];
    let mut acc = Poly::zero_in(space.vars());
    for (pos, &col) in cols.iter().enumerate() {
        let entry = space.var(&format!("x{row}{col}"));
        let sub_cols: Vec<usize> = cols
            .iter()
            .enumerate()
            .filter(|&(p, _)| p != pos)
            .map(|(_, &c)| c)
            .collect();
        let cofactor = minor(space, rest, &sub_cols)?;
        let term = entry.try_mul(&cofactor)?;
        acc = if pos % 2 == 0 {
            acc.try_add(&term)?
        } else {
            acc.try_sub(&term)?
        };
    }
    Ok(acc)
}
