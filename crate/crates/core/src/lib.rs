//! Exact-arithmetic workbench for the operator algebras attached to the
//! fundamental relative invariant of a prehomogeneous vector space of
//! commutative parabolic type.
//!
//! The algebras `T0 ⊂ T0[X,Y] ⊂ T` generated by multiplication by the
//! invariant (X), its inverse (Xinv), the dual invariant differential
//! operator (Y), and the Euler-type operator (E) are realized faithfully
//! inside an extended Weyl algebra of a one-dimensional torus with
//! polynomial coefficients in `X0..Xn`.  Every structural statement the
//! workbench checks (b-function calculus, Harish-Chandra images, the
//! center, the Smith-algebra presentation) is decided by exact rational
//! arithmetic; there are no floating-point tolerances anywhere.
//!
//! Module map:
//! - [`exact_poly`]: sparse multivariate polynomials over exact rationals.
//! - [`pv_catalog`]: the catalog of regular types and their `(n, k, d)`.
//! - [`torus_weyl`]: the ambient skew-product algebra of pairs `(m, P)`.
//! - [`tee_algebra`]: the four generators, words, b-functions, grading,
//!   the twist `tau`, and the free-module decompositions.
//! - [`sym_harish`]: the change of variables to `r0..rn`, symmetry tests,
//!   and the center as twisted-invariant symmetric polynomials.
//! - [`smith`]: the finite-presentation algebra on generators `x, y, e`
//!   with PBW normal forms, and its quotient with `xy` made polynomial.
//! - [`iso_bridge`]: the isomorphism between that quotient over the center
//!   and the concrete operator algebra.
//! - [`concrete_oracle`]: honest differential operators on small spaces,
//!   used as an independent check of the abstract model.

pub mod exact_poly;
pub mod concrete_oracle;
pub mod iso_bridge;
pub mod pv_catalog;
pub mod smith;
pub mod sym_harish;
pub mod tee_algebra;
pub mod torus_weyl;

pub use concrete_oracle::{
    apply, det_model, quadratic_model, CalibrationReport, ConcreteModel, DiffOp, OracleError,
    PolySpace,
};
pub use exact_poly::{rat, ratio, ExactPoly, Poly, PolyError, Rat, Scalar, VarSet};
pub use iso_bridge::{
    build_u_xy, verify_iso, CenterRing, IsoBridge, IsoError, IsoReport, UxyPresentation,
};
pub use pv_catalog::{Family, PVType, PvError};
pub use smith::{
    lift, solve_u, t_coefficients, Letter, Side, SmithContext, SmithElement, SmithError,
    Strategy, UContext, UElement,
};
pub use sym_harish::{
    a_to_r, a_vars, center_split, decompose_tau, det_rat, diagonal_extension, gamma,
    gamma_inverse, r_to_a, r_vars, random_symmetric, recompose_tau, sigma0,
    tau_invariant_generators, tau_shift, RhoVector, SymError, SymPoly,
};
pub use tee_algebra::{BFunction, T0XYDecomposition, TeeContext, TeeError};
pub use torus_weyl::{lemma_word, x_vars, TorusElement, TorusError};
