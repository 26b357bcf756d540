//! Catalog of regular prehomogeneous vector spaces of commutative
//! parabolic type: the numeric parameters each family contributes.
//!
//! A type is the triple `(n, k, d)`: the invariant `Δ0` has degree
//! `n + 1` (the rank), `k` is the dimension of the space, and the
//! structure constant `d` is pinned by the identity
//! `d/2 = (k - (n+1)) / (n(n+1))` whenever `n >= 1`.  Everything
//! downstream consumes only this triple.

use crate::exact_poly::{rat, ratio, Rat};
use num_traits::Zero;
use serde_json::json;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PvError {
    #[error("size parameter {size} out of range for family {family}: {reason}")]
    OutOfRange {
        family: String,
        size: u32,
        reason: String,
    },
    #[error("k = {k} must exceed n + 1 = {rank} (d would be non-positive)")]
    DegenerateDimension { k: u32, rank: u32 },
    #[error("family {0} has no builtin constructor: {1}")]
    UnsupportedFamily(String, String),
    #[error("bad type descriptor `{0}`: expected family:size or custom:n:k")]
    BadDescriptor(String),
}

/// Family tag from the classification table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    A,
    B,
    C,
    D1,
    D2,
    E7,
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D1 => "D1",
            Family::D2 => "D2",
            Family::E7 => "E7",
            Family::Custom => "custom",
        };
        write!(f, "{s}")
    }
}

/// One catalog record; immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PVType {
    family: Family,
    label: String,
    n: usize,
    k: usize,
    d: Rat,
}

impl PVType {
    fn with_params(family: Family, label: String, n: u32, k: u32) -> Result<PVType, PvError> {
        let d = if n == 0 {
            // Rank one: a single variable, no structure constant in play.
            Rat::zero()
        } else {
            if k <= n + 1 {
                return Err(PvError::DegenerateDimension { k, rank: n + 1 });
            }
            ratio(2 * (k as i64 - (n as i64 + 1)), n as i64 * (n as i64 + 1))
        };
        let pv = PVType {
            family,
            label,
            n: n as usize,
            k: k as usize,
            d,
        };
        debug_assert!(pv.d_identity_holds());
        Ok(pv)
    }

    /// The defining identity `d/2 = (k - (n+1)) / (n(n+1))` for `n >= 1`.
    pub fn d_identity_holds(&self) -> bool {
        if self.n == 0 {
            return self.d.is_zero();
        }
        let n = self.n as i64;
        let k = self.k as i64;
        self.d_half() * rat(n * (n + 1)) == rat(k - (n + 1))
    }

    /// Builtin table row, keyed by the family's natural size parameter.
    ///
    /// - `A:m`: square `m x m` matrices under determinant: rank `m`,
    ///   `n = m - 1`, `k = m^2` (any `m >= 1`).
    /// - `B:m`: quadratic form on an odd-dimensional space `k = 2m - 1`
    ///   (`m >= 2`).
    /// - `D1:m`: quadratic form on an even-dimensional space `k = 2m - 2`
    ///   (`m >= 3`).
    /// - `C:m`: symmetric `m x m` matrices under determinant: rank `m`,
    ///   `k = m(m+1)/2` (any `m >= 1`).
    /// - `E7:7`: the exceptional record `n = 2`, `k = 27`.
    /// - `D2` (alternating matrices under Pfaffian) has no builtin row;
    ///   construct it through [`PVType::custom`].
    pub fn builtin(family: Family, size: u32) -> Result<PVType, PvError> {
        let out_of_range = |reason: &str| PvError::OutOfRange {
            family: family.to_string(),
            size,
            reason: reason.to_string(),
        };
        match family {
            Family::A => {
                if size < 1 {
                    return Err(out_of_range("need matrix size m >= 1"));
                }
                PVType::with_params(family, format!("A:{size}"), size - 1, size * size)
            }
            Family::B => {
                if size < 2 {
                    return Err(out_of_range("need m >= 2 so that k = 2m - 1 >= 3"));
                }
                PVType::with_params(family, format!("B:{size}"), 1, 2 * size - 1)
            }
            Family::D1 => {
                if size < 3 {
                    return Err(out_of_range("need m >= 3 so that k = 2m - 2 >= 4"));
                }
                PVType::with_params(family, format!("D1:{size}"), 1, 2 * size - 2)
            }
            Family::C => {
                if size < 1 {
                    return Err(out_of_range("need matrix size m >= 1"));
                }
                PVType::with_params(family, format!("C:{size}"), size - 1, size * (size + 1) / 2)
            }
            Family::E7 => {
                if size != 7 {
                    return Err(out_of_range("the exceptional row is E7:7"));
                }
                PVType::with_params(family, "E7".to_string(), 2, 27)
            }
            Family::D2 => Err(PvError::UnsupportedFamily(
                "D2".to_string(),
                "the rank parametrization of the alternating-matrix row is not fixed; \
                 use custom:n:k"
                    .to_string(),
            )),
            Family::Custom => Err(PvError::UnsupportedFamily(
                "custom".to_string(),
                "use PVType::custom(n, k)".to_string(),
            )),
        }
    }

    /// The merged quadratic-form row: `n = 1`, `d = k - 2`, any `k >= 3`.
    pub fn quadratic(k: u32) -> Result<PVType, PvError> {
        let family = if k % 2 == 1 { Family::B } else { Family::D1 };
        PVType::with_params(family, format!("quadratic:{k}"), 1, k)
    }

    /// Abstract record with `d` computed from the defining identity.
    pub fn custom(n: u32, k: u32) -> Result<PVType, PvError> {
        if n < 1 {
            return Err(PvError::OutOfRange {
                family: "custom".to_string(),
                size: n,
                reason: "need n >= 1".to_string(),
            });
        }
        PVType::with_params(Family::Custom, format!("custom:{n}:{k}"), n, k)
    }

    /// Parse `family:size`, `quadratic:k`, or `custom:n:k` (as on the CLI).
    pub fn from_spec_str(s: &str) -> Result<PVType, PvError> {
        let bad = || PvError::BadDescriptor(s.to_string());
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.parse::<u32>().map_err(|_| bad());
        match parts.as_slice() {
            ["A" | "a", m] => PVType::builtin(Family::A, num(m)?),
            ["B" | "b", m] => PVType::builtin(Family::B, num(m)?),
            ["C" | "c", m] => PVType::builtin(Family::C, num(m)?),
            ["D1" | "d1", m] => PVType::builtin(Family::D1, num(m)?),
            ["quadratic" | "q", k] => PVType::quadratic(num(k)?),
            ["E7" | "e7"] | ["E7" | "e7", "7"] => PVType::builtin(Family::E7, 7),
            ["custom", n, k] => PVType::custom(num(n)?, num(k)?),
            _ => Err(bad()),
        }
    }

    /// The builtin rows shown by the catalog listing.
    pub fn catalog() -> Vec<PVType> {
        let mut rows = Vec::new();
        for m in [1, 2, 3, 4] {
            rows.push(PVType::builtin(Family::A, m).expect("valid row"));
        }
        for m in [2, 3, 4] {
            rows.push(PVType::builtin(Family::B, m).expect("valid row"));
        }
        for m in [3, 4, 5] {
            rows.push(PVType::builtin(Family::D1, m).expect("valid row"));
        }
        for m in [2, 3, 4] {
            rows.push(PVType::builtin(Family::C, m).expect("valid row"));
        }
        rows.push(PVType::builtin(Family::E7, 7).expect("valid row"));
        rows
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Rank parameter: `Δ0` has degree `n + 1`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.n + 1
    }

    /// Dimension of the underlying space.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> Rat {
        self.d.clone()
    }

    pub fn d_half(&self) -> Rat {
        self.d.clone() / rat(2)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "family": self.family.to_string(),
            "label": self.label,
            "n": self.n,
            "k": self.k,
            "d": self.d.to_string(),
        })
    }
}

impl fmt::Display for PVType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (n = {}, k = {}, d = {})",
            self.label, self.n, self.k, self.d
        )
    }
}
