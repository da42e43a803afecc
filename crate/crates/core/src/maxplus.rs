//! Max-plus semiring `(ℝ ∪ {−∞}, max, +)`: scalars, square matrices and
//! square matrices of polynomials in the back-shift operator γ.
//!
//! The semiring zero ε is kept as a dedicated sentinel and every operation is
//! defined by case analysis on it, so `ε ⊗ a = ε` holds exactly and no large
//! negative float ever leaks into a cycle weight.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of the max-plus semiring.
#[derive(Clone, Copy, PartialEq)]
pub struct MaxPlus(f64);

impl MaxPlus {
    /// Semiring zero ε = −∞.
    pub const EPSILON: MaxPlus = MaxPlus(f64::NEG_INFINITY);
    /// Semiring unit e = 0.
    pub const UNIT: MaxPlus = MaxPlus(0.0);

    /// A finite element. Panics on NaN or infinities; use [`MaxPlus::EPSILON`] for ε.
    pub fn finite(value: f64) -> Self {
        assert!(
            value.is_finite(),
            "max-plus value must be finite, got {value}"
        );
        MaxPlus(value)
    }

    pub fn is_epsilon(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn is_finite(self) -> bool {
        !self.is_epsilon()
    }

    /// The underlying value, `None` for ε.
    pub fn value(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }

    /// The underlying value with ε mapped to `f64::NEG_INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.0
    }

    /// `a ⊕ b = max(a, b)`.
    pub fn oplus(self, other: Self) -> Self {
        match (self.is_epsilon(), other.is_epsilon()) {
            (true, _) => other,
            (_, true) => self,
            _ => MaxPlus(self.0.max(other.0)),
        }
    }

    /// `a ⊗ b = a + b`, absorbing on ε.
    pub fn otimes(self, other: Self) -> Self {
        if self.is_epsilon() || other.is_epsilon() {
            Self::EPSILON
        } else {
            MaxPlus(self.0 + other.0)
        }
    }

    /// `a^{⊗k} = k·a` for a non-negative integer power (`a^0 = e`).
    pub fn pow(self, k: u32) -> Self {
        if k == 0 {
            Self::UNIT
        } else if self.is_epsilon() {
            Self::EPSILON
        } else {
            MaxPlus(self.0 * f64::from(k))
        }
    }
}

impl From<f64> for MaxPlus {
    /// `f64::NEG_INFINITY` maps to ε; other values must be finite.
    fn from(v: f64) -> Self {
        if v == f64::NEG_INFINITY {
            MaxPlus::EPSILON
        } else {
            MaxPlus::finite(v)
        }
    }
}

impl Add for MaxPlus {
    type Output = MaxPlus;
    fn add(self, rhs: Self) -> Self {
        self.oplus(rhs)
    }
}

impl Mul for MaxPlus {
    type Output = MaxPlus;
    fn mul(self, rhs: Self) -> Self {
        self.otimes(rhs)
    }
}

impl PartialOrd for MaxPlus {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl fmt::Debug for MaxPlus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MaxPlus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_epsilon() {
            write!(f, "ε")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Dense square max-plus matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxPlusMatrix {
    n: usize,
    entries: Vec<MaxPlus>,
}

impl MaxPlusMatrix {
    /// The all-ε matrix.
    pub fn epsilon(n: usize) -> Self {
        Self {
            n,
            entries: vec![MaxPlus::EPSILON; n * n],
        }
    }

    /// e on the diagonal, ε elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::epsilon(n);
        for i in 0..n {
            m.set(i, i, MaxPlus::UNIT);
        }
        m
    }

    /// Builds from rows of plain floats; `f64::NEG_INFINITY` encodes ε.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            entries.extend(row.iter().map(|&v| MaxPlus::from(v)));
        }
        Ok(Self { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> MaxPlus {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: MaxPlus) {
        self.entries[i * self.n + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_f64()).collect())
            .collect()
    }

    /// `(A ⊕ B)_ij = max(A_ij, B_ij)`.
    pub fn oplus(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.n)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.oplus(*b))
            .collect();
        Ok(Self { n: self.n, entries })
    }

    /// `(A ⊗ B)_ij = max_k (A_ik + B_kj)`.
    pub fn otimes(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.n)?;
        let n = self.n;
        let mut out = Self::epsilon(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_epsilon() {
                    continue;
                }
                for j in 0..n {
                    let cur = out.get(i, j);
                    out.set(i, j, cur.oplus(a.otimes(other.get(k, j))));
                }
            }
        }
        Ok(out)
    }

    /// `(A ⊗ x)_i = max_j (A_ij + x_j)`.
    pub fn apply(&self, x: &[MaxPlus]) -> Result<Vec<MaxPlus>> {
        self.check_dim(x.len())?;
        Ok((0..self.n)
            .map(|i| {
                (0..self.n).fold(MaxPlus::EPSILON, |acc, j| {
                    acc.oplus(self.get(i, j).otimes(x[j]))
                })
            })
            .collect())
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.n == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n,
                actual: other,
            })
        }
    }
}

/// A max-plus polynomial `⊕_l a_l γ^l`, kept canonical: exponents strictly
/// increasing, no ε coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MaxPlusPoly {
    terms: Vec<(u32, f64)>,
}

impl MaxPlusPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(exponent: u32, coefficient: f64) -> Self {
        assert!(coefficient.is_finite());
        Self {
            terms: vec![(exponent, coefficient)],
        }
    }

    /// Sparse `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> &[(u32, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest exponent with a non-ε coefficient, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.last().map(|t| t.0)
    }

    pub fn coefficient(&self, exponent: u32) -> MaxPlus {
        self.terms
            .binary_search_by_key(&exponent, |t| t.0)
            .map(|i| MaxPlus::finite(self.terms[i].1))
            .unwrap_or(MaxPlus::EPSILON)
    }

    /// Adds `c γ^l`, merging with an existing term of the same exponent by max.
    pub fn add_term(&mut self, exponent: u32, coefficient: f64) {
        assert!(coefficient.is_finite());
        match self.terms.binary_search_by_key(&exponent, |t| t.0) {
            Ok(i) => self.terms[i].1 = self.terms[i].1.max(coefficient),
            Err(i) => self.terms.insert(i, (exponent, coefficient)),
        }
    }

    pub fn oplus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for &(l, c) in &other.terms {
            out.add_term(l, c);
        }
        out
    }

    pub fn otimes(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for &(l1, c1) in &self.terms {
            for &(l2, c2) in &other.terms {
                out.add_term(l1 + l2, c1 + c2);
            }
        }
        out
    }

    /// `max_l (a_l + l·x)`; ε for the zero polynomial.
    pub fn eval(&self, x: f64) -> MaxPlus {
        self.terms.iter().fold(MaxPlus::EPSILON, |acc, &(l, c)| {
            acc.oplus(MaxPlus::finite(c).otimes(MaxPlus::finite(x).pow(l)))
        })
    }
}

/// Square matrix with entries in `ℝ_max[γ]`.
///
/// Entry `(i, j)` holding `a γ^l` encodes the dependence `x_i(k) ≥ a + x_j(k − l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxPlusPolyMatrix {
    n: usize,
    entries: Vec<MaxPlusPoly>,
}

/// One monomial `w γ^l` at position `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub i: usize,
    pub j: usize,
    pub l: u32,
    pub w: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyMatrixWire {
    n: usize,
    entries: Vec<Monomial>,
}

impl MaxPlusPolyMatrix {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            entries: vec![MaxPlusPoly::zero(); n * n],
        }
    }

    pub fn from_monomials(n: usize, monomials: &[Monomial]) -> Result<Self> {
        let mut a = Self::zero(n);
        for m in monomials {
            a.add_monomial(m.i, m.j, m.l, m.w)?;
        }
        Ok(a)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &MaxPlusPoly {
        &self.entries[i * self.n + j]
    }

    pub fn add_monomial(&mut self, i: usize, j: usize, exponent: u32, weight: f64) -> Result<()> {
        for idx in [i, j] {
            if idx >= self.n {
                return Err(Error::IndexOutOfRange {
                    index: idx,
                    dim: self.n,
                });
            }
        }
        if !weight.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "non-finite monomial weight {weight}"
            )));
        }
        self.entries[i * self.n + j].add_term(exponent, weight);
        Ok(())
    }

    /// All monomials in row-major order, exponents increasing within an entry.
    pub fn monomials(&self) -> Vec<Monomial> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                for &(l, w) in self.entry(i, j).terms() {
                    out.push(Monomial { i, j, l, w });
                }
            }
        }
        out
    }

    pub fn degree(&self) -> Option<u32> {
        self.entries.iter().filter_map(MaxPlusPoly::degree).max()
    }

    /// Coefficient matrix `A_l` of `γ^l`.
    pub fn coefficient_matrix(&self, exponent: u32) -> MaxPlusMatrix {
        let mut m = MaxPlusMatrix::epsilon(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.entry(i, j).coefficient(exponent));
            }
        }
        m
    }

    pub fn oplus(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.n)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.oplus(b))
            .collect();
        Ok(Self { n: self.n, entries })
    }

    pub fn otimes(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.n)?;
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entry(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let prod = a.otimes(other.entry(k, j));
                    let slot = &mut out.entries[i * n + j];
                    *slot = slot.oplus(&prod);
                }
            }
        }
        Ok(out)
    }

    /// Valuation `A(x)`: each entry becomes `max_l (a^(l) + l·x)`.
    pub fn eval(&self, x: f64) -> MaxPlusMatrix {
        assert!(
            x.is_finite(),
            "polynomial matrices are evaluated at finite points"
        );
        let mut m = MaxPlusMatrix::epsilon(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.entry(i, j).eval(x));
            }
        }
        m
    }

    /// Support pattern: `true` where the entry is not the zero polynomial.
    pub fn support(&self) -> Vec<bool> {
        self.entries.iter().map(|p| !p.is_zero()).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let wire = PolyMatrixWire {
            n: self.n,
            entries: self.monomials(),
        };
        Ok(serde_json::to_string(&wire)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: PolyMatrixWire = serde_json::from_str(s)?;
        Self::from_monomials(wire.n, &wire.entries)
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.n == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n,
                actual: other,
            })
        }
    }
}

impl Serialize for MaxPlusPolyMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyMatrixWire {
            n: self.n,
            entries: self.monomials(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MaxPlusPolyMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = PolyMatrixWire::deserialize(d)?;
        Self::from_monomials(wire.n, &wire.entries).map_err(serde::de::Error::custom)
    }
}
