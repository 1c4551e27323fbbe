//! Exact truncated power series in `x` (exponential), `z` and `t` (ordinary).
//!
//! Coefficients are big rationals stored densely in a box
//! `0..=nx × 0..=nz × 0..=nt`. Every operation on operands with equal
//! bounds returns the exact coefficients of the untruncated result inside
//! the box; anything outside is dropped.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("bounds differ: {0} vs {1}")]
    BoundMismatch(Bounds, Bounds),
    #[error("exponent ({i},{j},{k}) outside bounds {bounds}")]
    OutOfBounds { i: usize, j: usize, k: usize, bounds: Bounds },
    #[error("series has zero constant term and cannot be inverted")]
    NotInvertible,
    #[error("substituted series must be free of z and t with zero constant term")]
    BadSubstitution,
    #[error("series still depends on z or t")]
    NotUnivariate,
    #[error("coefficient of x^{n} times {n}! is {value}, not an integer")]
    NonInteger { n: usize, value: BigRational },
    #[error("matrix entries need positive valuation in {0} for the Neumann series")]
    Valuation(&'static str),
}

/// Largest retained exponent in each variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Bounds {
    pub x: usize,
    pub z: usize,
    pub t: usize,
}

impl Bounds {
    pub const fn new(x: usize, z: usize, t: usize) -> Self {
        Bounds { x, z, t }
    }

    /// Same order in all three variables.
    pub const fn cube(order: usize) -> Self {
        Bounds { x: order, z: order, t: order }
    }

    /// Only `x` and `z`.
    pub const fn xz(order: usize) -> Self {
        Bounds { x: order, z: order, t: 0 }
    }

    /// Only `x`.
    pub const fn x_only(order: usize) -> Self {
        Bounds { x: order, z: 0, t: 0 }
    }

    fn len(&self) -> usize {
        (self.x + 1) * (self.z + 1) * (self.t + 1)
    }

    fn contains(&self, i: usize, j: usize, k: usize) -> bool {
        i <= self.x && j <= self.z && k <= self.t
    }

    fn fits_in(&self, other: &Bounds) -> bool {
        self.x <= other.x && self.z <= other.z && self.t <= other.t
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds::cube(16)
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(x^{}, z^{}, t^{})", self.x, self.z, self.t)
    }
}

/// One nonzero coefficient in dump order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesTerm {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub numerator: String,
    pub denominator: String,
}

#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    bounds: Bounds,
    coeffs: Vec<BigRational>,
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, j, k, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})x^{i}z^{j}t^{k}")?;
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O{}", self.bounds)
    }
}

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub(crate) fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl TruncatedSeries {
    pub fn zero(bounds: Bounds) -> Self {
        TruncatedSeries { bounds, coeffs: vec![BigRational::zero(); bounds.len()] }
    }

    pub fn one(bounds: Bounds) -> Self {
        Self::constant(bounds, BigRational::one())
    }

    pub fn constant(bounds: Bounds, c: BigRational) -> Self {
        let mut s = Self::zero(bounds);
        s.coeffs[0] = c;
        s
    }

    pub fn from_int(bounds: Bounds, c: i64) -> Self {
        Self::constant(bounds, BigRational::from_integer(c.into()))
    }

    /// `c · x^i z^j t^k`.
    pub fn monomial(bounds: Bounds, c: BigRational, i: usize, j: usize, k: usize) -> Result<Self, SeriesError> {
        if !bounds.contains(i, j, k) {
            return Err(SeriesError::OutOfBounds { i, j, k, bounds });
        }
        let mut s = Self::zero(bounds);
        let idx = s.index(i, j, k);
        s.coeffs[idx] = c;
        Ok(s)
    }

    /// `x`, or zero when `x` is truncated away.
    pub fn x(bounds: Bounds) -> Self {
        Self::monomial(bounds, BigRational::one(), 1, 0, 0).unwrap_or_else(|_| Self::zero(bounds))
    }

    pub fn z(bounds: Bounds) -> Self {
        Self::monomial(bounds, BigRational::one(), 0, 1, 0).unwrap_or_else(|_| Self::zero(bounds))
    }

    pub fn t(bounds: Bounds) -> Self {
        Self::monomial(bounds, BigRational::one(), 0, 0, 1).unwrap_or_else(|_| Self::zero(bounds))
    }

    /// `Σ cⁱ xⁱ / i!`.
    pub fn exp_x(bounds: Bounds, c: i64) -> Self {
        let mut s = Self::zero(bounds);
        let c = BigInt::from(c);
        let mut power = BigInt::one();
        for i in 0..=bounds.x {
            let idx = s.index(i, 0, 0);
            s.coeffs[idx] = BigRational::new(power.clone(), factorial(i));
            power *= &c;
        }
        s
    }

    /// `Ψ(x) = Σ_{m,n≥0} 2^{mn} x^{m+n} / (m! n!)`.
    pub fn psi(bounds: Bounds) -> Self {
        let mut s = Self::zero(bounds);
        for n in 0..=bounds.x {
            let idx = s.index(n, 0, 0);
            s.coeffs[idx] = psi_coefficient(n);
        }
        s
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    #[inline]
    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * (self.bounds.z + 1) + j) * (self.bounds.t + 1) + k
    }

    #[inline]
    fn exponent(&self, idx: usize) -> (usize, usize, usize) {
        let k = idx % (self.bounds.t + 1);
        let rest = idx / (self.bounds.t + 1);
        (rest / (self.bounds.z + 1), rest % (self.bounds.z + 1), k)
    }

    /// Coefficient of `x^i z^j t^k`; zero outside the bounds.
    pub fn coeff(&self, i: usize, j: usize, k: usize) -> BigRational {
        if self.bounds.contains(i, j, k) {
            self.coeffs[self.index(i, j, k)].clone()
        } else {
            BigRational::zero()
        }
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, k: usize, c: BigRational) -> Result<(), SeriesError> {
        if !self.bounds.contains(i, j, k) {
            return Err(SeriesError::OutOfBounds { i, j, k, bounds: self.bounds });
        }
        let idx = self.index(i, j, k);
        self.coeffs[idx] = c;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Nonzero terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, usize, &BigRational)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(idx, c)| {
            let (i, j, k) = self.exponent(idx);
            (i, j, k, c)
        })
    }

    fn nonzero(&self) -> Vec<(usize, usize, usize, &BigRational)> {
        self.terms().collect()
    }

    pub fn dump(&self) -> Vec<SeriesTerm> {
        self.terms()
            .map(|(i, j, k, c)| SeriesTerm {
                i,
                j,
                k,
                numerator: c.numer().to_string(),
                denominator: c.denom().to_string(),
            })
            .collect()
    }

    fn check(&self, other: &Self) -> Result<(), SeriesError> {
        if self.bounds == other.bounds {
            Ok(())
        } else {
            Err(SeriesError::BoundMismatch(self.bounds, other.bounds))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(TruncatedSeries { bounds: self.bounds, coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(TruncatedSeries { bounds: self.bounds, coeffs })
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        TruncatedSeries { bounds: self.bounds, coeffs }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&BigRational::from_integer(c.into()))
    }

    /// Truncated Cauchy product.
    pub fn try_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let b = self.bounds;
        let lhs = self.nonzero();
        let rhs = other.nonzero();
        let mut out = Self::zero(b);
        for &(i1, j1, k1, c1) in &lhs {
            for &(i2, j2, k2, c2) in &rhs {
                if i1 + i2 <= b.x && j1 + j2 <= b.z && k1 + k2 <= b.t {
                    let idx = out.index(i1 + i2, j1 + j2, k1 + k2);
                    out.coeffs[idx] += c1 * c2;
                }
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let inv0 = c0.recip();
        let tail: Vec<_> = self.nonzero().into_iter().filter(|&(i, j, k, _)| (i, j, k) != (0, 0, 0)).collect();
        let mut out = Self::zero(self.bounds);
        out.coeffs[0] = inv0.clone();
        // Lexicographic index order visits every e - e' before e.
        for idx in 1..out.coeffs.len() {
            let (i, j, k) = out.exponent(idx);
            let mut acc = BigRational::zero();
            for &(i1, j1, k1, a) in &tail {
                if i1 <= i && j1 <= j && k1 <= k {
                    let b = &out.coeffs[out.index(i - i1, j - j1, k - k1)];
                    if !b.is_zero() {
                        acc += a * b;
                    }
                }
            }
            if !acc.is_zero() {
                out.coeffs[idx] = -(acc * &inv0);
            }
        }
        Ok(out)
    }

    /// The `z^j` layer as a z-free series with the same bounds.
    pub fn z_layer(&self, j: usize) -> Self {
        let mut out = Self::zero(self.bounds);
        if j > self.bounds.z {
            return out;
        }
        for i in 0..=self.bounds.x {
            for k in 0..=self.bounds.t {
                let idx = out.index(i, 0, k);
                out.coeffs[idx] = self.coeffs[self.index(i, j, k)].clone();
            }
        }
        out
    }

    /// The `t^k` layer as a t-free series with the same bounds.
    pub fn t_layer(&self, k: usize) -> Self {
        let mut out = Self::zero(self.bounds);
        if k > self.bounds.t {
            return out;
        }
        for i in 0..=self.bounds.x {
            for j in 0..=self.bounds.z {
                let idx = out.index(i, j, 0);
                out.coeffs[idx] = self.coeffs[self.index(i, j, k)].clone();
            }
        }
        out
    }

    pub fn depends_on_z(&self) -> bool {
        self.terms().any(|(_, j, _, _)| j > 0)
    }

    pub fn depends_on_t(&self) -> bool {
        self.terms().any(|(_, _, k, _)| k > 0)
    }

    /// Substitutes `z := r`, where `r` is a series in `x` alone with zero
    /// constant term. Horner evaluation over the z-layers. Commutes with
    /// products only when `bounds.z >= bounds.x`, since powers of `z`
    /// beyond the bound would otherwise contribute in range.
    pub fn subst_z(&self, r: &Self) -> Result<Self, SeriesError> {
        self.check(r)?;
        if !r.coeffs[0].is_zero() || r.depends_on_z() || r.depends_on_t() {
            return Err(SeriesError::BadSubstitution);
        }
        let mut acc = self.z_layer(self.bounds.z);
        for j in (0..self.bounds.z).rev() {
            acc = acc.try_mul(r)?.try_add(&self.z_layer(j))?;
        }
        Ok(acc)
    }

    /// Substitutes `t := 1` by summing the t-layers.
    pub fn subst_t_one(&self) -> Self {
        let mut out = Self::zero(self.bounds);
        for (i, j, _, c) in self.terms() {
            let idx = out.index(i, j, 0);
            out.coeffs[idx] += c;
        }
        out
    }

    /// Drops all terms with `t`-degree below `k`.
    pub fn drop_t_below(&self, k: usize) -> Self {
        let mut out = self.clone();
        for idx in 0..out.coeffs.len() {
            if out.exponent(idx).2 < k {
                out.coeffs[idx] = BigRational::zero();
            }
        }
        out
    }

    /// Re-expresses the series inside `bounds` (dropping or zero-padding).
    pub fn with_bounds(&self, bounds: Bounds) -> Self {
        let mut out = Self::zero(bounds);
        for (i, j, k, c) in self.terms() {
            if bounds.contains(i, j, k) {
                let idx = out.index(i, j, k);
                out.coeffs[idx] = c.clone();
            }
        }
        out
    }

    /// Restriction to smaller bounds.
    pub fn restrict(&self, bounds: Bounds) -> Result<Self, SeriesError> {
        if !bounds.fits_in(&self.bounds) {
            return Err(SeriesError::BoundMismatch(self.bounds, bounds));
        }
        Ok(self.with_bounds(bounds))
    }

    /// Smallest `i` with a nonzero `x^i` term, if any.
    pub fn x_valuation(&self) -> Option<usize> {
        self.terms().map(|(i, _, _, _)| i).min()
    }

    pub fn t_valuation(&self) -> Option<usize> {
        self.terms().map(|(_, _, k, _)| k).min()
    }

    /// `n! · [xⁿ]` for a series with no remaining z or t dependence.
    pub fn egf_count(&self, n: usize) -> Result<BigInt, SeriesError> {
        if self.depends_on_z() || self.depends_on_t() {
            return Err(SeriesError::NotUnivariate);
        }
        self.egf_count_at(n, 0, 0)
    }

    /// `n! · [xⁿ zʲ tᵏ]`, required to be an integer.
    pub fn egf_count_at(&self, n: usize, j: usize, k: usize) -> Result<BigInt, SeriesError> {
        if !self.bounds.contains(n, j, k) {
            return Err(SeriesError::OutOfBounds { i: n, j, k, bounds: self.bounds });
        }
        let value = &self.coeffs[self.index(n, j, k)] * BigRational::from_integer(factorial(n));
        if value.is_integer() {
            Ok(value.to_integer())
        } else {
            Err(SeriesError::NonInteger { n, value })
        }
    }

    /// Largest absolute numerator, handy in diagnostics.
    pub fn max_abs_numerator(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.numer().abs()).max().unwrap_or_default()
    }
}

/// `ψ_n = Σ_{i=0}^{n} 2^{i(n-i)} / (i! (n-i)!)`.
pub fn psi_coefficient(n: usize) -> BigRational {
    let numer: BigInt = (0..=n).map(|i| binomial(n, i) << (i * (n - i))).sum();
    BigRational::new(numer, factorial(n))
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait<&TruncatedSeries> for &TruncatedSeries {
            type Output = TruncatedSeries;
            /// Panics when the bounds differ.
            fn $method(self, rhs: &TruncatedSeries) -> TruncatedSeries {
                self.$inner(rhs).expect("series bounds must match")
            }
        }
        impl $trait<TruncatedSeries> for TruncatedSeries {
            type Output = TruncatedSeries;
            fn $method(self, rhs: TruncatedSeries) -> TruncatedSeries {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&TruncatedSeries> for TruncatedSeries {
            type Output = TruncatedSeries;
            fn $method(self, rhs: &TruncatedSeries) -> TruncatedSeries {
                (&self).$method(rhs)
            }
        }
        impl $trait<TruncatedSeries> for &TruncatedSeries {
            type Output = TruncatedSeries;
            fn $method(self, rhs: TruncatedSeries) -> TruncatedSeries {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries { bounds: self.bounds, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        -&self
    }
}

/// 4×4 matrix of series with common bounds, indexed by quark type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesMatrix {
    entries: Vec<TruncatedSeries>,
}

pub const MATRIX_DIM: usize = 4;

impl SeriesMatrix {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> TruncatedSeries) -> Self {
        let entries: Vec<_> = (0..MATRIX_DIM * MATRIX_DIM).map(|idx| f(idx / MATRIX_DIM, idx % MATRIX_DIM)).collect();
        let b = entries[0].bounds;
        assert!(entries.iter().all(|e| e.bounds == b), "matrix entries must share bounds");
        SeriesMatrix { entries }
    }

    pub fn zero(bounds: Bounds) -> Self {
        Self::from_fn(|_, _| TruncatedSeries::zero(bounds))
    }

    pub fn identity(bounds: Bounds) -> Self {
        Self::from_fn(|r, c| if r == c { TruncatedSeries::one(bounds) } else { TruncatedSeries::zero(bounds) })
    }

    pub fn bounds(&self) -> Bounds {
        self.entries[0].bounds
    }

    pub fn get(&self, r: usize, c: usize) -> &TruncatedSeries {
        &self.entries[r * MATRIX_DIM + c]
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, SeriesError> {
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.try_add(b)).collect::<Result<_, _>>()?;
        Ok(SeriesMatrix { entries })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.try_sub(b)).collect::<Result<_, _>>()?;
        Ok(SeriesMatrix { entries })
    }

    pub fn mat_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.bounds() != other.bounds() {
            return Err(SeriesError::BoundMismatch(self.bounds(), other.bounds()));
        }
        let mut entries = Vec::with_capacity(MATRIX_DIM * MATRIX_DIM);
        for r in 0..MATRIX_DIM {
            for c in 0..MATRIX_DIM {
                let mut acc = TruncatedSeries::zero(self.bounds());
                for m in 0..MATRIX_DIM {
                    let (a, b) = (self.get(r, m), other.get(m, c));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.try_add(&a.try_mul(b)?)?;
                }
                entries.push(acc);
            }
        }
        Ok(SeriesMatrix { entries })
    }

    /// `(𝕀 − M)⁻¹ = Σ_{p=0}^{P} M^p`.
    ///
    /// Without `with_t` every entry must have x-valuation at least 2 and
    /// `P = ⌊Nx/2⌋`; with `with_t` every entry must carry a factor of `t`
    /// and `P = Nt`. When both hold the smaller cutoff is used.
    pub fn neumann_inverse(&self, with_t: bool) -> Result<Self, SeriesError> {
        let b = self.bounds();
        let x_ok = self.entries.iter().all(|e| e.x_valuation().map_or(true, |v| v >= 2));
        let t_ok = self.entries.iter().all(|e| e.t_valuation().map_or(true, |v| v >= 1));
        let cutoff = match (with_t, x_ok, t_ok) {
            (false, false, _) => return Err(SeriesError::Valuation("x (at least 2)")),
            (true, _, false) => return Err(SeriesError::Valuation("t")),
            (false, true, true) | (true, true, true) => (b.x / 2).min(b.t),
            (false, true, false) => b.x / 2,
            (true, false, true) => b.t,
        };
        let mut sum = Self::identity(b);
        let mut power = Self::identity(b);
        for _ in 0..cutoff {
            power = power.mat_mul(self)?;
            if power.entries.iter().all(TruncatedSeries::is_zero) {
                break;
            }
            sum = sum.try_add(&power)?;
        }
        Ok(sum)
    }

    /// `row · M`.
    pub fn left_mul(&self, row: &[TruncatedSeries; MATRIX_DIM]) -> Result<[TruncatedSeries; MATRIX_DIM], SeriesError> {
        let b = self.bounds();
        let mut out: [TruncatedSeries; MATRIX_DIM] = std::array::from_fn(|_| TruncatedSeries::zero(b));
        for (c, slot) in out.iter_mut().enumerate() {
            for (r, v) in row.iter().enumerate() {
                if v.is_zero() || self.get(r, c).is_zero() {
                    continue;
                }
                *slot = slot.try_add(&v.try_mul(self.get(r, c))?)?;
            }
        }
        Ok(out)
    }
}

/// `Σ row_i · col_i`.
pub fn dot(row: &[TruncatedSeries; MATRIX_DIM], col: &[TruncatedSeries; MATRIX_DIM]) -> Result<TruncatedSeries, SeriesError> {
    let mut acc = TruncatedSeries::zero(row[0].bounds);
    for (a, b) in row.iter().zip(col) {
        if a.is_zero() || b.is_zero() {
            continue;
        }
        acc = acc.try_add(&a.try_mul(b)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn constructors() {
        let b = Bounds::cube(4);
        let one = TruncatedSeries::monomial(b, q(1, 1), 0, 0, 0).unwrap();
        assert_eq!(one, TruncatedSeries::one(b));
        let x = TruncatedSeries::monomial(b, q(1, 1), 1, 0, 0).unwrap();
        assert_eq!(x, TruncatedSeries::x(b));
        assert!(TruncatedSeries::monomial(b, q(1, 1), 5, 0, 0).is_err());
    }

    #[test]
    fn ring_examples() {
        let b = Bounds::x_only(4);
        let one = TruncatedSeries::one(b);
        let x = TruncatedSeries::x(b);
        let prod = (&one + &x) * (&one - &x);
        let x2 = TruncatedSeries::monomial(b, q(1, 1), 2, 0, 0).unwrap();
        assert_eq!(prod, &one - &x2);
        let x4 = TruncatedSeries::monomial(b, q(1, 1), 4, 0, 0).unwrap();
        assert!((&x4 * &x).is_zero());
        let other = TruncatedSeries::one(Bounds::x_only(3));
        assert!(matches!(one.try_mul(&other), Err(SeriesError::BoundMismatch(..))));
    }

    #[test]
    fn inversion() {
        let b = Bounds::x_only(6);
        let geom = (TruncatedSeries::one(b) - TruncatedSeries::x(b)).invert().unwrap();
        for i in 0..=6 {
            assert_eq!(geom.coeff(i, 0, 0), q(1, 1));
        }
        assert_eq!(TruncatedSeries::one(b).invert().unwrap(), TruncatedSeries::one(b));
        assert_eq!(TruncatedSeries::x(b).invert(), Err(SeriesError::NotInvertible));
    }

    #[test]
    fn exponentials() {
        let b = Bounds::x_only(8);
        assert_eq!(TruncatedSeries::exp_x(b, 0), TruncatedSeries::one(b));
        assert_eq!(TruncatedSeries::exp_x(b, 1) * TruncatedSeries::exp_x(b, -1), TruncatedSeries::one(b));
        assert_eq!(TruncatedSeries::exp_x(b, 2).coeff(3, 0, 0), q(4, 3));
    }

    #[test]
    fn psi_coefficients() {
        assert_eq!(psi_coefficient(0), q(1, 1));
        assert_eq!(psi_coefficient(1), q(2, 1));
        assert_eq!(psi_coefficient(2), q(3, 1));
        assert_eq!(psi_coefficient(3), q(13, 3));
        let s = TruncatedSeries::psi(Bounds::x_only(5));
        assert_eq!(s.coeff(3, 0, 0), q(13, 3));
    }

    #[test]
    fn z_substitution() {
        let b = Bounds::xz(6);
        let r = TruncatedSeries::exp_x(b, 1) - TruncatedSeries::one(b);
        let z = TruncatedSeries::z(b);
        assert_eq!(z.subst_z(&r).unwrap(), r);
        let s = TruncatedSeries::one(b) + &z * &z;
        assert_eq!(s.subst_z(&r).unwrap().coeff(2, 0, 0), q(1, 1));
        let zero = TruncatedSeries::zero(b);
        let mixed = &TruncatedSeries::x(b) + &z;
        assert_eq!(mixed.subst_z(&zero).unwrap(), TruncatedSeries::x(b));
        assert_eq!(mixed.subst_z(&TruncatedSeries::one(b)), Err(SeriesError::BadSubstitution));
    }

    #[test]
    fn t_substitution() {
        let b = Bounds::cube(3);
        let t = TruncatedSeries::t(b);
        let s = &t + &(&t * &t);
        assert_eq!(s.subst_t_one(), TruncatedSeries::from_int(b, 2));
        let e = TruncatedSeries::exp_x(b, 1);
        assert_eq!(e.subst_t_one(), e);
    }

    #[test]
    fn egf_counts() {
        let b = Bounds::x_only(5);
        assert_eq!(TruncatedSeries::exp_x(b, 1).egf_count(5).unwrap(), BigInt::from(1));
        let half = TruncatedSeries::monomial(b, q(1, 3), 1, 0, 0).unwrap();
        assert!(matches!(half.egf_count(1), Err(SeriesError::NonInteger { .. })));
        let zb = Bounds::xz(2);
        assert_eq!(TruncatedSeries::z(zb).egf_count(0), Err(SeriesError::NotUnivariate));
    }

    #[test]
    fn neumann_examples() {
        let b = Bounds::x_only(8);
        let zero = SeriesMatrix::zero(b);
        assert_eq!(zero.neumann_inverse(false).unwrap(), SeriesMatrix::identity(b));
        let x2 = TruncatedSeries::monomial(b, q(1, 1), 2, 0, 0).unwrap();
        let m = SeriesMatrix::from_fn(|r, c| if r == 0 && c == 0 { x2.clone() } else { TruncatedSeries::zero(b) });
        let inv = m.neumann_inverse(false).unwrap();
        let expected = (TruncatedSeries::one(b) - &x2).invert().unwrap();
        assert_eq!(inv.get(0, 0), &expected);
        let x = TruncatedSeries::x(b);
        let bad = SeriesMatrix::from_fn(|_, _| x.clone());
        assert!(matches!(bad.neumann_inverse(false), Err(SeriesError::Valuation(_))));
        assert!(matches!(bad.neumann_inverse(true), Err(SeriesError::Valuation(_))));
    }
}
