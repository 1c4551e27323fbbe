//! `ψ_n`, the theta constants in its asymptotics, and the ratios
//! `g_n / (n! ψ_n)` and `w_n / (n! ψ_n)`.
//!
//! Decimal outputs are fixed-point with [`DIGITS`] fractional digits, held
//! as scaled big integers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::genfun::{strong_gf, weak_total_gf, GenfunError, Method};
use crate::series::{binomial, factorial};

/// Fractional digits carried by [`Decimal`].
pub const DIGITS: usize = 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AsymptoticsError {
    #[error("theta sums need at least 10 terms, got {0}")]
    TooFewTerms(usize),
    #[error("ratio report needs max_n >= 1")]
    EmptyRange,
    #[error(transparent)]
    Genfun(#[from] GenfunError),
}

/// A fixed-point decimal: `scaled / 10^DIGITS`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decimal {
    scaled: BigInt,
}

fn scale() -> BigInt {
    num_traits::pow(BigInt::from(10), DIGITS)
}

/// Rounds `num / den` to the nearest integer, halves away from zero.
fn round_div(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.abs().div_rem(&den.abs());
    let q = if r * 2 >= den.abs() { q + 1 } else { q };
    if num.is_negative() != den.is_negative() {
        -q
    } else {
        q
    }
}

impl Decimal {
    pub fn from_rational(q: &BigRational) -> Self {
        Decimal { scaled: round_div(&(q.numer() * scale()), q.denom()) }
    }

    pub fn scaled(&self) -> &BigInt {
        &self.scaled
    }

    /// Rounded to `digits` fractional digits.
    pub fn round_to(&self, digits: usize) -> String {
        let digits = digits.min(DIGITS);
        let drop = num_traits::pow(BigInt::from(10), DIGITS - digits);
        format_scaled(&round_div(&self.scaled, &drop), digits)
    }

    pub fn abs_diff(&self, other: &Decimal) -> Decimal {
        Decimal { scaled: (&self.scaled - &other.scaled).abs() }
    }
}

fn format_scaled(v: &BigInt, digits: usize) -> String {
    let sign = if v.is_negative() { "-" } else { "" };
    let s = v.abs().to_string();
    if digits == 0 {
        return format!("{sign}{s}");
    }
    let s = format!("{s:0>width$}", width = digits + 1);
    let (int, frac) = s.split_at(s.len() - digits);
    format!("{sign}{int}.{frac}")
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_scaled(&self.scaled, DIGITS))
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `ψ_n = Σ_i 2^{i(n-i)} / (i! (n-i)!)`.
pub fn psi_exact(n: usize) -> BigRational {
    let num: BigInt = (0..=n).map(|i| binomial(n, i) << (i * (n - i))).sum();
    BigRational::new(num, factorial(n))
}

/// Partial theta sums `C₁ = Σ_{i∈ℤ} 2^{-i²}` and
/// `C₂ = 2^{1/4} ϑ₂(0, 1/2) = 2 Σ_{k≥0} 2^{-k(k+1)}`, with `|i|, k ≤ terms`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThetaConstants {
    pub terms: usize,
    pub c1: Decimal,
    pub c2: Decimal,
    /// Bound `2·2^{-terms²}` on the omitted tail of either sum.
    pub error_bound: Decimal,
}

pub fn theta_constants(terms: usize) -> Result<ThetaConstants, AsymptoticsError> {
    if terms < 10 {
        return Err(AsymptoticsError::TooFewTerms(terms));
    }
    Ok(ThetaConstants {
        terms,
        c1: Decimal::from_rational(&theta_exact(terms, false)),
        c2: Decimal::from_rational(&theta_exact(terms, true)),
        error_bound: Decimal::from_rational(&BigRational::new(BigInt::from(2), BigInt::one() << (terms * terms))),
    })
}

fn theta_exact(terms: usize, odd: bool) -> BigRational {
    let pow2_inv = |e: usize| BigRational::new(BigInt::one(), BigInt::one() << e);
    if odd {
        (0..=terms).map(|k| pow2_inv(k * (k + 1)) * BigInt::from(2)).sum()
    } else {
        BigRational::one() + (1..=terms).map(|i| pow2_inv(i * i) * BigInt::from(2)).sum::<BigRational>()
    }
}

/// `2^{⌊n/2⌋⌈n/2⌉} / (⌊n/2⌋! ⌈n/2⌉!)`, the size of the central term.
pub fn central_term(n: usize) -> BigRational {
    let (a, b) = (n / 2, n - n / 2);
    BigRational::new(BigInt::one() << (a * b), factorial(a) * factorial(b))
}

/// `ψ_n / central_term(n)`, which lies in `[1, C)` with `C` the theta
/// constant of the parity of `n`.
pub fn psi_normalized(n: usize) -> BigRational {
    psi_exact(n) / central_term(n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymptoticRow {
    pub n: usize,
    pub psi: BigRational,
    pub predicted: Decimal,
    pub ratio_psi: Decimal,
    pub ratio_strong: Decimal,
    pub ratio_weak: Decimal,
    /// Exact ratios, for comparisons that must not depend on rounding.
    pub exact_strong: BigRational,
    pub exact_weak: BigRational,
}

impl Serialize for AsymptoticRow {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("AsymptoticRow", 6)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("psi_n", &self.psi.to_string())?;
        st.serialize_field("predicted", &self.predicted)?;
        st.serialize_field("ratio_psi", &self.ratio_psi)?;
        st.serialize_field("ratio_strong", &self.ratio_strong)?;
        st.serialize_field("ratio_weak", &self.ratio_weak)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AsymptoticReport {
    pub theta: ThetaConstants,
    pub rows: Vec<AsymptoticRow>,
}

impl AsymptoticReport {
    pub const CSV_HEADER: &'static str = "n,psi_n,predicted,ratio_psi,ratio_strong,ratio_weak";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n, r.psi, r.predicted, r.ratio_psi, r.ratio_strong, r.ratio_weak
            ));
        }
        out
    }
}

/// Rows `1..=max_n`, with theta constants summed to `terms`.
pub fn ratio_report(max_n: usize, terms: usize) -> Result<AsymptoticReport, AsymptoticsError> {
    if max_n == 0 {
        return Err(AsymptoticsError::EmptyRange);
    }
    let theta = theta_constants(terms)?;
    let strong = strong_gf(max_n, Method::Pipeline)?;
    let weak = weak_total_gf(max_n, Method::Pipeline)?;
    let (c1, c2) = (theta_exact(terms, false), theta_exact(terms, true));
    let mut rows = Vec::with_capacity(max_n);
    for n in 1..=max_n {
        let psi = psi_exact(n);
        let c = if n % 2 == 0 { &c1 } else { &c2 };
        let predicted = c * central_term(n);
        let scale = BigRational::from_integer(factorial(n)) * &psi;
        let g = BigRational::from_integer(strong.egf_count(n).map_err(GenfunError::from)?);
        let w = BigRational::from_integer(weak.egf_count(n).map_err(GenfunError::from)?);
        let exact_strong = g / &scale;
        let exact_weak = w / &scale;
        rows.push(AsymptoticRow {
            n,
            predicted: Decimal::from_rational(&predicted),
            ratio_psi: Decimal::from_rational(&(&psi / &predicted)),
            ratio_strong: Decimal::from_rational(&exact_strong),
            ratio_weak: Decimal::from_rational(&exact_weak),
            psi,
            exact_strong,
            exact_weak,
        });
    }
    Ok(AsymptoticReport { theta, rows })
}
