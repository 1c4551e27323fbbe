//! Quark counts and the generating functions for graded (3+1)-avoiding
//! posets.
//!
//! Series conventions: `x` is exponential and marks labeled vertices, `z`
//! is ordinary and marks all-seeing placeholders of trimmed posets, `t` is
//! ordinary and marks height. Counting pipelines evaluate the transfer
//! matrix with `z` either kept symbolic and replaced by `e^x - 1` at the
//! end ([`ZSubstitution::Late`]) or replaced before any arithmetic
//! ([`ZSubstitution::Early`]). Substitution is a ring homomorphism, so both
//! give identical coefficients; the early form only needs series in `x`
//! and `t`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::series::{binomial, dot, Bounds, SeriesError, SeriesMatrix, TruncatedSeries, MATRIX_DIM};
use crate::structure::BType;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenfunError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("requested n = {requested} exceeds the configured order {order}")]
    OrderTooSmall { requested: usize, order: usize },
}

/// Constraint on one side of a bipartite graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum Constraint {
    Required,
    Forbidden,
    #[default]
    Free,
}

/// Restrictions defining a family of bipartite graphs on `[m] ⊎ [n]`:
/// whether some bottom (top) vertex must or must not be all-seeing, and
/// whether some bottom (top) vertex must or must not be isolated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct QuarkFamilyFlags {
    pub bottom_all_seeing: Constraint,
    pub top_all_seeing: Constraint,
    pub bottom_isolated: Constraint,
    pub top_isolated: Constraint,
}

impl QuarkFamilyFlags {
    /// All bipartite graphs.
    pub const ALL: Self = QuarkFamilyFlags {
        bottom_all_seeing: Constraint::Free,
        top_all_seeing: Constraint::Free,
        bottom_isolated: Constraint::Free,
        top_isolated: Constraint::Free,
    };

    /// Middle quarks: no all-seeing vertex on either side.
    pub const MIDDLE: Self = QuarkFamilyFlags {
        bottom_all_seeing: Constraint::Forbidden,
        top_all_seeing: Constraint::Forbidden,
        bottom_isolated: Constraint::Free,
        top_isolated: Constraint::Free,
    };

    /// Middle quarks of one type.
    pub fn of_type(b: BType) -> Self {
        let iso = |yes: bool| if yes { Constraint::Required } else { Constraint::Forbidden };
        QuarkFamilyFlags { bottom_isolated: iso(b.bottom_isolated()), top_isolated: iso(b.top_isolated()), ..Self::MIDDLE }
    }

    /// Whether a concrete graph satisfies the flags.
    pub fn accepts(&self, bottom_all_seeing: bool, top_all_seeing: bool, bottom_isolated: bool, top_isolated: bool) -> bool {
        let ok = |c: Constraint, v: bool| match c {
            Constraint::Required => v,
            Constraint::Forbidden => !v,
            Constraint::Free => true,
        };
        ok(self.bottom_all_seeing, bottom_all_seeing)
            && ok(self.top_all_seeing, top_all_seeing)
            && ok(self.bottom_isolated, bottom_isolated)
            && ok(self.top_isolated, top_isolated)
    }

    /// Every one of the 81 flag combinations.
    pub fn every() -> Vec<Self> {
        let cs = [Constraint::Required, Constraint::Forbidden, Constraint::Free];
        let mut out = Vec::with_capacity(81);
        for a in cs {
            for b in cs {
                for c in cs {
                    for d in cs {
                        out.push(QuarkFamilyFlags { bottom_all_seeing: a, top_all_seeing: b, bottom_isolated: c, top_isolated: d });
                    }
                }
            }
        }
        out
    }
}

/// Graphs in which every listed property is absent: full rows, full
/// columns, empty rows, empty columns. Inclusion-exclusion over the columns
/// forced full (`j`) or empty (`k`); rows are then independent.
fn count_avoiding(m: usize, n: usize, full_row: bool, full_col: bool, empty_row: bool, empty_col: bool) -> BigInt {
    let mut total = BigInt::zero();
    let max_j = if full_col { n } else { 0 };
    for j in 0..=max_j {
        let max_k = if empty_col { n - j } else { 0 };
        for k in 0..=max_k {
            let free = n - j - k;
            let mut options = BigInt::one() << free;
            if full_row && k == 0 {
                options -= 1;
            }
            if empty_row && j == 0 {
                options -= 1;
            }
            let term = binomial(n, j) * binomial(n - j, k) * num_traits::pow(options, m);
            if (j + k) % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
    }
    total
}

/// `|A^ν_μ(m, n)|` for the family described by `flags`; zero when `m` or
/// `n` is zero.
pub fn quark_family_count(m: usize, n: usize, flags: QuarkFamilyFlags) -> BigInt {
    if m == 0 || n == 0 {
        return BigInt::zero();
    }
    // Expand each Required flag as (no constraint) minus (forbidden).
    let props = [flags.bottom_all_seeing, flags.top_all_seeing, flags.bottom_isolated, flags.top_isolated];
    let required: Vec<usize> = (0..4).filter(|&i| props[i] == Constraint::Required).collect();
    let mut total = BigInt::zero();
    for subset in 0u32..(1 << required.len()) {
        let mut forbid = props.map(|c| c == Constraint::Forbidden);
        for (bit, &p) in required.iter().enumerate() {
            if subset >> bit & 1 == 1 {
                forbid[p] = true;
            }
        }
        let c = count_avoiding(m, n, forbid[0], forbid[1], forbid[2], forbid[3]);
        if subset.count_ones() % 2 == 0 {
            total += c;
        } else {
            total -= c;
        }
    }
    total
}

/// The F-series of a quark type, from its closed form in `e^{-x}` and `Ψ`.
pub fn f_series(b: BType, bounds: Bounds) -> TruncatedSeries {
    let one = TruncatedSeries::one(bounds);
    let em = TruncatedSeries::exp_x(bounds, -1);
    let psi = TruncatedSeries::psi(bounds);
    let one_minus = &one - &em;
    let two_em_minus = &em.scale_int(2) - &one;
    match b {
        BType::OO => &(&one_minus * &one_minus) * &psi,
        BType::OX | BType::XO => &one_minus * &(&(&two_em_minus * &psi) - &one),
        BType::XX => &two_em_minus * &(&(&two_em_minus * &psi) - &one),
    }
}

/// `Σ_{m,n ≥ 1} |B(m,n)| x^{m+n}/(m! n!)` evaluated from quark counts.
pub fn f_series_from_counts(b: BType, bounds: Bounds) -> TruncatedSeries {
    let mut s = TruncatedSeries::zero(bounds);
    let flags = QuarkFamilyFlags::of_type(b);
    for total in 2..=bounds.x {
        let mut c = num_rational::BigRational::zero();
        for m in 1..total {
            let count = quark_family_count(m, total - m, flags);
            c += num_rational::BigRational::new(count * binomial(total, m), crate::series::factorial(total));
        }
        s.set_coeff(total, 0, 0, c).expect("within bounds");
    }
    s
}

/// Where the all-seeing marker `z` is replaced by `e^x - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZSubstitution {
    /// Before the transfer-matrix arithmetic.
    #[default]
    Early,
    /// After inverting, on the full `(x, z)` series.
    Late,
}

/// Pipeline evaluation or the closed-form expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Pipeline,
    ClosedForm,
}

struct Blocks {
    f: [TruncatedSeries; MATRIX_DIM],
    z: TruncatedSeries,
    one: TruncatedSeries,
}

impl Blocks {
    fn new(bounds: Bounds, z: TruncatedSeries) -> Self {
        Blocks { f: BType::ALL.map(|b| f_series(b, bounds)), one: TruncatedSeries::one(bounds), z }
    }

    fn symbolic(bounds: Bounds) -> Self {
        Self::new(bounds, TruncatedSeries::z(bounds))
    }

    fn substituted(bounds: Bounds) -> Self {
        Self::new(bounds, exp_minus_one(bounds))
    }

    fn one_plus_z(&self) -> TruncatedSeries {
        &self.one + &self.z
    }

    /// `M`, optionally times `t`.
    fn matrix(&self, with_t: bool) -> SeriesMatrix {
        let bounds = self.one.bounds();
        let t = TruncatedSeries::t(bounds);
        SeriesMatrix::from_fn(|r, c| {
            let blocked = (r == 0 || r == 2) && (c == 0 || c == 1);
            let weight = if blocked { self.z.clone() } else { self.one_plus_z() };
            let e = &weight * &self.f[c];
            if with_t {
                &e * &t
            } else {
                e
            }
        })
    }

    /// `[zF∘∘, zF∘⊗, (1+z)F⊗∘, (1+z)F⊗⊗]`.
    fn row(&self) -> [TruncatedSeries; MATRIX_DIM] {
        let opz = self.one_plus_z();
        [&self.z * &self.f[0], &self.z * &self.f[1], &opz * &self.f[2], &opz * &self.f[3]]
    }

    /// `[F∘∘, F∘⊗, 0, 0]`: first quark may keep isolated top vertices.
    fn iso_row(&self) -> [TruncatedSeries; MATRIX_DIM] {
        let zero = TruncatedSeries::zero(self.one.bounds());
        [self.f[0].clone(), self.f[1].clone(), zero.clone(), zero]
    }

    /// `[z, 1+z, z, 1+z]ᵀ`.
    fn col(&self) -> [TruncatedSeries; MATRIX_DIM] {
        let opz = self.one_plus_z();
        [self.z.clone(), opz.clone(), self.z.clone(), opz]
    }

    /// `[1, 0, 1, 0]ᵀ`: last quark keeps isolated bottom vertices.
    fn iso_col(&self) -> [TruncatedSeries; MATRIX_DIM] {
        let zero = TruncatedSeries::zero(self.one.bounds());
        [self.one.clone(), zero.clone(), self.one.clone(), zero]
    }
}

fn exp_minus_one(bounds: Bounds) -> TruncatedSeries {
    &TruncatedSeries::exp_x(bounds, 1) - &TruncatedSeries::one(bounds)
}

/// `row · (𝕀 − M)⁻¹` by summing `row · M^p` until the terms vanish.
fn neumann_row(row: &[TruncatedSeries; MATRIX_DIM], m: &SeriesMatrix) -> Result<[TruncatedSeries; MATRIX_DIM], SeriesError> {
    // Each entry must vanish at x = t = 0 so that the powers `M^p` die out.
    let positive = (0..MATRIX_DIM).all(|r| (0..MATRIX_DIM).all(|c| m.get(r, c).terms().all(|(i, _, k, _)| i > 0 || k > 0)));
    if !positive {
        return Err(SeriesError::Valuation("x or t"));
    }
    let mut sum = row.clone();
    let mut v = row.clone();
    loop {
        v = m.left_mul(&v)?;
        if v.iter().all(TruncatedSeries::is_zero) {
            return Ok(sum);
        }
        for (s, e) in sum.iter_mut().zip(&v) {
            *s = s.try_add(e)?;
        }
    }
}

/// The transfer matrix `M` (or `tM`) with symbolic `z`.
pub fn transfer_matrix(with_t: bool, bounds: Bounds) -> SeriesMatrix {
    Blocks::symbolic(bounds).matrix(with_t)
}

fn indecomposable(blocks: &Blocks) -> Result<TruncatedSeries, SeriesError> {
    let m = blocks.matrix(false);
    let v = neumann_row(&blocks.row(), &m)?;
    Ok(&blocks.z + &dot(&v, &blocks.col())?)
}

/// `I(x, z) = z + row · (𝕀 − M)⁻¹ · col`: nonempty sum-indecomposable
/// trimmed (3+1)-avoiding posets.
pub fn strong_indecomposable_gf(bounds: Bounds) -> Result<TruncatedSeries, GenfunError> {
    Ok(indecomposable(&Blocks::symbolic(bounds))?)
}

/// `(1 − I(x,z))⁻¹`: trimmed strongly graded (3+1)-avoiding posets.
pub fn strong_trimmed_gf(bounds: Bounds) -> Result<TruncatedSeries, GenfunError> {
    let i = strong_indecomposable_gf(bounds)?;
    Ok((&TruncatedSeries::one(bounds) - &i).invert()?)
}

/// Strongly graded (3+1)-avoiding posets, exponential in `x`.
pub fn strong_gf(order: usize, method: Method) -> Result<TruncatedSeries, GenfunError> {
    match method {
        Method::Pipeline => strong_gf_with(order, ZSubstitution::Early),
        Method::ClosedForm => Ok(strong_closed_form(order)),
    }
}

pub fn strong_gf_with(order: usize, subst: ZSubstitution) -> Result<TruncatedSeries, GenfunError> {
    match subst {
        ZSubstitution::Early => {
            let bounds = Bounds::x_only(order);
            let blocks = Blocks::substituted(bounds);
            let i = indecomposable(&blocks)?;
            Ok((&blocks.one - &i).invert()?)
        }
        ZSubstitution::Late => {
            let bounds = Bounds::xz(order);
            let g = strong_trimmed_gf(bounds)?;
            let s = g.subst_z(&exp_minus_one(bounds))?;
            Ok(s.restrict(Bounds::x_only(order))?)
        }
    }
}

/// `1 + (e^{2x}(2e^x−3) + e^x(e^x−2)²Ψ) / (e^x(2e^x+1) + (e^{2x}−2e^x−1)Ψ)`.
pub fn strong_closed_form(order: usize) -> TruncatedSeries {
    let b = Bounds::x_only(order);
    let e = |c| TruncatedSeries::exp_x(b, c);
    let one = TruncatedSeries::one(b);
    let psi = TruncatedSeries::psi(b);
    let e1_minus_2 = &e(1) - &one.scale_int(2);
    let num = &(&e(2) * &(&e(1).scale_int(2) - &one.scale_int(3))) + &(&(&e(1) * &(&e1_minus_2 * &e1_minus_2)) * &psi);
    let den = &(&e(1) * &(&e(1).scale_int(2) + &one)) + &(&(&(&e(2) - &e(1).scale_int(2)) - &one) * &psi);
    &one + &(&num * &den.invert().expect("constant term 1"))
}

fn height_bounds(order: usize, subst: ZSubstitution) -> Bounds {
    match subst {
        ZSubstitution::Early => Bounds::new(order, 0, order),
        ZSubstitution::Late => Bounds::cube(order),
    }
}

fn blocks_for(bounds: Bounds, subst: ZSubstitution) -> Blocks {
    match subst {
        ZSubstitution::Early => Blocks::substituted(bounds),
        ZSubstitution::Late => Blocks::symbolic(bounds),
    }
}

fn finish(s: TruncatedSeries, subst: ZSubstitution, order: usize) -> Result<TruncatedSeries, GenfunError> {
    Ok(match subst {
        ZSubstitution::Early => s,
        ZSubstitution::Late => s.subst_z(&exp_minus_one(s.bounds()))?.restrict(Bounds::new(order, 0, order))?,
    })
}

/// `H_I = t² · row · (𝕀 − tM)⁻¹ · col`.
fn h_indecomposable(blocks: &Blocks, t2: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    let v = neumann_row(&blocks.row(), &blocks.matrix(true))?;
    Ok(t2 * &dot(&v, &blocks.col())?)
}

/// Strongly graded (3+1)-avoiding posets by vertices (`x`) and height (`t`).
pub fn strong_by_height_gf(order: usize) -> Result<TruncatedSeries, GenfunError> {
    strong_by_height_gf_with(order, ZSubstitution::Early)
}

pub fn strong_by_height_gf_with(order: usize, subst: ZSubstitution) -> Result<TruncatedSeries, GenfunError> {
    let bounds = height_bounds(order, subst);
    let blocks = blocks_for(bounds, subst);
    let t = TruncatedSeries::t(bounds);
    let t2 = &t * &t;
    let hi = h_indecomposable(&blocks, &t2)?;
    let ht = (&(&blocks.one - &(&t * &blocks.z)) - &hi).invert()?;
    finish(ht, subst, order)
}

/// The closed form for [`strong_by_height_gf`].
pub fn strong_by_height_closed_form(order: usize) -> TruncatedSeries {
    let b = Bounds::new(order, 0, order);
    let c = ClosedParts::new(b);
    let t = TruncatedSeries::t(b);
    let t2 = &t * &t;
    let em1 = &c.e1 - &c.one;
    let em1_sq = &em1 * &em1;
    let num_a = &c.e1 * &(&(&c.e1 + &(&t * &c.e2)) + &(&t2 * &em1_sq));
    let num_b = &(&t * &(&c.q + &(&(&t * &em1_sq) * &(&c.e1 - &c.one.scale_int(2))))) * &c.psi;
    &(&num_a + &num_b) * &c.height_denominator().invert().expect("constant term 1")
}

struct ClosedParts {
    one: TruncatedSeries,
    e1: TruncatedSeries,
    e2: TruncatedSeries,
    e3: TruncatedSeries,
    psi: TruncatedSeries,
    /// `1 − 3e^x + e^{2x}`.
    q: TruncatedSeries,
}

impl ClosedParts {
    fn new(b: Bounds) -> Self {
        let one = TruncatedSeries::one(b);
        let e1 = TruncatedSeries::exp_x(b, 1);
        let e2 = TruncatedSeries::exp_x(b, 2);
        let q = &(&one - &e1.scale_int(3)) + &e2;
        ClosedParts { e3: TruncatedSeries::exp_x(b, 3), psi: TruncatedSeries::psi(b), one, e1, e2, q }
    }

    /// `e^x(e^x + te^x + t²) + ((1 − 3e^x + e^{2x})t + (e^x − 2)t²)Ψ`.
    fn height_denominator(&self) -> TruncatedSeries {
        let t = TruncatedSeries::t(self.one.bounds());
        let t2 = &t * &t;
        let a = &self.e1 * &(&(&self.e1 + &(&t * &self.e1)) + &t2);
        let b = &(&(&self.q * &t) + &(&(&self.e1 - &self.one.scale_int(2)) * &t2)) * &self.psi;
        &a + &b
    }
}

/// Weakly graded posets of height at most 2:
/// `1 + t(e^x − 1) + t²(e^{−x}Ψ − e^x)`.
pub fn weak_short_gf(order: usize) -> TruncatedSeries {
    let b = Bounds::new(order, 0, order);
    let t = TruncatedSeries::t(b);
    let one = TruncatedSeries::one(b);
    let e1 = TruncatedSeries::exp_x(b, 1);
    let inner = &(&TruncatedSeries::exp_x(b, -1) * &TruncatedSeries::psi(b)) - &e1;
    &(&one + &(&t * &(&e1 - &one))) + &(&(&t * &t) * &inner)
}

/// Sum-indecomposables that cannot sit in a nontrivial ordinal sum:
/// `t² · [F∘∘, F∘⊗, 0, 0] · (𝕀 − tM)⁻¹ · [1, 0, 1, 0]ᵀ`, in `x, z, t`.
pub fn weak_unlayerable_gf(bounds: Bounds) -> Result<TruncatedSeries, GenfunError> {
    Ok(weak_parts(&Blocks::symbolic(bounds))?.unlayerable)
}

/// `(top, bot)`: sum-indecomposables that may only be the topmost
/// (bottommost) summand of a weakly graded poset, in `x, z, t`.
pub fn weak_top_bot_gf(bounds: Bounds) -> Result<(TruncatedSeries, TruncatedSeries), GenfunError> {
    let p = weak_parts(&Blocks::symbolic(bounds))?;
    Ok((p.top, p.bot))
}

struct WeakParts {
    unlayerable: TruncatedSeries,
    top: TruncatedSeries,
    bot: TruncatedSeries,
    indecomposable: TruncatedSeries,
}

fn weak_parts(blocks: &Blocks) -> Result<WeakParts, SeriesError> {
    let bounds = blocks.one.bounds();
    let t = TruncatedSeries::t(bounds);
    let t2 = &t * &t;
    let tm = blocks.matrix(true);
    let from_row = neumann_row(&blocks.row(), &tm)?;
    let from_iso = neumann_row(&blocks.iso_row(), &tm)?;
    let (col, iso_col) = (blocks.col(), blocks.iso_col());
    Ok(WeakParts {
        unlayerable: &t2 * &dot(&from_iso, &iso_col)?,
        top: &t2 * &dot(&from_row, &iso_col)?,
        bot: &t2 * &dot(&from_iso, &col)?,
        indecomposable: &t2 * &dot(&from_row, &col)?,
    })
}

/// Weakly graded (3+1)-avoiding posets by vertices and height.
pub fn weak_gf(order: usize, method: Method) -> Result<TruncatedSeries, GenfunError> {
    match method {
        Method::Pipeline => weak_gf_with(order, ZSubstitution::Early),
        Method::ClosedForm => Ok(weak_closed_form(order)),
    }
}

pub fn weak_gf_with(order: usize, subst: ZSubstitution) -> Result<TruncatedSeries, GenfunError> {
    let bounds = height_bounds(order, subst);
    let blocks = blocks_for(bounds, subst);
    let p = weak_parts(&blocks)?;
    let t = TruncatedSeries::t(bounds);
    // Summands stacked between the optional top and bottom layers are
    // strongly graded sum-indecomposables, including the single
    // placeholder of height one.
    let layers = (&(&blocks.one - &(&t * &blocks.z)) - &p.indecomposable).invert()?;
    let stacked = &(&(&blocks.one + &p.top) * &layers) * &(&blocks.one + &p.bot);
    let tall = finish(&p.unlayerable + &stacked, subst, order)?.drop_t_below(3);
    Ok(&tall + &weak_short_gf(order))
}

/// The closed form for [`weak_gf`].
pub fn weak_closed_form(order: usize) -> TruncatedSeries {
    let b = Bounds::new(order, 0, order);
    let c = ClosedParts::new(b);
    let t = TruncatedSeries::t(b);
    let t3 = &(&t * &t) * &t;
    let psi2 = &c.psi * &c.psi;
    let inner = &c.e1.scale_int(2) + &(&(&(&c.one + &c.e1.scale_int(2)) - &c.e2) * &t);
    let num = &(&(&c.e3 + &(&c.e3 * &t)) - &(&(&c.e1 * &inner) * &c.psi))
        - &(&(&c.q + &(&(&c.e1 - &c.one.scale_int(2)) * &t)) * &psi2);
    let tall = &(&t3 * &num) * &c.height_denominator().invert().expect("constant term 1");
    &weak_short_gf(order) + &tall
}

/// Weakly graded (3+1)-avoiding posets by vertices only.
pub fn weak_total_gf(order: usize, method: Method) -> Result<TruncatedSeries, GenfunError> {
    match method {
        Method::Pipeline => Ok(weak_gf(order, Method::Pipeline)?.subst_t_one().restrict(Bounds::x_only(order))?),
        Method::ClosedForm => Ok(weak_total_closed_form(order)),
    }
}

/// `(e^{−x} − 1)Ψ + (2e^{3x} + e^{2x}(e^x − 2)Ψ) / (e^x(2e^x + 1) + (e^{2x} − 2e^x − 1)Ψ)`.
pub fn weak_total_closed_form(order: usize) -> TruncatedSeries {
    let b = Bounds::x_only(order);
    let c = ClosedParts::new(b);
    let em = TruncatedSeries::exp_x(b, -1);
    let first = &(&em - &c.one) * &c.psi;
    let num = &c.e3.scale_int(2) + &(&(&c.e2 * &(&c.e1 - &c.one.scale_int(2))) * &c.psi);
    let den = &(&c.e1 * &(&c.e1.scale_int(2) + &c.one)) + &(&(&(&c.e2 - &c.e1.scale_int(2)) - &c.one) * &c.psi);
    &first + &(&num * &den.invert().expect("constant term 1"))
}

/// `1 + e^x(e^x − 1)(e^x − 2) / (e^{2x} − e^x − 1)`: strongly graded
/// posets avoiding both 3+1 and 2+2.
pub fn semiorder_gf(order: usize) -> TruncatedSeries {
    let b = Bounds::x_only(order);
    let one = TruncatedSeries::one(b);
    let e1 = TruncatedSeries::exp_x(b, 1);
    let num = &(&e1 * &(&e1 - &one)) * &(&e1 - &one.scale_int(2));
    let den = &(&TruncatedSeries::exp_x(b, 2) - &e1) - &one;
    &one + &(&num * &den.invert().expect("constant term -1"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountKind {
    Strong,
    Weak,
    StrongByHeight,
    WeakByHeight,
    Semiorder,
}

impl CountKind {
    pub fn by_height(self) -> bool {
        matches!(self, CountKind::StrongByHeight | CountKind::WeakByHeight)
    }
}

impl fmt::Display for CountKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountKind::Strong => "strong",
            CountKind::Weak => "weak",
            CountKind::StrongByHeight => "strong_by_height",
            CountKind::WeakByHeight => "weak_by_height",
            CountKind::Semiorder => "semiorder",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountRow {
    pub n: usize,
    pub k: Option<usize>,
    pub count: BigInt,
}

impl Serialize for CountRow {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CountRow", if self.k.is_some() { 3 } else { 2 })?;
        st.serialize_field("n", &self.n)?;
        if let Some(k) = self.k {
            st.serialize_field("k", &k)?;
        }
        st.serialize_field("count", &self.count.to_string())?;
        st.end()
    }
}

/// Counts indexed by `n`, optionally refined by height `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub kind: CountKind,
    pub counts: Vec<CountRow>,
}

impl CountTable {
    pub fn get(&self, n: usize, k: Option<usize>) -> Option<&BigInt> {
        self.counts.iter().find(|r| r.n == n && r.k == k).map(|r| &r.count)
    }

    /// Reads `n! [xⁿ tᵏ]` (or `n! [xⁿ]`) out of a series.
    pub fn from_series(kind: CountKind, s: &TruncatedSeries, max_n: usize) -> Result<Self, GenfunError> {
        let order = s.bounds().x;
        if max_n > order {
            return Err(GenfunError::OrderTooSmall { requested: max_n, order });
        }
        let mut counts = Vec::new();
        for n in 0..=max_n {
            if kind.by_height() {
                for k in 0..=n.min(s.bounds().t) {
                    let count = s.egf_count_at(n, 0, k)?;
                    // Height 0 only for the empty poset; heights above n never occur.
                    if k == 0 && n > 0 {
                        continue;
                    }
                    counts.push(CountRow { n, k: Some(k), count });
                }
            } else {
                counts.push(CountRow { n, k: None, count: s.egf_count(n)? });
            }
        }
        Ok(CountTable { kind, counts })
    }
}

/// Count table for `kind` up to `max_n`, computed through the pipelines.
pub fn count_table(kind: CountKind, max_n: usize) -> Result<CountTable, GenfunError> {
    let order = max_n.max(1);
    let series = match kind {
        CountKind::Strong => strong_gf(order, Method::Pipeline)?,
        CountKind::Weak => weak_total_gf(order, Method::Pipeline)?,
        CountKind::StrongByHeight => strong_by_height_gf(order)?,
        CountKind::WeakByHeight => weak_gf(order, Method::Pipeline)?,
        CountKind::Semiorder => semiorder_gf(order),
    };
    CountTable::from_series(kind, &series, max_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn pow(base: i64, e: usize) -> BigInt {
        num_traits::pow(BigInt::from(base), e)
    }

    #[test]
    fn quark_counts_match_small_closed_forms() {
        let any = QuarkFamilyFlags::ALL;
        assert_eq!(quark_family_count(2, 2, any), BigInt::from(16));
        assert_eq!(quark_family_count(1, 1, QuarkFamilyFlags::MIDDLE), BigInt::from(1));
        assert_eq!(quark_family_count(2, 2, QuarkFamilyFlags::MIDDLE), BigInt::from(7));
        assert_eq!(quark_family_count(0, 3, any), BigInt::zero());
        for m in 1..=5usize {
            for n in 1..=5usize {
                let no_iso_bottom = QuarkFamilyFlags { bottom_isolated: Constraint::Forbidden, ..any };
                assert_eq!(quark_family_count(m, n, no_iso_bottom), pow((1 << n) - 1, m));
                let no_all_bottom = QuarkFamilyFlags { bottom_all_seeing: Constraint::Forbidden, ..any };
                assert_eq!(quark_family_count(m, n, no_all_bottom), pow((1 << n) - 1, m));
                let both = QuarkFamilyFlags { bottom_isolated: Constraint::Forbidden, ..no_all_bottom };
                assert_eq!(quark_family_count(m, n, both), pow((1 << n) - 2, m));
                let b: BigInt = (0..=m)
                    .map(|i| {
                        let term = binomial(m, i) * pow((1 << (m - i)) - 1, n);
                        if i % 2 == 0 {
                            term
                        } else {
                            -term
                        }
                    })
                    .sum();
                assert_eq!(quark_family_count(m, n, QuarkFamilyFlags::MIDDLE), b);
                let b_iso = QuarkFamilyFlags { bottom_isolated: Constraint::Required, ..QuarkFamilyFlags::MIDDLE };
                assert_eq!(quark_family_count(m, n, b_iso), pow((1 << n) - 1, m) - pow((1 << n) - 2, m));
                let oo = quark_family_count(m, n, QuarkFamilyFlags::of_type(BType::OO));
                let no_iso_top = QuarkFamilyFlags { top_isolated: Constraint::Forbidden, ..any };
                let expected = pow(2, m * n) - quark_family_count(m, n, no_iso_top) - quark_family_count(m, n, no_iso_bottom) + &b;
                assert_eq!(oo, expected);
                let split: BigInt = BType::ALL.iter().map(|&t| quark_family_count(m, n, QuarkFamilyFlags::of_type(t))).sum();
                assert_eq!(split, b);
            }
        }
    }

    #[test]
    fn f_series_low_coefficients() {
        let b = Bounds::x_only(8);
        let foo = f_series(BType::OO, b);
        assert_eq!(foo.coeff(0, 0, 0), q(0, 1));
        assert_eq!(foo.coeff(1, 0, 0), q(0, 1));
        assert_eq!(foo.coeff(2, 0, 0), q(1, 1));
        assert_eq!(foo.coeff(3, 0, 0), q(1, 1));
        for t in BType::ALL {
            assert_eq!(f_series(t, b), f_series_from_counts(t, b), "{t}");
        }
    }

    #[test]
    fn transfer_matrix_entries() {
        let b = Bounds::xz(6);
        let m = transfer_matrix(false, b);
        let z = TruncatedSeries::z(b);
        let one_z = &TruncatedSeries::one(b) + &z;
        assert_eq!(m.get(0, 0), &(&z * &f_series(BType::OO, b)));
        assert_eq!(m.get(1, 0), &(&one_z * &f_series(BType::OO, b)));
        assert_eq!(m.get(2, 3), &(&one_z * &f_series(BType::XX, b)));
        let at_zero = SeriesMatrix::from_fn(|r, c| m.get(r, c).subst_z(&TruncatedSeries::zero(b)).unwrap());
        for r in 0..4 {
            for c in 0..4 {
                let blocked = (r == 0 || r == 2) && c < 2;
                let expected = if blocked { TruncatedSeries::zero(b) } else { f_series(BType::ALL[c], b) };
                assert_eq!(at_zero.get(r, c), &expected);
            }
        }
    }

    #[test]
    fn indecomposable_low_terms() {
        let i = strong_indecomposable_gf(Bounds::xz(4)).unwrap();
        assert_eq!(i.coeff(0, 1, 0), q(1, 1));
        assert_eq!(i.coeff(2, 2, 0), q(1, 1));
        assert_eq!(i.coeff(0, 0, 0), q(0, 1));
    }

    #[test]
    fn strong_counts() {
        let s = strong_gf(6, Method::Pipeline).unwrap();
        let counts: Vec<_> = (0..=6).map(|n| s.egf_count(n).unwrap()).collect();
        assert_eq!(counts, ints(&[1, 1, 3, 13, 111, 1381, 22383]));
    }

    #[test]
    fn strong_substitution_orders_agree() {
        assert_eq!(strong_gf_with(8, ZSubstitution::Early).unwrap(), strong_gf_with(8, ZSubstitution::Late).unwrap());
        assert_eq!(strong_gf(10, Method::Pipeline).unwrap(), strong_closed_form(10));
    }

    #[test]
    fn height_tables() {
        let h = strong_by_height_gf(6).unwrap();
        assert_eq!(h.egf_count_at(4, 0, 2).unwrap(), BigInt::from(50));
        assert_eq!(h.egf_count_at(6, 0, 6).unwrap(), BigInt::from(720));
        assert_eq!(h.subst_t_one().egf_count_at(4, 0, 0).unwrap(), BigInt::from(111));
        assert_eq!(h, strong_by_height_closed_form(6));
        assert_eq!(strong_by_height_gf_with(6, ZSubstitution::Late).unwrap(), h);
    }

    #[test]
    fn weak_tables() {
        let short = weak_short_gf(4);
        assert_eq!(short.egf_count_at(2, 0, 2).unwrap(), BigInt::from(2));
        assert_eq!(short.egf_count_at(3, 0, 2).unwrap(), BigInt::from(12));
        assert_eq!(short.egf_count_at(4, 0, 2).unwrap(), BigInt::from(86));
        let w = weak_gf(6, Method::Pipeline).unwrap();
        assert_eq!(w.egf_count_at(5, 0, 3).unwrap(), BigInt::from(1110));
        assert_eq!(w, weak_closed_form(6));
        let total = weak_total_gf(6, Method::Pipeline).unwrap();
        let counts: Vec<_> = (0..=6).map(|n| total.egf_count(n).unwrap()).collect();
        assert_eq!(counts, ints(&[1, 1, 3, 19, 195, 2551, 41343]));
        assert_eq!(total, weak_total_closed_form(6));
    }

    #[test]
    fn weak_parts_lowest_layers() {
        let b = Bounds::cube(6);
        let zero = TruncatedSeries::zero(b);
        let (top, bot) = weak_top_bot_gf(b).unwrap();
        let unl = weak_unlayerable_gf(b).unwrap();
        let f = |t| f_series(t, b);
        let t2 = |s: &TruncatedSeries| s.t_layer(2).subst_z(&zero).unwrap();
        assert_eq!(t2(&top), f(BType::XO));
        assert_eq!(t2(&bot), f(BType::OX));
        assert_eq!(unl.t_layer(2), f(BType::OO));
    }

    #[test]
    fn semiorder_low_counts() {
        let s = semiorder_gf(5);
        assert_eq!(s.egf_count(0).unwrap(), BigInt::from(1));
        assert_eq!(s.egf_count(1).unwrap(), BigInt::from(1));
        assert_eq!(s.egf_count(2).unwrap(), BigInt::from(3));
    }

    #[test]
    fn count_table_json() {
        let t = count_table(CountKind::Strong, 3).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(
            json,
            r#"{"kind":"strong","counts":[{"n":0,"count":"1"},{"n":1,"count":"1"},{"n":2,"count":"3"},{"n":3,"count":"13"}]}"#
        );
        let h = count_table(CountKind::WeakByHeight, 3).unwrap();
        assert_eq!(h.get(3, Some(2)), Some(&BigInt::from(12)));
        assert_eq!(h.get(0, Some(0)), Some(&BigInt::from(1)));
    }
}
