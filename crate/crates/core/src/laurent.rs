//! Exact scalars, Laurent polynomials and square matrices of Laurent polynomials.
//!
//! `C((z))` is modelled by its subalgebra `Q[z, z^-1]`: every operator, cocycle
//! and residue evaluated elsewhere in the crate only ever touches finitely many
//! coefficients, so a finitely supported map `exponent -> coefficient` is enough.
//!
//! Exponent arithmetic is checked. Overflow is a bug in the caller (the
//! computations here never get near `i64::MAX`) and panics instead of wrapping.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Shorthand for an integer-valued [`Rational`].
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `p/q` as a [`Rational`]. Panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub(crate) fn add_exp(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("Laurent exponent overflow")
}

/// A Laurent polynomial with rational coefficients in canonical form: no zero
/// coefficient is ever stored, so structural equality is mathematical equality.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, 0)
    }

    /// `z^e`
    pub fn monomial(e: i64) -> Self {
        Self::term(Rational::one(), e)
    }

    /// `c * z^e`
    pub fn term(c: Rational, e: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(e, c);
        }
        Self { coeffs }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `z^e` (zero when absent).
    pub fn coeff(&self, e: i64) -> Rational {
        self.coeffs.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Iterates over nonzero `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> + '_ {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (add_exp(*e, k), c.clone()))
                .collect(),
        }
    }

    /// `d/dz`
    pub fn derive(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| **e != 0)
                .map(|(e, c)| (add_exp(*e, -1), c * rat(*e)))
                .collect(),
        }
    }

    /// `k`-th derivative.
    pub fn derive_n(&self, k: usize) -> Self {
        let mut p = self.clone();
        for _ in 0..k {
            if p.is_zero() {
                break;
            }
            p = p.derive();
        }
        p
    }

    /// `Res_{z=0} f dz`, the coefficient of `z^-1`.
    pub fn residue(&self) -> Rational {
        self.coeff(-1)
    }

    /// Keeps only the terms whose exponent lies in `lo..=hi`.
    pub fn truncate(&self, lo: i64, hi: i64) -> Self {
        Self {
            coeffs: self
                .coeffs
                .range(lo..=hi)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (e, c)) in self.coeffs.iter().enumerate() {
            let mag = c.abs();
            if idx == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            match (*e, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("z")?,
                (1, false) => write!(f, "{mag}*z")?,
                (e, true) => write!(f, "z^{e}")?,
                (e, false) => write!(f, "{mag}*z^{e}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl<'a> AddAssign<&'a LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &'a LaurentPoly) {
        for (e, c) in &rhs.coeffs {
            self.add_term(*e, c.clone());
        }
    }
}

impl<'a> SubAssign<&'a LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &'a LaurentPoly) {
        for (e, c) in &rhs.coeffs {
            self.add_term(*e, -c.clone());
        }
    }
}

impl<'a> Sub<&'a LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self -= &rhs;
        self
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl<'a> Mul<&'a LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &rhs.coeffs {
                out.add_term(add_exp(*ea, *eb), ca * cb);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl From<Rational> for LaurentPoly {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

/// Parses `c*z^e` sums, e.g. `3*z^-2 + 1/2*z - z^3 + 7`. Whitespace is ignored.
impl FromStr for LaurentPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<(usize, char)> = s.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        let err = |pos: usize, msg: &str| Error::Parse {
            pos,
            msg: msg.to_string(),
        };
        if chars.is_empty() {
            return Err(err(0, "empty input"));
        }
        let mut i = 0;
        let mut out = LaurentPoly::zero();
        let pos_of = |i: usize| chars.get(i).map(|(p, _)| *p).unwrap_or(s.len());
        loop {
            let mut sign = Rational::one();
            if i > 0 || matches!(chars[0].1, '+' | '-') {
                match chars.get(i).map(|c| c.1) {
                    Some('+') => i += 1,
                    Some('-') => {
                        sign = -sign;
                        i += 1
                    }
                    _ => return Err(err(pos_of(i), "expected '+' or '-'")),
                }
            }
            // coefficient
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '/') {
                i += 1;
            }
            let coeff = if i > start {
                let text: String = chars[start..i].iter().map(|c| c.1).collect();
                let c = Rational::from_str(&text).map_err(|_| err(pos_of(start), "bad rational"))?;
                match chars.get(i).map(|c| c.1) {
                    Some('*') => {
                        i += 1;
                        if chars.get(i).map(|c| c.1) != Some('z') {
                            return Err(err(pos_of(i), "expected 'z' after '*'"));
                        }
                    }
                    Some('z') => return Err(err(pos_of(i), "expected '*' before 'z'")),
                    _ => {}
                }
                Some(c)
            } else {
                None
            };
            let mut exp = 0i64;
            if chars.get(i).map(|c| c.1) == Some('z') {
                i += 1;
                exp = 1;
                if chars.get(i).map(|c| c.1) == Some('^') {
                    i += 1;
                    let es = i;
                    if matches!(chars.get(i).map(|c| c.1), Some('-') | Some('+')) {
                        i += 1;
                    }
                    while i < chars.len() && chars[i].1.is_ascii_digit() {
                        i += 1;
                    }
                    let text: String = chars[es..i].iter().map(|c| c.1).collect();
                    exp = text.parse().map_err(|_| err(pos_of(es), "bad exponent"))?;
                }
            } else if coeff.is_none() {
                return Err(err(pos_of(i), "expected a rational or 'z'"));
            }
            let c = coeff.unwrap_or_else(Rational::one) * sign;
            out.add_term(exp, c);
            if i >= chars.len() {
                break;
            }
        }
        Ok(out)
    }
}

/// An `n x n` matrix of Laurent polynomials, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatLaurent {
    rank: usize,
    entries: Vec<LaurentPoly>,
}

impl MatLaurent {
    pub fn zero(rank: usize) -> Self {
        assert!(rank > 0, "rank must be positive");
        Self {
            rank,
            entries: vec![LaurentPoly::zero(); rank * rank],
        }
    }

    pub fn identity(rank: usize) -> Self {
        Self::scalar(rank, LaurentPoly::one())
    }

    /// `f * Id`
    pub fn scalar(rank: usize, f: LaurentPoly) -> Self {
        let mut m = Self::zero(rank);
        for i in 0..rank {
            m.entries[i * rank + i] = f.clone();
        }
        m
    }

    /// Matrix with `f` in entry `(i, j)` (zero-based) and zero elsewhere.
    pub fn unit(rank: usize, i: usize, j: usize, f: LaurentPoly) -> Result<Self> {
        if i >= rank || j >= rank {
            return Err(Error::IndexOutOfRange {
                i: i + 1,
                j: j + 1,
                n: rank,
            });
        }
        let mut m = Self::zero(rank);
        m.entries[i * rank + j] = f;
        Ok(m)
    }

    /// Builds from row-major entries; `entries.len()` must be a perfect square.
    pub fn from_rows(rows: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        let rank = rows.len();
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        let mut entries = Vec::with_capacity(rank * rank);
        for row in rows {
            if row.len() != rank {
                return Err(Error::LengthMismatch { len: row.len(), n: rank });
            }
            entries.extend(row);
        }
        Ok(Self { rank, entries })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Zero-based entry access.
    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.rank + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: LaurentPoly) {
        self.entries[i * self.rank + j] = f;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LaurentPoly::is_zero)
    }

    /// If the matrix equals `f * Id`, returns `f`.
    pub fn as_scalar(&self) -> Option<LaurentPoly> {
        let n = self.rank;
        let f = self.get(0, 0);
        for i in 0..n {
            for j in 0..n {
                let e = self.get(i, j);
                if (i == j && e != f) || (i != j && !e.is_zero()) {
                    return None;
                }
            }
        }
        Some(f.clone())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            rank: self.rank,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            rank: self.rank,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.rank;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * n + j] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `[A, B] = AB - BA`
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn trace(&self) -> LaurentPoly {
        let mut t = LaurentPoly::zero();
        for i in 0..self.rank {
            t += self.get(i, i);
        }
        t
    }

    /// Multiplies every entry by the scalar function `f`.
    pub fn scale_by(&self, f: &LaurentPoly) -> Self {
        self.map(|e| e * f)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|e| e.scale(c))
    }

    pub fn neg(&self) -> Self {
        self.map(|e| -e)
    }

    /// Entrywise `d/dz`.
    pub fn derive(&self) -> Self {
        self.map(LaurentPoly::derive)
    }

    pub fn derive_n(&self, k: usize) -> Self {
        self.map(|e| e.derive_n(k))
    }

    pub fn map(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> Self {
        Self {
            rank: self.rank,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// `A v` for a column vector `v` of length `rank`.
    pub fn apply(&self, v: &[LaurentPoly]) -> Result<Vec<LaurentPoly>> {
        if v.len() != self.rank {
            return Err(Error::LengthMismatch {
                len: v.len(),
                n: self.rank,
            });
        }
        let n = self.rank;
        Ok((0..n)
            .map(|i| {
                let mut acc = LaurentPoly::zero();
                for (j, vj) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !vj.is_zero() {
                        acc += &(a * vj);
                    }
                }
                acc
            })
            .collect())
    }

    /// Smallest and largest exponent appearing in any entry.
    pub fn exp_range(&self) -> Option<(i64, i64)> {
        self.entries
            .iter()
            .filter_map(|e| Some((e.min_exp()?, e.max_exp()?)))
            .reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
    }
}

impl fmt::Debug for MatLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatLaurent{self}")
    }
}

impl fmt::Display for MatLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rank {
            if i > 0 {
                f.write_str("; ")?;
            }
            for j in 0..self.rank {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn add_examples() {
        assert!((p("z^-1") + p("-z^-1")).is_zero());
        assert_eq!(p("2*z + 1") + p("3*z"), p("5*z + 1"));
        assert_eq!(p("z^2") + p("z^-2"), LaurentPoly::from_terms([(2, rat(1)), (-2, rat(1))]));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(p("z^3") * p("z^-1"), LaurentPoly::monomial(2));
        assert_eq!(p("z + 1") * p("z - 1"), p("z^2 - 1"));
        assert!((LaurentPoly::zero() * p("z^-5")).is_zero());
    }

    #[test]
    fn derive_examples() {
        assert_eq!(p("z^-1").derive(), p("-z^-2"));
        assert_eq!(p("z^3").derive(), p("3*z^2"));
        assert!(p("5").derive().is_zero());
    }

    #[test]
    fn residue_examples() {
        assert_eq!(p("3*z^-1 + 2").residue(), rat(3));
        assert_eq!(p("z^-2").residue(), rat(0));
        assert_eq!((p("z^3") * p("-6*z^-4")).residue(), rat(-6));
    }

    #[test]
    fn parse_and_display() {
        let f = p("3*z^-2 + 1/2*z");
        assert_eq!(f.coeff(-2), rat(3));
        assert_eq!(f.coeff(1), ratio(1, 2));
        assert_eq!(f.to_string(), "3*z^-2 + 1/2*z");
        assert_eq!(p(" - z ^ 3 + 7 ").to_string(), "7 - z^3");
        assert_eq!(p("2/4*z^0").to_string(), "1/2");
        assert_eq!(p("0").to_string(), "0");
        for s in ["", "z^", "3*", "+", "3 z", "1/0"] {
            assert!(s.parse::<LaurentPoly>().is_err(), "{s:?} should fail");
        }
    }

    #[test]
    fn canonical_form_strips_zeros() {
        let f = LaurentPoly::from_terms([(1, rat(2)), (1, rat(-2)), (0, rat(0))]);
        assert!(f.is_zero());
        assert_eq!(f, LaurentPoly::zero());
    }

    #[test]
    fn matrix_trace_and_commutator() {
        let m = MatLaurent::scalar(2, LaurentPoly::monomial(-1));
        assert_eq!(m.trace(), p("2*z^-1"));

        let e12 = MatLaurent::unit(2, 0, 1, LaurentPoly::monomial(1)).unwrap();
        let e21 = MatLaurent::unit(2, 1, 0, LaurentPoly::monomial(2)).unwrap();
        let mut expected = MatLaurent::zero(2);
        expected.set(0, 0, p("z^3"));
        expected.set(1, 1, p("-z^3"));
        assert_eq!(e12.commutator(&e21).unwrap(), expected);
        assert!(e12.commutator(&e12).unwrap().is_zero());
    }

    #[test]
    fn matrix_rank_mismatch() {
        let a = MatLaurent::identity(2);
        let b = MatLaurent::identity(3);
        assert_eq!(a.mul(&b), Err(Error::RankMismatch { left: 2, right: 3 }));
        assert!(a.add(&b).is_err());
        assert!(MatLaurent::unit(2, 2, 0, LaurentPoly::one()).is_err());
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn exponent_overflow_is_fatal() {
        let _ = LaurentPoly::monomial(i64::MAX).shift(1);
    }
}
