//! Differential operators with matrix Laurent coefficients.
//!
//! [`FirstOrderOp`] is the Lie algebra of semilinear infinitesimal automorphisms
//! of `C((z))^n`: operators `gamma + f d/dz` whose order-one part is a scalar.
//! [`DiffOp`] holds operators of arbitrary finite order and is only needed for
//! the `W_{1+infinity}` cocycle and for checking brackets against composition.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::laurent::{rat, LaurentPoly, MatLaurent, Rational};

/// `sum_k A_k d^k/dz^k` with the coefficient matrices on the left.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DiffOp {
    rank: usize,
    coeffs: Vec<MatLaurent>,
}

fn binomial(n: usize, k: usize) -> Rational {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

impl DiffOp {
    /// Builds `sum_k coeffs[k] d^k`; trailing zero coefficients are dropped.
    pub fn new(rank: usize, coeffs: Vec<MatLaurent>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        if let Some(bad) = coeffs.iter().find(|c| c.rank() != rank) {
            return Err(Error::RankMismatch {
                left: rank,
                right: bad.rank(),
            });
        }
        let mut op = Self { rank, coeffs };
        op.normalize();
        Ok(op)
    }

    pub fn zero(rank: usize) -> Self {
        Self {
            rank,
            coeffs: Vec::new(),
        }
    }

    /// Multiplication operator by `a`.
    pub fn multiplication(a: MatLaurent) -> Self {
        let rank = a.rank();
        Self::monomial(a, 0, rank)
    }

    /// `a d^k`
    pub fn monomial(a: MatLaurent, k: usize, rank: usize) -> Self {
        let mut coeffs = vec![MatLaurent::zero(rank); k];
        coeffs.push(a);
        let mut op = Self { rank, coeffs };
        op.normalize();
        op
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(MatLaurent::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Order of the operator; `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `d^k` (zero past the order).
    pub fn coeff(&self, k: usize) -> MatLaurent {
        self.coeffs.get(k).cloned().unwrap_or_else(|| MatLaurent::zero(self.rank))
    }

    /// Nonzero order-homogeneous parts `(k, A_k)`.
    pub fn parts(&self) -> impl Iterator<Item = (usize, &MatLaurent)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero())
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
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| self.coeff(k).add(&other.coeff(k)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.rank, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut op = Self {
            rank: self.rank,
            coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect(),
        };
        op.normalize();
        op
    }

    /// Operator composition `self ∘ other`, expanding `d^j ∘ B = sum_m C(j,m) B^(m) d^(j-m)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.rank));
        }
        let len = self.coeffs.len() + other.coeffs.len() - 1;
        let mut out = vec![MatLaurent::zero(self.rank); len];
        for (j, a) in self.parts() {
            for (k, b) in other.parts() {
                for m in 0..=j {
                    let db = b.derive_n(m);
                    if db.is_zero() {
                        continue;
                    }
                    let term = a.mul(&db)?.scale(&binomial(j, m));
                    let slot = j - m + k;
                    out[slot] = out[slot].add(&term)?;
                }
            }
        }
        Self::new(self.rank, out)
    }

    /// `self ∘ other - other ∘ self`
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// Action on a vector of Laurent polynomials with the `beta` twist on the
    /// order-one part: `sum_k A_k d^k v + beta (dA_1/dz) v`.
    pub fn apply(&self, v: &[LaurentPoly], beta: i64) -> Result<Vec<LaurentPoly>> {
        if v.len() != self.rank {
            return Err(Error::LengthMismatch {
                len: v.len(),
                n: self.rank,
            });
        }
        let mut out = vec![LaurentPoly::zero(); self.rank];
        let mut dv = v.to_vec();
        for (k, a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                dv = dv.iter().map(LaurentPoly::derive).collect();
            }
            for (o, x) in out.iter_mut().zip(a.apply(&dv)?) {
                *o += &x;
            }
        }
        if beta != 0 {
            if let Some(a1) = self.coeffs.get(1) {
                let twist = a1.derive().scale(&rat(beta));
                for (o, x) in out.iter_mut().zip(twist.apply(v)?) {
                    *o += &x;
                }
            }
        }
        Ok(out)
    }
}

impl From<&FirstOrderOp> for DiffOp {
    fn from(d: &FirstOrderOp) -> Self {
        let n = d.rank();
        let mut op = DiffOp {
            rank: n,
            coeffs: vec![d.gamma.clone(), MatLaurent::scalar(n, d.symbol.clone())],
        };
        op.normalize();
        op
    }
}

impl TryFrom<&DiffOp> for FirstOrderOp {
    type Error = Error;

    fn try_from(d: &DiffOp) -> Result<Self> {
        if d.coeffs.len() > 2 {
            return Err(Error::NotFirstOrderScalar);
        }
        let symbol = d.coeff(1).as_scalar().ok_or(Error::NotFirstOrderScalar)?;
        Ok(FirstOrderOp {
            gamma: d.coeff(0),
            symbol,
        })
    }
}

/// `gamma + f d/dz` with `gamma` an `n x n` Laurent matrix and `f` a scalar symbol.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FirstOrderOp {
    gamma: MatLaurent,
    symbol: LaurentPoly,
}

impl FirstOrderOp {
    pub fn new(gamma: MatLaurent, symbol: LaurentPoly) -> Self {
        Self { gamma, symbol }
    }

    pub fn zero(rank: usize) -> Self {
        Self::new(MatLaurent::zero(rank), LaurentPoly::zero())
    }

    /// `L_r = z^(r+1) d/dz` acting diagonally on rank `n`.
    pub fn l(r: i64, n: usize) -> Self {
        Self::new(MatLaurent::zero(n), LaurentPoly::monomial(crate::laurent::add_exp(r, 1)))
    }

    /// `E_ij^s`: `z^s` in entry `(i, j)`, indices 1-based.
    pub fn e(i: usize, j: usize, s: i64, n: usize) -> Result<Self> {
        if i == 0 || j == 0 {
            return Err(Error::IndexOutOfRange { i, j, n });
        }
        let gamma = MatLaurent::unit(n, i - 1, j - 1, LaurentPoly::monomial(s))
            .map_err(|_| Error::IndexOutOfRange { i, j, n })?;
        Ok(Self::new(gamma, LaurentPoly::zero()))
    }

    pub fn rank(&self) -> usize {
        self.gamma.rank()
    }

    pub fn gamma(&self) -> &MatLaurent {
        &self.gamma
    }

    /// The symbol map: `gamma + f d/dz  ↦  f`.
    pub fn symbol(&self) -> &LaurentPoly {
        &self.symbol
    }

    pub fn is_zero(&self) -> bool {
        self.gamma.is_zero() && self.symbol.is_zero()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self::new(self.gamma.add(&other.gamma)?, &self.symbol + &other.symbol))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self::new(self.gamma.sub(&other.gamma)?, &self.symbol - &other.symbol))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.gamma.scale(c), self.symbol.scale(c))
    }

    /// Lie bracket:
    /// `[g1 + f1 d, g2 + f2 d] = [g1, g2] + f1 g2' - f2 g1' + (f1 f2' - f2 f1') d`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        let (f1, f2) = (&self.symbol, &other.symbol);
        let gamma = self
            .gamma
            .commutator(&other.gamma)?
            .add(&other.gamma.derive().scale_by(f1))?
            .sub(&self.gamma.derive().scale_by(f2))?;
        let symbol = &(f1 * &f2.derive()) - &(f2 * &f1.derive());
        Ok(Self::new(gamma, symbol))
    }

    /// `gamma v + f v' + beta f' v`
    pub fn apply(&self, v: &[LaurentPoly], beta: i64) -> Result<Vec<LaurentPoly>> {
        let mut out = self.gamma.apply(v)?;
        let twist = self.symbol.derive().scale(&rat(beta));
        for (o, x) in out.iter_mut().zip(v) {
            *o += &(&self.symbol * &x.derive());
            if !twist.is_zero() {
                *o += &(&twist * x);
            }
        }
        Ok(out)
    }

    pub fn to_diffop(&self) -> DiffOp {
        DiffOp::from(self)
    }

    /// Expansion in the `L_r`, `E_ij^s` basis.
    pub fn to_basis(&self) -> OperatorExpr {
        let n = self.rank();
        let mut expr = OperatorExpr::new(n);
        for (e, c) in self.symbol.terms() {
            expr.add_term(BasisTerm::L(e - 1), c.clone());
        }
        for i in 0..n {
            for j in 0..n {
                for (s, c) in self.gamma.get(i, j).terms() {
                    expr.add_term(BasisTerm::E { i: i + 1, j: j + 1, s }, c.clone());
                }
            }
        }
        expr
    }
}

/// Basis element of `D^1`: `L(r) = z^(r+1) d/dz` or `E(i,j;s)` (1-based indices).
///
/// The derived order (all `L` before all `E`, then lexicographic) is the
/// canonical order used for every report.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum BasisTerm {
    L(i64),
    E { i: usize, j: usize, s: i64 },
}

impl BasisTerm {
    pub fn degree(&self) -> i64 {
        match *self {
            BasisTerm::L(r) => r,
            BasisTerm::E { s, .. } => s,
        }
    }

    pub fn is_valid(&self, n: usize) -> bool {
        match *self {
            BasisTerm::L(_) => true,
            BasisTerm::E { i, j, .. } => (1..=n).contains(&i) && (1..=n).contains(&j),
        }
    }

    pub fn to_op(&self, n: usize) -> Result<FirstOrderOp> {
        match *self {
            BasisTerm::L(r) => Ok(FirstOrderOp::l(r, n)),
            BasisTerm::E { i, j, s } => FirstOrderOp::e(i, j, s, n),
        }
    }

    /// All basis terms of rank `n` with degree in `-range..=range`, in canonical order.
    pub fn window(n: usize, range: i64) -> Vec<BasisTerm> {
        let mut out: Vec<BasisTerm> = (-range..=range).map(BasisTerm::L).collect();
        for i in 1..=n {
            for j in 1..=n {
                out.extend((-range..=range).map(|s| BasisTerm::E { i, j, s }));
            }
        }
        out
    }
}

impl fmt::Display for BasisTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisTerm::L(r) => write!(f, "L({r})"),
            BasisTerm::E { i, j, s } => write!(f, "E({i},{j};{s})"),
        }
    }
}

/// Finite rational combination of basis terms at a fixed rank.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OperatorExpr {
    rank: usize,
    terms: BTreeMap<BasisTerm, Rational>,
}

impl OperatorExpr {
    pub fn new(rank: usize) -> Self {
        Self {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn single(rank: usize, t: BasisTerm) -> Self {
        let mut e = Self::new(rank);
        e.add_term(t, Rational::one());
        e
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Adds `c * t`, merging with an existing coefficient and dropping zeros.
    pub fn add_term(&mut self, t: BasisTerm, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(t).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisTerm, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        for t in self.terms.keys() {
            if let BasisTerm::E { i, j, .. } = *t {
                if !t.is_valid(self.rank) {
                    return Err(Error::IndexOutOfRange { i, j, n: self.rank });
                }
            }
        }
        Ok(())
    }

    pub fn to_op(&self) -> Result<FirstOrderOp> {
        let mut op = FirstOrderOp::zero(self.rank);
        for (t, c) in &self.terms {
            op = op.add(&t.to_op(self.rank)?.scale(c))?;
        }
        Ok(op)
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (t, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            match (idx, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if mag.is_one() {
                write!(f, "{t}")?;
            } else {
                write!(f, "{mag}*{t}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    fn basis(op: &FirstOrderOp) -> String {
        op.to_basis().to_string()
    }

    #[test]
    fn make_l_and_e() {
        let l0 = FirstOrderOp::l(0, 1);
        assert_eq!(l0.symbol(), &p("z"));
        assert!(l0.gamma().is_zero());

        let lm1 = FirstOrderOp::l(-1, 2);
        assert_eq!(lm1.symbol(), &LaurentPoly::one());
        assert_eq!(lm1.rank(), 2);

        assert_eq!(FirstOrderOp::l(3, 1).symbol(), &p("z^4"));

        let id = FirstOrderOp::e(1, 1, 0, 1).unwrap();
        assert_eq!(id.gamma(), &MatLaurent::identity(1));

        let e = FirstOrderOp::e(1, 2, 5, 2).unwrap();
        assert_eq!(e.gamma().get(0, 1), &p("z^5"));
        assert!(e.gamma().get(1, 0).is_zero());

        assert_eq!(
            FirstOrderOp::e(3, 1, 0, 2),
            Err(Error::IndexOutOfRange { i: 3, j: 1, n: 2 })
        );
        assert!(FirstOrderOp::e(0, 1, 0, 2).is_err());
    }

    #[test]
    fn bracket_examples() {
        let b = FirstOrderOp::l(1, 1).bracket(&FirstOrderOp::l(2, 1)).unwrap();
        assert_eq!(basis(&b), "L(3)");

        let e = FirstOrderOp::e(1, 2, 5, 2).unwrap();
        let b = FirstOrderOp::l(0, 2).bracket(&e).unwrap();
        assert_eq!(basis(&b), "5*E(1,2;5)");

        let d = FirstOrderOp::l(2, 2).add(&e).unwrap();
        assert!(d.bracket(&d).unwrap().is_zero());
    }

    #[test]
    fn compose_examples() {
        let d = DiffOp::monomial(MatLaurent::identity(1), 1, 1);
        let z = DiffOp::multiplication(MatLaurent::scalar(1, p("z")));
        let expected = DiffOp::new(1, vec![MatLaurent::identity(1), MatLaurent::scalar(1, p("z"))]).unwrap();
        assert_eq!(d.compose(&z).unwrap(), expected);

        let a = FirstOrderOp::l(1, 1).to_diffop();
        let b = FirstOrderOp::l(2, 1).to_diffop();
        let comm = a.commutator(&b).unwrap();
        assert_eq!(comm, FirstOrderOp::l(3, 1).to_diffop());

        let id = DiffOp::multiplication(MatLaurent::identity(2));
        let x = DiffOp::new(
            2,
            vec![
                MatLaurent::unit(2, 0, 1, p("z^2 + 1")).unwrap(),
                MatLaurent::scalar(2, p("z^-1")),
                MatLaurent::unit(2, 1, 1, p("3")).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(id.compose(&x).unwrap(), x);
        assert_eq!(x.order(), Some(2));
    }

    #[test]
    fn compose_rank_mismatch() {
        let a = DiffOp::multiplication(MatLaurent::identity(1));
        let b = DiffOp::multiplication(MatLaurent::identity(2));
        assert!(a.compose(&b).is_err());
        assert!(FirstOrderOp::l(0, 1).bracket(&FirstOrderOp::l(0, 2)).is_err());
    }

    #[test]
    fn apply_examples() {
        let out = FirstOrderOp::l(1, 1).apply(&[LaurentPoly::one()], 2).unwrap();
        assert_eq!(out, vec![p("4*z")]);

        let e = FirstOrderOp::e(1, 2, 3, 2).unwrap();
        let out = e.apply(&[LaurentPoly::zero(), p("z^-1")], 0).unwrap();
        assert_eq!(out, vec![p("z^2"), LaurentPoly::zero()]);

        for k in -3..=3 {
            let out = FirstOrderOp::l(0, 1).apply(&[LaurentPoly::monomial(k)], 0).unwrap();
            assert_eq!(out, vec![LaurentPoly::term(rat(k), k)]);
        }

        assert!(FirstOrderOp::l(0, 2).apply(&[LaurentPoly::one()], 0).is_err());
    }

    #[test]
    fn diffop_apply_agrees_with_first_order_apply() {
        let op = FirstOrderOp::l(2, 2)
            .add(&FirstOrderOp::e(2, 1, -1, 2).unwrap())
            .unwrap();
        let v = [p("z^-2 + 3"), p("1/2*z")];
        for beta in -2..=3 {
            assert_eq!(op.apply(&v, beta).unwrap(), op.to_diffop().apply(&v, beta).unwrap());
        }
    }

    #[test]
    fn basis_round_trip() {
        let mut e = OperatorExpr::new(1);
        e.add_term(BasisTerm::L(2), rat(1));
        e.add_term(BasisTerm::E { i: 1, j: 1, s: 0 }, rat(-3));
        let op = e.to_op().unwrap();
        assert_eq!(op.symbol(), &p("z^3"));
        assert_eq!(op.gamma().get(0, 0), &p("-3"));
        assert_eq!(op.to_basis(), e);
        assert_eq!(e.to_string(), "L(2) - 3*E(1,1;0)");

        assert!(FirstOrderOp::zero(2).to_basis().is_empty());
    }

    #[test]
    fn symbol_map() {
        for r in -3..=3 {
            assert_eq!(FirstOrderOp::l(r, 2).symbol(), &LaurentPoly::monomial(r + 1));
        }
        assert!(FirstOrderOp::e(1, 2, 4, 2).unwrap().symbol().is_zero());
    }

    #[test]
    fn not_in_d1() {
        let mut a1 = MatLaurent::identity(2);
        a1.set(0, 1, p("z"));
        let d = DiffOp::new(2, vec![MatLaurent::zero(2), a1]).unwrap();
        assert_eq!(FirstOrderOp::try_from(&d), Err(Error::NotFirstOrderScalar));

        let d2 = DiffOp::monomial(MatLaurent::identity(1), 2, 1);
        assert_eq!(FirstOrderOp::try_from(&d2), Err(Error::NotFirstOrderScalar));

        let back = FirstOrderOp::try_from(&FirstOrderOp::l(3, 2).to_diffop()).unwrap();
        assert_eq!(back, FirstOrderOp::l(3, 2));
    }
}
