//! Krichever points of split bundles on the projective line.
//!
//! A point of the Sato Grassmannian is stored through a finite window of
//! z-degrees `[lo, hi]`: below `lo` the subspace contains everything (it is
//! co-finite in the negative direction), above `hi` it contains nothing, and
//! inside the window it is spanned by explicit generators. For `E = ⊕ O(d_i)`
//! the sections over the complement of the marked point are `z^{d_i} C[z^-1]`
//! in component `i`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, Rational};

/// Row-reduced basis of a subspace of `Q^dim`, for exact rank and membership tests.
#[derive(Clone, Debug, Default)]
struct Echelon {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Echelon {
    fn reduce(&self, mut v: Vec<Rational>) -> Vec<Rational> {
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let f = v[*pivot].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        v
    }

    /// Adds `v`; returns `false` when it was already in the span.
    fn insert(&mut self, v: Vec<Rational>) -> bool {
        let v = self.reduce(v);
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[pivot].recip();
        let v: Vec<Rational> = v.into_iter().map(|x| x * &inv).collect();
        for (_, row) in self.rows.iter_mut() {
            if !row[pivot].is_zero() {
                let f = row[pivot].clone();
                for (x, r) in row.iter_mut().zip(&v) {
                    *x -= &f * r;
                }
            }
        }
        self.rows.push((pivot, v));
        true
    }

    fn contains(&self, v: Vec<Rational>) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// A point of `Gr(C((z))^n)` described on the degree window `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowSubspace {
    rank: usize,
    lo: i64,
    hi: i64,
    generators: Vec<Vec<LaurentPoly>>,
}

impl WindowSubspace {
    /// Generators must have length `rank`, lie inside `[lo, hi]` and be linearly independent.
    pub fn new(rank: usize, lo: i64, hi: i64, generators: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        for g in &generators {
            if g.len() != rank {
                return Err(Error::LengthMismatch { len: g.len(), n: rank });
            }
            for p in g {
                if let (Some(a), Some(b)) = (p.min_exp(), p.max_exp()) {
                    if a < lo || b > hi {
                        return Err(Error::WindowTooSmall {
                            lo,
                            hi,
                            need_lo: a.min(lo),
                            need_hi: b.max(hi),
                        });
                    }
                }
            }
        }
        let w = Self {
            rank,
            lo,
            hi,
            generators,
        };
        let mut ech = Echelon::default();
        for g in &w.generators {
            if !ech.insert(w.coords(g)) {
                return Err(Error::DependentGenerators);
            }
        }
        Ok(w)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn generators(&self) -> &[Vec<LaurentPoly>] {
        &self.generators
    }

    fn width(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    /// Coordinates of the window part of `v` (degrees below `lo` are dropped).
    fn coords(&self, v: &[LaurentPoly]) -> Vec<Rational> {
        let w = self.width();
        let mut out = vec![Rational::zero(); self.rank * w];
        for (i, p) in v.iter().enumerate() {
            for (e, c) in p.terms() {
                if (self.lo..=self.hi).contains(&e) {
                    out[i * w + (e - self.lo) as usize] = c.clone();
                }
            }
        }
        out
    }

    fn echelon(&self) -> Echelon {
        let mut ech = Echelon::default();
        for g in &self.generators {
            ech.insert(self.coords(g));
        }
        ech
    }

    fn monomial_vec(&self, component: usize, e: i64) -> Vec<LaurentPoly> {
        let mut v = vec![LaurentPoly::zero(); self.rank];
        v[component] = LaurentPoly::monomial(e);
        v
    }

    /// Same subspace described on a wider window `[lo, hi]`; tail degrees
    /// between the new and old floor become explicit generators.
    pub fn with_window(&self, lo: i64, hi: i64) -> Result<Self> {
        if lo > self.lo || hi < self.hi {
            return Err(Error::WindowTooSmall {
                lo,
                hi,
                need_lo: self.lo,
                need_hi: self.hi,
            });
        }
        let mut gens = self.generators.clone();
        for i in 0..self.rank {
            for e in lo..self.lo {
                gens.push(self.monomial_vec(i, e));
            }
        }
        Self::new(self.rank, lo, hi, gens)
    }

    /// `self ⊕ other` inside `C((z))^{n1 + n2}`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let lo = self.lo.min(other.lo);
        let hi = self.hi.max(other.hi);
        let a = self.with_window(lo, hi)?;
        let b = other.with_window(lo, hi)?;
        let n = a.rank + b.rank;
        let mut gens = Vec::new();
        for g in &a.generators {
            let mut v = g.clone();
            v.resize(n, LaurentPoly::zero());
            gens.push(v);
        }
        for g in &b.generators {
            let mut v = vec![LaurentPoly::zero(); a.rank];
            v.extend(g.iter().cloned());
            gens.push(v);
        }
        Self::new(n, lo, hi, gens)
    }

    /// `dim(W ∩ V+) - dim(V / (W + V+))`.
    pub fn index(&self) -> i64 {
        // make sure the floor sits at or below degree 0 so that the tail lies in V-
        let w = if self.lo > 0 {
            self.with_window(0, self.hi).expect("widening a window cannot fail")
        } else {
            self.clone()
        };
        let neg = (-w.lo) as usize;
        let width = w.width();
        let mut full = Echelon::default();
        let mut minus = Echelon::default();
        for g in &w.generators {
            let c = w.coords(g);
            let proj: Vec<Rational> = (0..w.rank)
                .flat_map(|i| c[i * width..i * width + neg].iter().cloned())
                .collect();
            full.insert(c);
            minus.insert(proj);
        }
        let cap = full.rank() - minus.rank();
        let coker = w.rank * neg - minus.rank();
        cap as i64 - coker as i64
    }

    /// Whether `v` lies in the subspace.
    pub fn contains(&self, v: &[LaurentPoly]) -> bool {
        self.contains_with(&self.echelon(), v)
    }

    fn contains_with(&self, ech: &Echelon, v: &[LaurentPoly]) -> bool {
        if v.len() != self.rank {
            return false;
        }
        if v.iter().any(|p| p.max_exp().is_some_and(|e| e > self.hi)) {
            return false;
        }
        ech.contains(self.coords(v))
    }

    /// Whether `z^m W ⊆ W`.
    pub fn stabilized_by(&self, m: i64) -> bool {
        let ech = self.echelon();
        self.stabilized_with(&ech, m)
    }

    fn stabilized_with(&self, ech: &Echelon, m: i64) -> bool {
        // the tail z^{<lo} is moved to z^{<lo+m}
        for e in self.lo..self.lo + m {
            for i in 0..self.rank {
                if !self.contains_with(ech, &self.monomial_vec(i, e)) {
                    return false;
                }
            }
        }
        self.generators.iter().all(|g| {
            let moved: Vec<LaurentPoly> = g.iter().map(|p| p.shift(m)).collect();
            self.contains_with(ech, &moved)
        })
    }
}

/// Genus-0 datum: the splitting type of `E = ⊕ O(d_i)` on the projective line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KricheverDatum {
    pub degrees: Vec<i64>,
}

impl KricheverDatum {
    pub fn new(degrees: Vec<i64>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::ZeroRank);
        }
        Ok(Self { degrees })
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self) -> i64 {
        self.degrees.iter().sum()
    }

    /// `n (1 - g) + d` with `g = 0`.
    pub fn euler_characteristic(&self) -> i64 {
        self.rank() as i64 + self.degree()
    }

    /// Smallest admissible window, `[min d - 2, max d + 2]`.
    pub fn default_window(&self) -> (i64, i64) {
        let lo = self.degrees.iter().min().copied().unwrap_or(0);
        let hi = self.degrees.iter().max().copied().unwrap_or(0);
        (lo - 2, hi + 2)
    }
}

/// `H^0(P^1 - x, E)` as the subspace `⊕ z^{d_i} C[z^-1]`, truncated to `window`.
pub fn krichever_point(datum: &KricheverDatum, window: (i64, i64)) -> Result<WindowSubspace> {
    let need = datum.default_window();
    let (lo, hi) = window;
    if lo > need.0 || hi < need.1 {
        return Err(Error::WindowTooSmall {
            lo,
            hi,
            need_lo: need.0,
            need_hi: need.1,
        });
    }
    let n = datum.rank();
    let mut gens = Vec::new();
    for (i, &d) in datum.degrees.iter().enumerate() {
        for e in lo..=d {
            let mut v = vec![LaurentPoly::zero(); n];
            v[i] = LaurentPoly::monomial(e);
            gens.push(v);
        }
    }
    WindowSubspace::new(n, lo, hi, gens)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChiReport {
    pub degrees: Vec<i64>,
    pub index: i64,
    pub chi: i64,
}

impl ChiReport {
    pub fn passed(&self) -> bool {
        self.index == self.chi
    }
}

/// Compares the Grassmannian index of the Krichever point with `χ = n + d`.
pub fn check_chi(datum: &KricheverDatum) -> Result<ChiReport> {
    let w = krichever_point(datum, datum.default_window())?;
    Ok(ChiReport {
        degrees: datum.degrees.clone(),
        index: w.index(),
        chi: datum.euler_characteristic(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerReport {
    /// Window truncation of `A_W` inside `C((z))`.
    pub algebra: WindowSubspace,
    /// Exponents `m` in the tested range with `z^m W ⊆ W`.
    pub exponents: Vec<i64>,
    pub index: i64,
    /// Whether the truncation is exactly `C[z^-1]`.
    pub is_inverse_polynomials: bool,
    /// Whether products of generators that stay in the window stay in `A_W`.
    pub closed_under_products: bool,
}

/// Stabilizer algebra `{f : f W ⊆ W}`, probed on monomials `z^m` with `|m|`
/// at most the window width.
pub fn stabilizer(w: &WindowSubspace) -> Result<StabilizerReport> {
    let (lo, hi) = w.window();
    let reach = hi - lo + 1;
    let ech = w.echelon();
    let exponents: Vec<i64> = (-reach..=reach).filter(|&m| w.stabilized_with(&ech, m)).collect();
    let gens = exponents.iter().map(|&m| vec![LaurentPoly::monomial(m)]).collect();
    let algebra = WindowSubspace::new(1, -reach, reach, gens)?;
    let is_inverse_polynomials = exponents.iter().copied().eq(-reach..=0);
    let closed_under_products = exponents.iter().all(|a| {
        exponents
            .iter()
            .filter(|b| (-reach..=reach).contains(&(a + *b)))
            .all(|b| exponents.contains(&(a + b)))
    });
    Ok(StabilizerReport {
        index: algebra.index(),
        algebra,
        exponents,
        is_inverse_polynomials,
        closed_under_products,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(d: &[i64]) -> WindowSubspace {
        let datum = KricheverDatum::new(d.to_vec()).unwrap();
        krichever_point(&datum, datum.default_window()).unwrap()
    }

    #[test]
    fn point_generators() {
        let w = point(&[3]);
        assert_eq!(w.window(), (1, 5));
        assert!(w.contains(&[LaurentPoly::monomial(3)]));
        assert!(w.contains(&[LaurentPoly::one()]));
        assert!(w.contains(&[LaurentPoly::monomial(-7)]));
        assert!(!w.contains(&[LaurentPoly::monomial(4)]));

        let w = point(&[0]);
        assert!(w.contains(&[LaurentPoly::one()]));
        assert!(!w.contains(&[LaurentPoly::monomial(1)]));

        let w = point(&[0, 0]);
        assert!(w.contains(&[LaurentPoly::one(), LaurentPoly::one()]));
        assert!(w.contains(&[LaurentPoly::monomial(-1), LaurentPoly::zero()]));
    }

    #[test]
    fn index_examples() {
        assert_eq!(point(&[3]).index(), 4);
        assert_eq!(point(&[-1]).index(), 0);
        assert_eq!(point(&[0, 0]).index(), 2);
    }

    #[test]
    fn chi_examples() {
        for d in [vec![3], vec![2, -1], vec![-1]] {
            let r = check_chi(&KricheverDatum::new(d.clone()).unwrap()).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn stabilizer_examples() {
        for d in [&[3][..], &[0, 0]] {
            let r = stabilizer(&point(d)).unwrap();
            assert!(r.is_inverse_polynomials, "{r:?}");
            assert_eq!(r.index, 1);
            assert!(r.exponents.contains(&0));
            assert!(r.closed_under_products);
        }
        assert!(!point(&[3]).stabilized_by(1));
        assert!(point(&[3]).stabilized_by(-1));
    }

    #[test]
    fn window_too_small() {
        let datum = KricheverDatum::new(vec![3]).unwrap();
        assert!(matches!(krichever_point(&datum, (2, 5)), Err(Error::WindowTooSmall { .. })));
        assert!(KricheverDatum::new(vec![]).is_err());
    }

    #[test]
    fn dependent_generators_rejected() {
        let g = vec![LaurentPoly::monomial(1)];
        assert_eq!(
            WindowSubspace::new(1, 0, 2, vec![g.clone(), g]),
            Err(Error::DependentGenerators)
        );
    }

    #[test]
    fn non_monomial_subspace_index() {
        // W = z^{<-1} + span{z^-1 + 1}: W ∩ V+ = 0 and V/(W+V+) = 0
        let g = vec!["z^-1 + 1".parse().unwrap()];
        let w = WindowSubspace::new(1, -1, 2, vec![g]).unwrap();
        assert_eq!(w.index(), 0);
        assert_eq!(w.with_window(-4, 6).unwrap().index(), 0);
    }
}
