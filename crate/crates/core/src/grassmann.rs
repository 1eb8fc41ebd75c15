//! The twisted action on `C((z))^n` as a finitely supported `Z x Z` matrix, its
//! block decomposition along `V = V^- ⊕ V^+`, and the determinant trace cocycle
//! `Tr(D1^{+-} D2^{-+} - D2^{+-} D1^{-+})`.
//!
//! Basis vectors are `e_k = z^{k1}` in component `k2` with flat index
//! `k = k1 * n + k2 - 1`, `k2` in `1..=n`. `V^+` is `k >= 0`, `V^-` is `k < 0`.
//! This module is the independent oracle for every closed-form cocycle: it never
//! looks at the basis expansion of an operator, only at its matrix.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::diffop::FirstOrderOp;
use crate::error::{Error, Result};
use crate::laurent::{rat, Rational};

/// Flat index of `z^{k1}` in component `k2` (1-based).
pub fn flat_index(k1: i64, k2: usize, n: usize) -> i64 {
    k1 * n as i64 + k2 as i64 - 1
}

/// Inverse of [`flat_index`]: `(k1, k2)` with `k2` in `1..=n`.
pub fn split_index(k: i64, n: usize) -> (i64, usize) {
    let n = n as i64;
    (k.div_euclid(n), (k.rem_euclid(n) + 1) as usize)
}

/// A range of z-degrees `k1_lo..=k1_hi`, covering every component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub k1_lo: i64,
    pub k1_hi: i64,
}

impl Window {
    pub fn new(k1_lo: i64, k1_hi: i64) -> Self {
        Self { k1_lo, k1_hi }
    }

    /// `[-s, s]`
    pub fn symmetric(s: i64) -> Self {
        Self::new(-s, s)
    }

    pub fn contains_degree(&self, k1: i64) -> bool {
        (self.k1_lo..=self.k1_hi).contains(&k1)
    }

    pub fn contains(&self, other: &Window) -> bool {
        self.k1_lo <= other.k1_lo && other.k1_hi <= self.k1_hi
    }

    /// Flat index range at rank `n`.
    pub fn flat_range(&self, n: usize) -> (i64, i64) {
        (flat_index(self.k1_lo, 1, n), flat_index(self.k1_hi, n, n))
    }

    /// The window twice as wide on each side.
    pub fn doubled(&self) -> Self {
        Self::new(2 * self.k1_lo.min(-1), 2 * self.k1_hi.max(1))
    }
}

/// Range of degree shifts `(min, max)` produced by the operator, or `None` for zero.
fn shift_range(d: &FirstOrderOp) -> Option<(i64, i64)> {
    let g = d.gamma().exp_range();
    let f = match (d.symbol().min_exp(), d.symbol().max_exp()) {
        (Some(lo), Some(hi)) => Some((lo - 1, hi - 1)),
        _ => None,
    };
    match (g, f) {
        (Some((a, b)), Some((c, d))) => Some((a.min(c), b.max(d))),
        (x, None) | (None, x) => x,
    }
}

fn reach(d: &FirstOrderOp) -> i64 {
    shift_range(d).map_or(0, |(lo, hi)| lo.abs().max(hi.abs()))
}

/// A window containing the whole off-diagonal support (`+-` and `-+` blocks)
/// of both action matrices, so that the trace cocycle computed inside it is exact.
///
/// An operator shifting degrees by at most `s` only crosses between `V^-` and
/// `V^+` from columns with `k1` in `[-s, s-1]` to rows in the same range.
pub fn window_bound(d1: &FirstOrderOp, d2: &FirstOrderOp) -> Window {
    Window::symmetric(reach(d1).max(reach(d2)))
}

/// Finitely supported matrix of the twisted action, compressed to a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowMatrix {
    rank: usize,
    beta: i64,
    window: Window,
    entries: BTreeMap<(i64, i64), Rational>,
}

/// The four blocks of a [`WindowMatrix`], keyed by `(row, col)` flat indices.
///
/// `plus_minus` is `M^{+-}: V^+ -> V^-` (columns `>= 0`, rows `< 0`) and so on.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockView {
    pub plus_plus: BTreeMap<(i64, i64), Rational>,
    pub plus_minus: BTreeMap<(i64, i64), Rational>,
    pub minus_plus: BTreeMap<(i64, i64), Rational>,
    pub minus_minus: BTreeMap<(i64, i64), Rational>,
}

impl WindowMatrix {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn beta(&self) -> i64 {
        self.beta
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Entry at flat `(row, col)`.
    pub fn get(&self, row: i64, col: i64) -> Rational {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(i64, i64), &Rational)> + '_ {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn blocks(&self) -> BlockView {
        let mut b = BlockView::default();
        for (&(row, col), v) in &self.entries {
            let target = match (col >= 0, row >= 0) {
                (true, true) => &mut b.plus_plus,
                (true, false) => &mut b.plus_minus,
                (false, true) => &mut b.minus_plus,
                (false, false) => &mut b.minus_minus,
            };
            target.insert((row, col), v.clone());
        }
        b
    }
}

/// Matrix of `v ↦ gamma v + f v' + beta f' v` in the `e_k` basis, for columns
/// and rows inside `window`.
///
/// Fails when `window` does not contain the operator's own off-diagonal support,
/// since the blocks would then be silently truncated.
pub fn action_matrix(d: &FirstOrderOp, beta: i64, window: Window) -> Result<WindowMatrix> {
    let need = window_bound(d, d);
    if !window.contains(&need) {
        return Err(Error::WindowTooSmall {
            lo: window.k1_lo,
            hi: window.k1_hi,
            need_lo: need.k1_lo,
            need_hi: need.k1_hi,
        });
    }
    let n = d.rank();
    let mut entries: BTreeMap<(i64, i64), Rational> = BTreeMap::new();
    let mut put = |row_k1: i64, row_k2: usize, col: i64, v: Rational| {
        if v.is_zero() || !window.contains_degree(row_k1) {
            return;
        }
        let key = (flat_index(row_k1, row_k2, n), col);
        let slot = entries.entry(key).or_insert_with(Rational::zero);
        *slot += v;
        if slot.is_zero() {
            entries.remove(&key);
        }
    };
    for k1 in window.k1_lo..=window.k1_hi {
        for k2 in 1..=n {
            let col = flat_index(k1, k2, n);
            for i in 0..n {
                for (e, c) in d.gamma().get(i, k2 - 1).terms() {
                    put(k1 + e, i + 1, col, c.clone());
                }
            }
            // f z^{k1}' + beta f' z^{k1} for f = c z^e is c (k1 + beta e) z^{k1+e-1}
            for (e, c) in d.symbol().terms() {
                put(k1 + e - 1, k2, col, c * rat(k1 + beta * e));
            }
        }
    }
    Ok(WindowMatrix {
        rank: n,
        beta,
        window,
        entries,
    })
}

/// `Tr(A^{+-} B^{-+})`, the trace over `V^-` of the composite `V^- -> V^+ -> V^-`.
fn cross_trace(a: &BlockView, b: &WindowMatrix) -> Rational {
    let mut acc = Rational::zero();
    for (&(row, col), v) in &a.plus_minus {
        let w = b.get(col, row);
        if !w.is_zero() {
            acc += v * w;
        }
    }
    acc
}

/// Trace cocycle computed inside an explicit window.
pub fn trace_cocycle_in(d1: &FirstOrderOp, d2: &FirstOrderOp, beta: i64, window: Window) -> Result<Rational> {
    if d1.rank() != d2.rank() {
        return Err(Error::RankMismatch {
            left: d1.rank(),
            right: d2.rank(),
        });
    }
    let m1 = action_matrix(d1, beta, window)?;
    let m2 = action_matrix(d2, beta, window)?;
    Ok(cross_trace(&m1.blocks(), &m2) - cross_trace(&m2.blocks(), &m1))
}

/// `Tr(D1^{+-} D2^{-+} - D2^{+-} D1^{-+})` for the `beta`-twisted action,
/// in the window returned by [`window_bound`].
pub fn trace_cocycle(d1: &FirstOrderOp, d2: &FirstOrderOp, beta: i64) -> Result<Rational> {
    trace_cocycle_in(d1, d2, beta, window_bound(d1, d2))
}
