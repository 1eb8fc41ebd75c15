//! Seeded random operators for property sweeps.

use rand::Rng;

use crate::diffop::{DiffOp, FirstOrderOp};
use crate::laurent::{ratio, LaurentPoly, MatLaurent};

#[derive(Clone, Copy, Debug)]
pub struct SampleShape {
    /// Maximum number of terms per Laurent polynomial.
    pub support: usize,
    /// Exponents are drawn from `-max_exp..=max_exp`.
    pub max_exp: i64,
}

impl Default for SampleShape {
    fn default() -> Self {
        Self { support: 6, max_exp: 5 }
    }
}

pub fn random_poly<R: Rng + ?Sized>(rng: &mut R, shape: SampleShape) -> LaurentPoly {
    let len = rng.gen_range(0..=shape.support);
    LaurentPoly::from_terms((0..len).map(|_| {
        let e = rng.gen_range(-shape.max_exp..=shape.max_exp);
        let c = ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3));
        (e, c)
    }))
}

fn random_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, shape: SampleShape) -> MatLaurent {
    let mut m = MatLaurent::zero(n);
    for i in 0..n {
        for j in 0..n {
            // keep matrices sparse so that products stay within the support budget
            if n == 1 || rng.gen_bool(0.5) {
                let sub = SampleShape {
                    support: shape.support.div_ceil(n),
                    ..shape
                };
                m.set(i, j, random_poly(rng, sub));
            }
        }
    }
    m
}

pub fn random_first_order<R: Rng + ?Sized>(rng: &mut R, n: usize, shape: SampleShape) -> FirstOrderOp {
    FirstOrderOp::new(random_matrix(rng, n, shape), random_poly(rng, shape))
}

/// Random operator of order at most `max_order` with arbitrary matrix coefficients.
pub fn random_diffop<R: Rng + ?Sized>(rng: &mut R, n: usize, max_order: usize, shape: SampleShape) -> DiffOp {
    let coeffs = (0..=max_order).map(|_| random_matrix(rng, n, shape)).collect();
    DiffOp::new(n, coeffs).expect("ranks agree by construction")
}

pub fn random_triples<R: Rng + ?Sized>(rng: &mut R, n: usize, count: usize, shape: SampleShape) -> Vec<[FirstOrderOp; 3]> {
    (0..count)
        .map(|_| {
            [
                random_first_order(rng, n, shape),
                random_first_order(rng, n, shape),
                random_first_order(rng, n, shape),
            ]
        })
        .collect()
}
