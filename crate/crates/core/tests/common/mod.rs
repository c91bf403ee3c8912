//! Helpers shared by the integration suites.

#![allow(dead_code)]

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::Rng;

use torcode::betasym::{self, Compactum, SymWord};
use torcode::glz;
use torcode::mat::{Mat2, UniMat};

/// Random element of GL(2,Z) as a short word in elementary generators.
pub fn random_unimodular(rng: &mut StdRng, len: usize) -> UniMat {
    let gens = [
        Mat2::from_i64(1, 1, 0, 1),
        Mat2::from_i64(1, 0, 1, 1),
        Mat2::from_i64(1, -1, 0, 1),
        Mat2::from_i64(1, 0, -1, 1),
        Mat2::from_i64(0, 1, 1, 0),
    ];
    let mut m = Mat2::identity();
    for _ in 0..len {
        m = &m * &gens[rng.gen_range(0..gens.len())];
    }
    UniMat::new(m).unwrap()
}

/// Random hyperbolic matrix of positive trace and entries below 40.
pub fn random_hyperbolic(rng: &mut StdRng) -> UniMat {
    loop {
        let len = rng.gen_range(2..7);
        let u = random_unimodular(rng, len);
        if glz::is_hyperbolic(&u).hyperbolic && u.mat().height() < BigInt::from(40) {
            return glz::normalize_trace(&u).0;
        }
    }
}

/// Random admissible finite word with `len` core digits.
pub fn admissible_word(rng: &mut StdRng, c: &Compactum, len: usize) -> SymWord {
    loop {
        let core: Vec<u32> = (0..len).map(|_| rng.gen_range(0..=c.digit_max)).collect();
        let w = SymWord::finite(rng.gen_range(-5..5), core);
        if betasym::is_admissible(&w, c) {
            return w;
        }
    }
}
