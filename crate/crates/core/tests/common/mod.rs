//! Shared helpers for the integration tests: seeded randomness and
//! generators for words, basis maps, and unimodular matrices.

#![allow(dead_code)]

use fbc_core::fnauto::FreeMap;
use fbc_core::int::Int;
use fbc_core::words::Word;
use fbc_core::zmat::IntMatrix;
use fbc_core::Scalar;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A deterministic RNG so test runs are reproducible.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random reduced word: up to `max_len` uniform letters g or g⁻¹.
pub fn random_word<T: Int>(rng: &mut ChaCha8Rng, rank: usize, max_len: usize) -> Word<T> {
    let len = rng.gen_range(0..=max_len);
    let letters = (0..len).map(|_| {
        let gen = rng.gen_range(0..rank);
        let exp = if rng.gen::<bool>() { T::one() } else { -T::one() };
        (gen, exp)
    });
    Word::reduce(rank, letters).expect("letters are in range")
}

fn word2(images: [&[(usize, i64)]; 2]) -> Vec<Word<Scalar>> {
    images
        .iter()
        .map(|ls| {
            Word::reduce(2, ls.iter().map(|&(g, e)| (g, Scalar::from(e))))
                .expect("letters are in range")
        })
        .collect()
}

/// The elementary rank-2 basis maps, each carrying its exact inverse.
fn elementary_rank2() -> Vec<FreeMap<Scalar>> {
    let swap = FreeMap::new(2, word2([&[(1, 1)], &[(0, 1)]]))
        .unwrap()
        .with_inverse(word2([&[(1, 1)], &[(0, 1)]]))
        .unwrap();
    let invert_a = FreeMap::new(2, word2([&[(0, -1)], &[(1, 1)]]))
        .unwrap()
        .with_inverse(word2([&[(0, -1)], &[(1, 1)]]))
        .unwrap();
    let right = FreeMap::new(2, word2([&[(0, 1), (1, 1)], &[(1, 1)]]))
        .unwrap()
        .with_inverse(word2([&[(0, 1), (1, -1)], &[(1, 1)]]))
        .unwrap();
    let left = FreeMap::new(2, word2([&[(1, 1), (0, 1)], &[(1, 1)]]))
        .unwrap()
        .with_inverse(word2([&[(1, -1), (0, 1)], &[(1, 1)]]))
        .unwrap();
    vec![swap, invert_a, right, left]
}

/// A random rank-2 automorphism built from at most `max_moves` elementary
/// basis moves, with its inverse attached.
pub fn random_basis_map(rng: &mut ChaCha8Rng, max_moves: usize) -> FreeMap<Scalar> {
    let moves = elementary_rank2();
    let count = rng.gen_range(0..=max_moves);
    let mut map = FreeMap::identity(2);
    for _ in 0..count {
        let next = &moves[rng.gen_range(0..moves.len())];
        map = map.compose(next).expect("ranks match");
    }
    map
}

/// A random matrix in GL₂(ℤ) built as a product of elementary matrices.
pub fn random_unimodular_2x2<T: Int>(rng: &mut ChaCha8Rng, steps: usize) -> IntMatrix<T> {
    let mut m = IntMatrix::<T>::identity(2);
    for _ in 0..steps {
        let c = T::from(rng.gen_range(-2i32..=2));
        let factor = match rng.gen_range(0..4) {
            0 => IntMatrix::new(2, vec![T::one(), c, T::zero(), T::one()]),
            1 => IntMatrix::new(2, vec![T::one(), T::zero(), c, T::one()]),
            2 => IntMatrix::new(2, vec![T::zero(), T::one(), T::one(), T::zero()]),
            _ => IntMatrix::new(2, vec![T::one(), T::zero(), T::zero(), -T::one()]),
        }
        .expect("entry count matches");
        m = m.mul(&factor).expect("sizes match");
    }
    debug_assert!(m.is_unimodular());
    m
}

/// A random n×n unimodular matrix built from elementary row operations.
pub fn random_unimodular<T: Int>(rng: &mut ChaCha8Rng, n: usize, steps: usize) -> IntMatrix<T> {
    let mut rows: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    for _ in 0..steps {
        match rng.gen_range(0..6) {
            0 => {
                let i = rng.gen_range(0..n);
                rows[i].iter_mut().for_each(|e| *e = -*e);
            }
            1 => {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                rows.swap(i, j);
            }
            _ => {
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n);
                if i == j {
                    j = (j + 1) % n;
                }
                let c = rng.gen_range(-2i64..=2);
                let src = rows[j].clone();
                for (e, s) in rows[i].iter_mut().zip(src) {
                    *e += c * s;
                }
            }
        }
    }
    let m = IntMatrix::from_rows(
        rows.into_iter()
            .map(|r| r.into_iter().map(fbc_core::int::from_i64::<T>).collect())
            .collect(),
    )
    .expect("rows are square");
    debug_assert!(m.is_unimodular());
    m
}

/// All matrices in GL₂(ℤ) whose entries lie in [-bound, bound].
pub fn enumerate_unimodular_2x2(bound: i64) -> Vec<IntMatrix<i64>> {
    let mut out = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            for c in -bound..=bound {
                for d in -bound..=bound {
                    let det = a * d - b * c;
                    if det == 1 || det == -1 {
                        out.push(IntMatrix::from_i64_2x2([[a, b], [c, d]]));
                    }
                }
            }
        }
    }
    out
}

/// A matrix key usable in hash sets without requiring `Hash` on matrices.
pub fn key_2x2(m: &IntMatrix<i64>) -> (i64, i64, i64, i64) {
    (
        *m.at(0, 0),
        *m.at(0, 1),
        *m.at(1, 0),
        *m.at(1, 1),
    )
}
