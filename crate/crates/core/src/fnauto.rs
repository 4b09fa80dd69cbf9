//! Endomorphisms of free groups given by generator images.
//!
//! A [`FreeMap`] sends each generator to a word and extends to the whole
//! group. The module provides application, composition, powers, the
//! abelianization matrix, and — for rank 2, where Nielsen reduction gives
//! complete algorithms — an automorphism test, exact inversion, and an
//! innerness test with a conjugating witness.
//!
//! Composition is written in application order throughout:
//! `compose(f, g)` is "`f` then `g`", matching the right-action convention
//! `w·(fg) = (w·f)·g`.

use std::fmt;

use crate::error::{Error, Result};
use crate::int::Int;
use crate::words::Word;
use crate::zmat::IntMatrix;

/// An endomorphism of the free group of the given rank, stored as the
/// images of the generators, with an optional verified inverse assignment.
///
/// Equality compares the forward images only: two maps are equal when they
/// agree on every generator, whether or not an inverse is attached.
#[derive(Clone, Debug)]
pub struct FreeMap<T: Int> {
    rank: usize,
    images: Vec<Word<T>>,
    inverse_images: Option<Vec<Word<T>>>,
}

/// A witness that a map is inner: the word `w` with `g ↦ w⁻¹·g·w`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InnerWitness<T: Int> {
    pub word: Word<T>,
}

impl<T: Int> PartialEq for FreeMap<T> {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.images == other.images
    }
}

impl<T: Int> Eq for FreeMap<T> {}

impl<T: Int> FreeMap<T> {
    /// Builds a map from generator images; every image must live in the
    /// same rank.
    pub fn new(rank: usize, images: Vec<Word<T>>) -> Result<Self> {
        if images.len() != rank {
            return Err(Error::RankMismatch {
                expected: rank,
                got: images.len(),
            });
        }
        for w in &images {
            if w.rank() != rank {
                return Err(Error::RankMismatch {
                    expected: rank,
                    got: w.rank(),
                });
            }
        }
        Ok(FreeMap {
            rank,
            images,
            inverse_images: None,
        })
    }

    /// The identity map (its own inverse).
    pub fn identity(rank: usize) -> Self {
        let gens: Vec<Word<T>> = (0..rank)
            .map(|g| Word::generator(rank, g).expect("in range"))
            .collect();
        FreeMap {
            rank,
            images: gens.clone(),
            inverse_images: Some(gens),
        }
    }

    /// The inner automorphism `g ↦ w⁻¹·g·w`, with its inverse attached.
    pub fn inner(w: &Word<T>) -> Self {
        let rank = w.rank();
        let w_inv = w.invert();
        let conj = |left: &Word<T>, right: &Word<T>| -> Vec<Word<T>> {
            (0..rank)
                .map(|g| {
                    let gen = Word::generator(rank, g).expect("in range");
                    Word::product(rank, [left, &gen, right]).expect("same rank")
                })
                .collect()
        };
        FreeMap {
            rank,
            images: conj(&w_inv, w),
            inverse_images: Some(conj(w, &w_inv)),
        }
    }

    /// Attaches an inverse assignment after verifying both composites fix
    /// every generator.
    pub fn with_inverse(mut self, inverse_images: Vec<Word<T>>) -> Result<Self> {
        if inverse_images.len() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: inverse_images.len(),
            });
        }
        for w in &inverse_images {
            if w.rank() != self.rank {
                return Err(Error::RankMismatch {
                    expected: self.rank,
                    got: w.rank(),
                });
            }
        }
        let candidate = FreeMap {
            rank: self.rank,
            images: inverse_images,
            inverse_images: None,
        };
        for g in 0..self.rank {
            let gen = Word::generator(self.rank, g).expect("in range");
            let fwd_then_inv = candidate.apply(&self.images[g])?;
            if fwd_then_inv != gen {
                return Err(Error::InverseFails(format!(
                    "generator {} maps to {} under map-then-inverse",
                    gen, fwd_then_inv
                )));
            }
            let inv_then_fwd = self.apply(&candidate.images[g])?;
            if inv_then_fwd != gen {
                return Err(Error::InverseFails(format!(
                    "generator {} maps to {} under inverse-then-map",
                    gen, inv_then_fwd
                )));
            }
        }
        self.inverse_images = Some(candidate.images);
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word<T>] {
        &self.images
    }

    pub fn image(&self, g: usize) -> &Word<T> {
        &self.images[g]
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse_images.is_some()
    }

    pub fn inverse_images(&self) -> Option<&[Word<T>]> {
        self.inverse_images.as_deref()
    }

    /// The inverse map, with this map attached as its inverse.
    pub fn inverse_map(&self) -> Result<Self> {
        let inv = self.inverse_images.clone().ok_or(Error::MissingInverse)?;
        Ok(FreeMap {
            rank: self.rank,
            images: inv,
            inverse_images: Some(self.images.clone()),
        })
    }

    /// Applies the map to a word by substituting generator images.
    pub fn apply(&self, w: &Word<T>) -> Result<Word<T>> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: w.rank(),
            });
        }
        let mut acc = Word::identity(self.rank);
        for syl in w.syllables() {
            let piece = self.images[syl.gen].pow(&syl.exp)?;
            acc = acc.multiply(&piece)?;
        }
        Ok(acc)
    }

    /// Composition in application order: `w·compose(f, g) = (w·f)·g`.
    /// The inverse is carried along when both factors have one.
    pub fn compose(&self, then: &Self) -> Result<Self> {
        if self.rank != then.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: then.rank,
            });
        }
        let images = self
            .images
            .iter()
            .map(|w| then.apply(w))
            .collect::<Result<Vec<_>>>()?;
        let inverse_images = match (&self.inverse_images, &then.inverse_images) {
            (Some(_), Some(then_inv)) => {
                // (fg)⁻¹ = g⁻¹f⁻¹: push the images of g⁻¹ through f⁻¹.
                let self_inv = self.inverse_map()?;
                Some(
                    then_inv
                        .iter()
                        .map(|w| self_inv.apply(w))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            _ => None,
        };
        Ok(FreeMap {
            rank: self.rank,
            images,
            inverse_images,
        })
    }

    /// Integer power by repeated squaring; negative exponents need an
    /// attached inverse.
    pub fn power(&self, e: &T) -> Result<Self> {
        let base = if e.is_negative() {
            self.inverse_map()?
        } else {
            self.clone()
        };
        let mut m = e.abs().to_u64().ok_or(Error::ExponentTooLarge)?;
        let mut acc = Self::identity(self.rank);
        let mut sq = base;
        while m > 0 {
            if m & 1 == 1 {
                acc = acc.compose(&sq)?;
            }
            m >>= 1;
            if m > 0 {
                sq = sq.compose(&sq)?;
            }
        }
        Ok(acc)
    }

    /// The abelianization matrix: row `i` is the exponent vector of the
    /// image of generator `i`, so `e(w·f) = e(w)·A` for row vectors.
    pub fn abelianize(&self) -> IntMatrix<T> {
        let n = self.rank;
        let entries = (0..n)
            .flat_map(|i| (0..n).map(move |j| self.images[i].exponent_sum(j)))
            .collect();
        IntMatrix::new(n, entries).expect("n² entries")
    }

    fn require_rank2(&self) -> Result<()> {
        if self.rank == 2 {
            Ok(())
        } else {
            Err(Error::RankNotTwo(self.rank))
        }
    }

    /// Rank-2 automorphism test: the image of the commutator `[a, b]` must
    /// be conjugate to `[a, b]` or its inverse.
    pub fn is_automorphism_rank2(&self) -> Result<bool> {
        self.require_rank2()?;
        let a = Word::generator(2, 0)?;
        let b = Word::generator(2, 1)?;
        let base = commutator(&a, &b)?;
        let image = commutator(&self.images[0], &self.images[1])?;
        Ok(image.is_conjugate(&base)?.is_some()
            || image.is_conjugate(&base.invert())?.is_some())
    }

    /// Exact inverse of a rank-2 automorphism via greedy Nielsen reduction.
    ///
    /// Each step applies the length-reducing elementary transformation with
    /// the largest decrease; a basis pair always admits one until the images
    /// are single letters. A stall or a terminal pair that is not a signed
    /// permutation of the generators reports a non-automorphism.
    pub fn invert_rank2(&self) -> Result<Self> {
        self.require_rank2()?;
        let mut u = self.images[0].clone();
        let mut v = self.images[1].clone();
        let mut moves: Vec<FreeMap<T>> = Vec::new();
        let two = crate::int::small::<T>(2);

        loop {
            let total = u.letter_length() + v.letter_length();
            if total <= two {
                break;
            }
            // The eight elementary moves, each with the precomposition that
            // records it: replacing u by u·v turns the current map θ into
            // σ-then-θ where σ: a ↦ a·b.
            let candidates: Vec<(Word<T>, Word<T>, [&str; 2])> = vec![
                (u.multiply(&v)?, v.clone(), ["ab", "b"]),
                (u.multiply(&v.invert())?, v.clone(), ["aB", "b"]),
                (v.multiply(&u)?, v.clone(), ["ba", "b"]),
                (v.invert().multiply(&u)?, v.clone(), ["Ba", "b"]),
                (u.clone(), v.multiply(&u)?, ["a", "ba"]),
                (u.clone(), v.multiply(&u.invert())?, ["a", "bA"]),
                (u.clone(), u.multiply(&v)?, ["a", "ab"]),
                (u.clone(), u.invert().multiply(&v)?, ["a", "Ab"]),
            ];
            let best = candidates
                .into_iter()
                .map(|(nu, nv, sigma)| {
                    let len = nu.letter_length() + nv.letter_length();
                    (len, nu, nv, sigma)
                })
                .min_by(|x, y| x.0.cmp(&y.0))
                .expect("eight candidates");
            if best.0 >= total {
                return Err(Error::NotAnAutomorphism(format!(
                    "length reduction stalls at images {} and {}",
                    u, v
                )));
            }
            u = best.1;
            v = best.2;
            moves.push(letters_map(best.3)?);
        }

        // Terminal pair must be a signed permutation of the generators.
        let tau = FreeMap::new(2, vec![u.clone(), v.clone()])?;
        let tau_inv = signed_permutation_inverse(&u, &v).ok_or_else(|| {
            Error::NotAnAutomorphism(format!(
                "reduction ends at {} and {}, not a signed permutation",
                u, v
            ))
        })?;
        debug_assert!(tau_inv.compose(&tau)?.is_identity());

        // θ = σ_r ▸ … ▸ σ₁ ▸ φ = τ, so φ⁻¹ = τ⁻¹ ▸ σ_r ▸ … ▸ σ₁.
        let mut rho = tau_inv;
        for sigma in moves.iter().rev() {
            rho = rho.compose(sigma)?;
        }
        let rho = FreeMap {
            rank: 2,
            images: rho.images,
            inverse_images: Some(self.images.clone()),
        };
        // Reaching a signed permutation proves φ is an automorphism, so a
        // failure here would be a bug, not bad input.
        if !self.compose(&rho)?.is_identity() || !rho.compose(self)?.is_identity() {
            return Err(Error::Internal(
                "inverse candidate fails to verify after successful reduction".into(),
            ));
        }
        Ok(rho)
    }

    /// True when this is the identity map.
    pub fn is_identity(&self) -> bool {
        (0..self.rank).all(|g| {
            self.images[g]
                == Word::generator(self.rank, g).expect("in range")
        })
    }

    /// Rank-2 innerness test. Inner maps abelianize to the identity, and in
    /// rank 2 the converse holds for automorphisms; the witness is found by
    /// [`FreeMap::extract_conjugator`].
    pub fn is_inner_rank2(&self) -> Result<Option<InnerWitness<T>>> {
        self.require_rank2()?;
        if !self.abelianize().is_identity() {
            return Ok(None);
        }
        match self.extract_conjugator() {
            Ok(word) => Ok(Some(InnerWitness { word })),
            Err(Error::NotInner) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// If this map is the inner automorphism `g ↦ w⁻¹·g·w`, returns `w`.
    ///
    /// Candidates are read off the generator images: the reduced image of a
    /// generator `g` under conjugation by `w` is `v⁻¹·g·v` where `v` is `w`
    /// with its maximal leading `g`-power stripped — a syllable palindrome
    /// with middle syllable exactly `g¹` and `v` as the trailing half. At
    /// most one generator heads `w`, so some candidate equals `w`; every
    /// candidate is verified on all generators before being returned.
    pub fn extract_conjugator(&self) -> Result<Word<T>> {
        if self.rank == 0 {
            return Ok(Word::identity(0));
        }
        if self.rank == 1 {
            // F₁ is abelian: the only inner map is the identity.
            return if self.is_identity() {
                Ok(Word::identity(1))
            } else {
                Err(Error::NotInner)
            };
        }
        let mut candidates: Vec<Word<T>> = Vec::new();
        for g in 0..self.rank {
            let image = self.images[g].clone();
            let syls = image.syllables();
            if syls.len() % 2 == 0 {
                continue;
            }
            let mid = syls.len() / 2;
            if syls[mid].gen != g || !syls[mid].exp.is_one() {
                continue;
            }
            let tail = Word::reduce(
                self.rank,
                syls[mid + 1..]
                    .iter()
                    .map(|s| (s.gen, s.exp.clone())),
            )?;
            if !candidates.contains(&tail) {
                candidates.push(tail);
            }
        }
        for cand in candidates {
            if *self == FreeMap::inner(&cand) {
                return Ok(cand);
            }
        }
        Err(Error::NotInner)
    }
}

/// The commutator `x⁻¹·y⁻¹·x·y`.
pub fn commutator<T: Int>(x: &Word<T>, y: &Word<T>) -> Result<Word<T>> {
    let factors = [x.invert(), y.invert(), x.clone(), y.clone()];
    Word::product(x.rank(), &factors)
}

/// Builds a rank-2 map from compact letter strings (`a`/`b` generators,
/// `A`/`B` inverses), used for the Nielsen move table.
fn letters_map<T: Int>(images: [&str; 2]) -> Result<FreeMap<T>> {
    let word = |s: &str| -> Result<Word<T>> {
        Word::reduce(
            2,
            s.chars().map(|ch| match ch {
                'a' => (0, T::one()),
                'b' => (1, T::one()),
                'A' => (0, -T::one()),
                'B' => (1, -T::one()),
                _ => unreachable!("move table uses a, b, A, B only"),
            }),
        )
    };
    FreeMap::new(2, vec![word(images[0])?, word(images[1])?])
}

/// Inverse of the map `a ↦ u, b ↦ v` when `(u, v)` is a signed permutation
/// of the generators.
fn signed_permutation_inverse<T: Int>(u: &Word<T>, v: &Word<T>) -> Option<FreeMap<T>> {
    let single = |w: &Word<T>| -> Option<(usize, bool)> {
        let syls = w.syllables();
        if syls.len() != 1 || !syls[0].exp.clone().abs().is_one() {
            return None;
        }
        Some((syls[0].gen, syls[0].exp.is_negative()))
    };
    let (g1, neg1) = single(u)?;
    let (g2, neg2) = single(v)?;
    if g1 == g2 {
        return None;
    }
    let mut inv_images = vec![Word::identity(2), Word::identity(2)];
    let gen = |g: usize, neg: bool| -> Word<T> {
        let e = if neg { -T::one() } else { T::one() };
        Word::generator_pow(2, g, e).expect("in range")
    };
    // u = g1^s means g1 ↦ a^s under the inverse.
    inv_images[g1] = gen(0, neg1);
    inv_images[g2] = gen(1, neg2);
    Some(FreeMap {
        rank: 2,
        images: inv_images,
        inverse_images: None,
    })
}

impl<T: Int> fmt::Display for FreeMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |g: usize| -> String {
            if self.rank <= 26 {
                ((b'a' + g as u8) as char).to_string()
            } else {
                format!("x{}", g + 1)
            }
        };
        for (g, w) in self.images.iter().enumerate() {
            if g > 0 {
                write!(f, " ; ")?;
            }
            write!(f, "{} -> {}", name(g), w)?;
        }
        if let Some(inv) = &self.inverse_images {
            write!(f, " ; inv:")?;
            for (g, w) in inv.iter().enumerate() {
                if g > 0 {
                    write!(f, " ;")?;
                }
                write!(f, " {} -> {}", name(g), w)?;
            }
        }
        Ok(())
    }
}
