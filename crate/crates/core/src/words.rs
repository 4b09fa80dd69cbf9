//! Freely reduced words in a finitely generated free group F_n.
//!
//! A [`Word`] is a run-length encoded reduced word: a sequence of syllables
//! `generator^exponent` in which adjacent syllables use distinct generators
//! and no exponent is zero. The run-length representation keeps huge powers
//! cheap — `b^1000000` is a single syllable — which matters because the
//! automorphisms treated in this crate push exponents up linearly under
//! iteration.
//!
//! Cyclic reduction follows one fixed convention, documented on
//! [`Word::cyclically_reduce`]: the stripped conjugating word is returned so
//! that `w = conjugator⁻¹ · core · conjugator`.
//!
//! Conjugacy of words is decided on cyclic words: both inputs are cyclically
//! reduced, their run sequences are merged across the seam (first and last
//! runs on the same generator are one run of the cyclic word), and one merged
//! run sequence is searched for in the doubled other. Every positive answer
//! carries an explicit witness `x` with `x⁻¹ u x = v`.

use std::fmt;

use crate::error::{Error, Result};
use crate::int::Int;

/// One maximal run `generator^exponent` of a reduced word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Syllable<T> {
    /// Generator index, `0..rank`.
    pub gen: usize,
    /// Nonzero exponent.
    pub exp: T,
}

impl<T> Syllable<T> {
    pub fn new(gen: usize, exp: T) -> Self {
        Syllable { gen, exp }
    }
}

/// A freely reduced word in F_n.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Word<T: Int> {
    rank: usize,
    syllables: Vec<Syllable<T>>,
}

impl<T: Int> Word<T> {
    /// The empty word (group identity) of F_n.
    pub fn identity(rank: usize) -> Self {
        Word {
            rank,
            syllables: Vec::new(),
        }
    }

    /// The single generator `gen` as a word.
    pub fn generator(rank: usize, gen: usize) -> Result<Self> {
        Self::generator_pow(rank, gen, T::one())
    }

    /// The power `gen^exp` as a word.
    pub fn generator_pow(rank: usize, gen: usize, exp: T) -> Result<Self> {
        Self::reduce(rank, [(gen, exp)])
    }

    /// Freely reduces a raw sequence of `(generator, exponent)` pairs.
    ///
    /// This is the fundamental constructor: it merges adjacent runs on the
    /// same generator, drops vanishing runs, and cascades cancellations, so
    /// the result is reduced no matter the input. Exponents may be any
    /// integers (including zero, which is skipped).
    pub fn reduce<I>(rank: usize, raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, T)>,
    {
        let mut syllables: Vec<Syllable<T>> = Vec::new();
        for (gen, exp) in raw {
            if gen >= rank {
                return Err(Error::GeneratorOutOfRange { index: gen, rank });
            }
            if exp.is_zero() {
                continue;
            }
            match syllables.last_mut() {
                Some(last) if last.gen == gen => {
                    let merged = last.exp.clone() + exp;
                    if merged.is_zero() {
                        syllables.pop();
                    } else {
                        last.exp = merged;
                    }
                }
                _ => syllables.push(Syllable::new(gen, exp)),
            }
        }
        Ok(Word { rank, syllables })
    }

    /// Builds a word from syllables already known to be reduced.
    ///
    /// Used internally where reducedness is structurally guaranteed; debug
    /// builds re-check the invariant.
    fn from_reduced(rank: usize, syllables: Vec<Syllable<T>>) -> Self {
        debug_assert!(syllables.iter().all(|s| !s.exp.is_zero()));
        debug_assert!(syllables.windows(2).all(|w| w[0].gen != w[1].gen));
        debug_assert!(syllables.iter().all(|s| s.gen < rank));
        Word { rank, syllables }
    }

    /// Rank of the ambient free group.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The reduced run sequence.
    pub fn syllables(&self) -> &[Syllable<T>] {
        &self.syllables
    }

    /// True for the empty word.
    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of runs.
    pub fn syllable_count(&self) -> usize {
        self.syllables.len()
    }

    /// Letter length: the sum of the absolute exponents.
    pub fn letter_length(&self) -> T {
        self.syllables
            .iter()
            .fold(T::zero(), |acc, s| acc + s.exp.abs())
    }

    fn check_rank(&self, other: &Self) -> Result<()> {
        if self.rank == other.rank {
            Ok(())
        } else {
            Err(Error::RankMismatch {
                expected: self.rank,
                got: other.rank,
            })
        }
    }

    /// Freely reduced product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let raw = self
            .syllables
            .iter()
            .chain(other.syllables.iter())
            .map(|s| (s.gen, s.exp.clone()));
        Self::reduce(self.rank, raw)
    }

    /// Product of several words.
    pub fn product<'a, I>(rank: usize, factors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Self>,
        T: 'a,
    {
        let mut acc = Self::identity(rank);
        for f in factors {
            acc = acc.multiply(f)?;
        }
        Ok(acc)
    }

    /// The inverse word: syllables reversed with negated exponents.
    pub fn invert(&self) -> Self {
        let syllables = self
            .syllables
            .iter()
            .rev()
            .map(|s| Syllable::new(s.gen, -s.exp.clone()))
            .collect();
        Word::from_reduced(self.rank, syllables)
    }

    /// `self^exp`, computed through the cyclic decomposition
    /// `w = c⁻¹ ŵ c  ⇒  w^e = c⁻¹ ŵ^e c`, so that powers of single-run cores
    /// stay O(1) even for huge exponents. Multi-run cores are repeated
    /// explicitly and error out if the repeat count does not fit in memory.
    pub fn pow(&self, exp: &T) -> Result<Self> {
        if exp.is_zero() || self.is_identity() {
            return Ok(Self::identity(self.rank));
        }
        if exp.is_one() {
            return Ok(self.clone());
        }
        let (core, conj) = self.cyclically_reduce();
        let powered_core = if core.syllable_count() == 1 {
            let s = &core.syllables[0];
            Word::from_reduced(
                self.rank,
                vec![Syllable::new(s.gen, s.exp.clone() * exp.clone())],
            )
        } else {
            let reps = exp.abs().to_usize().ok_or(Error::ExponentTooLarge)?;
            let base = if exp.is_negative() {
                core.invert()
            } else {
                core.clone()
            };
            // A cyclically reduced word never cancels against itself, so the
            // repetition only merges seam runs.
            let raw = std::iter::repeat(&base)
                .take(reps)
                .flat_map(|w| w.syllables.iter().map(|s| (s.gen, s.exp.clone())));
            Self::reduce(self.rank, raw)?
        };
        conj.invert()
            .multiply(&powered_core)?
            .multiply(&conj)
    }

    /// Exponent sum of one generator across the word.
    ///
    /// Panics if `gen` is out of range (caller precondition).
    pub fn exponent_sum(&self, gen: usize) -> T {
        assert!(gen < self.rank, "generator index out of range");
        self.syllables
            .iter()
            .filter(|s| s.gen == gen)
            .fold(T::zero(), |acc, s| acc + s.exp.clone())
    }

    /// Cyclic reduction with conjugator tracking.
    ///
    /// Returns `(core, conjugator)` with `self = conjugator⁻¹ · core ·
    /// conjugator` and `core` cyclically reduced (its first and last letters
    /// are not mutually inverse). The convention: the conjugator is the
    /// inverse of the prefix stripped from the front, e.g.
    /// `a b a⁻¹ → (b, a⁻¹)`.
    pub fn cyclically_reduce(&self) -> (Self, Self) {
        let mut syl: std::collections::VecDeque<Syllable<T>> =
            self.syllables.iter().cloned().collect();
        // The stripped prefix, collected front to back.
        let mut prefix: Vec<(usize, T)> = Vec::new();
        while syl.len() >= 2 {
            let first = syl.front().unwrap().clone();
            let last = syl.back().unwrap().clone();
            if first.gen != last.gen || first.exp.signum() == last.exp.signum() {
                break;
            }
            if first.exp.abs() <= last.exp.abs() {
                // Strip the whole first run; it cancels into the last run.
                prefix.push((first.gen, first.exp.clone()));
                syl.pop_front();
                let merged = last.exp.clone() + first.exp;
                syl.pop_back();
                if !merged.is_zero() {
                    syl.push_back(Syllable::new(last.gen, merged));
                }
            } else {
                // Strip just enough of the first run to consume the last run.
                prefix.push((first.gen, -last.exp.clone()));
                syl.front_mut().unwrap().exp = first.exp + last.exp.clone();
                syl.pop_back();
            }
        }
        let core = Word::from_reduced(self.rank, syl.into_iter().collect());
        let prefix_word =
            Self::reduce(self.rank, prefix).expect("stripped prefix uses valid generators");
        (core, prefix_word.invert())
    }

    /// Merges the seam of a cyclically reduced word: if the first and last
    /// runs use the same generator they are one run of the cyclic word.
    /// Returns the merged linear representative `m` and the trailing run `τ`
    /// with `m = τ · self · τ⁻¹`.
    fn merge_seam(&self) -> (Self, Self) {
        if self.syllables.len() >= 2
            && self.syllables.first().unwrap().gen == self.syllables.last().unwrap().gen
        {
            let last = self.syllables.last().unwrap().clone();
            let tau = Word::from_reduced(self.rank, vec![last.clone()]);
            let mut runs = Vec::with_capacity(self.syllables.len() - 1);
            runs.push(Syllable::new(
                self.syllables[0].gen,
                self.syllables[0].exp.clone() + last.exp,
            ));
            runs.extend_from_slice(&self.syllables[1..self.syllables.len() - 1]);
            (Word::from_reduced(self.rank, runs), tau)
        } else {
            (self.clone(), Self::identity(self.rank))
        }
    }

    /// Conjugacy test with witness.
    ///
    /// Returns `Some(x)` with `x⁻¹ · self · x = other` when the two words are
    /// conjugate, `None` otherwise. Decision by cyclic reduction followed by
    /// a rotation search of merged run sequences (the doubled-sequence trick,
    /// with a KMP scan so long words stay linear-time).
    pub fn is_conjugate(&self, other: &Self) -> Result<Option<Self>> {
        self.check_rank(other)?;
        let (u_core, u_conj) = self.cyclically_reduce();
        let (v_core, v_conj) = other.cyclically_reduce();
        if u_core.letter_length() != v_core.letter_length() {
            return Ok(None);
        }
        if u_core.is_identity() {
            // Both words are the identity.
            return Ok(Some(Self::identity(self.rank)));
        }
        let (u_merged, u_tau) = u_core.merge_seam();
        let (v_merged, v_tau) = v_core.merge_seam();
        let n = u_merged.syllable_count();
        if n != v_merged.syllable_count() {
            return Ok(None);
        }
        // Find a rotation index j with u_merged = r·s, v_merged = s·r where
        // r is the first j runs, by locating v's runs inside u's doubled.
        let rotation = match find_rotation(&u_merged.syllables, &v_merged.syllables) {
            Some(j) => j,
            None => return Ok(None),
        };
        let r = Word::from_reduced(
            self.rank,
            u_merged.syllables[..rotation].to_vec(),
        );
        // v = x⁻¹ u x with x assembled from the tracked conjugations:
        //   u = u_conj⁻¹ · u_core · u_conj,   u_merged = u_tau · u_core · u_tau⁻¹,
        //   v_merged = r⁻¹ · u_merged · r,    v = v_conj⁻¹ · v_tau⁻¹ · v_merged · v_tau · v_conj.
        let x = Word::product(
            self.rank,
            [&u_conj.invert(), &u_tau.invert(), &r, &v_tau, &v_conj],
        )?;
        debug_assert_eq!(
            x.invert().multiply(self).unwrap().multiply(&x).unwrap(),
            *other
        );
        Ok(Some(x))
    }
}

/// Locates `pattern` as a contiguous block in the doubled `text` (rotation
/// search), returning the rotation offset. KMP on syllables.
fn find_rotation<T: Int>(text: &[Syllable<T>], pattern: &[Syllable<T>]) -> Option<usize> {
    let n = text.len();
    debug_assert_eq!(n, pattern.len());
    if n == 0 {
        return Some(0);
    }
    // Prefix function of the pattern.
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && pattern[i] != pattern[k] {
            k = fail[k - 1];
        }
        if pattern[i] == pattern[k] {
            k += 1;
        }
        fail[i] = k;
    }
    // Scan the doubled text (index arithmetic instead of materialising it).
    let mut matched = 0;
    for i in 0..(2 * n).saturating_sub(1) {
        let t = &text[i % n];
        while matched > 0 && *t != pattern[matched] {
            matched = fail[matched - 1];
        }
        if *t == pattern[matched] {
            matched += 1;
        }
        if matched == n {
            return Some((i + 1 - n) % n);
        }
    }
    None
}

impl<T: Int> fmt::Display for Word<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        let letters = self.rank <= 26;
        for (pos, s) in self.syllables.iter().enumerate() {
            if pos > 0 {
                write!(f, " ")?;
            }
            if letters {
                write!(f, "{}", (b'a' + s.gen as u8) as char)?;
            } else {
                write!(f, "x{}", s.gen + 1)?;
            }
            if !s.exp.is_one() {
                write!(f, "^{}", s.exp)?;
            }
        }
        Ok(())
    }
}
