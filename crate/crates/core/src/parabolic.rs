//! Fixed-subgroup machinery and outer normal forms for shear monodromies
//! `φ: a ↦ a·b^k, b ↦ b` with `k ≠ 0`.
//!
//! Words in `F₂` split into pieces of the shapes `b^m`, `a·b^m`, `b^m·a⁻¹`
//! and `a·b^m·a⁻¹` by breaking exactly before each `a` and after each
//! `a⁻¹`; the shear acts piecewise on this split, which makes the fixed
//! subgroup `⟨a·b·a⁻¹, b⟩` and conjugacy-into-it decidable.
//!
//! [`parabolic_outer_normal_form`] normalizes a self-isomorphism `Θ` of the
//! mapping torus into `Θ·Ψ^m·Γ_g = Ξ^i·Δ^δ·Ω^ω` with `0 ≤ i < |k|`,
//! exhibiting the outer automorphism group as virtually the cyclic group
//! generated by `Ψ`.

use crate::error::{Error, Result};
use crate::fnauto::FreeMap;
use crate::int::{from_i64, Int};
use crate::torus::{analyze_restriction, builtin, RestrictionAnalysis, TorusElement, TorusMap};
use crate::words::Word;

/// One piece of the canonical split: `b^m`, `a·b^m`, `b^m·a⁻¹`, or
/// `a·b^m·a⁻¹`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Piece<T: Int> {
    BPower(T),
    AThenB(T),
    BThenAInv(T),
    ABAInv(T),
}

impl<T: Int> Piece<T> {
    /// The word this piece spells.
    pub fn word(&self) -> Word<T> {
        let one = T::one();
        let pairs: Vec<(usize, T)> = match self {
            Piece::BPower(m) => vec![(1, m.clone())],
            Piece::AThenB(m) => vec![(0, one), (1, m.clone())],
            Piece::BThenAInv(m) => vec![(1, m.clone()), (0, -one)],
            Piece::ABAInv(m) => vec![(0, one.clone()), (1, m.clone()), (0, -one)],
        };
        Word::reduce(2, pairs).expect("valid rank-2 pairs")
    }

    /// Whether the shear fixes this piece (`b^m` and `a·b^m·a⁻¹` are fixed;
    /// the two open-ended shapes pick up `b^{±rk}`).
    pub fn is_fixed_shape(&self) -> bool {
        matches!(self, Piece::BPower(_) | Piece::ABAInv(_))
    }
}

/// The canonical split of a rank-2 word, with breaks exactly before each
/// `a` and after each `a⁻¹`; concatenation recovers the word.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PieceSplit<T: Int> {
    pieces: Vec<Piece<T>>,
}

impl<T: Int> PieceSplit<T> {
    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }

    /// Concatenates the pieces back into the original word.
    pub fn concat(&self) -> Word<T> {
        let mut acc = Word::identity(2);
        for piece in &self.pieces {
            acc = acc.multiply(&piece.word()).expect("rank 2");
        }
        acc
    }
}

/// Splits a rank-2 word into its canonical pieces.
///
/// A positive `a`-run of length `e` contributes `e - 1` bare `a` pieces and
/// opens a new piece; each `a⁻¹` closes the pending piece. `b`-runs merge
/// into the pending piece.
pub fn split_pieces<T: Int>(w: &Word<T>) -> Result<PieceSplit<T>> {
    if w.rank() != 2 {
        return Err(Error::RankNotTwo(w.rank()));
    }
    let mut pieces: Vec<Piece<T>> = Vec::new();
    // (has_a_prefix, accumulated b-exponent) of the piece being built.
    let mut pending: Option<(bool, T)> = None;
    let flush = |pending: &mut Option<(bool, T)>, pieces: &mut Vec<Piece<T>>| {
        if let Some((has_a, m)) = pending.take() {
            pieces.push(if has_a {
                Piece::AThenB(m)
            } else {
                Piece::BPower(m)
            });
        }
    };
    for syl in w.syllables() {
        if syl.gen == 1 {
            // A b-run joins the pending piece or starts a bare one.
            pending = Some(match pending.take() {
                Some((has_a, m)) => (has_a, m + syl.exp.clone()),
                None => (false, syl.exp.clone()),
            });
            continue;
        }
        let count = syl
            .exp
            .clone()
            .abs()
            .to_usize()
            .ok_or(Error::ExponentTooLarge)?;
        if syl.exp.is_positive() {
            // Break before each a: close the pending piece, emit the bare
            // a's, keep the last one open.
            flush(&mut pending, &mut pieces);
            for _ in 0..count - 1 {
                pieces.push(Piece::AThenB(T::zero()));
            }
            pending = Some((true, T::zero()));
        } else {
            // Break after each a⁻¹: the first one closes the pending piece.
            match pending.take() {
                Some((true, m)) => pieces.push(Piece::ABAInv(m)),
                Some((false, m)) => pieces.push(Piece::BThenAInv(m)),
                None => pieces.push(Piece::BThenAInv(T::zero())),
            }
            for _ in 0..count - 1 {
                pieces.push(Piece::BThenAInv(T::zero()));
            }
        }
    }
    flush(&mut pending, &mut pieces);
    let split = PieceSplit { pieces };
    debug_assert_eq!(&split.concat(), w, "split must concatenate back");
    Ok(split)
}

fn require_nonzero<T: Int>(value: &T, name: &'static str) -> Result<()> {
    if value.is_zero() {
        Err(Error::ZeroArgument(name))
    } else {
        Ok(())
    }
}

/// The shear `a ↦ a·b^k, b ↦ b` with its inverse.
pub fn shear_map<T: Int>(k: &T) -> FreeMap<T> {
    let image = |e: T| -> Word<T> {
        Word::generator(2, 0)
            .and_then(|a| a.multiply(&Word::generator_pow(2, 1, e).expect("in range")))
            .expect("rank 2")
    };
    FreeMap::new(2, vec![image(k.clone()), Word::generator(2, 1).expect("in range")])
        .expect("rank 2")
        .with_inverse(vec![image(-k.clone()), Word::generator(2, 1).expect("in range")])
        .expect("shear inverse verifies")
}

/// True when `w·φ^r = w` for the shear with parameter `k`: exactly when
/// every piece of the split is of a fixed shape.
pub fn fixed_by<T: Int>(w: &Word<T>, k: &T, r: &T) -> Result<bool> {
    require_nonzero(k, "k")?;
    require_nonzero(r, "r")?;
    Ok(split_pieces(w)?.pieces().iter().all(Piece::is_fixed_shape))
}

/// If `w·φ^r` is conjugate to `w`, produces `(x, v)` with `x⁻¹·w·x = v` and
/// `v·φ = v`; otherwise `None`.
///
/// The word is cyclically reduced with its conjugator tracked; a cyclically
/// reduced conjugacy class meeting the fixed subgroup contains powers of
/// `b` outright, or has zero `a`-exponent sum and becomes fixed when
/// rotated to start at a positive `a`-run.
pub fn conjugate_into_fixed<T: Int>(
    w: &Word<T>,
    k: &T,
    r: &T,
) -> Result<Option<(Word<T>, Word<T>)>> {
    require_nonzero(k, "k")?;
    require_nonzero(r, "r")?;
    if w.rank() != 2 {
        return Err(Error::RankNotTwo(w.rank()));
    }
    let phi = shear_map(k);
    let (core, conj) = w.cyclically_reduce();
    let x0 = conj.invert();
    // Powers of b (and the identity) are fixed as they stand.
    if core.syllables().iter().all(|s| s.gen == 1) {
        return Ok(Some((x0, core)));
    }
    // The gate: w·φ^r ~ w. (Comparing b-exponent sums shows this forces
    // the a-exponent sum of w to vanish.)
    let image = phi.power(r)?.apply(w)?;
    if image.is_conjugate(w)?.is_none() {
        return Ok(None);
    }
    if !core.exponent_sum(0).is_zero() {
        return Err(Error::Internal(
            "conjugate image with nonzero a-exponent sum".into(),
        ));
    }
    // Rotate the cyclic word to start at a positive a-run; the rotation is
    // a product of complete fixed blocks.
    let idx = core
        .syllables()
        .iter()
        .position(|s| s.gen == 0 && s.exp.is_positive())
        .ok_or_else(|| Error::Internal("zero a-sum but no positive a-run".into()))?;
    let prefix = Word::reduce(
        2,
        core.syllables()[..idx]
            .iter()
            .map(|s| (s.gen, s.exp.clone())),
    )?;
    let v = prefix.invert().multiply(&core)?.multiply(&prefix)?;
    if phi.apply(&v)? != v {
        return Err(Error::Internal(
            "rotation to a positive a-run is not fixed".into(),
        ));
    }
    Ok(Some((x0.multiply(&prefix)?, v)))
}

/// The primitive root: the unique `(u, r)` with `w = u^r` and `r` maximal.
///
/// Roots of a cyclically reduced word are read off its run sequence: either
/// the run sequence is `r`-periodic, or the root's first and last runs
/// share a generator and merge at every seam, leaving `r·p + 1` runs.
/// Every candidate is verified by exact exponentiation.
pub fn primitive_root<T: Int>(w: &Word<T>) -> Result<(Word<T>, T)> {
    if w.is_identity() {
        return Ok((w.clone(), T::one()));
    }
    let (core, conj) = w.cyclically_reduce();
    let restore = |u: Word<T>| -> Result<Word<T>> {
        conj.invert().multiply(&u)?.multiply(&conj)
    };
    let syls = core.syllables();
    let s = syls.len();
    if s == 1 {
        let e = &syls[0].exp;
        let unit = if e.is_negative() { -T::one() } else { T::one() };
        let root = restore(Word::generator_pow(w.rank(), syls[0].gen, unit)?)?;
        return Ok((root, e.clone().abs()));
    }
    let prefix = |p: usize, close: bool| -> Result<Word<T>> {
        let mut pairs: Vec<(usize, T)> = syls[..p]
            .iter()
            .map(|x| (x.gen, x.exp.clone()))
            .collect();
        if close {
            pairs.push((syls[s - 1].gen, syls[s - 1].exp.clone()));
        }
        Word::reduce(w.rank(), pairs)
    };
    for r in (2..=s).rev() {
        let r_t = from_i64::<T>(r as i64);
        if s % r == 0 {
            let cand = prefix(s / r, false)?;
            if cand.pow(&r_t)? == core {
                return Ok((restore(cand)?, r_t));
            }
        }
        if (s - 1) % r == 0 && (s - 1) / r >= 1 {
            let cand = prefix((s - 1) / r, true)?;
            if cand.pow(&r_t)? == core {
                return Ok((restore(cand)?, r_t));
            }
        }
    }
    Ok((w.clone(), T::one()))
}

/// The normal form `Θ·Ψ^m·Γ_g = Ξ^i·Δ^δ·Ω^ω` of a self-isomorphism of a
/// shear mapping torus, with `0 ≤ i < |k|`. The identity is verified
/// exactly on all generators before the result is returned.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParabolicNormalForm<T: Int> {
    pub m: T,
    pub g: TorusElement<T>,
    pub i: T,
    pub delta: bool,
    pub omega: bool,
}

/// Normalizes a verified self-isomorphism `Θ` of the mapping torus of
/// `a ↦ a·b^k, b ↦ b` (`k ≠ 0`) into `Θ·Ψ^m·Γ_g = Ξ^i·Δ^δ·Ω^ω`.
///
/// The stages mirror the structure of the outer automorphism group:
/// a conjugation pulls the `b`-image into the fixed subgroup, a power of
/// `Ψ` clears the stable exponent of the `a`-image, one of the four sign
/// corrections `Δ^δ·Ω^ω` makes the result positive with unipotent
/// abelianized restriction, and the leftover shear power is reduced modulo
/// `Ξ^k = Γ_t`.
pub fn parabolic_outer_normal_form<T: Int>(
    theta: &TorusMap<T>,
) -> Result<ParabolicNormalForm<T>> {
    let torus = theta.source().clone();
    if *theta.target() != torus {
        return Err(Error::TorusMismatch);
    }
    if !theta.has_inverse() {
        return Err(Error::MissingInverse);
    }
    let (k, b_inverted) = builtin::parabolic_shape(&torus)?;
    if b_inverted {
        return Err(Error::MonodromyShape(
            "normal form needs the monodromy to fix b".into(),
        ));
    }
    if k.is_zero() {
        return Err(Error::MonodromyShape(
            "normal form needs a shear with k ≠ 0".into(),
        ));
    }

    // The image of b must be a nontrivial fiber word (torsion in the
    // abelianization forces the stable exponent to vanish), and the image
    // of t must generate the stable quotient.
    let b_image = theta.fiber_image(1);
    if !b_image.t_exponent().is_zero() {
        return Err(Error::NotAnAutomorphism(format!(
            "image of b has stable exponent {}",
            b_image.t_exponent()
        )));
    }
    let w2_full = b_image.tail().clone();
    if w2_full.is_identity() {
        return Err(Error::NotAnAutomorphism(
            "image of b lies in the stable line".into(),
        ));
    }
    let q = theta.t_image().t_exponent().clone();
    if !q.clone().abs().is_one() {
        return Err(Error::NotAnAutomorphism(format!(
            "image of t has stable exponent {q}, need ±1"
        )));
    }

    // Pull the primitive root of the b-image into the fixed subgroup and
    // absorb the conjugation into Θ.
    let (w2, _) = primitive_root(&w2_full)?;
    let (x, _v2) = conjugate_into_fixed(&w2, &k, &q)?.ok_or_else(|| {
        Error::NotAnAutomorphism(
            "root of the b-image is not conjugate into the fixed subgroup".into(),
        )
    })?;
    let x_elem = torus.fiber_element(x)?;
    let theta1 = theta.compose(&builtin::gamma(&x_elem)?)?;

    // Clear the stable exponent of the a-image with a power of Ψ.
    let a_image = theta1.fiber_image(0);
    let p = a_image.t_exponent().clone();
    let eps = a_image.tail().exponent_sum(0);
    if !eps.clone().abs().is_one() {
        return Err(Error::NotAnAutomorphism(format!(
            "fiber part of the a-image has a-exponent sum {eps}, need ±1"
        )));
    }
    let m = -(eps * p);
    let psi_m = builtin::psi_power(&torus, &m)?;
    let upsilon0 = theta1.compose(&psi_m)?;

    // Exactly one sign correction Δ^δ·Ω^ω makes the map positive with
    // unipotent abelianized restriction (1 j; 0 1).
    let delta_map = builtin::delta(&torus)?;
    let omega_map = builtin::omega(&torus)?;
    let mut selected: Option<(bool, bool, RestrictionAnalysis<T>)> = None;
    for (d, o) in [(false, false), (true, false), (false, true), (true, true)] {
        let mut cand = upsilon0.clone();
        if d {
            cand = cand.compose(&delta_map)?;
        }
        if o {
            cand = cand.compose(&omega_map)?;
        }
        let analysis = analyze_restriction(&cand)?;
        if !analysis.signum.is_one() {
            continue;
        }
        let ab = analysis.restriction.abelianize();
        if ab.at(0, 0).is_one() && ab.at(1, 0).is_zero() && ab.at(1, 1).is_one() {
            if selected.is_some() {
                return Err(Error::Internal(
                    "two sign corrections yield positive unipotent maps".into(),
                ));
            }
            selected = Some((d, o, analysis));
        }
    }
    let (delta, omega, analysis) = selected.ok_or_else(|| {
        Error::NotAnAutomorphism(
            "no sign correction yields a positive unipotent map".into(),
        )
    })?;

    // The corrected map W satisfies W = Ξ^j·Γ_Z: j is read off the
    // abelianized restriction, and z off the leftover inner discrepancy.
    let j = analysis.restriction.abelianize().at(0, 1).clone();
    let xi_j_fiber = FreeMap::new(
        2,
        vec![
            Word::generator(2, 0)?.multiply(&Word::generator_pow(2, 1, j.clone())?)?,
            Word::generator(2, 1)?,
        ],
    )?;
    let gamma_z = analysis.restriction.invert_rank2()?.compose(&xi_j_fiber)?;
    let z = gamma_z.extract_conjugator().map_err(|e| match e {
        Error::NotInner => Error::NotAnAutomorphism(
            "restriction does not differ from a shear power by an inner map".into(),
        ),
        other => other,
    })?;

    // Reduce the shear power modulo Ξ^k = Γ_t and unwind:
    // W = Ξ^i·Γ_C with C = t^λ·z⁻¹, so Υ₀ = W·D = Ξ^i·D·Γ_{C·D} and
    // g = X'·(C·D)⁻¹ with X' the Ψ^m-image of the stage-one conjugator.
    let abs_k = k.clone().abs();
    let i = j.mod_floor(&abs_k);
    let lambda = (j - i.clone()) / k;
    let c = torus.element(lambda, z.invert())?;
    let mut d_map = TorusMap::identity(&torus);
    if delta {
        d_map = d_map.compose(&delta_map)?;
    }
    if omega {
        d_map = d_map.compose(&omega_map)?;
    }
    let x_prime = psi_m.apply(&x_elem)?;
    let c_through_d = d_map.apply(&c)?;
    let g = x_prime.multiply(&c_through_d.invert()?)?;

    // Final exact verification of Θ·Ψ^m·Γ_g = Ξ^i·Δ^δ·Ω^ω.
    let lhs = theta.compose(&psi_m)?.compose(&builtin::gamma(&g)?)?;
    let rhs = builtin::xi_power(&torus, &i)?.compose(&d_map)?;
    if lhs != rhs {
        return Err(Error::Internal(
            "normal-form identity failed to verify".into(),
        ));
    }
    Ok(ParabolicNormalForm {
        m,
        g,
        i,
        delta,
        omega,
    })
}
