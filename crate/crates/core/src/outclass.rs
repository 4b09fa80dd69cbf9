//! Classification of `Out(M_φ)` for rank-2 mapping tori, and the
//! isomorphism decision between two such tori.
//!
//! Both questions reduce to the abelianized monodromy `A ∈ GL₂(ℤ)`: the
//! outer automorphism group is read off the conjugacy class of `A`, and
//! two tori are isomorphic exactly when the matrices are conjugate up to
//! inversion. All certificates are verified integer matrices.

use crate::error::{Error, Result};
use crate::fnauto::FreeMap;
use crate::int::Int;
use crate::torus::{abelian_invariants_of, AbelianInvariants};
use crate::zmat::{gl2_conjugate, has_eigenvalue_one, parabolic_canonical_form, IntMatrix};
use std::fmt;

/// The five classes of `Out(M_φ)` for a rank-2 mapping torus, keyed by the
/// abelianized monodromy `A`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum OutCase {
    /// `A = I`: the largest case.
    Identity,
    /// `A = -I`.
    MinusIdentity,
    /// `det(A - I) ≠ 0`: no eigenvalue 1.
    NoEigenvalueOne,
    /// `det A = -1` with eigenvalue 1: conjugate to `(1 k; 0 -1)`, `k ∈ {0, 1}`.
    Involution,
    /// `det A = 1` with eigenvalue 1, `A ≠ I`: conjugate to `(1 k; 0 1)`, `k ≥ 1`.
    Shear,
}

impl OutCase {
    /// Roman-numeral tag `I` through `V`.
    pub fn tag(self) -> &'static str {
        match self {
            OutCase::Identity => "I",
            OutCase::MinusIdentity => "II",
            OutCase::NoEigenvalueOne => "III",
            OutCase::Involution => "IV",
            OutCase::Shear => "V",
        }
    }

    /// Short structure description of `Out(M_φ)` in this case.
    pub fn descriptor(self) -> &'static str {
        match self {
            OutCase::Identity => "(ℤ²⋊C₂)⋊GL₂(ℤ)",
            OutCase::MinusIdentity => "PGL₂(ℤ)×C₂",
            OutCase::NoEigenvalueOne => "finite",
            OutCase::Involution => "virtually ℤ",
            OutCase::Shear => "virtually ℤ",
        }
    }
}

impl fmt::Display for OutCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// The classification of `Out(M_φ)` together with its certificates.
///
/// `conjugator` is `P` with `P·A·P⁻¹ = canonical` in the two parabolic
/// cases, the identity when `A = ±I` (already canonical), and absent in
/// the finite case, where no canonical form is singled out.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OutReport<T: Int> {
    pub case: OutCase,
    pub descriptor: &'static str,
    /// Canonical form of `A` in the two parabolic cases.
    pub canonical: Option<IntMatrix<T>>,
    /// The shear parameter `k ≥ 1` of the canonical form (case V only).
    pub canonical_k: Option<T>,
    /// The parity bit `k ∈ {0, 1}` of the canonical form (case IV only).
    pub parity: Option<u8>,
    /// Description of the infinite-order generator (case V only).
    pub generator: Option<&'static str>,
    pub conjugator: Option<IntMatrix<T>>,
}

impl<T: Int> fmt::Display for OutReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case {}: Out = {}", self.case.tag(), self.descriptor)?;
        if let Some(k) = &self.canonical_k {
            write!(f, ", k = {k}")?;
        }
        if let Some(p) = &self.parity {
            write!(f, ", parity = {p}")?;
        }
        if let Some(c) = &self.canonical {
            write!(f, ", canonical = {c}")?;
        }
        if let Some(p) = &self.conjugator {
            write!(f, ", conjugator = {p}")?;
        }
        Ok(())
    }
}

fn require_gl2<T: Int>(a: &IntMatrix<T>) -> Result<()> {
    if a.size() != 2 {
        return Err(Error::Dimension(format!(
            "need a 2×2 matrix, got {0}×{0}",
            a.size()
        )));
    }
    if !a.is_unimodular() {
        return Err(Error::NotUnimodular(a.to_string()));
    }
    Ok(())
}

/// Classifies `Out(M_φ)` from the abelianized monodromy `A ∈ GL₂(ℤ)`.
///
/// Decision tree: `A = I` (case I), `A = -I` (case II), no eigenvalue 1
/// (case III), then the two parabolic families split by `det A`
/// (case IV for `det = -1`, case V for `det = 1`).
pub fn classify_out<T: Int>(a: &IntMatrix<T>) -> Result<OutReport<T>> {
    require_gl2(a)?;
    let plain = |case: OutCase, conjugator: Option<IntMatrix<T>>| OutReport {
        case,
        descriptor: case.descriptor(),
        canonical: None,
        canonical_k: None,
        parity: None,
        generator: None,
        conjugator,
    };
    if a.is_identity() {
        return Ok(plain(OutCase::Identity, Some(IntMatrix::identity(2))));
    }
    if a.is_neg_identity() {
        return Ok(plain(OutCase::MinusIdentity, Some(IntMatrix::identity(2))));
    }
    if !has_eigenvalue_one(a) {
        return Ok(plain(OutCase::NoEigenvalueOne, None));
    }
    let (canonical, conjugator) = parabolic_canonical_form(a)?;
    let k = canonical.at(0, 1).clone();
    if a.det() == -T::one() {
        let parity = if k.is_one() { 1 } else { 0 };
        return Ok(OutReport {
            case: OutCase::Involution,
            descriptor: OutCase::Involution.descriptor(),
            canonical: Some(canonical),
            canonical_k: None,
            parity: Some(parity),
            generator: None,
            conjugator: Some(conjugator),
        });
    }
    if k.is_zero() {
        return Err(Error::Internal(
            "shear case with k = 0 should be the identity matrix".into(),
        ));
    }
    Ok(OutReport {
        case: OutCase::Shear,
        descriptor: OutCase::Shear.descriptor(),
        canonical: Some(canonical),
        canonical_k: Some(k),
        parity: None,
        generator: Some("Ψ: a ↦ t·a, b ↦ b, t ↦ t"),
        conjugator: Some(conjugator),
    })
}

/// Classifies `Out(M_φ)` directly from a rank-2 free-group automorphism by
/// abelianizing it first.
pub fn classify_out_map<T: Int>(phi: &FreeMap<T>) -> Result<OutReport<T>> {
    if phi.rank() != 2 {
        return Err(Error::RankNotTwo(phi.rank()));
    }
    classify_out(&phi.abelianize())
}

/// The outcome of the isomorphism decision for two rank-2 mapping tori.
///
/// When `isomorphic` holds, `conjugator` is a verified `P ∈ GL₂(ℤ)` with
/// `P·A·P⁻¹ = B` (`inverted = false`) or `P·A·P⁻¹ = B⁻¹`
/// (`inverted = true`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IsoDecision<T: Int> {
    pub isomorphic: bool,
    pub conjugator: Option<IntMatrix<T>>,
    pub inverted: bool,
}

impl<T: Int> fmt::Display for IsoDecision<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.isomorphic {
            return f.write_str("not isomorphic");
        }
        write!(f, "isomorphic")?;
        if self.inverted {
            write!(f, " (orientation reversed)")?;
        }
        if let Some(p) = &self.conjugator {
            write!(f, ", conjugator = {p}")?;
        }
        Ok(())
    }
}

/// Decides whether the rank-2 mapping tori with abelianized monodromies
/// `A` and `B` are isomorphic: exactly when `A` is conjugate in `GL₂(ℤ)`
/// to `B` or to `B⁻¹`.
pub fn iso_decide<T: Int>(a: &IntMatrix<T>, b: &IntMatrix<T>) -> Result<IsoDecision<T>> {
    if let Some(p) = gl2_conjugate(a, b)? {
        return Ok(IsoDecision {
            isomorphic: true,
            conjugator: Some(p),
            inverted: false,
        });
    }
    if let Some(p) = gl2_conjugate(a, &b.inverse()?)? {
        return Ok(IsoDecision {
            isomorphic: true,
            conjugator: Some(p),
            inverted: true,
        });
    }
    Ok(IsoDecision {
        isomorphic: false,
        conjugator: None,
        inverted: false,
    })
}

/// Two independently computed answers to "does `A` have eigenvalue 1",
/// together with the abelianization invariants of the mapping torus.
///
/// `cond_a` comes from the Smith normal form (the abelianization has free
/// rank 1); `cond_b` from the fraction-free determinant of `A - I`. The
/// two are equivalent, but deliberately computed by different routes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EvectorReport<T: Int> {
    pub cond_a: bool,
    pub cond_b: bool,
    pub invariants: AbelianInvariants<T>,
}

/// Runs both eigenvalue-1 detection routes on an n×n unimodular matrix.
pub fn evector_check<T: Int>(a: &IntMatrix<T>) -> Result<EvectorReport<T>> {
    if !a.is_unimodular() {
        return Err(Error::NotUnimodular(a.to_string()));
    }
    let cond_b = !a
        .sub(&IntMatrix::identity(a.size()))?
        .det()
        .is_zero();
    let invariants = abelian_invariants_of(a);
    let cond_a = invariants.free_rank == 1;
    Ok(EvectorReport {
        cond_a,
        cond_b,
        invariants,
    })
}
