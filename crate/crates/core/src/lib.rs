//! Exact computation in free-by-cyclic groups `M_φ = F_n ⋊_φ ℤ`.
//!
//! The group `M_φ` is presented by `⟨x₁, …, x_n, t | t⁻¹·x_i·t = x_i·φ⟩`
//! for an automorphism `φ` of the free group `F_n`; every element has a
//! unique normal form `t^k·w`. This crate provides:
//!
//! - [`words`]: reduced words in free groups with run-length syllables,
//!   exact powers, and conjugacy with witnesses;
//! - [`fnauto`]: free-group endomorphisms and automorphisms, including
//!   rank-2 inversion, automorphism and inner-ness tests, and conjugator
//!   extraction;
//! - [`zmat`]: exact integer matrices — determinants, Smith normal form,
//!   `GL₂(ℤ)` conjugacy with certificates, and parabolic canonical forms;
//! - [`torus`]: normal-form arithmetic in `M_φ`, verified homomorphisms
//!   and isomorphisms between tori, restriction analysis, centers, and
//!   abelianization invariants;
//! - [`outclass`]: the five-case classification of `Out(M_φ)` in rank 2
//!   and the isomorphism decision between rank-2 tori;
//! - [`parabolic`]: fixed-subgroup machinery and outer normal forms for
//!   shear monodromies `a ↦ a·b^k, b ↦ b`;
//! - [`parse`]: text grammars that round-trip every `Display` impl.
//!
//! All algebra is generic over the [`int::Int`] scalar trait; the aliases
//! at the crate root fix the scalar to [`num_bigint::BigInt`] so nothing
//! overflows.

pub mod error;
pub mod fnauto;
pub mod int;
pub mod outclass;
pub mod parabolic;
pub mod parse;
pub mod torus;
pub mod words;
pub mod zmat;

pub use error::{Error, Result};
pub use int::Int;

/// Default arbitrary-precision scalar.
pub type Scalar = num_bigint::BigInt;

pub type Syllable = words::Syllable<Scalar>;
pub type Word = words::Word<Scalar>;
pub type FreeMap = fnauto::FreeMap<Scalar>;
pub type InnerWitness = fnauto::InnerWitness<Scalar>;
pub type IntMatrix = zmat::IntMatrix<Scalar>;
pub type SmithForm = zmat::SmithForm<Scalar>;
pub use zmat::MatrixClass;
pub type Torus = torus::Torus<Scalar>;
pub type TorusElement = torus::TorusElement<Scalar>;
pub type TorusFactor = torus::TorusFactor<Scalar>;
pub type TorusMap = torus::TorusMap<Scalar>;
pub type RestrictionAnalysis = torus::RestrictionAnalysis<Scalar>;
pub type AbelianInvariants = torus::AbelianInvariants<Scalar>;
pub use outclass::OutCase;
pub type OutReport = outclass::OutReport<Scalar>;
pub type IsoDecision = outclass::IsoDecision<Scalar>;
pub type EvectorReport = outclass::EvectorReport<Scalar>;
pub type Piece = parabolic::Piece<Scalar>;
pub type PieceSplit = parabolic::PieceSplit<Scalar>;
pub type ParabolicNormalForm = parabolic::ParabolicNormalForm<Scalar>;
