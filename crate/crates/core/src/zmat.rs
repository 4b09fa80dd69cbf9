//! Exact integer matrix algebra for GL_n(Z).
//!
//! Provides square integer matrices with exact determinants (fraction-free
//! Gaussian elimination), Smith normal form with unimodular transform
//! tracking, the elliptic/parabolic/hyperbolic taxonomy of GL₂(ℤ), canonical
//! forms for matrices with an eigenvalue ±1, and a complete decision
//! procedure for conjugacy in GL₂(ℤ) based on binary quadratic forms (see
//! [`qform`]).
//!
//! Row convention: matrices act on row vectors from the right, and
//! "P conjugates A to B" means `P·A·P⁻¹ = B`.

pub mod qform;

use std::fmt;

use crate::error::{Error, Result};
use crate::int::{small, Int};

/// A square integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix<T: Int> {
    n: usize,
    entries: Vec<T>,
}

/// The GL₂(ℤ) taxonomy by the square of the matrix: finite order (elliptic),
/// unipotent-up-to-sign (parabolic), or exponentially growing (hyperbolic).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MatrixClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MatrixClass::Elliptic => "elliptic",
            MatrixClass::Parabolic => "parabolic",
            MatrixClass::Hyperbolic => "hyperbolic",
        };
        write!(f, "{s}")
    }
}

/// Smith normal form `U·M·V = diag(d)` with unimodular `U`, `V`, the
/// diagonal nonnegative, each `dᵢ` dividing `dᵢ₊₁`, and zeros last.
#[derive(Clone, Debug)]
pub struct SmithForm<T: Int> {
    pub diag: Vec<T>,
    pub u: IntMatrix<T>,
    pub v: IntMatrix<T>,
}

impl<T: Int> IntMatrix<T> {
    /// Builds an `n×n` matrix from `n²` row-major entries.
    pub fn new(n: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension(format!(
                "expected {}x{} = {} entries, got {}",
                n,
                n,
                n * n,
                entries.len()
            )));
        }
        Ok(IntMatrix { n, entries })
    }

    /// Builds a matrix from rows.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        for r in &rows {
            if r.len() != n {
                return Err(Error::Dimension(format!(
                    "row of length {} in a {}-row matrix",
                    r.len(),
                    n
                )));
            }
        }
        Ok(IntMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor for 2×2 matrices from machine integers.
    pub fn from_i64_2x2(m: [[i64; 2]; 2]) -> Self {
        IntMatrix {
            n: 2,
            entries: vec![
                crate::int::from_i64(m[0][0]),
                crate::int::from_i64(m[0][1]),
                crate::int::from_i64(m[1][0]),
                crate::int::from_i64(m[1][1]),
            ],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![T::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = T::one();
        }
        IntMatrix { n, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: T) {
        self.entries[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j).clone()).collect())
            .collect()
    }

    fn check_same_size(&self, other: &Self) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "size {} vs size {}",
                self.n, other.n
            )))
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_size(other)?;
        let n = self.n;
        let mut entries = vec![T::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = self.at(i, k);
                if aik.is_zero() {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] =
                        entries[i * n + j].clone() + aik.clone() * other.at(k, j).clone();
                }
            }
        }
        Ok(IntMatrix { n, entries })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_size(other)?;
        let entries = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(IntMatrix {
            n: self.n,
            entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_size(other)?;
        let entries = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Ok(IntMatrix {
            n: self.n,
            entries,
        })
    }

    pub fn neg(&self) -> Self {
        IntMatrix {
            n: self.n,
            entries: self.entries.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn is_neg_identity(&self) -> bool {
        *self == Self::identity(self.n).neg()
    }

    pub fn is_scalar(&self) -> bool {
        let d = self.at(0, 0);
        for i in 0..self.n {
            for j in 0..self.n {
                let expect = if i == j { d.clone() } else { T::zero() };
                if *self.at(i, j) != expect {
                    return false;
                }
            }
        }
        true
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self.at(i, i).clone())
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> T {
        let n = self.n;
        if n == 0 {
            return T::one();
        }
        if n == 1 {
            return self.at(0, 0).clone();
        }
        if n == 2 {
            return self.at(0, 0).clone() * self.at(1, 1).clone()
                - self.at(0, 1).clone() * self.at(1, 0).clone();
        }
        let mut m = self.rows();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        sign = -sign;
                    }
                    None => return T::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[i][j].clone() * m[k][k].clone()
                        - m[i][k].clone() * m[k][j].clone();
                    // Bareiss: this division is exact.
                    m[i][j] = num / prev.clone();
                }
                m[i][k] = T::zero();
            }
            prev = m[k][k].clone();
        }
        sign * m[n - 1][n - 1].clone()
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    fn require_unimodular(&self) -> Result<()> {
        let d = self.det();
        if d.abs().is_one() {
            Ok(())
        } else {
            Err(Error::NotUnimodular(d.to_string()))
        }
    }

    fn require_2x2(&self) -> Result<()> {
        if self.n == 2 {
            Ok(())
        } else {
            Err(Error::Dimension(format!("expected 2x2, got {}x{}", self.n, self.n)))
        }
    }

    /// Inverse of a unimodular matrix, via the Smith transforms:
    /// `U·M·V = I ⇒ M⁻¹ = V·U`.
    pub fn inverse(&self) -> Result<Self> {
        self.require_unimodular()?;
        let snf = self.smith_normal_form();
        if snf.diag.iter().any(|d| !d.is_one()) {
            return Err(Error::Internal(
                "smith form of a unimodular matrix must be the identity".into(),
            ));
        }
        snf.v.mul(&snf.u)
    }

    /// Small nonnegative matrix power.
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity(self.n);
        for _ in 0..e {
            acc = acc.mul(self).expect("same size");
        }
        acc
    }

    /// Smith normal form with transform tracking.
    ///
    /// Returns `U`, `V` unimodular and the diagonal `d` with `U·M·V =
    /// diag(d)`, `dᵢ ≥ 0`, `dᵢ | dᵢ₊₁`, zeros trailing.
    pub fn smith_normal_form(&self) -> SmithForm<T> {
        let n = self.n;
        let mut a = self.clone();
        let mut u = Self::identity(n);
        let mut v = Self::identity(n);

        // Row operation on `a` mirrored into `u`; column ops mirrored into `v`.
        fn row_swap<T: Int>(a: &mut IntMatrix<T>, u: &mut IntMatrix<T>, r: usize, s: usize) {
            let n = a.n;
            for j in 0..n {
                a.entries.swap(r * n + j, s * n + j);
                u.entries.swap(r * n + j, s * n + j);
            }
        }
        fn col_swap<T: Int>(a: &mut IntMatrix<T>, v: &mut IntMatrix<T>, c: usize, d: usize) {
            let n = a.n;
            for i in 0..n {
                a.entries.swap(i * n + c, i * n + d);
                v.entries.swap(i * n + c, i * n + d);
            }
        }
        fn row_addmul<T: Int>(
            a: &mut IntMatrix<T>,
            u: &mut IntMatrix<T>,
            dst: usize,
            src: usize,
            factor: &T,
        ) {
            let n = a.n;
            for j in 0..n {
                let av = a.at(src, j).clone() * factor.clone();
                a.set(dst, j, a.at(dst, j).clone() + av);
                let uv = u.at(src, j).clone() * factor.clone();
                u.set(dst, j, u.at(dst, j).clone() + uv);
            }
        }
        fn col_addmul<T: Int>(
            a: &mut IntMatrix<T>,
            v: &mut IntMatrix<T>,
            dst: usize,
            src: usize,
            factor: &T,
        ) {
            let n = a.n;
            for i in 0..n {
                let av = a.at(i, src).clone() * factor.clone();
                a.set(i, dst, a.at(i, dst).clone() + av);
                let vv = v.at(i, src).clone() * factor.clone();
                v.set(i, dst, v.at(i, dst).clone() + vv);
            }
        }

        for t in 0..n {
            'pivot: loop {
                // Pick the smallest nonzero entry of the trailing block.
                let mut best: Option<(usize, usize)> = None;
                for i in t..n {
                    for j in t..n {
                        if a.at(i, j).is_zero() {
                            continue;
                        }
                        best = match best {
                            Some((bi, bj)) if a.at(bi, bj).abs() <= a.at(i, j).abs() => best,
                            _ => Some((i, j)),
                        };
                    }
                }
                let (pi, pj) = match best {
                    Some(p) => p,
                    None => break 'pivot, // trailing block all zero
                };
                if pi != t {
                    row_swap(&mut a, &mut u, pi, t);
                }
                if pj != t {
                    col_swap(&mut a, &mut v, pj, t);
                }
                // Clear the pivot column and row by Euclid steps.
                let mut dirty = false;
                for i in t + 1..n {
                    if a.at(i, t).is_zero() {
                        continue;
                    }
                    let q = a.at(i, t).clone() / a.at(t, t).clone();
                    if !q.is_zero() {
                        row_addmul(&mut a, &mut u, i, t, &-q);
                    }
                    if !a.at(i, t).is_zero() {
                        dirty = true;
                    }
                }
                for j in t + 1..n {
                    if a.at(t, j).is_zero() {
                        continue;
                    }
                    let q = a.at(t, j).clone() / a.at(t, t).clone();
                    if !q.is_zero() {
                        col_addmul(&mut a, &mut v, j, t, &-q);
                    }
                    if !a.at(t, j).is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    continue 'pivot; // smaller remainders appeared; re-pivot
                }
                // Divisibility fix-up: the pivot must divide the rest.
                let pivot = a.at(t, t).clone();
                let offender = (t + 1..n)
                    .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !(a.at(i, j).clone() % pivot.clone()).is_zero());
                match offender {
                    Some((i, _)) => {
                        row_addmul(&mut a, &mut u, t, i, &T::one());
                        continue 'pivot;
                    }
                    None => break 'pivot,
                }
            }
            // Normalise the pivot sign.
            if a.at(t, t).is_negative() {
                let m1 = -T::one();
                let n_ = a.n;
                for j in 0..n_ {
                    a.set(t, j, a.at(t, j).clone() * m1.clone());
                    u.set(t, j, u.at(t, j).clone() * m1.clone());
                }
            }
        }

        let diag = (0..n).map(|i| a.at(i, i).clone()).collect();
        debug_assert_eq!(
            u.mul(self).unwrap().mul(&v).unwrap(),
            a,
            "transform bookkeeping must recompose"
        );
        SmithForm { diag, u, v }
    }

    /// Integer kernel basis (right kernel: `M·x = 0`), read off the Smith
    /// form: the columns of `V` at the zero diagonal positions.
    pub fn kernel_basis(&self) -> Vec<Vec<T>> {
        let snf = self.smith_normal_form();
        let n = self.n;
        (0..n)
            .filter(|&i| snf.diag[i].is_zero())
            .map(|i| (0..n).map(|r| snf.v.at(r, i).clone()).collect())
            .collect()
    }
}

impl<T: Int> fmt::Display for IntMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Classifies a unimodular 2×2 matrix as elliptic, parabolic, or hyperbolic.
///
/// Decision: elliptic if `A² = ±I` or `|tr(A²)| < 2`; hyperbolic if
/// `|tr(A²)| > 2`; parabolic otherwise. Squaring first removes the sign
/// ambiguity of `-I`-multiples (finite-order matrices with `A² = -I` are
/// elliptic).
pub fn classify_type<T: Int>(a: &IntMatrix<T>) -> Result<MatrixClass> {
    a.require_2x2()?;
    a.require_unimodular()?;
    let a2 = a.pow(2);
    if a2.is_identity() || a2.is_neg_identity() {
        return Ok(MatrixClass::Elliptic);
    }
    let t = a2.trace().abs();
    let two = small::<T>(2);
    Ok(if t < two {
        MatrixClass::Elliptic
    } else if t > two {
        MatrixClass::Hyperbolic
    } else {
        MatrixClass::Parabolic
    })
}

/// True when `det(A - I) = 0`, i.e. `A` has eigenvalue 1.
pub fn has_eigenvalue_one<T: Int>(a: &IntMatrix<T>) -> bool {
    a.sub(&IntMatrix::identity(a.size())).expect("same size").det().is_zero()
}

/// Extended gcd returning `(g, s, t)` with `s·x + t·y = g ≥ 0`.
fn egcd<T: Int>(x: &T, y: &T) -> (T, T, T) {
    let e = x.extended_gcd(y);
    (e.gcd, e.x, e.y)
}

/// Canonical form for 2×2 unimodular matrices with an eigenvalue ±1.
///
/// Returns `(C, P)` with `P·A·P⁻¹ = C` and `C` one of
/// `(1 k; 0 1)` with `k ≥ 0`, `(-1 k; 0 -1)` with `k ≥ 0`, or
/// `(1 k; 0 -1)` with `k ∈ {0, 1}`.
///
/// The bottom row of `P` is a primitive left eigenvector; the reflection
/// `diag(1, -1)` kills the sign of `k` in the `det = 1` families, and the
/// shear `(1 s; 0 1)` reduces `k` mod 2 in the `det = -1` family.
pub fn parabolic_canonical_form<T: Int>(
    a: &IntMatrix<T>,
) -> Result<(IntMatrix<T>, IntMatrix<T>)> {
    a.require_2x2()?;
    a.require_unimodular()?;
    let det = a.det();
    let tr = a.trace();
    let two = small::<T>(2);
    // Bottom eigenvalue of the target triangular form.
    let mu = if det.is_one() && tr == two {
        T::one()
    } else if det.is_one() && tr == -two.clone() {
        -T::one()
    } else if det == -T::one() && tr.is_zero() {
        -T::one()
    } else {
        return Err(Error::MonodromyShape(format!(
            "matrix {} has no eigenvalue ±1 of parabolic/involution type",
            a
        )));
    };

    // Primitive left eigenvector v with v·A = mu·v, i.e. v·(A - mu·I) = 0.
    // The columns of (A - mu·I) give v = (m21, mu - m11) or (m22 - mu, -m12).
    let m11 = a.at(0, 0).clone();
    let m12 = a.at(0, 1).clone();
    let m21 = a.at(1, 0).clone();
    let m22 = a.at(1, 1).clone();
    let cand1 = (m21.clone(), mu.clone() - m11.clone());
    let cand2 = (m22.clone() - mu.clone(), -m12.clone());
    let (mut v1, mut v2) = if !cand1.0.is_zero() || !cand1.1.is_zero() {
        cand1
    } else if !cand2.0.is_zero() || !cand2.1.is_zero() {
        cand2
    } else {
        // A = mu·I: every vector works.
        (T::zero(), T::one())
    };
    let g = v1.gcd(&v2);
    if !g.is_zero() && !g.is_one() {
        v1 = v1 / g.clone();
        v2 = v2 / g;
    }
    // Normalize the sign so canonical inputs get the identity conjugator.
    if v1.is_negative() || (v1.is_zero() && v2.is_negative()) {
        v1 = -v1;
        v2 = -v2;
    }
    // Complete to a unimodular P with bottom row (v1, v2): from
    // s·v1 + t·v2 = 1 the top row (t, -s) gives det P = t·v2 + s·v1 = 1.
    let (g, s, t) = egcd(&v1, &v2);
    if !g.is_one() {
        return Err(Error::Internal("eigenvector must be primitive".into()));
    }
    let mut p = IntMatrix::new(2, vec![t, -s, v1, v2])?;
    let mut c = p.mul(a)?.mul(&p.inverse()?)?;
    debug_assert!(c.at(1, 0).is_zero());
    debug_assert_eq!(*c.at(1, 1), mu);

    let k = c.at(0, 1).clone();
    if det.is_one() {
        if k.is_negative() {
            // Conjugate by J = diag(1, -1): flips the sign of k.
            let j = IntMatrix::new(2, vec![T::one(), T::zero(), T::zero(), -T::one()])?;
            p = j.mul(&p)?;
            c = p.mul(a)?.mul(&p.inverse()?)?;
        }
    } else {
        // Involution family (1 k; 0 -1): shear k down to its parity.
        let parity = k.mod_floor(&two);
        let shift = (k - parity) / two;
        if !shift.is_zero() {
            let t_s = IntMatrix::new(2, vec![T::one(), shift, T::zero(), T::one()])?;
            p = t_s.mul(&p)?;
            c = p.mul(a)?.mul(&p.inverse()?)?;
        }
    }
    debug_assert_eq!(p.mul(a).unwrap().mul(&p.inverse().unwrap()).unwrap(), c);
    Ok((c, p))
}

/// Decides conjugacy of `A`, `B` in GL₂(ℤ), returning a unimodular witness
/// `P` with `P·A·P⁻¹ = B` when one exists.
///
/// Method: the integer solutions of `X·A = B·X` form a rank-2 lattice
/// (non-scalar case) with basis `X₁`, `X₂` computed from the kernel of a 4×4
/// system; `q(x, y) = det(x·X₁ + y·X₂)` is a binary quadratic form, and the
/// conjugators are exactly the lattice points where `q = ±1`, found by
/// [`qform::represent_unit`].
pub fn gl2_conjugate<T: Int>(
    a: &IntMatrix<T>,
    b: &IntMatrix<T>,
) -> Result<Option<IntMatrix<T>>> {
    a.require_2x2()?;
    b.require_2x2()?;
    a.require_unimodular()?;
    b.require_unimodular()?;
    if a == b {
        return Ok(Some(IntMatrix::identity(2)));
    }
    // Scalar matrices are conjugate only to themselves.
    if a.is_scalar() || b.is_scalar() {
        return Ok(None);
    }
    if a.trace() != b.trace() || a.det() != b.det() {
        return Ok(None);
    }
    // L·vec(X) = 0 encodes X·A - B·X = 0, X row-major.
    let mut l = IntMatrix::new(4, vec![T::zero(); 16])?;
    for i in 0..2 {
        for j in 0..2 {
            let row = 2 * i + j;
            for k in 0..2 {
                let cur = l.at(row, 2 * i + k).clone();
                l.set(row, 2 * i + k, cur + a.at(k, j).clone());
                let cur = l.at(row, 2 * k + j).clone();
                l.set(row, 2 * k + j, cur - b.at(i, k).clone());
            }
        }
    }
    let kernel = l.kernel_basis();
    if kernel.is_empty() {
        return Ok(None);
    }
    if kernel.len() != 2 {
        return Err(Error::Internal(format!(
            "conjugation lattice of non-scalar matrices has rank {}, expected 2",
            kernel.len()
        )));
    }
    let x1 = IntMatrix::new(2, kernel[0].clone())?;
    let x2 = IntMatrix::new(2, kernel[1].clone())?;
    let qa = x1.det();
    let qc = x2.det();
    let qb = x1.add(&x2)?.det() - qa.clone() - qc.clone();
    let (x, y) = match qform::represent_unit(&qa, &qb, &qc) {
        Some(pt) => pt,
        None => return Ok(None),
    };
    let p = IntMatrix::new(
        2,
        (0..4)
            .map(|i| x.clone() * x1.entries[i].clone() + y.clone() * x2.entries[i].clone())
            .collect(),
    )?;
    // The representation theorem guarantees this, but verify exactly.
    if !p.is_unimodular() {
        return Err(Error::Internal("conjugator witness must be unimodular".into()));
    }
    if p.mul(a)? != b.mul(&p)? {
        return Err(Error::Internal("conjugator witness must intertwine".into()));
    }
    Ok(Some(p))
}
