//! Unit representation by binary quadratic forms.
//!
//! [`represent_unit`] decides whether `q(x, y) = a·x² + b·x·y + c·y²` takes
//! the value `+1` or `-1` at an integer point, and if so returns such a
//! point. All four discriminant regimes are handled exactly:
//!
//! * `D < 0` — definite: Gauss reduction; a reduced positive form has
//!   minimum equal to its leading coefficient.
//! * `D = 0` — the form is a rational square of a linear form; reduces to a
//!   linear Diophantine equation.
//! * `D > 0` square — the form splits into two integer linear factors (after
//!   scaling by `4a`); reduces to divisor enumeration.
//! * `D > 0` non-square — indefinite: reduction to the cycle of reduced
//!   forms; the cycle contains a form with leading coefficient `±1` exactly
//!   when the unit is represented.
//!
//! Every path tracks the substitution matrix so the returned point is exact,
//! and the result is re-verified before being returned.



use super::IntMatrix;
use crate::int::{small, Int};

/// Evaluates `a·x² + b·x·y + c·y²`.
fn eval<T: Int>(a: &T, b: &T, c: &T, x: &T, y: &T) -> T {
    a.clone() * x.clone() * x.clone()
        + b.clone() * x.clone() * y.clone()
        + c.clone() * y.clone() * y.clone()
}

/// True when `d ≥ 0` is a perfect square.
fn is_square<T: Int>(d: &T) -> bool {
    if d.is_negative() {
        return false;
    }
    let s = d.sqrt();
    s.clone() * s == *d
}

/// First column of the accumulated substitution: the witness point.
fn first_column<T: Int>(n: &IntMatrix<T>) -> (T, T) {
    (n.at(0, 0).clone(), n.at(1, 0).clone())
}

/// Finds `(x, y)` with `a·x² + b·x·y + c·y² = ±1`, if any exists.
pub fn represent_unit<T: Int>(a: &T, b: &T, c: &T) -> Option<(T, T)> {
    if a.is_zero() && b.is_zero() && c.is_zero() {
        return None;
    }
    // Every value is divisible by the content.
    let content = a.gcd(b).gcd(c);
    if !content.is_one() {
        return None;
    }
    let four = small::<T>(4);
    let d = b.clone() * b.clone() - four.clone() * a.clone() * c.clone();

    let found = if d.is_negative() {
        definite(a, b, c)
    } else if d.is_zero() {
        degenerate(a, b, c)
    } else if is_square(&d) {
        split(a, b, c, &d.sqrt())
    } else {
        indefinite(a, b, c, &d)
    };
    let (x, y) = found?;
    debug_assert!(eval(a, b, c, &x, &y).abs().is_one());
    Some((x, y))
}

/// `D < 0`: Gauss-reduce; the minimum of a reduced positive form is `a`.
fn definite<T: Int>(a: &T, b: &T, c: &T) -> Option<(T, T)> {
    // A negative-definite form represents -1 iff its negation represents 1.
    let negate = a.is_negative();
    let (mut fa, mut fb, mut fc) = if negate {
        (-a.clone(), -b.clone(), -c.clone())
    } else {
        (a.clone(), b.clone(), c.clone())
    };
    let mut n = IntMatrix::<T>::identity(2);
    let two = small::<T>(2);
    loop {
        // Translate: bring b into (-a, a] via x ← x + m·y.
        let twoa = two.clone() * fa.clone();
        let r = fb.mod_floor(&twoa);
        let nb = if r > fa { r - twoa.clone() } else { r };
        if nb != fb {
            let m = (nb.clone() - fb.clone()) / twoa;
            fc = fa.clone() * m.clone() * m.clone() + fb.clone() * m.clone() + fc;
            fb = nb;
            let t = IntMatrix::new(2, vec![T::one(), m, T::zero(), T::one()]).unwrap();
            n = n.mul(&t).unwrap();
        }
        if fa <= fc {
            break;
        }
        // Swap outer coefficients via (x, y) ← (-y, x).
        std::mem::swap(&mut fa, &mut fc);
        fb = -fb;
        let s = IntMatrix::new(2, vec![T::zero(), -T::one(), T::one(), T::zero()]).unwrap();
        n = n.mul(&s).unwrap();
    }
    if fa.is_one() {
        Some(first_column(&n))
    } else {
        None
    }
}

/// `D = 0`: `a·q` is the square of a linear form (or `q = c·y²` outright).
fn degenerate<T: Int>(a: &T, b: &T, c: &T) -> Option<(T, T)> {
    if a.is_zero() {
        // D = b² forces b = 0 here, so q = c·y².
        debug_assert!(b.is_zero());
        return if c.abs().is_one() {
            Some((T::zero(), T::one()))
        } else {
            None
        };
    }
    // b² = 4ac makes b even, and a·q = (a·x + (b/2)·y)².
    let two = small::<T>(2);
    let half_b = b.clone() / two;
    let target = a.abs(); // q = ±1 needs (a·x + half_b·y)² = |a|
    if !is_square(&target) {
        return None;
    }
    let s = target.sqrt();
    // Solve a·x + half_b·y = s.
    let e = a.extended_gcd(&half_b);
    if !(s.clone() % e.gcd.clone()).is_zero() {
        return None;
    }
    let scale = s / e.gcd;
    Some((e.x * scale.clone(), e.y * scale))
}

/// `D = s² > 0`: `4a·q` splits into integer linear factors; enumerate
/// divisor pairs.
fn split<T: Int>(a: &T, b: &T, c: &T, s: &T) -> Option<(T, T)> {
    let two = small::<T>(2);
    if a.is_zero() {
        // q = y·(b·x + c·y) with b ≠ 0; take y = ±1.
        for y in [T::one(), -T::one()] {
            for target in [T::one(), -T::one()] {
                // y·(b·x + c·y) = target  ⇔  b·x = target/y - c·y
                let rhs = target.clone() * y.clone() - c.clone() * y.clone() * y.clone();
                if (rhs.clone() % b.clone()).is_zero() {
                    return Some((rhs / b.clone(), y));
                }
            }
        }
        return None;
    }
    // 4a·q = (2a·x + (b-s)·y)(2a·x + (b+s)·y) = u·v with v - u = 2s·y.
    let four_a = small::<T>(4) * a.clone();
    let two_s = two.clone() * s.clone();
    let two_a = two * a.clone();
    let bound = four_a.abs();
    let mut u0 = T::one();
    while u0.clone() * u0.clone() <= bound {
        if (bound.clone() % u0.clone()).is_zero() {
            let pair = bound.clone() / u0.clone();
            for base in [u0.clone(), pair] {
                for u in [base.clone(), -base.clone()] {
                    for target in [T::one(), -T::one()] {
                        let rhs = four_a.clone() * target.clone();
                        if (rhs.clone() % u.clone()).is_zero() {
                            let v = rhs / u.clone();
                            let ydiff = v - u.clone();
                            if !(ydiff.clone() % two_s.clone()).is_zero() {
                                continue;
                            }
                            let y = ydiff / two_s.clone();
                            let xnum =
                                u.clone() - (b.clone() - s.clone()) * y.clone();
                            if !(xnum.clone() % two_a.clone()).is_zero() {
                                continue;
                            }
                            let x = xnum / two_a.clone();
                            if eval(a, b, c, &x, &y) == target {
                                return Some((x, y));
                            }
                        }
                    }
                }
            }
        }
        u0 = u0 + T::one();
    }
    None
}

/// Integer-exact test for "reduced" in the indefinite case:
/// `0 < b < √D` and `|√D - 2|a|| < b`.
fn is_reduced<T: Int>(a: &T, b: &T, d: &T, s: &T) -> bool {
    if !b.is_positive() || b > s {
        return false;
    }
    let two_abs_a = small::<T>(2) * a.abs();
    let hi = b.clone() + two_abs_a.clone();
    if *d >= hi.clone() * hi {
        return false;
    }
    let lo = two_abs_a - b.clone();
    lo.is_negative() || lo.clone() * lo < *d
}

/// One step of the reduction operator `ρ`: substitute
/// `(x, y) ← (-Y, X + m·Y)` so `(a, b, c) → (c, 2cm - b, cm² - bm + a)`,
/// with `m` chosen to put the new middle coefficient in the standard window.
fn rho<T: Int>(
    fa: &mut T,
    fb: &mut T,
    fc: &mut T,
    n: &mut IntMatrix<T>,
    s: &T,
) {
    let two = small::<T>(2);
    let abs_c = fc.abs();
    let two_abs_c = two.clone() * abs_c.clone();
    // Window upper end: |c| when |c| > √D, otherwise ⌊√D⌋.
    let w_hi = if abs_c > *s { abs_c } else { s.clone() };
    let nb = w_hi.clone() - (w_hi + fb.clone()).mod_floor(&two_abs_c);
    let m = (nb.clone() + fb.clone()) / (two * fc.clone());
    let na = fc.clone();
    let nc = fc.clone() * m.clone() * m.clone() - fb.clone() * m.clone() + fa.clone();
    *fa = na;
    *fb = nb;
    *fc = nc;
    let t = IntMatrix::new(2, vec![T::zero(), -T::one(), T::one(), m]).unwrap();
    *n = n.mul(&t).unwrap();
}

/// `D > 0` non-square: walk to a reduced form, then around its cycle. The
/// cycle contains every reduced form in the proper equivalence class, and a
/// form represents a unit iff some properly equivalent form has that unit as
/// leading coefficient.
fn indefinite<T: Int>(a: &T, b: &T, c: &T, d: &T) -> Option<(T, T)> {
    let s = d.sqrt();
    let (mut fa, mut fb, mut fc) = (a.clone(), b.clone(), c.clone());
    let mut n = IntMatrix::<T>::identity(2);
    // Reduction phase terminates in O(log max(|a|,|c|)) steps.
    let mut guard = 0usize;
    while !is_reduced(&fa, &fb, d, &s) {
        rho(&mut fa, &mut fb, &mut fc, &mut n, &s);
        guard += 1;
        assert!(guard < 10_000, "indefinite reduction failed to terminate");
    }
    let start = (fa.clone(), fb.clone(), fc.clone());
    loop {
        if fa.abs().is_one() {
            return Some(first_column(&n));
        }
        rho(&mut fa, &mut fb, &mut fc, &mut n, &s);
        debug_assert!(is_reduced(&fa, &fb, d, &s));
        if (fa.clone(), fb.clone(), fc.clone()) == start {
            return None;
        }
        guard += 1;
        assert!(guard < 1_000_000, "reduced cycle failed to close");
    }
}
