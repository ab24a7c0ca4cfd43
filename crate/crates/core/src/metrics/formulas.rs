//! Closed-form EQOS, active ratio and QER, evaluated exactly as printed.
//!
//! Each function builds an integer numerator and denominator and hands them
//! to the scalar type, so `Rational` results are exact.

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

fn r<T: Scalar>(numer: i128, denom: i128) -> T {
    T::from_ratio(numer, denom)
}

/// The three triangle/ellipse sums shared by every AS-Grid formula:
/// `Σ_{j=3}^{t} Σ_{i=0}^{j−3} (t−i) + Σ_{j=2}^{t} Σ_{i=0}^{t−j} (t−i) + Σ_{i=0}^{t−2} (t−i)`.
fn as_grid_off_diagonal(t: i128) -> i128 {
    let small: i128 = (3..=t)
        .map(|j| (0..=j - 3).map(|i| t - i).sum::<i128>())
        .sum();
    let big: i128 = (2..=t)
        .map(|j| (0..=t - j).map(|i| t - i).sum::<i128>())
        .sum();
    let horizontal: i128 = (0..=t - 2).map(|i| t - i).sum();
    small + big + horizontal
}

fn shape(t: usize, w: usize) -> Result<(i128, i128)> {
    if t < 2 || w < 2 {
        return Err(invalid(format!(
            "closed forms need t ≥ 2 and w ≥ 2, got {t}×{w}"
        )));
    }
    Ok((t as i128, w as i128))
}

/// AS-Grid(t×w) EQOS, ordered pairs at zero offset.
pub fn as_grid_eqos<T: Scalar>(t: usize, w: usize) -> Result<T> {
    let (t, w) = shape(t, w)?;
    Ok(r(t * (t + w - 1) + as_grid_off_diagonal(t), t * t))
}

/// AS-Grid(t×w) active ratio `(t + w − 1) / (t·w)`.
pub fn as_grid_active_ratio<T: Scalar>(t: usize, w: usize) -> Result<T> {
    let (t, w) = shape(t, w)?;
    Ok(r(t + w - 1, t * w))
}

/// The `t = w/2` specialisation of the AS-Grid active ratio, `(3w − 2) / w²`.
pub fn as_grid_active_ratio_half_width<T: Scalar>(w: usize) -> Result<T> {
    if w < 4 || !w.is_multiple_of(2) {
        return Err(invalid(format!("t = w/2 needs an even w ≥ 4, got {w}")));
    }
    let w = w as i128;
    Ok(r(3 * w - 2, w * w))
}

/// AS-Grid(t×w) QER in its printed form `w[(t² + tw − t) + S] / (t² + tw − t)`.
pub fn as_grid_qer<T: Scalar>(t: usize, w: usize) -> Result<T> {
    let (t, w) = shape(t, w)?;
    let base = t * t + t * w - t;
    Ok(r(w * (base + as_grid_off_diagonal(t)), base))
}

/// AS-Grid(√n×√n) EQOS.
pub fn as_grid_square_eqos<T: Scalar>(n: usize) -> Result<T> {
    let m = square_side(n)?;
    let m = m as i128;
    Ok(r(m * (2 * m - 1) + as_grid_off_diagonal(m), m * m))
}

/// AS-Grid(√n×√n) active ratio `(2√n − 1) / n`, the same as the grid's.
pub fn as_grid_square_active_ratio<T: Scalar>(n: usize) -> Result<T> {
    grid_active_ratio(n)
}

fn lps_validity(t: usize) -> Result<()> {
    if t == 3 || t == 4 {
        Ok(())
    } else {
        Err(Error::OutOfValidity(format!(
            "the LPS-Grid EQOS closed form holds only for t = 3 or t = 4, got t = {t}"
        )))
    }
}

/// LPS-Grid EQOS as the unsimplified sum of ellipses and squares.
pub fn lps_grid_eqos_summed<T: Scalar>(t: usize, w: usize) -> Result<T> {
    lps_validity(t)?;
    let (t, w) = shape(t, w)?;
    let f = t / 2;
    let vertical: i128 = (1..=t).map(|_| w + f).sum();
    let big: i128 = 2 * (1..t).map(|_| f).sum::<i128>();
    let small: i128 = 2 * (1..t - 1).map(|_| f).sum::<i128>();
    let squares: i128 = 2 * (1..t - 2).map(|_| f).sum::<i128>();
    Ok(r(vertical + big + small + squares, t * t))
}

/// LPS-Grid EQOS `(tw + 7t⌊t/2⌋ − 12⌊t/2⌋) / t²`.
pub fn lps_grid_eqos<T: Scalar>(t: usize, w: usize) -> Result<T> {
    lps_validity(t)?;
    let (t, w) = shape(t, w)?;
    let f = t / 2;
    Ok(r(t * w + 7 * t * f - 12 * f, t * t))
}

/// LPS-Grid active ratio `(w + ⌊t/2⌋) / (t·w)`; valid for every shape.
pub fn lps_grid_active_ratio<T: Scalar>(t: usize, w: usize) -> Result<T> {
    let (t, w) = shape(t, w)?;
    Ok(r(w + t / 2, t * w))
}

/// LPS-Grid QER `w(tw + 7t⌊t/2⌋ − 12⌊t/2⌋) / (t(w + ⌊t/2⌋))`.
pub fn lps_grid_qer<T: Scalar>(t: usize, w: usize) -> Result<T> {
    lps_validity(t)?;
    let (t, w) = shape(t, w)?;
    let f = t / 2;
    Ok(r(w * (t * w + 7 * t * f - 12 * f), t * (w + f)))
}

fn square_side(n: usize) -> Result<usize> {
    let m = n.isqrt();
    if m < 2 || m * m != n {
        return Err(invalid(format!("expected a perfect square n ≥ 4, got {n}")));
    }
    Ok(m)
}

/// Grid EQOS `(2√n − 1)² / n`.
pub fn grid_eqos<T: Scalar>(n: usize) -> Result<T> {
    let m = square_side(n)? as i128;
    Ok(r((2 * m - 1) * (2 * m - 1), m * m))
}

/// Grid active ratio `(2√n − 1) / n`.
pub fn grid_active_ratio<T: Scalar>(n: usize) -> Result<T> {
    let m = square_side(n)? as i128;
    Ok(r(2 * m - 1, m * m))
}

/// Grid QER `2√n − 1`.
pub fn grid_qer<T: Scalar>(n: usize) -> Result<T> {
    let m = square_side(n)? as i128;
    Ok(r(2 * m - 1, 1))
}

fn torus_validity(t: usize, w: usize) -> Result<(i128, i128)> {
    if t < 2 || w != 2 * t {
        return Err(Error::OutOfValidity(format!(
            "the torus closed forms need t = w/2, got {t}×{w}"
        )));
    }
    Ok((t as i128, w as i128))
}

/// Torus EQOS via the printed expression
/// `[(t + ⌊w/2⌋/t) + 2(⌊w/2⌋ − 1)(1 + ⌊w/2⌋/(2t)) + 2] / w`, which equals 2
/// when `t = w/2`.
pub fn torus_eqos<T: Scalar>(t: usize, w: usize) -> Result<T> {
    let (t, w) = torus_validity(t, w)?;
    let h = w / 2;
    // common denominator 2t·w
    let numer = 2 * t * t + 2 * h + 2 * (h - 1) * (2 * t + h) + 4 * t;
    Ok(r(numer, 2 * t * w))
}

/// Torus active ratio `√(2tw) / (tw)`, which is `1/t` when `t = w/2`.
pub fn torus_active_ratio<T: Scalar>(t: usize, w: usize) -> Result<T> {
    let (t, w) = torus_validity(t, w)?;
    // √(2tw) = 2t exactly here
    Ok(r(2 * t, t * w))
}

/// Torus QER `√(2tw)`, i.e. `2t` when `t = w/2`.
pub fn torus_qer<T: Scalar>(t: usize, w: usize) -> Result<T> {
    let (t, _) = torus_validity(t, w)?;
    Ok(r(2 * t, 1))
}

fn cyclic_args(n: usize, s: usize) -> Result<(i128, i128)> {
    if n == 0 || s == 0 || s > n {
        return Err(invalid(format!(
            "cyclic closed form needs 1 ≤ s ≤ n, got s={s}, n={n}"
        )));
    }
    Ok((n as i128, s as i128))
}

/// Cyclic EQOS `(s·n + λ·C(n,2)) / C(n+1,2) = (2s + λ(n − 1)) / (n + 1)`.
pub fn cyclic_eqos<T: Scalar>(n: usize, s: usize, lambda: usize) -> Result<T> {
    let (n, s) = cyclic_args(n, s)?;
    let lambda = lambda as i128;
    Ok(r(2 * s + lambda * (n - 1), n + 1))
}

/// Cyclic active ratio `s / n` (about `1/√n` for Singer sets).
pub fn cyclic_active_ratio<T: Scalar>(n: usize, s: usize) -> Result<T> {
    let (n, s) = cyclic_args(n, s)?;
    Ok(r(s, n))
}

/// Cyclic QER with the exact active ratio `s / n`.
pub fn cyclic_qer<T: Scalar>(n: usize, s: usize, lambda: usize) -> Result<T> {
    let (n, s) = cyclic_args(n, s)?;
    let lambda = lambda as i128;
    Ok(r(n * (2 * s + lambda * (n - 1)), s * (n + 1)))
}

/// FPP EQOS `(2s + n − 1) / (n + 1)`: the planar case `λ = 1`.
pub fn fpp_eqos<T: Scalar>(n: usize, s: usize) -> Result<T> {
    cyclic_eqos(n, s, 1)
}
