//! Root finding for monotone increasing scalar functions.

use super::{NumericsError, Tolerance};

/// Finds `w` in `[lo, hi]` with `f(w) = target`, for `f` non-decreasing.
///
/// Anderson-Bjorck false position with a bisection fallback whenever four steps fail
/// to halve the bracket. Stops once the residual is within
/// `min(tol.abs, tol.rel * |target|)` or the bracket is narrower than
/// `tol.rel * |w|`.
pub fn solve_monotone_increasing<F>(
    mut f: F,
    target: f64,
    lo: f64,
    hi: f64,
    tol: Tolerance,
) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> Result<f64, NumericsError>,
{
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(NumericsError::InvalidBracket { lo, hi });
    }
    let glo = f(lo)? - target;
    let ghi = f(hi)? - target;
    illinois(f, target, (lo, glo), (hi, ghi), tol)
}

/// Finds `w > 0` with `f(w) = target`, for `f` non-decreasing, starting
/// from an estimate of the root.
///
/// Steps outward from `guess` by a factor `1 + spread`, squaring the factor
/// after every miss, then solves as [`solve_monotone_increasing`] without
/// evaluating the bracket ends again.
pub fn solve_from_guess<F>(mut f: F, target: f64, guess: f64, spread: f64, tol: Tolerance) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> Result<f64, NumericsError>,
{
    const MAX_STEPS: usize = 64;
    if !(guess > 0.0) || !guess.is_finite() || !(spread > 0.0) {
        return Err(NumericsError::InvalidBracket { lo: guess, hi: guess });
    }
    let g0 = f(guess)? - target;
    if g0 == 0.0 {
        return Ok(guess);
    }
    let mut near = (guess, g0);
    let mut factor = 1.0 + spread;
    for _ in 0..MAX_STEPS {
        let x = if g0 < 0.0 { near.0 * factor } else { near.0 / factor };
        if !x.is_finite() || x < f64::MIN_POSITIVE {
            break;
        }
        let far = (x, f(x)? - target);
        if (far.1 >= 0.0) == (g0 < 0.0) {
            let (lo, hi) = if g0 < 0.0 { (near, far) } else { (far, near) };
            return illinois(f, target, lo, hi, tol);
        }
        near = far;
        factor *= factor;
    }
    Err(NumericsError::InvalidBracket { lo: near.0, hi: near.0 })
}

fn illinois<F>(
    mut f: F,
    target: f64,
    (mut lo, mut glo): (f64, f64),
    (mut hi, mut ghi): (f64, f64),
    tol: Tolerance,
) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> Result<f64, NumericsError>,
{
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo > 0.0 || ghi < 0.0 || glo.is_nan() || ghi.is_nan() {
        return Err(NumericsError::InvalidBracket { lo, hi });
    }
    let residual_tol = tol.abs.min(tol.rel * target.abs());
    let mut side = 0i8;
    let mut bisect = false;
    let mut checkpoint = hi - lo;
    for iter in 0..tol.max_iter {
        let mut x = if bisect {
            0.5 * (lo + hi)
        } else {
            (lo * ghi - hi * glo) / (ghi - glo)
        };
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        if !(x > lo && x < hi) {
            // bracket is down to adjacent floats
            return Ok(if -glo <= ghi { lo } else { hi });
        }
        let gx = f(x)? - target;
        if gx.is_nan() {
            return Err(NumericsError::Domain {
                what: "solver objective returned NaN",
                value: x,
            });
        }
        if gx.abs() <= residual_tol {
            return Ok(x);
        }
        // Anderson-Bjorck: damp the stale end when the same end moves twice
        if gx < 0.0 {
            if side == -1 {
                ghi *= damping(gx, glo);
            }
            lo = x;
            glo = gx;
            side = -1;
        } else {
            if side == 1 {
                glo *= damping(gx, ghi);
            }
            hi = x;
            ghi = gx;
            side = 1;
        }
        let width = hi - lo;
        if width <= tol.rel * lo.abs().max(hi.abs()) {
            return Ok(if -glo <= ghi { lo } else { hi });
        }
        if iter % 4 == 3 {
            bisect = width > 0.5 * checkpoint;
            checkpoint = width;
        } else {
            bisect = false;
        }
    }
    Err(NumericsError::NoConvergence {
        iterations: tol.max_iter,
    })
}

fn damping(new: f64, old: f64) -> f64 {
    let m = 1.0 - new / old;
    if m > 0.0 {
        m
    } else {
        0.5
    }
}

/// Grows `[start, start]` geometrically until it brackets `target`.
///
/// The upper end doubles and the lower end halves; `start` must be positive.
pub fn bracket_increasing<F>(mut f: F, target: f64, start: f64) -> Result<(f64, f64), NumericsError>
where
    F: FnMut(f64) -> Result<f64, NumericsError>,
{
    const MAX_STEPS: usize = 2_200;
    if !(start > 0.0) || !start.is_finite() {
        return Err(NumericsError::InvalidBracket { lo: start, hi: start });
    }
    let mut lo = start;
    let mut hi = start;
    let mut steps = 0;
    while f(hi)? < target {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps > MAX_STEPS || !hi.is_finite() {
            return Err(NumericsError::InvalidBracket { lo, hi });
        }
    }
    if lo < hi {
        return Ok((lo, hi));
    }
    while f(lo)? > target {
        hi = lo;
        lo *= 0.5;
        steps += 1;
        if steps > MAX_STEPS || lo < f64::MIN_POSITIVE {
            return Err(NumericsError::InvalidBracket { lo, hi });
        }
    }
    Ok((lo, hi))
}
