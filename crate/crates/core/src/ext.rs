//! Extended nonnegative reals.
//!
//! Values are plain `f64` where `+∞` is a legal value. Products and quotients
//! use the conventions `0·∞ = 0`, `∞/∞ = 0` and `0/0 = 0`, so every constant
//! is a total function of its inputs.

/// Default cap separating "finite" from "unbounded" on a truncated grid.
pub const DEFAULT_CAP: f64 = 1e6;

/// Product with `0·∞ = 0`.
#[inline]
pub fn mul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// Quotient with `0/0 = 0` and `∞/∞ = 0`; `x/0 = ∞` for `x > 0`.
#[inline]
pub fn div(a: f64, b: f64) -> f64 {
    if a == 0.0 || (a.is_infinite() && b.is_infinite()) {
        0.0
    } else {
        a / b
    }
}

/// Power of a nonnegative extended real; `0^0 = 1`, `0^e = ∞` for `e < 0`.
#[inline]
pub fn pow(a: f64, e: f64) -> f64 {
    if e == 1.0 {
        a
    } else if e.fract() == 0.0 && e.abs() <= 16.0 {
        a.powi(e as i32)
    } else {
        a.powf(e)
    }
}

/// Cap-relative finiteness verdict.
#[inline]
pub fn below_cap(value: f64, cap: f64) -> bool {
    value.is_finite() && value <= cap
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conventions() {
        assert_eq!(mul(0.0, f64::INFINITY), 0.0);
        assert_eq!(mul(f64::INFINITY, 0.0), 0.0);
        assert_eq!(div(0.0, 0.0), 0.0);
        assert_eq!(div(f64::INFINITY, f64::INFINITY), 0.0);
        assert_eq!(div(1.0, 0.0), f64::INFINITY);
        assert_eq!(pow(0.0, -1.0), f64::INFINITY);
        assert_eq!(pow(0.0, 0.0), 1.0);
    }

    #[test]
    fn cap_verdict() {
        assert!(below_cap(1e6, DEFAULT_CAP));
        assert!(!below_cap(1e6 + 1.0, DEFAULT_CAP));
        assert!(!below_cap(f64::INFINITY, DEFAULT_CAP));
    }
}
