//! Bracketed monotone root finding.

use crate::error::{Error, Result};

/// Solves `g(x) = target` for a strictly increasing `g` on `[lo, ∞)`.
///
/// The upper bracket starts at `2·lo` (or `lo + 1` when `lo == 0`) and grows
/// geometrically until it straddles the target; bisection then runs until the
/// bracket is narrower than `rel_tol · hi`.
pub fn solve_increasing<G: Fn(f64) -> f64>(g: G, target: f64, lo: f64, rel_tol: f64) -> Result<f64> {
    let glo = g(lo);
    if !(glo <= target) {
        return Err(Error::Bracket(format!(
            "g({lo}) = {glo} already exceeds target {target}"
        )));
    }
    if glo == target {
        return Ok(lo);
    }
    let mut a = lo;
    let mut b = if lo > 0.0 { 2.0 * lo } else { lo + 1.0 };
    let mut expansions = 0;
    while g(b) < target {
        a = b;
        b *= 2.0;
        expansions += 1;
        if expansions > 2000 || !b.is_finite() {
            return Err(Error::Bracket(format!("no upper bracket for target {target}")));
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        if b - a <= rel_tol * b || mid <= a || mid >= b {
            break;
        }
        if g(mid) < target {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_power() {
        let r = solve_increasing(|x| x.powi(5), 32.0, 1.0, 1e-12).unwrap();
        assert!((r - 2.0).abs() < 1e-10);
    }

    #[test]
    fn fixed_point_at_lower_end() {
        let r = solve_increasing(|x| x * x, 4.0, 2.0, 1e-12).unwrap();
        assert_eq!(r, 2.0);
    }

    #[test]
    fn below_range_is_rejected() {
        assert!(solve_increasing(|x| x, 0.5, 1.0, 1e-12).is_err());
    }
}
