//! One-dimensional maximization of concave functions.
//!
//! Golden-section search keeps a bracket `[a, b]` and two interior probes
//! placed at the golden ratio, discarding the part of the bracket that
//! cannot hold the maximum of a unimodal function. Each iteration shrinks
//! the bracket by `1 / phi` and costs one function evaluation.

/// `1 / phi`
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximum of `f` over `[lo, hi]` for concave (or unimodal) `f`.
///
/// Returns `(x, f(x))` at the midpoint of the final bracket, whose width is
/// at most `tol`. The endpoints are never evaluated, so `f` may be
/// undefined there.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    if b - a <= tol {
        let x = 0.5 * (a + b);
        return (x, f(x));
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        // NaN compares false, which moves the bracket toward `a`.
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let (x, fx) = golden_section_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-9);
        assert!(fx.abs() < 1e-18);
    }

    #[test]
    fn boundary_maximum() {
        let (x, _) = golden_section_max(|x| x, 0.0, 1.0, 1e-10);
        assert!(x > 1.0 - 1e-9);
        let (x, _) = golden_section_max(|x| -x, 2.0, 5.0, 1e-10);
        assert!(x < 2.0 + 1e-9);
    }

    #[test]
    fn degenerate_bracket() {
        let (x, fx) = golden_section_max(|x| x * 2.0, 1.0, 1.0, 1e-10);
        assert_eq!((x, fx), (1.0, 2.0));
    }

    #[test]
    fn tolerates_minus_infinity() {
        let (x, _) = golden_section_max(
            |x| if x > 0.5 { f64::NEG_INFINITY } else { x },
            0.0,
            1.0,
            1e-10,
        );
        assert!((x - 0.5).abs() < 1e-9);
    }
}
