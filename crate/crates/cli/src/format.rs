//! Locale-independent number formatting for CSV output.

/// Shortest decimal form that parses back to the same `f64`, with `.` as
/// the decimal separator and an exponent for very large or small
/// magnitudes (`1e-7`, `2.5e300`).
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() && x == x.trunc() && x.abs() < 1e16 {
        // integral values print without a trailing ".0"
        format!("{x}")
    } else {
        format!("{x:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(fmt_f64(3.0), "3");
        assert_eq!(fmt_f64(-0.0), "-0");
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(1e-7), "1e-7");
        assert_eq!(fmt_f64(2.5e300), "2.5e300");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn round_trips_exactly() {
        let mut x = 0.1234567890123456789f64;
        for _ in 0..2000 {
            x = (x * 3.999).fract() * 10f64.powi((x * 1000.0) as i32 % 40 - 20);
            let back: f64 = fmt_f64(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
            let neg: f64 = fmt_f64(-x).parse().unwrap();
            assert_eq!(neg.to_bits(), (-x).to_bits());
        }
    }
}
