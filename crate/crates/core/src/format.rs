//! Fixed-precision number formatting for CSV output.

/// Round to `digits` significant digits and print the shortest decimal that
/// round-trips the rounded value; very small or large magnitudes use an
/// exponent.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("formatted float parses");
    let mag = rounded.abs();
    if (1e-4..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// Nine significant digits, the precision of every CSV column.
pub fn sig9(x: f64) -> String {
    fmt_sig(x, 9)
}
