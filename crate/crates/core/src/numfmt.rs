//! Deterministic plain-decimal formatting with a fixed number of significant
//! digits, used by the CSV emitters.

/// Format `x` with at least `digits` significant decimal digits, positional
/// notation, no exponent. `digits` is clamped to [1, 17].
pub fn sig(x: f64, digits: usize) -> String {
    let digits = digits.clamp(1, 17);
    if x == 0.0 {
        let mut s = String::from("0.");
        s.push_str(&"0".repeat(digits - 1));
        return s;
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    // Decimal places so that `digits` significant digits survive.
    let places = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{x:.places$}")
}

/// Nine significant digits, the report convention.
pub fn sig9(x: f64) -> String {
    sig(x, 9)
}
