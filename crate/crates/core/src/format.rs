//! Fixed-precision number formatting for reports.

/// Rounds to 12 significant decimal digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest decimal text of `round12(x)`.
pub fn fmt12(x: f64) -> String {
    let r = round12(x);
    if r == 0.0 {
        "0".to_string()
    } else {
        r.to_string()
    }
}
