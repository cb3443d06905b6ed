//! Locale-free number formatting for CSV output.

/// 17 significant digits in scientific notation; round-trips every `f64`.
pub fn sci(v: f64) -> String {
    format!("{v:.16e}")
}
